//! Named spaces, sequences and map systems with executable expectations.
//!
//! | name               | kind             | content                                        |
//! |--------------------|------------------|------------------------------------------------|
//! | `e2a`              | finite space     | `{a,b}`, `sigma(a,a) = sigma(a,b) = 1`, `sigma(b,b) = 2` |
//! | `e2b`              | sequence         | `{a,b}`, `sigma(a,a) = sigma(a,b) = 0`, `sigma(b,b) = 1`; `a,b,a,b,...` |
//! | `e2b_swap`         | map system       | the swap on `e2b` from `a`                      |
//! | `sumline[:S]`      | finite space     | `sigma(x,y) = x + y` on `S`, default `{0,1,2,3}` |
//! | `maxline[:S]`      | finite space     | `sigma(x,y) = max(x,y)` on `S`, default `{0,1,2,3}` |
//! | `maxline_descent`  | map system       | `x -> floor(x/2)` on `maxline` from `3`        |
//! | `sumline_interval` | functional space | `x + y` on `[0,1]`                             |
//! | `maxline_interval` | functional space | `max(x,y)` on `[0,1]`                          |
//! | `halving`          | map system       | `x/2` on `maxline_interval` from `1`           |
//! | `quartering`       | map system       | `x/4` on `maxline_interval` from `1`           |
//! | `thirding`         | map system       | `x/3` on `maxline_interval` from `1`           |
//! | `zero_map`         | map system       | `x -> 0` on `maxline_interval` from `1`        |
//!
//! `S` is a comma-separated list of numbers, e.g. `sumline:-1,0,1,2`.
//!
//! Expectations are `property -> verdict` strings; [`check`] evaluates each
//! one with the module that owns the property.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{classify, Axiom};
use crate::contraction::{
    check_bounded_below, check_c_r, check_nonexpansive, check_phi_r, check_weak_orbital_continuity,
    MapSystem, Phi, DEFAULT_DEPTH, DEFAULT_PAIR_SAMPLES,
};
use crate::derived::sigma_star_with_tol;
use crate::error::{Error, Result};
use crate::fixedpoint::{analyze_orbit, banach, kannan, solve, FixedPointResult, DEFAULT_MAX_ITER};
use crate::scalar::Scalar;
use crate::sequences::{cauchy_analyze, CauchyStatus, SequencePrefix, DEFAULT_WINDOW};
use crate::space::{FiniteSpace, FunctionalSpace, Space};
use crate::topology::{compare, separation, BallFamily};
use crate::{Class, Rational};

pub const NAMES: [&str; 12] = [
    "e2a",
    "e2b",
    "e2b_swap",
    "sumline",
    "maxline",
    "maxline_descent",
    "sumline_interval",
    "maxline_interval",
    "halving",
    "quartering",
    "thirding",
    "zero_map",
];

const DEFAULT_LINE: [f64; 4] = [0.0, 1.0, 2.0, 3.0];

/// Length of stored sequences and of analysed orbit prefixes.
pub const PREFIX_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    FiniteSpace,
    FunctionalSpace,
    MapSystem,
    Sequence,
}

impl EntryKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntryKind::FiniteSpace => "finite_space",
            EntryKind::FunctionalSpace => "functional_space",
            EntryKind::MapSystem => "map_system",
            EntryKind::Sequence => "sequence",
        }
    }
}

pub enum Payload<S: Scalar> {
    Finite(FiniteSpace<S>),
    Functional(FunctionalSpace<S>),
    FiniteMap(MapSystem<S, FiniteSpace<S>>),
    FunctionalMap(MapSystem<S, FunctionalSpace<S>>),
    Sequence { space: FiniteSpace<S>, terms: Vec<usize> },
}

pub struct CorpusEntry<S: Scalar> {
    pub name: String,
    pub kind: EntryKind,
    pub description: &'static str,
    pub payload: Payload<S>,
    pub expected: BTreeMap<String, String>,
}

impl<S: Scalar> CorpusEntry<S> {
    /// The underlying finite table, for finite spaces, sequences and maps on
    /// finite spaces.
    pub fn finite_space(&self) -> Option<&FiniteSpace<S>> {
        match &self.payload {
            Payload::Finite(s) | Payload::Sequence { space: s, .. } => Some(s),
            Payload::FiniteMap(m) => Some(m.space()),
            _ => None,
        }
    }

    pub fn functional_space(&self) -> Option<&FunctionalSpace<S>> {
        match &self.payload {
            Payload::Functional(s) => Some(s),
            Payload::FunctionalMap(m) => Some(m.space()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntrySummary {
    pub name: &'static str,
    pub kind: EntryKind,
    pub description: &'static str,
}

pub fn list() -> Vec<EntrySummary> {
    NAMES
        .iter()
        .map(|n| {
            let e = get(n).expect("registered entries build");
            EntrySummary {
                name: n,
                kind: e.kind,
                description: e.description,
            }
        })
        .collect()
}

fn expect(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn two_point<S: Scalar>(aa: i64, ab: i64, bb: i64) -> FiniteSpace<S> {
    let v = |n: i64| S::from_i64(n).expect("small integers fit");
    FiniteSpace::new(
        vec!["a".into(), "b".into()],
        vec![vec![v(aa), v(ab)], vec![v(ab), v(bb)]],
    )
    .expect("valid two-point table")
}

fn parse_points(spec: &str) -> Result<Vec<f64>> {
    let pts = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidConfig(format!("bad point `{t}` in `{spec}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if pts.is_empty() {
        return Err(Error::EmptySpace);
    }
    Ok(pts)
}

/// `S` as labelled points; labels use the scalar's own formatting.
pub fn line_space<S: Scalar>(points: &[f64], sigma: impl Fn(S, S) -> S) -> Result<FiniteSpace<S>> {
    let xs: Vec<S> = points.iter().map(|p| S::from_sample(*p)).collect();
    FiniteSpace::from_fn(xs.iter().map(|x| x.to_string()).collect(), |i, j| sigma(xs[i], xs[j]))
}

fn finite_entry<S: Scalar>(name: &str) -> Result<Option<CorpusEntry<S>>> {
    let (base, points) = match name.split_once(':') {
        Some((b, p)) => (b, Some(parse_points(p)?)),
        None => (name, None),
    };
    if points.is_some() && base != "sumline" && base != "maxline" {
        return Err(Error::UnknownCorpusEntry(name.into()));
    }
    let default = points.is_none();
    let pts = points.unwrap_or_else(|| DEFAULT_LINE.to_vec());

    let entry = match base {
        "e2a" => CorpusEntry {
            name: name.into(),
            kind: EntryKind::FiniteSpace,
            description: "M-metric whose sigma* is not a metric",
            payload: Payload::Finite(two_point(1, 1, 2)),
            expected: expect(&[
                ("class", "m_metric"),
                ("sigma_star_is_metric", "false"),
                ("axiom:p-lbnd", "fail"),
            ]),
        },
        "e2b" => {
            let space = two_point(0, 0, 1);
            CorpusEntry {
                name: name.into(),
                kind: EntryKind::Sequence,
                description: "alternating sequence with constant consecutive distance",
                payload: Payload::Sequence {
                    space,
                    terms: (0..PREFIX_LEN).map(|i| i % 2).collect(),
                },
                expected: expect(&[("class", "m_metric"), ("cauchy", "not_cauchy")]),
            }
        }
        "e2b_swap" => CorpusEntry {
            name: name.into(),
            kind: EntryKind::MapSystem,
            description: "swap map on e2b; its orbit is the alternating sequence",
            payload: Payload::FiniteMap(MapSystem::new(name, two_point(0, 0, 1), |x: &usize| 1 - x, 0)?),
            expected: expect(&[("cauchy", "not_cauchy"), ("solve", "none")]),
        },
        "sumline" => {
            let space = line_space::<S>(&pts, |x, y| x + y)?;
            let mut expected = expect(&[("class", "m_metric")]);
            if pts.len() > 1 {
                expected.insert("axiom:p-lbnd".into(), "fail".into());
            } else {
                expected.insert("class".into(), "partial_metric".into());
            }
            if default {
                expected.insert("topology:m_open:induced_p".into(), "left_strictly_coarser".into());
            }
            CorpusEntry {
                name: name.into(),
                kind: EntryKind::FiniteSpace,
                description: "sigma(x,y) = x + y on a finite set of reals",
                payload: Payload::Finite(space),
                expected,
            }
        }
        "maxline" => {
            let space = line_space::<S>(&pts, |x, y| x.max_of(y))?;
            let class = if pts.iter().all(|p| *p == 0.0) {
                "metric"
            } else {
                "partial_metric"
            };
            let mut expected = expect(&[("class", class)]);
            if default {
                expected.insert("separation:m_open".into(), "T0_not_T1".into());
            }
            CorpusEntry {
                name: name.into(),
                kind: EntryKind::FiniteSpace,
                description: "sigma(x,y) = max(x,y) on a finite set of reals",
                payload: Payload::Finite(space),
                expected,
            }
        }
        "maxline_descent" => {
            let space = line_space::<S>(&DEFAULT_LINE, |x, y| x.max_of(y))?;
            // Index i holds the value i.
            let sys = MapSystem::new(name, space, |x: &usize| x / 2, 3)?;
            CorpusEntry {
                name: name.into(),
                kind: EntryKind::MapSystem,
                description: "x -> floor(x/2) on maxline {0,1,2,3}, from 3",
                payload: Payload::FiniteMap(sys),
                expected: expect(&[
                    ("class", "partial_metric"),
                    ("cauchy", "r_cauchy"),
                    ("certify:c_r:1/2:0", "holds"),
                    ("certify:phi_r:1/2:0", "holds"),
                    ("nonexpansive", "true"),
                    ("woc", "true"),
                    ("solve", "0"),
                    ("banach:1/2", "0"),
                ]),
            }
        }
        _ => return Ok(None),
    };
    Ok(Some(entry))
}

fn unit_interval(name: &str, sigma: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<FunctionalSpace<f64>> {
    Ok(FunctionalSpace::new(name, Some(0.0), Some(1.0), sigma)?
        .with_lower_bound(0.0)
        .declared_complete(true))
}

pub fn maxline_interval() -> FunctionalSpace<f64> {
    unit_interval("maxline_interval", f64::max).expect("valid interval")
}

pub fn sumline_interval() -> FunctionalSpace<f64> {
    unit_interval("sumline_interval", |x, y| x + y).expect("valid interval")
}

fn map_entry(
    name: &str,
    description: &'static str,
    f: impl Fn(&f64) -> f64 + Send + Sync + 'static,
    expected: &[(&str, &str)],
) -> Result<CorpusEntry<f64>> {
    Ok(CorpusEntry {
        name: name.into(),
        kind: EntryKind::MapSystem,
        description,
        payload: Payload::FunctionalMap(MapSystem::new(name, maxline_interval(), f, 1.0)?),
        expected: expect(expected),
    })
}

fn functional_entry(name: &str) -> Result<Option<CorpusEntry<f64>>> {
    let entry = match name {
        "sumline_interval" | "maxline_interval" => CorpusEntry {
            name: name.into(),
            kind: EntryKind::FunctionalSpace,
            description: if name == "sumline_interval" {
                "sigma(x,y) = x + y on [0,1]"
            } else {
                "sigma(x,y) = max(x,y) on [0,1]"
            },
            payload: Payload::Functional(if name == "sumline_interval" {
                sumline_interval()
            } else {
                maxline_interval()
            }),
            expected: expect(&[("bounded_below:0", "true"), ("bounded_below:1/2", "false")]),
        },
        "halving" => map_entry(
            name,
            "x/2 on [0,1] with sigma = max, from 1",
            |x| x / 2.0,
            &[
                ("cauchy", "r_cauchy"),
                ("certify:c_r:1/2:0", "holds"),
                ("certify:phi_r:1/2:0", "holds"),
                ("nonexpansive", "true"),
                ("woc", "true"),
                ("solve", "0"),
                ("banach:1/2", "0"),
                ("kannan:1/5", "precondition(1, 0)"),
            ],
        )?,
        "quartering" => map_entry(
            name,
            "x/4 on [0,1] with sigma = max, from 1",
            |x| x / 4.0,
            &[
                ("cauchy", "r_cauchy"),
                ("certify:c_r:1/2:0", "holds"),
                ("solve", "0"),
                ("kannan:1/4", "0"),
            ],
        )?,
        "thirding" => map_entry(
            name,
            "x/3 on [0,1] with sigma = max, from 1",
            |x| x / 3.0,
            &[
                ("cauchy", "r_cauchy"),
                ("certify:phi_r:2/3:0", "holds"),
                ("solve", "0"),
                ("banach:1/3", "0"),
            ],
        )?,
        "zero_map" => map_entry(
            name,
            "constant 0 on [0,1] with sigma = max, from 1",
            |_| 0.0,
            &[
                ("cauchy", "r_cauchy"),
                ("certify:phi_r:1:0", "holds"),
                ("solve", "0"),
                ("banach:0", "0"),
                ("kannan:0", "0"),
            ],
        )?,
        _ => return Ok(None),
    };
    Ok(Some(entry))
}

/// Looks up an entry in `f64`.
pub fn get(name: &str) -> Result<CorpusEntry<f64>> {
    if let Some(e) = finite_entry::<f64>(name)? {
        return Ok(e);
    }
    functional_entry(name)?.ok_or_else(|| Error::UnknownCorpusEntry(name.into()))
}

/// Looks up a finite entry in exact rational arithmetic. Functional entries
/// have no exact form.
pub fn get_exact(name: &str) -> Result<CorpusEntry<Rational>> {
    if let Some(e) = finite_entry::<Rational>(name)? {
        return Ok(e);
    }
    if functional_entry(name)?.is_some() {
        return Err(Error::InvalidConfig(format!("corpus entry `{name}` has no exact form")));
    }
    Err(Error::UnknownCorpusEntry(name.into()))
}

/// The JSON space file of an entry with a finite table.
pub fn emit(name: &str) -> Result<String> {
    let e = get(name)?;
    e.finite_space()
        .map(|s| s.to_json())
        .ok_or_else(|| Error::InvalidConfig(format!("corpus entry `{name}` is not a finite space")))
}

/// Parses `3`, `0.5` or `1/3`.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(S::from_sample)
            .ok_or_else(|| Error::InvalidConfig(format!("bad number `{text}`")))
    };
    match text.split_once('/') {
        Some((a, b)) => {
            let d = num(b)?;
            if d == S::zero() {
                return Err(Error::InvalidConfig(format!("zero denominator in `{text}`")));
            }
            Ok(num(a)? / d)
        }
        None => num(text),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub property: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

fn status_name<S>(s: &CauchyStatus<S>) -> &'static str {
    match s {
        CauchyStatus::RCauchy { .. } => "r_cauchy",
        CauchyStatus::NotCauchy => "not_cauchy",
        CauchyStatus::Inconclusive => "inconclusive",
    }
}

fn not_applicable(property: &str) -> Error {
    Error::InvalidConfig(format!("property `{property}` does not apply to this entry"))
}

fn check_finite_space<S: Scalar>(space: &FiniteSpace<S>, property: &str, tol: S) -> Result<Option<String>> {
    let parts: Vec<&str> = property.split(':').collect();
    let out = match parts.as_slice() {
        ["class"] => classify(space, tol)?.class.to_string(),
        ["sigma_star_is_metric"] => {
            let star = sigma_star_with_tol(space, tol)?;
            (classify(&star, tol)?.class == Class::Metric).to_string()
        }
        ["axiom", a] => {
            let axiom: Axiom = a.parse()?;
            if classify(space, tol)?.passes(axiom) { "pass" } else { "fail" }.to_string()
        }
        ["topology", l, r] => compare(space, l.parse()?, r.parse()?)?.relation.to_string(),
        ["separation", fam] => separation(space, fam.parse::<BallFamily>()?)?.to_string(),
        _ => return Ok(None),
    };
    Ok(Some(out))
}

fn check_any_space<S: Scalar, Sp: Space<S>>(space: &Sp, property: &str) -> Result<Option<String>> {
    match property.split_once(':') {
        Some(("bounded_below", r0)) => Ok(Some(check_bounded_below(space, Some(parse_scalar(r0)?))?.to_string())),
        _ => Ok(None),
    }
}

fn point_or_none<S: Scalar, P>(r: &FixedPointResult<S, P>) -> String {
    r.point_label.clone().unwrap_or_else(|| "none".into())
}

fn as_verdict<S: Scalar, P>(r: Result<FixedPointResult<S, P>>) -> Result<String> {
    match r {
        Ok(r) => Ok(point_or_none(&r)),
        Err(Error::Precondition { x, y, .. }) => Ok(format!("precondition({x}, {y})")),
        Err(e) => Err(e),
    }
}

fn check_map<S: Scalar, Sp: Space<S> + Clone>(
    sys: &MapSystem<S, Sp>,
    property: &str,
    tol: S,
) -> Result<Option<String>> {
    let parts: Vec<&str> = property.split(':').collect();
    let out = match parts.as_slice() {
        ["cauchy"] => {
            let o = analyze_orbit(sys, PREFIX_LEN, DEFAULT_WINDOW, tol)?;
            status_name(&o.cauchy.status).to_string()
        }
        ["certify", "c_r", c, r] => {
            let cert = check_c_r(sys, parse_scalar(c)?, parse_scalar(r)?, DEFAULT_DEPTH, tol)?;
            if cert.holds() { "holds" } else { "violated" }.to_string()
        }
        ["certify", "phi_r", slope, r] => {
            let phi = Phi::Linear { slope: parse_scalar(slope)? };
            let cert = check_phi_r(sys, &phi, parse_scalar(r)?, DEFAULT_DEPTH, tol)?;
            if cert.holds() { "holds" } else { "violated" }.to_string()
        }
        ["nonexpansive"] => check_nonexpansive(sys, DEFAULT_PAIR_SAMPLES, tol).holds.to_string(),
        ["woc"] => check_weak_orbital_continuity(sys, PREFIX_LEN, tol)?.holds.to_string(),
        ["solve"] => point_or_none(&solve(sys, DEFAULT_MAX_ITER, tol, None)?),
        ["banach", k] => as_verdict(banach(sys, parse_scalar(k)?, DEFAULT_MAX_ITER, tol))?,
        ["kannan", k] => as_verdict(kannan(sys, parse_scalar(k)?, DEFAULT_MAX_ITER, tol))?,
        _ => return check_any_space(sys.space(), property),
    };
    Ok(Some(out))
}

/// Evaluates one property on an entry.
pub fn evaluate<S: Scalar>(entry: &CorpusEntry<S>, property: &str, tol: S) -> Result<String> {
    let got = match &entry.payload {
        Payload::Finite(s) => match check_finite_space(s, property, tol)? {
            Some(v) => Some(v),
            None => check_any_space(s, property)?,
        },
        Payload::Functional(s) => check_any_space(s, property)?,
        Payload::Sequence { space, terms } => {
            if property == "cauchy" {
                let seq = SequencePrefix::new(space, terms.clone())?;
                Some(status_name(&cauchy_analyze(&seq, DEFAULT_WINDOW, tol)?.status).to_string())
            } else {
                check_finite_space(space, property, tol)?
            }
        }
        Payload::FiniteMap(sys) => match check_finite_space(sys.space(), property, tol)? {
            Some(v) => Some(v),
            None => check_map(sys, property, tol)?,
        },
        Payload::FunctionalMap(sys) => check_map(sys, property, tol)?,
    };
    got.ok_or_else(|| not_applicable(property))
}

/// Evaluates every expectation of an entry.
pub fn check<S: Scalar>(entry: &CorpusEntry<S>, tol: S) -> Result<Vec<CheckOutcome>> {
    entry
        .expected
        .iter()
        .map(|(property, expected)| {
            let actual = evaluate(entry, property, tol)?;
            Ok(CheckOutcome {
                property: property.clone(),
                expected: expected.clone(),
                pass: &actual == expected,
                actual,
            })
        })
        .collect()
}
