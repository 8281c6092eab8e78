//! Exhaustive axiom checking for finite tables.
//!
//! Three nested axiom sets are checked:
//!
//! * M-metric: `sigma-lbnd`, `sigma-sym`, `sigma-sep`, `sigma-inq`, where the
//!   inequality is the shifted triangle inequality
//!   `sigma(x,y) - m_xy <= sigma(x,z) - m_xz + sigma(z,y) - m_zy`.
//! * partial metric: the M-metric set plus `p-lbnd`, `p-sym`, `p-sep`,
//!   `p-inq` (`p(x,y) <= p(x,z) + p(z,y) - p(z,z)`).
//! * metric: the partial metric set plus zero self-distance.
//!
//! Every partial metric is an M-metric, so including the M-metric set in the
//! partial metric check changes nothing in exact arithmetic and keeps the
//! labels monotone under tolerance.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::FiniteSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    None,
    MMetric,
    PartialMetric,
    Metric,
}

impl Class {
    pub fn as_str(self) -> &'static str {
        match self {
            Class::None => "none",
            Class::MMetric => "m_metric",
            Class::PartialMetric => "partial_metric",
            Class::Metric => "metric",
        }
    }

    /// Whether a space of this class is at least a `other`.
    pub fn at_least(self, other: Class) -> bool {
        self >= other
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Axiom {
    #[serde(rename = "sigma-lbnd")]
    SigmaLbnd,
    #[serde(rename = "sigma-sym")]
    SigmaSym,
    #[serde(rename = "sigma-sep")]
    SigmaSep,
    #[serde(rename = "sigma-inq")]
    SigmaInq,
    #[serde(rename = "p-lbnd")]
    PLbnd,
    #[serde(rename = "p-sym")]
    PSym,
    #[serde(rename = "p-sep")]
    PSep,
    #[serde(rename = "p-inq")]
    PInq,
    #[serde(rename = "zero-self-distance")]
    ZeroSelfDistance,
}

impl Axiom {
    pub const M_METRIC: [Axiom; 4] = [
        Axiom::SigmaLbnd,
        Axiom::SigmaSym,
        Axiom::SigmaSep,
        Axiom::SigmaInq,
    ];
    pub const PARTIAL_METRIC: [Axiom; 4] = [Axiom::PLbnd, Axiom::PSym, Axiom::PSep, Axiom::PInq];
    pub const ALL: [Axiom; 9] = [
        Axiom::SigmaLbnd,
        Axiom::SigmaSym,
        Axiom::SigmaSep,
        Axiom::SigmaInq,
        Axiom::PLbnd,
        Axiom::PSym,
        Axiom::PSep,
        Axiom::PInq,
        Axiom::ZeroSelfDistance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::SigmaLbnd => "sigma-lbnd",
            Axiom::SigmaSym => "sigma-sym",
            Axiom::SigmaSep => "sigma-sep",
            Axiom::SigmaInq => "sigma-inq",
            Axiom::PLbnd => "p-lbnd",
            Axiom::PSym => "p-sym",
            Axiom::PSep => "p-sep",
            Axiom::PInq => "p-inq",
            Axiom::ZeroSelfDistance => "zero-self-distance",
        }
    }
}

impl std::str::FromStr for Axiom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown axiom `{s}`")))
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point tuple together with the values that violate an axiom there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<S> {
    pub points: Vec<String>,
    pub values: Vec<(String, S)>,
}

impl<S: Scalar> Witness<S> {
    pub fn value(&self, name: &str) -> Option<S> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

impl<S: Scalar> fmt::Display for Witness<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.points.join(", "))?;
        for (name, v) in &self.values {
            write!(f, " {name}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum AxiomResult<S> {
    Pass,
    /// First violating tuple in lexicographic order, plus the total number of
    /// violating tuples.
    Fail { witness: Witness<S>, violations: usize },
}

impl<S> AxiomResult<S> {
    pub fn passed(&self) -> bool {
        matches!(self, AxiomResult::Pass)
    }

    pub fn witness(&self) -> Option<&Witness<S>> {
        match self {
            AxiomResult::Pass => None,
            AxiomResult::Fail { witness, .. } => Some(witness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport<S> {
    pub class: Class,
    pub axiom_results: BTreeMap<Axiom, AxiomResult<S>>,
}

impl<S: Scalar> ClassificationReport<S> {
    pub fn result(&self, axiom: Axiom) -> &AxiomResult<S> {
        &self.axiom_results[&axiom]
    }

    pub fn passes(&self, axiom: Axiom) -> bool {
        self.result(axiom).passed()
    }

    pub fn failures(&self) -> impl Iterator<Item = (Axiom, &Witness<S>)> {
        self.axiom_results
            .iter()
            .filter_map(|(a, r)| r.witness().map(|w| (*a, w)))
    }
}

/// Records the first witness and counts violations for one axiom.
struct Tally<S> {
    first: Option<Witness<S>>,
    count: usize,
}

impl<S: Scalar> Tally<S> {
    fn new() -> Self {
        Self {
            first: None,
            count: 0,
        }
    }

    fn record(&mut self, witness: impl FnOnce() -> Witness<S>) {
        self.count += 1;
        if self.first.is_none() {
            self.first = Some(witness());
        }
    }

    fn finish(self) -> AxiomResult<S> {
        match self.first {
            None => AxiomResult::Pass,
            Some(witness) => AxiomResult::Fail {
                witness,
                violations: self.count,
            },
        }
    }
}

fn witness<S: Scalar>(space: &FiniteSpace<S>, pts: &[usize], values: &[(&str, S)]) -> Witness<S> {
    Witness {
        points: pts.iter().map(|&i| space.label_of(i).to_owned()).collect(),
        values: values.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
    }
}

/// Checks every axiom instance (pairs for `lbnd`/`sym`/`sep`, ordered triples
/// for the inequalities) with absolute tolerance `tol`, and labels the space
/// with the strongest class whose axiom set passed.
///
/// Separation counts as violated at `x != y` when all three of
/// `sigma(x,x)`, `sigma(x,y)`, `sigma(y,y)` agree within `tol`.
pub fn classify<S: Scalar>(space: &FiniteSpace<S>, tol: S) -> Result<ClassificationReport<S>> {
    if tol < S::zero() || !tol.is_finite_value() {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol.to_string(),
            range: "[0, inf)",
        });
    }
    let n = space.len();
    let s = |i: usize, j: usize| space.get(i, j);
    let m = |i: usize, j: usize| s(i, i).min_of(s(j, j));

    let mut lbnd = Tally::new();
    let mut sym = Tally::new();
    let mut sep = Tally::new();
    let mut inq = Tally::new();
    let mut p_lbnd = Tally::new();
    let mut p_sym = Tally::new();
    let mut p_sep = Tally::new();
    let mut p_inq = Tally::new();
    let mut zero = Tally::new();

    for x in 0..n {
        if s(x, x).abs() > tol {
            zero.record(|| witness(space, &[x], &[("sigma(x,x)", s(x, x))]));
        }
        for y in 0..n {
            let (sxy, syx) = (s(x, y), s(y, x));
            if m(x, y) - sxy > tol {
                lbnd.record(|| witness(space, &[x, y], &[("m(x,y)", m(x, y)), ("sigma(x,y)", sxy)]));
            }
            if (sxy - syx).abs() > tol {
                let w = || witness(space, &[x, y], &[("sigma(x,y)", sxy), ("sigma(y,x)", syx)]);
                sym.record(w);
                p_sym.record(w);
            }
            if s(x, x) - sxy > tol {
                p_lbnd.record(|| {
                    witness(space, &[x, y], &[("sigma(x,x)", s(x, x)), ("sigma(x,y)", sxy)])
                });
            }
            if x < y && (s(x, x) - sxy).abs() <= tol && (sxy - s(y, y)).abs() <= tol {
                let w = || {
                    witness(
                        space,
                        &[x, y],
                        &[("sigma(x,x)", s(x, x)), ("sigma(x,y)", sxy), ("sigma(y,y)", s(y, y))],
                    )
                };
                sep.record(w);
                p_sep.record(w);
            }
            for z in 0..n {
                let lhs = sxy - m(x, y);
                let rhs = (s(x, z) - m(x, z)) + (s(z, y) - m(z, y));
                if lhs - rhs > tol {
                    inq.record(|| witness(space, &[x, y, z], &[("lhs", lhs), ("rhs", rhs)]));
                }
                let rhs = s(x, z) + s(z, y) - s(z, z);
                if sxy - rhs > tol {
                    p_inq.record(|| witness(space, &[x, y, z], &[("lhs", sxy), ("rhs", rhs)]));
                }
            }
        }
    }

    let mut axiom_results = BTreeMap::new();
    axiom_results.insert(Axiom::SigmaLbnd, lbnd.finish());
    axiom_results.insert(Axiom::SigmaSym, sym.finish());
    axiom_results.insert(Axiom::SigmaSep, sep.finish());
    axiom_results.insert(Axiom::SigmaInq, inq.finish());
    axiom_results.insert(Axiom::PLbnd, p_lbnd.finish());
    axiom_results.insert(Axiom::PSym, p_sym.finish());
    axiom_results.insert(Axiom::PSep, p_sep.finish());
    axiom_results.insert(Axiom::PInq, p_inq.finish());
    axiom_results.insert(Axiom::ZeroSelfDistance, zero.finish());

    let all = |axioms: &[Axiom]| axioms.iter().all(|a| axiom_results[a].passed());
    let m_metric = all(&Axiom::M_METRIC);
    let partial = m_metric && all(&Axiom::PARTIAL_METRIC);
    let metric = partial && axiom_results[&Axiom::ZeroSelfDistance].passed();
    let class = if metric {
        Class::Metric
    } else if partial {
        Class::PartialMetric
    } else if m_metric {
        Class::MMetric
    } else {
        Class::None
    };
    Ok(ClassificationReport {
        class,
        axiom_results,
    })
}

/// Shorthand for `classify(space, tol)?.class` with the scalar's default
/// tolerance.
pub fn class_of<S: Scalar>(space: &FiniteSpace<S>) -> Class {
    classify(space, S::default_tolerance())
        .map(|r| r.class)
        .unwrap_or(Class::None)
}

pub(crate) fn require_m_metric<S: Scalar>(space: &FiniteSpace<S>, tol: S) -> Result<Class> {
    let class = classify(space, tol)?.class;
    if class.at_least(Class::MMetric) {
        Ok(class)
    } else {
        Err(Error::NotMMetric(class.to_string()))
    }
}

pub(crate) fn require_partial_metric<S: Scalar>(space: &FiniteSpace<S>, tol: S) -> Result<Class> {
    let class = classify(space, tol)?.class;
    if class.at_least(Class::PartialMetric) {
        Ok(class)
    } else {
        Err(Error::NotPartialMetric(class.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn e2a() -> FiniteSpace<Rational> {
        FiniteSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![q(1), q(1)], vec![q(1), q(2)]],
        )
        .unwrap()
    }

    fn line(points: &[i64], f: impl Fn(i64, i64) -> i64) -> FiniteSpace<Rational> {
        let ls = points.iter().map(|p| p.to_string()).collect();
        FiniteSpace::from_fn(ls, |i, j| q(f(points[i], points[j]))).unwrap()
    }

    #[test]
    fn e2a_is_m_metric_with_p_lbnd_witness() {
        let r = classify(&e2a(), q(0)).unwrap();
        assert_eq!(r.class, Class::MMetric);
        for a in Axiom::M_METRIC {
            assert!(r.passes(a), "{a} should pass");
        }
        let AxiomResult::Fail { witness, violations } = r.result(Axiom::PLbnd) else {
            panic!("p-lbnd should fail")
        };
        assert_eq!(witness.points, vec!["b", "a"]);
        assert_eq!(witness.value("sigma(x,x)"), Some(q(2)));
        assert_eq!(witness.value("sigma(x,y)"), Some(q(1)));
        assert_eq!(*violations, 1);
    }

    #[test]
    fn sumline_is_m_metric_not_partial() {
        let r = classify(&line(&[0, 1, 2], |x, y| x + y), q(0)).unwrap();
        assert_eq!(r.class, Class::MMetric);
        assert!(!r.passes(Axiom::PLbnd));
    }

    #[test]
    fn maxline_is_partial_metric() {
        let r = classify(&line(&[0, 1, 2], |x, y| x.max(y)), q(0)).unwrap();
        assert_eq!(r.class, Class::PartialMetric);
    }

    #[test]
    fn single_point_nonzero_self_distance_is_partial_metric() {
        let s = FiniteSpace::new(labels(1), vec![vec![q(5)]]).unwrap();
        let r = classify(&s, q(0)).unwrap();
        assert_eq!(r.class, Class::PartialMetric);
        assert!(!r.passes(Axiom::ZeroSelfDistance));
    }

    #[test]
    fn absolute_value_metric() {
        let r = classify(&line(&[-2, 0, 1, 5], |x, y| (x - y).abs()), q(0)).unwrap();
        assert_eq!(r.class, Class::Metric);
    }

    #[test]
    fn separation_failure() {
        // Two points at the same self-distance and zero spread.
        let s = FiniteSpace::new(labels(2), vec![vec![q(1), q(1)], vec![q(1), q(1)]]).unwrap();
        let r = classify(&s, q(0)).unwrap();
        assert_eq!(r.class, Class::None);
        assert_eq!(r.result(Axiom::SigmaSep).witness().unwrap().points, vec!["0", "1"]);
    }

    #[test]
    fn inequality_failure_witness() {
        // sigma(0,2) = 10 but 0 -> 1 -> 2 costs 2.
        let s = FiniteSpace::new(
            labels(3),
            vec![
                vec![q(0), q(1), q(10)],
                vec![q(1), q(0), q(1)],
                vec![q(10), q(1), q(0)],
            ],
        )
        .unwrap();
        let r = classify(&s, q(0)).unwrap();
        assert_eq!(r.class, Class::None);
        let w = r.result(Axiom::SigmaInq).witness().unwrap();
        assert_eq!(w.points, vec!["0", "2", "1"]);
        assert_eq!(w.value("lhs"), Some(q(10)));
        assert_eq!(w.value("rhs"), Some(q(2)));
    }

    #[test]
    fn lbnd_failure() {
        let s = FiniteSpace::new(labels(2), vec![vec![q(3), q(0)], vec![q(0), q(4)]]).unwrap();
        let r = classify(&s, q(0)).unwrap();
        assert!(!r.passes(Axiom::SigmaLbnd));
        assert_eq!(r.class, Class::None);
    }

    #[test]
    fn tolerance_absorbs_rounding() {
        let s = FiniteSpace::new(
            labels(2),
            vec![vec![0.0, 1.0], vec![1.0, 1.0 + 1e-12]],
        )
        .unwrap();
        // p-lbnd at (1,0): sigma(1,1) exceeds sigma(1,0) by 1e-12.
        assert_eq!(classify(&s, 0.0).unwrap().class, Class::MMetric);
        assert_eq!(classify(&s, 1e-9).unwrap().class, Class::PartialMetric);
    }

    #[test]
    fn negative_tolerance_rejected() {
        assert!(classify(&e2a(), q(-1)).is_err());
    }

    #[test]
    fn negative_values_allowed() {
        let r = classify(&line(&[-3, -1, 0], |x, y| x + y), q(0)).unwrap();
        assert_eq!(r.class, Class::MMetric);
    }
}
