//! r-Cauchy analysis, limits and special limits of finite sequence prefixes.
//!
//! A sequence is r-Cauchy when `sigma(x_i, x_j) -> r` jointly in `i, j`. A
//! prefix can only give evidence, so verdicts are three-valued and based on a
//! tail window:
//!
//! * `r_cauchy(r)` when every `sigma(x_i, x_j)` with `i, j` in the last
//!   `window` indices lies within `tol` of their mean `r`;
//! * `not_cauchy` only on demonstrated oscillation: the pairwise values of
//!   the last `2 * window` terms fall into two to four levels separated by
//!   more than `3 * tol`, and every level recurs in each of three consecutive
//!   blocks of the tail;
//! * `inconclusive` otherwise.

use std::marker::PhantomData;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{FiniteSpace, Space};

pub const DEFAULT_WINDOW: usize = 16;

/// Oscillations with more distinct levels than this are reported as
/// inconclusive.
const MAX_LEVELS: usize = 4;

/// The first `N` terms of a sequence in a space.
pub struct SequencePrefix<'a, S: Scalar, Sp: Space<S>> {
    space: &'a Sp,
    terms: Vec<Sp::Point>,
    _scalar: PhantomData<S>,
}

impl<'a, S: Scalar, Sp: Space<S>> Clone for SequencePrefix<'a, S, Sp> {
    fn clone(&self) -> Self {
        Self {
            space: self.space,
            terms: self.terms.clone(),
            _scalar: PhantomData,
        }
    }
}

impl<'a, S: Scalar, Sp: Space<S>> SequencePrefix<'a, S, Sp> {
    pub fn new(space: &'a Sp, terms: Vec<Sp::Point>) -> Result<Self> {
        if let Some(bad) = terms.iter().find(|t| !space.contains(t)) {
            return Err(Error::OutsideDomain(format!("{bad:?}")));
        }
        Ok(Self {
            space,
            terms,
            _scalar: PhantomData,
        })
    }

    pub fn space(&self) -> &'a Sp {
        self.space
    }

    pub fn terms(&self) -> &[Sp::Point] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn sigma(&self, i: usize, j: usize) -> S {
        self.space.sigma(&self.terms[i], &self.terms[j])
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| self.space.label(t)).collect()
    }
}

impl<'a, S: Scalar> SequencePrefix<'a, S, FiniteSpace<S>> {
    pub fn from_labels(space: &'a FiniteSpace<S>, labels: &[&str]) -> Result<Self> {
        let terms = labels
            .iter()
            .map(|l| space.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, terms)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CauchyStatus<S> {
    RCauchy { r: S },
    NotCauchy,
    Inconclusive,
}

/// Largest deviations from `r` over the tail window of the self-distances and
/// of `m`, `M` over tail pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailLimits<S> {
    pub diagonal: S,
    pub m: S,
    pub big_m: S,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailDiagnostics<S> {
    /// `sigma(x_n, x_{n-1})` for `n` in the last window.
    pub consecutive: Vec<S>,
    /// `sigma(x_n, x_n)` for `n` in the last window.
    pub diagonal: Vec<S>,
    /// Spread of the window before the last one.
    pub previous_spread: S,
    /// Oscillation levels, when an oscillation was demonstrated.
    pub levels: Vec<S>,
    /// Tail limits of self-distances, `m` and `M`, checked when r-Cauchy.
    pub tail_limits: Option<TailLimits<S>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyVerdict<S> {
    pub status: CauchyStatus<S>,
    /// Largest deviation of a tail value from the tail mean.
    pub tail_spread: S,
    pub window: usize,
    pub diagnostics: TailDiagnostics<S>,
}

impl<S: Scalar> CauchyVerdict<S> {
    pub fn central_distance(&self) -> Option<S> {
        match self.status {
            CauchyStatus::RCauchy { r } => Some(r),
            _ => None,
        }
    }

    pub fn is_r_cauchy(&self) -> bool {
        self.central_distance().is_some()
    }

    pub fn is_not_cauchy(&self) -> bool {
        matches!(self.status, CauchyStatus::NotCauchy)
    }
}

fn mean_and_spread<S: Scalar>(values: &[S]) -> (S, S) {
    let count = S::from_usize(values.len()).expect("window size fits the scalar type");
    let mean = values.iter().fold(S::zero(), |a, &v| a + v) / count;
    let spread = values
        .iter()
        .fold(S::zero(), |a, &v| a.max_of((v - mean).abs()));
    (mean, spread)
}

fn block_values<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    range: std::ops::Range<usize>,
) -> Vec<S> {
    let mut out = Vec::with_capacity(range.len() * range.len());
    for i in range.clone() {
        for j in range.clone() {
            out.push(seq.sigma(i, j));
        }
    }
    out
}

/// Splits sorted values into clusters at gaps wider than `3 * tol`. Returns
/// `None` if any cluster is wider than `2 * tol`.
fn levels<S: Scalar>(values: &[S], tol: S) -> Option<Vec<(S, S)>> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
    let gap = tol + tol + tol;
    let mut clusters: Vec<(S, S)> = Vec::new();
    for v in sorted {
        match clusters.last_mut() {
            Some((_, hi)) if v - *hi <= gap => *hi = v,
            _ => clusters.push((v, v)),
        }
    }
    if clusters.iter().all(|(lo, hi)| *hi - *lo <= tol + tol) {
        Some(clusters)
    } else {
        None
    }
}

/// Looks for a persistent oscillation between a few levels across the blocks.
fn oscillation_levels<S: Scalar>(blocks: &[Vec<S>], tol: S) -> Option<Vec<S>> {
    let all: Vec<S> = blocks.iter().flatten().copied().collect();
    let clusters = levels(&all, tol)?;
    if !(2..=MAX_LEVELS).contains(&clusters.len()) {
        return None;
    }
    let recurring = clusters.iter().all(|(lo, hi)| {
        blocks
            .iter()
            .all(|b| b.iter().any(|v| *v >= *lo && *v <= *hi))
    });
    recurring.then(|| clusters.iter().map(|(lo, hi)| (*lo + *hi) / S::two()).collect())
}

/// Three-valued r-Cauchy verdict on the tail of a prefix.
///
/// Needs at least `2 * window` terms.
pub fn cauchy_analyze<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    window: usize,
    tol: S,
) -> Result<CauchyVerdict<S>> {
    let n = seq.len();
    if window == 0 || n < 2 * window {
        return Err(Error::PrefixTooShort {
            len: n,
            window,
            needed: 2 * window.max(1),
        });
    }
    let last = (n - window)..n;
    let previous = (n - 2 * window)..(n - window);

    let tail = block_values(seq, last.clone());
    let (r, spread) = mean_and_spread(&tail);
    let (_, previous_spread) = mean_and_spread(&block_values(seq, previous.clone()));

    let mut diagnostics = TailDiagnostics {
        consecutive: last.clone().map(|i| seq.sigma(i, i - 1)).collect(),
        diagonal: last.clone().map(|i| seq.sigma(i, i)).collect(),
        previous_spread,
        levels: Vec::new(),
        tail_limits: None,
    };

    if spread <= tol {
        let sp = seq.space;
        let t = &seq.terms;
        let mut lim = TailLimits {
            diagonal: S::zero(),
            m: S::zero(),
            big_m: S::zero(),
            holds: true,
        };
        for i in last.clone() {
            lim.diagonal = lim.diagonal.max_of((seq.sigma(i, i) - r).abs());
            for j in last.clone() {
                lim.m = lim.m.max_of((sp.m(&t[i], &t[j]) - r).abs());
                lim.big_m = lim.big_m.max_of((sp.big_m(&t[i], &t[j]) - r).abs());
            }
        }
        lim.holds = lim.diagonal <= tol && lim.m <= tol && lim.big_m <= tol;
        diagnostics.tail_limits = Some(lim);
        return Ok(CauchyVerdict {
            status: CauchyStatus::RCauchy { r },
            tail_spread: spread,
            window,
            diagnostics,
        });
    }

    let blocks = if window >= 2 {
        let mid = last.start + window / 2;
        vec![
            block_values(seq, previous),
            block_values(seq, last.start..mid),
            block_values(seq, mid..last.end),
        ]
    } else {
        vec![block_values(seq, previous), tail]
    };
    let status = match oscillation_levels(&blocks, tol) {
        Some(lv) => {
            diagnostics.levels = lv;
            CauchyStatus::NotCauchy
        }
        None => CauchyStatus::Inconclusive,
    };
    Ok(CauchyVerdict {
        status,
        tail_spread: spread,
        window,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitVerdict<S> {
    pub is_limit: bool,
    pub is_special_limit: bool,
    /// Largest tail deviation of `sigma(a,x_i) + sigma(x_i,x_i) - m(a,x_i)`
    /// from `sigma(a,a)`.
    pub residual: S,
    pub self_distance: S,
    pub central_distance: S,
}

fn tail_range(len: usize, window: usize) -> std::ops::Range<usize> {
    len.saturating_sub(window)..len
}

/// Tests `a` as a limit (and as a special limit) of an r-Cauchy prefix.
pub fn is_limit<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    verdict: &CauchyVerdict<S>,
    a: &Sp::Point,
    tol: S,
) -> Result<LimitVerdict<S>> {
    let r = verdict
        .central_distance()
        .ok_or_else(|| Error::NotRCauchy(format!("status {:?}", verdict.status)))?;
    let sp = seq.space;
    if !sp.contains(a) {
        return Err(Error::UnknownPoint(format!("{a:?}")));
    }
    let saa = sp.sigma(a, a);
    let residual = tail_range(seq.len(), verdict.window)
        .map(|i| {
            let x = &seq.terms[i];
            (sp.sigma(a, x) + sp.sigma(x, x) - sp.m(a, x) - saa).abs()
        })
        .fold(S::zero(), |acc, v| acc.max_of(v));
    let is_limit = residual <= tol;
    Ok(LimitVerdict {
        is_limit,
        is_special_limit: is_limit && (saa - r).abs() <= tol,
        residual,
        self_distance: saa,
        central_distance: r,
    })
}

/// Every candidate point (all points of a finite space) that passes the
/// special-limit test.
pub fn special_limits<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    verdict: &CauchyVerdict<S>,
    tol: S,
) -> Result<Vec<Sp::Point>> {
    let mut found = Vec::new();
    for c in seq.space.limit_candidates(&seq.terms) {
        if is_limit(seq, verdict, &c, tol)?.is_special_limit {
            found.push(c);
        }
    }
    Ok(found)
}

fn require_special<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    verdict: &CauchyVerdict<S>,
    a: &Sp::Point,
    tol: S,
) -> Result<()> {
    if is_limit(seq, verdict, a, tol)?.is_special_limit {
        Ok(())
    } else {
        Err(Error::NotSpecialLimit(seq.space.label(a)))
    }
}

/// Two verified special limits must coincide. Returns `true` when they do;
/// distinct points that both pass are reported as a tolerance problem rather
/// than `false`.
pub fn special_limit_unique<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    verdict: &CauchyVerdict<S>,
    a: &Sp::Point,
    b: &Sp::Point,
    tol: S,
) -> Result<bool> {
    require_special(seq, verdict, a, tol)?;
    require_special(seq, verdict, b, tol)?;
    if seq.space.same_point(a, b, tol) {
        Ok(true)
    } else {
        Err(Error::AmbiguousSpecialLimit(
            seq.space.label(a),
            seq.space.label(b),
        ))
    }
}

/// Tail deviations of `M(a,x_i)`, `m(a,x_i)` and `sigma(a,x_i)` from
/// `sigma(a,a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialLimitConsequences<S> {
    pub big_m: S,
    pub m: S,
    pub sigma: S,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitTransfer<S> {
    /// Mean over the tail window of `sigma(y,x_i) - m(y,x_i)`.
    pub tail: S,
    /// `sigma(y,a) - m(y,a)`.
    pub at_limit: S,
    /// Largest tail deviation of `sigma(y,x_i) - m(y,x_i)` from `at_limit`.
    pub deviation: S,
    pub consistent: bool,
    pub special_limit: SpecialLimitConsequences<S>,
}

impl<S: Scalar> LimitTransfer<S> {
    pub fn pair(&self) -> (S, S) {
        (self.tail, self.at_limit)
    }
}

/// Compares the tail of `sigma(y,x_i) - m(y,x_i)` with its value at the
/// special limit `a`, and checks that `M(a,x_i)`, `m(a,x_i)` and
/// `sigma(a,x_i)` all tend to `sigma(a,a)`.
pub fn limit_transfer<S: Scalar, Sp: Space<S>>(
    seq: &SequencePrefix<'_, S, Sp>,
    verdict: &CauchyVerdict<S>,
    a: &Sp::Point,
    y: &Sp::Point,
    tol: S,
) -> Result<LimitTransfer<S>> {
    require_special(seq, verdict, a, tol)?;
    let sp = seq.space;
    if !sp.contains(y) {
        return Err(Error::UnknownPoint(format!("{y:?}")));
    }
    let at_limit = sp.sigma(y, a) - sp.m(y, a);
    let saa = sp.sigma(a, a);
    let tail_idx = tail_range(seq.len(), verdict.window);

    let values: Vec<S> = tail_idx
        .clone()
        .map(|i| {
            let x = &seq.terms[i];
            sp.sigma(y, x) - sp.m(y, x)
        })
        .collect();
    let (tail, _) = mean_and_spread(&values);
    let deviation = values
        .iter()
        .fold(S::zero(), |acc, v| acc.max_of((*v - at_limit).abs()));

    let mut cons = SpecialLimitConsequences {
        big_m: S::zero(),
        m: S::zero(),
        sigma: S::zero(),
        holds: true,
    };
    for i in tail_idx {
        let x = &seq.terms[i];
        cons.big_m = cons.big_m.max_of((sp.big_m(a, x) - saa).abs());
        cons.m = cons.m.max_of((sp.m(a, x) - saa).abs());
        cons.sigma = cons.sigma.max_of((sp.sigma(a, x) - saa).abs());
    }
    cons.holds = cons.big_m <= tol && cons.m <= tol && cons.sigma <= tol;

    Ok(LimitTransfer {
        tail,
        at_limit,
        deviation,
        consistent: deviation <= tol,
        special_limit: cons,
    })
}
