//! Fixed-point solver and the Banach and Kannan front-ends.
//!
//! [`solve`] iterates `f` from `x0`, analyses the orbit, locates its special
//! limit `a` and accepts `a` only if one of three hypothesis pairs holds and
//! `sigma(a,a) = sigma(a,f a) = sigma(f a,f a)` is verified numerically:
//!
//! 1. weak orbital continuity and non-expansiveness;
//! 2. weak orbital continuity and `sigma >= sigma(f a, f a)`;
//! 3. non-expansiveness and `sigma >= sigma(a, a)`.
//!
//! When nothing verifies, the result carries `branch = none` and no point.
//! Uniqueness is only claimed by [`banach`] and [`kannan`].

use serde::Serialize;

use crate::contraction::{
    check_bounded_below, check_c_r, check_nonexpansive, check_phi_r, weak_orbital_continuity,
    ContinuityReport, ContractionCertificate, LimitImageChain, MapSystem, NonexpansiveReport, Phi,
    DEFAULT_DEPTH, DEFAULT_PAIR_SAMPLES,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sequences::{cauchy_analyze, special_limits, CauchyVerdict, SequencePrefix, DEFAULT_WINDOW};
use crate::space::Space;

pub const DEFAULT_MAX_ITER: usize = 10_000;

/// Number of starting points for the uniqueness scan on functional spaces.
pub const MULTI_START: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    WocAndNonexpansive,
    WocAndBoundedByFfa,
    NonexpansiveAndBoundedByAa,
    None,
}

impl Branch {
    pub const ORDER: [Branch; 3] = [
        Branch::WocAndNonexpansive,
        Branch::WocAndBoundedByFfa,
        Branch::NonexpansiveAndBoundedByAa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::WocAndNonexpansive => "woc_and_nonexpansive",
            Branch::WocAndBoundedByFfa => "woc_and_bounded_by_ffa",
            Branch::NonexpansiveAndBoundedByAa => "nonexpansive_and_bounded_by_aa",
            Branch::None => "none",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Branch::ORDER
            .into_iter()
            .chain([Branch::None])
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown branch `{s}`")))
    }
}

/// Orbit prefix, its Cauchy verdict and the special limit, if one was found.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "S: Serialize"))]
pub struct OrbitReport<S, P> {
    #[serde(skip)]
    pub terms: Vec<P>,
    pub labels: Vec<String>,
    pub cauchy: CauchyVerdict<S>,
    #[serde(skip)]
    pub special_limit: Option<P>,
    #[serde(rename = "special_limit")]
    pub special_limit_label: Option<String>,
    /// The last term satisfied `f(x) = x` exactly.
    pub reached_exact_fixed_point: bool,
    /// Iteration stopped early because the tail spread kept growing.
    pub diverged: bool,
}

impl<S: Scalar, P: Clone + PartialEq + std::fmt::Debug> OrbitReport<S, P> {
    pub fn prefix<'a, Sp: Space<S, Point = P>>(&self, space: &'a Sp) -> Result<SequencePrefix<'a, S, Sp>> {
        SequencePrefix::new(space, self.terms.clone())
    }
}

fn build_report<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    terms: Vec<Sp::Point>,
    window: usize,
    tol: S,
    diverged: bool,
) -> Result<OrbitReport<S, Sp::Point>> {
    let sp = sys.space();
    let window = window.min(terms.len() / 2).max(1);
    let prefix = SequencePrefix::new(sp, terms)?;
    let cauchy = cauchy_analyze(&prefix, window, tol)?;
    let special_limit = if cauchy.is_r_cauchy() {
        let mut found = special_limits(&prefix, &cauchy, tol)?;
        if found.len() > 1 {
            return Err(Error::AmbiguousSpecialLimit(sp.label(&found[0]), sp.label(&found[1])));
        }
        found.pop()
    } else {
        None
    };
    let last = prefix.terms().last().expect("nonempty orbit").clone();
    Ok(OrbitReport {
        labels: prefix.labels(),
        reached_exact_fixed_point: sys.apply(&last) == last,
        terms: prefix.terms().to_vec(),
        special_limit_label: special_limit.as_ref().map(|a| sp.label(a)),
        special_limit,
        cauchy,
        diverged,
    })
}

/// Fixed-length orbit `x0 .. f^(len-1)(x0)`, analysed with the given window.
pub fn analyze_orbit<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    len: usize,
    window: usize,
    tol: S,
) -> Result<OrbitReport<S, Sp::Point>> {
    if len < 2 {
        return Err(Error::OutOfRange {
            name: "orbit length",
            value: len.to_string(),
            range: "[2, inf)",
        });
    }
    build_report(sys, sys.orbit(len)?, window, tol, false)
}

fn block_spread<S: Scalar, Sp: Space<S>>(sp: &Sp, block: &[Sp::Point]) -> S {
    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    for x in block {
        for y in block {
            let v = sp.sigma(x, y);
            lo = Some(lo.map_or(v, |l| l.min_of(v)));
            hi = Some(hi.map_or(v, |h| h.max_of(v)));
        }
    }
    hi.unwrap_or_else(S::zero) - lo.unwrap_or_else(S::zero)
}

/// Iterates at least `2 * window` terms and then until `f(x) = x` exactly or
/// `max_iter` applications of `f`. Stops early when the spread of the last
/// window more than doubles at two consecutive doubling checkpoints.
fn iterate<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    max_iter: usize,
    window: usize,
    tol: S,
) -> Result<(Vec<Sp::Point>, bool)> {
    let sp = sys.space();
    let mut terms = vec![sys.x0().clone()];
    let mut next_checkpoint = 4 * window;
    let mut last_spread: Option<S> = None;
    let mut growth_streak = 0;
    loop {
        let x = terms.last().expect("nonempty").clone();
        let fx = sys.apply(&x);
        if terms.len() >= 2 * window && fx == x {
            return Ok((terms, false));
        }
        if terms.len() > max_iter {
            return Ok((terms, false));
        }
        if !sp.contains(&fx) {
            return Err(Error::OutsideDomain(format!("f^{}(x0) = {fx:?}", terms.len())));
        }
        terms.push(fx);

        if terms.len() == next_checkpoint {
            next_checkpoint *= 2;
            let spread = block_spread(sp, &terms[terms.len() - window..]);
            if let Some(prev) = last_spread {
                if spread > prev + prev + tol {
                    growth_streak += 1;
                } else {
                    growth_streak = 0;
                }
            }
            last_spread = Some(spread);
            if growth_streak >= 2 {
                return Ok((terms, true));
            }
        }
    }
}

/// Evaluated hypotheses at the special limit `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchHypotheses<S> {
    pub weak_orbital_continuity: ContinuityReport<S>,
    pub nonexpansive: NonexpansiveReport<S>,
    pub bounded_below_by_sigma_fafa: bool,
    pub bounded_below_by_sigma_aa: bool,
    pub chain: LimitImageChain<S>,
}

impl<S: Scalar> BranchHypotheses<S> {
    pub fn holds(&self, branch: Branch) -> bool {
        let woc = self.weak_orbital_continuity.holds;
        let ne = self.nonexpansive.holds;
        match branch {
            Branch::WocAndNonexpansive => woc && ne,
            Branch::WocAndBoundedByFfa => woc && self.bounded_below_by_sigma_fafa,
            Branch::NonexpansiveAndBoundedByAa => ne && self.bounded_below_by_sigma_aa,
            Branch::None => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    /// `exhaustive` on finite spaces, `multi_start` on functional ones.
    pub method: &'static str,
    pub starts: usize,
    /// Distinct fixed points found.
    pub fixed_points: Vec<String>,
    pub unique: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "S: Serialize"))]
pub struct FixedPointResult<S, P> {
    #[serde(skip)]
    pub point: Option<P>,
    #[serde(rename = "point")]
    pub point_label: Option<String>,
    pub branch: Branch,
    /// `|sigma(a,a) - sigma(a,f a)| + |sigma(a,f a) - sigma(f a,f a)|`.
    pub residual: Option<S>,
    pub orbit: OrbitReport<S, P>,
    pub hypotheses: Option<BranchHypotheses<S>>,
    pub certificate: Option<ContractionCertificate<S>>,
    pub uniqueness: Option<UniquenessReport>,
    pub failure: Option<String>,
}

impl<S: Scalar, P> FixedPointResult<S, P> {
    pub fn is_verified(&self) -> bool {
        self.branch != Branch::None
    }

    fn failed(orbit: OrbitReport<S, P>, hypotheses: Option<BranchHypotheses<S>>, residual: Option<S>, why: String) -> Self {
        Self {
            point: None,
            point_label: None,
            branch: Branch::None,
            residual,
            orbit,
            hypotheses,
            certificate: None,
            uniqueness: None,
            failure: Some(why),
        }
    }
}

/// Iterates, analyses the orbit and tries the three branches, `branch_hint`
/// first.
pub fn solve<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    max_iter: usize,
    tol: S,
    branch_hint: Option<Branch>,
) -> Result<FixedPointResult<S, Sp::Point>> {
    if max_iter < 2 {
        return Err(Error::OutOfRange {
            name: "max_iter",
            value: max_iter.to_string(),
            range: "[2, inf)",
        });
    }
    let window = DEFAULT_WINDOW.min(max_iter.div_ceil(2));
    let (terms, diverged) = iterate(sys, max_iter, window, tol)?;
    let orbit = build_report(sys, terms, window, tol, diverged)?;

    if !orbit.cauchy.is_r_cauchy() {
        let why = format!(
            "orbit not r-Cauchy ({})",
            match orbit.cauchy.status {
                crate::sequences::CauchyStatus::NotCauchy => "oscillation detected",
                _ if diverged => "spread keeps growing",
                _ => "inconclusive",
            }
        );
        return Ok(FixedPointResult::failed(orbit, None, None, why));
    }
    let Some(a) = orbit.special_limit.clone() else {
        return Ok(FixedPointResult::failed(orbit, None, None, "no special limit found".into()));
    };

    let sp = sys.space();
    let fa = sys.apply(&a);
    let (saa, safa, sfafa) = (sp.sigma(&a, &a), sp.sigma(&a, &fa), sp.sigma(&fa, &fa));
    let hyp = BranchHypotheses {
        weak_orbital_continuity: weak_orbital_continuity(sys, &orbit, tol)?,
        nonexpansive: check_nonexpansive(sys, DEFAULT_PAIR_SAMPLES, tol),
        bounded_below_by_sigma_fafa: check_bounded_below(sp, Some(sfafa - tol)).unwrap_or(false),
        bounded_below_by_sigma_aa: check_bounded_below(sp, Some(saa - tol)).unwrap_or(false),
        chain: LimitImageChain::new(saa, safa, sfafa, tol),
    };

    let branch = branch_hint
        .into_iter()
        .chain(Branch::ORDER)
        .find(|b| hyp.holds(*b));
    let residual = (saa - safa).abs() + (safa - sfafa).abs();
    let Some(branch) = branch else {
        return Ok(FixedPointResult::failed(
            orbit,
            Some(hyp),
            Some(residual),
            "no branch hypothesis verified".into(),
        ));
    };
    if residual > tol || !sp.same_point(&fa, &a, tol) {
        return Ok(FixedPointResult::failed(
            orbit,
            Some(hyp),
            Some(residual),
            format!("branch {branch} holds but f(a) = a was not verified (residual {residual})"),
        ));
    }
    Ok(FixedPointResult {
        point_label: Some(sp.label(&a)),
        point: Some(a),
        branch,
        residual: Some(residual),
        orbit,
        hypotheses: Some(hyp),
        certificate: None,
        uniqueness: None,
        failure: None,
    })
}

fn require_complete<S: Scalar, Sp: Space<S>>(sp: &Sp) -> Result<()> {
    if sp.is_exhaustive() || sp.declared_complete() {
        Ok(())
    } else {
        Err(Error::NotComplete(sp.describe()))
    }
}

fn precondition<S: Scalar>(condition: &'static str, x: String, y: String, lhs: S, rhs: S) -> Error {
    Error::Precondition {
        condition,
        x,
        y,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

fn require_nonnegative<S: Scalar, Sp: Space<S>>(sp: &Sp, pts: &[Sp::Point], tol: S) -> Result<()> {
    for x in pts {
        for y in pts {
            let v = sp.sigma(x, y);
            if v < -tol {
                return Err(precondition("0 <= sigma(x, y)", sp.label(x), sp.label(y), S::zero(), v));
            }
        }
    }
    Ok(())
}

fn orbit_term_label<S: Scalar, Sp: Space<S>>(sys: &MapSystem<S, Sp>, i: usize) -> String {
    match sys.orbit(i + 1) {
        Ok(t) => format!("x_{i} = {}", sys.space().label(&t[i])),
        Err(_) => format!("x_{i}"),
    }
}

/// Checks every fixed point found against `a`: `sigma(a,a) = sigma(b,b) =
/// sigma(a,b) = 0` forces `b = a`.
fn uniqueness_scan<S: Scalar, Sp: Space<S> + Clone>(
    sys: &MapSystem<S, Sp>,
    a: &Sp::Point,
    max_iter: usize,
    tol: S,
) -> Result<UniquenessReport> {
    let sp = sys.space();
    let zero_with_a = |b: &Sp::Point| {
        sp.sigma(a, a).abs() <= tol && sp.sigma(b, b).abs() <= tol && sp.sigma(a, b).abs() <= tol
    };
    if sp.is_exhaustive() {
        let fixed: Vec<Sp::Point> = sp
            .sample_points(0)
            .into_iter()
            .filter(|p| sys.apply(p) == *p)
            .collect();
        let unique = fixed.len() == 1 && fixed.iter().all(|b| zero_with_a(b) && b == a);
        return Ok(UniquenessReport {
            method: "exhaustive",
            starts: sp.sample_points(0).len(),
            fixed_points: fixed.iter().map(|b| sp.label(b)).collect(),
            unique,
        });
    }
    let starts = sp.sample_points(MULTI_START);
    let mut found: Vec<Sp::Point> = Vec::new();
    let mut agree = true;
    for s in &starts {
        let (terms, _) = iterate(&sys.with_x0(s.clone())?, max_iter, DEFAULT_WINDOW, tol)?;
        let b = terms.last().expect("nonempty").clone();
        let is_fixed = sp.same_point(&sys.apply(&b), &b, tol);
        agree &= is_fixed && zero_with_a(&b) && sp.same_point(a, &b, tol);
        if is_fixed && !found.iter().any(|p| sp.same_point(p, &b, tol)) {
            found.push(b);
        }
    }
    Ok(UniquenessReport {
        method: "multi_start",
        starts: starts.len(),
        fixed_points: found.iter().map(|b| sp.label(b)).collect(),
        unique: agree && found.len() == 1,
    })
}

fn check_k<S: Scalar>(k: S, hi: S, range: &'static str) -> Result<()> {
    if k < S::zero() || k >= hi {
        return Err(Error::OutOfRange {
            name: "k",
            value: k.to_string(),
            range,
        });
    }
    Ok(())
}

/// Banach contractions, `0 <= sigma(f x, f y) <= k sigma(x, y)`.
///
/// Spot-checks the condition, certifies the orbit as a phi_r-contraction with
/// `phi(t) = (1 - k) t` and `r = 0`, solves, and scans for other fixed points.
pub fn banach<S: Scalar, Sp: Space<S> + Clone>(
    sys: &MapSystem<S, Sp>,
    k: S,
    max_iter: usize,
    tol: S,
) -> Result<FixedPointResult<S, Sp::Point>> {
    check_k(k, S::one(), "[0, 1)")?;
    let sp = sys.space();
    require_complete(sp)?;
    let pts = sp.sample_points(DEFAULT_PAIR_SAMPLES);
    require_nonnegative(sp, &pts, tol)?;
    for x in &pts {
        for y in &pts {
            let lhs = sp.sigma(&sys.apply(x), &sys.apply(y));
            let rhs = k * sp.sigma(x, y);
            if lhs < -tol || lhs > rhs + tol {
                return Err(precondition(
                    "0 <= sigma(f x, f y) <= k sigma(x, y)",
                    sp.label(x),
                    sp.label(y),
                    lhs,
                    rhs,
                ));
            }
        }
    }
    let cert = check_phi_r(sys, &Phi::banach(k), S::zero(), DEFAULT_DEPTH, tol)?;
    if let Some(v) = cert.violations.first() {
        return Err(precondition(
            "sigma(f x, f y) <= k sigma(x, y) on the orbit",
            orbit_term_label(sys, v.i - 1),
            orbit_term_label(sys, v.j - 1),
            v.lhs,
            v.rhs,
        ));
    }
    let mut result = solve(sys, max_iter, tol, Some(Branch::WocAndNonexpansive))?;
    result.certificate = Some(cert);
    if let Some(a) = result.point.clone() {
        result.uniqueness = Some(uniqueness_scan(sys, &a, max_iter, tol)?);
    }
    Ok(result)
}

/// Kannan maps, `sigma(f x, f y) <= k [sigma(x, f x) + sigma(y, f y)]` with
/// `0 <= k < 1/2`.
///
/// The largest sampled violation is reported. The orbit is certified as a
/// c_r-contraction with `c = 2k` (`1/2` when `k = 0`) and `r = 0`.
pub fn kannan<S: Scalar, Sp: Space<S> + Clone>(
    sys: &MapSystem<S, Sp>,
    k: S,
    max_iter: usize,
    tol: S,
) -> Result<FixedPointResult<S, Sp::Point>> {
    let half = S::one() / S::two();
    check_k(k, half, "[0, 1/2)")?;
    let sp = sys.space();
    require_complete(sp)?;
    let pts = sp.sample_points(DEFAULT_PAIR_SAMPLES);
    require_nonnegative(sp, &pts, tol)?;
    let images: Vec<_> = pts.iter().map(|p| sys.apply(p)).collect();
    let mut worst: Option<(usize, usize, S, S)> = None;
    for (i, (x, fx)) in pts.iter().zip(&images).enumerate() {
        for (j, (y, fy)) in pts.iter().zip(&images).enumerate() {
            let lhs = sp.sigma(fx, fy);
            let rhs = k * (sp.sigma(x, fx) + sp.sigma(y, fy));
            let excess = lhs - rhs;
            if excess > tol && worst.is_none_or(|(_, _, l, r)| excess > l - r) {
                worst = Some((i, j, lhs, rhs));
            }
        }
    }
    if let Some((i, j, lhs, rhs)) = worst {
        return Err(precondition(
            "sigma(f x, f y) <= k [sigma(x, f x) + sigma(y, f y)]",
            sp.label(&pts[i]),
            sp.label(&pts[j]),
            lhs,
            rhs,
        ));
    }
    let c = if k > S::zero() { k + k } else { half };
    let cert = check_c_r(sys, c, S::zero(), DEFAULT_DEPTH, tol)?;
    if let Some(v) = cert.violations.first() {
        return Err(precondition(
            "c_r-contraction with c = 2k on the orbit",
            orbit_term_label(sys, v.i),
            orbit_term_label(sys, v.j),
            v.lhs,
            v.rhs,
        ));
    }
    let mut result = solve(sys, max_iter, tol, Some(Branch::WocAndBoundedByFfa))?;
    result.certificate = Some(cert);
    if let Some(a) = result.point.clone() {
        result.uniqueness = Some(uniqueness_scan(sys, &a, max_iter, tol)?);
    }
    Ok(result)
}
