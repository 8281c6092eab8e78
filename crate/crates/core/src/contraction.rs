//! Map systems and the orbit-level hypotheses used by the fixed-point solver.
//!
//! Certificates are finite: they attest the defining inequalities up to a
//! stated depth, never for all indices. Non-expansiveness is exhaustive on
//! finite spaces and sampled (low-discrepancy, deterministic) on functional
//! ones.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixedpoint::{analyze_orbit, OrbitReport};
use crate::scalar::{powi, Scalar};
use crate::sequences::{is_limit, LimitVerdict, DEFAULT_WINDOW};
use crate::space::Space;

pub const DEFAULT_DEPTH: usize = 64;

/// Points per axis when sampling pairs on a functional space (64 * 64 = 4096
/// pairs).
pub const DEFAULT_PAIR_SAMPLES: usize = 64;

const PHI_GRID: usize = 256;

pub type MapFn<P> = Arc<dyn Fn(&P) -> P + Send + Sync>;

/// A space, a self-map and a base point.
pub struct MapSystem<S: Scalar, Sp: Space<S>> {
    name: String,
    space: Sp,
    f: MapFn<Sp::Point>,
    x0: Sp::Point,
    _scalar: std::marker::PhantomData<S>,
}

impl<S: Scalar, Sp: Space<S> + Clone> Clone for MapSystem<S, Sp> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            space: self.space.clone(),
            f: Arc::clone(&self.f),
            x0: self.x0.clone(),
            _scalar: std::marker::PhantomData,
        }
    }
}

impl<S: Scalar, Sp: Space<S>> fmt::Debug for MapSystem<S, Sp> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapSystem")
            .field("name", &self.name)
            .field("x0", &self.x0)
            .finish_non_exhaustive()
    }
}

impl<S: Scalar, Sp: Space<S>> MapSystem<S, Sp> {
    /// Checks that `x0` and the image of every sampled point lie in the space.
    pub fn new(
        name: impl Into<String>,
        space: Sp,
        f: impl Fn(&Sp::Point) -> Sp::Point + Send + Sync + 'static,
        x0: Sp::Point,
    ) -> Result<Self> {
        let sys = Self {
            name: name.into(),
            space,
            f: Arc::new(f),
            x0,
            _scalar: std::marker::PhantomData,
        };
        if !sys.space.contains(&sys.x0) {
            return Err(Error::OutsideDomain(format!("x0 = {:?}", sys.x0)));
        }
        for x in sys.space.sample_points(DEFAULT_PAIR_SAMPLES) {
            let fx = sys.apply(&x);
            if !sys.space.contains(&fx) {
                return Err(Error::OutsideDomain(format!(
                    "f({}) = {fx:?}",
                    sys.space.label(&x)
                )));
            }
        }
        Ok(sys)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Sp {
        &self.space
    }

    pub fn x0(&self) -> &Sp::Point {
        &self.x0
    }

    pub fn apply(&self, x: &Sp::Point) -> Sp::Point {
        (self.f)(x)
    }

    /// `x0, f(x0), ..., f^(len-1)(x0)`.
    pub fn orbit(&self, len: usize) -> Result<Vec<Sp::Point>> {
        let mut terms = Vec::with_capacity(len);
        if len == 0 {
            return Ok(terms);
        }
        terms.push(self.x0.clone());
        while terms.len() < len {
            let next = self.apply(terms.last().expect("nonempty"));
            if !self.space.contains(&next) {
                return Err(Error::OutsideDomain(format!(
                    "f^{}(x0) = {next:?}",
                    terms.len()
                )));
            }
            terms.push(next);
        }
        Ok(terms)
    }
}

impl<S: Scalar, Sp: Space<S> + Clone> MapSystem<S, Sp> {
    /// Same map and space, new base point.
    pub fn with_x0(&self, x0: Sp::Point) -> Result<Self> {
        if !self.space.contains(&x0) {
            return Err(Error::OutsideDomain(format!("x0 = {x0:?}")));
        }
        Ok(Self {
            name: self.name.clone(),
            space: self.space.clone(),
            f: Arc::clone(&self.f),
            x0,
            _scalar: std::marker::PhantomData,
        })
    }
}

/// A named modulus function from a small registry.
///
/// `Linear` and `Power` are measured from `r`: `slope * (t - r)` and
/// `scale * (t - r)^exponent`. `Table` knots are absolute `(t, phi(t))`
/// pairs, interpolated linearly and held constant outside the knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phi<S> {
    Linear { slope: S },
    Power { scale: S, exponent: u32 },
    Table { knots: Vec<(S, S)> },
}

impl<S: Scalar> Phi<S> {
    /// `(1 - k) t`, the modulus of a Banach contraction with constant `k`.
    pub fn banach(k: S) -> Self {
        Phi::Linear { slope: S::one() - k }
    }

    pub fn name(&self) -> String {
        match self {
            Phi::Linear { slope } => format!("linear({slope})"),
            Phi::Power { scale, exponent } => format!("power({scale}, {exponent})"),
            Phi::Table { knots } => format!("table({} knots)", knots.len()),
        }
    }

    /// `phi(t)` with `t` clamped to `[r, inf)`.
    pub fn eval(&self, t: S, r: S) -> S {
        let t = t.max_of(r);
        match self {
            Phi::Linear { slope } => *slope * (t - r),
            Phi::Power { scale, exponent } => *scale * powi(t - r, *exponent as usize),
            Phi::Table { knots } => interpolate(knots, t),
        }
    }

    /// Spot-checks the modulus contract on a 256-point grid over `[r, upper]`:
    /// `phi(r) = 0`, `phi > 0` past `r`, and `phi` non-decreasing.
    pub fn validate(&self, r: S, upper: S, tol: S) -> Result<()> {
        if let Phi::Table { knots } = self {
            if knots.is_empty() {
                return Err(Error::PhiContract("table has no knots".into()));
            }
            if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::PhiContract("table knots must be strictly increasing in t".into()));
            }
        }
        let upper = if upper > r { upper } else { r + S::one() };
        let at_r = self.eval(r, r);
        if at_r.abs() > tol {
            return Err(Error::PhiContract(format!("{}: phi(r) = {at_r}, expected 0", self.name())));
        }
        let steps = S::from_usize(PHI_GRID - 1).expect("grid size fits the scalar type");
        let mut prev = at_r;
        for k in 1..PHI_GRID {
            let t = r + (upper - r) * S::from_usize(k).expect("grid index") / steps;
            let v = self.eval(t, r);
            if v <= S::zero() {
                return Err(Error::PhiContract(format!("{}: phi({t}) = {v} is not positive", self.name())));
            }
            if v < prev - tol {
                return Err(Error::PhiContract(format!("{}: decreases before t = {t}", self.name())));
            }
            prev = v;
        }
        Ok(())
    }
}

fn interpolate<S: Scalar>(knots: &[(S, S)], t: S) -> S {
    let (first, last) = (knots[0], knots[knots.len() - 1]);
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let w = knots
        .windows(2)
        .find(|w| t <= w[1].0)
        .expect("t lies inside the knot range");
    let ((t0, v0), (t1, v1)) = (w[0], w[1]);
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateKind<S> {
    CR { c: S, r: S },
    PhiR { r: S, phi: String },
    None,
}

/// A failed inequality `lhs <= rhs` at orbit indices `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation<S> {
    pub i: usize,
    pub j: usize,
    pub lhs: S,
    pub rhs: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionCertificate<S> {
    /// `None` exactly when `violations` is nonempty.
    pub kind: CertificateKind<S>,
    /// What was checked, whether or not it held.
    pub attempted: CertificateKind<S>,
    pub checked_depth: usize,
    pub violations: Vec<Violation<S>>,
}

impl<S: Scalar> ContractionCertificate<S> {
    fn finish(attempted: CertificateKind<S>, checked_depth: usize, violations: Vec<Violation<S>>) -> Self {
        let kind = if violations.is_empty() {
            attempted.clone()
        } else {
            CertificateKind::None
        };
        Self {
            kind,
            attempted,
            checked_depth,
            violations,
        }
    }

    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

fn push_if_violated<S: Scalar>(out: &mut Vec<Violation<S>>, i: usize, j: usize, lhs: S, rhs: S, tol: S) {
    if lhs > rhs + tol {
        out.push(Violation { i, j, lhs, rhs });
    }
}

/// `r + c^i base`. Exact types fall back to `f64` once `c^i base` no longer
/// fits.
struct Envelope<S> {
    c: S,
    r: S,
    base: S,
}

impl<S: Scalar> Envelope<S> {
    fn new(c: S, r: S, base: S) -> Self {
        Self { c, r, base }
    }

    fn exact(&self, i: usize) -> Option<S> {
        let mut term = self.base;
        for _ in 0..i {
            term = term.checked_product(self.c)?;
        }
        self.r.checked_total(term)
    }

    fn approx(&self, i: usize) -> f64 {
        self.r.to_f64_lossy() + self.c.to_f64_lossy().powi(i as i32) * self.base.to_f64_lossy()
    }

    fn bound(&self, i: usize) -> S {
        self.exact(i).unwrap_or_else(|| S::from_f64(self.approx(i)).unwrap_or(self.r))
    }

    fn exceeded(&self, lhs: S, i: usize, tol: S) -> bool {
        match self.exact(i).and_then(|b| b.checked_total(tol)) {
            Some(b) => lhs > b,
            None => lhs.to_f64_lossy() > self.approx(i) + tol.to_f64_lossy(),
        }
    }
}

/// Orbital c_r-contraction at `x0`, checked for `i = 0..=depth`:
///
/// ```text
/// r <= sigma(x_{i+1}, x_{i+1}) <= r + c^i |sigma(x_1, x_0)|
/// sigma(x_{i+2}, x_{i+1})      <= r + c^(i+1) |sigma(x_1, x_0)|
/// ```
///
/// Only consecutive pairs are constrained.
pub fn check_c_r<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    c: S,
    r: S,
    depth: usize,
    tol: S,
) -> Result<ContractionCertificate<S>> {
    if !(c > S::zero() && c < S::one()) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c.to_string(),
            range: "(0, 1)",
        });
    }
    if depth < 2 {
        return Err(Error::OutOfRange {
            name: "depth",
            value: depth.to_string(),
            range: "[2, inf)",
        });
    }
    let x = sys.orbit(depth + 3)?;
    let sp = sys.space();
    let base = sp.sigma(&x[1], &x[0]).abs();
    let envelope = Envelope::new(c, r, base);
    let mut violations = Vec::new();
    for i in 0..=depth {
        let diag = sp.sigma(&x[i + 1], &x[i + 1]);
        push_if_violated(&mut violations, i + 1, i + 1, r, diag, tol);
        if diag > r + tol && envelope.exceeded(diag, i, tol) {
            violations.push(Violation { i: i + 1, j: i + 1, lhs: diag, rhs: envelope.bound(i) });
        }
        let next = sp.sigma(&x[i + 2], &x[i + 1]);
        if next > r + tol && envelope.exceeded(next, i + 1, tol) {
            violations.push(Violation { i: i + 2, j: i + 1, lhs: next, rhs: envelope.bound(i + 1) });
        }
    }
    Ok(ContractionCertificate::finish(
        CertificateKind::CR { c, r },
        depth,
        violations,
    ))
}

/// Orbital phi_r-contraction at `x0`, checked for all `0 <= i, j <= depth`:
///
/// ```text
/// r <= sigma(x_{i+1}, x_{j+1}) <= sigma(x_i, x_j) - phi(sigma(x_i, x_j))
/// ```
///
/// `phi` is validated on a grid over `[r, max sigma on the orbit]` first.
pub fn check_phi_r<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    phi: &Phi<S>,
    r: S,
    depth: usize,
    tol: S,
) -> Result<ContractionCertificate<S>> {
    let x = sys.orbit(depth + 2)?;
    let sp = sys.space();
    let upper = x
        .iter()
        .flat_map(|a| x.iter().map(move |b| (a, b)))
        .fold(r, |acc, (a, b)| acc.max_of(sp.sigma(a, b)));
    phi.validate(r, upper, tol)?;

    let mut violations = Vec::new();
    for i in 0..=depth {
        for j in 0..=depth {
            let t = sp.sigma(&x[i], &x[j]);
            let lhs = sp.sigma(&x[i + 1], &x[j + 1]);
            push_if_violated(&mut violations, i + 1, j + 1, r, lhs, tol);
            push_if_violated(&mut violations, i + 1, j + 1, lhs, t - phi.eval(t, r), tol);
        }
    }
    Ok(ContractionCertificate::finish(
        CertificateKind::PhiR { r, phi: phi.name() },
        depth,
        violations,
    ))
}

/// A sampled pair at which an inequality `lhs <= rhs` fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairWitness<S> {
    pub x: String,
    pub y: String,
    pub lhs: S,
    pub rhs: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexpansiveReport<S> {
    pub holds: bool,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub witness: Option<PairWitness<S>>,
}

/// `sigma(f x, f y) <= sigma(x, y)` over all ordered pairs of `samples`
/// sample points (every point on a finite space).
pub fn check_nonexpansive<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    samples: usize,
    tol: S,
) -> NonexpansiveReport<S> {
    let sp = sys.space();
    let pts = sp.sample_points(samples.max(1));
    let images: Vec<_> = pts.iter().map(|p| sys.apply(p)).collect();
    let mut pairs_checked = 0;
    for (x, fx) in pts.iter().zip(&images) {
        for (y, fy) in pts.iter().zip(&images) {
            pairs_checked += 1;
            let lhs = sp.sigma(fx, fy);
            let rhs = sp.sigma(x, y);
            if lhs > rhs + tol {
                return NonexpansiveReport {
                    holds: false,
                    pairs_checked,
                    exhaustive: sp.is_exhaustive(),
                    witness: Some(PairWitness {
                        x: sp.label(x),
                        y: sp.label(y),
                        lhs,
                        rhs,
                    }),
                };
            }
        }
    }
    NonexpansiveReport {
        holds: true,
        pairs_checked,
        exhaustive: sp.is_exhaustive(),
        witness: None,
    }
}

/// `r0 <= sigma(x, y)` for all pairs. `None` stands for `-inf`.
///
/// Finite spaces compare against the table minimum; functional spaces against
/// their declared lower bound.
pub fn check_bounded_below<S: Scalar, Sp: Space<S>>(space: &Sp, r0: Option<S>) -> Result<bool> {
    let Some(r0) = r0 else {
        return Ok(true);
    };
    match space.lower_bound() {
        Some(lb) => Ok(lb >= r0),
        None => Err(Error::NoDeclaredBound(space.describe())),
    }
}

/// `sigma(a,a) <= sigma(a,f a) <= sigma(f a,f a)` and `m(a, f a) = sigma(a,a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitImageChain<S> {
    pub sigma_aa: S,
    pub sigma_afa: S,
    pub sigma_fafa: S,
    pub holds: bool,
}

impl<S: Scalar> LimitImageChain<S> {
    pub fn new(saa: S, safa: S, sfafa: S, tol: S) -> Self {
        let m = saa.min_of(sfafa);
        Self {
            sigma_aa: saa,
            sigma_afa: safa,
            sigma_fafa: sfafa,
            holds: saa <= safa + tol && safa <= sfafa + tol && (m - saa).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContinuityReport<S> {
    pub holds: bool,
    pub special_limit: String,
    pub image: String,
    pub image_limit: LimitVerdict<S>,
    /// Checked only when `holds`.
    pub chain: Option<LimitImageChain<S>>,
}

/// Weak orbital continuity on an analysed orbit: `f(a)` must be a limit (not
/// necessarily special) of the orbit whose special limit is `a`.
pub fn weak_orbital_continuity<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    orbit: &OrbitReport<S, Sp::Point>,
    tol: S,
) -> Result<ContinuityReport<S>> {
    let a = orbit.special_limit.as_ref().ok_or(Error::NoSpecialLimit)?;
    let sp = sys.space();
    let prefix = orbit.prefix(sp)?;
    let fa = sys.apply(a);
    let image_limit = is_limit(&prefix, &orbit.cauchy, &fa, tol)?;
    let chain = image_limit.is_limit.then(|| {
        LimitImageChain::new(sp.sigma(a, a), sp.sigma(a, &fa), sp.sigma(&fa, &fa), tol)
    });
    Ok(ContinuityReport {
        holds: image_limit.is_limit,
        special_limit: sp.label(a),
        image: sp.label(&fa),
        image_limit,
        chain,
    })
}

/// Runs the orbit to `max(depth, 2 * window)` terms, locates the special
/// limit and applies [`weak_orbital_continuity`].
pub fn check_weak_orbital_continuity<S: Scalar, Sp: Space<S>>(
    sys: &MapSystem<S, Sp>,
    depth: usize,
    tol: S,
) -> Result<ContinuityReport<S>> {
    let orbit = analyze_orbit(sys, depth.max(2 * DEFAULT_WINDOW), DEFAULT_WINDOW, tol)?;
    if !orbit.cauchy.is_r_cauchy() {
        return Err(Error::NotRCauchy(format!("status {:?}", orbit.cauchy.status)));
    }
    weak_orbital_continuity(sys, &orbit, tol)
}
