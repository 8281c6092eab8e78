//! Distance spaces: finite tables and real-line functional spaces.

use std::fmt::{self, Debug};
use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A set equipped with a symmetric real-valued function `sigma`.
///
/// No axioms are assumed; use [`classify`](crate::classify::classify) to find
/// out what a finite table satisfies.
pub trait Space<S: Scalar> {
    type Point: Clone + PartialEq + Debug;

    fn sigma(&self, x: &Self::Point, y: &Self::Point) -> S;

    fn contains(&self, x: &Self::Point) -> bool;

    /// Human readable name of a point, used in reports and witnesses.
    fn label(&self, x: &Self::Point) -> String;

    /// Point identity. Exact on finite spaces, `|x - y| <= tol` on the line.
    fn same_point(&self, x: &Self::Point, y: &Self::Point, tol: S) -> bool;

    /// Points used for pairwise spot checks. On finite spaces this is every
    /// point and `budget` is ignored.
    fn sample_points(&self, budget: usize) -> Vec<Self::Point>;

    /// Whether [`Space::sample_points`] enumerates the whole space.
    fn is_exhaustive(&self) -> bool;

    /// Points worth testing as the special limit of a sequence with the given
    /// terms.
    fn limit_candidates(&self, terms: &[Self::Point]) -> Vec<Self::Point>;

    /// Greatest known lower bound of `sigma`: the table minimum for finite
    /// spaces, the declared bound for functional ones.
    fn lower_bound(&self) -> Option<S>;

    fn declared_complete(&self) -> bool;

    /// Short human-readable name for error messages.
    fn describe(&self) -> String {
        "space".into()
    }

    /// `min(sigma(x,x), sigma(y,y))`.
    fn m(&self, x: &Self::Point, y: &Self::Point) -> S {
        self.sigma(x, x).min_of(self.sigma(y, y))
    }

    /// `max(sigma(x,x), sigma(y,y))`.
    fn big_m(&self, x: &Self::Point, y: &Self::Point) -> S {
        self.sigma(x, x).max_of(self.sigma(y, y))
    }
}

/// A finite set of labelled points with a symmetric distance table.
#[derive(Clone, PartialEq)]
pub struct FiniteSpace<S> {
    labels: Vec<String>,
    sigma: Vec<Vec<S>>,
}

impl<S: Scalar> FiniteSpace<S> {
    /// Builds a space, rejecting empty, ragged, non-finite or asymmetric
    /// tables and duplicate labels.
    pub fn new(labels: Vec<String>, sigma: Vec<Vec<S>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        if sigma.len() != n {
            return Err(Error::NotSquare {
                row: sigma.len().min(n),
                len: sigma.len(),
                expected: n,
            });
        }
        for (i, row) in sigma.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    row: i,
                    len: row.len(),
                    expected: n,
                });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !sigma[i][j].is_finite_value() {
                    return Err(Error::NonFinite {
                        x: labels[i].clone(),
                        y: labels[j].clone(),
                    });
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if sigma[i][j] != sigma[j][i] {
                    return Err(Error::Asymmetric {
                        x: labels[i].clone(),
                        y: labels[j].clone(),
                        xy: sigma[i][j].to_string(),
                        yx: sigma[j][i].to_string(),
                    });
                }
            }
        }
        Ok(Self { labels, sigma })
    }

    /// Tabulates `f` over `labels`. `f` receives indices.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> S) -> Result<Self> {
        let n = labels.len();
        let sigma = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(labels, sigma)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_of(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownPoint(label.to_owned()))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.sigma[i][j]
    }

    pub fn table(&self) -> &[Vec<S>] {
        &self.sigma
    }

    pub fn diagonal(&self) -> Vec<S> {
        (0..self.len()).map(|i| self.sigma[i][i]).collect()
    }

    /// `m_{x,y}` looked up by label.
    pub fn m_of(&self, x: &str, y: &str) -> Result<S> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        Ok(Space::m(self, &i, &j))
    }

    /// `M_{x,y}` looked up by label.
    #[allow(non_snake_case)]
    pub fn M_of(&self, x: &str, y: &str) -> Result<S> {
        let (i, j) = (self.index_of(x)?, self.index_of(y)?);
        Ok(self.big_m(&i, &j))
    }

    /// Same labels, entries passed through `f`.
    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Result<FiniteSpace<T>> {
        FiniteSpace::from_fn(self.labels.clone(), |i, j| f(self.sigma[i][j]))
    }

    /// Subspace on the given indices, in the given order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        Self::from_fn(labels, |a, b| self.sigma[indices[a]][indices[b]])
    }

    /// Smallest table entry.
    pub fn min_entry(&self) -> S {
        let mut best = self.sigma[0][0];
        for row in &self.sigma {
            for &v in row {
                best = best.min_of(v);
            }
        }
        best
    }
}

impl<S: Scalar> Space<S> for FiniteSpace<S> {
    type Point = usize;

    #[inline]
    fn sigma(&self, x: &usize, y: &usize) -> S {
        self.sigma[*x][*y]
    }

    fn contains(&self, x: &usize) -> bool {
        *x < self.len()
    }

    fn label(&self, x: &usize) -> String {
        self.labels
            .get(*x)
            .cloned()
            .unwrap_or_else(|| format!("#{x}"))
    }

    fn same_point(&self, x: &usize, y: &usize, _tol: S) -> bool {
        x == y
    }

    fn sample_points(&self, _budget: usize) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn is_exhaustive(&self) -> bool {
        true
    }

    fn limit_candidates(&self, _terms: &[usize]) -> Vec<usize> {
        (0..self.len()).collect()
    }

    fn lower_bound(&self) -> Option<S> {
        Some(self.min_entry())
    }

    fn declared_complete(&self) -> bool {
        // Finite M-metric spaces are complete: an r-Cauchy sequence is
        // eventually constant by separation.
        true
    }
}

impl<S: Scalar> Debug for FiniteSpace<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteSpace")
            .field("points", &self.labels)
            .field("sigma", &self.sigma)
            .finish()
    }
}

/// On-disk form of a finite space: `{"points": [...], "sigma": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceFile<S> {
    pub points: Vec<String>,
    pub sigma: Vec<Vec<S>>,
}

impl<S: Scalar + Serialize + DeserializeOwned> FiniteSpace<S> {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpaceFile<S> = serde_json::from_str(text)?;
        Self::new(file.points, file.sigma)
    }

    pub fn to_json(&self) -> String {
        let file = SpaceFile {
            points: self.labels.clone(),
            sigma: self.sigma.clone(),
        };
        serde_json::to_string(&file).expect("finite table serializes")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

type SigmaFn<S> = Arc<dyn Fn(S, S) -> S + Send + Sync>;

/// A space whose points are reals in `[lo, hi]` (either end may be open to
/// infinity) with `sigma` given as a function.
///
/// Symmetry is spot-checked at construction. Completeness and the lower bound
/// are declared by the caller, never computed.
#[derive(Clone)]
pub struct FunctionalSpace<S> {
    name: String,
    lo: Option<S>,
    hi: Option<S>,
    sigma: SigmaFn<S>,
    lower_bound: Option<S>,
    complete: bool,
}

impl<S: Scalar> FunctionalSpace<S> {
    pub fn new(
        name: impl Into<String>,
        lo: Option<S>,
        hi: Option<S>,
        sigma: impl Fn(S, S) -> S + Send + Sync + 'static,
    ) -> Result<Self> {
        if let (Some(lo), Some(hi)) = (lo, hi) {
            if lo > hi {
                return Err(Error::InvalidConfig(format!("empty domain [{lo}, {hi}]")));
            }
        }
        let space = Self {
            name: name.into(),
            lo,
            hi,
            sigma: Arc::new(sigma),
            lower_bound: None,
            complete: false,
        };
        space.spot_check_symmetry()?;
        Ok(space)
    }

    pub fn with_lower_bound(mut self, bound: S) -> Self {
        self.lower_bound = Some(bound);
        self
    }

    pub fn declared_complete(mut self, complete: bool) -> Self {
        self.complete = complete;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> (Option<S>, Option<S>) {
        (self.lo, self.hi)
    }

    pub fn declared_lower_bound(&self) -> Option<S> {
        self.lower_bound
    }

    fn spot_check_symmetry(&self) -> Result<()> {
        let pts = self.sample_points(32);
        let tol = S::default_tolerance();
        for x in &pts {
            for y in &pts {
                let (xy, yx) = ((self.sigma)(*x, *y), (self.sigma)(*y, *x));
                if (xy - yx).abs() > tol {
                    return Err(Error::Asymmetric {
                        x: x.to_string(),
                        y: y.to_string(),
                        xy: xy.to_string(),
                        yx: yx.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Sampling window: the declared interval, with `[-1, 1]` standing in for
    /// missing ends.
    fn window(&self) -> (S, S) {
        let lo = self.lo.unwrap_or_else(|| self.hi.map_or(-S::one(), |h| h - S::two()));
        let hi = self.hi.unwrap_or_else(|| lo + S::two());
        (lo, hi)
    }
}

/// Base-2 radical inverse of `i`.
pub(crate) fn van_der_corput(mut i: u64) -> f64 {
    let mut x = 0.0;
    let mut scale = 0.5;
    while i > 0 {
        if i & 1 == 1 {
            x += scale;
        }
        i >>= 1;
        scale *= 0.5;
    }
    x
}

impl<S: Scalar> Space<S> for FunctionalSpace<S> {
    type Point = S;

    #[inline]
    fn sigma(&self, x: &S, y: &S) -> S {
        (self.sigma)(*x, *y)
    }

    fn contains(&self, x: &S) -> bool {
        x.is_finite_value()
            && self.lo.is_none_or(|lo| *x >= lo)
            && self.hi.is_none_or(|hi| *x <= hi)
    }

    fn label(&self, x: &S) -> String {
        x.to_string()
    }

    fn same_point(&self, x: &S, y: &S, tol: S) -> bool {
        (*x - *y).abs() <= tol
    }

    /// Upper end, lower end, then a van der Corput sequence across the
    /// interval.
    fn sample_points(&self, budget: usize) -> Vec<S> {
        let (lo, hi) = self.window();
        let mut pts = vec![hi];
        if lo != hi {
            pts.push(lo);
        }
        let mut i = 1;
        while pts.len() < budget.max(1) && lo != hi {
            let t = S::from_sample(van_der_corput(i));
            pts.push(lo + (hi - lo) * t);
            i += 1;
        }
        pts.truncate(budget.max(1));
        pts
    }

    fn is_exhaustive(&self) -> bool {
        false
    }

    fn limit_candidates(&self, terms: &[S]) -> Vec<S> {
        terms.last().cloned().into_iter().collect()
    }

    fn lower_bound(&self) -> Option<S> {
        self.lower_bound
    }

    fn declared_complete(&self) -> bool {
        self.complete
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

impl<S: Scalar> Debug for FunctionalSpace<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionalSpace")
            .field("name", &self.name)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .field("lower_bound", &self.lower_bound)
            .field("complete", &self.complete)
            .finish()
    }
}
