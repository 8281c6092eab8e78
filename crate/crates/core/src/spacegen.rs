//! Seeded random M-metric and partial-metric tables.
//!
//! Every M-metric splits as `sigma(x,y) = d(x,y) + m_xy` where
//! `d = sigma - m` is nonnegative, symmetric, zero on the diagonal and obeys
//! the ordinary triangle inequality. Generation runs that in reverse: sample
//! self-distances, sample a symmetric nonnegative matrix, repair it into a
//! shortest-path metric `d`, then add `m`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derived::induce_partial_unchecked;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{FiniteSpace, Space};

const RESAMPLE_BUDGET: usize = 64;

/// Self-distances closer than this count as equal, and a base distance this
/// small counts as zero, when guarding separation.
const SEPARATION_MARGIN: f64 = 1.0 / (1u64 << 20) as f64;

/// Step used to push colliding self-distances apart.
const DIAGONAL_NUDGE: f64 = 1.0 / 1024.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    /// Interval the self-distances `sigma(x,x)` are drawn from. May be
    /// negative.
    pub diag_range: (f64, f64),
    /// Interval the raw off-diagonal base distances are drawn from, before
    /// shortest-path repair.
    pub d_range: (f64, f64),
    pub seed: u64,
    pub ensure_distinct_diag: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n: 5,
            diag_range: (-2.0, 3.0),
            d_range: (0.0, 4.0),
            seed: 0,
            ensure_distinct_diag: false,
        }
    }
}

impl GenConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 <= r.1;
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !finite(self.diag_range) {
            return Err(Error::InvalidConfig(format!(
                "bad diag_range {:?}",
                self.diag_range
            )));
        }
        if !finite(self.d_range) || self.d_range.0 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "d_range {:?} must be a nonnegative interval",
                self.d_range
            )));
        }
        Ok(())
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..=hi)
    }
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

/// All-pairs shortest-path closure, in place.
pub fn shortest_path_closure<S: Scalar>(d: &mut [Vec<S>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

fn sample_diagonal<S: Scalar>(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Vec<S> {
    let margin = S::from_sample(SEPARATION_MARGIN);
    let nudge = S::from_sample(DIAGONAL_NUDGE);
    let mut diag: Vec<S> = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let mut s = S::from_sample(sample(rng, cfg.diag_range));
        if cfg.ensure_distinct_diag {
            while diag.iter().any(|&t| (t - s).abs() <= margin) {
                s = s + nudge;
            }
        }
        diag.push(s);
    }
    diag
}

/// Draws an M-metric table. The result classifies as at least `m_metric`.
///
/// Attempts whose table would break separation (two points at base distance
/// zero with equal self-distances) are resampled; the error is returned only
/// for degenerate configurations.
pub fn gen_m_metric<S: Scalar>(cfg: &GenConfig) -> Result<FiniteSpace<S>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let margin = S::from_sample(SEPARATION_MARGIN);
    let n = cfg.n;

    for _ in 0..RESAMPLE_BUDGET {
        let diag = sample_diagonal::<S>(cfg, &mut rng);
        let mut d = vec![vec![S::zero(); n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = S::from_sample(sample(&mut rng, cfg.d_range));
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        shortest_path_closure(&mut d);

        let separated = (0..n).all(|i| {
            ((i + 1)..n).all(|j| d[i][j] > margin || (diag[i] - diag[j]).abs() > margin)
        });
        if !separated {
            continue;
        }
        return FiniteSpace::from_fn(labels(n), |i, j| {
            if i == j {
                diag[i]
            } else {
                d[i][j] + diag[i].min_of(diag[j])
            }
        });
    }
    Err(Error::ResampleBudgetExhausted(RESAMPLE_BUDGET))
}

/// Draws a partial-metric table by inducing one from [`gen_m_metric`]'s
/// output with `p(x,y) = sigma(x,y) + M_xy - m_xy`.
pub fn gen_partial_metric<S: Scalar>(cfg: &GenConfig) -> Result<FiniteSpace<S>> {
    Ok(induce_partial_unchecked(&gen_m_metric::<S>(cfg)?))
}

/// Splits a table into its self-distances and the base function
/// `d(x,y) = sigma(x,y) - m_xy`.
pub fn decompose<S: Scalar>(space: &FiniteSpace<S>) -> (Vec<S>, Vec<Vec<S>>) {
    let n = space.len();
    let d = (0..n)
        .map(|i| (0..n).map(|j| space.get(i, j) - space.m(&i, &j)).collect())
        .collect();
    (space.diagonal(), d)
}
