//! Structures derived from an M-metric table.

use crate::classify::require_m_metric;
use crate::error::Result;
use crate::scalar::Scalar;
use crate::space::{FiniteSpace, Space};

/// `sigma*(x,y) = sigma(x,y) - m_xy`, with a zero diagonal.
///
/// This is a metric when the input is a partial metric, but not for general
/// M-metrics; re-classify the result to find out.
pub fn sigma_star<S: Scalar>(space: &FiniteSpace<S>) -> Result<FiniteSpace<S>> {
    sigma_star_with_tol(space, S::default_tolerance())
}

pub fn sigma_star_with_tol<S: Scalar>(space: &FiniteSpace<S>, tol: S) -> Result<FiniteSpace<S>> {
    require_m_metric(space, tol)?;
    FiniteSpace::from_fn(space.labels().to_vec(), |i, j| {
        if i == j {
            S::zero()
        } else {
            space.get(i, j) - space.m(&i, &j)
        }
    })
}

/// The induced partial metric `p(x,y) = sigma(x,y) + M_xy - m_xy`.
///
/// The diagonal is unchanged.
pub fn induce_partial<S: Scalar>(space: &FiniteSpace<S>) -> Result<FiniteSpace<S>> {
    induce_partial_with_tol(space, S::default_tolerance())
}

pub fn induce_partial_with_tol<S: Scalar>(
    space: &FiniteSpace<S>,
    tol: S,
) -> Result<FiniteSpace<S>> {
    require_m_metric(space, tol)?;
    Ok(induce_partial_unchecked(space))
}

pub(crate) fn induce_partial_unchecked<S: Scalar>(space: &FiniteSpace<S>) -> FiniteSpace<S> {
    FiniteSpace::from_fn(space.labels().to_vec(), |i, j| {
        space.get(i, j) + space.big_m(&i, &j) - space.m(&i, &j)
    })
    .expect("induced table keeps the shape and symmetry of a valid space")
}

/// Both min/max interchange inequalities for reals:
///
/// ```text
/// min(c,a) + min(c,b) <= c + min(a,b)
/// c + max(a,b)        <= max(c,a) + max(c,b)
/// ```
pub fn min_max_inequality_check<S: Scalar>(a: S, b: S, c: S) -> bool {
    let min_form = c.min_of(a) + c.min_of(b) <= c + a.min_of(b);
    let max_form = c + a.max_of(b) <= c.max_of(a) + c.max_of(b);
    min_form && max_form
}
