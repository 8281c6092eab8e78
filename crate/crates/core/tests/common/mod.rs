//! Brute-force reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mmetric::{FiniteSpace, Scalar};

pub fn table<S: Scalar>(space: &FiniteSpace<S>) -> Vec<Vec<S>> {
    let n = space.len();
    (0..n).map(|i| (0..n).map(|j| space.get(i, j)).collect()).collect()
}

fn lo<S: Scalar>(a: S, b: S) -> S {
    if a < b { a } else { b }
}

fn hi<S: Scalar>(a: S, b: S) -> S {
    if a < b { b } else { a }
}

pub fn is_m_metric<S: Scalar>(t: &[Vec<S>], tol: S) -> bool {
    let n = t.len();
    let m = |x: usize, y: usize| lo(t[x][x], t[y][y]);
    for x in 0..n {
        for y in 0..n {
            if m(x, y) > t[x][y] + tol || (t[x][y] - t[y][x]).abs() > tol {
                return false;
            }
            let same = (t[x][x] - t[x][y]).abs() <= tol && (t[x][y] - t[y][y]).abs() <= tol;
            if x != y && same {
                return false;
            }
            for z in 0..n {
                let lhs = t[x][y] - m(x, y);
                let rhs = t[x][z] - m(x, z) + t[z][y] - m(z, y);
                if lhs > rhs + tol {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_partial_metric<S: Scalar>(t: &[Vec<S>], tol: S) -> bool {
    let n = t.len();
    if !is_m_metric(t, tol) {
        return false;
    }
    for x in 0..n {
        for y in 0..n {
            if t[x][x] > t[x][y] + tol {
                return false;
            }
            for z in 0..n {
                if t[x][y] > t[x][z] + t[z][y] - t[z][z] + tol {
                    return false;
                }
            }
        }
    }
    true
}

pub fn is_metric<S: Scalar>(t: &[Vec<S>], tol: S) -> bool {
    is_partial_metric(t, tol) && (0..t.len()).all(|x| t[x][x].abs() <= tol)
}

#[derive(Clone, Copy, Debug)]
pub enum Excess {
    MOpen,
    InducedP,
    StandardP,
}

pub fn excess<S: Scalar>(kind: Excess, t: &[Vec<S>], x: usize, y: usize) -> S {
    let (sxx, syy, sxy) = (t[x][x], t[y][y], t[x][y]);
    match kind {
        Excess::MOpen => sxy + syy - lo(sxx, syy) - sxx,
        Excess::InducedP => sxy + hi(sxx, syy) - lo(sxx, syy) - sxx,
        Excess::StandardP => sxy - sxx,
    }
}

/// Every distinct ball `{y : e(c,y) < eps}`, eps > 0, as a bitmask.
pub fn balls<S: Scalar>(kind: Excess, t: &[Vec<S>]) -> BTreeSet<u32> {
    let n = t.len();
    let mut out = BTreeSet::new();
    for c in 0..n {
        let mut thresholds = vec![S::zero()];
        thresholds.extend((0..n).map(|y| excess(kind, t, c, y)).filter(|&v| v > S::zero()));
        for v in thresholds {
            let mask = (0..n)
                .filter(|&y| excess(kind, t, c, y) <= v)
                .fold(0u32, |m, y| m | 1 << y);
            out.insert(mask);
        }
    }
    out
}

/// Open sets generated by the balls: every point of the set lies in a ball
/// contained in it.
pub fn topology<S: Scalar>(kind: Excess, t: &[Vec<S>]) -> BTreeSet<u32> {
    let n = t.len();
    let basis = balls(kind, t);
    (0u32..1 << n)
        .filter(|&u| {
            (0..n)
                .filter(|&x| u & 1 << x != 0)
                .all(|x| basis.iter().any(|&b| b & 1 << x != 0 && b & !u == 0))
        })
        .collect()
}

pub fn is_t0(n: usize, open: &BTreeSet<u32>) -> bool {
    (0..n).all(|x| {
        (x + 1..n).all(|y| open.iter().any(|&u| (u >> x & 1) != (u >> y & 1)))
    })
}
