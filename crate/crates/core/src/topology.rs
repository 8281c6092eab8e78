//! Ball families on finite spaces and the topologies they generate.
//!
//! Each family is a strict sublevel set `{y : e(x,y) < eps}` of an "excess"
//! function:
//!
//! | family       | `e(x, y)`                                      |
//! |--------------|------------------------------------------------|
//! | `asadi`      | `sigma(x,y) - m_xy`                            |
//! | `m_open`     | `sigma(x,y) + sigma(y,y) - m_xy - sigma(x,x)`  |
//! | `induced_p`  | `sigma(x,y) + M_xy - m_xy - sigma(x,x)`        |
//! | `standard_p` | `sigma(x,y) - sigma(x,x)` (partial metrics only) |
//!
//! On a finite space `eps -> ball(x, eps)` is a step function, so only
//! finitely many balls exist per center. Topologies are built by testing every
//! subset `U` for "each `x` in `U` has a ball inside `U`".

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::classify::require_partial_metric;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{FiniteSpace, Space};

/// Largest space [`generate_topology`] will enumerate by default.
pub const DEFAULT_POINT_CAP: usize = 15;

/// Hard limit imposed by the bitmask representation.
pub const MAX_POINT_CAP: usize = 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BallFamily {
    Asadi,
    MOpen,
    InducedP,
    StandardP,
}

impl BallFamily {
    pub const ALL: [BallFamily; 4] = [
        BallFamily::Asadi,
        BallFamily::MOpen,
        BallFamily::InducedP,
        BallFamily::StandardP,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BallFamily::Asadi => "asadi",
            BallFamily::MOpen => "m_open",
            BallFamily::InducedP => "induced_p",
            BallFamily::StandardP => "standard_p",
        }
    }

    /// The quantity compared against the radius.
    pub fn excess<S: Scalar>(self, space: &FiniteSpace<S>, x: usize, y: usize) -> S {
        let sxy = space.get(x, y);
        let sxx = space.get(x, x);
        match self {
            BallFamily::Asadi => sxy - space.m(&x, &y),
            BallFamily::MOpen => sxy + space.get(y, y) - space.m(&x, &y) - sxx,
            BallFamily::InducedP => sxy + space.big_m(&x, &y) - space.m(&x, &y) - sxx,
            BallFamily::StandardP => sxy - sxx,
        }
    }
}

impl fmt::Display for BallFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BallFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "asadi" | "a" => Ok(BallFamily::Asadi),
            "m_open" | "sigma" => Ok(BallFamily::MOpen),
            "induced_p" | "p_sigma" => Ok(BallFamily::InducedP),
            "standard_p" | "sigma_s" => Ok(BallFamily::StandardP),
            other => Err(Error::InvalidConfig(format!("unknown ball family `{other}`"))),
        }
    }
}

/// A ball family bound to a space, with the excess table precomputed.
pub struct Balls<'a, S> {
    space: &'a FiniteSpace<S>,
    family: BallFamily,
    excess: Vec<Vec<S>>,
}

impl<'a, S: Scalar> Balls<'a, S> {
    /// Fails for `standard_p` on a space that is not a partial metric.
    pub fn new(space: &'a FiniteSpace<S>, family: BallFamily) -> Result<Self> {
        if family == BallFamily::StandardP {
            require_partial_metric(space, S::default_tolerance())?;
        }
        let n = space.len();
        let excess = (0..n)
            .map(|x| (0..n).map(|y| family.excess(space, x, y)).collect())
            .collect();
        Ok(Self {
            space,
            family,
            excess,
        })
    }

    pub fn family(&self) -> BallFamily {
        self.family
    }

    pub fn space(&self) -> &FiniteSpace<S> {
        self.space
    }

    pub fn excess(&self, x: usize, y: usize) -> S {
        self.excess[x][y]
    }

    /// `{y : e(x,y) < eps}` as sorted indices.
    pub fn ball(&self, x: usize, eps: S) -> Result<Vec<usize>> {
        if eps <= S::zero() {
            return Err(Error::NonPositiveRadius(eps.to_string()));
        }
        if x >= self.space.len() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        Ok((0..self.space.len())
            .filter(|&y| self.excess[x][y] < eps)
            .collect())
    }

    /// Radii at which every distinct ball around `x` is attained: midpoints
    /// between consecutive distinct nonnegative excess levels (starting from
    /// zero), plus one value above the largest.
    pub fn candidate_radii(&self, x: usize) -> Vec<S> {
        let mut levels: Vec<S> = self.excess[x]
            .iter()
            .copied()
            .filter(|&v| v > S::zero())
            .collect();
        levels.sort_by(|a, b| a.partial_cmp(b).expect("finite excess values"));
        levels.dedup();
        let mut radii = Vec::with_capacity(levels.len() + 1);
        let mut prev = S::zero();
        for &v in &levels {
            radii.push((prev + v) / S::two());
            prev = v;
        }
        radii.push(prev + S::one());
        radii
    }

    /// Every distinct ball around `x`, smallest first, each with a radius
    /// attaining it.
    pub fn distinct_balls(&self, x: usize) -> Vec<(S, u32)> {
        assert!(self.space.len() <= MAX_POINT_CAP, "bitmask balls need n <= 31");
        self.candidate_radii(x)
            .into_iter()
            .map(|eps| {
                let mask = (0..self.space.len())
                    .filter(|&y| self.excess[x][y] < eps)
                    .fold(0u32, |m, y| m | (1 << y));
                (eps, mask)
            })
            .collect()
    }
}

/// `{y : e(x,y) < eps}` for a single query. `x` is a label.
pub fn ball<S: Scalar>(
    space: &FiniteSpace<S>,
    family: BallFamily,
    x: &str,
    eps: S,
) -> Result<Vec<String>> {
    let balls = Balls::new(space, family)?;
    let x = space.index_of(x)?;
    Ok(balls
        .ball(x, eps)?
        .into_iter()
        .map(|i| space.label_of(i).to_owned())
        .collect())
}

/// The radius from the basis argument: for `y` in `ball(x, eps)`,
/// `ball(y, delta) ⊆ ball(x, eps)` with `delta = eps - e(x,y)` under the
/// `m_open` family.
pub fn basis_delta<S: Scalar>(space: &FiniteSpace<S>, x: usize, y: usize, eps: S) -> S {
    eps - BallFamily::MOpen.excess(space, x, y)
}

/// A topology on a finite set, stored as bitmasks over point indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    labels: Vec<String>,
    open_sets: Vec<u32>,
}

impl FiniteTopology {
    pub fn len(&self) -> usize {
        self.open_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open_sets.is_empty()
    }

    pub fn point_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Open sets as bitmasks, ascending.
    pub fn masks(&self) -> &[u32] {
        &self.open_sets
    }

    pub fn full_mask(&self) -> u32 {
        full_mask(self.labels.len())
    }

    pub fn is_open_mask(&self, mask: u32) -> bool {
        self.open_sets.binary_search(&mask).is_ok()
    }

    pub fn is_open(&self, points: &[&str]) -> bool {
        let mut mask = 0u32;
        for p in points {
            match self.labels.iter().position(|l| l == p) {
                Some(i) => mask |= 1 << i,
                None => return false,
            }
        }
        self.is_open_mask(mask)
    }

    pub fn mask_labels(&self, mask: u32) -> Vec<String> {
        let mut out: Vec<String> = (0..self.labels.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.labels[i].clone())
            .collect();
        out.sort();
        out
    }

    /// Open sets as sorted label arrays, in sorted order.
    pub fn open_sets(&self) -> Vec<Vec<String>> {
        let mut sets: Vec<Vec<String>> =
            self.open_sets.iter().map(|&m| self.mask_labels(m)).collect();
        sets.sort();
        sets
    }

    /// Contains the empty set and the whole space and is closed under
    /// pairwise union and intersection.
    pub fn is_topology(&self) -> bool {
        if !self.is_open_mask(0) || !self.is_open_mask(self.full_mask()) {
            return false;
        }
        self.open_sets.iter().all(|&a| {
            self.open_sets
                .iter()
                .all(|&b| self.is_open_mask(a | b) && self.is_open_mask(a & b))
        })
    }

    /// Intersection of all open sets containing point `x`.
    pub fn minimal_neighbourhood(&self, x: usize) -> u32 {
        self.open_sets
            .iter()
            .filter(|&&m| m & (1 << x) != 0)
            .fold(self.full_mask(), |acc, &m| acc & m)
    }

    pub fn separation(&self) -> Separation {
        let n = self.labels.len();
        let nbhd: Vec<u32> = (0..n).map(|x| self.minimal_neighbourhood(x)).collect();
        // x and y are topologically distinguishable from x's side iff some
        // open set holds x but not y, i.e. y is outside x's minimal
        // neighbourhood.
        let separates = |x: usize, y: usize| nbhd[x] & (1 << y) == 0;
        let mut t1 = true;
        for x in 0..n {
            for y in (x + 1)..n {
                let (xy, yx) = (separates(x, y), separates(y, x));
                if !xy && !yx {
                    return Separation::NotT0;
                }
                t1 &= xy && yx;
            }
        }
        if t1 {
            Separation::T1
        } else {
            Separation::T0NotT1
        }
    }
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Generates the topology of a ball family with the default point cap.
pub fn generate_topology<S: Scalar>(
    space: &FiniteSpace<S>,
    family: BallFamily,
) -> Result<FiniteTopology> {
    generate_topology_capped(space, family, DEFAULT_POINT_CAP)
}

/// `{U : every x in U has some ball(x, eps) ⊆ U}`, by enumerating all `2^n`
/// subsets.
pub fn generate_topology_capped<S: Scalar>(
    space: &FiniteSpace<S>,
    family: BallFamily,
    cap: usize,
) -> Result<FiniteTopology> {
    let n = space.len();
    let cap = cap.min(MAX_POINT_CAP);
    if n > cap {
        return Err(Error::TooManyPoints { n, cap });
    }
    let balls = Balls::new(space, family)?;
    let per_center: Vec<Vec<u32>> = (0..n)
        .map(|x| balls.distinct_balls(x).into_iter().map(|(_, m)| m).collect())
        .collect();
    let open_sets = (0..=full_mask(n))
        .filter(|&u| {
            (0..n)
                .filter(|x| u & (1 << x) != 0)
                .all(|x| per_center[x].iter().any(|&b| b & !u == 0))
        })
        .collect();
    Ok(FiniteTopology {
        labels: space.labels().to_vec(),
        open_sets,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Equal,
    LeftStrictlyCoarser,
    LeftStrictlyFiner,
    Incomparable,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Equal => "equal",
            Relation::LeftStrictlyCoarser => "left_strictly_coarser",
            Relation::LeftStrictlyFiner => "left_strictly_finer",
            Relation::Incomparable => "incomparable",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Separation {
    #[serde(rename = "not_T0")]
    NotT0,
    #[serde(rename = "T0_not_T1")]
    T0NotT1,
    T1,
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Separation::NotT0 => "not_T0",
            Separation::T0NotT1 => "T0_not_T1",
            Separation::T1 => "T1",
        })
    }
}

/// Exact set comparison of two topologies, with the open sets that only one
/// side has.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyComparison {
    pub relation: Relation,
    pub only_left: Vec<Vec<String>>,
    pub only_right: Vec<Vec<String>>,
}

pub fn compare_topologies(left: &FiniteTopology, right: &FiniteTopology) -> TopologyComparison {
    let l: BTreeSet<u32> = left.open_sets.iter().copied().collect();
    let r: BTreeSet<u32> = right.open_sets.iter().copied().collect();
    let only_left: Vec<Vec<String>> = l.difference(&r).map(|&m| left.mask_labels(m)).collect();
    let only_right: Vec<Vec<String>> = r.difference(&l).map(|&m| right.mask_labels(m)).collect();
    let relation = match (only_left.is_empty(), only_right.is_empty()) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::LeftStrictlyCoarser,
        (false, true) => Relation::LeftStrictlyFiner,
        (false, false) => Relation::Incomparable,
    };
    TopologyComparison {
        relation,
        only_left,
        only_right,
    }
}

pub fn compare<S: Scalar>(
    space: &FiniteSpace<S>,
    left: BallFamily,
    right: BallFamily,
) -> Result<TopologyComparison> {
    Ok(compare_topologies(
        &generate_topology(space, left)?,
        &generate_topology(space, right)?,
    ))
}

pub fn separation<S: Scalar>(space: &FiniteSpace<S>, family: BallFamily) -> Result<Separation> {
    Ok(generate_topology(space, family)?.separation())
}

/// Whether the `asadi` topology contains the `standard_p` topology. Only
/// defined for partial metrics.
pub fn asadi_finer_check<S: Scalar>(space: &FiniteSpace<S>) -> Result<bool> {
    let standard = generate_topology(space, BallFamily::StandardP)?;
    let asadi = generate_topology(space, BallFamily::Asadi)?;
    let rel = compare_topologies(&asadi, &standard).relation;
    Ok(matches!(rel, Relation::Equal | Relation::LeftStrictlyFiner))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn line(points: &[i64], f: impl Fn(i64, i64) -> i64) -> FiniteSpace<Rational> {
        let ls = points.iter().map(|p| p.to_string()).collect();
        FiniteSpace::from_fn(ls, |i, j| q(f(points[i], points[j]))).unwrap()
    }

    fn e2a() -> FiniteSpace<Rational> {
        FiniteSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![q(1), q(1)], vec![q(1), q(2)]],
        )
        .unwrap()
    }

    #[test]
    fn one_point_topology() {
        let s = FiniteSpace::new(vec!["x".into()], vec![vec![q(4)]]).unwrap();
        for fam in BallFamily::ALL {
            let t = generate_topology(&s, fam).unwrap();
            assert_eq!(t.masks(), &[0, 1]);
            assert_eq!(t.separation(), Separation::T1);
        }
    }

    #[test]
    fn sumline_m_open_balls_match_closed_form() {
        // On x + y: y is in the M-open ball of radius eps at x iff
        // y <= x or y < x + eps/3.
        let pts: Vec<i64> = (0..12).collect();
        let s = line(&pts, |x, y| x + y);
        let balls = Balls::new(&s, BallFamily::MOpen).unwrap();
        let induced = Balls::new(&s, BallFamily::InducedP).unwrap();
        for x in 0..pts.len() {
            for eps in [1, 2, 3, 5, 7, 9].map(Rational::from_integer) {
                let expected: Vec<usize> = (0..pts.len())
                    .filter(|&y| {
                        let (xv, yv) = (q(pts[x]), q(pts[y]));
                        yv <= xv || yv < xv + eps / q(3)
                    })
                    .collect();
                assert_eq!(balls.ball(x, eps).unwrap(), expected);
                let expected: Vec<usize> = (0..pts.len())
                    .filter(|&y| {
                        let (xv, yv) = (q(pts[x]), q(pts[y]));
                        xv - eps < yv && yv < xv + eps / q(3)
                    })
                    .collect();
                assert_eq!(induced.ball(x, eps).unwrap(), expected);
            }
        }
    }

    #[test]
    fn center_always_in_m_open_ball() {
        let s = e2a();
        let balls = Balls::new(&s, BallFamily::MOpen).unwrap();
        for x in 0..2 {
            for eps in balls.candidate_radii(x) {
                assert!(balls.ball(x, eps).unwrap().contains(&x));
            }
            assert!(balls.ball(x, Rational::new(1, 1000)).unwrap().contains(&x));
        }
    }

    #[test]
    fn ball_rejects_bad_radius_and_family() {
        let s = e2a();
        assert!(matches!(
            ball(&s, BallFamily::MOpen, "a", q(0)),
            Err(Error::NonPositiveRadius(_))
        ));
        assert!(matches!(
            ball(&s, BallFamily::StandardP, "a", q(1)),
            Err(Error::NotPartialMetric(_))
        ));
        assert!(ball(&s, BallFamily::MOpen, "zz", q(1)).is_err());
    }

    #[test]
    fn e2a_m_open_topology() {
        // e(a,b) = 1 + 2 - 1 - 1 = 1 and e(b,a) = 1 + 1 - 1 - 2 = -1, so b's
        // every ball contains a while a has a ball without b.
        let t = generate_topology(&e2a(), BallFamily::MOpen).unwrap();
        assert!(t.is_topology());
        assert_eq!(
            t.open_sets(),
            vec![vec![], vec!["a".to_string()], vec!["a".into(), "b".into()]]
        );
        assert_eq!(t.separation(), Separation::T0NotT1);
    }

    #[test]
    fn sumline_down_sets_are_open() {
        let s = line(&[0, 1, 2], |x, y| x + y);
        let t = generate_topology(&s, BallFamily::MOpen).unwrap();
        assert!(t.is_topology());
        assert!(t.is_open(&["0"]));
        assert!(t.is_open(&["0", "1"]));
        assert!(!t.is_open(&["1"]));
        assert!(!t.is_open(&["2"]));
    }

    #[test]
    fn sumline_m_open_strictly_coarser_than_induced() {
        let s = line(&[0, 1, 2], |x, y| x + y);
        let cmp = compare(&s, BallFamily::MOpen, BallFamily::InducedP).unwrap();
        assert_eq!(cmp.relation, Relation::LeftStrictlyCoarser);
        assert!(cmp.only_left.is_empty());
        assert!(cmp.only_right.contains(&vec!["2".to_string()]));
    }

    #[test]
    fn maxline_pair_is_t0_not_t1() {
        let s = line(&[0, 1], |x, y| x.max(y));
        assert_eq!(separation(&s, BallFamily::MOpen).unwrap(), Separation::T0NotT1);
    }

    #[test]
    fn discrete_metric_is_t1() {
        let s = line(&[0, 1], |x, y| if x == y { 0 } else { 1 });
        assert_eq!(separation(&s, BallFamily::MOpen).unwrap(), Separation::T1);
    }

    #[test]
    fn indiscrete_table_is_not_t0() {
        // Not an M-metric: separation fails, and the topology cannot tell the
        // two points apart.
        let s = line(&[0, 1], |_, _| 0);
        assert_eq!(separation(&s, BallFamily::MOpen).unwrap(), Separation::NotT0);
    }

    #[test]
    fn maxline_standard_equals_m_open_and_asadi_is_finer() {
        let s = line(&[0, 1, 2], |x, y| x.max(y));
        let cmp = compare(&s, BallFamily::MOpen, BallFamily::StandardP).unwrap();
        assert_eq!(cmp.relation, Relation::Equal);
        assert!(asadi_finer_check(&s).unwrap());
        let asadi = generate_topology(&s, BallFamily::Asadi).unwrap();
        // sigma* is |x - y|, so the asadi topology is discrete.
        assert_eq!(asadi.len(), 8);
    }

    #[test]
    fn asadi_check_needs_partial_metric() {
        assert!(asadi_finer_check(&e2a()).is_err());
    }

    #[test]
    fn cap_enforced() {
        let pts: Vec<i64> = (0..16).collect();
        let s = line(&pts, |x, y| x.max(y));
        assert!(matches!(
            generate_topology(&s, BallFamily::MOpen),
            Err(Error::TooManyPoints { n: 16, cap: 15 })
        ));
        assert!(generate_topology_capped(&s, BallFamily::MOpen, 16).is_ok());
    }

    #[test]
    fn candidate_radii_cover_every_step() {
        let s = line(&[0, 1, 3], |x, y| x + y);
        let balls = Balls::new(&s, BallFamily::MOpen).unwrap();
        // e(0, .) = 0, 3, 9 -> radii 3/2, 6, 10
        assert_eq!(
            balls.candidate_radii(0),
            vec![Rational::new(3, 2), q(6), q(10)]
        );
        let masks: Vec<u32> = balls.distinct_balls(0).into_iter().map(|(_, m)| m).collect();
        assert_eq!(masks, vec![0b001, 0b011, 0b111]);
    }

    #[test]
    fn family_parse() {
        assert_eq!("m-open".parse::<BallFamily>().unwrap(), BallFamily::MOpen);
        assert_eq!("standard_p".parse::<BallFamily>().unwrap(), BallFamily::StandardP);
        assert!("nope".parse::<BallFamily>().is_err());
    }
}
