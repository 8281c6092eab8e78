mod common;

use common::Excess;
use mmetric::spacegen::{gen_m_metric, gen_partial_metric, GenConfig};
use mmetric::topology::{basis_delta, compare, generate_topology, separation, BallFamily, Balls, Relation, Separation};
use mmetric::Rational;
use proptest::prelude::*;

fn config() -> impl Strategy<Value = GenConfig> {
    (1usize..=5, any::<u64>()).prop_map(|(n, seed)| GenConfig::new(n, seed))
}

proptest! {
    #[test]
    fn topology_is_closed_under_unions_and_intersections(cfg in config()) {
        let s = gen_m_metric::<Rational>(&cfg).unwrap();
        for fam in [BallFamily::Asadi, BallFamily::MOpen, BallFamily::InducedP] {
            let t = generate_topology(&s, fam).unwrap();
            let open = t.masks();
            prop_assert!(open.contains(&0) && open.contains(&t.full_mask()));
            for &u in open {
                for &v in open {
                    prop_assert!(t.is_open_mask(u | v) && t.is_open_mask(u & v));
                }
            }
            prop_assert!(t.is_topology());
        }
    }

    #[test]
    fn balls_form_a_basis(cfg in config()) {
        let s = gen_m_metric::<Rational>(&cfg).unwrap();
        let balls = Balls::new(&s, BallFamily::MOpen).unwrap();
        for x in 0..s.len() {
            for eps in balls.candidate_radii(x) {
                let outer = balls.ball(x, eps).unwrap();
                prop_assert!(outer.contains(&x));
                for &y in &outer {
                    let delta = basis_delta(&s, x, y, eps);
                    prop_assert!(delta > Rational::from_integer(0));
                    let inner = balls.ball(y, delta).unwrap();
                    prop_assert!(inner.iter().all(|z| outer.contains(z)));
                }
            }
        }
    }

    #[test]
    fn m_open_within_induced(cfg in config()) {
        let s = gen_m_metric::<Rational>(&cfg).unwrap();
        let rel = compare(&s, BallFamily::MOpen, BallFamily::InducedP).unwrap();
        prop_assert!(matches!(rel.relation, Relation::Equal | Relation::LeftStrictlyCoarser));
        prop_assert!(rel.only_left.is_empty());
        let t = common::table(&s);
        let oracle = common::topology(Excess::InducedP, &t);
        let ours: std::collections::BTreeSet<u32> =
            generate_topology(&s, BallFamily::InducedP).unwrap().masks().iter().copied().collect();
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn partial_metric_topologies_agree(cfg in config()) {
        let p = gen_partial_metric::<Rational>(&cfg).unwrap();
        let rel = compare(&p, BallFamily::MOpen, BallFamily::StandardP).unwrap();
        prop_assert_eq!(rel.relation, Relation::Equal);
    }

    #[test]
    fn m_open_is_t0(cfg in config()) {
        let s = gen_m_metric::<Rational>(&cfg).unwrap();
        prop_assert_ne!(separation(&s, BallFamily::MOpen).unwrap(), Separation::NotT0);
        let t = common::table(&s);
        prop_assert!(common::is_t0(s.len(), &common::topology(Excess::MOpen, &t)));
    }
}
