//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mmetric::corpus::{self, EntryKind, Payload};
use mmetric::spacegen::{gen_m_metric, gen_partial_metric, GenConfig};
use mmetric::topology::{basis_delta, compare, generate_topology, BallFamily, Relation, Separation};
use mmetric::{
    banach, cauchy_analyze, check_c_r, check_phi_r, classify, induce_partial, kannan, sigma_star,
    solve, special_limits, Axiom, Branch, CauchyStatus, Class, Error, FiniteSpace, MapSystem, Phi,
    Rational, SequencePrefix, Space,
};

use common::Excess;

const E2A_BUDGET: Duration = Duration::from_millis(1);
const INDUCED_BUDGET: Duration = Duration::from_secs(10);
const BANACH_BUDGET: Duration = Duration::from_millis(100);
const TABLE_TOL: f64 = 1e-9;
const CENTRAL_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-9;
const ORBIT_LEN: usize = 64;
const WINDOW: usize = 16;
const MAX_ITER: usize = 10_000;
const SOLVER_TOL: f64 = 1e-9;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn zero() -> Rational {
    q(0)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn rational_config(n: usize, seed: u64) -> GenConfig {
    GenConfig::new(n, seed)
}

fn e2a_reproduction() -> Outcome {
    let expected = FiniteSpace::new(
        vec!["a".into(), "b".into()],
        vec![vec![q(1), q(1)], vec![q(1), q(2)]],
    )
    .map_err(err)?;
    let stored = corpus::get_exact("e2a").map_err(err)?;
    let stored = stored.finite_space().ok_or("e2a has no table")?;
    ensure(common::table(stored) == common::table(&expected), || "corpus e2a differs from the worked example".into())?;

    let start = Instant::now();
    let class = classify(&expected, zero()).map_err(err)?.class;
    let star = sigma_star(&expected).map_err(err)?;
    let report = classify(&star, zero()).map_err(err)?;
    let elapsed = start.elapsed();

    ensure(class == Class::MMetric, || format!("class {class}"))?;
    ensure(common::is_m_metric(&common::table(&expected), zero()), || "oracle rejects e2a".into())?;
    ensure(report.class != Class::Metric, || "sigma* classified as metric".into())?;
    let w = report
        .result(Axiom::SigmaSep)
        .witness()
        .ok_or("no separation witness on sigma*")?;
    ensure(w.points == ["a", "b"], || format!("witness points {:?}", w.points))?;
    ensure(w.value("sigma(x,y)") == Some(zero()), || format!("witness {w}"))?;
    ensure(star.get(0, 1) == expected.get(0, 1) - q(1), || "sigma*(a,b) != 1 - 1".into())?;
    ensure(elapsed < E2A_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("sigma*(a,b) = 0 with a != b, {elapsed:?}"))
}

fn e2b_reproduction() -> Outcome {
    let entry = corpus::get_exact("e2b").map_err(err)?;
    let Payload::Sequence { space, terms } = &entry.payload else {
        return Err("e2b is not a sequence".into());
    };
    ensure(terms.len() == ORBIT_LEN, || format!("prefix length {}", terms.len()))?;
    let a = space.index_of("a").map_err(err)?;
    let b = space.index_of("b").map_err(err)?;
    ensure((space.get(a, a), space.get(a, b), space.get(b, b)) == (q(0), q(0), q(1)), || {
        "e2b table differs from the worked example".into()
    })?;
    let alternating = terms.windows(2).all(|w| w[0] != w[1]);
    ensure(alternating, || "terms do not alternate".into())?;

    let seq = SequencePrefix::new(space, terms.clone()).map_err(err)?;
    let v = cauchy_analyze(&seq, WINDOW, zero()).map_err(err)?;
    ensure(v.status == CauchyStatus::NotCauchy, || format!("status {:?}", v.status))?;
    let d = &v.diagnostics;
    ensure(d.consecutive.iter().all(|&c| c == zero()), || format!("consecutive {:?}", d.consecutive))?;
    let diag: BTreeSet<Rational> = d.diagonal.iter().copied().collect();
    ensure(diag == BTreeSet::from([q(0), q(1)]), || format!("diagonal {:?}", d.diagonal))?;
    ensure(d.diagonal.windows(2).all(|w| w[0] != w[1]), || "diagonal does not oscillate".into())?;
    Ok("consecutive tail 0, diagonal oscillates over {0, 1}".into())
}

fn sumline_p_lbnd() -> Outcome {
    let pts = [-1i64, 0, 1, 2];
    let entry = corpus::get_exact("sumline:-1,0,1,2").map_err(err)?;
    let space = entry.finite_space().ok_or("no table")?;
    let t = common::table(space);
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            ensure(t[i][j] == q(x + y), || format!("sigma({x},{y}) = {}", t[i][j]))?;
        }
    }
    let report = classify(space, zero()).map_err(err)?;
    ensure(report.class == Class::MMetric, || format!("class {}", report.class))?;

    let expected = pts.iter().flat_map(|&x| pts.iter().map(move |&y| (x, y))).filter(|&(x, y)| 2 * x > x + y).count();
    let (w, count) = match report.result(Axiom::PLbnd) {
        mmetric::AxiomResult::Fail { witness, violations } => (witness.clone(), *violations),
        mmetric::AxiomResult::Pass => return Err("p-lbnd passed".into()),
    };
    ensure(count == expected, || format!("{count} violations, oracle {expected}"))?;
    let sxx = w.value("sigma(x,x)").ok_or("no sigma(x,x) in witness")?;
    let sxy = w.value("sigma(x,y)").ok_or("no sigma(x,y) in witness")?;
    ensure(sxx > sxy, || format!("witness {w} is not a violation"))?;
    let mut triples = 0;
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..4 {
                let m = |a: usize, b: usize| t[a][a].min(t[b][b]);
                let ok = t[x][y] - m(x, y) <= t[x][z] - m(x, z) + t[z][y] - m(z, y);
                ensure(ok, || format!("sigma-inq fails at ({x},{y},{z})"))?;
                triples += 1;
            }
        }
    }
    Ok(format!("witness {w}, {count} violations, {triples} triples checked"))
}

fn induced_partial_suite() -> Outcome {
    let start = Instant::now();
    for seed in 0..1000u64 {
        let n = 1 + (seed % 6) as usize;
        let s = gen_m_metric::<f64>(&GenConfig::new(n, seed)).map_err(err)?;
        let p = induce_partial(&s).map_err(err)?;
        let class = classify(&p, TABLE_TOL).map_err(err)?.class;
        ensure(class.at_least(Class::PartialMetric), || format!("seed {seed}: {class}"))?;
        ensure(common::is_partial_metric(&common::table(&p), TABLE_TOL), || {
            format!("seed {seed}: oracle rejects induced table")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < INDUCED_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("1000 spaces, {elapsed:?}"))
}

fn sigma_star_suite() -> Outcome {
    for seed in 0..500u64 {
        let n = 1 + (seed % 6) as usize;
        let p = gen_partial_metric::<f64>(&GenConfig::new(n, seed)).map_err(err)?;
        ensure(common::is_partial_metric(&common::table(&p), TABLE_TOL), || {
            format!("seed {seed}: generator produced a non-partial metric")
        })?;
        let star = sigma_star(&p).map_err(err)?;
        let class = classify(&star, TABLE_TOL).map_err(err)?.class;
        ensure(class == Class::Metric, || format!("seed {seed}: {class}"))?;
        ensure(common::is_metric(&common::table(&star), TABLE_TOL), || {
            format!("seed {seed}: oracle rejects sigma*")
        })?;
    }
    Ok("500 spaces".into())
}

fn masks(space: &FiniteSpace<Rational>, fam: BallFamily) -> std::result::Result<BTreeSet<u32>, String> {
    Ok(generate_topology(space, fam).map_err(err)?.masks().iter().copied().collect())
}

fn sumline_topologies() -> Outcome {
    let entry = corpus::get_exact("sumline:0,1,2,3").map_err(err)?;
    let space = entry.finite_space().ok_or("no table")?;
    let c = compare(space, BallFamily::MOpen, BallFamily::InducedP).map_err(err)?;
    ensure(c.relation == Relation::LeftStrictlyCoarser, || format!("relation {}", c.relation))?;
    ensure(c.only_left.is_empty(), || format!("only_left {:?}", c.only_left))?;
    let witness = c.only_right.first().ok_or("no strictness witness")?;

    let t = common::table(space);
    let left = common::topology(Excess::MOpen, &t);
    let right = common::topology(Excess::InducedP, &t);
    ensure(left.is_subset(&right) && left != right, || "oracle disagrees".into())?;
    let mask = witness
        .iter()
        .map(|l| space.index_of(l).map(|i| 1u32 << i))
        .sum::<mmetric::Result<u32>>()
        .map_err(err)?;
    ensure(right.contains(&mask) && !left.contains(&mask), || {
        format!("witness {witness:?} is not open only on the right")
    })?;
    Ok(format!("witness {{{}}} open in the induced topology only", witness.join(", ")))
}

fn topology_suites() -> Outcome {
    for seed in 0..500u64 {
        let n = 1 + (seed % 5) as usize;
        let s = gen_m_metric::<Rational>(&rational_config(n, seed)).map_err(err)?;
        let t = common::table(&s);
        let left = masks(&s, BallFamily::MOpen)?;
        let right = masks(&s, BallFamily::InducedP)?;
        ensure(left == common::topology(Excess::MOpen, &t), || format!("seed {seed}: m_open differs from oracle"))?;
        ensure(right == common::topology(Excess::InducedP, &t), || format!("seed {seed}: induced_p differs from oracle"))?;
        ensure(left.is_subset(&right), || format!("seed {seed}: m_open not within induced_p"))?;
        let rel = compare(&s, BallFamily::MOpen, BallFamily::InducedP).map_err(err)?.relation;
        ensure(matches!(rel, Relation::Equal | Relation::LeftStrictlyCoarser), || format!("seed {seed}: {rel}"))?;
        let sep = generate_topology(&s, BallFamily::MOpen).map_err(err)?.separation();
        ensure(sep != Separation::NotT0 && common::is_t0(n, &left), || format!("seed {seed}: not T0"))?;
    }
    for seed in 0..500u64 {
        let n = 1 + (seed % 5) as usize;
        let p = gen_partial_metric::<Rational>(&rational_config(n, seed)).map_err(err)?;
        let t = common::table(&p);
        let sigma = masks(&p, BallFamily::MOpen)?;
        let standard = masks(&p, BallFamily::StandardP)?;
        ensure(standard == common::topology(Excess::StandardP, &t), || format!("seed {seed}: standard_p differs from oracle"))?;
        ensure(sigma == standard, || format!("seed {seed}: m_open != standard_p"))?;
        let rel = compare(&p, BallFamily::MOpen, BallFamily::StandardP).map_err(err)?.relation;
        ensure(rel == Relation::Equal, || format!("seed {seed}: {rel}"))?;
        for fam in [BallFamily::MOpen, BallFamily::StandardP, BallFamily::InducedP] {
            let sep = generate_topology(&p, fam).map_err(err)?.separation();
            ensure(sep != Separation::NotT0, || format!("seed {seed}: {fam} not T0"))?;
        }
    }
    Ok("500 M-metric and 500 partial-metric spaces".into())
}

fn basis_suite() -> Outcome {
    let mut triples = 0usize;
    for seed in 0..200u64 {
        let n = 1 + (seed % 6) as usize;
        let s = gen_m_metric::<Rational>(&rational_config(n, seed)).map_err(err)?;
        let t = common::table(&s);
        let e = |x: usize, y: usize| common::excess(Excess::MOpen, &t, x, y);
        let ball = |x: usize, eps: Rational| (0..n).filter(|&y| e(x, y) < eps).collect::<BTreeSet<_>>();
        for x in 0..n {
            let mut radii: BTreeSet<Rational> = (0..n).map(|y| e(x, y)).filter(|&v| v > zero()).collect();
            let above: Vec<Rational> = radii.iter().map(|&v| v + q(1) / q(2)).collect();
            radii.extend(above);
            radii.insert(q(1) / q(1024));
            for eps in radii {
                let outer = ball(x, eps);
                for &y in &outer {
                    let delta = basis_delta(&s, x, y, eps);
                    ensure(delta > zero(), || format!("seed {seed}: delta {delta} at ({x},{y},{eps})"))?;
                    ensure(ball(y, delta).is_subset(&outer), || {
                        format!("seed {seed}: ball({y}, {delta}) escapes ball({x}, {eps})")
                    })?;
                    triples += 1;
                }
            }
        }
    }
    Ok(format!("200 spaces, {triples} (x, eps, y) triples"))
}

fn map_entries() -> Vec<&'static str> {
    corpus::NAMES
        .iter()
        .copied()
        .filter(|n| corpus::get(n).map(|e| e.kind == EntryKind::MapSystem).unwrap_or(false))
        .collect()
}

fn certified_r<Sp: Space<f64>>(sys: &MapSystem<f64, Sp>) -> std::result::Result<Vec<(String, f64)>, String> {
    let mut found = Vec::new();
    for r in [0.0, 1.0] {
        for c in [0.5, 0.75, 0.9] {
            if check_c_r(sys, c, r, ORBIT_LEN, SOLVER_TOL).map_err(err)?.holds() {
                found.push((format!("c_r(c={c}, r={r})"), r));
            }
            let phi = Phi::Linear { slope: 1.0 - c };
            if check_phi_r(sys, &phi, r, ORBIT_LEN, SOLVER_TOL).map_err(err)?.holds() {
                found.push((format!("phi_r(linear {}, r={r})", 1.0 - c), r));
            }
        }
    }
    Ok(found)
}

fn central_distance<Sp: Space<f64>>(sys: &MapSystem<f64, Sp>) -> std::result::Result<Option<f64>, String> {
    let orbit = sys.orbit(ORBIT_LEN).map_err(err)?;
    let seq = SequencePrefix::new(sys.space(), orbit).map_err(err)?;
    Ok(cauchy_analyze(&seq, WINDOW, SOLVER_TOL).map_err(err)?.central_distance())
}

fn certified_orbits_converge() -> Outcome {
    let mut certified = Vec::new();
    for name in map_entries() {
        let entry = corpus::get(name).map_err(err)?;
        let (certs, r_hat) = match &entry.payload {
            Payload::FiniteMap(sys) => (certified_r(sys)?, central_distance(sys)?),
            Payload::FunctionalMap(sys) => (certified_r(sys)?, central_distance(sys)?),
            _ => continue,
        };
        if certs.is_empty() {
            continue;
        }
        let r_hat = r_hat.ok_or_else(|| format!("{name}: certified but orbit not r-Cauchy"))?;
        for (cert, r) in &certs {
            ensure((r_hat - r).abs() <= CENTRAL_TOL, || format!("{name}: {cert} but r_hat = {r_hat}"))?;
        }
        certified.push(name);
    }
    ensure(certified.len() >= 4, || format!("only {certified:?} certified"))?;
    ensure(!certified.contains(&"e2b_swap"), || "oscillating swap certified".into())?;
    Ok(format!("certified: {}", certified.join(", ")))
}

fn functional(name: &str) -> std::result::Result<mmetric::FunctionalMap64, String> {
    match corpus::get(name).map_err(err)?.payload {
        Payload::FunctionalMap(sys) => Ok(sys),
        _ => Err(format!("{name} is not a functional map system")),
    }
}

fn banach_halving() -> Outcome {
    let sys = functional("halving")?;
    let start = Instant::now();
    let res = banach(&sys, 0.5, MAX_ITER, SOLVER_TOL).map_err(err)?;
    let elapsed = start.elapsed();
    let point = res.point.ok_or_else(|| format!("no point: {:?}", res.failure))?;
    ensure(point == 0.0, || format!("point {point}"))?;
    let residual = res.residual.ok_or("no residual")?;
    ensure(residual <= RESIDUAL_TOL, || format!("residual {residual}"))?;
    let u = res.uniqueness.as_ref().ok_or("no uniqueness scan")?;
    ensure(u.starts == 64 && u.unique, || format!("uniqueness {u:?}"))?;
    ensure(u.fixed_points == [res.point_label.clone().unwrap_or_default()], || format!("scan found {:?}", u.fixed_points))?;
    ensure(elapsed < BANACH_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("point 0, residual {residual}, 64 starts agree, {elapsed:?}"))
}

fn kannan_quartering() -> Outcome {
    let sys = functional("quartering")?;
    let res = kannan(&sys, 0.25, MAX_ITER, SOLVER_TOL).map_err(err)?;
    ensure(res.point == Some(0.0), || format!("point {:?}, {:?}", res.point, res.failure))?;

    let halving = functional("halving")?;
    let k = 0.2;
    let space = halving.space();
    let s = |x: f64, y: f64| space.sigma(&x, &y);
    let f = |x: f64| halving.apply(&x);
    let (x, y) = (1.0, 0.0);
    let lhs = s(f(x), f(y));
    let rhs = k * (s(x, f(x)) + s(y, f(y)));
    ensure(lhs > rhs, || "oracle finds no violation at (1, 0)".into())?;
    match kannan(&halving, k, MAX_ITER, SOLVER_TOL) {
        Err(Error::Precondition { x: wx, y: wy, lhs: wl, rhs: wr, .. }) => {
            ensure(wx == "1" && wy == "0", || format!("witness ({wx}, {wy})"))?;
            ensure(wl.parse::<f64>() == Ok(lhs) && wr.parse::<f64>() == Ok(rhs), || {
                format!("witness values {wl} > {wr}, oracle {lhs} > {rhs}")
            })?;
            Ok(format!("point 0; x/2 at k = 0.2 rejected at (1, 0): {wl} > {wr}"))
        }
        Err(e) => Err(format!("unexpected error {e}")),
        Ok(_) => Err("precondition accepted".into()),
    }
}

/// Every special limit of the tail, by definition.
fn oracle_special_limits(t: &[Vec<Rational>], terms: &[usize]) -> Option<BTreeSet<usize>> {
    let tail = &terms[terms.len() - 2 * WINDOW..];
    let r = t[tail[0]][tail[0]];
    if !tail.iter().all(|&i| tail.iter().all(|&j| t[i][j] == r)) {
        return None;
    }
    let m = |a: usize, b: usize| t[a][a].min(t[b][b]);
    Some(
        (0..t.len())
            .filter(|&a| t[a][a] == r)
            .filter(|&a| tail.iter().all(|&x| t[a][x] + t[x][x] - m(a, x) == t[a][a]))
            .collect(),
    )
}

fn special_limit_uniqueness() -> Outcome {
    let mut spaces = Vec::new();
    for name in corpus::NAMES.iter().copied().chain(["sumline:-1,0,1,2"]) {
        if let Ok(entry) = corpus::get_exact(name) {
            if let Some(s) = entry.finite_space() {
                if !spaces.iter().any(|(_, t): &(String, FiniteSpace<Rational>)| common::table(t) == common::table(s)) {
                    spaces.push((name.to_string(), s.clone()));
                }
            }
        }
    }
    let (mut sequences, mut with_limit) = (0usize, 0usize);
    for (name, space) in &spaces {
        let n = space.len();
        let t = common::table(space);
        for code in 0..n.pow(n as u32) {
            let image: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
            for x0 in 0..n {
                let terms: Vec<usize> = std::iter::successors(Some(x0), |&x| Some(image[x])).take(ORBIT_LEN).collect();
                let seq = SequencePrefix::new(space, terms.clone()).map_err(err)?;
                let verdict = cauchy_analyze(&seq, WINDOW, zero()).map_err(err)?;
                let oracle = oracle_special_limits(&t, &terms);
                sequences += 1;
                let Some(expected) = oracle else {
                    ensure(!verdict.is_r_cauchy(), || format!("{name} {image:?} from {x0}: r-Cauchy only per library"))?;
                    continue;
                };
                ensure(verdict.is_r_cauchy(), || format!("{name} {image:?} from {x0}: missed r-Cauchy"))?;
                let found: BTreeSet<usize> = special_limits(&seq, &verdict, zero()).map_err(err)?.into_iter().collect();
                ensure(found == expected, || format!("{name} {image:?} from {x0}: {found:?} vs oracle {expected:?}"))?;
                ensure(found.len() <= 1, || format!("{name} {image:?} from {x0}: {} special limits", found.len()))?;
                with_limit += found.len();
            }
        }
    }
    ensure(with_limit > 0, || "no special limit found anywhere".into())?;
    Ok(format!("{} spaces, {sequences} orbits, {with_limit} with exactly one special limit", spaces.len()))
}

fn no_fabrication() -> Outcome {
    let entry = corpus::get_exact("e2b_swap").map_err(err)?;
    let Payload::FiniteMap(sys) = &entry.payload else {
        return Err("e2b_swap is not a finite map system".into());
    };
    let res = solve(sys, MAX_ITER, zero(), None).map_err(err)?;
    ensure(res.branch == Branch::None && res.point.is_none(), || format!("branch {}", res.branch))?;
    let why = res.failure.unwrap_or_default();
    ensure(why.contains("orbit not r-Cauchy"), || format!("failure `{why}`"))?;
    Ok(format!("branch none, `{why}`"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("sigma* counterexample, exact", e2a_reproduction),
        ("alternating sequence not Cauchy", e2b_reproduction),
        ("sumline M-metric without p-lbnd", sumline_p_lbnd),
        ("induced partial metric, 1000 seeds", induced_partial_suite),
        ("sigma* of partial metrics, 500 seeds", sigma_star_suite),
        ("sumline topologies strictly nested", sumline_topologies),
        ("topology inclusion, equality, T0", topology_suites),
        ("M-open balls form a basis", basis_suite),
        ("certified orbits are r-Cauchy", certified_orbits_converge),
        ("banach on halving", banach_halving),
        ("kannan on quartering and precondition", kannan_quartering),
        ("special limit uniqueness", special_limit_uniqueness),
        ("no fixed point fabricated", no_fabrication),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {title}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
