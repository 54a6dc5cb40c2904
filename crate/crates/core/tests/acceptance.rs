//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pointdiv::bounds::{kappa, lambda, mu, mu_j, BoundsReport, DegreeProfile};
use pointdiv::counting::{count_affine_naive, q_adic_order, Budget, CountKind, Counter};
use pointdiv::field::make_field;
use pointdiv::harness::fuzz::instance_rng;
use pointdiv::harness::{
    fuzz_campaign, generate_system, parse_spec, run_experiment_with, Check, EquationCount, ExperimentSpec, FuzzConfig,
    FuzzGrid, RunOptions, Status, Witness,
};
use pointdiv::poly::{Mode, MultiPoly, PolySystem};
use pointdiv::zeta::{reconstruct, reconstruct_table, verify_theorem, IntPolyT, ReconstructionStatus, ZetaFunction};
use pointdiv::CountTable;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------- criterion 1: bounds against a rational oracle ----------

/// Least m >= 0 with m >= x.
fn least_int_at_least(x: Ratio<i64>) -> i64 {
    let mut m = 0i64;
    while Ratio::from_integer(m) < x {
        m += 1;
    }
    m
}

/// Greatest m >= 0 with m <= x, or 0 when x < 0.
fn greatest_int_at_most(x: Ratio<i64>) -> i64 {
    if x < Ratio::from_integer(0) {
        return 0;
    }
    let mut m = 0i64;
    while Ratio::from_integer(m + 1) <= x {
        m += 1;
    }
    m
}

fn oracle_mu(n: i64, d: &[i64]) -> i64 {
    let s: i64 = d.iter().sum();
    least_int_at_least(Ratio::new(n - s, *d.iter().max().unwrap()))
}

fn oracle_lambda(n: i64, d: &[i64]) -> i64 {
    let s: i64 = d.iter().sum();
    least_int_at_least(Ratio::new(n - s, s))
}

fn oracle_kappa(n: i64, d: &[i64]) -> i64 {
    let mut sorted = d.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let rest: i64 = sorted[1..].iter().sum();
    greatest_int_at_most(Ratio::new(n - rest, sorted[0]))
}

fn degree_tuples(max_len: usize, max_d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for t in &layer {
            for d in 1..=max_d {
                let mut u = t.clone();
                u.push(d);
                next.push(u);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn sub_multisets(d: &[u32]) -> Vec<Vec<u32>> {
    (1u32..(1 << d.len()))
        .map(|mask| d.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x).collect())
        .collect()
}

fn criterion_1() -> Outcome {
    let tuples = degree_tuples(4, 8);
    let mut cases = 0u64;
    for n in 1..=30u32 {
        for d in &tuples {
            let p = DegreeProfile::new(n, d.clone()).unwrap();
            let di: Vec<i64> = d.iter().map(|&x| x as i64).collect();
            let n64 = n as i64;
            let m = mu(&p) as i64;
            ensure(m == oracle_mu(n64, &di), || format!("mu({n}; {d:?})"))?;
            ensure(lambda(&p) as i64 == oracle_lambda(n64, &di), || format!("lambda({n}; {d:?})"))?;
            ensure(kappa(&p) as i64 == oracle_kappa(n64, &di), || format!("kappa({n}; {d:?})"))?;
            let next = DegreeProfile::new(n + 1, d.clone()).unwrap();
            ensure(kappa(&p) == mu(&next), || format!("kappa({n}) != mu({}) for {d:?}", n + 1))?;
            ensure(mu(&next) >= mu(&p), || format!("mu not monotone in n at {n}, {d:?}"))?;
            ensure(lambda(&p) <= mu(&p), || format!("lambda > mu at {n}, {d:?}"))?;
            let mut prev = None;
            for j in 0..=n {
                let v = mu_j(&p, j).unwrap() as i64;
                let expect = j as i64 + if j == n { 0 } else { oracle_mu(n64 - j as i64, &di) };
                ensure(v == expect, || format!("mu_{j}({n}; {d:?}) = {v}, oracle {expect}"))?;
                if let Some(pv) = prev {
                    ensure(v >= pv, || format!("mu_j decreases at j = {j}, n = {n}, {d:?}"))?;
                }
                prev = Some(v);
                cases += 1;
            }
            ensure(mu_j(&p, n + 1).is_err(), || "j > n accepted".into())?;
            ensure(mu_j(&p, 0).unwrap() == mu(&p), || "mu_0 != mu".into())?;
            let mu_prev = if n == 1 { 0 } else { oracle_mu(n64 - 1, &di) };
            let mu1 = mu_j(&p, 1).unwrap() as i64;
            ensure(mu1 == mu_prev + 1 && mu1 >= m, || format!("mu_1 relation at {n}, {d:?}"))?;
            for sub in sub_multisets(d) {
                let ps = DegreeProfile::new(n, sub.clone()).unwrap();
                ensure(mu(&ps) >= mu(&p), || format!("dropping to {sub:?} lowers mu at n = {n}, {d:?}"))?;
            }
            let r = BoundsReport::compute(&p);
            ensure(r.mu == mu(&p) && r.kappa == kappa(&p) && r.mu_j.len() == n as usize + 1, || "report".into())?;
        }
    }
    Ok(format!("{} profiles, {cases} mu_j values", 30 * tuples.len()))
}

// ---------- criterion 2: the ternary quadric ----------

fn quadric_system(p: u64, mode: Mode) -> PolySystem {
    let f = make_field(p, 1).unwrap();
    let one = f.one();
    let q = MultiPoly::from_terms(
        &f,
        3,
        vec![(vec![2, 0, 0], one.clone()), (vec![0, 2, 0], one.clone()), (vec![0, 0, 2], one)],
    )
    .unwrap();
    PolySystem::new(vec![q], vec![vec![1]], mode).unwrap()
}

fn criterion_2() -> Outcome {
    let sys = quadric_system(3, Mode::Affine);
    let naive = count_affine_naive(&sys, 1).map_err(|e| e.to_string())?;
    let fast = Counter::new(Budget::default(), 1).count_affine(&sys, 1).map_err(|e| e.to_string())?;
    ensure(naive == BigUint::from(9u32) && fast == naive, || format!("naive {naive}, fast {fast}"))?;
    let m = mu(&DegreeProfile::new(3, vec![2]).unwrap());
    ensure(m == 1, || format!("mu = {m}"))?;
    let order = q_adic_order(&naive, &BigUint::from(3u32));
    ensure(order.is_some_and(|o| o >= m as u64), || format!("ord_3 = {order:?}"))?;
    Ok(format!("9 zeros, ord_3 = {}, mu = {m}", order.unwrap()))
}

// ---------- criteria 3-5: fuzz campaigns ----------

fn has_zero_column(sys: &PolySystem) -> bool {
    (0..sys.num_equations()).any(|j| sys.equation_is_constant(j))
}

fn has_repeated_factor(sys: &PolySystem) -> bool {
    let p = sys.polys();
    (0..p.len()).any(|i| (i + 1..p.len()).any(|k| p[i] == p[k]))
}

fn criterion_3() -> Outcome {
    let mut cfg = FuzzConfig::new(20_240_601, 200);
    let s = fuzz_campaign(&cfg);
    ensure(s.instances_run == 200, || format!("halted after {} instances: {:?}", s.instances_run, s.first_failure))?;
    ensure(s.errors == 0, || format!("{} instances errored", s.errors))?;
    ensure(s.divisibility_checks == 400, || format!("{} divisibility checks", s.divisibility_checks))?;
    ensure(s.divisibility_failures == 0 && s.identity_failures == 0, || format!("{:?}", s.first_failure))?;

    // grid coverage and an independent count on the small instances
    let (mut zero_cols, mut repeated, mut cross) = (0, 0, 0);
    for i in 0..200 {
        let sys = generate_system(&mut instance_rng(cfg.seed, i), &cfg.grid, Mode::Affine, EquationCount::Any);
        zero_cols += usize::from(has_zero_column(&sys));
        repeated += usize::from(has_repeated_factor(&sys));
        let q = sys.field().order_u64().unwrap();
        for nu in [1u32, 2] {
            if q.pow(nu * sys.n_vars() as u32) <= 5000 {
                let naive = count_affine_naive(&sys, nu).map_err(|e| e.to_string())?;
                ensure(naive.to_string() == s.instances[i].counts[nu as usize - 1], || format!("instance {i} count"))?;
                cross += 1;
            }
        }
    }
    ensure(zero_cols > 0 && repeated > 0, || format!("grid coverage: {zero_cols} zero columns, {repeated} repeats"))?;

    cfg.mutate = true;
    let m = fuzz_campaign(&cfg);
    ensure(m.divisibility_failures > 0, || "mutation run found no failures".into())?;
    ensure(m.identity_failures == 0, || "identity failure in mutation run".into())?;
    Ok(format!(
        "200 instances, 0/400 failures ({zero_cols} with zero columns, {repeated} with repeated factors, \
         {cross} counts cross-checked); mutation: {}/{} failures",
        m.divisibility_failures, m.divisibility_checks
    ))
}

fn criterion_4() -> Outcome {
    let mut cfg = FuzzConfig::new(4_044, 100);
    cfg.mode = Mode::Projective;
    let s = fuzz_campaign(&cfg);
    ensure(s.instances_run == 100 && s.errors == 0, || format!("{} run, {} errors", s.instances_run, s.errors))?;
    ensure(s.divisibility_failures == 0, || format!("{:?}", s.first_failure))?;
    ensure(s.identity_checks == 200 && s.identity_failures == 0, || format!("cone: {:?}", s.first_failure))?;
    ensure(s.instances.iter().all(|r| r.identity == Some(Check::Cone)), || "identity kind".into())?;
    Ok(format!("100 homogeneous systems, {} complement counts divisible, cone identity on all", s.divisibility_checks))
}

fn criterion_5() -> Outcome {
    let mut cfg = FuzzConfig::new(5_055, 50);
    cfg.equations = EquationCount::Single;
    let ex = fuzz_campaign(&cfg);
    cfg.equations = EquationCount::Several;
    cfg.seed = 5_056;
    let ie = fuzz_campaign(&cfg);
    for (name, s, kind) in [("excision", &ex, Check::Excision), ("inclusion-exclusion", &ie, Check::InclusionExclusion)]
    {
        ensure(s.instances_run == 50 && s.errors == 0, || {
            format!("{name}: {} run, {} errors", s.instances_run, s.errors)
        })?;
        ensure(s.instances.iter().all(|r| r.identity == Some(kind)), || format!("{name}: wrong identity"))?;
        ensure(s.identity_checks == 100 && s.identity_failures == 0, || format!("{name}: {:?}", s.first_failure))?;
    }
    Ok("excision 50/50, inclusion-exclusion 50/50 instances (nu = 1, 2)".into())
}

// ---------- criterion 6: zeta pipeline ----------

fn int_poly(c: &[i64]) -> IntPolyT {
    IntPolyT::from_i64(c).unwrap()
}

fn table_of(sys: &PolySystem, kind: CountKind, nu_max: u32) -> Result<CountTable, String> {
    let counter = Counter::new(Budget::default(), 1);
    let q = sys.field().order();
    let mut t = CountTable::new(q.clone(), kind);
    for nu in 1..=nu_max {
        let x = counter.count_affine(sys, nu).map_err(|e| e.to_string())?;
        let v = match kind {
            CountKind::AffineX => x,
            _ => q.pow(nu * sys.n_vars() as u32) - x,
        };
        t.counts.insert(nu, v);
    }
    Ok(t)
}

fn criterion_6() -> Outcome {
    for (p, k) in [(2u64, 1usize), (3, 1), (2, 2), (5, 1)] {
        let f = make_field(p, k).unwrap();
        let q = f.order_u64().unwrap() as i64;
        // (a) A^1 as the hyperplane x_2 = 0 in A^2
        let line = MultiPoly::variable(&f, 2, 1);
        let sys = PolySystem::new(vec![line], vec![vec![1]], Mode::Affine).unwrap();
        let out = reconstruct_table(&table_of(&sys, CountKind::AffineX, 5)?, 2).map_err(|e| e.to_string())?;
        let want = ZetaFunction::new(IntPolyT::one(), int_poly(&[1, -q]));
        ensure(out.status == ReconstructionStatus::Stabilized && out.zeta == Some(want), || format!("(a) q = {q}"))?;
        // (b) A^1 minus the origin
        let x = MultiPoly::variable(&f, 1, 0);
        let sys = PolySystem::new(vec![x], vec![vec![1]], Mode::Affine).unwrap();
        let out = reconstruct_table(&table_of(&sys, CountKind::AffineComplement, 6)?, 2).map_err(|e| e.to_string())?;
        let want = ZetaFunction::new(int_poly(&[1, -1]), int_poly(&[1, -q]));
        ensure(out.status == ReconstructionStatus::Stabilized && out.zeta == Some(want), || format!("(b) q = {q}"))?;
    }

    // (c) the full pipeline on real counts
    let spec = ExperimentSpec::from_system(&quadric_system(3, Mode::Affine), 6, 2, 400_000_000, vec![Check::Zeta]);
    let start = Instant::now();
    let report = run_experiment_with(&spec, &RunOptions::default());
    let elapsed = start.elapsed();
    let v = report
        .verdicts
        .iter()
        .find(|v| v.check == Check::Zeta && v.subject == Some(CountKind::AffineComplement))
        .ok_or("no zeta verdict")?;
    let rec = report.zeta.iter().find(|z| z.subject == CountKind::AffineComplement).ok_or("no zeta record")?;
    let outcome = rec.outcome.as_ref().ok_or("no outcome")?;
    ensure(outcome.status == ReconstructionStatus::Stabilized && outcome.guard_terms_checked == 2, || {
        format!("(c) {:?}", outcome)
    })?;
    let want = ZetaFunction::new(int_poly(&[1, -9]), int_poly(&[1, -27]));
    match &v.witness {
        Some(Witness::Zeta { zeta, numerator_order, denominator_order, mu, .. }) => {
            ensure(*zeta == want, || format!("(c) got {zeta}"))?;
            ensure((*numerator_order, *denominator_order) == (Some(2), Some(3)), || "(c) orders".into())?;
            ensure(*mu == 1 && v.status == Status::Pass, || "(c) verdict".into())?;
        }
        other => return Err(format!("(c) witness {other:?}")),
    }
    let counts: Vec<String> =
        report.table(CountKind::AffineX).unwrap().counts.values().map(|c| c.to_string()).collect();
    let expected: Vec<String> = (1..=6u32).map(|v| (BigInt::from(9).pow(v)).to_string()).collect();
    ensure(counts == expected, || format!("(c) counts {counts:?}"))?;
    ensure(elapsed < Duration::from_secs(30), || format!("(c) took {elapsed:?}"))?;
    Ok(format!("(a), (b) for q in 2..5; (c) (1 - 9T)/(1 - 27T), orders (2, 3), pass in {:.1?}", elapsed))
}

// ---------- criterion 7: synthetic eigenvalues ----------

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7_777);
    for case in 0..50 {
        let size = rng.gen_range(0..=4);
        let eigs: Vec<(i64, i64)> = (0..size)
            .map(|_| {
                let a = rng.gen_range(1..=100i64) * if rng.gen_bool(0.2) { -1 } else { 1 };
                (a, if rng.gen_bool(0.5) { 1 } else { -1 })
            })
            .collect();
        let seq: Vec<BigInt> =
            (1..=10u32).map(|v| eigs.iter().map(|&(a, s)| BigInt::from(s) * BigInt::from(a).pow(v)).sum()).collect();
        let mut net: BTreeMap<i64, i64> = BTreeMap::new();
        for &(a, s) in &eigs {
            *net.entry(a).or_default() += s;
        }
        // independent expansion of Π (1 - aT)^{±1} after cancellation
        let mut num = vec![BigInt::from(1)];
        let mut den = vec![BigInt::from(1)];
        for (&a, &m) in &net {
            let target = if m < 0 { &mut num } else { &mut den };
            for _ in 0..m.unsigned_abs() {
                let mut next = vec![BigInt::from(0); target.len() + 1];
                for (i, c) in target.iter().enumerate() {
                    next[i] += c;
                    next[i + 1] -= c * a;
                }
                *target = next;
            }
        }
        let want = ZetaFunction::new(IntPolyT::new(num).unwrap(), IntPolyT::new(den).unwrap());
        let out = reconstruct(&seq, 2).map_err(|e| format!("case {case}: {e}"))?;
        ensure(out.status == ReconstructionStatus::Stabilized, || format!("case {case}: {eigs:?} inconclusive"))?;
        let z = out.zeta.unwrap();
        ensure(z == want, || format!("case {case}: {eigs:?} gave {z}, expected {want}"))?;
        ensure(z.counts(10) == seq, || format!("case {case}: counts"))?;
        let pass = verify_theorem(&z, &BigInt::from(2), 0, None).pass;
        ensure(pass, || format!("case {case}: verdict at mu = 0"))?;
    }
    Ok("50 eigenvalue sets round-tripped exactly".into())
}

// ---------- criterion 8: determinism ----------

fn criterion_8() -> Outcome {
    let specs = [
        r#"{"field":{"p":3,"k":1},"n_vars":3,"polys":[[{"exps":[2,0,0],"coeff":[1]},{"exps":[0,2,0],"coeff":[1]},{"exps":[0,0,2],"coeff":[1]}]],"exponent_matrix":[[1]],"nu_max":4}"#,
        r#"{"field":{"p":2,"k":2},"n_vars":3,"polys":[[{"exps":[1,1,0],"coeff":[0,1]},{"exps":[0,0,2],"coeff":[1]}],[{"exps":[1,0,0],"coeff":[1]},{"exps":[0,1,0],"coeff":[1,1]}]],"exponent_matrix":[[1,0],[2,1]],"nu_max":3}"#,
        r#"{"field":{"p":5,"k":1},"n_vars":3,"polys":[[{"exps":[3,0,0],"coeff":[1]},{"exps":[0,3,0],"coeff":[1]},{"exps":[0,0,3],"coeff":[1]}]],"exponent_matrix":[[1]],"mode":"projective","nu_max":3}"#,
    ];
    for (i, text) in specs.iter().enumerate() {
        let spec = parse_spec(text.as_bytes()).map_err(|e| format!("spec {i}: {e}"))?;
        let a = run_experiment_with(&spec, &RunOptions { workers: Some(1) });
        let b = run_experiment_with(&spec, &RunOptions { workers: Some(1) });
        let c = run_experiment_with(&spec, &RunOptions { workers: Some(5) });
        ensure(a.canonical_json() == b.canonical_json(), || format!("spec {i}: repeated runs differ"))?;
        ensure(a.canonical_json() == c.canonical_json(), || format!("spec {i}: worker count changes the report"))?;
        ensure(a.exit_code() == 0, || format!("spec {i}: failing verdict"))?;
    }
    let grid = FuzzGrid::default();
    for i in 0..40 {
        let sys = generate_system(&mut instance_rng(88, i), &grid, Mode::Affine, EquationCount::Any);
        let one = Counter::new(Budget::default(), 1);
        for workers in [2, 3, 8] {
            let many = Counter::new(Budget::default(), workers);
            for nu in [1, 2] {
                let (x, y) = (one.count_affine(&sys, nu), many.count_affine(&sys, nu));
                ensure(x == y, || format!("system {i}, nu = {nu}, {workers} workers"))?;
            }
        }
    }
    let cfg = FuzzConfig::new(99, 25);
    ensure(fuzz_campaign(&cfg).to_json() == fuzz_campaign(&cfg).to_json(), || "fuzz replay differs".into())?;
    Ok("3 specs x 3 runs identical; 40 systems agree for 1/2/3/8 workers; fuzz replay identical".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 bounds exactness", criterion_1, Duration::from_secs(1)),
        ("2 quadric zeros", criterion_2, Duration::from_secs(1)),
        ("3 affine fuzz", criterion_3, Duration::from_secs(300)),
        ("4 projective fuzz", criterion_4, Duration::from_secs(300)),
        ("5 count identities", criterion_5, Duration::from_secs(300)),
        ("6 zeta pipeline", criterion_6, Duration::from_secs(30)),
        ("7 zeta oracle", criterion_7, Duration::from_secs(10)),
        ("8 determinism", criterion_8, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= limit {
                Ok(msg)
            } else {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(msg) => println!("criterion {name}: PASS ({elapsed:.2?}) {msg}"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({elapsed:.2?}) {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
