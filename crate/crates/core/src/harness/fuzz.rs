//! Seeded random systems and the divisibility/identity fuzz campaign.

use std::path::PathBuf;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::spec::{Check, ExperimentSpec};
use crate::bounds::{mu, DegreeProfile};
use crate::counting::{affine_points, projective_points, q_adic_order, Budget, CountError, Counter};
use crate::field::{make_field, FieldDesc};
use crate::poly::{Mode, MultiPoly, PolySystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzGrid {
    /// `(p, k)` pairs
    pub fields: Vec<(u64, usize)>,
    pub max_vars: usize,
    pub max_factors: usize,
    pub max_equations: usize,
    pub max_degree: u32,
    pub max_exponent: u32,
    pub max_terms: usize,
}

impl Default for FuzzGrid {
    fn default() -> Self {
        FuzzGrid {
            fields: vec![(2, 1), (3, 1), (2, 2), (5, 1)],
            max_vars: 4,
            max_factors: 2,
            max_equations: 2,
            max_degree: 3,
            max_exponent: 2,
            max_terms: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquationCount {
    Any,
    Single,
    Several,
}

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub seed: u64,
    pub instances: usize,
    /// Check against `μ + 1` instead of `μ`; failures are then expected.
    pub mutate: bool,
    pub mode: Mode,
    pub equations: EquationCount,
    pub grid: FuzzGrid,
    pub nus: Vec<u32>,
    pub budget: u64,
    pub workers: usize,
    /// Where a failing instance's spec is written; `None` keeps it in memory only.
    pub reproducer_dir: Option<PathBuf>,
}

impl FuzzConfig {
    pub fn new(seed: u64, instances: usize) -> Self {
        FuzzConfig {
            seed,
            instances,
            mutate: false,
            mode: Mode::Affine,
            equations: EquationCount::Any,
            grid: FuzzGrid::default(),
            nus: vec![1, 2],
            budget: 20_000_000,
            workers: 1,
            reproducer_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub q: u64,
    pub n_vars: usize,
    pub degrees: Vec<u32>,
    pub exponents: Vec<Vec<u32>>,
    pub mu: u32,
    /// Counts checked for divisibility, one per ν.
    pub counts: Vec<String>,
    pub divisible: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<Check>,
    /// Holds per ν.
    pub identity_holds: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzFailure {
    pub instance: usize,
    pub check: Check,
    pub nu: u32,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzSummary {
    pub seed: u64,
    pub mode: Mode,
    pub mutate: bool,
    pub exponent_shift: u32,
    pub instances_requested: usize,
    pub instances_run: usize,
    pub divisibility_checks: usize,
    pub divisibility_failures: usize,
    pub identity_checks: usize,
    pub identity_failures: usize,
    pub errors: usize,
    pub halted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<FuzzFailure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<ExperimentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproducer_path: Option<String>,
    pub instances: Vec<InstanceRecord>,
}

impl FuzzSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }

    /// Failures that count against the theorems (mutation failures are expected).
    pub fn unexpected_failures(&self) -> usize {
        self.identity_failures + if self.mutate { 0 } else { self.divisibility_failures }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.unexpected_failures() > 0)
    }
}

/// Independent stream per instance, so instance `i` does not depend on how
/// many random draws earlier instances made.
pub fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn random_coeff(rng: &mut ChaCha8Rng, field: &FieldDesc) -> crate::field::FieldElement {
    field.element_at(rng.gen_range(1..field.order_u64().expect("small field")))
}

/// A polynomial of exact degree `d` in `n` variables with at most
/// `max_terms` terms; homogeneous when asked.
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    field: &FieldDesc,
    n: usize,
    d: u32,
    max_terms: usize,
    homogeneous: bool,
) -> MultiPoly {
    loop {
        let terms = rng.gen_range(1..=max_terms.max(1));
        let mut list = Vec::with_capacity(terms);
        for t in 0..terms {
            let deg = if t == 0 || homogeneous { d } else { rng.gen_range(0..=d) };
            list.push((random_monomial(rng, n, deg), random_coeff(rng, field)));
        }
        let f = MultiPoly::from_terms(field, n, list).expect("arity matches");
        if f.degree() == Some(d) && (!homogeneous || f.is_homogeneous()) {
            return f;
        }
    }
}

fn random_monomial(rng: &mut ChaCha8Rng, n: usize, deg: u32) -> Vec<u32> {
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[rng.gen_range(0..n)] += 1;
    }
    e
}

/// One system drawn from the grid. Affine draws may contain zero columns
/// (constant equations) and repeated factors; projective draws are
/// homogeneous and every column has a positive entry.
pub fn generate_system(rng: &mut ChaCha8Rng, grid: &FuzzGrid, mode: Mode, equations: EquationCount) -> PolySystem {
    let (p, k) = grid.fields[rng.gen_range(0..grid.fields.len())];
    let field = make_field(p, k).expect("grid fields are valid");
    let n = rng.gen_range(1..=grid.max_vars);
    let r = rng.gen_range(1..=grid.max_factors);
    let big_r = match equations {
        EquationCount::Any => rng.gen_range(1..=grid.max_equations),
        EquationCount::Single => 1,
        EquationCount::Several => rng.gen_range(2..=grid.max_equations.max(2)),
    };
    let homogeneous = mode == Mode::Projective;
    let mut polys: Vec<MultiPoly> = Vec::with_capacity(r);
    for i in 0..r {
        if i > 0 && rng.gen_bool(0.25) {
            polys.push(polys[0].clone());
        } else {
            let d = rng.gen_range(1..=grid.max_degree);
            polys.push(random_poly(rng, &field, n, d, grid.max_terms, homogeneous));
        }
    }
    let zero_column = !homogeneous && big_r > 1 && rng.gen_bool(0.2);
    let mut exps = vec![vec![0u32; big_r]; r];
    for j in 0..big_r {
        loop {
            for row in exps.iter_mut() {
                row[j] = rng.gen_range(0..=grid.max_exponent);
            }
            if zero_column && j == big_r - 1 {
                for row in exps.iter_mut() {
                    row[j] = 0;
                }
                break;
            }
            if !homogeneous || exps.iter().any(|row| row[j] > 0) {
                break;
            }
        }
    }
    PolySystem::new(polys, exps, mode).expect("generated systems are valid")
}

pub fn fuzz_campaign(cfg: &FuzzConfig) -> FuzzSummary {
    let shift = u32::from(cfg.mutate);
    let mut s = FuzzSummary {
        seed: cfg.seed,
        mode: cfg.mode,
        mutate: cfg.mutate,
        exponent_shift: shift,
        instances_requested: cfg.instances,
        instances_run: 0,
        divisibility_checks: 0,
        divisibility_failures: 0,
        identity_checks: 0,
        identity_failures: 0,
        errors: 0,
        halted: false,
        first_failure: None,
        reproducer: None,
        reproducer_path: None,
        instances: Vec::with_capacity(cfg.instances),
    };
    let counter = Counter::new(Budget::new(cfg.budget), cfg.workers);
    for index in 0..cfg.instances {
        let mut rng = instance_rng(cfg.seed, index);
        let sys = generate_system(&mut rng, &cfg.grid, cfg.mode, cfg.equations);
        let (rec, failure) = run_instance(&counter, &sys, index, &cfg.nus, shift);
        s.instances_run += 1;
        s.divisibility_checks += rec.divisible.len();
        s.divisibility_failures += rec.divisible.iter().filter(|&&d| !d).count();
        s.identity_checks += rec.identity_holds.len();
        s.identity_failures += rec.identity_holds.iter().filter(|&&h| !h).count();
        s.errors += usize::from(rec.error.is_some());
        s.instances.push(rec);
        let Some(failure) = failure else { continue };
        let expected = cfg.mutate && failure.check == Check::Divisibility;
        if s.first_failure.is_none() {
            s.first_failure = Some(failure);
        }
        if !expected {
            let spec = ExperimentSpec::from_system(
                &sys,
                *cfg.nus.iter().max().unwrap_or(&2),
                super::spec::DEFAULT_GUARD,
                cfg.budget,
                vec![Check::Divisibility, Check::Cone, Check::Excision, Check::InclusionExclusion],
            );
            if let Some(dir) = &cfg.reproducer_dir {
                let path = dir.join(format!("repro-seed{}-instance{}.json", cfg.seed, index));
                let text = serde_json::to_string_pretty(&spec).expect("spec serializes") + "\n";
                match std::fs::write(&path, text) {
                    Ok(()) => s.reproducer_path = Some(path.display().to_string()),
                    Err(e) => s.reproducer_path = Some(format!("could not write {}: {e}", path.display())),
                }
            }
            s.reproducer = Some(spec);
            s.halted = true;
            break;
        }
    }
    s
}

fn run_instance(
    counter: &Counter,
    sys: &PolySystem,
    index: usize,
    nus: &[u32],
    shift: u32,
) -> (InstanceRecord, Option<FuzzFailure>) {
    let field = sys.field();
    let q = field.order();
    let m = DegreeProfile::new(sys.n_vars() as u32, sys.degrees().to_vec()).map(|p| mu(&p)).unwrap_or(0);
    let exponent = (m + shift) as u64;
    let identity = match (sys.mode(), sys.num_equations()) {
        (Mode::Projective, _) => Check::Cone,
        (Mode::Affine, 1) => Check::Excision,
        _ => Check::InclusionExclusion,
    };
    let mut rec = InstanceRecord {
        index,
        q: field.order_u64().expect("small field"),
        n_vars: sys.n_vars(),
        degrees: sys.degrees().to_vec(),
        exponents: sys.exponents().to_vec(),
        mu: m,
        counts: Vec::new(),
        divisible: Vec::new(),
        identity: Some(identity),
        identity_holds: Vec::new(),
        error: None,
    };
    let mut failure = None;
    let mut note = |check: Check, nu: u32, detail: String| {
        if failure.is_none() {
            failure = Some(FuzzFailure { instance: index, check, nu, detail });
        }
    };

    for &nu in nus {
        let big_q = q.pow(nu);
        let step: Result<(BigUint, bool), CountError> = (|| match sys.mode() {
            Mode::Affine => {
                let count = counter.count_affine(sys, nu)?;
                let holds = match identity {
                    Check::Excision => counter.excision_identity_check(sys, nu)?.holds,
                    _ => counter.inclusion_exclusion_check(sys, nu)?.holds,
                };
                Ok((count, holds))
            }
            Mode::Projective => {
                let w = counter.cone_identity_check(sys, nu)?;
                Ok((projective_points(&big_q, sys.n_vars()) - &w.projective, w.holds))
            }
        })();
        let (count, holds) = match step {
            Ok(v) => v,
            Err(e) => {
                rec.error = Some(format!("nu = {nu}: {e}"));
                break;
            }
        };
        debug_assert!(sys.mode() == Mode::Projective || count <= affine_points(&big_q, sys.n_vars()));
        let required = nu as u64 * exponent;
        let order = q_adic_order(&count, q);
        let divisible = order.is_none_or(|o| o >= required);
        if !divisible {
            note(Check::Divisibility, nu, format!("count {count} has q-adic order {order:?} < {required}"));
        }
        if !holds {
            note(identity, nu, "count identity does not hold".to_string());
        }
        rec.counts.push(count.to_string());
        rec.divisible.push(divisible);
        rec.identity_holds.push(holds);
    }
    (rec, failure)
}
