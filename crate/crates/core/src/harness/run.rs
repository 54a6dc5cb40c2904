//! The bounds → counts → identities → zeta → verdicts pipeline.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};

use super::report::{Report, Stage, StageStatus, Status, Telemetry, Verdict, Witness, ZetaRecord};
use super::spec::{Check, ExperimentSpec};
use crate::bounds::{BoundsReport, DegreeProfile};
use crate::counting::{
    affine_points, projective_points, q_adic_order, Budget, CountError, CountKind, CountTable, Counter,
};
use crate::poly::{Mode, PolySystem};
use crate::zeta::{reconstruct_table, verify_theorem, ReconstructionStatus};

/// Identity checks need several extra counts per ν, so they run on the
/// smallest extensions only.
pub const IDENTITY_NU_MAX: u32 = 2;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// `None` uses the available parallelism.
    pub workers: Option<usize>,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Report {
    run_experiment_with(spec, &RunOptions::default())
}

pub fn run_experiment_with(spec: &ExperimentSpec, opts: &RunOptions) -> Report {
    let start = Instant::now();
    let budget = Budget::new(spec.budget);
    let counter = match opts.workers {
        Some(w) => Counter::new(budget, w),
        None => Counter::with_default_workers(budget),
    };
    let mut report = Report::new(spec.clone());
    pipeline(spec, &counter, &mut report);
    report.overall = report.summarize();
    report.telemetry = Some(Telemetry {
        elapsed_ms: start.elapsed().as_millis() as u64,
        evaluations: counter.evaluations(),
        workers: counter.workers(),
    });
    report
}

fn pipeline(spec: &ExperimentSpec, counter: &Counter, report: &mut Report) {
    let sys = match spec.build_system() {
        Ok(s) => {
            report.stage(Stage::System, StageStatus::Ok, None);
            s
        }
        Err(e) => {
            report.stage(Stage::System, StageStatus::Error, Some(e.to_string()));
            return;
        }
    };

    let bounds = match DegreeProfile::new(sys.n_vars() as u32, sys.degrees().to_vec()) {
        Ok(p) => BoundsReport::compute(&p),
        Err(e) => {
            report.stage(Stage::Bounds, StageStatus::Error, Some(e.to_string()));
            return;
        }
    };
    report.stage(Stage::Bounds, StageStatus::Ok, None);
    let mu = bounds.mu as u64;
    report.bounds = Some(bounds);

    let q = sys.field().order();
    let subjects = divisibility_subjects(sys.mode());
    let tables = count_stage(spec, &sys, counter, report);

    if spec.wants(Check::Divisibility) {
        for &kind in &subjects {
            let t = tables.iter().find(|t| t.kind == kind).expect("table for every subject");
            for (&nu, count) in &t.counts {
                let order = q_adic_order(count, q);
                let required = nu as u64 * mu;
                report.verdicts.push(Verdict {
                    check: Check::Divisibility,
                    subject: Some(kind),
                    nu: Some(nu),
                    status: if order.is_none_or(|o| o >= required) { Status::Pass } else { Status::Fail },
                    reason: None,
                    witness: Some(Witness::Divisibility {
                        q: q.clone(),
                        exponent: mu,
                        count: count.clone(),
                        required,
                        order,
                    }),
                });
            }
            if (t.counts.len() as u32) < spec.nu_max {
                report.verdicts.push(Verdict {
                    subject: Some(kind),
                    nu: Some(t.counts.len() as u32 + 1),
                    ..Verdict::without_witness(
                        Check::Divisibility,
                        Status::Inconclusive,
                        "not counted: the counting stage stopped early",
                    )
                });
            }
        }
    }
    report.counts = tables;

    identity_stage(spec, &sys, counter, report);

    if spec.wants(Check::Zeta) {
        zeta_stage(spec, q, mu, &subjects, report);
    } else {
        report.stage(Stage::Zeta, StageStatus::Skipped, None);
    }
}

/// Count sets whose point counts the theorems make divisible.
fn divisibility_subjects(mode: Mode) -> Vec<CountKind> {
    match mode {
        Mode::Affine => vec![CountKind::AffineX, CountKind::AffineComplement],
        Mode::Projective => vec![CountKind::ProjectiveComplement],
    }
}

fn count_stage(spec: &ExperimentSpec, sys: &PolySystem, counter: &Counter, report: &mut Report) -> Vec<CountTable> {
    let q = sys.field().order();
    let n = sys.n_vars();
    let (x_kind, c_kind) = match sys.mode() {
        Mode::Affine => (CountKind::AffineX, CountKind::AffineComplement),
        Mode::Projective => (CountKind::ProjectiveX, CountKind::ProjectiveComplement),
    };
    let mut x = CountTable::new(q.clone(), x_kind);
    let mut c = CountTable::new(q.clone(), c_kind);
    let mut error = None;
    for nu in 1..=spec.nu_max {
        let big_q = q.pow(nu);
        let res = match sys.mode() {
            Mode::Affine => counter.count_affine(sys, nu).map(|v| (affine_points(&big_q, n) - &v, v)),
            Mode::Projective => counter.count_projective(sys, nu).map(|v| (projective_points(&big_q, n) - &v, v)),
        };
        match res {
            Ok((comp, v)) => {
                x.counts.insert(nu, v);
                c.counts.insert(nu, comp);
            }
            Err(e) => {
                error = Some(format!("nu = {nu}: {e}"));
                break;
            }
        }
    }
    match error {
        None => report.stage(Stage::Counting, StageStatus::Ok, None),
        Some(e) => report.stage(Stage::Counting, StageStatus::Error, Some(e)),
    }
    vec![x, c]
}

fn identity_stage(spec: &ExperimentSpec, sys: &PolySystem, counter: &Counter, report: &mut Report) {
    let big_r = sys.num_equations();
    let applicable = |check: Check| -> Result<(), &'static str> {
        match check {
            Check::Cone if sys.mode() != Mode::Projective => Err("the cone identity applies to projective specs"),
            Check::Cone if (0..big_r).any(|j| sys.equation_is_constant(j)) => {
                Err("the cone identity needs every equation to be nonconstant")
            }
            Check::Excision if sys.mode() != Mode::Affine => Err("excision applies to affine specs"),
            Check::Excision if big_r != 1 => Err("excision applies to a single equation (R = 1)"),
            Check::InclusionExclusion if big_r < 2 => Err("inclusion-exclusion needs R >= 2 equations"),
            _ => Ok(()),
        }
    };

    let mut ran = false;
    let mut errors = Vec::new();
    for check in [Check::Cone, Check::Excision, Check::InclusionExclusion] {
        if !spec.wants(check) {
            continue;
        }
        if let Err(why) = applicable(check) {
            report.verdicts.push(Verdict::without_witness(check, Status::Skipped, why));
            continue;
        }
        ran = true;
        for nu in 1..=spec.nu_max.min(IDENTITY_NU_MAX) {
            let outcome: Result<(bool, Witness), CountError> = match check {
                Check::Cone => counter.cone_identity_check(sys, nu).map(|w| (w.holds, Witness::Cone(w))),
                Check::Excision => counter.excision_identity_check(sys, nu).map(|w| (w.holds, Witness::Excision(w))),
                _ => counter.inclusion_exclusion_check(sys, nu).map(|w| (w.holds, Witness::InclusionExclusion(w))),
            };
            let verdict = match outcome {
                Ok((holds, w)) => Verdict {
                    check,
                    subject: None,
                    nu: Some(nu),
                    status: if holds { Status::Pass } else { Status::Fail },
                    reason: None,
                    witness: Some(w),
                },
                Err(e) => {
                    errors.push(format!("{check:?}, nu = {nu}: {e}"));
                    let status = if matches!(e, CountError::BudgetExceeded { .. }) {
                        Status::Inconclusive
                    } else {
                        Status::Error
                    };
                    Verdict { nu: Some(nu), ..Verdict::without_witness(check, status, e.to_string()) }
                }
            };
            let stop = verdict.status != Status::Pass && verdict.status != Status::Fail;
            report.verdicts.push(verdict);
            if stop {
                break;
            }
        }
    }
    if !errors.is_empty() {
        report.stage(Stage::Identities, StageStatus::Error, Some(errors.join("; ")));
    } else if ran {
        report.stage(Stage::Identities, StageStatus::Ok, None);
    } else {
        report.stage(Stage::Identities, StageStatus::Skipped, None);
    }
}

fn zeta_stage(spec: &ExperimentSpec, q: &BigUint, mu: u64, subjects: &[CountKind], report: &mut Report) {
    let mut failed = false;
    for &kind in subjects {
        let table = report.table(kind).expect("table for every subject").clone();
        let (record, verdict) = match reconstruct_table(&table, spec.guard) {
            Ok(outcome) => {
                let verdict = match (&outcome.status, &outcome.zeta) {
                    (ReconstructionStatus::Stabilized, Some(z)) => {
                        let v = verify_theorem(z, &BigInt::from(q.clone()), mu, None);
                        Verdict {
                            check: Check::Zeta,
                            subject: Some(kind),
                            nu: None,
                            status: if v.pass { Status::Pass } else { Status::Fail },
                            reason: None,
                            witness: Some(Witness::Zeta {
                                q: q.clone(),
                                mu,
                                zeta: z.clone(),
                                numerator_order: v.numerator_order,
                                denominator_order: v.denominator_order,
                            }),
                        }
                    }
                    _ => Verdict {
                        subject: Some(kind),
                        ..Verdict::without_witness(
                            Check::Zeta,
                            Status::Inconclusive,
                            format!(
                                "recurrence of order {} from {} counts did not stabilize with guard {}; \
                                 raise nu_max (at least 2 * order + guard terms are needed)",
                                outcome.recurrence_order,
                                table.counts.len(),
                                spec.guard
                            ),
                        )
                    },
                };
                (ZetaRecord { subject: kind, outcome: Some(outcome), error: None }, verdict)
            }
            Err(e) => {
                failed = true;
                (
                    ZetaRecord { subject: kind, outcome: None, error: Some(e.to_string()) },
                    Verdict {
                        subject: Some(kind),
                        ..Verdict::without_witness(Check::Zeta, Status::Error, e.to_string())
                    },
                )
            }
        };
        report.zeta.push(record);
        report.verdicts.push(verdict);
    }
    if failed {
        report.stage(Stage::Zeta, StageStatus::Error, Some("reconstruction failed; see zeta records".into()));
    } else {
        report.stage(Stage::Zeta, StageStatus::Ok, None);
    }
}
