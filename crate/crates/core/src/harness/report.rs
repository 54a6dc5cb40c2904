//! Machine-readable experiment reports and the witness-only re-check.

use num_bigint::{BigInt, BigUint};
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::spec::{Check, ExperimentSpec};
use crate::bounds::{BoundsReport, DegreeProfile};
use crate::counting::{q_adic_order, ConeWitness, CountKind, CountTable, ExcisionWitness, InclusionExclusionWitness};
use crate::zeta::{verify_theorem, ReconstructionOutcome, ZetaFunction};

pub const ARTIFACT: &str = "pointdiv";
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CANCELLATION_NOTE: &str = "zeta verdicts check the reciprocal zeros and poles of the zeta function in \
     lowest terms; Frobenius eigenvalues that cancel between cohomological degrees are not observable from \
     point counts, so per-degree divisibility is not verified";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Skipped,
    Error,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    System,
    Bounds,
    Counting,
    Identities,
    Zeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Error,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub status: StageStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The numbers a verdict was decided on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    Divisibility {
        #[serde(with = "crate::serde_big::uint")]
        q: BigUint,
        exponent: u64,
        #[serde(with = "crate::serde_big::uint")]
        count: BigUint,
        required: u64,
        order: Option<u64>,
    },
    Zeta {
        #[serde(with = "crate::serde_big::uint")]
        q: BigUint,
        mu: u64,
        zeta: ZetaFunction,
        numerator_order: Option<u64>,
        denominator_order: Option<u64>,
    },
    Cone(ConeWitness),
    Excision(ExcisionWitness),
    InclusionExclusion(InclusionExclusionWitness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: Check,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject: Option<CountKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<u32>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl Verdict {
    pub(crate) fn without_witness(check: Check, status: Status, reason: impl Into<String>) -> Self {
        Verdict { check, subject: None, nu: None, status, reason: Some(reason.into()), witness: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaRecord {
    pub subject: CountKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<ReconstructionOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Wall-clock and work counters; not covered by the determinism contract.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Telemetry {
    pub elapsed_ms: u64,
    pub evaluations: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub artifact: String,
    pub version: String,
    pub spec: ExperimentSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsReport>,
    pub counts: Vec<CountTable>,
    pub zeta: Vec<ZetaRecord>,
    pub stages: Vec<StageRecord>,
    pub verdicts: Vec<Verdict>,
    pub overall: Status,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub telemetry: Option<Telemetry>,
}

impl Report {
    pub fn new(spec: ExperimentSpec) -> Self {
        Report {
            artifact: ARTIFACT.to_string(),
            version: ARTIFACT_VERSION.to_string(),
            spec,
            bounds: None,
            counts: Vec::new(),
            zeta: Vec::new(),
            stages: Vec::new(),
            verdicts: Vec::new(),
            overall: Status::Skipped,
            notes: vec![CANCELLATION_NOTE.to_string()],
            telemetry: None,
        }
    }

    pub fn table(&self, kind: CountKind) -> Option<&CountTable> {
        self.counts.iter().find(|t| t.kind == kind)
    }

    pub(crate) fn stage(&mut self, stage: Stage, status: StageStatus, error: Option<String>) {
        self.stages.push(StageRecord { stage, status, error });
    }

    /// Fail beats error beats inconclusive beats pass; all-skipped stays skipped.
    pub fn summarize(&self) -> Status {
        let has = |s: Status| self.verdicts.iter().any(|v| v.status == s);
        if has(Status::Fail) {
            Status::Fail
        } else if has(Status::Error) || self.stages.iter().any(|s| s.status == StageStatus::Error) {
            Status::Error
        } else if has(Status::Inconclusive) {
            Status::Inconclusive
        } else if has(Status::Pass) {
            Status::Pass
        } else {
            Status::Skipped
        }
    }

    pub fn exit_code(&self) -> i32 {
        i32::from(self.verdicts.iter().any(|v| v.status == Status::Fail))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// The report without telemetry: identical across runs of the same spec.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.telemetry = None;
        r.to_json()
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecheckSummary {
    pub verdicts_checked: usize,
    pub mismatches: Vec<String>,
    pub failures: usize,
}

impl RecheckSummary {
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.mismatches.is_empty() || self.failures > 0)
    }
}

/// Recomputes every verdict from the witnesses stored in the report, without
/// counting any points. Witness counts are also cross-checked against the
/// count tables, and zeta functions against the counts they must reproduce.
pub fn recheck(report: &Report) -> RecheckSummary {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    let mut failures = 0;

    if let Some(b) = &report.bounds {
        match DegreeProfile::new(b.n, b.degrees.clone()) {
            Ok(p) if BoundsReport::compute(&p) == *b => {}
            Ok(_) => mismatches.push("bounds: recomputed exponents differ".into()),
            Err(e) => mismatches.push(format!("bounds: {e}")),
        }
    }

    let q = BigUint::from(report.spec.field.p).pow(report.spec.field.k as u32);
    for (i, v) in report.verdicts.iter().enumerate() {
        if v.status == Status::Fail {
            failures += 1;
        }
        let Some(w) = &v.witness else { continue };
        checked += 1;
        let label = format!("verdict {i} ({:?})", v.check);
        match recheck_one(report, v, w, &q) {
            Ok(status) if status == v.status => {}
            Ok(status) => mismatches.push(format!("{label}: recorded {:?}, recomputed {status:?}", v.status)),
            Err(msg) => mismatches.push(format!("{label}: {msg}")),
        }
    }
    RecheckSummary { verdicts_checked: checked, mismatches, failures }
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn recheck_one(report: &Report, v: &Verdict, w: &Witness, q: &BigUint) -> Result<Status, String> {
    match w {
        Witness::Divisibility { q: wq, exponent, count, required, order } => {
            if wq != q {
                return Err("witness q differs from the spec field".into());
            }
            let nu = v.nu.ok_or("missing nu")?;
            if *required != nu as u64 * exponent {
                return Err("required order is not nu * exponent".into());
            }
            if q_adic_order(count, q) != *order {
                return Err("recorded q-adic order is wrong".into());
            }
            if let Some(t) = v.subject.and_then(|s| report.table(s)) {
                if t.counts.get(&nu) != Some(count) {
                    return Err("witness count differs from the count table".into());
                }
            }
            Ok(pass_if(order.is_none_or(|o| o >= *required)))
        }
        Witness::Zeta { q: wq, mu, zeta, numerator_order, denominator_order } => {
            if wq != q {
                return Err("witness q differs from the spec field".into());
            }
            let verdict = verify_theorem(zeta, &BigInt::from(q.clone()), *mu, None);
            if verdict.numerator_order != *numerator_order || verdict.denominator_order != *denominator_order {
                return Err("recorded uniform divisibility orders are wrong".into());
            }
            if let Some(t) = v.subject.and_then(|s| report.table(s)) {
                let expanded = zeta.counts(t.counts.len());
                for (&nu, count) in &t.counts {
                    if expanded.get(nu as usize - 1) != Some(&BigInt::from(count.clone())) {
                        return Err(format!("zeta function does not reproduce N_{nu}"));
                    }
                }
            }
            Ok(pass_if(verdict.pass))
        }
        Witness::Cone(c) => {
            let big_q = q.pow(c.nu);
            Ok(pass_if(c.affine == BigUint::one() + (&big_q - 1u32) * &c.projective))
        }
        Witness::Excision(e) => Ok(pass_if(&e.affine_complement + &e.infinity_complement == e.projective_complement)),
        Witness::InclusionExclusion(ie) => {
            let mut acc = BigInt::from(0);
            for t in &ie.terms {
                let c = BigInt::from(t.complement.clone());
                if t.subset.len() % 2 == 1 {
                    acc += c;
                } else {
                    acc -= c;
                }
            }
            let r = report.spec.exponent_matrix.first().map_or(0, Vec::len);
            if ie.terms.len() + 1 != 1usize << r {
                return Err("inclusion-exclusion witness does not list every subset".into());
            }
            Ok(pass_if(acc == BigInt::from(ie.lhs.clone())))
        }
    }
}
