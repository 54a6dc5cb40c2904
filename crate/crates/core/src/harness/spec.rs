//! JSON experiment specifications.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{make_field, FieldDesc, FieldError};
use crate::poly::{Mode, MultiPoly, PolyError, PolySystem};

pub const DEFAULT_NU_MAX: u32 = 4;
pub const DEFAULT_GUARD: usize = 2;
pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("invalid field: {0}")]
    InvalidField(#[from] FieldError),
    #[error("invalid system: {0}")]
    InvalidSystem(PolyError),
    #[error("invalid setting: {0}")]
    InvalidSetting(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Divisibility,
    Zeta,
    Cone,
    Excision,
    InclusionExclusion,
}

impl Check {
    pub const ALL: [Check; 5] =
        [Check::Divisibility, Check::Zeta, Check::Cone, Check::Excision, Check::InclusionExclusion];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    pub k: usize,
}

/// One term: exponent vector plus a coefficient in the power basis of the
/// field's modulus (length at most k, entries reduced mod p).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub exps: Vec<i64>,
    pub coeff: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub field: FieldSpec,
    pub n_vars: usize,
    pub polys: Vec<Vec<TermSpec>>,
    pub exponent_matrix: Vec<Vec<i64>>,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_nu_max")]
    pub nu_max: u32,
    #[serde(default = "default_guard")]
    pub guard: usize,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
}

fn default_mode() -> Mode {
    Mode::Affine
}
fn default_nu_max() -> u32 {
    DEFAULT_NU_MAX
}
fn default_guard() -> usize {
    DEFAULT_GUARD
}
fn default_budget() -> u64 {
    DEFAULT_BUDGET
}
fn default_checks() -> Vec<Check> {
    Check::ALL.to_vec()
}

/// Strict parse followed by full validation of the instance.
pub fn parse_spec(text: &[u8]) -> Result<ExperimentSpec, SpecError> {
    let spec: ExperimentSpec = serde_json::from_slice(text).map_err(|e| SpecError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    // homogeneity is a run-time finding, so structure is validated in affine mode
    spec.build_system_as(Mode::Affine)?;
    Ok(spec)
}

impl ExperimentSpec {
    pub fn build_field(&self) -> Result<FieldDesc, SpecError> {
        Ok(make_field(self.field.p, self.field.k)?)
    }

    /// The polynomial system the spec describes.
    pub fn build_system(&self) -> Result<PolySystem, SpecError> {
        self.build_system_as(self.mode)
    }

    pub fn build_system_as(&self, mode: Mode) -> Result<PolySystem, SpecError> {
        if self.nu_max == 0 {
            return Err(SpecError::InvalidSetting("nu_max must be >= 1".into()));
        }
        if self.guard == 0 {
            return Err(SpecError::InvalidSetting("guard must be >= 1".into()));
        }
        if self.budget == 0 {
            return Err(SpecError::InvalidSetting("budget must be >= 1".into()));
        }
        if self.n_vars == 0 {
            return Err(SpecError::DimensionMismatch("n_vars must be >= 1".into()));
        }
        let field = self.build_field()?;
        if self.polys.is_empty() {
            return Err(SpecError::DimensionMismatch("at least one polynomial is required".into()));
        }
        if self.exponent_matrix.len() != self.polys.len() {
            return Err(SpecError::DimensionMismatch(format!(
                "exponent_matrix has {} rows but there are {} polynomials",
                self.exponent_matrix.len(),
                self.polys.len()
            )));
        }
        let cols = self.exponent_matrix[0].len();
        if cols == 0 || self.exponent_matrix.iter().any(|r| r.len() != cols) {
            return Err(SpecError::DimensionMismatch("exponent_matrix rows must share one length >= 1".into()));
        }
        let mut exponents = Vec::with_capacity(self.polys.len());
        for (i, row) in self.exponent_matrix.iter().enumerate() {
            let row = row
                .iter()
                .map(|&a| to_exponent(a, || format!("exponent_matrix[{i}] contains {a}")))
                .collect::<Result<Vec<_>, _>>()?;
            exponents.push(row);
        }
        let mut polys = Vec::with_capacity(self.polys.len());
        for (i, terms) in self.polys.iter().enumerate() {
            let mut parsed = Vec::with_capacity(terms.len());
            for t in terms {
                if t.exps.len() != self.n_vars {
                    return Err(SpecError::DimensionMismatch(format!(
                        "polynomial {} has an exponent vector of length {}, expected {}",
                        i + 1,
                        t.exps.len(),
                        self.n_vars
                    )));
                }
                if t.coeff.is_empty() || t.coeff.len() > field.k() {
                    return Err(SpecError::DimensionMismatch(format!(
                        "polynomial {} has a coefficient of length {}, expected 1..={}",
                        i + 1,
                        t.coeff.len(),
                        field.k()
                    )));
                }
                let exps = t
                    .exps
                    .iter()
                    .map(|&e| to_exponent(e, || format!("polynomial {} has exponent {e}", i + 1)))
                    .collect::<Result<Vec<_>, _>>()?;
                parsed.push((exps, field.element(&t.coeff)?));
            }
            let f = MultiPoly::from_terms(&field, self.n_vars, parsed).map_err(SpecError::InvalidSystem)?;
            match f.degree() {
                None => return Err(SpecError::InvalidDegree(format!("polynomial {} is zero", i + 1))),
                Some(0) => return Err(SpecError::InvalidDegree(format!("polynomial {} is constant", i + 1))),
                Some(_) => {}
            }
            polys.push(f);
        }
        PolySystem::new(polys, exponents, mode).map_err(SpecError::InvalidSystem)
    }

    /// Spec text for a system, with the given run settings.
    pub fn from_system(sys: &PolySystem, nu_max: u32, guard: usize, budget: u64, checks: Vec<Check>) -> Self {
        let field = sys.field();
        let polys = sys
            .polys()
            .iter()
            .map(|f| {
                f.terms()
                    .map(|(e, c)| TermSpec {
                        exps: e.iter().map(|&x| x as i64).collect(),
                        coeff: c.coeffs().iter().map(|&x| x as i64).collect(),
                    })
                    .collect()
            })
            .collect();
        ExperimentSpec {
            field: FieldSpec { p: field.p(), k: field.k() },
            n_vars: sys.n_vars(),
            polys,
            exponent_matrix: sys.exponents().iter().map(|r| r.iter().map(|&a| a as i64).collect()).collect(),
            mode: sys.mode(),
            nu_max,
            guard,
            budget,
            checks,
        }
    }

    pub fn wants(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }
}

fn to_exponent(v: i64, what: impl Fn() -> String) -> Result<u32, SpecError> {
    u32::try_from(v).map_err(|_| SpecError::InvalidExponent(what()))
}
