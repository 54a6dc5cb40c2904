//! Divisibility exponents for systems of polynomial equations.
//!
//! For `n` affine variables and degrees `d_1..d_r`:
//!
//! * `mu     = max(0, ceil((n - Σ d_i) / max d_i))`
//! * `lambda = max(0, ceil((n - Σ d_i) / Σ d_i))`
//! * `mu_j   = j + mu(n - j; d)` for `0 <= j <= n`
//! * `kappa  = max(0, floor((n - d_2 - ... - d_r) / d_1))` with `d_1 >= ... >= d_r`
//!
//! Everything is integer arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("a degree profile needs at least one degree")]
    NoDegrees,
    #[error("degrees must be >= 1")]
    ZeroDegree,
    #[error("the number of variables must be >= 1")]
    NoVariables,
    #[error("j = {j} exceeds n = {n}")]
    JOutOfRange { j: u32, n: u32 },
}

/// `(n; d_1..d_r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    n: u32,
    degrees: Vec<u32>,
}

impl DegreeProfile {
    pub fn new(n: u32, degrees: Vec<u32>) -> Result<Self, BoundsError> {
        if n == 0 {
            return Err(BoundsError::NoVariables);
        }
        if degrees.is_empty() {
            return Err(BoundsError::NoDegrees);
        }
        if degrees.contains(&0) {
            return Err(BoundsError::ZeroDegree);
        }
        Ok(DegreeProfile { n, degrees })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    fn sum(&self) -> i64 {
        self.degrees.iter().map(|&d| d as i64).sum()
    }

    fn max(&self) -> i64 {
        self.degrees.iter().copied().max().unwrap_or(1) as i64
    }
}

/// Ceiling of `a / b` for `b > 0`.
pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Floor of `a / b` for `b > 0`.
pub(crate) fn floor_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

/// mu with the variable count given separately; `n = 0` is allowed and
/// always yields 0.
fn mu_raw(n: u32, profile: &DegreeProfile) -> u32 {
    ceil_div(n as i64 - profile.sum(), profile.max()).max(0) as u32
}

pub fn mu(profile: &DegreeProfile) -> u32 {
    mu_raw(profile.n, profile)
}

pub fn lambda(profile: &DegreeProfile) -> u32 {
    let s = profile.sum();
    ceil_div(profile.n as i64 - s, s).max(0) as u32
}

pub fn mu_j(profile: &DegreeProfile, j: u32) -> Result<u32, BoundsError> {
    if j > profile.n {
        return Err(BoundsError::JOutOfRange { j, n: profile.n });
    }
    Ok(j + mu_raw(profile.n - j, profile))
}

pub fn kappa(profile: &DegreeProfile) -> u32 {
    let mut d = profile.degrees.clone();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let rest: i64 = d[1..].iter().map(|&x| x as i64).sum();
    floor_div(profile.n as i64 - rest, d[0] as i64).max(0) as u32
}

/// Every exponent for one profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: u32,
    pub degrees: Vec<u32>,
    pub mu: u32,
    pub lambda: u32,
    /// `mu_j` for `j = 0..=n`.
    pub mu_j: Vec<u32>,
    pub kappa: u32,
}

impl BoundsReport {
    pub fn compute(profile: &DegreeProfile) -> Self {
        let mu_j = (0..=profile.n).map(|j| j + mu_raw(profile.n - j, profile)).collect();
        BoundsReport {
            n: profile.n,
            degrees: profile.degrees.clone(),
            mu: mu(profile),
            lambda: lambda(profile),
            mu_j,
            kappa: kappa(profile),
        }
    }
}
