//! Exact zeta-function reconstruction from point counts, and the coefficient
//! criterion for divisibility of reciprocal roots.
//!
//! Given `N_ν = Σ_i m_i α_i^ν` (signed multiplicities `m_i`, distinct nonzero
//! `α_i`), the minimal recurrence of the counts has characteristic
//! polynomial `C(T) = Π (1 - α_i T)` and
//!
//! ```text
//! Σ_{ν≥1} N_ν T^ν = A(T) / C(T),   m_i = -A(β_i) / (β_i C'(β_i)),  β_i = 1/α_i.
//! ```
//!
//! The multiplicity function `μ = -A · (T C')^{-1} mod C` lives in `ℚ[T]/(C)`;
//! its minimal polynomial has the distinct `m_i` as roots, and for each root
//! `m`, `D_m = gcd(C, μ - m)` collects the `α_i` of multiplicity `m`. Then
//! `Z(T) = Π_{m<0} D_m^{-m} / Π_{m>0} D_m^{m}`, already in lowest terms.

mod qpoly;
mod recurrence;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundsReport;
use crate::counting::{q_adic_order, CountTable};
use qpoly::QPoly;

pub use recurrence::{minimal_recurrence, Recurrence};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error("count table is missing N_{0}")]
    MissingTerm(u32),
    #[error("polynomial must have constant term 1")]
    BadConstantTerm,
    #[error("reconstruction produced non-integral coefficients or multiplicities: {0}")]
    NonIntegralCoefficients(String),
    #[error("the counts are not a signed sum of powers of nonzero eigenvalues: {0}")]
    NotAPowerSum(String),
    #[error("the recurrence has not stabilized")]
    NotStabilized,
}

/// Integer polynomial with constant term 1, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawIntPoly", into = "RawIntPoly")]
pub struct IntPolyT {
    coeffs: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawIntPoly(#[serde(with = "crate::serde_big::int_vec")] Vec<BigInt>);

impl TryFrom<RawIntPoly> for IntPolyT {
    type Error = ZetaError;
    fn try_from(raw: RawIntPoly) -> Result<Self, ZetaError> {
        IntPolyT::new(raw.0)
    }
}

impl From<IntPolyT> for RawIntPoly {
    fn from(p: IntPolyT) -> Self {
        RawIntPoly(p.coeffs)
    }
}

impl IntPolyT {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self, ZetaError> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.first() != Some(&BigInt::one()) {
            return Err(ZetaError::BadConstantTerm);
        }
        Ok(IntPolyT { coeffs })
    }

    pub fn from_i64(c: &[i64]) -> Result<Self, ZetaError> {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one() -> Self {
        IntPolyT { coeffs: vec![BigInt::one()] }
    }

    /// `Π (1 - α T)` over the given reciprocal roots.
    pub fn from_reciprocal_roots(roots: &[BigInt]) -> Self {
        let mut c = vec![BigInt::one()];
        for a in roots {
            let mut next = c.clone();
            next.push(BigInt::zero());
            for (i, ci) in c.iter().enumerate() {
                next[i + 1] -= a * ci;
            }
            c = next;
        }
        IntPolyT::new(c).expect("constant term 1")
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn mul(&self, o: &IntPolyT) -> IntPolyT {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolyT::new(out).expect("constant term 1")
    }

    /// `P(s·T)`
    pub fn rescale(&self, s: &BigInt) -> IntPolyT {
        let mut pw = BigInt::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * &pw;
                pw *= s;
                v
            })
            .collect();
        IntPolyT::new(coeffs).expect("constant term 1")
    }

    /// Power sums `p_ν = Σ α_i^ν` of the reciprocal roots, `ν = 1..=count`,
    /// by Newton's identities: `p_ν = -(ν c_ν + Σ_{i<ν} c_i p_{ν-i})`.
    pub fn power_sums(&self, count: usize) -> Vec<BigInt> {
        let c = |i: usize| self.coeffs.get(i).cloned().unwrap_or_default();
        let mut p: Vec<BigInt> = Vec::with_capacity(count);
        for nu in 1..=count {
            let mut acc = c(nu) * BigInt::from(nu);
            for i in 1..nu {
                acc += c(i) * &p[nu - i - 1];
            }
            p.push(-acc);
        }
        p
    }

    /// Largest `m` such that `q^{i·m} | c_i` for every `i >= 1`; `None` is
    /// infinite (the polynomial 1).
    pub fn uniform_divisibility_order(&self, q: &BigInt) -> Option<u64> {
        let q = q.magnitude();
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| q_adic_order(c.magnitude(), q).expect("nonzero") / i as u64)
            .min()
    }

    fn to_q(&self) -> QPoly {
        QPoly::from_ints(&self.coeffs)
    }
}

impl fmt::Debug for IntPolyT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for IntPolyT {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.magnitude();
            let body = match i {
                0 => mag.to_string(),
                _ if mag.is_one() => {
                    if i == 1 {
                        "T".to_string()
                    } else {
                        format!("T^{i}")
                    }
                }
                1 => format!("{mag}T"),
                _ => format!("{mag}T^{i}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// Free-function form of [`IntPolyT::uniform_divisibility_order`] on raw
/// coefficients.
pub fn uniform_divisibility_order(coeffs: &[BigInt], q: &BigInt) -> Result<Option<u64>, ZetaError> {
    Ok(IntPolyT::new(coeffs.to_vec())?.uniform_divisibility_order(q))
}

/// `Z(T) = numerator / denominator` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaFunction {
    pub numerator: IntPolyT,
    pub denominator: IntPolyT,
}

impl ZetaFunction {
    pub fn new(numerator: IntPolyT, denominator: IntPolyT) -> Self {
        ZetaFunction { numerator, denominator }
    }

    /// `N_1..N_count` implied by `T Z'/Z = Σ N_ν T^ν`.
    pub fn counts(&self, count: usize) -> Vec<BigInt> {
        let d = self.denominator.power_sums(count);
        let n = self.numerator.power_sums(count);
        d.into_iter().zip(n).map(|(a, b)| a - b).collect()
    }

    /// Whether numerator and denominator share no factor over ℚ.
    pub fn is_reduced(&self) -> bool {
        self.numerator.to_q().gcd(&self.denominator.to_q()).degree() == Some(0)
    }
}

impl fmt::Display for ZetaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

/// Validates that the table has no gaps and returns `N_1..N_max`, which is
/// the signed Frobenius power-sum sequence itself.
pub fn signed_eigenvalue_sums_from_counts(table: &CountTable) -> Result<Vec<BigInt>, ZetaError> {
    let mut out = Vec::with_capacity(table.counts.len());
    for (i, (&nu, n)) in table.counts.iter().enumerate() {
        let expected = i as u32 + 1;
        if nu != expected {
            return Err(ZetaError::MissingTerm(expected));
        }
        out.push(BigInt::from(n.clone()));
    }
    Ok(out)
}

/// Builds `Z` from a stabilized recurrence and the sequence `N_1, N_2, ...`.
pub fn zeta_from_recurrence(rec: &Recurrence, seq: &[BigInt]) -> Result<ZetaFunction, ZetaError> {
    if !rec.stabilized {
        return Err(ZetaError::NotStabilized);
    }
    let l = rec.order;
    if l == 0 {
        return Ok(ZetaFunction::new(IntPolyT::one(), IntPolyT::one()));
    }
    let c = rec.connection_poly();
    if c.degree() != Some(l) {
        return Err(ZetaError::NotAPowerSum("an eigenvalue would be zero".into()));
    }
    let s = QPoly::new(seq.iter().take(l).cloned().map(BigRational::from_integer).collect());
    // Σ N_ν T^ν = A / C
    let a = QPoly::t().mul(&c.mul(&s).truncate(l));
    let w = QPoly::t().mul(&c.derivative());
    let w_inv = w.inverse_mod(&c).ok_or_else(|| ZetaError::NotAPowerSum("repeated characteristic root".into()))?;
    let mult = a.mul(&w_inv).rem(&c).scale(&-BigRational::one());

    let minpoly = minimal_polynomial_mod(&mult, &c);
    let roots = integer_roots(&minpoly)?;

    let mut num = QPoly::one();
    let mut den = QPoly::one();
    let mut total = 0usize;
    for m in roots {
        let shifted = mult.sub(&QPoly::constant(BigRational::from_integer(m.clone())));
        let factor = c.gcd(&shifted).normalize_constant();
        total += factor.degree().unwrap_or(0);
        let e =
            m.magnitude().to_u32().ok_or_else(|| ZetaError::NonIntegralCoefficients(format!("multiplicity {m}")))?;
        if m.is_negative() {
            num = num.mul(&factor.pow(e));
        } else {
            den = den.mul(&factor.pow(e));
        }
    }
    if total != l {
        return Err(ZetaError::NonIntegralCoefficients("multiplicity classes do not cover the recurrence".into()));
    }
    let to_int = |p: &QPoly, what: &str| -> Result<IntPolyT, ZetaError> {
        let ints = p.to_integers().ok_or_else(|| ZetaError::NonIntegralCoefficients(format!("{what}: {p:?}")))?;
        IntPolyT::new(ints).map_err(|_| ZetaError::NonIntegralCoefficients(format!("{what} constant term")))
    };
    let zeta = ZetaFunction::new(to_int(&num, "numerator")?, to_int(&den, "denominator")?);
    if zeta.counts(seq.len()) != seq {
        return Err(ZetaError::NotAPowerSum("re-expanded counts disagree with the input".into()));
    }
    debug_assert!(zeta.is_reduced());
    Ok(zeta)
}

/// Minimal polynomial (monic, over ℚ) of `x` in `ℚ[T]/(m)`, by finding the
/// first linear dependence among `1, x, x^2, ...`.
fn minimal_polynomial_mod(x: &QPoly, m: &QPoly) -> QPoly {
    let dim = m.degree().expect("nonzero modulus");
    let vec_of = |p: &QPoly| (0..dim).map(|i| p.coeff(i)).collect::<Vec<_>>();
    let mut powers = vec![vec_of(&QPoly::one())];
    let mut cur = QPoly::one();
    loop {
        cur = cur.mul(x).rem(m);
        let target = vec_of(&cur);
        if let Some(sol) = solve_combination(&powers, &target) {
            // x^d = Σ sol_k x^k
            let mut c: Vec<BigRational> = sol.into_iter().map(|v| -v).collect();
            c.push(BigRational::one());
            return QPoly::new(c);
        }
        powers.push(target);
    }
}

/// Solves `Σ_k x_k cols[k] = target` exactly; `None` if inconsistent.
/// The columns are linearly independent.
fn solve_combination(cols: &[Vec<BigRational>], target: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = target.len();
    let ncols = cols.len();
    let mut mat: Vec<Vec<BigRational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<BigRational> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(target[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(ncols);
    for col in 0..ncols {
        let Some(p) = (pivot_row..rows).find(|&r| !mat[r][col].is_zero()) else {
            continue;
        };
        mat.swap(pivot_row, p);
        let inv = mat[pivot_row][col].recip();
        for v in mat[pivot_row].iter_mut() {
            *v *= &inv;
        }
        let pivot = mat[pivot_row].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, pv) in row.iter_mut().zip(&pivot) {
                    *x -= &f * pv;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if mat[pivot_row..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); ncols];
    for (r, &col) in pivots.iter().enumerate() {
        sol[col] = mat[r][ncols].clone();
    }
    Some(sol)
}

/// Largest |constant term| for which integer roots are searched by divisors.
const MAX_ROOT_SEARCH: u64 = 1 << 40;

/// All roots of a monic polynomial that must split into distinct nonzero
/// integer roots; anything else is an error.
fn integer_roots(p: &QPoly) -> Result<Vec<BigInt>, ZetaError> {
    let deg = p.degree().unwrap_or(0);
    let coeffs =
        p.to_integers().ok_or_else(|| ZetaError::NonIntegralCoefficients("multiplicities are not integers".into()))?;
    let c0 = coeffs[0]
        .magnitude()
        .to_u64()
        .filter(|&v| v > 0 && v <= MAX_ROOT_SEARCH)
        .ok_or_else(|| ZetaError::NonIntegralCoefficients("multiplicity polynomial out of range".into()))?;
    let eval = |x: &BigInt| coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
    let mut roots = Vec::new();
    let mut d = 1u64;
    while d * d <= c0 {
        if c0 % d == 0 {
            for cand in [d, c0 / d] {
                for sign in [1i64, -1] {
                    let x = BigInt::from(cand) * sign;
                    if !roots.contains(&x) && eval(&x).is_zero() {
                        roots.push(x);
                    }
                }
            }
        }
        d += 1;
    }
    if roots.len() != deg {
        return Err(ZetaError::NonIntegralCoefficients("multiplicities are not integers".into()));
    }
    roots.sort();
    Ok(roots)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconstructionStatus {
    Stabilized,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionOutcome {
    pub status: ReconstructionStatus,
    pub zeta: Option<ZetaFunction>,
    pub recurrence_order: usize,
    pub guard_terms_checked: usize,
}

/// Counts → recurrence → zeta. Too few terms or a failed guard term is an
/// inconclusive outcome, not an error.
pub fn reconstruct(seq: &[BigInt], guard: usize) -> Result<ReconstructionOutcome, ZetaError> {
    let rec = minimal_recurrence(seq, guard);
    if !rec.stabilized {
        return Ok(ReconstructionOutcome {
            status: ReconstructionStatus::Inconclusive,
            zeta: None,
            recurrence_order: rec.order,
            guard_terms_checked: rec.guard_terms_checked,
        });
    }
    let zeta = zeta_from_recurrence(&rec, seq)?;
    Ok(ReconstructionOutcome {
        status: ReconstructionStatus::Stabilized,
        zeta: Some(zeta),
        recurrence_order: rec.order,
        guard_terms_checked: rec.guard_terms_checked,
    })
}

pub fn reconstruct_table(table: &CountTable, guard: usize) -> Result<ReconstructionOutcome, ZetaError> {
    reconstruct(&signed_eigenvalue_sums_from_counts(table)?, guard)
}

/// Divisibility orders are `None` when infinite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub pass: bool,
    pub mu: u64,
    pub numerator_order: Option<u64>,
    pub denominator_order: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsReport>,
}

impl TheoremVerdict {
    /// The smaller of the two orders (`None` = infinite).
    pub fn order(&self) -> Option<u64> {
        match (self.numerator_order, self.denominator_order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

/// Passes iff every reciprocal zero and pole of `Z` is divisible by `q^μ` as
/// an algebraic integer, i.e. both uniform divisibility orders are `>= μ`.
pub fn verify_theorem(zeta: &ZetaFunction, q: &BigInt, mu: u64, bounds: Option<&BoundsReport>) -> TheoremVerdict {
    let numerator_order = zeta.numerator.uniform_divisibility_order(q);
    let denominator_order = zeta.denominator.uniform_divisibility_order(q);
    let mut v = TheoremVerdict { pass: false, mu, numerator_order, denominator_order, bounds: bounds.cloned() };
    v.pass = v.order().is_none_or(|o| o >= mu);
    v
}
