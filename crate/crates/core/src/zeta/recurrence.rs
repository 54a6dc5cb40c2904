//! Minimal linear recurrences over ℚ (Berlekamp–Massey) with guard terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::qpoly::QPoly;

/// Berlekamp–Massey over ℚ. Returns the connection polynomial
/// `C(T) = 1 + c_1 T + ... + c_L T^L` and the linear complexity `L`, so that
/// `s_i = -Σ_{j=1}^{L} c_j s_{i-j}` for `L <= i < len`.
pub(crate) fn berlekamp_massey(seq: &[BigRational]) -> (QPoly, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last = BigRational::one();

    for i in 0..seq.len() {
        let mut d = seq[i].clone();
        for j in 1..c.len().min(i + 1) {
            d += &c[j] * &seq[i - j];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &last;
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, BigRational::zero());
        }
        for (j, bj) in b.iter().enumerate() {
            c[j + m] -= &coef * bj;
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = prev;
            last = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    (QPoly::new(c), l)
}

/// A linear recurrence fitted on all but the last `guard` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    /// `1, c_1, ..., c_L`
    pub connection: Vec<BigRational>,
    pub order: usize,
    pub fitted_terms: usize,
    pub guard_terms_checked: usize,
    /// The fit was determined (`2L <= fitted`) and predicted every guard term.
    pub stabilized: bool,
}

impl Recurrence {
    pub(crate) fn connection_poly(&self) -> QPoly {
        QPoly::new(self.connection.clone())
    }

    /// Predicts `s_i` from the previous `order` terms.
    pub fn predict(&self, prev: &[BigRational]) -> BigRational {
        let i = prev.len();
        let mut acc = BigRational::zero();
        for (j, cj) in self.connection.iter().enumerate().skip(1) {
            acc -= cj * &prev[i - j];
        }
        acc
    }
}

/// Fits the minimal recurrence on the first `len - guard` terms, then checks
/// it against the withheld `guard` terms. A zero guard can never stabilize.
pub fn minimal_recurrence(seq: &[BigInt], guard: usize) -> Recurrence {
    let q: Vec<BigRational> = seq.iter().cloned().map(BigRational::from_integer).collect();
    let fitted = seq.len().saturating_sub(guard);
    let (c, order) = berlekamp_massey(&q[..fitted]);
    let mut connection = c.coeffs().to_vec();
    connection.resize(order + 1, BigRational::zero());
    let mut rec = Recurrence { connection, order, fitted_terms: fitted, guard_terms_checked: 0, stabilized: false };
    if guard == 0 || 2 * order > fitted || seq.len() < guard {
        return rec;
    }
    let mut ok = true;
    for i in fitted..seq.len() {
        if rec.predict(&q[..i]) != q[i] {
            ok = false;
            break;
        }
        rec.guard_terms_checked += 1;
    }
    rec.stabilized = ok;
    rec
}
