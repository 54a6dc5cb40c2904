//! Dense univariate polynomials over ℚ, constant term first.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct QPoly(Vec<BigRational>);

impl QPoly {
    pub(crate) fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        QPoly(c)
    }

    pub(crate) fn from_ints(c: &[BigInt]) -> Self {
        Self::new(c.iter().cloned().map(BigRational::from_integer).collect())
    }

    pub(crate) fn zero() -> Self {
        QPoly(Vec::new())
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub(crate) fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// `T`
    pub(crate) fn t() -> Self {
        QPoly(vec![BigRational::zero(), BigRational::one()])
    }

    pub(crate) fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub(crate) fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub(crate) fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub(crate) fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.0.len().max(o.0.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub(crate) fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub(crate) fn scale(&self, c: &BigRational) -> QPoly {
        QPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub(crate) fn pow(&self, e: u32) -> QPoly {
        (0..e).fold(QPoly::one(), |acc, _| acc.mul(self))
    }

    /// Truncation mod `T^n`.
    pub(crate) fn truncate(&self, n: usize) -> QPoly {
        QPoly::new(self.0.iter().take(n).cloned().collect())
    }

    pub(crate) fn derivative(&self) -> QPoly {
        QPoly::new(self.0.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(i.into())).collect())
    }

    pub(crate) fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let mut r = self.0.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd)];
        let inv = d.lead().recip();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let c = &r[top] * &inv;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[top - dd + i] -= &c * dc;
                }
                q[top - dd] = c;
            }
            r.pop();
        }
        (QPoly::new(q), QPoly::new(r))
    }

    pub(crate) fn rem(&self, d: &QPoly) -> QPoly {
        self.div_rem(d).1
    }

    /// Scales so the constant term is 1. Panics if it is 0.
    pub(crate) fn normalize_constant(&self) -> QPoly {
        let c0 = self.coeff(0);
        assert!(!c0.is_zero(), "constant term is zero");
        self.scale(&c0.recip())
    }

    /// Scales to a monic polynomial (the zero polynomial stays zero).
    pub(crate) fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        self.scale(&self.lead().recip())
    }

    pub(crate) fn gcd(&self, o: &QPoly) -> QPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Inverse of `self` modulo `m`, if `gcd(self, m) = 1`.
    pub(crate) fn inverse_mod(&self, m: &QPoly) -> Option<QPoly> {
        // invariant: s_i * self ≡ r_i (mod m)
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (QPoly::zero(), QPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.degree() != Some(0) {
            return None;
        }
        Some(s0.scale(&r0.coeff(0).recip()).rem(m))
    }

    /// Integer coefficients, if every coefficient is integral.
    pub(crate) fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.0.iter().map(|c| c.is_integer().then(|| c.to_integer())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[i64]) -> QPoly {
        QPoly::from_ints(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
    }

    #[test]
    fn division_and_gcd() {
        // (1 - T)(1 - 3T) and (1 - T)(1 + 2T)
        let a = q(&[1, -4, 3]);
        let b = q(&[1, 1, -2]);
        assert_eq!(a.gcd(&b), q(&[-1, 1]));
        let (quo, rem) = a.div_rem(&q(&[1, -1]));
        assert_eq!(quo, q(&[1, -3]));
        assert!(rem.is_zero());
        assert_eq!(a.derivative(), q(&[-4, 6]));
    }

    #[test]
    fn modular_inverse() {
        let m = q(&[1, 0, 1]);
        let x = q(&[2, 1]);
        let inv = x.inverse_mod(&m).unwrap();
        assert_eq!(x.mul(&inv).rem(&m), QPoly::one());
        assert!(q(&[1, 1]).inverse_mod(&q(&[1, 2, 1])).is_none());
    }
}
