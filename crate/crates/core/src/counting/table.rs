//! Log / Zech-logarithm tables for a small field.
//!
//! Nonzero elements are stored as discrete logs base a primitive element `g`;
//! zero is the sentinel [`ZERO`]. Multiplication adds logs, addition uses
//! `g^a + g^b = g^a (1 + g^(b-a)) = g^(a + zech(b-a))`.

use crate::field::{order_or_err, primitive_element, FieldDesc, FieldElement, FieldError};

pub(crate) const ZERO: u32 = u32::MAX;

/// Largest field order for which tables are built.
pub const MAX_TABLE_ORDER: u64 = 1 << 22;

pub(crate) struct TableField {
    q: u32,
    /// q - 1, the order of the multiplicative group
    m: u32,
    /// element index -> log (ZERO for index 0)
    log: Vec<u32>,
    zech: Vec<u32>,
}

impl TableField {
    pub(crate) fn new(field: &FieldDesc) -> Result<Self, FieldError> {
        let q = order_or_err(field)?;
        if q > MAX_TABLE_ORDER {
            return Err(FieldError::TooLarge(field.order().clone()));
        }
        let m = (q - 1) as u32;
        let g = primitive_element(field)?;
        let mut log = vec![ZERO; q as usize];
        let mut exp = vec![0u32; m as usize];
        let mut x = field.one();
        for t in 0..m {
            let idx = x.index().expect("small field") as u32;
            exp[t as usize] = idx;
            log[idx as usize] = t;
            x = x.mul(&g)?;
        }
        let p = field.p() as u32;
        let zech = exp
            .iter()
            .map(|&idx| {
                // 1 + element: bump the constant coefficient (lowest base-p digit)
                let c0 = idx % p;
                let bumped = idx - c0 + (c0 + 1) % p;
                log[bumped as usize]
            })
            .collect();
        Ok(TableField { q: q as u32, m, log, zech })
    }

    pub(crate) fn order(&self) -> u32 {
        self.q
    }

    /// Size of the multiplicative group.
    pub(crate) fn group_order(&self) -> u32 {
        self.m
    }

    pub(crate) fn log_of_index(&self, idx: u32) -> u32 {
        self.log[idx as usize]
    }

    pub(crate) fn log_of(&self, x: &FieldElement) -> u32 {
        self.log_of_index(x.index().expect("small field") as u32)
    }

    #[inline]
    pub(crate) fn mul(&self, a: u32, b: u32) -> u32 {
        if a == ZERO || b == ZERO {
            return ZERO;
        }
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn add(&self, a: u32, b: u32) -> u32 {
        if a == ZERO {
            return b;
        }
        if b == ZERO {
            return a;
        }
        let d = if b >= a { b - a } else { b + self.m - a };
        let z = self.zech[d as usize];
        if z == ZERO {
            return ZERO;
        }
        let s = a + z;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    /// `x^e` for `x` in log form.
    #[inline]
    pub(crate) fn pow(&self, a: u32, e: u32) -> u32 {
        if e == 0 {
            return 0;
        }
        if a == ZERO {
            return ZERO;
        }
        ((a as u64 * e as u64) % self.m as u64) as u32
    }
}
