//! Exhaustive point counting over F_{q^ν}, the count-level identities
//! (cone, excision, inclusion–exclusion) and q-adic divisibility checks.
//!
//! All counts are exact. The enumeration space is split into contiguous
//! chunks that are counted independently and summed, so the result does not
//! depend on the number of workers.

mod table;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{embed, make_field, FieldError};
use crate::poly::{Mode, MultiPoly, PolyError, PolySystem};
use table::{TableField, ZERO};

pub use table::MAX_TABLE_ORDER;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("budget exceeded: {required} evaluations required, {allowed} allowed")]
    BudgetExceeded { required: BigUint, allowed: BigUint },
    #[error("polynomial f_{0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("the extension degree nu must be >= 1")]
    ZeroNu,
    #[error("equation g_{0} is a nonzero constant; the cone identity needs nonconstant equations")]
    ConstantEquation(usize),
    #[error("this check needs exactly one equation (R = 1), got R = {0}")]
    RequiresSingleEquation(usize),
    #[error("this check needs at least two equations (R >= 2), got R = {0}")]
    RequiresSeveralEquations(usize),
    #[error("at most 64 factors f_i are supported, got {0}")]
    TooManyFactors(usize),
}

/// Cap on the number of point evaluations a single call may perform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_evaluations: BigUint,
}

impl Budget {
    pub fn new(max_evaluations: impl Into<BigUint>) -> Self {
        let max_evaluations = max_evaluations.into();
        assert!(!max_evaluations.is_zero(), "budget must be positive");
        Budget { max_evaluations }
    }

    fn check(&self, required: &BigUint) -> Result<(), CountError> {
        if required > &self.max_evaluations {
            return Err(CountError::BudgetExceeded {
                required: required.clone(),
                allowed: self.max_evaluations.clone(),
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(100_000_000u64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CountKind {
    #[serde(rename = "affine_X")]
    AffineX,
    #[serde(rename = "affine_complement")]
    AffineComplement,
    #[serde(rename = "projective_X")]
    ProjectiveX,
    #[serde(rename = "projective_complement")]
    ProjectiveComplement,
}

/// `ν ↦ N_ν` for one of the four counted sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    #[serde(with = "crate::serde_big::uint")]
    pub base_q: BigUint,
    pub kind: CountKind,
    #[serde(with = "crate::serde_big::uint_map")]
    pub counts: BTreeMap<u32, BigUint>,
}

impl CountTable {
    pub fn new(base_q: BigUint, kind: CountKind) -> Self {
        CountTable { base_q, kind, counts: BTreeMap::new() }
    }
}

/// `|A^n(F_Q)| = Q^n`.
pub fn affine_points(big_q: &BigUint, n: usize) -> BigUint {
    big_q.pow(n as u32)
}

/// `|P^{n-1}(F_Q)| = (Q^n - 1)/(Q - 1)` for `n` homogeneous coordinates.
pub fn projective_points(big_q: &BigUint, n: usize) -> BigUint {
    (0..n as u32).map(|i| big_q.pow(i)).sum()
}

/// Counting driver: worker count plus budget, and a running total of
/// evaluations for telemetry.
#[derive(Debug)]
pub struct Counter {
    workers: usize,
    budget: Budget,
    evaluations: AtomicU64,
}

impl Counter {
    pub fn new(budget: Budget, workers: usize) -> Self {
        Counter { workers: workers.max(1), budget, evaluations: AtomicU64::new(0) }
    }

    pub fn with_default_workers(budget: Budget) -> Self {
        let w = std::thread::available_parallelism().map_or(1, |n| n.get());
        Self::new(budget, w)
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Point evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    /// `|{x ∈ F_{q^ν}^n : g_j(x) = 0 ∀j}|`.
    pub fn count_affine(&self, sys: &PolySystem, nu: u32) -> Result<BigUint, CountError> {
        let big_q = extension_order(sys, nu)?;
        self.budget.check(&affine_points(&big_q, sys.n_vars()))?;
        let compiled = CompiledSystem::new(sys, nu)?;
        Ok(BigUint::from(self.count_box(&compiled, &[])))
    }

    pub fn count_affine_complement(&self, sys: &PolySystem, nu: u32) -> Result<BigUint, CountError> {
        let big_q = extension_order(sys, nu)?;
        let x = self.count_affine(sys, nu)?;
        Ok(affine_points(&big_q, sys.n_vars()) - x)
    }

    /// Points of `X^proj ⊂ P^{n-1}`, enumerated as tuples whose first
    /// nonzero coordinate is 1.
    pub fn count_projective(&self, sys: &PolySystem, nu: u32) -> Result<BigUint, CountError> {
        ensure_homogeneous(sys)?;
        let big_q = extension_order(sys, nu)?;
        self.budget.check(&projective_points(&big_q, sys.n_vars()))?;
        let compiled = CompiledSystem::new(sys, nu)?;
        let n = sys.n_vars();
        let mut total = 0u64;
        for lead in 0..n {
            let mut prefix = vec![ZERO; lead];
            prefix.push(0); // log(1)
            total += self.count_box(&compiled, &prefix);
        }
        Ok(BigUint::from(total))
    }

    pub fn count_projective_complement(&self, sys: &PolySystem, nu: u32) -> Result<BigUint, CountError> {
        let big_q = extension_order(sys, nu)?;
        let x = self.count_projective(sys, nu)?;
        Ok(projective_points(&big_q, sys.n_vars()) - x)
    }

    /// `|X(F_Q)| = 1 + (Q - 1)·|X^proj(F_Q)|` for a homogeneous system whose
    /// equations are all nonconstant.
    pub fn cone_identity_check(&self, sys: &PolySystem, nu: u32) -> Result<ConeWitness, CountError> {
        ensure_homogeneous(sys)?;
        if let Some(j) = (0..sys.num_equations()).find(|&j| sys.equation_is_constant(j)) {
            return Err(CountError::ConstantEquation(j + 1));
        }
        let big_q = extension_order(sys, nu)?;
        let total = affine_points(&big_q, sys.n_vars()) + projective_points(&big_q, sys.n_vars());
        self.budget.check(&total)?;
        let affine = self.count_affine(sys, nu)?;
        let projective = self.count_projective(sys, nu)?;
        let holds = affine == BigUint::one() + (&big_q - 1u32) * &projective;
        Ok(ConeWitness { nu, affine, projective, holds })
    }

    /// Count shadow of excision: `|A^n∖G| = |P^n∖G^proj| - |P^{n-1}∖G_0^proj|`
    /// for the single hypersurface `G : Π f_i^{a_i} = 0`.
    pub fn excision_identity_check(&self, sys: &PolySystem, nu: u32) -> Result<ExcisionWitness, CountError> {
        if sys.num_equations() != 1 {
            return Err(CountError::RequiresSingleEquation(sys.num_equations()));
        }
        let n = sys.n_vars();
        let big_q = extension_order(sys, nu)?;
        let total = affine_points(&big_q, n) + projective_points(&big_q, n + 1) + projective_points(&big_q, n);
        self.budget.check(&total)?;

        let exps = sys.exponents().to_vec();
        let homog: Vec<MultiPoly> = sys.polys().iter().map(|f| f.homogenize()).collect::<Result<_, _>>()?;
        let leading: Vec<MultiPoly> = sys.polys().iter().map(|f| f.leading_form()).collect::<Result<_, _>>()?;
        let g_proj = PolySystem::new(homog, exps.clone(), Mode::Projective)?;
        let g0_proj = PolySystem::new(leading, exps, Mode::Projective)?;

        let affine_complement = self.count_affine_complement(sys, nu)?;
        let projective_complement = self.count_projective_complement(&g_proj, nu)?;
        let infinity_complement = self.count_projective_complement(&g0_proj, nu)?;
        let holds = &affine_complement + &infinity_complement == projective_complement;
        Ok(ExcisionWitness { nu, affine_complement, projective_complement, infinity_complement, holds })
    }

    /// `|A^n∖X| = Σ_{∅≠S} (-1)^{|S|+1} |∩_{j∈S} U_j|`, each intersection
    /// counted as the complement of the hypersurface `Π_{j∈S} g_j = 0`.
    pub fn inclusion_exclusion_check(
        &self,
        sys: &PolySystem,
        nu: u32,
    ) -> Result<InclusionExclusionWitness, CountError> {
        let big_r = sys.num_equations();
        if big_r < 2 {
            return Err(CountError::RequiresSeveralEquations(big_r));
        }
        let big_q = extension_order(sys, nu)?;
        let subsets = (1u64 << big_r) - 1;
        self.budget.check(&(affine_points(&big_q, sys.n_vars()) * (subsets + 1)))?;

        let lhs = self.count_affine_complement(sys, nu)?;
        let mut plus = BigUint::zero();
        let mut minus = BigUint::zero();
        let mut terms = Vec::new();
        for mask in 1..=subsets {
            let members: Vec<usize> = (0..big_r).filter(|j| mask >> j & 1 == 1).collect();
            let column: Vec<Vec<u32>> =
                sys.exponents().iter().map(|row| vec![members.iter().map(|&j| row[j]).sum()]).collect();
            let single = sys.with_exponents(column, sys.mode())?;
            let c = self.count_affine_complement(&single, nu)?;
            if members.len() % 2 == 1 {
                plus += &c;
            } else {
                minus += &c;
            }
            terms.push(SubsetCount { subset: members.iter().map(|j| j + 1).collect(), complement: c });
        }
        let holds = plus >= minus && lhs == &plus - &minus;
        Ok(InclusionExclusionWitness { nu, lhs, terms, holds })
    }

    /// Count of vanishing points in the box `prefix × F_Q^{n - |prefix|}`.
    fn count_box(&self, sys: &CompiledSystem, prefix: &[u32]) -> u64 {
        let n = sys.n;
        let q = sys.tf.order() as u64;
        let free = n - prefix.len();
        if free == 0 {
            self.evaluations.fetch_add(1, Ordering::Relaxed);
            let (outer, last) = prefix.split_at(n - 1);
            return u64::from(sys.vanishes(&sys.coefficients(outer), last[0]));
        }
        // outer = free variables except the last one
        let outer_free = free - 1;
        let outer_size = q.pow(outer_free as u32);
        let workers = (self.workers as u64).min(outer_size).max(1);
        let chunk = outer_size.div_ceil(workers);
        let ranges: Vec<(u64, u64)> =
            (0..workers).map(|w| (w * chunk, ((w + 1) * chunk).min(outer_size))).filter(|(a, b)| a < b).collect();
        let total = if ranges.len() == 1 {
            sys.count_range(prefix, outer_free, ranges[0])
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> =
                    ranges.iter().map(|&r| s.spawn(move || sys.count_range(prefix, outer_free, r))).collect();
                handles.into_iter().map(|h| h.join().expect("counting worker panicked")).sum()
            })
        };
        self.evaluations.fetch_add(outer_size * q, Ordering::Relaxed);
        total
    }
}

fn extension_order(sys: &PolySystem, nu: u32) -> Result<BigUint, CountError> {
    if nu == 0 {
        return Err(CountError::ZeroNu);
    }
    Ok(sys.field().order().pow(nu))
}

fn ensure_homogeneous(sys: &PolySystem) -> Result<(), CountError> {
    match sys.polys().iter().position(|f| !f.is_homogeneous()) {
        Some(i) => Err(CountError::NotHomogeneous(i + 1)),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeWitness {
    pub nu: u32,
    #[serde(with = "crate::serde_big::uint")]
    pub affine: BigUint,
    #[serde(with = "crate::serde_big::uint")]
    pub projective: BigUint,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcisionWitness {
    pub nu: u32,
    /// `|A^n∖G|`
    #[serde(with = "crate::serde_big::uint")]
    pub affine_complement: BigUint,
    /// `|P^n∖G^proj|`
    #[serde(with = "crate::serde_big::uint")]
    pub projective_complement: BigUint,
    /// `|P^{n-1}∖G_0^proj|`
    #[serde(with = "crate::serde_big::uint")]
    pub infinity_complement: BigUint,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetCount {
    /// 1-based equation indices
    pub subset: Vec<usize>,
    #[serde(with = "crate::serde_big::uint")]
    pub complement: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionExclusionWitness {
    pub nu: u32,
    #[serde(with = "crate::serde_big::uint")]
    pub lhs: BigUint,
    pub terms: Vec<SubsetCount>,
    pub holds: bool,
}

/// Largest `m` with `q^m | value`; `None` (infinite) for zero.
pub fn q_adic_order(value: &BigUint, q: &BigUint) -> Option<u64> {
    if value.is_zero() {
        return None;
    }
    assert!(q > &BigUint::one(), "q must be at least 2");
    let mut v = value.clone();
    let mut m = 0;
    loop {
        let (quot, rem) = v.div_rem(q);
        if !rem.is_zero() {
            return Some(m);
        }
        v = quot;
        m += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisibilityRow {
    pub nu: u32,
    #[serde(with = "crate::serde_big::uint")]
    pub count: BigUint,
    /// required power of q: `nu * exponent`
    pub required: u64,
    /// `None` means infinite (count 0)
    pub order: Option<u64>,
    pub divisible: bool,
}

/// For each ν, whether `q^{ν·exponent}` divides `N_ν`, with the exact q-adic order.
pub fn divisibility_check(table: &CountTable, exponent: u64) -> Vec<DivisibilityRow> {
    table
        .counts
        .iter()
        .map(|(&nu, count)| {
            let order = q_adic_order(count, &table.base_q);
            let required = nu as u64 * exponent;
            DivisibilityRow {
                nu,
                count: count.clone(),
                required,
                order,
                divisible: order.is_none_or(|o| o >= required),
            }
        })
        .collect()
}

/// Convenience wrappers with the default budget and worker count.
pub fn count_affine(sys: &PolySystem, nu: u32, budget: &Budget) -> Result<BigUint, CountError> {
    Counter::with_default_workers(budget.clone()).count_affine(sys, nu)
}

pub fn count_affine_complement(sys: &PolySystem, nu: u32, budget: &Budget) -> Result<BigUint, CountError> {
    Counter::with_default_workers(budget.clone()).count_affine_complement(sys, nu)
}

pub fn count_projective(sys: &PolySystem, nu: u32, budget: &Budget) -> Result<BigUint, CountError> {
    Counter::with_default_workers(budget.clone()).count_projective(sys, nu)
}

pub fn count_projective_complement(sys: &PolySystem, nu: u32, budget: &Budget) -> Result<BigUint, CountError> {
    Counter::with_default_workers(budget.clone()).count_projective_complement(sys, nu)
}

// ---- compiled evaluation ----

struct CompiledTerm {
    coeff: u32,
    /// (variable, exponent) over the first n-1 variables, exponents > 0
    powers: Vec<(usize, u32)>,
}

/// `f = Σ_e c_e(x_0..x_{n-2}) · x_{n-1}^e`
struct CompiledPoly {
    groups: Vec<(u32, Vec<CompiledTerm>)>,
}

struct CompiledSystem {
    tf: TableField,
    n: usize,
    polys: Vec<CompiledPoly>,
    /// bit i set iff a_ij > 0; an empty mask is the constant equation 1
    equation_masks: Vec<u64>,
}

impl CompiledSystem {
    fn new(sys: &PolySystem, nu: u32) -> Result<Self, CountError> {
        if sys.num_factors() > 64 {
            return Err(CountError::TooManyFactors(sys.num_factors()));
        }
        let small = sys.field();
        let big = make_field(small.p(), small.k() * nu as usize)?;
        let tf = TableField::new(&big)?;
        let emb = embed(small, &big)?;
        let n = sys.n_vars();
        let mut polys = Vec::with_capacity(sys.num_factors());
        for f in sys.polys() {
            let mut groups: BTreeMap<u32, Vec<CompiledTerm>> = BTreeMap::new();
            for (exps, c) in f.terms() {
                let coeff = tf.log_of(&emb.apply(c)?);
                let powers = exps[..n - 1].iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| (v, e)).collect();
                groups.entry(exps[n - 1]).or_default().push(CompiledTerm { coeff, powers });
            }
            polys.push(CompiledPoly { groups: groups.into_iter().collect() });
        }
        let equation_masks = (0..sys.num_equations())
            .map(|j| {
                sys.exponents().iter().enumerate().filter(|(_, row)| row[j] > 0).fold(0u64, |m, (i, _)| m | 1 << i)
            })
            .collect();
        Ok(CompiledSystem { tf, n, polys, equation_masks })
    }

    /// Group coefficients `c_e` of every polynomial at the outer point.
    fn coefficients(&self, outer: &[u32]) -> Vec<Vec<(u32, u32)>> {
        let tf = &self.tf;
        self.polys
            .iter()
            .map(|p| {
                p.groups
                    .iter()
                    .map(|(e, terms)| {
                        let c = terms.iter().fold(ZERO, |acc, t| {
                            let v = t.powers.iter().fold(t.coeff, |v, &(var, k)| tf.mul(v, tf.pow(outer[var], k)));
                            tf.add(acc, v)
                        });
                        (*e, c)
                    })
                    .collect()
            })
            .collect()
    }

    #[inline]
    fn zero_mask_at(&self, coeffs: &[Vec<(u32, u32)>], x: u32) -> u64 {
        let tf = &self.tf;
        let mut mask = 0u64;
        for (i, groups) in coeffs.iter().enumerate() {
            let v = groups.iter().fold(ZERO, |acc, &(e, c)| tf.add(acc, tf.mul(c, tf.pow(x, e))));
            if v == ZERO {
                mask |= 1 << i;
            }
        }
        mask
    }

    #[inline]
    fn vanishes_mask(&self, zero_mask: u64) -> bool {
        self.equation_masks.iter().all(|&m| m & zero_mask != 0)
    }

    fn vanishes(&self, coeffs: &[Vec<(u32, u32)>], x: u32) -> bool {
        self.vanishes_mask(self.zero_mask_at(coeffs, x))
    }

    /// Counts points whose outer free coordinates have mixed-radix index in
    /// `range`, looping over every value of the last coordinate.
    fn count_range(&self, prefix: &[u32], outer_free: usize, range: (u64, u64)) -> u64 {
        let tf = &self.tf;
        let q = tf.order() as u64;
        let m = tf.group_order();
        let mut digits = vec![0u64; outer_free];
        let mut r = range.0;
        for d in digits.iter_mut().rev() {
            *d = r % q;
            r /= q;
        }
        let mut outer: Vec<u32> = prefix.to_vec();
        outer.extend(digits.iter().map(|&d| tf.log_of_index(d as u32)));

        let mut count = 0u64;
        // per-group running log of x^e as x = g^t steps through the group
        let mut steps: Vec<Vec<u32>> = Vec::new();
        for _ in range.0..range.1 {
            let coeffs = self.coefficients(&outer);
            // x = 0
            let mut zero_mask = 0u64;
            for (i, groups) in coeffs.iter().enumerate() {
                let c0 = groups.iter().find(|(e, _)| *e == 0).map_or(ZERO, |&(_, c)| c);
                if c0 == ZERO {
                    zero_mask |= 1 << i;
                }
            }
            count += u64::from(self.vanishes_mask(zero_mask));
            // x = g^t for t = 0..m; term c·x^e has log c + t·e
            steps.clear();
            steps.extend(coeffs.iter().map(|g| g.iter().map(|&(_, c)| c).collect()));
            let incs: Vec<Vec<u32>> = coeffs.iter().map(|g| g.iter().map(|&(e, _)| e % m.max(1)).collect()).collect();
            for _ in 0..m {
                let mut zero_mask = 0u64;
                for (i, (cur, inc)) in steps.iter_mut().zip(&incs).enumerate() {
                    let mut v = ZERO;
                    for (c, &d) in cur.iter_mut().zip(inc) {
                        v = tf.add(v, *c);
                        if *c != ZERO {
                            *c += d;
                            if *c >= m {
                                *c -= m;
                            }
                        }
                    }
                    if v == ZERO {
                        zero_mask |= 1 << i;
                    }
                }
                count += u64::from(self.vanishes_mask(zero_mask));
            }
            // odometer over the outer free coordinates
            for pos in (0..outer_free).rev() {
                digits[pos] += 1;
                let done = digits[pos] < q;
                if !done {
                    digits[pos] = 0;
                }
                outer[prefix.len() + pos] = tf.log_of_index(digits[pos] as u32);
                if done {
                    break;
                }
            }
        }
        count
    }
}

/// Exhaustive count via generic field arithmetic; slow, used to check the
/// table-driven path.
pub fn count_affine_naive(sys: &PolySystem, nu: u32) -> Result<BigUint, CountError> {
    if nu == 0 {
        return Err(CountError::ZeroNu);
    }
    let small = sys.field();
    let big = make_field(small.p(), small.k() * nu as usize)?;
    let emb = embed(small, &big)?;
    let lifted = sys.embed(&emb)?;
    let els: Vec<_> = big.elements()?.collect();
    let n = sys.n_vars();
    let q = els.len();
    let mut idx = vec![0usize; n];
    let mut count = 0u64;
    loop {
        let point: Vec<_> = idx.iter().map(|&i| els[i].clone()).collect();
        count += u64::from(lifted.vanishes_at(&point)?);
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(BigUint::from(count));
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < q {
                break;
            }
            idx[pos] = 0;
        }
    }
}
