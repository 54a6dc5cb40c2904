//! Sparse multivariate polynomials over a finite field and the systems
//! `g_j = Π_i f_i^{a_ij}` built from them.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::{Embedding, FieldDesc, FieldElement, FieldError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial f_{index} has degree {degree}; every f_i needs degree >= 1")]
    InvalidDegree { index: usize, degree: u32 },
    #[error("polynomial f_{index} has degree {actual}, but {declared} was declared")]
    DegreeMismatch { index: usize, declared: u32, actual: u32 },
    #[error("a system needs at least one polynomial and one equation")]
    EmptySystem,
    #[error("exponent matrix must be {rows} x R with R >= 1 and equal row lengths")]
    ExponentShape { rows: usize },
    #[error("polynomial f_{0} is not homogeneous")]
    NotHomogeneous(usize),
    #[error("polynomials disagree on field or number of variables")]
    Inconsistent,
}

/// Canonical sparse polynomial: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: FieldDesc,
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: &FieldDesc, n_vars: usize) -> Self {
        MultiPoly { field: field.clone(), n_vars, terms: BTreeMap::new() }
    }

    pub fn constant(c: FieldElement, n_vars: usize) -> Self {
        let mut p = Self::zero(c.field(), n_vars);
        if !c.is_zero() {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    pub fn variable(field: &FieldDesc, n_vars: usize, var: usize) -> Self {
        let mut exps = vec![0; n_vars];
        exps[var] = 1;
        let mut p = Self::zero(field, n_vars);
        p.terms.insert(exps, field.one());
        p
    }

    /// Builds a polynomial from terms; repeated exponent vectors are summed.
    pub fn from_terms<I>(field: &FieldDesc, n_vars: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut p = Self::zero(field, n_vars);
        for (exps, c) in terms {
            if exps.len() != n_vars {
                return Err(PolyError::ArityMismatch { expected: n_vars, got: exps.len() });
            }
            p.add_term(exps, c)?;
        }
        Ok(p)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: FieldElement) -> Result<(), PolyError> {
        let sum = match self.terms.get(&exps) {
            Some(old) => old.add(&c)?,
            None => {
                if c.field() != &self.field {
                    return Err(FieldError::FieldMismatch {
                        left: self.field.to_string(),
                        right: c.field().to_string(),
                    }
                    .into());
                }
                c
            }
        };
        if sum.is_zero() {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, sum);
        }
        Ok(())
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &FieldElement)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Largest exponent of each variable.
    pub fn max_exponents(&self) -> Vec<u32> {
        let mut m = vec![0; self.n_vars];
        for e in self.terms.keys() {
            for (dst, &x) in m.iter_mut().zip(e) {
                *dst = (*dst).max(x);
            }
        }
        m
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, PolyError> {
        self.check_compatible(other)?;
        let mut out = MultiPoly::zero(&self.field, self.n_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<MultiPoly, PolyError> {
        let mut acc = MultiPoly::constant(self.field.one(), self.n_vars);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<(), PolyError> {
        if self.n_vars != other.n_vars {
            return Err(PolyError::ArityMismatch { expected: self.n_vars, got: other.n_vars });
        }
        if self.field != other.field {
            return Err(
                FieldError::FieldMismatch { left: self.field.to_string(), right: other.field.to_string() }.into()
            );
        }
        Ok(())
    }

    /// Evaluates at `point`, caching the powers of each coordinate.
    pub fn eval(&self, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        if point.len() != self.n_vars {
            return Err(PolyError::ArityMismatch { expected: self.n_vars, got: point.len() });
        }
        let max = self.max_exponents();
        let mut powers: Vec<Vec<FieldElement>> = Vec::with_capacity(self.n_vars);
        for (x, &m) in point.iter().zip(&max) {
            let mut row = Vec::with_capacity(m as usize + 1);
            row.push(self.field.one());
            for i in 0..m as usize {
                row.push(row[i].mul(x)?);
            }
            powers.push(row);
        }
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&powers[v][k as usize])?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Pushes every coefficient through a field embedding.
    pub fn embed(&self, emb: &Embedding) -> Result<MultiPoly, PolyError> {
        let mut out = MultiPoly::zero(emb.big(), self.n_vars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), emb.apply(c)?);
        }
        Ok(out)
    }

    /// Degree-preserving homogenization; the new variable is `x_0`.
    pub fn homogenize(&self) -> Result<MultiPoly, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let mut out = MultiPoly::zero(&self.field, self.n_vars + 1);
        for (e, c) in &self.terms {
            let mut ne = Vec::with_capacity(self.n_vars + 1);
            ne.push(d - e.iter().sum::<u32>());
            ne.extend_from_slice(e);
            out.terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    /// Sum of the terms of maximal total degree.
    pub fn leading_form(&self) -> Result<MultiPoly, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e.iter().sum::<u32>() == d)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect();
        Ok(MultiPoly { field: self.field.clone(), n_vars: self.n_vars, terms })
    }

    /// Substitutes `value` for variable `var`, dropping it from the ring.
    pub fn fix_variable(&self, var: usize, value: &FieldElement) -> Result<MultiPoly, PolyError> {
        if var >= self.n_vars {
            return Err(PolyError::ArityMismatch { expected: self.n_vars, got: var + 1 });
        }
        let mut out = MultiPoly::zero(&self.field, self.n_vars - 1);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            let k = ne.remove(var);
            out.add_term(ne, c.mul(&value.pow_u64(k as u64))?)?;
        }
        Ok(out)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| if k == 1 { format!("x{v}") } else { format!("x{v}^{k}") })
                    .collect();
                match (c.is_one(), mono.is_empty()) {
                    (_, true) => format!("{c}"),
                    (true, false) => mono.join("*"),
                    (false, false) => format!("({c})*{}", mono.join("*")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Affine,
    Projective,
}

/// Polynomials `f_1..f_r` and an `r x R` exponent matrix; equation `j` is
/// `g_j = Π_i f_i^{a_ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    polys: Vec<MultiPoly>,
    degrees: Vec<u32>,
    exponents: Vec<Vec<u32>>,
    mode: Mode,
}

impl PolySystem {
    pub fn new(polys: Vec<MultiPoly>, exponents: Vec<Vec<u32>>, mode: Mode) -> Result<Self, PolyError> {
        if polys.is_empty() {
            return Err(PolyError::EmptySystem);
        }
        let rows = polys.len();
        let cols = exponents.first().map_or(0, Vec::len);
        if exponents.len() != rows || cols == 0 || exponents.iter().any(|r| r.len() != cols) {
            return Err(PolyError::ExponentShape { rows });
        }
        let (field, n) = (polys[0].field().clone(), polys[0].n_vars());
        let mut degrees = Vec::with_capacity(rows);
        for (i, f) in polys.iter().enumerate() {
            if f.field() != &field || f.n_vars() != n {
                return Err(PolyError::Inconsistent);
            }
            let d = f.degree().unwrap_or(0);
            if d == 0 {
                return Err(PolyError::InvalidDegree { index: i + 1, degree: d });
            }
            if mode == Mode::Projective && !f.is_homogeneous() {
                return Err(PolyError::NotHomogeneous(i + 1));
            }
            degrees.push(d);
        }
        Ok(PolySystem { polys, degrees, exponents, mode })
    }

    /// Like [`PolySystem::new`], but rejects declared degrees that disagree
    /// with the polynomials.
    pub fn with_declared_degrees(
        polys: Vec<MultiPoly>,
        exponents: Vec<Vec<u32>>,
        mode: Mode,
        declared: &[u32],
    ) -> Result<Self, PolyError> {
        let sys = Self::new(polys, exponents, mode)?;
        for (i, (&d, &a)) in declared.iter().zip(&sys.degrees).enumerate() {
            if d != a {
                return Err(PolyError::DegreeMismatch { index: i + 1, declared: d, actual: a });
            }
        }
        if declared.len() != sys.degrees.len() {
            return Err(PolyError::ExponentShape { rows: sys.degrees.len() });
        }
        Ok(sys)
    }

    pub fn polys(&self) -> &[MultiPoly] {
        &self.polys
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn field(&self) -> &FieldDesc {
        self.polys[0].field()
    }

    pub fn n_vars(&self) -> usize {
        self.polys[0].n_vars()
    }

    /// r, the number of factors f_i.
    pub fn num_factors(&self) -> usize {
        self.polys.len()
    }

    /// R, the number of equations g_j.
    pub fn num_equations(&self) -> usize {
        self.exponents[0].len()
    }

    /// Column `j` of the exponent matrix.
    pub fn column(&self, j: usize) -> Vec<u32> {
        self.exponents.iter().map(|row| row[j]).collect()
    }

    /// True when `g_j` is the empty product, i.e. the constant 1.
    pub fn equation_is_constant(&self, j: usize) -> bool {
        self.exponents.iter().all(|row| row[j] == 0)
    }

    /// Same polynomials, different exponent matrix (and possibly mode).
    pub fn with_exponents(&self, exponents: Vec<Vec<u32>>, mode: Mode) -> Result<Self, PolyError> {
        Self::new(self.polys.clone(), exponents, mode)
    }

    /// Whether every `g_j` vanishes at `point`. Uses the factored form:
    /// over a field `g_j(x) = 0` iff some `f_i` with `a_ij > 0` vanishes.
    pub fn vanishes_at(&self, point: &[FieldElement]) -> Result<bool, PolyError> {
        let zeros = self.polys.iter().map(|f| f.eval(point).map(|v| v.is_zero())).collect::<Result<Vec<_>, _>>()?;
        Ok((0..self.num_equations()).all(|j| self.exponents.iter().zip(&zeros).any(|(row, &z)| row[j] > 0 && z)))
    }

    /// The same system with coefficients pushed into an extension field.
    pub fn embed(&self, emb: &Embedding) -> Result<PolySystem, PolyError> {
        let polys = self.polys.iter().map(|f| f.embed(emb)).collect::<Result<Vec<_>, _>>()?;
        Self::new(polys, self.exponents.clone(), self.mode)
    }

    /// Fully expanded `g_j`.
    pub fn expand_equation(&self, j: usize) -> Result<MultiPoly, PolyError> {
        let mut acc = MultiPoly::constant(self.field().one(), self.n_vars());
        for (f, row) in self.polys.iter().zip(&self.exponents) {
            acc = acc.mul(&f.pow(row[j])?)?;
        }
        Ok(acc)
    }
}

/// `vanishes_on_system` under its operation name.
pub fn vanishes_on_system(sys: &PolySystem, point: &[FieldElement]) -> Result<bool, PolyError> {
    sys.vanishes_at(point)
}
