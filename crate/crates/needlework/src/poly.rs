//! The polynomial method's working parts: sparse multivariate
//! polynomials over a finite field, univariate restrictions to lines,
//! formal gradients, homogenization, exhaustive zero counting, and
//! interpolation of low-degree polynomials vanishing on a point set.
//!
//! Degrees and point counts in scope are tiny, so everything that can
//! be checked by enumeration is.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::{point_at, Field, FieldElement};
use crate::linalg;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("the zero polynomial is not accepted here")]
    ZeroPolynomial,
    #[error("space of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error("interpolation nodes must have distinct first coordinates")]
    DuplicateNode,
}

/// Binomial coefficient, exact in u64 (arguments in scope are small).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Exponent vectors of total degree at most `d`, ordered by total
/// degree and, within a degree, by descending lexicographic comparison
/// (so x0 comes before x1). This order is fixed: evaluation-matrix
/// columns and interpolation outputs depend on it.
pub fn monomials_up_to(n_vars: usize, d: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n_vars];
    loop {
        if current.iter().sum::<u32>() <= d {
            out.push(current.clone());
        }
        // Odometer over [0, d]^n; the degree filter does the rest.
        let mut i = n_vars;
        loop {
            if i == 0 {
                out.sort_by(|a, b| {
                    let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
                    da.cmp(&db).then_with(|| b.cmp(a))
                });
                debug_assert_eq!(out.len() as u64, binomial(n_vars as u64 + d as u64, n_vars as u64));
                return out;
            }
            i -= 1;
            if current[i] < d {
                current[i] += 1;
                break;
            }
            current[i] = 0;
        }
    }
}

/// A multivariate polynomial over a fixed field, stored as a sparse
/// map from exponent vectors to nonzero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

impl MultiPoly {
    pub fn zero(field: &Field, n_vars: usize) -> MultiPoly {
        MultiPoly {
            field: field.clone(),
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, n_vars: usize, c: &FieldElement) -> MultiPoly {
        Self::from_terms(field, n_vars, [(vec![0; n_vars], c.clone())])
    }

    /// The variable x_i as a polynomial.
    pub fn var(field: &Field, n_vars: usize, i: usize) -> MultiPoly {
        assert!(i < n_vars, "variable index out of range");
        let mut e = vec![0u32; n_vars];
        e[i] = 1;
        Self::from_terms(field, n_vars, [(e, field.one())])
    }

    /// Build from (exponents, coefficient) pairs; repeated exponent
    /// vectors are summed and zero coefficients dropped.
    pub fn from_terms<I>(field: &Field, n_vars: usize, terms: I) -> MultiPoly
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElement)>,
    {
        let mut map: BTreeMap<Vec<u32>, FieldElement> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), n_vars, "exponent arity mismatch");
            assert!(c.field() == field, "field mismatch in from_terms");
            let acc = match map.remove(&e) {
                Some(prev) => &prev + &c,
                None => c,
            };
            if acc.is_zero() {
                continue;
            }
            map.insert(e, acc);
        }
        MultiPoly {
            field: field.clone(),
            n_vars,
            terms: map,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &FieldElement)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldElement {
        self.terms.get(exps).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn scale(&self, c: &FieldElement) -> MultiPoly {
        Self::from_terms(
            &self.field,
            self.n_vars,
            self.terms.iter().map(|(e, v)| (e.clone(), v * c)),
        )
    }

    /// Evaluate at a point, with the convention 0^0 = 1.
    pub fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        assert_eq!(point.len(), self.n_vars, "point arity mismatch");
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &exp) in point.iter().zip(e.iter()) {
                assert!(x.field() == &self.field, "field mismatch in evaluate");
                if exp > 0 {
                    term = &term * &x.pow(exp as u64);
                }
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Exact number of zeros in F_q^n, by enumeration. The zero
    /// polynomial is rejected: every point vanishes and the degree
    /// bound d*q^(n-1) would be meaningless.
    pub fn count_zeros(&self) -> Result<u64, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let q = self.field.order();
        let size = q
            .checked_pow(self.n_vars as u32)
            .filter(|&s| s <= self.field.enum_cap())
            .ok_or(PolyError::CapExceeded {
                size: u64::MAX,
                cap: self.field.enum_cap(),
            })?;
        let mut zeros = 0;
        for i in 0..size {
            if self.evaluate(&point_at(&self.field, self.n_vars, i)).is_zero() {
                zeros += 1;
            }
        }
        Ok(zeros)
    }

    /// Restriction to the line {a + t*b}: the univariate h(t) = f(a + t*b).
    /// h(0) = f(a) and the coefficient of t is the inner product of the
    /// gradient at a with b.
    pub fn restrict_to_line(&self, a: &[FieldElement], b: &[FieldElement]) -> UniPoly {
        assert_eq!(a.len(), self.n_vars, "base point arity mismatch");
        assert_eq!(b.len(), self.n_vars, "direction arity mismatch");
        assert!(b.iter().any(|c| !c.is_zero()), "direction must be nonzero");
        let mut h = UniPoly::zero(&self.field);
        for (e, c) in &self.terms {
            let mut term = UniPoly::constant(&self.field, c);
            for ((ai, bi), &exp) in a.iter().zip(b.iter()).zip(e.iter()) {
                if exp == 0 {
                    continue;
                }
                let linear = UniPoly::from_coeffs(&self.field, vec![ai.clone(), bi.clone()]);
                term = &term * &linear.pow(exp);
            }
            h = &h + &term;
        }
        h
    }

    /// Formal partial derivatives, one polynomial per variable. The
    /// exponent multiplies into the coefficient mod p, so x^p
    /// differentiates to zero in characteristic p.
    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.n_vars)
            .map(|i| {
                Self::from_terms(
                    &self.field,
                    self.n_vars,
                    self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, c)| {
                        let mut e2 = e.clone();
                        e2[i] -= 1;
                        (e2, c * &self.field.from_int(e[i] as i64))
                    }),
                )
            })
            .collect()
    }

    /// Homogenization: a new variable is prepended as x_0 and each term
    /// of degree d - r gains a factor x_0^r, making the result
    /// homogeneous of degree d. Setting x_0 = 1 recovers the original;
    /// setting x_0 = 0 leaves the top-degree part.
    pub fn homogenize(&self) -> Result<MultiPoly, PolyError> {
        let d = self.degree().ok_or(PolyError::ZeroPolynomial)?;
        Ok(Self::from_terms(
            &self.field,
            self.n_vars + 1,
            self.terms.iter().map(|(e, c)| {
                let mut e2 = Vec::with_capacity(self.n_vars + 1);
                e2.push(d - e.iter().sum::<u32>());
                e2.extend_from_slice(e);
                (e2, c.clone())
            }),
        ))
    }

    /// The sum of the terms of maximal total degree.
    pub fn top_part(&self) -> MultiPoly {
        let Some(d) = self.degree() else {
            return self.clone();
        };
        Self::from_terms(
            &self.field,
            self.n_vars,
            self.terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == d)
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }

    /// Parse the text format "3*x0^2*x1 + 4" with variables x0..x{n-1}
    /// and integer coefficients.
    pub fn parse(field: &Field, n_vars: usize, text: &str) -> Result<MultiPoly, PolyError> {
        let mut terms = Vec::new();
        let text = text.trim();
        if text.is_empty() {
            return Err(PolyError::Parse("empty input".into()));
        }
        // Split into signed terms at top-level + and -.
        let mut pieces: Vec<(i64, String)> = Vec::new();
        let mut sign = 1i64;
        let mut cur = String::new();
        let mut after_op = true;
        for ch in text.chars() {
            match ch {
                '+' | '-' if !after_op => {
                    pieces.push((sign, cur.trim().to_string()));
                    sign = if ch == '-' { -1 } else { 1 };
                    cur = String::new();
                    after_op = true;
                }
                '-' if after_op && cur.trim().is_empty() => {
                    sign = -sign;
                }
                c if c.is_whitespace() => cur.push(c),
                c => {
                    cur.push(c);
                    after_op = false;
                }
            }
        }
        pieces.push((sign, cur.trim().to_string()));
        for (sign, piece) in pieces {
            if piece.is_empty() {
                return Err(PolyError::Parse("empty term".into()));
            }
            let mut coeff = field.from_int(sign);
            let mut exps = vec![0u32; n_vars];
            for factor in piece.split('*') {
                let factor = factor.trim();
                if factor.is_empty() {
                    return Err(PolyError::Parse(format!("empty factor in '{piece}'")));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (var, exp) = match rest.split_once('^') {
                        Some((v, e)) => (v, e.trim().parse::<u32>().map_err(|_| {
                            PolyError::Parse(format!("bad exponent in '{factor}'"))
                        })?),
                        None => (rest, 1),
                    };
                    let var: usize = var
                        .trim()
                        .parse()
                        .map_err(|_| PolyError::Parse(format!("bad variable in '{factor}'")))?;
                    if var >= n_vars {
                        return Err(PolyError::Parse(format!(
                            "variable x{var} out of range for {n_vars} variables"
                        )));
                    }
                    exps[var] += exp;
                } else {
                    let value: i64 = factor
                        .parse()
                        .map_err(|_| PolyError::Parse(format!("bad factor '{factor}'")))?;
                    coeff = &coeff * &field.from_int(value);
                }
            }
            terms.push((exps, coeff));
        }
        Ok(Self::from_terms(field, n_vars, terms))
    }

    /// Inverse of [`MultiPoly::parse`]: highest degree first, x0 before x1.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut term_list: Vec<(&Vec<u32>, &FieldElement)> = self.terms.iter().collect();
        // Highest total degree first; within a degree, x0 outranks x1.
        term_list.sort_by(|(ea, _), (eb, _)| {
            let (da, db) = (ea.iter().sum::<u32>(), eb.iter().sum::<u32>());
            db.cmp(&da).then_with(|| eb.cmp(ea))
        });
        let mut parts = Vec::new();
        for (e, c) in term_list {
            let mut factors = Vec::new();
            let coeff_str = if self.field.m() == 1 {
                format!("{}", c)
            } else {
                format!("({})", c)
            };
            let is_constant_term = e.iter().all(|&x| x == 0);
            if is_constant_term || coeff_str != "1" {
                factors.push(coeff_str);
            }
            for (i, &exp) in e.iter().enumerate() {
                match exp {
                    0 => {}
                    1 => factors.push(format!("x{i}")),
                    _ => factors.push(format!("x{i}^{exp}")),
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }

    /// JSON term list for prime fields: [{"e": [2, 1], "c": 3}].
    pub fn to_json_terms(&self) -> Vec<TermJson> {
        assert_eq!(self.field.m(), 1, "JSON term coefficients are residues");
        self.terms
            .iter()
            .map(|(e, c)| TermJson {
                e: e.clone(),
                c: c.residue() as i64,
            })
            .collect()
    }

    pub fn from_json_terms(
        field: &Field,
        n_vars: usize,
        terms: &[TermJson],
    ) -> Result<MultiPoly, PolyError> {
        for t in terms {
            if t.e.len() != n_vars {
                return Err(PolyError::Parse(format!(
                    "exponent vector {:?} does not have {} entries",
                    t.e, n_vars
                )));
            }
        }
        Ok(Self::from_terms(
            field,
            n_vars,
            terms.iter().map(|t| (t.e.clone(), field.from_int(t.c))),
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub e: Vec<u32>,
    pub c: i64,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

macro_rules! forward_poly_binop {
    ($type:ident, $trait:ident, $method:ident) => {
        impl std::ops::$trait for $type {
            type Output = $type;
            fn $method(self, rhs: $type) -> $type {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&$type> for $type {
            type Output = $type;
            fn $method(self, rhs: &$type) -> $type {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<$type> for &$type {
            type Output = $type;
            fn $method(self, rhs: $type) -> $type {
                self.$method(&rhs)
            }
        }
    };
}

forward_poly_binop!(MultiPoly, Add, add);
forward_poly_binop!(MultiPoly, Sub, sub);
forward_poly_binop!(MultiPoly, Mul, mul);
forward_poly_binop!(UniPoly, Add, add);
forward_poly_binop!(UniPoly, Mul, mul);

impl std::ops::Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert!(self.field == rhs.field && self.n_vars == rhs.n_vars, "polynomial shape mismatch");
        MultiPoly::from_terms(
            &self.field,
            self.n_vars,
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(e, c)| (e.clone(), c.clone())),
        )
    }
}

impl std::ops::Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self + &rhs.scale(&-rhs.field.one())
    }
}

impl std::ops::Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert!(self.field == rhs.field && self.n_vars == rhs.n_vars, "polynomial shape mismatch");
        let mut terms = Vec::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u32> = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                terms.push((e, ca * cb));
            }
        }
        MultiPoly::from_terms(&self.field, self.n_vars, terms)
    }
}

/// A univariate polynomial with trailing zero coefficients trimmed;
/// the zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<FieldElement>,
}

impl UniPoly {
    pub fn zero(field: &Field) -> UniPoly {
        UniPoly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: &Field, c: &FieldElement) -> UniPoly {
        Self::from_coeffs(field, vec![c.clone()])
    }

    pub fn from_coeffs(field: &Field, coeffs: Vec<FieldElement>) -> UniPoly {
        let mut coeffs = coeffs;
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        for c in &coeffs {
            assert!(c.field() == field, "field mismatch in from_coeffs");
        }
        UniPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn eval(&self, t: &FieldElement) -> FieldElement {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    pub fn scale(&self, c: &FieldElement) -> UniPoly {
        Self::from_coeffs(&self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = Self::constant(&self.field, &self.field.one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Lagrange interpolation through nodes with distinct first
    /// coordinates; the result has degree < number of nodes.
    pub fn interpolate(field: &Field, nodes: &[(FieldElement, FieldElement)]) -> Result<UniPoly, PolyError> {
        for (i, (xi, _)) in nodes.iter().enumerate() {
            for (xj, _) in nodes.iter().skip(i + 1) {
                if xi == xj {
                    return Err(PolyError::DuplicateNode);
                }
            }
        }
        let mut acc = UniPoly::zero(field);
        for (i, (xi, yi)) in nodes.iter().enumerate() {
            let mut basis = UniPoly::constant(field, &field.one());
            let mut denom = field.one();
            for (j, (xj, _)) in nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                basis = &basis * &UniPoly::from_coeffs(field, vec![-xj, field.one()]);
                denom = &denom * &(xi - xj);
            }
            acc = &acc + &basis.scale(&(yi * &denom.inv()));
        }
        Ok(acc)
    }
}

impl std::ops::Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        assert!(self.field == rhs.field, "field mismatch in add");
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect();
        UniPoly::from_coeffs(&self.field, coeffs)
    }
}

impl std::ops::Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        assert!(self.field == rhs.field, "field mismatch in mul");
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(&self.field);
        }
        let mut coeffs = vec![self.field.zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = &coeffs[i + j] + &(a * b);
            }
        }
        UniPoly::from_coeffs(&self.field, coeffs)
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{}", c),
                1 => format!("{}*t", c),
                _ => format!("{}*t^{}", c, i),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A nonzero polynomial of total degree <= `degree_cap` vanishing on
/// every given point, or None when only the zero polynomial does
/// (equivalently, the evaluation matrix has full column rank). A
/// nontrivial answer always exists when |points| < C(n + d, n).
pub fn vanishing_poly(
    field: &Field,
    n_vars: usize,
    points: &[Vec<FieldElement>],
    degree_cap: u32,
) -> Option<MultiPoly> {
    let monomials = monomials_up_to(n_vars, degree_cap);
    let rows: Vec<Vec<FieldElement>> = points
        .iter()
        .map(|p| {
            assert_eq!(p.len(), n_vars, "point arity mismatch");
            monomials
                .iter()
                .map(|e| {
                    e.iter()
                        .zip(p.iter())
                        .fold(field.one(), |acc, (&exp, x)| &acc * &x.pow(exp as u64))
                })
                .collect()
        })
        .collect();
    let null = linalg::null_space_vector(field, &rows, monomials.len())?;
    Some(MultiPoly::from_terms(
        field,
        n_vars,
        monomials.into_iter().zip(null),
    ))
}
