//! Exact arithmetic in F_p and F_{p^m}.
//!
//! A [`Field`] is a cheaply clonable handle to a validated field
//! description. Prime fields store residues directly; extension fields
//! store coefficient vectors in the basis 1, g, g^2, ... where g is a
//! root of a monic irreducible modulus polynomial. All in-scope fields
//! are small enough to enumerate, and most checks here do exactly that.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

/// Largest supported extension degree. Everything in scope fits in
/// degree 4 (F_16); the inline element representation depends on this.
pub const MAX_EXTENSION_DEGREE: usize = 4;

/// Default ceiling on field order for exhaustive enumeration.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 16;

type Rep = ArrayVec<u64, MAX_EXTENSION_DEGREE>;

/// Serializable field description: characteristic `p`, extension degree
/// `m`, and for `m > 1` the monic modulus polynomial as `m + 1`
/// coefficients in increasing-degree order. `modulus` is omitted from
/// JSON exactly when `m = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "default_degree")]
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn default_degree() -> usize {
    1
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree {0} outside 1..={MAX_EXTENSION_DEGREE}")]
    DegreeOutOfRange(usize),
    #[error("modulus must be monic of degree m with coefficients reduced mod p")]
    MalformedModulus,
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u64),
    #[error("extension field needs a modulus; prime field must not carry one")]
    ModulusMismatch,
    #[error("no built-in modulus for order {0}")]
    NoBuiltinModulus(u64),
    #[error("field order {order} exceeds enumeration cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("element needs exactly m residues below p")]
    BadElement,
}

#[derive(Debug)]
struct Inner {
    p: u64,
    m: usize,
    // Length m + 1 for extensions, empty for prime fields.
    modulus: Vec<u64>,
    enum_cap: u64,
}

/// Handle to a field. Clones share the same description; two handles
/// compare equal iff (p, m, modulus) agree.
#[derive(Clone, Debug)]
pub struct Field {
    inner: Arc<Inner>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

impl Field {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Self::build(p, 1, None, DEFAULT_ENUM_CAP)
    }

    /// F_{p^m} with an explicit monic modulus of degree m
    /// (coefficients in increasing-degree order).
    pub fn extension(p: u64, modulus: &[u64]) -> Result<Field, FieldError> {
        Self::build(p, modulus.len().saturating_sub(1), Some(modulus.to_vec()), DEFAULT_ENUM_CAP)
    }

    /// Field of order q, resolving the built-in modulus for the
    /// non-prime orders 4, 8, 9, 16, 27.
    pub fn of_order(q: u64) -> Result<Field, FieldError> {
        match q {
            4 => Self::extension(2, &[1, 1, 1]),
            8 => Self::extension(2, &[1, 1, 0, 1]),
            9 => Self::extension(3, &[1, 0, 1]),
            16 => Self::extension(2, &[1, 1, 0, 0, 1]),
            27 => Self::extension(3, &[1, 2, 0, 1]),
            q if is_prime(q) => Self::prime(q),
            q => Err(FieldError::NoBuiltinModulus(q)),
        }
    }

    /// Validate and instantiate a serialized description.
    pub fn from_spec(spec: &FieldSpec) -> Result<Field, FieldError> {
        match (&spec.modulus, spec.m) {
            (None, 1) => Self::prime(spec.p),
            (None, _) => Err(FieldError::ModulusMismatch),
            (Some(_), 1) => Err(FieldError::ModulusMismatch),
            (Some(modulus), m) => {
                if modulus.len() != m + 1 {
                    return Err(FieldError::MalformedModulus);
                }
                Self::extension(spec.p, modulus)
            }
        }
    }

    /// Same field with a different enumeration cap.
    pub fn with_enum_cap(&self, cap: u64) -> Field {
        Field {
            inner: Arc::new(Inner {
                p: self.inner.p,
                m: self.inner.m,
                modulus: self.inner.modulus.clone(),
                enum_cap: cap,
            }),
        }
    }

    fn build(p: u64, m: usize, modulus: Option<Vec<u64>>, enum_cap: u64) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 || m > MAX_EXTENSION_DEGREE {
            return Err(FieldError::DegreeOutOfRange(m));
        }
        let modulus = match (m, modulus) {
            (1, None) => Vec::new(),
            (1, Some(_)) => return Err(FieldError::ModulusMismatch),
            (_, None) => return Err(FieldError::ModulusMismatch),
            (_, Some(modulus)) => {
                if modulus.len() != m + 1
                    || modulus[m] != 1
                    || modulus.iter().any(|&c| c >= p)
                {
                    return Err(FieldError::MalformedModulus);
                }
                if !is_irreducible(&modulus, p) {
                    return Err(FieldError::ReducibleModulus(p));
                }
                modulus
            }
        };
        Ok(Field {
            inner: Arc::new(Inner { p, m, modulus, enum_cap }),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.p
    }

    pub fn m(&self) -> usize {
        self.inner.m
    }

    /// Field order q = p^m.
    pub fn order(&self) -> u64 {
        self.inner.p.pow(self.inner.m as u32)
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    /// Modulus coefficients (empty for prime fields).
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    /// Ceiling on exhaustive enumeration work.
    pub fn enum_cap(&self) -> u64 {
        self.inner.enum_cap
    }

    /// Serializable description of this field.
    pub fn spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.inner.p,
            m: self.inner.m,
            modulus: if self.inner.m == 1 {
                None
            } else {
                Some(self.inner.modulus.clone())
            },
        }
    }

    pub fn zero(&self) -> FieldElement {
        let mut rep = Rep::new();
        for _ in 0..self.inner.m {
            rep.push(0);
        }
        FieldElement { field: self.clone(), rep }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// Embed an integer via its residue mod p.
    pub fn from_int(&self, value: i64) -> FieldElement {
        let p = self.inner.p as i64;
        let r = value.rem_euclid(p) as u64;
        let mut e = self.zero();
        e.rep[0] = r;
        e
    }

    /// Element from explicit basis coefficients (length m, reduced mod p).
    pub fn element(&self, rep: &[u64]) -> Result<FieldElement, FieldError> {
        if rep.len() != self.inner.m || rep.iter().any(|&c| c >= self.inner.p) {
            return Err(FieldError::BadElement);
        }
        Ok(FieldElement {
            field: self.clone(),
            rep: rep.iter().copied().collect(),
        })
    }

    /// The root g of the modulus, for extensions.
    pub fn generator_root(&self) -> FieldElement {
        assert!(self.inner.m > 1, "prime field has no modulus root");
        let mut e = self.zero();
        e.rep[1] = 1;
        e
    }

    /// Element at position `index` in enumeration order: indices are
    /// base-p with rep[0] the most significant digit, so the order is
    /// lexicographic on the coefficient vector.
    pub fn element_at(&self, index: u64) -> FieldElement {
        assert!(index < self.order(), "element index out of range");
        let p = self.inner.p;
        let m = self.inner.m;
        let mut e = self.zero();
        let mut rest = index;
        for i in (0..m).rev() {
            e.rep[i] = rest % p;
            rest /= p;
        }
        e
    }

    /// Position of an element in enumeration order.
    pub fn index_of(&self, a: &FieldElement) -> u64 {
        assert!(self == &a.field, "field mismatch in index_of");
        a.rep.iter().fold(0, |acc, &c| acc * self.inner.p + c)
    }

    /// All q elements in enumeration order. Exhaustive work is capped;
    /// raise the cap explicitly (`with_enum_cap`) for larger orders.
    pub fn elements(&self) -> Vec<FieldElement> {
        let q = self.order();
        assert!(
            q <= self.inner.enum_cap,
            "field order {} exceeds enumeration cap {}",
            q,
            self.inner.enum_cap
        );
        (0..q).map(|i| self.element_at(i)).collect()
    }

    /// The set of squares {x^2}, deduplicated, in enumeration order.
    /// In F_p with p odd this has exactly (p + 1) / 2 elements.
    pub fn squares(&self) -> Vec<FieldElement> {
        let mut seen = vec![false; self.order() as usize];
        for x in self.elements() {
            seen[self.index_of(&(&x * &x)) as usize] = true;
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| self.element_at(i as u64))
            .collect()
    }
}

/// An element of a specific [`Field`]. Arithmetic panics if operands
/// come from different fields; equality requires identical fields.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    rep: Rep,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Basis coefficients, length m.
    pub fn rep(&self) -> &[u64] {
        &self.rep
    }

    pub fn is_zero(&self) -> bool {
        self.rep.iter().all(|&c| c == 0)
    }

    /// Residue value for prime-field elements.
    pub fn residue(&self) -> u64 {
        assert_eq!(self.field.m(), 1, "residue() is for prime fields");
        self.rep[0]
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> FieldElement {
        assert!(!self.is_zero(), "inverse of zero");
        let p = self.field.p();
        if self.field.m() == 1 {
            // Fermat: a^(p-2).
            return self.pow(p - 2);
        }
        let (g, s) = poly_half_egcd(&self.rep, &self.field.inner.modulus, p);
        // g is a nonzero constant; divide s through by it.
        debug_assert_eq!(g.len(), 1);
        let ginv = mod_inv(g[0], p);
        let mut e = self.field.zero();
        for (i, &c) in s.iter().enumerate() {
            e.rep[i] = c * ginv % p;
        }
        e
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rep == other.rep
    }
}

impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.p().hash(state);
        self.field.m().hash(state);
        self.rep.as_slice().hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    /// Enumeration order; only meaningful within one field.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rep.as_slice().cmp(other.rep.as_slice())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.m() == 1 {
            return write!(f, "{}", self.rep[0]);
        }
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.rep.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{}", c)?,
                (1, 1) => write!(f, "g")?,
                (1, c) => write!(f, "{}*g", c)?,
                (i, 1) => write!(f, "g^{}", i)?,
                (i, c) => write!(f, "{}*g^{}", c, i)?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Add<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "field mismatch in add");
        let p = self.field.p();
        let mut out = self.clone();
        for (o, &r) in out.rep.iter_mut().zip(rhs.rep.iter()) {
            *o = (*o + r) % p;
        }
        out
    }
}

impl std::ops::Sub<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "field mismatch in sub");
        let p = self.field.p();
        let mut out = self.clone();
        for (o, &r) in out.rep.iter_mut().zip(rhs.rep.iter()) {
            *o = (*o + p - r) % p;
        }
        out
    }
}

impl std::ops::Mul<&FieldElement> for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        assert!(self.field == rhs.field, "field mismatch in mul");
        let p = self.field.p();
        let m = self.field.m();
        if m == 1 {
            let mut out = self.clone();
            out.rep[0] = self.rep[0] * rhs.rep[0] % p;
            return out;
        }
        // Convolve, then fold degrees >= m down via the modulus
        // (g^m = -(lower modulus coefficients)).
        let mut conv = [0u64; 2 * MAX_EXTENSION_DEGREE - 1];
        for (i, &a) in self.rep.iter().enumerate() {
            for (j, &b) in rhs.rep.iter().enumerate() {
                conv[i + j] = (conv[i + j] + a * b) % p;
            }
        }
        let modulus = &self.field.inner.modulus;
        for d in (m..2 * m - 1).rev() {
            let c = conv[d];
            if c == 0 {
                continue;
            }
            conv[d] = 0;
            for k in 0..m {
                let fold = c * modulus[k] % p;
                conv[d - m + k] = (conv[d - m + k] + p * p - fold) % p;
            }
        }
        let mut out = self.field.zero();
        for i in 0..m {
            out.rep[i] = conv[i];
        }
        out
    }
}

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.p();
        let mut out = self.clone();
        for o in out.rep.iter_mut() {
            *o = (p - *o) % p;
        }
        out
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// Number of points in F_q^n, checked against the enumeration cap.
pub fn space_size(field: &Field, n_vars: usize) -> u64 {
    let q = field.order();
    let size = q.checked_pow(n_vars as u32).expect("space size overflow");
    assert!(
        size <= field.enum_cap(),
        "space size {} exceeds enumeration cap {}",
        size,
        field.enum_cap()
    );
    size
}

/// Point at position `index` in the enumeration of F_q^n: base-q digits
/// of the index, first coordinate most significant.
pub fn point_at(field: &Field, n_vars: usize, index: u64) -> Vec<FieldElement> {
    let q = field.order();
    let mut digits = vec![0u64; n_vars];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = rest % q;
        rest /= q;
    }
    assert_eq!(rest, 0, "point index out of range");
    digits.iter().map(|&d| field.element_at(d)).collect()
}

/// Position of a point in the enumeration of F_q^n.
pub fn point_index(field: &Field, point: &[FieldElement]) -> u64 {
    point
        .iter()
        .fold(0, |acc, c| acc * field.order() + field.index_of(c))
}

/// All points of F_q^n in enumeration order.
pub fn all_points(field: &Field, n_vars: usize) -> Vec<Vec<FieldElement>> {
    (0..space_size(field, n_vars))
        .map(|i| point_at(field, n_vars, i))
        .collect()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat again; p is prime and a nonzero.
    let mut e = p - 2;
    let mut base = a % p;
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

// Dense little-endian coefficient vectors over F_p, used only for
// modulus validation and inversion. Trailing zeros trimmed.

fn poly_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_rem(dividend: &[u64], divisor: &[u64], p: u64) -> Vec<u64> {
    let mut rem = dividend.to_vec();
    let dd = divisor.len() - 1;
    let lead_inv = mod_inv(divisor[dd], p);
    while rem.len() > dd {
        let shift = rem.len() - 1 - dd;
        let factor = rem[rem.len() - 1] * lead_inv % p;
        if factor != 0 {
            for (i, &c) in divisor.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + p * p - factor * c % p) % p;
            }
        }
        rem.pop();
        rem = poly_trim(rem);
        if rem.is_empty() {
            break;
        }
    }
    rem
}

fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let m = modulus.len() - 1;
    // Trial division by every monic polynomial of degree 1..=m/2.
    for deg in 1..=m / 2 {
        let count = p.pow(deg as u32);
        for idx in 0..count {
            let mut divisor = vec![0u64; deg + 1];
            divisor[deg] = 1;
            let mut rest = idx;
            for c in divisor.iter_mut().take(deg) {
                *c = rest % p;
                rest /= p;
            }
            if poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Extended Euclid over F_p[x] returning (gcd, s) with
/// s * a = gcd (mod modulus). Used only for extension inverses, where
/// gcd(a, modulus) is a nonzero constant.
fn poly_half_egcd(a: &[u64], modulus: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r0 = poly_trim(modulus.to_vec());
    let mut r1 = poly_trim(a.to_vec());
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1, p);
        let s = poly_sub(&s0, &poly_mul_small(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    (r0, pad_to(s0, modulus.len() - 1))
}

fn pad_to(mut v: Vec<u64>, len: usize) -> Vec<u64> {
    v.resize(len, 0);
    v
}

fn poly_divmod(dividend: &[u64], divisor: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let dd = divisor.len() - 1;
    if dividend.len() <= dd {
        return (vec![], dividend.to_vec());
    }
    let mut rem = dividend.to_vec();
    let mut quot = vec![0u64; dividend.len() - dd];
    let lead_inv = mod_inv(divisor[dd], p);
    while rem.len() > dd {
        let shift = rem.len() - 1 - dd;
        let factor = rem[rem.len() - 1] * lead_inv % p;
        quot[shift] = factor;
        if factor != 0 {
            for (i, &c) in divisor.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + p * p - factor * c % p) % p;
            }
        }
        rem.pop();
        rem = poly_trim(rem);
        if rem.is_empty() {
            break;
        }
    }
    (poly_trim(quot), rem)
}

fn poly_mul_small(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = vec![0u64; len];
    for i in 0..len {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    poly_trim(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<Field> {
        [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]
            .iter()
            .map(|&q| Field::of_order(q).unwrap())
            .collect()
    }

    #[test]
    fn prime_field_add_and_mul() {
        let f5 = Field::prime(5).unwrap();
        assert!((f5.from_int(2) + f5.from_int(3)).is_zero());
        assert_eq!(f5.from_int(3) * f5.from_int(2), f5.one());
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.zero() + f7.from_int(4), f7.from_int(4));
    }

    #[test]
    fn gf4_arithmetic() {
        let f4 = Field::of_order(4).unwrap();
        let a = f4.generator_root();
        assert!((&a + &a).is_zero());
        // g^2 reduces to g + 1 under g^2 + g + 1.
        let a2 = &a * &a;
        assert_eq!(a2, &a + &f4.one());
        // Cross-check: the multiplicative group has order 3.
        assert_eq!(a.pow(3), f4.one());
        assert_ne!(a.pow(1), f4.one());
        assert_ne!(a.pow(2), f4.one());
        assert_eq!(a.inv(), &a + &f4.one());
    }

    #[test]
    fn inverses() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.from_int(3).inv(), f7.from_int(5));
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.from_int(4).inv(), f5.from_int(4));
        for f in small_fields() {
            for x in f.elements() {
                if !x.is_zero() {
                    assert_eq!(&x * &x.inv(), f.one(), "inv failed in q={}", f.order());
                }
            }
        }
    }

    #[test]
    fn enumeration() {
        let f3 = Field::prime(3).unwrap();
        let elems = f3.elements();
        assert_eq!(elems, vec![f3.from_int(0), f3.from_int(1), f3.from_int(2)]);
        assert_eq!(Field::of_order(4).unwrap().elements().len(), 4);
        let f9 = Field::of_order(9).unwrap();
        let elems = f9.elements();
        assert_eq!(elems.len(), 9);
        for (i, e) in elems.iter().enumerate() {
            assert_eq!(f9.index_of(e), i as u64);
            assert_eq!(&f9.element_at(i as u64), e);
        }
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            let elems = f.elements();
            for a in &elems {
                for b in &elems {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    for c in &elems {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                    }
                }
            }
        }
    }

    #[test]
    fn squares_count_odd_prime() {
        for p in [3u64, 5, 7, 11, 13] {
            let f = Field::prime(p).unwrap();
            assert_eq!(f.squares().len() as u64, (p + 1) / 2);
        }
    }

    #[test]
    fn frobenius() {
        for f in small_fields() {
            let p = f.p();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!((&a + &b).pow(p), &a.pow(p) + &b.pow(p));
                }
            }
        }
    }

    #[test]
    fn reducible_moduli_rejected() {
        // x^2 + 1 = (x + 1)^2 over F_2.
        assert_eq!(
            Field::extension(2, &[1, 0, 1]).unwrap_err(),
            FieldError::ReducibleModulus(2)
        );
        // x^2 + 2 = (x - 1)(x + 1) over F_3.
        assert_eq!(
            Field::extension(3, &[2, 0, 1]).unwrap_err(),
            FieldError::ReducibleModulus(3)
        );
        assert_eq!(Field::prime(6).unwrap_err(), FieldError::NotPrime(6));
    }

    #[test]
    fn spec_round_trip() {
        let f5 = Field::prime(5).unwrap();
        let json = serde_json::to_string(&f5.spec()).unwrap();
        assert_eq!(json, r#"{"p":5,"m":1}"#);
        assert_eq!(Field::from_spec(&serde_json::from_str(&json).unwrap()).unwrap(), f5);

        let f9 = Field::of_order(9).unwrap();
        let json = serde_json::to_string(&f9.spec()).unwrap();
        assert_eq!(json, r#"{"p":3,"m":2,"modulus":[1,0,1]}"#);
        assert_eq!(Field::from_spec(&serde_json::from_str(&json).unwrap()).unwrap(), f9);

        // m defaults to 1 when absent.
        let spec: FieldSpec = serde_json::from_str(r#"{"p":7}"#).unwrap();
        assert_eq!(Field::from_spec(&spec).unwrap(), Field::prime(7).unwrap());
    }

    #[test]
    #[should_panic(expected = "field mismatch")]
    fn mixing_fields_panics() {
        let f5 = Field::prime(5).unwrap();
        let f7 = Field::prime(7).unwrap();
        let _ = f5.one() + f7.one();
    }
}
