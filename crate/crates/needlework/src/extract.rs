//! Distribution-level study of randomness mergers and two-source
//! extractors at enumerable scale: min-entropy, statistical distance,
//! the curve merger Z = aX + bY against table adversaries, sumset
//! growth |A + BC|, and character-sum bias over Z_3 in exact Z[w]
//! arithmetic.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::field::{Field, FieldElement, FieldError, DEFAULT_ENUM_CAP};
use crate::kakeya::NikodymWitness;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExtractError {
    #[error("invalid distribution: {0}")]
    BadDistribution(String),
    #[error("distributions live on different domains")]
    DomainMismatch,
    #[error("operation needs exact-rational mode on both sides")]
    ModeMismatch,
    #[error("space of size {size} exceeds the cap {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("empty set")]
    EmptySet,
    #[error("point {0} does not live in the expected space")]
    BadPoint(String),
    #[error("omega power must be 1 or 2, got {0}")]
    BadOmegaPower(u8),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Probability weights, either exact rationals or floats. The mode is
/// fixed per distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum Probs {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// A finite distribution over tuples of nonnegative integers (field
/// vectors, or single-entry abstract indices). The domain is sorted
/// and duplicate-free; weights sum to 1, exactly in exact mode and
/// within 1e-12 in float mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    domain: Vec<Vec<u64>>,
    probs: Probs,
}

const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

impl Distribution {
    pub fn from_exact_pairs(
        mut pairs: Vec<(Vec<u64>, BigRational)>,
    ) -> Result<Distribution, ExtractError> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut sum = BigRational::zero();
        for window in pairs.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(ExtractError::BadDistribution(format!(
                    "duplicate domain element {:?}",
                    window[0].0
                )));
            }
        }
        for (_, p) in &pairs {
            if p.is_negative() {
                return Err(ExtractError::BadDistribution("negative weight".into()));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(ExtractError::BadDistribution(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        let (domain, probs) = pairs.into_iter().unzip();
        Ok(Distribution { domain, probs: Probs::Exact(probs) })
    }

    pub fn from_float_pairs(
        mut pairs: Vec<(Vec<u64>, f64)>,
    ) -> Result<Distribution, ExtractError> {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for window in pairs.windows(2) {
            if window[0].0 == window[1].0 {
                return Err(ExtractError::BadDistribution(format!(
                    "duplicate domain element {:?}",
                    window[0].0
                )));
            }
        }
        let sum: f64 = pairs.iter().map(|(_, p)| *p).sum();
        if pairs.iter().any(|(_, p)| *p < 0.0 || !p.is_finite()) {
            return Err(ExtractError::BadDistribution("negative weight".into()));
        }
        if (sum - 1.0).abs() > FLOAT_SUM_TOLERANCE {
            return Err(ExtractError::BadDistribution(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        let (domain, probs) = pairs.into_iter().unzip();
        Ok(Distribution { domain, probs: Probs::Float(probs) })
    }

    pub fn uniform(domain: Vec<Vec<u64>>) -> Result<Distribution, ExtractError> {
        if domain.is_empty() {
            return Err(ExtractError::BadDistribution("empty domain".into()));
        }
        let p = BigRational::new(BigInt::one(), BigInt::from(domain.len()));
        Self::from_exact_pairs(domain.into_iter().map(|x| (x, p.clone())).collect())
    }

    pub fn point_mass(domain: Vec<Vec<u64>>, at: &[u64]) -> Result<Distribution, ExtractError> {
        if !domain.iter().any(|x| x == at) {
            return Err(ExtractError::BadPoint(format!("{at:?}")));
        }
        Self::from_exact_pairs(
            domain
                .into_iter()
                .map(|x| {
                    let p = if x == at { BigRational::one() } else { BigRational::zero() };
                    (x, p)
                })
                .collect(),
        )
    }

    pub fn domain(&self) -> &[Vec<u64>] {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.probs, Probs::Exact(_))
    }

    pub fn probs(&self) -> &Probs {
        &self.probs
    }

    pub fn prob_f64(&self, i: usize) -> f64 {
        match &self.probs {
            Probs::Exact(v) => v[i].to_f64().expect("rational fits f64"),
            Probs::Float(v) => v[i],
        }
    }

    fn prob_exact(&self, i: usize) -> Result<&BigRational, ExtractError> {
        match &self.probs {
            Probs::Exact(v) => Ok(&v[i]),
            Probs::Float(_) => Err(ExtractError::ModeMismatch),
        }
    }

    /// Total mass the distribution puts inside `set`.
    pub fn mass_on(&self, set: &BTreeSet<Vec<u64>>) -> f64 {
        (0..self.len())
            .filter(|&i| set.contains(&self.domain[i]))
            .map(|i| self.prob_f64(i))
            .sum()
    }

    pub fn mass_on_exact(&self, set: &BTreeSet<Vec<u64>>) -> Result<BigRational, ExtractError> {
        let mut sum = BigRational::zero();
        for i in 0..self.len() {
            if set.contains(&self.domain[i]) {
                sum += self.prob_exact(i)?;
            }
        }
        Ok(sum)
    }

    /// The same distribution on a larger domain, new points at weight
    /// zero. The new domain must contain the old one.
    pub fn extend_domain(&self, domain: Vec<Vec<u64>>) -> Result<Distribution, ExtractError> {
        let old: BTreeMap<&Vec<u64>, usize> =
            self.domain.iter().zip(0..).collect();
        for x in &self.domain {
            if !domain.contains(x) {
                return Err(ExtractError::DomainMismatch);
            }
        }
        match &self.probs {
            Probs::Exact(v) => Self::from_exact_pairs(
                domain
                    .into_iter()
                    .map(|x| {
                        let p = old.get(&x).map_or_else(BigRational::zero, |&i| v[i].clone());
                        (x, p)
                    })
                    .collect(),
            ),
            Probs::Float(v) => Self::from_float_pairs(
                domain
                    .into_iter()
                    .map(|x| {
                        let p = old.get(&x).map_or(0.0, |&i| v[i]);
                        (x, p)
                    })
                    .collect(),
            ),
        }
    }

    pub fn to_json(&self) -> String {
        let probs = match &self.probs {
            Probs::Exact(v) => v
                .iter()
                .map(|p| serde_json::Value::String(p.to_string()))
                .collect(),
            Probs::Float(v) => v
                .iter()
                .map(|p| serde_json::json!(p))
                .collect::<Vec<_>>(),
        };
        serde_json::to_string_pretty(&DistJson { domain: self.domain.clone(), probs })
            .expect("distribution serialization")
    }

    pub fn from_json(text: &str) -> Result<Distribution, ExtractError> {
        let dto: DistJson = serde_json::from_str(text)
            .map_err(|e| ExtractError::BadDistribution(e.to_string()))?;
        if dto.probs.len() != dto.domain.len() {
            return Err(ExtractError::BadDistribution(
                "probs length differs from domain length".into(),
            ));
        }
        let all_text = dto.probs.iter().all(|v| v.is_string());
        let all_num = dto.probs.iter().all(|v| v.is_number());
        if all_text {
            let mut pairs = Vec::new();
            for (x, v) in dto.domain.into_iter().zip(dto.probs) {
                let text = v.as_str().unwrap();
                let p = BigRational::from_str(text).map_err(|_| {
                    ExtractError::BadDistribution(format!("bad rational '{text}'"))
                })?;
                pairs.push((x, p));
            }
            Self::from_exact_pairs(pairs)
        } else if all_num {
            let pairs = dto
                .domain
                .into_iter()
                .zip(dto.probs)
                .map(|(x, v)| (x, v.as_f64().unwrap()))
                .collect();
            Self::from_float_pairs(pairs)
        } else {
            Err(ExtractError::BadDistribution(
                "probs must be all rational strings or all numbers".into(),
            ))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DistJson {
    domain: Vec<Vec<u64>>,
    probs: Vec<serde_json::Value>,
}

/// Bits of min-entropy: -log2 of the largest weight.
pub fn min_entropy(d: &Distribution) -> f64 {
    let max = (0..d.len()).map(|i| d.prob_f64(i)).fold(0.0, f64::max);
    -max.log2()
}

/// Half the L1 distance, the max advantage any event gives a
/// distinguisher. Domains must match exactly.
pub fn statistical_distance(p: &Distribution, q: &Distribution) -> Result<f64, ExtractError> {
    if p.domain != q.domain {
        return Err(ExtractError::DomainMismatch);
    }
    if p.is_exact() && q.is_exact() {
        return Ok(statistical_distance_exact(p, q)?.to_f64().expect("fits f64"));
    }
    let l1: f64 = (0..p.len())
        .map(|i| (p.prob_f64(i) - q.prob_f64(i)).abs())
        .sum();
    Ok(l1 / 2.0)
}

pub fn statistical_distance_exact(
    p: &Distribution,
    q: &Distribution,
) -> Result<BigRational, ExtractError> {
    if p.domain != q.domain {
        return Err(ExtractError::DomainMismatch);
    }
    let mut l1 = BigRational::zero();
    for i in 0..p.len() {
        l1 += (p.prob_exact(i)? - q.prob_exact(i)?).abs();
    }
    Ok(l1 / BigRational::from_integer(2.into()))
}

/// The least epsilon such that `d` is epsilon-close to a distribution
/// of min-entropy at least k on the same domain: the mass above the
/// 2^-k ceiling, sum_x max(p_x - 2^-k, 0), provided the domain can
/// hold 1 unit of mass under that ceiling; otherwise 1.
pub fn closeness_to_min_entropy(d: &Distribution, k: f64) -> f64 {
    let ceiling = 2f64.powf(-k);
    if (d.len() as f64) * ceiling < 1.0 {
        return 1.0;
    }
    (0..d.len())
        .map(|i| (d.prob_f64(i) - ceiling).max(0.0))
        .sum()
}

/// The adversary's response table Y = f(X), one row per point of
/// F_q^n it may be asked about.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversaryMap {
    pub q: u64,
    pub n: usize,
    pub table: BTreeMap<Vec<u64>, Vec<u64>>,
}

fn space_points(q: u64, n: usize) -> Result<Vec<Vec<u64>>, ExtractError> {
    let size = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    if size > DEFAULT_ENUM_CAP {
        return Err(ExtractError::CapExceeded { size, cap: DEFAULT_ENUM_CAP });
    }
    let mut points = Vec::with_capacity(size as usize);
    for idx in 0..size {
        let mut pt = vec![0u64; n];
        let mut rest = idx;
        for c in pt.iter_mut().rev() {
            *c = rest % q;
            rest /= q;
        }
        points.push(pt);
    }
    Ok(points)
}

impl AdversaryMap {
    pub fn from_fn(
        q: u64,
        n: usize,
        f: impl Fn(&[u64]) -> Vec<u64>,
    ) -> Result<AdversaryMap, ExtractError> {
        let mut table = BTreeMap::new();
        for x in space_points(q, n)? {
            let y = f(&x);
            if y.len() != n || y.iter().any(|&c| c >= q) {
                return Err(ExtractError::BadPoint(format!("{y:?}")));
            }
            table.insert(x, y);
        }
        Ok(AdversaryMap { q, n, table })
    }

    pub fn identity(q: u64, n: usize) -> Result<AdversaryMap, ExtractError> {
        Self::from_fn(q, n, |x| x.to_vec())
    }

    /// Steer Z = aX + bY into the Nikodym set: answer with the stored
    /// punctured-line direction outside M (so x + t y stays in M for
    /// t != 0 and M absorbs scalings), and with x itself inside M.
    pub fn nikodym_attack(witness: &NikodymWitness) -> Result<AdversaryMap, ExtractError> {
        Self::from_fn(witness.q, witness.n, |x| {
            witness
                .line_of
                .get(x)
                .cloned()
                .unwrap_or_else(|| x.to_vec())
        })
    }
}

/// Exact output distribution of the curve merger Z = aX + b f(X) with
/// a, b independent and uniform in F_q, by enumeration over (x, a, b).
/// The returned domain is the support of Z.
pub fn merger_distribution(
    q: u64,
    n: usize,
    source: &Distribution,
    adversary: &AdversaryMap,
) -> Result<Distribution, ExtractError> {
    Field::prime(q)?;
    if adversary.q != q || adversary.n != n {
        return Err(ExtractError::DomainMismatch);
    }
    let size = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    if size > DEFAULT_ENUM_CAP {
        return Err(ExtractError::CapExceeded { size, cap: DEFAULT_ENUM_CAP });
    }
    for x in source.domain() {
        if x.len() != n || x.iter().any(|&c| c >= q) {
            return Err(ExtractError::BadPoint(format!("{x:?}")));
        }
    }
    let exact = source.is_exact();
    let mut acc_exact: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    let mut acc_float: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    let pair_weight = BigRational::new(BigInt::one(), BigInt::from(q * q));
    for i in 0..source.len() {
        let x = &source.domain()[i];
        let y = adversary
            .table
            .get(x)
            .ok_or_else(|| ExtractError::BadPoint(format!("{x:?} not in adversary table")))?;
        for a in 0..q {
            for b in 0..q {
                let z: Vec<u64> = x
                    .iter()
                    .zip(y.iter())
                    .map(|(&xc, &yc)| (a * xc + b * yc) % q)
                    .collect();
                if exact {
                    let w = source.prob_exact(i)?.clone() * &pair_weight;
                    *acc_exact.entry(z).or_insert_with(BigRational::zero) += w;
                } else {
                    let w = source.prob_f64(i) / (q * q) as f64;
                    *acc_float.entry(z).or_insert(0.0) += w;
                }
            }
        }
    }
    if exact {
        Distribution::from_exact_pairs(
            acc_exact.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        )
    } else {
        Distribution::from_float_pairs(
            acc_float.into_iter().filter(|(_, p)| *p > 0.0).collect(),
        )
    }
}

/// Exact size of A + B*C and the growth exponent log|A+BC| / log|A|.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub size_abc: usize,
    pub ratio: Option<f64>,
}

pub fn biw_growth(
    a: &BTreeSet<FieldElement>,
    b: &BTreeSet<FieldElement>,
    c: &BTreeSet<FieldElement>,
) -> Result<GrowthReport, ExtractError> {
    if a.is_empty() || b.is_empty() || c.is_empty() {
        return Err(ExtractError::EmptySet);
    }
    let mut sums = BTreeSet::new();
    for x in a {
        for y in b {
            for z in c {
                sums.insert(x + &(y * z));
            }
        }
    }
    let size = sums.len();
    let ratio = if a.len() >= 2 {
        Some((size as f64).ln() / (a.len() as f64).ln())
    } else {
        None
    };
    Ok(GrowthReport { size_abc: size, ratio })
}

/// Element of Z[w], w a primitive cube root of unity: a + b w with
/// w^2 = -1 - w. Magnitude squared is a^2 - ab + b^2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Eisenstein {
    a: i128,
    b: i128,
}

impl Eisenstein {
    fn add_power(&mut self, k: u64, weight: i128) {
        match k % 3 {
            0 => self.a += weight,
            1 => self.b += weight,
            _ => {
                self.a -= weight;
                self.b -= weight;
            }
        }
    }

    fn magnitude_squared(&self) -> BigInt {
        let a = BigInt::from(self.a);
        let b = BigInt::from(self.b);
        &a * &a - &a * &b + &b * &b
    }
}

fn check_z3_set(n: usize, set: &BTreeSet<Vec<u64>>) -> Result<(), ExtractError> {
    if set.is_empty() {
        return Err(ExtractError::EmptySet);
    }
    for v in set {
        if v.len() != n || v.iter().any(|&c| c >= 3) {
            return Err(ExtractError::BadPoint(format!("{v:?}")));
        }
    }
    Ok(())
}

/// Exact witness for the Parseval bound on a character sum over
/// Z_3^n: the squared magnitude of sum_{a in A, b in B} w^{<a,b>}
/// as an integer, the bound 3^n |A| |B|, and the pair count. Both
/// sides are integers, so the comparison needs no tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasCertificate {
    pub magnitude_squared: BigInt,
    pub parseval_bound: BigInt,
    pub pairs: u64,
}

impl BiasCertificate {
    /// Whether the squared character sum stays within the bound.
    pub fn holds(&self) -> bool {
        self.magnitude_squared <= self.parseval_bound
    }

    /// The bias |E w^{<a,b>}| = sqrt(mag2) / (|A| |B|), as a float.
    pub fn bias_value(&self) -> f64 {
        let mag2 = self.magnitude_squared.to_f64().expect("fits f64");
        mag2.sqrt() / self.pairs as f64
    }
}

/// Computes the character sum of w^{<a,b>} over A x B exactly in
/// Z[w] and packages its squared magnitude with the Parseval bound.
pub fn bias_certificate(
    n: usize,
    a: &BTreeSet<Vec<u64>>,
    b: &BTreeSet<Vec<u64>>,
    omega_power: u8,
) -> Result<BiasCertificate, ExtractError> {
    if omega_power != 1 && omega_power != 2 {
        return Err(ExtractError::BadOmegaPower(omega_power));
    }
    check_z3_set(n, a)?;
    check_z3_set(n, b)?;
    let mut sum = Eisenstein::default();
    for x in a {
        for y in b {
            let dot: u64 = x.iter().zip(y.iter()).map(|(&p, &q)| p * q).sum();
            sum.add_power(dot * omega_power as u64, 1);
        }
    }
    let pairs = (a.len() * b.len()) as u64;
    Ok(BiasCertificate {
        magnitude_squared: sum.magnitude_squared(),
        parseval_bound: BigInt::from(3u64).pow(n as u32) * BigInt::from(pairs),
        pairs,
    })
}

/// |E_{a in A, b in B} w^{<a,b>}| over Z_3^n, computed exactly in
/// Z[w] with the square root taken only at the end. The result obeys
/// bias <= sqrt(3^n / (|A| |B|)); the exact integer form of that
/// bound is asserted.
pub fn bias(
    n: usize,
    a: &BTreeSet<Vec<u64>>,
    b: &BTreeSet<Vec<u64>>,
    omega_power: u8,
) -> Result<f64, ExtractError> {
    let certificate = bias_certificate(n, a, b, omega_power)?;
    assert!(
        certificate.holds(),
        "character sum exceeds the Parseval bound"
    );
    Ok(certificate.bias_value())
}

/// Counts of the 4-fold sumset distribution: c[x] = number of
/// quadruples summing to x.
fn fourfold_counts(set: &BTreeSet<Vec<u64>>) -> BTreeMap<Vec<u64>, u64> {
    let single: BTreeMap<Vec<u64>, u64> = set.iter().map(|v| (v.clone(), 1)).collect();
    let convolve = |p: &BTreeMap<Vec<u64>, u64>, q: &BTreeMap<Vec<u64>, u64>| {
        let mut out: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
        for (x, cx) in p {
            for (y, cy) in q {
                let z: Vec<u64> = x.iter().zip(y.iter()).map(|(&a, &b)| (a + b) % 3).collect();
                *out.entry(z).or_insert(0) += cx * cy;
            }
        }
        out
    };
    let double = convolve(&single, &single);
    convolve(&double, &double)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoursumReport {
    pub lhs: f64,
    pub rhs: f64,
}

/// Check bias(A, B) <= bias(4A, 4B)^{1/16} with the four-fold sums
/// taken as distributions (a_1+a_2+a_3+a_4, a_i uniform in A). Both
/// sides are computed exactly up to the final roots; the inequality
/// is asserted.
pub fn foursum_bias_check(
    n: usize,
    a: &BTreeSet<Vec<u64>>,
    b: &BTreeSet<Vec<u64>>,
) -> Result<FoursumReport, ExtractError> {
    let size = 3u64.checked_pow(n as u32).unwrap_or(u64::MAX);
    if size > 729 {
        return Err(ExtractError::CapExceeded { size, cap: 729 });
    }
    check_z3_set(n, a)?;
    check_z3_set(n, b)?;
    let lhs = bias(n, a, b, 1)?;
    let ca = fourfold_counts(a);
    let cb = fourfold_counts(b);
    let mut sum = Eisenstein::default();
    for (x, cx) in &ca {
        for (y, cy) in &cb {
            let dot: u64 = x.iter().zip(y.iter()).map(|(&p, &q)| p * q).sum();
            sum.add_power(dot, *cx as i128 * *cy as i128);
        }
    }
    let mag2 = sum.magnitude_squared().to_f64().expect("fits f64");
    let total = (a.len() as f64).powi(4) * (b.len() as f64).powi(4);
    let dist_bias = mag2.sqrt() / total;
    let rhs = dist_bias.powf(1.0 / 16.0);
    assert!(
        lhs <= rhs + 1e-12,
        "four-sum bias inequality violated: {lhs} > {rhs}"
    );
    Ok(FoursumReport { lhs, rhs })
}

/// The quadratic source {(x, x^2) : x in F_{3^p}} written coordinate
/// by coordinate in the field's fixed F_3 basis, a subset of Z_3^{2p}.
pub fn bourgain_source(p_exp: usize) -> Result<BTreeSet<Vec<u64>>, ExtractError> {
    let q = 3u64
        .checked_pow(p_exp as u32)
        .filter(|&q| q <= DEFAULT_ENUM_CAP)
        .ok_or(ExtractError::CapExceeded { size: u64::MAX, cap: DEFAULT_ENUM_CAP })?;
    let field = Field::of_order(q)?;
    let mut out = BTreeSet::new();
    for x in field.elements() {
        let square = &x * &x;
        let mut coords: Vec<u64> = x.rep().to_vec();
        coords.extend(square.rep().iter().copied());
        out.insert(coords);
    }
    assert_eq!(out.len() as u64, q, "x -> (x, x^2) must be injective");
    Ok(out)
}

/// Distribution of x + y z for independent x ~ dx, y ~ dy, z ~ dz
/// over F_q. Domains are single field elements written as their
/// coefficient vectors.
pub fn biw_f1_distribution(
    field: &Field,
    dx: &Distribution,
    dy: &Distribution,
    dz: &Distribution,
) -> Result<Distribution, ExtractError> {
    let decode = |d: &Distribution, i: usize| -> Result<FieldElement, ExtractError> {
        field
            .element(&d.domain()[i])
            .map_err(|_| ExtractError::BadPoint(format!("{:?}", d.domain()[i])))
    };
    let exact = dx.is_exact() && dy.is_exact() && dz.is_exact();
    let mut acc_exact: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    let mut acc_float: BTreeMap<Vec<u64>, f64> = BTreeMap::new();
    for i in 0..dx.len() {
        let x = decode(dx, i)?;
        for j in 0..dy.len() {
            let y = decode(dy, j)?;
            for k in 0..dz.len() {
                let z = decode(dz, k)?;
                let out = &x + &(&y * &z);
                let key = out.rep().to_vec();
                if exact {
                    let w = dx.prob_exact(i)?.clone()
                        * dy.prob_exact(j)?
                        * dz.prob_exact(k)?;
                    *acc_exact.entry(key).or_insert_with(BigRational::zero) += w;
                } else {
                    let w = dx.prob_f64(i) * dy.prob_f64(j) * dz.prob_f64(k);
                    *acc_float.entry(key).or_insert(0.0) += w;
                }
            }
        }
    }
    if exact {
        Distribution::from_exact_pairs(
            acc_exact.into_iter().filter(|(_, p)| !p.is_zero()).collect(),
        )
    } else {
        Distribution::from_float_pairs(
            acc_float.into_iter().filter(|(_, p)| *p > 0.0).collect(),
        )
    }
}

/// The nine-source composition f2 = f1(f1(x1,x2,x3), f1(x4,x5,x6),
/// f1(x7,x8,x9)). How close the output lands to uniform is measured,
/// not proven.
pub fn biw_f2_distribution(
    field: &Field,
    sources: &[Distribution],
) -> Result<Distribution, ExtractError> {
    if sources.len() != 9 {
        return Err(ExtractError::BadDistribution(format!(
            "f2 takes 9 sources, got {}",
            sources.len()
        )));
    }
    let z1 = biw_f1_distribution(field, &sources[0], &sources[1], &sources[2])?;
    let z2 = biw_f1_distribution(field, &sources[3], &sources[4], &sources[5])?;
    let z3 = biw_f1_distribution(field, &sources[6], &sources[7], &sources[8])?;
    biw_f1_distribution(field, &z1, &z2, &z3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kakeya::{build_kakeya, nikodym_from_kakeya};
    use proptest::prelude::*;

    fn indices(n: u64) -> Vec<Vec<u64>> {
        (0..n).map(|i| vec![i]).collect()
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn min_entropy_examples() {
        let uniform8 = Distribution::uniform(indices(8)).unwrap();
        assert_eq!(min_entropy(&uniform8), 3.0);
        let point = Distribution::point_mass(indices(4), &[2]).unwrap();
        assert_eq!(min_entropy(&point), 0.0);
        let thirds = Distribution::uniform(indices(3)).unwrap();
        assert!((min_entropy(&thirds) - 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn statistical_distance_examples() {
        let p = Distribution::uniform(indices(4)).unwrap();
        assert_eq!(statistical_distance(&p, &p).unwrap(), 0.0);

        let left = Distribution::from_exact_pairs(vec![
            (vec![0], rational(1, 2)),
            (vec![1], rational(1, 2)),
            (vec![2], rational(0, 1)),
            (vec![3], rational(0, 1)),
        ])
        .unwrap();
        let right = Distribution::from_exact_pairs(vec![
            (vec![0], rational(0, 1)),
            (vec![1], rational(0, 1)),
            (vec![2], rational(1, 2)),
            (vec![3], rational(1, 2)),
        ])
        .unwrap();
        assert_eq!(statistical_distance_exact(&left, &right).unwrap(), rational(1, 1));

        let half = Distribution::from_exact_pairs(vec![
            (vec![0], rational(1, 2)),
            (vec![1], rational(1, 2)),
        ])
        .unwrap();
        let mass = Distribution::from_exact_pairs(vec![
            (vec![0], rational(1, 1)),
            (vec![1], rational(0, 1)),
        ])
        .unwrap();
        assert_eq!(statistical_distance_exact(&half, &mass).unwrap(), rational(1, 2));

        let other = Distribution::uniform(indices(3)).unwrap();
        assert_eq!(
            statistical_distance(&p, &other).unwrap_err(),
            ExtractError::DomainMismatch
        );
    }

    #[test]
    fn distribution_validation() {
        let bad = Distribution::from_exact_pairs(vec![(vec![0], rational(1, 2))]);
        assert!(matches!(bad, Err(ExtractError::BadDistribution(_))));
        let dup = Distribution::from_exact_pairs(vec![
            (vec![0], rational(1, 2)),
            (vec![0], rational(1, 2)),
        ]);
        assert!(matches!(dup, Err(ExtractError::BadDistribution(_))));
        let negative = Distribution::from_exact_pairs(vec![
            (vec![0], rational(3, 2)),
            (vec![1], rational(-1, 2)),
        ]);
        assert!(matches!(negative, Err(ExtractError::BadDistribution(_))));
    }

    #[test]
    fn closeness_examples() {
        let uniform = Distribution::uniform(indices(8)).unwrap();
        assert_eq!(closeness_to_min_entropy(&uniform, 3.0), 0.0);

        let point = Distribution::point_mass(indices(2), &[0]).unwrap();
        assert_eq!(closeness_to_min_entropy(&point, 1.0), 0.5);

        // Domain of 3 cannot hold min-entropy 2.
        let small = Distribution::uniform(indices(3)).unwrap();
        assert_eq!(closeness_to_min_entropy(&small, 2.0), 1.0);
    }

    #[test]
    fn closeness_matches_brute_force() {
        // Brute-force oracle: scan all grid distributions with max
        // weight under the ceiling and take the least distance.
        let steps: i64 = 60;
        let brute = |d: &Distribution, k: f64| -> f64 {
            let ceiling = 2f64.powf(-k);
            let cap = ((ceiling * steps as f64) + 1e-9).floor() as i64;
            let n = d.len();
            let mut best = f64::INFINITY;
            let mut counts = vec![0i64; n];
            fn scan(
                counts: &mut Vec<i64>,
                i: usize,
                left: i64,
                cap: i64,
                steps: i64,
                d: &Distribution,
                best: &mut f64,
            ) {
                if i + 1 == counts.len() {
                    if left > cap {
                        return;
                    }
                    counts[i] = left;
                    let l1: f64 = counts
                        .iter()
                        .enumerate()
                        .map(|(j, &c)| (c as f64 / steps as f64 - d.prob_f64(j)).abs())
                        .sum();
                    *best = best.min(l1 / 2.0);
                    return;
                }
                for c in 0..=cap.min(left) {
                    counts[i] = c;
                    scan(counts, i + 1, left - c, cap, steps, d, best);
                }
            }
            scan(&mut counts, 0, steps, cap, steps, d, &mut best);
            best
        };
        let dists = [
            Distribution::from_float_pairs(vec![
                (vec![0], 0.6),
                (vec![1], 0.2),
                (vec![2], 0.1),
                (vec![3], 0.1),
            ])
            .unwrap(),
            Distribution::point_mass(indices(4), &[1]).unwrap(),
            Distribution::uniform(indices(4)).unwrap(),
        ];
        for d in &dists {
            for k in [0.0, 1.0, 2.0] {
                let formula = closeness_to_min_entropy(d, k);
                let grid = brute(d, k);
                // The grid over-estimates by at most its resolution.
                assert!(grid + 1e-9 >= formula, "grid beat the formula at k={k}");
                assert!(grid - formula <= 4.0 / steps as f64, "formula off at k={k}");
            }
        }
        let spread = Distribution::from_float_pairs(vec![
            (vec![0], 0.6),
            (vec![1], 0.2),
            (vec![2], 0.1),
            (vec![3], 0.1),
        ])
        .unwrap();
        assert!((closeness_to_min_entropy(&spread, 1.0) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn merger_identity_hand_enumeration() {
        // Z = (a + b) x over F_3: 15 of the 27 triples land on 0 and
        // 6 each on 1 and 2.
        let source = Distribution::uniform(indices(3)).unwrap();
        let adversary = AdversaryMap::identity(3, 1).unwrap();
        let z = merger_distribution(3, 1, &source, &adversary).unwrap();
        let expected = Distribution::from_exact_pairs(vec![
            (vec![0], rational(5, 9)),
            (vec![1], rational(2, 9)),
            (vec![2], rational(2, 9)),
        ])
        .unwrap();
        assert_eq!(z, expected);
    }

    #[test]
    fn merger_nikodym_attack_traps_output() {
        let kakeya = build_kakeya(5, 2).unwrap();
        let nikodym = nikodym_from_kakeya(&kakeya).unwrap();
        let adversary = AdversaryMap::nikodym_attack(&nikodym).unwrap();
        let source = Distribution::uniform(space_points(5, 2).unwrap()).unwrap();
        let z = merger_distribution(5, 2, &source, &adversary).unwrap();
        let trapped = z.mass_on_exact(&nikodym.points).unwrap();
        assert!(trapped >= rational(4, 5), "trapped mass {trapped}");
        assert!(nikodym.points.len() as u64 <= 5 * kakeya.points.len() as u64);
    }

    #[test]
    fn merger_point_mass_support() {
        let source = Distribution::point_mass(space_points(3, 2).unwrap(), &[1, 2]).unwrap();
        for adversary in [
            AdversaryMap::identity(3, 2).unwrap(),
            AdversaryMap::from_fn(3, 2, |x| vec![x[1], (x[0] + 1) % 3]).unwrap(),
            AdversaryMap::from_fn(3, 2, |_| vec![2, 1]).unwrap(),
        ] {
            let z = merger_distribution(3, 2, &source, &adversary).unwrap();
            assert!(z.len() <= 9);
        }
    }

    #[test]
    fn biw_growth_subfield_stalls() {
        let f16 = Field::of_order(16).unwrap();
        // The subfield F_4 is exactly the solution set of x^4 = x.
        let sub: BTreeSet<FieldElement> = f16
            .elements()
            .into_iter()
            .filter(|x| x.pow(4) == *x)
            .collect();
        assert_eq!(sub.len(), 4);
        let report = biw_growth(&sub, &sub, &sub).unwrap();
        assert_eq!(report.size_abc, 4);
        assert_eq!(report.ratio, Some(1.0));
    }

    #[test]
    fn biw_growth_examples() {
        let f7 = Field::prime(7).unwrap();
        let set: BTreeSet<FieldElement> =
            [1, 2].into_iter().map(|i| f7.from_int(i)).collect();
        let report = biw_growth(&set, &set, &set).unwrap();
        assert_eq!(report.size_abc, 5);
        assert!(report.ratio.unwrap() > 2.0);

        let single: BTreeSet<FieldElement> = [f7.one()].into_iter().collect();
        let report = biw_growth(&single, &single, &single).unwrap();
        assert_eq!(report.size_abc, 1);
        assert_eq!(report.ratio, None);

        assert_eq!(
            biw_growth(&BTreeSet::new(), &set, &set).unwrap_err(),
            ExtractError::EmptySet
        );
    }

    proptest! {
        #[test]
        fn biw_growth_never_shrinks(
            a_mask in 1u32..128,
            b_mask in 1u32..128,
            c_mask in 1u32..128,
        ) {
            let f7 = Field::prime(7).unwrap();
            let pick = |mask: u32| -> BTreeSet<FieldElement> {
                (0..7).filter(|i| mask >> i & 1 == 1).map(|i| f7.from_int(i)).collect()
            };
            let a = pick(a_mask);
            let report = biw_growth(&a, &pick(b_mask), &pick(c_mask)).unwrap();
            prop_assert!(report.size_abc >= a.len());
        }

        #[test]
        fn bias_parseval_bound_z3_squared(a_mask in 1u32..512, b_mask in 1u32..512) {
            let pick = |mask: u32| -> BTreeSet<Vec<u64>> {
                (0..9u64)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| vec![i / 3, i % 3])
                    .collect()
            };
            let a = pick(a_mask);
            let b = pick(b_mask);
            let value = bias(2, &a, &b, 1).unwrap();
            let bound = (9.0 / (a.len() * b.len()) as f64).sqrt();
            prop_assert!(value <= bound + 1e-12);
        }

        #[test]
        fn statistical_distance_triangle(
            p_raw in proptest::collection::vec(0u32..100, 4),
            q_raw in proptest::collection::vec(0u32..100, 4),
            r_raw in proptest::collection::vec(0u32..100, 4),
        ) {
            let normalize = |raw: &[u32]| -> Option<Distribution> {
                let total: u32 = raw.iter().sum();
                if total == 0 {
                    return None;
                }
                Distribution::from_exact_pairs(
                    raw.iter()
                        .enumerate()
                        .map(|(i, &w)| (vec![i as u64], rational(w as i64, total as i64)))
                        .collect(),
                )
                .ok()
            };
            let (Some(p), Some(q), Some(r)) =
                (normalize(&p_raw), normalize(&q_raw), normalize(&r_raw))
            else {
                return Ok(());
            };
            let pq = statistical_distance_exact(&p, &q).unwrap();
            let qr = statistical_distance_exact(&q, &r).unwrap();
            let pr = statistical_distance_exact(&p, &r).unwrap();
            prop_assert!(pr <= pq + qr);
        }

        #[test]
        fn closeness_monotone_in_k(
            raw in proptest::collection::vec(1u32..50, 2..6),
            k1 in 0.0f64..3.0,
            delta in 0.0f64..2.0,
        ) {
            let total: u32 = raw.iter().sum();
            let d = Distribution::from_exact_pairs(
                raw.iter()
                    .enumerate()
                    .map(|(i, &w)| (vec![i as u64], rational(w as i64, total as i64)))
                    .collect(),
            )
            .unwrap();
            let lo = closeness_to_min_entropy(&d, k1);
            let hi = closeness_to_min_entropy(&d, k1 + delta);
            prop_assert!(lo <= hi + 1e-12);
        }
    }

    #[test]
    fn bias_examples() {
        let z3: BTreeSet<Vec<u64>> = (0..3u64).map(|i| vec![i]).collect();
        let value = bias(1, &z3, &z3, 1).unwrap();
        assert!((value - 1.0 / 3.0).abs() < 1e-12);

        let zero: BTreeSet<Vec<u64>> = [vec![0]].into_iter().collect();
        assert_eq!(bias(1, &zero, &zero, 1).unwrap(), 1.0);

        let one: BTreeSet<Vec<u64>> = [vec![1]].into_iter().collect();
        assert!(bias(1, &one, &z3, 1).unwrap() < 1e-12);

        // The conjugate character has the same magnitude.
        assert!((bias(1, &z3, &z3, 2).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            bias(1, &z3, &z3, 3).unwrap_err(),
            ExtractError::BadOmegaPower(3)
        );
    }

    #[test]
    fn foursum_examples() {
        let zero: BTreeSet<Vec<u64>> = [vec![0]].into_iter().collect();
        let report = foursum_bias_check(1, &zero, &zero).unwrap();
        assert_eq!(report.lhs, 1.0);
        assert_eq!(report.rhs, 1.0);

        let z3: BTreeSet<Vec<u64>> = (0..3u64).map(|i| vec![i]).collect();
        let one: BTreeSet<Vec<u64>> = [vec![1]].into_iter().collect();
        let report = foursum_bias_check(1, &one, &z3).unwrap();
        assert!(report.lhs < 1e-12);
        assert!(report.rhs >= 0.0);

        let too_big: BTreeSet<Vec<u64>> = [vec![0; 7]].into_iter().collect();
        assert!(matches!(
            foursum_bias_check(7, &too_big, &too_big),
            Err(ExtractError::CapExceeded { .. })
        ));
    }

    proptest! {
        #[test]
        fn foursum_inequality_random_sets(a_mask in 1u32..512, b_mask in 1u32..512) {
            let pick = |mask: u32| -> BTreeSet<Vec<u64>> {
                (0..9u64)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| vec![i / 3, i % 3])
                    .collect()
            };
            let report = foursum_bias_check(2, &pick(a_mask), &pick(b_mask)).unwrap();
            prop_assert!(report.lhs <= report.rhs + 1e-12);
        }
    }

    #[test]
    fn bourgain_source_examples() {
        let s1 = bourgain_source(1).unwrap();
        let expected: BTreeSet<Vec<u64>> =
            [vec![0, 0], vec![1, 1], vec![2, 1]].into_iter().collect();
        assert_eq!(s1, expected);

        let s2 = bourgain_source(2).unwrap();
        assert_eq!(s2.len(), 9);
        assert!(s2.iter().all(|v| v.len() == 4));

        let s3 = bourgain_source(3).unwrap();
        assert_eq!(s3.len(), 27);
    }

    #[test]
    fn biw_composition_pushes_toward_uniform() {
        let f3 = Field::prime(3).unwrap();
        let full: Vec<Vec<u64>> = (0..3u64).map(|i| vec![i]).collect();
        let uniform = Distribution::uniform(full.clone()).unwrap();

        // Three fresh uniform inputs give an exactly uniform output:
        // adding an independent uniform x flattens everything.
        let z = biw_f1_distribution(&f3, &uniform, &uniform, &uniform).unwrap();
        assert_eq!(z, uniform);

        // A coin source on {0, 1}: one round lands at distance 5/24
        // from uniform, down from 1/3.
        let coin = Distribution::from_exact_pairs(vec![
            (vec![0], rational(1, 2)),
            (vec![1], rational(1, 2)),
        ])
        .unwrap();
        let round = biw_f1_distribution(&f3, &coin, &coin, &coin).unwrap();
        let expected = Distribution::from_exact_pairs(vec![
            (vec![0], rational(3, 8)),
            (vec![1], rational(1, 2)),
            (vec![2], rational(1, 8)),
        ])
        .unwrap();
        assert_eq!(round, expected);
        let coin_full = coin.extend_domain(full.clone()).unwrap();
        let sd_source = statistical_distance_exact(&coin_full, &uniform).unwrap();
        let sd_round = statistical_distance_exact(&round, &uniform).unwrap();
        assert_eq!(sd_source, rational(1, 3));
        assert_eq!(sd_round, rational(5, 24));

        // The nine-source composition improves on a single round.
        let sources = vec![coin; 9];
        let f2 = biw_f2_distribution(&f3, &sources).unwrap();
        let sd_f2 = statistical_distance_exact(&f2, &uniform).unwrap();
        assert!(sd_f2 < sd_round);

        assert!(matches!(
            biw_f2_distribution(&f3, &sources[..4]),
            Err(ExtractError::BadDistribution(_))
        ));
    }

    #[test]
    fn distribution_json_round_trip() {
        let exact = Distribution::from_exact_pairs(vec![
            (vec![0, 1], rational(1, 3)),
            (vec![1, 0], rational(2, 3)),
        ])
        .unwrap();
        let text = exact.to_json();
        assert!(text.contains("\"1/3\""));
        assert_eq!(Distribution::from_json(&text).unwrap(), exact);

        let float = Distribution::from_float_pairs(vec![
            (vec![0], 0.25),
            (vec![1], 0.75),
        ])
        .unwrap();
        let text = float.to_json();
        let back = Distribution::from_json(&text).unwrap();
        assert!(!back.is_exact());
        assert_eq!(back, float);

        let mixed = r#"{"domain":[[0],[1]],"probs":["1/2",0.5]}"#;
        assert!(matches!(
            Distribution::from_json(mixed),
            Err(ExtractError::BadDistribution(_))
        ));
    }
}
