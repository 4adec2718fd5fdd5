//! Small Kakeya sets in F_q^n, the Nikodym sets they induce, and the
//! rank certificate behind the (1/n!) q^n lower bound.
//!
//! The construction covers directions with nonzero last coordinate by
//! lines whose points have, per coordinate, the form v^2/4 + v t. Odd
//! characteristic is essential (the 1/4), and completing the square
//! shows each slice coordinate ranges over a translate of the squares,
//! so the core has about q^n / 2^(n-1) points. Directions inside the
//! hyperplane t = 0 are covered by explicit lines through the origin.
//!
//! Witnesses carry, for every projective direction, the base point of
//! a full line inside the set; verification replays all of them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::field::{Field, FieldElement};
use crate::linalg;
use crate::poly::{binomial, monomials_up_to};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KakeyaError {
    #[error("q = {0} must be an odd prime")]
    NotOddPrime(u64),
    #[error("dimension n = {0} must be at least 2")]
    DimensionTooSmall(usize),
    #[error("space of size {size} exceeds the enumeration cap {cap}")]
    CapExceeded { size: u64, cap: u64 },
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("rank {rank} below the expected {expected} on a verified Kakeya set")]
    RankDeficient { rank: usize, expected: usize },
}

/// A Kakeya set with its line certificates: for every projective
/// direction (stored under its canonical representative) a base point
/// whose full line in that direction stays inside `points`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KakeyaWitness {
    pub q: u64,
    pub n: usize,
    pub points: BTreeSet<Vec<u64>>,
    pub base_of: BTreeMap<Vec<u64>, Vec<u64>>,
}

/// A Nikodym set: every point outside it sees all of some punctured
/// line through itself inside the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NikodymWitness {
    pub q: u64,
    pub n: usize,
    pub points: BTreeSet<Vec<u64>>,
    pub line_of: BTreeMap<Vec<u64>, Vec<u64>>,
}

/// Rank certificate for the degree-(q-1) lower bound: evaluation of
/// all monomials of degree at most q-1 on the set has full column
/// rank, so the set cannot be cut out by a low-degree polynomial and
/// must have at least C(n+q-1, n) >= q^n/n! points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rank: usize,
    pub monomial_count: u64,
    pub implied_lower_bound: u64,
}

impl RankCertificate {
    /// Exact check of implied_lower_bound >= q^n / n!.
    pub fn meets_factorial_bound(&self, q: u64, n: usize) -> bool {
        let factorial: u64 = (1..=n as u64).product();
        self.implied_lower_bound * factorial >= q.pow(n as u32)
    }
}

fn check_params(q: u64, n: usize) -> Result<(), KakeyaError> {
    let field = Field::prime(q).map_err(|_| KakeyaError::NotOddPrime(q))?;
    if q == 2 {
        return Err(KakeyaError::NotOddPrime(q));
    }
    if n < 2 {
        return Err(KakeyaError::DimensionTooSmall(n));
    }
    let cap = field.enum_cap();
    let size = q.checked_pow(n as u32).unwrap_or(u64::MAX);
    if size > cap {
        return Err(KakeyaError::CapExceeded { size, cap });
    }
    Ok(())
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // q prime, a nonzero mod q.
    let mut e = q - 2;
    let mut base = a % q;
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    acc
}

/// Canonical representative of the projective class of a nonzero
/// vector: the lexicographically smallest nonzero scalar multiple.
pub fn projective_rep(v: &[u64], q: u64) -> Vec<u64> {
    debug_assert!(v.iter().any(|&c| c != 0));
    (1..q)
        .map(|c| v.iter().map(|&x| x * c % q).collect::<Vec<u64>>())
        .min()
        .unwrap()
}

/// One representative per projective direction of F_q^n.
pub fn projective_directions(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut reps = BTreeSet::new();
    let size = q.pow(n as u32);
    for idx in 1..size {
        let mut v = vec![0u64; n];
        let mut rest = idx;
        for c in v.iter_mut().rev() {
            *c = rest % q;
            rest /= q;
        }
        reps.insert(projective_rep(&v, q));
    }
    reps.into_iter().collect()
}

/// The core of the construction: all points
/// (v_1^2/4 + v_1 t, ..., v_{n-1}^2/4 + v_{n-1} t, t).
/// Per slice t, each coordinate equals (v/2 + t)^2 - t^2, a translate
/// of the squares, so the slice has ((q+1)/2)^(n-1) points.
pub fn core_points(q: u64, n: usize) -> Result<BTreeSet<Vec<u64>>, KakeyaError> {
    check_params(q, n)?;
    let inv4 = inv_mod(4, q);
    // Per-coordinate reachable values at a given t: {v^2/4 + v t}.
    let mut points = BTreeSet::new();
    for t in 0..q {
        let coord_values: BTreeSet<u64> =
            (0..q).map(|v| (v * v % q * inv4 + v * t) % q).collect();
        let values: Vec<u64> = coord_values.into_iter().collect();
        let mut stack = vec![0usize; n - 1];
        'outer: loop {
            let mut pt: Vec<u64> = stack.iter().map(|&i| values[i]).collect();
            pt.push(t);
            points.insert(pt);
            for i in (0..n - 1).rev() {
                stack[i] += 1;
                if stack[i] < values.len() {
                    continue 'outer;
                }
                stack[i] = 0;
            }
            break;
        }
    }
    Ok(points)
}

/// Build the witness: core points plus one origin-anchored line per
/// direction in the hyperplane t = 0, with base_of covering every
/// projective direction.
pub fn build_kakeya(q: u64, n: usize) -> Result<KakeyaWitness, KakeyaError> {
    let mut points = core_points(q, n)?;
    let inv4 = inv_mod(4, q);
    let mut base_of = BTreeMap::new();
    for rep in projective_directions(q, n) {
        if rep[n - 1] != 0 {
            // Normalize to last coordinate 1; the base point depends
            // only on that normalized form, the stored direction stays
            // canonical (same line as a set).
            let scale = inv_mod(rep[n - 1], q);
            let mut base: Vec<u64> = rep[..n - 1]
                .iter()
                .map(|&b| {
                    let bn = b * scale % q;
                    bn * bn % q * inv4 % q
                })
                .collect();
            base.push(0);
            base_of.insert(rep, base);
        } else {
            // Line through the origin; adds at most q - 1 new points.
            for t in 0..q {
                points.insert(rep.iter().map(|&c| c * t % q).collect());
            }
            base_of.insert(rep, vec![0; n]);
        }
    }
    Ok(KakeyaWitness { q, n, points, base_of })
}

impl KakeyaWitness {
    /// Exhaustively replay every stored line: true iff base_of covers
    /// all projective directions and each full line lies in points.
    pub fn verify(&self) -> bool {
        if self.q < 3 || self.n < 2 {
            return false;
        }
        for rep in projective_directions(self.q, self.n) {
            let Some(base) = self.base_of.get(&rep) else {
                return false;
            };
            for t in 0..self.q {
                let pt: Vec<u64> = base
                    .iter()
                    .zip(rep.iter())
                    .map(|(&y, &x)| (y + t * x) % self.q)
                    .collect();
                if !self.points.contains(&pt) {
                    return false;
                }
            }
        }
        true
    }

    /// Size report: |points| against q^n / 2^(n-1) + c * q^(n-1),
    /// with the achieved c.
    pub fn size_stats(&self) -> SizeStats {
        let qn = self.q.pow(self.n as u32) as f64;
        let main = qn / 2f64.powi(self.n as i32 - 1);
        let extra = (self.points.len() as f64 - main).max(0.0);
        SizeStats {
            size: self.points.len(),
            main_term: main,
            extra_constant: extra / self.q.pow(self.n as u32 - 1) as f64,
        }
    }

    pub fn to_json(&self) -> String {
        let dto = WitnessJson {
            q: self.q,
            n: self.n,
            points: self.points.iter().cloned().collect(),
            base_of: self
                .base_of
                .iter()
                .map(|(k, v)| (join_key(k), v.clone()))
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("witness serialization")
    }

    pub fn from_json(text: &str) -> Result<KakeyaWitness, KakeyaError> {
        let dto: WitnessJson = serde_json::from_str(text)
            .map_err(|e| KakeyaError::InvalidWitness(e.to_string()))?;
        let mut witness = KakeyaWitness {
            q: dto.q,
            n: dto.n,
            points: dto.points.into_iter().collect(),
            base_of: BTreeMap::new(),
        };
        for (key, base) in dto.base_of {
            witness.base_of.insert(split_key(&key)?, base);
        }
        witness.validate_shape()?;
        Ok(witness)
    }

    fn validate_shape(&self) -> Result<(), KakeyaError> {
        check_params(self.q, self.n)?;
        let ok_point =
            |p: &Vec<u64>| p.len() == self.n && p.iter().all(|&c| c < self.q);
        if let Some(bad) = self.points.iter().find(|p| !ok_point(p)) {
            return Err(KakeyaError::InvalidWitness(format!(
                "point {bad:?} is not in F_{}^{}",
                self.q, self.n
            )));
        }
        for (dir, base) in &self.base_of {
            if !ok_point(dir) || !ok_point(base) || dir.iter().all(|&c| c == 0) {
                return Err(KakeyaError::InvalidWitness(format!(
                    "bad base_of entry {dir:?} -> {base:?}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeStats {
    pub size: usize,
    pub main_term: f64,
    pub extra_constant: f64,
}

fn join_key(v: &[u64]) -> String {
    v.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn split_key(key: &str) -> Result<Vec<u64>, KakeyaError> {
    key.split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| KakeyaError::InvalidWitness(format!("bad key '{key}'")))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    q: u64,
    n: usize,
    points: Vec<Vec<u64>>,
    base_of: BTreeMap<String, Vec<u64>>,
}

/// Scale a verified Kakeya set into a Nikodym set M = {t x : x in K}.
/// For z outside M, the line through z in direction y (the base of
/// K's line in direction z) hits M at every t != 0: z + t y =
/// t (y + t^{-1} z), a scaling of a point of K.
pub fn nikodym_from_kakeya(witness: &KakeyaWitness) -> Result<NikodymWitness, KakeyaError> {
    if !witness.verify() {
        return Err(KakeyaError::InvalidWitness(
            "nikodym_from_kakeya needs a verified Kakeya witness".into(),
        ));
    }
    let q = witness.q;
    let n = witness.n;
    let mut m_points: BTreeSet<Vec<u64>> = BTreeSet::new();
    for x in &witness.points {
        for t in 0..q {
            m_points.insert(x.iter().map(|&c| c * t % q).collect());
        }
    }
    let mut line_of = BTreeMap::new();
    let size = q.pow(n as u32);
    for idx in 0..size {
        let mut z = vec![0u64; n];
        let mut rest = idx;
        for c in z.iter_mut().rev() {
            *c = rest % q;
            rest /= q;
        }
        if m_points.contains(&z) {
            continue;
        }
        // z != 0 here: the origin is always in M.
        let rep = projective_rep(&z, q);
        let y = witness.base_of.get(&rep).expect("verified witness").clone();
        debug_assert!(y.iter().any(|&c| c != 0), "origin-anchored class is inside M");
        for t in 1..q {
            let pt: Vec<u64> = z
                .iter()
                .zip(y.iter())
                .map(|(&zc, &yc)| (zc + t * yc) % q)
                .collect();
            if !m_points.contains(&pt) {
                return Err(KakeyaError::InvalidWitness(format!(
                    "punctured line through {z:?} leaves the scaled set at t = {t}"
                )));
            }
        }
        line_of.insert(z, y);
    }
    Ok(NikodymWitness {
        q,
        n,
        points: m_points,
        line_of,
    })
}

impl NikodymWitness {
    /// Replay the punctured-line property for every outside point.
    pub fn verify(&self) -> bool {
        let size = self.q.pow(self.n as u32);
        for idx in 0..size {
            let mut z = vec![0u64; self.n];
            let mut rest = idx;
            for c in z.iter_mut().rev() {
                *c = rest % self.q;
                rest /= self.q;
            }
            if self.points.contains(&z) {
                continue;
            }
            let Some(y) = self.line_of.get(&z) else {
                return false;
            };
            if y.iter().all(|&c| c == 0) {
                return false;
            }
            for t in 1..self.q {
                let pt: Vec<u64> = z
                    .iter()
                    .zip(y.iter())
                    .map(|(&zc, &yc)| (zc + t * yc) % self.q)
                    .collect();
                if !self.points.contains(&pt) {
                    return false;
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> String {
        let dto = NikodymJson {
            q: self.q,
            n: self.n,
            points: self.points.iter().cloned().collect(),
            line_of: self
                .line_of
                .iter()
                .map(|(k, v)| (join_key(k), v.clone()))
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("witness serialization")
    }
}

#[derive(Serialize, Deserialize)]
struct NikodymJson {
    q: u64,
    n: usize,
    points: Vec<Vec<u64>>,
    line_of: BTreeMap<String, Vec<u64>>,
}

/// Evaluation-matrix rank certificate over S subset of F_q^n. Full
/// column rank C(n+q-1, n) means no nonzero polynomial of degree
/// <= q-1 vanishes on S; for a set containing a line in every
/// direction that is forced, and it pins |S| >= C(n+q-1, n).
pub fn certify_lower_bound(
    q: u64,
    n: usize,
    points: &BTreeSet<Vec<u64>>,
) -> Result<RankCertificate, KakeyaError> {
    check_params(q, n)?;
    let field = Field::prime(q).expect("checked prime");
    let monomials = monomials_up_to(n, (q - 1) as u32);
    let rows: Vec<Vec<FieldElement>> = points
        .iter()
        .map(|p| {
            let coords: Vec<FieldElement> =
                p.iter().map(|&c| field.from_int(c as i64)).collect();
            monomials
                .iter()
                .map(|e| {
                    e.iter()
                        .zip(coords.iter())
                        .fold(field.one(), |acc, (&exp, x)| &acc * &x.pow(exp as u64))
                })
                .collect()
        })
        .collect();
    let rank = linalg::rank(&rows);
    let monomial_count = binomial(n as u64 + q - 1, n as u64);
    if rank as u64 != monomial_count {
        return Err(KakeyaError::RankDeficient {
            rank,
            expected: monomial_count as usize,
        });
    }
    Ok(RankCertificate {
        rank,
        monomial_count,
        implied_lower_bound: monomial_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_sizes() {
        // Slice count oracle: q * ((q+1)/2)^(n-1).
        assert_eq!(core_points(5, 2).unwrap().len(), 15);
        assert_eq!(core_points(3, 2).unwrap().len(), 6);
        for (q, n) in [(3u64, 2usize), (5, 2), (7, 2), (3, 3), (5, 3)] {
            let expected = q * ((q + 1) / 2).pow(n as u32 - 1);
            assert_eq!(core_points(q, n).unwrap().len() as u64, expected);
        }
    }

    #[test]
    fn build_and_verify_small() {
        let w = build_kakeya(5, 2).unwrap();
        assert!(w.verify());
        // One extra projective direction (1, 0) contributes the line
        // {(t, 0)}; only (2,0) and (3,0) are new over the core.
        assert_eq!(w.points.len(), 17);
        assert_eq!(w.base_of.len(), 6);
        let stats = w.size_stats();
        assert_eq!(stats.size, 17);
        assert!(stats.extra_constant <= 2.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(build_kakeya(2, 2).unwrap_err(), KakeyaError::NotOddPrime(2));
        assert_eq!(build_kakeya(9, 2).unwrap_err(), KakeyaError::NotOddPrime(9));
        assert_eq!(build_kakeya(5, 1).unwrap_err(), KakeyaError::DimensionTooSmall(1));
    }

    #[test]
    fn squares_identity_on_core() {
        // Each core coordinate is (v/2 + t)^2 - t^2, so coordinate
        // plus t^2 is a square.
        for (q, n) in [(3u64, 2usize), (5, 2), (7, 3)] {
            let field = Field::prime(q).unwrap();
            let squares: BTreeSet<u64> = field
                .squares()
                .iter()
                .map(|s| field.index_of(s))
                .collect();
            for pt in core_points(q, n).unwrap() {
                let t = pt[n - 1];
                for &c in &pt[..n - 1] {
                    assert!(squares.contains(&((c + t * t) % q)));
                }
            }
        }
    }

    #[test]
    fn whole_space_is_kakeya() {
        let q = 3;
        let n = 2;
        let mut points = BTreeSet::new();
        for a in 0..q {
            for b in 0..q {
                points.insert(vec![a, b]);
            }
        }
        let base_of = projective_directions(q, n)
            .into_iter()
            .map(|d| (d, vec![0, 0]))
            .collect();
        let w = KakeyaWitness { q, n, points, base_of };
        assert!(w.verify());
    }

    #[test]
    fn single_line_is_not_kakeya() {
        let q = 5;
        let points: BTreeSet<Vec<u64>> = (0..q).map(|t| vec![t, 0]).collect();
        let base_of = [(vec![1, 0], vec![0, 0])].into_iter().collect();
        let w = KakeyaWitness { q, n: 2, points, base_of };
        assert!(!w.verify());
    }

    #[test]
    fn size_bound_and_certificate_across_range() {
        for (q, n) in [(3u64, 2usize), (5, 2), (7, 2), (3, 3), (5, 3)] {
            let w = build_kakeya(q, n).unwrap();
            assert!(w.verify(), "q={q} n={n}");
            let bound = q.pow(n as u32) as f64 / 2f64.powi(n as i32 - 1)
                + 2.0 * q.pow(n as u32 - 1) as f64;
            assert!(
                (w.points.len() as f64) <= bound,
                "size {} over bound {bound} at q={q} n={n}",
                w.points.len()
            );
            let cert = certify_lower_bound(q, n, &w.points).unwrap();
            assert_eq!(cert.monomial_count, binomial(n as u64 + q - 1, n as u64));
            assert!(cert.meets_factorial_bound(q, n));
        }
    }

    #[test]
    fn certificate_examples() {
        let w3 = build_kakeya(3, 2).unwrap();
        let cert = certify_lower_bound(3, 2, &w3.points).unwrap();
        assert_eq!(cert.rank, 6);
        // 6 >= 9/2.
        assert!(cert.meets_factorial_bound(3, 2));

        let w5 = build_kakeya(5, 2).unwrap();
        let cert = certify_lower_bound(5, 2, &w5.points).unwrap();
        assert_eq!(cert.rank, 15);

        // The whole space separates all low-degree polynomials.
        let mut space = BTreeSet::new();
        for a in 0..3u64 {
            for b in 0..3 {
                space.insert(vec![a, b]);
            }
        }
        assert_eq!(certify_lower_bound(3, 2, &space).unwrap().rank, 6);
    }

    #[test]
    fn rank_deficiency_reported() {
        // A single line is far from full rank.
        let points: BTreeSet<Vec<u64>> = (0..5u64).map(|t| vec![t, 0]).collect();
        match certify_lower_bound(5, 2, &points) {
            Err(KakeyaError::RankDeficient { rank, expected }) => {
                assert!(rank < expected);
            }
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn nikodym_from_small_kakeya() {
        let w = build_kakeya(5, 2).unwrap();
        let nik = nikodym_from_kakeya(&w).unwrap();
        assert!(nik.verify());
        assert!(nik.points.len() as u64 <= w.q * w.points.len() as u64);
        // Scaling the whole space gives the whole space, vacuously
        // Nikodym.
        let mut points = BTreeSet::new();
        for a in 0..3u64 {
            for b in 0..3 {
                points.insert(vec![a, b]);
            }
        }
        let base_of = projective_directions(3, 2)
            .into_iter()
            .map(|d| (d, vec![0, 0]))
            .collect();
        let full = KakeyaWitness { q: 3, n: 2, points: points.clone(), base_of };
        let nik = nikodym_from_kakeya(&full).unwrap();
        assert_eq!(nik.points, points);
        assert!(nik.line_of.is_empty());
        assert!(nik.verify());
    }

    #[test]
    fn nikodym_size_bound_across_range() {
        for (q, n) in [(3u64, 2usize), (5, 2), (7, 2), (3, 3)] {
            let w = build_kakeya(q, n).unwrap();
            let nik = nikodym_from_kakeya(&w).unwrap();
            assert!(nik.verify());
            assert!(nik.points.len() as u64 <= q * w.points.len() as u64);
        }
    }

    #[test]
    fn witness_json_round_trip() {
        let w = build_kakeya(5, 2).unwrap();
        let text = w.to_json();
        let back = KakeyaWitness::from_json(&text).unwrap();
        assert_eq!(back, w);
        assert!(KakeyaWitness::from_json("{\"q\":5}").is_err());
        // Out-of-range coordinates are rejected.
        let bad = r#"{"q":5,"n":2,"points":[[7,0]],"base_of":{}}"#;
        assert!(matches!(
            KakeyaWitness::from_json(bad),
            Err(KakeyaError::InvalidWitness(_))
        ));
    }

    #[test]
    fn projective_reps_canonical() {
        // (3,1) and (1,2) are the same class mod 5; the canonical
        // representative is the lexicographically smallest multiple.
        assert_eq!(projective_rep(&[3, 1], 5), vec![1, 2]);
        assert_eq!(projective_rep(&[0, 4], 5), vec![0, 1]);
        assert_eq!(projective_directions(5, 2).len(), 6);
        assert_eq!(projective_directions(3, 3).len(), 13);
    }
}
