//! Exact incidence geometry: point/line incidence counts in the
//! rational plane, rich-line and spanned-line statistics, extremal
//! grid generators, joints of 3-space line families, distance
//! quadruple counting, the rigid-motion line family (the one float
//! feature), and projective-plane utilities over F_p.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};

use crate::linalg;

/// Tolerance used by the float-based rigid-motion line family when
/// deciding whether two 3-space lines meet.
pub const ES_TOLERANCE: f64 = 1e-9;

/// Largest line family accepted by the quadratic joint enumeration.
pub const JOINTS_LINE_CAP: usize = 512;

/// Largest point set accepted by distance counting.
pub const DISTANCE_POINT_CAP: usize = 256;

/// Largest point set accepted by the rigid-motion line construction,
/// which enumerates quadruples.
pub const ES_POINT_CAP: usize = 32;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum IncidenceError {
    #[error("need at least {need} distinct points, got {got}")]
    TooFewPoints { got: usize, need: usize },
    #[error("richness threshold must be at least 2, got {0}")]
    BadThreshold(usize),
    #[error("the two points coincide")]
    EqualPoints,
    #[error("line direction is zero")]
    ZeroDirection,
    #[error("duplicate point {0}")]
    DuplicatePoint(String),
    #[error("instance of size {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("coefficients do not describe a line")]
    BadLine,
    #[error("bad point or line file: {0}")]
    BadJson(String),
}

/// A point of the rational plane.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point2 {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point2 {
    pub fn new(x: BigRational, y: BigRational) -> Point2 {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Point2 {
        Point2 {
            x: BigRational::from_integer(BigInt::from(x)),
            y: BigRational::from_integer(BigInt::from(y)),
        }
    }
}

/// An affine line a*X + b*Y + c = 0 with (a, b) != (0, 0), scaled so
/// the first nonzero coefficient is 1; the representation is unique,
/// so structural equality is line equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Line2 {
    a: BigRational,
    b: BigRational,
    c: BigRational,
}

impl Line2 {
    pub fn new(a: BigRational, b: BigRational, c: BigRational) -> Result<Line2, IncidenceError> {
        if a.is_zero() && b.is_zero() {
            return Err(IncidenceError::BadLine);
        }
        let pivot = if !a.is_zero() { a.clone() } else { b.clone() };
        Ok(Line2 {
            a: &a / &pivot,
            b: &b / &pivot,
            c: &c / &pivot,
        })
    }

    /// The line through two distinct points.
    pub fn through(p: &Point2, q: &Point2) -> Result<Line2, IncidenceError> {
        if p == q {
            return Err(IncidenceError::EqualPoints);
        }
        let dx = &q.x - &p.x;
        let dy = &q.y - &p.y;
        // Normal (dy, -dx), offset fixed by passing through p.
        let c = -(&dy * &p.x) + &dx * &p.y;
        Line2::new(dy, -dx, c)
    }

    /// The line y = a*x + b in standard form.
    pub fn slope_form(a: i64, b: i64) -> Line2 {
        Line2::new(
            BigRational::from_integer(BigInt::from(a)),
            BigRational::from_integer(BigInt::from(-1)),
            BigRational::from_integer(BigInt::from(b)),
        )
        .expect("slope form always has b = -1")
    }

    pub fn contains(&self, p: &Point2) -> bool {
        (&self.a * &p.x + &self.b * &p.y + &self.c).is_zero()
    }

    pub fn coefficients(&self) -> (&BigRational, &BigRational, &BigRational) {
        (&self.a, &self.b, &self.c)
    }
}

/// Exact incidence count between distinct points and distinct lines.
/// The two constant-2 counting bounds
/// I <= 2 |P| sqrt(|L|) + 2 |L| and I <= 2 |L| sqrt(|P|) + 2 |P|
/// hold for every instance and are asserted here in exact integer
/// arithmetic.
pub fn count_incidences(points: &[Point2], lines: &[Line2]) -> u64 {
    let points: BTreeSet<&Point2> = points.iter().collect();
    let lines: BTreeSet<&Line2> = lines.iter().collect();
    let mut count = 0u64;
    for line in &lines {
        for point in &points {
            if line.contains(point) {
                count += 1;
            }
        }
    }
    assert!(
        cs_bound_holds(count, points.len() as u64, lines.len() as u64),
        "incidence count {count} broke the point-side counting bound"
    );
    assert!(
        cs_bound_holds(count, lines.len() as u64, points.len() as u64),
        "incidence count {count} broke the line-side counting bound"
    );
    count
}

/// Exact check of i <= 2 m sqrt(k) + 2 k without floats.
pub fn cs_bound_holds(i: u64, m: u64, k: u64) -> bool {
    if i <= 2 * k {
        return true;
    }
    let slack = (i - 2 * k) as u128;
    slack * slack <= 4 * (m as u128) * (m as u128) * (k as u128)
}

/// The tight incidence instance: points [1..M] x [1..2M^2] and the
/// M^3 lines y = a x + b with a in [1..M], b in [1..M^2]. Every line
/// meets exactly M points, so the instance has M^4 incidences.
pub fn st_grid(m: u64) -> (Vec<Point2>, Vec<Line2>) {
    let mut points = Vec::new();
    for x in 1..=m {
        for y in 1..=2 * m * m {
            points.push(Point2::from_ints(x as i64, y as i64));
        }
    }
    let mut lines = Vec::new();
    for a in 1..=m {
        for b in 1..=m * m {
            lines.push(Line2::slope_form(a as i64, b as i64));
        }
    }
    (points, lines)
}

/// The n x n integer grid [0..n)^2 as rational points.
pub fn integer_grid(n: u64) -> Vec<Point2> {
    let mut points = Vec::new();
    for x in 0..n {
        for y in 0..n {
            points.push(Point2::from_ints(x as i64, y as i64));
        }
    }
    points
}

/// Every line spanned by a pair of the (deduplicated) points, mapped
/// to how many of the points it contains.
pub fn line_multiplicities(points: &[Point2]) -> Result<BTreeMap<Line2, usize>, IncidenceError> {
    let distinct: BTreeSet<&Point2> = points.iter().collect();
    let pts: Vec<&Point2> = distinct.into_iter().collect();
    if pts.len() < 2 {
        return Err(IncidenceError::TooFewPoints {
            got: pts.len(),
            need: 2,
        });
    }
    let mut lines: BTreeSet<Line2> = BTreeSet::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            lines.insert(Line2::through(pts[i], pts[j])?);
        }
    }
    let mut counted = BTreeMap::new();
    for line in lines {
        let on = pts.iter().filter(|p| line.contains(p)).count();
        counted.insert(line, on);
    }
    Ok(counted)
}

/// All distinct lines containing at least k points of P, k >= 2,
/// found by exhausting point pairs.
pub fn rich_lines(points: &[Point2], k: usize) -> Result<Vec<Line2>, IncidenceError> {
    if k < 2 {
        return Err(IncidenceError::BadThreshold(k));
    }
    let counted = line_multiplicities(points)?;
    Ok(counted
        .into_iter()
        .filter(|(_, on)| *on >= k)
        .map(|(line, _)| line)
        .collect())
}

/// Spanned-line statistics feeding the two-case dichotomy: either one
/// line holds a constant fraction of P, or P spans quadratically many
/// lines.
#[derive(Clone, Debug, PartialEq)]
pub struct BeckStats {
    pub n: usize,
    pub lines_spanned: usize,
    pub max_collinear: usize,
    /// max_collinear / |P|.
    pub collinear_ratio: f64,
    /// lines_spanned / |P|^2.
    pub spanned_ratio: f64,
}

pub fn beck_stats(points: &[Point2]) -> Result<BeckStats, IncidenceError> {
    let counted = line_multiplicities(points)?;
    let distinct: BTreeSet<&Point2> = points.iter().collect();
    let n = distinct.len();
    let lines_spanned = counted.len();
    let max_collinear = counted.values().copied().max().unwrap_or(0);
    Ok(BeckStats {
        n,
        lines_spanned,
        max_collinear,
        collinear_ratio: max_collinear as f64 / n as f64,
        spanned_ratio: lines_spanned as f64 / (n * n) as f64,
    })
}

/// A point of rational 3-space.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Point3 {
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
}

impl Point3 {
    pub fn from_ints(x: i64, y: i64, z: i64) -> Point3 {
        Point3 {
            x: BigRational::from_integer(BigInt::from(x)),
            y: BigRational::from_integer(BigInt::from(y)),
            z: BigRational::from_integer(BigInt::from(z)),
        }
    }

    fn coords(&self) -> [&BigRational; 3] {
        [&self.x, &self.y, &self.z]
    }
}

/// A line of rational 3-space in point-direction form; the direction
/// is scaled so its first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line3 {
    base: Point3,
    dir: Point3,
}

impl Line3 {
    pub fn new(base: Point3, dir: Point3) -> Result<Line3, IncidenceError> {
        let pivot = dir
            .coords()
            .into_iter()
            .find(|c| !c.is_zero())
            .cloned()
            .ok_or(IncidenceError::ZeroDirection)?;
        Ok(Line3 {
            base,
            dir: Point3 {
                x: &dir.x / &pivot,
                y: &dir.y / &pivot,
                z: &dir.z / &pivot,
            },
        })
    }

    pub fn base(&self) -> &Point3 {
        &self.base
    }

    pub fn direction(&self) -> &Point3 {
        &self.dir
    }

    pub fn contains(&self, p: &Point3) -> bool {
        // p - base must be parallel to dir: all 2x2 minors vanish.
        let d = [&p.x - &self.base.x, &p.y - &self.base.y, &p.z - &self.base.z];
        let e = self.dir.coords();
        for i in 0..3 {
            for j in i + 1..3 {
                if !(&d[i] * e[j] - &d[j] * e[i]).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// The 3 N^2 axis-parallel lines through an N x N x N grid: every
/// grid point lies on three pairwise-independent lines, so all N^3
/// grid points are joints.
pub fn joints_grid(n: u64) -> Vec<Line3> {
    let mut lines = Vec::new();
    for i in 0..n as i64 {
        for j in 0..n as i64 {
            lines.push(
                Line3::new(Point3::from_ints(i, j, 0), Point3::from_ints(0, 0, 1)).unwrap(),
            );
            lines.push(
                Line3::new(Point3::from_ints(i, 0, j), Point3::from_ints(0, 1, 0)).unwrap(),
            );
            lines.push(
                Line3::new(Point3::from_ints(0, i, j), Point3::from_ints(1, 0, 0)).unwrap(),
            );
        }
    }
    lines
}

/// The unique intersection point of two lines, if any. Parallel,
/// identical, and skew pairs yield None.
pub fn line_intersection(l1: &Line3, l2: &Line3) -> Option<Point3> {
    let d1 = l1.dir.coords();
    let d2 = l2.dir.coords();
    let rhs = [
        &l2.base.x - &l1.base.x,
        &l2.base.y - &l1.base.y,
        &l2.base.z - &l1.base.z,
    ];
    // Solve t*d1 - s*d2 = rhs using the first invertible 2x2 minor.
    for i in 0..3 {
        for j in i + 1..3 {
            let det = d1[i] * d2[j] - d1[j] * d2[i];
            let det = -det;
            if det.is_zero() {
                continue;
            }
            // Cramer on rows i, j with matrix [[d1_i, -d2_i], [d1_j, -d2_j]].
            let t = (&rhs[i] * &(-d2[j].clone()) - &(-d2[i].clone()) * &rhs[j]) / &det;
            let s = (d1[i] * &rhs[j] - &rhs[i] * d1[j]) / &det;
            let point = Point3 {
                x: &l1.base.x + &(&t * d1[0]),
                y: &l1.base.y + &(&t * d1[1]),
                z: &l1.base.z + &(&t * d1[2]),
            };
            // Consistency on the remaining coordinate.
            let check = Point3 {
                x: &l2.base.x + &(&s * d2[0]),
                y: &l2.base.y + &(&s * d2[1]),
                z: &l2.base.z + &(&s * d2[2]),
            };
            if point == check {
                return Some(point);
            }
            return None;
        }
    }
    None
}

/// Counts points where at least three lines meet with three linearly
/// independent directions (checked by exact rank over the rationals).
pub fn count_joints(lines: &[Line3]) -> Result<u64, IncidenceError> {
    if lines.len() > JOINTS_LINE_CAP {
        return Err(IncidenceError::CapExceeded {
            size: lines.len(),
            cap: JOINTS_LINE_CAP,
        });
    }
    let mut candidates: BTreeSet<Point3> = BTreeSet::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if let Some(p) = line_intersection(&lines[i], &lines[j]) {
                candidates.insert(p);
            }
        }
    }
    let mut joints = 0u64;
    for p in &candidates {
        let directions: Vec<Vec<BigRational>> = lines
            .iter()
            .filter(|l| l.contains(p))
            .map(|l| vec![l.dir.x.clone(), l.dir.y.clone(), l.dir.z.clone()])
            .collect();
        if directions.len() >= 3 && linalg::rank_rational(&directions) == 3 {
            joints += 1;
        }
    }
    Ok(joints)
}

/// Exact distance-quadruple statistics. Squared distances are
/// rational, so equality of distances is equality of squared
/// distances. Both quadruple conventions are computed: q_full ranges
/// over all of P^4 (the degenerate a = b pairs included), while
/// q_nondegenerate requires a != b and c != d. The two bounds below
/// are theorems and are asserted:
///   distinct >= (|P|^2 - |P|)^2 / q_nondegenerate
///   distinct + 1 >= |P|^4 / q_full
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceStats {
    pub n: usize,
    pub q_full: u64,
    pub q_nondegenerate: u64,
    pub distinct_sq_distances: usize,
    /// Ordered pairs at squared distance exactly 1.
    pub unit_pairs: u64,
    /// |P|^4 / q_full.
    pub lower_bound_full: BigRational,
    /// (|P|^2 - |P|)^2 / q_nondegenerate.
    pub lower_bound_pairs: BigRational,
}

pub fn distance_stats(points: &[Point2]) -> Result<DistanceStats, IncidenceError> {
    let distinct: BTreeSet<&Point2> = points.iter().collect();
    let pts: Vec<&Point2> = distinct.into_iter().collect();
    let n = pts.len();
    if n < 2 {
        return Err(IncidenceError::TooFewPoints { got: n, need: 2 });
    }
    if n > DISTANCE_POINT_CAP {
        return Err(IncidenceError::CapExceeded {
            size: n,
            cap: DISTANCE_POINT_CAP,
        });
    }
    let mut hist: BTreeMap<BigRational, u64> = BTreeMap::new();
    for a in &pts {
        for b in &pts {
            let dx = &a.x - &b.x;
            let dy = &a.y - &b.y;
            let d2 = &dx * &dx + &dy * &dy;
            *hist.entry(d2).or_insert(0) += 1;
        }
    }
    let one = BigRational::one();
    let unit_pairs = hist.get(&one).copied().unwrap_or(0);
    let mut q_full: u64 = 0;
    let mut q_nondeg: u64 = 0;
    let mut distinct_nonzero = 0usize;
    for (d2, count) in &hist {
        q_full += count * count;
        if !d2.is_zero() {
            q_nondeg += count * count;
            distinct_nonzero += 1;
        }
    }
    let n_u = n as u64;
    let pairs = n_u * n_u - n_u;
    let lower_bound_full = BigRational::new(
        BigInt::from(n_u).pow(4),
        BigInt::from(q_full),
    );
    let lower_bound_pairs = BigRational::new(
        BigInt::from(pairs) * BigInt::from(pairs),
        BigInt::from(q_nondeg),
    );
    let distinct_rat = BigRational::from_integer(BigInt::from(distinct_nonzero as u64));
    assert!(
        distinct_rat >= lower_bound_pairs,
        "distance count {distinct_nonzero} fell below the pair-normalized bound {lower_bound_pairs}"
    );
    assert!(
        &distinct_rat + BigRational::one() >= lower_bound_full,
        "distance count {distinct_nonzero} fell below the full-quadruple bound {lower_bound_full}"
    );
    Ok(DistanceStats {
        n,
        q_full,
        q_nondegenerate: q_nondeg,
        distinct_sq_distances: distinct_nonzero,
        unit_pairs,
        lower_bound_full,
        lower_bound_pairs,
    })
}

/// A float line of 3-space in point-direction form.
#[derive(Clone, Debug)]
pub struct FloatLine3 {
    pub base: [f64; 3],
    pub dir: [f64; 3],
}

/// What the rigid-motion construction produced and how the float
/// intersection count compares to the exact quadruple counts.
#[derive(Clone, Debug, PartialEq)]
pub struct ElekesSharirReport {
    pub n: usize,
    pub line_count: usize,
    /// Unordered line pairs meeting within ES_TOLERANCE.
    pub intersecting_pairs: u64,
    pub q_nondegenerate: u64,
    /// Quadruples explained by a pure translation (c - a = d - b).
    pub translation_quadruples: u64,
    pub non_translation_quadruples: u64,
    pub tolerance: f64,
}

/// Builds the |P|^2 rigid-motion lines of a planar point set: the
/// motions mapping a to b form a line through the midpoint of a, b
/// with slope coupled to 1/dist(a, b), and the motions fixing a form
/// a vertical line. Reports float-intersection counts next to the
/// exact quadruple counts. Float-only; not part of any exact check.
pub fn elekes_sharir_lines(
    points: &[Point2],
) -> Result<(Vec<FloatLine3>, ElekesSharirReport), IncidenceError> {
    let n = points.len();
    let distinct: BTreeSet<&Point2> = points.iter().collect();
    if distinct.len() < n {
        return Err(IncidenceError::DuplicatePoint(format!(
            "{} points, {} distinct",
            n,
            distinct.len()
        )));
    }
    if n < 2 {
        return Err(IncidenceError::TooFewPoints { got: n, need: 2 });
    }
    if n > ES_POINT_CAP {
        return Err(IncidenceError::CapExceeded {
            size: n,
            cap: ES_POINT_CAP,
        });
    }
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|p| {
            (
                p.x.to_f64().expect("rational fits f64"),
                p.y.to_f64().expect("rational fits f64"),
            )
        })
        .collect();
    let mut lines = Vec::with_capacity(n * n);
    for (i, a) in coords.iter().enumerate() {
        for (j, b) in coords.iter().enumerate() {
            if i == j {
                // Rotations fixing the point: a vertical line.
                lines.push(FloatLine3 {
                    base: [a.0, a.1, 0.0],
                    dir: [0.0, 0.0, 1.0],
                });
                continue;
            }
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let dist = (dx * dx + dy * dy).sqrt();
            // Perpendicular bisector direction, unit length.
            let (ux, uy) = (-dy / dist, dx / dist);
            lines.push(FloatLine3 {
                base: [(a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0, 0.0],
                dir: [ux, uy, 1.0 / dist],
            });
        }
    }

    let mut intersecting = 0u64;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            if float_line_distance(&lines[i], &lines[j]) < ES_TOLERANCE {
                intersecting += 1;
            }
        }
    }

    // Exact quadruple counts over the rational inputs.
    let pts: Vec<&Point2> = points.iter().collect();
    let mut q_nondeg = 0u64;
    let mut translations = 0u64;
    for a in &pts {
        for b in &pts {
            if a == b {
                continue;
            }
            let ab = sq_dist(a, b);
            for c in &pts {
                for d in &pts {
                    if c == d {
                        continue;
                    }
                    if ab == sq_dist(c, d) {
                        q_nondeg += 1;
                        if &c.x - &a.x == &d.x - &b.x && &c.y - &a.y == &d.y - &b.y {
                            translations += 1;
                        }
                    }
                }
            }
        }
    }
    let report = ElekesSharirReport {
        n,
        line_count: lines.len(),
        intersecting_pairs: intersecting,
        q_nondegenerate: q_nondeg,
        translation_quadruples: translations,
        non_translation_quadruples: q_nondeg - translations,
        tolerance: ES_TOLERANCE,
    };
    Ok((lines, report))
}

fn sq_dist(a: &Point2, b: &Point2) -> BigRational {
    let dx = &a.x - &b.x;
    let dy = &a.y - &b.y;
    &dx * &dx + &dy * &dy
}

fn float_line_distance(l1: &FloatLine3, l2: &FloatLine3) -> f64 {
    let d1 = l1.dir;
    let d2 = l2.dir;
    let cross = [
        d1[1] * d2[2] - d1[2] * d2[1],
        d1[2] * d2[0] - d1[0] * d2[2],
        d1[0] * d2[1] - d1[1] * d2[0],
    ];
    let w = [
        l2.base[0] - l1.base[0],
        l2.base[1] - l1.base[1],
        l2.base[2] - l1.base[2],
    ];
    let cross_norm = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    if cross_norm < 1e-12 {
        // Parallel: point-to-line distance.
        let c = [
            w[1] * d1[2] - w[2] * d1[1],
            w[2] * d1[0] - w[0] * d1[2],
            w[0] * d1[1] - w[1] * d1[0],
        ];
        let num = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        let den = (d1[0] * d1[0] + d1[1] * d1[1] + d1[2] * d1[2]).sqrt();
        return num / den;
    }
    (w[0] * cross[0] + w[1] * cross[1] + w[2] * cross[2]).abs() / cross_norm
}

// Projective plane over F_p. The affine chart is Z = 1: a plane point
// (x, y) embeds as (x : y : 1) and the points with Z = 0 form the
// line at infinity.

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn mod_pow(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut out: u128 = 1;
    let mut b = base as u128 % p as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            out = out * b % p as u128;
        }
        b = b * b % p as u128;
        exp >>= 1;
    }
    out as u64
}

fn mod_inv(x: u64, p: u64) -> u64 {
    mod_pow(x % p, p - 2, p)
}

/// A point of the projective plane over F_p, stored as the canonical
/// homogeneous triple whose first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjPoint {
    p: u64,
    coords: [u64; 3],
}

impl ProjPoint {
    pub fn new(p: u64, coords: [u64; 3]) -> Result<ProjPoint, IncidenceError> {
        if !is_prime(p) {
            return Err(IncidenceError::NotPrime(p));
        }
        let reduced = [coords[0] % p, coords[1] % p, coords[2] % p];
        let pivot = reduced
            .iter()
            .find(|c| **c != 0)
            .copied()
            .ok_or(IncidenceError::ZeroDirection)?;
        let inv = mod_inv(pivot, p);
        Ok(ProjPoint {
            p,
            coords: [
                (reduced[0] as u128 * inv as u128 % p as u128) as u64,
                (reduced[1] as u128 * inv as u128 % p as u128) as u64,
                (reduced[2] as u128 * inv as u128 % p as u128) as u64,
            ],
        })
    }

    pub fn coords(&self) -> [u64; 3] {
        self.coords
    }

    pub fn is_infinity(&self) -> bool {
        self.coords[2] == 0
    }

    /// The affine coordinates when the point is not at infinity.
    pub fn to_affine(&self) -> Option<(u64, u64)> {
        if self.is_infinity() {
            return None;
        }
        let inv = mod_inv(self.coords[2], self.p);
        Some((
            (self.coords[0] as u128 * inv as u128 % self.p as u128) as u64,
            (self.coords[1] as u128 * inv as u128 % self.p as u128) as u64,
        ))
    }

    /// Every projective point over F_p, canonical representatives.
    pub fn all(p: u64) -> Result<Vec<ProjPoint>, IncidenceError> {
        if !is_prime(p) {
            return Err(IncidenceError::NotPrime(p));
        }
        let mut out = BTreeSet::new();
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    if x == 0 && y == 0 && z == 0 {
                        continue;
                    }
                    out.insert(ProjPoint::new(p, [x, y, z])?);
                }
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// Embeds an affine point of F_p^2 as (x : y : 1).
pub fn embed(p: u64, x: u64, y: u64) -> Result<ProjPoint, IncidenceError> {
    ProjPoint::new(p, [x, y, 1])
}

/// A projective line a*X + b*Y + c*Z = 0 over F_p, canonicalized the
/// same way as points (the coefficient triple up to scalars).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FpLine {
    p: u64,
    coeffs: [u64; 3],
}

impl FpLine {
    /// A projective line from its coefficient triple.
    pub fn projective(p: u64, coeffs: [u64; 3]) -> Result<FpLine, IncidenceError> {
        let point = ProjPoint::new(p, coeffs)?;
        Ok(FpLine {
            p,
            coeffs: point.coords,
        })
    }

    /// The projective closure of the affine line a*X + b*Y + c = 0,
    /// which needs (a, b) != (0, 0).
    pub fn affine(p: u64, a: u64, b: u64, c: u64) -> Result<FpLine, IncidenceError> {
        if a % p == 0 && b % p == 0 {
            return Err(IncidenceError::BadLine);
        }
        FpLine::projective(p, [a, b, c])
    }

    pub fn coeffs(&self) -> [u64; 3] {
        self.coeffs
    }

    pub fn contains(&self, point: &ProjPoint) -> bool {
        let q = self.p as u128;
        let s = self.coeffs[0] as u128 * point.coords[0] as u128
            + self.coeffs[1] as u128 * point.coords[1] as u128
            + self.coeffs[2] as u128 * point.coords[2] as u128;
        s % q == 0
    }

    /// Every projective line over F_p (dual canonical triples).
    pub fn all(p: u64) -> Result<Vec<FpLine>, IncidenceError> {
        Ok(ProjPoint::all(p)?
            .into_iter()
            .map(|pt| FpLine {
                p,
                coeffs: pt.coords,
            })
            .collect())
    }
}

/// The point at infinity of an affine line: direction (-b : a : 0).
/// Parallel lines share it.
pub fn infinity_of(line: &FpLine) -> Result<ProjPoint, IncidenceError> {
    let [a, b, _] = line.coeffs;
    let p = line.p;
    if a == 0 && b == 0 {
        return Err(IncidenceError::BadLine);
    }
    ProjPoint::new(p, [(p - b) % p, a, 0])
}

/// An invertible projective transformation of the plane over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjMap {
    p: u64,
    m: [[u64; 3]; 3],
}

fn det3(p: u64, m: &[[u64; 3]; 3]) -> u64 {
    let q = p as u128;
    let term = |a: u64, b: u64, c: u64| a as u128 * b as u128 % q * c as u128 % q;
    let pos = (term(m[0][0], m[1][1], m[2][2])
        + term(m[0][1], m[1][2], m[2][0])
        + term(m[0][2], m[1][0], m[2][1]))
        % q;
    let neg = (term(m[0][2], m[1][1], m[2][0])
        + term(m[0][0], m[1][2], m[2][1])
        + term(m[0][1], m[1][0], m[2][2]))
        % q;
    ((pos + q - neg) % q) as u64
}

impl ProjMap {
    pub fn new(p: u64, m: [[u64; 3]; 3]) -> Result<ProjMap, IncidenceError> {
        if !is_prime(p) {
            return Err(IncidenceError::NotPrime(p));
        }
        let mut reduced = m;
        for row in &mut reduced {
            for entry in row.iter_mut() {
                *entry %= p;
            }
        }
        if det3(p, &reduced) == 0 {
            return Err(IncidenceError::SingularMatrix);
        }
        Ok(ProjMap { p, m: reduced })
    }

    pub fn identity(p: u64) -> Result<ProjMap, IncidenceError> {
        ProjMap::new(p, [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    }

    pub fn matrix(&self) -> [[u64; 3]; 3] {
        self.m
    }

    pub fn apply(&self, point: &ProjPoint) -> ProjPoint {
        let q = self.p as u128;
        let mut out = [0u64; 3];
        for (i, row) in self.m.iter().enumerate() {
            let mut acc: u128 = 0;
            for (j, entry) in row.iter().enumerate() {
                acc += *entry as u128 * point.coords[j] as u128 % q;
            }
            out[i] = (acc % q) as u64;
        }
        ProjPoint::new(self.p, out).expect("invertible maps preserve nonzero vectors")
    }

    /// The induced action on lines: coefficients transform by the
    /// inverse transpose, so incidence is preserved.
    pub fn apply_line(&self, line: &FpLine) -> FpLine {
        let inv = self.inverse();
        let q = self.p as u128;
        let mut out = [0u64; 3];
        // Row vector times inverse matrix: (coeffs * M^{-1}).
        for j in 0..3 {
            let mut acc: u128 = 0;
            for i in 0..3 {
                acc += line.coeffs[i] as u128 * inv.m[i][j] as u128 % q;
            }
            out[j] = (acc % q) as u64;
        }
        FpLine::projective(self.p, out).expect("inverse transpose of invertible is invertible")
    }

    /// Matrix inverse via the adjugate.
    pub fn inverse(&self) -> ProjMap {
        let p = self.p;
        let q = p as u128;
        let m = &self.m;
        let det = det3(p, m);
        let det_inv = mod_inv(det, p) as u128;
        let minor = |r0: usize, c0: usize, r1: usize, c1: usize| -> u128 {
            let a = m[r0][c0] as u128 * m[r1][c1] as u128 % q;
            let b = m[r0][c1] as u128 * m[r1][c0] as u128 % q;
            (a + q - b) % q
        };
        // Adjugate entries: cofactor matrix transposed.
        let mut adj = [[0u128; 3]; 3];
        adj[0][0] = minor(1, 1, 2, 2);
        adj[0][1] = (q - minor(0, 1, 2, 2) % q) % q;
        adj[0][2] = minor(0, 1, 1, 2);
        adj[1][0] = (q - minor(1, 0, 2, 2) % q) % q;
        adj[1][1] = minor(0, 0, 2, 2);
        adj[1][2] = (q - minor(0, 0, 1, 2) % q) % q;
        adj[2][0] = minor(1, 0, 2, 1);
        adj[2][1] = (q - minor(0, 0, 2, 1) % q) % q;
        adj[2][2] = minor(0, 0, 1, 1);
        let mut out = [[0u64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (adj[i][j] * det_inv % q) as u64;
            }
        }
        ProjMap { p, m: out }
    }
}

/// Builds an invertible map sending the first affine point to the
/// infinity point (1 : 0 : 0) and the second to (0 : 1 : 0). In the
/// image's affine chart, lines through the first point become
/// horizontal and lines through the second become vertical.
pub fn send_to_infinity(
    p: u64,
    p0: (u64, u64),
    p1: (u64, u64),
) -> Result<ProjMap, IncidenceError> {
    let e0 = embed(p, p0.0, p0.1)?;
    let e1 = embed(p, p1.0, p1.1)?;
    if e0 == e1 {
        return Err(IncidenceError::EqualPoints);
    }
    // Extend {e0, e1} to a basis with a standard vector, then invert
    // the basis matrix so e0, e1 land on the first two basis vectors.
    for extra in [[1, 0, 0], [0, 1, 0], [0, 0, 1]] {
        let cols = [e0.coords, e1.coords, extra];
        let candidate = [
            [cols[0][0], cols[1][0], cols[2][0]],
            [cols[0][1], cols[1][1], cols[2][1]],
            [cols[0][2], cols[1][2], cols[2][2]],
        ];
        if det3(p, &candidate) != 0 {
            let basis = ProjMap { p, m: candidate };
            return Ok(basis.inverse());
        }
    }
    unreachable!("two independent vectors always extend by a standard basis vector")
}

/// Parses a JSON array of [x, y] pairs where each coordinate is an
/// integer or a rational string like "3/2".
pub fn points_from_json(value: &serde_json::Value) -> Result<Vec<Point2>, IncidenceError> {
    let rows = value
        .as_array()
        .ok_or_else(|| IncidenceError::BadJson("expected an array of points".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let pair = row
            .as_array()
            .filter(|r| r.len() == 2)
            .ok_or_else(|| IncidenceError::BadJson(format!("expected [x, y], got {row}")))?;
        out.push(Point2::new(
            rational_from_json(&pair[0])?,
            rational_from_json(&pair[1])?,
        ));
    }
    Ok(out)
}

pub fn points_to_json(points: &[Point2]) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = points
        .iter()
        .map(|p| serde_json::json!([p.x.to_string(), p.y.to_string()]))
        .collect();
    serde_json::Value::Array(rows)
}

/// Parses a JSON array of [a, b, c] coefficient triples.
pub fn lines_from_json(value: &serde_json::Value) -> Result<Vec<Line2>, IncidenceError> {
    let rows = value
        .as_array()
        .ok_or_else(|| IncidenceError::BadJson("expected an array of lines".into()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let triple = row
            .as_array()
            .filter(|r| r.len() == 3)
            .ok_or_else(|| IncidenceError::BadJson(format!("expected [a, b, c], got {row}")))?;
        out.push(Line2::new(
            rational_from_json(&triple[0])?,
            rational_from_json(&triple[1])?,
            rational_from_json(&triple[2])?,
        )?);
    }
    Ok(out)
}

fn rational_from_json(value: &serde_json::Value) -> Result<BigRational, IncidenceError> {
    match value {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(|v| BigRational::from_integer(BigInt::from(v)))
            .ok_or_else(|| IncidenceError::BadJson(format!("non-integer number {n}"))),
        serde_json::Value::String(s) => BigRational::from_str(s)
            .map_err(|_| IncidenceError::BadJson(format!("bad rational {s:?}"))),
        other => Err(IncidenceError::BadJson(format!("bad coordinate {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn line_construction_and_membership() {
        let l = Line2::through(&Point2::from_ints(0, 0), &Point2::from_ints(1, 1)).unwrap();
        assert!(l.contains(&Point2::from_ints(5, 5)));
        assert!(!l.contains(&Point2::from_ints(5, 6)));

        let vertical =
            Line2::through(&Point2::from_ints(2, 0), &Point2::from_ints(2, 5)).unwrap();
        assert!(vertical.contains(&Point2::from_ints(2, -7)));
        let (a, b, _) = vertical.coefficients();
        assert!(a.is_one() && b.is_zero());

        assert_eq!(
            Line2::through(&Point2::from_ints(1, 1), &Point2::from_ints(1, 1)),
            Err(IncidenceError::EqualPoints)
        );
        assert_eq!(
            Line2::new(BigRational::zero(), BigRational::zero(), rat(1, 1)),
            Err(IncidenceError::BadLine)
        );

        // The same line from different point pairs normalizes equal.
        let l2 = Line2::through(&Point2::from_ints(3, 3), &Point2::from_ints(-2, -2)).unwrap();
        assert_eq!(l, l2);
    }

    #[test]
    fn incidence_count_basics() {
        let p = Point2::from_ints(1, 1);
        let on = Line2::through(&Point2::from_ints(0, 0), &Point2::from_ints(2, 2)).unwrap();
        assert_eq!(count_incidences(&[p.clone()], &[on.clone()]), 1);

        let off = Line2::through(&Point2::from_ints(0, 1), &Point2::from_ints(1, 3)).unwrap();
        assert_eq!(count_incidences(&[Point2::from_ints(5, 0)], &[off]), 0);

        // Duplicates collapse before counting.
        assert_eq!(count_incidences(&[p.clone(), p], &[on.clone(), on]), 1);
    }

    #[test]
    fn st_grid_hits_fourth_power() {
        for m in [2u64, 3, 4] {
            let (points, lines) = st_grid(m);
            assert_eq!(points.len() as u64, 2 * m * m * m);
            assert_eq!(lines.len() as u64, m * m * m);
            assert_eq!(count_incidences(&points, &lines), m.pow(4));
        }
    }

    #[test]
    fn rich_lines_on_the_small_grid() {
        let grid = integer_grid(3);
        let rich = rich_lines(&grid, 3).unwrap();
        assert_eq!(rich.len(), 8);

        let collinear: Vec<Point2> = (0..5).map(|i| Point2::from_ints(i, 2 * i)).collect();
        assert_eq!(rich_lines(&collinear, 5).unwrap().len(), 1);

        let triangle = vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(1, 0),
            Point2::from_ints(0, 1),
        ];
        assert_eq!(rich_lines(&triangle, 3).unwrap().len(), 0);
        assert_eq!(rich_lines(&triangle, 2).unwrap().len(), 3);

        assert_eq!(rich_lines(&grid, 1), Err(IncidenceError::BadThreshold(1)));
    }

    #[test]
    fn beck_statistics() {
        let collinear: Vec<Point2> = (0..6).map(|i| Point2::from_ints(i, i)).collect();
        let stats = beck_stats(&collinear).unwrap();
        assert_eq!(stats.lines_spanned, 1);
        assert_eq!(stats.max_collinear, 6);

        let stats = beck_stats(&integer_grid(3)).unwrap();
        assert_eq!(stats.lines_spanned, 20);
        assert_eq!(stats.max_collinear, 3);

        let general = vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(1, 0),
            Point2::from_ints(0, 1),
            Point2::from_ints(2, 3),
        ];
        let stats = beck_stats(&general).unwrap();
        assert_eq!(stats.lines_spanned, 6);
        assert_eq!(stats.max_collinear, 2);

        assert!(matches!(
            beck_stats(&[Point2::from_ints(0, 0)]),
            Err(IncidenceError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn grid_joints_are_all_grid_points() {
        for n in [2u64, 3] {
            let lines = joints_grid(n);
            assert_eq!(lines.len() as u64, 3 * n * n);
            let joints = count_joints(&lines).unwrap();
            assert_eq!(joints, n.pow(3));
            // |L|^{3/2} stays above the joint count.
            let l = lines.len() as f64;
            assert!(l.powf(1.5) >= joints as f64);
        }
    }

    #[test]
    fn degenerate_joint_families() {
        let single = vec![Line3::new(
            Point3::from_ints(0, 0, 0),
            Point3::from_ints(1, 2, 3),
        )
        .unwrap()];
        assert_eq!(count_joints(&single).unwrap(), 0);

        // Three concurrent coplanar lines: no independent triple.
        let coplanar = vec![
            Line3::new(Point3::from_ints(0, 0, 0), Point3::from_ints(1, 0, 0)).unwrap(),
            Line3::new(Point3::from_ints(0, 0, 0), Point3::from_ints(0, 1, 0)).unwrap(),
            Line3::new(Point3::from_ints(0, 0, 0), Point3::from_ints(1, 1, 0)).unwrap(),
        ];
        assert_eq!(count_joints(&coplanar).unwrap(), 0);

        // Adding an out-of-plane line through the origin makes it a joint.
        let mut star = coplanar;
        star.push(Line3::new(Point3::from_ints(0, 0, 0), Point3::from_ints(0, 0, 1)).unwrap());
        assert_eq!(count_joints(&star).unwrap(), 1);
    }

    #[test]
    fn line3_intersection_cases() {
        let l1 = Line3::new(Point3::from_ints(0, 0, 0), Point3::from_ints(1, 0, 0)).unwrap();
        let crossing =
            Line3::new(Point3::from_ints(2, -1, 0), Point3::from_ints(0, 1, 0)).unwrap();
        assert_eq!(
            line_intersection(&l1, &crossing),
            Some(Point3::from_ints(2, 0, 0))
        );

        let parallel = Line3::new(Point3::from_ints(0, 1, 0), Point3::from_ints(1, 0, 0)).unwrap();
        assert_eq!(line_intersection(&l1, &parallel), None);

        let skew = Line3::new(Point3::from_ints(0, 1, 1), Point3::from_ints(0, 1, 0)).unwrap();
        assert_eq!(line_intersection(&l1, &skew), None);

        // Scaled directions normalize to the same line representation.
        let same = Line3::new(Point3::from_ints(5, 0, 0), Point3::from_ints(3, 0, 0)).unwrap();
        assert_eq!(line_intersection(&l1, &same), None);
        assert!(same.contains(&Point3::from_ints(-4, 0, 0)));
    }

    #[test]
    fn unit_square_distances() {
        let square = vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(1, 0),
            Point2::from_ints(1, 1),
            Point2::from_ints(0, 1),
        ];
        let stats = distance_stats(&square).unwrap();
        assert_eq!(stats.distinct_sq_distances, 2);
        assert_eq!(stats.q_full, 96);
        assert_eq!(stats.q_nondegenerate, 80);
        assert_eq!(stats.unit_pairs, 8);
        assert_eq!(stats.lower_bound_full, rat(256, 96));
        assert_eq!(stats.lower_bound_pairs, rat(144, 80));
    }

    #[test]
    fn two_point_and_collinear_distances() {
        let pair = vec![Point2::from_ints(0, 0), Point2::from_ints(3, 4)];
        let stats = distance_stats(&pair).unwrap();
        assert_eq!(stats.q_nondegenerate, 4);
        assert_eq!(stats.q_full, 8);
        assert_eq!(stats.distinct_sq_distances, 1);
        // Equality case of the pair bound: 1 >= (4 - 2)^2 / 4.
        assert_eq!(stats.lower_bound_pairs, rat(1, 1));

        let ap = vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(1, 0),
            Point2::from_ints(2, 0),
        ];
        let stats = distance_stats(&ap).unwrap();
        assert_eq!(stats.distinct_sq_distances, 2);
        assert_eq!(stats.unit_pairs, 4);
    }

    #[test]
    fn rigid_motion_lines_for_two_points() {
        let pair = vec![Point2::from_ints(0, 0), Point2::from_ints(2, 0)];
        let (lines, report) = elekes_sharir_lines(&pair).unwrap();
        assert_eq!(lines.len(), 4);
        assert_eq!(report.line_count, 4);
        // The two motions fixing a point are vertical lines.
        let verticals = lines
            .iter()
            .filter(|l| l.dir == [0.0, 0.0, 1.0])
            .count();
        assert_eq!(verticals, 2);
        // (a,b,b,a) and (b,a,a,b) are the swaps; (a,b,a,b) and
        // (b,a,b,a) are translations.
        assert_eq!(report.q_nondegenerate, 4);
        assert_eq!(report.translation_quadruples, 2);
        assert_eq!(report.non_translation_quadruples, 2);

        let dup = vec![Point2::from_ints(0, 0), Point2::from_ints(0, 0)];
        assert!(matches!(
            elekes_sharir_lines(&dup),
            Err(IncidenceError::DuplicatePoint(_))
        ));
    }

    #[test]
    fn isosceles_pair_intersects_within_tolerance() {
        // Rotation around the apex (1, 2) maps (0,0) to (2,0); the
        // motion lies on both corresponding lines.
        let points = vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(2, 0),
            Point2::from_ints(1, 2),
        ];
        let (_, report) = elekes_sharir_lines(&points).unwrap();
        assert!(report.intersecting_pairs >= 1);
        assert!(report.non_translation_quadruples >= 2);
        assert_eq!(report.tolerance, ES_TOLERANCE);
    }

    #[test]
    fn projective_embedding_and_infinity() {
        let origin = embed(3, 0, 0).unwrap();
        assert_eq!(origin.coords(), [0, 0, 1]);
        assert!(!origin.is_infinity());
        assert_eq!(origin.to_affine(), Some((0, 0)));

        // y = x and y = x + 1 over F_3: coefficients (1, -1, 0) and
        // (1, -1, 1); parallel lines share the infinity point.
        let l1 = FpLine::affine(3, 1, 2, 0).unwrap();
        let l2 = FpLine::affine(3, 1, 2, 1).unwrap();
        let i1 = infinity_of(&l1).unwrap();
        let i2 = infinity_of(&l2).unwrap();
        assert_eq!(i1, i2);
        assert_eq!(i1.coords(), [1, 1, 0]);
        assert!(i1.is_infinity());
        assert!(l1.contains(&i1) && l2.contains(&i1));

        // Scalar multiples canonicalize to the same point.
        assert_eq!(
            ProjPoint::new(5, [2, 4, 0]).unwrap(),
            ProjPoint::new(5, [1, 2, 0]).unwrap()
        );
        assert!(ProjPoint::new(5, [0, 0, 0]).is_err());
        assert!(ProjPoint::new(4, [1, 0, 0]).is_err());
    }

    #[test]
    fn projective_maps_act_and_invert() {
        let id = ProjMap::identity(5).unwrap();
        let x = ProjPoint::new(5, [2, 3, 1]).unwrap();
        assert_eq!(id.apply(&x), x);

        let m = ProjMap::new(5, [[1, 1, 0], [0, 1, 2], [2, 0, 3]]).unwrap();
        let inv = m.inverse();
        assert_eq!(inv.apply(&m.apply(&x)), x);

        assert_eq!(
            ProjMap::new(5, [[1, 2, 3], [2, 4, 6], [0, 0, 1]]),
            Err(IncidenceError::SingularMatrix)
        );
    }

    #[test]
    fn incidence_preserved_across_pg23() {
        let points = ProjPoint::all(3).unwrap();
        let lines = FpLine::all(3).unwrap();
        assert_eq!(points.len(), 13);
        assert_eq!(lines.len(), 13);
        let m = ProjMap::new(3, [[1, 1, 0], [0, 1, 2], [2, 0, 1]]).unwrap();
        let mut incidences = 0;
        for line in &lines {
            let image_line = m.apply_line(line);
            for point in &points {
                let before = line.contains(point);
                let after = image_line.contains(&m.apply(point));
                assert_eq!(before, after);
                if before {
                    incidences += 1;
                }
            }
        }
        // Every line of PG(2,3) carries q + 1 = 4 points.
        assert_eq!(incidences, 13 * 4);
    }

    #[test]
    fn sending_two_points_to_infinity_straightens_pencils() {
        let p = 5u64;
        let p0 = (1u64, 2u64);
        let p1 = (3u64, 4u64);
        let m = send_to_infinity(p, p0, p1).unwrap();
        assert_eq!(m.apply(&embed(p, p0.0, p0.1).unwrap()).coords(), [1, 0, 0]);
        assert_eq!(m.apply(&embed(p, p1.0, p1.1).unwrap()).coords(), [0, 1, 0]);

        // A line through p0 maps to a horizontal line: all affine
        // image points share their Y coordinate.
        for other in [(0u64, 0u64), (2, 1), (4, 4)] {
            if other == p0 || other == p1 {
                continue;
            }
            let through0: Vec<(u64, u64)> = line_points_through(p, p0, other);
            let mut ys = BTreeSet::new();
            for pt in &through0 {
                if let Some((_, y)) = m.apply(&embed(p, pt.0, pt.1).unwrap()).to_affine() {
                    ys.insert(y);
                }
            }
            assert!(ys.len() <= 1, "pencil through p0 not horizontal: {ys:?}");
        }
        let through1 = line_points_through(p, p1, (0, 0));
        let mut xs = BTreeSet::new();
        for pt in &through1 {
            if let Some((x, _)) = m.apply(&embed(p, pt.0, pt.1).unwrap()).to_affine() {
                xs.insert(x);
            }
        }
        assert!(xs.len() <= 1, "pencil through p1 not vertical: {xs:?}");

        assert_eq!(
            send_to_infinity(5, (1, 1), (1, 1)),
            Err(IncidenceError::EqualPoints)
        );
    }

    fn line_points_through(p: u64, a: (u64, u64), b: (u64, u64)) -> Vec<(u64, u64)> {
        // Affine points a + t (b - a) mod p.
        let dx = (b.0 + p - a.0) % p;
        let dy = (b.1 + p - a.1) % p;
        (0..p)
            .map(|t| ((a.0 + t * dx) % p, (a.1 + t * dy) % p))
            .collect()
    }

    #[test]
    fn json_points_and_lines() {
        let doc = serde_json::json!([["3/2", "1"], [2, -3]]);
        let points = points_from_json(&doc).unwrap();
        assert_eq!(points[0].x, rat(3, 2));
        assert_eq!(points[1].y, rat(-3, 1));
        let round = points_from_json(&points_to_json(&points)).unwrap();
        assert_eq!(round, points);

        let lines = lines_from_json(&serde_json::json!([[1, -1, 0]])).unwrap();
        assert!(lines[0].contains(&Point2::from_ints(4, 4)));

        assert!(points_from_json(&serde_json::json!([["x", 1]])).is_err());
        assert!(points_from_json(&serde_json::json!([[1, 2, 3]])).is_err());
        assert!(lines_from_json(&serde_json::json!([[0, 0, 1]])).is_err());
    }

    #[test]
    fn cs_bound_edge_cases() {
        assert!(cs_bound_holds(16, 16, 8));
        assert!(cs_bound_holds(2 * 7, 0, 7));
        assert!(!cs_bound_holds(1000, 3, 4));
    }

    proptest! {
        #[test]
        fn distance_bounds_hold_for_random_rational_sets(
            raw in proptest::collection::btree_set((-12i64..12, -12i64..12, 1i64..5), 2..7),
        ) {
            let points: Vec<Point2> = raw
                .into_iter()
                .map(|(x, y, d)| Point2::new(rat(x, d), rat(y, d)))
                .collect();
            let distinct: BTreeSet<&Point2> = points.iter().collect();
            prop_assume!(distinct.len() >= 2);
            // Both exact quadruple bounds are asserted inside.
            let stats = distance_stats(&points).unwrap();
            prop_assert!(stats.q_full >= stats.q_nondegenerate);
        }

        #[test]
        fn random_instances_respect_the_counting_bounds(
            xs in proptest::collection::btree_set((-8i64..8, -8i64..8), 2..10),
            picks in proptest::collection::vec((0usize..9, 0usize..9), 1..12),
        ) {
            let points: Vec<Point2> = xs.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect();
            let mut lines = Vec::new();
            for (i, j) in picks {
                let (i, j) = (i % points.len(), j % points.len());
                if points[i] != points[j] {
                    lines.push(Line2::through(&points[i], &points[j]).unwrap());
                }
            }
            prop_assume!(!lines.is_empty());
            // The constant-2 bounds are asserted inside the counter.
            let _ = count_incidences(&points, &lines);
        }
    }
}
