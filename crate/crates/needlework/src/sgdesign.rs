//! Dependent-triple configuration analysis and the design-matrix
//! rank pipeline: checking how densely a point set covers itself
//! with special lines, finding ordinary lines, balanced triple
//! systems, sparse dependency matrices with measured support
//! parameters, and exact rank bounds.

use std::collections::{BTreeMap, BTreeSet};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::field::Field;
use crate::incidence::{self, Line2, Point2};
use crate::linalg;

/// Largest point count accepted by configuration analysis.
pub const CONFIG_CAP: usize = 256;

/// Largest matrix side accepted by exact rank computations.
pub const RANK_CAP: usize = 2048;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SgError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("vector {0} is zero")]
    ZeroVector(usize),
    #[error("vectors {0} and {1} are scalar multiples")]
    ProportionalPair(usize, usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("vector {index} has {got} coordinates, expected {want}")]
    DimensionMismatch { index: usize, got: usize, want: usize },
    #[error("configuration of size {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("need at least {need} points, got {got}")]
    TooFew { got: usize, need: usize },
    #[error("point {0} lies in no dependent triple")]
    NotSg(usize),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("design matrix invariant broken: {0}")]
    BadDesign(String),
    #[error("bad configuration file: {0}")]
    BadJson(String),
    #[error(transparent)]
    Incidence(#[from] incidence::IncidenceError),
}

/// A point configuration: affine rational points, or nonzero
/// pairwise-independent vectors over a prime field. Finite-mode
/// properness (no zero vector, no proportional pair) and rational
/// distinctness are enforced at construction.
#[derive(Clone, Debug, PartialEq)]
pub enum Configuration {
    Rational { points: Vec<Vec<BigRational>> },
    Finite { p: u64, vectors: Vec<Vec<u64>> },
}

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

impl Configuration {
    pub fn rational(points: Vec<Vec<BigRational>>) -> Result<Configuration, SgError> {
        if points.len() > CONFIG_CAP {
            return Err(SgError::CapExceeded {
                size: points.len(),
                cap: CONFIG_CAP,
            });
        }
        let dim = points.first().map_or(0, |p| p.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(SgError::DimensionMismatch {
                    index: i,
                    got: p.len(),
                    want: dim,
                });
            }
            for (j, q) in points.iter().enumerate().take(i) {
                if p == q {
                    return Err(SgError::DuplicatePoint(j, i));
                }
            }
        }
        Ok(Configuration::Rational { points })
    }

    pub fn finite(p: u64, vectors: Vec<Vec<u64>>) -> Result<Configuration, SgError> {
        if !is_prime(p) {
            return Err(SgError::NotPrime(p));
        }
        if vectors.len() > CONFIG_CAP {
            return Err(SgError::CapExceeded {
                size: vectors.len(),
                cap: CONFIG_CAP,
            });
        }
        let dim = vectors.first().map_or(0, |v| v.len());
        let vectors: Vec<Vec<u64>> = vectors
            .into_iter()
            .map(|v| v.into_iter().map(|x| x % p).collect())
            .collect();
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(SgError::DimensionMismatch {
                    index: i,
                    got: v.len(),
                    want: dim,
                });
            }
            if v.iter().all(|&x| x == 0) {
                return Err(SgError::ZeroVector(i));
            }
            for (j, w) in vectors.iter().enumerate().take(i) {
                if proportional_mod_p(p, v, w) {
                    return Err(SgError::ProportionalPair(j, i));
                }
            }
        }
        Ok(Configuration::Finite { p, vectors })
    }

    pub fn len(&self) -> usize {
        match self {
            Configuration::Rational { points } => points.len(),
            Configuration::Finite { vectors, .. } => vectors.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            Configuration::Rational { points } => points.first().map_or(0, |p| p.len()),
            Configuration::Finite { vectors, .. } => vectors.first().map_or(0, |v| v.len()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Configuration::Rational { points } => serde_json::json!({
                "field": "rational",
                "points": points
                    .iter()
                    .map(|p| p.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            }),
            Configuration::Finite { p, vectors } => serde_json::json!({
                "field": format!("mod/{p}"),
                "vectors": vectors,
            }),
        }
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Configuration, SgError> {
        let field = value
            .get("field")
            .and_then(|f| f.as_str())
            .ok_or_else(|| SgError::BadJson("missing field tag".into()))?;
        if field == "rational" {
            let rows = value
                .get("points")
                .and_then(|p| p.as_array())
                .ok_or_else(|| SgError::BadJson("missing points array".into()))?;
            let mut points = Vec::with_capacity(rows.len());
            for row in rows {
                let coords = row
                    .as_array()
                    .ok_or_else(|| SgError::BadJson(format!("bad point {row}")))?;
                let mut point = Vec::with_capacity(coords.len());
                for c in coords {
                    point.push(json_rational(c)?);
                }
                points.push(point);
            }
            return Configuration::rational(points);
        }
        if let Some(p) = field.strip_prefix("mod/") {
            let p: u64 = p
                .parse()
                .map_err(|_| SgError::BadJson(format!("bad modulus in {field:?}")))?;
            let rows = value
                .get("vectors")
                .and_then(|v| v.as_array())
                .ok_or_else(|| SgError::BadJson("missing vectors array".into()))?;
            let mut vectors = Vec::with_capacity(rows.len());
            for row in rows {
                let coords = row
                    .as_array()
                    .ok_or_else(|| SgError::BadJson(format!("bad vector {row}")))?;
                let mut vector = Vec::with_capacity(coords.len());
                for c in coords {
                    vector.push(
                        c.as_u64()
                            .ok_or_else(|| SgError::BadJson(format!("bad coordinate {c}")))?,
                    );
                }
                vectors.push(vector);
            }
            return Configuration::finite(p, vectors);
        }
        Err(SgError::BadJson(format!("unknown field tag {field:?}")))
    }
}

fn json_rational(value: &serde_json::Value) -> Result<BigRational, SgError> {
    match value {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(|v| BigRational::from_integer(BigInt::from(v)))
            .ok_or_else(|| SgError::BadJson(format!("non-integer number {n}"))),
        serde_json::Value::String(s) => s
            .parse()
            .map_err(|_| SgError::BadJson(format!("bad rational {s:?}"))),
        other => Err(SgError::BadJson(format!("bad coordinate {other}"))),
    }
}

fn proportional_mod_p(p: u64, v: &[u64], w: &[u64]) -> bool {
    // v and w nonzero: proportional iff all 2x2 minors vanish mod p.
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let a = v[i] as u128 * w[j] as u128 % p as u128;
            let b = v[j] as u128 * w[i] as u128 % p as u128;
            if a != b {
                return false;
            }
        }
    }
    true
}

/// Per-point coverage by special lines: how many configuration
/// points (the point itself included) lie on lines through it that
/// carry a third point.
#[derive(Clone, Debug, PartialEq)]
pub struct SgReport {
    pub n: usize,
    pub delta: BigRational,
    pub is_sg: bool,
    /// First point whose coverage falls short, when not SG.
    pub witness: Option<usize>,
    pub covered: Vec<usize>,
}

/// Checks the fractional covering condition: every point must see at
/// least delta * n of the points (itself included) on special lines
/// through it. Dependence is exact: rank < 3 for vector triples,
/// collinearity for affine triples.
pub fn check_sg(config: &Configuration, delta: &BigRational) -> Result<SgReport, SgError> {
    let n = config.len();
    if n < 3 {
        return Err(SgError::TooFew { got: n, need: 3 });
    }
    let mut covered = Vec::with_capacity(n);
    for i in 0..n {
        // Group the other points by the line through i they span
        // with i; a group of size >= 2 makes that line special.
        let mut classes: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
        let mut rational_classes: BTreeMap<Vec<BigRational>, usize> = BTreeMap::new();
        for j in 0..n {
            if j == i {
                continue;
            }
            match config {
                Configuration::Finite { p, vectors } => {
                    let key = pencil_key_finite(*p, &vectors[i], &vectors[j]);
                    *classes.entry(key).or_insert(0) += 1;
                }
                Configuration::Rational { points } => {
                    let key = direction_key(&points[i], &points[j]);
                    *rational_classes.entry(key).or_insert(0) += 1;
                }
            }
        }
        let on_special: usize = classes
            .values()
            .chain(rational_classes.values())
            .filter(|&&size| size >= 2)
            .sum();
        // A point with no special line through it covers nothing;
        // otherwise the point itself rides along on its lines.
        covered.push(if on_special > 0 { on_special + 1 } else { 0 });
    }
    let n_rat = BigRational::from_integer(BigInt::from(n as u64));
    let threshold = delta * &n_rat;
    let witness = covered
        .iter()
        .position(|&c| BigRational::from_integer(BigInt::from(c as u64)) < threshold);
    Ok(SgReport {
        n,
        delta: delta.clone(),
        is_sg: witness.is_none(),
        witness,
        covered,
    })
}

/// Canonical key for the 2-dimensional span of two independent
/// vectors: the reduced row echelon form of the 2 x d matrix.
fn pencil_key_finite(p: u64, v: &[u64], w: &[u64]) -> Vec<u64> {
    let field = Field::prime(p).expect("validated at construction");
    let mut rows = vec![
        v.iter().map(|&x| field.from_int(x as i64)).collect::<Vec<_>>(),
        w.iter().map(|&x| field.from_int(x as i64)).collect::<Vec<_>>(),
    ];
    let d = v.len();
    let mut pivot_row = 0;
    for col in 0..d {
        let Some(src) = (pivot_row..2).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].inv();
        for c in 0..d {
            rows[pivot_row][c] = &rows[pivot_row][c] * &inv;
        }
        for r in 0..2 {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..d {
                    let delta = &factor * &rows[pivot_row][c];
                    rows[r][c] = &rows[r][c] - &delta;
                }
            }
        }
        pivot_row += 1;
        if pivot_row == 2 {
            break;
        }
    }
    rows.into_iter()
        .flatten()
        .map(|e| e.residue())
        .collect()
}

/// Canonical key for the affine line through two distinct points:
/// the normalized direction plus the base point projected to pivot
/// coordinate zero.
fn direction_key(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let dir: Vec<BigRational> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let pivot_idx = dir
        .iter()
        .position(|c| !c.is_zero())
        .expect("distinct points have nonzero direction");
    let pivot = dir[pivot_idx].clone();
    let dir: Vec<BigRational> = dir.iter().map(|c| c / &pivot).collect();
    let t = a[pivot_idx].clone();
    let base: Vec<BigRational> = a
        .iter()
        .zip(&dir)
        .map(|(x, d)| x - &t * d)
        .collect();
    dir.into_iter().chain(base).collect()
}

/// All lines through exactly two of the points. When the points are
/// not all collinear at least one such line must exist over the
/// rationals, and that is asserted.
pub fn ordinary_lines(points: &[Point2]) -> Result<Vec<Line2>, SgError> {
    let counted = incidence::line_multiplicities(points)?;
    let distinct: BTreeSet<&Point2> = points.iter().collect();
    let collinear = counted.len() == 1;
    let ordinary: Vec<Line2> = counted
        .into_iter()
        .filter(|(_, on)| *on == 2)
        .map(|(line, _)| line)
        .collect();
    assert!(
        collinear || !ordinary.is_empty(),
        "non-collinear rational points ({}) produced no ordinary line",
        distinct.len()
    );
    Ok(ordinary)
}

/// A family of ordered triples over [r] with balanced membership.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleSystem {
    pub r: usize,
    pub triples: Vec<[usize; 3]>,
    pub min_per_element: usize,
    pub max_per_pair: usize,
}

fn triple_stats(r: usize, triples: &[[usize; 3]]) -> (usize, usize) {
    let mut per_element = vec![0usize; r];
    let mut per_pair: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in triples {
        for &e in t {
            per_element[e] += 1;
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let key = (t[a].min(t[b]), t[a].max(t[b]));
                *per_pair.entry(key).or_insert(0) += 1;
            }
        }
    }
    (
        per_element.into_iter().min().unwrap_or(0),
        per_pair.into_values().max().unwrap_or(0),
    )
}

/// Builds an idempotent Latin square of order r >= 3: row i, column
/// j holds a symbol with L[i][i] = i. Odd orders use (i + j) / 2;
/// even orders extend the odd square below by one symbol along an
/// off-diagonal transversal.
fn idempotent_latin_square(r: usize) -> Vec<Vec<usize>> {
    assert!(r >= 3);
    if r % 2 == 1 {
        let inv2 = (r + 1) / 2;
        return (0..r)
            .map(|i| (0..r).map(|j| (i + j) * inv2 % r).collect())
            .collect();
    }
    // Prolongation: take the odd square of order r - 1, push the
    // entries on the transversal (i, i + 1) out to a new row and
    // column, and put the new symbol r - 1 in their place.
    let n0 = r - 1;
    let inv2 = (n0 + 1) / 2;
    let mut square = vec![vec![0usize; r]; r];
    for i in 0..n0 {
        for j in 0..n0 {
            square[i][j] = (i + j) * inv2 % n0;
        }
    }
    square[n0][n0] = n0;
    for i in 0..n0 {
        let j = (i + 1) % n0;
        let displaced = square[i][j];
        square[i][j] = n0;
        square[i][n0] = displaced;
        square[n0][j] = displaced;
    }
    square
}

/// The balanced triple system used by the design pipeline: all
/// (i, j, L[i][j]) for i != j over an idempotent Latin square L.
/// Guarantees, asserted: r^2 - r triples of pairwise-distinct
/// elements, every element in exactly 3(r - 1) of them, every pair
/// together in at most 6.
pub fn triple_system(r: usize) -> Result<TripleSystem, SgError> {
    if r < 3 {
        return Err(SgError::BadParameter(format!(
            "triple system needs r >= 3, got {r}"
        )));
    }
    let square = idempotent_latin_square(r);
    let mut triples = Vec::with_capacity(r * r - r);
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            let k = square[i][j];
            debug_assert!(k != i && k != j);
            triples.push([i, j, k]);
        }
    }
    assert_eq!(triples.len(), r * r - r);
    let (min_per_element, max_per_pair) = triple_stats(r, &triples);
    assert_eq!(
        min_per_element,
        3 * (r - 1),
        "Latin-square triples must hit every element exactly 3(r-1) times"
    );
    assert!(min_per_element >= 3 * (r - 2));
    assert!(max_per_pair <= 6, "pair cap broken: {max_per_pair}");
    Ok(TripleSystem {
        r,
        triples,
        min_per_element,
        max_per_pair,
    })
}

/// The arithmetic triple family: ordered triples of pairwise
/// distinct residues with a + b + c = 0 mod r. Its guarantees are
/// weaker than the Latin-square system's: the pair cap 6 always
/// holds (the third element of a pair is determined), and for
/// gcd(r, 3) = 1 the family has exactly (r - 1)(r - 2) members, but
/// elements can sit in few triples (none, for r = 4 and element 2),
/// so no per-element floor is asserted here.
pub fn sum_zero_triples(r: usize) -> Result<TripleSystem, SgError> {
    if r < 3 {
        return Err(SgError::BadParameter(format!(
            "triple system needs r >= 3, got {r}"
        )));
    }
    let mut triples = Vec::new();
    for a in 0..r {
        for b in 0..r {
            if b == a {
                continue;
            }
            let c = (2 * r - (a + b) % r) % r;
            if c != a && c != b {
                triples.push([a, b, c]);
            }
        }
    }
    let (min_per_element, max_per_pair) = triple_stats(r, &triples);
    assert!(max_per_pair <= 6, "pair cap broken: {max_per_pair}");
    if r % 3 != 0 {
        assert_eq!(triples.len(), (r - 1) * (r - 2));
    }
    Ok(TripleSystem {
        r,
        triples,
        min_per_element,
        max_per_pair,
    })
}

/// Sparse dependency-coefficient matrix with measured support
/// parameters: every row has at most q nonzeros, every column at
/// least k, and two columns share at most t rows. All three are
/// validated at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignMatrix {
    m: usize,
    n: usize,
    q: usize,
    k: usize,
    t: usize,
    entries: DesignEntries,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DesignEntries {
    Rational(Vec<Vec<(usize, BigRational)>>),
    Finite { p: u64, rows: Vec<Vec<(usize, u64)>> },
}

impl DesignMatrix {
    pub fn new(
        n: usize,
        q: usize,
        k: usize,
        t: usize,
        entries: DesignEntries,
    ) -> Result<DesignMatrix, SgError> {
        let supports: Vec<Vec<usize>> = match &entries {
            DesignEntries::Rational(rows) => rows
                .iter()
                .map(|r| r.iter().filter(|(_, c)| !c.is_zero()).map(|&(j, _)| j).collect())
                .collect(),
            DesignEntries::Finite { p, rows } => rows
                .iter()
                .map(|r| r.iter().filter(|(_, c)| c % p != 0).map(|&(j, _)| j).collect())
                .collect(),
        };
        let m = supports.len();
        let mut column_support = vec![0usize; n];
        let mut pair_support: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for support in &supports {
            if support.iter().any(|&j| j >= n) {
                return Err(SgError::BadDesign("column index out of range".into()));
            }
            if support.len() > q {
                return Err(SgError::BadDesign(format!(
                    "row support {} exceeds q = {q}",
                    support.len()
                )));
            }
            for &j in support {
                column_support[j] += 1;
            }
            for a in 0..support.len() {
                for b in a + 1..support.len() {
                    let key = (support[a].min(support[b]), support[a].max(support[b]));
                    *pair_support.entry(key).or_insert(0) += 1;
                }
            }
        }
        if let Some(&short) = column_support.iter().min() {
            if short < k {
                return Err(SgError::BadDesign(format!(
                    "column support {short} below k = {k}"
                )));
            }
        }
        if let Some((&(a, b), &over)) = pair_support.iter().find(|(_, &c)| c > t) {
            return Err(SgError::BadDesign(format!(
                "columns {a} and {b} share {over} rows, above t = {t}"
            )));
        }
        Ok(DesignMatrix {
            m,
            n,
            q,
            k,
            t,
            entries,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The measured (q, k, t) support parameters.
    pub fn params(&self) -> (usize, usize, usize) {
        (self.q, self.k, self.t)
    }

    pub fn entries(&self) -> &DesignEntries {
        &self.entries
    }

    /// Fraction-exact (or mod-p) rank of the matrix.
    pub fn exact_rank(&self) -> Result<usize, SgError> {
        if self.m > RANK_CAP || self.n > RANK_CAP {
            return Err(SgError::CapExceeded {
                size: self.m.max(self.n),
                cap: RANK_CAP,
            });
        }
        match &self.entries {
            DesignEntries::Rational(rows) => {
                let dense: Vec<Vec<BigRational>> = rows
                    .iter()
                    .map(|r| {
                        let mut row = vec![BigRational::zero(); self.n];
                        for (j, c) in r {
                            row[*j] = c.clone();
                        }
                        row
                    })
                    .collect();
                Ok(linalg::rank_rational(&dense))
            }
            DesignEntries::Finite { p, rows } => {
                let field = Field::prime(*p).map_err(|_| SgError::NotPrime(*p))?;
                let dense: Vec<Vec<crate::field::FieldElement>> = rows
                    .iter()
                    .map(|r| {
                        let mut row = vec![field.zero(); self.n];
                        for (j, c) in r {
                            row[*j] = field.from_int(*c as i64);
                        }
                        row
                    })
                    .collect();
                Ok(linalg::rank(&dense))
            }
        }
    }

    /// The guaranteed rank floor n - (q t n / 2k)^2 at the measured
    /// parameters, clamped at zero.
    pub fn rank_floor(&self) -> BigRational {
        let raw = rank_lower_bound(self.q, self.k, self.t, self.n)
            .expect("validated k >= 1 at construction");
        raw.max(BigRational::zero())
    }
}

/// The design-matrix rank bound n - (q t n / 2k)^2, exact and
/// possibly negative; callers clamp at zero for reporting.
pub fn rank_lower_bound(q: usize, k: usize, t: usize, n: usize) -> Result<BigRational, SgError> {
    if k == 0 {
        return Err(SgError::BadParameter("rank bound needs k > 0".into()));
    }
    let big = |v: usize| BigRational::from_integer(BigInt::from(v as u64));
    let ratio = big(q) * big(t) * big(n) / (big(2) * big(k));
    Ok(big(n) - &ratio * &ratio)
}

/// Builds the sparse dependency matrix of a configuration: for every
/// special line, the balanced triple system over its points emits
/// rows with exactly three nonzero coefficients expressing the exact
/// linear dependency. A V = 0 is verified exactly (V carries the
/// vectors, or the affine coordinates with a homogenizing one), and
/// the support parameters (q, k, t) are measured from the result.
pub fn design_from_config(config: &Configuration) -> Result<DesignMatrix, SgError> {
    let n = config.len();
    if n < 3 {
        return Err(SgError::TooFew { got: n, need: 3 });
    }
    // Special classes: maximal sets of >= 3 points on one line.
    let mut classes: BTreeMap<Vec<u64>, Vec<usize>> = BTreeMap::new();
    let mut rational_classes: BTreeMap<Vec<BigRational>, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            match config {
                Configuration::Finite { p, vectors } => {
                    let key = pencil_key_finite(*p, &vectors[i], &vectors[j]);
                    let members = classes.entry(key).or_default();
                    for idx in [i, j] {
                        if !members.contains(&idx) {
                            members.push(idx);
                        }
                    }
                }
                Configuration::Rational { points } => {
                    let key = direction_key(&points[i], &points[j]);
                    let members = rational_classes.entry(key).or_default();
                    for idx in [i, j] {
                        if !members.contains(&idx) {
                            members.push(idx);
                        }
                    }
                }
            }
        }
    }
    let special: Vec<Vec<usize>> = classes
        .into_values()
        .chain(rational_classes.into_values())
        .filter(|members| members.len() >= 3)
        .collect();
    let mut in_some_class = vec![false; n];
    for class in &special {
        for &i in class {
            in_some_class[i] = true;
        }
    }
    if let Some(lonely) = in_some_class.iter().position(|&c| !c) {
        return Err(SgError::NotSg(lonely));
    }

    let entries = match config {
        Configuration::Rational { points } => {
            let mut rows = Vec::new();
            for class in &special {
                let system = triple_system(class.len())?;
                for [a, b, c] in system.triples {
                    rows.push(affine_dependency(points, class[a], class[b], class[c]));
                }
            }
            // A V = 0 with V = [coordinates | 1].
            for row in &rows {
                let dim = points[0].len();
                for col in 0..=dim {
                    let mut acc = BigRational::zero();
                    for (j, coeff) in row {
                        let v = if col < dim {
                            points[*j][col].clone()
                        } else {
                            BigRational::one()
                        };
                        acc += coeff * &v;
                    }
                    assert!(acc.is_zero(), "dependency row fails A V = 0");
                }
            }
            DesignEntries::Rational(rows)
        }
        Configuration::Finite { p, vectors } => {
            let field = Field::prime(*p).map_err(|_| SgError::NotPrime(*p))?;
            let mut rows = Vec::new();
            for class in &special {
                let system = triple_system(class.len())?;
                for [a, b, c] in system.triples {
                    rows.push(finite_dependency(
                        &field,
                        vectors,
                        class[a],
                        class[b],
                        class[c],
                    ));
                }
            }
            for row in &rows {
                let dim = vectors[0].len();
                for col in 0..dim {
                    let mut acc = field.zero();
                    for (j, coeff) in row {
                        let coeff = field.from_int(*coeff as i64);
                        let value = field.from_int(vectors[*j][col] as i64);
                        acc = &acc + &(&coeff * &value);
                    }
                    assert!(acc.is_zero(), "dependency row fails A V = 0 mod p");
                }
            }
            DesignEntries::Finite { p: *p, rows }
        }
    };

    // Measure the achieved parameters and validate through the
    // constructor.
    let (q, k, t) = measure_params(n, &entries);
    DesignMatrix::new(n, q, k, t, entries)
}

fn measure_params(n: usize, entries: &DesignEntries) -> (usize, usize, usize) {
    let supports: Vec<Vec<usize>> = match entries {
        DesignEntries::Rational(rows) => rows
            .iter()
            .map(|r| r.iter().map(|&(j, _)| j).collect())
            .collect(),
        DesignEntries::Finite { rows, .. } => rows
            .iter()
            .map(|r| r.iter().map(|&(j, _)| j).collect())
            .collect(),
    };
    let q = supports.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut column = vec![0usize; n];
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for s in &supports {
        for &j in s {
            column[j] += 1;
        }
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                *pairs.entry((s[a].min(s[b]), s[a].max(s[b]))).or_insert(0) += 1;
            }
        }
    }
    let k = column.into_iter().min().unwrap_or(0);
    let t = pairs.into_values().max().unwrap_or(0);
    (q, k, t)
}

/// The affine dependency alpha p_a + beta p_b + gamma p_c = 0 with
/// alpha + beta + gamma = 0 for three distinct collinear points:
/// coefficients (1 - t, t, -1) where p_c = p_a + t (p_b - p_a).
fn affine_dependency(
    points: &[Vec<BigRational>],
    a: usize,
    b: usize,
    c: usize,
) -> Vec<(usize, BigRational)> {
    let dir: Vec<BigRational> = points[a]
        .iter()
        .zip(&points[b])
        .map(|(x, y)| y - x)
        .collect();
    let pivot = dir
        .iter()
        .position(|d| !d.is_zero())
        .expect("distinct points");
    let t = (&points[c][pivot] - &points[a][pivot]) / &dir[pivot];
    debug_assert!(!t.is_zero() && !(&t - BigRational::one()).is_zero());
    vec![
        (a, BigRational::one() - &t),
        (b, t),
        (c, -BigRational::one()),
    ]
}

/// The linear dependency lambda v_a + mu v_b - v_c = 0 for three
/// pairwise-independent vectors spanning a 2-space; lambda and mu
/// are nonzero because no two of the vectors are proportional.
fn finite_dependency(
    field: &Field,
    vectors: &[Vec<u64>],
    a: usize,
    b: usize,
    c: usize,
) -> Vec<(usize, u64)> {
    let d = vectors[a].len();
    // Solve [v_a | v_b] x = v_c by elimination on a d x 3 system.
    let mut rows: Vec<[crate::field::FieldElement; 3]> = (0..d)
        .map(|coord| {
            [
                field.from_int(vectors[a][coord] as i64),
                field.from_int(vectors[b][coord] as i64),
                field.from_int(vectors[c][coord] as i64),
            ]
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..2 {
        let src = (pivot_row..rows.len())
            .find(|&r| !rows[r][col].is_zero())
            .expect("independent pair spans the triple");
        rows.swap(pivot_row, src);
        let inv = rows[pivot_row][col].inv();
        for c_idx in 0..3 {
            rows[pivot_row][c_idx] = &rows[pivot_row][c_idx] * &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c_idx in 0..3 {
                    let delta = &factor * &rows[pivot_row][c_idx];
                    rows[r][c_idx] = &rows[r][c_idx] - &delta;
                }
            }
        }
        pivot_row += 1;
    }
    let lambda = rows[0][2].clone();
    let mu = rows[1][2].clone();
    debug_assert!(!lambda.is_zero() && !mu.is_zero());
    let p = field.p();
    vec![
        (a, lambda.residue()),
        (b, mu.residue()),
        (c, p - 1),
    ]
}

/// Rank floor for symmetric rational matrices whose diagonal
/// dominates the off-diagonal entries: n / (1 + n (l / L)^2).
/// The exact rank is computed alongside and the floor is verified
/// against it.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagRankReport {
    pub n: usize,
    pub bound: BigRational,
    pub exact_rank: usize,
}

pub fn diag_rank_bound(
    matrix: &[Vec<BigRational>],
    big_l: &BigRational,
    small_l: &BigRational,
) -> Result<DiagRankReport, SgError> {
    let n = matrix.len();
    if n == 0 || n > RANK_CAP {
        return Err(SgError::CapExceeded { size: n, cap: RANK_CAP });
    }
    if big_l <= small_l || small_l < &BigRational::zero() {
        return Err(SgError::BadParameter(format!(
            "need L > l >= 0, got L = {big_l}, l = {small_l}"
        )));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(SgError::DimensionMismatch {
                index: i,
                got: row.len(),
                want: n,
            });
        }
        for (j, entry) in row.iter().enumerate() {
            if entry != &matrix[j][i] {
                return Err(SgError::BadParameter(format!(
                    "matrix not symmetric at ({i}, {j})"
                )));
            }
            if i == j && &entry.abs() < big_l {
                return Err(SgError::BadParameter(format!(
                    "diagonal entry {entry} below L = {big_l}"
                )));
            }
            if i != j && &entry.abs() > small_l {
                return Err(SgError::BadParameter(format!(
                    "off-diagonal entry {entry} above l = {small_l}"
                )));
            }
        }
    }
    let n_rat = BigRational::from_integer(BigInt::from(n as u64));
    let ratio = small_l / big_l;
    let bound = &n_rat / (BigRational::one() + &n_rat * &ratio * &ratio);
    let exact_rank = linalg::rank_rational(matrix);
    let floor = bound.ceil().to_integer().to_usize().expect("small rank bound");
    assert!(
        exact_rank >= floor,
        "rank {exact_rank} fell below the diagonal-dominance floor {bound}"
    );
    Ok(DiagRankReport {
        n,
        bound,
        exact_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn rational_points(coords: &[(i64, i64)]) -> Configuration {
        Configuration::rational(
            coords
                .iter()
                .map(|&(x, y)| vec![rat(x, 1), rat(y, 1)])
                .collect(),
        )
        .unwrap()
    }

    fn f3_projective_quad() -> Configuration {
        Configuration::finite(3, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2]]).unwrap()
    }

    #[test]
    fn construction_validates_properness() {
        assert_eq!(
            Configuration::finite(3, vec![vec![1, 0], vec![0, 0]]),
            Err(SgError::ZeroVector(1))
        );
        assert_eq!(
            Configuration::finite(5, vec![vec![1, 2], vec![2, 4]]),
            Err(SgError::ProportionalPair(0, 1))
        );
        assert_eq!(
            Configuration::finite(4, vec![vec![1, 0]]),
            Err(SgError::NotPrime(4))
        );
        assert_eq!(
            Configuration::rational(vec![vec![rat(1, 2)], vec![rat(1, 2)]]),
            Err(SgError::DuplicatePoint(0, 1))
        );
        assert!(matches!(
            Configuration::rational(vec![vec![rat(1, 1)], vec![rat(1, 1), rat(2, 1)]]),
            Err(SgError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn projective_quad_is_fully_covered() {
        let config = f3_projective_quad();
        let report = check_sg(&config, &rat(1, 1)).unwrap();
        assert!(report.is_sg);
        assert_eq!(report.witness, None);
        assert_eq!(report.covered, vec![4, 4, 4, 4]);
    }

    #[test]
    fn triangle_is_not_sg_but_collinear_points_are() {
        let triangle = rational_points(&[(0, 0), (1, 0), (0, 1)]);
        let report = check_sg(&triangle, &rat(1, 1)).unwrap();
        assert!(!report.is_sg);
        assert_eq!(report.witness, Some(0));
        assert_eq!(report.covered, vec![0, 0, 0]);

        let collinear = rational_points(&[(0, 0), (1, 1), (2, 2), (3, 3)]);
        let report = check_sg(&collinear, &rat(1, 1)).unwrap();
        assert!(report.is_sg);
        assert_eq!(report.covered, vec![4, 4, 4, 4]);

        assert!(matches!(
            check_sg(&rational_points(&[(0, 0), (1, 0)]), &rat(1, 1)),
            Err(SgError::TooFew { .. })
        ));
    }

    #[test]
    fn grid_coverage_is_partial() {
        let grid = rational_points(&[
            (0, 0),
            (0, 1),
            (0, 2),
            (1, 0),
            (1, 1),
            (1, 2),
            (2, 0),
            (2, 1),
            (2, 2),
        ]);
        // Edge midpoints sit on two special lines covering 5 points;
        // the center sees all 9.
        let report = check_sg(&grid, &rat(5, 9)).unwrap();
        assert!(report.is_sg);
        assert_eq!(report.covered.iter().min(), Some(&5));
        assert_eq!(report.covered[4], 9);
        let report = check_sg(&grid, &rat(2, 3)).unwrap();
        assert!(!report.is_sg);
    }

    #[test]
    fn ordinary_line_counts() {
        let grid: Vec<Point2> = (0..3)
            .flat_map(|x| (0..3).map(move |y| Point2::from_ints(x, y)))
            .collect();
        assert_eq!(ordinary_lines(&grid).unwrap().len(), 12);

        let collinear: Vec<Point2> = (0..4).map(|i| Point2::from_ints(i, i)).collect();
        assert!(ordinary_lines(&collinear).unwrap().is_empty());

        let triangle = vec![
            Point2::from_ints(0, 0),
            Point2::from_ints(1, 0),
            Point2::from_ints(0, 1),
        ];
        assert_eq!(ordinary_lines(&triangle).unwrap().len(), 3);
    }

    #[test]
    fn latin_square_triples_are_balanced() {
        for r in 3..=12 {
            let system = triple_system(r).unwrap();
            assert_eq!(system.triples.len(), r * r - r);
            assert_eq!(system.min_per_element, 3 * (r - 1));
            assert!(system.max_per_pair <= 6);
            for t in &system.triples {
                assert!(t[0] != t[1] && t[1] != t[2] && t[0] != t[2]);
            }
        }
        assert!(triple_system(2).is_err());
    }

    #[test]
    fn sum_zero_triples_match_enumeration() {
        let four = sum_zero_triples(4).unwrap();
        assert_eq!(four.triples.len(), 6);
        let five = sum_zero_triples(5).unwrap();
        assert_eq!(five.triples.len(), 12);
        // The arithmetic family is lopsided: element 2 mod 4 never
        // appears in a valid triple.
        assert_eq!(four.min_per_element, 0);
        for r in 3..=30 {
            let system = sum_zero_triples(r).unwrap();
            assert!(system.max_per_pair <= 6);
            if r % 3 != 0 {
                assert_eq!(system.triples.len(), (r - 1) * (r - 2));
            }
        }
    }

    #[test]
    fn design_from_projective_quad() {
        let config = f3_projective_quad();
        let design = design_from_config(&config).unwrap();
        // One special class holding all four points: 4^2 - 4 rows.
        assert_eq!(design.m(), 12);
        assert_eq!(design.n(), 4);
        let (q, k, t) = design.params();
        assert_eq!(q, 3);
        assert_eq!(k, 9);
        assert!(t <= 6);
        // A V = 0 with V of rank 2 caps the rank at n - 2.
        assert_eq!(design.exact_rank().unwrap(), 2);
        assert_eq!(design.rank_floor(), BigRational::zero());
    }

    #[test]
    fn design_from_collinear_points() {
        let config = rational_points(&[(0, 0), (1, 2), (2, 4), (3, 6), (4, 8)]);
        let design = design_from_config(&config).unwrap();
        assert_eq!(design.m(), 20);
        let (q, k, t) = design.params();
        assert_eq!((q, k), (3, 12));
        assert!(t <= 6);
        // V = [x | y | 1] has rank 2, so rank(A) <= 3; elimination
        // reaches it.
        assert_eq!(design.exact_rank().unwrap(), 3);
    }

    #[test]
    fn design_rejects_uncovered_points() {
        let triangle = rational_points(&[(0, 0), (1, 0), (0, 1)]);
        assert_eq!(
            design_from_config(&triangle).unwrap_err(),
            SgError::NotSg(0)
        );
    }

    #[test]
    fn grid_design_measures_and_ranks() {
        let grid = rational_points(&[
            (0, 0),
            (0, 1),
            (0, 2),
            (1, 0),
            (1, 1),
            (1, 2),
            (2, 0),
            (2, 1),
            (2, 2),
        ]);
        let design = design_from_config(&grid).unwrap();
        // Eight special lines of three points, six triples each.
        assert_eq!(design.m(), 48);
        let (q, k, t) = design.params();
        assert_eq!(q, 3);
        assert_eq!(k, 12);
        assert!(t <= 6);
        let rank = design.exact_rank().unwrap();
        assert_eq!(rank, 6);
        assert!(
            BigRational::from_integer(BigInt::from(rank as u64)) >= design.rank_floor()
        );
    }

    #[test]
    fn rank_bound_formula() {
        assert_eq!(rank_lower_bound(3, 5, 0, 7).unwrap(), rat(7, 1));
        assert_eq!(rank_lower_bound(1, 9, 0, 9).unwrap(), rat(9, 1));
        // (3, 9, 6, 4): 4 - (72 / 18)^2 = -12.
        assert_eq!(rank_lower_bound(3, 9, 6, 4).unwrap(), rat(-12, 1));
        assert!(rank_lower_bound(3, 0, 6, 4).is_err());
    }

    #[test]
    fn design_constructor_checks_invariants() {
        let rows = vec![
            vec![(0usize, rat(1, 1)), (1, rat(1, 1))],
            vec![(0, rat(1, 1)), (1, rat(-1, 1))],
        ];
        let ok = DesignMatrix::new(2, 2, 2, 2, DesignEntries::Rational(rows.clone()));
        assert!(ok.is_ok());
        assert!(matches!(
            DesignMatrix::new(2, 1, 2, 2, DesignEntries::Rational(rows.clone())),
            Err(SgError::BadDesign(_))
        ));
        assert!(matches!(
            DesignMatrix::new(2, 2, 3, 2, DesignEntries::Rational(rows.clone())),
            Err(SgError::BadDesign(_))
        ));
        assert!(matches!(
            DesignMatrix::new(2, 2, 2, 1, DesignEntries::Rational(rows)),
            Err(SgError::BadDesign(_))
        ));
    }

    #[test]
    fn diagonal_dominance_bounds() {
        let identity: Vec<Vec<BigRational>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| if i == j { rat(1, 1) } else { rat(0, 1) })
                    .collect()
            })
            .collect();
        let report = diag_rank_bound(&identity, &rat(1, 1), &rat(0, 1)).unwrap();
        assert_eq!(report.bound, rat(4, 1));
        assert_eq!(report.exact_rank, 4);

        // I + J: diagonal 2, off-diagonal 1; bound 3 / (1 + 3/4).
        let ipj: Vec<Vec<BigRational>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| if i == j { rat(2, 1) } else { rat(1, 1) })
                    .collect()
            })
            .collect();
        let report = diag_rank_bound(&ipj, &rat(2, 1), &rat(1, 1)).unwrap();
        assert_eq!(report.bound, rat(12, 7));
        assert_eq!(report.exact_rank, 3);

        // Mixed-sign diagonal is allowed: only magnitudes matter.
        let mixed = vec![
            vec![rat(3, 1), rat(1, 1)],
            vec![rat(1, 1), rat(-3, 1)],
        ];
        let report = diag_rank_bound(&mixed, &rat(3, 1), &rat(1, 1)).unwrap();
        assert_eq!(report.exact_rank, 2);

        assert!(diag_rank_bound(&identity, &rat(0, 1), &rat(0, 1)).is_err());
        let loose = vec![vec![rat(1, 1), rat(5, 1)], vec![rat(5, 1), rat(1, 1)]];
        assert!(diag_rank_bound(&loose, &rat(1, 1), &rat(0, 1)).is_err());
    }

    #[test]
    fn complex_rational_rank() {
        let zero = || (rat(0, 1), rat(0, 1));
        let one = || (rat(1, 1), rat(0, 1));
        let i_unit = || (rat(0, 1), rat(1, 1));
        let neg_i = || (rat(0, 1), rat(-1, 1));
        // [[1, i], [-i, 1]] has determinant 0 over Q(i).
        let rows = vec![vec![one(), i_unit()], vec![neg_i(), one()]];
        assert_eq!(linalg::rank_complex_rational(&rows), 1);
        let rows = vec![vec![one(), zero()], vec![zero(), i_unit()]];
        assert_eq!(linalg::rank_complex_rational(&rows), 2);
    }

    #[test]
    fn configuration_json_round_trip() {
        let config = f3_projective_quad();
        let round = Configuration::from_json(&config.to_json()).unwrap();
        assert_eq!(config, round);

        let points = Configuration::rational(vec![
            vec![rat(1, 2), rat(0, 1)],
            vec![rat(3, 1), rat(-2, 5)],
        ])
        .unwrap();
        let round = Configuration::from_json(&points.to_json()).unwrap();
        assert_eq!(points, round);

        assert!(Configuration::from_json(&serde_json::json!({"field": "octonion"})).is_err());
        assert!(Configuration::from_json(
            &serde_json::json!({"field": "mod/6", "vectors": [[1, 0]]})
        )
        .is_err());
    }
}
