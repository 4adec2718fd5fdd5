//! Reed-Muller codes with a line decoder that corrects any single
//! position from q - 1 reads, plus the combinatorial side of local
//! correction: vector lists, disjoint spanning matchings, the
//! annihilator matrix they induce, and a random probe for small
//! spanning coordinate sets.

use std::collections::BTreeSet;

use rand::Rng;

use crate::field::{point_at, point_index, Field, FieldElement, FieldError};
use crate::linalg;
use crate::poly::{binomial, monomials_up_to, MultiPoly, UniPoly};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LccError {
    #[error("degree bound {e} too large: decoding needs e <= q - 2 = {max}")]
    DegreeTooLarge { e: u32, max: i64 },
    #[error("codeword length {got}, expected {want}")]
    WordLength { got: usize, want: usize },
    #[error("polynomial does not fit the code (wrong field, arity, or degree)")]
    BadPolynomial,
    #[error("position {0} out of range")]
    BadPosition(usize),
    #[error("invalid vector list: {0}")]
    BadList(String),
    #[error("no spanning {r}-set for index {index} outside {excluded:?}: not an LCC at this (r, delta)")]
    NotLcc {
        index: usize,
        r: usize,
        excluded: Vec<usize>,
    },
    #[error("matching invalid: {0}")]
    BadMatching(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Evaluation code of m-variate polynomials of degree at most e over
/// the whole space F_q^m, positions ordered by the field's point
/// enumeration. e <= q - 2 keeps every punctured line decodable.
#[derive(Clone, Debug)]
pub struct RMCode {
    field: Field,
    m: usize,
    e: u32,
    directions: Vec<Vec<FieldElement>>,
}

impl RMCode {
    pub fn new(field: Field, m: usize, e: u32) -> Result<RMCode, LccError> {
        let q = field.order();
        if m == 0 {
            return Err(LccError::BadPolynomial);
        }
        if i64::from(e) > q as i64 - 2 {
            return Err(LccError::DegreeTooLarge { e, max: q as i64 - 2 });
        }
        let size = field.order().checked_pow(m as u32).unwrap_or(u64::MAX);
        if size > field.enum_cap() {
            return Err(FieldError::CapExceeded { order: size, cap: field.enum_cap() }.into());
        }
        let directions = directions(&field, m);
        Ok(RMCode { field, m, e, directions })
    }

    /// Largest decodable degree, e = q - 2.
    pub fn maximal(field: Field, m: usize) -> Result<RMCode, LccError> {
        let e = (field.order() - 2) as u32;
        Self::new(field, m, e)
    }

    /// Low-degree preset e = floor(q / 10), trading rate for a
    /// constant fraction of correctable errors.
    pub fn robust(field: Field, m: usize) -> Result<RMCode, LccError> {
        let e = (field.order() / 10) as u32;
        Self::new(field, m, e)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn dimension(&self) -> u64 {
        binomial(self.m as u64 + self.e as u64, self.m as u64)
    }

    pub fn length(&self) -> usize {
        self.field.order().pow(self.m as u32) as usize
    }

    /// Position i holds the evaluation at this point.
    pub fn coord(&self, i: usize) -> Vec<FieldElement> {
        point_at(&self.field, self.m, i as u64)
    }

    /// One representative direction per line slope; every position
    /// lies on exactly (q^m - 1)/(q - 1) lines, one per direction.
    pub fn directions(&self) -> &[Vec<FieldElement>] {
        &self.directions
    }

    pub fn encode(&self, poly: &MultiPoly) -> Result<Vec<FieldElement>, LccError> {
        if poly.field() != &self.field
            || poly.n_vars() != self.m
            || poly.degree().unwrap_or(0) > self.e
        {
            return Err(LccError::BadPolynomial);
        }
        Ok((0..self.length())
            .map(|i| poly.evaluate(&self.coord(i)))
            .collect())
    }

    /// Decode position i by reading the q - 1 other points of the
    /// line through coord(i) with the given slope and interpolating.
    /// Position i itself is never read.
    pub fn correct_along(
        &self,
        word: &[FieldElement],
        i: usize,
        direction: &[FieldElement],
    ) -> Result<FieldElement, LccError> {
        if word.len() != self.length() {
            return Err(LccError::WordLength { got: word.len(), want: self.length() });
        }
        if i >= self.length() {
            return Err(LccError::BadPosition(i));
        }
        let base = self.coord(i);
        let mut nodes = Vec::with_capacity(self.field.order() as usize - 1);
        for t_idx in 1..self.field.order() {
            let t = self.field.element_at(t_idx);
            let point: Vec<FieldElement> = base
                .iter()
                .zip(direction.iter())
                .map(|(b, d)| b + &(&t * d))
                .collect();
            let pos = point_index(&self.field, &point) as usize;
            nodes.push((t, word[pos].clone()));
        }
        let h = UniPoly::interpolate(&self.field, &nodes).expect("distinct parameters");
        Ok(h.eval(&self.field.zero()))
    }

    /// The decoder proper: a uniformly random line through the
    /// queried position.
    pub fn local_correct<R: Rng>(
        &self,
        word: &[FieldElement],
        i: usize,
        rng: &mut R,
    ) -> Result<FieldElement, LccError> {
        let pick = rng.gen_range(0..self.directions.len());
        let direction = self.directions[pick].clone();
        self.correct_along(word, i, &direction)
    }

    /// Exact single-error census: every position, every line, every
    /// error location other than the queried point, every wrong
    /// value. Returns (successes, trials).
    pub fn single_error_exhaustive(&self, word: &[FieldElement]) -> Result<(u64, u64), LccError> {
        if word.len() != self.length() {
            return Err(LccError::WordLength { got: word.len(), want: self.length() });
        }
        let mut successes = 0;
        let mut trials = 0;
        let mut corrupted = word.to_vec();
        for i in 0..self.length() {
            for p in 0..self.length() {
                if p == i {
                    continue;
                }
                for delta_idx in 1..self.field.order() {
                    let delta = self.field.element_at(delta_idx);
                    corrupted[p] = &word[p] + &delta;
                    for dir in &self.directions {
                        trials += 1;
                        if self.correct_along(&corrupted, i, dir)? == word[i] {
                            successes += 1;
                        }
                    }
                    corrupted[p] = word[p].clone();
                }
            }
        }
        Ok((successes, trials))
    }

    /// Sampled single-error success rate: per trial a uniform
    /// position, a uniform error elsewhere, a uniform wrong value,
    /// and the decoder's own random line.
    pub fn single_error_empirical<R: Rng>(
        &self,
        word: &[FieldElement],
        trials: u64,
        rng: &mut R,
    ) -> Result<f64, LccError> {
        if word.len() != self.length() {
            return Err(LccError::WordLength { got: word.len(), want: self.length() });
        }
        let n = self.length();
        let mut successes = 0u64;
        let mut corrupted = word.to_vec();
        for _ in 0..trials {
            let i = rng.gen_range(0..n);
            let mut p = rng.gen_range(0..n - 1);
            if p >= i {
                p += 1;
            }
            let delta = self.field.element_at(rng.gen_range(1..self.field.order()));
            corrupted[p] = &word[p] + &delta;
            if self.local_correct(&corrupted, i, rng)? == word[i] {
                successes += 1;
            }
            corrupted[p] = word[p].clone();
        }
        Ok(successes as f64 / trials as f64)
    }

    /// The list-of-vectors view of the code: position i carries the
    /// vector of all monomial evaluations at coord(i), so correcting
    /// along lines is spanning inside this list with r = q - 1.
    pub fn implied_lcc_list(&self, delta: f64) -> LCCList {
        let monomials = monomials_up_to(self.m, self.e);
        let vectors = (0..self.length())
            .map(|i| {
                let point = self.coord(i);
                monomials
                    .iter()
                    .map(|exps| {
                        exps.iter()
                            .zip(point.iter())
                            .fold(self.field.one(), |acc, (&e, x)| &acc * &x.pow(e as u64))
                    })
                    .collect()
            })
            .collect();
        LCCList::new(vectors, self.field.order() as usize - 1, delta)
            .expect("evaluation list is well formed")
    }

    /// The matching every position gets for free: its pencil of
    /// punctured lines, pairwise disjoint away from the point.
    pub fn pencil_matching(&self) -> Matching {
        let families = (0..self.length())
            .map(|i| {
                let base = self.coord(i);
                self.directions
                    .iter()
                    .map(|dir| {
                        (1..self.field.order())
                            .map(|t_idx| {
                                let t = self.field.element_at(t_idx);
                                let point: Vec<FieldElement> = base
                                    .iter()
                                    .zip(dir.iter())
                                    .map(|(b, d)| b + &(&t * d))
                                    .collect();
                                point_index(&self.field, &point) as usize
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Matching { families }
    }
}

/// One representative per projective direction of F^m, the
/// lexicographically least nonzero scalar multiple.
fn directions(field: &Field, m: usize) -> Vec<Vec<FieldElement>> {
    let size = crate::field::space_size(field, m);
    let mut reps: BTreeSet<Vec<FieldElement>> = BTreeSet::new();
    let scalars: Vec<FieldElement> =
        (1..field.order()).map(|i| field.element_at(i)).collect();
    for idx in 1..size {
        let v = point_at(field, m, idx);
        let rep = scalars
            .iter()
            .map(|c| v.iter().map(|x| c * x).collect::<Vec<_>>())
            .min()
            .expect("nonempty scalar set");
        reps.insert(rep);
    }
    reps.into_iter().collect()
}

/// An ordered list of vectors with its locality parameters: every
/// index should be spanned by r others, robustly against delta*n
/// exclusions.
#[derive(Clone, Debug, PartialEq)]
pub struct LCCList {
    pub vectors: Vec<Vec<FieldElement>>,
    pub r: usize,
    pub delta: f64,
}

impl LCCList {
    pub fn new(vectors: Vec<Vec<FieldElement>>, r: usize, delta: f64) -> Result<LCCList, LccError> {
        if vectors.is_empty() {
            return Err(LccError::BadList("no vectors".into()));
        }
        let d = vectors[0].len();
        if d == 0 || vectors.iter().any(|v| v.len() != d) {
            return Err(LccError::BadList("ragged vector lengths".into()));
        }
        if r == 0 {
            return Err(LccError::BadList("query bound r must be positive".into()));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(LccError::BadList("delta must lie in (0, 1]".into()));
        }
        Ok(LCCList { vectors, r, delta })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Rank of the whole list.
    pub fn dim(&self) -> usize {
        linalg::rank(&self.vectors)
    }

    fn spans(&self, target: usize, support: &[usize]) -> bool {
        let mut rows: Vec<Vec<FieldElement>> =
            support.iter().map(|&j| self.vectors[j].clone()).collect();
        let base = linalg::rank(&rows);
        rows.push(self.vectors[target].clone());
        linalg::rank(&rows) == base
    }

    /// Smallest spanning set for index i among `allowed`, by size and
    /// then lexicographic order. None if even the full allowed set
    /// does not span.
    fn smallest_spanning_set(&self, i: usize, allowed: &[usize]) -> Option<Vec<usize>> {
        for size in 1..=self.r.min(allowed.len()) {
            let mut picks: Vec<usize> = (0..size).collect();
            loop {
                let candidate: Vec<usize> = picks.iter().map(|&p| allowed[p]).collect();
                if self.spans(i, &candidate) {
                    return Some(candidate);
                }
                // Next lexicographic combination.
                let mut pos = size;
                while pos > 0 {
                    pos -= 1;
                    if picks[pos] + (size - pos) <= allowed.len() - 1 {
                        picks[pos] += 1;
                        for later in pos + 1..size {
                            picks[later] = picks[later - 1] + 1;
                        }
                        break;
                    }
                    if pos == 0 {
                        picks.clear();
                    }
                }
                if picks.is_empty() {
                    break;
                }
            }
        }
        None
    }
}

/// Per-index disjoint families of spanning sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub families: Vec<Vec<Vec<usize>>>,
}

impl Matching {
    pub fn k_min(&self) -> usize {
        self.families.iter().map(|f| f.len()).min().unwrap_or(0)
    }

    /// Check the matching against a list: sizes, self-exclusion,
    /// pairwise disjointness, and that every set spans its index.
    pub fn validate(&self, list: &LCCList) -> Result<(), LccError> {
        if self.families.len() != list.len() {
            return Err(LccError::BadMatching("family count differs from list".into()));
        }
        for (i, family) in self.families.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for set in family {
                if set.is_empty() || set.len() > list.r {
                    return Err(LccError::BadMatching(format!(
                        "set size {} out of range at index {i}",
                        set.len()
                    )));
                }
                for &j in set {
                    if j == i || j >= list.len() {
                        return Err(LccError::BadMatching(format!(
                            "bad member {j} at index {i}"
                        )));
                    }
                    if !seen.insert(j) {
                        return Err(LccError::BadMatching(format!(
                            "member {j} reused at index {i}"
                        )));
                    }
                }
                if !list.spans(i, set) {
                    return Err(LccError::BadMatching(format!(
                        "set {set:?} does not span index {i}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Greedy matchings: for each index keep excluding everything already
/// used and ask for a fresh spanning r-set, until (delta/r) * n sets
/// are collected. Failure before that exhibits an exclusion set
/// witnessing that the list is not an (r, delta)-LCC.
pub fn build_matchings(list: &LCCList) -> Result<Matching, LccError> {
    let n = list.len();
    let target = ((list.delta / list.r as f64) * n as f64).ceil().max(1.0) as usize;
    let mut families = Vec::with_capacity(n);
    for i in 0..n {
        let mut family: Vec<Vec<usize>> = Vec::new();
        let mut used: BTreeSet<usize> = [i].into_iter().collect();
        while family.len() < target {
            let allowed: Vec<usize> = (0..n).filter(|j| !used.contains(j)).collect();
            match list.smallest_spanning_set(i, &allowed) {
                Some(set) => {
                    used.extend(set.iter().copied());
                    family.push(set);
                }
                None => {
                    return Err(LccError::NotLcc {
                        index: i,
                        r: list.r,
                        excluded: used.into_iter().collect(),
                    });
                }
            }
        }
        families.push(family);
    }
    Ok(Matching { families })
}

/// Rows annihilating the list matrix B (rows v_j): one row per
/// matched set, support {i} union R, coefficient 1 at i. Verifies the
/// pattern (supports meet only at i inside a block) and A B = 0.
pub fn lcc_matrix(list: &LCCList, matching: &Matching) -> Result<Vec<Vec<FieldElement>>, LccError> {
    matching.validate(list)?;
    let field = list.vectors[0][0].field().clone();
    let n = list.len();
    let d = list.vectors[0].len();
    let mut rows = Vec::new();
    for (i, family) in matching.families.iter().enumerate() {
        for set in family {
            // Solve v_i = sum c_j v_j by a null vector of the matrix
            // whose columns are the set's vectors then v_i.
            let cols = set.len() + 1;
            let system: Vec<Vec<FieldElement>> = (0..d)
                .map(|coord| {
                    let mut row: Vec<FieldElement> = set
                        .iter()
                        .map(|&j| list.vectors[j][coord].clone())
                        .collect();
                    row.push(list.vectors[i][coord].clone());
                    row
                })
                .collect();
            let null = linalg::null_space_vector(&field, &system, cols).ok_or_else(|| {
                LccError::BadMatching(format!("no relation over {set:?} and {i}"))
            })?;
            let scale = null[cols - 1].clone();
            if scale.is_zero() {
                return Err(LccError::BadMatching(format!(
                    "relation over {set:?} avoids index {i}"
                )));
            }
            let inv = scale.inv();
            let mut row = vec![field.zero(); n];
            row[i] = field.one();
            for (slot, &j) in set.iter().enumerate() {
                row[j] = &null[slot] * &inv;
            }
            rows.push(row);
        }
    }
    // A B = 0, entry by entry.
    for row in &rows {
        for coord in 0..d {
            let mut acc = field.zero();
            for (j, a) in row.iter().enumerate() {
                if !a.is_zero() {
                    acc = &acc + &(a * &list.vectors[j][coord]);
                }
            }
            assert!(acc.is_zero(), "annihilator row fails on column {coord}");
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub smallest_spanning_found: Option<usize>,
    pub inclusion_probability: f64,
    pub bound: f64,
}

/// Random search for small spanning coordinate sets: sample T by
/// including each index with probability log n * n^{-1/r} and record
/// the smallest T that spans the list. The reported bound is the
/// n^{(r-1)/r} log n scale such sets live at.
pub fn katz_trevisan_probe<R: Rng>(
    list: &LCCList,
    trials: u64,
    rng: &mut R,
) -> ProbeReport {
    let n = list.len() as f64;
    let mu = (n.ln() * n.powf(-1.0 / list.r as f64)).clamp(0.0, 1.0);
    let full_dim = list.dim();
    let mut smallest: Option<usize> = None;
    for _ in 0..trials {
        let t: Vec<usize> = (0..list.len()).filter(|_| rng.gen::<f64>() < mu).collect();
        if smallest.is_some_and(|s| t.len() >= s) {
            continue;
        }
        let rows: Vec<Vec<FieldElement>> =
            t.iter().map(|&j| list.vectors[j].clone()).collect();
        if linalg::rank(&rows) == full_dim {
            smallest = Some(t.len());
        }
    }
    ProbeReport {
        smallest_spanning_found: smallest,
        inclusion_probability: mu,
        bound: n.powf((list.r as f64 - 1.0) / list.r as f64) * n.ln(),
    }
}
