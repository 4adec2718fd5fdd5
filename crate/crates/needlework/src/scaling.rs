//! Matrix scaling: alternating row/column normalization toward
//! prescribed marginals, the squared-entry variant that controls
//! row and column l2 norms, and the convex-potential formulation
//! whose gradient descent reaches the same scalings.

use std::collections::BTreeSet;

/// Hard cap on matrix sides accepted by the scaling routines.
pub const SCALE_CAP: usize = 512;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScalingError {
    #[error("matrix must be rectangular and nonempty")]
    BadShape,
    #[error("entry ({0}, {1}) is negative")]
    NegativeEntry(usize, usize),
    #[error("row {0} is zero")]
    ZeroRow(usize),
    #[error("column {0} is zero")]
    ZeroColumn(usize),
    #[error("row count {m} is not a multiple of the column count {n}")]
    NotTall { m: usize, n: usize },
    #[error("no reordering of the rows forms square blocks with nonzero diagonals: {0}")]
    NotScalable(String),
    #[error("did not converge in {iterations} sweeps, deviation {achieved_eps}")]
    DidNotConverge { achieved_eps: f64, iterations: u64 },
    #[error("matrix of side {size} exceeds the cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("row and column targets disagree: {0}")]
    TargetMismatch(String),
    #[error("bad matrix file: {0}")]
    BadCsv(String),
}

/// Row and column coefficients of a computed scaling, gauge-fixed so
/// the first row coefficient is 1. achieved_eps is the largest
/// violation of the row/column sum targets by the scaled matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingResult {
    pub rho: Vec<f64>,
    pub gamma: Vec<f64>,
    pub achieved_eps: f64,
    pub iterations: u64,
}

impl ScalingResult {
    fn gauge_normalize(&mut self) {
        let c = self.rho[0];
        for r in &mut self.rho {
            *r /= c;
        }
        for g in &mut self.gamma {
            *g *= c;
        }
        assert!(
            self.rho.iter().chain(&self.gamma).all(|&v| v > 0.0 && v.is_finite()),
            "scaling coefficients must stay positive and finite"
        );
    }
}

/// The matrix obtained by multiplying entry (i, j) by rho_i gamma_j.
pub fn apply_scaling(b: &[Vec<f64>], rho: &[f64], gamma: &[f64]) -> Vec<Vec<f64>> {
    b.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| v * rho[i] * gamma[j])
                .collect()
        })
        .collect()
}

fn validate_shape(b: &[Vec<f64>]) -> Result<(usize, usize), ScalingError> {
    let m = b.len();
    let n = b.first().map_or(0, |r| r.len());
    if m == 0 || n == 0 || b.iter().any(|r| r.len() != n) {
        return Err(ScalingError::BadShape);
    }
    if m > SCALE_CAP || n > SCALE_CAP {
        return Err(ScalingError::CapExceeded {
            size: m.max(n),
            cap: SCALE_CAP,
        });
    }
    for (i, row) in b.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(ScalingError::NegativeEntry(i, j));
            }
        }
    }
    for (i, row) in b.iter().enumerate() {
        if row.iter().all(|&v| v == 0.0) {
            return Err(ScalingError::ZeroRow(i));
        }
    }
    for j in 0..n {
        if b.iter().all(|row| row[j] == 0.0) {
            return Err(ScalingError::ZeroColumn(j));
        }
    }
    Ok((m, n))
}

/// Checks that the rows can be reordered into k square blocks, each
/// with a fully nonzero diagonal, by finding an assignment of every
/// row to a distinct (column, block) slot inside its support.
fn check_block_diagonal(b: &[Vec<f64>], n: usize, k: usize) -> Result<(), ScalingError> {
    let m = b.len();
    // Column j may absorb up to k rows; a row may sit on any column
    // where it has a nonzero entry. Kuhn's augmenting paths with
    // column capacity k.
    let support: Vec<Vec<usize>> = b
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut column_users: Vec<Vec<usize>> = vec![Vec::new(); n];

    fn augment(
        row: usize,
        support: &[Vec<usize>],
        column_users: &mut Vec<Vec<usize>>,
        k: usize,
        visited: &mut BTreeSet<usize>,
    ) -> bool {
        for &col in &support[row] {
            if visited.contains(&col) {
                continue;
            }
            visited.insert(col);
            if column_users[col].len() < k {
                column_users[col].push(row);
                return true;
            }
            for slot in 0..column_users[col].len() {
                let occupant = column_users[col][slot];
                if augment(occupant, support, column_users, k, visited) {
                    column_users[col][slot] = row;
                    return true;
                }
            }
        }
        false
    }

    for row in 0..m {
        let mut visited = BTreeSet::new();
        if !augment(row, &support, &mut column_users, k, &mut visited) {
            return Err(ScalingError::NotScalable(format!(
                "row {row} cannot be assigned a diagonal slot"
            )));
        }
    }
    Ok(())
}

/// Alternating normalization of a nonnegative nk x n matrix toward
/// row sums 1 and column sums k. Each sweep normalizes all rows,
/// then all columns; the deviation after a sweep never grows, which
/// is asserted, and iteration stops once it reaches eps.
pub fn sinkhorn_scale(
    b: &[Vec<f64>],
    eps: f64,
    max_iters: u64,
) -> Result<ScalingResult, ScalingError> {
    let (m, n) = validate_shape(b)?;
    if m % n != 0 {
        return Err(ScalingError::NotTall { m, n });
    }
    if !(eps > 0.0) {
        return Err(ScalingError::BadParameter("eps must be positive".into()));
    }
    let k = (m / n) as f64;
    check_block_diagonal(b, n, m / n)?;

    let mut rho = vec![1.0f64; m];
    let mut gamma = vec![1.0f64; n];
    let mut previous_eps = f64::INFINITY;
    let mut iterations = 0u64;
    loop {
        // Row pass: make every row sum exactly 1.
        for i in 0..m {
            let sum: f64 = (0..n).map(|j| b[i][j] * rho[i] * gamma[j]).sum();
            rho[i] /= sum;
        }
        // Column pass: make every column sum exactly k.
        for j in 0..n {
            let sum: f64 = (0..m).map(|i| b[i][j] * rho[i] * gamma[j]).sum();
            gamma[j] *= k / sum;
        }
        iterations += 1;
        let achieved = marginal_deviation(b, &rho, &gamma, k);
        assert!(
            achieved <= previous_eps + 1e-9,
            "sweep {iterations} worsened the deviation: {achieved} after {previous_eps}"
        );
        previous_eps = achieved;
        if achieved <= eps {
            let mut result = ScalingResult {
                rho,
                gamma,
                achieved_eps: achieved,
                iterations,
            };
            result.gauge_normalize();
            return Ok(result);
        }
        if iterations >= max_iters {
            return Err(ScalingError::DidNotConverge {
                achieved_eps: achieved,
                iterations,
            });
        }
    }
}

fn marginal_deviation(b: &[Vec<f64>], rho: &[f64], gamma: &[f64], k: f64) -> f64 {
    let m = b.len();
    let n = gamma.len();
    let mut worst = 0.0f64;
    for i in 0..m {
        let sum: f64 = (0..n).map(|j| b[i][j] * rho[i] * gamma[j]).sum();
        worst = worst.max((sum - 1.0).abs());
    }
    for j in 0..n {
        let sum: f64 = (0..m).map(|i| b[i][j] * rho[i] * gamma[j]).sum();
        worst = worst.max((sum - k).abs());
    }
    worst
}

/// Scales a matrix so each row's squared l2 norm is at most
/// 1 + achieved_eps and each column's at least k - achieved_eps,
/// by scaling the entrywise-squared matrix and taking square roots
/// of the coefficients.
pub fn l2_scale(
    a: &[Vec<f64>],
    eps: f64,
    max_iters: u64,
) -> Result<ScalingResult, ScalingError> {
    let squared: Vec<Vec<f64>> = a
        .iter()
        .map(|row| row.iter().map(|&v| v * v).collect())
        .collect();
    let inner = sinkhorn_scale(&squared, eps, max_iters)?;
    let mut result = ScalingResult {
        rho: inner.rho.iter().map(|&r| r.sqrt()).collect(),
        gamma: inner.gamma.iter().map(|&g| g.sqrt()).collect(),
        achieved_eps: inner.achieved_eps,
        iterations: inner.iterations,
    };
    result.gauge_normalize();
    let k = (a.len() / a[0].len()) as f64;
    let scaled = apply_scaling(a, &result.rho, &result.gamma);
    for row in &scaled {
        let norm_sq: f64 = row.iter().map(|&v| v * v).sum();
        assert!(norm_sq <= 1.0 + result.achieved_eps + 1e-9);
    }
    for j in 0..a[0].len() {
        let norm_sq: f64 = scaled.iter().map(|row| row[j] * row[j]).sum();
        assert!(norm_sq >= k - result.achieved_eps - 1e-9);
    }
    Ok(result)
}

/// The scaling potential ln(sum over the support of B_s exp(x e_s))
/// minus x v, where e_s marks the row and column of entry s and x
/// stacks row exponents before column exponents. Convex in x; its
/// minimizers induce scalings whose normalized marginals equal v.
pub fn potential_value(b: &[Vec<f64>], x: &[f64], v: &[f64]) -> f64 {
    let (m, n) = (b.len(), b[0].len());
    assert_eq!(x.len(), m + n);
    assert_eq!(v.len(), m + n);
    let mut max_exponent = f64::NEG_INFINITY;
    for i in 0..m {
        for j in 0..n {
            if b[i][j] != 0.0 {
                max_exponent = max_exponent.max(x[i] + x[m + j]);
            }
        }
    }
    let mut total = 0.0f64;
    for i in 0..m {
        for j in 0..n {
            if b[i][j] != 0.0 {
                total += b[i][j] * (x[i] + x[m + j] - max_exponent).exp();
            }
        }
    }
    let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
    total.ln() + max_exponent - dot
}

/// Gradient of the scaling potential: the softmax-weighted marginals
/// of the support minus v.
pub fn potential_gradient(b: &[Vec<f64>], x: &[f64], v: &[f64]) -> Vec<f64> {
    let (m, n) = (b.len(), b[0].len());
    assert_eq!(x.len(), m + n);
    assert_eq!(v.len(), m + n);
    let mut max_exponent = f64::NEG_INFINITY;
    for i in 0..m {
        for j in 0..n {
            if b[i][j] != 0.0 {
                max_exponent = max_exponent.max(x[i] + x[m + j]);
            }
        }
    }
    let mut weights = vec![vec![0.0f64; n]; m];
    let mut total = 0.0f64;
    for i in 0..m {
        for j in 0..n {
            if b[i][j] != 0.0 {
                let w = b[i][j] * (x[i] + x[m + j] - max_exponent).exp();
                weights[i][j] = w;
                total += w;
            }
        }
    }
    let mut grad = vec![0.0f64; m + n];
    for i in 0..m {
        for j in 0..n {
            let p = weights[i][j] / total;
            grad[i] += p;
            grad[m + j] += p;
        }
    }
    for (g, target) in grad.iter_mut().zip(v) {
        *g -= target;
    }
    grad
}

/// Gradient descent on the scaling potential toward row sums
/// row_targets and column sums col_targets. Descent runs on the
/// mass-normalized targets; the returned coefficients restore the
/// requested mass, and achieved_eps measures the worst marginal
/// violation against the raw targets.
pub fn scale_by_potential(
    b: &[Vec<f64>],
    row_targets: &[f64],
    col_targets: &[f64],
    step: f64,
    tol: f64,
    max_iters: u64,
) -> Result<ScalingResult, ScalingError> {
    let (m, n) = validate_shape(b)?;
    if row_targets.len() != m || col_targets.len() != n {
        return Err(ScalingError::BadParameter(
            "target lengths must match the matrix shape".into(),
        ));
    }
    if row_targets.iter().chain(col_targets).any(|&t| !(t > 0.0)) {
        return Err(ScalingError::BadParameter(
            "targets must be strictly positive".into(),
        ));
    }
    if !(step > 0.0) || !(tol > 0.0) {
        return Err(ScalingError::BadParameter(
            "step and tol must be positive".into(),
        ));
    }
    let row_mass: f64 = row_targets.iter().sum();
    let col_mass: f64 = col_targets.iter().sum();
    if (row_mass - col_mass).abs() > 1e-9 * row_mass.max(col_mass) {
        return Err(ScalingError::TargetMismatch(format!(
            "row mass {row_mass} vs column mass {col_mass}"
        )));
    }

    // Normalized target: both halves sum to one, matching the
    // softmax marginals in the gradient.
    let v: Vec<f64> = row_targets
        .iter()
        .map(|&t| t / row_mass)
        .chain(col_targets.iter().map(|&t| t / col_mass))
        .collect();

    let mut x = vec![0.0f64; m + n];
    let mut f = potential_value(b, &x, &v);
    let mut iterations = 0u64;
    // The step persists across iterations: halved whenever a trial
    // point fails the descent test, never grown back, so the descent
    // settles into a step size the objective's curvature supports.
    let mut eta = step;
    loop {
        let grad = potential_gradient(b, &x, &v);
        let grad_norm_inf = grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs()));
        if grad_norm_inf <= tol {
            break;
        }
        if iterations >= max_iters {
            let (rho, gamma) = coefficients_from_exponents(b, &x, row_mass);
            return Err(ScalingError::DidNotConverge {
                achieved_eps: potential_deviation(b, &rho, &gamma, row_targets, col_targets),
                iterations,
            });
        }
        // Backtracking line search on the convex objective. Near the
        // minimum the demanded decrease drops below the resolution of
        // f itself, so the test carries an explicit rounding slack;
        // progress there is measured by the gradient, not by f.
        let grad_norm_sq: f64 = grad.iter().map(|g| g * g).sum();
        let slack = 4.0 * f64::EPSILON * f.abs().max(1.0);
        let mut accepted = false;
        for _ in 0..60 {
            let candidate: Vec<f64> = x.iter().zip(&grad).map(|(xi, g)| xi - eta * g).collect();
            let f_candidate = potential_value(b, &candidate, &v);
            if f_candidate.is_finite() && f_candidate <= f - 0.25 * eta * grad_norm_sq + slack {
                x = candidate;
                f = f_candidate;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            let (rho, gamma) = coefficients_from_exponents(b, &x, row_mass);
            return Err(ScalingError::DidNotConverge {
                achieved_eps: potential_deviation(b, &rho, &gamma, row_targets, col_targets),
                iterations,
            });
        }
        iterations += 1;
    }

    let (rho, gamma) = coefficients_from_exponents(b, &x, row_mass);
    let achieved_eps = potential_deviation(b, &rho, &gamma, row_targets, col_targets);
    let mut result = ScalingResult {
        rho,
        gamma,
        achieved_eps,
        iterations,
    };
    result.gauge_normalize();
    Ok(result)
}

/// Converts potential exponents into scaling coefficients, restoring
/// the requested total mass.
fn coefficients_from_exponents(b: &[Vec<f64>], x: &[f64], mass: f64) -> (Vec<f64>, Vec<f64>) {
    let (m, n) = (b.len(), b[0].len());
    // Keep exponentials in range by centering each half.
    let row_center = x[..m].iter().sum::<f64>() / m as f64;
    let col_center = x[m..].iter().sum::<f64>() / n as f64;
    let rho: Vec<f64> = (0..m).map(|i| (x[i] - row_center).exp()).collect();
    let gamma: Vec<f64> = (0..n).map(|j| (x[m + j] - col_center).exp()).collect();
    let total: f64 = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| v * rho[i] * gamma[j])
                .sum::<f64>()
        })
        .sum();
    let correction = mass / total;
    (rho.into_iter().map(|r| r * correction).collect(), gamma)
}

fn potential_deviation(
    b: &[Vec<f64>],
    rho: &[f64],
    gamma: &[f64],
    row_targets: &[f64],
    col_targets: &[f64],
) -> f64 {
    let scaled = apply_scaling(b, rho, gamma);
    let mut worst = 0.0f64;
    for (i, row) in scaled.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        worst = worst.max((sum - row_targets[i]).abs());
    }
    for j in 0..gamma.len() {
        let sum: f64 = scaled.iter().map(|row| row[j]).sum();
        worst = worst.max((sum - col_targets[j]).abs());
    }
    worst
}

/// Parses a matrix from CSV text: one row per line, entries as
/// floats separated by commas. Blank lines are skipped.
pub fn float_matrix_from_csv(text: &str) -> Result<Vec<Vec<f64>>, ScalingError> {
    let mut rows = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let value: f64 = cell
                .trim()
                .parse()
                .map_err(|_| ScalingError::BadCsv(format!("line {}: bad entry {cell:?}", line_no + 1)))?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(ScalingError::BadCsv("rows are empty or ragged".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_square_scales_in_one_sweep() {
        let b = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let result = sinkhorn_scale(&b, 1e-12, 10).unwrap();
        assert_eq!(result.iterations, 1);
        assert!(result.achieved_eps <= 1e-12);
        assert_eq!(result.rho[0], 1.0);
        let scaled = apply_scaling(&b, &result.rho, &result.gamma);
        for row in &scaled {
            for &v in row {
                assert!((v - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn triangular_pattern_approaches_identity() {
        let b = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        let result = sinkhorn_scale(&b, 1e-6, 2_000_000).unwrap();
        assert!(result.achieved_eps <= 1e-6);
        assert!(result.iterations > 1_000);
        let scaled = apply_scaling(&b, &result.rho, &result.gamma);
        // The only near-doubly-stochastic scaling sends the
        // off-diagonal entry to zero.
        assert!(scaled[0][1] < 1e-5);
        assert!((scaled[0][0] - 1.0).abs() < 1e-5);
        assert!((scaled[1][1] - 1.0).abs() < 1e-5);
        assert!(scaled[1][0] == 0.0);
    }

    #[test]
    fn stacked_blocks_hit_column_sums_k() {
        let b = vec![
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
            vec![1.0, 1.0],
        ];
        let result = sinkhorn_scale(&b, 1e-12, 10).unwrap();
        assert_eq!(result.iterations, 1);
        let scaled = apply_scaling(&b, &result.rho, &result.gamma);
        for j in 0..2 {
            let col: f64 = scaled.iter().map(|r| r[j]).sum();
            assert!((col - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_and_pattern_rejections() {
        assert_eq!(
            sinkhorn_scale(&[vec![1.0, 0.0], vec![1.0, 0.0]], 1e-6, 10).unwrap_err(),
            ScalingError::ZeroColumn(1)
        );
        assert_eq!(
            sinkhorn_scale(&[vec![0.0, 0.0], vec![1.0, 1.0]], 1e-6, 10).unwrap_err(),
            ScalingError::ZeroRow(0)
        );
        assert!(matches!(
            sinkhorn_scale(&[vec![1.0, -0.5], vec![1.0, 1.0]], 1e-6, 10).unwrap_err(),
            ScalingError::NegativeEntry(0, 1)
        ));
        assert_eq!(
            sinkhorn_scale(&[vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]], 1e-6, 10)
                .map(|_| ())
                .unwrap_err(),
            ScalingError::NotTall { m: 3, n: 2 }
        );
        // Two rows supported only on the first column cannot both
        // take a diagonal slot when k = 1.
        let stuck = vec![
            vec![1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 1.0, 1.0],
        ];
        assert!(matches!(
            sinkhorn_scale(&stuck, 1e-6, 10).unwrap_err(),
            ScalingError::NotScalable(_)
        ));
    }

    #[test]
    fn convergence_failure_reports_deviation() {
        let b = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        match sinkhorn_scale(&b, 1e-9, 5).unwrap_err() {
            ScalingError::DidNotConverge {
                achieved_eps,
                iterations,
            } => {
                assert_eq!(iterations, 5);
                assert!(achieved_eps > 1e-9 && achieved_eps < 0.2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn l2_scaling_controls_row_norms() {
        let identity = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let result = l2_scale(&identity, 1e-9, 10).unwrap();
        assert!(result.achieved_eps <= 1e-9);
        for (r, g) in result.rho.iter().zip(&result.gamma) {
            assert!((r - 1.0).abs() < 1e-9);
            assert!((g - 1.0).abs() < 1e-9);
        }

        let a = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
        let result = l2_scale(&a, 1e-6, 2_000_000).unwrap();
        let scaled = apply_scaling(&a, &result.rho, &result.gamma);
        for row in &scaled {
            let norm_sq: f64 = row.iter().map(|v| v * v).sum();
            assert!(norm_sq <= 1.0 + result.achieved_eps + 1e-9);
        }
    }

    #[test]
    fn potential_gradient_matches_finite_differences() {
        let b = vec![vec![1.0, 2.0], vec![3.0, 0.0]];
        let x = vec![0.3, -0.2, 0.1, 0.05];
        let v = vec![0.5, 0.5, 0.6, 0.4];
        let grad = potential_gradient(&b, &x, &v);
        let delta = 1e-5;
        for coord in 0..4 {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus[coord] += delta;
            minus[coord] -= delta;
            let numeric =
                (potential_value(&b, &plus, &v) - potential_value(&b, &minus, &v)) / (2.0 * delta);
            assert!(
                (grad[coord] - numeric).abs() < 1e-6,
                "coordinate {coord}: analytic {} vs numeric {numeric}",
                grad[coord]
            );
        }
    }

    #[test]
    fn potential_descent_matches_sinkhorn_on_uniform() {
        let b = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let viaponential =
            scale_by_potential(&b, &[1.0, 1.0], &[1.0, 1.0], 1.0, 1e-9, 10_000).unwrap();
        let via_sinkhorn = sinkhorn_scale(&b, 1e-9, 1_000).unwrap();
        assert_eq!(viaponential.rho[0], 1.0);
        let lhs = apply_scaling(&b, &viaponential.rho, &viaponential.gamma);
        let rhs = apply_scaling(&b, &via_sinkhorn.rho, &via_sinkhorn.gamma);
        for i in 0..2 {
            for j in 0..2 {
                assert!((lhs[i][j] - rhs[i][j]).abs() < 1e-6);
                assert!((lhs[i][j] - 0.5).abs() < 1e-6);
            }
        }
        assert!(viaponential.achieved_eps <= 1e-6);
    }

    #[test]
    fn potential_descent_matches_sinkhorn_on_positive_matrix() {
        let b = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
        let by_potential =
            scale_by_potential(&b, &[1.0, 1.0], &[1.0, 1.0], 1.0, 1e-10, 100_000).unwrap();
        let by_sinkhorn = sinkhorn_scale(&b, 1e-10, 100_000).unwrap();
        let lhs = apply_scaling(&b, &by_potential.rho, &by_potential.gamma);
        let rhs = apply_scaling(&b, &by_sinkhorn.rho, &by_sinkhorn.gamma);
        for i in 0..2 {
            for j in 0..2 {
                assert!((lhs[i][j] - rhs[i][j]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn potential_target_validation() {
        let b = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(matches!(
            scale_by_potential(&b, &[1.0, 1.0], &[1.5, 1.6], 1.0, 1e-8, 100).unwrap_err(),
            ScalingError::TargetMismatch(_)
        ));
        assert!(matches!(
            scale_by_potential(&b, &[1.0, -1.0], &[0.0, 0.0], 1.0, 1e-8, 100).unwrap_err(),
            ScalingError::BadParameter(_)
        ));
        assert!(matches!(
            scale_by_potential(&b, &[1.0], &[1.0], 1.0, 1e-8, 100).unwrap_err(),
            ScalingError::BadParameter(_)
        ));
    }

    #[test]
    fn nonuniform_targets_are_respected() {
        let b = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let result =
            scale_by_potential(&b, &[2.0, 1.0], &[1.5, 1.5], 0.5, 1e-10, 100_000).unwrap();
        let scaled = apply_scaling(&b, &result.rho, &result.gamma);
        assert!((scaled[0][0] + scaled[0][1] - 2.0).abs() < 1e-8);
        assert!((scaled[1][0] + scaled[1][1] - 1.0).abs() < 1e-8);
        assert!((scaled[0][0] + scaled[1][0] - 1.5).abs() < 1e-8);
    }

    #[test]
    fn csv_parsing() {
        let parsed = float_matrix_from_csv("1, 2\n3,4\n\n").unwrap();
        assert_eq!(parsed, vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(float_matrix_from_csv("1,x\n").is_err());
        assert!(float_matrix_from_csv("1,2\n3\n").is_err());
        assert!(float_matrix_from_csv("").is_err());
    }
}
