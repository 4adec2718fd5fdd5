// Matrix scaling: find positive diagonal coefficients rho, gamma so
// that diag(rho) B diag(gamma) has prescribed row and column sums.
// Sinkhorn iteration alternates row and column normalization; the
// error is monotone and converges whenever the support of B admits a
// scaling. For [[1, 1], [0, 1]] only approximate scalings exist: the
// corner entry must be squeezed toward zero and the coefficients
// diverge, but any target accuracy is reachable.

use needlework::scaling::{
    apply_scaling, l2_scale, potential_gradient, scale_by_potential, sinkhorn_scale,
};

fn main() {
    let b = vec![vec![1.0, 1.0], vec![0.0, 1.0]];
    let result = sinkhorn_scale(&b, 1e-6, 5_000_000).unwrap();
    let scaled = apply_scaling(&b, &result.rho, &result.gamma);
    println!(
        "[[1,1],[0,1]] after {} sweeps: eps = {:.2e}, corner = {:.2e}",
        result.iterations, result.achieved_eps, scaled[0][1]
    );
    println!(
        "diagonal entries {:.6}, {:.6} (exactly doubly stochastic is impossible)",
        scaled[0][0], scaled[1][1]
    );

    // A strictly positive matrix scales quickly and exactly in the
    // limit; two routes must agree: Sinkhorn and gradient descent on
    // the convex potential log(sum of scaled entries) - targets . x.
    let b = vec![vec![2.0, 1.0], vec![1.0, 2.0]];
    let sink = sinkhorn_scale(&b, 1e-9, 100_000).unwrap();
    let desc = scale_by_potential(&b, &[1.0, 1.0], &[1.0, 1.0], 1.0, 1e-9, 100_000).unwrap();
    let a = apply_scaling(&b, &sink.rho, &sink.gamma);
    let c = apply_scaling(&b, &desc.rho, &desc.gamma);
    let gap = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - c[i][j]).abs())
        .fold(0.0f64, f64::max);
    println!("\n[[2,1],[1,2]]: sinkhorn vs potential descent, max entry gap {gap:.2e}");
    assert!(gap <= 1e-6);

    // The same potential handles non-doubly-stochastic targets.
    let desc = scale_by_potential(&b, &[2.0, 1.0], &[1.5, 1.5], 1.0, 1e-10, 100_000).unwrap();
    let scaled = apply_scaling(&b, &desc.rho, &desc.gamma);
    let rows: Vec<f64> = scaled.iter().map(|r| r.iter().sum()).collect();
    println!("row sums toward [2, 1]: [{:.6}, {:.6}]", rows[0], rows[1]);

    // Gradient sanity at an arbitrary point.
    let g = potential_gradient(&b, &[0.1, -0.2, 0.0, 0.3], &[1.0, 1.0, 1.0, 1.0]);
    let shown: Vec<String> = g.iter().map(|v| format!("{v:.4}")).collect();
    println!("gradient at a test point: [{}]", shown.join(", "));

    // Column scaling in the l2 sense for tall matrices: rows end with
    // norm at most 1, columns with norm^2 at least k = m / n.
    let tall = vec![
        vec![1.0, 0.0],
        vec![1.0, 1.0],
        vec![0.0, 1.0],
        vec![1.0, 2.0],
    ];
    let result = l2_scale(&tall, 1e-8, 100_000).unwrap();
    println!("\n4x2 l2 scaling: eps = {:.2e} after {} sweeps", result.achieved_eps, result.iterations);
}
