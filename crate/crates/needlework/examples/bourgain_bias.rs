// Character-sum bias of pairs of subsets of Z_3^n, computed in the ring
// Z[omega] of Eisenstein integers so the Parseval bound
//
//     |sum over A x B of omega^(x . y)|^2  <=  3^n * |A| * |B|
//
// is an exact integer comparison. The second half checks the tensoring
// trick: dilating both sets by 4 = 2^2 raises the bias to roughly the
// 16th power, so a bias strictly below 1 can be amplified downward.

use needlework::extract::{bias_certificate, foursum_bias_check};
use std::collections::BTreeSet;

fn set(points: &[[u64; 2]]) -> BTreeSet<Vec<u64>> {
    points.iter().map(|p| p.to_vec()).collect()
}

fn main() {
    let a = set(&[[0, 0], [1, 2], [2, 1]]);
    let b = set(&[[0, 1], [1, 1], [2, 0], [2, 2]]);

    let cert = bias_certificate(2, &a, &b, 1).unwrap();
    assert!(cert.holds());
    println!(
        "|A| = {}, |B| = {}: |S|^2 = {} <= {} = 3^2 |A| |B|",
        a.len(),
        b.len(),
        cert.magnitude_squared,
        cert.parseval_bound
    );
    println!("bias = {:.6}", cert.bias_value());

    let report = foursum_bias_check(2, &a, &b).unwrap();
    println!(
        "tensor check: bias(A, B) = {:.6} <= bias(4A, 4B)^(1/16) = {:.6}",
        report.lhs, report.rhs
    );
    assert!(report.lhs <= report.rhs + 1e-12);

    // A degenerate pair for contrast: supports on orthogonal axes make
    // every inner product zero, so the character sum has no
    // cancellation at all and the bias is exactly 1.
    let e2_axis = set(&[[0, 0], [0, 1], [0, 2]]);
    let e1_axis = set(&[[1, 0], [2, 0]]);
    let cert = bias_certificate(2, &e2_axis, &e1_axis, 1).unwrap();
    println!(
        "orthogonal supports: bias = {:.6} (Parseval still holds: {} <= {})",
        cert.bias_value(),
        cert.magnitude_squared,
        cert.parseval_bound
    );
}
