// Two exact counting experiments in low-dimensional geometry.
//
// Joints: the N^3 axis-parallel lines of an N x N x N grid meet in
// exactly N^3 points where three non-coplanar lines cross, matching
// the |L|^(3/2) ceiling up to the constant.
//
// Distances: for a planar point set P, the number of distinct squared
// distances is at least |P|^4 / Q(P), where Q(P) counts quadruples
// (a, b, c, d) with |ab| = |cd|. Structured sets keep Q large and the
// distance count small; generic sets do the opposite.

use needlework::incidence::{count_joints, distance_stats, joints_grid, Point2};
use num::{BigInt, BigRational};

fn rational_points(coords: &[(i64, i64, i64, i64)]) -> Vec<Point2> {
    coords
        .iter()
        .map(|&(xn, xd, yn, yd)| {
            Point2::new(
                BigRational::new(BigInt::from(xn), BigInt::from(xd)),
                BigRational::new(BigInt::from(yn), BigInt::from(yd)),
            )
        })
        .collect()
}

fn main() {
    for n in 2..=3u64 {
        let lines = joints_grid(n);
        let joints = count_joints(&lines).unwrap();
        assert_eq!(joints, n.pow(3));
        let l = lines.len() as u128;
        assert!((joints as u128).pow(2) <= l.pow(3));
        println!(
            "grid {n}: {} lines, {joints} joints, ceiling |L|^(3/2) = {:.1}",
            lines.len(),
            (l as f64).powf(1.5)
        );
    }

    // A 2x3 lattice rectangle repeats distances heavily.
    let lattice = rational_points(&[
        (0, 1, 0, 1), (1, 1, 0, 1), (2, 1, 0, 1),
        (0, 1, 1, 1), (1, 1, 1, 1), (2, 1, 1, 1),
    ]);
    // Same size, coordinates chosen to avoid repeated gaps.
    let generic = rational_points(&[
        (0, 1, 0, 1), (1, 3, 2, 1), (5, 2, 1, 7),
        (3, 1, 3, 4), (9, 5, 5, 1), (7, 4, 11, 6),
    ]);

    for (label, points) in [("lattice", &lattice), ("generic", &generic)] {
        let stats = distance_stats(points).unwrap();
        println!(
            "\n{label}: {} points, {} distinct squared distances",
            stats.n, stats.distinct_sq_distances
        );
        println!(
            "  quadruple count {} gives floor {} (nondegenerate form: {})",
            stats.q_full,
            stats.lower_bound_full.to_integer(),
            stats.lower_bound_pairs
        );
        let distinct = BigRational::from_integer(BigInt::from(stats.distinct_sq_distances));
        assert!(distinct >= stats.lower_bound_pairs);
    }
}
