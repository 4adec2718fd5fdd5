// Sylvester-Gallai configurations and the rank method.
//
// A delta-SG configuration has, for every point, collinear triples
// through at least a delta fraction of the other points. Over the
// rationals such configurations force low dimension; the mechanism is
// a design matrix built from the collinearity relations whose rank is
// bounded below by n - (qtn/2k)^2 for any (q, k, t)-design structure.

use needlework::incidence::Point2;
use needlework::sgdesign::{
    check_sg, design_from_config, ordinary_lines, rank_lower_bound, Configuration,
};
use num::{BigInt, BigRational};

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn main() {
    // All of F_3^2 minus proportional duplicates: every pair of
    // directions spans a third, so the configuration is 1-SG.
    let config = Configuration::finite(3, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![1, 2]]).unwrap();
    let report = check_sg(&config, &int(1)).unwrap();
    assert!(report.is_sg);
    println!(
        "F_3^2 directions: 1-SG over {} points, per-point coverage {:?}",
        report.n, report.covered
    );

    let design = design_from_config(&config).unwrap();
    let (q, k, t) = design.params();
    let rank = design.exact_rank().unwrap();
    let floor = design.rank_floor();
    println!(
        "design matrix {}x{}: ({q}, {k}, {t})-design, rank {rank} >= floor {floor}",
        design.m(),
        design.n()
    );
    assert!(int(rank as i64) >= floor);
    println!(
        "generic floor n - (qtn/2k)^2 = {} (vacuous at this scale, so the floor clamps to 0)",
        rank_lower_bound(q, k, t, report.n).unwrap()
    );

    // Rational configurations that are NOT SG have ordinary lines:
    // lines through exactly two points. The 3x3 grid has plenty.
    let grid: Vec<Point2> = (0..3)
        .flat_map(|x| (0..3).map(move |y| Point2::from_ints(x, y)))
        .collect();
    let ordinary = ordinary_lines(&grid).unwrap();
    println!("\n3x3 rational grid: {} ordinary lines", ordinary.len());
    assert!(!ordinary.is_empty());

    // A collinear set is the degenerate 1-SG extreme: one line carries
    // everything, the design matrix collapses to rank about n - 2.
    let collinear = Configuration::rational(
        (0..6).map(|i| vec![int(i), int(2 * i + 1)]).collect(),
    )
    .unwrap();
    let report = check_sg(&collinear, &int(1)).unwrap();
    let design = design_from_config(&collinear).unwrap();
    println!(
        "collinear 6-point set: is_sg = {}, design rank {}",
        report.is_sg,
        design.exact_rank().unwrap()
    );
}
