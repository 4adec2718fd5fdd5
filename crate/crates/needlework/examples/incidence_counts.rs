// Point-line incidence counting over the rationals, exact throughout.
// The staircase grid (points [1, M] x [1, 2M^2], lines y = ax + b with
// small integer slopes) achieves M^4 incidences, which is the standard
// witness that the elementary Cauchy-Schwarz counting bound
// I <= 2 m sqrt(k) + 2k cannot be improved by more than the
// Szemeredi-Trotter exponent.

use needlework::incidence::{
    count_incidences, cs_bound_holds, integer_grid, line_multiplicities, rich_lines, st_grid,
};

fn main() {
    println!("{:>3} {:>8} {:>8} {:>10}", "M", "points", "lines", "incidences");
    for m in 2..=4u64 {
        let (points, lines) = st_grid(m);
        let count = count_incidences(&points, &lines);
        assert_eq!(count, m.pow(4));
        assert!(cs_bound_holds(count, points.len() as u64, lines.len() as u64));
        assert!(cs_bound_holds(count, lines.len() as u64, points.len() as u64));
        println!("{:>3} {:>8} {:>8} {:>10}", m, points.len(), lines.len(), count);
    }

    // The 3 x 3 integer grid: every spanned line, and the ones hitting
    // at least 3 points (rows, columns, two diagonals).
    let grid = integer_grid(3);
    let spanned = line_multiplicities(&grid).unwrap();
    let rich = rich_lines(&grid, 3).unwrap();
    println!("\n3x3 grid: {} spanned lines, {} of them 3-rich", spanned.len(), rich.len());
    assert_eq!(spanned.len(), 20);
    assert_eq!(rich.len(), 8);

    let mut by_multiplicity = [0usize; 4];
    for &mult in spanned.values() {
        by_multiplicity[mult] += 1;
    }
    println!(
        "multiplicity histogram: {} lines through 2 points, {} through 3",
        by_multiplicity[2], by_multiplicity[3]
    );
}
