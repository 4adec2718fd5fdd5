// Two uses of low-degree polynomials as counting certificates.
//
// First: a set containing a line in every direction cannot be cut out
// by a polynomial of degree below q, so the evaluation matrix of all
// low-degree monomials on the set has full column rank. The rank is a
// machine-checkable witness for the lower bound |K| >= C(n+q-1, n).
//
// Second: a nonzero polynomial of degree d vanishes on at most a
// d/q fraction of the space, checked here by exhaustive enumeration.

use needlework::field::Field;
use needlework::kakeya::{build_kakeya, certify_lower_bound};
use needlework::poly::{binomial, MultiPoly};

fn main() {
    for &(q, n) in &[(5u64, 2usize), (7, 2), (5, 3)] {
        let witness = build_kakeya(q, n).unwrap();
        let cert = certify_lower_bound(q, n, &witness.points).unwrap();
        let expected = binomial(n as u64 + q - 1, n as u64);
        assert_eq!(cert.rank as u64, expected);
        assert!(cert.meets_factorial_bound(q, n));
        println!(
            "q={q} n={n}: rank {} of {} monomials, so |K| >= {} (set has {})",
            cert.rank,
            cert.monomial_count,
            cert.implied_lower_bound,
            witness.points.len()
        );
    }

    // Zero counting. f = x0^2*x1 + 3*x1 + 1 over F_7 has total degree 3,
    // so it vanishes at no more than 3 * 7 = 21 of the 49 points.
    let field = Field::prime(7).unwrap();
    let f = MultiPoly::parse(&field, 2, "x0^2*x1 + 3*x1 + 1").unwrap();
    let zeros = f.count_zeros().unwrap();
    let degree = f.degree().expect("nonzero");
    let cap = degree as u64 * 7u64.pow(1);
    assert!(zeros <= cap);
    println!("\ndeg-{degree} polynomial over F_7^2: {zeros} zeros, bound {cap}");
}
