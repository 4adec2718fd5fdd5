// Builds small Kakeya sets over several prime fields and checks the
// size guarantee: a set containing a full line in every direction with
// roughly q^n / 2^(n-1) points instead of the trivial q^n.

use needlework::kakeya::{build_kakeya, KakeyaWitness};

fn main() {
    println!("{:>4} {:>3} {:>8} {:>12} {:>10}", "q", "n", "|K|", "q^n/2^(n-1)", "q^n");
    for &q in &[3u64, 5, 7, 11, 13] {
        for &n in &[2usize, 3] {
            let witness = build_kakeya(q, n).expect("odd prime, small n");
            assert!(witness.verify(), "witness must contain a line per direction");
            let stats = witness.size_stats();
            println!(
                "{:>4} {:>3} {:>8} {:>12.1} {:>10}",
                q,
                n,
                stats.size,
                stats.main_term,
                q.pow(n as u32)
            );
        }
    }

    // The witness serializes to a plain JSON object, so runs can be
    // archived and re-verified later without rebuilding.
    let witness = build_kakeya(5, 2).unwrap();
    let text = witness.to_json();
    let restored = KakeyaWitness::from_json(&text).expect("roundtrip");
    assert_eq!(witness, restored);
    println!("\njson roundtrip ok ({} bytes for q=5, n=2)", text.len());
}
