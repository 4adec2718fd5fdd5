// A merger takes a somewhere-random source and outputs a point on the
// line through the two source halves. The guarantee is distributional:
// even when an adversary correlates the second half with the first,
// the output lands in any adversary-chosen target set with probability
// at least 1 - 1/q whenever that set is a Nikodym set.
//
// Everything here is exact rational arithmetic over an enumerated
// domain, so the 1 - 1/q threshold is checked with zero tolerance.

use needlework::extract::{merger_distribution, min_entropy, AdversaryMap, Distribution};
use needlework::kakeya::{build_kakeya, nikodym_from_kakeya};
use num::{BigInt, BigRational};

fn uniform_on(q: u64, n: usize) -> Distribution {
    let domain: Vec<Vec<u64>> = (0..q.pow(n as u32))
        .map(|i| {
            let mut point = vec![0u64; n];
            let mut rest = i;
            for c in (0..n).rev() {
                point[c] = rest % q;
                rest /= q;
            }
            point
        })
        .collect();
    Distribution::uniform(domain).unwrap()
}

fn main() {
    // In dimension 3 the Nikodym set built from a Kakeya witness is a
    // proper subset, so the attack is nontrivial: the adversary aims
    // the merger at a set missing 16 of the 125 points.
    let (q, n) = (5u64, 3usize);
    let source = uniform_on(q, n);
    println!("source: uniform on F_{q}^{n}, min-entropy {:.3}", min_entropy(&source));

    let kakeya = build_kakeya(q, n).unwrap();
    let nikodym = nikodym_from_kakeya(&kakeya).unwrap();
    println!(
        "planted Nikodym set: {} of {} points",
        nikodym.points.len(),
        q.pow(n as u32)
    );

    let attack = AdversaryMap::nikodym_attack(&nikodym).unwrap();
    let merged = merger_distribution(q, n, &source, &attack).unwrap();
    let mass = merged.mass_on_exact(&nikodym.points).unwrap();
    let threshold = BigRational::new(BigInt::from(q - 1), BigInt::from(q));
    assert!(mass >= threshold, "merger guarantee failed: {mass} < {threshold}");
    println!("mass on planted set: {mass} (guarantee {threshold})");
    println!("merged min-entropy: {:.3}", min_entropy(&merged));

    // Against the identity adversary the merger output stays spread out.
    let identity = AdversaryMap::identity(q, n).unwrap();
    let baseline = merger_distribution(q, n, &source, &identity).unwrap();
    println!(
        "identity adversary: support {}, min-entropy {:.3}",
        baseline.len(),
        min_entropy(&baseline)
    );

    // In dimension 2 at this size the construction covers the whole
    // plane, so the planted mass is trivially 1; still an instance of
    // the guarantee, just the degenerate one.
    let source = uniform_on(5, 2);
    let nikodym = nikodym_from_kakeya(&build_kakeya(5, 2).unwrap()).unwrap();
    let attack = AdversaryMap::nikodym_attack(&nikodym).unwrap();
    let merged = merger_distribution(5, 2, &source, &attack).unwrap();
    println!(
        "\nq=5, n=2: planted {} of 25 points, mass {}",
        nikodym.points.len(),
        merged.mass_on_exact(&nikodym.points).unwrap()
    );
}
