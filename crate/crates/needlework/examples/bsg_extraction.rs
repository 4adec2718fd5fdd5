// Constructive dense-subgraph extraction: given sets A, B and a graph
// of "good" pairs whose sums behave, the procedure keeps a popular
// difference, grows its neighborhood, and prunes low-degree vertices,
// ending with subsets A', B' that are large and whose full sumset
// A' + B' is provably small. Every threshold comparison is exact.

use needlework::addcomb::{bsg_extract, difference, ratio, AbelianSet, Group, PairGraph};

fn main() {
    // The model instance: an arithmetic progression of length 64 with
    // every pair marked good. The sumset of an AP barely grows, so the
    // extraction should keep essentially everything.
    let ap: Vec<i64> = (0..64).collect();
    let a = AbelianSet::from_scalars(Group::Integers, &ap).unwrap();
    let graph = PairGraph::complete(a.clone(), a.clone()).unwrap();

    let out = bsg_extract(&graph, &ratio(4, 1), &ratio(1, 20)).unwrap();
    println!(
        "AP instance: |A'| = {}, |B'| = {}, |A' + B'| = {}",
        out.a_prime.len(),
        out.b_prime.len(),
        out.sum_size
    );
    assert!(out.a_prime.len() >= 8);
    assert!(out.b_prime.len() >= 8);
    assert!(out.sum_size <= 8 * out.a_prime.len());
    println!("difference-set scale |P|^3 / N^2 = {:.1}, |A' - B'| = {}", out.popular_bound, out.diff_size);
    if let Some(c) = out.c_achieved {
        println!("achieved exponent c = {c:.3} in |A' - B'| = K^c |P|^3 / N^2");
    }

    // A generic random-looking set for contrast: the kept subsets are
    // smaller relative to the input and the sumset bound is weaker.
    let scattered: Vec<i64> = (0..64).map(|i| i * i * 7 + i).collect();
    let b = AbelianSet::from_scalars(Group::Integers, &scattered).unwrap();
    let diff = difference(&b, &b).unwrap();
    println!(
        "\nscattered instance: |B| = {}, |B - B| = {} (near-maximal spread)",
        b.len(),
        diff.len()
    );
    let graph = PairGraph::complete(b.clone(), b.clone()).unwrap();
    let out = bsg_extract(&graph, &ratio(130, 1), &ratio(1, 20)).unwrap();
    println!(
        "kept |A'| = {}, |B'| = {}, |A' + B'| = {}",
        out.a_prime.len(),
        out.b_prime.len(),
        out.sum_size
    );
}
