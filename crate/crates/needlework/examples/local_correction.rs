// Local correction of Reed-Muller codewords: to recover one symbol,
// read the q - 1 other points of a random line through it and
// interpolate. A single corrupted position ruins exactly one of the
// q + 1 lines through the query, so the decoder succeeds with
// probability q / (q + 1), checked below three ways.

use needlework::field::Field;
use needlework::lcc::RMCode;
use needlework::poly::MultiPoly;
use needlework::report::derive_rng;
use rand::Rng;

fn main() {
    let field = Field::prime(5).unwrap();
    let code = RMCode::new(field.clone(), 2, 3).unwrap();
    let f = MultiPoly::parse(&field, 2, "2*x0^3 + x0*x1 + 4*x1^2 + 1").unwrap();
    let word = code.encode(&f).unwrap();
    println!("RM(q=5, m=2, e=3): length {}, {} lines per point", code.length(), code.directions().len());

    // No errors: every line through every position interpolates back
    // to the codeword symbol.
    let mut clean = 0u64;
    for i in 0..code.length() {
        for direction in code.directions().to_vec() {
            if code.correct_along(&word, i, &direction).unwrap() == word[i] {
                clean += 1;
            }
        }
    }
    let total = (code.length() * code.directions().len()) as u64;
    assert_eq!(clean, total);
    println!("zero errors: {clean}/{total} line decodings correct");

    // One error, full census over every error position, error value,
    // query position, and line choice.
    let (successes, trials) = code.single_error_exhaustive(&word).unwrap();
    assert!(successes * 6 >= trials * 5, "census fell below 5/6");
    println!(
        "one error census: {successes}/{trials} = {:.6} (floor 5/6 = {:.6})",
        successes as f64 / trials as f64,
        5.0 / 6.0
    );

    // Same experiment, sampled: corrupt a random other position and
    // decode along a random line.
    let mut rng = derive_rng(0, "example", "local-correction");
    let mut hits = 0u64;
    let samples = 200_000u64;
    let mut corrupted = word.clone();
    for _ in 0..samples {
        let query = rng.gen_range(0..code.length());
        let mut bad = rng.gen_range(0..code.length() - 1);
        if bad >= query {
            bad += 1;
        }
        let delta = field.element_at(rng.gen_range(1..5));
        corrupted[bad] = &word[bad] + &delta;
        if code.local_correct(&corrupted, query, &mut rng).unwrap() == word[query] {
            hits += 1;
        }
        corrupted[bad] = word[bad].clone();
    }
    println!("one error sampled: {:.4} over {samples} trials", hits as f64 / samples as f64);
}
