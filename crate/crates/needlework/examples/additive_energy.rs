// The quadruple count Q(A, B) is the number of solutions to
// a + b = a' + b'; structured sets repeat sums and drive Q up. Its
// normalized form E = |A|^2 |B|^2 / Q then sits near the lower end of
// the sandwich max(|A|, |B|) <= E <= |A + B| for structured sets and
// near the sumset size for spread ones. Both bounds are recomputed
// here exactly.

use needlework::addcomb::{
    energy, find_good_lambda, growth_set, ratio, stab, AbelianSet, Group,
};

fn main() {
    let p = 31;
    let group = Group::Mod(p);

    // An arithmetic progression is the structured extreme.
    let ap = AbelianSet::from_scalars(group, &[1, 2, 3, 4, 5, 6]).unwrap();
    // Powers of 3 spread out under addition.
    let geo = AbelianSet::from_scalars(group, &[1, 3, 9, 27, 19, 26]).unwrap();

    for (label, a) in [("AP", &ap), ("geometric", &geo)] {
        let e = energy(a, a).unwrap();
        println!(
            "{label:>9}: |A| = {}, |A+A| = {}, Q = {}, E = {}",
            e.size_a, e.sumset_size, e.q, e.energy
        );
    }

    // Some dilation spreads every set: scanning lambda in F_p^* finds
    // one with 2 |A + lambda A| >= min(|A|^2, p), no matter how
    // structured A is.
    for (label, a) in [("AP", &ap), ("geometric", &geo)] {
        let lam = find_good_lambda(a).unwrap();
        println!(
            "{label:>9}: lambda = {} gives |A + lambda A| = {}, twice that covers min(|A|^2, p) = {}",
            lam.lambda, lam.size, lam.lower_bound_target
        );
    }

    // The stabilizer collects the dilations that do NOT spread A:
    // {lambda : |A + lambda A| <= K |A|}. For an AP with K = 2 only
    // lambda = 1 survives.
    let s = stab(&ap, &ratio(2, 1)).unwrap();
    println!("stab(AP, K=2) over F_{p}: {:?}", s.members);

    // Products then sums and differences blow a multiplicatively
    // structured set up to half the field or more.
    let g = growth_set(&geo).unwrap();
    println!(
        "growth(geometric): |3(A.A) - 3(A.A)| = {}, twice that covers {}",
        g.size, g.lower_bound_target
    );
}
