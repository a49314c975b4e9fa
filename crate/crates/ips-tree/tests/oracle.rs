#[path = "support/markov.rs"]
mod markov;

use ips_tree::{accepts, IpsVerifierSpec};
use markov::{best_strategy, decision_points, random_spec};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn hand_examples_match_the_oracle() {
    let texts = [
        "initial: s\ns read c d\nc comm0 a r\nd comm0 r a\na acc\nr rej\n",
        "initial: s\ns read c d\nc comm0 a r\nd comm1 r a\na acc\nr rej\n",
        "initial: s\ns read u c\nu read u\nc comm0 a a\na acc\n",
        "initial: p\np read q a\nq read p p\na acc\n",
        // The second question comes after the first answer; the answer to the
        // first decides which reply is safe, so it can be adaptive.
        "initial: c\nc comm0 s t\ns read d\nt read e\nd comm1 a r\ne comm1 r a\na acc\nr rej\n",
    ];
    for text in texts {
        let s = IpsVerifierSpec::parse(text).unwrap();
        assert!(s.communication_is_acyclic());
        assert_eq!(accepts(&s), best_strategy(&s).is_one(), "{text}");
    }
}

#[test]
fn random_specs_match_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1b5);
    let (mut checked, mut yes, mut nontrivial) = (0, 0, 0);
    while checked < 100 {
        let s = random_spec(&mut rng);
        if !s.communication_is_acyclic() || decision_points(&s).len() > 12 {
            continue;
        }
        let best = best_strategy(&s);
        let tree = accepts(&s);
        assert_eq!(tree, best.is_one(), "tree {tree}, oracle {best}\n{}", s.to_text());
        checked += 1;
        yes += usize::from(tree);
        nontrivial += usize::from(!best.is_zero() && !best.is_one());
    }
    assert!(yes >= 10 && checked - yes >= 10, "{yes} of {checked} accepted");
    println!("{checked} specs, {yes} accepted, {nontrivial} with probability strictly between 0 and 1");
    assert!(nontrivial >= 5, "{nontrivial}");
}
