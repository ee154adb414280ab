//! Seeded random instance generators for property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::apcover::{APCoverInstance, APTriple};
use crate::presburger::Quantifier;
use crate::satred::{Cnf3, QbfInstance};

/// `clauses` clauses over `num_vars` variables; literals within a clause
/// use distinct variables when there are at least three.
pub fn random_cnf<R: Rng>(rng: &mut R, num_vars: usize, clauses: usize) -> Cnf3 {
    let vars: Vec<i32> = (1..=num_vars as i32).collect();
    let cls = (0..clauses)
        .map(|_| {
            let mut c = [0i32; 3];
            let picks: Vec<i32> = if num_vars >= 3 {
                vars.choose_multiple(rng, 3).copied().collect()
            } else {
                (0..3).map(|_| *vars.choose(rng).expect("at least one variable")).collect()
            };
            for (slot, v) in c.iter_mut().zip(picks) {
                *slot = if rng.gen_bool(0.5) { v } else { -v };
            }
            c
        })
        .collect();
    Cnf3::new(num_vars, cls).expect("literals are in range")
}

/// A `∀ ∃` formula: the first `outer` variables universal, the rest
/// existential.
pub fn random_qbf<R: Rng>(rng: &mut R, num_vars: usize, outer: usize, clauses: usize) -> QbfInstance {
    assert!(0 < outer && outer < num_vars, "both blocks need variables");
    let matrix = random_cnf(rng, num_vars, clauses);
    QbfInstance::new(
        vec![
            (Quantifier::Forall, (1..=outer).collect()),
            (Quantifier::Exists, (outer + 1..=num_vars).collect()),
        ],
        matrix,
    )
    .expect("blocks partition the variables")
}

/// A normalized instance: `1 <= mu <= nu <= max`, up to `k` progressions
/// with `2 <= g <= max`, `1 <= h, e <= max`.
pub fn random_apcover<R: Rng>(rng: &mut R, k: usize, max: i64) -> APCoverInstance {
    let mu = rng.gen_range(1..=max);
    let nu = rng.gen_range(mu..=max);
    let n = rng.gen_range(1..=k);
    let triples = (0..n)
        .map(|_| {
            APTriple::new(rng.gen_range(2..=max), rng.gen_range(1..=max), rng.gen_range(1..=max))
                .expect("parameters are in range")
        })
        .collect();
    APCoverInstance::new(mu, nu, triples).expect("mu <= nu")
}
