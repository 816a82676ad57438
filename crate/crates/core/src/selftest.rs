//! Built-in consistency checks run by the `selftest` command.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::code::{fht_decode_first_order, RmCode};
use crate::decoders::{Rule, DEFAULT_CLAMP};
use crate::error::Result;
use crate::space::verify_unique_schedule;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Splits `values` into `parts` non-empty blocks at random.
pub fn random_partition<R: Rng>(values: &[f64], parts: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut shuffled = values.to_vec();
    shuffled.shuffle(rng);
    let mut blocks = vec![Vec::new(); parts];
    for (j, v) in shuffled.into_iter().enumerate() {
        let slot = if j < parts { j } else { rng.random_range(0..parts) };
        blocks[slot].push(v);
    }
    blocks
}

/// Combines each block, then combines the block results.
pub fn nested_combine(rule: Rule, blocks: &[Vec<f64>], clamp: f64) -> f64 {
    let inner: Vec<f64> = blocks.iter().map(|b| rule.combine(b, clamp)).collect();
    rule.combine(&inner, clamp)
}

/// Partition identity over `trials` random sets: relative error at most
/// `1e-9` for the exact rule and equality for min-sum. Returns the number of
/// failing trials per rule.
pub fn partition_identity_failures(trials: usize, seed: u64) -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exact_fail = 0;
    let mut minsum_fail = 0;
    for _ in 0..trials {
        let size = rng.random_range(1..=16);
        let values: Vec<f64> = (0..size).map(|_| rng.random_range(-10.0..10.0)).collect();
        let parts = rng.random_range(1..=size);
        let blocks = random_partition(&values, parts, &mut rng);

        let direct = Rule::ExactTanh.combine(&values, DEFAULT_CLAMP);
        let nested = nested_combine(Rule::ExactTanh, &blocks, DEFAULT_CLAMP);
        let scale = direct.abs().max(f64::MIN_POSITIVE);
        if (direct - nested).abs() > 1e-9 * scale {
            exact_fail += 1;
        }
        if Rule::MinSum.combine(&values, f64::INFINITY) != nested_combine(Rule::MinSum, &blocks, f64::INFINITY) {
            minsum_fail += 1;
        }
    }
    (exact_fail, minsum_fail)
}

fn fht_agreement(m: usize, trials: usize, seed: u64) -> Result<(usize, usize)> {
    let code = RmCode::new(m, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut agree, mut total) = (0, 0);
    for _ in 0..trials {
        let llr: Vec<f64> = (0..code.n()).map(|_| rng.random_range(-5.0..5.0)).collect();
        total += 1;
        if fht_decode_first_order(&llr)? == code.brute_force_ml(&llr)? {
            agree += 1;
        }
    }
    Ok((agree, total))
}

/// Runs the partition identity, FHT-vs-exhaustive ML for `m <= max_m`, and
/// the schedule verifier for all `2 <= r <= m <= max_m`.
pub fn run(max_m: usize) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (exact_fail, minsum_fail) = partition_identity_failures(1000, 1);
    checks.push(Check {
        name: "partition identity (tanh)".into(),
        passed: exact_fail == 0,
        detail: format!("{} / 1000 trials failed", exact_fail),
    });
    checks.push(Check {
        name: "partition identity (min-sum)".into(),
        passed: minsum_fail == 0,
        detail: format!("{} / 1000 trials failed", minsum_fail),
    });
    for m in 1..=max_m {
        let (agree, total) = fht_agreement(m, 200, m as u64)?;
        checks.push(Check {
            name: format!("FHT = exhaustive ML, RM({m},1)"),
            passed: agree == total,
            detail: format!("{agree}/{total} agree"),
        });
    }
    for m in 2..=max_m {
        for r in 2..=m {
            let rep = verify_unique_schedule(m, r)?;
            checks.push(Check {
                name: format!("unique schedule RM({m},{r})"),
                passed: rep.complete,
                detail: format!("{}/{} unique", rep.distinct_count, rep.leaf_count),
            });
        }
    }
    Ok(checks)
}
