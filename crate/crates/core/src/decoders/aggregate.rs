//! Aggregation of decoded projections back into a full-length LLR estimate.

use crate::error::{domain, Error, Result};
use crate::space::{coset_index_one_dim, quotient_map, Subspace};

use super::rules::{exact_from_product, Rule};

/// One-dimensional aggregation:
/// `Lhat(z) = (1/divisor) sum_i (1 - 2 y_i(z / B_i)) L(z xor i)`.
pub fn aggregate_rpa(llr: &[f64], decisions: &[(Subspace, Vec<u8>)], divisor: usize) -> Result<Vec<f64>> {
    if divisor != decisions.len() || divisor == 0 {
        return domain(format!(
            "aggregate_rpa: divisor {divisor} does not match {} decisions",
            decisions.len()
        ));
    }
    let n = llr.len();
    let mut out = vec![0.0; n];
    for (b, y) in decisions {
        if b.dim() != 1 || 1usize << b.ambient_dim() != n {
            return domain("aggregate_rpa: decisions must use one-dimensional subspaces of the input space");
        }
        if y.len() != n / 2 {
            return Err(Error::LengthMismatch {
                expected: n / 2,
                got: y.len(),
            });
        }
        let i = b.basis()[0];
        for (z, acc) in out.iter_mut().enumerate() {
            let sign = 1.0 - 2.0 * y[coset_index_one_dim(z, i)] as f64;
            *acc += sign * llr[z ^ i];
        }
    }
    let divisor = divisor as f64;
    out.iter_mut().for_each(|v| *v /= divisor);
    Ok(out)
}

/// Collapsed aggregation:
/// `Lhat(z) = (1/n_P) sum_i (-1)^{y_i(T_z)} p(L over T_z minus z)`.
pub fn aggregate_cpa(
    llr: &[f64],
    decisions: &[(Subspace, Vec<u8>)],
    rule: Rule,
    clamp: f64,
) -> Result<Vec<f64>> {
    if decisions.is_empty() {
        return domain("aggregate_cpa: no decisions");
    }
    let n = llr.len();
    let mut out = vec![0.0; n];
    let mut others = Vec::new();
    for (b, y) in decisions {
        if 1usize << b.ambient_dim() != n {
            return domain("aggregate_cpa: subspace does not match the input length");
        }
        let q = quotient_map(b);
        if y.len() != q.coset_count() {
            return Err(Error::LengthMismatch {
                expected: q.coset_count(),
                got: y.len(),
            });
        }
        for (z, acc) in out.iter_mut().enumerate() {
            let t = q.index_of(z);
            others.clear();
            others.extend(
                q.coset(t)
                    .iter()
                    .filter(|&&x| x as usize != z)
                    .map(|&x| llr[x as usize]),
            );
            let sign = 1.0 - 2.0 * y[t] as f64;
            *acc += sign * rule.combine(&others, clamp);
        }
    }
    let divisor = decisions.len() as f64;
    out.iter_mut().for_each(|v| *v /= divisor);
    Ok(out)
}

/// Accumulates one one-dimensional decision into `acc` (unscaled).
#[inline]
pub(crate) fn accumulate_one_dim(llr: &[f64], i: usize, h: usize, decided: &[u8], acc: &mut [f64]) {
    let low = 1usize << h;
    for hi in 0..(llr.len() / 2) >> h {
        let base_in = hi << (h + 1);
        let base_out = hi << h;
        for lo in 0..low {
            let z0 = base_in | lo;
            let z1 = z0 ^ i;
            // A decided 1 negates the partner's LLR.
            let flip = (decided[base_out | lo] as u64) << 63;
            acc[z0] += f64::from_bits(llr[z1].to_bits() ^ flip);
            acc[z1] += f64::from_bits(llr[z0].to_bits() ^ flip);
        }
    }
}

/// Accumulates the leave-one-out contributions of one coset into `acc`.
/// `sign` is `(-1)^{y(T)}` for the coset's decoded bit.
#[inline]
pub(crate) fn accumulate_coset(
    llr: &[f64],
    coset: &[u16],
    sign: f64,
    rule: Rule,
    clamp: f64,
    acc: &mut [f64],
) {
    match rule {
        Rule::MinSum => {
            let mut min1 = f64::INFINITY;
            let mut min2 = f64::INFINITY;
            let mut arg = 0;
            let mut negative = false;
            for (j, &z) in coset.iter().enumerate() {
                let x = llr[z as usize];
                let a = x.abs();
                negative ^= x < 0.0;
                if a < min1 {
                    min2 = min1;
                    min1 = a;
                    arg = j;
                } else if a < min2 {
                    min2 = a;
                }
            }
            for (j, &z) in coset.iter().enumerate() {
                let x = llr[z as usize];
                let mag = if j == arg { min2 } else { min1 };
                let neg = (negative ^ (x < 0.0)) as u64;
                acc[z as usize] += f64::from_bits((sign * mag).to_bits() ^ (neg << 63));
            }
        }
        Rule::ExactTanh => {
            let mut t = [0.0f64; 64];
            let size = coset.len();
            debug_assert!(size <= t.len());
            for (slot, &z) in t.iter_mut().zip(coset) {
                *slot = (llr[z as usize] / 2.0).tanh();
            }
            for (j, &z) in coset.iter().enumerate() {
                let prod: f64 = (0..size).filter(|&l| l != j).map(|l| t[l]).product();
                acc[z as usize] += sign * exact_from_product(prod, clamp);
            }
        }
    }
}
