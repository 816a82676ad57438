//! Soft projection rules: the exact tanh rule and its min-sum approximation.

use crate::error::{Error, Result};
use crate::space::QuotientMap;

/// The atanh argument is kept inside `±ATANH_LIMIT`.
pub const ATANH_LIMIT: f64 = 1.0 - 1e-12;

/// Combining rule for LLRs over a coset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// `2 atanh(prod tanh(L/2))`.
    ExactTanh,
    /// `min |L| * prod sign(L)`, with `sign(0) = +1`.
    MinSum,
}

impl Rule {
    /// Combines a set of LLRs. The exact rule saturates at `clamp`.
    pub fn combine(self, values: &[f64], clamp: f64) -> f64 {
        match self {
            Rule::ExactTanh => {
                let prod = values.iter().map(|&x| (x / 2.0).tanh()).product();
                exact_from_product(prod, clamp)
            }
            Rule::MinSum => {
                let mut mag = f64::INFINITY;
                let mut negative = false;
                for &x in values {
                    mag = mag.min(x.abs());
                    negative ^= x < 0.0;
                }
                if negative {
                    -mag
                } else {
                    mag
                }
            }
        }
    }

    /// Two-input combine, the workhorse of one-dimensional projections.
    #[inline]
    pub fn combine_pair(self, a: f64, b: f64, clamp: f64) -> f64 {
        match self {
            Rule::ExactTanh => exact_from_product((a / 2.0).tanh() * (b / 2.0).tanh(), clamp),
            Rule::MinSum => {
                // Sign bit set iff exactly one input is strictly negative.
                let neg = ((a < 0.0) != (b < 0.0)) as u64;
                f64::from_bits(a.abs().min(b.abs()).to_bits() | (neg << 63))
            }
        }
    }
}

#[inline]
pub(crate) fn exact_from_product(prod: f64, clamp: f64) -> f64 {
    let v = 2.0 * prod.clamp(-ATANH_LIMIT, ATANH_LIMIT).atanh();
    v.clamp(-clamp, clamp)
}

fn check_len(llr: &[f64], q: &QuotientMap) -> Result<()> {
    let n = 1usize << q.subspace().ambient_dim();
    if llr.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: llr.len(),
        });
    }
    Ok(())
}

fn project_with(llr: &[f64], q: &QuotientMap, rule: Rule, clamp: f64) -> Result<Vec<f64>> {
    check_len(llr, q)?;
    let mut scratch = Vec::with_capacity(q.coset_size());
    Ok((0..q.coset_count())
        .map(|t| {
            scratch.clear();
            scratch.extend(q.coset(t).iter().map(|&z| llr[z as usize]));
            rule.combine(&scratch, clamp)
        })
        .collect())
}

/// Exact tanh-rule projection of `llr` onto the cosets of `q`.
pub fn project_exact(llr: &[f64], q: &QuotientMap, clamp: f64) -> Result<Vec<f64>> {
    project_with(llr, q, Rule::ExactTanh, clamp)
}

/// Min-sum projection of `llr` onto the cosets of `q`.
pub fn project_minsum(llr: &[f64], q: &QuotientMap) -> Result<Vec<f64>> {
    project_with(llr, q, Rule::MinSum, f64::INFINITY)
}

/// Projection onto `{0, i}` without building a quotient map. Output index
/// `w` holds the coset represented by `insert_zero_bit(w, high_bit(i))`.
#[inline]
pub(crate) fn project_one_dim(llr: &[f64], i: usize, h: usize, out: &mut [f64], rule: Rule, clamp: f64) {
    debug_assert_eq!(out.len(), llr.len() / 2);
    match rule {
        Rule::MinSum => pair_pass(llr, i, h, out, |a, b| Rule::MinSum.combine_pair(a, b, clamp)),
        Rule::ExactTanh => pair_pass(llr, i, h, out, |a, b| Rule::ExactTanh.combine_pair(a, b, clamp)),
    }
}

#[inline(always)]
fn pair_pass(llr: &[f64], i: usize, h: usize, out: &mut [f64], combine: impl Fn(f64, f64) -> f64) {
    let low = 1usize << h;
    for hi in 0..out.len() >> h {
        let base_in = hi << (h + 1);
        let base_out = hi << h;
        for lo in 0..low {
            let z0 = base_in | lo;
            out[base_out | lo] = combine(llr[z0], llr[z0 ^ i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{quotient_map, Subspace};
    use approx::assert_relative_eq;

    #[test]
    fn exact_pair_value() {
        // 2 atanh(tanh(1)^2) evaluated to 15 digits with an arbitrary-precision tool.
        let v = Rule::ExactTanh.combine_pair(2.0, 2.0, 40.0);
        assert_relative_eq!(v, 1.325_002_747_357_864, epsilon = 1e-12);
        assert_eq!(Rule::ExactTanh.combine(&[2.0, 0.0, -3.0], 40.0), 0.0);
        let a = 1.7;
        assert_relative_eq!(
            Rule::ExactTanh.combine_pair(a, -a, 40.0),
            -2.0 * ((a / 2.0).tanh().powi(2)).atanh(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn exact_saturates() {
        let v = Rule::ExactTanh.combine(&[200.0, 300.0], 40.0);
        assert!(v.is_finite() && v > 0.0 && v <= 40.0);
        assert!(Rule::ExactTanh.combine(&[200.0, 300.0], 5.0) <= 5.0);
    }

    #[test]
    fn minsum_values() {
        assert_eq!(Rule::MinSum.combine(&[2.0, -0.5], 40.0), -0.5);
        assert_eq!(Rule::MinSum.combine(&[1.0, 2.0, 3.0, 4.0], 40.0), 1.0);
        assert_eq!(Rule::MinSum.combine_pair(2.0, -0.5, 40.0), -0.5);
        assert_eq!(Rule::MinSum.combine_pair(0.0, -3.0, 40.0), -0.0);
        assert_eq!(Rule::MinSum.combine_pair(-1.0, -3.0, 40.0), 1.0);
    }

    #[test]
    fn quotient_projection_matches_one_dim_fast_path() {
        let llr: Vec<f64> = (0..16).map(|z| ((z * 7 % 11) as f64) - 5.3).collect();
        for i in 1..16 {
            let q = quotient_map(&Subspace::one_dim(4, i).unwrap());
            let reference = project_minsum(&llr, &q).unwrap();
            let mut fast = vec![0.0; 8];
            project_one_dim(&llr, i, crate::space::high_bit(i), &mut fast, Rule::MinSum, 40.0);
            assert_eq!(reference, fast);
            let reference = project_exact(&llr, &q, 40.0).unwrap();
            project_one_dim(&llr, i, crate::space::high_bit(i), &mut fast, Rule::ExactTanh, 40.0);
            assert_eq!(reference, fast);
        }
    }

    #[test]
    fn length_mismatch_is_reported() {
        let q = quotient_map(&Subspace::one_dim(3, 1).unwrap());
        assert!(matches!(
            project_minsum(&[1.0; 4], &q),
            Err(Error::LengthMismatch { expected: 8, got: 4 })
        ));
    }
}
