//! Projection-count accounting for the recursive tree.

use crate::error::{domain, Error, Result};
use crate::space::q_binomial;

/// Total, unique and duplicate first-order projections after `r - 1`
/// levels of one-dimensional projection of RM(m, r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DuplicateCount {
    pub total: u64,
    pub unique: u64,
    pub duplicates: u64,
}

impl DuplicateCount {
    /// Fraction of leaves kept by the unique schedule, `unique / total`.
    pub fn kept_fraction(&self) -> f64 {
        self.unique as f64 / self.total as f64
    }

    /// `100 * duplicates / total`.
    pub fn reduction_percent(&self) -> f64 {
        100.0 * self.duplicates as f64 / self.total as f64
    }
}

pub fn duplicate_count(m: usize, r: usize) -> Result<DuplicateCount> {
    if r < 2 || r > m {
        return domain(format!("duplicate_count: invalid code RM({m},{r})"));
    }
    if m >= 63 {
        return Err(Error::Overflow(format!("duplicate_count({m}, {r})")));
    }
    let mut total: u64 = 1;
    for i in 0..r - 1 {
        total = total
            .checked_mul((1u64 << (m - i)) - 1)
            .ok_or_else(|| Error::Overflow(format!("duplicate_count({m}, {r})")))?;
    }
    let unique = q_binomial(m, r - 1)?;
    Ok(DuplicateCount {
        total,
        unique,
        duplicates: total - unique,
    })
}

/// Denominator `d` of the kept fraction `1/d = prod_{i=0}^{r-2} 1/(2^{i+1} - 1)`,
/// which does not depend on `m`.
pub fn kept_fraction_denominator(r: usize) -> Result<u64> {
    if r < 2 || r > 40 {
        return domain(format!("kept_fraction_denominator: invalid order {r}"));
    }
    Ok((0..r - 1).map(|i| (1u64 << (i + 1)) - 1).product())
}
