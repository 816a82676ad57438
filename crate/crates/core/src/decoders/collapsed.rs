//! Collapsed projection-aggregation: one level of projections onto every
//! `(r-1)`-dimensional subspace.

use std::mem;

use crate::code::{fht_in_place, first_order_peak, write_first_order};
use crate::space::{enumerate_subspaces, quotient_map};

use super::aggregate::accumulate_coset;
use super::rules::Rule;
use super::{early_stop, Counters};
use crate::error::Result;

#[derive(Debug, Clone)]
pub(crate) struct CollapsedEngine {
    coset_size: usize,
    /// Coset members of every subspace, `n` entries per subspace, grouped
    /// by coset index.
    members: Vec<u16>,
    subspaces: usize,
    rule: Rule,
    max_iters: usize,
    theta: f64,
    clamp: f64,
    llr: Vec<f64>,
    next: Vec<f64>,
    projected: Vec<f64>,
    decided: Vec<u8>,
    bits: Vec<u8>,
}

pub(crate) struct Pass {
    pub iterations: usize,
    pub converged: bool,
}

impl CollapsedEngine {
    pub fn new(m: usize, r: usize, rule: Rule, max_iters: usize, theta: f64, clamp: f64) -> Result<Self> {
        let n = 1usize << m;
        let spaces = enumerate_subspaces(m, r - 1)?;
        let mut members = Vec::with_capacity(spaces.len() * n);
        for b in &spaces {
            members.extend(quotient_map(b).members().iter().map(|&z| z as u16));
        }
        let cosets = n >> (r - 1);
        Ok(Self {
            coset_size: 1 << (r - 1),
            members,
            subspaces: spaces.len(),
            rule,
            max_iters,
            theta,
            clamp,
            llr: vec![0.0; n],
            next: vec![0.0; n],
            projected: vec![0.0; cosets],
            decided: vec![0; cosets],
            bits: vec![0; n],
        })
    }

    pub fn run(&mut self, llr: &[f64], counters: &mut Counters) -> Pass {
        let n = self.llr.len();
        self.llr.copy_from_slice(llr);
        let mut used = 0;
        let mut converged = false;
        let mut values = [0.0f64; 64];
        for _ in 0..self.max_iters {
            self.next.fill(0.0);
            for table in self.members.chunks_exact(n) {
                for (out, coset) in self.projected.iter_mut().zip(table.chunks_exact(self.coset_size)) {
                    for (v, &z) in values.iter_mut().zip(coset) {
                        *v = self.llr[z as usize];
                    }
                    *out = self.rule.combine(&values[..self.coset_size], self.clamp);
                }
                counters.projection_ops += self.projected.len() as u64;
                fht_in_place(&mut self.projected);
                let (k, flip) = first_order_peak(&self.projected);
                write_first_order(k, flip, &mut self.decided);
                counters.first_order_decodes += 1;
                for (&y, coset) in self.decided.iter().zip(table.chunks_exact(self.coset_size)) {
                    let sign = 1.0 - 2.0 * y as f64;
                    accumulate_coset(&self.llr, coset, sign, self.rule, self.clamp, &mut self.next);
                }
            }
            let divisor = self.subspaces as f64;
            self.next.iter_mut().for_each(|v| *v /= divisor);
            used += 1;
            converged = early_stop(&self.llr, &self.next, self.theta);
            mem::swap(&mut self.llr, &mut self.next);
            if converged {
                break;
            }
        }
        for (bit, &l) in self.bits.iter_mut().zip(&self.llr) {
            *bit = (l < 0.0) as u8;
        }
        Pass {
            iterations: used,
            converged,
        }
    }

    pub fn decision(&self) -> &[u8] {
        &self.bits
    }
}
