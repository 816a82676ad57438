//! Recursive projection-aggregation over one-dimensional subspaces, with
//! either the full projection set or the unique-projection schedule.

use std::mem;

use crate::code::{fht_in_place, first_order_peak, write_first_order};
use crate::space::high_bit;

use super::aggregate::accumulate_one_dim;
use super::rules::{project_one_dim, Rule};
use super::{early_stop, Counters};

/// Which one-dimensional subspaces a call projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Schedule {
    /// All `2^m - 1` of them.
    Full,
    /// `[2^{floor(log2 b)}, 2^{m-r+2} - 1]` for branch number `b`.
    Unique,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Params {
    pub schedule: Schedule,
    pub inner_iterations: bool,
    pub rule: Rule,
    pub max_iters: usize,
    pub theta: f64,
    pub clamp: f64,
}

/// Buffers owned by one recursion level; level `d` works on `2^{m-d}` values.
#[derive(Debug, Clone)]
struct Level {
    llr: Vec<f64>,
    next: Vec<f64>,
    bits: Vec<u8>,
}

#[derive(Debug, Clone)]
pub(crate) struct RecursiveEngine {
    m: usize,
    r: usize,
    params: Params,
    levels: Vec<Level>,
}

/// Result of the top-level loop.
pub(crate) struct Pass {
    pub iterations: usize,
    pub converged: bool,
}

impl RecursiveEngine {
    pub fn new(m: usize, r: usize, params: Params) -> Self {
        let levels = (0..r)
            .map(|d| {
                let n = 1usize << (m - d);
                Level {
                    llr: vec![0.0; n],
                    next: vec![0.0; n],
                    bits: vec![0; n],
                }
            })
            .collect();
        Self { m, r, params, levels }
    }

    /// Decodes `llr` starting from branch number `b`; the decision lands in
    /// the buffer returned by [`Self::decision`].
    pub fn run(&mut self, llr: &[f64], b: usize, counters: &mut Counters) -> Pass {
        self.levels[0].llr.copy_from_slice(llr);
        let (iterations, converged) =
            descend(&mut self.levels, self.m, self.r, b, true, &self.params, counters);
        Pass {
            iterations,
            converged,
        }
    }

    pub fn decision(&self) -> &[u8] {
        &self.levels[0].bits
    }
}

fn descend(
    levels: &mut [Level],
    m: usize,
    r: usize,
    b: usize,
    top: bool,
    p: &Params,
    counters: &mut Counters,
) -> (usize, bool) {
    let (cur, rest) = levels.split_first_mut().expect("one level per order");
    let n = 1usize << m;
    if r == 1 {
        // The projected input is scratch owned by the caller, so transform it in place.
        fht_in_place(&mut cur.llr);
        let (k, flip) = first_order_peak(&cur.llr);
        write_first_order(k, flip, &mut cur.bits);
        counters.first_order_decodes += 1;
        return (1, true);
    }

    let (first, last) = match p.schedule {
        Schedule::Full => (1, n - 1),
        Schedule::Unique => (1usize << high_bit(b), (1usize << (m - r + 2)) - 1),
    };
    debug_assert!(first <= last);
    let count = (last - first + 1) as f64;
    let iters = if top || p.inner_iterations { p.max_iters } else { 1 };

    let mut used = 0;
    let mut converged = false;
    for _ in 0..iters {
        cur.next.fill(0.0);
        for i in first..=last {
            let h = high_bit(i);
            project_one_dim(&cur.llr, i, h, &mut rest[0].llr, p.rule, p.clamp);
            counters.projection_ops += (n / 2) as u64;
            descend(rest, m - 1, r - 1, i, false, p, counters);
            accumulate_one_dim(&cur.llr, i, h, &rest[0].bits, &mut cur.next);
        }
        cur.next.iter_mut().for_each(|v| *v /= count);
        used += 1;
        converged = early_stop(&cur.llr, &cur.next, p.theta);
        mem::swap(&mut cur.llr, &mut cur.next);
        if converged {
            break;
        }
    }
    for (bit, &l) in cur.bits.iter_mut().zip(&cur.llr) {
        *bit = (l < 0.0) as u8;
    }
    (used, converged)
}
