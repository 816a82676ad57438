//! Binary vector-space algebra over `F_2^m`.
//!
//! Elements of `F_2^m` are plain integers in `[0, 2^m)`; coordinate `z_j` is
//! bit `j - 1` (so `z_1` is the least-significant bit). Subspaces are kept in
//! reduced row-echelon form with pivots in descending order, which makes the
//! basis a canonical key for the subspace.
//!
//! Besides enumeration and quotient maps this module carries the
//! combinatorial machinery behind the unique-projection schedule: the
//! canonical section of a one-dimensional quotient ([`lift`]), the subspace
//! induced by a chain of one-dimensional projections ([`induced_subspace`])
//! and an exhaustive verifier for the schedule ([`verify_unique_schedule`]).

use std::collections::HashSet;
use std::ops::RangeInclusive;

use smallvec::SmallVec;

use crate::error::{domain, Error, Result};

/// Largest ambient dimension supported by the enumerators.
pub const MAX_DIM: usize = 24;

/// Index of the highest set bit of a nonzero value.
#[inline]
pub fn high_bit(v: usize) -> usize {
    debug_assert!(v != 0);
    (usize::BITS - 1 - v.leading_zeros()) as usize
}

/// Inserts a zero at bit position `h` of `w`, shifting the higher bits up.
#[inline]
pub fn insert_zero_bit(w: usize, h: usize) -> usize {
    let low = w & ((1 << h) - 1);
    ((w >> h) << (h + 1)) | low
}

/// Deletes bit `h` of `z`, shifting the higher bits down.
#[inline]
pub fn delete_bit(z: usize, h: usize) -> usize {
    let low = z & ((1 << h) - 1);
    ((z >> (h + 1)) << h) | low
}

/// Coset index of `z` in the quotient by `{0, i}`.
///
/// The representative is the coset member whose bit `high_bit(i)` is clear;
/// the index is that representative with the bit removed.
#[inline]
pub fn coset_index_one_dim(z: usize, i: usize) -> usize {
    let h = high_bit(i);
    let rep = if (z >> h) & 1 == 1 { z ^ i } else { z };
    delete_bit(rep, h)
}

/// Canonical section of the quotient `F_2^m / {0, i}`: maps a coset index
/// `w` in `[0, 2^{m-1})` to its representative in `F_2^m`.
pub fn lift(w: usize, i: usize, m: usize) -> Result<usize> {
    if i == 0 {
        return domain("lift: subspace generator must be nonzero");
    }
    if m == 0 || m > MAX_DIM || i >= 1 << m {
        return domain(format!("lift: generator {i} is not an element of F_2^{m}"));
    }
    if w >= 1 << (m - 1) {
        return domain(format!("lift: coset index {w} out of range for F_2^{m}"));
    }
    Ok(insert_zero_bit(w, high_bit(i)))
}

/// Gaussian binomial coefficient `[m choose s]_2`, the number of
/// `s`-dimensional subspaces of `F_2^m`.
pub fn q_binomial(m: usize, s: usize) -> Result<u64> {
    if s > m {
        return domain(format!("q_binomial: s = {s} exceeds m = {m}"));
    }
    if m >= 127 {
        return Err(Error::Overflow(format!("q_binomial({m}, {s})")));
    }
    // [m, i+1] = [m, i] (2^{m-i} - 1) / (2^{i+1} - 1); each partial result is integral.
    let mut acc: u128 = 1;
    for i in 0..s {
        let num = (1u128 << (m - i)) - 1;
        let den = (1u128 << (i + 1)) - 1;
        acc = acc
            .checked_mul(num)
            .ok_or_else(|| Error::Overflow(format!("q_binomial({m}, {s})")))?;
        debug_assert_eq!(acc % den, 0);
        acc /= den;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("q_binomial({m}, {s})")))
}

/// Brings a list of vectors to reduced row-echelon form with descending
/// pivots. Dependent vectors are dropped.
fn rref<I: IntoIterator<Item = usize>>(vectors: I) -> SmallVec<[usize; 8]> {
    let mut basis: SmallVec<[usize; 8]> = SmallVec::new();
    for mut v in vectors {
        for &b in basis.iter() {
            if (v >> high_bit(b)) & 1 == 1 {
                v ^= b;
            }
        }
        if v == 0 {
            continue;
        }
        let p = high_bit(v);
        for b in basis.iter_mut() {
            if (*b >> p) & 1 == 1 {
                *b ^= v;
            }
        }
        basis.push(v);
    }
    basis.sort_unstable_by(|a, b| b.cmp(a));
    basis
}

/// A subspace of `F_2^m` in canonical (RREF) basis form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: SmallVec<[usize; 8]>,
}

impl Subspace {
    /// Span of `vectors` inside `F_2^m`. Fails when the span is `{0}`.
    pub fn span(ambient_dim: usize, vectors: &[usize]) -> Result<Self> {
        if ambient_dim == 0 || ambient_dim > MAX_DIM {
            return domain(format!("unsupported ambient dimension {ambient_dim}"));
        }
        if let Some(&v) = vectors.iter().find(|&&v| v >> ambient_dim != 0) {
            return domain(format!("{v} is not an element of F_2^{ambient_dim}"));
        }
        let basis = rref(vectors.iter().copied());
        if basis.is_empty() {
            return domain("the zero subspace is not supported");
        }
        Ok(Self { ambient_dim, basis })
    }

    /// One-dimensional subspace `{0, i}`.
    pub fn one_dim(ambient_dim: usize, i: usize) -> Result<Self> {
        if i == 0 {
            return domain("one-dimensional subspace needs a nonzero generator");
        }
        Self::span(ambient_dim, &[i])
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// RREF basis, highest pivot first.
    pub fn basis(&self) -> &[usize] {
        &self.basis
    }

    pub fn contains(&self, mut v: usize) -> bool {
        if v >> self.ambient_dim != 0 {
            return false;
        }
        for &b in &self.basis {
            if (v >> high_bit(b)) & 1 == 1 {
                v ^= b;
            }
        }
        v == 0
    }

    /// All `2^s` elements, in the order of the binary mask over the basis.
    pub fn elements(&self) -> Vec<usize> {
        let s = self.dim();
        (0..1usize << s)
            .map(|mask| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| (mask >> j) & 1 == 1)
                    .fold(0, |acc, (_, &b)| acc ^ b)
            })
            .collect()
    }
}

/// `B_1, ..., B_{2^m - 1}` with `B_i = {0, i}`.
pub fn enumerate_one_dim(m: usize) -> Result<Vec<Subspace>> {
    if m < 1 || m > MAX_DIM {
        return domain(format!("enumerate_one_dim: invalid dimension {m}"));
    }
    (1..1usize << m).map(|i| Subspace::one_dim(m, i)).collect()
}

/// Every `s`-dimensional subspace of `F_2^m`, sorted lexicographically by
/// RREF basis (highest-pivot vector first).
pub fn enumerate_subspaces(m: usize, s: usize) -> Result<Vec<Subspace>> {
    if m < 1 || m > MAX_DIM || s < 1 || s > m {
        return domain(format!("enumerate_subspaces: invalid dimensions ({m}, {s})"));
    }
    let expected = q_binomial(m, s)? as usize;
    let mut out = Vec::with_capacity(expected);
    let mut pivots = Vec::with_capacity(s);
    enumerate_pivots(m, s, m, &mut pivots, &mut out);
    out.sort_unstable_by(|a, b| a.basis.cmp(&b.basis));
    debug_assert_eq!(out.len(), expected);
    Ok(out)
}

fn enumerate_pivots(
    m: usize,
    s: usize,
    below: usize,
    pivots: &mut Vec<usize>,
    out: &mut Vec<Subspace>,
) {
    if pivots.len() == s {
        push_free_assignments(m, pivots, out);
        return;
    }
    let remaining = s - pivots.len();
    for p in (remaining - 1..below).rev() {
        pivots.push(p);
        enumerate_pivots(m, s, p, pivots, out);
        pivots.pop();
    }
}

fn push_free_assignments(m: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let pivot_mask: usize = pivots.iter().map(|&p| 1 << p).sum();
    // Free positions of each row: below its pivot and not a pivot column.
    let free: Vec<Vec<usize>> = pivots
        .iter()
        .map(|&p| (0..p).filter(|&q| (pivot_mask >> q) & 1 == 0).collect())
        .collect();
    let total: usize = free.iter().map(Vec::len).sum();
    for assignment in 0..1usize << total {
        let mut bits = assignment;
        let basis = pivots
            .iter()
            .zip(&free)
            .map(|(&p, positions)| {
                let mut v = 1 << p;
                for &q in positions {
                    v |= (bits & 1) << q;
                    bits >>= 1;
                }
                v
            })
            .collect();
        out.push(Subspace { ambient_dim: m, basis });
    }
}

/// The quotient `F_2^m / B` with cosets ranked by their minimum element.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    subspace: Subspace,
    coset_index_of: Vec<u32>,
    members: Vec<u32>,
}

impl QuotientMap {
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn coset_count(&self) -> usize {
        1 << (self.subspace.ambient_dim - self.subspace.dim())
    }

    pub fn coset_size(&self) -> usize {
        1 << self.subspace.dim()
    }

    /// Coset index of element `z`.
    #[inline]
    pub fn index_of(&self, z: usize) -> usize {
        self.coset_index_of[z] as usize
    }

    /// Members of coset `c`; the first member is the coset minimum.
    #[inline]
    pub fn coset(&self, c: usize) -> &[u32] {
        let size = self.coset_size();
        &self.members[c * size..(c + 1) * size]
    }

    /// All cosets concatenated in index order.
    pub fn members(&self) -> &[u32] {
        &self.members
    }
}

pub fn quotient_map(b: &Subspace) -> QuotientMap {
    let n = 1usize << b.ambient_dim;
    let elements = b.elements();
    let mut coset_index_of = vec![u32::MAX; n];
    let mut members = Vec::with_capacity(n);
    let mut next = 0u32;
    for z in 0..n {
        if coset_index_of[z] != u32::MAX {
            continue;
        }
        for &e in &elements {
            coset_index_of[z ^ e] = next;
            members.push((z ^ e) as u32);
        }
        next += 1;
    }
    QuotientMap {
        subspace: b.clone(),
        coset_index_of,
        members,
    }
}

/// Lifts a vector from the coordinates of recursion level `chain.len()` back
/// to the original space, where `chain` holds the one-dimensional generators
/// chosen at each earlier level.
fn lift_through(mut v: usize, chain: &[usize]) -> usize {
    for &i in chain.iter().rev() {
        v = insert_zero_bit(v, high_bit(i));
    }
    v
}

/// Subspace of the original `F_2^m` induced by a chain of one-dimensional
/// projections. Each entry is `(chosen generator, ambient dimension at that
/// level)`; the ambient dimension must drop by one per level.
pub fn induced_subspace(path: &[(usize, usize)]) -> Result<Subspace> {
    let Some(&(_, m)) = path.first() else {
        return domain("induced_subspace: empty path");
    };
    let mut chain = Vec::with_capacity(path.len());
    let mut generators = Vec::with_capacity(path.len());
    for (d, &(i, dim)) in path.iter().enumerate() {
        if dim + d != m {
            return domain(format!(
                "induced_subspace: level {d} has ambient dimension {dim}, expected {}",
                m - d
            ));
        }
        if i == 0 || dim == 0 || i >= 1 << dim {
            return domain(format!(
                "induced_subspace: index {i} invalid at level {d} (ambient dimension {dim})"
            ));
        }
        generators.push(lift_through(i, &chain));
        chain.push(i);
    }
    Subspace::span(m, &generators)
}

/// Projection indices visited by a unique-projection call on RM(m', r')
/// reached through branch number `b`: `[2^{floor(log2 b)}, 2^{m'-r'+2} - 1]`.
pub fn unique_projection_range(m: usize, r: usize, b: usize) -> Result<RangeInclusive<usize>> {
    if r < 2 || r > m || b == 0 {
        return domain(format!("unique range: invalid call RM({m},{r}) with b = {b}"));
    }
    let first = 1usize << high_bit(b);
    let last = (1usize << (m - r + 2)) - 1;
    if first > last {
        return domain(format!(
            "unique range: first projection {first} exceeds last {last} for RM({m},{r})"
        ));
    }
    Ok(first..=last)
}

/// One leaf of the projection tree.
#[derive(Debug, Clone)]
pub struct SchedulePath {
    pub levels: Vec<usize>,
    pub induced: Subspace,
}

/// Outcome of [`verify_unique_schedule`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleReport {
    pub m: usize,
    pub r: usize,
    pub leaf_count: u64,
    pub distinct_count: u64,
    /// Number of projections scheduled at each recursion level `d = 0..r-2`.
    pub per_level: Vec<u64>,
    pub complete: bool,
}

/// All leaf paths of the unique-projection schedule for RM(m, r).
pub fn unique_schedule_paths(m: usize, r: usize) -> Result<Vec<SchedulePath>> {
    check_tree_dims(m, r)?;
    let mut out = Vec::new();
    let mut chain = Vec::with_capacity(r - 1);
    let mut per_level = vec![0; r - 1];
    walk_unique(m, r, 1, &mut chain, &mut per_level, &mut |chain| {
        let path: Vec<(usize, usize)> = chain
            .iter()
            .enumerate()
            .map(|(d, &i)| (i, m - d))
            .collect();
        out.push(SchedulePath {
            levels: chain.to_vec(),
            induced: induced_subspace(&path).expect("schedule indices are valid"),
        });
    })?;
    Ok(out)
}

/// Walks every leaf of the unique-projection schedule and checks that the
/// induced `(r-1)`-dimensional subspaces are pairwise distinct and exhaust
/// all `[m choose r-1]_2` of them.
pub fn verify_unique_schedule(m: usize, r: usize) -> Result<ScheduleReport> {
    check_tree_dims(m, r)?;
    let mut seen: HashSet<SmallVec<[usize; 8]>> = HashSet::new();
    let mut leaf_count = 0u64;
    let mut chain = Vec::with_capacity(r - 1);
    let mut per_level = vec![0; r - 1];
    walk_unique(m, r, 1, &mut chain, &mut per_level, &mut |chain| {
        leaf_count += 1;
        seen.insert(induced_key(chain));
    })?;
    let distinct_count = seen.len() as u64;
    let target = q_binomial(m, r - 1)?;
    Ok(ScheduleReport {
        m,
        r,
        leaf_count,
        distinct_count,
        per_level,
        complete: leaf_count == target && distinct_count == target,
    })
}

/// Leaf and distinct-subspace counts of a projection tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeCensus {
    pub leaf_count: u64,
    pub distinct_count: u64,
}

/// Exhaustive census of the full (unpruned) recursive projection tree of
/// RM(m, r): every level projects onto all one-dimensional subspaces.
pub fn full_tree_census(m: usize, r: usize) -> Result<TreeCensus> {
    check_tree_dims(m, r)?;
    let mut seen: HashSet<SmallVec<[usize; 8]>> = HashSet::new();
    let mut leaf_count = 0u64;
    let mut chain = Vec::with_capacity(r - 1);
    walk_full(m, r - 1, &mut chain, &mut |chain| {
        leaf_count += 1;
        seen.insert(induced_key(chain));
    });
    Ok(TreeCensus {
        leaf_count,
        distinct_count: seen.len() as u64,
    })
}

fn check_tree_dims(m: usize, r: usize) -> Result<()> {
    if r < 2 || r > m || m > 16 {
        return domain(format!("projection tree: invalid code RM({m},{r})"));
    }
    Ok(())
}

fn induced_key(chain: &[usize]) -> SmallVec<[usize; 8]> {
    let mut lifted: SmallVec<[usize; 8]> = SmallVec::new();
    for d in 0..chain.len() {
        lifted.push(lift_through(chain[d], &chain[..d]));
    }
    rref(lifted)
}

fn walk_unique(
    m: usize,
    r: usize,
    b: usize,
    chain: &mut Vec<usize>,
    per_level: &mut [u64],
    leaf: &mut dyn FnMut(&[usize]),
) -> Result<()> {
    let range = unique_projection_range(m, r, b)?;
    per_level[chain.len()] += (range.end() - range.start() + 1) as u64;
    for i in range {
        chain.push(i);
        if r == 2 {
            leaf(chain);
        } else {
            walk_unique(m - 1, r - 1, i, chain, per_level, leaf)?;
        }
        chain.pop();
    }
    Ok(())
}

fn walk_full(m: usize, depth: usize, chain: &mut Vec<usize>, leaf: &mut dyn FnMut(&[usize])) {
    for i in 1..1usize << m {
        chain.push(i);
        if depth == 1 {
            leaf(chain);
        } else {
            walk_full(m - 1, depth - 1, chain, leaf);
        }
        chain.pop();
    }
}
