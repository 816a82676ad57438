//! Reed-Muller codes: construction, encoding, membership and first-order
//! decoding.
//!
//! Generator rows are monomial incidence vectors. Monomials are ordered by
//! degree, then lexicographically on their sorted variable sets; variable
//! `z_j` is bit `j - 1` of the coordinate index.

use crate::error::{domain, Error, Result};
use crate::space::{quotient_map, Subspace, MAX_DIM};

/// Exhaustive ML search is refused above `2^BRUTE_FORCE_MAX_K` codewords.
pub const BRUTE_FORCE_MAX_K: usize = 20;

/// Packed GF(2) row, least-significant bit of word 0 is coordinate 0.
type Row = Vec<u64>;

#[inline]
fn get_bit(row: &[u64], j: usize) -> bool {
    (row[j / 64] >> (j % 64)) & 1 == 1
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn pack(bits: &[u8]) -> Row {
    let mut row = vec![0u64; bits.len().div_ceil(64)];
    for (j, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            row[j / 64] |= 1 << (j % 64);
        }
    }
    row
}

fn unpack(row: &[u64], n: usize) -> Vec<u8> {
    (0..n).map(|j| get_bit(row, j) as u8).collect()
}

/// The code RM(m, r) of length `2^m`.
#[derive(Debug, Clone)]
pub struct RmCode {
    m: usize,
    r: usize,
    monomials: Vec<Vec<usize>>,
    rows: Vec<Row>,
    /// Echelon form of the generator: (pivot coordinate, row).
    echelon: Vec<(usize, Row)>,
}

/// Variable subsets of `{0..m}` of the given size, in lexicographic order.
fn subsets_of_size(m: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in start..m {
            cur.push(v);
            rec(v + 1, m, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, size, &mut Vec::new(), &mut out);
    out
}

impl RmCode {
    pub fn new(m: usize, r: usize) -> Result<Self> {
        if m < 1 || m > MAX_DIM.min(16) || r > m {
            return domain(format!("invalid Reed-Muller parameters RM({m},{r})"));
        }
        let n = 1usize << m;
        let monomials: Vec<Vec<usize>> = (0..=r).flat_map(|d| subsets_of_size(m, d)).collect();
        let rows: Vec<Row> = monomials
            .iter()
            .map(|vars| {
                let mask: usize = vars.iter().map(|&v| 1 << v).sum();
                let bits: Vec<u8> = (0..n).map(|z| (z & mask == mask) as u8).collect();
                pack(&bits)
            })
            .collect();

        let mut echelon: Vec<(usize, Row)> = Vec::with_capacity(rows.len());
        for row in &rows {
            let mut v = row.clone();
            for (p, e) in &echelon {
                if get_bit(&v, *p) {
                    xor_into(&mut v, e);
                }
            }
            let pivot = (0..n).find(|&j| get_bit(&v, j));
            match pivot {
                Some(p) => echelon.push((p, v)),
                None => unreachable!("monomial incidence vectors are independent"),
            }
        }

        Ok(Self {
            m,
            r,
            monomials,
            rows,
            echelon,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Blocklength `2^m`.
    pub fn n(&self) -> usize {
        1 << self.m
    }

    /// Dimension `sum_{i <= r} C(m, i)`.
    pub fn k(&self) -> usize {
        self.monomials.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// Zero-based variable indices of the monomial labelling each row.
    pub fn monomials(&self) -> &[Vec<usize>] {
        &self.monomials
    }

    /// Generator matrix as a `k x n` array of bits.
    pub fn generator(&self) -> Vec<Vec<u8>> {
        self.rows.iter().map(|r| unpack(r, self.n())).collect()
    }

    /// Row rank of the generator over GF(2).
    pub fn rank(&self) -> usize {
        self.echelon.len()
    }

    /// `c = u G` over GF(2).
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>> {
        if u.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: u.len(),
            });
        }
        let mut acc = vec![0u64; self.rows[0].len()];
        for (bit, row) in u.iter().zip(&self.rows) {
            if bit & 1 == 1 {
                xor_into(&mut acc, row);
            }
        }
        Ok(unpack(&acc, self.n()))
    }

    pub fn is_codeword(&self, c: &[u8]) -> Result<bool> {
        if c.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: c.len(),
            });
        }
        let mut v = pack(c);
        for (p, e) in &self.echelon {
            if get_bit(&v, *p) {
                xor_into(&mut v, e);
            }
        }
        Ok(v.iter().all(|&w| w == 0))
    }

    /// XOR-folds `c` over the cosets of `b`, indexed by coset minimum.
    pub fn project_codeword(&self, c: &[u8], b: &Subspace) -> Result<Vec<u8>> {
        if c.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: c.len(),
            });
        }
        if b.ambient_dim() != self.m {
            return domain(format!(
                "subspace lives in F_2^{}, code in F_2^{}",
                b.ambient_dim(),
                self.m
            ));
        }
        if b.dim() > self.r {
            return domain(format!(
                "projection onto a {}-dimensional subspace exceeds order r = {}",
                b.dim(),
                self.r
            ));
        }
        let q = quotient_map(b);
        Ok((0..q.coset_count())
            .map(|t| q.coset(t).iter().fold(0u8, |acc, &z| acc ^ c[z as usize]))
            .collect())
    }

    /// Maximum-likelihood codeword by exhaustive search over all `2^k`
    /// messages. Ties go to the numerically smallest message.
    pub fn brute_force_ml(&self, llr: &[f64]) -> Result<Vec<u8>> {
        let k = self.k();
        if k > BRUTE_FORCE_MAX_K {
            return Err(Error::TooLarge {
                k,
                limit: BRUTE_FORCE_MAX_K,
            });
        }
        if llr.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: llr.len(),
            });
        }
        let n = self.n();
        let mut best_u = 0usize;
        let mut best = f64::NEG_INFINITY;
        let mut word = vec![0u64; self.rows[0].len()];
        // Gray-code walk: message g(t) = t ^ (t >> 1) differs from g(t-1) in one bit.
        for t in 0..1usize << k {
            if t > 0 {
                xor_into(&mut word, &self.rows[t.trailing_zeros() as usize]);
            }
            let u = t ^ (t >> 1);
            let corr: f64 = (0..n)
                .map(|z| if get_bit(&word, z) { -llr[z] } else { llr[z] })
                .sum();
            if corr > best || (corr == best && u < best_u) {
                best = corr;
                best_u = u;
            }
        }
        let msg: Vec<u8> = (0..k).map(|j| ((best_u >> j) & 1) as u8).collect();
        self.encode(&msg)
    }
}

/// In-place Walsh-Hadamard transform: `w[k] = sum_z (-1)^{<k,z>} v[z]`.
pub fn fht_in_place(buf: &mut [f64]) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    if n >= 4 {
        // The first two stages fused; same operations in the same order.
        for q in buf.chunks_exact_mut(4) {
            let (s0, d0) = (q[0] + q[1], q[0] - q[1]);
            let (s1, d1) = (q[2] + q[3], q[2] - q[3]);
            q[0] = s0 + s1;
            q[1] = d0 + d1;
            q[2] = s0 - s1;
            q[3] = d0 - d1;
        }
        h = 4;
    }
    while h < n {
        for block in buf.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// First-order decision from a transformed buffer: the linear part `k*`
/// maximising `|W_k|` (smallest on ties) and whether the all-ones word is
/// added (`W_{k*} < 0`).
#[inline]
pub(crate) fn first_order_peak(spectrum: &[f64]) -> (usize, bool) {
    let mut best_k = 0;
    let mut best = spectrum[0].abs();
    for (k, w) in spectrum.iter().enumerate().skip(1) {
        if w.abs() > best {
            best = w.abs();
            best_k = k;
        }
    }
    (best_k, spectrum[best_k] < 0.0)
}

/// Writes the first-order codeword `<k, z> xor flip` into `out`.
#[inline]
pub(crate) fn write_first_order(k: usize, flip: bool, out: &mut [u8]) {
    for (z, c) in out.iter_mut().enumerate() {
        *c = ((k & z).count_ones() as u8 & 1) ^ flip as u8;
    }
}

/// Optimal soft-decision decoding of RM(m, 1) via the fast Hadamard
/// transform.
pub fn fht_decode_first_order(llr: &[f64]) -> Result<Vec<u8>> {
    if llr.is_empty() || !llr.len().is_power_of_two() {
        return domain(format!("FHT needs a power-of-two length, got {}", llr.len()));
    }
    let mut spectrum = llr.to_vec();
    fht_in_place(&mut spectrum);
    let (k, flip) = first_order_peak(&spectrum);
    let mut out = vec![0u8; llr.len()];
    write_first_order(k, flip, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn dimensions() {
        let c = RmCode::new(3, 1).unwrap();
        assert_eq!((c.k(), c.n()), (4, 8));
        let c = RmCode::new(7, 3).unwrap();
        assert_eq!((c.k(), c.n(), c.rate()), (64, 128, 0.5));
        let c = RmCode::new(8, 3).unwrap();
        assert_eq!((c.k(), c.n()), (93, 256));
        for m in 1..=8 {
            for r in 0..=m {
                let c = RmCode::new(m, r).unwrap();
                assert_eq!(c.k(), (0..=r).map(|i| binom(m, i)).sum::<usize>());
                assert_eq!(c.rank(), c.k());
            }
        }
        assert!(RmCode::new(3, 4).is_err());
        assert!(RmCode::new(0, 0).is_err());
    }

    #[test]
    fn monomial_rows() {
        let c = RmCode::new(3, 2).unwrap();
        assert_eq!(
            c.monomials(),
            &[vec![], vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]]
        );
        let g = c.generator();
        assert!(g[0].iter().all(|&b| b == 1));
        for (vars, row) in c.monomials().iter().zip(&g) {
            for (z, &bit) in row.iter().enumerate() {
                let eval = vars.iter().all(|&v| (z >> v) & 1 == 1) as u8;
                assert_eq!(bit, eval);
            }
        }
    }

    #[test]
    fn encode_examples() {
        let c = RmCode::new(3, 1).unwrap();
        assert_eq!(c.encode(&[0; 4]).unwrap(), vec![0; 8]);
        assert_eq!(c.encode(&[1, 0, 0, 0]).unwrap(), vec![1; 8]);
        assert_eq!(c.encode(&[0, 1, 0, 0]).unwrap(), vec![0, 1, 0, 1, 0, 1, 0, 1]);
        assert!(matches!(
            c.encode(&[0; 3]),
            Err(Error::LengthMismatch { expected: 4, got: 3 })
        ));
    }

    #[test]
    fn membership() {
        let c = RmCode::new(2, 1).unwrap();
        assert!(c.is_codeword(&[0; 4]).unwrap());
        for row in c.generator() {
            assert!(c.is_codeword(&row).unwrap());
        }
        // RM(2,1) is the even-weight code of length 4.
        for v in 0..16u8 {
            let bits: Vec<u8> = (0..4).map(|j| (v >> j) & 1).collect();
            let even = bits.iter().sum::<u8>() % 2 == 0;
            assert_eq!(c.is_codeword(&bits).unwrap(), even);
        }
        assert!(!c.is_codeword(&[1, 0, 0, 0]).unwrap());
        assert!(c.is_codeword(&[1, 0, 0]).is_err());
    }

    #[test]
    fn projection_examples() {
        let code = RmCode::new(4, 2).unwrap();
        let b = Subspace::one_dim(4, 5).unwrap();
        assert_eq!(code.project_codeword(&[0; 16], &b).unwrap(), vec![0; 8]);
        assert_eq!(code.project_codeword(&[1; 16], &b).unwrap(), vec![0; 8]);
        let b3 = Subspace::span(4, &[1, 2, 4]).unwrap();
        assert!(code.project_codeword(&[0; 16], &b3).is_err());
    }

    #[test]
    fn fht_examples() {
        assert_eq!(fht_decode_first_order(&[4.0; 4]).unwrap(), vec![0; 4]);
        assert_eq!(fht_decode_first_order(&[-4.0; 4]).unwrap(), vec![1; 4]);
        assert!(fht_decode_first_order(&[1.0; 3]).is_err());
        assert!(fht_decode_first_order(&[]).is_err());
    }

    #[test]
    fn fht_matches_brute_force_m3() {
        let code = RmCode::new(3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let llr: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert_eq!(
                fht_decode_first_order(&llr).unwrap(),
                code.brute_force_ml(&llr).unwrap()
            );
        }
    }

    #[test]
    fn brute_force_examples() {
        let code = RmCode::new(3, 2).unwrap();
        assert_eq!(code.brute_force_ml(&[0.0; 8]).unwrap(), vec![0; 8]);
        let c = code.encode(&[1, 0, 1, 1, 0, 0, 1]).unwrap();
        let llr: Vec<f64> = c.iter().map(|&b| 2.0 * (1.0 - 2.0 * b as f64)).collect();
        assert_eq!(code.brute_force_ml(&llr).unwrap(), c);
        let big = RmCode::new(6, 3).unwrap();
        assert!(matches!(big.brute_force_ml(&[0.0; 64]), Err(Error::TooLarge { .. })));
    }
}
