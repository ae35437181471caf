//! Packed binary vectors and matrices over GF(2).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// Fixed-length bit vector packed into 64-bit words.
///
/// Bits beyond `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self { len, words: vec![u64::MAX; words_for(len)] };
        v.mask_tail();
        v
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    /// Parses a string of `0`/`1` characters.
    pub fn from_bitstring(s: &str) -> Result<Self, Error> {
        let mut v = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse(format!("invalid bit character {other:?} at position {i}")))
                }
            }
        }
        Ok(v)
    }

    pub fn to_bitstring(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    fn mask_tail(&mut self) {
        let r = self.len % WORD;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let m = 1u64 << (i % WORD);
        if b {
            self.words[i / WORD] |= m;
        } else {
            self.words[i / WORD] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch");
        BitVector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    /// Size of the common support.
    pub fn and_weight(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVector) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Indices of set bits in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut r = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            r.set(i, true);
        }
        for i in other.iter_ones() {
            r.set(self.len + i, true);
        }
        r
    }

    /// Bits at the given positions, in order.
    pub fn gather(&self, positions: &[usize]) -> BitVector {
        BitVector::from_indices(
            positions.len(),
            positions.iter().enumerate().filter(|(_, &p)| self.get(p)).map(|(i, _)| i),
        )
    }

    /// Sub-vector of `len` bits starting at `start`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        BitVector::from_indices(len, (0..len).filter(|&i| self.get(start + i)))
    }

    /// Ordering of sorted supports: the vector whose lowest differing bit is set comes first.
    pub fn support_lex_cmp(&self, other: &BitVector) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let d = a ^ b;
            if d != 0 {
                let bit = d & d.wrapping_neg();
                return if a & bit != 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bitstring())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVector::from_bitstring(&s).map_err(serde::de::Error::custom)
    }
}

/// Row-major binary matrix.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Reduced row echelon form with pivot columns in increasing order.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<BitVector>,
    pub pivots: Vec<usize>,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { cols, rows: vec![BitVector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { cols: n, rows: (0..n).map(|i| BitVector::from_indices(n, [i])).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Error> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("row of length {} in matrix with {cols} columns", r.len())));
        }
        Ok(Self { cols, rows })
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    /// `M·x`: one parity bit per row.
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        BitVector::from_indices(self.rows.len(), self.rows.iter().enumerate().filter(|(_, r)| r.dot(x)).map(|(i, _)| i))
    }

    /// `xᵀ·M`: XOR of the rows selected by `x`.
    pub fn combine_rows(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.rows.len(), "vector length mismatch");
        let mut acc = BitVector::zeros(self.cols);
        for i in x.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        acc
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// `self · otherᵀ`.
    pub fn mul_transpose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch");
        let rows = self
            .rows
            .iter()
            .map(|a| BitVector::from_indices(other.nrows(), other.rows.iter().enumerate().filter(|(_, b)| a.dot(b)).map(|(j, _)| j)))
            .collect();
        BitMatrix { cols: other.nrows(), rows }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Gauss-Jordan elimination, pivoting on the lowest available column.
    pub fn echelon(&self) -> Echelon {
        let mut rows: Vec<BitVector> = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else { continue };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        rows.truncate(r);
        Echelon { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Solves `M·x = b`; free variables are zero.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>, Error> {
        if b.len() != self.rows.len() {
            return Err(Error::Dimension(format!("right-hand side has length {}, matrix has {} rows", b.len(), self.rows.len())));
        }
        let aug: Vec<BitVector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut a = r.concat(&BitVector::zeros(1));
                a.set(self.cols, b.get(i));
                a
            })
            .collect();
        let ech = BitMatrix { cols: self.cols + 1, rows: aug }.echelon();
        if ech.pivots.last() == Some(&self.cols) {
            return Ok(None);
        }
        let mut x = BitVector::zeros(self.cols);
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            if row.get(self.cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of `{x : M·x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVector::zeros(self.cols);
                v.set(f, true);
                for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVector) -> bool {
        reduce_by(&self.echelon(), v).is_zero()
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "column mismatch");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BitMatrix { cols: self.cols, rows }
    }
}

/// Reduces `v` modulo the row space of an echelon form.
pub fn reduce_by(ech: &Echelon, v: &BitVector) -> BitVector {
    let mut r = v.clone();
    for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
        if r.get(p) {
            r.xor_assign(row);
        }
    }
    r
}

/// Outcome of a bounded minimum-weight search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CosetSearch {
    Found { weight: usize, witness: BitVector },
    /// No element of weight ≤ cap; the minimum is at least `lower_bound`.
    Exhausted { lower_bound: usize },
}

impl CosetSearch {
    pub fn weight(&self) -> Option<usize> {
        match self {
            CosetSearch::Found { weight, .. } => Some(*weight),
            CosetSearch::Exhausted { .. } => None,
        }
    }
}

fn binomial_sum_capped(n: usize, cap: usize, limit: f64) -> f64 {
    let mut total = 0.0;
    let mut term = 1.0;
    for w in 0..=cap.min(n) {
        total += term;
        if total > limit {
            return total;
        }
        term = term * (n - w) as f64 / (w + 1) as f64;
    }
    total
}

/// Minimum Hamming weight in `offset + span(generators)`, if it is at most `weight_cap`.
///
/// The witness is the minimum-weight element whose sorted support is
/// lexicographically smallest. Two exact strategies are used depending on
/// which is cheaper: enumerating the span, or enumerating weight-`w`
/// patterns against the parity checks of the span for `w = 0, 1, …`.
pub fn min_weight_in_coset(generators: &[BitVector], offset: &BitVector, weight_cap: usize) -> Result<CosetSearch, Error> {
    let n = offset.len();
    if let Some(g) = generators.iter().find(|g| g.len() != n) {
        return Err(Error::Dimension(format!("generator of length {} with offset of length {n}", g.len())));
    }
    let basis = BitMatrix { cols: n, rows: generators.to_vec() }.echelon();
    let dim = basis.rows.len();
    let span_cost = if dim >= 60 { f64::INFINITY } else { (1u64 << dim) as f64 };
    let pattern_cost = binomial_sum_capped(n, weight_cap, span_cost);
    if span_cost <= pattern_cost {
        Ok(search_span(&basis.rows, offset, weight_cap))
    } else {
        let checks = BitMatrix { cols: n, rows: basis.rows }.kernel_basis();
        Ok(search_patterns(&checks, offset, weight_cap))
    }
}

fn better(candidate: &BitVector, w: usize, best: &Option<(usize, BitVector)>) -> bool {
    match best {
        None => true,
        Some((bw, bv)) => w < *bw || (w == *bw && candidate.support_lex_cmp(bv) == Ordering::Less),
    }
}

fn search_span(basis: &[BitVector], offset: &BitVector, cap: usize) -> CosetSearch {
    let mut cur = offset.clone();
    let mut best: Option<(usize, BitVector)> = None;
    let total: u64 = 1u64 << basis.len();
    for i in 0..total {
        if i > 0 {
            // Gray code: flip the generator indexed by the lowest set bit of i.
            cur.xor_assign(&basis[i.trailing_zeros() as usize]);
        }
        let w = cur.weight();
        if w <= cap && better(&cur, w, &best) {
            best = Some((w, cur.clone()));
        }
    }
    match best {
        Some((weight, witness)) => CosetSearch::Found { weight, witness },
        None => CosetSearch::Exhausted { lower_bound: cap + 1 },
    }
}

fn search_patterns(checks: &[BitVector], offset: &BitVector, cap: usize) -> CosetSearch {
    let n = offset.len();
    let m = checks.len();
    let target = BitVector::from_indices(m, (0..m).filter(|&j| checks[j].dot(offset)));
    if m <= 128 {
        let to_u128 = |v: &BitVector| -> u128 { v.iter_ones().fold(0u128, |acc, i| acc | (1u128 << i)) };
        let cols: Vec<u128> = (0..n)
            .map(|i| (0..m).filter(|&j| checks[j].get(i)).fold(0u128, |acc, j| acc | (1u128 << j)))
            .collect();
        let t = to_u128(&target);
        for w in 0..=cap.min(n) {
            if let Some(supp) = first_combination(&cols, t, w) {
                return CosetSearch::Found { weight: w, witness: BitVector::from_indices(n, supp) };
            }
        }
    } else {
        let cols: Vec<BitVector> = (0..n).map(|i| BitVector::from_indices(m, (0..m).filter(|&j| checks[j].get(i)))).collect();
        for w in 0..=cap.min(n) {
            if let Some(supp) = first_combination_generic(&cols, &target, w) {
                return CosetSearch::Found { weight: w, witness: BitVector::from_indices(n, supp) };
            }
        }
    }
    CosetSearch::Exhausted { lower_bound: cap + 1 }
}

/// Lexicographically first `w`-subset of columns whose XOR equals `target`.
pub(crate) fn first_combination(cols: &[u128], target: u128, w: usize) -> Option<Vec<usize>> {
    let n = cols.len();
    if w == 0 {
        return (target == 0).then(Vec::new);
    }
    if w > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    let mut acc = vec![0u128; w + 1];
    for d in 0..w {
        acc[d + 1] = acc[d] ^ cols[idx[d]];
    }
    loop {
        if acc[w] == target {
            return Some(idx);
        }
        // advance to next combination in lexicographic order
        let mut d = w;
        loop {
            if d == 0 {
                return None;
            }
            d -= 1;
            if idx[d] < n - (w - d) {
                break;
            }
        }
        idx[d] += 1;
        acc[d + 1] = acc[d] ^ cols[idx[d]];
        for e in d + 1..w {
            idx[e] = idx[e - 1] + 1;
            acc[e + 1] = acc[e] ^ cols[idx[e]];
        }
    }
}

fn first_combination_generic(cols: &[BitVector], target: &BitVector, w: usize) -> Option<Vec<usize>> {
    let n = cols.len();
    if w == 0 {
        return target.is_zero().then(Vec::new);
    }
    if w > n {
        return None;
    }
    let mut idx: Vec<usize> = (0..w).collect();
    let zero = BitVector::zeros(target.len());
    let mut acc = vec![zero; w + 1];
    for d in 0..w {
        acc[d + 1] = acc[d].xor(&cols[idx[d]]);
    }
    loop {
        if &acc[w] == target {
            return Some(idx);
        }
        let mut d = w;
        loop {
            if d == 0 {
                return None;
            }
            d -= 1;
            if idx[d] < n - (w - d) {
                break;
            }
        }
        idx[d] += 1;
        acc[d + 1] = acc[d].xor(&cols[idx[d]]);
        for e in d + 1..w {
            idx[e] = idx[e - 1] + 1;
            acc[e + 1] = acc[e].xor(&cols[idx[e]]);
        }
    }
}
