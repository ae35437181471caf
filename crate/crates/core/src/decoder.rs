//! Minimum-weight syndrome decoding for facet (2D) and block (3D) color
//! codes, single-shot preparation, merge measurement and the
//! split-then-decode pipeline.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::colex::{Color, Colex};
use crate::csscode::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::noise::{FaultSet, PrepCounters, PrepReport, StageLayout};
use crate::surgery::TetrahelixCode;

/// Largest check count decoded by a full lookup table.
pub const TABLE_MAX_CHECKS: usize = 20;
/// Weight limit of the exhaustive part of [`BoundedSearch`].
pub const SEARCH_MAX_WEIGHT: usize = 6;
/// Prefix budget per call of [`BoundedSearch`].
pub const SEARCH_BUDGET: u64 = 200_000;

fn lex_less(a: u128, b: u128) -> bool {
    let d = a ^ b;
    d != 0 && a & d & d.wrapping_neg() != 0
}

/// Lookup table of lexicographically smallest minimum-weight solutions of `H·e = s`.
#[derive(Clone, Debug)]
pub struct MinWeightTable {
    checks: usize,
    cols: usize,
    best: Vec<u128>,
    reached: Vec<bool>,
}

impl MinWeightTable {
    pub fn build(h: &BitMatrix) -> Result<MinWeightTable> {
        let (m, n) = (h.nrows(), h.ncols());
        if m > 24 || n > 128 {
            return Err(Error::CapExceeded(format!("lookup table for {m} checks and {n} columns exceeds the cap")));
        }
        let cols: Vec<usize> = (0..n).map(|j| (0..m).filter(|&i| h.get(i, j)).map(|i| 1usize << i).sum()).collect();
        let size = 1usize << m;
        let mut best = vec![0u128; size];
        let mut dist = vec![u8::MAX; size];
        dist[0] = 0;
        let mut frontier = vec![0usize];
        let mut w = 0u8;
        while !frontier.is_empty() {
            w += 1;
            let mut next = Vec::new();
            for &s in &frontier {
                let t = best[s];
                let start = if t == 0 { 0 } else { 128 - t.leading_zeros() as usize };
                for (j, &c) in cols.iter().enumerate().skip(start) {
                    let s2 = s ^ c;
                    let cand = t | (1u128 << j);
                    if dist[s2] == u8::MAX {
                        dist[s2] = w;
                        best[s2] = cand;
                        next.push(s2);
                    } else if dist[s2] == w && lex_less(cand, best[s2]) {
                        best[s2] = cand;
                    }
                }
            }
            frontier = next;
        }
        let reached = dist.iter().map(|&d| d != u8::MAX).collect();
        Ok(MinWeightTable { checks: m, cols: n, best, reached })
    }

    pub fn lookup(&self, syndrome: &BitVector) -> Option<BitVector> {
        if syndrome.len() != self.checks {
            return None;
        }
        let idx = syndrome.words().first().copied().unwrap_or(0) as usize;
        if !self.reached[idx] {
            return None;
        }
        let t = self.best[idx];
        Some(BitVector::from_indices(self.cols, (0..self.cols).filter(|&j| t >> j & 1 == 1)))
    }

    pub fn weight(&self, syndrome: &BitVector) -> usize {
        let idx = syndrome.words().first().copied().unwrap_or(0) as usize;
        if syndrome.len() != self.checks || !self.reached[idx] {
            return usize::MAX;
        }
        self.best[idx].count_ones() as usize
    }

    /// Number of syndromes with a solution.
    pub fn coverage(&self) -> usize {
        self.reached.iter().filter(|&&r| r).count()
    }
}

/// Lexicographic weight-ordered search over columns, limited in weight and
/// budget, with a greedy plus linear-solve fallback.
#[derive(Clone, Debug)]
pub struct BoundedSearch {
    h: BitMatrix,
    ht: BitMatrix,
    columns: Vec<Vec<u64>>,
    by_syndrome: HashMap<Vec<u64>, Vec<usize>>,
    check_cols: Vec<Vec<usize>>,
    max_weight: usize,
    budget: u64,
}

impl BoundedSearch {
    pub fn new(h: &BitMatrix, max_weight: usize, budget: u64) -> BoundedSearch {
        let ht = h.transpose();
        let columns: Vec<Vec<u64>> = ht.rows().iter().map(|r| r.words().to_vec()).collect();
        let mut by_syndrome: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for (j, c) in columns.iter().enumerate() {
            by_syndrome.entry(c.clone()).or_default().push(j);
        }
        let check_cols = h.rows().iter().map(|r| r.support()).collect();
        BoundedSearch { h: h.clone(), ht, columns, by_syndrome, check_cols, max_weight, budget }
    }

    pub fn decode(&self, syndrome: &BitVector) -> Option<BitVector> {
        let n = self.h.ncols();
        if syndrome.len() != self.h.nrows() {
            return None;
        }
        if syndrome.is_zero() {
            return Some(BitVector::zeros(n));
        }
        let mut cands: Vec<usize> = syndrome.iter_ones().flat_map(|i| self.check_cols[i].iter().copied()).collect();
        cands.sort_unstable();
        cands.dedup();
        let target = syndrome.words().to_vec();
        let mut budget = self.budget;
        for w in 1..=self.max_weight {
            let mut chosen = Vec::with_capacity(w);
            let mut acc = target.clone();
            match self.search(&cands, 0, w, &mut chosen, &mut acc, &mut budget) {
                Some(true) => return Some(BitVector::from_indices(n, chosen)),
                Some(false) => {}
                None => break,
            }
        }
        self.greedy(syndrome)
    }

    // Some(true): found; Some(false): exhausted; None: out of budget.
    fn search(
        &self,
        cands: &[usize],
        from: usize,
        left: usize,
        chosen: &mut Vec<usize>,
        acc: &mut Vec<u64>,
        budget: &mut u64,
    ) -> Option<bool> {
        let last = chosen.last().copied();
        if left == 1 {
            if let Some(js) = self.by_syndrome.get(acc.as_slice()) {
                if let Some(&j) = js.iter().find(|&&j| last.is_none_or(|l| j > l)) {
                    chosen.push(j);
                    return Some(true);
                }
            }
            return Some(false);
        }
        for (i, &j) in cands.iter().enumerate().skip(from) {
            if *budget == 0 {
                return None;
            }
            *budget -= 1;
            for (a, c) in acc.iter_mut().zip(&self.columns[j]) {
                *a ^= c;
            }
            chosen.push(j);
            let r = self.search(cands, i + 1, left - 1, chosen, acc, budget);
            if r == Some(true) {
                return r;
            }
            chosen.pop();
            for (a, c) in acc.iter_mut().zip(&self.columns[j]) {
                *a ^= c;
            }
            r?;
        }
        Some(false)
    }

    fn greedy(&self, syndrome: &BitVector) -> Option<BitVector> {
        let n = self.h.ncols();
        let ht = &self.ht;
        let mut s = syndrome.clone();
        let mut e = BitVector::zeros(n);
        loop {
            let mut best: Option<(i64, usize)> = None;
            for (j, col) in ht.rows().iter().enumerate() {
                let gain = 2 * s.and_weight(col) as i64 - col.weight() as i64;
                if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                    best = Some((gain, j));
                }
            }
            match best {
                Some((_, j)) => {
                    s.xor_assign(ht.row(j));
                    e.flip(j);
                }
                None => break,
            }
        }
        if !s.is_zero() {
            let rest = self.h.solve(&s).ok()??;
            e.xor_assign(&rest);
        }
        Some(e)
    }
}

/// Minimum-weight decoder of `H·e = s`, exact when it is a table.
#[derive(Clone, Debug)]
pub enum SyndromeDecoder {
    Table(MinWeightTable),
    Search(BoundedSearch),
}

impl SyndromeDecoder {
    pub fn new(h: &BitMatrix) -> SyndromeDecoder {
        if h.nrows() <= TABLE_MAX_CHECKS && h.ncols() <= 128 {
            SyndromeDecoder::Table(MinWeightTable::build(h).expect("within table caps"))
        } else {
            SyndromeDecoder::Search(BoundedSearch::new(h, SEARCH_MAX_WEIGHT, SEARCH_BUDGET))
        }
    }

    pub fn decode(&self, syndrome: &BitVector) -> Option<BitVector> {
        match self {
            SyndromeDecoder::Table(t) => t.lookup(syndrome),
            SyndromeDecoder::Search(s) => s.decode(syndrome),
        }
    }

    /// Weight of the decoded correction; `usize::MAX` when there is none.
    pub fn weight(&self, syndrome: &BitVector) -> usize {
        match self {
            SyndromeDecoder::Table(t) => t.weight(syndrome),
            SyndromeDecoder::Search(s) => s.decode(syndrome).map_or(usize::MAX, |e| e.weight()),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SyndromeDecoder::Table(_))
    }
}

/// The triangular code on one facet: the cells meeting the facet, restricted
/// to it, serve as both X and Z checks; the all-ones word is the logical.
#[derive(Clone, Debug)]
pub struct FacetCode {
    pub color: Color,
    /// Block-local vertex ids, in column order.
    pub vertices: Vec<usize>,
    /// Block-local cells meeting the facet, in check order.
    pub cells: Vec<usize>,
    pub checks: BitMatrix,
    pub logical: BitVector,
    /// The facet indicator within the block, an X logical of the block.
    pub lifted_logical: BitVector,
    /// Full cells within the block, one per check.
    pub lifted_cells: Vec<BitVector>,
    pub decoder: SyndromeDecoder,
}

impl FacetCode {
    pub fn new(colex: &Colex, color: Color) -> Result<FacetCode> {
        let facet = colex.facet(color).ok_or_else(|| Error::InvalidInput(format!("no facet missing color {color}")))?;
        let n = colex.num_vertices();
        let vertices = facet.vertices.clone();
        let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut cells = Vec::new();
        let mut rows = Vec::new();
        let mut lifted_cells = Vec::new();
        for (ci, cell) in colex.cells.iter().enumerate() {
            let trace: Vec<usize> = cell.vertices.iter().filter_map(|v| pos.get(v).copied()).collect();
            if trace.is_empty() {
                continue;
            }
            cells.push(ci);
            rows.push(BitVector::from_indices(vertices.len(), trace));
            lifted_cells.push(BitVector::from_indices(n, cell.vertices.iter().copied()));
        }
        let checks = BitMatrix::from_rows(vertices.len(), rows)?;
        if checks.rank() != checks.nrows() {
            return Err(Error::Invariant(format!("facet {color} checks are linearly dependent")));
        }
        let decoder = SyndromeDecoder::new(&checks);
        Ok(FacetCode {
            color,
            logical: BitVector::ones(vertices.len()),
            lifted_logical: BitVector::from_indices(n, vertices.iter().copied()),
            vertices,
            cells,
            checks,
            lifted_cells,
            decoder,
        })
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded2d {
    pub x: bool,
    pub correction: BitVector,
}

/// Decomposition `w_e + correction = Σ faces + x·L_2D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDecomposition {
    pub faces: BitVector,
    pub x: bool,
}

/// Measured pair word with its decomposition once decoded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeWord {
    pub w_e: BitVector,
    pub decomposition: Option<FacetDecomposition>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionPlan {
    pub correction: BitVector,
    pub logical_x_applied: bool,
}

/// Minimum-weight decoding of a pair word against the facet code.
pub fn decode_2d(facet: &FacetCode, w_e: &BitVector) -> Result<Decoded2d> {
    if w_e.len() != facet.size() {
        return Err(Error::Dimension(format!("pair word length {} differs from facet size {}", w_e.len(), facet.size())));
    }
    let syndrome = facet.checks.mul_vec(w_e);
    let correction =
        facet.decoder.decode(&syndrome).ok_or_else(|| Error::Invariant("facet syndrome has no solution".into()))?;
    let x = w_e.xor(&correction).dot(&facet.logical);
    Ok(Decoded2d { x, correction })
}

pub fn decompose_2d(facet: &FacetCode, w_e: &BitVector, decoded: &Decoded2d) -> Result<FacetDecomposition> {
    let mut target = w_e.xor(&decoded.correction);
    if decoded.x {
        target.xor_assign(&facet.logical);
    }
    let faces = facet
        .checks
        .transpose()
        .solve(&target)?
        .ok_or_else(|| Error::Invariant("corrected pair word is not a facet codeword".into()))?;
    Ok(FacetDecomposition { faces, x: decoded.x })
}

/// Maps each facet check to its full cell and `L_2D` to the facet indicator.
pub fn lift_2d_to_3d(facet: &FacetCode, d: &FacetDecomposition) -> Result<CorrectionPlan> {
    if d.faces.len() != facet.lifted_cells.len() {
        return Err(Error::Invariant("decomposition does not match the facet checks".into()));
    }
    let mut correction = BitVector::zeros(facet.lifted_logical.len());
    for i in d.faces.iter_ones() {
        correction.xor_assign(&facet.lifted_cells[i]);
    }
    if d.x {
        correction.xor_assign(&facet.lifted_logical);
    }
    Ok(CorrectionPlan { correction, logical_x_applied: d.x })
}

/// Logical X value of one block from its X-basis outcomes.
pub fn decode_tetrahedral(code: &CssCode, decoder: &SyndromeDecoder, outcomes: &BitVector) -> Result<bool> {
    if outcomes.len() != code.n {
        return Err(Error::Dimension(format!("outcome length {} differs from block size {}", outcomes.len(), code.n)));
    }
    let syndrome = code.hx.mul_vec(outcomes);
    let e = decoder.decode(&syndrome).ok_or_else(|| Error::Invariant("cell syndrome has no solution".into()))?;
    Ok(outcomes.xor(&e).dot(&code.logical_x))
}

/// Splits chain outcomes, decodes each block and multiplies the block values.
pub fn pipeline_decode(t: &TetrahelixCode, outcomes: &BitVector) -> Result<bool> {
    let split = t.split_frame(outcomes)?;
    let mut bit = false;
    for (o, code) in split.outcomes.iter().zip(&t.blocks) {
        bit ^= decode_tetrahedral(code, &t.block_decoder, o)?;
    }
    Ok(bit)
}

/// Joint minimum-weight decoder over data errors and syndrome-bit flips.
#[derive(Clone, Debug)]
pub struct PrepDecoder {
    n: usize,
    joint: SyndromeDecoder,
}

impl PrepDecoder {
    pub fn new(code: &CssCode) -> Result<PrepDecoder> {
        let m = code.hz.nrows();
        let rows = code
            .hz
            .rows()
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVector::from_indices(m, [i])))
            .collect();
        let joint = BitMatrix::from_rows(code.n + m, rows)?;
        Ok(PrepDecoder { n: code.n, joint: SyndromeDecoder::new(&joint) })
    }

    pub fn is_exact(&self) -> bool {
        self.joint.is_exact()
    }

    /// Data part of the minimum-weight explanation of a measured syndrome.
    pub fn correction(&self, syndrome: &BitVector) -> Result<BitVector> {
        let e = self.joint.decode(syndrome).ok_or_else(|| Error::Invariant("syndrome has no explanation".into()))?;
        Ok(e.slice(0, self.n))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepOutcome {
    pub syndrome: BitVector,
    pub correction: BitVector,
    pub residual: BitVector,
}

/// One noisy Z-syndrome round on a block carrying X error `x_error`, then
/// one correction step. The prepared state is WLOG the one with trivial
/// ideal syndrome, so everything is relative to zero.
pub fn prep_correct(code: &CssCode, dec: &PrepDecoder, x_error: &BitVector, flips: &BitVector) -> Result<PrepOutcome> {
    let syndrome = code.hz.mul_vec(x_error).xor(flips);
    let correction = dec.correction(&syndrome)?;
    let residual = x_error.xor(&correction);
    Ok(PrepOutcome { syndrome, correction, residual })
}

/// Single-block preparation of |+̄⟩ under i.i.d. faults.
///
/// Returns the applied correction (the frame), the residual X error and the
/// report. X stabilizers are never applied: |+⟩ inputs already fix them.
pub fn prepare_plus_single_shot(
    code: &CssCode,
    dec: &PrepDecoder,
    block_decoder: &SyndromeDecoder,
    model: &crate::noise::NoiseModel,
    seed: u64,
) -> Result<(BitVector, BitVector, PrepReport)> {
    let layout = StageLayout::new(code.n, code.hz.nrows(), 0, false);
    let faults = crate::noise::sample_iid_faults(model, &layout, seed);
    let s = layout.split(&faults)?;
    let out = prep_correct(code, dec, &s.prep_x, &s.syndrome_flips)?;
    let report = PrepReport {
        tetrahedral_noncorrectable: decode_tetrahedral(code, block_decoder, &out.residual)?,
        residual: out.residual.clone(),
        merge_noncorrectable: false,
    };
    Ok((out.correction, out.residual, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeOutcome {
    pub word: MergeWord,
    pub decoded: Decoded2d,
    /// Whether X̄ was applied to the left part of the chain.
    pub logical_fix: bool,
}

/// Pair measurement across junction `b` given the current chain X error and
/// the pair-outcome flips; decodes and reports whether X̄ is applied to the
/// left part. The ideal pair word is WLOG zero.
pub fn merge_measure(t: &TetrahelixCode, b: usize, x_error: &BitVector, flips: &BitVector) -> Result<MergeOutcome> {
    let j = t.junctions.get(b).ok_or_else(|| Error::InvalidInput(format!("no junction {b}")))?;
    let m = t.block_size;
    let mut w_e = flips.clone();
    for (i, (&v, &w)) in j.facet.vertices.iter().zip(&j.right_vertices).enumerate() {
        if x_error.get(b * m + v) ^ x_error.get((b + 1) * m + w) {
            w_e.flip(i);
        }
    }
    let decoded = decode_2d(&j.facet, &w_e)?;
    let decomposition = Some(decompose_2d(&j.facet, &w_e, &decoded)?);
    Ok(MergeOutcome { logical_fix: decoded.x, word: MergeWord { w_e, decomposition }, decoded })
}

/// Per-trial record for trace export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub faults: FaultSet,
    pub prep_syndromes: Vec<BitVector>,
    pub prep_corrections: Vec<BitVector>,
    pub merge_words: Vec<BitVector>,
    pub merge_bits: Vec<bool>,
    pub outcomes: BitVector,
    pub logical: bool,
    pub reports: Vec<PrepReport>,
}

impl TrialRecord {
    pub fn counters(&self) -> PrepCounters {
        PrepCounters {
            preparations: self.reports.len() as u64,
            tetrahedral_noncorrectable: self.reports.iter().filter(|r| r.tetrahedral_noncorrectable).count() as u64,
            merges: self.merge_bits.len() as u64,
            merge_noncorrectable: self.merge_bits.iter().filter(|&&b| b).count() as u64,
        }
    }
}

/// Prepare, merge, diagonal layer, measure and decode, for one chain.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub chain: TetrahelixCode,
    pub prep: PrepDecoder,
    pub layout: StageLayout,
}

impl Pipeline {
    pub fn new(chain: TetrahelixCode) -> Result<Pipeline> {
        let prep = PrepDecoder::new(&chain.blocks[0])?;
        let layout = StageLayout::new(
            chain.n(),
            chain.k * chain.blocks[0].hz.nrows(),
            chain.pair_row_count(),
            chain.k > 1,
        );
        Ok(Pipeline { chain, prep, layout })
    }

    /// Runs one trial; `logical` is the decoded bit, whose noiseless value is 0.
    pub fn run(&self, faults: &FaultSet) -> Result<TrialRecord> {
        let t = &self.chain;
        let m = t.block_size;
        let hz_rows = t.blocks[0].hz.nrows();
        let s = self.layout.split(faults)?;

        let mut x = BitVector::zeros(t.n());
        let mut prep_syndromes = Vec::with_capacity(t.k);
        let mut prep_corrections = Vec::with_capacity(t.k);
        let mut reports = Vec::with_capacity(t.k);
        for b in 0..t.k {
            let xe = t.block_slice(&s.prep_x, b);
            let flips = s.syndrome_flips.slice(b * hz_rows, hz_rows);
            let out = prep_correct(&t.blocks[b], &self.prep, &xe, &flips)?;
            for q in out.residual.iter_ones() {
                x.flip(b * m + q);
            }
            reports.push(PrepReport {
                tetrahedral_noncorrectable: decode_tetrahedral(&t.blocks[b], &t.block_decoder, &out.residual)?,
                residual: out.residual,
                merge_noncorrectable: false,
            });
            prep_syndromes.push(out.syndrome);
            prep_corrections.push(out.correction);
        }
        let mut z = s.prep_z.clone();
        x.xor_assign(&s.merge_x);
        z.xor_assign(&s.merge_z);

        let mut merge_words = Vec::new();
        let mut merge_bits = Vec::new();
        let mut offset = 0;
        for b in 0..t.k.saturating_sub(1) {
            let len = t.pairings[b].pairs.len();
            let out = merge_measure(t, b, &x, &s.pair_flips.slice(offset, len))?;
            offset += len;
            if out.logical_fix {
                for c in 0..=b {
                    for q in t.block_logicals[c].0.iter_ones() {
                        x.flip(c * m + q);
                    }
                }
                reports[b].merge_noncorrectable = true;
                reports[b + 1].merge_noncorrectable = true;
            }
            merge_bits.push(out.logical_fix);
            merge_words.push(out.word.w_e);
        }

        x.xor_assign(&s.diag_x);
        z.xor_assign(&s.diag_z);
        z.xor_assign(&crate::noise::twirl_through_diagonal(&x, &faults.twirl));
        let outcomes = z.xor(&s.final_flips);
        let logical = pipeline_decode(t, &outcomes)?;
        Ok(TrialRecord {
            faults: faults.clone(),
            prep_syndromes,
            prep_corrections,
            merge_words,
            merge_bits,
            outcomes,
            logical,
            reports,
        })
    }
}
