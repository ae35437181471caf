//! Lattice-surgery merges of tetrahedral codes into tetrahelix chains.
//!
//! Block `i` of a chain is joined to block `i + 1` along the facet missing
//! color `i mod 4` of both blocks. Consecutive joining facets of a block are
//! different, hence share a boundary edge, and a cell near a corner of the
//! chain can be fused across up to four consecutive blocks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::colex::{validate_colex, Color, Colex};
use crate::csscode::{CodeFile, CssCode, TPartition};
use crate::decoder::{FacetCode, SyndromeDecoder};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Vertex correspondence between the joining facets of two consecutive blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pairing {
    pub block_left: usize,
    pub block_right: usize,
    pub facet_left: Color,
    pub facet_right: Color,
    /// Block-local vertex ids `(left, right)`, ordered by the left vertex.
    pub pairs: Vec<(usize, usize)>,
}

/// Cells identified across merges; members are `(block, cell)` sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FusionClass {
    pub members: Vec<(usize, usize)>,
}

impl FusionClass {
    pub fn span(&self) -> usize {
        self.members.len()
    }
}

/// Facet-level data of one junction, used to split final outcomes.
#[derive(Clone, Debug)]
pub struct Junction {
    /// The left block's joining facet; its vertex order is the pair order.
    pub facet: FacetCode,
    pub right_vertices: Vec<usize>,
    /// For each facet check, the matching cell of the right block.
    pub right_cells: Vec<usize>,
}

/// A chain of `k` tetrahedral blocks joined by lattice surgery.
#[derive(Clone, Debug)]
pub struct TetrahelixCode {
    pub k: usize,
    pub l: usize,
    pub colexes: Vec<Colex>,
    pub blocks: Vec<CssCode>,
    pub block_size: usize,
    pub pairings: Vec<Pairing>,
    pub fused_cells: Vec<FusionClass>,
    pub code: CssCode,
    /// Block-local `(X̄_i, Z̄_i)`.
    pub block_logicals: Vec<(BitVector, BitVector)>,
    pub junctions: Vec<Junction>,
    /// Minimum-weight decoder of the shared block X checks.
    pub block_decoder: SyndromeDecoder,
}

/// Returns a copy of the colex to be glued as a reflection, together with
/// the vertex bijection. A reflection in the joining facet fixes that facet
/// pointwise and preserves every cell color, so the copy is combinatorially
/// identical and the bijection is the identity.
pub fn mirror(c: &Colex) -> (Colex, Vec<usize>) {
    (c.clone(), (0..c.num_vertices()).collect())
}

/// Largest number of placements of odd fusion classes searched exhaustively by `split_frame`.
pub const SPLIT_EXHAUSTIVE_LIMIT: usize = 4096;

fn junction_facet(b: usize) -> Color {
    (b % 4) as Color
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Joins `a` and `b` along the facet missing `facet` in `a`, mapping it by `phi`.
pub fn merge(a: (&CssCode, &Colex), b: (&CssCode, &Colex), facet: Color, phi: &[usize]) -> Result<TetrahelixCode> {
    if phi.len() != a.1.num_vertices() {
        return Err(Error::InvalidInput("bijection length differs from the vertex count".into()));
    }
    let fa = a.1.facet(facet).ok_or_else(|| Error::InvalidInput(format!("no facet {facet}")))?;
    let mut image: Vec<usize> = fa.vertices.iter().map(|&v| phi[v]).collect();
    image.sort();
    let fb = b
        .1
        .facets
        .iter()
        .find(|f| f.vertices == image)
        .ok_or_else(|| Error::InvalidInput("bijection does not map the facet onto a facet of the second block".into()))?;
    let pairs = fa.vertices.iter().map(|&v| (v, phi[v])).collect();
    let pairing = Pairing { block_left: 0, block_right: 1, facet_left: facet, facet_right: fb.missing_color, pairs };
    assemble(vec![(a.0.clone(), a.1.clone()), (b.0.clone(), b.1.clone())], vec![pairing])
}

/// Builds the chain of `k` blocks of edge length `l`.
pub fn build_tetrahelix(k: usize, l: usize) -> Result<TetrahelixCode> {
    if k == 0 {
        return Err(Error::InvalidInput("chain length must be at least 1".into()));
    }
    let colex = crate::colex::build_tetrahedral_colex(l)?;
    let code = CssCode::from_colex(&colex)?;
    let mut blocks = vec![(code.clone(), colex.clone())];
    let mut pairings = Vec::new();
    for b in 0..k.saturating_sub(1) {
        let (mirror_colex, phi) = mirror(&colex);
        let f = junction_facet(b);
        let facet = colex.facet(f).expect("built colex has four facets");
        pairings.push(Pairing {
            block_left: b,
            block_right: b + 1,
            facet_left: f,
            facet_right: f,
            pairs: facet.vertices.iter().map(|&v| (v, phi[v])).collect(),
        });
        blocks.push((code.clone(), mirror_colex));
    }
    assemble(blocks, pairings)
}

fn cell_vectors(c: &Colex) -> Vec<BitVector> {
    let n = c.num_vertices();
    c.cells.iter().map(|x| BitVector::from_indices(n, x.vertices.iter().copied())).collect()
}

fn assemble(blocks: Vec<(CssCode, Colex)>, pairings: Vec<Pairing>) -> Result<TetrahelixCode> {
    let k = blocks.len();
    let m = blocks[0].0.n;
    let l = blocks[0].1.l;
    for (code, colex) in &blocks {
        if code.hx != blocks[0].0.hx || colex.num_vertices() != m || colex.cells.len() != blocks[0].1.cells.len() {
            return Err(Error::InvalidInput("blocks are not structurally identical".into()));
        }
        if !validate_colex(colex).passed() {
            return Err(Error::InvalidInput("block colex fails validation".into()));
        }
    }
    let ncell = blocks[0].1.cells.len();
    let total = k * m;
    let cells: Vec<Vec<BitVector>> = blocks.iter().map(|(_, c)| cell_vectors(c)).collect();

    let mut uf = UnionFind((0..k * ncell).collect());
    let mut junctions = Vec::new();
    for p in &pairings {
        let (lb, rb) = (p.block_left, p.block_right);
        if rb != lb + 1 || rb >= k {
            return Err(Error::InvalidInput("pairings must join consecutive blocks".into()));
        }
        let mut pairs = p.pairs.clone();
        pairs.sort();
        let facet = FacetCode::new(&blocks[lb].1, p.facet_left)?;
        let left: Vec<usize> = pairs.iter().map(|&(v, _)| v).collect();
        if left != facet.vertices {
            return Err(Error::InvalidInput(format!("pairing {lb} does not cover facet {} of block {lb}", p.facet_left)));
        }
        let right_vertices: Vec<usize> = pairs.iter().map(|&(_, w)| w).collect();
        let mut right_sorted = right_vertices.clone();
        right_sorted.sort();
        match blocks[rb].1.facet(p.facet_right) {
            Some(f) if f.vertices == right_sorted => {}
            _ => return Err(Error::InvalidInput(format!("pairing {lb} does not cover facet {} of block {rb}", p.facet_right))),
        }
        let right_pos: BTreeMap<usize, usize> = right_vertices.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let mut right_trace: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for (ci, cell) in blocks[rb].1.cells.iter().enumerate() {
            let mut tr: Vec<usize> = cell.vertices.iter().filter_map(|w| right_pos.get(w).copied()).collect();
            if !tr.is_empty() {
                tr.sort();
                right_trace.insert(tr, ci);
            }
        }
        let mut right_cells = Vec::new();
        for (row, &ci) in facet.checks.rows().iter().zip(&facet.cells) {
            let Some(&rc) = right_trace.get(&row.support()) else {
                return Err(Error::InvalidInput(format!("cell {ci} of block {lb} has no partner across the junction")));
            };
            if blocks[lb].1.cells[ci].color != blocks[rb].1.cells[rc].color {
                return Err(Error::InvalidInput(format!("fused cells {ci}/{rc} differ in color")));
            }
            uf.union(lb * ncell + ci, rb * ncell + rc);
            right_cells.push(rc);
        }
        if right_cells.len() != right_trace.len() {
            return Err(Error::InvalidInput(format!("junction {lb} leaves right-block cells unpaired")));
        }
        junctions.push(Junction { facet, right_vertices, right_cells });
    }

    let mut classes: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for b in 0..k {
        for c in 0..ncell {
            let r = uf.find(b * ncell + c);
            classes.entry(r).or_default().push((b, c));
        }
    }
    let fused_cells: Vec<FusionClass> = classes.into_values().map(|members| FusionClass { members }).collect();

    let shift = |v: &BitVector, b: usize| -> BitVector { BitVector::from_indices(total, v.iter_ones().map(|i| b * m + i)) };
    let mut hx_rows = Vec::new();
    let mut hx_labels = Vec::new();
    for (i, class) in fused_cells.iter().enumerate() {
        let mut row = BitVector::zeros(total);
        for &(b, c) in &class.members {
            row.xor_assign(&shift(&cells[b][c], b));
        }
        hx_rows.push(row);
        let names: Vec<String> = class.members.iter().map(|(b, c)| format!("b{b}c{c}")).collect();
        hx_labels.push(format!("class{i}:{}", names.join("+")));
    }
    let mut hz_rows = Vec::new();
    let mut hz_labels = Vec::new();
    for (b, (code, _)) in blocks.iter().enumerate() {
        for (r, lab) in code.hz.rows().iter().zip(&code.hz_labels) {
            hz_rows.push(shift(r, b));
            hz_labels.push(format!("b{b}:{lab}"));
        }
    }
    for p in &pairings {
        for &(v, w) in &p.pairs {
            hz_rows.push(BitVector::from_indices(total, [p.block_left * m + v, p.block_right * m + w]));
            hz_labels.push(format!("pair{}:{v}-{w}", p.block_left));
        }
    }

    let block_logicals: Vec<(BitVector, BitVector)> =
        blocks.iter().map(|(c, _)| (c.logical_x.clone(), c.logical_z.clone())).collect();
    for p in &pairings {
        let (xl, xr) = (&block_logicals[p.block_left].0, &block_logicals[p.block_right].0);
        if p.pairs.iter().any(|&(v, w)| xl.get(v) != xr.get(w)) {
            return Err(Error::InvalidInput("block X logicals meet the junction in different subsets".into()));
        }
    }
    let mut lx = BitVector::zeros(total);
    for (b, (x, _)) in block_logicals.iter().enumerate() {
        lx.xor_assign(&shift(x, b));
    }
    let lz = shift(&block_logicals[0].1, 0);
    let code = CssCode::new(
        BitMatrix::from_rows(total, hx_rows)?,
        hx_labels,
        BitMatrix::from_rows(total, hz_rows)?,
        hz_labels,
        Some(lx),
        Some(lz),
    )?;
    let block_decoder = SyndromeDecoder::new(&blocks[0].0.hx);
    let (codes, colexes): (Vec<CssCode>, Vec<Colex>) = blocks.into_iter().unzip();
    Ok(TetrahelixCode {
        k,
        l,
        colexes,
        blocks: codes,
        block_size: m,
        pairings,
        fused_cells,
        code,
        block_logicals,
        junctions,
        block_decoder,
    })
}

/// Per-block view of final outcomes after the software split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitResult {
    pub outcomes: Vec<BitVector>,
    /// Per-block cell values, `true` meaning −1.
    pub stabilizers: Vec<BitVector>,
    /// Outcome bits flipped by the chosen pair-operator frame.
    pub frame: BitVector,
}

impl TetrahelixCode {
    pub fn n(&self) -> usize {
        self.code.n
    }

    /// Chain-length indicator of the qubits of block `b`.
    pub fn block_mask(&self, b: usize) -> BitVector {
        BitVector::from_indices(self.n(), (0..self.block_size).map(|i| b * self.block_size + i))
    }

    pub fn block_slice(&self, v: &BitVector, b: usize) -> BitVector {
        v.slice(b * self.block_size, self.block_size)
    }

    /// Largest number of blocks spanned by one fused X check.
    pub fn max_fusion_span(&self) -> usize {
        self.fused_cells.iter().map(FusionClass::span).max().unwrap_or(0)
    }

    pub fn pair_row_count(&self) -> usize {
        self.pairings.iter().map(|p| p.pairs.len()).sum()
    }

    /// Repeats a block sign pattern on every block of the chain.
    pub fn lift_partition(&self, p: &TPartition) -> Result<TPartition> {
        if p.v_plus.len() + p.v_minus.len() != self.block_size {
            return Err(Error::Dimension(format!("partition covers {} qubits, blocks have {}", p.v_plus.len() + p.v_minus.len(), self.block_size)));
        }
        let spread = |v: &[usize]| -> Vec<usize> {
            let mut out: Vec<usize> = (0..self.k).flat_map(|b| v.iter().map(move |&q| b * self.block_size + q)).collect();
            out.sort_unstable();
            out
        };
        Ok(TPartition { v_plus: spread(&p.v_plus), v_minus: spread(&p.v_minus), induced_logical: p.induced_logical })
    }

    /// Splits final X outcomes into per-block words by applying a product of
    /// pair operators `Z(σ)⊗Z(φ(σ))` to the outcomes.
    ///
    /// Only the product of a fusion class's member values is fixed by the
    /// chain; the frame chooses the individual values. The number of −1
    /// block cells is minimized: even classes become all +1 and each odd
    /// class keeps a single −1. Which member carries it is chosen to minimize
    /// the summed minimum-weight block decodings, exhaustively when there are
    /// few combinations and by coordinate descent otherwise, visiting summit
    /// classes first, then edge classes, then the rest. The resulting
    /// junction targets are realized by minimum-weight facet patterns `σ`.
    pub fn split_frame(&self, outcomes: &BitVector) -> Result<SplitResult> {
        if outcomes.len() != self.n() {
            return Err(Error::Dimension(format!("outcome length {} differs from n = {}", outcomes.len(), self.n())));
        }
        let m = self.block_size;
        let values: Vec<BitVector> =
            (0..self.k).map(|b| self.blocks[b].hx.mul_vec(&self.block_slice(outcomes, b))).collect();
        let mut order: Vec<&FusionClass> = self.fused_cells.iter().filter(|c| c.span() > 1).collect();
        order.sort_by_key(|c| (std::cmp::Reverse(c.span().min(4)), c.members[0]));

        let mut assigned = values.clone();
        let mut odd = Vec::new();
        for class in &order {
            let mut parity = false;
            for &(b, c) in &class.members {
                parity ^= values[b].get(c);
                assigned[b].set(c, false);
            }
            if parity {
                odd.push(*class);
            }
        }
        let choice = self.place_odd_classes(&mut assigned, &odd);
        for (class, &i) in odd.iter().zip(&choice) {
            let (b, c) = class.members[i];
            assigned[b].set(c, true);
        }

        let check_index: Vec<BTreeMap<usize, usize>> =
            self.junctions.iter().map(|j| j.facet.cells.iter().enumerate().map(|(i, &c)| (c, i)).collect()).collect();
        let mut targets: Vec<BitVector> = self.junctions.iter().map(|j| BitVector::zeros(j.facet.cells.len())).collect();
        for class in &order {
            let mut carry = false;
            for w in class.members.windows(2) {
                let (lb, lc) = w[0];
                carry ^= values[lb].get(lc) ^ assigned[lb].get(lc);
                if carry {
                    targets[lb].flip(check_index[lb][&lc]);
                }
            }
        }

        let mut frame = BitVector::zeros(self.n());
        for (b, j) in self.junctions.iter().enumerate() {
            if targets[b].is_zero() {
                continue;
            }
            let sigma = j
                .facet
                .decoder
                .decode(&targets[b])
                .ok_or_else(|| Error::Invariant(format!("junction {b} targets have no facet preimage")))?;
            for pos in sigma.iter_ones() {
                frame.flip(b * m + j.facet.vertices[pos]);
                frame.flip((b + 1) * m + j.right_vertices[pos]);
            }
        }
        let framed = outcomes.xor(&frame);
        let outs: Vec<BitVector> = (0..self.k).map(|b| self.block_slice(&framed, b)).collect();
        let stabilizers = outs.iter().zip(&self.blocks).map(|(o, c)| c.hx.mul_vec(o)).collect();
        Ok(SplitResult { outcomes: outs, stabilizers, frame })
    }

    /// Picks, for each odd fusion class, the member carrying its −1 so that
    /// the summed block decoding weight is smallest; ties go to the earliest
    /// choice in class order, lowest block first. `syndromes` holds the
    /// per-block values with every fused member at +1 and is restored.
    fn place_odd_classes(&self, syndromes: &mut [BitVector], odd: &[&FusionClass]) -> Vec<usize> {
        let mut choice = vec![0; odd.len()];
        if odd.is_empty() {
            return choice;
        }
        let combos = odd.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.span()));
        if combos.is_some_and(|c| c <= SPLIT_EXHAUSTIVE_LIMIT) {
            let mut best = (usize::MAX, choice.clone());
            self.place_all(syndromes, odd, 0, &mut choice, &mut best);
            return best.1;
        }
        for (class, &i) in odd.iter().zip(&choice) {
            let (b, c) = class.members[i];
            syndromes[b].flip(c);
        }
        let mut current = self.total_weight(syndromes);
        for _ in 0..3 {
            let mut changed = false;
            for (ci, class) in odd.iter().enumerate() {
                let (b0, c0) = class.members[choice[ci]];
                syndromes[b0].flip(c0);
                let mut best = (current, choice[ci]);
                for (i, &(b, c)) in class.members.iter().enumerate() {
                    syndromes[b].flip(c);
                    let w = self.total_weight(syndromes);
                    syndromes[b].flip(c);
                    if w < best.0 {
                        best = (w, i);
                    }
                }
                let (b, c) = class.members[best.1];
                syndromes[b].flip(c);
                changed |= best.1 != choice[ci];
                choice[ci] = best.1;
                current = best.0;
            }
            if !changed {
                break;
            }
        }
        for (class, &i) in odd.iter().zip(&choice) {
            let (b, c) = class.members[i];
            syndromes[b].flip(c);
        }
        choice
    }

    fn place_all(
        &self,
        syndromes: &mut [BitVector],
        odd: &[&FusionClass],
        depth: usize,
        choice: &mut Vec<usize>,
        best: &mut (usize, Vec<usize>),
    ) {
        if depth == odd.len() {
            let w = self.total_weight(syndromes);
            if w < best.0 {
                *best = (w, choice.clone());
            }
            return;
        }
        for (i, &(b, c)) in odd[depth].members.iter().enumerate() {
            choice[depth] = i;
            syndromes[b].flip(c);
            self.place_all(syndromes, odd, depth + 1, choice, best);
            syndromes[b].flip(c);
        }
    }

    fn total_weight(&self, syndromes: &[BitVector]) -> usize {
        syndromes.iter().map(|s| self.block_decoder.weight(s)).fold(0usize, usize::saturating_add)
    }

    pub fn to_file(&self) -> ChainFile {
        ChainFile {
            k: self.k,
            l: self.l,
            junction_facets: self.pairings.iter().map(|p| (p.facet_left, p.facet_right)).collect(),
            colex: self.colexes[0].clone(),
            pairings: self.pairings.clone(),
            fusion_classes: self.fused_cells.clone(),
            block_code: self.blocks[0].to_file(),
            code: self.code.to_file(),
        }
    }

    /// Rebuilds a chain from its file, checking the stored code against the rebuilt one.
    pub fn from_file(f: ChainFile) -> Result<TetrahelixCode> {
        let block = CssCode::from_file(f.block_code)?;
        if block.n != f.colex.num_vertices() {
            return Err(Error::Parse("block code and colex sizes differ".into()));
        }
        let blocks = (0..f.k).map(|_| (block.clone(), f.colex.clone())).collect();
        let t = assemble(blocks, f.pairings)?;
        let stored = CssCode::from_file(f.code)?;
        if stored.hx != t.code.hx || stored.hz != t.code.hz {
            return Err(Error::Parse("stored chain checks differ from the rebuilt chain".into()));
        }
        if f.fusion_classes != t.fused_cells {
            return Err(Error::Parse("stored fusion classes differ from the rebuilt chain".into()));
        }
        Ok(t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<TetrahelixCode> {
        let f: ChainFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("chain file: {e}")))?;
        TetrahelixCode::from_file(f)
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn import(path: &Path) -> Result<TetrahelixCode> {
        TetrahelixCode::from_json(&std::fs::read_to_string(path)?)
    }
}

/// On-disk form of a chain. Junction `i` joins blocks `i` and `i + 1` along
/// the facets listed in `junction_facets[i]`; the default pattern cycles
/// through the four facet labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainFile {
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub junction_facets: Vec<(Color, Color)>,
    pub colex: Colex,
    pub pairings: Vec<Pairing>,
    pub fusion_classes: Vec<FusionClass>,
    pub block_code: CodeFile,
    pub code: CodeFile,
}
