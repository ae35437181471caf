//! Sparse IQP circuits: sampling, scheduling, exact output distributions,
//! the Ising exponential sum and GHZ-based depth-1 parallelization.
//!
//! Phases are tracked as integers modulo 16 in units of π/8: `T^k`
//! contributes `2k·z` and `CS^k` contributes `4k·z_i·z_j`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest qubit count of a dense state vector.
pub const MAX_STATEVECTOR_QUBITS: usize = 24;
/// Largest qubit count of the streamed zero-outcome sum.
pub const MAX_PROB_ZERO_QUBITS: usize = 30;

/// `e^{iπm/8}` for `m = 0..16`.
pub fn phase_table() -> [Complex64; 16] {
    std::array::from_fn(|m| Complex64::from_polar(1.0, std::f64::consts::PI * m as f64 / 8.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IqpCircuit {
    pub n: usize,
    pub t_exponents: Vec<u8>,
    pub cs_exponents: BTreeMap<(usize, usize), u8>,
    pub gamma: f64,
    pub seed: Option<u64>,
}

impl IqpCircuit {
    pub fn new(n: usize, t_exponents: Vec<u8>, cs_exponents: BTreeMap<(usize, usize), u8>, gamma: f64) -> Result<Self> {
        let c = IqpCircuit { n, t_exponents, cs_exponents, gamma, seed: None };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_exponents.len() != self.n {
            return Err(Error::InvalidInput(format!("{} T exponents for {} qubits", self.t_exponents.len(), self.n)));
        }
        if let Some(k) = self.t_exponents.iter().find(|&&k| k > 7) {
            return Err(Error::InvalidInput(format!("T exponent {k} outside 0..=7")));
        }
        for (&(i, j), &k) in &self.cs_exponents {
            if i >= j || j >= self.n {
                return Err(Error::InvalidInput(format!("CS pair ({i}, {j}) must satisfy i < j < n")));
            }
            if k > 3 {
                return Err(Error::InvalidInput(format!("CS exponent {k} outside 0..=3")));
            }
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidInput("gamma must be nonnegative".into()));
        }
        Ok(())
    }

    /// Phase of basis state `z` (bit `i` = qubit `i`) in units of π/8, mod 16.
    pub fn phase(&self, z: u64) -> u8 {
        let mut theta = 0u32;
        for (i, &k) in self.t_exponents.iter().enumerate() {
            if z >> i & 1 == 1 {
                theta += 2 * k as u32;
            }
        }
        for (&(i, j), &k) in &self.cs_exponents {
            if z >> i & 1 == 1 && z >> j & 1 == 1 {
                theta += 4 * k as u32;
            }
        }
        (theta % 16) as u8
    }

    /// Per-qubit bit-planes of the CS weights, for incremental phase updates.
    fn weight_planes(&self) -> (Vec<u64>, Vec<u64>) {
        let mut a1 = vec![0u64; self.n];
        let mut a2 = vec![0u64; self.n];
        for (&(i, j), &k) in &self.cs_exponents {
            if k & 1 == 1 {
                a1[i] |= 1 << j;
                a1[j] |= 1 << i;
            }
            if k & 2 == 2 {
                a2[i] |= 1 << j;
                a2[j] |= 1 << i;
            }
        }
        (a1, a2)
    }

    pub fn to_file(&self) -> CircuitFile {
        CircuitFile {
            n: self.n,
            gamma: self.gamma,
            t: self.t_exponents.clone(),
            cs: self.cs_exponents.iter().map(|(&(i, j), &k)| CsGate { i, j, k }).collect(),
            seed: self.seed,
        }
    }

    pub fn from_file(f: CircuitFile) -> Result<Self> {
        let mut cs = BTreeMap::new();
        for g in f.cs {
            if cs.insert((g.i, g.j), g.k).is_some() {
                return Err(Error::InvalidInput(format!("duplicate CS pair ({}, {})", g.i, g.j)));
            }
        }
        let c = IqpCircuit { n: f.n, t_exponents: f.t, cs_exponents: cs, gamma: f.gamma, seed: f.seed };
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CircuitFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("circuit file: {e}")))?;
        IqpCircuit::from_file(f)
    }

    pub fn export(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn import(path: &Path) -> Result<Self> {
        IqpCircuit::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsGate {
    pub i: usize,
    pub j: usize,
    pub k: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n: usize,
    pub gamma: f64,
    pub t: Vec<u8>,
    pub cs: Vec<CsGate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// CS density `min(1, γ·log₂N/N)`.
pub fn pair_probability(n: usize, gamma: f64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (gamma * (n as f64).log2() / n as f64).min(1.0)
}

pub fn sample_circuit(n: usize, gamma: f64, seed: u64) -> Result<IqpCircuit> {
    if n == 0 || !(gamma >= 0.0) {
        return Err(Error::InvalidInput("need n ≥ 1 and gamma ≥ 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_exponents = (0..n).map(|_| rng.gen_range(0..8u8)).collect();
    let p = pair_probability(n, gamma);
    let mut cs_exponents = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                cs_exponents.insert((i, j), rng.gen_range(0..4u8));
            }
        }
    }
    Ok(IqpCircuit { n, t_exponents, cs_exponents, gamma, seed: Some(seed) })
}

/// Step assignment of the gates with nonzero exponent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub depth: usize,
    #[serde(with = "step_list")]
    pub cs_steps: BTreeMap<(usize, usize), usize>,
    pub t_steps: Vec<Option<usize>>,
}

/// Pair-keyed maps as `[i, j, step]` triples, since JSON keys must be strings.
mod step_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &BTreeMap<(usize, usize), usize>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[usize; 3]> = m.iter().map(|(&(i, j), &t)| [i, j, t]).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(usize, usize), usize>, D::Error> {
        let v = Vec::<[usize; 3]>::deserialize(d)?;
        Ok(v.into_iter().map(|[i, j, t]| ((i, j), t)).collect())
    }
}

/// Proper edge coloring with at most Δ+1 colors (Misra–Gries).
fn edge_coloring(n: usize, edges: &[(usize, usize)]) -> Result<BTreeMap<(usize, usize), usize>> {
    let mut degree = vec![0usize; n];
    for &(u, v) in edges {
        degree[u] += 1;
        degree[v] += 1;
    }
    let colors = degree.iter().copied().max().unwrap_or(0) + 1;
    // at[v][c] = neighbor joined to v by an edge of color c
    let mut at: Vec<Vec<Option<usize>>> = vec![vec![None; colors]; n];
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let color_of = |at: &Vec<Vec<Option<usize>>>, u: usize, v: usize| at[u].iter().position(|&w| w == Some(v));
    let free = |at: &Vec<Vec<Option<usize>>>, v: usize, c: usize| at[v][c].is_none();
    fn set(at: &mut [Vec<Option<usize>>], u: usize, v: usize, c: usize) {
        at[u][c] = Some(v);
        at[v][c] = Some(u);
    }
    fn unset(at: &mut [Vec<Option<usize>>], u: usize, v: usize, c: usize) {
        at[u][c] = None;
        at[v][c] = None;
    }

    for &(u, v) in edges {
        let mut fan = vec![v];
        loop {
            let last = *fan.last().expect("nonempty fan");
            let next = adj[u].iter().copied().find(|&x| {
                !fan.contains(&x) && color_of(&at, u, x).is_some_and(|c| free(&at, last, c))
            });
            match next {
                Some(x) => fan.push(x),
                None => break,
            }
        }
        let c = (0..colors).find(|&c| free(&at, u, c)).expect("Δ+1 colors leave one free at u");
        let d = (0..colors).find(|&d| free(&at, *fan.last().unwrap(), d)).expect("free color at fan end");
        if c != d {
            // invert the c/d path starting at u
            let mut path = Vec::new();
            let (mut cur, mut col) = (u, d);
            while let Some(nx) = at[cur][col] {
                path.push((cur, nx, col));
                cur = nx;
                col = if col == c { d } else { c };
            }
            for &(a, b, col) in &path {
                unset(&mut at, a, b, col);
            }
            for &(a, b, col) in &path {
                set(&mut at, a, b, if col == c { d } else { c });
            }
        }
        let w_idx = fan
            .iter()
            .position(|&w| free(&at, w, d))
            .ok_or_else(|| Error::Invariant("edge coloring found no fan vertex free in the swapped color".into()))?;
        let shifted: Vec<usize> = (0..w_idx).map(|i| color_of(&at, u, fan[i + 1]).expect("fan edges are colored")).collect();
        for i in 1..=w_idx {
            let col = color_of(&at, u, fan[i]).expect("fan edges are colored");
            unset(&mut at, u, fan[i], col);
        }
        for (i, &col) in shifted.iter().enumerate() {
            set(&mut at, u, fan[i], col);
        }
        set(&mut at, u, fan[w_idx], d);
    }

    let mut out = BTreeMap::new();
    for &(u, v) in edges {
        let c = color_of(&at, u, v).ok_or_else(|| Error::Invariant(format!("edge ({u}, {v}) left uncolored")))?;
        out.insert((u, v), c);
    }
    for v in 0..n {
        let mut seen = vec![false; colors];
        for &w in &adj[v] {
            let c = out[&(v.min(w), v.max(w))];
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::Invariant(format!("edge coloring conflict at vertex {v}")));
            }
        }
    }
    Ok(out)
}

/// Conflict-free step assignment: CS gates by a (Δ+1)-edge coloring, then
/// each nonzero T in the earliest free slot of its qubit. Identity gates
/// (exponent 0) take no slot.
pub fn schedule_depth(c: &IqpCircuit) -> Result<Schedule> {
    let edges: Vec<(usize, usize)> = c.cs_exponents.iter().filter(|(_, &k)| k != 0).map(|(&p, _)| p).collect();
    let cs_steps = edge_coloring(c.n, &edges)?;
    let mut busy: Vec<Vec<usize>> = vec![Vec::new(); c.n];
    for (&(i, j), &s) in &cs_steps {
        busy[i].push(s);
        busy[j].push(s);
    }
    let t_steps: Vec<Option<usize>> = c
        .t_exponents
        .iter()
        .enumerate()
        .map(|(q, &k)| (k != 0).then(|| (0..).find(|s| !busy[q].contains(s)).expect("unbounded range")))
        .collect();
    let depth = cs_steps.values().chain(t_steps.iter().flatten()).map(|&s| s + 1).max().unwrap_or(0).max(1);
    Ok(Schedule { depth, cs_steps, t_steps })
}

/// Depth-1 layout over GHZ groups: the gate of step `t` on qubit `q` acts on wire `q·k + t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelLayout {
    pub circuit: IqpCircuit,
    pub schedule: Schedule,
    pub k: usize,
}

impl ParallelLayout {
    pub fn wire(&self, qubit: usize, step: usize) -> usize {
        qubit * self.k + step
    }

    pub fn wire_count(&self) -> usize {
        self.circuit.n * self.k
    }

    /// Single-qubit phases `(wire, 2·exponent)` and two-wire phases `(a, b, 4·exponent)`.
    pub fn wire_gates(&self) -> (Vec<(usize, u8)>, Vec<(usize, usize, u8)>) {
        let singles = self
            .schedule
            .t_steps
            .iter()
            .enumerate()
            .filter_map(|(q, s)| s.map(|s| (self.wire(q, s), 2 * self.circuit.t_exponents[q])))
            .collect();
        let pairs = self
            .schedule
            .cs_steps
            .iter()
            .map(|(&(i, j), &s)| (self.wire(i, s), self.wire(j, s), 4 * self.circuit.cs_exponents[&(i, j)]))
            .collect();
        (singles, pairs)
    }

    pub fn to_file(&self) -> LayoutFile {
        let (singles, pairs) = self.wire_gates();
        LayoutFile {
            n: self.circuit.n,
            k: self.k,
            wires: self.wire_count(),
            single: singles.into_iter().map(|(w, p)| WirePhase { wire: w, phase: p }).collect(),
            pairs: pairs.into_iter().map(|(a, b, p)| WirePairPhase { a, b, phase: p }).collect(),
            circuit: self.circuit.to_file(),
            schedule: self.schedule.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirePhase {
    pub wire: usize,
    pub phase: u8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WirePairPhase {
    pub a: usize,
    pub b: usize,
    pub phase: u8,
}

/// Exported layout; phases in units of π/8.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub n: usize,
    pub k: usize,
    pub wires: usize,
    pub single: Vec<WirePhase>,
    pub pairs: Vec<WirePairPhase>,
    pub circuit: CircuitFile,
    pub schedule: Schedule,
}

pub fn compile_parallel(c: &IqpCircuit) -> Result<ParallelLayout> {
    let schedule = schedule_depth(c)?;
    Ok(ParallelLayout { circuit: c.clone(), k: schedule.depth, schedule })
}

/// Output distribution over `{0,1}^N`; index bit `i` is qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub n: usize,
    pub probs: Vec<f64>,
}

impl Distribution {
    pub fn new(n: usize, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != 1usize << n {
            return Err(Error::Dimension(format!("{} probabilities for {n} bits", probs.len())));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidInput("negative probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { n, probs })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Bitstring of outcome `s`, qubit 0 first.
    pub fn bitstring(&self, s: usize) -> String {
        (0..self.n).map(|i| if s >> i & 1 == 1 { '1' } else { '0' }).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["bitstring", "probability"])?;
        for (s, p) in self.probs.iter().enumerate() {
            wr.write_record([self.bitstring(s), format!("{p:.17e}")])?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Independent bit flips with per-bit probabilities `rates`.
    pub fn with_bit_flips(&self, rates: &[f64]) -> Result<Distribution> {
        if rates.len() != self.n {
            return Err(Error::Dimension(format!("{} flip rates for {} bits", rates.len(), self.n)));
        }
        let mut p = self.probs.clone();
        for (i, &r) in rates.iter().enumerate() {
            for s in 0..p.len() {
                if s >> i & 1 == 0 {
                    let t = s | 1 << i;
                    let (a, b) = (p[s], p[t]);
                    p[s] = (1.0 - r) * a + r * b;
                    p[t] = r * a + (1.0 - r) * b;
                }
            }
        }
        Ok(Distribution { n: self.n, probs: p })
    }

    /// Draws `count` outcomes by inverse transform sampling.
    pub fn sample<R: Rng>(&self, count: usize, rng: &mut R) -> Vec<usize> {
        let mut cdf = Vec::with_capacity(self.probs.len());
        let mut acc = 0.0;
        for &p in &self.probs {
            acc += p;
            cdf.push(acc);
        }
        (0..count)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                cdf.partition_point(|&c| c <= u).min(self.probs.len() - 1)
            })
            .collect()
    }
}

/// In-place unnormalized Walsh–Hadamard transform.
fn walsh_hadamard(v: &mut [Complex64]) {
    let mut h = 1;
    while h < v.len() {
        for chunk in v.chunks_mut(2 * h) {
            let (a, b) = chunk.split_at_mut(h);
            for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        h *= 2;
    }
}

/// Phases of all basis states, built one highest bit at a time.
fn phase_vector(c: &IqpCircuit) -> Vec<u8> {
    let (a1, a2) = c.weight_planes();
    let mut theta = vec![0u8; 1usize << c.n];
    for h in 0..c.n {
        let base = 1usize << h;
        let t = 2 * c.t_exponents[h] as u32;
        for z in 0..base {
            let z64 = z as u64;
            let add = t + 4 * ((z64 & a1[h]).count_ones() + 2 * (z64 & a2[h]).count_ones());
            theta[base | z] = ((theta[z] as u32 + add) % 16) as u8;
        }
    }
    theta
}

fn hadamard_basis_probs(amps: &mut [Complex64], n: usize) -> Vec<f64> {
    walsh_hadamard(amps);
    let scale = 1.0 / (1u64 << n) as f64;
    amps.iter().map(|a| a.norm_sqr() * scale * scale).collect()
}

/// Exact distribution of Hadamard-basis outcomes of `D|+⟩^⊗N`.
pub fn exact_distribution(c: &IqpCircuit) -> Result<Distribution> {
    if c.n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::CapExceeded(format!("{} qubits exceeds the state-vector cap of {MAX_STATEVECTOR_QUBITS}", c.n)));
    }
    let table = phase_table();
    // amplitudes carry an extra 2^{N/2}, removed with the transform scale
    let mut amps: Vec<Complex64> = phase_vector(c).into_iter().map(|m| table[m as usize]).collect();
    let probs = hadamard_basis_probs(&mut amps, c.n);
    Ok(Distribution { n: c.n, probs })
}

/// `p(0^N) = 4^{−N}·|Σ_z e^{iπθ(z)/8}|²`, streamed in Gray-code order.
pub fn prob_zero(c: &IqpCircuit) -> Result<f64> {
    if c.n > MAX_PROB_ZERO_QUBITS {
        return Err(Error::CapExceeded(format!("{} qubits exceeds the cap of {MAX_PROB_ZERO_QUBITS}", c.n)));
    }
    let (a1, a2) = c.weight_planes();
    let mut counts = [0u64; 16];
    let mut z = 0u64;
    let mut theta = 0i64;
    counts[0] = 1;
    for step in 1u64..(1u64 << c.n) {
        let h = step.trailing_zeros() as usize;
        let delta = 2 * c.t_exponents[h] as i64
            + 4 * ((z & a1[h]).count_ones() as i64 + 2 * (z & a2[h]).count_ones() as i64);
        if z >> h & 1 == 1 {
            theta -= delta;
        } else {
            theta += delta;
        }
        z ^= 1 << h;
        counts[theta.rem_euclid(16) as usize] += 1;
    }
    let table = phase_table();
    let sum: Complex64 = counts.iter().zip(&table).map(|(&k, &w)| w * k as f64).sum();
    Ok(sum.norm_sqr() / 4f64.powi(c.n as i32))
}

/// Energy histogram of `E(z) = Σ_{i<j} w_ij z_i z_j + Σ_k v_k z_k` over `z ∈ {±1}^N`.
pub fn ising_energy_counts(w: &[Vec<i64>], v: &[i64]) -> Result<BTreeMap<i64, u64>> {
    let n = v.len();
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::CapExceeded(format!("{n} spins exceeds the cap of {MAX_STATEVECTOR_QUBITS}")));
    }
    if w.len() != n || w.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("weight matrix must be N×N".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if w[i][j] != w[j][i] {
                return Err(Error::InvalidInput(format!("weights not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut spins = vec![1i64; n];
    let mut energy: i64 = v.iter().sum::<i64>() + (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).map(|(i, j)| w[i][j]).sum::<i64>();
    let mut counts = BTreeMap::new();
    *counts.entry(energy).or_insert(0) += 1;
    for step in 1u64..(1u64 << n) {
        let h = step.trailing_zeros() as usize;
        let field: i64 = v[h] + (0..n).filter(|&j| j != h).map(|j| w[h][j] * spins[j]).sum::<i64>();
        energy -= 2 * spins[h] * field;
        spins[h] = -spins[h];
        *counts.entry(energy).or_insert(0) += 1;
    }
    Ok(counts)
}

/// `Σ_E count(E)·ω^E`, summed in increasing energy.
pub fn partition_from_counts(counts: &BTreeMap<i64, u64>, omega: Complex64) -> Complex64 {
    counts.iter().map(|(&e, &k)| omega.powi(e as i32) * k as f64).sum()
}

pub fn ising_partition(w: &[Vec<i64>], v: &[i64], omega: Complex64) -> Result<Complex64> {
    Ok(partition_from_counts(&ising_energy_counts(w, v)?, omega))
}

/// Prepares one GHZ group per logical qubit, applies every gate on its own
/// wire in one layer, measures all wires in the Hadamard basis and XORs each
/// group's outcomes.
pub fn simulate_parallel_exact(l: &ParallelLayout) -> Result<Distribution> {
    let (n, k) = (l.circuit.n, l.k);
    let wires = n * k;
    if wires > MAX_STATEVECTOR_QUBITS {
        return Err(Error::CapExceeded(format!("{wires} wires exceeds the state-vector cap of {MAX_STATEVECTOR_QUBITS}")));
    }
    let (singles, pairs) = l.wire_gates();
    let table = phase_table();
    let group = (1usize << k) - 1;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << wires];
    // GHZ support: each group is all-zeros or all-ones
    for z in 0usize..(1 << n) {
        let mut x = 0usize;
        for q in 0..n {
            if z >> q & 1 == 1 {
                x |= group << (q * k);
            }
        }
        let mut theta = 0u32;
        for &(w, p) in &singles {
            if x >> w & 1 == 1 {
                theta += p as u32;
            }
        }
        for &(a, b, p) in &pairs {
            if x >> a & 1 == 1 && x >> b & 1 == 1 {
                theta += p as u32;
            }
        }
        amps[x] = table[(theta % 16) as usize];
    }
    walsh_hadamard(&mut amps);
    // |amp|² / (2^n · 2^wires) is the wire-outcome probability
    let scale = 1.0 / ((1u64 << n) as f64 * (1u64 << wires) as f64);
    let mut probs = vec![0.0; 1usize << n];
    for (s, a) in amps.iter().enumerate() {
        let mut logical = 0usize;
        for q in 0..n {
            if ((s >> (q * k)) & group).count_ones() % 2 == 1 {
                logical |= 1 << q;
            }
        }
        probs[logical] += a.norm_sqr() * scale;
    }
    Ok(Distribution { n, probs })
}

pub fn tv_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.n != q.n || p.probs.len() != q.probs.len() {
        return Err(Error::InvalidInput(format!("distributions over {} and {} bits", p.n, q.n)));
    }
    Ok(0.5 * p.probs.iter().zip(&q.probs).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Plug-in TV estimate with a bootstrap percentile interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub tv: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: usize,
}

pub fn empirical_tv(samples: &[usize], p: &Distribution, resamples: usize, seed: u64) -> Result<TvEstimate> {
    let size = p.probs.len();
    if samples.is_empty() {
        return Err(Error::InvalidInput("no samples".into()));
    }
    if let Some(&s) = samples.iter().find(|&&s| s >= size) {
        return Err(Error::InvalidInput(format!("sample {s} outside {} bits", p.n)));
    }
    let plug_in = |counts: &[u64]| -> f64 {
        let total = samples.len() as f64;
        0.5 * counts.iter().zip(&p.probs).map(|(&c, &q)| (c as f64 / total - q).abs()).sum::<f64>()
    };
    let mut counts = vec![0u64; size];
    for &s in samples {
        counts[s] += 1;
    }
    let tv = plug_in(&counts);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boots: Vec<f64> = (0..resamples)
        .map(|_| {
            let mut c = vec![0u64; size];
            for _ in 0..samples.len() {
                c[samples[rng.gen_range(0..samples.len())]] += 1;
            }
            plug_in(&c)
        })
        .collect();
    boots.sort_by(f64::total_cmp);
    let (ci_low, ci_high) = if boots.is_empty() {
        (tv, tv)
    } else {
        let at = |q: f64| boots[((q * (boots.len() - 1) as f64).round() as usize).min(boots.len() - 1)];
        (at(0.025), at(0.975))
    };
    Ok(TvEstimate { tv, ci_low, ci_high, samples: samples.len() })
}
