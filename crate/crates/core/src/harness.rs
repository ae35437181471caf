//! Monte Carlo orchestration: logical error rates, threshold scans,
//! end-to-end sampling accuracy and the resource calculator.
//!
//! Trial `i` of a run seeded with `s` draws from ChaCha stream `i` of seed
//! `s`, so results do not depend on how trials are spread over workers.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{Pipeline, TrialRecord};
use crate::error::{Error, Result};
use crate::iqp::{self, Distribution};
use crate::noise::{sample_iid_faults_with, NoiseModel, PrepCounters};
use crate::surgery::build_tetrahelix;

/// Wilson score interval at normal quantile `z`.
pub fn wilson_interval(failures: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let high = if failures == trials { 1.0 } else { (center + half).min(1.0) };
    (low, high)
}

pub const Z95: f64 = 1.959963984540054;

/// RNG of trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed of sub-experiment `index`, drawn from a stream disjoint from the trial streams.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
    rng.set_stream(index);
    rng.gen()
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    pub max_l: usize,
    pub max_k: usize,
    pub max_statevector_qubits: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_l: 7, max_k: 16, max_statevector_qubits: 16 }
    }
}

impl Caps {
    pub fn check(&self, l: usize, k: usize) -> Result<()> {
        if l > self.max_l || k > self.max_k {
            return Err(Error::CapExceeded(format!(
                "(L, k) = ({l}, {k}) exceeds caps ({}, {})",
                self.max_l, self.max_k
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRate {
    pub l: usize,
    pub k: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub counters: PrepCounters,
}

impl ErrorRate {
    fn new(l: usize, k: usize, epsilon: f64, trials: u64, failures: u64, counters: PrepCounters) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials, Z95);
        let rate = if trials == 0 { 0.0 } else { failures as f64 / trials as f64 };
        ErrorRate { l, k, epsilon, trials, failures, rate, ci_low, ci_high, counters }
    }
}

fn run_trial(p: &Pipeline, model: &NoiseModel, seed: u64, index: u64) -> Result<TrialRecord> {
    let mut rng = trial_rng(seed, index);
    let faults = sample_iid_faults_with(model, &p.layout, &mut rng);
    p.run(&faults)
}

/// Failure count and flag counters over `trials` pipeline runs.
pub fn run_trials(p: &Pipeline, model: &NoiseModel, trials: u64, seed: u64, workers: usize) -> Result<(u64, PrepCounters)> {
    pool(workers)?.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| run_trial(p, model, seed, i).map(|r| (r.logical as u64, r.counters())))
            .try_reduce(
                || (0, PrepCounters::default()),
                |(fa, mut ca), (fb, cb)| {
                    ca.add(&cb);
                    Ok((fa + fb, ca))
                },
            )
    })
}

/// Writes one JSON line per trial for the first `trials` trials.
pub fn write_trace<W: Write>(p: &Pipeline, model: &NoiseModel, trials: u64, seed: u64, mut w: W) -> Result<()> {
    for i in 0..trials {
        let r = run_trial(p, model, seed, i)?;
        serde_json::to_writer(&mut w, &r)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn logical_error_rate(
    l: usize,
    k: usize,
    model: &NoiseModel,
    trials: u64,
    seed: u64,
    caps: &Caps,
    workers: usize,
) -> Result<ErrorRate> {
    caps.check(l, k)?;
    let p = Pipeline::new(build_tetrahelix(k, l)?)?;
    let (failures, counters) = run_trials(&p, model, trials, seed, workers)?;
    Ok(ErrorRate::new(l, k, model.epsilon, trials, failures, counters))
}

/// Preparation-only flag rates of single blocks.
pub fn prep_flag_rate(l: usize, model: &NoiseModel, trials: u64, seed: u64, workers: usize) -> Result<ErrorRate> {
    let p = Pipeline::new(build_tetrahelix(1, l)?)?;
    let (_, counters) = run_trials(&p, model, trials, seed, workers)?;
    Ok(ErrorRate::new(l, 1, model.epsilon, trials, counters.tetrahedral_noncorrectable, counters))
}

/// Where the curves of two code sizes change order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub k: usize,
    pub l_small: usize,
    pub l_large: usize,
    /// Last grid point where the larger code is better.
    pub eps_low: f64,
    /// First grid point where the larger code is worse.
    pub eps_high: f64,
    /// Log-log interpolation of the rate difference between the two points.
    pub estimate: f64,
    /// Whether the Wilson intervals are disjoint at `eps_low` and `eps_high`.
    pub separated_low: bool,
    pub separated_high: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rows: Vec<ErrorRate>,
    pub crossings: Vec<Crossing>,
}

impl ScanResult {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["L", "k", "epsilon", "trials", "failures", "rate", "ci_low", "ci_high"])?;
        for r in &self.rows {
            wr.write_record([
                r.l.to_string(),
                r.k.to_string(),
                r.epsilon.to_string(),
                r.trials.to_string(),
                r.failures.to_string(),
                format!("{:.9e}", r.rate),
                format!("{:.9e}", r.ci_low),
                format!("{:.9e}", r.ci_high),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    fn find(&self, l: usize, k: usize, eps: f64) -> Option<&ErrorRate> {
        self.rows.iter().find(|r| r.l == l && r.k == k && r.epsilon == eps)
    }
}

/// First ordering flip of `l_small` vs `l_large` along the epsilon grid.
pub fn find_crossing(scan: &ScanResult, k: usize, l_small: usize, l_large: usize, epsilons: &[f64]) -> Option<Crossing> {
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(f64::total_cmp);
    let diff = |e: f64| -> Option<(f64, &ErrorRate, &ErrorRate)> {
        let a = scan.find(l_small, k, e)?;
        let b = scan.find(l_large, k, e)?;
        Some((b.rate - a.rate, a, b))
    };
    for w in eps.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (dl, al, bl) = diff(lo)?;
        let (dh, ah, bh) = diff(hi)?;
        if dl < 0.0 && dh > 0.0 {
            let log_ratio = |a: &ErrorRate, b: &ErrorRate| ((b.rate.max(1e-12)) / a.rate.max(1e-12)).ln();
            let (rl, rh) = (log_ratio(al, bl), log_ratio(ah, bh));
            let t = if rh - rl != 0.0 { (-rl / (rh - rl)).clamp(0.0, 1.0) } else { 0.5 };
            let estimate = (lo.ln() + t * (hi.ln() - lo.ln())).exp();
            return Some(Crossing {
                k,
                l_small,
                l_large,
                eps_low: lo,
                eps_high: hi,
                estimate,
                separated_low: bl.ci_high < al.ci_low,
                separated_high: bh.ci_low > ah.ci_high,
            });
        }
    }
    None
}

pub fn threshold_scan(
    ls: &[usize],
    ks: &[usize],
    epsilons: &[f64],
    trials: u64,
    seed: u64,
    caps: &Caps,
    workers: usize,
) -> Result<ScanResult> {
    if ls.is_empty() || ks.is_empty() || epsilons.is_empty() {
        return Err(Error::InvalidInput("scan grids must be nonempty".into()));
    }
    let mut rows = Vec::new();
    let mut index = 0u64;
    for &l in ls {
        for &k in ks {
            caps.check(l, k)?;
            let p = Pipeline::new(build_tetrahelix(k, l)?)?;
            for &e in epsilons {
                let model = NoiseModel::uniform(e)?;
                let (failures, counters) = run_trials(&p, &model, trials, sub_seed(seed, index), workers)?;
                rows.push(ErrorRate::new(l, k, e, trials, failures, counters));
                index += 1;
            }
        }
    }
    let mut scan = ScanResult { rows, crossings: Vec::new() };
    let mut sorted_ls = ls.to_vec();
    sorted_ls.sort();
    sorted_ls.dedup();
    for &k in ks {
        for w in sorted_ls.windows(2) {
            if let Some(c) = find_crossing(&scan, k, w[0], w[1], epsilons) {
                scan.crossings.push(c);
            }
        }
    }
    Ok(scan)
}

/// Parameters of Monte Carlo experiments, read from a config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Logical qubit counts for end-to-end runs.
    pub ns: Vec<usize>,
    pub delta: f64,
    pub epsilon: f64,
    pub mix_x: f64,
    pub mix_z: f64,
    pub mix_y: f64,
    pub mix_meas: f64,
    pub gamma: f64,
    pub trials: u64,
    pub seed: u64,
    pub l: usize,
    pub k: usize,
    pub ls: Vec<usize>,
    pub ks: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub bootstrap: usize,
    pub caps: Caps,
    pub c_l: f64,
    pub c_k: f64,
    pub c_r: f64,
    pub eps_th: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            ns: vec![2, 4, 8],
            delta: 0.01,
            epsilon: 0.001,
            mix_x: 0.25,
            mix_z: 0.25,
            mix_y: 0.25,
            mix_meas: 0.25,
            gamma: 1.0,
            trials: 10_000,
            seed: 0,
            l: 3,
            k: 1,
            ls: vec![3, 5],
            ks: vec![1],
            epsilons: vec![0.002, 0.005, 0.01, 0.02, 0.04],
            bootstrap: 200,
            caps: Caps::default(),
            c_l: 1.0,
            c_k: 1.0,
            c_r: 1.0,
            eps_th: 0.015,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidInput(format!("delta {} outside (0, 1]", self.delta)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        self.model()?;
        Ok(())
    }

    pub fn model(&self) -> Result<NoiseModel> {
        NoiseModel::new(self.epsilon, self.mix_x, self.mix_z, self.mix_y, self.mix_meas)
    }

    pub fn model_at(&self, epsilon: f64) -> Result<NoiseModel> {
        NoiseModel::new(epsilon, self.mix_x, self.mix_z, self.mix_y, self.mix_meas)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvRow {
    pub n: usize,
    pub epsilon: f64,
    pub trials: u64,
    /// Chain length, the schedule depth of the sampled circuit.
    pub k: usize,
    pub tv: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `N·ε̄` with `ε̄` the measured per-qubit logical failure rate.
    pub bound: f64,
    pub eps_bar: f64,
    /// TV between `p_D` and `p_D` under independent flips at the measured rates.
    pub model_tv: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndToEnd {
    pub rows: Vec<TvRow>,
    /// Smallest `c` with `tv ≤ c·N·ε̄` for every row with a nonzero bound.
    pub c_fit: Option<f64>,
}

impl EndToEnd {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["N", "epsilon", "trials", "tv", "ci_low", "ci_high", "bound"])?;
        for r in &self.rows {
            wr.write_record([
                r.n.to_string(),
                r.epsilon.to_string(),
                r.trials.to_string(),
                format!("{:.9e}", r.tv),
                format!("{:.9e}", r.ci_low),
                format!("{:.9e}", r.ci_high),
                format!("{:.9e}", r.bound),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Samples one circuit per `N`, encodes every logical qubit in a chain whose
/// length is the circuit's schedule depth, and draws decoded samples: an
/// ideal outcome from `p_D` XOR one pipeline failure bit per logical qubit.
pub fn end_to_end(cfg: &ExperimentConfig, workers: usize) -> Result<EndToEnd> {
    cfg.validate()?;
    let model = cfg.model()?;
    let mut rows = Vec::new();
    for (ni, &n) in cfg.ns.iter().enumerate() {
        if n > cfg.caps.max_statevector_qubits {
            return Err(Error::CapExceeded(format!("N = {n} exceeds the state-vector cap")));
        }
        let circuit = iqp::sample_circuit(n, cfg.gamma, sub_seed(cfg.seed, 2 * ni as u64))?;
        let p = iqp::exact_distribution(&circuit)?;
        let k = iqp::schedule_depth(&circuit)?.depth;
        cfg.caps.check(cfg.l, k)?;
        let pipe = Pipeline::new(build_tetrahelix(k, cfg.l)?)?;
        let seed = sub_seed(cfg.seed, 2 * ni as u64 + 1);
        let cdf: Vec<f64> = p
            .probs
            .iter()
            .scan(0.0, |acc, &x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        let draws: Vec<(usize, u64)> = pool(workers)?.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|i| -> Result<(usize, u64)> {
                    let mut rng = trial_rng(seed, i);
                    let u = rng.gen::<f64>() * cdf[cdf.len() - 1];
                    let mut s = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                    let mut flips = 0u64;
                    for q in 0..n {
                        let faults = sample_iid_faults_with(&model, &pipe.layout, &mut rng);
                        if pipe.run(&faults)?.logical {
                            s ^= 1 << q;
                            flips += 1;
                        }
                    }
                    Ok((s, flips))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let samples: Vec<usize> = draws.iter().map(|d| d.0).collect();
        let flips: u64 = draws.iter().map(|d| d.1).sum();
        let eps_bar = flips as f64 / (cfg.trials as f64 * n as f64);
        let est = iqp::empirical_tv(&samples, &p, cfg.bootstrap, seed)?;
        let noisy: Distribution = p.with_bit_flips(&vec![eps_bar; n])?;
        rows.push(TvRow {
            n,
            epsilon: cfg.epsilon,
            trials: cfg.trials,
            k,
            tv: est.tv,
            ci_low: est.ci_low,
            ci_high: est.ci_high,
            bound: n as f64 * eps_bar,
            eps_bar,
            model_tv: iqp::tv_distance(&p, &noisy)?,
        });
    }
    let c_fit = rows.iter().filter(|r| r.bound > 0.0).map(|r| r.tv / r.bound).fold(None, |m: Option<f64>, x| {
        Some(m.map_or(x, |m| m.max(x)))
    });
    Ok(EndToEnd { rows, c_fit })
}

/// Resource estimate for sampling `N` qubits to accuracy `δ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overhead {
    pub k: usize,
    pub l: usize,
    pub block_qubits: usize,
    pub total_qubits: u128,
    /// Block size from the closed form rather than a built code.
    pub extrapolated: bool,
}

/// Qubits of the edge-`l` tetrahedral block, `(L³ + L)/2` for odd `L`.
pub fn block_qubits_formula(l: usize) -> usize {
    (l * l * l + l) / 2
}

pub fn overhead(
    n: usize,
    delta: f64,
    eps: f64,
    eps_th: f64,
    c_k: f64,
    c_l: f64,
    c_r: f64,
    build_cap: usize,
) -> Result<Overhead> {
    if !(eps < eps_th) || eps <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon {eps} must lie in (0, eps_th = {eps_th})")));
    }
    if n == 0 || !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidInput("need N ≥ 1 and delta in (0, 1]".into()));
    }
    let k = ((c_k * (n as f64).log2()).ceil() as usize).max(1);
    let by_k = (k as f64 / c_r).ceil() as usize;
    let by_accuracy = (c_l * (n as f64 / delta).log10() / (eps_th / eps).log10()).ceil() as usize;
    // Tetrahedral blocks exist for odd L ≥ 3 only.
    let l = by_k.max(by_accuracy).max(3) | 1;
    let buildable = l <= build_cap;
    let block_qubits = if buildable {
        crate::colex::build_tetrahedral_colex(l)?.num_vertices()
    } else {
        block_qubits_formula(l)
    };
    Ok(Overhead {
        k,
        l,
        block_qubits,
        total_qubits: n as u128 * k as u128 * block_qubits as u128,
        extrapolated: !buildable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_interval(7, 100, Z95);
        assert!(lo < 0.07 && 0.07 < hi);
        assert_eq!(wilson_interval(0, 10, Z95).0, 0.0);
    }

    #[test]
    fn overhead_example() {
        let o = overhead(1024, 0.01, 0.001, 0.01, 1.0, 1.0, 1.0, 7).unwrap();
        assert_eq!((o.k, o.l), (10, 11));
        assert_eq!(o.block_qubits, 671);
        assert!(o.extrapolated);
    }
}
