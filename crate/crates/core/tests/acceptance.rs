//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tetrahelix::csscode::{check_cs_gadget, check_diagonal_transversality, cs_gadget_identity_holds, find_t_partition};
use tetrahelix::harness::{self, Caps, ExperimentConfig};
use tetrahelix::iqp;
use tetrahelix::noise::{FaultLabel, NoiseModel};
use tetrahelix::{build_tetrahelix, Basis, BitMatrix, BitVector, CssCode, Distance, FaultSet, Pipeline};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Instant, limit: Duration) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, format!("took {e:?}, limit {limit:?}"))
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Minimum weight of `ker(other) \ rowspace(same)` by enumerating all of `{0,1}^n`.
fn brute_force_distance(same: &BitMatrix, other: &BitMatrix) -> usize {
    let n = same.ncols();
    assert!(n <= 20);
    let to_u32 = |v: &BitVector| v.iter_ones().fold(0u32, |a, i| a | 1 << i);
    let checks: Vec<u32> = other.rows().iter().map(to_u32).collect();
    let gens: Vec<u32> = same.rows().iter().map(to_u32).collect();
    let mut span = std::collections::HashSet::from([0u32]);
    for g in gens {
        let add: Vec<u32> = span.iter().map(|s| s ^ g).collect();
        span.extend(add);
    }
    (1u32..1 << n)
        .filter(|&v| checks.iter().all(|c| (c & v).count_ones() % 2 == 0) && !span.contains(&v))
        .map(|v| v.count_ones() as usize)
        .min()
        .expect("code has logicals")
}

fn code_parameters() -> Outcome {
    let t0 = Instant::now();
    let t = build_tetrahelix(1, 3).map_err(|e| e.to_string())?;
    let c = &t.code;
    let dz = c.distance(Basis::Z, 7).map_err(|e| e.to_string())?;
    let dx = c.distance(Basis::X, 15).map_err(|e| e.to_string())?;
    within(t0, Duration::from_secs(1))?;
    ensure(c.n == 15, format!("n = {}", c.n))?;
    ensure(c.logical_count() == 1, format!("logical count {}", c.logical_count()))?;
    ensure(dz == Distance::Exact(3), format!("d_Z = {dz}"))?;
    ensure(dx == Distance::Exact(7), format!("d_X = {dx}"))?;
    let oracle = (brute_force_distance(&c.hz, &c.hx), brute_force_distance(&c.hx, &c.hz));
    ensure(oracle == (3, 7), format!("exhaustive oracle gives (d_Z, d_X) = {oracle:?}"))?;
    Ok(format!("n=15 k=1 d_Z={dz} d_X={dx}, oracle agrees, {:?}", t0.elapsed()))
}

fn transversal_t() -> Outcome {
    let t0 = Instant::now();
    let c = CssCode::from_colex(&tetrahelix::build_tetrahedral_colex(3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let p = find_t_partition(&c).map_err(|e| e.to_string())?.ok_or("no partition found")?;
    let r = check_diagonal_transversality(&c, &p, None).map_err(|e| e.to_string())?;
    within(t0, Duration::from_secs(1))?;
    ensure(r.passed, format!("check failed: {:?}", r.failure))?;
    ensure(r.codewords_checked == 32, format!("{} codewords checked", r.codewords_checked))?;
    ensure(matches!(r.residue, Some(1) | Some(7)), format!("residue {:?}", r.residue))?;
    Ok(format!("|V+|={} residue={:?} logical={:?}", p.v_plus.len(), r.residue, r.logical))
}

fn cs_gadget() -> Outcome {
    let t0 = Instant::now();
    ensure(cs_gadget_identity_holds(), "two-qubit gadget identity fails")?;
    let block = build_tetrahelix(1, 3).map_err(|e| e.to_string())?.code;
    let p = find_t_partition(&block).map_err(|e| e.to_string())?.ok_or("no partition")?;
    let pair = check_cs_gadget(&block, &block, &p, None).map_err(|e| e.to_string())?;
    ensure(pair.passed, format!("block pair: {:?}", pair.failure))?;
    ensure(pair.pairs_checked == 32 * 32, format!("{} pairs", pair.pairs_checked))?;
    let chain = build_tetrahelix(2, 3).map_err(|e| e.to_string())?;
    let lifted = chain.lift_partition(&p).map_err(|e| e.to_string())?;
    for b in 0..chain.k {
        let r = check_cs_gadget(&chain.code, &chain.code, &lifted, Some(&chain.block_mask(b))).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("chain block {b}: {:?}", r.failure))?;
    }
    within(t0, Duration::from_secs(10))?;
    Ok(format!("gadget identity exact, {:?} on 32x32 pairs, both chain blocks pass", pair.kind))
}

fn merge_correctness() -> Outcome {
    let t0 = Instant::now();
    let t = build_tetrahelix(2, 3).map_err(|e| e.to_string())?;
    let c = &t.code;
    let face_rows: Vec<BitVector> = c.hz.rows()[..c.hz.nrows() - t.pair_row_count()].to_vec();
    let face_rank = BitMatrix::from_rows(c.n, face_rows).map_err(|e| e.to_string())?.rank();
    let rank = c.rank_z();
    let dependencies = face_rank + t.pair_row_count() - rank;
    let dz = c.distance(Basis::Z, 6).map_err(|e| e.to_string())?;
    let dx = c.distance(Basis::X, 14).map_err(|e| e.to_string())?;
    within(t0, Duration::from_secs(300))?;
    ensure(c.n == 30, format!("n = {}", c.n))?;
    ensure(c.logical_count() == 1, format!("logical count {}", c.logical_count()))?;
    ensure(rank == 24, format!("rank Hz = {rank}"))?;
    ensure(dependencies == 3, format!("{dependencies} pair-relation dependencies"))?;
    ensure(dz == Distance::Exact(3), format!("d_Z = {dz}"))?;
    let dx_ok = match dx {
        Distance::Exact(d) | Distance::AtLeast(d) => d >= 14,
    };
    ensure(dx_ok, format!("d_X = {dx}"))?;
    Ok(format!("n=30 k=1 rank Hz=24 dependencies=3 d_Z={dz} d_X={dx}"))
}

fn chain_depth_one_gates() -> Outcome {
    let t0 = Instant::now();
    let t = build_tetrahelix(3, 3).map_err(|e| e.to_string())?;
    let block = &t.blocks[0];
    let p = find_t_partition(block).map_err(|e| e.to_string())?.ok_or("no partition")?;
    let lifted = t.lift_partition(&p).map_err(|e| e.to_string())?;
    let mut residues = Vec::new();
    for b in 0..t.k {
        let r = check_diagonal_transversality(&t.code, &lifted, Some(&t.block_mask(b))).map_err(|e| e.to_string())?;
        ensure(r.passed, format!("block {b}: {:?}", r.failure))?;
        residues.push(r.residue);
    }
    within(t0, Duration::from_secs(60))?;
    Ok(format!("k=3 L=3 per-block residues {residues:?}"))
}

fn parallel_equivalence() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    let mut depths = BTreeMap::new();
    for i in 0..50 {
        let n = rng.gen_range(1..=4);
        let gamma = rng.gen_range(0.5..4.0);
        let c = iqp::sample_circuit(n, gamma, i).map_err(|e| e.to_string())?;
        let layout = iqp::compile_parallel(&c).map_err(|e| e.to_string())?;
        ensure(layout.k <= 4, format!("circuit {i}: depth {}", layout.k))?;
        *depths.entry(layout.k).or_insert(0) += 1;
        let tv = iqp::tv_distance(
            &iqp::simulate_parallel_exact(&layout).map_err(|e| e.to_string())?,
            &iqp::exact_distribution(&c).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        worst = worst.max(tv);
    }
    within(t0, Duration::from_secs(60))?;
    ensure(worst <= 1e-9, format!("max TV {worst:.3e}"))?;
    Ok(format!("50 circuits, depth histogram {depths:?}, max TV {worst:.2e}"))
}

fn direct_ising_counts(w: &[Vec<i64>], v: &[i64]) -> BTreeMap<i64, u64> {
    let n = v.len();
    let mut counts = BTreeMap::new();
    for z in 0u32..1 << n {
        let s: Vec<i64> = (0..n).map(|i| if z >> i & 1 == 1 { -1 } else { 1 }).collect();
        let mut e = 0;
        for i in 0..n {
            e += v[i] * s[i];
            for j in i + 1..n {
                e += w[i][j] * s[i] * s[j];
            }
        }
        *counts.entry(e).or_insert(0) += 1;
    }
    counts
}

fn exponential_sum_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = rng.gen_range(1..=10);
        let c = iqp::sample_circuit(n, rng.gen_range(0.5..4.0), 1000 + i).map_err(|e| e.to_string())?;
        let p0 = iqp::prob_zero(&c).map_err(|e| e.to_string())?;
        let exact = iqp::exact_distribution(&c).map_err(|e| e.to_string())?.probs[0];
        worst = worst.max((p0 - exact).abs());
    }
    ensure(worst <= 1e-9, format!("max |prob_zero - statevector| = {worst:.3e}"))?;
    let omega = Complex64::from_polar(1.0, std::f64::consts::PI / 4.0);
    for n in 1..=12 {
        let mut w = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let x = rng.gen_range(-3..=3);
                w[i][j] = x;
                w[j][i] = x;
            }
        }
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let counts = iqp::ising_energy_counts(&w, &v).map_err(|e| e.to_string())?;
        let direct = direct_ising_counts(&w, &v);
        ensure(counts == direct, format!("N={n}: energy histograms differ"))?;
        let z = iqp::ising_partition(&w, &v, omega).map_err(|e| e.to_string())?;
        ensure(z == iqp::partition_from_counts(&direct, omega), format!("N={n}: partition functions differ"))?;
    }
    Ok(format!("100 circuits max diff {worst:.2e}; Ising histograms identical for N=1..=12"))
}

fn single_fault_tolerance() -> Outcome {
    let t0 = Instant::now();
    let p = Pipeline::new(build_tetrahelix(2, 3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut cases = 0;
    let mut bad = Vec::new();
    for loc in 0..p.layout.size() {
        for label in FaultLabel::ALL {
            for twirl in [false, true] {
                let mut f = FaultSet::single(&p.layout, loc, label);
                if twirl {
                    f.twirl = BitVector::ones(p.layout.data_qubits);
                }
                cases += 1;
                if p.run(&f).map_err(|e| e.to_string())?.logical {
                    bad.push((loc, label));
                }
            }
        }
    }
    within(t0, Duration::from_secs(300))?;
    ensure(bad.is_empty(), format!("{} of {cases} single faults flip the output, first {:?}", bad.len(), bad.first()))?;
    Ok(format!("{cases} single-fault cases, all corrected"))
}

fn single_shot_suppression() -> Outcome {
    let caps = Caps::default();
    let trials = 100_000;
    let mut log = Vec::new();
    for (i, eps) in [0.001, 0.002, 0.003, 0.005].into_iter().enumerate() {
        let model = NoiseModel::uniform(eps).map_err(|e| e.to_string())?;
        let seed = harness::sub_seed(9, i as u64);
        let small = harness::logical_error_rate(3, 1, &model, trials, seed, &caps, workers()).map_err(|e| e.to_string())?;
        let large = harness::logical_error_rate(5, 1, &model, trials, seed, &caps, workers()).map_err(|e| e.to_string())?;
        log.push(format!("eps={eps}: L3 {:.2e} L5 {:.2e}", small.rate, large.rate));
        if large.ci_high < small.ci_low {
            return Ok(format!(
                "eps={eps}, {trials} trials: L=3 {:.2e} [{:.2e}, {:.2e}] > L=5 {:.2e} [{:.2e}, {:.2e}]",
                small.rate, small.ci_low, small.ci_high, large.rate, large.ci_low, large.ci_high
            ));
        }
    }
    Err(format!("no separated grid point: {}", log.join("; ")))
}

fn threshold_crossing() -> Outcome {
    let eps = [0.002, 0.005, 0.01, 0.015, 0.02, 0.04];
    let scan = harness::threshold_scan(&[3, 5], &[1], &eps, 20_000, 10, &Caps::default(), workers()).map_err(|e| e.to_string())?;
    let at = |l: usize, e: f64| scan.rows.iter().find(|r| r.l == l && r.epsilon == e).expect("grid point");
    let below = eps.iter().copied().filter(|&e| at(5, e).ci_high < at(3, e).ci_low).collect::<Vec<_>>();
    let above = eps.iter().copied().filter(|&e| at(5, e).ci_low > at(3, e).ci_high).collect::<Vec<_>>();
    let c = scan.crossings.first().ok_or("curves do not cross in the scanned range")?;
    ensure(!below.is_empty() && !above.is_empty(), format!("separated below at {below:?}, above at {above:?}"))?;
    ensure(below.iter().all(|&b| above.iter().all(|&a| b < a)), "separated orderings interleave")?;
    Ok(format!(
        "crossing in [{}, {}], estimate {:.4}; L=5 significantly better at {below:?}, worse at {above:?}",
        c.eps_low, c.eps_high, c.estimate
    ))
}

fn tv_union_bound() -> Outcome {
    let cfg = ExperimentConfig { ns: vec![2, 4, 8], epsilon: 0.003, trials: 100_000, seed: 7, ..Default::default() };
    let r = harness::end_to_end(&cfg, workers()).map_err(|e| e.to_string())?;
    let c = r.c_fit.ok_or("no logical failures observed")?;
    for row in &r.rows {
        ensure(row.ci_low <= row.ci_high, format!("N={}: malformed interval", row.n))?;
        ensure(row.model_tv <= row.bound, format!("N={}: model TV {} above N*eps_bar {}", row.n, row.model_tv, row.bound))?;
    }
    ensure(c <= 1.0, format!("fitted c = {c:.3} exceeds the union-bound constant 1"))?;
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|x| format!("N={} tv={:.4} [{:.4}, {:.4}] N*eps_bar={:.4}", x.n, x.tv, x.ci_low, x.ci_high, x.bound))
        .collect();
    Ok(format!("c = {c:.3}; {}", rows.join("; ")))
}

fn reproducibility() -> Outcome {
    let caps = Caps::default();
    let model = NoiseModel::uniform(0.01).map_err(|e| e.to_string())?;
    let p = Pipeline::new(build_tetrahelix(2, 3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let a = harness::run_trials(&p, &model, 3000, 21, 1).map_err(|e| e.to_string())?;
    let b = harness::run_trials(&p, &model, 3000, 21, 4).map_err(|e| e.to_string())?;
    ensure(a == b, "pipeline trials differ across worker counts")?;
    let s1 = harness::threshold_scan(&[3], &[1, 2], &[0.01, 0.02], 1000, 22, &caps, 1).map_err(|e| e.to_string())?;
    let s3 = harness::threshold_scan(&[3], &[1, 2], &[0.01, 0.02], 1000, 22, &caps, 3).map_err(|e| e.to_string())?;
    let csv = |s: &harness::ScanResult| {
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        out
    };
    ensure(csv(&s1) == csv(&s3), "scan CSV differs across worker counts")?;
    let cfg = ExperimentConfig { ns: vec![2, 3], trials: 2000, epsilon: 0.01, seed: 23, ..Default::default() };
    let e1 = harness::end_to_end(&cfg, 1).map_err(|e| e.to_string())?;
    let e2 = harness::end_to_end(&cfg, 2).map_err(|e| e.to_string())?;
    ensure(e1 == e2, "end-to-end rows differ across worker counts")?;
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    harness::write_trace(&p, &model, 50, 24, &mut t1).map_err(|e| e.to_string())?;
    harness::write_trace(&p, &model, 50, 24, &mut t2).map_err(|e| e.to_string())?;
    ensure(t1 == t2, "trace output differs between runs")?;
    Ok(format!("identical outputs for 1 vs 4, 1 vs 3 and 1 vs 2 workers ({} failures in 3000 trials)", a.0))
}

/// Writes to the process stdout directly so the lines show without `--nocapture`.
fn report(line: &str) {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").and_then(|_| out.flush()).expect("stdout is writable");
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("code parameters of the [[15,1,3]] block", code_parameters),
        ("transversal T partition", transversal_t),
        ("transversal CS gadget", cs_gadget),
        ("two-block merge structure", merge_correctness),
        ("per-block depth-1 gates on k=3 chains", chain_depth_one_gates),
        ("GHZ parallelization equivalence", parallel_equivalence),
        ("exponential-sum and Ising identities", exponential_sum_identity),
        ("single-fault tolerance of the k=2 pipeline", single_fault_tolerance),
        ("single-shot suppression L=5 vs L=3", single_shot_suppression),
        ("threshold crossing at k=1", threshold_crossing),
        ("TV union bound", tv_union_bound),
        ("reproducibility across worker counts", reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => report(&format!("PASS {:>2} {name}: {detail} ({:.1?})", i + 1, t0.elapsed())),
            Err(why) => {
                report(&format!("FAIL {:>2} {name}: {why} ({:.1?})", i + 1, t0.elapsed()));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
