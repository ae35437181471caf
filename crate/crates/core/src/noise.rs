//! I.i.d. local stochastic faults over the space-time locations of the
//! encoded pipeline, and their propagation to Pauli frames.
//!
//! A pipeline run visits six stages in order: data preparation, the Z
//! syndrome round, the idle/merge round on data, the pair measurements, the
//! depth-1 diagonal layer and the final X-basis measurements. Data locations
//! carry Pauli faults; measurement locations flip their outcome when hit by a
//! measurement fault or by a Pauli that anticommutes with the measured basis.

use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub epsilon: f64,
    pub mix_x: f64,
    pub mix_z: f64,
    pub mix_y: f64,
    pub mix_meas: f64,
}

impl NoiseModel {
    pub fn new(epsilon: f64, mix_x: f64, mix_z: f64, mix_y: f64, mix_meas: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidInput(format!("epsilon {epsilon} outside [0, 1]")));
        }
        let mix = [mix_x, mix_z, mix_y, mix_meas];
        if mix.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidInput("channel mix entries must be nonnegative".into()));
        }
        let total: f64 = mix.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("channel mix sums to {total}, expected 1")));
        }
        Ok(NoiseModel { epsilon, mix_x, mix_z, mix_y, mix_meas })
    }

    /// Equal weight on X, Z, Y and measurement flips.
    pub fn uniform(epsilon: f64) -> Result<Self> {
        NoiseModel::new(epsilon, 0.25, 0.25, 0.25, 0.25)
    }

    fn draw_label<R: Rng>(&self, rng: &mut R) -> FaultLabel {
        let u: f64 = rng.gen::<f64>() * (self.mix_x + self.mix_z + self.mix_y + self.mix_meas);
        if u < self.mix_x {
            FaultLabel::X
        } else if u < self.mix_x + self.mix_z {
            FaultLabel::Z
        } else if u < self.mix_x + self.mix_z + self.mix_y {
            FaultLabel::Y
        } else {
            FaultLabel::Meas
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaultLabel {
    X,
    Z,
    Y,
    Meas,
}

impl FaultLabel {
    pub const ALL: [FaultLabel; 4] = [FaultLabel::X, FaultLabel::Z, FaultLabel::Y, FaultLabel::Meas];

    pub fn has_x(self) -> bool {
        matches!(self, FaultLabel::X | FaultLabel::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, FaultLabel::Z | FaultLabel::Y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub location: usize,
    pub label: FaultLabel,
}

/// Faulty locations in increasing order, plus one twirl coin per data qubit
/// used when an X component meets the diagonal layer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultSet {
    pub faults: Vec<Fault>,
    pub twirl: BitVector,
}

impl FaultSet {
    pub fn empty(layout: &StageLayout) -> FaultSet {
        FaultSet { faults: Vec::new(), twirl: BitVector::zeros(layout.data_qubits) }
    }

    pub fn single(layout: &StageLayout, location: usize, label: FaultLabel) -> FaultSet {
        FaultSet { faults: vec![Fault { location, label }], twirl: BitVector::zeros(layout.data_qubits) }
    }

    pub fn len(&self) -> usize {
        self.faults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faults.is_empty()
    }

    pub fn contains(&self, location: usize) -> bool {
        self.faults.binary_search_by_key(&location, |f| f.location).is_ok()
    }

    /// Union of two fault sets on disjoint locations, keeping `self`'s coins.
    pub fn union(&self, other: &FaultSet) -> Result<FaultSet> {
        let mut faults = self.faults.clone();
        for f in &other.faults {
            if self.contains(f.location) {
                return Err(Error::InvalidInput(format!("location {} is faulty in both sets", f.location)));
            }
            faults.push(*f);
        }
        faults.sort_by_key(|f| f.location);
        Ok(FaultSet { faults, twirl: self.twirl.clone() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Stage {
    Prep,
    Syndrome,
    Merge,
    PairMeasurement,
    Diagonal,
    Final,
}

impl Stage {
    pub const ALL: [Stage; 6] =
        [Stage::Prep, Stage::Syndrome, Stage::Merge, Stage::PairMeasurement, Stage::Diagonal, Stage::Final];

    pub fn is_measurement(self) -> bool {
        matches!(self, Stage::Syndrome | Stage::PairMeasurement | Stage::Final)
    }

    /// Whether a fault label flips an outcome measured at this stage.
    pub fn flips(self, label: FaultLabel) -> bool {
        match self {
            Stage::Syndrome | Stage::PairMeasurement => matches!(label, FaultLabel::X | FaultLabel::Y | FaultLabel::Meas),
            Stage::Final => matches!(label, FaultLabel::Z | FaultLabel::Y | FaultLabel::Meas),
            _ => false,
        }
    }
}

/// Location numbering of one pipeline run: the stages in order, each a
/// contiguous range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageLayout {
    pub data_qubits: usize,
    pub syndrome_bits: usize,
    pub pair_bits: usize,
    pub merge_round: bool,
    ranges: [Range<usize>; 6],
}

impl StageLayout {
    pub fn new(data_qubits: usize, syndrome_bits: usize, pair_bits: usize, merge_round: bool) -> StageLayout {
        let sizes = [
            data_qubits,
            syndrome_bits,
            if merge_round { data_qubits } else { 0 },
            pair_bits,
            data_qubits,
            data_qubits,
        ];
        let mut start = 0;
        let ranges = sizes.map(|s| {
            let r = start..start + s;
            start += s;
            r
        });
        StageLayout { data_qubits, syndrome_bits, pair_bits, merge_round, ranges }
    }

    pub fn size(&self) -> usize {
        self.ranges[5].end
    }

    pub fn range(&self, stage: Stage) -> Range<usize> {
        self.ranges[stage as usize].clone()
    }

    /// Stage and in-stage index of a location.
    pub fn locate(&self, location: usize) -> Option<(Stage, usize)> {
        Stage::ALL.into_iter().find_map(|s| {
            let r = self.range(s);
            r.contains(&location).then(|| (s, location - r.start))
        })
    }

    /// Splits a fault set into per-stage Pauli components and outcome flips.
    pub fn split(&self, faults: &FaultSet) -> Result<StageFaults> {
        let n = self.data_qubits;
        let mut out = StageFaults {
            prep_x: BitVector::zeros(n),
            prep_z: BitVector::zeros(n),
            syndrome_flips: BitVector::zeros(self.syndrome_bits),
            merge_x: BitVector::zeros(n),
            merge_z: BitVector::zeros(n),
            pair_flips: BitVector::zeros(self.pair_bits),
            diag_x: BitVector::zeros(n),
            diag_z: BitVector::zeros(n),
            final_flips: BitVector::zeros(n),
        };
        for f in &faults.faults {
            let (stage, i) = self
                .locate(f.location)
                .ok_or_else(|| Error::InvalidInput(format!("fault location {} outside the layout", f.location)))?;
            let (xs, zs) = match stage {
                Stage::Prep => (&mut out.prep_x, &mut out.prep_z),
                Stage::Merge => (&mut out.merge_x, &mut out.merge_z),
                Stage::Diagonal => (&mut out.diag_x, &mut out.diag_z),
                Stage::Syndrome | Stage::PairMeasurement | Stage::Final => {
                    if stage.flips(f.label) {
                        match stage {
                            Stage::Syndrome => out.syndrome_flips.flip(i),
                            Stage::PairMeasurement => out.pair_flips.flip(i),
                            _ => out.final_flips.flip(i),
                        }
                    }
                    continue;
                }
            };
            if f.label.has_x() {
                xs.flip(i);
            }
            if f.label.has_z() {
                zs.flip(i);
            }
        }
        Ok(out)
    }
}

/// Per-stage fault components of one run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageFaults {
    pub prep_x: BitVector,
    pub prep_z: BitVector,
    pub syndrome_flips: BitVector,
    pub merge_x: BitVector,
    pub merge_z: BitVector,
    pub pair_flips: BitVector,
    pub diag_x: BitVector,
    pub diag_z: BitVector,
    pub final_flips: BitVector,
}

/// Uncorrected propagation of a fault set to the end of the run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Propagated {
    /// X component on data at the final measurement.
    pub x: BitVector,
    /// Z component on data at the final measurement, including twirl-induced Z.
    pub z: BitVector,
    pub syndrome_flips: BitVector,
    pub pair_flips: BitVector,
    pub final_flips: BitVector,
}

impl Propagated {
    /// Flips of the final X-basis outcomes.
    pub fn outcome_flips(&self) -> BitVector {
        self.z.xor(&self.final_flips)
    }
}

/// X components reaching the diagonal layer pick up a Z on qubits whose twirl coin is set.
pub fn twirl_through_diagonal(x: &BitVector, coins: &BitVector) -> BitVector {
    x.and(coins)
}

/// Propagates faults with no corrections applied.
pub fn propagate(faults: &FaultSet, layout: &StageLayout) -> Result<Propagated> {
    let s = layout.split(faults)?;
    let x = s.prep_x.xor(&s.merge_x).xor(&s.diag_x);
    let mut z = s.prep_z.xor(&s.merge_z).xor(&s.diag_z);
    z.xor_assign(&twirl_through_diagonal(&x, &faults.twirl));
    Ok(Propagated { x, z, syndrome_flips: s.syndrome_flips, pair_flips: s.pair_flips, final_flips: s.final_flips })
}

/// Samples each location faulty with probability `epsilon`, labels from the mix.
pub fn sample_iid_faults_with<R: Rng>(model: &NoiseModel, layout: &StageLayout, rng: &mut R) -> FaultSet {
    let size = layout.size();
    let eps = model.epsilon;
    let mut faults = Vec::new();
    if eps >= 1.0 {
        for location in 0..size {
            faults.push(Fault { location, label: model.draw_label(rng) });
        }
    } else if eps > 0.0 {
        // geometric gaps between faulty locations
        let log_q = (1.0 - eps).ln();
        let mut pos = 0usize;
        loop {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let gap = (u.ln() / log_q).floor();
            if !gap.is_finite() || gap >= (size - pos) as f64 {
                break;
            }
            pos += gap as usize;
            faults.push(Fault { location: pos, label: model.draw_label(rng) });
            pos += 1;
            if pos >= size {
                break;
            }
        }
    }
    let coins: Vec<bool> = (0..layout.data_qubits).map(|_| rng.gen()).collect();
    FaultSet { faults, twirl: BitVector::from_bools(&coins) }
}

pub fn sample_iid_faults(model: &NoiseModel, layout: &StageLayout, seed: u64) -> FaultSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_iid_faults_with(model, layout, &mut rng)
}

/// Outcome of one preparation or merge, as seen by the fault analysis.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepReport {
    /// X error left on the block after the single correction step.
    pub residual: BitVector,
    /// The residual, if fully converted to Z by the diagonal layer, defeats the block decoder.
    pub tetrahedral_noncorrectable: bool,
    /// A merge involving this block decoded the wrong logical bit.
    pub merge_noncorrectable: bool,
}

/// Aggregated flag counts; the ratios estimate the effective preparation and merge failure rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepCounters {
    pub preparations: u64,
    pub tetrahedral_noncorrectable: u64,
    pub merges: u64,
    pub merge_noncorrectable: u64,
}

impl PrepCounters {
    pub fn add(&mut self, other: &PrepCounters) {
        self.preparations += other.preparations;
        self.tetrahedral_noncorrectable += other.tetrahedral_noncorrectable;
        self.merges += other.merges;
        self.merge_noncorrectable += other.merge_noncorrectable;
    }

    pub fn prep_rate(&self) -> f64 {
        ratio(self.tetrahedral_noncorrectable, self.preparations)
    }

    pub fn merge_rate(&self) -> f64 {
        ratio(self.merge_noncorrectable, self.merges)
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}
