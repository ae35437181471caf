//! Tetrahedral color codes, tetrahelix chains built by lattice surgery,
//! sparse IQP circuit compilation, and Monte Carlo simulation of the
//! prepare / merge / measure / decode pipeline under local stochastic noise.

pub mod colex;
pub mod csscode;
pub mod decoder;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod iqp;
pub mod noise;
pub mod surgery;

pub use colex::{build_tetrahedral_colex, validate_colex, Colex, ColexReport};
pub use csscode::{Basis, CssCode, Distance, LogicalPhase, TPartition};
pub use decoder::{Pipeline, SyndromeDecoder};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector, CosetSearch};
pub use harness::{ExperimentConfig, ScanResult};
pub use iqp::{Distribution, IqpCircuit, ParallelLayout};
pub use noise::{FaultSet, NoiseModel, StageLayout};
pub use surgery::{build_tetrahelix, TetrahelixCode};
