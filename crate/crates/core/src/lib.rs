//! Exact numerical laboratory for quantum iterative power algorithms.
//!
//! Diagonal Ising Hamiltonians are built from weighted MaxCut instances and
//! analysed exhaustively: iteration bounds for the exponential and
//! double-exponential oracles, the separation inequality system with its
//! eigenvalue lower bounds, variational imaginary-time evolution on a small
//! statevector simulator, and the growth of the algorithmic error under
//! Hamiltonian upscaling.

// Negated float comparisons deliberately treat NaN as a failed check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod error_model;
pub mod graph;
pub mod harness;
pub mod ising;
pub mod plot;
pub mod power;
pub mod separation;
pub mod statevector;
pub mod variational;

pub use error::{Error, Result};
pub use graph::{BasisState, Edge, WeightedGraph};
pub use ising::{IsingHamiltonian, IsingTerm, SpectrumSummary};
pub use power::{IterationBoundEstimate, MajorityOutcome, OracleFunction, SpectralPopulation};
pub use separation::{ConditionReport, SeparationConstants};
pub use statevector::{AnsatzSpec, DiagonalObservable, InitialState, StateVector};
pub use variational::{EvolutionConfig, EvolutionMode, McLachlanSystem, Trajectory, TrajectoryRecord};
