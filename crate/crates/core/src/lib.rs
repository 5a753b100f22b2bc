//! Coupled cavity arrays of five-level atoms and the effective spin-1 chains
//! they reduce to.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: physical parameters, regime validation and the closed-form
//!   effective coefficients.
//! - [`hilbert`]: composite atom × photon bases, product states and mixtures.
//! - [`operators`]: sparse Hermitian Hamiltonians for every model in the chain
//!   of reductions, plus the spin-1 algebra.
//! - [`dynamics`]: static, time-dependent and product-formula propagation.
//! - [`observables`]: level populations, magnetization and sampled channels.
//! - [`scenario`]: configurable runs, CSV output and run comparison.
//!
//! All frequencies are in units of the cavity coupling `g1`; times in `1/g1`.

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod model;
pub mod observables;
pub mod operators;
pub mod scenario;
pub(crate) mod sparse;

pub use num_complex::Complex64 as C64;

pub use crate::{
    dynamics::{
        evolve, evolve_mixture, evolve_static, evolve_timedep, trotter_evolve, Method,
        PropagatorConfig, Route, TimeGrid, Trajectory, TrotterOrder, TrotterSequence,
    },
    error::{Error, Result},
    hilbert::{
        build_space, fig2b_mixture, product_state, AtomicLevels, BasisLabel, HilbertSpace,
        Level, MixtureState, PhotonTruncation, StateVector,
    },
    model::{
        compute_xy_coefficients, compute_zz_coefficients, mode_frequencies, validate_xy_params,
        validate_zz_params, Boundary, Check, CheckKind, ModelParams, Status, ValidationReport,
        ValidationThresholds, XyCoefficients, ZzCoefficients, ZzParams,
    },
    observables::{
        level_distribution, population, total_magnetization, Channel, Populations, TimeSeries,
    },
    operators::{
        build_h_eliminated, build_h_full, build_h_xy, build_h_zz, build_h_zz_full,
        build_h_zz_intermediate, spin1_operators, PhaseTerm, SparseHermitianOperator,
        Spin1Operators,
    },
    scenario::{compare_runs, compare_series, run_scenario, DeviationSummary, RunRecord, Scenario},
    sparse::CsrMatrix,
};
