//! Benchmarks for the `cavispin` propagators and Hamiltonian builders; see
//! `benches/propagators.rs`.
