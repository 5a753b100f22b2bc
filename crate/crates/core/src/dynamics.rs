//! Schrödinger propagation of pure states and mixtures.
//!
//! Static Hamiltonians go through an exact dense eigendecomposition below a
//! dimension threshold and a Lanczos (Krylov) exponential above it. Explicitly
//! time-dependent Hamiltonians use classic RK4 with step-doubling error
//! control, forced to land on every grid point.

use std::{fmt, sync::Arc};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::{
    error::{Error, Result},
    hilbert::{HilbertSpace, MixtureState, StateVector},
    operators::SparseHermitianOperator,
};

const ZERO: C64 = C64::new(0.0, 0.0);
const MINUS_I: C64 = C64::new(0.0, -1.0);

/// Uniform sampling grid in units of `1/g1`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        let g = Self { t_start, t_end, n_samples };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {}", self.n_samples)));
        }
        if !self.t_start.is_finite() || !self.t_end.is_finite() || self.t_end <= self.t_start {
            return Err(Error::InvalidGrid(format!("t_end {} must exceed t_start {}", self.t_end, self.t_start)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_samples - 1) as f64
    }

    /// Grid points; the last one is exactly `t_end`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.spacing();
        (0..self.n_samples)
            .map(|k| if k + 1 == self.n_samples { self.t_end } else { self.t_start + k as f64 * dt })
            .collect()
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Eigendecomposition,
    Krylov,
    Rk4Adaptive,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Eigendecomposition => "eigendecomposition",
            Self::Krylov => "krylov",
            Self::Rk4Adaptive => "rk4-adaptive",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagatorConfig {
    pub method: Method,
    /// Local error tolerance per accepted step (RK4 and Krylov).
    pub tolerance: f64,
    /// Largest dimension handled by dense eigendecomposition.
    pub dense_threshold: usize,
    /// Upper bound on the RK4 step.
    pub max_step: f64,
    /// Maximum Krylov subspace dimension.
    pub krylov_dim: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { method: Method::Eigendecomposition, tolerance: 1e-9, dense_threshold: 4096, max_step: 1.0, krylov_dim: 30 }
    }
}

impl PropagatorConfig {
    pub fn with_method(method: Method) -> Self {
        Self { method, ..Self::default() }
    }

    fn check(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0;
        if !positive(self.tolerance) || !positive(self.max_step) || self.krylov_dim < 2 {
            return Err(Error::Config(format!("invalid propagator settings {self:?}")));
        }
        Ok(())
    }
}

/// How a trajectory was actually computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub method: Method,
    /// Set when the requested method was replaced (dense above threshold).
    pub fallback_from: Option<Method>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Route {
    fn new(method: Method) -> Self {
        Self { method, fallback_from: None, accepted_steps: 0, rejected_steps: 0 }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.method)?;
        if let Some(from) = self.fallback_from {
            write!(f, " (fallback from {from})")?;
        }
        if self.method != Method::Eigendecomposition {
            write!(f, " [{} steps, {} rejected]", self.accepted_steps, self.rejected_steps)?;
        }
        Ok(())
    }
}

/// States (or mixtures) sampled on a grid.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub grid: TimeGrid,
    pub times: Vec<f64>,
    pub samples: Vec<S>,
    pub route: Route,
}

impl<S> Trajectory<S> {
    pub fn last(&self) -> &S {
        self.samples.last().expect("grids have at least two samples")
    }
}

/// Dense spectral decomposition `H = V diag(w) V^†` of a static operator.
pub struct EigenPropagator {
    values: DVector<f64>,
    vectors: DMatrix<C64>,
}

impl EigenPropagator {
    pub fn new(h: &SparseHermitianOperator) -> Result<Self> {
        if !h.is_static() {
            return Err(Error::Operator("eigendecomposition needs a static Hamiltonian".into()));
        }
        let eig = SymmetricEigen::new(h.static_part().to_dense());
        Ok(Self { values: eig.eigenvalues, vectors: eig.eigenvectors })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.values
    }

    fn coefficients(&self, psi: &[C64]) -> DVector<C64> {
        self.vectors.ad_mul(&DVector::from_column_slice(psi))
    }

    fn rebuild(&self, coefs: &DVector<C64>, t: f64) -> Vec<C64> {
        let phased = DVector::from_iterator(
            coefs.len(),
            coefs.iter().zip(self.values.iter()).map(|(c, w)| c * C64::from_polar(1.0, -w * t)),
        );
        (&self.vectors * phased).as_slice().to_vec()
    }

    /// `e^{-i H t} psi`.
    pub fn apply(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        self.rebuild(&self.coefficients(psi), t)
    }

    /// The dense unitary `e^{-i H t}`.
    pub fn unitary(&self, t: f64) -> DMatrix<C64> {
        let phases = DVector::from_iterator(self.values.len(), self.values.iter().map(|w| C64::from_polar(1.0, -w * t)));
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |r, c| self.vectors[(r, c)] * phases[c]);
        scaled * self.vectors.adjoint()
    }
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// One Krylov approximation of `e^{-i H tau} psi` with an a-posteriori error
/// estimate.
fn krylov_apply(h: &SparseHermitianOperator, psi: &[C64], tau: f64, m_max: usize) -> (Vec<C64>, f64) {
    let dim = psi.len();
    let beta0 = norm(psi);
    if beta0 == 0.0 {
        return (psi.to_vec(), 0.0);
    }
    let m_max = m_max.min(dim);
    let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|v| v / beta0).collect()];
    let mut alphas = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![ZERO; dim];
    let mut residual_beta = 0.0;
    let scale = h.norm_bound().max(f64::MIN_POSITIVE);
    for j in 0..m_max {
        h.apply(0.0, &basis[j], &mut w);
        let alpha = dot(&basis[j], &w).re;
        alphas.push(alpha);
        // full reorthogonalisation, applied twice
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = norm(&w);
        if j + 1 == m_max || beta <= 1e-13 * scale {
            residual_beta = if beta <= 1e-13 * scale { 0.0 } else { beta };
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        t[(k, k)] = alphas[k];
        if k + 1 < m {
            t[(k, k + 1)] = betas[k];
            t[(k + 1, k)] = betas[k];
        }
    }
    let eig = SymmetricEigen::new(t);
    // y = Q e^{-i L tau} Q^T e1
    let small: Vec<C64> = (0..m)
        .map(|r| {
            (0..m)
                .map(|k| eig.eigenvectors[(r, k)] * eig.eigenvectors[(0, k)] * C64::from_polar(1.0, -eig.eigenvalues[k] * tau))
                .sum()
        })
        .collect();
    let mut out = vec![ZERO; dim];
    for (v, c) in basis.iter().zip(&small) {
        out.iter_mut().zip(v).for_each(|(o, x)| *o += beta0 * c * x);
    }
    let err = beta0 * residual_beta * small[m - 1].norm();
    (out, err)
}

fn rk4_step(h: &SparseHermitianOperator, t: f64, y: &[C64], dt: f64) -> Vec<C64> {
    let n = y.len();
    let rhs = |t: f64, x: &[C64]| {
        let mut out = vec![ZERO; n];
        h.apply(t, x, &mut out);
        out.iter_mut().for_each(|v| *v *= MINUS_I);
        out
    };
    let axpy = |a: &[C64], s: f64, b: &[C64]| -> Vec<C64> { a.iter().zip(b).map(|(x, k)| x + k * s).collect() };
    let k1 = rhs(t, y);
    let k2 = rhs(t + 0.5 * dt, &axpy(y, 0.5 * dt, &k1));
    let k3 = rhs(t + 0.5 * dt, &axpy(y, 0.5 * dt, &k2));
    let k4 = rhs(t + dt, &axpy(y, dt, &k3));
    (0..n).map(|i| y[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0)).collect()
}

/// Adaptive stepping state shared across grid intervals.
struct Stepper<'a> {
    h: &'a SparseHermitianOperator,
    cfg: PropagatorConfig,
    step: f64,
    accepted: usize,
    rejected: usize,
}

impl<'a> Stepper<'a> {
    fn new(h: &'a SparseHermitianOperator, cfg: PropagatorConfig) -> Self {
        let guess = 0.1 / h.norm_bound().max(1e-12);
        Self { h, cfg, step: guess.min(cfg.max_step), accepted: 0, rejected: 0 }
    }

    fn underflow(t: f64, step: f64) -> Result<()> {
        if step < 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t, step });
        }
        Ok(())
    }

    /// RK4 with step doubling and local extrapolation.
    fn rk4_advance(&mut self, mut y: Vec<C64>, t0: f64, t1: f64) -> Result<Vec<C64>> {
        let mut t = t0;
        while t < t1 {
            let landing = t1 - t;
            let dt = self.step.min(landing);
            let coarse = rk4_step(self.h, t, &y, dt);
            let mid = rk4_step(self.h, t, &y, 0.5 * dt);
            let fine = rk4_step(self.h, t + 0.5 * dt, &mid, 0.5 * dt);
            let diff: Vec<C64> = fine.iter().zip(&coarse).map(|(f, c)| (f - c) / 15.0).collect();
            let err = norm(&diff);
            let factor = if err == 0.0 { 4.0 } else { (0.9 * (self.cfg.tolerance / err).powf(0.2)).clamp(0.2, 4.0) };
            if err <= self.cfg.tolerance {
                y = fine.iter().zip(&diff).map(|(f, d)| f + d).collect();
                t = if dt == landing { t1 } else { t + dt };
                self.accepted += 1;
                // a step truncated to land on the grid says nothing about growth
                if dt == self.step || factor < 1.0 {
                    self.step = (dt * factor).min(self.cfg.max_step);
                }
            } else {
                self.rejected += 1;
                self.step = dt * factor;
                Self::underflow(t, self.step)?;
            }
        }
        Ok(y)
    }

    fn krylov_advance(&mut self, mut y: Vec<C64>, t0: f64, t1: f64) -> Result<Vec<C64>> {
        let mut t = t0;
        if self.step <= 0.0 || !self.step.is_finite() {
            self.step = t1 - t0;
        }
        while t < t1 {
            let landing = t1 - t;
            let tau = self.step.min(landing);
            let (next, err) = krylov_apply(self.h, &y, tau, self.cfg.krylov_dim);
            if err <= self.cfg.tolerance {
                y = next;
                t = if tau == landing { t1 } else { t + tau };
                self.accepted += 1;
                if tau == self.step {
                    self.step *= 1.5;
                }
            } else {
                self.rejected += 1;
                self.step = 0.5 * tau;
                Self::underflow(t, self.step)?;
            }
        }
        Ok(y)
    }
}

enum Engine<'a> {
    Eigen(EigenPropagator),
    Krylov(&'a SparseHermitianOperator),
    Rk4(&'a SparseHermitianOperator),
}

impl<'a> Engine<'a> {
    fn prepare(h: &'a SparseHermitianOperator, cfg: &PropagatorConfig) -> Result<(Self, Route)> {
        cfg.check()?;
        if !h.is_static() {
            return Ok((Engine::Rk4(h), Route::new(Method::Rk4Adaptive)));
        }
        Ok(match cfg.method {
            Method::Eigendecomposition if h.dimension() > cfg.dense_threshold => {
                let mut route = Route::new(Method::Krylov);
                route.fallback_from = Some(Method::Eigendecomposition);
                (Engine::Krylov(h), route)
            }
            Method::Eigendecomposition => (Engine::Eigen(EigenPropagator::new(h)?), Route::new(Method::Eigendecomposition)),
            Method::Krylov => (Engine::Krylov(h), Route::new(Method::Krylov)),
            Method::Rk4Adaptive => (Engine::Rk4(h), Route::new(Method::Rk4Adaptive)),
        })
    }

    fn run(&self, psi0: &StateVector, grid: &TimeGrid, cfg: &PropagatorConfig, route: &mut Route) -> Result<Vec<StateVector>> {
        let space: &Arc<HilbertSpace> = psi0.space();
        let times = grid.times();
        let wrap = |amps: Vec<C64>| StateVector::from_parts(space.clone(), amps);
        match self {
            Engine::Eigen(prop) => {
                let coefs = prop.coefficients(psi0.amplitudes());
                // the first sample is the initial state itself, not V V^† psi0
                let mut out = vec![psi0.clone()];
                out.extend(times[1..].iter().map(|&t| wrap(prop.rebuild(&coefs, t - grid.t_start))));
                Ok(out)
            }
            Engine::Krylov(h) | Engine::Rk4(h) => {
                let mut stepper = Stepper::new(h, *cfg);
                let mut y = psi0.amplitudes().to_vec();
                let mut out = vec![psi0.clone()];
                for pair in times.windows(2) {
                    y = match self {
                        Engine::Krylov(_) => stepper.krylov_advance(y, pair[0], pair[1])?,
                        _ => stepper.rk4_advance(y, pair[0], pair[1])?,
                    };
                    out.push(wrap(y.clone()));
                }
                route.accepted_steps += stepper.accepted;
                route.rejected_steps += stepper.rejected;
                Ok(out)
            }
        }
    }
}

fn check_space(h: &SparseHermitianOperator, psi: &StateVector) -> Result<()> {
    h.space().check_same(psi.space())
}

/// `psi(t) = e^{-i H (t - t_start)} psi0` on the grid.
pub fn evolve_static(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
) -> Result<Trajectory<StateVector>> {
    if !h.is_static() {
        return Err(Error::Operator("evolve_static called with a time-dependent Hamiltonian".into()));
    }
    evolve(h, psi0, grid, cfg)
}

/// Solves `i d psi/dt = H(t) psi` with adaptive RK4, for static or
/// time-dependent `H`.
pub fn evolve_timedep(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
) -> Result<Trajectory<StateVector>> {
    evolve(h, psi0, grid, &PropagatorConfig { method: Method::Rk4Adaptive, ..*cfg })
}

/// Dispatches on the Hamiltonian: static operators use `cfg.method`,
/// time-dependent ones always use adaptive RK4.
pub fn evolve(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
) -> Result<Trajectory<StateVector>> {
    grid.check()?;
    check_space(h, psi0)?;
    let (engine, mut route) = Engine::prepare(h, cfg)?;
    let samples = engine.run(psi0, grid, cfg, &mut route)?;
    Ok(Trajectory { grid: *grid, times: grid.times(), samples, route })
}

/// Evolves every member of a mixture; weights are unchanged.
pub fn evolve_mixture(
    h: &SparseHermitianOperator,
    m: &MixtureState,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
) -> Result<Trajectory<MixtureState>> {
    grid.check()?;
    for (_, s) in m.members() {
        check_space(h, s)?;
    }
    let (engine, mut route) = Engine::prepare(h, cfg)?;
    let runs = m
        .members()
        .iter()
        .map(|(_, s)| engine.run(s, grid, cfg, &mut route))
        .collect::<Result<Vec<_>>>()?;
    let samples = (0..grid.n_samples)
        .map(|k| {
            let members = m.members().iter().zip(&runs).map(|((w, _), run)| (*w, run[k].clone())).collect();
            MixtureState::new(members)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory { grid: *grid, times: grid.times(), samples, route })
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrotterOrder {
    /// `e^{-i H_zz dt} e^{-i H_xy dt}` per period
    #[default]
    XyFirst,
    /// `e^{-i H_xy dt} e^{-i H_zz dt}` per period
    ZzFirst,
}

/// First-order alternation of two static Hamiltonians with exact factors.
pub struct TrotterSequence {
    space: Arc<HilbertSpace>,
    period: DMatrix<C64>,
    dt: f64,
}

impl TrotterSequence {
    pub fn new(
        h_xy: &SparseHermitianOperator,
        h_zz: &SparseHermitianOperator,
        dt: f64,
        order: TrotterOrder,
    ) -> Result<Self> {
        h_xy.space().check_same(h_zz.space())?;
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::Config(format!("Trotter step must be positive, got {dt}")));
        }
        let u_xy = EigenPropagator::new(h_xy)?.unitary(dt);
        let u_zz = EigenPropagator::new(h_zz)?.unitary(dt);
        let period = match order {
            TrotterOrder::XyFirst => u_zz * u_xy,
            TrotterOrder::ZzFirst => u_xy * u_zz,
        };
        Ok(Self { space: h_xy.space().clone(), period, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn advance(&self, psi: &StateVector, n_steps: usize) -> Result<StateVector> {
        self.space.check_same(psi.space())?;
        let mut v = DVector::from_column_slice(psi.amplitudes());
        for _ in 0..n_steps {
            v = &self.period * v;
        }
        Ok(StateVector::from_parts(self.space.clone(), v.as_slice().to_vec()))
    }
}

/// `[e^{-i H_zz dt} e^{-i H_xy dt}]^n psi0`.
pub fn trotter_evolve(
    h_xy: &SparseHermitianOperator,
    h_zz: &SparseHermitianOperator,
    dt: f64,
    n_steps: usize,
    psi0: &StateVector,
) -> Result<StateVector> {
    TrotterSequence::new(h_xy, h_zz, dt, TrotterOrder::XyFirst)?.advance(psi0, n_steps)
}
