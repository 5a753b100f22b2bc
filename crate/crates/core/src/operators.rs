//! Hamiltonians of every model in the reduction chain, as sparse Hermitian
//! matrices over a [`HilbertSpace`].
//!
//! Time-dependent Hamiltonians are kept as a static part plus phase-carrying
//! terms, `H(t) = H_0 + sum_m (T_m e^{i w_m t} + T_m^† e^{-i w_m t})`, and are
//! only materialised on request.

use std::{io::Write, sync::Arc};

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;

use crate::{
    error::{Error, Result},
    hilbert::{build_space, AtomicLevels, HilbertSpace, Level, PhotonTruncation, StateVector},
    model::{validate_zz_params, Boundary, ModelParams, ValidationReport, ValidationThresholds, XyCoefficients, ZzCoefficients, ZzParams},
    sparse::CsrMatrix,
};

const ZERO: C64 = C64::new(0.0, 0.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// A non-Hermitian block `T` entering as `T e^{i w t} + h.c.`.
#[derive(Clone, Debug)]
pub struct PhaseTerm {
    pub frequency: f64,
    matrix: CsrMatrix,
    adjoint: CsrMatrix,
}

impl PhaseTerm {
    pub fn new(frequency: f64, matrix: CsrMatrix) -> Self {
        let adjoint = matrix.adjoint();
        Self { frequency, matrix, adjoint }
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }
}

#[derive(Clone, Debug)]
pub struct SparseHermitianOperator {
    space: Arc<HilbertSpace>,
    static_part: CsrMatrix,
    phase_terms: Vec<PhaseTerm>,
}

impl SparseHermitianOperator {
    /// Wraps a static matrix; fails unless it is exactly Hermitian.
    pub fn new(space: Arc<HilbertSpace>, matrix: CsrMatrix) -> Result<Self> {
        Self::with_phase_terms(space, matrix, Vec::new())
    }

    pub fn with_phase_terms(space: Arc<HilbertSpace>, static_part: CsrMatrix, phase_terms: Vec<PhaseTerm>) -> Result<Self> {
        let dim = space.dimension();
        if static_part.dim() != dim || phase_terms.iter().any(|t| t.matrix.dim() != dim) {
            return Err(Error::Operator(format!("matrix dimension does not match space dimension {dim}")));
        }
        let residual = static_part.hermiticity_residual();
        if residual != 0.0 {
            return Err(Error::Operator(format!("static part is not Hermitian (residual {residual:e})")));
        }
        Ok(Self { space, static_part, phase_terms })
    }

    pub fn zero(space: Arc<HilbertSpace>) -> Self {
        let dim = space.dimension();
        Self { space, static_part: CsrMatrix::zeros(dim), phase_terms: Vec::new() }
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn dimension(&self) -> usize {
        self.space.dimension()
    }

    pub fn is_static(&self) -> bool {
        self.phase_terms.is_empty()
    }

    pub fn static_part(&self) -> &CsrMatrix {
        &self.static_part
    }

    pub fn phase_terms(&self) -> &[PhaseTerm] {
        &self.phase_terms
    }

    /// Matrix element `<row|H(0)|col>`.
    pub fn element(&self, row: usize, col: usize) -> C64 {
        self.at(0.0).static_part.get(row, col)
    }

    /// Materialises `H(t)` as a static operator.
    pub fn at(&self, t: f64) -> SparseHermitianOperator {
        if self.is_static() {
            return self.clone();
        }
        let mut trip: Vec<_> = self.static_part.triplets().collect();
        for term in &self.phase_terms {
            let phase = C64::from_polar(1.0, term.frequency * t);
            trip.extend(term.matrix.triplets().map(|(r, c, v)| (r, c, phase * v)));
            trip.extend(term.adjoint.triplets().map(|(r, c, v)| (r, c, phase.conj() * v)));
        }
        SparseHermitianOperator {
            space: self.space.clone(),
            static_part: CsrMatrix::from_triplets(self.dimension(), trip),
            phase_terms: Vec::new(),
        }
    }

    /// `y = H(t) x`.
    pub fn apply(&self, t: f64, x: &[C64], y: &mut [C64]) {
        y.iter_mut().for_each(|v| *v = ZERO);
        self.static_part.mul_add(re(1.0), x, y);
        for term in &self.phase_terms {
            let phase = C64::from_polar(1.0, term.frequency * t);
            term.matrix.mul_add(phase, x, y);
            term.adjoint.mul_add(phase.conj(), x, y);
        }
    }

    /// `max |H_ij - conj(H_ji)|` of `H(t)`.
    pub fn hermiticity_residual_at(&self, t: f64) -> f64 {
        self.at(t).static_part.hermiticity_residual()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.hermiticity_residual_at(0.0)
    }

    /// Bound on `||H(t)||` valid for every `t`.
    pub fn norm_bound(&self) -> f64 {
        self.static_part.inf_norm() + self.phase_terms.iter().map(|t| t.matrix.inf_norm() + t.adjoint.inf_norm()).sum::<f64>()
    }

    /// `<psi|H(0)|psi>`, real for Hermitian `H`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        self.space.check_same(psi.space())?;
        let mut y = vec![ZERO; self.dimension()];
        self.apply(0.0, psi.amplitudes(), &mut y);
        Ok(psi.amplitudes().iter().zip(&y).map(|(a, b)| (a.conj() * b).re).sum())
    }

    /// Largest entry modulus of `[H(0), other(0)]`, computed densely.
    pub fn commutator_norm(&self, other: &SparseHermitianOperator) -> Result<f64> {
        self.space.check_same(&other.space)?;
        let a = self.at(0.0).static_part;
        let b = other.at(0.0).static_part;
        Ok(a.matmul(&b).add(&b.matmul(&a).scaled(re(-1.0))).max_abs())
    }

    pub fn sum(&self, other: &SparseHermitianOperator) -> Result<SparseHermitianOperator> {
        self.space.check_same(&other.space)?;
        let mut phase_terms = self.phase_terms.clone();
        phase_terms.extend(other.phase_terms.iter().cloned());
        Ok(Self {
            space: self.space.clone(),
            static_part: self.static_part.add(&other.static_part),
            phase_terms,
        })
    }

    /// Writes `row,col,re,im` lines for every nonzero entry of `H(t)`.
    pub fn dump_triplets<W: Write>(&self, t: f64, mut out: W) -> Result<()> {
        writeln!(out, "row,col,re,im")?;
        for (r, c, v) in self.at(t).static_part.triplets() {
            writeln!(out, "{r},{c},{},{}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Single-site spin-1 matrices in the `(a, b, c)` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Spin1Operators {
    pub sz: Matrix3<C64>,
    pub splus: Matrix3<C64>,
    pub sminus: Matrix3<C64>,
    pub sx: Matrix3<C64>,
    pub sy: Matrix3<C64>,
}

pub fn spin1_operators() -> Spin1Operators {
    let r2 = re(2f64.sqrt());
    let sz = Matrix3::from_diagonal(&nalgebra::Vector3::new(re(1.0), ZERO, re(-1.0)));
    // sqrt2 (|a><b| + |b><c|)
    let splus = Matrix3::new(ZERO, r2, ZERO, ZERO, ZERO, r2, ZERO, ZERO, ZERO);
    let sminus = splus.adjoint();
    let sx = (splus + sminus) * re(0.5);
    let sy = (splus - sminus) / C64::new(0.0, 2.0);
    Spin1Operators { sz, splus, sminus, sx, sy }
}

/// Triplet accumulator for operators over one space.
struct Terms<'a> {
    space: &'a HilbertSpace,
    trip: Vec<(usize, usize, C64)>,
}

impl<'a> Terms<'a> {
    fn new(space: &'a HilbertSpace) -> Self {
        Self { space, trip: Vec::new() }
    }

    fn diagonal(&mut self, energy: impl Fn(usize) -> f64) {
        for i in 0..self.space.dimension() {
            let e = energy(i);
            if e != 0.0 {
                self.trip.push((i, i, re(e)));
            }
        }
    }

    /// `coef sum_j |to_j><from_j|`
    fn transition(&mut self, coef: C64, to: Level, from: Level) {
        if coef == ZERO {
            return;
        }
        let s = self.space;
        for i in 0..s.dimension() {
            for j in 0..s.n_sites() {
                if s.level_at(i, j) == from {
                    self.trip.push((s.with_level(i, j, to), i, coef));
                }
            }
        }
    }

    /// `coef sum_j a_j |to_j><from_j|`
    fn cavity_transition(&mut self, coef: C64, to: Level, from: Level) {
        if coef == ZERO {
            return;
        }
        let s = self.space;
        for i in 0..s.dimension() {
            for j in 0..s.n_sites() {
                if s.level_at(i, j) != from {
                    continue;
                }
                if let Some((k, amp)) = s.annihilate(i, j) {
                    self.trip.push((s.with_level(k, j, to), i, coef * amp));
                }
            }
        }
    }

    /// `J sum_links (a_p^† a_q + a_q^† a_p)`
    fn hopping(&mut self, j_hop: f64, boundary: Boundary) {
        if j_hop == 0.0 {
            return;
        }
        let s = self.space;
        let links = boundary.links(s.n_sites());
        for i in 0..s.dimension() {
            for &(p, q) in &links {
                for (from, to) in [(q, p), (p, q)] {
                    if let Some((k, amp)) = s.hop(i, from, to) {
                        self.trip.push((k, i, re(j_hop * amp)));
                    }
                }
            }
        }
    }

    /// `coef sum_j O_j` for a single-site spin-1 operator.
    fn site_sum(&mut self, coef: f64, local: &Matrix3<C64>) {
        if coef == 0.0 {
            return;
        }
        let s = self.space;
        for i in 0..s.dimension() {
            for j in 0..s.n_sites() {
                let x = s.level_at(i, j).index();
                for y in 0..3 {
                    let v = local[(y, x)];
                    if v != ZERO {
                        let k = s.with_level(i, j, Level::from_index(y).unwrap());
                        self.trip.push((k, i, coef * v));
                    }
                }
            }
        }
    }

    /// `coef sum_links O_p P_q`.
    fn bond_sum(&mut self, coef: f64, left: &Matrix3<C64>, right: &Matrix3<C64>, boundary: Boundary) {
        if coef == 0.0 {
            return;
        }
        let s = self.space;
        let links = boundary.links(s.n_sites());
        for i in 0..s.dimension() {
            for &(p, q) in &links {
                let xp = s.level_at(i, p).index();
                let xq = s.level_at(i, q).index();
                for yp in 0..3 {
                    let vp = left[(yp, xp)];
                    if vp == ZERO {
                        continue;
                    }
                    let ip = s.with_level(i, p, Level::from_index(yp).unwrap());
                    for yq in 0..3 {
                        let vq = right[(yq, xq)];
                        if vq != ZERO {
                            let k = s.with_level(ip, q, Level::from_index(yq).unwrap());
                            self.trip.push((k, i, coef * vp * vq));
                        }
                    }
                }
            }
        }
    }

    /// Adds the conjugate transpose of everything accumulated so far.
    fn plus_adjoint(mut self) -> Self {
        let adj: Vec<_> = self.trip.iter().map(|&(r, c, v)| (c, r, v.conj())).collect();
        self.trip.extend(adj);
        self
    }

    fn extend(&mut self, other: Terms<'_>) {
        self.trip.extend(other.trip);
    }

    fn matrix(self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.space.dimension(), self.trip)
    }
}

fn require_levels(space: &HilbertSpace, levels: AtomicLevels, what: &str) -> Result<()> {
    if space.atomic_levels() != levels {
        return Err(Error::Operator(format!(
            "{what} needs a {}-level space, got {} levels",
            levels.count(),
            space.atomic_levels().count()
        )));
    }
    Ok(())
}

fn require_sites(space: &HilbertSpace, n_sites: usize) -> Result<()> {
    if space.n_sites() != n_sites {
        return Err(Error::Operator(format!("parameters are for {n_sites} sites, space has {}", space.n_sites())));
    }
    Ok(())
}

/// Interaction-picture five-level Hamiltonian with four laser/cavity groups
/// rotating at `d1..d4` and static photon hopping.
pub fn build_h_full(p: &ModelParams, space: &Arc<HilbertSpace>) -> Result<SparseHermitianOperator> {
    p.check_structure()?;
    require_levels(space, AtomicLevels::Five, "the five-level Hamiltonian")?;
    require_sites(space, p.n_sites)?;
    use Level::*;
    let groups = [
        (p.d1, p.g1, A, p.om1, B), // (g1 a |d><a| + Ω1 |d><b|)
        (p.d2, p.g2, B, p.om2, A), // (g2 a |d><b| + Ω2 |d><a|)
        (p.d3, p.g3, B, p.om3, C), // (g3 a |e><b| + Ω3 |e><c|)
        (p.d4, p.g4, C, p.om4, B), // (g4 a |e><c| + Ω4 |e><b|)
    ];
    let mut phase_terms = Vec::new();
    for (m, (detuning, g, cavity_from, om, laser_from)) in groups.into_iter().enumerate() {
        let excited = if m < 2 { D } else { E };
        let mut t = Terms::new(space);
        t.cavity_transition(re(g), excited, cavity_from);
        t.transition(re(om), excited, laser_from);
        let matrix = t.matrix();
        if matrix.nnz() > 0 {
            phase_terms.push(PhaseTerm::new(detuning, matrix));
        }
    }
    let mut hop = Terms::new(space);
    hop.hopping(p.j_hop, p.boundary);
    SparseHermitianOperator::with_phase_terms(space.clone(), hop.matrix(), phase_terms)
}

/// Three-level Hamiltonian after eliminating `d` and `e`: photon-number Stark
/// shifts, laser Stark shifts, cavity-assisted Raman transitions and hopping.
pub fn build_h_eliminated(p: &ModelParams, space: &Arc<HilbertSpace>) -> Result<SparseHermitianOperator> {
    p.check_structure()?;
    require_levels(space, AtomicLevels::Three, "the eliminated Hamiltonian")?;
    require_sites(space, p.n_sites)?;
    let photon_shift = [p.g1 * p.g1 / p.d1, p.g2 * p.g2 / p.d2 + p.g3 * p.g3 / p.d3, p.g4 * p.g4 / p.d4];
    let laser_shift = [p.om2 * p.om2 / p.d2, p.om1 * p.om1 / p.d1 + p.om4 * p.om4 / p.d4, p.om3 * p.om3 / p.d3];

    let mut h = Terms::new(space);
    h.diagonal(|i| {
        let photons = space.photons_at(i);
        (0..space.n_sites())
            .map(|j| {
                let l = space.level_at(i, j).index();
                -photon_shift[l] * photons[j] as f64 - laser_shift[l]
            })
            .sum()
    });

    use Level::*;
    let mut raman = Terms::new(space);
    raman.cavity_transition(re(-p.om1 * p.g1 / p.d1), B, A);
    raman.cavity_transition(re(-p.om2 * p.g2 / p.d2), A, B);
    raman.cavity_transition(re(-p.om3 * p.g3 / p.d3), C, B);
    raman.cavity_transition(re(-p.om4 * p.g4 / p.d4), B, C);
    h.extend(raman.plus_adjoint());
    h.hopping(p.j_hop, p.boundary);
    SparseHermitianOperator::new(space.clone(), h.matrix())
}

fn spin_space(n_sites: usize) -> Result<Arc<HilbertSpace>> {
    build_space(n_sites, AtomicLevels::Three, PhotonTruncation::TotalCap(0))
}

/// `sum_j A (S_x^2 + S_y^2) + B S_z + C (S_x S_x + S_y S_y)` on a photon-free
/// spin-1 chain.
pub fn build_h_xy(c: &XyCoefficients, n_sites: usize, boundary: Boundary) -> Result<SparseHermitianOperator> {
    build_h_xy_on(c, &spin_space(n_sites)?, boundary)
}

/// As [`build_h_xy`], acting on the atoms of any three-level space.
pub fn build_h_xy_on(c: &XyCoefficients, space: &Arc<HilbertSpace>, boundary: Boundary) -> Result<SparseHermitianOperator> {
    require_levels(space, AtomicLevels::Three, "the XY chain")?;
    let s = spin1_operators();
    let mut h = Terms::new(space);
    // S_x^2 + S_y^2 = 2 - S_z^2, written out to keep the diagonal exact
    let perp = Matrix3::from_diagonal(&nalgebra::Vector3::new(re(1.0), re(2.0), re(1.0)));
    h.site_sum(c.a_coef, &perp);
    h.site_sum(c.b_coef, &s.sz);
    // S_x S_x + S_y S_y = (S_+ S_- + S_- S_+) / 2
    h.bond_sum(0.5 * c.c_coef, &s.splus, &s.sminus, boundary);
    h.bond_sum(0.5 * c.c_coef, &s.sminus, &s.splus, boundary);
    SparseHermitianOperator::new(space.clone(), h.matrix())
}

/// Two-laser five-level Hamiltonian: `(g1 a + Ω2)|d><a|` at `d1p`,
/// `(g4 a + Ω3)|e><c|` at `d3p`, plus hopping.
pub fn build_h_zz_full(p: &ZzParams, space: &Arc<HilbertSpace>) -> Result<SparseHermitianOperator> {
    p.check_structure()?;
    require_levels(space, AtomicLevels::Five, "the two-laser Hamiltonian")?;
    require_sites(space, p.n_sites)?;
    use Level::*;
    let mut phase_terms = Vec::new();
    for (detuning, g, om, excited, ground) in [(p.d1p, p.g1, p.om2, D, A), (p.d3p, p.g4, p.om3, E, C)] {
        let mut t = Terms::new(space);
        t.cavity_transition(re(g), excited, ground);
        t.transition(re(om), excited, ground);
        let matrix = t.matrix();
        if matrix.nnz() > 0 {
            phase_terms.push(PhaseTerm::new(detuning, matrix));
        }
    }
    let mut hop = Terms::new(space);
    hop.hopping(p.j_hop, p.boundary);
    SparseHermitianOperator::with_phase_terms(space.clone(), hop.matrix(), phase_terms)
}

/// Three-level Hamiltonian of the two-laser scheme after eliminating the
/// excited levels, with hopping in position form.
///
/// The condition report is returned alongside; failing conditions do not
/// prevent construction.
pub fn build_h_zz_intermediate(
    p: &ZzParams,
    space: &Arc<HilbertSpace>,
) -> Result<(SparseHermitianOperator, ValidationReport)> {
    let report = validate_zz_params(p, &ValidationThresholds::default())?;
    require_levels(space, AtomicLevels::Three, "the intermediate two-laser Hamiltonian")?;
    require_sites(space, p.n_sites)?;
    let u = p.g1 * p.g1 / p.d1p;
    let mut h = Terms::new(space);
    h.diagonal(|i| {
        let photons = space.photons_at(i);
        (0..space.n_sites())
            .map(|j| match space.level_at(i, j) {
                Level::A => -u * photons[j] as f64 - p.om2 * p.om2 / p.d1p,
                Level::C => -u * photons[j] as f64 - p.om3 * p.om3 / p.d3p,
                _ => 0.0,
            })
            .sum()
    });
    // -(Ω2 g1 / d1p) (a_j S_zj + h.c.)
    let drive = -p.om2 * p.g1 / p.d1p;
    let mut d = Terms::new(space);
    d.cavity_transition(re(drive), Level::A, Level::A);
    d.cavity_transition(re(-drive), Level::C, Level::C);
    h.extend(d.plus_adjoint());
    h.hopping(p.j_hop, p.boundary);
    Ok((SparseHermitianOperator::new(space.clone(), h.matrix())?, report))
}

/// `sum_j alpha S_zj^2 + beta S_zj S_zj+1` on a photon-free spin-1 chain.
pub fn build_h_zz(c: &ZzCoefficients, n_sites: usize, boundary: Boundary) -> Result<SparseHermitianOperator> {
    build_h_zz_on(c, &spin_space(n_sites)?, boundary)
}

pub fn build_h_zz_on(c: &ZzCoefficients, space: &Arc<HilbertSpace>, boundary: Boundary) -> Result<SparseHermitianOperator> {
    require_levels(space, AtomicLevels::Three, "the ZZ chain")?;
    let s = spin1_operators();
    let mut h = Terms::new(space);
    h.site_sum(c.alpha, &(s.sz * s.sz));
    h.bond_sum(c.beta, &s.sz, &s.sz, boundary);
    SparseHermitianOperator::new(space.clone(), h.matrix())
}

/// `sum_j S_zj` over a three-level space.
pub fn total_sz(space: &Arc<HilbertSpace>) -> Result<SparseHermitianOperator> {
    require_levels(space, AtomicLevels::Three, "S_z")?;
    let mut h = Terms::new(space);
    h.site_sum(1.0, &spin1_operators().sz);
    SparseHermitianOperator::new(space.clone(), h.matrix())
}

/// `S_z` of one site over a three-level space.
pub fn site_sz(space: &Arc<HilbertSpace>, site: usize) -> Result<SparseHermitianOperator> {
    require_levels(space, AtomicLevels::Three, "S_z")?;
    projector_like(space, |l| l.spin_z().unwrap_or(0.0), site)
}

/// `|level><level|` at one site.
pub fn level_projector(space: &Arc<HilbertSpace>, site: usize, level: Level) -> Result<SparseHermitianOperator> {
    projector_like(space, |l| if l == level { 1.0 } else { 0.0 }, site)
}

fn projector_like(space: &Arc<HilbertSpace>, weight: impl Fn(Level) -> f64, site: usize) -> Result<SparseHermitianOperator> {
    if site >= space.n_sites() {
        return Err(Error::InvalidLabel(format!("site {site} out of range")));
    }
    let mut h = Terms::new(space);
    h.diagonal(|i| weight(space.level_at(i, site)));
    SparseHermitianOperator::new(space.clone(), h.matrix())
}
