//! Composite atom × photon bases.
//!
//! Basis ordering is fixed so that dumped states are portable:
//!
//! - atomic configurations are ordered lexicographically with site 0 most
//!   significant and `a < b < c (< d < e)`;
//! - admissible photon occupations `(n_0, ..., n_{N-1})` are ordered
//!   lexicographically;
//! - the photon index varies fastest:
//!   `index = atom_index * n_occupations + photon_index`.

use std::{collections::HashMap, fmt, sync::Arc};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default refusal threshold for [`build_space`].
pub const DEFAULT_DIMENSION_CAP: usize = 1 << 20;

/// Atomic level. `a`, `b`, `c` are the long-lived spin states
/// (`S_z = +1, 0, -1`); `d` and `e` are the excited levels.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    A,
    B,
    C,
    D,
    E,
}

impl Level {
    pub const ALL: [Level; 5] = [Level::A, Level::B, Level::C, Level::D, Level::E];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// `S_z` eigenvalue of a spin level.
    pub fn spin_z(self) -> Option<f64> {
        match self {
            Self::A => Some(1.0),
            Self::B => Some(0.0),
            Self::C => Some(-1.0),
            Self::D | Self::E => None,
        }
    }

    pub fn label(self) -> char {
        (b'a' + self as u8) as char
    }

    /// Parses a level name or one of the spin aliases (`up`/`↑` = a,
    /// `right`/`→` = b, `down`/`↓` = c).
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "a" | "A" | "up" | "↑" => Ok(Self::A),
            "b" | "B" | "right" | "→" => Ok(Self::B),
            "c" | "C" | "down" | "↓" => Ok(Self::C),
            "d" | "D" => Ok(Self::D),
            "e" | "E" => Ok(Self::E),
            other => Err(Error::InvalidLabel(format!("unknown level `{other}`"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomicLevels {
    /// `a, b, c`
    Three,
    /// `a, b, c, d, e`
    Five,
}

impl AtomicLevels {
    pub fn count(self) -> usize {
        match self {
            Self::Three => 3,
            Self::Five => 5,
        }
    }

    pub fn contains(self, level: Level) -> bool {
        level.index() < self.count()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonTruncation {
    /// `sum_j n_j <= cap`
    TotalCap(u32),
    /// `n_j <= cap` for every cavity
    PerCavity(u32),
}

impl Default for PhotonTruncation {
    fn default() -> Self {
        Self::TotalCap(2)
    }
}

impl PhotonTruncation {
    fn admits(self, occupation: &[u32]) -> bool {
        match self {
            Self::TotalCap(cap) => occupation.iter().sum::<u32>() <= cap,
            Self::PerCavity(cap) => occupation.iter().all(|&n| n <= cap),
        }
    }

    fn count(self, n_sites: usize) -> Option<u128> {
        match self {
            // C(cap + N, N)
            Self::TotalCap(cap) => {
                let mut c: u128 = 1;
                for k in 1..=n_sites as u128 {
                    c = c.checked_mul(cap as u128 + k)? / k;
                }
                Some(c)
            }
            Self::PerCavity(cap) => (cap as u128 + 1).checked_pow(n_sites as u32),
        }
    }
}

/// Composite label of a basis state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub levels: Vec<Level>,
    pub photons: Vec<u32>,
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: String = self.levels.iter().map(|l| l.label()).collect();
        let photons: Vec<String> = self.photons.iter().map(|n| n.to_string()).collect();
        write!(f, "|{atoms};{}>", photons.join(","))
    }
}

#[derive(Debug, PartialEq)]
pub struct HilbertSpace {
    n_sites: usize,
    levels: AtomicLevels,
    truncation: PhotonTruncation,
    occupations: Vec<Vec<u32>>,
    occupation_index: HashMap<Vec<u32>, usize>,
    /// `levels^(N - 1 - j)`: weight of site `j` in the atomic index.
    site_stride: Vec<usize>,
    n_atomic: usize,
}

/// Builds a space with the default dimension cap.
pub fn build_space(
    n_sites: usize,
    levels: AtomicLevels,
    truncation: PhotonTruncation,
) -> Result<Arc<HilbertSpace>> {
    HilbertSpace::with_cap(n_sites, levels, truncation, DEFAULT_DIMENSION_CAP).map(Arc::new)
}

impl HilbertSpace {
    pub fn with_cap(
        n_sites: usize,
        levels: AtomicLevels,
        truncation: PhotonTruncation,
        dimension_cap: usize,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParams("n_sites must be at least 1".into()));
        }
        let l = levels.count();
        let too_big = |dimension| Error::DimensionTooLarge { dimension, cap: dimension_cap };
        let n_atomic = (l as u128).checked_pow(n_sites as u32).ok_or(too_big(u128::MAX))?;
        let n_photon = truncation.count(n_sites).ok_or(too_big(u128::MAX))?;
        let dimension = n_atomic.checked_mul(n_photon).ok_or(too_big(u128::MAX))?;
        if dimension > dimension_cap as u128 {
            return Err(too_big(dimension));
        }

        let max_per_site = match truncation {
            PhotonTruncation::TotalCap(c) | PhotonTruncation::PerCavity(c) => c,
        };
        let mut occupations = Vec::with_capacity(n_photon as usize);
        let mut current = vec![0u32; n_sites];
        enumerate_occupations(0, max_per_site, truncation, &mut current, &mut occupations);
        debug_assert_eq!(occupations.len() as u128, n_photon);
        let occupation_index = occupations.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let site_stride = (0..n_sites).map(|j| l.pow((n_sites - 1 - j) as u32)).collect();

        Ok(Self {
            n_sites,
            levels,
            truncation,
            occupations,
            occupation_index,
            site_stride,
            n_atomic: n_atomic as usize,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn atomic_levels(&self) -> AtomicLevels {
        self.levels
    }

    pub fn truncation(&self) -> PhotonTruncation {
        self.truncation
    }

    pub fn dimension(&self) -> usize {
        self.n_atomic * self.occupations.len()
    }

    pub fn n_occupations(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[Vec<u32>] {
        &self.occupations
    }

    pub fn index_of(&self, levels: &[Level], photons: &[u32]) -> Result<usize> {
        if levels.len() != self.n_sites || photons.len() != self.n_sites {
            return Err(Error::InvalidLabel(format!(
                "expected {} sites, got {} levels and {} occupations",
                self.n_sites,
                levels.len(),
                photons.len()
            )));
        }
        let mut atom = 0;
        for (j, &lvl) in levels.iter().enumerate() {
            if !self.levels.contains(lvl) {
                return Err(Error::InvalidLabel(format!("level {lvl} not in a {}-level space", self.levels.count())));
            }
            atom += lvl.index() * self.site_stride[j];
        }
        let photon = self.photon_index(photons).ok_or_else(|| {
            Error::InvalidLabel(format!("occupation {photons:?} exceeds truncation {:?}", self.truncation))
        })?;
        Ok(atom * self.occupations.len() + photon)
    }

    pub fn label_of(&self, index: usize) -> BasisLabel {
        BasisLabel {
            levels: (0..self.n_sites).map(|j| self.level_at(index, j)).collect(),
            photons: self.photons_at(index).to_vec(),
        }
    }

    pub fn photon_index(&self, occupation: &[u32]) -> Option<usize> {
        self.occupation_index.get(occupation).copied()
    }

    pub fn level_at(&self, index: usize, site: usize) -> Level {
        let atom = index / self.occupations.len();
        let digit = (atom / self.site_stride[site]) % self.levels.count();
        Level::from_index(digit).expect("digit below level count")
    }

    pub fn photons_at(&self, index: usize) -> &[u32] {
        &self.occupations[index % self.occupations.len()]
    }

    /// Index of the state obtained by setting `site` to `level`.
    pub fn with_level(&self, index: usize, site: usize, level: Level) -> usize {
        let old = self.level_at(index, site).index() as isize;
        let shift = (level.index() as isize - old) * (self.site_stride[site] * self.occupations.len()) as isize;
        (index as isize + shift) as usize
    }

    fn with_occupation(&self, index: usize, occupation: &[u32]) -> Option<usize> {
        let photon = self.photon_index(occupation)?;
        let base = index - index % self.occupations.len();
        Some(base + photon)
    }

    /// `a_site |index>` as `(target, amplitude)`, `None` for an empty cavity.
    pub fn annihilate(&self, index: usize, site: usize) -> Option<(usize, f64)> {
        let occ = self.photons_at(index);
        let n = occ[site];
        if n == 0 {
            return None;
        }
        let mut next = occ.to_vec();
        next[site] -= 1;
        self.with_occupation(index, &next).map(|t| (t, (n as f64).sqrt()))
    }

    /// `a_to^† a_from |index>`, `None` if empty or if the result leaves the
    /// truncated space.
    pub fn hop(&self, index: usize, from: usize, to: usize) -> Option<(usize, f64)> {
        let occ = self.photons_at(index);
        let n_from = occ[from];
        if n_from == 0 {
            return None;
        }
        let mut next = occ.to_vec();
        next[from] -= 1;
        next[to] += 1;
        let amp = (n_from as f64).sqrt() * (next[to] as f64).sqrt();
        self.with_occupation(index, &next).map(|t| (t, amp))
    }

    pub(crate) fn check_same(&self, other: &HilbertSpace) -> Result<()> {
        if !std::ptr::eq(self, other) && self != other {
            return Err(Error::SpaceMismatch(format!(
                "{}-site {}-level space vs {}-site {}-level space",
                self.n_sites,
                self.levels.count(),
                other.n_sites,
                other.levels.count()
            )));
        }
        Ok(())
    }
}

fn enumerate_occupations(
    site: usize,
    max: u32,
    truncation: PhotonTruncation,
    current: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if site == current.len() {
        out.push(current.clone());
        return;
    }
    for n in 0..=max {
        current[site] = n;
        // Partial occupations only grow, so pruning on the prefix is exact.
        let mut probe = current.clone();
        probe[site + 1..].iter_mut().for_each(|x| *x = 0);
        if !truncation.admits(&probe) {
            break;
        }
        enumerate_occupations(site + 1, max, truncation, current, out);
    }
    current[site] = 0;
}

/// A pure state over a shared space.
#[derive(Clone, Debug)]
pub struct StateVector {
    space: Arc<HilbertSpace>,
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn from_amplitudes(space: Arc<HilbertSpace>, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != space.dimension() {
            return Err(Error::SpaceMismatch(format!(
                "{} amplitudes for dimension {}",
                amplitudes.len(),
                space.dimension()
            )));
        }
        Ok(Self { space, amplitudes })
    }

    pub(crate) fn from_parts(space: Arc<HilbertSpace>, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dimension());
        Self { space, amplitudes }
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        self
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.space.check_same(&other.space)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
    }

    /// Superposition `sum_k c_k |psi_k>` over states sharing one space.
    pub fn superpose(terms: &[(C64, &StateVector)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidLabel("empty superposition".into()))?.1;
        let mut amps = vec![C64::new(0.0, 0.0); first.amplitudes.len()];
        for (c, s) in terms {
            first.space.check_same(&s.space)?;
            amps.iter_mut().zip(&s.amplitudes).for_each(|(a, b)| *a += c * b);
        }
        Ok(Self { space: first.space.clone(), amplitudes: amps })
    }
}

/// Basis state with the given level per site and photon occupation.
pub fn product_state(space: &Arc<HilbertSpace>, levels: &[Level], photons: &[u32]) -> Result<StateVector> {
    let idx = space.index_of(levels, photons)?;
    let mut amplitudes = vec![C64::new(0.0, 0.0); space.dimension()];
    amplitudes[idx] = C64::new(1.0, 0.0);
    Ok(StateVector { space: space.clone(), amplitudes })
}

/// Classical mixture of pure states sharing one space, with weights summing to one.
#[derive(Clone, Debug)]
pub struct MixtureState {
    members: Vec<(f64, StateVector)>,
}

impl MixtureState {
    pub fn new(members: Vec<(f64, StateVector)>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidLabel("empty mixture".into()))?;
        let space = first.1.space.clone();
        for (w, s) in &members {
            if w.is_nan() || *w < 0.0 {
                return Err(Error::InvalidLabel(format!("negative mixture weight {w}")));
            }
            space.check_same(&s.space)?;
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidLabel(format!("mixture weights sum to {total}")));
        }
        Ok(Self { members })
    }

    pub fn pure(state: StateVector) -> Self {
        Self { members: vec![(1.0, state)] }
    }

    pub fn members(&self) -> &[(f64, StateVector)] {
        &self.members
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        self.members[0].1.space()
    }

    pub fn total_weight(&self) -> f64 {
        self.members.iter().map(|(w, _)| w).sum()
    }
}

/// Equal mixture of `|a, c>` and `|b, c>` with empty cavities.
pub fn fig2b_mixture(space: &Arc<HilbertSpace>) -> Result<MixtureState> {
    if space.n_sites() != 2 {
        return Err(Error::InvalidLabel(format!("the two-atom mixture needs N = 2, got {}", space.n_sites())));
    }
    let vac = [0, 0];
    MixtureState::new(vec![
        (0.5, product_state(space, &[Level::A, Level::C], &vac)?),
        (0.5, product_state(space, &[Level::B, Level::C], &vac)?),
    ])
}
