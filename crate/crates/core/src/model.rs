//! Physical parameters, regime validation and closed-form effective
//! coefficients.
//!
//! Two drive schemes are covered. The four-laser scheme ([`ModelParams`])
//! produces the spin-1 XY chain with single-ion anisotropy `A`, field `B` and
//! exchange `C`. The two-laser scheme ([`ZzParams`]) produces an `S_z S_z`
//! chain with on-site `alpha` and coupling `beta`.

use std::{f64::consts::TAU, fmt};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Chain boundary condition for every nearest-neighbour sum.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl Boundary {
    /// Directed nearest-neighbour links `(j, j + 1)` for a chain of `n_sites`.
    ///
    /// Periodic chains include the wrap link `(N - 1, 0)` for every `N >= 2`,
    /// so a periodic pair carries the same link twice.
    pub fn links(self, n_sites: usize) -> Vec<(usize, usize)> {
        if n_sites < 2 {
            return Vec::new();
        }
        match self {
            Self::Open => (0..n_sites - 1).map(|j| (j, j + 1)).collect(),
            Self::Periodic => (0..n_sites).map(|j| (j, (j + 1) % n_sites)).collect(),
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Open => f.write_str("open"),
            Self::Periodic => f.write_str("periodic"),
        }
    }
}

/// Four-laser scheme parameters, in units of `g1`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
    pub om1: f64,
    pub om2: f64,
    pub om3: f64,
    pub om4: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub d4: f64,
    pub j_hop: f64,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl ModelParams {
    /// The parameter set used for the two-atom population comparison.
    pub fn fig2() -> Self {
        Self {
            g1: 1.0,
            g2: 1.0,
            g3: 0.5,
            g4: 1.0,
            om1: 10.0,
            om2: 10.0,
            om3: 10.0,
            om4: 5.0,
            d1: 40.0,
            d2: 80.0,
            d3: 20.0,
            d4: 40.0,
            j_hop: 0.5,
            n_sites: 2,
            boundary: Boundary::Open,
        }
    }

    pub fn couplings(&self) -> [f64; 4] {
        [self.g1, self.g2, self.g3, self.g4]
    }

    pub fn rabi(&self) -> [f64; 4] {
        [self.om1, self.om2, self.om3, self.om4]
    }

    pub fn detunings(&self) -> [f64; 4] {
        [self.d1, self.d2, self.d3, self.d4]
    }

    /// Structural checks: nonzero finite detunings, at least one site.
    pub fn check_structure(&self) -> Result<()> {
        check_sites(self.n_sites)?;
        let named = [("d1", self.d1), ("d2", self.d2), ("d3", self.d3), ("d4", self.d4)];
        for (name, d) in named {
            check_detuning(name, d)?;
        }
        let rest = self.couplings().into_iter().chain(self.rabi()).chain([self.j_hop]);
        if rest.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite coupling or Rabi frequency".into()));
        }
        Ok(())
    }

    /// Stark-shifted detunings of the rotating frame, `(mu_plus, mu_minus)`.
    pub fn mu(&self) -> (f64, f64) {
        let u = self.g1 * self.g1 / self.d1;
        let half = 0.5 * (self.om2 * self.om2 / self.d2 - self.om3 * self.om3 / self.d3);
        (u + half, u - half)
    }
}

/// Two-laser (`S_z S_z`) scheme parameters, in units of `g1`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZzParams {
    pub g1: f64,
    pub g4: f64,
    pub om2: f64,
    pub om3: f64,
    pub d1p: f64,
    pub d3p: f64,
    pub j_hop: f64,
    pub n_sites: usize,
    pub boundary: Boundary,
}

impl ZzParams {
    pub fn check_structure(&self) -> Result<()> {
        check_sites(self.n_sites)?;
        check_detuning("d1p", self.d1p)?;
        check_detuning("d3p", self.d3p)?;
        let rest = [self.g1, self.g4, self.om2, self.om3, self.j_hop];
        if rest.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParams("non-finite coupling or Rabi frequency".into()));
        }
        Ok(())
    }
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::InvalidParams("n_sites must be at least 1".into()));
    }
    Ok(())
}

fn check_detuning(name: &str, d: f64) -> Result<()> {
    if d == 0.0 || !d.is_finite() {
        return Err(Error::InvalidParams(format!("detuning {name} must be nonzero and finite, got {d}")));
    }
    Ok(())
}

/// Effective spin-1 XY chain constants.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XyCoefficients {
    pub a_coef: f64,
    pub b_coef: f64,
    pub c_coef: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
}

impl XyCoefficients {
    /// Coefficients given directly, with the frame detunings left unset.
    pub fn new(a_coef: f64, b_coef: f64, c_coef: f64) -> Self {
        Self { a_coef, b_coef, c_coef, mu_plus: f64::NAN, mu_minus: f64::NAN }
    }
}

/// Effective `S_z S_z` chain constants.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZzCoefficients {
    pub u_coef: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Computes `mu_±` and the XY chain coefficients `A`, `B`, `C`.
pub fn compute_xy_coefficients(p: &ModelParams) -> Result<XyCoefficients> {
    p.check_structure()?;
    let (mu_plus, mu_minus) = p.mu();
    if mu_plus == 0.0 || mu_minus == 0.0 {
        return Err(Error::SingularRegime(format!(
            "mu_plus = {mu_plus}, mu_minus = {mu_minus}; the resolvent expansion needs both nonzero"
        )));
    }
    // Squared Raman amplitudes of the two spin-flip channels.
    let lower = (p.om1 * p.g1 / p.d1).powi(2);
    let raise = (p.om2 * p.g2 / p.d2).powi(2);
    let minus_part = lower / (2.0 * mu_plus);
    let plus_part = raise / (2.0 * mu_minus);
    Ok(XyCoefficients {
        a_coef: minus_part + plus_part,
        b_coef: plus_part - minus_part,
        c_coef: lower * p.j_hop / (mu_plus * mu_plus) + raise * p.j_hop / (mu_minus * mu_minus),
        mu_plus,
        mu_minus,
    })
}

/// Computes `u`, `alpha` and `beta` of the `S_z S_z` chain.
pub fn compute_zz_coefficients(p: &ZzParams) -> Result<ZzCoefficients> {
    p.check_structure()?;
    let u_coef = p.g1 * p.g1 / p.d1p;
    if u_coef == 0.0 {
        return Err(Error::SingularRegime("u = g1^2/d1p vanishes".into()));
    }
    let drive = (p.om2 * p.g1 / p.d1p).powi(2);
    Ok(ZzCoefficients {
        u_coef,
        alpha: drive / u_coef,
        beta: 2.0 * p.j_hop * drive / (u_coef * u_coef),
    })
}

/// Photon mode frequencies `2 J cos(2 pi k / N)` for `k = 1..=N`.
pub fn mode_frequencies(n_sites: usize, j_hop: f64) -> Vec<f64> {
    let n = n_sites as f64;
    (1..=n_sites).map(|k| 2.0 * j_hop * (TAU * k as f64 / n).cos()).collect()
}

/// Severity of a single check, ordered `Pass < Warn < Fail`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pass => f.write_str("pass"),
            Self::Warn => f.write_str("warn"),
            Self::Fail => f.write_str("fail"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Absolute residual of an exact design constraint.
    Equality,
    /// A ratio that must be large.
    LowerBound,
    /// A ratio that must stay small.
    UpperBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    /// Residual for equalities, ratio otherwise.
    pub value: f64,
    /// Absolute tolerance for equalities, fail threshold for lower bounds,
    /// warn threshold for upper bounds.
    pub threshold: f64,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub overall: Status,
}

impl ValidationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        let overall = checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass);
        Self { checks, overall }
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<28} {:>14.6e}  (threshold {:.3e})  {}", c.name, c.value, c.threshold, c.status)?;
        }
        write!(f, "overall: {}", self.overall)
    }
}

/// Thresholds for the regime checks.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationThresholds {
    /// Relative tolerance on the exact design equalities.
    pub equality_rel_tol: f64,
    /// Frequency-separation ratios below this fail.
    pub ratio_fail: f64,
    /// Frequency-separation ratios below this warn.
    pub ratio_warn: f64,
    /// `|Δ| / max(|g|, |Ω|)` below this fails.
    pub detuning_fail: f64,
    /// `|Δ| / max(|g|, |Ω|)` below this warns.
    pub detuning_warn: f64,
    /// `J / |mu|` above this warns (never fails).
    pub hopping_warn: f64,
}

impl Default for ValidationThresholds {
    fn default() -> Self {
        Self {
            equality_rel_tol: 1e-9,
            ratio_fail: 3.0,
            ratio_warn: 4.0,
            detuning_fail: 1.0,
            detuning_warn: 2.0,
            hopping_warn: 0.5,
        }
    }
}

fn equality(name: &str, lhs: f64, rhs: f64, rel_tol: f64) -> Check {
    let residual = (lhs - rhs).abs();
    let tol = rel_tol * lhs.abs().max(rhs.abs());
    let status = if residual <= tol { Status::Pass } else { Status::Fail };
    Check { name: name.into(), kind: CheckKind::Equality, value: residual, threshold: tol, status }
}

fn lower_bound(name: &str, ratio: f64, fail: f64, warn: f64) -> Check {
    let status = if ratio < fail {
        Status::Fail
    } else if ratio < warn {
        Status::Warn
    } else {
        Status::Pass
    };
    Check { name: name.into(), kind: CheckKind::LowerBound, value: ratio, threshold: fail, status }
}

fn upper_bound(name: &str, ratio: f64, warn: f64) -> Check {
    let status = if ratio > warn { Status::Warn } else { Status::Pass };
    Check { name: name.into(), kind: CheckKind::UpperBound, value: ratio, threshold: warn, status }
}

/// `numerator / denominator`, infinite when the denominator vanishes.
fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        f64::INFINITY
    } else {
        numerator / denominator
    }
}

fn max_abs(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Checks every regime condition of the four-laser reduction.
///
/// Checks, in order: Stark matching (two equalities), laser balance (three
/// equalities), single-photon detuning ratios, the two excited-level
/// ladder separations, the second elimination margin and `J / |mu|`.
pub fn validate_xy_params(p: &ModelParams, thr: &ValidationThresholds) -> Result<ValidationReport> {
    p.check_structure()?;
    let tol = thr.equality_rel_tol;
    let [g1, g2, g3, g4] = p.couplings();
    let [o1, o2, o3, o4] = p.rabi();
    let [d1, d2, d3, d4] = p.detunings();
    let mut checks = Vec::new();

    let shift_a = g1 * g1 / d1;
    checks.push(equality("stark_match_ab", shift_a, g2 * g2 / d2 + g3 * g3 / d3, tol));
    checks.push(equality("stark_match_ac", shift_a, g4 * g4 / d4, tol));

    checks.push(equality(
        "laser_stark_balance",
        o1 * o1 / d1 + o4 * o4 / d4,
        0.5 * (o2 * o2 / d2 + o3 * o3 / d3),
        tol,
    ));
    checks.push(equality("raman_balance_lower", o1 * g1 / d1, o3 * g3 / d3, tol));
    checks.push(equality("raman_balance_raise", o2 * g2 / d2, o4 * g4 / d4, tol));

    let detuning_ratio = (0..4)
        .map(|i| ratio(p.detunings()[i].abs(), p.couplings()[i].abs().max(p.rabi()[i].abs())))
        .fold(f64::INFINITY, f64::min);
    checks.push(lower_bound("large_detuning", detuning_ratio, thr.detuning_fail, thr.detuning_warn));

    let ladder_d = max_abs([o1 * o2 / d1, o1 * g2 / d1, g1 * o2 / d1, g1 * g2 / d1]);
    checks.push(lower_bound("ladder_d", ratio((d2 - d1).abs(), ladder_d), thr.ratio_fail, thr.ratio_warn));
    let ladder_e = max_abs([o3 * o4 / d3, o3 * g4 / d3, g3 * o4 / d3, g3 * g4 / d3]);
    checks.push(lower_bound("ladder_e", ratio((d4 - d3).abs(), ladder_e), thr.ratio_fail, thr.ratio_warn));

    let (mu_plus, mu_minus) = p.mu();
    let nu = mode_frequencies(p.n_sites, p.j_hop);
    let gap = nu
        .iter()
        .flat_map(|&v| [(mu_plus - v).abs(), (mu_minus - v).abs()])
        .fold(f64::INFINITY, f64::min);
    let flip = max_abs([o1 * g1 / (2f64.sqrt() * d1), o2 * g2 / (2f64.sqrt() * d2)]);
    checks.push(lower_bound("second_elimination", ratio(gap, flip), thr.ratio_fail, thr.ratio_warn));

    let hop = ratio(p.j_hop.abs(), mu_plus.abs()).max(ratio(p.j_hop.abs(), mu_minus.abs()));
    checks.push(upper_bound("hopping_over_mu", hop, thr.hopping_warn));

    Ok(ValidationReport::from_checks(checks))
}

/// Checks every regime condition of the two-laser `S_z S_z` reduction.
pub fn validate_zz_params(p: &ZzParams, thr: &ValidationThresholds) -> Result<ValidationReport> {
    p.check_structure()?;
    let tol = thr.equality_rel_tol;
    let mut checks = Vec::new();
    let u = p.g1 * p.g1 / p.d1p;
    checks.push(equality("stark_match_ac", u, p.g4 * p.g4 / p.d3p, tol));
    checks.push(equality("drive_balance", p.om3 * p.g4 / p.d3p, -p.om2 * p.g1 / p.d1p, tol));

    let detuning = p.d1p.abs().min(p.d3p.abs());
    let strongest = max_abs([p.g1, p.g4, p.om2, p.om3, p.j_hop]);
    checks.push(lower_bound(
        "large_detuning",
        ratio(detuning, strongest),
        thr.detuning_fail,
        thr.detuning_warn,
    ));

    let gap = mode_frequencies(p.n_sites, p.j_hop)
        .into_iter()
        .map(|v| (u - v).abs())
        .fold(f64::INFINITY, f64::min);
    let drive = (p.om2 * p.g1 / p.d1p).abs();
    checks.push(lower_bound("second_elimination", ratio(gap, drive), thr.ratio_fail, thr.ratio_warn));

    Ok(ValidationReport::from_checks(checks))
}
