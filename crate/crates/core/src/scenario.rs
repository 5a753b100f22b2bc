//! Configurable runs of every model, CSV output and run comparison.
//!
//! A scenario is a TOML document (all frequencies in units of `g1`, times in
//! `1/g1`):
//!
//! ```toml
//! name = "fig2a"
//! models = ["eliminated", "xy-chain"]
//! n_sites = 2
//! boundary = "open"
//! channels = ["p_c2"]
//!
//! [truncation]
//! total_cap = 2
//!
//! [params]
//! g1 = 1.0
//! # ...
//!
//! [initial]
//! kind = "product"
//! levels = ["b", "c"]
//!
//! [grid]
//! t_start = 0.0
//! t_end = 600.0
//! n_samples = 601
//! ```
//!
//! Channels from several models are suffixed by role (`_full` for atom-cavity
//! models, `_eff` for effective spin chains, `_trotter` for the product
//! formula), or by model name when two models share a role.

use std::{
    collections::BTreeMap,
    fmt, fs,
    path::{Path, PathBuf},
    sync::Arc,
    time::Instant,
};

use serde::{Deserialize, Serialize};

use crate::{
    dynamics::{evolve_mixture, EigenPropagator, PropagatorConfig, TimeGrid, Trajectory, TrotterOrder, TrotterSequence},
    error::{Error, Result},
    hilbert::{build_space, fig2b_mixture, product_state, AtomicLevels, HilbertSpace, Level, MixtureState, PhotonTruncation, StateVector},
    model::{
        compute_xy_coefficients, compute_zz_coefficients, validate_xy_params, validate_zz_params, Boundary, ModelParams, Status,
        ValidationReport, ValidationThresholds, XyCoefficients, ZzCoefficients, ZzParams,
    },
    observables::{parse_population_channel, population, population_channel_name, total_magnetization, TimeSeries},
    operators::{build_h_eliminated, build_h_full, build_h_xy, build_h_zz, build_h_zz_full, build_h_zz_intermediate, SparseHermitianOperator},
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    FiveLevel,
    Eliminated,
    XyChain,
    ZzFiveLevel,
    ZzEliminated,
    ZzChain,
    Trotter,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::FiveLevel => "five-level",
            Self::Eliminated => "eliminated",
            Self::XyChain => "xy-chain",
            Self::ZzFiveLevel => "zz-five-level",
            Self::ZzEliminated => "zz-eliminated",
            Self::ZzChain => "zz-chain",
            Self::Trotter => "trotter",
        }
    }

    fn role(self) -> &'static str {
        match self {
            Self::FiveLevel | Self::Eliminated | Self::ZzFiveLevel | Self::ZzEliminated => "full",
            Self::XyChain | Self::ZzChain => "eff",
            Self::Trotter => "trotter",
        }
    }

    fn needs_xy(self) -> bool {
        matches!(self, Self::FiveLevel | Self::Eliminated | Self::XyChain | Self::Trotter)
    }

    fn needs_zz(self) -> bool {
        matches!(self, Self::ZzFiveLevel | Self::ZzEliminated | Self::ZzChain)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Four-laser drive block of a scenario.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XyDrive {
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
}

impl XyDrive {
    pub fn fig2() -> Self {
        let p = ModelParams::fig2();
        Self {
            g1: p.g1,
            g2: p.g2,
            g3: p.g3,
            g4: p.g4,
            om1: p.om1,
            om2: p.om2,
            om3: p.om3,
            om4: p.om4,
            d1: p.d1,
            d2: p.d2,
            d3: p.d3,
            d4: p.d4,
            j_hop: p.j_hop,
        }
    }

    pub fn params(&self, n_sites: usize, boundary: Boundary) -> ModelParams {
        ModelParams {
            g1: self.g1,
            g2: self.g2,
            g3: self.g3,
            g4: self.g4,
            om1: self.om1,
            om2: self.om2,
            om3: self.om3,
            om4: self.om4,
            d1: self.d1,
            d2: self.d2,
            d3: self.d3,
            d4: self.d4,
            j_hop: self.j_hop,
            n_sites,
            boundary,
        }
    }
}

/// Two-laser drive block of a scenario.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZzDrive {
    pub g1: f64,
    pub g4: f64,
    pub om2: f64,
    pub om3: f64,
    pub d1p: f64,
    pub d3p: f64,
    pub j_hop: f64,
}

impl ZzDrive {
    pub fn params(&self, n_sites: usize, boundary: Boundary) -> ZzParams {
        ZzParams {
            g1: self.g1,
            g4: self.g4,
            om2: self.om2,
            om3: self.om3,
            d1p: self.d1p,
            d3p: self.d3p,
            j_hop: self.j_hop,
            n_sites,
            boundary,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialState {
    /// Product of atomic levels (names or spin aliases) with a photon
    /// occupation, vacuum by default.
    Product {
        levels: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        photons: Option<Vec<u32>>,
    },
    /// `(|a1 c2> + |b1 c2>)` as an equal classical mixture.
    Fig2bMixture,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrotterSettings {
    /// Product-formula periods per grid interval; `dt = spacing / steps`.
    pub steps_per_sample: usize,
    #[serde(default)]
    pub order: TrotterOrder,
    /// Overrides for the `S_z S_z` coefficients when no `zz_params` block is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub models: Vec<ModelKind>,
    pub n_sites: usize,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub channels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub truncation: PhotonTruncation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<XyDrive>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zz_params: Option<ZzDrive>,
    pub initial: InitialState,
    pub grid: TimeGrid,
    #[serde(default)]
    pub propagator: PropagatorConfig,
    #[serde(default)]
    pub thresholds: ValidationThresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trotter: Option<TrotterSettings>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.check()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Structural consistency between model selection and parameter blocks.
    pub fn check(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::Config("scenario lists no models".into()));
        }
        self.grid.check()?;
        for m in &self.models {
            if m.needs_xy() && self.params.is_none() {
                return Err(Error::Config(format!("model {m} needs a [params] block")));
            }
            if m.needs_zz() && self.zz_params.is_none() {
                return Err(Error::Config(format!("model {m} needs a [zz_params] block")));
            }
            if *m == ModelKind::Trotter {
                let t = self.trotter.ok_or_else(|| Error::Config("trotter needs a [trotter] block".into()))?;
                if t.steps_per_sample == 0 {
                    return Err(Error::Config("trotter.steps_per_sample must be positive".into()));
                }
                let explicit = t.alpha.is_some() && t.beta.is_some();
                if !explicit && self.zz_params.is_none() {
                    return Err(Error::Config("trotter needs [zz_params] or trotter.alpha/beta".into()));
                }
            }
        }
        Ok(())
    }

    pub fn xy_params(&self) -> Option<ModelParams> {
        self.params.map(|d| d.params(self.n_sites, self.boundary))
    }

    pub fn zz_model_params(&self) -> Option<ZzParams> {
        self.zz_params.map(|d| d.params(self.n_sites, self.boundary))
    }

    fn default_channels(&self) -> Vec<String> {
        (0..self.n_sites)
            .flat_map(|j| [Level::A, Level::B, Level::C].map(|l| population_channel_name(l, j)))
            .collect()
    }

    fn suffix(&self, model: ModelKind) -> &'static str {
        let shared = self.models.iter().filter(|m| m.role() == model.role()).count() > 1;
        if shared {
            model.name()
        } else {
            model.role()
        }
    }

    /// Two-atom comparison of the eliminated and effective models from `|b1 c2>`.
    pub fn fig2a() -> Self {
        Self {
            name: "fig2a".into(),
            models: vec![ModelKind::Eliminated, ModelKind::XyChain],
            n_sites: 2,
            boundary: Boundary::Open,
            channels: ["p_c2", "p_a1", "p_b1"].map(String::from).to_vec(),
            output: Some("fig2a.csv".into()),
            truncation: PhotonTruncation::TotalCap(2),
            params: Some(XyDrive::fig2()),
            zz_params: None,
            initial: InitialState::Product { levels: vec!["b".into(), "c".into()], photons: None },
            grid: TimeGrid { t_start: 0.0, t_end: 600.0, n_samples: 601 },
            propagator: PropagatorConfig::default(),
            thresholds: ValidationThresholds::default(),
            trotter: None,
        }
    }

    /// As [`Scenario::fig2a`] from the equal mixture of `|a1 c2>` and `|b1 c2>`.
    pub fn fig2b() -> Self {
        Self {
            name: "fig2b".into(),
            initial: InitialState::Fig2bMixture,
            output: Some("fig2b.csv".into()),
            ..Self::fig2a()
        }
    }

    /// Atomic populations under the intermediate two-laser Hamiltonian.
    pub fn zz_conserve() -> Self {
        Self {
            name: "zz-conserve".into(),
            models: vec![ModelKind::ZzEliminated],
            n_sites: 2,
            boundary: Boundary::Open,
            channels: Vec::new(),
            output: Some("zz-conserve.csv".into()),
            truncation: PhotonTruncation::TotalCap(2),
            params: None,
            zz_params: Some(ZzDrive { g1: 1.0, g4: 1.0, om2: 10.0, om3: -10.0, d1p: 40.0, d3p: 40.0, j_hop: 0.5 }),
            initial: InitialState::Product { levels: vec!["a".into(), "c".into()], photons: None },
            grid: TimeGrid { t_start: 0.0, t_end: 100.0, n_samples: 201 },
            propagator: PropagatorConfig::default(),
            thresholds: ValidationThresholds::default(),
            trotter: None,
        }
    }
}

/// Options for [`run_scenario`].
#[derive(Copy, Clone, Debug, Default)]
pub struct RunOptions {
    /// Run even when validation reports `fail`.
    pub allow_invalid: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedReport {
    pub parameters: String,
    pub report: ValidationReport,
}

/// Everything needed to reproduce and audit one run.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub validation: Vec<NamedReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xy_coefficients: Option<XyCoefficients>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zz_coefficients: Option<ZzCoefficients>,
    /// Propagation route per model.
    pub routes: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
    #[serde(skip)]
    pub series: TimeSeries,
}

impl RunRecord {
    /// Worst validation status across all reports.
    pub fn validation_status(&self) -> Status {
        self.validation.iter().map(|r| r.report.overall).max().unwrap_or(Status::Pass)
    }

    /// Writes the CSV to `csv_path` and the record (minus channel data) to
    /// `<csv_path>.json`.
    pub fn write(&self, csv_path: &Path) -> Result<PathBuf> {
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        self.series.write_csv(fs::File::create(csv_path)?)?;
        let mut sidecar = csv_path.as_os_str().to_owned();
        sidecar.push(".json");
        let sidecar = PathBuf::from(sidecar);
        let json = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(&sidecar, json)?;
        Ok(sidecar)
    }
}

fn gate(report: &ValidationReport, opts: RunOptions) -> Result<()> {
    if report.overall == Status::Fail && !opts.allow_invalid {
        return Err(Error::ValidationFailed(Box::new(report.clone())));
    }
    Ok(())
}

/// Runs the validation that gates a scenario, without propagating anything.
pub fn validate_scenario(s: &Scenario) -> Result<Vec<NamedReport>> {
    s.check()?;
    let mut out = Vec::new();
    if let Some(p) = s.xy_params() {
        out.push(NamedReport { parameters: "params".into(), report: validate_xy_params(&p, &s.thresholds)? });
    }
    if let Some(p) = s.zz_model_params() {
        out.push(NamedReport { parameters: "zz_params".into(), report: validate_zz_params(&p, &s.thresholds)? });
    }
    Ok(out)
}

fn initial_mixture(s: &Scenario, space: &Arc<HilbertSpace>) -> Result<MixtureState> {
    match &s.initial {
        InitialState::Product { levels, photons } => {
            let levels = levels.iter().map(|l| Level::parse(l)).collect::<Result<Vec<_>>>()?;
            let photons = photons.clone().unwrap_or_else(|| vec![0; space.n_sites()]);
            Ok(MixtureState::pure(product_state(space, &levels, &photons)?))
        }
        InitialState::Fig2bMixture => fig2b_mixture(space),
    }
}

fn channel_values(name: &str, samples: &[MixtureState]) -> Result<Vec<f64>> {
    if name == "m_total" {
        return samples.iter().map(total_magnetization).collect();
    }
    let (level, site) = parse_population_channel(name)?;
    samples.iter().map(|m| population(m, site, level)).collect()
}

struct ModelRun {
    samples: Vec<MixtureState>,
    route: String,
}

fn propagate(h: &SparseHermitianOperator, psi0: &MixtureState, s: &Scenario) -> Result<ModelRun> {
    let traj: Trajectory<MixtureState> = evolve_mixture(h, psi0, &s.grid, &s.propagator)?;
    Ok(ModelRun { route: traj.route.to_string(), samples: traj.samples })
}

fn trotter_run(
    xy: &XyCoefficients,
    zz: &ZzCoefficients,
    s: &Scenario,
    settings: TrotterSettings,
) -> Result<ModelRun> {
    let h_xy = build_h_xy(xy, s.n_sites, s.boundary)?;
    let h_zz = build_h_zz(zz, s.n_sites, s.boundary)?;
    let dt = s.grid.spacing() / settings.steps_per_sample as f64;
    let seq = TrotterSequence::new(&h_xy, &h_zz, dt, settings.order)?;
    let psi0 = initial_mixture(s, h_xy.space())?;
    let per_member: Vec<Vec<StateVector>> = psi0
        .members()
        .iter()
        .map(|(_, start)| {
            let mut out = vec![start.clone()];
            for _ in 1..s.grid.n_samples {
                let next = seq.advance(out.last().unwrap(), settings.steps_per_sample)?;
                out.push(next);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let samples = (0..s.grid.n_samples)
        .map(|k| {
            MixtureState::new(psi0.members().iter().zip(&per_member).map(|((w, _), run)| (*w, run[k].clone())).collect())
        })
        .collect::<Result<_>>()?;
    Ok(ModelRun { samples, route: format!("trotter first-order, dt = {dt:?}, {:?}", settings.order) })
}

/// Validates, builds and propagates every model of a scenario.
pub fn run_scenario(s: &Scenario, opts: RunOptions) -> Result<RunRecord> {
    let started = Instant::now();
    let validation = validate_scenario(s)?;
    for r in &validation {
        gate(&r.report, opts)?;
    }

    let needs_xy_coefs = s.models.iter().any(|m| matches!(m, ModelKind::XyChain | ModelKind::Trotter));
    let xy_coefficients = match s.xy_params() {
        Some(p) if needs_xy_coefs => Some(compute_xy_coefficients(&p)?),
        _ => None,
    };
    let zz_coefficients = match (s.zz_model_params(), s.trotter) {
        (Some(p), _) if s.models.iter().any(|m| matches!(m, ModelKind::ZzChain | ModelKind::Trotter)) => {
            Some(compute_zz_coefficients(&p)?)
        }
        (_, Some(TrotterSettings { alpha: Some(alpha), beta: Some(beta), .. })) => {
            Some(ZzCoefficients { u_coef: f64::NAN, alpha, beta })
        }
        _ => None,
    };

    let channels = if s.channels.is_empty() { s.default_channels() } else { s.channels.clone() };
    let mut series = TimeSeries::new(s.grid);
    let mut routes = BTreeMap::new();
    let atom_space = |levels| build_space(s.n_sites, levels, s.truncation);

    for &model in &s.models {
        let run = match model {
            ModelKind::FiveLevel => {
                let space = atom_space(AtomicLevels::Five)?;
                let h = build_h_full(&s.xy_params().unwrap(), &space)?;
                propagate(&h, &initial_mixture(s, &space)?, s)?
            }
            ModelKind::Eliminated => {
                let space = atom_space(AtomicLevels::Three)?;
                let h = build_h_eliminated(&s.xy_params().unwrap(), &space)?;
                propagate(&h, &initial_mixture(s, &space)?, s)?
            }
            ModelKind::XyChain => {
                let h = build_h_xy(xy_coefficients.as_ref().unwrap(), s.n_sites, s.boundary)?;
                propagate(&h, &initial_mixture(s, h.space())?, s)?
            }
            ModelKind::ZzFiveLevel => {
                let space = atom_space(AtomicLevels::Five)?;
                let h = build_h_zz_full(&s.zz_model_params().unwrap(), &space)?;
                propagate(&h, &initial_mixture(s, &space)?, s)?
            }
            ModelKind::ZzEliminated => {
                let space = atom_space(AtomicLevels::Three)?;
                let (h, _) = build_h_zz_intermediate(&s.zz_model_params().unwrap(), &space)?;
                propagate(&h, &initial_mixture(s, &space)?, s)?
            }
            ModelKind::ZzChain => {
                let h = build_h_zz(zz_coefficients.as_ref().unwrap(), s.n_sites, s.boundary)?;
                propagate(&h, &initial_mixture(s, h.space())?, s)?
            }
            ModelKind::Trotter => trotter_run(
                xy_coefficients.as_ref().unwrap(),
                zz_coefficients.as_ref().unwrap(),
                s,
                s.trotter.unwrap(),
            )?,
        };
        let suffix = if s.models.len() > 1 { Some(s.suffix(model)) } else { None };
        for ch in &channels {
            let name = match suffix {
                Some(sfx) => format!("{ch}_{sfx}"),
                None => ch.clone(),
            };
            series.push(name, channel_values(ch, &run.samples)?)?;
        }
        routes.insert(model.name().to_string(), run.route);
    }

    series.metadata.insert("scenario".into(), s.name.clone());
    series.metadata.insert("boundary".into(), s.boundary.to_string());
    series.metadata.insert("truncation".into(), format!("{:?}", s.truncation));
    for (m, r) in &routes {
        series.metadata.insert(format!("route.{m}"), r.clone());
    }

    Ok(RunRecord {
        scenario: s.clone(),
        validation,
        xy_coefficients,
        zz_coefficients,
        routes,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        series,
    })
}

/// Pointwise deviation between two aligned channels.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationSummary {
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Time of the largest deviation.
    pub t_at_max: f64,
    pub differences: Vec<f64>,
}

/// Compares `a[ch_a]` against `b[ch_b]`; the grids must coincide.
pub fn compare_series(a: &TimeSeries, ch_a: &str, b: &TimeSeries, ch_b: &str) -> Result<DeviationSummary> {
    let same_grid = a.times.len() == b.times.len()
        && a.times.iter().zip(&b.times).all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0));
    if !same_grid {
        return Err(Error::InvalidGrid(format!(
            "grid mismatch: {} samples on [{}, {}] vs {} samples on [{}, {}]",
            a.times.len(),
            a.grid.t_start,
            a.grid.t_end,
            b.times.len(),
            b.grid.t_start,
            b.grid.t_end
        )));
    }
    let differences: Vec<f64> = a.channel(ch_a)?.iter().zip(b.channel(ch_b)?).map(|(x, y)| x - y).collect();
    let (k_max, max_abs) = differences
        .iter()
        .map(|d| d.abs())
        .enumerate()
        .fold((0, 0.0), |(kb, mb), (k, d)| if d > mb { (k, d) } else { (kb, mb) });
    let mean_abs = differences.iter().map(|d| d.abs()).sum::<f64>() / differences.len() as f64;
    Ok(DeviationSummary { max_abs, mean_abs, t_at_max: a.times[k_max], differences })
}

pub fn compare_runs(r1: &RunRecord, r2: &RunRecord, channel: &str) -> Result<DeviationSummary> {
    compare_series(&r1.series, channel, &r2.series, channel)
}

/// One point of a product-formula error sweep.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub dt: f64,
    pub n_steps: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrotterSweep {
    pub total_time: f64,
    pub xy: XyCoefficients,
    pub zz: ZzCoefficients,
    pub n_sites: usize,
    pub initial: Vec<Level>,
    pub points: Vec<SweepPoint>,
    /// Least-squares slope of `log error` against `log dt`.
    pub slope: f64,
}

impl TrotterSweep {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["dt", "n_steps", "error"])?;
        for p in &self.points {
            w.write_record([format!("{:?}", p.dt), p.n_steps.to_string(), format!("{:?}", p.error)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// `||psi_trotter(T/n) - e^{-i (H_xy + H_zz) T} psi0||` for each `n` in
/// `divisions`.
pub fn trotter_sweep(
    xy: &XyCoefficients,
    zz: &ZzCoefficients,
    n_sites: usize,
    boundary: Boundary,
    initial: &[Level],
    total_time: f64,
    divisions: &[usize],
) -> Result<TrotterSweep> {
    let h_xy = build_h_xy(xy, n_sites, boundary)?;
    let h_zz = build_h_zz(zz, n_sites, boundary)?;
    let psi0 = product_state(h_xy.space(), initial, &vec![0; n_sites])?;
    let exact = EigenPropagator::new(&h_xy.sum(&h_zz)?)?.apply(total_time, psi0.amplitudes());
    let exact = StateVector::from_amplitudes(h_xy.space().clone(), exact)?;
    let points = divisions
        .iter()
        .map(|&n| {
            let dt = total_time / n as f64;
            let psi = TrotterSequence::new(&h_xy, &h_zz, dt, TrotterOrder::XyFirst)?.advance(&psi0, n)?;
            Ok(SweepPoint { dt, n_steps: n, error: psi.distance(&exact)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let lx: Vec<f64> = points.iter().map(|p| p.dt.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    Ok(TrotterSweep {
        total_time,
        xy: *xy,
        zz: *zz,
        n_sites,
        initial: initial.to_vec(),
        points,
        slope: fit_slope(&lx, &ly),
    })
}

/// Sweep with the reference-set (`fig2`) XY coefficients, `(alpha, beta) = (0.01, 0.005)`,
/// three open sites from `|a b c>`, `T = 10 / C` and `dt = T/64 .. T/512`.
pub fn default_trotter_sweep() -> Result<TrotterSweep> {
    let xy = compute_xy_coefficients(&ModelParams::fig2())?;
    let zz = ZzCoefficients { u_coef: f64::NAN, alpha: 0.01, beta: 0.005 };
    trotter_sweep(&xy, &zz, 3, Boundary::Open, &[Level::A, Level::B, Level::C], 10.0 / xy.c_coef, &[64, 128, 256, 512])
}

/// Names accepted by `builtin`.
pub const BUILTINS: [&str; 5] = ["fig2a", "fig2b", "coeffs", "trotter-sweep", "zz-conserve"];

pub enum Builtin {
    Run(Box<Scenario>),
    Coefficients,
    TrotterSweep,
}

pub fn builtin(name: &str) -> Result<Builtin> {
    match name {
        "fig2a" => Ok(Builtin::Run(Box::new(Scenario::fig2a()))),
        "fig2b" => Ok(Builtin::Run(Box::new(Scenario::fig2b()))),
        "zz-conserve" => Ok(Builtin::Run(Box::new(Scenario::zz_conserve()))),
        "coeffs" => Ok(Builtin::Coefficients),
        "trotter-sweep" => Ok(Builtin::TrotterSweep),
        other => Err(Error::Config(format!("unknown builtin `{other}`; expected one of {}", BUILTINS.join(", ")))),
    }
}
