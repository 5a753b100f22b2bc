//! End-to-end acceptance checks. Prints one `PASS`/`FAIL` line per criterion
//! and exits nonzero if any criterion fails.

use std::process::ExitCode;

use cavispin::{
    build_h_eliminated, build_h_full, build_h_xy, build_h_zz, build_h_zz_full, build_h_zz_intermediate, build_space,
    compare_series, compute_xy_coefficients, evolve, operators::{level_projector, site_sz, total_sz}, product_state,
    run_scenario,
    scenario::{default_trotter_sweep, ModelKind, RunOptions},
    AtomicLevels, Boundary, Level, Method, ModelParams, PhotonTruncation, PropagatorConfig, Scenario,
    SparseHermitianOperator, TimeGrid, ValidationReport, ValidationThresholds, ZzCoefficients, ZzParams,
};
use rustfft::{num_complex::Complex, FftPlanner};

/// Max |p_c2(eliminated) - p_c2(effective)| for the two-atom `|b1 c2>` run,
/// open boundary, total photon cap 2, t in [0, 600]. Frozen regression value;
/// it exceeds the 0.1 agreement bound (see README, "Known deviations").
const FIG2A_BASELINE: f64 = 0.339_483_827;
const BASELINE_TOL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn coefficients() -> Outcome {
    let c = compute_xy_coefficients(&ModelParams::fig2()).unwrap();
    let pass = (c.a_coef + 0.0128).abs() <= 1e-4 && (c.b_coef - 0.0210).abs() <= 1e-4 && (c.c_coef - 0.0113).abs() <= 1e-4;
    outcome(pass, format!("A = {:.6}, B = {:.6}, C = {:.6}", c.a_coef, c.b_coef, c.c_coef))
}

fn relative_residual(report: &ValidationReport, name: &str, rel_tol: f64) -> f64 {
    let c = report.get(name).unwrap();
    if c.threshold == 0.0 {
        c.value
    } else {
        c.value * rel_tol / c.threshold
    }
}

fn constraints() -> Outcome {
    let thr = ValidationThresholds::default();
    let report = cavispin::validate_xy_params(&ModelParams::fig2(), &thr).unwrap();
    let equalities = ["stark_match_ab", "stark_match_ac", "laser_stark_balance", "raman_balance_lower", "raman_balance_raise"];
    let worst = equalities.iter().map(|n| relative_residual(&report, n, thr.equality_rel_tol)).fold(0.0, f64::max);
    let expected = [("second_elimination", 4.8), ("ladder_e", 8.0), ("ladder_d", 16.0), ("hopping_over_mu", 0.27)];
    let mut pass = worst < 1e-12;
    let mut detail = format!("max relative equality residual {worst:.2e}");
    for (name, want) in expected {
        let got = report.get(name).unwrap().value;
        pass &= ((got - want) / want).abs() <= 0.05;
        detail.push_str(&format!(", {name} = {got:.4} (expected {want})"));
    }
    outcome(pass, detail)
}

fn fig2a_with(truncation: PhotonTruncation, boundary: Boundary) -> cavispin::RunRecord {
    let s = Scenario { truncation, boundary, ..Scenario::fig2a() };
    run_scenario(&s, RunOptions::default()).unwrap()
}

fn fig2a_deviation(truncation: PhotonTruncation, boundary: Boundary) -> f64 {
    let r = fig2a_with(truncation, boundary);
    compare_series(&r.series, "p_c2_full", &r.series, "p_c2_eff").unwrap().max_abs
}

fn fig2a() -> (Outcome, f64) {
    let r2 = fig2a_with(PhotonTruncation::TotalCap(2), Boundary::Open);
    let r3 = fig2a_with(PhotonTruncation::TotalCap(3), Boundary::Open);
    let dev = compare_series(&r2.series, "p_c2_full", &r2.series, "p_c2_eff").unwrap().max_abs;
    let convergence = compare_series(&r2.series, "p_c2_full", &r3.series, "p_c2_full").unwrap().max_abs;
    let periodic = fig2a_deviation(PhotonTruncation::TotalCap(2), Boundary::Periodic);
    let cap1 = fig2a_deviation(PhotonTruncation::TotalCap(1), Boundary::Open);
    let baseline_ok = (dev - FIG2A_BASELINE).abs() <= BASELINE_TOL;
    let pass = dev <= 0.1 && convergence < 1e-3 && baseline_ok;
    let detail = format!(
        "max |p_c2 full - eff| = {dev:.9} (bound 0.1, baseline {FIG2A_BASELINE:.9}), cap 2 -> 3 change {convergence:.6} \
         (bound 1e-3), periodic deviation {periodic:.6}, cap 1 deviation {cap1:.6}"
    );
    (outcome(pass, detail), dev)
}

/// Indices of local maxima of `power` (excluding DC), strongest first.
fn spectral_peaks(signal: &[f64]) -> Vec<(usize, f64)> {
    let mean = signal.iter().sum::<f64>() / signal.len() as f64;
    let n = signal.len();
    let mut buf: Vec<Complex<f64>> = signal
        .iter()
        .enumerate()
        .map(|(k, x)| {
            let hann = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (n - 1) as f64).cos();
            Complex::new((x - mean) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let power: Vec<f64> = buf[..n / 2].iter().map(|z| z.norm_sqr()).collect();
    let mut peaks: Vec<(usize, f64)> =
        (2..power.len() - 1).filter(|&k| power[k] > power[k - 1] && power[k] >= power[k + 1]).map(|k| (k, power[k])).collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks
}

fn fig2b(fig2a_dev: f64) -> Outcome {
    let r = run_scenario(&Scenario::fig2b(), RunOptions::default()).unwrap();
    let dev = compare_series(&r.series, "p_c2_full", &r.series, "p_c2_eff").unwrap().max_abs;

    // the effective curve alone over a long window, for frequency resolution
    let n = 8192;
    let dt = 2.0;
    let long = Scenario {
        models: vec![ModelKind::XyChain],
        channels: vec!["p_c2".into()],
        grid: TimeGrid::new(0.0, dt * (n - 1) as f64, n).unwrap(),
        ..Scenario::fig2b()
    };
    let eff = run_scenario(&long, RunOptions::default()).unwrap();
    let peaks = spectral_peaks(eff.series.channel("p_c2").unwrap());
    let to_freq = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / (n as f64 * dt);
    let (pass_peaks, peak_text) = match peaks.as_slice() {
        [p1, p2, rest @ ..] => {
            let third = rest.first().map_or(0.0, |p| p.1);
            let distinct = p1.0.abs_diff(p2.0) > 2;
            let dominant = p2.1 > 10.0 * third && p2.1 > 0.01 * p1.1;
            (
                distinct && dominant,
                format!(
                    "peaks at omega = {:.5}, {:.5} (power ratio {:.3}, third/second {:.2e})",
                    to_freq(p1.0),
                    to_freq(p2.0),
                    p2.1 / p1.1,
                    third / p2.1
                ),
            )
        }
        _ => (false, format!("{} spectral peaks found", peaks.len())),
    };
    let pass = dev > fig2a_dev && pass_peaks;
    outcome(pass, format!("max deviation {dev:.6} vs fig2a {fig2a_dev:.6}; {peak_text}"))
}

fn analytic() -> Outcome {
    let s = Scenario { models: vec![ModelKind::XyChain], channels: vec!["p_c2".into()], ..Scenario::fig2a() };
    let r = run_scenario(&s, RunOptions::default()).unwrap();
    let c = r.xy_coefficients.unwrap().c_coef;
    let dev = r
        .series
        .times
        .iter()
        .zip(r.series.channel("p_c2").unwrap())
        .map(|(t, p)| (p - (c * t).cos().powi(2)).abs())
        .fold(0.0, f64::max);
    outcome(dev < 1e-8, format!("max |p_c2 - cos^2(Ct)| = {dev:.3e}"))
}

fn trotter() -> Outcome {
    let sweep = default_trotter_sweep().unwrap();
    let errors: Vec<String> = sweep.points.iter().map(|p| format!("{:.3e}", p.error)).collect();
    let monotone = sweep.points.windows(2).all(|w| w[1].error < w[0].error);
    outcome(
        sweep.slope >= 0.9 && monotone,
        format!("log-log slope {:.4} (errors {} at dt = T/64..T/512)", sweep.slope, errors.join(", ")),
    )
}

fn zz_params() -> ZzParams {
    Scenario::zz_conserve().zz_model_params().unwrap()
}

fn norm_drift(h: &SparseHermitianOperator, psi_levels: &[Level], grid: TimeGrid, method: Method) -> (f64, String) {
    let psi0 = product_state(h.space(), psi_levels, &vec![0; h.space().n_sites()]).unwrap();
    let traj = evolve(h, &psi0, &grid, &PropagatorConfig::with_method(method)).unwrap();
    let worst = traj.samples.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max);
    (worst / (grid.t_end - grid.t_start), traj.route.to_string())
}

fn conservation() -> Outcome {
    let p = ModelParams::fig2();
    let xy = compute_xy_coefficients(&p).unwrap();
    let three = build_space(2, AtomicLevels::Three, PhotonTruncation::TotalCap(2)).unwrap();
    let five = build_space(2, AtomicLevels::Five, PhotonTruncation::TotalCap(2)).unwrap();
    let h_elim = build_h_eliminated(&p, &three).unwrap();
    let h_full = build_h_full(&p, &five).unwrap();
    let long = TimeGrid::new(0.0, 600.0, 61).unwrap();
    let short = TimeGrid::new(0.0, 10.0, 11).unwrap();
    let bc = [Level::B, Level::C];
    let drifts = [
        norm_drift(&h_elim, &bc, long, Method::Eigendecomposition),
        norm_drift(&h_elim, &bc, long, Method::Krylov),
        norm_drift(&h_elim, &bc, long, Method::Rk4Adaptive),
        norm_drift(&h_full, &bc, short, Method::Rk4Adaptive),
    ];
    let worst_drift = drifts.iter().map(|d| d.0).fold(0.0, f64::max);

    let zz = ZzCoefficients { u_coef: f64::NAN, alpha: 0.01, beta: 0.005 };
    let mut worst_comm: f64 = 0.0;
    for boundary in [Boundary::Open, Boundary::Periodic] {
        let h_xy = build_h_xy(&xy, 3, boundary).unwrap();
        worst_comm = worst_comm.max(h_xy.commutator_norm(&total_sz(h_xy.space()).unwrap()).unwrap());
        let h_zz = build_h_zz(&zz, 3, boundary).unwrap();
        for j in 0..3 {
            worst_comm = worst_comm.max(h_zz.commutator_norm(&site_sz(h_zz.space(), j).unwrap()).unwrap());
        }
    }

    let (h14, _) = build_h_zz_intermediate(&zz_params(), &three).unwrap();
    let mut worst_proj: f64 = 0.0;
    for site in 0..2 {
        for level in [Level::A, Level::B, Level::C] {
            worst_proj = worst_proj.max(h14.commutator_norm(&level_projector(&three, site, level).unwrap()).unwrap());
        }
    }
    let run = run_scenario(&Scenario::zz_conserve(), RunOptions::default()).unwrap();
    let worst_pop = run
        .series
        .channel_names()
        .map(|name| {
            let v = run.series.channel(name).unwrap();
            v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    let pass = worst_drift < 1e-8 && worst_comm < 1e-12 && worst_proj < 1e-10 && worst_pop < 1e-10;
    let routes: Vec<String> = drifts.iter().map(|(d, r)| format!("{r}: {d:.1e}")).collect();
    outcome(
        pass,
        format!(
            "norm drift per unit time [{}]; max commutator {worst_comm:.1e}; projector commutator {worst_proj:.1e}; \
             population change {worst_pop:.1e}",
            routes.join("; ")
        ),
    )
}

fn hermiticity() -> Outcome {
    let p = ModelParams::fig2();
    let xy = compute_xy_coefficients(&p).unwrap();
    let zp = zz_params();
    let three = build_space(2, AtomicLevels::Three, PhotonTruncation::TotalCap(2)).unwrap();
    let five = build_space(2, AtomicLevels::Five, PhotonTruncation::TotalCap(2)).unwrap();
    let zz = ZzCoefficients { u_coef: f64::NAN, alpha: 0.01, beta: 0.005 };
    let builders: Vec<(&str, SparseHermitianOperator)> = vec![
        ("five-level", build_h_full(&p, &five).unwrap()),
        ("eliminated", build_h_eliminated(&p, &three).unwrap()),
        ("xy", build_h_xy(&xy, 3, Boundary::Periodic).unwrap()),
        ("zz-five-level", build_h_zz_full(&zp, &five).unwrap()),
        ("zz-intermediate", build_h_zz_intermediate(&zp, &three).unwrap().0),
        ("zz", build_h_zz(&zz, 3, Boundary::Periodic).unwrap()),
    ];
    // deterministic pseudo-random times in [0, 1000): golden-ratio sequence
    let times: Vec<f64> = (1..=20).map(|k| 1000.0 * (k as f64 * 0.618_033_988_749_895).fract()).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, h) in &builders {
        let static_res = h.hermiticity_residual();
        pass &= static_res == 0.0;
        if h.is_static() {
            parts.push(format!("{name}: {static_res:.0e}"));
        } else {
            let worst = times.iter().map(|&t| h.hermiticity_residual_at(t)).fold(0.0, f64::max);
            pass &= worst < 1e-14;
            parts.push(format!("{name}: {static_res:.0e} / {worst:.1e} over 20 times"));
        }
    }
    outcome(pass, parts.join(", "))
}

fn main() -> ExitCode {
    let (c3, fig2a_dev) = fig2a();
    let results = [
        ("1 coefficient reproduction", coefficients()),
        ("2 constraint exactness and regime ratios", constraints()),
        ("3 two-atom eliminated vs effective agreement", c3),
        ("4 mixture start shows larger discrepancy and two frequencies", fig2b(fig2a_dev)),
        ("5 effective model matches cos^2(Ct)", analytic()),
        ("6 product-formula error scaling", trotter()),
        ("7 conservation laws", conservation()),
        ("8 hermiticity of every builder", hermiticity()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} — {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
