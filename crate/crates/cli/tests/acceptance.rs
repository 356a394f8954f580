//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured value and the pinned tolerance, and exits nonzero if any fail.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fso_acq::acqstats::{
    coverage_prob_circular, coverage_prob_elliptical, expected_pulses, expected_time,
};
use fso_acq::optimizer::{alpha_grid, optimize_alpha_cdf, sweep_alpha, Objective, SweepPoint};
use fso_acq::simulator::{SimFidelity, Simulator};
use fso_acq::specfun::{exp_integral_ei, integrate, EULER_GAMMA};
use fso_acq::{AcqTimeModel, HoytParams, NormalizationMode, Params, QuadratureSpec};
use fso_acq_cli::z_score;

const COVERAGE_REL_TOL: f64 = 1e-8;
const COVERAGE_TIME_LIMIT: Duration = Duration::from_secs(10);
const HOYT_ABS_TOL: f64 = 1e-6;
const PULSES_ABS_TOL: f64 = 1e-12;
const CDF_ABS_TOL: f64 = 1e-9;
const CDF_TAIL_MASS: f64 = 1e-12;
const MC_TRIALS: u64 = 100_000;
const MC_SEED: u64 = 42;
const MC_Z_LIMIT: f64 = 3.0;
const MC_TIME_LIMIT: Duration = Duration::from_secs(120);
const GRID: usize = 200;
const DETERMINISM_TRIALS: u64 = 20_000;
const WORKER_COUNTS: [usize; 3] = [1, 4, 16];

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn defaults() -> Params {
    Params::default()
        .validate()
        .expect("default parameters are valid")
}

/// Mass of the difference of two isotropic Gaussians inside the disk of
/// radius `r`, by nested quadrature with `x = r·sin θ`.
fn disk_mass(r: f64, v1: f64, v2: f64) -> f64 {
    let v = v1 + v2;
    let spec = QuadratureSpec::new(1e-13, 1e-11, 200_000).unwrap();
    let density = |x: f64, y: f64| (-(x * x + y * y) / (2.0 * v)).exp() / (2.0 * PI * v);
    integrate(
        |th: f64| {
            let (x, h) = (r * th.sin(), r * th.cos());
            integrate(|y: f64| density(x, y), -h, h, &spec).unwrap() * h
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        &spec,
    )
    .unwrap()
}

fn rayleigh_vs_quadrature() -> Outcome {
    let start = Instant::now();
    let uav = 0.01;
    let mut worst: f64 = 0.0;
    for margin in [0.01, 0.04, 0.1] {
        for firing_var in [1e-5, 1e-4, 1e-3] {
            for estimate_var in [5e-6, 5e-5, 5e-4] {
                let closed =
                    coverage_prob_circular(uav + margin, uav, firing_var + estimate_var).unwrap();
                let oracle = disk_mass(margin, firing_var, estimate_var);
                worst = worst.max((closed - oracle).abs() / oracle);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= COVERAGE_REL_TOL && elapsed < COVERAGE_TIME_LIMIT,
        format!(
            "max rel err {worst:.2e} (tol {COVERAGE_REL_TOL:e}) over 27 points, {:.2} s (limit {} s)",
            elapsed.as_secs_f64(),
            COVERAGE_TIME_LIMIT.as_secs()
        ),
    )
}

fn hoyt_unit_q() -> Outcome {
    let quad = QuadratureSpec::default();
    let omega = 3e-4;
    let hoyt = HoytParams { q: 1.0, omega };
    let mut worst: f64 = 0.0;
    for margin in [0.002, 0.01, 0.02, 0.04, 0.09] {
        let e = coverage_prob_elliptical(0.01 + margin, 0.01, &hoyt, &quad).unwrap();
        let c = coverage_prob_circular(0.01 + margin, 0.01, omega / 2.0).unwrap();
        worst = worst.max((e - c).abs());
    }
    outcome(
        worst <= HOYT_ABS_TOL,
        format!("max abs diff {worst:.2e} (tol {HOYT_ABS_TOL:e}) over 5 radii"),
    )
}

fn naive_pmf_pulses(p: f64, n0: u32, j: u32, mode: NormalizationMode) -> f64 {
    let q = 1.0 - p;
    let w = match mode {
        NormalizationMode::PaperFaithful => q - q.powi(n0 as i32),
        NormalizationMode::Corrected => 1.0 - q.powi(n0 as i32),
    };
    q.powi(j as i32 - 1) * p / w
}

fn expected_pulses_enumeration() -> Outcome {
    let mut worst: f64 = 0.0;
    for mode in [
        NormalizationMode::PaperFaithful,
        NormalizationMode::Corrected,
    ] {
        for p in [0.05, 0.2, 0.5, 0.9] {
            for n0 in [2u32, 5, 10] {
                let closed = expected_pulses(p, n0, mode).unwrap();
                let sum: f64 = (1..=n0)
                    .map(|j| f64::from(j) * naive_pmf_pulses(p, n0, j, mode))
                    .sum();
                worst = worst.max((closed - sum).abs());
            }
        }
    }
    let paper = expected_pulses(0.5f64, 2, NormalizationMode::PaperFaithful).unwrap();
    let corrected = expected_pulses(0.5f64, 2, NormalizationMode::Corrected).unwrap();
    let pair_ok =
        (paper - 4.0).abs() <= PULSES_ABS_TOL && (corrected - 4.0 / 3.0).abs() <= PULSES_ABS_TOL;
    outcome(
        worst <= PULSES_ABS_TOL && pair_ok,
        format!(
            "max abs diff {worst:.2e} (tol {PULSES_ABS_TOL:e}); (0.5, 2) -> {paper} paper, {corrected:.15} corrected"
        ),
    )
}

fn cdf_enumeration() -> Outcome {
    let t2 = 1.0;
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut worst_tail: f64 = 0.0;
    for p in [0.05, 0.2, 0.5, 0.9] {
        for n0 in [2u32, 5, 10] {
            for ratio in [1.0, 3.0, 10.0] {
                let model =
                    AcqTimeModel::new(p, n0, ratio * t2, t2, NormalizationMode::Corrected).unwrap();
                let m = ratio + f64::from(n0);
                let px = 1.0 - (1.0 - p).powi(n0 as i32);
                let mut running = 0.0;
                let mut prev = 0.0;
                let mut k = 0u64;
                while 1.0 - running > CDF_TAIL_MASS {
                    k += 1;
                    for step in 1..=(m as u32) {
                        let n = k as f64 * m + f64::from(step);
                        if step <= n0 {
                            running += (1.0 - px).powi(k as i32 - 1)
                                * px
                                * naive_pmf_pulses(p, n0, step, NormalizationMode::Corrected);
                        }
                        let cdf = model.cdf((n - f64::from(n0)) * t2);
                        worst = worst.max((cdf - running).abs());
                        monotone &= cdf >= prev;
                        prev = cdf;
                    }
                }
                worst_tail = worst_tail.max((1.0 - model.cdf(1e9)).abs());
            }
        }
    }
    outcome(
        worst <= CDF_ABS_TOL && monotone && worst_tail <= CDF_ABS_TOL,
        format!(
            "max abs diff {worst:.2e} (tol {CDF_ABS_TOL:e}), nondecreasing: {monotone}, |1 - F(1e9)| <= {worst_tail:.1e}"
        ),
    )
}

fn ei_remainder_positive() -> Outcome {
    let (lo, hi) = (1e-8f64.ln(), 50f64.ln());
    let mut min = f64::INFINITY;
    let mut at = 0.0;
    for i in 0..200 {
        let x = (lo + (hi - lo) * f64::from(i) / 199.0).exp();
        let r = exp_integral_ei(x).unwrap() - x.ln() - EULER_GAMMA;
        if r < min {
            min = r;
            at = x;
        }
    }
    outcome(
        min > 0.0,
        format!("min Ei(x) - ln x - gamma = {min:.3e} at x = {at:.3e} (200 points)"),
    )
}

fn monte_carlo_agreement() -> Outcome {
    let start = Instant::now();
    let params = defaults();
    let deadlines = [6.0, 12.0, 24.0];
    let support = [params.t1 + params.t2, params.t1 + 2.0 * params.t2];
    let grid: Vec<f64> = deadlines.iter().chain(&support).copied().collect();
    let mut worst: f64 = 0.0;
    let mut worst_support: f64 = 0.0;
    for alpha in [0.3, 0.5, 0.7] {
        let model = expected_time(&params, alpha).unwrap();
        let s = Simulator::new(&params, alpha, SimFidelity::FaithfulToAnalytic)
            .unwrap()
            .run_trials(MC_TRIALS, MC_SEED, &grid)
            .unwrap();
        worst =
            worst.max(z_score(s.mean_time, model.expected_time, s.mean_time_stderr, None).abs());
        for c in &s.empirical_cdf {
            let z = z_score(c.probability, model.cdf(c.t), c.stderr, Some(s.trials)).abs();
            if deadlines.contains(&c.t) {
                worst = worst.max(z);
            } else {
                worst_support = worst_support.max(z);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= MC_Z_LIMIT && elapsed < MC_TIME_LIMIT,
        format!(
            "max |z| {worst:.3} (limit {MC_Z_LIMIT}) on mean and F(6,12,24 s), {MC_TRIALS} trials, seed {MC_SEED}; \
             at the first two support points max |z| {worst_support:.3}; {:.2} s (limit {} s)",
            elapsed.as_secs_f64(),
            MC_TIME_LIMIT.as_secs()
        ),
    )
}

fn grid_argmin(points: &[SweepPoint]) -> SweepPoint {
    points
        .iter()
        .copied()
        .reduce(|best, p| {
            if p.objective < best.objective {
                p
            } else {
                best
            }
        })
        .unwrap()
}

fn best_alpha(params: &Params) -> f64 {
    grid_argmin(&sweep_alpha(params, &alpha_grid(GRID), Objective::MeanTime).unwrap()).alpha
}

fn interior_optimum() -> Outcome {
    let p = Params {
        max_pulses: 10,
        ..defaults()
    };
    let best = grid_argmin(&sweep_alpha(&p, &alpha_grid(GRID), Objective::MeanTime).unwrap());
    let at = |a: f64| expected_time(&p, a).unwrap().expected_time;
    let (lo, hi) = (at(0.05), at(0.95));
    outcome(
        best.objective < lo && best.objective < hi,
        format!(
            "grid min E[T] = {:.9e} s at alpha {:.4}; E[T](0.05) = {lo:.9e}, E[T](0.95) = {hi:.9e}",
            best.objective, best.alpha
        ),
    )
}

fn pulses_trend() -> Outcome {
    let p = defaults();
    let a5 = best_alpha(&Params {
        max_pulses: 5,
        ..p.clone()
    });
    let a20 = best_alpha(&Params {
        max_pulses: 20,
        ..p
    });
    outcome(
        a20 <= a5,
        format!("alpha*(N0=20) = {a20:.4} <= alpha*(N0=5) = {a5:.4} (grid {GRID})"),
    )
}

fn noise_trend() -> Outcome {
    let base = defaults();
    let var0 = base.noise_std.powi(2);
    let mut seq = Vec::new();
    for step in 0..=6 {
        let var = var0 * 10f64.powf(0.5 * f64::from(step));
        let p = Params {
            noise_std: var.sqrt(),
            detection_threshold: None,
            ..base.clone()
        }
        .validate()
        .unwrap();
        seq.push(best_alpha(&p));
    }
    let ok = seq.windows(2).all(|w| w[1] <= w[0]);
    let shown: Vec<String> = seq.iter().map(|a| format!("{a:.4}")).collect();
    outcome(
        ok,
        format!(
            "alpha* over noise variance x10^0..10^3 (half decades): {}",
            shown.join(", ")
        ),
    )
}

fn threshold_invariance() -> Outcome {
    let p = defaults();
    let step = 1.0 / GRID as f64;
    let bracket = (0.5 * step, 1.0 - 0.5 * step);
    let args: Vec<f64> = [8.0, 12.0, 16.0]
        .iter()
        .map(|&t| {
            optimize_alpha_cdf(&p, bracket, 1e-6, t)
                .unwrap()
                .argument
                .alpha()
                .unwrap()
        })
        .collect();
    let spread = args.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - args.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        spread <= step,
        format!(
            "argmax alpha at t = 8, 12, 16 s: {:.5}, {:.5}, {:.5}; spread {spread:.2e} (limit {step})",
            args[0], args[1], args[2]
        ),
    )
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_fso-acq");
    let root = tempfile::tempdir().unwrap();
    let mut problems = Vec::new();
    let mut runs = 0;
    for command in ["validate", "simulate"] {
        let mut reference: Option<BTreeMap<String, Vec<u8>>> = None;
        for threads in WORKER_COUNTS {
            for rep in 0..2 {
                let out = root.path().join(format!("{command}-{threads}-{rep}"));
                let status = Command::new(exe)
                    .arg(command)
                    .args(["--trials", &DETERMINISM_TRIALS.to_string(), "--seed", "7"])
                    .args(["--alpha", "0.3,0.5,0.7", "--out"])
                    .arg(&out)
                    .env("FSO_ACQ_THREADS", threads.to_string())
                    .output()
                    .unwrap();
                runs += 1;
                if !status.status.success() {
                    problems.push(format!(
                        "{command} with {threads} workers exited {}",
                        status.status
                    ));
                    continue;
                }
                let files = read_dir(&out);
                match &reference {
                    None => reference = Some(files),
                    Some(r) if *r != files => {
                        problems.push(format!("{command} differs at {threads} workers, run {rep}"))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let detail = if problems.is_empty() {
        format!("{runs} runs ({DETERMINISM_TRIALS} trials, workers {WORKER_COUNTS:?}, two runs each) byte-identical")
    } else {
        problems.join("; ")
    };
    outcome(problems.is_empty(), detail)
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "Rayleigh coverage vs disk quadrature",
            rayleigh_vs_quadrature,
        ),
        ("Hoyt coverage at q = 1 equals Rayleigh", hoyt_unit_q),
        (
            "E[N] closed form vs enumeration",
            expected_pulses_enumeration,
        ),
        ("acquisition-time CDF vs pmf enumeration", cdf_enumeration),
        ("Ei(x) - ln x - gamma > 0", ei_remainder_positive),
        (
            "Monte Carlo vs analytic mean and CDF",
            monte_carlo_agreement,
        ),
        ("interior optimum of E[T] at N0 = 10", interior_optimum),
        ("more pulses, smaller optimal alpha", pulses_trend),
        ("more noise, smaller optimal alpha", noise_trend),
        (
            "CDF-optimal alpha independent of deadline",
            threshold_invariance,
        ),
        ("validate/simulate outputs deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} [{:>2}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
