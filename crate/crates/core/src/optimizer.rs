//! Optimizers for the energy split `alpha` and the pulse budget `N₀`.
//!
//! Nothing here assumes the objective is unimodal over the whole bracket. A
//! dense grid locates the best point first; golden-section search then
//! refines only inside the two grid cells around it, and the result is never
//! worse than the best grid point. Ties go to the smaller argument.

use rayon::prelude::*;

use crate::acqstats::{pulse_success_prob, AcqTimeModel};
use crate::error::{Error, Result};
use crate::model::{NormalizationMode, SystemParams};

/// Minimum number of coarse grid points used before refinement.
pub const MIN_GRID_POINTS: usize = 64;

/// Default coarse grid size for the `alpha` optimizers.
pub const DEFAULT_GRID_POINTS: usize = 200;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Quantity evaluated along an `alpha` sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// E[T] in seconds.
    MeanTime,
    /// P(T ≤ t) at the given time in seconds.
    CdfAtT(f64),
}

/// One evaluated point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub alpha: f64,
    pub n0: u32,
    /// E[T] (s) or a CDF value. `+inf` marks an undefined mean time and `0`
    /// an undefined CDF.
    pub objective: f64,
    pub p_pulse: f64,
    pub p_attempt: f64,
}

/// The optimized quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptArgument {
    Alpha(f64),
    N0(u32),
}

impl OptArgument {
    pub fn alpha(self) -> Option<f64> {
        match self {
            OptArgument::Alpha(a) => Some(a),
            OptArgument::N0(_) => None,
        }
    }

    pub fn n0(self) -> Option<u32> {
        match self {
            OptArgument::N0(n) => Some(n),
            OptArgument::Alpha(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    /// argmin (mean time) or argmax (CDF).
    pub argument: OptArgument,
    pub objective_value: f64,
    /// The coarse grid or exhaustive scan.
    pub grid: Vec<SweepPoint>,
    /// Golden-section iterations after the grid scan.
    pub refinement_iterations: usize,
}

/// `n` cell midpoints `(i - 0.5)/n` of `(0, 1)`.
pub fn alpha_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect()
}

/// `n ≥ 2` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Evaluation of one objective point together with the value used to rank
/// it (smaller is better).
#[derive(Debug, Clone, Copy)]
struct Eval {
    point: SweepPoint,
    key: f64,
}

fn time_model(
    params: &SystemParams<f64>,
    alpha: f64,
) -> Result<(SweepPoint, Option<AcqTimeModel<f64>>)> {
    let probs = pulse_success_prob(params, alpha)?;
    let point = SweepPoint {
        alpha,
        n0: params.max_pulses,
        objective: f64::NAN,
        p_pulse: probs.p_pulse,
        p_attempt: probs.p_attempt,
    };
    match AcqTimeModel::new(
        probs.p_pulse,
        params.max_pulses,
        params.t1,
        params.t2,
        params.normalization_mode,
    ) {
        Ok(model) => Ok((point, Some(model))),
        // Paper-mode normalizer vanishes at p_N ∈ {0, 1}.
        Err(Error::Domain { .. }) => Ok((point, None)),
        Err(e) => Err(e),
    }
}

fn evaluate(params: &SystemParams<f64>, alpha: f64, objective: Objective) -> Result<Eval> {
    let (mut point, model) = time_model(params, alpha)?;
    let key = match objective {
        Objective::MeanTime => {
            point.objective = model.map_or(f64::INFINITY, |m| m.expected_time);
            point.objective
        }
        Objective::CdfAtT(t) => {
            point.objective = model.map_or(0.0, |m| m.cdf(t));
            match (model, params.normalization_mode) {
                // ln P(T > t) keeps ranking power after the CDF rounds to 1.
                (Some(m), NormalizationMode::Corrected) => m.log_survival(t),
                _ => -point.objective,
            }
        }
    };
    Ok(Eval { point, key })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    for &a in grid {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::domain("sweep_alpha", a, "grid values in (0, 1)"));
        }
    }
    Ok(())
}

/// Evaluates `objective` at every grid value of `alpha`, in grid order.
pub fn sweep_alpha(
    params: &SystemParams<f64>,
    alpha_grid: &[f64],
    objective: Objective,
) -> Result<Vec<SweepPoint>> {
    check_grid(alpha_grid)?;
    if let Objective::CdfAtT(t) = objective {
        if !(t >= 0.0) {
            return Err(Error::domain("sweep_alpha", t, "t >= 0"));
        }
    }
    let params = params.clone().validate()?;
    alpha_grid
        .par_iter()
        .map(|&a| evaluate(&params, a, objective).map(|e| e.point))
        .collect()
}

/// Result of [`grid_golden_minimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<P> {
    pub x: f64,
    pub key: f64,
    pub payload: P,
    pub iterations: usize,
    /// `(x, payload)` for every coarse grid point, in order.
    pub grid: Vec<(f64, P)>,
}

fn better(key: f64, x: f64, best_key: f64, best_x: f64) -> bool {
    key < best_key || (key == best_key && x < best_x)
}

/// Minimizes `f` on `[lo, hi]`: a `grid_points` linspace scan (at least
/// [`MIN_GRID_POINTS`]) followed by golden-section search on the cells
/// adjacent to the best grid point, stopping once the interval is `≤ tol`.
///
/// `f` returns a ranking key (smaller is better, NaN is treated as `+inf`)
/// and a payload reported back for the winning point. Fails with
/// [`Error::NoFeasiblePoint`] when every grid key is `+inf`.
pub fn grid_golden_minimize<P, F>(
    f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    grid_points: usize,
) -> Result<Minimum<P>>
where
    P: Clone + Send,
    F: Fn(f64) -> Result<(f64, P)> + Sync,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(
            "bracket",
            format!("need finite lo < hi, got [{lo}, {hi}]"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", format!("must be > 0, got {tol}")));
    }
    let xs = linspace(lo, hi, grid_points.max(MIN_GRID_POINTS));
    let sanitize = |(k, p): (f64, P)| (if k.is_nan() { f64::INFINITY } else { k }, p);
    let evals: Vec<(f64, P)> = xs
        .par_iter()
        .map(|&x| f(x).map(sanitize))
        .collect::<Result<_>>()?;

    let mut best = 0;
    for i in 1..evals.len() {
        if evals[i].0 < evals[best].0 {
            best = i;
        }
    }
    if evals[best].0 == f64::INFINITY {
        return Err(Error::NoFeasiblePoint { lo, hi });
    }
    let mut best_x = xs[best];
    let mut best_key = evals[best].0;
    let mut best_payload = evals[best].1.clone();

    let mut a = xs[best.saturating_sub(1)];
    let mut b = xs[(best + 1).min(xs.len() - 1)];
    let mut iterations = 0;
    if b - a > tol {
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (mut fc, mut pc) = sanitize(f(c)?);
        let (mut fd, mut pd) = sanitize(f(d)?);
        while b - a > tol {
            iterations += 1;
            if better(fc, c, best_key, best_x) {
                (best_x, best_key, best_payload) = (c, fc, pc.clone());
            }
            if better(fd, d, best_key, best_x) {
                (best_x, best_key, best_payload) = (d, fd, pd.clone());
            }
            // Keep the left part on ties so plateaus resolve toward small x.
            if fc <= fd {
                b = d;
                d = c;
                (fd, pd) = (fc, pc.clone());
                c = b - INV_PHI * (b - a);
                (fc, pc) = sanitize(f(c)?);
            } else {
                a = c;
                c = d;
                (fc, pc) = (fd, pd.clone());
                d = a + INV_PHI * (b - a);
                (fd, pd) = sanitize(f(d)?);
            }
        }
        if better(fc, c, best_key, best_x) {
            (best_x, best_key, best_payload) = (c, fc, pc);
        }
        if better(fd, d, best_key, best_x) {
            (best_x, best_key, best_payload) = (d, fd, pd);
        }
    }
    Ok(Minimum {
        x: best_x,
        key: best_key,
        payload: best_payload,
        iterations,
        grid: xs
            .into_iter()
            .zip(evals.into_iter().map(|(_, p)| p))
            .collect(),
    })
}

fn check_bracket(bracket: (f64, f64)) -> Result<()> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && lo < hi && hi < 1.0) {
        return Err(Error::invalid(
            "bracket",
            format!("need 0 < lo < hi < 1, got ({lo}, {hi})"),
        ));
    }
    Ok(())
}

fn optimize_alpha(
    params: &SystemParams<f64>,
    bracket: (f64, f64),
    tol: f64,
    objective: Objective,
) -> Result<OptResult> {
    check_bracket(bracket)?;
    let params = params.clone().validate()?;
    let m = grid_golden_minimize(
        |a| evaluate(&params, a, objective).map(|e| (e.key, e.point)),
        bracket.0,
        bracket.1,
        tol,
        DEFAULT_GRID_POINTS,
    )?;
    if let Objective::CdfAtT(_) = objective {
        if m.grid.iter().all(|(_, p)| p.objective == 0.0) {
            return Err(Error::NoFeasiblePoint {
                lo: bracket.0,
                hi: bracket.1,
            });
        }
    }
    Ok(OptResult {
        argument: OptArgument::Alpha(m.x),
        objective_value: m.payload.objective,
        grid: m.grid.into_iter().map(|(_, p)| p).collect(),
        refinement_iterations: m.iterations,
    })
}

/// Minimizes E[T] over `alpha ∈ bracket` at the configured `N₀`.
pub fn optimize_alpha_mean_time(
    params: &SystemParams<f64>,
    bracket: (f64, f64),
    tol: f64,
) -> Result<OptResult> {
    optimize_alpha(params, bracket, tol, Objective::MeanTime)
}

/// Maximizes `P(T ≤ t)` over `alpha ∈ bracket`.
///
/// In corrected mode points are ranked by `ln P(T > t)`, which still
/// separates them after the CDF itself has rounded to 1.
pub fn optimize_alpha_cdf(
    params: &SystemParams<f64>,
    bracket: (f64, f64),
    tol: f64,
    t: f64,
) -> Result<OptResult> {
    if !(t > 0.0) {
        return Err(Error::domain("optimize_alpha_cdf", t, "t > 0"));
    }
    optimize_alpha(params, bracket, tol, Objective::CdfAtT(t))
}

/// Exhaustive scan of `n ∈ [n_lo, n_hi]` for the smallest `f(n)`; ties go
/// to the smaller `n`. `f` returns the objective and its sweep point.
pub fn scan_n0<F>(f: F, n_lo: u32, n_hi: u32) -> Result<OptResult>
where
    F: Fn(u32) -> Result<SweepPoint> + Sync,
{
    if !(2 <= n_lo && n_lo < n_hi) {
        return Err(Error::invalid(
            "n0 range",
            format!("need 2 <= n_lo < n_hi, got [{n_lo}, {n_hi}]"),
        ));
    }
    let grid: Vec<SweepPoint> = (n_lo..=n_hi)
        .into_par_iter()
        .map(&f)
        .collect::<Result<_>>()?;
    let key = |p: &SweepPoint| {
        if p.objective.is_nan() {
            f64::INFINITY
        } else {
            p.objective
        }
    };
    let mut best = 0;
    for i in 1..grid.len() {
        if key(&grid[i]) < key(&grid[best]) {
            best = i;
        }
    }
    if key(&grid[best]) == f64::INFINITY {
        return Err(Error::NoFeasiblePoint {
            lo: f64::from(n_lo),
            hi: f64::from(n_hi),
        });
    }
    Ok(OptResult {
        argument: OptArgument::N0(grid[best].n0),
        objective_value: grid[best].objective,
        grid,
        refinement_iterations: 0,
    })
}

/// Minimizes E[T] over the pulse budget at fixed `alpha0`.
pub fn optimize_n0(
    params: &SystemParams<f64>,
    n_lo: u32,
    n_hi: u32,
    alpha0: f64,
) -> Result<OptResult> {
    let base = params.clone().validate()?;
    scan_n0(
        |n| {
            let p = SystemParams {
                max_pulses: n,
                ..base.clone()
            }
            .validate()?;
            evaluate(&p, alpha0, Objective::MeanTime).map(|e| e.point)
        },
        n_lo,
        n_hi,
    )
}
