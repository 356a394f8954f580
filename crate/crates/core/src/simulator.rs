//! Monte Carlo simulation of the acquisition procedure.
//!
//! Each trial repeats attempts until a pulse both covers the UAV aperture and
//! is detected. An attempt redraws the UAV offset around the lidar estimate,
//! then fires up to `N₀` pulses from the firing distribution. A pulse covers
//! the UAV when its miss distance is below `ρ_f - ρ_uav` and is detected when
//! `η·E + W > Υ₀` with `W ~ N(0, σ_W²)`.
//!
//! Every trial owns its RNG stream, derived from `(seed, trial index)`, so a
//! summary depends only on the seed and trial count, never on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::acqstats::{received_energy, time_slot};
use crate::error::{Error, Result};
use crate::estimation::{uncertainty_sphere, UncertaintySphere};
use crate::linkbudget::check_alpha;
use crate::model::SystemParams;
use crate::specfun::gaussian_q;

/// Generator used for every trial, recorded in output metadata.
pub const RNG_ALGORITHM: &str =
    "ChaCha12Rng (rand_chacha 0.9); seed_from_u64(seed), set_stream(trial_index)";

/// Default cap on attempts per trial.
pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000_000;

/// How the per-pulse captured energy is modelled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimFidelity {
    /// Every pulse sees the analytic mean captured energy and a fresh UAV
    /// offset, so pulses are i.i.d. Bernoulli(p_N) exactly as the analysis
    /// assumes.
    FaithfulToAnalytic,
    /// The UAV offset is fixed for the whole attempt and each pulse's energy
    /// follows the Gaussian footprint at its own miss distance.
    Physical,
}

impl SimFidelity {
    pub fn keyword(self) -> &'static str {
        match self {
            SimFidelity::FaithfulToAnalytic => "faithful",
            SimFidelity::Physical => "physical",
        }
    }
}

impl std::str::FromStr for SimFidelity {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim() {
            "faithful" => Ok(SimFidelity::FaithfulToAnalytic),
            "physical" => Ok(SimFidelity::Physical),
            other => Err(format!(
                "unknown fidelity `{other}` (expected faithful or physical)"
            )),
        }
    }
}

impl std::fmt::Display for SimFidelity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.keyword())
    }
}

/// One simulated acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// X, attempts including the successful one.
    pub attempts: u64,
    /// N, pulses fired in the successful attempt.
    pub pulses_final_attempt: u32,
    /// `X·T₁ + ((X-1)·N₀ + N)·T₂` (s).
    pub total_time: f64,
    /// 1-based indices, counted over all pulses of the trial, at which the
    /// UAV detector crossed its threshold. Earlier entries are false alarms
    /// on uncovered pulses; the last entry is the successful pulse.
    pub detected_pulse_index_history: Vec<u64>,
}

/// Empirical `P(T ≤ t)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfEstimate {
    pub t: f64,
    pub probability: f64,
    pub stderr: f64,
}

/// Aggregate of a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSummary {
    pub trials: u64,
    pub mean_time: f64,
    /// Sample standard deviation of T over `√trials`.
    pub mean_time_stderr: f64,
    pub empirical_cdf: Vec<CdfEstimate>,
    /// Successful pulses over pulses fired.
    pub empirical_p_pulse: f64,
    pub p_pulse_stderr: f64,
    pub total_pulses: u64,
    pub mean_attempts: f64,
    pub seed: u64,
    pub rng_algorithm: &'static str,
    pub fidelity: SimFidelity,
    pub alpha: f64,
}

/// Outcome of one attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttemptOutcome {
    pub success: bool,
    pub pulses_used: u32,
}

/// The per-trial RNG: stream `index` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulation setup for one `(params, alpha, fidelity)`.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SystemParams<f64>,
    alpha: f64,
    fidelity: SimFidelity,
    /// Per-axis std of the UAV offset around the estimate.
    uav_std: [f64; 2],
    /// Per-axis std of the firing distribution.
    firing_std: [f64; 2],
    coverage_radius: f64,
    threshold: f64,
    /// Analytic mean captured energy (faithful mode).
    mean_energy: f64,
    /// Captured energy at zero miss distance (physical mode).
    peak_energy: f64,
    max_attempts: u64,
}

impl Simulator {
    /// Builds the sphere from `params` at split `alpha`.
    pub fn new(params: &SystemParams<f64>, alpha: f64, fidelity: SimFidelity) -> Result<Self> {
        check_alpha(alpha)?;
        let params = params.clone().validate()?;
        let sphere = uncertainty_sphere(&params, alpha)?;
        Self::with_sphere(&params, alpha, &sphere, fidelity)
    }

    /// Uses an explicit uncertainty region instead of deriving it.
    pub fn with_sphere(
        params: &SystemParams<f64>,
        alpha: f64,
        sphere: &UncertaintySphere<f64>,
        fidelity: SimFidelity,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let params = params.clone().validate()?;
        let d = sphere.distance;
        let uav_std = [sphere.sigma_e_az * d, sphere.sigma_e_el * d];
        let firing_std = [sphere.firing_var_1.sqrt(), sphere.firing_var_2.sqrt()];
        let rho_f = params.fso_beam_radius();
        let rho_u = params.uav_aperture_radius;
        let per_pulse = (1.0 - alpha) * params.total_energy / f64::from(params.max_pulses);
        Ok(Simulator {
            coverage_radius: rho_f - rho_u,
            threshold: params.threshold()?,
            mean_energy: received_energy(&params, alpha, sphere),
            peak_energy: per_pulse * rho_u * rho_u / (2.0 * rho_f * rho_f),
            uav_std,
            firing_std,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            params,
            alpha,
            fidelity,
        })
    }

    /// Caps attempts per trial; exceeding it is a non-termination error.
    pub fn with_max_attempts(mut self, max_attempts: u64) -> Self {
        self.max_attempts = max_attempts.max(1);
        self
    }

    pub fn params(&self) -> &SystemParams<f64> {
        &self.params
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn fidelity(&self) -> SimFidelity {
        self.fidelity
    }

    /// True when no pulse can ever be detected, so a trial cannot end.
    fn hopeless(&self) -> bool {
        let best_energy = match self.fidelity {
            SimFidelity::FaithfulToAnalytic => self.mean_energy,
            SimFidelity::Physical => self.peak_energy,
        };
        let best_signal = self.params.photoconversion_efficiency * best_energy;
        gaussian_q((self.threshold - best_signal) / self.params.noise_std) == 0.0
    }

    fn gaussian_offset<R: Rng + ?Sized>(rng: &mut R, std: [f64; 2]) -> [f64; 2] {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        [x * std[0], y * std[1]]
    }

    fn detector_fires<R: Rng + ?Sized>(&self, rng: &mut R, energy: f64) -> bool {
        let w: f64 = rng.sample(StandardNormal);
        self.params.photoconversion_efficiency * energy + self.params.noise_std * w > self.threshold
    }

    /// Fires up to `N₀` pulses. `pulse_offset` is the number of pulses fired
    /// earlier in the trial and `history` collects detector crossings.
    pub fn simulate_attempt<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        pulse_offset: u64,
        history: &mut Vec<u64>,
    ) -> AttemptOutcome {
        let n0 = self.params.max_pulses;
        let rho_f = self.params.fso_beam_radius();
        let two_var_f = 2.0 * rho_f * rho_f;
        let mut uav = Self::gaussian_offset(rng, self.uav_std);
        for pulse in 1..=n0 {
            if self.fidelity == SimFidelity::FaithfulToAnalytic && pulse > 1 {
                uav = Self::gaussian_offset(rng, self.uav_std);
            }
            let aim = Self::gaussian_offset(rng, self.firing_std);
            let dx = aim[0] - uav[0];
            let dy = aim[1] - uav[1];
            let miss2 = dx * dx + dy * dy;
            let covered = miss2.sqrt() < self.coverage_radius;
            let energy = if !covered {
                0.0
            } else {
                match self.fidelity {
                    SimFidelity::FaithfulToAnalytic => self.mean_energy,
                    SimFidelity::Physical => self.peak_energy * (-miss2 / two_var_f).exp(),
                }
            };
            if self.detector_fires(rng, energy) {
                history.push(pulse_offset + u64::from(pulse));
                if covered {
                    return AttemptOutcome {
                        success: true,
                        pulses_used: pulse,
                    };
                }
            }
        }
        AttemptOutcome {
            success: false,
            pulses_used: n0,
        }
    }

    /// Runs attempts until one succeeds.
    pub fn simulate_acquisition<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<TrialRecord> {
        if self.hopeless() {
            return Err(Error::NonTermination {
                attempts: self.max_attempts,
            });
        }
        let n0 = u64::from(self.params.max_pulses);
        let mut history = Vec::new();
        for attempt in 1..=self.max_attempts {
            let outcome = self.simulate_attempt(rng, (attempt - 1) * n0, &mut history);
            if outcome.success {
                let pulses = (attempt - 1) * n0 + u64::from(outcome.pulses_used);
                return Ok(TrialRecord {
                    attempts: attempt,
                    pulses_final_attempt: outcome.pulses_used,
                    total_time: attempt as f64 * self.params.t1 + pulses as f64 * self.params.t2,
                    detected_pulse_index_history: history,
                });
            }
        }
        Err(Error::NonTermination {
            attempts: self.max_attempts,
        })
    }

    /// Trial `index` on its own stream of `seed`.
    pub fn run_trial(&self, seed: u64, index: u64) -> Result<TrialRecord> {
        self.simulate_acquisition(&mut trial_rng(seed, index))
    }

    /// Runs `n_trials` trials in parallel and aggregates them in index order.
    pub fn run_trials(&self, n_trials: u64, seed: u64, cdf_grid: &[f64]) -> Result<SimSummary> {
        if n_trials < 1 {
            return Err(Error::invalid("trials", "must be >= 1"));
        }
        let records = (0..n_trials)
            .into_par_iter()
            .map(|i| self.run_trial(seed, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.summarize(&records, seed, cdf_grid))
    }

    /// Aggregates trial records, sequentially and in order.
    pub fn summarize(&self, records: &[TrialRecord], seed: u64, cdf_grid: &[f64]) -> SimSummary {
        let p = &self.params;
        let n0 = u64::from(p.max_pulses);
        let times: Vec<f64> = records.iter().map(|r| r.total_time).collect();
        let (mean_time, mean_time_stderr) = mean_and_stderr(&times);
        let total_pulses: u64 = records
            .iter()
            .map(|r| (r.attempts - 1) * n0 + u64::from(r.pulses_final_attempt))
            .sum();
        let n = records.len() as f64;
        let empirical_p_pulse = n / total_pulses as f64;
        let p_pulse_stderr =
            (empirical_p_pulse * (1.0 - empirical_p_pulse) / total_pulses as f64).sqrt();
        let mean_attempts = records.iter().map(|r| r.attempts as f64).sum::<f64>() / n;
        let empirical_cdf = cdf_grid
            .iter()
            .map(|&t| {
                let hits: Vec<f64> = match time_slot(t, p.t1, p.t2, p.max_pulses) {
                    None => vec![0.0; records.len()],
                    Some(slot) => records
                        .iter()
                        .map(|r| {
                            let done = r.attempts < slot.attempt
                                || (r.attempts == slot.attempt
                                    && r.pulses_final_attempt <= slot.pulses);
                            if done {
                                1.0
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                };
                let (probability, stderr) = mean_and_stderr(&hits);
                CdfEstimate {
                    t,
                    probability,
                    stderr,
                }
            })
            .collect();
        SimSummary {
            trials: records.len() as u64,
            mean_time,
            mean_time_stderr,
            empirical_cdf,
            empirical_p_pulse,
            p_pulse_stderr,
            total_pulses,
            mean_attempts,
            seed,
            rng_algorithm: RNG_ALGORITHM,
            fidelity: self.fidelity,
            alpha: self.alpha,
        }
    }
}

/// Sample mean and `s/√n` (with the `n-1` sample variance; 0 for one value).
fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

/// Convenience wrapper: build a [`Simulator`] and run `n_trials` trials.
pub fn run_trials(
    params: &SystemParams<f64>,
    alpha: f64,
    fidelity: SimFidelity,
    n_trials: u64,
    seed: u64,
    cdf_grid: &[f64],
) -> Result<SimSummary> {
    Simulator::new(params, alpha, fidelity)?.run_trials(n_trials, seed, cdf_grid)
}
