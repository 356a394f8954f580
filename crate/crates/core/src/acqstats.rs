//! Coverage, detection and acquisition-time statistics.
//!
//! One acquisition attempt is a lidar measurement (`T₁`) followed by up to
//! `N₀` FSO pulses spaced `T₂` apart. With `X` attempts and `N` pulses in the
//! final attempt the total time is `T = XT₁ + (X-1)N₀T₂ + NT₂`. In units of
//! `T₂`, `z = T/T₂ + N₀ = XM + N` with `M = T₁/T₂ + N₀`, which is the lattice
//! the CDF and [`pmf_z`] work on.

use crate::error::{Error, Result};
use crate::estimation::{uncertainty_sphere, UncertaintySphere};
use crate::linkbudget::{check_alpha, link_budget};
use crate::model::{EnergyModel, HoytShape, NormalizationMode, SphereShape, SystemParams};
use crate::scalar::{lit, one_minus_pow_complement, pow_complement, to_f64, Scalar};
use crate::specfun::{bessel_i0_scaled, gaussian_q, integrate, QuadratureSpec};

/// Per-pulse and per-attempt success probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcqProbabilities<T> {
    /// P(C): the beam footprint covers the UAV aperture.
    pub p_coverage: T,
    /// P(D|C): the covered pulse is detected.
    pub p_detect_given_coverage: T,
    /// p_N = P(C)·P(D|C).
    pub p_pulse: T,
    /// p_X = 1 - (1-p_N)^{N₀}.
    pub p_attempt: T,
    pub n0: u32,
}

/// Nakagami-q (Hoyt) miss-distance parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoytParams<T> {
    /// Shape parameter in (0, 1]; 1 is the Rayleigh case.
    pub q: T,
    /// Second moment of the miss distance (m²).
    pub omega: T,
}

impl<T: Scalar> HoytParams<T> {
    /// Standard parameterisation from the two per-axis variances:
    /// `q = σ_min/σ_max`, `Ω = σ₁² + σ₂²`.
    pub fn from_axis_variances(var1: T, var2: T) -> Result<Self> {
        check_variances(var1, var2)?;
        let (lo, hi) = if var1 <= var2 {
            (var1, var2)
        } else {
            (var2, var1)
        };
        Ok(HoytParams {
            q: (lo / hi).sqrt(),
            omega: var1 + var2,
        })
    }

    /// Probability density of the miss distance at radius `r ≥ 0`.
    pub fn pdf(&self, r: T) -> T {
        if r < T::zero() {
            return T::zero();
        }
        let q = self.q;
        let q2 = q * q;
        let one = T::one();
        let two: T = lit(2.0);
        let four: T = lit(4.0);
        let r2 = r * r;
        let arg = (one - q2 * q2) * r2 / (four * q2 * self.omega);
        (one + q2) / (q * self.omega)
            * r
            * (-(one + q2) * r2 / (two * self.omega)).exp()
            * bessel_i0_scaled(arg)
    }
}

fn check_variances<T: Scalar>(var1: T, var2: T) -> Result<()> {
    for (field, v) in [("var1", var1), ("var2", var2)] {
        if !(v > T::zero()) || v.is_infinite() {
            return Err(Error::invalid(
                field,
                format!("variance must be finite and > 0, got {v}"),
            ));
        }
    }
    Ok(())
}

fn check_margin<T: Scalar>(fso_radius: T, uav_radius: T) -> Result<T> {
    if fso_radius > uav_radius {
        Ok(fso_radius - uav_radius)
    } else {
        Err(Error::GeometricInfeasibility {
            fso_radius: to_f64(fso_radius),
            uav_radius: to_f64(uav_radius),
        })
    }
}

/// Rayleigh coverage probability `1 - exp(-(ρ_f-ρ_uav)²/(2·total_var))`.
///
/// `total_var` is the per-axis variance of the beam-centre miss distance.
pub fn coverage_prob_circular<T: Scalar>(fso_radius: T, uav_radius: T, total_var: T) -> Result<T> {
    let margin = check_margin(fso_radius, uav_radius)?;
    if total_var < T::zero() || total_var.is_nan() {
        return Err(Error::domain(
            "coverage_prob_circular",
            to_f64(total_var),
            "total_var >= 0",
        ));
    }
    if total_var == T::zero() {
        return Ok(T::one());
    }
    Ok(-(-(margin * margin) / (lit::<T>(2.0) * total_var)).exp_m1())
}

/// Hoyt parameters with `q = min{(cos φ/cos ψ)², (cos ψ/cos φ)²}` and
/// `Ω = var1 + var2`.
pub fn hoyt_params<T: Scalar>(azimuth: T, elevation: T, var1: T, var2: T) -> Result<HoytParams<T>> {
    check_variances(var1, var2)?;
    let ratio = (azimuth.cos() / elevation.cos()).powi(2);
    Ok(HoytParams {
        q: ratio.min(ratio.recip()),
        omega: var1 + var2,
    })
}

/// Hoyt coverage probability `∫₀^{ρ_f-ρ_uav} f(r) dr`, integrated numerically.
pub fn coverage_prob_elliptical<T: Scalar>(
    fso_radius: T,
    uav_radius: T,
    hoyt: &HoytParams<T>,
    quad: &QuadratureSpec<T>,
) -> Result<T> {
    let margin = check_margin(fso_radius, uav_radius)?;
    if !(hoyt.q > T::zero() && hoyt.q <= T::one()) {
        return Err(Error::invalid(
            "q",
            format!("must lie in (0, 1], got {}", hoyt.q),
        ));
    }
    if !(hoyt.omega > T::zero()) {
        return Err(Error::invalid(
            "omega",
            format!("must be > 0, got {}", hoyt.omega),
        ));
    }
    // Beyond twelve standard deviations of the major axis the density is
    // below any representable tolerance.
    let upper = margin.min(lit::<T>(12.0) * hoyt.omega.sqrt());
    let mass = integrate(|r| hoyt.pdf(r), T::zero(), upper, quad)?;
    Ok(mass.max(T::zero()).min(T::one()))
}

fn per_pulse_energy<T: Scalar>(params: &SystemParams<T>, alpha: T) -> T {
    (T::one() - alpha) * params.total_energy / lit(f64::from(params.max_pulses))
}

/// Energy captured per pulse when beam and lens centres coincide:
/// `(1-α)(E_t/N₀)(1 - exp(-ρ_uav²/(2ρ_f²)))`.
pub fn received_energy_coincident<T: Scalar>(params: &SystemParams<T>, alpha: T) -> T {
    let rho_f = params.fso_beam_radius();
    let rho_u = params.uav_aperture_radius;
    let captured = -(-(rho_u * rho_u) / (lit::<T>(2.0) * rho_f * rho_f)).exp_m1();
    per_pulse_energy(params, alpha) * captured
}

/// Mean energy captured per pulse by a point-like lens whose offset from the
/// beam centre is Gaussian with per-axis variance `total_var`, truncated to
/// the footprint radius.
///
/// At `total_var = 0` this returns the on-axis value
/// `(1-α)(E_t/N₀)ρ_uav²/(2ρ_f²)`, the limit of the general expression.
pub fn received_energy_point<T: Scalar>(params: &SystemParams<T>, alpha: T, total_var: T) -> T {
    let rho_f = params.fso_beam_radius();
    let rho_f2 = rho_f * rho_f;
    let rho_u2 = params.uav_aperture_radius * params.uav_aperture_radius;
    let two: T = lit(2.0);
    let e = per_pulse_energy(params, alpha);
    if !(total_var > T::zero()) {
        return e * rho_u2 / (two * rho_f2);
    }
    let a0 = -(-rho_f2 / (two * total_var)).exp_m1();
    let tail = -(-(total_var + rho_f2) / (two * total_var)).exp_m1();
    e * rho_u2 / (two * a0 * (rho_f2 + total_var)) * tail
}

/// Threshold detection probability `Q((threshold - signal)/noise_std)`.
pub fn detection_prob<T: Scalar>(signal_charge: T, threshold: T, noise_std: T) -> Result<T> {
    if !(noise_std > T::zero()) {
        return Err(Error::domain(
            "detection_prob",
            to_f64(noise_std),
            "noise_std > 0",
        ));
    }
    Ok(gaussian_q((threshold - signal_charge) / noise_std))
}

/// Mean energy captured per pulse under the configured energy model.
///
/// The point-detector model sees the average per-axis miss variance, which
/// in elliptical mode is `Ω/2`.
pub fn received_energy<T: Scalar>(
    params: &SystemParams<T>,
    alpha: T,
    sphere: &UncertaintySphere<T>,
) -> T {
    match params.energy_model {
        EnergyModel::CoincidentCenters => received_energy_coincident(params, alpha),
        EnergyModel::PointDetector => {
            let (var1, var2) = sphere.miss_variances();
            received_energy_point(params, alpha, (var1 + var2) / lit(2.0))
        }
    }
}

/// Coverage probability for the sphere's miss distribution.
pub fn coverage_prob<T: Scalar>(
    params: &SystemParams<T>,
    sphere: &UncertaintySphere<T>,
) -> Result<T> {
    let (var1, var2) = sphere.miss_variances();
    let rho_f = params.fso_beam_radius();
    let rho_u = params.uav_aperture_radius;
    match params.sphere_shape {
        SphereShape::Circular => coverage_prob_circular(rho_f, rho_u, var1),
        SphereShape::Elliptical => {
            let hoyt = match params.hoyt_shape {
                HoytShape::Standard => HoytParams::from_axis_variances(var1, var2)?,
                HoytShape::VarianceRatio => {
                    hoyt_params(params.azimuth, params.elevation, var1, var2)?
                }
            };
            coverage_prob_elliptical(rho_f, rho_u, &hoyt, &QuadratureSpec::default())
        }
    }
}

/// Composes link budget, uncertainty region, coverage, received energy and
/// detection into `p_N` and `p_X`.
pub fn pulse_success_prob<T: Scalar>(
    params: &SystemParams<T>,
    alpha: T,
) -> Result<AcqProbabilities<T>> {
    check_alpha(alpha)?;
    // Surface link-budget domain errors before any geometry work.
    link_budget(params, alpha)?;
    let sphere = uncertainty_sphere(params, alpha)?;
    let p_coverage = coverage_prob(params, &sphere)?;
    let signal = params.photoconversion_efficiency * received_energy(params, alpha, &sphere);
    let p_detect = detection_prob(signal, params.threshold()?, params.noise_std)?;
    let p_pulse = p_coverage * p_detect;
    let n0 = params.max_pulses;
    Ok(AcqProbabilities {
        p_coverage,
        p_detect_given_coverage: p_detect,
        p_pulse,
        p_attempt: one_minus_pow_complement(p_pulse, lit(f64::from(n0))),
        n0,
    })
}

fn check_probability<T: Scalar>(function: &'static str, p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(function, to_f64(p), "0 <= p <= 1"))
    }
}

/// Normalizer of the truncated pulse-count distribution.
fn pulse_normalizer<T: Scalar>(p_n: T, n0: T, mode: NormalizationMode) -> T {
    match mode {
        NormalizationMode::Corrected => one_minus_pow_complement(p_n, n0),
        NormalizationMode::PaperFaithful => (T::one() - p_n) - pow_complement(p_n, n0),
    }
}

fn check_normalizer<T: Scalar>(function: &'static str, p_n: T, w: T) -> Result<()> {
    if w == T::zero() {
        Err(Error::domain(
            function,
            to_f64(p_n),
            "normalizer is zero (p must avoid 0 and 1)",
        ))
    } else {
        Ok(())
    }
}

/// Mean pulses in the successful attempt:
/// `(1 - (1-p)^{N₀}(1 + N₀p)) / (p·W)` with normalizer `W` per `mode`.
///
/// In corrected mode `p = 0` returns the uniform limit `(N₀+1)/2`; in paper
/// mode `p ∈ {0, 1}` makes `W` vanish and is a domain error.
pub fn expected_pulses<T: Scalar>(p_n: T, n0: u32, mode: NormalizationMode) -> Result<T> {
    check_probability("expected_pulses", p_n)?;
    if n0 < 1 {
        return Err(Error::invalid("max_pulses", "must be >= 1"));
    }
    let n: T = lit(f64::from(n0));
    let w = pulse_normalizer(p_n, n, mode);
    if mode == NormalizationMode::Corrected && p_n == T::zero() {
        return Ok((n + T::one()) / lit(2.0));
    }
    check_normalizer("expected_pulses", p_n, w)?;
    let numerator = (T::one() - pow_complement(p_n, n) * (T::one() + n * p_n)) / p_n;
    Ok(numerator / w)
}

/// Mean number of attempts `1/p_X`; `+inf` when `p_X = 0`.
pub fn expected_attempts<T: Scalar>(p_x: T) -> Result<T> {
    check_probability("expected_attempts", p_x)?;
    if p_x == T::zero() {
        return Ok(T::infinity());
    }
    Ok(p_x.recip())
}

/// Position of a time on the `z = XM + N` lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeSlot {
    /// Attempts that can be complete by this time (`k ≥ 1`).
    pub attempt: u64,
    /// Pulses of attempt `k` that fit, in `1..=N₀`.
    pub pulses: u32,
}

/// `floor(x)`, but values within rounding noise of an integer snap to it so
/// that e.g. `t = 2·T₂` lands on its slot even when `t/T₂ = 1.9999999999`.
fn snapped_floor<T: Scalar>(x: T) -> T {
    let r = x.round();
    let tol = lit::<T>(1e-9).max(lit::<T>(8.0) * T::epsilon()) * T::one().max(x.abs());
    if (x - r).abs() <= tol {
        r
    } else {
        x.floor()
    }
}

/// `(k, j)` as reals; `None` below the minimum time `T₁ + T₂`.
fn slot_real<T: Scalar>(t: T, t1: T, t2: T, n0: u32) -> Option<(T, T)> {
    let n: T = lit(f64::from(n0));
    let m = t1 / t2 + n;
    let z = t / t2 + n;
    let k = snapped_floor((z - T::one()) / m);
    if !(k >= T::one()) {
        return None;
    }
    let j = snapped_floor(z - k * m).min(n).max(T::one());
    Some((k, j))
}

/// Slot of time `t`: all attempts before `k` have failed and attempt `k` has
/// fired `j` pulses. `None` if `t < T₁ + T₂`.
pub fn time_slot<T: Scalar>(t: T, t1: T, t2: T, n0: u32) -> Option<TimeSlot> {
    slot_real(t, t1, t2, n0).map(|(k, j)| TimeSlot {
        attempt: k.to_u64().unwrap_or(u64::MAX),
        pulses: j.to_u32().unwrap_or(n0),
    })
}

/// Mean and distribution of the total acquisition time for one `(p_N, N₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcqTimeModel<T> {
    /// E[X].
    pub expected_attempts: T,
    /// E[N].
    pub expected_pulses: T,
    /// E[T] (s).
    pub expected_time: T,
    pub t1: T,
    pub t2: T,
    pub n0: u32,
    pub p_pulse: T,
    pub normalization_mode: NormalizationMode,
}

impl<T: Scalar> AcqTimeModel<T> {
    pub fn new(p_pulse: T, n0: u32, t1: T, t2: T, mode: NormalizationMode) -> Result<Self> {
        check_probability("AcqTimeModel::new", p_pulse)?;
        if n0 < 1 {
            return Err(Error::invalid("max_pulses", "must be >= 1"));
        }
        if !(t1 > T::zero()) || !(t2 > T::zero()) || t1.is_infinite() || t2.is_infinite() {
            return Err(Error::invalid("t1/t2", "must be finite and > 0"));
        }
        let n: T = lit(f64::from(n0));
        let p_x = one_minus_pow_complement(p_pulse, n);
        let e_x = expected_attempts(p_x)?;
        let e_n = expected_pulses(p_pulse, n0, mode)?;
        let e_t = if e_x.is_infinite() {
            T::infinity()
        } else {
            (t1 + n * t2) * e_x + t2 * e_n - n * t2
        };
        Ok(AcqTimeModel {
            expected_attempts: e_x,
            expected_pulses: e_n,
            expected_time: e_t,
            t1,
            t2,
            n0,
            p_pulse,
            normalization_mode: mode,
        })
    }

    /// p_X = 1 - (1-p_N)^{N₀}.
    pub fn p_attempt(&self) -> T {
        one_minus_pow_complement(self.p_pulse, lit(f64::from(self.n0)))
    }

    /// Lattice period `M = T₁/T₂ + N₀`.
    pub fn period(&self) -> T {
        self.t1 / self.t2 + lit(f64::from(self.n0))
    }

    fn normalizer(&self) -> T {
        pulse_normalizer(
            self.p_pulse,
            lit(f64::from(self.n0)),
            self.normalization_mode,
        )
    }

    /// `P(N = j)` for the pulse count of the successful attempt.
    pub fn pmf_pulses(&self, j: u32) -> T {
        if j < 1 || j > self.n0 {
            return T::zero();
        }
        let p = self.p_pulse;
        if p == T::zero() {
            return T::zero();
        }
        pow_complement(p, lit(f64::from(j - 1))) * p / self.normalizer()
    }

    /// `P(T ≤ t)`.
    ///
    /// For `z` in `[kM+1, kM+N₀]` the second factor counts the first `j`
    /// pulses of attempt `k`; on the gap `[kM+N₀+1, (k+1)M]` attempt `k` is
    /// complete.
    pub fn cdf(&self, t: T) -> T {
        let p = self.p_pulse;
        let n: T = lit(f64::from(self.n0));
        let p_x = self.p_attempt();
        if p == T::zero() || t.is_nan() {
            return T::zero();
        }
        let w = self.normalizer();
        if t.is_infinite() && t > T::zero() {
            return p_x / w;
        }
        let Some((k, j)) = slot_real(t, self.t1, self.t2, self.n0) else {
            return T::zero();
        };
        if j < n {
            // (1-p_X)^{k-1}, computed from p_N to keep precision.
            let prev_fail = pow_complement(p, n * (k - T::one()));
            (T::one() - prev_fail) * p_x / w + prev_fail * p_x * one_minus_pow_complement(p, j) / w
        } else {
            one_minus_pow_complement(p, n * k) * p_x / w
        }
    }

    /// `ln P(T > t)`, accurate when the survival underflows. Corrected mode
    /// only; paper mode returns `ln(1 - cdf)`.
    pub fn log_survival(&self, t: T) -> T {
        match self.normalization_mode {
            NormalizationMode::PaperFaithful => (-self.cdf(t)).ln_1p(),
            NormalizationMode::Corrected => {
                let p = self.p_pulse;
                let Some((k, j)) = slot_real(t, self.t1, self.t2, self.n0) else {
                    return T::zero();
                };
                let n: T = lit(f64::from(self.n0));
                let fired = n * (k - T::one()) + j;
                if p >= T::one() {
                    return T::neg_infinity();
                }
                fired * (-p).ln_1p()
            }
        }
    }

    /// `P(Z = n)` on the lattice `z = XM + N`: nonzero only for
    /// `n = kM + j` with `j ∈ 1..=N₀`.
    pub fn pmf_z(&self, k: u64, n: T) -> T {
        pmf_z(k, n, self)
    }
}

/// `P(Z = n) = (1-p_X)^{k-1}p_X · P(N = n - kM)`; zero off the support.
pub fn pmf_z<T: Scalar>(k: u64, n: T, model: &AcqTimeModel<T>) -> T {
    if k < 1 {
        return T::zero();
    }
    let kf: T = lit(k as f64);
    let offset = n - kf * model.period();
    let j = offset.round();
    let tol = lit::<T>(1e-9).max(lit::<T>(8.0) * T::epsilon()) * T::one().max(n.abs());
    if (offset - j).abs() > tol || j < T::one() || j > lit(f64::from(model.n0)) {
        return T::zero();
    }
    let p_x = model.p_attempt();
    let nn: T = lit(f64::from(model.n0));
    let prev_fail = pow_complement(model.p_pulse, nn * (kf - T::one()));
    prev_fail * p_x * model.pmf_pulses(j.to_u32().unwrap_or(0))
}

/// `E[T]` and the rest of the time model at split `alpha`.
pub fn expected_time<T: Scalar>(params: &SystemParams<T>, alpha: T) -> Result<AcqTimeModel<T>> {
    let probs = pulse_success_prob(params, alpha)?;
    AcqTimeModel::new(
        probs.p_pulse,
        params.max_pulses,
        params.t1,
        params.t2,
        params.normalization_mode,
    )
}

/// `P(T ≤ t)` at split `alpha`.
pub fn acq_time_cdf<T: Scalar>(params: &SystemParams<T>, alpha: T, t: T) -> Result<T> {
    if t < T::zero() || t.is_nan() {
        return Err(Error::domain("acq_time_cdf", to_f64(t), "t >= 0"));
    }
    Ok(expected_time(params, alpha)?.cdf(t))
}
