//! Special functions and quadrature used by the analytic model.
//!
//! Everything here is pure and generic over [`Scalar`]. Accuracy targets are
//! stated for `f64`; `f32` instantiations are accurate to a few ulps of `f32`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Above this argument `Ei` switches from the power series to the
/// asymptotic expansion.
const EI_ASYMPTOTIC_FROM: f64 = 40.0;

/// Above this argument `I0` switches from the power series to the
/// asymptotic expansion.
const I0_ASYMPTOTIC_FROM: f64 = 20.0;

const MAX_SERIES_TERMS: usize = 1000;

// ---------------------------------------------------------------------------
// Exponential integral
// ---------------------------------------------------------------------------

/// `Σ_{k≥1} x^k / (k·k!)`, i.e. `Ei(x) - ln(x) - γ`, by direct summation.
fn ei_series_remainder<T: Scalar>(x: T) -> T {
    let mut term = T::one(); // x^k / k!
    let mut sum = T::zero();
    for k in 1..MAX_SERIES_TERMS {
        let kf: T = lit(k as f64);
        term = term * x / kf;
        let contribution = term / kf;
        sum = sum + contribution;
        if contribution.abs() <= T::epsilon() * sum.abs() {
            break;
        }
    }
    sum
}

/// `e^{-x}·Ei(x)` from the asymptotic series `(1/x)·Σ k!/x^k`, truncated at
/// the smallest term.
fn ei_scaled_asymptotic<T: Scalar>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_SERIES_TERMS {
        let next = term * lit::<T>(k as f64) / x;
        if next >= term {
            break;
        }
        term = next;
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    sum / x
}

fn check_ei_domain<T: Scalar>(x: T) -> Result<()> {
    if x > T::zero() {
        Ok(())
    } else {
        Err(Error::domain("exp_integral_ei", to_f64(x), "x > 0"))
    }
}

/// Exponential integral `Ei(x)` for `x > 0`.
///
/// Overflows to `+inf` once `e^x` does; use [`exp_integral_ei_scaled`] for
/// large arguments.
pub fn exp_integral_ei<T: Scalar>(x: T) -> Result<T> {
    check_ei_domain(x)?;
    if x <= lit(EI_ASYMPTOTIC_FROM) {
        Ok(lit::<T>(EULER_GAMMA) + x.ln() + ei_series_remainder(x))
    } else {
        Ok(x.exp() * ei_scaled_asymptotic(x))
    }
}

/// `e^{-x}·Ei(x)` for `x > 0`, finite for every finite argument.
pub fn exp_integral_ei_scaled<T: Scalar>(x: T) -> Result<T> {
    check_ei_domain(x)?;
    if x <= lit(EI_ASYMPTOTIC_FROM) {
        Ok((-x).exp() * (lit::<T>(EULER_GAMMA) + x.ln() + ei_series_remainder(x)))
    } else {
        Ok(ei_scaled_asymptotic(x))
    }
}

/// `Ei(x) - ln(x) - γ` for `x ≥ 0`.
///
/// Summed as a positive series below the asymptotic switchover, so the
/// result keeps full relative precision as `x → 0⁺` (where it tends to 0).
pub fn ei_log_remainder<T: Scalar>(x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::domain("ei_log_remainder", to_f64(x), "x >= 0"));
    }
    if x <= lit(EI_ASYMPTOTIC_FROM) {
        Ok(ei_series_remainder(x))
    } else {
        Ok(x.exp() * ei_scaled_asymptotic(x) - x.ln() - lit(EULER_GAMMA))
    }
}

/// `e^{-x}·(Ei(x) - ln(x) - γ)` for `x ≥ 0`, finite for all finite `x`.
pub fn ei_log_remainder_scaled<T: Scalar>(x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::domain(
            "ei_log_remainder_scaled",
            to_f64(x),
            "x >= 0",
        ));
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x <= lit(EI_ASYMPTOTIC_FROM) {
        Ok((-x).exp() * ei_series_remainder(x))
    } else {
        Ok(ei_scaled_asymptotic(x) - (-x).exp() * (x.ln() + lit(EULER_GAMMA)))
    }
}

// ---------------------------------------------------------------------------
// Modified Bessel function I0
// ---------------------------------------------------------------------------

fn i0_series<T: Scalar>(x: T) -> T {
    let quarter_sq = x * x / lit(4.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_SERIES_TERMS {
        let kf: T = lit(k as f64);
        term = term * quarter_sq / (kf * kf);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    sum
}

/// `Σ_k ((2k-1)!!)² / (k!·(8x)^k)`; multiply by `e^x/√(2πx)` for `I0(x)`.
fn i0_asymptotic_sum<T: Scalar>(x: T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..MAX_SERIES_TERMS {
        let odd: T = lit((2 * k - 1) as f64);
        let next = term * odd * odd / (lit::<T>(8.0 * k as f64) * x);
        if next >= term {
            break;
        }
        term = next;
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    sum
}

/// Modified Bessel function of the first kind, order zero.
///
/// Even in `x`; negative arguments are reflected.
pub fn bessel_i0<T: Scalar>(x: T) -> T {
    let x = x.abs();
    if x <= lit(I0_ASYMPTOTIC_FROM) {
        i0_series(x)
    } else {
        x.exp() / (T::TAU() * x).sqrt() * i0_asymptotic_sum(x)
    }
}

/// `e^{-|x|}·I0(x)`, finite for every finite argument.
pub fn bessel_i0_scaled<T: Scalar>(x: T) -> T {
    let x = x.abs();
    if x.is_infinite() {
        return T::zero();
    }
    if x <= lit(I0_ASYMPTOTIC_FROM) {
        (-x).exp() * i0_series(x)
    } else {
        i0_asymptotic_sum(x) / (T::TAU() * x).sqrt()
    }
}

// ---------------------------------------------------------------------------
// Gaussian tail
// ---------------------------------------------------------------------------

/// Below this argument `erfc` is `1 - erf` with erf from its positive series;
/// above it a continued fraction keeps relative accuracy in the tail.
const ERFC_CF_FROM: f64 = 3.0;

/// `erf(x)` for `0 ≤ x ≤ ERFC_CF_FROM` from
/// `2/√π · e^{-x²} · Σ 2^n x^{2n+1} / (2n+1)!!` (all terms positive).
fn erf_series<T: Scalar>(x: T) -> T {
    let two_x2 = lit::<T>(2.0) * x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_SERIES_TERMS {
        term = term * two_x2 / lit::<T>((2 * n + 1) as f64);
        sum = sum + term;
        if term <= T::epsilon() * sum {
            break;
        }
    }
    T::FRAC_2_SQRT_PI() * (-x * x).exp() * sum
}

/// `erfc(x)` for `x ≥ ERFC_CF_FROM` via the Laplace continued fraction
/// `e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …))))`, modified Lentz.
fn erfc_continued_fraction<T: Scalar>(x: T) -> T {
    let tiny: T = T::min_positive_value() / T::epsilon();
    let mut f = x;
    let mut c = x;
    let mut d = T::zero();
    for n in 1..MAX_SERIES_TERMS {
        let a: T = lit(n as f64 / 2.0);
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - T::one()).abs() <= T::epsilon() {
            break;
        }
    }
    (-x * x).exp() * T::FRAC_2_SQRT_PI() / (lit::<T>(2.0) * f)
}

/// Complementary error function.
pub fn erfc<T: Scalar>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    if x == T::infinity() {
        return T::zero();
    }
    if x == T::neg_infinity() {
        return lit(2.0);
    }
    if x < T::zero() {
        return lit::<T>(2.0) - erfc(-x);
    }
    if x < lit(ERFC_CF_FROM) {
        T::one() - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Gaussian tail probability `Q(x) = 1 - Φ(x)`.
pub fn gaussian_q<T: Scalar>(x: T) -> T {
    lit::<T>(0.5) * erfc(x * T::FRAC_1_SQRT_2())
}

/// Standard normal density.
pub fn gaussian_pdf<T: Scalar>(x: T) -> T {
    (-x * x / lit(2.0)).exp() / T::TAU().sqrt()
}

/// Inverse of [`gaussian_q`]: the `x` with `Q(x) = p`, for `0 < p < 1`.
pub fn gaussian_q_inv<T: Scalar>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::domain("gaussian_q_inv", to_f64(p), "0 < p < 1"));
    }
    // Rational starting point (Abramowitz & Stegun 26.2.23, |error| < 4.5e-4).
    let upper_tail = |p: T| -> T {
        let t = (lit::<T>(-2.0) * p.ln()).sqrt();
        let num = lit::<T>(2.515_517) + t * (lit::<T>(0.802_853) + t * lit::<T>(0.010_328));
        let den = T::one()
            + t * (lit::<T>(1.432_788) + t * (lit::<T>(0.189_269) + t * lit::<T>(0.001_308)));
        t - num / den
    };
    let half: T = lit(0.5);
    let mut x = if p < half {
        upper_tail(p)
    } else if p > half {
        -upper_tail(T::one() - p)
    } else {
        return Ok(T::zero());
    };
    for _ in 0..100 {
        let density = gaussian_pdf(x);
        if density <= T::zero() {
            break;
        }
        let step = (gaussian_q(x) - p) / density;
        x = x + step;
        if step.abs() <= T::epsilon() * lit::<T>(4.0) * x.abs().max(T::one()) {
            break;
        }
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Adaptive quadrature
// ---------------------------------------------------------------------------

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Scalar> Default for QuadratureSpec<T> {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: lit(1e-13),
            rel_tol: lit(1e-11),
            max_subdivisions: 100_000,
        }
    }
}

impl<T: Scalar> QuadratureSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > T::zero()) {
            return Err(Error::invalid("abs_tol", "must be > 0"));
        }
        if !(rel_tol > T::zero()) {
            return Err(Error::invalid("rel_tol", "must be > 0"));
        }
        if max_subdivisions < 1 {
            return Err(Error::invalid("max_subdivisions", "must be >= 1"));
        }
        Ok(QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

/// Number of equal panels the interval is cut into before adaptation starts.
const INITIAL_PANELS: usize = 8;

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    fa: T,
    flm: T,
    fm: T,
    frm: T,
    fb: T,
    estimate: T,
    error: T,
}

impl<T: Scalar> Panel<T> {
    /// Builds a panel from its end and midpoint samples, evaluating the two
    /// quarter points.
    fn new<F: Fn(T) -> T>(f: &F, a: T, b: T, fa: T, fm: T, fb: T) -> Self {
        let half: T = lit(0.5);
        let m = half * (a + b);
        let flm = f(half * (a + m));
        let frm = f(half * (m + b));
        let h = b - a;
        let four: T = lit(4.0);
        let whole = h / lit(6.0) * (fa + four * fm + fb);
        let halves = h / lit(12.0) * (fa + four * flm + lit::<T>(2.0) * fm + four * frm + fb);
        let diff = halves - whole;
        Panel {
            a,
            b,
            fa,
            flm,
            fm,
            frm,
            fb,
            estimate: halves + diff / lit(15.0),
            error: diff.abs() / lit(15.0),
        }
    }

    fn split<F: Fn(T) -> T>(&self, f: &F) -> Option<(Self, Self)> {
        let m = lit::<T>(0.5) * (self.a + self.b);
        if m <= self.a || m >= self.b {
            return None;
        }
        Some((
            Panel::new(f, self.a, m, self.fa, self.flm, self.fm),
            Panel::new(f, m, self.b, self.fm, self.frm, self.fb),
        ))
    }
}

struct ByError<T>(Panel<T>);

impl<T: Scalar> PartialEq for ByError<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for ByError<T> {}
impl<T: Scalar> PartialOrd for ByError<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for ByError<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .error
            .partial_cmp(&other.0.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Integrates `f` over `[a, b]` with globally adaptive Simpson bisection.
///
/// The panel with the largest error estimate is split until the summed
/// error is at most `max(abs_tol, rel_tol·|result|)`. Running out of
/// subdivisions yields [`Error::Convergence`] carrying the best estimate.
pub fn integrate<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    integrate_with_error(f, a, b, spec).map(|(value, _)| value)
}

/// Like [`integrate`], also returning the final error estimate.
pub fn integrate_with_error<T, F>(f: F, a: T, b: T, spec: &QuadratureSpec<T>) -> Result<(T, T)>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("integrate", to_f64(b - a), "finite a <= b"));
    }
    if a == b {
        return Ok((T::zero(), T::zero()));
    }
    let half: T = lit(0.5);
    let width = (b - a) / lit(INITIAL_PANELS as f64);
    let mut heap = BinaryHeap::with_capacity(4 * INITIAL_PANELS);
    let mut left = a;
    let mut f_left = f(a);
    for i in 0..INITIAL_PANELS {
        let right = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + width * lit(i as f64 + 1.0)
        };
        let f_right = f(right);
        let f_mid = f(half * (left + right));
        heap.push(ByError(Panel::new(&f, left, right, f_left, f_mid, f_right)));
        left = right;
        f_left = f_right;
    }

    let totals = |heap: &BinaryHeap<ByError<T>>| {
        heap.iter().fold((T::zero(), T::zero()), |(v, e), p| {
            (v + p.0.estimate, e + p.0.error)
        })
    };

    let mut subdivisions = 0usize;
    loop {
        let (value, error) = totals(&heap);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::domain(
                "integrate",
                to_f64(value),
                "finite integrand",
            ));
        }
        let target = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= target {
            return Ok((value, error));
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: to_f64(value),
                error_estimate: to_f64(error),
                subdivisions,
            });
        }
        // Split a batch of the worst panels before re-summing.
        let batch = (heap.len() / 8).max(1);
        for _ in 0..batch {
            if subdivisions >= spec.max_subdivisions {
                break;
            }
            let Some(ByError(worst)) = heap.pop() else {
                break;
            };
            match worst.split(&f) {
                Some((l, r)) => {
                    heap.push(ByError(l));
                    heap.push(ByError(r));
                }
                None => {
                    // Interval can no longer be bisected in this precision.
                    heap.push(ByError(Panel {
                        error: T::zero(),
                        ..worst
                    }));
                    continue;
                }
            }
            subdivisions += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    // Reference values from 40-digit mpmath evaluations.
    const EI_1: f64 = 1.895_117_816_355_936_8;
    const EI_10: f64 = 2_492.228_976_241_877_8;
    const I0_1: f64 = 1.266_065_877_752_008_3;
    const Q_1: f64 = 0.158_655_253_931_457_05;
    const QINV_1E3: f64 = 3.090_232_306_167_813_5;

    /// Ramanujan's series for Ei: independent of the implementation's
    /// power series.
    fn ei_ramanujan(x: f64) -> f64 {
        let mut outer = 0.0;
        let mut inner = 0.0;
        let mut coeff = 1.0; // x^n / (n! 2^{n-1}) with sign
        for n in 1..400 {
            coeff *= x / n as f64;
            if n > 1 {
                coeff /= 2.0;
            }
            if (n - 1) % 2 == 0 {
                inner += 1.0 / (n as f64);
            }
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let term = sign * coeff * inner;
            outer += term;
            if n > 10 && term.abs() < 1e-18 * outer.abs() {
                break;
            }
        }
        EULER_GAMMA + x.ln() + (x / 2.0).exp() * outer
    }

    /// `I0(x) = (1/π)∫_0^π e^{x cos θ} dθ` by the trapezoid rule, which
    /// converges geometrically for this periodic integrand.
    fn i0_trapezoid(x: f64) -> f64 {
        let n = 400;
        let h = std::f64::consts::PI / n as f64;
        let mut s = 0.5 * (x.exp() + (-x).exp());
        for i in 1..n {
            s += (x * (i as f64 * h).cos()).exp();
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn ei_reference_values() {
        assert_relative_eq!(exp_integral_ei(1.0).unwrap(), EI_1, max_relative = 1e-12);
        assert_relative_eq!(exp_integral_ei(10.0).unwrap(), EI_10, max_relative = 1e-12);
    }

    #[test]
    fn ei_rejects_nonpositive() {
        assert!(matches!(exp_integral_ei(0.0), Err(Error::Domain { .. })));
        assert!(matches!(exp_integral_ei(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn ei_log_remainder_vanishes_at_zero() {
        for &x in &[1e-3, 1e-6, 1e-9, 1e-12] {
            let r = ei_log_remainder(x).unwrap();
            assert!(r > 0.0);
            assert_relative_eq!(r, x, max_relative = 1e-2);
        }
        assert_eq!(ei_log_remainder(0.0).unwrap(), 0.0);
    }

    #[test]
    fn ei_switchover_is_continuous() {
        let below = exp_integral_ei(EI_ASYMPTOTIC_FROM).unwrap();
        let above = exp_integral_ei(EI_ASYMPTOTIC_FROM * (1.0 + 1e-15)).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-13);
        let sb = exp_integral_ei_scaled(EI_ASYMPTOTIC_FROM).unwrap();
        let sa = exp_integral_ei_scaled(EI_ASYMPTOTIC_FROM * (1.0 + 1e-15)).unwrap();
        assert_relative_eq!(sb, sa, max_relative = 1e-13);
    }

    #[test]
    fn ei_scaled_large_argument_tends_to_inverse() {
        let x = 1e6;
        let s = exp_integral_ei_scaled(x).unwrap();
        assert_relative_eq!(s, (1.0 + 1.0 / x + 2.0 / (x * x)) / x, max_relative = 1e-15);
    }

    #[test]
    fn ei_is_increasing_and_remainder_positive_on_log_grid() {
        let n = 200;
        let (lo, hi) = (1e-8f64.ln(), 50f64.ln());
        let mut prev = f64::NEG_INFINITY;
        for i in 0..n {
            let x = (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp();
            let ei = exp_integral_ei(x).unwrap();
            assert!(ei > prev, "Ei not increasing at {x}");
            prev = ei;
            assert!(
                ei - x.ln() - EULER_GAMMA > 0.0,
                "remainder not positive at {x}"
            );
        }
    }

    #[test]
    fn bessel_reference_values() {
        assert_eq!(bessel_i0(0.0), 1.0);
        assert_relative_eq!(bessel_i0(1.0), I0_1, max_relative = 1e-12);
        let x: f64 = 20.0;
        let asym = x.exp() / (2.0 * std::f64::consts::PI * x).sqrt()
            * (1.0
                + 1.0 / (8.0 * x)
                + 9.0 / (128.0 * x * x)
                + 225.0 / (3072.0 * x.powi(3))
                + 11025.0 / (98304.0 * x.powi(4)));
        assert_relative_eq!(bessel_i0(x), asym, max_relative = 1e-6);
    }

    #[test]
    fn bessel_matches_trapezoid_oracle() {
        for &x in &[0.1, 0.5, 2.0, 7.5, 15.0, 19.99, 20.01, 35.0, 60.0] {
            assert_relative_eq!(bessel_i0(x), i0_trapezoid(x), max_relative = 1e-12);
            assert_relative_eq!(
                bessel_i0_scaled(x),
                i0_trapezoid(x) * (-x).exp(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn q_reference_values() {
        assert_eq!(gaussian_q(0.0), 0.5);
        assert!((gaussian_q(1.0) - Q_1).abs() < 1e-15);
        assert_eq!(gaussian_q(f64::INFINITY), 0.0);
        assert_eq!(gaussian_q(f64::NEG_INFINITY), 1.0);
        let deep = gaussian_q(37.0);
        assert!(deep > 0.0 && deep < 1e-298);
        assert!((gaussian_q(-1.0f64) - 0.841_344_746_068_542_9).abs() < 1e-15);
    }

    #[test]
    fn q_inverse_reference_values() {
        assert_eq!(gaussian_q_inv(0.5).unwrap(), 0.0);
        assert!((gaussian_q_inv(Q_1).unwrap() - 1.0).abs() < 1e-9);
        assert_relative_eq!(
            gaussian_q_inv(1e-3).unwrap(),
            QINV_1E3,
            max_relative = 1e-13
        );
        assert!(gaussian_q_inv(0.0).is_err());
        assert!(gaussian_q_inv(1.0).is_err());
        assert!(gaussian_q_inv(f64::NAN).is_err());
    }

    #[test]
    fn integrate_trivial_and_rayleigh() {
        let spec = QuadratureSpec::default();
        assert_relative_eq!(
            integrate(|x: f64| x, 0.0, 1.0, &spec).unwrap(),
            0.5,
            max_relative = 1e-14
        );
        // Rayleigh(σ=1) pdf over [0, mode].
        let mass = integrate(|r: f64| r * (-r * r / 2.0).exp(), 0.0, 1.0, &spec).unwrap();
        assert_relative_eq!(mass, 1.0 - (-0.5f64).exp(), max_relative = 1e-11);
        assert_eq!(integrate(|x: f64| x, 2.0, 2.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn integrate_reports_best_estimate_when_budget_runs_out() {
        let spec = QuadratureSpec::new(1e-15, 1e-15, 2).unwrap();
        let err = integrate(|x: f64| x.sqrt(), 0.0, 1.0, &spec).unwrap_err();
        match err {
            Error::Convergence {
                estimate,
                subdivisions,
                ..
            } => {
                assert!((estimate - 2.0 / 3.0).abs() < 1e-2);
                assert_eq!(subdivisions, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn integrate_rejects_reversed_bounds() {
        assert!(integrate(|x: f64| x, 1.0, 0.0, &QuadratureSpec::default()).is_err());
        assert!(QuadratureSpec::new(0.0, 1e-3, 10).is_err());
        assert!(QuadratureSpec::new(1e-3, 1e-3, 0).is_err());
    }

    #[test]
    fn f32_instantiation() {
        assert!((exp_integral_ei(1.0f32).unwrap() - EI_1 as f32).abs() < 1e-5);
        assert!((bessel_i0(1.0f32) - I0_1 as f32).abs() < 1e-5);
        assert!((gaussian_q(1.0f32) - Q_1 as f32).abs() < 1e-6);
        let spec = QuadratureSpec::<f32>::new(1e-6, 1e-5, 1000).unwrap();
        assert!((integrate(|x: f32| x * x, 0.0, 1.0, &spec).unwrap() - 1.0 / 3.0).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn q_symmetry(x in -30.0f64..30.0) {
            prop_assert!((gaussian_q(x) + gaussian_q(-x) - 1.0).abs() < 1e-15);
        }

        #[test]
        fn q_inverse_round_trip(p in 1e-12f64..(1.0 - 1e-12)) {
            let x = gaussian_q_inv(p).unwrap();
            prop_assert!((gaussian_q(x) - p).abs() <= 1e-10);
        }

        #[test]
        fn ei_matches_ramanujan_oracle(x in 0.5f64..40.0) {
            let got = exp_integral_ei(x).unwrap();
            let want = ei_ramanujan(x);
            prop_assert!(((got - want) / want).abs() < 1e-12, "x={} got={} want={}", x, got, want);
        }
    }
}
