//! Centroid-estimator error bounds and the resulting uncertainty region.

use crate::error::{Error, Result};
use crate::linkbudget::link_budget;
use crate::model::{SphereShape, SystemParams};
use crate::scalar::{lit, to_f64, Scalar};
use crate::specfun::ei_log_remainder_scaled;

/// Pointing uncertainty around the lidar position estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintySphere<T> {
    pub shape: SphereShape,
    /// Angle-error standard deviation along the azimuth axis (rad).
    pub sigma_e_az: T,
    /// Angle-error standard deviation along the elevation axis (rad).
    pub sigma_e_el: T,
    /// `3·sigma_e_az·D` (m).
    pub radius_a: T,
    /// `3·sigma_e_el·D` (m).
    pub radius_b: T,
    /// Firing-distribution variance along the first axis (m²).
    pub firing_var_1: T,
    /// Firing-distribution variance along the second axis (m²).
    pub firing_var_2: T,
    pub distance: T,
}

impl<T: Scalar> UncertaintySphere<T> {
    /// Per-axis variance of the beam-centre miss distance: firing spread plus
    /// estimation error, `(σ_{s1}² + σ_{E1}²D², σ_{s2}² + σ_{E2}²D²)`.
    pub fn miss_variances(&self) -> (T, T) {
        let d2 = self.distance * self.distance;
        (
            self.firing_var_1 + self.sigma_e_az * self.sigma_e_az * d2,
            self.firing_var_2 + self.sigma_e_el * self.sigma_e_el * d2,
        )
    }
}

/// Upper bound on the centroid-estimator variance for mean photon count
/// `lambda_u`:
/// `e^{-λ}|A|/2 + ρ²·e^{-λ}(Ei(λ) - ln λ - γ)`.
///
/// At `λ = 0` this is `|A|/2`, the variance when no photon arrives.
pub fn centroid_variance_bound<T: Scalar>(lambda_u: T, array_area: T, spot_radius: T) -> Result<T> {
    if lambda_u < T::zero() || lambda_u.is_nan() {
        return Err(Error::domain(
            "centroid_variance_bound",
            to_f64(lambda_u),
            "lambda_u >= 0",
        ));
    }
    if !(array_area > T::zero()) {
        return Err(Error::invalid("array_area", "must be > 0"));
    }
    if !(spot_radius > T::zero()) {
        return Err(Error::invalid("spot_radius", "must be > 0"));
    }
    let half_area = array_area / lit(2.0);
    let tail = ei_log_remainder_scaled(lambda_u)?;
    Ok((-lambda_u).exp() * half_area + spot_radius * spot_radius * tail)
}

/// Angle-of-arrival error variance `centroid_bound / (F·cos(angle))²`.
pub fn angle_error_variance_bound<T: Scalar>(
    angle: T,
    focal_length: T,
    centroid_bound: T,
) -> Result<T> {
    let c = angle.cos();
    if !(c > T::zero()) {
        return Err(Error::domain(
            "angle_error_variance_bound",
            to_f64(angle),
            "|angle| < pi/2",
        ));
    }
    let scale = focal_length * c;
    Ok(centroid_bound / (scale * scale))
}

/// Builds the uncertainty region for energy split `alpha`.
///
/// Circular mode uses the elevation-angle bound for both axes and the firing
/// variance `2σ_E²D²`; elliptical mode keeps both axes and uses `σ_{Ei}²D²`.
pub fn uncertainty_sphere<T: Scalar>(
    params: &SystemParams<T>,
    alpha: T,
) -> Result<UncertaintySphere<T>> {
    let lb = link_budget(params, alpha)?;
    let bound =
        centroid_variance_bound(lb.mean_photon_count, params.array_area, params.spot_radius)?;
    let var_el = angle_error_variance_bound(params.elevation, params.focal_length, bound)?;
    let d = params.distance;
    let d2 = d * d;
    let three: T = lit(3.0);
    let sphere = match params.sphere_shape {
        SphereShape::Circular => {
            let sigma = var_el.sqrt();
            let firing = lit::<T>(2.0) * var_el * d2;
            UncertaintySphere {
                shape: SphereShape::Circular,
                sigma_e_az: sigma,
                sigma_e_el: sigma,
                radius_a: three * sigma * d,
                radius_b: three * sigma * d,
                firing_var_1: firing,
                firing_var_2: firing,
                distance: d,
            }
        }
        SphereShape::Elliptical => {
            let var_az = angle_error_variance_bound(params.azimuth, params.focal_length, bound)?;
            let sigma_az = var_az.sqrt();
            let sigma_el = var_el.sqrt();
            UncertaintySphere {
                shape: SphereShape::Elliptical,
                sigma_e_az: sigma_az,
                sigma_e_el: sigma_el,
                radius_a: three * sigma_az * d,
                radius_b: three * sigma_el * d,
                firing_var_1: var_az * d2,
                firing_var_2: var_el * d2,
                distance: d,
            }
        }
    };
    Ok(sphere)
}
