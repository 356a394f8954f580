//! Lidar link budget: return energy, photon energy and mean photon count.
//!
//! The return energy assumes the UAV sits on the lidar beam axis, so only
//! the peak intensity `αE_t/(2πρ_l²)` enters.

use crate::error::{Error, Result};
use crate::model::SystemParams;
use crate::scalar::{lit, to_f64, Scalar};

/// Planck constant (J·s), exact SI value.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum (m/s), exact SI value.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Lidar return statistics for one energy split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    /// Energy reaching the lidar receiver, E_r (J).
    pub return_energy: T,
    /// Energy per photon, E_p (J).
    pub photon_energy: T,
    /// Mean detected photon count λ_U = E_r/E_p.
    pub mean_photon_count: T,
    pub alpha: T,
}

pub(crate) fn check_alpha<T: Scalar>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha < T::one() {
        Ok(())
    } else {
        Err(Error::domain("alpha", to_f64(alpha), "0 < alpha < 1"))
    }
}

/// Photon energy `hc/λ`.
pub fn photon_energy<T: Scalar>(wavelength: T) -> Result<T> {
    if !(wavelength > T::zero()) || wavelength.is_infinite() {
        return Err(Error::domain(
            "photon_energy",
            to_f64(wavelength),
            "wavelength > 0",
        ));
    }
    Ok(lit::<T>(PLANCK) * lit::<T>(SPEED_OF_LIGHT) / wavelength)
}

/// Lidar return energy `αE_tσa_l²/(32π²θ_l²D⁶)`.
pub fn lidar_return_energy<T: Scalar>(params: &SystemParams<T>, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    let p = params;
    let pi = T::PI();
    let d3 = p.distance.powi(3);
    let num = alpha * p.total_energy * p.radar_cross_section * p.lidar_aperture_radius.powi(2);
    let den = lit::<T>(32.0) * pi * pi * p.lidar_half_angle.powi(2) * d3 * d3;
    Ok(num / den)
}

/// Return energy, photon energy and `λ_U` for split `alpha`.
///
/// Uses `params.photon_energy` when set, otherwise `hc/λ`.
pub fn link_budget<T: Scalar>(params: &SystemParams<T>, alpha: T) -> Result<LinkBudget<T>> {
    let return_energy = lidar_return_energy(params, alpha)?;
    let photon_energy = match params.photon_energy {
        Some(e) => e,
        None => photon_energy(params.wavelength)?,
    };
    Ok(LinkBudget {
        return_energy,
        photon_energy,
        mean_photon_count: return_energy / photon_energy,
        alpha,
    })
}

/// Gaussian lidar intensity `αE_t/(2πρ_l²)·exp(-‖p-c‖²/(2ρ_l²))` (J/m²).
pub fn beam_intensity<T: Scalar>(
    params: &SystemParams<T>,
    alpha: T,
    point: [T; 2],
    center: [T; 2],
) -> T {
    let rho_l = params.lidar_beam_radius();
    let two_var = lit::<T>(2.0) * rho_l * rho_l;
    let dx = point[0] - center[0];
    let dy = point[1] - center[1];
    let peak = alpha * params.total_energy / (T::PI() * two_var);
    peak * (-(dx * dx + dy * dy) / two_var).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureSpec};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn defaults() -> SystemParams<f64> {
        SystemParams::default().validate().unwrap()
    }

    #[test]
    fn photon_energy_at_1550nm() {
        // hc/λ worked by hand: 6.62607015e-34 * 299792458 / 1.55e-6.
        let e = photon_energy(1550e-9).unwrap();
        assert_relative_eq!(e, 1.281_577_972_354_147_4e-19, max_relative = 1e-12);
        assert_relative_eq!(e, 1.2816e-19, max_relative = 1e-3);
        assert_eq!(photon_energy(775e-9).unwrap(), 2.0 * e);
        assert_relative_eq!(
            photon_energy(3100e-9).unwrap(),
            e / 2.0,
            max_relative = 1e-15
        );
        assert!(photon_energy(0.0).is_err());
        assert!(photon_energy(-1.0).is_err());
    }

    #[test]
    fn return_energy_at_defaults() {
        let p = defaults();
        let er = lidar_return_energy(&p, 0.5).unwrap();
        assert_relative_eq!(er, 3.166_286_988_823e-13, max_relative = 1e-10);
        assert!(lidar_return_energy(&p, 1e-300).unwrap() < 1e-310);
        let far = SystemParams {
            distance: 200.0,
            ..p.clone()
        };
        assert_relative_eq!(
            lidar_return_energy(&far, 0.5).unwrap(),
            er / 64.0,
            max_relative = 1e-14
        );
        assert!(lidar_return_energy(&p, 0.0).is_err());
        assert!(lidar_return_energy(&p, 1.0).is_err());
    }

    #[test]
    fn mean_photon_count() {
        let p = defaults();
        let lb = link_budget(&p, 0.5).unwrap();
        assert_relative_eq!(lb.mean_photon_count, 2.47e6, max_relative = 1e-2);
        assert_eq!(
            link_budget(&p, 0.25).unwrap().mean_photon_count,
            lb.mean_photon_count / 2.0
        );
        let overridden = SystemParams {
            photon_energy: Some(3.9578e-18),
            ..p
        };
        let lb = link_budget(&overridden, 0.5).unwrap();
        assert_relative_eq!(lb.mean_photon_count, 8.0e4, max_relative = 1e-2);
    }

    #[test]
    fn beam_intensity_profile() {
        let p = defaults();
        let c = [0.3, -0.2];
        let peak = beam_intensity(&p, 0.4, c, c);
        assert_relative_eq!(peak, 0.4 * 10.0 / (2.0 * std::f64::consts::PI * 25.0));
        let rim = beam_intensity(&p, 0.4, [c[0] + 5.0, c[1]], c);
        assert_relative_eq!(rim, peak * (-0.5f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn beam_intensity_integrates_to_lidar_energy() {
        let p = defaults();
        let alpha = 0.3;
        let spec = QuadratureSpec::new(1e-12, 1e-10, 100_000).unwrap();
        let half = 12.0 * p.lidar_beam_radius();
        let total = integrate(
            |x: f64| {
                integrate(
                    |y: f64| beam_intensity(&p, alpha, [x, y], [0.0, 0.0]),
                    -half,
                    half,
                    &spec,
                )
                .unwrap()
            },
            -half,
            half,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(total, alpha * p.total_energy, max_relative = 1e-8);
    }

    proptest! {
        #[test]
        fn return_energy_is_additive(a in 1e-3f64..0.49, b in 1e-3f64..0.49) {
            let p = defaults();
            let sum = lidar_return_energy(&p, a).unwrap() + lidar_return_energy(&p, b).unwrap();
            let joint = lidar_return_energy(&p, a + b).unwrap();
            prop_assert!((sum - joint).abs() <= 1e-14 * joint);
        }

        #[test]
        fn photon_count_monotone(a in 0.01f64..0.98, bump in 1.001f64..2.0) {
            let p = defaults();
            let base = link_budget(&p, a).unwrap().mean_photon_count;
            prop_assert!(base >= 0.0);
            let a2 = (a * bump).min(0.999);
            prop_assert!(link_budget(&p, a2).unwrap().mean_photon_count >= base);
            let bigger_rcs = SystemParams { radar_cross_section: p.radar_cross_section * bump, ..p.clone() };
            prop_assert!(link_budget(&bigger_rcs, a).unwrap().mean_photon_count > base);
            let bigger_ap = SystemParams { lidar_aperture_radius: p.lidar_aperture_radius * bump, ..p.clone() };
            prop_assert!(link_budget(&bigger_ap, a).unwrap().mean_photon_count > base);
            let wider = SystemParams { lidar_half_angle: p.lidar_half_angle * bump, ..p.clone() };
            prop_assert!(link_budget(&wider, a).unwrap().mean_photon_count < base);
            let farther = SystemParams { distance: p.distance * bump, ..p.clone() };
            prop_assert!(link_budget(&farther, a).unwrap().mean_photon_count < base);
        }
    }
}
