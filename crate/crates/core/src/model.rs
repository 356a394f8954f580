//! System parameters shared by every other module.
//!
//! Beam radii are always derived from the half-angles (`ρ = θ·D`); there are
//! no stored radius fields to get out of sync.
//!
//! Angle naming: `azimuth` is the angle the analysis calls φ and `elevation`
//! the one it calls ψ. The reference parameter table labels the same two
//! numbers the other way round (0.1 "elevation", 0.6 "azimuth"); the
//! defaults keep φ = 0.1 and ψ = 0.6 so all angle-dependent formulas see the
//! same values as the analysis.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};
use crate::specfun::gaussian_q_inv;

/// Shape of the lidar uncertainty region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SphereShape {
    Circular,
    Elliptical,
}

/// Approximation used for the energy the UAV aperture captures per pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EnergyModel {
    /// Beam and lens centres coincide.
    CoincidentCenters,
    /// Lens is a point detector inside a truncated Gaussian miss distribution.
    PointDetector,
}

/// Normalizer of the truncated-geometric pulse count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationMode {
    /// `(1-p_N) - (1-p_N)^{N₀}`, reproduced verbatim. Not a probability law
    /// for large `p_N`.
    PaperFaithful,
    /// `1 - (1-p_N)^{N₀}`, the proper truncation to `{1..N₀}`.
    Corrected,
}

/// How the Hoyt shape parameter is formed from the per-axis miss variances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HoytShape {
    /// `q = σ_min/σ_max`, the standard Nakagami-q parameter.
    Standard,
    /// `q = σ²_min/σ²_max`, i.e. the squared cosine ratio of the two angles.
    VarianceRatio,
}

macro_rules! keyword_enum {
    ($ty:ty, $what:literal, { $($variant:path => $kw:literal),+ $(,)? }) => {
        impl $ty {
            pub fn keyword(self) -> &'static str {
                match self { $($variant => $kw),+ }
            }
        }
        impl FromStr for $ty {
            type Err = String;
            fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
                match s.trim() {
                    $($kw => Ok($variant),)+
                    other => Err(format!(
                        concat!("unknown ", $what, " `{}` (expected one of: {})"),
                        other,
                        [$($kw),+].join(", ")
                    )),
                }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.keyword())
            }
        }
    };
}

keyword_enum!(SphereShape, "sphere shape", {
    SphereShape::Circular => "circular",
    SphereShape::Elliptical => "elliptical",
});
keyword_enum!(EnergyModel, "energy model", {
    EnergyModel::CoincidentCenters => "coincident",
    EnergyModel::PointDetector => "point",
});
keyword_enum!(NormalizationMode, "normalization mode", {
    NormalizationMode::PaperFaithful => "paper",
    NormalizationMode::Corrected => "corrected",
});
keyword_enum!(HoytShape, "hoyt shape", {
    HoytShape::Standard => "standard",
    HoytShape::VarianceRatio => "variance-ratio",
});

/// Every physical and algorithmic parameter of the acquisition system. SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams<T> {
    /// Total energy split between lidar and FSO transmitter (J).
    pub total_energy: T,
    /// Ground station to UAV distance (m).
    pub distance: T,
    /// Lidar beam half-angle (rad).
    pub lidar_half_angle: T,
    /// FSO acquisition beam half-angle (rad).
    pub fso_half_angle: T,
    /// Lidar receiver telescope radius (m).
    pub lidar_aperture_radius: T,
    /// UAV radar cross-section (m²).
    pub radar_cross_section: T,
    /// UAV receiver aperture radius (m).
    pub uav_aperture_radius: T,
    /// φ (rad).
    pub azimuth: T,
    /// ψ (rad).
    pub elevation: T,
    /// Lidar receiver focal length (m).
    pub focal_length: T,
    /// Detector array area (m²).
    pub array_area: T,
    /// Effective focused spot radius on the array (m).
    pub spot_radius: T,
    /// Optical wavelength (m).
    pub wavelength: T,
    /// Overrides `hc/λ` when set (J).
    pub photon_energy: Option<T>,
    /// Photoconversion efficiency η of the UAV detector.
    pub photoconversion_efficiency: T,
    /// Noise standard deviation σ_W at the UAV receiver (charge units).
    pub noise_std: T,
    /// Detection threshold Υ₀; derived from `false_alarm_prob` when `None`.
    pub detection_threshold: Option<T>,
    /// False-alarm probability used to derive Υ₀.
    pub false_alarm_prob: T,
    /// Lidar round trip plus processing time (s).
    pub t1: T,
    /// Interval between FSO pulses (s).
    pub t2: T,
    /// Maximum pulses per acquisition attempt, N₀.
    pub max_pulses: u32,
    pub sphere_shape: SphereShape,
    pub energy_model: EnergyModel,
    pub normalization_mode: NormalizationMode,
    pub hoyt_shape: HoytShape,
}

impl<T: Scalar> Default for SystemParams<T> {
    /// Reference operating point, plus defaults for the free parameters.
    fn default() -> Self {
        SystemParams {
            total_energy: lit(10.0),
            distance: lit(100.0),
            lidar_half_angle: lit(0.05),
            fso_half_angle: lit(5e-4),
            lidar_aperture_radius: lit(0.5),
            radar_cross_section: lit(0.2),
            uav_aperture_radius: lit(0.01),
            azimuth: lit(0.1),
            elevation: lit(0.6),
            focal_length: lit(1e-3),
            array_area: lit(1e-6),
            spot_radius: lit(1e-4),
            wavelength: lit(1550e-9),
            photon_energy: None,
            photoconversion_efficiency: lit(0.5),
            noise_std: lit(1e-5),
            detection_threshold: None,
            false_alarm_prob: lit(1e-3),
            t1: lit(1e-3),
            t2: lit(1e-3),
            max_pulses: 10,
            sphere_shape: SphereShape::Circular,
            energy_model: EnergyModel::PointDetector,
            normalization_mode: NormalizationMode::Corrected,
            hoyt_shape: HoytShape::Standard,
        }
    }
}

fn require_positive<T: Scalar>(field: &'static str, value: T) -> Result<()> {
    if value.is_finite() && value > T::zero() {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

impl<T: Scalar> SystemParams<T> {
    /// Lidar beam radius at the UAV, `θ_l·D`.
    pub fn lidar_beam_radius(&self) -> T {
        self.lidar_half_angle * self.distance
    }

    /// FSO footprint radius at the UAV, `θ_f·D`.
    pub fn fso_beam_radius(&self) -> T {
        self.fso_half_angle * self.distance
    }

    /// Detection threshold: the stored value, or `σ_W·Q⁻¹(P_fa)`.
    pub fn threshold(&self) -> Result<T> {
        match self.detection_threshold {
            Some(v) => Ok(v),
            None => Ok(self.noise_std * gaussian_q_inv(self.false_alarm_prob)?),
        }
    }

    /// Checks every invariant and fills in the derived detection threshold.
    ///
    /// Idempotent.
    pub fn validate(mut self) -> Result<Self> {
        for (field, value) in [
            ("total_energy", self.total_energy),
            ("distance", self.distance),
            ("lidar_half_angle", self.lidar_half_angle),
            ("fso_half_angle", self.fso_half_angle),
            ("lidar_aperture_radius", self.lidar_aperture_radius),
            ("radar_cross_section", self.radar_cross_section),
            ("uav_aperture_radius", self.uav_aperture_radius),
            ("focal_length", self.focal_length),
            ("array_area", self.array_area),
            ("spot_radius", self.spot_radius),
            ("wavelength", self.wavelength),
            ("noise_std", self.noise_std),
            ("t1", self.t1),
            ("t2", self.t2),
        ] {
            require_positive(field, value)?;
        }
        if let Some(e) = self.photon_energy {
            require_positive("photon_energy", e)?;
        }
        let right_angle = T::FRAC_PI_2();
        for (field, angle) in [("azimuth", self.azimuth), ("elevation", self.elevation)] {
            if !(angle > T::zero() && angle < right_angle) {
                return Err(Error::invalid(
                    field,
                    format!("must lie in (0, π/2), got {angle}"),
                ));
            }
        }
        if !(self.fso_half_angle < self.lidar_half_angle) {
            return Err(Error::invalid(
                "fso_half_angle",
                format!(
                    "must be smaller than lidar_half_angle ({} >= {})",
                    self.fso_half_angle, self.lidar_half_angle
                ),
            ));
        }
        let eta = self.photoconversion_efficiency;
        if !(eta > T::zero() && eta <= T::one()) {
            return Err(Error::invalid(
                "photoconversion_efficiency",
                format!("must lie in (0, 1], got {eta}"),
            ));
        }
        let pfa = self.false_alarm_prob;
        if !(pfa > T::zero() && pfa < T::one()) {
            return Err(Error::invalid(
                "false_alarm_prob",
                format!("must lie in (0, 1), got {pfa}"),
            ));
        }
        if let Some(th) = self.detection_threshold {
            if th.is_nan() {
                return Err(Error::invalid("detection_threshold", "must not be NaN"));
            }
        }
        if self.max_pulses < 2 {
            return Err(Error::invalid(
                "max_pulses",
                format!("must be >= 2, got {}", self.max_pulses),
            ));
        }
        if !(self.uav_aperture_radius < self.fso_beam_radius()) {
            return Err(Error::GeometricInfeasibility {
                fso_radius: to_f64(self.fso_beam_radius()),
                uav_radius: to_f64(self.uav_aperture_radius),
            });
        }
        self.detection_threshold = Some(self.threshold()?);
        Ok(self)
    }
}

// ---------------------------------------------------------------------------
// Flat `key = value` config files
// ---------------------------------------------------------------------------

/// Every recognised config key, in the order they are written out.
pub const CONFIG_KEYS: &[&str] = &[
    "total_energy_j",
    "distance_m",
    "lidar_half_angle_rad",
    "fso_half_angle_rad",
    "lidar_aperture_radius_m",
    "radar_cross_section_m2",
    "uav_aperture_radius_m",
    "azimuth_rad",
    "elevation_rad",
    "focal_length_m",
    "array_area_m2",
    "spot_radius_m",
    "wavelength_m",
    "photon_energy_j",
    "photoconversion_efficiency",
    "noise_std",
    "detection_threshold",
    "false_alarm_prob",
    "t1_s",
    "t2_s",
    "max_pulses",
    "sphere_shape",
    "energy_model",
    "normalization_mode",
    "hoyt_shape",
];

fn parse_real<T: Scalar>(key: &str, value: &str) -> std::result::Result<T, String> {
    let v: f64 = value
        .parse()
        .map_err(|_| format!("`{key}`: cannot parse `{value}` as a number"))?;
    T::from_f64(v).ok_or_else(|| format!("`{key}`: `{value}` not representable"))
}

fn parse_optional<T: Scalar>(key: &str, value: &str) -> std::result::Result<Option<T>, String> {
    if value.eq_ignore_ascii_case("none") || value.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        parse_real(key, value).map(Some)
    }
}

fn fmt_real<T: Scalar>(v: T) -> String {
    format!("{:?}", to_f64(v))
}

impl<T: Scalar> SystemParams<T> {
    /// Sets one field from its config key. Does not validate.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let value = value.trim();
        match key.trim() {
            "total_energy_j" => self.total_energy = parse_real(key, value)?,
            "distance_m" => self.distance = parse_real(key, value)?,
            "lidar_half_angle_rad" => self.lidar_half_angle = parse_real(key, value)?,
            "fso_half_angle_rad" => self.fso_half_angle = parse_real(key, value)?,
            "lidar_aperture_radius_m" => self.lidar_aperture_radius = parse_real(key, value)?,
            "radar_cross_section_m2" => self.radar_cross_section = parse_real(key, value)?,
            "uav_aperture_radius_m" => self.uav_aperture_radius = parse_real(key, value)?,
            "azimuth_rad" => self.azimuth = parse_real(key, value)?,
            "elevation_rad" => self.elevation = parse_real(key, value)?,
            "focal_length_m" => self.focal_length = parse_real(key, value)?,
            "array_area_m2" => self.array_area = parse_real(key, value)?,
            "spot_radius_m" => self.spot_radius = parse_real(key, value)?,
            "wavelength_m" => self.wavelength = parse_real(key, value)?,
            "photon_energy_j" => self.photon_energy = parse_optional(key, value)?,
            "photoconversion_efficiency" => {
                self.photoconversion_efficiency = parse_real(key, value)?
            }
            "noise_std" => self.noise_std = parse_real(key, value)?,
            "detection_threshold" => self.detection_threshold = parse_optional(key, value)?,
            "false_alarm_prob" => self.false_alarm_prob = parse_real(key, value)?,
            "t1_s" => self.t1 = parse_real(key, value)?,
            "t2_s" => self.t2 = parse_real(key, value)?,
            "max_pulses" => {
                self.max_pulses = value
                    .parse()
                    .map_err(|_| format!("`max_pulses`: cannot parse `{value}` as an integer"))?
            }
            "sphere_shape" => self.sphere_shape = value.parse()?,
            "energy_model" => self.energy_model = value.parse()?,
            "normalization_mode" => self.normalization_mode = value.parse()?,
            "hoyt_shape" => self.hoyt_shape = value.parse()?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Current value of a config key, formatted as it would be written.
    pub fn get(&self, key: &str) -> Option<String> {
        let opt = |v: Option<T>| v.map_or_else(|| "auto".to_string(), fmt_real);
        Some(match key {
            "total_energy_j" => fmt_real(self.total_energy),
            "distance_m" => fmt_real(self.distance),
            "lidar_half_angle_rad" => fmt_real(self.lidar_half_angle),
            "fso_half_angle_rad" => fmt_real(self.fso_half_angle),
            "lidar_aperture_radius_m" => fmt_real(self.lidar_aperture_radius),
            "radar_cross_section_m2" => fmt_real(self.radar_cross_section),
            "uav_aperture_radius_m" => fmt_real(self.uav_aperture_radius),
            "azimuth_rad" => fmt_real(self.azimuth),
            "elevation_rad" => fmt_real(self.elevation),
            "focal_length_m" => fmt_real(self.focal_length),
            "array_area_m2" => fmt_real(self.array_area),
            "spot_radius_m" => fmt_real(self.spot_radius),
            "wavelength_m" => fmt_real(self.wavelength),
            "photon_energy_j" => opt(self.photon_energy),
            "photoconversion_efficiency" => fmt_real(self.photoconversion_efficiency),
            "noise_std" => fmt_real(self.noise_std),
            "detection_threshold" => opt(self.detection_threshold),
            "false_alarm_prob" => fmt_real(self.false_alarm_prob),
            "t1_s" => fmt_real(self.t1),
            "t2_s" => fmt_real(self.t2),
            "max_pulses" => self.max_pulses.to_string(),
            "sphere_shape" => self.sphere_shape.to_string(),
            "energy_model" => self.energy_model.to_string(),
            "normalization_mode" => self.normalization_mode.to_string(),
            "hoyt_shape" => self.hoyt_shape.to_string(),
            _ => return None,
        })
    }

    /// Applies a config file on top of `self`.
    ///
    /// One `key = value` per line; `#` starts a comment; blank lines are
    /// ignored. Unknown or repeated keys are errors.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            self.set(key, value).map_err(|message| Error::Config {
                line: line_no,
                message,
            })?;
        }
        Ok(())
    }

    /// Parses a config file over the defaults, then validates.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut params = SystemParams::default();
        params.apply_config(text)?;
        params.validate()
    }

    /// Writes every key in [`CONFIG_KEYS`] order. The output parses back to
    /// an equal parameter set.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let value = self.get(key).expect("every listed key is readable");
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }
}
