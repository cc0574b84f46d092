//! TOML run configuration.
//!
//! Every physical quantity carries its unit in the key name (`_nm`, `_um`,
//! `_v`, `_ns`, `_per_ns`, `_db_per_cm`, `_pm_per_v`). Relative paths are
//! resolved against the directory holding the configuration file.
//!
//! ```toml
//! seed = 42
//! output_dir = "out"
//!
//! [device]
//! ring_length_um = 196.7391304347826
//! gaas_length_um = 26.5
//!
//! [device.emitter]
//! purcell_on_resonance = 3.52
//!
//! [decay]
//! detuning_nm = 0.0
//! irf_fwhm_ns = 0.0993
//! ```
//!
//! Omitted keys take the values of [`DeviceConfig::default`] and the
//! section defaults below.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_text, IoError};
use crate::cqed::{DecaySynthesis, EmitterCavityState, G2Synthesis};
use crate::data::uniform_edges;
use crate::device::{CavityTuning, DeviceConfig, TuningCalibration};
use crate::resonator::{taper_loss_per_length, LossBudget, RingGeometry};
use crate::units::{FWHM_PER_SIGMA, NM, UM};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Material database; the bundled one is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub materials_db: Option<PathBuf>,
    #[serde(default)]
    pub device: DeviceSection,
    #[serde(default)]
    pub transmission: TransmissionSection,
    #[serde(default)]
    pub tuning_sweep: SweepSection,
    #[serde(default)]
    pub decay: DecaySection,
    #[serde(default)]
    pub g2: G2Section,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    /// Total round-trip length of the ring.
    pub ring_length_um: f64,
    pub gaas_length_um: f64,
    pub taper_length_um: f64,
    pub taper_count: u32,
    pub group_index: f64,
    pub design_wavelength_nm: f64,
    pub alpha_gaas_db_per_cm: f64,
    pub alpha_ln_db_per_cm: f64,
    pub taper_efficiency: f64,
    /// Derived from `taper_efficiency` and `taper_length_um` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_taper_db_per_cm: Option<f64>,
    pub mode_volume_norm: f64,
    pub tuning: TuningSection,
    pub cavity_tuning: CavityTuningSection,
    pub emitter: EmitterSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuningSection {
    pub qd_wavelength_nm: f64,
    pub tuning_rate_pm_per_v: f64,
    pub clamping_factor: f64,
    pub suspended: bool,
    pub electrode_gap_um: f64,
    pub voltage_min_v: f64,
    pub voltage_max_v: f64,
    pub field_direction: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityTuningSection {
    pub rate_pm_per_v: f64,
    pub voltage_min_v: f64,
    pub voltage_max_v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmitterSection {
    pub qd_wavelength_nm: f64,
    pub cavity_wavelength_nm: f64,
    pub cavity_linewidth_nm: f64,
    pub purcell_on_resonance: f64,
    pub free_rate_per_ns: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        let d = DeviceConfig::default();
        let g = d.geometry;
        let t = d.tuning;
        let c = d.cavity_tuning;
        let e = d.emitter;
        Self {
            ring_length_um: g.total_length_m / UM,
            gaas_length_um: g.gaas_length_m / UM,
            taper_length_um: g.taper_length_m / UM,
            taper_count: g.taper_count,
            group_index: g.group_index,
            design_wavelength_nm: g.design_wavelength_m / NM,
            alpha_gaas_db_per_cm: d.loss.alpha_gaas_db_per_cm,
            alpha_ln_db_per_cm: d.loss.alpha_ln_db_per_cm,
            taper_efficiency: d.loss.taper_efficiency,
            alpha_taper_db_per_cm: None,
            mode_volume_norm: d.mode_volume_norm,
            tuning: TuningSection {
                qd_wavelength_nm: t.qd_wavelength_nm,
                tuning_rate_pm_per_v: t.tuning_rate_pm_per_v,
                clamping_factor: t.clamping_factor,
                suspended: t.suspended,
                electrode_gap_um: t.electrode_gap_um,
                voltage_min_v: t.voltage_min_v,
                voltage_max_v: t.voltage_max_v,
                field_direction: t.field_direction,
            },
            cavity_tuning: CavityTuningSection {
                rate_pm_per_v: c.rate_pm_per_v,
                voltage_min_v: c.voltage_min_v,
                voltage_max_v: c.voltage_max_v,
            },
            emitter: EmitterSection {
                qd_wavelength_nm: e.qd_wavelength_nm,
                cavity_wavelength_nm: e.cavity_wavelength_nm,
                cavity_linewidth_nm: e.cavity_linewidth_nm,
                purcell_on_resonance: e.purcell_on_resonance,
                free_rate_per_ns: e.free_rate_per_ns,
            },
        }
    }
}

impl Default for TuningSection {
    fn default() -> Self {
        DeviceSection::default().tuning
    }
}

impl Default for CavityTuningSection {
    fn default() -> Self {
        DeviceSection::default().cavity_tuning
    }
}

impl Default for EmitterSection {
    fn default() -> Self {
        DeviceSection::default().emitter
    }
}

impl DeviceSection {
    pub fn to_device(&self) -> Result<DeviceConfig, String> {
        let geometry = RingGeometry::new(
            self.ring_length_um * UM,
            self.gaas_length_um * UM,
            self.taper_length_um * UM,
            self.group_index,
            self.design_wavelength_nm * NM,
        )
        .and_then(|g| g.with_taper_count(self.taper_count))
        .map_err(|e| e.to_string())?;
        let alpha_taper = match self.alpha_taper_db_per_cm {
            Some(a) => a,
            None => taper_loss_per_length(self.taper_efficiency, geometry.taper_length_m)
                .map_err(|e| e.to_string())?,
        };
        let loss = LossBudget::new(
            self.alpha_gaas_db_per_cm,
            alpha_taper,
            self.alpha_ln_db_per_cm,
            self.taper_efficiency,
        )
        .map_err(|e| e.to_string())?;
        if !(self.mode_volume_norm > 0.0) {
            return Err("mode_volume_norm must be positive".into());
        }
        let t = &self.tuning;
        if !(t.voltage_min_v <= t.voltage_max_v) {
            return Err("device.tuning voltage_min_v exceeds voltage_max_v".into());
        }
        let c = &self.cavity_tuning;
        if !(c.voltage_min_v <= c.voltage_max_v) {
            return Err("device.cavity_tuning voltage_min_v exceeds voltage_max_v".into());
        }
        let e = &self.emitter;
        let emitter = EmitterCavityState::new(
            e.qd_wavelength_nm,
            e.cavity_wavelength_nm,
            e.cavity_linewidth_nm,
            e.purcell_on_resonance,
            e.free_rate_per_ns,
        )
        .map_err(|e| e.to_string())?;
        Ok(DeviceConfig {
            geometry,
            loss,
            mode_volume_norm: self.mode_volume_norm,
            tuning: TuningCalibration {
                qd_wavelength_nm: t.qd_wavelength_nm,
                tuning_rate_pm_per_v: t.tuning_rate_pm_per_v,
                clamping_factor: t.clamping_factor,
                suspended: t.suspended,
                electrode_gap_um: t.electrode_gap_um,
                voltage_min_v: t.voltage_min_v,
                voltage_max_v: t.voltage_max_v,
                field_direction: t.field_direction,
            },
            cavity_tuning: CavityTuning {
                rate_pm_per_v: c.rate_pm_per_v,
                voltage_min_v: c.voltage_min_v,
                voltage_max_v: c.voltage_max_v,
            },
            emitter,
        })
    }
}

/// Wavelength grid for the transmission simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransmissionSection {
    pub start_nm: f64,
    pub stop_nm: f64,
    pub points: usize,
    /// Bus self-coupling; critical coupling when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_coupling: Option<f64>,
}

impl Default for TransmissionSection {
    fn default() -> Self {
        Self {
            start_nm: 906.0,
            stop_nm: 914.0,
            points: 40_001,
            self_coupling: None,
        }
    }
}

impl TransmissionSection {
    pub fn grid_nm(&self) -> Result<Vec<f64>, String> {
        if self.points < 2 || !(self.stop_nm > self.start_nm) {
            return Err("transmission needs points >= 2 and stop_nm > start_nm".into());
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| self.start_nm + (self.stop_nm - self.start_nm) * i as f64 / n as f64)
            .collect())
    }
}

/// Voltage sweep for the tuning simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub start_v: f64,
    pub stop_v: f64,
    pub points: usize,
    /// Gaussian read-out noise on each wavelength sample.
    pub noise_pm: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            start_v: -500.0,
            stop_v: 500.0,
            points: 41,
            noise_pm: 0.0,
        }
    }
}

impl SweepSection {
    pub fn voltages_v(&self) -> Result<Vec<f64>, String> {
        if self.points < 2 || !(self.stop_v > self.start_v) || !(self.noise_pm >= 0.0) {
            return Err(
                "tuning_sweep needs points >= 2, stop_v > start_v and noise_pm >= 0".into(),
            );
        }
        let n = self.points - 1;
        Ok((0..=n)
            .map(|i| self.start_v + (self.stop_v - self.start_v) * i as f64 / n as f64)
            .collect())
    }
}

/// Lifetime histogram synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    pub detuning_nm: f64,
    /// Full width at half maximum of the Gaussian instrument response.
    pub irf_fwhm_ns: f64,
    pub bin_start_ns: f64,
    pub bin_width_ns: f64,
    pub bins: usize,
    pub amplitude_per_ns: f64,
    pub onset_ns: f64,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self {
            detuning_nm: 0.0,
            irf_fwhm_ns: 0.0993,
            bin_start_ns: -1.0,
            bin_width_ns: 0.016,
            bins: 1000,
            amplitude_per_ns: 2.0e5,
            onset_ns: 0.0,
        }
    }
}

impl DecaySection {
    pub fn irf_sigma_ns(&self) -> f64 {
        self.irf_fwhm_ns / FWHM_PER_SIGMA
    }

    pub fn edges_ns(&self) -> Result<Vec<f64>, String> {
        if self.bins == 0 || !(self.bin_width_ns > 0.0) || !self.bin_start_ns.is_finite() {
            return Err("decay needs bins > 0 and bin_width_ns > 0".into());
        }
        Ok(uniform_edges(
            self.bin_start_ns,
            self.bin_width_ns,
            self.bins,
        ))
    }

    pub fn synthesis(&self) -> DecaySynthesis {
        DecaySynthesis {
            amplitude_per_ns: self.amplitude_per_ns,
            onset_ns: self.onset_ns,
            irf_sigma_ns: self.irf_sigma_ns(),
        }
    }
}

/// Pulsed correlation histogram synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct G2Section {
    pub g2_zero: f64,
    pub lifetime_ns: f64,
    pub repetition_ns: f64,
    pub side_peaks: usize,
    pub side_peak_counts: f64,
    pub bins_per_period: usize,
}

impl Default for G2Section {
    fn default() -> Self {
        Self {
            g2_zero: 0.012,
            lifetime_ns: 1.0 / 1.9,
            repetition_ns: 12.5,
            side_peaks: 4,
            side_peak_counts: 1.0e5,
            bins_per_period: 200,
        }
    }
}

impl G2Section {
    pub fn synthesis(&self) -> G2Synthesis {
        G2Synthesis {
            g2_zero: self.g2_zero,
            lifetime_ns: self.lifetime_ns,
            repetition_ns: self.repetition_ns,
            side_peaks: self.side_peaks,
            side_peak_counts: self.side_peak_counts,
            bins_per_period: self.bins_per_period,
        }
    }
}

impl RunConfig {
    /// Parses, resolves relative paths against `path`'s directory and
    /// checks that referenced files exist.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let text = read_text(path)?;
        let mut cfg = Self::parse(&text).map_err(|message| IoError::Schema {
            path: path.display().to_string(),
            message,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let Some(db) = cfg.materials_db.take() {
            let db = base.join(db);
            if !db.exists() {
                return Err(IoError::MissingFile {
                    path: db.display().to_string(),
                });
            }
            cfg.materials_db = Some(db);
        }
        cfg.output_dir = cfg.output_dir.map(|d| base.join(d));
        cfg.device.to_device().map_err(|message| IoError::Schema {
            path: path.display().to_string(),
            message,
        })?;
        Ok(cfg)
    }

    /// Parses configuration text without touching the file system.
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT_SUFFIXES: &[&str] = &[
        "_nm",
        "_pm",
        "_um",
        "_v",
        "_ns",
        "_per_ns",
        "_db_per_cm",
        "_pm_per_v",
    ];
    const DIMENSIONLESS: &[&str] = &[
        "seed",
        "output_dir",
        "materials_db",
        "taper_count",
        "group_index",
        "taper_efficiency",
        "mode_volume_norm",
        "clamping_factor",
        "suspended",
        "field_direction",
        "purcell_on_resonance",
        "points",
        "self_coupling",
        "g2_zero",
        "side_peaks",
        "side_peak_counts",
        "bins",
        "bins_per_period",
    ];

    fn keys(v: &toml::Value, out: &mut Vec<String>) {
        if let toml::Value::Table(t) = v {
            for (k, v) in t {
                if v.is_table() {
                    keys(v, out);
                } else {
                    out.push(k.clone());
                }
            }
        }
    }

    #[test]
    fn every_quantity_key_has_a_unit_suffix() {
        let mut cfg = RunConfig {
            output_dir: Some("o".into()),
            materials_db: Some("m".into()),
            ..RunConfig::default()
        };
        cfg.device.alpha_taper_db_per_cm = Some(1.0);
        cfg.transmission.self_coupling = Some(0.9);
        let value: toml::Value = toml::from_str(&cfg.to_toml()).unwrap();
        let mut all = Vec::new();
        keys(&value, &mut all);
        assert!(all.len() > 40);
        for k in all {
            assert!(
                DIMENSIONLESS.contains(&k.as_str()) || UNIT_SUFFIXES.iter().any(|s| k.ends_with(s)),
                "key {k} has no unit suffix"
            );
        }
    }

    #[test]
    fn defaults_reproduce_the_default_device() {
        let cfg = RunConfig::parse("").unwrap();
        let d = cfg.device.to_device().unwrap();
        let reference = DeviceConfig::default();
        assert!((d.geometry.optical_path_m() - reference.geometry.optical_path_m()).abs() < 1e-18);
        assert!((d.loss.alpha_taper_db_per_cm - reference.loss.alpha_taper_db_per_cm).abs() < 1e-3);
        assert_eq!(d.tuning, reference.tuning);
        assert_eq!(d.emitter, reference.emitter);
        assert!((cfg.decay.irf_sigma_ns() * FWHM_PER_SIGMA - 0.0993).abs() < 1e-15);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = RunConfig {
            seed: 17,
            ..RunConfig::default()
        };
        cfg.device.tuning.suspended = true;
        cfg.decay.detuning_nm = 0.13;
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn rejects_unknown_and_unitless_keys() {
        let err = RunConfig::parse("[device]\nring_length = 200.0\n").unwrap_err();
        assert!(err.contains("ring_length"), "{err}");
        assert!(RunConfig::parse("[decay]\nirf_fwhm_ns = \"x\"\n").is_err());
    }

    #[test]
    fn resolves_paths_and_checks_files() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.toml");
        std::fs::write(
            &cfg_path,
            "materials_db = \"mat.db\"\noutput_dir = \"out\"\n",
        )
        .unwrap();
        assert!(matches!(
            RunConfig::load(&cfg_path),
            Err(IoError::MissingFile { .. })
        ));
        std::fs::write(dir.path().join("mat.db"), "").unwrap();
        let cfg = RunConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.materials_db.unwrap(), dir.path().join("mat.db"));
        assert_eq!(cfg.output_dir.unwrap(), dir.path().join("out"));

        std::fs::write(&cfg_path, "[device]\ngaas_length_um = -1.0\n").unwrap();
        assert!(matches!(
            RunConfig::load(&cfg_path),
            Err(IoError::Schema { .. })
        ));
    }
}
