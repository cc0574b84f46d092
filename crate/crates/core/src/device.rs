//! Device-level configuration shared by the simulation, fitting and
//! planning stages.

use crate::cqed::EmitterCavityState;
use crate::resonator::{LossBudget, RingGeometry};
use crate::units::{NM, UM};

/// Measured piezo tuning calibration of one quantum dot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningCalibration {
    /// Emission wavelength at 0 V.
    pub qd_wavelength_nm: f64,
    /// Measured magnitude of the clamped-film tuning rate.
    pub tuning_rate_pm_per_v: f64,
    /// Rate multiplier once the GaAs film is released from the substrate.
    pub clamping_factor: f64,
    pub suspended: bool,
    pub electrode_gap_um: f64,
    pub voltage_min_v: f64,
    pub voltage_max_v: f64,
    /// Field direction in device coordinates (x along the waveguide, z the
    /// wafer normal).
    pub field_direction: [f64; 3],
}

impl Default for TuningCalibration {
    fn default() -> Self {
        Self {
            qd_wavelength_nm: 910.0,
            tuning_rate_pm_per_v: 0.47,
            clamping_factor: 6.4,
            suspended: false,
            electrode_gap_um: 5.0,
            voltage_min_v: -500.0,
            voltage_max_v: 500.0,
            field_direction: [0.0, 1.0, 0.0],
        }
    }
}

/// Electro-optic tuning of the cavity resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityTuning {
    pub rate_pm_per_v: f64,
    pub voltage_min_v: f64,
    pub voltage_max_v: f64,
}

impl Default for CavityTuning {
    fn default() -> Self {
        Self {
            rate_pm_per_v: 1.89,
            voltage_min_v: -500.0,
            voltage_max_v: 500.0,
        }
    }
}

/// Full description of one hybrid ring device.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConfig {
    pub geometry: RingGeometry,
    pub loss: LossBudget,
    /// Normalised mode volume `V/(λ/n)³`.
    pub mode_volume_norm: f64,
    pub tuning: TuningCalibration,
    pub cavity_tuning: CavityTuning,
    pub emitter: EmitterCavityState,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        let n_g = 2.3;
        // 452.5 µm optical path
        let geometry = RingGeometry {
            total_length_m: 452.5 * UM / n_g,
            gaas_length_m: 26.5 * UM,
            taper_length_m: 10.5 * UM,
            taper_count: 2,
            group_index: n_g,
            design_wavelength_m: 910.0 * NM,
        };
        let loss = LossBudget {
            alpha_gaas_db_per_cm: 75.0,
            alpha_taper_db_per_cm: 75.128_69,
            alpha_ln_db_per_cm: 0.0,
            taper_efficiency: 0.982,
        };
        Self {
            geometry,
            loss,
            mode_volume_norm: 96.4,
            tuning: TuningCalibration::default(),
            cavity_tuning: CavityTuning::default(),
            emitter: EmitterCavityState {
                qd_wavelength_nm: 910.0,
                cavity_wavelength_nm: 910.0,
                cavity_linewidth_nm: 910.0 / 1.9e4,
                purcell_on_resonance: 3.52,
                free_rate_per_ns: 0.42,
            },
        }
    }
}
