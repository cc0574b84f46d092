//! Voltage-induced strain in the GaAs layer, the Pikus-Bir band-gap shift it
//! causes, and the resulting emission wavelength versus electrode voltage.
//!
//! The field between the electrodes is taken as uniform, `|F| = V / gap`.
//! The stress it produces in the piezoelectric film is `σ = -eᵀF`, and the
//! GaAs compliance maps that stress to strain:
//! `ε = -k · S_GaAs · eᵀ_device · F`, where `k` lumps the mechanical
//! clamping enhancement and the film-to-GaAs strain transfer.

use nalgebra::{Matrix3, Vector3, Vector6};
use thiserror::Error;

use crate::device::DeviceConfig;
use crate::materials::voigt::{strain_to_voigt, voigt_to_strain};
use crate::materials::{
    rotate_piezo_to_xcut, DeformationPotentials, ElasticCompliance, FrameRotation, MaterialSet,
    PiezoTensor,
};
use crate::units::{HC_EV_NM, NM, UM};

/// Largest strain component accepted by the linear-elastic model.
pub const SMALL_STRAIN_LIMIT: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StrainError {
    #[error("strain component {index} = {value:e} exceeds the small-strain limit")]
    StrainOutOfRange { index: usize, value: f64 },
    #[error("voltage {voltage} V outside the device limits [{min}, {max}] V")]
    VoltageLimitExceeded { voltage: f64, min: f64, max: f64 },
    #[error("the strain chain gives no wavelength shift for this field direction")]
    NoStrainResponse,
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Voltage applied across an electrode gap, with the field direction in the
/// device frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppliedField {
    pub voltage_v: f64,
    pub electrode_gap_m: f64,
    pub direction: Vector3<f64>,
}

impl AppliedField {
    pub fn new(
        voltage_v: f64,
        electrode_gap_m: f64,
        direction: Vector3<f64>,
    ) -> Result<Self, StrainError> {
        if !(electrode_gap_m > 0.0) || !electrode_gap_m.is_finite() {
            return Err(StrainError::Invalid(format!(
                "electrode gap must be positive, got {electrode_gap_m}"
            )));
        }
        if !voltage_v.is_finite() {
            return Err(StrainError::Invalid("voltage must be finite".into()));
        }
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(StrainError::Invalid(format!(
                "field direction must be a unit vector, |d| = {}",
                direction.norm()
            )));
        }
        Ok(Self {
            voltage_v,
            electrode_gap_m,
            direction,
        })
    }
}

/// Uniform-field approximation: `voltage / gap` along the direction, V/m.
pub fn field_from_voltage(applied: &AppliedField) -> Vector3<f64> {
    applied.direction * (applied.voltage_v / applied.electrode_gap_m)
}

/// Strain in Voigt form with engineering shear:
/// `(ε_xx, ε_yy, ε_zz, 2ε_yz, 2ε_xz, 2ε_xy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainState {
    voigt: Vector6<f64>,
}

impl StrainState {
    pub fn new(voigt: Vector6<f64>) -> Result<Self, StrainError> {
        for (index, &value) in voigt.iter().enumerate() {
            if !value.is_finite() || value.abs() >= SMALL_STRAIN_LIMIT {
                return Err(StrainError::StrainOutOfRange { index, value });
            }
        }
        Ok(Self { voigt })
    }

    pub fn from_tensor(tensor: &Matrix3<f64>) -> Result<Self, StrainError> {
        Self::new(strain_to_voigt(tensor))
    }

    pub fn zero() -> Self {
        Self {
            voigt: Vector6::zeros(),
        }
    }

    pub fn voigt(&self) -> &Vector6<f64> {
        &self.voigt
    }

    pub fn tensor(&self) -> Matrix3<f64> {
        voigt_to_strain(&self.voigt)
    }

    pub fn hydrostatic(&self) -> f64 {
        self.voigt[0] + self.voigt[1] + self.voigt[2]
    }
}

/// Mechanical scaling of the piezo-induced strain.
///
/// `clamping_factor` is the suspended-to-clamped enhancement (1 for a
/// membrane still on its oxide). `strain_transfer` is the fraction of the
/// film strain that reaches the GaAs layer; it is calibrated from a
/// measured tuning rate and defaults to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanicalContext {
    pub clamping_factor: f64,
    pub strain_transfer: f64,
}

impl MechanicalContext {
    pub fn new(clamping_factor: f64, strain_transfer: f64) -> Result<Self, StrainError> {
        if !(clamping_factor >= 1.0) || !clamping_factor.is_finite() {
            return Err(StrainError::Invalid(format!(
                "clamping factor must be >= 1, got {clamping_factor}"
            )));
        }
        if !(strain_transfer > 0.0) || !strain_transfer.is_finite() {
            return Err(StrainError::Invalid(format!(
                "strain transfer must be positive, got {strain_transfer}"
            )));
        }
        Ok(Self {
            clamping_factor,
            strain_transfer,
        })
    }

    pub fn clamped() -> Self {
        Self {
            clamping_factor: 1.0,
            strain_transfer: 1.0,
        }
    }
}

/// `ε = -k · S · (eᵀ · F)` with `k = clamping_factor · strain_transfer`.
pub fn strain_from_field(
    field: &Vector3<f64>,
    compliance: &ElasticCompliance,
    piezo_device: &PiezoTensor,
    context: &MechanicalContext,
) -> Result<StrainState, StrainError> {
    let stress_drive = piezo_device.matrix().transpose() * field;
    let scale = context.clamping_factor * context.strain_transfer;
    StrainState::new(-scale * (compliance.matrix() * stress_drive))
}

/// Band-gap shift from the Pikus-Bir Hamiltonian, eV:
///
/// `ΔE = (a_c + a_v)·ε_h − sqrt(|Q|² + |R|²)` with
/// `Q = −(b/2)(ε_xx + ε_yy − 2ε_zz)` and
/// `R = (√3/2)·b·(ε_xx − ε_yy) − i·d·ε_xy`, `ε_xy` being the tensor shear.
pub fn pikus_bir_shift(strain: &StrainState, potentials: &DeformationPotentials) -> f64 {
    let v = strain.voigt();
    let (exx, eyy, ezz) = (v[0], v[1], v[2]);
    let exy = 0.5 * v[5];
    let q = -0.5 * potentials.b * (exx + eyy - 2.0 * ezz);
    let r_re = 0.5 * 3f64.sqrt() * potentials.b * (exx - eyy);
    let r_im = -potentials.d * exy;
    (potentials.a_c + potentials.a_v) * strain.hydrostatic() - q.hypot(r_re.hypot(r_im))
}

/// First-order wavelength change for an energy shift: `Δλ = −λ²·ΔE / (hc)`.
/// Wavelengths in metres, energy in eV.
pub fn wavelength_shift(delta_e_ev: f64, center_wavelength_m: f64) -> f64 {
    let lambda_nm = center_wavelength_m / NM;
    -(lambda_nm * lambda_nm) * delta_e_ev / HC_EV_NM * NM
}

/// One sample of a tuning curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningPoint {
    pub voltage_v: f64,
    pub wavelength_nm: f64,
}

/// Calibrated voltage → emission-wavelength map for one device.
///
/// The strain chain (field → strain → Pikus-Bir shift) fixes the direction
/// of the shift; the film-to-GaAs strain transfer is set so that the
/// clamped device reproduces its measured rate. Strain is exactly linear
/// in voltage, so the emission follows the heavy-hole branch continued
/// through zero strain: `ΔE(V) = V · ΔE(1 V)`. This keeps the map linear
/// for both polarities.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningModel {
    zero_wavelength_nm: f64,
    unit_field: Vector3<f64>,
    compliance: ElasticCompliance,
    piezo_device: PiezoTensor,
    potentials: DeformationPotentials,
    context: MechanicalContext,
    intrinsic_rate_nm_per_v: f64,
    shift_per_volt_ev: f64,
    voltage_limits: (f64, f64),
}

impl TuningModel {
    pub fn new(device: &DeviceConfig, materials: &MaterialSet) -> Result<Self, StrainError> {
        let cal = &device.tuning;
        let direction = Vector3::from(cal.field_direction);
        let unit = AppliedField::new(1.0, cal.electrode_gap_um * UM, direction)?;
        let unit_field = field_from_voltage(&unit);
        let piezo_device = rotate_piezo_to_xcut(&materials.ln_piezo_z, &FrameRotation::x_cut());
        let potentials = materials.gaas_potentials;
        let compliance = materials.gaas_compliance.clone();

        let intrinsic = strain_from_field(
            &unit_field,
            &compliance,
            &piezo_device,
            &MechanicalContext::clamped(),
        )?;
        let lambda0_m = cal.qd_wavelength_nm * NM;
        let intrinsic_rate_nm_per_v =
            wavelength_shift(pikus_bir_shift(&intrinsic, &potentials), lambda0_m) / NM;
        if intrinsic_rate_nm_per_v == 0.0 || !intrinsic_rate_nm_per_v.is_finite() {
            return Err(StrainError::NoStrainResponse);
        }
        let transfer = (cal.tuning_rate_pm_per_v * 1e-3).abs() / intrinsic_rate_nm_per_v.abs();
        let clamping = if cal.suspended {
            cal.clamping_factor
        } else {
            1.0
        };
        let context = MechanicalContext::new(clamping, transfer)?;

        let per_volt = strain_from_field(&unit_field, &compliance, &piezo_device, &context)?;
        let shift_per_volt_ev = pikus_bir_shift(&per_volt, &potentials);
        Ok(Self {
            zero_wavelength_nm: cal.qd_wavelength_nm,
            unit_field,
            compliance,
            piezo_device,
            potentials,
            context,
            intrinsic_rate_nm_per_v,
            shift_per_volt_ev,
            voltage_limits: (cal.voltage_min_v, cal.voltage_max_v),
        })
    }

    /// Rate of the bare chain (no transfer loss, clamped), nm/V.
    pub fn intrinsic_rate_nm_per_v(&self) -> f64 {
        self.intrinsic_rate_nm_per_v
    }

    pub fn context(&self) -> &MechanicalContext {
        &self.context
    }

    /// Signed tuning rate of this device, pm/V.
    pub fn rate_pm_per_v(&self) -> f64 {
        wavelength_shift(self.shift_per_volt_ev, self.zero_wavelength_nm * NM) / NM * 1e3
    }

    /// Strain in the GaAs layer at `voltage_v`.
    pub fn strain_at(&self, voltage_v: f64) -> Result<StrainState, StrainError> {
        strain_from_field(
            &(self.unit_field * voltage_v),
            &self.compliance,
            &self.piezo_device,
            &self.context,
        )
    }

    /// Emission wavelength at `voltage_v`, nm.
    pub fn wavelength_at(&self, voltage_v: f64) -> Result<f64, StrainError> {
        let (min, max) = self.voltage_limits;
        if !(voltage_v >= min && voltage_v <= max) {
            return Err(StrainError::VoltageLimitExceeded {
                voltage: voltage_v,
                min,
                max,
            });
        }
        self.strain_at(voltage_v)?;
        let delta_e = voltage_v * self.shift_per_volt_ev;
        Ok(self.zero_wavelength_nm + wavelength_shift(delta_e, self.zero_wavelength_nm * NM) / NM)
    }

    pub fn potentials(&self) -> &DeformationPotentials {
        &self.potentials
    }
}

/// Emission wavelength for each voltage of a sweep.
pub fn tuning_curve(
    device: &DeviceConfig,
    materials: &MaterialSet,
    voltages: &[f64],
) -> Result<Vec<TuningPoint>, StrainError> {
    let model = TuningModel::new(device, materials)?;
    voltages
        .iter()
        .map(|&v| {
            Ok(TuningPoint {
                voltage_v: v,
                wavelength_nm: model.wavelength_at(v)?,
            })
        })
        .collect()
}
