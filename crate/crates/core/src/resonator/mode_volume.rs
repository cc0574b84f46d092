//! Effective mode volume from a discretised field.

use super::ResonatorError;

/// Discretised cavity mode: per-cell relative permittivity, field intensity
/// `|E|²` (arbitrary units) and cell volume in m³. Cells are stored
/// row-major with z varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField {
    dims: [usize; 3],
    permittivity: Vec<f64>,
    field_sq: Vec<f64>,
    cell_volume_m3: Vec<f64>,
}

impl ModeField {
    pub fn new(
        dims: [usize; 3],
        permittivity: Vec<f64>,
        field_sq: Vec<f64>,
        cell_volume_m3: Vec<f64>,
    ) -> Result<Self, ResonatorError> {
        let n: usize = dims.iter().product();
        if n == 0 {
            return Err(ResonatorError::Domain(
                "mode field grid has no cells".into(),
            ));
        }
        for (name, v) in [
            ("permittivity", &permittivity),
            ("field_sq", &field_sq),
            ("cell_volume", &cell_volume_m3),
        ] {
            if v.len() != n {
                return Err(ResonatorError::Domain(format!(
                    "{name} has {} entries for a {}x{}x{} grid",
                    v.len(),
                    dims[0],
                    dims[1],
                    dims[2]
                )));
            }
            if let Some(i) = v.iter().position(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(ResonatorError::Domain(format!(
                    "{name}[{i}] must be finite and nonnegative"
                )));
            }
        }
        Ok(Self {
            dims,
            permittivity,
            field_sq,
            cell_volume_m3,
        })
    }

    /// Grid with one shared cell volume.
    pub fn uniform(
        dims: [usize; 3],
        cell_volume_m3: f64,
        permittivity: Vec<f64>,
        field_sq: Vec<f64>,
    ) -> Result<Self, ResonatorError> {
        let n = dims.iter().product();
        Self::new(dims, permittivity, field_sq, vec![cell_volume_m3; n])
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn permittivity(&self) -> &[f64] {
        &self.permittivity
    }

    pub fn field_sq(&self) -> &[f64] {
        &self.field_sq
    }

    pub fn cell_volume_m3(&self) -> &[f64] {
        &self.cell_volume_m3
    }

    pub fn total_volume_m3(&self) -> f64 {
        self.cell_volume_m3.iter().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeVolume {
    pub volume_m3: f64,
    /// Volume in units of `(λ/n)³`.
    pub normalized: f64,
}

/// `V_eff = Σ ε|E|² dV / max(ε|E|²)`, also expressed in `(λ/n)³` for the
/// given wavelength and emitter-host refractive index.
pub fn effective_mode_volume(
    field: &ModeField,
    wavelength_m: f64,
    refractive_index: f64,
) -> Result<ModeVolume, ResonatorError> {
    if !(wavelength_m > 0.0) || !(refractive_index > 0.0) {
        return Err(ResonatorError::Domain(
            "wavelength and refractive index must be positive".into(),
        ));
    }
    let density = field
        .permittivity
        .iter()
        .zip(&field.field_sq)
        .map(|(e, f)| e * f);
    let peak = density.clone().fold(0.0_f64, f64::max);
    if !(peak > 0.0) {
        return Err(ResonatorError::DegenerateField);
    }
    let energy: f64 = density
        .zip(&field.cell_volume_m3)
        .map(|(u, dv)| u * dv)
        .sum();
    let volume_m3 = energy / peak;
    Ok(ModeVolume {
        volume_m3,
        normalized: volume_m3 / (wavelength_m / refractive_index).powi(3),
    })
}
