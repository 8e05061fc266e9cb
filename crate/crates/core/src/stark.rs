//! Quadratic Stark tuning: `E(F) = e0 + p·F + β·F²`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StarkParams {
    /// Emission energy at zero field (µeV).
    #[serde(rename = "e0_ueV")]
    pub e0: f64,
    /// Linear (dipole) coefficient, µeV per kV·cm⁻¹.
    #[serde(rename = "dipole_ueV_per_kV_cm")]
    pub dipole_p: f64,
    /// Quadratic (polarizability) coefficient, µeV per (kV·cm⁻¹)².
    #[serde(rename = "polarizability_ueV_per_kV2_cm2")]
    pub polarizability_beta: f64,
    #[serde(rename = "field_min_kV_cm")]
    pub field_min: f64,
    #[serde(rename = "field_max_kV_cm")]
    pub field_max: f64,
}

impl StarkParams {
    pub fn new(e0: f64, dipole_p: f64, polarizability_beta: f64, field_min: f64, field_max: f64) -> Result<Self> {
        let p = Self {
            e0,
            dipole_p,
            polarizability_beta,
            field_min,
            field_max,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("e0", self.e0),
            ("dipole_p", self.dipole_p),
            ("polarizability_beta", self.polarizability_beta),
            ("field_min", self.field_min),
            ("field_max", self.field_max),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.field_min >= self.field_max {
            return Err(Error::InvalidParameter(format!(
                "field window [{}, {}] is empty",
                self.field_min, self.field_max
            )));
        }
        Ok(())
    }

    fn contains(&self, field: f64) -> bool {
        field >= self.field_min && field <= self.field_max
    }
}

pub fn energy_at_field(params: &StarkParams, field: f64) -> Result<f64> {
    if !field.is_finite() {
        return Err(Error::NonFinite("field"));
    }
    if !params.contains(field) {
        return Err(Error::FieldOutOfWindow {
            field,
            min: params.field_min,
            max: params.field_max,
        });
    }
    Ok(params.e0 + field * (params.dipole_p + params.polarizability_beta * field))
}

/// Real roots of `β·F² + p·F + (e0 − target) = 0`, smaller magnitude first.
fn roots(params: &StarkParams, target: f64) -> Result<Vec<f64>> {
    let a = params.polarizability_beta;
    let b = params.dipole_p;
    let c = params.e0 - target;
    if a == 0.0 {
        if b == 0.0 {
            // flat map: every field or none
            return if c == 0.0 {
                Ok(vec![0.0])
            } else {
                Err(Error::NoRealRoot { target })
            };
        }
        return Ok(vec![-c / b]);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(Error::NoRealRoot { target });
    }
    // stable pair: q = -(b + sign(b)·√disc)/2, roots q/a and c/q
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut rs = if q == 0.0 {
        // b = 0 and disc = 0 ⇒ c = 0: double root at zero
        vec![0.0]
    } else {
        vec![q / a, c / q]
    };
    rs.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    Ok(rs)
}

/// Field that puts the emission at `target`. Of two admissible roots the one
/// closer to zero field is returned.
pub fn field_for_energy(params: &StarkParams, target: f64) -> Result<f64> {
    if !target.is_finite() {
        return Err(Error::NonFinite("target"));
    }
    let rs = roots(params, target)?;
    rs.iter()
        .copied()
        .find(|&f| params.contains(f))
        .ok_or(Error::OutOfWindow {
            roots: rs,
            min: params.field_min,
            max: params.field_max,
        })
}

/// Result of tuning one emitter onto a fixed reference energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuningSolution {
    #[serde(rename = "field_kV_cm")]
    pub field: f64,
    #[serde(rename = "energy_ueV")]
    pub energy: f64,
    #[serde(rename = "residual_detuning_ueV")]
    pub residual_detuning: f64,
}

/// Tunes `tunable` into degeneracy with an emitter fixed at `fixed` µeV.
pub fn tune_pair(fixed: f64, tunable: &StarkParams) -> Result<TuningSolution> {
    let field = field_for_energy(tunable, fixed)?;
    Ok(TuningSolution {
        field,
        energy: fixed,
        residual_detuning: 0.0,
    })
}
