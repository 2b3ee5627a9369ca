//! Internal unit system: lengths in μm, times in ns, energies in meV.
//!
//! In these units velocities come out in μm/ns, which is numerically the same
//! as km/s, and rates in ns⁻¹ are GHz. Masses are carried in meV·ns²/μm².

use crate::error::{Error, Result};

/// Reduced Planck constant in meV·ns.
pub const HBAR_MEV_NS: f64 = 6.582119569e-4;

/// Elementary charge in coulombs; one meV is this many millijoules.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

const JOULE_PER_MEV: f64 = ELEMENTARY_CHARGE * 1e-3;
const SECONDS_PER_NS: f64 = 1e-9;
const METRES_PER_UM: f64 = 1e-6;
const UM_PER_MM: f64 = 1e3;
const NS_PER_PS: f64 = 1e-3;
const MEV_PER_UEV: f64 = 1e-3;

pub fn mev_to_joule(e: f64) -> f64 {
    e * JOULE_PER_MEV
}

pub fn joule_to_mev(e: f64) -> f64 {
    e / JOULE_PER_MEV
}

pub fn ns_to_s(t: f64) -> f64 {
    t * SECONDS_PER_NS
}

pub fn s_to_ns(t: f64) -> f64 {
    t / SECONDS_PER_NS
}

pub fn um_to_m(x: f64) -> f64 {
    x * METRES_PER_UM
}

pub fn m_to_um(x: f64) -> f64 {
    x / METRES_PER_UM
}

pub fn mm_to_um(x: f64) -> f64 {
    x * UM_PER_MM
}

pub fn um_to_mm(x: f64) -> f64 {
    x / UM_PER_MM
}

pub fn ps_to_ns(t: f64) -> f64 {
    t * NS_PER_PS
}

pub fn ns_to_ps(t: f64) -> f64 {
    t / NS_PER_PS
}

pub fn uev_to_mev(e: f64) -> f64 {
    e * MEV_PER_UEV
}

pub fn mev_to_uev(e: f64) -> f64 {
    e / MEV_PER_UEV
}

/// meV·ns²/μm² per kilogram.
fn internal_mass_per_kg() -> f64 {
    // kg = J·s²/m²
    SECONDS_PER_NS.powi(-2) * METRES_PER_UM.powi(2) / JOULE_PER_MEV
}

/// Converts a mass in kg to meV·ns²/μm², so that `E = m v² / 2` holds with
/// E in meV and v in μm/ns.
pub fn convert_mass(kg: f64) -> Result<f64> {
    if !(kg > 0.0) || !kg.is_finite() {
        return Err(Error::InvalidInput(format!(
            "mass must be positive and finite, got {kg} kg"
        )));
    }
    Ok(kg * internal_mass_per_kg())
}

/// Inverse of [`convert_mass`].
pub fn mass_to_kg(internal: f64) -> f64 {
    internal / internal_mass_per_kg()
}
