//! Flat-top pulse with Gaussian edges on a plane-wave carrier.
//!
//! The envelope is defined on intensity: it equals 1 on the plateau and falls
//! off as a Gaussian of standard deviation `edge_sigma` on either side, so the
//! intensity FWHM is `2·flat_half_width + 2√(2 ln 2)·edge_sigma`. Temporal
//! widths are mapped to space through the group speed, which places the whole
//! envelope on the grid at t = 0.

use num_complex::Complex64;

use crate::config::{PhysicalConstants, PulseSpec, ScenarioConfig};
use crate::error::{Error, Result};
use crate::grid::WaveField;

/// `2√(2 ln 2)`, the FWHM of a unit-σ Gaussian.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    /// Half the plateau length, μm.
    pub flat_half_width: f64,
    /// Standard deviation of the intensity edges, μm.
    pub edge_sigma: f64,
    /// Plateau centre, μm.
    pub center: f64,
}

impl Envelope {
    pub fn from_pulse(pulse: &PulseSpec, constants: &PhysicalConstants) -> Self {
        let v0 = pulse.group_speed(constants);
        Self {
            flat_half_width: 0.5 * v0 * pulse.t_flat_ns,
            edge_sigma: v0 * (pulse.t_fwhm_ns - pulse.t_flat_ns) / FWHM_PER_SIGMA,
            center: pulse.center_um(),
        }
    }

    pub fn intensity(&self, x: f64) -> f64 {
        envelope_intensity(x, self)
    }

    pub fn fwhm(&self) -> f64 {
        2.0 * self.flat_half_width + FWHM_PER_SIGMA * self.edge_sigma
    }
}

/// Intensity of the flat-top envelope at `x`, in `[0, 1]`.
pub fn envelope_intensity(x: f64, env: &Envelope) -> f64 {
    let d = (x - env.center).abs() - env.flat_half_width;
    if d <= 0.0 {
        1.0
    } else {
        (-0.5 * (d / env.edge_sigma).powi(2)).exp()
    }
}

/// Builds the t = 0 field: `√I(x)·e^{ikx}` in channel 1 with `k = m v₀/ħ`,
/// channel 2 (if any) empty. Peak intensity is 1.
pub fn make_initial_field(config: &ScenarioConfig) -> Result<WaveField> {
    let grid = config.grid()?;
    let c = &config.constants;
    let env = Envelope::from_pulse(&config.pulse, c);
    if !(env.edge_sigma >= 2.0 * grid.dx()) {
        return Err(Error::EnvelopeTooWide(format!(
            "edge sigma {:.4} μm is not resolved by dx = {:.4} μm (t_fwhm − t_flat too small)",
            env.edge_sigma,
            grid.dx()
        )));
    }
    let edge = env
        .intensity(grid.x_min())
        .max(env.intensity(grid.x_max()));
    if edge > crate::config::EDGE_INTENSITY_LIMIT {
        return Err(Error::EnvelopeTooWide(format!(
            "intensity {edge:.3e} at the box edge"
        )));
    }
    let k = c.mass() * config.pulse.group_speed(c) / c.hbar();
    let mut field = WaveField::zeros(grid, config.channels())?;
    for (i, a) in field.channel_mut(0).iter_mut().enumerate() {
        let x = grid.x(i);
        *a = Complex64::from_polar(env.intensity(x).sqrt(), k * x);
    }
    Ok(field)
}
