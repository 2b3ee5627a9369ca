//! Parabola fit of the auxiliary-channel relative density,
//! `ρ̃₂ = (C₀(x − x₀)/v)²`, and its comparison with the Bohmian speed.
//!
//! The fit is linear: `√ρ̃₂ = b·x + a` by ordinary least squares, then
//! `v = C₀/b` and `x₀ = −a/b`. R² is evaluated on ρ̃₂ itself against the
//! fitted parabola.

use serde::{Deserialize, Serialize};

/// Negative relative densities down to this value are read as zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Plateau speeds with magnitude below this (km/s) count as zero in the
/// contrast ratio.
pub const ZERO_SPEED_KM_S: f64 = 1.0;

/// Upper end of the default window: ρ̃₂ stays below this.
pub const DEFAULT_WINDOW_LEVEL: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Apparent speed, km/s.
    pub v: f64,
    /// Offset, μm.
    pub x0: f64,
    pub r_squared: f64,
    /// Fit window, μm.
    pub window: [f64; 2],
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("fit window [{lo}, {hi}] μm holds {n} usable points, need at least 3")]
    TooFewPoints { lo: f64, hi: f64, n: usize },
    #[error("relative density {value} < 0 at x = {x} μm")]
    Negative { x: f64, value: f64 },
    #[error("relative density is constant on the window")]
    Degenerate,
    #[error("relative density does not grow with x on the window (slope {slope})")]
    NonPositiveSlope { slope: f64 },
    #[error("invalid fit input: {0}")]
    InvalidInput(String),
}

/// Fits `ρ̃₂ = (c0·(x − x₀)/v)²` on `window`. `rho_tilde` entries that are
/// `None` (masked) are skipped. `c0` is in ns⁻¹, positions in μm.
pub fn fit_relative_density(
    x: &[f64],
    rho_tilde: &[Option<f64>],
    c0: f64,
    window: [f64; 2],
) -> Result<FitResult, FitError> {
    if x.len() != rho_tilde.len() {
        return Err(FitError::InvalidInput(format!(
            "{} positions but {} values",
            x.len(),
            rho_tilde.len()
        )));
    }
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(FitError::InvalidInput(format!("coupling rate {c0} must be positive")));
    }
    let [lo, hi] = window;
    if !(lo < hi) {
        return Err(FitError::InvalidInput(format!("window [{lo}, {hi}] is empty")));
    }

    let mut pts = Vec::new();
    for (&xi, r) in x.iter().zip(rho_tilde) {
        if xi < lo || xi > hi {
            continue;
        }
        let Some(r) = *r else { continue };
        if !r.is_finite() {
            continue;
        }
        if r < -NEGATIVE_TOLERANCE {
            return Err(FitError::Negative { x: xi, value: r });
        }
        pts.push((xi, r.max(0.0)));
    }
    let n = pts.len();
    if n < 3 {
        return Err(FitError::TooFewPoints { lo, hi, n });
    }

    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1.sqrt()).sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(xi, r) in &pts {
        let dx = xi - mx;
        sxx += dx * dx;
        sxy += dx * (r.sqrt() - my);
    }
    let mr = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mr).powi(2)).sum();
    let scale = pts.iter().map(|p| p.1).fold(0.0, f64::max);
    if ss_tot <= (1e-12 * scale).powi(2) * nf || sxx == 0.0 {
        return Err(FitError::Degenerate);
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(FitError::NonPositiveSlope { slope });
    }
    let intercept = my - slope * mx;
    let x0 = -intercept / slope;
    let ss_res: f64 = pts
        .iter()
        .map(|&(xi, r)| (r - (slope * (xi - x0)).powi(2)).powi(2))
        .sum();

    Ok(FitResult {
        v: c0 / slope,
        x0,
        r_squared: 1.0 - ss_res / ss_tot,
        window,
        n_points: n,
    })
}

/// From `onset` to the first position beyond it where ρ̃₂ exceeds
/// [`DEFAULT_WINDOW_LEVEL`]. `None` if ρ̃₂ never gets there.
pub fn default_window(x: &[f64], rho_tilde: &[Option<f64>], onset: f64) -> Option<[f64; 2]> {
    x.iter()
        .zip(rho_tilde)
        .find(|(&xi, r)| xi > onset && r.is_some_and(|r| r > DEFAULT_WINDOW_LEVEL))
        .map(|(&xi, _)| [onset, xi])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedRatio {
    Finite(f64),
    /// The Bohmian speed is zero within [`ZERO_SPEED_KM_S`].
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub fit_v_km_s: f64,
    pub fit_x0_um: f64,
    pub fit_r_squared: f64,
    pub plateau_v_km_s: f64,
    /// Fitted over Bohmian speed.
    pub ratio: SpeedRatio,
}

pub fn contrast_report(fit: &FitResult, plateau_velocity: f64) -> ContrastReport {
    let ratio = if plateau_velocity.abs() < ZERO_SPEED_KM_S {
        SpeedRatio::Infinite
    } else {
        SpeedRatio::Finite(fit.v / plateau_velocity)
    };
    ContrastReport {
        fit_v_km_s: fit.v,
        fit_x0_um: fit.x0,
        fit_r_squared: fit.r_squared,
        plateau_v_km_s: plateau_velocity,
        ratio,
    }
}
