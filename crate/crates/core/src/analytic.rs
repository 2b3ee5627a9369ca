//! Stationary scattering states of a square barrier on `[0, a]`.
//!
//! With unit transmitted amplitude (`ψ = e^{ikx}` for `x > a`) the barrier
//! interior is
//!
//! * below the top: `ψ = A e^{κx} + B e^{−κx}`,
//! * at the top: `ψ = e^{ika}(1 + ik(x − a))`,
//! * above the top: `ψ = e^{ika}(cos k′(x−a) + i(k/k′) sin k′(x−a))`,
//!
//! and the steady Bohmian velocity is `v₀/ρ(x)` because the current equals
//! the transmitted flux `v₀` everywhere inside.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{BarrierWidth, PhysicalConstants, CRITICAL_DETUNING_MEV};
use crate::error::{Error, Result};

/// Which side of the barrier top the energy falls on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeKind {
    /// `E < V₀`, evanescent with decay constant κ (μm⁻¹).
    Below { kappa: f64 },
    /// `E = V₀`.
    Critical,
    /// `E > V₀`, propagating with wavenumber k′ (μm⁻¹).
    Above { k_prime: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub kind: RegimeKind,
    /// Incident wavenumber, μm⁻¹.
    pub k: f64,
    /// Incident speed ħk/m, μm/ns.
    pub v0: f64,
    /// Energy, meV.
    pub energy: f64,
    /// Barrier height, meV.
    pub barrier: f64,
    pub constants: PhysicalConstants,
}

impl Regime {
    /// `E − V₀` in meV.
    pub fn detuning(&self) -> f64 {
        self.energy - self.barrier
    }
}

/// Classifies `(E, V₀)`; |Δ| below 10⁻⁹ meV counts as critical.
pub fn classify(energy: f64, barrier: f64, constants: &PhysicalConstants) -> Result<Regime> {
    if !(energy > 0.0) {
        return Err(Error::InvalidInput(format!(
            "energy must be positive, got {energy} meV"
        )));
    }
    if !(barrier >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "barrier height must be non-negative, got {barrier} meV"
        )));
    }
    let delta = energy - barrier;
    let kind = if delta.abs() < CRITICAL_DETUNING_MEV {
        RegimeKind::Critical
    } else if delta < 0.0 {
        RegimeKind::Below {
            kappa: constants.wavenumber(delta),
        }
    } else {
        RegimeKind::Above {
            k_prime: constants.wavenumber(delta),
        }
    };
    let k = constants.wavenumber(energy);
    Ok(Regime {
        kind,
        k,
        v0: constants.hbar() * k / constants.mass(),
        energy,
        barrier,
        constants: *constants,
    })
}

/// Coefficients of `A e^{κx} + B e^{−κx}` inside a barrier of width `a`,
/// with transmitted amplitude `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub t: Complex64,
}

impl StationaryCoefficients {
    pub fn psi(&self, x: f64, kappa: f64) -> Complex64 {
        self.a * (kappa * x).exp() + self.b * (-kappa * x).exp()
    }

    pub fn dpsi(&self, x: f64, kappa: f64) -> Complex64 {
        kappa * (self.a * (kappa * x).exp() - self.b * (-kappa * x).exp())
    }
}

pub fn stationary_coefficients(regime: &Regime, width: f64) -> Result<StationaryCoefficients> {
    let kappa = match regime.kind {
        RegimeKind::Below { kappa } => kappa,
        _ => {
            return Err(Error::InvalidInput(
                "exponential coefficients exist only below the barrier top".into(),
            ))
        }
    };
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::InvalidInput(format!(
            "barrier width must be finite and positive, got {width}"
        )));
    }
    let k = regime.k;
    let t = Complex64::new(1.0, 0.0);
    let ik_over_kappa = Complex64::new(0.0, k / kappa);
    let a = t / 2.0 * (1.0 + ik_over_kappa) * Complex64::new(-kappa * width, k * width).exp();
    let b = t / 2.0 * (1.0 - ik_over_kappa) * Complex64::new(kappa * width, k * width).exp();
    Ok(StationaryCoefficients { a, b, t })
}

/// `tan S(x)` inside a below-top barrier of width `a`, written as the ratio
/// of the imaginary to the real part of ψ. May be ±∞ where Re ψ = 0.
pub fn phase_tangent(x: f64, regime: &Regime, width: f64) -> Result<f64> {
    let kappa = match regime.kind {
        RegimeKind::Below { kappa } => kappa,
        _ => {
            return Err(Error::InvalidInput(
                "phase tangent is defined for the below-top regime".into(),
            ))
        }
    };
    if !(0.0..=width).contains(&x) {
        return Err(Error::InvalidInput(format!(
            "x = {x} lies outside the barrier [0, {width}]"
        )));
    }
    let k = regime.k;
    let r = k / kappa;
    let (s, c) = (k * width).sin_cos();
    let grow = (kappa * (x - width)).exp();
    let decay = (-kappa * (x - width)).exp();
    let num = grow * (s + r * c) + decay * (s - r * c);
    let den = grow * (c - r * s) + decay * (c + r * s);
    Ok(num / den)
}

/// Steady Bohmian velocity at `x` inside a barrier starting at 0, km/s.
pub fn steady_velocity(x: f64, regime: &Regime, width: BarrierWidth) -> Result<f64> {
    let v0 = regime.v0;
    match width {
        BarrierWidth::SemiInfinite => {
            if !(x >= 0.0) {
                return Err(Error::InvalidInput(format!("x = {x} lies before the barrier")));
            }
            Ok(match regime.kind {
                RegimeKind::Below { .. } | RegimeKind::Critical => 0.0,
                RegimeKind::Above { .. } => regime.constants.speed(regime.detuning()),
            })
        }
        BarrierWidth::Finite(a) => {
            if !(0.0..=a).contains(&x) {
                return Err(Error::InvalidInput(format!(
                    "x = {x} lies outside the barrier [0, {a}]"
                )));
            }
            let ratio = regime.barrier / regime.detuning().abs();
            Ok(match regime.kind {
                RegimeKind::Below { kappa } => {
                    v0 / (1.0 + ratio * (kappa * (x - a)).sinh().powi(2))
                }
                RegimeKind::Critical => v0 / (1.0 + (regime.k * (x - a)).powi(2)),
                RegimeKind::Above { k_prime } => {
                    v0 / (1.0 + ratio * (k_prime * (x - a)).sin().powi(2))
                }
            })
        }
    }
}

/// Stationary ψ inside a finite barrier, any regime, with `ψ(a) = e^{ika}`.
pub fn stationary_psi(x: f64, regime: &Regime, width: f64) -> (Complex64, Complex64) {
    let k = regime.k;
    let ph = Complex64::from_polar(1.0, k * width);
    let d = x - width;
    let i = Complex64::new(0.0, 1.0);
    match regime.kind {
        RegimeKind::Below { kappa } => {
            let (s, c) = ((kappa * d).sinh(), (kappa * d).cosh());
            (
                ph * (c + i * (k / kappa) * s),
                ph * (kappa * s + i * k * c),
            )
        }
        RegimeKind::Critical => (ph * (1.0 + i * k * d), ph * i * k),
        RegimeKind::Above { k_prime } => {
            let (s, c) = (k_prime * d).sin_cos();
            (
                ph * (c + i * (k / k_prime) * s),
                ph * (-k_prime * s + i * k * c),
            )
        }
    }
}

/// One row of a velocity-versus-width table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthRow {
    pub width_um: f64,
    pub fraction: f64,
    pub x_um: f64,
    pub v_km_s: f64,
}

/// `v(f·a; a)` for every fraction `f` and width `a`, below-top regime only.
pub fn velocity_vs_width_table(
    regime: &Regime,
    fractions: &[f64],
    widths: &[f64],
) -> Result<Vec<WidthRow>> {
    if !matches!(regime.kind, RegimeKind::Below { .. }) {
        return Err(Error::InvalidInput(
            "width table is defined for the below-top regime".into(),
        ));
    }
    if fractions.is_empty() || widths.is_empty() {
        return Err(Error::InvalidInput(
            "width table needs at least one fraction and one width".into(),
        ));
    }
    if let Some(f) = fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::InvalidInput(format!("fraction {f} outside [0, 1]")));
    }
    let mut rows = Vec::with_capacity(fractions.len() * widths.len());
    for &f in fractions {
        for &a in widths {
            if !(a > 0.0) {
                return Err(Error::InvalidInput(format!("width {a} must be positive")));
            }
            let x = f * a;
            rows.push(WidthRow {
                width_um: a,
                fraction: f,
                x_um: x,
                v_km_s: steady_velocity(x, regime, BarrierWidth::Finite(a))?,
            });
        }
    }
    Ok(rows)
}

/// `n` widths evenly spaced on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub const WIDTH_TABLE_COLUMNS: [&str; 4] = ["width_um", "depth_frac", "x_um", "v_km_s"];

pub fn write_width_table_csv<W: Write>(rows: &[WidthRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{}", WIDTH_TABLE_COLUMNS.join(","))?;
    for r in rows {
        writeln!(out, "{:?},{:?},{:?},{:?}", r.width_um, r.fraction, r.x_um, r.v_km_s)?;
    }
    out.flush()
}
