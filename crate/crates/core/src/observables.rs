//! Density, current, Bohmian velocity, quantum potential and derived
//! quantities of a [`WaveField`].
//!
//! Derivatives are spectral by default. The velocity is `j/ρ` rather than the
//! gradient of an unwrapped phase, and it is masked (reported as `None`)
//! wherever `ρ < MASK_EPS · max ρ`. The quantum potential uses
//!
//! ```text
//! R''/R = Re(ψ''/ψ) + (Im(ψ'/ψ))²
//! ```
//!
//! which equals the second derivative of `R = |ψ|` divided by `R` but only
//! differentiates the smooth field ψ.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::config::{PhysicalConstants, PotentialSpec};
use crate::error::{Error, Result};
use crate::grid::{Grid, WaveField};

/// Velocity, Q and relative density are undefined below this fraction of
/// the frame's peak density.
pub const MASK_EPS: f64 = 1e-8;

/// Dwell time is reported divergent when `|j_in| < J_FLOOR_REL · max ρ · v₀`.
pub const J_FLOOR_REL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeMethod {
    #[default]
    Spectral,
    /// Fourth-order periodic central differences, for cross-checks.
    FiniteDifference,
}

/// First and second spatial derivatives of every channel.
#[derive(Debug, Clone)]
pub struct Derivatives {
    pub d1: Vec<Vec<Complex64>>,
    pub d2: Vec<Vec<Complex64>>,
}

/// Reusable FFT plans for differentiating fields on one grid.
pub struct Differentiator {
    grid: Grid,
    method: DerivativeMethod,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for Differentiator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Differentiator")
            .field("grid", &self.grid)
            .field("method", &self.method)
            .finish()
    }
}

impl Differentiator {
    pub fn new(grid: Grid, method: DerivativeMethod) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        let mut k = grid.wavenumbers();
        // Nyquist mode is its own alias; first derivatives drop it.
        k[grid.n() / 2] = 0.0;
        Self {
            grid,
            method,
            k,
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `(ψ', ψ'')` of one channel.
    pub fn differentiate(&mut self, psi: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        match self.method {
            DerivativeMethod::Spectral => self.spectral(psi),
            DerivativeMethod::FiniteDifference => finite_difference(psi, self.grid.dx()),
        }
    }

    fn spectral(&mut self, psi: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.n();
        let inv_n = 1.0 / n as f64;
        let mut hat = psi.to_vec();
        self.forward.process_with_scratch(&mut hat, &mut self.scratch);
        let nyq = n / 2;
        let mut d1: Vec<Complex64> = hat
            .iter()
            .zip(&self.k)
            .map(|(a, k)| a * I * (k * inv_n))
            .collect();
        let kn = -std::f64::consts::PI / self.grid.dx();
        let mut d2: Vec<Complex64> = hat
            .iter()
            .zip(&self.k)
            .enumerate()
            .map(|(i, (a, k))| {
                let k = if i == nyq { kn } else { *k };
                a * (-k * k * inv_n)
            })
            .collect();
        self.inverse.process_with_scratch(&mut d1, &mut self.scratch);
        self.inverse.process_with_scratch(&mut d2, &mut self.scratch);
        (d1, d2)
    }

    pub fn derivatives(&mut self, field: &WaveField) -> Derivatives {
        let (d1, d2) = field
            .channels()
            .iter()
            .map(|c| self.differentiate(c))
            .unzip();
        Derivatives { d1, d2 }
    }

    /// First derivative of a real sampled function.
    pub fn derivative_real(&mut self, f: &[f64]) -> Vec<f64> {
        let z: Vec<Complex64> = f.iter().map(|&v| Complex64::from(v)).collect();
        self.differentiate(&z).0.into_iter().map(|z| z.re).collect()
    }
}

fn finite_difference(psi: &[Complex64], dx: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = psi.len();
    let at = |i: usize, off: isize| psi[(i as isize + off).rem_euclid(n as isize) as usize];
    let d1 = (0..n)
        .map(|i| (at(i, -2) - 8.0 * at(i, -1) + 8.0 * at(i, 1) - at(i, 2)) / (12.0 * dx))
        .collect();
    let d2 = (0..n)
        .map(|i| {
            (-at(i, -2) + 16.0 * at(i, -1) - 30.0 * at(i, 0) + 16.0 * at(i, 1) - at(i, 2))
                / (12.0 * dx * dx)
        })
        .collect();
    (d1, d2)
}

/// Pointwise observables from `ψ`, `ψ'`, `ψ''`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalObservables {
    pub rho: f64,
    pub j: f64,
    /// `None` when masked.
    pub v: Option<f64>,
    pub q: Option<f64>,
}

impl LocalObservables {
    pub fn new(
        psi: Complex64,
        d1: Complex64,
        d2: Complex64,
        constants: &PhysicalConstants,
        threshold: f64,
    ) -> Self {
        let hm = constants.hbar() / constants.mass();
        let rho = psi.norm_sqr();
        let g = psi.conj() * d1;
        let j = hm * g.im;
        if !(rho >= threshold) || rho == 0.0 {
            return Self {
                rho,
                j,
                v: None,
                q: None,
            };
        }
        let phase_grad = g.im / rho;
        let r_ratio = (psi.conj() * d2).re / rho + phase_grad * phase_grad;
        Self {
            rho,
            j,
            v: Some(j / rho),
            q: Some(-0.5 * constants.hbar() * hm * r_ratio),
        }
    }
}

fn mask_threshold(rho: &[Vec<f64>]) -> f64 {
    MASK_EPS * rho.iter().flatten().copied().fold(0.0, f64::max)
}

/// `|ψ_c|²` for each channel.
pub fn density(field: &WaveField) -> Vec<Vec<f64>> {
    field
        .channels()
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
        .collect()
}

/// `j = (ħ/m)·Im(ψ*∂ₓψ)` for each channel.
pub fn current(field: &WaveField, constants: &PhysicalConstants) -> Vec<Vec<f64>> {
    let mut diff = Differentiator::new(*field.grid(), DerivativeMethod::Spectral);
    let hm = constants.hbar() / constants.mass();
    field
        .channels()
        .iter()
        .map(|c| {
            let (d1, _) = diff.differentiate(c);
            c.iter()
                .zip(&d1)
                .map(|(p, d)| hm * (p.conj() * d).im)
                .collect()
        })
        .collect()
}

/// `∂ₓj = (ħ/m)·Im(ψ*∂ₓ²ψ)` for each channel.
///
/// This is the derivative of the current of the band-limited interpolant.
/// Differentiating sampled `j` spectrally instead aliases, since `ψ*∂ₓψ`
/// carries wavenumbers up to twice the grid's Nyquist limit.
pub fn current_divergence(field: &WaveField, constants: &PhysicalConstants) -> Vec<Vec<f64>> {
    let mut diff = Differentiator::new(*field.grid(), DerivativeMethod::Spectral);
    let hm = constants.hbar() / constants.mass();
    field
        .channels()
        .iter()
        .map(|c| {
            let (_, d2) = diff.differentiate(c);
            c.iter()
                .zip(&d2)
                .map(|(p, d)| hm * (p.conj() * d).im)
                .collect()
        })
        .collect()
}

/// Bohmian velocity `j/ρ` in μm/ns (= km/s), masked where the density is
/// negligible.
pub fn bohmian_velocity(field: &WaveField, constants: &PhysicalConstants) -> Vec<Vec<Option<f64>>> {
    local_fields(field, constants, DerivativeMethod::Spectral)
        .into_iter()
        .map(|c| c.into_iter().map(|o| o.v).collect())
        .collect()
}

/// Quantum potential `−ħ²R''/(2mR)` in meV, masked like the velocity.
pub fn quantum_potential(field: &WaveField, constants: &PhysicalConstants) -> Vec<Vec<Option<f64>>> {
    local_fields(field, constants, DerivativeMethod::Spectral)
        .into_iter()
        .map(|c| c.into_iter().map(|o| o.q).collect())
        .collect()
}

/// Effective potential `Ṽ = Q + Re V` per channel.
pub fn effective_potential(
    field: &WaveField,
    spec: &PotentialSpec,
    constants: &PhysicalConstants,
) -> Vec<Vec<Option<f64>>> {
    let grid = *field.grid();
    quantum_potential(field, constants)
        .into_iter()
        .enumerate()
        .map(|(c, q)| {
            q.into_iter()
                .enumerate()
                .map(|(i, q)| q.map(|q| q + real_potential(spec, grid.x(i), c)))
                .collect()
        })
        .collect()
}

/// Real part of the local potential seen by channel `c` (including the
/// coupling shift −ħC on the diagonal).
pub fn real_potential(spec: &PotentialSpec, x: f64, c: usize) -> f64 {
    spec.real_potential(x, c) - spec.coupling_energy(x)
}

/// Every pointwise observable of every channel.
pub fn local_fields(
    field: &WaveField,
    constants: &PhysicalConstants,
    method: DerivativeMethod,
) -> Vec<Vec<LocalObservables>> {
    let mut diff = Differentiator::new(*field.grid(), method);
    let d = diff.derivatives(field);
    local_fields_with(field, &d, constants)
}

fn local_fields_with(
    field: &WaveField,
    d: &Derivatives,
    constants: &PhysicalConstants,
) -> Vec<Vec<LocalObservables>> {
    let threshold = mask_threshold(&density(field));
    field
        .channels()
        .iter()
        .enumerate()
        .map(|(c, psi)| {
            psi.iter()
                .zip(&d.d1[c])
                .zip(&d.d2[c])
                .map(|((&p, &d1), &d2)| LocalObservables::new(p, d1, d2, constants, threshold))
                .collect()
        })
        .collect()
}

/// `ρ₂/(ρ₁ + ρ₂)`, masked where the total density is negligible.
pub fn relative_density(field: &WaveField) -> Result<Vec<Option<f64>>> {
    if field.n_channels() != 2 {
        return Err(Error::InvalidInput(
            "relative density needs a two-channel field".into(),
        ));
    }
    let rho = density(field);
    let total: Vec<f64> = rho[0].iter().zip(&rho[1]).map(|(a, b)| a + b).collect();
    let threshold = MASK_EPS * total.iter().copied().fold(0.0, f64::max);
    Ok(total
        .iter()
        .zip(&rho[1])
        .map(|(&t, &r2)| (t >= threshold && t > 0.0).then(|| r2 / t))
        .collect())
}

/// Observables of one probe position, per channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeSample {
    pub rho: f64,
    pub j: f64,
    pub v: Option<f64>,
    pub q: Option<f64>,
    pub v_eff: Option<f64>,
}

/// Time-stamped observables. Array fields are indexed `[channel][point]`;
/// `probes` is indexed `[probe][channel]`.
#[derive(Debug, Clone)]
pub struct ObservableFrame {
    pub t_ns: f64,
    pub rho: Vec<Vec<f64>>,
    pub j: Vec<Vec<f64>>,
    pub v: Vec<Vec<Option<f64>>>,
    pub q: Vec<Vec<Option<f64>>>,
    pub v_eff: Vec<Vec<Option<f64>>>,
    pub probes: Vec<Vec<ProbeSample>>,
}

impl ObservableFrame {
    pub fn max_density(&self) -> f64 {
        self.rho.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Differentiates once and produces a full [`ObservableFrame`].
pub struct FrameBuilder<'a> {
    diff: Differentiator,
    constants: &'a PhysicalConstants,
    spec: &'a PotentialSpec,
    probes: Vec<f64>,
}

impl<'a> FrameBuilder<'a> {
    pub fn new(
        grid: Grid,
        constants: &'a PhysicalConstants,
        spec: &'a PotentialSpec,
        probes: &[f64],
        method: DerivativeMethod,
    ) -> Self {
        Self {
            diff: Differentiator::new(grid, method),
            constants,
            spec,
            probes: probes.to_vec(),
        }
    }

    pub fn frame(&mut self, field: &WaveField, t_ns: f64) -> ObservableFrame {
        let grid = *field.grid();
        let d = self.diff.derivatives(field);
        let local = local_fields_with(field, &d, self.constants);
        let rho = density(field);
        let threshold = mask_threshold(&rho);
        let pick = |f: fn(&LocalObservables) -> Option<f64>| -> Vec<Vec<Option<f64>>> {
            local.iter().map(|c| c.iter().map(f).collect()).collect()
        };
        let v = pick(|o| o.v);
        let q = pick(|o| o.q);
        let j = local
            .iter()
            .map(|c| c.iter().map(|o| o.j).collect())
            .collect();
        let v_eff = q
            .iter()
            .enumerate()
            .map(|(c, qc)| {
                qc.iter()
                    .enumerate()
                    .map(|(i, q)| q.map(|q| q + real_potential(self.spec, grid.x(i), c)))
                    .collect()
            })
            .collect();
        let probes = self.interpolated(field, &d, threshold, &self.probes);
        ObservableFrame {
            t_ns,
            rho,
            j,
            v,
            q,
            v_eff,
            probes,
        }
    }
}

impl FrameBuilder<'_> {
    /// Samples at arbitrary positions only, indexed `[point][channel]`.
    /// Cheaper than [`FrameBuilder::frame`] when the full arrays are not needed.
    pub fn sample(&mut self, field: &WaveField, xs: &[f64]) -> Vec<Vec<ProbeSample>> {
        let d = self.diff.derivatives(field);
        let threshold = mask_threshold(&density(field));
        self.interpolated(field, &d, threshold, xs)
    }

    fn interpolated(
        &self,
        field: &WaveField,
        d: &Derivatives,
        threshold: f64,
        xs: &[f64],
    ) -> Vec<Vec<ProbeSample>> {
        let grid = *field.grid();
        xs.iter()
            .map(|&x| {
                (0..field.n_channels())
                    .map(|c| {
                        let psi = grid.interpolate(field.channel(c), x);
                        let d1 = grid.interpolate(&d.d1[c], x);
                        let d2 = grid.interpolate(&d.d2[c], x);
                        let o = LocalObservables::new(psi, d1, d2, self.constants, threshold);
                        ProbeSample {
                            rho: o.rho,
                            j: o.j,
                            v: o.v,
                            q: o.q,
                            v_eff: o.q.map(|q| q + real_potential(self.spec, x, c)),
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DwellTime {
    /// τ in ns.
    Finite(f64),
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwellEstimate {
    /// Probability inside the barrier, `∫ Σ_c ρ dx`.
    pub n: f64,
    /// Total current through the entrance plane.
    pub j_in: f64,
    pub tau: DwellTime,
}

/// `τ = N/j_in` over `[x_start, x_end]`, with `j_in` read at `x_start`.
pub fn dwell_estimate(
    frame: &ObservableFrame,
    grid: &Grid,
    region: (f64, f64),
    v0: f64,
) -> DwellEstimate {
    let (start, end) = region;
    let n = grid.integrate(start, end, |i| frame.rho.iter().map(|c| c[i]).sum::<f64>());
    let j_in: f64 = frame.j.iter().map(|c| grid.interpolate(c, start)).sum();
    let floor = J_FLOOR_REL * frame.max_density() * v0;
    let tau = if j_in.abs() < floor {
        DwellTime::Divergent
    } else {
        DwellTime::Finite(n / j_in)
    };
    DwellEstimate { n, j_in, tau }
}

/// Largest `|∂ₜρ + ∂ₓj|` and largest `|∂ₜρ|` at the middle of three
/// equally spaced densities `h` apart. `div_j_mid` is `∂ₓj` at the middle
/// time, from [`current_divergence`].
pub fn continuity_residual(rho_before: &[f64], rho_after: &[f64], div_j_mid: &[f64], h: f64) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..div_j_mid.len() {
        let dt_rho = (rho_after[i] - rho_before[i]) / (2.0 * h);
        worst = worst.max((dt_rho + div_j_mid[i]).abs());
        scale = scale.max(dt_rho.abs());
    }
    (worst, scale)
}
