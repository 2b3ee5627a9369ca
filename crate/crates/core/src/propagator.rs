//! Second-order Strang splitting with spectral kinetic half steps and exact
//! pointwise potential steps.
//!
//! One step is `K(dt/2) · P(dt) · K(dt/2)` where `K` is diagonal in
//! wavenumber space and `P` is the pointwise exponential of the local
//! potential matrix
//!
//! ```text
//! H(x) = [ V₁ − ħC − iħΓ/2 − iW        ħC            ]
//!        [ ħC                          V₂ − ħC − iħΓ/2 − iW ]
//! ```
//!
//! (the scalar upper-left entry with C = 0 for one channel). During
//! [`evolve`] consecutive kinetic half steps are merged so each step costs one
//! forward and one inverse FFT per channel.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::config::{PhysicalConstants, PotentialSpec, ScenarioConfig};
use crate::error::{Error, Result};
use crate::grid::{Grid, WaveField};
use crate::pulse::make_initial_field;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub type Matrix2 = [[Complex64; 2]; 2];

/// Local potential operator: scalar for one channel, 2×2 for two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialMatrix {
    Scalar(Complex64),
    Matrix(Matrix2),
}

impl PotentialMatrix {
    pub fn is_hermitian(&self, tol: f64) -> bool {
        match self {
            PotentialMatrix::Scalar(v) => v.im.abs() <= tol,
            PotentialMatrix::Matrix(m) => {
                m[0][0].im.abs() <= tol
                    && m[1][1].im.abs() <= tol
                    && (m[0][1] - m[1][0].conj()).norm() <= tol
            }
        }
    }
}

/// Local potential operator at `x` in meV.
pub fn build_potential_matrix(
    x: f64,
    spec: &PotentialSpec,
    constants: &PhysicalConstants,
) -> PotentialMatrix {
    let loss = Complex64::new(
        0.0,
        -(0.5 * constants.hbar() * spec.decay_rate(x) + spec.absorption(x)),
    );
    let v1 = spec.real_potential(x, 0);
    if spec.coupled.is_none() {
        return PotentialMatrix::Scalar(v1 + loss);
    }
    let c = spec.coupling_energy(x);
    let v2 = spec.real_potential(x, 1);
    PotentialMatrix::Matrix([
        [v1 - c + loss, Complex64::from(c)],
        [Complex64::from(c), v2 - c + loss],
    ])
}

/// `exp(−iτH)` of a 2×2 matrix via `H = m·1 + N`, `N² = ω²·1`.
///
/// Both `cos(τω)` and `sin(τω)/ω` are even in ω, so the branch of the complex
/// square root does not matter and no eigenvectors are needed.
pub fn expm_2x2(h: &Matrix2, tau: f64) -> Matrix2 {
    let mean = 0.5 * (h[0][0] + h[1][1]);
    let d = 0.5 * (h[0][0] - h[1][1]);
    let omega2 = d * d + h[0][1] * h[1][0];
    let z = tau * omega2.sqrt();
    let cos_z = z.cos();
    // τ·sin(z)/z
    let sinc = if z.norm() < 1e-4 {
        tau * (1.0 - z * z / 6.0 + z * z * z * z / 120.0)
    } else {
        tau * z.sin() / z
    };
    let phase = (-I * tau * mean).exp();
    let n = [[d, h[0][1]], [h[1][0], -d]];
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let id = if r == c { cos_z } else { ZERO };
            out[r][c] = phase * (id - I * sinc * n[r][c]);
        }
    }
    out
}

/// Unit-modulus kinetic multipliers `exp(−iħk²·dt/(4m))` for a half step.
#[derive(Debug, Clone)]
pub struct KineticPhase {
    dt_ns: f64,
    grid: Grid,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
}

impl KineticPhase {
    pub fn new(grid: &Grid, constants: &PhysicalConstants, dt_ns: f64) -> Self {
        let w = constants.hbar() / (2.0 * constants.mass());
        let half: Vec<Complex64> = grid
            .wavenumbers()
            .iter()
            .map(|k| Complex64::from_polar(1.0, -w * k * k * 0.5 * dt_ns))
            .collect();
        let full = half.iter().map(|p| p * p).collect();
        Self {
            dt_ns,
            grid: *grid,
            half,
            full,
        }
    }

    pub fn half_step(&self) -> &[Complex64] {
        &self.half
    }

    pub fn dt_ns(&self) -> f64 {
        self.dt_ns
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
}

/// Per-point potential step operators for a full `dt`.
#[derive(Debug, Clone)]
pub enum PotentialStepTable {
    Scalar(Vec<Complex64>),
    Matrix(Vec<Matrix2>),
}

impl PotentialStepTable {
    pub fn new(
        grid: &Grid,
        spec: &PotentialSpec,
        constants: &PhysicalConstants,
        dt_ns: f64,
    ) -> Self {
        let tau = dt_ns / constants.hbar();
        let h: Vec<PotentialMatrix> = (0..grid.n())
            .map(|i| build_potential_matrix(grid.x(i), spec, constants))
            .collect();
        if spec.coupled.is_none() {
            PotentialStepTable::Scalar(
                h.iter()
                    .map(|p| match p {
                        PotentialMatrix::Scalar(v) => (-I * tau * v).exp(),
                        PotentialMatrix::Matrix(_) => unreachable!(),
                    })
                    .collect(),
            )
        } else {
            // The potential is piecewise constant almost everywhere; reuse
            // the previous exponential when the matrix repeats.
            let mut out = Vec::with_capacity(grid.n());
            let mut last: Option<(Matrix2, Matrix2)> = None;
            for p in &h {
                let m = match p {
                    PotentialMatrix::Matrix(m) => *m,
                    PotentialMatrix::Scalar(_) => unreachable!(),
                };
                let e = match last {
                    Some((prev, e)) if prev == m => e,
                    _ => expm_2x2(&m, tau),
                };
                last = Some((m, e));
                out.push(e);
            }
            PotentialStepTable::Matrix(out)
        }
    }

    pub fn channels(&self) -> usize {
        match self {
            PotentialStepTable::Scalar(_) => 1,
            PotentialStepTable::Matrix(_) => 2,
        }
    }

    /// Largest operator 2-norm over all points.
    pub fn max_operator_norm(&self) -> f64 {
        match self {
            PotentialStepTable::Scalar(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            PotentialStepTable::Matrix(m) => m.iter().map(spectral_norm).fold(0.0, f64::max),
        }
    }

    /// Largest deviation from unitarity, `max ‖U†U − 1‖_max`.
    pub fn max_unitarity_defect(&self) -> f64 {
        match self {
            PotentialStepTable::Scalar(v) => {
                v.iter().map(|z| (z.norm_sqr() - 1.0).abs()).fold(0.0, f64::max)
            }
            PotentialStepTable::Matrix(m) => m
                .iter()
                .map(|u| {
                    let mut worst = 0.0f64;
                    for r in 0..2 {
                        for c in 0..2 {
                            let g = u[0][r].conj() * u[0][c] + u[1][r].conj() * u[1][c];
                            let id = if r == c { 1.0 } else { 0.0 };
                            worst = worst.max((g - id).norm());
                        }
                    }
                    worst
                })
                .fold(0.0, f64::max),
        }
    }

    fn apply(&self, field: &mut WaveField) {
        match self {
            PotentialStepTable::Scalar(p) => {
                for (a, m) in field.channel_mut(0).iter_mut().zip(p) {
                    *a *= m;
                }
            }
            PotentialStepTable::Matrix(p) => {
                let (c1, c2) = field.channels_mut().split_at_mut(1);
                for ((a, b), m) in c1[0].iter_mut().zip(c2[0].iter_mut()).zip(p) {
                    let (x, y) = (*a, *b);
                    *a = m[0][0] * x + m[0][1] * y;
                    *b = m[1][0] * x + m[1][1] * y;
                }
            }
        }
    }
}

/// Largest singular value of a 2×2 complex matrix.
fn spectral_norm(m: &Matrix2) -> f64 {
    // Eigenvalues of M†M = [[p, q], [q*, r]].
    let p = m[0][0].norm_sqr() + m[1][0].norm_sqr();
    let r = m[0][1].norm_sqr() + m[1][1].norm_sqr();
    let q = m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1];
    let mean = 0.5 * (p + r);
    let disc = (0.25 * (p - r).powi(2) + q.norm_sqr()).sqrt();
    (mean + disc).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kick {
    Half,
    Full,
}

/// FFT plans, kinetic and potential tables for one grid and time step.
pub struct Propagator {
    grid: Grid,
    kinetic: KineticPhase,
    potential: PotentialStepTable,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    inv_n: f64,
}

impl std::fmt::Debug for Propagator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Propagator")
            .field("grid", &self.grid)
            .field("dt_ns", &self.kinetic.dt_ns)
            .field("channels", &self.potential.channels())
            .finish()
    }
}

impl Propagator {
    pub fn new(
        grid: Grid,
        spec: &PotentialSpec,
        constants: &PhysicalConstants,
        dt_ns: f64,
    ) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n());
        let inverse = planner.plan_fft_inverse(grid.n());
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            kinetic: KineticPhase::new(&grid, constants, dt_ns),
            potential: PotentialStepTable::new(&grid, spec, constants, dt_ns),
            forward,
            inverse,
            scratch: vec![ZERO; scratch_len],
            inv_n: 1.0 / grid.n() as f64,
        }
    }

    pub fn for_config(config: &ScenarioConfig) -> Result<Self> {
        Ok(Self::new(
            config.grid()?,
            &config.potential,
            &config.constants,
            config.dt_ns(),
        ))
    }

    pub fn kinetic(&self) -> &KineticPhase {
        &self.kinetic
    }

    pub fn potential(&self) -> &PotentialStepTable {
        &self.potential
    }

    fn check_field(&self, field: &WaveField) -> Result<()> {
        if field.grid() != &self.grid {
            return Err(Error::InvalidInput(
                "field grid does not match the propagator grid".into(),
            ));
        }
        if field.n_channels() != self.potential.channels() {
            return Err(Error::InvalidInput(format!(
                "field has {} channels, propagator expects {}",
                field.n_channels(),
                self.potential.channels()
            )));
        }
        Ok(())
    }

    fn kinetic_kick(&mut self, field: &mut WaveField, kick: Kick) {
        let phases = match kick {
            Kick::Half => &self.kinetic.half,
            Kick::Full => &self.kinetic.full,
        };
        for amp in field.channels_mut() {
            self.forward.process_with_scratch(amp, &mut self.scratch);
            for (a, p) in amp.iter_mut().zip(phases) {
                *a *= p * self.inv_n;
            }
            self.inverse.process_with_scratch(amp, &mut self.scratch);
        }
    }

    /// Applies only the kinetic half step (exposed for spectral checks).
    pub fn kinetic_half_step(&mut self, field: &mut WaveField) -> Result<()> {
        self.check_field(field)?;
        self.kinetic_kick(field, Kick::Half);
        Ok(())
    }

    /// One full Strang step `K(dt/2)·P(dt)·K(dt/2)`.
    pub fn strang_step(&mut self, field: &mut WaveField) -> Result<()> {
        self.check_field(field)?;
        self.kinetic_kick(field, Kick::Half);
        self.potential.apply(field);
        self.kinetic_kick(field, Kick::Half);
        if let Some((channel, index)) = field.find_non_finite() {
            return Err(Error::NonFinite {
                channel,
                index,
                t_ns: f64::NAN,
            });
        }
        Ok(())
    }

    /// Advances `field` by `n_steps`, calling `observer(field, step)` after
    /// every `stride`-th step and after the last one. The field handed to the
    /// observer is a proper Strang iterate.
    pub fn run<F>(
        &mut self,
        field: &mut WaveField,
        n_steps: usize,
        stride: usize,
        mut observer: F,
    ) -> Result<()>
    where
        F: FnMut(&WaveField, usize) -> Result<()>,
    {
        self.check_field(field)?;
        if n_steps == 0 {
            return Ok(());
        }
        let stride = stride.max(1);
        let dt = self.kinetic.dt_ns;
        self.kinetic_kick(field, Kick::Half);
        for step in 1..=n_steps {
            self.potential.apply(field);
            let emit = step % stride == 0 || step == n_steps;
            self.kinetic_kick(field, if emit { Kick::Half } else { Kick::Full });
            if emit {
                if let Some((channel, index)) = field.find_non_finite() {
                    return Err(Error::NonFinite {
                        channel,
                        index,
                        t_ns: step as f64 * dt,
                    });
                }
                observer(field, step)?;
                if step < n_steps {
                    self.kinetic_kick(field, Kick::Half);
                }
            }
        }
        Ok(())
    }
}

/// Builds the initial field for `config` and evolves it to `t_end`, calling
/// `observer(field, t_ns)` at t = 0 and every `frame_stride` steps.
pub fn evolve<F>(config: &ScenarioConfig, mut observer: F) -> Result<WaveField>
where
    F: FnMut(&WaveField, f64) -> Result<()>,
{
    if let Err(v) = config.validate() {
        return Err(Error::InvalidConfig(v));
    }
    let mut field = make_initial_field(config)?;
    let mut prop = Propagator::for_config(config)?;
    let dt = config.dt_ns();
    observer(&field, 0.0)?;
    prop.run(
        &mut field,
        config.n_steps(),
        config.frame_stride,
        |f, step| observer(f, step as f64 * dt),
    )?;
    Ok(field)
}
