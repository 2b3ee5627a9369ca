//! Uniform periodic lattice and the wave field living on it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[x_min, x_max)`, lengths in μm.
///
/// Points sit at `x_min + i·dx` for `i in 0..n`; the point at `x_max` is the
/// periodic image of `x_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid extents must satisfy x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "grid size must be a power of two >= 4, got {n}"
            )));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Angular wavenumbers in FFT order: `0, 1, …, n/2−1, −n/2, …, −1`
    /// times `2π/L`. The Nyquist entry is `−π/dx`.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = 2.0 * PI / self.length();
        let half = self.n / 2;
        (0..self.n)
            .map(|i| {
                if i < half {
                    i as f64 * dk
                } else {
                    (i as f64 - self.n as f64) * dk
                }
            })
            .collect()
    }

    /// Fractional grid coordinate of `x`, i.e. `(x − x_min)/dx`.
    pub fn index_of(&self, x: f64) -> f64 {
        (x - self.x_min) / self.dx()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Four-point cubic (Lagrange) interpolation of a sampled quantity at `x`,
    /// using periodic wrap-around for the stencil.
    pub fn interpolate<T>(&self, values: &[T], x: f64) -> T
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        debug_assert_eq!(values.len(), self.n);
        let s = self.index_of(x);
        let base = s.floor();
        let t = s - base;
        let n = self.n as i64;
        let at = |off: i64| values[(base as i64 + off).rem_euclid(n) as usize];
        let w = cubic_weights(t);
        at(-1) * w[0] + at(0) * w[1] + at(1) * w[2] + at(2) * w[3]
    }
}

impl Grid {
    /// Trapezoid integral of the samples `f(i)` over `[start, end]`, linear
    /// between grid points. Ends are clipped to `[x_min, x_max − dx]`.
    pub fn integrate(&self, start: f64, end: f64, f: impl Fn(usize) -> f64) -> f64 {
        let s = self.index_of(start).max(0.0);
        let e = self.index_of(end).min((self.n - 1) as f64);
        if !(e > s) {
            return 0.0;
        }
        let i0 = s.floor() as usize;
        let i1 = e.ceil() as usize;
        let mut total = 0.0;
        let mut prev = f(i0);
        for i in i0..i1 {
            let next = f(i + 1);
            let a = s.max(i as f64) - i as f64;
            let b = e.min((i + 1) as f64) - i as f64;
            if b > a {
                let fa = prev + (next - prev) * a;
                let fb = prev + (next - prev) * b;
                total += 0.5 * (fa + fb) * (b - a);
            }
            prev = next;
        }
        total * self.dx()
    }
}

/// Lagrange weights for nodes at -1, 0, 1, 2 evaluated at `t ∈ [0, 1)`.
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// One- or two-channel complex amplitude on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    grid: Grid,
    channels: Vec<Vec<Complex64>>,
}

impl WaveField {
    pub fn zeros(grid: Grid, channels: usize) -> Result<Self> {
        if !(1..=2).contains(&channels) {
            return Err(Error::InvalidInput(format!(
                "a wave field has 1 or 2 channels, got {channels}"
            )));
        }
        Ok(Self {
            grid,
            channels: vec![vec![Complex64::new(0.0, 0.0); grid.n()]; channels],
        })
    }

    pub fn from_channels(grid: Grid, channels: Vec<Vec<Complex64>>) -> Result<Self> {
        if !(1..=2).contains(&channels.len()) {
            return Err(Error::InvalidInput(format!(
                "a wave field has 1 or 2 channels, got {}",
                channels.len()
            )));
        }
        if let Some(bad) = channels.iter().find(|c| c.len() != grid.n()) {
            return Err(Error::InvalidInput(format!(
                "channel length {} does not match grid size {}",
                bad.len(),
                grid.n()
            )));
        }
        Ok(Self { grid, channels })
    }

    /// Samples `f(x)` on the grid as a single-channel field.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amp = (0..grid.n()).map(|i| f(grid.x(i))).collect();
        Self {
            grid,
            channels: vec![amp],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn channel(&self, c: usize) -> &[Complex64] {
        &self.channels[c]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.channels[c]
    }

    pub fn channels(&self) -> &[Vec<Complex64>] {
        &self.channels
    }

    pub(crate) fn channels_mut(&mut self) -> &mut [Vec<Complex64>] {
        &mut self.channels
    }

    /// `∫ Σ_c |ψ_c|² dx` (rectangle rule, exact for the periodic lattice).
    pub fn norm(&self) -> f64 {
        self.channel_norms().iter().sum()
    }

    pub fn channel_norms(&self) -> Vec<f64> {
        let dx = self.grid.dx();
        self.channels
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx)
            .collect()
    }

    /// Multiplies every amplitude by `z`.
    pub fn scale(&mut self, z: Complex64) {
        for c in &mut self.channels {
            for a in c.iter_mut() {
                *a *= z;
            }
        }
    }

    /// First non-finite amplitude, as `(channel, index)`.
    pub fn find_non_finite(&self) -> Option<(usize, usize)> {
        self.channels.iter().enumerate().find_map(|(c, amp)| {
            amp.iter()
                .position(|z| !z.re.is_finite() || !z.im.is_finite())
                .map(|i| (c, i))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(-1.0, 1.0, 100).is_err());
        assert!(Grid::new(1.0, -1.0, 128).is_err());
        assert!(Grid::new(-1.0, 1.0, 128).is_ok());
    }

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = Grid::new(0.0, 8.0, 8).unwrap();
        let k = g.wavenumbers();
        let dk = 2.0 * PI / 8.0;
        assert_eq!(k[0], 0.0);
        assert!((k[3] - 3.0 * dk).abs() < 1e-15);
        assert!((k[4] + PI / g.dx()).abs() < 1e-15);
        assert!((k[7] + dk).abs() < 1e-15);
        let kmax = k.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((kmax - PI / g.dx()).abs() < 1e-12);
    }

    #[test]
    fn cubic_interpolation_is_exact_for_cubics() {
        let g = Grid::new(-4.0, 4.0, 64).unwrap();
        let p = |x: f64| 0.3 * x * x * x - x * x + 2.0 * x - 0.5;
        let v: Vec<f64> = g.positions().iter().map(|&x| p(x)).collect();
        for &x in &[-1.234, 0.0, 0.051, 2.71] {
            assert!((g.interpolate(&v, x) - p(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn trapezoid_integral_is_exact_for_linear_data() {
        let g = Grid::new(-10.0, 10.0, 64).unwrap();
        let line = |i: usize| 2.0 * g.x(i) + 1.0;
        // ∫(2x + 1) over [a, b] = b² − a² + b − a
        for (a, b) in [(-3.3, 4.1), (0.0, 5.0), (1.2, 1.25), (-10.0, 9.6875)] {
            let exact = b * b - a * a + b - a;
            assert!((g.integrate(a, b, line) - exact).abs() < 1e-12, "{a} {b}");
        }
        assert_eq!(g.integrate(2.0, 1.0, line), 0.0);
    }

    #[test]
    fn trapezoid_integral_of_a_decay_converges() {
        let g = Grid::new(-50.0, 50.0, 4096).unwrap();
        let got = g.integrate(0.0, 40.0, |i| (-0.2 * g.x(i)).exp());
        let exact = (1.0 - (-8.0f64).exp()) / 0.2;
        assert!(((got - exact) / exact).abs() < 1e-4);
    }

    #[test]
    fn field_shape_is_checked() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        assert!(WaveField::zeros(g, 3).is_err());
        assert!(WaveField::from_channels(g, vec![vec![Complex64::new(0.0, 0.0); 15]]).is_err());
    }
}
