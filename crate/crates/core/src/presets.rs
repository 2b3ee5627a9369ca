//! Named scenarios for every figure, plus grid and time-step variants used
//! for convergence checks.

use serde::{Deserialize, Serialize};

use crate::analytic::{self, WidthRow};
use crate::config::{
    AnalysisSpec, BarrierWidth, CapSpec, CouplingSpec, FitSpec, GridSpec, PhysicalConstants,
    PotentialSpec, PulseSpec, ScenarioConfig,
};
use crate::error::{Error, Result};
use crate::experiment;

/// Barrier height, meV.
pub const V0_MEV: f64 = 0.538;
/// Coupling energy between the two waveguides, μeV.
pub const COUPLING_UEV: f64 = 26.22;
/// Finite lifetime inside the barrier, ns.
pub const LIFETIME_NS: f64 = 0.27;
pub const T_FWHM_NS: f64 = 1.14;
pub const T_FLAT_NS: f64 = 0.86;
pub const T_END_NS: f64 = 2.18;
pub const DT_PS: f64 = 0.025;
pub const GRID_N: usize = 1 << 15;
pub const FRAME_STRIDE: usize = 40;
/// Frame spacing shared by every preset, ps.
pub const FRAME_SPACING_PS: f64 = 1.0;
/// Grid and step for scenarios whose shortest decay length needs 2¹⁶ points.
pub const FINE_GRID_N: usize = 1 << 16;
pub const FINE_DT_PS: f64 = 0.008;

/// Closed-form velocity table over barrier widths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WidthTableSpec {
    pub name: String,
    pub constants: PhysicalConstants,
    #[serde(rename = "v0_meV")]
    pub v0: f64,
    #[serde(rename = "detuning_meV")]
    pub detuning: f64,
    /// Depth as a fraction of the width.
    pub fractions: Vec<f64>,
    pub widths_um: Vec<f64>,
}

impl WidthTableSpec {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table spec serializes")
    }

    pub fn rows(&self) -> Result<Vec<WidthRow>> {
        let regime = analytic::classify(self.v0 + self.detuning, self.v0, &self.constants)?;
        analytic::velocity_vs_width_table(&regime, &self.fractions, &self.widths_um)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetKind {
    Simulation(ScenarioConfig),
    WidthTable(WidthTableSpec),
}

/// One output file and its column headers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub file: &'static str,
    pub columns: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub figure: &'static str,
    pub kind: PresetKind,
}

impl Preset {
    pub fn scenario(&self) -> Option<&ScenarioConfig> {
        match &self.kind {
            PresetKind::Simulation(c) => Some(c),
            PresetKind::WidthTable(_) => None,
        }
    }

    /// E − V₀ (shifted by ħC₀ for two channels), meV.
    pub fn detuning(&self) -> f64 {
        match &self.kind {
            PresetKind::Simulation(c) => c.detuning(),
            PresetKind::WidthTable(t) => t.detuning,
        }
    }

    pub fn channels(&self) -> usize {
        self.scenario().map_or(1, |c| c.channels())
    }

    /// Γ in ns⁻¹.
    pub fn dissipation(&self) -> f64 {
        self.scenario().map_or(0.0, |c| c.potential.gamma)
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        match &self.kind {
            PresetKind::Simulation(_) => vec![
                ManifestEntry {
                    file: experiment::FRAMES_FILE,
                    columns: experiment::SAMPLE_COLUMNS.to_vec(),
                },
                ManifestEntry {
                    file: experiment::PROBES_FILE,
                    columns: experiment::SAMPLE_COLUMNS.to_vec(),
                },
                ManifestEntry {
                    file: experiment::SUMMARY_FILE,
                    columns: vec![],
                },
            ],
            PresetKind::WidthTable(_) => vec![
                ManifestEntry {
                    file: experiment::WIDTH_TABLE_FILE,
                    columns: experiment::WIDTH_TABLE_COLUMNS.to_vec(),
                },
                ManifestEntry {
                    file: experiment::SUMMARY_FILE,
                    columns: vec![],
                },
            ],
        }
    }
}

/// Box half-width (mm) and pulse centre (mm) per detuning sign.
fn layout(delta: f64) -> (f64, f64) {
    if delta > 0.0 {
        (13.93, -6.96)
    } else if delta == 0.0 {
        (12.79, -6.40)
    } else {
        (11.54, -5.77)
    }
}

fn cap() -> CapSpec {
    CapSpec {
        onset_um: 4000.0,
        width_um: 1000.0,
        strength: 2.0,
    }
}

fn single(name: &str, delta: f64, probes: &[f64]) -> ScenarioConfig {
    let (half, center) = layout(delta);
    ScenarioConfig {
        name: name.to_owned(),
        constants: PhysicalConstants::standard(),
        grid: GridSpec {
            x_min_mm: -half,
            x_max_mm: half,
            n: GRID_N,
        },
        pulse: PulseSpec {
            energy: V0_MEV + delta,
            t_fwhm_ns: T_FWHM_NS,
            t_flat_ns: T_FLAT_NS,
            center_mm: center,
        },
        potential: PotentialSpec {
            v0: V0_MEV,
            barrier_start_um: 0.0,
            barrier_width_um: BarrierWidth::SemiInfinite,
            gamma: 0.0,
            cap: Some(cap()),
            coupled: None,
        },
        dt_ps: DT_PS,
        t_end_ns: T_END_NS,
        probes_um: probes.to_vec(),
        frame_stride: FRAME_STRIDE,
        analysis: AnalysisSpec::default(),
    }
}

/// Two waveguides. The incident energy sits ħC₀ below `V₀ + Δ` so that the
/// symmetric and antisymmetric barrier modes straddle the barrier top by ±ħC₀.
fn coupled(name: &str, delta: f64, onset_um: f64, probes: &[f64]) -> ScenarioConfig {
    let mut c = single(name, delta, probes);
    let hc = COUPLING_UEV * 1e-3;
    c.pulse.energy = V0_MEV + delta - hc;
    c.potential.coupled = Some(CouplingSpec {
        wg2_prebarrier: 2.0 * V0_MEV,
        coupling_uev: COUPLING_UEV,
        coupling_onset_um: onset_um,
    });
    c
}

/// Sets grid size and time step, keeping frames [`FRAME_SPACING_PS`] apart.
fn numerics(mut c: ScenarioConfig, n: usize, dt_ps: f64) -> ScenarioConfig {
    c.grid.n = n;
    c.dt_ps = dt_ps;
    c.frame_stride = (FRAME_SPACING_PS / dt_ps).round() as usize;
    c
}

fn with_loss(mut c: ScenarioConfig, name: &str) -> ScenarioConfig {
    c.name = name.to_owned();
    c.potential.gamma = 1.0 / LIFETIME_NS;
    c
}

const FIG2A_PROBES: [f64; 3] = [0.425, 128.79, 256.30];
const FIG2B_PROBES: [f64; 3] = [0.39, 39.42, 78.45];
const FIG2C_PROBES: [f64; 3] = [0.35, 2.82, 8.45];
const FIG3D_PROBES: [f64; 3] = [2.05, 5.46, 13.32];

fn fig2b_long() -> ScenarioConfig {
    let mut c = single("fig2b-long", 0.0, &FIG2B_PROBES);
    let flat = 5.0 * T_FLAT_NS;
    c.pulse.t_flat_ns = flat;
    c.pulse.t_fwhm_ns = flat + (T_FWHM_NS - T_FLAT_NS);
    // Leading plateau edge at the same place as in fig2b.
    let v0 = c.pulse.group_speed(&c.constants);
    let lead_mm = -6.40 + 0.5 * T_FLAT_NS * v0 * 1e-3;
    c.pulse.center_mm = ((lead_mm - 0.5 * flat * v0 * 1e-3) * 100.0).round() / 100.0;
    c.grid.x_min_mm = -32.0;
    c.grid.x_max_mm = 8.0;
    c.t_end_ns = 4.8;
    c.analysis.readout_times_ns = vec![1.61, 4.73];
    c.analysis.falling_window_ns = [4.70, 4.80];
    numerics(c, FINE_GRID_N, 0.02)
}

fn fig5c() -> WidthTableSpec {
    WidthTableSpec {
        name: "fig5c".into(),
        constants: PhysicalConstants::standard(),
        v0: V0_MEV,
        detuning: -0.05,
        fractions: vec![0.0, 0.25, 0.5, 0.75, 0.9],
        widths_um: analytic::linspace(0.1, 60.0, 300),
    }
}

/// Every preset, in listing order.
pub fn all() -> Vec<Preset> {
    let sim = |name: &'static str, figure: &'static str, c: ScenarioConfig| Preset {
        name,
        figure,
        kind: PresetKind::Simulation(c),
    };
    let fig2c = single("fig2c", -0.1, &FIG2C_PROBES);
    let fig3d = numerics(
        coupled("fig3d", -0.1, 1.02, &FIG3D_PROBES),
        FINE_GRID_N,
        FINE_DT_PS,
    );
    let mut fig4 = fig3d.clone();
    fig4.name = "fig4".into();
    // Fit across the fig3d probe depths.
    fig4.analysis.fit = Some(FitSpec {
        time_ns: 1.09,
        window_um: Some([FIG3D_PROBES[0], FIG3D_PROBES[2]]),
    });
    let mut fig5ab = single("fig5ab", 0.1, &[106.71, 212.37]);
    fig5ab.analysis.frame_window_um = [-20.0, 300.0];
    let mut dt_half = numerics(fig2c.clone(), GRID_N, DT_PS / 2.0);
    dt_half.name = "fig2c-dt-half".into();
    // Twice the points at the same Nyquist phase per step.
    let mut grid_2x = numerics(fig2c.clone(), 2 * GRID_N, DT_PS / 4.0);
    grid_2x.name = "fig2c-grid-2x".into();

    vec![
        sim("fig2a", "2a", single("fig2a", 0.1, &FIG2A_PROBES)),
        sim("fig2b", "2b", single("fig2b", 0.0, &FIG2B_PROBES)),
        sim("fig2b-long", "2b (5x flat-top)", fig2b_long()),
        sim("fig2c", "2c", fig2c.clone()),
        sim("fig2d", "2d", with_loss(fig2c, "fig2d")),
        sim("fig3b", "3b", coupled("fig3b", 0.1, 1.25, &[40.37, 123.62])),
        sim("fig3c", "3c", coupled("fig3c", 0.0, 1.14, &[28.55, 149.99])),
        sim("fig3d", "3d", fig3d.clone()),
        sim("fig3e", "3e", with_loss(fig3d, "fig3e")),
        sim("fig4", "4", fig4),
        sim("fig5ab", "5a,5b", fig5ab),
        Preset {
            name: "fig5c",
            figure: "5c",
            kind: PresetKind::WidthTable(fig5c()),
        },
        sim("fig2c-dt-half", "convergence", dt_half),
        sim("fig2c-grid-2x", "convergence", grid_2x),
    ]
}

pub fn find(name: &str) -> Result<Preset> {
    all()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_owned()))
}

/// The simulation config of a preset.
pub fn scenario(name: &str) -> Result<ScenarioConfig> {
    match find(name)?.kind {
        PresetKind::Simulation(c) => Ok(c),
        PresetKind::WidthTable(_) => Err(Error::InvalidInput(format!(
            "preset {name} is an analytic table, not a simulation"
        ))),
    }
}
