//! Scenario description: constants, grid, pulse, potential, time stepping,
//! probes and post-processing windows.
//!
//! The serialized form carries an explicit unit suffix on every key
//! (`v0_meV`, `dt_ps`, `x_min_mm`, …). Accessors on the Rust side always
//! return internal units (μm, ns, meV).

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::units;

/// Below this |E − V₀| (meV) a mode is treated as exactly critical.
pub const CRITICAL_DETUNING_MEV: f64 = 1e-9;

/// Minimum grid points per de Broglie wavelength.
pub const POINTS_PER_WAVELENGTH: f64 = 16.0;
/// Minimum grid points per evanescent decay length.
pub const POINTS_PER_DECAY_LENGTH: f64 = 10.0;
/// The absorbing layer must start at least this many penetration lengths
/// beyond the deepest probe.
pub const CAP_CLEARANCE_LENGTHS: f64 = 40.0;
/// Largest envelope intensity tolerated at either box edge.
pub const EDGE_INTENSITY_LIMIT: f64 = 1e-9;
/// Largest kinetic phase `ħk²dt/2m` per step at the grid Nyquist
/// wavenumber. Modes whose phase comes close to a multiple of 2π are pumped
/// coherently by the potential step at the barrier edge; below 5π/3 the
/// resonant gain `1/(2·sin(φ/2))` stays under one.
pub const MAX_NYQUIST_PHASE: f64 = 5.0 * PI / 3.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl Violation {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_owned(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConstantsDoc", into = "ConstantsDoc")]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
    mass_kg: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsDoc {
    #[serde(rename = "hbar_meV_ns")]
    hbar: f64,
    mass_kg: f64,
}

impl TryFrom<ConstantsDoc> for PhysicalConstants {
    type Error = Error;

    fn try_from(d: ConstantsDoc) -> Result<Self> {
        Self::new(d.hbar, d.mass_kg)
    }
}

impl From<PhysicalConstants> for ConstantsDoc {
    fn from(c: PhysicalConstants) -> Self {
        Self {
            hbar: c.hbar,
            mass_kg: c.mass_kg,
        }
    }
}

impl PhysicalConstants {
    pub fn new(hbar_mev_ns: f64, mass_kg: f64) -> Result<Self> {
        if !(hbar_mev_ns > 0.0) {
            return Err(Error::InvalidInput(format!(
                "hbar must be positive, got {hbar_mev_ns}"
            )));
        }
        Ok(Self {
            hbar: hbar_mev_ns,
            mass: units::convert_mass(mass_kg)?,
            mass_kg,
        })
    }

    /// ħ = 6.582119569×10⁻⁴ meV·ns and m = 6.95×10⁻³⁶ kg.
    pub fn standard() -> Self {
        Self::new(units::HBAR_MEV_NS, 6.95e-36).expect("standard constants are valid")
    }

    /// ħ in meV·ns.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Mass in meV·ns²/μm².
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn mass_kg(&self) -> f64 {
        self.mass_kg
    }

    /// Classical speed `√(2E/m)` in μm/ns (= km/s) for a kinetic energy in meV.
    pub fn speed(&self, energy: f64) -> f64 {
        (2.0 * energy / self.mass).sqrt()
    }

    /// Wavenumber `√(2m|E|)/ħ` in μm⁻¹.
    pub fn wavenumber(&self, energy: f64) -> f64 {
        (2.0 * self.mass * energy.abs()).sqrt() / self.hbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min_mm: f64,
    pub x_max_mm: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(
            units::mm_to_um(self.x_min_mm),
            units::mm_to_um(self.x_max_mm),
            self.n,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    #[serde(rename = "energy_meV")]
    pub energy: f64,
    pub t_fwhm_ns: f64,
    pub t_flat_ns: f64,
    pub center_mm: f64,
}

impl PulseSpec {
    /// Group speed `v₀ = √(2E/m)` in μm/ns.
    pub fn group_speed(&self, c: &PhysicalConstants) -> f64 {
        c.speed(self.energy)
    }

    /// Spatial intensity FWHM `v₀·t_fwhm` in μm.
    pub fn spatial_fwhm(&self, c: &PhysicalConstants) -> f64 {
        self.group_speed(c) * self.t_fwhm_ns
    }

    /// Spatial flat-top width `v₀·t_flat` in μm.
    pub fn spatial_flat(&self, c: &PhysicalConstants) -> f64 {
        self.group_speed(c) * self.t_flat_ns
    }

    pub fn center_um(&self) -> f64 {
        units::mm_to_um(self.center_mm)
    }
}

/// Barrier extent beyond its entrance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarrierWidth {
    /// Width in μm.
    Finite(f64),
    SemiInfinite,
}

const SEMI_INFINITE: &str = "semi-infinite";

impl Serialize for BarrierWidth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BarrierWidth::Finite(a) => s.serialize_f64(*a),
            BarrierWidth::SemiInfinite => s.serialize_str(SEMI_INFINITE),
        }
    }
}

impl<'de> Deserialize<'de> for BarrierWidth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) => Ok(BarrierWidth::Finite(a)),
            Raw::Str(s) if s == SEMI_INFINITE => Ok(BarrierWidth::SemiInfinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "barrier width must be a number (μm) or \"{SEMI_INFINITE}\", got \"{s}\""
            ))),
        }
    }
}

/// Quartic complex absorbing potential `W(x) = W₀((x − onset)/width)⁴` for
/// `x > onset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapSpec {
    pub onset_um: f64,
    pub width_um: f64,
    #[serde(rename = "strength_meV")]
    pub strength: f64,
}

impl CapSpec {
    pub fn absorption(&self, x: f64) -> f64 {
        if x > self.onset_um {
            self.strength * ((x - self.onset_um) / self.width_um).powi(4)
        } else {
            0.0
        }
    }
}

/// Second waveguide and its coupling to the first.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    /// Potential of channel 2 before the barrier entrance.
    #[serde(rename = "wg2_prebarrier_meV")]
    pub wg2_prebarrier: f64,
    /// Coupling energy ħC₀.
    #[serde(rename = "coupling_ueV")]
    pub coupling_uev: f64,
    pub coupling_onset_um: f64,
}

impl CouplingSpec {
    /// ħC₀ in meV.
    pub fn coupling_energy(&self) -> f64 {
        units::uev_to_mev(self.coupling_uev)
    }

    /// C₀ in ns⁻¹.
    pub fn coupling_rate(&self, c: &PhysicalConstants) -> f64 {
        self.coupling_energy() / c.hbar()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    #[serde(rename = "v0_meV")]
    pub v0: f64,
    pub barrier_start_um: f64,
    pub barrier_width_um: BarrierWidth,
    /// Population decay rate inside the barrier, ns⁻¹.
    #[serde(rename = "gamma_GHz")]
    pub gamma: f64,
    pub cap: Option<CapSpec>,
    pub coupled: Option<CouplingSpec>,
}

impl PotentialSpec {
    pub fn channels(&self) -> usize {
        if self.coupled.is_some() {
            2
        } else {
            1
        }
    }

    pub fn in_barrier(&self, x: f64) -> bool {
        x >= self.barrier_start_um
            && match self.barrier_width_um {
                BarrierWidth::Finite(a) => x < self.barrier_start_um + a,
                BarrierWidth::SemiInfinite => true,
            }
    }

    /// Real potential of channel `c` (0 or 1) at `x`, excluding coupling.
    pub fn real_potential(&self, x: f64, channel: usize) -> f64 {
        if self.in_barrier(x) {
            self.v0
        } else if channel == 1 && x < self.barrier_start_um {
            self.coupled.map_or(0.0, |c| c.wg2_prebarrier)
        } else {
            0.0
        }
    }

    /// Coupling energy ħC(x) in meV.
    pub fn coupling_energy(&self, x: f64) -> f64 {
        match self.coupled {
            Some(c) if x >= c.coupling_onset_um => c.coupling_energy(),
            _ => 0.0,
        }
    }

    /// Decay rate Γ(x); dissipation acts on every channel for x ≥ barrier start.
    pub fn decay_rate(&self, x: f64) -> f64 {
        if x >= self.barrier_start_um {
            self.gamma
        } else {
            0.0
        }
    }

    pub fn absorption(&self, x: f64) -> f64 {
        self.cap.map_or(0.0, |c| c.absorption(x))
    }

    pub fn is_hermitian(&self) -> bool {
        self.gamma == 0.0 && self.cap.is_none()
    }
}

/// Post-processing windows and output sampling. Not part of the dynamics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    pub plateau_window_ns: [f64; 2],
    pub rising_window_ns: [f64; 2],
    pub falling_window_ns: [f64; 2],
    /// Times at which probe values are read out individually.
    pub readout_times_ns: Vec<f64>,
    pub fit: Option<FitSpec>,
    /// Spatial window written to `frames.csv`.
    pub frame_window_um: [f64; 2],
    pub frame_points: usize,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        Self {
            plateau_window_ns: [0.95, 1.60],
            rising_window_ns: [0.40, 0.80],
            falling_window_ns: [1.80, 2.10],
            readout_times_ns: Vec::new(),
            fit: None,
            frame_window_um: [-20.0, 300.0],
            frame_points: 128,
        }
    }
}

/// Relative-density parabola fit request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub time_ns: f64,
    /// Explicit window; when absent the default window rule applies.
    #[serde(default)]
    pub window_um: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub constants: PhysicalConstants,
    pub grid: GridSpec,
    pub pulse: PulseSpec,
    pub potential: PotentialSpec,
    pub dt_ps: f64,
    pub t_end_ns: f64,
    pub probes_um: Vec<f64>,
    pub frame_stride: usize,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

/// Characteristic lengths of the barrier region for a given scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthScales {
    /// Shortest de Broglie wavelength anywhere (incident or inside), μm.
    pub shortest_wavelength: f64,
    /// Shortest evanescent decay length inside the barrier, μm.
    pub shortest_decay: Option<f64>,
    /// Length over which the barrier wave varies: the longest decay length if
    /// every barrier mode is evanescent, otherwise the longest wavelength of
    /// a propagating (or, for critical modes, incident) wave.
    pub penetration: f64,
}

impl ScenarioConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn channels(&self) -> usize {
        self.potential.channels()
    }

    pub fn dt_ns(&self) -> f64 {
        units::ps_to_ns(self.dt_ps)
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end_ns / self.dt_ns()).round() as usize
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid.build()
    }

    /// Kinetic phase `ħk²·dt/2m` accumulated per step by the fastest grid mode.
    pub fn nyquist_phase(&self) -> Result<f64> {
        let k = PI / self.grid()?.dx();
        Ok(self.constants.hbar() * k * k * self.dt_ns() / (2.0 * self.constants.mass()))
    }

    /// Largest `dt_ps` that keeps [`Self::nyquist_phase`] within
    /// [`MAX_NYQUIST_PHASE`].
    pub fn max_dt_ps(&self) -> Result<f64> {
        Ok(self.dt_ps * MAX_NYQUIST_PHASE / self.nyquist_phase()?)
    }

    /// Detuning E − V₀ (+ ħC₀ for coupled waveguides), meV.
    pub fn detuning(&self) -> f64 {
        self.pulse.energy - self.potential.v0
            + self.potential.coupled.map_or(0.0, |c| c.coupling_energy())
    }

    /// Energies E − U of every barrier eigenmode, meV. For coupled channels
    /// these are the uncoupled stretch before onset and the symmetric
    /// (U = V₀) and antisymmetric (U = V₀ − 2ħC₀) modes after it.
    pub fn barrier_mode_detunings(&self) -> Vec<f64> {
        let e = self.pulse.energy;
        let v0 = self.potential.v0;
        match self.potential.coupled {
            None => vec![e - v0],
            Some(c) => vec![e - v0, e - (v0 - 2.0 * c.coupling_energy())],
        }
    }

    pub fn length_scales(&self) -> LengthScales {
        let c = &self.constants;
        let incident = 2.0 * PI / c.wavenumber(self.pulse.energy);
        let mut shortest_wavelength = incident;
        let mut shortest_decay: Option<f64> = None;
        let mut longest_decay = 0.0f64;
        let mut longest_wave: Option<f64> = None;
        for d in self.barrier_mode_detunings() {
            if d.abs() < CRITICAL_DETUNING_MEV {
                longest_wave = Some(longest_wave.unwrap_or(0.0).max(incident));
            } else if d > 0.0 {
                let lambda = 2.0 * PI / c.wavenumber(d);
                shortest_wavelength = shortest_wavelength.min(lambda);
                longest_wave = Some(longest_wave.unwrap_or(0.0).max(lambda));
            } else {
                let decay = 1.0 / c.wavenumber(d);
                shortest_decay = Some(shortest_decay.map_or(decay, |s: f64| s.min(decay)));
                longest_decay = longest_decay.max(decay);
            }
        }
        LengthScales {
            shortest_wavelength,
            shortest_decay,
            penetration: longest_wave.unwrap_or(longest_decay),
        }
    }

    /// Checks every invariant; returns all violations found.
    pub fn validate(&self) -> std::result::Result<(), Vec<Violation>> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }
}

/// Lists every violated invariant of `config`; an empty list means valid.
pub fn validate(config: &ScenarioConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    let c = &config.constants;
    if !(c.hbar() > 0.0) {
        out.push(Violation::new("constants.hbar_meV_ns", "must be positive"));
    }
    if !(c.mass() > 0.0) {
        out.push(Violation::new("constants.mass_kg", "must be positive"));
    }

    let grid = match config.grid() {
        Ok(g) => Some(g),
        Err(e) => {
            out.push(Violation::new("grid", e.to_string()));
            None
        }
    };

    let p = &config.pulse;
    if !(p.energy > 0.0) {
        out.push(Violation::new("pulse.energy_meV", "must be positive"));
    }
    if !(p.t_flat_ns >= 0.0) {
        out.push(Violation::new("pulse.t_flat_ns", "must be non-negative"));
    }
    if !(p.t_fwhm_ns > p.t_flat_ns) {
        out.push(Violation::new(
            "pulse.t_fwhm_ns",
            "must exceed the flat-top duration",
        ));
    }

    let pot = &config.potential;
    if !(pot.v0 >= 0.0) {
        out.push(Violation::new("potential.v0_meV", "must be non-negative"));
    }
    if !(pot.gamma >= 0.0) {
        out.push(Violation::new("potential.gamma_GHz", "must be non-negative"));
    }
    if let BarrierWidth::Finite(a) = pot.barrier_width_um {
        if !(a > 0.0) {
            out.push(Violation::new(
                "potential.barrier_width_um",
                "finite barrier width must be positive",
            ));
        }
    }
    if let Some(cp) = pot.coupled {
        if !(cp.coupling_uev >= 0.0) {
            out.push(Violation::new(
                "potential.coupled.coupling_ueV",
                "must be non-negative",
            ));
        }
    }
    if let Some(cap) = pot.cap {
        if !(cap.width_um > 0.0) {
            out.push(Violation::new("potential.cap.width_um", "must be positive"));
        }
        if !(cap.strength >= 0.0) {
            out.push(Violation::new(
                "potential.cap.strength_meV",
                "must be non-negative",
            ));
        }
    }

    if !(config.dt_ps > 0.0) {
        out.push(Violation::new("dt_ps", "must be positive"));
    }
    if !(config.t_end_ns > 0.0) {
        out.push(Violation::new("t_end_ns", "must be positive"));
    }
    if config.frame_stride == 0 {
        out.push(Violation::new("frame_stride", "must be at least 1"));
    }

    // The remaining checks need a well-formed grid and pulse.
    let physical = p.energy > 0.0 && pot.v0 >= 0.0 && c.mass() > 0.0;
    if let (Some(grid), true) = (grid, physical) {
        for (i, &x) in config.probes_um.iter().enumerate() {
            if !grid.contains(x) {
                out.push(Violation::new(
                    &format!("probes_um[{i}]"),
                    format!(
                        "probe outside grid: {x} μm not in [{}, {}] μm",
                        grid.x_min(),
                        grid.x_max()
                    ),
                ));
            }
        }

        if config.dt_ps > 0.0 {
            let phase = config.nyquist_phase().unwrap_or(0.0);
            if phase > MAX_NYQUIST_PHASE {
                out.push(Violation::new(
                    "dt_ps",
                    format!(
                        "time step too coarse for the grid: Nyquist kinetic phase {phase:.3} rad per step exceeds {MAX_NYQUIST_PHASE:.3}, need dt <= {:.5} ps",
                        config.max_dt_ps().unwrap_or(0.0)
                    ),
                ));
            }
        }

        let scales = config.length_scales();
        let dx = grid.dx();
        if scales.shortest_wavelength < POINTS_PER_WAVELENGTH * dx {
            out.push(Violation::new(
                "grid.n",
                format!(
                    "insufficient wavelength resolution: λ = {:.4} μm spans {:.2} points, need {}",
                    scales.shortest_wavelength,
                    scales.shortest_wavelength / dx,
                    POINTS_PER_WAVELENGTH
                ),
            ));
        }
        if let Some(decay) = scales.shortest_decay {
            if decay < POINTS_PER_DECAY_LENGTH * dx {
                out.push(Violation::new(
                    "grid.n",
                    format!(
                        "insufficient decay-length resolution: 1/κ = {:.4} μm spans {:.2} points, need {}",
                        decay,
                        decay / dx,
                        POINTS_PER_DECAY_LENGTH
                    ),
                ));
            }
        }

        if pot.barrier_width_um == BarrierWidth::SemiInfinite {
            match pot.cap {
                None => out.push(Violation::new(
                    "potential.cap",
                    "a semi-infinite barrier needs an absorbing layer",
                )),
                Some(cap) => {
                    let deepest = config
                        .probes_um
                        .iter()
                        .copied()
                        .fold(pot.barrier_start_um, f64::max);
                    let needed = deepest + CAP_CLEARANCE_LENGTHS * scales.penetration;
                    if cap.onset_um < needed {
                        out.push(Violation::new(
                            "potential.cap.onset_um",
                            format!(
                                "absorbing layer too close: onset {} μm, need >= {:.1} μm",
                                cap.onset_um, needed
                            ),
                        ));
                    }
                    if cap.onset_um >= grid.x_max() {
                        out.push(Violation::new(
                            "potential.cap.onset_um",
                            "absorbing layer starts outside the grid",
                        ));
                    }
                }
            }
        }

        if p.t_fwhm_ns > p.t_flat_ns && p.t_flat_ns >= 0.0 {
            let env = crate::pulse::Envelope::from_pulse(p, c);
            let edge = env
                .intensity(grid.x_min())
                .max(env.intensity(grid.x_max()));
            if edge > EDGE_INTENSITY_LIMIT {
                out.push(Violation::new(
                    "pulse",
                    format!(
                        "envelope wider than grid box: intensity {edge:.3e} at the box edge"
                    ),
                ));
            }
        }
    }

    let a = &config.analysis;
    for (name, w) in [
        ("analysis.plateau_window_ns", a.plateau_window_ns),
        ("analysis.rising_window_ns", a.rising_window_ns),
        ("analysis.falling_window_ns", a.falling_window_ns),
    ] {
        if !(w[0] < w[1]) {
            out.push(Violation::new(name, "window must satisfy start < end"));
        }
    }
    if !(a.frame_window_um[0] < a.frame_window_um[1]) || a.frame_points < 2 {
        out.push(Violation::new(
            "analysis.frame_window_um",
            "frame window needs start < end and at least 2 points",
        ));
    }
    if a.fit.is_some() && pot.coupled.is_none() {
        out.push(Violation::new(
            "analysis.fit",
            "relative-density fit needs two channels",
        ));
    }
    out
}
