//! Running a scenario end to end: evolve, sample probes and frames, reduce
//! to window statistics, and write `frames.csv`, `probes.csv` and
//! `summary.json`.
//!
//! Outputs depend only on the config, so reruns are byte-identical.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analytic;
use crate::config::{BarrierWidth, ScenarioConfig};
use crate::error::{Error, Result};
use crate::fit::{self, ContrastReport, FitResult};
use crate::observables::{self, DerivativeMethod, DwellEstimate, FrameBuilder, ProbeSample};
use crate::presets::WidthTableSpec;
use crate::propagator;

pub const FRAMES_FILE: &str = "frames.csv";
pub const PROBES_FILE: &str = "probes.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const WIDTH_TABLE_FILE: &str = "width_table.csv";

/// Header shared by `frames.csv` and `probes.csv`. Densities are relative to
/// the initial peak intensity.
pub const SAMPLE_COLUMNS: [&str; 8] = [
    "t_ns",
    "x_um",
    "channel_idx",
    "rho_rel",
    "j_rel_km_s",
    "v_km_s",
    "q_meV",
    "v_eff_meV",
];

pub use crate::analytic::WIDTH_TABLE_COLUMNS;

#[derive(Debug, Clone, Copy, Default)]
pub struct SimulationOptions {
    /// Keep the sampled frame window at every emitted step.
    pub record_frames: bool,
}

/// ρ̃₂ over the barrier at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeDensitySnapshot {
    pub t_ns: f64,
    pub x_um: Vec<f64>,
    pub rho_tilde: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub times_ns: Vec<f64>,
    /// `[time][probe][channel]`.
    pub probes: Vec<Vec<Vec<ProbeSample>>>,
    pub frame_x_um: Vec<f64>,
    /// `[time][point][channel]`; empty unless frames were recorded.
    pub frames: Vec<Vec<Vec<ProbeSample>>>,
    /// `[time][channel]`.
    pub norms: Vec<Vec<f64>>,
    /// Probability inside the barrier region, per time.
    pub barrier_population: Vec<f64>,
    /// Current through the barrier entrance summed over channels, per time.
    pub entrance_current: Vec<f64>,
    pub snapshot: Option<RelativeDensitySnapshot>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowStats {
    pub window_ns: [f64; 2],
    pub samples: usize,
    pub mean_v_km_s: Option<f64>,
    pub mean_abs_v_km_s: Option<f64>,
    pub min_v_km_s: Option<f64>,
    pub max_v_km_s: Option<f64>,
    pub std_v_km_s: Option<f64>,
    #[serde(rename = "mean_v_eff_meV")]
    pub mean_v_eff_mev: Option<f64>,
    pub mean_rho_rel: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Readout {
    pub t_ns: f64,
    pub t_sampled_ns: f64,
    pub v_km_s: Option<f64>,
    #[serde(rename = "v_eff_meV")]
    pub v_eff_mev: Option<f64>,
    pub rho_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub x_um: f64,
    pub channel: usize,
    pub plateau: WindowStats,
    pub rising: WindowStats,
    pub falling: WindowStats,
    pub readouts: Vec<Readout>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSummary {
    pub initial: f64,
    pub last: f64,
    pub max_relative_drift: f64,
    pub last_per_channel: Vec<f64>,
}

/// Plateau-window particle balance in the barrier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceSummary {
    pub window_ns: [f64; 2],
    pub region_um: [f64; 2],
    pub population_rel_um: f64,
    pub entrance_current_rel_km_s: f64,
    /// `Γ·N`.
    pub loss_rate_rel_km_s: f64,
    /// `j_in/(Γ·N)`; absent without dissipation.
    pub current_over_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    #[serde(rename = "energy_meV")]
    pub energy_mev: f64,
    #[serde(rename = "detuning_meV")]
    pub detuning_mev: f64,
    pub v0_km_s: f64,
    pub dx_um: f64,
    pub n_steps: usize,
    pub n_frames: usize,
    pub channels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitOutcome {
    Fitted(FitResult),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitSummary {
    pub t_ns: f64,
    pub coupling_rate_per_ns: f64,
    pub outcome: FitOutcome,
    pub contrast: Option<ContrastReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DwellSummary {
    pub t_ns: f64,
    pub estimate: DwellEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub name: String,
    pub config: ScenarioConfig,
    pub derived: Derived,
    pub probes: Vec<ProbeSummary>,
    /// Mean of the per-probe plateau means over all probes and channels.
    pub plateau_mean_v_km_s: Option<f64>,
    /// Largest per-probe plateau mean |v|.
    pub plateau_max_abs_v_km_s: Option<f64>,
    pub norm: NormSummary,
    pub balance: BalanceSummary,
    pub dwell: Option<DwellSummary>,
    pub fit: Option<FitSummary>,
}

/// `[start, end]` over which the barrier population is integrated.
pub fn barrier_region(config: &ScenarioConfig) -> Result<(f64, f64)> {
    let p = &config.potential;
    let start = p.barrier_start_um;
    let end = match p.barrier_width_um {
        BarrierWidth::Finite(a) => start + a,
        BarrierWidth::SemiInfinite => match p.cap {
            Some(cap) => cap.onset_um,
            None => config.grid()?.x_max(),
        },
    };
    Ok((start, end))
}

fn frame_positions(config: &ScenarioConfig) -> Vec<f64> {
    let [lo, hi] = config.analysis.frame_window_um;
    analytic::linspace(lo, hi, config.analysis.frame_points)
}

fn near(t: f64, target: f64, spacing: f64) -> bool {
    (t - target).abs() <= 0.5 * spacing + 1e-12
}

/// Evolves `config` and collects every sampled observable.
pub fn simulate(config: &ScenarioConfig, options: SimulationOptions) -> Result<SimulationOutput> {
    if let Err(v) = config.validate() {
        return Err(Error::InvalidConfig(v));
    }
    let grid = config.grid()?;
    let constants = config.constants;
    let potential = config.potential;
    let region = barrier_region(config)?;
    let v0 = config.pulse.group_speed(&constants);
    let frame_spacing = config.frame_stride as f64 * config.dt_ns();

    let frame_x = frame_positions(config);
    let n_probes = config.probes_um.len();
    let mut xs = config.probes_um.clone();
    xs.push(region.0);
    if options.record_frames {
        xs.extend_from_slice(&frame_x);
    }
    let snap_range: Vec<usize> = (0..grid.n())
        .filter(|&i| {
            let x = grid.x(i);
            x >= potential.barrier_start_um && x <= config.analysis.frame_window_um[1]
        })
        .collect();

    let plateau = config.analysis.plateau_window_ns;
    let dwell_t = 0.5 * (plateau[0] + plateau[1]);
    let fit_t = config.analysis.fit.as_ref().map(|f| f.time_ns);

    let mut builder = FrameBuilder::new(
        grid,
        &constants,
        &potential,
        &[],
        DerivativeMethod::Spectral,
    );
    let mut times = Vec::new();
    let mut probes = Vec::new();
    let mut frames = Vec::new();
    let mut norms = Vec::new();
    let mut population = Vec::new();
    let mut entrance = Vec::new();
    let mut snapshot: Option<RelativeDensitySnapshot> = None;
    let mut dwell: Option<DwellSummary> = None;

    propagator::evolve(config, |field, t| {
        let mut s = builder.sample(field, &xs);
        let rest = s.split_off(n_probes);
        entrance.push(rest[0].iter().map(|c| c.j).sum::<f64>());
        if options.record_frames {
            frames.push(rest[1..].to_vec());
        }
        probes.push(s);
        times.push(t);
        norms.push(field.channel_norms());
        population.push(grid.integrate(region.0, region.1, |i| {
            field.channels().iter().map(|c| c[i].norm_sqr()).sum::<f64>()
        }));
        if dwell.is_none() && near(t, dwell_t, frame_spacing) {
            let frame = builder.frame(field, t);
            dwell = Some(DwellSummary {
                t_ns: t,
                estimate: observables::dwell_estimate(&frame, &grid, region, v0),
            });
        }
        if let Some(ft) = fit_t {
            if snapshot.is_none() && near(t, ft, frame_spacing) {
                let rt = observables::relative_density(field)?;
                snapshot = Some(RelativeDensitySnapshot {
                    t_ns: t,
                    x_um: snap_range.iter().map(|&i| grid.x(i)).collect(),
                    rho_tilde: snap_range.iter().map(|&i| rt[i]).collect(),
                });
            }
        }
        Ok(())
    })?;

    let mut out = SimulationOutput {
        times_ns: times,
        probes,
        frame_x_um: if options.record_frames { frame_x } else { vec![] },
        frames,
        norms,
        barrier_population: population,
        entrance_current: entrance,
        snapshot,
        summary: Summary {
            name: config.name.clone(),
            config: config.clone(),
            derived: Derived {
                energy_mev: config.pulse.energy,
                detuning_mev: config.detuning(),
                v0_km_s: v0,
                dx_um: grid.dx(),
                n_steps: config.n_steps(),
                n_frames: 0,
                channels: config.channels(),
            },
            probes: vec![],
            plateau_mean_v_km_s: None,
            plateau_max_abs_v_km_s: None,
            norm: NormSummary {
                initial: 0.0,
                last: 0.0,
                max_relative_drift: 0.0,
                last_per_channel: vec![],
            },
            balance: BalanceSummary {
                window_ns: plateau,
                region_um: [region.0, region.1],
                population_rel_um: 0.0,
                entrance_current_rel_km_s: 0.0,
                loss_rate_rel_km_s: 0.0,
                current_over_loss: None,
            },
            dwell,
            fit: None,
        },
    };
    summarize(config, &mut out);
    Ok(out)
}

fn window_stats(times: &[f64], samples: &[&ProbeSample], window: [f64; 2]) -> WindowStats {
    let picked: Vec<&ProbeSample> = times
        .iter()
        .zip(samples)
        .filter(|(t, _)| **t >= window[0] && **t <= window[1])
        .map(|(_, s)| *s)
        .collect();
    let v: Vec<f64> = picked.iter().filter_map(|s| s.v).collect();
    let ve: Vec<f64> = picked.iter().filter_map(|s| s.v_eff).collect();
    let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
    let mv = mean(&v);
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let rho: Vec<f64> = picked.iter().map(|s| s.rho).collect();
    WindowStats {
        window_ns: window,
        samples: v.len(),
        mean_v_km_s: mv,
        mean_abs_v_km_s: mean(&abs),
        min_v_km_s: v.iter().copied().reduce(f64::min),
        max_v_km_s: v.iter().copied().reduce(f64::max),
        std_v_km_s: mv.map(|m| {
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        }),
        mean_v_eff_mev: mean(&ve),
        mean_rho_rel: mean(&rho),
    }
}

fn nearest_index(times: &[f64], t: f64) -> usize {
    times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map_or(0, |(i, _)| i)
}

fn summarize(config: &ScenarioConfig, out: &mut SimulationOutput) {
    let a = &config.analysis;
    let times = &out.times_ns;
    let s = &mut out.summary;
    s.derived.n_frames = times.len();

    for (p, &x) in config.probes_um.iter().enumerate() {
        for c in 0..config.channels() {
            let series: Vec<&ProbeSample> = out.probes.iter().map(|f| &f[p][c]).collect();
            let readouts = a
                .readout_times_ns
                .iter()
                .map(|&t| {
                    let i = nearest_index(times, t);
                    Readout {
                        t_ns: t,
                        t_sampled_ns: times[i],
                        v_km_s: series[i].v,
                        v_eff_mev: series[i].v_eff,
                        rho_rel: series[i].rho,
                    }
                })
                .collect();
            s.probes.push(ProbeSummary {
                x_um: x,
                channel: c,
                plateau: window_stats(times, &series, a.plateau_window_ns),
                rising: window_stats(times, &series, a.rising_window_ns),
                falling: window_stats(times, &series, a.falling_window_ns),
                readouts,
            });
        }
    }
    let means: Vec<f64> = s.probes.iter().filter_map(|p| p.plateau.mean_v_km_s).collect();
    if !means.is_empty() {
        s.plateau_mean_v_km_s = Some(means.iter().sum::<f64>() / means.len() as f64);
    }
    s.plateau_max_abs_v_km_s = s
        .probes
        .iter()
        .filter_map(|p| p.plateau.mean_abs_v_km_s)
        .reduce(f64::max);

    let totals: Vec<f64> = out.norms.iter().map(|n| n.iter().sum()).collect();
    let initial = totals.first().copied().unwrap_or(0.0);
    s.norm = NormSummary {
        initial,
        last: totals.last().copied().unwrap_or(0.0),
        max_relative_drift: totals
            .iter()
            .map(|n| ((n - initial) / initial).abs())
            .fold(0.0, f64::max),
        last_per_channel: out.norms.last().cloned().unwrap_or_default(),
    };

    let w = a.plateau_window_ns;
    let idx: Vec<usize> = (0..times.len())
        .filter(|&i| times[i] >= w[0] && times[i] <= w[1])
        .collect();
    if !idx.is_empty() {
        let n = idx.len() as f64;
        let pop = idx.iter().map(|&i| out.barrier_population[i]).sum::<f64>() / n;
        let jin = idx.iter().map(|&i| out.entrance_current[i]).sum::<f64>() / n;
        let gamma = config.potential.gamma;
        s.balance.population_rel_um = pop;
        s.balance.entrance_current_rel_km_s = jin;
        s.balance.loss_rate_rel_km_s = gamma * pop;
        s.balance.current_over_loss = (gamma > 0.0 && pop > 0.0).then(|| jin / (gamma * pop));
    }

    if let (Some(spec), Some(cp)) = (&a.fit, config.potential.coupled) {
        let c0 = cp.coupling_rate(&config.constants);
        let (t, outcome) = match &out.snapshot {
            None => (spec.time_ns, FitOutcome::Failed("fit time was never sampled".into())),
            Some(snap) => {
                let window = spec.window_um.or_else(|| {
                    fit::default_window(&snap.x_um, &snap.rho_tilde, cp.coupling_onset_um)
                });
                let outcome = match window {
                    None => FitOutcome::Failed(
                        "relative density never reaches the default window level".into(),
                    ),
                    Some(w) => match fit::fit_relative_density(&snap.x_um, &snap.rho_tilde, c0, w) {
                        Ok(r) => FitOutcome::Fitted(r),
                        Err(e) => FitOutcome::Failed(e.to_string()),
                    },
                };
                (snap.t_ns, outcome)
            }
        };
        let contrast = match (&outcome, s.plateau_mean_v_km_s) {
            (FitOutcome::Fitted(r), Some(v)) => Some(fit::contrast_report(r, v)),
            _ => None,
        };
        s.fit = Some(FitSummary {
            t_ns: t,
            coupling_rate_per_ns: c0,
            outcome,
            contrast,
        });
    }
}

/// Shortest round-trip form, with exponents for very small or large values.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, num)
}

fn sample_record(t: f64, x: f64, c: usize, s: &ProbeSample) -> [String; 8] {
    [
        num(t),
        num(x),
        c.to_string(),
        num(s.rho),
        num(s.j),
        opt(s.v),
        opt(s.q),
        opt(s.v_eff),
    ]
}

fn write_samples<W: Write>(
    out: W,
    times: &[f64],
    xs: &[f64],
    data: &[Vec<Vec<ProbeSample>>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SAMPLE_COLUMNS)?;
    for (t, frame) in times.iter().zip(data) {
        for (x, chans) in xs.iter().zip(frame) {
            for (c, s) in chans.iter().enumerate() {
                w.write_record(sample_record(*t, *x, c, s))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_probes<W: Write>(out: &SimulationOutput, w: W) -> Result<()> {
    write_samples(w, &out.times_ns, &out.summary.config.probes_um, &out.probes)
}

pub fn write_frames<W: Write>(out: &SimulationOutput, w: W) -> Result<()> {
    write_samples(w, &out.times_ns, &out.frame_x_um, &out.frames)
}

pub fn summary_json(summary: &Summary) -> Result<String> {
    let mut s = serde_json::to_string_pretty(summary)?;
    s.push('\n');
    Ok(s)
}

/// Writes `frames.csv`, `probes.csv` and `summary.json` into `dir`.
pub fn write_outputs(out: &SimulationOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_frames(out, BufWriter::new(fs::File::create(dir.join(FRAMES_FILE))?))?;
    write_probes(out, BufWriter::new(fs::File::create(dir.join(PROBES_FILE))?))?;
    fs::write(dir.join(SUMMARY_FILE), summary_json(&out.summary)?)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct WidthTableSummary<'a> {
    name: &'a str,
    config: &'a WidthTableSpec,
    v0_km_s: f64,
    rows: usize,
}

/// Writes `width_table.csv` and `summary.json` for an analytic table.
pub fn write_width_table(spec: &WidthTableSpec, dir: &Path) -> Result<()> {
    let rows = spec.rows()?;
    fs::create_dir_all(dir)?;
    let file = fs::File::create(dir.join(WIDTH_TABLE_FILE))?;
    analytic::write_width_table_csv(&rows, BufWriter::new(file))?;
    let summary = WidthTableSummary {
        name: &spec.name,
        config: spec,
        v0_km_s: spec.constants.speed(spec.v0 + spec.detuning),
        rows: rows.len(),
    };
    let mut s = serde_json::to_string_pretty(&summary)?;
    s.push('\n');
    fs::write(dir.join(SUMMARY_FILE), s)?;
    Ok(())
}
