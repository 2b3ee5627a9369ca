//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr,
//! visible without `--nocapture`.
//!
//! The full-size preset runs take most of the time; fig4 is run once and
//! shared by criteria 5 and 6.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use bohm_tunnel::analytic::{self, Regime, RegimeKind};
use bohm_tunnel::config::{
    AnalysisSpec, BarrierWidth, CouplingSpec, GridSpec, PhysicalConstants, PotentialSpec,
    PulseSpec, ScenarioConfig,
};
use bohm_tunnel::experiment::{self, FitOutcome, ProbeSummary, SimulationOptions, SimulationOutput};
use bohm_tunnel::grid::{Grid, WaveField};
use bohm_tunnel::observables;
use bohm_tunnel::presets::{self, PresetKind};
use bohm_tunnel::propagator::{self, Propagator};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "[{status}] criterion {id:>2}: {title} | {detail}"
    );
    assert!(pass, "criterion {id} ({title}) failed: {detail}");
}

fn within(got: f64, want: f64, rel: f64) -> bool {
    ((got - want) / want).abs() <= rel
}

fn simulate(name: &str) -> (SimulationOutput, Duration) {
    let cfg = presets::scenario(name).expect("preset exists");
    let start = Instant::now();
    let out = experiment::simulate(&cfg, SimulationOptions::default()).expect("run succeeds");
    (out, start.elapsed())
}

fn fig4() -> &'static SimulationOutput {
    static RUN: OnceLock<SimulationOutput> = OnceLock::new();
    RUN.get_or_init(|| simulate("fig4").0)
}

fn probe(out: &SimulationOutput, x: f64, channel: usize) -> &ProbeSummary {
    out.summary
        .probes
        .iter()
        .find(|p| p.x_um == x && p.channel == channel)
        .expect("probe present")
}

fn plateau_v(p: &ProbeSummary) -> f64 {
    p.plateau.mean_v_km_s.expect("plateau sampled")
}

/// Velocity of the whole two-channel beam, `Σj/Σρ`, averaged over the plateau.
fn beam_plateau_v(out: &SimulationOutput, probe_idx: usize) -> f64 {
    let w = out.summary.config.analysis.plateau_window_ns;
    let vs: Vec<f64> = out
        .times_ns
        .iter()
        .zip(&out.probes)
        .filter(|(t, _)| **t >= w[0] && **t <= w[1])
        .map(|(_, f)| {
            let chans = &f[probe_idx];
            let j: f64 = chans.iter().map(|s| s.j).sum();
            let rho: f64 = chans.iter().map(|s| s.rho).sum();
            j / rho
        })
        .collect();
    vs.iter().sum::<f64>() / vs.len() as f64
}

#[test]
fn criterion_01_above_barrier_steady_velocity() {
    let (out, elapsed) = simulate("fig2a");
    let v1 = plateau_v(probe(&out, 128.79, 0));
    let v2 = plateau_v(probe(&out, 256.30, 0));
    let fast = elapsed <= Duration::from_secs(600);
    let pass = within(v1, 2147.0, 0.02) && within(v2, 2147.0, 0.02) && fast;
    report(
        1,
        "fig2a plateau speed 2147 km/s ± 2%, runtime ≤ 10 min",
        pass,
        &format!(
            "v(128.79) = {v1:.2}, v(256.30) = {v2:.2} km/s, runtime {:.1} s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_evanescent_freezing() {
    let (out, _) = simulate("fig2c");
    let mut pass = true;
    let mut parts = Vec::new();
    for x in [0.35, 2.82, 8.45] {
        let p = probe(&out, x, 0);
        let abs = p.plateau.mean_abs_v_km_s.unwrap();
        let rise = p.rising.mean_v_km_s.unwrap();
        let fall = p.falling.mean_v_km_s.unwrap();
        pass &= abs <= 1.0 && rise > 0.0 && fall < 0.0;
        parts.push(format!("x={x}: |v|={abs:.3}, rise {rise:.1}, fall {fall:.1}"));
    }
    report(
        2,
        "fig2c plateau |v| ≤ 1 km/s with sign reversal",
        pass,
        &parts.join("; "),
    );
}

#[test]
fn criterion_03_dissipative_steady_flow() {
    let (out, _) = simulate("fig2d");
    let vs: Vec<f64> = [0.35, 2.82, 8.45]
        .iter()
        .map(|&x| plateau_v(probe(&out, x, 0)))
        .collect();
    let ratio = out.summary.balance.current_over_loss.unwrap();
    let pass = vs.iter().all(|&v| within(v, 13.0, 0.3)) && within(ratio, 1.0, 0.1);
    report(
        3,
        "fig2d plateau speed 13 km/s ± 30%, j_in ≈ ΓN within 10%",
        pass,
        &format!("v = {vs:.2?} km/s, j_in/(ΓN) = {ratio:.4}"),
    );
}

#[test]
fn criterion_04_slow_critical_relaxation() {
    let (out, _) = simulate("fig2b-long");
    let early = [71.7, 97.9, 126.7];
    let late = [34.3, 40.6, 47.1];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, x) in [0.39, 39.42, 78.45].into_iter().enumerate() {
        let p = probe(&out, x, 0);
        let at = |t: f64| {
            p.readouts
                .iter()
                .find(|r| r.t_ns == t)
                .and_then(|r| r.v_km_s)
                .expect("readout sampled")
        };
        let (a, b) = (at(1.61), at(4.73));
        pass &= within(a, early[i], 0.1) && within(b, late[i], 0.1);
        parts.push(format!("x={x}: {a:.1} -> {b:.1}"));
    }
    report(
        4,
        "fig2b-long readouts at 1.61 and 4.73 ns within 10%",
        pass,
        &parts.join("; "),
    );
}

#[test]
fn criterion_05_coupled_channel_plateaus() {
    let (b, _) = simulate("fig3b");
    let (c, _) = simulate("fig3c");
    let (e, _) = simulate("fig3e");
    let d = fig4();
    let vb: Vec<f64> = (0..2).map(|i| beam_plateau_v(&b, i)).collect();
    let vc: Vec<f64> = (0..2).map(|i| beam_plateau_v(&c, i)).collect();
    let ve: Vec<f64> = (0..3).map(|i| beam_plateau_v(&e, i)).collect();
    let d_max = d.summary.plateau_max_abs_v_km_s.unwrap();
    let pass = vb.iter().all(|&v| within(v, 2105.0, 0.05))
        && vc.iter().all(|&v| within(v, 1000.0, 0.1))
        && d_max <= 1.0
        && ve.iter().all(|&v| within(v, 10.0, 0.5));
    report(
        5,
        "fig3b ≈ 2105 ± 5%, fig3c ≈ 1000 ± 10%, fig3d |v| ≤ 1, fig3e ≈ 10 ± 50% km/s",
        pass,
        &format!("3b {vb:.1?}, 3c {vc:.1?}, 3d max|v| {d_max:.3}, 3e {ve:.2?}"),
    );
}

#[test]
fn criterion_06_spurious_fitted_speed() {
    let out = fig4();
    let fit = out.summary.fit.as_ref().expect("fit configured");
    let plateau = out.summary.plateau_max_abs_v_km_s.unwrap();
    let (pass, detail) = match &fit.outcome {
        FitOutcome::Fitted(r) => (
            within(r.v, 2292.0, 0.05)
                && (r.x0 - (-1.91)).abs() <= 0.3
                && r.r_squared >= 0.999
                && plateau <= 1.0,
            format!(
                "t = {:.3} ns, v = {:.1} km/s, x0 = {:.3} μm, R² = {:.5}, window {:?}, plateau max|v| = {plateau:.3}",
                fit.t_ns, r.v, r.x0, r.r_squared, r.window
            ),
        ),
        FitOutcome::Failed(why) => (false, format!("fit failed: {why}")),
    };
    report(
        6,
        "fig4 fit v = 2292 ± 5%, x0 = −1.91 ± 0.3 μm, R² ≥ 0.999",
        pass,
        &detail,
    );
}

/// `ψ` and `ψ'` basis in a region of constant potential: `e^{±iqx}`, or
/// `{1, x}` when `q = 0`. Rows are value and derivative.
fn basis(q: Complex64, x: f64) -> [[Complex64; 2]; 2] {
    let i = Complex64::new(0.0, 1.0);
    if q == Complex64::new(0.0, 0.0) {
        return [
            [Complex64::new(1.0, 0.0), Complex64::new(x, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ];
    }
    let up = (i * q * x).exp();
    let down = (-i * q * x).exp();
    [[up, down], [i * q * up, -i * q * down]]
}

fn solve2(m: [[Complex64; 2]; 2], rhs: [Complex64; 2]) -> [Complex64; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det,
    ]
}

/// Transfer-matrix reconstruction of the stationary state for a unit
/// transmitted wave, returning `v(x) = j/ρ` inside the barrier and the
/// left-side flux balance `|A|² − |R|²` with its scale `|A|²`.
fn transfer_matrix_velocity(
    e: f64,
    v0: f64,
    a: f64,
    x: f64,
    c: &PhysicalConstants,
) -> (f64, (f64, f64)) {
    let wavenumber = |kinetic: f64| {
        let s = (2.0 * c.mass() * kinetic.abs()).sqrt() / c.hbar();
        if kinetic.abs() < 1e-12 {
            Complex64::new(0.0, 0.0)
        } else if kinetic > 0.0 {
            Complex64::new(s, 0.0)
        } else {
            Complex64::new(0.0, s)
        }
    };
    let k = wavenumber(e);
    let q = wavenumber(e - v0);
    let right = basis(k, a);
    let psi_a = [right[0][0], right[1][0]];
    let coef = solve2(basis(q, a), psi_a);
    let inside = basis(q, x);
    let psi = coef[0] * inside[0][0] + coef[1] * inside[0][1];
    // Current is uniform, so it equals the transmitted flux ħk/m.
    let j = c.hbar() * k.re / c.mass();
    let v = j / psi.norm_sqr();

    let entry = basis(q, 0.0);
    let psi_0 = [
        coef[0] * entry[0][0] + coef[1] * entry[0][1],
        coef[0] * entry[1][0] + coef[1] * entry[1][1],
    ];
    let left = solve2(basis(k, 0.0), psi_0);
    let incident = left[0].norm_sqr();
    (v, (incident - left[1].norm_sqr(), incident))
}

fn oracle_check(
    e: f64,
    v0: f64,
    a: f64,
    frac: f64,
    c: &PhysicalConstants,
) -> Result<(), TestCaseError> {
    let regime: Regime = analytic::classify(e, v0, c).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let x = frac * a;
    let formula = analytic::steady_velocity(x, &regime, BarrierWidth::Finite(a))
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let (oracle, flux) = transfer_matrix_velocity(e, v0, a, x, c);
    prop_assert!((flux.0 - 1.0).abs() <= 1e-9 * flux.1, "flux balance {:?}", flux);
    prop_assert!(
        ((formula - oracle) / oracle).abs() <= 1e-9,
        "E={} V0={} a={} x={}: formula {} vs oracle {}",
        e,
        v0,
        a,
        x,
        formula,
        oracle
    );
    Ok(())
}

#[test]
fn criterion_07_oracle_equivalence() {
    let c = PhysicalConstants::standard();
    let mut runner = TestRunner::new(Config::with_cases(100));
    let below = runner.run(
        &(0.05f64..2.0, 0.02f64..0.98, 0.2f64..60.0, 0.0f64..=1.0),
        |(v0, ratio, a, frac)| oracle_check(ratio * v0, v0, a, frac, &c),
    );
    let above = runner.run(
        &(0.05f64..2.0, 1.02f64..3.0, 0.2f64..60.0, 0.0f64..=1.0),
        |(v0, ratio, a, frac)| oracle_check(ratio * v0, v0, a, frac, &c),
    );
    let critical = runner.run(
        &(0.05f64..2.0, 0.2f64..60.0, 0.0f64..=1.0),
        |(v0, a, frac)| oracle_check(v0, v0, a, frac, &c),
    );
    let pass = below.is_ok() && above.is_ok() && critical.is_ok();
    fn show<T: std::fmt::Debug>(r: &Result<(), proptest::test_runner::TestError<T>>) -> String {
        match r {
            Ok(()) => "ok".to_owned(),
            Err(e) => format!("{e}"),
        }
    }
    report(
        7,
        "closed-form velocity equals transfer-matrix j/ρ to 1e-9 (100 cases per regime)",
        pass,
        &format!(
            "below {}, above {}, critical {}",
            show(&below),
            show(&above),
            show(&critical)
        ),
    );
}

/// Small closed box with a finite barrier; no dissipation, no absorber.
fn hermitian(energy: f64, width: f64, coupled: bool, dt_ps: f64) -> ScenarioConfig {
    ScenarioConfig {
        name: "hermitian".into(),
        constants: PhysicalConstants::standard(),
        grid: GridSpec {
            x_min_mm: -0.8,
            x_max_mm: 0.8,
            n: 4096,
        },
        pulse: PulseSpec {
            energy,
            t_fwhm_ns: 0.03,
            t_flat_ns: 0.01,
            center_mm: -0.15,
        },
        potential: PotentialSpec {
            v0: 0.538,
            barrier_start_um: 0.0,
            barrier_width_um: BarrierWidth::Finite(width),
            gamma: 0.0,
            cap: None,
            coupled: coupled.then_some(CouplingSpec {
                wg2_prebarrier: 1.076,
                coupling_uev: 26.22,
                coupling_onset_um: 1.02,
            }),
        },
        dt_ps,
        t_end_ns: 0.05,
        probes_um: vec![1.0],
        frame_stride: 100,
        analysis: AnalysisSpec {
            plateau_window_ns: [0.02, 0.03],
            rising_window_ns: [0.0, 0.01],
            falling_window_ns: [0.04, 0.05],
            readout_times_ns: vec![],
            fit: None,
            frame_window_um: [-5.0, 25.0],
            frame_points: 4,
        },
    }
}

fn evolve_to(cfg: &ScenarioConfig) -> WaveField {
    propagator::evolve(cfg, |_, _| Ok(())).expect("run succeeds")
}

fn difference(a: &WaveField, b: &WaveField) -> f64 {
    let mut d = 0.0;
    for (ca, cb) in a.channels().iter().zip(b.channels()) {
        d += ca.iter().zip(cb).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>();
    }
    d.sqrt()
}

#[test]
fn criterion_08_numerical_integrity() {
    // Norm drift over random non-dissipative runs.
    let mut runner = TestRunner::new(Config::with_cases(8));
    let worst_drift = std::cell::Cell::new(0.0f64);
    let drift = runner.run(
        &(0.3f64..0.8, 2.0f64..40.0, any::<bool>()),
        |(energy, width, coupled)| {
            let cfg = hermitian(energy, width, coupled, 0.01);
            let out = experiment::simulate(&cfg, SimulationOptions::default())
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let d = out.summary.norm.max_relative_drift;
            worst_drift.set(worst_drift.get().max(d));
            prop_assert!(d <= 1e-10, "drift {}", d);
            Ok(())
        },
    );

    // Continuity: three Strang iterates a short step apart around t = 0.04 ns.
    let cfg = hermitian(0.438, 20.0, false, 0.01);
    let mut field = evolve_to(&ScenarioConfig {
        t_end_ns: 0.04,
        ..cfg.clone()
    });
    let grid = *field.grid();
    let h = 1e-8;
    let mut prop = Propagator::new(grid, &cfg.potential, &cfg.constants, h);
    let rho = |f: &WaveField| -> Vec<f64> {
        observables::density(f)
            .iter()
            .fold(vec![0.0; grid.n()], |acc, c| {
                acc.iter().zip(c).map(|(a, b)| a + b).collect()
            })
    };
    let before = rho(&field);
    prop.strang_step(&mut field).unwrap();
    let div_j = observables::current_divergence(&field, &cfg.constants)[0].clone();
    prop.strang_step(&mut field).unwrap();
    let after = rho(&field);
    let (residual, scale) = observables::continuity_residual(&before, &after, &div_j, h);
    let continuity = residual / scale;

    // Strang self-convergence on the probe velocity and on the field.
    let coarse = 0.004;
    let runs: Vec<(WaveField, f64)> = [coarse, coarse / 2.0, coarse / 4.0]
        .iter()
        .map(|&dt| {
            let c = hermitian(0.438, 20.0, false, dt);
            let out = experiment::simulate(
                &ScenarioConfig {
                    t_end_ns: 0.03,
                    ..c.clone()
                },
                SimulationOptions::default(),
            )
            .unwrap();
            let v = out.probes.last().unwrap()[0][0].v.unwrap();
            (
                evolve_to(&ScenarioConfig {
                    t_end_ns: 0.03,
                    ..c
                }),
                v,
            )
        })
        .collect();
    let order_field =
        (difference(&runs[0].0, &runs[1].0) / difference(&runs[1].0, &runs[2].0)).log2();
    let order_v = ((runs[0].1 - runs[1].1) / (runs[1].1 - runs[2].1)).abs().log2();

    // Plane wave through one kinetic half step.
    let big = Grid::new(-11540.0, 11540.0, 1 << 16).unwrap();
    let consts = PhysicalConstants::standard();
    let dt = 2.5e-5;
    let mut phase_err = 0.0f64;
    let mut kinetic = Propagator::new(
        big,
        &PotentialSpec {
            v0: 0.0,
            barrier_start_um: 0.0,
            barrier_width_um: BarrierWidth::Finite(1.0),
            gamma: 0.0,
            cap: None,
            coupled: None,
        },
        &consts,
        dt,
    );
    for m in [1i64, 17, 1000, 9999, -4321, 32767] {
        let k = 2.0 * PI * m as f64 / big.length();
        // Phase from the exact integer product m·i mod n, so the samples
        // carry no rounding from large k·x.
        let n = big.n() as i64;
        let samples = (0..n)
            .map(|i| Complex64::from_polar(1.0, 2.0 * PI * (m * i).rem_euclid(n) as f64 / n as f64))
            .collect();
        let start = WaveField::from_channels(big, vec![samples]).unwrap();
        let mut f = start.clone();
        kinetic.kinetic_half_step(&mut f).unwrap();
        let w = consts.hbar() * k * k * dt / (4.0 * consts.mass());
        let exact = Complex64::from_polar(1.0, -w);
        for (z, z0) in f.channel(0).iter().zip(start.channel(0)) {
            phase_err = phase_err.max((z / z0 - exact).norm());
        }
    }

    let pass = drift.is_ok()
        && continuity <= 1e-6
        && (order_field - 2.0).abs() <= 0.2
        && (order_v - 2.0).abs() <= 0.2
        && phase_err <= 1e-12;
    report(
        8,
        "norm drift ≤ 1e-10, continuity ≤ 1e-6, Strang order 2 ± 0.2, plane-wave phase ≤ 1e-12",
        pass,
        &format!(
            "worst drift {:.2e}{}, continuity {continuity:.2e}, order field {order_field:.3} probe-v {order_v:.3}, phase error {phase_err:.2e}",
            worst_drift.get(),
            if drift.is_ok() { String::new() } else { format!(" ({})", drift.unwrap_err()) }
        ),
    );
}

#[test]
fn criterion_09_width_dependence() {
    let PresetKind::WidthTable(spec) = presets::find("fig5c").unwrap().kind else {
        panic!("fig5c is a width table");
    };
    let dir = tempfile::tempdir().unwrap();
    experiment::write_width_table(&spec, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join(experiment::WIDTH_TABLE_FILE)).unwrap();

    // Eq. (2) from SI constants, independent of the crate's unit helpers.
    let mev = 1.602176634e-22;
    let hbar_si = 6.582119569e-4 * mev * 1e-9;
    let m = 6.95e-36;
    let v0_bar = spec.v0;
    let e = v0_bar + spec.detuning;
    let kappa = (2.0 * m * (v0_bar - e) * mev).sqrt() / hbar_si * 1e-6;
    let v_inc = (2.0 * e * mev / m).sqrt() * 1e-3;
    let eq2 = |x: f64, a: f64| {
        v_inc / (1.0 + v0_bar / spec.detuning.abs() * (kappa * (x - a)).sinh().powi(2))
    };

    let mut rows: Vec<(f64, f64, f64, f64)> = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        rows.push((f[0], f[1], f[2], f[3]));
    }
    let worst_rel = rows
        .iter()
        .map(|&(a, _, x, v)| ((v - eq2(x, a)) / eq2(x, a)).abs())
        .fold(0.0, f64::max);

    let mut monotone = true;
    let mut thin_limit = 0.0f64;
    for &frac in &spec.fractions {
        let series: Vec<&(f64, f64, f64, f64)> = rows.iter().filter(|r| r.1 == frac).collect();
        monotone &= series.windows(2).all(|w| w[1].3 < w[0].3);
        thin_limit = thin_limit.max((series[0].3 - v_inc).abs() / v_inc);
    }
    let regime = analytic::classify(e, v0_bar, &spec.constants).unwrap();
    let at = |a: f64, f: f64| analytic::steady_velocity(f * a, &regime, BarrierWidth::Finite(a)).unwrap();
    let to_v0 = spec.fractions.iter().all(|&f| (at(1e-6, f) - v_inc).abs() / v_inc < 1e-9);
    let to_zero = spec.fractions.iter().all(|&f| at(2000.0, f) / v_inc < 1e-12);
    let below = matches!(regime.kind, RegimeKind::Below { .. });

    let pass = below
        && rows.len() == spec.fractions.len() * spec.widths_um.len()
        && worst_rel <= 1e-12
        && monotone
        && thin_limit < 2e-3
        && to_v0
        && to_zero;
    report(
        9,
        "fig5c table: v → v0 as a → 0, v → 0 monotonically, Eq. (2) to 1e-12",
        pass,
        &format!(
            "{} rows, worst rel. deviation {worst_rel:.1e}, monotone {monotone}, |v(a=0.1)/v0 − 1| ≤ {thin_limit:.1e}",
            rows.len()
        ),
    );
}

#[test]
fn criterion_10_effective_potential_saturation() {
    let (out, _) = simulate("fig2c");
    let e = out.summary.config.pulse.energy;
    let w = out.summary.config.analysis.rising_window_ns;
    let mut pass = true;
    let mut parts = Vec::new();
    for (idx, x) in out.summary.config.probes_um.iter().enumerate() {
        if *x != 2.82 && *x != 8.45 {
            continue;
        }
        let p = probe(&out, *x, 0);
        let plateau = p.plateau.mean_v_eff_mev.unwrap();
        let edge: Vec<(f64, f64)> = out
            .times_ns
            .iter()
            .zip(&out.probes)
            .filter(|(t, _)| **t >= w[0] && **t <= w[1])
            .filter_map(|(t, f)| f[idx][0].v_eff.map(|v| (*t, v)))
            .collect();
        let n = edge.len() as f64;
        let (mt, mv) = edge.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / n, a.1 + p.1 / n));
        let slope = edge.iter().map(|p| (p.0 - mt) * (p.1 - mv)).sum::<f64>()
            / edge.iter().map(|p| (p.0 - mt).powi(2)).sum::<f64>();
        let rise = edge.last().unwrap().1 - edge[0].1;
        pass &= slope > 0.0 && rise > 0.0 && within(plateau, e, 0.05);
        parts.push(format!(
            "x={x}: edge rise {rise:.2e} meV (slope {slope:.2e} meV/ns), plateau Ṽ {plateau:.4} vs E {e}"
        ));
    }
    report(
        10,
        "fig2c Ṽ rises on the leading edge and saturates within 5% of E",
        pass,
        &parts.join("; "),
    );
}
