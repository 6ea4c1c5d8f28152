//! Parallel evaluation of spectra, sweeps and presets.

use rayon::prelude::*;

use magnomech_core::analysis::{
    delay_sign_crossings, evaluate_combination, find_windows, CrossingReport, SweepSpec, TaggedSpectrum,
};
use magnomech_core::response::{response_point, Spectrum};
use magnomech_core::steady::{magnon_number_sweep, magnon_number_sweep_with, steady_state, MagnonSweep, SolverSettings};
use magnomech_core::{Result, SystemParams, TAU};

use crate::csv::{self, Table};
use crate::presets::{Preset, Sweep};

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "MAGNOMECH_THREADS";

#[derive(Debug, thiserror::Error)]
#[error("{THREADS_VAR} must be a positive integer (got `{0}`)")]
pub struct BadThreadCount(String);

/// A worker pool sized by [`THREADS_VAR`], or rayon's default when unset.
pub fn thread_pool() -> std::result::Result<rayon::ThreadPool, BadThreadCount> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var(THREADS_VAR) {
        let n: usize = raw
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| BadThreadCount(raw.clone()))?;
        builder = builder.num_threads(n);
    }
    Ok(builder.build().expect("thread pool"))
}

/// Spectrum over `grid` (rad/s) with group-delay step `step`, δ points
/// evaluated in parallel.
pub fn spectrum(params: &SystemParams, grid: &[f64], step: f64) -> Result<Spectrum> {
    let state = steady_state(params)?;
    let points = grid
        .par_iter()
        .map(|&d| response_point(params, &state, d, step))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { points })
}

/// Magnon-number sweep; without warm starts the points are independent and
/// solved in parallel.
pub fn magnon_sweep(params: &SystemParams, b_grid: &[f64], warm_start: bool) -> Result<MagnonSweep> {
    if warm_start {
        return magnon_number_sweep(params, b_grid);
    }
    let points = b_grid
        .par_iter()
        .map(|&b| {
            let sweep = magnon_number_sweep_with(params, &[b], &SolverSettings::default(), false)?;
            Ok(sweep.points.into_iter().next().expect("one point per field"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MagnonSweep::from_points(points))
}

/// All combinations of a sweep, evaluated in parallel, in combination order.
pub fn sweep(params: &SystemParams, spec: &SweepSpec) -> Result<Vec<TaggedSpectrum>> {
    spec.combinations()?
        .par_iter()
        .map(|tags| evaluate_combination(params, tags, &spec.delta_grid))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetResults {
    Magnon(Vec<MagnonSweep>),
    Spectra(Vec<Spectrum>),
    Delay(Vec<CrossingReport>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetRun {
    pub csv: String,
    /// Sign crossings of τ, for delay presets.
    pub crossings_csv: Option<String>,
    pub summary: Vec<String>,
    pub results: PresetResults,
}

pub fn run_preset(preset: &Preset, prominence: f64) -> Result<PresetRun> {
    let omega_p = preset.template.omega_p;
    let mut summary = Vec::new();
    match &preset.sweep {
        Sweep::MagnonNumber { b_grid } => {
            let sweeps = preset
                .series
                .par_iter()
                .map(|s| magnon_number_sweep(&s.params, b_grid))
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(csv::STEADY_HEADER, true);
            for (s, sweep) in preset.series.iter().zip(&sweeps) {
                csv::steady_rows(&mut table, &s.label, sweep);
                let first = sweep.points.first().map_or(0.0, |p| p.state.magnon_number);
                let last = sweep.points.last().map_or(0.0, |p| p.state.magnon_number);
                summary.push(format!(
                    "{}: magnon number {first:.6e} .. {last:.6e}, strictly increasing: {}, jumps: {}",
                    s.label,
                    sweep.strictly_increasing,
                    sweep.jumps.len()
                ));
            }
            Ok(PresetRun {
                csv: table.finish(),
                crossings_csv: None,
                summary,
                results: PresetResults::Magnon(sweeps),
            })
        }
        Sweep::Spectrum {
            delta_grid,
            step_over_omega_p,
        } => {
            let spectra = preset
                .series
                .iter()
                .map(|s| spectrum(&s.params, delta_grid, step_over_omega_p * s.params.omega_p))
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(csv::SPECTRUM_HEADER, true);
            for (s, spec) in preset.series.iter().zip(&spectra) {
                csv::spectrum_rows(&mut table, &s.label, spec, omega_p);
                let report = find_windows(&spec.deltas(), &spec.absorption(), prominence)?;
                let centers: Vec<String> = report
                    .windows
                    .iter()
                    .map(|w| format!("{:.4}", w.center_delta / omega_p))
                    .collect();
                summary.push(format!(
                    "{}: {} transparency windows at delta/omega_p = [{}], max Richardson {:.2e}",
                    s.label,
                    report.count(),
                    centers.join(", "),
                    spec.max_richardson()
                ));
            }
            Ok(PresetRun {
                csv: table.finish(),
                crossings_csv: None,
                summary,
                results: PresetResults::Spectra(spectra),
            })
        }
        Sweep::Delay {
            parameter,
            values,
            fixed_delta,
        } => {
            let reports = preset
                .series
                .par_iter()
                .map(|s| delay_sign_crossings(&s.params, *parameter, values, *fixed_delta))
                .collect::<Result<Vec<_>>>()?;
            let mut table = Table::new(csv::DELAY_SWEEP_HEADER, true);
            let mut crossings = Table::new(csv::CROSSINGS_HEADER, true);
            for (s, report) in preset.series.iter().zip(&reports) {
                csv::delay_sweep_rows(&mut table, &s.label, parameter.name(), &report.samples);
                csv::crossing_rows(&mut crossings, &s.label, report);
                summary.extend(crossing_summary(&s.label, report));
            }
            Ok(PresetRun {
                csv: table.finish(),
                crossings_csv: Some(crossings.finish()),
                summary,
                results: PresetResults::Delay(reports),
            })
        }
    }
}

/// One line per crossing with the value in both unit conventions.
pub fn crossing_summary(label: &str, report: &CrossingReport) -> Vec<String> {
    let name = report.parameter.name();
    let mut lines: Vec<String> = report
        .crossings
        .iter()
        .map(|c| {
            format!(
                "{label}: tau {} at {name} = {:.6e} rad/s (as nu = omega/2pi: {:.6e} Hz)",
                c.direction.as_str(),
                c.parameter_value,
                c.parameter_value / TAU
            )
        })
        .collect();
    if report.crossings.is_empty() {
        let all_positive = report.samples.iter().all(|(_, g)| g.tau > 0.0);
        lines.push(format!("{label}: no tau sign crossing (tau > 0 throughout: {all_positive})"));
    }
    for (lo, hi) in &report.invalidated {
        lines.push(format!("{label}: crossing in [{lo:.6e}, {hi:.6e}] discarded, tau unreliable"));
    }
    lines
}
