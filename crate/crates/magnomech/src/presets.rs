//! Named parameter sets and sweeps, one per figure panel.
//!
//! Every preset starts from [`SystemParams::baseline`] and pins the overrides
//! each panel needs. Panels that share parameters (an
//! absorption panel and its dispersion twin) resolve to the same run.

use magnomech_core::analysis::SweepParameter;
use magnomech_core::params::{hz, CouplingMode};
use magnomech_core::response::{linspace, DEFAULT_STEP_OVER_OMEGA_P};
use magnomech_core::{Complex64, SystemParams};

pub const DEFAULT_DELTA_POINTS: usize = 2001;
pub const DEFAULT_B_POINTS: usize = 41;
pub const DEFAULT_SWEEP_POINTS: usize = 201;

/// Magnon–photon and magnomechanical coupling used throughout the figures.
pub const FIGURE_COUPLING_HZ: f64 = 1.2e6;

/// B range of the magnon-number figures, in tesla. Below about 10 mT the
/// steady state is bistable and the ordering in f and G_au reverses.
pub const MAGNON_FIELD_RANGE: (f64, f64) = (10e-3, 50e-3);

/// Group-delay step for the weak-field panels, whose central window is a
/// few κ_p wide and needs a finer difference than the default step.
pub const NARROW_STEP_OVER_OMEGA_P: f64 = 1e-7;

/// Upper end of the τ-versus-f sweep, rad/s.
pub const TUNNELING_SWEEP_END: f64 = 21.09e6;

pub const NAMES: &[&str] = &[
    "fig2a", "fig2b", "fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f", "fig4a", "fig4b", "fig4c", "fig4d",
    "fig4e", "fig4f", "fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig7a", "fig7b", "fig8a", "fig8b",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub params: SystemParams,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Magnon number along a B grid (tesla).
    MagnonNumber { b_grid: Vec<f64> },
    /// Probe spectrum along a δ grid (rad/s), with the group-delay step in
    /// units of ω_p.
    Spectrum { delta_grid: Vec<f64>, step_over_omega_p: f64 },
    /// τ at fixed δ along a parameter grid.
    Delay {
        parameter: SweepParameter,
        values: Vec<f64>,
        fixed_delta: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    /// Shared parameters before the per-series override.
    pub template: SystemParams,
    pub series: Vec<Series>,
    pub sweep: Sweep,
}

/// Which couplings are switched on in a spectrum panel.
#[derive(Debug, Clone, Copy)]
enum Couplings {
    /// g₂ only.
    Single,
    /// g₂ and G_np.
    Double,
    /// g₁, g₂ and G_np.
    Triple,
}

fn with_couplings(mut p: SystemParams, c: Couplings) -> SystemParams {
    let g = hz(FIGURE_COUPLING_HZ);
    p.g2 = g;
    p.g1 = if matches!(c, Couplings::Triple) { g } else { 0.0 };
    let g_np = if matches!(c, Couplings::Single) { 0.0 } else { g };
    p.g_np_direct = Some(Complex64::new(g_np, 0.0));
    p
}

fn f_label(fraction: f64) -> String {
    format!("f={fraction}omega_p")
}

fn g_au_label(mhz: f64) -> String {
    format!("G_au={mhz}MHz")
}

fn f_series(template: &SystemParams, fractions: &[f64]) -> Vec<Series> {
    fractions
        .iter()
        .map(|&x| {
            let mut p = template.clone();
            p.f = x * p.omega_p;
            Series {
                label: f_label(x),
                params: p,
            }
        })
        .collect()
}

fn g_au_series(template: &SystemParams, mhz: &[f64]) -> Vec<Series> {
    mhz.iter()
        .map(|&g| {
            let mut p = template.clone();
            p.g_au = hz(g * 1e6);
            Series {
                label: g_au_label(g),
                params: p,
            }
        })
        .collect()
}

fn microscopic(mut p: SystemParams, b_field: f64) -> SystemParams {
    p.coupling_mode = CouplingMode::Microscopic;
    p.g_np = hz(1e-3);
    p.b_field = Some(b_field);
    p
}

/// Panels a/d: g₂ only; b/e: g₂ and G_np; c/f: all three.
fn panel_couplings(name: &str) -> Couplings {
    match name.as_bytes().last() {
        Some(b'a' | b'd') => Couplings::Single,
        Some(b'b' | b'e') => Couplings::Double,
        _ => Couplings::Triple,
    }
}

const F_FRACTIONS: [f64; 4] = [0.0, 0.1, 0.15, 0.2];
const G_AU_MHZ: [f64; 4] = [0.0, 3.0, 4.0, 6.0];

/// Resolves a preset. `points` overrides the number of grid points.
pub fn preset(name: &str, points: Option<usize>) -> Option<Preset> {
    let name: &'static str = NAMES.iter().copied().find(|n| *n == name)?;
    let base = SystemParams::baseline();
    let omega_p = base.omega_p;
    let delta_grid = || linspace(0.0, 2.0 * omega_p, points.unwrap_or(DEFAULT_DELTA_POINTS));
    let spectrum = || Sweep::Spectrum {
        delta_grid: delta_grid(),
        step_over_omega_p: DEFAULT_STEP_OVER_OMEGA_P,
    };
    let panel = |c: Couplings| with_couplings(base.clone(), c);

    let (description, template, series, sweep): (&'static str, SystemParams, Vec<Series>, Sweep) =
        match name {
            "fig2a" | "fig2b" => {
                let mut t = microscopic(base.clone(), MAGNON_FIELD_RANGE.0);
                t.g1 = hz(FIGURE_COUPLING_HZ);
                t.g2 = hz(FIGURE_COUPLING_HZ);
                let b_grid = linspace(
                    MAGNON_FIELD_RANGE.0,
                    MAGNON_FIELD_RANGE.1,
                    points.unwrap_or(DEFAULT_B_POINTS),
                );
                if name == "fig2a" {
                    let series = f_series(&t, &F_FRACTIONS);
                    ("magnon number versus B for several f", t, series, Sweep::MagnonNumber { b_grid })
                } else {
                    t.f = 0.15 * omega_p;
                    let series = g_au_series(&t, &G_AU_MHZ);
                    ("magnon number versus B for several G_au", t, series, Sweep::MagnonNumber { b_grid })
                }
            }
            "fig3a" | "fig3b" | "fig3c" | "fig3d" | "fig3e" | "fig3f" => {
                let couplings = panel_couplings(name);
                let mut t = panel(couplings);
                t.g_au = 0.0;
                let series = f_series(&t, &F_FRACTIONS);
                ("output field versus delta for several f, G_au = 0", t, series, spectrum())
            }
            "fig4a" | "fig4b" | "fig4c" | "fig4d" | "fig4e" | "fig4f" => {
                let couplings = panel_couplings(name);
                let mut t = panel(couplings);
                t.f = 0.15 * omega_p;
                let series = g_au_series(&t, &G_AU_MHZ);
                ("output field versus delta for several G_au, f = 0.15 omega_p", t, series, spectrum())
            }
            "fig5a" | "fig5b" | "fig5c" => {
                let b_field = match name {
                    "fig5a" => 0.02e-3,
                    "fig5b" => 0.033e-3,
                    _ => 0.05e-3,
                };
                let mut t = microscopic(panel(Couplings::Triple), b_field);
                t.g_au = 0.0;
                let series = f_series(&t, &F_FRACTIONS);
                let sweep = Sweep::Spectrum {
                    delta_grid: delta_grid(),
                    step_over_omega_p: NARROW_STEP_OVER_OMEGA_P,
                };
                ("absorption versus delta for several f at fixed B, microscopic coupling", t, series, sweep)
            }
            "fig6a" => {
                let mut t = panel(Couplings::Triple);
                t.g_au = 0.0;
                t.set_magnon_detuning(0.8 * omega_p);
                let series = f_series(&t, &F_FRACTIONS);
                ("Fano lineshapes for several f, magnon detuning 0.8 omega_p", t, series, spectrum())
            }
            "fig6b" => {
                let mut t = panel(Couplings::Triple);
                t.f = 0.15 * omega_p;
                t.set_magnon_detuning(0.8 * omega_p);
                let series = g_au_series(&t, &G_AU_MHZ);
                ("Fano lineshapes for several G_au, magnon detuning 0.8 omega_p", t, series, spectrum())
            }
            "fig7a" => {
                let mut t = panel(Couplings::Triple);
                t.g_au = 0.0;
                let series = f_series(&t, &[0.0, 0.1, 0.2, 0.3, 0.35]);
                ("transmission and group delay versus delta for several f", t, series, spectrum())
            }
            "fig7b" => {
                let mut t = panel(Couplings::Triple);
                t.f = 0.15 * omega_p;
                let series = g_au_series(&t, &[0.0, 1.5, 3.0]);
                ("transmission and group delay versus delta for several G_au", t, series, spectrum())
            }
            "fig8a" => {
                let mut t = panel(Couplings::Double);
                t.g_au = 0.0;
                let series = g_au_series(&t, &[0.0, 1.5, 3.0]);
                let values = linspace(0.0, TUNNELING_SWEEP_END, points.unwrap_or(DEFAULT_SWEEP_POINTS));
                let sweep = Sweep::Delay {
                    parameter: SweepParameter::F,
                    values,
                    fixed_delta: omega_p,
                };
                ("group delay at delta = omega_p versus f", t, series, sweep)
            }
            "fig8b" => {
                let t = panel(Couplings::Double);
                let series = f_series(&t, &[0.0, 0.15, 0.3]);
                let values = linspace(0.0, hz(6e6), points.unwrap_or(DEFAULT_SWEEP_POINTS));
                let sweep = Sweep::Delay {
                    parameter: SweepParameter::GAu,
                    values,
                    fixed_delta: omega_p,
                };
                ("group delay at delta = omega_p versus G_au", t, series, sweep)
            }
            _ => return None,
        };
    Some(Preset {
        name,
        description,
        template,
        series,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves_and_validates() {
        for name in NAMES {
            let p = preset(name, None).unwrap_or_else(|| panic!("{name}"));
            assert_eq!(&p.name, name);
            p.template.validate().unwrap();
            assert!(!p.series.is_empty());
            for s in &p.series {
                s.params.validate().unwrap_or_else(|e| panic!("{name} {}: {e}", s.label));
            }
        }
        assert!(preset("fig9", None).is_none());
    }

    #[test]
    fn panel_overrides() {
        let p = preset("fig6b", None).unwrap();
        let s = &p.series[3].params;
        assert_eq!(s.delta_n1, 0.8 * s.omega_p);
        assert_eq!(s.delta_n2, 0.8 * s.omega_p);
        assert_eq!(s.g_au, hz(6e6));
        assert_eq!(s.f, 0.15 * s.omega_p);

        let p = preset("fig8a", None).unwrap();
        assert_eq!(p.template.g1, 0.0);
        assert!(matches!(p.sweep, Sweep::Delay { fixed_delta, .. } if fixed_delta == p.template.omega_p));
    }

    #[test]
    fn grid_override() {
        match preset("fig3c", Some(501)).unwrap().sweep {
            Sweep::Spectrum { delta_grid, .. } => assert_eq!(delta_grid.len(), 501),
            other => panic!("{other:?}"),
        }
    }
}
