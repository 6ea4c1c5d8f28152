//! Zero-order (steady-state) solution of the driven system.
//!
//! The magnon amplitude obeys
//!
//! ```text
//! n2s = B·Ω / [B·(κ_n2 + iΔ̃_n2) + A·g2²·(κ_n1 + iΔ_n1)]
//! A   = (κ_a + iΔ2)(γ_u + iΔ_u) + G_au²
//! B   = A(κ_a + iΔ1)(κ_n1 + iΔ_n1) + g1²A + f²(γ_u + iΔ_u)(κ_n1 + iΔ_n1)
//! ```
//!
//! where Δ̃_n2 = Δ_n2 + 2 g_np Re(p_s) depends on |n2s|² through the phonon
//! displacement p_s. We iterate on x = |n2s|².

use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{CouplingMode, SystemParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Steady amplitudes of all six modes plus the derived effective coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub a1s: Complex64,
    pub a2s: Complex64,
    pub n1s: Complex64,
    pub n2s: Complex64,
    pub us: Complex64,
    pub ps: Complex64,
    /// Magnomechanically shifted magnon detuning Δ̃_{n₂}.
    pub delta_n2_eff: f64,
    /// G_np = i√2·g_np·n2s (or the configured value in effective mode).
    pub g_np_eff: Complex64,
    /// |n2s|².
    pub magnon_number: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl SteadyState {
    /// Effective-mode embedding: no self-consistency, `G_np` taken as given
    /// and Δ̃_{n₂} = Δ_{n₂}.
    pub fn effective(params: &SystemParams) -> Result<Self> {
        let g = params.g_np_direct.ok_or(Error::MissingForMode {
            key: "G_np_hz",
            mode: "effective",
        })?;
        let zero = Complex64::new(0.0, 0.0);
        Ok(SteadyState {
            a1s: zero,
            a2s: zero,
            n1s: zero,
            n2s: zero,
            us: zero,
            ps: zero,
            delta_n2_eff: params.delta_n2,
            g_np_eff: g,
            magnon_number: 0.0,
            iterations: 0,
            residual: 0.0,
        })
    }

    /// G_A = G_np/√2.
    pub fn g_a(&self) -> Complex64 {
        self.g_np_eff / SQRT_2
    }

    /// The product g_np·n2s that multiplies the phonon quadrature in the
    /// linearized equations. Equals −i·G_A.
    pub fn coupling_product(&self) -> Complex64 {
        -I * self.g_a()
    }

    /// Largest relative residual of the six steady-state equations.
    pub fn equation_residual(&self, params: &SystemParams, omega: f64) -> f64 {
        let p = params;
        let lines = [
            (
                self.a1s * Complex64::new(p.kappa_a, p.delta_1),
                -I * (p.g1 * self.n1s + p.g2 * self.n2s + p.f * self.a2s),
            ),
            (
                self.a2s * Complex64::new(p.kappa_a, p.delta_2),
                -I * (p.f * self.a1s + p.g_au * self.us),
            ),
            (
                self.ps * Complex64::new(p.kappa_p, p.omega_p),
                -I * p.g_np * self.n2s.norm_sqr(),
            ),
            (
                self.us * Complex64::new(p.gamma_u, p.delta_u),
                -I * p.g_au * self.a2s,
            ),
            (
                self.n1s * Complex64::new(p.kappa_n1, p.delta_n1),
                -I * p.g1 * self.a1s,
            ),
            (
                self.n2s * Complex64::new(p.kappa_n2, self.delta_n2_eff),
                Complex64::new(omega, 0.0) - I * p.g2 * self.a1s,
            ),
        ];
        lines
            .iter()
            .map(|(lhs, rhs)| {
                let scale = lhs.norm().max(rhs.norm());
                if scale == 0.0 {
                    0.0
                } else {
                    (lhs - rhs).norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Controls for the self-consistent solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Relative tolerance on |n2s|².
    pub tolerance: f64,
    /// Bisection steps allowed per root.
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tolerance: 1e-12,
            max_iterations: 10_000,
        }
    }
}

/// The parts of the steady-state equations that do not depend on |n2s|².
#[derive(Debug, Clone, Copy)]
pub struct ReducedSystem {
    pub a: Complex64,
    pub b: Complex64,
    k_n1: Complex64,
    gamma_u: Complex64,
    g2: f64,
    g_np: f64,
    kappa_n2: f64,
    delta_n2: f64,
    phonon: Complex64,
}

impl ReducedSystem {
    pub fn new(p: &SystemParams) -> Self {
        let k_n1 = Complex64::new(p.kappa_n1, p.delta_n1);
        let gamma_u = Complex64::new(p.gamma_u, p.delta_u);
        let a = Complex64::new(p.kappa_a, p.delta_2) * gamma_u + p.g_au * p.g_au;
        let b = a * Complex64::new(p.kappa_a, p.delta_1) * k_n1
            + p.g1 * p.g1 * a
            + p.f * p.f * gamma_u * k_n1;
        ReducedSystem {
            a,
            b,
            k_n1,
            gamma_u,
            g2: p.g2,
            g_np: p.g_np,
            kappa_n2: p.kappa_n2,
            delta_n2: p.delta_n2,
            phonon: Complex64::new(p.kappa_p, p.omega_p),
        }
    }

    /// Phonon displacement for a given magnon number.
    pub fn phonon_amplitude(&self, magnon_number: f64) -> Complex64 {
        -I * self.g_np * magnon_number / self.phonon
    }

    /// Δ̃_{n₂} for a given magnon number.
    pub fn shifted_detuning(&self, magnon_number: f64) -> f64 {
        self.delta_n2 + 2.0 * self.g_np * self.phonon_amplitude(magnon_number).re
    }

    /// n2s implied by the drive and an assumed magnon number.
    pub fn magnon_amplitude(&self, omega: f64, magnon_number: f64) -> Complex64 {
        let detuned = Complex64::new(self.kappa_n2, self.shifted_detuning(magnon_number));
        self.b * omega / (self.b * detuned + self.a * self.g2 * self.g2 * self.k_n1)
    }

    /// dΔ̃_{n₂}/d|n2s|².
    fn detuning_slope(&self) -> f64 {
        2.0 * self.g_np * (-I * self.g_np / self.phonon).re
    }

    /// `z(0)` in n2s = Ω / z(x), where z is affine in x with slope i·s.
    fn denominator_at_rest(&self) -> Complex64 {
        Complex64::new(self.kappa_n2, self.delta_n2) + self.a * self.g2 * self.g2 * self.k_n1 / self.b
    }

    /// |n2s(x)|² − x, positive below the lowest root.
    fn imbalance(&self, omega: f64, magnon_number: f64) -> f64 {
        self.magnon_amplitude(omega, magnon_number).norm_sqr() - magnon_number
    }

    /// Turning points of x·|z(x)|² − Ω² on x > 0, ascending.
    fn turning_points(&self) -> Vec<f64> {
        let z0 = self.denominator_at_rest();
        let s = self.detuning_slope();
        // d/dx [s² x³ + 2 v s x² + |z0|² x] = 3 s² x² + 4 v s x + |z0|²
        let (qa, qb, qc) = (3.0 * s * s, 4.0 * z0.im * s, z0.norm_sqr());
        let disc = qb * qb - 4.0 * qa * qc;
        if qa == 0.0 || disc <= 0.0 {
            return Vec::new();
        }
        let root = disc.sqrt();
        // Numerically stable pair.
        let q = -0.5 * (qb + qb.signum() * root);
        let mut pts: Vec<f64> = [q / qa, qc / q]
            .into_iter()
            .filter(|x| x.is_finite() && *x > 0.0)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts
    }

    /// Every non-negative x with |n2s(x)|² = x, ascending, each bisected to
    /// adjacent floats.
    pub fn magnon_number_roots(&self, omega: f64, max_iterations: usize) -> Result<Vec<(f64, usize)>> {
        if omega == 0.0 {
            return Ok(alloc::vec![(0.0, 0)]);
        }
        // Partition [0, ∞) into monotone pieces of the cubic and bracket each.
        let mut edges = alloc::vec![0.0];
        edges.extend(self.turning_points());
        let mut hi = edges.last().copied().unwrap_or(0.0).max(omega * omega / self.denominator_at_rest().norm_sqr());
        let mut guard = 0;
        while self.imbalance(omega, hi) >= 0.0 {
            hi = if hi > 0.0 { 2.0 * hi } else { 1.0 };
            guard += 1;
            if guard > 2100 || !hi.is_finite() {
                return Err(Error::NonConvergence {
                    iterations: guard,
                    residual: f64::INFINITY,
                    field_tesla: None,
                });
            }
        }
        edges.push(hi);

        let mut roots = Vec::new();
        for pair in edges.windows(2) {
            let (mut lo, mut up) = (pair[0], pair[1]);
            let (f_lo, f_up) = (self.imbalance(omega, lo), self.imbalance(omega, up));
            if f_lo == 0.0 {
                roots.push((lo, 0));
                continue;
            }
            if (f_lo > 0.0) == (f_up > 0.0) {
                continue;
            }
            let lo_positive = f_lo > 0.0;
            let mut steps = 0;
            loop {
                let mid = 0.5 * (lo + up);
                if mid <= lo || mid >= up {
                    break;
                }
                if steps == max_iterations {
                    return Err(Error::NonConvergence {
                        iterations: steps,
                        residual: (up - lo) / up,
                        field_tesla: None,
                    });
                }
                steps += 1;
                let f_mid = self.imbalance(omega, mid);
                if f_mid == 0.0 {
                    lo = mid;
                    up = mid;
                    break;
                }
                if (f_mid > 0.0) == lo_positive {
                    lo = mid;
                } else {
                    up = mid;
                }
            }
            let best = if self.imbalance(omega, lo).abs() <= self.imbalance(omega, up).abs() {
                lo
            } else {
                up
            };
            if roots.last().map_or(true, |&(r, _)| r != best) {
                roots.push((best, steps));
            }
        }
        Ok(roots)
    }

    /// Cavity A amplitude from a1·B = −i g2 n2 A (κ_n1 + iΔ_n1).
    fn cavity_a(&self, n2s: Complex64) -> Complex64 {
        -I * self.g2 * n2s * self.a * self.k_n1 / self.b
    }
}

/// Self-consistent steady state for drive Ω (rad/s) with default settings.
///
/// In effective mode there is nothing to solve and the effective embedding is
/// returned.
pub fn solve_steady_state(params: &SystemParams, omega: f64) -> Result<SteadyState> {
    solve_steady_state_with(params, omega, &SolverSettings::default(), None)
}

/// Like [`solve_steady_state`] with explicit settings and an optional warm
/// start for |n2s|².
pub fn solve_steady_state_with(
    params: &SystemParams,
    omega: f64,
    settings: &SolverSettings,
    warm_start: Option<f64>,
) -> Result<SteadyState> {
    if params.coupling_mode == CouplingMode::Effective {
        return SteadyState::effective(params);
    }
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::InvalidValue {
            key: "B_field_tesla",
            reason: "drive Rabi frequency must be non-negative",
        });
    }
    let sys = ReducedSystem::new(params);
    let with_field = |e: Error| match e {
        Error::NonConvergence {
            iterations,
            residual,
            ..
        } => Error::NonConvergence {
            iterations,
            residual,
            field_tesla: params.b_field,
        },
        other => other,
    };
    let roots = sys
        .magnon_number_roots(omega, settings.max_iterations)
        .map_err(with_field)?;
    // Lowest branch by default, otherwise the branch nearest the warm start.
    let chosen = match warm_start.filter(|v| v.is_finite() && *v > 0.0) {
        Some(guess) => roots.iter().copied().min_by(|a, b| {
            let da = (a.0.max(f64::MIN_POSITIVE) / guess).ln().abs();
            let db = (b.0.max(f64::MIN_POSITIVE) / guess).ln().abs();
            da.total_cmp(&db)
        }),
        None => roots.first().copied(),
    };
    let Some((x, iterations)) = chosen else {
        return Err(with_field(Error::NonConvergence {
            iterations: 0,
            residual: f64::INFINITY,
            field_tesla: None,
        }));
    };
    let n2s = sys.magnon_amplitude(omega, x);
    let next = n2s.norm_sqr();
    let scale = next.max(x);
    let residual = if scale == 0.0 { 0.0 } else { (next - x).abs() / scale };
    if !(residual <= settings.tolerance) {
        return Err(with_field(Error::NonConvergence {
            iterations,
            residual,
            field_tesla: None,
        }));
    }
    Ok(assemble(params, &sys, n2s, iterations, residual))
}

fn assemble(
    p: &SystemParams,
    sys: &ReducedSystem,
    n2s: Complex64,
    iterations: usize,
    residual: f64,
) -> SteadyState {
    let magnon_number = n2s.norm_sqr();
    let ps = sys.phonon_amplitude(magnon_number);
    let a1s = sys.cavity_a(n2s);
    let n1s = -I * p.g1 * a1s / sys.k_n1;
    let a2s = -I * p.f * sys.gamma_u * a1s / sys.a;
    let us = -I * p.g_au * a2s / sys.gamma_u;
    SteadyState {
        a1s,
        a2s,
        n1s,
        n2s,
        us,
        ps,
        delta_n2_eff: p.delta_n2 + 2.0 * p.g_np * ps.re,
        g_np_eff: I * SQRT_2 * p.g_np * n2s,
        magnon_number,
        iterations,
        residual,
    }
}

/// Steady state for the parameter set as configured: effective embedding, or
/// the microscopic solve at the configured B.
pub fn steady_state(params: &SystemParams) -> Result<SteadyState> {
    match params.coupling_mode {
        CouplingMode::Effective => SteadyState::effective(params),
        CouplingMode::Microscopic => solve_steady_state(params, params.rabi_frequency()?),
    }
}

/// One point of a magnon-number sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub b_field: f64,
    pub state: SteadyState,
}

/// Result of [`magnon_number_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct MagnonSweep {
    pub points: Vec<SweepPoint>,
    /// |n2s|² strictly increases along the grid.
    pub strictly_increasing: bool,
    /// Indices `i` where the step from point `i-1` to `i` is steeper than
    /// [`JUMP_SLOPE`] in log–log terms (a fold or branch jump).
    pub jumps: Vec<usize>,
}

impl MagnonSweep {
    /// Attaches monotonicity and jump metadata to solved points.
    pub fn from_points(points: Vec<SweepPoint>) -> Self {
        let strictly_increasing = points
            .windows(2)
            .all(|w| w[1].state.magnon_number > w[0].state.magnon_number);
        let jumps = points
            .windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let (b0, x0) = (w[0].b_field, w[0].state.magnon_number);
                let (b1, x1) = (w[1].b_field, w[1].state.magnon_number);
                if b0 > 0.0 && b1 > b0 && x0 > 0.0 && x1 > 0.0 {
                    let slope = (x1 / x0).ln() / (b1 / b0).ln();
                    (slope.abs() > JUMP_SLOPE).then_some(i + 1)
                } else {
                    None
                }
            })
            .collect();
        MagnonSweep {
            points,
            strictly_increasing,
            jumps,
        }
    }
}

/// Log–log slope d ln|n2s|² / d ln B above which a step is flagged. Away from
/// folds the magnon number grows no faster than B².
pub const JUMP_SLOPE: f64 = 10.0;

/// Magnon number along an ascending B grid, each point warm-started from the
/// previous one so the continued branch is followed.
pub fn magnon_number_sweep(params: &SystemParams, b_grid: &[f64]) -> Result<MagnonSweep> {
    magnon_number_sweep_with(params, b_grid, &SolverSettings::default(), true)
}

pub fn magnon_number_sweep_with(
    params: &SystemParams,
    b_grid: &[f64],
    settings: &SolverSettings,
    warm_start: bool,
) -> Result<MagnonSweep> {
    if params.coupling_mode != CouplingMode::Microscopic {
        return Err(Error::MissingForMode {
            key: "coupling_mode",
            mode: "microscopic",
        });
    }
    if b_grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Unsorted);
    }
    let mut points: Vec<SweepPoint> = Vec::with_capacity(b_grid.len());
    let mut guess = None;
    for &b in b_grid {
        let mut local = params.clone();
        local.b_field = Some(b);
        let omega = local.rabi_frequency()?;
        let state = solve_steady_state_with(&local, omega, settings, guess).map_err(|e| match e {
            Error::NonConvergence {
                iterations,
                residual,
                ..
            } => Error::NonConvergence {
                iterations,
                residual,
                field_tesla: Some(b),
            },
            other => other,
        })?;
        if warm_start {
            guess = Some(state.magnon_number);
        }
        points.push(SweepPoint { b_field: b, state });
    }
    Ok(MagnonSweep::from_points(points))
}

/// Outcome of the Kerr-term validity check K·|n2s|³ ≪ Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrDiagnostic {
    pub ratio: f64,
    pub ok: bool,
}

pub const KERR_THRESHOLD: f64 = 0.01;

/// Ratio K·|n2s|³/Ω compared against `threshold`.
pub fn kerr_validity(state: &SteadyState, kerr: f64, omega: f64, threshold: f64) -> KerrDiagnostic {
    let numerator = kerr * state.magnon_number.powf(1.5);
    let ratio = if numerator == 0.0 {
        0.0
    } else if omega == 0.0 {
        f64::INFINITY
    } else {
        numerator / omega
    };
    KerrDiagnostic {
        ratio,
        ok: ratio < threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::hz;

    fn microscopic() -> SystemParams {
        let mut p = SystemParams::baseline();
        p.coupling_mode = CouplingMode::Microscopic;
        p.g1 = hz(1.2e6);
        p.g2 = hz(1.2e6);
        p.b_field = Some(5e-5);
        p
    }

    #[test]
    fn undriven_system_is_at_rest() {
        let p = microscopic();
        let s = solve_steady_state(&p, 0.0).unwrap();
        assert_eq!(s.magnon_number, 0.0);
        assert_eq!(s.n2s, Complex64::new(0.0, 0.0));
        assert_eq!(s.a1s, Complex64::new(0.0, 0.0));
        assert_eq!(s.delta_n2_eff, p.delta_n2);
    }

    #[test]
    fn single_decoupled_mode() {
        let mut p = microscopic();
        p.g1 = 0.0;
        p.g2 = 0.0;
        p.f = 0.0;
        p.g_au = 0.0;
        p.g_np = 0.0;
        let omega = 1e12;
        let s = solve_steady_state(&p, omega).unwrap();
        let expected = omega / Complex64::new(p.kappa_n2, p.delta_n2);
        assert!((s.n2s - expected).norm() / expected.norm() < 1e-14);
        assert_eq!(s.a1s.norm(), 0.0);
    }

    #[test]
    fn effective_mode_is_an_embedding() {
        let p = SystemParams::baseline();
        let s = solve_steady_state(&p, 123.0).unwrap();
        assert_eq!(s.g_np_eff, p.g_np_direct.unwrap());
        assert_eq!(s.delta_n2_eff, p.delta_n2);
        assert_eq!(s.iterations, 0);
    }

    #[test]
    fn back_substitution_residual() {
        for b in [1e-5, 5e-5, 1e-2, 3e-2] {
            let mut p = microscopic();
            p.f = 0.15 * p.omega_p;
            p.b_field = Some(b);
            let omega = p.rabi_frequency().unwrap();
            let s = solve_steady_state(&p, omega).unwrap();
            assert!(s.equation_residual(&p, omega) < 1e-10, "B = {b}");
            let expected_ps = -I * p.g_np * s.magnon_number / Complex64::new(p.kappa_p, p.omega_p);
            assert!((s.ps - expected_ps).norm() <= 1e-12 * expected_ps.norm());
        }
    }

    #[test]
    fn kerr_diagnostic_cases() {
        let p = microscopic();
        let s = solve_steady_state(&p, 0.0).unwrap();
        assert_eq!(kerr_validity(&s, 0.0, 0.0, KERR_THRESHOLD).ratio, 0.0);
        assert!(kerr_validity(&s, 1.0, 0.0, KERR_THRESHOLD).ok);

        let omega = p.rabi_frequency().unwrap();
        let s = solve_steady_state(&p, omega).unwrap();
        let k0 = kerr_validity(&s, 0.0, omega, KERR_THRESHOLD);
        assert_eq!((k0.ratio, k0.ok), (0.0, true));
        let k = hz(1e-10);
        let d = kerr_validity(&s, k, omega, KERR_THRESHOLD);
        let expected = k * s.n2s.norm().powi(3) / omega;
        assert!((d.ratio - expected).abs() <= 1e-12 * expected);
        assert_eq!(d.ok, expected < 0.01);

        let driven_zero = SteadyState {
            magnon_number: 4.0,
            ..s
        };
        let d = kerr_validity(&driven_zero, 1.0, 0.0, KERR_THRESHOLD);
        assert!(d.ratio.is_infinite() && !d.ok);
    }

    #[test]
    fn sweep_of_zero_field() {
        let p = microscopic();
        let sweep = magnon_number_sweep(&p, &[0.0]).unwrap();
        assert_eq!(sweep.points.len(), 1);
        assert_eq!(sweep.points[0].state.magnon_number, 0.0);
    }

    #[test]
    fn sweep_rejects_unsorted_grid() {
        let p = microscopic();
        assert_eq!(magnon_number_sweep(&p, &[2e-2, 1e-2]), Err(Error::Unsorted));
    }

    #[test]
    fn non_convergence_reports_field() {
        let mut p = microscopic();
        p.b_field = Some(2e-2);
        let settings = SolverSettings {
            max_iterations: 1,
            ..SolverSettings::default()
        };
        let err = magnon_number_sweep_with(&p, &[2e-2], &settings, true).unwrap_err();
        assert!(matches!(
            err,
            Error::NonConvergence {
                field_tesla: Some(b),
                ..
            } if b == 2e-2
        ));
    }
}
