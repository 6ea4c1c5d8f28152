//! Closed-form probe response, output field, transmission and group delay.
//!
//! The cavity amplitude at the probe sideband is
//!
//! ```text
//! a1₋/ε_d = [S1 + f²/(S10·W6) + g1²/S12 + g2²/(S2·W5)]⁻¹
//! ```
//!
//! with the S/W ladder built in [`ladder_coefficients`]. The magnomechanical
//! coupling enters the ladder as |G_A|²; for a real `G_A` this is the usual
//! G_A², and for the complex `G_A` of the microscopic mode it is what the
//! linearized equations require.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::steady::SteadyState;

/// Magnitude of `t` below which the phase (and so the delay) is ill-defined.
pub const MIN_TRANSMISSION: f64 = 1e-12;

/// Default finite-difference step for the group delay, in units of ω_p.
pub const DEFAULT_STEP_OVER_OMEGA_P: f64 = 1e-6;

/// The denominators and nested correction factors of the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderCoefficients {
    pub s1: Complex64,
    pub s2: Complex64,
    pub s3: Complex64,
    pub s4: Complex64,
    pub s5: Complex64,
    pub s6: Complex64,
    pub s7: Complex64,
    pub s8: Complex64,
    pub s9: Complex64,
    pub s10: Complex64,
    pub s11: Complex64,
    pub s12: Complex64,
    /// 1 − S3/S4.
    pub x: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
    pub w3: Complex64,
    pub w4: Complex64,
    pub w5: Complex64,
    pub w6: Complex64,
    /// G_np/√2.
    pub g_a: Complex64,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn checked(value: Complex64, delta: f64) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::SingularDenominator { delta })
    }
}

/// Evaluates every ladder coefficient at probe detuning `delta` (rad/s).
pub fn ladder_coefficients(
    params: &SystemParams,
    state: &SteadyState,
    delta: f64,
) -> Result<LadderCoefficients> {
    let p = params;
    let d = delta;
    let dn2 = state.delta_n2_eff;

    let s1 = c(p.kappa_a, p.delta_1 - d);
    let s2 = c(p.kappa_n2, dn2 - d);
    let s3 = c(p.kappa_p, p.omega_p - d);
    let s4 = c(p.kappa_p, -(p.omega_p + d));
    let s5 = c(p.kappa_n2, -(dn2 + d));
    let s6 = c(p.kappa_a, -(p.delta_1 + d));
    let s7 = c(p.kappa_a, -(p.delta_2 + d));
    let s8 = c(p.gamma_u, -(p.delta_u + d));
    let s9 = c(p.kappa_n1, -(p.delta_n1 + d));
    let s10 = c(p.kappa_a, p.delta_2 - d);
    let s11 = c(p.gamma_u, p.delta_u - d);
    let s12 = c(p.kappa_n1, p.delta_n1 - d);
    let x = checked(1.0 - s3 / s4, d)?;

    let g_a = state.g_a();
    let g_a2 = g_a.norm_sqr();
    let g_au2 = p.g_au * p.g_au;

    let w1 = checked(1.0 + g_au2 / (s7 * s8), d)?;
    let w2 = checked(
        1.0 + p.g1 * p.g1 / (s6 * s9) + p.f * p.f / (s6 * s7 * w1),
        d,
    )?;
    let w3 = checked(1.0 + p.g2 * p.g2 / (s5 * s6 * w2), d)?;
    let w4 = checked(1.0 - g_a2 * x / (s3 * s5 * w3), d)?;
    let w5 = checked(1.0 + g_a2 * x / (s2 * s3 * w4), d)?;
    let w6 = checked(1.0 + g_au2 / (s10 * s11), d)?;

    Ok(LadderCoefficients {
        s1,
        s2,
        s3,
        s4,
        s5,
        s6,
        s7,
        s8,
        s9,
        s10,
        s11,
        s12,
        x,
        w1,
        w2,
        w3,
        w4,
        w5,
        w6,
        g_a,
    })
}

/// Normalized intracavity response a1₋/ε_d.
pub fn probe_response(params: &SystemParams, state: &SteadyState, delta: f64) -> Result<Complex64> {
    let l = ladder_coefficients(params, state, delta)?;
    let p = params;
    let denominator = l.s1
        + p.f * p.f / (l.s10 * l.w6)
        + p.g1 * p.g1 / l.s12
        + p.g2 * p.g2 / (l.s2 * l.w5);
    if denominator == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularDenominator { delta });
    }
    checked(denominator.inv(), delta)
}

/// Output field ε_out = 2κ_a·a1₋/ε_d. Re is absorption, Im is dispersion.
pub fn output_field(params: &SystemParams, state: &SteadyState, delta: f64) -> Result<Complex64> {
    Ok(2.0 * params.kappa_a * probe_response(params, state, delta)?)
}

/// Probe transmission t = 1 − 2κ_a·a1₋/ε_d.
pub fn transmission(params: &SystemParams, state: &SteadyState, delta: f64) -> Result<Complex64> {
    Ok(1.0 - output_field(params, state, delta)?)
}

/// Group delay with its numerical self-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDelay {
    /// τ in seconds; positive is slow light.
    pub tau: f64,
    /// |τ(h) − τ(h/2)| / |τ(h/2)|.
    pub richardson: f64,
    /// False when |t| < [`MIN_TRANSMISSION`] at the evaluation point.
    pub reliable: bool,
}

fn delay_with_step(
    params: &SystemParams,
    state: &SteadyState,
    delta: f64,
    t: Complex64,
    step: f64,
) -> Result<f64> {
    let plus = transmission(params, state, delta + step)?;
    let minus = transmission(params, state, delta - step)?;
    let derivative = (plus - minus) / (2.0 * step);
    Ok((derivative / t).im)
}

/// τ = Im[(1/t)·dt/dω_d] by central difference on complex `t`, together with
/// the change observed when halving `step`.
pub fn group_delay(
    params: &SystemParams,
    state: &SteadyState,
    delta: f64,
    step: f64,
) -> Result<GroupDelay> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidValue {
            key: "step",
            reason: "finite-difference step must be positive",
        });
    }
    let t = transmission(params, state, delta)?;
    let tau = delay_with_step(params, state, delta, t, step)?;
    let refined = delay_with_step(params, state, delta, t, 0.5 * step)?;
    let change = (tau - refined).abs();
    let richardson = if refined == 0.0 {
        change
    } else {
        change / refined.abs()
    };
    Ok(GroupDelay {
        tau,
        richardson,
        reliable: t.norm() >= MIN_TRANSMISSION,
    })
}

/// Default group-delay step for a parameter set.
pub fn default_step(params: &SystemParams) -> f64 {
    DEFAULT_STEP_OVER_OMEGA_P * params.omega_p
}

/// Every observable at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub delta: f64,
    pub a1m: Complex64,
    pub eout: Complex64,
    pub t: Complex64,
    pub t2: f64,
    pub tau: f64,
    pub tau_richardson: f64,
    pub tau_reliable: bool,
}

pub fn response_point(
    params: &SystemParams,
    state: &SteadyState,
    delta: f64,
    step: f64,
) -> Result<ResponsePoint> {
    let a1m = probe_response(params, state, delta)?;
    let eout = 2.0 * params.kappa_a * a1m;
    let t = 1.0 - eout;
    let delay = group_delay(params, state, delta, step)?;
    Ok(ResponsePoint {
        delta,
        a1m,
        eout,
        t,
        t2: t.norm_sqr(),
        tau: delay.tau,
        tau_richardson: delay.richardson,
        tau_reliable: delay.reliable,
    })
}

/// Response points over an ordered δ grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum {
    pub points: Vec<ResponsePoint>,
}

impl Spectrum {
    pub fn deltas(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.delta).collect()
    }

    /// Re[ε_out] along the grid.
    pub fn absorption(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.eout.re).collect()
    }

    /// Im[ε_out] along the grid.
    pub fn dispersion(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.eout.im).collect()
    }

    pub fn transmission_power(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t2).collect()
    }

    pub fn group_delays(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.tau).collect()
    }

    pub fn max_richardson(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.tau_richardson)
            .fold(0.0, f64::max)
    }
}

/// Evaluates the full response on `grid` (rad/s).
pub fn spectrum(
    params: &SystemParams,
    state: &SteadyState,
    grid: &[f64],
    step: f64,
) -> Result<Spectrum> {
    let points = grid
        .iter()
        .map(|&d| response_point(params, state, d, step))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum { points })
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}
