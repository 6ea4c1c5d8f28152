//! Direct linear-response solver used to check the closed form.
//!
//! Each mode is expanded as R = R_s + R₋e^{−iδt} + R₊e^{iδt}. Keeping first
//! order in the probe gives twelve coupled equations for the lower sideband
//! amplitudes R₋ and the conjugated upper sideband amplitudes R₊*. The noise
//! inputs have zero mean and drop out. The drive is normalized, ε_d = 1.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{mat_vec, norm1, norm2, Lu};
use crate::params::SystemParams;
use crate::response::probe_response;
use crate::steady::SteadyState;

pub const DIM: usize = 12;

/// Condition number above which a solve is reported as ill-conditioned.
pub const MAX_CONDITION: f64 = 1e12;

/// Row/column index of each fluctuation amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Amplitude {
    A1Minus = 0,
    A1PlusConj,
    A2Minus,
    A2PlusConj,
    N1Minus,
    N1PlusConj,
    N2Minus,
    N2PlusConj,
    PMinus,
    PPlusConj,
    UMinus,
    UPlusConj,
}

impl Amplitude {
    pub const ALL: [Amplitude; DIM] = [
        Amplitude::A1Minus,
        Amplitude::A1PlusConj,
        Amplitude::A2Minus,
        Amplitude::A2PlusConj,
        Amplitude::N1Minus,
        Amplitude::N1PlusConj,
        Amplitude::N2Minus,
        Amplitude::N2PlusConj,
        Amplitude::PMinus,
        Amplitude::PPlusConj,
        Amplitude::UMinus,
        Amplitude::UPlusConj,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// M·x = b for the twelve sideband amplitudes at one δ.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSystem {
    pub delta: f64,
    pub matrix: [[Complex64; DIM]; DIM],
    pub rhs: [Complex64; DIM],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Assembles the linearized equations around `state` at probe detuning
/// `delta`.
///
/// Lower-sideband rows read (κ + i(Δ − δ))·R₋ + i·Σ g·R'₋ = source, and the
/// conjugated upper-sideband rows read (κ − i(Δ + δ))·R₊* − i·Σ g·R'₊* = source*.
pub fn build_fluctuation_matrix(
    params: &SystemParams,
    state: &SteadyState,
    delta: f64,
) -> FluctuationSystem {
    use Amplitude::*;
    let p = params;
    let d = delta;
    let mut m = [[ZERO; DIM]; DIM];
    let mut set = |row: Amplitude, col: Amplitude, v: Complex64| {
        m[row.index()][col.index()] += v;
    };

    // Lower sideband: diagonal κ + i(Δ − δ); couplings +i·g.
    // Upper sideband (conjugated): diagonal κ − i(Δ + δ); couplings −i·g.
    let modes = [
        (A1Minus, A1PlusConj, p.kappa_a, p.delta_1),
        (A2Minus, A2PlusConj, p.kappa_a, p.delta_2),
        (N1Minus, N1PlusConj, p.kappa_n1, p.delta_n1),
        (N2Minus, N2PlusConj, p.kappa_n2, state.delta_n2_eff),
        (PMinus, PPlusConj, p.kappa_p, p.omega_p),
        (UMinus, UPlusConj, p.gamma_u, p.delta_u),
    ];
    for (minus, plus, rate, detuning) in modes {
        set(minus, minus, Complex64::new(rate, detuning - d));
        set(plus, plus, Complex64::new(rate, -(detuning + d)));
    }

    // Beam-splitter couplings, symmetric between the two partners.
    let exchange = [
        (A1Minus, A1PlusConj, N1Minus, N1PlusConj, p.g1),
        (A1Minus, A1PlusConj, N2Minus, N2PlusConj, p.g2),
        (A1Minus, A1PlusConj, A2Minus, A2PlusConj, p.f),
        (A2Minus, A2PlusConj, UMinus, UPlusConj, p.g_au),
    ];
    for (am, ap, bm, bp, g) in exchange {
        set(am, bm, I * g);
        set(bm, am, I * g);
        set(ap, bp, -I * g);
        set(bp, ap, -I * g);
    }

    // Magnomechanical coupling, c = g_np·n2s.
    let c = state.coupling_product();
    let cc = c.conj();
    // n2: … + i·c·(p₋ + p₊*)
    set(N2Minus, PMinus, I * c);
    set(N2Minus, PPlusConj, I * c);
    // n2₊*: … − i·c*·(p₋ + p₊*)
    set(N2PlusConj, PMinus, -I * cc);
    set(N2PlusConj, PPlusConj, -I * cc);
    // p₋: … + i·(c*·n2₋ + c·n2₊*)
    set(PMinus, N2Minus, I * cc);
    set(PMinus, N2PlusConj, I * c);
    // p₊*: … − i·(c*·n2₋ + c·n2₊*)
    set(PPlusConj, N2Minus, -I * cc);
    set(PPlusConj, N2PlusConj, -I * c);

    let mut rhs = [ZERO; DIM];
    rhs[A1Minus.index()] = Complex64::new(1.0, 0.0);
    FluctuationSystem {
        delta,
        matrix: m,
        rhs,
    }
}

/// Solution of a [`FluctuationSystem`].
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub delta: f64,
    pub amplitudes: [Complex64; DIM],
    /// ‖M·x − b‖₂ / ‖b‖₂.
    pub residual: f64,
    /// 1-norm condition number of M.
    pub condition: f64,
}

impl OracleSolution {
    pub fn amplitude(&self, which: Amplitude) -> Complex64 {
        self.amplitudes[which.index()]
    }

    /// a1₋/ε_d.
    pub fn a1m(&self) -> Complex64 {
        self.amplitude(Amplitude::A1Minus)
    }
}

/// LU solve with partial pivoting, one step of iterative refinement and a
/// condition check.
pub fn solve_fluctuations(system: &FluctuationSystem) -> Result<OracleSolution> {
    let delta = system.delta;
    let lu = Lu::factor(system.matrix).ok_or(Error::SingularMatrix { delta })?;
    let condition = norm1(&system.matrix) * lu.inverse_norm1();
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { delta, condition });
    }
    let mut x = lu.solve(&system.rhs);
    let mut r = system.rhs;
    for (ri, ax) in r.iter_mut().zip(mat_vec(&system.matrix, &x)) {
        *ri -= ax;
    }
    let correction = lu.solve(&r);
    for (xi, ci) in x.iter_mut().zip(correction) {
        *xi += ci;
    }
    let mut r = system.rhs;
    for (ri, ax) in r.iter_mut().zip(mat_vec(&system.matrix, &x)) {
        *ri -= ax;
    }
    let b = norm2(&system.rhs);
    let residual = if b == 0.0 { norm2(&r) } else { norm2(&r) / b };
    Ok(OracleSolution {
        delta,
        amplitudes: x,
        residual,
        condition,
    })
}

/// Oracle a1₋/ε_d at one detuning.
pub fn oracle_response(params: &SystemParams, state: &SteadyState, delta: f64) -> Result<OracleSolution> {
    solve_fluctuations(&build_fluctuation_matrix(params, state, delta))
}

/// Comparison at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationPoint {
    pub delta: f64,
    /// |closed − oracle| / |oracle|, or the error that stopped either route.
    pub rel_dev: Result<f64>,
    pub oracle_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub max_rel_dev: f64,
    pub argmax_delta: f64,
    pub max_residual: f64,
    pub points: Vec<ValidationPoint>,
}

impl CrossValidation {
    pub fn failures(&self) -> impl Iterator<Item = &ValidationPoint> {
        self.points.iter().filter(|p| p.rel_dev.is_err())
    }
}

/// Compares the closed-form a1₋ with the oracle at every grid point. Failing
/// points are recorded and the grid continues.
pub fn cross_validate(
    params: &SystemParams,
    state: &SteadyState,
    grid: &[f64],
) -> Result<CrossValidation> {
    if grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    let points: Vec<ValidationPoint> = grid
        .iter()
        .map(|&delta| {
            let oracle = oracle_response(params, state, delta);
            let residual = oracle.as_ref().ok().map(|o| o.residual);
            let rel_dev = oracle.and_then(|o| {
                let closed = probe_response(params, state, delta)?;
                let reference = o.a1m();
                Ok((closed - reference).norm() / reference.norm())
            });
            ValidationPoint {
                delta,
                rel_dev,
                oracle_residual: residual,
            }
        })
        .collect();
    let (mut max_rel_dev, mut argmax_delta) = (0.0, grid[0]);
    for p in &points {
        if let Ok(dev) = p.rel_dev {
            if dev > max_rel_dev || dev.is_nan() {
                max_rel_dev = dev;
                argmax_delta = p.delta;
            }
        }
    }
    let max_residual = points
        .iter()
        .filter_map(|p| p.oracle_residual)
        .fold(0.0, f64::max);
    Ok(CrossValidation {
        max_rel_dev,
        argmax_delta,
        max_residual,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::hz;
    use crate::response::linspace;

    fn decoupled() -> SystemParams {
        let mut p = SystemParams::baseline();
        p.g1 = 0.0;
        p.g2 = 0.0;
        p.f = 0.0;
        p.g_au = 0.0;
        p.g_np_direct = Some(Complex64::new(0.0, 0.0));
        p
    }

    #[test]
    fn decoupled_matrix_is_diagonal() {
        let p = decoupled();
        let s = SteadyState::effective(&p).unwrap();
        let d = 0.37 * p.omega_p;
        let sys = build_fluctuation_matrix(&p, &s, d);
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j {
                    assert_eq!(sys.matrix[i][j], ZERO);
                }
            }
        }
        assert_eq!(sys.matrix[0][0], Complex64::new(p.kappa_a, p.delta_1 - d));
        assert_eq!(sys.matrix[1][1], Complex64::new(p.kappa_a, -(p.delta_1 + d)));
        let sol = solve_fluctuations(&sys).unwrap();
        let expected = Complex64::new(p.kappa_a, p.delta_1 - d).inv();
        assert!((sol.a1m() - expected).norm() <= 1e-15 * expected.norm());
    }

    #[test]
    fn rhs_only_drives_cavity_a() {
        let p = SystemParams::baseline();
        let s = SteadyState::effective(&p).unwrap();
        let sys = build_fluctuation_matrix(&p, &s, p.omega_p);
        for (i, v) in sys.rhs.iter().enumerate() {
            if i == Amplitude::A1Minus.index() {
                assert_eq!(*v, Complex64::new(1.0, 0.0));
            } else {
                assert_eq!(*v, ZERO);
            }
        }
    }

    #[test]
    fn zero_magnomechanical_coupling_splits_sidebands() {
        let mut p = SystemParams::baseline();
        p.f = 0.2 * p.omega_p;
        p.g_np_direct = Some(ZERO);
        let s = SteadyState::effective(&p).unwrap();
        let sys = build_fluctuation_matrix(&p, &s, 0.9 * p.omega_p);
        for i in 0..DIM {
            for j in 0..DIM {
                // Even indices are lower sideband, odd are conjugated upper.
                if i % 2 != j % 2 {
                    assert_eq!(sys.matrix[i][j], ZERO, "({i}, {j})");
                }
            }
        }
        let sol = solve_fluctuations(&sys).unwrap();
        assert_eq!(sol.amplitude(Amplitude::A1PlusConj), ZERO);
    }

    #[test]
    fn single_point_decoupled_validation() {
        let p = decoupled();
        let s = SteadyState::effective(&p).unwrap();
        let report = cross_validate(&p, &s, &[p.omega_p]).unwrap();
        assert!(report.max_rel_dev < 1e-15);
        assert_eq!(report.argmax_delta, p.omega_p);
    }

    #[test]
    fn empty_grid_is_rejected() {
        let p = decoupled();
        let s = SteadyState::effective(&p).unwrap();
        assert_eq!(cross_validate(&p, &s, &[]), Err(Error::EmptyInput));
    }

    #[test]
    fn fig3c_matches_closed_form() {
        let mut p = SystemParams::baseline();
        p.g1 = hz(1.2e6);
        p.g2 = hz(1.2e6);
        p.g_np_direct = Some(Complex64::new(hz(1.2e6), 0.0));
        p.g_au = 0.0;
        let s = SteadyState::effective(&p).unwrap();
        let sol = oracle_response(&p, &s, p.omega_p).unwrap();
        assert!(sol.condition.is_finite() && sol.condition < MAX_CONDITION);
        assert!(sol.residual < 1e-12);
        let report = cross_validate(&p, &s, &linspace(0.0, 2.0 * p.omega_p, 201)).unwrap();
        assert!(report.max_rel_dev < 1e-9, "{}", report.max_rel_dev);
    }

    #[test]
    fn singular_matrix_is_reported() {
        let sys = FluctuationSystem {
            delta: 1.5,
            matrix: [[ZERO; DIM]; DIM],
            rhs: [ZERO; DIM],
        };
        assert_eq!(
            solve_fluctuations(&sys),
            Err(Error::SingularMatrix { delta: 1.5 })
        );
    }
}
