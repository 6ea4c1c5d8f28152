//! Spectral observables: transparency windows, Fano asymmetry, slow/fast
//! light sign changes, and parameter sweeps.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::response::{default_step, group_delay, spectrum, GroupDelay, Spectrum};
use crate::steady::steady_state;
use crate::TAU;

pub const DEFAULT_PROMINENCE: f64 = 0.1;

/// Relative resolution of a bisected crossing.
pub const CROSSING_RESOLUTION: f64 = 1e-4;

/// Upper bound on δ evaluations in one sweep.
pub const SWEEP_BUDGET: usize = 1_000_000;

/// One transparency window (local absorption minimum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center_delta: f64,
    /// Absorption at the minimum.
    pub depth: f64,
    pub left_peak: f64,
    pub right_peak: f64,
    pub center_index: usize,
    pub left_index: usize,
    pub right_index: usize,
    /// A flanking maximum sits on the edge of the grid, not on a true peak.
    pub at_edge: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WindowReport {
    pub windows: Vec<Window>,
}

impl WindowReport {
    pub fn count(&self) -> usize {
        self.windows.len()
    }
}

/// Finds transparency windows in an absorption series.
///
/// A window is a local minimum whose lower flanking maximum exceeds it by at
/// least `prominence` times the global maximum. Each flank extends until the
/// series drops below the minimum again (or the grid ends), and the largest
/// value on it is the flanking peak.
pub fn find_windows(delta: &[f64], absorption: &[f64], prominence: f64) -> Result<WindowReport> {
    if delta.len() != absorption.len() {
        return Err(Error::LengthMismatch(delta.len(), absorption.len()));
    }
    if delta.is_empty() {
        return Err(Error::EmptyInput);
    }
    if delta.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Unsorted);
    }
    if !(prominence > 0.0 && prominence < 1.0) {
        return Err(Error::InvalidValue {
            key: "prominence",
            reason: "must lie in (0, 1)",
        });
    }
    let y = absorption;
    let n = y.len();
    let global_max = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(global_max > 0.0) {
        return Ok(WindowReport::default());
    }
    let threshold = prominence * global_max;

    let mut windows = Vec::new();
    for i in 1..n.saturating_sub(1) {
        if !(y[i] < y[i - 1] && y[i] <= y[i + 1]) {
            continue;
        }
        let mut left = i;
        let mut left_index = i;
        while left > 0 && y[left - 1] >= y[i] {
            left -= 1;
            if y[left] > y[left_index] {
                left_index = left;
            }
        }
        let mut right = i;
        let mut right_index = i;
        while right + 1 < n && y[right + 1] >= y[i] {
            right += 1;
            if y[right] > y[right_index] {
                right_index = right;
            }
        }
        let (left_peak, right_peak) = (y[left_index], y[right_index]);
        if left_peak.min(right_peak) - y[i] >= threshold {
            windows.push(Window {
                center_delta: delta[i],
                depth: y[i],
                left_peak,
                right_peak,
                center_index: i,
                left_index,
                right_index,
                at_edge: left_index == 0 || right_index == n - 1,
            });
        }
    }
    Ok(WindowReport { windows })
}

/// Normalized flanking-peak difference |L − R| / (L + R).
pub fn fano_asymmetry(window: &Window) -> Result<f64> {
    if window.at_edge {
        return Err(Error::UndefinedAsymmetry {
            center: window.center_delta,
        });
    }
    let (l, r) = (window.left_peak, window.right_peak);
    Ok((l - r).abs() / (l + r))
}

/// Parameters that sweeps may vary. Values are always in SI/angular units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    F,
    GAu,
    G1,
    G2,
    /// Effective coupling G_np (real).
    GNp,
    /// Single-magnon coupling g_np.
    GNpSingle,
    BField,
    /// Δ_{n₁} and Δ_{n₂} together.
    DeltaN,
    Delta1,
    Delta2,
    DeltaU,
    KappaA,
    GammaU,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 13] = [
        SweepParameter::F,
        SweepParameter::GAu,
        SweepParameter::G1,
        SweepParameter::G2,
        SweepParameter::GNp,
        SweepParameter::GNpSingle,
        SweepParameter::BField,
        SweepParameter::DeltaN,
        SweepParameter::Delta1,
        SweepParameter::Delta2,
        SweepParameter::DeltaU,
        SweepParameter::KappaA,
        SweepParameter::GammaU,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::F => "f",
            SweepParameter::GAu => "G_au",
            SweepParameter::G1 => "g1",
            SweepParameter::G2 => "g2",
            SweepParameter::GNp => "G_np",
            SweepParameter::GNpSingle => "g_np",
            SweepParameter::BField => "B_field",
            SweepParameter::DeltaN => "delta_n",
            SweepParameter::Delta1 => "delta_1",
            SweepParameter::Delta2 => "delta_2",
            SweepParameter::DeltaU => "delta_u",
            SweepParameter::KappaA => "kappa_a",
            SweepParameter::GammaU => "gamma_u",
        }
    }

    /// Whether values are angular frequencies (as opposed to tesla).
    pub fn is_frequency(self) -> bool {
        self != SweepParameter::BField
    }

    pub fn apply(self, params: &mut SystemParams, value: f64) {
        match self {
            SweepParameter::F => params.f = value,
            SweepParameter::GAu => params.g_au = value,
            SweepParameter::G1 => params.g1 = value,
            SweepParameter::G2 => params.g2 = value,
            SweepParameter::GNp => params.g_np_direct = Some(Complex64::new(value, 0.0)),
            SweepParameter::GNpSingle => params.g_np = value,
            SweepParameter::BField => params.b_field = Some(value),
            SweepParameter::DeltaN => params.set_magnon_detuning(value),
            SweepParameter::Delta1 => {
                params.delta_1 = value;
                if let (Some(w0), Some(_)) = (params.omega_0, params.omega_cav_1) {
                    params.omega_cav_1 = Some(w0 + value);
                }
            }
            SweepParameter::Delta2 => {
                params.delta_2 = value;
                if let (Some(w0), Some(_)) = (params.omega_0, params.omega_cav_2) {
                    params.omega_cav_2 = Some(w0 + value);
                }
            }
            SweepParameter::DeltaU => {
                params.delta_u = value;
                if let (Some(w0), Some(_)) = (params.omega_0, params.omega_u) {
                    params.omega_u = Some(w0 + value);
                }
            }
            SweepParameter::KappaA => params.kappa_a = value,
            SweepParameter::GammaU => params.gamma_u = value,
        }
    }
}

impl core::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepParameter::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownParameter(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    PosToNeg,
    NegToPos,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::PosToNeg => "pos->neg",
            Direction::NegToPos => "neg->pos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Parameter value in its native unit (rad/s for frequencies).
    pub parameter_value: f64,
    pub direction: Direction,
}

impl Crossing {
    /// The same value read as an ordinary frequency ν = ω/2π.
    pub fn value_hz(&self) -> f64 {
        self.parameter_value / TAU
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossingReport {
    pub parameter: SweepParameter,
    pub crossings: Vec<Crossing>,
    /// Brackets discarded because τ was unreliable at an end point or during
    /// refinement.
    pub invalidated: Vec<(f64, f64)>,
    /// τ at every grid point.
    pub samples: Vec<(f64, GroupDelay)>,
}

/// Group delay at fixed δ for the template with one parameter overridden.
pub fn delay_at(
    template: &SystemParams,
    parameter: SweepParameter,
    value: f64,
    fixed_delta: f64,
) -> Result<GroupDelay> {
    let mut p = template.clone();
    parameter.apply(&mut p, value);
    p.validate()?;
    let state = steady_state(&p)?;
    group_delay(&p, &state, fixed_delta, default_step(&p))
}

/// Locates sign changes of τ(δ = `fixed_delta`) along `grid` and refines
/// each by bisection to [`CROSSING_RESOLUTION`] relative resolution.
pub fn delay_sign_crossings(
    template: &SystemParams,
    parameter: SweepParameter,
    grid: &[f64],
    fixed_delta: f64,
) -> Result<CrossingReport> {
    if grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Unsorted);
    }
    let samples = grid
        .iter()
        .map(|&v| Ok((v, delay_at(template, parameter, v, fixed_delta)?)))
        .collect::<Result<Vec<_>>>()?;

    let mut crossings = Vec::new();
    let mut invalidated = Vec::new();
    for pair in samples.windows(2) {
        let ((lo, a), (hi, b)) = (pair[0], pair[1]);
        let (pos_a, pos_b) = (a.tau > 0.0, b.tau > 0.0);
        if pos_a == pos_b {
            continue;
        }
        if !(a.reliable && b.reliable) {
            invalidated.push((lo, hi));
            continue;
        }
        match bisect(template, parameter, fixed_delta, lo, hi, pos_a) {
            Some(value) => crossings.push(Crossing {
                parameter_value: value,
                direction: if pos_a {
                    Direction::PosToNeg
                } else {
                    Direction::NegToPos
                },
            }),
            None => invalidated.push((lo, hi)),
        }
    }
    Ok(CrossingReport {
        parameter,
        crossings,
        invalidated,
        samples,
    })
}

fn bisect(
    template: &SystemParams,
    parameter: SweepParameter,
    fixed_delta: f64,
    mut lo: f64,
    mut hi: f64,
    lo_positive: bool,
) -> Option<f64> {
    for _ in 0..200 {
        let scale = lo.abs().max(hi.abs());
        if hi - lo <= CROSSING_RESOLUTION * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let g = delay_at(template, parameter, mid, fixed_delta).ok()?;
        if !g.reliable {
            return None;
        }
        if (g.tau > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// One or two swept parameters over a common δ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<(SweepParameter, Vec<f64>)>,
    pub delta_grid: Vec<f64>,
}

impl SweepSpec {
    /// Cartesian product of the axes, first axis slowest.
    pub fn combinations(&self) -> Result<Vec<Vec<(SweepParameter, f64)>>> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidValue {
                key: "sweep",
                reason: "name one or two parameters",
            });
        }
        let combos: usize = self.axes.iter().map(|(_, g)| g.len()).product();
        let requested = combos.saturating_mul(self.delta_grid.len());
        if requested > SWEEP_BUDGET {
            return Err(Error::BudgetExceeded {
                requested,
                budget: SWEEP_BUDGET,
            });
        }
        let mut out: Vec<Vec<(SweepParameter, f64)>> = alloc::vec![Vec::new()];
        for (param, grid) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    grid.iter().map(move |&v| {
                        let mut next = prefix.clone();
                        next.push((*param, v));
                        next
                    })
                })
                .collect();
        }
        if combos == 0 {
            out.clear();
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedSpectrum {
    pub tags: Vec<(SweepParameter, f64)>,
    pub spectrum: Spectrum,
}

/// Spectrum for one combination of overrides.
pub fn evaluate_combination(
    template: &SystemParams,
    tags: &[(SweepParameter, f64)],
    delta_grid: &[f64],
) -> Result<TaggedSpectrum> {
    let mut p = template.clone();
    for &(param, value) in tags {
        param.apply(&mut p, value);
    }
    p.validate()?;
    let state = steady_state(&p)?;
    Ok(TaggedSpectrum {
        tags: tags.to_vec(),
        spectrum: spectrum(&p, &state, delta_grid, default_step(&p))?,
    })
}

/// One spectrum per parameter combination, in combination order.
pub fn sweep_spectrum(template: &SystemParams, spec: &SweepSpec) -> Result<Vec<TaggedSpectrum>> {
    spec.combinations()?
        .iter()
        .map(|tags| evaluate_combination(template, tags, &spec.delta_grid))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64).collect()
    }

    #[test]
    fn synthetic_doublet_has_one_symmetric_window() {
        let y = [0.0, 1.0, 2.0, 1.0, 0.5, 1.0, 2.0, 1.0, 0.0];
        let r = find_windows(&grid(9), &y, 0.1).unwrap();
        assert_eq!(r.count(), 1);
        let w = r.windows[0];
        assert_eq!((w.center_index, w.left_index, w.right_index), (4, 2, 6));
        assert_eq!(w.depth, 0.5);
        assert_eq!(fano_asymmetry(&w).unwrap(), 0.0);
    }

    #[test]
    fn shallow_dips_are_ignored() {
        let y = [0.0, 2.0, 1.95, 2.0, 0.0];
        assert_eq!(find_windows(&grid(5), &y, 0.1).unwrap().count(), 0);
        assert_eq!(find_windows(&grid(5), &y, 0.01).unwrap().count(), 1);
    }

    #[test]
    fn asymmetric_doublet() {
        let y = [0.0, 1.0, 3.0, 1.0, 0.5, 1.0, 1.0, 0.2];
        let w = find_windows(&grid(8), &y, 0.1).unwrap().windows[0];
        assert!((fano_asymmetry(&w).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn edge_window_has_undefined_asymmetry() {
        let y = [3.0, 1.0, 0.5, 1.0, 2.0, 1.0];
        let r = find_windows(&grid(6), &y, 0.1).unwrap();
        assert_eq!(r.count(), 1);
        assert!(r.windows[0].at_edge);
        assert!(matches!(
            fano_asymmetry(&r.windows[0]),
            Err(Error::UndefinedAsymmetry { .. })
        ));
    }

    #[test]
    fn input_validation() {
        assert_eq!(find_windows(&[], &[], 0.1), Err(Error::EmptyInput));
        assert_eq!(
            find_windows(&[1.0, 0.0], &[1.0, 2.0], 0.1),
            Err(Error::Unsorted)
        );
        assert_eq!(
            find_windows(&[0.0], &[1.0, 2.0], 0.1),
            Err(Error::LengthMismatch(1, 2))
        );
        assert!(find_windows(&[0.0, 1.0], &[1.0, 2.0], 1.5).is_err());
    }

    #[test]
    fn parameter_names_round_trip() {
        for p in SweepParameter::ALL {
            assert_eq!(p.name().parse::<SweepParameter>().unwrap(), p);
        }
        assert_eq!(
            "kappa".parse::<SweepParameter>(),
            Err(Error::UnknownParameter("kappa".into()))
        );
    }

    #[test]
    fn empty_sweep_is_empty() {
        let spec = SweepSpec {
            axes: vec![(SweepParameter::F, vec![])],
            delta_grid: vec![0.0, 1.0],
        };
        let out = sweep_spectrum(&SystemParams::baseline(), &spec).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn sweep_budget() {
        let spec = SweepSpec {
            axes: vec![
                (SweepParameter::F, vec![0.0; 1000]),
                (SweepParameter::GAu, vec![0.0; 10]),
            ],
            delta_grid: vec![0.0; 101],
        };
        assert!(matches!(
            spec.combinations(),
            Err(Error::BudgetExceeded { requested: 1_010_000, .. })
        ));
    }

    #[test]
    fn combinations_order() {
        let spec = SweepSpec {
            axes: vec![
                (SweepParameter::F, vec![1.0, 2.0]),
                (SweepParameter::GAu, vec![3.0, 4.0]),
            ],
            delta_grid: vec![0.0],
        };
        let c = spec.combinations().unwrap();
        let values: Vec<(f64, f64)> = c.iter().map(|v| (v[0].1, v[1].1)).collect();
        assert_eq!(values, vec![(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]);
    }
}
