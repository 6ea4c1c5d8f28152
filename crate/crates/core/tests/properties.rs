use magnomech_core::analysis::find_windows;
use magnomech_core::oracle::{cross_validate, solve_fluctuations, FluctuationSystem, DIM};
use magnomech_core::params::{hz, rabi_frequency, GYROMAGNETIC_RATIO, YIG_SPIN_DENSITY};
use magnomech_core::response::linspace;
use magnomech_core::steady::steady_state;
use magnomech_core::{Complex64, SystemParams};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// Diagonally dominant systems with entries spread over a few decades.
fn well_conditioned() -> impl Strategy<Value = FluctuationSystem> {
    (
        prop::collection::vec(complex(), DIM * DIM),
        prop::collection::vec(complex(), DIM),
        prop::collection::vec(1.0..1e3f64, DIM),
    )
        .prop_map(|(entries, rhs, scales)| {
            let mut matrix = [[Complex64::new(0.0, 0.0); DIM]; DIM];
            for (i, row) in matrix.iter_mut().enumerate() {
                for (j, m) in row.iter_mut().enumerate() {
                    *m = entries[i * DIM + j] * scales[i];
                }
                row[i] += Complex64::new(2.0 * DIM as f64 * scales[i], 0.0);
            }
            FluctuationSystem {
                delta: 0.0,
                matrix,
                rhs: rhs.try_into().unwrap(),
            }
        })
}

/// Coupled parameter sets around the experimental baseline.
fn coupled_params() -> impl Strategy<Value = SystemParams> {
    (
        0.0..3e6f64,
        0.0..3e6f64,
        0.0..4e6f64,
        0.0..0.4f64,
        0.0..8e6f64,
        0.7..1.3f64,
        0.7..1.3f64,
    )
        .prop_map(|(g1, g2, g_np, f, g_au, magnon, cavity)| {
            let mut p = SystemParams::baseline();
            p.omega_0 = None;
            p.g1 = hz(g1);
            p.g2 = hz(g2);
            p.g_np_direct = Some(Complex64::new(hz(g_np), 0.0));
            p.f = f * p.omega_p;
            p.g_au = hz(g_au);
            p.set_magnon_detuning(magnon * p.omega_p);
            p.delta_2 = cavity * p.omega_p;
            p
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_solve_residual(system in well_conditioned()) {
        let solution = solve_fluctuations(&system).unwrap();
        prop_assert!(solution.residual < 1e-12, "{}", solution.residual);
    }

    #[test]
    fn closed_form_matches_oracle(p in coupled_params()) {
        let state = steady_state(&p).unwrap();
        let grid = linspace(0.5 * p.omega_p, 1.5 * p.omega_p, 41);
        let report = cross_validate(&p, &state, &grid).unwrap();
        prop_assert_eq!(report.failures().count(), 0);
        prop_assert!(report.max_rel_dev < 1e-9, "{}", report.max_rel_dev);
    }

    #[test]
    fn window_detection_ignores_scale(
        ys in prop::collection::vec(0.0..2.0f64, 5..200),
        scale in 1e-6..1e6f64,
    ) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
        let scaled: Vec<f64> = ys.iter().map(|y| y * scale).collect();
        let a = find_windows(&xs, &ys, 0.1).unwrap();
        let b = find_windows(&xs, &scaled, 0.1).unwrap();
        let centers = |r: &magnomech_core::analysis::WindowReport| {
            r.windows.iter().map(|w| w.center_index).collect::<Vec<_>>()
        };
        prop_assert_eq!(centers(&a), centers(&b));
    }

    #[test]
    fn rabi_frequency_is_linear_in_field_and_root_density(
        b in 1e-6..1e-1f64,
        k in 0.1..10.0f64,
    ) {
        let omega = |b: f64, rho: f64| rabi_frequency(b, 250e-6, rho, GYROMAGNETIC_RATIO).unwrap();
        let base = omega(b, YIG_SPIN_DENSITY);
        prop_assert!((omega(k * b, YIG_SPIN_DENSITY) / base - k).abs() < 1e-12 * k);
        prop_assert!((omega(b, k * k * YIG_SPIN_DENSITY) / base - k).abs() < 1e-12 * k);
    }
}
