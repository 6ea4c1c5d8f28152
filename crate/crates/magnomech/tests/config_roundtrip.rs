use magnomech::config::{parse_config, serialize_config};
use magnomech_core::params::{hz, CouplingMode};
use magnomech_core::{Complex64, SystemParams};
use proptest::prelude::*;

fn rate() -> impl Strategy<Value = f64> {
    (1e2..1e8f64).prop_map(hz)
}

/// Parameter sets whose frequencies are drawn as ν in Hz, plus arbitrary
/// angular values that need the rad/s spelling.
fn params() -> impl Strategy<Value = SystemParams> {
    (
        (rate(), rate(), rate(), rate(), rate(), rate()),
        (rate(), rate(), 0.0..1e7f64, rate(), rate(), -1e7..1e7f64),
        (-1e8..1e8f64, -1e8..1e8f64, 1e-3..1e-1f64, any::<bool>(), 1e-5..1e-1f64),
    )
        .prop_map(|(rates, couplings, rest)| {
            let mut p = SystemParams::baseline();
            (p.omega_p, p.kappa_a, p.kappa_p, p.kappa_n1, p.kappa_n2, p.gamma_u) = rates;
            let (g1, g2, f_angular, g_au, g_np, g_im) = couplings;
            p.g1 = g1;
            p.g2 = g2;
            p.f = f_angular;
            p.g_au = g_au;
            p.g_np_direct = Some(Complex64::new(g_np, hz(g_im)));
            let (d1, dn, g_np_micro, micro, b) = rest;
            p.delta_1 = d1;
            p.set_magnon_detuning(hz(dn));
            p.g_np = hz(g_np_micro);
            if micro {
                p.coupling_mode = CouplingMode::Microscopic;
                p.b_field = Some(b);
            }
            p
        })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_exact(p in params()) {
        let text = serialize_config(&p);
        let back = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, p);
    }
}
