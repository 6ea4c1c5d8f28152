//! Physical parameter model.
//!
//! Every frequency-like quantity is stored in angular units (rad/s). Rates
//! quoted as `x/2π = … MHz` must be multiplied by [`TAU`] before they land
//! here; [`hz`] does that.

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::TAU;

/// Reduced Planck constant, J·s (CODATA 2018).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Spin density of YIG, m⁻³.
pub const YIG_SPIN_DENSITY: f64 = 4.22e27;

/// Gyromagnetic ratio γ in rad/s/T. The customary "28 GHz/T" is γ/2π.
pub const GYROMAGNETIC_RATIO: f64 = TAU * 28.0e9;

/// Relative tolerance for `delta_x = omega_x - omega_0` consistency.
pub const DETUNING_TOLERANCE: f64 = 1e-9;

/// Converts an ordinary frequency ν (Hz) to angular frequency 2πν (rad/s).
#[inline]
pub fn hz(nu: f64) -> f64 {
    TAU * nu
}

/// Which source of the magnon–phonon coupling is authoritative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingMode {
    /// `G_np` is given directly and the magnon detuning is not shifted.
    Effective,
    /// `G_np` follows from the self-consistent steady state driven by `B`.
    Microscopic,
}

impl CouplingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CouplingMode::Effective => "effective",
            CouplingMode::Microscopic => "microscopic",
        }
    }
}

impl core::str::FromStr for CouplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "effective" => Ok(CouplingMode::Effective),
            "microscopic" => Ok(CouplingMode::Microscopic),
            _ => Err(Error::InvalidValue {
                key: "coupling_mode",
                reason: "expected `effective` or `microscopic`",
            }),
        }
    }
}

/// Full parameter set of the two-cavity system, angular units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Cavity A resonance ω₁.
    pub omega_cav_1: Option<f64>,
    /// Cavity B resonance ω₂.
    pub omega_cav_2: Option<f64>,
    /// Atomic transition ω_u.
    pub omega_u: Option<f64>,
    pub omega_n1: Option<f64>,
    pub omega_n2: Option<f64>,
    /// Phonon frequency ω_p.
    pub omega_p: f64,
    /// Control-field (rotating frame) frequency ω₀.
    pub omega_0: Option<f64>,

    pub kappa_a: f64,
    pub kappa_p: f64,
    pub kappa_n1: f64,
    pub kappa_n2: f64,
    pub gamma_u: f64,

    pub g1: f64,
    pub g2: f64,
    /// Cavity–cavity photon tunneling.
    pub f: f64,
    /// Collective atom–photon coupling.
    pub g_au: f64,
    /// Single-magnon magnomechanical coupling (microscopic mode).
    pub g_np: f64,
    /// Effective magnomechanical coupling `G_np` (effective mode).
    pub g_np_direct: Option<Complex64>,
    pub coupling_mode: CouplingMode,

    pub delta_1: f64,
    pub delta_2: f64,
    pub delta_u: f64,
    pub delta_n1: f64,
    pub delta_n2: f64,

    /// Control-field amplitude B, tesla.
    pub b_field: Option<f64>,
    /// YIG sphere diameter, metres.
    pub sphere_diameter: Option<f64>,
    /// Spin density ρ, m⁻³.
    pub spin_density: f64,
    /// γ in rad/s/T.
    pub gyromagnetic_ratio: f64,

    /// Probe power P_d, watts.
    pub probe_power: Option<f64>,
    /// Probe frequency ω_d.
    pub probe_frequency: Option<f64>,
    /// Kerr coefficient K for the validity diagnostic.
    pub kerr: Option<f64>,
}

impl SystemParams {
    /// The experimental baseline: ω_p/2π = 10 MHz, κ_a/2π = 2.1 MHz,
    /// κ_p/2π = 100 Hz, κ_n/2π = 0.1 MHz, g₁,₂/2π = 1.5 MHz,
    /// G_np/2π = 3.5 MHz, G_au/2π = 6 MHz, γ_u/2π = 1 MHz, all detunings ω_p,
    /// ω₀/2π = 10 GHz, no tunneling.
    ///
    /// Absolute mode frequencies are left unset: only detunings enter the
    /// dynamics.
    pub fn baseline() -> Self {
        let omega_p = hz(10.0e6);
        SystemParams {
            omega_cav_1: None,
            omega_cav_2: None,
            omega_u: None,
            omega_n1: None,
            omega_n2: None,
            omega_p,
            omega_0: Some(hz(10.0e9)),
            kappa_a: hz(2.1e6),
            kappa_p: hz(100.0),
            kappa_n1: hz(0.1e6),
            kappa_n2: hz(0.1e6),
            gamma_u: hz(1.0e6),
            g1: hz(1.5e6),
            g2: hz(1.5e6),
            f: 0.0,
            g_au: hz(6.0e6),
            g_np: hz(1.0e-3),
            g_np_direct: Some(Complex64::new(hz(3.5e6), 0.0)),
            coupling_mode: CouplingMode::Effective,
            delta_1: omega_p,
            delta_2: omega_p,
            delta_u: omega_p,
            delta_n1: omega_p,
            delta_n2: omega_p,
            b_field: None,
            sphere_diameter: Some(250e-6),
            spin_density: YIG_SPIN_DENSITY,
            gyromagnetic_ratio: GYROMAGNETIC_RATIO,
            probe_power: None,
            probe_frequency: None,
            kerr: None,
        }
    }

    /// Checks every invariant; front ends call this after building or
    /// overriding a parameter set.
    pub fn validate(&self) -> Result<()> {
        positive_rate("omega_p_hz", self.omega_p)?;
        positive_rate("kappa_a_hz", self.kappa_a)?;
        positive_rate("kappa_p_hz", self.kappa_p)?;
        positive_rate("kappa_n1_hz", self.kappa_n1)?;
        positive_rate("kappa_n2_hz", self.kappa_n2)?;
        positive_rate("gamma_u_hz", self.gamma_u)?;

        non_negative("g1_hz", self.g1)?;
        non_negative("g2_hz", self.g2)?;
        non_negative("f_hz", self.f)?;
        non_negative("G_au_hz", self.g_au)?;
        non_negative("g_np_hz", self.g_np)?;
        if let Some(g) = self.g_np_direct {
            finite("G_np_hz", g.re)?;
            finite("G_np_im_hz", g.im)?;
        }

        for (key, value) in [
            ("delta_1_hz", self.delta_1),
            ("delta_2_hz", self.delta_2),
            ("delta_u_hz", self.delta_u),
            ("delta_n1_hz", self.delta_n1),
            ("delta_n2_hz", self.delta_n2),
        ] {
            finite(key, value)?;
        }
        if let Some(omega_0) = self.omega_0 {
            positive_rate("omega_0_hz", omega_0)?;
            for (key, mode, delta) in [
                ("delta_1_hz", self.omega_cav_1, self.delta_1),
                ("delta_2_hz", self.omega_cav_2, self.delta_2),
                ("delta_u_hz", self.omega_u, self.delta_u),
                ("delta_n1_hz", self.omega_n1, self.delta_n1),
                ("delta_n2_hz", self.omega_n2, self.delta_n2),
            ] {
                if let Some(omega) = mode {
                    check_detuning(key, omega, omega_0, delta)?;
                }
            }
        }
        for (key, value) in [
            ("omega_cav_1_hz", self.omega_cav_1),
            ("omega_cav_2_hz", self.omega_cav_2),
            ("omega_u_hz", self.omega_u),
            ("omega_n1_hz", self.omega_n1),
            ("omega_n2_hz", self.omega_n2),
        ] {
            if let Some(v) = value {
                finite(key, v)?;
            }
        }

        if let Some(b) = self.b_field {
            finite("B_field_tesla", b)?;
            if b < 0.0 {
                return Err(Error::InvalidValue {
                    key: "B_field_tesla",
                    reason: "drive amplitude must be non-negative",
                });
            }
        }
        if let Some(d) = self.sphere_diameter {
            positive("sphere_diameter_m", d)?;
        }
        positive("spin_density_per_m3", self.spin_density)?;
        positive("gyromagnetic_ratio_hz_per_tesla", self.gyromagnetic_ratio)?;
        if let Some(p) = self.probe_power {
            finite("P_d_watt", p)?;
            if p < 0.0 {
                return Err(Error::InvalidValue {
                    key: "P_d_watt",
                    reason: "power must be non-negative",
                });
            }
        }
        if let Some(w) = self.probe_frequency {
            positive("omega_d_hz", w)?;
        }
        if let Some(k) = self.kerr {
            finite("kerr_K_hz", k)?;
            if k < 0.0 {
                return Err(Error::InvalidValue {
                    key: "kerr_K_hz",
                    reason: "Kerr coefficient must be non-negative",
                });
            }
        }

        match self.coupling_mode {
            CouplingMode::Effective => {
                if self.g_np_direct.is_none() {
                    return Err(Error::MissingForMode {
                        key: "G_np_hz",
                        mode: "effective",
                    });
                }
            }
            CouplingMode::Microscopic => {
                if !(self.g_np > 0.0) {
                    return Err(Error::MissingForMode {
                        key: "g_np_hz",
                        mode: "microscopic",
                    });
                }
                if self.b_field.is_none() {
                    return Err(Error::MissingForMode {
                        key: "B_field_tesla",
                        mode: "microscopic",
                    });
                }
                if self.sphere_diameter.is_none() {
                    return Err(Error::MissingForMode {
                        key: "sphere_diameter_m",
                        mode: "microscopic",
                    });
                }
            }
        }
        Ok(())
    }

    /// Rabi frequency Ω of the control field for the configured B and sphere.
    pub fn rabi_frequency(&self) -> Result<f64> {
        let b = self.b_field.ok_or(Error::MissingForMode {
            key: "B_field_tesla",
            mode: "microscopic",
        })?;
        self.rabi_frequency_at(b)
    }

    /// Rabi frequency for an explicit field amplitude, keeping the sphere.
    pub fn rabi_frequency_at(&self, b_field: f64) -> Result<f64> {
        let d = self.sphere_diameter.ok_or(Error::MissingForMode {
            key: "sphere_diameter_m",
            mode: "microscopic",
        })?;
        rabi_frequency(b_field, d, self.spin_density, self.gyromagnetic_ratio)
    }

    /// Probe drive amplitude ε_d, when power and frequency are configured.
    pub fn drive_amplitude(&self) -> Option<Result<f64>> {
        match (self.probe_power, self.probe_frequency) {
            (Some(p), Some(w)) => Some(drive_amplitude(p, w, self.kappa_a)),
            _ => None,
        }
    }

    /// Sets Δ_{n₁} and Δ_{n₂} together, keeping absolute magnon frequencies
    /// consistent when they are known.
    pub fn set_magnon_detuning(&mut self, delta: f64) {
        self.delta_n1 = delta;
        self.delta_n2 = delta;
        if let Some(w0) = self.omega_0 {
            if self.omega_n1.is_some() {
                self.omega_n1 = Some(w0 + delta);
            }
            if self.omega_n2.is_some() {
                self.omega_n2 = Some(w0 + delta);
            }
        }
    }
}

/// Probe amplitude ε_d = sqrt(2 κ_a P_d / (ħ ω_d)).
pub fn drive_amplitude(power: f64, omega_d: f64, kappa_a: f64) -> Result<f64> {
    if !(omega_d > 0.0) || !omega_d.is_finite() {
        return Err(Error::InvalidValue {
            key: "omega_d_hz",
            reason: "probe frequency must be positive",
        });
    }
    if !(power >= 0.0) {
        return Err(Error::InvalidValue {
            key: "P_d_watt",
            reason: "power must be non-negative",
        });
    }
    Ok((2.0 * kappa_a * power / (HBAR * omega_d)).sqrt())
}

/// Number of spins N = ρ·(π/6)·d³ in a sphere of diameter `d`.
pub fn spin_count(sphere_diameter: f64, spin_density: f64) -> f64 {
    spin_density * core::f64::consts::PI / 6.0 * sphere_diameter.powi(3)
}

/// Rabi frequency Ω = (√5/4)·γ·√N·B of the magnon drive.
pub fn rabi_frequency(
    b_field: f64,
    sphere_diameter: f64,
    spin_density: f64,
    gyromagnetic_ratio: f64,
) -> Result<f64> {
    positive("sphere_diameter_m", sphere_diameter)?;
    positive("spin_density_per_m3", spin_density)?;
    positive("gyromagnetic_ratio_hz_per_tesla", gyromagnetic_ratio)?;
    if !(b_field >= 0.0) || !b_field.is_finite() {
        return Err(Error::InvalidValue {
            key: "B_field_tesla",
            reason: "drive amplitude must be non-negative",
        });
    }
    let n = spin_count(sphere_diameter, spin_density);
    Ok(5.0.sqrt() / 4.0 * gyromagnetic_ratio * n.sqrt() * b_field)
}

fn finite(key: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { key })
    }
}

fn positive_rate(key: &'static str, value: f64) -> Result<()> {
    finite(key, value)?;
    if value < 0.0 {
        Err(Error::NegativeRate { key, value })
    } else if value == 0.0 {
        Err(Error::ZeroRate { key })
    } else {
        Ok(())
    }
}

fn positive(key: &'static str, value: f64) -> Result<()> {
    finite(key, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidValue {
            key,
            reason: "must be strictly positive",
        })
    }
}

fn non_negative(key: &'static str, value: f64) -> Result<()> {
    finite(key, value)?;
    if value < 0.0 {
        Err(Error::NegativeCoupling { key, value })
    } else {
        Ok(())
    }
}

fn check_detuning(key: &'static str, omega: f64, omega_0: f64, delta: f64) -> Result<()> {
    let implied = omega - omega_0;
    let scale = omega.abs().max(omega_0.abs());
    if (delta - implied).abs() <= DETUNING_TOLERANCE * scale {
        Ok(())
    } else {
        Err(Error::InconsistentDetuning {
            key,
            given: delta,
            implied,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn baseline_is_valid() {
        let p = SystemParams::baseline();
        p.validate().unwrap();
        assert_eq!(p.omega_p, TAU * 1.0e7);
        assert_eq!(p.delta_n1, p.omega_p);
    }

    #[test]
    fn negative_rate_is_rejected() {
        let mut p = SystemParams::baseline();
        p.kappa_a = -TAU;
        let err = p.validate().unwrap_err();
        assert!(matches!(err, Error::NegativeRate { key: "kappa_a_hz", .. }));
        assert!(alloc::format!("{err}").contains("negative rate"));
    }

    #[test]
    fn zero_rate_is_rejected() {
        let mut p = SystemParams::baseline();
        p.kappa_p = 0.0;
        assert_eq!(p.validate(), Err(Error::ZeroRate { key: "kappa_p_hz" }));
    }

    #[test]
    fn negative_coupling_is_rejected() {
        let mut p = SystemParams::baseline();
        p.f = -1.0;
        assert!(matches!(
            p.validate(),
            Err(Error::NegativeCoupling { key: "f_hz", .. })
        ));
    }

    #[test]
    fn detuning_must_match_frequency_pair() {
        let mut p = SystemParams::baseline();
        let w0 = p.omega_0.unwrap();
        p.omega_n1 = Some(w0 + p.omega_p);
        p.validate().unwrap();
        p.delta_n1 = 0.5 * p.omega_p;
        assert!(matches!(
            p.validate(),
            Err(Error::InconsistentDetuning { key: "delta_n1_hz", .. })
        ));
        p.set_magnon_detuning(0.8 * p.omega_p);
        p.validate().unwrap();
    }

    #[test]
    fn mode_requirements() {
        let mut p = SystemParams::baseline();
        p.g_np_direct = None;
        assert!(matches!(
            p.validate(),
            Err(Error::MissingForMode { key: "G_np_hz", .. })
        ));
        p.coupling_mode = CouplingMode::Microscopic;
        assert!(matches!(
            p.validate(),
            Err(Error::MissingForMode { key: "B_field_tesla", .. })
        ));
        p.b_field = Some(1e-3);
        p.validate().unwrap();
        p.g_np = 0.0;
        assert!(matches!(
            p.validate(),
            Err(Error::MissingForMode { key: "g_np_hz", .. })
        ));
    }

    #[test]
    fn drive_amplitude_values() {
        assert_eq!(drive_amplitude(0.0, hz(10e9), hz(2.1e6)).unwrap(), 0.0);
        let e1 = drive_amplitude(1e-3, hz(10e9), hz(2.1e6)).unwrap();
        let e4 = drive_amplitude(4e-3, hz(10e9), hz(2.1e6)).unwrap();
        assert!(rel(e4, 2.0 * e1) < 1e-15);
        // Independent high-precision evaluation of sqrt(2κP/(ħω)).
        assert!(rel(e1, 63_108_312_120_326.218) < 1e-12);
        assert!(drive_amplitude(1e-3, 0.0, 1.0).is_err());
        assert!(drive_amplitude(1e-3, -1.0, 1.0).is_err());
    }

    #[test]
    fn rabi_frequency_values() {
        let g = GYROMAGNETIC_RATIO;
        assert_eq!(rabi_frequency(0.0, 250e-6, YIG_SPIN_DENSITY, g).unwrap(), 0.0);
        let w = rabi_frequency(5e-5, 250e-6, YIG_SPIN_DENSITY, g).unwrap();
        // N = 3.4524794266e16, Ω from the formula at 30 digits.
        assert!(rel(w, 913_689_143_261_883.68) < 1e-12);
        let w2 = rabi_frequency(5e-5, 500e-6, YIG_SPIN_DENSITY, g).unwrap();
        assert!(rel(w2, w * 2.0.powf(1.5)) < 1e-14);
        assert!(rabi_frequency(5e-5, 0.0, YIG_SPIN_DENSITY, g).is_err());
        assert!(rabi_frequency(5e-5, -1e-6, YIG_SPIN_DENSITY, g).is_err());
    }

    #[test]
    fn rabi_frequency_scaling() {
        let g = GYROMAGNETIC_RATIO;
        let base = rabi_frequency(1e-5, 250e-6, 1e27, g).unwrap();
        assert!(rel(rabi_frequency(3e-5, 250e-6, 1e27, g).unwrap(), 3.0 * base) < 1e-14);
        assert!(rel(rabi_frequency(1e-5, 250e-6, 4e27, g).unwrap(), 2.0 * base) < 1e-14);
    }
}
