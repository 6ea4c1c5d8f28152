//! Flat `key = value` parameter files.
//!
//! Frequencies are written as ordinary frequencies ν in hertz (`*_hz`) and
//! stored internally as ω = 2πν. Each `*_hz` key also accepts an angular
//! spelling with `_rad_s` in place of `_hz`, which the serializer falls back
//! to when no decimal ν maps exactly onto the stored ω.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use magnomech_core::params::{CouplingMode, GYROMAGNETIC_RATIO, YIG_SPIN_DENSITY};
use magnomech_core::{Complex64, SystemParams, TAU};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{key}` given more than once")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key}` has invalid value `{value}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing mandatory key `{0}`")]
    Missing(&'static str),
    #[error("`G_np_im_hz` needs `G_np_hz`")]
    OrphanImaginary,
    #[error(transparent)]
    Invalid(#[from] magnomech_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Hz,
    Tesla,
    Metre,
    Watt,
    PerCubicMetre,
    HzPerTesla,
}

/// Every recognised key, in the order the serializer writes them.
const KEYS: &[(&str, Unit)] = &[
    ("omega_p_hz", Unit::Hz),
    ("omega_0_hz", Unit::Hz),
    ("omega_cav_1_hz", Unit::Hz),
    ("omega_cav_2_hz", Unit::Hz),
    ("omega_u_hz", Unit::Hz),
    ("omega_n1_hz", Unit::Hz),
    ("omega_n2_hz", Unit::Hz),
    ("kappa_a_hz", Unit::Hz),
    ("kappa_p_hz", Unit::Hz),
    ("kappa_n1_hz", Unit::Hz),
    ("kappa_n2_hz", Unit::Hz),
    ("gamma_u_hz", Unit::Hz),
    ("g1_hz", Unit::Hz),
    ("g2_hz", Unit::Hz),
    ("f_hz", Unit::Hz),
    ("G_au_hz", Unit::Hz),
    ("g_np_hz", Unit::Hz),
    ("G_np_hz", Unit::Hz),
    ("G_np_im_hz", Unit::Hz),
    ("delta_1_hz", Unit::Hz),
    ("delta_2_hz", Unit::Hz),
    ("delta_u_hz", Unit::Hz),
    ("delta_n1_hz", Unit::Hz),
    ("delta_n2_hz", Unit::Hz),
    ("B_field_tesla", Unit::Tesla),
    ("sphere_diameter_m", Unit::Metre),
    ("spin_density_per_m3", Unit::PerCubicMetre),
    ("gyromagnetic_ratio_hz_per_tesla", Unit::HzPerTesla),
    ("P_d_watt", Unit::Watt),
    ("omega_d_hz", Unit::Hz),
    ("kerr_K_hz", Unit::Hz),
];

pub const MODE_KEY: &str = "coupling_mode";

/// Keys that must appear in every file.
pub const MANDATORY: &[&str] = &[
    "omega_p_hz",
    "kappa_a_hz",
    "kappa_p_hz",
    "kappa_n1_hz",
    "gamma_u_hz",
    "g1_hz",
    "G_au_hz",
];

fn angular_alias(key: &str) -> Option<String> {
    key.contains("_hz").then(|| key.replacen("_hz", "_rad_s", 1))
}

/// Resolves a file key (either spelling) to its canonical name and the factor
/// converting the file value to internal units.
fn lookup(key: &str) -> Option<(&'static str, f64)> {
    KEYS.iter().find_map(|&(name, unit)| {
        let factor = match unit {
            Unit::Hz | Unit::HzPerTesla => TAU,
            _ => 1.0,
        };
        if name == key {
            Some((name, factor))
        } else if matches!(unit, Unit::Hz | Unit::HzPerTesla) && angular_alias(name).as_deref() == Some(key) {
            Some((name, 1.0))
        } else {
            None
        }
    })
}

/// Parses and validates a parameter file.
pub fn parse_config(text: &str) -> Result<SystemParams, ConfigError> {
    let mut values: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut mode = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, v)| !k.is_empty() && !v.is_empty())
            .ok_or(ConfigError::Syntax { line })?;
        let bad_value = || ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
        };
        if key == MODE_KEY {
            if mode.replace(value.parse::<CouplingMode>().map_err(|_| bad_value())?).is_some() {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            continue;
        }
        let (name, factor) = lookup(key).ok_or_else(|| ConfigError::UnknownKey {
            line,
            key: key.to_string(),
        })?;
        let number: f64 = value.parse().map_err(|_| bad_value())?;
        if !number.is_finite() {
            return Err(bad_value());
        }
        if values.insert(name, number * factor).is_some() {
            return Err(ConfigError::Duplicate {
                line,
                key: name.to_string(),
            });
        }
    }
    build(&values, mode.unwrap_or(CouplingMode::Effective))
}

fn build(values: &BTreeMap<&'static str, f64>, mode: CouplingMode) -> Result<SystemParams, ConfigError> {
    let get = |key: &str| values.get(key).copied();
    let need = |key: &'static str| get(key).ok_or(ConfigError::Missing(key));
    for key in MANDATORY {
        need(key)?;
    }
    let omega_p = need("omega_p_hz")?;
    let omega_0 = get("omega_0_hz");
    let detuning = |key: &str, mode_key: &str| {
        get(key)
            .or_else(|| Some(get(mode_key)? - omega_0?))
            .unwrap_or(omega_p)
    };
    let kappa_n1 = need("kappa_n1_hz")?;
    let g1 = need("g1_hz")?;
    let g_np_direct = match (get("G_np_hz"), get("G_np_im_hz")) {
        (Some(re), im) => Some(Complex64::new(re, im.unwrap_or(0.0))),
        (None, Some(_)) => return Err(ConfigError::OrphanImaginary),
        (None, None) => None,
    };
    let params = SystemParams {
        omega_cav_1: get("omega_cav_1_hz"),
        omega_cav_2: get("omega_cav_2_hz"),
        omega_u: get("omega_u_hz"),
        omega_n1: get("omega_n1_hz"),
        omega_n2: get("omega_n2_hz"),
        omega_p,
        omega_0,
        kappa_a: need("kappa_a_hz")?,
        kappa_p: need("kappa_p_hz")?,
        kappa_n1,
        kappa_n2: get("kappa_n2_hz").unwrap_or(kappa_n1),
        gamma_u: need("gamma_u_hz")?,
        g1,
        g2: get("g2_hz").unwrap_or(g1),
        f: get("f_hz").unwrap_or(0.0),
        g_au: need("G_au_hz")?,
        g_np: get("g_np_hz").unwrap_or(0.0),
        g_np_direct,
        coupling_mode: mode,
        delta_1: detuning("delta_1_hz", "omega_cav_1_hz"),
        delta_2: detuning("delta_2_hz", "omega_cav_2_hz"),
        delta_u: detuning("delta_u_hz", "omega_u_hz"),
        delta_n1: detuning("delta_n1_hz", "omega_n1_hz"),
        delta_n2: detuning("delta_n2_hz", "omega_n2_hz"),
        b_field: get("B_field_tesla"),
        sphere_diameter: get("sphere_diameter_m"),
        spin_density: get("spin_density_per_m3").unwrap_or(YIG_SPIN_DENSITY),
        gyromagnetic_ratio: get("gyromagnetic_ratio_hz_per_tesla").unwrap_or(GYROMAGNETIC_RATIO),
        probe_power: get("P_d_watt"),
        probe_frequency: get("omega_d_hz"),
        kerr: get("kerr_K_hz"),
    };
    params.validate()?;
    Ok(params)
}

/// The decimal ν with 2π·ν == ω exactly, if one exists near ω/2π.
pub fn exact_hz(omega: f64) -> Option<f64> {
    let start = omega / TAU;
    let mut down = start;
    let mut up = start;
    for _ in 0..8 {
        if TAU * down == omega {
            return Some(down);
        }
        if TAU * up == omega {
            return Some(up);
        }
        down = down.next_down();
        up = up.next_up();
    }
    None
}

/// Writes a parameter file that [`parse_config`] reads back to exactly
/// `params`.
pub fn serialize_config(params: &SystemParams) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODE_KEY} = {}", params.coupling_mode.as_str());
    for (key, value) in entries(params) {
        let Some(value) = value else { continue };
        let (_, unit) = KEYS.iter().find(|(k, _)| *k == key).copied().unwrap();
        match unit {
            Unit::Hz | Unit::HzPerTesla => match exact_hz(value) {
                Some(nu) => {
                    let _ = writeln!(out, "{key} = {nu:e}");
                }
                None => {
                    let alias = angular_alias(key).unwrap();
                    let _ = writeln!(out, "{alias} = {value:e}");
                }
            },
            _ => {
                let _ = writeln!(out, "{key} = {value:e}");
            }
        }
    }
    out
}

fn entries(p: &SystemParams) -> Vec<(&'static str, Option<f64>)> {
    let im = p.g_np_direct.map(|g| g.im).filter(|v| *v != 0.0);
    vec![
        ("omega_p_hz", Some(p.omega_p)),
        ("omega_0_hz", p.omega_0),
        ("omega_cav_1_hz", p.omega_cav_1),
        ("omega_cav_2_hz", p.omega_cav_2),
        ("omega_u_hz", p.omega_u),
        ("omega_n1_hz", p.omega_n1),
        ("omega_n2_hz", p.omega_n2),
        ("kappa_a_hz", Some(p.kappa_a)),
        ("kappa_p_hz", Some(p.kappa_p)),
        ("kappa_n1_hz", Some(p.kappa_n1)),
        ("kappa_n2_hz", Some(p.kappa_n2)),
        ("gamma_u_hz", Some(p.gamma_u)),
        ("g1_hz", Some(p.g1)),
        ("g2_hz", Some(p.g2)),
        ("f_hz", Some(p.f)),
        ("G_au_hz", Some(p.g_au)),
        ("g_np_hz", Some(p.g_np)),
        ("G_np_hz", p.g_np_direct.map(|g| g.re)),
        ("G_np_im_hz", im),
        ("delta_1_hz", Some(p.delta_1)),
        ("delta_2_hz", Some(p.delta_2)),
        ("delta_u_hz", Some(p.delta_u)),
        ("delta_n1_hz", Some(p.delta_n1)),
        ("delta_n2_hz", Some(p.delta_n2)),
        ("B_field_tesla", p.b_field),
        ("sphere_diameter_m", p.sphere_diameter),
        ("spin_density_per_m3", Some(p.spin_density)),
        ("gyromagnetic_ratio_hz_per_tesla", Some(p.gyromagnetic_ratio)),
        ("P_d_watt", p.probe_power),
        ("omega_d_hz", p.probe_frequency),
        ("kerr_K_hz", p.kerr),
    ]
}
