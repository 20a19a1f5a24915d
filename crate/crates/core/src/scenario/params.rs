//! Flat JSON parameter maps and their resolution into [`PhysicalParams`].
//!
//! Every physical quantity belongs to a group with several accepted spellings
//! (`*_si`, `*_over_2pi_hz`, `*_over_omega_m`, ...). At most one key per group
//! may be present; a swept key replaces whatever its group held.

use serde_json::{Map, Value};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{kappa_from_finesse, AtomCoupling, Detuning, PhysicalParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    Mass,
    OmegaM,
    GammaM,
    Temperature,
    Power,
    Wavelength,
    Length,
    Kappa,
    GammaA,
    DeltaA,
    DeltaC,
    Coupling,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Unit {
    Si,
    Hz,
    OverOmegaM,
    Finesse,
    Flag,
    Millikelvin,
}

/// Every accepted key: (name, group, unit, sets an effective detuning).
const KEYS: &[(&str, Group, Unit, bool)] = &[
    ("mass_si", Group::Mass, Unit::Si, false),
    ("omega_m_si", Group::OmegaM, Unit::Si, false),
    ("omega_m_over_2pi_hz", Group::OmegaM, Unit::Hz, false),
    ("gamma_m_si", Group::GammaM, Unit::Si, false),
    ("gamma_m_over_2pi_hz", Group::GammaM, Unit::Hz, false),
    ("temperature_si", Group::Temperature, Unit::Si, false),
    ("temperature_k", Group::Temperature, Unit::Si, false),
    ("temperature_mk", Group::Temperature, Unit::Millikelvin, false),
    ("power_si", Group::Power, Unit::Si, false),
    ("wavelength_si", Group::Wavelength, Unit::Si, false),
    ("length_si", Group::Length, Unit::Si, false),
    ("kappa_si", Group::Kappa, Unit::Si, false),
    ("kappa_over_2pi_hz", Group::Kappa, Unit::Hz, false),
    ("finesse", Group::Kappa, Unit::Finesse, false),
    ("gamma_a_si", Group::GammaA, Unit::Si, false),
    ("gamma_a_over_2pi_hz", Group::GammaA, Unit::Hz, false),
    ("gamma_a_equals_kappa", Group::GammaA, Unit::Flag, false),
    ("delta_a_si", Group::DeltaA, Unit::Si, false),
    ("delta_a_over_2pi_hz", Group::DeltaA, Unit::Hz, false),
    ("delta_a_over_omega_m", Group::DeltaA, Unit::OverOmegaM, false),
    ("delta_c_si", Group::DeltaC, Unit::Si, false),
    ("delta_c_over_2pi_hz", Group::DeltaC, Unit::Hz, false),
    ("delta_c_over_omega_m", Group::DeltaC, Unit::OverOmegaM, false),
    ("delta_c_eff_si", Group::DeltaC, Unit::Si, true),
    ("delta_c_eff_over_2pi_hz", Group::DeltaC, Unit::Hz, true),
    ("delta_c_eff_over_omega_m", Group::DeltaC, Unit::OverOmegaM, true),
    ("g_n_si", Group::Coupling, Unit::Si, false),
    ("g_n_over_2pi_hz", Group::Coupling, Unit::Hz, false),
    ("g_n_equals_chi_eff", Group::Coupling, Unit::Flag, false),
];

fn lookup(key: &str) -> Option<(Group, Unit, bool)> {
    KEYS.iter()
        .find(|(k, ..)| *k == key)
        .map(|&(_, g, u, e)| (g, u, e))
}

/// Names of all numeric (sweepable) keys.
pub fn sweepable_keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter().filter(|(_, _, u, _)| *u != Unit::Flag).map(|(k, ..)| *k)
}

pub fn is_sweepable(key: &str) -> bool {
    matches!(lookup(key), Some((_, u, _)) if u != Unit::Flag)
}

/// Copy of `map` with `key = value`, dropping any other key of the same group.
pub fn with_value(map: &Map<String, Value>, key: &str, value: f64) -> Result<Map<String, Value>> {
    let (group, unit, _) = lookup(key).ok_or_else(|| Error::config(format!("unknown parameter {key:?}")))?;
    if unit == Unit::Flag {
        return Err(Error::config(format!("{key:?} is a flag, not a number")));
    }
    let mut out: Map<String, Value> = map
        .iter()
        .filter(|(k, _)| lookup(k).map(|(g, ..)| g) != Some(group))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let num = serde_json::Number::from_f64(value)
        .ok_or_else(|| Error::config(format!("{key} must be finite, got {value}")))?;
    out.insert(key.to_string(), Value::Number(num));
    Ok(out)
}

/// Parse a `key=value` override; `true`/`false` set flags.
pub fn apply_override(map: &mut Map<String, Value>, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(format!("override {assignment:?} is not key=value")))?;
    let (key, raw) = (key.trim(), raw.trim());
    let (_, unit, _) = lookup(key).ok_or_else(|| Error::config(format!("unknown parameter {key:?}")))?;
    if unit == Unit::Flag {
        let flag: bool = raw
            .parse()
            .map_err(|_| Error::config(format!("{key} expects true or false, got {raw:?}")))?;
        let group = lookup(key).map(|(g, ..)| g);
        map.retain(|k, _| lookup(k).map(|(g, ..)| g) != group);
        map.insert(key.to_string(), Value::Bool(flag));
        return Ok(());
    }
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::config(format!("{key} expects a number, got {raw:?}")))?;
    *map = with_value(map, key, v)?;
    Ok(())
}

struct Entry {
    key: String,
    unit: Unit,
    effective: bool,
    number: Option<f64>,
    flag: Option<bool>,
}

/// Resolve a flat key map into validated physical parameters.
pub fn resolve(map: &Map<String, Value>) -> Result<PhysicalParams> {
    let mut groups: Vec<(Group, Entry)> = Vec::new();
    for (k, v) in map {
        let (g, unit, effective) = lookup(k).ok_or_else(|| {
            Error::config(format!("unknown parameter {k:?}"))
        })?;
        if let Some((_, other)) = groups.iter().find(|(h, _)| *h == g) {
            return Err(Error::config(format!(
                "{k:?} and {:?} set the same quantity",
                other.key
            )));
        }
        let (number, flag) = match (unit, v) {
            (Unit::Flag, Value::Bool(b)) => (None, Some(*b)),
            (Unit::Flag, _) => return Err(Error::config(format!("{k} must be true or false"))),
            (_, Value::Number(n)) => (n.as_f64(), None),
            _ => return Err(Error::config(format!("{k} must be a number"))),
        };
        groups.push((
            g,
            Entry {
                key: k.clone(),
                unit,
                effective,
                number,
                flag,
            },
        ));
    }
    let get = |g: Group| groups.iter().find(|(h, _)| *h == g).map(|(_, e)| e);
    let need = |g: Group, what: &str| get(g).ok_or_else(|| Error::config(format!("missing {what}")));

    let plain = |e: &Entry, omega_m: f64| -> Result<f64> {
        let n = e.number.ok_or_else(|| Error::config(format!("{} must be a number", e.key)))?;
        Ok(match e.unit {
            Unit::Si => n,
            Unit::Hz => 2.0 * PI * n,
            Unit::OverOmegaM => n * omega_m,
            Unit::Millikelvin => 1e-3 * n,
            Unit::Finesse | Unit::Flag => unreachable!("handled by caller"),
        })
    };

    let omega_m = plain(need(Group::OmegaM, "mechanical frequency (omega_m_over_2pi_hz)")?, 0.0)?;
    let mass = plain(need(Group::Mass, "mirror mass (mass_si)")?, omega_m)?;
    let gamma_m = plain(need(Group::GammaM, "mechanical damping (gamma_m_over_2pi_hz)")?, omega_m)?;
    let temperature = match get(Group::Temperature) {
        Some(e) => plain(e, omega_m)?,
        None => 0.0,
    };
    let power = plain(need(Group::Power, "pump power (power_si)")?, omega_m)?;
    let wavelength = plain(need(Group::Wavelength, "pump wavelength (wavelength_si)")?, omega_m)?;
    let length = plain(need(Group::Length, "cavity length (length_si)")?, omega_m)?;
    let ke = need(Group::Kappa, "cavity decay (kappa_over_2pi_hz or finesse)")?;
    let kappa = if ke.unit == Unit::Finesse {
        kappa_from_finesse(length, ke.number.unwrap_or(f64::NAN)).map_err(|e| Error::config(e.to_string()))?
    } else {
        plain(ke, omega_m)?
    };
    let ge = need(Group::GammaA, "atomic decay (gamma_a_over_2pi_hz or gamma_a_equals_kappa)")?;
    let gamma_a = match ge.flag {
        Some(true) => kappa,
        Some(false) => return Err(Error::config("gamma_a_equals_kappa = false leaves γ_a unset")),
        None => plain(ge, omega_m)?,
    };
    let delta_a = plain(need(Group::DeltaA, "atomic detuning (delta_a_over_omega_m)")?, omega_m)?;
    let de = need(Group::DeltaC, "cavity detuning (delta_c_eff_over_omega_m)")?;
    let dc = plain(de, omega_m)?;
    let detuning = if de.effective {
        Detuning::Effective(dc)
    } else {
        Detuning::Raw(dc)
    };
    let ce = need(Group::Coupling, "atom coupling (g_n_over_2pi_hz or g_n_equals_chi_eff)")?;
    let coupling = match ce.flag {
        Some(true) => AtomCoupling::MatchOptomechanical,
        Some(false) => return Err(Error::config("g_n_equals_chi_eff = false leaves g_N unset")),
        None => AtomCoupling::Fixed(plain(ce, omega_m)?),
    };
    let p = PhysicalParams {
        mass,
        omega_m,
        gamma_m,
        temperature,
        power,
        wavelength,
        length,
        kappa,
        gamma_a,
        delta_a,
        detuning,
        coupling,
    };
    p.validate().map_err(|e| Error::config(e.to_string()))?;
    Ok(p)
}
