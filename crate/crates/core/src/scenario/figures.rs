//! Built-in configurations reproducing the published sweeps.
//!
//! | target | swept | range | fixed |
//! |---|---|---|---|
//! | `fig1a` | κ/2π | 2×10⁵ … 5×10⁶ Hz, 25 linear | L = 1 mm |
//! | `fig1b` | κ/2π | 5×10⁴ … 5×10⁶ Hz, 25 log | L = 5 mm |
//! | `fig1c` | Δ_a/ω_m | −2 … 2, 17 linear | L = 5 mm, κ/2π ∈ {5×10⁵, 10⁶} Hz |
//! | `fig1d` | κ/2π | 1.5×10⁵ … 6×10⁵ Hz, 19 linear | L = 5 mm |
//! | `fig2` | none | single point | L = 1 mm, κ/2π = 2.5×10⁶ Hz |
//! | `fig3` | κ/2π, reported as χ_eff | 1.6×10⁶ … 4×10⁶ Hz, 13 linear | L = 1 mm |
//!
//! Common to all: m = 10 ng, ω_m/2π = 10 MHz, γ_m/2π = 100 Hz, T = 0.1 mK,
//! P = 35 mW, λ = 1064 nm, Δ̃_c = ω_m, Δ_a = −ω_m, γ_a = κ, g_N = χ_eff.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::{
    csv_number,
    apply_override, ensure_parent, output_paths, run_scenario, write_meta, write_outputs, Observable, ScenarioConfig,
    ScenarioResult, Scale, SweepSpec, WignerConfig,
};
use crate::dynamics::{self, NoiseModel};
use crate::error::{Error, Result};
use crate::model::solve_operating_point;
use crate::nonclassicality::{conditioned_mirror_state, evaluate_field, Detection, Grid, WignerField};
use crate::nonlocality::MkConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig2,
    Fig3,
}

impl Figure {
    pub const ALL: [Figure; 6] = [Figure::Fig1a, Figure::Fig1b, Figure::Fig1c, Figure::Fig1d, Figure::Fig2, Figure::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1a => "fig1a",
            Figure::Fig1b => "fig1b",
            Figure::Fig1c => "fig1c",
            Figure::Fig1d => "fig1d",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown figure {s:?}; expected one of fig1a, fig1b, fig1c, fig1d, fig2, fig3"
                ))
            })
    }
}

/// Parameter block shared by every figure, at cavity length `length` (m).
pub fn base_params(length: f64) -> Map<String, Value> {
    json!({
        "mass_si": 10e-12,
        "omega_m_over_2pi_hz": 1e7,
        "gamma_m_over_2pi_hz": 100.0,
        "temperature_k": 1e-4,
        "power_si": 35e-3,
        "wavelength_si": 1064e-9,
        "length_si": length,
        "kappa_over_2pi_hz": 2.5e6,
        "gamma_a_equals_kappa": true,
        "delta_a_over_omega_m": -1.0,
        "delta_c_eff_over_omega_m": 1.0,
        "g_n_equals_chi_eff": true
    })
    .as_object()
    .expect("object literal")
    .clone()
}

fn kappa_sweep(from: f64, to: f64, points: usize, scale: Scale) -> Option<SweepSpec> {
    Some(SweepSpec {
        parameter: "kappa_over_2pi_hz".into(),
        from,
        to,
        points,
        scale,
    })
}

fn scenario(params: Map<String, Value>, sweep: Option<SweepSpec>, observables: Vec<Observable>) -> ScenarioConfig {
    ScenarioConfig {
        params,
        sweep,
        observables,
        mk: MkConfig::default(),
        wigner: WignerConfig::default(),
        noise: Default::default(),
        output: None,
    }
}

const ENTANGLEMENTS: [Observable; 6] = [
    Observable::E12,
    Observable::E23,
    Observable::E13,
    Observable::E1Vs23,
    Observable::E2Vs13,
    Observable::E3Vs12,
];

/// The sweeps behind a figure, each tagged with a file-name suffix (empty
/// for single-sweep figures). `fig2` has none; its fields come from
/// [`fig2_fields`].
pub fn builtin(figure: Figure) -> Vec<(String, ScenarioConfig)> {
    use Observable::*;
    match figure {
        Figure::Fig1a => vec![(
            String::new(),
            scenario(base_params(1e-3), kappa_sweep(2e5, 5e6, 25, Scale::Linear), vec![E3, Mmax, ChiEff]),
        )],
        Figure::Fig1b => vec![(
            String::new(),
            scenario(base_params(5e-3), kappa_sweep(5e4, 5e6, 25, Scale::Log), vec![E3, Mmax, ChiEff]),
        )],
        Figure::Fig1c => [(5e5, "kappa5e5"), (1e6, "kappa1e6")]
            .into_iter()
            .map(|(k, tag)| {
                let mut p = base_params(5e-3);
                p.insert("kappa_over_2pi_hz".into(), json!(k));
                let sweep = SweepSpec {
                    parameter: "delta_a_over_omega_m".into(),
                    from: -2.0,
                    to: 2.0,
                    points: 17,
                    scale: Scale::Linear,
                };
                (tag.to_string(), scenario(p, Some(sweep), vec![E3, Mmax]))
            })
            .collect(),
        Figure::Fig1d => {
            let mut obs = ENTANGLEMENTS.to_vec();
            obs.push(Mmax);
            vec![(
                String::new(),
                scenario(base_params(5e-3), kappa_sweep(1.5e5, 6e5, 19, Scale::Linear), obs),
            )]
        }
        Figure::Fig2 => vec![],
        Figure::Fig3 => vec![(
            String::new(),
            scenario(base_params(1e-3), kappa_sweep(1.6e6, 4.0e6, 13, Scale::Linear), vec![ChiEff, Nw, E3]),
        )],
    }
}

/// Knobs shared by all reproduction targets.
#[derive(Debug, Clone, Default)]
pub struct ReproduceOptions {
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    /// `key=value` parameter overrides, applied to every built-in config.
    pub overrides: Vec<String>,
    /// Replaces the detection channel of `Nw` columns.
    pub detect: Option<Detection>,
}

impl ReproduceOptions {
    fn apply(&self, cfg: &mut ScenarioConfig) -> Result<()> {
        if let Some(s) = self.seed {
            cfg.mk.seed = s;
        }
        if let Some(n) = self.starts {
            cfg.mk.starts = n;
        }
        if let Some(d) = self.detect {
            cfg.wigner.detect = d;
        }
        for o in &self.overrides {
            apply_override(&mut cfg.params, o)?;
        }
        cfg.validate()
    }
}

/// A conditioned mirror Wigner function on its automatic grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedField {
    pub detect: Detection,
    pub click_probability: f64,
    pub nw: f64,
    pub integral: f64,
    pub field: WignerField,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reproduction {
    pub figure: Figure,
    pub runs: Vec<(String, ScenarioResult)>,
    pub fields: Vec<ConditionedField>,
}

/// Conditioned mirror fields for cavity, atom and joint detection at one
/// parameter point.
pub fn fig2_fields(params: &Map<String, Value>, grid: Option<Grid>) -> Result<Vec<ConditionedField>> {
    let p = super::resolve(params)?;
    let op = solve_operating_point(&p)?;
    let state = dynamics::steady_state(&dynamics::build_model(&op, NoiseModel::Markovian))?;
    dynamics::physicality(&state)
        .physical
        .then_some(())
        .ok_or_else(|| Error::Numerical("steady state is unphysical".into()))?;
    [Detection::Cavity, Detection::Atoms, Detection::Both]
        .into_iter()
        .map(|d| {
            let mix = conditioned_mirror_state(&state, d)?;
            let g = grid.unwrap_or_else(|| Grid::auto(&mix));
            let field = evaluate_field(&mix, &g)?;
            Ok(ConditionedField {
                detect: d,
                click_probability: mix.normalization,
                nw: field.negativity_volume(),
                integral: field.integral(),
                field,
            })
        })
        .collect()
}

/// Compute a figure's data without touching the filesystem.
pub fn reproduce_data(figure: Figure, opts: &ReproduceOptions) -> Result<Reproduction> {
    if figure == Figure::Fig2 {
        let mut params = base_params(1e-3);
        for o in &opts.overrides {
            apply_override(&mut params, o)?;
        }
        return Ok(Reproduction {
            figure,
            runs: vec![],
            fields: fig2_fields(&params, None)?,
        });
    }
    let runs = builtin(figure)
        .into_iter()
        .map(|(tag, mut cfg)| {
            opts.apply(&mut cfg)?;
            Ok((tag, run_scenario(&cfg)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Reproduction {
        figure,
        runs,
        fields: vec![],
    })
}

fn tagged(prefix: &str, tag: &str) -> String {
    if tag.is_empty() {
        prefix.to_string()
    } else {
        format!("{prefix}_{tag}")
    }
}

/// Write a reproduction under `prefix`; returns the CSV paths written.
pub fn write_reproduction(rep: &Reproduction, prefix: &str) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (tag, result) in &rep.runs {
        let p = tagged(prefix, tag);
        write_outputs(result, &p)?;
        written.push(output_paths(&p).0);
    }
    if !rep.fields.is_empty() {
        let (csv, json, meta) = output_paths(prefix);
        ensure_parent(&csv)?;
        let mut summary = String::from("detect,Nw,click_probability,min_value,integral\n");
        for f in &rep.fields {
            summary.push_str(&format!(
                "{},{},{},{},{}\n",
                f.detect,
                csv_number(f.nw),
                csv_number(f.click_probability),
                csv_number(f.field.min()),
                csv_number(f.integral)
            ));
            let path = PathBuf::from(format!("{prefix}_{}.csv", f.detect));
            f.field.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            written.push(path);
        }
        std::fs::write(&csv, summary)?;
        std::fs::write(&json, serde_json::to_string(rep)? + "\n")?;
        write_meta(&meta)?;
        written.insert(0, csv);
    }
    Ok(written)
}

pub fn reproduce(figure: Figure, prefix: &str, opts: &ReproduceOptions) -> Result<Vec<PathBuf>> {
    write_reproduction(&reproduce_data(figure, opts)?, prefix)
}
