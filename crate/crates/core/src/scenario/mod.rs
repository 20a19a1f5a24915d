//! Configuration, sweeps and result files.

pub mod figures;
mod params;

pub use params::{apply_override, is_sweepable, resolve, sweepable_keys, with_value};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::dynamics::{self, physicality, stability, NoiseModel};
use crate::error::{Error, Result};
use crate::gaussian::{pairwise_log_negativity, log_negativity, tripartite_negativity, GaussianState, Mode, Partition};
use crate::model::{solve_operating_point, OperatingPoint, PhysicalParams};
use crate::nonclassicality::{conditioned_mirror_state, negativity_volume, Detection, Grid};
use crate::nonlocality::{mk_maximize, MkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    E3,
    Mmax,
    E12,
    E23,
    E13,
    #[serde(rename = "E1_23")]
    E1Vs23,
    #[serde(rename = "E2_13")]
    E2Vs13,
    #[serde(rename = "E3_12")]
    E3Vs12,
    #[serde(rename = "chi_eff")]
    ChiEff,
    Nw,
}

impl Observable {
    pub const ALL: [Observable; 10] = [
        Observable::E3,
        Observable::Mmax,
        Observable::E12,
        Observable::E23,
        Observable::E13,
        Observable::E1Vs23,
        Observable::E2Vs13,
        Observable::E3Vs12,
        Observable::ChiEff,
        Observable::Nw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Observable::E3 => "E3",
            Observable::Mmax => "Mmax",
            Observable::E12 => "E12",
            Observable::E23 => "E23",
            Observable::E13 => "E13",
            Observable::E1Vs23 => "E1_23",
            Observable::E2Vs13 => "E2_13",
            Observable::E3Vs12 => "E3_12",
            Observable::ChiEff => "chi_eff",
            Observable::Nw => "Nw",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !is_sweepable(&self.parameter) {
            return Err(Error::config(format!(
                "cannot sweep {:?}; numeric parameters are: {}",
                self.parameter,
                sweepable_keys().collect::<Vec<_>>().join(", ")
            )));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(Error::config("sweep bounds must be finite"));
        }
        if self.from == self.to {
            return Err(Error::config("sweep has zero width (from = to)"));
        }
        if self.points < 2 {
            return Err(Error::config("a sweep needs at least 2 points"));
        }
        if self.scale == Scale::Log && !(self.from > 0.0 && self.to > 0.0) {
            return Err(Error::config("log sweeps need positive bounds"));
        }
        Ok(())
    }

    /// Sweep values in ascending order, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = if self.from < self.to {
            (self.from, self.to)
        } else {
            (self.to, self.from)
        };
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    return lo;
                }
                if i == n - 1 {
                    return hi;
                }
                let t = i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => lo + (hi - lo) * t,
                    Scale::Log => (lo.ln() + (hi.ln() - lo.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerConfig {
    #[serde(default = "default_detect")]
    pub detect: Detection,
    /// Overrides the automatic grid.
    #[serde(default)]
    pub grid: Option<Grid>,
}

fn default_detect() -> Detection {
    Detection::Atoms
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpec {
    #[default]
    Markovian,
    ColoredBrownian { cutoff_over_omega_m: f64 },
}

impl NoiseSpec {
    fn model(self, omega_m: f64) -> NoiseModel {
        match self {
            NoiseSpec::Markovian => NoiseModel::Markovian,
            NoiseSpec::ColoredBrownian { cutoff_over_omega_m } => NoiseModel::ColoredBrownian {
                cutoff: cutoff_over_omega_m * omega_m,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub params: Map<String, Value>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default = "default_observables")]
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub mk: MkConfig,
    #[serde(default = "default_wigner")]
    pub wigner: WignerConfig,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub output: Option<String>,
}

fn default_observables() -> Vec<Observable> {
    vec![Observable::E3, Observable::ChiEff]
}

fn default_wigner() -> WignerConfig {
    WignerConfig::default()
}

impl Default for WignerConfig {
    fn default() -> Self {
        Self {
            detect: Detection::Atoms,
            grid: None,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        let mut seen = Vec::new();
        for o in &self.observables {
            if seen.contains(o) {
                return Err(Error::config(format!("observable {o} listed twice")));
            }
            seen.push(*o);
        }
        if self.mk.starts == 0 {
            return Err(Error::config("mk.starts must be positive"));
        }
        if let Some(g) = &self.wigner.grid {
            g.validate().map_err(|e| Error::config(e.to_string()))?;
        }
        if let NoiseSpec::ColoredBrownian { cutoff_over_omega_m } = self.noise {
            if !(cutoff_over_omega_m > 0.0 && cutoff_over_omega_m.is_finite()) {
                return Err(Error::config("noise cutoff must be positive"));
            }
        }
        for p in self.point_params()? {
            resolve(&p)?;
        }
        Ok(())
    }

    /// Parameter maps for every point, in row order.
    pub fn point_params(&self) -> Result<Vec<Map<String, Value>>> {
        match &self.sweep {
            None => Ok(vec![self.params.clone()]),
            Some(s) => s
                .values()
                .into_iter()
                .map(|v| with_value(&self.params, &s.parameter, v))
                .collect(),
        }
    }
}

/// Results for one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub index: usize,
    /// Swept value, in the units of the swept key.
    pub value: Option<f64>,
    /// Aligned with the configured observables; `None` where not computable.
    pub observables: Vec<Option<f64>>,
    pub stable: bool,
    pub physical: bool,
    pub multistable: bool,
    /// Present when `Mmax` was requested.
    pub mk_converged: Option<bool>,
    pub error: Option<String>,
    pub operating_point: Option<OperatingPoint>,
    pub state: Option<GaussianState>,
}

impl SweepRecord {
    pub fn get(&self, config: &ScenarioConfig, o: Observable) -> Option<f64> {
        let i = config.observables.iter().position(|&x| x == o)?;
        self.observables[i]
    }

    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub records: Vec<SweepRecord>,
}

impl ScenarioResult {
    pub fn column(&self, o: Observable) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.get(&self.config, o)).collect()
    }

    pub fn swept_values(&self) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.value).collect()
    }

    pub fn all_unstable(&self) -> bool {
        self.records.iter().all(|r| !r.stable)
    }

    pub fn any_failed(&self) -> bool {
        self.records.iter().any(|r| !r.ok())
    }

    /// The CSV body: swept column (if any), observables, status flags.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header: Vec<String> = Vec::new();
        if let Some(s) = &self.config.sweep {
            header.push(s.parameter.clone());
        }
        header.extend(self.config.observables.iter().map(|o| o.name().to_string()));
        header.extend(["stable", "physical", "multistable", "mk_converged"].map(String::from));
        out.push_str(&header.join(","));
        out.push('\n');
        for r in &self.records {
            let mut row: Vec<String> = Vec::new();
            if self.config.sweep.is_some() {
                row.push(fmt_opt(r.value));
            }
            row.extend(r.observables.iter().map(|v| fmt_opt(*v)));
            row.push(r.stable.to_string());
            row.push(r.physical.to_string());
            row.push(r.multistable.to_string());
            row.push(r.mk_converged.map(|b| b.to_string()).unwrap_or_default());
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(csv_number).unwrap_or_default()
}

/// Shortest round-trip text for a CSV cell, switching to exponent notation
/// for very small or very large magnitudes.
pub fn csv_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Evaluate one parameter point.
pub fn evaluate_point(index: usize, value: Option<f64>, params: &PhysicalParams, cfg: &ScenarioConfig) -> SweepRecord {
    let mut rec = SweepRecord {
        index,
        value,
        observables: vec![None; cfg.observables.len()],
        stable: false,
        physical: false,
        multistable: false,
        mk_converged: None,
        error: None,
        operating_point: None,
        state: None,
    };
    let op = match solve_operating_point(params) {
        Ok(op) => op,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.multistable = op.multistable;
    rec.operating_point = Some(op);
    let model = dynamics::build_model(&op, cfg.noise.model(params.omega_m));
    rec.stable = stability(&model).stable;
    let state = match dynamics::steady_state(&model) {
        Ok(s) => s,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    let phys = physicality(&state);
    rec.physical = phys.physical;
    rec.state = Some(state.clone());
    if let Some(i) = cfg.observables.iter().position(|&o| o == Observable::ChiEff) {
        rec.observables[i] = Some(op.chi_eff);
    }
    if !phys.physical {
        rec.error = Some(format!(
            "steady state violates the uncertainty relation (min eigenvalue {:e})",
            phys.min_eigenvalue
        ));
        return rec;
    }
    let mut errors = Vec::new();
    for (i, &o) in cfg.observables.iter().enumerate() {
        let v = match o {
            Observable::ChiEff => continue,
            Observable::Mmax => mk_maximize(&state, &cfg.mk).map(|r| {
                rec.mk_converged = Some(r.converged);
                r.value
            }),
            Observable::Nw => nw(&state, &cfg.wigner),
            other => entanglement(&state, other),
        };
        match v {
            Ok(x) => rec.observables[i] = Some(x),
            Err(e) => errors.push(format!("{o}: {e}")),
        }
    }
    if !errors.is_empty() {
        rec.error = Some(errors.join("; "));
    }
    rec
}

fn entanglement(state: &GaussianState, o: Observable) -> Result<f64> {
    let one_vs_rest = |m: Mode| log_negativity(state, &Partition::one_vs_rest(m, state)?);
    match o {
        Observable::E3 => tripartite_negativity(state),
        Observable::E12 => pairwise_log_negativity(state, Mode::Mirror, Mode::Cavity),
        Observable::E23 => pairwise_log_negativity(state, Mode::Cavity, Mode::Atoms),
        Observable::E13 => pairwise_log_negativity(state, Mode::Mirror, Mode::Atoms),
        Observable::E1Vs23 => one_vs_rest(Mode::Mirror),
        Observable::E2Vs13 => one_vs_rest(Mode::Cavity),
        Observable::E3Vs12 => one_vs_rest(Mode::Atoms),
        _ => unreachable!("not an entanglement observable"),
    }
}

/// Negativity volume of the conditioned mirror state.
pub fn nw(state: &GaussianState, wigner: &WignerConfig) -> Result<f64> {
    let mix = conditioned_mirror_state(state, wigner.detect)?;
    let grid = wigner.grid.unwrap_or_else(|| Grid::auto(&mix));
    negativity_volume(&mix, &grid)
}

/// Evaluate every point of the scenario in parallel; rows come back in sweep
/// order regardless of scheduling.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    config.validate()?;
    let maps = config.point_params()?;
    let values: Vec<Option<f64>> = match &config.sweep {
        Some(s) => s.values().into_iter().map(Some).collect(),
        None => vec![None],
    };
    let params: Vec<PhysicalParams> = maps.iter().map(resolve).collect::<Result<_>>()?;
    let records = params
        .par_iter()
        .zip(values.par_iter())
        .enumerate()
        .map(|(i, (p, v))| evaluate_point(i, *v, p, config))
        .collect();
    Ok(ScenarioResult {
        config: config.clone(),
        records,
    })
}

/// Paths written for an output prefix.
pub fn output_paths(prefix: &str) -> (PathBuf, PathBuf, PathBuf) {
    (
        PathBuf::from(format!("{prefix}.csv")),
        PathBuf::from(format!("{prefix}.json")),
        PathBuf::from(format!("{prefix}.meta.json")),
    )
}

pub(crate) fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(())
}

/// Write `<prefix>.csv`, `<prefix>.json` and a `<prefix>.meta.json` sidecar
/// holding the only nondeterministic content (the timestamp).
pub fn write_outputs(result: &ScenarioResult, prefix: &str) -> Result<()> {
    let (csv, json, meta) = output_paths(prefix);
    ensure_parent(&csv)?;
    std::fs::write(&csv, result.to_csv())?;
    let mut f = std::fs::File::create(&json)?;
    serde_json::to_writer_pretty(&mut f, result)?;
    writeln!(f)?;
    write_meta(&meta)
}

pub(crate) fn write_meta(path: &Path) -> Result<()> {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "generator": concat!("optomech ", env!("CARGO_PKG_VERSION")),
        "unix_time": secs,
    });
    std::fs::write(path, serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(())
}
