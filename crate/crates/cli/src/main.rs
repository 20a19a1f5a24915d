//! Command-line front end: steady states, sweeps, MK maximization, conditioned
//! Wigner fields and the built-in figure reproductions.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use optomech::dynamics::{self, NoiseModel};
use optomech::model::solve_operating_point;
use optomech::nonclassicality::{conditioned_mirror_state, evaluate_field, Detection, Grid};
use optomech::nonlocality::mk_maximize;
use optomech::scenario::figures::{base_params, reproduce_data, write_reproduction, Figure, ReproduceOptions};
use optomech::scenario::{
    apply_override, csv_number, resolve, run_scenario, write_outputs, ScenarioConfig, ScenarioResult, WignerConfig,
};
use optomech::Error;

#[derive(Parser)]
#[command(name = "optomech", version, about = "Atom–cavity–mirror Gaussian steady states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Steady state at one parameter point.
    Steady(Common),
    /// Run the sweep described by the config.
    Sweep(Common),
    /// Maximize the MK function at one parameter point.
    Mk(Common),
    /// Conditioned mirror Wigner function at one parameter point.
    Wigner(Common),
    /// Regenerate the data behind a figure (fig1a, fig1b, fig1c, fig1d, fig2, fig3).
    Reproduce {
        figure: Figure,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario config (JSON). Without it the default 1 mm working point is used.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output prefix; `<prefix>.csv` and `<prefix>.json` are written.
    #[arg(long, value_name = "PREFIX")]
    out: Option<String>,
    /// Seed of the MK multistart.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of MK starts.
    #[arg(long)]
    starts: Option<usize>,
    /// Exit with status 1 if any point fails.
    #[arg(long)]
    strict: bool,
    /// Geiger detection channel for conditioned quantities.
    #[arg(long, value_name = "none|cavity|atoms|both")]
    detect: Option<Detection>,
    /// Parameter override, `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Json(_) => Failure::Usage(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Steady(c) => steady(&c),
        Command::Sweep(c) => sweep(&c),
        Command::Mk(c) => mk(&c),
        Command::Wigner(c) => wigner(&c),
        Command::Reproduce { figure, common } => reproduce_cmd(figure, &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

impl Common {
    fn scenario(&self) -> Result<ScenarioConfig, Failure> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig {
                params: base_params(1e-3),
                sweep: None,
                observables: vec![],
                mk: Default::default(),
                wigner: WignerConfig::default(),
                noise: Default::default(),
                output: None,
            },
        };
        for s in &self.set {
            apply_override(&mut cfg.params, s)?;
        }
        if let Some(s) = self.seed {
            cfg.mk.seed = s;
        }
        if let Some(n) = self.starts {
            cfg.mk.starts = n;
        }
        if let Some(d) = self.detect {
            cfg.wigner.detect = d;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn prefix(&self, cfg: &ScenarioConfig, fallback: &str) -> String {
        self.out
            .clone()
            .or_else(|| cfg.output.clone())
            .unwrap_or_else(|| fallback.to_string())
    }
}

fn finish(result: &ScenarioResult, strict: bool) -> Outcome {
    for r in result.records.iter().filter(|r| !r.ok()) {
        let at = r.value.map(|v| format!(" at {v}")).unwrap_or_default();
        eprintln!("warning: point {}{at}: {}", r.index, r.error.as_deref().unwrap_or(""));
    }
    if result.all_unstable() {
        return Err(Failure::Compute("no point has a stable steady state".into()));
    }
    if strict && result.any_failed() {
        return Err(Failure::Compute("some points failed (--strict)".into()));
    }
    Ok(())
}

fn steady(c: &Common) -> Outcome {
    let mut cfg = c.scenario()?;
    cfg.sweep = None;
    if c.config.is_none() {
        cfg.observables = optomech::scenario::Observable::ALL.to_vec();
        cfg.observables.retain(|o| *o != optomech::scenario::Observable::Mmax);
    }
    let result = run_scenario(&cfg)?;
    let prefix = c.prefix(&cfg, "steady");
    write_outputs(&result, &prefix)?;
    print!("{}", result.to_csv());
    finish(&result, c.strict)
}

fn sweep(c: &Common) -> Outcome {
    let cfg = c.scenario()?;
    if cfg.sweep.is_none() {
        return Err(Failure::Usage("the config has no \"sweep\" section".into()));
    }
    let result = run_scenario(&cfg)?;
    let prefix = c.prefix(&cfg, "sweep");
    write_outputs(&result, &prefix)?;
    println!("wrote {prefix}.csv ({} rows)", result.records.len());
    finish(&result, c.strict)
}

fn point_state(cfg: &ScenarioConfig) -> Result<optomech::gaussian::GaussianState, Failure> {
    let p = resolve(&cfg.params)?;
    let op = solve_operating_point(&p)?;
    let model = dynamics::build_model(&op, NoiseModel::Markovian);
    let state = dynamics::steady_state(&model)?;
    if !dynamics::physicality(&state).physical {
        return Err(Failure::Compute("steady state violates the uncertainty relation".into()));
    }
    Ok(state)
}

fn write_pair(prefix: &str, csv: &str, json: &serde_json::Value) -> Outcome {
    let write = |path: String, body: String| {
        if let Some(dir) = std::path::Path::new(&path).parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir).map_err(Error::from)?;
            }
        }
        std::fs::write(&path, body).map_err(Error::from)
    };
    write(format!("{prefix}.csv"), csv.to_string())?;
    write(format!("{prefix}.json"), format!("{json:#}\n"))?;
    Ok(())
}

fn mk(c: &Common) -> Outcome {
    let cfg = c.scenario()?;
    let state = point_state(&cfg)?;
    let best = mk_maximize(&state, &cfg.mk)?;
    let mut csv = String::from("Mmax,converged,starts,evaluations");
    for side in ["o", "op"] {
        for k in 0..6 {
            csv.push_str(&format!(",{side}{k}"));
        }
    }
    csv.push_str(&format!(
        "\n{},{},{},{}",
        csv_number(best.value),
        best.converged,
        best.starts_used,
        best.evaluations
    ));
    for x in best.settings.unprimed.iter().chain(&best.settings.primed) {
        csv.push(',');
        csv.push_str(&csv_number(*x));
    }
    csv.push('\n');
    write_pair(
        &c.prefix(&cfg, "mk"),
        &csv,
        &serde_json::json!({ "config": cfg, "result": best, "state": state }),
    )?;
    println!("Mmax = {} (violation: {})", best.value, best.value > 2.0);
    if c.strict && !best.converged {
        return Err(Failure::Compute("MK search did not converge (--strict)".into()));
    }
    Ok(())
}

fn wigner(c: &Common) -> Outcome {
    let cfg = c.scenario()?;
    let state = point_state(&cfg)?;
    let mix = conditioned_mirror_state(&state, cfg.wigner.detect)?;
    let grid = cfg.wigner.grid.unwrap_or_else(|| Grid::auto(&mix));
    let field = evaluate_field(&mix, &grid)?;
    let prefix = c.prefix(&cfg, "wigner");
    let mut csv = Vec::new();
    field.write_csv(&mut csv)?;
    let summary = serde_json::json!({
        "detect": cfg.wigner.detect,
        "click_probability": mix.normalization,
        "Nw": field.negativity_volume(),
        "min_value": field.min(),
        "integral": field.integral(),
        "grid": grid,
    });
    write_pair(&prefix, &String::from_utf8(csv).expect("utf-8 csv"), &summary)?;
    println!(
        "detect={} Nw={} click_probability={}",
        cfg.wigner.detect,
        field.negativity_volume(),
        mix.normalization
    );
    Ok(())
}

fn reproduce_cmd(figure: Figure, c: &Common) -> Outcome {
    if c.config.is_some() {
        return Err(Failure::Usage("reproduce uses built-in configs; drop --config".into()));
    }
    let opts = ReproduceOptions {
        seed: c.seed,
        starts: c.starts,
        overrides: c.set.clone(),
        detect: c.detect,
    };
    let prefix = c.out.clone().unwrap_or_else(|| figure.name().to_string());
    let rep = reproduce_data(figure, &opts)?;
    for p in write_reproduction(&rep, &prefix)? {
        println!("wrote {}", p.display());
    }
    for (tag, run) in &rep.runs {
        if run.all_unstable() {
            return Err(Failure::Compute(format!("{figure} {tag}: no stable point")));
        }
        if c.strict && run.any_failed() {
            return Err(Failure::Compute(format!("{figure} {tag}: some points failed (--strict)")));
        }
    }
    Ok(())
}
