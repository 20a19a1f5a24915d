//! Phase-space Mermin–Klyshko function from displaced-parity correlations.
//!
//! For three modes measured with displaced parity at settings `O_i` or
//! `O′_i`,
//!
//! ```text
//! M₃ = (π³/8) [W(O′₁,O₂,O₃) + W(O₁,O′₂,O₃) + W(O₁,O₂,O′₃) − W(O′₁,O′₂,O′₃)]
//! ```
//!
//! and local realism demands `|M₃| ≤ 2`. Each term times `(π/2)³` is a
//! parity expectation in `[−1, 1]`.

mod simplex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gaussian::{GaussianState, GaussianWigner};

/// Displacements of the two settings per party, as `(q, p)` pairs in mode
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MKSettings {
    pub unprimed: [f64; 6],
    pub primed: [f64; 6],
}

impl MKSettings {
    pub const ZERO: MKSettings = MKSettings {
        unprimed: [0.0; 6],
        primed: [0.0; 6],
    };

    fn from_slice(x: &[f64]) -> Self {
        let mut s = Self::ZERO;
        s.unprimed.copy_from_slice(&x[..6]);
        s.primed.copy_from_slice(&x[6..12]);
        s
    }

    fn to_vec(self) -> Vec<f64> {
        self.unprimed.iter().chain(&self.primed).copied().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MKResult {
    pub value: f64,
    pub settings: MKSettings,
    pub starts_used: usize,
    /// Objective evaluations over all starts and polishing.
    pub evaluations: usize,
    /// The winning local search met its tolerance within budget.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MkConfig {
    pub starts: usize,
    pub seed: u64,
    /// Simplex spread tolerance on the objective.
    pub tol: f64,
    /// Evaluation budget per local search.
    pub max_evals: usize,
}

impl Default for MkConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            tol: 1e-10,
            max_evals: 2000,
        }
    }
}

/// Precomputed objective for one state.
#[derive(Debug, Clone)]
pub struct MkFunction {
    wigner: GaussianWigner,
}

impl MkFunction {
    pub fn new(state: &GaussianState) -> Result<Self> {
        if state.num_modes() != 3 {
            return Err(Error::domain(format!(
                "MK function needs a 3-mode state, got {}",
                state.num_modes()
            )));
        }
        state.require_physical()?;
        Ok(Self {
            wigner: GaussianWigner::new(state)?,
        })
    }

    pub fn value(&self, s: &MKSettings) -> f64 {
        let (u, v) = (&s.unprimed, &s.primed);
        let mix = |a: bool, b: bool, c: bool| {
            let pick = |primed: bool, k: usize| if primed { v[k] } else { u[k] };
            [
                pick(a, 0),
                pick(a, 1),
                pick(b, 2),
                pick(b, 3),
                pick(c, 4),
                pick(c, 5),
            ]
        };
        let w = |p: [f64; 6]| self.wigner.eval(&p);
        let sum = w(mix(true, false, false)) + w(mix(false, true, false)) + w(mix(false, false, true))
            - w(mix(true, true, true));
        PI.powi(3) / 8.0 * sum
    }
}

pub fn mk_value(state: &GaussianState, settings: &MKSettings) -> Result<f64> {
    if settings.to_vec().iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("MK settings must be finite"));
    }
    Ok(MkFunction::new(state)?.value(settings))
}

/// Largest `M₃` found by multistart simplex search.
///
/// Start 0 is the origin; the others are uniform in a box of ±3 marginal
/// standard deviations `√σ_ii` per coordinate, drawn from a ChaCha8 stream
/// keyed by `(seed, start index)`. Starts run in parallel and are reduced in
/// index order, so the result does not depend on scheduling. The winner is
/// polished by restarting the simplex until it stops improving.
pub fn mk_maximize(state: &GaussianState, config: &MkConfig) -> Result<MKResult> {
    optimize(state, config, 1.0)
}

/// Smallest `M₃`, searched the same way as [`mk_maximize`].
pub fn mk_minimize(state: &GaussianState, config: &MkConfig) -> Result<MKResult> {
    optimize(state, config, -1.0)
}

fn optimize(state: &GaussianState, config: &MkConfig, sign: f64) -> Result<MKResult> {
    if config.starts == 0 {
        return Err(Error::domain("at least one start is required"));
    }
    if !(config.tol >= 0.0) || config.max_evals == 0 {
        return Err(Error::domain("tolerance must be nonnegative and budget positive"));
    }
    let f = MkFunction::new(state)?;
    let sd: Vec<f64> = (0..6).map(|i| state.sigma[(i, i)].sqrt()).collect();
    let step: Vec<f64> = sd.iter().chain(&sd).map(|s| 0.5 * s).collect();
    let objective = |x: &[f64]| -sign * f.value(&MKSettings::from_slice(x));

    let runs: Vec<simplex::Outcome> = (0..config.starts)
        .into_par_iter()
        .map(|k| {
            let x0: Vec<f64> = if k == 0 {
                vec![0.0; 12]
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(k as u64);
                (0..12)
                    .map(|i| 3.0 * sd[i % 6] * rng.random_range(-1.0..=1.0))
                    .collect()
            };
            simplex::minimize(objective, &x0, &step, config.tol, config.max_evals)
        })
        .collect();

    let mut evaluations: usize = runs.iter().map(|o| o.evaluations).sum();
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.f < a.f { b } else { a })
        .expect("at least one start");

    let mut polish_step: Vec<f64> = step.iter().map(|s| 0.1 * s).collect();
    for _ in 0..8 {
        let o = simplex::minimize(objective, &best.x, &polish_step, config.tol, config.max_evals);
        evaluations += o.evaluations;
        let improved = o.f < best.f - config.tol;
        if o.f < best.f {
            best = o;
        }
        if !improved {
            break;
        }
        polish_step.iter_mut().for_each(|s| *s *= 0.5);
    }

    let settings = MKSettings::from_slice(&best.x);
    Ok(MKResult {
        value: f.value(&settings),
        settings,
        starts_used: config.starts,
        evaluations,
        converged: best.converged,
    })
}
