//! Mirror states conditioned on Geiger (click / no-click) detection.
//!
//! A click projector is `1 − |0⟩⟨0|` per detected mode. Expanding the product
//! turns the conditioned mirror state into a signed sum of Gaussians, each
//! obtained by projecting a subset of the detected modes onto vacuum:
//!
//! ```text
//! ρ_m ∝ Σ_{S ⊆ detected} (−1)^|S| p_S ρ_m|S=vac
//! ```
//!
//! with `p_S` the probability of finding every mode in `S` empty.

mod field;
mod fock;

pub use field::{evaluate_field, negativity_volume, simpson_weights, Grid, WignerField};
pub use fock::{compare_with_gaussian, fock_oracle, tmst_parameters, FockConditioned, OracleComparison, MIN_CUTOFF};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gaussian::{reduce, vacuum_project, GaussianState, GaussianWigner, Mode};

/// Click probabilities at or below this are rejected.
pub const MIN_CLICK_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detection {
    None,
    Cavity,
    Atoms,
    Both,
}

impl Detection {
    pub const ALL: [Detection; 4] = [Detection::None, Detection::Cavity, Detection::Atoms, Detection::Both];

    pub fn detected_modes(self) -> &'static [Mode] {
        match self {
            Detection::None => &[],
            Detection::Cavity => &[Mode::Cavity],
            Detection::Atoms => &[Mode::Atoms],
            Detection::Both => &[Mode::Cavity, Mode::Atoms],
        }
    }
}

impl fmt::Display for Detection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detection::None => "none",
            Detection::Cavity => "cavity",
            Detection::Atoms => "atoms",
            Detection::Both => "both",
        })
    }
}

impl FromStr for Detection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Detection::None),
            "cavity" => Ok(Detection::Cavity),
            "atoms" => Ok(Detection::Atoms),
            "both" => Ok(Detection::Both),
            other => Err(Error::config(format!(
                "unknown detection {other:?}; expected none, cavity, atoms or both"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub coefficient: f64,
    pub state: GaussianState,
}

/// A normalized signed sum of single-mode Gaussian Wigner functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerMixture {
    pub components: Vec<MixtureComponent>,
    /// The factor divided out to normalize the coefficients; for a
    /// conditioned state this is the click probability.
    pub normalization: f64,
}

impl WignerMixture {
    /// Normalize raw `(weight, state)` pairs by their weight sum.
    pub fn new(raw: Vec<(f64, GaussianState)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::domain("a mixture needs at least one component"));
        }
        if raw.iter().any(|(_, s)| s.num_modes() != 1) {
            return Err(Error::domain("mixture components must be single-mode states"));
        }
        let norm: f64 = raw.iter().map(|(c, _)| c).sum();
        if !(norm.is_finite() && norm != 0.0) {
            return Err(Error::domain(format!("mixture weights sum to {norm}")));
        }
        Ok(Self {
            components: raw
                .into_iter()
                .map(|(c, state)| MixtureComponent {
                    coefficient: c / norm,
                    state,
                })
                .collect(),
            normalization: norm,
        })
    }

    pub fn gaussian(state: GaussianState) -> Result<Self> {
        Self::new(vec![(1.0, state)])
    }

    /// Precompute the component kernels for repeated evaluation.
    pub fn evaluator(&self) -> Result<MixtureEvaluator> {
        let terms = self
            .components
            .iter()
            .map(|c| Ok((c.coefficient, GaussianWigner::new(&c.state)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixtureEvaluator { terms })
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.evaluator()?.eval(x, y))
    }

    /// Largest marginal standard deviation `√(σ_ii/2)` over components, in
    /// amplitude coordinates.
    pub fn max_marginal_sd(&self) -> f64 {
        self.components
            .iter()
            .flat_map(|c| [c.state.sigma[(0, 0)], c.state.sigma[(1, 1)]])
            .map(|v| (v / 2.0).sqrt())
            .fold(0.0, f64::max)
    }

    /// Rotate every component by the same phase-space angle.
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| {
                Ok(MixtureComponent {
                    coefficient: c.coefficient,
                    state: crate::gaussian::rotate_locally(&c.state, &[angle])?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            normalization: self.normalization,
        })
    }
}

#[derive(Debug, Clone)]
pub struct MixtureEvaluator {
    terms: Vec<(f64, GaussianWigner)>,
}

impl MixtureEvaluator {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|(c, w)| c * w.eval(&[x, y])).sum()
    }
}

/// Condition `kept` on a click in every mode of `detected`, tracing out
/// whatever else the state contains.
pub fn geiger_condition(state: &GaussianState, kept: Mode, detected: &[Mode]) -> Result<WignerMixture> {
    state.require_physical()?;
    if detected.contains(&kept) {
        return Err(Error::domain("cannot detect the conditioned mode itself"));
    }
    let mut relevant = vec![kept];
    relevant.extend_from_slice(detected);
    let sub = reduce(state, &relevant)?;
    let marginal = reduce(state, &[kept])?;
    let mut raw = vec![(1.0, marginal)];
    // every nonempty subset of the detected modes, in bitmask order
    for mask in 1u32..(1 << detected.len()) {
        let subset: Vec<Mode> = (0..detected.len())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| detected[b])
            .collect();
        let sign = if subset.len() % 2 == 1 { -1.0 } else { 1.0 };
        let proj = vacuum_project(&sub, &subset)?;
        let cond = reduce(&proj.conditional, &[kept])?;
        raw.push((sign * proj.weight, cond));
    }
    let click: f64 = raw.iter().map(|(c, _)| c).sum();
    if !(click > MIN_CLICK_PROBABILITY) {
        return Err(Error::DegenerateConditioning { probability: click });
    }
    WignerMixture::new(raw)
}

/// The mirror state after Geiger detection on the cavity, the atoms, both
/// (joint click) or neither.
pub fn conditioned_mirror_state(state: &GaussianState, detect: Detection) -> Result<WignerMixture> {
    if state.num_modes() != 3 {
        return Err(Error::domain(format!(
            "conditioning expects the 3-mode state, got {} modes",
            state.num_modes()
        )));
    }
    geiger_condition(state, Mode::Mirror, detect.detected_modes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tmsv_plus(r: f64, nbar_atoms: f64) -> GaussianState {
        GaussianState::two_mode_squeezed(r, 0.0, [Mode::Mirror, Mode::Cavity])
            .product(&GaussianState::thermal(Mode::Atoms, nbar_atoms))
            .unwrap()
    }

    #[test]
    fn no_detection_is_the_reduced_state() {
        let s = tmsv_plus(0.4, 0.2);
        let m = conditioned_mirror_state(&s, Detection::None).unwrap();
        assert_eq!(m.components.len(), 1);
        assert_eq!(m.components[0].state, reduce(&s, &[Mode::Mirror]).unwrap());
        assert_eq!(m.components[0].coefficient, 1.0);
    }

    #[test]
    fn uncorrelated_detection_telescopes() {
        let s = tmsv_plus(0.4, 0.2);
        let m = conditioned_mirror_state(&s, Detection::Atoms).unwrap();
        let plain = conditioned_mirror_state(&s, Detection::None).unwrap();
        for (x, y) in [(0.0, 0.0), (0.3, -0.7), (1.5, 0.2)] {
            assert_relative_eq!(m.eval(x, y).unwrap(), plain.eval(x, y).unwrap(), max_relative = 1e-12);
        }
        assert_relative_eq!(m.normalization, 1.0 - 1.0 / 1.2, max_relative = 1e-12);
    }

    #[test]
    fn vacuum_detection_is_degenerate() {
        let v = GaussianState::vacuum(&Mode::ALL);
        assert!(matches!(
            conditioned_mirror_state(&v, Detection::Cavity),
            Err(Error::DegenerateConditioning { .. })
        ));
    }

    #[test]
    fn coefficients_sum_to_one_and_joint_click_is_a_probability() {
        let s = crate::gaussian::rotate_locally(&tmsv_plus(0.7, 0.5), &[0.1, 0.2, 0.3]).unwrap();
        let m = conditioned_mirror_state(&s, Detection::Both).unwrap();
        assert_eq!(m.components.len(), 4);
        let total: f64 = m.components.iter().map(|c| c.coefficient).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(m.normalization > 0.0 && m.normalization < 1.0);
        // independent modes: joint click = product of click probabilities
        let pc = 1.0 - 1.0 / 0.7f64.cosh().powi(2);
        let pa = 1.0 - 1.0 / 1.5;
        assert_relative_eq!(m.normalization, pc * pa, max_relative = 1e-10);
    }

    #[test]
    fn heralded_tmsv_goes_negative_at_origin() {
        let m = conditioned_mirror_state(&tmsv_plus(0.3, 0.0), Detection::Cavity).unwrap();
        assert!(m.eval(0.0, 0.0).unwrap() < 0.0);
    }

    #[test]
    fn detection_names_round_trip() {
        for d in Detection::ALL {
            assert_eq!(d.to_string().parse::<Detection>().unwrap(), d);
        }
        assert!("mirror".parse::<Detection>().is_err());
    }
}
