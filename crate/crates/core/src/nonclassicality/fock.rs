//! Fock-basis construction of a Geiger-conditioned two-mode squeezed thermal
//! state, independent of the Gaussian calculus.
//!
//! The squeezer `exp[r(ab − a†b†)]` conserves `n_a − n_b`, so the state is
//! built block by block: in block `d` the generator is tridiagonal and its
//! exponential maps the diagonal thermal input to the squeezed populations.
//! The reduced state of mode `a` after a click on `b` stays diagonal.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use super::field::Grid;
use crate::gaussian::{GaussianState, Mode};

/// Extra Fock levels kept beyond the cutoff while squeezing.
const WORKING_MARGIN: usize = 80;
pub const MIN_CUTOFF: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockConditioned {
    pub cutoff: usize,
    pub r: f64,
    pub nbar: f64,
    /// Normalized populations of the conditioned first mode, `m < cutoff`.
    pub populations: Vec<f64>,
    /// Click probability within the truncated space.
    pub click_probability: f64,
    /// Weight of the two-mode state outside `m, n < cutoff`.
    pub discarded: f64,
}

impl FockConditioned {
    /// `W(α) = Σ_m P_m (2/π)(−1)^m e^{−2|α|²} L_m(4|α|²)`.
    pub fn wigner(&self, x: f64, y: f64) -> f64 {
        let r2 = x * x + y * y;
        let t = 4.0 * r2;
        let (mut l_prev, mut l) = (0.0, 1.0);
        let mut acc = 0.0;
        for (m, p) in self.populations.iter().enumerate() {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * p * l;
            let k = m as f64;
            let next = ((2.0 * k + 1.0 - t) * l - k * l_prev) / (k + 1.0);
            l_prev = l;
            l = next;
        }
        2.0 / PI * (-2.0 * r2).exp() * acc
    }

    /// Fail when the truncated space misses more than `tolerance` weight.
    pub fn check_truncation(&self, tolerance: f64) -> Result<()> {
        if self.discarded > tolerance {
            return Err(Error::Truncation {
                cutoff: self.cutoff,
                discarded: self.discarded,
                tolerance,
            });
        }
        Ok(())
    }
}

/// Read `(r, n̄)` off a two-mode squeezed thermal covariance matrix.
pub fn tmst_parameters(state: &GaussianState) -> Result<(f64, f64)> {
    if state.num_modes() != 2 {
        return Err(Error::domain("the Fock oracle takes a two-mode state"));
    }
    let s = &state.sigma;
    let a = s[(0, 0)];
    let c = s[(0, 2)];
    let tol = 1e-10 * s.amax();
    let mut expected = DMatrix::from_diagonal_element(4, 4, a);
    expected[(0, 2)] = c;
    expected[(2, 0)] = c;
    expected[(1, 3)] = -c;
    expected[(3, 1)] = -c;
    if (s - expected).amax() > tol {
        return Err(Error::domain(
            "state is not of two-mode squeezed thermal form (equal diagonal, σ₁₃ = −σ₀₂, no other correlations)",
        ));
    }
    let v = (a * a - c * c).sqrt();
    if !(v >= 0.5 - 1e-12) {
        return Err(Error::domain("covariance matrix is unphysical"));
    }
    Ok((0.5 * (c.abs() / a).atanh(), (v - 0.5).max(0.0)))
}

fn block_generator(size: usize, d: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(size, size);
    for t in 0..size {
        let tf = t as f64;
        let df = d as f64;
        if t > 0 {
            g[(t - 1, t)] = (tf * (tf + df)).sqrt();
        }
        if t + 1 < size {
            g[(t + 1, t)] = -((tf + 1.0) * (tf + df + 1.0)).sqrt();
        }
    }
    g
}

/// Condition the first mode of a two-mode squeezed thermal state on a click
/// of the second, in a Fock space of `cutoff` levels per mode.
pub fn fock_oracle(state: &GaussianState, cutoff: usize) -> Result<FockConditioned> {
    if cutoff < MIN_CUTOFF {
        return Err(Error::domain(format!("cutoff must be at least {MIN_CUTOFF}, got {cutoff}")));
    }
    let (r, nbar) = tmst_parameters(state)?;
    let k = cutoff + WORKING_MARGIN;
    let thermal: Vec<f64> = (0..k)
        .map(|j| {
            if nbar == 0.0 {
                if j == 0 { 1.0 } else { 0.0 }
            } else {
                (nbar / (nbar + 1.0)).powi(j as i32) / (nbar + 1.0)
            }
        })
        .collect();

    // rho[m][n] for m, n < cutoff; block d = m − n
    let blocks: Vec<(isize, Vec<f64>)> = (-(cutoff as isize - 1)..cutoff as isize)
        .into_par_iter()
        .map(|d| {
            let ad = d.unsigned_abs();
            let size = k - ad;
            let u = (block_generator(size, ad) * r).exp();
            let input: Vec<f64> = (0..size).map(|t| thermal[t + ad] * thermal[t]).collect();
            let out = (0..size)
                .map(|t| (0..size).map(|s| u[(t, s)].powi(2) * input[s]).sum())
                .collect();
            (d, out)
        })
        .collect();

    let mut rho = vec![vec![0.0; cutoff]; cutoff];
    for (d, out) in &blocks {
        for (t, p) in out.iter().enumerate() {
            let (m, n) = if *d >= 0 {
                (t + *d as usize, t)
            } else {
                (t, t + d.unsigned_abs())
            };
            if m < cutoff && n < cutoff {
                rho[m][n] = *p;
            }
        }
    }
    let kept: f64 = rho.iter().flatten().sum();
    let raw: Vec<f64> = rho.iter().map(|row| row[1..].iter().sum()).collect();
    let click: f64 = raw.iter().sum();
    if !(click > super::MIN_CLICK_PROBABILITY) {
        return Err(Error::DegenerateConditioning { probability: click });
    }
    Ok(FockConditioned {
        cutoff,
        r,
        nbar,
        populations: raw.iter().map(|p| p / click).collect(),
        click_probability: click,
        discarded: (1.0 - kept).max(0.0),
    })
}

/// Sup-norm gap between the Fock oracle and the Gaussian conditioning of the
/// same two-mode squeezed thermal state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub r: f64,
    pub nbar: f64,
    pub sup_norm: f64,
    pub click_probability: f64,
    pub discarded: f64,
}

/// Compare both conditioning routes for `(r, n̄)` on `points²` lattice sites
/// spanning the Gaussian route's automatic grid.
///
/// `None` when no click is possible (`r = 0` with a vacuum input), where both
/// routes reject the conditioning.
pub fn compare_with_gaussian(r: f64, nbar: f64, cutoff: usize, points: usize) -> Result<Option<OracleComparison>> {
    let state = GaussianState::two_mode_squeezed(r, nbar, [Mode::Mirror, Mode::Cavity]);
    let gauss = match super::geiger_condition(&state, Mode::Mirror, &[Mode::Cavity]) {
        Ok(m) => m,
        Err(Error::DegenerateConditioning { .. }) => {
            return match fock_oracle(&state, cutoff) {
                Err(Error::DegenerateConditioning { .. }) => Ok(None),
                Err(e) => Err(e),
                Ok(_) => Err(Error::Numerical("Fock route found clicks the Gaussian route did not".into())),
            };
        }
        Err(e) => return Err(e),
    };
    let fock = fock_oracle(&state, cutoff)?;
    let mut grid = Grid::auto(&gauss);
    grid.points = [points; 2];
    grid.validate()?;
    let ev = gauss.evaluator()?;
    let mut sup = 0.0f64;
    for i in 0..points {
        for j in 0..points {
            let (x, y) = (grid.coordinate(0, i), grid.coordinate(1, j));
            sup = sup.max((ev.eval(x, y) - fock.wigner(x, y)).abs());
        }
    }
    Ok(Some(OracleComparison {
        r,
        nbar,
        sup_norm: sup,
        click_probability: fock.click_probability,
        discarded: fock.discarded,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parameters_round_trip() {
        let s = GaussianState::two_mode_squeezed(0.7, 1.3, [Mode::Mirror, Mode::Cavity]);
        let (r, n) = tmst_parameters(&s).unwrap();
        assert_relative_eq!(r, 0.7, max_relative = 1e-12);
        assert_relative_eq!(n, 1.3, max_relative = 1e-12);
        let p = GaussianState::thermal(Mode::Mirror, 0.2)
            .product(&GaussianState::thermal(Mode::Cavity, 0.3))
            .unwrap();
        assert!(tmst_parameters(&p).is_err());
    }

    #[test]
    fn squeezed_vacuum_populations_are_geometric() {
        // |ψ⟩ ∝ Σ tanhⁿr |nn⟩, so a click leaves P_m ∝ tanh^{2m} for m ≥ 1
        let r = 0.5f64;
        let s = GaussianState::two_mode_squeezed(r, 0.0, [Mode::Mirror, Mode::Cavity]);
        let f = fock_oracle(&s, 30).unwrap();
        let t2 = r.tanh().powi(2);
        assert!(f.populations[0].abs() < 1e-14);
        for m in 1..10 {
            assert_relative_eq!(f.populations[m], (1.0 - t2) * t2.powi(m as i32 - 1), max_relative = 1e-9);
        }
        assert_relative_eq!(f.click_probability, 1.0 - 1.0 / r.cosh().powi(2), max_relative = 1e-9);
    }

    #[test]
    fn unsqueezed_thermal_is_unchanged_by_conditioning() {
        let s = GaussianState::two_mode_squeezed(0.0, 0.4, [Mode::Mirror, Mode::Cavity]);
        let f = fock_oracle(&s, 40).unwrap();
        for m in 0..10 {
            let want = 0.4f64.powi(m) / 1.4f64.powi(m + 1);
            assert_relative_eq!(f.populations[m as usize], want, max_relative = 1e-10);
        }
        let w = f.wigner(0.0, 0.0);
        assert_relative_eq!(w, 1.0 / (PI * 0.9), max_relative = 1e-9);
    }

    #[test]
    fn small_cutoff_rejected() {
        let s = GaussianState::two_mode_squeezed(0.5, 0.0, [Mode::Mirror, Mode::Cavity]);
        assert!(fock_oracle(&s, 10).is_err());
    }
}
