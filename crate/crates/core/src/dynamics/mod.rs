//! Linearized fluctuation dynamics and the steady-state covariance matrix.
//!
//! Quadratures are ordered `(δq, δp, δX, δY, δx, δy)`: mirror, cavity, atoms.
//! The fluctuations obey `dv/dt = A v + noise` and the stationary covariance
//! solves `Aσ + σAᵀ + D = 0` for white noise.

mod lyapunov;
mod spectral;

pub use lyapunov::steady_cm_lyapunov;
pub use spectral::{brownian_spectrum, steady_cm_spectral, SpectralDiagnostics};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use crate::gaussian::GaussianState;
use crate::gaussian::{Mode, PHYSICALITY_TOL};
use crate::model::OperatingPoint;

/// Default high-frequency cutoff of the colored Brownian spectrum, in units
/// of `ω_m`.
pub const DEFAULT_CUTOFF_OVER_OMEGA_M: f64 = 200.0;

/// Statistics of the mirror's thermal force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NoiseModel {
    /// High-Q white-noise limit, `γ_m(2n̄+1)` on the momentum.
    Markovian,
    /// Ohmic `(γ_m ω/ω_m) coth(ħω/2k_BT)` spectrum, kept for `|ω| ≤ cutoff`
    /// (rad/s).
    ColoredBrownian { cutoff: f64 },
}

impl NoiseModel {
    pub fn colored_default(omega_m: f64) -> Self {
        NoiseModel::ColoredBrownian {
            cutoff: DEFAULT_CUTOFF_OVER_OMEGA_M * omega_m,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub drift: DMatrix<f64>,
    /// White-noise diffusion `diag(0, γ_m(2n̄+1), κ, κ, γ_a, γ_a)`.
    pub diffusion: DMatrix<f64>,
    pub noise: NoiseModel,
    pub op: OperatingPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub stable: bool,
    /// Largest real part among the eigenvalues of `A`.
    pub abscissa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Physicality {
    pub physical: bool,
    /// Smallest eigenvalue of `σ + iΩ/2`.
    pub min_eigenvalue: f64,
}

/// Drift and diffusion of the fluctuations about `op`.
pub fn build_model(op: &OperatingPoint, noise: NoiseModel) -> LinearModel {
    let p = &op.params;
    let (wm, gm) = (p.omega_m, p.gamma_m);
    let (k, d) = (p.kappa, op.delta_c_eff);
    let (ga, da) = (p.gamma_a, p.delta_a);
    let (x, g) = (op.chi_eff, op.g_n);
    #[rustfmt::skip]
    let drift = DMatrix::from_row_slice(6, 6, &[
        0.0, wm,  0.0, 0.0, 0.0, 0.0,
        -wm, -gm, x,   0.0, 0.0, 0.0,
        0.0, 0.0, -k,  d,   0.0, g,
        x,   0.0, -d,  -k,  -g,  0.0,
        0.0, 0.0, 0.0, g,   -ga, da,
        0.0, 0.0, -g,  0.0, -da, -ga,
    ]);
    let diffusion = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        0.0,
        gm * (2.0 * op.nbar + 1.0),
        k,
        k,
        ga,
        ga,
    ]));
    LinearModel {
        drift,
        diffusion,
        noise,
        op: *op,
    }
}

/// Strict Hurwitz test on the drift matrix.
pub fn stability(model: &LinearModel) -> Stability {
    let abscissa = spectral_abscissa(&model.drift);
    Stability {
        stable: abscissa < 0.0,
        abscissa,
    }
}

pub(crate) fn spectral_abscissa(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn physicality(state: &GaussianState) -> Physicality {
    let min_eigenvalue = state.uncertainty_min_eigenvalue();
    Physicality {
        physical: min_eigenvalue >= -PHYSICALITY_TOL,
        min_eigenvalue,
    }
}

/// The steady state under the model's own noise description: Lyapunov for
/// white noise, frequency integral for colored noise.
pub fn steady_state(model: &LinearModel) -> crate::Result<GaussianState> {
    match model.noise {
        NoiseModel::Markovian => steady_cm_lyapunov(model),
        NoiseModel::ColoredBrownian { .. } => steady_cm_spectral(model).map(|(s, _)| s),
    }
}

fn labelled(sigma: DMatrix<f64>) -> crate::Result<GaussianState> {
    GaussianState::new(sigma, Mode::ALL.to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AtomCoupling, Detuning, PhysicalParams};
    use crate::units::hz_to_angular;

    pub(crate) fn op_from(
        chi_eff: f64,
        g_n: f64,
        kappa: f64,
        gamma_a: f64,
        gamma_m: f64,
        nbar_temp: f64,
    ) -> OperatingPoint {
        let omega_m = hz_to_angular(1e7);
        let params = PhysicalParams {
            mass: 10e-12,
            omega_m,
            gamma_m,
            temperature: nbar_temp,
            power: 35e-3,
            wavelength: 1064e-9,
            length: 1e-3,
            kappa,
            gamma_a,
            delta_a: -omega_m,
            detuning: Detuning::Effective(omega_m),
            coupling: AtomCoupling::Fixed(g_n),
        };
        OperatingPoint {
            alpha_s: 0.0,
            chi: params.chi(),
            chi_eff,
            g_n,
            delta_c: omega_m,
            delta_c_eff: omega_m,
            epsilon: params.epsilon(),
            multistable: false,
            nbar: params.nbar(),
            params,
        }
    }

    #[test]
    fn drift_rows_and_diffusion() {
        let op = op_from(3.0, 5.0, 7.0, 11.0, 13.0, 0.0);
        let m = build_model(&op, NoiseModel::Markovian);
        let wm = op.params.omega_m;
        assert_eq!(m.drift.row(1).iter().copied().collect::<Vec<_>>(), vec![-wm, -13.0, 3.0, 0.0, 0.0, 0.0]);
        assert_eq!(m.drift[(3, 0)], 3.0);
        assert_eq!(m.drift[(2, 5)], 5.0);
        assert_eq!(m.drift[(3, 4)], -5.0);
        assert_eq!(m.drift[(5, 4)], wm);
        assert_eq!(m.diffusion[(1, 1)], 13.0);
        assert_eq!(m.diffusion[(4, 4)], 11.0);
    }

    #[test]
    fn uncoupled_drift_is_block_diagonal() {
        let m = build_model(&op_from(0.0, 0.0, 1e6, 1e6, 1e3, 1e-4), NoiseModel::Markovian);
        for i in 0..6 {
            for j in 0..6 {
                if i / 2 != j / 2 {
                    assert_eq!(m.drift[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn lossless_uncoupled_drift_is_pure_rotation() {
        let m = build_model(&op_from(0.0, 0.0, 0.0, 0.0, 0.0, 0.0), NoiseModel::Markovian);
        assert_eq!(m.drift.transpose(), -&m.drift);
        let s = stability(&m);
        assert!(!s.stable);
        assert!(s.abscissa.abs() < 1e-6);
    }

    #[test]
    fn lossless_coupled_is_not_stable() {
        let m = build_model(&op_from(1e6, 1e6, 0.0, 0.0, 0.0, 0.0), NoiseModel::Markovian);
        assert!(!stability(&m).stable);
    }

    #[test]
    fn diagonal_damping_is_stable() {
        let mut m = build_model(&op_from(0.0, 0.0, 1.0, 1.0, 1.0, 0.0), NoiseModel::Markovian);
        m.drift = -DMatrix::identity(6, 6);
        let s = stability(&m);
        assert!(s.stable);
        assert!((s.abscissa + 1.0).abs() < 1e-12);
    }

    #[test]
    fn physicality_fixtures() {
        let v = physicality(&GaussianState::vacuum(&Mode::ALL));
        assert!(v.physical && v.min_eigenvalue.abs() < 1e-14);
        let s = GaussianState::new(DMatrix::identity(6, 6) * 0.25, Mode::ALL.to_vec()).unwrap();
        assert!(!physicality(&s).physical);
    }
}
