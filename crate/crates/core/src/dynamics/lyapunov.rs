use nalgebra::{DMatrix, DVector};

use super::{labelled, stability, LinearModel, NoiseModel};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;

/// Relative Frobenius residual accepted for `Aσ + σAᵀ + D`.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;

/// Solve `Aσ + σAᵀ + D = 0` for the white-noise model.
///
/// The equation is vectorized as `(I⊗A + A⊗I) vec σ = −vec D` and solved by
/// LU with one step of iterative refinement.
pub fn steady_cm_lyapunov(model: &LinearModel) -> Result<GaussianState> {
    if model.noise != NoiseModel::Markovian {
        return Err(Error::domain(
            "the Lyapunov solver needs white noise; use the spectral solver for colored noise",
        ));
    }
    let st = stability(model);
    if !st.stable {
        return Err(Error::Unstable {
            abscissa: st.abscissa,
        });
    }
    let sigma = solve_lyapunov(&model.drift, &model.diffusion)?;
    labelled(sigma)
}

pub(crate) fn solve_lyapunov(a: &DMatrix<f64>, d: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let k = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -DVector::from_column_slice(d.as_slice());
    let lu = k.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Lyapunov operator".into()))?;
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let s = DMatrix::from_column_slice(n, n, x.as_slice());
    let s = (&s + s.transpose()) * 0.5;
    let residual = (a * &s + &s * a.transpose() + d).norm();
    let scale = d.norm().max(f64::MIN_POSITIVE);
    if residual > LYAPUNOV_RESIDUAL_TOL * scale {
        return Err(Error::Numerical(format!(
            "Lyapunov residual {:e} exceeds {:e}·‖D‖",
            residual / scale,
            LYAPUNOV_RESIDUAL_TOL
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::super::build_model;
    use super::super::tests::op_from;
    use super::*;
    use crate::model::thermal_occupation;
    use approx::assert_relative_eq;

    #[test]
    fn decoupled_modes_relax_to_bath_states() {
        let op = op_from(0.0, 0.0, 2e6, 3e6, 600.0, 1e-2);
        let m = build_model(&op, NoiseModel::Markovian);
        let s = steady_cm_lyapunov(&m).unwrap();
        let nbar = thermal_occupation(1e-2, op.params.omega_m);
        assert!(nbar > 1.0);
        for i in 0..6 {
            let want = if i < 2 { nbar + 0.5 } else { 0.5 };
            assert_relative_eq!(s.sigma[(i, i)], want, max_relative = 1e-9);
        }
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert!(s.sigma[(i, j)].abs() < 1e-9 * (nbar + 1.0));
                }
            }
        }
    }

    #[test]
    fn colored_noise_rejected() {
        let op = op_from(0.0, 0.0, 2e6, 3e6, 600.0, 1e-2);
        let m = build_model(&op, NoiseModel::ColoredBrownian { cutoff: 1e9 });
        assert!(matches!(steady_cm_lyapunov(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn unstable_rejected() {
        let op = op_from(1e6, 1e6, 0.0, 0.0, 0.0, 0.0);
        let m = build_model(&op, NoiseModel::Markovian);
        assert!(matches!(steady_cm_lyapunov(&m), Err(Error::Unstable { .. })));
    }

    #[test]
    fn mirror_variance_grows_with_temperature() {
        let mut last = 0.0;
        for t in [0.0, 1e-4, 1e-3, 1e-2, 1.0] {
            let op = op_from(0.0, 0.0, 2e6, 3e6, 600.0, t);
            let s = steady_cm_lyapunov(&build_model(&op, NoiseModel::Markovian)).unwrap();
            assert!(s.sigma[(0, 0)] > last || (t == 0.0 && s.sigma[(0, 0)] > 0.0));
            last = s.sigma[(0, 0)];
        }
    }
}
