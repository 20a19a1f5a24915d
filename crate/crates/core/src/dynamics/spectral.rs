use nalgebra::{Complex, DMatrix, SMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{labelled, stability, LinearModel, NoiseModel};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::quadrature::{integrate, QuadratureOptions};
use crate::units::{HBAR, K_B};

type C6 = SMatrix<Complex<f64>, 6, 6>;

/// Integration range as a multiple of the fastest rate in the model.
pub const OMEGA_MAX_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralDiagnostics {
    /// Upper limit of the numerical integral (rad/s); beyond it an analytic
    /// tail is added.
    pub omega_max: f64,
    pub intervals: usize,
    pub evaluations: usize,
    /// Summed Gauss–Kronrod error estimate, max-norm over entries.
    pub error_estimate: f64,
    /// Max-norm of the analytic tail contribution.
    pub tail: f64,
}

/// Symmetrized Ohmic Brownian force spectrum `(γ_m ω/ω_m) coth(ħω/2k_BT)`,
/// even in `ω`.
pub fn brownian_spectrum(omega: f64, gamma_m: f64, omega_m: f64, temperature: f64) -> f64 {
    let w = omega.abs();
    if temperature <= 0.0 {
        return gamma_m * w / omega_m;
    }
    let x = HBAR * w / (2.0 * K_B * temperature);
    if x < 1e-6 {
        // ω coth(aω) = 1/a + aω²/3 + ...
        let base = 2.0 * K_B * temperature * gamma_m / (HBAR * omega_m);
        return base * (1.0 + x * x / 3.0);
    }
    gamma_m * w / omega_m / x.tanh()
}

const PAIRS: usize = 21;

fn upper_index() -> [(usize, usize); PAIRS] {
    let mut out = [(0, 0); PAIRS];
    let mut k = 0;
    for i in 0..6 {
        for j in i..6 {
            out[k] = (i, j);
            k += 1;
        }
    }
    out
}

/// Steady covariance as the frequency integral
/// `σ = (1/2π) ∫ M(ω) D(ω) M(ω)† dω`, `M = (A + iω)⁻¹`.
///
/// Only the real part contributes and it is even in `ω`, so the integral runs
/// over `[0, Ω]` and is doubled. Resonances at `|Im λ(A)|` seed the adaptive
/// partition. Past `Ω` the expansion `Re MDM† = D/ω² + C/ω⁴ + O(ω⁻⁶)` with
/// `C = ADAᵀ − A²D − D(Aᵀ)²` is integrated in closed form.
pub fn steady_cm_spectral(model: &LinearModel) -> Result<(GaussianState, SpectralDiagnostics)> {
    let st = stability(model);
    if !st.stable {
        return Err(Error::Unstable {
            abscissa: st.abscissa,
        });
    }
    let p = &model.op.params;
    let a = &model.drift;
    let a6 = SMatrix::<f64, 6, 6>::from_iterator(a.iter().copied());
    let white: [f64; 6] = std::array::from_fn(|k| model.diffusion[(k, k)]);

    let rate = [
        p.omega_m,
        model.op.delta_c_eff.abs(),
        p.delta_a.abs(),
        p.kappa,
        p.gamma_a,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let mut upper = OMEGA_MAX_FACTOR * rate;
    let colored_cutoff = match model.noise {
        NoiseModel::Markovian => None,
        NoiseModel::ColoredBrownian { cutoff } => {
            if !(cutoff > 0.0 && cutoff.is_finite()) {
                return Err(Error::domain(format!(
                    "spectral cutoff must be positive, got {cutoff}"
                )));
            }
            upper = upper.max(cutoff);
            Some(cutoff)
        }
    };

    let mut breaks: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.im.abs()).collect();
    breaks.extend(colored_cutoff);

    let idx = upper_index();
    let integrand = |w: f64, out: &mut [f64]| {
        let shifted = C6::from_fn(|i, j| {
            Complex::new(a6[(i, j)], if i == j { w } else { 0.0 })
        });
        let m = shifted.try_inverse().unwrap_or_else(|| C6::from_element(Complex::new(f64::NAN, 0.0)));
        let mut d = white;
        if let Some(cut) = colored_cutoff {
            d[1] = if w <= cut {
                brownian_spectrum(w, p.gamma_m, p.omega_m, p.temperature)
            } else {
                0.0
            };
        }
        for (slot, &(i, j)) in out.iter_mut().zip(idx.iter()) {
            let mut acc = 0.0;
            for k in 0..6 {
                if d[k] != 0.0 {
                    acc += d[k] * (m[(i, k)] * m[(j, k)].conj()).re;
                }
            }
            *slot = acc / PI;
        }
    };

    let scale = white
        .iter()
        .zip([0.0, p.gamma_m, p.kappa, p.kappa, p.gamma_a, p.gamma_a])
        .filter(|(_, g)| *g > 0.0)
        .map(|(d, g)| d / g)
        .fold(1.0, f64::max);
    let opts = QuadratureOptions {
        abs_tol: 1e-12 * scale,
        ..QuadratureOptions::default()
    };
    let q = integrate(integrand, 0.0, upper, &breaks, PAIRS, opts);
    if !q.converged || q.value.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "spectral quadrature did not converge on [0, {upper:e}]: error estimate {:e} \
             (tolerance {:e}) after {} intervals, {} evaluations",
            q.error, opts.abs_tol, q.intervals, q.evaluations
        )));
    }

    // analytic tail over (upper, ∞) for the white entries
    let mut dw = model.diffusion.clone();
    if colored_cutoff.is_some() {
        dw[(1, 1)] = 0.0;
    }
    let a2 = a * a;
    let c = a * &dw * a.transpose() - &a2 * &dw - &dw * a2.transpose();
    let tail = (&dw / upper + c / (3.0 * upper.powi(3))) / PI;

    let mut sigma = DMatrix::zeros(6, 6);
    for (v, &(i, j)) in q.value.iter().zip(idx.iter()) {
        sigma[(i, j)] = v + tail[(i, j)];
        sigma[(j, i)] = sigma[(i, j)];
    }
    let diag = SpectralDiagnostics {
        omega_max: upper,
        intervals: q.intervals,
        evaluations: q.evaluations,
        error_estimate: q.error,
        tail: tail.amax(),
    };
    Ok((labelled(sigma)?, diag))
}
