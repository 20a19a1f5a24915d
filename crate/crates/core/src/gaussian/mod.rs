//! Covariance-matrix algebra for zero-mean Gaussian states.
//!
//! Conventions, used everywhere in the crate:
//!
//! * quadratures are ordered `(q, p)` per mode and vacuum has `σ = I/2`;
//! * the uncertainty relation reads `σ + iΩ/2 ≥ 0`, so every symplectic
//!   eigenvalue of a physical state is at least `1/2`;
//! * the Wigner function is `W(O) = exp(−Oᵀσ⁻¹O) / (πⁿ √det σ)` over the
//!   amplitude coordinates `O`; vacuum gives `(2/π)ⁿ` at the origin and the
//!   displaced parity expectation is `(π/2)ⁿ W`.

mod state;

pub use state::{GaussianState, Mode, PHYSICALITY_TOL};

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bipartition of a state's modes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub side_a: Vec<Mode>,
    pub side_b: Vec<Mode>,
}

impl Partition {
    /// Validate `side_a | side_b` as a nonempty disjoint cover of `state`.
    pub fn new(side_a: Vec<Mode>, side_b: Vec<Mode>, state: &GaussianState) -> Result<Self> {
        if side_a.is_empty() || side_b.is_empty() {
            return Err(Error::domain("both sides of a partition must be nonempty"));
        }
        let mut all: Vec<Mode> = side_a.iter().chain(&side_b).copied().collect();
        all.sort();
        let len = all.len();
        all.dedup();
        if all.len() != len {
            return Err(Error::domain("partition sides overlap"));
        }
        let mut modes = state.modes.clone();
        modes.sort();
        if modes != all {
            return Err(Error::domain("partition does not cover the state's modes"));
        }
        Ok(Self { side_a, side_b })
    }

    /// `mode` against everything else in `state`.
    pub fn one_vs_rest(mode: Mode, state: &GaussianState) -> Result<Self> {
        let rest = state.modes.iter().copied().filter(|&m| m != mode).collect();
        Self::new(vec![mode], rest, state)
    }
}

/// Outcome of projecting some modes onto vacuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    /// Probability of finding every measured mode in vacuum.
    pub weight: f64,
    /// State of the unmeasured modes given that outcome.
    pub conditional: GaussianState,
}

/// Gaussian partial trace: keep the listed modes, in the listed order.
pub fn reduce(state: &GaussianState, modes: &[Mode]) -> Result<GaussianState> {
    if modes.is_empty() {
        return Err(Error::domain("cannot reduce to an empty set of modes"));
    }
    let idx: Vec<usize> = modes
        .iter()
        .map(|&m| state.quadratures(m))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let sigma = DMatrix::from_fn(idx.len(), idx.len(), |i, j| state.sigma[(idx[i], idx[j])]);
    GaussianState::new(sigma, modes.to_vec())
}

/// Symplectic spectrum of a symmetric positive semidefinite matrix, ascending.
///
/// Uses the Hermitian matrix `i·σ^{1/2} Ω σ^{1/2}`, which is similar to `iΩσ`
/// and whose eigenvalues come in `±ν` pairs.
pub fn symplectic_spectrum(sigma: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = sigma.nrows();
    if n == 0 || n % 2 != 0 || sigma.ncols() != n {
        return Err(Error::domain("symplectic spectrum needs a square matrix of even size"));
    }
    let scale = sigma.amax().max(f64::MIN_POSITIVE);
    if (sigma - sigma.transpose()).amax() > 1e-10 * scale {
        return Err(Error::domain("matrix is not symmetric"));
    }
    let sym = (sigma + sigma.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l < -1e-12 * scale) {
        return Err(Error::domain("matrix is not positive semidefinite"));
    }
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.transpose();
    let om = GaussianState::symplectic_form(n / 2);
    let k = &root * om * &root;
    let h = DMatrix::from_fn(n, n, |i, j| Complex::new(0.0, k[(i, j)]));
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().map(|v| v.abs()).collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    symplectic_spectrum(&state.sigma)
}

/// Logarithmic negativity `max(0, −ln 2ν̃₋)` across `partition`, where `ν̃₋` is
/// the smallest symplectic eigenvalue after flipping the momentum sign of
/// every mode on side A.
pub fn log_negativity(state: &GaussianState, partition: &Partition) -> Result<f64> {
    Partition::new(partition.side_a.clone(), partition.side_b.clone(), state)?;
    state.require_physical()?;
    let mut flipped = state.sigma.clone();
    for &m in &partition.side_a {
        let [_, p] = state.quadratures(m)?;
        for k in 0..flipped.nrows() {
            if k != p {
                flipped[(p, k)] = -flipped[(p, k)];
                flipped[(k, p)] = -flipped[(k, p)];
            }
        }
    }
    let nu_min = symplectic_spectrum(&flipped)?[0];
    Ok((-(2.0 * nu_min).ln()).max(0.0))
}

/// Bipartite log-negativity between two modes after tracing out the rest.
pub fn pairwise_log_negativity(state: &GaussianState, i: Mode, j: Mode) -> Result<f64> {
    let reduced = reduce(state, &[i, j])?;
    log_negativity(&reduced, &Partition::new(vec![i], vec![j], &reduced)?)
}

/// Geometric mean of the three one-vs-two log-negativities of a 3-mode state.
pub fn tripartite_negativity(state: &GaussianState) -> Result<f64> {
    if state.num_modes() != 3 {
        return Err(Error::domain(format!(
            "tripartite negativity needs 3 modes, got {}",
            state.num_modes()
        )));
    }
    let mut product = 1.0;
    for &m in &state.modes {
        let e = log_negativity(state, &Partition::one_vs_rest(m, state)?)?;
        if e == 0.0 {
            return Ok(0.0);
        }
        product *= e;
    }
    Ok(product.cbrt())
}

/// Precomputed Gaussian Wigner function.
#[derive(Debug, Clone)]
pub struct GaussianWigner {
    inverse: DMatrix<f64>,
    /// `1/(πⁿ √det σ)`
    prefactor: f64,
}

impl GaussianWigner {
    pub fn new(state: &GaussianState) -> Result<Self> {
        Self::from_matrix(&state.sigma)
    }

    pub fn from_matrix(sigma: &DMatrix<f64>) -> Result<Self> {
        let n = sigma.nrows();
        let chol = sigma.clone().cholesky().ok_or_else(|| {
            Error::domain("Wigner function needs a positive definite covariance matrix")
        })?;
        let det_sqrt: f64 = chol.l_dirty().diagonal().iter().product();
        if !(det_sqrt > 0.0) {
            return Err(Error::domain("singular covariance matrix"));
        }
        let inverse = chol.inverse();
        let inverse = (&inverse + inverse.transpose()) * 0.5;
        let prefactor = 1.0 / (std::f64::consts::PI.powi((n / 2) as i32) * det_sqrt);
        Ok(Self { inverse, prefactor })
    }

    pub fn dim(&self) -> usize {
        self.inverse.nrows()
    }

    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    /// `Oᵀσ⁻¹O`
    pub fn quadratic_form(&self, point: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.inverse[(i, j)] * point[j];
            }
            acc += point[i] * row;
        }
        acc
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.prefactor * (-self.quadratic_form(point)).exp()
    }
}

/// Value of the Wigner function at `point` (`2n` amplitude coordinates).
pub fn wigner(state: &GaussianState, point: &[f64]) -> Result<f64> {
    if point.len() != state.sigma.nrows() {
        return Err(Error::domain(format!(
            "point has {} coordinates, state needs {}",
            point.len(),
            state.sigma.nrows()
        )));
    }
    Ok(GaussianWigner::new(state)?.eval(point))
}

/// Project `measured` modes onto vacuum.
///
/// With `σ` split into kept block `A`, measured block `B` and cross block `C`,
/// the outcome probability is `1/√det(B + I/2)` and the kept modes are left in
/// `A − C (B + I/2)⁻¹ Cᵀ`.
pub fn vacuum_project(state: &GaussianState, measured: &[Mode]) -> Result<ProjectionResult> {
    if measured.is_empty() {
        return Err(Error::domain("nothing to measure"));
    }
    for m in measured {
        state.quadratures(*m)?;
    }
    let kept: Vec<Mode> = state
        .modes
        .iter()
        .copied()
        .filter(|m| !measured.contains(m))
        .collect();
    if kept.is_empty() {
        return Err(Error::domain("vacuum projection must leave at least one mode"));
    }
    let idx = |modes: &[Mode]| -> Vec<usize> {
        modes
            .iter()
            .flat_map(|&m| state.quadratures(m).expect("checked above"))
            .collect()
    };
    let (ka, kb) = (idx(&kept), idx(measured));
    let block = |r: &[usize], c: &[usize]| {
        DMatrix::from_fn(r.len(), c.len(), |i, j| state.sigma[(r[i], c[j])])
    };
    let a = block(&ka, &ka);
    let b = block(&kb, &kb) + DMatrix::identity(kb.len(), kb.len()) * 0.5;
    let c = block(&ka, &kb);
    let chol = b.cholesky().ok_or_else(|| {
        Error::Numerical("σ_B + I/2 is not positive definite; input state is unphysical".into())
    })?;
    let det_sqrt: f64 = chol.l_dirty().diagonal().iter().product();
    let weight = 1.0 / det_sqrt;
    let schur = &a - &c * chol.solve(&c.transpose());
    Ok(ProjectionResult {
        weight,
        conditional: GaussianState::new((&schur + schur.transpose()) * 0.5, kept)?,
    })
}

/// Apply an independent phase-space rotation by `angles[k]` to mode `k`.
pub fn rotate_locally(state: &GaussianState, angles: &[f64]) -> Result<GaussianState> {
    if angles.len() != state.num_modes() {
        return Err(Error::domain("one rotation angle per mode expected"));
    }
    let n = state.sigma.nrows();
    let mut r = DMatrix::zeros(n, n);
    for (k, &t) in angles.iter().enumerate() {
        let (s, c) = t.sin_cos();
        r[(2 * k, 2 * k)] = c;
        r[(2 * k, 2 * k + 1)] = -s;
        r[(2 * k + 1, 2 * k)] = s;
        r[(2 * k + 1, 2 * k + 1)] = c;
    }
    GaussianState::new(&r * &state.sigma * r.transpose(), state.modes.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tmsv(r: f64) -> GaussianState {
        GaussianState::two_mode_squeezed(r, 0.0, [Mode::Mirror, Mode::Cavity])
    }

    #[test]
    fn reduce_vacuum_and_blocks() {
        let v = GaussianState::vacuum(&Mode::ALL);
        let m = reduce(&v, &[Mode::Mirror]).unwrap();
        assert_eq!(m.sigma, DMatrix::identity(2, 2) * 0.5);

        let s = tmsv(0.4).product(&GaussianState::thermal(Mode::Atoms, 2.0)).unwrap();
        let a = reduce(&s, &[Mode::Atoms]).unwrap();
        assert_eq!(a.sigma, DMatrix::identity(2, 2) * 2.5);
        let once = reduce(&s, &[Mode::Cavity]).unwrap();
        let twice = reduce(&reduce(&s, &[Mode::Cavity, Mode::Atoms]).unwrap(), &[Mode::Cavity]).unwrap();
        assert_eq!(once, twice);
        assert!(reduce(&s, &[]).is_err());
        assert!(reduce(&tmsv(0.1), &[Mode::Atoms]).is_err());
    }

    #[test]
    fn symplectic_eigenvalue_fixtures() {
        let v = symplectic_eigenvalues(&GaussianState::vacuum(&Mode::ALL)).unwrap();
        for nu in v {
            assert_relative_eq!(nu, 0.5, epsilon = 1e-14);
        }
        let t = symplectic_eigenvalues(&GaussianState::thermal(Mode::Cavity, 3.2)).unwrap();
        assert_relative_eq!(t[0], 3.7, epsilon = 1e-13);
        // pure: det σ = 1/16 and both eigenvalues 1/2
        let s = tmsv(0.8);
        assert_relative_eq!(s.sigma.determinant(), 1.0 / 16.0, epsilon = 1e-12);
        for nu in symplectic_eigenvalues(&s).unwrap() {
            assert_relative_eq!(nu, 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn tmsv_log_negativity_is_2r() {
        for r in [0.01, 0.3, 1.0, 2.0] {
            let s = tmsv(r);
            let p = Partition::new(vec![Mode::Mirror], vec![Mode::Cavity], &s).unwrap();
            assert!((log_negativity(&s, &p).unwrap() - 2.0 * r).abs() < 1e-9);
            let q = Partition::new(vec![Mode::Cavity], vec![Mode::Mirror], &s).unwrap();
            assert!((log_negativity(&s, &q).unwrap() - 2.0 * r).abs() < 1e-9);
        }
    }

    #[test]
    fn product_states_carry_no_entanglement() {
        let s = GaussianState::thermal(Mode::Mirror, 0.3)
            .product(&GaussianState::thermal(Mode::Cavity, 0.0))
            .unwrap()
            .product(&GaussianState::thermal(Mode::Atoms, 1.0))
            .unwrap();
        for m in Mode::ALL {
            let p = Partition::one_vs_rest(m, &s).unwrap();
            assert_eq!(log_negativity(&s, &p).unwrap(), 0.0);
        }
        assert_eq!(tripartite_negativity(&s).unwrap(), 0.0);
        assert_eq!(tripartite_negativity(&GaussianState::vacuum(&Mode::ALL)).unwrap(), 0.0);
        let bi = tmsv(0.5).product(&GaussianState::vacuum(&[Mode::Atoms])).unwrap();
        assert_eq!(tripartite_negativity(&bi).unwrap(), 0.0);
        assert!(tripartite_negativity(&tmsv(0.5)).is_err());
    }

    #[test]
    fn unphysical_state_is_a_domain_error() {
        let s = GaussianState::new(DMatrix::identity(4, 4) * 0.2, vec![Mode::Mirror, Mode::Cavity]).unwrap();
        let p = Partition::one_vs_rest(Mode::Mirror, &s).unwrap();
        assert!(matches!(log_negativity(&s, &p), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_partitions_rejected() {
        let s = GaussianState::vacuum(&Mode::ALL);
        assert!(Partition::new(vec![Mode::Mirror], vec![Mode::Cavity], &s).is_err());
        assert!(Partition::new(vec![Mode::Mirror], vec![Mode::Mirror, Mode::Cavity, Mode::Atoms], &s).is_err());
        assert!(Partition::new(vec![], Mode::ALL.to_vec(), &s).is_err());
    }

    #[test]
    fn wigner_vacuum_origin_and_decay() {
        let v = GaussianState::vacuum(&Mode::ALL);
        let w0 = wigner(&v, &[0.0; 6]).unwrap();
        assert_relative_eq!(w0, (2.0 / PI).powi(3), max_relative = 1e-14);
        assert_relative_eq!(w0, 0.258_012_275_6, max_relative = 1e-9);
        assert!(wigner(&v, &[30.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap() < 1e-300);
        assert!(wigner(&v, &[0.0; 4]).is_err());
        let singular = GaussianState::new(DMatrix::zeros(2, 2), vec![Mode::Mirror]).unwrap();
        assert!(wigner(&singular, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn thermal_wigner_integrates_to_one() {
        // trapezoid on a wide grid; the integrand is analytic so this
        // converges spectrally
        let s = GaussianState::thermal(Mode::Mirror, 1.7);
        let w = GaussianWigner::new(&s).unwrap();
        let (half, n) = (12.0, 241);
        let h = 2.0 * half / (n - 1) as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = -half + i as f64 * h;
                let y = -half + j as f64 * h;
                total += w.eval(&[x, y]);
            }
        }
        assert!((total * h * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn vacuum_projection_fixtures() {
        let nbar = 0.7;
        let s = GaussianState::thermal(Mode::Mirror, 0.2)
            .product(&GaussianState::thermal(Mode::Cavity, nbar))
            .unwrap();
        let r = vacuum_project(&s, &[Mode::Cavity]).unwrap();
        assert_relative_eq!(r.weight, 1.0 / (nbar + 1.0), max_relative = 1e-14);
        assert_relative_eq!(r.conditional.sigma, DMatrix::identity(2, 2) * 0.7, epsilon = 1e-15);

        let v = GaussianState::thermal(Mode::Mirror, 0.2)
            .product(&GaussianState::vacuum(&[Mode::Atoms]))
            .unwrap();
        let r = vacuum_project(&v, &[Mode::Atoms]).unwrap();
        assert_relative_eq!(r.weight, 1.0, epsilon = 1e-15);

        // pure TMSV: vacuum on one arm leaves vacuum on the other, with
        // probability |⟨00|ψ⟩|² = 1/cosh²r
        let r = vacuum_project(&tmsv(0.6), &[Mode::Cavity]).unwrap();
        assert_relative_eq!(r.conditional.sigma, DMatrix::identity(2, 2) * 0.5, epsilon = 1e-12);
        assert_relative_eq!(r.weight, 1.0 / 0.6f64.cosh().powi(2), max_relative = 1e-12);
        assert!(vacuum_project(&tmsv(0.6), &[Mode::Cavity, Mode::Mirror]).is_err());
        assert!(vacuum_project(&tmsv(0.6), &[]).is_err());
    }

    #[test]
    fn vacuum_weight_matches_phase_space_overlap() {
        // P(0) = π ∫ W_B W_vac d²α on the measured mode
        let s = GaussianState::two_mode_squeezed(0.4, 0.3, [Mode::Mirror, Mode::Atoms]);
        let r = vacuum_project(&s, &[Mode::Atoms]).unwrap();
        let wb = GaussianWigner::new(&reduce(&s, &[Mode::Atoms]).unwrap()).unwrap();
        let wv = GaussianWigner::new(&GaussianState::vacuum(&[Mode::Atoms])).unwrap();
        let (half, n) = (8.0, 401);
        let h = 2.0 * half / (n - 1) as f64;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let p = [-half + i as f64 * h, -half + j as f64 * h];
                acc += wb.eval(&p) * wv.eval(&p);
            }
        }
        assert!((PI * acc * h * h - r.weight).abs() < 1e-4);
    }

    fn random_state(seed: &[f64]) -> GaussianState {
        // σ = S Sᵀ/2 + thermal noise, S from a few symplectic-ish shears
        let n = 6;
        let mut m = DMatrix::identity(n, n) * 0.5;
        for (k, &x) in seed.iter().enumerate() {
            let i = k % n;
            let j = (k * 7 + 3) % n;
            m[(i, j)] += 0.1 * x;
            m[(j, i)] += 0.1 * x;
        }
        // make it comfortably physical by adding a multiple of identity
        let min_ev = m.clone().symmetric_eigenvalues().min();
        let shift = if min_ev < 0.6 { 0.6 - min_ev } else { 0.0 };
        let s = m + DMatrix::identity(n, n) * shift;
        GaussianState::new(s, Mode::ALL.to_vec()).unwrap()
    }

    proptest! {
        #[test]
        fn log_negativity_is_local_rotation_invariant(
            seed in prop::collection::vec(-1.0f64..1.0, 12),
            angles in prop::collection::vec(0.0f64..6.3, 3),
        ) {
            let s = GaussianState::two_mode_squeezed(0.5, 0.1, [Mode::Mirror, Mode::Cavity])
                .product(&GaussianState::thermal(Mode::Atoms, 0.2)).unwrap();
            let mixed = GaussianState::new(&s.sigma + random_state(&seed).sigma * 0.05, s.modes.clone()).unwrap();
            let rot = rotate_locally(&mixed, &angles).unwrap();
            for m in Mode::ALL {
                let a = log_negativity(&mixed, &Partition::one_vs_rest(m, &mixed).unwrap()).unwrap();
                let b = log_negativity(&rot, &Partition::one_vs_rest(m, &rot).unwrap()).unwrap();
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn physical_states_respect_the_purity_bound(seed in prop::collection::vec(-1.0f64..1.0, 12)) {
            let s = random_state(&seed);
            prop_assume!(s.is_physical());
            for nu in symplectic_eigenvalues(&s).unwrap() {
                prop_assert!(nu >= 0.5 - 1e-10);
            }
        }

        #[test]
        fn tripartite_negativity_ignores_mode_order(r in 0.05f64..1.0, t in 0.0f64..1.5) {
            // a genuinely tripartite state: TMSV on (mirror, cavity), then a beam
            // splitter mixing cavity and atoms
            let s = GaussianState::two_mode_squeezed(r, 0.0, [Mode::Mirror, Mode::Cavity])
                .product(&GaussianState::vacuum(&[Mode::Atoms])).unwrap();
            let mut b = DMatrix::<f64>::identity(6, 6);
            let (sn, cs) = t.sin_cos();
            for k in 0..2 {
                b[(2 + k, 2 + k)] = cs;
                b[(2 + k, 4 + k)] = sn;
                b[(4 + k, 2 + k)] = -sn;
                b[(4 + k, 4 + k)] = cs;
            }
            let mixed = GaussianState::new(&b * &s.sigma * b.transpose(), s.modes.clone()).unwrap();
            let perm = reduce(&mixed, &[Mode::Atoms, Mode::Mirror, Mode::Cavity]).unwrap();
            let a = tripartite_negativity(&mixed).unwrap();
            let c = tripartite_negativity(&perm).unwrap();
            prop_assert!((a - c).abs() < 1e-12);
        }
    }
}
