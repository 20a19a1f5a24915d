use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// The three bosonic modes, in drift-matrix order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Mirror,
    Cavity,
    Atoms,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Mirror, Mode::Cavity, Mode::Atoms];
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Mirror => "mirror",
            Mode::Cavity => "cavity",
            Mode::Atoms => "atoms",
        })
    }
}

/// Absolute tolerance used for symmetry and physicality checks.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// A zero-mean Gaussian state: symmetrized covariance matrix
/// `σ_ij = ⟨{δv_i, δv_j}⟩/2` over `(q, p)` pairs, one pair per mode.
///
/// Vacuum is `I/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub modes: Vec<Mode>,
    #[serde(with = "matrix_rows")]
    pub sigma: DMatrix<f64>,
}

impl GaussianState {
    /// Wrap a covariance matrix. Asymmetry up to a relative `1e-10` is
    /// symmetrized away; anything larger is rejected.
    pub fn new(sigma: DMatrix<f64>, modes: Vec<Mode>) -> Result<Self> {
        let n = 2 * modes.len();
        if sigma.nrows() != n || sigma.ncols() != n {
            return Err(Error::domain(format!(
                "covariance matrix is {}x{}, expected {n}x{n} for {} modes",
                sigma.nrows(),
                sigma.ncols(),
                modes.len()
            )));
        }
        if modes.is_empty() {
            return Err(Error::domain("state needs at least one mode"));
        }
        let mut seen = modes.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != modes.len() {
            return Err(Error::domain("duplicate mode labels"));
        }
        if sigma.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("covariance matrix has non-finite entries"));
        }
        let scale = sigma.amax().max(f64::MIN_POSITIVE);
        let asym = (&sigma - sigma.transpose()).amax();
        if asym > 1e-10 * scale {
            return Err(Error::domain(format!(
                "covariance matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        let sigma = (&sigma + sigma.transpose()) * 0.5;
        Ok(Self { modes, sigma })
    }

    pub fn vacuum(modes: &[Mode]) -> Self {
        let n = 2 * modes.len();
        Self {
            modes: modes.to_vec(),
            sigma: DMatrix::identity(n, n) * 0.5,
        }
    }

    /// Thermal state with occupation `nbar` on one mode.
    pub fn thermal(mode: Mode, nbar: f64) -> Self {
        Self {
            modes: vec![mode],
            sigma: DMatrix::identity(2, 2) * (nbar + 0.5),
        }
    }

    /// Two-mode squeezed thermal state: both modes start thermal with
    /// occupation `nbar`, then a two-mode squeezer of strength `r` acts.
    pub fn two_mode_squeezed(r: f64, nbar: f64, modes: [Mode; 2]) -> Self {
        let a = (nbar + 0.5) * (2.0 * r).cosh();
        let c = (nbar + 0.5) * (2.0 * r).sinh();
        let mut s = DMatrix::zeros(4, 4);
        for i in 0..4 {
            s[(i, i)] = a;
        }
        s[(0, 2)] = c;
        s[(2, 0)] = c;
        s[(1, 3)] = -c;
        s[(3, 1)] = -c;
        Self {
            modes: modes.to_vec(),
            sigma: s,
        }
    }

    /// Tensor product (block-diagonal covariance).
    pub fn product(&self, other: &GaussianState) -> Result<Self> {
        let n = self.sigma.nrows();
        let m = other.sigma.nrows();
        let mut s = DMatrix::zeros(n + m, n + m);
        s.view_mut((0, 0), (n, n)).copy_from(&self.sigma);
        s.view_mut((n, n), (m, m)).copy_from(&other.sigma);
        let mut modes = self.modes.clone();
        modes.extend(&other.modes);
        Self::new(s, modes)
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn position(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// Quadrature indices of `mode`, or an error if the mode is absent.
    pub(crate) fn quadratures(&self, mode: Mode) -> Result<[usize; 2]> {
        let i = self
            .position(mode)
            .ok_or_else(|| Error::domain(format!("state has no {mode} mode")))?;
        Ok([2 * i, 2 * i + 1])
    }

    /// Direct sum of `n` copies of `[[0, 1], [−1, 0]]`.
    pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
        let mut om = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            om[(2 * k, 2 * k + 1)] = 1.0;
            om[(2 * k + 1, 2 * k)] = -1.0;
        }
        om
    }

    /// Smallest eigenvalue of the Hermitian matrix `σ + iΩ/2`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let om = Self::symplectic_form(self.num_modes());
        let h = DMatrix::from_fn(self.sigma.nrows(), self.sigma.ncols(), |i, j| {
            Complex::new(self.sigma[(i, j)], 0.5 * om[(i, j)])
        });
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `σ + iΩ/2 ≥ 0` within [`PHYSICALITY_TOL`].
    pub fn is_physical(&self) -> bool {
        self.uncertainty_min_eigenvalue() >= -PHYSICALITY_TOL
    }

    pub(crate) fn require_physical(&self) -> Result<()> {
        let ev = self.uncertainty_min_eigenvalue();
        if ev < -PHYSICALITY_TOL {
            return Err(Error::domain(format!(
                "covariance violates the uncertainty relation (min eigenvalue of σ+iΩ/2 is {ev:e})"
            )));
        }
        Ok(())
    }
}

/// Serialize a matrix as a list of rows.
mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(D::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_physical_with_zero_margin() {
        let v = GaussianState::vacuum(&Mode::ALL);
        assert!(v.is_physical());
        assert!(v.uncertainty_min_eigenvalue().abs() < 1e-14);
    }

    #[test]
    fn sub_vacuum_is_unphysical() {
        let s = GaussianState::new(DMatrix::identity(6, 6) * 0.25, Mode::ALL.to_vec()).unwrap();
        assert!(!s.is_physical());
    }

    #[test]
    fn rejects_bad_shapes_and_asymmetry() {
        assert!(GaussianState::new(DMatrix::identity(4, 4), vec![Mode::Mirror]).is_err());
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 0.1;
        assert!(GaussianState::new(m, vec![Mode::Mirror]).is_err());
        assert!(GaussianState::new(DMatrix::identity(4, 4), vec![Mode::Mirror, Mode::Mirror]).is_err());
    }

    #[test]
    fn json_round_trip_keeps_labels() {
        let s = GaussianState::two_mode_squeezed(0.3, 0.1, [Mode::Mirror, Mode::Atoms]);
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"mirror\"") && text.contains("\"atoms\""));
        let back: GaussianState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
