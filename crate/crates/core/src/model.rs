//! Physical parameters and the classical operating point.
//!
//! The strongly driven cavity field settles to a coherent amplitude `α_s`
//! that solves
//!
//! ```text
//! α_s [κ + iΔ_c − iχ²|α_s|²/ω_m + g_N²/(γ_a + iΔ_a)] = ε
//! ```
//!
//! Writing `n = |α_s|²`, every supported combination of detuning and coupling
//! specification makes the bracket affine in `n`, `z(n) = u + v·n`, so the
//! modulus-squared equation is the cubic `n |u + v n|² = ε²`. This is solved
//! directly; there is no outer self-consistency loop.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, NoiseModel};
use crate::error::{Error, Result};
use crate::units::{C, HBAR, K_B};

type Complex64 = Complex<f64>;

/// How the cavity detuning is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detuning {
    /// Bare detuning `Δ_c = ω_c − ω_l` (rad/s).
    Raw(f64),
    /// Target for the radiation-pressure shifted detuning
    /// `Δ̃_c = Δ_c − χ_eff²/(2ω_m)` (rad/s); the bare value floats.
    Effective(f64),
}

/// How the collective atom–cavity coupling is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomCoupling {
    /// A fixed `g_N` (rad/s).
    Fixed(f64),
    /// `g_N` tracks the effective optomechanical coupling, `g_N = χ_eff`.
    MatchOptomechanical,
}

/// Raw experimental inputs, SI units, angular frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mirror mass (kg).
    pub mass: f64,
    pub omega_m: f64,
    pub gamma_m: f64,
    /// Bath temperature (K).
    pub temperature: f64,
    /// Pump power (W).
    pub power: f64,
    /// Pump wavelength (m).
    pub wavelength: f64,
    /// Cavity length (m).
    pub length: f64,
    /// Cavity amplitude decay rate.
    pub kappa: f64,
    pub gamma_a: f64,
    /// Atomic detuning `ω_a − ω_l`.
    pub delta_a: f64,
    pub detuning: Detuning,
    pub coupling: AtomCoupling,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("mass", self.mass),
            ("omega_m", self.omega_m),
            ("length", self.length),
            ("wavelength", self.wavelength),
            ("power", self.power),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("kappa", self.kappa),
            ("gamma_m", self.gamma_m),
            ("gamma_a", self.gamma_a),
            ("temperature", self.temperature),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        if !self.delta_a.is_finite() {
            return Err(Error::domain("delta_a must be finite"));
        }
        match self.detuning {
            Detuning::Raw(d) | Detuning::Effective(d) if !d.is_finite() => {
                return Err(Error::domain("cavity detuning must be finite"))
            }
            _ => {}
        }
        if let AtomCoupling::Fixed(g) = self.coupling {
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::domain(format!("g_N must be nonnegative, got {g}")));
            }
        }
        Ok(())
    }

    /// Pump angular frequency, also used for the cavity resonance in the
    /// coupling coefficients (the detunings are negligible on that scale).
    pub fn omega_laser(&self) -> f64 {
        2.0 * std::f64::consts::PI * C / self.wavelength
    }

    /// Single-photon optomechanical coupling `χ = (ω_c/L)·√(ħ/mω_m)`.
    pub fn chi(&self) -> f64 {
        self.omega_laser() / self.length * (HBAR / (self.mass * self.omega_m)).sqrt()
    }

    /// Drive amplitude `ε = √(2Pκ/ħω_l)`.
    pub fn epsilon(&self) -> f64 {
        (2.0 * self.power * self.kappa / (HBAR * self.omega_laser())).sqrt()
    }

    pub fn nbar(&self) -> f64 {
        thermal_occupation(self.temperature, self.omega_m)
    }
}

/// Linearization data for one steady state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Steady intracavity amplitude, real and nonnegative by choice of the
    /// drive phase.
    pub alpha_s: f64,
    pub chi: f64,
    /// `√2·χ·α_s`.
    pub chi_eff: f64,
    pub g_n: f64,
    /// Bare cavity detuning.
    pub delta_c: f64,
    /// `Δ_c − χ_eff²/(2ω_m)`.
    pub delta_c_eff: f64,
    pub epsilon: f64,
    /// More than one admissible intracavity intensity exists.
    pub multistable: bool,
    pub nbar: f64,
    pub params: PhysicalParams,
}

impl OperatingPoint {
    /// `|lhs − ε|/ε` of the steady-state equation at the stored values.
    pub fn residual(&self) -> f64 {
        let p = &self.params;
        let n = self.alpha_s * self.alpha_s;
        let z = Complex64::new(self.params.kappa, self.delta_c - self.chi * self.chi * n / p.omega_m)
            + atomic_response(self.g_n * self.g_n, p.gamma_a, p.delta_a);
        if self.epsilon == 0.0 {
            return (self.alpha_s * z.norm()).abs();
        }
        (self.alpha_s * z.norm() - self.epsilon).abs() / self.epsilon
    }
}

fn atomic_response(g2: f64, gamma_a: f64, delta_a: f64) -> Complex64 {
    if g2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(g2, 0.0) / Complex64::new(gamma_a, delta_a)
}

/// Cavity amplitude decay rate from length and finesse, `κ = πc/(2LF)`.
pub fn kappa_from_finesse(length: f64, finesse: f64) -> Result<f64> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::domain(format!("cavity length must be positive, got {length}")));
    }
    if !(finesse > 0.0) || finesse.is_nan() {
        return Err(Error::domain(format!("finesse must be positive, got {finesse}")));
    }
    Ok(std::f64::consts::PI * C / (2.0 * length * finesse))
}

/// Bose–Einstein occupation `1/(exp(ħω/k_BT) − 1)`; exactly zero at `T = 0`.
pub fn thermal_occupation(temperature: f64, omega: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temperature)).exp_m1()
}

/// The steady-state equation reduced to `z(n) = u + v·n` for the given
/// specification.
fn affine_bracket(p: &PhysicalParams, chi: f64) -> Result<(Complex64, Complex64)> {
    let mut u = Complex64::new(p.kappa, 0.0);
    let mut v = Complex64::new(0.0, 0.0);
    match p.detuning {
        Detuning::Raw(dc) => {
            u.im += dc;
            v.im -= chi * chi / p.omega_m;
        }
        Detuning::Effective(dt) => u.im += dt,
    }
    let atom_pole = Complex64::new(p.gamma_a, p.delta_a);
    let needs_pole = match p.coupling {
        AtomCoupling::Fixed(g) => g != 0.0,
        AtomCoupling::MatchOptomechanical => chi != 0.0,
    };
    if needs_pole && atom_pole.norm() == 0.0 {
        return Err(Error::Model(
            "atoms resonant with the pump and undamped (γ_a = Δ_a = 0): steady state undefined"
                .into(),
        ));
    }
    match p.coupling {
        AtomCoupling::Fixed(g) => u += atomic_response(g * g, p.gamma_a, p.delta_a),
        // g_N² = χ_eff² = 2χ²n
        AtomCoupling::MatchOptomechanical if chi != 0.0 => {
            v += Complex64::new(2.0 * chi * chi, 0.0) / atom_pole
        }
        AtomCoupling::MatchOptomechanical => {}
    }
    Ok((u, v))
}

/// Nonnegative real roots, ascending, of `c3 n³ + c2 n² + c1 n + c0` with
/// `c0 ≤ 0` and `c3 ≥ 0`.
///
/// The nonnegative axis is split at the critical points into monotone pieces
/// and each sign change is bisected to machine precision, which keeps the
/// result bit-reproducible.
pub(crate) fn cubic_nonnegative_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let f = |n: f64| ((c3 * n + c2) * n + c1) * n + c0;
    if c0 == 0.0 {
        // n = 0 is a root; deflate.
        let mut roots = vec![0.0];
        roots.extend(quadratic_positive_roots(c3, c2, c1));
        return roots;
    }
    if c3 == 0.0 && c2 == 0.0 {
        return if c1 > 0.0 { vec![-c0 / c1] } else { vec![] };
    }
    // upper bound on positive roots (Cauchy)
    let lead = if c3 != 0.0 { c3 } else { c2 };
    let others: &[f64] = if c3 != 0.0 { &[c2, c1, c0] } else { &[c1, c0] };
    let upper = 1.0 + others.iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);

    let mut knots = vec![0.0];
    let mut crit: Vec<f64> = if c3 != 0.0 {
        quadratic_positive_roots(3.0 * c3, 2.0 * c2, c1)
    } else if c2 != 0.0 {
        let x = -c1 / (2.0 * c2);
        if x > 0.0 { vec![x] } else { vec![] }
    } else {
        vec![]
    };
    crit.retain(|&x| x < upper);
    knots.extend(crit);
    knots.push(upper);

    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (f(lo), f(hi));
        if flo == 0.0 {
            if roots.last() != Some(&lo) {
                roots.push(lo);
            }
            continue;
        }
        if fhi == 0.0 {
            roots.push(hi);
            continue;
        }
        if flo.signum() == fhi.signum() {
            continue;
        }
        let rising = fhi > 0.0;
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid);
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm > 0.0) == rising {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let root = if f(lo).abs() <= f(hi).abs() { lo } else { hi };
        roots.push(root);
    }
    roots.dedup();
    roots
}

fn quadratic_positive_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return vec![];
        }
        let x = -c / b;
        return if x > 0.0 { vec![x] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    // numerically stable pair
    let q = -0.5 * (b + b.signum() * sq);
    let mut r = Vec::new();
    if q != 0.0 {
        r.push(q / a);
        r.push(c / q);
    } else {
        r.push(0.0);
    }
    r.retain(|&x| x > 0.0 && x.is_finite());
    r.sort_by(f64::total_cmp);
    r.dedup();
    r
}

fn operating_point_for(p: &PhysicalParams, chi: f64, epsilon: f64, n: f64, multistable: bool) -> OperatingPoint {
    let alpha_s = n.sqrt();
    let chi_eff = std::f64::consts::SQRT_2 * chi * alpha_s;
    let shift = chi_eff * chi_eff / (2.0 * p.omega_m);
    let (delta_c, delta_c_eff) = match p.detuning {
        Detuning::Raw(dc) => (dc, dc - shift),
        Detuning::Effective(dt) => (dt + shift, dt),
    };
    let g_n = match p.coupling {
        AtomCoupling::Fixed(g) => g,
        AtomCoupling::MatchOptomechanical => chi_eff,
    };
    OperatingPoint {
        alpha_s,
        chi,
        chi_eff,
        g_n,
        delta_c,
        delta_c_eff,
        epsilon,
        multistable,
        nbar: p.nbar(),
        params: *p,
    }
}

/// All admissible operating points, ordered by increasing `|α_s|`, without
/// any stability screening.
pub fn candidate_operating_points(params: &PhysicalParams) -> Result<Vec<OperatingPoint>> {
    params.validate()?;
    let chi = params.chi();
    let epsilon = params.epsilon();
    let (u, v) = affine_bracket(params, chi)?;
    // n |u + v n|² − ε² = |v|² n³ + 2 Re(u v̄) n² + |u|² n − ε²
    let c3 = v.norm_sqr();
    let c2 = 2.0 * (u * v.conj()).re;
    let c1 = u.norm_sqr();
    let c0 = -epsilon * epsilon;
    let roots = cubic_nonnegative_roots(c3, c2, c1, c0);
    if roots.is_empty() {
        return Err(Error::Model(
            "steady-state equation has no nonnegative real intensity".into(),
        ));
    }
    let multistable = roots.len() > 1;
    Ok(roots
        .into_iter()
        .map(|n| operating_point_for(params, chi, epsilon, n, multistable))
        .collect())
}

/// Solve for the classical steady state.
///
/// Among the admissible intensities the smallest one whose linearized drift
/// matrix is Hurwitz is returned; `multistable` records whether the cubic
/// had more than one admissible root.
pub fn solve_operating_point(params: &PhysicalParams) -> Result<OperatingPoint> {
    let candidates = candidate_operating_points(params)?;
    let mut best_abscissa = f64::NEG_INFINITY;
    for op in &candidates {
        let model = dynamics::build_model(op, NoiseModel::Markovian);
        let st = dynamics::stability(&model);
        if st.stable {
            return Ok(*op);
        }
        best_abscissa = best_abscissa.max(st.abscissa);
    }
    Err(Error::Unstable {
        abscissa: best_abscissa,
    })
}
