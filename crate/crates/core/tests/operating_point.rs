//! The closed-form cubic against a direct bisection on the complex
//! steady-state equation.

use nalgebra::Complex;
use optomech::model::{candidate_operating_points, solve_operating_point, AtomCoupling, Detuning, PhysicalParams};
use optomech::units::hz_to_angular;

fn reference(length: f64, kappa_hz: f64) -> PhysicalParams {
    let omega_m = hz_to_angular(1e7);
    let kappa = hz_to_angular(kappa_hz);
    PhysicalParams {
        mass: 10e-12,
        omega_m,
        gamma_m: hz_to_angular(100.0),
        temperature: 1e-4,
        power: 35e-3,
        wavelength: 1064e-9,
        length,
        kappa,
        gamma_a: kappa,
        delta_a: -omega_m,
        detuning: Detuning::Effective(omega_m),
        coupling: AtomCoupling::MatchOptomechanical,
    }
}

/// `n |bracket(n)|² − ε²` with every dependence on `n` written out.
fn residual(p: &PhysicalParams, n: f64) -> f64 {
    let chi = p.chi();
    let chi_eff2 = 2.0 * chi * chi * n;
    let delta_c = match p.detuning {
        Detuning::Raw(d) => d,
        Detuning::Effective(d) => d + chi_eff2 / (2.0 * p.omega_m),
    };
    let g2 = match p.coupling {
        AtomCoupling::Fixed(g) => g * g,
        AtomCoupling::MatchOptomechanical => chi_eff2,
    };
    let z = Complex::new(p.kappa, delta_c - chi * chi * n / p.omega_m)
        + Complex::new(g2, 0.0) / Complex::new(p.gamma_a, p.delta_a);
    n * z.norm_sqr() - p.epsilon().powi(2)
}

fn bisection_roots(p: &PhysicalParams) -> Vec<f64> {
    let grid: Vec<f64> = (0..4000).map(|i| 10f64.powf(-4.0 + i as f64 * 0.005)).collect();
    let mut roots = Vec::new();
    for w in grid.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (residual(p, lo), residual(p, hi));
        if flo.signum() == fhi.signum() {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual(p, mid).signum() == flo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
}

#[test]
fn closed_form_matches_bisection_over_the_fig1a_sweep() {
    let mut last_chi_eff = 0.0;
    for i in 0..25 {
        let k = 2e5 + i as f64 * 2e5;
        let p = reference(1e-3, k);
        let op = solve_operating_point(&p).unwrap();
        let roots = bisection_roots(&p);
        assert_eq!(roots.len(), 1, "κ/2π = {k}");
        let n = op.alpha_s.powi(2);
        assert!((n - roots[0]).abs() <= 1e-9 * roots[0], "κ/2π = {k}: {n} vs {}", roots[0]);
        assert!(op.residual() <= 1e-9);
        assert!(op.chi_eff > last_chi_eff, "χ_eff must grow with κ");
        last_chi_eff = op.chi_eff;
    }
}

#[test]
fn raw_detuning_bistability_is_flagged() {
    // red-detuned bare optomechanics far above threshold has three branches
    let mut p = reference(1e-3, 2.5e6);
    p.coupling = AtomCoupling::Fixed(0.0);
    p.detuning = Detuning::Raw(3.0 * p.omega_m);
    p.mass = 1e-15;
    p.power = 1e-5;
    let cands = candidate_operating_points(&p).unwrap();
    let roots = bisection_roots(&p);
    assert_eq!(cands.len(), roots.len());
    assert!(cands.len() == 3, "expected three roots, got {}", cands.len());
    for (c, r) in cands.iter().zip(&roots) {
        assert!((c.alpha_s.powi(2) - r).abs() <= 1e-8 * r);
        assert!(c.multistable);
    }
}

#[test]
fn fixed_coupling_and_raw_detuning_residuals() {
    for (g, d) in [(1e6, 0.0), (5e6, 2e7), (2e7, -3e7)] {
        let mut p = reference(2e-3, 1e6);
        p.coupling = AtomCoupling::Fixed(g);
        p.detuning = Detuning::Raw(d);
        for op in candidate_operating_points(&p).unwrap() {
            assert!(op.residual() <= 1e-9, "g={g} Δ={d}: {}", op.residual());
            assert_eq!(op.g_n, g);
        }
    }
}
