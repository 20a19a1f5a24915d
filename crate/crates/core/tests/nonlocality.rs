//! MK maximization against closed forms and brute-force lower bounds.

use optomech::gaussian::{GaussianState, Mode};
use optomech::nonlocality::{mk_maximize, mk_minimize, mk_value, MKSettings, MkConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn product_thermal(n: [f64; 3]) -> GaussianState {
    GaussianState::thermal(Mode::Mirror, n[0])
        .product(&GaussianState::thermal(Mode::Cavity, n[1]))
        .unwrap()
        .product(&GaussianState::thermal(Mode::Atoms, n[2]))
        .unwrap()
}

// Displaced parity of a thermal mode peaks at the origin with 1/(2n̄+1),
// so the MK maximum of a product state is twice the product of the peaks.
fn product_maximum(n: [f64; 3]) -> f64 {
    2.0 * n.iter().map(|x| 1.0 / (2.0 * x + 1.0)).product::<f64>()
}

#[test]
fn product_thermal_maximum_is_closed_form() {
    for n in [[0.0, 0.0, 0.0], [0.1, 0.3, 0.05], [1.0, 0.2, 2.0]] {
        let s = product_thermal(n);
        let best = mk_maximize(&s, &MkConfig { starts: 16, ..MkConfig::default() }).unwrap();
        let want = product_maximum(n);
        assert!((best.value - want).abs() < 1e-6, "{n:?}: {} vs {want}", best.value);
        assert!((mk_value(&s, &best.settings).unwrap() - best.value).abs() < 1e-12);
    }
}

#[test]
fn grid_points_never_beat_the_optimizer() {
    let s = product_thermal([0.2, 0.1, 0.4]);
    let best = mk_maximize(&s, &MkConfig { starts: 16, ..MkConfig::default() }).unwrap();
    // 5 points per coordinate over ±3 standard deviations
    let axis: Vec<f64> = (0..5).map(|i| -3.0 + 1.5 * i as f64).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut grid_best = f64::NEG_INFINITY;
    for _ in 0..20_000 {
        let mut st = MKSettings::ZERO;
        for k in 0..6 {
            let sd = s.sigma[(k, k)].sqrt();
            st.unprimed[k] = sd * axis[rng.random_range(0..5)];
            st.primed[k] = sd * axis[rng.random_range(0..5)];
        }
        grid_best = grid_best.max(mk_value(&s, &st).unwrap());
    }
    assert!(grid_best <= best.value + 1e-9, "{grid_best} > {}", best.value);
}

#[test]
fn vacuum_bounds_and_symmetry() {
    let s = GaussianState::vacuum(&Mode::ALL);
    assert!((mk_value(&s, &MKSettings::ZERO).unwrap() - 2.0).abs() < 1e-12);
    let lo = mk_minimize(&s, &MkConfig { starts: 16, ..MkConfig::default() }).unwrap();
    assert!(lo.value >= -2.0 - 1e-9 && lo.value < 0.0);
}

#[test]
fn same_seed_same_answer() {
    let s = product_thermal([0.2, 0.1, 0.4]);
    let cfg = MkConfig { starts: 8, seed: 3, ..MkConfig::default() };
    assert_eq!(mk_maximize(&s, &cfg).unwrap(), mk_maximize(&s, &cfg).unwrap());
}
