//! Globally adaptive Gauss–Kronrod (7/15) quadrature for vector-valued
//! integrands.
//!
//! All components share one set of subintervals; the interval with the
//! largest error estimate (max over components) is bisected until the summed
//! estimate drops below the absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub value: Vec<f64>,
    /// Summed error estimate, max-norm over components.
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_intervals: 20_000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by position so the refinement order is reproducible
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize) -> (Vec<f64>, f64)
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kronrod = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut buf = vec![0.0; dim];
    let mut buf2 = vec![0.0; dim];

    f(center, &mut buf);
    for k in 0..dim {
        kronrod[k] = WGK[7] * buf[k];
        gauss[k] = WG[3] * buf[k];
    }
    for j in 0..7 {
        let dx = half * XGK[j];
        f(center - dx, &mut buf);
        f(center + dx, &mut buf2);
        for k in 0..dim {
            let s = buf[k] + buf2[k];
            kronrod[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut err = 0.0f64;
    for k in 0..dim {
        kronrod[k] *= half;
        gauss[k] *= half;
        err = err.max((kronrod[k] - gauss[k]).abs());
    }
    (kronrod, err)
}

/// Integrate `f` over `[a, b]`, seeding the partition with `breakpoints`
/// (points outside the interval are ignored). `f(x, out)` writes `dim`
/// components into `out`.
pub fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    dim: usize,
    opts: QuadratureOptions,
) -> QuadratureResult
where
    F: FnMut(f64, &mut [f64]),
{
    let mut knots: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in knots.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1], dim);
        evaluations += 15;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut total: f64 = heap.iter().map(|s| s.error).sum();
    let mut converged = total <= opts.abs_tol;
    while !converged && heap.len() < opts.max_intervals {
        let worst = heap.pop().expect("nonempty partition");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot split further at double precision
            heap.push(worst);
            break;
        }
        total -= worst.error;
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&mut f, lo, hi, dim);
            evaluations += 15;
            total += error;
            heap.push(Segment {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
        if total <= opts.abs_tol {
            // guard against drift in the running sum
            total = heap.iter().map(|s| s.error).sum();
            converged = total <= opts.abs_tol;
        }
    }

    // sum in a fixed (positional) order
    let mut segments = heap.into_vec();
    segments.sort_by(|s, t| s.a.total_cmp(&t.a));
    let mut value = vec![0.0; dim];
    let mut error = 0.0;
    for s in &segments {
        for k in 0..dim {
            value[k] += s.value[k];
        }
        error += s.error;
    }
    QuadratureResult {
        value,
        error,
        intervals: segments.len(),
        evaluations,
        converged,
    }
}
