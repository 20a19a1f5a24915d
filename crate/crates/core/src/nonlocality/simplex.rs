//! Nelder–Mead with dimension-adaptive coefficients (Gao and Han, 2012).

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `f` from `x0`, initial simplex edges `step[i]` along each axis.
/// Stops when the spread of simplex values drops to `tol` or after
/// `max_evals` evaluations.
pub(crate) fn minimize<F>(mut f: F, x0: &[f64], step: &[f64], tol: f64, max_evals: usize) -> Outcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += if step[i] != 0.0 { step[i] } else { 1e-3 };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut converged = false;
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    loop {
        // order best..worst, stable on ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]).then(i.cmp(&j)));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if (vals[n] - vals[0]).abs() <= tol {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &pts[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / nf;
            }
        }
        let worst = pts[n].clone();
        let along = |t: f64, out: &mut Vec<f64>| {
            for k in 0..n {
                out[k] = centroid[k] + t * (worst[k] - centroid[k]);
            }
        };

        along(-alpha, &mut trial);
        let fr = eval(&trial, &mut evals);
        if fr < vals[0] {
            along(-alpha * beta, &mut trial2);
            let fe = eval(&trial2, &mut evals);
            if fe < fr {
                pts[n].clone_from(&trial2);
                vals[n] = fe;
            } else {
                pts[n].clone_from(&trial);
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n].clone_from(&trial);
            vals[n] = fr;
            continue;
        }
        let (t, bound) = if fr < vals[n] {
            (-alpha * gamma, fr)
        } else {
            (gamma, vals[n])
        };
        along(t, &mut trial2);
        let fc = eval(&trial2, &mut evals);
        if fc <= bound {
            pts[n].clone_from(&trial2);
            vals[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = pts[0].clone();
        for i in 1..=n {
            for k in 0..n {
                pts[i][k] = best[k] + delta * (pts[i][k] - best[k]);
            }
            vals[i] = eval(&pts[i], &mut evals);
        }
    }
    Outcome {
        x: pts.swap_remove(0),
        f: vals[0],
        evaluations: evals,
        converged,
    }
}
