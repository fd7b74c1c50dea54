//! Derivative-free local minimization (Nelder-Mead simplex).

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

/// Minimizes `f` starting from `x0` with an axis-aligned initial simplex of
/// edge `step`. Stops when the spread of simplex values drops to `f_tol` or
/// after `max_evals` evaluations.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_evals: usize,
    f_tol: f64,
) -> SimplexResult {
    let dim = x0.len();
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

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut centroid = vec![0.0; dim];
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        if (vals[dim] - vals[0]).abs() <= f_tol {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &pts[..dim] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / dim as f64;
            }
        }
        let worst = pts[dim].clone();

        let xr = point(&centroid, &worst, -1.0);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = point(&centroid, &worst, -2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[dim] = xe;
                vals[dim] = fe;
            } else {
                pts[dim] = xr;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = xr;
            vals[dim] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[dim] {
            let xc = point(&centroid, &xr, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[dim].min(fr) {
            pts[dim] = xc;
            vals[dim] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=dim {
            pts[i] = point(&pts[0].clone(), &pts[i], 0.5);
            vals[i] = eval(&pts[i], &mut evals);
        }
    }

    let best = (0..=dim)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap();
    SimplexResult {
        x: pts[best].clone(),
        value: vals[best],
        evals,
    }
}
