//! Nelder–Mead simplex search inside a box.

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexOptions {
    /// Relative spread of objective values at which to stop.
    pub f_tol: f64,
    /// Simplex diameter (in the search coordinates) at which to stop.
    pub x_tol: f64,
    pub max_evaluations: usize,
    /// Initial step per coordinate.
    pub step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { f_tol: 1e-12, x_tol: 1e-10, max_evaluations: 20_000, step: 0.25 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn clamp(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, (lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(*lo, *hi);
    }
}

/// Minimises `f` over the box `bounds` starting from `x0`. Trial points
/// are projected onto the box; non-finite values count as `+∞`.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    bounds: &[(f64, f64)],
    opts: &SimplexOptions,
) -> SimplexResult {
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut start = x0.to_vec();
    clamp(&mut start, bounds);
    pts.push(start.clone());
    for i in 0..n {
        let mut p = start.clone();
        let (lo, hi) = bounds[i];
        p[i] = if p[i] + opts.step <= hi { p[i] + opts.step } else { (p[i] - opts.step).max(lo) };
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let mut converged = false;
    while evals.get() < opts.max_evaluations {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let spread = (vals[n] - vals[0]).abs();
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if diameter <= opts.x_tol || (spread <= opts.f_tol * vals[0].abs() && diameter <= 1e-6) {
            converged = vals[0].is_finite();
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| {
            let mut x: Vec<f64> = centroid.iter().zip(&pts[n]).map(|(c, w)| c + t * (c - w)).collect();
            clamp(&mut x, bounds);
            x
        };
        let xr = along(1.0);
        let fr = eval(&xr);
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = eval(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
            continue;
        }
        if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[n] {
            let x = along(0.5);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(-0.5);
            let v = eval(&x);
            (x, v)
        };
        if fc < vals[n].min(fr) {
            pts[n] = xc;
            vals[n] = fc;
            continue;
        }
        // shrink towards the best point
        for i in 1..=n {
            let x: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(p, b)| b + 0.5 * (p - b)).collect();
            vals[i] = eval(&x);
            pts[i] = x;
        }
    }
    let best = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    SimplexResult { x: pts[best].clone(), value: vals[best], evaluations: evals.get(), converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(&f, &[-1.2, 1.0], &[(-5.0, 5.0), (-5.0, 5.0)], &SimplexOptions::default());
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn respects_the_box() {
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] + 1.0).powi(2);
        let r = nelder_mead(&f, &[0.0, 0.0], &[(-1.0, 1.0), (-0.5, 2.0)], &SimplexOptions::default());
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] + 0.5).abs() < 1e-8, "{:?}", r.x);
    }

    #[test]
    fn scale_invariant_in_the_objective() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] - 0.7).powi(4) + 0.1 * x[0] * x[1];
        let g = |x: &[f64]| 2.0 * f(x);
        let b = [(-2.0, 2.0), (-2.0, 2.0)];
        let a = nelder_mead(&f, &[1.0, -1.0], &b, &SimplexOptions::default());
        let c = nelder_mead(&g, &[1.0, -1.0], &b, &SimplexOptions::default());
        assert_eq!(a.x, c.x);
    }
}
