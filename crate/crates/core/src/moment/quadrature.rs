//! Adaptive tensor-product Gauss–Legendre cubature on boxes, with
//! unbounded axes compactified onto `(-1, 1)`.

use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_regions: usize,
    /// Pieces per axis of the uniform starting mesh.
    pub initial_splits: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { rel_tol: 1e-2, abs_tol: 1e-8, max_regions: 20_000, initial_splits: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub regions: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    for i in 0..order {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

#[derive(Clone, Copy, Debug)]
enum AxisMap {
    Finite,
    Both,
    Upper(f64),
    Lower(f64),
}

impl AxisMap {
    /// `(x, dx/dt)` for a compactified coordinate `t`.
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            AxisMap::Finite => (t, 1.0),
            AxisMap::Both => {
                let s = 1.0 - t * t;
                (t / s, (1.0 + t * t) / (s * s))
            }
            AxisMap::Upper(a) => (a + (1.0 + t) / (1.0 - t), 2.0 / ((1.0 - t) * (1.0 - t))),
            AxisMap::Lower(b) => (b - (1.0 - t) / (1.0 + t), 2.0 / ((1.0 + t) * (1.0 + t))),
        }
    }
}

#[derive(Clone, Debug)]
struct Cell {
    lo: Vec<f64>,
    hi: Vec<f64>,
    value: f64,
    error: f64,
}

struct Rule {
    coarse: (Vec<f64>, Vec<f64>),
    fine: (Vec<f64>, Vec<f64>),
}

fn tensor<F: Fn(&[f64]) -> f64>(f: &F, lo: &[f64], hi: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let n = lo.len();
    let m = rule.0.len();
    let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let vol: f64 = half.iter().product();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for d in 0..n {
            x[d] = mid[d] + half[d] * rule.0[idx[d]];
            w *= rule.1[idx[d]];
        }
        total += w * f(&x);
        let mut d = 0;
        loop {
            if d == n {
                return total * vol;
            }
            idx[d] += 1;
            if idx[d] < m {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Integrates `f` over the box `[lo, hi]`; bounds may be infinite.
/// Regions are refined worst-first in parallel batches; summation order
/// is fixed, so results are reproducible across thread counts.
pub fn integrate<F>(f: F, lo: &[f64], hi: &[f64], opts: &QuadratureOptions) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let n = lo.len();
    if hi.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: hi.len() });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("cannot integrate over a zero-dimensional box".into()));
    }
    if lo.iter().zip(hi).any(|(a, b)| a.is_nan() || b.is_nan() || a >= b) {
        return Err(Error::InvalidArgument("integration box has empty or invalid axis".into()));
    }
    let maps: Vec<AxisMap> = lo
        .iter()
        .zip(hi)
        .map(|(&a, &b)| match (a.is_finite(), b.is_finite()) {
            (true, true) => AxisMap::Finite,
            (false, false) => AxisMap::Both,
            (true, false) => AxisMap::Upper(a),
            (false, true) => AxisMap::Lower(b),
        })
        .collect();
    let t_lo: Vec<f64> = lo.iter().zip(&maps).map(|(&a, m)| if let AxisMap::Finite = m { a } else { -1.0 }).collect();
    let t_hi: Vec<f64> = hi.iter().zip(&maps).map(|(&b, m)| if let AxisMap::Finite = m { b } else { 1.0 }).collect();

    let g = |t: &[f64]| -> f64 {
        let mut x = vec![0.0; n];
        let mut jac = 1.0;
        for d in 0..n {
            let (xd, j) = maps[d].apply(t[d]);
            x[d] = xd;
            jac *= j;
        }
        let v = f(&x) * jac;
        if v.is_finite() { v } else { 0.0 }
    };
    let rule = Rule { coarse: gauss_legendre(5), fine: gauss_legendre(8) };
    let eval = |lo: Vec<f64>, hi: Vec<f64>| -> Cell {
        let fine = tensor(&g, &lo, &hi, &rule.fine);
        let coarse = tensor(&g, &lo, &hi, &rule.coarse);
        Cell { lo, hi, value: fine, error: (fine - coarse).abs() }
    };

    let pieces = opts.initial_splits.max(1);
    let mut starts = vec![(t_lo, t_hi)];
    for d in 0..n {
        starts = starts
            .into_iter()
            .flat_map(|(lo, hi)| {
                let step = (hi[d] - lo[d]) / pieces as f64;
                (0..pieces).map(move |j| {
                    let (mut a, mut b) = (lo.clone(), hi.clone());
                    a[d] = lo[d] + step * j as f64;
                    if j + 1 < pieces {
                        b[d] = lo[d] + step * (j + 1) as f64;
                    }
                    (a, b)
                })
            })
            .collect();
    }
    let mut cells: Vec<Cell> = starts.into_par_iter().map(|(lo, hi)| eval(lo, hi)).collect();
    loop {
        let values: Vec<f64> = cells.iter().map(|c| c.value).collect();
        let errors: Vec<f64> = cells.iter().map(|c| c.error).collect();
        let value = pairwise_sum(&values);
        let error = pairwise_sum(&errors);
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Estimate { value, error, regions: cells.len() });
        }
        if cells.len() >= opts.max_regions {
            return Err(Error::Numeric(format!(
                "quadrature did not converge: value {value:.6e}, error estimate {error:.3e} after {} regions",
                cells.len()
            )));
        }
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[b].error.total_cmp(&cells[a].error).then(a.cmp(&b)));
        let batch = (cells.len() / 4).clamp(1, 64).min(opts.max_regions - cells.len());
        let mut chosen: Vec<usize> = order[..batch].to_vec();
        chosen.sort_unstable();
        let splits: Vec<(Vec<f64>, Vec<f64>)> = chosen
            .iter()
            .flat_map(|&i| {
                let c = &cells[i];
                let axis = (0..n).max_by(|&a, &b| (c.hi[a] - c.lo[a]).total_cmp(&(c.hi[b] - c.lo[b]))).unwrap_or(0);
                let m = 0.5 * (c.lo[axis] + c.hi[axis]);
                let mut left_hi = c.hi.clone();
                left_hi[axis] = m;
                let mut right_lo = c.lo.clone();
                right_lo[axis] = m;
                [(c.lo.clone(), left_hi), (right_lo, c.hi.clone())]
            })
            .collect();
        let fresh: Vec<Cell> = splits.into_par_iter().map(|(lo, hi)| eval(lo, hi)).collect();
        let mut next: Vec<Cell> = cells
            .into_iter()
            .enumerate()
            .filter(|(i, _)| chosen.binary_search(i).is_err())
            .map(|(_, c)| c)
            .collect();
        next.extend(fresh);
        cells = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // x^14 is within degree 2·8−1
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn finite_and_infinite_boxes() {
        let tight = QuadratureOptions { rel_tol: 1e-10, ..Default::default() };
        let e = integrate(|x| x[0].exp() * x[1].cos(), &[0.0, 0.0], &[1.0, 1.0], &tight).unwrap();
        assert!((e.value - (std::f64::consts::E - 1.0) * 1f64.sin()).abs() < 1e-9);
        let gauss = integrate(|x| (-x[0] * x[0]).exp(), &[f64::NEG_INFINITY], &[f64::INFINITY], &tight).unwrap();
        assert!((gauss.value - std::f64::consts::PI.sqrt()).abs() < 1e-8);
        let half = integrate(|x| (-x[0]).exp(), &[2.0], &[f64::INFINITY], &tight).unwrap();
        assert!((half.value - (-2f64).exp()).abs() < 1e-10);
        let left = integrate(|x| x[0].exp(), &[f64::NEG_INFINITY], &[0.0], &tight).unwrap();
        assert!((left.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_inverted_box_and_reports_divergence() {
        assert!(integrate(|_| 1.0, &[1.0], &[0.0], &QuadratureOptions::default()).is_err());
        let opts = QuadratureOptions { rel_tol: 1e-14, abs_tol: 0.0, max_regions: 8, initial_splits: 1 };
        assert!(matches!(integrate(|x| x[0].abs().sqrt(), &[-1.0], &[1.0], &opts), Err(Error::Numeric(_))));
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let f = |x: &[f64]| 1.0 / (1e-3 + x[0] * x[0] + x[1] * x[1]);
        let opts = QuadratureOptions { rel_tol: 1e-6, ..Default::default() };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| integrate(f, &[-1.0, -1.0], &[1.0, 1.0], &opts).unwrap());
        let b = integrate(f, &[-1.0, -1.0], &[1.0, 1.0], &opts).unwrap();
        assert_eq!(a, b);
    }
}
