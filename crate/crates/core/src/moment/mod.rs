//! Torus-invariant potentials in logarithmic coordinates `x_i = ln|z_i|²`.
//!
//! For a finite exponent set `A`, `u_A(x) = ln Σ_α e^{x·α}` is the potential
//! of `φ_A = ln Σ |z^α|²`. Its gradient is the moment map onto `Conv(A)°`
//! and its Hessian is the covariance of the Gibbs distribution on `A`.

mod cap;
mod image;
pub mod quadrature;

use nalgebra::{DMatrix, DVector};

pub use cap::{capped_potential, grid_points, reg_max, reg_max_derivatives, FieldReport, PotentialField, RegMaxSpec};
pub use image::{
    ellipsoid_volume, hausdorff_to_hull, image_area, image_boundary, polydisk_monte_carlo, MonteCarloEstimate,
};
pub use quadrature::{integrate, Estimate, QuadratureOptions};

use crate::bodies::RatPolytope;
use crate::error::{Error, Result};
use crate::order::Exponent;
use crate::rational::{factorial, q, to_f64};

/// `u_A` and its derivatives for a nonempty exponent set `A`.
#[derive(Clone, Debug)]
pub struct MomentModel {
    n: usize,
    exponents: Vec<Exponent>,
    points: Vec<Vec<f64>>,
}

impl MomentModel {
    pub fn new(exponents: &[Exponent]) -> Result<Self> {
        let first = exponents.first().ok_or(Error::EmptyExponentSet)?;
        let n = first.dim();
        if let Some(bad) = exponents.iter().find(|e| e.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.dim() });
        }
        let mut exponents = exponents.to_vec();
        exponents.sort();
        exponents.dedup();
        let points = exponents.iter().map(Exponent::to_f64).collect();
        Ok(MomentModel { n, exponents, points })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exponents
    }

    /// The exact hull `Conv(A)`.
    pub fn hull(&self) -> Result<RatPolytope> {
        let pts: Vec<_> = self.exponents.iter().map(|e| e.coords().iter().map(|&c| q(c as i64)).collect()).collect();
        RatPolytope::convex_hull(&pts)
    }

    fn check(&self, x: &[f64]) {
        assert_eq!(x.len(), self.n, "point dimension must match the exponent dimension");
    }

    /// Normalised Gibbs weights `e^{x·α − max}` / Σ and the log-partition.
    fn gibbs(&self, x: &[f64]) -> (Vec<f64>, f64) {
        self.check(x);
        let logits: Vec<f64> = self.points.iter().map(|a| a.iter().zip(x).map(|(a, x)| a * x).sum()).collect();
        let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logits.iter().map(|l| (l - m).exp()).collect();
        let s: f64 = w.iter().sum();
        (w.into_iter().map(|v| v / s).collect(), m + s.ln())
    }

    /// `u_A(x)`, stable for large `|x|`.
    pub fn potential(&self, x: &[f64]) -> f64 {
        self.gibbs(x).1
    }

    /// `∇u_A(x)`.
    pub fn moment_map(&self, x: &[f64]) -> Vec<f64> {
        let (w, _) = self.gibbs(x);
        let mut out = vec![0.0; self.n];
        for (p, wi) in self.points.iter().zip(&w) {
            for (o, a) in out.iter_mut().zip(p) {
                *o += wi * a;
            }
        }
        out
    }

    /// `Hess u_A(x)`: the covariance of `α` under the Gibbs weights.
    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let (w, _) = self.gibbs(x);
        let mean = DVector::from_vec(self.moment_map(x));
        let mut h = DMatrix::zeros(self.n, self.n);
        for (p, wi) in self.points.iter().zip(&w) {
            let d = DVector::from_column_slice(p) - &mean;
            h += *wi * &d * d.transpose();
        }
        h
    }

    /// `∫_region det Hess u_A`, the Lebesgue volume of the moment image of
    /// the region. Bounds may be infinite.
    pub fn symplectic_volume(&self, lo: &[f64], hi: &[f64], opts: &QuadratureOptions) -> Result<Estimate> {
        let hull = self.hull()?;
        if !hull.is_full_dimensional() {
            return Err(Error::NotFullDimensional { affine_dim: hull.affine_dim(), n: hull.dim() });
        }
        integrate(|x| self.hessian(x).determinant(), lo, hi, opts)
    }

    /// The same region's volume for `ω_A^n`: `n!` times the moment-image
    /// volume.
    pub fn kahler_volume(&self, lo: &[f64], hi: &[f64], opts: &QuadratureOptions) -> Result<Estimate> {
        let e = self.symplectic_volume(lo, hi, opts)?;
        let f = to_f64(&factorial(self.n));
        Ok(Estimate { value: e.value * f, error: e.error * f, regions: e.regions })
    }
}

/// A whole-space integration box.
pub fn whole_space(n: usize) -> (Vec<f64>, Vec<f64>) {
    (vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn model(v: &[&[u32]]) -> MomentModel {
        MomentModel::new(&v.iter().map(|e| Exponent::new(e.to_vec())).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn potential_examples() {
        assert_eq!(model(&[&[0]]).potential(&[3.7]), 0.0);
        assert!((model(&[&[0], &[1]]).potential(&[0.0]) - 2f64.ln()).abs() < 1e-15);
        let big = model(&[&[0, 0], &[1, 0], &[0, 3]]);
        for x in [[1e4, -1e4], [-1e4, -1e4], [1e4, 1e4]] {
            assert!(big.potential(&x).is_finite());
        }
        assert!((big.potential(&[1e4, 1e4]) - 3e4).abs() < 1e-9);
    }

    #[test]
    fn moment_map_examples() {
        assert!((model(&[&[0], &[1]]).moment_map(&[0.0])[0] - 0.5).abs() < 1e-15);
        let tri = model(&[&[0, 0], &[1, 0], &[0, 1]]);
        let m = tri.moment_map(&[0.0, 0.0]);
        assert!((m[0] - 1.0 / 3.0).abs() < 1e-15 && (m[1] - 1.0 / 3.0).abs() < 1e-15);
        for d in 1..=5u32 {
            let x = 50.0 / d as f64;
            let got = model(&[&[0], &[d]]).moment_map(&[x])[0];
            let closed = d as f64 * (d as f64 * x).exp() / (1.0 + (d as f64 * x).exp());
            assert!((got - closed).abs() < 1e-9 && (got - d as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn hessian_examples_and_finite_differences() {
        assert!((model(&[&[0], &[1]]).hessian(&[0.0])[(0, 0)] - 0.25).abs() < 1e-15);
        assert_eq!(model(&[&[0]]).hessian(&[2.0])[(0, 0)], 0.0);
        let m = model(&[&[0, 0, 0], &[2, 0, 0], &[0, 1, 0], &[1, 1, 3], &[0, 0, 1]]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-4;
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let hess = m.hessian(&x);
            for j in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let (gp, gm) = (m.moment_map(&xp), m.moment_map(&xm));
                for i in 0..3 {
                    assert!((hess[(i, j)] - (gp[i] - gm[i]) / (2.0 * h)).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn moment_image_stays_inside_the_hull() {
        let m = model(&[&[0, 0], &[3, 0], &[1, 2], &[0, 1]]);
        let hull = m.hull().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-8.0..8.0)).collect();
            let mu = m.moment_map(&x);
            for f in hull.facets() {
                let lhs: f64 = f.normal.iter().zip(&mu).map(|(g, y)| to_f64(g) * y).sum();
                assert!(lhs < to_f64(&f.offset));
            }
        }
    }

    #[test]
    fn symplectic_volume_examples() {
        let opts = QuadratureOptions::default();
        for d in 1..=4u32 {
            let (lo, hi) = whole_space(1);
            let v = model(&[&[0], &[d]]).symplectic_volume(&lo, &hi, &opts).unwrap();
            assert!((v.value - d as f64).abs() < 1e-2 * d as f64, "d={d}: {}", v.value);
        }
        let (lo, hi) = whole_space(2);
        let tri = model(&[&[0, 0], &[1, 0], &[0, 1]]).symplectic_volume(&lo, &hi, &opts).unwrap();
        assert!((tri.value - 0.5).abs() < 5e-3);
        let half = model(&[&[0], &[1]]).symplectic_volume(&[f64::NEG_INFINITY], &[0.0], &opts).unwrap();
        assert!((half.value - 0.5).abs() < 5e-3);
        assert!(model(&[&[0, 0], &[1, 1]]).symplectic_volume(&lo, &hi, &opts).is_err());
    }

    #[test]
    fn single_box_agreement_is_not_trusted() {
        // orders 5 and 8 agree on the whole compactified square but are 2% off
        let m = model(&[&[0, 0], &[2, 0], &[0, 1], &[1, 2]]);
        let (lo, hi) = whole_space(2);
        let one = QuadratureOptions { initial_splits: 1, ..Default::default() };
        let naive = m.symplectic_volume(&lo, &hi, &one).unwrap();
        assert_eq!(naive.regions, 1);
        assert!((naive.value - 2.5).abs() > 1e-2 * 2.5);
        let v = m.symplectic_volume(&lo, &hi, &QuadratureOptions::default()).unwrap();
        assert!((v.value - 2.5).abs() < 1e-2 * 2.5 && (v.value - 2.5).abs() <= v.error, "{v:?}");
    }
}
