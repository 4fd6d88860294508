use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::moment::MomentModel;
use crate::rational::to_f64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegMaxSpec {
    delta: f64,
}

impl RegMaxSpec {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("smoothing width must be positive, got {delta}")));
        }
        Ok(RegMaxSpec { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `m_δ`: even, convex, `C²`, equal to `|t|` for `|t| ≥ δ`.
    fn m(&self, t: f64) -> (f64, f64, f64) {
        let d = self.delta;
        if t.abs() >= d {
            return (t.abs(), t.signum(), 0.0);
        }
        let u = t / d;
        let u2 = u * u;
        (d * (0.375 + 0.75 * u2 - 0.125 * u2 * u2), 1.5 * u - 0.5 * u * u2, (1.5 - 1.5 * u2) / d)
    }
}

/// `max_δ(x, y) = (x + y + m_δ(x − y)) / 2`; exactly `max(x, y)` once the
/// arguments are `δ` apart.
pub fn reg_max(spec: &RegMaxSpec, x: f64, y: f64) -> f64 {
    let s = x - y;
    if s >= spec.delta {
        x
    } else if s <= -spec.delta {
        y
    } else {
        0.5 * (x + y + spec.m(s).0)
    }
}

/// `(∂_x, ∂_y, ∂²_xx)`; the second-derivative matrix is
/// `∂²_xx · [[1, −1], [−1, 1]]`.
pub fn reg_max_derivatives(spec: &RegMaxSpec, x: f64, y: f64) -> (f64, f64, f64) {
    let (_, m1, m2) = spec.m(x - y);
    (0.5 * (1.0 + m1), 0.5 * (1.0 - m1), 0.5 * m2)
}

/// `φ′ = max_δ(φ_cap + C + δ, u_A)` where `φ_cap` is the Legendre-capped
/// Euclidean potential whose gradient ranges over the box
/// `Π[e^{lo_i}, e^{hi_i}]`.
#[derive(Clone, Debug)]
pub struct PotentialField {
    base: MomentModel,
    lo: Vec<f64>,
    hi: Vec<f64>,
    shift: f64,
    spec: RegMaxSpec,
}

/// Grid evidence for a [`PotentialField`].
#[derive(Clone, Debug)]
pub struct FieldReport {
    pub grid_points: usize,
    pub max_deviation_on_u: f64,
    pub window: f64,
    pub max_g: f64,
    pub min_eigenvalue: f64,
}

impl FieldReport {
    pub fn passes(&self) -> bool {
        self.max_deviation_on_u <= 1e-12 && self.min_eigenvalue >= -1e-9 && self.max_g.is_finite()
    }
}

/// Builds the capped field over the box `U = Π[lo_i, hi_i]` in
/// x-coordinates. The gradient box must sit inside `Conv(A)^ess` with every
/// non-coordinate facet pulled in by `margin`.
pub fn capped_potential(base: &MomentModel, lo: &[f64], hi: &[f64], margin: f64, delta: f64) -> Result<PotentialField> {
    let n = base.dim();
    for v in [lo, hi] {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
    }
    if lo.iter().zip(hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
        return Err(Error::InvalidArgument("cap box must have finite lo ≤ hi".into()));
    }
    if !(margin >= 0.0) {
        return Err(Error::InvalidArgument("margin must be nonnegative".into()));
    }
    let spec = RegMaxSpec::new(delta)?;
    let hull = base.hull()?;
    if !hull.is_full_dimensional() {
        return Err(Error::NotFullDimensional { affine_dim: hull.affine_dim(), n });
    }
    for corner in 0..1usize << n {
        let p: Vec<f64> = (0..n).map(|i| if corner >> i & 1 == 1 { hi[i].exp() } else { lo[i].exp() }).collect();
        for f in hull.facets().iter().filter(|f| !f.is_coordinate()) {
            let g: Vec<f64> = f.normal.iter().map(to_f64).collect();
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            let lhs: f64 = g.iter().zip(&p).map(|(a, b)| a * b).sum();
            let bound = to_f64(&f.offset) - margin * norm;
            if lhs >= bound - 1e-12 * (1.0 + bound.abs()) {
                return Err(Error::Precondition(format!(
                    "gradient point {:?} is not inside the body shrunk by {margin}",
                    p
                )));
            }
        }
    }
    let max_alpha_hi = base
        .exponents()
        .iter()
        .map(|a| a.to_f64().iter().zip(hi).map(|(a, h)| a * h).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let shift = (base.exponents().len() as f64).ln() + max_alpha_hi - lo.iter().map(|l| l.exp()).sum::<f64>();
    Ok(PotentialField { base: base.clone(), lo: lo.to_vec(), hi: hi.to_vec(), shift, spec })
}

impl PotentialField {
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn delta(&self) -> f64 {
        self.spec.delta()
    }

    pub fn base(&self) -> &MomentModel {
        &self.base
    }

    /// `Σ_i h_i(x_i)` with `h_i = exp` on `[lo_i, hi_i]`, continued by its
    /// tangent lines.
    pub fn capped_euclidean(&self, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
        let mut v = 0.0;
        let mut g = Vec::with_capacity(x.len());
        let mut h = Vec::with_capacity(x.len());
        for ((&t, &a), &b) in x.iter().zip(&self.lo).zip(&self.hi) {
            if t < a {
                let e = a.exp();
                v += e * (1.0 + t - a);
                g.push(e);
                h.push(0.0);
            } else if t > b {
                let e = b.exp();
                v += e * (1.0 + t - b);
                g.push(e);
                h.push(0.0);
            } else {
                let e = t.exp();
                v += e;
                g.push(e);
                h.push(e);
            }
        }
        (v, g, h)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let cap = self.capped_euclidean(x).0 + self.shift + self.spec.delta();
        reg_max(&self.spec, cap, self.base.potential(x))
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let (cv, cg, ch) = self.capped_euclidean(x);
        let cap = cv + self.shift + self.spec.delta();
        let ua = self.base.potential(x);
        let (a, b, c) = reg_max_derivatives(&self.spec, cap, ua);
        let d = DVector::from_vec(cg) - DVector::from_vec(self.base.moment_map(x));
        DMatrix::from_diagonal(&DVector::from_vec(ch)) * a + self.base.hessian(x) * b + c * &d * d.transpose()
    }

    /// `g = φ′ − u_A`.
    pub fn correction(&self, x: &[f64]) -> f64 {
        self.value(x) - self.base.potential(x)
    }

    /// Checks (i) `φ′ = Σe^{x_i} + C + δ` on a grid over `U`, (ii) `g = 0`
    /// outside a window found by doubling, (iii) a PSD Hessian on a grid
    /// over the window.
    pub fn verify(&self, per_axis: usize) -> FieldReport {
        let n = self.lo.len();
        let per_axis = per_axis.max(2);
        let mut deviation = 0.0f64;
        let mut count = 0;
        for x in grid_points(&self.lo, &self.hi, per_axis) {
            let euclid: f64 = x.iter().map(|t| t.exp()).sum();
            let want = euclid + self.shift + self.spec.delta();
            deviation = deviation.max((self.value(&x) - want).abs() / want.abs().max(1.0));
            count += 1;
        }
        let coarse = 9;
        let mut r = self.lo.iter().chain(&self.hi).fold(1.0f64, |m, v| m.max(v.abs()));
        while r < 1e6 {
            let outer = 2.0 * r;
            let clean = grid_points(&vec![-outer; n], &vec![outer; n], 4 * coarse)
                .filter(|x| x.iter().any(|t| t.abs() > r))
                .all(|x| self.correction(&x) == 0.0);
            if clean {
                break;
            }
            r *= 2.0;
        }
        let window_lo = vec![-r; n];
        let window_hi = vec![r; n];
        let mut max_g = 0.0f64;
        let mut min_eig = f64::INFINITY;
        for x in grid_points(&window_lo, &window_hi, per_axis) {
            max_g = max_g.max(self.correction(&x).abs());
            let eig = SymmetricEigen::new(self.hessian(&x)).eigenvalues;
            min_eig = min_eig.min(eig.iter().copied().fold(f64::INFINITY, f64::min));
            count += 1;
        }
        FieldReport { grid_points: count, max_deviation_on_u: deviation, window: r, max_g, min_eigenvalue: min_eig }
    }
}

/// Tensor grid with `per_axis` points per axis, endpoints included.
pub fn grid_points<'a>(lo: &'a [f64], hi: &'a [f64], per_axis: usize) -> impl Iterator<Item = Vec<f64>> + 'a {
    let n = lo.len();
    let total = per_axis.pow(n as u32);
    (0..total).map(move |mut k| {
        (0..n)
            .map(|i| {
                let j = k % per_axis;
                k /= per_axis;
                if per_axis == 1 {
                    0.5 * (lo[i] + hi[i])
                } else {
                    lo[i] + (hi[i] - lo[i]) * j as f64 / (per_axis - 1) as f64
                }
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Exponent;
    use proptest::prelude::*;

    fn a04() -> MomentModel {
        MomentModel::new(&[Exponent::new(vec![0]), Exponent::new(vec![4])]).unwrap()
    }

    #[test]
    fn reg_max_examples() {
        let s = RegMaxSpec::new(1.0).unwrap();
        assert_eq!(reg_max(&s, 0.0, 5.0), 5.0);
        let v = reg_max(&s, 3.0, 3.0);
        assert!(v > 3.0 && v <= 3.5);
        assert!((v - (3.0 + 3.0 / 16.0)).abs() < 1e-15);
        assert!(RegMaxSpec::new(0.0).is_err());
    }

    #[test]
    fn reg_max_is_c2_at_the_seams() {
        let s = RegMaxSpec::new(0.5).unwrap();
        for t in [0.5, -0.5] {
            let (v_in, d_in, dd_in) = s.m(t * (1.0 - 1e-9));
            let (v_out, d_out, dd_out) = s.m(t);
            assert!((v_in - v_out).abs() < 1e-8 && (d_in - d_out).abs() < 1e-8 && (dd_in - dd_out).abs() < 1e-7);
        }
    }

    proptest! {
        #[test]
        fn reg_max_properties(x in -10.0f64..10.0, y in -10.0f64..10.0, d in 0.01f64..3.0, lam in 0.0f64..1.0,
                              x2 in -10.0f64..10.0, y2 in -10.0f64..10.0) {
            let s = RegMaxSpec::new(d).unwrap();
            prop_assert_eq!(reg_max(&s, x, y), reg_max(&s, y, x));
            prop_assert!(reg_max(&s, x, y) >= x.max(y) - 1e-12);
            if (x - y).abs() >= d {
                prop_assert_eq!(reg_max(&s, x, y), x.max(y));
            }
            let mix = reg_max(&s, lam * x + (1.0 - lam) * x2, lam * y + (1.0 - lam) * y2);
            prop_assert!(mix <= lam * reg_max(&s, x, y) + (1.0 - lam) * reg_max(&s, x2, y2) + 1e-12);
        }
    }

    #[test]
    fn capped_field_on_interval_body() {
        let f = capped_potential(&a04(), &[0.0], &[2f64.ln()], 0.5, 0.1).unwrap();
        let report = f.verify(1000);
        assert!(report.passes(), "{report:?}");
        assert!(report.max_g.is_finite() && report.max_g > 0.0);
        // g vanishes far out
        assert_eq!(f.correction(&[report.window * 1.5]), 0.0);
        assert_eq!(f.correction(&[-report.window * 1.5]), 0.0);
    }

    #[test]
    fn capped_field_hessian_matches_finite_differences() {
        let tri = MomentModel::new(&[Exponent::new(vec![0, 0]), Exponent::new(vec![3, 0]), Exponent::new(vec![0, 3])]).unwrap();
        let f = capped_potential(&tri, &[-1.0, -1.0], &[-0.2, -0.3], 0.1, 0.2).unwrap();
        assert!(f.verify(25).passes());
        let h = 1e-4;
        for x in [[0.3, 0.9], [1.1, 1.2], [2.0, -0.5]] {
            let hess = f.hessian(&x);
            for i in 0..2 {
                for j in 0..2 {
                    let e = |di: f64, dj: f64| {
                        let mut y = x;
                        y[i] += di;
                        y[j] += dj;
                        f.value(&y)
                    };
                    let fd = (e(h, h) - e(h, -h) - e(-h, h) + e(-h, -h)) / (4.0 * h * h);
                    assert!((fd - hess[(i, j)]).abs() < 1e-3, "{x:?} {i}{j}: {fd} vs {}", hess[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn cap_box_touching_the_body_is_rejected() {
        let err = capped_potential(&a04(), &[0.0], &[4f64.ln()], 0.0, 0.1).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("4")));
        assert!(capped_potential(&a04(), &[0.0], &[3.9f64.ln()], 0.5, 0.1).is_err());
    }
}
