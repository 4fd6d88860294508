use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moment::quadrature::{integrate, Estimate, QuadratureOptions};
use crate::moment::MomentModel;
use crate::rational::{factorial, to_f64};

/// The image under `μ_A` of the boundary of the box `[lo, hi]` (`n = 2`),
/// traversed counter-clockwise in x with `per_side` samples per edge.
pub fn image_boundary(model: &MomentModel, lo: &[f64], hi: &[f64], per_side: usize) -> Result<Vec<[f64; 2]>> {
    if model.dim() != 2 || lo.len() != 2 || hi.len() != 2 {
        return Err(Error::UnsupportedDimension(model.dim()));
    }
    let corners = [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]];
    let mut out = Vec::with_capacity(4 * per_side);
    for s in 0..4 {
        let (a, b) = (corners[s], corners[(s + 1) % 4]);
        for j in 0..per_side {
            let t = j as f64 / per_side as f64;
            let m = model.moment_map(&[a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            out.push([m[0], m[1]]);
        }
    }
    Ok(out)
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    0.5 * (0..n).map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1]).sum::<f64>().abs()
}

/// Lebesgue volume of `μ_A([lo, hi])` for `n ≤ 2`, from the image of the
/// boundary.
pub fn image_area(model: &MomentModel, lo: &[f64], hi: &[f64], per_side: usize) -> Result<f64> {
    match model.dim() {
        1 => Ok(model.moment_map(&[hi[0]])[0] - model.moment_map(&[lo[0]])[0]),
        2 => Ok(shoelace(&image_boundary(model, lo, hi, per_side)?)),
        n => Err(Error::UnsupportedDimension(n)),
    }
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 { 0.0 } else { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (qx * qx + qy * qy).sqrt()
}

fn winding(p: [f64; 2], poly: &[[f64; 2]]) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && cross > 0.0 {
                w += 1;
            }
        } else if b[1] <= p[1] && cross < 0.0 {
            w -= 1;
        }
    }
    w
}

/// One-sided Hausdorff distance `sup_{y ∈ Conv(A)} dist(y, μ_A([−R, R]^n))`
/// for `n ≤ 2`; the other side is zero since the image lies in the hull.
/// Targets are the hull's boundary at `per_edge` points per edge plus a
/// `per_edge`-grid of its bounding box.
pub fn hausdorff_to_hull(model: &MomentModel, radius: f64, per_side: usize, per_edge: usize) -> Result<f64> {
    let hull = model.hull()?;
    match model.dim() {
        1 => {
            let lo = to_f64(&hull.vertices()[0][0]);
            let hi = to_f64(&hull.vertices()[hull.vertices().len() - 1][0]);
            let a = model.moment_map(&[-radius])[0];
            let b = model.moment_map(&[radius])[0];
            Ok((a - lo).max(hi - b).max(0.0))
        }
        2 => {
            if !hull.is_full_dimensional() {
                return Err(Error::NotFullDimensional { affine_dim: hull.affine_dim(), n: 2 });
            }
            let poly = image_boundary(model, &[-radius, -radius], &[radius, radius], per_side)?;
            let verts: Vec<[f64; 2]> = order_polygon(hull.vertices().iter().map(|v| [to_f64(&v[0]), to_f64(&v[1])]).collect());
            let mut targets = Vec::new();
            for i in 0..verts.len() {
                let (a, b) = (verts[i], verts[(i + 1) % verts.len()]);
                for j in 0..per_edge {
                    let t = j as f64 / per_edge as f64;
                    targets.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
                }
            }
            let (xmax, ymax) = verts.iter().fold((0.0f64, 0.0f64), |m, v| (m.0.max(v[0]), m.1.max(v[1])));
            for i in 0..=per_edge {
                for j in 0..=per_edge {
                    let y = [xmax * i as f64 / per_edge as f64, ymax * j as f64 / per_edge as f64];
                    if hull.facets().iter().all(|f| to_f64(&f.normal[0]) * y[0] + to_f64(&f.normal[1]) * y[1] <= to_f64(&f.offset)) {
                        targets.push(y);
                    }
                }
            }
            let worst = targets
                .par_iter()
                .map(|&y| {
                    if winding(y, &poly) != 0 {
                        0.0
                    } else {
                        (0..poly.len()).map(|i| segment_distance(y, poly[i], poly[(i + 1) % poly.len()])).fold(f64::INFINITY, f64::min)
                    }
                })
                .reduce(|| 0.0, f64::max);
            Ok(worst)
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// Orders the vertices of a convex polygon counter-clockwise.
fn order_polygon(mut v: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let c = v.iter().fold([0.0, 0.0], |s, p| [s[0] + p[0], s[1] + p[1]]);
    let c = [c[0] / v.len() as f64, c[1] / v.len() as f64];
    v.sort_by(|a, b| (a[1] - c[1]).atan2(a[0] - c[0]).total_cmp(&(b[1] - c[1]).atan2(b[0] - c[0])));
    v
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// `∫ ω_st^n` over the polydisk `{|z_i| < r_i}` by uniform sampling of the
/// bounding cube in `ℝ^{2n}`, with `ω_st = (1/π) Σ dx_i ∧ dy_i`.
pub fn polydisk_monte_carlo(radii: &[f64], samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("polydisk radii must be positive".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let n = radii.len();
    let chunk = 1 << 14;
    let chunks = samples.div_ceil(chunk);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = chunk.min(samples - c * chunk);
            (0..count)
                .filter(|_| {
                    radii.iter().all(|_| {
                        let x: f64 = rng.gen_range(-1.0..1.0);
                        let y: f64 = rng.gen_range(-1.0..1.0);
                        x * x + y * y < 1.0
                    })
                })
                .count()
        })
        .sum();
    let cube: f64 = radii.iter().map(|r| 4.0 * r * r).product();
    let density = to_f64(&factorial(n)) / std::f64::consts::PI.powi(n as i32);
    let p = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        value: density * cube * p,
        std_error: density * cube * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// `∫_{E(a)} ω_st^n` for `E(a) = {Σ|z_i|²/a_i < 1}` by quadrature of
/// `n!·det Hess(Σe^{x_i})` over the x-region, parametrised by
/// `e^{x_i} = a_i t_i Π_{j<i}(1 − t_j)` on the unit cube.
pub fn ellipsoid_volume(a: &[f64], opts: &QuadratureOptions) -> Result<Estimate> {
    if a.is_empty() || a.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidArgument("ellipsoid weights must be positive".into()));
    }
    let n = a.len();
    let integrand = |t: &[f64]| {
        let mut rest = 1.0;
        let mut x = Vec::with_capacity(n);
        let mut jac = 1.0;
        for (ti, ai) in t.iter().zip(a) {
            x.push((ai * ti * rest).ln());
            rest *= 1.0 - ti;
            jac /= ti;
        }
        // det Hess of Σe^{x_i} is e^{Σx_i}
        x.iter().sum::<f64>().exp() * jac
    };
    let e = integrate(integrand, &vec![0.0; n], &vec![1.0; n], opts)?;
    let f = to_f64(&factorial(n));
    Ok(Estimate { value: e.value * f, error: e.error * f, regions: e.regions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::Exponent;

    fn model(v: &[&[u32]]) -> MomentModel {
        MomentModel::new(&v.iter().map(|e| Exponent::new(e.to_vec())).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn polygon_helpers() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert_eq!(shoelace(&sq), 1.0);
        assert_eq!(winding([0.5, 0.5], &sq), 1);
        assert_eq!(winding([1.5, 0.5], &sq), 0);
        assert!((segment_distance([2.0, 0.5], [1.0, 0.0], [1.0, 1.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jacobian_identity_on_boxes() {
        let m = model(&[&[0, 0], &[2, 0], &[0, 1], &[1, 2]]);
        let opts = QuadratureOptions { rel_tol: 1e-4, ..Default::default() };
        for (lo, hi) in [([-1.0, -1.0], [1.0, 0.5]), ([-3.0, 0.0], [2.0, 4.0])] {
            let quad = m.symplectic_volume(&lo, &hi, &opts).unwrap().value;
            let area = image_area(&m, &lo, &hi, 4000).unwrap();
            assert!((quad - area).abs() <= 1e-2 * area, "{quad} vs {area}");
        }
    }

    #[test]
    fn image_fills_the_hull() {
        let m = model(&[&[0, 0], &[4, 0], &[0, 2], &[1, 3]]);
        assert!(hausdorff_to_hull(&m, 40.0, 20_000, 60).unwrap() <= 1e-2);
        assert!(hausdorff_to_hull(&m, 1.0, 2_000, 30).unwrap() > 0.1);
        assert!(hausdorff_to_hull(&model(&[&[0], &[3]]), 40.0, 10, 10).unwrap() < 1e-12);
    }

    #[test]
    fn polydisk_normalisation() {
        for radii in [vec![0.7], vec![1.0, 0.5]] {
            let mc = polydisk_monte_carlo(&radii, 1 << 20, 0).unwrap();
            let n = radii.len();
            let image_vol: f64 = radii.iter().map(|r| r * r).product();
            let expected = to_f64(&factorial(n)) * image_vol;
            assert!((mc.value - expected).abs() < 1e-2 * expected, "{mc:?} vs {expected}");
        }
        let a = polydisk_monte_carlo(&[1.0, 1.0], 50_000, 3).unwrap();
        assert_eq!(a, polydisk_monte_carlo(&[1.0, 1.0], 50_000, 3).unwrap());
    }

    #[test]
    fn ellipsoid_volume_is_weight_product() {
        for a in [vec![1.0, 2.0], vec![1.0, 1.0, 4.0]] {
            let v = ellipsoid_volume(&a, &QuadratureOptions::default()).unwrap().value;
            let want: f64 = a.iter().product();
            assert!((v - want).abs() < 1e-2 * want);
        }
    }
}
