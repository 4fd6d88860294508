//! Exact polytopes: the bodies `Δ_k = (1/k)·Conv(A(kL))`, their essential
//! interiors, Okounkov domains, slices, shifts and Seshadri parameters.

mod hull;

use num::{One, Signed, Zero};

pub use hull::{Facet, RatPolytope, MAX_DIM};

use crate::error::{Error, Result};
use crate::order::OrderSpec;
use crate::rational::{q, Q};
use crate::sections::{eliminate, LeadingSet, ModelSpec};

/// `Δ_k = (1/k)·Conv(A(kL))`.
pub fn delta_k(a: &LeadingSet) -> Result<RatPolytope> {
    if a.is_empty() {
        return Err(Error::EmptyExponentSet);
    }
    let inv_k = Q::one() / q(a.level() as i64);
    let pts: Vec<Vec<Q>> =
        a.exponents().iter().map(|e| e.coords().iter().map(|&c| q(c as i64) * &inv_k).collect()).collect();
    RatPolytope::convex_hull(&pts)
}

fn require_full(p: &RatPolytope) -> Result<()> {
    if p.is_full_dimensional() {
        Ok(())
    } else {
        Err(Error::NotFullDimensional { affine_dim: p.affine_dim(), n: p.dim() })
    }
}

/// Membership in `P^ess`: the interior of `P` relative to the closed
/// nonnegative orthant.
pub fn essential_membership(p: &RatPolytope, x: &[Q]) -> Result<bool> {
    require_full(p)?;
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: x.len() });
    }
    Ok(x.iter().all(|c| !c.is_negative())
        && p.contains(x)
        && p.facets().iter().filter(|f| !f.is_coordinate()).all(|f| f.eval(x).is_negative()))
}

/// `μ(z) = (|z_1|², …, |z_n|²)` for `z` given as (re, im) pairs.
pub fn moment_coordinates(z: &[(Q, Q)]) -> Vec<Q> {
    z.iter().map(|(re, im)| re * re + im * im).collect()
}

/// Membership of `z` in the Okounkov domain `μ^{-1}(P^ess)`.
pub fn domain_membership(p: &RatPolytope, z: &[(Q, Q)]) -> Result<bool> {
    essential_membership(p, &moment_coordinates(z))
}

/// `max{t ≥ 0 : t·Σ ⊆ P}` with `Σ` the standard unit simplex. Under the
/// squared-radius ball convention this is the largest `r` with
/// `{Σ|z_i|² < r}` inside the domain.
pub fn seshadri_param(p: &RatPolytope) -> Result<Q> {
    require_full(p)?;
    if !p.contains(&vec![Q::zero(); p.dim()]) {
        return Ok(Q::zero());
    }
    let t = p
        .facets()
        .iter()
        .filter_map(|f| {
            let g = f.normal.iter().filter(|g| g.is_positive()).max()?;
            Some(&f.offset / g)
        })
        .min()
        .expect("a bounded polytope has a facet with a positive normal entry");
    Ok(t)
}

/// `Σ_a = Conv{0, a_1 e_1, …, a_n e_n}`.
pub fn simplex_body(a: &[Q]) -> Result<RatPolytope> {
    if a.is_empty() || a.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument("simplex weights must be positive".into()));
    }
    let n = a.len();
    let mut pts = vec![vec![Q::zero(); n]];
    for (i, ai) in a.iter().enumerate() {
        let mut v = vec![Q::zero(); n];
        v[i] = ai.clone();
        pts.push(v);
    }
    RatPolytope::convex_hull(&pts)
}

/// `z ∈ E(a)`: `Σ |z_i|²/a_i < 1`.
pub fn ellipsoid_domain(a: &[Q], z: &[(Q, Q)]) -> Result<bool> {
    if a.len() != z.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: z.len() });
    }
    if a.iter().any(|x| !x.is_positive()) {
        return Err(Error::InvalidArgument("ellipsoid weights must be positive".into()));
    }
    let s = moment_coordinates(z).iter().zip(a).fold(Q::zero(), |acc, (m, ai)| acc + m / ai);
    Ok(s < Q::one())
}

fn axis_facet(n: usize, axis: usize, sign: i64, r: &Q) -> Facet {
    let mut normal = vec![Q::zero(); n];
    normal[axis] = q(sign);
    Facet { normal, offset: r * q(sign) }
}

/// `P ∩ {x_axis = r}` with that coordinate dropped; `None` when empty.
pub fn slice(p: &RatPolytope, axis: usize, r: &Q) -> Result<Option<RatPolytope>> {
    if axis >= p.dim() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", p.dim())));
    }
    if p.dim() == 1 {
        return Err(Error::InvalidArgument("cannot slice a one-dimensional body".into()));
    }
    let pts: Vec<Vec<Q>> = p
        .cut_vertices(&[(axis_facet(p.dim(), axis, 1, r), true)])
        .into_iter()
        .map(|mut v| {
            v.remove(axis);
            v
        })
        .collect();
    if pts.is_empty() {
        return Ok(None);
    }
    RatPolytope::convex_hull(&pts).map(Some)
}

/// `(P ∩ {x_axis ≥ r}) − r·e_axis`; `None` when empty.
pub fn shift(p: &RatPolytope, axis: usize, r: &Q) -> Result<Option<RatPolytope>> {
    if axis >= p.dim() {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", p.dim())));
    }
    let pts: Vec<Vec<Q>> = p
        .cut_vertices(&[(axis_facet(p.dim(), axis, -1, r), false)])
        .into_iter()
        .map(|mut v| {
            v[axis] -= r;
            v
        })
        .collect();
    if pts.is_empty() {
        return Ok(None);
    }
    RatPolytope::convex_hull(&pts).map(Some)
}

/// The bodies `Δ_k` along a divisibility chain of levels.
#[derive(Clone, Debug)]
pub struct BodyApprox {
    order: OrderSpec,
    levels: Vec<(u32, LeadingSet, RatPolytope)>,
}

/// One pair `(k, m)` of the inclusion report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub k: u32,
    pub m: u32,
    pub holds: bool,
}

impl BodyApprox {
    pub fn build(model: &ModelSpec, order: &OrderSpec, levels: &[u32]) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidArgument("at least one level is required".into()));
        }
        let mut ks = levels.to_vec();
        ks.sort_unstable();
        ks.dedup();
        let levels = ks
            .into_iter()
            .map(|k| {
                let a = eliminate(order, &model.sections(k)?)?;
                let body = delta_k(&a)?;
                Ok((k, a, body))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(BodyApprox { order: order.clone(), levels })
    }

    pub fn order(&self) -> &OrderSpec {
        &self.order
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, &LeadingSet, &RatPolytope)> {
        self.levels.iter().map(|(k, a, p)| (*k, a, p))
    }

    pub fn body(&self, k: u32) -> Option<&RatPolytope> {
        self.levels.iter().find(|(j, _, _)| *j == k).map(|(_, _, p)| p)
    }

    /// `Δ_k ⊆ Δ_m` for every stored pair with `k | m`.
    pub fn inclusions(&self) -> Vec<Inclusion> {
        let mut out = Vec::new();
        for (i, (k, _, pk)) in self.levels.iter().enumerate() {
            for (m, _, pm) in &self.levels[i + 1..] {
                if m % k == 0 {
                    out.push(Inclusion { k: *k, m: *m, holds: pm.contains_polytope(pk) });
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, qvec};

    fn sigma(a: &[i64]) -> RatPolytope {
        simplex_body(&qvec(a)).unwrap()
    }

    #[test]
    fn essential_examples() {
        let s = sigma(&[1, 1]);
        assert!(essential_membership(&s, &qvec(&[0, 0])).unwrap());
        assert!(!essential_membership(&s, &[qf(1, 2), qf(1, 2)]).unwrap());
        assert!(essential_membership(&s, &[qf(1, 4), qf(1, 4)]).unwrap());
        assert!(!essential_membership(&s, &[qf(-1, 4), qf(1, 4)]).unwrap());
        let seg = RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[1, 1])]).unwrap();
        assert!(matches!(essential_membership(&seg, &qvec(&[0, 0])), Err(Error::NotFullDimensional { .. })));
    }

    #[test]
    fn domain_examples() {
        let s = sigma(&[1, 1]);
        assert!(domain_membership(&s, &[(q(0), q(0)), (q(0), q(0))]).unwrap());
        assert!(!domain_membership(&s, &[(qf(3, 5), q(0)), (q(0), qf(4, 5))]).unwrap());
        let s114 = sigma(&[1, 1, 4]);
        assert!(essential_membership(&s114, &qvec(&[0, 0, 2])).unwrap());
    }

    #[test]
    fn seshadri_examples() {
        assert_eq!(seshadri_param(&sigma(&[3, 3])).unwrap(), q(3));
        assert_eq!(seshadri_param(&sigma(&[1, 1, 4])).unwrap(), q(1));
        let square = RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])]).unwrap();
        assert_eq!(seshadri_param(&square).unwrap(), q(1));
        let away = RatPolytope::convex_hull(&[qvec(&[1, 1]), qvec(&[2, 1]), qvec(&[1, 2])]).unwrap();
        assert_eq!(seshadri_param(&away).unwrap(), q(0));
    }

    #[test]
    fn seshadri_matches_vertex_containment() {
        // oracle: t·Σ ⊆ P iff the vertices t·e_i lie in P
        let p = RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[3, 0]), qvec(&[2, 2]), qvec(&[0, 5])]).unwrap();
        let t = seshadri_param(&p).unwrap();
        let fits = |t: &Q| (0..2).all(|i| {
            let mut v = vec![Q::zero(); 2];
            v[i] = t.clone();
            p.contains(&v)
        });
        assert!(fits(&t));
        assert!(!fits(&(&t + qf(1, 1000))));
    }

    #[test]
    fn simplex_and_ellipsoid() {
        assert!(simplex_body(&[q(1), q(0)]).is_err());
        let s = sigma(&[1, 1, 4]);
        assert_eq!(crate::rational::factorial(3) * s.volume(), q(4));
        let half = (qf(1, 2), q(0));
        assert!(ellipsoid_domain(&qvec(&[1, 1, 4]), &[half.clone(), half, (q(1), q(0))]).unwrap());
        assert!(!ellipsoid_domain(&qvec(&[1, 1, 4]), &[(q(1), q(0)), (q(0), q(0)), (q(0), q(0))]).unwrap());
    }

    #[test]
    fn slice_and_shift_examples() {
        let s = sigma(&[1, 1]);
        let sl = slice(&s, 0, &q(0)).unwrap().unwrap();
        assert_eq!(sl.vertices(), &[qvec(&[0]), qvec(&[1])][..]);
        assert!(slice(&s, 0, &q(2)).unwrap().is_none());
        let sh = shift(&s, 0, &qf(1, 2)).unwrap().unwrap();
        assert_eq!(sh, simplex_body(&[qf(1, 2), qf(1, 2)]).unwrap());
        assert!(shift(&s, 1, &q(3)).unwrap().is_none());
        let top = slice(&s, 1, &q(1)).unwrap().unwrap();
        assert_eq!(top.affine_dim(), 0);
    }

    #[test]
    fn slice_sweep_integrates_volume() {
        let p = RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[4, 0]), qvec(&[3, 2]), qvec(&[0, 3])]).unwrap();
        let steps = 400;
        let width = 4.0 / steps as f64;
        let riemann: f64 = (0..steps)
            .map(|i| {
                let r = qf(2 * i + 1, 2 * steps) * q(4);
                slice(&p, 0, &r).unwrap().map_or(0.0, |s| crate::rational::to_f64(&s.volume())) * width
            })
            .sum();
        assert!((riemann - crate::rational::to_f64(&p.volume())).abs() < 1e-3);
    }

    #[test]
    fn seshadri_of_scaled_simplex_is_exact() {
        for (a, b) in [(1, 3), (7, 2), (5, 5), (13, 7)] {
            let t = qf(a, b);
            assert_eq!(seshadri_param(&simplex_body(&[t.clone(), t.clone(), t.clone()]).unwrap()).unwrap(), t);
        }
    }

    #[test]
    fn body_chain_for_projective_plane() {
        let m = ModelSpec::projective_space(2, 1).unwrap();
        let chain = BodyApprox::build(&m, &OrderSpec::Lex, &[1, 2, 4]).unwrap();
        assert!(chain.inclusions().iter().all(|i| i.holds));
        assert_eq!(chain.inclusions().len(), 3);
        assert_eq!(chain.body(2).unwrap(), &sigma(&[1, 1]));
    }

    #[test]
    fn delta_k_examples() {
        let c = ModelSpec::curve(4).unwrap();
        let a = eliminate(&OrderSpec::Lex, &c.sections(1).unwrap()).unwrap();
        assert_eq!(delta_k(&a).unwrap().vertices(), &[qvec(&[0]), qvec(&[4])][..]);
        let toric = RatPolytope::convex_hull(&[qvec(&[1, 0]), qvec(&[3, 0]), qvec(&[1, 1]), qvec(&[2, 1])]).unwrap();
        let tm = ModelSpec::toric(toric).unwrap();
        for k in 1..=3 {
            let a = eliminate(&OrderSpec::DegLex, &tm.sections(k).unwrap()).unwrap();
            assert_eq!(&delta_k(&a).unwrap(), tm.toric_polytope().unwrap());
        }
    }

    #[test]
    fn toric_essential_points_appear_at_finite_level() {
        let tri = RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 3])]).unwrap();
        let m = ModelSpec::toric(tri.clone()).unwrap();
        let bodies: Vec<RatPolytope> = (1..=6)
            .map(|k| delta_k(&eliminate(&OrderSpec::Lex, &m.sections(k).unwrap()).unwrap()).unwrap())
            .collect();
        for a in 0..12 {
            for b in 0..12 {
                let x = vec![qf(a, 6), qf(b, 6)];
                if essential_membership(&tri, &x).unwrap() {
                    assert!(bodies.iter().any(|p| p.contains(&x)));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn domain_is_rotation_invariant(a in 0i64..4, b in 0i64..4, c in 0i64..4, d in 0i64..4, k in 0usize..4) {
            // Pythagorean rotations (3/5, 4/5) and (5/13, 12/13) are exact
            let rot = [(qf(3, 5), qf(4, 5)), (qf(5, 13), qf(12, 13)), (qf(8, 17), qf(15, 17)), (q(0), q(1))][k].clone();
            let p = sigma(&[1, 2]);
            let z = vec![(qf(a, 5), qf(b, 5)), (qf(c, 5), qf(d, 5))];
            let (re, im) = z[1].clone();
            let rotated = vec![z[0].clone(), (&re * &rot.0 - &im * &rot.1, &re * &rot.1 + &im * &rot.0)];
            proptest::prop_assert_eq!(domain_membership(&p, &z).unwrap(), domain_membership(&p, &rotated).unwrap());
        }
    }
}
