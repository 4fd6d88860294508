use num::{One, Zero};

use crate::bodies::RatPolytope;
use crate::error::{Error, Result};
use crate::order::Exponent;
use crate::rational::{factorial, q, Q};
use crate::sections::{PolySection, SectionSpace};

/// A polynomial change of chart coordinates `w = F(z)` together with its
/// polynomial inverse `z = G(w)`. Both compositions are checked to be the
/// identity on construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoordinateChange {
    forward: Vec<PolySection>,
    inverse: Vec<PolySection>,
}

impl CoordinateChange {
    pub fn new(forward: Vec<PolySection>, inverse: Vec<PolySection>) -> Result<Self> {
        let n = forward.len();
        if inverse.len() != n || n == 0 {
            return Err(Error::NotInvertible(format!("{} forward vs {} inverse components", n, inverse.len())));
        }
        if let Some(bad) = forward.iter().chain(&inverse).find(|p| p.nvars() != n) {
            return Err(Error::DimensionMismatch { expected: n, got: bad.nvars() });
        }
        for (label, outer, inner) in [("F∘G", &forward, &inverse), ("G∘F", &inverse, &forward)] {
            for (i, comp) in outer.iter().enumerate() {
                if comp.compose(inner)? != PolySection::var(n, i) {
                    return Err(Error::NotInvertible(format!("component {} of {label} is not the identity", i + 1)));
                }
            }
        }
        Ok(CoordinateChange { forward, inverse })
    }

    pub fn identity(n: usize) -> Self {
        let id: Vec<PolySection> = (0..n).map(|i| PolySection::var(n, i)).collect();
        CoordinateChange { forward: id.clone(), inverse: id }
    }

    /// `(z₁, z₂) ↦ (z₂ − z₁², z₁)`: the first flag curve becomes the smooth
    /// conic `{z₂ = z₁²}` through the origin.
    pub fn conic() -> Self {
        let z1 = PolySection::var(2, 0);
        let z2 = PolySection::var(2, 1);
        let forward = vec![z2.sub(&z1.mul(&z1)), z1];
        let w1 = PolySection::var(2, 0);
        let w2 = PolySection::var(2, 1);
        let inverse = vec![w2.clone(), w1.add(&w2.mul(&w2))];
        CoordinateChange::new(forward, inverse).expect("conic change is invertible")
    }

    pub fn nvars(&self) -> usize {
        self.forward.len()
    }

    pub fn forward(&self) -> &[PolySection] {
        &self.forward
    }

    pub fn inverse(&self) -> &[PolySection] {
        &self.inverse
    }

    /// Rewrites a section `s(z)` in the new coordinates as `s(G(w))`.
    pub fn pull_back(&self, s: &PolySection) -> Result<PolySection> {
        s.compose(&self.inverse)
    }
}

#[derive(Clone, Debug)]
pub enum ModelFamily {
    /// `O(d)` on `P^n`, in the affine chart at a torus-fixed point.
    ProjectiveSpace { n: usize, d: u32 },
    /// A lattice polytope; the flag sits at its lexicographically smallest
    /// vertex.
    Toric(RatPolytope),
    /// A degree `d` bundle on a curve.
    Curve { d: u32 },
    /// Explicit section spaces, one per level.
    Custom(Vec<SectionSpace>),
}

/// A built-in or user-supplied model with an optional flag-adapting
/// coordinate change.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    family: ModelFamily,
    flag: Option<CoordinateChange>,
    toric_origin: Option<RatPolytope>,
}

impl ModelSpec {
    pub fn new(family: ModelFamily) -> Result<Self> {
        let toric_origin = match &family {
            ModelFamily::ProjectiveSpace { n, d } => {
                if *n == 0 || *d == 0 {
                    return Err(Error::InvalidModel("projective space needs n ≥ 1 and d ≥ 1".into()));
                }
                None
            }
            ModelFamily::Curve { d } => {
                if *d == 0 {
                    return Err(Error::InvalidModel("curve degree must be positive".into()));
                }
                None
            }
            ModelFamily::Toric(p) => Some(translate_to_flag_vertex(p)?),
            ModelFamily::Custom(spaces) => {
                let Some(first) = spaces.first() else {
                    return Err(Error::InvalidModel("custom model without section spaces".into()));
                };
                if spaces.iter().any(|s| s.nvars() != first.nvars()) {
                    return Err(Error::InvalidModel("custom section spaces disagree on dimension".into()));
                }
                None
            }
        };
        Ok(ModelSpec { family, flag: None, toric_origin })
    }

    pub fn projective_space(n: usize, d: u32) -> Result<Self> {
        Self::new(ModelFamily::ProjectiveSpace { n, d })
    }

    pub fn curve(d: u32) -> Result<Self> {
        Self::new(ModelFamily::Curve { d })
    }

    pub fn toric(p: RatPolytope) -> Result<Self> {
        Self::new(ModelFamily::Toric(p))
    }

    pub fn with_flag(mut self, change: CoordinateChange) -> Result<Self> {
        if change.nvars() != self.nvars() {
            return Err(Error::DimensionMismatch { expected: self.nvars(), got: change.nvars() });
        }
        self.flag = Some(change);
        Ok(self)
    }

    pub fn family(&self) -> &ModelFamily {
        &self.family
    }

    pub fn flag(&self) -> Option<&CoordinateChange> {
        self.flag.as_ref()
    }

    pub fn nvars(&self) -> usize {
        match &self.family {
            ModelFamily::ProjectiveSpace { n, .. } => *n,
            ModelFamily::Curve { .. } => 1,
            ModelFamily::Toric(p) => p.dim(),
            ModelFamily::Custom(s) => s[0].nvars(),
        }
    }

    /// The toric polytope after translating the flag vertex to the origin.
    pub fn toric_polytope(&self) -> Option<&RatPolytope> {
        self.toric_origin.as_ref()
    }

    /// `(L^n)`, when the model knows it.
    pub fn self_intersection(&self) -> Option<Q> {
        match &self.family {
            ModelFamily::ProjectiveSpace { n, d } => Some(q(*d as i64).pow(*n as i32)),
            ModelFamily::Curve { d } => Some(q(*d as i64)),
            ModelFamily::Toric(p) => Some(factorial(p.dim()) * p.volume()),
            ModelFamily::Custom(_) => None,
        }
    }

    /// A basis of `H^0(X, kL)` in flag-adapted coordinates.
    pub fn sections(&self, k: u32) -> Result<SectionSpace> {
        if k == 0 {
            return Err(Error::InvalidArgument("level k must be positive".into()));
        }
        let space = match &self.family {
            ModelFamily::ProjectiveSpace { n, d } => {
                SectionSpace::from_monomials(k, *n, exponents_up_to_degree(*n, k * d))?
            }
            ModelFamily::Curve { d } => {
                SectionSpace::from_monomials(k, 1, (0..=k * d).map(|j| Exponent::new(vec![j])))?
            }
            ModelFamily::Toric(_) => {
                let p = self.toric_origin.as_ref().expect("toric origin computed on construction");
                SectionSpace::from_monomials(k, p.dim(), lattice_points_dilated(p, k))?
            }
            ModelFamily::Custom(spaces) => spaces
                .iter()
                .find(|s| s.level() == k)
                .cloned()
                .ok_or_else(|| Error::InvalidModel(format!("custom model has no sections at level {k}")))?,
        };
        match &self.flag {
            Some(change) => space.change_coordinates(change),
            None => Ok(space),
        }
    }
}

/// All exponents of total degree `≤ deg` in `n` variables, lex-sorted.
pub(crate) fn exponents_up_to_degree(n: usize, deg: u32) -> Vec<Exponent> {
    fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Exponent>) {
        if cur.len() == n {
            out.push(Exponent::new(cur.clone()));
            return;
        }
        for a in 0..=left {
            cur.push(a);
            rec(n, left - a, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, deg, &mut Vec::with_capacity(n), &mut out);
    out
}

fn translate_to_flag_vertex(p: &RatPolytope) -> Result<RatPolytope> {
    if p.vertices().iter().flatten().any(|x| !x.is_integer()) {
        return Err(Error::InvalidModel("toric polytope must be a lattice polytope".into()));
    }
    if p.affine_dim() != p.dim() {
        return Err(Error::InvalidModel("toric polytope must be full-dimensional".into()));
    }
    let origin = p.vertices()[0].clone();
    let shifted: Vec<Vec<Q>> =
        p.vertices().iter().map(|v| v.iter().zip(&origin).map(|(a, b)| a - b).collect()).collect();
    if shifted.iter().flatten().any(|x| *x < Q::zero()) {
        return Err(Error::InvalidModel(
            "the cone at the lexicographically smallest vertex is not the nonnegative orthant".into(),
        ));
    }
    RatPolytope::convex_hull(&shifted)
}

/// Lattice points of `k·P` for a lattice polytope `P` in the orthant.
pub(crate) fn lattice_points_dilated(p: &RatPolytope, k: u32) -> Vec<Exponent> {
    let n = p.dim();
    let kq = q(k as i64);
    let hi: Vec<u32> = (0..n)
        .map(|i| {
            let m = p.vertices().iter().map(|v| v[i].clone()).max().unwrap_or_else(Q::zero);
            (m * &kq).floor().to_integer().try_into().unwrap_or(0)
        })
        .collect();
    let inv_k = Q::one() / kq;
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    loop {
        let pt: Vec<Q> = cur.iter().map(|&c| q(c as i64) * &inv_k).collect();
        if p.contains(&pt) {
            out.push(Exponent::new(cur.clone()));
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}
