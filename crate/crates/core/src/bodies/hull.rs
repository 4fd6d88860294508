use std::collections::HashMap;

use itertools::Itertools;
use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{det, dot, factorial, nullspace, primitive, q, rank, rref, solve, sub, Q};

pub const MAX_DIM: usize = 4;

/// A half-space `normal·x ≤ offset` (or a hyperplane, for equalities) with
/// a primitive integer normal.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct Facet {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl Facet {
    fn new(normal: Vec<Q>, through: &[Q]) -> Self {
        let normal = primitive(&normal);
        let offset = dot(&normal, through);
        Facet { normal, offset }
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.normal, x) - &self.offset
    }

    /// True for the facets `{x_i ≥ 0}` cut out by a coordinate hyperplane.
    pub fn is_coordinate(&self) -> bool {
        self.offset.is_zero()
            && self.normal.iter().filter(|c| !c.is_zero()).count() == 1
            && self.normal.iter().all(|c| !c.is_positive())
    }
}

/// A bounded rational polytope with both descriptions: irredundant
/// vertices, and `{x : eq·x = c, facet·x ≤ c}`. Lower-dimensional
/// polytopes carry their affine hull as equalities and have volume zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatPolytope {
    n: usize,
    vertices: Vec<Vec<Q>>,
    facets: Vec<Facet>,
    equalities: Vec<Facet>,
    affine_dim: usize,
    volume: Q,
}

impl RatPolytope {
    /// Exact convex hull of points in the closed nonnegative orthant.
    pub fn convex_hull(points: &[Vec<Q>]) -> Result<Self> {
        if points.iter().flatten().any(Signed::is_negative) {
            return Err(Error::NotInOrthant);
        }
        hull_of(points)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.affine_dim == self.n
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Facet] {
        &self.equalities
    }

    /// Exact Lebesgue volume in `ℝ^n`.
    pub fn volume(&self) -> Q {
        self.volume.clone()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        x.len() == self.n
            && self.equalities.iter().all(|e| e.eval(x).is_zero())
            && self.facets.iter().all(|f| !f.eval(x).is_positive())
    }

    pub fn contains_polytope(&self, other: &RatPolytope) -> bool {
        other.vertices.iter().all(|v| self.contains(v))
    }

    pub fn scale(&self, s: &Q) -> Result<RatPolytope> {
        let pts: Vec<Vec<Q>> = self.vertices.iter().map(|v| v.iter().map(|x| x * s).collect()).collect();
        RatPolytope::convex_hull(&pts)
    }

    /// Vertices of `self ∩ {extra}` where each extra constraint is
    /// `(facet, is_equality)`; used for slices and shifts.
    pub(crate) fn cut_vertices(&self, extra: &[(Facet, bool)]) -> Vec<Vec<Q>> {
        let mut cons: Vec<(Facet, bool)> = self.facets.iter().map(|f| (f.clone(), false)).collect();
        cons.extend(self.equalities.iter().map(|f| (f.clone(), true)));
        cons.extend_from_slice(extra);
        let feasible = |x: &[Q]| {
            cons.iter().all(|(c, eq)| {
                let v = c.eval(x);
                if *eq { v.is_zero() } else { !v.is_positive() }
            })
        };
        let mut out: Vec<Vec<Q>> = Vec::new();
        for subset in (0..cons.len()).combinations(self.n) {
            let a: Vec<Vec<Q>> = subset.iter().map(|&i| cons[i].0.normal.clone()).collect();
            let b: Vec<Q> = subset.iter().map(|&i| cons[i].0.offset.clone()).collect();
            if let Some(x) = solve(&a, &b) {
                if feasible(&x) {
                    out.push(x);
                }
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// Hull without the orthant precondition.
pub(crate) fn hull_of(points: &[Vec<Q>]) -> Result<RatPolytope> {
    let Some(first) = points.first() else {
        return Err(Error::EmptyPointSet);
    };
    let n = first.len();
    if n == 0 {
        return Err(Error::InvalidArgument("points must have at least one coordinate".into()));
    }
    if n > MAX_DIM {
        return Err(Error::UnsupportedDimension(n));
    }
    if let Some(bad) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: bad.len() });
    }
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();

    let p0 = pts[0].clone();
    let diffs: Vec<Vec<Q>> = pts[1..].iter().map(|p| sub(p, &p0)).collect();
    let mut red = diffs.clone();
    let pivots = rref(&mut red);
    let d = pivots.len();
    let equalities: Vec<Facet> = {
        let mut e: Vec<Facet> = nullspace(&diffs, n).into_iter().map(|v| Facet::new(v, &p0)).collect();
        e.sort();
        e
    };
    let project = |p: &[Q]| -> Vec<Q> { pivots.iter().map(|&c| p[c].clone()).collect() };
    let lift = |f: Facet| -> Facet {
        let mut normal = vec![Q::zero(); n];
        for (&c, g) in pivots.iter().zip(f.normal) {
            normal[c] = g;
        }
        Facet { normal, offset: f.offset }
    };
    let proj: Vec<Vec<Q>> = pts.iter().map(|p| project(p)).collect();

    let (vertex_idx, rel_facets, volume) = match d {
        0 => (vec![0], Vec::new(), Q::zero()),
        1 => {
            let (lo, hi) = proj.iter().enumerate().minmax_by_key(|(_, p)| p[0].clone()).into_option().expect("nonempty");
            let facets = vec![
                Facet { normal: vec![q(-1)], offset: -lo.1[0].clone() },
                Facet { normal: vec![q(1)], offset: hi.1[0].clone() },
            ];
            let vol = if n == 1 { &hi.1[0] - &lo.1[0] } else { Q::zero() };
            (vec![lo.0, hi.0], facets, vol)
        }
        _ => {
            let tri = beneath_beyond(&proj, d);
            let vol = if d == n { tri.volume() } else { Q::zero() };
            let facets = tri.merged_facets(&proj);
            let idx = (0..proj.len())
                .filter(|&i| {
                    let active: Vec<Vec<Q>> =
                        facets.iter().filter(|f| f.eval(&proj[i]).is_zero()).map(|f| f.normal.clone()).collect();
                    active.len() >= d && rank(&active) == d
                })
                .collect();
            (idx, facets, vol)
        }
    };

    let mut vertices: Vec<Vec<Q>> = vertex_idx.into_iter().map(|i| pts[i].clone()).collect();
    vertices.sort();
    vertices.dedup();
    let mut facets: Vec<Facet> = rel_facets.into_iter().map(lift).collect();
    facets.sort();
    facets.dedup();
    Ok(RatPolytope { n, vertices, facets, equalities, affine_dim: d, volume })
}

struct Triangulation {
    /// Boundary simplices as sorted point indices with an outward facet.
    simplices: Vec<(Vec<usize>, Facet)>,
    centre: Vec<Q>,
    points: Vec<Vec<Q>>,
}

impl Triangulation {
    fn volume(&self) -> Q {
        let d = self.centre.len();
        let total = self.simplices.iter().fold(Q::zero(), |acc, (idx, _)| {
            let m: Vec<Vec<Q>> = idx.iter().map(|&i| sub(&self.points[i], &self.centre)).collect();
            acc + det(&m).abs()
        });
        total / factorial(d)
    }

    fn merged_facets(&self, pts: &[Vec<Q>]) -> Vec<Facet> {
        let mut out: Vec<Facet> = self.simplices.iter().map(|(idx, f)| Facet::new(f.normal.clone(), &pts[idx[0]])).collect();
        out.sort();
        out.dedup();
        out
    }
}

fn oriented_facet(pts: &[Vec<Q>], idx: &[usize], centre: &[Q]) -> Facet {
    let base = &pts[idx[0]];
    let rows: Vec<Vec<Q>> = idx[1..].iter().map(|&i| sub(&pts[i], base)).collect();
    let ns = nullspace(&rows, centre.len());
    debug_assert_eq!(ns.len(), 1);
    let mut f = Facet::new(ns.into_iter().next().expect("simplex facet spans a hyperplane"), base);
    if f.eval(centre).is_positive() {
        f = Facet { normal: f.normal.iter().map(|x| -x).collect(), offset: -f.offset };
    }
    f
}

/// Incremental beneath-beyond hull of full-dimensional points in `ℝ^d`.
fn beneath_beyond(pts: &[Vec<Q>], d: usize) -> Triangulation {
    let mut simplex = vec![0usize];
    for i in 1..pts.len() {
        if simplex.len() == d + 1 {
            break;
        }
        let mut rows: Vec<Vec<Q>> = simplex[1..].iter().map(|&j| sub(&pts[j], &pts[0])).collect();
        rows.push(sub(&pts[i], &pts[0]));
        if rank(&rows) == rows.len() {
            simplex.push(i);
        }
    }
    let centre: Vec<Q> = (0..d)
        .map(|c| simplex.iter().fold(Q::zero(), |acc, &i| acc + &pts[i][c]) / q(simplex.len() as i64))
        .collect();
    let mut simplices: Vec<(Vec<usize>, Facet)> = simplex
        .iter()
        .combinations(d)
        .map(|c| {
            let idx: Vec<usize> = c.into_iter().copied().collect();
            let f = oriented_facet(pts, &idx, &centre);
            (idx, f)
        })
        .collect();

    for p in 0..pts.len() {
        if simplex.contains(&p) {
            continue;
        }
        let (visible, kept): (Vec<_>, Vec<_>) = simplices.into_iter().partition(|(_, f)| f.eval(&pts[p]).is_positive());
        simplices = kept;
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for (idx, _) in &visible {
            for r in idx.iter().copied().combinations(d - 1) {
                *ridges.entry(r).or_default() += 1;
            }
        }
        let mut horizon: Vec<Vec<usize>> = ridges.into_iter().filter(|(_, c)| *c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        for mut r in horizon {
            r.push(p);
            r.sort_unstable();
            let f = oriented_facet(pts, &r, &centre);
            simplices.push((r, f));
        }
    }
    Triangulation { simplices, centre, points: pts.to_vec() }
}
