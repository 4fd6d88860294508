//! The `τ^γ` rescaling of a distinguished basis and the numerical gluing
//! certificate.
//!
//! With `γ` separating, `r_α(z) = τ^{−α·γ} s_α(τ^γ z) = z^α + Σ_β a_β
//! τ^{(β−α)·γ} z^β` where every exponent `(β−α)·γ` is a positive integer, so
//! the corrections are `O(τ)` on bounded sets.
//!
//! The certificate works on the torus-invariant slice in log coordinates.
//! Cross terms in `|r_α|²` depend on torus phases, so `ψ_τ = ln Σ|r_α|²` is
//! replaced by envelopes that hold for every phase:
//! `|r_α| ≤ e^{α·x/2} + E_α(x)` and `|r_α| ≥ e^{α·x/2} − E_α(x)` with
//! `E_α(x) = Σ_β |a_β| τ^{(β−α)·γ} e^{β·x/2}`.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num::{One, Signed};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moment::MomentModel;
use crate::order::{separating_weight, verify_separation, Exponent};
use crate::rational::{fmt_q, q, qf, to_f64, Q};
use crate::sections::{LeadingSet, PolySection};

/// One correction term `a_β τ^{e} z^β` of a rescaled section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub beta: Exponent,
    pub coeff: Q,
    pub tau_power: u64,
}

#[derive(Clone, Debug)]
pub struct DegenerationRun {
    basis: LeadingSet,
    gamma: Vec<u64>,
    tau: Q,
    ball_radius: f64,
    corrections: Vec<Vec<Correction>>,
}

impl DegenerationRun {
    pub fn new(basis: LeadingSet, gamma: Vec<u64>, tau: Q, ball_radius: f64) -> Result<Self> {
        if !(tau.is_positive() && tau < Q::one()) {
            return Err(Error::InvalidArgument(format!("τ must lie in (0, 1), got {}", fmt_q(&tau))));
        }
        if !(ball_radius > 0.0 && ball_radius.is_finite()) {
            return Err(Error::InvalidArgument("ball radius must be positive".into()));
        }
        if gamma.len() != basis.nvars() {
            return Err(Error::DimensionMismatch { expected: basis.nvars(), got: gamma.len() });
        }
        let bound = basis.distinguished().iter().map(PolySection::max_degree).max().unwrap_or(0) as u32;
        if !verify_separation(basis.order(), basis.exponents(), &gamma, bound) {
            return Err(Error::Precondition(format!(
                "weight {gamma:?} does not separate the leading set under {} up to degree {bound}",
                basis.order()
            )));
        }
        let mut corrections = Vec::with_capacity(basis.len());
        for (alpha, s) in basis.exponents().iter().zip(basis.distinguished()) {
            let a_dot = alpha.dot(&gamma);
            let mut terms = Vec::new();
            for (beta, c) in s.terms().filter(|(b, _)| *b != alpha) {
                let b_dot = beta.dot(&gamma);
                if b_dot <= a_dot {
                    return Err(Error::Precondition(format!(
                        "term {beta} of s_{alpha} has τ-exponent {} < 1",
                        b_dot as i128 - a_dot as i128
                    )));
                }
                terms.push(Correction { beta: beta.clone(), coeff: c.clone(), tau_power: b_dot - a_dot });
            }
            corrections.push(terms);
        }
        Ok(DegenerationRun { basis, gamma, tau, ball_radius, corrections })
    }

    /// Uses the separating weight of the basis's order.
    pub fn with_separating_weight(basis: LeadingSet, tau: Q, ball_radius: f64) -> Result<Self> {
        let gamma = separating_weight(basis.order(), basis.exponents())?;
        Self::new(basis, gamma, tau, ball_radius)
    }

    pub fn with_tau(&self, tau: Q) -> Result<Self> {
        Self::new(self.basis.clone(), self.gamma.clone(), tau, self.ball_radius)
    }

    pub fn basis(&self) -> &LeadingSet {
        &self.basis
    }

    pub fn gamma(&self) -> &[u64] {
        &self.gamma
    }

    pub fn tau(&self) -> &Q {
        &self.tau
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    /// Correction terms of each `r_α`, in basis order.
    pub fn corrections(&self) -> &[Vec<Correction>] {
        &self.corrections
    }

    /// `r_α(z) = z^α + Σ a_β τ^{(β−α)·γ} z^β`, exact.
    pub fn rescale_basis(&self) -> Vec<PolySection> {
        let n = self.basis.nvars();
        self.basis
            .exponents()
            .iter()
            .zip(&self.corrections)
            .map(|(alpha, corr)| {
                let terms = std::iter::once((alpha.clone(), Q::one()))
                    .chain(corr.iter().map(|c| (c.beta.clone(), &c.coeff * self.tau.pow(c.tau_power as i32))));
                PolySection::from_terms(n, terms).expect("basis exponents share the dimension")
            })
            .collect()
    }

    /// `max_α Σ_β |a_β| ρ^{|β|}`: the `τ = 1` coefficient sum, so that
    /// `error(τ) ≤ C·τ` for `τ ≤ 1`.
    pub fn error_constant(&self) -> f64 {
        self.bound_with(|_| 1.0)
    }

    /// Bound on `sup |r_α − z^α|` over the polydisk of radius `ρ` (hence
    /// over the ball), maximised over `α`.
    pub fn degeneration_error(&self) -> f64 {
        let t = to_f64(&self.tau);
        self.bound_with(|e| t.powi(e as i32))
    }

    fn bound_with(&self, tau_pow: impl Fn(u64) -> f64) -> f64 {
        self.corrections
            .iter()
            .map(|corr| {
                corr.iter()
                    .map(|c| to_f64(&c.coeff.abs()) * tau_pow(c.tau_power) * self.ball_radius.powi(c.beta.degree() as i32))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// An axis-aligned box in log coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct LogBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl LogBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), got: hi.len() });
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Precondition("box bounds must be finite with lo < hi".into()));
        }
        Ok(LogBox { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn strictly_inside(&self, outer: &LogBox) -> bool {
        self.lo.iter().zip(&outer.lo).all(|(a, b)| a > b) && self.hi.iter().zip(&outer.hi).all(|(a, b)| a < b)
    }
}

/// Solves `∇u_A(x) = y` for `y ∈ Conv(A)°` by damped Newton.
pub fn moment_preimage(model: &MomentModel, y: &[f64]) -> Result<Vec<f64>> {
    let n = model.dim();
    let mut x = vec![0.0; n];
    let objective = |x: &[f64]| model.potential(x) - x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    for _ in 0..200 {
        let g = DVector::from_vec(model.moment_map(&x)) - DVector::from_column_slice(y);
        if g.norm() < 1e-12 {
            return Ok(x);
        }
        let h = model.hessian(&x);
        let step = h.lu().solve(&g).ok_or_else(|| Error::Numeric("singular Hessian in moment preimage".into()))?;
        let f0 = objective(&x);
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a - t * s).collect();
            if objective(&cand) <= f0 - 1e-4 * t * g.dot(&step) || t < 1e-12 {
                x = cand;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::Numeric(format!("moment preimage of {y:?} did not converge")))
}

/// The cube `[x_c − R, x_c + R]^n` around the preimage of the vertex
/// centroid `c`, with the largest `R` whose moment image stays inside
/// `c + shrink·(Conv(A) − c)`. The image is checked on the cube's faces.
pub fn shrink_box(model: &MomentModel, shrink: f64) -> Result<LogBox> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(Error::Precondition(format!("shrink factor must lie in (0, 1), got {shrink}")));
    }
    let hull = model.hull()?;
    if !hull.is_full_dimensional() {
        return Err(Error::NotFullDimensional { affine_dim: hull.affine_dim(), n: hull.dim() });
    }
    let n = model.dim();
    let nv = hull.vertices().len() as f64;
    let c: Vec<f64> = (0..n).map(|i| hull.vertices().iter().map(|v| to_f64(&v[i])).sum::<f64>() / nv).collect();
    let facets: Vec<(Vec<f64>, f64)> = hull
        .facets()
        .iter()
        .map(|f| {
            let g: Vec<f64> = f.normal.iter().map(to_f64).collect();
            let gc: f64 = g.iter().zip(&c).map(|(a, b)| a * b).sum();
            let off = gc + shrink * (to_f64(&f.offset) - gc);
            (g, off)
        })
        .collect();
    let xc = moment_preimage(model, &c)?;
    let per_face = if n <= 2 { 257 } else { 17 };
    let fits = |r: f64| {
        for axis in 0..n {
            for side in [-r, r] {
                let mut lo: Vec<f64> = xc.iter().map(|v| v - r).collect();
                let mut hi: Vec<f64> = xc.iter().map(|v| v + r).collect();
                lo[axis] = xc[axis] + side;
                hi[axis] = xc[axis] + side;
                for x in crate::moment::grid_points(&lo, &hi, per_face) {
                    let m = model.moment_map(&x);
                    if facets.iter().any(|(g, off)| g.iter().zip(&m).map(|(a, b)| a * b).sum::<f64>() >= *off) {
                        return false;
                    }
                }
            }
        }
        true
    };
    let mut hi = 1.0;
    while fits(hi) {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::Numeric("shrunk body is not reached by bounded boxes".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo <= 0.0 {
        return Err(Error::Numeric("no positive box fits in the shrunk body".into()));
    }
    LogBox::new(xc.iter().map(|v| v - lo).collect(), xc.iter().map(|v| v + lo).collect())
}

/// `6t⁵ − 15t⁴ + 10t³` on `[0, 1]` with its first two derivatives.
fn smoothstep(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let t2 = t * t;
        (t2 * t * (10.0 - 15.0 * t + 6.0 * t2), 30.0 * t2 * (1.0 - t) * (1.0 - t), 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t))
    }
}

/// `f = 1 − Π_i w_i(x_i)`, 0 on `U` and 1 off `K`.
struct Cutoff {
    u: LogBox,
    k: LogBox,
}

impl Cutoff {
    fn axis(&self, i: usize, t: f64) -> (f64, f64, f64) {
        let (ul, uh, kl, kh) = (self.u.lo[i], self.u.hi[i], self.k.lo[i], self.k.hi[i]);
        if t < ul {
            let w = ul - kl;
            let (s, ds, dds) = smoothstep((t - kl) / w);
            (s, ds / w, dds / (w * w))
        } else if t > uh {
            let w = kh - uh;
            let (s, ds, dds) = smoothstep((kh - t) / w);
            (s, -ds / w, dds / (w * w))
        } else {
            (1.0, 0.0, 0.0)
        }
    }

    fn eval(&self, x: &[f64]) -> (f64, DMatrix<f64>) {
        let n = x.len();
        let ws: Vec<(f64, f64, f64)> = (0..n).map(|i| self.axis(i, x[i])).collect();
        let prod_except = |skip: &[usize]| -> f64 {
            (0..n).filter(|j| !skip.contains(j)).map(|j| ws[j].0).product()
        };
        let f = 1.0 - prod_except(&[]);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = -ws[i].2 * prod_except(&[i]);
            for j in 0..i {
                let v = -ws[i].1 * ws[j].1 * prod_except(&[i, j]);
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        (f, h)
    }
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `r_α` with floating coefficients for a fixed `τ`.
struct Rescaled {
    alphas: Vec<Vec<f64>>,
    /// `(β − α, a_β τ^e)` per section.
    terms: Vec<Vec<(Vec<f64>, f64)>>,
    /// `(β, a_β τ^e)` including the leading `(α, 1)`.
    full: Vec<Vec<(Vec<f64>, f64)>>,
}

impl Rescaled {
    fn new(run: &DegenerationRun) -> Self {
        let t = to_f64(&run.tau);
        let alphas: Vec<Vec<f64>> = run.basis.exponents().iter().map(Exponent::to_f64).collect();
        let mut terms = Vec::new();
        let mut full = Vec::new();
        for (alpha, corr) in alphas.iter().zip(&run.corrections) {
            let c: Vec<(Vec<f64>, f64)> = corr
                .iter()
                .map(|c| (c.beta.to_f64(), to_f64(&c.coeff) * t.powi(c.tau_power.min(i32::MAX as u64) as i32)))
                .collect();
            terms.push(c.iter().map(|(b, v)| (b.iter().zip(alpha).map(|(b, a)| b - a).collect(), *v)).collect());
            let mut f = vec![(alpha.clone(), 1.0)];
            f.extend(c);
            full.push(f);
        }
        Rescaled { alphas, terms, full }
    }

    /// `ρ_α(x) = E_α(x) e^{−α·x/2}`.
    fn ratios(&self, x: &[f64]) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| t.iter().map(|(d, c)| c.abs() * (0.5 * dot(d, x)).exp()).sum())
            .collect()
    }

    fn psi_bounds(&self, x: &[f64]) -> (f64, f64) {
        let rho = self.ratios(x);
        let upper = log_sum_exp(self.alphas.iter().zip(&rho).map(|(a, r)| dot(a, x) + 2.0 * r.ln_1p()));
        let lower = log_sum_exp(
            self.alphas.iter().zip(&rho).filter(|(_, r)| **r < 1.0).map(|(a, r)| dot(a, x) + 2.0 * (-r).ln_1p()),
        );
        (lower, upper)
    }

    /// `ψ` at the real positive point `z_i = e^{x_i/2}` with gradient and
    /// Hessian in `x`, computed after factoring out `e^{M/2}`.
    fn psi_real(&self, x: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let n = x.len();
        let m = self.full.iter().flatten().map(|(b, _)| dot(b, x)).fold(f64::NEG_INFINITY, f64::max);
        let mut s = 0.0;
        let mut ds = DVector::zeros(n);
        let mut dds = DMatrix::zeros(n, n);
        for sec in &self.full {
            let mut r = 0.0;
            let mut dr = DVector::zeros(n);
            let mut ddr = DMatrix::zeros(n, n);
            for (b, c) in sec {
                let e = c * (0.5 * (dot(b, x) - m)).exp();
                let bv = DVector::from_column_slice(b) * 0.5;
                r += e;
                dr += e * &bv;
                ddr += e * &bv * bv.transpose();
            }
            s += r * r;
            ds += 2.0 * r * &dr;
            dds += 2.0 * (&dr * dr.transpose() + r * ddr);
        }
        let g = &ds / s;
        let h = &dds / s - &g * g.transpose();
        (s.ln() + m, g, h)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

fn min_eigenvalue(h: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Evidence gathered at one grid resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct GridEvidence {
    pub per_axis: usize,
    /// `min_U (φ − ψ_upper + δ)`.
    pub u_margin: f64,
    /// `min_collar (ψ_lower − 3δ − φ)`.
    pub collar_margin: f64,
    /// `1 − Σ τ^{2γ_i} e^{K_hi,i}`.
    pub chart_margin: f64,
    pub min_eig_phi: f64,
    pub min_eig_glued: f64,
    /// `φ′ = φ` on every U point and `φ′ = ψ − 2δ` on every collar point.
    pub identities_hold: bool,
}

impl GridEvidence {
    /// All conditions hold, with both band margins at least `cushion`.
    fn admissible(&self, cushion: f64) -> bool {
        self.u_margin > cushion
            && self.collar_margin > cushion
            && self.chart_margin > 0.0
            && self.min_eig_glued >= EIG_FLOOR
    }

    fn binding(&self) -> &'static str {
        if self.chart_margin <= 0.0 {
            "chart condition τ^γ z ∈ B₁ on K"
        } else if self.u_margin <= 0.0 {
            "band inequality on U (φ > ψ − δ)"
        } else if self.collar_margin <= 0.0 {
            "band inequality near ∂K (φ < ψ − 3δ)"
        } else {
            "positivity of the glued Hessian"
        }
    }
}

pub const EIG_FLOOR: f64 = 1e-9;
const TAU_FLOOR_EXP: i64 = 29;
const MAX_DELTA_HALVINGS: u32 = 20;

#[derive(Clone, Debug)]
pub struct GluingCertificate {
    pub delta: f64,
    pub delta_halvings: u32,
    pub tau: Q,
    pub gamma: Vec<u64>,
    pub u: LogBox,
    pub k: LogBox,
    pub evidence: GridEvidence,
    pub doubled: GridEvidence,
}

impl GluingCertificate {
    pub fn sign_stable(&self) -> bool {
        self.doubled.admissible(0.0) && self.doubled.identities_hold
    }
}

impl fmt::Display for GluingCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_box = |b: &LogBox| -> String {
            b.lo.iter().zip(&b.hi).map(|(l, h)| format!("[{l:.6}, {h:.6}]")).collect::<Vec<_>>().join(" x ")
        };
        writeln!(f, "status: certified")?;
        writeln!(f, "tau: {} ({:.6e})", fmt_q(&self.tau), to_f64(&self.tau))?;
        writeln!(f, "gamma: {:?}", self.gamma)?;
        writeln!(f, "delta: {:.6e} (halvings: {})", self.delta, self.delta_halvings)?;
        writeln!(f, "U: {}", fmt_box(&self.u))?;
        writeln!(f, "K: {}", fmt_box(&self.k))?;
        for (label, e) in [("grid", &self.evidence), ("doubled", &self.doubled)] {
            writeln!(f, "[{label} {}^n]", e.per_axis)?;
            writeln!(f, "  u_margin: {:.6e}", e.u_margin)?;
            writeln!(f, "  collar_margin: {:.6e}", e.collar_margin)?;
            writeln!(f, "  chart_margin: {:.6e}", e.chart_margin)?;
            writeln!(f, "  min_eig_phi: {:.6e}", e.min_eig_phi)?;
            writeln!(f, "  min_eig_glued: {:.6e}", e.min_eig_glued)?;
            writeln!(f, "  identities: {}", if e.identities_hold { "ok" } else { "FAILED" })?;
        }
        write!(f, "eigenvalue_floor: {EIG_FLOOR:e}")
    }
}

struct Setup<'a> {
    model: MomentModel,
    run: &'a DegenerationRun,
    cutoff: Cutoff,
    delta: f64,
}

impl Setup<'_> {
    fn phi(&self, x: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let (f, fh) = self.cutoff.eval(x);
        let h = self.model.hessian(x) - 4.0 * self.delta * fh;
        let g = self.grad_phi(x);
        (self.model.potential(x) - 4.0 * self.delta * f, g, h)
    }

    fn grad_phi(&self, x: &[f64]) -> DVector<f64> {
        let n = x.len();
        let ws: Vec<(f64, f64, f64)> = (0..n).map(|i| self.cutoff.axis(i, x[i])).collect();
        let mut g = DVector::from_vec(self.model.moment_map(x));
        for i in 0..n {
            let others: f64 = (0..n).filter(|&j| j != i).map(|j| ws[j].0).product();
            g[i] += 4.0 * self.delta * ws[i].1 * others;
        }
        g
    }

    fn min_eig_phi(&self, per_axis: usize) -> f64 {
        expanded_grid(&self.cutoff.k, per_axis)
            .into_par_iter()
            .map(|(x, _)| min_eigenvalue(self.phi(&x).2))
            .reduce(|| f64::INFINITY, f64::min)
    }

    fn evidence(&self, per_axis: usize, min_eig_phi: f64) -> GridEvidence {
        let resc = Rescaled::new(self.run);
        let spec = crate::moment::RegMaxSpec::new(self.delta).expect("δ is positive");
        let delta = self.delta;
        let u_points: Vec<Vec<f64>> = crate::moment::grid_points(&self.cutoff.u.lo, &self.cutoff.u.hi, per_axis).collect();
        let (u_margin, u_ok) = u_points
            .par_iter()
            .map(|x| {
                let phi = self.model.potential(x) - 4.0 * delta * self.cutoff.eval(x).0;
                let (_, upper) = resc.psi_bounds(x);
                let (psi, _, _) = resc.psi_real(x);
                let glued = crate::moment::reg_max(&spec, phi, psi - 2.0 * delta);
                (phi - (upper - delta), glued == phi)
            })
            .reduce(|| (f64::INFINITY, true), |a, b| (a.0.min(b.0), a.1 && b.1));
        let grid = expanded_grid(&self.cutoff.k, per_axis);
        let (collar_margin, collar_ok, min_eig_glued) = grid
            .par_iter()
            .map(|(x, collar)| {
                let (phi, gphi, hphi) = self.phi(x);
                let (psi, gpsi, hpsi) = resc.psi_real(x);
                let target = psi - 2.0 * delta;
                let (a, b, c) = crate::moment::reg_max_derivatives(&spec, phi, target);
                let d = &gphi - &gpsi;
                let h = a * hphi + b * hpsi + c * &d * d.transpose();
                let eig = min_eigenvalue(h);
                if *collar {
                    let (lower, _) = resc.psi_bounds(x);
                    let glued = crate::moment::reg_max(&spec, phi, target);
                    (lower - 3.0 * delta - phi, glued == target, eig)
                } else {
                    (f64::INFINITY, true, eig)
                }
            })
            .reduce(|| (f64::INFINITY, true, f64::INFINITY), |a, b| (a.0.min(b.0), a.1 && b.1, a.2.min(b.2)));
        let t = to_f64(&self.run.tau);
        let chart = self
            .run
            .gamma
            .iter()
            .zip(&self.cutoff.k.hi)
            .map(|(&g, &kh)| (2.0 * g as f64 * t.ln() + kh).exp())
            .sum::<f64>();
        GridEvidence {
            per_axis,
            u_margin,
            collar_margin,
            chart_margin: 1.0 - chart,
            min_eig_phi,
            min_eig_glued,
            identities_hold: u_ok && collar_ok,
        }
    }
}

/// Grid over `K` expanded by one cell per side; the flag marks the collar
/// (points on or outside `∂K`).
fn expanded_grid(k: &LogBox, per_axis: usize) -> Vec<(Vec<f64>, bool)> {
    let n = k.dim();
    let m = per_axis + 2;
    let h: Vec<f64> = (0..n).map(|i| (k.hi[i] - k.lo[i]) / (per_axis - 1) as f64).collect();
    (0..m.pow(n as u32))
        .map(|mut idx| {
            let mut collar = false;
            let x = (0..n)
                .map(|i| {
                    let j = idx % m;
                    idx /= m;
                    collar |= j <= 1 || j >= per_axis;
                    k.lo[i] + (j as f64 - 1.0) * h[i]
                })
                .collect();
            (x, collar)
        })
        .collect()
}

/// Options for [`gluing_certificate`].
#[derive(Clone, Debug)]
pub struct GluingOptions {
    pub delta: f64,
    pub per_axis: usize,
    /// Start the τ search here instead of `1/2`.
    pub tau_start: Option<Q>,
}

/// Searches `τ` along `2^{−1}, 2^{−2}, …` down to `2^{−29}`, refines the
/// first admissible step by bisection, then re-checks on the doubled grid.
/// During the search both band margins must exceed `δ/4`, so the chosen
/// `τ` is not on the edge of admissibility.
pub fn gluing_certificate(basis: &LeadingSet, gamma: &[u64], u: &LogBox, k: &LogBox, opts: &GluingOptions) -> Result<GluingCertificate> {
    let n = basis.nvars();
    if u.dim() != n || k.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: u.dim().min(k.dim()) });
    }
    if !u.strictly_inside(k) {
        return Err(Error::Precondition("U must lie strictly inside K".into()));
    }
    if opts.per_axis < 3 {
        return Err(Error::InvalidArgument("grid needs at least 3 points per axis".into()));
    }
    if !(opts.delta > 0.0) {
        return Err(Error::InvalidArgument("δ must be positive".into()));
    }
    let model = MomentModel::new(basis.exponents())?;
    let hull = model.hull()?;
    if !hull.is_full_dimensional() {
        return Err(Error::NotFullDimensional { affine_dim: hull.affine_dim(), n });
    }
    let start = opts.tau_start.clone().unwrap_or_else(|| qf(1, 2));
    let run = DegenerationRun::new(basis.clone(), gamma.to_vec(), start.clone(), 1.0)?;

    let mut delta = opts.delta;
    let mut halvings = 0;
    let mut setup = Setup { model, run: &run, cutoff: Cutoff { u: u.clone(), k: k.clone() }, delta };
    let mut eig_phi = setup.min_eig_phi(opts.per_axis);
    while eig_phi < EIG_FLOOR {
        if halvings == MAX_DELTA_HALVINGS {
            return Err(Error::Numeric(format!(
                "φ = φ_A − 4δf is not strictly convex on the grid (min eigenvalue {eig_phi:.3e} at δ = {delta:.3e})"
            )));
        }
        halvings += 1;
        delta *= 0.5;
        setup.delta = delta;
        eig_phi = setup.min_eig_phi(opts.per_axis);
    }

    let cushion = 0.25 * delta;
    let try_tau = |tau: &Q| -> Result<GridEvidence> {
        let r = run.with_tau(tau.clone())?;
        let s = Setup { model: setup.model.clone(), run: &r, cutoff: Cutoff { u: u.clone(), k: k.clone() }, delta };
        Ok(s.evidence(opts.per_axis, eig_phi))
    };

    let mut prev_bad: Option<Q> = None;
    let mut tau = start;
    let mut found = None;
    let mut last = None;
    for _ in 0..TAU_FLOOR_EXP {
        let ev = try_tau(&tau)?;
        if ev.admissible(cushion) {
            found = Some((tau.clone(), ev));
            break;
        }
        last = Some(ev);
        prev_bad = Some(tau.clone());
        tau = &tau / q(2);
        if tau < qf(1, 1 << TAU_FLOOR_EXP) {
            break;
        }
    }
    let Some((mut good, mut good_ev)) = found else {
        let ev = last.expect("at least one τ tried");
        return Err(Error::Numeric(format!(
            "no admissible τ ≥ 2^-{TAU_FLOOR_EXP}: binding condition is the {} (u_margin {:.3e}, collar_margin {:.3e}, chart_margin {:.3e}, min_eig {:.3e})",
            ev.binding(),
            ev.u_margin,
            ev.collar_margin,
            ev.chart_margin,
            ev.min_eig_glued
        )));
    };
    if let Some(mut bad) = prev_bad {
        for _ in 0..20 {
            let mid = (&good + &bad) / q(2);
            let ev = try_tau(&mid)?;
            if ev.admissible(cushion) {
                good = mid;
                good_ev = ev;
            } else {
                bad = mid;
            }
        }
    }
    let fine = 2 * opts.per_axis - 1;
    let r = run.with_tau(good.clone())?;
    let s = Setup { model: setup.model.clone(), run: &r, cutoff: Cutoff { u: u.clone(), k: k.clone() }, delta };
    let doubled = s.evidence(fine, s.min_eig_phi(fine));
    let cert = GluingCertificate {
        delta,
        delta_halvings: halvings,
        tau: good,
        gamma: gamma.to_vec(),
        u: u.clone(),
        k: k.clone(),
        evidence: good_ev,
        doubled,
    };
    if !cert.evidence.identities_hold {
        return Err(Error::Numeric("glued potential does not reproduce φ on U and ψ − 2δ near ∂K".into()));
    }
    if !cert.sign_stable() {
        return Err(Error::Numeric(format!(
            "doubling the grid flipped a sign: binding condition is the {}",
            cert.doubled.binding()
        )));
    }
    Ok(cert)
}
