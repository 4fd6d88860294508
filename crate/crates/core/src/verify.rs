//! The aggregated property suite behind `oklab verify`.

use std::fmt;
use std::time::Instant;

use num::{BigInt, Integer, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{delta_k, seshadri_param, shift, simplex_body, slice, BodyApprox, RatPolytope};
use crate::degeneration::{gluing_certificate, shrink_box, DegenerationRun, GluingOptions};
use crate::error::Result;
use crate::format::{parse_polytope, parse_section_space, write_polytope, write_section_space};
use crate::moment::{
    capped_potential, ellipsoid_volume, hausdorff_to_hull, polydisk_monte_carlo, whole_space, MomentModel,
    QuadratureOptions,
};
use crate::order::{separating_weight, separation_constant, verify_separation, Exponent, OrderSpec};
use crate::rational::{factorial, q, qf, qvec, to_f64, Q};
use crate::sections::{eliminate, CoordinateChange, LeadingSet, ModelSpec};

#[derive(Clone, Debug)]
pub struct Check {
    pub module: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}/{}: {}", self.module, self.name, self.detail)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Run the conic-flag gluing certificate at grid 64 (several seconds).
    pub full_certificate: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, full_certificate: true }
    }
}

fn run(module: &'static str, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    let start = Instant::now();
    let (passed, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
    Check { module, name, passed, detail, millis: start.elapsed().as_millis() }
}

pub fn evaluate_all(opts: &SuiteOptions) -> Vec<Check> {
    vec![
        run("order", "separating-weight", || separation_suite(opts.seed)),
        run("sections", "cardinality", cardinality),
        run("sections", "semigroup", semigroup),
        run("sections", "file-round-trip", section_round_trip),
        run("bodies", "curve-identity", curve_identity),
        run("bodies", "volume-identity", volume_identity),
        run("bodies", "conic-flag-simplex", conic_flag_body),
        run("bodies", "slice-and-shift", slice_and_shift),
        run("bodies", "seshadri", seshadri),
        run("bodies", "file-round-trip", polytope_round_trip),
        run("moment", "gradient", || gradient_suite(opts.seed)),
        run("moment", "image-fills-hull", image_fills_hull),
        run("moment", "symplectic-volume", symplectic_volumes),
        run("moment", "polydisk-normalisation", || polydisk(opts.seed)),
        run("moment", "ellipsoid-volume", ellipsoid),
        run("moment", "capped-potential", capped),
        run("degeneration", "error-bound", error_bound),
        run("degeneration", "toric-certificate", toric_certificate),
        run("degeneration", "conic-certificate", || conic_certificate(if opts.full_certificate { 64 } else { 16 })),
    ]
}

fn binom(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

fn conic_model() -> Result<ModelSpec> {
    ModelSpec::projective_space(2, 2)?.with_flag(CoordinateChange::conic())
}

pub(crate) fn toric_models() -> Result<Vec<ModelSpec>> {
    [
        vec![qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])],
        vec![qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 1]), qvec(&[2, 1])],
        vec![qvec(&[0, 0, 0]), qvec(&[2, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 1]), qvec(&[2, 1, 1])],
    ]
    .into_iter()
    .map(|v| ModelSpec::toric(RatPolytope::convex_hull(&v)?))
    .collect()
}

fn random_exponents(rng: &mut ChaCha8Rng) -> Vec<Exponent> {
    let n = rng.gen_range(1..=4);
    let size = rng.gen_range(1..=20);
    (0..size)
        .map(|_| {
            let budget = rng.gen_range(0..=5u32);
            let mut coords = vec![0u32; n];
            for _ in 0..budget {
                coords[rng.gen_range(0..n)] += 1;
            }
            Exponent::new(coords)
        })
        .collect()
}

fn separation_suite(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for i in 0..100 {
        let set = random_exponents(&mut rng);
        let n = set[0].dim();
        let order = match i % 3 {
            0 => OrderSpec::Lex,
            1 => OrderSpec::DegLex,
            _ => OrderSpec::weight((0..n).map(|_| rng.gen_range(1..=3)).collect())?,
        };
        let gamma = separating_weight(&order, &set)?;
        let bound = 3 * separation_constant(&set)? as u32;
        if !verify_separation(&order, &set, &gamma, bound) {
            failures += 1;
        }
    }
    Ok((failures == 0, format!("100 random sets, {failures} failures")))
}

fn cardinality() -> Result<(bool, String)> {
    let mut checked = 0;
    for n in 1..=3 {
        for d in 1..=3u32 {
            let m = ModelSpec::projective_space(n, d)?;
            for k in 1..=3u32 {
                let a = eliminate(&OrderSpec::Lex, &m.sections(k)?)?;
                if a.len() as u64 != binom((k * d) as u64 + n as u64, n as u64) {
                    return Ok((false, format!("n={n} d={d} k={k}: |A|={}", a.len())));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} levels match binom(kd+n, n)")))
}

fn semigroup_holds(m: &ModelSpec, order: &OrderSpec) -> Result<bool> {
    let sets: Vec<LeadingSet> = (1..=4).map(|k| eliminate(order, &m.sections(k)?)).collect::<Result<_>>()?;
    for k in 1..=3usize {
        for l in 1..=(4 - k) {
            let target = &sets[k + l - 1];
            for a in sets[k - 1].exponents() {
                for b in sets[l - 1].exponents() {
                    let sum = Exponent::new(a.coords().iter().zip(b.coords()).map(|(x, y)| x + y).collect());
                    if !target.contains(&sum) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn semigroup() -> Result<(bool, String)> {
    let mut models = vec![ModelSpec::projective_space(2, 1)?];
    models.extend(toric_models()?.into_iter().take(2));
    for m in &models {
        if !semigroup_holds(m, &OrderSpec::Lex)? {
            return Ok((false, format!("A(k)+A(m) not in A(k+m) for {:?}", m.family())));
        }
    }
    Ok((true, format!("{} models, k+m ≤ 4", models.len())))
}

fn section_round_trip() -> Result<(bool, String)> {
    let spaces = vec![conic_model()?.sections(2)?, ModelSpec::projective_space(3, 2)?.sections(1)?, ModelSpec::curve(4)?.sections(3)?];
    for s in &spaces {
        let text = write_section_space(s);
        let back = parse_section_space(&text)?;
        if &back != s || write_section_space(&back) != text {
            return Ok((false, "re-parsed space differs".into()));
        }
    }
    Ok((true, format!("{} spaces byte-stable", spaces.len())))
}

fn curve_identity() -> Result<(bool, String)> {
    for d in 1..=6u32 {
        let approx = BodyApprox::build(&ModelSpec::curve(d)?, &OrderSpec::Lex, &[1, 2, 3])?;
        for (k, _, body) in approx.levels() {
            if body.vertices() != [qvec(&[0]), qvec(&[d as i64])] {
                return Ok((false, format!("d={d} k={k}: {:?}", body.vertices())));
            }
        }
    }
    Ok((true, "Δ_k = [0,d] for d ≤ 6, k ≤ 3".into()))
}

fn volume_identity() -> Result<(bool, String)> {
    for n in 1..=3 {
        for d in 1..=3u32 {
            let m = ModelSpec::projective_space(n, d)?;
            let body = delta_k(&eliminate(&OrderSpec::Lex, &m.sections(1)?)?)?;
            let lhs = factorial(n) * body.volume();
            if Some(&lhs) != m.self_intersection().as_ref() || lhs != q((d as i64).pow(n as u32)) {
                return Ok((false, format!("n={n} d={d}: n!·vol = {lhs}")));
            }
        }
    }
    Ok((true, "n!·vol(Δ_1) = d^n for n, d ≤ 3".into()))
}

fn conic_flag_body() -> Result<(bool, String)> {
    let approx = BodyApprox::build(&conic_model()?, &OrderSpec::Lex, &[1, 2, 3])?;
    let sigma = simplex_body(&[q(1), q(4)])?;
    let inside = approx.levels().all(|(_, _, b)| sigma.contains_polytope(b));
    let v3 = factorial(2) * approx.body(3).expect("level 3 was built").volume();
    let ok = inside && v3 >= qf(7, 2) && approx.inclusions().iter().all(|i| i.holds);
    Ok((ok, format!("Δ_k ⊆ Σ(1,4): {inside}, 2!·vol(Δ_3) = {v3}")))
}

/// The least level at which `(P ∩ {x_1 ≥ r})` dilates to a lattice polytope.
pub(crate) fn lattice_level(p: &RatPolytope, r: &Q) -> Result<u32> {
    let cut = shift(p, 0, r)?.expect("nonempty cut");
    let den = cut.vertices().iter().flatten().chain([r]).fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    Ok(den.to_u32().expect("small denominator"))
}

fn slice_and_shift() -> Result<(bool, String)> {
    let mut checked = 0;
    for m in toric_models()? {
        let p = m.toric_polytope().expect("toric model").clone();
        for r in [q(0), qf(1, 2), q(1)] {
            let k = lattice_level(&p, &r)?;
            let j = (&r * q(k as i64)).to_integer().to_u32().expect("integral twist");
            let twisted = m.sections(k)?.twist_by_first_divisor(j)?;
            let shifted = delta_k(&eliminate(&OrderSpec::Lex, &twisted)?)?;
            if Some(&shifted) != shift(&p, 0, &r)?.as_ref() {
                return Ok((false, format!("shift mismatch at r={r}, k={k}")));
            }
            let restricted = delta_k(&eliminate(&OrderSpec::Lex, &twisted.restrict_to_first_divisor()?)?)?;
            if Some(&restricted) != slice(&p, 0, &r)?.as_ref() {
                return Ok((false, format!("slice mismatch at r={r}, k={k}")));
            }
            checked += 1;
        }
    }
    Ok((true, format!("{checked} (model, r) pairs, r ∈ {{0, 1/2, 1}}")))
}

fn seshadri() -> Result<(bool, String)> {
    for d in 1..=4u32 {
        let body = delta_k(&eliminate(&OrderSpec::DegLex, &ModelSpec::projective_space(2, d)?.sections(1)?)?)?;
        let t = seshadri_param(&body)?;
        if t != q(d as i64) {
            return Ok((false, format!("d={d}: t*={t}")));
        }
    }
    let t = seshadri_param(&simplex_body(&[q(1), q(1), q(4)])?)?;
    Ok((t.is_one(), format!("deglex P² bodies give t* = d; Σ(1,1,4) gives t* = {t}")))
}

fn polytope_round_trip() -> Result<(bool, String)> {
    let mut bodies: Vec<RatPolytope> = toric_models()?.iter().map(|m| m.toric_polytope().expect("toric").clone()).collect();
    bodies.push(simplex_body(&[qf(1, 3), q(2), qf(5, 7)])?);
    bodies.push(RatPolytope::convex_hull(&[qvec(&[0, 1]), qvec(&[2, 3])])?);
    for b in &bodies {
        let text = write_polytope(b);
        if parse_polytope(&text)? != *b {
            return Ok((false, "re-parsed polytope differs".into()));
        }
    }
    Ok((true, format!("{} polytopes", bodies.len())))
}

fn gradient_suite(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let h = 1e-5;
    for _ in 0..100 {
        let set = random_exponents(&mut rng);
        let m = MomentModel::new(&set)?;
        let x: Vec<f64> = (0..m.dim()).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let grad = m.moment_map(&x);
        for (i, g) in grad.iter().enumerate() {
            let (mut xp, mut xm) = (x.clone(), x.clone());
            xp[i] += h;
            xm[i] -= h;
            worst = worst.max((g - (m.potential(&xp) - m.potential(&xm)) / (2.0 * h)).abs());
        }
    }
    Ok((worst <= 1e-6, format!("max |∇u − FD| = {worst:.2e} at 100 points")))
}

fn exps(v: &[&[u32]]) -> Vec<Exponent> {
    v.iter().map(|e| Exponent::new(e.to_vec())).collect()
}

fn image_fills_hull() -> Result<(bool, String)> {
    let conic = eliminate(&OrderSpec::Lex, &conic_model()?.sections(1)?)?;
    let mut worst = 0.0f64;
    for set in [exps(&[&[0, 0], &[1, 0], &[0, 1]]), conic.exponents().to_vec(), exps(&[&[0], &[5]])] {
        worst = worst.max(hausdorff_to_hull(&MomentModel::new(&set)?, 40.0, 20_000, 60)?);
    }
    Ok((worst <= 1e-2, format!("Hausdorff distance at R=40: {worst:.2e}")))
}

fn symplectic_volumes() -> Result<(bool, String)> {
    let conic = eliminate(&OrderSpec::Lex, &conic_model()?.sections(1)?)?;
    let models = [
        exps(&[&[0], &[3]]),
        exps(&[&[0, 0], &[1, 0], &[0, 1]]),
        exps(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]),
        conic.exponents().to_vec(),
    ];
    let mut worst = 0.0f64;
    for set in &models {
        let m = MomentModel::new(set)?;
        let (lo, hi) = whole_space(m.dim());
        let v = m.symplectic_volume(&lo, &hi, &QuadratureOptions::default())?.value;
        let exact = to_f64(&m.hull()?.volume());
        worst = worst.max((v - exact).abs() / exact);
    }
    Ok((worst <= 1e-2, format!("max relative error {worst:.2e} over {} models", models.len())))
}

fn polydisk(seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for radii in [vec![1.0], vec![1.0, 0.6]] {
        let mc = polydisk_monte_carlo(&radii, 1 << 20, seed)?;
        let expected = to_f64(&factorial(radii.len())) * radii.iter().map(|r| r * r).product::<f64>();
        worst = worst.max((mc.value - expected).abs() / expected);
    }
    Ok((worst <= 1e-2, format!("max relative error {worst:.2e} against n!·vol(μ-image)")))
}

fn ellipsoid() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 2..=3usize {
        for d in [2i64, 4] {
            let mut a = vec![1.0; n];
            a[n - 1] = d as f64;
            let v = ellipsoid_volume(&a, &QuadratureOptions::default())?.value;
            worst = worst.max((v - d as f64).abs() / d as f64);
            let mut w = vec![q(1); n];
            w[n - 1] = q(d);
            if factorial(n) * simplex_body(&w)?.volume() != q(d) {
                return Ok((false, format!("n!·vol(Σ) ≠ {d}")));
            }
        }
    }
    Ok((worst <= 1e-2, format!("quadrature max relative error {worst:.2e}; simplex volumes exact")))
}

fn capped() -> Result<(bool, String)> {
    let tri = MomentModel::new(&exps(&[&[0, 0], &[3, 0], &[0, 3]]))?;
    let report = capped_potential(&tri, &[-1.0, -1.0], &[-0.2, -0.3], 0.1, 0.2)?.verify(25);
    Ok((report.passes(), format!("deviation on U {:.1e}, min eigenvalue {:.2e}", report.max_deviation_on_u, report.min_eigenvalue)))
}

fn error_bound() -> Result<(bool, String)> {
    let conic = eliminate(&OrderSpec::Lex, &conic_model()?.sections(1)?)?;
    let base = DegenerationRun::with_separating_weight(conic, qf(1, 2), 1.0)?;
    let c = base.error_constant();
    for j in 1..=10u32 {
        let run = base.with_tau(qf(1, 1 << j))?;
        if run.degeneration_error() > c / (1u64 << j) as f64 * (1.0 + 1e-12) {
            return Ok((false, format!("τ=2^-{j}: bound exceeds Cτ")));
        }
    }
    for m in toric_models()? {
        let a = eliminate(&OrderSpec::Lex, &m.sections(1)?)?;
        if !DegenerationRun::with_separating_weight(a, qf(1, 2), 1.0)?.degeneration_error().is_zero() {
            return Ok((false, "nonzero error on a toric basis".into()));
        }
    }
    Ok((true, format!("conic flag: error ≤ Cτ with C = {c:.4}; toric error 0")))
}

fn certify(basis: &LeadingSet, per_axis: usize) -> Result<(bool, String)> {
    let gamma = separating_weight(basis.order(), basis.exponents())?;
    let model = MomentModel::new(basis.exponents())?;
    let u = shrink_box(&model, 0.8)?;
    let k = shrink_box(&model, 0.95)?;
    let cert = gluing_certificate(basis, &gamma, &u, &k, &GluingOptions { delta: 1e-2, per_axis, tau_start: None })?;
    Ok((cert.sign_stable(), format!("δ={:.3e}, τ={}, grid {per_axis}", cert.delta, cert.tau)))
}

fn toric_certificate() -> Result<(bool, String)> {
    let sq = ModelSpec::toric(RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])])?)?;
    certify(&eliminate(&OrderSpec::Lex, &sq.sections(1)?)?, 32)
}

fn conic_certificate(per_axis: usize) -> Result<(bool, String)> {
    certify(&eliminate(&OrderSpec::Lex, &conic_model()?.sections(1)?)?, per_axis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let checks = evaluate_all(&SuiteOptions { seed: 1, full_certificate: false });
        for c in &checks {
            println!("{c}");
            assert!(c.passed, "{c}");
        }
        assert!(checks.len() >= 15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(12, 3), 220);
    }
}
