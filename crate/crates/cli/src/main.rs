use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::One;
use oklab::bodies::{delta_k, domain_membership, ellipsoid_domain, seshadri_param, BodyApprox, RatPolytope};
use oklab::degeneration::{gluing_certificate, shrink_box, DegenerationRun, GluingOptions};
use oklab::format::{parse_polytope, parse_section_spaces, polytope_csv, render_svg, write_polytope};
use oklab::moment::{capped_potential, ellipsoid_volume, grid_points, hausdorff_to_hull, whole_space, MomentModel, QuadratureOptions};
use oklab::order::separating_weight;
use oklab::rational::{factorial, parse_q, q, to_f64};
use oklab::sections::{eliminate, CoordinateChange, LeadingSet, ModelFamily, ModelSpec};
use oklab::verify::{evaluate_all, SuiteOptions};
use oklab::{Error, OrderSpec, Q};

#[derive(Parser)]
#[command(name = "oklab", version, about = "Okounkov bodies, Okounkov domains and toric gluing certificates")]
struct Cli {
    /// Seed for every randomised step.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Flag {
    Coords,
    Conic,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// p<n>:d=<d>, curve:d=<d>, toric:<x,y,…>;<x,y,…>;…, or custom:<file>.
    #[arg(long)]
    model: Option<String>,
    /// lex, deglex, or weight:<w1,…,wn>.
    #[arg(long, default_value = "lex")]
    order: String,
    #[arg(long, value_enum, default_value_t = Flag::Coords)]
    flag: Flag,
}

#[derive(Subcommand)]
enum Command {
    /// Δ_k along a list of levels, with the inclusion report.
    Body {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<u32>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Exact vol(Δ_k) and n!·vol against (L^n).
    Volume {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Largest t with t·Σ inside the body.
    Seshadri {
        #[arg(long)]
        polytope: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Membership of points z in an Okounkov domain or an ellipsoid.
    Domain {
        #[arg(long)]
        polytope: Option<PathBuf>,
        /// Ellipsoid weights a_1,…,a_n instead of a body.
        #[arg(long, value_delimiter = ',')]
        ellipsoid: Option<Vec<String>>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Complex point as `re,im;re,im;…` with rational entries.
        #[arg(long, required = true)]
        point: Vec<String>,
    },
    /// Moment maps, symplectic volumes and capped potentials.
    #[command(subcommand)]
    Moment(MomentCommand),
    /// τ-degenerations of a distinguished basis and the gluing certificate.
    #[command(subcommand)]
    Degenerate(DegenerateCommand),
    /// Runs the full property suite.
    Verify {
        /// Certify the conic flag on a 16-point grid instead of 64.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand)]
enum MomentCommand {
    /// Samples the moment map on [−R, R]^n and measures how well it fills Conv(A).
    Image {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 40.0)]
        radius: f64,
        #[arg(long, default_value_t = 40)]
        grid: usize,
        /// CSV of samples, or SVG (n = 2) when the name ends in `.svg`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ∫ det Hess u_A over all of ℝ^n against vol(Conv A).
    Volume {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_delimiter = ',')]
        ellipsoid: Option<Vec<f64>>,
        /// Accepted relative deviation from the exact volume.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        /// Quadrature target relative error.
        #[arg(long, default_value_t = 1e-2)]
        rel_tol: f64,
        /// Quadrature target absolute error.
        #[arg(long, default_value_t = 1e-8)]
        abs_tol: f64,
    },
    /// Builds and checks a capped potential on a box of log coordinates.
    Cap {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        hi: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        margin: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 25)]
        grid: usize,
    },
}

#[derive(Subcommand)]
enum DegenerateCommand {
    /// Audits the degeneration error bound against Cτ.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Rational τ values; defaults to 2^-1 … 2^-10.
        #[arg(long, value_delimiter = ',')]
        tau: Option<Vec<String>>,
    },
    /// Produces the gluing certificate.
    Certify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 0.8)]
        u_shrink: f64,
        #[arg(long, default_value_t = 0.95)]
        k_shrink: f64,
        /// Starting τ for the search.
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Violation(String),
    Input(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numeric(_) => Failure::Numeric(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<String, Failure>;

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

fn parse_rational(s: &str) -> Result<Q, Failure> {
    parse_q(s.trim()).map_err(|e| input(format!("bad rational `{s}`: {e}")))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, contents)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| input(format!("{}: {e}", path.display())))
}

fn parse_model(spec: &str, flag: Flag) -> Result<ModelSpec, Failure> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| input(format!("model `{spec}` lacks `:`")))?;
    let degree = |rest: &str| {
        rest.strip_prefix("d=").and_then(|d| d.parse::<u32>().ok()).ok_or_else(|| input(format!("expected d=<degree>, got `{rest}`")))
    };
    let model = match kind {
        "curve" => ModelSpec::curve(degree(rest)?)?,
        "toric" => {
            let vertices = rest
                .split(';')
                .map(|v| v.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            ModelSpec::toric(RatPolytope::convex_hull(&vertices)?)?
        }
        "custom" => ModelSpec::new(ModelFamily::Custom(parse_section_spaces(&read(Path::new(rest))?)?))?,
        p if p.starts_with('p') => {
            let n = p[1..].parse::<usize>().map_err(|_| input(format!("bad projective space `{p}`")))?;
            ModelSpec::projective_space(n, degree(rest)?)?
        }
        _ => return Err(input(format!("unknown model family `{kind}`"))),
    };
    Ok(match flag {
        Flag::Coords => model,
        Flag::Conic => model.with_flag(CoordinateChange::conic())?,
    })
}

fn parse_order(s: &str) -> Result<OrderSpec, Failure> {
    match s {
        "lex" => Ok(OrderSpec::Lex),
        "deglex" => Ok(OrderSpec::DegLex),
        w => {
            let list = w.strip_prefix("weight:").ok_or_else(|| input(format!("unknown order `{w}`")))?;
            let w = list.split(',').map(|x| x.trim().parse::<u64>()).collect::<Result<Vec<_>, _>>().map_err(|e| input(format!("bad weight `{list}`: {e}")))?;
            Ok(OrderSpec::weight(w)?)
        }
    }
}

impl ModelArgs {
    fn build(&self) -> Result<(ModelSpec, OrderSpec), Failure> {
        let spec = self.model.as_deref().ok_or_else(|| input("--model is required"))?;
        Ok((parse_model(spec, self.flag)?, parse_order(&self.order)?))
    }

    fn basis(&self, k: u32) -> Result<(ModelSpec, LeadingSet), Failure> {
        let (m, order) = self.build()?;
        let a = eliminate(&order, &m.sections(k)?)?;
        Ok((m, a))
    }
}

fn subscript(k: u32) -> String {
    k.to_string().chars().map(|c| char::from_u32(0x2080 + c.to_digit(10).expect("digit")).expect("subscript digit")).collect()
}

fn point_text(v: &[Q]) -> String {
    format!("({})", v.iter().map(Q::to_string).collect::<Vec<_>>().join(", "))
}

fn body(model: &ModelArgs, levels: &[u32], out: &Path) -> Outcome {
    let mut levels = levels.to_vec();
    if levels.is_empty() || levels.contains(&0) {
        return Err(input("levels must be positive"));
    }
    levels.sort_unstable();
    levels.dedup();
    let (m, order) = model.build()?;
    let approx = BodyApprox::build(&m, &order, &levels)?;
    fs::create_dir_all(out).map_err(|e| input(format!("{}: {e}", out.display())))?;
    let mut report = String::new();
    for (k, a, p) in approx.levels() {
        let path = out.join(format!("delta_{k}.poly"));
        write_atomic(&path, &write_polytope(p))?;
        let _ = writeln!(report, "Δ{}: |A|={}, {} vertices, vol={} -> {}", subscript(k), a.len(), p.vertices().len(), p.volume(), path.display());
        if m.nvars() != 2 {
            write_atomic(&out.join(format!("delta_{k}.csv")), &polytope_csv(p))?;
        }
    }
    if m.nvars() == 2 {
        let mut drawn: Vec<(String, &RatPolytope)> = approx.levels().map(|(k, _, p)| (format!("Δ{}", subscript(k)), p)).collect();
        drawn.reverse();
        write_atomic(&out.join("delta.svg"), &render_svg(&drawn, &[])?)?;
    }
    let bodies: Vec<(u32, &RatPolytope)> = approx.levels().map(|(k, _, p)| (k, p)).collect();
    let chain = bodies.iter().map(|(k, _)| format!("Δ{}", subscript(*k))).collect::<Vec<_>>().join(" ⊆ ");
    let gaps: Vec<String> = bodies
        .windows(2)
        .filter(|w| !w[1].1.contains_polytope(w[0].1))
        .map(|w| format!("Δ{} ⊄ Δ{}", subscript(w[0].0), subscript(w[1].0)))
        .collect();
    if gaps.is_empty() {
        let _ = writeln!(report, "{chain}: OK");
    } else {
        let _ = writeln!(report, "{chain}: not nested ({})", gaps.join(", "));
    }
    let broken: Vec<String> = approx
        .inclusions()
        .into_iter()
        .filter(|i| !i.holds)
        .map(|i| format!("Δ{} ⊄ Δ{}", subscript(i.k), subscript(i.m)))
        .collect();
    if broken.is_empty() {
        Ok(report)
    } else {
        Err(Failure::Violation(format!("{report}divisibility inclusions fail: {}", broken.join(", "))))
    }
}

fn volume(model: &ModelArgs, k: u32) -> Outcome {
    let (m, order) = model.build()?;
    let p = delta_k(&eliminate(&order, &m.sections(k)?)?)?;
    let n = p.dim();
    let vol = p.volume();
    let scaled = factorial(n) * &vol;
    let body = if n == 1 {
        format!("Δ=[{}]", p.vertices().iter().map(|v| v[0].to_string()).collect::<Vec<_>>().join(","))
    } else {
        format!("Δ{}={}", subscript(k), p.vertices().iter().map(|v| point_text(v)).collect::<Vec<_>>().join(" "))
    };
    let target = if n == 1 { "deg L".to_string() } else { format!("(L^{n})") };
    let head = format!("{body}, vol={vol}, {n}!·vol={scaled}");
    match m.self_intersection() {
        Some(l) if scaled == l => Ok(format!("{head}={target}\n")),
        Some(l) if scaled < l => Ok(format!("{head}<{target}={l}\n")),
        Some(l) => Err(Failure::Violation(format!("{head}>{target}={l}"))),
        None => Ok(format!("{head}, {target} unknown\n")),
    }
}

fn body_from(polytope: &Option<PathBuf>, model: &ModelArgs, k: u32) -> Result<RatPolytope, Failure> {
    match polytope {
        Some(path) => Ok(parse_polytope(&read(path)?)?),
        None => {
            let (_, a) = model.basis(k)?;
            Ok(delta_k(&a)?)
        }
    }
}

fn parse_point(s: &str) -> Result<Vec<(Q, Q)>, Failure> {
    s.split(';')
        .map(|c| {
            let (re, im) = c.split_once(',').ok_or_else(|| input(format!("coordinate `{c}` must be `re,im`")))?;
            Ok((parse_rational(re)?, parse_rational(im)?))
        })
        .collect()
}

fn domain(polytope: &Option<PathBuf>, ellipsoid: &Option<Vec<String>>, model: &ModelArgs, k: u32, points: &[String]) -> Outcome {
    let mut out = String::new();
    let weights = ellipsoid.as_ref().map(|w| w.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()).transpose()?;
    let p = if weights.is_none() { Some(body_from(polytope, model, k)?) } else { None };
    for s in points {
        let z = parse_point(s)?;
        let inside = match (&weights, &p) {
            (Some(a), _) => ellipsoid_domain(a, &z)?,
            (None, Some(p)) => domain_membership(p, &z)?,
            (None, None) => unreachable!("either weights or a body"),
        };
        let _ = writeln!(out, "z={s}: {}", if inside { "inside" } else { "outside" });
    }
    Ok(out)
}

fn moment_image(model: &ModelArgs, k: u32, radius: f64, grid: usize, out: &Option<PathBuf>) -> Outcome {
    let (_, a) = model.basis(k)?;
    let mm = MomentModel::new(a.exponents())?;
    let n = mm.dim();
    let mut report = String::new();
    if n <= 2 {
        let d = hausdorff_to_hull(&mm, radius, 20_000, 60)?;
        let _ = writeln!(report, "Hausdorff distance of μ([−{radius}, {radius}]^{n}) to Conv(A): {d:.3e}");
    }
    if let Some(path) = out {
        let lo = vec![-radius; n];
        let hi = vec![radius; n];
        let samples: Vec<(Vec<f64>, Vec<f64>)> = grid_points(&lo, &hi, grid.max(2)).map(|x| {
            let mu = mm.moment_map(&x);
            (x, mu)
        }).collect();
        let text = if path.extension().is_some_and(|e| e == "svg") {
            let hull = mm.hull()?;
            let dots: Vec<(f64, f64)> = samples.iter().map(|(_, mu)| (mu[0], mu.get(1).copied().unwrap_or(0.0))).collect();
            render_svg(&[("Conv(A)".into(), &hull)], &dots)?
        } else {
            let mut csv = (1..=n).map(|i| format!("x{i}")).chain((1..=n).map(|i| format!("mu{i}"))).collect::<Vec<_>>().join(",");
            csv.push('\n');
            for (x, mu) in &samples {
                let row: Vec<String> = x.iter().chain(mu).map(|v| format!("{v:.12e}")).collect();
                csv.push_str(&row.join(","));
                csv.push('\n');
            }
            csv
        };
        write_atomic(path, &text)?;
        let _ = writeln!(report, "{} samples -> {}", samples.len(), path.display());
    }
    Ok(report)
}

fn relative_check(label: &str, value: f64, error: f64, exact: f64, tol: f64) -> Outcome {
    let rel = (value - exact).abs() / exact;
    let line = format!("{label}: quadrature {value:.6} (±{error:.1e}), exact {exact:.6}, relative error {rel:.2e}\n");
    if rel <= tol {
        Ok(line)
    } else {
        Err(Failure::Numeric(format!("{line}tolerance {tol:.1e} not met")))
    }
}

fn moment_volume(model: &ModelArgs, k: u32, ellipsoid: &Option<Vec<f64>>, tol: f64, rel_tol: f64, abs_tol: f64) -> Outcome {
    if !(tol > 0.0 && rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(input("tolerances must be positive"));
    }
    let opts = QuadratureOptions { rel_tol, abs_tol, ..Default::default() };
    if let Some(a) = ellipsoid {
        let e = ellipsoid_volume(a, &opts)?;
        return relative_check("∫_E ω^n", e.value, e.error, a.iter().product(), tol);
    }
    let (_, basis) = model.basis(k)?;
    let mm = MomentModel::new(basis.exponents())?;
    let (lo, hi) = whole_space(mm.dim());
    let e = mm.symplectic_volume(&lo, &hi, &opts)?;
    let exact = mm.hull()?.volume();
    let mut out = relative_check("∫ det Hess u_A", e.value, e.error, to_f64(&exact), tol)?;
    let _ = writeln!(out, "vol(Conv A)={exact}, {}!·vol={}", mm.dim(), factorial(mm.dim()) * &exact);
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn moment_cap(model: &ModelArgs, k: u32, lo: &[f64], hi: &[f64], margin: f64, delta: f64, grid: usize) -> Outcome {
    let (_, basis) = model.basis(k)?;
    let mm = MomentModel::new(basis.exponents())?;
    let field = capped_potential(&mm, lo, hi, margin, delta)?;
    let r = field.verify(grid);
    let line = format!(
        "capped potential: shift {:.6}, {} grid points, max |φ′ − |z|²| on U {:.2e}, window {:.3}, max g {:.3}, min eigenvalue {:.3e}\n",
        field.shift(),
        r.grid_points,
        r.max_deviation_on_u,
        r.window,
        r.max_g,
        r.min_eigenvalue
    );
    if r.passes() {
        Ok(line)
    } else {
        Err(Failure::Violation(line))
    }
}

fn degenerate_check(model: &ModelArgs, k: u32, taus: &Option<Vec<String>>) -> Outcome {
    let (_, a) = model.basis(k)?;
    let taus: Vec<Q> = match taus {
        Some(t) => t.iter().map(|s| parse_rational(s)).collect::<Result<_, _>>()?,
        None => (1..=10).map(|j| Q::one() / q(1 << j)).collect(),
    };
    let first = taus.first().ok_or_else(|| input("no τ given"))?;
    let base = DegenerationRun::with_separating_weight(a, first.clone(), 1.0)?;
    let c = base.error_constant();
    let mut out = format!("γ={:?}, C={c:.6}\n", base.gamma());
    let mut ok = true;
    for t in &taus {
        let run = base.with_tau(t.clone())?;
        let err = run.degeneration_error();
        let bound = c * to_f64(t);
        let holds = err <= bound * (1.0 + 1e-12);
        ok &= holds;
        let _ = writeln!(out, "τ={t}: error={err:.6e}, Cτ={bound:.6e}: {}", if holds { "OK" } else { "FAIL" });
    }
    if ok {
        Ok(out)
    } else {
        Err(Failure::Violation(out))
    }
}

#[allow(clippy::too_many_arguments)]
fn degenerate_certify(model: &ModelArgs, k: u32, delta: f64, grid: usize, u_shrink: f64, k_shrink: f64, tau: &Option<String>, out: &Option<PathBuf>) -> Outcome {
    let (_, a) = model.basis(k)?;
    let gamma = separating_weight(a.order(), a.exponents())?;
    let mm = MomentModel::new(a.exponents())?;
    let u = shrink_box(&mm, u_shrink)?;
    let kb = shrink_box(&mm, k_shrink)?;
    let tau_start = tau.as_deref().map(parse_rational).transpose()?;
    let cert = gluing_certificate(&a, &gamma, &u, &kb, &GluingOptions { delta, per_axis: grid, tau_start })?;
    let text = format!("{cert}\n");
    if let Some(path) = out {
        write_atomic(path, &text)?;
    }
    if cert.sign_stable() {
        Ok(text)
    } else {
        Err(Failure::Violation(format!("{text}margin signs change on the doubled grid")))
    }
}

fn verify(seed: u64, quick: bool) -> Outcome {
    let checks = evaluate_all(&SuiteOptions { seed, full_certificate: !quick });
    let mut out = String::new();
    for c in &checks {
        let _ = writeln!(out, "{c}");
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "{passed}/{} checks passed", checks.len());
    if passed == checks.len() {
        Ok(out)
    } else {
        Err(Failure::Violation(out))
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Body { model, k, out } => body(model, k, out),
        Command::Volume { model, k } => volume(model, *k),
        Command::Seshadri { polytope, model, k } => Ok(format!("t*={}\n", seshadri_param(&body_from(polytope, model, *k)?)?)),
        Command::Domain { polytope, ellipsoid, model, k, point } => domain(polytope, ellipsoid, model, *k, point),
        Command::Moment(MomentCommand::Image { model, k, radius, grid, out }) => moment_image(model, *k, *radius, *grid, out),
        Command::Moment(MomentCommand::Volume { model, k, ellipsoid, tol, rel_tol, abs_tol }) => {
            moment_volume(model, *k, ellipsoid, *tol, *rel_tol, *abs_tol)
        }
        Command::Moment(MomentCommand::Cap { model, k, lo, hi, margin, delta, grid }) => {
            moment_cap(model, *k, lo, hi, *margin, *delta, *grid)
        }
        Command::Degenerate(DegenerateCommand::Check { model, k, tau }) => degenerate_check(model, *k, tau),
        Command::Degenerate(DegenerateCommand::Certify { model, k, delta, grid, u_shrink, k_shrink, tau, out }) => {
            degenerate_certify(model, *k, *delta, *grid, *u_shrink, *k_shrink, tau, out)
        }
        Command::Verify { quick } => verify(cli.seed, *quick),
    }
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("OKLAB_THREADS") {
        let n = v.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| input(format!("OKLAB_THREADS=`{v}` is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| input(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| dispatch(&cli)) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Violation(msg)) => {
            print!("{msg}");
            if !msg.ends_with('\n') {
                println!();
            }
            eprintln!("property violation");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::ToPrimitive;

    #[test]
    fn model_specs_parse() {
        assert!(matches!(parse_model("p2:d=2", Flag::Coords).unwrap().family(), ModelFamily::ProjectiveSpace { n: 2, d: 2 }));
        assert_eq!(parse_model("curve:d=5", Flag::Coords).unwrap().nvars(), 1);
        assert_eq!(parse_model("toric:0,0;2,0;0,1;2,1", Flag::Coords).unwrap().nvars(), 2);
        assert!(parse_model("p2:d=2", Flag::Conic).unwrap().flag().is_some());
        for bad in ["p2", "p2:d=x", "q2:d=1", "toric:0,0;1", "curve:d=0", "p3:d=1"] {
            let flag = if bad == "p3:d=1" { Flag::Conic } else { Flag::Coords };
            assert!(matches!(parse_model(bad, flag), Err(Failure::Input(_))), "{bad}");
        }
    }

    #[test]
    fn orders_parse() {
        assert_eq!(parse_order("deglex").ok(), Some(OrderSpec::DegLex));
        assert_eq!(parse_order("weight:1,2").ok(), Some(OrderSpec::Weight(vec![1, 2])));
        assert!(parse_order("weight:0,1").is_err());
        assert!(parse_order("revlex").is_err());
    }

    #[test]
    fn subscripts() {
        assert_eq!(subscript(12), "₁₂");
    }

    #[test]
    fn points_parse() {
        let z = parse_point("1/2,0;0,-1").unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z[1].1, q(-1));
        assert!(parse_point("1/2").is_err());
        assert_eq!(z[0].0.to_f64(), Some(0.5));
    }
}
