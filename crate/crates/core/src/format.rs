//! Line-oriented text formats.
//!
//! Section-space file: a header `n=<dim> k=<level>` followed by one section
//! per line, written as `;`-separated terms `e1,…,en:num/den` in lex order.
//! Several spaces may follow each other in one file.
//!
//! Polytope file: a header `n=<dim>`, one vertex per line as space-separated
//! rationals, then optional `facet g1 … gn c` lines (meaning `g·x ≤ c`) and
//! `equality g1 … gn c` lines. Facet lines are checked against the hull of
//! the vertices.

use std::fmt::Write as _;

use crate::bodies::{Facet, RatPolytope};
use crate::error::{Error, Result};
use crate::order::Exponent;
use crate::rational::{fmt_q, parse_q_at, to_f64, Q};
use crate::sections::{PolySection, SectionSpace};

fn parse_header(line: &str, lineno: usize, keys: &[&str]) -> Result<Vec<u64>> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != keys.len() {
        return Err(Error::Parse { line: lineno, msg: format!("expected header `{}`", keys.iter().map(|k| format!("{k}=…")).collect::<Vec<_>>().join(" ")) });
    }
    fields
        .iter()
        .zip(keys)
        .map(|(f, k)| {
            f.strip_prefix(k)
                .and_then(|r| r.strip_prefix('='))
                .and_then(|v| v.parse::<u64>().ok())
                .ok_or_else(|| Error::Parse { line: lineno, msg: format!("bad header field `{f}`, expected `{k}=<integer>`") })
        })
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn write_section_space(space: &SectionSpace) -> String {
    let mut out = format!("n={} k={}\n", space.nvars(), space.level());
    for s in space.basis() {
        let terms: Vec<String> = s
            .terms()
            .map(|(e, c)| {
                let coords: Vec<String> = e.coords().iter().map(u32::to_string).collect();
                format!("{}:{}", coords.join(","), fmt_q(c))
            })
            .collect();
        out.push_str(&terms.join(";"));
        out.push('\n');
    }
    out
}

fn parse_section(line: &str, lineno: usize, n: usize) -> Result<PolySection> {
    let mut terms = Vec::new();
    for t in line.split(';') {
        let (exp, coeff) =
            t.split_once(':').ok_or_else(|| Error::Parse { line: lineno, msg: format!("term `{t}` lacks `:`") })?;
        let coords = exp
            .split(',')
            .map(|c| c.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse { line: lineno, msg: format!("bad exponent `{exp}`: {e}") })?;
        if coords.len() != n {
            return Err(Error::Parse { line: lineno, msg: format!("exponent `{exp}` has {} entries, expected {n}", coords.len()) });
        }
        terms.push((Exponent::new(coords), parse_q_at(coeff, lineno)?));
    }
    let s = PolySection::from_terms(n, terms)?;
    if s.is_zero() {
        return Err(Error::Parse { line: lineno, msg: "section is zero".into() });
    }
    Ok(s)
}

/// Parses one or more section spaces.
pub fn parse_section_spaces(text: &str) -> Result<Vec<SectionSpace>> {
    let mut spaces = Vec::new();
    let mut current: Option<(usize, u32, Vec<PolySection>, usize)> = None;
    let finish = |cur: Option<(usize, u32, Vec<PolySection>, usize)>, spaces: &mut Vec<SectionSpace>| -> Result<()> {
        if let Some((n, k, basis, line)) = cur {
            if basis.is_empty() {
                return Err(Error::Parse { line, msg: "section space without sections".into() });
            }
            spaces.push(SectionSpace::new(k, n, basis)?);
        }
        Ok(())
    };
    for (lineno, line) in content_lines(text) {
        if line.starts_with("n=") {
            finish(current.take(), &mut spaces)?;
            let h = parse_header(line, lineno, &["n", "k"])?;
            if h[0] == 0 || h[1] == 0 {
                return Err(Error::Parse { line: lineno, msg: "n and k must be positive".into() });
            }
            current = Some((h[0] as usize, h[1] as u32, Vec::new(), lineno));
        } else {
            let Some((n, _, basis, _)) = current.as_mut() else {
                return Err(Error::Parse { line: lineno, msg: "section before the `n=… k=…` header".into() });
            };
            basis.push(parse_section(line, lineno, *n)?);
        }
    }
    finish(current, &mut spaces)?;
    if spaces.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no section space found".into() });
    }
    Ok(spaces)
}

pub fn parse_section_space(text: &str) -> Result<SectionSpace> {
    let mut v = parse_section_spaces(text)?;
    if v.len() != 1 {
        return Err(Error::Parse { line: 0, msg: format!("expected one section space, found {}", v.len()) });
    }
    Ok(v.remove(0))
}

fn join_q(xs: &[Q]) -> String {
    xs.iter().map(fmt_q).collect::<Vec<_>>().join(" ")
}

pub fn write_polytope(p: &RatPolytope) -> String {
    let mut out = format!("n={}\n", p.dim());
    for v in p.vertices() {
        let _ = writeln!(out, "{}", join_q(v));
    }
    for (kw, list) in [("facet", p.facets()), ("equality", p.equalities())] {
        for f in list {
            let _ = writeln!(out, "{kw} {} {}", join_q(&f.normal), fmt_q(&f.offset));
        }
    }
    out
}

pub fn parse_polytope(text: &str) -> Result<RatPolytope> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "empty polytope file".into() })?;
    let n = parse_header(header, hl, &["n"])?[0] as usize;
    if n == 0 {
        return Err(Error::Parse { line: hl, msg: "n must be positive".into() });
    }
    let mut vertices = Vec::new();
    let mut facets = Vec::new();
    let mut equalities = Vec::new();
    for (lineno, line) in lines {
        let mut fields: Vec<&str> = line.split_whitespace().collect();
        let target = match fields[0] {
            "facet" => Some(&mut facets),
            "equality" => Some(&mut equalities),
            _ => None,
        };
        let expect = if target.is_some() { n + 2 } else { n };
        if fields.len() != expect {
            return Err(Error::Parse { line: lineno, msg: format!("expected {expect} fields, found {}", fields.len()) });
        }
        match target {
            Some(list) => {
                fields.remove(0);
                let vals = fields.iter().map(|f| parse_q_at(f, lineno)).collect::<Result<Vec<_>>>()?;
                list.push(Facet { normal: vals[..n].to_vec(), offset: vals[n].clone() });
            }
            None => vertices.push(fields.iter().map(|f| parse_q_at(f, lineno)).collect::<Result<Vec<_>>>()?),
        }
    }
    if vertices.is_empty() {
        return Err(Error::Parse { line: hl, msg: "polytope without vertices".into() });
    }
    let p = RatPolytope::convex_hull(&vertices)?;
    facets.sort();
    equalities.sort();
    if !facets.is_empty() && facets != p.facets() {
        return Err(Error::Parse { line: 0, msg: "facet block does not describe the hull of the vertices".into() });
    }
    if !equalities.is_empty() && equalities != p.equalities() {
        return Err(Error::Parse { line: 0, msg: "equality block does not describe the affine hull of the vertices".into() });
    }
    Ok(p)
}

/// Vertices and facets as CSV rows `kind,c1,…,cn,offset`.
pub fn polytope_csv(p: &RatPolytope) -> String {
    let n = p.dim();
    let mut out = String::from("kind");
    for i in 1..=n {
        let _ = write!(out, ",c{i}");
    }
    out.push_str(",offset\n");
    for v in p.vertices() {
        let _ = writeln!(out, "vertex,{},", v.iter().map(fmt_q).collect::<Vec<_>>().join(","));
    }
    for (kw, list) in [("facet", p.facets()), ("equality", p.equalities())] {
        for f in list {
            let _ = writeln!(out, "{kw},{},{}", f.normal.iter().map(fmt_q).collect::<Vec<_>>().join(","), fmt_q(&f.offset));
        }
    }
    out
}

/// Vertices of a planar polytope in counter-clockwise order.
fn planar_cycle(p: &RatPolytope) -> Vec<(f64, f64)> {
    let pts: Vec<(f64, f64)> = p.vertices().iter().map(|v| (to_f64(&v[0]), to_f64(&v[1]))).collect();
    let (cx, cy) = pts.iter().fold((0.0, 0.0), |a, v| (a.0 + v.0, a.1 + v.1));
    let (cx, cy) = (cx / pts.len() as f64, cy / pts.len() as f64);
    let mut pts = pts;
    pts.sort_by(|a, b| (a.1 - cy).atan2(a.0 - cx).total_cmp(&(b.1 - cy).atan2(b.0 - cx)));
    pts
}

/// SVG drawing of planar bodies, outermost first. Extra points (for
/// example moment-map samples) are drawn as dots.
pub fn render_svg(bodies: &[(String, &RatPolytope)], points: &[(f64, f64)]) -> Result<String> {
    if let Some((_, p)) = bodies.iter().find(|(_, p)| p.dim() != 2) {
        return Err(Error::UnsupportedDimension(p.dim()));
    }
    let (w, h, pad) = (480.0, 480.0, 40.0);
    let max = bodies
        .iter()
        .flat_map(|(_, p)| p.vertices().iter().flat_map(|v| v.iter().map(to_f64)))
        .chain(points.iter().flat_map(|p| [p.0, p.1]))
        .fold(1.0f64, f64::max);
    let s = (w - 2.0 * pad) / max;
    let tx = |x: f64| pad + x * s;
    let ty = |y: f64| h - pad - y * s;
    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g stroke="black" stroke-width="1"><line x1="{}" y1="{}" x2="{}" y2="{}"/><line x1="{}" y1="{}" x2="{}" y2="{}"/></g>"#,
        tx(0.0), ty(0.0), tx(max), ty(0.0), tx(0.0), ty(0.0), tx(0.0), ty(max)
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12">{max:.3}</text>"#, tx(max) - 10.0, ty(0.0) + 16.0);
    let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    for (i, (label, p)) in bodies.iter().enumerate() {
        let colour = palette[i % palette.len()];
        let cycle = planar_cycle(p);
        let path: Vec<String> = cycle.iter().map(|(x, y)| format!("{:.3},{:.3}", tx(*x), ty(*y))).collect();
        let _ = writeln!(
            out,
            r#"<polygon points="{}" fill="{colour}" fill-opacity="0.15" stroke="{colour}" stroke-width="2"><title>{label}</title></polygon>"#,
            path.join(" ")
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="12" fill="{colour}">{label}</text>"#, w - pad - 60.0, pad + 14.0 * i as f64);
    }
    for (x, y) in points {
        let _ = writeln!(out, r##"<circle cx="{:.3}" cy="{:.3}" r="1" fill="#333"/>"##, tx(*x), ty(*y));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qf, qvec};
    use crate::sections::{CoordinateChange, ModelSpec};

    #[test]
    fn section_space_round_trip_is_byte_stable() {
        let m = ModelSpec::projective_space(2, 2).unwrap().with_flag(CoordinateChange::conic()).unwrap();
        let space = m.sections(2).unwrap();
        let text = write_section_space(&space);
        let back = parse_section_space(&text).unwrap();
        assert_eq!(back, space);
        assert_eq!(write_section_space(&back), text);
    }

    #[test]
    fn section_space_examples_and_errors() {
        let s = parse_section_space("n=2 k=1\n# comment\n0,0:1\n1,0:1/2;0,1:-3/4\n").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(write_section_space(&s), "n=2 k=1\n0,0:1/1\n0,1:-3/4;1,0:1/2\n");
        for bad in ["0,0:1\n", "n=2 k=1\n0:1\n", "n=2 k=1\n0,0:1/0\n", "n=2 k=1\n0,0\n", "n=2 k=1\n1,0:1;1,0:-1\n", "n=2\n"] {
            assert!(matches!(parse_section_space(bad), Err(Error::Parse { .. })), "{bad:?}");
        }
        let two = parse_section_spaces("n=1 k=1\n0:1\n1:1\nn=1 k=2\n0:1\n").unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[1].level(), 2);
    }

    #[test]
    fn polytope_round_trip() {
        let p = RatPolytope::convex_hull(&[qvec(&[0, 0, 0]), qvec(&[1, 0, 0]), qvec(&[0, 1, 0]), qvec(&[0, 0, 4])]).unwrap();
        let text = write_polytope(&p);
        assert_eq!(parse_polytope(&text).unwrap(), p);
        let seg = RatPolytope::convex_hull(&[vec![qf(1, 2), q0()], vec![q0(), qf(1, 3)]]).unwrap();
        let text = write_polytope(&seg);
        assert!(text.contains("equality"));
        assert_eq!(parse_polytope(&text).unwrap(), seg);
        assert_eq!(parse_polytope("n=2\n0 0\n1 0\n0 1\n").unwrap().volume(), qf(1, 2));
    }

    fn q0() -> Q {
        crate::rational::q(0)
    }

    #[test]
    fn polytope_errors() {
        assert!(matches!(parse_polytope(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_polytope("n=2\n0 0 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_polytope("n=2\n0 0\n1 0\n0 1\nfacet 1 1 2\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_polytope("n=1\n-1\n"), Err(Error::NotInOrthant)));
    }

    #[test]
    fn svg_and_csv() {
        let p = RatPolytope::convex_hull(&[qvec(&[0, 0]), qvec(&[2, 0]), qvec(&[0, 2])]).unwrap();
        let svg = render_svg(&[("Δ_1".into(), &p)], &[(0.5, 0.5)]).unwrap();
        assert!(svg.starts_with("<svg") && svg.contains("<polygon") && svg.contains("<circle"));
        let csv = polytope_csv(&p);
        assert_eq!(csv.lines().next().unwrap(), "kind,c1,c2,offset");
        assert_eq!(csv.lines().filter(|l| l.starts_with("vertex")).count(), 3);
        let cube = RatPolytope::convex_hull(&[qvec(&[0, 0, 0]), qvec(&[1, 1, 1])]).unwrap();
        assert!(render_svg(&[("x".into(), &cube)], &[]).is_err());
    }
}
