//! SVG pictures of a scattering diagram and of broken lines, laid out like
//! the usual hand-drawn figures: shaded chambers, black fan rays, red walls,
//! and each broken line in its own color with bend points and the exponent of
//! its final monomial.

use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::lattice_fan::{LatticePoint, RatPoint};
use crate::notation::format_class;
use crate::scattering::{ScatteringDiagram, Support};
use crate::theta::BrokenLine;

const PALETTE: [&str; 6] = ["#7b2fbe", "#e6a800", "#1f5fd6", "#2a9d3a", "#c2185b", "#00838f"];
const SHADES: [&str; 2] = ["#dce6f7", "#eef3fb"];

#[derive(Clone, Debug)]
pub struct SvgOptions {
    /// Half-width of the drawn square in lattice units; `None` fits the
    /// broken lines.
    pub radius: Option<f64>,
    /// Width and height in pixels.
    pub size: u32,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { radius: None, size: 480 }
    }
}

fn f(x: &crate::Q) -> f64 {
    x.to_f64().expect("finite rational")
}

fn pt(p: &RatPoint) -> (f64, f64) {
    (f(&p.x), f(&p.y))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Canvas {
    out: String,
    scale: f64,
    half: f64,
}

impl Canvas {
    /// Screen coordinates; the y axis points up in the picture.
    fn xy(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (self.half + x * self.scale, self.half - y * self.scale)
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let (a, b) = (self.xy(a), self.xy(b));
        let _ = writeln!(self.out, r#"  <line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#, a.0, a.1, b.0, b.1);
    }

    fn text(&mut self, at: (f64, f64), s: &str, style: &str) {
        let p = self.xy(at);
        let _ = writeln!(self.out, r#"  <text x="{:.2}" y="{:.2}" {style}>{}</text>"#, p.0, p.1, escape(s));
    }
}

fn unit(v: &LatticePoint) -> (f64, f64) {
    let (x, y) = (v.x as f64, v.y as f64);
    let n = (x * x + y * y).sqrt();
    (x / n, y / n)
}

/// Renders `diagram` with `lines` drawn on top.
pub fn render(diagram: &ScatteringDiagram, lines: &[BrokenLine], opts: &SvgOptions) -> String {
    let pair = diagram.pair();
    let fan = pair.fan();
    let radius = opts.radius.unwrap_or_else(|| {
        let far = lines
            .iter()
            .flat_map(|l| l.segments.iter().map(|s| pt(&s.end)))
            .map(|(x, y)| x.abs().max(y.abs()))
            .fold(1.0, f64::max);
        (far * 2.0).max(3.0)
    });
    let size = opts.size as f64;
    let mut c = Canvas { out: String::new(), scale: size / (2.0 * radius), half: size / 2.0 };
    let _ = writeln!(
        c.out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    c.out.push_str("  <defs>\n");
    for (k, color) in PALETTE.iter().enumerate() {
        let _ = writeln!(
            c.out,
            r#"    <marker id="arrow{k}" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{color}"/></marker>"#
        );
    }
    c.out.push_str("  </defs>\n");
    let _ = writeln!(c.out, r#"  <rect x="0" y="0" width="{0}" height="{0}" fill="white"/>"#, opts.size);

    // Chambers: a large triangle per maximal cone, clipped by the viewport.
    let far = radius * 8.0;
    for i in 0..fan.n_rays() {
        let (a, b) = fan.cone_rays(i);
        let (ua, ub) = (unit(&fan.ray(a)), unit(&fan.ray(b)));
        let pts = [(0.0, 0.0), (ua.0 * far, ua.1 * far), (ub.0 * far, ub.1 * far)];
        let s: Vec<String> = pts.iter().map(|&p| c.xy(p)).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(c.out, r#"  <polygon points="{}" fill="{}"/>"#, s.join(" "), SHADES[i % 2]);
    }

    for (i, r) in fan.rays().iter().enumerate() {
        let u = unit(r);
        c.line((0.0, 0.0), (u.0 * far, u.1 * far), r#"stroke="black" stroke-width="1.5""#);
        let at = (u.0 * radius * 0.88, u.1 * radius * 0.88 + 0.04 * radius);
        c.text(at, &pair.ray_names()[i], r#"font-size="14" font-family="serif""#);
    }

    for w in diagram.walls() {
        let u = unit(&w.direction);
        let from = match w.support {
            Support::Line => (-u.0 * far, -u.1 * far),
            Support::Ray => (0.0, 0.0),
        };
        c.line(from, (u.0 * far, u.1 * far), r##"stroke="#d62728" stroke-width="1.5""##);
        let terms: Vec<String> = w
            .function
            .terms
            .iter()
            .map(|((cls, m), k)| {
                let k = if *k == 1 { String::new() } else { k.to_string() };
                format!("{k}z^{{{}}}x^{}", format_class(pair, cls), m)
            })
            .collect();
        let label = format!("1+{}", terms.join("+"));
        let at = (u.0 * radius * 0.6 - u.1 * 0.05 * radius, u.1 * radius * 0.6 + u.0 * 0.05 * radius);
        c.text(at, &label, r##"font-size="11" fill="#d62728" font-family="serif""##);
    }

    for (k, l) in lines.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        for (j, s) in l.segments.iter().enumerate() {
            let end = pt(&s.end);
            // Travel direction is minus the exponent.
            let dir = (-(s.monomial.exponent.x as f64), -(s.monomial.exponent.y as f64));
            let start = match &s.start {
                Some(p) => pt(p),
                None => (end.0 - dir.0 * far, end.1 - dir.1 * far),
            };
            let last = j + 1 == l.segments.len();
            let marker = if last { format!(r#" marker-end="url(#arrow{})""#, k % PALETTE.len()) } else { String::new() };
            c.line(start, end, &format!(r#"stroke="{color}" stroke-width="2"{marker}"#));
            if !last {
                let p = c.xy(end);
                let _ = writeln!(c.out, r#"  <circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, p.0, p.1);
            }
        }
        let e = pt(&l.endpoint);
        let label = format!("{} ({})", l.final_monomial().exponent, format_class(pair, &l.final_monomial().class));
        let at = (e.0 + 0.03 * radius, e.1 - (k as f64 + 1.0) * 0.07 * radius);
        c.text(at, &label, &format!(r#"font-size="12" fill="{color}" font-family="serif""#));
    }
    let p = c.xy((0.0, 0.0));
    let _ = writeln!(c.out, r#"  <circle cx="{:.2}" cy="{:.2}" r="2" fill="black"/>"#, p.0, p.1);
    c.out.push_str("</svg>\n");
    c.out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::LogCYSurfacePair;
    use crate::theta::{enumerate_broken_lines, generic_point_in_cone};

    #[test]
    fn figure_one_layout() {
        let pair = LogCYSurfacePair::preset("paper-example").unwrap();
        let trunc = pair.truncation(9);
        let d = ScatteringDiagram::initial(&pair).complete(&trunc).unwrap();
        let qp = generic_point_in_cone(&d, 1, 0);
        let p = pair.parse_point("3D2+2D3").unwrap();
        let lines = enumerate_broken_lines(&d, p, &qp, &trunc).unwrap();
        let svg = render(&d, &lines, &SvgOptions::default());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<line").count(), 3 + 1 + lines.iter().map(|l| l.segments.len()).sum::<usize>());
        for k in 0..lines.len() {
            assert!(svg.contains(&format!("id=\"arrow{k}\"")));
        }
        assert!(svg.contains("(3,2) (3L)") && svg.contains("(2,1) (3L-E)"));
    }
}
