//! The `mirage` command line.
//!
//! Exit codes: 0 when the command ran and any verdict it printed is positive,
//! 1 on a validation error (one line on stderr), 2 when a check computed a
//! negative verdict (a mismatch, an inconsistent diagram, an infeasible type).
//! `MIRAGE_MAX_DEG`, when set, is an upper bound on every `--deg`.

use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::lattice_fan::{ConeId, LatticePoint, RatPoint};
use crate::modify::{compare_structure_constants, Modification};
use crate::notation::{format_class, format_in_cone, format_point, format_rat_point, parse_class};
use crate::pair::LogCYSurfacePair;
use crate::scattering::ScatteringDiagram;
use crate::svg::{render, SvgOptions};
use crate::theta::{enumerate_broken_lines, generic_point_in_cone, theta_expansion, BrokenLine, MirrorAlgebra, Monomial};
use crate::troptype::TropicalType;
use crate::{Error, Result, Q};

pub const MAX_DEG_VAR: &str = "MIRAGE_MAX_DEG";

#[derive(Parser, Debug)]
#[command(name = "mirage", version, about = "Broken lines, theta functions and structure constants of log CY surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct PairArgs {
    /// Preset name (paper-example, p2, two-blowup) or path to a pair JSON file.
    #[arg(long, default_value = "paper-example")]
    pair: String,
    /// Truncation degree: classes with `A . H` above this are dropped.
    #[arg(long, default_value_t = 6)]
    deg: i64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Describe a pair, or export it as JSON.
    Pair {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compute the consistent scattering diagram up to the truncation.
    Scatter {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also verify consistency around a loop; exit 2 if it fails.
        #[arg(long)]
        check: bool,
    },
    /// Expand a theta function at a point by summing broken lines.
    Theta {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Maximal cone containing the endpoint, as two ray names `D1,D3`.
        #[arg(long, conflicts_with = "at")]
        chamber: Option<String>,
        /// Endpoint with rational coordinates `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// List each broken line with its bends.
        #[arg(long)]
        lines: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Multiply theta functions.
    Mult {
        #[command(flatten)]
        pair: PairArgs,
        /// At least two points of B(Z).
        #[arg(required = true, num_args = 2..)]
        factors: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare both bracketings of a triple product.
    AssocCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, num_args = 3, required = true)]
        tuple: Vec<String>,
        /// Output point; with --class compares a single coefficient.
        #[arg(long, requires = "class", allow_hyphen_values = true)]
        r: Option<String>,
        #[arg(long, requires = "r", allow_hyphen_values = true)]
        class: Option<String>,
    },
    /// Compare the theta_0 coefficient of an iterated product nested both ways.
    FrobeniusCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, num_args = 2.., required = true)]
        tuple: Vec<String>,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
    },
    /// Decide realizability of a tropical type by exact LP.
    Realize {
        /// Tropical type JSON file.
        file: String,
        #[arg(long, default_value = "paper-example")]
        pair: String,
        /// Also report the refinement index for the lattice refinement `RAY:k`.
        #[arg(long)]
        refine: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Compare N_{p,q,r}^A with the sum over lifts after a corner blowup.
    BlowupCompare {
        #[command(flatten)]
        pair: PairArgs,
        /// Maximal cone to blow up, as two ray names.
        #[arg(long)]
        cone: String,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        /// Truncation on the blown-up pair; defaults to 2 deg + 2.
        #[arg(long)]
        target_deg: Option<i64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Draw the scattering diagram, optionally with the broken lines of one theta function.
    RenderSvg {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, conflicts_with = "at")]
        chamber: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Half-width of the picture in lattice units.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 480)]
        size: u32,
        /// Write here instead of stdout.
        #[arg(short, long)]
        output: Option<String>,
    },
}

/// What a command produced: its output and whether its verdict is positive.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn done(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            // Keep clap's message but on a single line, without the usage block.
            let msg = e.to_string();
            let line: Vec<&str> = msg.lines().map(str::trim).take_while(|l| !l.starts_with("Usage:")).filter(|l| !l.is_empty()).collect();
            let _ = writeln!(err, "{}", line.join(" "));
            return 1;
        }
    };
    match execute(cli.command) {
        Ok(o) => {
            let _ = out.write_all(o.text.as_bytes());
            if o.ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

fn load_pair(src: &str) -> Result<LogCYSurfacePair> {
    if src.ends_with(".json") || Path::new(src).is_file() {
        LogCYSurfacePair::from_json(&std::fs::read_to_string(src)?)
    } else {
        LogCYSurfacePair::preset(src)
    }
}

/// The degree cap from the environment, if any.
fn max_deg_cap() -> Result<Option<i64>> {
    match std::env::var(MAX_DEG_VAR) {
        Err(_) => Ok(None),
        Ok(v) => v.trim().parse::<i64>().map(Some).map_err(|_| bad(format!("{MAX_DEG_VAR} is not an integer: {v:?}"))),
    }
}

fn check_deg(deg: i64) -> Result<i64> {
    if deg <= 0 {
        return Err(bad(format!("--deg must be positive, got {deg}")));
    }
    if let Some(cap) = max_deg_cap()? {
        if deg > cap {
            return Err(bad(format!("degree {deg} exceeds {MAX_DEG_VAR}={cap}")));
        }
    }
    Ok(deg)
}

fn setup(args: &PairArgs) -> Result<(LogCYSurfacePair, i64)> {
    let deg = check_deg(args.deg)?;
    Ok((load_pair(&args.pair)?, deg))
}

fn points(pair: &LogCYSurfacePair, ss: &[String]) -> Result<Vec<LatticePoint>> {
    ss.iter().map(|s| pair.parse_point(s)).collect()
}

/// `D1,D3` to the maximal cone they span.
fn cone_by_names(pair: &LogCYSurfacePair, s: &str) -> Result<usize> {
    let (a, b) = s.split_once(',').ok_or_else(|| bad(format!("expected two ray names like D1,D3, got {s:?}")))?;
    let idx = |n: &str| pair.ray_by_name(n.trim()).ok_or_else(|| bad(format!("unknown ray {:?}", n.trim())));
    match pair.cone_by_rays(idx(a)?, idx(b)?)? {
        ConeId::Cone(i) => Ok(i),
        _ => Err(bad(format!("{s} is not a maximal cone"))),
    }
}

fn parse_rat_point(s: &str) -> Result<RatPoint> {
    let (a, b) = s.split_once(',').ok_or_else(|| bad(format!("expected x,y, got {s:?}")))?;
    let r = |t: &str| t.trim().parse::<Q>().map_err(|_| bad(format!("bad rational {:?}", t.trim())));
    Ok(RatPoint::new(r(a)?, r(b)?))
}

/// The endpoint `Q` and the chamber it lies in.
fn endpoint(diagram: &ScatteringDiagram, chamber: Option<&str>, at: Option<&str>) -> Result<(RatPoint, usize)> {
    let pair = diagram.pair();
    match (chamber, at) {
        (_, Some(a)) => {
            let p = parse_rat_point(a)?;
            Ok((p.clone(), pair.fan().locate_max(&p)))
        }
        (Some(c), None) => {
            let i = cone_by_names(pair, c)?;
            Ok((generic_point_in_cone(diagram, i, 0), i))
        }
        (None, None) => Err(bad("give the endpoint with --chamber or --at")),
    }
}

/// `2 x^{-D1-D3} z^{2L-E}` with the exponent written in the chamber's generators.
fn format_monomial(pair: &LogCYSurfacePair, chamber: usize, m: &Monomial) -> String {
    let mut parts = Vec::new();
    if !m.exponent.is_zero() {
        parts.push(format!("x^{{{}}}", format_in_cone(pair, chamber, &m.exponent)));
    }
    if !m.class.is_zero() {
        parts.push(format!("z^{{{}}}", format_class(pair, &m.class)));
    }
    let body = parts.join(" ");
    match (m.coefficient, body.is_empty()) {
        (c, true) => c.to_string(),
        (1, false) => body,
        (-1, false) => format!("-{body}"),
        (c, false) => format!("{c} {body}"),
    }
}

fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ").replace("+ -", "- ")
}

fn theta_name(pair: &LogCYSurfacePair, p: &LatticePoint) -> String {
    format!("ϑ_{{{}}}", format_point(pair, p))
}

fn describe_line(pair: &LogCYSurfacePair, chamber: usize, l: &BrokenLine) -> String {
    let mut s = String::new();
    for seg in &l.segments {
        let from = seg.start.as_ref().map(format_rat_point).unwrap_or_else(|| "∞".into());
        s.push_str(&format!("    {from} -> {}  {}\n", format_rat_point(&seg.end), format_monomial(pair, chamber, &seg.monomial)));
    }
    s
}

fn execute(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Pair { pair, format } => {
            let pair = load_pair(&pair.pair)?;
            match format {
                Format::Json => Ok(Outcome::done(pair.to_json())),
                Format::Text => Ok(Outcome::done(describe_pair(&pair))),
                Format::Svg => Err(bad("pair has no svg output; use render-svg")),
            }
        }
        Command::Scatter { pair, format, check } => {
            let (pair, deg) = setup(&pair)?;
            let trunc = pair.truncation(deg);
            let d = ScatteringDiagram::initial(&pair).complete(&trunc)?;
            let mut text = match format {
                Format::Json => d.to_json(),
                Format::Svg => render(&d, &[], &SvgOptions::default()),
                Format::Text => describe_diagram(&d),
            };
            let mut ok = true;
            if check {
                let report = d.check_consistency(None, d.order());
                ok = report.consistent;
                if format == Format::Text {
                    match report.first_failure {
                        None => text.push_str(&format!("consistent through order {}\n", d.order())),
                        Some(f) => text.push_str(&format!(
                            "INCONSISTENT at order {}: missing {} z^{{{}}} x^{} on the ray through {}\n",
                            f.order,
                            f.coefficient,
                            format_class(&pair, &f.class),
                            f.exponent,
                            f.direction
                        )),
                    }
                }
            }
            Ok(Outcome { text, ok })
        }
        Command::Theta { pair, p, chamber, at, lines, format } => {
            let (pair, deg) = setup(&pair)?;
            let p = pair.parse_point(&p)?;
            let trunc = pair.truncation(deg);
            let d = ScatteringDiagram::initial(&pair).complete(&trunc)?;
            let (qp, cone) = endpoint(&d, chamber.as_deref(), at.as_deref())?;
            match format {
                Format::Json => {
                    let ms = theta_expansion(&d, p, &qp, &trunc)?;
                    Ok(Outcome::done(serde_json::to_string_pretty(&ms)? + "\n"))
                }
                Format::Svg => {
                    let ls = if p.is_zero() { vec![] } else { enumerate_broken_lines(&d, p, &qp, &trunc)? };
                    Ok(Outcome::done(render(&d, &ls, &SvgOptions::default())))
                }
                Format::Text => {
                    let ms = theta_expansion(&d, p, &qp, &trunc)?;
                    let terms = ms.iter().map(|m| format_monomial(&pair, cone, m)).collect();
                    let mut text = format!("{} = {}\n", theta_name(&pair, &p), join_terms(terms));
                    if lines && !p.is_zero() {
                        text.push_str(&format!("broken lines ending at {}:\n", format_rat_point(&qp)));
                        for (i, l) in enumerate_broken_lines(&d, p, &qp, &trunc)?.iter().enumerate() {
                            text.push_str(&format!("  line {} ({} bends)\n", i + 1, l.bends()));
                            text.push_str(&describe_line(&pair, cone, l));
                        }
                    }
                    Ok(Outcome::done(text))
                }
            }
        }
        Command::Mult { pair, factors, format } => {
            let (pair, deg) = setup(&pair)?;
            let ps = points(&pair, &factors)?;
            let alg = MirrorAlgebra::new(&pair, deg)?;
            match format {
                Format::Json if ps.len() == 2 => Ok(Outcome::done(alg.table_json(&ps)?)),
                Format::Json => Err(bad("json output lists structure constants of pairs; give two factors")),
                Format::Svg => Err(bad("mult has no svg output")),
                Format::Text => {
                    let prod = alg.product_left(&ps)?;
                    let lhs: Vec<String> = ps.iter().map(|p| theta_name(&pair, p)).collect();
                    Ok(Outcome::done(format!("{} = {}\n", lhs.join(" "), prod.display(&pair))))
                }
            }
        }
        Command::AssocCheck { pair, tuple, r, class } => {
            let (pair, deg) = setup(&pair)?;
            let ps = points(&pair, &tuple)?;
            let alg = MirrorAlgebra::new(&pair, deg)?;
            match (r, class) {
                (Some(r), Some(c)) => {
                    let r = pair.parse_point(&r)?;
                    let c = parse_class(&pair, &c)?;
                    let rep = alg.check_associativity(ps[0], ps[1], ps[2], r, &c)?;
                    let text = if rep.holds {
                        format!("OK {} = {}\n", rep.lhs, rep.rhs)
                    } else {
                        format!("FAIL {} != {}\n", rep.lhs, rep.rhs)
                    };
                    Ok(Outcome { text, ok: rep.holds })
                }
                _ => match alg.associativity_mismatch(ps[0], ps[1], ps[2])? {
                    None => Ok(Outcome::done(format!("OK associative through degree {deg}\n"))),
                    Some((r, c, l, rr)) => Ok(Outcome {
                        text: format!("FAIL at z^{{{}}} {}: {l} != {rr}\n", format_class(&pair, &c), theta_name(&pair, &r)),
                        ok: false,
                    }),
                },
            }
        }
        Command::FrobeniusCheck { pair, tuple, class } => {
            let (pair, deg) = setup(&pair)?;
            let ps = points(&pair, &tuple)?;
            let c = parse_class(&pair, &class)?;
            let alg = MirrorAlgebra::new(&pair, deg)?;
            let (l, r) = alg.iterated_theta0_coefficient(&ps, &c)?;
            let text = if l == r { format!("OK {l} = {r}\n") } else { format!("FAIL {l} != {r}\n") };
            Ok(Outcome { text, ok: l == r })
        }
        Command::Realize { file, pair, refine, format } => {
            let pair = load_pair(&pair)?;
            let t = TropicalType::from_json(&std::fs::read_to_string(&file)?)?;
            let res = t.realizability(pair.fan())?;
            let index = match &refine {
                None => None,
                Some(spec) => {
                    let (ray, k) = spec.split_once(':').ok_or_else(|| bad(format!("expected RAY:k, got {spec:?}")))?;
                    let ray = pair.ray_by_name(ray).ok_or_else(|| bad(format!("unknown ray {ray:?}")))?;
                    let k: u64 = k.parse().map_err(|_| bad(format!("bad refinement factor {k:?}")))?;
                    let refined = pair.fan().refine_ray_lattice(ray, k)?;
                    Some(t.refinement_index(pair.fan(), &refined)?)
                }
            };
            let text = match format {
                Format::Json => res.to_json(),
                Format::Svg => return Err(bad("realize has no svg output")),
                Format::Text => {
                    let mut s = format!("{}\n", res.status);
                    if let Some(dim) = res.dim_tau {
                        s.push_str(&format!("dim_tau {dim}\n"));
                    }
                    if let Some(w) = &res.witness {
                        for (i, p) in w.positions.iter().enumerate() {
                            s.push_str(&format!("  v{i} at {}\n", format_rat_point(p)));
                        }
                        for (i, l) in w.lengths.iter().enumerate() {
                            s.push_str(&format!("  e{i} length {l}\n"));
                        }
                    }
                    if t.vertices.iter().any(|v| v.class.is_some()) {
                        let b = t.balancing_check(&pair)?;
                        s.push_str(if b { "balancing holds\n" } else { "balancing fails\n" });
                    }
                    if let Some(r) = index {
                        s.push_str(&format!("refinement index {r}\n"));
                    }
                    s
                }
            };
            Ok(Outcome { text, ok: res.is_realizable() })
        }
        Command::BlowupCompare { pair, cone, p, q, r, class, target_deg, format } => {
            let (pair, deg) = setup(&pair)?;
            let tdeg = check_deg(target_deg.unwrap_or(2 * deg + 2))?;
            let i = cone_by_names(&pair, &cone)?;
            let m = Modification::corner_blowup(&pair, ConeId::Cone(i))?;
            let (p, qq, r) = (pair.parse_point(&p)?, pair.parse_point(&q)?, pair.parse_point(&r)?);
            let a = parse_class(&pair, &class)?;
            let src = MirrorAlgebra::new(&pair, deg)?;
            let tgt = MirrorAlgebra::new(&m.target, tdeg)?;
            let c = compare_structure_constants(&m, &src, &tgt, p, qq, r, &a)?;
            let text = match format {
                Format::Json => c.to_json(&m),
                Format::Svg => return Err(bad("blowup-compare has no svg output")),
                Format::Text => {
                    let idx = format!("{},{},{}", format_point(&pair, &p), format_point(&pair, &qq), format_point(&pair, &r));
                    let mut s = format!("source N_{{{idx}}}^{{{}}} = {}\n", format_class(&pair, &a), c.source);
                    s.push_str(&format!("target sum over lifts = {}\n", c.target));
                    for (b, n) in &c.ledger {
                        s.push_str(&format!("  {}: {n}\n", format_class(&m.target, b)));
                    }
                    s.push_str(if c.equal() { "OK\n" } else { "MISMATCH\n" });
                    s
                }
            };
            Ok(Outcome { text, ok: c.equal() })
        }
        Command::RenderSvg { pair, p, chamber, at, radius, size, output } => {
            let (pair, deg) = setup(&pair)?;
            let trunc = pair.truncation(deg);
            let d = ScatteringDiagram::initial(&pair).complete(&trunc)?;
            let lines = match &p {
                None => vec![],
                Some(p) => {
                    let p = pair.parse_point(p)?;
                    let (qp, _) = endpoint(&d, chamber.as_deref(), at.as_deref())?;
                    if p.is_zero() {
                        vec![]
                    } else {
                        enumerate_broken_lines(&d, p, &qp, &trunc)?
                    }
                }
            };
            let svg = render(&d, &lines, &SvgOptions { radius, size });
            match output {
                Some(path) => {
                    std::fs::write(&path, svg)?;
                    Ok(Outcome::done(String::new()))
                }
                None => Ok(Outcome::done(svg)),
            }
        }
    }
}

fn describe_pair(pair: &LogCYSurfacePair) -> String {
    let fan = pair.fan();
    let good = pair.good();
    let names = pair.ray_names();
    let mut s = format!("pair {}\n", pair.name().unwrap_or("(unnamed)"));
    s.push_str(&format!("classes: {}\n", pair.class_names().join(", ")));
    for (i, r) in fan.rays().iter().enumerate() {
        s.push_str(&format!(
            "  {} = {r}  [{}]  {}, D^2 = {}\n",
            names[i],
            format_class(pair, &pair.divisor_class(i)),
            if good[i] { "good" } else { "bad" },
            pair.intersect(&pair.divisor_class(i), &pair.divisor_class(i)).map(|v| v.to_string()).unwrap_or_else(|_| "?".into()),
        ));
    }
    for b in pair.blowups() {
        s.push_str(&format!("blowup {} on {}\n", b.name, names[b.ray]));
    }
    let gens: Vec<String> = pair.effective_generators().iter().map(|c| format_class(pair, c)).collect();
    s.push_str(&format!("effective generators: {}\n", gens.join(", ")));
    s.push_str(&format!("ample: {}\n", format_class(pair, pair.ample())));
    s
}

fn describe_diagram(d: &ScatteringDiagram) -> String {
    let pair = d.pair();
    let mut s = format!("{} walls through order {}\n", d.walls().len(), d.order());
    for w in d.walls() {
        let terms: Vec<String> = w
            .function
            .terms
            .iter()
            .map(|((c, m), k)| {
                let coeff = if *k == 1 { String::new() } else { format!("{k} ") };
                let z = if c.is_zero() { String::new() } else { format!("z^{{{}}} ", format_class(pair, c)) };
                format!("{coeff}{z}x^{{{}}}", format_point(pair, m))
            })
            .collect();
        let kind = match w.support {
            crate::scattering::Support::Line => "line",
            crate::scattering::Support::Ray => "ray ",
        };
        s.push_str(&format!("  {kind} {}: 1 + {}\n", w.direction, terms.join(" + ").replace("+ -", "- ")));
    }
    s
}
