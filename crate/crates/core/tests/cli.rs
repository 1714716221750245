use std::process::{Command, Output};

use mirage::modify::{Comparison, Modification};
use mirage::theta::{parse_table, Monomial};
use mirage::troptype::RealizabilityResult;
use mirage::{ConeId, LogCYSurfacePair, MirrorAlgebra, ScatteringDiagram};

fn mirage(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirage"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("MIRAGE_MAX_DEG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn theta_prints_the_two_term_expansion() {
    let o = mirage(&["theta", "--pair", "paper-example", "--p", "2,1", "--chamber", "D1,D3", "--deg", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ϑ_{2D2+D3} = x^{-D1-D3} z^{2L-E} + x^{-2D1-D3} z^{2L}\n");
}

#[test]
fn assoc_check_single_coefficient() {
    let o = mirage(&["assoc-check", "--pair", "paper-example", "--tuple", "D1", "D2", "D3", "--r", "0", "--class", "L", "--deg", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "OK 1 = 1\n");
}

#[test]
fn realize_case_one_is_infeasible() {
    let o = mirage(&["realize", "fixtures/types/case1.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "INFEASIBLE\n");
}

#[test]
fn validation_errors_exit_one_with_one_line() {
    for args in [
        &["theta", "--p", "2,1", "--chamber", "D1,D2,D3"][..],
        &["theta", "--p", "2,1", "--chamber", "D1,D9"],
        &["mult", "D1"],
        &["scatter", "--pair", "nope"],
        &["assoc-check", "--tuple", "D1", "D2", "D3", "--r", "0", "--class", "Q"],
        &["realize", "fixtures/types/missing.json"],
        &["scatter", "--deg", "0"],
        &["frobenius"],
    ] {
        let o = mirage(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).is_empty());
    }
}

#[test]
fn max_deg_caps_truncation() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_mirage"))
            .args(["theta", "--p", "2,1", "--chamber", "D1,D3", "--deg", "6"])
            .env("MIRAGE_MAX_DEG", cap)
            .output()
            .unwrap()
    };
    let o = run("4");
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("MIRAGE_MAX_DEG"));
    assert_eq!(run("6").status.code(), Some(0));
    assert_eq!(run("many").status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["mult", "D1", "2D2+D3", "--format", "json"];
    assert_eq!(mirage(&args).stdout, mirage(&args).stdout);
}

#[test]
fn json_round_trips() {
    let pair = LogCYSurfacePair::preset("paper-example").unwrap();

    let o = mirage(&["pair", "--format", "json"]);
    assert_eq!(LogCYSurfacePair::from_json(&stdout(&o)).unwrap(), pair);

    let o = mirage(&["scatter", "--deg", "6", "--format", "json"]);
    let d = ScatteringDiagram::from_json(&pair, &stdout(&o)).unwrap();
    assert_eq!(d, ScatteringDiagram::initial(&pair).complete(&pair.truncation(6)).unwrap());
    assert_eq!(d.to_json(), stdout(&o));

    let o = mirage(&["theta", "--p", "2,1", "--chamber", "D1,D3", "--format", "json"]);
    let ms: Vec<Monomial> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(ms.len(), 2);

    let o = mirage(&["mult", "D1+D3", "2D2+D3", "--format", "json"]);
    let rows = parse_table(&stdout(&o)).unwrap();
    let alg = MirrorAlgebra::new(&pair, 6).unwrap();
    let (p, q) = (pair.parse_point("D1+D3").unwrap(), pair.parse_point("2D2+D3").unwrap());
    assert_eq!(stdout(&o), alg.table_json(&[p, q]).unwrap());
    assert!(rows.iter().all(|r| alg.n(r.p, r.q, r.r).unwrap().get(&r.class) == Some(&r.n)));

    let o = mirage(&["realize", "fixtures/types/figure_m2.json", "--format", "json"]);
    let res = RealizabilityResult::from_json(&stdout(&o)).unwrap();
    assert_eq!(res.dim_tau, Some(1));
    assert_eq!(res.to_json(), stdout(&o));

    let o = mirage(&["blowup-compare", "--cone", "D2,D3", "--p", "D1+D3", "--q", "2D2+D3", "--r", "0", "--class", "2L-E", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let c = Comparison::from_json(&stdout(&o)).unwrap();
    assert_eq!((c.source, c.target), (1, 1));
    let m = Modification::corner_blowup(&pair, ConeId::Cone(0)).unwrap();
    assert_eq!(c.to_json(&m), stdout(&o));
}

#[test]
fn svg_references_resolve() {
    let o = mirage(&["render-svg", "--p", "2D2+D3", "--chamber", "D1,D3"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg ") && svg.trim_end().ends_with("</svg>"));
    let mut rest = svg.as_str();
    let mut refs = 0;
    while let Some(i) = rest.find("url(#") {
        let tail = &rest[i + 5..];
        let id = &tail[..tail.find(')').unwrap()];
        assert!(svg.contains(&format!("id=\"{id}\"")), "undefined id {id}");
        refs += 1;
        rest = tail;
    }
    assert_eq!(refs, 2);
    // Every element is self-closing or has a matching close tag.
    assert_eq!(svg.matches('<').count(), 2 * svg.matches("</").count() + svg.matches("/>").count());
}

#[test]
fn lift_outside_target_truncation_is_invalid() {
    let o = mirage(&["blowup-compare", "--cone", "D2,D3", "--p", "D1+D3", "--q", "2D2+D3", "--r", "0", "--class", "2L-E", "--target-deg", "3"]);
    // Too small a target truncation is "could not compute", not "false".
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("target truncation"));
}
