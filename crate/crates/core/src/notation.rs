//! Human-readable notation: classes as `2L-E`, points as `2D2+D3` or `2,1`.

use crate::error::invalid;
use crate::lattice_fan::{LatticePoint, RatPoint};
use crate::pair::{CurveClass, LogCYSurfacePair};
use crate::{Result, Q};

/// Writes `sum c_i * name_i` in the usual way, e.g. `2L-E`; zero is `0`.
pub fn format_combination<T: std::fmt::Display>(terms: &[(T, &str)], is_zero: impl Fn(&T) -> bool) -> String {
    let mut s = String::new();
    for (c, name) in terms {
        if is_zero(c) {
            continue;
        }
        let txt = c.to_string();
        let (neg, mag) = match txt.strip_prefix('-') {
            Some(m) => (true, m.to_string()),
            None => (false, txt),
        };
        if neg {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        if mag != "1" {
            s.push_str(&mag);
        }
        s.push_str(name);
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

pub fn format_class(pair: &LogCYSurfacePair, c: &CurveClass) -> String {
    let terms: Vec<(i64, &str)> = c.0.iter().zip(pair.class_names()).map(|(c, n)| (*c, n.as_str())).collect();
    format_combination(&terms, |c| *c == 0)
}

/// Splits `2L-E+3F` into signed `(coefficient, name)` pairs.
fn split_terms(s: &str) -> Result<Vec<(i64, String)>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return invalid("empty expression");
    }
    let mut out = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        }
        let end = rest[1..].find(['+', '-']).map(|i| i + 1).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = &rest[end..];
        let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
        let coeff: i64 = if digits == 0 { 1 } else { term[..digits].parse().map_err(|_| crate::Error::Invalid(format!("bad term {term:?}")))? };
        out.push((sign * coeff, term[digits..].to_string()));
    }
    Ok(out)
}

pub fn parse_class(pair: &LogCYSurfacePair, s: &str) -> Result<CurveClass> {
    let mut c = pair.zero_class();
    for (k, name) in split_terms(s)? {
        if name.is_empty() {
            if k == 0 {
                continue;
            }
            return invalid(format!("class term without a name in {s:?}"));
        }
        let Some(i) = pair.class_names().iter().position(|n| *n == name) else {
            return invalid(format!("unknown class {name:?}; known: {}", pair.class_names().join(", ")));
        };
        c.0[i] += k;
    }
    Ok(c)
}

/// Parses `x,y` coordinates or a combination of ray names like `2D2+D3`.
pub fn parse_point(pair: &LogCYSurfacePair, s: &str) -> Result<LatticePoint> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once(',') {
        let x = a.trim().parse().map_err(|_| crate::Error::Invalid(format!("bad point {s:?}")))?;
        let y = b.trim().parse().map_err(|_| crate::Error::Invalid(format!("bad point {s:?}")))?;
        return Ok(LatticePoint::new(x, y));
    }
    let mut p = LatticePoint::ZERO;
    for (k, name) in split_terms(t)? {
        if name.is_empty() {
            if k == 0 {
                continue;
            }
            return invalid(format!("point term without a ray name in {s:?}"));
        }
        let Some(i) = pair.ray_by_name(&name) else {
            return invalid(format!("unknown ray {name:?}; known: {}", pair.ray_names().join(", ")));
        };
        p = p + pair.fan().ray(i).scale(k);
    }
    Ok(p)
}

/// Writes `v` in the generators of maximal cone `i`, e.g. `-D1-D3`.
pub fn format_in_cone(pair: &LogCYSurfacePair, i: usize, v: &LatticePoint) -> String {
    let (a, b) = pair.fan().cone_rays(i);
    let (ca, cb) = pair.fan().cone_coords(i, &v.to_rat());
    let names = pair.ray_names();
    // List the generators in name order so output reads like D1, D3.
    let mut terms: Vec<(Q, &str)> = vec![(ca, names[a].as_str()), (cb, names[b].as_str())];
    terms.sort_by(|x, y| x.1.cmp(y.1));
    format_combination(&terms, |c| *c == Q::from_integer(0.into()))
}

/// Writes `v` as a combination of the generators of its minimal cone.
pub fn format_point(pair: &LogCYSurfacePair, v: &LatticePoint) -> String {
    match pair.fan().minimal_cone(&v.to_rat()) {
        crate::ConeId::Origin => "0".into(),
        crate::ConeId::Ray(i) => {
            let r = pair.fan().ray(i);
            let k = v.dot(&r) / r.dot(&r);
            format_combination(&[(k, pair.ray_names()[i].as_str())], |c| *c == 0)
        }
        crate::ConeId::Cone(i) => format_in_cone(pair, i, v),
    }
}

pub fn format_rat_point(p: &RatPoint) -> String {
    format!("({}, {})", p.x, p.y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let p = LogCYSurfacePair::preset("paper-example").unwrap();
        for s in ["2L-E", "L", "0", "3L-2E", "-E", "E"] {
            let c = parse_class(&p, s).unwrap();
            assert_eq!(format_class(&p, &c), s);
        }
        assert!(parse_class(&p, "2Q").is_err());
        assert_eq!(parse_point(&p, "2D2+D3").unwrap(), LatticePoint::new(2, 1));
        assert_eq!(parse_point(&p, "D1+D3").unwrap(), LatticePoint::new(-1, 0));
        assert_eq!(parse_point(&p, "-1, 0").unwrap(), LatticePoint::new(-1, 0));
        assert_eq!(parse_point(&p, "0").unwrap(), LatticePoint::ZERO);
        assert_eq!(format_point(&p, &LatticePoint::new(3, 2)), "3D2+2D3");
        assert_eq!(format_in_cone(&p, 1, &LatticePoint::new(1, 0)), "-D1-D3");
        assert_eq!(format_in_cone(&p, 1, &LatticePoint::new(2, 1)), "-2D1-D3");
    }
}
