//! Decorated genus-0 tropical types and their realizability.
//!
//! A type assigns a cone of the fan to every vertex, edge and leg, a contact
//! vector to every edge and leg, and optionally a curve class to every
//! vertex. Cones are written as lists of ray indices: `[]` for the origin,
//! `[i]` for a ray and `[i, j]` for the maximal cone spanned by two adjacent
//! rays.
//!
//! Realizability is an exact LP. Each vertex position is written in the
//! generators of its cone, `h(v) = sum_i lambda_{v,i} g_i`, so that "in the
//! relative interior" becomes `lambda > 0`. The open conditions are all
//! homogeneous, which makes the realizations a cone; the solver maximizes a
//! common slack `t <= 1` below every strict form and reports realizable iff
//! the optimum is positive.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::intlin;
use crate::lattice_fan::{ConeComplex, ConeId, LatticePoint, RatPoint};
use crate::lp::{Cmp, Lp, LpResult};
use crate::pair::{CurveClass, LogCYSurfacePair};
use crate::{q, Result, Q};

fn malformed<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::MalformedType(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropVertex {
    pub cone: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<CurveClass>,
}

/// A bounded edge, oriented from `from` to `to`: `h(to) - h(from) = l * u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropEdge {
    pub from: usize,
    pub to: usize,
    pub cone: Vec<usize>,
    pub u: LatticePoint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropLeg {
    pub vertex: usize,
    pub cone: Vec<usize>,
    pub u: LatticePoint,
    /// A punctured leg only needs a nonempty initial segment in its cone.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub punctured: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TropicalType {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<TropVertex>,
    #[serde(default)]
    pub edges: Vec<TropEdge>,
    #[serde(default)]
    pub legs: Vec<TropLeg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Realizable,
    Infeasible,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Realizable => "REALIZABLE",
            Status::Infeasible => "INFEASIBLE",
        })
    }
}

/// Vertex positions and edge lengths of one realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub positions: Vec<RatPoint>,
    pub lengths: Vec<Q>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizabilityResult {
    pub status: Status,
    /// Dimension of the cone of realizations, when there are any.
    pub dim_tau: Option<usize>,
    pub witness: Option<Witness>,
}

impl RealizabilityResult {
    pub fn is_realizable(&self) -> bool {
        self.status == Status::Realizable
    }

    pub fn to_json(&self) -> String {
        let w = self.witness.as_ref().map(|w| WitnessJson {
            positions: w.positions.iter().map(|p| [p.x.to_string(), p.y.to_string()]).collect(),
            lengths: w.lengths.iter().map(|l| l.to_string()).collect(),
        });
        let v = ResultJson { status: self.status, dim_tau: self.dim_tau, witness: w };
        serde_json::to_string_pretty(&v).expect("plain JSON") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: ResultJson = serde_json::from_str(s)?;
        let rat = |t: &String| t.parse::<Q>().map_err(|_| Error::Invalid(format!("bad rational {t:?}")));
        let witness = match v.witness {
            None => None,
            Some(w) => Some(Witness {
                positions: w.positions.iter().map(|[x, y]| Ok(RatPoint::new(rat(x)?, rat(y)?))).collect::<Result<_>>()?,
                lengths: w.lengths.iter().map(rat).collect::<Result<_>>()?,
            }),
        };
        Ok(RealizabilityResult { status: v.status, dim_tau: v.dim_tau, witness })
    }
}

// Rationals travel as strings like "3/2" so nothing is rounded.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessJson {
    positions: Vec<[String; 2]>,
    lengths: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResultJson {
    status: Status,
    dim_tau: Option<usize>,
    witness: Option<WitnessJson>,
}

/// Resolves a ray-index list to a cone of `fan`.
pub fn resolve_cone(fan: &ConeComplex, rays: &[usize]) -> Result<ConeId> {
    let n = fan.n_rays();
    if let Some(&r) = rays.iter().find(|&&r| r >= n) {
        return malformed(format!("ray index {r} out of range"));
    }
    match *rays {
        [] => Ok(ConeId::Origin),
        [i] => Ok(ConeId::Ray(i)),
        [a, b] if (a + 1) % n == b => Ok(ConeId::Cone(a)),
        [a, b] if (b + 1) % n == a => Ok(ConeId::Cone(b)),
        _ => malformed(format!("rays {rays:?} do not span a cone of the fan")),
    }
}

/// Coordinates of `u` in the generators of `c`, or `None` if `u` is not in
/// the linear span of `c`.
fn coords_in(fan: &ConeComplex, c: ConeId, u: &LatticePoint) -> Option<Vec<(usize, Q)>> {
    match c {
        ConeId::Origin => u.is_zero().then(Vec::new),
        ConeId::Ray(i) => {
            let g = fan.ray(i);
            (g.det(u) == 0).then(|| vec![(i, Q::new(g.dot(u).into(), g.dot(&g).into()))])
        }
        ConeId::Cone(i) => {
            let (a, b) = fan.cone_rays(i);
            let (ca, cb) = fan.cone_coords(i, &u.to_rat());
            Some(vec![(a, ca), (b, cb)])
        }
    }
}

struct Resolved {
    vertices: Vec<ConeId>,
    edges: Vec<ConeId>,
    legs: Vec<ConeId>,
}

impl TropicalType {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::MalformedType(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data") + "\n"
    }

    /// Sum of the vertex decorations; undecorated vertices count as zero.
    pub fn total_class(&self, len: usize) -> CurveClass {
        self.vertices.iter().filter_map(|v| v.class.as_ref()).fold(CurveClass::zeros(len), |acc, c| &acc + c)
    }

    fn check_tree(&self) -> Result<()> {
        let nv = self.vertices.len();
        if nv == 0 {
            return malformed("a type needs at least one vertex");
        }
        if self.edges.len() + 1 != nv {
            return malformed(format!("{nv} vertices and {} edges do not form a tree", self.edges.len()));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.from >= nv || e.to >= nv || e.from == e.to {
                return malformed(format!("edge {k} has bad endpoints"));
            }
        }
        for (k, l) in self.legs.iter().enumerate() {
            if l.vertex >= nv {
                return malformed(format!("leg {k} is attached to a missing vertex"));
            }
        }
        if self.component(0, None).len() != nv {
            return malformed("the graph is not connected");
        }
        Ok(())
    }

    /// Vertices reachable from `start` without using edge `skip`.
    fn component(&self, start: usize, skip: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for (k, e) in self.edges.iter().enumerate() {
                if Some(k) == skip {
                    continue;
                }
                let w = if e.from == v {
                    e.to
                } else if e.to == v {
                    e.from
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        (0..seen.len()).filter(|&v| seen[v]).collect()
    }

    fn resolve(&self, fan: &ConeComplex) -> Result<Resolved> {
        self.check_tree()?;
        let vertices = self.vertices.iter().map(|v| resolve_cone(fan, &v.cone)).collect::<Result<Vec<_>>>()?;
        let edges = self.edges.iter().map(|e| resolve_cone(fan, &e.cone)).collect::<Result<Vec<_>>>()?;
        let legs = self.legs.iter().map(|l| resolve_cone(fan, &l.cone)).collect::<Result<Vec<_>>>()?;
        for (k, e) in self.edges.iter().enumerate() {
            for v in [e.from, e.to] {
                if !fan.is_face(vertices[v], edges[k]) {
                    return malformed(format!("the cone of vertex {v} is not a face of the cone of edge {k}"));
                }
            }
            if coords_in(fan, edges[k], &e.u).is_none() {
                return malformed(format!("edge {k} has slope {} outside the span of its cone", e.u));
            }
        }
        for (k, l) in self.legs.iter().enumerate() {
            if !fan.is_face(vertices[l.vertex], legs[k]) {
                return malformed(format!("the cone of vertex {} is not a face of the cone of leg {k}", l.vertex));
            }
            match coords_in(fan, legs[k], &l.u) {
                None => return malformed(format!("leg {k} has slope {} outside the span of its cone", l.u)),
                Some(c) if !l.punctured && c.iter().any(|(_, x)| x.is_negative()) => {
                    return malformed(format!("unpunctured leg {k} has slope {} leaving its cone", l.u))
                }
                _ => {}
            }
        }
        let lens: Vec<usize> = self.vertices.iter().filter_map(|v| v.class.as_ref().map(|c| c.len())).collect();
        if lens.windows(2).any(|w| w[0] != w[1]) {
            return malformed("vertex classes have different lengths");
        }
        Ok(Resolved { vertices, edges, legs })
    }

    pub fn validate(&self, fan: &ConeComplex) -> Result<()> {
        self.resolve(fan).map(|_| ())
    }

    /// Decides whether a tropical map of this type exists.
    pub fn realizability(&self, fan: &ConeComplex) -> Result<RealizabilityResult> {
        let r = self.resolve(fan)?;
        // Variable layout: lambda per vertex generator, then one length per edge.
        let mut offset = Vec::new();
        let mut n = 0;
        for c in &r.vertices {
            offset.push(n);
            n += fan.cone_ray_indices(*c).len();
        }
        let len_var = |k: usize| n + k;
        let n_vars = n + self.edges.len();
        let lambda = |v: usize, ray: usize| -> Option<usize> {
            fan.cone_ray_indices(r.vertices[v]).iter().position(|&x| x == ray).map(|p| offset[v] + p)
        };

        let mut equalities: Vec<Vec<Q>> = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            for axis in 0..2 {
                let mut row = vec![Q::zero(); n_vars];
                let comp = |p: LatticePoint| q(if axis == 0 { p.x } else { p.y });
                for (v, sign) in [(e.to, 1), (e.from, -1)] {
                    for (p, ray) in fan.cone_ray_indices(r.vertices[v]).into_iter().enumerate() {
                        row[offset[v] + p] += comp(fan.ray(ray)) * q(sign);
                    }
                }
                row[len_var(k)] = -comp(e.u);
                equalities.push(row);
            }
        }

        // Strict forms, each a list of variables whose sum must be positive.
        // An empty list can never be positive.
        let mut strict: Vec<Vec<usize>> = Vec::new();
        for k in 0..self.edges.len() {
            strict.push(vec![len_var(k)]);
        }
        for v in 0..self.vertices.len() {
            for p in 0..fan.cone_ray_indices(r.vertices[v]).len() {
                strict.push(vec![offset[v] + p]);
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            for ray in fan.cone_ray_indices(r.edges[k]) {
                strict.push([lambda(e.from, ray), lambda(e.to, ray)].into_iter().flatten().collect());
            }
        }
        for (k, l) in self.legs.iter().enumerate() {
            let coords = coords_in(fan, r.legs[k], &l.u).expect("validated");
            for (ray, mu) in coords {
                // Unpunctured legs point into the cone (mu >= 0); either way a
                // coordinate that does not grow along the leg must start positive.
                if !mu.is_positive() {
                    strict.push(lambda(l.vertex, ray).into_iter().collect());
                }
            }
        }
        if strict.iter().any(|s| s.is_empty()) {
            return Ok(RealizabilityResult { status: Status::Infeasible, dim_tau: None, witness: None });
        }

        let t = n_vars;
        let mut lp = Lp::new(n_vars + 1);
        for row in &equalities {
            let mut row = row.clone();
            row.push(Q::zero());
            lp.add(row, Cmp::Eq, Q::zero());
        }
        for s in &strict {
            let mut row = vec![Q::zero(); n_vars + 1];
            for &i in s {
                row[i] += Q::one();
            }
            row[t] = -Q::one();
            lp.add(row, Cmp::Ge, Q::zero());
        }
        let mut cap = vec![Q::zero(); n_vars + 1];
        cap[t] = Q::one();
        lp.add(cap.clone(), Cmp::Le, Q::one());
        lp.objective = cap;
        let x = match lp.solve() {
            LpResult::Optimal { value, x } if value.is_positive() => x,
            LpResult::Optimal { .. } | LpResult::Infeasible => {
                return Ok(RealizabilityResult { status: Status::Infeasible, dim_tau: None, witness: None })
            }
            LpResult::Unbounded => unreachable!("the slack is capped"),
        };

        let positions: Vec<RatPoint> = (0..self.vertices.len())
            .map(|v| {
                fan.cone_ray_indices(r.vertices[v])
                    .into_iter()
                    .enumerate()
                    .fold(RatPoint::zero(), |acc, (p, ray)| acc.add_scaled(&x[offset[v] + p], &fan.ray(ray)))
            })
            .collect();
        let lengths: Vec<Q> = (0..self.edges.len()).map(|k| x[len_var(k)].clone()).collect();
        for (k, e) in self.edges.iter().enumerate() {
            debug_assert_eq!(positions[e.to], positions[e.from].add_scaled(&lengths[k], &e.u));
        }
        // Every variable is positive at the witness, so the realizations are
        // open in the subspace cut out by the edge equations.
        let dim = n_vars - intlin::rank(&equalities);
        Ok(RealizabilityResult {
            status: Status::Realizable,
            dim_tau: Some(dim),
            witness: Some(Witness { positions, lengths }),
        })
    }

    /// Cuts edge `e`. The side containing `from` gets a punctured leg with
    /// slope `u`, the other side one with slope `-u`; both legs are last in
    /// their leg lists. Vertices keep their relative order.
    pub fn cut_edge(&self, e: usize) -> Result<(TropicalType, TropicalType)> {
        let Some(edge) = self.edges.get(e) else {
            return malformed(format!("no edge {e}"));
        };
        self.check_tree()?;
        let side = |start: usize, leg_u: LatticePoint| -> TropicalType {
            let verts = self.component(start, Some(e));
            let index: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let mut out = TropicalType {
                name: None,
                vertices: verts.iter().map(|&v| self.vertices[v].clone()).collect(),
                edges: self
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|&(k, x)| k != e && index.contains_key(&x.from))
                    .map(|(_, x)| TropEdge { from: index[&x.from], to: index[&x.to], ..x.clone() })
                    .collect(),
                legs: self
                    .legs
                    .iter()
                    .filter(|l| index.contains_key(&l.vertex))
                    .map(|l| TropLeg { vertex: index[&l.vertex], ..l.clone() })
                    .collect(),
            };
            out.legs.push(TropLeg { vertex: index[&start], cone: edge.cone.clone(), u: leg_u, punctured: true });
            out
        };
        Ok((side(edge.from, edge.u), side(edge.to, -edge.u)))
    }

    /// Joins leg `la` of `a` to leg `lb` of `b` into an edge. The legs must
    /// share a cone and have opposite slopes.
    pub fn glue(a: &TropicalType, la: usize, b: &TropicalType, lb: usize) -> Result<TropicalType> {
        let (Some(x), Some(y)) = (a.legs.get(la), b.legs.get(lb)) else {
            return malformed("no such leg");
        };
        if x.u != -y.u || x.cone != y.cone {
            return malformed("glued legs need opposite slopes in the same cone");
        }
        let shift = a.vertices.len();
        let mut out = TropicalType {
            name: None,
            vertices: a.vertices.iter().chain(&b.vertices).cloned().collect(),
            edges: a.edges.clone(),
            legs: Vec::new(),
        };
        out.edges.extend(b.edges.iter().map(|e| TropEdge { from: e.from + shift, to: e.to + shift, ..e.clone() }));
        out.edges.push(TropEdge { from: x.vertex, to: y.vertex + shift, cone: x.cone.clone(), u: x.u });
        out.legs.extend(a.legs.iter().enumerate().filter(|&(k, _)| k != la).map(|(_, l)| l.clone()));
        out.legs.extend(
            b.legs
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != lb)
                .map(|(_, l)| TropLeg { vertex: l.vertex + shift, ..l.clone() }),
        );
        Ok(out)
    }

    /// Canonical string of the tree rooted at `v`, reached from `parent`.
    fn encode(&self, v: usize, parent: Option<usize>) -> String {
        let vert = &self.vertices[v];
        let mut legs: Vec<String> = self
            .legs
            .iter()
            .filter(|l| l.vertex == v)
            .map(|l| format!("{:?}{}{}", l.cone, l.u, if l.punctured { "p" } else { "" }))
            .collect();
        legs.sort();
        let mut children: Vec<String> = self
            .edges
            .iter()
            .filter_map(|e| {
                let (w, u) = if e.from == v {
                    (e.to, e.u)
                } else if e.to == v {
                    (e.from, -e.u)
                } else {
                    return None;
                };
                (Some(w) != parent).then(|| format!("{:?}{}{}", e.cone, u, self.encode(w, Some(v))))
            })
            .collect();
        children.sort();
        let class = vert.class.as_ref().map(|c| format!("{:?}", c.0)).unwrap_or_default();
        format!("({:?}{class}[{}]{{{}}})", vert.cone, legs.join(","), children.join(","))
    }

    /// Isomorphism of decorated trees (ignoring names).
    pub fn is_isomorphic(&self, other: &TropicalType) -> bool {
        if self.vertices.len() != other.vertices.len()
            || self.edges.len() != other.edges.len()
            || self.legs.len() != other.legs.len()
        {
            return false;
        }
        let Some(mine) = (0..self.vertices.len()).map(|v| self.encode(v, None)).min() else {
            return true;
        };
        (0..other.vertices.len()).any(|v| other.encode(v, None) == mine)
    }

    /// Value of the linear extension of `D_ray^*` on the cone of leg `k`
    /// at its slope.
    fn leg_contact(&self, fan: &ConeComplex, k: usize, ray: usize) -> Result<Q> {
        let l = &self.legs[k];
        let c = resolve_cone(fan, &l.cone)?;
        let coords = coords_in(fan, c, &l.u).ok_or_else(|| Error::MalformedType(format!("leg {k} slope")))?;
        Ok(coords.into_iter().find(|(r, _)| *r == ray).map(|(_, x)| x).unwrap_or_else(Q::zero))
    }

    /// `D_j . A = sum over legs of D_j^*(u)` for every boundary component,
    /// with `A` the total class.
    pub fn balancing_check(&self, pair: &LogCYSurfacePair) -> Result<bool> {
        let total = self.total_class(pair.class_len());
        for j in 0..pair.fan().n_rays() {
            let lhs = q(pair.intersect_boundary(j, &total)?);
            let mut rhs = Q::zero();
            for k in 0..self.legs.len() {
                rhs += self.leg_contact(pair.fan(), k, j)?;
            }
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Order of the cokernel of the integral moduli lattice of the type on
    /// `refined` inside the one on `fan`.
    ///
    /// `refined` must come from `fan` by ray-lattice refinements, and every
    /// edge and leg slope must already lie in the refined lattice of its
    /// cone (the type is a type on the refined complex). Integral points of
    /// a refined cone are those whose coordinate along each refined ray is
    /// divisible by its scale.
    pub fn refinement_index(&self, fan: &ConeComplex, refined: &ConeComplex) -> Result<u64> {
        if fan.rays() != refined.rays() {
            return Err(Error::Invalid("the refined complex has different rays".into()));
        }
        for (a, b) in fan.lattice_scale().iter().zip(refined.lattice_scale()) {
            if b % a != 0 {
                return Err(Error::Invalid("the second complex is not a refinement of the first".into()));
            }
        }
        let res = self.realizability(fan)?;
        if !res.is_realizable() {
            return Err(Error::Invalid("type is not realizable".into()));
        }
        let r = self.resolve(fan)?;
        let scale = |ray: usize| q(refined.lattice_scale()[ray] as i64);
        let slopes = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| (format!("edge {k}"), r.edges[k], e.u))
            .chain(self.legs.iter().enumerate().map(|(k, l)| (format!("leg {k}"), r.legs[k], l.u)));
        for (what, c, u) in slopes {
            for (ray, x) in coords_in(fan, c, &u).expect("validated") {
                if !(x / scale(ray)).is_integer() {
                    return Err(Error::Invalid(format!("{what} has slope {u} outside the refined lattice")));
                }
            }
        }

        // Integral coordinates: h(v) in Z^2 per vertex, then one length per edge.
        let nv = self.vertices.len();
        let n = 2 * nv + self.edges.len();
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for (v, c) in r.vertices.iter().enumerate() {
            match *c {
                ConeId::Origin => {
                    for axis in 0..2 {
                        let mut row = vec![0; n];
                        row[2 * v + axis] = 1;
                        rows.push(row);
                    }
                }
                ConeId::Ray(i) => {
                    let g = fan.ray(i);
                    let mut row = vec![0; n];
                    row[2 * v] = -g.y;
                    row[2 * v + 1] = g.x;
                    rows.push(row);
                }
                ConeId::Cone(_) => {}
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            for axis in 0..2 {
                let mut row = vec![0; n];
                row[2 * e.to + axis] += 1;
                row[2 * e.from + axis] -= 1;
                row[2 * nv + k] = -if axis == 0 { e.u.x } else { e.u.y };
                rows.push(row);
            }
        }
        let basis = intlin::kernel_basis(&rows, n);

        // Coordinate of h(v) along each ray of its cone, as a form on Z^n.
        let mut forms: Vec<(usize, Vec<Q>)> = Vec::new();
        for (v, c) in r.vertices.iter().enumerate() {
            match *c {
                ConeId::Origin => {}
                ConeId::Ray(i) => {
                    let g = fan.ray(i);
                    let d = q(g.dot(&g));
                    let mut f = vec![Q::zero(); n];
                    f[2 * v] = q(g.x) / &d;
                    f[2 * v + 1] = q(g.y) / &d;
                    forms.push((i, f));
                }
                ConeId::Cone(i) => {
                    let (a, b) = fan.cone_rays(i);
                    let (ga, gb) = (fan.ray(a), fan.ray(b));
                    let d = q(ga.det(&gb));
                    // lambda_a = det(h, gb) / d, lambda_b = det(ga, h) / d.
                    let mut fa = vec![Q::zero(); n];
                    fa[2 * v] = q(gb.y) / &d;
                    fa[2 * v + 1] = q(-gb.x) / &d;
                    let mut fb = vec![Q::zero(); n];
                    fb[2 * v] = q(-ga.y) / &d;
                    fb[2 * v + 1] = q(ga.x) / &d;
                    forms.push((a, fa));
                    forms.push((b, fb));
                }
            }
        }
        let index = |scales: &[u64]| -> u64 {
            let rows: Vec<Vec<Q>> = forms
                .iter()
                .map(|(ray, f)| {
                    let s = q(scales[*ray] as i64);
                    basis.iter().map(|b| b.iter().zip(f).map(|(x, y)| q(*x) * y).sum::<Q>() / &s).collect()
                })
                .collect();
            if rows.is_empty() || basis.is_empty() {
                return 1;
            }
            let d = rows.iter().flatten().fold(num_bigint::BigInt::one(), |acc, x| {
                num_integer::Integer::lcm(&acc, x.denom())
            });
            let dq = Q::from_integer(d.clone());
            let c: Vec<Vec<i64>> = rows
                .iter()
                .map(|row| row.iter().map(|x| i64::try_from((x * &dq).to_integer()).expect("small")).collect())
                .collect();
            intlin::index_mod(&c, basis.len(), i64::try_from(d).expect("small denominator"))
        };
        let (coarse, fine) = (index(fan.lattice_scale()), index(refined.lattice_scale()));
        assert_eq!(fine % coarse, 0, "refined moduli lattice must be a sublattice");
        Ok(fine / coarse)
    }
}
