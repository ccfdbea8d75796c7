//! Certifying checkers. Every colouring, homomorphism and target produced
//! elsewhere in the crate is accepted only after one of these returns
//! [`Status::Pass`]. Failures carry a witness that can be re-checked with
//! [`recheck_comprehensive`] / [`recheck_full`] or by hand.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::coloring::ColoringAssignment;
use crate::coloring::ColoringKind;
use crate::graph::{orientation_vector, OrientedGraph, SignVector, Vertex};
use crate::targets::FullKPartite;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("PartialColoring: {found} values for {expected} vertices")]
    PartialColoring { expected: usize, found: usize },
    #[error("PartialColoring: vertex {vertex} has no colour")]
    Uncolored { vertex: Vertex },
    #[error("TargetIdOutOfRange: vertex {vertex} maps to {image}")]
    TargetIdOutOfRange { vertex: Vertex, image: u32 },
    #[error("NotATournament")]
    NotATournament,
    #[error("BadParameters: {0}")]
    BadParameters(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Part index for fullness failures.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub part: Option<usize>,
    pub vertices: Vec<Vertex>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pattern: Option<SignVector>,
    pub tag: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub status: Status,
    pub property: String,
    pub parameters: BTreeMap<String, Value>,
    pub witness: Option<Witness>,
}

impl Certificate {
    fn new(property: &str, parameters: BTreeMap<String, Value>, witness: Option<Witness>) -> Self {
        Certificate {
            schema: 1,
            status: if witness.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            property: property.to_string(),
            parameters,
            witness,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }
}

fn params<const N: usize>(items: [(&str, Value); N]) -> BTreeMap<String, Value> {
    items.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn witness(vertices: Vec<Vertex>, tag: &str) -> Witness {
    Witness {
        part: None,
        vertices,
        pattern: None,
        tag: tag.to_string(),
    }
}

fn require_total(g: &OrientedGraph, c: &ColoringAssignment) -> Result<(), VerifyError> {
    if c.len() != g.n() {
        return Err(VerifyError::PartialColoring {
            expected: g.n(),
            found: c.len(),
        });
    }
    if c.kind != ColoringKind::Homomorphism {
        if let Some(vertex) = c.values().iter().position(|&x| x == 0) {
            return Err(VerifyError::Uncolored { vertex });
        }
    }
    Ok(())
}

fn first_monochromatic_arc(g: &OrientedGraph, c: &ColoringAssignment) -> Option<Witness> {
    g.arcs()
        .iter()
        .find(|&&(u, v)| c.get(u) == c.get(v))
        .map(|&(u, v)| witness(vec![u, v], "monochromatic_arc"))
}

pub fn check_proper(g: &OrientedGraph, c: &ColoringAssignment) -> Result<Certificate, VerifyError> {
    require_total(g, c)?;
    Ok(Certificate::new(
        "proper",
        BTreeMap::new(),
        first_monochromatic_arc(g, c),
    ))
}

/// Proper, and no two arcs `(u, v)`, `(x, y)` with `c(u) = c(y)` and
/// `c(v) = c(x)`.
pub fn check_oriented_coloring(
    g: &OrientedGraph,
    c: &ColoringAssignment,
) -> Result<Certificate, VerifyError> {
    require_total(g, c)?;
    let mut w = first_monochromatic_arc(g, c);
    if w.is_none() {
        let mut first_arc: HashMap<(u32, u32), (Vertex, Vertex)> = HashMap::new();
        for &(x, y) in g.arcs() {
            let (cx, cy) = (c.get(x), c.get(y));
            if let Some(&(u, v)) = first_arc.get(&(cy, cx)) {
                w = Some(witness(vec![u, v, x, y], "opposing_arcs"));
                break;
            }
            first_arc.entry((cx, cy)).or_insert((x, y));
        }
    }
    Ok(Certificate::new("oriented", BTreeMap::new(), w))
}

/// Proper, and the ends of every directed 2-path get different colours.
pub fn check_2dipath_coloring(
    g: &OrientedGraph,
    c: &ColoringAssignment,
) -> Result<Certificate, VerifyError> {
    require_total(g, c)?;
    let mut w = first_monochromatic_arc(g, c);
    if w.is_none() {
        'outer: for v in 0..g.n() {
            for &u in g.in_neighbors(v) {
                for &x in g.out_neighbors(v) {
                    if c.get(u) == c.get(x) {
                        w = Some(witness(vec![u, v, x], "two_dipath_endpoints"));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(Certificate::new("two_dipath", BTreeMap::new(), w))
}

/// Every arc of `g` maps to an arc of `h` with the same direction.
pub fn check_homomorphism(
    g: &OrientedGraph,
    h: &OrientedGraph,
    map: &ColoringAssignment,
) -> Result<Certificate, VerifyError> {
    if map.len() != g.n() {
        return Err(VerifyError::PartialColoring {
            expected: g.n(),
            found: map.len(),
        });
    }
    if let Some(vertex) = map.values().iter().position(|&x| x as usize >= h.n()) {
        return Err(VerifyError::TargetIdOutOfRange {
            vertex,
            image: map.get(vertex),
        });
    }
    let w = g
        .arcs()
        .iter()
        .find(|&&(u, v)| !h.has_arc(map.get(u) as usize, map.get(v) as usize))
        .map(|&(u, v)| witness(vec![u, v], "arc_not_preserved"));
    Ok(Certificate::new(
        "homomorphism",
        params([("target_order", h.n().into())]),
        w,
    ))
}

/// Runs `f` over `tasks` and returns the result of the first task (in task
/// order) that yields `Some`, independent of `jobs`.
pub(crate) fn first_in_order<T, R, F>(tasks: &[T], jobs: usize, f: F) -> Option<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    if jobs <= 1 {
        return tasks.iter().find_map(f);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| tasks.par_iter().find_map_first(f)),
        Err(_) => tasks.iter().find_map(f),
    }
}

/// Exhaustive `(k, t)`-comprehensiveness check.
///
/// Subsets `U = {u_1 < ... < u_k}` are visited lexicographically and the
/// sign vectors of each `U` in lexicographic order (`-1 < +1`); the
/// reported witness is the first violation in that order. The sets of
/// vertices matching each partial pattern are refined one vertex at a time
/// with bitset intersections, so per-pattern counts come from popcounts.
pub fn check_comprehensive(
    t_graph: &OrientedGraph,
    k: usize,
    t: usize,
    jobs: usize,
) -> Result<Certificate, VerifyError> {
    let n = t_graph.n();
    if !t_graph.is_tournament() {
        return Err(VerifyError::NotATournament);
    }
    if k == 0 || k >= n || t == 0 {
        return Err(VerifyError::BadParameters(format!(
            "need 1 <= k < |V(T)| = {n} and t >= 1, got k = {k}, t = {t}"
        )));
    }
    let out = t_graph.out_sets();
    let inn = t_graph.in_sets();
    let firsts: Vec<Vertex> = (0..=n - k).collect();
    let found = first_in_order(&firsts, jobs, |&u1| {
        ComprehensiveSearch::new(&out, &inn, k, t).search_from(u1)
    });
    Ok(Certificate::new(
        "comprehensive",
        params([("k", k.into()), ("t", t.into()), ("n", n.into())]),
        found.map(|(set, pattern)| Witness {
            part: None,
            vertices: set,
            pattern: Some(pattern),
            tag: "too_few_dominators".into(),
        }),
    ))
}

struct ComprehensiveSearch<'a> {
    out: &'a [BitSet],
    inn: &'a [BitSet],
    k: usize,
    t: usize,
    n: usize,
    /// `levels[j]` holds the `2^j` pattern classes for the current prefix
    /// of length `j`.
    levels: Vec<Vec<BitSet>>,
    prefix: Vec<Vertex>,
}

impl<'a> ComprehensiveSearch<'a> {
    fn new(out: &'a [BitSet], inn: &'a [BitSet], k: usize, t: usize) -> Self {
        let n = out.len();
        let levels = (0..k)
            .map(|j| vec![BitSet::new(n); 1 << j])
            .collect::<Vec<_>>();
        ComprehensiveSearch {
            out,
            inn,
            k,
            t,
            n,
            levels,
            prefix: Vec::with_capacity(k),
        }
    }

    fn search_from(&mut self, u1: Vertex) -> Option<(Vec<Vertex>, SignVector)> {
        self.levels[0][0] = BitSet::full(self.n);
        if self.k == 1 {
            return self.leaf(u1);
        }
        self.extend(0, u1);
        self.prefix.push(u1);
        let r = self.descend(1, u1 + 1);
        self.prefix.pop();
        r
    }

    /// Children of level `j` refined by `u` into level `j + 1`: index `2p`
    /// collects `-1` (arc `u -> z`), `2p + 1` collects `+1` (`z -> u`).
    fn extend(&mut self, j: usize, u: Vertex) {
        let (lo, hi) = self.levels.split_at_mut(j + 1);
        for (p, s) in lo[j].iter().enumerate() {
            s.and_into(&self.out[u], &mut hi[0][2 * p]);
            s.and_into(&self.inn[u], &mut hi[0][2 * p + 1]);
        }
    }

    fn descend(&mut self, j: usize, start: Vertex) -> Option<(Vec<Vertex>, SignVector)> {
        if j == self.k - 1 {
            return self.leaf_range(start);
        }
        let last = self.n - (self.k - j);
        for u in start..=last {
            self.extend(j, u);
            self.prefix.push(u);
            let r = self.descend(j + 1, u + 1);
            self.prefix.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }

    fn leaf_range(&self, start: Vertex) -> Option<(Vec<Vertex>, SignVector)> {
        (start..self.n).find_map(|u| self.leaf(u))
    }

    /// Checks the completed subset `prefix + [u]`.
    fn leaf(&self, u: Vertex) -> Option<(Vec<Vertex>, SignVector)> {
        let j = self.k - 1;
        for (p, s) in self.levels[j].iter().enumerate() {
            let size = s.count();
            let plus = s.and_count(&self.inn[u]);
            let minus = size - plus - usize::from(s.contains(u));
            let bad = if minus < self.t {
                Some(2 * p)
            } else if plus < self.t {
                Some(2 * p + 1)
            } else {
                None
            };
            if let Some(idx) = bad {
                let mut set = self.prefix.clone();
                set.push(u);
                return Some((set, SignVector::from_index(idx, self.k)));
            }
        }
        None
    }
}

/// True iff the witness really exhibits fewer than `t` vertices `z` with
/// `F(U, z) = a`.
pub fn recheck_comprehensive(t_graph: &OrientedGraph, t: usize, w: &Witness) -> bool {
    let Some(pattern) = &w.pattern else {
        return false;
    };
    let count = (0..t_graph.n())
        .filter(|z| !w.vertices.contains(z))
        .filter(|&z| orientation_vector(t_graph, &w.vertices, z).ok().as_ref() == Some(pattern))
        .count();
    count < t
}

/// Exhaustive fullness check: for every part `i`, every `A` outside `P_i`
/// with `1 <= |A| <= t` and every sign vector of length `|A|`, some vertex
/// of `P_i` realizes it.
///
/// Sets are visited depth-first in lexicographic order (a set before its
/// extensions), so the witness is the first violation in that order.
pub fn check_full(kp: &FullKPartite, t: usize, jobs: usize) -> Result<Certificate, VerifyError> {
    if t == 0 {
        return Err(VerifyError::BadParameters("t must be at least 1".into()));
    }
    let g = kp.graph();
    let out = g.out_sets();
    let inn = g.in_sets();
    let tasks: Vec<(usize, Vertex)> = (0..kp.parts())
        .flat_map(|i| kp.outside(i).map(move |u| (i, u)))
        .collect();
    let found = first_in_order(&tasks, jobs, |&(i, u1)| {
        FullSearch::new(kp, &out, &inn, i, t).search_from(u1)
    });
    Ok(Certificate::new(
        "full",
        params([
            ("k", kp.parts().into()),
            ("t", t.into()),
            ("part_size", kp.part_size().into()),
        ]),
        found.map(|(part, set, pattern)| Witness {
            part: Some(part),
            vertices: set,
            pattern: Some(pattern),
            tag: "pattern_missing_in_part".into(),
        }),
    ))
}

struct FullSearch<'a> {
    kp: &'a FullKPartite,
    out: &'a [BitSet],
    inn: &'a [BitSet],
    part: usize,
    t: usize,
    /// `into_part[u]`: members of the part (local ids) with an arc to `u`.
    into_part: Vec<BitSet>,
    levels: Vec<Vec<BitSet>>,
    prefix: Vec<Vertex>,
}

type FullWitness = (usize, Vec<Vertex>, SignVector);

impl<'a> FullSearch<'a> {
    fn new(
        kp: &'a FullKPartite,
        out: &'a [BitSet],
        inn: &'a [BitSet],
        part: usize,
        t: usize,
    ) -> Self {
        let size = kp.part_size();
        let base = part * size;
        let n = kp.graph().n();
        let into_part = (0..n)
            .map(|u| {
                let mut s = BitSet::new(size);
                if kp.part_of(u) != part {
                    for &v in kp.graph().in_neighbors(u) {
                        if kp.part_of(v) == part {
                            s.insert(v - base);
                        }
                    }
                }
                s
            })
            .collect();
        let levels = (0..=t).map(|j| vec![BitSet::new(size); 1 << j]).collect();
        FullSearch {
            kp,
            out,
            inn,
            part,
            t,
            into_part,
            levels,
            prefix: Vec::with_capacity(t),
        }
    }

    fn witness(&self, idx: usize) -> FullWitness {
        let len = self.prefix.len();
        (
            self.part,
            self.prefix.clone(),
            SignVector::from_index(idx, len),
        )
    }

    fn search_from(&mut self, u1: Vertex) -> Option<FullWitness> {
        self.levels[0][0] = BitSet::full(self.kp.part_size());
        self.visit(0, u1)
    }

    /// Refines level `j` by `u`, checks the new node `prefix + [u]` and
    /// explores its extensions.
    fn visit(&mut self, j: usize, u: Vertex) -> Option<FullWitness> {
        {
            let (lo, hi) = self.levels.split_at_mut(j + 1);
            let m = &self.into_part[u];
            for (p, s) in lo[j].iter().enumerate() {
                s.and_not_into(m, &mut hi[0][2 * p]);
                s.and_into(m, &mut hi[0][2 * p + 1]);
            }
        }
        self.prefix.push(u);
        let r = self.after_push(j + 1, u);
        self.prefix.pop();
        r
    }

    fn after_push(&mut self, depth: usize, last: Vertex) -> Option<FullWitness> {
        if let Some(idx) = self.levels[depth].iter().position(BitSet::is_empty) {
            return Some(self.witness(idx));
        }
        if depth == self.t {
            return None;
        }
        if depth + 1 == self.t {
            return self.last_level(depth, last);
        }
        let nexts: Vec<Vertex> = self.kp.outside(self.part).filter(|&u| u > last).collect();
        nexts.into_iter().find_map(|u| self.visit(depth, u))
    }

    /// Children of the current node are leaves: find the smallest `u` for
    /// which some class would lose all members or keep all of them, via
    /// intersections of neighbourhoods over the class members.
    fn last_level(&mut self, depth: usize, last: Vertex) -> Option<FullWitness> {
        let n = self.kp.graph().n();
        let base = self.part * self.kp.part_size();
        let mut bad = BitSet::new(n);
        for s in &self.levels[depth] {
            for sets in [self.inn, self.out] {
                let mut acc = BitSet::full(n);
                acc.clear_below(last + 1);
                for v in s.iter() {
                    acc.intersect_with(&sets[base + v]);
                    if acc.is_empty() {
                        break;
                    }
                }
                bad.union_with(&acc);
            }
        }
        let u = bad.first()?;
        let m = &self.into_part[u];
        let idx = self.levels[depth]
            .iter()
            .enumerate()
            .find_map(|(p, s)| {
                let mut tmp = BitSet::new(s.len());
                s.and_not_into(m, &mut tmp);
                if tmp.is_empty() {
                    return Some(2 * p);
                }
                s.and_into(m, &mut tmp);
                tmp.is_empty().then_some(2 * p + 1)
            })
            .expect("a flagged vertex empties some class");
        self.prefix.push(u);
        let w = self.witness(idx);
        self.prefix.pop();
        Some(w)
    }
}

/// True iff no vertex of the witness part realizes the witness pattern.
pub fn recheck_full(kp: &FullKPartite, w: &Witness) -> bool {
    let (Some(part), Some(pattern)) = (w.part, &w.pattern) else {
        return false;
    };
    if w.vertices.iter().any(|&a| kp.part_of(a) == part) {
        return false;
    }
    !kp.part_members(part)
        .any(|v| orientation_vector(kp.graph(), &w.vertices, v).ok().as_ref() == Some(pattern))
}
