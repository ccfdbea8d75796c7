//! Oriented and simple graphs, the edge-list text format, degeneracy
//! orderings and the two derived constructions used throughout the crate
//! (the 2-dipath conflict graph and the oriented subdivision).

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;

pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("SelfLoop: vertex {vertex}")]
    SelfLoop { vertex: Vertex },
    #[error("DuplicateArc: ({u}, {v})")]
    DuplicateArc { u: Vertex, v: Vertex },
    #[error("AntiparallelPair: ({u}, {v}) and ({v}, {u})")]
    AntiparallelPair { u: Vertex, v: Vertex },
    #[error("BadVertexId: {vertex} is not below {n}")]
    BadVertexId { vertex: Vertex, n: usize },
    #[error("NotAdjacent: entry {index} of the vertex list is not a neighbour")]
    NotAdjacent { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("MissingHeader: expected a leading `n <count>` line")]
    MissingHeader,
    #[error("BadHeader at line {line}")]
    BadHeader { line: usize },
    #[error("Malformed at line {line}: expected `u v`")]
    Malformed { line: usize },
    #[error("SelfLoop at line {line}: vertex {vertex}")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("DuplicateArc at line {line}: ({u}, {v})")]
    DuplicateArc { line: usize, u: Vertex, v: Vertex },
    #[error("AntiparallelPair at line {line}: ({u}, {v}) reverses an earlier arc")]
    AntiparallelPair { line: usize, u: Vertex, v: Vertex },
    #[error("BadVertexId at line {line}: `{token}`")]
    BadVertexId { line: usize, token: String },
}

/// A directed graph whose underlying graph is simple.
///
/// Arcs are kept sorted lexicographically; adjacency lists are sorted.
#[derive(Clone, PartialEq, Eq)]
pub struct OrientedGraph {
    n: usize,
    arcs: Vec<(Vertex, Vertex)>,
    out: Vec<Vec<Vertex>>,
    inn: Vec<Vec<Vertex>>,
}

impl fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrientedGraph")
            .field("n", &self.n)
            .field("arcs", &self.arcs)
            .finish()
    }
}

impl OrientedGraph {
    pub fn empty(n: usize) -> Self {
        OrientedGraph {
            n,
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
            inn: vec![Vec::new(); n],
        }
    }

    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut seen = BTreeSet::new();
        for (u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::BadVertexId { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            if seen.contains(&(v, u)) {
                return Err(GraphError::AntiparallelPair { u, v });
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateArc { u, v });
            }
        }
        Ok(Self::from_sorted_unchecked(n, seen.into_iter().collect()))
    }

    /// Builds from arcs already known to be valid and sorted.
    pub(crate) fn from_sorted_unchecked(n: usize, arcs: Vec<(Vertex, Vertex)>) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in &arcs {
            out[u].push(v);
            inn[v].push(u);
        }
        for l in inn.iter_mut() {
            l.sort_unstable();
        }
        OrientedGraph { n, arcs, out, inn }
    }

    /// Parses the edge-list format: a header `n <count>` followed by one
    /// `u v` line per arc `u -> v`. Blank lines and `#` comments are
    /// ignored. Vertex tokens are either all numeric ids in `[0, n)` or
    /// arbitrary names, interned in order of first appearance.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut n: Option<usize> = None;
        let mut named: Option<bool> = None;
        let mut names: HashMap<String, Vertex> = HashMap::new();
        let mut seen: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            let Some(count) = n else {
                if toks.len() != 2 || toks[0] != "n" {
                    return Err(ParseError::MissingHeader);
                }
                n = Some(
                    toks[1]
                        .parse()
                        .map_err(|_| ParseError::BadHeader { line })?,
                );
                continue;
            };
            if toks.len() != 2 {
                return Err(ParseError::Malformed { line });
            }
            let is_named = toks.iter().any(|t| t.parse::<usize>().is_err());
            let mode = *named.get_or_insert(is_named);
            let mut ids = [0; 2];
            for (slot, tok) in ids.iter_mut().zip(&toks) {
                *slot = if mode {
                    let next = names.len();
                    let id = *names.entry(tok.to_string()).or_insert(next);
                    if id >= count {
                        return Err(ParseError::BadVertexId {
                            line,
                            token: tok.to_string(),
                        });
                    }
                    id
                } else {
                    match tok.parse::<usize>() {
                        Ok(id) if id < count => id,
                        _ => {
                            return Err(ParseError::BadVertexId {
                                line,
                                token: tok.to_string(),
                            })
                        }
                    }
                };
            }
            let [u, v] = ids;
            if u == v {
                return Err(ParseError::SelfLoop { line, vertex: u });
            }
            if seen.contains(&(v, u)) {
                return Err(ParseError::AntiparallelPair { line, u, v });
            }
            if !seen.insert((u, v)) {
                return Err(ParseError::DuplicateArc { line, u, v });
            }
        }
        let n = n.ok_or(ParseError::MissingHeader)?;
        Ok(Self::from_sorted_unchecked(n, seen.into_iter().collect()))
    }

    /// Canonical serialization: header then arcs in lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        for (u, v) in &self.arcs {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn arcs(&self) -> &[(Vertex, Vertex)] {
        &self.arcs
    }

    #[inline]
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    #[inline]
    pub fn out_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.out[v]
    }

    #[inline]
    pub fn in_neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.inn[v]
    }

    /// Underlying neighbourhood, sorted.
    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let mut all: Vec<Vertex> = self.out[v].iter().chain(&self.inn[v]).copied().collect();
        all.sort_unstable();
        all
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.out[v].len() + self.inn[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    #[inline]
    pub fn has_arc(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.out[u].binary_search(&v).is_ok()
    }

    #[inline]
    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.has_arc(u, v) || self.has_arc(v, u)
    }

    pub fn underlying(&self) -> SimpleGraph {
        let edges = self
            .arcs
            .iter()
            .map(|&(u, v)| (u.min(v), u.max(v)))
            .collect();
        SimpleGraph::from_sorted_unchecked(self.n, sorted(edges))
    }

    pub fn is_tournament(&self) -> bool {
        self.arcs.len() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_connected(&self) -> bool {
        self.underlying().is_connected()
    }

    /// Copy of the graph with one arc removed.
    pub fn without_arc(&self, u: Vertex, v: Vertex) -> OrientedGraph {
        let arcs = self.arcs.iter().copied().filter(|&a| a != (u, v)).collect();
        Self::from_sorted_unchecked(self.n, arcs)
    }

    /// Out-neighbourhoods as bitsets.
    pub fn out_sets(&self) -> Vec<BitSet> {
        self.out
            .iter()
            .map(|l| {
                let mut s = BitSet::new(self.n);
                l.iter().for_each(|&w| s.insert(w));
                s
            })
            .collect()
    }

    /// In-neighbourhoods as bitsets.
    pub fn in_sets(&self) -> Vec<BitSet> {
        self.inn
            .iter()
            .map(|l| {
                let mut s = BitSet::new(self.n);
                l.iter().for_each(|&w| s.insert(w));
                s
            })
            .collect()
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &OrientedGraph) -> OrientedGraph {
        let shift = self.n;
        let arcs = self
            .arcs
            .iter()
            .copied()
            .chain(other.arcs.iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        Self::from_sorted_unchecked(self.n + other.n, sorted(arcs))
    }

    pub fn directed_path(n: usize) -> Self {
        Self::from_sorted_unchecked(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn directed_cycle(n: usize) -> Self {
        assert!(n >= 3, "a directed cycle needs at least 3 vertices");
        let arcs = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_sorted_unchecked(n, sorted(arcs))
    }
}

fn sorted(mut v: Vec<(Vertex, Vertex)>) -> Vec<(Vertex, Vertex)> {
    v.sort_unstable();
    v
}

/// An undirected simple graph; edges stored as `(min, max)` pairs, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl SimpleGraph {
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut seen = BTreeSet::new();
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::BadVertexId { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateArc { u, v });
            }
        }
        Ok(Self::from_sorted_unchecked(n, seen.into_iter().collect()))
    }

    fn from_sorted_unchecked(n: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
        }
        SimpleGraph { n, edges, adj }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_sorted_unchecked(n, edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let edges = (0..n)
            .map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))
            .collect();
        Self::from_sorted_unchecked(n, sorted(edges))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_unchecked(n, Vec::new())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    pub fn degeneracy_ordering(&self) -> DegeneracyOrdering {
        degeneracy_from_adjacency(&self.adj)
    }
}

/// A vertex ordering in which every vertex has at most `d` neighbours
/// before it; `d` is attained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegeneracyOrdering {
    pub order: Vec<Vertex>,
    pub d: usize,
}

impl DegeneracyOrdering {
    /// `position[v]` is the index of `v` in `order`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v] = i;
        }
        pos
    }
}

/// Repeated minimum-degree removal with ties broken by smallest id; the
/// ordering is the reverse of the removal sequence.
fn degeneracy_from_adjacency(adj: &[Vec<Vertex>]) -> DegeneracyOrdering {
    let n = adj.len();
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut queue: BTreeSet<(usize, Vertex)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut removed = vec![false; n];
    let mut removal = Vec::with_capacity(n);
    let mut d = 0;
    while let Some((k, v)) = queue.pop_first() {
        d = d.max(k);
        removed[v] = true;
        removal.push(v);
        for &w in &adj[v] {
            if !removed[w] {
                queue.remove(&(deg[w], w));
                deg[w] -= 1;
                queue.insert((deg[w], w));
            }
        }
    }
    removal.reverse();
    DegeneracyOrdering { order: removal, d }
}

pub fn degeneracy_ordering(g: &OrientedGraph) -> DegeneracyOrdering {
    let adj: Vec<Vec<Vertex>> = (0..g.n()).map(|v| g.neighbors(v)).collect();
    degeneracy_from_adjacency(&adj)
}

/// Conflict graph whose proper colourings are exactly the 2-dipath
/// colourings of `g`: the underlying graph plus `{u, w}` for every
/// directed path `u -> v -> w`.
pub fn two_dipath_conflict_graph(g: &OrientedGraph) -> SimpleGraph {
    let mut edges: BTreeSet<(Vertex, Vertex)> = g
        .arcs()
        .iter()
        .map(|&(u, v)| (u.min(v), u.max(v)))
        .collect();
    for v in 0..g.n() {
        for &u in g.in_neighbors(v) {
            for &w in g.out_neighbors(v) {
                edges.insert((u.min(w), u.max(w)));
            }
        }
    }
    SimpleGraph::from_sorted_unchecked(g.n(), edges.into_iter().collect())
}

/// Replaces each edge `{u, v}` (`u < v`) of `g`, in sorted edge order, by a
/// fresh vertex `x` and arcs `u -> x -> v`.
pub fn oriented_subdivision(g: &SimpleGraph) -> OrientedGraph {
    let n = g.n();
    let mut arcs = Vec::with_capacity(2 * g.edges().len());
    for (i, &(u, v)) in g.edges().iter().enumerate() {
        let x = n + i;
        arcs.push((u, x));
        arcs.push((x, v));
    }
    OrientedGraph::from_sorted_unchecked(n + g.edges().len(), sorted(arcs))
}

/// A vector over `{-1, +1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Option<Self> {
        entries
            .iter()
            .all(|&e| e == 1 || e == -1)
            .then_some(SignVector(entries))
    }

    /// The vector whose entry `j` is `+1` iff bit `len - 1 - j` of `index`
    /// is set, so increasing indices enumerate vectors lexicographically
    /// with `-1 < +1`.
    pub fn from_index(index: usize, len: usize) -> Self {
        SignVector(
            (0..len)
                .map(|j| {
                    if index >> (len - 1 - j) & 1 == 1 {
                        1
                    } else {
                        -1
                    }
                })
                .collect(),
        )
    }

    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0, |acc, &e| (acc << 1) | usize::from(e == 1))
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", if *e == 1 { "+1" } else { "-1" })?;
        }
        write!(f, ")")
    }
}

/// `F(A, v)`: entry `i` is `+1` if the arc `v -> A[i]` exists and `-1` if
/// `A[i] -> v` exists.
pub fn orientation_vector(
    g: &OrientedGraph,
    set: &[Vertex],
    v: Vertex,
) -> Result<SignVector, GraphError> {
    set.iter()
        .enumerate()
        .map(|(index, &a)| {
            if g.has_arc(v, a) {
                Ok(1)
            } else if g.has_arc(a, v) {
                Ok(-1)
            } else {
                Err(GraphError::NotAdjacent { index })
            }
        })
        .collect::<Result<Vec<i8>, _>>()
        .map(SignVector)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn back_degrees(g: &SimpleGraph, ord: &DegeneracyOrdering) -> Vec<usize> {
        let pos = ord.positions();
        ord.order
            .iter()
            .map(|&v| g.neighbors(v).iter().filter(|&&w| pos[w] < pos[v]).count())
            .collect()
    }

    #[test]
    fn parse_smallest_graph() {
        let g = OrientedGraph::parse("n 2\n0 1").unwrap();
        assert_eq!(g.arcs(), &[(0, 1)]);
    }

    #[test]
    fn parse_rejects_antiparallel() {
        assert_eq!(
            OrientedGraph::parse("n 2\n0 1\n1 0"),
            Err(ParseError::AntiparallelPair {
                line: 3,
                u: 1,
                v: 0
            })
        );
    }

    #[test]
    fn parse_errors_name_lines() {
        assert_eq!(
            OrientedGraph::parse("n 3\n# c\n\n0 0"),
            Err(ParseError::SelfLoop { line: 4, vertex: 0 })
        );
        assert_eq!(
            OrientedGraph::parse("n 3\n0 1\n0 1"),
            Err(ParseError::DuplicateArc {
                line: 3,
                u: 0,
                v: 1
            })
        );
        assert!(matches!(
            OrientedGraph::parse("n 3\n0 3"),
            Err(ParseError::BadVertexId { line: 2, .. })
        ));
        assert_eq!(OrientedGraph::parse("0 1"), Err(ParseError::MissingHeader));
        assert_eq!(
            OrientedGraph::parse("n 3\n0 1 2"),
            Err(ParseError::Malformed { line: 2 })
        );
    }

    #[test]
    fn parse_interns_names_in_first_appearance_order() {
        let g = OrientedGraph::parse("n 3\nb a # comment\na c\n").unwrap();
        assert_eq!(g.arcs(), &[(0, 1), (1, 2)]);
        assert!(matches!(
            OrientedGraph::parse("n 2\nx y\ny z"),
            Err(ParseError::BadVertexId { line: 3, .. })
        ));
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_ordering(&OrientedGraph::directed_path(5)).d, 1);
        let k4 =
            OrientedGraph::from_arcs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(degeneracy_ordering(&k4).d, 3);
        let sub = oriented_subdivision(&SimpleGraph::complete(4));
        assert_eq!((sub.n(), sub.arc_count()), (10, 12));
        assert_eq!(degeneracy_ordering(&sub).d, 2);
    }

    #[test]
    fn degeneracy_ordering_is_tight() {
        let g =
            SimpleGraph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]).unwrap();
        let ord = g.degeneracy_ordering();
        let back = back_degrees(&g, &ord);
        assert_eq!(*back.iter().max().unwrap(), ord.d);
        assert_eq!(ord.d, 2);
    }

    #[test]
    fn conflict_graph_examples() {
        let p3 = OrientedGraph::directed_path(3);
        assert_eq!(
            two_dipath_conflict_graph(&p3).edges(),
            &[(0, 1), (0, 2), (1, 2)]
        );
        let star = OrientedGraph::from_arcs(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(two_dipath_conflict_graph(&star), star.underlying());
    }

    #[test]
    fn subdivision_shapes() {
        let e = SimpleGraph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(oriented_subdivision(&e).arcs(), &[(0, 2), (2, 1)]);
        let tri = oriented_subdivision(&SimpleGraph::cycle(3));
        assert_eq!(tri.n(), 6);
        assert!((0..6).all(|v| tri.degree(v) == 2));
        assert!(tri.is_connected());
        for x in 3..6 {
            assert_eq!(
                (tri.in_neighbors(x).len(), tri.out_neighbors(x).len()),
                (1, 1)
            );
        }
    }

    #[test]
    fn orientation_vector_definition() {
        let g = OrientedGraph::from_arcs(2, [(1, 0)]).unwrap();
        assert_eq!(orientation_vector(&g, &[0], 1).unwrap().entries(), &[1]);
        assert_eq!(orientation_vector(&g, &[1], 0).unwrap().entries(), &[-1]);
        let h = OrientedGraph::from_arcs(3, [(1, 0)]).unwrap();
        assert_eq!(
            orientation_vector(&h, &[0, 2], 1),
            Err(GraphError::NotAdjacent { index: 1 })
        );
    }

    #[test]
    fn sign_vector_index_round_trip() {
        for len in 0..5 {
            for i in 0..1usize << len {
                let s = SignVector::from_index(i, len);
                assert_eq!(s.index(), i);
            }
        }
        assert_eq!(SignVector::from_index(0b10, 2).entries(), &[1, -1]);
    }
}
