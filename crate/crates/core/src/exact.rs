//! Exhaustive oracles for small instances.

use thiserror::Error;

use crate::coloring::{ColoringAssignment, ColoringKind};
use crate::graph::{two_dipath_conflict_graph, OrientedGraph, SimpleGraph};
use crate::verify::check_comprehensive;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("TooLarge: {n} vertices exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("SearchSpaceTooLarge: {candidates} candidate tournaments exceed the limit of {limit}")]
    SearchSpaceTooLarge { candidates: u128, limit: u128 },
}

/// Size caps for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactConfig {
    /// Vertex cap for `chromatic_number` and `chi2_exact` (at most 64).
    pub chi_cap: usize,
    /// Vertex cap for `chio_exact`.
    pub chio_cap: usize,
    /// Largest number of tournaments `min_comprehensive_order` may visit.
    pub enumeration_limit: u128,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            chi_cap: 16,
            chio_cap: 12,
            enumeration_limit: 1 << 22,
        }
    }
}

fn check_cap(n: usize, cap: usize) -> Result<(), ExactError> {
    if n > cap || n > 64 {
        Err(ExactError::TooLarge {
            n,
            cap: cap.min(64),
        })
    } else {
        Ok(())
    }
}

/// Exact chromatic number with an optimal colouring (colours `1..=chi`).
pub fn chromatic_coloring(
    g: &SimpleGraph,
    cfg: &ExactConfig,
) -> Result<(usize, Vec<u32>), ExactError> {
    check_cap(g.n(), cfg.chi_cap)?;
    let adj: Vec<u64> = (0..g.n())
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    Ok(Dsatur::solve(&adj))
}

pub fn chromatic_number(g: &SimpleGraph, cfg: &ExactConfig) -> Result<usize, ExactError> {
    chromatic_coloring(g, cfg).map(|(chi, _)| chi)
}

/// DSatur branch and bound over adjacency bitmasks.
struct Dsatur<'a> {
    adj: &'a [u64],
    colors: Vec<u32>,
    best: Vec<u32>,
    best_count: usize,
    lower: usize,
}

impl<'a> Dsatur<'a> {
    fn solve(adj: &'a [u64]) -> (usize, Vec<u32>) {
        let n = adj.len();
        if n == 0 {
            return (0, Vec::new());
        }
        let mut s = Dsatur {
            adj,
            colors: vec![0; n],
            best: Vec::new(),
            best_count: n + 1,
            lower: greedy_clique(adj),
        };
        s.branch(0, 0);
        (s.best_count, s.best)
    }

    /// Bitmask of colours (bit `c - 1`) present around `v`.
    fn around(&self, v: usize) -> u64 {
        let mut m = self.adj[v];
        let mut seen = 0u64;
        while m != 0 {
            let u = m.trailing_zeros() as usize;
            m &= m - 1;
            if self.colors[u] != 0 {
                seen |= 1 << (self.colors[u] - 1);
            }
        }
        seen
    }

    fn branch(&mut self, colored: usize, used: usize) {
        if self.best_count <= self.lower {
            return;
        }
        let n = self.adj.len();
        if colored == n {
            self.best_count = used;
            self.best = self.colors.clone();
            return;
        }
        let mut pick = usize::MAX;
        let mut key = (0u32, 0u32);
        let mut pick_seen = 0;
        for v in 0..n {
            if self.colors[v] != 0 {
                continue;
            }
            let seen = self.around(v);
            let free_deg = (0..n)
                .filter(|&u| self.adj[v] >> u & 1 == 1 && self.colors[u] == 0)
                .count() as u32;
            let k = (seen.count_ones(), free_deg);
            if pick == usize::MAX || k > key {
                pick = v;
                key = k;
                pick_seen = seen;
            }
        }
        for c in 1..=used as u32 + 1 {
            let total = used.max(c as usize);
            if total >= self.best_count {
                break;
            }
            if pick_seen >> (c - 1) & 1 == 1 {
                continue;
            }
            self.colors[pick] = c;
            self.branch(colored + 1, total);
            self.colors[pick] = 0;
            if self.best_count <= self.lower {
                return;
            }
        }
    }
}

fn greedy_clique(adj: &[u64]) -> usize {
    let n = adj.len();
    (0..n)
        .map(|start| {
            let mut cand = adj[start];
            let mut size = 1;
            while cand != 0 {
                let v = (0..n)
                    .filter(|&u| cand >> u & 1 == 1)
                    .max_by_key(|&u| ((adj[u] & cand).count_ones(), usize::MAX - u))
                    .expect("non-empty candidate set");
                size += 1;
                cand &= adj[v];
            }
            size
        })
        .max()
        .unwrap_or(0)
}

/// Minimum 2-dipath colouring.
pub fn chi2_coloring(
    g: &OrientedGraph,
    cfg: &ExactConfig,
) -> Result<ColoringAssignment, ExactError> {
    check_cap(g.n(), cfg.chi_cap)?;
    let (_, colors) = chromatic_coloring(&two_dipath_conflict_graph(g), cfg)?;
    Ok(ColoringAssignment::new(colors, ColoringKind::TwoDipath))
}

pub fn chi2_exact(g: &OrientedGraph, cfg: &ExactConfig) -> Result<usize, ExactError> {
    chi2_coloring(g, cfg).map(|c| c.color_count())
}

/// Minimum oriented colouring, found by trying `k = chi2, chi2 + 1, ...`.
pub fn chio_coloring(
    g: &OrientedGraph,
    cfg: &ExactConfig,
) -> Result<ColoringAssignment, ExactError> {
    check_cap(g.n(), cfg.chio_cap)?;
    let n = g.n();
    if n == 0 {
        return Ok(ColoringAssignment::new(Vec::new(), ColoringKind::Oriented));
    }
    let lower = chi2_exact(
        g,
        &ExactConfig {
            chi_cap: 64,
            ..*cfg
        },
    )?;
    let mut search = OrientedSearch::new(g);
    for k in lower..=n {
        if let Some(colors) = search.run(k) {
            return Ok(ColoringAssignment::new(colors, ColoringKind::Oriented));
        }
    }
    unreachable!("n distinct colours always form an oriented colouring")
}

pub fn chio_exact(g: &OrientedGraph, cfg: &ExactConfig) -> Result<usize, ExactError> {
    chio_coloring(g, cfg).map(|c| c.color_count())
}

/// Backtracking over colourings while maintaining, for every ordered colour
/// pair, how many arcs currently run from the first to the second class.
struct OrientedSearch {
    order: Vec<usize>,
    /// For the i-th vertex of `order`: earlier neighbours, with `true` when
    /// the arc leaves the current vertex.
    back: Vec<Vec<(usize, bool)>>,
    colors: Vec<u32>,
    between: Vec<u32>,
    k: usize,
}

impl OrientedSearch {
    fn new(g: &OrientedGraph) -> Self {
        let n = g.n();
        let mut placed = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let back = g.neighbors(v).iter().filter(|&&u| placed[u]).count();
                    (back, g.degree(v), usize::MAX - v)
                })
                .expect("unplaced vertex");
            placed[v] = true;
            order.push(v);
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let mut b: Vec<(usize, bool)> = g
                    .out_neighbors(v)
                    .iter()
                    .map(|&u| (u, true))
                    .chain(g.in_neighbors(v).iter().map(|&u| (u, false)))
                    .filter(|&(u, _)| pos[u] < i)
                    .collect();
                b.sort_unstable();
                b
            })
            .collect();
        OrientedSearch {
            order,
            back,
            colors: vec![0; n],
            between: Vec::new(),
            k: 0,
        }
    }

    fn run(&mut self, k: usize) -> Option<Vec<u32>> {
        self.k = k;
        self.between = vec![0; (k + 1) * (k + 1)];
        self.colors.iter_mut().for_each(|c| *c = 0);
        if self.place(0, 0) {
            Some(self.colors.clone())
        } else {
            None
        }
    }

    #[inline]
    fn slot(&self, from: u32, to: u32) -> usize {
        from as usize * (self.k + 1) + to as usize
    }

    fn place(&mut self, i: usize, used: u32) -> bool {
        if i == self.order.len() {
            return true;
        }
        let v = self.order[i];
        let top = (used + 1).min(self.k as u32);
        for c in 1..=top {
            let mut added = 0;
            let mut ok = true;
            for j in 0..self.back[i].len() {
                let (u, outgoing) = self.back[i][j];
                let cu = self.colors[u];
                if cu == c {
                    ok = false;
                    break;
                }
                let (from, to) = if outgoing { (c, cu) } else { (cu, c) };
                let reverse = self.slot(to, from);
                if self.between[reverse] != 0 {
                    ok = false;
                    break;
                }
                let s = self.slot(from, to);
                self.between[s] += 1;
                added += 1;
            }
            if ok {
                self.colors[v] = c;
                if self.place(i + 1, used.max(c)) {
                    return true;
                }
                self.colors[v] = 0;
            }
            for j in 0..added {
                let (u, outgoing) = self.back[i][j];
                let cu = self.colors[u];
                let (from, to) = if outgoing { (c, cu) } else { (cu, c) };
                let s = self.slot(from, to);
                self.between[s] -= 1;
            }
        }
        false
    }
}

/// Smallest `n <= n_max` such that some tournament on `n` vertices is
/// `(k, t)`-comprehensive, by exhaustive enumeration.
///
/// Relabelling lets vertex 0 dominate exactly `1..=j` for its out-degree
/// `j`; candidates with a vertex of in- or out-degree below `t * 2^(k-1)`
/// are discarded before certification.
pub fn min_comprehensive_order(
    k: usize,
    t: usize,
    n_max: usize,
    cfg: &ExactConfig,
) -> Result<Option<usize>, ExactError> {
    if k == 0 || t == 0 {
        return Ok(None);
    }
    let candidates: u128 = (k + 1..=n_max)
        .map(|n| {
            let free = (n - 1) * (n - 2) / 2;
            if free >= 120 {
                u128::MAX / 2
            } else {
                n as u128 * (1u128 << free)
            }
        })
        .fold(0u128, |a, b| a.saturating_add(b));
    if candidates > cfg.enumeration_limit {
        return Err(ExactError::SearchSpaceTooLarge {
            candidates,
            limit: cfg.enumeration_limit,
        });
    }
    let need = t.checked_shl(k as u32 - 1).unwrap_or(usize::MAX);
    for n in k + 1..=n_max {
        if exists_comprehensive(n, k, t, need) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

fn exists_comprehensive(n: usize, k: usize, t: usize, need: usize) -> bool {
    if n < 2 * need + 1 {
        return false;
    }
    let pairs: Vec<(usize, usize)> = (1..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut out_deg = vec![0usize; n];
    let mut arcs = Vec::with_capacity(n * (n - 1) / 2);
    for j in need..=n - 1 - need {
        for mask in 0u64..1 << pairs.len() {
            out_deg.iter_mut().for_each(|d| *d = 0);
            arcs.clear();
            out_deg[0] = j;
            for v in 1..n {
                if v <= j {
                    arcs.push((0, v));
                } else {
                    arcs.push((v, 0));
                    out_deg[v] += 1;
                }
            }
            for (b, &(u, v)) in pairs.iter().enumerate() {
                let (from, to) = if mask >> b & 1 == 1 { (u, v) } else { (v, u) };
                out_deg[from] += 1;
                arcs.push((from, to));
            }
            if out_deg.iter().any(|&d| d < need || n - 1 - d < need) {
                continue;
            }
            arcs.sort_unstable();
            let g = OrientedGraph::from_sorted_unchecked(n, arcs.clone());
            if check_comprehensive(&g, k, t, 1).is_ok_and(|c| c.passed()) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::oriented_subdivision;
    use crate::verify::check_oriented_coloring;

    fn cfg() -> ExactConfig {
        ExactConfig::default()
    }

    #[test]
    fn chromatic_small_graphs() {
        assert_eq!(
            chromatic_number(&SimpleGraph::complete(4), &cfg()).unwrap(),
            4
        );
        assert_eq!(chromatic_number(&SimpleGraph::cycle(5), &cfg()).unwrap(), 3);
        assert_eq!(chromatic_number(&SimpleGraph::cycle(6), &cfg()).unwrap(), 2);
        assert_eq!(chromatic_number(&SimpleGraph::empty(5), &cfg()).unwrap(), 1);
        assert_eq!(chromatic_number(&SimpleGraph::empty(0), &cfg()).unwrap(), 0);
        assert!(matches!(
            chromatic_number(&SimpleGraph::empty(17), &cfg()),
            Err(ExactError::TooLarge { n: 17, cap: 16 })
        ));
    }

    #[test]
    fn petersen_is_three_chromatic() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (i + 5, (i + 2) % 5 + 5));
        let g = SimpleGraph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap();
        assert_eq!(chromatic_number(&g, &cfg()).unwrap(), 3);
    }

    #[test]
    fn chi2_values() {
        assert_eq!(
            chi2_exact(&OrientedGraph::directed_path(4), &cfg()).unwrap(),
            3
        );
        assert_eq!(
            chi2_exact(&OrientedGraph::directed_cycle(3), &cfg()).unwrap(),
            3
        );
        assert_eq!(
            chi2_exact(&OrientedGraph::directed_path(2), &cfg()).unwrap(),
            2
        );
    }

    #[test]
    fn chio_values() {
        assert_eq!(
            chio_exact(&OrientedGraph::directed_path(4), &cfg()).unwrap(),
            3
        );
        assert_eq!(
            chio_exact(&OrientedGraph::directed_cycle(3), &cfg()).unwrap(),
            3
        );
        // The directed 5-cycle needs all five colours.
        assert_eq!(
            chio_exact(&OrientedGraph::directed_cycle(5), &cfg()).unwrap(),
            5
        );
        assert_eq!(
            chio_exact(&OrientedGraph::directed_cycle(4), &cfg()).unwrap(),
            4
        );
        let c = chio_coloring(&OrientedGraph::directed_cycle(6), &cfg()).unwrap();
        assert!(
            check_oriented_coloring(&OrientedGraph::directed_cycle(6), &c)
                .unwrap()
                .passed()
        );
    }

    #[test]
    fn chio_of_tournaments_is_order() {
        for n in 1..=6 {
            let t = crate::targets::random_tournament(n, n as u64);
            assert_eq!(chio_exact(t.graph(), &cfg()).unwrap(), n);
        }
    }

    #[test]
    fn subdivided_k4() {
        let h = oriented_subdivision(&SimpleGraph::complete(4));
        assert!(chio_exact(&h, &cfg()).unwrap() >= 4);
    }

    #[test]
    fn min_order_tiny() {
        assert_eq!(min_comprehensive_order(1, 1, 3, &cfg()).unwrap(), Some(3));
        assert_eq!(min_comprehensive_order(1, 1, 2, &cfg()).unwrap(), None);
        assert!(matches!(
            min_comprehensive_order(2, 1, 9, &cfg()),
            Err(ExactError::SearchSpaceTooLarge { .. })
        ));
    }
}
