//! Greedy homomorphisms along a degeneracy ordering, and the colouring
//! pipelines built on them.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::bitset::BitSet;
use crate::bounds::{
    ceil_log2, comprehensive_target_order, degeneracy_target_order, disconnected_target_order,
    full_part_size, BoundError, MaxDegreeCase,
};
use crate::coloring::{ColoringAssignment, ColoringKind};
use crate::exact::{chi2_coloring, ExactConfig};
use crate::graph::{degeneracy_ordering, two_dipath_conflict_graph, OrientedGraph, Vertex};
use crate::targets::{CertifiedTarget, FullKPartite, TargetError, TargetProvider, Tournament};
use crate::verify::{
    check_2dipath_coloring, check_homomorphism, check_oriented_coloring, Certificate, VerifyError,
    Witness,
};

#[derive(Debug, Error)]
pub enum GreedyError {
    #[error("Stuck at step {step} (vertex {vertex}): back set {back_set:?}, {forbidden} forbidden images")]
    Stuck {
        step: usize,
        vertex: Vertex,
        back_set: Vec<Vertex>,
        forbidden: usize,
    },
    #[error("PhiNotTwoDipath: guide colouring fails ({})", .0.tag)]
    PhiNotTwoDipath(Witness),
    #[error("TooManyGuideColors: colour {color} but only {parts} parts")]
    TooManyGuideColors { color: u32, parts: usize },
    #[error("BadInput: {0}")]
    BadInput(String),
    #[error("TargetUnavailable: {0}")]
    TargetUnavailable(#[from] TargetError),
    #[error("InvalidOutput: {0}")]
    InvalidOutput(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Bound(#[from] BoundError),
}

/// Bookkeeping of one greedy step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StepTrace {
    pub vertex: Vertex,
    /// Earlier neighbours of the vertex.
    pub back: usize,
    /// Distinct images excluded to keep future back sets injective.
    pub forbidden: usize,
    /// Target vertices that were admissible.
    pub eligible: usize,
}

#[derive(Clone, Debug)]
pub struct GreedyOutcome {
    /// Homomorphism-kind assignment of target vertex ids.
    pub map: ColoringAssignment,
    pub trace: Vec<StepTrace>,
}

/// Vertices of `target` whose arcs to the images of `back` match the
/// arcs between `v` and `back` in `g`.
fn matching_candidates(
    g: &OrientedGraph,
    v: Vertex,
    back: &[Vertex],
    image: &[u32],
    t_out: &[BitSet],
    t_in: &[BitSet],
    cand: &mut BitSet,
) {
    for &a in back {
        let ha = image[a] as usize;
        // v -> a needs h(v) -> h(a), i.e. h(v) in In(h(a)).
        if g.has_arc(v, a) {
            cand.intersect_with(&t_in[ha]);
        } else {
            cand.intersect_with(&t_out[ha]);
        }
    }
}

fn back_set(g: &OrientedGraph, v: Vertex, pos: &[usize]) -> Vec<Vertex> {
    let mut back: Vec<Vertex> = g
        .neighbors(v)
        .into_iter()
        .filter(|&u| pos[u] < pos[v])
        .collect();
    back.sort_unstable_by_key(|&u| pos[u]);
    back
}

/// Maps `g` into the tournament `target` vertex by vertex in degeneracy
/// order. Each image realises the sign vector of the vertex against its
/// back set and avoids the images of earlier vertices that share a later
/// common neighbour with it; ties go to the smallest target id.
pub fn greedy_homomorphism_to_tournament(
    g: &OrientedGraph,
    target: &Tournament,
) -> Result<GreedyOutcome, GreedyError> {
    let t = target.graph();
    let ordering = degeneracy_ordering(g);
    let pos = ordering.positions();
    let (t_out, t_in) = (t.out_sets(), t.in_sets());
    let mut image = vec![u32::MAX; g.n()];
    let mut trace = Vec::with_capacity(g.n());
    for (step, &v) in ordering.order.iter().enumerate() {
        let back = back_set(g, v, &pos);
        let mut cand = BitSet::full(t.n());
        matching_candidates(g, v, &back, &image, &t_out, &t_in, &mut cand);

        let mut forbidden = BitSet::new(t.n());
        for w in g.neighbors(v) {
            if pos[w] > step {
                for u in g.neighbors(w) {
                    if pos[u] < step {
                        forbidden.insert(image[u] as usize);
                    }
                }
            }
        }
        cand.difference_with(&forbidden);
        let eligible = cand.count();
        trace.push(StepTrace {
            vertex: v,
            back: back.len(),
            forbidden: forbidden.count(),
            eligible,
        });
        match cand.first() {
            Some(z) => image[v] = z as u32,
            None => {
                return Err(GreedyError::Stuck {
                    step,
                    vertex: v,
                    back_set: back,
                    forbidden: forbidden.count(),
                })
            }
        }
    }
    let map = ColoringAssignment::new(image, ColoringKind::Homomorphism);
    ensure_homomorphism(g, t, &map)?;
    Ok(GreedyOutcome { map, trace })
}

/// Maps `g` into the full k-partite `target`, sending each vertex into the
/// part named by its guide colour `phi` (colours `1..=k`, part `phi - 1`).
pub fn greedy_homomorphism_to_full(
    g: &OrientedGraph,
    target: &FullKPartite,
    phi: &ColoringAssignment,
) -> Result<GreedyOutcome, GreedyError> {
    let cert = check_2dipath_coloring(g, phi)?;
    if let Some(w) = cert.witness {
        return Err(GreedyError::PhiNotTwoDipath(w));
    }
    if let Some(&color) = phi.values().iter().find(|&&c| c as usize > target.parts()) {
        return Err(GreedyError::TooManyGuideColors {
            color,
            parts: target.parts(),
        });
    }
    let kg = target.graph();
    let ordering = degeneracy_ordering(g);
    let pos = ordering.positions();
    let (t_out, t_in) = (kg.out_sets(), kg.in_sets());
    let mut image = vec![u32::MAX; g.n()];
    let mut trace = Vec::with_capacity(g.n());
    for (step, &v) in ordering.order.iter().enumerate() {
        let back = back_set(g, v, &pos);
        let part = phi.get(v) as usize - 1;
        let mut cand = BitSet::new(kg.n());
        target.part_members(part).for_each(|x| cand.insert(x));
        matching_candidates(g, v, &back, &image, &t_out, &t_in, &mut cand);
        let eligible = cand.count();
        trace.push(StepTrace {
            vertex: v,
            back: back.len(),
            forbidden: 0,
            eligible,
        });
        match cand.first() {
            Some(z) => image[v] = z as u32,
            None => {
                return Err(GreedyError::Stuck {
                    step,
                    vertex: v,
                    back_set: back,
                    forbidden: 0,
                })
            }
        }
    }
    let map = ColoringAssignment::new(image, ColoringKind::Homomorphism);
    ensure_homomorphism(g, kg, &map)?;
    Ok(GreedyOutcome { map, trace })
}

fn ensure_homomorphism(
    g: &OrientedGraph,
    h: &OrientedGraph,
    map: &ColoringAssignment,
) -> Result<(), GreedyError> {
    let cert = check_homomorphism(g, h, map)?;
    match cert.witness {
        None => Ok(()),
        Some(w) => Err(GreedyError::InvalidOutput(format!(
            "greedy map breaks arc {:?}",
            w.vertices
        ))),
    }
}

fn ensure_oriented(g: &OrientedGraph, c: &ColoringAssignment) -> Result<Certificate, GreedyError> {
    let cert = check_oriented_coloring(g, c)?;
    if cert.passed() {
        Ok(cert)
    } else {
        Err(GreedyError::InvalidOutput(format!(
            "colouring fails the oriented check at {:?}",
            cert.witness.map(|w| w.vertices)
        )))
    }
}

/// Description of the target a pipeline mapped into.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TargetSummary {
    pub property: String,
    pub k: usize,
    pub t: usize,
    /// Tournament order, or part size for full targets.
    pub n: usize,
    pub seed: u64,
    pub order: usize,
}

impl TargetSummary {
    fn of(target: &CertifiedTarget) -> Self {
        TargetSummary {
            property: target.key.property.as_str().to_string(),
            k: target.key.k,
            t: target.key.t,
            n: target.key.n,
            seed: target.key.seed,
            order: target.graph.n(),
        }
    }
}

/// Result of a colouring pipeline; serializes to a versioned JSON record.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub schema: u32,
    pub strategy: String,
    pub colors_used: usize,
    pub budget: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    pub target: TargetSummary,
    pub target_digest: String,
    pub certificate: Certificate,
    #[serde(rename = "colors")]
    pub coloring: Vec<u32>,
}

impl PipelineReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn assignment(&self) -> ColoringAssignment {
        ColoringAssignment::new(self.coloring.clone(), ColoringKind::Oriented)
    }
}

fn to_usize(x: num_bigint::BigInt, what: &str) -> Result<usize, GreedyError> {
    x.to_usize()
        .ok_or_else(|| GreedyError::BadInput(format!("{what} = {x} is too large to build")))
}

/// Which comprehensiveness the disconnected regular case asks of its target.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DisconnectedTarget {
    /// `(delta, delta + 2)`.
    #[default]
    PlusTwo,
    /// `(delta, delta * delta)`, the degeneracy scheme at `d = delta`.
    Squared,
}

fn tournament_pipeline(
    g: &OrientedGraph,
    target: &CertifiedTarget,
    strategy: &str,
    budget: u128,
    case: Option<u8>,
) -> Result<PipelineReport, GreedyError> {
    let tour = target.tournament()?;
    let outcome = greedy_homomorphism_to_tournament(g, &tour)?;
    let coloring = outcome.map.pullback();
    let certificate = ensure_oriented(g, &coloring)?;
    Ok(PipelineReport {
        schema: 1,
        strategy: strategy.to_string(),
        colors_used: coloring.color_count(),
        budget,
        case,
        target: TargetSummary::of(target),
        target_digest: target.digest().to_string(),
        certificate,
        coloring: coloring.values().to_vec(),
    })
}

/// Maximum-degree pipeline. Case 1 (degeneracy below the maximum degree
/// `D`) maps into a `(D-1, D+1)`-comprehensive tournament of order
/// `ceil((ln2 + eps) D^2 2^D)`. Case 2 (connected and `D`-regular) colours
/// the graph minus its first arc that way and gives the arc's ends two new
/// colours. Case 3 (disconnected, degeneracy `D`) uses a
/// `(D, D+2)`-comprehensive tournament of order
/// `2 ceil((ln2 + eps)(D+1)^2 2^D)`.
pub fn color_via_maxdeg(
    g: &OrientedGraph,
    eps: &BigRational,
    provider: &TargetProvider,
    disconnected: DisconnectedTarget,
) -> Result<PipelineReport, GreedyError> {
    let delta = g.max_degree();
    if delta < 2 {
        return Err(GreedyError::BadInput(format!(
            "maximum degree {delta} is below 2"
        )));
    }
    let d = degeneracy_ordering(g).d;
    let dl = delta as u32;
    if d < delta {
        let n = to_usize(comprehensive_target_order(dl, eps)?, "target order")?;
        let target = provider.comprehensive(delta - 1, delta + 1, n)?;
        return tournament_pipeline(g, &target, "maxdeg", n as u128, Some(1));
    }
    if g.is_connected() {
        let (u, v) = g.arcs()[0];
        let rest = g.without_arc(u, v);
        let mut report = color_via_maxdeg(&rest, eps, provider, disconnected)?;
        let top = report.coloring.iter().copied().max().unwrap_or(0);
        report.coloring[u] = top + 1;
        report.coloring[v] = top + 2;
        let coloring = ColoringAssignment::new(report.coloring.clone(), ColoringKind::Oriented);
        report.certificate = ensure_oriented(g, &coloring)?;
        report.colors_used = coloring.color_count();
        report.budget += 2;
        report.case = Some(2);
        return Ok(report);
    }
    let n = to_usize(disconnected_target_order(dl, eps)?, "target order")?;
    let t = match disconnected {
        DisconnectedTarget::PlusTwo => delta + 2,
        DisconnectedTarget::Squared => delta * delta,
    };
    let target = provider.comprehensive(delta, t, n)?;
    tournament_pipeline(g, &target, "maxdeg", n as u128, Some(3))
}

/// Degeneracy pipeline: a `(d, d D)`-comprehensive tournament of order
/// `ceil((2 a ln2 + 2) a D^2 2^(a D))` with `a = d / D`.
pub fn color_via_degeneracy(
    g: &OrientedGraph,
    provider: &TargetProvider,
) -> Result<PipelineReport, GreedyError> {
    let delta = g.max_degree();
    let d = degeneracy_ordering(g).d;
    if d == 0 {
        return Err(GreedyError::BadInput("graph has no arcs".into()));
    }
    let n = to_usize(
        degeneracy_target_order(delta as u32, d as u32)?,
        "target order",
    )?;
    let target = provider.comprehensive(d, d * delta, n)?;
    tournament_pipeline(g, &target, "degeneracy", n as u128, None)
}

/// A 2-dipath colouring to guide [`color_via_2dipath`]: optimal when the
/// graph is within `cfg.chi_cap`, otherwise first-fit on the conflict graph
/// in its degeneracy order. Colours are `1..=k`.
pub fn guide_coloring(g: &OrientedGraph, cfg: &ExactConfig) -> ColoringAssignment {
    if g.n() <= cfg.chi_cap {
        if let Ok(c) = chi2_coloring(g, cfg) {
            return c.normalized(ColoringKind::TwoDipath);
        }
    }
    let conflict = two_dipath_conflict_graph(g);
    let order = conflict.degeneracy_ordering().order;
    let mut colors = vec![0u32; g.n()];
    for v in order {
        let used: Vec<u32> = conflict.neighbors(v).iter().map(|&u| colors[u]).collect();
        colors[v] = (1..).find(|c| !used.contains(c)).expect("a free colour");
    }
    ColoringAssignment::new(colors, ColoringKind::TwoDipath).normalized(ColoringKind::TwoDipath)
}

/// Two-dipath pipeline: with `k` guide colours and degeneracy `d`, set
/// `t = max(d, ceil(log2 k))` and map into a `(k, t)`-full orientation with
/// parts of size `ceil(33/10 t^2 2^t)`.
pub fn color_via_2dipath(
    g: &OrientedGraph,
    provider: &TargetProvider,
    cfg: &ExactConfig,
) -> Result<PipelineReport, GreedyError> {
    if g.arc_count() == 0 {
        return Err(GreedyError::BadInput("graph has no arcs".into()));
    }
    let phi = guide_coloring(g, cfg);
    let k = phi.color_count();
    let d = degeneracy_ordering(g).d;
    let t = d.max(ceil_log2(k as u64) as usize);
    let part = to_usize(full_part_size(t as u32), "part size")?;
    let target = provider.full(k, t, part)?;
    let kp = target.full()?;
    let outcome = greedy_homomorphism_to_full(g, &kp, &phi)?;
    let coloring = outcome.map.pullback();
    let certificate = ensure_oriented(g, &coloring)?;
    Ok(PipelineReport {
        schema: 1,
        strategy: "2dipath".to_string(),
        colors_used: coloring.color_count(),
        budget: (k * part) as u128,
        case: None,
        target: TargetSummary::of(&target),
        target_digest: target.digest().to_string(),
        certificate,
        coloring: coloring.values().to_vec(),
    })
}

/// Cases of the maximum-degree pipeline a graph falls into.
pub fn max_degree_case(g: &OrientedGraph) -> MaxDegreeCase {
    let d = degeneracy_ordering(g).d;
    if d < g.max_degree() {
        MaxDegreeCase::DegenerateBelowMax
    } else if g.is_connected() {
        MaxDegreeCase::ConnectedRegular
    } else {
        MaxDegreeCase::DisconnectedRegular
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{qr_tournament, SearchOptions};

    #[test]
    fn single_arc_into_triangle() {
        let g = OrientedGraph::from_arcs(2, [(0, 1)]).unwrap();
        let tri = qr_tournament(3).unwrap();
        let out = greedy_homomorphism_to_tournament(&g, &tri).unwrap();
        let (a, b) = (out.map.get(0) as usize, out.map.get(1) as usize);
        assert!(tri.graph().has_arc(a, b));
    }

    #[test]
    fn stuck_on_single_vertex_target() {
        let g = OrientedGraph::directed_cycle(5);
        let one = Tournament::try_from(OrientedGraph::empty(1)).unwrap();
        match greedy_homomorphism_to_tournament(&g, &one) {
            Err(GreedyError::Stuck { step, .. }) => assert_eq!(step, 1),
            other => panic!("expected Stuck, got {other:?}"),
        }
    }

    #[test]
    fn full_rejects_bad_guide() {
        let g = OrientedGraph::directed_path(3);
        let kp = crate::targets::random_full(2, 4, 1).unwrap();
        let phi = ColoringAssignment::new(vec![1, 2, 1], ColoringKind::TwoDipath);
        assert!(matches!(
            greedy_homomorphism_to_full(&g, &kp, &phi),
            Err(GreedyError::PhiNotTwoDipath(_))
        ));
    }

    #[test]
    fn single_vertex_into_full() {
        let g = OrientedGraph::empty(1);
        let kp = crate::targets::random_full(3, 4, 1).unwrap();
        let phi = ColoringAssignment::new(vec![2], ColoringKind::TwoDipath);
        let out = greedy_homomorphism_to_full(&g, &kp, &phi).unwrap();
        assert_eq!(out.map.values(), &[4]);
    }

    #[test]
    fn cycle_takes_case_two() {
        let provider = TargetProvider::new(SearchOptions::new(5, 50), None);
        let g = OrientedGraph::directed_cycle(6);
        let eps = BigRational::from_integer(1.into());
        let r = color_via_maxdeg(&g, &eps, &provider, DisconnectedTarget::PlusTwo).unwrap();
        assert_eq!(r.case, Some(2));
        assert!(r.certificate.passed());
        assert!(r.colors_used as u128 <= r.budget);
        assert_eq!(r.budget, 28 + 2);
        let top = *r.coloring.iter().max().unwrap();
        for fresh in [top, top - 1] {
            assert_eq!(r.coloring.iter().filter(|&&c| c == fresh).count(), 1);
        }
    }

    #[test]
    fn guide_coloring_is_valid() {
        let g = OrientedGraph::directed_path(10);
        let phi = guide_coloring(&g, &ExactConfig::default());
        assert_eq!(phi.color_count(), 3);
        assert!(check_2dipath_coloring(&g, &phi).unwrap().passed());
        let tight = ExactConfig {
            chi_cap: 4,
            ..ExactConfig::default()
        };
        let greedy = guide_coloring(&g, &tight);
        assert!(check_2dipath_coloring(&g, &greedy).unwrap().passed());
    }
}
