//! Small reference graphs with known verdicts.

use serde::Serialize;

use crate::coloring::{ColoringAssignment, ColoringKind};
use crate::graph::{oriented_subdivision, OrientedGraph, SimpleGraph};
use crate::targets::qr_tournament;
use crate::verify::{
    check_2dipath_coloring, check_comprehensive, check_homomorphism, check_oriented_coloring,
    Certificate, VerifyError,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    Oriented,
    TwoDipath,
    Homomorphism,
    Comprehensive { k: usize, t: usize },
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub graph: OrientedGraph,
    pub coloring: Option<ColoringAssignment>,
    /// Codomain of `coloring` when it is a homomorphism.
    pub target: Option<OrientedGraph>,
    /// Checks with their expected verdict (`true` = PASS).
    pub expectations: Vec<(Check, bool)>,
}

impl Fixture {
    pub fn run(&self, check: Check) -> Result<Certificate, VerifyError> {
        let missing = || {
            VerifyError::BadParameters(format!(
                "fixture {} lacks the data for {check:?}",
                self.name
            ))
        };
        match check {
            Check::Oriented => {
                check_oriented_coloring(&self.graph, self.coloring.as_ref().ok_or_else(missing)?)
            }
            Check::TwoDipath => {
                check_2dipath_coloring(&self.graph, self.coloring.as_ref().ok_or_else(missing)?)
            }
            Check::Homomorphism => check_homomorphism(
                &self.graph,
                self.target.as_ref().ok_or_else(missing)?,
                self.coloring.as_ref().ok_or_else(missing)?,
            ),
            Check::Comprehensive { k, t } => check_comprehensive(&self.graph, k, t, 1),
        }
    }
}

fn graph(n: usize, arcs: &[(usize, usize)]) -> OrientedGraph {
    OrientedGraph::from_arcs(n, arcs.iter().copied()).expect("fixture arcs are valid")
}

fn oriented(name: &'static str, g: OrientedGraph, colors: &[u32], pass: bool) -> Fixture {
    Fixture {
        name,
        graph: g,
        coloring: Some(ColoringAssignment::colors(colors)),
        target: None,
        expectations: vec![(Check::Oriented, pass)],
    }
}

/// Three separately coloured oriented graphs, each a valid oriented
/// colouring.
pub fn fig1() -> Vec<Fixture> {
    vec![
        oriented(
            "fig1_left",
            graph(
                6,
                &[
                    (1, 0),
                    (0, 4),
                    (5, 4),
                    (3, 4),
                    (3, 2),
                    (2, 1),
                    (5, 2),
                    (1, 5),
                ],
            ),
            &[1, 2, 4, 5, 6, 3],
            true,
        ),
        oriented(
            "fig1_middle",
            graph(4, &[(0, 1), (3, 1), (3, 2), (0, 2)]),
            &[1, 2, 2, 1],
            true,
        ),
        oriented(
            "fig1_right",
            graph(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]),
            &[1, 2, 4, 3],
            true,
        ),
    ]
}

/// A homomorphism from a six-vertex oriented graph onto a five-vertex one.
pub fn fig2() -> Fixture {
    Fixture {
        name: "fig2_homomorphism",
        graph: graph(
            6,
            &[
                (3, 0),
                (4, 0),
                (0, 5),
                (3, 1),
                (1, 4),
                (5, 1),
                (3, 2),
                (4, 2),
                (2, 5),
            ],
        ),
        coloring: Some(ColoringAssignment::new(
            vec![0, 1, 0, 4, 3, 2],
            ColoringKind::Homomorphism,
        )),
        target: Some(graph(5, &[(0, 2), (4, 0), (3, 0), (2, 1), (4, 1), (1, 3)])),
        expectations: vec![(Check::Homomorphism, true)],
    }
}

/// The subdivided triangle: every edge replaced by a directed 2-path.
pub fn fig3() -> Fixture {
    Fixture {
        name: "fig3_subdivided_triangle",
        graph: oriented_subdivision(&SimpleGraph::complete(3)),
        coloring: None,
        target: None,
        expectations: Vec::new(),
    }
}

/// A transitive triangle beside a directed path, coloured so that the
/// colouring is a 2-dipath colouring but not an oriented one: arcs
/// `0 -> 2` and `5 -> 6` join colours 1 and 3 in opposite directions.
pub fn fig4() -> Fixture {
    Fixture {
        name: "fig4_two_dipath_not_oriented",
        graph: graph(7, &[(0, 1), (0, 2), (1, 2), (3, 4), (4, 5), (5, 6)]),
        coloring: Some(ColoringAssignment::new(
            vec![1, 2, 3, 1, 2, 3, 1],
            ColoringKind::TwoDipath,
        )),
        target: None,
        expectations: vec![(Check::TwoDipath, true), (Check::Oriented, false)],
    }
}

/// The Paley tournament on seven vertices.
pub fn fig5() -> Fixture {
    Fixture {
        name: "fig5_paley7",
        graph: qr_tournament(7)
            .expect("7 is an admissible modulus")
            .into_graph(),
        coloring: None,
        target: None,
        expectations: vec![
            (Check::Comprehensive { k: 2, t: 1 }, true),
            (Check::Comprehensive { k: 2, t: 2 }, false),
            (Check::Comprehensive { k: 1, t: 3 }, true),
        ],
    }
}

/// All figure fixtures plus a few named graphs used by the examples.
pub fn all() -> Vec<Fixture> {
    let mut out = fig1();
    out.push(fig2());
    out.push(fig3());
    out.push(fig4());
    out.push(fig5());
    let bare = |name, g| Fixture {
        name,
        graph: g,
        coloring: None,
        target: None,
        expectations: Vec::new(),
    };
    out.push(bare("directed_p4", OrientedGraph::directed_path(4)));
    out.push(bare("directed_p10", OrientedGraph::directed_path(10)));
    out.push(bare(
        "subdivided_k4",
        oriented_subdivision(&SimpleGraph::complete(4)),
    ));
    out
}
