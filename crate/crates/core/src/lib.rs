//! Oriented and 2-dipath colourings of sparse oriented graphs: exact
//! solvers, certifiers, universal-target constructions and the greedy
//! homomorphisms that give degeneracy-aware upper bounds.

pub mod bitset;
pub mod bounds;
pub mod coloring;
pub mod exact;
pub mod fixtures;
pub mod graph;
pub mod greedy;
pub mod numeric;
pub mod registry;
pub mod targets;
pub mod verify;

pub use coloring::{ColoringAssignment, ColoringKind};
pub use graph::{
    degeneracy_ordering, orientation_vector, two_dipath_conflict_graph, DegeneracyOrdering,
    GraphError, OrientedGraph, ParseError, SignVector, SimpleGraph, Vertex,
};
pub use greedy::PipelineReport;
pub use registry::Registry;
pub use targets::{FullKPartite, Tournament};
pub use verify::{Certificate, Status, Witness};
