//! Run-time selection of colouring strategies and exact invariants by name.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::exact::{chi2_exact, chio_exact, chromatic_number, ExactConfig, ExactError};
use crate::graph::OrientedGraph;
use crate::greedy::{
    color_via_2dipath, color_via_degeneracy, color_via_maxdeg, DisconnectedTarget, GreedyError,
    PipelineReport,
};
use crate::targets::TargetProvider;

/// Everything a strategy may draw on besides the graph.
pub struct StrategyContext<'a> {
    pub provider: &'a TargetProvider,
    pub eps: BigRational,
    pub exact: ExactConfig,
    pub disconnected: DisconnectedTarget,
}

pub trait ColoringStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn color(
        &self,
        g: &OrientedGraph,
        ctx: &StrategyContext<'_>,
    ) -> Result<PipelineReport, GreedyError>;
}

struct MaxDegree;
struct TwoDipath;
struct Degeneracy;

impl ColoringStrategy for MaxDegree {
    fn name(&self) -> &'static str {
        "maxdeg"
    }

    fn summary(&self) -> &'static str {
        "comprehensive tournament sized by maximum degree"
    }

    fn color(
        &self,
        g: &OrientedGraph,
        ctx: &StrategyContext<'_>,
    ) -> Result<PipelineReport, GreedyError> {
        color_via_maxdeg(g, &ctx.eps, ctx.provider, ctx.disconnected)
    }
}

impl ColoringStrategy for TwoDipath {
    fn name(&self) -> &'static str {
        "2dipath"
    }

    fn summary(&self) -> &'static str {
        "full k-partite target guided by a 2-dipath colouring"
    }

    fn color(
        &self,
        g: &OrientedGraph,
        ctx: &StrategyContext<'_>,
    ) -> Result<PipelineReport, GreedyError> {
        color_via_2dipath(g, ctx.provider, &ctx.exact)
    }
}

impl ColoringStrategy for Degeneracy {
    fn name(&self) -> &'static str {
        "degeneracy"
    }

    fn summary(&self) -> &'static str {
        "comprehensive tournament sized by degeneracy and maximum degree"
    }

    fn color(
        &self,
        g: &OrientedGraph,
        ctx: &StrategyContext<'_>,
    ) -> Result<PipelineReport, GreedyError> {
        color_via_degeneracy(g, ctx.provider)
    }
}

pub trait ExactInvariant: Send + Sync {
    fn name(&self) -> &'static str;
    fn compute(&self, g: &OrientedGraph, cfg: &ExactConfig) -> Result<usize, ExactError>;
}

struct Chromatic;
struct TwoDipathNumber;
struct OrientedNumber;

impl ExactInvariant for Chromatic {
    fn name(&self) -> &'static str {
        "chi"
    }

    fn compute(&self, g: &OrientedGraph, cfg: &ExactConfig) -> Result<usize, ExactError> {
        chromatic_number(&g.underlying(), cfg)
    }
}

impl ExactInvariant for TwoDipathNumber {
    fn name(&self) -> &'static str {
        "chi2"
    }

    fn compute(&self, g: &OrientedGraph, cfg: &ExactConfig) -> Result<usize, ExactError> {
        chi2_exact(g, cfg)
    }
}

impl ExactInvariant for OrientedNumber {
    fn name(&self) -> &'static str {
        "chio"
    }

    fn compute(&self, g: &OrientedGraph, cfg: &ExactConfig) -> Result<usize, ExactError> {
        chio_exact(g, cfg)
    }
}

/// Name-indexed strategies and invariants.
pub struct Registry {
    strategies: BTreeMap<&'static str, Box<dyn ColoringStrategy>>,
    invariants: BTreeMap<&'static str, Box<dyn ExactInvariant>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            strategies: BTreeMap::new(),
            invariants: BTreeMap::new(),
        }
    }

    pub fn register_strategy(&mut self, s: Box<dyn ColoringStrategy>) {
        self.strategies.insert(s.name(), s);
    }

    pub fn register_invariant(&mut self, i: Box<dyn ExactInvariant>) {
        self.invariants.insert(i.name(), i);
    }

    pub fn strategy(&self, name: &str) -> Option<&dyn ColoringStrategy> {
        self.strategies.get(name).map(|b| b.as_ref())
    }

    pub fn invariant(&self, name: &str) -> Option<&dyn ExactInvariant> {
        self.invariants.get(name).map(|b| b.as_ref())
    }

    pub fn strategy_names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }

    pub fn invariant_names(&self) -> Vec<&'static str> {
        self.invariants.keys().copied().collect()
    }
}

impl Default for Registry {
    fn default() -> Self {
        let mut r = Registry::empty();
        r.register_strategy(Box::new(MaxDegree));
        r.register_strategy(Box::new(TwoDipath));
        r.register_strategy(Box::new(Degeneracy));
        r.register_invariant(Box::new(Chromatic));
        r.register_invariant(Box::new(TwoDipathNumber));
        r.register_invariant(Box::new(OrientedNumber));
        r
    }
}
