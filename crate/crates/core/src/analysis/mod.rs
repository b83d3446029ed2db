//! Dependency graph, well-formedness, memory bounds and evaluation order.

mod graph;

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

pub use graph::{DependencyGraph, Edge, EdgeKind, Node};

use crate::diagnostics::{Code, Diagnostic};
use crate::ir::{ExprKind, Spec, StreamId};

/// Groups of streams that lie on a cycle of weight zero. All weights are
/// non-positive, so such a cycle consists of weight-0 edges only.
pub fn zero_weight_cycles(graph: &DependencyGraph) -> Vec<Vec<StreamId>> {
    let mut g: DiGraphMap<usize, ()> = DiGraphMap::new();
    for n in &graph.nodes {
        g.add_node(n.id.0);
    }
    let mut self_loops = Vec::new();
    for e in graph.edges.iter().filter(|e| e.counts_for_cycles() && e.weight == 0) {
        if e.from == e.to {
            self_loops.push(e.from);
        } else {
            g.add_edge(e.from.0, e.to.0, ());
        }
    }
    let mut cycles: Vec<Vec<StreamId>> = tarjan_scc(&g)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|mut c| {
            c.sort_unstable();
            c.into_iter().map(StreamId).collect()
        })
        .collect();
    for s in self_loops {
        if !cycles.iter().any(|c| c.contains(&s)) {
            cycles.push(vec![s]);
        }
    }
    cycles.sort();
    cycles
}

/// Rejects specifications whose graph has a zero-weight cycle.
pub fn check_well_formed(spec: &Spec, graph: &DependencyGraph) -> Result<(), Vec<Diagnostic>> {
    let diags: Vec<_> = zero_weight_cycles(graph)
        .into_iter()
        .map(|cycle| {
            let first = spec.stream(cycle[0]);
            if cycle.len() == 1 && self_access_in_default(spec, cycle[0]) {
                Diagnostic::error(
                    Code::SelfReferenceInDefault,
                    first.span,
                    format!(
                        "`{}` reads its own current value in a default; only past values of a stream may be used while computing it",
                        first.name
                    ),
                )
            } else {
                let names: Vec<_> = cycle.iter().map(|s| spec.name(*s)).collect();
                Diagnostic::error(
                    Code::ZeroWeightCycle,
                    first.span,
                    format!(
                        "streams {{{}}} depend on each other's current values (cycle of weight 0)",
                        names.join(", ")
                    ),
                )
            }
        })
        .collect();
    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

fn self_access_in_default(spec: &Spec, s: StreamId) -> bool {
    let mut found = false;
    for clause in spec.stream(s).clauses() {
        for e in clause.exprs() {
            e.walk(&mut |x| {
                if let ExprKind::Defaults(_, d) = &x.kind {
                    d.walk(&mut |y| {
                        if matches!(&y.kind, ExprKind::Access(r) if r.stream == s) {
                            found = true;
                        }
                    });
                }
            });
        }
    }
    found
}

/// Number of past values each stream must retain besides its current one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MemoryBounds {
    pub per_stream: Vec<u32>,
}

impl MemoryBounds {
    pub fn compute(graph: &DependencyGraph) -> MemoryBounds {
        let mut per_stream = vec![0u32; graph.nodes.len()];
        for e in graph.edges.iter().filter(|e| e.kind == EdgeKind::Offset) {
            let b = &mut per_stream[e.to.0];
            *b = (*b).max((-e.weight) as u32);
        }
        MemoryBounds { per_stream }
    }

    pub fn get(&self, s: StreamId) -> u32 {
        self.per_stream[s.0]
    }

    pub fn total(&self) -> u64 {
        self.per_stream.iter().map(|&b| b as u64).sum()
    }
}

/// Layered topological order over the ordering edges: every stream sits one
/// layer above the highest stream it synchronously depends on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationOrder {
    pub layers: Vec<Vec<StreamId>>,
    pub layer_of: Vec<usize>,
}

impl EvaluationOrder {
    /// Requires a well-formed graph.
    pub fn compute(graph: &DependencyGraph) -> EvaluationOrder {
        let n = graph.nodes.len();
        let mut deps: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in graph.edges.iter().filter(|e| e.is_ordering() && e.from != e.to) {
            deps[e.from.0].push(e.to.0);
        }
        let mut layer_of: Vec<Option<usize>> = vec![None; n];
        for start in 0..n {
            // iterative post-order to avoid deep recursion on long chains
            let mut stack = vec![(start, 0usize)];
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if layer_of[node].is_some() {
                    stack.pop();
                    continue;
                }
                if let Some(&d) = deps[node].get(*next) {
                    *next += 1;
                    if layer_of[d].is_none() {
                        stack.push((d, 0));
                    }
                } else {
                    let l = deps[node].iter().map(|&d| layer_of[d].map_or(0, |l| l + 1)).max().unwrap_or(0);
                    layer_of[node] = Some(l);
                    stack.pop();
                }
            }
        }
        let layer_of: Vec<usize> = layer_of.into_iter().map(|l| l.unwrap_or(0)).collect();
        let depth = layer_of.iter().copied().max().map_or(0, |m| m + 1);
        let mut layers = vec![Vec::new(); depth];
        for (i, &l) in layer_of.iter().enumerate() {
            layers[l].push(StreamId(i));
        }
        EvaluationOrder { layers, layer_of }
    }

    /// All streams, layer by layer, in declaration order within a layer.
    pub fn flat(&self) -> impl Iterator<Item = StreamId> + '_ {
        self.layers.iter().flatten().copied()
    }
}
