use std::collections::BTreeSet;
use std::fmt::Write;

use crate::frontend::ast::InstanceSelection;
use crate::ir::{ClauseKind, ExprKind, Spec, StreamId, StreamKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Sync,
    Offset,
    Hold,
    Window,
    InstanceAggregate(InstanceSelection),
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Sync => "sync",
            EdgeKind::Offset => "offset",
            EdgeKind::Hold => "hold",
            EdgeKind::Window => "window",
            EdgeKind::InstanceAggregate(InstanceSelection::All) => "instances(all)",
            EdgeKind::InstanceAggregate(InstanceSelection::Fresh) => "instances(fresh)",
        }
    }
}

/// `from` accesses `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: StreamId,
    pub to: StreamId,
    pub weight: i64,
    pub kind: EdgeKind,
    pub clause: ClauseKind,
}

impl Edge {
    /// Edges that demand a same-cycle value: synchronous accesses (and fresh
    /// instance aggregations) from spawn and eval clauses. These constrain
    /// the evaluation order, and together with offsets they make up the
    /// cycles examined by the well-formedness check.
    pub fn is_ordering(&self) -> bool {
        self.clause != ClauseKind::Close
            && matches!(
                self.kind,
                EdgeKind::Sync | EdgeKind::InstanceAggregate(InstanceSelection::Fresh)
            )
    }

    pub fn counts_for_cycles(&self) -> bool {
        self.is_ordering() || (self.kind == EdgeKind::Offset && self.clause != ClauseKind::Close)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: StreamId,
    pub name: String,
    pub kind: StreamKind,
}

/// Weighted multigraph over streams. Parallel edges that differ in weight,
/// kind or clause are kept; exact duplicates are merged.
#[derive(Clone, Debug, PartialEq)]
pub struct DependencyGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

impl DependencyGraph {
    pub fn build(spec: &Spec) -> DependencyGraph {
        let nodes = spec
            .streams
            .iter()
            .map(|s| Node {
                id: s.id,
                name: s.name.clone(),
                kind: s.kind,
            })
            .collect();
        let mut edges = BTreeSet::new();
        for s in &spec.streams {
            for clause in s.clauses() {
                for e in clause.exprs() {
                    e.walk(&mut |x| {
                        let (to, weight, kind) = match &x.kind {
                            ExprKind::Access(r) => (r.stream, 0, EdgeKind::Sync),
                            ExprKind::Offset(r, n) => (r.stream, -(*n as i64), EdgeKind::Offset),
                            ExprKind::Hold(r, _) => (r.stream, 0, EdgeKind::Hold),
                            ExprKind::Window { target, .. } => (target.stream, 0, EdgeKind::Window),
                            ExprKind::InstanceAggregate { stream, selection, .. } => {
                                (*stream, 0, EdgeKind::InstanceAggregate(*selection))
                            }
                            _ => return,
                        };
                        edges.insert(Edge {
                            from: s.id,
                            to,
                            weight,
                            kind,
                            clause: clause.kind,
                        });
                    });
                }
            }
        }
        DependencyGraph {
            nodes,
            edges: edges.into_iter().collect(),
        }
    }

    pub fn edges_from(&self, s: StreamId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.from == s)
    }

    /// Graphviz rendering. Inputs are green, outputs blue, triggers red;
    /// edges are labelled with their weight and, for non-value accesses,
    /// their kind.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dependencies {\n    rankdir=LR;\n");
        for n in &self.nodes {
            let color = match n.kind {
                StreamKind::Input => "green",
                StreamKind::Output => "blue",
                StreamKind::Trigger => "red",
            };
            let _ = writeln!(out, "    \"{}\" [color={color}];", n.name);
        }
        for e in &self.edges {
            let mut label = e.weight.to_string();
            if !matches!(e.kind, EdgeKind::Sync | EdgeKind::Offset) {
                let _ = write!(label, " {}", e.kind.as_str());
            }
            if e.clause != ClauseKind::Eval {
                let _ = write!(label, " [{}]", e.clause.as_str());
            }
            let style = if e.is_ordering() || e.kind == EdgeKind::Offset { "solid" } else { "dashed" };
            let _ = writeln!(
                out,
                "    \"{}\" -> \"{}\" [label=\"{label}\", style={style}];",
                self.nodes[e.from.0].name, self.nodes[e.to.0].name
            );
        }
        out.push_str("}\n");
        out
    }
}
