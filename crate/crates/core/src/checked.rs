use std::fmt::Write;

use crate::analysis::{self, DependencyGraph, EvaluationOrder, MemoryBounds};
use crate::diagnostics::Diagnostic;
use crate::frontend;
use crate::ir::{ClauseKind, Spec};
use crate::types::{self, pacing, semantic, StreamPacing, ValueTypes};

/// A specification that passed every static check, together with the
/// results of the analyses the monitor needs.
#[derive(Clone, Debug)]
pub struct CheckedSpec {
    pub spec: Spec,
    pub graph: DependencyGraph,
    pub bounds: MemoryBounds,
    pub order: EvaluationOrder,
    pub types: ValueTypes,
    pub pacing: Vec<StreamPacing>,
}

/// Runs the whole static pipeline. Each stage only runs when the previous
/// one succeeded, so all returned diagnostics come from the same stage.
pub fn check(source: &str) -> Result<CheckedSpec, Vec<Diagnostic>> {
    let ast = frontend::parse(source)?;
    let spec = frontend::resolve(&ast)?;
    let graph = DependencyGraph::build(&spec);
    analysis::check_well_formed(&spec, &graph)?;
    let types = types::infer_value_types(&spec)?;
    let pacing = pacing::infer_pacing(&spec)?;
    pacing::check_accesses(&spec, &pacing)?;
    semantic::check_semantics(&spec, &pacing)?;
    let bounds = MemoryBounds::compute(&graph);
    let order = EvaluationOrder::compute(&graph);
    Ok(CheckedSpec {
        spec,
        graph,
        bounds,
        order,
        types,
        pacing,
    })
}

impl CheckedSpec {
    /// One line per stream: kind, name, value type, pacing of each clause
    /// and memory bound.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.spec.streams {
            let kind = match s.kind {
                crate::ir::StreamKind::Input => "input",
                crate::ir::StreamKind::Output => "output",
                crate::ir::StreamKind::Trigger => "trigger",
            };
            let mut name = s.name.clone();
            if s.is_parameterized() {
                let ps: Vec<_> = s
                    .params
                    .iter()
                    .zip(&self.types.params[s.id.0])
                    .map(|(p, t)| format!("{p}: {t}"))
                    .collect();
                let _ = write!(name, "({})", ps.join(", "));
            }
            let _ = write!(out, "{kind} {name}: {}", self.types.streams[s.id.0]);
            let p = &self.pacing[s.id.0];
            for k in [ClauseKind::Spawn, ClauseKind::Eval, ClauseKind::Close] {
                if let Some(t) = p.clause(k) {
                    if k == ClauseKind::Eval || s.clause(k).is_some() {
                        let _ = write!(out, " {} {}", k.as_str(), t.display(&self.spec));
                    }
                }
            }
            let _ = writeln!(out, " bound {}", self.bounds.get(s.id));
        }
        let _ = writeln!(out, "evaluation layers:");
        for (i, layer) in self.order.layers.iter().enumerate() {
            let names: Vec<_> = layer.iter().map(|s| self.spec.name(*s)).collect();
            let _ = writeln!(out, "  {i}: {}", names.join(" "));
        }
        out
    }
}
