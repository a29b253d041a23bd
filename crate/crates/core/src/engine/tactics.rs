use thiserror::Error;

use crate::graph::{isomorphic, End, IsoOptions, NodeKind, Port, PortRef, ZGraph};

use super::{reduce, Status, Strategy, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TacticError {
    #[error("expected exactly one free out end, found {0}")]
    Boundary(usize),
    #[error("step limit reached after {0} steps")]
    StepLimit(usize),
    #[error("expected 2 components, found {0}")]
    Components(usize),
    #[error("component {0} is not a copy of the input")]
    NotACopy(usize),
    #[error("{nodes} nodes and {arrows} arrows survive")]
    Residue { nodes: usize, arrows: usize },
}

/// Redirects the single free out of `a` into a new node's port 0.
fn cap_output(a: &ZGraph, kind: NodeKind) -> Result<(ZGraph, PortRef), TacticError> {
    let ends = a.free_ends();
    let outs = a.free_outputs();
    if ends.len() != 1 || outs.len() != 1 {
        return Err(TacticError::Boundary(outs.len()));
    }
    let mut g = a.clone();
    let (arrow, _) = outs[0].clone();
    let tail = g.remove_arrow(arrow).expect("free output").tail;
    let n = g.add_node(kind);
    let zero = PortRef::new(n, Port::Zero);
    g.add_arrow(tail, End::Port(zero));
    Ok((g, zero))
}

#[derive(Debug, Clone)]
pub struct Multiplied {
    pub trace: Trace,
    pub copies: [ZGraph; 2],
    /// Whether both copies matched with fanout outs in order.
    pub strict: bool,
}

/// Feeds `a` into a fanout and reduces until two copies of `a` remain.
pub fn multiply(a: &ZGraph, s: &Strategy) -> Result<Multiplied, TacticError> {
    let (mut g, zero) = cap_output(a, NodeKind::FanOut)?;
    for k in [1, 2] {
        let l = g.fresh_label("out");
        g.add_arrow(End::Port(PortRef::new(zero.node, Port::Var(k))), End::Free(l));
    }
    let trace = reduce(&g, s);
    if trace.status == Status::StepLimit {
        return Err(TacticError::StepLimit(trace.steps.len()));
    }
    let (body, _) = trace.final_graph.strip_loops();
    let parts: Vec<ZGraph> = body.components().into_iter().filter(|c| !c.is_empty()).collect();
    let [c1, c2]: [ZGraph; 2] = parts.try_into().map_err(|p: Vec<ZGraph>| TacticError::Components(p.len()))?;
    let (a, _) = a.strip_loops();
    let mut strict = true;
    for (i, c) in [&c1, &c2].into_iter().enumerate() {
        if !isomorphic(c, &a, IsoOptions::default()) {
            strict = false;
            if !isomorphic(c, &a, IsoOptions { fanout_outs_unordered: true }) {
                return Err(TacticError::NotACopy(i + 1));
            }
        }
    }
    Ok(Multiplied { trace, copies: [c1, c2], strict })
}

#[derive(Debug, Clone)]
pub struct Killed {
    pub trace: Trace,
    pub loops: usize,
}

/// Terminates the output of `a` and prunes until only loops are left.
pub fn kill(a: &ZGraph, s: &Strategy) -> Result<Killed, TacticError> {
    let (g, _) = cap_output(a, NodeKind::Termination)?;
    let trace = reduce(&g, s);
    let f = &trace.final_graph;
    if f.node_count() > 0 || f.arrow_count() > 0 {
        if trace.status == Status::StepLimit {
            return Err(TacticError::StepLimit(trace.steps.len()));
        }
        return Err(TacticError::Residue { nodes: f.node_count(), arrows: f.arrow_count() });
    }
    let loops = f.loop_count();
    Ok(Killed { trace, loops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{compile, parse_term, random_term};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn c(s: &str) -> ZGraph {
        compile(&parse_term(s).unwrap())
    }

    #[test]
    fn death_loop_counts() {
        let s = Strategy::kill();
        let counts: Vec<usize> = ["I", "K", "S"].iter().map(|t| kill(&c(t), &s).unwrap().loops).collect();
        assert_eq!(counts, vec![1, 2, 3]);
    }

    #[test]
    fn random_graphs_die() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let t = random_term(&mut rng, 6);
            assert!(kill(&compile(&t), &Strategy::kill()).is_ok(), "{t}");
        }
    }

    #[test]
    fn combinators_multiply() {
        for t in ["I", "K", "S", "S K", "K I", "S (K I)"] {
            let m = multiply(&c(t), &Strategy::multiply()).unwrap_or_else(|e| panic!("{t}: {e}"));
            assert_eq!(m.copies.len(), 2);
        }
    }

    #[test]
    fn open_graphs_are_rejected() {
        let g = crate::graph::parse_zg("ZM 1 a b c").unwrap();
        assert!(matches!(kill(&g, &Strategy::kill()), Err(TacticError::Boundary(_))));
    }
}
