use std::collections::BTreeMap;
use std::fmt;

use super::{ArrowId, Direction, End, NodeId, PortRef, ZGraph};

/// A violated zipper-graph invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    ZeroArity { node: NodeId },
    UnknownNode { arrow: ArrowId, node: NodeId },
    InvalidPort { arrow: ArrowId, port: PortRef },
    /// An arrow tail on an in port, or an arrow head on an out port.
    WrongDirection { arrow: ArrowId, port: PortRef },
    PortReused { port: PortRef, arrows: Vec<ArrowId> },
    MissingArrow { port: PortRef },
    DuplicateFreeLabel { label: String },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::ZeroArity { node } => write!(f, "arity: node {node} has arity 0"),
            Diagnostic::UnknownNode { arrow, node } => {
                write!(f, "dangling: arrow {arrow} references missing node {node}")
            }
            Diagnostic::InvalidPort { arrow, port } => {
                write!(f, "port: arrow {arrow} references invalid port {port}")
            }
            Diagnostic::WrongDirection { arrow, port } => {
                write!(f, "direction: arrow {arrow} attaches to {port} with the wrong orientation")
            }
            Diagnostic::PortReused { port, arrows } => {
                write!(f, "port-uniqueness: {port} is an endpoint of {} arrows", arrows.len())
            }
            Diagnostic::MissingArrow { port } => write!(f, "arity: port {port} has no arrow"),
            Diagnostic::DuplicateFreeLabel { label } => {
                write!(f, "labels: free end label {label:?} used more than once")
            }
        }
    }
}

/// Checks every zipper-graph invariant; an empty result means valid.
pub fn validate(g: &ZGraph) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (id, kind) in g.nodes() {
        if kind.arity() == Some(0) {
            out.push(Diagnostic::ZeroArity { node: id });
        }
    }
    let mut seen: BTreeMap<PortRef, Vec<ArrowId>> = BTreeMap::new();
    let mut labels: BTreeMap<&str, usize> = BTreeMap::new();
    for (aid, a) in g.arrows() {
        for (end, want) in [(&a.tail, Direction::Out), (&a.head, Direction::In)] {
            match end {
                End::Free(l) => *labels.entry(l.as_str()).or_default() += 1,
                End::Port(p) => {
                    let Some(kind) = g.node(p.node) else {
                        out.push(Diagnostic::UnknownNode { arrow: aid, node: p.node });
                        continue;
                    };
                    match kind.direction(p.port) {
                        None => out.push(Diagnostic::InvalidPort { arrow: aid, port: *p }),
                        Some(d) if d != want => {
                            out.push(Diagnostic::WrongDirection { arrow: aid, port: *p })
                        }
                        Some(_) => seen.entry(*p).or_default().push(aid),
                    }
                }
            }
        }
    }
    for (port, arrows) in &seen {
        if arrows.len() > 1 {
            out.push(Diagnostic::PortReused { port: *port, arrows: arrows.clone() });
        }
    }
    for (id, kind) in g.nodes() {
        if kind.arity() == Some(0) {
            continue;
        }
        for p in kind.ports() {
            let pr = PortRef::new(id, p);
            if !seen.contains_key(&pr) {
                out.push(Diagnostic::MissingArrow { port: pr });
            }
        }
    }
    for (label, count) in labels {
        if count > 1 {
            out.push(Diagnostic::DuplicateFreeLabel { label: label.to_string() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{parse_zg, NodeKind, Port};

    #[test]
    fn empty_graph_is_valid() {
        assert!(validate(&ZGraph::new()).is_empty());
    }

    #[test]
    fn free_tail_into_termination_is_valid() {
        let mut g = ZGraph::new();
        let t = g.add_node(NodeKind::Termination);
        g.add_arrow(End::Free("a".into()), End::Port(PortRef::new(t, Port::Zero)));
        assert!(validate(&g).is_empty());
    }

    #[test]
    fn two_arrows_on_one_port() {
        let mut g = ZGraph::new();
        let zm = g.add_node(NodeKind::HalfZipperMinus(1));
        let p0 = PortRef::new(zm, Port::Zero);
        g.add_arrow(End::Free("a".into()), End::Port(p0));
        g.add_arrow(End::Free("b".into()), End::Port(p0));
        g.add_arrow(End::Port(PortRef::new(zm, Port::ZeroPrime)), End::Free("c".into()));
        g.add_arrow(End::Port(PortRef::new(zm, Port::Var(1))), End::Free("d".into()));
        let d = validate(&g);
        assert_eq!(d.len(), 1);
        assert!(matches!(&d[0], Diagnostic::PortReused { port, .. } if *port == p0));
        assert!(d[0].to_string().starts_with("port-uniqueness"));
    }

    #[test]
    fn reports_missing_and_wrong_direction() {
        let mut g = ZGraph::new();
        let t = g.add_node(NodeKind::Termination);
        g.add_arrow(End::Port(PortRef::new(t, Port::Zero)), End::Free("x".into()));
        let d = validate(&g);
        assert!(d.iter().any(|d| matches!(d, Diagnostic::WrongDirection { .. })));
        assert!(d.iter().any(|d| matches!(d, Diagnostic::MissingArrow { .. })));
    }

    #[test]
    fn duplicate_free_labels_rejected() {
        let mut g = parse_zg("T a").unwrap();
        let t = g.add_node(NodeKind::Termination);
        g.add_arrow(End::Free("a".into()), End::Port(PortRef::new(t, Port::Zero)));
        assert_eq!(
            validate(&g),
            vec![Diagnostic::DuplicateFreeLabel { label: "a".into() }]
        );
    }
}
