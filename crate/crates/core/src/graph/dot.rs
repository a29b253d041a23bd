use std::fmt::Write as _;

use super::{End, NodeKind, ZGraph};

fn shape(kind: NodeKind) -> &'static str {
    match kind {
        NodeKind::HalfZipperMinus(_) => "invtrapezium",
        NodeKind::HalfZipperPlus(_) => "trapezium",
        NodeKind::Zipper(_) => "box",
        NodeKind::FanOut => "triangle",
        NodeKind::FanIn => "invtriangle",
        NodeKind::Termination => "doublecircle",
    }
}

fn node_label(kind: NodeKind) -> String {
    match kind.arity() {
        Some(n) => format!("{}{}", kind.mnemonic(), n),
        None => kind.mnemonic().to_string(),
    }
}

/// Graphviz rendering. Port labels sit on edge ends; free ends and loops
/// become plaintext / circle pseudo-nodes.
pub fn emit_dot(g: &ZGraph) -> String {
    let mut out = String::from("digraph zipper {\n  rankdir=TB;\n");
    for (id, kind) in g.nodes() {
        let _ = writeln!(
            out,
            "  {id} [label=\"{}\", shape={}];",
            node_label(kind),
            shape(kind)
        );
    }
    let mut free_count = 0;
    let mut endpoint = |out: &mut String, end: &End| -> (String, String) {
        match end {
            End::Port(p) => (p.node.to_string(), p.port.to_string()),
            End::Free(l) => {
                let name = format!("free{free_count}");
                free_count += 1;
                let _ = writeln!(out, "  {name} [label=\"{l}\", shape=plaintext];");
                (name, String::new())
            }
        }
    };
    for (_, a) in g.arrows() {
        let (t, tl) = endpoint(&mut out, &a.tail);
        let (h, hl) = endpoint(&mut out, &a.head);
        let _ = writeln!(out, "  {t} -> {h} [taillabel=\"{tl}\", headlabel=\"{hl}\"];");
    }
    for k in 0..g.loop_count() {
        let _ = writeln!(out, "  loop{k} [label=\"\", shape=circle, style=dashed];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;

    #[test]
    fn empty_digraph() {
        assert_eq!(emit_dot(&ZGraph::new()), "digraph zipper {\n  rankdir=TB;\n}\n");
    }

    #[test]
    fn termination_node() {
        let dot = emit_dot(&parse_zg("T a").unwrap());
        assert_eq!(dot.matches("label=\"T\"").count(), 1);
        assert!(dot.contains("shape=doublecircle"));
        assert!(dot.contains("free0 -> n0"));
    }

    #[test]
    fn loops_are_pseudo_nodes() {
        let dot = emit_dot(&ZGraph::with_loops(2));
        assert_eq!(dot.matches("shape=circle").count(), 2);
    }
}
