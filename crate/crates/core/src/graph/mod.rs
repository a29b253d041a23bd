//! Zipper graphs: half-zippers, zippers, fanout/fanin/termination nodes,
//! arrows (possibly with free ends) and loops.
//!
//! Every node port carries exactly one arrow. An arrow end that is not
//! attached to a port is a *free end* and carries a label, unique in the
//! graph. Loops have no ports and are kept as a counter.

mod dot;
mod iso;
mod validate;
mod zg;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use dot::emit_dot;
pub use iso::{invariant_hash, isomorphic, IsoOptions};
pub use validate::{validate, Diagnostic};
pub use zg::{emit_zg, parse_zg, ParseError, ParseErrorKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub u32);

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// The six node kinds. Arities are always at least 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    /// `(-n)` half-zipper: a tower of `n` lambda abstractions.
    HalfZipperMinus(u32),
    /// `(+n)` half-zipper: a tower of `n` applications.
    HalfZipperPlus(u32),
    /// `(n)` zipper.
    Zipper(u32),
    FanOut,
    FanIn,
    Termination,
}

/// Symbolic port labels `0`, `0'`, `i` and `i'`.
///
/// Fanout outs are `Var(1)`, `Var(2)`; fanin ins are `Arg(1)`, `Arg(2)`;
/// the single in port of fanout and termination is `Zero`, the out port of
/// fanin is `ZeroPrime`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    Zero,
    ZeroPrime,
    Var(u32),
    Arg(u32),
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Zero => write!(f, "0"),
            Port::ZeroPrime => write!(f, "0'"),
            Port::Var(i) => write!(f, "{i}"),
            Port::Arg(i) => write!(f, "{i}'"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
}

impl NodeKind {
    pub fn arity(&self) -> Option<u32> {
        match *self {
            NodeKind::HalfZipperMinus(n) | NodeKind::HalfZipperPlus(n) | NodeKind::Zipper(n) => {
                Some(n)
            }
            _ => None,
        }
    }

    /// Ports in serialization order.
    pub fn ports(&self) -> Vec<Port> {
        match *self {
            NodeKind::HalfZipperMinus(n) => [Port::Zero, Port::ZeroPrime]
                .into_iter()
                .chain((1..=n).map(Port::Var))
                .collect(),
            NodeKind::HalfZipperPlus(n) => std::iter::once(Port::Zero)
                .chain((1..=n).map(Port::Arg))
                .chain(std::iter::once(Port::ZeroPrime))
                .collect(),
            NodeKind::Zipper(n) => std::iter::once(Port::Zero)
                .chain((1..=n).map(Port::Arg))
                .chain(std::iter::once(Port::ZeroPrime))
                .chain((1..=n).map(Port::Var))
                .collect(),
            NodeKind::FanOut => vec![Port::Zero, Port::Var(1), Port::Var(2)],
            NodeKind::FanIn => vec![Port::Arg(1), Port::Arg(2), Port::ZeroPrime],
            NodeKind::Termination => vec![Port::Zero],
        }
    }

    /// Direction of `port` on this kind, or `None` if the kind has no such port.
    pub fn direction(&self, port: Port) -> Option<Direction> {
        use Direction::*;
        let in_range = |i: u32, n: u32| (1..=n).contains(&i);
        match (*self, port) {
            (NodeKind::HalfZipperMinus(_), Port::Zero) => Some(In),
            (NodeKind::HalfZipperMinus(_), Port::ZeroPrime) => Some(Out),
            (NodeKind::HalfZipperMinus(n), Port::Var(i)) if in_range(i, n) => Some(Out),
            (NodeKind::HalfZipperPlus(_), Port::Zero) => Some(In),
            (NodeKind::HalfZipperPlus(n), Port::Arg(i)) if in_range(i, n) => Some(In),
            (NodeKind::HalfZipperPlus(_), Port::ZeroPrime) => Some(Out),
            (NodeKind::Zipper(_), Port::Zero) => Some(In),
            (NodeKind::Zipper(n), Port::Arg(i)) if in_range(i, n) => Some(In),
            (NodeKind::Zipper(_), Port::ZeroPrime) => Some(Out),
            (NodeKind::Zipper(n), Port::Var(i)) if in_range(i, n) => Some(Out),
            (NodeKind::FanOut, Port::Zero) => Some(In),
            (NodeKind::FanOut, Port::Var(1 | 2)) => Some(Out),
            (NodeKind::FanIn, Port::Arg(1 | 2)) => Some(In),
            (NodeKind::FanIn, Port::ZeroPrime) => Some(Out),
            (NodeKind::Termination, Port::Zero) => Some(In),
            _ => None,
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            NodeKind::HalfZipperMinus(_) => "ZM",
            NodeKind::HalfZipperPlus(_) => "ZP",
            NodeKind::Zipper(_) => "Z",
            NodeKind::FanOut => "FO",
            NodeKind::FanIn => "FI",
            NodeKind::Termination => "T",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.arity() {
            Some(n) => write!(f, "{}({})", self.mnemonic(), n),
            None => write!(f, "{}", self.mnemonic()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PortRef {
    pub node: NodeId,
    pub port: Port,
}

impl PortRef {
    pub fn new(node: NodeId, port: Port) -> Self {
        PortRef { node, port }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.node, self.port)
    }
}

/// One end of an arrow.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Port(PortRef),
    Free(String),
}

impl End {
    pub fn port(&self) -> Option<PortRef> {
        match self {
            End::Port(p) => Some(*p),
            End::Free(_) => None,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, End::Free(_))
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            End::Port(p) => write!(f, "{p}"),
            End::Free(l) => write!(f, "~{l}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub tail: End,
    pub head: End,
}

/// A zipper graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZGraph {
    nodes: BTreeMap<NodeId, NodeKind>,
    arrows: BTreeMap<ArrowId, Arrow>,
    ports: PortIndex,
    loops: usize,
    next_node: u32,
    next_arrow: u32,
}

/// Port → arrow lookup for a graph snapshot.
pub type PortIndex = HashMap<PortRef, ArrowId>;

impl ZGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_loops(loops: usize) -> Self {
        ZGraph {
            loops,
            ..Self::default()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, NodeKind)> + '_ {
        self.nodes.iter().map(|(id, k)| (*id, *k))
    }

    pub fn arrows(&self) -> impl Iterator<Item = (ArrowId, &Arrow)> + '_ {
        self.arrows.iter().map(|(id, a)| (*id, a))
    }

    pub fn node(&self, id: NodeId) -> Option<NodeKind> {
        self.nodes.get(&id).copied()
    }

    pub fn arrow(&self, id: ArrowId) -> Option<&Arrow> {
        self.arrows.get(&id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.arrows.is_empty() && self.loops == 0
    }

    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.next_node);
        self.next_node += 1;
        self.nodes.insert(id, kind);
        id
    }

    /// Removes a node; arrows attached to it are left dangling and must be
    /// removed or re-attached by the caller.
    pub fn remove_node(&mut self, id: NodeId) -> Option<NodeKind> {
        self.nodes.remove(&id)
    }

    pub fn add_arrow(&mut self, tail: End, head: End) -> ArrowId {
        let id = ArrowId(self.next_arrow);
        self.next_arrow += 1;
        self.insert_arrow(id, Arrow { tail, head });
        id
    }

    fn insert_arrow(&mut self, id: ArrowId, a: Arrow) {
        for end in [&a.tail, &a.head] {
            if let End::Port(p) = end {
                self.ports.insert(*p, id);
            }
        }
        self.arrows.insert(id, a);
    }

    pub fn remove_arrow(&mut self, id: ArrowId) -> Option<Arrow> {
        let a = self.arrows.remove(&id)?;
        for end in [&a.tail, &a.head] {
            if let End::Port(p) = end {
                if self.ports.get(p) == Some(&id) {
                    self.ports.remove(p);
                }
            }
        }
        Some(a)
    }

    pub fn connect(&mut self, from: PortRef, to: PortRef) -> ArrowId {
        self.add_arrow(End::Port(from), End::Port(to))
    }

    pub fn add_loops(&mut self, k: usize) {
        self.loops += k;
    }

    /// Removes `k` loops; returns false (and changes nothing) if fewer exist.
    pub fn take_loops(&mut self, k: usize) -> bool {
        if self.loops < k {
            return false;
        }
        self.loops -= k;
        true
    }

    /// Port to arrow lookup, kept up to date as arrows change.
    pub fn port_index(&self) -> &PortIndex {
        &self.ports
    }

    pub fn arrow_at(&self, p: PortRef) -> Option<ArrowId> {
        self.ports.get(&p).copied()
    }

    pub fn free_labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for a in self.arrows.values() {
            for end in [&a.tail, &a.head] {
                if let End::Free(l) = end {
                    out.insert(l.clone());
                }
            }
        }
        out
    }

    /// Free ends as `(label, is_tail)` pairs, sorted.
    pub fn free_ends(&self) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        for a in self.arrows.values() {
            if let End::Free(l) = &a.tail {
                out.push((l.clone(), true));
            }
            if let End::Free(l) = &a.head {
                out.push((l.clone(), false));
            }
        }
        out.sort();
        out
    }

    /// Labels of free heads, i.e. the graph's outputs.
    pub fn free_outputs(&self) -> Vec<(ArrowId, String)> {
        self.arrows
            .iter()
            .filter_map(|(id, a)| match &a.head {
                End::Free(l) => Some((*id, l.clone())),
                End::Port(_) => None,
            })
            .collect()
    }

    /// A label of the form `{prefix}{k}` not used by any free end.
    pub fn fresh_label(&self, prefix: &str) -> String {
        let used = self.free_labels();
        (0..)
            .map(|k| format!("{prefix}{k}"))
            .find(|l| !used.contains(l))
            .expect("unbounded label space")
    }

    /// Rename free-end labels in place.
    pub fn rename_free(&mut self, mut f: impl FnMut(&str) -> String) {
        for a in self.arrows.values_mut() {
            for end in [&mut a.tail, &mut a.head] {
                if let End::Free(l) = end {
                    *l = f(l);
                }
            }
        }
    }

    /// Disjoint union; node and arrow ids of `other` are renumbered.
    /// Free labels of `other` that clash with labels of `self` are renamed.
    pub fn disjoint_union(&self, other: &ZGraph) -> ZGraph {
        let mut g = self.clone();
        let mut used = g.free_labels();
        let mut node_map = HashMap::new();
        for (id, kind) in other.nodes() {
            node_map.insert(id, g.add_node(kind));
        }
        let mut relabel = HashMap::new();
        for l in other.free_labels() {
            let mut fresh = l.clone();
            let mut k = 0;
            while used.contains(&fresh) {
                fresh = format!("{l}_{k}");
                k += 1;
            }
            used.insert(fresh.clone());
            relabel.insert(l, fresh);
        }
        let map_end = |e: &End| match e {
            End::Port(p) => End::Port(PortRef::new(node_map[&p.node], p.port)),
            End::Free(l) => End::Free(relabel[l].clone()),
        };
        for (_, a) in other.arrows() {
            g.add_arrow(map_end(&a.tail), map_end(&a.head));
        }
        g.loops += other.loops;
        g
    }

    /// The graph with its loops removed, and the number removed.
    pub fn strip_loops(&self) -> (ZGraph, usize) {
        let mut g = self.clone();
        let k = g.loops;
        g.loops = 0;
        (g, k)
    }

    /// Arrow-connected components. Each loop is returned as its own
    /// single-loop component; free-standing arrows are their own components.
    pub fn components(&self) -> Vec<ZGraph> {
        let ids: Vec<NodeId> = self.nodes.keys().copied().collect();
        let pos: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in self.arrows.values() {
            if let (End::Port(t), End::Port(h)) = (&a.tail, &a.head) {
                if let (Some(&i), Some(&j)) = (pos.get(&t.node), pos.get(&h.node)) {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    parent[ri] = rj;
                }
            }
        }
        // Component order follows the smallest node id of each component.
        let mut groups: BTreeMap<usize, Vec<NodeId>> = BTreeMap::new();
        let mut first_seen: HashMap<usize, usize> = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            let r = find(&mut parent, i);
            let key = *first_seen.entry(r).or_insert(i);
            groups.entry(key).or_default().push(*id);
        }
        let mut out = Vec::new();
        let mut node_comp: HashMap<NodeId, usize> = HashMap::new();
        for (ci, members) in groups.values().enumerate() {
            for m in members {
                node_comp.insert(*m, ci);
            }
            let mut g = ZGraph::new();
            for m in members {
                g.nodes.insert(*m, self.nodes[m]);
            }
            g.next_node = self.next_node;
            out.push(g);
        }
        let mut detached = Vec::new();
        for (id, a) in &self.arrows {
            let owner = [&a.tail, &a.head]
                .into_iter()
                .find_map(|e| e.port().and_then(|p| node_comp.get(&p.node).copied()));
            match owner {
                Some(ci) => {
                    out[ci].insert_arrow(*id, a.clone());
                    out[ci].next_arrow = self.next_arrow;
                }
                None => {
                    let mut g = ZGraph::new();
                    g.insert_arrow(*id, a.clone());
                    g.next_arrow = self.next_arrow;
                    detached.push(g);
                }
            }
        }
        out.extend(detached);
        out.extend((0..self.loops).map(|_| ZGraph::with_loops(1)));
        out
    }

    /// Hex digest of the canonical text form.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(emit_zg(self).as_bytes());
        hex::encode(&digest[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i_graph() -> ZGraph {
        parse_zg("ZM 1 x out x").unwrap()
    }

    fn k_graph() -> ZGraph {
        parse_zg("ZM 2 x out x y\nT y").unwrap()
    }

    #[test]
    fn port_counts_follow_arity() {
        assert_eq!(NodeKind::HalfZipperMinus(3).ports().len(), 5);
        assert_eq!(NodeKind::HalfZipperPlus(2).ports().len(), 4);
        assert_eq!(NodeKind::Zipper(2).ports().len(), 6);
        assert_eq!(NodeKind::FanOut.ports().len(), 3);
        assert_eq!(NodeKind::FanIn.ports().len(), 3);
        assert_eq!(NodeKind::Termination.ports().len(), 1);
    }

    #[test]
    fn directions() {
        use Direction::*;
        let zm = NodeKind::HalfZipperMinus(2);
        assert_eq!(zm.direction(Port::Zero), Some(In));
        assert_eq!(zm.direction(Port::ZeroPrime), Some(Out));
        assert_eq!(zm.direction(Port::Var(2)), Some(Out));
        assert_eq!(zm.direction(Port::Var(3)), None);
        assert_eq!(zm.direction(Port::Arg(1)), None);
        let z = NodeKind::Zipper(1);
        assert_eq!(z.direction(Port::Arg(1)), Some(In));
        assert_eq!(z.direction(Port::Var(1)), Some(Out));
        assert_eq!(NodeKind::FanIn.direction(Port::Zero), None);
    }

    #[test]
    fn strip_loops_cases() {
        let (g, k) = ZGraph::with_loops(3).strip_loops();
        assert!(g.is_empty());
        assert_eq!(k, 3);
        let i = i_graph();
        let (g, k) = i.strip_loops();
        assert_eq!(g, i);
        assert_eq!(k, 0);
    }

    #[test]
    fn components_split_disjoint_union() {
        let u = i_graph().disjoint_union(&k_graph());
        let comps = u.components();
        assert_eq!(comps.len(), 2);
        let opts = IsoOptions::default();
        assert!(isomorphic(&comps[0], &i_graph(), opts));
        assert!(isomorphic(&comps[1], &k_graph(), opts));

        let mut with_loop = i_graph();
        with_loop.add_loops(1);
        let comps = with_loop.components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[1], ZGraph::with_loops(1));
    }

    #[test]
    fn components_partition_everything() {
        let mut g = i_graph().disjoint_union(&k_graph());
        g.add_arrow(End::Free("p".into()), End::Free("q".into()));
        g.add_loops(2);
        let comps = g.components();
        let nodes: usize = comps.iter().map(|c| c.node_count()).sum();
        let arrows: usize = comps.iter().map(|c| c.arrow_count()).sum();
        let loops: usize = comps.iter().map(|c| c.loop_count()).sum();
        assert_eq!((nodes, arrows, loops), (g.node_count(), g.arrow_count(), 2));
        assert_eq!(comps.len(), 5);
    }

    #[test]
    fn fresh_label_avoids_existing() {
        let g = parse_zg("T f0\nT f1").unwrap();
        assert_eq!(g.fresh_label("f"), "f2");
    }

    #[test]
    fn fingerprint_is_stable() {
        assert_eq!(i_graph().fingerprint(), i_graph().fingerprint());
        assert_ne!(i_graph().fingerprint(), k_graph().fingerprint());
    }
}
