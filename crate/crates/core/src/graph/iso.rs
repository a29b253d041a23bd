//! Isomorphism of port graphs by component-wise propagation.
//!
//! Once one node of a connected component is mapped, every port fixes the
//! image of its neighbour, so the only branching comes from the choice of
//! root image and, with `fanout_outs_unordered`, the orientation of fanouts
//! entered through their in port.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use super::{End, NodeId, NodeKind, Port, PortRef, ZGraph};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IsoOptions {
    /// Allow the bijection to swap the two out ports of any fanout.
    pub fanout_outs_unordered: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Link {
    To { node: usize, port: usize, flag: u8 },
    Free { flag: u8 },
}

/// Labelled nodes with a fixed, ordered port list; each port carries one link.
#[derive(Clone, Debug, Default)]
pub(crate) struct PortGraph {
    pub labels: Vec<u64>,
    pub ports: Vec<Vec<Link>>,
    /// Port pair that may be exchanged by an isomorphism.
    pub swap: Vec<Option<(usize, usize)>>,
    /// Links with no node at either end, keyed by flag (plus loops etc.).
    pub detached: BTreeMap<u64, usize>,
}

impl PortGraph {
    fn components(&self) -> Vec<Vec<usize>> {
        let n = self.labels.len();
        let mut comp = vec![usize::MAX; n];
        let mut out = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let c = out.len();
            let mut members = vec![s];
            comp[s] = c;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for l in &self.ports[u] {
                    if let Link::To { node, .. } = *l {
                        if comp[node] == usize::MAX {
                            comp[node] = c;
                            members.push(node);
                        }
                    }
                }
            }
            out.push(members);
        }
        out
    }

    /// Weisfeiler–Lehman style colours, stable under isomorphism.
    fn refine(&self, rounds: usize, swap_enabled: bool) -> Vec<u64> {
        let mut color: Vec<u64> = self.labels.clone();
        for _ in 0..rounds {
            let next: Vec<u64> = (0..color.len())
                .map(|u| {
                    let mut sig: Vec<(usize, u64, u64)> = self.ports[u]
                        .iter()
                        .enumerate()
                        .map(|(pi, l)| {
                            let pi = match self.swap[u] {
                                Some((a, b)) if swap_enabled && (pi == a || pi == b) => a,
                                _ => pi,
                            };
                            match *l {
                                Link::To { node, port, flag } => {
                                    let port = match self.swap[node] {
                                        Some((a, b)) if swap_enabled && (port == a || port == b) => a,
                                        _ => port,
                                    };
                                    (pi, color[node] ^ ((port as u64) << 48), flag as u64)
                                }
                                Link::Free { flag } => (pi, u64::MAX, flag as u64),
                            }
                        })
                        .collect();
                    sig.sort_unstable();
                    let mut h = DefaultHasher::new();
                    color[u].hash(&mut h);
                    sig.hash(&mut h);
                    h.finish()
                })
                .collect();
            color = next;
        }
        color
    }

    pub fn invariant(&self, swap_enabled: bool) -> u64 {
        let mut colors = self.refine(4, swap_enabled);
        colors.sort_unstable();
        let mut h = DefaultHasher::new();
        colors.hash(&mut h);
        self.detached.hash(&mut h);
        h.finish()
    }

    pub fn isomorphic(&self, other: &PortGraph, swap_enabled: bool) -> bool {
        if self.labels.len() != other.labels.len() || self.detached != other.detached {
            return false;
        }
        let mut a = self.labels.clone();
        let mut b = other.labels.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return false;
        }
        let ca = self.refine(3, swap_enabled);
        let cb = other.refine(3, swap_enabled);
        let comps_a = self.components();
        let comps_b = other.components();
        if comps_a.len() != comps_b.len() {
            return false;
        }
        let sig = |comp: &[usize], col: &[u64]| {
            let mut v: Vec<u64> = comp.iter().map(|&u| col[u]).collect();
            v.sort_unstable();
            v
        };
        let sigs_b: Vec<Vec<u64>> = comps_b.iter().map(|c| sig(c, &cb)).collect();
        let mut used = vec![false; comps_b.len()];
        for comp in &comps_a {
            let sa = sig(comp, &ca);
            let found = (0..comps_b.len()).find(|&j| {
                !used[j]
                    && sigs_b[j] == sa
                    && self.component_iso(comp, other, &comps_b[j], &ca, &cb, swap_enabled)
            });
            match found {
                Some(j) => used[j] = true,
                None => return false,
            }
        }
        true
    }

    fn component_iso(
        &self,
        comp_a: &[usize],
        other: &PortGraph,
        comp_b: &[usize],
        ca: &[u64],
        cb: &[u64],
        swap_enabled: bool,
    ) -> bool {
        // Root: the node whose colour is rarest within the component.
        let mut freq: HashMap<u64, usize> = HashMap::new();
        for &u in comp_a {
            *freq.entry(ca[u]).or_default() += 1;
        }
        let root = *comp_a
            .iter()
            .min_by_key(|&&u| (freq[&ca[u]], u))
            .expect("components are non-empty");
        for &cand in comp_b.iter().filter(|&&v| cb[v] == ca[root]) {
            let st = State {
                fwd: HashMap::new(),
                bwd: HashMap::new(),
                flip: HashMap::new(),
            };
            let swaps: &[bool] = if swap_enabled && self.swap[root].is_some() {
                &[false, true]
            } else {
                &[false]
            };
            for &s in swaps {
                let mut st = st.clone();
                if st.assign(self, other, root, cand, s) && self.propagate(other, st, vec![root], swap_enabled) {
                    return true;
                }
            }
        }
        false
    }

    fn propagate(&self, other: &PortGraph, mut st: State, mut stack: Vec<usize>, swap_enabled: bool) -> bool {
        while let Some(u) = stack.pop() {
            let v = st.fwd[&u];
            let flip_u = st.flip[&u];
            for (p, link) in self.ports[u].iter().enumerate() {
                let q = permute(&self.swap[u], flip_u, p);
                let Some(link_b) = other.ports[v].get(q) else {
                    return false;
                };
                match (*link, *link_b) {
                    (Link::Free { flag: f1 }, Link::Free { flag: f2 }) if f1 == f2 => {}
                    (
                        Link::To { node: w, port: r, flag: f1 },
                        Link::To { node: w2, port: r2, flag: f2 },
                    ) if f1 == f2 => {
                        if let Some(&img) = st.fwd.get(&w) {
                            if img != w2 || permute(&self.swap[w], st.flip[&w], r) != r2 {
                                return false;
                            }
                            continue;
                        }
                        if st.bwd.contains_key(&w2) || self.labels[w] != other.labels[w2] {
                            return false;
                        }
                        let options: Vec<bool> = match self.swap[w] {
                            Some(_) if !swap_enabled => vec![false],
                            Some((a, b)) if r == a || r == b => vec![permute(&self.swap[w], false, r) != r2],
                            Some(_) => vec![false, true],
                            None => vec![false],
                        };
                        if options.len() == 1 {
                            if !st.assign(self, other, w, w2, options[0])
                                || permute(&self.swap[w], options[0], r) != r2
                            {
                                return false;
                            }
                            stack.push(w);
                        } else {
                            for s in options {
                                let mut st2 = st.clone();
                                let mut stack2 = stack.clone();
                                // u's remaining ports still need checking.
                                stack2.push(u);
                                if st2.assign(self, other, w, w2, s) && permute(&self.swap[w], s, r) == r2 {
                                    stack2.push(w);
                                    if self.propagate(other, st2, stack2, swap_enabled) {
                                        return true;
                                    }
                                }
                            }
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }
}

fn permute(swap: &Option<(usize, usize)>, flip: bool, p: usize) -> usize {
    match *swap {
        Some((a, b)) if flip && p == a => b,
        Some((a, b)) if flip && p == b => a,
        _ => p,
    }
}

#[derive(Clone)]
struct State {
    fwd: HashMap<usize, usize>,
    bwd: HashMap<usize, usize>,
    flip: HashMap<usize, bool>,
}

impl State {
    fn assign(&mut self, a: &PortGraph, b: &PortGraph, u: usize, v: usize, flip: bool) -> bool {
        if a.labels[u] != b.labels[v] || a.ports[u].len() != b.ports[v].len() || self.bwd.contains_key(&v) {
            return false;
        }
        self.fwd.insert(u, v);
        self.bwd.insert(v, u);
        self.flip.insert(u, flip);
        true
    }
}

fn kind_label(k: NodeKind) -> u64 {
    let (tag, n) = match k {
        NodeKind::HalfZipperMinus(n) => (1, n),
        NodeKind::HalfZipperPlus(n) => (2, n),
        NodeKind::Zipper(n) => (3, n),
        NodeKind::FanOut => (4, 0),
        NodeKind::FanIn => (5, 0),
        NodeKind::Termination => (6, 0),
    };
    (tag << 32) | n as u64
}

const FLAG_FREE_TAIL: u8 = 1;
const FLAG_FREE_HEAD: u8 = 2;

/// Port-graph view of a valid zipper graph; free-end labels are ignored.
pub(crate) fn to_port_graph(g: &ZGraph) -> PortGraph {
    let ids: Vec<NodeId> = g.nodes().map(|(id, _)| id).collect();
    let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let port_lists: Vec<Vec<Port>> = g.nodes().map(|(_, k)| k.ports()).collect();
    let port_pos = |p: &PortRef| -> (usize, usize) {
        let ni = index[&p.node];
        let pi = port_lists[ni].iter().position(|x| *x == p.port).expect("valid port");
        (ni, pi)
    };
    let mut pg = PortGraph {
        labels: g.nodes().map(|(_, k)| kind_label(k)).collect(),
        ports: port_lists
            .iter()
            .map(|ps| vec![Link::Free { flag: 0 }; ps.len()])
            .collect(),
        swap: g
            .nodes()
            .map(|(_, k)| (k == NodeKind::FanOut).then_some((1, 2)))
            .collect(),
        detached: BTreeMap::new(),
    };
    for (_, a) in g.arrows() {
        match (&a.tail, &a.head) {
            (End::Port(t), End::Port(h)) => {
                let (tn, tp) = port_pos(t);
                let (hn, hp) = port_pos(h);
                pg.ports[tn][tp] = Link::To { node: hn, port: hp, flag: 0 };
                pg.ports[hn][hp] = Link::To { node: tn, port: tp, flag: 0 };
            }
            (End::Port(t), End::Free(_)) => {
                let (tn, tp) = port_pos(t);
                pg.ports[tn][tp] = Link::Free { flag: FLAG_FREE_HEAD };
            }
            (End::Free(_), End::Port(h)) => {
                let (hn, hp) = port_pos(h);
                pg.ports[hn][hp] = Link::Free { flag: FLAG_FREE_TAIL };
            }
            (End::Free(_), End::Free(_)) => *pg.detached.entry(0).or_default() += 1,
        }
    }
    if g.loop_count() > 0 {
        pg.detached.insert(1, g.loop_count());
    }
    pg
}

/// Decides whether two valid zipper graphs are isomorphic.
///
/// The bijection preserves node kinds, port labels, arrows and the loop
/// count; free-end labels are not compared, only which ports are free.
pub fn isomorphic(g1: &ZGraph, g2: &ZGraph, opts: IsoOptions) -> bool {
    if g1.node_count() != g2.node_count()
        || g1.arrow_count() != g2.arrow_count()
        || g1.loop_count() != g2.loop_count()
    {
        return false;
    }
    to_port_graph(g1).isomorphic(&to_port_graph(g2), opts.fanout_outs_unordered)
}

/// A hash that agrees on isomorphic graphs (the converse may fail).
pub fn invariant_hash(g: &ZGraph, opts: IsoOptions) -> u64 {
    to_port_graph(g).invariant(opts.fanout_outs_unordered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;

    const STRICT: IsoOptions = IsoOptions { fanout_outs_unordered: false };
    const LOOSE: IsoOptions = IsoOptions { fanout_outs_unordered: true };

    #[test]
    fn identity() {
        let g = parse_zg("ZM 3 b out x y z\nFO z z1 z2\nZP 1 x z1 p\nZP 1 y z2 q\nZP 1 p q b").unwrap();
        assert!(isomorphic(&g, &g, STRICT));
        assert!(isomorphic(&g, &g, LOOSE));
    }

    #[test]
    fn different_combinators() {
        let i = parse_zg("ZM 1 x out x").unwrap();
        let k = parse_zg("ZM 2 x out x y\nT y").unwrap();
        assert!(!isomorphic(&i, &k, LOOSE));
    }

    #[test]
    fn fanout_order_only_matters_when_strict() {
        let a = parse_zg("FO a b c\nT b\nZP 1 c q r").unwrap();
        let b = parse_zg("FO a c b\nT b\nZP 1 c q r").unwrap();
        assert!(!isomorphic(&a, &b, STRICT));
        assert!(isomorphic(&a, &b, LOOSE));
    }

    #[test]
    fn labels_are_ignored() {
        let a = parse_zg("ZM 1 x out x\nARROW p q").unwrap();
        let b = parse_zg("ZM 1 y result y\nARROW u v").unwrap();
        assert!(isomorphic(&a, &b, STRICT));
    }

    #[test]
    fn loops_must_match() {
        let a = parse_zg("LOOP").unwrap();
        let b = parse_zg("LOOP\nLOOP").unwrap();
        assert!(!isomorphic(&a, &b, STRICT));
    }

    #[test]
    fn swapped_fanout_tree_with_symmetric_leaves() {
        // Same leaves, different tree shape: not isomorphic even when loose.
        let left = parse_zg("FO a b c\nFO b x y\nT x\nT y\nT c").unwrap();
        let right = parse_zg("FO a c b\nFO b x y\nT x\nT y\nT c").unwrap();
        assert!(isomorphic(&left, &right, LOOSE));
        assert!(!isomorphic(&left, &right, STRICT));
        let other = parse_zg("FO a b c\nFO b x y\nT x\nT y\nZP 1 c q r").unwrap();
        assert!(!isomorphic(&left, &other, LOOSE));
        assert_eq!(invariant_hash(&left, LOOSE), invariant_hash(&right, LOOSE));
    }
}
