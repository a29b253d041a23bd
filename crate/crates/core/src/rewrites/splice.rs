//! The replacement engine shared by all moves.
//!
//! A move deletes a set of nodes and adds new ones. Every port of a deleted
//! node (an *old* port) is linked to exactly one other site: a port of a new
//! node, another old port (arrow fusion), a fresh free end, or `Void` (the
//! arrow at that port disappears). Following arrows and links alternately
//! from each terminal yields the arrows of the result; old ports that are
//! never reached from a terminal form closed cycles and become loops.

use std::collections::{HashMap, HashSet};

use crate::graph::{ArrowId, Direction, End, NodeId, NodeKind, Port, PortRef, ZGraph};

use super::RewriteError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Site {
    Old(PortRef),
    New(usize, Port),
    Void,
    FreshTail(String),
}

#[derive(Default)]
pub(crate) struct Replacement {
    pub delete: Vec<NodeId>,
    pub add: Vec<NodeKind>,
    pub links: Vec<(Site, Site)>,
}

impl Replacement {
    pub fn link(&mut self, a: Site, b: Site) {
        self.links.push((a, b));
    }

    pub fn node(&mut self, kind: NodeKind) -> usize {
        self.add.push(kind);
        self.add.len() - 1
    }

    /// Old port `p` is re-attached to port `q` of new node `n`.
    pub fn attach(&mut self, p: PortRef, n: usize, q: Port) {
        self.link(Site::Old(p), Site::New(n, q));
    }

    /// Fuse the arrow entering `input` with the arrow leaving `output`.
    pub fn fuse(&mut self, input: PortRef, output: PortRef) {
        self.link(Site::Old(input), Site::Old(output));
    }

    pub fn drop(&mut self, p: PortRef) {
        self.link(Site::Old(p), Site::Void);
    }

    /// New arrow between two new ports.
    pub fn wire(&mut self, from: (usize, Port), to: (usize, Port)) {
        self.link(Site::New(from.0, from.1), Site::New(to.0, to.1));
    }
}

/// One resulting arrow (or dropped chain) with the old ports it absorbed,
/// listed from its tail towards its head.
#[derive(Clone, Debug)]
pub(crate) struct PathRecord {
    pub arrow: Option<ArrowId>,
    pub ports: Vec<PortRef>,
}

pub(crate) struct Outcome {
    pub graph: ZGraph,
    pub new_ids: Vec<NodeId>,
    pub paths: Vec<PathRecord>,
    /// Closed cycles of old ports, each starting at an in port and listed in
    /// arrow direction.
    pub cycles: Vec<Vec<PortRef>>,
}

#[derive(Clone, Debug)]
enum Term {
    Keep(End, bool),
    New(usize, Port),
    Void,
    FreshTail(String),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Partner {
    Old(PortRef),
    Term(usize),
}

fn mismatch(msg: impl Into<String>) -> RewriteError {
    RewriteError::PatternMismatch(msg.into())
}

pub(crate) fn apply_replacement(g: &ZGraph, rep: &Replacement) -> Result<Outcome, RewriteError> {
    let index = g.port_index();
    let deleted: HashSet<NodeId> = rep.delete.iter().copied().collect();
    if deleted.len() != rep.delete.len() {
        return Err(mismatch("node bound twice"));
    }
    let mut terms: Vec<Term> = Vec::new();
    let mut via_arrow: HashMap<PortRef, Partner> = HashMap::new();
    let mut doomed_arrows: HashSet<ArrowId> = HashSet::new();
    let mut old_ports: Vec<PortRef> = Vec::new();
    for &id in &rep.delete {
        let kind = g.node(id).ok_or_else(|| mismatch(format!("missing node {id}")))?;
        for port in kind.ports() {
            let pr = PortRef::new(id, port);
            let aid = *index
                .get(&pr)
                .ok_or_else(|| mismatch(format!("port {pr} has no arrow")))?;
            doomed_arrows.insert(aid);
            let arrow = g.arrow(aid).expect("indexed");
            let (other, other_is_tail) = if arrow.tail == End::Port(pr) {
                (&arrow.head, false)
            } else {
                (&arrow.tail, true)
            };
            let partner = match other {
                End::Port(q) if deleted.contains(&q.node) => Partner::Old(*q),
                e => {
                    terms.push(Term::Keep(e.clone(), other_is_tail));
                    Partner::Term(terms.len() - 1)
                }
            };
            via_arrow.insert(pr, partner);
            old_ports.push(pr);
        }
    }

    let mut via_link: HashMap<PortRef, Partner> = HashMap::new();
    let mut new_used: HashSet<(usize, Port)> = HashSet::new();
    let mut direct: Vec<(usize, usize)> = Vec::new();
    let mut site_term = |s: &Site, terms: &mut Vec<Term>| -> Result<Option<usize>, RewriteError> {
        let t = match s {
            Site::Old(_) => return Ok(None),
            Site::New(n, p) => {
                let kind = rep.add.get(*n).ok_or_else(|| mismatch("bad new node"))?;
                if kind.direction(*p).is_none() || !new_used.insert((*n, *p)) {
                    return Err(mismatch(format!("new port {n}.{p} invalid or reused")));
                }
                Term::New(*n, *p)
            }
            Site::Void => Term::Void,
            Site::FreshTail(l) => Term::FreshTail(l.clone()),
        };
        terms.push(t);
        Ok(Some(terms.len() - 1))
    };
    for (a, b) in &rep.links {
        let ta = site_term(a, &mut terms)?;
        let tb = site_term(b, &mut terms)?;
        let pa = ta.map(Partner::Term);
        let pb = tb.map(Partner::Term);
        match (a, b) {
            (Site::Old(p), Site::Old(q)) => {
                for (x, y) in [(p, q), (q, p)] {
                    if via_link.insert(*x, Partner::Old(*y)).is_some() {
                        return Err(mismatch(format!("old port {x} linked twice")));
                    }
                }
            }
            (Site::Old(p), _) | (_, Site::Old(p)) => {
                let t = pa.or(pb).expect("one side is a terminal");
                if via_link.insert(*p, t).is_some() {
                    return Err(mismatch(format!("old port {p} linked twice")));
                }
            }
            _ => direct.push((ta.expect("terminal"), tb.expect("terminal"))),
        }
    }
    for p in &old_ports {
        if !via_link.contains_key(p) {
            return Err(mismatch(format!("old port {p} left unlinked")));
        }
    }
    for p in via_link.keys() {
        if !via_arrow.contains_key(p) {
            return Err(mismatch(format!("{p} is not a port of a deleted node")));
        }
    }
    for (n, kind) in rep.add.iter().enumerate() {
        for port in kind.ports() {
            if !new_used.contains(&(n, port)) {
                return Err(mismatch(format!("new port {n}.{port} left unlinked")));
            }
        }
    }

    // Which old port each terminal hangs off, and by which kind of edge.
    let mut term_anchor: HashMap<usize, (PortRef, bool)> = HashMap::new();
    for (p, partner) in &via_arrow {
        if let Partner::Term(t) = partner {
            term_anchor.insert(*t, (*p, true));
        }
    }
    for (p, partner) in &via_link {
        if let Partner::Term(t) = partner {
            term_anchor.insert(*t, (*p, false));
        }
    }

    let mut graph = g.clone();
    for aid in &doomed_arrows {
        graph.remove_arrow(*aid);
    }
    for id in &rep.delete {
        graph.remove_node(*id);
    }
    let new_ids: Vec<NodeId> = rep.add.iter().map(|k| graph.add_node(*k)).collect();
    let term_end = |t: &Term| -> Option<(End, bool)> {
        match t {
            Term::Keep(e, is_tail) => Some((e.clone(), *is_tail)),
            Term::New(n, p) => Some((
                End::Port(PortRef::new(new_ids[*n], *p)),
                rep.add[*n].direction(*p) == Some(Direction::Out),
            )),
            Term::FreshTail(l) => Some((End::Free(l.clone()), true)),
            Term::Void => None,
        }
    };

    let mut visited: HashSet<PortRef> = HashSet::new();
    let mut paths = Vec::new();
    let mut done_terms: HashSet<usize> = HashSet::new();
    let mut anchored: Vec<usize> = term_anchor.keys().copied().collect();
    anchored.sort_unstable();
    for start in anchored {
        if done_terms.contains(&start) {
            continue;
        }
        let (first, entered_by_arrow) = term_anchor[&start];
        let mut ports = Vec::new();
        let mut cur = first;
        // If we entered through the arrow, leave through the link, and so on.
        let mut next_is_link = entered_by_arrow;
        let end = loop {
            visited.insert(cur);
            ports.push(cur);
            let partner = if next_is_link { via_link[&cur] } else { via_arrow[&cur] };
            match partner {
                Partner::Old(q) => {
                    cur = q;
                    next_is_link = !next_is_link;
                }
                Partner::Term(t) => break t,
            }
        };
        done_terms.insert(start);
        done_terms.insert(end);
        let a = term_end(&terms[start]);
        let b = term_end(&terms[end]);
        let arrow = match (a, b) {
            (None, None) => None,
            (Some((ea, ta)), Some((eb, tb))) if ta != tb => {
                let (tail, head) = if ta { (ea, eb) } else { (eb, ea) };
                if !ta {
                    ports.reverse();
                }
                Some(graph.add_arrow(tail, head))
            }
            _ => return Err(mismatch("fused chain has inconsistent orientation")),
        };
        paths.push(PathRecord { arrow, ports });
    }
    for (ta, tb) in direct {
        let (Some((ea, a_tail)), Some((eb, b_tail))) = (term_end(&terms[ta]), term_end(&terms[tb]))
        else {
            return Err(mismatch("void linked to a new port"));
        };
        if a_tail == b_tail {
            return Err(mismatch("new wire joins two ports of the same direction"));
        }
        let (tail, head) = if a_tail { (ea, eb) } else { (eb, ea) };
        let arrow = graph.add_arrow(tail, head);
        paths.push(PathRecord { arrow: Some(arrow), ports: Vec::new() });
    }

    let mut cycles = Vec::new();
    let mut remaining: Vec<PortRef> = old_ports
        .iter()
        .copied()
        .filter(|p| !visited.contains(p))
        .collect();
    remaining.sort();
    for start in remaining {
        if visited.contains(&start) {
            continue;
        }
        let kind = g.node(start.node).expect("old node");
        if kind.direction(start.port) != Some(Direction::In) {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        let mut next_is_link = true;
        loop {
            visited.insert(cur);
            cycle.push(cur);
            let partner = if next_is_link { via_link[&cur] } else { via_arrow[&cur] };
            let Partner::Old(q) = partner else {
                return Err(mismatch("cycle reached a terminal"));
            };
            next_is_link = !next_is_link;
            if q == start {
                break;
            }
            cur = q;
        }
        cycles.push(cycle);
    }
    if old_ports.iter().any(|p| !visited.contains(p)) {
        return Err(mismatch("cycle without an in port"));
    }
    graph.add_loops(cycles.len());
    Ok(Outcome { graph, new_ids, paths, cycles })
}

/// Where an inserted pair chain sits: on an existing arrow or on a loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainSite {
    Arrow(ArrowId),
    Loop,
}

/// A chain of `(in, out)` port pairs threaded, in order, onto one arrow or
/// loop. Pair indices refer to the move's own pair numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub site: ChainSite,
    pub pairs: Vec<usize>,
}

/// Chains describing how fused pairs ended up after a forward move.
pub(crate) fn chains_from(outcome: &Outcome, pair_of_in: &HashMap<PortRef, usize>) -> Vec<Chain> {
    let mut out = Vec::new();
    for p in &outcome.paths {
        let pairs: Vec<usize> = p.ports.iter().filter_map(|q| pair_of_in.get(q).copied()).collect();
        if let (Some(aid), false) = (p.arrow, pairs.is_empty()) {
            out.push(Chain { site: ChainSite::Arrow(aid), pairs });
        }
    }
    for c in &outcome.cycles {
        let pairs: Vec<usize> = c.iter().filter_map(|q| pair_of_in.get(q).copied()).collect();
        if !pairs.is_empty() {
            out.push(Chain { site: ChainSite::Loop, pairs });
        }
    }
    out
}

/// Threads `pairs` (in port, out port) onto arrows and loops per `chains`.
/// Every pair must be used exactly once.
pub(crate) fn thread_pairs(
    g: &mut ZGraph,
    pairs: &[(PortRef, PortRef)],
    chains: &[Chain],
) -> Result<(), RewriteError> {
    let mut used = vec![false; pairs.len()];
    let mut seen_arrows = HashSet::new();
    for c in chains {
        if c.pairs.is_empty() {
            return Err(mismatch("empty chain"));
        }
        for &i in &c.pairs {
            if i >= pairs.len() || std::mem::replace(&mut used[i], true) {
                return Err(mismatch(format!("pair {i} missing or used twice")));
            }
        }
        if let ChainSite::Arrow(aid) = c.site {
            if !seen_arrows.insert(aid) || g.arrow(aid).is_none() {
                return Err(mismatch(format!("arrow {aid} missing or selected twice")));
            }
        }
    }
    if used.iter().any(|u| !u) {
        return Err(mismatch("not every pair placed"));
    }
    let loops_needed = chains.iter().filter(|c| c.site == ChainSite::Loop).count();
    if !g.take_loops(loops_needed) {
        return Err(mismatch("not enough loops"));
    }
    for c in chains {
        let (first_tail, last_head) = match c.site {
            ChainSite::Arrow(aid) => {
                let a = g.remove_arrow(aid).expect("checked");
                (a.tail, a.head)
            }
            ChainSite::Loop => {
                let last = pairs[*c.pairs.last().expect("non-empty")].1;
                let first = pairs[c.pairs[0]].0;
                (End::Port(last), End::Port(first))
            }
        };
        if c.site == ChainSite::Loop {
            for w in c.pairs.windows(2) {
                g.connect(pairs[w[0]].1, pairs[w[1]].0);
            }
            g.add_arrow(first_tail, last_head);
        } else {
            g.add_arrow(first_tail, End::Port(pairs[c.pairs[0]].0));
            for w in c.pairs.windows(2) {
                g.connect(pairs[w[0]].1, pairs[w[1]].0);
            }
            g.add_arrow(End::Port(pairs[*c.pairs.last().expect("non-empty")].1), last_head);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{isomorphic, parse_zg, validate, IsoOptions};

    #[test]
    fn fusing_through_a_deleted_node() {
        // Replace a fanout by a straight wire in -> out1, dropping out2's arrow end.
        let g = parse_zg("FO a b c\nT c").unwrap();
        let fo = NodeId(0);
        let t = NodeId(1);
        let mut rep = Replacement { delete: vec![fo, t], ..Default::default() };
        rep.fuse(PortRef::new(fo, Port::Zero), PortRef::new(fo, Port::Var(1)));
        rep.drop(PortRef::new(fo, Port::Var(2)));
        rep.drop(PortRef::new(t, Port::Zero));
        let out = apply_replacement(&g, &rep).unwrap();
        assert!(validate(&out.graph).is_empty());
        assert!(isomorphic(&out.graph, &parse_zg("ARROW a b").unwrap(), IsoOptions::default()));
        assert_eq!(out.graph.free_ends(), vec![("a".into(), true), ("b".into(), false)]);
    }

    #[test]
    fn self_fusion_closes_a_loop() {
        let g = parse_zg("FO x y c\nARROW y x\nT c").unwrap();
        let mut rep = Replacement::default();
        let (fo, t) = (NodeId(0), NodeId(1));
        rep.delete = vec![fo, t];
        rep.fuse(PortRef::new(fo, Port::Zero), PortRef::new(fo, Port::Var(1)));
        rep.drop(PortRef::new(fo, Port::Var(2)));
        rep.drop(PortRef::new(t, Port::Zero));
        let out = apply_replacement(&g, &rep).unwrap();
        assert_eq!(out.graph.loop_count(), 1);
        assert_eq!(out.graph.arrow_count(), 0);
        assert_eq!(out.cycles.len(), 1);
    }

    #[test]
    fn unlinked_port_is_rejected() {
        let g = parse_zg("T a").unwrap();
        let rep = Replacement { delete: vec![NodeId(0)], ..Default::default() };
        assert!(apply_replacement(&g, &rep).is_err());
    }

    #[test]
    fn threading_restores_a_chain() {
        let mut g = parse_zg("ARROW a b").unwrap();
        let fo = g.add_node(NodeKind::FanOut);
        let t = g.add_node(NodeKind::Termination);
        g.connect(PortRef::new(fo, Port::Var(2)), PortRef::new(t, Port::Zero));
        let aid = g.arrows().next().unwrap().0;
        thread_pairs(
            &mut g,
            &[(PortRef::new(fo, Port::Zero), PortRef::new(fo, Port::Var(1)))],
            &[Chain { site: ChainSite::Arrow(aid), pairs: vec![0] }],
        )
        .unwrap();
        assert!(validate(&g).is_empty());
        assert!(isomorphic(&g, &parse_zg("FO a b c\nT c").unwrap(), IsoOptions::default()));
    }
}
