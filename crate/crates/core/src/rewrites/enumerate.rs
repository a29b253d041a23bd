use std::collections::HashMap;

use crate::graph::{End, NodeId, NodeKind, Port, PortIndex, PortRef, ZGraph};

use super::{Case, ClickCase, Match, MoveKind, Rotation};

/// Node order used to sort matches: depth-first from the free outputs
/// (sorted by label), visiting in ports in port order before out ports.
/// Application spines are walked function-first, so smaller ranks are
/// further left and further out. Unreached nodes follow in id order.
pub fn canonical_rank(g: &ZGraph) -> HashMap<NodeId, usize> {
    let index = g.port_index();
    let mut rank = HashMap::new();
    let mut roots: Vec<(String, NodeId)> = g
        .arrows()
        .filter_map(|(_, a)| match (&a.tail, &a.head) {
            (End::Port(p), End::Free(l)) => Some((l.clone(), p.node)),
            _ => None,
        })
        .collect();
    roots.sort();
    let mut starts: Vec<NodeId> = roots.into_iter().map(|(_, n)| n).collect();
    starts.extend(g.nodes().map(|(id, _)| id));
    for start in starts {
        if rank.contains_key(&start) {
            continue;
        }
        let mut stack = vec![start];
        while let Some(n) = stack.pop() {
            if rank.contains_key(&n) {
                continue;
            }
            rank.insert(n, rank.len());
            let kind = g.node(n).expect("node");
            let mut next = Vec::new();
            for port in kind.ports() {
                if let Some(a) = index.get(&PortRef::new(n, port)).and_then(|a| g.arrow(*a)) {
                    let other = if a.head == End::Port(PortRef::new(n, port)) { &a.tail } else { &a.head };
                    if let End::Port(q) = other {
                        next.push((kind.direction(port), q.node));
                    }
                }
            }
            // In ports first, in port order.
            next.sort_by_key(|(d, _)| *d != Some(crate::graph::Direction::In));
            for (_, q) in next.into_iter().rev() {
                if !rank.contains_key(&q) {
                    stack.push(q);
                }
            }
        }
    }
    rank
}

/// The node at the head of the arrow leaving `p`, with the port it enters.
fn head_of(g: &ZGraph, index: &PortIndex, p: PortRef) -> Option<PortRef> {
    let a = g.arrow(*index.get(&p)?)?;
    a.head.port()
}

fn tail_of<'a>(g: &'a ZGraph, index: &PortIndex, p: PortRef) -> Option<&'a End> {
    let a = g.arrow(*index.get(&p)?)?;
    Some(&a.tail)
}

fn kind_at(g: &ZGraph, p: Option<PortRef>, port: Port) -> Option<(NodeId, NodeKind)> {
    let p = p?;
    (p.port == port).then(|| (p.node, g.node(p.node).expect("node")))
}

/// All occurrences of `kind`'s pattern, sorted by the canonical ranks of the
/// bound nodes (outermost first), then by case.
pub fn enumerate_matches(g: &ZGraph, kind: MoveKind) -> Vec<Match> {
    let index = g.port_index();
    let rank = canonical_rank(g);
    let mut out = Vec::new();
    collect(g, index, kind, &mut out);
    sort_matches(&mut out, &rank);
    out
}

/// Matches of several kinds, concatenated in the given kind order.
pub fn enumerate_all(g: &ZGraph, kinds: &[MoveKind]) -> Vec<Match> {
    let index = g.port_index();
    let rank = canonical_rank(g);
    let mut all = Vec::new();
    for &k in kinds {
        let mut out = Vec::new();
        collect(g, index, k, &mut out);
        sort_matches(&mut out, &rank);
        all.extend(out);
    }
    all
}

/// The matches of the first kind in `kinds` that has any match accepted by
/// `keep`, sorted as in [`enumerate_matches`].
pub fn enumerate_first(
    g: &ZGraph,
    kinds: &[MoveKind],
    keep: impl Fn(&Match) -> bool,
) -> Option<(MoveKind, Vec<Match>)> {
    let index = g.port_index();
    kinds.iter().find_map(|&k| {
        let mut out = Vec::new();
        collect(g, index, k, &mut out);
        out.retain(&keep);
        if out.is_empty() {
            return None;
        }
        sort_matches(&mut out, &canonical_rank(g));
        Some((k, out))
    })
}

fn sort_matches(ms: &mut [Match], rank: &HashMap<NodeId, usize>) {
    ms.sort_by_cached_key(|m| {
        let mut r: Vec<usize> = m.nodes.iter().map(|n| rank[n]).collect();
        r.sort_unstable();
        (r, m.case)
    });
}

fn collect(g: &ZGraph, index: &PortIndex, kind: MoveKind, out: &mut Vec<Match>) {
    use NodeKind::*;
    let spine = |n: NodeId| head_of(g, index, PortRef::new(n, Port::ZeroPrime));
    for (id, nk) in g.nodes() {
        match (kind, nk) {
            (MoveKind::Click, HalfZipperMinus(n)) => {
                if let Some((zp, HalfZipperPlus(m))) = kind_at(g, spine(id), Port::Zero) {
                    let case = match m.cmp(&n) {
                        std::cmp::Ordering::Equal => ClickCase::Equal,
                        std::cmp::Ordering::Greater => ClickCase::PlusLonger,
                        std::cmp::Ordering::Less => ClickCase::MinusLonger,
                    };
                    out.push(Match::new(kind, vec![id, zp], Case::Click(case)));
                }
            }
            (MoveKind::Zip, Zipper(_)) => out.push(Match::new(kind, vec![id], Case::None)),
            (MoveKind::TowerMerge, HalfZipperMinus(_)) => {
                if let Some((o, HalfZipperMinus(_))) = kind_at(g, spine(id), Port::Zero) {
                    if o != id {
                        out.push(Match::new(kind, vec![id, o], Case::None));
                    }
                }
            }
            (MoveKind::TowerMerge, HalfZipperPlus(_)) => {
                if let Some((o, HalfZipperPlus(_))) = kind_at(g, spine(id), Port::Zero) {
                    if o != id {
                        out.push(Match::new(kind, vec![id, o], Case::None));
                    }
                }
            }
            (MoveKind::TowerSplit, HalfZipperMinus(n) | HalfZipperPlus(n)) => {
                for p in 1..n {
                    out.push(Match::new(kind, vec![id], Case::Split(p)));
                }
            }
            (MoveKind::CoComm, FanOut) => out.push(Match::new(kind, vec![id], Case::None)),
            (MoveKind::CoAssoc, FanOut) => {
                for (k, rot) in [(1, Rotation::Right), (2, Rotation::Left)] {
                    let h = head_of(g, index, PortRef::new(id, Port::Var(k)));
                    if let Some((b, FanOut)) = kind_at(g, h, Port::Zero) {
                        if b != id {
                            out.push(Match::new(kind, vec![id, b], Case::Assoc(rot)));
                        }
                    }
                }
            }
            (MoveKind::FanInCross, FanIn) => {
                if let Some((fo, FanOut)) = kind_at(g, spine(id), Port::Zero) {
                    out.push(Match::new(kind, vec![id, fo], Case::None));
                }
            }
            (MoveKind::DistPlus, HalfZipperPlus(_)) | (MoveKind::DistMinus, HalfZipperMinus(_)) => {
                if let Some((fo, FanOut)) = kind_at(g, spine(id), Port::Zero) {
                    out.push(Match::new(kind, vec![id, fo], Case::None));
                }
            }
            (MoveKind::PruneZP, HalfZipperPlus(_))
            | (MoveKind::PruneZM, HalfZipperMinus(_))
            | (MoveKind::PruneFI, FanIn) => {
                if let Some((t, Termination)) = kind_at(g, spine(id), Port::Zero) {
                    out.push(Match::new(kind, vec![id, t], Case::None));
                }
            }
            (MoveKind::PruneFO, FanOut) => {
                for k in 1..=2 {
                    let h = head_of(g, index, PortRef::new(id, Port::Var(k)));
                    if let Some((t, Termination)) = kind_at(g, h, Port::Zero) {
                        out.push(Match::new(kind, vec![id, t], Case::PruneOut(k)));
                    }
                }
            }
            (MoveKind::PruneArrowT, Termination) => {
                if let Some(End::Free(_)) = tail_of(g, index, PortRef::new(id, Port::Zero)) {
                    out.push(Match::new(kind, vec![id], Case::None));
                }
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;

    #[test]
    fn identity_has_no_click() {
        let g = parse_zg("ZM 1 x out x").unwrap();
        assert!(enumerate_matches(&g, MoveKind::Click).is_empty());
    }

    #[test]
    fn applied_identity_has_one_click() {
        let g = parse_zg("ZM 1 x f x\nZM 1 y a y\nZP 1 f a out").unwrap();
        let ms = enumerate_matches(&g, MoveKind::Click);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].nodes, vec![NodeId(0), NodeId(2)]);
        assert_eq!(ms[0].case, Case::Click(ClickCase::Equal));
    }

    #[test]
    fn stacked_fanouts_have_one_coassoc() {
        let g = parse_zg("FO a b z\nFO b x y").unwrap();
        let ms = enumerate_matches(&g, MoveKind::CoAssoc);
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].case, Case::Assoc(Rotation::Right));
    }

    #[test]
    fn split_points_and_prunes() {
        let g = parse_zg("ZM 3 a o x y z\nT o").unwrap();
        assert_eq!(enumerate_matches(&g, MoveKind::TowerSplit).len(), 2);
        assert_eq!(enumerate_matches(&g, MoveKind::PruneZM).len(), 1);
        assert_eq!(enumerate_matches(&g, MoveKind::PruneArrowT).len(), 0);
        let g = parse_zg("T a").unwrap();
        assert_eq!(enumerate_matches(&g, MoveKind::PruneArrowT).len(), 1);
    }

    #[test]
    fn rank_visits_function_before_argument() {
        // out <- ZP(f, a); f from n0, a from n1.
        let g = parse_zg("ZM 1 x a x\nZM 1 y f y\nZP 1 f a out").unwrap();
        let r = canonical_rank(&g);
        assert_eq!(r[&NodeId(2)], 0);
        assert_eq!(r[&NodeId(1)], 1);
        assert_eq!(r[&NodeId(0)], 2);
    }
}
