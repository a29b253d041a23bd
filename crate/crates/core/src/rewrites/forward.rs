use std::collections::{BTreeSet, HashMap};

use crate::graph::{Direction, End, NodeId, NodeKind, Port, PortRef, ZGraph};

use super::splice::{apply_replacement, chains_from, Outcome, Replacement, Site};
use super::{Body, Case, ClickCase, Inverse, Match, MoveKind, RewriteError, Rotation};

pub(crate) fn pr(node: NodeId, port: Port) -> PortRef {
    PortRef::new(node, port)
}

pub(crate) fn mismatch(msg: impl Into<String>) -> RewriteError {
    RewriteError::PatternMismatch(msg.into())
}

pub(crate) fn kind_of(g: &ZGraph, id: NodeId) -> Result<NodeKind, RewriteError> {
    g.node(id).ok_or_else(|| mismatch(format!("node {id} does not exist")))
}

/// Head of the arrow leaving out port `p`.
pub(crate) fn head_at(g: &ZGraph, p: PortRef) -> Option<PortRef> {
    g.arrow(g.arrow_at(p)?)?.head.port()
}

pub(crate) fn require_link(g: &ZGraph, from: PortRef, to: PortRef) -> Result<(), RewriteError> {
    if head_at(g, from) == Some(to) {
        Ok(())
    } else {
        Err(mismatch(format!("expected arrow {from} -> {to}")))
    }
}

fn minus(g: &ZGraph, id: NodeId) -> Result<u32, RewriteError> {
    match kind_of(g, id)? {
        NodeKind::HalfZipperMinus(n) => Ok(n),
        k => Err(mismatch(format!("{id} is {k}, expected ZM"))),
    }
}

fn plus(g: &ZGraph, id: NodeId) -> Result<u32, RewriteError> {
    match kind_of(g, id)? {
        NodeKind::HalfZipperPlus(n) => Ok(n),
        k => Err(mismatch(format!("{id} is {k}, expected ZP"))),
    }
}

pub(crate) fn require(g: &ZGraph, id: NodeId, want: NodeKind) -> Result<(), RewriteError> {
    let k = kind_of(g, id)?;
    if k == want {
        Ok(())
    } else {
        Err(mismatch(format!("{id} is {k}, expected {want}")))
    }
}

fn nodes<const N: usize>(m: &Match) -> Result<[NodeId; N], RewriteError> {
    m.nodes
        .clone()
        .try_into()
        .map_err(|_| mismatch(format!("{} binds {} nodes", m.kind, m.nodes.len())))
}

/// In ports of a half-zipper or zipper in order: 0, 1', .., n'.
pub(crate) fn in_ports(kind: NodeKind) -> Vec<Port> {
    kind.ports()
        .into_iter()
        .filter(|p| kind.direction(*p) == Some(Direction::In))
        .collect()
}

/// Applies a move, returning only the rewritten graph.
pub fn apply(g: &ZGraph, m: &Match) -> Result<ZGraph, RewriteError> {
    apply_traced(g, m).map(|(g, _)| g)
}

/// Applies a move and returns the data needed to undo it with [`super::reverse`].
pub fn apply_traced(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    match m.kind {
        MoveKind::Click => click(g, m),
        MoveKind::Zip => zip(g, m),
        MoveKind::TowerMerge => tower_merge(g, m),
        MoveKind::TowerSplit => tower_split(g, m),
        MoveKind::CoComm => co_comm(g, m),
        MoveKind::CoAssoc => co_assoc(g, m),
        MoveKind::FanInCross => fan_in(g, m),
        MoveKind::DistPlus => dist_plus(g, m),
        MoveKind::DistMinus => dist_minus(g, m),
        MoveKind::PruneZP => prune_zp(g, m),
        MoveKind::PruneZM => prune_zm(g, m),
        MoveKind::PruneFO => prune_fo(g, m),
        MoveKind::PruneFI => prune_fi(g, m),
        MoveKind::PruneArrowT => prune_arrow(g, m),
    }
}

fn run(g: &ZGraph, r: &Replacement) -> Result<Outcome, RewriteError> {
    apply_replacement(g, r)
}

fn click(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [zm, zp] = nodes(m)?;
    let n = minus(g, zm)?;
    let k = plus(g, zp)?;
    require_link(g, pr(zm, Port::ZeroPrime), pr(zp, Port::Zero))?;
    let case = match k.cmp(&n) {
        std::cmp::Ordering::Equal => ClickCase::Equal,
        std::cmp::Ordering::Greater => ClickCase::PlusLonger,
        std::cmp::Ordering::Less => ClickCase::MinusLonger,
    };
    if m.case != Case::Click(case) {
        return Err(mismatch("click case does not match arities"));
    }
    let mut r = Replacement { delete: vec![zm, zp], ..Default::default() };
    r.drop(pr(zm, Port::ZeroPrime));
    r.drop(pr(zp, Port::Zero));
    let z = r.node(NodeKind::Zipper(n.min(k)));
    let common = n.min(k);
    for i in 1..=common {
        r.attach(pr(zp, Port::Arg(i)), z, Port::Arg(i));
        r.attach(pr(zm, Port::Var(i)), z, Port::Var(i));
    }
    match case {
        ClickCase::Equal => {
            r.attach(pr(zm, Port::Zero), z, Port::Zero);
            r.attach(pr(zp, Port::ZeroPrime), z, Port::ZeroPrime);
        }
        ClickCase::PlusLonger => {
            let res = r.node(NodeKind::HalfZipperPlus(k - n));
            r.attach(pr(zm, Port::Zero), z, Port::Zero);
            r.wire((z, Port::ZeroPrime), (res, Port::Zero));
            for j in 1..=k - n {
                r.attach(pr(zp, Port::Arg(n + j)), res, Port::Arg(j));
            }
            r.attach(pr(zp, Port::ZeroPrime), res, Port::ZeroPrime);
        }
        ClickCase::MinusLonger => {
            let res = r.node(NodeKind::HalfZipperMinus(n - k));
            r.attach(pr(zm, Port::Zero), res, Port::Zero);
            r.wire((res, Port::ZeroPrime), (z, Port::Zero));
            for j in 1..=n - k {
                r.attach(pr(zm, Port::Var(k + j)), res, Port::Var(j));
            }
            r.attach(pr(zp, Port::ZeroPrime), z, Port::ZeroPrime);
        }
    }
    let out = run(g, &r)?;
    let inv = Inverse::Unclick { zipper: out.new_ids[0], residual: out.new_ids.get(1).copied(), case };
    Ok((out.graph, inv))
}

fn zip(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [z] = nodes(m)?;
    let NodeKind::Zipper(n) = kind_of(g, z)? else {
        return Err(mismatch(format!("{z} is not a zipper")));
    };
    let mut r = Replacement { delete: vec![z], ..Default::default() };
    let mut pairs = HashMap::new();
    r.fuse(pr(z, Port::Zero), pr(z, Port::ZeroPrime));
    pairs.insert(pr(z, Port::Zero), 0);
    for i in 1..=n {
        r.fuse(pr(z, Port::Arg(i)), pr(z, Port::Var(i)));
        pairs.insert(pr(z, Port::Arg(i)), i as usize);
    }
    let out = run(g, &r)?;
    let chains = chains_from(&out, &pairs);
    Ok((out.graph, Inverse::Unzip { arity: n, chains }))
}

fn tower_merge(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [a, b] = nodes(m)?;
    if a == b {
        return Err(mismatch("tower merge needs two nodes"));
    }
    require_link(g, pr(a, Port::ZeroPrime), pr(b, Port::Zero))?;
    let mut r = Replacement { delete: vec![a, b], ..Default::default() };
    r.drop(pr(a, Port::ZeroPrime));
    r.drop(pr(b, Port::Zero));
    let point = match (kind_of(g, a)?, kind_of(g, b)?) {
        (NodeKind::HalfZipperMinus(k), NodeKind::HalfZipperMinus(j)) => {
            let t = r.node(NodeKind::HalfZipperMinus(j + k));
            r.attach(pr(a, Port::Zero), t, Port::Zero);
            r.attach(pr(b, Port::ZeroPrime), t, Port::ZeroPrime);
            for i in 1..=j {
                r.attach(pr(b, Port::Var(i)), t, Port::Var(i));
            }
            for i in 1..=k {
                r.attach(pr(a, Port::Var(i)), t, Port::Var(j + i));
            }
            j
        }
        (NodeKind::HalfZipperPlus(j), NodeKind::HalfZipperPlus(k)) => {
            let t = r.node(NodeKind::HalfZipperPlus(j + k));
            r.attach(pr(a, Port::Zero), t, Port::Zero);
            r.attach(pr(b, Port::ZeroPrime), t, Port::ZeroPrime);
            for i in 1..=j {
                r.attach(pr(a, Port::Arg(i)), t, Port::Arg(i));
            }
            for i in 1..=k {
                r.attach(pr(b, Port::Arg(i)), t, Port::Arg(j + i));
            }
            j
        }
        _ => return Err(mismatch("tower merge needs two half-zippers of one sign")),
    };
    let out = run(g, &r)?;
    let inv = Match::new(MoveKind::TowerSplit, vec![out.new_ids[0]], Case::Split(point));
    Ok((out.graph, Inverse::Forward(inv)))
}

fn tower_split(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [t] = nodes(m)?;
    let Case::Split(p) = m.case else {
        return Err(mismatch("tower split without a split point"));
    };
    let kind = kind_of(g, t)?;
    let n = match kind {
        NodeKind::HalfZipperMinus(n) | NodeKind::HalfZipperPlus(n) => n,
        _ => return Err(mismatch(format!("{t} is not a half-zipper"))),
    };
    if p == 0 || p >= n {
        return Err(RewriteError::SplitOutOfRange { point: p, arity: n });
    }
    let mut r = Replacement { delete: vec![t], ..Default::default() };
    let roles = if let NodeKind::HalfZipperMinus(_) = kind {
        let outer = r.node(NodeKind::HalfZipperMinus(p));
        let inner = r.node(NodeKind::HalfZipperMinus(n - p));
        r.attach(pr(t, Port::Zero), inner, Port::Zero);
        r.wire((inner, Port::ZeroPrime), (outer, Port::Zero));
        r.attach(pr(t, Port::ZeroPrime), outer, Port::ZeroPrime);
        for i in 1..=p {
            r.attach(pr(t, Port::Var(i)), outer, Port::Var(i));
        }
        for i in 1..=n - p {
            r.attach(pr(t, Port::Var(p + i)), inner, Port::Var(i));
        }
        [inner, outer]
    } else {
        let lower = r.node(NodeKind::HalfZipperPlus(p));
        let upper = r.node(NodeKind::HalfZipperPlus(n - p));
        r.attach(pr(t, Port::Zero), lower, Port::Zero);
        r.wire((lower, Port::ZeroPrime), (upper, Port::Zero));
        r.attach(pr(t, Port::ZeroPrime), upper, Port::ZeroPrime);
        for i in 1..=p {
            r.attach(pr(t, Port::Arg(i)), lower, Port::Arg(i));
        }
        for i in 1..=n - p {
            r.attach(pr(t, Port::Arg(p + i)), upper, Port::Arg(i));
        }
        [lower, upper]
    };
    let out = run(g, &r)?;
    let ids = roles.iter().map(|&i| out.new_ids[i]).collect();
    Ok((out.graph, Inverse::Forward(Match::new(MoveKind::TowerMerge, ids, Case::None))))
}

fn co_comm(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [f] = nodes(m)?;
    require(g, f, NodeKind::FanOut)?;
    let mut r = Replacement { delete: vec![f], ..Default::default() };
    let h = r.node(NodeKind::FanOut);
    r.attach(pr(f, Port::Zero), h, Port::Zero);
    r.attach(pr(f, Port::Var(1)), h, Port::Var(2));
    r.attach(pr(f, Port::Var(2)), h, Port::Var(1));
    let out = run(g, &r)?;
    let inv = Match::new(MoveKind::CoComm, vec![out.new_ids[0]], Case::None);
    Ok((out.graph, Inverse::Forward(inv)))
}

fn co_assoc(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [a, b] = nodes(m)?;
    let Case::Assoc(rot) = m.case else {
        return Err(mismatch("coassoc without an orientation"));
    };
    require(g, a, NodeKind::FanOut)?;
    require(g, b, NodeKind::FanOut)?;
    if a == b {
        return Err(mismatch("coassoc needs two fanouts"));
    }
    let via = if rot == Rotation::Right { 1 } else { 2 };
    require_link(g, pr(a, Port::Var(via)), pr(b, Port::Zero))?;
    let mut r = Replacement { delete: vec![a, b], ..Default::default() };
    r.drop(pr(a, Port::Var(via)));
    r.drop(pr(b, Port::Zero));
    let top = r.node(NodeKind::FanOut);
    let low = r.node(NodeKind::FanOut);
    r.attach(pr(a, Port::Zero), top, Port::Zero);
    match rot {
        Rotation::Right => {
            r.attach(pr(b, Port::Var(1)), top, Port::Var(1));
            r.wire((top, Port::Var(2)), (low, Port::Zero));
            r.attach(pr(b, Port::Var(2)), low, Port::Var(1));
            r.attach(pr(a, Port::Var(2)), low, Port::Var(2));
        }
        Rotation::Left => {
            r.wire((top, Port::Var(1)), (low, Port::Zero));
            r.attach(pr(a, Port::Var(1)), low, Port::Var(1));
            r.attach(pr(b, Port::Var(1)), low, Port::Var(2));
            r.attach(pr(b, Port::Var(2)), top, Port::Var(2));
        }
    }
    let out = run(g, &r)?;
    let inv = Match::new(MoveKind::CoAssoc, out.new_ids.clone(), Case::Assoc(rot.opposite()));
    Ok((out.graph, Inverse::Forward(inv)))
}

fn fan_in(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [fi, fo] = nodes(m)?;
    require(g, fi, NodeKind::FanIn)?;
    require(g, fo, NodeKind::FanOut)?;
    require_link(g, pr(fi, Port::ZeroPrime), pr(fo, Port::Zero))?;
    let mut r = Replacement { delete: vec![fi, fo], ..Default::default() };
    r.drop(pr(fi, Port::ZeroPrime));
    r.drop(pr(fo, Port::Zero));
    r.fuse(pr(fi, Port::Arg(1)), pr(fo, Port::Var(2)));
    r.fuse(pr(fi, Port::Arg(2)), pr(fo, Port::Var(1)));
    let pairs = HashMap::from([(pr(fi, Port::Arg(1)), 0), (pr(fi, Port::Arg(2)), 1)]);
    let out = run(g, &r)?;
    let chains = chains_from(&out, &pairs);
    Ok((out.graph, Inverse::UnfanIn { chains }))
}

fn dist_plus(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [p, f] = nodes(m)?;
    let n = plus(g, p)?;
    require(g, f, NodeKind::FanOut)?;
    require_link(g, pr(p, Port::ZeroPrime), pr(f, Port::Zero))?;
    let mut r = Replacement { delete: vec![p, f], ..Default::default() };
    r.drop(pr(p, Port::ZeroPrime));
    r.drop(pr(f, Port::Zero));
    let kind = NodeKind::HalfZipperPlus(n);
    let c1 = r.node(kind);
    let c2 = r.node(kind);
    let mut fans = Vec::new();
    for q in in_ports(kind) {
        let fo = r.node(NodeKind::FanOut);
        r.attach(pr(p, q), fo, Port::Zero);
        r.wire((fo, Port::Var(1)), (c1, q));
        r.wire((fo, Port::Var(2)), (c2, q));
        fans.push(fo);
    }
    r.attach(pr(f, Port::Var(1)), c1, Port::ZeroPrime);
    r.attach(pr(f, Port::Var(2)), c2, Port::ZeroPrime);
    let out = run(g, &r)?;
    let ids = &out.new_ids;
    let inv = Inverse::Undist {
        plus: true,
        copies: [ids[c1], ids[c2]],
        fanouts: fans.iter().map(|&i| ids[i]).collect(),
        fanins: Vec::new(),
    };
    Ok((out.graph, inv))
}

fn dist_minus(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [z, f] = nodes(m)?;
    let n = minus(g, z)?;
    require(g, f, NodeKind::FanOut)?;
    require_link(g, pr(z, Port::ZeroPrime), pr(f, Port::Zero))?;
    let mut r = Replacement { delete: vec![z, f], ..Default::default() };
    r.drop(pr(z, Port::ZeroPrime));
    r.drop(pr(f, Port::Zero));
    let kind = NodeKind::HalfZipperMinus(n);
    let c1 = r.node(kind);
    let c2 = r.node(kind);
    let f0 = r.node(NodeKind::FanOut);
    r.attach(pr(z, Port::Zero), f0, Port::Zero);
    r.wire((f0, Port::Var(1)), (c1, Port::Zero));
    r.wire((f0, Port::Var(2)), (c2, Port::Zero));
    let mut fins = Vec::new();
    for i in 1..=n {
        let fi = r.node(NodeKind::FanIn);
        // Crossed, so that a later FAN-IN against the argument's fanout
        // sends each copy's variable to the matching argument copy.
        r.wire((c2, Port::Var(i)), (fi, Port::Arg(1)));
        r.wire((c1, Port::Var(i)), (fi, Port::Arg(2)));
        r.attach(pr(z, Port::Var(i)), fi, Port::ZeroPrime);
        fins.push(fi);
    }
    r.attach(pr(f, Port::Var(1)), c1, Port::ZeroPrime);
    r.attach(pr(f, Port::Var(2)), c2, Port::ZeroPrime);
    let out = run(g, &r)?;
    let ids = &out.new_ids;
    let inv = Inverse::Undist {
        plus: false,
        copies: [ids[c1], ids[c2]],
        fanouts: vec![ids[f0]],
        fanins: fins.iter().map(|&i| ids[i]).collect(),
    };
    Ok((out.graph, inv))
}

fn prune_head(g: &ZGraph, m: &Match, node_ok: impl Fn(NodeKind) -> bool) -> Result<[NodeId; 2], RewriteError> {
    let [x, t] = nodes(m)?;
    if !node_ok(kind_of(g, x)?) {
        return Err(mismatch(format!("{} cannot prune {x}", m.kind)));
    }
    require(g, t, NodeKind::Termination)?;
    require_link(g, pr(x, Port::ZeroPrime), pr(t, Port::Zero))?;
    Ok([x, t])
}

fn prune_zp(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [p, t] = prune_head(g, m, |k| matches!(k, NodeKind::HalfZipperPlus(_)))?;
    let mut r = Replacement { delete: vec![p, t], ..Default::default() };
    r.drop(pr(p, Port::ZeroPrime));
    r.drop(pr(t, Port::Zero));
    for q in in_ports(kind_of(g, p)?) {
        let cap = r.node(NodeKind::Termination);
        r.attach(pr(p, q), cap, Port::Zero);
    }
    let out = run(g, &r)?;
    Ok((out.graph, Inverse::UnpruneZP { caps: out.new_ids }))
}

/// `count` distinct free labels not present in `g`.
fn fresh_labels(g: &ZGraph, count: usize) -> Vec<String> {
    let taken: BTreeSet<String> = g.free_labels();
    (0..)
        .map(|k| format!("_t{k}"))
        .filter(|l| !taken.contains(l))
        .take(count)
        .collect()
}

fn prune_zm(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [z, t] = prune_head(g, m, |k| matches!(k, NodeKind::HalfZipperMinus(_)))?;
    let n = minus(g, z)?;
    let mut r = Replacement { delete: vec![z, t], ..Default::default() };
    r.drop(pr(z, Port::ZeroPrime));
    r.drop(pr(t, Port::Zero));
    let body_tail = g
        .arrow_at(pr(z, Port::Zero))
        .and_then(|a| g.arrow(a))
        .map(|a| a.tail.clone())
        .ok_or_else(|| mismatch("port 0 has no arrow"))?;
    let self_var = match body_tail {
        End::Port(q) if q.node == z => match q.port {
            Port::Var(i) => Some(i),
            _ => None,
        },
        _ => None,
    };
    let cap = match self_var {
        Some(i) => {
            r.fuse(pr(z, Port::Zero), pr(z, Port::Var(i)));
            None
        }
        None => {
            let c = r.node(NodeKind::Termination);
            r.attach(pr(z, Port::Zero), c, Port::Zero);
            Some(c)
        }
    };
    let mut labels = fresh_labels(g, n as usize).into_iter();
    let mut vars = Vec::new();
    for i in 1..=n {
        if Some(i) == self_var {
            vars.push(None);
        } else {
            let l = labels.next().expect("enough labels");
            r.link(Site::Old(pr(z, Port::Var(i))), Site::FreshTail(l.clone()));
            vars.push(Some(l));
        }
    }
    let out = run(g, &r)?;
    let body = match (cap, self_var) {
        (Some(c), _) => Body::Cap(out.new_ids[c]),
        (None, Some(i)) => Body::SelfVar(i),
        (None, None) => unreachable!("either capped or self-closed"),
    };
    Ok((out.graph, Inverse::UnpruneZM { arity: n, body, vars }))
}

fn prune_fo(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [f, t] = nodes(m)?;
    let Case::PruneOut(k @ 1..=2) = m.case else {
        return Err(mismatch("prune-fo without an out port"));
    };
    require(g, f, NodeKind::FanOut)?;
    require(g, t, NodeKind::Termination)?;
    require_link(g, pr(f, Port::Var(k)), pr(t, Port::Zero))?;
    let mut r = Replacement { delete: vec![f, t], ..Default::default() };
    r.drop(pr(f, Port::Var(k)));
    r.drop(pr(t, Port::Zero));
    r.fuse(pr(f, Port::Zero), pr(f, Port::Var(3 - k)));
    let out = run(g, &r)?;
    let chains = chains_from(&out, &HashMap::from([(pr(f, Port::Zero), 0)]));
    Ok((out.graph, Inverse::UnpruneFO { chains, out: k }))
}

fn prune_fi(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [f, t] = prune_head(g, m, |k| k == NodeKind::FanIn)?;
    let mut r = Replacement { delete: vec![f, t], ..Default::default() };
    r.drop(pr(f, Port::ZeroPrime));
    r.drop(pr(t, Port::Zero));
    let c1 = r.node(NodeKind::Termination);
    let c2 = r.node(NodeKind::Termination);
    r.attach(pr(f, Port::Arg(1)), c1, Port::Zero);
    r.attach(pr(f, Port::Arg(2)), c2, Port::Zero);
    let out = run(g, &r)?;
    Ok((out.graph, Inverse::UnpruneFI { caps: [out.new_ids[0], out.new_ids[1]] }))
}

fn prune_arrow(g: &ZGraph, m: &Match) -> Result<(ZGraph, Inverse), RewriteError> {
    let [t] = nodes(m)?;
    require(g, t, NodeKind::Termination)?;
    let aid = g.arrow_at(pr(t, Port::Zero)).ok_or_else(|| mismatch("termination without arrow"))?;
    let End::Free(label) = g.arrow(aid).expect("indexed").tail.clone() else {
        return Err(mismatch("termination arrow has an attached tail"));
    };
    let mut out = g.clone();
    out.remove_arrow(aid);
    out.remove_node(t);
    out.add_loops(1);
    Ok((out, Inverse::UnpruneArrow { label }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{isomorphic, parse_zg, validate, IsoOptions};
    use crate::rewrites::enumerate_matches;

    fn iso(a: &ZGraph, b: &str) -> bool {
        isomorphic(a, &parse_zg(b).unwrap(), IsoOptions::default())
    }

    fn only(g: &ZGraph, k: MoveKind) -> Match {
        let ms = enumerate_matches(g, k);
        assert_eq!(ms.len(), 1, "{k}: {ms:?}");
        ms.into_iter().next().unwrap()
    }

    #[test]
    fn click_equal_arity() {
        let g = parse_zg("ZM 1 a f x\nZP 1 f c d").unwrap();
        let h = apply(&g, &only(&g, MoveKind::Click)).unwrap();
        assert!(validate(&h).is_empty());
        assert!(iso(&h, "Z 1 a c d x"));
        assert_eq!(h.free_ends(), g.free_ends());
    }

    #[test]
    fn click_plus_longer_leaves_plus_residual() {
        let g = parse_zg("ZM 1 a f x\nZP 2 f c1 c2 d").unwrap();
        let h = apply(&g, &only(&g, MoveKind::Click)).unwrap();
        assert!(iso(&h, "Z 1 a c1 e x\nZP 1 e c2 d"));
    }

    #[test]
    fn click_minus_longer_leaves_minus_residual() {
        let g = parse_zg("ZM 2 a f x y\nZP 1 f c d").unwrap();
        let h = apply(&g, &only(&g, MoveKind::Click)).unwrap();
        assert!(iso(&h, "ZM 1 a e y\nZ 1 e c d x"));
    }

    #[test]
    fn zip_fuses_pairs() {
        let g = parse_zg("Z 1 a c d x").unwrap();
        let h = apply(&g, &only(&g, MoveKind::Zip)).unwrap();
        assert!(iso(&h, "ARROW a d\nARROW c x"));
    }

    #[test]
    fn zip_identity_core() {
        let g = parse_zg("Z 1 x c d x").unwrap();
        let h = apply(&g, &only(&g, MoveKind::Zip)).unwrap();
        assert!(iso(&h, "ARROW c d"));
    }

    #[test]
    fn zip_closed_zipper_gives_two_loops() {
        let g = parse_zg("Z 1 a b a b").unwrap();
        let h = apply(&g, &only(&g, MoveKind::Zip)).unwrap();
        assert_eq!((h.node_count(), h.arrow_count(), h.loop_count()), (0, 0, 2));
    }

    #[test]
    fn tower_merges() {
        let g = parse_zg("ZM 1 a s x\nZM 1 s o y").unwrap();
        let h = apply(&g, &only(&g, MoveKind::TowerMerge)).unwrap();
        assert!(iso(&h, "ZM 2 a o y x"));
        let g = parse_zg("ZP 2 a p q s\nZP 1 s r o").unwrap();
        let h = apply(&g, &only(&g, MoveKind::TowerMerge)).unwrap();
        assert!(iso(&h, "ZP 3 a p q r o"));
    }

    #[test]
    fn split_then_merge_is_identity() {
        let g = parse_zg("ZM 3 a o x y z").unwrap();
        let m = Match::new(MoveKind::TowerSplit, vec![NodeId(0)], Case::Split(1));
        let h = apply(&g, &m).unwrap();
        assert!(iso(&h, "ZM 2 a s y z\nZM 1 s o x"));
        let back = apply(&h, &only(&h, MoveKind::TowerMerge)).unwrap();
        assert!(isomorphic(&back, &g, IsoOptions::default()));
        let bad = Match::new(MoveKind::TowerSplit, vec![NodeId(0)], Case::Split(3));
        assert_eq!(apply(&g, &bad), Err(RewriteError::SplitOutOfRange { point: 3, arity: 3 }));
    }

    #[test]
    fn co_comm_swaps() {
        let g = parse_zg("FO a b c\nT b").unwrap();
        let h = apply(&g, &only(&g, MoveKind::CoComm)).unwrap();
        assert!(iso(&h, "FO a c b\nT b"));
        assert!(!iso(&g, "FO a c b\nT b"));
        let twice = apply(&h, &only(&h, MoveKind::CoComm)).unwrap();
        assert!(isomorphic(&twice, &g, IsoOptions::default()));
    }

    #[test]
    fn co_assoc_rotates() {
        let g = parse_zg("FO a b z\nFO b x y").unwrap();
        let h = apply(&g, &only(&g, MoveKind::CoAssoc)).unwrap();
        assert!(iso(&h, "FO a x b\nFO b y z"));
        let back = apply(&h, &only(&h, MoveKind::CoAssoc)).unwrap();
        assert!(isomorphic(&back, &g, IsoOptions::default()));
    }

    #[test]
    fn fan_in_crosses() {
        let g = parse_zg("FI a b c\nFO c d e").unwrap();
        let h = apply(&g, &only(&g, MoveKind::FanInCross)).unwrap();
        assert!(iso(&h, "ARROW a e\nARROW b d"));
        let g = parse_zg("FI a b c\nFO c b a").unwrap();
        let h = apply(&g, &only(&g, MoveKind::FanInCross)).unwrap();
        assert_eq!(h.loop_count(), 2);
    }

    #[test]
    fn dist_counts() {
        let g = parse_zg("ZP 1 a b c\nFO c d e").unwrap();
        let h = apply(&g, &only(&g, MoveKind::DistPlus)).unwrap();
        assert!(iso(&h, "FO a a1 a2\nFO b b1 b2\nZP 1 a1 b1 d\nZP 1 a2 b2 e"));
        let g = parse_zg("ZP 2 a b c o\nFO o d e").unwrap();
        let h = apply(&g, &only(&g, MoveKind::DistPlus)).unwrap();
        assert_eq!(h.nodes().filter(|(_, k)| *k == NodeKind::FanOut).count(), 3);
        let g = parse_zg("ZM 1 a c x\nFO c d e").unwrap();
        let h = apply(&g, &only(&g, MoveKind::DistMinus)).unwrap();
        assert!(iso(&h, "FO a a1 a2\nZM 1 a1 d x1\nZM 1 a2 e x2\nFI x2 x1 x"));
    }

    #[test]
    fn prune_identity_gives_one_loop() {
        let g = parse_zg("ZM 1 x out x\nT out").unwrap();
        let h = apply(&g, &only(&g, MoveKind::PruneZM)).unwrap();
        assert!(h.is_empty() || (h.node_count() == 0 && h.arrow_count() == 0));
        assert_eq!(h.loop_count(), 1);
    }

    #[test]
    fn prune_zp_caps_inputs() {
        let g = parse_zg("ZP 2 a b c o\nT o").unwrap();
        let h = apply(&g, &only(&g, MoveKind::PruneZP)).unwrap();
        assert!(iso(&h, "T a\nT b\nT c"));
    }

    #[test]
    fn prune_zm_frees_variables() {
        let g = parse_zg("ZM 2 b o x y\nT o\nT x\nZP 1 y q r").unwrap();
        let h = apply(&g, &only(&g, MoveKind::PruneZM)).unwrap();
        assert!(validate(&h).is_empty());
        assert!(iso(&h, "T b\nT x\nZP 1 y q r"));
    }

    #[test]
    fn prune_fo_and_fi_and_arrow() {
        let g = parse_zg("FO a b c\nT c").unwrap();
        let h = apply(&g, &only(&g, MoveKind::PruneFO)).unwrap();
        assert!(iso(&h, "ARROW a b"));
        let g = parse_zg("FI a b c\nT c").unwrap();
        let h = apply(&g, &only(&g, MoveKind::PruneFI)).unwrap();
        assert!(iso(&h, "T a\nT b"));
        let g = parse_zg("T a").unwrap();
        let h = apply(&g, &only(&g, MoveKind::PruneArrowT)).unwrap();
        assert_eq!((h.node_count(), h.loop_count()), (0, 1));
    }

    #[test]
    fn stale_match_is_rejected() {
        let g = parse_zg("FO a b c").unwrap();
        let m = Match::new(MoveKind::FanInCross, vec![NodeId(0), NodeId(0)], Case::None);
        assert!(matches!(apply(&g, &m), Err(RewriteError::PatternMismatch(_))));
        let m = Match::new(MoveKind::Zip, vec![NodeId(7)], Case::None);
        assert!(apply(&g, &m).is_err());
    }
}
