//! The duplication macro: a dist move followed by everything needed to turn
//! the shared subgraph into two separate copies.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::graph::{Direction, NodeId, NodeKind, Port, PortRef, ZGraph};
use crate::rewrites::{enumerate_matches, Case, Inverse, Match, MoveKind, RewriteError, Rotation};

use super::Runner;

/// Nodes reachable from `start` by walking arrows backwards into in ports.
fn upstream(g: &ZGraph, start: NodeId) -> HashSet<NodeId> {
    let index = g.port_index();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(n) = queue.pop_front() {
        let kind = g.node(n).expect("node");
        for p in kind.ports().into_iter().filter(|&p| kind.direction(p) == Some(Direction::In)) {
            let tail = index.get(&PortRef::new(n, p)).and_then(|a| g.arrow(*a)).and_then(|a| a.tail.port());
            if let Some(t) = tail {
                if seen.insert(t.node) {
                    queue.push_back(t.node);
                }
            }
        }
    }
    seen
}

/// The first dist match whose duplicated subgraph holds no other pending
/// duplication.
pub(crate) fn innermost(g: &ZGraph, ms: &[Match]) -> Match {
    let fans: Vec<NodeId> = ms.iter().map(|m| m.nodes[1]).collect();
    ms.iter()
        .find(|m| {
            let region = upstream(g, m.nodes[0]);
            fans.iter().all(|f| *f == m.nodes[1] || !region.contains(f))
        })
        .unwrap_or(&ms[0])
        .clone()
}

#[derive(Default)]
struct Macro {
    fans: HashSet<NodeId>,
    fanins: Vec<NodeId>,
}

impl Macro {
    fn record(&mut self, inv: &Inverse) {
        if let Inverse::Undist { fanouts, fanins, .. } = inv {
            self.fans.extend(fanouts.iter().copied());
            self.fanins.extend(fanins.iter().copied());
        }
    }
}

fn step(run: &mut Runner, m: &Match) -> Result<Inverse, RewriteError> {
    if run.exhausted() {
        return Err(RewriteError::PatternMismatch("step budget exhausted".into()));
    }
    run.apply(m)
}

fn head(g: &ZGraph, p: PortRef) -> Option<PortRef> {
    g.arrow_at(p).and_then(|a| g.arrow(a)).and_then(|a| a.head.port())
}

/// The fanout fed directly by `p`, if any.
fn fanout_below(g: &ZGraph, p: PortRef) -> Option<NodeId> {
    head(g, p).filter(|q| q.port == Port::Zero && g.node(q.node) == Some(NodeKind::FanOut)).map(|q| q.node)
}

/// Applies the dist move `m`, then propagates the new fanouts through the
/// duplicated region and resolves the fanins this creates. Every move is
/// recorded in `run`. Stops at the first move that does not apply.
pub(crate) fn duplicate(run: &mut Runner, m: &Match) -> Result<(), RewriteError> {
    let mut mac = Macro::default();
    let inv = step(run, m)?;
    mac.record(&inv);

    // Push the fanouts back through the region.
    loop {
        let next = [MoveKind::DistPlus, MoveKind::DistMinus]
            .into_iter()
            .flat_map(|k| enumerate_matches(&run.g, k))
            .find(|d| mac.fans.contains(&d.nodes[1]));
        let Some(d) = next else { break };
        let inv = step(run, &d)?;
        mac.record(&inv);
    }

    // Unused variables.
    loop {
        let next = enumerate_matches(&run.g, MoveKind::PruneFI)
            .into_iter()
            .find(|p| mac.fanins.contains(&p.nodes[0]));
        let Some(p) = next else { break };
        step(run, &p)?;
    }

    for fi in mac.fanins.clone() {
        if run.g.node(fi) != Some(NodeKind::FanIn) {
            continue;
        }
        resolve_fanin(run, &mac, fi)?;
    }
    Ok(())
}

/// Leaves of the fanout tree under `root`, left to right, each with the
/// fanout and out port that feed it.
fn leaves(g: &ZGraph, root: NodeId) -> Option<Vec<(NodeId, u32, PortRef)>> {
    let mut out = Vec::new();
    collect_leaves(g, root, &mut out).then_some(out)
}

fn collect_leaves(g: &ZGraph, n: NodeId, out: &mut Vec<(NodeId, u32, PortRef)>) -> bool {
    [1, 2].into_iter().all(|k| {
        let p = PortRef::new(n, Port::Var(k));
        match fanout_below(g, p) {
            Some(c) => collect_leaves(g, c, out),
            None => head(g, p).map(|h| out.push((n, k, h))).is_some(),
        }
    })
}

/// Node chain of a right comb rooted at `root`: each node's first out is a
/// leaf and its second out the next node.
fn spine(g: &ZGraph, root: NodeId) -> Vec<NodeId> {
    let mut nodes = vec![root];
    while let Some(c) = fanout_below(g, PortRef::new(*nodes.last().expect("root"), Port::Var(2))) {
        nodes.push(c);
    }
    nodes
}

fn coassoc(run: &mut Runner, top: NodeId, low: NodeId, rot: Rotation) -> Result<[NodeId; 2], RewriteError> {
    let m = Match::new(MoveKind::CoAssoc, vec![top, low], Case::Assoc(rot));
    match step(run, &m)? {
        Inverse::Forward(inv) => Ok([inv.nodes[0], inv.nodes[1]]),
        _ => unreachable!("coassoc inverts with coassoc"),
    }
}

fn cocomm(run: &mut Runner, n: NodeId) -> Result<(), RewriteError> {
    step(run, &Match::new(MoveKind::CoComm, vec![n], Case::None)).map(|_| ())
}

/// Sorts the fanout tree under `fi` so that all leaves of copy 1 sit under
/// the root's first out, then applies FAN-IN.
fn resolve_fanin(run: &mut Runner, mac: &Macro, fi: NodeId) -> Result<(), RewriteError> {
    let root_of = |g: &ZGraph| fanout_below(g, PortRef::new(fi, Port::ZeroPrime));
    let Some(root) = root_of(&run.g) else {
        return Ok(());
    };
    let mut side = HashMap::new();
    let Some(found) = leaves(&run.g, root) else {
        return Err(RewriteError::PatternMismatch("fanout tree has a free end".into()));
    };
    for (parent, k, leaf) in found {
        if !mac.fans.contains(&parent) {
            return Err(RewriteError::PatternMismatch(format!("fanout {parent} is not part of the copy")));
        }
        side.insert(leaf, k);
    }
    let ones = side.values().filter(|&&s| s == 1).count();
    if ones == 0 || ones == side.len() {
        return Err(RewriteError::PatternMismatch("fanout tree serves one copy only".into()));
    }

    // Right comb.
    let mut at = root;
    loop {
        while let Some(c) = fanout_below(&run.g, PortRef::new(at, Port::Var(1))) {
            at = coassoc(run, at, c, Rotation::Right)?[0];
        }
        match fanout_below(&run.g, PortRef::new(at, Port::Var(2))) {
            Some(c) => at = c,
            None => break,
        }
    }

    // Bubble sort the leaves by copy.
    let leaf_side = |g: &ZGraph, n: NodeId, k: u32| side[&head(g, PortRef::new(n, Port::Var(k))).expect("leaf")];
    loop {
        let root = root_of(&run.g).expect("root survives rotations");
        let nodes = spine(&run.g, root);
        let mut sides: Vec<u32> = nodes.iter().map(|&n| leaf_side(&run.g, n, 1)).collect();
        sides.push(leaf_side(&run.g, *nodes.last().expect("root"), 2));
        let Some(i) = (0..sides.len() - 1).find(|&i| sides[i] > sides[i + 1]) else {
            break;
        };
        if i + 1 == nodes.len() {
            cocomm(run, nodes[i])?;
        } else {
            let [top, low] = coassoc(run, nodes[i], nodes[i + 1], Rotation::Left)?;
            cocomm(run, low)?;
            let low = fanout_below(&run.g, PortRef::new(top, Port::Var(1))).expect("rotated");
            coassoc(run, top, low, Rotation::Right)?;
        }
    }

    // Gather copy 1 under the first out.
    for _ in 1..ones {
        let root = root_of(&run.g).expect("root");
        let next = fanout_below(&run.g, PortRef::new(root, Port::Var(2))).expect("comb");
        coassoc(run, root, next, Rotation::Left)?;
    }
    let root = root_of(&run.g).expect("root");
    step(run, &Match::new(MoveKind::FanInCross, vec![fi, root], Case::None)).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;

    #[test]
    fn innermost_prefers_nested_duplication() {
        let g = parse_zg("ZP 1 a b c\nFO c d e\nZP 1 d x y\nFO y p q").unwrap();
        let mut ms = enumerate_matches(&g, MoveKind::DistPlus);
        ms.sort_by_key(|m| std::cmp::Reverse(m.nodes[0]));
        let chosen = innermost(&g, &ms);
        assert_eq!(g.node(chosen.nodes[0]), Some(NodeKind::HalfZipperPlus(1)));
        let region = upstream(&g, chosen.nodes[0]);
        assert!(!ms.iter().any(|m| m != &chosen && region.contains(&m.nodes[1])));
    }

    #[test]
    fn sorting_separates_copies() {
        // FO tree ((a, b), (c, d)) where a and c belong to copy 1.
        let g = parse_zg("FI u v r\nFO r l m\nFO l a b\nFO m c d\nT a\nT b\nT c\nT d").unwrap();
        let mut run = Runner::new(g.clone(), 100);
        let ids: Vec<NodeId> = g.nodes().map(|(n, _)| n).collect();
        let mac = Macro { fans: ids[2..4].iter().copied().collect(), fanins: vec![ids[0]] };
        resolve_fanin(&mut run, &mac, ids[0]).unwrap();
        assert!(run.g.nodes().all(|(_, k)| k != NodeKind::FanIn));
        // u carries copy 2 and now feeds the b, d pair.
        let from_u = run
            .g
            .arrows()
            .find(|(_, a)| a.tail == crate::graph::End::Free("u".into()))
            .and_then(|(_, a)| a.head.port())
            .unwrap();
        let got: HashSet<NodeId> = leaves(&run.g, from_u.node).unwrap().iter().map(|l| l.2.node).collect();
        assert_eq!(got, HashSet::from([ids[5], ids[7]]));
    }
}
