//! Random graphs with a planted occurrence of a move pattern.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Direction, End, NodeId, NodeKind, Port, PortRef, ZGraph};

use super::{Case, ClickCase, Match, MoveKind, Rotation};

fn random_kind<R: Rng>(rng: &mut R) -> NodeKind {
    let n = rng.gen_range(1..=3);
    match rng.gen_range(0..6) {
        0 => NodeKind::HalfZipperMinus(n),
        1 => NodeKind::HalfZipperPlus(n),
        2 => NodeKind::Zipper(n),
        3 => NodeKind::FanOut,
        4 => NodeKind::FanIn,
        _ => NodeKind::Termination,
    }
}

fn ar<R: Rng>(rng: &mut R, lo: u32) -> u32 {
    rng.gen_range(lo..=lo + 2)
}

fn link(g: &mut ZGraph, a: NodeId, pa: Port, b: NodeId, pb: Port) {
    g.connect(PortRef::new(a, pa), PortRef::new(b, pb));
}

/// A random valid graph containing an occurrence of `kind`'s pattern, and
/// the match for that occurrence. The rest of the graph is up to
/// `context` random nodes wired at random, with leftover ports free.
pub fn planted<R: Rng>(kind: MoveKind, context: usize, rng: &mut R) -> (ZGraph, Match) {
    use NodeKind::*;
    let mut g = ZGraph::new();
    let (nodes, case) = match kind {
        MoveKind::Click => {
            let (n, m) = (ar(rng, 1), ar(rng, 1));
            let a = g.add_node(HalfZipperMinus(n));
            let b = g.add_node(HalfZipperPlus(m));
            link(&mut g, a, Port::ZeroPrime, b, Port::Zero);
            let case = match m.cmp(&n) {
                std::cmp::Ordering::Equal => ClickCase::Equal,
                std::cmp::Ordering::Greater => ClickCase::PlusLonger,
                std::cmp::Ordering::Less => ClickCase::MinusLonger,
            };
            (vec![a, b], Case::Click(case))
        }
        MoveKind::Zip => (vec![g.add_node(Zipper(ar(rng, 1)))], Case::None),
        MoveKind::TowerMerge => {
            let (j, k) = (ar(rng, 1), ar(rng, 1));
            let (ka, kb) = if rng.gen_bool(0.5) {
                (HalfZipperMinus(j), HalfZipperMinus(k))
            } else {
                (HalfZipperPlus(j), HalfZipperPlus(k))
            };
            let a = g.add_node(ka);
            let b = g.add_node(kb);
            link(&mut g, a, Port::ZeroPrime, b, Port::Zero);
            (vec![a, b], Case::None)
        }
        MoveKind::TowerSplit => {
            let n = ar(rng, 2);
            let k = if rng.gen_bool(0.5) { HalfZipperMinus(n) } else { HalfZipperPlus(n) };
            (vec![g.add_node(k)], Case::Split(rng.gen_range(1..n)))
        }
        MoveKind::CoComm => (vec![g.add_node(FanOut)], Case::None),
        MoveKind::CoAssoc => {
            let a = g.add_node(FanOut);
            let b = g.add_node(FanOut);
            let (k, rot) = if rng.gen_bool(0.5) { (1, Rotation::Right) } else { (2, Rotation::Left) };
            link(&mut g, a, Port::Var(k), b, Port::Zero);
            (vec![a, b], Case::Assoc(rot))
        }
        MoveKind::FanInCross
        | MoveKind::DistPlus
        | MoveKind::DistMinus
        | MoveKind::PruneZP
        | MoveKind::PruneZM
        | MoveKind::PruneFI => {
            let (top, bottom) = match kind {
                MoveKind::FanInCross => (FanIn, FanOut),
                MoveKind::DistPlus => (HalfZipperPlus(ar(rng, 1)), FanOut),
                MoveKind::DistMinus => (HalfZipperMinus(ar(rng, 1)), FanOut),
                MoveKind::PruneZP => (HalfZipperPlus(ar(rng, 1)), Termination),
                MoveKind::PruneZM => (HalfZipperMinus(ar(rng, 1)), Termination),
                _ => (FanIn, Termination),
            };
            let a = g.add_node(top);
            let b = g.add_node(bottom);
            link(&mut g, a, Port::ZeroPrime, b, Port::Zero);
            (vec![a, b], Case::None)
        }
        MoveKind::PruneFO => {
            let a = g.add_node(FanOut);
            let t = g.add_node(Termination);
            let k = rng.gen_range(1..=2);
            link(&mut g, a, Port::Var(k), t, Port::Zero);
            (vec![a, t], Case::PruneOut(k))
        }
        MoveKind::PruneArrowT => {
            let t = g.add_node(Termination);
            g.add_arrow(End::Free("in".into()), End::Port(PortRef::new(t, Port::Zero)));
            (vec![t], Case::None)
        }
    };
    for _ in 0..rng.gen_range(0..=context) {
        let k = random_kind(rng);
        g.add_node(k);
    }
    wire_open_ports(&mut g, rng);
    g.add_loops(rng.gen_range(0..=1));
    (g, Match::new(kind, nodes, case))
}

/// Connects open ports at random; whatever is left gets fresh free ends.
pub fn wire_open_ports<R: Rng>(g: &mut ZGraph, rng: &mut R) {
    let index = g.port_index();
    let mut outs = Vec::new();
    let mut ins = Vec::new();
    for (id, kind) in g.nodes() {
        for p in kind.ports() {
            let pr = PortRef::new(id, p);
            if index.contains_key(&pr) {
                continue;
            }
            match kind.direction(p) {
                Some(Direction::Out) => outs.push(pr),
                _ => ins.push(pr),
            }
        }
    }
    outs.shuffle(rng);
    ins.shuffle(rng);
    let mut counter = 0;
    let mut fresh = |g: &ZGraph| loop {
        let l = format!("f{counter}");
        counter += 1;
        if !g.free_labels().contains(&l) {
            break l;
        }
    };
    for o in outs {
        if !ins.is_empty() && rng.gen_bool(0.7) {
            let i = ins.pop().expect("non-empty");
            g.connect(o, i);
        } else {
            let l = fresh(g);
            g.add_arrow(End::Port(o), End::Free(l));
        }
    }
    for i in ins {
        let l = fresh(g);
        g.add_arrow(End::Free(l), End::Port(i));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{isomorphic, validate, IsoOptions};
    use crate::rewrites::{apply_traced, enumerate_matches, reverse};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn planted_match_is_enumerated() {
        let mut rng = StdRng::seed_from_u64(7);
        for kind in MoveKind::ALL {
            for _ in 0..20 {
                let (g, m) = planted(kind, 3, &mut rng);
                assert!(validate(&g).is_empty(), "{kind}: {:?}", validate(&g));
                assert!(enumerate_matches(&g, kind).contains(&m), "{kind}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn reverse_undoes_apply(seed in any::<u64>(), k in 0usize..MoveKind::ALL.len()) {
            let kind = MoveKind::ALL[k];
            let mut rng = StdRng::seed_from_u64(seed);
            let (g, m) = planted(kind, 3, &mut rng);
            let (h, inv) = apply_traced(&g, &m).unwrap();
            prop_assert!(validate(&h).is_empty(), "{}: {:?}", kind, validate(&h));
            let back = reverse(&h, &inv).unwrap();
            prop_assert!(validate(&back).is_empty());
            prop_assert!(isomorphic(&back, &g, IsoOptions::default()), "{}", kind);
        }

        #[test]
        fn boundary_is_preserved(seed in any::<u64>(), k in 0usize..MoveKind::ALL.len()) {
            let kind = MoveKind::ALL[k];
            prop_assume!(kind != MoveKind::PruneZM && kind != MoveKind::PruneArrowT);
            let mut rng = StdRng::seed_from_u64(seed);
            let (g, m) = planted(kind, 3, &mut rng);
            let h = crate::rewrites::apply(&g, &m).unwrap();
            prop_assert_eq!(h.free_ends(), g.free_ends());
        }
    }
}
