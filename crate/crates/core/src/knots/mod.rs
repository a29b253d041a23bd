//! Zipper graphs drawn as oriented tangle diagrams.
//!
//! Every level of a half-zipper is one crossing: the spine runs under, the
//! variable or argument strand runs over. Minus levels are positive
//! crossings and plus levels negative ones, so a zipper level is a pair of
//! opposite crossings. The missing half of an unclicked level is a virtual
//! arc.

mod iso;
mod text;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{End, NodeId, NodeKind, Port, PortRef, ZGraph};

pub use iso::diagram_iso;
pub use text::{emit_diagram, parse_diagram, to_dot, DiagramParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingId(pub u32);

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for CrossingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strand {
    Over,
    Under,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Crossing(CrossingId, Strand),
    Free(String),
    /// The open end of a virtual arc with no partner.
    Dangling,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: Endpoint,
    pub to: Endpoint,
    pub real: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Crossing {
    /// +1 or -1.
    pub sign: i8,
    /// Incoming and outgoing arc of the over strand.
    pub over: [ArcId; 2],
    pub under: [ArcId; 2],
}

impl Crossing {
    pub fn strand(&self, s: Strand) -> [ArcId; 2] {
        match s {
            Strand::Over => self.over,
            Strand::Under => self.under,
        }
    }

    fn strand_mut(&mut self, s: Strand) -> &mut [ArcId; 2] {
        match s {
            Strand::Over => &mut self.over,
            Strand::Under => &mut self.under,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TangleDiagram {
    pub arcs: BTreeMap<ArcId, Arc>,
    pub crossings: BTreeMap<CrossingId, Crossing>,
    /// Closed components without crossings.
    pub circles: usize,
}

impl TangleDiagram {
    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn virtual_count(&self) -> usize {
        self.arcs.values().filter(|a| !a.real).count()
    }

    /// Virtual arcs joining two crossings, i.e. closures a click can realize.
    pub fn virtual_links(&self) -> Vec<ArcId> {
        self.arcs
            .iter()
            .filter(|(_, a)| !a.real && matches!((&a.from, &a.to), (Endpoint::Crossing(..), Endpoint::Crossing(..))))
            .map(|(id, _)| *id)
            .collect()
    }

    /// Crossing pairs forming an R2 pattern.
    pub fn r2_sites(&self) -> Vec<[CrossingId; 2]> {
        let ids: Vec<CrossingId> = self.crossings.keys().copied().collect();
        let mut out = Vec::new();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if self.r2_arcs(a, b).is_some() {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    /// The real arcs joining `a` and `b` on each strand, if they form an R2
    /// pattern.
    fn r2_arcs(&self, a: CrossingId, b: CrossingId) -> Option<[ArcId; 2]> {
        let (ca, cb) = (self.crossings.get(&a)?, self.crossings.get(&b)?);
        if a == b || ca.sign == cb.sign {
            return None;
        }
        let shared = |s: Strand| {
            let (sa, sb) = (ca.strand(s), cb.strand(s));
            [sa[1], sb[1]]
                .into_iter()
                .find(|id| (sa[1] == *id && sb[0] == *id) || (sb[1] == *id && sa[0] == *id))
                .filter(|id| self.arcs[id].real)
        };
        Some([shared(Strand::Over)?, shared(Strand::Under)?])
    }

    /// Removes crossing `c`, joining the two arcs of each strand.
    fn smooth_out(&mut self, c: CrossingId) {
        for s in [Strand::Over, Strand::Under] {
            let [a_in, a_out] = self.crossings[&c].strand(s);
            if a_in == a_out {
                self.arcs.remove(&a_in);
                self.circles += 1;
                continue;
            }
            let out = self.arcs.remove(&a_out).expect("arc");
            if let Endpoint::Crossing(d, t) = &out.to {
                self.crossings.get_mut(d).expect("crossing").strand_mut(*t)[0] = a_in;
            }
            let arc = self.arcs.get_mut(&a_in).expect("arc");
            arc.to = out.to;
            arc.real &= out.real;
        }
        self.crossings.remove(&c);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KnotError {
    #[error("node {node} ({kind}) has no knot drawing")]
    Unsupported { node: NodeId, kind: NodeKind },
    #[error("no arc {0}")]
    NoArc(ArcId),
    #[error("arc {0} is already real")]
    AlreadyReal(ArcId),
    #[error("arc {0} does not join a plus crossing to a minus crossing")]
    Unmatched(ArcId),
    #[error("empty click site")]
    EmptySite,
    #[error("{0} and {1} do not form an R2 pattern")]
    NotR2(CrossingId, CrossingId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Pt {
    Slot(CrossingId, Strand, bool),
    Port(PortRef),
    FreeTail(String),
    FreeHead(String),
    DangleIn(u32),
    DangleOut(u32),
}

impl Pt {
    fn input(c: CrossingId, s: Strand) -> Pt {
        Pt::Slot(c, s, true)
    }

    fn output(c: CrossingId, s: Strand) -> Pt {
        Pt::Slot(c, s, false)
    }
}

#[derive(Default)]
struct Builder {
    next: HashMap<Pt, (Pt, bool)>,
    signs: BTreeMap<CrossingId, i8>,
    dangles: u32,
}

impl Builder {
    fn seg(&mut self, from: Pt, to: Pt, real: bool) {
        self.next.insert(from, (to, real));
    }

    fn crossings(&mut self, n: u32, sign: i8) -> Vec<CrossingId> {
        (0..n)
            .map(|_| {
                let id = CrossingId(self.signs.len() as u32);
                self.signs.insert(id, sign);
                id
            })
            .collect()
    }

    fn dangle(&mut self) -> u32 {
        self.dangles += 1;
        self.dangles
    }

    /// Spine through `cs` in order, from port `entry` to port `exit`.
    fn spine(&mut self, entry: PortRef, cs: &[CrossingId], exit: PortRef) {
        let mut at = Pt::Port(entry);
        for &c in cs {
            self.seg(at, Pt::input(c, Strand::Under), true);
            at = Pt::output(c, Strand::Under);
        }
        self.seg(at, Pt::Port(exit), true);
    }
}

fn p(n: NodeId, port: Port) -> PortRef {
    PortRef::new(n, port)
}

/// Draws `g` as a tangle diagram. Only half-zippers, zippers and arrows
/// have a drawing.
pub fn encode(g: &ZGraph) -> Result<TangleDiagram, KnotError> {
    let mut b = Builder::default();
    // Minus levels per node, so a plus half can close onto its partner.
    let mut minus_levels: HashMap<NodeId, Vec<CrossingId>> = HashMap::new();
    let mut plus_levels: Vec<(NodeId, Vec<CrossingId>)> = Vec::new();
    for (id, kind) in g.nodes() {
        match kind {
            NodeKind::HalfZipperMinus(n) => {
                let ms = b.crossings(n, 1);
                let rev: Vec<CrossingId> = ms.iter().rev().copied().collect();
                b.spine(p(id, Port::Zero), &rev, p(id, Port::ZeroPrime));
                for (i, &c) in (1..).zip(&ms) {
                    b.seg(Pt::output(c, Strand::Over), Pt::Port(p(id, Port::Var(i))), true);
                }
                minus_levels.insert(id, ms);
            }
            NodeKind::HalfZipperPlus(n) => {
                let ps = b.crossings(n, -1);
                b.spine(p(id, Port::Zero), &ps, p(id, Port::ZeroPrime));
                for (i, &c) in (1..).zip(&ps) {
                    b.seg(Pt::Port(p(id, Port::Arg(i))), Pt::input(c, Strand::Over), true);
                }
                plus_levels.push((id, ps));
            }
            NodeKind::Zipper(n) => {
                let ms = b.crossings(n, 1);
                let ps = b.crossings(n, -1);
                let spine: Vec<CrossingId> = ms.iter().rev().chain(&ps).copied().collect();
                b.spine(p(id, Port::Zero), &spine, p(id, Port::ZeroPrime));
                for (i, (&m, &q)) in (1..).zip(ms.iter().zip(&ps)) {
                    b.seg(Pt::Port(p(id, Port::Arg(i))), Pt::input(q, Strand::Over), true);
                    b.seg(Pt::output(q, Strand::Over), Pt::input(m, Strand::Over), true);
                    b.seg(Pt::output(m, Strand::Over), Pt::Port(p(id, Port::Var(i))), true);
                }
            }
            kind => return Err(KnotError::Unsupported { node: id, kind }),
        }
    }

    // Virtual closures: a plus half fed by a minus half links level i to
    // level i; anything left over dangles.
    let index = g.port_index();
    let mut closed: HashSet<CrossingId> = HashSet::new();
    for (id, ps) in &plus_levels {
        let feeder = index
            .get(&p(*id, Port::Zero))
            .and_then(|a| g.arrow(*a))
            .and_then(|a| a.tail.port())
            .filter(|t| t.port == Port::ZeroPrime)
            .and_then(|t| minus_levels.get(&t.node));
        for (k, &q) in ps.iter().enumerate() {
            match feeder.and_then(|ms| ms.get(k)) {
                Some(&m) => {
                    b.seg(Pt::output(q, Strand::Over), Pt::input(m, Strand::Over), false);
                    closed.insert(m);
                }
                None => {
                    let d = b.dangle();
                    b.seg(Pt::output(q, Strand::Over), Pt::DangleOut(d), false);
                }
            }
        }
    }
    for ms in minus_levels.values() {
        for &m in ms.iter().filter(|m| !closed.contains(m)) {
            let d = b.dangle();
            b.seg(Pt::DangleIn(d), Pt::input(m, Strand::Over), false);
        }
    }

    for (_, a) in g.arrows() {
        let from = match &a.tail {
            End::Port(q) => Pt::Port(*q),
            End::Free(l) => Pt::FreeTail(l.clone()),
        };
        let to = match &a.head {
            End::Port(q) => Pt::Port(*q),
            End::Free(l) => Pt::FreeHead(l.clone()),
        };
        b.seg(from, to, true);
    }
    Ok(trace_arcs(b, g.loop_count()))
}

/// Joins segments through ports into arcs between crossings and ends.
fn trace_arcs(b: Builder, loops: usize) -> TangleDiagram {
    let mut d = TangleDiagram { circles: loops, ..TangleDiagram::default() };
    let mut starts: Vec<&Pt> = b.next.keys().filter(|pt| !matches!(pt, Pt::Port(_))).collect();
    starts.sort_by_key(|pt| format!("{pt:?}"));
    let mut used: HashSet<&Pt> = HashSet::new();
    let mut ins: HashMap<(CrossingId, Strand), ArcId> = HashMap::new();
    let mut outs: HashMap<(CrossingId, Strand), ArcId> = HashMap::new();
    let end_of = |pt: &Pt| match pt {
        Pt::Slot(c, s, _) => Endpoint::Crossing(*c, *s),
        Pt::FreeTail(l) | Pt::FreeHead(l) => Endpoint::Free(l.clone()),
        _ => Endpoint::Dangling,
    };
    for start in starts {
        let id = ArcId(d.arcs.len() as u32);
        let mut real = true;
        let mut at = start;
        loop {
            used.insert(at);
            let (to, r) = &b.next[at];
            real &= *r;
            match to {
                Pt::Port(_) => at = to,
                _ => {
                    if let Pt::Slot(c, s, _) = to {
                        ins.insert((*c, *s), id);
                    }
                    if let Pt::Slot(c, s, _) = start {
                        outs.insert((*c, *s), id);
                    }
                    d.arcs.insert(id, Arc { from: end_of(start), to: end_of(to), real });
                    break;
                }
            }
        }
    }
    // Port-only cycles.
    let mut rest: Vec<&Pt> = b.next.keys().filter(|pt| !used.contains(pt)).collect();
    rest.sort_by_key(|pt| format!("{pt:?}"));
    for start in rest {
        if used.contains(start) {
            continue;
        }
        let mut at = start;
        while used.insert(at) {
            at = &b.next[at].0;
        }
        d.circles += 1;
    }
    for (&c, &sign) in &b.signs {
        let end = |s: Strand| [ins[&(c, s)], outs[&(c, s)]];
        d.crossings.insert(c, Crossing { sign, over: end(Strand::Over), under: end(Strand::Under) });
    }
    d
}

/// Turns the virtual arcs of `site` into real ones. Each must run from a
/// negative (plus-half) crossing into a positive (minus-half) crossing.
pub fn realize_click(d: &TangleDiagram, site: &[ArcId]) -> Result<TangleDiagram, KnotError> {
    if site.is_empty() {
        return Err(KnotError::EmptySite);
    }
    let mut out = d.clone();
    for &id in site {
        let arc = out.arcs.get_mut(&id).ok_or(KnotError::NoArc(id))?;
        if arc.real {
            return Err(KnotError::AlreadyReal(id));
        }
        let sign = |e: &Endpoint| match e {
            Endpoint::Crossing(c, Strand::Over) => d.crossings.get(c).map(|x| x.sign),
            _ => None,
        };
        if sign(&arc.from) != Some(-1) || sign(&arc.to) != Some(1) {
            return Err(KnotError::Unmatched(id));
        }
        arc.real = true;
    }
    Ok(out)
}

/// Cancels two opposite crossings joined by a real arc on each strand.
pub fn apply_r2(d: &TangleDiagram, site: [CrossingId; 2]) -> Result<TangleDiagram, KnotError> {
    let [a, b] = site;
    d.r2_arcs(a, b).ok_or(KnotError::NotR2(a, b))?;
    let mut out = d.clone();
    out.smooth_out(a);
    out.smooth_out(b);
    // Keep arc ids dense so the text form stays tidy.
    let arcs = std::mem::take(&mut out.arcs);
    let renum: HashMap<ArcId, ArcId> = arcs.keys().enumerate().map(|(i, k)| (*k, ArcId(i as u32))).collect();
    out.arcs = arcs.into_iter().map(|(k, v)| (renum[&k], v)).collect();
    for x in out.crossings.values_mut() {
        for s in [Strand::Over, Strand::Under] {
            let ends = x.strand_mut(s);
            *ends = [renum[&ends[0]], renum[&ends[1]]];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;
    use crate::rewrites::{apply, enumerate_matches, MoveKind};

    fn zg(s: &str) -> ZGraph {
        parse_zg(s).unwrap()
    }

    const REDEX: &str = "ZM 1 body f var\nZP 1 f arg res";

    fn clicked() -> ZGraph {
        let g = zg(REDEX);
        apply(&g, &enumerate_matches(&g, MoveKind::Click)[0]).unwrap()
    }

    #[test]
    fn zipper_level_is_two_opposite_crossings() {
        let d = encode(&clicked()).unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.virtual_count(), 0);
        let mut signs: Vec<i8> = d.crossings.values().map(|x| x.sign).collect();
        signs.sort();
        assert_eq!(signs, vec![-1, 1]);
        assert_eq!(d.r2_sites().len(), 1);
    }

    #[test]
    fn half_zipper_chain_has_virtual_closures() {
        let d = encode(&zg("ZM 2 a b c e")).unwrap();
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.virtual_count(), 2);
        assert!(d.arcs.values().filter(|a| !a.real).all(|a| a.from == Endpoint::Dangling));
        assert!(d.virtual_links().is_empty());
    }

    #[test]
    fn fanout_has_no_drawing() {
        assert!(matches!(encode(&zg("FO a b c")), Err(KnotError::Unsupported { .. })));
    }

    #[test]
    fn zip_is_r2() {
        let g = clicked();
        let d = encode(&g).unwrap();
        let after = apply_r2(&d, d.r2_sites()[0]).unwrap();
        let zipped = apply(&g, &enumerate_matches(&g, MoveKind::Zip)[0]).unwrap();
        assert!(diagram_iso(&after, &encode(&zipped).unwrap()));
        assert_eq!(after.crossing_count(), d.crossing_count() - 2);
    }

    #[test]
    fn click_realizes_virtual_arcs() {
        let d = encode(&zg(REDEX)).unwrap();
        let site = d.virtual_links();
        assert_eq!(site.len(), 1);
        let r = realize_click(&d, &site).unwrap();
        assert_eq!(r.crossing_count(), d.crossing_count());
        assert_eq!(r.arcs.len(), d.arcs.len());
        assert_eq!(r.virtual_count(), d.virtual_count() - 1);
        assert!(diagram_iso(&r, &encode(&clicked()).unwrap()));
        assert_eq!(realize_click(&r, &site), Err(KnotError::AlreadyReal(site[0])));
    }

    #[test]
    fn realize_needs_virtual_arcs() {
        let d = encode(&clicked()).unwrap();
        assert_eq!(realize_click(&d, &d.virtual_links()), Err(KnotError::EmptySite));
    }

    #[test]
    fn r2_rejects_same_sign_and_empty() {
        let d = encode(&zg("ZM 2 a b c e")).unwrap();
        let ids: Vec<CrossingId> = d.crossings.keys().copied().collect();
        assert!(apply_r2(&d, [ids[0], ids[1]]).is_err());
        assert!(apply_r2(&TangleDiagram::default(), [CrossingId(0), CrossingId(1)]).is_err());
    }

    #[test]
    fn closed_zipper_leaves_circles() {
        let g = zg("Z 1 a b a b");
        let d = encode(&g).unwrap();
        let after = apply_r2(&d, d.r2_sites()[0]).unwrap();
        assert_eq!((after.crossing_count(), after.arcs.len(), after.circles), (0, 0, 2));
    }

    proptest::proptest! {
        #[test]
        fn crossing_counts(seed in proptest::prelude::any::<u64>(), n in 1usize..6) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut g = ZGraph::new();
            for _ in 0..n {
                let k = rng.gen_range(1..=2);
                g.add_node(match rng.gen_range(0..3) {
                    0 => NodeKind::HalfZipperMinus(k),
                    1 => NodeKind::HalfZipperPlus(k),
                    _ => NodeKind::Zipper(k),
                });
            }
            crate::rewrites::sample::wire_open_ports(&mut g, &mut rng);
            let d = encode(&g).unwrap();
            let levels: u32 = g.nodes().map(|(_, k)| match k {
                NodeKind::Zipper(k) => 2 * k,
                k => k.arity().unwrap(),
            }).sum();
            proptest::prop_assert_eq!(d.crossing_count(), levels as usize);
            let links = d.virtual_links();
            if !links.is_empty() {
                let r = realize_click(&d, &links).unwrap();
                proptest::prop_assert_eq!(r.crossing_count(), d.crossing_count());
                proptest::prop_assert_eq!(r.virtual_count() + links.len(), d.virtual_count());
            }
            for site in d.r2_sites() {
                let r = apply_r2(&d, site).unwrap();
                proptest::prop_assert_eq!(r.crossing_count() + 2, d.crossing_count());
                proptest::prop_assert!(diagram_iso(&r, &parse_diagram(&emit_diagram(&r)).unwrap()));
            }
        }
    }
}
