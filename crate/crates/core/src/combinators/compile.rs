use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{End, NodeId, NodeKind, Port, PortRef, ZGraph};

use super::Term;

/// The label of a compiled graph's free out end.
pub const OUT: &str = "out";

fn p(node: NodeId, port: Port) -> PortRef {
    PortRef::new(node, port)
}

/// Builds `t` into `g`, returning the out port carrying its value.
fn emit(g: &mut ZGraph, t: &Term) -> PortRef {
    use NodeKind::*;
    match t {
        Term::I => {
            let z = g.add_node(HalfZipperMinus(1));
            g.connect(p(z, Port::Var(1)), p(z, Port::Zero));
            p(z, Port::ZeroPrime)
        }
        Term::K => {
            let z = g.add_node(HalfZipperMinus(2));
            let t = g.add_node(Termination);
            g.connect(p(z, Port::Var(1)), p(z, Port::Zero));
            g.connect(p(z, Port::Var(2)), p(t, Port::Zero));
            p(z, Port::ZeroPrime)
        }
        Term::S => {
            let z = g.add_node(HalfZipperMinus(3));
            let f = g.add_node(FanOut);
            let xz = g.add_node(HalfZipperPlus(1));
            let yz = g.add_node(HalfZipperPlus(1));
            let body = g.add_node(HalfZipperPlus(1));
            g.connect(p(z, Port::Var(3)), p(f, Port::Zero));
            g.connect(p(z, Port::Var(1)), p(xz, Port::Zero));
            g.connect(p(f, Port::Var(1)), p(xz, Port::Arg(1)));
            g.connect(p(z, Port::Var(2)), p(yz, Port::Zero));
            g.connect(p(f, Port::Var(2)), p(yz, Port::Arg(1)));
            g.connect(p(xz, Port::ZeroPrime), p(body, Port::Zero));
            g.connect(p(yz, Port::ZeroPrime), p(body, Port::Arg(1)));
            g.connect(p(body, Port::ZeroPrime), p(z, Port::Zero));
            p(z, Port::ZeroPrime)
        }
        Term::App(fun, arg) => {
            let a = g.add_node(HalfZipperPlus(1));
            let fo = emit(g, fun);
            g.connect(fo, p(a, Port::Zero));
            let ao = emit(g, arg);
            g.connect(ao, p(a, Port::Arg(1)));
            p(a, Port::ZeroPrime)
        }
    }
}

/// The zipper combinator graph of `t`, with one free out end labelled `out`.
pub fn compile(t: &Term) -> ZGraph {
    let mut g = ZGraph::new();
    let out = emit(&mut g, t);
    g.add_arrow(End::Port(out), End::Free(OUT.to_string()));
    g
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not a combinator graph at {}: {reason}", node.map_or("the boundary".to_string(), |n| n.to_string()))]
pub struct ReadbackError {
    pub node: Option<NodeId>,
    pub reason: String,
}

struct Reader<'a> {
    g: &'a ZGraph,
    index: &'a crate::graph::PortIndex,
    seen: HashSet<NodeId>,
}

impl Reader<'_> {
    fn fail<T>(&self, node: Option<NodeId>, reason: impl Into<String>) -> Result<T, ReadbackError> {
        Err(ReadbackError { node, reason: reason.into() })
    }

    fn tail(&self, at: PortRef) -> Option<PortRef> {
        self.g.arrow(*self.index.get(&at)?)?.tail.port()
    }

    fn head(&self, at: PortRef) -> Option<PortRef> {
        self.g.arrow(*self.index.get(&at)?)?.head.port()
    }

    fn claim(&mut self, n: NodeId) -> Result<(), ReadbackError> {
        if !self.seen.insert(n) {
            return self.fail(Some(n), "node reached twice");
        }
        Ok(())
    }

    /// The term whose value leaves through out port `out`.
    fn read(&mut self, out: PortRef) -> Result<Term, ReadbackError> {
        let n = out.node;
        let kind = self.g.node(n).expect("arrow end exists");
        if out.port != Port::ZeroPrime {
            return self.fail(Some(n), format!("value taken from port {}", out.port));
        }
        match kind {
            NodeKind::HalfZipperPlus(k) => {
                self.claim(n)?;
                let mut t = self.read_input(p(n, Port::Zero))?;
                for i in 1..=k {
                    let a = self.read_input(p(n, Port::Arg(i)))?;
                    t = Term::app(t, a);
                }
                Ok(t)
            }
            NodeKind::HalfZipperMinus(k) => {
                self.claim(n)?;
                self.read_lambda(n, k)
            }
            other => self.fail(Some(n), format!("{other} cannot produce a term")),
        }
    }

    fn read_input(&mut self, at: PortRef) -> Result<Term, ReadbackError> {
        match self.tail(at) {
            Some(q) => self.read(q),
            None => self.fail(Some(at.node), format!("port {} is not fed by a node", at.port)),
        }
    }

    fn var_into(&self, z: NodeId, i: u32) -> Option<PortRef> {
        self.head(p(z, Port::Var(i)))
    }

    fn read_lambda(&mut self, z: NodeId, k: u32) -> Result<Term, ReadbackError> {
        let self_body = self.var_into(z, 1) == Some(p(z, Port::Zero));
        match k {
            1 if self_body => Ok(Term::I),
            2 if self_body => {
                let Some(t) = self.var_into(z, 2) else {
                    return self.fail(Some(z), "K variable is free");
                };
                if self.g.node(t.node) != Some(NodeKind::Termination) {
                    return self.fail(Some(t.node), "K variable is not terminated");
                }
                self.claim(t.node)?;
                Ok(Term::K)
            }
            3 => self.read_s(z).map(|()| Term::S),
            _ => self.fail(Some(z), format!("ZM({k}) is not S, K or I")),
        }
    }

    /// S is `ZM(3)` whose body computes `x z (y z)` with `z` shared by a
    /// fanout. The body is either `ZP(1)` over two `ZP(1)`s or, after a
    /// tower merge, `ZP(2)` over `x`, `z` and one `ZP(1)`.
    fn read_s(&mut self, z: NodeId) -> Result<(), ReadbackError> {
        let g = self.g;
        let bad = |this: &Self, n: NodeId| this.fail(Some(n), "S body has the wrong shape");
        let zp = |q: Option<PortRef>, k: u32| {
            q.filter(|q| q.port == Port::ZeroPrime && g.node(q.node) == Some(NodeKind::HalfZipperPlus(k)))
                .map(|q| q.node)
        };
        let body = self.tail(p(z, Port::Zero));
        let (body, xz, yz, z_at_x) = if let Some(b) = zp(body, 1) {
            let (Some(xz), Some(yz)) = (zp(self.tail(p(b, Port::Zero)), 1), zp(self.tail(p(b, Port::Arg(1))), 1)) else {
                return bad(self, b);
            };
            (Some(b), xz, yz, p(xz, Port::Arg(1)))
        } else if let Some(b) = zp(body, 2) {
            let Some(yz) = zp(self.tail(p(b, Port::Arg(2))), 1) else {
                return bad(self, b);
            };
            (None, b, yz, p(b, Port::Arg(1)))
        } else {
            return bad(self, z);
        };
        let Some(f) = self.var_into(z, 3).filter(|q| q.port == Port::Zero) else {
            return bad(self, z);
        };
        let f = f.node;
        if g.node(f) != Some(NodeKind::FanOut)
            || self.var_into(z, 1) != Some(p(xz, Port::Zero))
            || self.var_into(z, 2) != Some(p(yz, Port::Zero))
        {
            return bad(self, z);
        }
        let fx = self.tail(z_at_x);
        let fy = self.tail(p(yz, Port::Arg(1)));
        let ok = matches!(
            (fx, fy),
            (Some(a), Some(b)) if a.node == f && b.node == f && a.port != b.port
        );
        if !ok {
            return bad(self, f);
        }
        for n in body.into_iter().chain([xz, yz, f]) {
            self.claim(n)?;
        }
        Ok(())
    }
}

/// Reads a combinator graph back as a term. Loops are ignored; every node
/// must belong to the term.
pub fn readback(g: &ZGraph) -> Result<Term, ReadbackError> {
    let outs: Vec<_> = g
        .arrows()
        .filter(|(_, a)| a.head.is_free() || a.tail.is_free())
        .collect();
    let [(_, root)] = outs.as_slice() else {
        return Err(ReadbackError { node: None, reason: format!("{} free ends, expected 1", outs.len()) });
    };
    let Some(out) = root.tail.port().filter(|_| root.head.is_free()) else {
        return Err(ReadbackError { node: None, reason: "the free end is not an output".into() });
    };
    let mut r = Reader { g, index: g.port_index(), seen: HashSet::new() };
    let t = r.read(out)?;
    if let Some((n, _)) = g.nodes().find(|(n, _)| !r.seen.contains(n)) {
        return Err(ReadbackError { node: Some(n), reason: "node not part of the term".into() });
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{parse_term, random_term};
    use crate::graph::{isomorphic, parse_zg, validate, IsoOptions};
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn c(s: &str) -> ZGraph {
        compile(&parse_term(s).unwrap())
    }

    #[test]
    fn basic_shapes() {
        let i = c("I");
        assert_eq!((i.node_count(), i.arrow_count()), (1, 2));
        assert!(isomorphic(&i, &parse_zg("ZM 1 x out x").unwrap(), IsoOptions::default()));
        let k = c("K");
        assert!(isomorphic(&k, &parse_zg("ZM 2 x out x y\nT y").unwrap(), IsoOptions::default()));
        let ii = c("I I");
        assert_eq!(ii.node_count(), 3);
        assert_eq!(ii.free_ends(), vec![(OUT.to_string(), false)]);
        let s = c("S");
        let want = parse_zg("ZM 3 b out x y z\nFO z z1 z2\nZP 1 x z1 xz\nZP 1 y z2 yz\nZP 1 xz yz b").unwrap();
        assert!(isomorphic(&s, &want, IsoOptions::default()));
    }

    #[test]
    fn readback_examples() {
        assert_eq!(readback(&c("I")).unwrap(), Term::I);
        assert_eq!(readback(&c("S K K")).unwrap(), parse_term("S K K").unwrap());
        let z = parse_zg("Z 1 a b out a").unwrap();
        assert!(readback(&z).is_err());
        let mut extra = c("I");
        extra.add_node(NodeKind::Termination);
        assert!(readback(&extra).is_err());
        let mut looped = c("K");
        looped.add_loops(3);
        assert_eq!(readback(&looped).unwrap(), Term::K);
    }

    #[test]
    fn merged_spines_read_left_nested() {
        let g = parse_zg("ZM 1 x s x\nZM 1 y a y\nZM 2 u b u v\nT v\nZP 2 s a b out").unwrap();
        assert_eq!(readback(&g).unwrap(), parse_term("I I K").unwrap());
    }

    #[test]
    fn merged_s_body() {
        let g = parse_zg("ZM 3 b out x y z\nFO z z1 z2\nZP 2 x z1 yz b\nZP 1 y z2 yz").unwrap();
        assert_eq!(readback(&g).unwrap(), Term::S);
    }

    #[test]
    fn s_fanout_may_be_swapped() {
        let g = parse_zg("ZM 3 b out x y z\nFO z z2 z1\nZP 1 x z1 xz\nZP 1 y z2 yz\nZP 1 xz yz b").unwrap();
        assert_eq!(readback(&g).unwrap(), Term::S);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn compile_readback_round_trip(seed in any::<u64>(), size in 1usize..=12) {
            let t = random_term(&mut StdRng::seed_from_u64(seed), size);
            let g = compile(&t);
            prop_assert!(validate(&g).is_empty());
            prop_assert_eq!(g.free_ends().len(), 1);
            let (apps, i, k, s) = t.census();
            prop_assert_eq!(g.node_count(), apps + i + 2 * k + 5 * s);
            prop_assert_eq!(readback(&g).unwrap(), t);
        }
    }
}
