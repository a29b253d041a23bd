use std::collections::HashMap;

use super::{ArcId, CrossingId, Endpoint, Strand, TangleDiagram};

struct Matcher<'a> {
    d1: &'a TangleDiagram,
    d2: &'a TangleDiagram,
}

#[derive(Clone, Default)]
struct State {
    cross: HashMap<CrossingId, CrossingId>,
    used: HashMap<CrossingId, CrossingId>,
    arcs: HashMap<ArcId, ArcId>,
    arcs_used: HashMap<ArcId, ArcId>,
}

impl State {
    fn pair_crossing(&mut self, a: CrossingId, b: CrossingId, queue: &mut Vec<CrossingId>) -> bool {
        match (self.cross.get(&a), self.used.get(&b)) {
            (Some(x), _) => *x == b,
            (None, Some(_)) => false,
            (None, None) => {
                self.cross.insert(a, b);
                self.used.insert(b, a);
                queue.push(a);
                true
            }
        }
    }

    fn pair_arc(&mut self, a: ArcId, b: ArcId) -> bool {
        match (self.arcs.get(&a), self.arcs_used.get(&b)) {
            (Some(x), _) => *x == b,
            (None, Some(_)) => false,
            (None, None) => {
                self.arcs.insert(a, b);
                self.arcs_used.insert(b, a);
                true
            }
        }
    }
}

impl Matcher<'_> {
    fn endpoints(&self, s: &mut State, e1: &Endpoint, e2: &Endpoint, queue: &mut Vec<CrossingId>) -> bool {
        match (e1, e2) {
            (Endpoint::Crossing(c1, t1), Endpoint::Crossing(c2, t2)) => {
                t1 == t2 && self.d1.crossings[c1].sign == self.d2.crossings[c2].sign && s.pair_crossing(*c1, *c2, queue)
            }
            _ => e1 == e2,
        }
    }

    /// Extends `s` from the crossings in `queue` until it closes or clashes.
    fn propagate(&self, s: &mut State, mut queue: Vec<CrossingId>) -> bool {
        while let Some(c1) = queue.pop() {
            let (x1, x2) = (&self.d1.crossings[&c1], &self.d2.crossings[&s.cross[&c1]]);
            if x1.sign != x2.sign {
                return false;
            }
            for st in [Strand::Over, Strand::Under] {
                for k in 0..2 {
                    let (a1, a2) = (x1.strand(st)[k], x2.strand(st)[k]);
                    if !s.pair_arc(a1, a2) {
                        return false;
                    }
                    let (r1, r2) = (&self.d1.arcs[&a1], &self.d2.arcs[&a2]);
                    if r1.real != r2.real
                        || !self.endpoints(s, &r1.from, &r2.from, &mut queue)
                        || !self.endpoints(s, &r1.to, &r2.to, &mut queue)
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn search(&self, s: State) -> bool {
        let Some(c1) = self.d1.crossings.keys().find(|c| !s.cross.contains_key(c)) else {
            return true;
        };
        self.d2.crossings.keys().filter(|c| !s.used.contains_key(c)).any(|&c2| {
            let mut t = s.clone();
            let mut queue = Vec::new();
            t.pair_crossing(*c1, c2, &mut queue) && self.propagate(&mut t, queue) && self.search(t)
        })
    }
}

/// Whether the diagrams agree up to renaming arcs and crossings. Signs,
/// orientations, real and virtual flags and free-end labels must match.
pub fn diagram_iso(d1: &TangleDiagram, d2: &TangleDiagram) -> bool {
    if d1.arcs.len() != d2.arcs.len() || d1.crossings.len() != d2.crossings.len() || d1.circles != d2.circles {
        return false;
    }
    let detached = |d: &TangleDiagram| {
        let mut v: Vec<(Endpoint, Endpoint, bool)> = d
            .arcs
            .values()
            .filter(|a| !matches!(a.from, Endpoint::Crossing(..)) && !matches!(a.to, Endpoint::Crossing(..)))
            .map(|a| (a.from.clone(), a.to.clone(), a.real))
            .collect();
        v.sort();
        v
    };
    detached(d1) == detached(d2) && Matcher { d1, d2 }.search(State::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;
    use crate::knots::encode;

    #[test]
    fn self_and_empty() {
        let d = encode(&parse_zg("Z 2 a b c o p q").unwrap()).unwrap();
        assert!(diagram_iso(&d, &d));
        assert!(!diagram_iso(&d, &TangleDiagram::default()));
    }

    #[test]
    fn relabeled_copy() {
        let d = encode(&parse_zg("ZM 1 a b c\nZP 2 b x y o").unwrap()).unwrap();
        let n = d.arcs.len() as u32;
        let mut r = TangleDiagram { circles: d.circles, ..TangleDiagram::default() };
        let map = |a: ArcId| ArcId(n - 1 - a.0);
        let cmap = |c: CrossingId| CrossingId(c.0 + 10);
        let end = |e: &Endpoint| match e {
            Endpoint::Crossing(c, s) => Endpoint::Crossing(cmap(*c), *s),
            e => e.clone(),
        };
        for (id, a) in &d.arcs {
            r.arcs.insert(map(*id), super::super::Arc { from: end(&a.from), to: end(&a.to), real: a.real });
        }
        for (id, x) in &d.crossings {
            let mut y = *x;
            y.over = x.over.map(map);
            y.under = x.under.map(map);
            r.crossings.insert(cmap(*id), y);
        }
        assert!(diagram_iso(&d, &r));
        let mut flipped = r.clone();
        flipped.crossings.values_mut().next().unwrap().sign *= -1;
        assert!(!diagram_iso(&d, &flipped));
    }
}
