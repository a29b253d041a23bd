//! Line format:
//!
//! ```text
//! ARC id from to real|virtual
//! X sign over1 over2 under1 under2
//! CIRCLES n
//! ```
//!
//! Crossings are numbered by the order of their `X` lines. Arc ends are
//! `x<k>` for crossing k, `@label` for a free end and `~` for a dangling
//! virtual end.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::{Arc, ArcId, Crossing, CrossingId, Endpoint, Strand, TangleDiagram};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}")]
pub struct DiagramParseError {
    pub line: usize,
    pub reason: String,
}

fn end_token(e: &Endpoint, dense: &HashMap<CrossingId, usize>) -> String {
    match e {
        Endpoint::Crossing(c, _) => format!("x{}", dense[c]),
        Endpoint::Free(l) => format!("@{l}"),
        Endpoint::Dangling => "~".into(),
    }
}

pub fn emit_diagram(d: &TangleDiagram) -> String {
    let dense: HashMap<CrossingId, usize> = d.crossings.keys().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut out = String::new();
    for (id, a) in &d.arcs {
        let flag = if a.real { "real" } else { "virtual" };
        let _ = writeln!(out, "ARC {} {} {} {flag}", id.0, end_token(&a.from, &dense), end_token(&a.to, &dense));
    }
    for x in d.crossings.values() {
        let _ = writeln!(out, "X {:+} {} {} {} {}", x.sign, x.over[0].0, x.over[1].0, x.under[0].0, x.under[1].0);
    }
    if d.circles > 0 {
        let _ = writeln!(out, "CIRCLES {}", d.circles);
    }
    out
}

enum RawEnd {
    Crossing(u32),
    Free(String),
    Dangling,
}

pub fn parse_diagram(text: &str) -> Result<TangleDiagram, DiagramParseError> {
    let mut raw: BTreeMap<ArcId, (RawEnd, RawEnd, bool, usize)> = BTreeMap::new();
    let mut crossings: Vec<(Crossing, usize)> = Vec::new();
    let mut circles = 0;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |reason: String| DiagramParseError { line: line_no, reason };
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| t.parse::<u32>().map_err(|_| err(format!("expected a number, found {t:?}")));
        let end = |t: &str| -> Result<RawEnd, DiagramParseError> {
            match t {
                "~" => Ok(RawEnd::Dangling),
                t if t.starts_with('@') && t.len() > 1 => Ok(RawEnd::Free(t[1..].to_string())),
                t if t.starts_with('x') => num(&t[1..]).map(RawEnd::Crossing),
                t => Err(err(format!("bad arc end {t:?}"))),
            }
        };
        match toks.as_slice() {
            [] => {}
            ["ARC", id, from, to, flag] => {
                let real = match *flag {
                    "real" => true,
                    "virtual" => false,
                    f => return Err(err(format!("expected real or virtual, found {f:?}"))),
                };
                if raw.insert(ArcId(num(id)?), (end(from)?, end(to)?, real, line_no)).is_some() {
                    return Err(err(format!("arc {id} defined twice")));
                }
            }
            ["X", sign, o1, o2, u1, u2] => {
                let sign = match *sign {
                    "+1" | "1" => 1,
                    "-1" => -1,
                    s => return Err(err(format!("bad sign {s:?}"))),
                };
                let x = Crossing {
                    sign,
                    over: [ArcId(num(o1)?), ArcId(num(o2)?)],
                    under: [ArcId(num(u1)?), ArcId(num(u2)?)],
                };
                crossings.push((x, line_no));
            }
            ["CIRCLES", n] => circles = num(n)? as usize,
            _ => return Err(err(format!("unrecognized line {line:?}"))),
        }
    }
    // Which strand of which crossing each arc end attaches to.
    let mut slot: HashMap<(ArcId, bool), (CrossingId, Strand)> = HashMap::new();
    let mut d = TangleDiagram { circles, ..TangleDiagram::default() };
    for (k, (x, line)) in crossings.iter().enumerate() {
        let c = CrossingId(k as u32);
        for s in [Strand::Over, Strand::Under] {
            let [a_in, a_out] = x.strand(s);
            for (a, incoming) in [(a_in, true), (a_out, false)] {
                if !raw.contains_key(&a) || slot.insert((a, incoming), (c, s)).is_some() {
                    return Err(DiagramParseError { line: *line, reason: format!("arc {} is missing or reused", a.0) });
                }
            }
        }
        d.crossings.insert(c, *x);
    }
    for (id, (from, to, real, line)) in raw {
        let resolve = |e: RawEnd, incoming: bool| -> Result<Endpoint, DiagramParseError> {
            match e {
                RawEnd::Crossing(k) => match slot.get(&(id, incoming)) {
                    Some(&(c, s)) if c.0 == k => Ok(Endpoint::Crossing(c, s)),
                    _ => Err(DiagramParseError { line, reason: format!("crossing x{k} does not list arc {}", id.0) }),
                },
                RawEnd::Free(l) => Ok(Endpoint::Free(l)),
                RawEnd::Dangling => Ok(Endpoint::Dangling),
            }
        };
        let arc = Arc { from: resolve(from, false)?, to: resolve(to, true)?, real };
        d.arcs.insert(id, arc);
    }
    Ok(d)
}

/// Graphviz rendering: crossings as points, virtual arcs dotted.
pub fn to_dot(d: &TangleDiagram) -> String {
    let mut out = String::from("digraph tangle {\n");
    for (c, x) in &d.crossings {
        let _ = writeln!(out, "  {c} [label=\"{:+}\", shape=circle];", x.sign);
    }
    let mut extra = 0;
    let mut node = |out: &mut String, e: &Endpoint| match e {
        Endpoint::Crossing(c, _) => c.to_string(),
        Endpoint::Free(l) => {
            extra += 1;
            let _ = writeln!(out, "  e{extra} [label=\"{l}\", shape=plaintext];");
            format!("e{extra}")
        }
        Endpoint::Dangling => {
            extra += 1;
            let _ = writeln!(out, "  e{extra} [label=\"\", shape=point];");
            format!("e{extra}")
        }
    };
    for (id, a) in &d.arcs {
        let (f, t) = (node(&mut out, &a.from), node(&mut out, &a.to));
        let style = if a.real { "solid" } else { "dotted" };
        let strand = |e: &Endpoint| match e {
            Endpoint::Crossing(_, Strand::Over) => "over",
            Endpoint::Crossing(_, Strand::Under) => "under",
            _ => "",
        };
        let _ = writeln!(
            out,
            "  {f} -> {t} [label=\"{id}\", style={style}, taillabel=\"{}\", headlabel=\"{}\"];",
            strand(&a.from),
            strand(&a.to)
        );
    }
    for k in 0..d.circles {
        let _ = writeln!(out, "  circle{k} [label=\"\", shape=circle, style=dashed];");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_zg;
    use crate::knots::{diagram_iso, encode};

    #[test]
    fn round_trip() {
        for src in ["ZM 1 body f var\nZP 1 f arg res", "Z 2 a b c o p q", "ZM 2 a b c e\nLOOP"] {
            let d = encode(&parse_zg(src).unwrap()).unwrap();
            let text = emit_diagram(&d);
            let back = parse_diagram(&text).unwrap();
            assert!(diagram_iso(&d, &back), "{text}");
            assert_eq!(emit_diagram(&back), text);
        }
    }

    #[test]
    fn format_lines() {
        let d = encode(&parse_zg("ZM 1 a b c").unwrap()).unwrap();
        let text = emit_diagram(&d);
        assert!(text.lines().any(|l| l.starts_with("ARC ") && l.ends_with(" virtual") && l.contains(" ~ ")));
        assert!(text.lines().any(|l| l.starts_with("X +1 ")));
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_diagram("ARC 0 @a @b real\nX +1 0 1 2 3").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_diagram("ARC 0 @a @b maybe").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn dot_marks_virtual_arcs() {
        let d = encode(&parse_zg("ZP 1 a b c").unwrap()).unwrap();
        assert!(to_dot(&d).contains("style=dotted"));
    }
}
