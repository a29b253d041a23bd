//! The line-oriented `.zg` text format.
//!
//! ```text
//! ZM n e0 e0' e1 .. en          (-n) half-zipper
//! ZP n e0 e1' .. en' e0'        (+n) half-zipper
//! Z n e0 e1' .. en' e0' e1 .. en
//! FO ein eout1 eout2
//! FI ein1 ein2 eout
//! T ein
//! ARROW etail ehead             arrow with both ends free
//! LOOP
//! ```
//!
//! A label in a head position (an in port, or the first token of `ARROW`)
//! and the same label in a tail position form one arrow. A label seen once
//! is a free end named by that label.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use super::{End, NodeKind, PortRef, ZGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown statement {0:?}")]
    UnknownStatement(String),
    #[error("expected a positive arity, found {0:?}")]
    BadArity(String),
    #[error("{keyword} expects {expected} labels, found {found}")]
    Arity {
        keyword: String,
        expected: usize,
        found: usize,
    },
    #[error("label {label:?} used twice in {class} position")]
    DuplicateLabel { label: String, class: &'static str },
}

#[derive(Clone, Copy)]
enum Site {
    Port(PortRef),
    Wire(usize),
}

struct Tok<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Tok<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in body.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Tok { text: &body[s..i], col: s + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Tok { text: &body[s..], col: s + 1 });
    }
    out
}

pub fn parse_zg(text: &str) -> Result<ZGraph, ParseError> {
    let mut g = ZGraph::new();
    let mut heads: HashMap<String, Site> = HashMap::new();
    let mut tails: HashMap<String, Site> = HashMap::new();
    // (in label, out label) of each ARROW statement.
    let mut wires: Vec<(String, String)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let toks = tokenize(line);
        let Some(first) = toks.first() else { continue };
        let err = |column: usize, kind| ParseError { line: line_no, column, kind };
        let keyword = first.text;
        let (kind, rest) = match keyword {
            "ZM" | "ZP" | "Z" => {
                let Some(ntok) = toks.get(1) else {
                    return Err(err(first.col, ParseErrorKind::BadArity(String::new())));
                };
                let n: u32 = match ntok.text.parse() {
                    Ok(n) if n >= 1 => n,
                    _ => return Err(err(ntok.col, ParseErrorKind::BadArity(ntok.text.into()))),
                };
                let kind = match keyword {
                    "ZM" => NodeKind::HalfZipperMinus(n),
                    "ZP" => NodeKind::HalfZipperPlus(n),
                    _ => NodeKind::Zipper(n),
                };
                (Some(kind), &toks[2..])
            }
            "FO" => (Some(NodeKind::FanOut), &toks[1..]),
            "FI" => (Some(NodeKind::FanIn), &toks[1..]),
            "T" => (Some(NodeKind::Termination), &toks[1..]),
            "LOOP" | "ARROW" => (None, &toks[1..]),
            other => return Err(err(first.col, ParseErrorKind::UnknownStatement(other.into()))),
        };
        let expected = match (kind, keyword) {
            (Some(k), _) => k.ports().len(),
            (None, "LOOP") => 0,
            (None, _) => 2,
        };
        if rest.len() != expected {
            let col = rest.get(expected).or(toks.last()).map_or(1, |t| t.col);
            return Err(err(
                col,
                ParseErrorKind::Arity { keyword: keyword.into(), expected, found: rest.len() },
            ));
        }
        let claim = |map: &mut HashMap<String, Site>, tok: &Tok, site: Site, class| {
            if map.insert(tok.text.to_string(), site).is_some() {
                return Err(err(
                    tok.col,
                    ParseErrorKind::DuplicateLabel { label: tok.text.into(), class },
                ));
            }
            Ok(())
        };
        match kind {
            Some(k) => {
                let id = g.add_node(k);
                for (tok, port) in rest.iter().zip(k.ports()) {
                    let site = Site::Port(PortRef::new(id, port));
                    match k.direction(port).expect("port of kind") {
                        super::Direction::In => claim(&mut heads, tok, site, "head")?,
                        super::Direction::Out => claim(&mut tails, tok, site, "tail")?,
                    }
                }
            }
            None if keyword == "LOOP" => g.add_loops(1),
            None => {
                let w = wires.len();
                claim(&mut heads, &rest[0], Site::Wire(w), "head")?;
                claim(&mut tails, &rest[1], Site::Wire(w), "tail")?;
                wires.push((rest[0].text.into(), rest[1].text.into()));
            }
        }
    }

    let mut visited = vec![false; wires.len()];
    // Walks from `label` (whose tail end is `tail`) through wires to a head.
    let mut walk = |g: &mut ZGraph, tail: End, mut label: String| loop {
        match heads.get(&label) {
            Some(Site::Port(p)) => {
                g.add_arrow(tail, End::Port(*p));
                return;
            }
            None => {
                g.add_arrow(tail, End::Free(label));
                return;
            }
            Some(Site::Wire(w)) => {
                visited[*w] = true;
                label = wires[*w].1.clone();
            }
        }
    };
    let mut starts: Vec<(End, String)> = Vec::new();
    for (label, site) in &tails {
        if let Site::Port(p) = site {
            starts.push((End::Port(*p), label.clone()));
        }
    }
    for label in heads.keys() {
        if !tails.contains_key(label) {
            starts.push((End::Free(label.clone()), label.clone()));
        }
    }
    // Arrow ids follow a stable order.
    starts.sort();
    for (tail, label) in starts {
        walk(&mut g, tail, label);
    }
    // Remaining wires close into cycles.
    let mut in_of: HashMap<&str, usize> = HashMap::new();
    for (i, (a, _)) in wires.iter().enumerate() {
        in_of.insert(a.as_str(), i);
    }
    for start in 0..wires.len() {
        if visited[start] {
            continue;
        }
        let mut w = start;
        while !visited[w] {
            visited[w] = true;
            w = in_of[wires[w].1.as_str()];
        }
        g.add_loops(1);
    }
    Ok(g)
}

/// Canonical text: nodes in id order, internal arrows relabelled `e0, e1, ..`
/// in order of first use, free-end labels kept.
pub fn emit_zg(g: &ZGraph) -> String {
    let free: BTreeSet<String> = g.free_labels();
    let index = g.port_index();
    let mut names: HashMap<super::ArrowId, String> = HashMap::new();
    let mut counter = 0usize;
    let mut out = String::new();
    for (id, kind) in g.nodes() {
        out.push_str(kind.mnemonic());
        if let Some(n) = kind.arity() {
            let _ = write!(out, " {n}");
        }
        for port in kind.ports() {
            let aid = index[&PortRef::new(id, port)];
            let arrow = g.arrow(aid).expect("indexed arrow");
            let name = match (&arrow.tail, &arrow.head) {
                (End::Free(l), _) | (_, End::Free(l)) => l.clone(),
                _ => names
                    .entry(aid)
                    .or_insert_with(|| loop {
                        let cand = format!("e{counter}");
                        counter += 1;
                        if !free.contains(&cand) {
                            break cand;
                        }
                    })
                    .clone(),
            };
            out.push(' ');
            out.push_str(&name);
        }
        out.push('\n');
    }
    for (_, a) in g.arrows() {
        if let (End::Free(t), End::Free(h)) = (&a.tail, &a.head) {
            let _ = writeln!(out, "ARROW {t} {h}");
        }
    }
    for _ in 0..g.loop_count() {
        out.push_str("LOOP\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{isomorphic, validate, IsoOptions, Port};

    #[test]
    fn identity_combinator() {
        let g = parse_zg("ZM 1 x out x").unwrap();
        assert!(validate(&g).is_empty());
        assert_eq!(g.node_count(), 1);
        assert_eq!(g.arrow_count(), 2);

        let mut want = ZGraph::new();
        let zm = want.add_node(NodeKind::HalfZipperMinus(1));
        want.connect(PortRef::new(zm, Port::Var(1)), PortRef::new(zm, Port::Zero));
        want.add_arrow(End::Port(PortRef::new(zm, Port::ZeroPrime)), End::Free("out".into()));
        assert!(isomorphic(&g, &want, IsoOptions::default()));
        assert_eq!(g.free_ends(), vec![("out".to_string(), false)]);
    }

    #[test]
    fn loop_line() {
        let g = parse_zg("LOOP").unwrap();
        assert_eq!(g.loop_count(), 1);
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn arity_error() {
        let e = parse_zg("ZM 1 x out").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Arity { expected: 3, found: 2, .. }));
        assert_eq!(e.line, 1);
    }

    #[test]
    fn duplicate_label_in_same_class() {
        let e = parse_zg("T a\nT a").unwrap_err();
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 3);
        assert!(matches!(e.kind, ParseErrorKind::DuplicateLabel { class: "head", .. }));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_zg("ZM 0 a b").unwrap_err().kind,
            ParseErrorKind::BadArity(_)
        ));
        assert!(matches!(
            parse_zg("  XX a").unwrap_err(),
            ParseError { line: 1, column: 3, kind: ParseErrorKind::UnknownStatement(_) }
        ));
    }

    #[test]
    fn comments_and_blank_lines() {
        let g = parse_zg("# identity\n\nZM 1 x out x   # body is the variable\n").unwrap();
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn arrow_statements() {
        let g = parse_zg("ARROW a d\nARROW c x").unwrap();
        assert_eq!(g.arrow_count(), 2);
        assert_eq!(
            g.free_ends(),
            vec![
                ("a".to_string(), true),
                ("c".to_string(), true),
                ("d".to_string(), false),
                ("x".to_string(), false)
            ]
        );
        // Wires chain and close into loops.
        let g = parse_zg("ARROW a b\nARROW b c\nT c").unwrap();
        assert_eq!(g.arrow_count(), 1);
        let g = parse_zg("ARROW a b\nARROW b a").unwrap();
        assert_eq!((g.arrow_count(), g.loop_count()), (0, 1));
    }

    #[test]
    fn emit_examples() {
        assert_eq!(emit_zg(&ZGraph::new()), "");
        assert_eq!(emit_zg(&parse_zg("ZM 1 x out x").unwrap()), "ZM 1 e0 out e0\n");
        assert_eq!(emit_zg(&ZGraph::with_loops(2)), "LOOP\nLOOP\n");
    }

    #[test]
    fn emitted_labels_avoid_free_names() {
        let g = parse_zg("ZM 1 x e0 x").unwrap();
        let text = emit_zg(&g);
        assert_eq!(text, "ZM 1 e1 e0 e1\n");
        assert!(isomorphic(&parse_zg(&text).unwrap(), &g, IsoOptions::default()));
    }
}
