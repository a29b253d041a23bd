use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::graph::{invariant_hash, isomorphic, IsoOptions, ZGraph};
use crate::rewrites::{apply, enumerate_all, Match, MoveKind};

use super::equal_mod_loops;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub depth: usize,
    /// Distinct states (up to isomorphism and loops) explored before giving up.
    pub max_states: usize,
    pub kinds: Vec<MoveKind>,
}

impl SearchLimits {
    pub fn depth(depth: usize) -> Self {
        SearchLimits { depth, max_states: 200_000, kinds: MoveKind::ALL.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no path found within depth {depth} ({states} states explored)")]
pub struct NotFound {
    pub depth: usize,
    pub states: usize,
}

struct Seen {
    buckets: HashMap<u64, Vec<usize>>,
    graphs: Vec<ZGraph>,
}

impl Seen {
    /// Registers `g` (loops ignored); false if an isomorphic state exists.
    fn insert(&mut self, g: &ZGraph) -> bool {
        let (g, _) = g.strip_loops();
        let opts = IsoOptions::default();
        let bucket = self.buckets.entry(invariant_hash(&g, opts)).or_default();
        if bucket.iter().any(|&i| isomorphic(&self.graphs[i], &g, opts)) {
            return false;
        }
        bucket.push(self.graphs.len());
        self.graphs.push(g);
        true
    }
}

/// Breadth-first search for a move sequence taking `from` to a graph equal
/// to `to` up to loops. Tower splits and both coassoc rotations make the
/// structural moves available in both directions.
pub fn search_path(from: &ZGraph, to: &ZGraph, limits: &SearchLimits) -> Result<Vec<Match>, NotFound> {
    if equal_mod_loops(from, to).0 {
        return Ok(Vec::new());
    }
    let mut seen = Seen { buckets: HashMap::new(), graphs: Vec::new() };
    seen.insert(from);
    // Parent links: state index -> (parent index, move).
    let mut nodes: Vec<(ZGraph, Option<(usize, Match)>)> = vec![(from.clone(), None)];
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    while let Some((at, depth)) = queue.pop_front() {
        if depth == limits.depth {
            continue;
        }
        for m in enumerate_all(&nodes[at].0, &limits.kinds) {
            let Ok(next) = apply(&nodes[at].0, &m) else { continue };
            if !seen.insert(&next) {
                continue;
            }
            let found = equal_mod_loops(&next, to).0;
            nodes.push((next, Some((at, m))));
            let id = nodes.len() - 1;
            if found {
                let mut path = Vec::new();
                let mut cur = id;
                while let Some((parent, m)) = &nodes[cur].1 {
                    path.push(m.clone());
                    cur = *parent;
                }
                path.reverse();
                return Ok(path);
            }
            if nodes.len() >= limits.max_states {
                return Err(NotFound { depth: limits.depth, states: nodes.len() });
            }
            queue.push_back((id, depth + 1));
        }
    }
    Err(NotFound { depth: limits.depth, states: nodes.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{compile, parse_term};

    fn c(s: &str) -> ZGraph {
        compile(&parse_term(s).unwrap())
    }

    #[test]
    fn trivial_path_is_empty() {
        assert_eq!(search_path(&c("K"), &c("K"), &SearchLimits::depth(0)), Ok(Vec::new()));
    }

    #[test]
    fn identity_application_is_click_then_zip() {
        let path = search_path(&c("I I"), &c("I"), &SearchLimits::depth(4)).unwrap();
        let kinds: Vec<MoveKind> = path.iter().map(|m| m.kind).collect();
        assert_eq!(kinds, vec![MoveKind::Click, MoveKind::Zip]);
    }

    #[test]
    fn unrelated_graphs_are_not_found() {
        assert!(search_path(&c("K"), &c("S"), &SearchLimits::depth(2)).is_err());
    }
}
