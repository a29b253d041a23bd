//! The zipper-logic moves: pattern enumeration, forward rewrites and their
//! exact inverses.

mod enumerate;
mod forward;
mod reverse;
pub mod sample;
mod splice;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{ArrowId, NodeId};

pub use enumerate::{canonical_rank, enumerate_all, enumerate_first, enumerate_matches};
pub use forward::{apply, apply_traced};
pub use reverse::reverse;
pub use splice::{Chain, ChainSite};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Click,
    Zip,
    TowerMerge,
    TowerSplit,
    CoComm,
    CoAssoc,
    FanInCross,
    DistPlus,
    DistMinus,
    PruneZP,
    PruneZM,
    PruneFO,
    PruneFI,
    PruneArrowT,
}

impl MoveKind {
    pub const ALL: [MoveKind; 14] = [
        MoveKind::Click,
        MoveKind::Zip,
        MoveKind::TowerMerge,
        MoveKind::TowerSplit,
        MoveKind::CoComm,
        MoveKind::CoAssoc,
        MoveKind::FanInCross,
        MoveKind::DistPlus,
        MoveKind::DistMinus,
        MoveKind::PruneZP,
        MoveKind::PruneZM,
        MoveKind::PruneFO,
        MoveKind::PruneFI,
        MoveKind::PruneArrowT,
    ];

    pub const PRUNES: [MoveKind; 5] = [
        MoveKind::PruneZP,
        MoveKind::PruneZM,
        MoveKind::PruneFO,
        MoveKind::PruneFI,
        MoveKind::PruneArrowT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::Click => "click",
            MoveKind::Zip => "zip",
            MoveKind::TowerMerge => "tower+",
            MoveKind::TowerSplit => "tower-",
            MoveKind::CoComm => "cocomm",
            MoveKind::CoAssoc => "coassoc",
            MoveKind::FanInCross => "fanin",
            MoveKind::DistPlus => "dist+",
            MoveKind::DistMinus => "dist-",
            MoveKind::PruneZP => "prune-zp",
            MoveKind::PruneZM => "prune-zm",
            MoveKind::PruneFO => "prune-fo",
            MoveKind::PruneFI => "prune-fi",
            MoveKind::PruneArrowT => "prune-arrow",
        }
    }

    pub fn is_prune(self) -> bool {
        Self::PRUNES.contains(&self)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown move name {0:?}")]
pub struct UnknownMove(pub String);

impl FromStr for MoveKind {
    type Err = UnknownMove;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MoveKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownMove(s.to_string()))
    }
}

/// Arity relation of a clicked pair ZM(n), ZP(m).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClickCase {
    /// m = n
    Equal,
    /// m > n, a plus residual remains.
    PlusLonger,
    /// m < n, a minus residual remains.
    MinusLonger,
}

/// Which out port of the upper fanout carries the lower one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rotation {
    /// Upper out 1 feeds the lower fanout: ((x, y), z) becomes (x, (y, z)).
    Right,
    /// Upper out 2 feeds the lower fanout: (x, (y, z)) becomes ((x, y), z).
    Left,
}

impl Rotation {
    pub fn opposite(self) -> Self {
        match self {
            Rotation::Right => Rotation::Left,
            Rotation::Left => Rotation::Right,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    None,
    Click(ClickCase),
    /// Tower split point: the first half keeps this many ports.
    Split(u32),
    Assoc(Rotation),
    /// Fanout out port feeding the termination.
    PruneOut(u32),
}

/// One occurrence of a move's left-hand pattern.
///
/// Node roles by kind:
/// - click: `[zm, zp]`; tower merge: `[source, target]` along the spine arrow
/// - zip, tower split, cocomm, prune-arrow: `[node]`
/// - coassoc: `[upper, lower]`; fanin: `[fanin, fanout]`
/// - dist: `[half-zipper, fanout]`; other prunes: `[node, termination]`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Match {
    pub kind: MoveKind,
    pub nodes: Vec<NodeId>,
    pub case: Case,
}

impl Match {
    pub fn new(kind: MoveKind, nodes: Vec<NodeId>, case: Case) -> Self {
        Match { kind, nodes, case }
    }

    pub fn summary(&self) -> String {
        let ids: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
        let mut s = ids.join(",");
        match self.case {
            Case::None => {}
            Case::Click(ClickCase::Equal) => s.push_str(" (m=n)"),
            Case::Click(ClickCase::PlusLonger) => s.push_str(" (m>n)"),
            Case::Click(ClickCase::MinusLonger) => s.push_str(" (m<n)"),
            Case::Split(p) => s.push_str(&format!(" split {p}")),
            Case::Assoc(Rotation::Right) => s.push_str(" right"),
            Case::Assoc(Rotation::Left) => s.push_str(" left"),
            Case::PruneOut(k) => s.push_str(&format!(" out {k}")),
        }
        s
    }
}

impl fmt::Display for Match {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.kind, self.summary())
    }
}

/// What a termination capped, or the variable that closed a prune-zm body.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Cap(NodeId),
    SelfVar(u32),
}

/// Everything needed to undo one applied move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inverse {
    /// Undo a click: split `zipper` (and the residual, if any) back into the pair.
    Unclick { zipper: NodeId, residual: Option<NodeId>, case: ClickCase },
    /// Re-insert a Z(n); pair 0 is (0, 0'), pair i is (i', i).
    Unzip { arity: u32, chains: Vec<Chain> },
    /// Undone by a plain forward move (tower, cocomm, coassoc).
    Forward(Match),
    /// Re-insert FI + FO; pair 0 is (FI in 1, FO out 2), pair 1 is (FI in 2, FO out 1).
    UnfanIn { chains: Vec<Chain> },
    Undist { plus: bool, copies: [NodeId; 2], fanouts: Vec<NodeId>, fanins: Vec<NodeId> },
    UnpruneZP { caps: Vec<NodeId> },
    UnpruneZM { arity: u32, body: Body, vars: Vec<Option<String>> },
    /// Re-insert FO + T; pair 0 is (FO in, FO surviving out).
    UnpruneFO { chains: Vec<Chain>, out: u32 },
    UnpruneFI { caps: [NodeId; 2] },
    UnpruneArrow { label: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("pattern mismatch: {0}")]
    PatternMismatch(String),
    #[error("split point {point} out of range for arity {arity}")]
    SplitOutOfRange { point: u32, arity: u32 },
    #[error("arrow {0} not found")]
    MissingArrow(ArrowId),
}

