//! Reduction strategies, traces, path search and the multiplier and death
//! tactics.

mod duplicate;
mod search;
mod tactics;

use std::fmt::Write as _;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::graph::{isomorphic, IsoOptions, ZGraph};
use crate::rewrites::{apply, apply_traced, enumerate_first, Case, ClickCase, Inverse, Match, MoveKind, RewriteError};

pub use search::{search_path, SearchLimits, NotFound};
pub use tactics::{kill, multiply, TacticError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    FirstMatch,
    Random,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    pub priority: Vec<MoveKind>,
    pub max_steps: usize,
    pub seed: u64,
    pub tie_break: TieBreak,
    /// Allow clicks where the minus half-zipper is longer (m < n). Off by
    /// default, which gives weak combinator reduction.
    pub partial_click: bool,
    /// Run a selected dist move through to two complete copies.
    pub duplicate: bool,
}

impl Default for Strategy {
    fn default() -> Self {
        use MoveKind::*;
        Strategy {
            priority: vec![
                PruneZP, PruneZM, PruneFO, PruneFI, PruneArrowT, TowerMerge, Click, Zip, DistPlus,
                DistMinus, FanInCross,
            ],
            max_steps: 10_000,
            seed: 0,
            tie_break: TieBreak::FirstMatch,
            partial_click: false,
            duplicate: true,
        }
    }
}

impl Strategy {
    pub fn kill() -> Self {
        use MoveKind::*;
        Strategy {
            priority: vec![PruneZP, PruneFO, PruneFI, PruneZM, PruneArrowT, Click, Zip, DistPlus, DistMinus],
            ..Strategy::default()
        }
    }

    pub fn multiply() -> Self {
        use MoveKind::*;
        Strategy { priority: vec![DistPlus, DistMinus, PruneFI, FanInCross], ..Strategy::default() }
    }

    /// Whether `m` may be chosen under this strategy.
    pub fn allows(&self, m: &Match) -> bool {
        self.partial_click || m.case != Case::Click(ClickCase::MinusLonger)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    NormalForm,
    StepLimit,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::NormalForm => "normal-form",
            Status::StepLimit => "step-limit",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub initial: ZGraph,
    pub steps: Vec<Match>,
    pub final_graph: ZGraph,
    pub status: Status,
}

impl Trace {
    pub fn initial_fingerprint(&self) -> String {
        self.initial.fingerprint()
    }

    /// Fingerprint after each step, recomputed from the initial graph.
    pub fn fingerprints(&self) -> Result<Vec<String>, RewriteError> {
        let mut g = self.initial.clone();
        self.steps
            .iter()
            .map(|m| {
                g = apply(&g, m)?;
                Ok(g.fingerprint())
            })
            .collect()
    }

    /// One line per step, then a status line.
    pub fn log(&self) -> Result<String, RewriteError> {
        let mut out = format!("start: {}\n", self.initial_fingerprint());
        for (k, (m, fp)) in self.steps.iter().zip(self.fingerprints()?).enumerate() {
            let _ = writeln!(out, "step {}: {} @ {} -> {}", k + 1, m.kind, m.summary(), fp);
        }
        let _ = writeln!(out, "status: {}, loops: {}", self.status.name(), self.final_graph.loop_count());
        Ok(out)
    }

    /// Re-applies every step to the initial graph and checks that the result
    /// has the recorded final fingerprint.
    pub fn replay(&self) -> Result<ZGraph, RewriteError> {
        let mut g = self.initial.clone();
        for m in &self.steps {
            g = apply(&g, m)?;
        }
        if g.fingerprint() != self.final_graph.fingerprint() {
            return Err(RewriteError::PatternMismatch("replay diverged from the recorded result".into()));
        }
        Ok(g)
    }
}

/// Applies moves while recording them, up to a step budget.
pub(crate) struct Runner {
    pub g: ZGraph,
    pub initial: ZGraph,
    pub steps: Vec<Match>,
    pub max_steps: usize,
}

impl Runner {
    pub fn new(g: ZGraph, max_steps: usize) -> Self {
        Runner { initial: g.clone(), g, steps: Vec::new(), max_steps }
    }

    pub fn exhausted(&self) -> bool {
        self.steps.len() >= self.max_steps
    }

    pub fn apply(&mut self, m: &Match) -> Result<Inverse, RewriteError> {
        let (g, inv) = apply_traced(&self.g, m)?;
        self.g = g;
        self.steps.push(m.clone());
        Ok(inv)
    }

    pub fn finish(self, status: Status) -> Trace {
        Trace { initial: self.initial, steps: self.steps, final_graph: self.g, status }
    }
}

/// Allowed matches of the first kind in priority order that has any.
pub(crate) fn candidates(g: &ZGraph, s: &Strategy) -> Option<(MoveKind, Vec<Match>)> {
    enumerate_first(g, &s.priority, |m| s.allows(m))
}

/// Rewrites until no kind in the priority list has an allowed match, or
/// the step budget runs out.
pub fn reduce(g: &ZGraph, s: &Strategy) -> Trace {
    let mut run = Runner::new(g.clone(), s.max_steps);
    let mut rng = StdRng::seed_from_u64(s.seed);
    loop {
        if run.exhausted() {
            return run.finish(Status::StepLimit);
        }
        let Some((kind, mut ms)) = candidates(&run.g, s) else {
            return run.finish(Status::NormalForm);
        };
        if s.tie_break == TieBreak::Random {
            ms.shuffle(&mut rng);
        }
        let is_dist = matches!(kind, MoveKind::DistPlus | MoveKind::DistMinus);
        if is_dist && s.duplicate {
            let m = duplicate::innermost(&run.g, &ms);
            // A macro that cannot finish leaves valid intermediate states;
            // the ordinary loop carries on from there.
            let _ = duplicate::duplicate(&mut run, &m);
        } else {
            run.apply(&ms[0]).expect("enumerated matches apply");
        }
    }
}

/// Isomorphism after dropping loops (fanout outs unordered), and the
/// difference in loop counts.
pub fn equal_mod_loops(g1: &ZGraph, g2: &ZGraph) -> (bool, usize) {
    let (a, la) = g1.strip_loops();
    let (b, lb) = g2.strip_loops();
    let same = isomorphic(&a, &b, IsoOptions { fanout_outs_unordered: true });
    (same, la.abs_diff(lb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{compile, parse_term, readback};
    use crate::graph::parse_zg;
    use crate::rewrites::MoveKind;

    fn c(s: &str) -> ZGraph {
        compile(&parse_term(s).unwrap())
    }

    #[test]
    fn identity_applied_to_identity() {
        let t = reduce(&c("I I"), &Strategy::default());
        assert_eq!(t.status, Status::NormalForm);
        assert!(isomorphic(&t.final_graph.strip_loops().0, &c("I"), IsoOptions::default()));
    }

    #[test]
    fn k_discards() {
        let t = reduce(&c("K I (K I)"), &Strategy::default());
        assert!(equal_mod_loops(&t.final_graph, &c("I")).0);
    }

    #[test]
    fn empty_graph_is_normal() {
        let t = reduce(&ZGraph::new(), &Strategy::default());
        assert_eq!((t.steps.len(), t.status), (0, Status::NormalForm));
    }

    #[test]
    fn normal_form_has_no_allowed_match() {
        let s = Strategy::default();
        let t = reduce(&c("S (K I) (S I I) K"), &s);
        assert_eq!(t.status, Status::NormalForm);
        assert!(candidates(&t.final_graph, &s).is_none());
    }

    #[test]
    fn trace_replays() {
        let t = reduce(&c("S K I (K I S)"), &Strategy::default());
        let g = t.replay().unwrap();
        assert_eq!(g.fingerprint(), t.final_graph.fingerprint());
        let log = t.log().unwrap();
        assert!(log.lines().nth(1).unwrap().starts_with("step 1: "));
        assert!(log.trim_end().ends_with(&format!("loops: {}", t.final_graph.loop_count())));
    }

    #[test]
    fn duplication_inside_reduction() {
        let t = reduce(&c("S I I K"), &Strategy::default());
        assert_eq!(readback(&t.final_graph).unwrap(), parse_term("K K").unwrap());
    }

    #[test]
    fn beta_rewiring() {
        let g = parse_zg("ZM 1 body f var\nZP 1 f arg res").unwrap();
        let s = Strategy { priority: vec![MoveKind::Click, MoveKind::Zip], ..Strategy::default() };
        let t = reduce(&g, &s);
        let want = parse_zg("ARROW body res\nARROW arg var").unwrap();
        assert!(isomorphic(&t.final_graph, &want, IsoOptions::default()));
        let mut ends = t.final_graph.free_ends();
        ends.sort();
        assert_eq!(ends, g.free_ends());
    }

    #[test]
    fn equal_mod_loops_reports_difference() {
        let mut a = c("I");
        a.add_loops(2);
        assert_eq!(equal_mod_loops(&a, &c("I")), (true, 2));
        assert!(!equal_mod_loops(&c("I"), &c("K")).0);
    }
}
