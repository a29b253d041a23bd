//! The acceptance suites, shared by the test harness and `zl verify`.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::combinators::{compile, oracle_nf, parse_term, random_term, readback, Term};
use crate::engine::{equal_mod_loops, kill, multiply, reduce, search_path, SearchLimits, Strategy};
use crate::graph::{emit_zg, isomorphic, parse_zg, validate, End, IsoOptions, NodeKind, ZGraph};
use crate::knots::{apply_r2, diagram_iso, encode};
use crate::rewrites::sample::{planted, wire_open_ports};
use crate::rewrites::{apply, apply_traced, enumerate_matches, reverse, MoveKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    TheoremA,
    TheoremB,
    TheoremC,
    TheoremD,
    Multiplier,
    Death,
    Beta,
    Reversibility,
    Fuzz,
    Knots,
    Serialization,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::TheoremA,
        Suite::TheoremB,
        Suite::TheoremC,
        Suite::TheoremD,
        Suite::Multiplier,
        Suite::Death,
        Suite::Beta,
        Suite::Reversibility,
        Suite::Fuzz,
        Suite::Knots,
        Suite::Serialization,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TheoremA => "theorem-a",
            Suite::TheoremB => "theorem-b",
            Suite::TheoremC => "theorem-c",
            Suite::TheoremD => "theorem-d",
            Suite::Multiplier => "multiplier",
            Suite::Death => "death",
            Suite::Beta => "beta",
            Suite::Reversibility => "reversibility",
            Suite::Fuzz => "fuzz",
            Suite::Knots => "knots",
            Suite::Serialization => "serialization",
        }
    }

    /// Wall-clock budget for the whole suite.
    pub fn budget(self) -> Option<Duration> {
        let secs = match self {
            Suite::TheoremA => 5,
            Suite::TheoremB | Suite::TheoremC | Suite::TheoremD | Suite::Multiplier | Suite::Death => 10,
            Suite::Reversibility => 30,
            Suite::Fuzz => 60,
            Suite::Beta | Suite::Knots | Suite::Serialization => return None,
        };
        Some(Duration::from_secs(secs))
    }

    pub fn run(self) -> Report {
        let start = Instant::now();
        let cases = match self {
            Suite::TheoremA => theorem_a(),
            Suite::TheoremB => theorem_b(),
            Suite::TheoremC => theorem_c(),
            Suite::TheoremD => theorem_d(),
            Suite::Multiplier => multiplier(),
            Suite::Death => death(),
            Suite::Beta => beta(),
            Suite::Reversibility => reversibility(),
            Suite::Fuzz => fuzz(200, 12, 500, 9),
            Suite::Knots => knots(),
            Suite::Serialization => serialization(),
        };
        Report { suite: self, cases, elapsed: start.elapsed() }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Clone, Debug)]
pub struct CaseResult {
    pub label: String,
    pub ok: bool,
    pub detail: String,
}

impl CaseResult {
    fn new(label: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        CaseResult { label: label.into(), ok, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub suite: Suite,
    pub cases: Vec<CaseResult>,
    pub elapsed: Duration,
}

impl Report {
    pub fn within_budget(&self) -> bool {
        self.suite.budget().is_none_or(|b| self.elapsed <= b)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.ok)
    }

    pub fn passed(&self) -> bool {
        !self.cases.is_empty() && self.failures().next().is_none() && self.within_budget()
    }

    /// One summary line.
    pub fn summary(&self) -> String {
        let ok = self.cases.iter().filter(|c| c.ok).count();
        let budget = self.suite.budget().map_or(String::new(), |b| format!(" (budget {}s)", b.as_secs()));
        format!(
            "{} {}: {}/{} cases, {:.2}s{}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.suite,
            ok,
            self.cases.len(),
            self.elapsed.as_secs_f64(),
            budget
        )
    }
}

fn t(s: &str) -> Term {
    parse_term(s).expect("literal term")
}

fn nf_of(g: &ZGraph) -> Result<Term, String> {
    readback(&reduce(g, &Strategy::default()).final_graph).map_err(|e| e.to_string())
}

/// The named terms plus 50 random ones of size at most 8.
fn term_pool() -> Vec<Term> {
    let mut rng = StdRng::seed_from_u64(43);
    let mut pool: Vec<Term> = ["S", "K", "I", "S K", "K I", "K (I I)"].into_iter().map(t).collect();
    pool.extend((0..50).map(|_| {
        let size = rng.gen_range(1..=8);
        random_term(&mut rng, size)
    }));
    pool
}

fn check_term(label: String, got: Result<Term, String>, want: &Term) -> CaseResult {
    match got {
        Ok(g) if &g == want => CaseResult::new(label, true, want.to_string()),
        Ok(g) => CaseResult::new(label, false, format!("got {g}, want {want}")),
        Err(e) => CaseResult::new(label, false, e),
    }
}

fn theorem_a() -> Vec<CaseResult> {
    term_pool()
        .iter()
        .filter_map(|a| {
            let want = oracle_nf(a, 200).ok()?;
            let g = compile(&Term::app(Term::I, a.clone()));
            Some(check_term(format!("I ({a})"), nf_of(&g), &want))
        })
        .collect()
}

fn theorem_b() -> Vec<CaseResult> {
    let pool = term_pool();
    let mut out = Vec::new();
    for a in &pool {
        let Ok(want) = oracle_nf(a, 200) else { continue };
        for b in &pool {
            let g = compile(&Term::apply_all(Term::K, [a.clone(), b.clone()]));
            let trace = reduce(&g, &Strategy::default());
            let got = readback(&trace.final_graph).map_err(|e| e.to_string());
            let mut case = check_term(format!("K ({a}) ({b})"), got, &want);
            case.detail = format!("{}; loops {}", case.detail, trace.final_graph.loop_count());
            out.push(case);
        }
    }
    out
}

fn theorem_c() -> Vec<CaseResult> {
    let base: Vec<Term> = ["S", "K", "I", "S K"].into_iter().map(t).collect();
    let mut out = Vec::new();
    for a in &base {
        for b in &base {
            for c in &base {
                let left = Term::apply_all(Term::S, [a.clone(), b.clone(), c.clone()]);
                let right = Term::app(Term::app(a.clone(), c.clone()), Term::app(b.clone(), c.clone()));
                let l = reduce(&compile(&left), &Strategy::default());
                let r = reduce(&compile(&right), &Strategy::default());
                let (same, dl) = equal_mod_loops(&l.final_graph, &r.final_graph);
                out.push(CaseResult::new(format!("S ({a}) ({b}) ({c})"), same, format!("loop difference {dl}")));
            }
        }
    }
    out
}

fn theorem_d() -> Vec<CaseResult> {
    let skk = reduce(&compile(&t("S K K")), &Strategy::default());
    let id = compile(&Term::I);
    let mut out = Vec::new();
    if equal_mod_loops(&skk.final_graph, &id).0 {
        out.push(CaseResult::new("S K K = I", true, "by reduction"));
    } else {
        let found = search_path(&skk.final_graph, &id, &SearchLimits::depth(12));
        let case = match found {
            Ok(path) => {
                let moves: Vec<String> = path.iter().map(|m| m.kind.to_string()).collect();
                CaseResult::new("S K K = I", true, format!("normal form, then search: {}", moves.join(" ")))
            }
            Err(e) => CaseResult::new("S K K = I", false, e.to_string()),
        };
        out.push(case);
    }
    let mut rng = StdRng::seed_from_u64(44);
    while out.len() < 21 {
        let size = rng.gen_range(1..=8);
        let p = random_term(&mut rng, size);
        let Ok(want) = oracle_nf(&p, 200) else { continue };
        let g = compile(&Term::apply_all(t("S K K"), [p.clone()]));
        out.push(check_term(format!("S K K ({p})"), nf_of(&g), &want));
    }
    out
}

fn multiplier() -> Vec<CaseResult> {
    ["I", "K", "S", "S K", "K I", "S (K I)"]
        .into_iter()
        .map(|s| {
            let a = compile(&t(s));
            match multiply(&a, &Strategy::multiply()) {
                Ok(m) => CaseResult::new(s, true, format!("{} steps, strict {}", m.trace.steps.len(), m.strict)),
                Err(e) => CaseResult::new(s, false, e.to_string()),
            }
        })
        .collect()
}

fn death() -> Vec<CaseResult> {
    let mut out = Vec::new();
    for (s, want) in [("I", 1), ("K", 2), ("S", 3)] {
        let case = match kill(&compile(&t(s)), &Strategy::kill()) {
            Ok(k) => CaseResult::new(s, k.loops == want, format!("{} loops", k.loops)),
            Err(e) => CaseResult::new(s, false, e.to_string()),
        };
        out.push(case);
    }
    let mut rng = StdRng::seed_from_u64(45);
    for _ in 0..50 {
        let size = rng.gen_range(1..=10);
        let term = random_term(&mut rng, size);
        let case = match kill(&compile(&term), &Strategy::kill()) {
            Ok(k) => CaseResult::new(term.to_string(), true, format!("{} loops", k.loops)),
            Err(e) => CaseResult::new(term.to_string(), false, e.to_string()),
        };
        out.push(case);
    }
    out
}

fn beta() -> Vec<CaseResult> {
    let g = parse_zg("ZM 1 body f var\nZP 1 f arg res").expect("redex");
    let Some(click) = enumerate_matches(&g, MoveKind::Click).into_iter().next() else {
        return vec![CaseResult::new("click", false, "no click match")];
    };
    let h = apply(&g, &click).expect("click applies");
    let Some(zip) = enumerate_matches(&h, MoveKind::Zip).into_iter().next() else {
        return vec![CaseResult::new("zip", false, "no zip match")];
    };
    let h = apply(&h, &zip).expect("zip applies");
    let mut arrows: Vec<(String, String)> = h
        .arrows()
        .map(|(_, a)| match (&a.tail, &a.head) {
            (End::Free(x), End::Free(y)) => (x.clone(), y.clone()),
            _ => ("?".into(), "?".into()),
        })
        .collect();
    arrows.sort();
    let want = vec![("arg".to_string(), "var".to_string()), ("body".to_string(), "res".to_string())];
    let ok = arrows == want && h.node_count() == 0 && h.loop_count() == 0;
    vec![CaseResult::new("click, zip", ok, format!("{arrows:?}"))]
}

fn reversibility() -> Vec<CaseResult> {
    let mut rng = StdRng::seed_from_u64(46);
    MoveKind::ALL
        .into_iter()
        .map(|kind| {
            let mut bad = None;
            for i in 0..100 {
                let (g, m) = planted(kind, 4, &mut rng);
                let ok = apply_traced(&g, &m)
                    .and_then(|(h, inv)| reverse(&h, &inv))
                    .is_ok_and(|back| validate(&back).is_empty() && isomorphic(&back, &g, IsoOptions::default()));
                if !ok {
                    bad = Some(format!("case {i}: {}", emit_zg(&g)));
                    break;
                }
            }
            CaseResult::new(kind.name(), bad.is_none(), bad.unwrap_or_else(|| "100 pairs".into()))
        })
        .collect()
}

/// `count` random terms of size at most `max_size` whose oracle normal
/// form exists within `fuel`, each checked against the engine.
pub fn fuzz(count: usize, max_size: usize, fuel: usize, seed: u64) -> Vec<CaseResult> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let size = rng.gen_range(1..=max_size);
        let term = random_term(&mut rng, size);
        let Ok(want) = oracle_nf(&term, fuel) else { continue };
        out.push(check_term(term.to_string(), nf_of(&compile(&term)), &want));
    }
    out
}

fn knots() -> Vec<CaseResult> {
    let g = parse_zg("ZM 1 body f var\nZP 1 f arg res").expect("redex");
    let clicked = apply(&g, &enumerate_matches(&g, MoveKind::Click)[0]).expect("click");
    let zipped = apply(&clicked, &enumerate_matches(&clicked, MoveKind::Zip)[0]).expect("zip");
    let result = (|| {
        let d = encode(&clicked).map_err(|e| e.to_string())?;
        let site = *d.r2_sites().first().ok_or("no R2 site")?;
        let via_r2 = apply_r2(&d, site).map_err(|e| e.to_string())?;
        let via_zip = encode(&zipped).map_err(|e| e.to_string())?;
        Ok::<bool, String>(diagram_iso(&via_r2, &via_zip))
    })();
    let case = match result {
        Ok(ok) => CaseResult::new("encode . zip = r2 . encode", ok, "clicked (1)-zipper"),
        Err(e) => CaseResult::new("encode . zip = r2 . encode", false, e),
    };
    vec![case]
}

/// Random graphs covering every node kind, free ends, free arrows and loops.
pub fn serialization_corpus(count: usize, seed: u64) -> Vec<ZGraph> {
    let mut rng = StdRng::seed_from_u64(seed);
    let kinds = |k: u32| {
        [
            NodeKind::HalfZipperMinus(k),
            NodeKind::HalfZipperPlus(k),
            NodeKind::Zipper(k),
            NodeKind::FanOut,
            NodeKind::FanIn,
            NodeKind::Termination,
        ]
    };
    (0..count)
        .map(|i| {
            let mut g = ZGraph::new();
            for kind in kinds(rng.gen_range(1..=3)) {
                if i % 5 == 0 || rng.gen_bool(0.6) {
                    g.add_node(kind);
                }
            }
            wire_open_ports(&mut g, &mut rng);
            for _ in 0..rng.gen_range(0..=1) {
                let (a, b) = (g.fresh_label("in"), g.fresh_label("out"));
                g.add_arrow(End::Free(a), End::Free(b));
            }
            g.add_loops(rng.gen_range(0..=2));
            g
        })
        .collect()
}

fn serialization() -> Vec<CaseResult> {
    serialization_corpus(50, 47)
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let text = emit_zg(g);
            let ok = parse_zg(&text).is_ok_and(|back| isomorphic(&back, g, IsoOptions::default()));
            CaseResult::new(format!("graph {i}"), ok, format!("{} nodes", g.node_count()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>(), Ok(s));
        }
        assert!("theorem-e".parse::<Suite>().is_err());
    }

    #[test]
    fn corpus_covers_every_kind() {
        let corpus = serialization_corpus(50, 47);
        let text: String = corpus.iter().map(emit_zg).collect();
        for kw in ["ZM ", "ZP ", "Z ", "FO ", "FI ", "T ", "ARROW ", "LOOP"] {
            assert!(text.lines().any(|l| l.starts_with(kw)), "{kw}");
        }
    }

    #[test]
    fn cheap_suites_pass() {
        for s in [Suite::Beta, Suite::Knots, Suite::Multiplier] {
            let r = s.run();
            assert!(r.passed(), "{}", r.summary());
        }
    }
}
