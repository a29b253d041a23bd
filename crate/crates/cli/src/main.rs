use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use zipper_core::combinators::{compile, parse_term, readback};
use zipper_core::engine::{reduce, Strategy, TieBreak};
use zipper_core::graph::{emit_dot, emit_zg, parse_zg, ZGraph};
use zipper_core::knots::{emit_diagram, encode, to_dot};
use zipper_core::rewrites::MoveKind;
use zipper_core::verify::{self, Suite};

#[derive(Parser)]
#[command(name = "zl", version, about = "Zipper logic graph rewriting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile an SKI term to a .zg graph.
    Compile {
        term: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Reduce a term or .zg graph to normal form.
    Reduce {
        /// A term, or a path ending in .zg.
        input: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Write the step log here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        strategy: StrategyArgs,
    },
    /// Run an acceptance suite, or all of them.
    Verify {
        /// theorem-a, theorem-b, theorem-c, theorem-d, multiplier, death,
        /// beta, reversibility, fuzz, knots, serialization or all.
        suite: String,
        /// Only print failures and the summary.
        #[arg(short, long)]
        quiet: bool,
    },
    /// Compare the engine with the term oracle on random terms.
    Fuzz {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 12)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        fuel: usize,
    },
    /// Graphviz rendering of a term or graph.
    Dot {
        input: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Tangle diagram of a graph built from half-zippers and zippers.
    Knots {
        input: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = KnotFormat::Text)]
        format: KnotFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KnotFormat {
    Text,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieBreakArg {
    First,
    Random,
}

#[derive(clap::Args)]
struct StrategyArgs {
    /// Comma-separated move names in priority order.
    #[arg(long, value_delimiter = ',')]
    priority: Option<Vec<String>>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TieBreakArg::First)]
    tie_break: TieBreakArg,
    /// Also click when the minus half-zipper is longer.
    #[arg(long)]
    partial_click: bool,
}

impl StrategyArgs {
    fn strategy(&self) -> Result<Strategy, Usage> {
        let mut s = Strategy { seed: self.seed, partial_click: self.partial_click, ..Strategy::default() };
        if let Some(names) = &self.priority {
            s.priority = names
                .iter()
                .map(|n| n.trim().parse::<MoveKind>())
                .collect::<Result<_, _>>()
                .map_err(|e| Usage(anyhow!(e)))?;
        }
        if let Some(n) = self.max_steps {
            s.max_steps = n;
        }
        s.tie_break = match self.tie_break {
            TieBreakArg::First => TieBreak::FirstMatch,
            TieBreakArg::Random => TieBreak::Random,
        };
        Ok(s)
    }
}

/// Bad input from the user; exits with status 2.
struct Usage(anyhow::Error);

enum Failure {
    Usage(anyhow::Error),
    Check(String),
    Other(anyhow::Error),
}

impl From<Usage> for Failure {
    fn from(u: Usage) -> Self {
        Failure::Usage(u.0)
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn load(input: &str) -> Result<ZGraph, Usage> {
    if input.ends_with(".zg") {
        let text = fs::read_to_string(input).with_context(|| format!("reading {input}")).map_err(Usage)?;
        return parse_zg(&text).map_err(|e| Usage(anyhow!("{input}:{e}")));
    }
    parse_term(input).map(|t| compile(&t)).map_err(|e| Usage(anyhow!("term: {e}")))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn print_cases(cases: &[verify::CaseResult], quiet: bool) {
    for c in cases.iter().filter(|c| !quiet || !c.ok) {
        println!("  {} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.label, c.detail);
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Compile { term, out } => {
            let t = parse_term(&term).map_err(|e| Usage(anyhow!("term: {e}")))?;
            let g = compile(&t);
            write_out(out.as_deref(), &emit_zg(&g))?;
            eprintln!("{} nodes, {} arrows", g.node_count(), g.arrow_count());
        }
        Command::Reduce { input, out, trace, strategy } => {
            let g = load(&input)?;
            let s = strategy.strategy()?;
            let t = reduce(&g, &s);
            if let Some(p) = trace {
                let log = t.log().map_err(|e| anyhow!(e))?;
                fs::write(&p, log).with_context(|| format!("writing {}", p.display()))?;
            }
            write_out(out.as_deref(), &emit_zg(&t.final_graph))?;
            let term = readback(&t.final_graph).map_or_else(|_| "(not a combinator graph)".into(), |t| t.to_string());
            eprintln!(
                "{} after {} steps, {} loops: {}",
                t.status.name(),
                t.steps.len(),
                t.final_graph.loop_count(),
                term
            );
        }
        Command::Verify { suite, quiet } => {
            let suites: Vec<Suite> = if suite == "all" {
                Suite::ALL.to_vec()
            } else {
                vec![suite.parse::<Suite>().map_err(|e| Usage(anyhow!(e)))?]
            };
            let mut failed = Vec::new();
            for s in suites {
                let r = s.run();
                print_cases(&r.cases, quiet);
                println!("{}", r.summary());
                if !r.passed() {
                    failed.push(s.name());
                }
            }
            if !failed.is_empty() {
                return Err(Failure::Check(format!("failed: {}", failed.join(", "))));
            }
        }
        Command::Fuzz { count, max_size, seed, fuel } => {
            if max_size == 0 {
                return Err(Failure::Usage(anyhow!("--max-size must be at least 1")));
            }
            let cases = verify::fuzz(count, max_size, fuel, seed);
            print_cases(&cases, false);
            let bad = cases.iter().filter(|c| !c.ok).count();
            println!("{} of {} terms agree with the oracle", cases.len() - bad, cases.len());
            if bad > 0 {
                return Err(Failure::Check(format!("{bad} disagreements")));
            }
        }
        Command::Dot { input, out } => {
            let g = load(&input)?;
            write_out(out.as_deref(), &emit_dot(&g))?;
        }
        Command::Knots { input, out, format } => {
            let g = load(&input)?;
            let d = encode(&g).map_err(|e| Usage(anyhow!(e)))?;
            let text = match format {
                KnotFormat::Text => emit_diagram(&d),
                KnotFormat::Dot => to_dot(&d),
            };
            write_out(out.as_deref(), &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
