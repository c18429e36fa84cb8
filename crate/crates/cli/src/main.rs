use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tdt_core::automata::{parse_spec, parse_tree_automaton, SpecAutomaton, TreeAutomaton};
use tdt_core::oracle::verify_uniformizer;
use tdt_core::synth::{build_game, DelayBound, Outcome, SolvedGame, SynthOptions, Synthesis};
use tdt_core::terms::{parse_term, print_term};
use tdt_core::transducers::parse_transducer;

/// Builds top-down tree transducers that pick one output for each input of a tree relation.
#[derive(Parser)]
#[command(name = "tdtsynth", version)]
struct Cli {
    /// Vertex budget for each explored game.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_vertices: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Mode {
    /// Bound on the lookahead along one input path.
    #[arg(
        long,
        conflicts_with = "unbounded",
        required_unless_present = "unbounded"
    )]
    delay: Option<usize>,
    /// Unbounded lookahead with path-recognizable tails.
    #[arg(long)]
    unbounded: bool,
    /// Deterministic automaton restricting the input domain.
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Print every saturated vertex, its factorization and the stay verdict.
    #[arg(long)]
    explain_stay: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide realizability; exit 0 when realizable, 1 when not.
    Check {
        spec: PathBuf,
        #[command(flatten)]
        mode: Mode,
    },
    /// Synthesize a transducer and write it out.
    Build {
        spec: PathBuf,
        #[command(flatten)]
        mode: Mode,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run a transducer on one input term.
    Run { transducer: PathBuf, term: String },
    /// Check a transducer against a spec on every domain input up to a depth.
    Verify {
        spec: PathBuf,
        transducer: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Export the solved game arena as DOT.
    Game {
        spec: PathBuf,
        #[command(flatten)]
        mode: Mode,
        #[arg(long)]
        dot: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_spec(path: &Path) -> Result<SpecAutomaton> {
    parse_spec(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_domain(path: Option<&PathBuf>) -> Result<Option<TreeAutomaton>> {
    path.map(|p| parse_tree_automaton(&read(p)?).with_context(|| format!("in {}", p.display())))
        .transpose()
}

fn solved<'a>(
    spec: &'a SpecAutomaton,
    mode: &Mode,
    dom: Option<&TreeAutomaton>,
    opts: SynthOptions,
) -> Result<SolvedGame<'a>> {
    let bound = match (mode.delay, mode.unbounded) {
        (Some(k), false) => DelayBound::Bounded(k),
        (None, true) => DelayBound::Unbounded,
        _ => bail!("give exactly one of --delay K and --unbounded"),
    };
    Ok(build_game(spec, bound, dom, opts)?)
}

fn explain(s: &Synthesis) {
    for r in &s.stays {
        let verdict = if r.accepted { "stay" } else { "no stay" };
        eprintln!(
            "saturated ({}, {}): x = {} | y·j = {} | z = {} => {verdict}",
            r.state, r.path, r.x, r.y, r.z
        );
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let opts = SynthOptions {
        max_vertices: cli.max_vertices,
        ..SynthOptions::default()
    };
    match cli.command {
        Command::Check { spec, mode } => {
            let spec = load_spec(&spec)?;
            let dom = load_domain(mode.domain.as_ref())?;
            let s = solved(&spec, &mode, dom.as_ref(), opts)?.synthesis()?;
            if mode.explain_stay {
                explain(&s);
            }
            match s.outcome {
                Outcome::Realizable(_) => {
                    println!("REALIZABLE");
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::Unrealizable(cex) => {
                    println!("UNREALIZABLE");
                    eprintln!("losing play: {}", cex.play.join(" -> "));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Build { spec, mode, output } => {
            let spec = load_spec(&spec)?;
            let dom = load_domain(mode.domain.as_ref())?;
            let s = solved(&spec, &mode, dom.as_ref(), opts)?.synthesis()?;
            if mode.explain_stay {
                explain(&s);
            }
            match s.outcome {
                Outcome::Realizable(t) => {
                    fs::write(&output, t.to_string())
                        .with_context(|| format!("cannot write {}", output.display()))?;
                    println!("REALIZABLE");
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::Unrealizable(cex) => {
                    println!("UNREALIZABLE");
                    eprintln!("losing play: {}", cex.play.join(" -> "));
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Run { transducer, term } => {
            let t = parse_transducer(&read(&transducer)?)
                .with_context(|| format!("in {}", transducer.display()))?;
            let input = parse_term(&term, t.input()).context("in the input term")?;
            let out = t.execute(&input)?;
            println!("{}", print_term(&out, t.output()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            spec,
            transducer,
            depth,
            domain,
        } => {
            let spec = load_spec(&spec)?;
            let dom = load_domain(domain.as_ref())?;
            let t = parse_transducer(&read(&transducer)?)
                .with_context(|| format!("in {}", transducer.display()))?;
            let report = verify_uniformizer(&spec, &t, depth, dom.as_ref())?;
            let sig = spec.signature();
            print!("{}", report.to_lines(&sig.input, &sig.output));
            eprintln!(
                "checked {} inputs, {} failures",
                report.checked,
                report.failures.len()
            );
            Ok(if report.is_clean() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Game { spec, mode, dot } => {
            let spec = load_spec(&spec)?;
            let dom = load_domain(mode.domain.as_ref())?;
            let g = solved(&spec, &mode, dom.as_ref(), opts)?;
            fs::write(&dot, g.to_dot())
                .with_context(|| format!("cannot write {}", dot.display()))?;
            if mode.explain_stay {
                explain(&g.synthesis()?);
            }
            let verdict = if g.solution.initial_winning() {
                "REALIZABLE"
            } else {
                "UNREALIZABLE"
            };
            eprintln!(
                "{} vertices, {} edges, {verdict}",
                g.solution.num_vertices(),
                g.solution.num_edges()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
