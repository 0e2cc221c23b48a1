//! `ogkit`: inspect, quotient, value, sum, and enumerate optiongraphs from
//! the command line.
//!
//! Exit codes: 0 success (and checked properties hold), 1 a checked
//! property is false (map fails to verify, graphs not isomorphic, a
//! theorem trial fails), 2 input or usage error.

mod verify;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ogkit::{
    all_congruences_bounded, congruence_lattice_bounded, count_simple, count_simple_unbounded,
    find_isomorphism, fim_partition, first_iso_witness, is_rulegraph, max_congruence, minimize,
    quotient, simple_representatives, sum_with_separator, valuation, Congruence,
    EnumerationReport, FimClass, OptionMap, Optiongraph, Partition, RunOptions,
    DEFAULT_CONGRUENCE_BOUND,
};

/// Seed used when a randomized subcommand is run without `--seed`.
const DEFAULT_SEED: u64 = 271828;

const BOUND_VAR: &str = "OGKIT_MAX_POSITIONS";

#[derive(Parser)]
#[command(
    name = "ogkit",
    version,
    about = "Optiongraph toolkit: congruences, quotients, values, sums, enumeration",
    propagate_version = true
)]
struct Cli {
    /// Emit a line-oriented structured document instead of prose
    #[arg(long, global = true)]
    structured: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a graph file and report its basic shape
    Check { file: PathBuf },
    /// Split positions by whether play from them must end, cannot end, or either
    Fim { file: PathBuf },
    /// Print the maximum congruence (the coarsest legal identification)
    MaxCongruence { file: PathBuf },
    /// Quotient by the maximum congruence and print the simple result
    Minimize {
        file: PathBuf,
        /// Write the minimized graph here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List every congruence, optionally with the lattice structure
    Congruences {
        file: PathBuf,
        /// Also print cover edges, bottom, and top of the refinement order
        #[arg(long)]
        lattice: bool,
    },
    /// Quotient by a given congruence and print the result
    Quotient {
        file: PathBuf,
        /// The congruence, written like "ab|st" or "a b | s t"
        #[arg(long)]
        theta: String,
    },
    /// Print outcome, remoteness, and extended nim-value per position
    Values { file: PathBuf },
    /// Verify a map between two graphs; print kernel, image, and the
    /// induced quotient-to-image isomorphism
    Map {
        source: PathBuf,
        target: PathBuf,
        map: PathBuf,
    },
    /// Disjunctive sum of two graphs, printed as a graph file
    Sum {
        left: PathBuf,
        right: PathBuf,
        /// Character joining component labels into pair labels
        #[arg(long, default_value_t = ',')]
        separator: char,
    },
    /// Decide whether two graphs are isomorphic
    Iso { left: PathBuf, right: PathBuf },
    /// Sweep all labeled graphs on N positions and count the simple ones
    EnumerateSimple {
        n: usize,
        /// Worker threads for the sweep (default: one per CPU)
        #[arg(long)]
        jobs: Option<usize>,
        /// Allow larger sweeps that run for hours, with checkpointing
        #[arg(long)]
        long_running: bool,
        /// Progress file for --long-running; resumed from if present
        #[arg(long, requires = "long_running")]
        checkpoint: Option<PathBuf>,
        /// Print a progress line to stderr after each block
        #[arg(long, requires = "long_running")]
        progress: bool,
        /// Write one .og file per isomorphism class into this directory
        #[arg(long, conflicts_with = "long_running")]
        dump: Option<PathBuf>,
    },
    /// Run the isomorphism-theorem witnesses on random congruences of a graph
    VerifyTheorems {
        file: PathBuf,
        /// Sampled configurations per theorem
        #[arg(long, default_value_t = 50)]
        trials: u32,
        /// RNG seed; defaults to a fixed, printed value
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Render a graph in Graphviz DOT format
    Dot {
        file: PathBuf,
        /// Annotate each position with outcome, remoteness, and nim-value
        #[arg(long)]
        values: bool,
    },
}

fn main() -> ExitCode {
    // die quietly when a pipe closes early, like `ogkit values g.og | head`
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Optiongraph, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    Optiongraph::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// The position-count cap for congruence enumeration, overridable through
/// the environment.
fn congruence_bound() -> Result<usize, String> {
    match std::env::var(BOUND_VAR) {
        Ok(raw) => raw
            .parse::<usize>()
            .ok()
            .filter(|&b| b >= 1)
            .ok_or(format!("{BOUND_VAR} must be a positive integer, got {raw:?}")),
        Err(_) => Ok(DEFAULT_CONGRUENCE_BOUND),
    }
}

fn header(structured: bool, command: &str) {
    if structured {
        println!("ogkit 1");
        println!("command {command}");
    }
}

fn labels_of<'a>(g: &'a Optiongraph, ids: &[usize]) -> Vec<&'a str> {
    ids.iter().map(|&p| g.label(p)).collect()
}

fn joined_or_dash(labels: &[&str]) -> String {
    if labels.is_empty() {
        "-".to_string()
    } else {
        labels.join(" ")
    }
}

/// Structured rendering of a graph: one `position` line per position, one
/// `option` line per arrow, both in declaration order.
fn emit_graph(structured: bool, g: &Optiongraph) {
    if !structured {
        print!("{}", g.serialize());
        return;
    }
    println!("positions {}", g.position_count());
    for p in 0..g.position_count() {
        println!("position {}", g.label(p));
    }
    for p in 0..g.position_count() {
        for &o in g.options(p) {
            println!("option {} {}", g.label(p), g.label(o));
        }
    }
}

fn emit_map(f: &OptionMap) {
    for p in 0..f.source().position_count() {
        println!(
            "{} -> {}",
            f.source().label(p),
            f.target().label(f.apply(p))
        );
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let structured = cli.structured;
    let ok = Ok(ExitCode::SUCCESS);
    let falsified = Ok(ExitCode::from(1));
    match cli.command {
        Command::Check { file } => {
            let g = load(&file)?;
            header(structured, "check");
            if structured {
                println!("positions {}", g.position_count());
                println!("arrows {}", g.arrow_count());
                println!("rulegraph {}", is_rulegraph(&g));
            } else {
                let kind = if is_rulegraph(&g) {
                    "every play ends"
                } else {
                    "infinite play possible"
                };
                let plural = |n: usize| if n == 1 { "" } else { "s" };
                let (np, na) = (g.position_count(), g.arrow_count());
                println!(
                    "ok: {np} position{}, {na} arrow{}, {kind}",
                    plural(np),
                    plural(na)
                );
            }
            ok
        }
        Command::Fim { file } => {
            let g = load(&file)?;
            let fim = fim_partition(&g);
            header(structured, "fim");
            if structured {
                for p in 0..g.position_count() {
                    let class = match fim.class_of(p) {
                        FimClass::Finite => "F",
                        FimClass::Infinite => "I",
                        FimClass::Mixed => "M",
                    };
                    println!("fim {} {class}", g.label(p));
                }
            } else {
                println!("F: {}", joined_or_dash(&labels_of(&g, &fim.finite())));
                println!("I: {}", joined_or_dash(&labels_of(&g, &fim.infinite())));
                println!("M: {}", joined_or_dash(&labels_of(&g, &fim.mixed())));
            }
            ok
        }
        Command::MaxCongruence { file } => {
            let g = load(&file)?;
            let top = max_congruence(&g);
            header(structured, "max-congruence");
            if structured {
                println!("congruence {}", top.display(&g));
            } else {
                println!("{}", top.display(&g));
            }
            ok
        }
        Command::Minimize { file, output } => {
            let g = load(&file)?;
            let minimized = minimize(&g).graph;
            header(structured, "minimize");
            match output {
                Some(path) => {
                    fs::write(&path, minimized.serialize())
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                    if structured {
                        println!("output {}", path.display());
                        println!("positions {}", minimized.position_count());
                    } else {
                        println!("wrote {}", path.display());
                    }
                }
                None => emit_graph(structured, &minimized),
            }
            ok
        }
        Command::Congruences { file, lattice } => {
            let g = load(&file)?;
            let bound = congruence_bound()?;
            header(structured, "congruences");
            if lattice {
                let lat =
                    congruence_lattice_bounded(&g, bound).map_err(|e| e.to_string())?;
                let shown: Vec<String> =
                    lat.elements().iter().map(|c| c.display(&g)).collect();
                if structured {
                    println!("count {}", shown.len());
                    for text in &shown {
                        println!("congruence {text}");
                    }
                    for &(i, j) in lat.covers() {
                        println!("cover {i} {j}");
                    }
                    println!("bottom {}", lat.bottom());
                    println!("top {}", lat.top());
                } else {
                    println!("{} congruences", shown.len());
                    for text in &shown {
                        println!("{text}");
                    }
                    println!("covers:");
                    for &(i, j) in lat.covers() {
                        println!("{} < {}", shown[i], shown[j]);
                    }
                    println!("bottom {}", shown[lat.bottom()]);
                    println!("top {}", shown[lat.top()]);
                }
            } else {
                let all = all_congruences_bounded(&g, bound).map_err(|e| e.to_string())?;
                if structured {
                    println!("count {}", all.len());
                    for c in &all {
                        println!("congruence {}", c.display(&g));
                    }
                } else {
                    println!("{} congruences", all.len());
                    for c in &all {
                        println!("{}", c.display(&g));
                    }
                }
            }
            ok
        }
        Command::Quotient { file, theta } => {
            let g = load(&file)?;
            let partition = Partition::parse(&g, &theta)
                .map_err(|e| format!("--theta: {e}"))?;
            let congruence = Congruence::new(&g, partition).map_err(|v| {
                format!(
                    "--theta is not a congruence: {} and {} share a class but their \
                     options fall into different classes",
                    g.label(v.pair.0),
                    g.label(v.pair.1)
                )
            })?;
            let q = quotient(&g, &congruence).expect("validated against the same graph");
            header(structured, "quotient");
            emit_graph(structured, &q.graph);
            ok
        }
        Command::Values { file } => {
            let g = load(&file)?;
            let v = valuation(&g);
            header(structured, "values");
            let prefix = if structured { "value " } else { "" };
            for p in 0..g.position_count() {
                println!(
                    "{prefix}{} {} {} {}",
                    g.label(p),
                    v.outcomes[p],
                    v.remoteness[p],
                    v.nim[p]
                );
            }
            ok
        }
        Command::Map { source, target, map } => {
            let src = load(&source)?;
            let tgt = load(&target)?;
            let text = fs::read_to_string(&map)
                .map_err(|e| format!("{}: {e}", map.display()))?;
            let mut f = OptionMap::parse(src, tgt, &text)
                .map_err(|e| format!("{}: {e}", map.display()))?;
            header(structured, "map");
            if let Err(violation) = f.verify() {
                if structured {
                    println!("verified false");
                    println!("witness {}", f.explain_violation(&violation));
                } else {
                    println!("map does not verify");
                    println!("{}", f.explain_violation(&violation));
                }
                return falsified;
            }
            let kernel = f.kernel().expect("verified");
            let image = f.image().expect("verified");
            let witness = first_iso_witness(&f).expect("verified");
            if structured {
                println!("verified true");
                for p in 0..f.source().position_count() {
                    println!(
                        "map {} {}",
                        f.source().label(p),
                        f.target().label(f.apply(p))
                    );
                }
                println!("kernel {}", kernel.display(f.source()));
                for &m in image.members() {
                    println!("image {}", f.target().label(m));
                }
                let iso = &witness.iso;
                for p in 0..iso.source().position_count() {
                    println!(
                        "iso {} {}",
                        iso.source().label(p),
                        iso.target().label(iso.apply(p))
                    );
                }
            } else {
                println!("map verifies");
                emit_map(&f);
                println!("kernel {}", kernel.display(f.source()));
                println!(
                    "image {}",
                    joined_or_dash(&labels_of(f.target(), image.members()))
                );
                println!("quotient by the kernel matches the image:");
                emit_map(&witness.iso);
            }
            ok
        }
        Command::Sum { left, right, separator } => {
            let a = load(&left)?;
            let b = load(&right)?;
            let s = sum_with_separator(&a, &b, separator).map_err(|e| e.to_string())?;
            header(structured, "sum");
            emit_graph(structured, &s.graph);
            ok
        }
        Command::Iso { left, right } => {
            let a = load(&left)?;
            let b = load(&right)?;
            header(structured, "iso");
            match find_isomorphism(&a, &b) {
                Some(f) => {
                    if structured {
                        println!("isomorphic true");
                        for p in 0..a.position_count() {
                            println!("map {} {}", a.label(p), b.label(f.apply(p)));
                        }
                    } else {
                        println!("isomorphic");
                        emit_map(&f);
                    }
                    ok
                }
                None => {
                    if structured {
                        println!("isomorphic false");
                    } else {
                        println!("not isomorphic");
                    }
                    falsified
                }
            }
        }
        Command::EnumerateSimple { n, jobs, long_running, checkpoint, progress, dump } => {
            let sweep = || -> Result<EnumerationReport, String> {
                if long_running {
                    let options = RunOptions {
                        checkpoint,
                        progress,
                        ..RunOptions::default()
                    };
                    count_simple_unbounded(n, &options).map_err(|e| e.to_string())
                } else {
                    count_simple(n).map_err(|e| {
                        format!("{e}; pass --long-running for sweeps up to 6 positions")
                    })
                }
            };
            let report = match jobs {
                Some(k) => rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| e.to_string())?
                    .install(sweep),
                None => sweep(),
            }?;
            header(structured, "enumerate-simple");
            if structured {
                println!("positions {}", report.positions);
                println!("labeled-total {}", report.labeled_total);
                println!("simple-labeled {}", report.simple_labeled);
                println!("simple-up-to-iso {}", report.simple_up_to_iso);
            } else {
                println!("positions {}", report.positions);
                println!("labeled total {}", report.labeled_total);
                println!("simple labeled {}", report.simple_labeled);
                println!("simple up to isomorphism {}", report.simple_up_to_iso);
            }
            // wall time varies run to run, so it goes to stderr: stdout
            // stays byte-stable for golden files
            eprintln!("elapsed {:?}", report.elapsed);
            if let Some(dir) = dump {
                let reps = simple_representatives(n).map_err(|e| e.to_string())?;
                fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                let width = reps.len().to_string().len();
                for (i, g) in reps.iter().enumerate() {
                    let name = format!("simple-{n}-{i:0width$}.og");
                    fs::write(dir.join(&name), g.serialize())
                        .map_err(|e| format!("{name}: {e}"))?;
                }
                if structured {
                    println!("dumped {}", reps.len());
                } else {
                    println!("wrote {} graph files to {}", reps.len(), dir.display());
                }
            }
            ok
        }
        Command::VerifyTheorems { file, trials, seed } => {
            let g = load(&file)?;
            let seed = seed.unwrap_or(DEFAULT_SEED);
            let bound = congruence_bound()?;
            let report = verify::run(&g, trials, seed, bound)?;
            header(structured, "verify-theorems");
            if structured {
                println!("seed {seed}");
                println!("trials {trials}");
                for (name, &pass) in verify::THEOREMS.iter().zip(&report.passes) {
                    println!("theorem {name} {pass} {}", trials - pass);
                }
                println!(
                    "result {}",
                    if report.failures() == 0 { "pass" } else { "fail" }
                );
            } else {
                println!("seed {seed}");
                println!("trials {trials}");
                for (name, &pass) in verify::THEOREMS.iter().zip(&report.passes) {
                    println!("{name} {pass}/{trials}");
                }
                if report.failures() == 0 {
                    println!("all theorems hold");
                } else {
                    println!("{} checks failed", report.failures());
                }
            }
            if report.failures() == 0 {
                ok
            } else {
                falsified
            }
        }
        Command::Dot { file, values } => {
            let g = load(&file)?;
            let annotations = values.then(|| {
                let v = valuation(&g);
                (0..g.position_count())
                    .map(|p| {
                        format!(
                            "{}: {} r={} nim={}",
                            g.label(p),
                            v.outcomes[p],
                            v.remoteness[p],
                            v.nim[p]
                        )
                    })
                    .collect::<Vec<String>>()
            });
            print!("{}", g.to_dot(annotations.as_deref()));
            ok
        }
    }
}
