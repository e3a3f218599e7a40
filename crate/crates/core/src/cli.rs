//! Command-line front end. Verdicts and data go to stdout, prose to stderr.
//!
//! Exit codes: 0 yes/success, 1 no, 2 timeout or budget exhausted,
//! 64 usage, file or parse error.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::decomp::{verify, BoundSpec, EdgeLabeling};
use crate::factor::{solve_factor, FactorInstance};
use crate::gadgets::{
    brute_sat, build_alpha_gadget, build_forcer, check_alpha_gadget, check_forcer_property, reduce_3b2_to_infk,
    reduce_3b2_to_k1, reduce_nae_to_kl, witness_from_assignment, Cnf, ForcerKind,
};
use crate::girth9::{
    discharging_audit, experiment_girth9, standard_corpus, subdivide_all, subdivide_with_rotation, CorpusMember,
    ExperimentOutcome,
};
use crate::graph::{parse_graph, serialize_graph, MultiGraph, RotationSystem};
use crate::oracle::{enumerate_with, solve_exact_parallel, Outcome, SearchOptions};
use crate::poly21::{build_factor_instance, decompose_paths, solve21, NoReason, Solve21};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "linforest", version, about = "Bounded linear forest decompositions of multigraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GadgetKind {
    Long1,
    Short1,
    Short,
    Long,
    Symmetric,
    Longinf,
    Pathforcer,
    Alpha,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReduceVariant {
    K1,
    Infk,
    Kl,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a (k,l)-decomposition with the exact search.
    Solve {
        /// "k,l"; either bound may be "inf".
        #[arg(long)]
        bounds: BoundSpec,
        /// Search node budget.
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        file: PathBuf,
    },
    /// Decide a (2,1)-decomposition in polynomial time.
    Solve21 {
        /// Write the intermediate degree-set instance to this path.
        #[arg(long)]
        emit_factor: Option<PathBuf>,
        file: PathBuf,
    },
    /// Check a labeling against a graph.
    Verify {
        #[arg(long)]
        bounds: BoundSpec,
        graph: PathBuf,
        labeling: PathBuf,
    },
    /// List decompositions up to permuting parallel edges, one per line as
    /// a string of A/B indexed by edge id.
    Enumerate {
        #[arg(long)]
        bounds: BoundSpec,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        file: PathBuf,
    },
    /// Solve a degree-set factor instance; prints selected edge ids.
    Factor { file: PathBuf },
    /// Build a forcer or an attachment gadget.
    Gadget {
        #[arg(long)]
        kind: GadgetKind,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        /// Attachment vertex count for the attachment gadget.
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        /// Also check the gadget's defining property by enumeration.
        #[arg(long)]
        check: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the reduction graph of a DIMACS formula.
    Reduce {
        #[arg(long)]
        variant: ReduceVariant,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the labeling built from a satisfying assignment here.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Run the girth-9 experiment on a corpus directory of embedded graphs,
    /// or on the built-in corpus.
    Girth9 {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        budget: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Charge audit of an embedded graph.
    Audit { file: PathBuf },
    /// Subdivide every edge `t` times.
    Subdivide {
        #[arg(short)]
        t: usize,
        input: PathBuf,
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Res = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<(MultiGraph, Option<RotationSystem>), Failure> {
    parse_graph(&read(path)?).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(format!("{}: {e}", p.display()))),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_YES
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn forcer_kind(kind: GadgetKind, k: Option<usize>, l: Option<usize>) -> Result<ForcerKind, Failure> {
    let need = |x: Option<usize>, name: &str| x.ok_or_else(|| Failure(format!("--{name} is required")));
    Ok(match kind {
        GadgetKind::Long1 => ForcerKind::Long1,
        GadgetKind::Short1 => ForcerKind::Short1,
        GadgetKind::Short => ForcerKind::Short { k: need(k, "k")?, l: need(l, "l")? },
        GadgetKind::Long => ForcerKind::Long { k: need(k, "k")?, l: need(l, "l")? },
        GadgetKind::Symmetric => ForcerKind::Symmetric { k: need(k, "k")? },
        GadgetKind::Longinf => ForcerKind::LongInf { k: need(k, "k")? },
        GadgetKind::Pathforcer => ForcerKind::PathForcer { k: need(k, "k")? },
        GadgetKind::Alpha => unreachable!(),
    })
}

fn load_corpus(dir: &Path) -> Result<Vec<CorpusMember>, Failure> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Failure(format!("{}: {e}", dir.display())))?
        .filter_map(|d| d.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "graph"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let (g, rot) = read_graph(p)?;
            let rot = rot.ok_or_else(|| Failure(format!("{}: rotation block required", p.display())))?;
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            Ok(CorpusMember { name, g, rot })
        })
        .collect()
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Res {
    match cmd {
        Command::Solve { bounds, budget, workers, file } => {
            let (g, _) = read_graph(&file)?;
            let res = solve_exact_parallel(&g, &bounds, budget, workers);
            writeln!(err, "nodes explored: {}", res.nodes)?;
            Ok(match res.outcome {
                Outcome::Yes(lab) => {
                    write!(out, "{}", lab.to_text())?;
                    EXIT_YES
                }
                Outcome::No => {
                    writeln!(out, "NO")?;
                    EXIT_NO
                }
                Outcome::Timeout => {
                    writeln!(out, "TIMEOUT")?;
                    EXIT_TIMEOUT
                }
            })
        }
        Command::Solve21 { emit_factor, file } => {
            let (g, _) = read_graph(&file)?;
            if let Some(path) = emit_factor {
                if g.max_degree() <= 3 {
                    let ps = decompose_paths(&g)?;
                    let build = build_factor_instance(&g, &ps);
                    write_or_print(Some(&path), &build.inst.to_text(), out)?;
                } else {
                    writeln!(err, "no factor instance: maximum degree exceeds 3")?;
                }
            }
            Ok(match solve21(&g)? {
                Solve21::Yes(lab) => {
                    write!(out, "{}", lab.to_text())?;
                    EXIT_YES
                }
                Solve21::No(reason) => {
                    match reason {
                        NoReason::DegreeAtLeast4(v) => writeln!(err, "vertex {v} has degree >= 4")?,
                        NoReason::FactorInfeasible => writeln!(err, "degree-set instance has no solution")?,
                    }
                    writeln!(out, "NO")?;
                    EXIT_NO
                }
            })
        }
        Command::Verify { bounds, graph, labeling } => {
            let (g, _) = read_graph(&graph)?;
            let lab = EdgeLabeling::parse(&read(&labeling)?, g.edge_count())?;
            Ok(match verify(&g, &lab, &bounds) {
                Ok(()) => {
                    writeln!(out, "OK")?;
                    EXIT_YES
                }
                Err(v) => {
                    writeln!(err, "{v}")?;
                    writeln!(out, "INVALID")?;
                    EXIT_NO
                }
            })
        }
        Command::Enumerate { bounds, limit, budget, file } => {
            let (g, _) = read_graph(&file)?;
            let en = enumerate_with(&g, &bounds, limit, budget, SearchOptions::default());
            for lab in &en.labelings {
                let line: String = lab.0.iter().map(|p| p.to_string()).collect();
                writeln!(out, "{line}")?;
            }
            let state = if en.complete {
                "complete"
            } else if en.timed_out {
                "budget exhausted"
            } else {
                "limit reached"
            };
            writeln!(err, "{} decomposition(s), {state}, {} nodes", en.labelings.len(), en.nodes)?;
            Ok(if en.timed_out { EXIT_TIMEOUT } else { EXIT_YES })
        }
        Command::Factor { file } => {
            let inst = FactorInstance::parse(&read(&file)?)?;
            Ok(match solve_factor(&inst)? {
                Some(sel) => {
                    let ids: Vec<String> = sel.iter().map(|e| e.to_string()).collect();
                    writeln!(out, "{}", ids.join(" "))?;
                    EXIT_YES
                }
                None => {
                    writeln!(out, "NO")?;
                    EXIT_NO
                }
            })
        }
        Command::Gadget { kind, k, l, alpha, check, output } => {
            let (built, report) = match kind {
                GadgetKind::Alpha => {
                    let (k, l) = (k.unwrap_or(2), l.unwrap_or(2));
                    let g = build_alpha_gadget(alpha, k, l)?;
                    (g, if check { Some(check_alpha_gadget(alpha, k, l)?) } else { None })
                }
                _ => {
                    let fk = forcer_kind(kind, k, l)?;
                    let g = build_forcer(fk)?;
                    (g, if check { Some(check_forcer_property(fk, &fk.default_bounds())?) } else { None })
                }
            };
            for (name, v) in &built.roles {
                writeln!(err, "{name} = {v}")?;
            }
            let text = serialize_graph(&built.g, None);
            write_or_print(output.as_deref(), &text, out)?;
            Ok(match report {
                Some(r) => {
                    write!(err, "{r}")?;
                    if r.passed() {
                        EXIT_YES
                    } else {
                        EXIT_NO
                    }
                }
                None => EXIT_YES,
            })
        }
        Command::Reduce { variant, k, l, input, output, witness } => {
            let cnf = Cnf::parse_dimacs(&read(&input)?)?;
            let red = match (variant, &cnf) {
                (ReduceVariant::K1, Cnf::ThreeB2(f)) => reduce_3b2_to_k1(f),
                (ReduceVariant::Infk, Cnf::ThreeB2(f)) => reduce_3b2_to_infk(f, k.unwrap_or(2))?,
                (ReduceVariant::Kl, Cnf::Mnae(f)) => reduce_nae_to_kl(f, k.unwrap_or(2), l.unwrap_or(2))?,
                _ => return Err(Failure("formula flavor does not match the variant".into())),
            };
            writeln!(err, "bounds {}: {} vertices, {} edges", red.bounds(), red.g.vertex_count(), red.g.edge_count())?;
            write_or_print(output.as_deref(), &serialize_graph(&red.g, None), out)?;
            if let Some(path) = witness {
                let Some(phi) = brute_sat(&cnf)? else {
                    writeln!(err, "formula is unsatisfiable; no witness")?;
                    return Ok(EXIT_NO);
                };
                let lab = witness_from_assignment(&red, &phi)?;
                write_or_print(Some(&path), &lab.to_text(), out)?;
            }
            Ok(EXIT_YES)
        }
        Command::Girth9 { corpus, budget, workers } => {
            let members = match corpus {
                Some(dir) => load_corpus(&dir)?,
                None => standard_corpus(),
            };
            let report = pool(workers)?.install(|| experiment_girth9(&members, budget));
            write!(err, "{report}")?;
            let mut code = EXIT_YES;
            for r in &report.rows {
                let verdict = match r.outcome {
                    ExperimentOutcome::Yes => "yes",
                    ExperimentOutcome::No => {
                        code = EXIT_NO;
                        "no"
                    }
                    ExperimentOutcome::Timeout => {
                        if code == EXIT_YES {
                            code = EXIT_TIMEOUT;
                        }
                        "timeout"
                    }
                };
                writeln!(out, "{} {verdict}", r.name)?;
            }
            Ok(code)
        }
        Command::Audit { file } => {
            let (g, rot) = read_graph(&file)?;
            let rot = rot.ok_or_else(|| Failure(format!("{}: rotation block required", file.display())))?;
            let rep = discharging_audit(&g, &rot);
            write!(err, "{rep}")?;
            let mut s = String::new();
            for (i, c) in rep.components.iter().enumerate() {
                writeln!(s, "component {i} initial {} expected {}", c.initial, c.expected)?;
            }
            writeln!(s, "total_initial {}", rep.total_initial)?;
            writeln!(s, "total_final {}", rep.total_final)?;
            writeln!(s, "euler {}", if rep.euler_consistent { "ok" } else { "violated" })?;
            writeln!(s, "hypotheses {}", if rep.hypotheses_hold() { "hold" } else { "fail" })?;
            writeln!(s, "negative_faces {}", rep.negative_faces().len())?;
            writeln!(s, "negative_vertices {}", rep.negative_vertices().len())?;
            out.write_all(s.as_bytes())?;
            Ok(if rep.euler_consistent && rep.consistent() { EXIT_YES } else { EXIT_NO })
        }
        Command::Subdivide { t, input, output } => {
            let (g, rot) = read_graph(&input)?;
            let text = match rot {
                Some(r) => {
                    let (h, hr) = subdivide_with_rotation(&g, &r, t);
                    serialize_graph(&h, Some(&hr))
                }
                None => serialize_graph(&subdivide_all(&g, t), None),
            };
            write_or_print(output.as_deref(), &text, out)?;
            Ok(EXIT_YES)
        }
    }
}
