//! Command-line surface: PACE-format ingestion, partition construction and
//! verification, the quasi-isometry pipeline, exact small-graph oracles,
//! and JSON artifact emission.
//!
//! Exit codes: 0 success/verified, 1 verified-false (a checker found
//! violations), 2 semantic violation or refusal (invalid decomposition,
//! over-budget oracle input, failed precondition), 3 unusable input
//! (parse or I/O error).
//!
//! Vertex ids are 1-based in PACE files and 0-based in JSON artifacts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use twpart::compress::{build_compressing, verify_result};
use twpart::decomp::{
    heuristic_pd, heuristic_td, is_path_decomposition, EliminationStrategy,
    RootedTreeDecomposition, TreeDecomposition,
};
use twpart::gen;
use twpart::oracles::{
    counterexample_check, exact_pathwidth, exact_treewidth, OracleError, SmallGraphBudget,
    WidthWitness,
};
use twpart::pace;
use twpart::qi::{check_qi, qi_to_bounded_width_pipeline, PipelineMode, QiDoc, QuasiIsometryMap};
use twpart::{Graph, Scalar};

const EXIT_OK: u8 = 0;
const EXIT_VERIFIED_FALSE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;
const EXIT_UNUSABLE_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "twpart",
    version,
    about = "Compressing partitions guided by tree-decompositions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Treewidth,
    Pathwidth,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    /// Erdős–Rényi with the given density
    Er,
    /// partial k-tree (see --k, --delete)
    Ktree,
    /// uniform random tree
    Tree,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a tree-decomposition (.td) against a graph (.gr)
    Validate { gr: PathBuf, td: PathBuf },
    /// Build a compressing partition and verify every claimed bound
    Compress {
        gr: PathBuf,
        td: PathBuf,
        /// compression level, a nonnegative rational (`p/q` or integer)
        #[arg(long)]
        ell: String,
        /// root bag id, 1-based
        #[arg(long, default_value_t = 1)]
        root: usize,
        /// write the JSON artifact here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a quasi-isometry to a bounded-width graph into a certified
    /// proper partition
    Pipeline {
        /// source graph G (.gr)
        gr_g: PathBuf,
        /// target graph H (.gr)
        gr_h: PathBuf,
        /// quasi-isometry map (.json)
        qi: PathBuf,
        /// decomposition of H (.td)
        td_h: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Treewidth)]
        mode: ModeArg,
        /// root bag id, 1-based
        #[arg(long, default_value_t = 1)]
        root: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive connected-partition search on the binary tree of height d+1
    Counterexample {
        #[arg(long)]
        d: usize,
    },
    /// Exact treewidth of a small graph, with a witness decomposition
    ExactTw {
        gr: PathBuf,
        /// write the witness decomposition here
        #[arg(long)]
        td_out: Option<PathBuf>,
    },
    /// Exact pathwidth of a small graph, with a witness decomposition
    ExactPw {
        gr: PathBuf,
        #[arg(long)]
        td_out: Option<PathBuf>,
    },
    /// Emit the ell-th power of a graph in .gr format
    Power {
        gr: PathBuf,
        #[arg(long)]
        ell: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the quasi-isometry conditions of a map
    QiVerify {
        gr_g: PathBuf,
        gr_h: PathBuf,
        qi: PathBuf,
    },
    /// Generate a deterministic random instance (.gr plus optional .td)
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = GenKind::Er)]
        kind: GenKind,
        /// edge density for --kind er
        #[arg(long, default_value_t = 0.15)]
        density: f64,
        /// clique parameter for --kind ktree
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// edge deletion probability for --kind ktree
        #[arg(long, default_value_t = 0.3)]
        delete: f64,
        /// output graph path
        #[arg(long)]
        gr: PathBuf,
        /// also write a heuristic decomposition here
        #[arg(long)]
        td: Option<PathBuf>,
        /// make the decomposition path-shaped
        #[arg(long)]
        path_decomposition: bool,
    },
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

fn read_gr(path: &Path) -> Result<Graph, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_UNUSABLE_INPUT
    })?;
    pace::parse_gr(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_UNUSABLE_INPUT
    })
}

fn read_td(path: &Path) -> Result<TreeDecomposition, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_UNUSABLE_INPUT
    })?;
    pace::parse_td(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_UNUSABLE_INPUT
    })
}

fn read_qi(path: &Path, source_vertices: usize) -> Result<QuasiIsometryMap, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_UNUSABLE_INPUT
    })?;
    let doc: QiDoc = serde_json::from_str(&text).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_UNUSABLE_INPUT
    })?;
    QuasiIsometryMap::from_doc(&doc, source_vertices).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        EXIT_VIOLATION
    })
}

fn parse_scalar(text: &str, what: &str) -> Result<Scalar, u8> {
    text.parse().map_err(|e| {
        eprintln!("error: {what}: {e}");
        EXIT_UNUSABLE_INPUT
    })
}

fn parse_root(root: usize, td: &TreeDecomposition) -> Result<usize, u8> {
    if root == 0 || root > td.tree().vertex_count() {
        eprintln!(
            "error: root {root} out of range 1..={}",
            td.tree().vertex_count()
        );
        return Err(EXIT_VIOLATION);
    }
    Ok(root - 1)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), u8> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_UNUSABLE_INPUT
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> u8 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(code) => code,
    }
}

fn dispatch(cli: Cli) -> Result<u8, u8> {
    match cli.command {
        Command::Validate { gr, td } => {
            let g = read_gr(&gr)?;
            let td = read_td(&td)?;
            match td.validate(&g) {
                Ok(width) => {
                    println!("width: {width}");
                    Ok(EXIT_OK)
                }
                Err(violations) => {
                    for v in violations {
                        eprintln!("violation: {v}");
                    }
                    Ok(EXIT_VIOLATION)
                }
            }
        }
        Command::Compress {
            gr,
            td,
            ell,
            root,
            out,
        } => {
            let g = read_gr(&gr)?;
            let td = read_td(&td)?;
            let ell = parse_scalar(&ell, "--ell")?;
            if ell.is_negative() {
                eprintln!("error: --ell must be nonnegative, got {ell}");
                return Err(EXIT_VIOLATION);
            }
            let root = parse_root(root, &td)?;
            let rtd = RootedTreeDecomposition::root_at(td, root).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_VIOLATION
            })?;
            let res = build_compressing(&g, &rtd, &ell).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_VIOLATION
            })?;
            let mut doc = res.to_doc();
            doc.bound = Some(ell.scale(2 * (res.k + 1)));
            let json = serde_json::to_string_pretty(&doc).expect("artifact serialises") + "\n";
            emit(&json, out.as_deref())?;
            let report = verify_result(&g, &rtd, &res, res.k, &ell);
            if report.is_ok() {
                eprintln!(
                    "verdict: ok (width {}, bound {})",
                    res.k,
                    doc.bound.unwrap()
                );
                Ok(EXIT_OK)
            } else {
                eprint!("{report}");
                eprintln!("verdict: FAILED");
                Ok(EXIT_VERIFIED_FALSE)
            }
        }
        Command::Pipeline {
            gr_g,
            gr_h,
            qi,
            td_h,
            mode,
            root,
            out,
        } => {
            let g = read_gr(&gr_g)?;
            let h = read_gr(&gr_h)?;
            let m = read_qi(&qi, g.vertex_count())?;
            let td = read_td(&td_h)?;
            let root = parse_root(root, &td)?;
            let mode = match mode {
                ModeArg::Treewidth => PipelineMode::Treewidth,
                ModeArg::Pathwidth => PipelineMode::Pathwidth,
            };
            let result =
                qi_to_bounded_width_pipeline(&g, &h, &m, &td, root, mode).map_err(|e| {
                    eprintln!("error: {e}");
                    EXIT_VIOLATION
                })?;
            let json =
                serde_json::to_string_pretty(&result.to_doc()).expect("artifact serialises") + "\n";
            emit(&json, out.as_deref())?;
            if result.report.is_ok() {
                eprintln!(
                    "verdict: ok (width {}, parts {}, bound {})",
                    result.k,
                    result.parts.len(),
                    result.bound
                );
                Ok(EXIT_OK)
            } else {
                eprint!("{}", result.report);
                eprintln!("verdict: FAILED");
                Ok(EXIT_VERIFIED_FALSE)
            }
        }
        Command::Counterexample { d } => {
            let report = counterexample_check(d).map_err(|e| {
                eprintln!("refused: {e}");
                EXIT_VIOLATION
            })?;
            println!(
                "binary tree of height {} ({} vertices): {} connected weak-diameter-{d} partitions examined",
                report.height, report.tree_vertices, report.examined
            );
            match report.refuting_partition {
                None => {
                    println!("no 2-compressing partition exists");
                    Ok(EXIT_OK)
                }
                Some(parts) => {
                    println!("refuting partition found: {parts:?}");
                    Ok(EXIT_VERIFIED_FALSE)
                }
            }
        }
        Command::ExactTw { gr, td_out } => width_oracle_command(&gr, td_out.as_deref(), true),
        Command::ExactPw { gr, td_out } => width_oracle_command(&gr, td_out.as_deref(), false),
        Command::Power { gr, ell, out } => {
            let g = read_gr(&gr)?;
            let ell = parse_scalar(&ell, "--ell")?;
            emit(&pace::write_gr(&g.power(&ell)), out.as_deref())?;
            Ok(EXIT_OK)
        }
        Command::QiVerify { gr_g, gr_h, qi } => {
            let g = read_gr(&gr_g)?;
            let h = read_gr(&gr_h)?;
            let m = read_qi(&qi, g.vertex_count())?;
            let violations = check_qi(&g, &h, &m).map_err(|e| {
                eprintln!("error: {e}");
                EXIT_VIOLATION
            })?;
            if violations.is_empty() {
                println!("ok: {}-quasi-isometry verified", m.c());
                Ok(EXIT_OK)
            } else {
                for v in &violations {
                    eprintln!("violation: {v}");
                }
                Ok(EXIT_VERIFIED_FALSE)
            }
        }
        Command::Gen {
            n,
            seed,
            kind,
            density,
            k,
            delete,
            gr,
            td,
            path_decomposition,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = match kind {
                GenKind::Er => gen::random_graph(n, density, &mut rng),
                GenKind::Ktree => gen::random_partial_ktree(n, k, delete, &mut rng),
                GenKind::Tree => gen::random_tree(n, &mut rng),
            };
            emit(&pace::write_gr(&g), Some(&gr))?;
            if let Some(td_path) = td {
                let td = if path_decomposition {
                    heuristic_pd(&g)
                } else {
                    heuristic_td(&g, EliminationStrategy::MinFill)
                };
                emit(&pace::write_td(&td), Some(&td_path))?;
                eprintln!(
                    "wrote {} and {} (width {})",
                    gr.display(),
                    td_path.display(),
                    td.width()
                );
            } else {
                eprintln!("wrote {}", gr.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn width_oracle_command(gr: &Path, td_out: Option<&Path>, treewidth: bool) -> Result<u8, u8> {
    let g = read_gr(gr)?;
    let budget = SmallGraphBudget::width_oracle();
    let refuse = |e: OracleError| {
        eprintln!("refused: {e}");
        EXIT_VIOLATION
    };
    let WidthWitness {
        width,
        decomposition,
    } = if treewidth {
        exact_treewidth(&g, &budget).map_err(refuse)?
    } else {
        exact_pathwidth(&g, &budget).map_err(refuse)?
    };
    if treewidth {
        println!("treewidth: {width}");
    } else {
        println!("pathwidth: {width}");
        debug_assert!(is_path_decomposition(&decomposition));
    }
    if let Some(path) = td_out {
        emit(&pace::write_td(&decomposition), Some(path))?;
    }
    Ok(EXIT_OK)
}
