//! `mrw`: generate the workbench objects, bound monotone rank and replay
//! the desk-scale checks.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input or I/O.

mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use monorank::bounds::{
    cover_lower_bound, flattening_rank, mr_bounds, BoundsOptions, SupportPattern,
    DEFAULT_NODE_BUDGET,
};
use monorank::constructions::{
    correlation_objects, divisibility_tensor, edm, flatten_mk, subsidiary_s, subsidiary_s1,
    CorrelationSpec, DivTensorSpec, EdmSpec, FunctionFSpec,
};
use monorank::io::{
    matrix_to_json, parse_exact_json, parse_matrix_json, parse_rational,
    rational_factorization_to_json, tensor_to_json, ExactObject,
};
use monorank::models::{
    abp_profile_with_budget, comm_table, dcc_exact_2party, default_d_values, quantum_report,
};
use monorank::numkit::{NmfOptions, NonnegFactorization};
use monorank::ratlinalg::RatMatrix;
use monorank::tensor::DenseTensor;

use verify::{run_verify_suite, Scale};

/// Seed used when `--seed` is not given.
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "mrw", version, about = "Monotone-rank workbench")]
struct Cli {
    /// Seed for every stochastic step.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Also write a CSV table (per level, per size or per cell) to this path.
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Emit exact "p/q" strings for rational factorizations.
    #[arg(long, global = true)]
    rational: bool,

    /// Node budget for exact box-cover search.
    #[arg(long, global = true, env = "MRW_BUDGET")]
    budget: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a construction in the shared JSON format.
    Gen {
        #[command(subcommand)]
        object: GenObject,
    },
    /// Exact rank of a matrix, or the flattening ranks of a tensor.
    Rank { input: PathBuf },
    /// Lower and upper bounds on monotone rank.
    Mr {
        input: PathBuf,
        /// Search for float witnesses between the bounds.
        #[arg(long)]
        nmf: bool,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Per-level flattening ranks and monotone lower bounds for f.
    Abp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Quantum correlation pipeline and hidden-variable model.
    Quantum {
        #[arg(long = "N")]
        size: usize,
        /// Sample the exact model this many times.
        #[arg(long, value_name = "TRIALS")]
        simulate: Option<u64>,
    },
    /// Multiparty separation table for the divisibility function.
    Comm {
        #[arg(long)]
        nbits: u32,
        /// Player counts; defaults to the built-in table up to 10^6.
        #[arg(long, value_delimiter = ',')]
        d: Vec<u64>,
    },
    /// Exact two-party deterministic communication complexity.
    Dcc {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Replay every acceptance check.
    Verify {
        #[arg(long, value_enum, default_value_t = Scale::Small)]
        scale: Scale,
        /// Run only these check ids (comma-separated); others are skipped.
        #[arg(long, value_delimiter = ',', value_parser = clap::builder::PossibleValuesParser::new(verify::CHECK_IDS))]
        only: Vec<String>,
    },
    /// Rewrite a matrix or tensor file in canonical form.
    Canon { input: PathBuf },
}

#[derive(Subcommand, Debug)]
enum GenObject {
    /// Squared-distance matrix `(a_j − a_i)²`.
    Edm {
        /// Comma-separated rationals; defaults to 1..=n.
        #[arg(long, value_delimiter = ',', conflicts_with = "n")]
        values: Vec<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Flattening `M_k(f)`.
    Flatten {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
    },
    /// Subsidiary matrix S (or S1).
    Subsidiary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s1: bool,
    },
    /// Divisibility tensor with `n` values per player and `d` players.
    Divtensor {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Correlation matrix P (or the difference matrix b_y − b_x).
    Correlation {
        #[arg(long = "N")]
        size: usize,
        #[arg(long, value_enum, default_value_t = CorrelationPart::P)]
        part: CorrelationPart,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CorrelationPart {
    P,
    Difference,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes to stdout; a closed pipe (`mrw ... | head`) is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

fn print_json(v: &impl Serialize) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    emit(&s)
}

fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn load_exact(path: &Path) -> Result<ExactObject> {
    let parsed =
        parse_exact_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(parsed.value)
}

fn no_table(cli: &Cli) {
    if cli.csv.is_some() {
        log::warn!("this command has no tabular output; --csv ignored");
    }
}

/// Returns whether every check in the command passed.
fn run(cli: &Cli) -> Result<bool> {
    let budget = cli.budget.unwrap_or(DEFAULT_NODE_BUDGET);
    match &cli.command {
        Command::Gen { object } => {
            no_table(cli);
            emit(&generate(object)?)?;
            Ok(true)
        }
        Command::Rank { input } => {
            no_table(cli);
            let out = match load_exact(input)? {
                ExactObject::Matrix(m) => {
                    json!({"rows": m.rows(), "cols": m.cols(), "rank": m.rank()})
                }
                ExactObject::Tensor(t) => {
                    let ranks: Vec<usize> =
                        (0..t.order()).map(|k| t.unfold_rat(k).rank()).collect();
                    json!({"dims": t.dims(), "flatteningRanks": ranks, "maxFlatteningRank": flattening_rank(&t)})
                }
            };
            print_json(&out)?;
            Ok(true)
        }
        Command::Mr {
            input,
            nmf,
            tolerance,
            restarts,
        } => {
            no_table(cli);
            let t = match load_exact(input)? {
                ExactObject::Matrix(m) => DenseTensor::from_matrix(&m),
                ExactObject::Tensor(t) => t,
            };
            let opts = BoundsOptions {
                node_budget: budget,
                nmf: nmf.then(|| NmfOptions {
                    tolerance: *tolerance,
                    restarts: *restarts,
                    ..NmfOptions::default()
                }),
                seed: cli.seed,
            };
            print_json(&mr_bounds(&t, &opts)?)?;
            Ok(true)
        }
        Command::Abp { n, d } => {
            let p = abp_profile_with_budget(*n, *d, budget)?;
            if let Some(path) = &cli.csv {
                write_csv(path, &p.per_level)?;
            }
            let mut v = serde_json::to_value(&p)?;
            v["ratio"] = json!(p.ratio());
            print_json(&v)?;
            Ok(p.rank_bounds_hold && p.mirrored && p.observation1)
        }
        Command::Quantum { size, simulate } => quantum(cli, *size, *simulate, budget),
        Command::Comm { nbits, d } => {
            let ds = if d.is_empty() {
                default_d_values()
            } else {
                d.clone()
            };
            let table = comm_table(*nbits, &ds)?;
            if let Some(path) = &cli.csv {
                write_csv(
                    path,
                    table.iter().map(|r| CommRow {
                        nbits: r.nbits,
                        d: r.d,
                        log_mr_exact: r.log_mr_exact,
                        log_rk_upper: r.log_rk_upper,
                        trivial_protocol_cost: r.trivial_protocol_cost,
                        separation_ratio: r.separation_ratio,
                    }),
                )?;
            }
            print_json(&table)?;
            Ok(table
                .iter()
                .all(|r| r.cross_check.as_ref().is_none_or(|c| c.consistent)))
        }
        Command::Dcc { matrix } => {
            no_table(cli);
            let m = parse_matrix_json(&read(matrix)?)
                .with_context(|| format!("parsing {}", matrix.display()))?
                .value;
            dcc(&m, budget)
        }
        Command::Verify { scale, only } => {
            let report = run_verify_suite(*scale, cli.seed, budget, only);
            if let Some(path) = &cli.csv {
                write_csv(path, &report.checks)?;
            }
            print_json(&report)?;
            Ok(report.all_pass())
        }
        Command::Canon { input } => {
            no_table(cli);
            let parsed = parse_exact_json(&read(input)?)
                .with_context(|| format!("parsing {}", input.display()))?;
            // non-canonical entries were already reported as warnings
            emit(&match parsed.value {
                ExactObject::Matrix(m) => matrix_to_json(&m),
                ExactObject::Tensor(t) => tensor_to_json(&t),
            })?;
            Ok(true)
        }
    }
}

fn generate(object: &GenObject) -> Result<String> {
    Ok(match object {
        GenObject::Edm { values, n } => {
            let spec = match n {
                Some(n) => EdmSpec::arithmetic(*n)?,
                None if values.is_empty() => bail!("give --values or --n"),
                None => EdmSpec::new(
                    values
                        .iter()
                        .map(|s| parse_rational(s).with_context(|| format!("bad rational {s:?}")))
                        .collect::<Result<_>>()?,
                )?,
            };
            matrix_to_json(&edm(&spec))
        }
        GenObject::Flatten { n, d, k } => {
            matrix_to_json(&flatten_mk(&FunctionFSpec::new(*n, *d)?, *k)?)
        }
        GenObject::Subsidiary { n, d, s1 } => {
            let spec = FunctionFSpec::new(*n, *d)?;
            matrix_to_json(&if *s1 {
                subsidiary_s1(&spec)?
            } else {
                subsidiary_s(&spec)?
            })
        }
        GenObject::Divtensor { n, d } => {
            tensor_to_json(&divisibility_tensor(&DivTensorSpec::new(*n, *d)?)?)
        }
        GenObject::Correlation { size, part } => {
            let obj = correlation_objects(&CorrelationSpec::new(*size)?)?;
            matrix_to_json(match part {
                CorrelationPart::P => &obj.p,
                CorrelationPart::Difference => &obj.difference,
            })
        }
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CommRow {
    nbits: u32,
    d: u64,
    log_mr_exact: f64,
    log_rk_upper: f64,
    trivial_protocol_cost: u64,
    separation_ratio: f64,
}

#[derive(Serialize)]
struct CellRow {
    x: usize,
    y: usize,
    p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<f64>,
}

fn factorization_json(
    f: &NonnegFactorization<monorank::ratlinalg::Rational>,
    rational: bool,
) -> Result<Value> {
    if rational {
        Ok(serde_json::from_str(&rational_factorization_to_json(f))?)
    } else {
        let float = NonnegFactorization::new(
            f.dims.clone(),
            f.terms
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|v| v.iter().map(monorank::numkit::Scalar::to_f64).collect())
                        .collect()
                })
                .collect(),
        )?;
        Ok(serde_json::to_value(&float)?)
    }
}

fn quantum(cli: &Cli, size: usize, simulate: Option<u64>, budget: u64) -> Result<bool> {
    let out = quantum_report(size, simulate, cli.seed, budget)?;
    let r = &out.report;
    if let Some(path) = &cli.csv {
        let p = out.p.to_f64_entries();
        write_csv(
            path,
            (0..size * size).map(|i| CellRow {
                x: i / size,
                y: i % size,
                p: p[i],
                empirical: out.sample.as_ref().map(|s| s.empirical[i / size][i % size]),
            }),
        )?;
    }
    let mut v = serde_json::to_value(r)?;
    v["factorization"] = factorization_json(&out.witness, cli.rational)?;
    print_json(&v)?;
    let sim_ok = r.simulation.as_ref().is_none_or(|s| s.tv <= s.tv_threshold);
    Ok(r.zero_diagonal
        && r.symmetric
        && r.sum_is_one
        && r.char_poly_matches
        && r.lower_bound_holds
        && r.reconstruction_error <= 1e-9
        && r.max_deviation <= 1e-9
        && sim_ok)
}

fn dcc(m: &RatMatrix, budget: u64) -> Result<bool> {
    let d = dcc_exact_2party(m)?;
    let rank = m.rank();
    let cover = cover_lower_bound(&SupportPattern::of_matrix(m), budget);
    let log2 = |v: usize| {
        if v == 0 {
            None
        } else {
            Some((v as f64).log2())
        }
    };
    let holds = |v: usize| log2(v).is_none_or(|l| d as f64 >= l);
    let chain = holds(rank) && holds(cover.lower);
    print_json(&json!({
        "D": d,
        "rank": rank,
        "log2Rank": log2(rank),
        "coverLower": cover.lower,
        "coverExact": cover.exact,
        "log2CoverLower": log2(cover.lower),
        "chainHolds": chain,
    }))?;
    Ok(chain)
}
