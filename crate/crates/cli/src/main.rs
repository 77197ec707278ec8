//! `partition-ot`: enumerate or sample partitions, compute lifted transport
//! distances and distance matrices, and embed them with MDS.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use partition_ot::ensemble::{pairwise_matrix_with_workers, AnnealSign};
use partition_ot::graph::grid_graph;
use partition_ot::io;
use partition_ot::numeric::{parse_decimal, to_f64};
use partition_ot::{
    enumerate_grid_partitions, flip_chain, lifted_distance, mds, BetaSchedule, ChainSpec, Graph,
    MdsOptions, Metric, Partition, Rational, Representation,
};

#[derive(Parser)]
#[command(
    name = "partition-ot",
    version,
    about = "Optimal-transport distances between graph partitions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the graph JSON of a rows x cols grid.
    Grid {
        rows: usize,
        cols: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate all connected k-partitions of a grid with bounded component sizes.
    Enumerate {
        rows: usize,
        cols: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        min: usize,
        #[arg(long)]
        max: usize,
        /// Write the ensemble as JSON lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lifted distance between two partitions.
    Dist {
        #[command(flatten)]
        graph: GraphArgs,
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Pairwise distance matrix of an ensemble.
    Matrix {
        #[command(flatten)]
        graph: GraphArgs,
        /// Ensemble in JSON lines.
        #[arg(long)]
        ensemble: PathBuf,
        #[command(flatten)]
        metric: MetricArgs,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// CSV, or JSON when the path ends in `.json`. Stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Embed a distance matrix with SMACOF.
    Embed {
        /// Matrix as CSV or JSON.
        matrix: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 300)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        /// Start from random coordinates instead of classical scaling.
        #[arg(long)]
        random_init: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample partitions with the single-vertex flip walk.
    Chain {
        #[command(flatten)]
        graph: GraphArgs,
        /// Start partition CSV.
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        stride: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allowed relative population deviation; `inf` disables the check.
        #[arg(long, default_value_t = 0.05)]
        tolerance: f64,
        /// Inverse temperature schedule `step:beta,...`, linear in between.
        #[arg(long, default_value = "")]
        beta: String,
        #[arg(long, value_enum, default_value_t = SignArg::Compact)]
        sign: SignArg,
        /// Vertex populations CSV (`vertex_id,weight`); unit when omitted.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Graph JSON file.
    #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
    graph: Option<PathBuf>,
    /// Use a ROWSxCOLS grid instead of a graph file.
    #[arg(long, value_name = "ROWSxCOLS")]
    grid: Option<String>,
}

#[derive(Args)]
struct MetricArgs {
    #[arg(long, value_enum, default_value_t = MetricArg::Transport)]
    metric: MetricArg,
    /// Creation/destruction price for `unbalanced`; defaults to half the diameter.
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long, value_enum, default_value_t = RepresentationArg::Uniform)]
    representation: RepresentationArg,
    /// Vertex weights CSV (`vertex_id,weight`).
    #[arg(long)]
    weights: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Transport,
    Unbalanced,
    L1,
    Hamming,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepresentationArg {
    Uniform,
    Weighted,
    Unbalanced,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    /// exp(-beta * delta): favors short boundaries.
    Compact,
    /// exp(+beta * delta).
    Literal,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => io::write_atomic(path, contents.as_bytes())
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    if let Some(path) = &args.graph {
        return io::parse_graph_json(&read(path)?)
            .with_context(|| format!("parsing {}", path.display()));
    }
    let spec = args.grid.as_deref().unwrap_or_default();
    let (r, c) = spec
        .split_once(['x', 'X'])
        .with_context(|| format!("--grid expects ROWSxCOLS, got {spec:?}"))?;
    Ok(grid_graph(r.trim().parse()?, c.trim().parse()?)?)
}

impl MetricArgs {
    fn metric(&self, g: &Graph) -> Result<Metric> {
        let lambda = match &self.lambda {
            Some(s) => {
                let l = parse_decimal(s)?;
                if l < Rational::from_integer(0) {
                    bail!("--lambda must be nonnegative");
                }
                Some(l)
            }
            None => None,
        };
        Ok(match self.metric {
            MetricArg::Unbalanced => Metric::Unbalanced {
                lambda: lambda.unwrap_or_else(|| g.diameter_exact() / Rational::from_integer(2)),
            },
            _ if lambda.is_some() => bail!("--lambda only applies to --metric unbalanced"),
            MetricArg::Transport => Metric::Transport,
            MetricArg::L1 => Metric::L1,
            MetricArg::Hamming => Metric::Hamming,
        })
    }

    fn weights(&self, g: &Graph) -> Result<Option<Vec<Rational>>> {
        self.weights
            .as_deref()
            .map(|p| Ok(io::parse_weights_csv(&read(p)?, g.vertex_count())?))
            .transpose()
    }

    fn apply(&self, p: Partition, weights: &Option<Vec<Rational>>) -> Result<Partition> {
        let rep = match self.representation {
            RepresentationArg::Uniform => Representation::BalancedUniform,
            RepresentationArg::Weighted => Representation::BalancedWeighted,
            RepresentationArg::Unbalanced => Representation::Unbalanced,
        };
        if matches!(self.representation, RepresentationArg::Weighted) && weights.is_none() {
            bail!("--representation weighted needs --weights");
        }
        let weights = if matches!(self.representation, RepresentationArg::Uniform) {
            None
        } else {
            weights.clone()
        };
        Ok(p.with_representation(rep, weights)?)
    }
}

fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Grid { rows, cols, out } => {
            let g = grid_graph(rows, cols)?;
            emit(out.as_deref(), &format!("{}\n", io::graph_to_json(&g)))
        }
        Command::Enumerate {
            rows,
            cols,
            k,
            min,
            max,
            out,
        } => {
            let all = enumerate_grid_partitions(rows, cols, k, min, max, true)?;
            if let Some(path) = &out {
                emit(Some(path), &io::ensemble_to_jsonl(&all))?;
            }
            println!("{}", all.len());
            Ok(())
        }
        Command::Dist {
            graph,
            a,
            b,
            metric,
        } => {
            let g = load_graph(&graph)?;
            let weights = metric.weights(&g)?;
            let x = metric.apply(io::parse_partition_csv(&g, &read(&a)?)?, &weights)?;
            let y = metric.apply(io::parse_partition_csv(&g, &read(&b)?)?, &weights)?;
            let m = lifted_distance(&g, &x, &y, metric.metric(&g)?)?;
            let perm: Vec<String> = m.permutation.iter().map(usize::to_string).collect();
            println!("{}", to_f64(&m.value));
            println!("exact {}", format_rational(&m.value));
            println!("permutation {}", perm.join(" "));
            Ok(())
        }
        Command::Matrix {
            graph,
            ensemble,
            metric,
            workers,
            out,
        } => {
            let g = load_graph(&graph)?;
            let weights = metric.weights(&g)?;
            let ens = io::read_ensemble(&g, &read(&ensemble)?)?
                .into_iter()
                .map(|p| metric.apply(p, &weights))
                .collect::<Result<Vec<_>>>()?;
            if workers == Some(0) {
                bail!("--workers must be positive");
            }
            let d = pairwise_matrix_with_workers(&g, &ens, metric.metric(&g)?, workers)?;
            let json = out
                .as_deref()
                .and_then(Path::extension)
                .is_some_and(|e| e.eq_ignore_ascii_case("json"));
            let text = if json {
                format!("{}\n", d.to_json())
            } else {
                d.to_csv()
            };
            emit(out.as_deref(), &text)
        }
        Command::Embed {
            matrix,
            dim,
            seed,
            max_iters,
            eps,
            random_init,
            out,
        } => {
            let d = io::parse_matrix(&read(&matrix)?)?;
            let opts = MdsOptions {
                dim,
                max_iters,
                eps,
                seed,
                random_init,
            };
            let e = mds(&d, &opts)?;
            eprintln!(
                "stress {} after {} iterations",
                e.final_stress, e.iterations
            );
            emit(out.as_deref(), &e.to_csv())
        }
        Command::Chain {
            graph,
            start,
            steps,
            stride,
            seed,
            tolerance,
            beta,
            sign,
            weights,
            out,
        } => {
            let g = load_graph(&graph)?;
            let start = io::parse_partition_csv(&g, &read(&start)?)?;
            let population = weights
                .as_deref()
                .map(|p| -> Result<Vec<f64>> {
                    Ok(io::parse_weights_csv(&read(p)?, g.vertex_count())?
                        .iter()
                        .map(to_f64)
                        .collect())
                })
                .transpose()?;
            let spec = ChainSpec {
                steps,
                stride,
                seed,
                beta: BetaSchedule::parse(&beta)?,
                sign: match sign {
                    SignArg::Compact => AnnealSign::Compact,
                    SignArg::Literal => AnnealSign::Literal,
                },
                tolerance,
                population,
            };
            let samples = flip_chain(&g, &start, &spec)?;
            emit(out.as_deref(), &io::ensemble_to_jsonl(&samples))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
