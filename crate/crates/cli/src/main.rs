use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cyclicality::clustering::{
    agglomerative_cluster, divisive_cluster, overlapping_cluster, ClusterError, ClusterMethod,
    ClusterOptions, Clustering, OverlapClustering,
};
use cyclicality::influence::{influence_vector, nonadditivity_witness, InfluenceError};
use cyclicality::ingest::{
    emit_dot, emit_dot_named, emit_report_json, read_matrix_csv, AnalysisReport, IndustryTable,
    ReportContents,
};
use cyclicality::oracle::{enumerate_simple_cycles, OracleError};
use cyclicality::spectral::{
    column_sum_bounds, row_sum_bounds, spectral_radius, trace_radius_estimate, SpectralError,
    SpectralOptions, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use cyclicality::{VertexSet, WeightedDigraph};

mod format;
mod random;

use format::sig6;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cyclicality",
    version,
    about = "Spectral influence and cyclicality of weighted digraphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Relative tolerance of the Perron root computation.
    #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: usize,
    /// Drop loops (diagonal entries) after loading the matrix.
    #[arg(long)]
    zero_diagonal: bool,
}

impl SolverArgs {
    fn spectral(&self) -> SpectralOptions {
        SpectralOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Table,
    Json,
    Dot,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BenchFormat {
    Table,
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Divisive,
    Agglomerative,
}

impl From<Method> for ClusterMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Divisive => ClusterMethod::Divisive,
            Method::Agglomerative => ClusterMethod::Agglomerative,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the spectral radius, its row/column-sum bounds and irreducibility.
    Radius {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Print per-vertex spectral influence (descending) and the cyclicality.
    Influence {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Run divisive or agglomerative cyclicality clustering.
    Cluster {
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Method::Divisive)]
        method: Method,
        /// Also run the overlapping variant on top of the chosen method.
        #[arg(long)]
        overlap: bool,
        /// Comparison slack between cyclicalities.
        #[arg(long, default_value_t = cyclicality::clustering::DEFAULT_EPS, value_parser = positive)]
        eps: f64,
        /// List clusters by decreasing cyclicality instead of extraction order.
        #[arg(long)]
        sort: bool,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Enumerate simple cycles and cross-check the radius against them.
    Oracle {
        /// Matrix file; omit to use a random graph.
        input: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Vertex count of the random graph used when no input is given.
        #[arg(long, default_value_t = 5)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Longest cycle to list (defaults to the vertex count).
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Cyclicality of every `.csv` matrix in a directory.
    Benchmark {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = BenchFormat::Table)]
        format: BenchFormat,
    },
    /// Search random graphs for a subset whose joint radius drop differs from
    /// the sum of single-vertex drops.
    Witness {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive)]
        tol: f64,
    },
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn load(path: &Path, solver: &SolverArgs) -> Result<WeightedDigraph> {
    let g = read_matrix_csv(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(if solver.zero_diagonal {
        g.without_loops()
    } else {
        g
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn spectral_is_numerical(e: &SpectralError) -> bool {
    matches!(
        e,
        SpectralError::NotConverged { .. } | SpectralError::Overflow { .. }
    )
}

fn influence_is_numerical(e: &InfluenceError) -> bool {
    matches!(e, InfluenceError::Spectral(s) if spectral_is_numerical(s))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        let numerical = if let Some(e) = cause.downcast_ref::<SpectralError>() {
            spectral_is_numerical(e)
        } else if let Some(e) = cause.downcast_ref::<InfluenceError>() {
            influence_is_numerical(e)
        } else if let Some(e) = cause.downcast_ref::<ClusterError>() {
            match e {
                ClusterError::DegenerateLoop { .. } => true,
                ClusterError::Influence(i) => influence_is_numerical(i),
                _ => false,
            }
        } else {
            false
        };
        if numerical {
            return EXIT_NUMERICAL;
        }
    }
    EXIT_INPUT
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Radius {
            input,
            solver,
            format,
        } => cmd_radius(&load(&input, &solver)?, &solver, format),
        Command::Influence {
            input,
            solver,
            format,
        } => cmd_influence(&load(&input, &solver)?, &input, &solver, format),
        Command::Cluster {
            input,
            solver,
            method,
            overlap,
            eps,
            sort,
            format,
        } => {
            let g = load(&input, &solver)?;
            let opts = ClusterOptions {
                eps,
                spectral: solver.spectral(),
            };
            cmd_cluster(&g, &input, method.into(), overlap, sort, &opts, format)
        }
        Command::Oracle {
            input,
            solver,
            random,
            seed,
            max_len,
        } => {
            let g = match input {
                Some(path) => load(&path, &solver)?,
                None => random::graph(random, seed)?,
            };
            cmd_oracle(&g, &solver, max_len)
        }
        Command::Benchmark {
            dir,
            solver,
            format,
        } => cmd_benchmark(&dir, &solver, format),
        Command::Witness {
            n,
            trials,
            seed,
            tol,
        } => cmd_witness(n, trials, seed, tol),
    }
}

fn cmd_radius(g: &WeightedDigraph, solver: &SolverArgs, format: Format) -> Result<ExitCode> {
    let r = spectral_radius(g, &solver.spectral())?;
    let rows = row_sum_bounds(g);
    let cols = column_sum_bounds(g);
    let irreducible = g.is_irreducible();
    match format {
        Format::Table => {
            println!("spectral radius: {}", sig6(r.radius));
            println!("row sums:        [{}, {}]", sig6(rows.min), sig6(rows.max));
            println!("column sums:     [{}, {}]", sig6(cols.min), sig6(cols.max));
            println!("irreducible:     {irreducible}");
            println!("iterations:      {}", r.iterations);
        }
        Format::Json => {
            let v = serde_json::json!({
                "radius": r.radius,
                "row_sum_min": rows.min,
                "row_sum_max": rows.max,
                "column_sum_min": cols.min,
                "column_sum_max": cols.max,
                "irreducible": irreducible,
                "iterations": r.iterations,
                "residual": r.residual,
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        Format::Dot => bail!("--format dot is not available for radius"),
    }
    Ok(ExitCode::SUCCESS)
}

fn describe(label: &str) -> &str {
    IndustryTable::description(label).unwrap_or("")
}

fn cmd_influence(
    g: &WeightedDigraph,
    input: &Path,
    solver: &SolverArgs,
    format: Format,
) -> Result<ExitCode> {
    let opts = solver.spectral();
    match format {
        Format::Table => {
            let report = influence_vector(g, &opts)?;
            let mut order: Vec<usize> = (0..g.n()).collect();
            order.sort_by(|&a, &b| report.per_vertex[b].total_cmp(&report.per_vertex[a]));
            let width = g.labels().iter().map(String::len).max().unwrap_or(0).max(6);
            println!("{:>4}  {:<width$}  {:>12}", "rank", "vertex", "influence");
            for (rank, &i) in order.iter().enumerate() {
                let label = &g.labels()[i];
                let line = format!(
                    "{:>4}  {:<width$}  {:>12}  {}",
                    rank + 1,
                    label,
                    sig6(report.per_vertex[i]),
                    describe(label)
                );
                println!("{}", line.trim_end());
            }
            println!("cyclicality: {}", sig6(report.cyclicality));
            println!("radius:      {}", sig6(report.base_radius));
        }
        Format::Json => {
            let report = AnalysisReport::build(
                g,
                Some(input.display().to_string()),
                &ReportContents::influence_only(),
                &ClusterOptions {
                    spectral: opts,
                    ..Default::default()
                },
            )?;
            emit_report_json(&report, std::io::stdout().lock())?;
        }
        Format::Dot => {
            let report = influence_vector(g, &opts)?;
            emit_dot(
                g,
                &VertexSet::full(g.n()),
                &report,
                std::io::stdout().lock(),
            )?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn member_list(g: &WeightedDigraph, s: &VertexSet) -> String {
    s.iter()
        .map(|i| g.labels()[i].as_str())
        .collect::<Vec<_>>()
        .join(", ")
}

fn print_partition(g: &WeightedDigraph, c: &Clustering, sort: bool) {
    println!("{} clustering: {} clusters", c.method, c.len());
    let order: Vec<usize> = if sort {
        c.order_by_cyclicality()
    } else {
        (0..c.len()).collect()
    };
    for (pos, &k) in order.iter().enumerate() {
        let tag = if c.singleton_flags[k] {
            "ι".to_string()
        } else {
            format!("S={}", sig6(c.per_cluster_cyclicality[k]))
        };
        println!(
            "{:>4}  {:<14}  {}",
            pos + 1,
            tag,
            member_list(g, &c.clusters[k])
        );
    }
}

fn print_overlap(g: &WeightedDigraph, o: &OverlapClustering) {
    println!(
        "overlapping {} clustering: {} clusters, {} rounds",
        o.base,
        o.clusters.len(),
        o.rounds
    );
    for k in 0..o.clusters.len() {
        let tag = if o.clusters[k].len() == 1 {
            "ι".to_string()
        } else {
            format!("S={}", sig6(o.per_cluster_cyclicality[k]))
        };
        let end = if o.terminal[k] { "  (terminal)" } else { "" };
        println!(
            "{:>4}  {:<14}  residual S={:<10}  {}{}",
            k + 1,
            tag,
            sig6(o.residual_cyclicality[k]),
            member_list(g, &o.clusters[k]),
            end
        );
    }
}

fn dot_cluster(
    g: &WeightedDigraph,
    s: &VertexSet,
    name: &str,
    opts: &SpectralOptions,
) -> Result<()> {
    let sub = g.restrict_to(s)?;
    let report = influence_vector(&sub, opts)?;
    emit_dot_named(g, s, &report, name, std::io::stdout().lock())?;
    Ok(())
}

fn cmd_cluster(
    g: &WeightedDigraph,
    input: &Path,
    method: ClusterMethod,
    overlap: bool,
    sort: bool,
    opts: &ClusterOptions,
    format: Format,
) -> Result<ExitCode> {
    match format {
        Format::Json => {
            let contents = ReportContents {
                divisive: method == ClusterMethod::Divisive,
                agglomerative: method == ClusterMethod::Agglomerative,
                overlapping: if overlap { vec![method] } else { Vec::new() },
            };
            let report =
                AnalysisReport::build(g, Some(input.display().to_string()), &contents, opts)?;
            emit_report_json(&report, std::io::stdout().lock())?;
        }
        Format::Table => {
            let c = match method {
                ClusterMethod::Divisive => divisive_cluster(g, opts)?,
                ClusterMethod::Agglomerative => agglomerative_cluster(g, opts)?,
            };
            print_partition(g, &c, sort);
            if overlap {
                println!();
                print_overlap(g, &overlapping_cluster(g, method, opts)?);
            }
        }
        Format::Dot => {
            let clusters = if overlap {
                overlapping_cluster(g, method, opts)?.clusters
            } else {
                let c = match method {
                    ClusterMethod::Divisive => divisive_cluster(g, opts)?,
                    ClusterMethod::Agglomerative => agglomerative_cluster(g, opts)?,
                };
                if sort {
                    c.order_by_cyclicality()
                        .into_iter()
                        .map(|k| c.clusters[k].clone())
                        .collect()
                } else {
                    c.clusters
                }
            };
            for (k, s) in clusters.iter().enumerate() {
                dot_cluster(g, s, &format!("cluster_{}", k + 1), &opts.spectral)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

const ORACLE_CHECK_SLACK: f64 = 1e-8;
const LISTED_CYCLES: usize = 50;

fn cmd_oracle(
    g: &WeightedDigraph,
    solver: &SolverArgs,
    max_len: Option<usize>,
) -> Result<ExitCode> {
    let max_len = max_len.unwrap_or(g.n());
    let catalog = match enumerate_simple_cycles(g, max_len) {
        Ok(c) => c,
        Err(e @ OracleError::TooLarge(_)) => bail!(e),
        Err(e) => return Err(e.into()),
    };
    let radius = spectral_radius(g, &solver.spectral())?.radius;
    let fmt_cycle = |vs: &[usize]| {
        let mut names: Vec<&str> = vs.iter().map(|&i| g.labels()[i].as_str()).collect();
        names.push(names[0]);
        names.join(" -> ")
    };

    println!("vertices: {}", g.n());
    println!("spectral radius: {}", sig6(radius));
    if catalog.cycles.is_empty() {
        println!("no cycles");
    } else {
        println!(
            "simple cycles (length <= {max_len}): {}",
            catalog.cycles.len()
        );
        for c in catalog.cycles.iter().take(LISTED_CYCLES) {
            println!(
                "  len {:>2}  value {:>12}  geo-mean {:>10}  {}",
                c.len(),
                sig6(c.value),
                sig6(c.geo_mean),
                fmt_cycle(&c.vertices)
            );
        }
        if catalog.cycles.len() > LISTED_CYCLES {
            println!("  ... {} more", catalog.cycles.len() - LISTED_CYCLES);
        }
    }

    println!("trace estimate (Tr W^m)^(1/m):");
    for m in [1, 2, 4, 8, 16, 32, 64, 128, 256] {
        let est = trace_radius_estimate(g, m)?;
        println!("  m = {m:>3}  {}", sig6(est));
    }

    let Some(dom) = catalog.dominant_cycle() else {
        if radius == 0.0 {
            println!("check: radius is 0 for an acyclic graph: PASSED");
            return Ok(ExitCode::SUCCESS);
        }
        println!("check: radius {} without cycles: FAILED", sig6(radius));
        return Ok(ExitCode::FAILURE);
    };
    println!(
        "dominant cycle: {}  (geo-mean {})",
        fmt_cycle(&dom.vertices),
        sig6(dom.geo_mean)
    );
    if radius >= dom.geo_mean - ORACLE_CHECK_SLACK {
        println!("check: radius >= dominant geo-mean: PASSED");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("check: radius >= dominant geo-mean: FAILED");
        Ok(ExitCode::FAILURE)
    }
}

struct BenchRow {
    name: String,
    labels: Vec<String>,
    radius: f64,
    cyclicality: f64,
    influence: Vec<f64>,
}

fn cmd_benchmark(dir: &Path, solver: &SolverArgs, format: BenchFormat) -> Result<ExitCode> {
    use rayon::prelude::*;

    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    files.sort();

    let opts = solver.spectral();
    let rows: Vec<BenchRow> = files
        .par_iter()
        .map(|path| -> Result<BenchRow> {
            let g = load(path, solver)?;
            let r = influence_vector(&g, &opts)
                .with_context(|| format!("analysing {}", path.display()))?;
            Ok(BenchRow {
                name: path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                labels: g.labels().to_vec(),
                radius: r.base_radius,
                cyclicality: r.cyclicality,
                influence: r.per_vertex,
            })
        })
        .collect::<Result<_>>()?;

    match format {
        BenchFormat::Table => {
            let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(4);
            println!("{:<width$}  {:>12}", "name", "cyclicality");
            for r in &rows {
                println!("{:<width$}  {:>12}", r.name, sig6(r.cyclicality));
            }
        }
        BenchFormat::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "name": r.name,
                        "cyclicality": r.cyclicality,
                        "radius": r.radius,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&v)?);
        }
        BenchFormat::Csv => {
            if let Some(first) = rows.first() {
                if let Some(other) = rows.iter().find(|r| r.labels != first.labels) {
                    bail!(
                        "{} and {} have different vertex labels; csv output needs a common layout",
                        first.name,
                        other.name
                    );
                }
            }
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            let mut header = vec!["name".to_string(), "cyclicality".to_string()];
            if let Some(first) = rows.first() {
                header.extend(first.labels.iter().cloned());
            }
            w.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![r.name.clone(), r.cyclicality.to_string()];
                rec.extend(r.influence.iter().map(f64::to_string));
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_witness(n: usize, trials: usize, seed: u64, tol: f64) -> Result<ExitCode> {
    let w = nonadditivity_witness(n, trials, seed, &SpectralOptions::with_tol(tol))?;
    println!("subset: {}", w.subset);
    println!("sum of single-vertex drops: {}", sig6(w.sum_of_parts));
    println!("joint drop:                 {}", sig6(w.whole));
    println!("gap:                        {}", sig6(w.gap));
    println!("matrix:");
    for row in w.graph.to_rows() {
        let cells: Vec<String> = row.iter().map(|&x| sig6(x)).collect();
        println!("  {}", cells.join(", "));
    }
    Ok(ExitCode::SUCCESS)
}
