use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use teirp_core::bench::{buckets_csv, groups_csv, instances_csv, run_dir};
use teirp_core::generate::{generate_micro, parse_source, synthetic_source, transform, write_source, GenConfig, MicroConfig};
use teirp_core::model::io::{read_instance, write_instance};
use teirp_core::oracle::oracle_solve;
use teirp_core::search::{solve, InstanceMeta, SearchStrategy, SolveConfig, SolveReport};
use teirp_core::solution::validate;

/// Branch-and-price for the two-echelon inventory-routing problem.
#[derive(Parser)]
#[command(name = "teirp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write a JSON report.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Report path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the solution inside a report against an instance.
    Validate { instance: PathBuf, report: PathBuf },
    /// Exhaustive search on a micro instance.
    Oracle {
        instance: PathBuf,
        /// Solution JSON path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve every instance of a directory and write CSV tables.
    Bench {
        dir: PathBuf,
        /// Per-instance table; group and bucket tables go next to it.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Build instances.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Search {
    BestFirst,
    LocalDepthFirst,
}

#[derive(Args)]
struct SolverArgs {
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<usize>,
    /// ng-neighbourhood size.
    #[arg(long, default_value_t = 5)]
    kappa: usize,
    #[arg(long, default_value_t = 0.5)]
    half_point: f64,
    #[arg(long, value_enum, default_value = "best-first")]
    search: Search,
    /// Pricing threads.
    #[arg(long)]
    threads: Option<usize>,
    /// Columns returned per pricing call.
    #[arg(long, default_value_t = 50)]
    max_columns: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report zero times so reports compare byte for byte.
    #[arg(long)]
    no_times: bool,
}

impl SolverArgs {
    fn config(&self) -> SolveConfig {
        let mut cfg = SolveConfig {
            search: match self.search {
                Search::BestFirst => SearchStrategy::BestFirst,
                Search::LocalDepthFirst => SearchStrategy::LocalDepthFirst,
            },
            time_limit: self.time_limit,
            node_limit: self.node_limit,
            threads: self.threads,
            record_times: !self.no_times,
            ..SolveConfig::default()
        };
        let p = &mut cfg.colgen.pricing;
        p.kappa = self.kappa;
        p.half_point = self.half_point;
        p.max_columns = self.max_columns;
        p.seed = self.seed;
        cfg
    }
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct GenArgs {
    #[command(subcommand)]
    kind: Option<GenKind>,
    /// Single-echelon source instance to transform.
    #[arg(long)]
    source: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    suppliers: usize,
    #[arg(long, default_value_t = 2)]
    satellites: usize,
    #[arg(long, default_value_t = 2)]
    k2: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Small instance for oracle checks: one supplier, two satellites.
    Micro {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tau: usize,
        #[arg(long, default_value_t = 2)]
        k2: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random single-echelon source instance in the source format.
    Source {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        tau: usize,
        /// High holding costs at the depot.
        #[arg(long)]
        high_holding: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn summary(r: &SolveReport) -> String {
    let f = |v: Option<f64>| v.map_or("-".to_owned(), |x| format!("{x:.6}"));
    format!(
        "status {:?}, objective {}, lb {}, gap {}%, nodes {}, time {:.2}s",
        r.status,
        f(r.objective),
        f(r.lb),
        r.gap_f.map_or("-".to_owned(), |g| format!("{g:.4}")),
        r.nodes,
        r.time_total_sec
    )
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Solve { instance, solver, out } => {
            let inst = read_instance(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let mut report = solve(&inst, &solver.config())?;
            let name = instance.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            report.instance = InstanceMeta { class: name.split('_').next().unwrap_or_default().into(), name, ..report.instance };
            eprintln!("{}", summary(&report));
            emit(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
        }
        Command::Validate { instance, report } => {
            let inst = read_instance(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let text = fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let rep: SolveReport = serde_json::from_str(&text).context("report is not a solve report")?;
            let Some(sol) = rep.solution.as_ref() else { bail!("report carries no solution") };
            let mut violations = validate(&inst, sol);
            if let Some(obj) = rep.objective {
                if (obj - sol.cost).abs() > 1e-6 * obj.abs().max(1.0) {
                    violations.push(format!("reported objective {obj} differs from solution cost {}", sol.cost));
                }
            }
            if violations.is_empty() {
                println!("valid, cost {:.6}", sol.cost);
            } else {
                for v in &violations {
                    println!("{v}");
                }
                return Ok(false);
            }
        }
        Command::Oracle { instance, out } => {
            let inst = read_instance(&instance).with_context(|| format!("reading {}", instance.display()))?;
            let res = oracle_solve(&inst)?;
            println!("objective {:.6} ({} combinations)", res.objective, res.leaves);
            if let Some(p) = out {
                emit(Some(&p), &(serde_json::to_string_pretty(&res.solution)? + "\n"))?;
            }
        }
        Command::Bench { dir, out, solver } => {
            let rows = run_dir(&dir, &solver.config())?;
            for r in &rows {
                match (&r.report, &r.error) {
                    (Some(rep), _) => info!("{}: {}", r.meta.name, summary(rep)),
                    (None, Some(e)) => info!("{}: {e}", r.meta.name),
                    _ => {}
                }
            }
            emit(Some(&out), &instances_csv(&rows)?)?;
            emit(Some(&sibling(&out, "groups")), &groups_csv(&rows)?)?;
            emit(Some(&sibling(&out, "buckets")), &buckets_csv(&rows)?)?;
            eprintln!("{} instances, tables in {}", rows.len(), out.display());
        }
        Command::Gen(g) => match g.kind {
            Some(GenKind::Micro { n, tau, k2, seed, out }) => {
                let data = generate_micro(&MicroConfig { customers: n, horizon: tau, k2, seed })?;
                emit(out.as_deref(), &write_instance(&data))?;
            }
            Some(GenKind::Source { n, tau, high_holding, seed, out }) => {
                emit(out.as_deref(), &write_source(&synthetic_source(n, tau, high_holding, seed)))?;
            }
            None => {
                let Some(src) = g.source else { bail!("gen needs --source <file> or a subcommand") };
                let text = fs::read_to_string(&src).with_context(|| format!("reading {}", src.display()))?;
                let cfg = GenConfig { suppliers: g.suppliers, satellites: g.satellites, k2: g.k2, seed: g.seed };
                emit(g.out.as_deref(), &write_instance(&transform(&parse_source(&text)?, &cfg)?))?;
            }
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TEIRP_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
