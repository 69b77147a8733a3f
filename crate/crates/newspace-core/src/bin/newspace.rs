//! Command-line front end: verification suites, operator export, cache
//! management. Exit code 0 when every executed check passes, 1 when an
//! identity fails, 2 on invalid parameters or level shapes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use newspace_core::cache::SpaceCache;
use newspace_core::config::{CliConfig, OutputFormat};
use newspace_core::report::ReportSet;
use newspace_core::runner::{
    emit_operator, run_check, run_local, run_suite, CheckSelector, EmitParams, LocalAction,
    RunOutput,
};
use newspace_core::Error;

#[derive(Parser)]
#[command(name = "newspace", version, about = "Exact Hecke-algebra and newform certification for Gamma_0(N)")]
struct Cli {
    /// Output format: json, csv (tables only) or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Directory for the on-disk space cache.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Maximum level at weight 2 (scaled down at higher weight).
    #[arg(long, global = true)]
    level_cap: Option<u32>,
    /// Maximum weight.
    #[arg(long, global = true)]
    weight_cap: Option<u32>,
    /// Restrict subspace reports to the +1 eigenspace of the star involution.
    #[arg(long, global = true)]
    star_restrict: bool,
    /// Worker threads for independent checks.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite Hecke algebra at (p, n): verify relations, print the
    /// eigenvector table, or decompose the induced representation.
    Local(LocalArgs),
    /// Certify theorem and lemma identities at a level and weight.
    Check(CheckArgs),
    /// Export an operator matrix as exact rationals.
    Emit(EmitArgs),
    /// Inspect or clear the on-disk cache.
    Cache(CacheArgs),
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    /// verify | table | decompose
    action: String,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    level: Option<u32>,
    #[arg(long, default_value_t = 2)]
    weight: u32,
    /// auto | T1 | T2 | T2prime | T3 | T5 | lemmas | section6
    #[arg(long, default_value = "auto")]
    theorem: String,
    /// Run the whole default grid instead of a single level.
    #[arg(long)]
    suite: bool,
}

#[derive(Args)]
struct EmitArgs {
    #[arg(long)]
    level: u32,
    #[arg(long, default_value_t = 2)]
    weight: u32,
    /// Utilde | W | Qp | Qp_prime | Qpn | Qpn_prime | Qp2 | Qp2_prime |
    /// L | S | S_prime | Rp_sq | Rchi_sq | T | V
    #[arg(long)]
    op: String,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    j: Option<u32>,
    #[arg(long)]
    d: Option<u32>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CacheArgs {
    /// status | clear
    action: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn build_config(cli: &Cli) -> Result<CliConfig, Error> {
    let mut cfg = CliConfig::from_env()?;
    if let Some(f) = &cli.format {
        cfg.format = OutputFormat::parse(f)?;
    }
    if let Some(dir) = &cli.cache_dir {
        cfg.cache_dir = Some(dir.clone());
    }
    if let Some(cap) = cli.level_cap {
        cfg.level_cap = cap;
    }
    if let Some(cap) = cli.weight_cap {
        cfg.weight_cap = cap;
    }
    if let Some(j) = cli.parallel {
        cfg.parallelism = j.max(1);
    }
    if cli.star_restrict {
        cfg.star_restrict = true;
    }
    Ok(cfg)
}

fn make_cache(cfg: &CliConfig) -> SpaceCache {
    match &cfg.cache_dir {
        Some(dir) => SpaceCache::with_dir(dir),
        None => SpaceCache::in_memory(),
    }
}

fn print_reports(set: &ReportSet, cfg: &CliConfig) {
    match cfg.format {
        OutputFormat::Json => println!("{}", set.to_json()),
        OutputFormat::Text | OutputFormat::Csv => print!("{}", set.to_text()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let cfg = build_config(&cli)?;
    match &cli.command {
        Command::Local(args) => {
            let action = LocalAction::parse(&args.action).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown local action '{}' (expected verify, table or decompose)",
                    args.action
                ))
            })?;
            let out = run_local(args.p, args.n, action)?;
            match out {
                RunOutput::Reports(set) => {
                    print_reports(&set, &cfg);
                    Ok(if set.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
                RunOutput::Table(table) => {
                    match cfg.format {
                        OutputFormat::Json => println!(
                            "{}",
                            serde_json::to_string_pretty(&table).expect("table serialization")
                        ),
                        OutputFormat::Csv => print!("{}", table.to_csv()),
                        OutputFormat::Text => print!("{}", table.to_text()),
                    }
                    Ok(if table.all_verified() { ExitCode::SUCCESS } else { ExitCode::from(1) })
                }
            }
        }
        Command::Check(args) => {
            let cache = make_cache(&cfg);
            let set = if args.suite {
                run_suite(&cache, cfg.star_restrict, cfg.parallelism)?
            } else {
                let level = args.level.ok_or_else(|| {
                    Error::InvalidParameter("check needs --level (or --suite)".into())
                })?;
                cfg.check_space_params(level, args.weight)?;
                let selector = CheckSelector::parse(&args.theorem).ok_or_else(|| {
                    Error::InvalidParameter(format!("unknown theorem selector '{}'", args.theorem))
                })?;
                run_check(&cache, level, args.weight, selector, cfg.star_restrict)?
            };
            print_reports(&set, &cfg);
            Ok(if set.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Emit(args) => {
            cfg.check_space_params(args.level, args.weight)?;
            let cache = make_cache(&cfg);
            let params = EmitParams { p: args.p, q: args.q, r: args.r, j: args.j, d: args.d };
            let payload = emit_operator(&cache, args.level, args.weight, &args.op, params)?;
            match &args.out {
                Some(path) => std::fs::write(path, payload.as_bytes())?,
                None => println!("{payload}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cache(args) => {
            let cache = make_cache(&cfg);
            match args.action.as_str() {
                "status" => {
                    let entries = cache.status()?;
                    if cfg.format == OutputFormat::Json {
                        let items: Vec<serde_json::Value> = entries
                            .iter()
                            .map(|&(n, w, size)| {
                                serde_json::json!({"level": n, "weight": w, "bytes": size})
                            })
                            .collect();
                        let payload = serde_json::json!({
                            "schema": "newspace.cache/1",
                            "version": newspace_core::cache::CACHE_FORMAT_VERSION,
                            "entries": items,
                        });
                        println!("{}", serde_json::to_string_pretty(&payload)?);
                    } else {
                        println!(
                            "cache format version {}",
                            newspace_core::cache::CACHE_FORMAT_VERSION
                        );
                        for (n, w, size) in entries {
                            println!("level {n} weight {w}: {size} bytes");
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                "clear" => {
                    let removed = cache.clear()?;
                    println!("removed {removed} cache entries");
                    Ok(ExitCode::SUCCESS)
                }
                other => Err(Error::InvalidParameter(format!(
                    "unknown cache action '{other}' (expected status or clear)"
                ))),
            }
        }
    }
}
