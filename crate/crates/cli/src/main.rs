use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use thetalab_cli::{run_with_engine, CliError, JobKind, LatticeRef, VerificationJob};
use thetalab_core::enumeration::CoefficientCache;
use thetalab_core::Engine;

#[derive(Parser)]
#[command(name = "thetalab", version, about = "Exact theta-series verification jobs for even unimodular lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check evenness, determinant, definiteness, minimum and root system.
    Validate(JobArgs),
    /// Count vectors of each norm up to --norm-bound.
    Shells(JobArgs),
    /// Export a truncated theta series.
    Theta(JobArgs),
    /// Coefficientwise difference of two theta series.
    Diff(JobArgs),
    /// Product of two theta series against the theta series of the direct sum.
    Product(JobArgs),
    /// Siegel operator on genus g+1 against genus g.
    Restrict(JobArgs),
    /// Root second-moment proportionality constant.
    Venkov(JobArgs),
    /// Heat identity between theta and index-1 Fourier–Jacobi coefficients.
    Heat(JobArgs),
    /// Coefficient equality of the rank-16 pair up to genus 3.
    Witt(JobArgs),
    /// Genus-4 witness that the rank-16 pair differs.
    Schottky(JobArgs),
    /// Separation of rank-24 pairs by the A4 coefficient.
    A4Separation(JobArgs),
    /// Genus-4 proportionality of pair differences to the Schottky form times Θ_E8.
    KIdentity(JobArgs),
    /// Rank of the coefficient matrix of several theta series.
    Independence(JobArgs),
    /// Rank and minimum hypotheses for a pair of lattices.
    HypPredicate(JobArgs),
    /// Built-in lattices.
    Registry {
        #[command(subcommand)]
        action: RegistryAction,
    },
}

#[derive(Subcommand)]
enum RegistryAction {
    /// List names with rank, minimum, root count and root system.
    List(JobArgs),
}

#[derive(Args, Clone, Default)]
struct JobArgs {
    /// Registry name; repeat for jobs over several lattices.
    #[arg(long)]
    lattice: Vec<String>,
    /// Lattice spec file (TOML).
    #[arg(long)]
    spec: Vec<PathBuf>,
    /// Two registry names, `A:B`.
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    genus: Option<usize>,
    #[arg(long)]
    max_genus: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    trace_bound: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    norm_bound: Option<i64>,
    /// File of genus targets, one `g:upper,triangle` key per line.
    #[arg(long)]
    tset: Option<PathBuf>,
    /// Heat constant `p/q`; derived per lattice when absent.
    #[arg(long)]
    constant: Option<String>,
    /// Extra directory of lattice spec files.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_job(kind: JobKind, args: &JobArgs) -> Result<VerificationJob, CliError> {
    let mut job = VerificationJob::new(kind);
    job.lattices = args.lattice.iter().map(|n| LatticeRef::Name(n.clone())).collect();
    job.lattices.extend(args.spec.iter().map(|p| LatticeRef::SpecFile(p.clone())));
    if let Some(p) = &args.pair {
        let (a, b) = p.split_once(':').ok_or_else(|| CliError::Input(format!("--pair expects A:B, got {p}")))?;
        job.pair = Some((a.to_string(), b.to_string()));
    }
    job.genus = args.genus;
    job.max_genus = args.max_genus;
    job.trace_bound = args.trace_bound;
    job.norm_bound = args.norm_bound;
    job.tset = args.tset.clone();
    if let Some(c) = &args.constant {
        let parsed: BigRational = c.parse().map_err(|_| CliError::Input(format!("bad constant {c}")))?;
        job.constant = Some(parsed);
    }
    job.registry_dir = args.registry.clone();
    job.jobs = args.jobs;
    Ok(job)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Validate(a) => (JobKind::Validate, a),
        Command::Shells(a) => (JobKind::Shells, a),
        Command::Theta(a) => (JobKind::Theta, a),
        Command::Diff(a) => (JobKind::Diff, a),
        Command::Product(a) => (JobKind::Product, a),
        Command::Restrict(a) => (JobKind::Restrict, a),
        Command::Venkov(a) => (JobKind::Venkov, a),
        Command::Heat(a) => (JobKind::Heat, a),
        Command::Witt(a) => (JobKind::Witt, a),
        Command::Schottky(a) => (JobKind::Schottky, a),
        Command::A4Separation(a) => (JobKind::A4Separation, a),
        Command::KIdentity(a) => (JobKind::KIdentity, a),
        Command::Independence(a) => (JobKind::Independence, a),
        Command::HypPredicate(a) => (JobKind::HypPredicate, a),
        Command::Registry { action: RegistryAction::List(a) } => (JobKind::RegistryList, a),
    };
    let start = Instant::now();
    let result = build_job(kind, &args).and_then(|job| {
        let engine = Engine::new(job.jobs).with_cache(CoefficientCache::from_env());
        let report = run_with_engine(&job, &engine)?;
        let stats = engine.cache().stats();
        eprintln!(
            "{kind}: {} in {:.2?} (jobs {}, cache hits {}, misses {}, writes {})",
            report.status.name(),
            start.elapsed(),
            engine.jobs(),
            stats.hits,
            stats.misses,
            stats.writes
        );
        Ok(report)
    });
    match result {
        Ok(report) => {
            let text = report.to_json();
            match &args.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("cannot write {}: {e}", path.display());
                        return ExitCode::from(3);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(report.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
