//! Thin command-line front end; all logic lives in the library. See the
//! crate examples for programmatic use.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hiercoop::channel::ChannelParams;
use hiercoop::experiment::{self, SweepConfig, VerifyConfig};
use hiercoop::mimo::{self, MimoSession};
use hiercoop::net::{ClusterGrid, NetworkInstance, Regime};
use hiercoop::{cutset, derive_seed};

#[derive(Parser)]
#[command(name = "hiercoop", version, about = "Capacity-scaling simulator for random wireless networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep described by a JSON config and write CSV + summary JSON.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Record wall-clock runtimes per cell (makes the CSV
        /// non-reproducible across runs).
        #[arg(long)]
        timings: bool,
    },
    /// Run the property suites and write a pass/fail report.
    VerifyLemmas {
        /// Optional JSON config; defaults are used otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Mutual information of cluster-to-cluster MIMO sessions for a list of
    /// array sizes.
    MimoMi {
        /// Comma-separated antenna counts.
        #[arg(long, default_value = "8,16,32,64")]
        m_list: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the extended-network cut: total received power, spectral
    /// norm, and the throughput upper bound.
    Cutset {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// Skip the spectral-norm computation (large n).
        #[arg(long)]
        no_spectral: bool,
    },
    /// Per-source SIMO upper bound for a dense instance.
    DenseBound {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn init_workers(workers: usize) {
    if workers > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
}

fn run(cli: Cli) -> hiercoop::Result<ExitCode> {
    match cli.command {
        Command::Sweep {
            config,
            common,
            timings,
        } => {
            init_workers(common.workers);
            let text = std::fs::read_to_string(&config)?;
            let mut cfg: SweepConfig = serde_json::from_str(&text)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            cfg.record_timings = timings;
            let out = experiment::run_sweep(&cfg)?;
            let dir = cfg.output_path.clone().unwrap_or(common.out);
            let (csv_path, summary_path) = experiment::write_sweep_output(&out, &dir)?;
            println!("wrote {} rows to {}", out.rows.len(), csv_path.display());
            println!("summary: {}", summary_path.display());
            for s in &out.summary.summaries {
                if let Some(fit) = &s.fit {
                    println!(
                        "  {} alpha={}: slope {:.3} (r^2 {:.3}), failures {:.3}",
                        s.scheme.name(),
                        s.alpha,
                        fit.slope,
                        fit.r_squared,
                        s.failure_fraction
                    );
                }
            }
            Ok(if out.summary.cell_errors == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::VerifyLemmas { config, common } => {
            init_workers(common.workers);
            let mut cfg = match config {
                Some(path) => serde_json::from_str(&std::fs::read_to_string(&path)?)?,
                None => VerifyConfig::default(),
            };
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            let report = experiment::verify_lemmas(&cfg)?;
            std::fs::create_dir_all(&common.out)?;
            let path = common.out.join("verify.json");
            std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
            for s in &report.suites {
                println!(
                    "{}: {} (margin {:.3e}) - {}",
                    s.name,
                    if s.pass { "PASS" } else { "FAIL" },
                    s.margin,
                    s.detail
                );
            }
            println!("report: {}", path.display());
            Ok(if report.all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::MimoMi {
            m_list,
            alpha,
            trials,
            seed,
        } => {
            let params = ChannelParams::unit().with_alpha(alpha);
            let sizes: Vec<usize> = m_list
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|e| hiercoop::Error::InvalidArgument(e.to_string())))
                .collect::<hiercoop::Result<_>>()?;
            let mut rows = Vec::new();
            for m in sizes {
                let n = m * 16;
                let inst = NetworkInstance::sample(n, Regime::Dense, derive_seed(seed, &[m as u64]))?;
                let grid = ClusterGrid::build(&inst, m)?;
                let session = MimoSession::build(&inst, &grid, &params, 0, grid.num_cells() - 1)?;
                let gains = session.gains(&inst, &params)?;
                let mi = mimo::mimo_mutual_information(&gains, session.per_node_power, params.noise, trials, seed)?;
                let (a, b) = mimo::rho_range(alpha);
                let t = 0.5 * a.min(a * a);
                let pz = mimo::paley_zygmund_bound(a, b, params.gain_const * params.power / params.noise, session.antennas(), t)?;
                println!(
                    "M={:>4}  MI {:>9.3} +- {:.3}  per-antenna {:.3}  floor {:.5}",
                    session.antennas(),
                    mi.mean,
                    mi.std_error,
                    mi.mean / session.antennas() as f64,
                    pz
                );
                rows.push((session.antennas(), mi.mean));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Cutset {
            n,
            alpha,
            seed,
            epsilon,
            no_spectral,
        } => {
            let params = ChannelParams::new(1.0, alpha, 1.0, 1.0)?;
            let report = cutset::cutset_report(n, &params, seed, epsilon, !no_spectral)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::DenseBound { n, alpha, seed } => {
            let params = ChannelParams::new(1.0, alpha, 1.0, 1.0)?;
            let inst = NetworkInstance::sample(n, Regime::Dense, seed)?;
            let bound = cutset::dense_simo_upper_bound(&inst, &params)?;
            println!(
                "{}",
                serde_json::json!({ "n": n, "alpha": alpha, "seed": seed, "bound": bound, "bound_over_nlogn": bound / (n as f64 * (n as f64).log2()) })
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}
