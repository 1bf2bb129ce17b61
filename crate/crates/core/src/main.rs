//! Command-line front end: diversity-bound tables, configuration checks,
//! WER sweeps and outage curves.
//!
//! Exit codes: 0 on success, 2 on configuration errors, 3 when an
//! exhaustive-enumeration cap is exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ssafsim::bounds;
use ssafsim::harness::{self, config::parse_snr_grid, BuiltExperiment, ExperimentConfig};
use ssafsim::outage;
use ssafsim::rational::Rational;

#[derive(Parser)]
#[command(name = "ssafsim", version, about = "Cooperative relay link simulator and bound toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diversity-order bounds.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
    /// Monte Carlo word-error-rate sweeps.
    Simulate(SimulateArgs),
    /// Monte Carlo outage probability curves.
    Outage(OutageArgs),
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Tabulate the single-precoder bound over (beta, s).
    Table {
        /// Coding rate as p/q.
        #[arg(long)]
        rc: String,
        #[arg(long, default_value_t = 8)]
        beta_max: u32,
        #[arg(long, default_value_t = 6)]
        s_max: u32,
        /// Also write the table as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Maximum full-diversity coding rates over stretched frames.
    Maxrate {
        /// Relay counts, comma separated.
        #[arg(long, value_delimiter = ',')]
        beta: Vec<u32>,
        #[arg(long, default_value_t = 6)]
        alpha_max: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Validate an experiment file and print its predicted diversity.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct SimulateArgs {
    /// Preset name or family (E1, E2-rc23-qpsk-s2, ...).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Experiment file (see docs/CONFIG.md).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the SNR grid: lo:hi:step or comma list (Eb/N0 in dB).
    #[arg(long)]
    snr: Option<String>,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the word-error stopping target.
    #[arg(long)]
    min_word_errors: Option<u64>,
    /// Override the frame cap per SNR point.
    #[arg(long)]
    max_frames: Option<u64>,
    /// Output directory for CSV files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Also write (snr_db, wer) plot data per experiment.
    #[arg(long)]
    plotdata: bool,
    /// Overlay a Monte Carlo outage curve on the plot data (implies
    /// --plotdata), computed on the same grid with this many trials.
    #[arg(long)]
    overlay_outage: Option<u64>,
}

#[derive(Args)]
struct OutageArgs {
    /// Target rate in bits per channel use, as p/q.
    #[arg(long)]
    rate: String,
    #[arg(long, default_value_t = 2)]
    beta: u32,
    #[arg(long, default_value_t = 0)]
    alpha: u32,
    /// Eb/N0 grid: lo:hi:step or comma list.
    #[arg(long, default_value = "0:24:2")]
    snr: String,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Ideal (unit, noiseless) source-relay and inter-relay links.
    #[arg(long)]
    ideal_relays: bool,
    /// Write the curve as CSV to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e
                .downcast_ref::<harness::HarnessError>()
                .map(harness_exit_code)
                .unwrap_or(1);
            ExitCode::from(code)
        }
    }
}

fn harness_exit_code(e: &harness::HarnessError) -> u8 {
    use harness::HarnessError::*;
    if e.is_cap_exceeded() {
        return 3;
    }
    match e {
        Config(_) | Bounds(_) | Channel(_) | Bicm(_) | Precoder(_) => 2,
        _ => 1,
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Bounds { command } => run_bounds(command),
        Command::Simulate(args) => run_simulate(args),
        Command::Outage(args) => run_outage(args),
    }
}

fn run_bounds(cmd: BoundsCommand) -> anyhow::Result<()> {
    match cmd {
        BoundsCommand::Table { rc, beta_max, s_max, csv } => {
            let rc: Rational = rc.parse()?;
            let table = bounds::emit_bound_tables(rc, beta_max, s_max)
                .map_err(harness::HarnessError::Bounds)?;
            print!("{table}");
            if let Some(path) = csv {
                std::fs::write(&path, table.to_csv())?;
                eprintln!("wrote {}", path.display());
            }
        }
        BoundsCommand::Maxrate { beta, alpha_max, csv } => {
            let betas = if beta.is_empty() { vec![2, 3, 4] } else { beta };
            let table = bounds::max_rate_table(&betas, alpha_max);
            print!("{table}");
            if let Some(path) = csv {
                std::fs::write(&path, table.to_csv())?;
                eprintln!("wrote {}", path.display());
            }
        }
        BoundsCommand::Check { config } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_text(&text)?;
            let built = BuiltExperiment::build(&cfg)?;
            let bc = cfg.bound_config()?;
            let eq = bounds::build_equivalent_channel(&bc, cfg.n as u64)?;
            println!("config '{}' is valid", cfg.name);
            println!("  code: {} (Rc = {})", cfg.code_name, built.code.rate());
            println!("  rate: {} bits per channel use", cfg.rate()?);
            println!(
                "  equivalent channel: D = {:?}, L = {:?}",
                eq.channel.diversities(),
                eq.channel.lengths()
            );
            println!("  predicted diversity bound: {}", built.predicted_delta);
            let (_, exact) = bounds::code_dimension(bc.rc, cfg.n as u64);
            if !exact {
                eprintln!("warning: Rc * N is not an integer; K was rounded up");
            }
        }
    }
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> anyhow::Result<()> {
    let mut configs = match (&args.preset, &args.config) {
        (Some(p), None) => {
            let list = harness::presets_matching(p);
            anyhow::ensure!(
                !list.is_empty(),
                "no preset matches '{p}' (known: {})",
                harness::preset_names().join(", ")
            );
            list
        }
        (None, Some(path)) => vec![ExperimentConfig::from_text(&std::fs::read_to_string(path)?)?],
        _ => anyhow::bail!("exactly one of --preset or --config is required"),
    };
    for cfg in &mut configs {
        if let Some(snr) = &args.snr {
            cfg.snr_grid_db = parse_snr_grid(snr).map_err(harness::HarnessError::Config)?;
        }
        if let Some(seed) = args.seed {
            cfg.seed = seed;
        }
        if let Some(w) = args.min_word_errors {
            cfg.stop.min_word_errors = w;
        }
        if let Some(f) = args.max_frames {
            cfg.stop.max_frames = f;
        }
    }
    std::fs::create_dir_all(&args.out)?;
    for cfg in &configs {
        let built = BuiltExperiment::build(cfg)?;
        eprintln!(
            "{}: code {} (Rc = {}), R = {} b/cu, predicted diversity {} (Eb/N0 axis)",
            cfg.name,
            cfg.code_name,
            built.code.rate(),
            cfg.rate()?,
            built.predicted_delta
        );
        let rows = harness::run_wer(cfg, args.workers)?;
        for r in &rows {
            eprintln!(
                "  {:>6.2} dB: wer {:.3e} ({} errors / {} frames, ber {:.3e}) [{:.1}s]",
                r.snr_db, r.wer, r.word_errors, r.frames, r.ber, r.wall_time_s
            );
        }
        let path = args.out.join(format!("{}.csv", cfg.name));
        std::fs::write(&path, harness::emit_csv(&rows))?;
        eprintln!("wrote {}", path.display());
        if args.plotdata || args.overlay_outage.is_some() {
            let overlay = match args.overlay_outage {
                Some(trials) => Some(outage::outage_probability(
                    cfg.rate()?.to_f64(),
                    &cfg.snr_grid_db,
                    &cfg.protocol(1.0)?,
                    &cfg.build_precoder()?,
                    trials,
                    cfg.seed,
                )?),
                None => None,
            };
            let plot = harness::emit_plotdata(&rows, overlay.as_deref())?;
            let plot_path = args.out.join(format!("{}.plot.csv", cfg.name));
            std::fs::write(&plot_path, plot)?;
            eprintln!("wrote {}", plot_path.display());
        }
    }
    Ok(())
}

fn run_outage(args: OutageArgs) -> anyhow::Result<()> {
    let rate: Rational = args.rate.parse()?;
    let grid = parse_snr_grid(&args.snr).map_err(harness::HarnessError::Config)?;
    let m = (args.beta + 1 + args.alpha) as usize;
    let mut cfg = ssafsim::channel::ProtocolConfig::new(
        args.beta,
        args.alpha,
        harness::default_energies(m),
        1.0,
    )?;
    if args.ideal_relays {
        cfg.relay_mode = ssafsim::channel::RelayMode::Ideal;
    } else {
        cfg.gains = ssafsim::channel::LinkGains::reliable_relay_links(20.0);
    }
    let precoder = ssafsim::precoder::Precoder::identity(m);
    let points = outage::outage_probability(
        rate.to_f64(),
        &grid,
        &cfg,
        &precoder,
        args.trials,
        args.seed,
    )?;
    for p in &points {
        println!(
            "{:>6.2} dB: p_out {:.4e} [{:.4e}, {:.4e}] ({} trials)",
            p.snr_db, p.p_out, p.ci_low, p.ci_high, p.trials
        );
    }
    if let Some(path) = args.out {
        write_file(&path, &outage::outage_csv(&points))?;
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}
