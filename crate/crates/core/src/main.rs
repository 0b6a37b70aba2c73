use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use samplayer::baselines::WalkerKind;
use samplayer::config::{Algorithm, ExperimentConfig};
use samplayer::experiments::{
    median_errors, run_amortized_qc, run_calibration, run_lb_scaling, run_mu_vs_l0,
    run_reach_hist, run_size_error, write_csv_file,
};
use samplayer::Result;

/// Uniform node sampling experiments under query access.
///
/// Settings come from an optional key=value file, then from trailing
/// key=value overrides, then from flags. CSV goes to `output=` or to
/// $SAMPLAYER_OUT_DIR (default `results/`).
#[derive(Parser)]
#[command(name = "samplayer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// key=value overrides, e.g. `n=100000 l0=3000`
    overrides: Vec<String>,
}

#[derive(Args)]
struct WalkFlags {
    /// Random-walk baseline to run instead of the configured algorithm
    #[arg(long, value_parser = ["rej", "mh", "mh+"])]
    walker: Option<String>,
    /// Fixed sampling interval; skips calibration
    #[arg(long)]
    interval: Option<usize>,
    /// Calibration method
    #[arg(long, value_parser = ["tv", "collisions"])]
    calibrate: Option<String>,
    /// Calibration threshold
    #[arg(long)]
    zeta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Write the configured graph as an edge list
    Generate(Common),
    /// Amortized query complexity of one algorithm
    Qc {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        walk: WalkFlags,
    },
    /// Mean periphery component size over an l0 grid
    Mu(Common),
    /// Histogram of sampled node reachabilities
    ReachHist(Common),
    /// Error of the periphery-size estimate over s1 and s2 sweeps
    SizeError(Common),
    /// Per-sample cost on lower-bound graphs over a component-size grid
    LbScaling {
        #[command(flatten)]
        common: Common,
        /// Number of nodes
        #[arg(long, default_value_t = 20_000)]
        n: usize,
    },
    /// Calibrate the random-walk sampling interval
    Calibrate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        walk: WalkFlags,
    },
}

fn load(common: &Common, walk: Option<&WalkFlags>) -> Result<ExperimentConfig> {
    let base = match &common.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut overrides = common.overrides.clone();
    if let Some(w) = walk {
        if let Some(k) = &w.walker {
            overrides.push(format!("algorithm={k}"));
        }
        if let Some(t) = w.interval {
            overrides.push(format!("interval={t}"));
        }
        if let Some(m) = &w.calibrate {
            overrides.push(format!("calibrate={m}"));
        }
        if let Some(z) = w.zeta {
            overrides.push(format!("zeta={z}"));
        }
    }
    ExperimentConfig::with_overrides(&base, &overrides)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(common) => {
            let cfg = load(&common, None)?;
            let graph = cfg.graph.build()?;
            let path = cfg.output_path("graph.txt");
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            graph.write_edge_list(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
            println!("graph={}", cfg.graph.describe());
            println!("nodes={}\nedges={}", graph.node_count(), graph.edge_count());
            println!("average_degree={:.4}\noutput={}", graph.average_degree(), path.display());
        }
        Command::Qc { common, walk } => {
            let cfg = load(&common, Some(&walk))?;
            let graph = cfg.graph.build()?;
            info!("loaded {} with {} nodes", cfg.graph.describe(), graph.node_count());
            let out = run_amortized_qc(&cfg, &graph)?;
            let path = cfg.output_path(&format!("qc-{}.csv", cfg.algorithm));
            write_csv_file(&out.rows, &path)?;
            println!("algorithm={}", cfg.algorithm);
            if let Some(t) = out.interval {
                println!("interval={t}");
            }
            println!("preprocessing_queries={}", out.preprocessing_queries);
            println!("total_queries={}", out.session_queries);
            println!("amortized_qps={}", out.final_amortized());
            println!("output={}", path.display());
        }
        Command::Mu(common) => {
            let cfg = load(&common, None)?;
            let graph = cfg.graph.build()?;
            let grid = if cfg.l0_grid.is_empty() { vec![cfg.l0] } else { cfg.l0_grid.clone() };
            let seeds: Vec<u64> = (0..cfg.repetitions as u64).map(|i| cfg.seed + i).collect();
            let rows = run_mu_vs_l0(&graph, &grid, &seeds, cfg.effective_model(), cfg.start)?;
            let path = cfg.output_path("mu.csv");
            write_csv_file(&rows, &path)?;
            for r in &rows {
                println!("l0={} mu={:.4} empty={}", r.l0, r.mu, r.empty_periphery);
            }
            println!("output={}", path.display());
        }
        Command::ReachHist(common) => {
            let cfg = load(&common, None)?;
            let graph = cfg.graph.build()?;
            let bins = run_reach_hist(&cfg, &graph)?;
            let path = cfg.output_path("reach-hist.csv");
            write_csv_file(&bins, &path)?;
            println!("bins={}\noutput={}", bins.len(), path.display());
        }
        Command::SizeError(common) => {
            let cfg = load(&common, None)?;
            let graph = cfg.graph.build()?;
            let s1 = if cfg.s1_grid.is_empty() { vec![100, 300, 1000, 3000] } else { cfg.s1_grid.clone() };
            let s2 = if cfg.s2_grid.is_empty() { vec![25, 50, 100, 200] } else { cfg.s2_grid.clone() };
            let rows = run_size_error(&cfg, &graph, &s1, &s2, cfg.repetitions)?;
            let path = cfg.output_path("size-error.csv");
            write_csv_file(&rows, &path)?;
            for (sweep, value, median) in median_errors(&rows) {
                println!("{sweep}={value} median_error_pct={median:.3}");
            }
            println!("output={}", path.display());
        }
        Command::LbScaling { common, n } => {
            let cfg = load(&common, None)?;
            let grid = if cfg.t_grid.is_empty() { vec![25, 50, 100] } else { cfg.t_grid.clone() };
            let rows = run_lb_scaling(&cfg, n, &grid)?;
            let path = cfg.output_path("lb-scaling.csv");
            write_csv_file(&rows, &path)?;
            for r in &rows {
                println!("t={} algorithm={} queries_per_sample={:.3}", r.t, r.algorithm, r.queries_per_sample);
            }
            println!("output={}", path.display());
        }
        Command::Calibrate { common, walk } => {
            let mut cfg = load(&common, Some(&walk))?;
            if !matches!(cfg.algorithm, Algorithm::Walk(_)) {
                cfg.algorithm = Algorithm::Walk(WalkerKind::Rej);
            }
            let graph = cfg.graph.build()?;
            let cal = run_calibration(&cfg, &graph)?;
            print!("{}", cal.to_key_values());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
