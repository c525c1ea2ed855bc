use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use kfcl::harness::{run_with_threads, ExperimentConfig, ExperimentKind, ExperimentReport};

/// Grid-level verification of alternating-pattern covering theorems on spheres.
#[derive(Parser)]
#[command(name = "kfcl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search a cover for a long alternating pattern along one order.
    Verify {
        #[command(flatten)]
        scan: Scan,
        /// Shuffle the order with this seed instead of using the listing order.
        #[arg(long)]
        order_seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Search a cover for chains monotone in several random orders.
    Multiorder {
        #[command(flatten)]
        scan: Scan,
        #[arg(long, default_value_t = 2)]
        orders: usize,
        #[arg(long)]
        seed: u64,
        /// Check the reduced rank of the signed antichain instead of the chain heights.
        #[arg(long)]
        lemma_rank: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Longest chain monotone in all orders of the product construction.
    Sharpness {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Layer-cake decomposition of the smoothed membership at a point.
    Chi {
        #[arg(long, default_value = "chi-demo-s1")]
        cover: String,
        /// Comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Check antipodal-freeness and, with --grid, coverage.
    Validate {
        #[arg(long)]
        cover: String,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Args)]
struct Scan {
    /// Builtin (simplex-voronoi:N, caps-random:N,K,SEED, caps-demo-s1) or cover file.
    #[arg(long)]
    cover: String,
    #[arg(long)]
    grid: usize,
    /// Do not add the cover's feature points to the grid.
    #[arg(long)]
    no_features: bool,
    /// Per-point CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Report path; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Include elapsed time in the report.
    #[arg(long)]
    wall_time: bool,
}

impl Common {
    fn apply(&self, config: &mut ExperimentConfig) -> usize {
        config.out = self.out.clone();
        config.wall_time = self.wall_time;
        self.threads
    }
}

impl Scan {
    fn apply(&self, config: &mut ExperimentConfig) {
        config.cover = Some(self.cover.clone());
        config.grid = Some(self.grid);
        config.features = !self.no_features;
        config.csv = self.csv.clone();
    }
}

fn build(command: Command) -> anyhow::Result<(ExperimentConfig, usize)> {
    Ok(match command {
        Command::Verify {
            scan,
            order_seed,
            common,
        } => {
            let mut c = ExperimentConfig::new(ExperimentKind::Kfcl);
            scan.apply(&mut c);
            if order_seed.is_some() {
                c.seed = order_seed;
                c.orders = Some(1);
            }
            let t = common.apply(&mut c);
            (c, t)
        }
        Command::Multiorder {
            scan,
            orders,
            seed,
            lemma_rank,
            common,
        } => {
            let kind = if lemma_rank {
                ExperimentKind::LemmaRank
            } else if orders == 2 {
                ExperimentKind::TwoOrders
            } else {
                ExperimentKind::DOrders
            };
            let mut c = ExperimentConfig::new(kind);
            scan.apply(&mut c);
            c.orders = Some(orders);
            c.seed = Some(seed);
            let t = common.apply(&mut c);
            (c, t)
        }
        Command::Sharpness { d, m, common } => {
            let mut c = ExperimentConfig::new(ExperimentKind::Sharpness);
            c.d = Some(d);
            c.m = Some(m);
            let t = common.apply(&mut c);
            (c, t)
        }
        Command::Chi {
            cover,
            point,
            epsilon,
            common,
        } => {
            let mut c = ExperimentConfig::new(ExperimentKind::ChiDemo);
            c.point = Some(point.unwrap_or_else(|| vec![1.0, 0.0]));
            c.cover = Some(cover);
            c.epsilon = epsilon;
            let t = common.apply(&mut c);
            (c, t)
        }
        Command::Validate {
            cover,
            grid,
            common,
        } => {
            let mut c = ExperimentConfig::new(ExperimentKind::ValidateCover);
            c.cover = Some(cover);
            c.grid = grid;
            let t = common.apply(&mut c);
            (c, t)
        }
        Command::Run { config, threads } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            (ExperimentConfig::from_json(&text)?, threads)
        }
    })
}

fn execute(command: Command) -> anyhow::Result<ExperimentReport> {
    let (config, threads) = build(command)?;
    let report = run_with_threads(&config, threads)?;
    report.write_outputs()?;
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(report) => {
            if report.config.out.is_none() {
                println!("{}", report.to_json());
            }
            eprintln!(
                "{}",
                if report.pass {
                    "PASS"
                } else {
                    "FAIL: threshold not reached at this grid resolution"
                }
            );
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
