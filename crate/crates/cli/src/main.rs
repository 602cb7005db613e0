use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heatvqe_core::direct_vqe::DirectProblem;
use heatvqe_core::experiments::{campaign, summarize_file, CampaignConfig, CampaignReport, Figure};
use heatvqe_core::hadamard_vqe::AnsatzKind;
use heatvqe_core::optim::NelderMeadConfig;
use heatvqe_core::sim::Mode;
use heatvqe_core::{seeds, Error};

#[derive(Parser)]
#[command(name = "heatvqe", version, about = "Variational solvers for the implicit heat-equation step")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two-qubit direct variational solve and its energy landscape.
    Direct {
        #[command(flatten)]
        common: Common,
        /// Landscape grid points per angle.
        #[arg(long, default_value_t = 30)]
        grid: usize,
    },
    /// Layers needed by each ansatz to reach the target fidelity.
    Hadamard {
        #[command(flatten)]
        common: Common,
        /// Comma-separated ansatz kinds (hea, cba, daa).
        #[arg(long, default_value = "hea,cba,daa")]
        ansatz: String,
        #[arg(long)]
        target: Option<f64>,
        /// Largest number of layers tried.
        #[arg(long)]
        layer_cap: Option<usize>,
    },
    /// Ansatz-tree depth needed to reach the target fidelity.
    Ata {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Ansatz-tree fidelity under ancilla readout noise.
    AtaNoise {
        #[command(flatten)]
        common: Common,
        /// Noise probabilities: a list `0,0.5,1` or a range `0..1` (step 0.25) or `0..1:0.1`.
        #[arg(long, default_value = "0..1")]
        p: String,
        #[arg(long)]
        target: Option<f64>,
    },
    /// Runs one named campaign with its default protocol.
    Campaign {
        /// landscape, fig5, fig7, fig10, fig11, fig12, fig13, evolve or errorbound.
        figure: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        ansatz: Option<String>,
        #[arg(long)]
        target: Option<f64>,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long)]
        layer_cap: Option<usize>,
        #[arg(long)]
        n_tau: Option<usize>,
    },
    /// Fits log-log and semi-log scaling to a fig5 or fig10 CSV.
    Summarize { csv: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Shots,
}

#[derive(Args)]
struct Common {
    /// Qubit counts: `2..8`, `2,4,6` or `5`.
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated grid parameters.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::Config(format!("bad {what} value '{t}'"))))
        .collect()
}

fn parse_qubits(s: &str) -> Result<Vec<usize>, Error> {
    if let Some((a, b)) = s.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| Error::Config(format!("bad range start '{a}'")))?;
        let hi: usize = b.trim().trim_start_matches('=').parse().map_err(|_| Error::Config(format!("bad range end '{b}'")))?;
        if lo > hi {
            return Err(Error::Config(format!("empty qubit range {s}")));
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(s, "qubit")
}

fn parse_probabilities(s: &str) -> Result<Vec<f64>, Error> {
    let Some((a, rest)) = s.split_once("..") else {
        return parse_list(s, "probability");
    };
    let (b, step) = rest.split_once(':').unwrap_or((rest, "0.25"));
    let bad = |t: &str| Error::Config(format!("bad probability range '{t}'"));
    let lo: f64 = a.trim().parse().map_err(|_| bad(s))?;
    let hi: f64 = b.trim().parse().map_err(|_| bad(s))?;
    let step: f64 = step.trim().parse().map_err(|_| bad(s))?;
    if !(step > 0.0) || hi < lo {
        return Err(bad(s));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

fn configure(figure: Figure, common: &Common) -> Result<CampaignConfig, Error> {
    let mut cfg = CampaignConfig::preset(figure);
    if let Some(n) = &common.n {
        cfg.n = parse_qubits(n)?;
    }
    if let Some(c) = &common.c {
        cfg.c = parse_list(c, "c")?;
    }
    if let Some(s) = common.samples {
        cfg.samples = s;
    }
    cfg.mode = match common.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Shots => Mode::Shots { shots: common.shots, seed: seeds::derive(common.seed, "shots", 0) },
    };
    cfg.seed = common.seed;
    cfg.workers = common.workers;
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    Ok(cfg)
}

fn report(r: &CampaignReport) {
    println!("{}: wrote {} rows to {}", r.figure, r.rows, r.path.display());
}

fn direct(common: &Common, grid: usize) -> Result<(), Error> {
    let mut cfg = configure(Figure::Landscape, common)?;
    cfg.grid = grid;
    cfg.validate()?;
    for s in 0..cfg.samples {
        let seed = seeds::derive(cfg.seed, "landscape-b", s as u64);
        let b = seeds::random_zero_mean_b::<f64, _>(4, &mut seeds::rng(seed));
        let problem = DirectProblem::new(&b)?;
        let land = problem.scan_landscape(grid);
        for m in problem.landscape_minima(&land, 1e-3) {
            println!(
                "sample {s}: minimum at theta1={:.6} theta2={:.6} theta3={:.6} energy={:.3e} fidelity={:.9}",
                m.theta.theta1, m.theta.theta2, m.theta.theta3, m.energy, m.fidelity
            );
        }
        let best = problem.minimize((0.3, 0.3), &NelderMeadConfig::default());
        println!("sample {s}: descent from (0.3, 0.3) reached energy {:.3e}, fidelity {:.9}", best.energy, best.fidelity);
    }
    report(&campaign(&cfg)?);
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Direct { common, grid } => direct(&common, grid),
        Command::Hadamard { common, ansatz, target, layer_cap } => {
            let mut cfg = configure(Figure::Fig5, &common)?;
            cfg.ansatz = parse_list::<AnsatzKind>(&ansatz, "ansatz")?;
            if let Some(t) = target {
                cfg.target = t;
            }
            if let Some(m) = layer_cap {
                cfg.layer_cap = m;
            }
            report(&campaign(&cfg)?);
            Ok(())
        }
        Command::Ata { common, target, max_depth } => {
            let mut cfg = configure(Figure::Fig10, &common)?;
            if let Some(t) = target {
                cfg.target = t;
            }
            if let Some(d) = max_depth {
                cfg.max_depth = d;
            }
            report(&campaign(&cfg)?);
            Ok(())
        }
        Command::AtaNoise { common, p, target } => {
            let mut cfg = configure(Figure::Fig12, &common)?;
            cfg.p = parse_probabilities(&p)?;
            if let Some(t) = target {
                cfg.target = t;
            }
            report(&campaign(&cfg)?);
            Ok(())
        }
        Command::Campaign { figure, common, p, ansatz, target, max_depth, layer_cap, n_tau } => {
            let figure: Figure = figure.parse()?;
            let mut cfg = configure(figure, &common)?;
            if let Some(p) = p {
                cfg.p = parse_probabilities(&p)?;
            }
            if let Some(a) = ansatz {
                cfg.ansatz = parse_list(&a, "ansatz")?;
            }
            if let Some(t) = target {
                cfg.target = t;
            }
            if let Some(d) = max_depth {
                cfg.max_depth = d;
            }
            if let Some(m) = layer_cap {
                cfg.layer_cap = m;
            }
            if let Some(t) = n_tau {
                cfg.n_tau = t;
            }
            report(&campaign(&cfg)?);
            Ok(())
        }
        Command::Summarize { csv } => {
            for s in summarize_file(&csv)? {
                let f = &s.fit;
                println!(
                    "{}: {} (log-log slope {:.3}, residual {:.3e}; semi-log slope {:.3}, residual {:.3e}; monotone {}; censored points {})",
                    s.key, f.growth, f.slope, f.residual, f.semilog_slope, f.semilog_residual, f.monotone, s.censored_points
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } => ExitCode::from(3),
                Error::Config(_)
                | Error::Parse(_)
                | Error::TooFewQubits { .. }
                | Error::InvalidGridParameter(_)
                | Error::InvalidProbability(_)
                | Error::ZeroShots => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
