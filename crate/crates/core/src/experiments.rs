//! Figure campaigns: seeded sample plans, CSV output and scaling summaries.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::ansatz_tree::{run, run_with_noise, AtaSolver, FourierSystem, StopRule};
use crate::direct_vqe::DirectProblem;
use crate::error::{Error, Result};
use crate::hadamard_vqe::{layers_to_fidelity, write_layers_csv, AnsatzKind, LayersConfig};
use crate::heat::{self, GridParams, HeatProblem, SpectrumKind};
use crate::linalg;
use crate::pauli::inverse_weights;
use crate::seeds;
use crate::sim::Mode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Figure {
    Landscape,
    Fig5,
    Fig7,
    Fig10,
    Fig11,
    Fig12,
    Fig13,
    Evolve,
    ErrorBound,
}

impl Figure {
    pub const ALL: [Figure; 9] = [
        Figure::Landscape,
        Figure::Fig5,
        Figure::Fig7,
        Figure::Fig10,
        Figure::Fig11,
        Figure::Fig12,
        Figure::Fig13,
        Figure::Evolve,
        Figure::ErrorBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Landscape => "landscape",
            Figure::Fig5 => "fig5",
            Figure::Fig7 => "fig7",
            Figure::Fig10 => "fig10",
            Figure::Fig11 => "fig11",
            Figure::Fig12 => "fig12",
            Figure::Fig13 => "fig13",
            Figure::Evolve => "evolve",
            Figure::ErrorBound => "errorbound",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::Config(format!("unknown campaign '{s}'")))
    }
}

/// One measured quantity of one campaign row.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: Figure,
    pub n: usize,
    pub c: f64,
    pub method: String,
    pub metric: String,
    pub value: f64,
    pub seed: u64,
    /// `None` in exact mode.
    pub shots: Option<u64>,
    pub wall_ms: f64,
}

/// Writes records; wall time is optional because it breaks byte-for-byte reproducibility.
pub fn write_records<W: Write>(out: W, records: &[ExperimentRecord], with_timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["experiment", "n", "c", "method", "metric", "value", "seed", "shots"];
    if with_timing {
        header.push("wall_ms");
    }
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.experiment.to_string(),
            r.n.to_string(),
            r.c.to_string(),
            r.method.clone(),
            r.metric.clone(),
            r.value.to_string(),
            r.seed.to_string(),
            r.shots.map_or_else(|| "exact".to_string(), |s| s.to_string()),
        ];
        if with_timing {
            row.push(format!("{:.3}", r.wall_ms));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub figure: Figure,
    pub n: Vec<usize>,
    /// Explicit grid parameters; fig7, fig12 and fig13 draw `c_draws` values when empty.
    pub c: Vec<f64>,
    pub c_draws: usize,
    pub samples: usize,
    pub mode: Mode,
    pub seed: u64,
    pub workers: usize,
    pub out: PathBuf,
    pub p: Vec<f64>,
    pub ansatz: Vec<AnsatzKind>,
    pub target: f64,
    pub max_depth: usize,
    pub layer_cap: usize,
    pub grid: usize,
    pub n_tau: usize,
    pub eps_tilde: f64,
}

impl CampaignConfig {
    /// Default protocol of each campaign.
    pub fn preset(figure: Figure) -> Self {
        let mut cfg = Self {
            figure,
            n: (2..=8).collect(),
            c: Vec::new(),
            c_draws: 20,
            samples: 1000,
            mode: Mode::Exact,
            seed: 0,
            workers: 0,
            out: PathBuf::from(format!("{}.csv", figure.name())),
            p: Vec::new(),
            ansatz: vec![AnsatzKind::Hea, AnsatzKind::Cba, AnsatzKind::Daa],
            target: 0.99,
            max_depth: 256,
            layer_cap: 64,
            grid: 30,
            n_tau: 10,
            eps_tilde: 1e-3,
        };
        match figure {
            Figure::Landscape => {
                cfg.n = vec![2];
                cfg.samples = 1;
            }
            Figure::Fig5 => {
                cfg.n = (2..=6).collect();
                cfg.c = vec![0.1, 0.5, 1.0, 2.0];
                cfg.samples = 20;
            }
            Figure::Fig10 => {
                cfg.c = vec![0.1, 0.5, 1.0, 2.0];
                cfg.samples = 20;
            }
            Figure::Fig11 => {
                cfg.n = vec![4, 6];
                cfg.c = vec![0.05, 0.3, 0.5, 1.0];
            }
            Figure::Fig12 => {
                cfg.n = vec![2];
                cfg.p = vec![0.0, 0.25, 0.5, 0.75, 1.0];
            }
            Figure::Fig13 => {
                cfg.p = vec![1.0];
            }
            Figure::Evolve => {
                cfg.n = vec![3];
                cfg.c = vec![0.5, 1.0, 2.0];
                cfg.samples = 1;
            }
            Figure::ErrorBound => {
                cfg.c = vec![0.1, 0.5, 1.0, 2.0];
                cfg.n = vec![2];
                cfg.samples = 1;
            }
            Figure::Fig7 => {}
        }
        cfg
    }

    /// Checks parameters and qubit caps; nothing is computed before this passes.
    pub fn validate(&self) -> Result<()> {
        let cfgerr = |m: String| Err(Error::Config(m));
        if self.n.is_empty() {
            return cfgerr("no qubit counts given".into());
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 2) {
            return cfgerr(format!("n = {n} is below the minimum of 2"));
        }
        if self.samples == 0 {
            return cfgerr("samples must be positive".into());
        }
        self.mode.validate().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(&c) = self.c.iter().find(|&&c| !(c.is_finite() && c > 0.0)) {
            return cfgerr(format!("grid parameter c = {c} must be positive"));
        }
        let needs_c = matches!(self.figure, Figure::Fig5 | Figure::Fig10 | Figure::Fig11 | Figure::Evolve | Figure::ErrorBound);
        if needs_c && self.c.is_empty() {
            return cfgerr(format!("{} needs at least one value of c", self.figure));
        }
        if !needs_c && self.c.is_empty() && self.c_draws == 0 && matches!(self.figure, Figure::Fig7 | Figure::Fig12 | Figure::Fig13) {
            return cfgerr("either c values or c draws are required".into());
        }
        if let Some(&p) = self.p.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
            return cfgerr(format!("noise probability {p} outside [0, 1]"));
        }
        if matches!(self.figure, Figure::Fig12 | Figure::Fig13) && self.p.is_empty() {
            return cfgerr("no noise probabilities given".into());
        }
        if !(self.target > 0.0 && self.target <= 1.0) {
            return cfgerr(format!("target fidelity {} outside (0, 1]", self.target));
        }
        match self.figure {
            Figure::Landscape => {
                if self.n != [2] {
                    return cfgerr("the landscape campaign is defined for n = 2 only".into());
                }
                if self.grid < 3 {
                    return cfgerr("landscape grid must be at least 3".into());
                }
            }
            Figure::Fig5 if self.ansatz.is_empty() => return cfgerr("no ansatz kinds given".into()),
            Figure::Evolve | Figure::ErrorBound if self.n_tau == 0 => return cfgerr("n_tau must be positive".into()),
            Figure::ErrorBound if !(self.eps_tilde > 0.0) => return cfgerr("eps_tilde must be positive".into()),
            _ => {}
        }
        let cap = heat::dense_cap_qubits();
        let max_n = *self.n.iter().max().expect("nonempty");
        // The Hadamard-test circuits carry one ancilla on top of the register.
        let needed = match self.figure {
            Figure::Fig5 | Figure::Fig10 | Figure::Fig12 | Figure::Fig13 | Figure::Evolve => max_n + 1,
            Figure::ErrorBound => 0,
            _ => max_n,
        };
        if needed > cap {
            return Err(Error::CapExceeded { qubits: needed, cap });
        }
        Ok(())
    }

    fn shots(&self) -> Option<u64> {
        match self.mode {
            Mode::Exact => None,
            Mode::Shots { shots, .. } => Some(shots),
        }
    }

    fn c_values(&self, stream: &str) -> Vec<f64> {
        if !self.c.is_empty() {
            return self.c.clone();
        }
        seeds::random_cs(self.c_draws, 0.1, 2.0, &mut seeds::rng(seeds::derive(self.seed, stream, 0)))
    }

    /// Rows the campaign must emit.
    pub fn planned_rows(&self) -> usize {
        let (nn, nc) = (self.n.len(), self.c.len());
        match self.figure {
            Figure::Landscape => self.samples * self.grid * self.grid,
            Figure::Fig5 => self.ansatz.len() * nn * nc,
            Figure::Fig7 => nn,
            Figure::Fig10 => nn * nc * self.samples,
            Figure::Fig11 => self.n.iter().map(|&n| nc << n).sum(),
            Figure::Fig12 | Figure::Fig13 => nn * self.p.len(),
            Figure::Evolve => nn * nc * self.samples * (self.n_tau + 1),
            Figure::ErrorBound => nc * self.n_tau,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub figure: Figure,
    pub path: PathBuf,
    pub rows: usize,
    pub records: Vec<ExperimentRecord>,
}

type Table = (Vec<&'static str>, Vec<Vec<String>>);

fn write_table(path: &Path, table: &Table) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(&table.0)?;
    for row in &table.1 {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (mean, var.sqrt())
}

fn record(cfg: &CampaignConfig, n: usize, c: f64, method: &str, metric: &str, value: f64, seed: u64, t0: Instant) -> ExperimentRecord {
    ExperimentRecord {
        experiment: cfg.figure,
        n,
        c,
        method: method.into(),
        metric: metric.into(),
        value,
        seed,
        shots: cfg.shots(),
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    }
}

/// Validates, runs and writes one campaign. Rows run in parallel on up to
/// `workers` threads (0 = all cores) and are merged in row-key order.
pub fn campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.workers > 0 {
        builder = builder.num_threads(cfg.workers);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;
    let (table, records) = pool.install(|| match cfg.figure {
        Figure::Landscape => landscape(cfg),
        Figure::Fig5 => fig5(cfg),
        Figure::Fig7 => fig7(cfg),
        Figure::Fig10 => fig10(cfg),
        Figure::Fig11 => fig11(cfg),
        Figure::Fig12 | Figure::Fig13 => noise(cfg),
        Figure::Evolve => evolve(cfg),
        Figure::ErrorBound => error_bound(cfg),
    })?;
    let planned = cfg.planned_rows();
    if table.1.len() != planned {
        return Err(Error::Config(format!("{} produced {} rows, planned {planned}", cfg.figure, table.1.len())));
    }
    write_table(&cfg.out, &table)?;
    Ok(CampaignReport { figure: cfg.figure, path: cfg.out.clone(), rows: planned, records })
}

fn landscape(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for s in 0..cfg.samples {
        let t0 = Instant::now();
        let seed = seeds::derive(cfg.seed, "landscape-b", s as u64);
        let b = seeds::random_zero_mean_b::<f64, _>(4, &mut seeds::rng(seed));
        let problem = DirectProblem::new(&b)?;
        let land = problem.scan_landscape(cfg.grid);
        for i in 0..cfg.grid {
            for j in 0..cfg.grid {
                rows.push(vec![s.to_string(), land.axis[i].to_string(), land.axis[j].to_string(), land.at(i, j).to_string()]);
            }
        }
        records.push(record(cfg, 2, 0.0, "direct", "min_energy", land.min(), seed, t0));
    }
    Ok(((vec!["sample", "theta1", "theta2", "energy"], rows), records))
}

fn fig5(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let mut results = Vec::new();
    let mut records = Vec::new();
    let mut index = 0u64;
    for &kind in &cfg.ansatz {
        for &n in &cfg.n {
            for &c in &cfg.c {
                let t0 = Instant::now();
                let seed = seeds::derive(cfg.seed, "fig5", index);
                index += 1;
                let lc = LayersConfig { target: cfg.target, samples: cfg.samples, cap: cfg.layer_cap, seed, ..Default::default() };
                let r = layers_to_fidelity(kind, n, c, &lc)?;
                let m = r.m_star.map_or(f64::NAN, |m| m as f64);
                records.push(record(cfg, n, c, &kind.to_string(), "layers", m, seed, t0));
                results.push(r);
            }
        }
    }
    let mut buf = Vec::new();
    write_layers_csv(&mut buf, &results)?;
    let mut rdr = csv::Reader::from_reader(buf.as_slice());
    let rows = rdr.records().map(|r| r.map(|r| r.iter().map(String::from).collect())).collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok(((vec!["ansatz", "n", "c", "M_star", "mean_fidelity", "censored"], rows), records))
}

fn fig7(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let cs = cfg.c_values("fig7-c");
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &n in &cfg.n {
        let t0 = Instant::now();
        let per_b: Vec<Vec<f64>> = (0..cfg.samples)
            .into_par_iter()
            .map(|s| {
                let seed = seeds::derive(cfg.seed, "fig7-b", ((n as u64) << 32) | s as u64);
                let b = seeds::random_complex_b::<f64, _>(1 << n, &mut seeds::rng(seed));
                cs.iter()
                    .map(|&c| {
                        let x = heat::spectral_solve(&heat::spectrum(n, c)?, &b)?;
                        let y = heat::spectral_solve(&heat::substituted_spectrum(n, c)?, &b)?;
                        linalg::fidelity(&x, &y)
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let all: Vec<f64> = per_b.into_iter().flatten().collect();
        let (mean, std) = mean_std(&all);
        let min = all.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(vec![n.to_string(), mean.to_string(), std.to_string(), min.to_string(), all.len().to_string()]);
        records.push(record(cfg, n, f64::NAN, "substitution", "mean_fidelity", mean, cfg.seed, t0));
    }
    Ok(((vec!["n", "mean_fidelity", "std_fidelity", "min_fidelity", "count"], rows), records))
}

fn fig10(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let stop = StopRule { target: cfg.target, max_depth: cfg.max_depth };
    let keys: Vec<(usize, f64, usize)> = cfg
        .n
        .iter()
        .flat_map(|&n| cfg.c.iter().flat_map(move |&c| (0..cfg.samples).map(move |s| (n, c, s))))
        .collect();
    let out: Vec<(Vec<String>, ExperimentRecord)> = keys
        .par_iter()
        .enumerate()
        .map(|(idx, &(n, c, s))| {
            let t0 = Instant::now();
            let seed = seeds::derive(cfg.seed, "fig10-b", ((n as u64) << 32) | s as u64);
            let b = seeds::random_complex_b::<f64, _>(1 << n, &mut seeds::rng(seed));
            let sys = FourierSystem::new(n, c, &b)?;
            let r = run(&sys, &stop, cfg.mode.reseeded(idx as u64))?;
            let row = vec![
                n.to_string(),
                c.to_string(),
                r.depth.to_string(),
                r.fidelity.to_string(),
                r.loss.to_string(),
                r.ledger.total().to_string(),
                r.censored.to_string(),
                seed.to_string(),
            ];
            Ok((row, record(cfg, n, c, "ata", "depth", r.depth as f64, seed, t0)))
        })
        .collect::<Result<_>>()?;
    let (rows, records) = out.into_iter().unzip();
    Ok(((vec!["n", "c", "depth", "fidelity", "loss", "measurements", "censored", "seed"], rows), records))
}

fn fig11(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &n in &cfg.n {
        for &c in &cfg.c {
            let t0 = Instant::now();
            let h = inverse_weights::<f64>(n, c)?;
            let mut max = 0.0f64;
            for t in h.terms() {
                max = max.max(t.weight.norm());
                rows.push(vec![n.to_string(), c.to_string(), t.word.to_string(), t.weight.norm().to_string()]);
            }
            records.push(record(cfg, n, c, "inverse-weights", "max_abs_weight", max, cfg.seed, t0));
        }
    }
    Ok(((vec!["n", "c", "word", "abs_weight"], rows), records))
}

fn noise(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let stream = if cfg.figure == Figure::Fig12 { "fig12" } else { "fig13" };
    let cs = cfg.c_values(&format!("{stream}-c"));
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &n in &cfg.n {
        for &p in &cfg.p {
            let t0 = Instant::now();
            // At p = 1 every Hadamard-test estimate vanishes and α collapses onto
            // the root, so growing past the root cannot change x.
            let depth = if p == 1.0 { 1 } else { cfg.max_depth };
            let stop = StopRule { target: cfg.target, max_depth: depth };
            let fids: Vec<Vec<f64>> = (0..cfg.samples)
                .into_par_iter()
                .map(|s| {
                    let seed = seeds::derive(cfg.seed, &format!("{stream}-b"), ((n as u64) << 32) | s as u64);
                    let b = seeds::random_complex_b::<f64, _>(1 << n, &mut seeds::rng(seed));
                    cs.iter()
                        .map(|&c| run_with_noise(&FourierSystem::new(n, c, &b)?, p, &stop).map(|r| r.fidelity))
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<_>>()?;
            let all: Vec<f64> = fids.into_iter().flatten().collect();
            let (mean, std) = mean_std(&all);
            rows.push(vec![n.to_string(), p.to_string(), mean.to_string(), std.to_string(), all.len().to_string()]);
            records.push(record(cfg, n, f64::NAN, "ata-noise", "mean_fidelity", mean, cfg.seed, t0));
        }
    }
    Ok(((vec!["n", "p", "mean_fidelity", "std_fidelity", "count"], rows), records))
}

fn evolve(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    let mut index = 0u64;
    for &n in &cfg.n {
        for &c in &cfg.c {
            for s in 0..cfg.samples {
                let t0 = Instant::now();
                let seed = seeds::derive(cfg.seed, "evolve-chi", index);
                index += 1;
                let chi: Vec<f64> = seeds::random_real_b::<f64, _>(1 << n, &mut seeds::rng(seed)).iter().map(|z| z.re).collect();
                let grid = GridParams::from_c(n, c, cfg.n_tau)?;
                let problem = HeatProblem::new(grid, chi, vec![vec![0.0; 1 << n]; cfg.n_tau])?;
                let mut solver = AtaSolver { stop: StopRule { target: cfg.target, max_depth: cfg.max_depth }, mode: cfg.mode.reseeded(index) };
                let rep = heat::time_step_evolve(&problem, &mut solver, cfg.n_tau, SpectrumKind::Substituted)?;
                for (step, e) in rep.infidelity.iter().enumerate() {
                    let violation = rep.bound_violations.contains(&step);
                    rows.push(vec![n.to_string(), c.to_string(), s.to_string(), step.to_string(), e.to_string(), violation.to_string()]);
                }
                records.push(record(cfg, n, c, "ata-evolve", "bound_violations", rep.bound_violations.len() as f64, seed, t0));
            }
        }
    }
    Ok(((vec!["n", "c", "sample", "step", "infidelity", "violation"], rows), records))
}

fn error_bound(cfg: &CampaignConfig) -> Result<(Table, Vec<ExperimentRecord>)> {
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &c in &cfg.c {
        let t0 = Instant::now();
        let mut worst = 0.0f64;
        for n_tau in 1..=cfg.n_tau {
            let closed = heat::error_accumulation(cfg.eps_tilde, c, n_tau)?;
            let rec = heat::error_accumulation_recursive(cfg.eps_tilde, c, n_tau)?;
            let rel = (closed - rec).abs() / rec.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            rows.push(vec![c.to_string(), n_tau.to_string(), closed.to_string(), rec.to_string(), rel.to_string()]);
        }
        records.push(record(cfg, 0, c, "error-model", "max_rel_diff", worst, cfg.seed, t0));
    }
    Ok(((vec!["c", "n_tau", "closed", "recursive", "rel_diff"], rows), records))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Polynomial,
    Exponential,
}

impl fmt::Display for Growth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Growth::Polynomial => "polynomial",
            Growth::Exponential => "exponential",
        })
    }
}

/// Least-squares fits of one `(n, y)` series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    /// Slope of `log y` against `log n`.
    pub slope: f64,
    pub residual: f64,
    /// Slope of `log y` against `n`.
    pub semilog_slope: f64,
    pub semilog_residual: f64,
    pub growth: Growth,
    pub monotone: bool,
}

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ssr = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    (slope, ssr)
}

/// Fits `log y` against `log n` and against `n`; the smaller residual decides the growth class.
pub fn fit_series(points: &[(f64, f64)]) -> Result<SeriesFit> {
    if points.len() < 3 {
        return Err(Error::Config(format!("need at least 3 points to fit, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Config(format!("non-positive point ({}, {}) cannot be fitted on log axes", p.0, p.1)));
    }
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let (slope, residual) = line_fit(&lx, &ly);
    let (semilog_slope, semilog_residual) = line_fit(&x, &ly);
    let growth = if residual <= semilog_residual { Growth::Polynomial } else { Growth::Exponential };
    let monotone = points.windows(2).all(|w| w[1].1 >= w[0].1);
    Ok(SeriesFit { slope, residual, semilog_slope, semilog_residual, growth, monotone })
}

/// One point of a scaling series; `censored` points carry a lower bound only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub n: usize,
    pub value: f64,
    pub censored: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSummary {
    /// Grouping key, e.g. `c=2` or `cba c=0.1`.
    pub key: String,
    pub points: Vec<SeriesPoint>,
    pub censored_points: usize,
    pub fit: SeriesFit,
}

/// Fits the uncensored points of a series; a series with nothing else is an error.
pub fn summarize_series(key: &str, points: &[SeriesPoint]) -> Result<SeriesSummary> {
    let usable: Vec<(f64, f64)> = points.iter().filter(|p| !p.censored).map(|p| (p.n as f64, p.value)).collect();
    if usable.is_empty() {
        return Err(Error::Config(format!("series {key} is censored at every point")));
    }
    let fit = fit_series(&usable)?;
    Ok(SeriesSummary {
        key: key.to_string(),
        points: points.to_vec(),
        censored_points: points.iter().filter(|p| p.censored).count(),
        fit,
    })
}

/// Summarizes a `fig10` (mean depth per `n`, grouped by `c`) or `fig5`
/// (`M*` per `n`, grouped by ansatz and `c`) CSV.
pub fn summarize<R: Read>(input: R) -> Result<Vec<SeriesSummary>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse(format!("missing column '{name}'")));
    let (value_col, group_cols): (usize, Vec<usize>) = if headers.iter().any(|h| h == "depth") {
        (col("depth")?, vec![col("c")?])
    } else if headers.iter().any(|h| h == "M_star") {
        (col("M_star")?, vec![col("ansatz")?, col("c")?])
    } else {
        return Err(Error::Parse("expected a fig10 (depth) or fig5 (M_star) CSV".into()));
    };
    let (n_col, cens_col) = (col("n")?, col("censored")?);
    // key -> n -> (values, any censored)
    let mut groups: Vec<(String, Vec<(usize, Vec<f64>, bool)>)> = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let get = |i: usize| row.get(i).ok_or_else(|| Error::Parse("short row".into()));
        let key = group_cols
            .iter()
            .map(|&i| {
                let v = get(i)?;
                Ok(if headers.get(i) == Some("c") { format!("c={v}") } else { v.to_string() })
            })
            .collect::<Result<Vec<_>>>()?
            .join(" ");
        let n: usize = get(n_col)?.parse().map_err(|_| Error::Parse(format!("bad n '{}'", get(n_col).unwrap_or(""))))?;
        let censored: bool = get(cens_col)?.parse().map_err(|_| Error::Parse("bad censored flag".into()))?;
        let raw = get(value_col)?;
        let value: f64 = if raw.is_empty() { f64::NAN } else { raw.parse().map_err(|_| Error::Parse(format!("bad value '{raw}'")))? };
        let slot = match groups.iter().position(|g| g.0 == key) {
            Some(i) => i,
            None => {
                groups.push((key.clone(), Vec::new()));
                groups.len() - 1
            }
        };
        let series = &mut groups[slot].1;
        match series.iter_mut().find(|p| p.0 == n) {
            Some(p) => {
                p.1.push(value);
                p.2 |= censored;
            }
            None => series.push((n, vec![value], censored)),
        }
    }
    groups
        .into_iter()
        .map(|(key, mut series)| {
            series.sort_by_key(|p| p.0);
            let points: Vec<SeriesPoint> = series
                .iter()
                .map(|(n, vals, cens)| SeriesPoint { n: *n, value: vals.iter().sum::<f64>() / vals.len() as f64, censored: *cens })
                .collect();
            summarize_series(&key, &points)
        })
        .collect()
}

pub fn summarize_file(path: &Path) -> Result<Vec<SeriesSummary>> {
    summarize(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_and_exponential() {
        let sq: Vec<(f64, f64)> = (2..=8).map(|n| (n as f64, (n * n) as f64)).collect();
        let f = fit_series(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-6);
        assert_eq!(f.growth, Growth::Polynomial);
        let ex: Vec<(f64, f64)> = (2..=8).map(|n| (n as f64, 2f64.powi(n))).collect();
        assert_eq!(fit_series(&ex).unwrap().growth, Growth::Exponential);
    }

    #[test]
    fn censored_only_series_is_an_error() {
        let pts = [SeriesPoint { n: 2, value: 5.0, censored: true }, SeriesPoint { n: 3, value: 6.0, censored: true }];
        assert!(summarize_series("c=0.1", &pts).is_err());
    }

    #[test]
    fn planned_rows_for_presets() {
        let cfg = CampaignConfig::preset(Figure::Fig10);
        assert_eq!(cfg.planned_rows(), 7 * 4 * 20);
        cfg.validate().unwrap();
    }
}
