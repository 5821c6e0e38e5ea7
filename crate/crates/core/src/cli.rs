//! JSON job configs and the command-line front end.
//!
//! Every numeric value in a config is a decimal string so that no binary
//! float ever reaches a high-precision computation. Products and quotients
//! of `pi` and `sqrt(..)` are accepted too, e.g. `sqrt(3)/2` or `pi/3`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::arbprec::{BigReal, PrecisionContext};
use crate::convergence::{laplace_csv, laplace_sweep, steklov_csv, steklov_sweep};
use crate::error::{Error, Result};
use crate::export::write_atomic;
use crate::geometry::{Domain, Hole};
use crate::laplace::{solve_laplace, BoundaryData, FourierSeries, LaplaceOptions};
use crate::lattice::Lattice;
use crate::linalg::LeastSquaresMode;
use crate::steklov::{SteklovConfig, SteklovSystem};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub precision_bits: u32,
    pub lattice: LatticeConfig,
    #[serde(default)]
    pub holes: Vec<HoleConfig>,
    /// One entry per hole (Laplace jobs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_data: Option<Vec<FourierConfig>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steklov: Option<SteklovSection>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_oversample")]
    pub oversample: usize,
    /// Side of the exported field grid; 0 disables export.
    #[serde(default)]
    pub grid_n: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub least_squares: LeastSquaresMode,
    #[serde(default = "default_true")]
    pub scale_columns: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_k_max() -> usize {
    20
}

fn default_oversample() -> usize {
    3
}

fn default_output_dir() -> String {
    "out".into()
}

fn default_true() -> bool {
    true
}

fn default_count() -> usize {
    7
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Half-periods as `[re, im]`.
    pub omega1: [String; 2],
    pub omega2: [String; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleConfig {
    pub center: [String; 2],
    pub shape: ShapeConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeConfig {
    Circle {
        radius: String,
    },
    /// `ρ(θ) = Σ_k rho_cos[k] cos(k(θ + phase))`.
    Polar {
        rho_cos: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phase: Option<String>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<String>,
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteklovSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_lo: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_hi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity_threshold: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Laplace,
    Steklov,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub problem: Problem,
    pub k_max: Vec<usize>,
    /// Also compute condition numbers of `BᵗB` and `BᵗA` (Laplace sweeps).
    #[serde(default = "default_true")]
    pub condition: bool,
    /// Eigenvalues reported per row (Steklov sweeps).
    #[serde(default = "default_count")]
    pub count: usize,
}

/// A product/quotient of factors, each a decimal, `pi` or `sqrt(decimal)`,
/// with an optional leading sign: `0.4`, `pi/3`, `-sqrt(3)/2`, `0.25*pi`.
pub fn parse_expr(ctx: PrecisionContext, s: &str) -> Result<BigReal> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) if rest.starts_with(|c: char| c.is_ascii_alphabetic()) => (true, rest),
        _ => (false, t),
    };
    let mut acc = ctx.one();
    let mut divide = false;
    let mut start = 0;
    for (i, ch) in body.char_indices().chain(std::iter::once((body.len(), '*'))) {
        if ch != '*' && ch != '/' {
            continue;
        }
        let f = factor(ctx, &body[start..i], s)?;
        acc = if divide { acc / &f } else { acc * &f };
        divide = ch == '/';
        start = i + 1;
    }
    Ok(if neg { -acc } else { acc })
}

fn factor(ctx: PrecisionContext, f: &str, whole: &str) -> Result<BigReal> {
    let f = f.trim();
    if f == "pi" {
        return Ok(ctx.pi());
    }
    if let Some(arg) = f.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        return ctx.parse(arg)?.sqrt();
    }
    ctx.parse(f).map_err(|_| Error::Parse {
        input: whole.to_string(),
        offset: 0,
        reason: "expected a decimal, pi or sqrt(decimal) factor",
    })
}

fn parse_complex(ctx: PrecisionContext, z: &[String; 2]) -> Result<crate::arbprec::BigComplex> {
    Ok(crate::arbprec::BigComplex::new(parse_expr(ctx, &z[0])?, parse_expr(ctx, &z[1])?))
}

/// A validated job: config plus the objects it describes.
#[derive(Clone, Debug)]
pub struct Job {
    pub config: JobConfig,
    pub ctx: PrecisionContext,
    pub lattice: Arc<Lattice>,
    domain: Option<Domain>,
}

impl JobConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn resolve(self) -> Result<Job> {
        let ctx = PrecisionContext::new(self.precision_bits)?;
        let l = &self.lattice;
        let w1 = parse_complex(ctx, &l.omega1)?;
        let w2 = parse_complex(ctx, &l.omega2)?;
        let lattice = Arc::new(Lattice::new(w1, w2, ctx)?);
        let domain = if self.holes.is_empty() {
            None
        } else {
            let holes = self
                .holes
                .iter()
                .map(|h| {
                    let center = parse_complex(ctx, &h.center)?;
                    match &h.shape {
                        ShapeConfig::Circle { radius } => Hole::circle(center, parse_expr(ctx, radius)?),
                        ShapeConfig::Polar { rho_cos, phase } => {
                            let co = rho_cos.iter().map(|s| ctx.parse(s)).collect::<Result<_>>()?;
                            let ph = match phase {
                                Some(p) => parse_expr(ctx, p)?,
                                None => ctx.zero(),
                            };
                            Hole::polar(center, co, ph)
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Some(Domain::new(lattice.clone(), holes)?)
        };
        if self.oversample == 0 {
            return Err(Error::Config("oversample must be positive".into()));
        }
        let job = Job {
            config: self,
            ctx,
            lattice,
            domain,
        };
        // surface data and Steklov errors before any heavy work
        if job.config.boundary_data.is_some() {
            job.boundary_data()?;
        }
        if job.config.steklov.is_some() {
            job.steklov_config()?.validate()?;
        }
        Ok(job)
    }
}

impl Job {
    pub fn domain(&self) -> Result<&Domain> {
        self.domain
            .as_ref()
            .ok_or_else(|| Error::Config("this command needs at least one hole".into()))
    }

    pub fn boundary_data(&self) -> Result<BoundaryData> {
        let entries = self
            .config
            .boundary_data
            .as_ref()
            .ok_or_else(|| Error::Config("boundary_data is required for Laplace jobs".into()))?;
        let ctx = self.ctx;
        let holes = entries
            .iter()
            .map(|f| {
                let n = f.modes.iter().map(|m| m.k).max().unwrap_or(0);
                let mut s = FourierSeries {
                    a0: match &f.a0 {
                        Some(a) => ctx.parse(a)?,
                        None => ctx.zero(),
                    },
                    cos: vec![ctx.zero(); n],
                    sin: vec![ctx.zero(); n],
                };
                for m in &f.modes {
                    if m.k == 0 {
                        return Err(Error::Config("Fourier modes start at k = 1; use a0 for constants".into()));
                    }
                    if let Some(c) = &m.cos {
                        s.cos[m.k - 1] += &ctx.parse(c)?;
                    }
                    if let Some(v) = &m.sin {
                        s.sin[m.k - 1] += &ctx.parse(v)?;
                    }
                }
                Ok(s)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(d) = &self.domain {
            if holes.len() != d.hole_count() {
                return Err(Error::Config(format!(
                    "boundary_data has {} entries for {} holes",
                    holes.len(),
                    d.hole_count()
                )));
            }
        }
        Ok(BoundaryData { holes })
    }

    pub fn laplace_options(&self) -> LaplaceOptions {
        LaplaceOptions {
            k_max: self.config.k_max,
            oversample: self.config.oversample,
            mode: self.config.least_squares,
            scale_columns: self.config.scale_columns,
        }
    }

    pub fn steklov_config(&self) -> Result<SteklovConfig> {
        let ctx = self.ctx;
        let sec = self.config.steklov.clone().unwrap_or_default();
        let mut cfg = SteklovConfig::new(ctx, self.config.k_max);
        cfg.seed = self.config.seed;
        cfg.oversample = self.config.oversample;
        cfg.scale_columns = self.config.scale_columns;
        if let Some(r) = sec.interior_r {
            cfg.interior_r = r;
        }
        if let Some(t) = &sec.tol {
            cfg.tol = ctx.parse(t)?;
            cfg.sigma_lo = -cfg.tol.clone();
        }
        if let Some(s) = &sec.sigma_lo {
            cfg.sigma_lo = ctx.parse(s)?;
        }
        if let Some(s) = &sec.sigma_hi {
            cfg.sigma_hi = ctx.parse(s)?;
        }
        if let Some(s) = &sec.step {
            cfg.step = ctx.parse(s)?;
        }
        if let Some(s) = &sec.multiplicity_threshold {
            cfg.multiplicity_threshold = ctx.parse(s)?;
        }
        Ok(cfg)
    }

    pub fn output_dir(&self) -> PathBuf {
        PathBuf::from(&self.config.output_dir)
    }
}

#[derive(Debug, Parser)]
#[command(name = "torus-harmonic", version, about = "Harmonic functions on flat tori with holes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print lattice invariants as JSON.
    Invariants(CommonArgs),
    /// Solve a Dirichlet problem and write its report.
    Laplace(CommonArgs),
    /// Locate Steklov eigenvalues and write their report.
    Steklov(CommonArgs),
    /// Sweep the truncation order and write a CSV.
    Convergence {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated k_max values; overrides the config sweep.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
        #[arg(long, value_enum)]
        problem: Option<Problem>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn load(&self) -> Result<JobConfig> {
        let mut cfg = JobConfig::from_path(&self.config)?;
        if let Some(b) = self.bits {
            cfg.precision_bits = b;
        }
        if let Some(k) = self.kmax {
            cfg.k_max = k;
        }
        if let Some(g) = self.grid {
            cfg.grid_n = g;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = o.to_string_lossy().into_owned();
        }
        Ok(cfg)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    config: &'a JobConfig,
    result: T,
}

fn write_json<T: Serialize>(path: &Path, config: &JobConfig, result: T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&Envelope { config, result })?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn cmd_invariants(cfg: JobConfig) -> Result<String> {
    let job = cfg.resolve()?;
    let mut text = serde_json::to_string_pretty(&job.lattice.report())?;
    text.push('\n');
    Ok(text)
}

/// Returns the paths written.
pub fn cmd_laplace(cfg: JobConfig) -> Result<Vec<PathBuf>> {
    let job = cfg.resolve()?;
    let sol = solve_laplace(job.domain()?, &job.boundary_data()?, job.laplace_options())?;
    let dir = job.output_dir();
    let report = dir.join("laplace_report.json");
    write_json(&report, &job.config, sol.report()?)?;
    let mut written = vec![report];
    if job.config.grid_n > 0 {
        let p = dir.join("laplace_field.csv");
        write_atomic(&p, sol.field_csv(job.config.grid_n)?.as_bytes())?;
        written.push(p);
    }
    Ok(written)
}

pub fn cmd_steklov(cfg: JobConfig) -> Result<Vec<PathBuf>> {
    let job = cfg.resolve()?;
    let scfg = job.steklov_config()?;
    let sys = SteklovSystem::new(job.domain()?, &scfg)?;
    let report = sys.scan_and_refine(&scfg)?;
    let dir = job.output_dir();
    let path = dir.join("steklov_report.json");
    let mut written = vec![path.clone()];
    if job.config.grid_n > 0 {
        for (i, cand) in report.candidates.iter().enumerate() {
            let p = dir.join(format!("steklov_eigenfunction_{}.csv", i + 1));
            write_atomic(&p, sys.eigenfunction_csv(cand, job.config.grid_n)?.as_bytes())?;
            written.push(p);
        }
    }
    write_json(&path, &job.config, report)?;
    Ok(written)
}

pub fn cmd_convergence(mut cfg: JobConfig, sweep: Option<Vec<usize>>, problem: Option<Problem>) -> Result<PathBuf> {
    let mut sw = cfg.sweep.clone().unwrap_or(SweepConfig {
        problem: problem.unwrap_or(Problem::Laplace),
        k_max: Vec::new(),
        condition: true,
        count: default_count(),
    });
    if let Some(k) = sweep {
        sw.k_max = k;
    }
    if let Some(p) = problem {
        sw.problem = p;
    }
    if sw.k_max.is_empty() {
        return Err(Error::Config("convergence needs a non-empty k_max sweep".into()));
    }
    if sw.k_max.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("the k_max sweep must be strictly increasing".into()));
    }
    cfg.sweep = Some(sw.clone());
    let job = cfg.resolve()?;
    let csv = match sw.problem {
        Problem::Laplace => {
            let rows = laplace_sweep(
                job.domain()?,
                &job.boundary_data()?,
                &sw.k_max,
                job.laplace_options(),
                sw.condition,
            );
            laplace_csv(&rows)
        }
        Problem::Steklov => {
            let rows = steklov_sweep(job.domain()?, &job.steklov_config()?, &sw.k_max, sw.count);
            steklov_csv(&rows, sw.count)
        }
    };
    let path = job.output_dir().join("convergence.csv");
    write_atomic(&path, csv.as_bytes())?;
    Ok(path)
}

/// Runs a parsed command line; the bin maps errors to exit codes.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Invariants(a) => print!("{}", cmd_invariants(a.load()?)?),
        Command::Laplace(a) => {
            for p in cmd_laplace(a.load()?)? {
                println!("{}", p.display());
            }
        }
        Command::Steklov(a) => {
            for p in cmd_steklov(a.load()?)? {
                println!("{}", p.display());
            }
        }
        Command::Convergence { common, sweep, problem } => {
            println!("{}", cmd_convergence(common.load()?, sweep, problem)?.display());
        }
    }
    Ok(())
}
