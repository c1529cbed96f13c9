use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::center_manifold::{
    build_table, from_diagonal, integrate_reduced, predict_rate, to_diagonal, CMTables, IntegratorOptions, Parity,
    ReducedState,
};
use crate::decomposition::{
    decompose, error_scaling_in_window, offset_grid, recombination_defect, solution_moments, CutoffSpec,
};
use crate::error::{Error, Result};
use crate::hermite::{project_pair, HermiteBasis, SpectralCoeffs};
use crate::params::{Config, Params};
use crate::propagator::propagator;
use crate::quadrature::{Grid, WeightedFunction};

use super::config::{ExperimentConfig, ExperimentKind, ExperimentSection, InitSpec};
use super::criteria::all_criteria;
use super::experiments::{criterion8_from, rational_f64, run_experiment};
use super::report::Report;

#[derive(Debug, Parser)]
#[command(name = "dispersion-lab", version, about = "Enhanced-diffusion laboratory for a coupled advection-diffusion model")]
pub struct Cli {
    /// TOML configuration; command-line values override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    /// Hermite truncation order.
    #[arg(long = "N", global = true)]
    pub truncation: Option<usize>,
    /// Exponent of the (1 + xi^2)^m weight.
    #[arg(long, global = true)]
    pub m: Option<u32>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InitArg {
    /// `gaussian` or a .json/.csv initial-data file.
    #[arg(long, default_value = "gaussian")]
    pub init: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve the data in Fourier space and write (k, w_hat, v_hat) at time t.
    Simulate {
        #[arg(long)]
        t: f64,
        /// Wavenumber grid `L,n`: n points on [-L, L].
        #[arg(long, default_value = "4,801", value_parser = parse_pair)]
        grid: (f64, f64),
        #[command(flatten)]
        init: InitArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hermite coefficients of sampled (xi, w, v) on an equispaced grid.
    Project {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact center-manifold coefficient table.
    Coeffs {
        #[arg(long, default_value = "even")]
        parity: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Integrate the projected coefficient system from the data's moments.
    Reduce {
        #[command(flatten)]
        init: InitArg,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Slave b to the manifold instead of integrating the full system.
        #[arg(long)]
        on_manifold: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predicted decay exponents for k = 0..=N.
    Rates,
    /// Low/high frequency split of w_hat(k, t).
    Decompose {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        init: InitArg,
        #[arg(long, default_value_t = 801)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted error between the exact solution and the Hermite approximation.
    Compare {
        #[command(flatten)]
        init: InitArg,
        /// Window in tau = log(1+t), `a,b`.
        #[arg(long, value_parser = parse_pair)]
        tau_window: (f64, f64),
        #[arg(long, default_value_t = 9)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a configured experiment, every experiment, or the acceptance suite.
    Experiment {
        /// Experiment name, `all`, or `acceptance`.
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

impl Cli {
    fn base_config(&self) -> Result<Config> {
        let mut c = match &self.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        if let Some(nu) = self.nu {
            c.nu = nu;
        }
        if let Some(n) = self.truncation {
            c.truncation = n;
        }
        if let Some(m) = self.m {
            c.m = m;
        }
        Ok(c)
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(std::fs::File::create(p)?)
        }
        None => Box::new(std::io::stdout()),
    })
}

fn write_rows(out: &Option<PathBuf>, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    write_formatted(out, header, rows, |x| format!("{x:e}"))
}

fn write_formatted(
    out: &Option<PathBuf>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
    fmt: impl Fn(f64) -> String,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|&x| fmt(x)))?;
    }
    w.flush()?;
    Ok(())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n.max(2) - 1) as f64).collect()
}

fn simulate(p: &Params, t: f64, grid: (f64, f64), init: &InitSpec, out: &Option<PathBuf>) -> Result<()> {
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let n = grid.1 as usize;
    if n < 2 || grid.1.fract() != 0.0 || !(grid.0 > 0.0) {
        return Err(Error::Config(format!("grid needs L > 0 and an integer n >= 2, got {grid:?}")));
    }
    let data = init.load()?;
    let rows = linspace(-grid.0, grid.0, n).into_iter().map(|k| {
        let u = propagator(k, t, p.nu).apply([data.w_hat(k), data.v_hat(k)]);
        vec![k, u[0].re, u[0].im, u[1].re, u[1].im]
    });
    write_rows(out, &["k", "re_w", "im_w", "re_v", "im_v"], rows)
}

fn project_file(p: &Params, tol: f64, input: &Path, out: &Option<PathBuf>) -> Result<()> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(input)?;
    let (mut x, mut w, mut v) = (vec![], vec![], vec![]);
    for rec in rdr.deserialize() {
        let (a, b, c): (f64, f64, f64) = rec?;
        x.push(a);
        w.push(b);
        v.push(c);
    }
    if x.len() < 3 {
        return Err(Error::Config(format!("{}: fewer than three samples", input.display())));
    }
    let grid = Arc::new(Grid::uniform(x[0], *x.last().unwrap(), x.len())?);
    if grid.nodes.iter().zip(&x).any(|(a, b)| (a - b).abs() > 1e-9 * b.abs().max(1.0)) {
        return Err(Error::Config(format!("{}: xi must be equispaced and increasing", input.display())));
    }
    let basis = HermiteBasis::for_nu(p.nu, p.truncation);
    let wf = WeightedFunction::new(grid.clone(), w, p.m)?;
    let vf = WeightedFunction::new(grid, v, p.m)?;
    let c = project_pair(&basis, &wf, &vf, p.truncation, 0.0, tol)?;
    writeln!(sink(out)?, "{}", serde_json::to_string_pretty(&c)?)?;
    Ok(())
}

fn coeffs(n: usize, parity: &str, format: Format) -> Result<()> {
    let parity: Parity = parity.parse()?;
    let table = build_table(parity, n);
    let rows: Vec<(usize, usize, String, String, i32)> = table
        .entries()
        .map(|(k, p, c)| (k, p, c.numer().to_string(), c.denom().to_string(), crate::center_manifold::CMCoeffTable::nu_exponent(k, p)))
        .collect();
    let mut out = std::io::stdout();
    match format {
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(k, p, a, b, e)| serde_json::json!({"k": k, "p": p, "numerator": a, "denominator": b, "nu_exponent": e}))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["k", "p", "numerator", "denominator", "nu_exponent"])?;
            for (k, p, a, b, e) in rows {
                w.write_record([k.to_string(), p.to_string(), a, b, e.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn reduce(p: &Params, init: &InitSpec, t_end: f64, samples: usize, on_manifold: bool, out: &Option<PathBuf>) -> Result<()> {
    let n = p.truncation;
    let data = init.load()?;
    let (wm, vm) = solution_moments(p.nu, &data, 0.0, n + 1)?;
    let basis = HermiteBasis::for_nu(p.nu, n);
    let c = SpectralCoeffs::from_moments(&basis, &wm[..=n], &vm, 0.0)?;
    let (a, b) = to_diagonal(&c.alpha, &c.beta, p.nu);
    let tables = CMTables::new(n.max(1));
    let s0 = if on_manifold { ReducedState::on_manifold(a, 0.0, p.nu, &tables) } else { ReducedState::new(a, b, 0.0) };
    let times: Vec<f64> = linspace(0.0, t_end, samples.max(2)).into_iter().skip(1).collect();
    let opts = IntegratorOptions { rtol: 1e-12, ..Default::default() };
    let traj = integrate_reduced(&s0, &times, on_manifold, p.nu, &tables, &opts)?;
    let mut header = vec!["t".to_string(), "tau".to_string()];
    header.extend((0..=n).map(|k| format!("alpha_{k}")));
    header.extend((0..=n).map(|k| format!("beta_{k}")));
    let rows = std::iter::once(&s0).chain(&traj.states).map(|s| {
        let (alpha, beta) = from_diagonal(&s.a, &s.b, p.nu);
        let mut r = vec![s.t, s.tau()];
        r.extend(alpha);
        r.extend(beta);
        r
    });
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    write_rows(out, &h, rows)
}

fn rates(n: usize) -> Result<()> {
    let rows = (0..=n).map(|k| {
        let r = predict_rate(k);
        vec![
            k as f64,
            -rational_f64(r.tau_exponent),
            r.nu_exponent as f64,
            r.beta_nu_exponent as f64,
            r.b_exponent.map(|x| -rational_f64(x)).unwrap_or(f64::NAN),
        ]
    });
    let header = ["k", "tau_slope", "alpha_nu_power", "beta_nu_power", "b_tau_slope"];
    write_formatted(&None, &header, rows, |x| if x.is_nan() { String::new() } else { (x + 0.0).to_string() })
}

fn decompose_cmd(p: &Params, t: f64, init: &InitSpec, points: usize, out: &Option<PathBuf>) -> Result<()> {
    let data = init.load()?;
    let spec = CutoffSpec::new(p.nu);
    let ks = offset_grid(p.nu, 2.0 * spec.r2, points);
    let rows = decompose(p.nu, p.truncation, t, &data, &ks)?;
    eprintln!("recombination defect {:.3e}", recombination_defect(&rows));
    let header = [
        "k", "low_re", "low_im", "residual_re", "residual_im", "minus_re", "minus_im", "high_re", "high_im", "total_re",
        "total_im",
    ];
    write_rows(
        out,
        &header,
        rows.iter().map(|r| {
            vec![
                r.k,
                r.low_n.re,
                r.low_n.im,
                r.residual.re,
                r.residual.im,
                r.minus_part.re,
                r.minus_part.im,
                r.high.re,
                r.high.im,
                r.total.re,
                r.total.im,
            ]
        }),
    )
}

fn print_criteria(r: &Report) {
    for c in &r.criteria {
        println!("{c}");
    }
}

fn compare(p: &Params, init: &InitSpec, window: (f64, f64), samples: usize, out: &Option<PathBuf>) -> Result<bool> {
    p.check_projection_weight()?;
    let data = init.load()?;
    let rep = error_scaling_in_window(p.nu, p.truncation, p.m, &data, window, samples)?;
    let mut r = Report::new("compare", &["tau", "error"]);
    for (t, e) in rep.taus.iter().zip(&rep.errors) {
        r.push_row(vec![*t, *e]);
    }
    r.set("slope", rep.slope);
    r.set("target", rep.target);
    r.criteria.push(criterion8_from(&rep));
    print_criteria(&r);
    if let Some(dir) = out {
        r.write(dir)?;
    }
    Ok(r.all_passed())
}

fn experiment(cfg: &Config, name: Option<&str>, out: &Option<PathBuf>) -> Result<bool> {
    if name == Some("acceptance") {
        let results = all_criteria();
        for c in &results {
            println!("{c}");
        }
        if let Some(dir) = out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("acceptance.json"), serde_json::to_string_pretty(&results)?)?;
        }
        return Ok(results.iter().all(|c| c.passed));
    }
    let section = cfg.experiment.clone();
    let kinds: Vec<ExperimentKind> = match name {
        Some("all") => ExperimentKind::ALL.to_vec(),
        Some(n) => vec![n.parse()?],
        None => vec![section.as_ref().ok_or_else(|| Error::Config("no experiment named and no [experiment] section".into()))?.name],
    };
    let mut ok = true;
    for kind in kinds {
        let mut s = section.clone().unwrap_or_else(|| ExperimentSection::new(kind));
        s.name = kind;
        if out.is_some() {
            s.out_dir = out.clone();
        }
        let ec = ExperimentConfig::new(cfg.params()?, cfg.grid, cfg.tolerances, s)?;
        let r = run_experiment(&ec)?;
        if r.no_data {
            println!("{}: no data", r.experiment);
        }
        print_criteria(&r);
        if let Some(dir) = &ec.out_dir {
            let (c, j) = r.write(dir)?;
            eprintln!("wrote {} and {}", c.display(), j.display());
        }
        ok &= r.all_passed();
    }
    Ok(ok)
}

/// Runs the parsed command; `Ok(false)` means a checked criterion failed.
pub fn execute(cli: &Cli) -> Result<bool> {
    let cfg = cli.base_config()?;
    let p = cfg.params()?;
    match &cli.command {
        Command::Simulate { t, grid, init, out } => simulate(&p, *t, *grid, &InitSpec::parse_cli(&init.init), out)?,
        Command::Project { input, out } => project_file(&p, cfg.tolerances.quadrature_tail.max(1e-10), input, out)?,
        Command::Coeffs { parity, format } => coeffs(p.truncation, parity, *format)?,
        Command::Reduce { init, t_end, samples, on_manifold, out } => {
            reduce(&p, &InitSpec::parse_cli(&init.init), *t_end, *samples, *on_manifold, out)?
        }
        Command::Rates => rates(p.truncation)?,
        Command::Decompose { t, init, points, out } => {
            decompose_cmd(&p, *t, &InitSpec::parse_cli(&init.init), *points, out)?
        }
        Command::Compare { init, tau_window, samples, out } => {
            return compare(&p, &InitSpec::parse_cli(&init.init), *tau_window, *samples, out)
        }
        Command::Experiment { name, out } => return experiment(&cfg, name.as_deref(), out),
    }
    Ok(true)
}

fn init_threads() -> Result<()> {
    if let Ok(s) = std::env::var("DISPERSION_LAB_THREADS") {
        let n: usize = s
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Config(format!("DISPERSION_LAB_THREADS must be a positive integer, got {s:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

/// Entry point for the binary: 0 when every checked criterion passes,
/// 1 when one fails, 2 on any error.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|_| execute(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
