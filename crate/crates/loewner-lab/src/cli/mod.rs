//! Command-line front end. The binary only forwards its arguments to [`run`].

pub mod config;
pub mod report;
pub mod svg;

use crate::curve::{Ambient, CurveSamples, Root};
use crate::driving::DrivingFunction;
use crate::energy::{dirichlet_energy_driving, loop_driving, loop_energy, LoopParametrization};
use crate::error::{Error, Result};
use crate::field_energy::{j_energy_area, j_energy_boundary, j_energy_inverse, JEstimate, LogDerivField, Method};
use crate::loewner::{estimate_driving, loop_from_driving, trace_curve, SlitMapChain};
use crate::spectral::{h_functional_maps, ConformalMetric};
use crate::teichmuller::{jordan_maps, liouville_action, welding, JordanMapsPair, JordanOptions};
use crate::{io, C64};
use clap::{Args, Parser, Subcommand, ValueEnum};
pub use config::{Config, CONFIG_ENV};
pub use report::{Estimate, Residual, VerifyReport, VerifyRow};
use serde::Serialize;
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum AmbientArg {
    Half,
    Slit,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Curve,
    Welding,
    Field,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Area,
    Inverse,
    Boundary,
}

#[derive(Parser, Debug)]
#[command(name = "loewner-lab", version, about = "Loewner energy of chords and loops, computed several ways")]
pub struct Cli {
    /// Config file (flat `key = value` TOML).
    #[arg(long, global = true, env = CONFIG_ENV)]
    pub config: Option<PathBuf>,
    /// Relative tolerance of the quadratures (overrides `j_rel_tol` and `disk_tol`).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Samples per traced curve (overrides `trace_steps`).
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Fourier modes of the jump operator (overrides `modes`).
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    /// J truncation radius factor; for `plot`, the half-width of the window.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

/// Exactly one input source.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Driving function CSV with columns `t,w`.
    #[arg(long)]
    pub driving: Option<PathBuf>,
    /// Curve CSV with columns `re,im` and an optional `.json` sidecar.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Built-in input: `circle[:r]`, `ellipse:c`, `linear:λ[:T]`, `zero[:T]`, `bump:a`.
    #[arg(long)]
    pub shape: Option<String>,
}

/// Any number of inputs.
#[derive(Args, Debug, Clone)]
pub struct Inputs {
    #[arg(long)]
    pub driving: Vec<PathBuf>,
    #[arg(long)]
    pub curve: Vec<PathBuf>,
    #[arg(long)]
    pub shape: Vec<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Trace the chord of a driving function.
    Trace {
        #[arg(long)]
        driving: PathBuf,
        #[arg(long, value_enum, default_value = "half")]
        ambient: AmbientArg,
    },
    /// Recover the driving function of an arc.
    Driving {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Loewner energy.
    Energy {
        #[command(subcommand)]
        of: EnergyOf,
    },
    /// Dirichlet energy of the log-derivative of the uniformizing map.
    Jenergy {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, value_delimiter = ',')]
        method: Vec<MethodArg>,
    },
    /// Universal Liouville action of a loop.
    Liouville {
        #[command(flatten)]
        input: Input,
    },
    /// Zeta-regularized determinant of the Neumann jump operator.
    Detzeta {
        #[command(flatten)]
        input: Input,
    },
    /// Cross-check all methods; exits 1 when a residual exceeds its bound.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        /// Record wall-clock runtimes (makes output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// SVG of a curve, a welding or the field log|h'|.
    Plot {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "curve")]
        kind: PlotKind,
        /// Cells per side of the field grid.
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum EnergyOf {
    /// Dirichlet energy of a driving function.
    Driving {
        #[arg(long)]
        driving: PathBuf,
    },
    /// Loop energy of a Jordan curve.
    Loop {
        #[command(flatten)]
        input: Input,
    },
}

/// A resolved input.
#[derive(Clone, Debug)]
pub enum Source {
    Driving(String, DrivingFunction),
    Curve(String, CurveSamples),
}

/// `circle[:r]`, `ellipse:c`, `linear:λ[:T]`, `zero[:T]`, `bump:a`.
pub fn parse_shape(spec: &str, cfg: &Config) -> Result<Source> {
    let bad = || Error::InvalidInput(format!("unknown shape `{spec}`"));
    let mut parts = spec.split(':');
    let kind = parts.next().unwrap_or("");
    let nums: Vec<f64> = parts.map(|p| p.parse::<f64>().map_err(|_| bad())).collect::<Result<_>>()?;
    let arg = |k: usize, d: Option<f64>| nums.get(k).copied().or(d).ok_or_else(bad);
    let name = spec.to_string();
    let n = cfg.shape_samples;
    Ok(match kind {
        "circle" => Source::Curve(name, CurveSamples::circle(C64::new(0.0, 0.0), positive(arg(0, Some(1.0))?)?, n)),
        "ellipse" => {
            let c = arg(0, None)?;
            if !(0.0..1.0).contains(&c) {
                return Err(Error::InvalidInput(format!("ellipse parameter must lie in [0, 1), got {c}")));
            }
            Source::Curve(name, CurveSamples::joukowski_ellipse(c, n))
        }
        "linear" => Source::Driving(name, DrivingFunction::linear(arg(0, None)?, positive(arg(1, Some(1.0))?)?)),
        "zero" => Source::Driving(name, DrivingFunction::zero(positive(arg(0, Some(1.0))?)?)),
        "bump" => Source::Driving(name, bump(arg(0, None)?)?),
        _ => return Err(bad()),
    })
}

fn positive(x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::InvalidInput(format!("expected a positive number, got {x}")))
    }
}

/// `a sin²(πt)` on `[0, 1]`, 64 knots.
pub fn bump(a: f64) -> Result<DrivingFunction> {
    DrivingFunction::sample(|t| a * (std::f64::consts::PI * t).sin().powi(2), 1.0, 64)
}

impl Input {
    pub fn resolve(&self, cfg: &Config) -> Result<Source> {
        let given = self.driving.is_some() as u8 + self.curve.is_some() as u8 + self.shape.is_some() as u8;
        if given != 1 {
            return Err(Error::InvalidInput("give exactly one of --driving, --curve, --shape".into()));
        }
        if let Some(p) = &self.driving {
            return Ok(Source::Driving(p.display().to_string(), io::read_driving(p)?));
        }
        if let Some(p) = &self.curve {
            return Ok(Source::Curve(p.display().to_string(), io::read_curve(p)?));
        }
        parse_shape(self.shape.as_deref().unwrap_or_default(), cfg)
    }
}

impl Inputs {
    pub fn resolve(&self, cfg: &Config) -> Result<Vec<Source>> {
        let mut out = Vec::new();
        for p in &self.driving {
            out.push(Source::Driving(p.display().to_string(), io::read_driving(p)?));
        }
        for p in &self.curve {
            out.push(Source::Curve(p.display().to_string(), io::read_curve(p)?));
        }
        for s in &self.shape {
            out.push(parse_shape(s, cfg)?);
        }
        if out.is_empty() {
            return Err(Error::InvalidInput("no inputs; use --driving, --curve or --shape".into()));
        }
        Ok(out)
    }
}

/// The loop an input stands for; a driving function gives the loop through ∞ it generates.
pub fn as_loop(src: &Source, cfg: &Config) -> Result<CurveSamples> {
    match src {
        Source::Curve(_, c) if c.closed => Ok(c.clone()),
        Source::Curve(..) => Err(Error::NotClosed),
        Source::Driving(_, w) => loop_from_driving(w, cfg.loop_samples, cfg.loop_reach),
    }
}

fn bounded_maps(curve: &CurveSamples) -> Result<(CurveSamples, JordanMapsPair)> {
    let (bounded, _) = curve.bounded_image();
    let maps = jordan_maps(&bounded, JordanOptions::default())?;
    Ok((bounded, maps))
}

/// Exit status for an error: 2 for bad input, 1 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::InvalidInput(_)
        | Error::InvalidTime { .. }
        | Error::NotClosed
        | Error::NotSimple(..)
        | Error::NotJordan(_)
        | Error::RootNotEndpoint
        | Error::Degenerate(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Effective configuration: file (or defaults) overridden by command-line flags.
pub fn effective_config(cli: &Cli) -> Result<Config> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    if let Some(t) = cli.tol {
        cfg.j_rel_tol = t;
        cfg.disk_tol = t;
    }
    if let Some(s) = cli.steps {
        cfg.trace_steps = s;
    }
    if let Some(m) = cli.modes {
        cfg.modes = m;
    }
    if let (Some(r), false) = (cli.radius, matches!(cli.command, Command::Plot { .. })) {
        cfg.radius_factor = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data") + "\n"
}

fn format(cli: &Cli, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(Error::InvalidInput(format!("format {f:?} not supported here")))
    }
}

#[derive(Serialize)]
struct ValueWithError {
    value: f64,
    error_bar: f64,
}

#[derive(Serialize)]
struct JRow {
    method: Method,
    value: f64,
    error_bound: f64,
    tail_bound: f64,
    cells: usize,
}

impl From<&JEstimate> for JRow {
    fn from(j: &JEstimate) -> Self {
        JRow { method: j.method, value: j.total(), error_bound: j.bound(), tail_bound: j.tail_bound, cells: j.cells }
    }
}

#[derive(Serialize)]
struct DetZetaOut {
    eigenvalues_head: Vec<f64>,
    det_zeta: f64,
    log_det_zeta: f64,
    h_value: f64,
    length: f64,
    n_modes: usize,
    tail_residual: f64,
}

#[derive(Serialize)]
struct DrivingOut<'a> {
    times: &'a [f64],
    values: &'a [f64],
    hausdorff: f64,
}

fn execute(cli: &Cli) -> Result<i32> {
    let cfg = effective_config(cli)?;
    match &cli.command {
        Command::Trace { driving, ambient } => {
            let w = io::read_driving(driving)?;
            let amb = match ambient {
                AmbientArg::Half => Ambient::HalfPlane,
                AmbientArg::Slit => Ambient::SlitPlane,
            };
            let curve = trace_curve(&w, cfg.trace_steps, amb)?;
            match format(cli, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])? {
                Format::Csv => match &cli.out {
                    Some(p) => io::write_curve(p, &curve)?,
                    None => print!("{}", io::curve_csv(&curve)),
                },
                Format::Json => emit(cli, &json(&curve))?,
                Format::Svg => emit(cli, &svg::curve(&curve.points, false, None))?,
            }
        }
        Command::Driving { curve } => {
            let est = estimate_driving(&io::read_curve(curve)?)?;
            match format(cli, Format::Csv, &[Format::Csv, Format::Json])? {
                Format::Csv => emit(cli, &io::driving_csv(&est.driving))?,
                _ => emit(
                    cli,
                    &json(&DrivingOut { times: est.driving.times(), values: est.driving.values(), hausdorff: est.hausdorff }),
                )?,
            }
        }
        Command::Energy { of } => {
            format(cli, Format::Json, &[Format::Json])?;
            let out = match of {
                EnergyOf::Driving { driving } => {
                    ValueWithError { value: dirichlet_energy_driving(&io::read_driving(driving)?), error_bar: 0.0 }
                }
                EnergyOf::Loop { input } => {
                    let curve = as_loop(&input.resolve(&cfg)?, &cfg)?;
                    let par = LoopParametrization::rooted(curve.root.unwrap_or(Root::point(curve.points[0])));
                    let e = loop_energy(&curve, &par)?;
                    ValueWithError { value: e.value, error_bar: e.error_bar }
                }
            };
            emit(cli, &json(&out))?;
        }
        Command::Jenergy { input, method } => {
            format(cli, Format::Json, &[Format::Json])?;
            let opts = cfg.j_options();
            let mut rows = Vec::new();
            match input.resolve(&cfg)? {
                Source::Driving(_, w) => {
                    let w = w.shifted(-w.values()[0]);
                    let chain = SlitMapChain::from_driving(&w, Ambient::SlitPlane);
                    let methods =
                        if method.is_empty() { vec![MethodArg::Area, MethodArg::Inverse, MethodArg::Boundary] } else { method.clone() };
                    for m in methods {
                        rows.push(match m {
                            MethodArg::Area => JRow::from(&j_energy_area(&chain, opts)?),
                            MethodArg::Inverse => JRow::from(&j_energy_inverse(&chain, opts)?),
                            MethodArg::Boundary => {
                                let full = j_energy_boundary(&chain, &trace_curve(&w, cfg.trace_steps, Ambient::SlitPlane)?)?;
                                let half = j_energy_boundary(
                                    &chain,
                                    &trace_curve(&w, (cfg.trace_steps / 2).max(2), Ambient::SlitPlane)?,
                                )?;
                                JRow {
                                    method: Method::Boundary,
                                    value: full.value,
                                    error_bound: (full.value - half.value).abs(),
                                    tail_bound: 0.0,
                                    cells: full.vertices,
                                }
                            }
                        });
                    }
                }
                src @ Source::Curve(..) => {
                    let curve = as_loop(&src, &cfg)?;
                    let par = LoopParametrization::rooted(curve.root.unwrap_or(Root::point(curve.points[0])));
                    let zip = loop_driving(&curve, &par)?;
                    let methods = if method.is_empty() { vec![MethodArg::Area, MethodArg::Inverse] } else { method.clone() };
                    for m in methods {
                        rows.push(match m {
                            MethodArg::Area => JRow::from(&j_energy_area(&zip.chain, opts)?),
                            MethodArg::Inverse => JRow::from(&j_energy_inverse(&zip.chain, opts)?),
                            MethodArg::Boundary => {
                                return Err(Error::InvalidInput("the boundary route needs a driving function".into()))
                            }
                        });
                    }
                }
            }
            emit(cli, &json(&rows))?;
        }
        Command::Liouville { input } => {
            format(cli, Format::Json, &[Format::Json])?;
            let (_, maps) = bounded_maps(&as_loop(&input.resolve(&cfg)?, &cfg)?)?;
            emit(cli, &json(&liouville_action(&maps, cfg.disk_options())?))?;
        }
        Command::Detzeta { input } => {
            format(cli, Format::Json, &[Format::Json])?;
            let (bounded, maps) = bounded_maps(&as_loop(&input.resolve(&cfg)?, &cfg)?)?;
            let unit = report::unit_maps(&maps, &bounded)?;
            let h = h_functional_maps(&unit, ConformalMetric::patch(), cfg.modes)?;
            emit(
                cli,
                &json(&DetZetaOut {
                    eigenvalues_head: h.eigenvalues_head,
                    det_zeta: h.zeta.det,
                    log_det_zeta: h.log_det,
                    h_value: h.value,
                    length: h.length,
                    n_modes: h.n_modes,
                    tail_residual: h.zeta.tail_residual,
                }),
            )?;
        }
        Command::Verify { inputs, timings } => {
            let fmt = format(cli, Format::Json, &[Format::Json, Format::Csv])?;
            let mut rows = Vec::new();
            for src in inputs.resolve(&cfg)? {
                rows.push(match &src {
                    Source::Driving(name, w) => report::verify_driving(name, w, &cfg, *timings)?,
                    Source::Curve(name, c) => {
                        if !c.closed {
                            return Err(Error::NotClosed);
                        }
                        report::verify_loop(name, c, &cfg, *timings)?
                    }
                });
            }
            let rep = VerifyReport::new(&cfg, rows);
            emit(cli, &if fmt == Format::Csv { rep.to_csv()? } else { rep.to_json() })?;
            return Ok(if rep.pass { 0 } else { 1 });
        }
        Command::Plot { input, kind, grid } => {
            format(cli, Format::Svg, &[Format::Svg])?;
            let src = input.resolve(&cfg)?;
            let text = match kind {
                PlotKind::Curve => match &src {
                    Source::Driving(_, w) => svg::curve(&trace_curve(w, cfg.trace_steps, Ambient::HalfPlane)?.points, false, cli.radius),
                    Source::Curve(_, c) => {
                        svg::curve(&c.points, c.closed && c.root != Some(Root::Infinity), cli.radius)
                    }
                },
                PlotKind::Welding => {
                    let (_, maps) = bounded_maps(&as_loop(&src, &cfg)?)?;
                    let wl = welding(&maps, 256)?;
                    svg::angle_graph(&wl.theta, &wl.phi)
                }
                PlotKind::Field => {
                    let Source::Driving(_, w) = &src else {
                        return Err(Error::InvalidInput("the field plot needs a driving function".into()));
                    };
                    let chain = SlitMapChain::from_driving(&w.shifted(-w.values()[0]), Ambient::SlitPlane);
                    svg::heatmap(&sigma_grid(&chain, cli.radius.unwrap_or(2.0), (*grid).max(1)), cli.radius.unwrap_or(2.0))
                }
            };
            emit(cli, &text)?;
        }
    }
    Ok(0)
}

/// `log|h'|` at the cell centres of an `n × n` grid on `[-r, r]²`, top row first; NaN where undefined.
pub fn sigma_grid(chain: &SlitMapChain, r: f64, n: usize) -> Vec<Vec<f64>> {
    let field = LogDerivField { chain };
    let h = 2.0 * r / n as f64;
    (0..n)
        .map(|j| {
            let y = r - (j as f64 + 0.5) * h;
            (0..n)
                .map(|i| {
                    let z = C64::new(-r + (i as f64 + 0.5) * h, y);
                    field.sigma(z).ok().filter(|v| v.is_finite()).unwrap_or(f64::NAN)
                })
                .collect()
        })
        .collect()
}
