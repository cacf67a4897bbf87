mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use stieltjes_lab::catalog::{self, CatalogEntry};
use stieltjes_lab::convolution::{convolve_mb, convolve_pointwise, KernelForm};
use stieltjes_lab::grid::geometric;
use stieltjes_lab::inversion::{self, convergence_profile, invert_series, invert_spectral};
use stieltjes_lab::mellin::{mellin_forward, mellin_forward_sampled, CriticalLineSpectrum, SampledFunction};
use stieltjes_lab::report::VerificationReport;
use stieltjes_lab::sie::{apply_forward, apply_inverse, Direction, PairKind, S2InverseRoute};
use stieltjes_lab::suites::{self, Suite, SuiteOptions};
use stieltjes_lab::transforms::{self, OperatorKind, OperatorTag, Route};
use stieltjes_lab::{Complex64, HalfLineFn};

use config::{Overrides, Settings};
use output::Format;

const THREADS_ENV: &str = "STIELTJES_LAB_THREADS";

/// Stieltjes, Hilbert and Laplace transforms on the half-line, with
/// Mellin-domain convolution, inversion and verification suites.
#[derive(Parser, Debug)]
#[command(name = "stieltjes-lab", version)]
struct Cli {
    /// Defaults to json for `verify` and csv otherwise.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Flat JSON object of settings; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    abs_tol: Option<f64>,
    #[arg(long, global = true)]
    rel_tol: Option<f64>,
    #[arg(long, global = true)]
    tau_max: Option<f64>,
    #[arg(long, global = true)]
    tau_step: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

/// A geometric grid given as `xmin,xmax,n`.
#[derive(Debug, Clone, Copy)]
struct GridSpec {
    xmin: f64,
    xmax: f64,
    n: usize,
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected xmin,xmax,n, got `{s}`"));
        };
        Ok(Self {
            xmin: a.parse().map_err(|e| format!("xmin: {e}"))?,
            xmax: b.parse().map_err(|e| format!("xmax: {e}"))?,
            n: n.parse().map_err(|e| format!("n: {e}"))?,
        })
    }
}

impl GridSpec {
    fn points(&self) -> Result<Vec<f64>> {
        Ok(geometric(self.xmin, self.xmax, self.n)?)
    }
}

const DEFAULT_GRID: &str = "0.1,10,64";

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Catalog entry id.
    #[arg(long = "fn")]
    function: Option<String>,
    /// Catalog entry id or CSV file.
    #[arg(long)]
    input: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConvMethod {
    Mb,
    Pointwise,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Trig,
    Gamma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum S2Route {
    LogKernel,
    NestedHilbert,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply an operator to a function on an x grid.
    Transform {
        #[arg(long)]
        op: OperatorKind,
        #[arg(long, default_value = "direct")]
        route: Route,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value = DEFAULT_GRID)]
        grid: GridSpec,
    },
    /// Mellin spectrum on the critical line.
    Spectrum {
        #[command(flatten)]
        source: Source,
        /// Use quadrature even when a closed form exists.
        #[arg(long)]
        quadrature: bool,
    },
    /// Multiplicative convolution of two catalog entries.
    Convolve {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value = "mb")]
        method: ConvMethod,
        #[arg(long, value_enum, default_value = "trig")]
        kernel: KernelArg,
        #[arg(long, default_value = DEFAULT_GRID)]
        grid: GridSpec,
    },
    /// Recover f from the spectrum of its iterated Stieltjes transform.
    Invert {
        /// Catalog entry f; its exact S2 spectrum is inverted.
        #[arg(long = "fn", conflicts_with = "input", required_unless_present = "input")]
        function: Option<String>,
        /// CSV spectrum `tau,re,im` of S2 f.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Truncate the series at this order instead of using the exact multiplier.
        #[arg(long)]
        series: Option<usize>,
        /// Write the convergence profile (JSON) here.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Catalog entry the profile is measured against; defaults to --fn.
        #[arg(long)]
        reference: Option<String>,
        #[arg(long)]
        n_terms: Option<usize>,
        #[arg(long)]
        tau_cap: Option<f64>,
        #[arg(long)]
        noise_floor: Option<f64>,
        #[arg(long)]
        target_tol: Option<f64>,
        #[arg(long, default_value = DEFAULT_GRID)]
        grid: GridSpec,
    },
    /// Apply one map of a reciprocal singular-integral pair.
    Solve {
        #[arg(long)]
        pair: PairKind,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        direction: Direction,
        /// Catalog entry id or CSV file.
        #[arg(long)]
        input: String,
        #[arg(long, value_enum, default_value = "log-kernel")]
        s2_route: S2Route,
        #[arg(long, default_value = DEFAULT_GRID)]
        grid: GridSpec,
    },
    /// Run a verification suite and report every case.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        pair: Option<PairKind>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long = "fn")]
        function: Option<String>,
    },
    /// Catalog of closed-form test functions.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
}

/// A function from the catalog or from a CSV file.
enum Input {
    Entry(&'static CatalogEntry),
    Samples(SampledFunction),
}

impl Input {
    fn resolve(id_or_path: &str) -> Result<Self> {
        if let Ok(e) = catalog::get(id_or_path) {
            return Ok(Input::Entry(e));
        }
        let path = Path::new(id_or_path);
        if !path.is_file() {
            bail!("`{id_or_path}` is neither a catalog entry nor a readable file");
        }
        Ok(Input::Samples(read_sampled(path)?))
    }

    fn from_source(s: &Source) -> Result<Self> {
        match (&s.function, &s.input) {
            (Some(id), _) => Ok(Input::Entry(catalog::get(id)?)),
            (None, Some(p)) => Self::resolve(p),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }

    fn as_fn(&self) -> &dyn HalfLineFn {
        match self {
            Input::Entry(e) => *e,
            Input::Samples(s) => s,
        }
    }
}

fn read_sampled(path: &Path) -> Result<SampledFunction> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    stieltjes_lab::io::read_sampled(file).with_context(|| format!("reading {}", path.display()))
}

fn read_spectrum(path: &Path) -> Result<CriticalLineSpectrum> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    stieltjes_lab::io::read_spectrum(file).with_context(|| format!("reading {}", path.display()))
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn spectrum_of(input: &Input, settings: &Settings, quadrature: bool) -> Result<CriticalLineSpectrum> {
    let grid = settings.tau_grid()?;
    Ok(match input {
        Input::Entry(e) if !quadrature => e.spectrum(&grid)?,
        Input::Entry(e) => mellin_forward(*e, &grid, &settings.quadrature)?,
        Input::Samples(s) => {
            let out = mellin_forward_sampled(s, &grid);
            if out.truncation_warning {
                warn("samples do not decay at the ends of their range; the spectrum is truncated");
            }
            out.spectrum
        }
    })
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    suite: &'a str,
    timestamp: String,
    config: &'a Settings,
    passed: bool,
    cases: &'a [stieltjes_lab::report::CaseResult],
}

fn report_body(report: &VerificationReport, settings: &Settings, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let doc = ReportDocument {
                suite: &report.suite,
                timestamp: chrono::Utc::now().to_rfc3339(),
                config: settings,
                passed: report.passed(),
                cases: &report.cases,
            };
            Ok(output::json(&doc))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = report
                .cases
                .iter()
                .map(|c| {
                    vec![
                        c.id.clone(),
                        c.metric.clone(),
                        format!("{:e}", c.value),
                        format!("{:e}", c.tolerance),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            output::table(&["id", "metric", "value", "tolerance", "pass"], &rows)
        }
    }
}

fn catalog_body(format: Format) -> Result<Vec<u8>> {
    let known = |e: &CatalogEntry| -> Vec<&'static str> {
        OperatorKind::ALL
            .into_iter()
            .filter(|k| e.known.get(*k).is_some())
            .map(OperatorKind::name)
            .collect()
    };
    let entries = catalog::entries();
    match format {
        Format::Json => {
            let list: Vec<_> = entries
                .iter()
                .map(|e| {
                    json!({
                        "id": e.id,
                        "formula": e.formula,
                        "decay": format!("{:?}", e.decay_hint()),
                        "sf_in_l2": e.conditions.sf_in_l2.holds,
                        "sf_in_l1": e.conditions.sf_in_l1.holds,
                        "f_in_l2": e.conditions.f_in_l2.holds,
                        "known": known(e),
                    })
                })
                .collect();
            Ok(output::json(&json!(list)))
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = entries
                .iter()
                .map(|e| {
                    vec![
                        e.id.to_string(),
                        e.formula.to_string(),
                        format!("{:?}", e.decay_hint()),
                        e.conditions.sf_in_l2.holds.to_string(),
                        e.conditions.sf_in_l1.holds.to_string(),
                        e.conditions.f_in_l2.holds.to_string(),
                        known(e).join(" "),
                    ]
                })
                .collect();
            output::table(&["id", "formula", "decay", "sf_in_l2", "sf_in_l1", "f_in_l2", "known"], &rows)
        }
    }
}

/// Runs the command; `Ok(false)` means a verification suite failed.
fn run(cli: Cli) -> Result<bool> {
    let mut overrides = Overrides {
        abs_tol: cli.abs_tol,
        rel_tol: cli.rel_tol,
        tau_max: cli.tau_max,
        tau_step: cli.tau_step,
        ..Default::default()
    };
    if let Command::Invert { n_terms, tau_cap, noise_floor, target_tol, .. } = &cli.command {
        overrides.n_terms = *n_terms;
        overrides.tau_cap = *tau_cap;
        overrides.noise_floor = *noise_floor;
        overrides.target_tol = *target_tol;
    }
    let settings = Settings::load(cli.config.as_deref(), &overrides)?;
    let cfg = &settings.quadrature;
    let format = output_format(&cli);
    let out = cli.out.as_deref();

    let mut passed = true;
    let body = match cli.command {
        Command::Transform { op, route, source, grid } => {
            let xs = grid.points()?;
            let tag = OperatorTag::new(op, route)?;
            let input = Input::from_source(&source)?;
            let spec = match route {
                Route::MellinMultiplier => Some(spectrum_of(&input, &settings, false)?),
                Route::DirectQuadrature => None,
            };
            let result = transforms::apply(tag, input.as_fn(), spec.as_ref(), &xs, cfg)?;
            output::sampled(&result, format)?
        }
        Command::Spectrum { source, quadrature } => {
            let input = Input::from_source(&source)?;
            output::spectrum(&spectrum_of(&input, &settings, quadrature)?, format)?
        }
        Command::Convolve { f, g, method, kernel, grid } => {
            let xs = grid.points()?;
            let (f, g) = (catalog::get(&f)?, catalog::get(&g)?);
            let result = match method {
                ConvMethod::Mb => {
                    let tg = settings.tau_grid()?;
                    let form = match kernel {
                        KernelArg::Trig => KernelForm::TrigSimplified,
                        KernelArg::Gamma => KernelForm::GammaRatio,
                    };
                    convolve_mb(&f.spectrum(&tg)?, &g.spectrum(&tg)?, &xs, form)?
                }
                ConvMethod::Pointwise => convolve_pointwise(f, g, &xs, cfg)?,
            };
            output::sampled(&result.values, format)?
        }
        Command::Invert { function, input, series, profile, reference, grid, .. } => {
            let xs = grid.points()?;
            let inv = &settings.inversion;
            let spectrum = match (&function, &input) {
                (Some(id), _) => catalog::get(id)?
                    .spectrum(&settings.tau_grid()?)?
                    .multiply(|tau| Complex64::new(inversion::s2_multiplier(tau), 0.0)),
                (None, Some(path)) => read_spectrum(path)?,
                (None, None) => unreachable!("clap enforces one source"),
            };
            let recovered = match series {
                Some(n) => invert_series(&spectrum, n, inv, &xs)?,
                None => invert_spectral(&spectrum, inv, &xs)?,
            };
            if let Some(path) = &profile {
                let id = reference
                    .as_deref()
                    .or(function.as_deref())
                    .ok_or_else(|| anyhow!("--profile needs --reference when the input is a file"))?;
                let reference = catalog::get(id)?;
                let n_max = series.unwrap_or(inv.n_terms);
                let prof = convergence_profile(&spectrum, reference, &xs, n_max, inv)?;
                output::emit(Some(path), &output::json(&prof))?;
            }
            output::sampled(&recovered, format)?
        }
        Command::Solve { pair, alpha, direction, input, s2_route, grid } => {
            let xs = grid.points()?;
            let input = Input::resolve(&input)?;
            let route = match s2_route {
                S2Route::LogKernel => S2InverseRoute::LogKernel,
                S2Route::NestedHilbert => S2InverseRoute::NestedHilbert,
            };
            let result = match direction {
                Direction::Forward => apply_forward(pair, alpha, input.as_fn(), &xs, cfg)?,
                Direction::Inverse => apply_inverse(pair, alpha, input.as_fn(), &xs, cfg, route)?,
            };
            output::sampled(&result, format)?
        }
        Command::Verify { suite, pair, alpha, function } => {
            let opts = SuiteOptions {
                quadrature: settings.quadrature,
                tau_grid: settings.tau_grid()?,
                inversion: settings.inversion,
                pair,
                alpha,
                function,
            };
            let report = suites::run(suite, &opts)?;
            passed = report.passed();
            report_body(&report, &settings, format)?
        }
        Command::Catalog { action: CatalogAction::List } => catalog_body(format)?,
    };
    output::emit(out, &body)?;
    Ok(passed)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV} must be a non-negative integer, got `{raw}`"))?;
    #[cfg(feature = "parallel")]
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn output_format(cli: &Cli) -> Format {
    match (cli.format, &cli.command) {
        (Some(f), _) => f,
        (None, Command::Verify { .. }) => Format::Json,
        (None, _) => Format::Csv,
    }
}

fn report_error(err: &anyhow::Error, format: Format) {
    match format {
        Format::Json => {
            let chain: Vec<String> = err.chain().map(|c| c.to_string()).collect();
            eprintln!("{}", json!({ "error": chain.join(": ") }));
        }
        Format::Csv => eprintln!("error: {err:#}"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // clap exits 0 for --help/--version and 2 for usage errors
        Err(e) => e.exit(),
    };
    let format = output_format(&cli);
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            report_error(&e, format);
            ExitCode::from(2)
        }
    }
}
