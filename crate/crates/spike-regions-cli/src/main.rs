//! Command-line front end: build networks, count their input-space regions,
//! dump shift trajectories and measure approximation errors.
//!
//! Every artifact embeds the resolved configuration, arithmetic mode, seed
//! and library version; identical invocations produce byte-identical output.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spike_regions::constructors::{
    identity_network, indicator_network, l2_error_exact, lipschitz_network, staircase_l2_error,
    staircase_network, staircase_target, step_network, sup_error_exact, PiecewiseLinear,
    PolyhedronSpec,
};
use spike_regions::domain::BoxDomain;
use spike_regions::geometry::{
    constant_regions_2d, count_exact_2d, first_layer_families, general_position_layer,
    random_first_layer, sample_patterns, CountReport,
};
use spike_regions::io::{load_network, load_step_spec, save_network, Num};
use spike_regions::matrix::Matrix;
use spike_regions::scalar::{Mode, Scalar};
use spike_regions::temporal::realized_shifts;
use spike_regions::{Network, LIBRARY_VERSION};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Debug)]
enum CliError {
    Validation(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Io(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

impl From<spike_regions::io::FileError> for CliError {
    fn from(e: spike_regions::io::FileError) -> Self {
        match e {
            spike_regions::io::FileError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Parser, Debug)]
#[command(
    name = "spike-regions",
    version,
    about = "Build, simulate and region-count discrete-time LIF networks"
)]
struct Cli {
    /// Arithmetic mode; defaults to $SPIKE_REGIONS_MODE, then "exact".
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a network and write it to a JSON file.
    Build(BuildArgs),
    /// Count input-space regions of a stored network.
    Regions(RegionsArgs),
    /// Dump the realized shift trajectory of a single neuron.
    Shifts(ShiftsArgs),
    /// Build an approximant and report exact sup/L2 errors.
    Approx(ApproxArgs),
    /// Reproduce the region-count table: bounds, constructions, random nets.
    Table1(Table1Args),
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(subcommand)]
    kind: BuildKind,
}

#[derive(Subcommand, Debug)]
enum BuildKind {
    /// Identity gadget: copies the input spike train through L layers.
    Identity {
        #[arg(long)]
        n: usize,
        #[arg(long = "T")]
        latency: usize,
        #[arg(long = "L")]
        layers: usize,
        /// Gain perturbation in (0, 1/T); defaults to 1/(2T).
        #[arg(long)]
        eps: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Indicator of a polyhedron given as half-spaces "a1,a2,...:b".
    Indicator {
        #[arg(long = "halfspace", required = true, allow_hyphen_values = true)]
        halfspaces: Vec<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Exact compiler for a grid step function stored as JSON.
    Step {
        #[arg(long)]
        spec: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Grid approximant of the ramp gamma * x1 on a box.
    Lipschitz {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        eps: String,
        /// Box as "lo,hi" per coordinate joined with 'x', e.g. "0,1x0,1".
        #[arg(long = "box")]
        box_spec: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Two-input first layer attaining the region bound.
    GeneralPosition {
        #[arg(long)]
        n1: usize,
        #[arg(long = "T")]
        latency: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RegionsArgs {
    network: PathBuf,
    /// Exact 2D cell enumeration (input dimension must be 2).
    #[arg(long, conflicts_with = "sample")]
    exact2d: bool,
    /// Low-discrepancy sampling with this many points.
    #[arg(long)]
    sample: Option<usize>,
    /// Layer to report patterns through (1-based); defaults to the depth.
    #[arg(long)]
    layer: Option<usize>,
    /// Clipping/sampling box; defaults to "-1,1" per coordinate.
    #[arg(long = "box", allow_hyphen_values = true)]
    box_spec: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Cell CSV path (exact2d only).
    #[arg(long)]
    cells: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ShiftsArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long, allow_hyphen_values = true)]
    u0: String,
    /// Fixed pre-activation value <w, x> + b.
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    #[arg(long = "T")]
    latency: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also export the neuron's full interval partition as CSV.
    #[arg(long)]
    partition: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ApproxTarget {
    Ramp,
    Staircase,
}

#[derive(Args, Debug)]
struct ApproxArgs {
    #[arg(long, value_enum)]
    target: ApproxTarget,
    /// Ramp slope (ramp target).
    #[arg(long)]
    gamma: Option<String>,
    /// Accuracy for ramps, step height for staircases.
    #[arg(long)]
    eps: String,
    /// Number of unit cells (staircase target).
    #[arg(long)]
    k: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn resolve_mode(cli_mode: Option<ModeArg>) -> Result<Mode, CliError> {
    if let Some(m) = cli_mode {
        return Ok(match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        });
    }
    match std::env::var("SPIKE_REGIONS_MODE") {
        Ok(v) => match v.as_str() {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(CliError::Validation(format!(
                "SPIKE_REGIONS_MODE must be 'exact' or 'float', got {other:?}"
            ))),
        },
        Err(_) => Ok(Mode::Exact),
    }
}

fn parse_scalar(mode: Mode, s: &str, what: &str) -> Result<Scalar, CliError> {
    Scalar::parse(mode, s).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

/// Parses "lo,hi" per coordinate joined with 'x'.
fn parse_box(mode: Mode, s: &str) -> Result<BoxDomain, CliError> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for part in s.split('x') {
        let (l, h) = part.split_once(',').ok_or_else(|| {
            CliError::Validation(format!("box coordinate {part:?} is not 'lo,hi'"))
        })?;
        lo.push(parse_scalar(mode, l, "box lower bound")?);
        hi.push(parse_scalar(mode, h, "box upper bound")?);
    }
    BoxDomain::new(lo, hi).map_err(invalid)
}

fn parse_halfspace(mode: Mode, s: &str) -> Result<(Vec<Scalar>, Scalar), CliError> {
    let (coeffs, rhs) = s
        .split_once(':')
        .ok_or_else(|| CliError::Validation(format!("half-space {s:?} is not 'a1,a2,...:b'")))?;
    let normal: Result<Vec<Scalar>, CliError> = coeffs
        .split(',')
        .map(|c| parse_scalar(mode, c, "half-space coefficient"))
        .collect();
    Ok((normal?, parse_scalar(mode, rhs, "half-space offset")?))
}

fn meta_json(mode: Mode, seed: Option<u64>, config: &str) -> serde_json::Value {
    serde_json::json!({
        "version": LIBRARY_VERSION,
        "mode": mode.to_string(),
        "seed": seed,
        "config": config,
    })
}

fn meta_comment(mode: Mode, seed: Option<u64>, config: &str) -> String {
    format!(
        "# version={LIBRARY_VERSION} mode={mode} seed={} config={config}\n",
        seed.map_or_else(|| "none".to_string(), |s| s.to_string())
    )
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_json(path: &PathBuf, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    write_text(path, &(text + "\n"))
}

fn scalar_json(s: &Scalar) -> serde_json::Value {
    match Num::encode(s) {
        Num::Float(v) => serde_json::json!(v),
        Num::Exact(st) => serde_json::json!(st),
    }
}

fn report_json(report: &CountReport, mode: Mode, config: &str) -> serde_json::Value {
    serde_json::json!({
        "meta": meta_json(mode, report.seed, config),
        "layer_counts": report.layer_pattern_counts,
        "distinct_outputs": report.distinct_outputs,
        "connected_constant_regions": report.connected_constant_regions,
        "bound": report.bound.to_string(),
        "method": report.method.to_string(),
        "seed": report.seed,
    })
}

fn run_build(kind: BuildKind, mode: Mode) -> Result<(), CliError> {
    match kind {
        BuildKind::Identity {
            n,
            latency,
            layers,
            eps,
            output,
        } => {
            let eps = eps.map(|e| parse_scalar(mode, &e, "eps")).transpose()?;
            let net = identity_network(n, latency, layers, eps, mode).map_err(invalid)?;
            save_network(&net, &output)?;
            println!(
                "identity network: n={n} T={latency} L={layers} -> {}",
                output.display()
            );
        }
        BuildKind::Indicator { halfspaces, output } => {
            let rows: Result<Vec<(Vec<Scalar>, Scalar)>, CliError> = halfspaces
                .iter()
                .map(|h| parse_halfspace(mode, h))
                .collect();
            let rows = rows?;
            let dim = rows[0].0.len();
            if rows.iter().any(|(n, _)| n.len() != dim) {
                return Err(CliError::Validation(
                    "all half-spaces must share one dimension".into(),
                ));
            }
            let normals = Matrix::from_rows(rows.iter().map(|(n, _)| n.clone()).collect());
            let offsets = rows.into_iter().map(|(_, b)| b).collect();
            let poly = PolyhedronSpec::new(normals, offsets).map_err(invalid)?;
            let net = indicator_network(&poly, mode).map_err(invalid)?;
            save_network(&net, &output)?;
            println!(
                "indicator network: {} half-spaces, widths ({}, 1) -> {}",
                poly.half_space_count(),
                poly.half_space_count(),
                output.display()
            );
        }
        BuildKind::Step { spec, output } => {
            let spec = load_step_spec(&spec, mode)?;
            let net = step_network(&spec, mode).map_err(invalid)?;
            save_network(&net, &output)?;
            println!(
                "step network: {} cells in {} dims, widths ({}, {}) -> {}",
                spec.values().len(),
                spec.dim(),
                net.layers()[0].width(),
                net.layers()[1].width(),
                output.display()
            );
        }
        BuildKind::Lipschitz {
            gamma,
            eps,
            box_spec,
            output,
        } => {
            let gamma = parse_scalar(mode, &gamma, "gamma")?;
            let eps = parse_scalar(mode, &eps, "eps")?;
            let domain = parse_box(mode, &box_spec)?;
            let slope = gamma.clone();
            let f = move |x: &[Scalar]| &slope * &x[0];
            let (net, report) =
                lipschitz_network(&f, &gamma, &eps, &domain, mode).map_err(invalid)?;
            save_network(&net, &output)?;
            println!(
                "lipschitz approximant of {gamma}*x1: widths ({}, {}), guaranteed sup error {} -> {}",
                report.first_width,
                report.second_width,
                report.sup_error,
                output.display()
            );
        }
        BuildKind::GeneralPosition {
            n1,
            latency,
            output,
        } => {
            if mode != Mode::Exact {
                return Err(CliError::Validation(
                    "general-position construction requires exact mode".into(),
                ));
            }
            let gp = general_position_layer(n1, latency).map_err(invalid)?;
            let regions = count_exact_2d(&gp.families).map_err(invalid)?;
            let bound = spike_regions::geometry::count_bound(n1, 2, latency);
            save_network(&gp.network, &output)?;
            println!(
                "general-position layer: n1={n1} T={latency}, regions: {regions} (bound {bound}) -> {}",
                output.display()
            );
        }
    }
    Ok(())
}

fn run_regions(args: RegionsArgs, mode_flag: Option<ModeArg>) -> Result<(), CliError> {
    let net = load_network(&args.network)?;
    if let Some(m) = mode_flag {
        let requested = match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        };
        if requested != net.mode() {
            return Err(CliError::Validation(format!(
                "network file is {} mode but {requested} was requested",
                net.mode()
            )));
        }
    }
    let mode = net.mode();
    let layer = args.layer.unwrap_or(net.depth());
    let domain = match &args.box_spec {
        Some(s) => parse_box(mode, s)?,
        None => BoxDomain::centered(mode, 1, net.input_dim()),
    };
    let config = format!(
        "regions {} method={} layer={layer} box={} seed={}",
        args.network.display(),
        if args.exact2d {
            "exact2d".to_string()
        } else {
            format!("sample({})", args.sample.unwrap_or(0))
        },
        args.box_spec.as_deref().unwrap_or("default"),
        args.seed
    );

    if args.exact2d {
        let analysis = constant_regions_2d(&net, &domain, layer).map_err(invalid)?;
        let report = &analysis.report;
        println!(
            "layer {layer}: patterns per layer {:?}, distinct outputs {}, connected constant regions {}, bound {}",
            report.layer_pattern_counts,
            report.distinct_outputs,
            report
                .connected_constant_regions
                .map_or("-".to_string(), |c| c.to_string()),
            report.bound
        );
        if let Some(path) = &args.output {
            write_json(path, &report_json(report, mode, &config))?;
        }
        if let Some(path) = &args.cells {
            let mut csv = meta_comment(mode, None, &config);
            csv.push_str("cell,x,y,pattern,output\n");
            for (i, cell) in analysis.cells.iter().enumerate() {
                let out = cell
                    .output
                    .iter()
                    .map(Scalar::to_repr_string)
                    .collect::<Vec<_>>()
                    .join(";");
                let _ = writeln!(
                    csv,
                    "{i},{},{},{},{}",
                    cell.representative.0.to_repr_string(),
                    cell.representative.1.to_repr_string(),
                    cell.pattern,
                    out
                );
            }
            write_text(path, &csv)?;
        }
    } else {
        let samples = args
            .sample
            .ok_or_else(|| CliError::Validation("choose --exact2d or --sample N".into()))?;
        let report = sample_patterns(&net, &domain, samples, layer, args.seed).map_err(invalid)?;
        println!(
            "sampled {samples} points: patterns per layer {:?}, distinct outputs {}, bound {}",
            report.layer_pattern_counts, report.distinct_outputs, report.bound
        );
        if let Some(path) = &args.output {
            write_json(path, &report_json(&report, mode, &config))?;
        }
        if args.cells.is_some() {
            return Err(CliError::Validation("cell export needs --exact2d".into()));
        }
    }
    Ok(())
}

fn run_shifts(args: ShiftsArgs, mode: Mode) -> Result<(), CliError> {
    let beta = parse_scalar(mode, &args.beta, "beta")?;
    let theta = parse_scalar(mode, &args.theta, "theta")?;
    let u0 = parse_scalar(mode, &args.u0, "u0")?;
    let z = parse_scalar(mode, &args.z, "z")?;
    if args.latency == 0 {
        return Err(CliError::Validation("T must be >= 1".into()));
    }
    if beta.is_negative() || (&beta - &Scalar::one(mode)).is_positive() {
        return Err(CliError::Validation("beta must lie in [0, 1]".into()));
    }
    if !theta.is_positive() {
        return Err(CliError::Validation("theta must be positive".into()));
    }
    let rows = realized_shifts(&z, &beta, &theta, &u0, args.latency);
    let config = format!(
        "shifts beta={} theta={} u0={} z={} T={}",
        beta, theta, u0, z, args.latency
    );
    let mut csv = meta_comment(mode, None, &config);
    csv.push_str("t,history,z_star,spike,repeat_of\n");
    for row in &rows {
        let history: String = row
            .history
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            row.step,
            history,
            row.threshold.to_repr_string(),
            u8::from(row.fired),
            row.repeat_of.map_or(String::new(), |t| t.to_string())
        );
    }
    match &args.output {
        Some(path) => write_text(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.partition {
        let partition = spike_regions::temporal::neuron_partition(&beta, &theta, &u0, args.latency);
        let text = format!(
            "{}{}",
            meta_comment(mode, None, &config),
            partition.to_csv()
        );
        write_text(path, &text)?;
        println!(
            "partition: {} intervals (bound {})",
            partition.region_count(),
            spike_regions::temporal::temporal_bound(args.latency)
        );
    }
    let repeats: Vec<&spike_regions::temporal::ShiftRow> =
        rows.iter().filter(|r| r.repeat_of.is_some()).collect();
    match repeats.first() {
        Some(r) => println!(
            "shift value repeats: t={} matches t={} ({} repetitions total)",
            r.step,
            r.repeat_of.unwrap(),
            repeats.len()
        ),
        None => println!("no repeated shift values within T={}", args.latency),
    }
    Ok(())
}

fn run_approx(args: ApproxArgs, mode: Mode) -> Result<(), CliError> {
    let eps = parse_scalar(mode, &args.eps, "eps")?;
    let (config, net, target, lo, hi, kind, l2): (
        String,
        Network,
        PiecewiseLinear,
        Scalar,
        Scalar,
        &str,
        Option<Scalar>,
    ) = match args.target {
        ApproxTarget::Ramp => {
            let gamma = parse_scalar(
                mode,
                args.gamma
                    .as_deref()
                    .ok_or_else(|| CliError::Validation("ramp target needs --gamma".into()))?,
                "gamma",
            )?;
            let lo = Scalar::zero(mode);
            let hi = Scalar::one(mode);
            let domain = BoxDomain::new(vec![lo.clone()], vec![hi.clone()]).map_err(invalid)?;
            let slope = gamma.clone();
            let f = move |x: &[Scalar]| &slope * &x[0];
            let (net, _) = lipschitz_network(&f, &gamma, &eps, &domain, mode).map_err(invalid)?;
            let target = PiecewiseLinear::ramp(gamma.clone(), lo.clone(), hi.clone());
            (
                format!("approx ramp gamma={gamma} eps={eps}"),
                net,
                target,
                lo,
                hi,
                "ramp",
                None,
            )
        }
        ApproxTarget::Staircase => {
            let k = args
                .k
                .ok_or_else(|| CliError::Validation("staircase target needs --k".into()))?;
            let net = staircase_network(k, &eps, mode).map_err(invalid)?;
            let target = staircase_target(k, &eps).map_err(invalid)?;
            let lo = Scalar::zero(mode);
            let hi = Scalar::from_int(mode, k as i64);
            let l2 = staircase_l2_error(&net, k, &eps).map_err(invalid)?;
            (
                format!("approx staircase k={k} eps={eps}"),
                net,
                target,
                lo,
                hi,
                "staircase",
                Some(l2),
            )
        }
    };
    let sup = sup_error_exact(&net, &target, (&lo, &hi)).map_err(invalid)?;
    let l2 = match l2 {
        Some(v) => v,
        None => l2_error_exact(&net, &target, (&lo, &hi)).map_err(invalid)?,
    };
    let widths: Vec<usize> = net.layers().iter().map(|l| l.width()).collect();
    println!(
        "{kind}: widths ({}, {}), sup error {} (~{}), squared L2 error {} (~{})",
        widths[0],
        widths[1],
        sup,
        sup.to_f64(),
        l2,
        l2.to_f64()
    );
    if let Some(path) = &args.output {
        let json = serde_json::json!({
            "meta": meta_json(mode, None, &config),
            "target": kind,
            "widths": widths,
            "sup_error": scalar_json(&sup),
            "sup_error_f64": sup.to_f64(),
            "l2_error_sq": scalar_json(&l2),
            "l2_error_sq_f64": l2.to_f64(),
        });
        write_json(path, &json)?;
    }
    Ok(())
}

fn run_table1(args: Table1Args, mode: Mode) -> Result<(), CliError> {
    if mode != Mode::Exact {
        return Err(CliError::Validation("table1 requires exact mode".into()));
    }
    let config = format!("table1 seed={}", args.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut csv = meta_comment(mode, Some(args.seed), &config);
    csv.push_str("T,n1,theory,construction,random_mean,seed\n");
    println!("T   n1  theory  construction  random_mean");
    for latency in [1usize, 2] {
        for n1 in [2usize, 3, 4] {
            let theory = spike_regions::geometry::count_bound(n1, 2, latency);
            let gp = general_position_layer(n1, latency).map_err(invalid)?;
            let construction = count_exact_2d(&gp.families).map_err(invalid)?;
            let mut total = 0u64;
            const RUNS: u64 = 5;
            for _ in 0..RUNS {
                let net = random_first_layer(&mut rng, 2, n1, latency);
                total += count_exact_2d(&first_layer_families(&net)).map_err(invalid)?;
            }
            let mean = total as f64 / RUNS as f64;
            println!("{latency:<3} {n1:<3} {theory:<7} {construction:<13} {mean}");
            let _ = writeln!(
                csv,
                "{latency},{n1},{theory},{construction},{mean},{}",
                args.seed
            );
        }
    }
    if let Some(path) = &args.output {
        write_text(path, &csv)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mode = resolve_mode(cli.mode)?;
    match cli.command {
        Command::Build(args) => run_build(args.kind, mode),
        Command::Regions(args) => run_regions(args, cli.mode),
        Command::Shifts(args) => run_shifts(args, mode),
        Command::Approx(args) => run_approx(args, mode),
        Command::Table1(args) => run_table1(args, mode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
