//! Command-line interface: argument parsing, preset resolution, and
//! dispatch into the sweep and verification engines.

pub mod params;
pub mod presets;
pub mod sweep;
pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::fockspace::DimPolicy;
use params::Params;
use sweep::{Axis, SweepKind, SweepSpec};

/// Weak measurement statistics for deformed coherent pointer states.
#[derive(Debug, Parser)]
#[command(name = "qpointer", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the weak value of the deformed quadrature over q.
    WeakValue(SweepArgs),
    /// Tabulate the pointer photon number distribution.
    PhotonDist(SweepArgs),
    /// Sweep the Mandel parameter of the conditioned pointer.
    Mandel(SweepArgs),
    /// Sweep the zero-delay second-order correlation.
    G2(SweepArgs),
    /// Sweep quadrature means, variances, and squeezing flags.
    Quadrature(SweepArgs),
    /// Cross-validate closed forms against the matrix path on random configs.
    Verify(VerifyArgs),
    /// Dump the truncated operator matrices as CSV.
    DumpOperators(DumpArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Named parameter set; see the guide for the full table.
    #[arg(long)]
    pub preset: Option<String>,
    /// File of KEY = VALUE lines applied over the preset.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Single KEY=VALUE override; repeatable, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Swept parameter; defaults to the natural axis of the subcommand.
    #[arg(long)]
    pub axis: Option<String>,
    /// Axis grid as start:stop:count.
    #[arg(long)]
    pub range: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Relative tolerance for the cross-validation checks.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Seed of the configuration sampler.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of random configurations.
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    /// Output path for the JSON report; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Deliberately biases one statistic; exists to test the harness.
    #[arg(long, hide = true)]
    pub corrupt: Option<String>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    /// Deformation parameter of the dumped operators.
    #[arg(long, default_value_t = 0.5)]
    pub q: f64,
    /// Truncation dimension.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Truncation ceiling override; sweeps and verification read the same
/// variable so a constrained environment caps both.
const MAX_DIM_VAR: &str = "QPOINTER_MAX_DIM";

fn policy_from_env(default_max: usize) -> Result<DimPolicy> {
    let policy = DimPolicy::default();
    match std::env::var(MAX_DIM_VAR) {
        Ok(s) => {
            let max: usize = s.trim().parse().map_err(|_| {
                Error::Config(format!("{MAX_DIM_VAR} must be a positive integer, got '{s}'"))
            })?;
            if max < 2 {
                return Err(Error::Config(format!(
                    "{MAX_DIM_VAR} must be at least 2, got {max}"
                )));
            }
            Ok(policy.with_max(max))
        }
        Err(std::env::VarError::NotPresent) => Ok(policy.with_max(default_max)),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Error::Config(format!("{MAX_DIM_VAR} is not valid unicode")))
        }
    }
}

fn build_spec(kind: SweepKind, args: &SweepArgs) -> Result<SweepSpec> {
    let mut params = Params::default();
    let mut preset_name = None;
    let mut axis = kind.default_axis();
    let mut range = None;
    let mut q_list: Option<Vec<f64>> = None;

    if let Some(name) = &args.preset {
        let preset = presets::find(name)
            .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?;
        if preset.kind != kind {
            return Err(Error::Config(format!(
                "preset '{}' belongs to the {} subcommand",
                preset.name,
                preset.kind.as_str()
            )));
        }
        for (key, value) in presets::shared_sets(preset.name) {
            params.set(key, value)?;
        }
        for (key, value) in preset.sets {
            params.set(key, value)?;
        }
        preset_name = Some(preset.name);
        axis = preset.axis;
        range = Some((preset.start, preset.stop, preset.count));
        if !preset.q_list.is_empty() {
            q_list = Some(preset.q_list.to_vec());
        }
    }

    if let Some(path) = &args.config {
        params.apply_file(path)?;
    }
    let mut q_overridden = false;
    for assignment in &args.set {
        if assignment.trim_start().starts_with("q=") || assignment.trim_start().starts_with("q ") {
            q_overridden = true;
        }
        params.apply_assignment(assignment)?;
    }

    if let Some(s) = &args.axis {
        axis = Axis::parse(s)?;
    }
    if let Some(s) = &args.range {
        range = Some(sweep::parse_range(s)?);
    }
    let (start, stop, count) = range.ok_or_else(|| {
        Error::Config("no axis range; pass --range start:stop:count or a preset".into())
    })?;
    let values = sweep::linspace(start, stop, count);

    let q_list = if kind == SweepKind::PhotonDist {
        if q_overridden {
            vec![params.q]
        } else {
            q_list.unwrap_or_else(|| vec![params.q])
        }
    } else {
        Vec::new()
    };

    Ok(SweepSpec {
        kind,
        params,
        q_list,
        axis,
        values,
        preset: preset_name,
        policy: policy_from_env(4096)?,
    })
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn run_sweep(kind: SweepKind, args: &SweepArgs) -> Result<()> {
    let spec = build_spec(kind, args)?;
    let result = sweep::run(&spec)?;
    let content = match args.format {
        Format::Csv => result.to_csv(),
        Format::Json => result.to_json(),
    };
    write_output(args.out.as_deref(), &content)
}

/// Runs verification; `Ok(true)` means every check passed.
fn run_verify(args: &VerifyArgs) -> Result<bool> {
    if !(args.tol.is_finite() && args.tol > 0.0) {
        return Err(Error::Config(format!(
            "tolerance must be positive and finite, got {}",
            args.tol
        )));
    }
    if args.count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    let corrupt = args
        .corrupt
        .as_deref()
        .map(str::parse::<verify::Corruption>)
        .transpose()?;
    let policy = policy_from_env(1024)?;
    let opts = verify::VerifyOptions {
        tol: args.tol,
        seed: args.seed,
        count: args.count,
        max_dim: policy.max,
        corrupt,
    };
    let report = verify::run(&opts)?;
    write_output(args.out.as_deref(), &report.to_json())?;
    Ok(report.pass)
}

fn run_dump(args: &DumpArgs) -> Result<()> {
    use crate::fockspace::{
        build_annihilator, build_creation, build_number, build_q_half_number, build_quadratures,
    };
    use crate::qspecial::DeformationParameter;

    let q = DeformationParameter::new(args.q)?;
    let a = build_annihilator(q, args.dim)?;
    let ad = build_creation(q, args.dim)?;
    let n = build_number(args.dim)?;
    let qh = build_q_half_number(q, args.dim)?;
    let (x1, x2, p) = build_quadratures(q, args.dim)?;

    let mut out = String::new();
    out.push_str(&format!("# tool: qpointer {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str("# command: dump-operators\n");
    out.push_str(&format!("# q: {}\n", args.q));
    out.push_str(&format!("# dim: {}\n", args.dim));
    out.push_str("operator,row,col,re,im\n");
    for (name, op) in [
        ("annihilator", &a),
        ("creation", &ad),
        ("number", &n),
        ("q_half_number", &qh),
        ("x1", &x1),
        ("x2", &x2),
        ("p", &p),
    ] {
        for row in 0..op.dim() {
            for col in 0..op.dim() {
                let v = op.matrix[(row, col)];
                if v.norm_sqr() != 0.0 {
                    out.push_str(&format!("{name},{row},{col},{:.16e},{:.16e}\n", v.re, v.im));
                }
            }
        }
    }
    write_output(args.out.as_deref(), &out)
}

/// Parses the process arguments and runs the selected command, translating
/// errors into the documented exit codes.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome: Result<bool> = match &cli.command {
        Command::WeakValue(args) => run_sweep(SweepKind::WeakValue, args).map(|()| true),
        Command::PhotonDist(args) => run_sweep(SweepKind::PhotonDist, args).map(|()| true),
        Command::Mandel(args) => run_sweep(SweepKind::Mandel, args).map(|()| true),
        Command::G2(args) => run_sweep(SweepKind::G2, args).map(|()| true),
        Command::Quadrature(args) => run_sweep(SweepKind::Quadrature, args).map(|()| true),
        Command::Verify(args) => run_verify(args),
        Command::DumpOperators(args) => run_dump(args).map(|()| true),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
