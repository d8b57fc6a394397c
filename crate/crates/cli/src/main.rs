use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use scatter_cli::config::{parse_regime, DelayMethod, Resonance};
use scatter_cli::diffraction_cmd;
use scatter_cli::{emit, reproduce, Figure, Format, GridSpec, ModelSpec, Observable, RunConfig};
use scatter_core::geometry::{LengthUnit, SimplexSpec};
use scatter_core::TargetSpec;

/// Phase shifts, cross sections and time delays for clusters of zero-range potentials.
#[derive(Parser)]
#[command(name = "scatter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unwrapped phase shifts eta_lambda(E).
    Phases(ScanArgs),
    /// Orientation-averaged elastic cross section.
    CrossSection {
        #[command(flatten)]
        scan: ScanArgs,
        /// Emit sigma / (N sigma0) instead of sigma.
        #[arg(long)]
        ratio: bool,
    },
    /// Partial time delays 2 d(eta)/dE.
    TimeDelay {
        #[command(flatten)]
        scan: ScanArgs,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        /// Add a Breit-Wigner term, given as GAMMA:E_RES.
        #[arg(long)]
        resonance: Option<String>,
    },
    /// Huygens interference profile J(theta) of a two-center target.
    Diffraction(diffraction_cmd::DiffractionArgs),
    /// Write one of the predefined figure data sets.
    Reproduce {
        #[arg(value_enum)]
        figure: FigureArg,
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Meson phase constants (JSON), required by fig6 and fig7.
        #[arg(long)]
        constants: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// JSON run configuration; flags given alongside override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of equally spaced centers (1 to 4).
    #[arg(long, conflicts_with = "centers")]
    simplex: Option<usize>,
    /// Distance between centers for --simplex.
    #[arg(long = "r", requires = "simplex")]
    spacing: Option<f64>,
    /// Explicit centers as "x,y,z;x,y,z;...".
    #[arg(long)]
    centers: Option<String>,
    /// carbon, constant:<degrees>, or a path to a meson constants file.
    #[arg(long)]
    model: Option<String>,
    /// Energy grid MIN:MAX:POINTS[:log|:linear].
    #[arg(long)]
    grid: Option<String>,
    /// atomic, pion or meson:<rest energy MeV>; defaults from the model.
    #[arg(long)]
    regime: Option<String>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    All,
}

fn parse_centers(s: &str) -> anyhow::Result<Vec<[f64; 3]>> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let v: Vec<f64> = p
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .with_context(|| format!("invalid --centers entry `{p}`"))?;
            match v[..] {
                [x, y, z] => Ok([x, y, z]),
                _ => bail!("invalid --centers entry `{p}`: expected x,y,z"),
            }
        })
        .collect()
}

fn build_config(args: &ScanArgs, default_output: Observable) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => {
            let target = match (args.simplex, args.spacing, &args.centers) {
                (Some(n), Some(r), None) => TargetSpec::Simplex {
                    simplex: SimplexSpec { n, r },
                    length_unit: LengthUnit::default(),
                },
                (Some(_), None, None) => bail!("--simplex needs --r"),
                (None, _, Some(c)) => TargetSpec::Centers {
                    centers: parse_centers(c)?,
                    length_unit: LengthUnit::default(),
                },
                _ => bail!("describe the target with --simplex N --r R, --centers, or --config"),
            };
            let grid = args
                .grid
                .as_deref()
                .context("--grid is required without --config")?;
            RunConfig {
                target,
                model: ModelSpec::Named("carbon".into()),
                regime: None,
                grid: GridSpec::parse(grid)?,
                outputs: Vec::new(),
                output_path: None,
                format: Format::Csv,
                time_delay_method: DelayMethod::Auto,
                resonance: None,
            }
        }
    };
    if args.config.is_some() {
        if let (Some(n), Some(r)) = (args.simplex, args.spacing) {
            cfg.target = TargetSpec::Simplex {
                simplex: SimplexSpec { n, r },
                length_unit: LengthUnit::default(),
            };
        }
        if let Some(c) = &args.centers {
            cfg.target = TargetSpec::Centers {
                centers: parse_centers(c)?,
                length_unit: LengthUnit::default(),
            };
        }
        if let Some(g) = &args.grid {
            cfg.grid = GridSpec::parse(g)?;
        }
    }
    if let Some(m) = &args.model {
        cfg.model = ModelSpec::Named(m.clone());
    }
    if let Some(r) = &args.regime {
        cfg.regime = Some(parse_regime(r)?);
    }
    if let Some(o) = &args.out {
        cfg.output_path = Some(o.clone());
    }
    if let Some(f) = args.format {
        cfg.format = f.into();
    }
    if cfg.outputs.is_empty() {
        cfg.outputs = vec![default_output];
    }
    Ok(cfg)
}

fn parse_resonance(s: &str) -> anyhow::Result<Resonance> {
    let (g, e) = s
        .split_once(':')
        .context("--resonance expects GAMMA:E_RES")?;
    Ok(Resonance {
        gamma: g.trim().parse().context("--resonance GAMMA")?,
        e_res: e.trim().parse().context("--resonance E_RES")?,
    })
}

fn command_line() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("scatter {}", args.join(" "))
}

fn report(written: &[PathBuf]) {
    for p in written {
        eprintln!("wrote {}", p.display());
    }
}

fn scan(cfg: RunConfig) -> anyhow::Result<()> {
    let artifacts = scatter_cli::run(&cfg, &command_line())?;
    report(&emit(&artifacts)?);
    Ok(())
}

fn reproduce_all(
    figures: &[Figure],
    out: &Path,
    format: Format,
    constants: Option<&Path>,
) -> anyhow::Result<()> {
    for &f in figures {
        if f.needs_constants() && constants.is_none() && figures.len() > 1 {
            eprintln!("skipping {}: no --constants file given", f.name());
            continue;
        }
        let artifacts = reproduce(f, out, constants, format)
            .with_context(|| format!("reproducing {}", f.name()))?;
        report(&emit(&artifacts)?);
    }
    Ok(())
}

fn main_inner() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Phases(args) => scan(build_config(&args, Observable::Phases)?),
        Command::CrossSection { scan: args, ratio } => {
            let what = if ratio {
                Observable::CrossSectionRatio
            } else {
                Observable::CrossSection
            };
            scan(build_config(&args, what)?)
        }
        Command::TimeDelay {
            scan: args,
            method,
            resonance,
        } => {
            let mut cfg = build_config(&args, Observable::TimeDelay)?;
            cfg.time_delay_method = match method {
                MethodArg::Auto => cfg.time_delay_method,
                MethodArg::Analytic => DelayMethod::Analytic,
                MethodArg::FiniteDifference => DelayMethod::FiniteDifference,
            };
            if let Some(r) = resonance {
                cfg.resonance = Some(parse_resonance(&r)?);
            }
            scan(cfg)
        }
        Command::Diffraction(args) => {
            let artifacts = diffraction_cmd::run(&args, &command_line())?;
            report(&emit(&artifacts)?);
            Ok(())
        }
        Command::Reproduce {
            figure,
            out,
            format,
            constants,
        } => {
            let figures: Vec<Figure> = match figure {
                FigureArg::Fig2 => vec![Figure::Fig2],
                FigureArg::Fig3 => vec![Figure::Fig3],
                FigureArg::Fig4 => vec![Figure::Fig4],
                FigureArg::Fig5 => vec![Figure::Fig5],
                FigureArg::Fig6 => vec![Figure::Fig6],
                FigureArg::Fig7 => vec![Figure::Fig7],
                FigureArg::All => Figure::ALL.to_vec(),
            };
            reproduce_all(&figures, &out, format.into(), constants.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
