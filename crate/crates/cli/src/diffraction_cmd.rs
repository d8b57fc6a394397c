//! The `diffraction` subcommand: J(θ) at several observation radii.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use scatter_core::diffraction::{huygens_profile, theta_grid};
use scatter_core::{PhaseModel, UnitRegime};

use crate::config::Format;
use crate::error::{CliError, Result};
use crate::output::{render_profiles, Provenance};
use crate::run::Artifact;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ProfileFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct DiffractionArgs {
    /// Wave number.
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Separation of the two centers.
    #[arg(long = "r", default_value_t = 2.479)]
    pub spacing: f64,
    /// Single-center phase in radians; the carbon model at k when omitted.
    #[arg(long, allow_negative_numbers = true)]
    pub delta0: Option<f64>,
    /// Observation radii in units of the separation, comma separated.
    #[arg(long, default_value = "1,2,5,10,20")]
    pub radii: String,
    /// Number of angles covering [0, 2π).
    #[arg(long, default_value_t = 720)]
    pub points: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: ProfileFormat,
}

fn parse_radii(s: &str) -> Result<Vec<f64>> {
    let radii = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| CliError::Field {
            field: "radii",
            reason: e.to_string(),
        })?;
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.5) || !r.is_finite()) {
        return Err(CliError::Field {
            field: "radii",
            reason: "every radius must exceed half the separation (r/R > 0.5)".into(),
        });
    }
    Ok(radii)
}

pub fn run(args: &DiffractionArgs, command: &str) -> Result<Vec<Artifact>> {
    if args.points == 0 {
        return Err(CliError::Field {
            field: "points",
            reason: "need at least one angle".into(),
        });
    }
    let radii = parse_radii(&args.radii)?;
    let delta0 = match args.delta0 {
        Some(d) => d,
        None => PhaseModel::carbon().eval_delta0(args.k, &UnitRegime::atomic())?,
    };
    let theta = theta_grid(args.points);
    let profiles = radii
        .iter()
        .map(|f| huygens_profile(args.k, args.spacing, delta0, f * args.spacing, &theta))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let format = match args.format {
        ProfileFormat::Csv => Format::Csv,
        ProfileFormat::Json => Format::Json,
    };
    let prov = Provenance {
        command: command.to_string(),
        grid: None,
        notes: vec![format!("observation radii r/R = {}", args.radii)],
    };
    Ok(vec![Artifact {
        path: args.out.clone(),
        contents: render_profiles(&profiles, &prov, format),
    }])
}
