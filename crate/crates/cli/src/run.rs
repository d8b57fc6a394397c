use std::io::Write as _;
use std::path::{Path, PathBuf};

use scatter_core::observables::{
    cross_section_curve, cross_section_ratio_curve, phase_table, resonance_augmented_delay,
    time_delay_curve,
};
use scatter_core::solver::{phase_curve, PhaseCurve, SolvePath};
use scatter_core::ObservableCurve;

use crate::config::{DelayMethod, GridSpec, Observable, Resonance, RunConfig, Spacing};
use crate::error::{CliError, Result};
use crate::output::{render_curve, Provenance};

/// One rendered output file; `path: None` means standard output.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub contents: String,
}

pub fn describe_grid(g: &GridSpec) -> String {
    let spacing = match g.spacing {
        Spacing::Linear => "linear",
        Spacing::Log => "log",
    };
    format!("{} to {}, {} points, {spacing}", g.e_min, g.e_max, g.points)
}

pub(crate) fn observable(
    pc: &PhaseCurve,
    what: Observable,
    method: DelayMethod,
    resonance: Option<Resonance>,
) -> Result<ObservableCurve> {
    Ok(match what {
        Observable::Phases => phase_table(pc),
        Observable::CrossSection => cross_section_curve(pc),
        Observable::CrossSectionRatio => cross_section_ratio_curve(pc)?,
        Observable::TimeDelay => {
            let closed = matches!(pc.path, SolvePath::ClosedForm { .. });
            let tau = time_delay_curve(pc, method.pick(closed))?;
            match resonance {
                Some(r) => resonance_augmented_delay(&tau, r.gamma, r.e_res)?,
                None => tau,
            }
        }
    })
}

fn output_path(base: &Path, what: Observable, several: bool) -> PathBuf {
    if !several {
        return base.to_path_buf();
    }
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_{}.{}", what.file_tag(), ext.to_string_lossy()),
        None => format!("{stem}_{}", what.file_tag()),
    };
    base.with_file_name(name)
}

/// Computes every requested observable of `cfg`; nothing is written yet.
pub fn run(cfg: &RunConfig, command: &str) -> Result<Vec<Artifact>> {
    cfg.validate()?;
    let target = cfg.target.build()?;
    let model = cfg.model.resolve(None)?;
    let regime = cfg.regime_for(&model);
    let grid = cfg.grid.build()?;
    let pc = phase_curve(&target, &model, &regime, &grid, &Default::default())
        .map_err(|e| CliError::context("computing phase curves", e))?;
    let prov = Provenance {
        command: command.to_string(),
        grid: Some(describe_grid(&cfg.grid)),
        notes: Vec::new(),
    };
    let several = cfg.outputs.len() > 1;
    cfg.outputs
        .iter()
        .map(|&what| {
            let curve = observable(&pc, what, cfg.time_delay_method, cfg.resonance)
                .map_err(|e| CliError::context(format!("computing {}", what.file_tag()), e))?;
            Ok(Artifact {
                path: cfg
                    .output_path
                    .as_deref()
                    .map(|p| output_path(p, what, several)),
                contents: render_curve(&curve, &prov, cfg.format),
            })
        })
        .collect()
}

/// Writes files (creating parent directories) or prints to standard output.
pub fn emit(artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for a in artifacts {
        match &a.path {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)
                        .map_err(|e| CliError::context(format!("creating {}", dir.display()), e))?;
                }
                std::fs::write(path, &a.contents)
                    .map_err(|e| CliError::context(format!("writing {}", path.display()), e))?;
                written.push(path.clone());
            }
            None => {
                let mut out = std::io::stdout().lock();
                match out
                    .write_all(a.contents.as_bytes())
                    .and_then(|_| out.flush())
                {
                    // a closed pipe (`| head`) is not a failure
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => return Ok(written),
                    r => r?,
                }
            }
        }
    }
    Ok(written)
}
