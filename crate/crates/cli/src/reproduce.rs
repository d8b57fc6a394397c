//! Predefined figure data sets, with their parameters built in.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use scatter_core::diffraction::{huygens_profile, theta_grid};
use scatter_core::observables::Series;
use scatter_core::solver::{phase_curve, EnergyGrid, PhaseCurve};
use scatter_core::{MesonConstants, PhaseModel, Target, UnitRegime};

use crate::config::{DelayMethod, Format, GridSpec, Observable, Spacing};
use crate::error::{CliError, Result};
use crate::output::{render_curve, render_profiles, Provenance};
use crate::run::{describe_grid, observable, Artifact};

/// Bond length used for the electron-cluster figures, bohr.
pub const CARBON_SPACING: f64 = 2.479;
/// Mean inter-nucleon distance of the deuteron, fm.
pub const NUCLEON_SPACING: f64 = 2.142;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 6] = [
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }

    pub fn needs_constants(self) -> bool {
        matches!(self, Figure::Fig6 | Figure::Fig7)
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| CliError::Field {
                field: "figure",
                reason: format!("expected one of fig2..fig7, got `{s}`"),
            })
    }
}

const CARBON_GRID: GridSpec = GridSpec {
    e_min: 0.05,
    e_max: 10.0,
    points: 2000,
    spacing: Spacing::Log,
};

const NUCLEON_GRID: GridSpec = GridSpec {
    e_min: 1.0,
    e_max: 800.0,
    points: 2000,
    spacing: Spacing::Log,
};

const MESON_FIT_GRID: GridSpec = GridSpec {
    e_min: 10.0,
    e_max: 1000.0,
    points: 4000,
    spacing: Spacing::Log,
};

struct Ctx<'a> {
    dir: &'a Path,
    format: Format,
    command: String,
}

impl Ctx<'_> {
    fn path(&self, stem: &str) -> PathBuf {
        self.dir.join(format!("{stem}.{}", self.format.extension()))
    }

    fn prov(&self, grid: Option<&GridSpec>, notes: Vec<String>) -> Provenance {
        Provenance {
            command: self.command.clone(),
            grid: grid.map(describe_grid),
            notes,
        }
    }
}

fn curve(
    n: usize,
    spacing: f64,
    model: &PhaseModel,
    regime: UnitRegime,
    grid: &GridSpec,
) -> Result<PhaseCurve> {
    let t = Target::make_simplex(n, spacing)?;
    let g: EnergyGrid = grid.build()?;
    phase_curve(&t, model, &regime, &g, &Default::default())
        .map_err(|e| CliError::context(format!("phase curves for {n} centers"), e))
}

pub fn reproduce(
    figure: Figure,
    dir: &Path,
    constants: Option<&Path>,
    format: Format,
) -> Result<Vec<Artifact>> {
    let ctx = Ctx {
        dir,
        format,
        command: format!("scatter reproduce {}", figure.name()),
    };
    let meson = || -> Result<PhaseModel> {
        let path = constants.ok_or(CliError::MissingConstants {
            figure: figure.name(),
        })?;
        let c = MesonConstants::from_path(path).map_err(|e| {
            CliError::context(
                format!("reading meson constants from {}", path.display()),
                e,
            )
        })?;
        Ok(PhaseModel::meson_fit(c))
    };
    match figure {
        Figure::Fig2 => fig2(&ctx),
        Figure::Fig3 => electron(&ctx, "fig3_cross_section", Observable::CrossSection),
        Figure::Fig4 => electron(&ctx, "fig4_time_delay", Observable::TimeDelay),
        Figure::Fig5 => fig5(&ctx),
        Figure::Fig6 => nucleon_fit(&ctx, &meson()?, "fig6_phases", Observable::Phases),
        Figure::Fig7 => nucleon_fit(&ctx, &meson()?, "fig7_time_delay", Observable::TimeDelay),
    }
}

fn fig2(ctx: &Ctx) -> Result<Vec<Artifact>> {
    let k = 1.0;
    let delta0 = PhaseModel::carbon().eval_delta0(k, &UnitRegime::atomic())?;
    let theta = theta_grid(720);
    let profiles = [1.0, 2.0, 5.0, 10.0, 20.0]
        .iter()
        .map(|f| huygens_profile(k, CARBON_SPACING, delta0, f * CARBON_SPACING, &theta))
        .collect::<Result<Vec<_>, _>>()?;
    let notes = vec!["observation radii r/R = 1, 2, 5, 10, 20 at k = 1 a.u.".into()];
    Ok(vec![Artifact {
        path: Some(ctx.path("fig2_profile")),
        contents: render_profiles(&profiles, &ctx.prov(None, notes), ctx.format),
    }])
}

fn electron(ctx: &Ctx, stem: &str, what: Observable) -> Result<Vec<Artifact>> {
    (1..=4)
        .map(|n| {
            let pc = curve(
                n,
                CARBON_SPACING,
                &PhaseModel::carbon(),
                UnitRegime::atomic(),
                &CARBON_GRID,
            )?;
            let c = observable(&pc, what, DelayMethod::Analytic, None)?;
            Ok(Artifact {
                path: Some(ctx.path(&format!("{stem}_n{n}"))),
                contents: render_curve(&c, &ctx.prov(Some(&CARBON_GRID), Vec::new()), ctx.format),
            })
        })
        .collect()
}

fn fig5(ctx: &Ctx) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    for (n, label) in [(2, "d"), (3, "t")] {
        for deg in [20, 30, 45] {
            let model = PhaseModel::constant_degrees(deg as f64);
            let pc = curve(
                n,
                NUCLEON_SPACING,
                &model,
                UnitRegime::pion(),
                &NUCLEON_GRID,
            )?;
            let c = observable(
                &pc,
                Observable::CrossSectionRatio,
                DelayMethod::Analytic,
                None,
            )?;
            out.push(Artifact {
                path: Some(ctx.path(&format!("fig5_ratio_{label}_{deg}deg"))),
                contents: render_curve(&c, &ctx.prov(Some(&NUCLEON_GRID), Vec::new()), ctx.format),
            });
        }
    }
    Ok(out)
}

fn nucleon_fit(
    ctx: &Ctx,
    model: &PhaseModel,
    stem: &str,
    what: Observable,
) -> Result<Vec<Artifact>> {
    (2..=4)
        .map(|n| {
            let pc = curve(
                n,
                NUCLEON_SPACING,
                model,
                UnitRegime::pion(),
                &MESON_FIT_GRID,
            )?;
            let mut c = observable(&pc, what, DelayMethod::Analytic, None)?;
            if what == Observable::Phases {
                c.series.insert(
                    0,
                    Series {
                        name: "delta_0".into(),
                        lambda: None,
                        multiplicity: 1,
                        values: pc.delta0()?,
                    },
                );
            }
            Ok(Artifact {
                path: Some(ctx.path(&format!("{stem}_n{n}"))),
                contents: render_curve(
                    &c,
                    &ctx.prov(Some(&MESON_FIT_GRID), Vec::new()),
                    ctx.format,
                ),
            })
        })
        .collect()
}
