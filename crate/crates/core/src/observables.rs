//! Averaged cross sections, cross-section ratios and partial time delays.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::kinematics::UnitRegime;
use crate::phase_models::breit_wigner_delay_addition;
use crate::solver::{closed_form_eta_derivative, Branch, PhaseCurve, PhaseShiftSet, SolvePath};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservableKind {
    /// Unwrapped phases in radians.
    Phase,
    CrossSection {
        unit: String,
    },
    CrossSectionRatio,
    /// Values are multiples of `tau_unit_s` seconds.
    TimeDelay {
        tau_unit_s: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Series {
    pub name: String,
    pub lambda: Option<usize>,
    pub multiplicity: usize,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveMetadata {
    pub n_centers: usize,
    /// Common pairwise distance when the target is a simplex.
    pub spacing: Option<f64>,
    pub centers: Vec<[f64; 3]>,
    pub length_unit: String,
    pub energy_unit: String,
    pub model: String,
    pub regime: UnitRegime,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableCurve {
    pub energies: Vec<f64>,
    pub momenta: Vec<f64>,
    pub kind: ObservableKind,
    pub series: Vec<Series>,
    pub metadata: CurveMetadata,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TimeDelayMethod {
    /// Chain rule through the closed forms; simplex targets only.
    #[default]
    Analytic,
    FiniteDifference,
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(ScatterError::domain("k", k, "wave number must be positive"));
    }
    Ok(())
}

/// σ̄ = (4π/k²) Σ m·sin²η over the roots of one solve.
pub fn averaged_cross_section(ps: &PhaseShiftSet, k: f64) -> Result<f64> {
    check_k(k)?;
    let sum: f64 = ps
        .roots
        .iter()
        .map(|r| r.multiplicity as f64 * r.cot_eta.sin_squared())
        .sum();
    Ok(4.0 * PI / (k * k) * sum)
}

/// σ₀ = (4π/k²) sin²δ₀ of an isolated center.
pub fn single_center_cross_section(k: f64, delta0: f64) -> Result<f64> {
    check_k(k)?;
    Ok(4.0 * PI / (k * k) * delta0.sin().powi(2))
}

/// σ̄ / (N σ₀).
pub fn cross_section_ratio(ps: &PhaseShiftSet, k: f64, delta0: f64, n: usize) -> Result<f64> {
    let sigma0 = single_center_cross_section(k, delta0)?;
    if sigma0 == 0.0 || delta0.sin() == 0.0 {
        return Err(ScatterError::VanishingSingleCenter);
    }
    Ok(averaged_cross_section(ps, k)? / (n as f64 * sigma0))
}

fn metadata(pc: &PhaseCurve) -> CurveMetadata {
    let model = match pc.shared_model() {
        Some(m) => m.describe(),
        None => pc
            .models
            .iter()
            .map(|m| m.describe())
            .collect::<Vec<_>>()
            .join("; "),
    };
    CurveMetadata {
        n_centers: pc.target.n(),
        spacing: match pc.path {
            SolvePath::ClosedForm { spacing } if pc.target.n() > 1 => Some(spacing),
            _ => None,
        },
        centers: pc
            .target
            .centers()
            .iter()
            .map(|c| [c.x, c.y, c.z])
            .collect(),
        length_unit: pc.regime.length_unit().to_string(),
        energy_unit: pc.regime.energy_unit().to_string(),
        model,
        regime: pc.regime,
    }
}

fn curve(pc: &PhaseCurve, kind: ObservableKind, series: Vec<Series>) -> ObservableCurve {
    ObservableCurve {
        energies: pc.energies.clone(),
        momenta: pc.momenta.clone(),
        kind,
        series,
        metadata: metadata(pc),
    }
}

/// Column names `{prefix}_{λ}`, with `_{j}` appended when a λ repeats.
fn branch_names(branches: &[Branch], prefix: &str) -> Vec<String> {
    branches
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let same: Vec<usize> = (0..branches.len())
                .filter(|&j| branches[j].lambda == b.lambda)
                .collect();
            if same.len() == 1 {
                format!("{prefix}_{}", b.lambda)
            } else {
                let pos = same.iter().position(|&j| j == i).unwrap_or(0);
                format!("{prefix}_{}_{}", b.lambda, pos + 1)
            }
        })
        .collect()
}

fn per_branch(pc: &PhaseCurve, prefix: &str, values: Vec<Vec<f64>>) -> Vec<Series> {
    branch_names(&pc.branches, prefix)
        .into_iter()
        .zip(&pc.branches)
        .zip(values)
        .map(|((name, b), values)| Series {
            name,
            lambda: Some(b.lambda),
            multiplicity: b.multiplicity,
            values,
        })
        .collect()
}

pub fn phase_table(pc: &PhaseCurve) -> ObservableCurve {
    let values = pc.branches.iter().map(|b| b.eta.clone()).collect();
    curve(pc, ObservableKind::Phase, per_branch(pc, "eta", values))
}

fn sigma_values(pc: &PhaseCurve) -> Vec<f64> {
    pc.momenta
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let sum: f64 = pc
                .branches
                .iter()
                .map(|b| b.multiplicity as f64 * b.eta[i].sin().powi(2))
                .sum();
            4.0 * PI / (k * k) * sum
        })
        .collect()
}

pub fn cross_section_curve(pc: &PhaseCurve) -> ObservableCurve {
    let unit = format!("{}^2", pc.regime.length_unit());
    let series = vec![Series {
        name: "sigma".into(),
        lambda: None,
        multiplicity: 1,
        values: sigma_values(pc),
    }];
    curve(pc, ObservableKind::CrossSection { unit }, series)
}

pub fn cross_section_ratio_curve(pc: &PhaseCurve) -> Result<ObservableCurve> {
    let delta0 = pc.delta0()?;
    let n = pc.target.n() as f64;
    let values = sigma_values(pc)
        .into_iter()
        .zip(&pc.momenta)
        .zip(&delta0)
        .map(|((sigma, &k), &d)| {
            let sigma0 = single_center_cross_section(k, d)?;
            if sigma0 == 0.0 {
                return Err(ScatterError::VanishingSingleCenter);
            }
            Ok(sigma / (n * sigma0))
        })
        .collect::<Result<Vec<_>>>()?;
    let series = vec![Series {
        name: "ratio".into(),
        lambda: None,
        multiplicity: 1,
        values,
    }];
    Ok(curve(pc, ObservableKind::CrossSectionRatio, series))
}

/// dy/dx on a nonuniform grid: three-point central differences inside,
/// three-point one-sided stencils at both ends.
pub fn gradient(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if x.len() != y.len() {
        return Err(ScatterError::GridMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(ScatterError::Config(
            "differentiation needs at least 2 points".into(),
        ));
    }
    if n == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return Ok(vec![d, d]);
    }
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        let h1 = x[i] - x[i - 1];
        let h2 = x[i + 1] - x[i];
        out[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1]
            + (h2 - h1) / (h1 * h2) * y[i]
            + h1 / (h2 * (h1 + h2)) * y[i + 1];
    }
    let (h1, h2) = (x[1] - x[0], x[2] - x[1]);
    out[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1]
        - h1 / (h2 * (h1 + h2)) * y[2];
    let (h1, h2) = (x[n - 2] - x[n - 3], x[n - 1] - x[n - 2]);
    out[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] - (h1 + h2) / (h1 * h2) * y[n - 2]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[n - 1];
    Ok(out)
}

/// τ_λ(E) = 2 dη_λ/dE in multiples of the regime's time unit.
pub fn time_delay_curve(pc: &PhaseCurve, method: TimeDelayMethod) -> Result<ObservableCurve> {
    let values = match method {
        TimeDelayMethod::FiniteDifference => pc
            .branches
            .iter()
            .map(|b| {
                Ok(gradient(&pc.energies, &b.eta)?
                    .into_iter()
                    .map(|d| 2.0 * d)
                    .collect())
            })
            .collect::<Result<Vec<Vec<f64>>>>()?,
        TimeDelayMethod::Analytic => analytic_delays(pc)?,
    };
    let kind = ObservableKind::TimeDelay {
        tau_unit_s: pc.regime.tau_unit_s(),
    };
    Ok(curve(pc, kind, per_branch(pc, "tau", values)))
}

fn analytic_delays(pc: &PhaseCurve) -> Result<Vec<Vec<f64>>> {
    let SolvePath::ClosedForm { spacing } = pc.path else {
        return Err(ScatterError::Unsupported(
            "analytic time delays need identical, equally spaced centers; use finite differences"
                .into(),
        ));
    };
    let model = pc
        .shared_model()
        .ok_or_else(|| ScatterError::Unsupported("centers use different phase models".into()))?;
    let n = pc.target.n();
    let regime = &pc.regime;
    pc.branches
        .iter()
        .map(|b| {
            pc.energies
                .iter()
                .zip(&pc.momenta)
                .map(|(&e, &k)| {
                    let d0 = model.eval_delta0(k, regime)?;
                    let dd0 = model.eval_delta0_derivative(k, regime)?;
                    let deta_dk = closed_form_eta_derivative(n, b.lambda, k, spacing, d0, dd0)?;
                    Ok(2.0 * deta_dk * regime.dk_de(e)?)
                })
                .collect()
        })
        .collect()
}

/// Adds the Breit–Wigner term 2·(Γ/2)/((E_res − E)² + Γ²/4) to every series.
pub fn resonance_augmented_delay(
    base: &ObservableCurve,
    gamma: f64,
    e_res: f64,
) -> Result<ObservableCurve> {
    if !matches!(base.kind, ObservableKind::TimeDelay { .. }) {
        return Err(ScatterError::Unsupported(
            "resonance terms add to time-delay curves only".into(),
        ));
    }
    if !(gamma > 0.0) {
        return Err(ScatterError::domain(
            "gamma",
            gamma,
            "resonance width must be positive",
        ));
    }
    let mut out = base.clone();
    for s in &mut out.series {
        if s.values.len() != base.energies.len() {
            return Err(ScatterError::GridMismatch {
                expected: base.energies.len(),
                found: s.values.len(),
            });
        }
        for (v, &e) in s.values.iter_mut().zip(&base.energies) {
            *v += 2.0 * breit_wigner_delay_addition(gamma, e_res, e);
        }
    }
    Ok(out)
}
