//! Interference of the spherical waves emitted by a two-center target and
//! its far-field form as partial waves centered on the midpoint.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Result, ScatterError};
use crate::exec::Execution;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffractionProfile {
    pub theta: Vec<f64>,
    pub j: Vec<f64>,
    /// Observation radius.
    pub r: f64,
    /// Separation of the two centers.
    pub spacing: f64,
    pub k: f64,
    pub delta0: f64,
}

/// `points` angles uniformly covering [0, 2π).
pub fn theta_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| 2.0 * PI * i as f64 / points as f64)
        .collect()
}

fn check_k(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(ScatterError::domain("k", k, "wave number must be positive"));
    }
    Ok(())
}

fn check_spacing(spacing: f64) -> Result<()> {
    if !(spacing >= 0.0) || !spacing.is_finite() {
        return Err(ScatterError::domain(
            "R",
            spacing,
            "separation must be non-negative",
        ));
    }
    Ok(())
}

/// J(θ) at one angle; θ is measured from the axis through the centers.
fn huygens_point(k: f64, spacing: f64, delta0: f64, r: f64, theta: f64) -> f64 {
    let base = 0.25 * spacing * spacing + r * r;
    let cross = spacing * r * theta.cos();
    let r1 = (base - cross).sqrt();
    let r2 = (base + cross).sqrt();
    (k * r1 + delta0).sin() / (k * r1) + (k * r2 + delta0).sin() / (k * r2)
}

pub fn huygens_profile(
    k: f64,
    spacing: f64,
    delta0: f64,
    r: f64,
    theta: &[f64],
) -> Result<DiffractionProfile> {
    huygens_profile_with(k, spacing, delta0, r, theta, Execution::default())
}

pub fn huygens_profile_with(
    k: f64,
    spacing: f64,
    delta0: f64,
    r: f64,
    theta: &[f64],
    execution: Execution,
) -> Result<DiffractionProfile> {
    check_k(k)?;
    check_spacing(spacing)?;
    if !(r > 0.5 * spacing) || !r.is_finite() {
        return Err(ScatterError::domain(
            "r",
            r,
            "observation radius must exceed half the center separation",
        ));
    }
    let j = execution.map(theta, |&t| huygens_point(k, spacing, delta0, r, t));
    Ok(DiffractionProfile {
        theta: theta.to_vec(),
        j,
        r,
        spacing,
        k,
        delta0,
    })
}

/// Angular factor of the far-field partial wave λ ∈ {0, 1}.
pub fn far_field_envelope(k: f64, spacing: f64, lambda: usize, theta: f64) -> Result<f64> {
    let arg = 0.5 * k * spacing * theta.cos();
    match lambda {
        0 => Ok(arg.cos()),
        1 => Ok(arg.sin()),
        _ => Err(ScatterError::Unsupported(format!(
            "two-center envelopes exist for lambda 0 and 1, got {lambda}"
        ))),
    }
}

/// Envelope times the radial factor sin(kr + λπ/2 + η)/r.
pub fn far_field_wave(
    k: f64,
    spacing: f64,
    lambda: usize,
    eta: f64,
    r: f64,
    theta: f64,
) -> Result<f64> {
    let envelope = far_field_envelope(k, spacing, lambda, theta)?;
    let shift = if lambda == 1 { FRAC_PI_2 } else { 0.0 };
    Ok(envelope * (k * r + shift + eta).sin() / r)
}

/// Largest deviation of J from (2/kr)·cos((kR/2)cosθ)·sin(kr + δ₀) at each
/// radius, scaled by kr/2 so it measures the relative mismatch.
pub fn convergence_diagnostic(
    k: f64,
    spacing: f64,
    delta0: f64,
    radii: &[f64],
    theta: &[f64],
) -> Result<Vec<f64>> {
    check_k(k)?;
    check_spacing(spacing)?;
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ScatterError::Config(
            "radii must be strictly ascending".into(),
        ));
    }
    if let Some(&r) = radii.iter().find(|&&r| !(r > spacing)) {
        return Err(ScatterError::domain(
            "r",
            r,
            "radii must exceed the center separation",
        ));
    }
    radii
        .iter()
        .map(|&r| {
            let profile = huygens_profile(k, spacing, delta0, r, theta)?;
            let radial = 2.0 / (k * r) * (k * r + delta0).sin();
            let worst = profile
                .theta
                .iter()
                .zip(&profile.j)
                .map(|(&t, &j)| (j - radial * (0.5 * k * spacing * t.cos()).cos()).abs())
                .fold(0.0, f64::max);
            Ok(worst * 0.5 * k * r)
        })
        .collect()
}

/// Least-squares fit of y = a·x^p on log-log axes; returns (p, a).
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(ScatterError::GridMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(ScatterError::Config(
            "a power-law fit needs at least 2 points".into(),
        ));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(ScatterError::Config(
            "power-law fits need positive data".into(),
        ));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let p = sxy / sxx;
    Ok((p, (my - p * mx).exp()))
}
