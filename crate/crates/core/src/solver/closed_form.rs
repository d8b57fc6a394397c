//! Phase shifts of equal-spaced, identical-center targets.
//!
//! For N identical centers with one common distance R the boundary-condition
//! determinant factors into (A − B)^(N−1)·((N−1)A + B), giving one fully
//! symmetric root λ = 0 and an (N−1)-fold root λ = 1:
//!
//! cot η₀ = (kR cot δ₀ − (N−1) cos kR) / (kR + (N−1) sin kR)
//! cot η₁ = (kR cot δ₀ + cos kR) / (kR − sin kR)

use super::{CotEta, PhaseRoot};
use crate::error::{Result, ScatterError};

/// x − sin x, accurate for small x where the direct difference cancels.
pub fn x_minus_sin(x: f64) -> f64 {
    if x.abs() < 0.5 {
        // alternating series x³/3! − x⁵/5! + …; terms beyond x¹⁷ are below 1e-18 relative
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum = term;
        let mut n = 3.0;
        while n < 17.0 {
            term *= -x2 / ((n + 1.0) * (n + 2.0));
            sum += term;
            n += 2.0;
        }
        sum
    } else {
        x - x.sin()
    }
}

/// Roots for a simplex of `n` ∈ 1..=4 identical centers at dimensionless `kr`.
pub fn closed_form_cot_eta(n: usize, kr: f64, cot_delta0: f64) -> Result<Vec<PhaseRoot>> {
    if !(1..=4).contains(&n) {
        return Err(ScatterError::Unsupported(format!(
            "closed forms exist for 1 to 4 equally spaced centers, got {n}"
        )));
    }
    if !(kr > 0.0) {
        return Err(ScatterError::domain("kR", kr, "must be positive"));
    }
    if cot_delta0.is_nan() {
        return Err(ScatterError::domain(
            "cot delta0",
            cot_delta0,
            "must not be NaN",
        ));
    }
    if n == 1 {
        return Ok(vec![
            PhaseRoot::new(CotEta::from_value(cot_delta0), 1).with_branch(0)
        ]);
    }
    if cot_delta0.is_infinite() {
        return Ok(vec![
            PhaseRoot::new(CotEta::Infinite, 1).with_branch(0),
            PhaseRoot::new(CotEta::Infinite, n - 1).with_branch(1),
        ]);
    }
    let m = (n - 1) as f64;
    let (s, c) = kr.sin_cos();
    let eta0 = CotEta::from_ratio(kr * cot_delta0 - m * c, kr + m * s);
    let eta1 = CotEta::from_ratio(kr * cot_delta0 + c, x_minus_sin(kr));
    Ok(vec![
        PhaseRoot::new(eta0, 1).with_branch(0),
        PhaseRoot::new(eta1, n - 1).with_branch(1),
    ])
}

/// cot η = num/den scaled by sin δ₀ so that δ₀ → 0 (mod π) stays finite.
fn scaled_num_den(n: usize, lambda: usize, kr: f64, delta0: f64) -> (f64, f64) {
    let (sd, cd) = delta0.sin_cos();
    let (s, c) = kr.sin_cos();
    match (n, lambda) {
        (1, _) => (cd, sd),
        (_, 0) => {
            let m = (n - 1) as f64;
            (kr * cd - m * c * sd, (kr + m * s) * sd)
        }
        _ => (kr * cd + c * sd, x_minus_sin(kr) * sd),
    }
}

/// dη_λ/dk for a simplex target from the closed forms, given δ₀(k) and dδ₀/dk.
pub fn closed_form_eta_derivative(
    n: usize,
    lambda: usize,
    k: f64,
    r: f64,
    delta0: f64,
    ddelta0_dk: f64,
) -> Result<f64> {
    if !(1..=4).contains(&n) || lambda > 1 || (n == 1 && lambda != 0) {
        return Err(ScatterError::Unsupported(format!(
            "no closed-form branch lambda={lambda} for {n} centers"
        )));
    }
    if n == 1 {
        return Ok(ddelta0_dk);
    }
    let kr = k * r;
    let (num, den) = scaled_num_den(n, lambda, kr, delta0);
    let (sd, cd) = delta0.sin_cos();
    let (s, c) = kr.sin_cos();
    let (dnum, dden) = if lambda == 0 {
        let m = (n - 1) as f64;
        (
            r * cd - kr * sd * ddelta0_dk + m * (r * s * sd - c * cd * ddelta0_dk),
            r * (1.0 + m * c) * sd + (kr + m * s) * cd * ddelta0_dk,
        )
    } else {
        (
            r * cd - kr * sd * ddelta0_dk - r * s * sd + c * cd * ddelta0_dk,
            r * (1.0 - c) * sd + x_minus_sin(kr) * cd * ddelta0_dk,
        )
    };
    // η = atan(den/num) on a continuous branch
    Ok((num * dden - dnum * den) / (num * num + den * den))
}
