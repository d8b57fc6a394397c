//! Multi-center phase shifts η_λ.
//!
//! Every solver here works with x = cot η. The boundary conditions at the
//! centers give a homogeneous system M(x)·D = 0 that is linear in x, so the
//! phase shifts are the roots of det(x·P + Q) = 0 and the mixture
//! coefficients D are the corresponding null vectors.

mod branches;
mod closed_form;
mod curve;
mod generic;

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use branches::{classify_branches, BranchClassification, BranchLabel};
pub use closed_form::{closed_form_cot_eta, closed_form_eta_derivative, x_minus_sin};
pub use curve::{
    phase_curve, phase_curve_per_center, Branch, EnergyGrid, PhaseCurve, PhaseCurveOptions,
    SolvePath, DEFAULT_MAX_STEP,
};
pub use generic::{
    build_system_matrices, determinant_residual, generic_cot_eta, generic_cot_eta_with,
    SolverOptions, SystemMatrices,
};

/// A value of cot η; `Infinite` means η ≡ 0 (mod π), i.e. no scattering in that channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CotEta {
    Finite(f64),
    Infinite,
}

impl CotEta {
    pub fn from_value(x: f64) -> Self {
        if x.is_finite() {
            CotEta::Finite(x)
        } else {
            CotEta::Infinite
        }
    }

    pub fn from_ratio(num: f64, den: f64) -> Self {
        if den == 0.0 {
            CotEta::Infinite
        } else {
            Self::from_value(num / den)
        }
    }

    /// The value as an `f64`; `Infinite` maps to `+inf`.
    pub fn value(self) -> f64 {
        match self {
            CotEta::Finite(x) => x,
            CotEta::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, CotEta::Infinite)
    }

    /// η reduced to (0, π]; an infinite cotangent maps to π.
    pub fn eta_mod_pi(self) -> f64 {
        match self {
            CotEta::Infinite => PI,
            CotEta::Finite(x) if x > 0.0 => (1.0 / x).atan(),
            CotEta::Finite(x) if x < 0.0 => PI + (1.0 / x).atan(),
            CotEta::Finite(_) => PI / 2.0,
        }
    }

    /// sin²η = 1/(1 + cot²η).
    pub fn sin_squared(self) -> f64 {
        match self {
            CotEta::Infinite => 0.0,
            CotEta::Finite(x) => 1.0 / (1.0 + x * x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ClosedForm,
    GeneralizedEigen,
    /// Sign-change bracketing used when the metric matrix P is too ill-conditioned.
    Bracketing,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRoot {
    pub cot_eta: CotEta,
    pub eta_mod_pi: f64,
    pub multiplicity: usize,
    /// Low-energy label λ; `None` until classified.
    pub branch: Option<usize>,
    /// Basis of the null space of M(x), one unit vector per unit of multiplicity.
    /// Empty for closed-form results.
    pub mixture: Vec<DVector<f64>>,
}

impl PhaseRoot {
    pub fn new(cot_eta: CotEta, multiplicity: usize) -> Self {
        PhaseRoot {
            cot_eta,
            eta_mod_pi: cot_eta.eta_mod_pi(),
            multiplicity,
            branch: None,
            mixture: Vec::new(),
        }
    }

    pub fn with_branch(mut self, lambda: usize) -> Self {
        self.branch = Some(lambda);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseShiftSet {
    pub k: f64,
    pub roots: Vec<PhaseRoot>,
    pub method: SolveMethod,
}

impl PhaseShiftSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// All cot η values repeated by multiplicity, ascending, `+inf` last.
    pub fn expanded_cots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.cot_eta.value(), r.multiplicity))
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Multiplicities, ascending.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m: Vec<usize> = self.roots.iter().map(|r| r.multiplicity).collect();
        m.sort_unstable();
        m
    }
}

/// Representative of `eta` modulo π in (−π/2, π/2].
pub(crate) fn centered_mod_pi(eta: f64) -> f64 {
    let r = eta - PI * (eta / PI).round();
    if r <= -PI / 2.0 {
        r + PI
    } else {
        r
    }
}

/// Distance between two angles on the circle of period π.
pub(crate) fn distance_mod_pi(a: f64, b: f64) -> f64 {
    centered_mod_pi(a - b).abs()
}
