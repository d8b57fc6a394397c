//! Low-energy labelling of phase-shift branches.
//!
//! As k → 0 a branch behaves like η ∼ k^(2λ+1), the analogue of the partial
//! wave with angular momentum λ around a spherical scatterer. Comparing the
//! roots at k and k/2 measures the exponent.

use super::generic::{generic_cot_eta_with, SolverOptions};
use super::{centered_mod_pi, PhaseShiftSet};
use crate::error::{Result, ScatterError};
use crate::geometry::Target;
use crate::kinematics::UnitRegime;
use crate::phase_models::PhaseModel;
use nalgebra::DVector;

/// Largest accepted |p − (2λ + 1)| for the measured exponent p.
const EXPONENT_SLACK: f64 = 0.3;

#[derive(Clone, Debug, PartialEq)]
pub struct BranchLabel {
    pub lambda: usize,
    pub multiplicity: usize,
    /// Measured low-k exponent p in η ∼ k^p.
    pub exponent: f64,
    /// η at `k_small`, reduced to (−π/2, π/2].
    pub eta: f64,
    pub mixture: Vec<DVector<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchClassification {
    pub k_small: f64,
    pub labels: Vec<BranchLabel>,
    /// Set when a root does not scale like an odd power of k or the roots at
    /// k and k/2 cannot be paired one-to-one.
    pub ambiguous: bool,
}

impl BranchClassification {
    pub fn count(&self, lambda: usize) -> usize {
        self.labels
            .iter()
            .filter(|l| l.lambda == lambda)
            .map(|l| l.multiplicity)
            .sum()
    }
}

pub fn classify_branches(
    target: &Target,
    model: &PhaseModel,
    regime: &UnitRegime,
    k_small: f64,
) -> Result<BranchClassification> {
    let models = vec![model.clone(); target.n()];
    classify_with_models(target, &models, regime, k_small, &SolverOptions::default())
}

pub(crate) fn classify_with_models(
    target: &Target,
    models: &[PhaseModel],
    regime: &UnitRegime,
    k_small: f64,
    opts: &SolverOptions,
) -> Result<BranchClassification> {
    let extent = target.distance_matrix().max_distance();
    if !(k_small > 0.0) || k_small * extent > 0.5 {
        return Err(ScatterError::domain(
            "k_small",
            k_small,
            "classification needs 0 < k*R_max <= 0.5",
        ));
    }
    let solve = |k: f64| -> Result<PhaseShiftSet> {
        let cots = models
            .iter()
            .map(|m| m.cot_delta0(k, regime))
            .collect::<Result<Vec<_>>>()?;
        generic_cot_eta_with(target, k, &cots, opts)
    };
    let hi = solve(k_small)?;
    let lo = solve(0.5 * k_small)?;
    Ok(classify_sets(&hi, &lo, target.n()))
}

fn overlap(a: &[DVector<f64>], b: &[DVector<f64>]) -> f64 {
    a.iter()
        .flat_map(|u| {
            b.iter()
                .map(move |v| u.dot(v).abs() / (u.norm() * v.norm()))
        })
        .fold(0.0, f64::max)
}

/// Labels the roots of `hi` (at k) using their partners in `lo` (at k/2).
pub(crate) fn classify_sets(
    hi: &PhaseShiftSet,
    lo: &PhaseShiftSet,
    n_centers: usize,
) -> BranchClassification {
    let mut ambiguous = false;
    let mut used = vec![0usize; lo.roots.len()];
    let mut labels = Vec::with_capacity(hi.roots.len());
    for root in &hi.roots {
        let partner = (0..lo.roots.len())
            .max_by(|&i, &j| {
                overlap(&root.mixture, &lo.roots[i].mixture)
                    .total_cmp(&overlap(&root.mixture, &lo.roots[j].mixture))
            })
            .expect("non-empty root set");
        used[partner] += root.multiplicity;
        let eta_hi = centered_mod_pi(root.eta_mod_pi);
        let eta_lo = centered_mod_pi(lo.roots[partner].eta_mod_pi);
        let exponent = (eta_hi.abs() / eta_lo.abs()).ln() / std::f64::consts::LN_2;
        let (lambda, fits) = if n_centers == 1 {
            (0, true)
        } else if exponent.is_finite() {
            let lambda = ((exponent - 1.0) / 2.0).round().max(0.0) as usize;
            (
                lambda,
                (exponent - (2 * lambda + 1) as f64).abs() <= EXPONENT_SLACK,
            )
        } else {
            (0, false)
        };
        ambiguous |= !fits;
        labels.push(BranchLabel {
            lambda,
            multiplicity: root.multiplicity,
            exponent,
            eta: eta_hi,
            mixture: root.mixture.clone(),
        });
    }
    ambiguous |= used
        .iter()
        .zip(&lo.roots)
        .any(|(&u, r)| u != r.multiplicity);
    BranchClassification {
        k_small: hi.k,
        labels,
        ambiguous,
    }
}
