//! Continuous phase-shift curves η_λ(E) on an energy grid.

use std::f64::consts::PI;

use itertools::Itertools;
use nalgebra::DVector;

use super::branches::{classify_sets, BranchClassification};
use super::closed_form::closed_form_cot_eta;
use super::generic::{generic_cot_eta_with, SolverOptions};
use super::{centered_mod_pi, distance_mod_pi, PhaseShiftSet, SolveMethod};
use crate::error::{Result, ScatterError};
use crate::exec::Execution;
use crate::geometry::{Target, EQUAL_SPACING_TOL};
use crate::kinematics::UnitRegime;
use crate::phase_models::PhaseModel;

/// Default bound on |η(E_{i+1}) − η(E_i)| after unwrapping.
pub const DEFAULT_MAX_STEP: f64 = 0.45 * PI;

/// kR_max below which the low-energy labelling is carried out.
const CLASSIFY_KR: f64 = 0.05;
/// Ratio between successive momenta when walking from the labelling point up to the grid.
const LADDER_RATIO: f64 = 1.1;

#[derive(Clone, Debug, PartialEq)]
pub struct EnergyGrid(Vec<f64>);

impl EnergyGrid {
    /// Strictly ascending, finite, positive energies; at least two points.
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.len() < 2 {
            return Err(ScatterError::Config(
                "an energy grid needs at least 2 points".into(),
            ));
        }
        if !(energies[0] > 0.0) {
            return Err(ScatterError::domain(
                "e_min",
                energies[0],
                "grids must start above threshold",
            ));
        }
        if energies.iter().any(|e| !e.is_finite()) || energies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ScatterError::Config(
                "energy grid must be finite and strictly ascending".into(),
            ));
        }
        Ok(EnergyGrid(energies))
    }

    pub fn linear(e_min: f64, e_max: f64, points: usize) -> Result<Self> {
        check_bounds(e_min, e_max, points)?;
        let step = (e_max - e_min) / (points - 1) as f64;
        let mut v: Vec<f64> = (0..points).map(|i| e_min + step * i as f64).collect();
        v[points - 1] = e_max;
        Self::new(v)
    }

    pub fn log(e_min: f64, e_max: f64, points: usize) -> Result<Self> {
        check_bounds(e_min, e_max, points)?;
        let ratio = (e_max / e_min).ln() / (points - 1) as f64;
        let mut v: Vec<f64> = (0..points)
            .map(|i| e_min * (ratio * i as f64).exp())
            .collect();
        v[0] = e_min;
        v[points - 1] = e_max;
        Self::new(v)
    }

    pub fn energies(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn check_bounds(e_min: f64, e_max: f64, points: usize) -> Result<()> {
    if points < 2 {
        return Err(ScatterError::Config(
            "an energy grid needs at least 2 points".into(),
        ));
    }
    if !(e_min > 0.0) {
        return Err(ScatterError::domain(
            "e_min",
            e_min,
            "grids must start above threshold",
        ));
    }
    if !(e_max > e_min) {
        return Err(ScatterError::domain("e_max", e_max, "must exceed e_min"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCurveOptions {
    pub execution: Execution,
    /// Use the matrix solver even when closed forms apply.
    pub force_generic: bool,
    pub max_step: f64,
    pub spacing_tol: f64,
    pub solver: SolverOptions,
}

impl Default for PhaseCurveOptions {
    fn default() -> Self {
        PhaseCurveOptions {
            execution: Execution::default(),
            force_generic: false,
            max_step: DEFAULT_MAX_STEP,
            spacing_tol: EQUAL_SPACING_TOL,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolvePath {
    /// Identical centers, all pairwise distances equal to `spacing` (or a single center).
    ClosedForm {
        spacing: f64,
    },
    Generic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub lambda: usize,
    pub multiplicity: usize,
    /// Unwrapped η in radians, one entry per grid point.
    pub eta: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct PhaseCurve {
    pub energies: Vec<f64>,
    pub momenta: Vec<f64>,
    pub branches: Vec<Branch>,
    pub regime: UnitRegime,
    pub target: Target,
    pub models: Vec<PhaseModel>,
    pub path: SolvePath,
    /// Low-energy labels could not be fixed by scaling alone.
    pub ambiguous_labels: bool,
    /// Grid points solved by the bracketing fallback.
    pub bracketed_points: usize,
}

impl PhaseCurve {
    /// The single-center phase δ₀(E) when all centers share one model.
    pub fn delta0(&self) -> Result<Vec<f64>> {
        let model = self.shared_model().ok_or_else(|| {
            ScatterError::Unsupported("centers use different phase models".into())
        })?;
        self.momenta
            .iter()
            .map(|&k| model.eval_delta0(k, &self.regime))
            .collect()
    }

    pub fn shared_model(&self) -> Option<&PhaseModel> {
        let first = &self.models[0];
        self.models.iter().all(|m| m == first).then_some(first)
    }

    pub fn branch(&self, lambda: usize) -> Option<&Branch> {
        self.branches.iter().find(|b| b.lambda == lambda)
    }
}

pub fn phase_curve(
    target: &Target,
    model: &PhaseModel,
    regime: &UnitRegime,
    grid: &EnergyGrid,
    opts: &PhaseCurveOptions,
) -> Result<PhaseCurve> {
    let models = vec![model.clone(); target.n()];
    phase_curve_per_center(target, &models, regime, grid, opts)
}

pub fn phase_curve_per_center(
    target: &Target,
    models: &[PhaseModel],
    regime: &UnitRegime,
    grid: &EnergyGrid,
    opts: &PhaseCurveOptions,
) -> Result<PhaseCurve> {
    if models.len() != target.n() {
        return Err(ScatterError::Config(format!(
            "{} phase models for {} centers",
            models.len(),
            target.n()
        )));
    }
    regime.validate()?;
    for m in models {
        m.validate()?;
    }
    let momenta = grid
        .energies()
        .iter()
        .map(|&e| regime.momentum_from_energy(e))
        .collect::<Result<Vec<_>>>()?;

    let n = target.n();
    let identical = models.iter().all(|m| m == &models[0]);
    let spacing = if n == 1 {
        Some(1.0)
    } else {
        target.equal_spacing(opts.spacing_tol)
    };
    let curve = |branches, path, ambiguous_labels, bracketed_points| PhaseCurve {
        energies: grid.energies().to_vec(),
        momenta: momenta.clone(),
        branches,
        regime: *regime,
        target: target.clone(),
        models: models.to_vec(),
        path,
        ambiguous_labels,
        bracketed_points,
    };

    match spacing {
        Some(r) if identical && n <= 4 && !opts.force_generic => {
            let branches = closed_form_branches(n, r, &models[0], regime, grid, &momenta, opts)?;
            Ok(curve(
                branches,
                SolvePath::ClosedForm { spacing: r },
                false,
                0,
            ))
        }
        _ => {
            let (branches, ambiguous, bracketed) =
                generic_branches(target, models, regime, grid, &momenta, opts)?;
            Ok(curve(branches, SolvePath::Generic, ambiguous, bracketed))
        }
    }
}

fn closed_form_branches(
    n: usize,
    r: f64,
    model: &PhaseModel,
    regime: &UnitRegime,
    grid: &EnergyGrid,
    momenta: &[f64],
    opts: &PhaseCurveOptions,
) -> Result<Vec<Branch>> {
    let rows: Vec<Vec<f64>> = opts.execution.try_map(momenta, |&k| {
        let c = model.cot_delta0(k, regime)?;
        let roots = closed_form_cot_eta(n, k * r, c)?;
        Ok::<_, ScatterError>(roots.iter().map(|root| root.eta_mod_pi).collect())
    })?;
    let shape: Vec<(usize, usize)> = if n == 1 {
        vec![(0, 1)]
    } else {
        vec![(0, 1), (1, n - 1)]
    };
    shape
        .into_iter()
        .enumerate()
        .map(|(col, (lambda, multiplicity))| {
            let raw: Vec<f64> = rows.iter().map(|row| row[col]).collect();
            let eta = unwrap(&raw, grid.energies(), opts.max_step)?;
            Ok(Branch {
                lambda,
                multiplicity,
                eta,
            })
        })
        .collect()
}

/// Adds multiples of π so consecutive values differ as little as possible,
/// starting from the representative in (−π/2, π/2].
fn unwrap(raw: &[f64], energies: &[f64], max_step: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut prev = centered_mod_pi(raw[0]);
    out.push(prev);
    for i in 1..raw.len() {
        let next = nearest_representative(raw[i], prev);
        check_step(prev, next, energies[i - 1], energies[i], max_step)?;
        out.push(next);
        prev = next;
    }
    Ok(out)
}

fn nearest_representative(eta_mod: f64, prev: f64) -> f64 {
    eta_mod + PI * ((prev - eta_mod) / PI).round()
}

fn check_step(prev: f64, next: f64, e_lo: f64, e_hi: f64, limit: f64) -> Result<()> {
    let jump = (next - prev).abs();
    if jump > limit {
        return Err(ScatterError::GridTooCoarse {
            e_lo,
            e_hi,
            jump,
            limit,
        });
    }
    Ok(())
}

struct Track {
    lambda: usize,
    eta: f64,
    mixture: DVector<f64>,
}

/// One root per unit of multiplicity: (η mod π, mixture vector).
fn expand(set: &PhaseShiftSet) -> Vec<(f64, DVector<f64>)> {
    set.roots
        .iter()
        .flat_map(|r| r.mixture.iter().map(move |v| (r.eta_mod_pi, v.clone())))
        .collect()
}

fn generic_branches(
    target: &Target,
    models: &[PhaseModel],
    regime: &UnitRegime,
    grid: &EnergyGrid,
    momenta: &[f64],
    opts: &PhaseCurveOptions,
) -> Result<(Vec<Branch>, bool, usize)> {
    let n = target.n();
    let extent = target
        .distance_matrix()
        .max_distance()
        .max(f64::MIN_POSITIVE);
    let k_first = momenta[0];
    let k_label = k_first.min(CLASSIFY_KR / extent);

    // geometric ladder from the labelling momentum up to (excluding) the grid
    let mut ladder = Vec::new();
    let mut k = k_label;
    while k < k_first / LADDER_RATIO {
        ladder.push(k);
        k *= LADDER_RATIO;
    }
    if ladder.is_empty() || ladder[0] != k_label {
        ladder.insert(0, k_label);
    }
    if ladder.last() == Some(&k_first) {
        ladder.pop();
    }

    let solve = |&k: &f64| -> Result<PhaseShiftSet> {
        let cots = models
            .iter()
            .map(|m| m.cot_delta0(k, regime))
            .collect::<Result<Vec<_>>>()?;
        generic_cot_eta_with(target, k, &cots, &opts.solver)
    };

    let label_set = solve(&k_label)?;
    let half_set = solve(&(0.5 * k_label))?;
    let classification: BranchClassification = classify_sets(&label_set, &half_set, n);

    let ladder_sets = opts
        .execution
        .try_map(&ladder[1.min(ladder.len())..], solve)?;
    let grid_sets = opts.execution.try_map(momenta, solve)?;
    let bracketed = grid_sets
        .iter()
        .filter(|s| s.method == SolveMethod::Bracketing)
        .count();

    let mut tracks: Vec<Track> = Vec::with_capacity(n);
    for (root, label) in label_set.roots.iter().zip(&classification.labels) {
        for v in &root.mixture {
            tracks.push(Track {
                lambda: label.lambda,
                eta: centered_mod_pi(root.eta_mod_pi),
                mixture: v.clone(),
            });
        }
    }

    for set in &ladder_sets {
        advance(&mut tracks, set);
    }
    let energies = grid.energies();
    let mut values = vec![Vec::with_capacity(momenta.len()); n];
    for (i, set) in grid_sets.iter().enumerate() {
        let before: Vec<f64> = tracks.iter().map(|t| t.eta).collect();
        advance(&mut tracks, set);
        for ((col, t), prev) in values.iter_mut().zip(&tracks).zip(before) {
            // the step from the ladder onto the grid is not a grid interval
            if i > 0 {
                check_step(prev, t.eta, energies[i - 1], energies[i], opts.max_step)?;
            }
            col.push(t.eta);
        }
    }

    let mut branches: Vec<Branch> = tracks
        .iter()
        .zip(values)
        .map(|(t, eta)| Branch {
            lambda: t.lambda,
            multiplicity: 1,
            eta,
        })
        .collect();
    branches.sort_by_key(|b| b.lambda);
    Ok((branches, classification.ambiguous, bracketed))
}

/// Continues every track onto the roots of `set`.
fn advance(tracks: &mut [Track], set: &PhaseShiftSet) {
    let current = expand(set);
    let perm = assign(tracks, &current);
    for (t, &j) in tracks.iter_mut().zip(&perm) {
        let (eta_mod, v) = &current[j];
        t.eta = nearest_representative(*eta_mod, t.eta);
        t.mixture = v.clone();
    }
}

fn match_cost(track: &Track, eta_mod: f64, v: &DVector<f64>) -> f64 {
    let phase = distance_mod_pi(track.eta, eta_mod) / (PI / 2.0);
    let overlap = track.mixture.dot(v).abs() / (track.mixture.norm() * v.norm());
    phase + (1.0 - overlap)
}

/// perm[i] = index into `current` continuing track i.
fn assign(tracks: &[Track], current: &[(f64, DVector<f64>)]) -> Vec<usize> {
    let n = tracks.len();
    let cost = |i: usize, j: usize| match_cost(&tracks[i], current[j].0, &current[j].1);
    if n <= 6 {
        (0..n)
            .permutations(n)
            .min_by(|a, b| {
                let ca: f64 = a.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
                let cb: f64 = b.iter().enumerate().map(|(i, &j)| cost(i, j)).sum();
                ca.total_cmp(&cb)
            })
            .unwrap_or_default()
    } else {
        let mut pairs: Vec<(f64, usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (cost(i, j), i, j))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut perm = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        for (_, i, j) in pairs {
            if perm[i] == usize::MAX && !taken[j] {
                perm[i] = j;
                taken[j] = true;
            }
        }
        perm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_constructors() {
        let g = EnergyGrid::log(0.05, 10.0, 2000).unwrap();
        assert_eq!(g.len(), 2000);
        assert_eq!(g.energies()[0], 0.05);
        assert_eq!(g.energies()[1999], 10.0);
        let g = EnergyGrid::linear(1.0, 2.0, 3).unwrap();
        assert_eq!(g.energies(), &[1.0, 1.5, 2.0]);
        assert!(EnergyGrid::log(0.0, 1.0, 10).is_err());
        assert!(EnergyGrid::linear(2.0, 1.0, 10).is_err());
        assert!(EnergyGrid::linear(1.0, 2.0, 1).is_err());
        assert!(EnergyGrid::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn transparent_centers_give_zero_phases() {
        let t = Target::make_simplex(3, 2.0).unwrap();
        let g = EnergyGrid::log(0.1, 5.0, 50).unwrap();
        let pc = phase_curve(
            &t,
            &PhaseModel::constant_degrees(0.0),
            &UnitRegime::atomic(),
            &g,
            &Default::default(),
        )
        .unwrap();
        for b in &pc.branches {
            assert!(b.eta.iter().all(|&e| e == 0.0));
        }
    }

    #[test]
    fn constant_phase_dimer_is_continuous_and_bounded() {
        let t = Target::make_simplex(2, 2.142).unwrap();
        let g = EnergyGrid::log(1.0, 800.0, 2000).unwrap();
        let pc = phase_curve(
            &t,
            &PhaseModel::constant_degrees(45.0),
            &UnitRegime::pion(),
            &g,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(pc.branches.len(), 2);
        for b in &pc.branches {
            assert!(b.eta.windows(2).all(|w| (w[1] - w[0]).abs() < PI / 2.0));
            assert!(b.eta.iter().all(|e| e.abs() < 2.0 * PI));
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        // a narrow resonance sweeps η through π between two grid points
        let t = Target::make_simplex(1, 1.0).unwrap();
        let model = PhaseModel::constant_degrees(10.0).with_resonance(1e-3, 2.0);
        let g = EnergyGrid::new(vec![1.0, 1.9, 2.0, 3.0]).unwrap();
        let err =
            phase_curve(&t, &model, &UnitRegime::atomic(), &g, &Default::default()).unwrap_err();
        match err {
            ScatterError::GridTooCoarse { e_lo, e_hi, .. } => {
                assert_eq!((e_lo, e_hi), (1.9, 2.0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generic_path_matches_closed_form_on_simplex() {
        let g = EnergyGrid::log(0.05, 10.0, 400).unwrap();
        for n in 2..=4 {
            let t = Target::make_simplex(n, 2.479).unwrap();
            let closed = phase_curve(
                &t,
                &PhaseModel::carbon(),
                &UnitRegime::atomic(),
                &g,
                &Default::default(),
            )
            .unwrap();
            let opts = PhaseCurveOptions {
                force_generic: true,
                ..Default::default()
            };
            let generic =
                phase_curve(&t, &PhaseModel::carbon(), &UnitRegime::atomic(), &g, &opts).unwrap();
            assert!(matches!(closed.path, SolvePath::ClosedForm { .. }));
            assert_eq!(generic.path, SolvePath::Generic);
            assert!(!generic.ambiguous_labels);
            assert_eq!(generic.branches.len(), n);
            for b in &generic.branches {
                let reference = closed.branch(b.lambda).unwrap();
                for (x, y) in b.eta.iter().zip(&reference.eta) {
                    assert!((x - y).abs() < 1e-8, "n={n} lambda={} {x} vs {y}", b.lambda);
                }
            }
        }
    }
}
