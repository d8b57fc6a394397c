//! Arbitrary geometries and per-center phases.
//!
//! M(x) = x·P + Q with
//!   P_ii = k,          P_ij = sin(kR_ij)/R_ij
//!   Q_ii = −k cot δ₀⁽ⁱ⁾, Q_ij = cos(kR_ij)/R_ij
//!
//! P is the sin(kr)/r kernel sampled at the centers, which is positive
//! definite for distinct centers, so det(xP + Q) = 0 is a symmetric-definite
//! generalized eigenproblem −Q·D = x·P·D. P loses rank as kR → 0; past a
//! conditioning limit the roots are bracketed instead, in η ∈ [0, π], as the
//! zero crossings of the sorted eigenvalues of cos η·P + sin η·Q.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use roots::{find_root_brent, Convergency};

use super::{CotEta, PhaseRoot, PhaseShiftSet, SolveMethod};
use crate::error::{Result, ScatterError};
use crate::geometry::Target;

#[derive(Clone, Debug, PartialEq)]
pub struct SystemMatrices {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

impl SystemMatrices {
    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    /// x·P + Q.
    pub fn at(&self, x: f64) -> DMatrix<f64> {
        &self.p * x + &self.q
    }

    /// cos η·P + sin η·Q, which is sin η·M(cot η) and stays finite at η = 0.
    pub fn at_angle(&self, eta: f64) -> DMatrix<f64> {
        let (s, c) = eta.sin_cos();
        &self.p * c + &self.q * s
    }

    /// Largest entry magnitude over both matrices.
    pub fn scale(&self) -> f64 {
        self.p.amax().max(self.q.amax())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative tolerance (floored at an absolute scale of 1) for merging
    /// near-equal cot η values into one root with summed multiplicity.
    pub cluster_rel_tol: f64,
    /// Largest accepted λ_max/λ_min of P before switching to bracketing.
    pub max_condition: f64,
    pub force_bracketing: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            cluster_rel_tol: 1e-7,
            max_condition: 1e12,
            force_bracketing: false,
        }
    }
}

pub fn build_system_matrices(
    target: &Target,
    k: f64,
    cot_delta0: &[f64],
) -> Result<SystemMatrices> {
    check_inputs(target, k, cot_delta0)?;
    let dm = target.distance_matrix();
    let n = target.n();
    let p = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            k
        } else {
            let r = dm.get(i, j);
            (k * r).sin() / r
        }
    });
    let q = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -k * cot_delta0[i]
        } else {
            let r = dm.get(i, j);
            (k * r).cos() / r
        }
    });
    Ok(SystemMatrices { p, q })
}

/// |det(cos η·P + sin η·Q)| / scale^N at the angle of `cot`.
pub fn determinant_residual(m: &SystemMatrices, cot: CotEta) -> f64 {
    let a = m.at_angle(cot.eta_mod_pi());
    a.determinant().abs() / m.scale().powi(m.n() as i32)
}

pub fn generic_cot_eta(target: &Target, k: f64, cot_delta0: &[f64]) -> Result<PhaseShiftSet> {
    generic_cot_eta_with(target, k, cot_delta0, &SolverOptions::default())
}

pub fn generic_cot_eta_with(
    target: &Target,
    k: f64,
    cot_delta0: &[f64],
    opts: &SolverOptions,
) -> Result<PhaseShiftSet> {
    check_inputs(target, k, cot_delta0)?;
    let n = target.n();

    // A center with δ₀ ≡ 0 (mod π) does not scatter: its coefficient vanishes
    // and it contributes an η ≡ 0 root. The rest is solved without it.
    let active: Vec<usize> = (0..n).filter(|&i| cot_delta0[i].is_finite()).collect();
    let mut singles: Vec<(CotEta, f64, DVector<f64>)> = (0..n)
        .filter(|i| !active.contains(i))
        .map(|i| {
            (
                CotEta::Infinite,
                0.0,
                DVector::from_fn(n, |j, _| (i == j) as u8 as f64),
            )
        })
        .collect();

    let mut method = SolveMethod::GeneralizedEigen;
    if !active.is_empty() {
        let sub = Target::new(active.iter().map(|&i| target.centers()[i]).collect())?;
        let sub_cot: Vec<f64> = active.iter().map(|&i| cot_delta0[i]).collect();
        let m = build_system_matrices(&sub, k, &sub_cot)?;
        let solved = match (opts.force_bracketing, definite_reduction(&m, opts)) {
            (false, Some(roots)) => roots,
            _ => {
                method = SolveMethod::Bracketing;
                bracket_roots(&m, k)?
            }
        };
        for (cot, eta, v) in solved {
            let mut full = DVector::zeros(n);
            for (a, &i) in active.iter().enumerate() {
                full[i] = v[a];
            }
            singles.push((cot, eta, full));
        }
    }

    let roots = cluster(singles, opts.cluster_rel_tol);
    let set = PhaseShiftSet { k, roots, method };
    if set.total_multiplicity() != n {
        return Err(ScatterError::Solver {
            k,
            reason: format!(
                "found {} roots (with multiplicity) for {n} centers",
                set.total_multiplicity()
            ),
        });
    }
    Ok(set)
}

fn check_inputs(target: &Target, k: f64, cot_delta0: &[f64]) -> Result<()> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(ScatterError::domain("k", k, "wave number must be positive"));
    }
    if cot_delta0.len() != target.n() {
        return Err(ScatterError::Config(format!(
            "{} cot(delta0) values for {} centers",
            cot_delta0.len(),
            target.n()
        )));
    }
    if cot_delta0.iter().any(|c| c.is_nan()) {
        return Err(ScatterError::Config("cot(delta0) is NaN".into()));
    }
    Ok(())
}

/// Roots via P = VΛVᵀ, C = Λ^{-1/2}Vᵀ(−Q)VΛ^{-1/2}. `None` if P is too ill-conditioned.
fn definite_reduction(
    m: &SystemMatrices,
    opts: &SolverOptions,
) -> Option<Vec<(CotEta, f64, DVector<f64>)>> {
    let n = m.n();
    let p_eig = SymmetricEigen::new(m.p.clone());
    let lmax = p_eig.eigenvalues.max();
    let lmin = p_eig.eigenvalues.min();
    if !(lmin > 0.0) || lmax / lmin > opts.max_condition {
        return None;
    }
    let w = DMatrix::from_fn(n, n, |i, j| {
        p_eig.eigenvectors[(i, j)] / p_eig.eigenvalues[j].sqrt()
    });
    let c = w.transpose() * (-&m.q) * &w;
    let c = (&c + c.transpose()) * 0.5;
    let c_eig = SymmetricEigen::new(c);
    Some(
        (0..n)
            .map(|i| {
                let x = c_eig.eigenvalues[i];
                let d = (&w * c_eig.eigenvectors.column(i)).normalize();
                let cot = CotEta::from_value(x);
                (cot, cot.eta_mod_pi(), d)
            })
            .collect(),
    )
}

fn sorted_eigen(a: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(a);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), idx.len(), |r, c| {
        eig.eigenvectors[(r, idx[c])]
    });
    (vals, vecs)
}

/// Each sorted eigenvalue of cos η·P + sin η·Q starts ≥ 0 at η = 0 (it is P),
/// ends ≤ 0 at η = π (−P), and can only cross zero downwards, so it has
/// exactly one root in [0, π].
fn bracket_roots(m: &SystemMatrices, k: f64) -> Result<Vec<(CotEta, f64, DVector<f64>)>> {
    let n = m.n();
    let scale = m.scale();
    let tiny = 1e-13;
    let eigval = |eta: f64, i: usize| sorted_eigen(m.at_angle(eta)).0[i] / scale;
    let (start, _) = sorted_eigen(m.at_angle(0.0));
    let (end, _) = sorted_eigen(m.at_angle(PI));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (lo, hi) = (start[i] / scale, end[i] / scale);
        if lo < -tiny || hi > tiny {
            return Err(ScatterError::Solver {
                k,
                reason: format!(
                    "eigenvalue {i} does not change sign on [0, pi] (start {lo:e}, end {hi:e}); \
                     P is not positive semidefinite"
                ),
            });
        }
        let eta = if lo <= 0.0 {
            0.0
        } else if hi >= 0.0 {
            PI
        } else {
            let mut conv = UlpConvergency { max_iter: 400 };
            find_root_brent(0.0, PI, |e| eigval(e, i), &mut conv).map_err(|e| {
                ScatterError::Solver {
                    k,
                    reason: format!("bracketing of eigenvalue {i} failed: {e:?}"),
                }
            })?
        };
        let (_, vecs) = sorted_eigen(m.at_angle(eta));
        let s = eta.sin();
        let cot = if s == 0.0 {
            CotEta::Infinite
        } else {
            CotEta::from_value(eta.cos() / s)
        };
        let eta = if cot.is_infinite() { PI } else { eta };
        out.push((cot, eta, vecs.column(i).into_owned()));
    }
    Ok(out)
}

/// Stops when the bracket shrinks to a few ulps or the function hits zero.
struct UlpConvergency {
    max_iter: usize,
}

impl Convergency<f64> for UlpConvergency {
    fn is_root_found(&mut self, y: f64) -> bool {
        y == 0.0
    }
    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() <= 4.0 * f64::EPSILON * x1.abs().max(x2.abs()) + f64::MIN_POSITIVE
    }
    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= self.max_iter
    }
}

fn cluster(mut singles: Vec<(CotEta, f64, DVector<f64>)>, rel_tol: f64) -> Vec<PhaseRoot> {
    singles.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));
    let mut roots: Vec<PhaseRoot> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    for (cot, eta, v) in singles {
        let joins = roots.last().is_some_and(|last| match (last.cot_eta, cot) {
            (CotEta::Infinite, CotEta::Infinite) => true,
            (CotEta::Finite(a), CotEta::Finite(b)) => {
                (a - b).abs() <= rel_tol * a.abs().max(b.abs()).max(1.0)
            }
            _ => false,
        });
        if joins {
            let last = roots.last_mut().unwrap();
            last.multiplicity += 1;
            last.mixture.push(v);
            members.push(cot.value());
            if let CotEta::Finite(_) = cot {
                let mean = members.iter().sum::<f64>() / members.len() as f64;
                last.cot_eta = CotEta::Finite(mean);
                last.eta_mod_pi = last.cot_eta.eta_mod_pi();
            }
        } else {
            members.clear();
            members.push(cot.value());
            roots.push(PhaseRoot {
                cot_eta: cot,
                eta_mod_pi: eta,
                multiplicity: 1,
                branch: None,
                mixture: vec![v],
            });
        }
    }
    roots
}
