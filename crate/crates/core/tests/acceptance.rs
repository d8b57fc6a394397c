//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Criterion 11 needs a meson constants file
//! named by SCATTER_MESON_CONSTANTS and is skipped without it.

use std::f64::consts::PI;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scatter_core::diffraction::{convergence_diagnostic, fit_power_law, theta_grid};
use scatter_core::observables::{
    cross_section_ratio, resonance_augmented_delay, time_delay_curve, TimeDelayMethod,
};
use scatter_core::solver::{
    build_system_matrices, closed_form_cot_eta, determinant_residual, generic_cot_eta, phase_curve,
    EnergyGrid, PhaseCurve, PhaseCurveOptions, PhaseShiftSet, SolveMethod,
};
use scatter_core::{MesonConstants, PhaseModel, Target, UnitRegime};

const SEED: u64 = 20_240_611;
const C1_CASES: usize = 100;
const C1_TOL: f64 = 1e-9;
const C2_RESIDUAL: f64 = 1e-8;
const C2_MIXTURE_TOL: f64 = 1e-9;
const C3_DRIFT: f64 = 0.05;
const C4_WINDOW: (f64, f64) = (2.4, 3.1);
const C5_RANGE: (f64, f64) = (0.1, 10.0);
const C6_RANGE: (f64, f64) = (-10.0, -7.0);
const C7_REL: f64 = 1e-6;
const C8_FAR: f64 = 0.05;
const C8_ORACLE: f64 = 1e-9;
const C9_REL: f64 = 1e-3;
const C10_EXPONENT: f64 = -0.9;
const C11_PEAK: (f64, f64) = (250.0, 550.0);

const CARBON_R: f64 = 2.479;
const DEUTERON_R: f64 = 2.142;
const GRID_POINTS: usize = 2000;
/// Near a sign change of τ the finite-difference error must stay below
/// 1e-3 of the 1e-6 floor, which the meson-regime curves reach at this density.
const MESON_FD_POINTS: usize = 50_000;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn carbon_curve(n: usize, grid: &EnergyGrid) -> PhaseCurve {
    let t = Target::make_simplex(n, CARBON_R).unwrap();
    phase_curve(
        &t,
        &PhaseModel::carbon(),
        &UnitRegime::atomic(),
        grid,
        &PhaseCurveOptions::default(),
    )
    .unwrap()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}

/// Random simplex solves shared by criteria 1 and 2: (n, k, cot δ₀).
fn random_cases() -> Vec<(usize, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for n in 2..=4 {
        for _ in 0..C1_CASES {
            let kr: f64 = rng.gen_range(0.01..20.0);
            let d: f64 = rng.gen_range(1.0f64..179.0).to_radians();
            out.push((n, kr, 1.0 / d.tan()));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (n, kr, cot) in random_cases() {
        // R = 1 so that k = kR
        let t = Target::make_simplex(n, 1.0).unwrap();
        let generic = generic_cot_eta(&t, kr, &vec![cot; n]).unwrap();
        let closed = PhaseShiftSet {
            k: kr,
            roots: closed_form_cot_eta(n, kr, cot).unwrap(),
            method: SolveMethod::ClosedForm,
        };
        let (g, c) = (generic.expanded_cots(), closed.expanded_cots());
        let agree = g.len() == c.len() && g.iter().zip(&c).all(|(a, b)| rel_close(*a, *b, C1_TOL));
        for (a, b) in g.iter().zip(&c) {
            worst = worst.max((a - b).abs() / a.abs().max(1.0));
        }
        if !agree || generic.multiplicities() != vec![1, n - 1] {
            failures += 1;
        }
    }
    verdict(
        failures == 0,
        format!(
            "{} cases, {failures} mismatches, max |dcot|/max(1,|cot|) = {worst:.2e} (tol {C1_TOL:.0e})",
            3 * C1_CASES
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_mix = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut cases: Vec<(Target, f64, Vec<f64>)> = random_cases()
        .into_iter()
        .map(|(n, kr, cot)| (Target::make_simplex(n, 1.0).unwrap(), kr, vec![cot; n]))
        .collect();
    // irregular clusters with unequal centers
    for _ in 0..100 {
        let n = rng.gen_range(2..=6);
        let coords: Vec<[f64; 3]> = (0..n)
            .map(|_| {
                [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ]
            })
            .collect();
        let Ok(t) = Target::from_coords(&coords) else {
            continue;
        };
        if t.distance_matrix().off_diagonal().any(|d| d < 0.2) {
            continue;
        }
        let cots = (0..n)
            .map(|_| 1.0 / rng.gen_range(0.05f64..3.1).tan())
            .collect();
        cases.push((t, rng.gen_range(0.05..8.0), cots));
    }
    let mut roots = 0;
    for (t, k, cots) in &cases {
        let ps = generic_cot_eta(t, *k, cots).unwrap();
        let m = build_system_matrices(t, *k, cots).unwrap();
        for r in &ps.roots {
            roots += 1;
            worst = worst.max(determinant_residual(&m, r.cot_eta));
            // D₁ = ±D₂ holds for two identical centers only
            if t.n() == 2 && cots[0] == cots[1] {
                for v in &r.mixture {
                    worst_mix = worst_mix.max((v[0].abs() - v[1].abs()).abs());
                }
            }
        }
    }
    verdict(
        worst < C2_RESIDUAL && worst_mix < C2_MIXTURE_TOL,
        format!(
            "{roots} roots, max scaled |det| = {worst:.2e} (tol {C2_RESIDUAL:.0e}), \
             dimer max ||D1|-|D2|| = {worst_mix:.2e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let krs = [1e-3, 1e-2, 1e-1];
    let regime = UnitRegime::atomic();
    let energies: Vec<f64> = krs.iter().map(|kr| 0.5 * (kr / CARBON_R).powi(2)).collect();
    let grid = EnergyGrid::new(energies).unwrap();
    let opts = PhaseCurveOptions {
        force_generic: true,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    let mut ok = true;
    for n in 2..=4 {
        let t = Target::make_simplex(n, CARBON_R).unwrap();
        let pc = phase_curve(&t, &PhaseModel::carbon(), &regime, &grid, &opts).unwrap();
        ok &= !pc.ambiguous_labels;
        for b in &pc.branches {
            let power = (2 * b.lambda + 1) as i32;
            let scaled: Vec<f64> = b
                .eta
                .iter()
                .zip(&pc.momenta)
                .map(|(e, k)| e / k.powi(power))
                .collect();
            for w in scaled.windows(2) {
                worst = worst.max((w[1] / w[0] - 1.0).abs());
            }
        }
    }
    verdict(
        ok && worst < C3_DRIFT,
        format!("eta_0/k and eta_1/k^3 over kR in [1e-3, 1e-1]: max drift per decade {worst:.2e} (tol {C3_DRIFT})"),
    )
}

/// Energies where the unwrapped phase passes through π/2 (mod π).
fn half_pi_crossings(energies: &[f64], eta: &[f64]) -> Vec<f64> {
    let level = |x: f64| ((x - PI / 2.0) / PI).floor();
    let mut out = Vec::new();
    for i in 1..eta.len() {
        let (a, b) = (eta[i - 1], eta[i]);
        if level(a) != level(b) {
            let target = PI / 2.0 + PI * level(a).max(level(b));
            let t = (target - a) / (b - a);
            out.push(energies[i - 1] + t * (energies[i] - energies[i - 1]));
        }
    }
    out
}

fn criterion_4() -> (Outcome, String) {
    let grid = EnergyGrid::log(0.05, 10.0, GRID_POINTS).unwrap();
    let mut ok = true;
    let mut report = Vec::new();
    let mut taus = Vec::new();
    for n in 1..=4 {
        let pc = carbon_curve(n, &grid);
        for b in &pc.branches {
            let xs = half_pi_crossings(&pc.energies, &b.eta);
            let inside = xs.iter().any(|&e| e >= C4_WINDOW.0 && e <= C4_WINDOW.1);
            ok &= inside;
            let listed: Vec<String> = xs.iter().map(|e| format!("{e:.3}")).collect();
            report.push(format!("N={n} l={}: [{}]", b.lambda, listed.join(", ")));
        }
        let tau = time_delay_curve(&pc, TimeDelayMethod::Analytic).unwrap();
        taus.extend(tau.series.into_iter().map(|s| s.values));
    }
    // the energy where all delay curves come closest together
    let (mut best_e, mut best_spread) = (0.0, f64::INFINITY);
    for (i, &e) in grid.energies().iter().enumerate() {
        if !(1.0..=5.0).contains(&e) {
            continue;
        }
        let vals = taus.iter().map(|t| t[i]);
        let spread =
            vals.clone().fold(f64::NEG_INFINITY, f64::max) - vals.fold(f64::INFINITY, f64::min);
        if spread < best_spread {
            best_spread = spread;
            best_e = e;
        }
    }
    let diag = format!(
        "delay curves of N=1..4 are closest at E = {best_e:.3} a.u. (spread {best_spread:.3} tau_At)"
    );
    (
        verdict(
            ok,
            format!(
                "eta = pi/2 crossings in [{}, {}] a.u. required; crossings: {}",
                C4_WINDOW.0,
                C4_WINDOW.1,
                report.join("; ")
            ),
        ),
        diag,
    )
}

fn criterion_5() -> Outcome {
    let grid = EnergyGrid::log(C5_RANGE.0, C5_RANGE.1, GRID_POINTS).unwrap();
    let mut largest = f64::NEG_INFINITY;
    for n in 2..=4 {
        let tau = time_delay_curve(&carbon_curve(n, &grid), TimeDelayMethod::Analytic).unwrap();
        for s in &tau.series {
            largest = s.values.iter().copied().fold(largest, f64::max);
        }
    }
    verdict(
        largest < 0.0,
        format!("max tau over N=2..4, all branches, E in [0.1, 10] a.u.: {largest:.4} tau_At"),
    )
}

fn criterion_6() -> Outcome {
    let grid = EnergyGrid::log(1e-5, 1.0, GRID_POINTS).unwrap();
    let tau = time_delay_curve(&carbon_curve(2, &grid), TimeDelayMethod::Analytic).unwrap();
    let s = tau.series.iter().find(|s| s.lambda == Some(1)).unwrap();
    let (i, &min) = s
        .values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    verdict(
        min >= C6_RANGE.0 && min <= C6_RANGE.1,
        format!(
            "min tau_1 over E in (0, 1] a.u. = {min:.3} tau_At at E = {:.4} (window [{}, {}]); tau_1 at E = 1e-5: {:.2e}",
            grid.energies()[i],
            C6_RANGE.0,
            C6_RANGE.1,
            s.values[0]
        ),
    )
}

fn criterion_7() -> Outcome {
    let (gamma, e_res) = (2.0, 5.0);
    let grid = EnergyGrid::linear(1.0, 9.0, 80_001).unwrap();
    let t = Target::make_simplex(1, 1.0).unwrap();
    let pc = phase_curve(
        &t,
        &PhaseModel::constant_degrees(30.0),
        &UnitRegime::atomic(),
        &grid,
        &Default::default(),
    )
    .unwrap();
    let base = time_delay_curve(&pc, TimeDelayMethod::Analytic).unwrap();
    let aug = resonance_augmented_delay(&base, gamma, e_res).unwrap();
    let v = &aug.series[0].values;
    let e = grid.energies();
    let (i, &peak) = v
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let half = 0.5 * peak;
    let cross = |mut range: Box<dyn Iterator<Item = usize>>| {
        range
            .find(|&j| (v[j] - half) * (v[j + 1] - half) <= 0.0)
            .map(|j| e[j] + (half - v[j]) / (v[j + 1] - v[j]) * (e[j + 1] - e[j]))
            .unwrap()
    };
    let left = cross(Box::new((0..i).rev()));
    let right = cross(Box::new(i..v.len() - 1));
    let fwhm = right - left;
    let height = 2.0 * 2.0 / gamma;
    let ok = ((e[i] - e_res) / e_res).abs() <= C7_REL
        && ((peak - height) / height).abs() <= C7_REL
        && ((fwhm - gamma) / gamma).abs() <= C7_REL;
    verdict(
        ok,
        format!(
            "peak at E = {:.9} (E_res {e_res}), height {peak:.9} (2*2/Gamma = {height}), FWHM {fwhm:.9} (Gamma {gamma})",
            e[i]
        ),
    )
}

/// Independent dimer oracle: bisection for the roots of A ± B with
/// A = k(cos η − sin η cot δ₀), B = sin(kR + η)/R, then σ̄/(2σ₀).
fn dimer_ratio_oracle(k: f64, r: f64, delta0: f64) -> f64 {
    let cot_d = 1.0 / delta0.tan();
    let f =
        |eta: f64, sign: f64| k * (eta.cos() - eta.sin() * cot_d) + sign * (k * r + eta).sin() / r;
    let root = |sign: f64| {
        // scan [0, π) for the sign change, then bisect
        let steps = 100_000;
        let mut a = 0.0;
        for i in 1..=steps {
            let b = PI * i as f64 / steps as f64;
            if f(a, sign) * f(b, sign) <= 0.0 {
                let (mut lo, mut hi) = (a, b);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo, sign) * f(mid, sign) <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                return 0.5 * (lo + hi);
            }
            a = b;
        }
        panic!("no root");
    };
    let (e0, e1) = (root(1.0), root(-1.0));
    (e0.sin().powi(2) + e1.sin().powi(2)) / (2.0 * delta0.sin().powi(2))
}

fn dimer_ratio(k: f64, r: f64, delta0: f64) -> f64 {
    let t = Target::make_simplex(2, r).unwrap();
    let ps = generic_cot_eta(&t, k, &[1.0 / delta0.tan(); 2]).unwrap();
    cross_section_ratio(&ps, k, delta0, 2).unwrap()
}

fn criterion_8() -> Outcome {
    let r = DEUTERON_R;
    let mut far_worst = 0.0f64;
    for deg in [20.0f64, 30.0, 45.0] {
        for i in 0..=150 {
            let kr = 50.0 + i as f64;
            far_worst = far_worst.max((dimer_ratio(kr / r, r, deg.to_radians()) - 1.0).abs());
        }
    }
    let (mut near_max, mut near_at) = (0.0f64, 0.0);
    for i in 1..=100 {
        let kr = 0.01 * i as f64;
        let v = dimer_ratio(kr / r, r, PI / 4.0);
        if v > near_max {
            (near_max, near_at) = (v, kr);
        }
    }
    let value = dimer_ratio(1.0, 1.0, PI / 4.0);
    let oracle = dimer_ratio_oracle(1.0, 1.0, PI / 4.0);
    let ok = far_worst < C8_FAR && near_max < 1.0 && (value - oracle).abs() < C8_ORACLE;
    verdict(
        ok,
        format!(
            "kR in [50, 200]: max |ratio - 1| = {far_worst:.4} (tol {C8_FAR}); kR <= 1 at 45 deg: max ratio {near_max:.5} at kR = {near_at:.2}; \
             kR = 1: {value:.10} vs oracle {oracle:.10}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut configs: Vec<(usize, f64, PhaseModel, UnitRegime, EnergyGrid)> = Vec::new();
    for n in 1..=4 {
        configs.push((
            n,
            CARBON_R,
            PhaseModel::carbon(),
            UnitRegime::atomic(),
            EnergyGrid::log(0.05, 10.0, GRID_POINTS).unwrap(),
        ));
        for deg in [20.0, 30.0, 45.0] {
            configs.push((
                n,
                DEUTERON_R,
                PhaseModel::constant_degrees(deg),
                UnitRegime::pion(),
                EnergyGrid::log(1.0, 1000.0, MESON_FD_POINTS).unwrap(),
            ));
        }
    }
    let mut worst = 0.0f64;
    for (n, r, model, regime, grid) in &configs {
        let t = Target::make_simplex(*n, *r).unwrap();
        let pc = phase_curve(&t, model, regime, grid, &Default::default()).unwrap();
        let a = time_delay_curve(&pc, TimeDelayMethod::Analytic).unwrap();
        let f = time_delay_curve(&pc, TimeDelayMethod::FiniteDifference).unwrap();
        for (sa, sf) in a.series.iter().zip(&f.series) {
            for i in 1..grid.len() - 1 {
                let rel = (sa.values[i] - sf.values[i]).abs() / sa.values[i].abs().max(1e-6);
                worst = worst.max(rel);
            }
        }
    }
    verdict(
        worst < C9_REL,
        format!(
            "{} configurations, max interior relative deviation {worst:.2e} (tol {C9_REL:.0e})",
            configs.len()
        ),
    )
}

fn far_field_exponent(k: f64) -> (bool, f64) {
    let radii: Vec<f64> = [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|f| f * CARBON_R)
        .collect();
    let delta0 = 2.0 * PI - 1.912 * k;
    let res = convergence_diagnostic(k, CARBON_R, delta0, &radii, &theta_grid(720)).unwrap();
    let (p, _) = fit_power_law(&radii, &res).unwrap();
    (res.windows(2).all(|w| w[1] < w[0]), p)
}

fn criterion_10() -> (Outcome, String) {
    // all four radii sit at kr ≡ 0 (mod 2π), isolating the R/r decay from cos(kr + δ₀)
    let k = 4.0 * PI / (5.0 * CARBON_R);
    let (mono, p) = far_field_exponent(k);
    let (mono1, p1) = far_field_exponent(1.0);
    let scan: Vec<(bool, f64)> = (1..=300)
        .map(|i| far_field_exponent(0.1 + 2.9 * i as f64 / 300.0))
        .collect();
    let passing = scan
        .iter()
        .filter(|(m, p)| *m && *p <= C10_EXPONENT)
        .count();
    let mut exps: Vec<f64> = scan.iter().map(|s| s.1).collect();
    exps.sort_by(f64::total_cmp);
    let diag = format!(
        "k = 1: monotone {mono1}, exponent {p1:.3}; k in (0.1, 3]: {passing}/300 pass, median exponent {:.3}",
        exps[150]
    );
    (
        verdict(
            mono && p <= C10_EXPONENT,
            format!("k = 4pi/(5R) = {k:.4}, r/R in {{5,10,20,40}}: monotone {mono}, fitted exponent {p:.3} (need <= {C10_EXPONENT})"),
        ),
        diag,
    )
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

fn criterion_11() -> Outcome {
    let Ok(path) = std::env::var("SCATTER_MESON_CONSTANTS") else {
        return Outcome::Skip(
            "SCATTER_MESON_CONSTANTS not set; no meson constants file supplied".into(),
        );
    };
    let constants = match MesonConstants::from_path(&path) {
        Ok(c) => c,
        Err(e) => return Outcome::Fail(format!("cannot load {path}: {e}")),
    };
    let model = PhaseModel::meson_fit(constants);
    let regime = UnitRegime::pion();
    let grid = EnergyGrid::log(10.0, 1000.0, GRID_POINTS).unwrap();
    let mut details = Vec::new();
    let mut ok = true;
    for n in [2usize, 3] {
        let t = Target::make_simplex(n, DEUTERON_R).unwrap();
        let pc = match phase_curve(&t, &model, &regime, &grid, &Default::default()) {
            Ok(pc) => pc,
            Err(e) => return Outcome::Fail(format!("N={n}: {e}")),
        };
        let d0 = pc.delta0().unwrap();
        let window: Vec<usize> = (0..grid.len())
            .filter(|&i| (100.0..=800.0).contains(&grid.energies()[i]))
            .collect();
        let dev = |l: usize| -> Vec<f64> {
            let b = pc.branch(l).unwrap();
            window.iter().map(|&i| b.eta[i] - d0[i]).collect()
        };
        let r = pearson(&dev(0), &dev(1));
        let tau = time_delay_curve(&pc, TimeDelayMethod::Analytic).unwrap();
        let (mut peak, mut at) = (f64::NEG_INFINITY, 0.0);
        for s in &tau.series {
            for (i, &v) in s.values.iter().enumerate() {
                if v > peak {
                    peak = v;
                    at = grid.energies()[i];
                }
            }
        }
        ok &= r < 0.0 && peak > 0.0 && at >= C11_PEAK.0 && at <= C11_PEAK.1;
        details.push(format!(
            "N={n}: pearson {r:.3}, peak {peak:.2} tau_Nuc at {at:.1} MeV"
        ));
    }
    verdict(ok, details.join("; "))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: u32, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{tag} criterion {id:>2} ({name}): {detail}");
    };
    report(1, "closed form vs generic", criterion_1());
    report(2, "determinant residual", criterion_2());
    report(3, "low-k scaling", criterion_3());
    let (c4, knot) = criterion_4();
    report(4, "carbon knot", c4);
    println!("     note: {knot}");
    report(5, "negative electron delays", criterion_5());
    report(6, "lambda=1 low-energy dip", criterion_6());
    report(7, "Breit-Wigner peak", criterion_7());
    report(8, "independent-center limit", criterion_8());
    report(9, "analytic vs finite-difference delay", criterion_9());
    let (c10, scan) = criterion_10();
    report(10, "far-field convergence", c10);
    println!("     note: {scan}");
    report(11, "meson phases", criterion_11());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
