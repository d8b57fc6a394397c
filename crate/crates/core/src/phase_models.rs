//! Single-center s-wave phase shift models.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};
use crate::kinematics::UnitRegime;

/// Slope of the linear carbon-atom phase, in bohr.
pub const CARBON_SLOPE: f64 = -1.912;

/// Maps the meson wave number onto the energy variable of the resonance
/// denominator in the threshold + resonance fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CmFrameMap {
    #[default]
    /// ω = E + m₀c² = sqrt(q² + m₀²): the target is infinitely heavy, so the
    /// lab and center-of-mass frames coincide.
    TotalMesonEnergy,
    /// ω = sqrt(q² + m₀²) + sqrt(q² + M²) for a recoiling nucleon of rest energy M.
    PionNucleon { nucleon_rest_energy_mev: f64 },
}

impl CmFrameMap {
    /// Returns (ω, dω/dq) at momentum `q` (MeV/c) for a projectile of rest energy `m`.
    fn omega(&self, q: f64, m: f64) -> (f64, f64) {
        let meson = (q * q + m * m).sqrt();
        match *self {
            CmFrameMap::TotalMesonEnergy => (meson, q / meson),
            CmFrameMap::PionNucleon {
                nucleon_rest_energy_mev: big_m,
            } => {
                let nucleon = (q * q + big_m * big_m).sqrt();
                (meson + nucleon, q / meson + q / nucleon)
            }
        }
    }
}

/// Fit constants for tan δ₀ / q = b + f q² + d q⁴ + xΓ₀ω₀q₀⁻¹/(ω₀² − ω²).
///
/// Momenta are in MeV/c and energies in MeV, so b, f and d carry units of
/// (MeV/c)⁻¹, (MeV/c)⁻³ and (MeV/c)⁻⁵. Every field is optional on input so a
/// missing one can be reported by name.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MesonConstantsFile {
    pub b: Option<f64>,
    pub f: Option<f64>,
    pub d: Option<f64>,
    pub x: Option<f64>,
    #[serde(rename = "gamma0_MeV")]
    pub gamma0_mev: Option<f64>,
    #[serde(rename = "omega0_MeV")]
    pub omega0_mev: Option<f64>,
    #[serde(rename = "q0_MeV_c")]
    pub q0_mev_c: Option<f64>,
    /// Free-form provenance note; ignored by the evaluator.
    #[serde(default, rename = "_comment", skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesonConstants {
    pub b: f64,
    pub f: f64,
    pub d: f64,
    pub x: f64,
    #[serde(rename = "gamma0_MeV")]
    pub gamma0: f64,
    #[serde(rename = "omega0_MeV")]
    pub omega0: f64,
    #[serde(rename = "q0_MeV_c")]
    pub q0: f64,
}

impl MesonConstantsFile {
    pub fn into_constants(self) -> Result<MesonConstants> {
        let get = |v: Option<f64>, name: &'static str| v.ok_or(ScatterError::MissingConstant(name));
        let c = MesonConstants {
            b: get(self.b, "b")?,
            f: get(self.f, "f")?,
            d: get(self.d, "d")?,
            x: get(self.x, "x")?,
            gamma0: get(self.gamma0_mev, "gamma0_MeV")?,
            omega0: get(self.omega0_mev, "omega0_MeV")?,
            q0: get(self.q0_mev_c, "q0_MeV_c")?,
        };
        c.validate()?;
        Ok(c)
    }
}

impl MesonConstants {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str::<MesonConstantsFile>(s)?.into_constants()
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("b", self.b), ("f", self.f), ("d", self.d), ("x", self.x)] {
            if !v.is_finite() {
                return Err(ScatterError::Config(format!(
                    "fit constant {name} is not finite"
                )));
            }
        }
        for (name, v) in [
            ("gamma0_MeV", self.gamma0),
            ("omega0_MeV", self.omega0),
            ("q0_MeV_c", self.q0),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ScatterError::Config(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MesonFit {
    pub constants: MesonConstants,
    #[serde(default)]
    pub frame: CmFrameMap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhaseModel {
    /// δ₀ = offset + slope·k.
    Linear { offset: f64, slope: f64 },
    /// δ₀ independent of energy.
    Constant { delta0: f64 },
    /// Threshold expansion plus a resonance pole in tan δ₀ / q.
    MesonFit(MesonFit),
    /// A base model plus a Breit–Wigner term atan[(Γ/2)/(E_res − E)].
    WithResonance {
        base: Box<PhaseModel>,
        gamma: f64,
        e_res: f64,
    },
}

impl PhaseModel {
    /// The isolated carbon atom: δ₀ = 2π − 1.912 k (k in bohr⁻¹).
    pub fn carbon() -> Self {
        PhaseModel::Linear {
            offset: 2.0 * PI,
            slope: CARBON_SLOPE,
        }
    }

    pub fn constant_degrees(deg: f64) -> Self {
        PhaseModel::Constant {
            delta0: deg.to_radians(),
        }
    }

    pub fn meson_fit(constants: MesonConstants) -> Self {
        PhaseModel::MesonFit(MesonFit {
            constants,
            frame: CmFrameMap::default(),
        })
    }

    pub fn with_resonance(self, gamma: f64, e_res: f64) -> Self {
        PhaseModel::WithResonance {
            base: Box::new(self),
            gamma,
            e_res,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseModel::Linear { offset, slope } => {
                if offset.is_finite() && slope.is_finite() {
                    Ok(())
                } else {
                    Err(ScatterError::Config(
                        "linear phase coefficients must be finite".into(),
                    ))
                }
            }
            PhaseModel::Constant { delta0 } => {
                if delta0.is_finite() {
                    Ok(())
                } else {
                    Err(ScatterError::Config(
                        "constant delta0 must be finite".into(),
                    ))
                }
            }
            PhaseModel::MesonFit(fit) => fit.constants.validate(),
            PhaseModel::WithResonance { base, gamma, e_res } => {
                if !(*gamma > 0.0 && gamma.is_finite()) {
                    return Err(ScatterError::Config(format!(
                        "resonance width must be positive, got {gamma}"
                    )));
                }
                if !e_res.is_finite() {
                    return Err(ScatterError::Config(
                        "resonance energy must be finite".into(),
                    ));
                }
                base.validate()
            }
        }
    }

    /// Short human-readable description for output metadata.
    pub fn describe(&self) -> String {
        match self {
            PhaseModel::Linear { offset, slope } => {
                format!("linear: delta0 = {offset} + ({slope})*k")
            }
            PhaseModel::Constant { delta0 } => {
                format!("constant: delta0 = {} deg", delta0.to_degrees())
            }
            PhaseModel::MesonFit(fit) => {
                let c = &fit.constants;
                format!(
                    "meson fit: b={} f={} d={} x={} gamma0={} MeV omega0={} MeV q0={} MeV/c, frame={:?}",
                    c.b, c.f, c.d, c.x, c.gamma0, c.omega0, c.q0, fit.frame
                )
            }
            PhaseModel::WithResonance { base, gamma, e_res } => {
                format!(
                    "{} + Breit-Wigner(gamma={gamma}, e_res={e_res})",
                    base.describe()
                )
            }
        }
    }

    /// δ₀(k) on the branch that is continuous from threshold.
    pub fn eval_delta0(&self, k: f64, regime: &UnitRegime) -> Result<f64> {
        check_k(k)?;
        match self {
            PhaseModel::Linear { offset, slope } => Ok(offset + slope * k),
            PhaseModel::Constant { delta0 } => Ok(*delta0),
            PhaseModel::MesonFit(fit) => fit.eval(k, regime).map(|(d, _)| d),
            PhaseModel::WithResonance { base, gamma, e_res } => {
                let e = regime.energy_from_momentum(k)?;
                Ok(base.eval_delta0(k, regime)? + resonance_phase(*gamma, *e_res, e))
            }
        }
    }

    /// Analytic dδ₀/dk.
    pub fn eval_delta0_derivative(&self, k: f64, regime: &UnitRegime) -> Result<f64> {
        check_k(k)?;
        match self {
            PhaseModel::Linear { slope, .. } => Ok(*slope),
            PhaseModel::Constant { .. } => Ok(0.0),
            PhaseModel::MesonFit(fit) => fit.eval(k, regime).map(|(_, dd)| dd),
            PhaseModel::WithResonance { base, gamma, e_res } => {
                let e = regime.energy_from_momentum(k)?;
                let de_dk = regime.de_dk(k)?;
                Ok(base.eval_delta0_derivative(k, regime)?
                    + breit_wigner_delay_addition(*gamma, *e_res, e) * de_dk)
            }
        }
    }

    /// cot δ₀(k); infinite when δ₀ is a multiple of π.
    pub fn cot_delta0(&self, k: f64, regime: &UnitRegime) -> Result<f64> {
        Ok(cot(self.eval_delta0(k, regime)?))
    }
}

impl MesonFit {
    /// Returns (δ₀, dδ₀/dk).
    ///
    /// tan δ₀ = N/D with D = ω₀² − ω² and N = q[(b + f q² + d q⁴)·D + xΓ₀ω₀/q₀].
    /// D vanishes once, at ω = ω₀, where the principal atan jumps by π; the
    /// jump is undone so that δ₀ stays continuous from δ₀(0) = 0.
    fn eval(&self, k: f64, regime: &UnitRegime) -> Result<(f64, f64)> {
        let (rest_energy, hbar_c) = match *regime {
            UnitRegime::RelativisticMeson {
                rest_energy,
                hbar_c,
                ..
            } => (rest_energy, hbar_c),
            UnitRegime::AtomicElectron { .. } => {
                return Err(ScatterError::Config(
                    "the meson fit needs the relativistic meson unit regime".into(),
                ))
            }
        };
        let c = &self.constants;
        let q = hbar_c * k;
        let dq = hbar_c;

        let poly = c.b + c.f * q * q + c.d * q.powi(4);
        let dpoly = (2.0 * c.f * q + 4.0 * c.d * q.powi(3)) * dq;
        let pole = c.x * c.gamma0 * c.omega0 / c.q0;

        if c.x == 0.0 {
            let g = q * poly;
            let dg = dq * poly + q * dpoly;
            return Ok((g.atan(), dg / (1.0 + g * g)));
        }

        let (omega, domega_dq) = self.frame.omega(q, rest_energy);
        let (omega_threshold, _) = self.frame.omega(0.0, rest_energy);
        let den = c.omega0 * c.omega0 - omega * omega;
        let dden = -2.0 * omega * domega_dq * dq;
        let num = q * (poly * den + pole);
        let dnum = dq * (poly * den + pole) + q * (dpoly * den + poly * dden);

        let crossed = c.omega0 > omega_threshold && omega >= c.omega0;
        let delta = if den == 0.0 {
            c.x.signum() * PI / 2.0
        } else {
            (num / den).atan() + if crossed { c.x.signum() * PI } else { 0.0 }
        };
        let derivative = (den * dnum - num * dden) / (den * den + num * num);
        Ok((delta, derivative))
    }
}

/// atan[(Γ/2)/(E_res − E)] on the branch rising continuously from ~0 through π/2 at E_res.
pub fn resonance_phase(gamma: f64, e_res: f64, e: f64) -> f64 {
    (0.5 * gamma).atan2(e_res - e)
}

/// Breit–Wigner contribution to dδ/dE: (Γ/2) / ((E_res − E)² + Γ²/4).
pub fn breit_wigner_delay_addition(gamma: f64, e_res: f64, e: f64) -> f64 {
    let half = 0.5 * gamma;
    half / ((e_res - e).powi(2) + half * half)
}

pub(crate) fn cot(x: f64) -> f64 {
    let s = x.sin();
    if s == 0.0 {
        f64::INFINITY
    } else {
        x.cos() / s
    }
}

fn check_k(k: f64) -> Result<()> {
    if k >= 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::domain(
            "k",
            k,
            "wave number must be finite and non-negative",
        ))
    }
}
