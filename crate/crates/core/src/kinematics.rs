//! Energy/momentum conversion for the two unit systems in use.
//!
//! Electrons are handled in atomic units (hartree, bohr, E = k²/2). Mesons are
//! handled relativistically with energies in MeV and wave numbers in fm⁻¹.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// ħc in MeV·fm.
pub const HBAR_C_MEV_FM: f64 = 197.326;
/// Atomic unit of time in seconds.
pub const TAU_ATOMIC_S: f64 = 2.419e-17;
/// ħ / MeV in seconds.
pub const TAU_NUCLEAR_S: f64 = 6.582e-22;
/// Charged pion rest energy in MeV.
pub const PION_REST_ENERGY_MEV: f64 = 139.57;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitRegime {
    AtomicElectron {
        #[serde(default = "default_tau_atomic")]
        tau_unit_s: f64,
    },
    RelativisticMeson {
        #[serde(default = "default_rest_energy", rename = "rest_energy_mev")]
        rest_energy: f64,
        #[serde(default = "default_hbar_c", rename = "hbar_c_mev_fm")]
        hbar_c: f64,
        #[serde(default = "default_tau_nuclear")]
        tau_unit_s: f64,
    },
}

fn default_tau_atomic() -> f64 {
    TAU_ATOMIC_S
}
fn default_tau_nuclear() -> f64 {
    TAU_NUCLEAR_S
}
fn default_rest_energy() -> f64 {
    PION_REST_ENERGY_MEV
}
fn default_hbar_c() -> f64 {
    HBAR_C_MEV_FM
}

impl UnitRegime {
    pub fn atomic() -> Self {
        UnitRegime::AtomicElectron {
            tau_unit_s: TAU_ATOMIC_S,
        }
    }

    pub fn pion() -> Self {
        Self::meson(PION_REST_ENERGY_MEV)
    }

    pub fn meson(rest_energy: f64) -> Self {
        UnitRegime::RelativisticMeson {
            rest_energy,
            hbar_c: HBAR_C_MEV_FM,
            tau_unit_s: TAU_NUCLEAR_S,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            UnitRegime::AtomicElectron { tau_unit_s } => check_positive("tau_unit_s", tau_unit_s),
            UnitRegime::RelativisticMeson {
                rest_energy,
                hbar_c,
                tau_unit_s,
            } => {
                check_positive("rest_energy_mev", rest_energy)?;
                check_positive("hbar_c_mev_fm", hbar_c)?;
                check_positive("tau_unit_s", tau_unit_s)
            }
        }
    }

    pub fn tau_unit_s(&self) -> f64 {
        match *self {
            UnitRegime::AtomicElectron { tau_unit_s } => tau_unit_s,
            UnitRegime::RelativisticMeson { tau_unit_s, .. } => tau_unit_s,
        }
    }

    pub fn energy_unit(&self) -> &'static str {
        match self {
            UnitRegime::AtomicElectron { .. } => "hartree",
            UnitRegime::RelativisticMeson { .. } => "MeV",
        }
    }

    pub fn length_unit(&self) -> &'static str {
        match self {
            UnitRegime::AtomicElectron { .. } => "bohr",
            UnitRegime::RelativisticMeson { .. } => "fm",
        }
    }

    /// Wave number from kinetic energy.
    pub fn momentum_from_energy(&self, energy: f64) -> Result<f64> {
        if !(energy >= 0.0) {
            return Err(ScatterError::domain(
                "E",
                energy,
                "kinetic energy must be non-negative",
            ));
        }
        Ok(match *self {
            UnitRegime::AtomicElectron { .. } => (2.0 * energy).sqrt(),
            UnitRegime::RelativisticMeson {
                rest_energy,
                hbar_c,
                ..
            } => (energy * (energy + 2.0 * rest_energy)).sqrt() / hbar_c,
        })
    }

    /// Kinetic energy from wave number; inverse of [`Self::momentum_from_energy`].
    pub fn energy_from_momentum(&self, k: f64) -> Result<f64> {
        if !(k >= 0.0) {
            return Err(ScatterError::domain(
                "k",
                k,
                "wave number must be non-negative",
            ));
        }
        Ok(match *self {
            UnitRegime::AtomicElectron { .. } => 0.5 * k * k,
            UnitRegime::RelativisticMeson {
                rest_energy,
                hbar_c,
                ..
            } => {
                let q = hbar_c * k;
                // sqrt(q² + m²) − m without cancellation for q ≪ m
                q * q / ((q * q + rest_energy * rest_energy).sqrt() + rest_energy)
            }
        })
    }

    /// dk/dE at a strictly positive energy.
    pub fn dk_de(&self, energy: f64) -> Result<f64> {
        if energy == 0.0 {
            return Err(ScatterError::SingularThreshold);
        }
        let k = self.momentum_from_energy(energy)?;
        Ok(match *self {
            UnitRegime::AtomicElectron { .. } => 1.0 / k,
            UnitRegime::RelativisticMeson {
                rest_energy,
                hbar_c,
                ..
            } => (energy + rest_energy) / (hbar_c * hbar_c * k),
        })
    }

    /// dE/dk as a function of k; finite (zero) at threshold.
    pub fn de_dk(&self, k: f64) -> Result<f64> {
        let energy = self.energy_from_momentum(k)?;
        Ok(match *self {
            UnitRegime::AtomicElectron { .. } => k,
            UnitRegime::RelativisticMeson {
                rest_energy,
                hbar_c,
                ..
            } => hbar_c * hbar_c * k / (energy + rest_energy),
        })
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(ScatterError::Config(format!(
            "{name} must be positive, got {value}"
        )))
    }
}
