//! Scattering of a particle by a cluster of zero-range potentials.
//!
//! Each center is described by its s-wave phase δ₀(E). The cluster scatters
//! into partial waves centered on the target with phases η_λ(E), from which
//! orientation-averaged cross sections and partial time delays follow.

pub mod diffraction;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod kinematics;
pub mod observables;
pub mod phase_models;
pub mod solver;

pub use error::{Result, ScatterError};
pub use exec::Execution;
pub use geometry::{LengthUnit, Target, TargetSpec};
pub use kinematics::UnitRegime;
pub use observables::{ObservableCurve, ObservableKind, Series, TimeDelayMethod};
pub use phase_models::{CmFrameMap, MesonConstants, PhaseModel};
pub use solver::{EnergyGrid, PhaseCurve, PhaseCurveOptions, PhaseShiftSet};
