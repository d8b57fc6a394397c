//! Run configuration shared by the JSON config file and the command-line flags.

use std::path::{Path, PathBuf};

use scatter_core::solver::EnergyGrid;
use scatter_core::{MesonConstants, PhaseModel, TargetSpec, TimeDelayMethod, UnitRegime};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    #[default]
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl GridSpec {
    /// Parses `min:max:points[:log|:linear]`; a bare triple is log-spaced.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || CliError::Field {
            field: "grid",
            reason: format!("expected min:max:points[:log|:linear], got `{s}`"),
        };
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let e_min = parts[0].trim().parse().map_err(|_| bad())?;
        let e_max = parts[1].trim().parse().map_err(|_| bad())?;
        let points = parts[2].trim().parse().map_err(|_| bad())?;
        let spacing = match parts.get(3).map(|p| p.trim()) {
            None | Some("log") => Spacing::Log,
            Some("linear") | Some("lin") => Spacing::Linear,
            Some(_) => return Err(bad()),
        };
        Ok(GridSpec {
            e_min,
            e_max,
            points,
            spacing,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let field = |field, reason: &str| {
            Err(CliError::Field {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.e_min > 0.0) || !self.e_min.is_finite() {
            return field(
                "grid.e_min",
                "must be a finite energy above threshold (> 0)",
            );
        }
        if !(self.e_max > self.e_min) || !self.e_max.is_finite() {
            return field("grid.e_max", "must be finite and larger than grid.e_min");
        }
        if self.points < 2 {
            return field("grid.points", "must be at least 2");
        }
        Ok(())
    }

    pub fn build(&self) -> Result<EnergyGrid> {
        self.validate()?;
        Ok(match self.spacing {
            Spacing::Linear => EnergyGrid::linear(self.e_min, self.e_max, self.points)?,
            Spacing::Log => EnergyGrid::log(self.e_min, self.e_max, self.points)?,
        })
    }
}

/// A phase model given inline, or by the short names accepted on the command line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Named(String),
    Inline(PhaseModel),
}

impl ModelSpec {
    /// `carbon`, `constant:<degrees>`, or a path to a meson constants JSON file.
    /// Relative paths resolve against `base`.
    pub fn resolve(&self, base: Option<&Path>) -> Result<PhaseModel> {
        let model = match self {
            ModelSpec::Inline(m) => m.clone(),
            ModelSpec::Named(name) => resolve_name(name, base)?,
        };
        model.validate().map_err(|e| CliError::Field {
            field: "model",
            reason: e.to_string(),
        })?;
        Ok(model)
    }
}

fn resolve_name(name: &str, base: Option<&Path>) -> Result<PhaseModel> {
    if name == "carbon" {
        return Ok(PhaseModel::carbon());
    }
    if let Some(deg) = name.strip_prefix("constant:") {
        let deg: f64 = deg.trim().parse().map_err(|_| CliError::Field {
            field: "model",
            reason: format!("`{name}`: expected constant:<degrees>"),
        })?;
        return Ok(PhaseModel::constant_degrees(deg));
    }
    let path = match base {
        Some(dir) if Path::new(name).is_relative() => dir.join(name),
        _ => PathBuf::from(name),
    };
    if !path.is_file() {
        return Err(CliError::Field {
            field: "model",
            reason: format!(
                "`{name}` is neither `carbon`, `constant:<deg>` nor a readable constants file"
            ),
        });
    }
    let constants = MesonConstants::from_path(&path).map_err(|e| CliError::Context {
        context: format!("reading meson constants from {}", path.display()),
        source: e.into(),
    })?;
    Ok(PhaseModel::meson_fit(constants))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Phases,
    CrossSection,
    CrossSectionRatio,
    TimeDelay,
}

impl Observable {
    pub fn file_tag(self) -> &'static str {
        match self {
            Observable::Phases => "phases",
            Observable::CrossSection => "cross_section",
            Observable::CrossSectionRatio => "cross_section_ratio",
            Observable::TimeDelay => "time_delay",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayMethod {
    /// Analytic where closed forms exist, finite differences otherwise.
    #[default]
    Auto,
    Analytic,
    FiniteDifference,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Resonance {
    pub gamma: f64,
    pub e_res: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub target: TargetSpec,
    pub model: ModelSpec,
    /// Defaults to atomic units, or the pion regime for meson fits.
    #[serde(default)]
    pub regime: Option<UnitRegime>,
    pub grid: GridSpec,
    pub outputs: Vec<Observable>,
    /// Omitted: write to standard output (single output only).
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub time_delay_method: DelayMethod,
    #[serde(default)]
    pub resonance: Option<Resonance>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Context {
            context: format!("reading config {}", path.display()),
            source: e.into(),
        })?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Context {
            context: format!("parsing config {}", path.display()),
            source: e.into(),
        })?;
        // model files named in a config are relative to the config itself
        if let (ModelSpec::Named(name), Some(dir)) = (&cfg.model, path.parent()) {
            if !name.starts_with("constant:") && name != "carbon" && Path::new(name).is_relative() {
                cfg.model = ModelSpec::Named(dir.join(name).to_string_lossy().into_owned());
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.outputs.is_empty() {
            return Err(CliError::Field {
                field: "outputs",
                reason: "request at least one observable".into(),
            });
        }
        if self.output_path.is_none() && self.outputs.len() > 1 {
            return Err(CliError::Field {
                field: "output_path",
                reason: "several outputs need a file path".into(),
            });
        }
        if let Some(r) = self.resonance {
            if !(r.gamma > 0.0) {
                return Err(CliError::Field {
                    field: "resonance.gamma",
                    reason: "must be positive".into(),
                });
            }
        }
        if let Some(regime) = &self.regime {
            regime.validate().map_err(|e| CliError::Field {
                field: "regime",
                reason: e.to_string(),
            })?;
        }
        self.target.build().map_err(|e| CliError::Field {
            field: "target",
            reason: e.to_string(),
        })?;
        Ok(())
    }

    pub fn regime_for(&self, model: &PhaseModel) -> UnitRegime {
        self.regime.unwrap_or_else(|| default_regime(model))
    }
}

pub fn default_regime(model: &PhaseModel) -> UnitRegime {
    fn uses_meson_fit(m: &PhaseModel) -> bool {
        match m {
            PhaseModel::MesonFit(_) => true,
            PhaseModel::WithResonance { base, .. } => uses_meson_fit(base),
            _ => false,
        }
    }
    if uses_meson_fit(model) {
        UnitRegime::pion()
    } else {
        UnitRegime::atomic()
    }
}

impl DelayMethod {
    pub fn pick(self, closed_form: bool) -> TimeDelayMethod {
        match self {
            DelayMethod::Analytic => TimeDelayMethod::Analytic,
            DelayMethod::FiniteDifference => TimeDelayMethod::FiniteDifference,
            DelayMethod::Auto if closed_form => TimeDelayMethod::Analytic,
            DelayMethod::Auto => TimeDelayMethod::FiniteDifference,
        }
    }
}

/// Parses `atomic`, `pion`, or `meson:<rest energy MeV>`.
pub fn parse_regime(s: &str) -> Result<UnitRegime> {
    match s {
        "atomic" => Ok(UnitRegime::atomic()),
        "pion" => Ok(UnitRegime::pion()),
        _ => {
            let mass = s
                .strip_prefix("meson:")
                .and_then(|m| m.trim().parse::<f64>().ok())
                .ok_or_else(|| CliError::Field {
                    field: "regime",
                    reason: format!("expected atomic, pion or meson:<MeV>, got `{s}`"),
                })?;
            let regime = UnitRegime::meson(mass);
            regime.validate()?;
            Ok(regime)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_strings() {
        let g = GridSpec::parse("0.05:10:2000").unwrap();
        assert_eq!(
            (g.e_min, g.e_max, g.points, g.spacing),
            (0.05, 10.0, 2000, Spacing::Log)
        );
        assert_eq!(
            GridSpec::parse("1:2:3:linear").unwrap().spacing,
            Spacing::Linear
        );
        assert!(GridSpec::parse("1:2").is_err());
        assert!(GridSpec::parse("1:2:x").is_err());
        assert!(GridSpec::parse("1:2:3:cubic").is_err());
    }

    #[test]
    fn grid_errors_name_the_field() {
        let msg = GridSpec::parse("0:1:10")
            .unwrap()
            .validate()
            .unwrap_err()
            .to_string();
        assert!(msg.contains("grid.e_min"), "{msg}");
        let msg = GridSpec::parse("2:1:10")
            .unwrap()
            .validate()
            .unwrap_err()
            .to_string();
        assert!(msg.contains("grid.e_max"), "{msg}");
        let msg = GridSpec::parse("1:2:1")
            .unwrap()
            .validate()
            .unwrap_err()
            .to_string();
        assert!(msg.contains("grid.points"), "{msg}");
    }

    #[test]
    fn named_models() {
        assert_eq!(
            ModelSpec::Named("carbon".into()).resolve(None).unwrap(),
            PhaseModel::carbon()
        );
        assert_eq!(
            ModelSpec::Named("constant:30".into())
                .resolve(None)
                .unwrap(),
            PhaseModel::constant_degrees(30.0)
        );
        assert!(ModelSpec::Named("nope".into()).resolve(None).is_err());
        assert!(ModelSpec::Named("constant:abc".into())
            .resolve(None)
            .is_err());
    }

    #[test]
    fn regimes() {
        assert_eq!(parse_regime("pion").unwrap(), UnitRegime::pion());
        assert_eq!(
            parse_regime("meson:493.7").unwrap(),
            UnitRegime::meson(493.7)
        );
        assert!(parse_regime("meson:-1").is_err());
        assert!(parse_regime("nuclear").is_err());
    }

    #[test]
    fn config_round_trip() {
        let json = r#"{
            "target": {"simplex": {"n": 2, "r": 2.479}},
            "model": "carbon",
            "grid": {"e_min": 0.05, "e_max": 10, "points": 100},
            "outputs": ["phases", "time_delay"],
            "output_path": "out.csv"
        }"#;
        let cfg: RunConfig = serde_json::from_str(json).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.format, Format::Csv);
        assert_eq!(cfg.regime_for(&PhaseModel::carbon()), UnitRegime::atomic());
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let json = r#"{"target": {"simplex": {"n": 2, "r": 1}}, "model": "carbon",
            "grid": {"e_min": 1, "e_max": 2, "points": 3, "step": 1}, "outputs": ["phases"]}"#;
        assert!(serde_json::from_str::<RunConfig>(json).is_err());
    }
}
