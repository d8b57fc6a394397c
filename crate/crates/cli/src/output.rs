//! CSV and JSON writers. Both are deterministic: the same inputs give
//! byte-identical files.

use std::fmt::Write as _;

use scatter_core::diffraction::DiffractionProfile;
use scatter_core::{ObservableCurve, ObservableKind};
use serde::Serialize;
use serde_json::json;

use crate::config::Format;

pub const TOOL: &str = concat!("scatter ", env!("CARGO_PKG_VERSION"));

/// Extra provenance lines for a data file.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Provenance {
    pub command: String,
    pub grid: Option<String>,
    pub notes: Vec<String>,
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn column(name: &str, multiplicity: usize) -> String {
    if multiplicity > 1 {
        format!("{name}_x{multiplicity}")
    } else {
        name.to_string()
    }
}

fn unit_line(kind: &ObservableKind, energy_unit: &str) -> String {
    match kind {
        ObservableKind::Phase => "values: phase in rad".into(),
        ObservableKind::CrossSection { unit } => format!("values: cross section in {unit}"),
        ObservableKind::CrossSectionRatio => "values: dimensionless ratio sigma/(N sigma0)".into(),
        ObservableKind::TimeDelay { tau_unit_s } => {
            format!("values: time delay in units of {tau_unit_s:e} s; E in {energy_unit}")
        }
    }
}

pub fn render_curve(curve: &ObservableCurve, prov: &Provenance, format: Format) -> String {
    match format {
        Format::Csv => curve_csv(curve, prov),
        Format::Json => {
            let value = json!({
                "tool": TOOL,
                "provenance": prov,
                "observable": curve.kind,
                "metadata": curve.metadata,
                "energies": curve.energies,
                "momenta": curve.momenta,
                "series": curve.series,
            });
            let mut s = serde_json::to_string_pretty(&value).expect("curves serialize");
            s.push('\n');
            s
        }
    }
}

fn header(out: &mut String, prov: &Provenance) {
    let _ = writeln!(out, "# tool: {TOOL}");
    let _ = writeln!(out, "# command: {}", prov.command);
    if let Some(g) = &prov.grid {
        let _ = writeln!(out, "# grid: {g}");
    }
    for n in &prov.notes {
        let _ = writeln!(out, "# note: {n}");
    }
}

fn curve_csv(curve: &ObservableCurve, prov: &Provenance) -> String {
    let m = &curve.metadata;
    let mut out = String::new();
    header(&mut out, prov);
    let _ = writeln!(
        out,
        "# observable: {}",
        unit_line(&curve.kind, &m.energy_unit)
    );
    let _ = writeln!(
        out,
        "# regime: {}",
        serde_json::to_string(&m.regime).expect("regime serializes")
    );
    let _ = writeln!(out, "# model: {}", m.model);
    let _ = writeln!(out, "# centers: {}", m.n_centers);
    if let Some(r) = m.spacing {
        let _ = writeln!(out, "# spacing: {} {}", num(r), m.length_unit);
    }
    let coords: Vec<String> = m
        .centers
        .iter()
        .map(|c| format!("({} {} {})", num(c[0]), num(c[1]), num(c[2])))
        .collect();
    let _ = writeln!(
        out,
        "# coordinates [{}]: {}",
        m.length_unit,
        coords.join(" ")
    );
    let _ = writeln!(out, "# E in {}, k in 1/{}", m.energy_unit, m.length_unit);

    let mut cols = vec!["E".to_string(), "k".to_string()];
    cols.extend(curve.series.iter().map(|s| column(&s.name, s.multiplicity)));
    let _ = writeln!(out, "{}", cols.join(","));
    for i in 0..curve.energies.len() {
        let mut row = vec![num(curve.energies[i]), num(curve.momenta[i])];
        row.extend(curve.series.iter().map(|s| num(s.values[i])));
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Several profiles sharing one θ grid, one column per radius.
pub fn render_profiles(
    profiles: &[DiffractionProfile],
    prov: &Provenance,
    format: Format,
) -> String {
    match format {
        Format::Json => {
            let value = json!({
                "tool": TOOL,
                "provenance": prov,
                "observable": "huygens_profile",
                "profiles": profiles,
            });
            let mut s = serde_json::to_string_pretty(&value).expect("profiles serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::new();
            header(&mut out, prov);
            if let Some(p) = profiles.first() {
                let _ = writeln!(out, "# observable: J(theta), arbitrary units");
                let _ = writeln!(out, "# k: {}", num(p.k));
                let _ = writeln!(out, "# spacing: {}", num(p.spacing));
                let _ = writeln!(out, "# delta0: {} rad", num(p.delta0));
            }
            let mut cols = vec!["theta".to_string()];
            cols.extend(profiles.iter().map(|p| format!("J_r{}", num(p.r))));
            let _ = writeln!(out, "{}", cols.join(","));
            let rows = profiles.first().map_or(0, |p| p.theta.len());
            for i in 0..rows {
                let mut row = vec![num(profiles[0].theta[i])];
                row.extend(profiles.iter().map(|p| num(p.j[i])));
                let _ = writeln!(out, "{}", row.join(","));
            }
            out
        }
    }
}
