//! Cluster geometry: center positions, distance matrix, equal-spacing detection.

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScatterError};

/// Default relative tolerance for [`Target::equal_spacing`].
pub const EQUAL_SPACING_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthUnit {
    #[default]
    #[serde(rename = "au")]
    Bohr,
    #[serde(rename = "fm")]
    Femtometer,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    centers: Vec<Vector3<f64>>,
    unit: LengthUnit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix(pub DMatrix<f64>);

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn max_distance(&self) -> f64 {
        self.0.max()
    }

    pub fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| self.0[(i, j)]))
    }
}

impl Target {
    pub fn new(centers: Vec<Vector3<f64>>) -> Result<Self> {
        Self::with_unit(centers, LengthUnit::default())
    }

    pub fn with_unit(centers: Vec<Vector3<f64>>, unit: LengthUnit) -> Result<Self> {
        if centers.is_empty() {
            return Err(ScatterError::Geometry(
                "a target needs at least one center".into(),
            ));
        }
        if let Some(c) = centers.iter().find(|c| !c.iter().all(|x| x.is_finite())) {
            return Err(ScatterError::Geometry(format!("non-finite center {c:?}")));
        }
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if (centers[i] - centers[j]).norm() == 0.0 {
                    return Err(ScatterError::Geometry(format!(
                        "centers {i} and {j} coincide at {:?}",
                        centers[i].as_slice()
                    )));
                }
            }
        }
        Ok(Target { centers, unit })
    }

    pub fn from_coords(coords: &[[f64; 3]]) -> Result<Self> {
        Self::new(coords.iter().map(|c| Vector3::from(*c)).collect())
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[Vector3<f64>] {
        &self.centers
    }

    pub fn unit(&self) -> LengthUnit {
        self.unit
    }

    pub fn in_unit(mut self, unit: LengthUnit) -> Self {
        self.unit = unit;
        self
    }

    pub fn centroid(&self) -> Vector3<f64> {
        self.centers.iter().sum::<Vector3<f64>>() / self.n() as f64
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        let n = self.n();
        DistanceMatrix(DMatrix::from_fn(n, n, |i, j| {
            (self.centers[i] - self.centers[j]).norm()
        }))
    }

    /// The common center-to-center distance when all pairs agree within
    /// `rel_tol`; `None` for a single center or an unequal geometry.
    pub fn equal_spacing(&self, rel_tol: f64) -> Option<f64> {
        if self.n() < 2 {
            return None;
        }
        let dm = self.distance_matrix();
        let dists: Vec<f64> = dm.off_diagonal().collect();
        let mean = dists.iter().sum::<f64>() / dists.len() as f64;
        let worst = dists.iter().map(|d| (d - mean).abs()).fold(0.0, f64::max);
        (worst <= rel_tol * mean).then_some(mean)
    }

    /// Regular simplex of `n` centers with edge `r`, centroid at the origin.
    pub fn make_simplex(n: usize, r: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(ScatterError::Geometry(format!(
                "edge length must be positive, got {r}"
            )));
        }
        let centers = match n {
            1 => vec![Vector3::zeros()],
            2 => vec![
                Vector3::new(0.0, 0.0, r / 2.0),
                Vector3::new(0.0, 0.0, -r / 2.0),
            ],
            3 => {
                let rho = r / 3f64.sqrt();
                (0..3)
                    .map(|i| {
                        let phi = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
                        Vector3::new(rho * phi.cos(), rho * phi.sin(), 0.0)
                    })
                    .collect()
            }
            4 => {
                let s = r / (2.0 * 2f64.sqrt());
                [
                    [1.0, 1.0, 1.0],
                    [1.0, -1.0, -1.0],
                    [-1.0, 1.0, -1.0],
                    [-1.0, -1.0, 1.0],
                ]
                .iter()
                .map(|v| Vector3::from(*v) * s)
                .collect()
            }
            _ => {
                return Err(ScatterError::Unsupported(format!(
                    "a simplex with {n} equally spaced centers does not exist in 3-space (1..=4)"
                )))
            }
        };
        Target::new(centers)
    }
}

/// Target description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetSpec {
    Centers {
        centers: Vec<[f64; 3]>,
        #[serde(default)]
        length_unit: LengthUnit,
    },
    Simplex {
        simplex: SimplexSpec,
        #[serde(default)]
        length_unit: LengthUnit,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexSpec {
    pub n: usize,
    pub r: f64,
}

impl TargetSpec {
    pub fn build(&self) -> Result<Target> {
        match self {
            TargetSpec::Centers {
                centers,
                length_unit,
            } => Ok(Target::from_coords(centers)?.in_unit(*length_unit)),
            TargetSpec::Simplex {
                simplex,
                length_unit,
            } => Ok(Target::make_simplex(simplex.n, simplex.r)?.in_unit(*length_unit)),
        }
    }
}
