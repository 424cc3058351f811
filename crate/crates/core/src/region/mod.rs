//! Information–disturbance planes: swept point clouds, boundary curves, convex hulls
//! and the tangent construction on the information vs operation-fidelity plane.

mod boundary;
mod hull;
mod sweep;
mod tangent;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MeasureVector;
use crate::spectrum::SingularSpectrum;

pub use boundary::{
    boundary_polyline, declared_boundaries, lower_boundary_at, upper_boundary_at, Bound,
};
pub use hull::{averaged_region, convex_hull, HULL_TOL};
pub use sweep::{
    check_dominance, default_step, fold_grid, for_each_grid_point, grid_size, sweep_region,
    DominanceReport, GridPoint, PlaneDominance,
};
pub use tangent::{
    curvature, curvature_sign, efficiency_argmax, tangent_point, CurvatureSign, TangentReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InfoAxis {
    InfoGain,
    EstimationFidelity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DisturbanceAxis {
    OperationFidelity,
    Reversibility,
}

/// One of the four planes: information on the vertical axis, disturbance on the horizontal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PlaneKind {
    pub info: InfoAxis,
    pub disturbance: DisturbanceAxis,
}

impl PlaneKind {
    pub const GF: Self = Self::new(
        InfoAxis::EstimationFidelity,
        DisturbanceAxis::OperationFidelity,
    );
    pub const GR: Self = Self::new(InfoAxis::EstimationFidelity, DisturbanceAxis::Reversibility);
    pub const IF: Self = Self::new(InfoAxis::InfoGain, DisturbanceAxis::OperationFidelity);
    pub const IR: Self = Self::new(InfoAxis::InfoGain, DisturbanceAxis::Reversibility);
    pub const ALL: [Self; 4] = [Self::GF, Self::GR, Self::IF, Self::IR];

    pub const fn new(info: InfoAxis, disturbance: DisturbanceAxis) -> Self {
        Self { info, disturbance }
    }

    /// `(x, y)` = (disturbance, information).
    pub fn project(&self, m: &MeasureVector) -> (f64, f64) {
        let x = match self.disturbance {
            DisturbanceAxis::OperationFidelity => m.operation_fidelity,
            DisturbanceAxis::Reversibility => m.reversibility,
        };
        let y = match self.info {
            InfoAxis::InfoGain => m.info_gain,
            InfoAxis::EstimationFidelity => m.estimation_fidelity,
        };
        (x, y)
    }

    pub fn x_name(&self) -> &'static str {
        match self.disturbance {
            DisturbanceAxis::OperationFidelity => "F",
            DisturbanceAxis::Reversibility => "R",
        }
    }

    pub fn y_name(&self) -> &'static str {
        match self.info {
            InfoAxis::InfoGain => "I",
            InfoAxis::EstimationFidelity => "G",
        }
    }
}

impl fmt::Display for PlaneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.y_name(), self.x_name())
    }
}

impl FromStr for PlaneKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphabetic()).collect();
        match key.to_ascii_uppercase().as_str() {
            "GF" => Ok(Self::GF),
            "GR" => Ok(Self::GR),
            "IF" => Ok(Self::IF),
            "IR" => Ok(Self::IR),
            _ => Err(Error::Domain(format!(
                "unknown plane {s:?}; expected one of G-F, G-R, I-F, I-R"
            ))),
        }
    }
}

impl Serialize for PlaneKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PlaneKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionPoint {
    pub x: f64,
    pub y: f64,
    pub source_spectrum: SingularSpectrum,
}

impl RegionPoint {
    pub fn of(plane: PlaneKind, s: SingularSpectrum) -> Self {
        let (x, y) = plane.project(&crate::measures::measures(&s));
        Self {
            x,
            y,
            source_spectrum: s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub label: String,
    pub points: Vec<RegionPoint>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_parsing() {
        assert_eq!("G-F".parse::<PlaneKind>().unwrap(), PlaneKind::GF);
        assert_eq!("ir".parse::<PlaneKind>().unwrap(), PlaneKind::IR);
        assert!("GX".parse::<PlaneKind>().is_err());
        assert_eq!(PlaneKind::IF.to_string(), "I-F");
        let json = serde_json::to_string(&PlaneKind::GR).unwrap();
        assert_eq!(json, "\"G-R\"");
    }
}
