//! Complete measurements made of diagonal operators, and the particle sets they
//! are equivalent to.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{measures, MeasureVector};
use crate::spectrum::{canonicalize, SingularSpectrum};

pub const SCHEMA_VERSION: u32 = 1;

/// One measurement operator: its diagonal in the computational basis and the
/// cyclic shift it was generated with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalOperator {
    pub diag: Vec<f64>,
    pub shift: usize,
}

impl DiagonalOperator {
    pub fn spectrum(&self) -> Result<SingularSpectrum> {
        SingularSpectrum::new(self.diag.clone())
    }

    /// `p(m) = Σ diag² / d`.
    pub fn probability(&self) -> f64 {
        self.diag.iter().map(|v| v * v).sum::<f64>() / self.diag.len() as f64
    }
}

/// A set of diagonal operators; weights are implied by the operators' norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementDoc", into = "MeasurementDoc")]
pub struct Measurement {
    d: usize,
    operators: Vec<DiagonalOperator>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementDoc {
    schema_version: u32,
    d: usize,
    operators: Vec<DiagonalOperator>,
    #[serde(default)]
    completeness_residual: f64,
}

impl TryFrom<MeasurementDoc> for Measurement {
    type Error = Error;
    fn try_from(doc: MeasurementDoc) -> Result<Self> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Domain(format!(
                "unsupported measurement schema_version {}",
                doc.schema_version
            )));
        }
        Measurement::new(doc.d, doc.operators)
    }
}

impl From<Measurement> for MeasurementDoc {
    fn from(m: Measurement) -> Self {
        MeasurementDoc {
            schema_version: SCHEMA_VERSION,
            completeness_residual: m.completeness_residual(),
            d: m.d,
            operators: m.operators,
        }
    }
}

/// Tolerance on `max_i |Σ_m diag_m[i]² − 1|` accepted by consumers of a measurement.
pub const COMPLETENESS_TOL: f64 = 1e-9;

impl Measurement {
    /// Checks shapes and entries; completeness is reported, not enforced.
    pub fn new(d: usize, operators: Vec<DiagonalOperator>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!(
                "dimension must be at least 2, got {d}"
            )));
        }
        if operators.is_empty() {
            return Err(Error::Domain(
                "a measurement needs at least one operator".into(),
            ));
        }
        for (m, op) in operators.iter().enumerate() {
            if op.diag.len() != d {
                return Err(Error::Domain(format!(
                    "operator #{} has {} diagonal entries, expected {d}",
                    m + 1,
                    op.diag.len()
                )));
            }
            if op.shift >= d {
                return Err(Error::Domain(format!(
                    "operator #{} has shift {} outside 0..{d}",
                    m + 1,
                    op.shift
                )));
            }
            op.spectrum().map_err(|e| match e {
                Error::InvalidSpectrum(msg) => {
                    Error::InvalidSpectrum(format!("operator #{}: {msg}", m + 1))
                }
                other => other,
            })?;
        }
        Ok(Self { d, operators })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn operators(&self) -> &[DiagonalOperator] {
        &self.operators
    }

    /// `max_i |Σ_m diag_m[i]² − 1|`.
    pub fn completeness_residual(&self) -> f64 {
        (0..self.d)
            .map(|i| {
                let s: f64 = self
                    .operators
                    .iter()
                    .map(|op| op.diag[i] * op.diag[i])
                    .sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.operators
            .iter()
            .map(DiagonalOperator::probability)
            .collect()
    }

    /// Per-outcome measures in operator order.
    pub fn outcome_measures(&self) -> Vec<MeasureVector> {
        self.operators
            .iter()
            .map(|op| measures(&op.spectrum().expect("validated on construction")))
            .collect()
    }

    /// One particle per outcome: the canonical spectrum with mass `p(m)`.
    pub fn particles(&self) -> ParticleSet {
        let particles = self
            .operators
            .iter()
            .map(|op| Particle {
                spectrum: canonicalize(&op.spectrum().expect("validated on construction")),
                mass: op.probability(),
            })
            .collect();
        ParticleSet { particles }
    }

    pub(crate) fn require_complete(&self) -> Result<()> {
        let residual = self.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::IncompleteMeasurement {
                residual,
                tolerance: COMPLETENESS_TOL,
            });
        }
        Ok(())
    }
}

/// A point of a single-outcome region carrying a mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub spectrum: SingularSpectrum,
    pub mass: f64,
}

impl Particle {
    /// Stores the canonical form of `spectrum`.
    pub fn new(spectrum: &SingularSpectrum, mass: f64) -> Result<Self> {
        if !(mass > 0.0 && mass <= 1.0) {
            return Err(Error::Domain(format!(
                "particle mass {mass} is outside (0, 1]"
            )));
        }
        Ok(Self {
            spectrum: canonicalize(spectrum),
            mass,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParticleSet {
    particles: Vec<Particle>,
}

#[derive(Deserialize)]
struct ParticleSetDoc {
    particles: Vec<Particle>,
}

impl<'de> Deserialize<'de> for ParticleSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let doc = ParticleSetDoc::deserialize(de)?;
        let particles = doc
            .particles
            .into_iter()
            .map(|p| Particle::new(&p.spectrum, p.mass))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        ParticleSet::new(particles).map_err(serde::de::Error::custom)
    }
}

const MASS_TOL: f64 = 1e-12;

impl ParticleSet {
    /// Masses must sum to one and all spectra must share one dimension.
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        let Some(first) = particles.first() else {
            return Err(Error::Domain("particle set is empty".into()));
        };
        let d = first.spectrum.d();
        if let Some(p) = particles.iter().find(|p| p.spectrum.d() != d) {
            return Err(Error::Domain(format!(
                "particle of dimension {} in a set of dimension {d}",
                p.spectrum.d()
            )));
        }
        let total: f64 = particles.iter().map(|p| p.mass).sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::Domain(format!(
                "particle masses sum to {total}, expected 1"
            )));
        }
        Ok(Self { particles })
    }

    pub fn d(&self) -> usize {
        self.particles[0].spectrum.d()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }
}

/// Rescales and cyclically duplicates every particle so the measurement reproduces
/// the set's center of mass. Operators with equal diagonals are merged, adding their
/// weights in quadrature.
pub fn construct_measurement(set: &ParticleSet) -> Measurement {
    let d = set.d();
    let mut merger = Merger::default();
    for p in set.particles() {
        let lambda = p.spectrum.values();
        let scale = (p.mass / p.spectrum.aux().sigma_sq).sqrt();
        for shift in 0..d {
            let diag: Vec<f64> = (0..d)
                .map(|j| scale * lambda[(j + d - shift) % d])
                .collect();
            merger.push(DiagonalOperator { diag, shift });
        }
    }
    Measurement::new(d, merger.finish()).expect("constructed operators are well formed")
}

/// Collects operators, combining those whose incoming diagonals are equal.
#[derive(Default)]
pub(crate) struct Merger {
    keys: Vec<Vec<f64>>,
    operators: Vec<DiagonalOperator>,
}

impl Merger {
    pub(crate) fn push(&mut self, op: DiagonalOperator) {
        match self.keys.iter().position(|k| *k == op.diag) {
            Some(i) => {
                for (acc, v) in self.operators[i].diag.iter_mut().zip(&op.diag) {
                    *acc = acc.hypot(*v);
                }
            }
            None => {
                self.keys.push(op.diag.clone());
                self.operators.push(op);
            }
        }
    }

    pub(crate) fn finish(self) -> Vec<DiagonalOperator> {
        self.operators
    }
}
