//! Information and disturbance of quantum measurements, computed from the singular
//! values of the measurement operators.
//!
//! Every measure of an outcome depends only on its spectrum: the information gain
//! `I`, estimation fidelity `G`, operation fidelity `F`, physical reversibility `R`
//! and the outcome probability `p`. On top of these the crate maps the allowed
//! regions of the four information–disturbance planes, builds the measurements that
//! sit on their upper boundaries, and checks first-order optimality numerically.

pub mod averaging;
mod dd;
pub mod divdiff;
pub mod error;
pub mod families;
pub mod kkt;
pub mod measurement;
pub mod measures;
pub mod oracle;
pub mod region;
pub mod spectrum;
pub mod verify;

pub use averaging::{
    average_measures, center_of_mass, classify_optimality, optimal_if, optimal_ir,
    AveragedMeasures, Condition,
};
pub use error::{Error, Result};
pub use families::{
    info_gain_1l, info_gain_k1, info_gain_projective, isotropic_measurement, CoefficientTables,
    FamilyKL, Projector,
};
pub use measurement::{
    construct_measurement, DiagonalOperator, Measurement, Particle, ParticleSet,
};
pub use measures::{
    efficiency, estimation_fidelity, info_gain, measures, operation_fidelity, outcome_probability,
    reversibility, MeasureVector,
};
pub use region::{PlaneKind, Polyline, RegionPoint, TangentReport};
pub use spectrum::{
    canonicalize, harmonic_eta, AuxiliaryScalars, SingularSpectrum, DEGENERACY_TOL,
};
