//! Exact geometry of multiclass losses and convex surrogates.

pub mod calibration;
pub mod ccdim;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod losses;
pub mod polytope;
pub mod ranking;
pub mod surrogate;

pub use error::{Error, Result};
pub use linalg::{RatMatrix, RatVector, Rational};
pub use lp::{LpResult, LpStatus, Sense};
pub use polytope::HPolytope;
pub use losses::LossMatrix;
pub use surrogate::{LinearEmbedSurrogate, NormalSets, PLSurrogate, QuadraticProbSurrogate};
pub use calibration::{CalibrationStatus, CalibrationVerdict};
pub use ccdim::CCDimReport;
pub use ranking::{DAGEdgeList, Permutation};
