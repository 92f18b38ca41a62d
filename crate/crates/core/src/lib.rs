//! Kepler motion, geodesic motion on constant-curvature 3-spaces, and the
//! canonical correspondence between them.

pub mod algebra;
pub mod curvature;
pub mod duality;
pub mod error;
pub mod flows;
pub mod kepler;
pub mod maps;
pub mod phase;
pub mod sampling;
pub mod verify;

pub use algebra::{Algebra, BracketReport};
pub use curvature::{Chart, ChartedGeodesicState, GeodesicInvariants};
pub use duality::{Branch, DualityDictionary, EvolutionPoint};
pub use error::{Error, Result};
pub use flows::{IntegratorConfig, Sample, Sheet, System, SystemTag, Trajectory};
pub use kepler::{KeplerInvariants, KeplerParams};
pub use phase::{PhasePoint, ScalarField, SymplecticReport, Tangent, Vec3};
