//! Signed-angle and ratio-of-distance rigidity: rank tests, constructive
//! generation of globally rigid frameworks, and sensor network localization
//! from mixed angle and distance-ratio measurements.

pub mod construction;
pub mod error;
pub mod framework;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod lm;
pub mod oracle;
pub mod quad;
pub mod rigidity;
pub mod snl;

pub use error::{Error, Result};
pub use framework::Framework;
pub use geometry::{Configuration, Point};
pub use graph::{Attr, Bipartition, Graph};
