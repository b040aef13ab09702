//! Tensor calculus for rheonomic m-root Finsler structures on the 1-jet
//! space `J1(R, M4)`.

pub mod algebra;
pub mod connections;
pub mod curvature;
pub mod electromag;
pub mod error;
pub mod fd;
pub mod jet;
pub mod metric;
pub mod sampling;
pub mod structure;
pub mod tensor;

pub use error::{GeometryError, Result};
pub use jet::{JetPoint, TemporalMetric, DIM};
pub use structure::{CubicTable, MRootStructure, MetricKind};
pub use tensor::{DTensor, Slot, Symmetry};
