//! Local filtering of bipartite density operators, Choi-map entanglement
//! witnesses, and a measurement-based (ancilla + post-selection) realization
//! of diagonal filters with a seeded Monte Carlo ensemble simulator.

pub mod catalog;
pub mod error;
pub mod filter;
pub mod format;
pub mod io;
pub mod linalg;
pub mod mcsim;
pub mod measure;
pub mod qstate;
pub mod random;
pub mod scan;
pub mod tol;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
pub use filter::LocalFilter;
pub use linalg::{CMatrix, C64};
pub use mcsim::{run_protocol, ProtocolRun};
pub use measure::{build_projector, postselect_diag, protocol_analytic, FilterProjector};
pub use qstate::{DensityOperator, PureState};
pub use scan::{ScanRow, ScanSpec};
pub use witness::{DetectionReport, MapKind, PositiveMapWitness, Side};
