//! Distance-1 graph coloring on compressed sparse row graphs.
//!
//! Three colorings share one graph type:
//!
//! * [`greedy`]: sequential first-fit, the reference every other result is
//!   checked against.
//! * [`iterative`]: parallel speculation with conflict detection rounds.
//! * [`dataflow`]: parallel first-fit where each vertex waits for its
//!   lower-indexed neighbors on a publish/wait color board. Produces exactly
//!   the natural-order greedy coloring.
//!
//! [`rmat`] generates skewed synthetic inputs and [`stats`] reports their
//! degree and clustering structure.

pub mod dataflow;
pub mod graph;
pub mod greedy;
pub mod io;
pub mod iterative;
pub mod rmat;
pub mod stats;
mod workers;

pub use dataflow::{dataflow_color, dataflow_color_with, DataflowConfig, DataflowError, DataflowRun};
pub use graph::{shuffle_labels, Graph, GraphError, Vertex};
pub use greedy::{greedy_color, greedy_color_natural, verify_coloring, Color, Coloring, ColoringError};
pub use iterative::{iterative_color, IterativeError, IterativeRun, RoundStats, SchedulePolicy};
pub use rmat::{rmat_generate, Preset, RmatError, RmatParams};
pub use workers::SpawnError;
