//! Max-k-cut heuristics from annealed coupled-oscillator networks.
//!
//! Continuous XY phases come from a Stuart-Landau network ([`annealer`]) or a
//! 2D driven-dissipative condensate simulation ([`gpe`]); [`rounding`] bins
//! them into k-ary labels, and [`oracle`] supplies exact brute-force cuts to
//! measure the error. [`segment`] and [`cvm`] reduce image segmentation and
//! constrained via minimization to max-3-cut instances.

pub mod annealer;
pub mod bench;
pub mod cli;
pub mod cvm;
pub mod error;
pub mod gpe;
pub mod graph;
pub mod ground_state;
pub mod oracle;
pub mod rounding;
pub mod segment;
pub mod solve;

pub use error::{Error, Result};
pub use graph::{
    couplings_from_weights, cut_weight, house_graph, random_dense_graph, ternary_energy,
    xy_energy, CouplingMatrix, PartitionAssignment, SpinConfiguration, WeightedGraph,
};
