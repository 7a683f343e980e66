//! Macroscopic evacuation traffic on road networks.
//!
//! Densities follow a scalar conservation law on each road with an
//! evacuation-calibrated linear/quadratic flux, coupled at junctions by a
//! throughput-maximizing rule. Junction preferences can be tuned by
//! stochastic block coordinate descent.

pub mod calibration;
pub mod engine;
pub mod error;
pub mod flux;
pub mod junction;
pub mod metrics;
pub mod network;
pub mod optimizer;
pub mod scenario;
pub mod toy;
pub mod verify;

pub use engine::{EngineConfig, Simulation};
pub use error::{Error, Result};
pub use flux::{Branch, NormalizedFlux};
pub use junction::{resolve, JunctionProblem, JunctionSolution, Regime};
pub use metrics::{los_classify, Los, MetricsAccumulator};
pub use network::{BuildOptions, Network, NetworkConfig};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/flux.md")]
    mod flux {}
    #[doc = include_str!("../../../book/src/junctions.md")]
    mod junctions {}
    #[doc = include_str!("../../../book/src/network.md")]
    mod network {}
    #[doc = include_str!("../../../book/src/engine.md")]
    mod engine {}
    #[doc = include_str!("../../../book/src/metrics.md")]
    mod metrics {}
    #[doc = include_str!("../../../book/src/calibration.md")]
    mod calibration {}
    #[doc = include_str!("../../../book/src/optimizer.md")]
    mod optimizer {}
    #[doc = include_str!("../../../book/src/toy.md")]
    mod toy {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
}
