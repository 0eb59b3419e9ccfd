//! Random interdependent networks: generation, r-robustness, isoperimetry,
//! algebraic connectivity, threshold experiments and W-MSR consensus.

pub mod bitset;
pub mod consensus;
pub mod eigen;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod graph;
pub mod robustness;
pub mod spectral;
pub mod structural;

pub use bitset::NodeSet;
pub use error::{Error, Result};
pub use graph::{Graph, LayeredGraph};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/robustness.md")]
    mod robustness {}
    #[doc = include_str!("../../../book/src/isoperimetry.md")]
    mod isoperimetry {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/thresholds.md")]
    mod thresholds {}
    #[doc = include_str!("../../../book/src/consensus.md")]
    mod consensus {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
