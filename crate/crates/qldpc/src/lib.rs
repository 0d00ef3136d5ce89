//! Quantum LDPC decoding toolkit.
//!
//! This crate provides the pieces needed to study partly-parallel
//! message-passing decoding of CSS quantum LDPC codes:
//!
//! - [`gf2`]: sparse binary matrices, GF(2) rank / rowspace / kernel
//!   computations, circulant builders, and alist file I/O.
//! - [`css`]: CSS code assembly, the hypergraph product construction,
//!   the built-in C2 code, and file-based code ingestion.
//! - [`layering`]: layers, layer decompositions and t-covers of check
//!   sets, validation and lower bounds, greedy decomposition, and the
//!   product construction that turns component decompositions into a
//!   decomposition of the hypergraph product matrix.
//! - [`decoder`]: syndrome message-passing decoders (sum-product,
//!   normalized min-sum, perturbed min-sum) under flooded, serial and
//!   layered schedules, with optional random ordering driven by a
//!   32-bit linear congruential generator.
//! - [`sim`]: Monte Carlo Z-noise simulation with degeneracy-aware
//!   outcome classification and CSV emission.
//! - [`latency`]: closed-form latency estimates for parallel, serial
//!   and layered decoder architectures.

pub mod alist;
pub mod css;
pub mod decoder;
pub mod gf2;
pub mod latency;
pub mod layering;
pub mod sim;

pub use css::{build_c2, hypergraph_product, load_css, CssCode, HgpRowLabel};
pub use decoder::{decode, Algorithm, DecodeResult, DecoderConfig, Lcg, Schedule};
pub use gf2::{RowSpace, SparseBinaryMatrix};
pub use latency::{latency_ns, Architecture, LatencyQuery};
pub use layering::{
    b1_cover, c2_component_layers, density_bound, greedy_decompose, hgp_layers, is_layer,
    validate_cover, CoverReport, LayerCover,
};
pub use sim::{classify, run_trials, sample_z_error, Classifier, Outcome, SimStats};
