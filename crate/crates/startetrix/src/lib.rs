//! Spectral-spatial transforms for Bayer CFA-sampled raw camera images.
//!
//! A raw sensor image records one color per pixel in 2x2 RGGB macropixels.
//! The transforms in this crate map the four macropixel channels
//! (G1, G2, B, R) to a decorrelated quad (Y, Dg, C1, C2) built entirely
//! from lifting steps, so the integer-mode forward transform is exactly
//! invertible: compress-first pipelines can stay lossless.
//!
//! Five families are provided: the three wavelet spectral-spatial
//! transforms (YDgCbCr, YDgCoCg, YDgCoCg2) and the two extended
//! Star-Tetrix transforms (type I, which with the 5/3 wavelet is exactly
//! the Star-Tetrix transform of JPEG XS, and the simpler type II). Each
//! accepts Haar, 5/3, or 9/7 lifting coefficients, and each spatial
//! predict step can be made edge-aware: per-pixel weights steer the
//! prediction along the locally smooth direction, with no side
//! information — the decoder recomputes the same weights from the same
//! reconstructed samples.
//!
//! ```
//! use startetrix::{
//!     forward, inverse, synthesize, ArithmeticMode, Family, SynthKind, TransformSpec, Wavelet,
//! };
//!
//! let image = synthesize(SynthKind::Noise, 16, 12, 7).unwrap();
//! let spec = TransformSpec::new(Family::XsttI, Wavelet::FiveThree, ArithmeticMode::Integer)
//!     .with_edge_aware(true);
//! let (subbands, _weights) = forward(&image, &spec).unwrap();
//! let restored = inverse(&subbands, &spec).unwrap();
//! assert_eq!(restored, image);
//! ```
//!
//! The `rate` module adds a desk-scale analysis harness: zeroth-order
//! entropy as a bits-per-pixel proxy, a dead-zone quantizer, PSNR, and
//! encoder/decoder weight-divergence measurement for lossy runs.

pub mod edge;
pub mod error;
pub mod lifting;
pub mod mosaic;
pub mod rate;
pub mod synth;
pub mod transforms;
pub mod wavelet;

pub use edge::{DiagKind, EdgeParams, HvKind, WeightField};
pub use error::{Error, Result};
pub use mosaic::{
    merge_quad, split_mosaic, ArithmeticMode, BayerMosaic, CfaPhase, ChannelQuad, Plane,
    SubbandQuad,
};
pub use rate::{rd_sweep, weight_divergence, RateReport};
pub use synth::{synthesize, SynthKind};
pub use transforms::{
    build_stages, dc_matrix, forward, inverse, inverse_quad, stt_forward_direct, Family,
    StagePlan, TransformSpec, WeightLog,
};
pub use wavelet::Wavelet;
