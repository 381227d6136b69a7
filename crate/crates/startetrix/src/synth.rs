//! Synthetic test mosaics: flat fields, ramps, step edges along both
//! diagonals, stripes, and seeded noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mosaic::BayerMosaic;

/// Kind of synthetic image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    /// Mid-gray flat field.
    Constant,
    /// Smooth diagonal ramp from 0 to full range.
    Ramp,
    /// Step edge along the up-right diagonal (x + y = size).
    DiagEdge45,
    /// Step edge along the down-right diagonal (x = y).
    DiagEdge135,
    /// Horizontal stripes, 4 rows per band.
    HStripes,
    /// Vertical stripes, 4 columns per band.
    VStripes,
    /// Uniform noise from a seeded generator.
    Noise,
}

impl SynthKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::Ramp => "ramp",
            Self::DiagEdge45 => "diag-edge-45",
            Self::DiagEdge135 => "diag-edge-135",
            Self::HStripes => "h-stripes",
            Self::VStripes => "v-stripes",
            Self::Noise => "noise",
        }
    }

    pub const ALL: [SynthKind; 7] = [
        SynthKind::Constant,
        SynthKind::Ramp,
        SynthKind::DiagEdge45,
        SynthKind::DiagEdge135,
        SynthKind::HStripes,
        SynthKind::VStripes,
        SynthKind::Noise,
    ];
}

impl std::str::FromStr for SynthKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SynthKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParam(format!("unknown synthetic kind `{s}`")))
    }
}

/// Generates a square `size` x `size` mosaic of the given kind. The seed
/// only affects [`SynthKind::Noise`]; every kind is deterministic for equal
/// arguments.
pub fn synthesize(kind: SynthKind, size: usize, bit_depth: u32, seed: u64) -> Result<BayerMosaic> {
    let max = if (8..=16).contains(&bit_depth) {
        (1u32 << bit_depth) - 1
    } else {
        return Err(Error::BitDepthRange { bits: bit_depth });
    };
    let lo = (max / 4) as u16;
    let hi = (3 * (max as u64) / 4) as u16;
    match kind {
        SynthKind::Constant => {
            BayerMosaic::from_fn(size, size, bit_depth, |_, _| (1u32 << (bit_depth - 1)) as u16)
        }
        SynthKind::Ramp => BayerMosaic::from_fn(size, size, bit_depth, |x, y| {
            (((x + y) as u64 * max as u64) / (2 * size - 2) as u64) as u16
        }),
        // The step edges carry a gentle gradient along the edge direction,
        // like a lit surface: both sides stay textured, the edge stays sharp.
        SynthKind::DiagEdge45 => BayerMosaic::from_fn(size, size, bit_depth, |x, y| {
            let base = if x + y < size { lo } else { hi };
            let tilt = ((x + size - 1 - y) as u64 * (max as u64 / 8)) / (2 * size - 2) as u64;
            base + tilt as u16
        }),
        SynthKind::DiagEdge135 => BayerMosaic::from_fn(size, size, bit_depth, |x, y| {
            let base = if x >= y { hi } else { lo };
            let tilt = ((x + y) as u64 * (max as u64 / 8)) / (2 * size - 2) as u64;
            base + tilt as u16
        }),
        SynthKind::HStripes => BayerMosaic::from_fn(size, size, bit_depth, |_, y| {
            if (y / 4) % 2 == 0 {
                lo
            } else {
                hi
            }
        }),
        SynthKind::VStripes => BayerMosaic::from_fn(size, size, bit_depth, |x, _| {
            if (x / 4) % 2 == 0 {
                lo
            } else {
                hi
            }
        }),
        SynthKind::Noise => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            BayerMosaic::from_fn(size, size, bit_depth, |_, _| rng.gen_range(0..=max) as u16)
        }
    }
}
