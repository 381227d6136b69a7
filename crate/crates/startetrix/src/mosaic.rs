//! Data model for CFA mosaics, macropixel channel quads, and subband quads.
//!
//! A Bayer mosaic stores one color sample per pixel in the RGGB layout:
//!
//! ```text
//!   R  G1
//!   G2 B
//! ```
//!
//! `G1` is the green sharing a row with `R`, `G2` the green sharing a row
//! with `B`. [`split_mosaic`] regroups the image into four quarter-resolution
//! planes indexed by macropixel; [`merge_quad`] is its exact inverse.

use crate::error::{Error, Result};

/// Arithmetic regime of a transform run.
///
/// `Integer` keeps every lifting step rounded so the transform is exactly
/// invertible on integer inputs. `Real` drops rounding from the irrational
/// lifting steps (Haar and 9/7 coefficients) for lossy use; 5/3 steps stay
/// rounded in both modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithmeticMode {
    Integer,
    Real,
}

impl ArithmeticMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Integer => "integer",
            Self::Real => "real",
        }
    }
}

impl std::str::FromStr for ArithmeticMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integer" | "lossless" => Ok(Self::Integer),
            "real" | "lossy" => Ok(Self::Real),
            other => Err(Error::InvalidParam(format!("unknown mode `{other}`"))),
        }
    }
}

/// CFA phase. Only RGGB is supported; other phases (GRBG, GBRG, BGGR) are a
/// documented non-goal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CfaPhase {
    Rggb,
}

/// A quarter-resolution scalar plane on the macropixel grid.
///
/// Values are stored as `f64` in both arithmetic modes; integer-mode planes
/// hold exactly integral values, which `f64` represents losslessly far beyond
/// the 16-bit + lifting-gain range this crate needs.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// A single-plane CFA raw image with RGGB phase and even dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BayerMosaic {
    width: usize,
    height: usize,
    bit_depth: u32,
    phase: CfaPhase,
    samples: Vec<u16>,
}

impl BayerMosaic {
    /// Builds a mosaic from row-major samples, validating the invariants:
    /// even dimensions, bit depth in 8..=16, and every sample below
    /// `2^bit_depth`.
    pub fn new(width: usize, height: usize, bit_depth: u32, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 || width % 2 != 0 || height % 2 != 0 {
            return Err(Error::OddDimensions { width, height });
        }
        if !(8..=16).contains(&bit_depth) {
            return Err(Error::BitDepthRange { bits: bit_depth });
        }
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                got: (samples.len(), 1),
            });
        }
        let limit = (1u32 << bit_depth) as u64;
        for &s in &samples {
            if u64::from(s) >= limit {
                return Err(Error::SampleRange {
                    value: f64::from(s),
                    bit_depth,
                });
            }
        }
        Ok(Self {
            width,
            height,
            bit_depth,
            phase: CfaPhase::Rggb,
            samples,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        bit_depth: u32,
        mut f: impl FnMut(usize, usize) -> u16,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self::new(width, height, bit_depth, samples)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bit_depth(&self) -> u32 {
        self.bit_depth
    }

    pub fn phase(&self) -> CfaPhase {
        self.phase
    }

    /// Largest representable sample value, `2^bit_depth - 1`.
    pub fn max_value(&self) -> u16 {
        (((1u32 << self.bit_depth) - 1) & 0xffff) as u16
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.samples[y * self.width + x]
    }

    pub fn samples(&self) -> &[u16] {
        &self.samples
    }
}

/// Four quarter-resolution channel planes on the macropixel grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelQuad {
    pub g1: Plane,
    pub g2: Plane,
    pub b: Plane,
    pub r: Plane,
    pub bit_depth: u32,
}

impl ChannelQuad {
    pub fn dims(&self) -> (usize, usize) {
        self.g1.dims()
    }
}

/// Four decorrelated subband planes plus the arithmetic-mode tag.
///
/// `dc_offset` is 0 for in-memory quads; the CLI container adds
/// `2^bit_depth` to Dg/C1/C2 on export so files hold non-negative values.
#[derive(Clone, Debug, PartialEq)]
pub struct SubbandQuad {
    pub y: Plane,
    pub dg: Plane,
    pub c1: Plane,
    pub c2: Plane,
    pub mode: ArithmeticMode,
    pub bit_depth: u32,
    pub dc_offset: i64,
}

impl SubbandQuad {
    pub fn dims(&self) -> (usize, usize) {
        self.y.dims()
    }

    pub fn planes(&self) -> [&Plane; 4] {
        [&self.y, &self.dg, &self.c1, &self.c2]
    }
}

/// Splits a mosaic into its four macropixel channels.
///
/// For macropixel `(i, j)`: `r = m(2j, 2i)`, `g1 = m(2j+1, 2i)`,
/// `g2 = m(2j, 2i+1)`, `b = m(2j+1, 2i+1)`.
pub fn split_mosaic(m: &BayerMosaic) -> ChannelQuad {
    let w = m.width() / 2;
    let h = m.height() / 2;
    let pick = |dx: usize, dy: usize| {
        Plane::from_fn(w, h, |x, y| f64::from(m.get(2 * x + dx, 2 * y + dy)))
    };
    ChannelQuad {
        r: pick(0, 0),
        g1: pick(1, 0),
        g2: pick(0, 1),
        b: pick(1, 1),
        bit_depth: m.bit_depth(),
    }
}

/// Reassembles a mosaic from a channel quad.
///
/// The quad must hold exactly integral values inside `[0, 2^bit_depth)`;
/// anything else signals a non-inverted or corrupted quad and is reported
/// as a range error.
pub fn merge_quad(q: &ChannelQuad) -> Result<BayerMosaic> {
    let (w, h) = q.g1.dims();
    for p in [&q.g1, &q.g2, &q.b, &q.r] {
        if p.dims() != (w, h) {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                got: p.dims(),
            });
        }
    }
    let limit = f64::from(1u32 << q.bit_depth);
    let to_u16 = |v: f64| -> Result<u16> {
        if v.fract() != 0.0 || v < 0.0 || v >= limit {
            return Err(Error::SampleRange {
                value: v,
                bit_depth: q.bit_depth,
            });
        }
        Ok(v as u16)
    };
    let mut samples = vec![0u16; 4 * w * h];
    for y in 0..h {
        for x in 0..w {
            let row0 = 2 * y * (2 * w);
            let row1 = (2 * y + 1) * (2 * w);
            samples[row0 + 2 * x] = to_u16(q.r.get(x, y))?;
            samples[row0 + 2 * x + 1] = to_u16(q.g1.get(x, y))?;
            samples[row1 + 2 * x] = to_u16(q.g2.get(x, y))?;
            samples[row1 + 2 * x + 1] = to_u16(q.b.get(x, y))?;
        }
    }
    BayerMosaic::new(2 * w, 2 * h, q.bit_depth, samples)
}
