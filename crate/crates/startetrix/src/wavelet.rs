//! Wavelet lifting coefficients.

use crate::error::{Error, Result};

/// One predict/update coefficient pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftPair {
    pub p: f64,
    pub u: f64,
}

/// Haar realized as a single-tap in-macropixel pair; 5/3 as one spatial
/// pair (p0 = -1/2, u0 = 1/4).
const HAAR: [LiftPair; 1] = [LiftPair { p: -1.0, u: 0.5 }];
const FIVE_THREE: [LiftPair; 1] = [LiftPair { p: -0.5, u: 0.25 }];
const NINE_SEVEN: [LiftPair; 2] = [
    LiftPair {
        p: -1.58613434205992,
        u: -0.05298011857295,
    },
    LiftPair {
        p: 0.882911075530940,
        u: 0.443506852043967,
    },
];

/// Supported wavelets for the lifting steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Wavelet {
    Haar,
    FiveThree,
    NineSeven,
}

impl Wavelet {
    /// Predict/update pairs, first-executed pair first.
    pub fn pairs(self) -> &'static [LiftPair] {
        match self {
            Self::Haar => &HAAR,
            Self::FiveThree => &FIVE_THREE,
            Self::NineSeven => &NINE_SEVEN,
        }
    }

    /// Haar predicts and updates inside the macropixel only; 5/3 and 9/7
    /// reach into neighboring macropixels.
    pub fn has_spatial_taps(self) -> bool {
        !matches!(self, Self::Haar)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::FiveThree => "5/3",
            Self::NineSeven => "9/7",
        }
    }

    pub const ALL: [Wavelet; 3] = [Wavelet::Haar, Wavelet::FiveThree, Wavelet::NineSeven];
}

impl std::str::FromStr for Wavelet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(Self::Haar),
            "5/3" | "53" => Ok(Self::FiveThree),
            "9/7" | "97" => Ok(Self::NineSeven),
            other => Err(Error::InvalidParam(format!("unknown wavelet `{other}`"))),
        }
    }
}
