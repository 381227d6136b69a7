//! Edge-aware weight computation for the weighted 2-D predict steps.
//!
//! A weighted predict splits its four taps into two directional groups. For
//! each pixel, the weight of a group is driven by the absolute differences
//! *across the other group's taps*, sampled at the nine delays around the
//! pixel and raised to `gamma`: when one direction cuts an edge, its
//! differences are large, and the prediction shifts to the other direction.
//! Weights are never transmitted; the decoder recomputes them from the same
//! (reconstructed) planes.

use crate::error::{Error, Result};
use crate::lifting::{shifted_sample, PlaneTap, WeightRule};
use crate::mosaic::{ArithmeticMode, Plane};

/// The nine weight-accumulation positions around a pixel, in fixed
/// summation order: center, top, left, right, bottom, top-left, top-right,
/// bottom-left, bottom-right.
pub const WEIGHT_DELAYS: [(i32, i32); 9] = [
    (0, 0),
    (0, -1),
    (-1, 0),
    (1, 0),
    (0, 1),
    (-1, -1),
    (1, -1),
    (-1, 1),
    (1, 1),
];

/// Edge-likeness exponent and division guard for weight computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeParams {
    pub gamma: f64,
    pub epsilon: f64,
}

impl EdgeParams {
    pub const DEFAULT_EPSILON: f64 = 1e-8;

    /// gamma = 1 for integer-lossless runs, 1/2 for real-lossy runs.
    pub fn for_mode(mode: ArithmeticMode) -> Self {
        let gamma = match mode {
            ArithmeticMode::Integer => 1.0,
            ArithmeticMode::Real => 0.5,
        };
        Self {
            gamma,
            epsilon: Self::DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParam(format!(
                "gamma must be >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParam(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Orientation of a weighted diagonal predict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagKind {
    /// Prediction from the up-right/down-left diagonal pair (the G1-to-G2
    /// geometry; also used for derived channels with the same delays).
    G1ToG2,
    /// Prediction from the up-left/down-right diagonal pair (B-to-R).
    BToR,
}

/// Orientation of a weighted horizontal-vertical predict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HvKind {
    ToR,
    ToB,
}

/// Per-pixel weights of one edge-aware predict stage. `fraction` is
/// `w1 / (w1 + w2)`, the multiplier of the stage's first tap group.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightField {
    pub w1: Plane,
    pub w2: Plane,
    pub fraction: Plane,
}

impl WeightField {
    pub fn dims(&self) -> (usize, usize) {
        self.fraction.dims()
    }
}

/// `|d|^gamma` with the cheap exact cases pinned so decoder recomputation is
/// bit-reproducible: gamma = 0 gives 1 (including d = 0), gamma = 1 gives
/// `|d|`, gamma = 1/2 uses the correctly rounded square root.
#[inline]
fn edge_pow(d: f64, gamma: f64) -> f64 {
    let a = d.abs();
    if gamma == 0.0 {
        1.0
    } else if gamma == 1.0 {
        a
    } else if gamma == 0.5 {
        a.sqrt()
    } else {
        a.powf(gamma)
    }
}

struct DiffTaps<'a> {
    a: (&'a Plane, i32, i32),
    b: (&'a Plane, i32, i32),
}

impl DiffTaps<'_> {
    #[inline]
    fn diff(&self, x: usize, y: usize, zx: i32, zy: i32) -> f64 {
        let va = shifted_sample(self.a.0, x, y, zx + self.a.1, zy + self.a.2);
        let vb = shifted_sample(self.b.0, x, y, zx + self.b.1, zy + self.b.2);
        va - vb
    }
}

fn field_from_diffs(
    width: usize,
    height: usize,
    d1: &DiffTaps<'_>,
    d2: &DiffTaps<'_>,
    params: &EdgeParams,
) -> WeightField {
    let mut w1 = Plane::new(width, height);
    let mut w2 = Plane::new(width, height);
    let mut fraction = Plane::new(width, height);
    for y in 0..height {
        for x in 0..width {
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for (zx, zy) in WEIGHT_DELAYS {
                s1 += edge_pow(d1.diff(x, y, zx, zy), params.gamma);
                s2 += edge_pow(d2.diff(x, y, zx, zy), params.gamma);
            }
            let v1 = s1 + params.epsilon;
            let v2 = s2 + params.epsilon;
            w1.set(x, y, v1);
            w2.set(x, y, v2);
            fraction.set(x, y, v1 / (v1 + v2));
        }
    }
    WeightField { w1, w2, fraction }
}

/// Weights for a 2-D diagonal predict over a single source plane.
pub fn weight_diag(source: &Plane, kind: DiagKind, params: &EdgeParams) -> WeightField {
    let (d1, d2) = match kind {
        // W1 pairs with {center, down-left}; its differences run across the
        // other pair {left, down}.
        DiagKind::G1ToG2 => ([(-1, 0), (0, 1)], [(0, 0), (-1, 1)]),
        DiagKind::BToR => ([(-1, 0), (0, -1)], [(0, 0), (-1, -1)]),
    };
    let (w, h) = source.dims();
    field_from_diffs(
        w,
        h,
        &DiffTaps {
            a: (source, d1[0].0, d1[0].1),
            b: (source, d1[1].0, d1[1].1),
        },
        &DiffTaps {
            a: (source, d2[0].0, d2[0].1),
            b: (source, d2[1].0, d2[1].1),
        },
        params,
    )
}

/// Weights for a 2-D horizontal-vertical predict from the two green planes.
/// `W1` (vertical differences of one green) weights the horizontal branch;
/// `W2` (horizontal differences of the other) weights the vertical branch.
pub fn weight_hv(g1: &Plane, g2: &Plane, kind: HvKind, params: &EdgeParams) -> Result<WeightField> {
    if g1.dims() != g2.dims() {
        return Err(Error::DimensionMismatch {
            expected: g1.dims(),
            got: g2.dims(),
        });
    }
    let (w, h) = g1.dims();
    let (d1, d2) = match kind {
        HvKind::ToR => (
            DiffTaps {
                a: (g2, 0, 0),
                b: (g2, 0, -1),
            },
            DiffTaps {
                a: (g1, 0, 0),
                b: (g1, -1, 0),
            },
        ),
        HvKind::ToB => (
            DiffTaps {
                a: (g1, 0, 0),
                b: (g1, 0, 1),
            },
            DiffTaps {
                a: (g2, 0, 0),
                b: (g2, 1, 0),
            },
        ),
    };
    Ok(field_from_diffs(w, h, &d1, &d2, params))
}

/// Evaluates the weight field demanded by a stage's [`WeightRule`] from the
/// current state of the channel planes.
pub fn weight_field_for_rule(
    planes: &[Plane; 4],
    rule: &WeightRule,
    params: &EdgeParams,
) -> WeightField {
    let tap = |t: &PlaneTap| (&planes[t.slot], t.dx, t.dy);
    let (w, h) = planes[rule.diff1[0].slot].dims();
    field_from_diffs(
        w,
        h,
        &DiffTaps {
            a: tap(&rule.diff1[0]),
            b: tap(&rule.diff1[1]),
        },
        &DiffTaps {
            a: tap(&rule.diff2[0]),
            b: tap(&rule.diff2[1]),
        },
        params,
    )
}

/// Per-pixel split of a weighted predict coefficient: the first tap group
/// carries `p_k * w1 / (w1 + w2)` per tap, the second `p_k * w2 / (w1 + w2)`.
/// The two group weights always sum to `p_k`, so the four-tap stencil keeps
/// total weight `2 * p_k` and still annihilates constants.
pub fn weighted_tap_split(p_k: f64, w1: f64, w2: f64) -> (f64, f64) {
    let s = w1 + w2;
    (p_k * (w1 / s), p_k * (w2 / s))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = EdgeParams::DEFAULT_EPSILON;

    fn params(gamma: f64) -> EdgeParams {
        EdgeParams {
            gamma,
            epsilon: EPS,
        }
    }

    #[test]
    fn constant_plane_gives_neutral_weights() {
        let p = Plane::from_fn(6, 6, |_, _| 42.0);
        for kind in [DiagKind::G1ToG2, DiagKind::BToR] {
            let f = weight_diag(&p, kind, &params(1.0));
            assert!(f.w1.values().all(|v| v == EPS));
            assert!(f.w2.values().all(|v| v == EPS));
            assert!(f.fraction.values().all(|v| v == 0.5));
        }
    }

    #[test]
    fn gamma_zero_is_exactly_half() {
        let p = Plane::from_fn(5, 5, |x, y| (3 * x + 17 * y) as f64);
        let f = weight_diag(&p, DiagKind::G1ToG2, &params(0.0));
        assert!(f.w1.values().all(|v| v == 9.0 + EPS));
        assert!(f.fraction.values().all(|v| v == 0.5));
        let g = weight_hv(&p, &p, HvKind::ToR, &params(0.0)).unwrap();
        assert!(g.fraction.values().all(|v| v == 0.5));
    }

    #[test]
    fn ramp_across_diagonal_concentrates_weight() {
        // v = x + y is constant along the up-right diagonal and increases
        // across it. Nine-term hand summation at the center pixel:
        // each W1 difference is |(x-1+y) - (x+y+1)| = 2, each W2 difference
        // |(x+y) - (x-1+y+1)| = 0, so W1 = 18 + eps and W2 = eps.
        let p = Plane::from_fn(5, 5, |x, y| (x + y) as f64);
        let f = weight_diag(&p, DiagKind::G1ToG2, &params(1.0));
        assert_eq!(f.w1.get(2, 2), 18.0 + EPS);
        assert_eq!(f.w2.get(2, 2), EPS);
        let expect = (18.0 + EPS) / (18.0 + 2.0 * EPS);
        assert_eq!(f.fraction.get(2, 2), expect);
        assert!(f.fraction.get(2, 2) > 0.999);
    }

    #[test]
    fn main_diagonal_ramp_for_b_to_r() {
        // v = x - y is constant along the down-right diagonal; the BToR
        // pair {center, up-left} should take all the weight.
        let p = Plane::from_fn(7, 7, |x, y| (10 + x) as f64 - y as f64);
        let f = weight_diag(&p, DiagKind::BToR, &params(1.0));
        assert_eq!(f.w2.get(3, 3), EPS);
        assert!(f.fraction.get(3, 3) > 0.999);
    }

    #[test]
    fn horizontal_stripes_favor_horizontal_branch() {
        // Two-row stripes vary only along y: vertical differences of g2 are
        // large, so W1 (the horizontal branch) dominates for ToR.
        let amp = 64.0;
        let g2 = Plane::from_fn(6, 6, |_, y| if y % 2 == 1 { amp } else { 0.0 });
        let g1 = Plane::from_fn(6, 6, |_, _| 100.0);
        let f = weight_hv(&g1, &g2, HvKind::ToR, &params(1.0)).unwrap();
        assert_eq!(f.w1.get(3, 3), 9.0 * amp + EPS);
        assert_eq!(f.w2.get(3, 3), EPS);
        assert!(f.fraction.get(3, 3) > 0.999);
    }

    #[test]
    fn hv_dimension_mismatch_rejected() {
        let a = Plane::new(4, 4);
        let b = Plane::new(4, 6);
        assert!(weight_hv(&a, &b, HvKind::ToB, &params(1.0)).is_err());
    }

    #[test]
    fn fraction_always_strictly_inside_unit_interval() {
        let p = Plane::from_fn(8, 8, |x, y| ((x * 31 + y * 57) % 97) as f64);
        for gamma in [0.0, 0.5, 1.0, 2.0] {
            let f = weight_diag(&p, DiagKind::G1ToG2, &params(gamma));
            for v in f.fraction.values() {
                assert!(v > 0.0 && v < 1.0);
            }
        }
    }

    #[test]
    fn recomputation_is_bit_identical() {
        let p = Plane::from_fn(9, 7, |x, y| ((x * 13 + y * 29) % 61) as f64);
        let a = weight_diag(&p, DiagKind::BToR, &params(1.0));
        let b = weight_diag(&p, DiagKind::BToR, &params(1.0));
        assert_eq!(a, b);
    }

    #[test]
    fn tap_split_limits() {
        // Equal weights reproduce the unweighted four-tap stencil (p/2 per
        // tap); a vanishing W2 collapses onto the first pair with p per tap.
        let p = -0.5;
        let (a, b) = weighted_tap_split(p, 1.0, 1.0);
        assert_eq!((a, b), (p / 2.0, p / 2.0));
        let (a, b) = weighted_tap_split(p, 1.0, EPS);
        assert!((a - p).abs() < 1e-7 && b.abs() < 1e-7);
        // Group weights always sum to p_k.
        let (a, b) = weighted_tap_split(p, 3.7, 0.9);
        assert!((a + b - p).abs() < 1e-15);
    }
}
