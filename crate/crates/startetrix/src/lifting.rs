//! Lifting-step primitives: boundary-extended sampling, predict/update
//! stages over the four channel planes, and DC-matrix evaluation.
//!
//! A stage adds `round(coeff * T)` to its target plane, where `T` is the sum
//! of the source taps (grouped; see [`LiftingStage::groups`]) and `round` is
//! a single floor in integer mode. Inverting a stage subtracts the identical
//! quantity, which is what makes every composition exactly reversible.

use crate::edge::WeightField;
use crate::error::{Error, Result};
use crate::mosaic::Plane;

/// Whole-sample symmetric reflection: index -1 maps to 1, index `n` to
/// `n - 2`. Length-1 axes clamp to 0.
pub(crate) fn reflect_index(i: i64, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as i64) - 2;
    let mut m = i.rem_euclid(period);
    if m >= n as i64 {
        m = period - m;
    }
    m as usize
}

/// Reads `plane[y + dy][x + dx]` with whole-sample symmetric extension at
/// the borders. Total function: any offset is valid.
#[inline]
pub fn shifted_sample(plane: &Plane, x: usize, y: usize, dx: i32, dy: i32) -> f64 {
    let sx = reflect_index(x as i64 + i64::from(dx), plane.width());
    let sy = reflect_index(y as i64 + i64::from(dy), plane.height());
    plane.get(sx, sy)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageRole {
    Predict,
    Update,
}

/// Rounding applied to a stage's whole increment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// `sign(coeff) * floor(|coeff| * T)`: the floor wraps the magnitude of
    /// the combination, with the lifting sign outside.
    Floor,
    /// Plain `coeff * T`.
    None,
}

/// One tap into a channel plane at a macropixel offset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaneTap {
    pub slot: usize,
    pub dx: i32,
    pub dy: i32,
}

/// Unit-weight taps into one source channel. A stage sums each group
/// separately and then combines the group subtotals, so weighted and
/// unweighted evaluation agree bit-for-bit when the weights are neutral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapGroup {
    pub slot: usize,
    pub taps: Vec<(i32, i32)>,
}

impl TapGroup {
    fn sum(&self, planes: &[Plane; 4], x: usize, y: usize) -> f64 {
        let p = &planes[self.slot];
        let mut t = 0.0;
        for &(dx, dy) in &self.taps {
            t += shifted_sample(p, x, y, dx, dy);
        }
        t
    }
}

/// Orientation tag for an edge-aware weight rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Diag(crate::edge::DiagKind),
    Hv(crate::edge::HvKind),
}

/// Edge-aware weighting attached to a two-group predict stage.
///
/// `diff1` holds the tap pair whose absolute difference (evaluated at the
/// nine delays around each pixel) accumulates into `W1`; `diff2` likewise
/// for `W2`. `W1` weights the stage's first tap group, `W2` the second:
/// each weight is driven by the differences *across the other group's
/// taps*, so prediction concentrates on the direction that looks smooth.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightRule {
    pub kind: WeightKind,
    pub diff1: [PlaneTap; 2],
    pub diff2: [PlaneTap; 2],
}

/// One lifting stage over the channel slots (0 = G1, 1 = G2, 2 = B, 3 = R).
#[derive(Clone, Debug, PartialEq)]
pub struct LiftingStage {
    pub role: StageRole,
    pub target: usize,
    pub coeff: f64,
    pub groups: Vec<TapGroup>,
    pub rounding: Rounding,
    pub weight: Option<WeightRule>,
}

impl LiftingStage {
    /// A predict stage never reads its own target; an update reads only
    /// channels already written by the paired predict.
    pub fn reads_target(&self) -> bool {
        self.groups.iter().any(|g| g.slot == self.target)
    }
}

fn stage_increments(
    planes: &[Plane; 4],
    stage: &LiftingStage,
    field: Option<&WeightField>,
) -> Result<Vec<f64>> {
    let (w, h) = planes[stage.target].dims();
    if stage.weight.is_some() != field.is_some() {
        return Err(Error::SpecMismatch(
            "weight field presence does not match stage weighting".into(),
        ));
    }
    if let Some(f) = field {
        if f.fraction.dims() != (w, h) {
            return Err(Error::DimensionMismatch {
                expected: (w, h),
                got: f.fraction.dims(),
            });
        }
        if stage.groups.len() != 2 {
            return Err(Error::SpecMismatch(
                "weighted stage requires exactly two tap groups".into(),
            ));
        }
    }
    let sign = if stage.coeff < 0.0 { -1.0 } else { 1.0 };
    let mag = stage.coeff.abs();
    let mut inc = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let t = match field {
                Some(f) => {
                    let fr = f.fraction.get(x, y);
                    let s1 = stage.groups[0].sum(planes, x, y);
                    let s2 = stage.groups[1].sum(planes, x, y);
                    // 2*fr and 2*(1-fr) are exact scalings, so fr == 1/2
                    // reproduces the unweighted sum bit-for-bit.
                    (2.0 * fr) * s1 + (2.0 * (1.0 - fr)) * s2
                }
                None => {
                    let mut t = 0.0;
                    for g in &stage.groups {
                        t += g.sum(planes, x, y);
                    }
                    t
                }
            };
            let v = match stage.rounding {
                Rounding::Floor => sign * (mag * t).floor(),
                Rounding::None => stage.coeff * t,
            };
            inc.push(v);
        }
    }
    Ok(inc)
}

/// Adds the stage's rounded increment to its target channel. All other
/// channels are untouched.
pub fn apply_stage(
    planes: &mut [Plane; 4],
    stage: &LiftingStage,
    field: Option<&WeightField>,
) -> Result<()> {
    let inc = stage_increments(planes, stage, field)?;
    add_to_target(planes, stage.target, &inc, 1.0);
    Ok(())
}

/// Subtracts the identical increment, undoing [`apply_stage`] bit-exactly in
/// integer mode.
pub fn invert_stage(
    planes: &mut [Plane; 4],
    stage: &LiftingStage,
    field: Option<&WeightField>,
) -> Result<()> {
    let inc = stage_increments(planes, stage, field)?;
    add_to_target(planes, stage.target, &inc, -1.0);
    Ok(())
}

fn add_to_target(planes: &mut [Plane; 4], target: usize, inc: &[f64], s: f64) {
    let (w, h) = planes[target].dims();
    let mut k = 0;
    for y in 0..h {
        for x in 0..w {
            let v = planes[target].get(x, y) + s * inc[k];
            planes[target].set(x, y, v);
            k += 1;
        }
    }
}

/// Composes the stages as a linear operator with every delay set to identity
/// and rounding disabled, in channel-slot space (G1, G2, B, R).
///
/// Weighted stages contribute their neutral (half/half) tap sums, which at
/// DC equal the unweighted ones.
pub fn dc_matrix(stages: &[LiftingStage]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for stage in stages {
        let mut a = [[0.0; 4]; 4];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        for g in &stage.groups {
            a[stage.target][g.slot] += stage.coeff * g.taps.len() as f64;
        }
        let mut out = [[0.0; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    acc += a[r][k] * m[k][c];
                }
                out[r][c] = acc;
            }
        }
        m = out;
    }
    m
}
