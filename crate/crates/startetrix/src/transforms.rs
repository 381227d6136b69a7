//! Transform catalog and execution: the three wavelet spectral-spatial
//! families (YDgCbCr, YDgCoCg, YDgCoCg2), the two extended Star-Tetrix
//! families (type I and II), forward and inverse runs, and the direct
//! Star-Tetrix reference implementation used for cross-validation.
//!
//! Each family is a fixed composition of lifting blocks and channel
//! permutations. Permutations are folded into channel indices at build
//! time, so the stage list operates directly on the four channel slots
//! (0 = G1, 1 = G2, 2 = B, 3 = R) with no data movement.

use crate::edge::{weight_field_for_rule, DiagKind, EdgeParams, HvKind};
use crate::error::{Error, Result};
use crate::lifting::{
    self, LiftingStage, PlaneTap, Rounding, StageRole, TapGroup, WeightKind, WeightRule,
};
use crate::mosaic::{
    merge_quad, split_mosaic, ArithmeticMode, BayerMosaic, ChannelQuad, Plane, SubbandQuad,
};
use crate::wavelet::{LiftPair, Wavelet};

/// Transform family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Luma / green-difference / blue, red chroma.
    YDgCbCr,
    /// Luma / green-difference / orange, green chroma.
    YDgCoCg,
    /// Variant of [`Family::YDgCoCg`] built from axis-aligned pairings.
    YDgCoCg2,
    /// Extended Star-Tetrix, type I. With the 5/3 wavelet this is the
    /// Star-Tetrix transform itself.
    XsttI,
    /// Extended Star-Tetrix, type II: the first update row is dropped, so
    /// only the luma channel receives the final chroma update.
    XsttII,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Self::YDgCbCr => "ydgcbcr",
            Self::YDgCoCg => "ydgcocg",
            Self::YDgCoCg2 => "ydgcocg2",
            Self::XsttI => "xstt1",
            Self::XsttII => "xstt2",
        }
    }

    pub const ALL: [Family; 5] = [
        Family::YDgCbCr,
        Family::YDgCoCg,
        Family::YDgCoCg2,
        Family::XsttI,
        Family::XsttII,
    ];
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ydgcbcr" => Ok(Self::YDgCbCr),
            "ydgcocg" => Ok(Self::YDgCoCg),
            "ydgcocg2" => Ok(Self::YDgCoCg2),
            "xstt1" | "xstt-i" => Ok(Self::XsttI),
            "xstt2" | "xstt-ii" => Ok(Self::XsttII),
            other => Err(Error::InvalidParam(format!("unknown family `{other}`"))),
        }
    }
}

/// Family, wavelet, edge-aware parameters and arithmetic mode. Fully
/// determines the forward and inverse transforms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformSpec {
    pub family: Family,
    pub wavelet: Wavelet,
    pub edge_aware: bool,
    pub gamma: f64,
    pub epsilon: f64,
    pub mode: ArithmeticMode,
}

impl TransformSpec {
    /// A plain (non-edge-aware) spec with the default gamma for the mode
    /// (1 for integer-lossless, 1/2 for real-lossy) and epsilon = 1e-8.
    pub fn new(family: Family, wavelet: Wavelet, mode: ArithmeticMode) -> Self {
        let edge = EdgeParams::for_mode(mode);
        Self {
            family,
            wavelet,
            edge_aware: false,
            gamma: edge.gamma,
            epsilon: edge.epsilon,
            mode,
        }
    }

    pub fn with_edge_aware(mut self, on: bool) -> Self {
        self.edge_aware = on;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn edge_params(&self) -> EdgeParams {
        EdgeParams {
            gamma: self.gamma,
            epsilon: self.epsilon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.edge_params().validate()
    }

    /// Short human-readable tag, e.g. `xstt1:5/3+edge`.
    pub fn label(&self) -> String {
        format!(
            "{}:{}{}",
            self.family,
            self.wavelet.name(),
            if self.edge_aware { "+edge" } else { "" }
        )
    }
}

/// Encoder- or decoder-side record of the weight fractions used by each
/// edge-aware stage, in forward stage order. Never needed for decoding;
/// kept for divergence analysis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WeightLog {
    pub fractions: Vec<Plane>,
}

impl WeightLog {
    pub fn len(&self) -> usize {
        self.fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fractions.is_empty()
    }
}

/// Ordered stage list plus the map from output position (Y, Dg, C1, C2) to
/// channel slot.
#[derive(Clone, Debug, PartialEq)]
pub struct StagePlan {
    pub stages: Vec<LiftingStage>,
    pub output_map: [usize; 4],
}

#[derive(Clone, Copy, Debug)]
enum Delay {
    Z1,
    Z1Inv,
    Z2,
    Z2Inv,
}

impl Delay {
    /// Macropixel offset of the delay: z1 is left, z2 is up.
    fn off(self) -> (i32, i32) {
        match self {
            Self::Z1 => (-1, 0),
            Self::Z1Inv => (1, 0),
            Self::Z2 => (0, -1),
            Self::Z2Inv => (0, 1),
        }
    }

    fn inv(self) -> Self {
        match self {
            Self::Z1 => Self::Z1Inv,
            Self::Z1Inv => Self::Z1,
            Self::Z2 => Self::Z2Inv,
            Self::Z2Inv => Self::Z2,
        }
    }
}

struct Builder {
    stages: Vec<LiftingStage>,
    perm: [usize; 4],
    edge: bool,
    mode: ArithmeticMode,
}

impl Builder {
    fn new(edge: bool, mode: ArithmeticMode) -> Self {
        Self {
            stages: Vec::new(),
            perm: [0, 1, 2, 3],
            edge,
            mode,
        }
    }

    /// 5/3 steps keep their floor in both modes; Haar and 9/7 steps drop it
    /// in real-lossy mode.
    fn rounding(&self, w: Wavelet) -> Rounding {
        match (self.mode, w) {
            (ArithmeticMode::Integer, _) => Rounding::Floor,
            (ArithmeticMode::Real, Wavelet::FiveThree) => Rounding::Floor,
            (ArithmeticMode::Real, _) => Rounding::None,
        }
    }

    /// Applies a permutation matrix given as `cols[r]` = the input position
    /// feeding output position `r`.
    fn permute(&mut self, cols: [usize; 4]) {
        let old = self.perm;
        for (r, &c) in cols.iter().enumerate() {
            self.perm[r] = old[c];
        }
    }

    fn push(
        &mut self,
        role: StageRole,
        target: usize,
        coeff: f64,
        groups: Vec<TapGroup>,
        rounding: Rounding,
        weight: Option<WeightRule>,
    ) {
        self.stages.push(LiftingStage {
            role,
            target,
            coeff,
            groups,
            rounding,
            weight,
        });
    }

    /// One-dimensional wavelet on positions (a, b): predict b from a along
    /// the delay, then update a.
    fn dwt2_1d(&mut self, a: usize, b: usize, d: Delay, w: Wavelet) {
        let (sa, sb) = (self.perm[a], self.perm[b]);
        let r = self.rounding(w);
        for pair in w.pairs() {
            let ptaps = if w.has_spatial_taps() {
                vec![(0, 0), d.inv().off()]
            } else {
                vec![(0, 0)]
            };
            self.push(
                StageRole::Predict,
                sb,
                pair.p,
                vec![TapGroup {
                    slot: sa,
                    taps: ptaps,
                }],
                r,
                None,
            );
            let utaps = if w.has_spatial_taps() {
                vec![(0, 0), d.off()]
            } else {
                vec![(0, 0)]
            };
            self.push(
                StageRole::Update,
                sa,
                pair.u,
                vec![TapGroup {
                    slot: sb,
                    taps: utaps,
                }],
                r,
                None,
            );
        }
    }

    /// Two-dimensional diagonal wavelet on positions (a, b). The predict
    /// taps are grouped into the {center, far-diagonal} pair and the
    /// {d1, d2} pair; the edge-aware weights favor whichever pair the image
    /// looks smooth across.
    fn dwt2_2d(&mut self, a: usize, b: usize, d1: Delay, d2: Delay, w: Wavelet, kind: DiagKind) {
        let (sa, sb) = (self.perm[a], self.perm[b]);
        let r = self.rounding(w);
        for pair in w.pairs() {
            if w.has_spatial_taps() {
                let i1 = d1.inv().off();
                let i2 = d2.inv().off();
                let far = (i1.0 + i2.0, i1.1 + i2.1);
                let weight = self.edge.then(|| WeightRule {
                    kind: WeightKind::Diag(kind),
                    diff1: [
                        PlaneTap {
                            slot: sa,
                            dx: i1.0,
                            dy: i1.1,
                        },
                        PlaneTap {
                            slot: sa,
                            dx: i2.0,
                            dy: i2.1,
                        },
                    ],
                    diff2: [
                        PlaneTap {
                            slot: sa,
                            dx: 0,
                            dy: 0,
                        },
                        PlaneTap {
                            slot: sa,
                            dx: far.0,
                            dy: far.1,
                        },
                    ],
                });
                self.push(
                    StageRole::Predict,
                    sb,
                    pair.p / 2.0,
                    vec![
                        TapGroup {
                            slot: sa,
                            taps: vec![(0, 0), far],
                        },
                        TapGroup {
                            slot: sa,
                            taps: vec![i1, i2],
                        },
                    ],
                    r,
                    weight,
                );
                let o1 = d1.off();
                let o2 = d2.off();
                let faru = (o1.0 + o2.0, o1.1 + o2.1);
                self.push(
                    StageRole::Update,
                    sa,
                    pair.u / 2.0,
                    vec![
                        TapGroup {
                            slot: sb,
                            taps: vec![(0, 0), faru],
                        },
                        TapGroup {
                            slot: sb,
                            taps: vec![o1, o2],
                        },
                    ],
                    r,
                    None,
                );
            } else {
                self.push(
                    StageRole::Predict,
                    sb,
                    pair.p,
                    vec![TapGroup {
                        slot: sa,
                        taps: vec![(0, 0)],
                    }],
                    r,
                    None,
                );
                self.push(
                    StageRole::Update,
                    sa,
                    pair.u,
                    vec![TapGroup {
                        slot: sb,
                        taps: vec![(0, 0)],
                    }],
                    r,
                    None,
                );
            }
        }
    }

    /// Star-Tetrix chroma predict: B and R each receive half the combined
    /// horizontal and vertical green predictions. Group 1 is always the
    /// horizontal branch (the one `W1` weights).
    fn star_predict(&mut self, pair: LiftPair, w: Wavelet) {
        let r = self.rounding(w);
        let spatial = w.has_spatial_taps();
        let (g1, g2, b, rr) = (self.perm[0], self.perm[1], self.perm[2], self.perm[3]);
        // B row: horizontal branch reads G2 {center, right}, vertical branch
        // reads G1 {center, below}.
        let (groups_b, weight_b): (Vec<TapGroup>, Option<WeightRule>) = if spatial {
            (
                vec![
                    TapGroup {
                        slot: g2,
                        taps: vec![(0, 0), (1, 0)],
                    },
                    TapGroup {
                        slot: g1,
                        taps: vec![(0, 0), (0, 1)],
                    },
                ],
                self.edge.then(|| WeightRule {
                    kind: WeightKind::Hv(HvKind::ToB),
                    diff1: [
                        PlaneTap {
                            slot: g1,
                            dx: 0,
                            dy: 0,
                        },
                        PlaneTap {
                            slot: g1,
                            dx: 0,
                            dy: 1,
                        },
                    ],
                    diff2: [
                        PlaneTap {
                            slot: g2,
                            dx: 0,
                            dy: 0,
                        },
                        PlaneTap {
                            slot: g2,
                            dx: 1,
                            dy: 0,
                        },
                    ],
                }),
            )
        } else {
            (
                vec![
                    TapGroup {
                        slot: g2,
                        taps: vec![(0, 0)],
                    },
                    TapGroup {
                        slot: g1,
                        taps: vec![(0, 0)],
                    },
                ],
                None,
            )
        };
        self.push(StageRole::Predict, b, pair.p / 2.0, groups_b, r, weight_b);
        // R row: horizontal branch reads G1 {center, left}, vertical branch
        // reads G2 {center, above}.
        let (groups_r, weight_r): (Vec<TapGroup>, Option<WeightRule>) = if spatial {
            (
                vec![
                    TapGroup {
                        slot: g1,
                        taps: vec![(0, 0), (-1, 0)],
                    },
                    TapGroup {
                        slot: g2,
                        taps: vec![(0, 0), (0, -1)],
                    },
                ],
                self.edge.then(|| WeightRule {
                    kind: WeightKind::Hv(HvKind::ToR),
                    diff1: [
                        PlaneTap {
                            slot: g2,
                            dx: 0,
                            dy: 0,
                        },
                        PlaneTap {
                            slot: g2,
                            dx: 0,
                            dy: -1,
                        },
                    ],
                    diff2: [
                        PlaneTap {
                            slot: g1,
                            dx: 0,
                            dy: 0,
                        },
                        PlaneTap {
                            slot: g1,
                            dx: -1,
                            dy: 0,
                        },
                    ],
                }),
            )
        } else {
            (
                vec![
                    TapGroup {
                        slot: g1,
                        taps: vec![(0, 0)],
                    },
                    TapGroup {
                        slot: g2,
                        taps: vec![(0, 0)],
                    },
                ],
                None,
            )
        };
        self.push(StageRole::Predict, rr, pair.p / 2.0, groups_r, r, weight_r);
    }

    /// Star-Tetrix green update from the chroma residuals. `rows` selects
    /// which green rows to emit: the type-II variant drops the G2 row.
    fn star_update(&mut self, pair: LiftPair, w: Wavelet, update_g2: bool) {
        let r = self.rounding(w);
        let spatial = w.has_spatial_taps();
        let (g1, g2, b, rr) = (self.perm[0], self.perm[1], self.perm[2], self.perm[3]);
        let taps = |t: Vec<(i32, i32)>| if spatial { t } else { vec![(0, 0)] };
        // G1 row: chroma-from-B {center, above}, chroma-from-R {center, right}.
        self.push(
            StageRole::Update,
            g1,
            pair.u / 2.0,
            vec![
                TapGroup {
                    slot: b,
                    taps: taps(vec![(0, 0), (0, -1)]),
                },
                TapGroup {
                    slot: rr,
                    taps: taps(vec![(0, 0), (1, 0)]),
                },
            ],
            r,
            None,
        );
        if update_g2 {
            // G2 row: chroma-from-B {center, left}, chroma-from-R {center, below}.
            self.push(
                StageRole::Update,
                g2,
                pair.u / 2.0,
                vec![
                    TapGroup {
                        slot: b,
                        taps: taps(vec![(0, 0), (-1, 0)]),
                    },
                    TapGroup {
                        slot: rr,
                        taps: taps(vec![(0, 0), (0, 1)]),
                    },
                ],
                r,
                None,
            );
        }
    }

    /// Three-channel wavelet on positions (a, b, c): predict b and c from a
    /// along separate delays, then update a from both residuals at half
    /// weight.
    fn dwt3(&mut self, a: usize, b: usize, c: usize, d1: Delay, d2: Delay, w: Wavelet) {
        let (sa, sb, sc) = (self.perm[a], self.perm[b], self.perm[c]);
        let r = self.rounding(w);
        let spatial = w.has_spatial_taps();
        let taps = |t: Vec<(i32, i32)>| if spatial { t } else { vec![(0, 0)] };
        for pair in w.pairs() {
            self.push(
                StageRole::Predict,
                sb,
                pair.p,
                vec![TapGroup {
                    slot: sa,
                    taps: taps(vec![(0, 0), d1.inv().off()]),
                }],
                r,
                None,
            );
            self.push(
                StageRole::Predict,
                sc,
                pair.p,
                vec![TapGroup {
                    slot: sa,
                    taps: taps(vec![(0, 0), d2.inv().off()]),
                }],
                r,
                None,
            );
            self.push(
                StageRole::Update,
                sa,
                pair.u / 2.0,
                vec![
                    TapGroup {
                        slot: sb,
                        taps: taps(vec![(0, 0), d1.off()]),
                    },
                    TapGroup {
                        slot: sc,
                        taps: taps(vec![(0, 0), d2.off()]),
                    },
                ],
                r,
                None,
            );
        }
    }
}

/// Builds the ordered stage list realizing the spec's family, with
/// permutations folded into channel indices.
pub fn build_stages(spec: &TransformSpec) -> Result<StagePlan> {
    spec.validate()?;
    let w = spec.wavelet;
    let edge = spec.edge_aware;
    let mut b = Builder::new(edge, spec.mode);
    match spec.family {
        Family::XsttI => {
            for pair in w.pairs() {
                b.star_predict(*pair, w);
                b.star_update(*pair, w, true);
            }
            b.dwt2_2d(0, 1, Delay::Z1Inv, Delay::Z2, w, DiagKind::G1ToG2);
        }
        Family::XsttII => {
            // Wavelets with more than one lifting pair only fit the middle
            // step; the single predict/update bookends fall back to 5/3 and
            // keep its rounding in both modes.
            let ends = if w.pairs().len() > 1 {
                Wavelet::FiveThree
            } else {
                w
            };
            let pair = ends.pairs()[0];
            b.star_predict(pair, ends);
            b.dwt2_2d(0, 1, Delay::Z1Inv, Delay::Z2, w, DiagKind::G1ToG2);
            b.star_update(pair, ends, false);
        }
        Family::YDgCbCr => {
            b.dwt2_2d(0, 1, Delay::Z1Inv, Delay::Z2, w, DiagKind::G1ToG2);
            b.permute([1, 0, 2, 3]);
            b.dwt3(1, 2, 3, Delay::Z1Inv, Delay::Z2, w);
            b.permute([1, 0, 2, 3]);
        }
        Family::YDgCoCg => {
            b.dwt2_2d(0, 1, Delay::Z1Inv, Delay::Z2, w, DiagKind::G1ToG2);
            b.dwt2_2d(2, 3, Delay::Z1Inv, Delay::Z2Inv, w, DiagKind::BToR);
            b.permute([2, 0, 1, 3]);
            b.dwt2_1d(0, 1, Delay::Z2Inv, w);
            b.permute([0, 2, 3, 1]);
        }
        Family::YDgCoCg2 => {
            b.permute([0, 2, 3, 1]);
            b.dwt2_1d(0, 1, Delay::Z2, w);
            b.dwt2_1d(2, 3, Delay::Z2, w);
            b.permute([2, 0, 3, 1]);
            b.dwt2_1d(0, 1, Delay::Z1, w);
            b.dwt2_1d(2, 3, Delay::Z1, w);
            b.permute([1, 2, 0, 3]);
            b.dwt2_2d(0, 1, Delay::Z1Inv, Delay::Z2, w, DiagKind::G1ToG2);
            b.permute([2, 1, 0, 3]);
        }
    }
    Ok(StagePlan {
        stages: b.stages,
        output_map: b.perm,
    })
}

fn run_forward(
    planes: &mut [Plane; 4],
    plan: &StagePlan,
    params: &EdgeParams,
) -> Result<WeightLog> {
    let mut log = WeightLog::default();
    for stage in &plan.stages {
        match &stage.weight {
            Some(rule) => {
                let field = weight_field_for_rule(planes, rule, params);
                lifting::apply_stage(planes, stage, Some(&field))?;
                log.fractions.push(field.fraction);
            }
            None => lifting::apply_stage(planes, stage, None)?,
        }
    }
    Ok(log)
}

fn run_inverse(
    planes: &mut [Plane; 4],
    plan: &StagePlan,
    params: &EdgeParams,
) -> Result<WeightLog> {
    let mut log = WeightLog::default();
    for stage in plan.stages.iter().rev() {
        match &stage.weight {
            Some(rule) => {
                // All later stages are already undone and a predict never
                // writes its sources, so these planes match the encoder's
                // pre-stage state exactly in lossless runs.
                let field = weight_field_for_rule(planes, rule, params);
                lifting::invert_stage(planes, stage, Some(&field))?;
                log.fractions.push(field.fraction);
            }
            None => lifting::invert_stage(planes, stage, None)?,
        }
    }
    log.fractions.reverse();
    Ok(log)
}

/// Runs the forward transform: split into channels, execute the stage list
/// (computing weight fields just in time from the current predictor sources
/// when edge-aware), and collect the subbands.
///
/// The returned [`WeightLog`] is encoder-side bookkeeping for divergence
/// analysis; decoding never needs it.
pub fn forward(m: &BayerMosaic, spec: &TransformSpec) -> Result<(SubbandQuad, WeightLog)> {
    let plan = build_stages(spec)?;
    let quad = split_mosaic(m);
    let mut planes = [quad.g1, quad.g2, quad.b, quad.r];
    let log = run_forward(&mut planes, &plan, &spec.edge_params())?;
    let sub = SubbandQuad {
        y: planes[plan.output_map[0]].clone(),
        dg: planes[plan.output_map[1]].clone(),
        c1: planes[plan.output_map[2]].clone(),
        c2: planes[plan.output_map[3]].clone(),
        mode: spec.mode,
        bit_depth: m.bit_depth(),
        dc_offset: 0,
    };
    Ok((sub, log))
}

/// Inverse transform down to the channel quad, plus the decoder-side weight
/// log. Weight fields are recomputed from the reconstructed planes at the
/// mirrored point of the schedule.
pub fn inverse_quad(s: &SubbandQuad, spec: &TransformSpec) -> Result<(ChannelQuad, WeightLog)> {
    if s.mode != spec.mode {
        return Err(Error::SpecMismatch(format!(
            "subband mode {} does not match spec mode {}",
            s.mode.name(),
            spec.mode.name()
        )));
    }
    let dims = s.y.dims();
    for p in s.planes() {
        if p.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: p.dims(),
            });
        }
    }
    let plan = build_stages(spec)?;
    let mut planes = [
        Plane::new(dims.0, dims.1),
        Plane::new(dims.0, dims.1),
        Plane::new(dims.0, dims.1),
        Plane::new(dims.0, dims.1),
    ];
    planes[plan.output_map[0]] = s.y.clone();
    planes[plan.output_map[1]] = s.dg.clone();
    planes[plan.output_map[2]] = s.c1.clone();
    planes[plan.output_map[3]] = s.c2.clone();
    let log = run_inverse(&mut planes, &plan, &spec.edge_params())?;
    let [g1, g2, b, r] = planes;
    Ok((
        ChannelQuad {
            g1,
            g2,
            b,
            r,
            bit_depth: s.bit_depth,
        },
        log,
    ))
}

/// Full inverse back to a mosaic. Integer-lossless runs reproduce the input
/// bit-exactly; real-mode reconstructions are rounded to the nearest sample
/// and clamped to the mosaic's range.
pub fn inverse(s: &SubbandQuad, spec: &TransformSpec) -> Result<BayerMosaic> {
    let (quad, _) = inverse_quad(s, spec)?;
    match spec.mode {
        ArithmeticMode::Integer => merge_quad(&quad),
        ArithmeticMode::Real => {
            let max = f64::from((1u32 << s.bit_depth) - 1);
            let clamp = |p: &Plane| {
                Plane::from_fn(p.width(), p.height(), |x, y| {
                    p.get(x, y).round().clamp(0.0, max)
                })
            };
            merge_quad(&ChannelQuad {
                g1: clamp(&quad.g1),
                g2: clamp(&quad.g2),
                b: clamp(&quad.b),
                r: clamp(&quad.r),
                bit_depth: s.bit_depth,
            })
        }
    }
}

/// Direct Star-Tetrix forward transform, transcribed step by step in integer
/// arithmetic. Serves as the independent reference for the type-I transform
/// with the 5/3 wavelet, which must match it bit-exactly.
pub fn stt_forward_direct(m: &BayerMosaic) -> SubbandQuad {
    let w = m.width() / 2;
    let h = m.height() / 2;
    let reflect = |i: i64, n: usize| -> usize {
        if n == 1 {
            return 0;
        }
        let period = 2 * (n as i64) - 2;
        let mut v = i.rem_euclid(period);
        if v >= n as i64 {
            v = period - v;
        }
        v as usize
    };
    let mut g1 = vec![0i64; w * h];
    let mut g2 = vec![0i64; w * h];
    let mut bb = vec![0i64; w * h];
    let mut rr = vec![0i64; w * h];
    for y in 0..h {
        for x in 0..w {
            rr[y * w + x] = i64::from(m.get(2 * x, 2 * y));
            g1[y * w + x] = i64::from(m.get(2 * x + 1, 2 * y));
            g2[y * w + x] = i64::from(m.get(2 * x, 2 * y + 1));
            bb[y * w + x] = i64::from(m.get(2 * x + 1, 2 * y + 1));
        }
    }
    let at = |p: &[i64], x: i64, y: i64| p[reflect(y, h) * w + reflect(x, w)];

    // Chroma from the four surrounding greens.
    let mut cb = vec![0i64; w * h];
    let mut cr = vec![0i64; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = (y as usize) * w + x as usize;
            let gsum_b = at(&g2, x, y) + at(&g2, x + 1, y) + at(&g1, x, y) + at(&g1, x, y + 1);
            cb[i] = bb[i] - gsum_b.div_euclid(4);
            let gsum_r = at(&g1, x - 1, y) + at(&g1, x, y) + at(&g2, x, y - 1) + at(&g2, x, y);
            cr[i] = rr[i] - gsum_r.div_euclid(4);
        }
    }
    // Luma pair from the four surrounding chroma residuals.
    let mut y1 = vec![0i64; w * h];
    let mut y2 = vec![0i64; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = (y as usize) * w + x as usize;
            let s1 = at(&cr, x, y) + at(&cr, x + 1, y) + at(&cb, x, y - 1) + at(&cb, x, y);
            y1[i] = g1[i] + s1.div_euclid(8);
            let s2 = at(&cb, x - 1, y) + at(&cb, x, y) + at(&cr, x, y) + at(&cr, x, y + 1);
            y2[i] = g2[i] + s2.div_euclid(8);
        }
    }
    // Green difference from the four diagonal lumas, then the final luma
    // update from the four diagonal differences.
    let mut dg = vec![0i64; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = (y as usize) * w + x as usize;
            let s = at(&y1, x, y) + at(&y1, x - 1, y) + at(&y1, x, y + 1) + at(&y1, x - 1, y + 1);
            dg[i] = y2[i] - s.div_euclid(4);
        }
    }
    let mut yy = vec![0i64; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = (y as usize) * w + x as usize;
            let s = at(&dg, x, y) + at(&dg, x + 1, y) + at(&dg, x, y - 1) + at(&dg, x + 1, y - 1);
            yy[i] = y1[i] + s.div_euclid(8);
        }
    }
    let to_plane = |v: Vec<i64>| Plane::from_vec(w, h, v.into_iter().map(|x| x as f64).collect());
    SubbandQuad {
        y: to_plane(yy),
        dg: to_plane(dg),
        c1: to_plane(cb),
        c2: to_plane(cr),
        mode: ArithmeticMode::Integer,
        bit_depth: m.bit_depth(),
        dc_offset: 0,
    }
}

/// The 4x4 linear operator of the spec's stage list with every delay set to
/// identity and rounding disabled. Row order (Y, Dg, C1, C2), column order
/// (G1, G2, B, R).
pub fn dc_matrix(spec: &TransformSpec) -> Result<[[f64; 4]; 4]> {
    let plan = build_stages(spec)?;
    let slots = lifting::dc_matrix(&plan.stages);
    let mut out = [[0.0; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        *row = slots[plan.output_map[r]];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mosaic(rng: &mut ChaCha8Rng, w: usize, h: usize, bd: u32) -> BayerMosaic {
        let max = (1u32 << bd) - 1;
        BayerMosaic::from_fn(w, h, bd, |_, _| rng.gen_range(0..=max) as u16).unwrap()
    }

    fn formula_mosaic() -> BayerMosaic {
        BayerMosaic::from_fn(8, 8, 8, |x, y| ((17 * x + 31 * y + 7 * x * y) % 251) as u16)
            .unwrap()
    }

    fn plane_i64(p: &Plane) -> Vec<i64> {
        p.values().map(|v| v as i64).collect()
    }

    #[test]
    fn stt_direct_matches_frozen_spreadsheet() {
        // Expected subbands computed once by spreadsheet-style integer
        // arithmetic on the formula mosaic and frozen here.
        let s = stt_forward_direct(&formula_mosaic());
        assert_eq!(
            plane_i64(&s.y),
            vec![5, 67, 77, 135, 89, 184, 234, 68, 190, 32, 88, 174, 218, 104, 215, 83]
        );
        assert_eq!(
            plane_i64(&s.dg),
            vec![-54, -2, -2, 89, -18, 75, 110, -58, 27, -115, 3, 58, 69, -45, 112, -43]
        );
        assert_eq!(
            plane_i64(&s.c1),
            vec![0, 0, 0, 87, 0, 63, -125, -24, 63, 0, 0, -136, -150, 52, -122, 21]
        );
        assert_eq!(
            plane_i64(&s.c2),
            vec![-48, -45, -59, -10, -31, 0, 0, 126, 18, 126, -62, 0, 4, -62, 0, -125]
        );
    }

    #[test]
    fn stt_direct_constant_mosaic() {
        let m = BayerMosaic::from_fn(8, 6, 10, |_, _| 345).unwrap();
        let s = stt_forward_direct(&m);
        assert!(s.dg.values().all(|v| v == 0.0));
        assert!(s.c1.values().all(|v| v == 0.0));
        assert!(s.c2.values().all(|v| v == 0.0));
        assert!(s.y.values().all(|v| v == 345.0));
    }

    #[test]
    fn xstt1_53_equals_direct_stt() {
        let spec = TransformSpec::new(Family::XsttI, Wavelet::FiveThree, ArithmeticMode::Integer);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let w = 2 * rng.gen_range(2..=12);
            let h = 2 * rng.gen_range(2..=12);
            let bd = rng.gen_range(8..=14);
            let m = random_mosaic(&mut rng, w, h, bd);
            let (s, _) = forward(&m, &spec).unwrap();
            let d = stt_forward_direct(&m);
            assert_eq!(s.y, d.y);
            assert_eq!(s.dg, d.dg);
            assert_eq!(s.c1, d.c1);
            assert_eq!(s.c2, d.c2);
        }
    }

    #[test]
    fn stage_counts() {
        let count = |family, wavelet| {
            build_stages(&TransformSpec::new(family, wavelet, ArithmeticMode::Integer))
                .unwrap()
                .stages
                .len()
        };
        assert_eq!(count(Family::XsttI, Wavelet::FiveThree), 6);
        assert_eq!(count(Family::XsttII, Wavelet::FiveThree), 5);
        assert_eq!(count(Family::XsttI, Wavelet::NineSeven), 12);
        assert_eq!(count(Family::XsttII, Wavelet::NineSeven), 7);
        assert_eq!(count(Family::YDgCbCr, Wavelet::FiveThree), 5);
    }

    #[test]
    fn xstt1_first_stage_is_chroma_predict() {
        let plan = build_stages(&TransformSpec::new(
            Family::XsttI,
            Wavelet::FiveThree,
            ArithmeticMode::Integer,
        ))
        .unwrap();
        let first = &plan.stages[0];
        assert_eq!(first.role, StageRole::Predict);
        assert_eq!(first.target, 2); // B slot becomes C1
        assert_eq!(first.coeff, -0.25);
        assert_eq!(
            first.groups.iter().map(|g| g.taps.len()).sum::<usize>(),
            4
        );
    }

    /// Independent DC oracle: multiplies the explicit 4x4 factor matrices of
    /// each family (permutations included) with all delays at identity.
    fn dc_oracle(family: Family, w: Wavelet) -> [[f64; 4]; 4] {
        type M = [[f64; 4]; 4];
        const ID: M = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ];
        fn mul(a: M, b: M) -> M {
            let mut out = [[0.0; 4]; 4];
            for r in 0..4 {
                for c in 0..4 {
                    for k in 0..4 {
                        out[r][c] += a[r][k] * b[k][c];
                    }
                }
            }
            out
        }
        fn perm(rows: [usize; 4]) -> M {
            let mut m = [[0.0; 4]; 4];
            for (r, &c) in rows.iter().enumerate() {
                m[r][c] = 1.0;
            }
            m
        }
        fn lift(t: usize, s: usize, v: f64) -> M {
            let mut m = ID;
            m[t][s] = v;
            m
        }
        // DC tap sums: spatial wavelets double each coefficient, Haar keeps it.
        let g = if w.has_spatial_taps() { 2.0 } else { 1.0 };
        let dwt2 = |a: usize, b: usize| -> Vec<M> {
            w.pairs()
                .iter()
                .rev()
                .flat_map(|pr| [lift(a, b, g * pr.u), lift(b, a, g * pr.p)])
                .collect()
        };
        let dwt3 = |a: usize, b: usize, c: usize| -> Vec<M> {
            w.pairs()
                .iter()
                .rev()
                .flat_map(|pr| {
                    let mut up = ID;
                    up[a][b] = g * pr.u / 2.0;
                    up[a][c] = g * pr.u / 2.0;
                    [up, lift(c, a, g * pr.p), lift(b, a, g * pr.p)]
                })
                .collect()
        };
        let star = |pairs: &[LiftPair], wav: Wavelet| -> Vec<M> {
            let gg = if wav.has_spatial_taps() { 2.0 } else { 1.0 };
            pairs
                .iter()
                .rev()
                .flat_map(|pr| {
                    let mut up = ID;
                    up[0][2] = gg * pr.u / 2.0;
                    up[0][3] = gg * pr.u / 2.0;
                    up[1][2] = gg * pr.u / 2.0;
                    up[1][3] = gg * pr.u / 2.0;
                    let mut pd = ID;
                    pd[2][0] = gg * pr.p / 2.0;
                    pd[2][1] = gg * pr.p / 2.0;
                    pd[3][0] = gg * pr.p / 2.0;
                    pd[3][1] = gg * pr.p / 2.0;
                    [up, pd]
                })
                .collect()
        };
        let factors: Vec<M> = match family {
            Family::XsttI => {
                let mut v = dwt2(0, 1);
                v.extend(star(w.pairs(), w));
                v
            }
            Family::XsttII => {
                let ends = if w.pairs().len() > 1 {
                    Wavelet::FiveThree
                } else {
                    w
                };
                let ge = if ends.has_spatial_taps() { 2.0 } else { 1.0 };
                let pr = ends.pairs()[0];
                let mut up = ID;
                up[0][2] = ge * pr.u / 2.0;
                up[0][3] = ge * pr.u / 2.0;
                let mut pd = ID;
                pd[2][0] = ge * pr.p / 2.0;
                pd[2][1] = ge * pr.p / 2.0;
                pd[3][0] = ge * pr.p / 2.0;
                pd[3][1] = ge * pr.p / 2.0;
                let mut v = vec![up];
                v.extend(dwt2(0, 1));
                v.push(pd);
                v
            }
            Family::YDgCbCr => {
                let mut v = vec![perm([1, 0, 2, 3])];
                v.extend(dwt3(1, 2, 3));
                v.push(perm([1, 0, 2, 3]));
                v.extend(dwt2(0, 1));
                v
            }
            Family::YDgCoCg => {
                let mut v = vec![perm([0, 2, 3, 1])];
                v.extend(dwt2(0, 1));
                v.push(perm([2, 0, 1, 3]));
                v.extend(dwt2(0, 1));
                v.extend(dwt2(2, 3));
                v
            }
            Family::YDgCoCg2 => {
                let mut v = vec![perm([2, 1, 0, 3])];
                v.extend(dwt2(0, 1));
                v.push(perm([1, 2, 0, 3]));
                v.extend(dwt2(0, 1));
                v.extend(dwt2(2, 3));
                v.push(perm([2, 0, 3, 1]));
                v.extend(dwt2(0, 1));
                v.extend(dwt2(2, 3));
                v.push(perm([0, 2, 3, 1]));
                v
            }
        };
        let mut m = ID;
        for f in factors {
            m = mul(m, f);
        }
        m
    }

    #[test]
    fn dc_matrix_matches_symbolic_oracle() {
        for family in Family::ALL {
            for w in Wavelet::ALL {
                let spec = TransformSpec::new(family, w, ArithmeticMode::Integer);
                let got = dc_matrix(&spec).unwrap();
                let expect = dc_oracle(family, w);
                for r in 0..4 {
                    for c in 0..4 {
                        assert!(
                            (got[r][c] - expect[r][c]).abs() < 1e-12,
                            "{family}:{} row {r} col {c}: {} vs {}",
                            w.name(),
                            got[r][c],
                            expect[r][c]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn haar_dc_matrices_match_closed_form() {
        let expect = [
            [0.25, 0.25, 0.25, 0.25],
            [-1.0, 1.0, 0.0, 0.0],
            [-0.5, -0.5, 1.0, 0.0],
            [-0.5, -0.5, 0.0, 1.0],
        ];
        for family in [Family::XsttI, Family::XsttII, Family::YDgCbCr] {
            let m = dc_matrix(&TransformSpec::new(
                family,
                Wavelet::Haar,
                ArithmeticMode::Integer,
            ))
            .unwrap();
            for r in 0..4 {
                for c in 0..4 {
                    assert!((m[r][c] - expect[r][c]).abs() < 1e-12, "{family} {r},{c}");
                }
            }
        }
        // The 5/3 type-I transform has the same DC matrix: the spatial taps
        // only spread the same total weight.
        let m = dc_matrix(&TransformSpec::new(
            Family::XsttI,
            Wavelet::FiveThree,
            ArithmeticMode::Integer,
        ))
        .unwrap();
        for r in 0..4 {
            for c in 0..4 {
                assert!((m[r][c] - expect[r][c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dc_rows_sum_for_reversible_wavelets() {
        // DC goes entirely to Y for the wavelets whose update exactly
        // restores the mean (Haar and 5/3).
        for family in Family::ALL {
            for w in [Wavelet::Haar, Wavelet::FiveThree] {
                let m =
                    dc_matrix(&TransformSpec::new(family, w, ArithmeticMode::Integer)).unwrap();
                let sums: Vec<f64> = m.iter().map(|row| row.iter().sum()).collect();
                assert!((sums[0] - 1.0).abs() < 1e-12, "{family}:{}", w.name());
                for s in &sums[1..] {
                    assert!(s.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn roundtrip_bit_exact_integer_mode() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for family in Family::ALL {
            for w in Wavelet::ALL {
                for edge in [false, true] {
                    let spec = TransformSpec::new(family, w, ArithmeticMode::Integer)
                        .with_edge_aware(edge);
                    for _ in 0..3 {
                        let mw = 2 * rng.gen_range(1..=10);
                        let mh = 2 * rng.gen_range(1..=10);
                        let bd = rng.gen_range(8..=14);
                        let m = random_mosaic(&mut rng, mw, mh, bd);
                        let (s, _) = forward(&m, &spec).unwrap();
                        let back = inverse(&s, &spec).unwrap();
                        assert_eq!(back, m, "{}", spec.label());
                    }
                }
            }
        }
    }

    #[test]
    fn real_mode_roundtrip_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for family in Family::ALL {
            let spec = TransformSpec::new(family, Wavelet::NineSeven, ArithmeticMode::Real);
            let m = random_mosaic(&mut rng, 16, 16, 12);
            let (s, _) = forward(&m, &spec).unwrap();
            let (quad, _) = inverse_quad(&s, &spec).unwrap();
            let orig = split_mosaic(&m);
            for (a, b) in [
                (&quad.g1, &orig.g1),
                (&quad.g2, &orig.g2),
                (&quad.b, &orig.b),
                (&quad.r, &orig.r),
            ] {
                for (va, vb) in a.values().zip(b.values()) {
                    assert!((va - vb).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn constant_mosaic_annihilated_by_reversible_wavelets() {
        for family in Family::ALL {
            for w in [Wavelet::Haar, Wavelet::FiveThree] {
                for edge in [false, true] {
                    let spec = TransformSpec::new(family, w, ArithmeticMode::Integer)
                        .with_edge_aware(edge);
                    let m = BayerMosaic::from_fn(12, 8, 12, |_, _| 1234).unwrap();
                    let (s, _) = forward(&m, &spec).unwrap();
                    assert!(s.dg.values().all(|v| v == 0.0), "{}", spec.label());
                    assert!(s.c1.values().all(|v| v == 0.0));
                    assert!(s.c2.values().all(|v| v == 0.0));
                    assert!(s.y.values().all(|v| v == 1234.0));
                }
            }
        }
    }

    #[test]
    fn haar_variants_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_mosaic(&mut rng, 16, 16, 10);
        // Exact agreement with no rounding (real mode drops Haar floors).
        let reference: Vec<Vec<f64>> = {
            let spec = TransformSpec::new(Family::XsttI, Wavelet::Haar, ArithmeticMode::Real);
            let (s, _) = forward(&m, &spec).unwrap();
            s.planes().iter().map(|p| p.values().collect()).collect()
        };
        for family in [Family::XsttII, Family::YDgCbCr] {
            let spec = TransformSpec::new(family, Wavelet::Haar, ArithmeticMode::Real);
            let (s, _) = forward(&m, &spec).unwrap();
            for (got, expect) in s.planes().iter().zip(&reference) {
                let got: Vec<f64> = got.values().collect();
                assert_eq!(&got, expect, "{family}");
            }
        }
        // Integer mode: within one count per sample.
        let reference: Vec<Vec<f64>> = {
            let spec = TransformSpec::new(Family::XsttI, Wavelet::Haar, ArithmeticMode::Integer);
            let (s, _) = forward(&m, &spec).unwrap();
            s.planes().iter().map(|p| p.values().collect()).collect()
        };
        for family in [Family::XsttII, Family::YDgCbCr] {
            let spec = TransformSpec::new(family, Wavelet::Haar, ArithmeticMode::Integer);
            let (s, _) = forward(&m, &spec).unwrap();
            for (got, expect) in s.planes().iter().zip(&reference) {
                for (a, b) in got.values().zip(expect.iter()) {
                    assert!((a - b).abs() <= 1.0);
                }
            }
        }
    }

    #[test]
    fn gamma_zero_matches_plain_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for mode in [ArithmeticMode::Integer, ArithmeticMode::Real] {
            let m = random_mosaic(&mut rng, 12, 12, 12);
            for family in Family::ALL {
                for w in [Wavelet::FiveThree, Wavelet::NineSeven] {
                    let plain = TransformSpec::new(family, w, mode);
                    let weighted = plain.with_edge_aware(true).with_gamma(0.0);
                    let (a, _) = forward(&m, &plain).unwrap();
                    let (b, _) = forward(&m, &weighted).unwrap();
                    assert_eq!(a.planes(), b.planes(), "{}", weighted.label());
                }
            }
        }
    }

    #[test]
    fn inverse_rejects_mode_mismatch() {
        let m = formula_mosaic();
        let spec = TransformSpec::new(Family::XsttI, Wavelet::FiveThree, ArithmeticMode::Integer);
        let (s, _) = forward(&m, &spec).unwrap();
        let wrong = TransformSpec::new(Family::XsttI, Wavelet::FiveThree, ArithmeticMode::Real);
        assert!(matches!(
            inverse_quad(&s, &wrong),
            Err(Error::SpecMismatch(_))
        ));
    }

    #[test]
    fn inverse_of_zero_subbands_is_constant() {
        let spec = TransformSpec::new(Family::XsttI, Wavelet::FiveThree, ArithmeticMode::Integer);
        let m = BayerMosaic::from_fn(8, 8, 10, |_, _| 500).unwrap();
        let (mut s, _) = forward(&m, &spec).unwrap();
        // Forward of a constant leaves only Y; zeroing the rest is a no-op.
        s.dg = Plane::new(4, 4);
        s.c1 = Plane::new(4, 4);
        s.c2 = Plane::new(4, 4);
        let back = inverse(&s, &spec).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn edge_aware_haar_has_no_weighted_stages() {
        let spec = TransformSpec::new(Family::XsttI, Wavelet::Haar, ArithmeticMode::Integer)
            .with_edge_aware(true);
        let plan = build_stages(&spec).unwrap();
        assert!(plan.stages.iter().all(|s| s.weight.is_none()));
    }

    #[test]
    fn predict_stages_never_read_their_target() {
        for family in Family::ALL {
            for w in Wavelet::ALL {
                let spec =
                    TransformSpec::new(family, w, ArithmeticMode::Integer).with_edge_aware(true);
                for stage in build_stages(&spec).unwrap().stages {
                    assert!(!stage.reads_target());
                }
            }
        }
    }
}
