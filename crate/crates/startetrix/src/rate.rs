//! Desk-scale rate/distortion harness: subband entropy, dead-zone
//! quantization, PSNR, RD sweeps, and encoder/decoder weight divergence.
//!
//! The bits-per-pixel figures here are zeroth-order entropies of subband
//! samples (or quantization indices), a self-contained proxy for a real
//! wavelet codec's rates: good for comparing transforms within this crate,
//! not comparable to any external codec's output in absolute terms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::mosaic::{split_mosaic, ArithmeticMode, BayerMosaic, ChannelQuad, Plane, SubbandQuad};
use crate::transforms::{forward, inverse_quad, TransformSpec, WeightLog};

/// PSNR is capped here so exact reconstructions stay finite.
pub const PSNR_CAP: f64 = 100.0;

/// One rate/distortion record.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    /// Quantizer step; `None` for lossless records.
    pub quant_step: Option<f64>,
    /// Per-subband entropy in bits/sample, order (Y, Dg, C1, C2).
    pub entropy: [f64; 4],
    /// Bits per mosaic pixel: the mean of the four subband entropies, since
    /// each subband holds a quarter of the pixels.
    pub bpp: f64,
    /// Mean squared value of the Dg subband.
    pub dg_energy: f64,
    /// Reconstruction PSNR in dB against the original mosaic; `None` for
    /// lossless records.
    pub psnr: Option<f64>,
}

/// Mean squared value of the green-difference subband. Lower means the two
/// green channels were predicted from each other more accurately.
pub fn dg_energy(s: &SubbandQuad) -> f64 {
    plane_energy(&s.dg)
}

fn plane_energy(p: &Plane) -> f64 {
    if p.is_empty() {
        return 0.0;
    }
    p.values().map(|v| v * v).sum::<f64>() / p.len() as f64
}

/// Zeroth-order empirical entropy of an integer-valued plane, in
/// bits/sample.
pub fn entropy_bpp(plane: &Plane) -> f64 {
    if plane.is_empty() {
        return 0.0;
    }
    let mut hist: BTreeMap<i64, u64> = BTreeMap::new();
    for v in plane.values() {
        *hist.entry(v.round() as i64).or_insert(0) += 1;
    }
    let n = plane.len() as f64;
    let mut h = 0.0;
    for &count in hist.values() {
        let p = count as f64 / n;
        h -= p * p.log2();
    }
    h
}

fn check_step(step: f64) -> Result<()> {
    if !(step > 0.0) {
        return Err(Error::InvalidParam(format!(
            "quantizer step must be > 0, got {step}"
        )));
    }
    Ok(())
}

/// Dead-zone uniform quantizer: `q = sign(x) * floor(|x| / step)`.
pub fn quantize(plane: &Plane, step: f64) -> Result<Plane> {
    check_step(step)?;
    Ok(Plane::from_fn(plane.width(), plane.height(), |x, y| {
        let v = plane.get(x, y);
        v.signum() * (v.abs() / step).floor()
    }))
}

/// Mid-bin reconstruction: `sign(q) * (|q| + 1/2) * step` for nonzero
/// indices, zero inside the dead zone.
pub fn dequantize(indices: &Plane, step: f64) -> Result<Plane> {
    check_step(step)?;
    Ok(Plane::from_fn(indices.width(), indices.height(), |x, y| {
        let q = indices.get(x, y);
        if q == 0.0 {
            0.0
        } else {
            q.signum() * (q.abs() + 0.5) * step
        }
    }))
}

/// PSNR between two channel quads over all four planes, peak
/// `2^bit_depth - 1`, capped at [`PSNR_CAP`].
pub fn psnr_quads(a: &ChannelQuad, b: &ChannelQuad, bit_depth: u32) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            expected: a.dims(),
            got: b.dims(),
        });
    }
    let mut se = 0.0;
    let mut n = 0usize;
    for (pa, pb) in [(&a.g1, &b.g1), (&a.g2, &b.g2), (&a.b, &b.b), (&a.r, &b.r)] {
        for (va, vb) in pa.values().zip(pb.values()) {
            let d = va - vb;
            se += d * d;
            n += 1;
        }
    }
    if n == 0 {
        return Ok(PSNR_CAP);
    }
    let mse = se / n as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP);
    }
    let peak = f64::from((1u32 << bit_depth) - 1);
    Ok((10.0 * (peak * peak / mse).log10()).min(PSNR_CAP))
}

/// Lossless-style report for already-computed subbands: per-subband entropy
/// of the samples plus the Dg energy.
pub fn report_for(s: &SubbandQuad) -> RateReport {
    let entropy = [
        entropy_bpp(&s.y),
        entropy_bpp(&s.dg),
        entropy_bpp(&s.c1),
        entropy_bpp(&s.c2),
    ];
    RateReport {
        quant_step: None,
        bpp: entropy.iter().sum::<f64>() / 4.0,
        entropy,
        dg_energy: dg_energy(s),
        psnr: None,
    }
}

/// Result of one quantized encode/decode round trip.
#[derive(Clone, Debug)]
pub struct QuantizedRun {
    pub report: RateReport,
    pub encoder_log: WeightLog,
    pub decoder_log: WeightLog,
    pub reconstruction: ChannelQuad,
}

/// Forward-transforms the mosaic, quantizes every subband at `step`,
/// measures the index entropies, then dequantizes and inverts. Edge-aware
/// weights on the decode side are recomputed from the dequantized data, as
/// a real decoder would.
pub fn quantized_roundtrip(
    m: &BayerMosaic,
    spec: &TransformSpec,
    step: f64,
) -> Result<QuantizedRun> {
    if spec.mode != ArithmeticMode::Real {
        return Err(Error::InvalidParam(
            "quantized round trips require a real-lossy spec".into(),
        ));
    }
    check_step(step)?;
    let (s, encoder_log) = forward(m, spec)?;
    let planes = s.planes();
    let mut indices = Vec::with_capacity(4);
    let mut entropy = [0.0; 4];
    for (i, p) in planes.iter().enumerate() {
        let q = quantize(p, step)?;
        entropy[i] = entropy_bpp(&q);
        indices.push(q);
    }
    let dequant = SubbandQuad {
        y: dequantize(&indices[0], step)?,
        dg: dequantize(&indices[1], step)?,
        c1: dequantize(&indices[2], step)?,
        c2: dequantize(&indices[3], step)?,
        mode: s.mode,
        bit_depth: s.bit_depth,
        dc_offset: 0,
    };
    let (reconstruction, decoder_log) = inverse_quad(&dequant, spec)?;
    let psnr = psnr_quads(&split_mosaic(m), &reconstruction, m.bit_depth())?;
    Ok(QuantizedRun {
        report: RateReport {
            quant_step: Some(step),
            bpp: entropy.iter().sum::<f64>() / 4.0,
            entropy,
            dg_energy: dg_energy(&s),
            psnr: Some(psnr),
        },
        encoder_log,
        decoder_log,
        reconstruction,
    })
}

/// Runs [`quantized_roundtrip`] for each step and returns the reports.
pub fn rd_sweep(m: &BayerMosaic, spec: &TransformSpec, steps: &[f64]) -> Result<Vec<RateReport>> {
    steps
        .iter()
        .map(|&step| quantized_roundtrip(m, spec, step).map(|run| run.report))
        .collect()
}

/// Mean absolute difference between encoder and decoder weight fractions
/// across all edge-aware stages. Exactly zero in lossless runs.
pub fn weight_divergence(enc: &WeightLog, dec: &WeightLog) -> Result<f64> {
    if enc.len() != dec.len() {
        return Err(Error::SpecMismatch(format!(
            "weight logs hold {} and {} stages",
            enc.len(),
            dec.len()
        )));
    }
    let mut sum = 0.0;
    let mut n = 0usize;
    for (a, b) in enc.fractions.iter().zip(&dec.fractions) {
        if a.dims() != b.dims() {
            return Err(Error::DimensionMismatch {
                expected: a.dims(),
                got: b.dims(),
            });
        }
        for (va, vb) in a.values().zip(b.values()) {
            sum += (va - vb).abs();
            n += 1;
        }
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}
