//! The SSQ1 subband container: a fixed-order text header followed by the
//! four subband planes as row-major little-endian signed 32-bit samples.
//!
//! Dg/C1/C2 are stored shifted by `dc_offset = 2^bit_depth` so files hold
//! non-negative values; in-memory quads stay signed and unshifted. The
//! header alone determines the inverse transform: weights are never stored.

use std::fmt;
use std::fs;
use std::path::Path;

use startetrix::{ArithmeticMode, Family, Plane, SubbandQuad, TransformSpec, Wavelet};

pub const MAGIC: &str = "SSQ1";

#[derive(Debug)]
pub enum SsqError {
    Io(std::io::Error),
    Parse { line: usize, message: String },
    Image(startetrix::Error),
}

impl fmt::Display for SsqError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "{e}"),
            Self::Parse { line, message } => write!(f, "malformed SSQ at line {line}: {message}"),
            Self::Image(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SsqError {}

impl From<std::io::Error> for SsqError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<startetrix::Error> for SsqError {
    fn from(e: startetrix::Error) -> Self {
        Self::Image(e)
    }
}

/// Parsed SSQ header. `width`/`height` are the mosaic dimensions; each
/// plane is a quarter of that.
#[derive(Clone, Debug, PartialEq)]
pub struct SsqHeader {
    pub width: usize,
    pub height: usize,
    pub bit_depth: u32,
    pub family: Family,
    pub wavelet: Wavelet,
    pub edge_aware: bool,
    pub mode: ArithmeticMode,
    pub gamma: f64,
    pub epsilon: f64,
    pub dc_offset: i64,
}

impl SsqHeader {
    pub fn new(s: &SubbandQuad, spec: &TransformSpec, mosaic_width: usize, mosaic_height: usize) -> Self {
        Self {
            width: mosaic_width,
            height: mosaic_height,
            bit_depth: s.bit_depth,
            family: spec.family,
            wavelet: spec.wavelet,
            edge_aware: spec.edge_aware,
            mode: spec.mode,
            gamma: spec.gamma,
            epsilon: spec.epsilon,
            dc_offset: 1i64 << s.bit_depth,
        }
    }

    pub fn spec(&self) -> TransformSpec {
        TransformSpec {
            family: self.family,
            wavelet: self.wavelet,
            edge_aware: self.edge_aware,
            gamma: self.gamma,
            epsilon: self.epsilon,
            mode: self.mode,
        }
    }

    /// Fixed key order keeps the byte stream stable across platforms.
    pub fn serialize(&self) -> String {
        format!(
            "{MAGIC}\nwidth={}\nheight={}\nbit_depth={}\nfamily={}\nwavelet={}\n\
             edge_aware={}\nmode={}\ngamma={}\nepsilon={}\ndc_offset={}\n\n",
            self.width,
            self.height,
            self.bit_depth,
            self.family.name(),
            self.wavelet.name(),
            self.edge_aware,
            self.mode.name(),
            self.gamma,
            self.epsilon,
            self.dc_offset
        )
    }

    pub fn parse(text: &str) -> Result<Self, SsqError> {
        let mut lines = text.lines().enumerate();
        let bad = |line: usize, message: String| SsqError::Parse { line: line + 1, message };
        match lines.next() {
            Some((_, l)) if l == MAGIC => {}
            Some((n, l)) => return Err(bad(n, format!("expected magic {MAGIC}, got {l:?}"))),
            None => return Err(bad(0, "empty header".into())),
        }
        let mut field = |key: &str| -> Result<String, SsqError> {
            match lines.next() {
                Some((n, l)) => match l.split_once('=') {
                    Some((k, v)) if k == key => Ok(v.to_string()),
                    _ => Err(bad(n, format!("expected `{key}=...`, got {l:?}"))),
                },
                None => Err(bad(usize::MAX - 1, format!("missing field {key}"))),
            }
        };
        macro_rules! parse_field {
            ($key:literal, $ty:ty) => {
                field($key)?.parse::<$ty>().map_err(|e| SsqError::Parse {
                    line: 0,
                    message: format!("field {}: {e}", $key),
                })?
            };
        }
        Ok(Self {
            width: parse_field!("width", usize),
            height: parse_field!("height", usize),
            bit_depth: parse_field!("bit_depth", u32),
            family: parse_field!("family", Family),
            wavelet: parse_field!("wavelet", Wavelet),
            edge_aware: parse_field!("edge_aware", bool),
            mode: parse_field!("mode", ArithmeticMode),
            gamma: parse_field!("gamma", f64),
            epsilon: parse_field!("epsilon", f64),
            dc_offset: parse_field!("dc_offset", i64),
        })
    }
}

fn push_plane(out: &mut Vec<u8>, p: &Plane, offset: i64) -> Result<(), SsqError> {
    for v in p.values() {
        let shifted = v.round() + offset as f64;
        if shifted < f64::from(i32::MIN) || shifted > f64::from(i32::MAX) {
            return Err(SsqError::Image(startetrix::Error::SampleRange {
                value: v,
                bit_depth: 31,
            }));
        }
        out.extend_from_slice(&(shifted as i32).to_le_bytes());
    }
    Ok(())
}

/// Serializes subbands and the spec that produced them. Real-mode samples
/// are rounded to the nearest integer for storage.
pub fn write_subbands(
    path: &Path,
    s: &SubbandQuad,
    spec: &TransformSpec,
    mosaic_width: usize,
    mosaic_height: usize,
) -> Result<(), SsqError> {
    let header = SsqHeader::new(s, spec, mosaic_width, mosaic_height);
    let mut out = header.serialize().into_bytes();
    push_plane(&mut out, &s.y, 0)?;
    for p in [&s.dg, &s.c1, &s.c2] {
        push_plane(&mut out, p, header.dc_offset)?;
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a container back into an unshifted subband quad plus its spec.
pub fn read_subbands(path: &Path) -> Result<(SubbandQuad, TransformSpec), SsqError> {
    let data = fs::read(path)?;
    // Header ends at the first blank line.
    let mut header_end = None;
    for i in 0..data.len().saturating_sub(1) {
        if data[i] == b'\n' && data[i + 1] == b'\n' {
            header_end = Some(i + 2);
            break;
        }
    }
    let header_end = header_end.ok_or(SsqError::Parse {
        line: 1,
        message: "no blank line terminating the header".into(),
    })?;
    let text = std::str::from_utf8(&data[..header_end]).map_err(|e| SsqError::Parse {
        line: 1,
        message: format!("header is not UTF-8: {e}"),
    })?;
    let header = SsqHeader::parse(text)?;
    if header.width == 0 || header.height == 0 || header.width % 2 != 0 || header.height % 2 != 0 {
        return Err(SsqError::Image(startetrix::Error::OddDimensions {
            width: header.width,
            height: header.height,
        }));
    }
    let (w, h) = (header.width / 2, header.height / 2);
    let payload = &data[header_end..];
    let expect = 4 * w * h * 4;
    if payload.len() != expect {
        return Err(SsqError::Parse {
            line: 0,
            message: format!("expected {expect} payload bytes, found {}", payload.len()),
        });
    }
    let mut planes = Vec::with_capacity(4);
    for (i, offset) in [0, header.dc_offset, header.dc_offset, header.dc_offset]
        .into_iter()
        .enumerate()
    {
        let start = i * w * h * 4;
        let vals: Vec<f64> = payload[start..start + w * h * 4]
            .chunks_exact(4)
            .map(|c| {
                f64::from(i32::from_le_bytes([c[0], c[1], c[2], c[3]])) - offset as f64
            })
            .collect();
        planes.push(Plane::from_vec(w, h, vals));
    }
    let c2 = planes.pop().unwrap();
    let c1 = planes.pop().unwrap();
    let dg = planes.pop().unwrap();
    let y = planes.pop().unwrap();
    Ok((
        SubbandQuad {
            y,
            dg,
            c1,
            c2,
            mode: header.mode,
            bit_depth: header.bit_depth,
            dc_offset: 0,
        },
        header.spec(),
    ))
}
