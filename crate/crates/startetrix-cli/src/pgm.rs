//! Binary (P5) PGM reading and writing.
//!
//! Sixteen-bit samples are big-endian per the Netpbm convention. The parser
//! reports the byte offset of whatever it chokes on.

use std::fmt;
use std::fs;
use std::path::Path;

use startetrix::BayerMosaic;

#[derive(Debug)]
pub enum PgmError {
    Io(std::io::Error),
    Parse { offset: usize, message: String },
    Image(startetrix::Error),
}

impl fmt::Display for PgmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Io(e) => write!(f, "{e}"),
            Self::Parse { offset, message } => {
                write!(f, "malformed PGM at byte {offset}: {message}")
            }
            Self::Image(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PgmError {}

impl From<std::io::Error> for PgmError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<startetrix::Error> for PgmError {
    fn from(e: startetrix::Error) -> Self {
        Self::Image(e)
    }
}

struct Tokenizer<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    /// Skips whitespace and `#` comments, then reads one ASCII token.
    fn token(&mut self) -> Result<&'a [u8], PgmError> {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.data.len() {
            return Err(PgmError::Parse {
                offset: self.pos,
                message: "unexpected end of header".into(),
            });
        }
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Ok(&self.data[start..self.pos])
    }

    fn number(&mut self, what: &str) -> Result<u64, PgmError> {
        let offset = self.pos;
        let tok = self.token()?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::Parse {
                offset,
                message: format!("expected {what}, got {:?}", String::from_utf8_lossy(tok)),
            })
    }
}

/// Reads a binary PGM into a mosaic. The bit depth is the smallest value in
/// 8..=16 that covers `maxval`.
pub fn read_mosaic(path: &Path) -> Result<BayerMosaic, PgmError> {
    let data = fs::read(path)?;
    let mut t = Tokenizer {
        data: &data,
        pos: 0,
    };
    let magic = t.token()?;
    if magic != b"P5" {
        return Err(PgmError::Parse {
            offset: 0,
            message: format!(
                "expected magic P5, got {:?}",
                String::from_utf8_lossy(magic)
            ),
        });
    }
    let width = t.number("width")? as usize;
    let height = t.number("height")? as usize;
    let maxval = t.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::Parse {
            offset: t.pos,
            message: format!("maxval {maxval} outside 1..=65535"),
        });
    }
    // Exactly one whitespace byte separates the header from the samples.
    if t.pos >= data.len() || !data[t.pos].is_ascii_whitespace() {
        return Err(PgmError::Parse {
            offset: t.pos,
            message: "missing whitespace before sample data".into(),
        });
    }
    let payload = &data[t.pos + 1..];
    let wide = maxval > 255;
    let expect = width * height * if wide { 2 } else { 1 };
    if payload.len() != expect {
        return Err(PgmError::Parse {
            offset: t.pos + 1,
            message: format!("expected {expect} sample bytes, found {}", payload.len()),
        });
    }
    let samples: Vec<u16> = if wide {
        payload
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        payload.iter().map(|&b| u16::from(b)).collect()
    };
    if let Some((i, &s)) = samples.iter().enumerate().find(|(_, &s)| u64::from(s) > maxval) {
        return Err(PgmError::Parse {
            offset: t.pos + 1 + i * if wide { 2 } else { 1 },
            message: format!("sample {s} exceeds maxval {maxval}"),
        });
    }
    let bit_depth = (64 - (maxval).leading_zeros()).max(8);
    Ok(BayerMosaic::new(width, height, bit_depth, samples)?)
}

/// Writes a mosaic as binary PGM with maxval `2^bit_depth - 1`.
pub fn write_mosaic(path: &Path, m: &BayerMosaic) -> Result<(), PgmError> {
    let maxval = u32::from(m.max_value());
    let mut out = format!("P5\n{} {}\n{}\n", m.width(), m.height(), maxval).into_bytes();
    if maxval > 255 {
        for &s in m.samples() {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(m.samples().iter().map(|&s| s as u8));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes an arbitrary 16-bit gray plane (used for weight-fraction dumps).
pub fn write_gray16(path: &Path, width: usize, height: usize, samples: &[u16]) -> Result<(), PgmError> {
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for &s in samples {
        out.extend_from_slice(&s.to_be_bytes());
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_16bit() {
        let dir = std::env::temp_dir().join("startetrix-pgm-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.pgm");
        let m = BayerMosaic::from_fn(6, 4, 12, |x, y| (x * 601 + y * 97) as u16).unwrap();
        write_mosaic(&path, &m).unwrap();
        let back = read_mosaic(&path).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn comments_and_whitespace_accepted() {
        let dir = std::env::temp_dir().join("startetrix-pgm-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.pgm");
        fs::write(&path, b"P5 # magic\n# a comment line\n 2 2\n255\n\x01\x02\x03\x04").unwrap();
        let m = read_mosaic(&path).unwrap();
        assert_eq!(m.samples(), &[1, 2, 3, 4]);
        assert_eq!(m.bit_depth(), 8);
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let dir = std::env::temp_dir().join("startetrix-pgm-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.pgm");
        fs::write(&path, b"P5\n2 2\n255\n\x01\x02").unwrap();
        match read_mosaic(&path) {
            Err(PgmError::Parse { message, .. }) => {
                assert!(message.contains("expected 4 sample bytes"))
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn odd_dimensions_rejected() {
        let dir = std::env::temp_dir().join("startetrix-pgm-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("odd.pgm");
        fs::write(&path, b"P5\n3 2\n255\n\x01\x02\x03\x04\x05\x06").unwrap();
        assert!(matches!(read_mosaic(&path), Err(PgmError::Image(_))));
    }
}
