//! Netpbm decoding for the graymap and pixmap variants (`P2`, `P3`, `P5`,
//! `P6`). Samples are divided by `maxval`; single-channel images are
//! replicated into three channels.

use alloc::string::String;
use alloc::vec::Vec;

use super::{ImagingError, RasterImage};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetpbmError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported netpbm variant {0:?}")]
    UnsupportedFormat(String),
    #[error("unsupported bit depth: maxval {0}")]
    UnsupportedBitDepth(u64),
    #[error("pixel data truncated: expected {expected} samples, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("invalid sample {value} (maxval {maxval})")]
    InvalidSample { value: u64, maxval: u64 },
    #[error(transparent)]
    Image(#[from] ImagingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    AsciiGray,
    AsciiColor,
    BinaryGray,
    BinaryColor,
}

impl Variant {
    fn channels(self) -> usize {
        match self {
            Variant::AsciiGray | Variant::BinaryGray => 1,
            Variant::AsciiColor | Variant::BinaryColor => 3,
        }
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() || b == b'#' {
                break;
            }
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u64, NetpbmError> {
        let tok = self
            .token()
            .ok_or_else(|| NetpbmError::MalformedHeader(alloc::format!("missing {what}")))?;
        parse_decimal(tok)
            .ok_or_else(|| NetpbmError::MalformedHeader(alloc::format!("{what} is not a number")))
    }
}

fn parse_decimal(tok: &[u8]) -> Option<u64> {
    if tok.is_empty() || tok.len() > 19 || !tok.iter().all(u8::is_ascii_digit) {
        return None;
    }
    Some(tok.iter().fold(0u64, |acc, d| acc * 10 + u64::from(d - b'0')))
}

pub fn decode(bytes: &[u8]) -> Result<RasterImage, NetpbmError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur
        .token()
        .ok_or_else(|| NetpbmError::MalformedHeader("empty input".into()))?;
    let variant = match magic {
        b"P2" => Variant::AsciiGray,
        b"P3" => Variant::AsciiColor,
        b"P5" => Variant::BinaryGray,
        b"P6" => Variant::BinaryColor,
        other if other.len() == 2 && other[0] == b'P' => {
            return Err(NetpbmError::UnsupportedFormat(
                String::from_utf8_lossy(other).into_owned(),
            ))
        }
        _ => return Err(NetpbmError::MalformedHeader("bad magic number".into())),
    };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let maxval = cur.header_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(NetpbmError::MalformedHeader("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(NetpbmError::UnsupportedBitDepth(maxval));
    }
    let channels = variant.channels();
    let count = usize::try_from(width.saturating_mul(height))
        .ok()
        .and_then(|px| px.checked_mul(channels))
        .ok_or_else(|| NetpbmError::MalformedHeader("image too large".into()))?;

    let mut samples = Vec::with_capacity(count);
    match variant {
        Variant::AsciiGray | Variant::AsciiColor => {
            while samples.len() < count {
                let Some(tok) = cur.token() else { break };
                let value = parse_decimal(tok)
                    .ok_or_else(|| NetpbmError::MalformedHeader("non-numeric sample".into()))?;
                samples.push(value);
            }
        }
        Variant::BinaryGray | Variant::BinaryColor => {
            // exactly one whitespace byte separates maxval from the raster
            match bytes.get(cur.pos) {
                Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
                _ => return Err(NetpbmError::MalformedHeader("header not terminated".into())),
            }
            let raster = &bytes[cur.pos..];
            if maxval < 256 {
                samples.extend(raster.iter().take(count).map(|&b| u64::from(b)));
            } else {
                samples.extend(
                    raster
                        .chunks_exact(2)
                        .take(count)
                        .map(|p| u64::from(u16::from_be_bytes([p[0], p[1]]))),
                );
            }
        }
    }
    if samples.len() < count {
        return Err(NetpbmError::TruncatedData {
            expected: count,
            found: samples.len(),
        });
    }

    let scale = 1.0 / maxval as f64;
    let mut data = Vec::with_capacity(count / channels * 3);
    for px in samples.chunks_exact(channels) {
        for &s in px {
            if s > maxval {
                return Err(NetpbmError::InvalidSample { value: s, maxval });
            }
        }
        if channels == 1 {
            let v = px[0] as f64 * scale;
            data.extend_from_slice(&[v, v, v]);
        } else {
            data.extend(px.iter().map(|&s| s as f64 * scale));
        }
    }
    Ok(RasterImage::new(width as usize, height as usize, data)?)
}

/// Encodes an image as binary `P6` with `maxval` 255.
pub fn encode_ppm(img: &RasterImage) -> Vec<u8> {
    let mut out = alloc::format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(
        img.data()
            .iter()
            .map(|&v| libm::round(v.clamp(0.0, 1.0) * 255.0) as u8),
    );
    out
}
