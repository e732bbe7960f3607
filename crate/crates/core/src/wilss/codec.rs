//! Binary format for [`ScoreMap`] and [`FeatureMap`].
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic    4 bytes   "WSCM" (score map) or "WFTM" (feature map)
//! version  u16       1
//! flags    u16       bit 0: logits (score maps only)
//! pixels   u64
//! score map:   classes u32, then per class: len u32 + UTF-8 name
//! feature map: dim u64
//! payload  f64 x pixels x (classes | dim), row-major
//! ```

use alloc::string::String;
use alloc::vec::Vec;

use super::{FeatureMap, ScoreKind, ScoreMap, WilssError};

pub const SCORE_MAGIC: &[u8; 4] = b"WSCM";
pub const FEATURE_MAGIC: &[u8; 4] = b"WFTM";
pub const VERSION: u16 = 1;
const FLAG_LOGITS: u16 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CodecError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown flags {0:#x}")]
    UnknownFlags(u16),
    #[error("truncated input")]
    Truncated,
    #[error("{0} trailing bytes")]
    TrailingBytes(usize),
    #[error("class name is not UTF-8")]
    BadClassName,
    #[error(transparent)]
    Invalid(#[from] WilssError),
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.bytes.len() < n {
            return Err(CodecError::Truncated);
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u16(&mut self) -> Result<u16, CodecError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn header(&mut self, magic: &[u8; 4]) -> Result<u16, CodecError> {
        if self.take(4)? != magic {
            return Err(CodecError::BadMagic);
        }
        let version = self.u16()?;
        if version != VERSION {
            return Err(CodecError::UnsupportedVersion(version));
        }
        self.u16()
    }

    fn floats(&mut self, count: usize) -> Result<Vec<f64>, CodecError> {
        let bytes = count.checked_mul(8).ok_or(CodecError::Truncated)?;
        let raw = self.take(bytes)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn finish(&self) -> Result<(), CodecError> {
        match self.bytes.len() {
            0 => Ok(()),
            n => Err(CodecError::TrailingBytes(n)),
        }
    }
}

fn put_header(out: &mut Vec<u8>, magic: &[u8; 4], flags: u16, pixels: usize) {
    out.extend_from_slice(magic);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&(pixels as u64).to_le_bytes());
}

fn put_floats(out: &mut Vec<u8>, values: &[f64]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn encode_score_map(map: &ScoreMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + map.scores().len() * 8);
    let flags = if map.kind() == ScoreKind::Logits { FLAG_LOGITS } else { 0 };
    put_header(&mut out, SCORE_MAGIC, flags, map.num_pixels());
    out.extend_from_slice(&(map.num_classes() as u32).to_le_bytes());
    for c in map.class_order() {
        out.extend_from_slice(&(c.len() as u32).to_le_bytes());
        out.extend_from_slice(c.as_bytes());
    }
    put_floats(&mut out, map.scores());
    out
}

pub fn decode_score_map(bytes: &[u8]) -> Result<ScoreMap, CodecError> {
    let mut r = Reader { bytes };
    let flags = r.header(SCORE_MAGIC)?;
    if flags & !FLAG_LOGITS != 0 {
        return Err(CodecError::UnknownFlags(flags));
    }
    let pixels = usize::try_from(r.u64()?).map_err(|_| CodecError::Truncated)?;
    let classes = r.u32()? as usize;
    let mut names = Vec::new();
    for _ in 0..classes {
        let len = r.u32()? as usize;
        let name = core::str::from_utf8(r.take(len)?).map_err(|_| CodecError::BadClassName)?;
        names.push(String::from(name));
    }
    let count = pixels.checked_mul(classes).ok_or(CodecError::Truncated)?;
    let scores = r.floats(count)?;
    r.finish()?;
    let kind = if flags & FLAG_LOGITS != 0 {
        ScoreKind::Logits
    } else {
        ScoreKind::Probabilities
    };
    Ok(ScoreMap::new(pixels, names, scores, kind)?)
}

pub fn encode_feature_map(map: &FeatureMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + map.data().len() * 8);
    put_header(&mut out, FEATURE_MAGIC, 0, map.num_pixels());
    out.extend_from_slice(&(map.dim() as u64).to_le_bytes());
    put_floats(&mut out, map.data());
    out
}

pub fn decode_feature_map(bytes: &[u8]) -> Result<FeatureMap, CodecError> {
    let mut r = Reader { bytes };
    let flags = r.header(FEATURE_MAGIC)?;
    if flags != 0 {
        return Err(CodecError::UnknownFlags(flags));
    }
    let pixels = usize::try_from(r.u64()?).map_err(|_| CodecError::Truncated)?;
    let dim = usize::try_from(r.u64()?).map_err(|_| CodecError::Truncated)?;
    let count = pixels.checked_mul(dim).ok_or(CodecError::Truncated)?;
    let data = r.floats(count)?;
    r.finish()?;
    Ok(FeatureMap::new(pixels, dim, data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn score_map_round_trip() {
        let m = ScoreMap::logits(2, names(&["background", "dining table"]), vec![-1.5, 2.0, 0.0, 1e-300])
            .unwrap();
        let bytes = encode_score_map(&m);
        assert_eq!(&bytes[..4], SCORE_MAGIC);
        assert_eq!(decode_score_map(&bytes).unwrap(), m);
    }

    #[test]
    fn feature_map_round_trip() {
        let f = FeatureMap::new(3, 2, vec![0.5, -0.25, 1.0, 2.0, 3.0, -4.0]).unwrap();
        assert_eq!(decode_feature_map(&encode_feature_map(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_corruption() {
        let m = ScoreMap::probabilities(1, names(&["a"]), vec![0.5]).unwrap();
        let bytes = encode_score_map(&m);
        assert_eq!(decode_score_map(&bytes[..bytes.len() - 1]), Err(CodecError::Truncated));
        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(decode_score_map(&extra), Err(CodecError::TrailingBytes(1)));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert_eq!(decode_score_map(&magic), Err(CodecError::BadMagic));
        let mut version = bytes.clone();
        version[4] = 9;
        assert_eq!(decode_score_map(&version), Err(CodecError::UnsupportedVersion(9)));
        assert_eq!(decode_feature_map(&bytes), Err(CodecError::BadMagic));

        // a probability map holding 2.0 is rejected by validation
        let mut bad = bytes;
        let n = bad.len();
        bad[n - 8..].copy_from_slice(&2.0f64.to_le_bytes());
        assert!(matches!(decode_score_map(&bad), Err(CodecError::Invalid(_))));
    }
}
