//! Discriminator checkpoint file.
//!
//! ```text
//! magic        8 bytes  "CURDISC1"
//! header_len   u32 LE
//! header       JSON {"side", "grid_size", "layer_dims"}
//! parameters   f64 LE: every layer's weights (row-major in x out), then
//!              every layer's biases
//! ```

use std::path::Path;

use curator_core::discriminator::MlpModel;
use serde::{Deserialize, Serialize};

use crate::error::{CuratorError, Result};
use crate::io;

const MAGIC: &[u8; 8] = b"CURDISC1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    side: usize,
    grid_size: usize,
    layer_dims: Vec<usize>,
}

/// A trained gate together with the preprocessing it expects.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub side: usize,
    pub grid_size: usize,
    pub model: MlpModel,
}

impl Checkpoint {
    pub fn new(side: usize, grid_size: usize, model: MlpModel) -> Result<Self> {
        if model.input_dim() != grid_size * grid_size {
            return Err(CuratorError::config(format!(
                "model input {} does not match a {grid_size}x{grid_size} spectrum",
                model.input_dim()
            )));
        }
        Ok(Self { side, grid_size, model })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&Header {
            side: self.side,
            grid_size: self.grid_size,
            layer_dims: self.model.layer_dims().to_vec(),
        })
        .expect("serializable");
        let n: usize = self.model.weights().iter().chain(self.model.biases()).map(Vec::len).sum();
        let mut out = Vec::with_capacity(12 + header.len() + n * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for v in self.model.weights().iter().chain(self.model.biases()).flatten() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| CuratorError::data(format!("checkpoint: {m}"));
        if bytes.len() < 12 || &bytes[..8] != MAGIC {
            return Err(bad("bad magic"));
        }
        let hlen = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let header: Header = bytes
            .get(12..12 + hlen)
            .ok_or_else(|| bad("truncated header"))
            .and_then(|h| serde_json::from_slice(h).map_err(|e| bad(&e.to_string())))?;
        let dims = &header.layer_dims;
        if dims.len() < 2 {
            return Err(bad("needs at least two layer sizes"));
        }
        let sizes_w: Vec<usize> = dims.windows(2).map(|w| w[0] * w[1]).collect();
        let sizes_b: Vec<usize> = dims[1..].to_vec();
        let total: usize = sizes_w.iter().chain(&sizes_b).sum();
        let payload = &bytes[12 + hlen..];
        if payload.len() != total * 8 {
            return Err(bad(&format!("expected {} parameter bytes, found {}", total * 8, payload.len())));
        }
        let mut values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut take = |n: usize| (&mut values).take(n).collect::<Vec<f64>>();
        let weights: Vec<Vec<f64>> = sizes_w.iter().map(|&n| take(n)).collect();
        let biases: Vec<Vec<f64>> = sizes_b.iter().map(|&n| take(n)).collect();
        let model = MlpModel::from_parts(dims.clone(), weights, biases).map_err(|e| bad(&e.to_string()))?;
        Self::new(header.side, header.grid_size, model).map_err(|e| bad(&e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_bytes(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&io::read_bytes(path)?).map_err(|e| CuratorError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = MlpModel::init(&[16, 5, 2], 3).unwrap();
        let c = Checkpoint::new(32, 4, m).unwrap();
        let bytes = c.to_bytes();
        assert_eq!(Checkpoint::from_bytes(&bytes).unwrap(), c);
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 8]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Checkpoint::from_bytes(&bad).is_err());
    }

    #[test]
    fn rejects_grid_mismatch() {
        let m = MlpModel::init(&[16, 5, 2], 3).unwrap();
        assert_eq!(Checkpoint::new(32, 3, m).unwrap_err().exit_code(), 1);
    }
}
