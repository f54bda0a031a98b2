//! Model persistence.
//!
//! ```text
//! GRLGQ-MODEL v1\n
//! u64 LE   payload length in bytes
//! payload  u8 mode (0 = glgq, 1 = grlgq)
//!          u64 LE D, u64 LE d, u64 LE prototype count p
//!          d × f64 LE relevance
//!          p × (u32 LE label, D·d × f64 LE basis, row-major)
//! u32 LE   CRC32 of payload
//! ```

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grassmann::{RelevanceVector, Subspace};
use crate::lvq::{Mode, ModelState, Prototype};

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC_PREFIX: &str = "GRLGQ-MODEL v";

pub fn encode_model(model: &ModelState) -> Vec<u8> {
    let (dim, d, p) = (model.ambient_dim(), model.subspace_dim(), model.prototypes.len());
    let mut payload = Vec::with_capacity(25 + 8 * d + p * (4 + 8 * dim * d));
    payload.push(match model.mode {
        Mode::Glgq => 0u8,
        Mode::Grlgq => 1u8,
    });
    for n in [dim, d, p] {
        payload.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for w in model.relevance.weights() {
        payload.extend_from_slice(&w.to_le_bytes());
    }
    for proto in &model.prototypes {
        payload.extend_from_slice(&proto.label.to_le_bytes());
        let basis = proto.subspace.basis();
        for r in 0..dim {
            for c in 0..d {
                payload.extend_from_slice(&basis[(r, c)].to_le_bytes());
            }
        }
    }

    let mut out = format!("{MAGIC_PREFIX}{MODEL_FORMAT_VERSION}\n").into_bytes();
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    out.extend_from_slice(&crc32fast::hash(&payload).to_le_bytes());
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::CorruptModel("unexpected end of data".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| Error::CorruptModel("size overflow".into()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<ModelState> {
    let newline = bytes
        .iter()
        .take(64)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::CorruptModel("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::CorruptModel("header is not UTF-8".into()))?;
    let version: u32 = header
        .strip_prefix(MAGIC_PREFIX)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::CorruptModel(format!("unrecognized header `{header}`")))?;
    if version > MODEL_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            supported: MODEL_FORMAT_VERSION,
        });
    }
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::CorruptModel(format!("unknown version {version}")));
    }

    let mut outer = Cursor {
        bytes,
        pos: newline + 1,
    };
    let len = outer.usize()?;
    let payload = outer.take(len)?;
    let crc = outer.u32()?;
    if outer.pos != bytes.len() {
        return Err(Error::CorruptModel("trailing bytes after checksum".into()));
    }
    if crc32fast::hash(payload) != crc {
        return Err(Error::CorruptModel("checksum mismatch".into()));
    }

    let mut cur = Cursor {
        bytes: payload,
        pos: 0,
    };
    let mode = match cur.u8()? {
        0 => Mode::Glgq,
        1 => Mode::Grlgq,
        other => return Err(Error::CorruptModel(format!("unknown mode byte {other}"))),
    };
    let (dim, d, p) = (cur.usize()?, cur.usize()?, cur.usize()?);
    if d == 0 || d > dim || p == 0 {
        return Err(Error::CorruptModel(format!("invalid shape D={dim} d={d} p={p}")));
    }
    // 25 + 8·d + p·(4 + 8·D·d)
    let per_proto = dim.checked_mul(d).and_then(|n| n.checked_mul(8)).and_then(|n| n.checked_add(4));
    let expected = per_proto
        .and_then(|n| n.checked_mul(p))
        .and_then(|n| n.checked_add(25 + 8 * d));
    if expected != Some(payload.len()) {
        return Err(Error::CorruptModel("payload size does not match shape".into()));
    }
    let weights = (0..d).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
    let relevance = RelevanceVector::from_weights(weights)
        .map_err(|e| Error::CorruptModel(format!("relevance: {e}")))?;
    let mut prototypes = Vec::with_capacity(p);
    for i in 0..p {
        let label = cur.u32()?;
        let values = (0..dim * d).map(|_| cur.f64()).collect::<Result<Vec<_>>>()?;
        let basis = DMatrix::from_row_slice(dim, d, &values);
        let subspace = Subspace::new(basis)
            .map_err(|e| Error::CorruptModel(format!("prototype {i}: {e}")))?;
        prototypes.push(Prototype { subspace, label });
    }
    let model = ModelState {
        prototypes,
        relevance,
        mode,
    };
    model
        .check_shapes()
        .map_err(|e| Error::CorruptModel(e.to_string()))?;
    Ok(model)
}

pub fn save_model(model: &ModelState, path: &Path) -> Result<()> {
    fs::write(path, encode_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelState> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::ModelNotFound(path.to_path_buf()))
        }
        Err(e) => return Err(Error::io(path, e)),
    };
    decode_model(&bytes)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn model() -> ModelState {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let prototypes = (1..=3)
            .map(|label| Prototype {
                subspace: Subspace::random(6, 2, &mut rng).unwrap(),
                label,
            })
            .collect();
        let mut m = ModelState::new(prototypes, Mode::Grlgq).unwrap();
        m.relevance = RelevanceVector::from_weights(vec![0.3, 0.7]).unwrap();
        m
    }

    #[test]
    fn roundtrip_is_exact() {
        let m = model();
        assert_eq!(decode_model(&encode_model(&m)).unwrap(), m);
    }

    #[test]
    fn truncation_is_corruption() {
        let bytes = encode_model(&model());
        for cut in [bytes.len() - 1, bytes.len() / 2, 20, 15] {
            assert!(matches!(decode_model(&bytes[..cut]), Err(Error::CorruptModel(_))), "cut {cut}");
        }
    }

    #[test]
    fn flipped_byte_fails_checksum() {
        let mut bytes = encode_model(&model());
        let mid = bytes.len() / 2;
        bytes[mid] ^= 0x40;
        assert!(matches!(decode_model(&bytes), Err(Error::CorruptModel(_))));
    }

    #[test]
    fn newer_version_is_rejected() {
        let bytes = encode_model(&model());
        let mut newer = b"GRLGQ-MODEL v2".to_vec();
        newer.extend_from_slice(&bytes[bytes.iter().position(|&b| b == b'\n').unwrap()..]);
        assert!(matches!(
            decode_model(&newer),
            Err(Error::VersionMismatch { found: 2, supported: 1 })
        ));
    }
}
