//! On-disk dataset format.
//!
//! A file is one line of compact JSON (the [`Header`]), a `\n`, then the payload: `m * dim`
//! little-endian `f64` coordinates in row-major order followed by one byte per label
//! (`0x01` for +1, `0xFF` for -1). The header records the payload length, so truncation and
//! trailing garbage are both detected on load.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use pancakes_core::{DatasetMeta, Family, LabeledDataset};

use crate::error::{CliError, Result};

pub const FORMAT_NAME: &str = "pancakes-dataset";
pub const FORMAT_VERSION: u32 = 1;

const LABEL_PLUS: u8 = 0x01;
const LABEL_MINUS: u8 = 0xFF;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub family: Family,
    pub dim: usize,
    pub m: usize,
    pub params: BTreeMap<String, f64>,
    pub seed: Option<u64>,
    /// Hex SHA-256 of the planted direction's little-endian bytes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_direction_sha256: Option<String>,
    /// The planted direction itself; only written on explicit request.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden_direction: Option<Vec<f64>>,
    pub payload_bytes: u64,
}

impl Header {
    pub fn expected_payload(dim: usize, m: usize) -> Option<u64> {
        let points = (dim as u64).checked_mul(m as u64)?.checked_mul(8)?;
        points.checked_add(m as u64)
    }
}

/// Hex SHA-256 over the little-endian encoding of `w`.
pub fn direction_digest(w: &[f64]) -> String {
    let mut h = Sha256::new();
    for x in w {
        h.update(x.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Serialise `ds`; the planted direction is stored in the clear only when `expose_planted`.
pub fn encode(ds: &LabeledDataset, expose_planted: bool) -> Result<Vec<u8>> {
    let m = ds.len();
    let payload_bytes = Header::expected_payload(ds.dim, m).ok_or_else(|| CliError::Corrupt {
        path: "<memory>".into(),
        detail: "dataset too large to encode".into(),
    })?;
    let hidden = ds.meta.hidden_direction.as_deref();
    let header = Header {
        format: FORMAT_NAME.into(),
        version: FORMAT_VERSION,
        family: ds.meta.family,
        dim: ds.dim,
        m,
        params: ds.meta.params.clone(),
        seed: ds.meta.seed,
        hidden_direction_sha256: hidden.map(direction_digest),
        hidden_direction: hidden.filter(|_| expose_planted).map(<[f64]>::to_vec),
        payload_bytes,
    };
    let mut out = serde_json::to_vec(&header)?;
    out.push(b'\n');
    out.reserve(payload_bytes as usize);
    for x in &ds.points {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out.extend(ds.labels.iter().map(|&y| if y > 0 { LABEL_PLUS } else { LABEL_MINUS }));
    Ok(out)
}

/// Parse a file image produced by [`encode`]. `path` is used only in error messages.
pub fn decode(mut reader: impl BufRead, path: &Path) -> Result<(Header, LabeledDataset)> {
    let corrupt = |detail: String| CliError::Corrupt {
        path: path.to_path_buf(),
        detail,
    };
    let mut line = Vec::new();
    reader
        .read_until(b'\n', &mut line)
        .map_err(|e| CliError::io(path, e))?;
    if line.pop() != Some(b'\n') {
        return Err(corrupt("missing header line".into()));
    }
    let header: Header = serde_json::from_slice(&line).map_err(|e| corrupt(format!("bad header: {e}")))?;
    if header.format != FORMAT_NAME {
        return Err(corrupt(format!("unknown format {:?}", header.format)));
    }
    if header.version != FORMAT_VERSION {
        return Err(corrupt(format!("unsupported version {}", header.version)));
    }
    let expected = Header::expected_payload(header.dim, header.m)
        .ok_or_else(|| corrupt("header sizes overflow".into()))?;
    if header.payload_bytes != expected {
        return Err(corrupt(format!(
            "header declares {} payload bytes but dim {} and m {} need {expected}",
            header.payload_bytes, header.dim, header.m
        )));
    }
    let mut payload = Vec::with_capacity(expected.min(1 << 30) as usize);
    reader
        .read_to_end(&mut payload)
        .map_err(|e| CliError::io(path, e))?;
    if payload.len() as u64 != expected {
        return Err(corrupt(format!(
            "payload is {} bytes, expected {expected}",
            payload.len()
        )));
    }
    let (coords, label_bytes) = payload.split_at(header.dim * header.m * 8);
    let points: Vec<f64> = coords
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let labels = label_bytes
        .iter()
        .enumerate()
        .map(|(i, &b)| match b {
            LABEL_PLUS => Ok(1),
            LABEL_MINUS => Ok(-1),
            other => Err(corrupt(format!("label byte {other:#04x} at row {i}"))),
        })
        .collect::<Result<Vec<i8>>>()?;
    if let (Some(w), Some(digest)) = (&header.hidden_direction, &header.hidden_direction_sha256) {
        if direction_digest(w) != *digest {
            return Err(corrupt("exposed direction does not match its digest".into()));
        }
    }
    let meta = DatasetMeta {
        family: header.family,
        seed: header.seed,
        hidden_direction: header.hidden_direction.clone(),
        params: header.params.clone(),
    };
    let ds = LabeledDataset::new(header.dim, points, labels, meta).map_err(|e| corrupt(e.to_string()))?;
    Ok((header, ds))
}

pub fn save(path: &Path, ds: &LabeledDataset, expose_planted: bool) -> Result<()> {
    let bytes = encode(ds, expose_planted)?;
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))
}

pub fn load(path: &Path) -> Result<(Header, LabeledDataset)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    decode(BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pancakes_core::linalg::random_unit;
    use pancakes_core::pancake::{sample_labeled_sq, PancakeSpec};
    use pancakes_core::seeded;

    fn sample() -> LabeledDataset {
        let mut rng = seeded(5);
        let w = random_unit(5, &mut rng);
        let spec = PancakeSpec::with_defaults(3, 21).unwrap();
        let mut ds = sample_labeled_sq(&spec, &w, 257, &mut rng).unwrap();
        ds.meta.seed = Some(5);
        ds
    }

    fn roundtrip(bytes: &[u8]) -> Result<(Header, LabeledDataset)> {
        decode(bytes, Path::new("mem"))
    }

    #[test]
    fn exposed_roundtrip_is_bit_exact() {
        let ds = sample();
        let (header, back) = roundtrip(&encode(&ds, true).unwrap()).unwrap();
        assert_eq!(back, ds);
        let bits = |d: &LabeledDataset| d.points.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&ds));
        assert_eq!(header.payload_bytes, 257 * 5 * 8 + 257);
    }

    #[test]
    fn direction_withheld_by_default() {
        let ds = sample();
        let bytes = encode(&ds, false).unwrap();
        let (header, back) = roundtrip(&bytes).unwrap();
        assert!(header.hidden_direction.is_none());
        let w = ds.meta.hidden_direction.as_ref().unwrap();
        assert_eq!(header.hidden_direction_sha256.unwrap(), direction_digest(w));
        assert_eq!(back.points, ds.points);
        assert_eq!(back.labels, ds.labels);
        assert_eq!(back.meta.hidden_direction, None);
        // No coordinate of w appears in the header text.
        let text = String::from_utf8_lossy(&bytes[..bytes.iter().position(|&b| b == b'\n').unwrap()]).into_owned();
        assert!(!text.contains(&format!("{}", w[0])));
    }

    #[test]
    fn label_bytes() {
        let meta = DatasetMeta::new(Family::Custom);
        let ds = LabeledDataset::new(1, vec![0.5, -0.25], vec![1, -1], meta).unwrap();
        let bytes = encode(&ds, false).unwrap();
        assert_eq!(&bytes[bytes.len() - 2..], &[0x01, 0xFF]);
        assert_eq!(&bytes[bytes.len() - 18..bytes.len() - 10], &0.5f64.to_le_bytes());
    }

    #[test]
    fn detects_corruption() {
        let ds = sample();
        let bytes = encode(&ds, false).unwrap();
        assert!(roundtrip(&bytes[..bytes.len() - 1]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(roundtrip(&extra).is_err());
        let mut bad_label = bytes.clone();
        *bad_label.last_mut().unwrap() = 0x02;
        assert!(matches!(roundtrip(&bad_label), Err(CliError::Corrupt { .. })));
        assert!(roundtrip(b"not json\n").is_err());
        assert!(roundtrip(b"").is_err());
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(
            direction_digest(&[1.0]),
            hex::encode(Sha256::digest(1.0f64.to_le_bytes()))
        );
    }
}
