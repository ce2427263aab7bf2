//! Version 1.0 `.npy` reading and writing for 3-D float feature maps.
//!
//! Only little-endian `<f4` / `<f8` payloads in C order are accepted. The
//! file is `\x93NUMPY`, version bytes `1 0`, a little-endian `u16` header
//! length, then an ASCII dict literal padded with spaces and a trailing
//! newline so the payload starts on a 64-byte boundary.

use std::fs;
use std::path::Path;

use spectral_vote_core::FeatureMap;

use crate::atomic::write_atomic;
use crate::error::{CliError, Result};

const MAGIC: &[u8; 6] = b"\x93NUMPY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub dtype: Dtype,
    pub shape: Vec<usize>,
}

pub fn read_feature_map(path: &Path) -> Result<FeatureMap> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse_feature_map(&bytes).map_err(|e| e.with_path(path))
}

pub fn parse_feature_map(bytes: &[u8]) -> Result<FeatureMap> {
    let (header, offset) = parse_header(bytes)?;
    if header.shape.len() != 3 {
        return Err(CliError::Shape(format!(
            "feature file must be 3-D (h, w, D), got shape {:?}",
            header.shape
        )));
    }
    let count: usize = header.shape.iter().product();
    let payload = &bytes[offset..];
    let expected = count * header.dtype.size();
    if payload.len() != expected {
        return Err(CliError::Format(format!(
            "payload holds {} bytes, shape {:?} needs {expected}",
            payload.len(),
            header.shape
        )));
    }
    let data: Vec<f64> = match header.dtype {
        Dtype::F32 => {
            payload.chunks_exact(4).map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap()))).collect()
        }
        Dtype::F64 => payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect(),
    };
    let (h, w, d) = (header.shape[0], header.shape[1], header.shape[2]);
    Ok(FeatureMap::new(h, w, d, data)?)
}

pub fn parse_header(bytes: &[u8]) -> Result<(Header, usize)> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err(CliError::Format("missing NUMPY magic".into()));
    }
    if bytes[6] != 1 || bytes[7] != 0 {
        return Err(CliError::Format(format!("unsupported npy version {}.{}", bytes[6], bytes[7])));
    }
    let len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let end = 10 + len;
    if bytes.len() < end {
        return Err(CliError::Format("truncated npy header".into()));
    }
    let text = std::str::from_utf8(&bytes[10..end])
        .map_err(|_| CliError::Format("npy header is not ASCII".into()))?;
    Ok((parse_dict(text)?, end))
}

fn dict_value<'a>(text: &'a str, key: &str) -> Result<&'a str> {
    let needle = format!("'{key}'");
    let start =
        text.find(&needle).ok_or_else(|| CliError::Format(format!("npy header lacks key {needle}")))?;
    let rest = text[start + needle.len()..].trim_start();
    let rest =
        rest.strip_prefix(':').ok_or_else(|| CliError::Format(format!("expected ':' after {needle}")))?;
    Ok(rest.trim_start())
}

fn parse_dict(text: &str) -> Result<Header> {
    let text = text.trim_end();
    if !(text.starts_with('{') && text.ends_with('}')) {
        return Err(CliError::Format("npy header is not a dict literal".into()));
    }

    let descr = dict_value(text, "descr")?;
    let dtype = if descr.starts_with("'<f4'") {
        Dtype::F32
    } else if descr.starts_with("'<f8'") {
        Dtype::F64
    } else {
        let shown: String = descr.chars().take_while(|&c| c != ',').collect();
        return Err(CliError::Format(format!("unsupported dtype {shown}; expected '<f4' or '<f8'")));
    };

    let fortran = dict_value(text, "fortran_order")?;
    if fortran.starts_with("True") {
        return Err(CliError::Format("fortran-order payloads are not supported".into()));
    } else if !fortran.starts_with("False") {
        return Err(CliError::Format("malformed fortran_order value".into()));
    }

    let shape_src = dict_value(text, "shape")?;
    let inner = shape_src
        .strip_prefix('(')
        .and_then(|s| s.split_once(')'))
        .map(|(inner, _)| inner)
        .ok_or_else(|| CliError::Format("malformed shape tuple".into()))?;
    let shape = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| CliError::Format(format!("bad shape entry '{s}'"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Header { dtype, shape })
}

/// Serialises a float array of the given shape, C order, little endian.
pub fn encode(shape: &[usize], dtype: Dtype, data: &[f64]) -> Vec<u8> {
    assert_eq!(shape.iter().product::<usize>(), data.len());
    let descr = match dtype {
        Dtype::F32 => "<f4",
        Dtype::F64 => "<f8",
    };
    let dims: Vec<String> = shape.iter().map(|d| d.to_string()).collect();
    let shape_txt =
        if shape.len() == 1 { format!("({},)", dims[0]) } else { format!("({})", dims.join(", ")) };
    let mut header = format!("{{'descr': '{descr}', 'fortran_order': False, 'shape': {shape_txt}, }}");
    let unpadded = 10 + header.len() + 1;
    header.push_str(&" ".repeat((64 - unpadded % 64) % 64));
    header.push('\n');

    let mut out = Vec::with_capacity(10 + header.len() + data.len() * dtype.size());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    match dtype {
        Dtype::F32 => data.iter().for_each(|&v| out.extend_from_slice(&(v as f32).to_le_bytes())),
        Dtype::F64 => data.iter().for_each(|v| out.extend_from_slice(&v.to_le_bytes())),
    }
    out
}

/// Writes `features` as a `(h, w, D)` `<f8` array.
pub fn write_feature_map(features: &FeatureMap, path: &Path) -> Result<()> {
    let shape = [features.height(), features.width(), features.channels()];
    write_atomic(path, &encode(&shape, Dtype::F64, features.data()))
}
