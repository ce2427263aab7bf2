//! Mask files: binary PGM (`P5`, maxval 255) for writing; PGM or PNG for reading.

use std::fs;
use std::path::Path;

use spectral_vote_core::{BinaryMask, GrayMask};

use crate::atomic::write_atomic;
use crate::error::{CliError, Result};

/// Pixels above this gray level read back as foreground.
pub const FOREGROUND_THRESHOLD: u8 = 127;

pub fn encode_pgm(mask: &GrayMask) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", mask.width(), mask.height()).into_bytes();
    out.extend_from_slice(mask.values());
    out
}

/// Writes a binary mask as an 8-bit PGM: foreground 255, background 0.
pub fn write_mask(mask: &BinaryMask, path: &Path) -> Result<()> {
    write_atomic(path, &encode_pgm(&mask.to_gray()))
}

pub fn write_gray(mask: &GrayMask, path: &Path) -> Result<()> {
    write_atomic(path, &encode_pgm(mask))
}

/// Reads an 8-bit single-channel mask from a PGM (`P5`) or PNG file.
pub fn read_gray(path: &Path) -> Result<GrayMask> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let parsed = if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else if bytes.starts_with(b"\x89PNG") {
        decode_png(&bytes)
    } else {
        Err(CliError::Format("not a P5 PGM or PNG file".into()))
    };
    parsed.map_err(|e| e.with_path(path))
}

/// Reads a mask and binarises it at [`FOREGROUND_THRESHOLD`].
pub fn read_mask(path: &Path) -> Result<BinaryMask> {
    Ok(read_gray(path)?.threshold(FOREGROUND_THRESHOLD))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayMask> {
    // Header: magic, width, height, maxval, separated by whitespace with
    // optional `#` comments, then exactly one whitespace byte.
    let mut fields = Vec::with_capacity(4);
    let mut i = 0;
    while fields.len() < 4 {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return Err(CliError::Format("truncated PGM header".into()));
        }
        fields.push(std::str::from_utf8(&bytes[start..i]).unwrap_or("").to_string());
    }
    i += 1;
    if fields[0] != "P5" {
        return Err(CliError::Format("expected P5 magic".into()));
    }
    let num =
        |s: &str| s.parse::<usize>().map_err(|_| CliError::Format(format!("bad PGM header field '{s}'")));
    let (width, height, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval != 255 {
        return Err(CliError::Format(format!("PGM maxval {maxval} unsupported; expected 255")));
    }
    let payload = bytes.get(i..).unwrap_or(&[]);
    if payload.len() != width * height {
        return Err(CliError::Format(format!(
            "PGM payload holds {} bytes, {width}x{height} needs {}",
            payload.len(),
            width * height
        )));
    }
    Ok(GrayMask::new(height, width, payload.to_vec())?)
}

fn decode_png(bytes: &[u8]) -> Result<GrayMask> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| CliError::Format(format!("PNG decode failed: {e}")))?
        .into_luma8();
    let (w, h) = img.dimensions();
    Ok(GrayMask::new(h as usize, w as usize, img.into_raw())?)
}
