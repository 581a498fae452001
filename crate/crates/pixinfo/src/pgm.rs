//! Netpbm grayscale (P2 ASCII / P5 binary) reading and writing.
//!
//! Header tokens are separated by whitespace; `#` starts a comment that runs
//! to the end of the line. In P5 a single whitespace byte separates maxval
//! from the raster, and samples are 2 bytes big-endian when maxval > 255.

use pixinfo_core::Image;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("not a PGM file (expected P2 or P5 magic)")]
    BadMagic,
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("malformed sample at index {0}")]
    MalformedSample(usize),
    #[error("sample {index} has value {value}, exceeding maxval {maxval}")]
    ValueExceedsMaxval { index: usize, value: u32, maxval: u16 },
    #[error(transparent)]
    Image(#[from] pixinfo_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmMode {
    Ascii,
    Binary,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n' && c != b'\r') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        let tok = self.token().ok_or(PgmError::MalformedHeader(what))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or(PgmError::MalformedHeader(what))
    }
}

pub fn read_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(PgmError::BadMagic),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur.bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return Err(PgmError::BadMagic);
    }
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader("zero dimension"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::MalformedHeader("maxval must be in 1..=65535"));
    }
    let maxval = maxval as u16;
    let expected = width.checked_mul(height).ok_or(PgmError::MalformedHeader("dimensions overflow"))?;

    let check = |index: usize, value: u32| {
        if value > maxval as u32 {
            Err(PgmError::ValueExceedsMaxval { index, value, maxval })
        } else {
            Ok(value as u16)
        }
    };

    let mut pixels = Vec::with_capacity(expected);
    if binary {
        if !cur.bytes.get(cur.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            return Err(PgmError::MalformedHeader("missing whitespace before raster"));
        }
        let raster = &bytes[cur.pos + 1..];
        let width_bytes = if maxval > 255 { 2 } else { 1 };
        let found = raster.len() / width_bytes;
        if found < expected {
            return Err(PgmError::Truncated { expected, found });
        }
        for (index, chunk) in raster.chunks_exact(width_bytes).take(expected).enumerate() {
            let value = match chunk {
                [b] => *b as u32,
                [hi, lo] => u16::from_be_bytes([*hi, *lo]) as u32,
                _ => unreachable!(),
            };
            pixels.push(check(index, value)?);
        }
    } else {
        for index in 0..expected {
            let tok = cur.token().ok_or(PgmError::Truncated { expected, found: index })?;
            let value = std::str::from_utf8(tok)
                .ok()
                .and_then(|s| s.parse::<u32>().ok())
                .ok_or(PgmError::MalformedSample(index))?;
            pixels.push(check(index, value)?);
        }
    }
    Ok(Image::new(width, height, maxval, pixels)?)
}

pub fn write_pgm(img: &Image, mode: PgmMode) -> Vec<u8> {
    let magic = match mode {
        PgmMode::Ascii => "P2",
        PgmMode::Binary => "P5",
    };
    let mut out = format!("{magic}\n{} {}\n{}\n", img.width(), img.height(), img.maxval()).into_bytes();
    match mode {
        PgmMode::Ascii => {
            for row in img.pixels().chunks(img.width()) {
                let line: Vec<String> = row.iter().map(|p| p.to_string()).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmMode::Binary if img.maxval() > 255 => {
            for &p in img.pixels() {
                out.extend_from_slice(&p.to_be_bytes());
            }
        }
        PgmMode::Binary => out.extend(img.pixels().iter().map(|&p| p as u8)),
    }
    out
}
