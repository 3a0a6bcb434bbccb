//! Binary portable pixmap (P6), graymap (P5) and bitmap (P4) codecs, 8-bit only.

use thiserror::Error;

use crate::raster::{BitImage, GrayImage, RgbImage};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnmError {
    #[error("not a binary portable anymap (magic {0:?})")]
    BadMagic(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("expected a {expected} file, found {found}")]
    WrongKind { expected: &'static str, found: &'static str },
}

/// Any decoded anymap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pnm {
    Bitmap(BitImage),
    Graymap(GrayImage),
    Pixmap(RgbImage),
}

impl Pnm {
    fn kind(&self) -> &'static str {
        match self {
            Pnm::Bitmap(_) => "bitmap (P4)",
            Pnm::Graymap(_) => "graymap (P5)",
            Pnm::Pixmap(_) => "pixmap (P6)",
        }
    }
}

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.reserve(img.pixels().len() * 3);
    for px in img.pixels() {
        out.extend_from_slice(px);
    }
    out
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Rows are packed MSB first and padded to whole bytes; a set bit is black.
pub fn encode_pbm(img: &BitImage) -> Vec<u8> {
    let mut out = format!("P4\n{} {}\n", img.width(), img.height()).into_bytes();
    let row_bytes = img.width().div_ceil(8);
    for row in img.pixels().chunks(img.width().max(1)).take(img.height()) {
        let mut packed = vec![0u8; row_bytes];
        for (u, &bit) in row.iter().enumerate() {
            if bit {
                packed[u / 8] |= 0x80 >> (u % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    out
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PnmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PnmError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PnmError::MalformedHeader(format!("bad {what}")))
    }

    /// Consumes the single whitespace byte that ends the header.
    fn end(&mut self) -> Result<usize, PnmError> {
        match self.bytes.get(self.pos) {
            Some(c) if c.is_ascii_whitespace() => Ok(self.pos + 1),
            _ => Err(PnmError::MalformedHeader("header not terminated by whitespace".into())),
        }
    }
}

fn payload(bytes: &[u8], start: usize, expected: usize) -> Result<&[u8], PnmError> {
    let found = bytes.len().saturating_sub(start);
    if found < expected {
        return Err(PnmError::Truncated { expected, found });
    }
    Ok(&bytes[start..start + expected])
}

pub fn decode(bytes: &[u8]) -> Result<Pnm, PnmError> {
    if bytes.len() < 2 || bytes[0] != b'P' || !matches!(bytes[1], b'4' | b'5' | b'6') {
        let magic = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(PnmError::BadMagic(magic));
    }
    let kind = bytes[1];
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")? as usize;
    let height = h.number("height")? as usize;
    if kind != b'4' {
        let maxval = h.number("maxval")?;
        if maxval != 255 {
            return Err(PnmError::UnsupportedMaxval(maxval));
        }
    }
    let start = h.end()?;
    let n = width
        .checked_mul(height)
        .ok_or_else(|| PnmError::MalformedHeader("image too large".into()))?;

    Ok(match kind {
        b'6' => {
            let data = payload(bytes, start, n * 3)?;
            Pnm::Pixmap(RgbImage::from_pixels(
                width,
                height,
                data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect(),
            ))
        }
        b'5' => Pnm::Graymap(GrayImage::from_pixels(width, height, payload(bytes, start, n)?.to_vec())),
        _ => {
            let row_bytes = width.div_ceil(8);
            let data = payload(bytes, start, row_bytes * height)?;
            let mut bits = Vec::with_capacity(n);
            for row in 0..height {
                for u in 0..width {
                    bits.push(data[row * row_bytes + u / 8] & (0x80 >> (u % 8)) != 0);
                }
            }
            Pnm::Bitmap(BitImage::from_pixels(width, height, bits))
        }
    })
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage, PnmError> {
    match decode(bytes)? {
        Pnm::Pixmap(img) => Ok(img),
        other => Err(PnmError::WrongKind { expected: "pixmap (P6)", found: other.kind() }),
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, PnmError> {
    match decode(bytes)? {
        Pnm::Graymap(img) => Ok(img),
        other => Err(PnmError::WrongKind { expected: "graymap (P5)", found: other.kind() }),
    }
}

pub fn decode_pbm(bytes: &[u8]) -> Result<BitImage, PnmError> {
    match decode(bytes)? {
        Pnm::Bitmap(img) => Ok(img),
        other => Err(PnmError::WrongKind { expected: "bitmap (P4)", found: other.kind() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pbm_packing() {
        let img = BitImage::from_pixels(10, 2, (0..20).map(|i| i % 3 == 0).collect());
        let enc = encode_pbm(&img);
        assert!(enc.starts_with(b"P4\n10 2\n"));
        assert_eq!(enc.len(), 8 + 2 * 2);
        // row 0: bits 0,3,6,9 -> 1001_0010 01xx_xxxx
        assert_eq!(&enc[8..10], &[0b1001_0010, 0b0100_0000]);
        assert_eq!(decode_pbm(&enc).unwrap(), img);
    }

    #[test]
    fn header_comments_are_skipped() {
        let bytes = b"P5\n# made by hand\n2 1\n# max\n255\n\x07\x09";
        let g = decode_pgm(bytes).unwrap();
        assert_eq!(g.pixels(), &[7, 9]);
    }

    #[test]
    fn errors() {
        assert!(matches!(decode(b"GIF89a"), Err(PnmError::BadMagic(_))));
        assert!(matches!(decode(b""), Err(PnmError::BadMagic(_))));
        assert!(matches!(decode(b"P3\n1 1\n255\n0 0 0"), Err(PnmError::BadMagic(_))));
        assert_eq!(decode(b"P5\n2 2\n255\n\x01"), Err(PnmError::Truncated { expected: 4, found: 1 }));
        assert_eq!(decode(b"P5\n1 1\n65535\n\x00\x00"), Err(PnmError::UnsupportedMaxval(65535)));
        assert!(matches!(decode(b"P6\nx 1\n255\n"), Err(PnmError::MalformedHeader(_))));
        assert!(matches!(
            decode_ppm(&encode_pgm(&GrayImage::from_pixels(1, 1, vec![3]))),
            Err(PnmError::WrongKind { .. })
        ));
    }

    proptest! {
        #[test]
        fn pixmap_round_trip(w in 1usize..12, h in 1usize..12, seed in any::<u8>()) {
            let img = RgbImage::from_fn(w, h, |u, v| {
                let x = (u * 31 + v * 17) as u8 ^ seed;
                [x, x.wrapping_mul(3), x.wrapping_add(seed)]
            });
            prop_assert_eq!(decode_ppm(&encode_ppm(&img)).unwrap(), img);
        }

        #[test]
        fn graymap_and_bitmap_round_trip(w in 1usize..20, h in 1usize..9, data in proptest::collection::vec(any::<u8>(), 180)) {
            let g = GrayImage::from_pixels(w, h, data[..w * h].to_vec());
            prop_assert_eq!(decode_pgm(&encode_pgm(&g)).unwrap(), g);
            let b = BitImage::from_pixels(w, h, data[..w * h].iter().map(|x| x & 1 == 1).collect());
            prop_assert_eq!(decode_pbm(&encode_pbm(&b)).unwrap(), b);
        }
    }
}
