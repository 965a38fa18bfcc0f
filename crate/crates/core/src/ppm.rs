//! Binary PPM (P6, maxval 255) colour images as pure-quaternion signals.
//!
//! A pixel `(R, G, B)` becomes `(0, R/255, G/255, B/255)`. Pixel column `x`
//! and row `y` map to sample `(is, it) = (x, y)` on the grid with origin
//! `(0, 0)` and unit spacing.

use thiserror::Error;

use crate::grid::{GridSpec, QSignal2D};
use crate::quat::Quaternion;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("bad PPM: {0}")]
pub struct BadPpm(pub String);

/// How vector parts outside `[0, 1]` are mapped to bytes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClampMode {
    /// Clip each channel to `[0, 1]`.
    Clamp,
    /// Affinely map the global `[min, max]` over all channels onto `[0, 1]`.
    Rescale,
}

/// Side information lost when writing an image.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageStats {
    /// Largest `|w|` over the signal; the scalar part is not encoded.
    pub scalar_max_abs: f64,
    /// Channels that were clipped (always 0 under [`ClampMode::Rescale`]).
    pub clamped: usize,
    pub channel_min: f64,
    pub channel_max: f64,
}

pub fn image_to_qsig(bytes: &[u8]) -> Result<QSignal2D, BadPpm> {
    let mut p = Parser { buf: bytes, pos: 0 };
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        let found = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(BadPpm(format!("expected magic P6, found {found:?}")));
    }
    p.pos = 2;
    let width = p.number("width")?;
    let height = p.number("height")?;
    let maxval = p.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(BadPpm(format!("empty image {width}x{height}")));
    }
    if maxval != 255 {
        return Err(BadPpm(format!("maxval {maxval} unsupported (only 255)")));
    }
    match bytes.get(p.pos) {
        Some(c) if c.is_ascii_whitespace() => p.pos += 1,
        _ => return Err(BadPpm("missing separator after maxval".into())),
    }
    let need = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(3))
        .ok_or_else(|| BadPpm("dimensions overflow".into()))?;
    let pixels = &bytes[p.pos..];
    if pixels.len() < need {
        return Err(BadPpm(format!("pixel data has {} bytes, need {need}", pixels.len())));
    }
    let data = pixels[..need]
        .chunks_exact(3)
        .map(|c| Quaternion::new(0.0, c[0] as f64 / 255.0, c[1] as f64 / 255.0, c[2] as f64 / 255.0))
        .collect();
    let grid = GridSpec::new(0.0, 0.0, 1.0, 1.0, width, height).map_err(|e| BadPpm(e.to_string()))?;
    QSignal2D::new(grid, data).map_err(|e| BadPpm(e.to_string()))
}

pub fn qsig_to_image(sig: &QSignal2D, mode: ClampMode) -> (Vec<u8>, ImageStats) {
    let g = sig.grid();
    let mut stats = ImageStats {
        scalar_max_abs: 0.0,
        clamped: 0,
        channel_min: f64::INFINITY,
        channel_max: f64::NEG_INFINITY,
    };
    for q in sig.data() {
        stats.scalar_max_abs = stats.scalar_max_abs.max(q.w.abs());
        for v in q.vector() {
            stats.channel_min = stats.channel_min.min(v);
            stats.channel_max = stats.channel_max.max(v);
        }
    }
    let (offset, scale) = match mode {
        ClampMode::Clamp => (0.0, 1.0),
        ClampMode::Rescale => {
            let span = stats.channel_max - stats.channel_min;
            (stats.channel_min, if span > 0.0 { 1.0 / span } else { 0.0 })
        }
    };
    let mut out = format!("P6\n{} {}\n255\n", g.ns, g.nt).into_bytes();
    out.reserve(g.len() * 3);
    for q in sig.data() {
        for v in q.vector() {
            let x = (v - offset) * scale;
            if !(0.0..=1.0).contains(&x) {
                stats.clamped += 1;
            }
            out.push((x.clamp(0.0, 1.0) * 255.0).round() as u8);
        }
    }
    (out, stats)
}

struct Parser<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_space(&mut self) {
        while let Some(&c) = self.buf.get(self.pos) {
            if c == b'#' {
                while let Some(&c) = self.buf.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if c.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, BadPpm> {
        let before = self.pos;
        self.skip_space();
        if self.pos == before {
            return Err(BadPpm(format!("expected whitespace before {what}")));
        }
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| BadPpm(format!("cannot parse {what}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_pixel() {
        let sig = image_to_qsig(b"P6\n1 1\n255\n\xff\xff\xff").unwrap();
        assert_eq!(sig.data(), &[Quaternion::new(0.0, 1.0, 1.0, 1.0)]);
    }

    #[test]
    fn comments_and_layout() {
        let bytes = b"P6 # made by hand\n2 # width\n1\n255\n\x00\x80\xff\x01\x02\x03";
        let sig = image_to_qsig(bytes).unwrap();
        assert_eq!(sig.grid().shape(), (2, 1));
        assert_eq!(sig.at(0, 0), Quaternion::new(0.0, 0.0, 128.0 / 255.0, 1.0));
        assert_eq!(sig.at(1, 0), Quaternion::new(0.0, 1.0 / 255.0, 2.0 / 255.0, 3.0 / 255.0));
    }

    #[test]
    fn all_bytes_round_trip() {
        let (w, h) = (16usize, 16usize);
        let mut bytes = format!("P6\n{w} {h}\n255\n").into_bytes();
        for k in 0..w * h * 3 {
            bytes.push(((k * 7 + k / 3) % 256) as u8);
        }
        let sig = image_to_qsig(&bytes).unwrap();
        assert!(sig.data().iter().all(|q| q.w == 0.0));
        let (back, stats) = qsig_to_image(&sig, ClampMode::Clamp);
        assert_eq!(back, bytes);
        assert_eq!(stats.clamped, 0);
        assert_eq!(stats.scalar_max_abs, 0.0);
    }

    #[test]
    fn rejects_other_formats() {
        assert!(image_to_qsig(b"P5\n1 1\n255\n\x00").is_err());
        assert!(image_to_qsig(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00").is_err());
        assert!(image_to_qsig(b"P6\n1 x\n255\n").is_err());
        assert!(image_to_qsig(b"P6\n2 2\n255\n\x00\x00\x00").is_err());
        assert!(image_to_qsig(b"P6\n0 2\n255\n").is_err());
        assert!(image_to_qsig(b"").is_err());
    }

    #[test]
    fn clamping_and_scalar_side_channel() {
        let g = GridSpec::new(0.0, 0.0, 1.0, 1.0, 2, 1).unwrap();
        let sig = QSignal2D::new(g, vec![Quaternion::new(-3.0, 1.5, -0.5, 0.5), Quaternion::new(0.5, 0.0, 1.0, 0.25)]).unwrap();
        let (bytes, stats) = qsig_to_image(&sig, ClampMode::Clamp);
        assert_eq!(&bytes[bytes.len() - 6..], &[255, 0, 128, 0, 255, 64]);
        assert_eq!(stats.clamped, 2);
        assert_eq!(stats.scalar_max_abs, 3.0);
        let (bytes, stats) = qsig_to_image(&sig, ClampMode::Rescale);
        assert_eq!(&bytes[bytes.len() - 6..], &[255, 0, 128, 64, 191, 96]);
        assert_eq!(stats.clamped, 0);
    }
}
