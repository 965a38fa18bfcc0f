//! QSIG binary container.
//!
//! ```text
//! "QSG1" | u32 ns | u32 nt | f64 s_min | f64 t_min | f64 ds | f64 dt | ns·nt × (w, x, y, z) f64
//! ```
//!
//! All fields little-endian. Spectra append a provenance block after the
//! payload:
//!
//! ```text
//! "QPRV" | u8 transform (0 QFT, 1 QLCT) | u8 side | 6 f64 axes (μ1, μ2)
//!        | 2 f64 window (u_max, v_max) | 8 f64 (a1 b1 c1 d1 a2 b2 c2 d2)
//!        | u8 flags (bit 0: fractional phase removed) | 2 f64 (α, β)
//! ```

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::grid::{GridSpec, Provenance, QSignal2D, QSpectrum2D, Side};
use crate::qft::QftKind;
use crate::qlct::{LctKind, LctParams};
use crate::quat::{AxisPair, PureUnit, Quaternion};

pub const MAGIC: &[u8; 4] = b"QSG1";
const PROV_MAGIC: &[u8; 4] = b"QPRV";
const HEADER_LEN: usize = 4 + 4 + 4 + 4 * 8;
const PROV_LEN: usize = 4 + 1 + 1 + 6 * 8 + 2 * 8 + 8 * 8 + 1 + 2 * 8;

#[derive(Debug, Error)]
pub enum QsigError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a QSIG file (bad magic)")]
    BadMagic,
    #[error("unsupported QSIG version byte {0:#04x}")]
    BadVersion(u8),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("invalid header: {0}")]
    BadHeader(String),
    #[error("invalid provenance block: {0}")]
    BadProvenance(String),
    #[error("file has no provenance block")]
    MissingProvenance,
}

pub fn encode_qsig(sig: &QSignal2D) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + sig.data().len() * 32);
    write_body(&mut out, sig.grid(), sig.data());
    out
}

pub fn encode_qspec(spec: &QSpectrum2D) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + spec.data().len() * 32 + PROV_LEN);
    write_body(&mut out, spec.grid(), spec.data());
    write_provenance(&mut out, spec.grid(), spec.provenance());
    out
}

/// Decodes a signal. A trailing provenance block is accepted and ignored so
/// spectra can be read back as plain signals.
pub fn decode_qsig(bytes: &[u8]) -> Result<QSignal2D, QsigError> {
    let (grid, data, rest) = read_body(bytes)?;
    if !rest.is_empty() {
        read_provenance(rest)?;
    }
    QSignal2D::new(grid, data).map_err(|e| QsigError::BadHeader(e.to_string()))
}

pub fn decode_qspec(bytes: &[u8]) -> Result<QSpectrum2D, QsigError> {
    let (grid, data, rest) = read_body(bytes)?;
    if rest.is_empty() {
        return Err(QsigError::MissingProvenance);
    }
    let prov = read_provenance(rest)?;
    QSpectrum2D::new(grid, data, prov).map_err(|e| QsigError::BadHeader(e.to_string()))
}

pub fn save_qsig(sig: &QSignal2D, path: impl AsRef<Path>) -> Result<(), QsigError> {
    fs::write(path, encode_qsig(sig))?;
    Ok(())
}

pub fn load_qsig(path: impl AsRef<Path>) -> Result<QSignal2D, QsigError> {
    decode_qsig(&fs::read(path)?)
}

pub fn save_qspec(spec: &QSpectrum2D, path: impl AsRef<Path>) -> Result<(), QsigError> {
    fs::write(path, encode_qspec(spec))?;
    Ok(())
}

pub fn load_qspec(path: impl AsRef<Path>) -> Result<QSpectrum2D, QsigError> {
    decode_qspec(&fs::read(path)?)
}

fn write_body(out: &mut Vec<u8>, g: &GridSpec, data: &[Quaternion]) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.ns as u32).to_le_bytes());
    out.extend_from_slice(&(g.nt as u32).to_le_bytes());
    for v in [g.s_min, g.t_min, g.ds, g.dt] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for q in data {
        for v in q.to_array() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
}

fn read_body(bytes: &[u8]) -> Result<(GridSpec, Vec<Quaternion>, &[u8]), QsigError> {
    if bytes.len() < 4 || &bytes[..3] != &MAGIC[..3] {
        return Err(QsigError::BadMagic);
    }
    if bytes[3] != MAGIC[3] {
        return Err(QsigError::BadVersion(bytes[3]));
    }
    if bytes.len() < HEADER_LEN {
        return Err(QsigError::BadHeader(format!("header needs {HEADER_LEN} bytes, file has {}", bytes.len())));
    }
    let mut r = Reader { buf: bytes, pos: 4 };
    let ns = r.u32() as usize;
    let nt = r.u32() as usize;
    let (s_min, t_min, ds, dt) = (r.f64(), r.f64(), r.f64(), r.f64());
    let grid = GridSpec::new(s_min, t_min, ds, dt, ns, nt).map_err(|e| QsigError::BadHeader(e.to_string()))?;
    let expected = ns
        .checked_mul(nt)
        .and_then(|n| n.checked_mul(32))
        .ok_or_else(|| QsigError::BadHeader(format!("grid {ns}x{nt} too large")))?;
    let found = bytes.len() - HEADER_LEN;
    if found < expected {
        return Err(QsigError::TruncatedPayload { expected, found });
    }
    let data = (0..ns * nt).map(|_| Quaternion::new(r.f64(), r.f64(), r.f64(), r.f64())).collect();
    Ok((grid, data, &bytes[HEADER_LEN + expected..]))
}

fn write_provenance(out: &mut Vec<u8>, g: &GridSpec, prov: &Provenance) {
    out.extend_from_slice(PROV_MAGIC);
    let (transform, axes, lct, frft) = match *prov {
        Provenance::Qft(k) => (0u8, k.axes, [0.0; 8], None),
        Provenance::Qlct { kind, frft_phase } => {
            let (a1, a2) = (kind.a1, kind.a2);
            (1u8, kind.axes, [a1.a, a1.b, a1.c, a1.d, a2.a, a2.b, a2.c, a2.d], frft_phase)
        }
    };
    out.push(transform);
    out.push(prov.side().tag());
    let m1 = axes.mu1.coeffs();
    let m2 = axes.mu2.coeffs();
    let window = [g.s_min.abs().max(g.s_max().abs()), g.t_min.abs().max(g.t_max().abs())];
    let (flag, phase) = match frft {
        Some((a, b)) => (1u8, [a, b]),
        None => (0u8, [0.0, 0.0]),
    };
    for v in m1.iter().chain(&m2).chain(&window).chain(&lct) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(flag);
    for v in phase {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn read_provenance(bytes: &[u8]) -> Result<Provenance, QsigError> {
    let bad = |m: String| QsigError::BadProvenance(m);
    if bytes.len() != PROV_LEN {
        return Err(bad(format!("{} trailing bytes, expected {PROV_LEN}", bytes.len())));
    }
    if &bytes[..4] != PROV_MAGIC {
        return Err(bad("missing block tag".into()));
    }
    let mut r = Reader { buf: bytes, pos: 4 };
    let transform = r.u8();
    let side = Side::from_tag(r.u8()).ok_or_else(|| bad("unknown side tag".into()))?;
    let m: Vec<f64> = (0..6).map(|_| r.f64()).collect();
    let _window = (r.f64(), r.f64());
    let lct: Vec<f64> = (0..8).map(|_| r.f64()).collect();
    let flag = r.u8();
    let phase = (r.f64(), r.f64());

    let mu1 = PureUnit::new(m[0], m[1], m[2]).map_err(|e| bad(e.to_string()))?;
    let mu2 = PureUnit::new(m[3], m[4], m[5]).map_err(|e| bad(e.to_string()))?;
    let axes = AxisPair::new(mu1, mu2).map_err(|e| bad(e.to_string()))?;
    match transform {
        0 => Ok(Provenance::Qft(QftKind { side, axes })),
        1 => {
            let a1 = LctParams::new(lct[0], lct[1], lct[2], lct[3]).map_err(|e| bad(e.to_string()))?;
            let a2 = LctParams::new(lct[4], lct[5], lct[6], lct[7]).map_err(|e| bad(e.to_string()))?;
            let frft_phase = match flag {
                0 => None,
                1 => Some(phase),
                f => return Err(bad(format!("unknown flags {f:#04x}"))),
            };
            Ok(Provenance::Qlct { kind: LctKind { side, a1, a2, axes }, frft_phase })
        }
        t => Err(bad(format!("unknown transform tag {t}"))),
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let mut b = [0u8; N];
        b.copy_from_slice(&self.buf[self.pos..self.pos + N]);
        self.pos += N;
        b
    }
    fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }
    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }
    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signal(n: usize, seed: u64) -> QSignal2D {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GridSpec::new(-1.25, 0.5, 0.3, 0.7, n, n).unwrap();
        let data = (0..n * n).map(|_| Quaternion::new(rng.gen(), rng.gen(), rng.gen(), rng.gen::<f64>() * 1e-300)).collect();
        QSignal2D::new(g, data).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let sig = random_signal(8, 1);
        let back = decode_qsig(&encode_qsig(&sig)).unwrap();
        assert_eq!(back.grid(), sig.grid());
        for (a, b) in sig.data().iter().zip(back.data()) {
            assert_eq!(a.to_array().map(f64::to_bits), b.to_array().map(f64::to_bits));
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.qsig");
        let sig = random_signal(5, 2);
        save_qsig(&sig, &path).unwrap();
        assert_eq!(load_qsig(&path).unwrap(), sig);
    }

    #[test]
    fn header_layout() {
        let sig = random_signal(3, 3);
        let bytes = encode_qsig(&sig);
        assert_eq!(&bytes[..4], b"QSG1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(bytes[12..20].try_into().unwrap()), -1.25);
        assert_eq!(bytes.len(), HEADER_LEN + 9 * 32);
        let w0 = f64::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 8].try_into().unwrap());
        assert_eq!(w0, sig.data()[0].w);
    }

    #[test]
    fn wrong_magic() {
        let mut bytes = encode_qsig(&random_signal(2, 4));
        bytes[0] = b'X';
        assert!(matches!(decode_qsig(&bytes), Err(QsigError::BadMagic)));
        assert!(matches!(decode_qsig(b"QS"), Err(QsigError::BadMagic)));
    }

    #[test]
    fn wrong_version() {
        let mut bytes = encode_qsig(&random_signal(2, 4));
        bytes[3] = b'2';
        assert!(matches!(decode_qsig(&bytes), Err(QsigError::BadVersion(b'2'))));
    }

    #[test]
    fn truncated_payload() {
        let bytes = encode_qsig(&random_signal(4, 5));
        let cut = &bytes[..HEADER_LEN + 3 * 32];
        assert!(matches!(
            decode_qsig(cut),
            Err(QsigError::TruncatedPayload { expected: 512, found: 96 })
        ));
    }

    #[test]
    fn stray_trailing_bytes_are_rejected() {
        let mut bytes = encode_qsig(&random_signal(2, 6));
        bytes.extend_from_slice(&[1, 2, 3]);
        assert!(matches!(decode_qsig(&bytes), Err(QsigError::BadProvenance(_))));
    }

    #[test]
    fn spectrum_round_trip() {
        let sig = random_signal(4, 7);
        let axes = AxisPair::from_quaternions(
            Quaternion::new(0.0, 0.6, 0.8, 0.0),
            Quaternion::new(0.0, 0.0, 0.0, 1.0),
        )
        .unwrap();
        let kind = LctKind {
            side: Side::LeftSided,
            a1: LctParams::new(2.0, 0.5, 1.0, 0.75).unwrap(),
            a2: LctParams::new(1.0, 1.0, 0.0, 1.0).unwrap(),
            axes,
        };
        let spec = QSpectrum2D::new(*sig.grid(), sig.data().to_vec(), Provenance::Qlct { kind, frft_phase: Some((0.3, -0.2)) }).unwrap();
        let bytes = encode_qspec(&spec);
        assert_eq!(decode_qspec(&bytes).unwrap(), spec);
        assert_eq!(decode_qsig(&bytes).unwrap(), sig);
        assert!(matches!(decode_qspec(&encode_qsig(&sig)), Err(QsigError::MissingProvenance)));
    }
}
