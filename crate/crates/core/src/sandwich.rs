//! Separable kernel application shared by every transform.
//!
//! A transform along one axis is a table `T[out][in]` of quaternions with
//! the quadrature weight already folded in. Because quaternion products do
//! not commute, each pass also says whether the table multiplies the data
//! from the left or from the right.

use rayon::prelude::*;

use crate::quat::Quaternion;

/// One-axis linear operator.
#[derive(Clone, Debug)]
pub(crate) enum AxisOp {
    Dense { rows: usize, cols: usize, table: Vec<Quaternion> },
    /// Pointwise multiplier; output index equals input index.
    Diagonal(Vec<Quaternion>),
}

impl AxisOp {
    /// `table[o][i] = kernel(out[o], inp[i]) * weight`.
    pub fn dense(out: &[f64], inp: &[f64], weight: f64, kernel: impl Fn(f64, f64) -> Quaternion + Sync) -> Self {
        let cols = inp.len();
        let mut table = vec![Quaternion::ZERO; out.len() * cols];
        table.par_chunks_mut(cols.max(1)).zip(out.par_iter()).for_each(|(row, &o)| {
            for (x, &i) in row.iter_mut().zip(inp) {
                *x = kernel(o, i) * weight;
            }
        });
        AxisOp::Dense { rows: out.len(), cols, table }
    }

    fn out_len(&self, in_len: usize) -> usize {
        match self {
            AxisOp::Dense { rows, cols, .. } => {
                assert_eq!(*cols, in_len, "operator width does not match data");
                *rows
            }
            AxisOp::Diagonal(d) => {
                assert_eq!(d.len(), in_len, "operator width does not match data");
                in_len
            }
        }
    }
}

/// Order and side of the two kernels relative to the data `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Placement {
    /// `Kx · f · Ky`
    Sandwich,
    /// `f · Kx · Ky`
    RightXY,
    /// `f · Ky · Kx`
    RightYX,
    /// `Kx · Ky · f`
    LeftXY,
    /// `Ky · Kx · f`
    LeftYX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mult {
    Left,
    Right,
}

#[inline]
fn prod(m: Mult, k: Quaternion, f: Quaternion) -> Quaternion {
    match m {
        Mult::Left => k * f,
        Mult::Right => f * k,
    }
}

/// Applies both axis operators to row-major `data` (`nt` rows of `ns`).
/// Returns the output together with its `(nx, ny)` shape.
pub(crate) fn apply(
    data: &[Quaternion],
    ns: usize,
    nt: usize,
    opx: &AxisOp,
    opy: &AxisOp,
    placement: Placement,
) -> (Vec<Quaternion>, usize, usize) {
    assert_eq!(data.len(), ns * nt);
    let (first_x, mx, my) = match placement {
        Placement::Sandwich => (false, Mult::Left, Mult::Right),
        Placement::RightXY => (true, Mult::Right, Mult::Right),
        Placement::RightYX => (false, Mult::Right, Mult::Right),
        Placement::LeftXY => (false, Mult::Left, Mult::Left),
        Placement::LeftYX => (true, Mult::Left, Mult::Left),
    };
    if first_x {
        let (tmp, nx) = x_pass(data, ns, nt, opx, mx);
        let (out, ny) = y_pass(&tmp, nx, nt, opy, my);
        (out, nx, ny)
    } else {
        let (tmp, ny) = y_pass(data, ns, nt, opy, my);
        let (out, nx) = x_pass(&tmp, ns, ny, opx, mx);
        (out, nx, ny)
    }
}

fn x_pass(data: &[Quaternion], ns: usize, nt: usize, op: &AxisOp, m: Mult) -> (Vec<Quaternion>, usize) {
    let nx = op.out_len(ns);
    let mut out = vec![Quaternion::ZERO; nx * nt];
    out.par_chunks_mut(nx).zip(data.par_chunks(ns)).for_each(|(orow, irow)| match op {
        AxisOp::Dense { table, .. } => {
            for (o, trow) in orow.iter_mut().zip(table.chunks_exact(ns)) {
                let mut acc = Quaternion::ZERO;
                for (&k, &f) in trow.iter().zip(irow) {
                    acc += prod(m, k, f);
                }
                *o = acc;
            }
        }
        AxisOp::Diagonal(d) => {
            for ((o, &k), &f) in orow.iter_mut().zip(d).zip(irow) {
                *o = prod(m, k, f);
            }
        }
    });
    (out, nx)
}

fn y_pass(data: &[Quaternion], ns: usize, nt: usize, op: &AxisOp, m: Mult) -> (Vec<Quaternion>, usize) {
    let ny = op.out_len(nt);
    let mut out = vec![Quaternion::ZERO; ns * ny];
    out.par_chunks_mut(ns).enumerate().for_each(|(v, orow)| match op {
        AxisOp::Dense { table, .. } => {
            let trow = &table[v * nt..(v + 1) * nt];
            for (t, &k) in trow.iter().enumerate() {
                let irow = &data[t * ns..(t + 1) * ns];
                for (o, &f) in orow.iter_mut().zip(irow) {
                    *o += prod(m, k, f);
                }
            }
        }
        AxisOp::Diagonal(d) => {
            let irow = &data[v * ns..(v + 1) * ns];
            for (o, &f) in orow.iter_mut().zip(irow) {
                *o = prod(m, d[v], f);
            }
        }
    });
    (out, ny)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rq(rng: &mut ChaCha8Rng) -> Quaternion {
        Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn matches_quadruple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (ns, nt, nx, ny) = (5, 4, 3, 6);
        let f: Vec<Quaternion> = (0..ns * nt).map(|_| rq(&mut rng)).collect();
        let tx: Vec<Quaternion> = (0..nx * ns).map(|_| rq(&mut rng)).collect();
        let ty: Vec<Quaternion> = (0..ny * nt).map(|_| rq(&mut rng)).collect();
        let opx = AxisOp::Dense { rows: nx, cols: ns, table: tx.clone() };
        let opy = AxisOp::Dense { rows: ny, cols: nt, table: ty.clone() };
        for p in [Placement::Sandwich, Placement::RightXY, Placement::RightYX, Placement::LeftXY, Placement::LeftYX] {
            let (out, ox, oy) = apply(&f, ns, nt, &opx, &opy, p);
            assert_eq!((ox, oy), (nx, ny));
            for v in 0..ny {
                for u in 0..nx {
                    let mut want = Quaternion::ZERO;
                    for t in 0..nt {
                        for s in 0..ns {
                            let (a, b, q) = (tx[u * ns + s], ty[v * nt + t], f[t * ns + s]);
                            want += match p {
                                Placement::Sandwich => a * q * b,
                                Placement::RightXY => q * a * b,
                                Placement::RightYX => q * b * a,
                                Placement::LeftXY => a * b * q,
                                Placement::LeftYX => b * a * q,
                            };
                        }
                    }
                    assert!((out[v * nx + u] - want).abs() < 1e-12, "{p:?}");
                }
            }
        }
    }

    #[test]
    fn diagonal_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (ns, nt) = (4, 3);
        let f: Vec<Quaternion> = (0..ns * nt).map(|_| rq(&mut rng)).collect();
        let d: Vec<Quaternion> = (0..ns).map(|_| rq(&mut rng)).collect();
        let mut table = vec![Quaternion::ZERO; ns * ns];
        for k in 0..ns {
            table[k * ns + k] = d[k];
        }
        let ty: Vec<Quaternion> = (0..nt * nt).map(|_| rq(&mut rng)).collect();
        let opy = AxisOp::Dense { rows: nt, cols: nt, table: ty };
        for p in [Placement::Sandwich, Placement::RightYX, Placement::LeftXY] {
            let a = apply(&f, ns, nt, &AxisOp::Diagonal(d.clone()), &opy, p).0;
            let b = apply(&f, ns, nt, &AxisOp::Dense { rows: ns, cols: ns, table: table.clone() }, &opy, p).0;
            for (x, y) in a.iter().zip(&b) {
                assert!((*x - *y).abs() < 1e-14);
            }
        }
    }
}
