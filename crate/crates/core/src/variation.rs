//! Discrete two-dimensional variation: mixed differences, Vitali sums over
//! nets, Hardy-type bounded-variation checks, quasi-monotonicity and the
//! splitting of a field into two quasi-monotone parts.

use thiserror::Error;

use crate::grid::QSignal2D;

/// Slack allowed on the non-negativity of differences.
pub const QUASI_MONOTONE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationError {
    #[error("cell ({i}, {j}) is outside the {ns}x{nt} node grid")]
    IndexOutOfRange { i: usize, j: usize, ns: usize, nt: usize },
    #[error("invalid net: {0}")]
    InvalidNet(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("net cut {0} is not a node of the field")]
    CutNotOnGrid(f64),
}

/// Real values on a tensor grid of nodes; `values[j * ns + i] = f(s_i, t_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    s: Vec<f64>,
    t: Vec<f64>,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(s: Vec<f64>, t: Vec<f64>, values: Vec<f64>) -> Result<Self, VariationError> {
        check_axis(&s).map_err(VariationError::InvalidField)?;
        check_axis(&t).map_err(VariationError::InvalidField)?;
        if values.len() != s.len() * t.len() {
            return Err(VariationError::InvalidField(format!(
                "{} values for {}x{} nodes",
                values.len(),
                s.len(),
                t.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(VariationError::InvalidField("non-finite value".into()));
        }
        Ok(Self { s, t, values })
    }

    pub fn from_fn(s: Vec<f64>, t: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self, VariationError> {
        let values = t.iter().flat_map(|&tj| s.iter().map(move |&si| (si, tj))).map(|(si, tj)| f(si, tj)).collect();
        Self::new(s, t, values)
    }

    /// One real component of a signal, on its sample midpoints.
    pub fn from_component(sig: &QSignal2D, c: usize) -> Result<Self, VariationError> {
        let g = sig.grid();
        Self::new(g.s_coords(), g.t_coords(), sig.component(c))
    }

    pub fn ns(&self) -> usize {
        self.s.len()
    }

    pub fn nt(&self) -> usize {
        self.t.len()
    }

    pub fn s_nodes(&self) -> &[f64] {
        &self.s
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.s.len() + i]
    }
}

fn check_axis(x: &[f64]) -> Result<(), String> {
    if x.len() < 2 {
        return Err(format!("need at least 2 nodes per axis, got {}", x.len()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err("non-finite node".into());
    }
    if x.windows(2).any(|w| w[1] <= w[0]) {
        return Err("nodes must be strictly increasing".into());
    }
    Ok(())
}

/// Lines `s = s_k`, `t = t_l` cutting the rectangle into cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Net {
    s_cuts: Vec<f64>,
    t_cuts: Vec<f64>,
}

impl Net {
    pub fn new(s_cuts: Vec<f64>, t_cuts: Vec<f64>) -> Result<Self, VariationError> {
        check_axis(&s_cuts).map_err(VariationError::InvalidNet)?;
        check_axis(&t_cuts).map_err(VariationError::InvalidNet)?;
        Ok(Self { s_cuts, t_cuts })
    }

    /// The finest net a field supports: all of its nodes.
    pub fn from_field(f: &RealField) -> Self {
        Self { s_cuts: f.s.clone(), t_cuts: f.t.clone() }
    }

    pub fn s_cuts(&self) -> &[f64] {
        &self.s_cuts
    }

    pub fn t_cuts(&self) -> &[f64] {
        &self.t_cuts
    }

    /// Every `2^level`-th cut, always keeping both ends.
    pub fn coarsened(&self, level: u32) -> Self {
        let pick = |x: &[f64]| {
            let step = 1usize << level;
            let mut v: Vec<f64> = x.iter().step_by(step).copied().collect();
            if *v.last().unwrap() != *x.last().unwrap() {
                v.push(*x.last().unwrap());
            }
            v
        };
        Self { s_cuts: pick(&self.s_cuts), t_cuts: pick(&self.t_cuts) }
    }

    /// This net followed by its dyadic coarsenings, down to the coarsest
    /// one with a single cell per axis.
    pub fn dyadic_sweep(&self) -> Vec<Net> {
        let mut out = vec![self.clone()];
        let mut level = 1;
        while (1usize << level) < self.s_cuts.len().max(self.t_cuts.len()) {
            out.push(self.coarsened(level));
            level += 1;
        }
        out
    }
}

/// `(Δ11, Δ10, Δ01)` at node `(i, j)`:
/// `Δ10 = f(i+1,j) − f(i,j)`, `Δ01 = f(i,j+1) − f(i,j)`,
/// `Δ11 = f(i+1,j+1) − f(i+1,j) − f(i,j+1) + f(i,j)`.
pub fn mixed_difference(f: &RealField, i: usize, j: usize) -> Result<(f64, f64, f64), VariationError> {
    if i + 1 >= f.ns() || j + 1 >= f.nt() {
        return Err(VariationError::IndexOutOfRange { i, j, ns: f.ns(), nt: f.nt() });
    }
    Ok(diffs(f, i, j))
}

#[inline]
fn diffs(f: &RealField, i: usize, j: usize) -> (f64, f64, f64) {
    let (a, b, c, d) = (f.at(i, j), f.at(i + 1, j), f.at(i, j + 1), f.at(i + 1, j + 1));
    (d - b - c + a, b - a, c - a)
}

/// Compensated summation, so totals do not depend on accumulation drift.
fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

fn node_indices(nodes: &[f64], cuts: &[f64]) -> Result<Vec<usize>, VariationError> {
    cuts.iter()
        .map(|&c| {
            let k = nodes.partition_point(|&x| x < c);
            let hit = |k: usize| k < nodes.len() && (nodes[k] - c).abs() <= 1e-12 * c.abs().max(1.0);
            if hit(k) {
                Ok(k)
            } else if k > 0 && hit(k - 1) {
                Ok(k - 1)
            } else {
                Err(VariationError::CutNotOnGrid(c))
            }
        })
        .collect()
}

/// `Σ |Δ11 f|` over the cells of `net`; every cut must be a node of `f`.
pub fn vitali_variation(f: &RealField, net: &Net) -> Result<f64, VariationError> {
    let is = node_indices(&f.s, &net.s_cuts)?;
    let js = node_indices(&f.t, &net.t_cuts)?;
    Ok(neumaier(js.windows(2).flat_map(|jw| {
        is.windows(2).map(move |iw| (f.at(iw[1], jw[1]) - f.at(iw[1], jw[0]) - f.at(iw[0], jw[1]) + f.at(iw[0], jw[0])).abs())
    })))
}

/// 1D variation `Σ |x_{k+1} − x_k|`.
pub fn variation_1d(values: &[f64]) -> f64 {
    neumaier(values.windows(2).map(|w| (w[1] - w[0]).abs()))
}

/// Parameters of [`hardy_bvf_check`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HardyOptions {
    /// Each of the three sums must stay at or below this.
    pub bound: f64,
    /// Index into the net's `t` cuts of the section `t = const` whose
    /// variation in `s` is measured; middle cut by default.
    pub row: Option<usize>,
    /// Index into the net's `s` cuts of the section `s = const`.
    pub col: Option<usize>,
}

impl Default for HardyOptions {
    fn default() -> Self {
        Self { bound: 1e6, row: None, col: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VariationReport {
    pub vitali: f64,
    pub line_var_s: f64,
    pub line_var_t: f64,
    pub is_hardy_bvf: bool,
    pub nets_tested: usize,
}

impl VariationReport {
    pub const CSV_HEADER: &'static str = "vitali,line_var_s,line_var_t,is_hardy_bvf,nets_tested";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{},{}",
            self.vitali, self.line_var_s, self.line_var_t, self.is_hardy_bvf, self.nets_tested
        )
    }
}

/// Vitali sum and one section variation per axis, each maximised over `net`
/// and its dyadic coarsenings, compared against `opts.bound`.
pub fn hardy_bvf_check(f: &RealField, net: &Net, opts: HardyOptions) -> Result<VariationReport, VariationError> {
    let is = node_indices(&f.s, &net.s_cuts)?;
    let js = node_indices(&f.t, &net.t_cuts)?;
    let row = opts.row.unwrap_or(js.len() / 2);
    let col = opts.col.unwrap_or(is.len() / 2);
    if row >= js.len() || col >= is.len() {
        return Err(VariationError::IndexOutOfRange { i: col, j: row, ns: is.len(), nt: js.len() });
    }
    let (t_fix, s_fix) = (net.t_cuts[row], net.s_cuts[col]);
    let (j_fix, i_fix) = (js[row], is[col]);

    let sweep = net.dyadic_sweep();
    let mut report = VariationReport { vitali: 0.0, line_var_s: 0.0, line_var_t: 0.0, is_hardy_bvf: false, nets_tested: sweep.len() };
    for sub in &sweep {
        report.vitali = report.vitali.max(vitali_variation(f, sub)?);
        // the fixed sections are kept in every subnet
        let mut sc = sub.s_cuts.clone();
        let mut tc = sub.t_cuts.clone();
        if !sc.contains(&s_fix) {
            sc.push(s_fix);
            sc.sort_by(f64::total_cmp);
        }
        if !tc.contains(&t_fix) {
            tc.push(t_fix);
            tc.sort_by(f64::total_cmp);
        }
        let si = node_indices(&f.s, &sc)?;
        let ti = node_indices(&f.t, &tc)?;
        let along_s: Vec<f64> = si.iter().map(|&i| f.at(i, j_fix)).collect();
        let along_t: Vec<f64> = ti.iter().map(|&j| f.at(i_fix, j)).collect();
        report.line_var_s = report.line_var_s.max(variation_1d(&along_s));
        report.line_var_t = report.line_var_t.max(variation_1d(&along_t));
    }
    let ok = |x: f64| x.is_finite() && x <= opts.bound;
    report.is_hardy_bvf = ok(report.vitali) && ok(report.line_var_s) && ok(report.line_var_t);
    Ok(report)
}

/// `Δ11 ≥ 0` on every cell and `f` non-decreasing along every row and
/// column, each up to [`QUASI_MONOTONE_TOL`].
pub fn quasi_monotone_check(f: &RealField) -> bool {
    let tol = -QUASI_MONOTONE_TOL;
    let (ns, nt) = (f.ns(), f.nt());
    for j in 0..nt {
        for i in 0..ns {
            if i + 1 < ns && f.at(i + 1, j) - f.at(i, j) < tol {
                return false;
            }
            if j + 1 < nt && f.at(i, j + 1) - f.at(i, j) < tol {
                return false;
            }
            if i + 1 < ns && j + 1 < nt && diffs(f, i, j).0 < tol {
                return false;
            }
        }
    }
    true
}

/// Writes `f = f1 − f2` with both parts quasi-monotone.
///
/// `f1 = f(0,0) + g⁺ + h⁺ + P` and `f2 = g⁻ + h⁻ + N`, where `g⁺, g⁻` are the
/// 1D Jordan parts of the bottom row, `h⁺, h⁻` those of the left column, and
/// `P`, `N` accumulate the positive and negative parts of `Δ11` over the
/// cells below and to the left of each node.
pub fn jordan_split(f: &RealField) -> (RealField, RealField) {
    let (ns, nt) = (f.ns(), f.nt());
    let mut gp = vec![0.0; ns];
    let mut gm = vec![0.0; ns];
    for i in 1..ns {
        let d = f.at(i, 0) - f.at(i - 1, 0);
        gp[i] = gp[i - 1] + d.max(0.0);
        gm[i] = gm[i - 1] + (-d).max(0.0);
    }
    let mut hp = vec![0.0; nt];
    let mut hm = vec![0.0; nt];
    for j in 1..nt {
        let d = f.at(0, j) - f.at(0, j - 1);
        hp[j] = hp[j - 1] + d.max(0.0);
        hm[j] = hm[j - 1] + (-d).max(0.0);
    }
    // P(i,j) = P(i−1,j) + P(i,j−1) − P(i−1,j−1) + Δ11⁺(i−1,j−1)
    let mut p = vec![0.0; ns * nt];
    let mut n = vec![0.0; ns * nt];
    for j in 1..nt {
        for i in 1..ns {
            let d = diffs(f, i - 1, j - 1).0;
            let k = j * ns + i;
            p[k] = p[k - 1] + p[k - ns] - p[k - ns - 1] + d.max(0.0);
            n[k] = n[k - 1] + n[k - ns] - n[k - ns - 1] + (-d).max(0.0);
        }
    }
    let f00 = f.at(0, 0);
    let mut v1 = vec![0.0; ns * nt];
    let mut v2 = vec![0.0; ns * nt];
    for j in 0..nt {
        for i in 0..ns {
            let k = j * ns + i;
            v1[k] = f00 + gp[i] + hp[j] + p[k];
            v2[k] = gm[i] + hm[j] + n[k];
        }
    }
    let mk = |v| RealField { s: f.s.clone(), t: f.t.clone(), values: v };
    (mk(v1), mk(v2))
}
