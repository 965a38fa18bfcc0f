//! Command-line driver. [`run`] parses arguments, executes one subcommand and
//! maps the outcome to an exit code: 0 on success, 1 on usage errors, 2 on
//! runtime errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use qharmonics::fast::qft_fast;
use qharmonics::fixtures::{Fixture, FIXTURE_NAMES};
use qharmonics::grid::{l1_diff, linf_diff, sample, GridSpec, QSignal2D, QSpectrum2D, Side};
use qharmonics::ppm::{image_to_qsig, qsig_to_image, ClampMode};
use qharmonics::qft::{qft_forward, qft_inverse, FreqWindow, QftKind};
use qharmonics::qlct::{qfrft, qlct_forward, qlct_inverse, LctKind, LctParams};
use qharmonics::qsig::{decode_qsig, decode_qspec, encode_qsig, encode_qspec};
use qharmonics::quat::{AxisPair, PureUnit, Quaternion};
use qharmonics::smoothing::{eta_jump_average, gauss_mean_inverse, lc_class_diagnostic, partial_inverse_sinc, EtaOptions, GaussMeanParams};
use qharmonics::variation::{hardy_bvf_check, HardyOptions, Net, RealField, VariationReport};

#[derive(Parser, Debug)]
#[command(name = "qharmonics", version, about = "Quaternion Fourier and linear canonical transforms on sampled 2D signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Forward quaternion Fourier transform.
    Qft(QftArgs),
    /// Inverse quaternion Fourier transform of a spectrum file.
    Iqft(InverseArgs),
    /// Forward quaternion linear canonical transform.
    Qlct(QlctArgs),
    /// Inverse of a QLCT or fractional-transform spectrum file.
    Iqlct(InverseArgs),
    /// Quaternion fractional Fourier transform.
    Qfrft(QfrftArgs),
    /// Forward then inverse transform; prints the reconstruction errors.
    Roundtrip(RoundtripArgs),
    /// Truncated inversion of a fixture at one point over a sweep of windows.
    JumpDemo(JumpArgs),
    /// Gauss-mean inversion along a schedule of damping parameters.
    GaussMean(GaussMeanArgs),
    /// Vitali and section variations of one component of a signal.
    Variation(VariationArgs),
    /// Truncated estimates of the L-class integrals of a fixture at a point.
    LcDiag(LcArgs),
    /// Converts a binary PPM image to a signal file.
    Img2qsig(ConvertArgs),
    /// Converts a signal file to a binary PPM image.
    Qsig2img(ImageOutArgs),
    /// Writes the built-in fixtures, sampled, to signal files.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Two,
    Right,
    Left,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Two => Side::TwoSided,
            SideArg::Right => Side::RightSided,
            SideArg::Left => Side::LeftSided,
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Signal file.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Built-in analytic signal, sampled on `--grid` / `--extent`.
    #[arg(long, value_parser = PossibleValuesParser::new(FIXTURE_NAMES))]
    fixture: Option<String>,
}

#[derive(Args, Debug)]
struct Sampling {
    /// Cells per axis.
    #[arg(long, default_value_t = 128, value_parser = positive_usize)]
    grid: usize,
    /// Half-width of the square domain.
    #[arg(long, default_value_t = 8.0, value_parser = positive_f64)]
    extent: f64,
}

impl Sampling {
    fn spec(&self) -> GridSpec {
        GridSpec::symmetric(self.grid, self.extent).expect("validated by the parser")
    }
}

#[derive(Args, Debug)]
struct AxesArgs {
    #[arg(long, value_enum, default_value = "two")]
    side: SideArg,
    /// First transform axis as "x,y,z".
    #[arg(long, value_parser = parse_axis)]
    mu1: Option<PureUnit>,
    /// Second transform axis as "x,y,z".
    #[arg(long, value_parser = parse_axis)]
    mu2: Option<PureUnit>,
}

impl AxesArgs {
    fn axes(&self) -> Result<AxisPair, CliError> {
        let mu1 = self.mu1.unwrap_or(PureUnit::I);
        let mu2 = self.mu2.unwrap_or(PureUnit::J);
        AxisPair::new(mu1, mu2).map_err(|e| CliError::Usage(format!("--mu1/--mu2: {e}")))
    }
}

#[derive(Args, Debug)]
struct WindowArgs {
    /// Frequency half-widths "M" or "M,N".
    #[arg(long, default_value = "10", value_parser = parse_window)]
    window: (f64, f64),
    /// Frequency samples per axis; defaults to `--grid`.
    #[arg(long, value_parser = positive_usize)]
    samples: Option<usize>,
}

impl WindowArgs {
    fn freq(&self, grid: usize) -> Result<FreqWindow, CliError> {
        let n = self.samples.unwrap_or(grid);
        FreqWindow::new(self.window.0, self.window.1, n, n).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Args, Debug)]
struct LctArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a1: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b1: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    c1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    d1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a2: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    b2: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    c2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    d2: f64,
}

impl LctArgs {
    fn params(&self) -> Result<(LctParams, LctParams), CliError> {
        let p1 = LctParams::new(self.a1, self.b1, self.c1, self.d1).map_err(|e| CliError::Usage(format!("first matrix: {e}")))?;
        let p2 = LctParams::new(self.a2, self.b2, self.c2, self.d2).map_err(|e| CliError::Usage(format!("second matrix: {e}")))?;
        Ok((p1, p2))
    }
}

#[derive(Args, Debug)]
struct QftArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    axes: AxesArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Use the FFT path; the window flags are ignored.
    #[arg(long)]
    fast: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct InverseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    sampling: Sampling,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct QlctArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    axes: AxesArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[command(flatten)]
    lct: LctArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct QfrftArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    axes: AxesArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Rotation angle along the first axis.
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    /// Rotation angle along the second axis.
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    /// Multiply the kernels by the constant phases `e^{μα/2}`, `e^{μβ/2}`.
    #[arg(long)]
    phase_corrected: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransformArg {
    Qft,
    Qlct,
}

#[derive(Args, Debug)]
struct RoundtripArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    axes: AxesArgs,
    #[command(flatten)]
    window: WindowArgs,
    #[arg(long, value_enum, default_value = "qft")]
    transform: TransformArg,
    #[command(flatten)]
    lct: LctArgs,
    /// Reconstructed signal.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct JumpArgs {
    #[arg(long, default_value = "indicator", value_parser = PossibleValuesParser::new(FIXTURE_NAMES))]
    fixture: String,
    /// Evaluation point "x,y".
    #[arg(long, default_value = "1,1", value_parser = parse_pair, allow_hyphen_values = true)]
    point: (f64, f64),
    /// Comma-separated window sizes along s.
    #[arg(long = "M", value_parser = parse_positive_list)]
    m: FloatList,
    /// Window sizes along t; defaults to the M list.
    #[arg(long = "N", value_parser = parse_positive_list)]
    n: Option<FloatList>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GaussMeanArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    #[command(flatten)]
    window: WindowArgs,
    /// Strictly decreasing damping parameters, comma-separated.
    #[arg(long, default_value = "1,0.1,0.01", value_parser = parse_positive_list)]
    schedule: FloatList,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VariationArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    sampling: Sampling,
    /// Quaternion component 0..3 (w, x, y, z).
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..4))]
    component: u8,
    /// Bound on the Vitali and section variations.
    #[arg(long, default_value_t = 1e6, value_parser = positive_f64)]
    bound: f64,
}

#[derive(Args, Debug)]
struct LcArgs {
    #[arg(long, value_parser = PossibleValuesParser::new(FIXTURE_NAMES))]
    fixture: String,
    #[arg(long, default_value = "0,0", value_parser = parse_pair, allow_hyphen_values = true)]
    point: (f64, f64),
    #[arg(long, default_value_t = 0.5, value_parser = positive_f64)]
    eps1: f64,
    #[arg(long, default_value_t = 0.5, value_parser = positive_f64)]
    eps2: f64,
    /// Truncation radius.
    #[arg(long, default_value_t = 8.0, value_parser = positive_f64)]
    radius: f64,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ImageOutArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Map each channel's range onto 0..255 instead of clipping.
    #[arg(long)]
    rescale: bool,
}

#[derive(Args, Debug)]
struct FixturesArgs {
    /// Directory receiving `<name>.qsig` files.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    sampling: Sampling,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive integer, got {s:?}")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| match p.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => Err(format!("not a finite number: {p:?}")),
        })
        .collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_floats(s)?.as_slice() {
        [x, y] => Ok((*x, *y)),
        _ => Err(format!("expected \"x,y\", got {s:?}")),
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let v = parse_floats(s)?;
    let (m, n) = match v.as_slice() {
        [m] => (*m, *m),
        [m, n] => (*m, *n),
        _ => return Err(format!("expected \"M\" or \"M,N\", got {s:?}")),
    };
    if m <= 0.0 || n <= 0.0 {
        return Err(format!("window must be positive, got {s:?}"));
    }
    Ok((m, n))
}

/// Comma-separated list given as a single flag value.
#[derive(Clone, Debug)]
struct FloatList(Vec<f64>);

fn parse_positive_list(s: &str) -> Result<FloatList, String> {
    let v = parse_floats(s)?;
    if v.iter().any(|&x| x <= 0.0) {
        return Err(format!("values must be positive, got {s:?}"));
    }
    Ok(FloatList(v))
}

fn parse_axis(s: &str) -> Result<PureUnit, String> {
    match parse_floats(s)?.as_slice() {
        [x, y, z] => PureUnit::new(*x, *y, *z).map_err(|e| e.to_string()),
        _ => Err(format!("expected \"x,y,z\", got {s:?}")),
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

type CliResult<T> = Result<T, CliError>;

/// Output files created so far; removed if the command fails.
#[derive(Default)]
struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    /// Writes through a sibling temporary file so a failed write never
    /// leaves a truncated file behind.
    fn write(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".partial");
        let tmp = PathBuf::from(tmp);
        let result = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
        if let Err(e) = result {
            let _ = fs::remove_file(&tmp);
            return Err(anyhow!(e).context(format!("writing {}", path.display())).into());
        }
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn discard(&mut self) {
        for p in self.written.drain(..) {
            let _ = fs::remove_file(p);
        }
    }
}

fn fixture(name: &str) -> Fixture {
    Fixture::by_name(name).expect("validated by the parser")
}

fn load_signal(input: &Input, sampling: &Sampling) -> CliResult<QSignal2D> {
    match (&input.input, &input.fixture) {
        (Some(path), _) => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(decode_qsig(&bytes).with_context(|| format!("decoding {}", path.display()))?)
        }
        (None, Some(name)) => Ok(sample(&fixture(name), &sampling.spec())?),
        (None, None) => Err(CliError::Usage("one of --in or --fixture is required".into())),
    }
}

fn load_spectrum(path: &Path) -> CliResult<QSpectrum2D> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(decode_qspec(&bytes).with_context(|| format!("decoding {}", path.display()))?)
}

fn emit(out: &mut Outputs, dest: Option<&Path>, text: &str) -> CliResult<()> {
    match dest {
        Some(p) => out.write(p, text.as_bytes()),
        None => {
            std::io::stdout().write_all(text.as_bytes()).context("writing to stdout")?;
            Ok(())
        }
    }
}

fn quaternion_csv(q: Quaternion) -> String {
    format!("{:.16e},{:.16e},{:.16e},{:.16e}", q.w, q.x, q.y, q.z)
}

fn cmd_qft(a: &QftArgs, out: &mut Outputs) -> CliResult<()> {
    let axes = a.axes.axes()?;
    let kind = QftKind::new(a.axes.side.into(), axes);
    let freq = if a.fast {
        if !(a.sampling.grid.is_power_of_two() || a.input.input.is_some()) {
            return Err(CliError::Usage("--fast needs a power-of-two --grid".into()));
        }
        None
    } else {
        Some(a.window.freq(a.sampling.grid)?)
    };
    let sig = load_signal(&a.input, &a.sampling)?;
    let spec = match freq {
        Some(w) => qft_forward(&sig, kind, w)?,
        None => qft_fast(&sig, kind)?,
    };
    out.write(&a.out, &encode_qspec(&spec))
}

fn cmd_iqft(a: &InverseArgs, out: &mut Outputs) -> CliResult<()> {
    let spec = load_spectrum(&a.input)?;
    let kind = match spec.provenance() {
        qharmonics::grid::Provenance::Qft(k) => *k,
        _ => return Err(anyhow!("{} is not a QFT spectrum", a.input.display()).into()),
    };
    let sig = qft_inverse(&spec, kind, &a.sampling.spec())?;
    out.write(&a.out, &encode_qsig(&sig))
}

fn cmd_qlct(a: &QlctArgs, out: &mut Outputs) -> CliResult<()> {
    let (p1, p2) = a.lct.params()?;
    let kind = LctKind::new(a.axes.side.into(), p1, p2, a.axes.axes()?).map_err(|e| CliError::Usage(e.to_string()))?;
    let w = a.window.freq(a.sampling.grid)?;
    let sig = load_signal(&a.input, &a.sampling)?;
    let spec = qlct_forward(&sig, kind, w)?;
    out.write(&a.out, &encode_qspec(&spec))
}

fn cmd_iqlct(a: &InverseArgs, out: &mut Outputs) -> CliResult<()> {
    let spec = load_spectrum(&a.input)?;
    let sig = qlct_inverse(&spec, &a.sampling.spec())?;
    out.write(&a.out, &encode_qsig(&sig))
}

fn cmd_qfrft(a: &QfrftArgs, out: &mut Outputs) -> CliResult<()> {
    if !(a.alpha.is_finite() && a.beta.is_finite()) {
        return Err(CliError::Usage("--alpha and --beta must be finite".into()));
    }
    let axes = a.axes.axes()?;
    let w = a.window.freq(a.sampling.grid)?;
    let sig = load_signal(&a.input, &a.sampling)?;
    let spec = qfrft(&sig, a.alpha, a.beta, a.axes.side.into(), axes, a.phase_corrected, w)?;
    out.write(&a.out, &encode_qspec(&spec))
}

fn cmd_roundtrip(a: &RoundtripArgs, out: &mut Outputs) -> CliResult<()> {
    let axes = a.axes.axes()?;
    let side: Side = a.axes.side.into();
    let w = a.window.freq(a.sampling.grid)?;
    let lct = match a.transform {
        TransformArg::Qlct => {
            let (p1, p2) = a.lct.params()?;
            if p1.is_degenerate() || p2.is_degenerate() {
                return Err(CliError::Usage("round trip needs b ≠ 0 in both matrices".into()));
            }
            Some(LctKind::new(side, p1, p2, axes).map_err(|e| CliError::Usage(e.to_string()))?)
        }
        TransformArg::Qft => None,
    };
    let sig = load_signal(&a.input, &a.sampling)?;
    let target = *sig.grid();
    let back = match lct {
        Some(kind) => qlct_inverse(&qlct_forward(&sig, kind, w)?, &target)?,
        None => {
            let kind = QftKind::new(side, axes);
            qft_inverse(&qft_forward(&sig, kind, w)?, kind, &target)?
        }
    };
    let l1 = l1_diff(&back, &sig)?;
    let linf = linf_diff(&back, &sig)?;
    if let Some(p) = &a.out {
        out.write(p, &encode_qsig(&back))?;
    }
    emit(out, None, &format!("l1 {l1:.16e}\nlinf {linf:.16e}\n"))
}

fn cmd_jump(a: &JumpArgs, out: &mut Outputs) -> CliResult<()> {
    let ms = &a.m.0;
    let ns = a.n.as_ref().unwrap_or(&a.m).0.clone();
    if ns.len() != ms.len() {
        return Err(CliError::Usage(format!("--M has {} values but --N has {}", ms.len(), ns.len())));
    }
    let f = fixture(&a.fixture);
    let eta = eta_jump_average(&f, a.point, EtaOptions::default())?.value;
    let mut csv = String::from("M,N,w,x,y,z,abs_err\n");
    for (&m, &n) in ms.iter().zip(&ns) {
        let v = partial_inverse_sinc(&f, a.point, m, n)?;
        csv.push_str(&format!("{m:.16e},{n:.16e},{},{:.16e}\n", quaternion_csv(v), (v - eta).abs()));
    }
    emit(out, a.out.as_deref(), &csv)
}

fn cmd_gauss_mean(a: &GaussMeanArgs, out: &mut Outputs) -> CliResult<()> {
    let params = GaussMeanParams::new(a.schedule.0.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
    let w = a.window.freq(a.sampling.grid)?;
    let sig = load_signal(&a.input, &a.sampling)?;
    let spec = qft_forward(&sig, QftKind::canonical(Side::TwoSided), w)?;
    let steps = gauss_mean_inverse(&spec, &params, sig.grid(), Some(&sig))?;
    let mut csv = String::from("alpha,l1_error\n");
    for s in steps {
        csv.push_str(&format!("{:.16e},{:.16e}\n", s.alpha, s.l1_error.unwrap_or(f64::NAN)));
    }
    emit(out, a.out.as_deref(), &csv)
}

fn cmd_variation(a: &VariationArgs, out: &mut Outputs) -> CliResult<()> {
    let sig = load_signal(&a.input, &a.sampling)?;
    let f = RealField::from_component(&sig, a.component as usize)?;
    let opts = HardyOptions { bound: a.bound, ..Default::default() };
    let report = hardy_bvf_check(&f, &Net::from_field(&f), opts)?;
    emit(out, None, &format!("{}\n{}\n", VariationReport::CSV_HEADER, report.csv_row()))
}

fn cmd_lc(a: &LcArgs, out: &mut Outputs) -> CliResult<()> {
    if a.radius <= a.eps1 || a.radius <= a.eps2 {
        return Err(CliError::Usage("--radius must exceed --eps1 and --eps2".into()));
    }
    let f = fixture(&a.fixture);
    let (v1, v2) = lc_class_diagnostic(&f, a.point, a.eps1, a.eps2, a.radius)?;
    emit(out, None, &format!("val1,val2\n{v1:.16e},{v2:.16e}\n"))
}

fn cmd_img2qsig(a: &ConvertArgs, out: &mut Outputs) -> CliResult<()> {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let sig = image_to_qsig(&bytes).map_err(|e| anyhow!("{}: {}", a.input.display(), e.0))?;
    out.write(&a.out, &encode_qsig(&sig))
}

fn cmd_qsig2img(a: &ImageOutArgs, out: &mut Outputs) -> CliResult<()> {
    let bytes = fs::read(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let sig = decode_qsig(&bytes).with_context(|| format!("decoding {}", a.input.display()))?;
    let mode = if a.rescale { ClampMode::Rescale } else { ClampMode::Clamp };
    let (img, stats) = qsig_to_image(&sig, mode);
    out.write(&a.out, &img)?;
    emit(
        out,
        None,
        &format!(
            "scalar_max_abs {:.16e}\nclamped {}\nchannel_min {:.16e}\nchannel_max {:.16e}\n",
            stats.scalar_max_abs, stats.clamped, stats.channel_min, stats.channel_max
        ),
    )
}

fn cmd_fixtures(a: &FixturesArgs, out: &mut Outputs) -> CliResult<()> {
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let grid = a.sampling.spec();
    for name in FIXTURE_NAMES {
        let sig = sample(&fixture(name), &grid)?;
        out.write(&a.out.join(format!("{name}.qsig")), &encode_qsig(&sig))?;
    }
    Ok(())
}

fn dispatch(cmd: &Command, out: &mut Outputs) -> CliResult<()> {
    match cmd {
        Command::Qft(a) => cmd_qft(a, out),
        Command::Iqft(a) => cmd_iqft(a, out),
        Command::Qlct(a) => cmd_qlct(a, out),
        Command::Iqlct(a) => cmd_iqlct(a, out),
        Command::Qfrft(a) => cmd_qfrft(a, out),
        Command::Roundtrip(a) => cmd_roundtrip(a, out),
        Command::JumpDemo(a) => cmd_jump(a, out),
        Command::GaussMean(a) => cmd_gauss_mean(a, out),
        Command::Variation(a) => cmd_variation(a, out),
        Command::LcDiag(a) => cmd_lc(a, out),
        Command::Img2qsig(a) => cmd_img2qsig(a, out),
        Command::Qsig2img(a) => cmd_qsig2img(a, out),
        Command::Fixtures(a) => cmd_fixtures(a, out),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, String> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QH_THREADS") {
        let n = positive_usize(&v).map_err(|e| format!("QH_THREADS: {e}"))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| e.to_string())
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let mut out = Outputs::default();
    match pool.install(|| dispatch(&cli.command, &mut out)) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            out.discard();
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Runtime(e)) => {
            out.discard();
            eprintln!("error: {e:#}");
            2
        }
    }
}
