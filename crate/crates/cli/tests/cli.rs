use std::path::Path;
use std::process::{Command, Output};

fn qh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qharmonics")).args(args).env("QH_THREADS", "2").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn metric(text: &str, key: &str) -> f64 {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().parse().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn roundtrip_gaussian() {
    let o = qh(&["roundtrip", "--fixture", "gaussian", "--side", "two", "--grid", "256", "--extent", "10", "--window", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(metric(&stdout(&o), "linf ") < 1e-4);
}

#[test]
fn roundtrip_qlct_sided() {
    let o = qh(&[
        "roundtrip", "--fixture", "qgaussian", "--side", "right", "--transform", "qlct", "--grid", "80", "--extent", "6", "--window", "12",
        "--samples", "112", "--a1", "1", "--b1", "1", "--c1", "0", "--d1", "1", "--a2", "2", "--b2", "0.5", "--c2", "1", "--d2", "0.75",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(metric(&stdout(&o), "linf ") < 1e-4);
}

#[test]
fn missing_input_is_usage_error() {
    let o = qh(&["qft"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.qspec");
    for args in [
        vec!["qft", "--fixture", "nope", "--out", p(&out)],
        vec!["qft", "--fixture", "gaussian", "--window", "-1", "--out", p(&out)],
        vec!["qft", "--fixture", "gaussian", "--mu1", "1,0,0", "--mu2", "1,0,0", "--out", p(&out)],
        vec!["qlct", "--fixture", "gaussian", "--a1", "1", "--b1", "1", "--c1", "1", "--d1", "1", "--out", p(&out)],
        vec!["gauss-mean", "--fixture", "gaussian", "--schedule", "0.1,1"],
        vec!["jump-demo", "--M", "25,50", "--N", "25"],
    ] {
        let o = qh(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!out.exists());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(qh(&["--help"]).status.code(), Some(0));
    assert_eq!(qh(&["qft", "--help"]).status.code(), Some(0));
}

#[test]
fn jump_demo_csv() {
    let o = qh(&["jump-demo", "--M", "25,50,100"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "M,N,w,x,y,z,abs_err");
    assert_eq!(lines.len(), 4);
    let errs: Vec<f64> = lines[1..].iter().map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect();
    assert!(errs[2] < 0.03);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn transform_files_chain() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let fx = d.join("fx");
    assert_eq!(qh(&["fixtures", "--out", p(&fx), "--grid", "64", "--extent", "8"]).status.code(), Some(0));
    let src = fx.join("qgaussian.qsig");
    let spec = d.join("s.qspec");
    let back = d.join("b.qsig");
    let o = qh(&["qft", "--in", p(&src), "--side", "left", "--window", "8", "--out", p(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = qh(&["iqft", "--in", p(&spec), "--grid", "64", "--extent", "8", "--out", p(&back)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let a = qharmonics::qsig::load_qsig(&src).unwrap();
    let b = qharmonics::qsig::load_qsig(&back).unwrap();
    assert!(qharmonics::grid::linf_diff(&a, &b).unwrap() < 1e-4);

    let fast = d.join("f.qspec");
    assert_eq!(qh(&["qft", "--in", p(&src), "--fast", "--out", p(&fast)]).status.code(), Some(0));

    let lspec = d.join("l.qspec");
    let o = qh(&["qfrft", "--in", p(&src), "--alpha", "0.8", "--beta", "-0.6", "--phase-corrected", "--window", "8", "--out", p(&lspec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let lback = d.join("lb.qsig");
    assert_eq!(qh(&["iqlct", "--in", p(&lspec), "--grid", "64", "--extent", "8", "--out", p(&lback)]).status.code(), Some(0));
    let c = qharmonics::qsig::load_qsig(&lback).unwrap();
    assert!(qharmonics::grid::linf_diff(&a, &c).unwrap() < 1e-4);
}

#[test]
fn runtime_errors_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sig = d.join("a.qsig");
    assert_eq!(qh(&["fixtures", "--out", p(d), "--grid", "8"]).status.code(), Some(0));
    std::fs::rename(d.join("gaussian.qsig"), &sig).unwrap();
    // a signal is not a spectrum
    let out = d.join("x.qsig");
    let o = qh(&["iqft", "--in", p(&sig), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    // missing input file
    let o = qh(&["qft", "--in", p(&d.join("missing.qsig")), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    // sinc path needs a bounded fixture
    let o = qh(&["jump-demo", "--fixture", "exp-product", "--M", "5", "--point", "0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn images_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let img = d.join("a.ppm");
    let mut bytes = b"P6\n3 2\n255\n".to_vec();
    bytes.extend((0..18u8).map(|k| k * 13));
    std::fs::write(&img, &bytes).unwrap();
    let sig = d.join("a.qsig");
    let back = d.join("b.ppm");
    assert_eq!(qh(&["img2qsig", "--in", p(&img), "--out", p(&sig)]).status.code(), Some(0));
    let o = qh(&["qsig2img", "--in", p(&sig), "--out", p(&back)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("clamped 0"));
    assert_eq!(std::fs::read(&back).unwrap(), bytes);

    std::fs::write(&img, b"P3\n1 1\n255\n1 2 3\n").unwrap();
    let o = qh(&["img2qsig", "--in", p(&img), "--out", p(&d.join("c.qsig"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!d.join("c.qsig").exists());
}

#[test]
fn reports_are_deterministic() {
    let runs: Vec<Output> = (0..2)
        .map(|k| {
            Command::new(env!("CARGO_BIN_EXE_qharmonics"))
                .args(["gauss-mean", "--fixture", "qgaussian", "--grid", "64", "--extent", "8", "--window", "10"])
                .env("QH_THREADS", if k == 0 { "1" } else { "4" })
                .output()
                .unwrap()
        })
        .collect();
    assert_eq!(runs[0].status.code(), Some(0));
    assert_eq!(runs[0].stdout, runs[1].stdout);
    let text = stdout(&runs[0]);
    assert!(text.starts_with("alpha,l1_error\n"));
}

#[test]
fn variation_and_lc_reports() {
    let o = qh(&["variation", "--fixture", "gaussian", "--grid", "64", "--extent", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("vitali,line_var_s,line_var_t,is_hardy_bvf,nets_tested\n"));
    assert!(text.contains(",true,"));

    let o = qh(&["lc-diag", "--fixture", "gaussian", "--point", "0.2,-0.1"]);
    assert_eq!(o.status.code(), Some(0));
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    assert!(row.split(',').all(|x| x.parse::<f64>().unwrap().is_finite()));
    assert_eq!(qh(&["lc-diag", "--fixture", "gaussian", "--eps1", "2", "--radius", "1"]).status.code(), Some(1));
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_qharmonics"))
        .args(["jump-demo", "--M", "5"])
        .env("QH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn run_is_callable_in_process() {
    assert_eq!(qharmonics_cli::run(["qharmonics", "qft"]), 1);
    assert_eq!(qharmonics_cli::run(["qharmonics", "--version"]), 0);
}
