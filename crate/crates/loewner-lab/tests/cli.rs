use loewner_lab::cli::{self, Config};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_loewner-lab"));
    c.env_remove(cli::CONFIG_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn data_values(svg: &str) -> Vec<f64> {
    svg.split("data-v=\"").skip(1).map(|s| s[..s.find('"').unwrap()].parse().unwrap()).collect()
}

#[test]
fn trace_writes_curve_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "t,w\n0,0\n0.5,0.25\n1,0\n");
    let out = dir.path().join("curve.csv");
    let o = run(&["trace", "--driving", &w, "--steps", "200", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = loewner_lab::io::read_curve(&out).unwrap();
    assert_eq!(curve.len(), 201);
    assert_eq!(curve.ambient, loewner_lab::Ambient::HalfPlane);
}

#[test]
fn zero_driving_svg_is_vertical() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "t,w\n0,0\n1,0\n");
    let o = run(&["trace", "--driving", &w, "--steps", "50", "--format", "svg"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    let pts = s.split("points=\"").nth(1).unwrap();
    let pts = &pts[..pts.find('"').unwrap()];
    let xs: Vec<f64> = pts.split(' ').map(|p| p.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(xs.len(), 51);
    assert!(xs.iter().all(|x| (x - xs[0]).abs() < 1e-3));
}

#[test]
fn malformed_csv_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "t,w\n0,0\n0.5,0.1\n0.7,oops\n");
    let o = run(&["trace", "--driving", &w]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("w.csv:4"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["trace"]).status.code(), Some(2));
    assert_eq!(run(&["energy", "loop", "--shape", "hexagon"]).status.code(), Some(2));
    assert_eq!(run(&["liouville", "--shape", "circle", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn energy_of_driving_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "t,w\n0,0\n1,1\n");
    let o = run(&["energy", "driving", "--driving", &w]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], 0.5);
    assert_eq!(v["error_bar"], 0.0);
}

#[test]
fn closed_curve_plots_as_polygon() {
    let o = run(&["plot", "--shape", "circle:2", "--kind", "curve"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("<polygon"));
}

#[test]
fn circle_welding_is_diagonal() {
    let o = run(&["plot", "--shape", "circle", "--kind", "welding"]);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    // second polyline is the graph; the first is the dashed diagonal
    let graph = s.split("<polyline points=\"").nth(2).unwrap();
    let graph = &graph[..graph.find('"').unwrap()];
    for p in graph.split(' ') {
        let mut it = p.split(',').map(|v| v.parse::<f64>().unwrap());
        let (x, y) = (it.next().unwrap(), it.next().unwrap());
        // y axis points down in SVG: the diagonal is x + y = const
        assert!((x + y - 480.0).abs() < 0.01, "{x} {y}");
    }
}

#[test]
fn zero_driving_field_is_zero() {
    let o = run(&["plot", "--shape", "zero", "--kind", "field", "--grid", "16", "--radius", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = data_values(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(v.len(), 256);
    let finite: Vec<f64> = v.into_iter().filter(|x| x.is_finite()).collect();
    assert!(finite.len() > 200);
    assert!(finite.iter().all(|x| x.abs() < 1e-10), "{finite:?}");
}

#[test]
fn config_from_env_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.toml", "skip_spectral = true\nmodes = 32\n");
    let o = bin().env(cli::CONFIG_ENV, &good).args(["verify", "--shape", "zero"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let hash = Config::from_file(Path::new(&good)).unwrap().hash();
    assert_eq!(v["config_hash"], hash.as_str());
    assert_eq!(v["rows"][0]["config_hash"], hash.as_str());

    let bad = write(dir.path(), "bad.toml", "modes = 32\nmodez = 3\n");
    let o = bin().env(cli::CONFIG_ENV, &bad).args(["verify", "--shape", "zero"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("bad.toml:2"));
}

#[test]
fn verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "skip_spectral = true\n");
    let args = ["--config", &cfg, "verify", "--shape", "linear:1", "--shape", "circle"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rows"][0]["i_driving"]["value"], 0.5);
    assert!(v["rows"][0].get("runtimes").is_none());
}

#[test]
fn verify_fails_when_tolerances_are_impossible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "skip_spectral = true\nradius_factor = 0.5\nenergy_rel_tol = 1e-12\nj_abs_tol = 1e-12\n");
    let o = run(&["--config", &cfg, "verify", "--shape", "linear:1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8(o.stdout).unwrap().contains(",false,"));
}

#[test]
fn library_entry_point_matches_binary() {
    assert_eq!(cli::run(["loewner-lab", "energy", "loop", "--shape", "bogus:1"]), 2);
    assert_eq!(cli::run(["loewner-lab", "--version"]), 0);
}
