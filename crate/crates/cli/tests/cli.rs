use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use vlasov_char::bridge::ResidualReport;
use vlasov_char::chain::{marginal_flux, polygon_area, PhaseBox};
use vlasov_char::well::{ModeConstants, ThetaSolution, TruncationPolicy, WellParams};
use vlasov_char_cli::analysis::{count_interior_maxima, sign_changes};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vlasov-char"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn parse(text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines
            .next()
            .unwrap()
            .split(',')
            .map(str::to_owned)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(str::to_owned).collect())
            .collect();
        Self { header, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap()
    }

    fn num(&self, row: usize, name: &str) -> Option<f64> {
        let cell = &self.rows[row][self.col(name)];
        (!cell.is_empty()).then(|| cell.parse().unwrap())
    }

    /// Values of `value` grouped by the (bit-exact) value of `key`, in row order.
    fn group_by(&self, key: &str, value: &str) -> BTreeMap<u64, Vec<f64>> {
        let mut out: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
        for i in 0..self.rows.len() {
            let k = self.num(i, key).unwrap();
            out.entry(k.to_bits())
                .or_default()
                .push(self.num(i, value).unwrap_or(f64::NAN));
        }
        out
    }
}

#[test]
fn density_format_contract() {
    let csv = Csv::parse(&stdout(&["density-1d", "--nx", "33", "--nt", "7"]));
    assert_eq!(csv.header, ["x", "t", "density"]);
    assert_eq!(csv.rows.len(), 33 * 7);
    for i in 0..csv.rows.len() {
        assert!(csv.num(i, "density").unwrap() >= -1e-12);
    }
}

#[test]
fn density_peaks_decay_one_per_period_of_the_window() {
    // Away from the instants where the window ȧt spans whole periods of
    // sin², the interior oscillation has 5 − ⌊μȧt/a⌋ maxima.
    let csv = Csv::parse(&stdout(&[
        "density-1d",
        "--nx",
        "3001",
        "--nt",
        "2",
        "--t-max",
        "0.45",
    ]));
    let by_t = csv.group_by("t", "density");
    let f0 = &by_t[&0.0f64.to_bits()];
    assert_eq!(
        count_interior_maxima(f0, 1e-9 * f0.iter().cloned().fold(0.0, f64::max)),
        5
    );
    for (t, expected) in [
        (0.05, 5),
        (0.15, 4),
        (0.25, 3),
        (0.35, 2),
        (0.45, 1),
        (0.8, 1),
    ] {
        let text = stdout(&[
            "density-1d",
            "--nx",
            "3001",
            "--nt",
            "2",
            "--t-min",
            "0.01",
            "--t-max",
            &t.to_string(),
        ]);
        let csv = Csv::parse(&text);
        let f = &csv.group_by("t", "density")[&f64::to_bits(t)];
        let tol = 1e-9 * f.iter().cloned().fold(0.0, f64::max);
        assert_eq!(count_interior_maxima(f, tol), expected, "t = {t}");
    }
}

#[test]
fn flux_blocks_and_bit_exact_values() {
    let csv = Csv::parse(&stdout(&["flux-1d", "--nx", "41", "--nt", "9"]));
    assert_eq!(csv.header, ["x", "t", "mean_velocity"]);
    let mode = ModeConstants::new(&WellParams::default(), 5).unwrap();
    let bx = PhaseBox::two(0.5, 1.0).unwrap();
    let mut defined = 0;
    for block in csv.rows.chunks(9) {
        let ts: Vec<f64> = block.iter().map(|r| r[1].parse().unwrap()).collect();
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
    }
    for i in 0..csv.rows.len() {
        let (x, t) = (csv.num(i, "x").unwrap(), csv.num(i, "t").unwrap());
        let lib = marginal_flux(x, t, &mode, &bx).unwrap();
        let cell = csv.num(i, "mean_velocity");
        assert_eq!(cell.map(f64::to_bits), lib.map(f64::to_bits), "x={x} t={t}");
        if let Some(u) = cell {
            assert!(u >= 0.0);
            defined += 1;
        }
    }
    assert!(defined > 100);
}

#[test]
fn outputs_are_deterministic_and_formats_agree() {
    let args = ["density-1d", "--mu", "3", "--nx", "50", "--nt", "5"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let single = Command::new(env!("CARGO_BIN_EXE_vlasov-char"))
        .args(args)
        .env("VLASOV_CHAR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.as_bytes(), single.stdout.as_slice());

    let json: serde_json::Value =
        serde_json::from_str(&stdout(&[&args[..], &["--format", "json"]].concat())).unwrap();
    let csv = Csv::parse(&a);
    assert_eq!(json["columns"], serde_json::json!(["x", "t", "density"]));
    for (i, row) in json["rows"].as_array().unwrap().iter().enumerate() {
        assert_eq!(
            row[2].as_f64().unwrap().to_bits(),
            csv.num(i, "density").unwrap().to_bits()
        );
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "mu = 2\nnx = 5\nnt = 3\nt_max = 0.25\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let from_file = Csv::parse(&stdout(&["density-1d", "--config", cfg]));
    assert_eq!(from_file.rows.len(), 15);
    let overridden = Csv::parse(&stdout(&["density-1d", "--config", cfg, "--nx", "4"]));
    assert_eq!(overridden.rows.len(), 12);
    let out = stdout(&[
        "density-1d",
        "--mu",
        "2",
        "--nx",
        "5",
        "--nt",
        "3",
        "--t-max",
        "0.25",
    ]);
    assert_eq!(Csv::parse(&out).rows, from_file.rows);
}

#[test]
fn usage_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "mu: 3\n").unwrap();
    for args in [
        vec!["density-1d", "--config", bad.to_str().unwrap()],
        vec!["density-1d", "--config", "/nonexistent/run.cfg"],
        vec!["density-1d", "--out", "/nonexistent/dir/f.csv"],
        vec!["density-1d", "--nx", "1"],
        vec!["density-1d", "--format", "xml"],
        vec!["density-1d", "--bogus"],
        vec!["theta-maps"],
        vec!["verify", "--beta", "-1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_vlasov-char"))
        .args(["density-1d", "--nx", "3", "--nt", "2"])
        .env("VLASOV_CHAR_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn read(dir: &Path, name: &str) -> Csv {
    Csv::parse(&fs::read_to_string(dir.join(name)).unwrap())
}

#[test]
fn theta_maps_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("maps");
    stdout(&[
        "theta-maps",
        "--nx",
        "51",
        "--nt",
        "41",
        "--out",
        out.to_str().unwrap(),
    ]);
    let sol =
        ThetaSolution::new(WellParams::default(), 1, 0.01, TruncationPolicy::default()).unwrap();
    let period = sol.mode().period;

    let dens = read(&out, "theta_density.csv");
    assert_eq!(dens.header, ["eta", "tau", "density"]);
    assert_eq!(dens.rows.len(), 51 * 41);
    let by_eta = dens.group_by("eta", "density");
    let peak = dens
        .rows
        .iter()
        .map(|r| r[2].parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    for (eta, column) in &by_eta {
        // first and last τ are one period apart
        let (first, last) = (column[0], column[column.len() - 1]);
        assert!(
            (first - last).abs() < 1e-10 * peak.max(1.0),
            "eta = {}",
            f64::from_bits(*eta)
        );
    }
    for wall in [0.0, 0.5] {
        for f in &by_eta[&f64::to_bits(wall)] {
            assert!(f.abs() < 1e-12 * peak, "wall {wall}: {f}");
        }
    }

    let prof = read(&out, "theta_flux_profiles.csv");
    assert_eq!(prof.header, ["tau", "eta", "flux"]);
    let by_tau = prof.group_by("tau", "flux");
    assert_eq!(by_tau.len(), 5);
    for frac in [8.0, 4.0, 2.5] {
        let u: Vec<f64> = by_tau[&f64::to_bits(period / frac)]
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .collect();
        assert!(sign_changes(&u) >= 1, "tau = T/{frac}");
    }

    let lines = read(&out, "theta_characteristics.csv");
    assert_eq!(lines.header, ["s", "k", "harmonic", "slope", "weight"]);
    assert!(!lines.rows.is_empty());
    for i in 0..lines.rows.len() {
        let (s, k) = (lines.num(i, "s").unwrap(), lines.num(i, "k").unwrap());
        assert!(s < k);
        assert_eq!(lines.num(i, "harmonic").unwrap(), k - s);
        assert_eq!(lines.num(i, "slope").unwrap(), (s + k + 1.0) / 2.0);
    }
}

#[test]
fn phase_snapshots_geometry() {
    let csv = Csv::parse(&stdout(&[
        "phase-snapshots",
        "--nx",
        "21",
        "--times",
        "0,0.3,0.9,2.5",
    ]));
    assert_eq!(csv.header, ["kind", "t", "x", "v", "f"]);
    let kind = csv.col("kind");
    let mut corners: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    let mut levels: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    let mut samples = 0;
    for i in 0..csv.rows.len() {
        let t = csv.num(i, "t").unwrap();
        match csv.rows[i][kind].as_str() {
            "corner" => {
                assert!(csv.num(i, "f").is_none());
                corners
                    .entry(t.to_bits())
                    .or_default()
                    .push((csv.num(i, "x").unwrap(), csv.num(i, "v").unwrap()));
            }
            "level" => levels
                .entry(t.to_bits())
                .or_default()
                .push(csv.num(i, "f").unwrap()),
            "sample" => samples += 1,
            other => panic!("unexpected kind {other}"),
        }
    }
    assert_eq!(samples, 4 * 21 * 21);
    assert_eq!(
        corners[&0.0f64.to_bits()],
        [(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (0.0, 1.0)]
    );
    for c in corners.values() {
        assert!((polygon_area(c) - 0.5).abs() < 1e-12);
    }
    // three segments of 9 points per snapshot
    for seg in levels.values().flat_map(|l| {
        assert_eq!(l.len(), 27);
        l.chunks(9)
    }) {
        for f in seg {
            assert!(
                (f - seg[0]).abs() <= 1e-12 * seg[0].abs().max(1.0),
                "{seg:?}"
            );
        }
    }
}

#[test]
fn verify_reports_and_exit_codes() {
    let out = run(&["verify"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let reports: Vec<ResidualReport> = serde_json::from_str(&text).unwrap();
    assert!(reports.len() >= 20 && reports.iter().all(|r| r.pass));
    assert_eq!(serde_json::to_string_pretty(&reports).unwrap() + "\n", text);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--flux-parsing",
        "factor-outside-cosine",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let reports: Vec<ResidualReport> =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let continuity = reports
        .iter()
        .find(|r| r.name == "continuity_theta")
        .unwrap();
    assert!(!continuity.pass);
}
