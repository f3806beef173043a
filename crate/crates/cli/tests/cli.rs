use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fracrd::grid::BoundaryCondition;
use fracrd::models::{self, grid_for, initial_state};
use fracrd_cli::config::parse_config;
use fracrd_cli::output::SnapshotFile;

fn fracrd(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracrd"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn sorted_files(dir: &Path, ext: &str) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(ext))
        .collect();
    v.sort();
    v
}

#[test]
fn zero_length_run_writes_initial_condition() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[model]\nname = fisher1d\n[grid]\nn = 32\n[time]\ntau = 0.01\nT = 0\n[output]\ndir = out\n";
    fs::write(tmp.path().join("f.cfg"), cfg).unwrap();
    let out = fracrd(&["run", "f.cfg"], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let files = sorted_files(&tmp.path().join("out"), ".frrd");
    assert_eq!(files, vec!["snapshot_00000000.frrd"]);
    let snap = SnapshotFile::read(&tmp.path().join("out").join(&files[0])).unwrap();
    let model = models::by_name("fisher1d").unwrap();
    let grid = grid_for(model.as_ref(), 32, None).unwrap();
    let u0 = initial_state(model.as_ref(), &grid);
    assert_eq!(snap.time, 0.0);
    assert_eq!(snap.bc, BoundaryCondition::Dirichlet);
    assert_eq!(snap.shape, vec![31]);
    assert_eq!(snap.species, vec![(1.8, 10.0)]);
    assert_eq!(snap.data[0], u0.field(0).values());
}

const GS: &str = "# small Gray-Scott run
[model]
name = gray_scott
K = 0.055
alpha = 1.6
[grid]
n = 16
[time]
tau = 1
T = 6
snapshots = 2 4
[output]
dir = gs
pgm = true
summary_every = 2
";

#[test]
fn run_writes_snapshots_images_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("gs.cfg"), GS).unwrap();
    let out = fracrd(&["run", "gs.cfg"], tmp.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let dir = tmp.path().join("gs");

    assert_eq!(
        sorted_files(&dir, ".frrd"),
        vec![
            "snapshot_00000002.frrd",
            "snapshot_00000004.frrd",
            "snapshot_00000006.frrd"
        ]
    );
    let snap = SnapshotFile::read(&dir.join("snapshot_00000004.frrd")).unwrap();
    assert_eq!(snap.time, 4.0);
    assert_eq!(snap.shape, vec![16, 16]);
    assert_eq!(snap.species, vec![(1.6, 2e-5), (1.6, 1e-5)]);
    assert!(snap.data.iter().flatten().all(|v| v.is_finite()));

    let pgms = sorted_files(&dir, ".pgm");
    assert_eq!(pgms.len(), 6);
    let img = fs::read(dir.join("snapshot_00000006_v.pgm")).unwrap();
    let header = b"P5\n16 16\n255\n";
    assert!(img.starts_with(header));
    let pixels = &img[header.len()..];
    assert_eq!(pixels.len(), 256);
    assert_eq!(*pixels.iter().min().unwrap(), 0);
    assert_eq!(*pixels.iter().max().unwrap(), 255);

    let mut rdr = csv::Reader::from_path(dir.join("summary.csv")).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        headers,
        ["time", "u_min", "u_max", "u_mean", "v_min", "v_max", "v_mean"]
    );
    let times: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[0].parse().unwrap())
        .collect();
    assert_eq!(times, vec![0.0, 2.0, 4.0, 6.0]);
}

#[test]
fn reruns_are_byte_identical_for_any_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("gs.cfg"), GS).unwrap();
    let first = fracrd(&["run", "gs.cfg"], tmp.path());
    assert_eq!(code(&first), 0);
    let read_all = |d: &Path| -> Vec<Vec<u8>> {
        let mut names: Vec<_> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        names.sort();
        names.iter().map(|p| fs::read(p).unwrap()).collect()
    };
    let a = read_all(&tmp.path().join("gs"));
    fs::remove_dir_all(tmp.path().join("gs")).unwrap();
    let second = Command::new(env!("CARGO_BIN_EXE_fracrd"))
        .args(["run", "gs.cfg"])
        .env("FRACRD_THREADS", "1")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&second), 0);
    assert_eq!(a, read_all(&tmp.path().join("gs")));
}

#[test]
fn config_errors_exit_1_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("bad.cfg"),
        GS.replace("alpha = 1.6", "alpha = 2.5"),
    )
    .unwrap();
    let out = fracrd(&["run", "bad.cfg"], tmp.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 5"), "{}", stderr(&out));
    let missing = fracrd(&["run", "nope.cfg"], tmp.path());
    assert_eq!(code(&missing), 1);
    let usage = fracrd(&["converge", "--alpha", "1.5"], tmp.path());
    assert_eq!(code(&usage), 1);
    let threads = Command::new(env!("CARGO_BIN_EXE_fracrd"))
        .args(["oracle-check", "--n", "8", "--bc", "d", "--alpha", "1.5"])
        .env("FRACRD_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&threads), 1);
}

#[test]
fn divergence_exits_2_with_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[model]\nname = gray_scott\nF = 0.5\n[grid]\nn = 16\n[time]\ntau = 100\nT = 10000\n[output]\ndir = out\n";
    fs::write(tmp.path().join("d.cfg"), cfg).unwrap();
    let out = fracrd(&["run", "d.cfg"], tmp.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("stage"), "{}", stderr(&out));
}

#[test]
fn oracle_check_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = fracrd(
        &[
            "oracle-check",
            "--n",
            "16",
            "--bc",
            "dirichlet",
            "--alpha",
            "1.4",
        ],
        tmp.path(),
    );
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let text = String::from_utf8(ok.stdout).unwrap();
    assert!(text.contains("eigenvalue deviation"));
    assert!(text.contains("etd local order"));
    let periodic = fracrd(
        &[
            "oracle-check",
            "--n",
            "16",
            "--bc",
            "periodic",
            "--alpha",
            "2.0",
        ],
        tmp.path(),
    );
    assert_eq!(code(&periodic), 0, "{}", stderr(&periodic));
    let big = fracrd(
        &[
            "oracle-check",
            "--n",
            "128",
            "--bc",
            "neumann",
            "--alpha",
            "1.5",
        ],
        tmp.path(),
    );
    assert_eq!(code(&big), 1);
}

#[test]
fn stability_csv_shape_and_growth() {
    let tmp = tempfile::tempdir().unwrap();
    let out = fracrd(
        &[
            "stability",
            "--y",
            "0,-10",
            "--ntheta",
            "64",
            "--out",
            "s.csv",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let mut rdr = csv::Reader::from_path(tmp.path().join("s.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["y", "theta", "re_x", "im_x"]);
    let rows: Vec<[f64; 4]> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            [0, 1, 2, 3].map(|i| r[i].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 2 * 4 * 64);
    let width = |y: f64| {
        let xs: Vec<f64> = rows.iter().filter(|r| r[0] == y).map(|r| r[2]).collect();
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - xs.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    assert!(width(-10.0) > width(0.0));

    let few = fracrd(
        &["stability", "--ntheta", "63", "--out", "s.csv"],
        tmp.path(),
    );
    assert_eq!(code(&few), 1);
    let positive = fracrd(
        &["stability", "--y", "1", "--ntheta", "64", "--out", "s.csv"],
        tmp.path(),
    );
    assert_eq!(code(&positive), 1);
}

#[test]
fn converge_csv_is_deterministic_apart_from_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "converge",
        "--example",
        "fisher1d",
        "--alpha",
        "1.8",
        "--bc",
        "dirichlet",
        "--levels",
        "3",
    ];
    let strip = |o: Output| -> Vec<String> {
        String::from_utf8(o.stdout)
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    let a = strip(fracrd(&args, tmp.path()));
    let b = strip(fracrd(&args, tmp.path()));
    assert_eq!(a, b);
    assert_eq!(a[0], "h,tau,max_error,order");
    assert!(a[1].ends_with(','));
    let e: f64 = a[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((e / 1.3871e-2 - 1.0).abs() < 0.02);
    let order: f64 = a[3].split(',').nth(3).unwrap().parse().unwrap();
    assert!((order - 4.0588).abs() < 0.15);
}

#[test]
fn library_parse_matches_file_parse() {
    let cfg = parse_config(GS).unwrap();
    assert_eq!(cfg.snapshots, vec![2.0, 4.0]);
    assert!(cfg.pgm);
    assert_eq!(cfg.summary_every, 2);
}
