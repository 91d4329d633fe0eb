use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spike_encode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spike-encode")).args(args).output().expect("run spike-encode")
}

fn ok(args: &[&str]) -> String {
    let out = spike_encode(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn dir_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_small_signal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir_str(dir.path());
    ok(&["generate", "--kind", "sinusoidal", "--length", "4", "--periods", "1", "--out-dir", d]);
    let text = fs::read_to_string(dir.path().join("signal_sinusoidal.csv")).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("step,amplitude\n"));
    assert!(text.lines().skip(1).enumerate().all(|(i, l)| l.starts_with(&format!("{},", i + 1))));
}

#[test]
fn generate_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        ok(&["generate", "--length", "512", "--seed", "7", "--out-dir", dir_str(d.path())]);
    }
    for kind in ["vibration", "trended", "rectangular", "sinusoidal"] {
        let name = format!("signal_{kind}.csv");
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn encode_reports_bad_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.csv");
    fs::write(&input, "step,amplitude\n1,0.5\n2,0.7\n3,abc\n").unwrap();
    let out = spike_encode(&["encode", "--method", "sf", "--param", "threshold=0.1", "--input", dir_str(&input)]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn sf_encode_decode_example() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir_str(dir.path());
    let input = dir.path().join("in.csv");
    fs::write(&input, "step,amplitude\n1,0.1\n2,0.3\n3,0.2\n4,0.4\n5,0.8\n").unwrap();
    ok(&["encode", "--method", "sf", "--param", "threshold=0.15", "--input", dir_str(&input), "--out-dir", d]);
    let spikes = fs::read_to_string(dir.path().join("spikes.csv")).unwrap();
    assert_eq!(spikes, "step,spike\n1,0\n2,1\n3,0\n4,1\n5,1\n");
    assert!(!dir.path().join("spikes.norm").exists());

    let spikes_path = dir.path().join("spikes.csv");
    ok(&[
        "decode",
        "--method",
        "sf",
        "--param",
        "threshold=0.15",
        "--initial-value",
        "0.1",
        "--input",
        dir_str(&spikes_path),
        "--out-dir",
        d,
    ]);
    let recon = fs::read_to_string(dir.path().join("reconstruction.csv")).unwrap();
    let values: Vec<f64> = recon.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    for (got, want) in values.iter().zip([0.1, 0.25, 0.25, 0.4, 0.55]) {
        assert!((got - want).abs() < 1e-12, "{values:?}");
    }
}

#[test]
fn optimize_writes_params_usable_by_encode() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir_str(dir.path());
    ok(&["generate", "--kind", "sinusoidal", "--length", "256", "--out-dir", d]);
    let signal = dir.path().join("signal_sinusoidal.csv");

    ok(&["optimize", "--method", "pwm", "--trials", "1", "--input", dir_str(&signal), "--out-dir", d]);
    let trials = fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 2, "{trials}");
    assert!(trials.starts_with("trial,mse,frequency,downspike\n1,"));

    ok(&["optimize", "--method", "sf", "--trials", "25", "--input", dir_str(&signal), "--out-dir", d]);
    let first = fs::read(dir.path().join("trials.csv")).unwrap();
    ok(&["optimize", "--method", "sf", "--trials", "25", "--input", dir_str(&signal), "--out-dir", d]);
    assert_eq!(first, fs::read(dir.path().join("trials.csv")).unwrap());

    ok(&["optimize", "--method", "lif", "--trials", "20", "--input", dir_str(&signal), "--out-dir", d]);
    let params = dir.path().join("best_params.txt");
    assert!(fs::read_to_string(&params).unwrap().starts_with("method=lif\n"));
    let spikes = dir.path().join("lif.csv");
    ok(&["encode", "--params", dir_str(&params), "--input", dir_str(&signal), "--output", dir_str(&spikes)]);
    assert!(dir.path().join("lif.norm").exists());
    let recon = dir.path().join("lif_recon.csv");
    ok(&["decode", "--params", dir_str(&params), "--input", dir_str(&spikes), "--output", dir_str(&recon)]);
    assert_eq!(fs::read_to_string(&recon).unwrap().lines().count(), 257);

    let clash = spike_encode(&["encode", "--method", "sf", "--params", dir_str(&params), "--input", dir_str(&signal)]);
    assert!(!clash.status.success());
}

#[test]
fn bench_outputs_agree_with_summary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir_str(dir.path());
    let stdout =
        ok(&["bench", "--length", "256", "--trials", "10", "--bsa-trials", "10", "--repeats", "1", "--out-dir", d]);
    assert!(stdout.contains("SF"));

    let summary = fs::read_to_string(dir.path().join("reconstruction_error.csv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next(), Some("signal,LIF,SF,PWM,BSA"));
    let table: Vec<Vec<String>> = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    assert_eq!(table.len(), 4);

    let manifest = fs::read_to_string(dir.path().join("manifest.csv")).unwrap();
    let mut entries = manifest.lines();
    assert_eq!(entries.next(), Some("feature,method,signal,file"));
    let methods = ["LIF", "SF", "PWM", "BSA"];
    let mut seen = 0;
    for entry in entries {
        let fields: Vec<&str> = entry.split(',').collect();
        let text = fs::read_to_string(dir.path().join(fields[3])).unwrap();
        assert_eq!(text.lines().count(), 257, "{}", fields[3]);
        assert!(text.starts_with("step,original,reconstructed,mse\n"));
        let last_mse = text.lines().last().unwrap().rsplit(',').next().unwrap();
        let column = 1 + methods.iter().position(|m| m.eq_ignore_ascii_case(fields[1])).unwrap();
        let row = table.iter().find(|r| r[0] == fields[2]).unwrap();
        assert_eq!(last_mse, row[column], "{entry}");
        seen += 1;
    }
    assert_eq!(seen, 16);

    let report = ok(&["report", "--out-dir", d]);
    assert!(report.contains("Means"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.cfg");
    fs::write(&config, format!("seed=3\nlength=64\nout_dir={}\nsignals=rectangular\n", dir.path().display())).unwrap();
    ok(&["--config", dir_str(&config), "generate", "--length", "32"]);
    let text = fs::read_to_string(dir.path().join("signal_rectangular.csv")).unwrap();
    assert_eq!(text.lines().count(), 33);
    assert!(!dir.path().join("signal_sinusoidal.csv").exists());

    fs::write(&config, "seeds=3\n").unwrap();
    let out = spike_encode(&["--config", dir_str(&config), "generate"]);
    assert!(!out.status.success());
}
