use std::path::Path;
use std::process::{Command, Output};

fn imftn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_imftn")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = imftn(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const SMALL: [&str; 8] = [
    "--set", "superframes=3",
    "--set", "frames_per_superframe=24",
    "--set", "pilot_restarts=4",
    "--set", "ebn0_db=0,6",
];

fn with<'a>(head: &[&'a str], tail: &[&'a str]) -> Vec<&'a str> {
    head.iter().chain(SMALL.iter()).chain(tail).cloned().collect()
}

#[test]
fn se_table_reproduces_rows() {
    let text = ok(&["se-table", "--frame", "32x256", "-m", "4"]);
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row, "32,256,4,0.72,0.35,0.75,5,0.9877,1.3717,1.3896,40.70,1.30");
    let text = ok(&["se-table", "--frame", "32x256", "-m", "4", "--tau", "0.8", "--beta", "0.5", "--l-c", "6"]);
    assert!(text.lines().nth(1).unwrap().contains(",1.1111,1.1256,"));
}

#[test]
fn simulation_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&with(&["simulate-psli", "--workers", "1", "--seed", "5", "--out", a.to_str().unwrap()], &[]));
    ok(&with(&["simulate-psli", "--workers", "4", "--seed", "5", "--out", b.to_str().unwrap()], &[]));
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("ebn0_db,pslie,pslie_ci_lo,pslie_ci_hi,mse,trials,seed\n"));
    assert_eq!(text.lines().count(), 3);

    // The config echo replays the run.
    let echo = dir.path().join("a.csv.cfg");
    assert!(echo.exists());
    let replay = ok(&["simulate-psli", "--config", echo.to_str().unwrap()]);
    assert_eq!(replay, text);

    let stdout = ok(&with(&["simulate-psli", "--seed", "5"], &[]));
    assert_eq!(stdout, text);
}

#[test]
fn mse_flags() {
    let known = ok(&with(&["simulate-mse", "--known-location", "--set", "channel_model=model1"], &["--no-interpolate"]));
    let ident = ok(&with(&["simulate-mse", "--set", "channel_model=model1"], &[]));
    assert_eq!(known.lines().count(), 3);
    assert_ne!(known, ident);
}

#[test]
fn pilot_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let pilot = dir.path().join("pilots/p.txt");
    ok(&["design-pilot", "--set", "pilot_restarts=4", "--out", pilot.to_str().unwrap()]);
    let text = std::fs::read_to_string(&pilot).unwrap();
    assert!(text.starts_with("# constellation=bpsk\n# n_p=32\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 32);

    let set = format!("pilot_file={}", pilot.display());
    let a = ok(&with(&["simulate-psli", "--set", &set], &[]));
    let b = ok(&with(&["simulate-psli", "--set", &set, "--set", "pilot_restarts=9"], &[]));
    assert_eq!(a, b);
}

#[test]
fn probes_and_dumps() {
    let probe = ok(&["channel-probe", "--set", "channel_model=model1", "--symbols", "10"]);
    assert!(probe.starts_with("k,l,re,im\n"));
    assert_eq!(probe.lines().count(), 1 + 10 * 7);

    let out = imftn(&["correlation-dump", "--set", "pilot_restarts=4", "--frame", "3"]);
    assert!(out.status.success());
    let dump = String::from_utf8(out.stdout).unwrap();
    assert!(dump.starts_with("delta,corr_sq,expected\n"));
    assert_eq!(dump.lines().count(), 1 + 288 - 32 + 1);
    let note = String::from_utf8(out.stderr).unwrap();
    let nums: Vec<&str> = note.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).collect();
    assert_eq!(nums[0], nums[1], "{note}");
}

#[test]
fn calibration_sweep() {
    let text = ok(&with(&["calibrate-detector", "--c1", "0.4,0.6", "--c2", "1,1.2"], &[]));
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "c1,c2,r0,ebn0_db,pslie,pslie_ci_lo,pslie_ci_hi,errors,trials");
    assert_eq!(lines.count(), 2 * 2 * 2);
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "tau = 0.84\nn_p = eight\n").unwrap();
    for args in [
        vec!["simulate-psli", "--set", "bogus=1"],
        vec!["simulate-psli", "--set", "tau"],
        vec!["simulate-psli", "--set", "tau=1.5"],
        vec!["simulate-psli", "--set", "ebn0_db="],
        vec!["simulate-psli", "--config", "/nonexistent/run.cfg"],
        vec!["simulate-psli", "--config", cfg.to_str().unwrap()],
        vec!["design-pilot", "--set", "pilot_file=/nonexistent/p.txt"],
        vec!["se-table", "--frame", "32by256"],
        vec!["no-such-command"],
    ] {
        let out = imftn(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
    let out = imftn(&["simulate-psli", "--config", cfg.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.cfg:2"));
    assert!(!Path::new("pilot.txt").exists());
}
