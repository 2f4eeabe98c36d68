use std::path::Path;
use std::process::{Command, Output};

fn rms_sim(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rms-sim")).args(args).current_dir(cwd).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn dl_sweep_writes_schema_and_respects_overrides() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.cfg", "elements_sweep = 9\ntrials = 50\n");
    let out = rms_sim(&["dl-sweep", "--config", "c.cfg", "--out", "dl.csv", "--trials", "2", "--seed", "3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("dl.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scenario,algorithm,M,trial,seed,metric,iterations,converged");
    assert_eq!(lines.len(), 1 + 2 * 4);
    let algs: Vec<&str> = lines[1..5].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(algs, ["proposed", "ea", "zf", "ra"]);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 8);
        assert_eq!(cols[0], "dl");
        assert_eq!(cols[2], "9");
        cols[4].parse::<u64>().unwrap();
        assert!(cols[5].parse::<f64>().unwrap() > 0.0);
        assert!(cols[7] == "true" || cols[7] == "false");
    }
}

#[test]
fn ul_sweep_lists_benchmarks() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.cfg", "users = 5\nelements_sweep = 9\ntrials = 1\n");
    let out = rms_sim(&["ul-sweep", "--config", "c.cfg", "--out", "ul.csv"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("ul.csv")).unwrap();
    let algs: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(algs, ["proposed", "three_stage", "random_coefficient", "random_allocation"]);
}

#[test]
fn unknown_config_key_fails_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.cfg", "userz = 4\n");
    let out = rms_sim(&["dl-sweep", "--config", "bad.cfg", "--out", "x.csv"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1);
    assert!(err.contains("userz"));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn missing_config_and_unwritable_output_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = rms_sim(&["dl-sweep", "--config", "nope.cfg", "--out", "x.csv"], dir.path());
    assert!(!out.status.success());
    write(dir.path(), "c.cfg", "elements_sweep = 9\ntrials = 1\n");
    let out = rms_sim(&["dl-sweep", "--config", "c.cfg", "--out", "no/such/dir/x.csv"], dir.path());
    assert!(!out.status.success());
    assert_eq!(String::from_utf8(out.stderr).unwrap().trim_end().lines().count(), 1);
}

#[test]
fn chanest_nmse_columns() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.cfg", "trials = 3\n");
    let out = rms_sim(
        &["chanest-nmse", "--config", "c.cfg", "--out", "n.csv", "--snr-db", "-10,0,20", "--elements", "9"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("n.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "snr_db,trial,nmse_cascaded,nmse_separated");
    assert_eq!(lines.len(), 1 + 9);
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[2] > 0.0 && cols[3] > 0.0);
    }
}

#[test]
fn modulate_writes_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let out = rms_sim(&["modulate", "--scheme", "qam16", "--bits", "00011110", "--out", "s.csv", "--elements", "3"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "element,symbol_index,t_on_frac,tau_frac,re,im");
    assert_eq!(lines.len(), 1 + 2 * 3);
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((0.0..1.0).contains(&cols[2]));
        assert!((0.0..=1.0).contains(&cols[3]));
        assert!(cols[4].hypot(cols[5]) <= 2.0 / std::f64::consts::PI + 1e-12);
    }
}

#[test]
fn modulate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        ["modulate", "--scheme", "qam64", "--bits", "0101", "--out", "s.csv"],
        ["modulate", "--scheme", "qpsk", "--bits", "010", "--out", "s.csv"],
        ["modulate", "--scheme", "bpsk", "--bits", "01x", "--out", "s.csv"],
    ] {
        let out = rms_sim(&args, dir.path());
        assert!(!out.status.success());
        assert_eq!(String::from_utf8(out.stderr).unwrap().trim_end().lines().count(), 1);
    }
}

#[test]
fn dump_channel_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c.cfg", "");
    for name in ["a.txt", "b.txt"] {
        let out = rms_sim(&["dump-channel", "--config", "c.cfg", "--out", name, "--elements", "9", "--seed", "4"], dir.path());
        assert!(out.status.success());
    }
    let a = std::fs::read_to_string(dir.path().join("a.txt")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.txt")).unwrap());
    assert!(a.starts_with("dims 4 9\n"));
}
