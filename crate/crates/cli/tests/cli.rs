use std::path::Path;
use std::process::{Command, Output};

fn mls(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mls")).args(args).current_dir(dir).env_remove("MLS_CAP").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn construct_then_verify_psu3_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&["construct", "--recipe", "psu3", "--variant", "even_qp1_prime", "--q", "4", "--out", "psu3_4.ls"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let cert = std::fs::read_to_string(dir.path().join("psu3_4.ls.cert")).unwrap();
    assert!(cert.contains("reps=5"));
    assert!(cert.contains("length=38 minimal=yes"));
    assert!(!cert.contains("FAIL"));
    let v = mls(&["ls", "verify", "psu3_4.ls"], dir.path());
    assert_eq!(v.status.code(), Some(0));
    assert_eq!(stdout(&v), "VALID length=38 minimal=yes\n");
    let again = mls(&["ls", "verify", "--threads", "1", "psu3_4.ls"], dir.path());
    assert_eq!(stdout(&again), stdout(&v));
}

#[test]
fn construct_psu3_3_writes_file_and_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&["construct", "--recipe", "psu3", "--variant", "odd_q2q1_prime", "--q", "3", "--out", "psu3_3.ls"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("psu3_3.ls").exists());
    let v = mls(&["ls", "verify", "psu3_3.ls"], dir.path());
    assert_eq!(stdout(&v), "VALID length=26 minimal=yes\n");
    let info = stdout(&mls(&["ls", "info", "psu3_3.ls"], dir.path()));
    assert!(info.starts_with("PSU 3 3 domain=28 order=6048\n"));
}

#[test]
fn collision_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // Z6 = <(0 1 2 3 4 5)>, blocks {e, a} x {e, a, a^2}
    let text = "Z 6 domain=6 order=6\nblocks=2 type=2,3\n0 1 2 3 4 5\n1 2 3 4 5 0\n%\n0 1 2 3 4 5\n1 2 3 4 5 0\n2 3 4 5 0 1\n";
    std::fs::write(dir.path().join("bad.ls"), text).unwrap();
    let o = mls(&["ls", "verify", "bad.ls"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("collision [0, 1] [1, 0]"));
}

#[test]
fn unmet_hypothesis_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&["construct", "--recipe", "psu3", "--variant", "odd_q2q1_prime", "--q", "5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("21 prime"));
}

#[test]
fn usage_errors_exit_64() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mls(&["frobnicate"], dir.path()).status.code(), Some(64));
    assert_eq!(mls(&["construct", "--recipe", "psu3", "--q", "4"], dir.path()).status.code(), Some(64));
    assert_eq!(mls(&["refute", "all", "--n", "4", "--q", "2"], dir.path()).status.code(), Some(64));
    assert_eq!(mls(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn refute_all_prints_five_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&["refute", "all", "--n", "3", "--q", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    for (k, l) in lines.iter().enumerate() {
        assert!(l.starts_with(&format!("R{}: confirms_gap |", k + 1)), "{l}");
    }
    assert_eq!(stdout(&mls(&["refute", "all", "--n", "3", "--q", "2"], dir.path())), out);
}

#[test]
fn group_and_geometry_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = mls(&["group", "order", "--q", "3"], dir.path());
    assert_eq!(stdout(&o), "stabchain=6048 enumerated=6048 formula=6048\n");
    let o = mls(&["group", "orbits", "--q", "4", "--part", "singer"], dir.path());
    assert_eq!(stdout(&o), "order=13 domain=65 orbits=5 sizes=13^5\n");
    let o = mls(&["geometry", "isotropic", "--n", "4", "--q", "2"], dir.path());
    assert_eq!(stdout(&o), "n=4 q=2 isotropic_points=45 closed_form=45 MATCH\n");
    let o = mls(&["geometry", "spread", "--n", "2", "--q", "3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let o = mls(&["field", "info", "--q", "4"], dir.path());
    assert!(stdout(&o).starts_with("GF(4) p=2 k=2 order=4 modulus="));
}
