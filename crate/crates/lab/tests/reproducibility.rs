use std::fs;
use std::path::Path;

use collapse_lab::manifest::Manifest;
use collapse_lab::{run_scenario, RunRequest};

fn bytes(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn fig2_manifest_lists_one_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&RunRequest::new("fig2", dir.path())).unwrap();
    assert!(report.passed());
    let m = &report.manifest;
    assert_eq!(m.get("output.0"), Some("fig2.csv"));
    assert_eq!(m.get("output.1"), None);
    assert_eq!(m.get("seed"), Some("1"));
    let csv = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,rho1,re_rho3,im_rho3"));
    assert_eq!(csv.lines().count(), 1 + 1001);
    let keys: Vec<&str> = m.entries().iter().map(|(k, _)| k.as_str()).collect();
    assert_eq!(&keys[..5], ["scenario", "description", "code_version", "seed", "rng"]);
    assert_eq!(&keys[keys.len() - 2..], ["status", "runtime_s"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for id in ["fig5", "pointer_estimates"] {
        let ra = run_scenario(&RunRequest::new(id, a.path())).unwrap();
        run_scenario(&RunRequest::new(id, b.path())).unwrap();
        for p in &ra.outputs {
            let name = p.file_name().unwrap().to_str().unwrap();
            assert_eq!(bytes(a.path(), name), bytes(b.path(), name), "{name}");
        }
    }
}

#[test]
fn manifest_rerun_reproduces_stochastic_outputs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut req = RunRequest::new("grw_twopacket", a.path());
    req.seed = 99;
    req.params = vec![("runs".into(), "40".into()), ("horizon".into(), "0.5".into())];
    req.tolerances = vec![("frequency_halfwidth".into(), "1".into())];
    let first = run_scenario(&req).unwrap();

    let again = RunRequest::from_manifest(&first.manifest_path, b.path()).unwrap();
    assert_eq!(again.seed, 99);
    let second = run_scenario(&again).unwrap();
    assert_eq!(bytes(a.path(), "grw_twopacket.csv"), bytes(b.path(), "grw_twopacket.csv"));

    // same resolved configuration, ignoring the timing record
    let strip = |m: &Manifest| -> Vec<(String, String)> {
        m.entries().iter().filter(|(k, _)| k != "runtime_s").cloned().collect()
    };
    assert_eq!(strip(&first.manifest), strip(&second.manifest));
}

#[test]
fn seed_changes_stochastic_output() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut req = RunRequest::new("unraveling", a.path());
    req.params = vec![("trajectories".into(), "200".into())];
    run_scenario(&req).unwrap();
    req.seed = 2;
    req.out_dir = b.path().into();
    run_scenario(&req).unwrap();
    assert_ne!(bytes(a.path(), "unraveling.csv"), bytes(b.path(), "unraveling.csv"));
}

#[test]
fn override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let mut req = RunRequest::new("fig34", dir.path());
    req.params.push(("lambda".into(), "50".into()));
    let report = run_scenario(&req).unwrap();
    assert_eq!(report.manifest.get("param.lambda"), Some("5e1"));
    // twice the time scale stretches the plateau beyond its window
    assert!(!report.passed());
}

#[test]
fn concurrent_runs_into_distinct_directories() {
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    std::thread::scope(|s| {
        for d in &dirs {
            s.spawn(|| assert!(run_scenario(&RunRequest::new("fig34", d.path())).unwrap().passed()));
        }
    });
    let reference = bytes(dirs[0].path(), "fig34.csv");
    for d in &dirs[1..] {
        assert_eq!(bytes(d.path(), "fig34.csv"), reference);
    }
}

#[test]
fn numeric_solver_passes_the_same_checks() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["fig2", "fig34", "fig5"] {
        let mut req = RunRequest::new(id, dir.path());
        req.params.push(("numeric".into(), "1".into()));
        let r = run_scenario(&req).unwrap();
        assert!(r.passed(), "{id}: {:?}", r.checks);
    }
}
