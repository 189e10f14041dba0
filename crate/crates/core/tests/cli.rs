//! End-to-end runs of the `privmapf` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn privmapf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privmapf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn solve_audit_ppfpp_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    let map = data("random-32-32-20.map");
    let map = map.to_str().unwrap();
    let scen = data("random-32-32-20-random-1.scen");
    let out = privmapf(&[
        "solve",
        "--map",
        map,
        "--scen",
        scen.to_str().unwrap(),
        "--agents",
        "6",
        "--k",
        "2",
        "--fov-radius",
        "1",
        "--solver",
        "lacam",
        "--seed",
        "3",
        "--budget",
        "2000",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let solved = json(&out);
    assert_eq!(solved["solved"], true);
    let rsoc = solved["rsoc"].as_u64().unwrap();

    let plan = run.join("plan.txt");
    let groups = run.join("groups.jsonl");
    let private = run.join("private");
    let out = privmapf(&[
        "audit",
        "--plan",
        plan.to_str().unwrap(),
        "--map",
        map,
        "--fov-radius",
        "1",
        "--groups",
        groups.to_str().unwrap(),
        "--private",
        private.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["clean"], true);
    assert_eq!(report["k"], 2);
    assert_eq!(report["metrics"]["rsoc"].as_u64(), Some(rsoc));

    let refined = dir.path().join("refined");
    let out = privmapf(&[
        "ppfpp",
        "--plan",
        plan.to_str().unwrap(),
        "--groups",
        groups.to_str().unwrap(),
        "--private",
        private.to_str().unwrap(),
        "--map",
        map,
        "--fov-radius",
        "1",
        "--out",
        refined.to_str().unwrap(),
        "--zones",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = json(&out);
    assert_eq!(metrics["before"]["rsoc"].as_u64(), Some(rsoc));
    assert!(metrics["after"]["rsoc"].as_u64().unwrap() <= rsoc);
    assert!(refined.join("refined_plan_5.txt").is_file());
    assert!(refined.join("zones.json").is_file());
}

#[test]
fn audit_flags_sightings() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("open.map");
    std::fs::write(&map, "type octile\nheight 1\nwidth 4\nmap\n....\n").unwrap();
    let plan = dir.path().join("plan.txt");
    // two single-agent groups ending next to each other
    std::fs::write(&plan, "0 0 0 1\n1 0 3 2\n").unwrap();
    let base = ["audit", "--plan", plan.to_str().unwrap(), "--map", map.to_str().unwrap()];
    assert!(privmapf(&base).status.success());
    let out = privmapf(&[&base[..], &["--fov-radius", "1"]].concat());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["conflicts"]["fov_conflicts"].as_array().unwrap().len(), 1);
}

#[test]
fn bench_writes_versioned_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("suite.toml");
    std::fs::write(
        &config,
        format!(
            "agents = [4]\nk = [1, 2]\nfov_radius = [1]\nseeds = [0, 1, 2]\n[[maps]]\nmap = {:?}\nscen = {:?}\n",
            data("empty-16-16.map"),
            data("empty-16-16-random-1.scen")
        ),
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_privmapf"))
        .args([
            "bench",
            "--config",
            config.to_str().unwrap(),
            "--out",
            csv.to_str().unwrap(),
            "--summarize",
        ])
        .env("PRIVMAPF_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# schema_version=1\n"));
    assert_eq!(text.lines().count(), 2 + 6);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mean±std"));

    let out = privmapf(&["bench", "--out", csv.to_str().unwrap(), "--cactus", "k"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"rsoc\""));
}

#[test]
fn bad_inputs_fail_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_privmapf"))
        .args(["bench", "--out", "x.csv"])
        .env("PRIVMAPF_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PRIVMAPF_THREADS"));

    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("suite.toml");
    std::fs::write(
        &config,
        "agents=[4]\nk=[2]\nfov_radius=[1]\nseeds=[0]\n[[maps]]\nmap='missing.map'\nscen='missing.scen'\n",
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = privmapf(&["bench", "--config", config.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.map"));
    assert!(!csv.exists());
}
