// Copyright 2026 The hevsplit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use hevsplit::cli::RunConfig;
use hevsplit::fixture;
use hevsplit::sim::{Scenario, SimulationTrace, SummaryFile};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hevsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hevsplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Short mixed scenario written into `dir`.
fn scenario_file(dir: &Path) -> PathBuf {
    let path = dir.join("short.csv");
    fs::write(
        &path,
        "time_s,speed_rad_s,torque_nm,soc_ref,equivalent_factor_g_j\n\
         0,150,1200,0.6,\n\
         4,206.7,2200,0.6,\n\
         8,180,-900,0.6,\n\
         12,120,300,0.6,\n\
         16,120,300,0.6,\n",
    )
    .unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn files(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(files(&p));
        } else {
            out.push((
                p.strip_prefix(dir).unwrap().to_path_buf(),
                fs::read(&p).unwrap(),
            ));
        }
    }
    out.sort();
    out
}

#[test]
fn run_all_controllers_writes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_file(dir.path());
    let out = dir.path().join("out");
    let o = hevsplit(&[
        "run",
        "--all-controllers",
        "--scenario",
        s(&scen),
        "--out",
        s(&out),
        "--jobs",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let summary =
        SummaryFile::from_toml_str(&fs::read_to_string(out.join("summary.toml")).unwrap()).unwrap();
    let names: Vec<_> = summary.runs.iter().map(|r| r.controller.as_str()).collect();
    assert_eq!(names, ["ecms-tan", "ecms-log", "lqt"]);
    for r in &summary.runs {
        assert!(r.delivered_torque_pct > 0.0 && r.average_fuel_g_s > 0.0);
        assert_eq!(r.steps, 801);
        let trace = fs::File::open(out.join(format!("trace_{}.csv", r.controller))).unwrap();
        let records = SimulationTrace::read_records(trace).unwrap();
        assert_eq!(records.len(), r.steps);
        for fig in ["soc", "undelivered"] {
            let text = fs::read_to_string(out.join(format!("figures/{fig}_{}.csv", r.controller)))
                .unwrap();
            assert_eq!(text.lines().count(), r.steps + 1);
        }
    }
    assert!(out.join("figures/penalty_curves.csv").exists());
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(SummaryFile::from_toml_str(&stdout).unwrap(), summary);

    // the written config reproduces the run
    let cfg =
        RunConfig::from_toml_str(&fs::read_to_string(out.join("config.toml")).unwrap()).unwrap();
    assert_eq!(cfg.scenario.as_deref(), Some(scen.as_path()));
    let again = dir.path().join("again");
    let o = hevsplit(&[
        "run",
        "--config",
        s(&out.join("config.toml")),
        "--out",
        s(&again),
        "--all-controllers",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for c in ["ecms-tan", "ecms-log", "lqt"] {
        let name = format!("trace_{c}.csv");
        assert_eq!(
            fs::read(out.join(&name)).unwrap(),
            fs::read(again.join(&name)).unwrap()
        );
    }
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_file(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let o = hevsplit(&[
            "run",
            "--all-controllers",
            "--scenario",
            s(&scen),
            "--out",
            s(out),
            "--seed",
            "7",
            "--jobs",
            jobs,
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), 12);
    for ((name, x), (other, y)) in fa.iter().zip(&fb) {
        assert_eq!(name, other);
        if name == Path::new("config.toml") {
            // only the recorded output directory differs
            let diff: Vec<_> = String::from_utf8_lossy(x)
                .lines()
                .zip(String::from_utf8_lossy(y).lines())
                .filter(|(l, r)| l != r)
                .map(|(l, _)| l.to_string())
                .collect();
            assert_eq!(diff.len(), 1);
            assert!(diff[0].starts_with("out = "));
        } else {
            assert!(x == y, "{} differs", name.display());
        }
    }
    let c = dir.path().join("c");
    let o = hevsplit(&[
        "run",
        "--controller",
        "lqt",
        "--scenario",
        s(&scen),
        "--out",
        s(&c),
        "--seed",
        "8",
    ]);
    assert_eq!(code(&o), 0);
    assert_ne!(
        fs::read(a.join("trace_lqt.csv")).unwrap(),
        fs::read(c.join("trace_lqt.csv")).unwrap()
    );
}

#[test]
fn bundled_map_and_scenario_files_load() {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let scenario = fs::read_to_string(data.join("scenarios/positive_window.csv")).unwrap();
    assert_eq!(
        Scenario::from_csv_str(&scenario).unwrap(),
        fixture::positive_window_scenario()
    );
    let dir = tempfile::tempdir().unwrap();
    let o = hevsplit(&[
        "run",
        "--controller",
        "ecms-log",
        "--map",
        s(&data.join("fixture_map.toml")),
        "--scenario",
        s(&scenario_file(dir.path())),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let scen = scenario_file(dir.path());
    let out = dir.path().join("out");

    let missing = dir.path().join("nowhere.toml");
    let o = hevsplit(&[
        "run",
        "--map",
        s(&missing),
        "--scenario",
        s(&scen),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("nowhere.toml"), "{}", stderr(&o));

    let o = hevsplit(&[
        "run",
        "--epsilon",
        "0.001",
        "--scenario",
        s(&scen),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("epsilon"), "{}", stderr(&o));
    let o = hevsplit(&[
        "run",
        "--epsilon",
        "0.001",
        "--allow-unsafe-epsilon",
        "--scenario",
        s(&scen),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "time_s,speed_rad_s,torque_nm,soc_ref,equivalent_factor_g_j\n0,150,10,0.5,\n1,-5,10,0.5,\n",
    )
    .unwrap();
    let o = hevsplit(&["run", "--scenario", s(&bad), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = hevsplit(&[
        "run",
        "--controller",
        "pid",
        "--scenario",
        s(&scen),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
    let o = hevsplit(&[
        "run",
        "--jobs",
        "0",
        "--scenario",
        s(&scen),
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
    let o = hevsplit(&["run", "--bogus"]);
    assert_eq!(code(&o), 2);

    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "schema_version = 1\nunknown_key = 3\n").unwrap();
    let o = hevsplit(&[
        "inspect",
        "--config",
        s(&cfg),
        "--soc",
        "0.5",
        "--speed",
        "150",
        "--torque",
        "100",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown_key"), "{}", stderr(&o));
}

#[test]
fn controller_runtime_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = fixture::powertrain()
        .to_toml_string()
        .unwrap()
        .replace("auxiliary_power = 2500.0", "auxiliary_power = 2000000.0");
    let map = dir.path().join("map.toml");
    fs::write(&map, text).unwrap();
    let o = hevsplit(&[
        "inspect",
        "--map",
        s(&map),
        "--soc",
        "0.5",
        "--speed",
        "200",
        "--torque",
        "100",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let o = hevsplit(&[
        "run",
        "--map",
        s(&map),
        "--scenario",
        s(&scenario_file(dir.path())),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

fn inspect(args: &[&str]) -> String {
    let mut all = vec!["inspect"];
    all.extend_from_slice(args);
    let o = hevsplit(&all);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    String::from_utf8(o.stdout).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(key)).unwrap();
    line[key.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn inspect_reports_bounds_and_controls() {
    let speed = "206.7168";
    let text = inspect(&["--soc", "0.155", "--speed", speed, "--torque", "1500"]);
    assert!(
        text.lines()
            .any(|l| l.starts_with("u_max") && l.contains("soc_lower")),
        "{text}"
    );
    assert_eq!(field(&text, "u_max"), 0.0);

    let text = inspect(&[
        "--soc",
        "0.65",
        "--soc-ref",
        "0.65",
        "--speed",
        speed,
        "--torque",
        "1000",
    ]);
    let lqt = text.lines().find(|l| l.starts_with("lqt")).unwrap();
    assert!(lqt.contains("u* = 0.000 W"), "{lqt}");
    assert!(text
        .lines()
        .any(|l| l.starts_with("ecms-tan") && l.contains("s_B")));

    let text = inspect(&["--soc", "0.6", "--speed", speed, "--torque", "5000"]);
    let slice = fixture::powertrain().at(206.7168);
    let expected = slice.ice.m_max + field(&text, "em at u_max");
    assert!(
        (field(&text, "deliverable") - expected).abs() < 2e-3,
        "{text}"
    );

    let text = inspect(&["--soc", "0.6", "--speed", speed, "--torque", "-3000"]);
    assert!(field(&text, "deliverable") == -3000.0);
}
