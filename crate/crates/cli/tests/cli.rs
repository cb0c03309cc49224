use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TINY: &str = r#"{
  "name": "tiny",
  "base_seed": 7,
  "runs": 3,
  "mu": 10,
  "cells": [
    {"problem": "grating", "n": 4, "eps2": [0, 0.01],
     "algorithms": ["mo-cma", "sms-emoa", "nsga2"], "budget": {"evaluations": 1000}},
    {"problem": "sphere", "n": 4, "eps2": 0.01, "algorithms": "mo-cma",
     "schemes": ["D", "E", "O"], "budget": {"generations": 20}}
  ]
}"#;

const TABLES: [&str; 4] = ["runs.csv", "fronts.csv", "traces.csv", "summary.json"];

fn noisebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisebench")).args(args).output().expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("campaign.json");
    fs::write(&p, body).unwrap();
    p
}

fn run_tiny(dir: &Path, out: &str, workers: &str) -> Output {
    let cfg = write_config(dir, TINY);
    let out = dir.join(out);
    let o = noisebench(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", workers]);
    assert!(o.status.success(), "{}", text(&o));
    o
}

fn read_tables(out: &Path) -> Vec<Vec<u8>> {
    TABLES.iter().map(|t| fs::read(out.join(t)).unwrap()).collect()
}

#[test]
fn reruns_are_bit_identical_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let first = read_tables(&dir.path().join("a"));

    let again = run_tiny(dir.path(), "a", "1");
    assert!(text(&again).contains("0 runs executed, 27 reused"), "{}", text(&again));
    assert_eq!(read_tables(&dir.path().join("a")), first);

    // a fresh directory with a different worker count
    run_tiny(dir.path(), "b", "3");
    assert_eq!(read_tables(&dir.path().join("b")), first);

    // an interrupted campaign: one staged run missing
    fs::remove_file(dir.path().join("a/runs/c004-r001.json")).unwrap();
    let resumed = run_tiny(dir.path(), "a", "2");
    assert!(text(&resumed).contains("1 runs executed, 26 reused"), "{}", text(&resumed));
    assert_eq!(read_tables(&dir.path().join("a")), first);
}

#[test]
fn seed_override_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let cfg = dir.path().join("campaign.json");
    let out = dir.path().join("s");
    let o = noisebench(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "8"]);
    assert!(o.status.success(), "{}", text(&o));
    assert_ne!(fs::read(out.join("runs.csv")).unwrap(), fs::read(dir.path().join("a/runs.csv")).unwrap());
}

#[test]
fn budgets_are_respected() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let mut r = csv::Reader::from_path(dir.path().join("a/runs.csv")).unwrap();
    let h = r.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let (evals, gens, alg, scheme, problem) =
        (col("evaluations"), col("generations"), col("algorithm"), col("scheme"), col("problem"));
    for rec in r.records() {
        let rec = rec.unwrap();
        let e: u64 = rec[evals].parse().unwrap();
        let g: u64 = rec[gens].parse().unwrap();
        if &rec[problem] == "grating" {
            assert!(e <= 1000, "{rec:?}");
            // initialization plus mu evaluations per generation; a
            // steady-state generation is mu single-offspring steps
            assert_eq!(e, 10 + 10 * g, "{}", &rec[alg]);
        } else {
            assert_eq!(g, 20);
            match &rec[scheme] {
                "D" => assert_eq!(e, 10 + 20 * 10),
                "E" => assert_eq!(e, 10 + 20 * 20),
                // re-evaluation at generations 10 and 20
                _ => assert_eq!(e, 10 + 20 * 10 + 2 * 10),
            }
        }
    }
}

#[test]
fn analytic_rows_and_plot_selection() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let out = dir.path().join("a");
    let o = noisebench(&["plotdata", "--out", out.to_str().unwrap(), "--select", "kind=analytic,case=grating-n4-m2-eps0"]);
    assert!(o.status.success(), "{}", text(&o));
    let csv = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(6).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2, "{csv}");
    assert_eq!(rows[0], vec![1.0, 0.0]);
    assert_eq!(rows[1][0], 0.0);
    assert!((rows[1][1] - 0.94964).abs() < 1e-5);

    let empty = noisebench(&["plotdata", "--out", out.to_str().unwrap(), "--select", "kind=nothing"]);
    assert!(empty.status.success());
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);

    let bad = noisebench(&["plotdata", "--out", out.to_str().unwrap(), "--select", "colour=red"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(text(&bad).contains("unknown selection key"));
}

#[test]
fn posthoc_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let out = dir.path().join("a");
    let out_s = out.to_str().unwrap();
    let run = "c006-r000"; // sphere, scheme D, eps2 = 0.01

    let o = noisebench(&["posthoc", "sample", "--out", out_s, "--run", run, "--k", "100"]);
    assert!(o.status.success(), "{}", text(&o));
    let clouds = fs::read_to_string(out.join("clouds.csv")).unwrap();
    assert_eq!(clouds.lines().count() - 1, 100 * 10);

    let o = noisebench(&["posthoc", "reconstruct", "--out", out_s, "--run", run]);
    assert!(o.status.success(), "{}", text(&o));
    let fronts = fs::read_to_string(out.join("fronts.csv")).unwrap();
    let sampled = fronts.lines().filter(|l| l.contains(",sampled,")).count();
    assert!(sampled >= 1 && sampled <= 1000, "{sampled}");

    let o = noisebench(&["posthoc", "ellipse", "--out", out_s, "--run", run]);
    assert!(o.status.success(), "{}", text(&o));
    let ellipses = fs::read_to_string(out.join("ellipses.csv")).unwrap();
    assert_eq!(ellipses.lines().filter(|l| l.contains(",empirical,")).count(), 10);
    assert_eq!(ellipses.lines().filter(|l| l.contains(",analytic,")).count(), 10);

    // re-evaluation is idempotent
    assert!(noisebench(&["posthoc", "reeval", "--out", out_s]).status.success());
    let once = fs::read(out.join("fronts.csv")).unwrap();
    assert!(noisebench(&["posthoc", "reeval", "--out", out_s]).status.success());
    assert_eq!(fs::read(out.join("fronts.csv")).unwrap(), once);
    assert!(String::from_utf8(once).unwrap().contains(",ideal,"));
}

#[test]
fn posthoc_needs_staged_genotypes() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let out = dir.path().join("a");
    fs::remove_dir_all(out.join("runs")).unwrap();
    let o = noisebench(&["posthoc", "reeval", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("fronts.csv alone is not enough"), "{}", text(&o));
}

#[test]
fn stats_tables() {
    let dir = tempfile::tempdir().unwrap();
    run_tiny(dir.path(), "a", "1");
    let out = dir.path().join("a");
    let o = noisebench(&["stats", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("mo-cma-D vs sms-emoa"), "{table}");
    let utest = fs::read_to_string(out.join("utest.csv")).unwrap();
    // 2 grating cases × 3 pairs + 1 sphere case × 3 pairs, two metrics each
    assert_eq!(utest.lines().count() - 1, 9 * 2);
    assert!(fs::read_to_string(out.join("stats.csv")).unwrap().contains("delta_v_ideal"));
}

#[test]
fn single_run_cells_skip_tests() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &TINY.replace("\"runs\": 3", "\"runs\": 1"));
    let out = dir.path().join("one");
    assert!(noisebench(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    let o = noisebench(&["stats", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    assert!(String::from_utf8(o.stdout).unwrap().contains("skipped (too few runs)"));
    assert_eq!(fs::read_to_string(out.join("utest.csv")).unwrap().lines().count(), 0);
}

#[test]
fn config_errors_exit_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "{\n  \"base_seed\": 1,\n  \"runs\": \"three\"\n}");
    let o = noisebench(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("campaign.json:3:"), "{}", text(&o));

    let cfg = write_config(dir.path(), &TINY.replace("\"n\": 4, \"eps2\": 0.01", "\"n\": 1, \"eps2\": 0.01"));
    let o = noisebench(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("at least 2"), "{}", text(&o));

    assert_eq!(noisebench(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(noisebench(&["run", "--out", "x"]).status.code(), Some(2));
    assert_eq!(noisebench(&["selftest", "--profile", "nope"]).status.code(), Some(2));
}

#[test]
fn hv_command() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("pts.csv");
    fs::write(&p, "f1,f2\n1,2\n2,1\n").unwrap();
    let o = noisebench(&["hv", "--front", p.to_str().unwrap(), "--ref", "3,3"]);
    assert!(o.status.success(), "{}", text(&o));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "3");

    fs::write(&p, "a,b\n1,0\n0,1\n").unwrap();
    let o = noisebench(&["hv", "--front", p.to_str().unwrap(), "--ref", "0,0", "--sense", "max"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "0");
    let o = noisebench(&["hv", "--front", p.to_str().unwrap(), "--ref", "-1,-1", "--sense", "max"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), "3");

    let o = noisebench(&["hv", "--front", p.to_str().unwrap(), "--ref", "0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_quick_passes() {
    let o = noisebench(&["selftest", "--profile", "quick"]);
    assert!(o.status.success(), "{}", text(&o));
    let out = String::from_utf8(o.stdout).unwrap();
    assert_eq!(out.lines().filter(|l| l.starts_with("[PASS]")).count(), 5, "{out}");
}
