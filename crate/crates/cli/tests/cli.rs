use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use wildtame_core::KernelReport;

const VALID: &str = "WTREC 1\nfield Q(sqrt(-14))[n=1] 6 4047 90 597 -2 36 0 1\ngroup 3\naction gamma 1\n\
                     norm_to Q(sqrt(-14)) 0 1\nprovenance test\n";
const NON_COMMUTING: &str =
    "WTREC 1\nfield Q(sqrt(-14)) 2 14 0 1\ngroup 3 3\naction a 1 1 0 1\naction b 1 0 1 1\nprovenance test\n";

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str], data: Option<&Path>, cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wildtame"));
    cmd.args(args).env_remove("WILDTAME_DATA").env_remove("WILDTAME_CACHE");
    if let Some(d) = data {
        cmd.arg("--data-dir").arg(d);
    }
    if let Some(c) = cache {
        cmd.arg("--cache-dir").arg(c);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_717_json() {
    let o = run(&["analyze", "--delta", "717"], Some(&data_dir()), None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("\"verdict\":\"Split\""), "{text}");
}

#[test]
fn json_round_trip_is_byte_identical() {
    let o = run(&["analyze", "--delta", "42"], Some(&data_dir()), None);
    let line = stdout(&o);
    let r: KernelReport = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(serde_json::to_string(&r).unwrap(), line.trim());
}

#[test]
fn table_42_shows_z27() {
    let o = run(&["--format", "table", "analyze", "--delta", "42"], Some(&data_dir()), None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("delta"));
    assert!(text.contains("Z/27") && text.contains("NonSplit"), "{text}");
}

#[test]
fn bad_delta_exits_2() {
    for d in ["0", "18", "1"] {
        let o = run(&["analyze", "--delta", d], None, None);
        assert_eq!(o.status.code(), Some(2), "δ = {d}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
}

#[test]
fn missing_data_dir_exits_2() {
    let o = run(&["analyze", "--delta", "717"], Some(Path::new("/nonexistent/wildtame")), None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_counts_verdicts() {
    let o = run(&["scan", "--from", "40", "--to", "720"], Some(&data_dir()), None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let footer: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    let v = &footer["summary"]["verdicts"];
    assert!(v["Split"].as_str().unwrap().parse::<u32>().unwrap() >= 1);
    assert!(v["NonSplit"].as_str().unwrap().parse::<u32>().unwrap() >= 1);
    let reports: usize = footer["summary"]["reports"].as_str().unwrap().parse().unwrap();
    assert_eq!(reports, text.lines().count() - 1);
}

#[test]
fn scan_empty_and_inverted_ranges() {
    let o = run(&["scan", "--from", "7", "--to", "8"], None, None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"reports\":\"0\""));
    let o = run(&["--format", "table", "scan", "--from", "7", "--to", "8"], None, None);
    assert!(stdout(&o).contains("reports=0"));
    let o = run(&["scan", "--from", "5", "--to", "4"], None, None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scan_with_warm_cache_is_stable() {
    let cache = tempfile::tempdir().unwrap();
    let args = ["scan", "--from", "-300", "--to", "800"];
    let a = run(&args, Some(&data_dir()), Some(cache.path()));
    let b = run(&args, Some(&data_dir()), Some(cache.path()));
    let c = run(&args, Some(&data_dir()), None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn ingest_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let good = dir.path().join("good.wtrec");
    std::fs::write(&good, VALID).unwrap();
    let good = good.to_str().unwrap();

    let o = run(&["ingest", good], None, Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("stored") && text.ends_with("accepted 1, rejected 0\n"), "{text}");

    let o = run(&["ingest", good], None, Some(&cache));
    assert!(stdout(&o).contains("already cached"));

    let o = run(&["cache", "list"], None, Some(&cache));
    assert!(stdout(&o).contains("Q(sqrt(-14))[n=1]"));
    let o = run(&["cache", "clear"], None, Some(&cache));
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["cache", "list"], None, Some(&cache));
    assert!(stdout(&o).is_empty());
}

#[test]
fn ingest_rejects_non_commuting_actions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.wtrec");
    std::fs::write(&bad, NON_COMMUTING).unwrap();
    let o = run(&["ingest", bad.to_str().unwrap()], None, None);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("rejected") && text.contains("commut"), "{text}");
    assert!(text.ends_with("accepted 0, rejected 1\n"));
}

#[test]
fn ingest_missing_path_exits_2() {
    let o = run(&["ingest", "/nonexistent/record.wtrec"], None, None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cache_without_directory_exits_2() {
    let o = run(&["cache", "list"], None, None);
    assert_eq!(o.status.code(), Some(2));
}
