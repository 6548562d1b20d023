use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/pressroom")
}

fn prmetrics(work: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prmetrics"))
        .arg("--fixtures")
        .arg(fixtures())
        .arg("--corpus-dir")
        .arg(work.join("corpus"))
        .arg("--report-dir")
        .arg(work.join("reports"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn all_stages_run_over_the_recorded_site() {
    let work = tempfile::tempdir().unwrap();
    let out = prmetrics(work.path(), &["all"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for stage in [
        "crawl:",
        "parse:",
        "ingest-tweets:",
        "ingest-links:",
        "couple:",
        "analyze:",
        "report:",
    ] {
        assert!(
            stdout.lines().any(|l| l.starts_with(stage)),
            "no {stage} line in {stdout}"
        );
    }
    assert!(stdout.contains("releases=45"), "{stdout}");
    assert!(work.path().join("reports/summary.md").is_file());
}

#[test]
fn out_of_order_stage_fails_with_guidance() {
    let work = tempfile::tempdir().unwrap();
    let out = prmetrics(work.path(), &["analyze"]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("stage `analyze` failed"), "{stderr}");
    assert!(stderr.contains("run `parse` first"), "{stderr}");
}

#[test]
fn flags_override_the_config_file() {
    let work = tempfile::tempdir().unwrap();
    let out = prmetrics(work.path(), &["--rate-limit=-1", "crawl"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("rate"), "{:?}", out);

    let out = prmetrics(work.path(), &["--granularity", "daily", "crawl"]);
    assert!(out.status.success());
    let out = prmetrics(work.path(), &["--granularity", "daily", "parse"]);
    assert!(out.status.success());
    let out = prmetrics(work.path(), &["--granularity", "daily", "analyze"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(work.path().join("reports/daily_output.csv").is_file());
}
