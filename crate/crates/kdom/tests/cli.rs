//! End-to-end checks of the `kdom` binary: stream generation, replay with
//! stats output, sweeps with plot files, and config/env precedence.

use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kdom"))
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kdom-it-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_then_run_produces_stats_csv() {
    let dir = temp_dir("run");
    let stream = dir.join("stream.csv");
    let stats = dir.join("stats.csv");

    let out = bin()
        .args([
            "generate", "--items", "500", "--dim", "4", "--seed", "3", "--dist", "uniform",
        ])
        .arg("--out")
        .arg(&stream)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read_to_string(&stream).unwrap().lines().count(), 500);

    let out = bin()
        .args([
            "run", "--scheme", "ai", "--k", "3", "--dim", "4", "--window", "20",
        ])
        .arg("--input")
        .arg(&stream)
        .arg("--out")
        .arg(&stats)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&stats).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("event_id,scheme,window_size,compared,pruned,wall_nanos")
    );
    assert_eq!(lines.count(), 500);

    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_writes_table_and_plot_files() {
    let dir = temp_dir("sweep");
    let out_dir = dir.join("results");
    let out = bin()
        .args([
            "sweep",
            "--scheme",
            "naive,mi,ai",
            "--k",
            "2,3",
            "--dim",
            "4",
            "--window",
            "10",
            "--items",
            "200",
            "--reps",
            "1",
            "--seed",
            "5",
        ])
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let table = fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("scheme,k,d,window,m,distribution,reps,mean_wall_ms,mean_compared,prune_ratio")
    );
    assert_eq!(lines.count(), 6);
    for name in [
        "plot_k_compared.csv",
        "plot_k_wall.csv",
        "plot_window_compared.csv",
        "plot_window_wall.csv",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }

    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn env_overrides_flags_which_override_config() {
    let dir = temp_dir("prec");
    let cfg = dir.join("kdom.conf");
    fs::write(
        &cfg,
        "items=50\ndim=4\nk=2\nwindow=10\nscheme=naive\nseed=1\n",
    )
    .unwrap();

    // Flag bumps items over the config value; env bumps it again.
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["generate", "--items", "60"])
        .env("KDOM_ITEMS", "70")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().count(), 70);

    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_exit_nonzero_with_one_line_diagnostic() {
    let out = bin()
        .args([
            "run", "--scheme", "bogus", "--items", "10", "--dim", "4", "--k", "2",
        ])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(
        stderr.trim().lines().count(),
        1,
        "diagnostic should be one line: {stderr}"
    );
    assert!(stderr.starts_with("error:"));
}

#[test]
fn run_reads_stream_from_generated_file_deterministically() {
    let dir = temp_dir("det");
    let stats_a = dir.join("a.csv");
    let stats_b = dir.join("b.csv");
    for out_path in [&stats_a, &stats_b] {
        let out = bin()
            .args([
                "run", "--scheme", "mi", "--k", "11", "--dim", "12", "--window", "50", "--items",
                "300", "--seed", "8",
            ])
            .arg("--out")
            .arg(out_path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let strip_wall = |text: String| -> Vec<String> {
        text.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect()
    };
    assert_eq!(
        strip_wall(fs::read_to_string(&stats_a).unwrap()),
        strip_wall(fs::read_to_string(&stats_b).unwrap())
    );
    fs::remove_dir_all(&dir).unwrap();
}
