use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mobicond::experiments::oracle::OracleOptions;
use mobicond::experiments::output::sha256_hex;
use mobicond::experiments::{cmd_oracle_check_with, ExperimentConfig, INVARIANTS};

fn mobicond(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mobicond"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn csv_lines(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    text.lines().map(str::to_string).collect()
}

fn assert_manifest_matches(dir: &Path) {
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_object().unwrap();
    assert!(!outputs.is_empty());
    for (name, sum) in outputs {
        assert_eq!(sum.as_str().unwrap(), sha256_hex(&fs::read(dir.join(name)).unwrap()), "{name}");
    }
    assert!(manifest["finished_at"].is_string());
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn spread_rows_and_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let args = [
        "spread", "--model", "fr", "--n", "256", "--r", "0.08", "--eps", "0.01", "--trials", "500", "--seed", "7",
        "--out", out,
    ];
    let first = mobicond(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let dir = tmp.path().join("spread-7");
    let lines = csv_lines(&dir.join("spread.csv"));
    assert_eq!(lines[0], "source,trial,completion,source_t_spr,t_spr");
    assert_eq!(lines.len() - 1, 500 * 5);
    assert_manifest_matches(&dir);
    let bytes = fs::read(dir.join("spread.csv")).unwrap();

    let again = mobicond(&[&args[..args.len() - 2], &["--threads", "1", "--out", out]].concat());
    assert!(again.status.success());
    assert_eq!(bytes, fs::read(dir.join("spread.csv")).unwrap());
}

#[test]
fn usage_errors_exit_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let missing_vmax = mobicond(&["spread", "--model", "vc", "--n", "100", "--r", "0.05", "--seed", "1", "--out", out]);
    assert_eq!(missing_vmax.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing_vmax.stderr).contains("--vmax"));

    let no_seed = mobicond(&["ring", "--out", out]);
    assert!(!no_seed.status.success());
    assert!(String::from_utf8_lossy(&no_seed.stderr).contains("--seed"));

    let too_big = mobicond(&[
        "conductance", "--model", "fr", "--n", "13", "--r", "0.1", "--cut", "brute-force", "--seed", "1", "--out", out,
    ]);
    assert_eq!(too_big.status.code(), Some(2));
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("ring.conf");
    fs::write(&file, "# ring sizes\nn-grid = 8,16\ntrials = 40\nseed = 5\n").unwrap();
    let out = tmp.path().join("runs");
    let res = mobicond(&[
        "ring",
        "--config",
        file.to_str().unwrap(),
        "--trials",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    let lines = csv_lines(&out.join("ring-5/ring.csv"));
    assert_eq!(lines[0], "n,epsilon,trials,t_spr,n_ln_n,normalized");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("8,0.01,20,"));
}

#[test]
fn conductance_emits_both_cut_rows_and_static_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let res = mobicond(&[
        "conductance", "--model", "fr", "--n", "10", "--r", "0.178", "--cut", "brute-force", "--samples", "300",
        "--seed", "2", "--out", out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let dir = tmp.path().join("conductance-2");
    let lines = csv_lines(&dir.join("conductance.csv"));
    assert_eq!(
        lines[0],
        "model,n,r,cut,cut_size,mean,stderr,samples,closed_form,closed_form_square,z,check,flag"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("fr,10,0.178,bisection,5,"));
    assert!(lines[2].starts_with("fr,10,0.178,brute-force-min,"));
    assert_manifest_matches(&dir);

    let res = mobicond(&[
        "conductance", "--model", "static", "--n", "200", "--r", "0.02", "--samples", "200", "--seed", "3", "--out", out,
    ]);
    assert!(res.status.success());
    let lines = csv_lines(&tmp.path().join("conductance-3/conductance.csv"));
    assert!(lines[1].ends_with(",NA,NA,NA,NA,expected-meeting-time may be infinite"));
}

#[test]
fn gap_sweep_schema_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let args = [
        "gap-sweep", "--n", "120", "--nr2-grid", "0.1,0.3,3", "--trials", "20", "--sources", "1", "--seed", "4",
        "--out", out,
    ];
    assert!(mobicond(&args).status.success());
    let dir = tmp.path().join("gap-sweep-4");
    let lines = csv_lines(&dir.join("gap.csv"));
    assert_eq!(lines[0], "n,r,nr2,t_spr,t_ref,gap");
    assert_eq!(lines.len(), 4);
    for (line, nr2) in lines[1..].iter().zip(["0.1", "0.3", "3"]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], nr2);
        let r: f64 = cols[1].parse().unwrap();
        assert!((120.0 * r * r - nr2.parse::<f64>().unwrap()).abs() < 1e-8);
        let gap: f64 = cols[5].parse().unwrap();
        assert!(gap > 0.0 && gap <= 1.5);
    }
    let svg = fs::read_to_string(dir.join("gap.svg")).unwrap();
    assert!(svg.contains("width=\"800\" height=\"600\""));
    assert!(svg.contains(">n r^2<") && svg.contains(">gap<"));
    assert_manifest_matches(&dir);
    let before = (fs::read(dir.join("gap.csv")).unwrap(), svg);
    assert!(mobicond(&args).status.success());
    assert_eq!(before.0, fs::read(dir.join("gap.csv")).unwrap());
    assert_eq!(before.1, fs::read_to_string(dir.join("gap.svg")).unwrap());
}

#[test]
fn tradeoff_analytic_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let res = mobicond(&["tradeoff", "--model", "vc", "--n", "1000", "--r", "0.001", "--seed", "1", "--out", out]);
    assert!(res.status.success());
    let lines = csv_lines(&tmp.path().join("tradeoff-1/tradeoff.csv"));
    assert_eq!(lines[1], "vc,1000,0.001,1,0.001,1,false,false,NA,NA");

    let mut values = Vec::new();
    for model in ["vc", "pr"] {
        let sub = tmp.path().join(model);
        let res = mobicond(&[
            "tradeoff", "--model", model, "--n", "500", "--r", "0.01", "--seed", "1", "--out", sub.to_str().unwrap(),
        ]);
        assert!(res.status.success());
        let lines = csv_lines(&sub.join("tradeoff-1/tradeoff.csv"));
        values.push(lines[1].split(',').nth(5).unwrap().to_string());
    }
    assert_eq!(values[0], values[1]);

    let fr = mobicond(&["tradeoff", "--model", "fr", "--n", "500", "--r", "0.01", "--seed", "1", "--out", out]);
    assert_eq!(fr.status.code(), Some(2));
}

#[test]
fn tradeoff_search_trace_brackets_the_target() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let res = mobicond(&[
        "tradeoff", "--model", "pr", "--n", "100", "--r", "0.05", "--search", "--trials", "60", "--budget", "8",
        "--seed", "3", "--out", out,
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stdout));
    let dir = tmp.path().join("tradeoff-3");
    let lines = csv_lines(&dir.join("tradeoff_search.csv"));
    assert_eq!(lines[0], "intensity,t_spr,target,meets_target");
    let rows: Vec<(f64, bool)> = lines[1..]
        .iter()
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            (c[0].parse().unwrap(), c[3] == "true")
        })
        .collect();
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
    assert!(rows.iter().any(|r| r.1) && rows.iter().any(|r| !r.1));
    let first_hit = rows.iter().position(|r| r.1).unwrap();
    assert!(rows[..first_hit].iter().all(|r| !r.1));
    assert_manifest_matches(&dir);
}

#[test]
fn ring_of_two_takes_one_slot() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let res = mobicond(&["ring", "--n-grid", "2", "--eps", "0.5", "--trials", "10", "--seed", "1", "--out", out]);
    assert!(res.status.success());
    let lines = csv_lines(&tmp.path().join("ring-1/ring.csv"));
    assert!(lines[1].starts_with("2,0.5,10,1,"));
}

fn wrong_exponent(n: usize, r: f64, s: usize) -> f64 {
    let p = std::f64::consts::PI * r * r;
    let (sf, nf) = (s as f64, n as f64);
    sf * (nf - sf) / (nf - 1.0) * (1.0 - (1.0 - p).powi(n as i32))
}

#[test]
fn oracle_check_catches_a_wrong_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.seed = Some(1);
    cfg.out = tmp.path().to_path_buf();
    let opts = OracleOptions {
        samples: 800,
        ..OracleOptions::default()
    };
    let good = cmd_oracle_check_with(&cfg, &opts).unwrap();
    let names: Vec<&str> = good.checks.iter().map(|c| c.name).collect();
    assert_eq!(names, INVARIANTS);
    assert!(good.all_passed(), "{:?}", good.checks);

    let bad = cmd_oracle_check_with(
        &cfg,
        &OracleOptions {
            cut_flow_formula: wrong_exponent,
            ..opts
        },
    )
    .unwrap();
    let failed: Vec<&str> = bad.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    assert!(failed.contains(&"simplification-identity"), "{failed:?}");
    let report = fs::read_to_string(bad.dir.join("oracle.csv")).unwrap();
    assert!(report.contains("simplification-identity,FAIL"));
}

#[test]
fn oracle_check_exit_status() {
    let tmp = tempfile::tempdir().unwrap();
    let res = mobicond(&["oracle-check", "--seed", "1", "--out", tmp.path().to_str().unwrap()]);
    let stdout = String::from_utf8_lossy(&res.stdout);
    for name in INVARIANTS {
        assert!(stdout.contains(name), "{name} missing");
    }
    assert!(res.status.success(), "{stdout}");
    assert_manifest_matches(&tmp.path().join("oracle-check-1"));
}
