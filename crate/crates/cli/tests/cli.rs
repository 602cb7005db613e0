use std::path::Path;
use std::process::{Command, Output};

fn heatvqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatvqe")).args(args).env_remove("HEATVQE_CAP_QUBITS").output().unwrap()
}

fn out_arg(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ata_writes_csv_and_summarizes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_arg(dir.path(), "ata.csv");
    let o = heatvqe(&["ata", "--n", "2..4", "--c", "0.5,2", "--samples", "2", "--seed", "5", "--out", &csv]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("wrote 12 rows"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("n,c,depth,fidelity,loss,measurements,censored,seed\n"));
    assert_eq!(text.lines().count(), 13);

    let s = heatvqe(&["summarize", &csv]);
    assert!(s.status.success());
    let out = stdout(&s);
    assert!(out.contains("c=0.5:") && out.contains("c=2:"), "{out}");
    assert!(out.contains("log-log slope"));
}

#[test]
fn identical_seeds_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = out_arg(dir.path(), "a.csv");
    let b = out_arg(dir.path(), "b.csv");
    for (path, workers) in [(&a, "1"), (&b, "4")] {
        let o = heatvqe(&["ata-noise", "--n", "2", "--c", "1", "--samples", "3", "--p", "0,0.5,1", "--workers", workers, "--out", path]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn direct_reports_minima() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_arg(dir.path(), "land.csv");
    let o = heatvqe(&["direct", "--grid", "12", "--out", &csv]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).matches("minimum at").count(), 2);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 145);
}

#[test]
fn hadamard_and_named_campaigns_run() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_arg(dir.path(), "layers.csv");
    let o = heatvqe(&["hadamard", "--n", "2", "--c", "2", "--samples", "2", "--ansatz", "cba", "--layer-cap", "4", "--out", &csv]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("ansatz,n,c,M_star,mean_fidelity,censored\ncba,2,2,"));

    let csv = out_arg(dir.path(), "eb.csv");
    let o = heatvqe(&["campaign", "errorbound", "--n-tau", "4", "--out", &csv]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 17);
}

#[test]
fn invalid_arguments_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_arg(dir.path(), "x.csv");
    let cases: [&[&str]; 5] = [
        &["ata", "--n", "1", "--c", "1", "--out", &csv],
        &["ata", "--n", "2", "--c", "-1", "--out", &csv],
        &["ata-noise", "--n", "2", "--c", "1", "--p", "0,2", "--out", &csv],
        &["campaign", "fig99", "--out", &csv],
        &["ata", "--mode", "shots", "--shots", "0", "--n", "2", "--c", "1", "--out", &csv],
    ];
    for args in cases {
        let o = heatvqe(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
    assert!(!Path::new(&csv).exists());
}

#[test]
fn qubit_cap_exits_with_three_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_arg(dir.path(), "capped.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_heatvqe"))
        .args(["ata", "--n", "2..5", "--c", "1", "--samples", "1", "--out", &csv])
        .env("HEATVQE_CAP_QUBITS", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    assert!(!Path::new(&csv).exists());
}
