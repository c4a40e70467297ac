use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aerial-alloc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) {
    fs::write(dir.join("cfg.json"), r#"{"n_bs": 3, "n_carriers": 5, "n_ues": 6, "n_uavs": 6}"#).unwrap();
}

#[test]
fn outage_check_passes_on_simple_links() {
    let t = tempfile::tempdir().unwrap();
    fs::write(
        t.path().join("links.csv"),
        "kind,m,gamma_th,serving,interferers\nUE,1,0.1,5.0,0.3;0.2\nUAV,2,0.1,4:1,0.5:0.2\nUE,1,0.5,2.0,\n",
    )
    .unwrap();
    let o = run(t.path(), &["outage-check", "--input", "links.csv", "--draws", "100000", "--out", "o"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(t.path().join("o/outage_check.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("analytic,mc,stderr,abs_diff,pass"));
    assert_eq!(lines.clone().count(), 3);
    assert!(lines.all(|l| l.ends_with(",true")), "{csv}");
}

#[test]
fn malformed_link_row_is_reported() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("links.csv"), "kind,m,gamma_th,serving,interferers\nUAV,2,0.1,4.0,\n").unwrap();
    let o = run(t.path(), &["outage-check", "--input", "links.csv"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
}

#[test]
fn unknown_config_field_rejected() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("cfg.json"), r#"{"n_bss": 3}"#).unwrap();
    let o = run(t.path(), &["compare", "--config", "cfg.json", "--seeds", "0"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_bss"));
}

#[test]
fn compare_is_deterministic_and_dumps() {
    let t = tempfile::tempdir().unwrap();
    small_config(t.path());
    let args = ["compare", "--config", "cfg.json", "--sizes", "12", "--seeds", "4,2", "--dump-ops", "--dump-matching", "--dump-links"];
    let a = run(t.path(), &[&args[..], &["--out", "a"]].concat());
    let b = run(t.path(), &[&args[..], &["--out", "b"]].concat());
    assert!(a.status.success() && b.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    for f in ["compare.csv", "summary.csv", "seed_2/ops.csv", "seed_4/matching.csv", "seed_4/links.csv"] {
        let x = fs::read_to_string(t.path().join("a").join(f)).unwrap();
        assert_eq!(x, fs::read_to_string(t.path().join("b").join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(t.path().join("a/compare.csv")).unwrap();
    assert!(csv.starts_with("n_users,seed,method,mean_outage,max_outage,alg1_mean_S,coalition_sweeps\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    let ops = fs::read_to_string(t.path().join("a/seed_2/ops.csv")).unwrap();
    assert!(ops.starts_with("step,type,user_ids,from,to,sum_w_before,sum_w_after"));
    let m = fs::read_to_string(t.path().join("a/seed_4/matching.csv")).unwrap();
    assert_eq!(m.lines().count(), 13);
}

#[test]
fn brute_force_size_gate_is_printed() {
    let t = tempfile::tempdir().unwrap();
    fs::write(t.path().join("cfg.json"), r#"{"n_bs": 3, "n_carriers": 6, "n_ues": 8, "n_uavs": 8}"#).unwrap();
    let o = run(t.path(), &["brute-force", "--config", "cfg.json", "--seeds", "0", "--out", "o"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceed 100000000"));
    let f = fs::read_to_string(t.path().join("o/failures.csv")).unwrap();
    assert!(f.contains("size gate"));
}

#[test]
fn optimality_and_distribution_outputs() {
    let t = tempfile::tempdir().unwrap();
    let o = run(t.path(), &["optimality", "--seeds", "1,2", "--out", "opt"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(t.path().join("opt/optimality.csv")).unwrap();
    assert!(csv.starts_with("seed,game_mean,optimum_mean,ratio\n"));
    for l in csv.lines().skip(1) {
        let ratio: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
        assert!(ratio >= 1.0 - 1e-12);
    }
    small_config(t.path());
    let o = run(t.path(), &["carrier-distribution", "--config", "cfg.json", "--seeds", "0", "--out", "d"]);
    assert!(o.status.success());
    let d = fs::read_to_string(t.path().join("d/distribution.csv")).unwrap();
    assert!(d.starts_with("carrier_index,n_ue,n_uav\n"));
    let total: usize = d
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(1).map(|x| x.parse::<usize>().unwrap()).sum::<usize>())
        .sum();
    assert_eq!(total, 12);
    assert!(fs::read_to_string(t.path().join("d/digest.txt")).unwrap().contains("carrier index"));
}

#[test]
fn scenario_file_bypasses_generation() {
    let t = tempfile::tempdir().unwrap();
    let cfg = aerial_alloc::SimConfig { n_bs: 2, n_carriers: 3, n_ues: 2, n_uavs: 2, ..Default::default() };
    let (s, _) = aerial_alloc::scenario::generate_feasible(&cfg, 5, 1000).unwrap();
    aerial_alloc::scenario::save_scenario(&s, &t.path().join("s.json")).unwrap();
    let o = run(t.path(), &["gamma-sweep", "--scenario", "s.json", "--seeds", "0", "--grid", "0.1,1", "--out", "g"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let g = fs::read_to_string(t.path().join("g/gamma_sweep.csv")).unwrap();
    assert_eq!(g.lines().count(), 3);
    assert!(g.starts_with("gamma_th,seed,mean_outage_ue,mean_outage_uav\n"));
}
