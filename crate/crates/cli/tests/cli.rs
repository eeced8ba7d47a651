use std::path::Path;
use std::process::{Command, Output};

fn mhpga(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhpga")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn keygen_encrypt_decrypt_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&mhpga(&["keygen", "--n", "32", "--seed", "5", "--out", d])), 0);
    let key = dir.path().join("key.json");
    assert_eq!(json(&key)["n"], 32);

    let input = dir.path().join("msg.txt");
    std::fs::write(&input, "attack at dawn").unwrap();
    let enc = mhpga(&["encrypt", "--key", key.to_str().unwrap(), "--input", input.to_str().unwrap(), "--out", d]);
    assert_eq!(code(&enc), 0);
    let ct = dir.path().join("ciphertext.json");
    assert_eq!(json(&ct)["k"], 4);

    let dec = mhpga(&["decrypt", "--key", key.to_str().unwrap(), "--ciphertext", ct.to_str().unwrap()]);
    assert_eq!(code(&dec), 0);
    assert_eq!(dec.stdout, b"attack at dawn");
}

#[test]
fn attacks_recover_a_generated_instance() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let pga = mhpga(&[
        "attack-pga",
        "--n",
        "16",
        "--blocks",
        "2",
        "--seed",
        "3",
        "--pop-size",
        "40",
        "--sequential",
        "--out",
        d,
    ]);
    assert_eq!(code(&pga), 0, "{}", String::from_utf8_lossy(&pga.stderr));
    let report = json(&dir.path().join("attack_pga.json"));
    assert_eq!(report["resemblance"], 1.0);
    assert_eq!(report["config"]["ga"]["pop_size"], 40);

    let lll = mhpga(&["attack-lll", "--n", "24", "--seed", "3", "--delta", "99/100", "--out", d]);
    assert_eq!(code(&lll), 0);
    let report = json(&dir.path().join("attack_lll.json"));
    assert_eq!(report["solved"], true);
    assert_eq!(report["reduction"]["lovasz_delta"], "99/100");
}

#[test]
fn attacking_files_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    mhpga(&["keygen", "--n", "16", "--seed", "9", "--out", d]);
    let key = dir.path().join("key.json");
    mhpga(&["encrypt", "--key", key.to_str().unwrap(), "--message", "ok", "--out", d]);
    let ct = dir.path().join("ciphertext.json");
    let truth = dir.path().join("truth.bin");
    std::fs::write(&truth, "ok").unwrap();
    let out = mhpga(&[
        "attack-pga",
        "--key",
        key.to_str().unwrap(),
        "--ciphertext",
        ct.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--sequential",
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["resemblance"], 1.0);
    assert_eq!(report["k"], 1);
}

#[test]
fn exit_codes() {
    let exhausted = mhpga(&["attack-pga", "--n", "48", "--generations", "3", "--seed", "1"]);
    assert_eq!(code(&exhausted), 1);
    assert_eq!(code(&mhpga(&["attack-pga", "--pop-size", "0"])), 2);
    assert_eq!(code(&mhpga(&["no-such-command"])), 2);
    assert_eq!(code(&mhpga(&["keygen", "--format", "xml"])), 2);
    assert_eq!(code(&mhpga(&["decrypt", "--key", "/nonexistent/key.json", "--ciphertext", "x.json"])), 3);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.ini");
    std::fs::write(&config, "[ga]\npop_size = 40\np_m = 0.1\n\n[attack]\nmigration_period = 7\n").unwrap();
    let out =
        mhpga(&["attack-pga", "--config", config.to_str().unwrap(), "--pop-size", "30", "--n", "16", "--sequential"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["ga"]["pop_size"], 30);
    assert_eq!(report["config"]["ga"]["p_m"], 0.1);
    assert_eq!(report["config"]["migration_period"], 7);

    std::fs::write(&config, "[ga]\nno_such_key = 1\n").unwrap();
    assert_eq!(code(&mhpga(&["keygen", "--config", config.to_str().unwrap()])), 2);
}

#[test]
fn sequential_bench_runs_repeat_byte_for_byte() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = mhpga(&[
            "bench-table1",
            "--n",
            "16",
            "--blocks",
            "1,2",
            "--trials",
            "2",
            "--pop-size",
            "30",
            "--sequential",
            "--seed",
            "4",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        ["table1.csv", "table1_raw.csv", "table1_failures.csv"].map(|f| std::fs::read(dir.path().join(f)).unwrap())
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let table = String::from_utf8(a[0].clone()).unwrap();
    assert!(table.starts_with("n,k,setting,trials,successes,time_min,"));
    assert_eq!(table.lines().count(), 3);
}

#[test]
fn sensitivity_probe_reports_witnesses() {
    let out = mhpga(&["sensitivity-probe", "--seed", "2", "--samples", "300"]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["samples"], 900);
    assert_eq!(report["holds"], true);
    assert_eq!(code(&mhpga(&["sensitivity-probe", "--blocks", "1"])), 2);
}
