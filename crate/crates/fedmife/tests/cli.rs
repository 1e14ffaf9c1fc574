use std::process::{Command, Output};

use fedmife::bench::{run_bench, BenchSpec, DEFAULT_RAM_BUDGET};
use fedmife::formats::{read_csv, read_transcript, BenchRecord, Phase, SweepRow};
use fedmife_core::ipfe::SchemeId;
use fedmife_core::params::PresetId;

fn fedmife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedmife")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn toy_bench(chunks: usize) -> BenchSpec {
    BenchSpec {
        scheme: SchemeId::DdhSelective,
        preset: PresetId::Toy,
        clients: 3,
        params: 100,
        chunks,
        seed: 4,
        ram_budget: DEFAULT_RAM_BUDGET,
    }
}

#[test]
fn bench_writes_one_record_per_phase() {
    let text = stdout(&fedmife(&[
        "bench",
        "--scheme",
        "ddh-selective",
        "--preset",
        "toy",
        "--clients",
        "3",
        "--params",
        "100",
    ]));
    let rows: Vec<BenchRecord> = read_csv(&text).unwrap();
    let phases: Vec<Phase> = rows.iter().map(|r| r.phase).collect();
    assert_eq!(phases, [Phase::Train, Phase::Encrypt, Phase::Aggregate]);
    assert!(rows.iter().all(|r| r.n == 3 && r.l == 100 && r.seconds >= 0.0));
}

#[test]
fn chunking_does_not_change_results() {
    let one = run_bench(&toy_bench(1)).unwrap();
    let many = run_bench(&toy_bench(15)).unwrap();
    assert_eq!(one.ciphertext_digest, many.ciphertext_digest);
    assert_eq!(one.sums, many.sums);
}

#[test]
fn bench_csv_is_deterministic_apart_from_timings() {
    let strip = |mut rows: Vec<BenchRecord>| {
        rows.iter_mut().for_each(|r| r.seconds = 0.0);
        rows
    };
    let a = strip(run_bench(&toy_bench(3)).unwrap().records);
    let b = strip(run_bench(&toy_bench(3)).unwrap().records);
    assert_eq!(a, b);
}

#[test]
fn train_transcript_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let out = fedmife(&[
        "train",
        "--scheme",
        "lwe-selective",
        "--params",
        "20",
        "--out",
        path.to_str().unwrap(),
    ]);
    stdout(&out);
    let lines = read_transcript(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!lines.is_empty());
    assert_eq!(lines.last().unwrap().decision, "stop");
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l.round, k as u64 + 1);
        assert_eq!(l.clients, [1, 2, 3]);
        assert!(l.bytes.contains_key("server") && l.bytes.contains_key("client-1"));
    }
}

#[test]
fn scenario_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "scheme = \"lwe-adaptive\"\nparams = 10\ndelta = 3\n").unwrap();
    let text = stdout(&fedmife(&[
        "sweep",
        "--scenario",
        path.to_str().unwrap(),
        "--delta",
        "2",
    ]));
    let rows: Vec<SweepRow> = read_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].delta, 2);
    assert!(rows[0].converged);
}

#[test]
fn sweep_rejects_zero_delta() {
    let out = fedmife(&["sweep", "--scheme", "lwe-selective", "--params", "10", "--delta", "0-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scenario_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "sheme = \"lwe-adaptive\"\n").unwrap();
    assert_eq!(
        fedmife(&["train", "--scenario", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn correctness_with_no_trials_succeeds() {
    let text = stdout(&fedmife(&["correctness", "--scheme", "all", "--trials", "0"]));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn ram_guard_refuses_full_scale_adaptive_lwe() {
    let out = fedmife(&[
        "bench",
        "--scheme",
        "lwe-adaptive",
        "--preset",
        "table1",
        "--clients",
        "13",
        "--params",
        "4641",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--ram-budget"), "{err}");
}
