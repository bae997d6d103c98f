use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tiltstream");
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

fn tiltstream(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(FIXTURES).join(name).to_string_lossy().into_owned()
}

const PROTOCOL: &[&str] = &[
    "run", "--sigma", "0.004", "--epsilon", "0.001", "--window-ms", "5000", "--shake-n", "10",
    "--fading-support", "2", "--synthetic", "--rate", "200", "--max-batches", "30", "--clock",
    "simulated", "--seed", "7",
];

#[test]
fn protocol_run_writes_thirty_rows() {
    let o = tiltstream(PROTOCOL);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "batch,runtime_ms,tree_bytes,node_count,new_nodes,dropped_nodes,offline_ms"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 30);
    for (i, row) in rows.iter().enumerate() {
        let batch = i + 1;
        assert_eq!(row[0], batch.to_string());
        if batch % 10 != 0 {
            assert_eq!(row[5], "0", "drop outside a shake batch at {batch}");
        }
    }
    let summary = String::from_utf8_lossy(&o.stderr);
    assert!(summary.contains("batches=30"));
    assert!(summary.contains("peak_bytes="));
}

#[test]
fn simulated_runs_are_byte_identical() {
    let a = tiltstream(PROTOCOL);
    let b = tiltstream(PROTOCOL);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.csv");
    let mut args = PROTOCOL.to_vec();
    let out_str = out.to_string_lossy().into_owned();
    args.extend(["--out", &out_str]);
    let o = tiltstream(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 31);
}

#[test]
fn replay_dump_matches_fixture() {
    let patterns = fixture("golden_patterns.txt");
    let base = ["run", "--replay-patterns", &patterns, "--shake-n", "3", "--fading-support", "2", "--dump-tree"];
    let o = tiltstream(&base);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("golden_shaken_log.txt")).unwrap());

    let mut flat = base.to_vec();
    flat.push("--flat-windows");
    let o = tiltstream(&flat);
    assert_eq!(stdout(&o), std::fs::read_to_string(fixture("golden_shaken_flat.txt")).unwrap());
}

#[test]
fn zero_batches_gives_header_only() {
    let o = tiltstream(&["run", "--synthetic", "--max-batches", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(tiltstream(&["run", "--synthetic", "--sigma", "abc"]).status.code(), Some(1));
    assert_eq!(tiltstream(&["run"]).status.code(), Some(1));
    assert_eq!(tiltstream(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        tiltstream(&["run", "--synthetic", "--max-batches", "1", "--sigma", "0.001", "--epsilon", "0.01"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(tiltstream(&["--help"]).status.code(), Some(0));
}

#[test]
fn unreadable_input_exits_two() {
    let o = tiltstream(&["run", "--input", "/nonexistent/stream.txt"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/stream.txt"));
}

#[test]
fn input_file_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tx.txt");
    std::fs::write(&path, "a b x a c x b c\na b c\n").unwrap();
    let p = path.to_string_lossy().into_owned();
    let o = tiltstream(&["run", "--input", &p, "--batch-size", "2", "--sigma", "0.5", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn generate_then_replay() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.txt");
    let p = path.to_string_lossy().into_owned();
    let o = tiltstream(&["generate", "--count", "100", "--seed", "3", "--out", &p]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 100);
    assert!(text.lines().all(|l| l.ends_with(" x")));
    let o = tiltstream(&["run", "--input", &p, "--batch-size", "25"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 5);
}

#[test]
fn sweep_has_sigma_column_and_monotone_bytes() {
    let o = tiltstream(&[
        "sweep", "--sigmas", "0.002,0.004,0.006,0.008", "--synthetic", "--max-batches", "12",
        "--shake-n", "10",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("sigma,batch,"));
    let rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 48);
    for batch in 0..12 {
        let bytes: Vec<u64> = (0..4).map(|s| rows[s * 12 + batch][3].parse().unwrap()).collect();
        assert!(bytes.windows(2).all(|w| w[0] >= w[1]), "batch {batch}: {bytes:?}");
    }
}

#[test]
fn single_sigma_sweep_equals_run() {
    let run = tiltstream(&["run", "--sigma", "0.004", "--synthetic", "--max-batches", "5"]);
    let sweep = tiltstream(&["sweep", "--sigmas", "0.004", "--synthetic", "--max-batches", "5"]);
    let run_rows: Vec<String> = stdout(&run).lines().skip(1).map(str::to_string).collect();
    let sweep_rows: Vec<String> = stdout(&sweep)
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.to_string())
        .collect();
    assert_eq!(run_rows, sweep_rows);
}

#[test]
fn empty_sigma_list_is_rejected() {
    assert_ne!(tiltstream(&["sweep", "--sigmas", "", "--synthetic", "--max-batches", "1"]).status.code(), Some(0));
}

#[test]
fn oracle_verdicts() {
    let o = tiltstream(&["oracle", "--seed", "1", "--rounds", "200", "--items", "8", "--transactions", "30"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "PASS 200 rounds");

    let o = tiltstream(&["oracle", "--rounds", "0"]);
    assert_eq!(o.status.code(), Some(0));

    let o = tiltstream(&["oracle", "--rounds", "5", "--corrupt-miner"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("FAIL round 0"));
    assert!(stdout(&o).contains(" x\n"));

    let o = tiltstream(&["oracle", "--items", "13"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tilt.conf");
    std::fs::write(&cfg, "sigma = 0.5\nepsilon = 0.5\nshake_n = 2\n").unwrap();
    let c = cfg.to_string_lossy().into_owned();
    let patterns = fixture("golden_patterns.txt");
    let o = tiltstream(&["run", "--config", &c, "--replay-patterns", &patterns]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // threshold ceil(0.5 * 4) = 2 keeps only A and AC from batch 1
    let first: Vec<String> = stdout(&o).lines().nth(1).unwrap().split(',').map(str::to_string).collect();
    assert_eq!(first[2..5], ["120", "2", "2"]);

    std::fs::write(&cfg, "sigma = nope\n").unwrap();
    assert_eq!(tiltstream(&["run", "--config", &c, "--replay-patterns", &patterns]).status.code(), Some(1));
}
