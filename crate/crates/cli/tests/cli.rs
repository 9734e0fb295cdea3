use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sweepplan"))
}

fn small_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    fs::write(
        &path,
        r#"
[map]
width_m = 400.0
height_m = 400.0
cell_size = 20.0

[sensor]
alpha = 100.0
beta = 250.0
pitch_deg = 40.0
fov_h_deg = 20.0
fov_v_deg = 20.0

[global_planner]
budget = 500.0
sample_count = 80
min_turn_spacing = 100.0

[sweep_planner]
t_future = 1.0

[experiment]
runs = 3
seed = 5
"#,
    )
    .unwrap();
    path
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn tree(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn batch_output_tree_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    for name in ["a", "b"] {
        ok(bin()
            .args(["batch", "--config"])
            .arg(&cfg)
            .args(["--strategies", "adaptive,predefined_sweep,no_sweep", "--out"])
            .arg(tmp.path().join(name))
            .output()
            .unwrap());
    }
    let (a, b) = (tree(&tmp.path().join("a")), tree(&tmp.path().join("b")));
    assert!(a.len() >= 5 + 3 * 3 + 3 + 3, "{} files", a.len());
    assert_eq!(a, b);
}

#[test]
fn aggregate_matches_per_run_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("o");
    ok(bin()
        .args(["batch", "--runs", "4", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    let agg = fs::read_to_string(out.join("aggregate.csv")).unwrap();
    for line in agg.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let finals: Vec<f64> = runs
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|r| r[2] == f[0])
            .map(|r| r[3].parse().unwrap())
            .collect();
        assert_eq!(finals.len(), 4);
        let mean = finals.iter().sum::<f64>() / 4.0;
        let reported: f64 = f[2].parse().unwrap();
        assert!((mean - reported).abs() < 1e-9, "{}: {mean} vs {reported}", f[0]);
    }
}

#[test]
fn emitted_scenario_replays_byte_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let out = tmp.path().join("o");
    ok(bin()
        .args(["batch", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let scen = fs::read_dir(out.join("scenarios"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().contains("scenario_0001_"))
        .unwrap();
    let seed = scen
        .file_stem()
        .unwrap()
        .to_string_lossy()
        .rsplit('_')
        .next()
        .unwrap()
        .to_string();
    let replay = tmp.path().join("replay");
    let plan = out.join(format!("plans/plan_0001_seed_{seed}.txt"));
    ok(bin()
        .args(["run", "--strategies", "adaptive", "--config"])
        .arg(&scen)
        .arg("--plan")
        .arg(&plan)
        .arg("--out")
        .arg(&replay)
        .output()
        .unwrap());
    let original = fs::read(out.join(format!("runs/run_0001_seed_{seed}_adaptive.csv"))).unwrap();
    let again = fs::read(replay.join(format!("run_0000_seed_{seed}_adaptive.csv"))).unwrap();
    assert_eq!(original, again);
}

#[test]
fn plan_and_gen_verbs() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path());
    let text = ok(bin().args(["plan", "--seed", "3", "--config"]).arg(&cfg).output().unwrap());
    assert!(text.starts_with("# x y z psi\ncost "));

    let gen = tmp.path().join("gen");
    ok(bin()
        .args(["gen", "--runs", "5", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&gen)
        .output()
        .unwrap());
    assert_eq!(fs::read_dir(&gen).unwrap().count(), 5);
}

#[test]
fn bad_inputs_fail_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "[sim]\nspeed = 0.0\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sim.speed"));

    let out = bin().args(["run", "--strategies", "sideways"]).output().unwrap();
    assert!(!out.status.success());

    let out = bin().args(["batch", "--runs", "0"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn shipped_configs_plan() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in ["example.toml", "acceptance.toml"] {
        let out = bin().args(["plan", "--config"]).arg(root.join(name)).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
}
