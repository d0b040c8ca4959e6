use std::process::{Command, Output};

fn learndim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_learndim")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    learndim(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["growth", "--construction", "online", "--alpha", "1/0", "--s", "1", "--epsilon", "1/20"]), 2);
    assert_eq!(code(&["verify", "no-such-suite"]), 2);
    assert_eq!(code(&["scan", "--class", "density", "--alpha", "1/4", "--grid", ""]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(
        code(&["growth", "--construction", "online", "--alpha", "1/4", "--s", "233/256", "--epsilon", "1/20", "--nmax", "13"]),
        3
    );
    assert_eq!(code(&["census", "--class", "density", "--alpha", "1/4", "--n", "5"]), 3);
    assert_eq!(code(&["verify", "good-set-bounds"]), 0);
}

#[test]
fn growth_csv_and_json_agree() {
    let base = ["growth", "--construction", "padded", "--class", "padded", "--alpha", "1/2", "--s", "3/5", "--nmax", "6"];
    let csv = learndim(&base);
    assert!(csv.status.success());
    let csv = String::from_utf8(csv.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,prefix_len,log2_capital,theoretical_bound,slope"));
    assert_eq!(lines.count(), 7);
    let json = learndim(&[&base[..], &["--format", "json"]].concat());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
    assert_eq!(v["rows"][6]["prefix_len"], 127);
    assert_eq!(v["promised"], true);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out.csv");
    std::fs::write(
        &cfg,
        "construction = \"online\"\nclass = \"density\"\nalpha = \"1/4\"\ns = \"233/256\"\nepsilon = \"1/20\"\nseed = 5\nnmax = 6\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = out.to_str().unwrap();
    assert!(learndim(&["growth", "--config", c, "--out", o]).status.success());
    let first = std::fs::read(&out).unwrap();
    assert_eq!(String::from_utf8_lossy(&first).lines().count(), 8);
    assert!(learndim(&["growth", "--config", c, "--nmax", "4", "--out", o]).status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 6);
    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(code(&["growth", "--config", c]), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["scan", "--class", "density", "--alpha", "1/4", "--nmax", "8", "--seed", "3", "--samples", "2", "--grid-step", "1/10"];
    let a = learndim(&args);
    let b = learndim(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn diagonalize_and_census() {
    let d = learndim(&["diagonalize", "--alpha", "1/2", "--s", "2/5", "--nmax", "10"]);
    assert!(d.status.success());
    let text = String::from_utf8(d.stdout).unwrap();
    assert!(text.starts_with("n,prefix_len,log2_capital,running_max\n"));
    let c = learndim(&["census", "--class", "padded", "--alpha", "1/4", "--census-mode", "mq", "--n", "3"]);
    assert_eq!(String::from_utf8(c.stdout).unwrap().lines().count(), 5);
}
