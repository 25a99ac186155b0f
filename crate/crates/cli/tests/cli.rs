use std::path::Path;
use std::process::{Command, Output};

fn ptrgeo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptrgeo"))
        .current_dir(dir)
        .env("PTRGEO_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ptrgeo(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails(dir: &Path, args: &[&str]) -> String {
    let out = ptrgeo(dir, args);
    assert!(!out.status.success(), "{args:?} should fail");
    String::from_utf8(out.stderr).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn generate_is_reproducible_and_checksummed() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["generate", "--task", "tsp", "--n", "6", "--count", "50", "--seed", "3", "-o", "a.txt"]);
    ok(p, &["generate", "--task", "tsp", "--n", "6", "--count", "50", "--seed", "3", "-o", "b.txt"]);
    assert_eq!(read(p, "a.txt"), read(p, "b.txt"));
    assert_eq!(read(p, "a.txt").lines().count(), 50);
    let manifest = read(p, "a.txt.manifest");
    use sha2::Digest;
    let digest: String = sha2::Sha256::digest(read(p, "a.txt").as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    assert!(manifest.contains(&format!("sha256={digest}")), "{manifest}");
    assert!(manifest.contains("task=tsp"));

    let err = fails(p, &["generate", "--task", "tsp", "--n", "6", "--count", "5", "-o", "a.txt"]);
    assert!(err.contains("--force"), "{err}");
    ok(p, &["generate", "--task", "hull", "--n-min", "5", "--n-max", "9", "--count", "20", "-o", "mixed.txt"]);
}

#[test]
fn infeasible_optimal_request_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let err = fails(d.path(), &["generate", "--task", "tsp", "--n", "25", "--count", "2", "-o", "x.txt"]);
    assert!(err.starts_with("error:"), "{err}");
    assert!(!d.path().join("x.txt").exists());
    ok(d.path(), &["generate", "--task", "tsp", "--n", "25", "--count", "2", "--solver", "a3", "-o", "x.txt"]);
}

#[test]
fn train_refuses_collisions_and_resume_matches() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["generate", "--task", "hull", "--n", "5", "--count", "40", "--seed", "1", "-o", "d.txt"]);
    let base = ["train", "--data", "d.txt", "--hidden", "8", "--batch", "16", "--checkpoint-every", "3"];
    let full = [&base[..], &["--steps", "8", "-o", "full.ckpt", "--loss-log", "full.log"]].concat();
    ok(p, &full);
    let err = fails(p, &full);
    assert!(err.contains("--force"), "{err}");

    ok(p, &[&base[..], &["--steps", "5", "-o", "part.ckpt", "--loss-log", "part.log"]].concat());
    ok(p, &[&base[..], &["--steps", "8", "-o", "part.ckpt", "--loss-log", "part.log", "--resume"]].concat());
    assert_eq!(read(p, "full.log"), read(p, "part.log"));
    assert_eq!(std::fs::read(p.join("full.ckpt")).unwrap(), std::fs::read(p.join("part.ckpt")).unwrap());
    assert_eq!(read(p, "full.log").lines().count(), 8);

    let err = fails(p, &[&base[..], &["--steps", "9", "-o", "full.ckpt", "--resume", "--seed", "5"]].concat());
    assert!(err.contains("seed"), "{err}");
}

#[test]
fn fixed_dictionary_training_needs_one_length() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["generate", "--task", "hull", "--n-min", "5", "--n-max", "8", "--count", "30", "-o", "mixed.txt"]);
    let err =
        fails(p, &["train", "--arch", "lstm", "--data", "mixed.txt", "--hidden", "4", "--steps", "1", "-o", "m.ckpt"]);
    assert!(err.contains("n="), "{err}");
    ok(p, &["train", "--data", "mixed.txt", "--hidden", "4", "--steps", "1", "-o", "m.ckpt"]);
}

#[test]
fn eval_checks_tasks_and_plot_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    ok(p, &["generate", "--task", "hull", "--n", "5", "--count", "20", "-o", "h.txt"]);
    ok(p, &["generate", "--task", "tsp", "--n", "5", "--count", "20", "-o", "t.txt"]);
    ok(p, &["train", "--data", "h.txt", "--hidden", "8", "--steps", "2", "-o", "h.ckpt"]);
    let err = fails(p, &["eval", "--data", "t.txt", "--checkpoint", "h.ckpt"]);
    assert!(err.contains("trained on"), "{err}");
    let err = fails(p, &["eval", "--data", "h.txt", "--task", "tsp", "--solver", "a1"]);
    assert!(err.contains("manifest"), "{err}");

    let eval = ["eval", "--data", "h.txt", "--checkpoint", "h.ckpt", "--beam", "2", "--per-example"];
    let a = ok(p, &[&eval[..], &["e1.tsv", "-o", "r1.txt"]].concat());
    let b = ok(p, &[&eval[..], &["e2.tsv", "-o", "r2.txt"]].concat());
    assert_eq!(a, b);
    assert_eq!(read(p, "r1.txt"), a);
    assert_eq!(read(p, "e1.tsv"), read(p, "e2.tsv"));
    assert_eq!(read(p, "e1.tsv").lines().count(), 21);

    let opt = ok(p, &["eval", "--data", "h.txt", "--solver", "optimal"]);
    assert!(opt.contains("accuracy_pct=100.0000"), "{opt}");

    ok(p, &["plot", "--data", "h.txt", "--index", "3", "--detail", "e1.tsv", "-o", "a.svg"]);
    ok(p, &["plot", "--data", "h.txt", "--index", "3", "--detail", "e1.tsv", "-o", "b.svg"]);
    assert_eq!(read(p, "a.svg"), read(p, "b.svg"));
    assert!(read(p, "a.svg").contains("stroke-dasharray"));
    fails(p, &["plot", "--data", "h.txt", "--index", "99", "-o", "c.svg"]);
}
