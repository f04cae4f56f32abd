use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsity-lab")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn generate_forms() {
    let v = json(&lab(&["generate", "--spec", "R(0,1;1,1)", "--count", "7"]));
    assert_eq!(v, serde_json::json!([1, 2, 3, 5, 8, 13, 21]));
    let o = lab(&["generate", "--spec", "power_tower:2", "--count", "5", "--format", "text"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "1\n2\n4\n8\n16\n");
    let v = json(&lab(&["generate", "--spec", "floor_geometric:1;2", "--count", "4"]));
    assert_eq!(v, serde_json::json!([1, 2, 4, 8]));
}

#[test]
fn file_input() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("seq.txt");
    std::fs::write(&p, "3\n1\n2\n2\n").unwrap();
    let v = json(&lab(&["generate", "--file", p.to_str().unwrap(), "--count", "10"]));
    assert_eq!(v, serde_json::json!([1, 2, 3]));
    std::fs::write(&p, "x\n").unwrap();
    let o = lab(&["generate", "--file", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn sumset_and_coset() {
    let v = json(&lab(&["sumset", "--spec", "squares", "--bound", "1000", "--sigma", "4", "--coset", "--one-sided"]));
    assert_eq!(v["positive_count"], 1000);
    assert_eq!(v["coset_search"]["witness"]["modulus"], 1);
    let v = json(&lab(&[
        "sumset",
        "--spec",
        "two_pow_plus_n",
        "--bound",
        "100",
        "--sigma",
        "3",
        "--signed",
        "--index-bound",
        "110",
        "--coset",
        "--max-modulus",
        "5",
        "--margin",
        "5",
    ]));
    assert_eq!(v["count"], 201);
    assert_eq!(v["coset_search"]["witness"]["modulus"], 1);
}

#[test]
fn density_aps_geometry() {
    let v = json(&lab(&["density", "--spec", "squares", "--bound", "10000", "--ladder", "--banach", "64"]));
    assert_eq!(v["count"], 100);
    assert!(v["lower_density"]["ladder"].as_array().unwrap().len() > 5);
    assert!(v["banach"]["points"].is_array());

    let v = json(&lab(&["aps", "--spec", "pi2", "--bound", "100000", "--longest", "--order-property", "4"]));
    assert!(v["longest"].is_null());
    assert!(v["order_property"]["witness"].is_null());

    let v = json(&lab(&["geometry", "--spec", "pi2", "--epsilon", "3", "--discreteness", "20,40", "--model", "identity"]));
    assert_eq!(v["epsilon"]["entries"][1]["epsilon"], "1/2");
    assert_eq!(v["discreteness"]["stable"], true);
    let checks = v["witness"]["checks"].as_array().unwrap();
    assert!(checks.len() >= 3 && checks.iter().all(|c| c["passed"] == true));
}

#[test]
fn equations_and_recurrence() {
    let v = json(&lab(&["equations", "--spec", "pi2", "--k", "1", "--l", "2", "--decompose"]));
    assert_eq!(v["decomposition"]["outcome"], "found");
    assert_eq!((v["decomposition"]["s"].as_u64(), v["decomposition"]["t"].as_u64()), (Some(0), Some(1)));
    let v = json(&lab(&["equations", "--spec", "fibonacci", "--k", "1", "--l", "1", "--r", "1", "--index-bound", "10"]));
    assert_eq!(v["enumeration"]["solutions"].as_array().unwrap().len(), 2);

    let v = json(&lab(&["recurrence", "--spec", "fibonacci", "--zero-set", "--plus", "2", "--minus", "1,0"]));
    assert_eq!(v["zero_set"]["verdict"]["verdict"], "identically_zero");
    let o = lab(&["recurrence", "--poly", "6,-5,1"]);
    let v = json(&o);
    assert_eq!(v["spectral"]["classification"]["class"], "rejected");
    assert_eq!(lab(&["recurrence", "--spec", "squares"]).status.code(), Some(2));
}

#[test]
fn classify_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = lab(&["classify", "--spec", "squares", "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["properties"][6]["property"], "raab");
    assert_eq!(v["properties"][6]["verdict"], "witness_supported");
    assert!(v["violations"].as_array().unwrap().is_empty());
    assert!(v.get("runtime").is_none());

    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "bound = 4000\nmax_sum = 3\n").unwrap();
    let v = json(&lab(&["classify", "--spec", "pi2", "--config", cfg.to_str().unwrap(), "--max-sum", "2", "--timings"]));
    assert_eq!(v["config"]["bound"], 4000);
    assert_eq!(v["config"]["max_sum"], 2);
    assert!(v["runtime"]["total_ms"].is_u64());
}

#[test]
fn classify_is_deterministic() {
    let a = lab(&["classify", "--spec", "fibonacci"]);
    let b = lab(&["classify", "--spec", "fibonacci"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors() {
    for args in [
        &["classify"][..],
        &["classify", "--spec", "pi2", "--file", "x"],
        &["classify", "--spec", "nonsense"],
        &["classify", "--spec", "pi2", "--bound", "3"],
        &["sumset", "--spec", "pi2", "--k", "2", "--sigma", "2"],
        &["frobnicate"],
    ] {
        assert_eq!(lab(args).status.code(), Some(2), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(lab(&["classify", "--spec", "pi2", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn suite_with_corpus() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pow.txt"), "[1,2,4,8,16,32,64,128,256,512,1024]").unwrap();
    let corpus = dir.path().join("corpus.toml");
    std::fs::write(
        &corpus,
        "[[sequence]]\nlabel = \"p\"\nfile = \"pow.txt\"\n\n[[sequence]]\nspec = \"power_tower:1\"\n",
    )
    .unwrap();
    let c = corpus.to_str().unwrap();
    let o = lab(&["suite", "--corpus", c, "--summary"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["index"][0]["status"], "ok");
    assert_eq!(v["index"][1]["status"], "error");
    assert_eq!(lab(&["suite", "--corpus", c, "--strict"]).status.code(), Some(1));

    let empty = dir.path().join("empty.toml");
    std::fs::write(&empty, "").unwrap();
    let o = lab(&["suite", "--corpus", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["index"].as_array().unwrap().is_empty());
}
