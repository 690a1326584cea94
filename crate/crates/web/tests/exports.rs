use serde_json::Value;
use w22_web::{bracket_json, module_json, verma_json};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn bracket_export() {
    let v = parse(bracket_json("x:2", " x:-2 ").unwrap());
    assert_eq!(v["text"], "(1/2)·C + (-4)·x(0)");
    assert_eq!(v["element"]["terms"][1]["coeff"], "-4");
    assert!(bracket_json("q:1", "x:0").unwrap_err().starts_with("left"));
}

#[test]
fn verma_export() {
    let v = parse(verma_json("1/2", "0", "1", "8", 3).unwrap());
    assert_eq!(v["dims"], serde_json::json!([1, 2, 5, 10]));
    assert_eq!(v["check"]["verdict"], "reducible");
    assert_eq!(v["check"]["witness"]["level"], 2);
    assert_eq!(v["witness_text"], "(1)·I(-2) + (-3/4)·I(-1)·I(-1)");

    let v = parse(verma_json("1", "0", "1", "0", 4).unwrap());
    assert_eq!(v["check"]["verdict"], "no-singular-vector-up-to-4");
    assert!(v["witness_text"].is_null());

    assert!(verma_json("1", "0", "0.5", "0", 2).unwrap_err().contains("0.5"));
    assert!(verma_json("1", "0", "1", "0", 9).is_err());
}

#[test]
fn module_export() {
    let v = parse(module_json("aab", "0", "0", 5).unwrap());
    assert_eq!(v["probe"]["verdict"], "candidate-submodule");
    assert_eq!(v["probe"]["indices"], serde_json::json!([0]));
    assert_eq!(v["violations"], 0);
    assert_eq!(v["support"].as_array().unwrap().len(), 11);

    let v = parse(module_json("a-prime-000", "", "", 3).unwrap());
    assert_eq!(v["support"].as_array().unwrap().len(), 6);
    assert_eq!(v["probe"]["verdict"], "no-proper-invariant-window-subspace");

    assert!(module_json("zz", "0", "0", 3).is_err());
    assert!(module_json("aa", "1", "", 40).is_err());
}
