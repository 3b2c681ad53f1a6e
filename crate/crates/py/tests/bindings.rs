use serde_json::Value;
use triplekit::*;

#[test]
fn normal_form_verify_and_ricci() {
    let t = normal_form_impl("lorentz", Some(r#"{"f": ["2"]}"#)).unwrap();
    let rep: Value = serde_json::from_str(&verify_impl(&t).unwrap()).unwrap();
    assert_eq!(rep["all_pass"], true);
    let r: Value = serde_json::from_str(&ricci_impl(&t).unwrap()).unwrap();
    let labels: Vec<&str> = r["labels"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    let k = labels.iter().position(|l| *l == "Z*").unwrap();
    assert_eq!(r["gram"][k][k], "2");
}

#[test]
fn isomorphism_codes() {
    let a = normal_form_impl("lorentz", Some(r#"{"f": [1, 2]}"#)).unwrap();
    let b = normal_form_impl("lorentz", Some(r#"{"f": [2, 4]}"#)).unwrap();
    let c = normal_form_impl("lorentz", Some(r#"{"f": [1, 3]}"#)).unwrap();
    assert_eq!(isomorphic_impl(&a, &b, None).unwrap().0, 0);
    assert_eq!(isomorphic_impl(&a, &c, None).unwrap().0, 1);
    assert_eq!(isomorphic_impl(&a, &c, Some(1e-9)).unwrap().0, 1);
    assert!(isomorphic_impl(&a, &c, Some(-1.0)).is_err());
}

#[test]
fn geometry_and_census() {
    let c: Value = serde_json::from_str(&center_impl("-1,-4").unwrap()).unwrap();
    assert_eq!(c["kind"], "Z_times_lattice");
    let g = metric_eval_impl("1", "0,0,0").unwrap();
    assert_eq!(g, vec![vec!["1", "0", "0"], vec!["0", "0", "1"], vec!["0", "1", "0"]]);
    let census: Value = serde_json::from_str(&enumerate_impl(2, 2, "-2,-1,1,2", "b").unwrap()).unwrap();
    assert_eq!(census["classes"].as_array().unwrap().len(), 2);
    assert!(enumerate_impl(2, 2, "", "b").is_err());
}

#[test]
fn bad_input_is_an_error() {
    assert!(verify_impl("{").is_err());
    assert!(normal_form_impl("nope", None).is_err());
    let d: Value = serde_json::from_str(&decompose_impl(&normal_form_impl("iv", None).unwrap()).unwrap()).unwrap();
    assert_eq!(d["dims"].as_array().unwrap().len(), 2);
    let inv: Value = serde_json::from_str(&invariants_impl(&normal_form_impl("nil22", None).unwrap(), None).unwrap()).unwrap();
    assert_eq!(inv["nilpotent"], true);
}
