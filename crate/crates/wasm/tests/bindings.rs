use crmodel_wasm::{analyze_js, analyze_value, infer_weights_value, lemtub_js, lemtub_value};

#[test]
fn analyze_dimensions() {
    let v = analyze_value("Im w = |z1|^2 + |z2|^2", "").unwrap();
    assert_eq!(v["total_dim"], 15);
    let dims: Vec<u64> = v["dimensions"].as_array().unwrap().iter().map(|d| d["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims.iter().sum::<u64>(), 15);
}

#[test]
fn analyze_errors_are_json() {
    let s = analyze_js("Im w = z1^2", "");
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert!(v["error"].as_str().unwrap().contains("pluriharmonic"));
}

#[test]
fn weights_and_lemtub() {
    let v = infer_weights_value("Im w = Re(z1*conj(z2)^3) + Re(z3*conj(z3)^3)*Re(z2^3)").unwrap();
    assert!(v.as_array().unwrap().iter().any(|w| w == "(1/4, 1/4, 1/16)"), "{v}");
    assert_eq!(lemtub_value(2).unwrap(), serde_json::json!(["-1/2", "3/2"]));
    assert!(lemtub_js(0).contains("error"));
}
