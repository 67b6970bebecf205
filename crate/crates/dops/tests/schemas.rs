use dops::copoly::Perturbation;
use dops::dsym::SymData;
use dops::fixtures::Fixture;
use dops::rational::{int, q};
use dops::seq::RecCoeffs;
use serde_json::{json, Value};

fn validator(name: &str) -> jsonschema::Validator {
    let path = format!("{}/schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn serialized_values_conform() {
    let rc = validator("rec_coeffs");
    let c = RecCoeffs::constant(2, &q(1, 2), &[int(3), q(-2, 7)], 5);
    assert!(rc.is_valid(&serde_json::to_value(&c).unwrap()));

    let sym = validator("sym_data");
    let s = SymData::constant(3, &q(3, 2), 8);
    assert!(sym.is_valid(&serde_json::to_value(&s).unwrap()));

    let pert = validator("perturbation");
    let p = Perturbation { k: 1, mu: vec![int(2), q(-1, 3)], eta: vec![vec![int(1)]], lambda: q(5, 4) };
    assert!(pert.is_valid(&serde_json::to_value(&p).unwrap()));

    let fx = validator("fixture");
    for f in [
        Fixture::Humbert { d: 2, alpha: q(3, 2) },
        Fixture::DCharlier { d: 2, w: int(1), b: vec![int(0), int(-1), int(2)] },
        Fixture::LaguerreType,
    ] {
        assert!(fx.is_valid(&serde_json::to_value(&f).unwrap()), "{f:?}");
    }
}

#[test]
fn malformed_documents_rejected() {
    let rc = validator("rec_coeffs");
    assert!(rc.is_valid(&json!({"d": 1, "beta": ["0", "1.5"], "gamma": [["1", "-3/4"]]})));
    assert!(!rc.is_valid(&json!({"d": 1, "beta": ["x"], "gamma": [["1"]]})));
    assert!(!rc.is_valid(&json!({"d": 1, "beta": ["0"]})));
    assert!(!rc.is_valid(&json!({"d": 1, "beta": ["0"], "gamma": [["1"]], "extra": 1})));
    assert!(!rc.is_valid(&json!({"d": 0, "beta": ["0"], "gamma": []})));
    let sym = validator("sym_data");
    assert!(!sym.is_valid(&json!({"d": 2, "rho": [1, 2]})));
    let fx = validator("fixture");
    assert!(!fx.is_valid(&json!({"family": "legendre"})));
}
