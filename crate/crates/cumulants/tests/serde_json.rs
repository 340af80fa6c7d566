//! Wire-format round trip for finite distributions.

use cumulants::JointDistribution;

#[test]
fn json_round_trip_preserves_the_distribution() {
    let d = JointDistribution::product(
        &JointDistribution::rademacher(),
        &JointDistribution::rademacher(),
    )
    .unwrap();
    let text = d.to_json();
    let back = JointDistribution::from_json(&text).unwrap();
    assert_eq!(d, back);
}

#[test]
fn wire_shape_is_atoms_with_p_and_v() {
    let d = JointDistribution::rademacher();
    let value: serde_json::Value = serde_json::from_str(&d.to_json()).unwrap();
    let atoms = value
        .get("atoms")
        .and_then(|a| a.as_array())
        .expect("top-level atoms array");
    assert_eq!(atoms.len(), 2);
    assert!(atoms[0].get("p").is_some());
    assert!(atoms[0].get("v").and_then(|v| v.as_array()).is_some());
}

#[test]
fn explicit_wire_text_parses() {
    let text = r#"{"atoms":[{"p":0.5,"v":[1.0,2.0]},{"p":0.5,"v":[-1.0,0.0]}]}"#;
    let d = JointDistribution::from_json(text).unwrap();
    assert_eq!(d.n_vars(), 2);
    assert_eq!(d.moment(&[0]), 0.0);
}

#[test]
fn invalid_probability_sums_are_rejected() {
    let text = r#"{"atoms":[{"p":0.5,"v":[1.0]},{"p":0.6,"v":[-1.0]}]}"#;
    assert!(JointDistribution::from_json(text).is_err());
}
