//! JSON model configuration: every kind parses, unknown keys are rejected,
//! and the expectation-matrix forms resolve.

use ensembles::{
    a_norm_warning, expectation_matrix, CorrelationModel, ModelKind, Symmetry,
};

#[test]
fn every_kind_parses() {
    let cases = [
        (r#"{"kind":"wigner","N":16,"symmetry":"real"}"#, "wigner"),
        (
            r#"{"kind":"deformed","N":8,"symmetry":"real","A":"diag:[1,1,1,1,-1,-1,-1,-1]"}"#,
            "deformed",
        ),
        (
            r#"{"kind":"gaussian_metric_decay","N":32,"symmetry":"complex","params":{"s":2.5}}"#,
            "gaussian_metric_decay",
        ),
        (
            r#"{"kind":"block_copy","N":12,"symmetry":"real","params":{"n_blocks":3}}"#,
            "block_copy",
        ),
        (r#"{"kind":"fourfold","N":10}"#, "fourfold"),
    ];
    for (text, name) in cases {
        let model = CorrelationModel::from_json(text).unwrap();
        assert_eq!(model.kind().name(), name, "config {text}");
    }

    let custom = r#"{
        "kind": "custom", "N": 2, "symmetry": "real",
        "params": {"kappa": [
            [2,0,0,0],
            [0,1,1,0],
            [0,1,1,0],
            [0,0,0,2]
        ]}
    }"#;
    let model = CorrelationModel::from_json(custom).unwrap();
    assert!(matches!(model.kind(), ModelKind::Custom { .. }));
    assert_eq!(model.symmetry(), Symmetry::RealSymmetric);
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(CorrelationModel::from_json(r#"{"kind":"wigner","N":16,"extra":1}"#).is_err());
    assert!(CorrelationModel::from_json(
        r#"{"kind":"block_copy","N":12,"params":{"n_blocks":3,"typo":1}}"#
    )
    .is_err());
    assert!(CorrelationModel::from_json(
        r#"{"kind":"gaussian_metric_decay","N":8,"params":{"sigma":2.0}}"#
    )
    .is_err());
}

#[test]
fn malformed_configs_are_rejected() {
    // Unknown kind.
    assert!(CorrelationModel::from_json(r#"{"kind":"mystery","N":8}"#).is_err());
    // Missing dimension.
    assert!(CorrelationModel::from_json(r#"{"kind":"wigner"}"#).is_err());
    // Bad symmetry value.
    assert!(
        CorrelationModel::from_json(r#"{"kind":"wigner","N":8,"symmetry":"quaternion"}"#)
            .is_err()
    );
    // Indivisible block count.
    assert!(CorrelationModel::from_json(
        r#"{"kind":"block_copy","N":10,"params":{"n_blocks":3}}"#
    )
    .is_err());
    // The sign-flip structure has no complex class.
    assert!(
        CorrelationModel::from_json(r#"{"kind":"fourfold","N":8,"symmetry":"complex"}"#)
            .is_err()
    );
    // Nonpositive decay exponent.
    assert!(CorrelationModel::from_json(
        r#"{"kind":"gaussian_metric_decay","N":8,"params":{"s":-1.0}}"#
    )
    .is_err());
    // "A" on a non-deformed kind.
    assert!(
        CorrelationModel::from_json(r#"{"kind":"wigner","N":4,"A":"diag:[1,2,3,4]"}"#).is_err()
    );
    // "A" with a malformed prefix.
    assert!(
        CorrelationModel::from_json(r#"{"kind":"deformed","N":2,"A":"dense:[1]"}"#).is_err()
    );
    // Custom tensor with the wrong shape.
    assert!(CorrelationModel::from_json(
        r#"{"kind":"custom","N":2,"params":{"kappa":[[1,0],[0,1]]}}"#
    )
    .is_err());
    // Custom tensor violating label-transpose symmetry.
    assert!(CorrelationModel::from_json(
        r#"{"kind":"custom","N":2,"params":{"kappa":[
            [2,0,0,0],
            [0,1,0,0],
            [0,0,1,0],
            [0,0,0,2]
        ]}}"#
    )
    .is_err());
}

#[test]
fn diag_expectation_resolves() {
    let model = CorrelationModel::from_json(
        r#"{"kind":"deformed","N":4,"A":"diag:[1.5,0,0,-1.5]"}"#,
    )
    .unwrap();
    let a = expectation_matrix(&model).unwrap();
    assert_eq!(a[(0, 0)], 1.5);
    assert_eq!(a[(3, 3)], -1.5);
    assert_eq!(a[(0, 1)], 0.0);

    // Wrong diagonal length fails at resolution.
    let short = CorrelationModel::from_json(r#"{"kind":"deformed","N":4,"A":"diag:[1,2]"}"#)
        .unwrap();
    assert!(expectation_matrix(&short).is_err());
}

#[test]
fn norm_bound_warning_fires_only_when_exceeded() {
    let loud = CorrelationModel::from_json(
        r#"{"kind":"deformed","N":4,"A":"diag:[3,0,0,0]","a_bound":2.0}"#,
    )
    .unwrap();
    assert!(a_norm_warning(&loud).unwrap().is_some());

    let quiet = CorrelationModel::from_json(
        r#"{"kind":"deformed","N":4,"A":"diag:[3,0,0,0]","a_bound":4.0}"#,
    )
    .unwrap();
    assert!(a_norm_warning(&quiet).unwrap().is_none());

    // No declared bound: never a warning.
    let unbounded =
        CorrelationModel::from_json(r#"{"kind":"deformed","N":4,"A":"diag:[9,0,0,0]"}"#)
            .unwrap();
    assert!(a_norm_warning(&unbounded).unwrap().is_none());
}
