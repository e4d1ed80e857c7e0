//! File formats: parsing, round trips and rejection of malformed input.

use qvp::classical::BooleanCircuit;
use qvp::constructions::{CircuitChannel, Reduction};
use qvp::emap::TargetPointSet;
use qvp::iterative::IterativePlan;
use qvp::linalg::{PureState, StateJson};
use qvp::procedure::{CircuitDescription, ProcedureJson};
use qvp::tolerances::Limits;
use qvp::Error;

#[test]
fn plan_file_round_trip() {
    let text = r#"{"N": 2, "alphabet": ["0", "1"], "g": [[1, 0], [0.5, 0.5], [0, 1]]}"#;
    let plan: IterativePlan = serde_json::from_str(text).unwrap();
    plan.validate(&Limits::default()).unwrap();
    assert_eq!(plan, IterativePlan::binary(&[0.0, 0.5, 1.0]).unwrap());
    let back: IterativePlan = serde_json::from_str(&serde_json::to_string(&plan).unwrap()).unwrap();
    assert_eq!(back, plan);
}

#[test]
fn plan_rows_must_be_distributions() {
    let bad: IterativePlan = serde_json::from_str(r#"{"N": 1, "alphabet": ["0", "1"], "g": [[0.7, 0.7], [0, 1]]}"#).unwrap();
    assert!(matches!(bad.validate(&Limits::default()), Err(Error::PlanInvalid(_))));
    let short: IterativePlan = serde_json::from_str(r#"{"N": 3, "alphabet": ["0", "1"], "g": [[1, 0], [0, 1]]}"#).unwrap();
    assert!(short.validate(&Limits::default()).is_err());
}

#[test]
fn targets_reject_unordered_points() {
    assert!(TargetPointSet::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.3, 1.0], 0.5, 0.3).is_ok());
    assert!(TargetPointSet::new(vec![0.0, 0.7, 0.5, 1.0], vec![0.0, 0.2, 0.4, 1.0], 0.1, 0.1).is_err());
    assert!(TargetPointSet::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.5], 0.5, 0.5).is_err());
}

#[test]
fn circuit_description_builds_and_round_trips() {
    let text = r#"{"witness_qubits": 1, "ancilla_qubits": 1, "outcomes": 2,
        "gates": [{"g": "ry", "q": [1], "theta": 1.0}, {"g": "x", "q": [0], "c": [1]}]}"#;
    let d: CircuitDescription = serde_json::from_str(text).unwrap();
    let limits = Limits::default();
    let q = ProcedureJson::Circuit(d.clone()).build(&limits).unwrap();
    // Accept element is diagonal: |0> accepts with sin^2(1/2), |1> with cos^2(1/2).
    let e1 = q.accept_element().unwrap();
    assert!((e1[(0, 0)].re - (0.5f64).sin().powi(2)).abs() < 1e-12);
    assert!((e1[(1, 1)].re - (0.5f64).cos().powi(2)).abs() < 1e-12);
    let back: CircuitDescription = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back, d);
}

#[test]
fn povm_json_round_trip_preserves_elements() {
    let limits = Limits::default();
    let q = qvp::fixtures::random_procedure(4, 2, 1, &limits).unwrap();
    let text = serde_json::to_string(&ProcedureJson::from_procedure(&q)).unwrap();
    let back = serde_json::from_str::<ProcedureJson>(&text).unwrap().build(&limits).unwrap();
    for (a, b) in q.povm().iter().zip(back.povm()) {
        assert!(a.max_abs_diff(b) < 1e-15);
    }
}

#[test]
fn oversized_circuit_is_an_input_error() {
    let d = CircuitDescription { witness_qubits: 20, ancilla_qubits: 20, outcomes: 2, gates: vec![] };
    let err = ProcedureJson::Circuit(d).build(&Limits::default()).unwrap_err();
    assert!(matches!(err, Error::TooManyQubits { .. }));
    assert!(err.is_input_error());
}

#[test]
fn state_json_forms() {
    let psi = PureState::basis(4, 2).unwrap();
    let text = serde_json::to_string(&StateJson::from_pure(&psi)).unwrap();
    let rho = serde_json::from_str::<StateJson>(&text).unwrap().into_density().unwrap();
    assert!((rho.fidelity_with_pure(&psi) - 1.0).abs() < 1e-15);
    let mixed = r#"{"re": [[0.5, 0], [0, 0.5]], "im": [[0, 0], [0, 0]]}"#;
    let rho = serde_json::from_str::<StateJson>(mixed).unwrap().into_density().unwrap();
    assert!((rho.purity() - 0.5).abs() < 1e-15);
    let unnormalized = r#"{"re": [1, 1], "im": [0, 0]}"#;
    assert!(serde_json::from_str::<StateJson>(unnormalized).unwrap().into_density().is_err());
}

#[test]
fn reduction_parses_and_maps_instances() {
    let text = r#"{"f": {"x": "y"}, "phi": {"in_qubits": 1, "fresh_ancillas": 1, "out_qubits": 1,
        "gates": [{"g": "h", "q": [0]}]}, "epsilon": 0.1}"#;
    let r = Reduction::from_json(text).unwrap();
    assert_eq!(r.map_instance("x").unwrap(), "y");
    assert!(r.map_instance("z").is_err());
    r.phi.validate(&Limits::default()).unwrap();
}

#[test]
fn reduction_rejects_probabilistic_channels() {
    let kraus = r#"{"f": {}, "phi": {"kraus": []}, "epsilon": 0.1}"#;
    assert!(matches!(Reduction::from_json(kraus), Err(Error::InvalidReduction(_))));
    let mixture = r#"{"f": {}, "mixture": [], "phi": {"in_qubits": 1, "fresh_ancillas": 0, "out_qubits": 1, "gates": []}, "epsilon": 0}"#;
    assert!(Reduction::from_json(mixture).is_err());
    let negative = r#"{"f": {}, "phi": {"in_qubits": 1, "fresh_ancillas": 0, "out_qubits": 1, "gates": []}, "epsilon": -1}"#;
    assert!(Reduction::from_json(negative).is_err());
}

#[test]
fn channel_bounds_are_checked() {
    let limits = Limits::default();
    let bad = CircuitChannel { in_qubits: 1, fresh_ancillas: 0, out_qubits: 2, gates: vec![] };
    assert!(matches!(bad.validate(&limits), Err(Error::InvalidReduction(_))));
    assert!(CircuitChannel::identity(2).validate(&limits).is_ok());
    let unknown = r#"{"in_qubits": 1, "fresh_ancillas": 0, "out_qubits": 1, "gates": [], "extra": 1}"#;
    assert!(serde_json::from_str::<CircuitChannel>(unknown).is_err());
}

#[test]
fn boolean_circuit_file() {
    // Output x0 AND (y0 XOR z0).
    let text = r#"{"x_bits": 1, "y_bits": 1, "z_bits": 1,
        "gates": [{"op": "xor", "in": [1, 2], "out": 3}, {"op": "and", "in": [0, 3], "out": 4}], "output": 4}"#;
    let c: BooleanCircuit = serde_json::from_str(text).unwrap();
    c.validate().unwrap();
    assert!(c.evaluate(&[true], &[false], 1).unwrap());
    assert!(!c.evaluate(&[true], &[true], 1).unwrap());
    assert!(!c.evaluate(&[false], &[false], 1).unwrap());
    let bad_wire = text.replace(r#""out": 4"#, r#""out": 7"#);
    let c: BooleanCircuit = serde_json::from_str(&bad_wire).unwrap();
    assert!(c.validate().is_err());
    let bad_op = text.replace("xor", "nand");
    assert!(serde_json::from_str::<BooleanCircuit>(&bad_op).is_err());
}
