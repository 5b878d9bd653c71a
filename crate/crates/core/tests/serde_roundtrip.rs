use e91_squash::bounds::{finite_key_length, ProtocolParams};
use e91_squash::hashing::BitString;
use e91_squash::operator::{generalized_x, pauli, Axis, Phase};
use e91_squash::protocol::{
    run_protocol_with, EveStrategy, SimOptions, Transcript, TRANSCRIPT_SCHEMA,
};
use e91_squash::squash::onepartite_squash_feasibility;

#[test]
fn transcript_round_trips_bit_exactly() {
    let params = ProtocolParams::new(1500, 0.3, 0.1, 0.5, 1e-3, 1e-6, 1.2, 1500).unwrap();
    let opts = SimOptions {
        key_length: Some(100),
        ..Default::default()
    };
    let t =
        run_protocol_with(&params, &EveStrategy::IidDepolarizing { p: 0.03 }, 8, &opts).unwrap();
    assert!(t.f_pa.is_some());
    let json = serde_json::to_string(&t).unwrap();
    let back: Transcript = serde_json::from_str(&json).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.schema, TRANSCRIPT_SCHEMA);
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
}

#[test]
fn params_round_trip() {
    let p = ProtocolParams::new(44_100, 0.3, 0.1, 0.6, 1e-9, 1e-9, 1.2, 30_000).unwrap();
    let back: ProtocolParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn bit_string_hex_layout() {
    let s = BitString::from_bits((0..12).map(|i| i == 0 || i == 11));
    let v = serde_json::to_value(&s).unwrap();
    assert_eq!(v, serde_json::json!({"len": 12, "hex": "0108"}));
    let back: BitString = serde_json::from_value(v).unwrap();
    assert_eq!(back, s);
    assert!(
        serde_json::from_value::<BitString>(serde_json::json!({"len": 20, "hex": "01"})).is_err()
    );
}

#[test]
fn phase_serializes_as_pair() {
    let v = serde_json::to_value(Phase::I).unwrap();
    assert_eq!(v, serde_json::json!([0.0, 1.0]));
    assert!(serde_json::from_value::<Phase>(serde_json::json!([2.0, 0.0])).is_err());
}

#[test]
fn reports_serialize() {
    let p = ProtocolParams::new(1_000_000, 0.1, 0.01, 0.69, 1e-9, 1e-9, 1.0, 80_794).unwrap();
    let v = serde_json::to_value(finite_key_length(&p).unwrap()).unwrap();
    assert_eq!(v["l"], 0);
    assert_eq!(v["l_smp"], 12_346);
    let r = onepartite_squash_feasibility(&generalized_x(Phase::MINUS_I), &pauli(Axis::Z)).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    assert_eq!(v["status"], "feasible");
    assert!(v.get("witness").is_none());
}
