use chancmp::channels::random_channel;
use chancmp::classical::Experiment;
use chancmp::games::{random_ensemble, MeasurementSet, Povm};
use chancmp::io::*;
use chancmp::{random, SystemDims};

#[test]
fn documents_round_trip_exactly() {
    let phi = random_channel(2, 3, 2, 1);
    let text = choimap_to_json(&phi).unwrap();
    let back = choimap_from_json(&text).unwrap();
    assert_eq!(back, phi);
    assert_eq!(choimap_to_json(&back).unwrap(), text);

    let mut rng = random::rng(2);
    let rho = random::density_matrix(&mut rng, 4, 2);
    let dims = SystemDims::new([("A0", 2), ("A1", 2)]).unwrap();
    let (r2, d2) = state_from_json(&state_to_json(&rho, &dims).unwrap()).unwrap();
    assert_eq!((r2.data(), d2), (rho.hermitian_part().data(), dims));

    let m = Povm::on_single(random::povm_effects(&mut rng, 3, 4)).unwrap();
    assert_eq!(povm_from_json(&povm_to_json(&m).unwrap()).unwrap(), m);

    let set = MeasurementSet::new(vec![Povm::computational(2), Povm::computational(2)]).unwrap();
    let back = measset_from_json(&measset_to_json(&set).unwrap()).unwrap();
    assert_eq!(back.povms(), set.povms());

    let e = random_ensemble(&mut rng, 2, 3);
    let back = ensemble_from_json(&ensemble_to_json(&e).unwrap()).unwrap();
    assert_eq!(back.probs(), e.probs());
    assert_eq!(back.states(), e.states());

    let x = Experiment::new(vec![vec![0.25, 0.75], vec![1.0, 0.0]]).unwrap();
    assert_eq!(experiment_from_json(&experiment_to_json(&x).unwrap()).unwrap(), x);
}

#[test]
fn floats_carry_seventeen_digits() {
    let s = to_json(&vec![0.1f64, 1.0, -2.5e-12]).unwrap();
    assert_eq!(s, "[1.0000000000000001e-1,1.0000000000000000e0,-2.4999999999999998e-12]");
    let v: Vec<f64> = serde_json::from_str(&s).unwrap();
    assert_eq!(v, vec![0.1, 1.0, -2.5e-12]);
}

#[test]
fn malformed_documents_are_rejected() {
    let phi = random_channel(2, 2, 1, 3);
    let text = choimap_to_json(&phi).unwrap().replace("choimap-v1", "povm-v1");
    assert!(choimap_from_json(&text).is_err());
    assert!(choimap_from_json("{\"in_dims\": []}").is_err());
    assert!(experiment_from_json("[[0.5, 0.6]]").is_err());
    let bad = r#"{"dims":[["A",2]],"matrix":[[[1,0],[0,1]],[[0,0],[0,0]]]}"#;
    assert!(state_from_json(bad).is_err());
    // unlabeled schema tag is accepted
    let plain = r#"{"dims":[["A",1]],"effects":[[[[1,0]]]]}"#;
    assert!(povm_from_json(plain).is_ok());
}
