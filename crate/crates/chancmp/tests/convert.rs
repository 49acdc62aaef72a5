use chancmp::channels::{
    depolarizing, identity, is_channel, is_comb, random_channel, random_channel_with, replacement, ChoiMap,
};
use chancmp::convert::*;
use chancmp::games::{MeasurementSet, Povm};
use chancmp::norms::diamond_norm;
use chancmp::{random, CMatrix, SystemDims, C64};

const TOL: f64 = 1e-8;

fn unitary_channel(u: &CMatrix) -> ChoiMap {
    chancmp::channels::choi_of_kraus(std::slice::from_ref(u)).unwrap()
}

#[test]
fn post_processed_target_is_reachable() {
    let mut rng = random::rng(1);
    for _ in 0..3 {
        let phi = random_channel_with(&mut rng, 2, 2, 2);
        let lam = random_channel_with(&mut rng, 2, 2, 2).relabel(&["A1"], &["B1"]).unwrap();
        let target = phi.then(&lam).unwrap();
        let r = delta_post(&phi, &target, TOL).unwrap();
        assert!(r.delta.value < 1e-6, "{:?}", r.delta);
        assert!(r.achieved < 1e-6);
        match &r.optimizer {
            Optimizer::Channel(l) => assert!(is_channel(l, 1e-7)),
            _ => panic!("expected a channel"),
        }
    }
}

#[test]
fn depolarized_to_identity_matches_replacement_scan() {
    let phi1 = depolarizing(2, 0.0).unwrap();
    let phi2 = identity(2);
    let r = delta_post(&phi1, &phi2, TOL).unwrap();
    // golden-section search over τ = diag(t, 1 − t)
    let f = |t: f64| {
        let tau = CMatrix::diag(&[t, 1.0 - t]);
        diamond_norm(&replacement(&tau, 2).unwrap().sub(&phi2).unwrap(), TOL).unwrap().value
    };
    let (mut a, mut b) = (0.0, 1.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..40 {
        let (c, d) = (b - g * (b - a), a + g * (b - a));
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let scan = f(0.5 * (a + b));
    assert!((r.delta.value - scan).abs() < 1e-5, "{} vs {scan}", r.delta.value);
    assert!((r.achieved - r.delta.value).abs() < 1e-6);
}

#[test]
fn unitary_preprocessing_is_free() {
    let mut rng = random::rng(2);
    let u = random::haar_unitary(&mut rng, 2);
    let v = random::haar_unitary(&mut rng, 2);
    let r = delta_pre(&unitary_channel(&u), &unitary_channel(&v), TOL).unwrap();
    assert!(r.delta.value < 1e-6);
}

#[test]
fn comb_with_trivial_memory_wires_matches_partial() {
    let a = random_channel(2, 2, 2, 5);
    let b = random_channel(2, 2, 1, 6);
    let full = delta_comb(&a, &b, false, TOL).unwrap();
    let part = delta_partial(&a, &b, &[], &[], TOL).unwrap();
    assert!((full.delta.value - part.delta.value).abs() < 1e-6);
    match &full.optimizer {
        Optimizer::Comb(t) => assert!(is_comb(t, 1e-7), "{:?}", t.comb_residuals()),
        _ => panic!("expected a comb"),
    }
    assert!((full.achieved - full.delta.value).abs() < 1e-6, "{} {}", full.achieved, full.delta.value);
    let ns = delta_comb(&a, &b, true, TOL).unwrap();
    assert!(ns.delta.value >= full.delta.value - 1e-6);
    let post = delta_post(&a, &b, TOL).unwrap();
    assert!(full.delta.value <= post.delta.value + 1e-6);
}

#[test]
fn fully_fixed_wires_give_the_diamond_distance() {
    let a = random_channel(2, 2, 2, 7);
    let b = random_channel(2, 2, 2, 8);
    let r = delta_partial(&a, &b, &["A0"], &["A1"], TOL).unwrap();
    let d = diamond_norm(&a.sub(&b).unwrap(), TOL).unwrap();
    assert!((r.delta.value - d.value).abs() < 1e-6, "{} vs {}", r.delta.value, d.value);
}

#[test]
fn witnesses_violate_at_zero_epsilon() {
    let a = random_channel(2, 2, 2, 11);
    let b = random_channel(2, 2, 1, 12);
    // a general superchannel can route the input around the source through its memory
    assert!(delta(&a, &b, &Variant::Comb, TOL).unwrap().delta.value < 1e-6);
    for v in [Variant::Post, Variant::Pre, Variant::NoSignaling] {
        let d = delta(&a, &b, &v, TOL).unwrap().delta.value;
        assert!(d > 0.05, "{v:?}: {d}");
        let rep = verify_rand_chans(&a, &b, &v, 0.0, 1, 0, TOL).unwrap();
        let ok = verify_rand_chans(&a, &b, &v, d + 1e-4, 9, 3, TOL).unwrap();
        assert!(rep.sweep.max_gap >= d / 2.0 - 1e-5, "{v:?}: {} vs {d}", rep.sweep.max_gap);
        assert!(ok.sweep.violations.is_empty(), "{v:?}: {:?}", ok.sweep.worst);
    }
}

#[test]
fn partial_witness() {
    let mut rng = random::rng(13);
    let _ = random_channel_with(&mut rng, 4, 4, 1);
    // A and B qubits each
    let mk = |rng: &mut rand_chacha::ChaCha8Rng, env| {
        let c = random_channel_with(rng, 4, 4, env);
        ChoiMap::new(
            c.choi().clone(),
            SystemDims::new([("A0", 2), ("B0", 2)]).unwrap(),
            SystemDims::new([("A1", 2), ("B1", 2)]).unwrap(),
        )
        .unwrap()
    };
    let p1 = mk(&mut rng, 1);
    let p2 = mk(&mut rng, 2);
    let v = Variant::partial(&["B0"], &["B1"]);
    let rep = verify_rand_chans(&p1, &p2, &v, 0.0, 1, 0, TOL).unwrap();
    assert!(rep.sweep.max_gap >= rep.delta.value / 2.0 - 1e-5);
}

fn pauli_meas(which: char) -> Povm {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let u = match which {
        'z' => CMatrix::identity(2),
        _ => CMatrix::from_rows(&[
            vec![C64::new(s, 0.0), C64::new(s, 0.0)],
            vec![C64::new(s, 0.0), C64::new(-s, 0.0)],
        ])
        .unwrap(),
    };
    Povm::from_basis(&u).unwrap()
}

#[test]
fn measurement_simulability_oracles() {
    let z = MeasurementSet::new(vec![pauli_meas('z')]).unwrap();
    let x = MeasurementSet::new(vec![pauli_meas('x')]).unwrap();
    let r = delta_meas_sim(&z, &x, TOL).unwrap();
    // vertices and a grid over the 2x2 stochastic matrices
    let mut best = f64::INFINITY;
    let target = meas_set_channel(&x).unwrap();
    for a in 0..=10 {
        for b in 0..=10 {
            let (a, b) = (a as f64 / 10.0, b as f64 / 10.0);
            let n = pauli_meas('z').post_process(&[vec![a, b], vec![1.0 - a, 1.0 - b]]).unwrap();
            let c = meas_set_channel(&MeasurementSet::new(vec![n]).unwrap()).unwrap();
            best = best.min(diamond_norm(&c.sub(&target).unwrap(), TOL).unwrap().value);
        }
    }
    assert!(r.delta.value <= best + 1e-6 && r.delta.value > 0.5, "{} vs grid {best}", r.delta.value);
    assert!((r.achieved - r.delta.value).abs() < 1e-6);

    let both = MeasurementSet::new(vec![pauli_meas('z'), pauli_meas('x')]).unwrap();
    assert!(delta_meas_sim(&both, &x, TOL).unwrap().delta.value < 1e-6);
    let mix = Povm::mixture(&[0.5, 0.5], &[pauli_meas('z'), pauli_meas('x')]).unwrap();
    let mix = mix.post_process(&[vec![0.9, 0.2], vec![0.1, 0.8]]).unwrap();
    let r = delta_meas_sim(&both, &MeasurementSet::new(vec![mix]).unwrap(), TOL).unwrap();
    assert!(r.delta.value < 1e-6, "{:?}", r.delta);
    if let Optimizer::CondProb { p, .. } = &r.optimizer {
        assert!(cc_structure_residual(p) < 1e-7);
    }
}

#[test]
fn pre_range_lower_bounds() {
    let s0 = CMatrix::diag(&[1.0, 0.0]);
    let t0 = CMatrix::diag(&[0.25, 0.75]);
    let a = replacement(&s0, 2).unwrap();
    let b = replacement(&t0, 2).unwrap();
    let mut rng = random::rng(3);
    let dims = SystemDims::new([("A0", 2), ("R", 2)]).unwrap();
    for _ in 0..3 {
        let xi = random::density_matrix(&mut rng, 4, 2);
        let v = pre_range_inner(&a, &b, &xi, &dims, &["R"], TOL).unwrap();
        assert!((v.value - 1.5).abs() < 1e-6, "{v:?}");
        let same = pre_range_inner(&a, &a, &xi, &dims, &["R"], TOL).unwrap();
        assert!(same.value.abs() < 1e-6);
    }
    let c = random_channel(2, 2, 2, 30);
    let d = random_channel(2, 2, 2, 31);
    let dp = delta_pre(&c, &d, TOL).unwrap().delta.value;
    for _ in 0..3 {
        let xi = random::density_matrix(&mut rng, 4, 4);
        let v = pre_range_inner(&c, &d, &xi, &dims, &["R"], TOL).unwrap();
        assert!(v.value <= dp + 1e-6);
    }
    let m = hausdorff_pre_metric(&CMatrix::diag(&[1.0, 0.0, 0.0, 0.0]), &CMatrix::diag(&[0.0, 0.0, 0.0, 1.0]), &dims, &["R"]).unwrap();
    assert!((m - 4.0).abs() < 1e-9);
}
