//! Randomized invariants. Strategies draw seeds and sizes; the objects are
//! built with the library's own samplers so failures replay from the seed.

use chancmp::channels::{is_channel, pairing, random_channel, random_channel_with, ChoiMap, SuperchannelChoi};
use chancmp::classical::{lecam_deficiency, Experiment};
use chancmp::convert::{delta_post, delta_pre};
use chancmp::games::{psucc_opt, psucc_q, random_ensemble, Povm};
use chancmp::linalg::*;
use chancmp::norms::{diamond_norm, dual_diamond_norm};
use chancmp::random;
use proptest::prelude::*;

fn sd(v: &[(&str, usize)]) -> SystemDims {
    SystemDims::new(v.iter().copied()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_of_products(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let mut rng = random::rng(seed);
        let a = random::gaussian(&mut rng, da, da);
        let b = random::gaussian(&mut rng, db, db);
        let (t, _) = partial_trace(&kron(&a, &b), &sd(&[("A", da), ("B", db)]), &["B"]).unwrap();
        prop_assert!(t.dist(&a.scale_c(b.trace())) < 1e-12 * (1.0 + a.max_abs() * b.max_abs() * db as f64));
    }

    #[test]
    fn permutations_keep_the_spectrum(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        let mut rng = random::rng(seed);
        let dims = sd(&[("A", da), ("B", db), ("C", dc)]);
        let h = random::hermitian(&mut rng, dims.total());
        let (p, _) = permute_systems(&h, &dims, &["C", "A", "B"]).unwrap();
        let (e1, _) = herm_eig(&h).unwrap();
        let (e2, _) = herm_eig(&p).unwrap();
        for (x, y) in e1.iter().zip(&e2) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_norm_dominates_operator_norm(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = random::rng(seed);
        let h = random::hermitian(&mut rng, d);
        prop_assert!(trace_norm(&h).unwrap() >= op_norm(&h).unwrap() - 1e-12);
    }

    #[test]
    fn transpose_trick(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = random::rng(seed);
        let x = random::gaussian(&mut rng, d, d);
        let i = CMatrix::identity(d);
        let w = vec_doubleket(&i);
        prop_assert!(kron(&x, &i).mul(&w).dist(&kron(&i, &x.transpose()).mul(&w)) < 1e-12);
    }

    #[test]
    fn random_channels_are_channels(seed in any::<u64>(), din in 1usize..4, dout in 1usize..4, env in 1usize..4) {
        let phi = random_channel(din, dout, env, seed);
        prop_assert!(phi.is_cp(1e-10) && phi.is_tp(1e-10));
    }

    #[test]
    fn superchannels_map_channels_to_channels(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let pre = random_channel_with(&mut rng, 2, 4, 2);
        let pre = ChoiMap::new(pre.choi().clone(), sd(&[("A0'", 2)]), sd(&[("A0", 2), ("R", 2)])).unwrap();
        let post = random_channel_with(&mut rng, 4, 2, 2);
        let post = ChoiMap::new(post.choi().clone(), sd(&[("A1", 2), ("R", 2)]), sd(&[("A1'", 2)])).unwrap();
        let theta = SuperchannelChoi::from_pre_post(&pre, &post, &sd(&[("A0", 2)]), &sd(&[("A1", 2)])).unwrap();
        let phi = random_channel_with(&mut rng, 2, 2, 2);
        prop_assert!(is_channel(&theta.apply(&phi).unwrap(), 1e-9));
    }

    #[test]
    fn coarse_graining_never_helps(seed in any::<u64>(), k in 2usize..4) {
        let mut rng = random::rng(seed);
        let e = random_ensemble(&mut rng, 2, k);
        let m = Povm::on_single(random::povm_effects(&mut rng, 2, 3)).unwrap();
        let q = psucc_q(&e, &m).unwrap();
        prop_assert!(q <= psucc_opt(&e, 1e-8).unwrap().value + 1e-7);
        // relabeling the outcomes does not change the value
        let mut eff = m.effects().to_vec();
        eff.rotate_left(1);
        let m2 = Povm::on_single(eff).unwrap();
        prop_assert!((psucc_q(&e, &m2).unwrap() - q).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn diamond_norm_brackets_the_dual_pairing(seed in any::<u64>()) {
        let a = random_channel(2, 2, 2, seed);
        let b = random_channel(2, 2, 1, seed.wrapping_add(1));
        let d = a.sub(&b).unwrap();
        let v = diamond_norm(&d, 1e-8).unwrap();
        // the two programs agree up to solver accuracy
        prop_assert!(v.lower <= v.upper + 1e-7 && v.width() < 1e-6);
        // any state gives ⟨ρ, Δ⟩ ≤ ‖Δ‖◇ ‖ρ‖◇*
        let mut rng = random::rng(seed);
        let rho = random::density_matrix(&mut rng, 4, 2);
        let n = dual_diamond_norm(&rho, &sd(&[("A0", 2), ("A1", 2)]), &["A0"], 1e-8).unwrap();
        prop_assert!(pairing(&rho, &d).unwrap() <= v.value * n.value + 1e-6);
    }

    #[test]
    fn conversions_never_exceed_the_diamond_distance(seed in any::<u64>()) {
        let a = random_channel(2, 2, 2, seed);
        let b = random_channel(2, 2, 2, seed.wrapping_add(7));
        let dd = diamond_norm(&a.sub(&b).unwrap(), 1e-8).unwrap().value;
        prop_assert!(delta_post(&a, &b, 1e-8).unwrap().delta.value <= dd + 1e-6);
        prop_assert!(delta_pre(&a, &b, 1e-8).unwrap().delta.value <= dd + 1e-6);
    }

    #[test]
    fn deficiency_bounded_by_identity_randomization(seed in any::<u64>(), k in 1usize..4, m in 2usize..5) {
        let mut rng = random::rng(seed);
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            Experiment::new((0..k).map(|_| {
                let mut v = random::dirichlet(rng, m);
                let s: f64 = v[..m - 1].iter().sum();
                v[m - 1] = (1.0 - s).max(0.0);
                v
            }).collect()).unwrap()
        };
        let (p, q) = (mk(&mut rng), mk(&mut rng));
        let l1 = p.dists().iter().zip(q.dists())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        prop_assert!(lecam_deficiency(&p, &q, 1e-9).unwrap().delta.value <= l1 + 1e-8);
    }
}
