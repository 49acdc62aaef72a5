use chancmp::linalg::*;
use chancmp::{random, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ket(v: &[f64]) -> CMatrix {
    CMatrix::column(&v.iter().map(|x| c(*x)).collect::<Vec<_>>())
}

fn two(a: &str, b: &str, da: usize, db: usize) -> SystemDims {
    SystemDims::new([(a, da), (b, db)]).unwrap()
}

#[test]
fn kron_small_cases() {
    assert_eq!(kron(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
    let k = kron(&CMatrix::diag(&[1.0, 2.0]), &CMatrix::diag(&[3.0, 4.0]));
    assert_eq!(k, CMatrix::diag(&[3.0, 4.0, 6.0, 8.0]));
    let p0 = CMatrix::projector(&ket(&[1.0, 0.0]));
    let p1 = CMatrix::projector(&ket(&[0.0, 1.0]));
    assert_eq!(kron(&p0, &p1), CMatrix::projector(&CMatrix::basis(4, 1)));
}

#[test]
fn partial_trace_against_index_loops() {
    let mut rng = random::rng(1);
    let dims = two("A", "B", 2, 3);
    let x = random::density_matrix(&mut rng, 6, 6);
    let (ta, _) = partial_trace(&x, &dims, &["B"]).unwrap();
    let (tb, _) = partial_trace(&x, &dims, &["A"]).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let s: C64 = (0..3).map(|k| x[(i * 3 + k, j * 3 + k)]).sum();
            assert!((ta[(i, j)] - s).norm() < 1e-12);
        }
    }
    for i in 0..3 {
        for j in 0..3 {
            let s: C64 = (0..2).map(|k| x[(k * 3 + i, k * 3 + j)]).sum();
            assert!((tb[(i, j)] - s).norm() < 1e-12);
        }
    }
    let (m, rest) = partial_trace(&max_entangled(2), &two("A", "B", 2, 2), &["A"]).unwrap();
    assert!(m.dist(&CMatrix::identity(2).scale(0.5)) < 1e-12);
    assert_eq!(rest.labels(), vec!["B"]);
    assert!(partial_trace(&x, &dims, &["C"]).is_err());
}

#[test]
fn partial_transpose_cases() {
    let mut rng = random::rng(2);
    let dims = two("A", "B", 2, 2);
    let (r, s) = (random::mixed_state(&mut rng, 2), random::mixed_state(&mut rng, 2));
    let t = partial_transpose(&kron(&r, &s), &dims, &["B"]).unwrap();
    assert!(t.dist(&kron(&r, &s.transpose())) < 1e-14);
    let x = random::hermitian(&mut rng, 4);
    let back = partial_transpose(&partial_transpose(&x, &dims, &["A"]).unwrap(), &dims, &["A"]).unwrap();
    assert!(back.dist(&x) < 1e-14);
    let (ev, _) = herm_eig(&partial_transpose(&max_entangled(2), &dims, &["B"]).unwrap()).unwrap();
    for (a, b) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
        assert!((a - b).abs() < 1e-12, "{ev:?}");
    }
}

#[test]
fn permutations() {
    let mut rng = random::rng(3);
    let dims = two("A", "B", 2, 3);
    let (r, s) = (random::mixed_state(&mut rng, 2), random::mixed_state(&mut rng, 3));
    let x = kron(&r, &s);
    let (same, _) = permute_systems(&x, &dims, &["A", "B"]).unwrap();
    assert_eq!(same, x);
    let (sw, d) = permute_systems(&x, &dims, &["B", "A"]).unwrap();
    assert!(sw.dist(&kron(&s, &r)) < 1e-14);
    let (back, _) = permute_systems(&sw, &d, &["A", "B"]).unwrap();
    assert!(back.dist(&x) < 1e-14);
    assert!(permute_systems(&x, &dims, &["A"]).is_err());
}

#[test]
fn doubleket() {
    let i2 = vec_doubleket(&CMatrix::identity(2));
    assert_eq!(i2, ket(&[1.0, 0.0, 0.0, 1.0]));
    let e01 = CMatrix::basis(2, 0).mul(&CMatrix::basis(2, 1).adjoint());
    assert_eq!(vec_doubleket(&e01), ket(&[0.0, 1.0, 0.0, 0.0]));
    let mut rng = random::rng(4);
    let w = random::gaussian(&mut rng, 3, 3);
    let ii = vec_doubleket(&CMatrix::identity(3));
    assert!(vec_doubleket(&w).dist(&kron(&w, &CMatrix::identity(3)).mul(&ii)) < 1e-12);
    assert!(kron(&w, &CMatrix::identity(3)).mul(&ii).dist(&kron(&CMatrix::identity(3), &w.transpose()).mul(&ii)) < 1e-12);
}

#[test]
fn eigendecomposition() {
    let (ev, _) = herm_eig(&CMatrix::diag(&[3.0, -1.0, 2.0])).unwrap();
    assert_eq!(ev, vec![-1.0, 2.0, 3.0]);
    let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let (ev, _) = herm_eig(&x).unwrap();
    assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    let mut rng = random::rng(5);
    for n in [1, 2, 5, 9, 16] {
        let h = random::hermitian(&mut rng, n);
        let (ev, v) = herm_eig(&h).unwrap();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let back = v.mul(&CMatrix::diag(&ev)).mul(&v.adjoint());
        assert!(back.dist(&h) < 1e-9 * op_norm(&h).unwrap().max(1.0));
    }
    assert!(herm_eig(&CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap()).is_err());
}

#[test]
fn norms_and_fidelities() {
    let p0 = CMatrix::projector(&ket(&[1.0, 0.0]));
    let p1 = CMatrix::projector(&ket(&[0.0, 1.0]));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CMatrix::projector(&ket(&[s, s]));
    assert!((fidelity(&p0, &p0).unwrap() - 1.0).abs() < 1e-12);
    assert!(purified_distance(&p0, &p0).unwrap().abs() < 1e-6);
    assert!(fidelity(&p0, &p1).unwrap().abs() < 1e-12);
    assert!((purified_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-12);
    assert!((fidelity(&p0, &plus).unwrap() - s).abs() < 1e-12);
    assert!((purified_distance(&p0, &plus).unwrap() - s).abs() < 1e-12);

    let mut rng = random::rng(6);
    for _ in 0..10 {
        let h = random::hermitian(&mut rng, 4);
        assert!(trace_norm(&h).unwrap() >= op_norm(&h).unwrap() - 1e-12);
        let v = random::pure_state(&mut rng, 4);
        let r1 = CMatrix::projector(&v).scale(-2.5);
        assert!((trace_norm(&r1).unwrap() - 2.5).abs() < 1e-10);
        assert!((op_norm(&r1).unwrap() - 2.5).abs() < 1e-10);
    }
}
