use chancmp::conic::model::{HermitianMode, Model};
use chancmp::conic::{embed_hermitian, read_dump, solve, write_dump, Cone, ConicProblem, Sense, Status};
use chancmp::linalg::{herm_eig, max_eig, singular_values};
use chancmp::{random, CMatrix, C64};
use rand::Rng;

fn lambda_max_problem(c: &[f64], n: usize) -> ConicProblem {
    let mut p = ConicProblem::new(Sense::Maximize, vec![Cone::Psd(n)]);
    for i in 0..n {
        for j in i..n {
            let v = p.psd_var(0, i, j);
            p.set_objective(v, ConicProblem::psd_coef(i, j, c[i * n + j]));
        }
    }
    let diag: Vec<(usize, f64)> = (0..n).map(|i| (p.psd_var(0, i, i), 1.0)).collect();
    p.add_row(diag, 1.0);
    p
}

#[test]
fn real_lambda_max() {
    let mut rng = random::rng(1);
    for n in 1..7 {
        let mut c = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.gen_range(-1.0..1.0);
                c[i * n + j] = v;
                c[j * n + i] = v;
            }
        }
        let sol = solve(&lambda_max_problem(&c, n), 1e-9);
        assert_eq!(sol.status, Status::Optimal);
        let (ev, _) = herm_eig(&CMatrix::from_real(n, n, &c).unwrap()).unwrap();
        assert!((sol.value() - ev[n - 1]).abs() < 1e-7, "{} vs {}", sol.value(), ev[n - 1]);
    }
}

#[test]
fn complex_lambda_max_both_modes() {
    let mut rng = random::rng(2);
    for mode in [HermitianMode::Projected, HermitianMode::Constrained] {
        for d in 1..6 {
            let h = random::hermitian(&mut rng, d);
            let mut m = Model::with_mode(mode);
            let x = m.herm_psd(d);
            m.eq(x.trace(), 1.0);
            m.maximize(x.inner(&h));
            let sol = m.solve(1e-9).unwrap();
            let want = max_eig(&h).unwrap();
            assert!((sol.value() - want).abs() < 1e-7, "{mode:?} d={d}: {} vs {want}", sol.value());
        }
    }
}

#[test]
fn simplex_lp() {
    let mut rng = random::rng(3);
    for k in 1..10 {
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut p = ConicProblem::new(Sense::Minimize, vec![Cone::Nonneg(k)]);
        for (i, ci) in c.iter().enumerate() {
            p.set_objective(i, *ci);
        }
        p.add_row((0..k).map(|i| (i, 1.0)).collect(), 1.0);
        let sol = solve(&p, 1e-9);
        assert_eq!(sol.status, Status::Optimal);
        let want = c.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((sol.value() - want).abs() < 1e-7);
    }
}

#[test]
fn trace_norm_sdp() {
    let mut rng = random::rng(4);
    for d in 1..5 {
        let x = random::gaussian(&mut rng, d, d);
        let mut m = Model::new();
        let y = m.herm_psd(2 * d);
        // top-right block equals x
        for i in 0..d {
            for j in 0..d {
                let e = y.entry(i, d + j);
                m.eq(e.re(), x[(i, j)].re);
                m.eq(e.im(), x[(i, j)].im);
            }
        }
        m.minimize(y.trace() * 0.5);
        let sol = m.solve(1e-9).unwrap();
        let want: f64 = singular_values(&x).iter().sum();
        assert!((sol.value() - want).abs() < 1e-6, "{} vs {want}", sol.value());
    }
}

#[test]
fn pauli_y_embedding() {
    let y = CMatrix::from_rows(&[
        vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
    .unwrap();
    let e = embed_hermitian(&y).unwrap();
    let (ev, _) = herm_eig(&CMatrix::from_real(4, 4, &e).unwrap()).unwrap();
    for (a, b) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
        assert!((a - b).abs() < 1e-12);
    }
    let (hv, _) = herm_eig(&y).unwrap();
    assert_eq!(hv.len(), 2);
}

#[test]
fn infeasible_and_unbounded() {
    // x >= 0, x0 + x1 = -1
    let mut p = ConicProblem::new(Sense::Minimize, vec![Cone::Nonneg(2)]);
    p.add_row(vec![(0, 1.0), (1, 1.0)], -1.0);
    assert_eq!(solve(&p, 1e-8).status, Status::Infeasible);

    // min -x0 s.t. x0 - x1 = 0
    let mut p = ConicProblem::new(Sense::Minimize, vec![Cone::Nonneg(2)]);
    p.set_objective(0, -1.0);
    p.add_row(vec![(0, 1.0), (1, -1.0)], 0.0);
    assert_eq!(solve(&p, 1e-8).status, Status::Unbounded);
}

#[test]
fn free_variables_and_redundant_rows() {
    // min t s.t. t - x0 = 0, x0 + x1 = 2, 2x0 + 2x1 = 4, t free, x >= 0
    let mut p = ConicProblem::new(Sense::Minimize, vec![Cone::Free(1), Cone::Nonneg(2)]);
    p.set_objective(0, 1.0);
    p.add_row(vec![(0, 1.0), (1, -1.0)], 0.0);
    p.add_row(vec![(1, 1.0), (2, 1.0)], 2.0);
    p.add_row(vec![(1, 2.0), (2, 2.0)], 4.0);
    let sol = solve(&p, 1e-9);
    assert_eq!(sol.status, Status::Optimal);
    assert!(sol.value().abs() < 1e-7);
}

#[test]
fn dump_round_trip() {
    let mut c = vec![0.0; 9];
    c[1] = 1.0;
    c[3] = 1.0;
    c[8] = 0.5;
    let mut p = lambda_max_problem(&c, 3);
    let text = write_dump(&p);
    let q = read_dump(&text).unwrap();
    assert_eq!(q.num_rows(), p.num_rows());
    let (a, b) = (solve(&p, 1e-9), solve(&q, 1e-9));
    assert!((a.value() - b.value()).abs() < 1e-9);
    let v = p.psd_var(0, 2, 2);
    p.set_objective(v, 0.0);
    assert_ne!(write_dump(&p), text);
}
