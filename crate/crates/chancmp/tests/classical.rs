use chancmp::classical::*;
use chancmp::random;
use rand::Rng;

const TOL: f64 = 1e-9;

fn exp(v: &[&[f64]]) -> Experiment {
    Experiment::new(v.iter().map(|p| p.to_vec()).collect()).unwrap()
}

fn random_experiment(rng: &mut impl Rng, k: usize, m: usize) -> Experiment {
    let dists = (0..k)
        .map(|_| {
            let v: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s: f64 = v.iter().sum();
            v.into_iter().map(|x| x / s).collect::<Vec<_>>()
        })
        .collect();
    Experiment::new(dists).unwrap()
}

fn random_stochastic(rng: &mut impl Rng, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    let mut t: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen::<f64>()).collect()).collect();
    for a in 0..cols {
        let s: f64 = t.iter().map(|r| r[a]).sum();
        t.iter_mut().for_each(|r| r[a] /= s);
    }
    t
}

#[test]
fn dirac_and_uniform_pairs() {
    let dirac = exp(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let uniform = exp(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let fwd = lecam_deficiency(&dirac, &uniform, TOL).unwrap();
    assert!(fwd.delta.value.abs() < 1e-8, "{:?}", fwd.delta);
    assert!(fwd.achieved < 1e-8);
    let back = lecam_deficiency(&uniform, &dirac, TOL).unwrap();
    assert!((back.delta.value - 1.0).abs() < 1e-8, "{:?}", back.delta);
    assert!((lecam_distance(&dirac, &uniform, TOL).unwrap().value - 1.0).abs() < 1e-8);
}

#[test]
fn exact_randomizations_and_simple_bounds() {
    let mut rng = random::rng(40);
    for _ in 0..10 {
        let p = random_experiment(&mut rng, 3, 4);
        let t0 = random_stochastic(&mut rng, 3, 4);
        let q = p.randomize(&t0).unwrap();
        assert!(lecam_deficiency(&p, &q, TOL).unwrap().delta.value < 1e-8);
        assert!(lecam_deficiency(&p, &p, TOL).unwrap().delta.value < 1e-8);

        let r = random_experiment(&mut rng, 3, 4);
        let d = lecam_deficiency(&p, &r, TOL).unwrap();
        let l1 = p
            .dists()
            .iter()
            .zip(r.dists())
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        assert!(d.delta.value <= l1 + 1e-8);
        assert!((d.achieved - d.delta.value).abs() < 1e-7);
    }
}

#[test]
fn duplicated_coordinate_is_sufficient() {
    let mut rng = random::rng(41);
    for _ in 0..5 {
        let p = random_experiment(&mut rng, 2, 3);
        let q = random_experiment(&mut rng, 2, 3);
        // split the last point of p into two halves
        let split = |e: &Experiment| {
            Experiment::new(
                e.dists()
                    .iter()
                    .map(|v| {
                        let mut w = v.clone();
                        let last = w.pop().unwrap();
                        w.extend([0.5 * last, 0.5 * last]);
                        w
                    })
                    .collect(),
            )
            .unwrap()
        };
        let ps = split(&p);
        let a = lecam_deficiency(&p, &q, TOL).unwrap().delta.value;
        let b = lecam_deficiency(&ps, &q, TOL).unwrap().delta.value;
        let c = lecam_deficiency(&q, &p, TOL).unwrap().delta.value;
        let e = lecam_deficiency(&q, &ps, TOL).unwrap().delta.value;
        assert!((a - b).abs() < 1e-8 && (c - e).abs() < 1e-8, "{a} {b} {c} {e}");
    }
}

#[test]
fn distance_triangle_inequality() {
    let mut rng = random::rng(42);
    for _ in 0..5 {
        let e: Vec<_> = (0..3).map(|_| random_experiment(&mut rng, 2, 3)).collect();
        let d = |i: usize, j: usize| lecam_distance(&e[i], &e[j], TOL).unwrap().value;
        assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-8);
        assert!((d(0, 1) - d(1, 0)).abs() < 1e-8);
    }
}

#[test]
fn indicator_gain_is_the_bayes_success_probability() {
    let mut rng = random::rng(43);
    for _ in 0..5 {
        let p = random_experiment(&mut rng, 3, 4);
        let lam = random_experiment(&mut rng, 1, 3).dists()[0].clone();
        let g: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|d| f64::from(u8::from(i == d))).collect()).collect();
        let lp = max_gain(&p, &lam, &g, TOL).unwrap().value;
        let closed: f64 = (0..4).map(|x| (0..3).map(|i| lam[i] * p.dists()[i][x]).fold(0.0, f64::max)).sum();
        assert!((lp - closed).abs() < 1e-8, "{lp} vs {closed}");
        assert!((bayes_gain(&p, &lam, &g).unwrap() - closed).abs() < 1e-12);
    }
}

#[test]
fn randomization_criterion_at_the_deficiency() {
    let mut rng = random::rng(44);
    let p = random_experiment(&mut rng, 3, 3);
    let q = random_experiment(&mut rng, 3, 4);
    let eps = lecam_deficiency(&p, &q, TOL).unwrap().delta.value;
    for _ in 0..10 {
        let g: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.gen::<f64>()).collect()).collect();
        let lam = random_experiment(&mut rng, 1, 3).dists()[0].clone();
        let r = gain_check(&p, &q, eps, &g, &lam, TOL).unwrap();
        assert!(r.holds, "{r:?}");
        let same = gain_check(&p, &p, 0.0, &g, &lam, TOL).unwrap();
        assert!(same.holds && same.gap.abs() < 1e-7);
    }
}

#[test]
fn rejects_bad_input() {
    assert!(Experiment::new(vec![vec![0.5, 0.6]]).is_err());
    assert!(Experiment::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
    let p = exp(&[&[1.0, 0.0]]);
    let q = exp(&[&[1.0, 0.0], &[0.0, 1.0]]);
    assert!(lecam_deficiency(&p, &q, TOL).is_err());
}
