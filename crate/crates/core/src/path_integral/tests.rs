use super::*;
use std::f64::consts::PI;

fn lat(x_min: f64, x_max: f64, n_points: usize, t: f64, slices: usize) -> PathLattice {
    PathLattice {
        x_min,
        x_max,
        n_points,
        t_in: 0.0,
        t_out: t,
        slices,
    }
}

fn harmonic(signature: Signature, omega: f64) -> ParticleModel {
    ParticleModel {
        potential: Potential::Harmonic { omega },
        ..ParticleModel::free(signature)
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

#[test]
fn kernel_examples() {
    let lor = ParticleModel::free(Signature::Lorentzian);
    let k = short_time_kernel(&lor, 0.0, 0.0, 1.0).unwrap();
    let expect = Complex64::new(1.0, 0.0) / (Complex64::new(0.0, 2.0 * PI)).sqrt();
    assert!(close(k, expect, 1e-15));
    let euc = ParticleModel::free(Signature::Euclidean);
    let k = short_time_kernel(&euc, 1.0, 0.0, 1.0).unwrap();
    assert!((k.re - (2.0 * PI).powf(-0.5) * (-0.5f64).exp()).abs() < 1e-15 && k.im == 0.0);
    let h = harmonic(Signature::Lorentzian, 1.0);
    assert_eq!(short_time_kernel(&h, 0.0, 0.0, 0.3).unwrap(), short_time_kernel(&lor, 0.0, 0.0, 0.3).unwrap());
    assert!(matches!(short_time_kernel(&lor, 0.0, 0.0, 0.0), Err(PathError::TimeStep(_))));
}

#[test]
fn lattice_validation() {
    assert!(lat(1.0, 0.0, 5, 1.0, 3).validate().is_err());
    assert!(lat(0.0, 1.0, 2, 1.0, 3).validate().is_err());
    assert!(lat(0.0, 1.0, 5, 1.0, 1).validate().is_err());
    let l = lat(-2.0, 2.0, 5, 3.0, 4);
    assert_eq!((l.dx(), l.dt()), (1.0, 1.0));
    assert_eq!(l.index_of(1.0).unwrap(), 3);
    assert!(l.index_of(0.5).is_err());
}

#[test]
fn two_slices_is_one_kernel() {
    let m = ParticleModel::free(Signature::Euclidean);
    let l = lat(-1.0, 1.0, 5, 0.5, 2);
    let p = propagate(&m, &l, Default::default()).unwrap();
    let k = short_time_kernel(&m, 0.5, -1.0, 0.5).unwrap();
    assert_eq!(p.at(0.5, -1.0).unwrap(), k);
    assert_eq!(brute_force_path_sum(&m, &l, -1.0, 0.5).unwrap(), k);
}

#[test]
fn oracle_equivalence() {
    // both lattices pass the aliasing guard
    for l in &[lat(-2.0, 2.0, 5, 3.0, 3), lat(-3.0, 3.0, 7, 6.0, 4)] {
        for m in [
            ParticleModel::free(Signature::Lorentzian),
            harmonic(Signature::Lorentzian, 0.7),
            ParticleModel::free(Signature::Euclidean),
            harmonic(Signature::Euclidean, 0.7),
        ] {
            let p = propagate(&m, l, Default::default()).unwrap();
            for &a in &l.positions() {
                for &b in &l.positions() {
                    let bf = brute_force_path_sum(&m, l, a, b).unwrap();
                    assert!(close(p.at(b, a).unwrap(), bf, 1e-12), "{a} {b}");
                }
            }
        }
    }
}

#[test]
fn nyquist_guard() {
    let m = ParticleModel::free(Signature::Lorentzian);
    let l = lat(-8.0, 8.0, 257, 1.0, 64);
    assert!((nyquist_ratio(&m, &l) - 63.0).abs() < 1e-9);
    assert!(matches!(propagate(&m, &l, Default::default()), Err(PathError::Unstable { .. })));
    // the Euclidean kernel never aliases
    assert!(propagate(&ParticleModel::free(Signature::Euclidean), &lat(-1.0, 1.0, 9, 1.0, 3), Default::default()).is_ok());
}

#[test]
fn brute_force_budget() {
    let m = ParticleModel::free(Signature::Euclidean);
    let l = lat(-1.0, 1.0, 101, 1.0, 6);
    assert!(matches!(brute_force_path_sum(&m, &l, 0.0, 0.0), Err(PathError::Budget { .. })));
}

#[test]
fn euclidean_rows_conserve_mass() {
    let m = ParticleModel::free(Signature::Euclidean);
    let l = lat(-10.0, 10.0, 201, 1.0, 5);
    let p = propagate(&m, &l, Default::default()).unwrap();
    for j in 0..l.n_points {
        if l.x(j).abs() > 3.0 {
            continue;
        }
        let s: f64 = (0..l.n_points).map(|i| p.matrix[(i, j)].re).sum::<f64>() * l.dx();
        assert!((s - 1.0).abs() < 1e-6, "{} {s}", l.x(j));
    }
}

#[test]
fn euclidean_is_real_positive_symmetric() {
    let m = harmonic(Signature::Euclidean, 1.3);
    let l = lat(-2.0, 2.0, 21, 1.0, 6);
    let k = propagate(&m, &l, Default::default()).unwrap().matrix;
    for i in 0..21 {
        for j in 0..21 {
            assert_eq!(k[(i, j)].im, 0.0);
            assert!(k[(i, j)].re > 0.0);
            assert!((k[(i, j)].re - k[(j, i)].re).abs() <= 1e-14 * k[(i, j)].re);
        }
    }
}

#[test]
fn composition() {
    // dt = 0.5 on both halves
    let m = harmonic(Signature::Lorentzian, 0.5);
    let (x0, x1, n) = (-1.5, 1.5, 7);
    let first = lat(x0, x1, n, 1.0, 3);
    let second = PathLattice { t_in: 1.0, t_out: 2.5, slices: 4, ..first.clone() };
    let whole = lat(x0, x1, n, 2.5, 6);
    let (k1, k2, k) = (
        propagate(&m, &first, Default::default()).unwrap().matrix,
        propagate(&m, &second, Default::default()).unwrap().matrix,
        propagate(&m, &whole, Default::default()).unwrap().matrix,
    );
    let glued = &k2 * &k1 * Complex64::new(first.dx(), 0.0);
    assert!((glued - k).iter().all(|z| z.norm() < 1e-10));
}

#[test]
fn free_phase_is_classical_action() {
    // single slice: the kernel is exact, so phase - prefactor phase = S_cl / hbar
    let m = ParticleModel { hbar: 0.7, ..ParticleModel::free(Signature::Lorentzian) };
    let l = lat(-1.0, 1.0, 3, 1.0, 2);
    let k = propagate(&m, &l, Default::default()).unwrap().at(1.0, -1.0).unwrap();
    let cl = classical_path(&m, &l, -1.0, 1.0).unwrap();
    let phase = (k * Complex64::from_polar(1.0, PI / 4.0)).arg();
    let want = (cl.action / m.hbar).rem_euclid(2.0 * PI);
    let got = phase.rem_euclid(2.0 * PI);
    assert!((got - want).abs() < 1e-12);
    let exact = free_propagator_exact(1.0, 0.7, 1.0, 1.0, -1.0);
    assert!(close(k, exact, 1e-12));
}

#[test]
fn classical_path_examples() {
    let l = lat(-2.0, 2.0, 5, 3.0, 7);
    let free = ParticleModel::free(Signature::Euclidean);
    let p = classical_path(&free, &l, -2.0, 1.0).unwrap();
    for (k, x) in p.positions.iter().enumerate() {
        assert!((x - (-2.0 + 3.0 * k as f64 / 6.0)).abs() < 1e-12);
    }
    for sig in [Signature::Euclidean, Signature::Lorentzian] {
        let h = classical_path(&harmonic(sig, 1.0), &l, 0.0, 0.0).unwrap();
        assert!(h.positions.iter().all(|x| x.abs() < 1e-15));
        assert_eq!(h.action, 0.0);
    }
}

#[test]
fn harmonic_matches_sinusoid() {
    let omega = 1.0;
    let t = 1.5;
    let m = harmonic(Signature::Lorentzian, omega);
    let (a, b) = (-1.0, 2.0);
    let mut errs = Vec::new();
    for slices in [21, 41, 81] {
        let l = lat(-2.0, 2.0, 13, t, slices);
        let p = classical_path(&m, &l, a, b).unwrap();
        let err = p
            .times
            .iter()
            .zip(&p.positions)
            .map(|(&s, x)| {
                let exact = (a * (omega * (t - s)).sin() + b * (omega * s).sin()) / (omega * t).sin();
                (x - exact).abs()
            })
            .fold(0.0, f64::max);
        let dt = l.dt();
        assert!(err < dt * dt, "{slices} {err}");
        errs.push(err);
    }
    // second order: halving dt quarters the error
    assert!(errs[1] < errs[0] / 3.0 && errs[2] < errs[1] / 3.0);
}

#[test]
fn tabulated_harmonic_matches_linear_solve() {
    let l = lat(-2.0, 2.0, 401, 1.0, 11);
    let xs = l.positions();
    let tab = ParticleModel {
        potential: Potential::Tabulated {
            x_min: -2.0,
            x_max: 2.0,
            values: xs.iter().map(|x| 0.5 * x * x).collect(),
        },
        ..ParticleModel::free(Signature::Euclidean)
    };
    let exact = classical_path(&harmonic(Signature::Euclidean, 1.0), &l, -1.0, 1.5).unwrap();
    let approx = classical_path(&tab, &l, -1.0, 1.5).unwrap();
    for (a, b) in exact.positions.iter().zip(&approx.positions) {
        assert!((a - b).abs() < 1e-3);
    }
    let short = ParticleModel {
        potential: Potential::Tabulated { x_min: -1.0, x_max: 2.0, values: vec![0.0; 4] },
        ..tab.clone()
    };
    assert!(matches!(short.validate(&l), Err(PathError::Model(_))));
}

fn frozen() -> (ParticleModel, PathLattice) {
    (ParticleModel::free(Signature::Euclidean), lat(-2.0, 2.0, 5, 3.0, 4))
}

/// Direct enumeration of the 25 interior paths of the frozen instance.
fn frozen_oracle(hbar: f64) -> f64 {
    let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let cl = [-2.0, -2.0 / 3.0, 2.0 / 3.0, 2.0];
    let (mut inside, mut all) = (0.0, 0.0);
    for &a in &xs {
        for &b in &xs {
            let s = 0.5 * ((a + 2.0f64).powi(2) + (b - a).powi(2) + (2.0 - b).powi(2));
            let w = (-(s - 4.0 / 3.0) / hbar).exp();
            all += w;
            if (a - cl[1]).abs() <= 1.0 && (b - cl[2]).abs() <= 1.0 {
                inside += w;
            }
        }
    }
    inside / all
}

#[test]
fn concentration_exact_instance() {
    let (m, l) = frozen();
    let hbars = [1e9, 1.0, 0.5, 0.25, 0.1];
    let rows = concentration_profile(&m, &l, -2.0, 2.0, 1.0, &hbars, &Default::default()).unwrap();
    for r in &rows {
        assert_eq!(r.method, ConcentrationMethod::Exact);
        assert!((r.fraction - frozen_oracle(r.hbar)).abs() < 1e-12);
    }
    assert!((rows[0].fraction - 4.0 / 25.0).abs() < 1e-6);
    for w in rows.windows(2) {
        assert!(w[1].fraction > w[0].fraction);
    }
    let wide = concentration_profile(&m, &l, -2.0, 2.0, 4.0, &[1.0], &Default::default()).unwrap();
    assert_eq!(wide[0].fraction, 1.0);
}

#[test]
fn concentration_rejects_lorentzian() {
    let l = frozen().1;
    let m = ParticleModel::free(Signature::Lorentzian);
    assert!(concentration_profile(&m, &l, -2.0, 2.0, 1.0, &[1.0], &Default::default()).is_err());
}

#[test]
fn metropolis_agrees_with_enumeration() {
    let m = ParticleModel::free(Signature::Euclidean);
    let l = lat(-3.0, 3.0, 13, 3.0, 5);
    let exact = concentration_profile(&m, &l, -1.0, 1.0, 0.5, &[0.5, 1.0], &Default::default()).unwrap();
    let opts = ConcentrationOptions {
        method: ConcentrationMethod::Metropolis,
        metropolis: MetropolisOptions { seed: 3, chains: 4, sweeps: 40_000, burn_in: 2_000, rhat_max: 1.05 },
        ..Default::default()
    };
    let mc = concentration_profile(&m, &l, -1.0, 1.0, 0.5, &[0.5, 1.0], &opts).unwrap();
    for (e, s) in exact.iter().zip(&mc) {
        assert!(s.rhat.unwrap() <= 1.05);
        assert!((e.fraction - s.fraction).abs() < 5.0 * s.stderr + 1e-3, "{e:?} {s:?}");
    }
    let again = concentration_profile(&m, &l, -1.0, 1.0, 0.5, &[0.5, 1.0], &opts).unwrap();
    assert_eq!(mc, again);
}
