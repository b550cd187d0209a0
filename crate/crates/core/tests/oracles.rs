//! Independent oracles: nalgebra SVD, a direct joint-observable search,
//! a grid search for incompatibility, distribution tests for the state
//! sampler and reduced W-state spectra.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};
use qnib::bell::correlation_tensor;
use qnib::channels::QubitChannel;
use qnib::compat::{
    biased_criterion_margin, incompatibility_grid_search, is_2ibc_unital, jointly_measurable,
    UnsharpObservable,
};
use qnib::experiments::item_rng;
use qnib::qmat::{singular_values_3x9, RMat3x9};
use qnib::states::{make_state, partial_trace, random_mixed_state, sample_acin_with, StateSpec};
use qnib::verify::random_unital_cp;
use rand::Rng;

fn nalgebra_singular_values(m: &RMat3x9) -> Vec<f64> {
    let d = DMatrix::from_fn(3, 9, |r, c| m.entries[r][c]);
    let mut s: Vec<f64> = d
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

#[test]
fn singular_values_match_nalgebra_on_random_matrices() {
    let mut rng = item_rng(17, 0);
    for _ in 0..500 {
        let mut m = RMat3x9::zeros();
        for row in m.entries.iter_mut() {
            for x in row.iter_mut() {
                *x = rng.random_range(-2.0..2.0);
            }
        }
        let ours = singular_values_3x9(&m);
        let theirs = nalgebra_singular_values(&m);
        for k in 0..3 {
            assert!(
                (ours[k] - theirs[k]).abs() < 1e-10,
                "{ours:?} vs {theirs:?}"
            );
        }
    }
}

#[test]
fn singular_values_match_nalgebra_on_state_tensors() {
    let mut rng = item_rng(18, 0);
    for i in 0..200 {
        let rho = if i % 2 == 0 {
            make_state(&sample_acin_with(&mut rng)).unwrap()
        } else {
            random_mixed_state(&mut rng, 3)
        };
        let t = correlation_tensor(&rho).unwrap();
        let ours = t.singular_values();
        let theirs = nalgebra_singular_values(&t.flatten());
        for k in 0..3 {
            assert!((ours[k] - theirs[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn degenerate_singular_values_match_nalgebra() {
    for spec in [
        StateSpec::ghz_symmetric(),
        StateSpec::w_symmetric(),
        StateSpec::MixedGhz { p: 0.5 },
    ] {
        let t = correlation_tensor(&make_state(&spec).unwrap()).unwrap();
        let theirs = nalgebra_singular_values(&t.flatten());
        let ours = t.singular_values();
        for k in 0..3 {
            assert!((ours[k] - theirs[k]).abs() < 1e-10, "{spec}");
        }
    }
}

#[test]
fn two_qubit_correlation_svd_matches_nalgebra() {
    let mut rng = item_rng(19, 0);
    for _ in 0..100 {
        let rho = random_mixed_state(&mut rng, 2);
        let t = qnib::bell::correlation_matrix(&rho).unwrap();
        let m = Matrix3::from_fn(|r, c| t[r][c]);
        let mut s: Vec<f64> = m
            .svd(false, false)
            .singular_values
            .iter()
            .cloned()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        let chsh = qnib::bell::chsh_max(&rho).unwrap();
        assert!((chsh - 2.0 * (s[0] * s[0] + s[1] * s[1]).sqrt()).abs() < 1e-10);
    }
}

// --- joint observable search -------------------------------------------

/// Smallest `c₀ − |c⃗|` over the four marginal-consistency operators of a
/// candidate `G(+,+) = g₀I + g⃗·σ`; a joint observable exists iff the
/// maximum over `g` is ≥ 0.
fn joint_margin(a: &UnsharpObservable, b: &UnsharpObservable, g: [f64; 4]) -> f64 {
    let (x, av) = (a.bias(), a.sharpness_vector());
    let (y, bv) = (b.bias(), b.sharpness_vector());
    let gv = [g[1], g[2], g[3]];
    let norm = |v: [f64; 3]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let sub = |p: [f64; 3], q: [f64; 3]| [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    let half = |v: [f64; 3]| v.map(|t| 0.5 * t);
    let ab = [
        0.5 * (av[0] + bv[0]),
        0.5 * (av[1] + bv[1]),
        0.5 * (av[2] + bv[2]),
    ];
    [
        g[0] - norm(gv),
        0.5 * (1.0 + x) - g[0] - norm(sub(half(av), gv)),
        0.5 * (1.0 + y) - g[0] - norm(sub(half(bv), gv)),
        g[0] - 0.5 * (x + y) - norm(sub(gv, ab)),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min)
}

/// Nelder–Mead maximization of the concave margin, best of a few starts.
fn best_joint_margin(a: &UnsharpObservable, b: &UnsharpObservable, rng: &mut impl Rng) -> f64 {
    let f = |g: &[f64; 4]| -joint_margin(a, b, *g);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..6 {
        let start: [f64; 4] = [
            rng.random_range(0.0..0.5),
            rng.random_range(-0.25..0.25),
            rng.random_range(-0.25..0.25),
            rng.random_range(-0.25..0.25),
        ];
        let mut simplex: Vec<[f64; 4]> = vec![start];
        for k in 0..4 {
            let mut p = start;
            p[k] += 0.1;
            simplex.push(p);
        }
        let mut vals: Vec<f64> = simplex.iter().map(f).collect();
        for _ in 0..4000 {
            let mut idx: Vec<usize> = (0..5).collect();
            idx.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
            simplex = idx.iter().map(|&i| simplex[i]).collect();
            vals = idx.iter().map(|&i| vals[i]).collect();
            if vals[4] - vals[0] < 1e-14 {
                break;
            }
            let mut c = [0.0; 4];
            for p in &simplex[..4] {
                for k in 0..4 {
                    c[k] += p[k] / 4.0;
                }
            }
            let along =
                |t: f64| -> [f64; 4] { std::array::from_fn(|k| c[k] + t * (simplex[4][k] - c[k])) };
            let r = along(-1.0);
            let fr = f(&r);
            if fr < vals[0] {
                let e = along(-2.0);
                let fe = f(&e);
                if fe < fr {
                    simplex[4] = e;
                    vals[4] = fe;
                } else {
                    simplex[4] = r;
                    vals[4] = fr;
                }
            } else if fr < vals[3] {
                simplex[4] = r;
                vals[4] = fr;
            } else {
                let k = along(0.5);
                let fk = f(&k);
                if fk < vals[4] {
                    simplex[4] = k;
                    vals[4] = fk;
                } else {
                    for i in 1..5 {
                        simplex[i] = std::array::from_fn(|d| 0.5 * (simplex[0][d] + simplex[i][d]));
                        vals[i] = f(&simplex[i]);
                    }
                }
            }
        }
        best = best.max(-vals.iter().cloned().fold(f64::INFINITY, f64::min));
    }
    best
}

fn random_axis(rng: &mut impl Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let ph: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).sqrt();
    [r * ph.cos(), r * ph.sin(), z]
}

#[test]
fn biased_criterion_matches_joint_observable_search() {
    let mut rng = item_rng(23, 0);
    let mut checked = 0;
    let mut seen = [0usize; 2];
    while checked < 150 {
        let (sa, sb): (f64, f64) = (rng.random_range(0.3..1.0), rng.random_range(0.3..1.0));
        let x = rng.random_range(-(1.0 - sa)..=(1.0 - sa)) * 0.99;
        let y = rng.random_range(-(1.0 - sb)..=(1.0 - sb)) * 0.99;
        let a = UnsharpObservable::new(x, sa, random_axis(&mut rng)).unwrap();
        let b = UnsharpObservable::new(y, sb, random_axis(&mut rng)).unwrap();
        let oracle = best_joint_margin(&a, &b, &mut rng);
        if oracle.abs() < 1e-3 {
            continue;
        }
        assert_eq!(
            jointly_measurable(&a, &b),
            oracle >= 0.0,
            "x={x} y={y} criterion margin {:?} oracle {oracle}",
            biased_criterion_margin(&a, &b)
        );
        seen[usize::from(oracle >= 0.0)] += 1;
        checked += 1;
    }
    assert!(seen.iter().all(|&c| c > 10), "{seen:?}");
}

#[test]
fn unbiased_criterion_matches_joint_observable_search() {
    let mut rng = item_rng(24, 0);
    let mut checked = 0;
    while checked < 100 {
        let a =
            UnsharpObservable::unbiased(rng.random_range(0.3..1.0), random_axis(&mut rng)).unwrap();
        let b =
            UnsharpObservable::unbiased(rng.random_range(0.3..1.0), random_axis(&mut rng)).unwrap();
        let oracle = best_joint_margin(&a, &b, &mut rng);
        if oracle.abs() < 1e-3 {
            continue;
        }
        assert_eq!(jointly_measurable(&a, &b), oracle >= 0.0);
        checked += 1;
    }
}

// --- 2-IBC against a grid search -----------------------------------------

#[test]
fn two_ibc_agrees_with_grid_search() {
    let mut rng = item_rng(29, 0);
    let mut checked = 0;
    let mut seen = [0usize; 2];
    let vertices = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    while checked < 100 {
        let mut ch = random_unital_cp(&mut rng);
        if checked % 2 == 1 {
            // pull towards a vertex so both verdicts are well represented
            let v = vertices[rng.random_range(0..4)];
            let u: f64 = rng.random_range(0.0..0.5);
            let e = ch.eta();
            ch = QubitChannel::unital(std::array::from_fn(|k| (1.0 - u) * v[k] + u * e[k]));
        }
        let mut a: Vec<f64> = ch.eta().iter().map(|x| x.abs()).collect();
        a.sort_by(|p, q| q.total_cmp(p));
        if (a[0] * a[0] + a[1] * a[1] - 1.0).abs() < 1e-3 {
            continue;
        }
        let grid = incompatibility_grid_search(&ch, 100);
        let ibc = is_2ibc_unital(&ch).unwrap();
        assert_eq!(ibc, grid.all_compatible(), "{ch} {}", grid.functional);
        seen[usize::from(ibc)] += 1;
        checked += 1;
    }
    assert!(seen.iter().all(|&c| c > 10), "{seen:?}");
}

#[test]
fn grid_search_finds_orthogonal_witness_for_isotropic() {
    let grid = incompatibility_grid_search(&QubitChannel::isotropic(0.75), 50);
    assert!((grid.functional - 2.0 * 2f64.sqrt() * 0.75).abs() < 1e-6);
}

// --- sampler distribution ----------------------------------------------

/// Kolmogorov–Smirnov statistic of `xs` against the CDF `cdf`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn acin_weights_are_beta_one_four() {
    // marginals of a flat Dirichlet on five weights are Beta(1, 4)
    let n = 4000;
    let mut rng = item_rng(31, 0);
    let specs: Vec<StateSpec> = (0..n).map(|_| sample_acin_with(&mut rng)).collect();
    // 1% critical value
    let crit = 1.63 / (n as f64).sqrt();
    for k in 0..5 {
        let xs: Vec<f64> = specs
            .iter()
            .map(|s| match s {
                StateSpec::Acin { lambda, .. } => lambda[k] * lambda[k],
                _ => unreachable!(),
            })
            .collect();
        let d = ks_statistic(xs, |x| 1.0 - (1.0 - x).powi(4));
        assert!(d < crit, "λ{k}²: D = {d}");
    }
    let phis: Vec<f64> = specs
        .iter()
        .map(|s| match s {
            StateSpec::Acin { phi, .. } => *phi,
            _ => unreachable!(),
        })
        .collect();
    assert!(phis.iter().all(|p| (0.0..PI).contains(p)));
    assert!(ks_statistic(phis, |p| p / PI) < crit);
}

#[test]
fn w_reduced_states_have_two_thirds_one_third_spectrum() {
    let rho = make_state(&StateSpec::w_symmetric()).unwrap();
    for party in 0..3 {
        let mut ev = partial_trace(&rho, party).unwrap().eigenvalues();
        ev.sort_by(|a, b| b.total_cmp(a));
        let want = [2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0];
        for (e, w) in ev.iter().zip(want) {
            assert!((e - w).abs() < 1e-12, "{ev:?}");
        }
    }
}
