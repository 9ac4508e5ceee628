//! Shared test fixtures and the brute-force QP oracle.
//!
//! The oracle solves the same box-constrained dual as the production
//! solver, but by exhaustive active-set enumeration with dense linear
//! algebra — an independent path used to certify the coordinate-descent
//! trainer on small instances.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rwa::data::Dataset;

const KKT_TOL: f64 = 1e-8;

/// Optimal primal objective of
/// min (1/2)(‖w‖² + b²) + C Σ max(0, 1 − y_i(w·x_i + b))
/// found by enumerating every {lower, upper, free}^n active-set assignment
/// of the dual box constraints and keeping KKT-consistent candidates.
///
/// Any weight vector's primal objective upper-bounds the optimum, so the
/// minimum over candidates cannot undershoot the true value.
pub fn qp_oracle_objective(data: &Dataset, signs: &[i8], c: f64) -> f64 {
    let n = data.n_examples();
    assert!(n <= 10, "oracle enumeration is exponential in n");

    // Q_ij = y_i y_j (x_i · x_j + 1); the +1 is the augmented bias feature.
    let q = DMatrix::from_fn(n, n, |i, j| {
        let dot: f64 = dot_rows(data, i, j) + 1.0;
        signs[i] as f64 * signs[j] as f64 * dot
    });

    #[derive(Copy, Clone, PartialEq)]
    enum Slot {
        Lower,
        Upper,
        Free,
    }
    let slots = [Slot::Lower, Slot::Upper, Slot::Free];

    let mut best: Option<f64> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut rest = code;
        let assignment: Vec<Slot> = (0..n)
            .map(|_| {
                let s = slots[rest % 3];
                rest /= 3;
                s
            })
            .collect();
        let free: Vec<usize> = (0..n).filter(|&i| assignment[i] == Slot::Free).collect();
        let upper: Vec<usize> = (0..n).filter(|&i| assignment[i] == Slot::Upper).collect();

        // Stationarity on the free set: Q_FF α_F = 1 − C · Q_FU 1.
        let mut alpha = vec![0.0; n];
        for &i in &upper {
            alpha[i] = c;
        }
        if !free.is_empty() {
            let qff = DMatrix::from_fn(free.len(), free.len(), |a, b| q[(free[a], free[b])]);
            let rhs = DVector::from_fn(free.len(), |a, _| {
                1.0 - upper.iter().map(|&u| q[(free[a], u)] * c).sum::<f64>()
            });
            let Ok(sol) = qff.clone().svd(true, true).solve(&rhs, 1e-12) else {
                continue;
            };
            // Singular systems are fine as long as the solution is exact.
            let residual = (&qff * &sol - &rhs).amax();
            if residual > KKT_TOL {
                continue;
            }
            for (a, &i) in free.iter().enumerate() {
                alpha[i] = sol[a];
            }
        }

        // Box feasibility and gradient sign conditions.
        if alpha
            .iter()
            .any(|&a| !(-KKT_TOL..=c + KKT_TOL).contains(&a))
        {
            continue;
        }
        let alpha_vec = DVector::from_vec(alpha.clone());
        let grad = &q * &alpha_vec - DVector::from_element(n, 1.0);
        let kkt_ok = (0..n).all(|i| match assignment[i] {
            Slot::Lower => grad[i] >= -KKT_TOL,
            Slot::Upper => grad[i] <= KKT_TOL,
            Slot::Free => grad[i].abs() <= KKT_TOL * 10.0,
        });
        if !kkt_ok {
            continue;
        }

        let objective = primal_from_alpha(data, signs, c, &alpha);
        best = Some(best.map_or(objective, |b: f64| b.min(objective)));
    }
    best.expect("at least the true optimum satisfies KKT")
}

fn dot_rows(data: &Dataset, i: usize, j: usize) -> f64 {
    let (a, b) = (data.row(i), data.row(j));
    let mut out = 0.0;
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].0.cmp(&b[y].0) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                out += a[x].1 * b[y].1;
                x += 1;
                y += 1;
            }
        }
    }
    out
}

fn primal_from_alpha(data: &Dataset, signs: &[i8], c: f64, alpha: &[f64]) -> f64 {
    let n_features = data.n_features();
    let mut w = vec![0.0; n_features];
    let mut b = 0.0;
    for i in 0..data.n_examples() {
        let coef = alpha[i].clamp(0.0, c) * signs[i] as f64;
        for &(j, v) in data.row(i) {
            w[j] += coef * v;
        }
        b += coef;
    }
    let reg = 0.5 * (w.iter().map(|x| x * x).sum::<f64>() + b * b);
    let hinge: f64 = (0..data.n_examples())
        .map(|i| {
            let score: f64 = data.row(i).iter().map(|&(j, v)| w[j] * v).sum::<f64>() + b;
            (1.0 - signs[i] as f64 * score).max(0.0)
        })
        .sum();
    reg + c * hinge
}

/// Deterministic fixture battery: small datasets on a quarter-integer grid
/// (duplicates and ties arise naturally), both classes always present.
pub fn oracle_fixtures() -> Vec<(Dataset, Vec<i8>)> {
    let mut fixtures: Vec<(Dataset, Vec<i8>)> = Vec::new();

    // Hand-picked degenerate and analytic cases.
    let hand: Vec<(Vec<Vec<f64>>, Vec<i8>)> = vec![
        (vec![vec![-1.0, 0.0], vec![1.0, 0.0]], vec![-1, 1]),
        (
            vec![
                vec![1.0, 1.0],
                vec![-1.0, 1.0],
                vec![1.0, -1.0],
                vec![-1.0, -1.0],
            ],
            vec![1, 1, -1, -1],
        ),
        // identical points with conflicting labels (non-separable)
        (vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![1, -1]),
        // duplicated support vector
        (vec![vec![-1.0], vec![-1.0], vec![2.0]], vec![-1, -1, 1]),
    ];
    for (rows, signs) in hand {
        let width = rows[0].len();
        let sparse = rows
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, &v)| (j, v))
                    .filter(|&(_, v)| v != 0.0)
                    .collect()
            })
            .collect();
        fixtures.push((Dataset::unlabeled(width, sparse).unwrap(), signs));
    }

    // Seeded grid-valued datasets across every (n, d) shape.
    for n in 2..=8usize {
        for d in 1..=3usize {
            for rep in 0..2u64 {
                let mut rng = ChaCha8Rng::seed_from_u64(n as u64 * 100 + d as u64 * 10 + rep);
                let rows: Vec<Vec<(usize, f64)>> = (0..n)
                    .map(|_| {
                        (0..d)
                            .map(|j| (j, (rng.gen_range(-8i32..=8) as f64) / 4.0))
                            .filter(|&(_, v)| v != 0.0)
                            .collect()
                    })
                    .collect();
                let mut signs: Vec<i8> = (0..n)
                    .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                    .collect();
                // ensure both classes
                signs[0] = 1;
                signs[n - 1] = -1;
                fixtures.push((Dataset::unlabeled(d, rows).unwrap(), signs));
            }
        }
    }
    fixtures
}
