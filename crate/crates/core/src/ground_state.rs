//! XY ground states by multi-start basin hopping.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::{xy_energy_raw, CouplingMatrix, SpinConfiguration};

/// `dH/dtheta_i = 2 sum_j J_ij sin(theta_i - theta_j)`.
pub fn xy_gradient(couplings: &CouplingMatrix, theta: &[f64]) -> Vec<f64> {
    let n = couplings.n();
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let row = couplings.row(i);
        let mut g = 0.0;
        for j in 0..n {
            if row[j] != 0.0 {
                g += row[j] * (theta[i] - theta[j]).sin();
            }
        }
        grad[i] = 2.0 * g;
    }
    grad
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinHoppingConfig {
    pub restarts: usize,
    pub hops: usize,
    /// Each hop adds a uniform kick in `[-step, step]` to every free phase.
    pub step: f64,
    /// Local minimization stops once `max |grad| < grad_tol`.
    pub grad_tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for BasinHoppingConfig {
    fn default() -> Self {
        BasinHoppingConfig {
            restarts: 20,
            hops: 100,
            step: PI / 2.0,
            grad_tol: 1e-8,
            max_iterations: 20_000,
            seed: 0,
        }
    }
}

/// Lowest XY energy found over `restarts` random starts with `hops` kicks each.
pub fn xy_ground_state(
    couplings: &CouplingMatrix,
    restarts: usize,
    hops: usize,
    seed: u64,
) -> Result<(SpinConfiguration, f64)> {
    xy_ground_state_with(
        couplings,
        &BasinHoppingConfig {
            restarts,
            hops,
            seed,
            ..Default::default()
        },
    )
}

pub fn xy_ground_state_with(
    couplings: &CouplingMatrix,
    cfg: &BasinHoppingConfig,
) -> Result<(SpinConfiguration, f64)> {
    let n = couplings.n();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best_theta = vec![0.0; n];
    let mut best_e = xy_energy_raw(couplings, &best_theta);
    if n < 2 {
        return Ok((SpinConfiguration::new(best_theta)?, best_e));
    }

    for _ in 0..cfg.restarts.max(1) {
        let mut theta: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
        theta[0] = 0.0;
        let mut e = local_minimize(couplings, &mut theta, cfg);
        if e < best_e {
            best_e = e;
            best_theta.clone_from(&theta);
        }
        for _ in 0..cfg.hops {
            let mut trial = theta.clone();
            for t in trial.iter_mut().skip(1) {
                *t += rng.gen_range(-cfg.step..=cfg.step);
            }
            let e_trial = local_minimize(couplings, &mut trial, cfg);
            if e_trial < e {
                e = e_trial;
                theta = trial;
                if e < best_e {
                    best_e = e;
                    best_theta.clone_from(&theta);
                }
            }
        }
    }
    Ok((SpinConfiguration::new(best_theta)?, best_e))
}

/// Gradient descent with a Barzilai-Borwein trial step and Armijo
/// backtracking. `theta[0]` is held at its value (gauge fixing).
fn local_minimize(couplings: &CouplingMatrix, theta: &mut [f64], cfg: &BasinHoppingConfig) -> f64 {
    let n = theta.len();
    let mut e = xy_energy_raw(couplings, theta);
    let mut grad = xy_gradient(couplings, theta);
    grad[0] = 0.0;
    let mut step = 0.1;
    let mut trial = vec![0.0; n];
    for _ in 0..cfg.max_iterations {
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gmax < cfg.grad_tol {
            break;
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = theta[i] - alpha * grad[i];
            }
            let e_trial = xy_energy_raw(couplings, &trial);
            if e_trial <= e - 1e-4 * alpha * g2 {
                accepted = true;
                let new_grad = {
                    let mut g = xy_gradient(couplings, &trial);
                    g[0] = 0.0;
                    g
                };
                // BB1 step for the next iteration.
                let mut sy = 0.0;
                let mut ss = 0.0;
                for i in 0..n {
                    let s = trial[i] - theta[i];
                    let y = new_grad[i] - grad[i];
                    sy += s * y;
                    ss += s * s;
                }
                step = if sy > 0.0 { (ss / sy).clamp(1e-6, 1e3) } else { alpha * 2.0 };
                theta.copy_from_slice(&trial);
                grad = new_grad;
                e = e_trial;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{couplings_from_weights, house_graph, WeightedGraph};

    fn afm(edges: &[(usize, usize)], n: usize) -> CouplingMatrix {
        let e: Vec<_> = edges.iter().map(|&(i, j)| (i, j, 1.0)).collect();
        couplings_from_weights(&WeightedGraph::from_edges(n, &e).unwrap())
    }

    #[test]
    fn house_ground_state_energy() {
        let j = couplings_from_weights(&house_graph());
        let (_, e) = xy_ground_state(&j, 20, 100, 1).unwrap();
        assert!((e + 8.7419).abs() < 1e-3, "{e}");
    }

    #[test]
    fn antiferromagnetic_pair() {
        let (s, e) = xy_ground_state(&afm(&[(0, 1)], 2), 2, 5, 0).unwrap();
        assert!((e + 2.0).abs() < 1e-12);
        let d = (s.phases()[0] - s.phases()[1]).abs();
        assert!((d - PI).abs() < 1e-6);
    }

    #[test]
    fn frustrated_triangle() {
        let (s, e) = xy_ground_state(&afm(&[(0, 1), (1, 2), (0, 2)], 3), 4, 10, 3).unwrap();
        assert!((e + 3.0).abs() < 1e-10);
        let p = s.phases();
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            let d = crate::graph::wrap_phase(p[a] - p[b]).abs();
            assert!((d - 2.0 * PI / 3.0).abs() < 1e-5, "{d}");
        }
    }

    #[test]
    fn triangle_minimum_by_scan() {
        // theta_0 = 0 fixed; scan the other two phases on a grid.
        let j = afm(&[(0, 1), (1, 2), (0, 2)], 3);
        let mut lo = f64::INFINITY;
        let steps = 360;
        for a in 0..steps {
            for b in 0..steps {
                let t = [0.0, 2.0 * PI * a as f64 / steps as f64, 2.0 * PI * b as f64 / steps as f64];
                lo = lo.min(xy_energy_raw(&j, &t));
            }
        }
        assert!((lo + 3.0).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..100 {
            let g = crate::graph::random_dense_graph(8, trial).unwrap();
            let j = couplings_from_weights(&g);
            let theta: Vec<f64> = (0..8).map(|_| rng.gen_range(-PI..PI)).collect();
            let grad = xy_gradient(&j, &theta);
            let h = 1e-6;
            for i in 0..8 {
                let mut p = theta.clone();
                let mut m = theta.clone();
                p[i] += h;
                m[i] -= h;
                let fd = (xy_energy_raw(&j, &p) - xy_energy_raw(&j, &m)) / (2.0 * h);
                let rel = (fd - grad[i]).abs() / grad[i].abs().max(1e-3);
                assert!(rel < 1e-5, "rel {rel}");
            }
        }
    }

    #[test]
    fn single_vertex() {
        let j = CouplingMatrix::from_dense(1, vec![0.0]).unwrap();
        let (s, e) = xy_ground_state(&j, 1, 1, 0).unwrap();
        assert_eq!(e, 0.0);
        assert_eq!(s.len(), 1);
    }
}
