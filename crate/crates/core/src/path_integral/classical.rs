//! Stationary paths of the discretized action.

use super::{ParticleModel, PathError, PathLattice, Potential, Signature};
use serde::{Deserialize, Serialize};

/// Iteration cap for potentials without a linear stationarity condition.
pub const PICARD_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub action: f64,
}

/// `sum_k S(x_k, x_{k-1})` along a path with one position per slice.
pub fn discrete_action(model: &ParticleModel, lattice: &PathLattice, path: &[f64]) -> f64 {
    let dt = lattice.dt();
    path.windows(2).map(|w| model.slice_action(w[1], w[0], dt)).sum()
}

/// Solves a constant-coefficient tridiagonal system with diagonal `d`,
/// off-diagonals `o` and right-hand side `rhs` (Thomas algorithm).
fn solve_tridiagonal(d: f64, o: f64, rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    for i in 0..n {
        let denom = if i == 0 { d } else { d - o * c[i - 1] };
        c[i] = o / denom;
        y[i] = if i == 0 { rhs[0] / denom } else { (rhs[i] - o * y[i - 1]) / denom };
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        x[i] = if i + 1 == n { y[i] } else { y[i] - c[i] * x[i + 1] };
    }
    x
}

/// Stationary point of the discrete action with fixed grid endpoints.
///
/// The interior condition is
/// `(m/dt)(2x_k - x_{k-1} - x_{k+1}) + s (dt/2)(V'(mid_k) + V'(mid_{k+1})) = 0`
/// with `s = +1` (Euclidean) or `-1` (Lorentzian). It is linear for free
/// and harmonic potentials and solved by fixed-point iteration otherwise.
pub fn classical_path(
    model: &ParticleModel,
    lattice: &PathLattice,
    x_in: f64,
    x_out: f64,
) -> Result<ClassicalPath, PathError> {
    lattice.validate()?;
    model.validate(lattice)?;
    lattice.index_of(x_in)?;
    lattice.index_of(x_out)?;
    let n = lattice.slices;
    let dt = lattice.dt();
    let m = model.mass;
    let s = match model.signature {
        Signature::Euclidean => 1.0,
        Signature::Lorentzian => -1.0,
    };
    let inner = n - 2;
    let assemble = |interior: &[f64]| {
        let mut p = Vec::with_capacity(n);
        p.push(x_in);
        p.extend_from_slice(interior);
        p.push(x_out);
        p
    };
    let interior = match &model.potential {
        Potential::Free | Potential::Harmonic { .. } => {
            let w2 = match model.potential {
                Potential::Harmonic { omega } => omega * omega,
                _ => 0.0,
            };
            let d = 2.0 * m / dt + s * dt * m * w2 / 2.0;
            let o = -m / dt + s * dt * m * w2 / 4.0;
            let mut rhs = vec![0.0; inner];
            if inner > 0 {
                rhs[0] -= o * x_in;
                rhs[inner - 1] -= o * x_out;
            }
            solve_tridiagonal(d, o, &rhs)
        }
        Potential::Tabulated { .. } => {
            let d = 2.0 * m / dt;
            let o = -m / dt;
            // start from the straight line
            let mut cur: Vec<f64> = (1..=inner)
                .map(|k| x_in + (x_out - x_in) * k as f64 / (n - 1) as f64)
                .collect();
            let scale = 1e-13 * (lattice.x_max - lattice.x_min);
            let mut converged = inner == 0;
            for _ in 0..PICARD_MAX_ITER {
                if converged {
                    break;
                }
                let p = assemble(&cur);
                let rhs: Vec<f64> = (1..=inner)
                    .map(|k| {
                        let mut r = -s * dt / 2.0
                            * (model.force_gradient(0.5 * (p[k] + p[k - 1]))
                                + model.force_gradient(0.5 * (p[k] + p[k + 1])));
                        if k == 1 {
                            r -= o * x_in;
                        }
                        if k == inner {
                            r -= o * x_out;
                        }
                        r
                    })
                    .collect();
                let next = solve_tridiagonal(d, o, &rhs);
                let change = next.iter().zip(&cur).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                cur = next;
                if change <= scale {
                    converged = true;
                }
            }
            if !converged {
                return Err(PathError::NonConvergent(PICARD_MAX_ITER));
            }
            cur
        }
    };
    let positions = assemble(&interior);
    let action = discrete_action(model, lattice, &positions);
    Ok(ClassicalPath {
        times: (0..n).map(|k| lattice.t(k)).collect(),
        positions,
        action,
    })
}
