//! Time-sliced propagators of a particle on a line, classical paths and
//! path-weight concentration.

mod classical;
mod concentration;

pub use classical::{classical_path, discrete_action, ClassicalPath, PICARD_MAX_ITER};
pub use concentration::{
    concentration_profile, ConcentrationMethod, ConcentrationOptions, ConcentrationRow, MetropolisOptions,
};

use crate::exec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest number of paths enumerated by [`brute_force_path_sum`].
pub const PATH_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PathError {
    #[error("invalid lattice: {0}")]
    Lattice(String),
    #[error("invalid model: {0}")]
    Model(String),
    #[error("time step must be positive, got {0}")]
    TimeStep(f64),
    #[error("Lorentzian kernel is aliased: m*width*dx/(hbar*dt) = {ratio} > pi")]
    Unstable { ratio: f64 },
    #[error("{needed} paths exceed the budget of {limit}")]
    Budget { needed: u128, limit: u128 },
    #[error("position {0} is not a grid point")]
    OffGrid(f64),
    #[error("classical path iteration did not converge in {0} steps")]
    NonConvergent(usize),
    #[error("sampler not converged at hbar = {hbar}: R-hat {rhat} > {limit}")]
    NotConverged { hbar: f64, rhat: f64, limit: f64 },
    #[error("{0}")]
    Unsupported(String),
}

/// Uniform grid `x_min .. x_max` with `n_points` points and `slices` time
/// slices on `[t_in, t_out]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathLattice {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub t_in: f64,
    pub t_out: f64,
    pub slices: usize,
}

impl PathLattice {
    pub fn validate(&self) -> Result<(), PathError> {
        let bad = |m: &str| Err(PathError::Lattice(m.into()));
        if !(self.x_min < self.x_max) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return bad("need x_min < x_max");
        }
        if self.n_points < 3 {
            return bad("need at least 3 grid points");
        }
        if !(self.t_in < self.t_out) || !self.t_in.is_finite() || !self.t_out.is_finite() {
            return bad("need t_in < t_out");
        }
        if self.slices < 2 {
            return bad("need at least 2 slices");
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_out - self.t_in) / (self.slices - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn t(&self, k: usize) -> f64 {
        self.t_in + k as f64 * self.dt()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Index of the grid point at `x`, allowing rounding noise.
    pub fn index_of(&self, x: f64) -> Result<usize, PathError> {
        let f = (x - self.x_min) / self.dx();
        let i = f.round();
        if (f - i).abs() > 1e-9 || i < 0.0 || i as usize >= self.n_points {
            return Err(PathError::OffGrid(x));
        }
        Ok(i as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Free,
    /// `m omega^2 x^2 / 2`.
    Harmonic { omega: f64 },
    /// Values on a uniform grid, linearly interpolated.
    Tabulated { x_min: f64, x_max: f64, values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    Lorentzian,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParticleModel {
    pub mass: f64,
    pub hbar: f64,
    pub potential: Potential,
    pub signature: Signature,
}

impl ParticleModel {
    pub fn free(signature: Signature) -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            potential: Potential::Free,
            signature,
        }
    }

    pub fn with_hbar(&self, hbar: f64) -> Self {
        Self { hbar, ..self.clone() }
    }

    pub fn validate(&self, lattice: &PathLattice) -> Result<(), PathError> {
        let bad = |m: String| Err(PathError::Model(m));
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return bad("mass must be positive".into());
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return bad("hbar must be positive".into());
        }
        match &self.potential {
            Potential::Free => {}
            Potential::Harmonic { omega } => {
                if !omega.is_finite() {
                    return bad("omega must be finite".into());
                }
            }
            Potential::Tabulated { x_min, x_max, values } => {
                if values.len() < 2 || !(x_min < x_max) {
                    return bad("tabulated potential needs two or more values on x_min < x_max".into());
                }
                let eps = 1e-12 * (lattice.x_max - lattice.x_min);
                if *x_min > lattice.x_min + eps || *x_max < lattice.x_max - eps {
                    return bad(format!(
                        "tabulated range [{x_min}, {x_max}] does not cover [{}, {}]",
                        lattice.x_min, lattice.x_max
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return bad("tabulated values must be finite".into());
                }
            }
        }
        Ok(())
    }

    pub fn potential_at(&self, x: f64) -> f64 {
        match &self.potential {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * self.mass * omega * omega * x * x,
            Potential::Tabulated { x_min, x_max, values } => {
                let (i, s) = tab_cell(*x_min, *x_max, values.len(), x);
                values[i] * (1.0 - s) + values[i + 1] * s
            }
        }
    }

    /// Derivative of the potential (piecewise constant when tabulated).
    pub fn force_gradient(&self, x: f64) -> f64 {
        match &self.potential {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => self.mass * omega * omega * x,
            Potential::Tabulated { x_min, x_max, values } => {
                let h = (x_max - x_min) / (values.len() - 1) as f64;
                let (i, _) = tab_cell(*x_min, *x_max, values.len(), x);
                (values[i + 1] - values[i]) / h
            }
        }
    }

    /// Action of one slice: `m (x - x')^2 / (2 dt) -+ V(mid) dt`, with `-`
    /// for Lorentzian and `+` for Euclidean signature.
    pub fn slice_action(&self, x: f64, xp: f64, dt: f64) -> f64 {
        let kin = self.mass * (x - xp).powi(2) / (2.0 * dt);
        let pot = self.potential_at(0.5 * (x + xp)) * dt;
        match self.signature {
            Signature::Lorentzian => kin - pot,
            Signature::Euclidean => kin + pot,
        }
    }
}

fn tab_cell(x_min: f64, x_max: f64, n: usize, x: f64) -> (usize, f64) {
    let h = (x_max - x_min) / (n - 1) as f64;
    let f = ((x - x_min) / h).clamp(0.0, (n - 1) as f64);
    let i = (f.floor() as usize).min(n - 2);
    (i, f - i as f64)
}

/// Single-slice kernel.
///
/// Lorentzian: `sqrt(m / (2 pi i hbar dt)) exp(i S / hbar)`.
/// Euclidean: `sqrt(m / (2 pi hbar dt)) exp(-S_E / hbar)`.
pub fn short_time_kernel(model: &ParticleModel, x: f64, xp: f64, dt: f64) -> Result<Complex64, PathError> {
    if !(dt > 0.0) {
        return Err(PathError::TimeStep(dt));
    }
    Ok(kernel_unchecked(model, x, xp, dt))
}

fn kernel_unchecked(model: &ParticleModel, x: f64, xp: f64, dt: f64) -> Complex64 {
    let s = model.slice_action(x, xp, dt);
    let base = model.mass / (2.0 * PI * model.hbar * dt);
    match model.signature {
        Signature::Lorentzian => {
            // 1/sqrt(i) = exp(-i pi/4)
            let pre = Complex64::from_polar(base.sqrt(), -PI / 4.0);
            pre * Complex64::from_polar(1.0, s / model.hbar)
        }
        Signature::Euclidean => Complex64::new(base.sqrt() * (-s / model.hbar).exp(), 0.0),
    }
}

/// `m * width * dx / (hbar * dt)`: the largest phase step of the
/// Lorentzian kernel between neighbouring grid points.
pub fn nyquist_ratio(model: &ParticleModel, lattice: &PathLattice) -> f64 {
    model.mass * (lattice.x_max - lattice.x_min) * lattice.dx() / (model.hbar * lattice.dt())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagateOptions {
    /// Evaluate Lorentzian lattices that fail the aliasing guard.
    pub allow_unstable: bool,
}

/// `K(x_out, x_in)` on the grid: rows are `x_out`, columns `x_in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    pub lattice: PathLattice,
    pub matrix: DMatrix<Complex64>,
    pub nyquist_ratio: f64,
}

impl Propagator {
    pub fn at(&self, x_out: f64, x_in: f64) -> Result<Complex64, PathError> {
        Ok(self.matrix[(self.lattice.index_of(x_out)?, self.lattice.index_of(x_in)?)])
    }

    /// `x -> K(x, x_in)`.
    pub fn from_source(&self, x_in: f64) -> Result<Vec<Complex64>, PathError> {
        let j = self.lattice.index_of(x_in)?;
        Ok(self.matrix.column(j).iter().copied().collect())
    }
}

fn kernel_matrix(model: &ParticleModel, lattice: &PathLattice) -> DMatrix<Complex64> {
    let xs = lattice.positions();
    let dt = lattice.dt();
    DMatrix::from_fn(xs.len(), xs.len(), |i, j| kernel_unchecked(model, xs[i], xs[j], dt))
}

/// Dense product with rows computed in parallel; every entry is a
/// sequential dot product, so the result does not depend on the pool size.
fn matmul(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (n, k, m) = (a.nrows(), a.ncols(), b.ncols());
    let bt = b.transpose();
    let rows: Vec<Vec<Complex64>> = exec::map_indexed(n, |i| {
        let ai: Vec<Complex64> = (0..k).map(|p| a[(i, p)]).collect();
        (0..m)
            .map(|j| {
                let col = bt.row(j);
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..k {
                    acc += ai[p] * col[p];
                }
                acc
            })
            .collect()
    });
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

fn matrix_power(a: &DMatrix<Complex64>, mut e: usize) -> DMatrix<Complex64> {
    let mut result = DMatrix::identity(a.nrows(), a.ncols());
    let mut base = a.clone();
    let mut first = true;
    while e > 0 {
        if e & 1 == 1 {
            result = if first { base.clone() } else { matmul(&result, &base) };
            first = false;
        }
        e >>= 1;
        if e > 0 {
            base = matmul(&base, &base);
        }
    }
    result
}

/// `K = M (dx M)^(N-2)` with `M[i, j] = kernel(x_i, x_j, dt)`: repeated
/// quadrature over the intermediate positions, zero outside the box.
pub fn propagate(
    model: &ParticleModel,
    lattice: &PathLattice,
    opts: PropagateOptions,
) -> Result<Propagator, PathError> {
    lattice.validate()?;
    model.validate(lattice)?;
    let ratio = nyquist_ratio(model, lattice);
    if model.signature == Signature::Lorentzian && ratio > PI && !opts.allow_unstable {
        return Err(PathError::Unstable { ratio });
    }
    let m = kernel_matrix(model, lattice);
    let steps = lattice.slices - 1;
    let matrix = if steps == 1 {
        m
    } else {
        let dx = lattice.dx();
        let step = m.map(|z| z * dx);
        matmul(&m, &matrix_power(&step, steps - 1))
    };
    Ok(Propagator {
        lattice: lattice.clone(),
        matrix,
        nyquist_ratio: ratio,
    })
}

/// Explicit sum over every grid path from `x_in` to `x_out` of
/// `prod_k kernel(x_k, x_{k-1}) dx^(N-2)`.
pub fn brute_force_path_sum(
    model: &ParticleModel,
    lattice: &PathLattice,
    x_in: f64,
    x_out: f64,
) -> Result<Complex64, PathError> {
    lattice.validate()?;
    model.validate(lattice)?;
    let (a, b) = (lattice.index_of(x_in)?, lattice.index_of(x_out)?);
    let n = lattice.n_points;
    let inner = lattice.slices - 2;
    let total = (n as u128).checked_pow(inner as u32).unwrap_or(u128::MAX);
    if total > PATH_BUDGET {
        return Err(PathError::Budget {
            needed: total,
            limit: PATH_BUDGET,
        });
    }
    let xs = lattice.positions();
    let dt = lattice.dt();
    let m = DMatrix::from_fn(n, n, |i, j| kernel_unchecked(model, xs[i], xs[j], dt));
    let sum = exec::sum_complex(total as usize, |k| {
        let mut prev = a;
        let mut rest = k;
        let mut v = Complex64::new(1.0, 0.0);
        for _ in 0..inner {
            let cur = rest % n;
            rest /= n;
            v *= m[(cur, prev)];
            prev = cur;
        }
        v * m[(b, prev)]
    });
    Ok(sum * lattice.dx().powi(inner as i32))
}

/// Continuum free propagator `sqrt(m / (2 pi i hbar T)) exp(i m d^2 / (2 hbar T))`.
pub fn free_propagator_exact(mass: f64, hbar: f64, t: f64, x: f64, xp: f64) -> Complex64 {
    let pre = Complex64::from_polar((mass / (2.0 * PI * hbar * t)).sqrt(), -PI / 4.0);
    pre * Complex64::from_polar(1.0, mass * (x - xp).powi(2) / (2.0 * hbar * t))
}

#[cfg(test)]
mod tests;
