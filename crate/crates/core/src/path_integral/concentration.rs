//! Share of Euclidean path weight near the classical path.

use super::{classical_path, ParticleModel, PathError, PathLattice, Signature, PATH_BUDGET};
use crate::exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationMethod {
    /// Enumeration within the budget, sampling otherwise.
    #[default]
    Auto,
    Exact,
    Metropolis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetropolisOptions {
    pub seed: u64,
    pub chains: usize,
    pub sweeps: usize,
    pub burn_in: usize,
    pub rhat_max: f64,
}

impl Default for MetropolisOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            chains: 4,
            sweeps: 20_000,
            burn_in: 2_000,
            rhat_max: 1.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationOptions {
    pub method: ConcentrationMethod,
    /// Largest path count enumerated exactly.
    pub budget: u128,
    pub metropolis: MetropolisOptions,
}

impl Default for ConcentrationOptions {
    fn default() -> Self {
        Self {
            method: ConcentrationMethod::Auto,
            budget: PATH_BUDGET,
            metropolis: MetropolisOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub hbar: f64,
    pub fraction: f64,
    /// Zero for exact enumeration.
    pub stderr: f64,
    pub method: ConcentrationMethod,
    pub rhat: Option<f64>,
}

/// For each `hbar`, the fraction of `sum exp(-S/hbar)` carried by grid paths
/// with `max_k |x_k - x_cl(t_k)| <= r`.
pub fn concentration_profile(
    model: &ParticleModel,
    lattice: &PathLattice,
    x_in: f64,
    x_out: f64,
    r: f64,
    hbars: &[f64],
    opts: &ConcentrationOptions,
) -> Result<Vec<ConcentrationRow>, PathError> {
    if model.signature != Signature::Euclidean {
        return Err(PathError::Unsupported("concentration needs Euclidean signature".into()));
    }
    if let Some(&h) = hbars.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
        return Err(PathError::Model(format!("hbar must be positive, got {h}")));
    }
    let cl = classical_path(model, lattice, x_in, x_out)?;
    let (a, b) = (lattice.index_of(x_in)?, lattice.index_of(x_out)?);
    let inner = lattice.slices - 2;
    let total = (lattice.n_points as u128)
        .checked_pow(inner as u32)
        .unwrap_or(u128::MAX);
    let exact = match opts.method {
        ConcentrationMethod::Exact => {
            if total > opts.budget {
                return Err(PathError::Budget {
                    needed: total,
                    limit: opts.budget,
                });
            }
            true
        }
        ConcentrationMethod::Metropolis => false,
        ConcentrationMethod::Auto => total <= opts.budget,
    };
    let ctx = Ctx {
        model,
        lattice,
        a,
        b,
        inner,
        classical: &cl.positions,
        r,
    };
    if exact {
        Ok(ctx.exact(total as usize, hbars))
    } else {
        hbars.iter().map(|&h| ctx.metropolis(h, &opts.metropolis)).collect()
    }
}

const BATCHES: usize = 20;

struct Ctx<'a> {
    model: &'a ParticleModel,
    lattice: &'a PathLattice,
    a: usize,
    b: usize,
    inner: usize,
    classical: &'a [f64],
    r: f64,
}

impl Ctx<'_> {
    fn in_tube(&self, idx: &[usize]) -> bool {
        let tol = 1e-12 * self.lattice.dx();
        idx.iter()
            .enumerate()
            .all(|(k, &i)| (self.lattice.x(i) - self.classical[k + 1]).abs() <= self.r + tol)
    }

    fn step_action(&self, i: usize, j: usize) -> f64 {
        self.model.slice_action(self.lattice.x(j), self.lattice.x(i), self.lattice.dt())
    }

    fn path_action(&self, idx: &[usize]) -> f64 {
        let mut prev = self.a;
        let mut s = 0.0;
        for &i in idx {
            s += self.step_action(prev, i);
            prev = i;
        }
        s + self.step_action(prev, self.b)
    }

    fn exact(&self, total: usize, hbars: &[f64]) -> Vec<ConcentrationRow> {
        let n = self.lattice.n_points;
        let decode = |k: usize| {
            let mut idx = vec![0; self.inner];
            let mut rest = k;
            for slot in idx.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            idx
        };
        let paths: Vec<(f64, bool)> = exec::map_indexed(total, |k| {
            let idx = decode(k);
            (self.path_action(&idx), self.in_tube(&idx))
        });
        let s_min = paths.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        hbars
            .iter()
            .map(|&h| {
                let w = |k: usize| (-(paths[k].0 - s_min) / h).exp();
                let all = exec::sum_real(total, w);
                let inside = exec::sum_real(total, |k| if paths[k].1 { w(k) } else { 0.0 });
                ConcentrationRow {
                    hbar: h,
                    fraction: inside / all,
                    stderr: 0.0,
                    method: ConcentrationMethod::Exact,
                    rhat: None,
                }
            })
            .collect()
    }

    /// Single-site updates by one grid step; the in-tube indicator is
    /// recorded once per sweep after burn-in.
    fn metropolis(&self, h: f64, o: &MetropolisOptions) -> Result<ConcentrationRow, PathError> {
        if o.chains < 2 || o.sweeps < o.burn_in + BATCHES {
            return Err(PathError::Model(format!("need 2 or more chains and sweeps >= burn_in + {BATCHES}")));
        }
        let n = self.lattice.n_points;
        let start: Vec<usize> = self.classical[1..self.classical.len() - 1]
            .iter()
            .map(|&x| {
                let f = ((x - self.lattice.x_min) / self.lattice.dx()).round();
                f.clamp(0.0, (n - 1) as f64) as usize
            })
            .collect();
        let series: Vec<Vec<f64>> = exec::map_indexed(o.chains, |c| {
            let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
            rng.set_stream(c as u64);
            let mut idx = start.clone();
            let mut out = Vec::with_capacity(o.sweeps - o.burn_in);
            for sweep in 0..o.sweeps {
                for k in 0..self.inner {
                    let cur = idx[k];
                    let prop = if rng.random::<bool>() { cur.wrapping_add(1) } else { cur.wrapping_sub(1) };
                    if prop >= n {
                        continue;
                    }
                    let left = if k == 0 { self.a } else { idx[k - 1] };
                    let right = if k + 1 == self.inner { self.b } else { idx[k + 1] };
                    let ds = self.step_action(left, prop) + self.step_action(prop, right)
                        - self.step_action(left, cur)
                        - self.step_action(cur, right);
                    if ds <= 0.0 || rng.random::<f64>() < (-ds / h).exp() {
                        idx[k] = prop;
                    }
                }
                if sweep >= o.burn_in {
                    out.push(if self.in_tube(&idx) { 1.0 } else { 0.0 });
                }
            }
            out
        });
        let len = series[0].len() as f64;
        let means: Vec<f64> = series.iter().map(|s| s.iter().sum::<f64>() / len).collect();
        let vars: Vec<f64> = series
            .iter()
            .zip(&means)
            .map(|(s, m)| s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (len - 1.0))
            .collect();
        let k = o.chains as f64;
        let grand = means.iter().sum::<f64>() / k;
        let b = len / (k - 1.0) * means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
        let w = vars.iter().sum::<f64>() / k;
        let rhat = if w == 0.0 {
            if b == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            (((len - 1.0) / len * w + b / len) / w).sqrt()
        };
        if rhat > o.rhat_max {
            return Err(PathError::NotConverged {
                hbar: h,
                rhat,
                limit: o.rhat_max,
            });
        }
        // batch means over all chains
        let per = series[0].len() / BATCHES;
        let batch: Vec<f64> = series
            .iter()
            .flat_map(|s| (0..BATCHES).map(move |i| s[i * per..(i + 1) * per].iter().sum::<f64>() / per as f64))
            .collect();
        let nb = batch.len() as f64;
        let bm = batch.iter().sum::<f64>() / nb;
        let stderr = (batch.iter().map(|x| (x - bm).powi(2)).sum::<f64>() / (nb - 1.0) / nb).sqrt();
        Ok(ConcentrationRow {
            hbar: h,
            fraction: grand,
            stderr,
            method: ConcentrationMethod::Metropolis,
            rhat: Some(rhat),
        })
    }
}
