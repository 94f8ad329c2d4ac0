//! Gaussian weights over SU(2) spins peaked at per-link means.

use crate::group_algebra::IrrepLabel;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Number of spreads kept on each side of the mean by [`CoherentWeights::support`].
pub const SUPPORT_SIGMAS: f64 = 4.0;

/// Default spread `sigma = max(jbar, 1/2)^(1/4)`, so `sigma^2 = sqrt(jbar)`.
pub fn default_spread(mean: f64) -> f64 {
    mean.max(0.5).powf(0.25)
}

/// Means and spreads in spin units (not doubled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherentWeights {
    #[serde(deserialize_with = "crate::keys::usize_keys")]
    pub means: BTreeMap<usize, f64>,
    #[serde(default, deserialize_with = "crate::keys::usize_keys")]
    pub spreads: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoherentError {
    #[error("link {0}: spread must be positive")]
    Spread(usize),
    #[error("link {link}: mean {mean} outside [0, {cutoff}]")]
    Mean { link: usize, mean: f64, cutoff: f64 },
    #[error("link {0} has a spread but no mean")]
    Orphan(usize),
}

impl CoherentWeights {
    /// Means with the default spread policy on every link.
    pub fn with_default_spreads(means: BTreeMap<usize, f64>) -> Self {
        let spreads = means.iter().map(|(&l, &m)| (l, default_spread(m))).collect();
        Self { means, spreads }
    }

    pub fn spread(&self, link: usize) -> f64 {
        self.spreads
            .get(&link)
            .copied()
            .unwrap_or_else(|| default_spread(self.means[&link]))
    }

    pub fn validate(&self, twice_cutoff: u32) -> Result<(), CoherentError> {
        let cutoff = twice_cutoff as f64 / 2.0;
        for (&l, &m) in &self.means {
            if !(0.0..=cutoff).contains(&m) || m.is_nan() {
                return Err(CoherentError::Mean { link: l, mean: m, cutoff });
            }
            if !(self.spread(l) > 0.0) {
                return Err(CoherentError::Spread(l));
            }
        }
        if let Some(&l) = self.spreads.keys().find(|l| !self.means.contains_key(l)) {
            return Err(CoherentError::Orphan(l));
        }
        Ok(())
    }

    /// Mean rounded to the half-integer lattice, ties downward.
    pub fn peak_spins(&self) -> BTreeMap<usize, IrrepLabel> {
        self.means
            .iter()
            .map(|(&l, &m)| (l, IrrepLabel(peak_twice(m))))
            .collect()
    }

    /// Per link, the doubled spins within `SUPPORT_SIGMAS` spreads of the
    /// mean and at most the cutoff.
    pub fn support(&self, twice_cutoff: u32) -> BTreeMap<usize, Vec<IrrepLabel>> {
        self.means
            .iter()
            .map(|(&l, &m)| {
                let s = self.spread(l);
                let v = (0..=twice_cutoff)
                    .filter(|&t| (t as f64 / 2.0 - m).abs() <= SUPPORT_SIGMAS * s)
                    .map(IrrepLabel)
                    .collect();
                (l, v)
            })
            .collect()
    }

    /// Normalized weight of one link at doubled spin `twice_j`.
    pub fn link_weight(&self, link: usize, twice_j: u32) -> f64 {
        let m = self.means[&link];
        let s = self.spread(link);
        let g = |j: f64| (-(j - m).powi(2) / (2.0 * s * s)).exp();
        g(twice_j as f64 / 2.0) / g(peak_twice(m) as f64 / 2.0)
    }
}

fn peak_twice(mean: f64) -> u32 {
    (2.0 * mean - 0.5).ceil().max(0.0) as u32
}

/// `prod_l exp(-(j_l - jbar_l)^2 / (2 sigma_l^2))`, each factor divided by
/// its value at the lattice peak so the maximum is 1.
pub fn coherent_amplitude(w: &CoherentWeights, spins: &BTreeMap<usize, IrrepLabel>) -> f64 {
    spins.iter().map(|(&l, r)| w.link_weight(l, r.0)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(means: &[f64], spreads: &[f64]) -> CoherentWeights {
        CoherentWeights {
            means: means.iter().copied().enumerate().collect(),
            spreads: spreads.iter().copied().enumerate().collect(),
        }
    }

    #[test]
    fn examples() {
        let cw = w(&[1.0], &[1.0]);
        assert_eq!(coherent_amplitude(&cw, &BTreeMap::from([(0, IrrepLabel(2))])), 1.0);
        let v = coherent_amplitude(&cw, &BTreeMap::from([(0, IrrepLabel(4))]));
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        let two = w(&[1.0, 2.0], &[1.0, 1.0]);
        let v = coherent_amplitude(&two, &BTreeMap::from([(0, IrrepLabel(0)), (1, IrrepLabel(6))]));
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn peak_ties_round_down() {
        let cw = CoherentWeights::with_default_spreads(BTreeMap::from([(0, 0.75), (1, 0.8), (2, 0.0), (3, 1.25)]));
        let p = cw.peak_spins();
        assert_eq!(p[&0], IrrepLabel(1));
        assert_eq!(p[&1], IrrepLabel(2));
        assert_eq!(p[&2], IrrepLabel(0));
        assert_eq!(p[&3], IrrepLabel(2));
    }

    #[test]
    fn default_spread_variance() {
        for m in [0.5, 1.0, 4.0, 9.0] {
            assert!((default_spread(m).powi(2) - f64::sqrt(m)).abs() < 1e-14);
        }
        assert_eq!(default_spread(0.0), default_spread(0.5));
    }

    #[test]
    fn validation() {
        assert!(w(&[1.0], &[0.0]).validate(4).is_err());
        assert!(w(&[3.0], &[1.0]).validate(4).is_err());
        assert!(w(&[1.0], &[1.0]).validate(4).is_ok());
    }
}
