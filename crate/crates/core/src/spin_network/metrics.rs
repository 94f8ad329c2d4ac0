//! Capacity metrics: Hilbert-space dimensions, total valence, ERM.

use super::{Graph, SpinNetwork, Violation};
use crate::group_algebra::{invariant_dim, IrrepLabel, IrrepTable, Slot};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("inadmissible labels: {0:?}")]
    Inadmissible(Vec<Violation>),
    #[error("spin and mean maps have different links")]
    KeyMismatch,
    #[error("no links")]
    NoLinks,
    #[error("dimension overflows u128")]
    Overflow,
    #[error(transparent)]
    Group(#[from] crate::group_algebra::GroupError),
}

/// `V = sum_n v_n`, always twice the number of links.
pub fn total_valence(g: &Graph) -> usize {
    g.nodes.iter().map(|&n| g.valence(n)).sum()
}

/// Trivalent coupling rule only: SU(2) triangle and parity, or a nonzero
/// invariant space for finite groups. Nodes of other valence impose nothing.
fn trivalent_violations(table: &IrrepTable, sn: &SpinNetwork) -> Vec<Violation> {
    let mut out = Vec::new();
    for &n in &sn.graph.nodes {
        let slots = sn.node_slots(n);
        if slots.len() != 3 {
            continue;
        }
        if table.twice_cutoff().is_some() {
            let (a, b, c) = (slots[0].irrep.0, slots[1].irrep.0, slots[2].irrep.0);
            if (a + b + c) % 2 != 0 {
                out.push(Violation::Parity { node: n });
            } else if c < a.abs_diff(b) || c > a + b {
                out.push(Violation::Triangle { node: n });
            }
        } else if invariant_dim(table, &slots).unwrap_or(0) == 0 {
            out.push(Violation::NoInvariant { node: n });
        }
    }
    out
}

/// Per-endpoint product `prod_n prod_{l at n} dim(j_l)`: each link counts
/// once at each of its two ends.
pub fn dim_hilbert(sn: &SpinNetwork) -> Result<u128, MetricError> {
    let table = IrrepTable::new(sn.group)?;
    let v = trivalent_violations(&table, sn);
    if !v.is_empty() {
        return Err(MetricError::Inadmissible(v));
    }
    let mut acc: u128 = 1;
    for &n in &sn.graph.nodes {
        for (l, _) in sn.graph.endpoints(n) {
            let d = table.dim(sn.spins[&l])? as u128;
            acc = acc.checked_mul(d).ok_or(MetricError::Overflow)?;
        }
    }
    Ok(acc)
}

/// `prod_l dim(j_l)`, each link counted once.
pub fn dim_hilbert_per_link(sn: &SpinNetwork) -> Result<u128, MetricError> {
    let table = IrrepTable::new(sn.group)?;
    let mut acc: u128 = 1;
    for l in &sn.graph.links {
        acc = acc
            .checked_mul(table.dim(sn.spins[&l.id])? as u128)
            .ok_or(MetricError::Overflow)?;
    }
    Ok(acc)
}

/// Gauge-invariant dimension `prod_n dim Inv(node)` for fixed spins.
pub fn dim_invariant(sn: &SpinNetwork) -> Result<u128, MetricError> {
    let table = IrrepTable::new(sn.group)?;
    let mut acc: u128 = 1;
    for &n in &sn.graph.nodes {
        acc = acc
            .checked_mul(sn.intertwiner_dim(&table, n)? as u128)
            .ok_or(MetricError::Overflow)?;
    }
    Ok(acc)
}

/// Sum of [`dim_hilbert`] over all admissible labelings of `g` by the
/// table's irreps (spins up to the cutoff for SU(2)).
pub fn dim_hilbert_cutoff(table: &IrrepTable, g: &Graph) -> Result<u128, MetricError> {
    let irreps = table.irreps();
    let dsq: Vec<u128> = irreps
        .iter()
        .map(|r| table.dim(*r).map(|d| (d * d) as u128))
        .collect::<Result<_, _>>()?;
    let trivalent: Vec<usize> = g.nodes.iter().copied().filter(|&n| g.valence(n) == 3).collect();
    // links away from trivalent nodes contribute independent factors
    let constrained: Vec<usize> = g
        .links
        .iter()
        .filter(|l| trivalent.contains(&l.src) || trivalent.contains(&l.dst))
        .map(|l| l.id)
        .collect();
    let free = g.links.len() - constrained.len();
    let per_free: u128 = dsq.iter().sum();
    let mut acc: u128 = 1;
    for _ in 0..free {
        acc = acc.checked_mul(per_free).ok_or(MetricError::Overflow)?;
    }
    if constrained.is_empty() {
        return Ok(acc);
    }

    fn rec(
        table: &IrrepTable,
        g: &Graph,
        trivalent: &[usize],
        constrained: &[usize],
        dsq: &[u128],
        i: usize,
        labels: &mut BTreeMap<usize, IrrepLabel>,
        total: &mut u128,
        weight: u128,
    ) -> Result<(), MetricError> {
        // check every trivalent node whose links are all labeled
        for &n in trivalent {
            let ends = g.endpoints(n);
            if ends.iter().all(|(l, _)| labels.contains_key(l)) {
                let slots: Vec<Slot> = ends
                    .iter()
                    .map(|&(l, inc)| Slot {
                        irrep: labels[&l],
                        conjugate: inc,
                    })
                    .collect();
                let ok = if table.twice_cutoff().is_some() {
                    let (a, b, c) = (slots[0].irrep.0, slots[1].irrep.0, slots[2].irrep.0);
                    (a + b + c) % 2 == 0 && c >= a.abs_diff(b) && c <= a + b
                } else {
                    invariant_dim(table, &slots)? > 0
                };
                if !ok {
                    return Ok(());
                }
            }
        }
        if i == constrained.len() {
            *total = total.checked_add(weight).ok_or(MetricError::Overflow)?;
            return Ok(());
        }
        for (k, r) in table.irreps().into_iter().enumerate() {
            labels.insert(constrained[i], r);
            let w = weight.checked_mul(dsq[k]).ok_or(MetricError::Overflow)?;
            rec(table, g, trivalent, constrained, dsq, i + 1, labels, total, w)?;
        }
        labels.remove(&constrained[i]);
        Ok(())
    }

    let mut total: u128 = 0;
    rec(table, g, &trivalent, &constrained, &dsq, 0, &mut BTreeMap::new(), &mut total, 1)?;
    acc.checked_mul(total).ok_or(MetricError::Overflow)
}

/// `sum_l (j_l - jbar_l)^2 / (2L)`.
pub fn erm(spins: &BTreeMap<usize, f64>, means: &BTreeMap<usize, f64>) -> Result<f64, MetricError> {
    if spins.len() != means.len() || spins.keys().any(|k| !means.contains_key(k)) {
        return Err(MetricError::KeyMismatch);
    }
    if spins.is_empty() {
        return Err(MetricError::NoLinks);
    }
    let l = spins.len() as f64;
    Ok(spins.iter().map(|(k, j)| (j - means[k]).powi(2)).sum::<f64>() / (2.0 * l))
}
