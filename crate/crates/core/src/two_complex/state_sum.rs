//! Evaluation engines for
//! `int prod_{free e} dU_e prod_f delta(H_f) prod_s psi_s(U)`.
//!
//! * [`group_sum`]: finite groups, variable elimination over edge and
//!   partial-product variables.
//! * [`brute_force`]: finite groups, every edge assignment (the oracle).
//! * [`character_expansion`]: any table; sums face irreps and replaces each
//!   edge integral by the invariant projector of its occurrences.

use super::complex::{Dir, TwoComplex};
use super::TwoComplexError;
use crate::exec;
use crate::group_algebra::{cached_invariant_basis, invariant_dim, GroupElement, IrrepLabel, IrrepTable, Slot};
use crate::spin_network::{CylindricalEvaluator, SpinNetwork};
use crate::tensor::{self, Label, Tensor};
use num_complex::Complex64;
use std::collections::BTreeMap;

/// Largest assignment count the brute-force oracle will enumerate.
pub const BRUTE_FORCE_BUDGET: u128 = 10_000_000;
/// Largest table built for a boundary state in the group-sum engine.
pub const STATE_TABLE_BUDGET: u128 = 1_000_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A spin network attached to boundary edges.
#[derive(Debug, Clone)]
pub struct AttachedState<'a> {
    pub network: &'a SpinNetwork,
    /// Use the complex conjugate of the state (the bra side).
    pub conjugate: bool,
    /// Link id of the network to `(edge id, reversed)`.
    pub links: BTreeMap<usize, (usize, bool)>,
}

#[derive(Debug, Clone)]
pub struct Problem<'a> {
    pub table: &'a IrrepTable,
    pub complex: &'a TwoComplex,
    /// Edges held at fixed group elements; all others are integrated.
    pub fixed: BTreeMap<usize, GroupElement>,
    pub states: Vec<AttachedState<'a>>,
}

fn edge_index(c: &TwoComplex) -> BTreeMap<usize, usize> {
    c.edges.iter().enumerate().map(|(i, e)| (e.id, i)).collect()
}

fn finite_parts(table: &IrrepTable) -> Result<&crate::group_algebra::FiniteGroup, TwoComplexError> {
    table
        .finite()
        .ok_or_else(|| TwoComplexError::Unsupported("exact group sums need a finite group".into()))
}

fn element_index(u: &GroupElement) -> usize {
    match u {
        GroupElement::Finite(i) => *i,
        GroupElement::Su2(_) => unreachable!("checked by caller"),
    }
}

/// Tabulates a state over the distinct edges it touches, in ascending edge
/// id order. Returns (edge ids, values) with row-major layout.
fn state_table(table: &IrrepTable, st: &AttachedState) -> Result<(Vec<usize>, Vec<Complex64>), TwoComplexError> {
    let g = finite_parts(table)?;
    let mut edges: Vec<usize> = st.links.values().map(|&(e, _)| e).collect();
    edges.sort_unstable();
    edges.dedup();
    let n = g.order;
    let size = (n as u128).checked_pow(edges.len() as u32).unwrap_or(u128::MAX);
    if size > STATE_TABLE_BUDGET {
        return Err(TwoComplexError::Budget {
            needed: size,
            limit: STATE_TABLE_BUDGET,
        });
    }
    let ev: CylindricalEvaluator = st.network.evaluator(table)?;
    let size = size as usize;
    let vals: Vec<Result<Complex64, TwoComplexError>> = exec::map_indexed(size, |k| {
        let mut hol = BTreeMap::new();
        for (&l, &(e, rev)) in &st.links {
            let p = edges.iter().position(|&x| x == e).unwrap();
            let digit = (k / n.pow((edges.len() - 1 - p) as u32)) % n;
            let u = if rev { g.inverse[digit] } else { digit };
            hol.insert(l, GroupElement::Finite(u));
        }
        let v = ev.evaluate(&hol)?;
        Ok(if st.conjugate { v.conj() } else { v })
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok((edges, vals))
}

/// Variable elimination over group-valued edge variables.
pub fn group_sum(p: &Problem) -> Result<Complex64, TwoComplexError> {
    let g = finite_parts(p.table)?;
    let n = g.order;
    let nf = n as f64;
    let idx = edge_index(p.complex);
    let mut tensors: Vec<Tensor> = Vec::new();
    for (i, e) in p.complex.edges.iter().enumerate() {
        match p.fixed.get(&e.id) {
            Some(u) => {
                let mut d = vec![ZERO; n];
                d[element_index(u)] = ONE;
                tensors.push(Tensor::new(vec![i], vec![n], d));
            }
            None => tensors.push(Tensor::new(vec![i], vec![n], vec![Complex64::new(1.0 / nf, 0.0); n])),
        }
    }
    let pow = |x: usize, d: Dir| match d {
        Dir::Forward => x,
        Dir::Backward => g.inverse[x],
    };
    let mut next_label = p.complex.edges.len();
    let weight = Complex64::new(nf, 0.0);
    for f in &p.complex.faces {
        let k = f.edges.len();
        let lab = |j: usize| idx[&f.edges[j].0];
        match k {
            0 => tensors.push(Tensor::scalar(weight)),
            1 => {
                let d = f.edges[0].1;
                let data = (0..n).map(|x| if pow(x, d) == g.identity { weight } else { ZERO }).collect();
                tensors.push(Tensor::new(vec![lab(0)], vec![n], data));
            }
            _ => {
                // running product q over the first i edges
                let (d0, d1) = (f.edges[0].1, f.edges[1].1);
                let mut q_label;
                if k == 2 {
                    let data = (0..n * n)
                        .map(|ab| {
                            let h = g.mul(pow(ab / n, d0), pow(ab % n, d1));
                            if h == g.identity {
                                weight
                            } else {
                                ZERO
                            }
                        })
                        .collect();
                    tensors.push(Tensor::new(vec![lab(0), lab(1)], vec![n, n], data));
                    continue;
                }
                q_label = next_label;
                next_label += 1;
                let data = (0..n * n * n)
                    .map(|abq| {
                        let (a, b, q) = (abq / (n * n), (abq / n) % n, abq % n);
                        if g.mul(pow(a, d0), pow(b, d1)) == q {
                            ONE
                        } else {
                            ZERO
                        }
                    })
                    .collect();
                tensors.push(Tensor::new(vec![lab(0), lab(1), q_label], vec![n, n, n], data));
                for j in 2..k - 1 {
                    let dj = f.edges[j].1;
                    let q_new = next_label;
                    next_label += 1;
                    let data = (0..n * n * n)
                        .map(|qxq| {
                            let (q, x, r) = (qxq / (n * n), (qxq / n) % n, qxq % n);
                            if g.mul(q, pow(x, dj)) == r {
                                ONE
                            } else {
                                ZERO
                            }
                        })
                        .collect();
                    tensors.push(Tensor::new(vec![q_label, lab(j), q_new], vec![n, n, n], data));
                    q_label = q_new;
                }
                let dl = f.edges[k - 1].1;
                let data = (0..n * n)
                    .map(|qx| {
                        if g.mul(qx / n, pow(qx % n, dl)) == g.identity {
                            weight
                        } else {
                            ZERO
                        }
                    })
                    .collect();
                tensors.push(Tensor::new(vec![q_label, lab(k - 1)], vec![n, n], data));
            }
        }
    }
    for st in &p.states {
        let (edges, vals) = state_table(p.table, st)?;
        let labels: Vec<Label> = edges.iter().map(|e| idx[e]).collect();
        let dims = vec![n; labels.len()];
        tensors.push(Tensor::new(labels, dims, vals));
    }
    Ok(tensor::contract(tensors, &[]).data[0])
}

/// Sum over every assignment of the free edges.
pub fn brute_force(p: &Problem) -> Result<Complex64, TwoComplexError> {
    let g = finite_parts(p.table)?;
    let n = g.order;
    let idx = edge_index(p.complex);
    let free: Vec<usize> = p
        .complex
        .edges
        .iter()
        .map(|e| e.id)
        .filter(|e| !p.fixed.contains_key(e))
        .collect();
    let total = (n as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
    if total > BRUTE_FORCE_BUDGET {
        return Err(TwoComplexError::Budget {
            needed: total,
            limit: BRUTE_FORCE_BUDGET,
        });
    }
    let states: Vec<(Vec<usize>, Vec<Complex64>)> =
        p.states.iter().map(|s| state_table(p.table, s)).collect::<Result<_, _>>()?;
    let mut base = vec![0usize; p.complex.edges.len()];
    for (e, u) in &p.fixed {
        base[idx[e]] = element_index(u);
    }
    let free_pos: Vec<usize> = free.iter().map(|e| idx[e]).collect();
    let faces: Vec<Vec<(usize, Dir)>> = p
        .complex
        .faces
        .iter()
        .map(|f| f.edges.iter().map(|&(e, d)| (idx[&e], d)).collect())
        .collect();
    let face_weight = (n as f64).powi(faces.len() as i32);
    let sum = exec::sum_complex(total as usize, |k| {
        let mut a = base.clone();
        let mut rest = k;
        for &pos in free_pos.iter().rev() {
            a[pos] = rest % n;
            rest /= n;
        }
        for f in &faces {
            let mut h = g.identity;
            for &(e, d) in f {
                let x = if d == Dir::Forward { a[e] } else { g.inverse[a[e]] };
                h = g.mul(h, x);
            }
            if h != g.identity {
                return ZERO;
            }
        }
        let mut v = Complex64::new(face_weight, 0.0);
        for (edges, vals) in &states {
            let mut off = 0;
            for e in edges {
                off = off * n + a[idx[e]];
            }
            v *= vals[off];
        }
        v
    });
    Ok(sum / (n as f64).powi(free.len() as i32))
}

#[derive(Debug, Clone, Copy)]
enum OccIrrep {
    Face(usize),
    Fixed(IrrepLabel),
}

#[derive(Debug, Clone, Copy)]
struct Occ {
    irrep: OccIrrep,
    conj: bool,
    row: Label,
    col: Label,
}

/// Character expansion of every face delta; exact for finite groups and
/// truncated at the cutoff for SU(2).
pub fn character_expansion(p: &Problem) -> Result<Complex64, TwoComplexError> {
    let table = p.table;
    let idx = edge_index(p.complex);
    let ne = p.complex.edges.len();
    let mut occ: Vec<Vec<Occ>> = vec![Vec::new(); ne];
    let mut next: Label = 0;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    // face index labels a_{f,i}; occurrence i joins a_i and a_{i+1}
    let mut face_labels: Vec<Vec<Label>> = Vec::new();
    for (fi, f) in p.complex.faces.iter().enumerate() {
        let k = f.edges.len();
        let labels: Vec<Label> = (0..k).map(|_| fresh()).collect();
        for (i, &(e, d)) in f.edges.iter().enumerate() {
            let (a, b) = (labels[i], labels[(i + 1) % k]);
            let o = match d {
                Dir::Forward => Occ { irrep: OccIrrep::Face(fi), conj: false, row: a, col: b },
                Dir::Backward => Occ { irrep: OccIrrep::Face(fi), conj: true, row: b, col: a },
            };
            occ[idx[&e]].push(o);
        }
        face_labels.push(labels);
    }
    // boundary states: link l carries D(U_l)[target, source]
    let mut state_tensors: Vec<Tensor> = Vec::new();
    for st in &p.states {
        let sn = st.network;
        let ends: BTreeMap<(usize, bool), Label> = sn
            .graph
            .links
            .iter()
            .flat_map(|l| [(l.id, false), (l.id, true)])
            .map(|key| (key, fresh()))
            .collect();
        for l in &sn.graph.links {
            let &(e, rev) = st
                .links
                .get(&l.id)
                .ok_or_else(|| TwoComplexError::Boundary(format!("link {} is not attached", l.id)))?;
            let (t, s) = (ends[&(l.id, true)], ends[&(l.id, false)]);
            let r = sn.spins[&l.id];
            // D(U^-1)[t, s] = conj(D(U))[s, t]
            let o = match (st.conjugate, rev) {
                (false, false) => Occ { irrep: OccIrrep::Fixed(r), conj: false, row: t, col: s },
                (false, true) => Occ { irrep: OccIrrep::Fixed(r), conj: true, row: s, col: t },
                (true, false) => Occ { irrep: OccIrrep::Fixed(r), conj: true, row: t, col: s },
                (true, true) => Occ { irrep: OccIrrep::Fixed(r), conj: false, row: s, col: t },
            };
            occ[idx[&e]].push(o);
        }
        for &n in &sn.graph.nodes {
            let slots = sn.node_slots(n);
            let dims: Vec<usize> = slots.iter().map(|s| table.dim(s.irrep)).collect::<Result<_, _>>()?;
            let labels: Vec<Label> = sn.graph.endpoints(n).into_iter().map(|key| ends[&key]).collect();
            let mut v = sn.intertwiner_tensor(table, n)?;
            if st.conjugate {
                for x in &mut v {
                    *x = x.conj();
                }
            }
            state_tensors.push(Tensor::new(labels, dims, v));
        }
    }
    let bond_base = fresh();
    let fixed: Vec<Option<GroupElement>> = p.complex.edges.iter().map(|e| p.fixed.get(&e.id).copied()).collect();

    let irreps = table.irreps();
    let nfaces = p.complex.faces.len();
    // after assigning face fi, check the free edges whose last face is fi
    let mut check_after: Vec<Vec<usize>> = vec![Vec::new(); nfaces];
    let mut check_now: Vec<usize> = Vec::new();
    for (e, os) in occ.iter().enumerate() {
        if fixed[e].is_some() || os.is_empty() {
            continue;
        }
        match os.iter().filter_map(|o| match o.irrep {
            OccIrrep::Face(f) => Some(f),
            OccIrrep::Fixed(_) => None,
        }).max() {
            Some(f) => check_after[f].push(e),
            None => check_now.push(e),
        }
    }
    let slots_of = |e: usize, spins: &[IrrepLabel]| -> Vec<Slot> {
        occ[e]
            .iter()
            .map(|o| Slot {
                irrep: match o.irrep {
                    OccIrrep::Face(f) => spins[f],
                    OccIrrep::Fixed(r) => r,
                },
                conjugate: o.conj,
            })
            .collect()
    };
    for &e in &check_now {
        if invariant_dim(table, &slots_of(e, &[]))? == 0 {
            return Ok(ZERO);
        }
    }
    let mut assignments: Vec<Vec<IrrepLabel>> = Vec::new();
    let mut cur: Vec<IrrepLabel> = vec![IrrepLabel(0); nfaces];
    fn rec(
        fi: usize,
        cur: &mut Vec<IrrepLabel>,
        irreps: &[IrrepLabel],
        check_after: &[Vec<usize>],
        ok: &dyn Fn(usize, &[IrrepLabel]) -> Result<bool, TwoComplexError>,
        out: &mut Vec<Vec<IrrepLabel>>,
    ) -> Result<(), TwoComplexError> {
        if fi == cur.len() {
            out.push(cur.clone());
            return Ok(());
        }
        for &r in irreps {
            cur[fi] = r;
            let mut good = true;
            for &e in &check_after[fi] {
                if !ok(e, cur)? {
                    good = false;
                    break;
                }
            }
            if good {
                rec(fi + 1, cur, irreps, check_after, ok, out)?;
            }
        }
        Ok(())
    }
    let ok = |e: usize, spins: &[IrrepLabel]| -> Result<bool, TwoComplexError> {
        Ok(invariant_dim(table, &slots_of(e, spins))? > 0)
    };
    rec(0, &mut cur, &irreps, &check_after, &ok, &mut assignments)?;

    let term = |spins: &Vec<IrrepLabel>| -> Result<Complex64, TwoComplexError> {
        let mut weight = 1.0;
        for (fi, r) in spins.iter().enumerate() {
            let d = table.dim(*r)? as f64;
            // a face with no edges contributes d * chi(e) = d^2
            weight *= if face_labels[fi].is_empty() { d * d } else { d };
        }
        let mut ts: Vec<Tensor> = state_tensors.clone();
        for e in 0..ne {
            if occ[e].is_empty() {
                continue;
            }
            let slots = slots_of(e, spins);
            let dims: Vec<usize> = slots.iter().map(|s| table.dim(s.irrep)).collect::<Result<_, _>>()?;
            match &fixed[e] {
                Some(u) => {
                    for (o, s) in occ[e].iter().zip(&slots) {
                        let m = table.rep_matrix(s.irrep, u)?;
                        let d = m.nrows();
                        let data = (0..d * d)
                            .map(|k| {
                                let z = m[(k / d, k % d)];
                                if o.conj {
                                    z.conj()
                                } else {
                                    z
                                }
                            })
                            .collect();
                        ts.push(Tensor::new(vec![o.row, o.col], vec![d, d], data));
                    }
                }
                None => {
                    let basis = cached_invariant_basis(table, &slots)?;
                    let nb = basis.len();
                    if nb == 0 {
                        return Ok(ZERO);
                    }
                    let flat: usize = dims.iter().product();
                    let bond = bond_base + 1 + e;
                    let mut rows: Vec<Label> = occ[e].iter().map(|o| o.row).collect();
                    let mut cols: Vec<Label> = occ[e].iter().map(|o| o.col).collect();
                    rows.push(bond);
                    cols.push(bond);
                    let mut vd = dims.clone();
                    vd.push(nb);
                    let mut v = vec![ZERO; flat * nb];
                    let mut vbar = vec![ZERO; flat * nb];
                    for (b, vec) in basis.iter().enumerate() {
                        for (k, z) in vec.iter().enumerate() {
                            v[k * nb + b] = *z;
                            vbar[k * nb + b] = z.conj();
                        }
                    }
                    ts.push(Tensor::new(rows, vd.clone(), v));
                    ts.push(Tensor::new(cols, vd, vbar));
                }
            }
        }
        Ok(tensor::contract(ts, &[]).data[0] * weight)
    };
    let terms = exec::map_slice(&assignments, term);
    let mut acc = ZERO;
    for t in terms {
        acc += t?;
    }
    Ok(acc)
}
