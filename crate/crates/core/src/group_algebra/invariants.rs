//! Invariant subspaces of tensor products of irreps.
//!
//! A [`Slot`] is one tensor factor: an irrep, or its complex conjugate. The
//! invariant subspace of `⊗ slots` is what node intertwiners live in and what
//! the Haar integral of a product of representation matrices projects onto.
//! Tensors are stored row-major with slot 0 most significant.

use super::{GroupError, GroupSpec, IrrepLabel, IrrepTable, TableKind};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// One tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub irrep: IrrepLabel,
    pub conjugate: bool,
}

impl Slot {
    pub fn plain(irrep: IrrepLabel) -> Self {
        Self { irrep, conjugate: false }
    }
    pub fn conj(irrep: IrrepLabel) -> Self {
        Self { irrep, conjugate: true }
    }
}

fn ln_factorial(n: i64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![0.0; 1024];
        for k in 1..v.len() {
            v[k] = v[k - 1] + (k as f64).ln();
        }
        v
    });
    t[n as usize]
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>`, all arguments doubled.
pub fn clebsch_gordan(j1: i64, m1: i64, j2: i64, m2: i64, jj: i64, mm: i64) -> f64 {
    if m1 + m2 != mm || m1.abs() > j1 || m2.abs() > j2 || mm.abs() > jj {
        return 0.0;
    }
    if jj < (j1 - j2).abs() || jj > j1 + j2 || (j1 + j2 + jj) % 2 != 0 {
        return 0.0;
    }
    if (j1 + m1) % 2 != 0 || (j2 + m2) % 2 != 0 || (jj + mm) % 2 != 0 {
        return 0.0;
    }
    // undoubled integer combinations
    let a = (jj + j1 - j2) / 2;
    let b = (jj - j1 + j2) / 2;
    let cc = (j1 + j2 - jj) / 2;
    let s = (j1 + j2 + jj) / 2 + 1;
    let ln_pre = 0.5
        * (((jj + 1) as f64).ln() + ln_factorial(a) + ln_factorial(b) + ln_factorial(cc)
            - ln_factorial(s)
            + ln_factorial((jj + mm) / 2)
            + ln_factorial((jj - mm) / 2)
            + ln_factorial((j1 - m1) / 2)
            + ln_factorial((j1 + m1) / 2)
            + ln_factorial((j2 - m2) / 2)
            + ln_factorial((j2 + m2) / 2));
    let k_min = 0.max((j2 - jj - m1) / 2).max((j1 - jj + m2) / 2);
    let k_max = cc.min((j1 - m1) / 2).min((j2 + m2) / 2);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ln_den = ln_factorial(k)
            + ln_factorial(cc - k)
            + ln_factorial((j1 - m1) / 2 - k)
            + ln_factorial((j2 + m2) / 2 - k)
            + ln_factorial((jj - j2 + m1) / 2 + k)
            + ln_factorial((jj - j1 - m2) / 2 + k);
        let term = (ln_pre - ln_den).exp();
        sum += if k % 2 == 0 { term } else { -term };
    }
    sum
}

/// Number of times spin 0 occurs in `⊗ spins` (doubled).
pub fn su2_invariant_count(twice_spins: &[u32]) -> usize {
    // multiplicities of each doubled total spin while coupling left to right
    let mut mult: Vec<usize> = vec![1];
    for &j in twice_spins {
        let mut next = vec![0usize; mult.len() + j as usize];
        for (k, &m) in mult.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let (k, j) = (k as i64, j as i64);
            let mut t = (k - j).abs();
            while t <= k + j {
                next[t as usize] += m;
                t += 2;
            }
        }
        mult = next;
    }
    mult[0]
}

/// Enumerates admissible intermediate spins for the left-to-right coupling
/// tree. `path[i]` is the doubled spin after coupling slots `0..=i+1`.
fn recoupling_paths(spins: &[u32]) -> Vec<Vec<u32>> {
    let n = spins.len();
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    fn rec(spins: &[u32], cur: u32, i: usize, path: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let n = spins.len();
        if i == n {
            if cur == 0 {
                out.push(path.clone());
            }
            return;
        }
        let j = spins[i];
        let lo = (cur as i64 - j as i64).unsigned_abs() as u32;
        let hi = cur + j;
        let mut k = lo;
        while k <= hi {
            // remaining slots must be able to bring the total back to zero
            let rest: u32 = spins[i + 1..].iter().sum();
            if k <= rest || i + 1 == n {
                path.push(k);
                rec(spins, k, i + 1, path, out);
                path.pop();
            }
            k += 2;
        }
    }
    let mut path = Vec::new();
    rec(spins, spins[0], 1, &mut path, &mut out);
    out
}

/// Dimension of the invariant subspace.
pub fn invariant_dim(table: &IrrepTable, slots: &[Slot]) -> Result<usize, GroupError> {
    for s in slots {
        table.dim(s.irrep)?;
    }
    match &table.kind {
        TableKind::Su2 { .. } => {
            let spins: Vec<u32> = slots.iter().map(|s| s.irrep.0).collect();
            Ok(su2_invariant_count(&spins))
        }
        TableKind::Finite(g) => {
            let mut total = Complex64::new(0.0, 0.0);
            for cl in &g.classes {
                let mut prod = Complex64::new(cl.len() as f64, 0.0);
                for s in slots {
                    let chi = g.characters[s.irrep.0 as usize][g.class_of[cl[0]]];
                    prod *= if s.conjugate { chi.conj() } else { chi };
                }
                total += prod;
            }
            Ok((total.re / g.order as f64).round() as usize)
        }
    }
}

/// Orthonormal basis of the invariant subspace.
///
/// SU(2): one vector per admissible left-to-right coupling path, in
/// lexicographic order of the intermediate spins; conjugate slots are mapped
/// through `(Cv)[a] = (-1)^a v[2j - a]`. Finite groups: the group-averaging
/// projector applied to standard basis vectors in order, Gram-Schmidt
/// orthonormalised.
pub fn invariant_basis(table: &IrrepTable, slots: &[Slot]) -> Result<Vec<Vec<Complex64>>, GroupError> {
    let dims: Vec<usize> = slots
        .iter()
        .map(|s| table.dim(s.irrep))
        .collect::<Result<_, _>>()?;
    let total: usize = dims.iter().product();
    match &table.kind {
        TableKind::Su2 { .. } => {
            let spins: Vec<u32> = slots.iter().map(|s| s.irrep.0).collect();
            let mut basis = su2_tree_basis(&spins);
            for v in &mut basis {
                apply_conjugation(v, &dims, slots);
            }
            Ok(basis)
        }
        TableKind::Finite(g) => {
            let want = invariant_dim(table, slots)?;
            let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(want);
            let strides = strides(&dims);
            for k in 0..total {
                if basis.len() == want {
                    break;
                }
                let digits: Vec<usize> = (0..dims.len()).map(|s| (k / strides[s]) % dims[s]).collect();
                let mut v = vec![Complex64::new(0.0, 0.0); total];
                for el in 0..g.order {
                    let cols: Vec<Vec<Complex64>> = slots
                        .iter()
                        .zip(&digits)
                        .map(|(s, &d)| {
                            let m = &g.irreps[s.irrep.0 as usize].matrices[el];
                            (0..m.nrows())
                                .map(|r| if s.conjugate { m[(r, d)].conj() } else { m[(r, d)] })
                                .collect()
                        })
                        .collect();
                    accumulate_outer(&mut v, &cols, &dims, &strides);
                }
                for b in &basis {
                    let dot: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi -= dot * bi;
                    }
                }
                let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                if norm > 1e-9 {
                    // fix the phase: first significant entry real positive
                    let lead = v.iter().find(|x| x.norm() > 1e-9).copied().unwrap();
                    let phase = lead.conj() / lead.norm();
                    for x in &mut v {
                        *x *= phase / norm;
                    }
                    basis.push(v);
                }
            }
            Ok(basis)
        }
    }
}

/// [`invariant_basis`] memoised per group and slot signature.
pub fn cached_invariant_basis(table: &IrrepTable, slots: &[Slot]) -> Result<Arc<Vec<Vec<Complex64>>>, GroupError> {
    type Cache = Mutex<HashMap<(GroupSpec, Vec<Slot>), Arc<Vec<Vec<Complex64>>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (table.spec(), slots.to_vec());
    if let Some(b) = cache.lock().unwrap().get(&key) {
        return Ok(b.clone());
    }
    let b = Arc::new(invariant_basis(table, slots)?);
    cache.lock().unwrap().insert(key, b.clone());
    Ok(b)
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn accumulate_outer(v: &mut [Complex64], cols: &[Vec<Complex64>], dims: &[usize], strides: &[usize]) {
    let total = v.len();
    for (k, vk) in v.iter_mut().enumerate().take(total) {
        let mut p = Complex64::new(1.0, 0.0);
        for s in 0..dims.len() {
            p *= cols[s][(k / strides[s]) % dims[s]];
            if p == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        *vk += p;
    }
}

fn apply_conjugation(v: &mut [Complex64], dims: &[usize], slots: &[Slot]) {
    let st = strides(dims);
    for (s, slot) in slots.iter().enumerate() {
        if !slot.conjugate {
            continue;
        }
        let d = dims[s];
        let old = v.to_vec();
        for (k, vk) in v.iter_mut().enumerate() {
            let a = (k / st[s]) % d;
            let src = k - a * st[s] + (d - 1 - a) * st[s];
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            *vk = old[src] * sign;
        }
    }
}

fn su2_tree_basis(spins: &[u32]) -> Vec<Vec<Complex64>> {
    let n = spins.len();
    let dims: Vec<usize> = spins.iter().map(|&j| j as usize + 1).collect();
    let total: usize = dims.iter().product();
    match n {
        0 => return vec![vec![Complex64::new(1.0, 0.0)]],
        1 => {
            return if spins[0] == 0 {
                vec![vec![Complex64::new(1.0, 0.0)]]
            } else {
                Vec::new()
            }
        }
        _ => {}
    }
    let mut out = Vec::new();
    for path in recoupling_paths(spins) {
        // coupled[M index] = vector over the first i slots with total spin k
        // and projection m = k - index (doubled: k - 2*index)
        let j0 = spins[0] as i64;
        let mut k_cur = j0;
        let mut coupled: Vec<Vec<f64>> = (0..=spins[0] as usize)
            .map(|a| {
                let mut e = vec![0.0; dims[0]];
                e[a] = 1.0;
                e
            })
            .collect();
        let mut cur_len = dims[0];
        for (i, &k_next) in path.iter().enumerate() {
            let j = spins[i + 1] as i64;
            let dj = dims[i + 1];
            let k_next = k_next as i64;
            let next_len = cur_len * dj;
            let mut next: Vec<Vec<f64>> = vec![vec![0.0; next_len]; (k_next + 1) as usize];
            for (mi, vec_m) in coupled.iter().enumerate() {
                let m = k_cur - 2 * mi as i64;
                for a in 0..dj {
                    let mj = j - 2 * a as i64;
                    let mm = m + mj;
                    if mm.abs() > k_next {
                        continue;
                    }
                    let cg = clebsch_gordan(k_cur, m, j, mj, k_next, mm);
                    if cg == 0.0 {
                        continue;
                    }
                    let target = &mut next[((k_next - mm) / 2) as usize];
                    for (idx, &x) in vec_m.iter().enumerate() {
                        if x != 0.0 {
                            target[idx * dj + a] += cg * x;
                        }
                    }
                }
            }
            coupled = next;
            cur_len = next_len;
            k_cur = k_next;
        }
        debug_assert_eq!(cur_len, total);
        out.push(coupled.swap_remove(0).into_iter().map(|x| Complex64::new(x, 0.0)).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_algebra::{GroupSpec, IrrepTable};

    #[test]
    fn clebsch_gordan_known_values() {
        // <1/2 1/2; 1/2 -1/2 | 0 0> = 1/sqrt 2
        let v = clebsch_gordan(1, 1, 1, -1, 0, 0);
        assert!((v - 0.5f64.sqrt()).abs() < 1e-14);
        let v = clebsch_gordan(1, -1, 1, 1, 0, 0);
        assert!((v + 0.5f64.sqrt()).abs() < 1e-14);
        // <1 0; 1 0 | 0 0> = -1/sqrt 3
        let v = clebsch_gordan(2, 0, 2, 0, 0, 0);
        assert!((v + (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        // stretched state
        assert!((clebsch_gordan(3, 3, 2, 2, 5, 5) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn invariant_counts() {
        assert_eq!(su2_invariant_count(&[1, 1, 2]), 1);
        assert_eq!(su2_invariant_count(&[1, 1, 1]), 0);
        assert_eq!(su2_invariant_count(&[2, 2, 2, 2]), 3);
        assert_eq!(su2_invariant_count(&[]), 1);
        assert_eq!(su2_invariant_count(&[1]), 0);
    }

    fn check_basis(table: &IrrepTable, slots: &[Slot]) {
        let basis = invariant_basis(table, slots).unwrap();
        assert_eq!(basis.len(), invariant_dim(table, slots).unwrap());
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let dot: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).norm() < 1e-10, "{slots:?}");
            }
        }
    }

    #[test]
    fn bases_are_orthonormal() {
        let su2 = IrrepTable::new(GroupSpec::Su2 { twice_cutoff: 6 }).unwrap();
        let l = IrrepLabel;
        check_basis(&su2, &[Slot::plain(l(2)), Slot::plain(l(2)), Slot::plain(l(2)), Slot::plain(l(2))]);
        check_basis(&su2, &[Slot::plain(l(1)), Slot::conj(l(1)), Slot::plain(l(2))]);
        let s3 = IrrepTable::new(GroupSpec::S3).unwrap();
        check_basis(&s3, &[Slot::plain(l(2)), Slot::conj(l(2)), Slot::plain(l(2)), Slot::conj(l(2))]);
        let z5 = IrrepTable::new(GroupSpec::Cyclic(5)).unwrap();
        check_basis(&z5, &[Slot::plain(l(2)), Slot::plain(l(3))]);
    }

    #[test]
    fn conjugation_map_intertwines() {
        use crate::group_algebra::su2::{wigner_matrix, Su2Element};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for twice_j in 0..6u32 {
            let u = Su2Element::random(&mut rng);
            let d = wigner_matrix(twice_j, &u);
            let n = d.nrows();
            // C D = conj(D) C with (Cv)[a] = (-1)^a v[n-1-a]
            let c = nalgebra::DMatrix::from_fn(n, n, |a, b| {
                if b == n - 1 - a {
                    Complex64::new(if a % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let lhs = &c * &d;
            let rhs = d.map(|z| z.conj()) * &c;
            assert!((lhs - rhs).norm() < 1e-12, "j2={twice_j}");
        }
    }
}
