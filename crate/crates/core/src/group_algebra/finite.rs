//! The finite-group catalog: cyclic groups, S3 and Q8.
//!
//! Each group is built from an explicit multiplication rule. Irreducible
//! representations are given as explicit unitary matrices; characters are their
//! traces.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One irreducible unitary representation, stored as a matrix per element.
#[derive(Debug, Clone)]
pub struct FiniteIrrep {
    pub name: String,
    pub dim: usize,
    pub matrices: Vec<CMat>,
}

/// A finite group with multiplication table, conjugacy classes and irreps.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub name: String,
    pub order: usize,
    pub element_names: Vec<String>,
    /// `table[a * order + b]` is the index of `a * b`.
    pub table: Vec<usize>,
    pub inverse: Vec<usize>,
    pub identity: usize,
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub irreps: Vec<FiniteIrrep>,
    /// `characters[irrep][class]`.
    pub characters: Vec<Vec<Complex64>>,
}

impl FiniteGroup {
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    fn from_parts(
        name: String,
        element_names: Vec<String>,
        table: Vec<usize>,
        irreps: Vec<FiniteIrrep>,
    ) -> Self {
        let order = element_names.len();
        let identity = (0..order)
            .find(|&e| (0..order).all(|g| table[e * order + g] == g))
            .expect("multiplication table has an identity");
        let inverse: Vec<usize> = (0..order)
            .map(|g| {
                (0..order)
                    .find(|&h| table[g * order + h] == identity)
                    .expect("every element has an inverse")
            })
            .collect();

        let mut class_of = vec![usize::MAX; order];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for g in 0..order {
            if class_of[g] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            for h in 0..order {
                let conj = table[table[h * order + g] * order + inverse[h]];
                if class_of[conj] == usize::MAX {
                    class_of[conj] = id;
                    members.push(conj);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }

        let characters = irreps
            .iter()
            .map(|r| classes.iter().map(|cl| r.matrices[cl[0]].trace()).collect())
            .collect();

        FiniteGroup {
            name,
            order,
            element_names,
            table,
            inverse,
            identity,
            class_of,
            classes,
            irreps,
            characters,
        }
    }

    /// The cyclic group Z_n, generator at index 1, element `k` is `g^k`.
    pub fn cyclic(n: usize) -> Self {
        let names = (0..n).map(|k| format!("g^{k}")).collect();
        let table = (0..n * n).map(|ab| (ab / n + ab % n) % n).collect();
        let irreps = (0..n)
            .map(|k| FiniteIrrep {
                name: format!("chi_{k}"),
                dim: 1,
                matrices: (0..n)
                    .map(|m| {
                        let phase = 2.0 * PI * ((k * m) % n) as f64 / n as f64;
                        CMat::from_element(1, 1, Complex64::from_polar(1.0, phase))
                    })
                    .collect(),
            })
            .collect();
        Self::from_parts(format!("Z{n}"), names, table, irreps)
    }

    /// The symmetric group on three letters, elements in lexicographic order
    /// of their one-line notation.
    pub fn s3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let n = perms.len();
        let mut table = vec![0; n * n];
        for (a, pa) in perms.iter().enumerate() {
            for (b, pb) in perms.iter().enumerate() {
                // (a * b)(i) = a(b(i))
                table[a * n + b] = index([pa[pb[0]], pa[pb[1]], pa[pb[2]]]);
            }
        }
        let names = perms
            .iter()
            .map(|p| format!("[{}{}{}]", p[0], p[1], p[2]))
            .collect();

        let sign = |p: &[usize; 3]| {
            let mut inv = 0;
            for i in 0..3 {
                for j in i + 1..3 {
                    if p[i] > p[j] {
                        inv += 1;
                    }
                }
            }
            if inv % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        };

        // Standard representation: permutation matrices restricted to the
        // sum-zero plane, in the orthonormal basis below.
        let e1 = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
        let e2 = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()];
        let basis = [e1, e2];
        let standard = perms
            .iter()
            .map(|p| {
                let mut m = CMat::zeros(2, 2);
                for (col, b) in basis.iter().enumerate() {
                    // permuted vector: (P b)[p(i)] = b[i]
                    let mut pb = [0.0; 3];
                    for i in 0..3 {
                        pb[p[i]] = b[i];
                    }
                    for (row, r) in basis.iter().enumerate() {
                        let dot: f64 = (0..3).map(|i| r[i] * pb[i]).sum();
                        m[(row, col)] = c(dot, 0.0);
                    }
                }
                m
            })
            .collect();

        let irreps = vec![
            FiniteIrrep {
                name: "trivial".into(),
                dim: 1,
                matrices: perms.iter().map(|_| CMat::from_element(1, 1, c(1.0, 0.0))).collect(),
            },
            FiniteIrrep {
                name: "sign".into(),
                dim: 1,
                matrices: perms
                    .iter()
                    .map(|p| CMat::from_element(1, 1, c(sign(p), 0.0)))
                    .collect(),
            },
            FiniteIrrep {
                name: "standard".into(),
                dim: 2,
                matrices: standard,
            },
        ];
        Self::from_parts("S3".into(), names, table, irreps)
    }

    /// The quaternion group. Element `2 * u + s` is `(-1)^s * unit[u]` with
    /// units `1, i, j, k`.
    pub fn q8() -> Self {
        // unit products: (sign, unit) of unit[a] * unit[b]
        const PROD: [[(u8, usize); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let n = 8;
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let (ua, sa) = (a / 2, a % 2);
                let (ub, sb) = (b / 2, b % 2);
                let (sp, up) = PROD[ua][ub];
                let s = (sa + sb + sp as usize) % 2;
                table[a * n + b] = 2 * up + s;
            }
        }
        let unit_names = ["1", "i", "j", "k"];
        let names = (0..n)
            .map(|g| {
                let prefix = if g % 2 == 1 { "-" } else { "" };
                format!("{prefix}{}", unit_names[g / 2])
            })
            .collect();

        let quat = |u: usize| -> CMat {
            let z = c(0.0, 0.0);
            let one = c(1.0, 0.0);
            let i = c(0.0, 1.0);
            match u {
                0 => CMat::from_row_slice(2, 2, &[one, z, z, one]),
                1 => CMat::from_row_slice(2, 2, &[i, z, z, -i]),
                2 => CMat::from_row_slice(2, 2, &[z, one, -one, z]),
                _ => CMat::from_row_slice(2, 2, &[z, i, i, z]),
            }
        };
        let sign_char = |kernel_unit: usize, g: usize| -> f64 {
            let u = g / 2;
            if u == 0 || u == kernel_unit {
                1.0
            } else {
                -1.0
            }
        };
        let one_dim = |name: &str, f: &dyn Fn(usize) -> f64| FiniteIrrep {
            name: name.into(),
            dim: 1,
            matrices: (0..n).map(|g| CMat::from_element(1, 1, c(f(g), 0.0))).collect(),
        };
        let irreps = vec![
            one_dim("trivial", &|_| 1.0),
            one_dim("chi_i", &|g| sign_char(1, g)),
            one_dim("chi_j", &|g| sign_char(2, g)),
            one_dim("chi_k", &|g| sign_char(3, g)),
            FiniteIrrep {
                name: "quaternionic".into(),
                dim: 2,
                matrices: (0..n)
                    .map(|g| {
                        let m = quat(g / 2);
                        if g % 2 == 1 {
                            -m
                        } else {
                            m
                        }
                    })
                    .collect(),
            },
        ];
        Self::from_parts("Q8".into(), names, table, irreps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all() -> Vec<FiniteGroup> {
        let mut v: Vec<_> = (1..=12).map(FiniteGroup::cyclic).collect();
        v.push(FiniteGroup::s3());
        v.push(FiniteGroup::q8());
        v
    }

    #[test]
    fn tables_are_associative() {
        for g in all() {
            for a in 0..g.order {
                for b in 0..g.order {
                    for c in 0..g.order {
                        assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)), "{}", g.name);
                    }
                }
            }
        }
    }

    #[test]
    fn irreps_are_homomorphisms() {
        for g in all() {
            for r in &g.irreps {
                for a in 0..g.order {
                    for b in 0..g.order {
                        let lhs = &r.matrices[a] * &r.matrices[b];
                        let rhs = &r.matrices[g.mul(a, b)];
                        assert!((lhs - rhs).norm() < 1e-12, "{} {}", g.name, r.name);
                    }
                    let u = &r.matrices[a];
                    let should_be_id = u * u.adjoint();
                    assert!((should_be_id - CMat::identity(r.dim, r.dim)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn class_counts() {
        assert_eq!(FiniteGroup::s3().classes.len(), 3);
        assert_eq!(FiniteGroup::q8().classes.len(), 5);
        assert_eq!(FiniteGroup::cyclic(7).classes.len(), 7);
    }
}
