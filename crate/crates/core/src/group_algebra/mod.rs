//! Groups, irreducible representations, characters and Haar integration.
//!
//! Two tiers are supported. The finite catalog (`Z_n` for `n <= 12`, `S3`,
//! `Q8`) is evaluated by exact finite sums. `SU(2)` is truncated at a spin
//! cutoff and class-function integrals use Gauss-Legendre quadrature.

pub mod finite;
pub mod invariants;
pub mod quadrature;
pub mod su2;

pub use finite::{FiniteGroup, FiniteIrrep};
pub use invariants::{cached_invariant_basis, clebsch_gordan, invariant_basis, invariant_dim, Slot};
pub use su2::Su2Element;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroupError {
    #[error("invalid group spec `{0}`")]
    InvalidSpec(String),
    #[error("irrep {label} is not in {group}")]
    UnknownIrrep { label: u32, group: String },
    #[error("element is not in {0}")]
    ElementOutsideGroup(String),
    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),
    #[error("quadrature did not converge: {coarse} nodes gave {v_coarse}, {fine} gave {v_fine}")]
    NonConvergent {
        coarse: usize,
        fine: usize,
        v_coarse: f64,
        v_fine: f64,
    },
}

/// Which group. SU(2) carries its spin cutoff as twice the spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    Cyclic(usize),
    S3,
    Q8,
    Su2 { twice_cutoff: u32 },
}

impl GroupSpec {
    pub fn is_finite(&self) -> bool {
        !matches!(self, GroupSpec::Su2 { .. })
    }

    pub fn validate(&self) -> Result<(), GroupError> {
        match *self {
            GroupSpec::Cyclic(n) if n == 0 || n > 12 => Err(GroupError::InvalidSpec(self.to_string())),
            GroupSpec::Su2 { twice_cutoff: 0 } => Err(GroupError::InvalidSpec(self.to_string())),
            _ => Ok(()),
        }
    }
}

/// Formats `twice_j / 2` as `1`, `3/2`, ...
pub fn format_spin(twice_j: u32) -> String {
    if twice_j % 2 == 0 {
        (twice_j / 2).to_string()
    } else {
        format!("{twice_j}/2")
    }
}

/// Parses `1`, `3/2` or `1.5` into twice the spin.
pub fn parse_spin(s: &str) -> Option<u32> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: u32 = num.trim().parse().ok()?;
        return match den.trim() {
            "2" => Some(num),
            "1" => Some(2 * num),
            _ => None,
        };
    }
    let v: f64 = s.parse().ok()?;
    let twice = (2.0 * v).round();
    if v < 0.0 || (2.0 * v - twice).abs() > 1e-9 {
        return None;
    }
    Some(twice as u32)
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "Z{n}"),
            GroupSpec::S3 => write!(f, "S3"),
            GroupSpec::Q8 => write!(f, "Q8"),
            GroupSpec::Su2 { twice_cutoff } => write!(f, "SU2:{}", format_spin(*twice_cutoff)),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::InvalidSpec(s.to_string());
        let t = s.trim();
        let spec = match t.to_ascii_uppercase().as_str() {
            "S3" => GroupSpec::S3,
            "Q8" => GroupSpec::Q8,
            u if u.starts_with("SU2") => {
                let rest = t[3..].trim_start_matches([':', '(']).trim_end_matches(')');
                GroupSpec::Su2 {
                    twice_cutoff: parse_spin(rest).ok_or_else(bad)?,
                }
            }
            u if u.starts_with('Z') => GroupSpec::Cyclic(u[1..].parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Irrep label: a row of the character table for finite groups, twice the
/// spin for SU(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrepLabel(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupElement {
    Finite(usize),
    Su2(Su2Element),
}

impl GroupElement {
    pub fn su2_angle(theta: f64) -> Self {
        GroupElement::Su2(Su2Element::from_class_angle(theta))
    }
}

/// How an amplitude was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "tier")]
pub enum Exactness {
    Exact,
    CutoffApprox { twice_cutoff: u32 },
    Quadrature { nodes: usize },
}

#[derive(Debug, Clone)]
pub(crate) enum TableKind {
    Finite(Arc<FiniteGroup>),
    Su2 { twice_cutoff: u32 },
}

/// A group together with its irreducible representations.
#[derive(Debug, Clone)]
pub struct IrrepTable {
    spec: GroupSpec,
    pub(crate) kind: TableKind,
}

/// Default quadrature size for SU(2) class-function integrals.
pub const DEFAULT_HAAR_NODES: usize = 256;

#[derive(Debug, Clone, Copy)]
pub struct HaarOptions {
    pub nodes: usize,
    /// Allowed disagreement between `nodes` and `2 * nodes`.
    pub tol: f64,
}

impl Default for HaarOptions {
    fn default() -> Self {
        Self {
            nodes: DEFAULT_HAAR_NODES,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaarValue {
    pub value: Complex64,
    pub exactness: Exactness,
}

impl IrrepTable {
    pub fn new(spec: GroupSpec) -> Result<Self, GroupError> {
        spec.validate()?;
        let kind = match spec {
            GroupSpec::Cyclic(n) => TableKind::Finite(Arc::new(FiniteGroup::cyclic(n))),
            GroupSpec::S3 => TableKind::Finite(Arc::new(FiniteGroup::s3())),
            GroupSpec::Q8 => TableKind::Finite(Arc::new(FiniteGroup::q8())),
            GroupSpec::Su2 { twice_cutoff } => TableKind::Su2 { twice_cutoff },
        };
        Ok(Self { spec, kind })
    }

    pub fn spec(&self) -> GroupSpec {
        self.spec
    }

    pub fn finite(&self) -> Option<&FiniteGroup> {
        match &self.kind {
            TableKind::Finite(g) => Some(g),
            TableKind::Su2 { .. } => None,
        }
    }

    pub fn twice_cutoff(&self) -> Option<u32> {
        match self.kind {
            TableKind::Su2 { twice_cutoff } => Some(twice_cutoff),
            TableKind::Finite(_) => None,
        }
    }

    /// Exactness tier of sums over this table's irreps.
    pub fn exactness(&self) -> Exactness {
        match self.kind {
            TableKind::Finite(_) => Exactness::Exact,
            TableKind::Su2 { twice_cutoff } => Exactness::CutoffApprox { twice_cutoff },
        }
    }

    pub fn irreps(&self) -> Vec<IrrepLabel> {
        let n = match &self.kind {
            TableKind::Finite(g) => g.irreps.len() as u32,
            TableKind::Su2 { twice_cutoff } => twice_cutoff + 1,
        };
        (0..n).map(IrrepLabel).collect()
    }

    pub fn contains_irrep(&self, r: IrrepLabel) -> bool {
        match &self.kind {
            TableKind::Finite(g) => (r.0 as usize) < g.irreps.len(),
            TableKind::Su2 { twice_cutoff } => r.0 <= *twice_cutoff,
        }
    }

    fn check_irrep(&self, r: IrrepLabel) -> Result<(), GroupError> {
        if self.contains_irrep(r) {
            Ok(())
        } else {
            Err(GroupError::UnknownIrrep {
                label: r.0,
                group: self.spec.to_string(),
            })
        }
    }

    pub fn check_element(&self, u: &GroupElement) -> Result<(), GroupError> {
        let ok = match (&self.kind, u) {
            (TableKind::Finite(g), GroupElement::Finite(i)) => *i < g.order,
            (TableKind::Su2 { .. }, GroupElement::Su2(e)) => e.is_unitary(1e-9),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::ElementOutsideGroup(self.spec.to_string()))
        }
    }

    pub fn irrep_name(&self, r: IrrepLabel) -> Result<String, GroupError> {
        self.check_irrep(r)?;
        Ok(match &self.kind {
            TableKind::Finite(g) => g.irreps[r.0 as usize].name.clone(),
            TableKind::Su2 { .. } => format!("j={}", format_spin(r.0)),
        })
    }

    pub fn dim(&self, r: IrrepLabel) -> Result<usize, GroupError> {
        self.check_irrep(r)?;
        Ok(match &self.kind {
            TableKind::Finite(g) => g.irreps[r.0 as usize].dim,
            TableKind::Su2 { .. } => r.0 as usize + 1,
        })
    }

    pub fn character(&self, r: IrrepLabel, u: &GroupElement) -> Result<Complex64, GroupError> {
        self.check_irrep(r)?;
        self.check_element(u)?;
        Ok(match (&self.kind, u) {
            (TableKind::Finite(g), GroupElement::Finite(i)) => g.characters[r.0 as usize][g.class_of[*i]],
            (TableKind::Su2 { .. }, GroupElement::Su2(e)) => Complex64::new(su2::character(r.0, e), 0.0),
            _ => unreachable!(),
        })
    }

    pub fn rep_matrix(&self, r: IrrepLabel, u: &GroupElement) -> Result<DMatrix<Complex64>, GroupError> {
        self.check_irrep(r)?;
        self.check_element(u)?;
        Ok(match (&self.kind, u) {
            (TableKind::Finite(g), GroupElement::Finite(i)) => g.irreps[r.0 as usize].matrices[*i].clone(),
            (TableKind::Su2 { .. }, GroupElement::Su2(e)) => su2::wigner_matrix(r.0, e),
            _ => unreachable!(),
        })
    }

    pub fn identity(&self) -> GroupElement {
        match &self.kind {
            TableKind::Finite(g) => GroupElement::Finite(g.identity),
            TableKind::Su2 { .. } => GroupElement::Su2(Su2Element::identity()),
        }
    }

    pub fn compose(&self, u: &GroupElement, v: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_element(u)?;
        self.check_element(v)?;
        Ok(match (&self.kind, u, v) {
            (TableKind::Finite(g), GroupElement::Finite(a), GroupElement::Finite(b)) => {
                GroupElement::Finite(g.mul(*a, *b))
            }
            (TableKind::Su2 { .. }, GroupElement::Su2(a), GroupElement::Su2(b)) => GroupElement::Su2(a.compose(b)),
            _ => unreachable!(),
        })
    }

    pub fn invert(&self, u: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_element(u)?;
        Ok(match (&self.kind, u) {
            (TableKind::Finite(g), GroupElement::Finite(a)) => GroupElement::Finite(g.inverse[*a]),
            (TableKind::Su2 { .. }, GroupElement::Su2(a)) => GroupElement::Su2(a.inverse()),
            _ => unreachable!(),
        })
    }

    /// All elements of a finite group, `None` for SU(2).
    pub fn elements(&self) -> Option<Vec<GroupElement>> {
        self.finite().map(|g| (0..g.order).map(GroupElement::Finite).collect())
    }

    pub fn order(&self) -> Option<usize> {
        self.finite().map(|g| g.order)
    }

    /// Looks up a finite-group element by its display name.
    pub fn element_by_name(&self, name: &str) -> Option<GroupElement> {
        let g = self.finite()?;
        g.element_names.iter().position(|n| n == name).map(GroupElement::Finite)
    }

    /// Normalized Haar integral of a class function.
    ///
    /// Finite groups: `(1/|G|) sum_g f(g)`. SU(2): `f` is sampled on the
    /// diagonal class representatives and integrated against
    /// `(1/pi) sin^2(theta/2)` over `[0, 2pi]`; the result with `opts.nodes`
    /// nodes is compared with `2 * opts.nodes` nodes.
    pub fn haar_integrate<F>(&self, f: F, opts: HaarOptions) -> Result<HaarValue, GroupError>
    where
        F: Fn(&GroupElement) -> Complex64,
    {
        match &self.kind {
            TableKind::Finite(g) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..g.order {
                    acc += f(&GroupElement::Finite(i));
                }
                Ok(HaarValue {
                    value: acc / g.order as f64,
                    exactness: Exactness::Exact,
                })
            }
            TableKind::Su2 { .. } => {
                let rule = |n: usize| {
                    let (x, w) = quadrature::gauss_legendre_on(n, 0.0, 2.0 * std::f64::consts::PI);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (t, wt) in x.iter().zip(&w) {
                        let s = (t / 2.0).sin();
                        acc += f(&GroupElement::su2_angle(*t)) * (wt * s * s / std::f64::consts::PI);
                    }
                    acc
                };
                let coarse = rule(opts.nodes);
                let fine = rule(2 * opts.nodes);
                if (coarse - fine).norm() > opts.tol * (1.0 + fine.norm()) {
                    return Err(GroupError::NonConvergent {
                        coarse: opts.nodes,
                        fine: 2 * opts.nodes,
                        v_coarse: coarse.re,
                        v_fine: fine.re,
                    });
                }
                Ok(HaarValue {
                    value: coarse,
                    exactness: Exactness::Quadrature { nodes: opts.nodes },
                })
            }
        }
    }

    /// `delta(u) = sum_R d_R chi_R(u)`, truncated at the cutoff for SU(2).
    pub fn delta_kernel(&self, u: &GroupElement) -> Result<Complex64, GroupError> {
        self.check_element(u)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in self.irreps() {
            acc += self.character(r, u)? * self.dim(r)? as f64;
        }
        Ok(acc)
    }

    /// Character table as CSV, one row per irrep. Finite groups get one
    /// column per conjugacy class, SU(2) a column per sampled class angle
    /// `k pi / 4`, `k = 0..=8`.
    pub fn character_table_csv(&self) -> String {
        let mut out = String::new();
        let fmt_c = |z: Complex64| {
            let clean = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
            let (re, im) = (clean(z.re), clean(z.im));
            if im == 0.0 {
                format!("{re}")
            } else {
                format!("{re}{:+}i", im)
            }
        };
        match &self.kind {
            TableKind::Finite(g) => {
                out.push_str("irrep,dim");
                for cl in &g.classes {
                    out.push_str(&format!(",{}", g.element_names[cl[0]]));
                }
                out.push('\n');
                for (ri, r) in g.irreps.iter().enumerate() {
                    out.push_str(&format!("{},{}", r.name, r.dim));
                    for ci in 0..g.classes.len() {
                        out.push(',');
                        out.push_str(&fmt_c(g.characters[ri][ci]));
                    }
                    out.push('\n');
                }
            }
            TableKind::Su2 { twice_cutoff } => {
                out.push_str("irrep,dim");
                for k in 0..=8 {
                    out.push_str(&format!(",theta={k}pi/4"));
                }
                out.push('\n');
                for j in 0..=*twice_cutoff {
                    out.push_str(&format!("j={},{}", format_spin(j), j + 1));
                    for k in 0..=8 {
                        let th = k as f64 * std::f64::consts::PI / 4.0;
                        let chi = su2::character(j, &Su2Element::from_class_angle(th));
                        out.push(',');
                        out.push_str(&fmt_c(Complex64::new(chi, 0.0)));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finite_specs() -> Vec<GroupSpec> {
        let mut v: Vec<_> = (1..=12).map(GroupSpec::Cyclic).collect();
        v.push(GroupSpec::S3);
        v.push(GroupSpec::Q8);
        v
    }

    #[test]
    fn spec_round_trip() {
        for s in ["Z4", "S3", "Q8", "SU2:1", "SU2:3/2", "SU2:1/2"] {
            let g: GroupSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert_eq!("SU2:1.5".parse::<GroupSpec>().unwrap(), GroupSpec::Su2 { twice_cutoff: 3 });
        assert!("Z13".parse::<GroupSpec>().is_err());
        assert!("SU2:0".parse::<GroupSpec>().is_err());
        assert!("SU2:0.3".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn dimension_sum_rule() {
        for spec in finite_specs() {
            let t = IrrepTable::new(spec).unwrap();
            let s: usize = t.irreps().iter().map(|r| t.dim(*r).unwrap().pow(2)).sum();
            assert_eq!(s, t.order().unwrap(), "{spec}");
        }
    }

    #[test]
    fn character_examples() {
        let su2 = IrrepTable::new(GroupSpec::Su2 { twice_cutoff: 2 }).unwrap();
        let half = IrrepLabel(1);
        assert_eq!(su2.character(half, &su2.identity()).unwrap().re, 2.0);
        let pi = GroupElement::su2_angle(std::f64::consts::PI);
        assert!(su2.character(half, &pi).unwrap().norm() < 1e-15);

        let s3 = IrrepTable::new(GroupSpec::S3).unwrap();
        let transposition = s3.element_by_name("[021]").unwrap();
        assert!(s3.character(IrrepLabel(2), &transposition).unwrap().norm() < 1e-15);
        assert!(s3.character(IrrepLabel(7), &transposition).is_err());
        assert!(s3.character(IrrepLabel(0), &su2.identity()).is_err());
    }

    #[test]
    fn delta_kernel_examples() {
        let s3 = IrrepTable::new(GroupSpec::S3).unwrap();
        assert_eq!(s3.delta_kernel(&s3.identity()).unwrap().re, 6.0);
        let three_cycle = s3.element_by_name("[120]").unwrap();
        assert!(s3.delta_kernel(&three_cycle).unwrap().norm() < 1e-15);
        let z4 = IrrepTable::new(GroupSpec::Cyclic(4)).unwrap();
        assert!(z4.delta_kernel(&GroupElement::Finite(1)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn composition_examples() {
        let s3 = IrrepTable::new(GroupSpec::S3).unwrap();
        // one-line notation: (12) swaps the first two letters, (13) the outer two
        let t12 = s3.element_by_name("[102]").unwrap();
        let t13 = s3.element_by_name("[210]").unwrap();
        let p = s3.compose(&t12, &t13).unwrap();
        let g = s3.finite().unwrap();
        let GroupElement::Finite(pi) = p else { panic!() };
        assert_eq!(g.classes[g.class_of[pi]].len(), 2, "3-cycles form a class of size 2");
        assert_ne!(p, s3.identity());
        let u = GroupElement::Finite(4);
        assert_eq!(s3.compose(&u, &s3.invert(&u).unwrap()).unwrap(), s3.identity());
        let z4 = IrrepTable::new(GroupSpec::Cyclic(4)).unwrap();
        assert_eq!(z4.compose(&GroupElement::Finite(1), &GroupElement::Finite(1)).unwrap(), GroupElement::Finite(2));
        let su2 = IrrepTable::new(GroupSpec::Su2 { twice_cutoff: 1 }).unwrap();
        assert!(su2.compose(&su2.identity(), &z4.identity()).is_err());
    }

    #[test]
    fn haar_examples() {
        let su2 = IrrepTable::new(GroupSpec::Su2 { twice_cutoff: 2 }).unwrap();
        let one = su2.haar_integrate(|_| Complex64::new(1.0, 0.0), HaarOptions::default()).unwrap();
        assert!((one.value.re - 1.0).abs() < 1e-12);
        let chi2 = su2
            .haar_integrate(|u| su2.character(IrrepLabel(1), u).unwrap().powi(2), HaarOptions::default())
            .unwrap();
        assert!((chi2.value.re - 1.0).abs() < 1e-12);
        let s3 = IrrepTable::new(GroupSpec::S3).unwrap();
        let v = s3
            .haar_integrate(
                |u| s3.character(IrrepLabel(0), u).unwrap() * s3.character(IrrepLabel(1), u).unwrap(),
                HaarOptions::default(),
            )
            .unwrap();
        assert_eq!(v.value.norm(), 0.0);
        assert_eq!(v.exactness, Exactness::Exact);
    }

    #[test]
    fn coarse_quadrature_is_flagged() {
        let su2 = IrrepTable::new(GroupSpec::Su2 { twice_cutoff: 40 }).unwrap();
        let r = su2.haar_integrate(
            |u| su2.character(IrrepLabel(40), u).unwrap().powi(2),
            HaarOptions { nodes: 4, tol: 1e-10 },
        );
        assert!(matches!(r, Err(GroupError::NonConvergent { .. })));
    }

    #[test]
    fn csv_has_one_row_per_irrep() {
        let q8 = IrrepTable::new(GroupSpec::Q8).unwrap();
        let csv = q8.character_table_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.lines().all(|l| l.split(',').count() == 7));
    }
}
