//! Spin networks: labeled graphs, their validation, cylindrical evaluation,
//! coherent weights and the graph-level capacity metrics.

pub mod coherent;
pub mod graph;
pub mod metrics;

pub use coherent::{coherent_amplitude, CoherentWeights};
pub use graph::{find_isomorphism, Graph, GraphDefect, GraphIso, IsoSearch, Link, LinkImage, MatchMode};
pub use metrics::{
    dim_hilbert, dim_hilbert_cutoff, dim_hilbert_per_link, dim_invariant, erm, total_valence, MetricError,
};

use crate::group_algebra::{
    format_spin, invariant_basis, invariant_dim, parse_spin, GroupElement, GroupError, GroupSpec, IrrepLabel,
    IrrepTable, Slot,
};
use crate::tensor::{self, Tensor};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A graph with an irrep on every link and an invariant-basis index on every
/// node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpinNetworkFile", into = "SpinNetworkFile")]
pub struct SpinNetwork {
    pub group: GroupSpec,
    pub graph: Graph,
    pub spins: BTreeMap<usize, IrrepLabel>,
    pub intertwiners: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Graph(GraphDefect),
    MissingSpin { link: usize },
    UnknownIrrep { link: usize, label: u32 },
    MissingIntertwiner { node: usize },
    /// Trivalent SU(2) node whose spins violate `|a - b| <= c <= a + b`.
    Triangle { node: usize },
    /// Trivalent SU(2) node whose spins sum to a half-integer.
    Parity { node: usize },
    /// No invariant tensor exists at the node.
    NoInvariant { node: usize },
    IntertwinerOutOfRange { node: usize, index: usize, dim: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Graph(GraphDefect::DuplicateNode(n)) => write!(f, "node {n}: duplicate id"),
            Violation::Graph(GraphDefect::DuplicateLink(l)) => write!(f, "link {l}: duplicate id"),
            Violation::Graph(GraphDefect::DanglingLink { link, node }) => {
                write!(f, "link {link}: endpoint {node} is not a node")
            }
            Violation::MissingSpin { link } => write!(f, "link {link}: no spin"),
            Violation::UnknownIrrep { link, label } => write!(f, "link {link}: unknown irrep {label}"),
            Violation::MissingIntertwiner { node } => write!(f, "node {node}: no intertwiner"),
            Violation::Triangle { node } => write!(f, "node {node}: triangle inequality violated"),
            Violation::Parity { node } => write!(f, "node {node}: spins sum to a half-integer"),
            Violation::NoInvariant { node } => write!(f, "node {node}: no invariant tensor"),
            Violation::IntertwinerOutOfRange { node, index, dim } => {
                write!(f, "node {node}: intertwiner {index} out of range (dimension {dim})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpinNetworkError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invalid spin network: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no holonomy for link {0}")]
    MissingHolonomy(usize),
    #[error("spin network over {network} evaluated with {table}")]
    GroupMismatch { network: GroupSpec, table: GroupSpec },
    #[error("{0}")]
    Parse(String),
}

impl SpinNetwork {
    /// Network with the given spins and intertwiner index 0 everywhere.
    pub fn new(group: GroupSpec, graph: Graph, spins: BTreeMap<usize, IrrepLabel>) -> Self {
        let intertwiners = graph.nodes.iter().map(|&n| (n, 0)).collect();
        Self {
            group,
            graph,
            spins,
            intertwiners,
        }
    }

    /// Single loop carrying `r`.
    pub fn single_loop(group: GroupSpec, r: IrrepLabel) -> Self {
        Self::new(group, Graph::single_loop(), BTreeMap::from([(0, r)]))
    }

    /// Slots of the invariant space at `node`: outgoing ends carry the
    /// irrep, incoming ends its conjugate.
    pub fn node_slots(&self, node: usize) -> Vec<Slot> {
        self.graph
            .endpoints(node)
            .into_iter()
            .map(|(l, incoming)| Slot {
                irrep: self.spins[&l],
                conjugate: incoming,
            })
            .collect()
    }

    /// Dimension of the invariant subspace at `node`.
    pub fn intertwiner_dim(&self, table: &IrrepTable, node: usize) -> Result<usize, GroupError> {
        invariant_dim(table, &self.node_slots(node))
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out: Vec<Violation> = self.graph.defects().into_iter().map(Violation::Graph).collect();
        let table = match IrrepTable::new(self.group) {
            Ok(t) => t,
            Err(_) => return out,
        };
        let mut labels_ok = true;
        for l in &self.graph.links {
            match self.spins.get(&l.id) {
                None => {
                    out.push(Violation::MissingSpin { link: l.id });
                    labels_ok = false;
                }
                Some(r) if !table.contains_irrep(*r) => {
                    out.push(Violation::UnknownIrrep { link: l.id, label: r.0 });
                    labels_ok = false;
                }
                _ => {}
            }
        }
        for &n in &self.graph.nodes {
            let idx = self.intertwiners.get(&n).copied();
            if idx.is_none() {
                out.push(Violation::MissingIntertwiner { node: n });
            }
            if !labels_ok || !out.iter().all(|v| !matches!(v, Violation::Graph(_))) {
                continue;
            }
            let slots = self.node_slots(n);
            if table.twice_cutoff().is_some() && slots.len() == 3 {
                let (a, b, c) = (slots[0].irrep.0, slots[1].irrep.0, slots[2].irrep.0);
                if (a + b + c) % 2 != 0 {
                    out.push(Violation::Parity { node: n });
                    continue;
                }
                if c < a.abs_diff(b) || c > a + b {
                    out.push(Violation::Triangle { node: n });
                    continue;
                }
            }
            let dim = invariant_dim(&table, &slots).unwrap_or(0);
            if dim == 0 {
                out.push(Violation::NoInvariant { node: n });
            } else if let Some(i) = idx {
                if i >= dim {
                    out.push(Violation::IntertwinerOutOfRange { node: n, index: i, dim });
                }
            }
        }
        out
    }

    /// Invariant tensor at `node`, with valence-2 tensors scaled to norm
    /// `sqrt(d)` so that they act as identity maps.
    pub fn intertwiner_tensor(&self, table: &IrrepTable, node: usize) -> Result<Vec<Complex64>, SpinNetworkError> {
        let slots = self.node_slots(node);
        let basis = invariant_basis(table, &slots)?;
        let idx = self.intertwiners.get(&node).copied().unwrap_or(0);
        let mut v = basis.get(idx).cloned().ok_or_else(|| {
            SpinNetworkError::Invalid(vec![Violation::IntertwinerOutOfRange {
                node,
                index: idx,
                dim: basis.len(),
            }])
        })?;
        if slots.len() == 2 {
            let d = table.dim(slots[0].irrep)? as f64;
            for x in &mut v {
                *x *= d.sqrt();
            }
        }
        Ok(v)
    }

    fn check(&self, table: &IrrepTable) -> Result<(), SpinNetworkError> {
        if table.spec() != self.group {
            return Err(SpinNetworkError::GroupMismatch {
                network: self.group,
                table: table.spec(),
            });
        }
        let v = self.validate();
        if !v.is_empty() {
            return Err(SpinNetworkError::Invalid(v));
        }
        Ok(())
    }

    /// Precomputed node tensors for repeated evaluation.
    pub fn evaluator(&self, table: &IrrepTable) -> Result<CylindricalEvaluator, SpinNetworkError> {
        self.check(table)?;
        let mut links: Vec<Link> = self.graph.links.clone();
        links.sort_by_key(|l| l.id);
        let end_label = |link: usize, incoming: bool| {
            let pos = links.iter().position(|l| l.id == link).unwrap();
            2 * pos + incoming as usize
        };
        let mut nodes = Vec::new();
        for &n in &self.graph.nodes {
            let slots = self.node_slots(n);
            let dims: Vec<usize> = slots.iter().map(|s| table.dim(s.irrep)).collect::<Result<_, _>>()?;
            let labels: Vec<usize> = self
                .graph
                .endpoints(n)
                .into_iter()
                .map(|(l, inc)| end_label(l, inc))
                .collect();
            nodes.push(Tensor::new(labels, dims, self.intertwiner_tensor(table, n)?));
        }
        Ok(CylindricalEvaluator {
            table: table.clone(),
            links: links.iter().map(|l| (l.id, self.spins[&l.id])).collect(),
            nodes,
        })
    }

    /// Contracts `rho(U_l)` on every link with the node intertwiners.
    pub fn evaluate_cylindrical(
        &self,
        table: &IrrepTable,
        holonomies: &BTreeMap<usize, GroupElement>,
    ) -> Result<Complex64, SpinNetworkError> {
        self.evaluator(table)?.evaluate(holonomies)
    }

    /// Spins as real numbers (spin for SU(2), label index otherwise).
    pub fn spin_values(&self) -> BTreeMap<usize, f64> {
        let su2 = !self.group.is_finite();
        self.spins
            .iter()
            .map(|(&l, r)| (l, if su2 { r.0 as f64 / 2.0 } else { r.0 as f64 }))
            .collect()
    }
}

/// Node tensors of a spin network, ready to be contracted with holonomies.
#[derive(Debug, Clone)]
pub struct CylindricalEvaluator {
    table: IrrepTable,
    links: Vec<(usize, IrrepLabel)>,
    nodes: Vec<Tensor>,
}

impl CylindricalEvaluator {
    pub fn evaluate(&self, holonomies: &BTreeMap<usize, GroupElement>) -> Result<Complex64, SpinNetworkError> {
        let mut tensors = self.nodes.clone();
        for (pos, &(id, r)) in self.links.iter().enumerate() {
            let u = holonomies.get(&id).ok_or(SpinNetworkError::MissingHolonomy(id))?;
            let m = self.table.rep_matrix(r, u)?;
            let d = m.nrows();
            let data = (0..d * d).map(|k| m[(k / d, k % d)]).collect();
            // row index sits at the target end, column at the source end
            tensors.push(Tensor::new(vec![2 * pos + 1, 2 * pos], vec![d, d], data));
        }
        Ok(tensor::contract(tensors, &[]).data[0])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelValue {
    Number(f64),
    Text(String),
}

/// On-disk form of a spin network.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinNetworkFile {
    pub group: GroupSpec,
    pub nodes: Vec<usize>,
    pub links: Vec<Link>,
    /// SU(2): spin as `0.5` or `"1/2"`. Finite groups: irrep index or name.
    #[serde(deserialize_with = "crate::keys::usize_keys")]
    pub spins: BTreeMap<usize, LabelValue>,
    #[serde(default, deserialize_with = "crate::keys::usize_keys")]
    pub intertwiners: BTreeMap<usize, usize>,
}

pub fn parse_label(table: &IrrepTable, v: &LabelValue) -> Result<IrrepLabel, String> {
    let su2 = table.twice_cutoff().is_some();
    let label = match (v, su2) {
        (LabelValue::Number(x), true) => parse_spin(&x.to_string()).ok_or(format!("bad spin {x}"))?,
        (LabelValue::Text(s), true) => parse_spin(s).ok_or(format!("bad spin {s}"))?,
        (LabelValue::Number(x), false) => {
            if x.fract() != 0.0 || *x < 0.0 {
                return Err(format!("bad irrep index {x}"));
            }
            *x as u32
        }
        (LabelValue::Text(s), false) => table
            .irreps()
            .into_iter()
            .find(|r| table.irrep_name(*r).ok().as_deref() == Some(s.as_str()))
            .map(|r| r.0)
            .or_else(|| s.parse().ok())
            .ok_or(format!("unknown irrep {s}"))?,
    };
    Ok(IrrepLabel(label))
}

impl TryFrom<SpinNetworkFile> for SpinNetwork {
    type Error = SpinNetworkError;

    fn try_from(f: SpinNetworkFile) -> Result<Self, Self::Error> {
        let table = IrrepTable::new(f.group)?;
        let spins = f
            .spins
            .iter()
            .map(|(&l, v)| parse_label(&table, v).map(|r| (l, r)))
            .collect::<Result<_, _>>()
            .map_err(SpinNetworkError::Parse)?;
        let mut intertwiners = f.intertwiners;
        // nodes without an explicit index use the first basis vector
        for &n in &f.nodes {
            intertwiners.entry(n).or_insert(0);
        }
        Ok(SpinNetwork {
            group: f.group,
            graph: Graph::new(f.nodes, f.links),
            spins,
            intertwiners,
        })
    }
}

impl From<SpinNetwork> for SpinNetworkFile {
    fn from(s: SpinNetwork) -> Self {
        let su2 = !s.group.is_finite();
        SpinNetworkFile {
            group: s.group,
            nodes: s.graph.nodes,
            links: s.graph.links,
            spins: s
                .spins
                .into_iter()
                .map(|(l, r)| {
                    let v = if su2 {
                        LabelValue::Text(format_spin(r.0))
                    } else {
                        LabelValue::Number(r.0 as f64)
                    };
                    (l, v)
                })
                .collect(),
            intertwiners: s.intertwiners,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group_algebra::Su2Element;

    fn su2(twice_cutoff: u32) -> IrrepTable {
        IrrepTable::new(GroupSpec::Su2 { twice_cutoff }).unwrap()
    }

    fn theta(group: GroupSpec, spins: [u32; 3]) -> SpinNetwork {
        SpinNetwork::new(
            group,
            Graph::theta(),
            spins.iter().enumerate().map(|(i, &s)| (i, IrrepLabel(s))).collect(),
        )
    }

    #[test]
    fn validate_examples() {
        let g = GroupSpec::Su2 { twice_cutoff: 4 };
        assert!(theta(g, [1, 1, 2]).validate().is_empty());
        assert_eq!(
            theta(g, [1, 1, 1]).validate(),
            vec![Violation::Parity { node: 0 }, Violation::Parity { node: 1 }]
        );
        assert_eq!(theta(g, [1, 1, 4]).validate(), vec![Violation::Triangle { node: 0 }, Violation::Triangle { node: 1 }]);
        assert!(SpinNetwork::single_loop(g, IrrepLabel(2)).validate().is_empty());
        let mut sn = SpinNetwork::single_loop(g, IrrepLabel(2));
        sn.intertwiners.insert(0, 1);
        assert_eq!(
            sn.validate(),
            vec![Violation::IntertwinerOutOfRange { node: 0, index: 1, dim: 1 }]
        );
        sn.spins.clear();
        assert_eq!(sn.validate(), vec![Violation::MissingSpin { link: 0 }]);
    }

    #[test]
    fn loop_evaluates_to_character() {
        let t = su2(2);
        let sn = SpinNetwork::single_loop(t.spec(), IrrepLabel(1));
        let id = BTreeMap::from([(0, t.identity())]);
        assert!((sn.evaluate_cylindrical(&t, &id).unwrap() - 2.0).norm() < 1e-14);
        let rot = BTreeMap::from([(0, GroupElement::su2_angle(std::f64::consts::PI))]);
        assert!(sn.evaluate_cylindrical(&t, &rot).unwrap().norm() < 1e-14);
        let s3 = IrrepTable::new(GroupSpec::S3).unwrap();
        let sn = SpinNetwork::single_loop(GroupSpec::S3, IrrepLabel(2));
        for u in s3.elements().unwrap() {
            let v = sn.evaluate_cylindrical(&s3, &BTreeMap::from([(0, u)])).unwrap();
            assert!((v - s3.character(IrrepLabel(2), &u).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn group_mismatch_and_missing_holonomy() {
        let t = su2(2);
        let sn = SpinNetwork::single_loop(GroupSpec::S3, IrrepLabel(0));
        assert!(matches!(
            sn.evaluate_cylindrical(&t, &BTreeMap::new()),
            Err(SpinNetworkError::GroupMismatch { .. })
        ));
        let sn = SpinNetwork::single_loop(t.spec(), IrrepLabel(1));
        assert_eq!(
            sn.evaluate_cylindrical(&t, &BTreeMap::new()),
            Err(SpinNetworkError::MissingHolonomy(0))
        );
    }

    #[test]
    fn theta_at_identity_matches_dense_contraction() {
        // independent oracle: build the two trivalent CG tensors by hand and
        // contract sum_{abc} v0[a b c] conj-mapped v1[...]
        let t = su2(2);
        let sn = theta(t.spec(), [1, 1, 2]);
        let hol: BTreeMap<usize, GroupElement> = (0..3).map(|l| (l, t.identity())).collect();
        let got = sn.evaluate_cylindrical(&t, &hol).unwrap();
        // node 0: all outgoing, plain slots (1/2, 1/2, 1)
        // node 1: all incoming, conjugated slots
        let cg = crate::group_algebra::clebsch_gordan;
        let dims = [2usize, 2, 3];
        let mut v0 = vec![0.0; 12];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..3 {
                    let (ma, mb, mc) = (1 - 2 * a as i64, 1 - 2 * b as i64, 2 - 2 * c as i64);
                    // (1/2 x 1/2 -> 1) x 1 -> 0
                    let mut s = 0.0;
                    for kk in [-2i64, 0, 2] {
                        s += cg(1, ma, 1, mb, 2, kk) * cg(2, kk, 2, mc, 0, 0);
                    }
                    v0[(a * 2 + b) * 3 + c] = s;
                }
            }
        }
        // conjugated slots: (Cv)[a] = (-1)^a v[d-1-a] on each slot
        let mut v1 = vec![0.0; 12];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..3 {
                    let sign = if (a + b + c) % 2 == 0 { 1.0 } else { -1.0 };
                    v1[(a * 2 + b) * 3 + c] = sign * v0[((1 - a) * 2 + (1 - b)) * 3 + (2 - c)];
                }
            }
        }
        let _ = dims;
        let expect: f64 = v0.iter().zip(&v1).map(|(x, y)| x * y).sum();
        assert!((got.re - expect).abs() < 1e-12, "{got} vs {expect}");
        assert!(expect.abs() > 0.5);
    }

    #[test]
    fn gauge_invariance_theta() {
        use rand::SeedableRng;
        let t = su2(4);
        let sn = theta(t.spec(), [2, 2, 2]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let hol: BTreeMap<usize, GroupElement> =
            (0..3).map(|l| (l, GroupElement::Su2(Su2Element::random(&mut rng)))).collect();
        let before = sn.evaluate_cylindrical(&t, &hol).unwrap();
        let g0 = Su2Element::random(&mut rng);
        let g1 = Su2Element::random(&mut rng);
        let moved: BTreeMap<usize, GroupElement> = hol
            .iter()
            .map(|(&l, u)| {
                let GroupElement::Su2(u) = u else { unreachable!() };
                (l, GroupElement::Su2(g1.compose(u).compose(&g0.inverse())))
            })
            .collect();
        let after = sn.evaluate_cylindrical(&t, &moved).unwrap();
        assert!((before - after).norm() < 1e-10);
    }

    #[test]
    fn file_round_trip() {
        let sn = theta(GroupSpec::Su2 { twice_cutoff: 4 }, [1, 1, 2]);
        let s = serde_json::to_string(&sn).unwrap();
        let back: SpinNetwork = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sn);
        let text = r#"{"group":"S3","nodes":[0],"links":[{"id":0,"src":0,"dst":0}],"spins":{"0":"standard"}}"#;
        let sn: SpinNetwork = serde_json::from_str(text).unwrap();
        assert_eq!(sn.spins[&0], IrrepLabel(2));
        assert!(serde_json::from_str::<SpinNetwork>(&text.replace("\"spins\"", "\"spin\"")).is_err());
    }
}
