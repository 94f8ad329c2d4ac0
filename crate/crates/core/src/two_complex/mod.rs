//! 2-complexes, flat-connection state sums and the physical inner product.

mod complex;
pub mod state_sum;

pub use complex::{corpus, Boundary, BoundaryLinkSpec, ComplexError, Dir, Edge, Face, Move, TwoComplex};
pub use state_sum::{AttachedState, Problem};

use crate::group_algebra::{Exactness, GroupElement, GroupError, GroupSpec, IrrepTable};
use crate::spin_network::{find_isomorphism, Graph, GraphIso, IsoSearch, MatchMode, SpinNetwork, SpinNetworkError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TwoComplexError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    SpinNetwork(#[from] SpinNetworkError),
    #[error("face {face}: edge {edge} has no assigned element")]
    MissingAssignment { face: usize, edge: usize },
    #[error("assignment: {0}")]
    Assignment(String),
    #[error("boundary: {0}")]
    Boundary(String),
    #[error("several boundary isomorphisms for `{0}`; supply a correspondence")]
    Ambiguous(String),
    #[error("state group {state} differs from table group {table}")]
    GroupMismatch { state: GroupSpec, table: GroupSpec },
    #[error("{0}")]
    Unsupported(String),
    #[error("work size {needed} exceeds limit {limit}")]
    Budget { needed: u128, limit: u128 },
}

/// A complex number together with the group and exactness it was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    #[serde(with = "complex_parts")]
    pub value: Complex64,
    pub group: GroupSpec,
    pub exactness: Exactness,
}

mod complex_parts {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }
}

/// Evaluation engine for state sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Group sum for finite groups when boundary tables fit, character
    /// expansion otherwise.
    #[default]
    Auto,
    GroupSum,
    BruteForce,
    CharacterExpansion,
}

fn amplitude(table: &IrrepTable, value: Complex64) -> Amplitude {
    Amplitude {
        value,
        group: table.spec(),
        exactness: table.exactness(),
    }
}

fn run(p: &Problem, method: Method) -> Result<Complex64, TwoComplexError> {
    match method {
        Method::GroupSum => state_sum::group_sum(p),
        Method::BruteForce => state_sum::brute_force(p),
        Method::CharacterExpansion => state_sum::character_expansion(p),
        Method::Auto => {
            if p.table.finite().is_none() {
                return state_sum::character_expansion(p);
            }
            match state_sum::group_sum(p) {
                Err(TwoComplexError::Budget { .. }) => state_sum::character_expansion(p),
                r => r,
            }
        }
    }
}

/// Ordered product around a face, inverting edges traversed backward.
pub fn face_holonomy(
    c: &TwoComplex,
    table: &IrrepTable,
    face: usize,
    assignment: &BTreeMap<usize, GroupElement>,
) -> Result<GroupElement, TwoComplexError> {
    let f = c
        .face(face)
        .ok_or_else(|| TwoComplexError::Assignment(format!("no face {face}")))?;
    let mut h = table.identity();
    for &(e, d) in &f.edges {
        let u = assignment
            .get(&e)
            .ok_or(TwoComplexError::MissingAssignment { face, edge: e })?;
        table.check_element(u)?;
        let u = match d {
            Dir::Forward => *u,
            Dir::Backward => table.invert(u)?,
        };
        h = table.compose(&h, &u)?;
    }
    Ok(h)
}

/// `int prod_e dU_e prod_f delta(H_f)` over the edges not fixed by
/// `boundary`, which must cover exactly the boundary edges when given.
pub fn partition_function(
    c: &TwoComplex,
    table: &IrrepTable,
    boundary: Option<&BTreeMap<usize, GroupElement>>,
) -> Result<Amplitude, TwoComplexError> {
    partition_function_with(c, table, boundary, Method::Auto)
}

pub fn partition_function_with(
    c: &TwoComplex,
    table: &IrrepTable,
    boundary: Option<&BTreeMap<usize, GroupElement>>,
    method: Method,
) -> Result<Amplitude, TwoComplexError> {
    c.validate()?;
    let fixed = match boundary {
        None => BTreeMap::new(),
        Some(a) => {
            let want = c.boundary_edges();
            if let Some(e) = want.iter().find(|e| !a.contains_key(e)) {
                return Err(TwoComplexError::Assignment(format!("boundary edge {e} is unassigned")));
            }
            if let Some(e) = a.keys().find(|e| !want.contains(e)) {
                return Err(TwoComplexError::Assignment(format!("edge {e} is not a boundary edge")));
            }
            for u in a.values() {
                table.check_element(u)?;
            }
            a.clone()
        }
    };
    if c.edges.is_empty() && c.faces.is_empty() {
        return Ok(amplitude(table, Complex64::new(1.0, 0.0)));
    }
    let p = Problem {
        table,
        complex: c,
        fixed,
        states: Vec::new(),
    };
    Ok(amplitude(table, run(&p, method)?))
}

/// `sum_j d_j chi_j(prod_e U_e) prod_e chi_j(U_f)` over the table's irreps.
pub fn face_amplitude_kernel(
    table: &IrrepTable,
    edges: &[GroupElement],
    u_f: &GroupElement,
) -> Result<Complex64, GroupError> {
    let mut prod = table.identity();
    for u in edges {
        prod = table.compose(&prod, u)?;
    }
    table.check_element(u_f)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for r in table.irreps() {
        let d = table.dim(r)? as f64;
        let chi_f = table.character(r, u_f)?;
        let mut term = table.character(r, &prod)? * d;
        for _ in edges {
            term *= chi_f;
        }
        acc += term;
    }
    Ok(acc)
}

/// Options for [`physical_inner_product`].
#[derive(Debug, Clone, Default)]
pub struct InnerProductOptions {
    pub mode: MatchMode,
    /// Correspondence from the `in` state graph to its boundary graph.
    pub in_map: Option<GraphIso>,
    /// Correspondence from the `out` state graph to its boundary graph.
    pub out_map: Option<GraphIso>,
    pub method: Method,
}

/// Picks the state-to-boundary correspondence: the supplied one, else the
/// identity when valid, else the unique isomorphism. `Ok(None)` means no
/// isomorphism exists.
fn correspondence(
    name: &str,
    state: &Graph,
    boundary: &Graph,
    supplied: Option<&GraphIso>,
    mode: MatchMode,
) -> Result<Option<GraphIso>, TwoComplexError> {
    if let Some(m) = supplied {
        if !m.is_valid(state, boundary, mode) {
            return Err(TwoComplexError::Boundary(format!(
                "supplied correspondence for `{name}` is not an isomorphism"
            )));
        }
        return Ok(Some(m.clone()));
    }
    let id = GraphIso::identity_map(state);
    if id.is_valid(state, boundary, mode) {
        return Ok(Some(id));
    }
    match find_isomorphism(state, boundary, mode) {
        IsoSearch::None => Ok(None),
        IsoSearch::Unique(m) => Ok(Some(m)),
        IsoSearch::Ambiguous => Err(TwoComplexError::Ambiguous(name.to_string())),
    }
}

fn attach<'a>(
    c: &TwoComplex,
    b: &Boundary,
    sn: &'a SpinNetwork,
    conjugate: bool,
    supplied: Option<&GraphIso>,
    mode: MatchMode,
) -> Result<Option<AttachedState<'a>>, TwoComplexError> {
    let bg = c.boundary_graph(b);
    let Some(iso) = correspondence(&b.name, &sn.graph, &bg, supplied, mode)? else {
        return Ok(None);
    };
    let links = iso
        .links
        .iter()
        .map(|(&l, img)| {
            let spec = b.links.iter().find(|s| s.link() == img.link).expect("iso targets boundary links");
            (l, (spec.edge(), img.reversed))
        })
        .collect();
    Ok(Some(AttachedState {
        network: sn,
        conjugate,
        links,
    }))
}

/// `<Phi | P | Psi>`: the state sum with `psi_in` on the `in` boundary and
/// the conjugate of `psi_out` on `out`. A complex with a single boundary
/// carries both states on it. Returns exactly 0 when a state graph is not
/// isomorphic to its boundary graph.
pub fn physical_inner_product(
    psi_in: &SpinNetwork,
    psi_out: &SpinNetwork,
    c: &TwoComplex,
    table: &IrrepTable,
    opts: &InnerProductOptions,
) -> Result<Amplitude, TwoComplexError> {
    for sn in [psi_in, psi_out] {
        if sn.group != table.spec() {
            return Err(TwoComplexError::GroupMismatch {
                state: sn.group,
                table: table.spec(),
            });
        }
        sn.evaluator(table)?;
    }
    c.validate()?;
    let zero = amplitude(table, Complex64::new(0.0, 0.0));
    let (b_in, b_out) = match (c.boundary("in"), c.boundary("out")) {
        (Some(i), Some(o)) => (i, o),
        (None, None) => match c.boundaries.as_slice() {
            [b] => (b, b),
            [] => {
                if psi_in.graph.nodes.is_empty() && psi_out.graph.nodes.is_empty() {
                    return partition_function_with(c, table, None, opts.method);
                }
                return Ok(zero);
            }
            _ => {
                return Err(TwoComplexError::Boundary(
                    "several boundaries but no `in`/`out` pair".into(),
                ))
            }
        },
        _ => return Err(TwoComplexError::Boundary("`in` and `out` must both be present".into())),
    };
    let Some(s_in) = attach(c, b_in, psi_in, false, opts.in_map.as_ref(), opts.mode)? else {
        return Ok(zero);
    };
    let Some(s_out) = attach(c, b_out, psi_out, true, opts.out_map.as_ref(), opts.mode)? else {
        return Ok(zero);
    };
    let p = Problem {
        table,
        complex: c,
        fixed: BTreeMap::new(),
        states: vec![s_in, s_out],
    };
    Ok(amplitude(table, run(&p, opts.method)?))
}

/// Result of [`projector_idempotence_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdempotenceReport {
    /// Number of (Psi, Phi) pairs compared.
    pub pairs: usize,
    pub max_deviation: f64,
    /// `<P Psi, Phi>` per pair, row-major over `states x states`.
    pub single: Vec<Amplitude>,
    /// `<P^2 Psi, Phi>` per pair.
    pub double: Vec<Amplitude>,
}

/// Compares `<P^2 Psi, Phi>` with `<P Psi, Phi>` for every pair of
/// `states`, where `P^2` is `c` glued to a copy of itself along `out`/`in`.
/// A closed complex is glued to the empty cylinder, and its only state is
/// the empty network.
pub fn projector_idempotence_check(
    c: &TwoComplex,
    table: &IrrepTable,
    states: &[SpinNetwork],
    opts: &InnerProductOptions,
) -> Result<IdempotenceReport, TwoComplexError> {
    let closed = c.boundaries.is_empty();
    let (doubled, states) = if closed {
        let empty = SpinNetwork::new(table.spec(), Graph::default(), BTreeMap::new());
        (c.disjoint_union(&TwoComplex::default()), vec![empty])
    } else {
        (c.compose(c)?, states.to_vec())
    };
    let mut single = Vec::new();
    let mut double = Vec::new();
    let mut max_deviation: f64 = 0.0;
    for psi in &states {
        for phi in &states {
            let a = physical_inner_product(psi, phi, c, table, opts)?;
            let b = physical_inner_product(psi, phi, &doubled, table, opts)?;
            max_deviation = max_deviation.max((a.value - b.value).norm());
            single.push(a);
            double.push(b);
        }
    }
    Ok(IdempotenceReport {
        pairs: single.len(),
        max_deviation,
        single,
        double,
    })
}

#[cfg(test)]
mod tests;
