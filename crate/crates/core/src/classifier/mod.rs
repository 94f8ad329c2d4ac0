//! Classification by physical amplitudes between an input boundary state and
//! per-class reference states.

mod dataset;
mod experiments;
mod train;

pub use dataset::{
    apply_label_permutation, graph_dataset, label_permutation, randomize_labels, separated_graph_dataset,
    topological_dataset, Item, LabeledDataset, SEPARATION_TRIES,
};
pub use experiments::{
    capacity_sweep, perceptron_encoding, random_label_experiment, semiclassical_perceptron_check, PerceptronReport,
    PerceptronRow, RandomLabelReport, RandomLabelRun, SweepConfig, SweepRow,
};
pub use train::{error_rate, train, LogEntry, StopReason, TrainingConfig, TrainingLog};

use crate::group_algebra::{GroupError, GroupSpec, IrrepLabel, IrrepTable};
use crate::spin_network::coherent::CoherentError;
use crate::spin_network::{
    find_isomorphism, CoherentWeights, Graph, GraphIso, IsoSearch, LinkImage, MatchMode, MetricError, SpinNetwork,
    SpinNetworkError,
};
use crate::two_complex::{corpus, physical_inner_product, InnerProductOptions, Method, TwoComplex, TwoComplexError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// Largest number of labeling pairs summed for one amplitude.
pub const SMEARING_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifierError {
    #[error(transparent)]
    TwoComplex(#[from] TwoComplexError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    SpinNetwork(#[from] SpinNetworkError),
    #[error(transparent)]
    Coherent(#[from] CoherentError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("state group {state} differs from {expected}")]
    GroupMismatch { state: GroupSpec, expected: GroupSpec },
    #[error("several correspondences between input and class {0}")]
    Ambiguous(usize),
    #[error("template boundary matches no class")]
    Incompatible,
    #[error("degenerate dataset: {0}")]
    Degenerate(String),
    #[error("dataset: {0}")]
    Dataset(String),
    #[error("config: {0}")]
    Config(String),
    #[error("encoding: {0}")]
    Encoding(String),
    #[error("{needed} labeling pairs exceed the budget of {limit}")]
    Budget { needed: usize, limit: usize },
}

/// A spin network, or a Gaussian superposition of SU(2) labelings of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryState {
    Sharp { network: SpinNetwork },
    Coherent { group: GroupSpec, graph: Graph, weights: CoherentWeights },
}

impl BoundaryState {
    pub fn group(&self) -> GroupSpec {
        match self {
            BoundaryState::Sharp { network } => network.group,
            BoundaryState::Coherent { group, .. } => *group,
        }
    }

    pub fn graph(&self) -> &Graph {
        match self {
            BoundaryState::Sharp { network } => &network.graph,
            BoundaryState::Coherent { graph, .. } => graph,
        }
    }

    /// Mean spin per link (the labels themselves for a sharp state).
    pub fn mean_spins(&self) -> BTreeMap<usize, f64> {
        match self {
            BoundaryState::Sharp { network } => network.spin_values(),
            BoundaryState::Coherent { weights, .. } => weights.means.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if let BoundaryState::Coherent { group, graph, weights } = self {
            let GroupSpec::Su2 { twice_cutoff } = group else {
                return Err(ClassifierError::Config("coherent states need SU2".into()));
            };
            weights.validate(*twice_cutoff)?;
            let links: Vec<usize> = graph.links.iter().map(|l| l.id).collect();
            if weights.means.len() != links.len() || links.iter().any(|l| !weights.means.contains_key(l)) {
                return Err(ClassifierError::Config("coherent means must cover exactly the graph links".into()));
            }
        }
        Ok(())
    }
}

/// Bulk complex joining input and class states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Template {
    /// The cylinder over each class graph, with the input on `in`.
    Cylinder,
    /// A fixed complex; a single boundary carries both states.
    Complex { complex: TwoComplex },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub probabilities: BTreeMap<usize, f64>,
    #[serde(skip)]
    pub amplitudes: BTreeMap<usize, Complex64>,
    /// Every amplitude vanished; probabilities are uniform.
    pub degenerate: bool,
    /// Classes whose amplitude is exactly zero.
    pub zero_channels: Vec<usize>,
}

impl Classification {
    /// Class with the strictly largest probability.
    pub fn prediction(&self) -> Option<usize> {
        if self.degenerate {
            return None;
        }
        let best = self.probabilities.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<usize> = self
            .probabilities
            .iter()
            .filter(|(_, &p)| p == best)
            .map(|(&c, _)| c)
            .collect();
        (top.len() == 1).then(|| top[0])
    }
}

/// Probabilities `|A_c|^2 / sum |A|^2`, uniform when all vanish.
pub fn probabilities(amplitudes: &BTreeMap<usize, Complex64>) -> Classification {
    let total: f64 = amplitudes.values().map(|a| a.norm_sqr()).sum();
    let degenerate = total == 0.0;
    let k = amplitudes.len() as f64;
    Classification {
        probabilities: amplitudes
            .iter()
            .map(|(&c, a)| (c, if degenerate { 1.0 / k } else { a.norm_sqr() / total }))
            .collect(),
        zero_channels: amplitudes.iter().filter(|(_, a)| a.norm() == 0.0).map(|(&c, _)| c).collect(),
        amplitudes: amplitudes.clone(),
        degenerate,
    }
}

/// Amplitude evaluator with a memo of sharp-state inner products.
#[derive(Debug)]
pub struct Engine {
    pub table: IrrepTable,
    pub template: Template,
    pub mode: MatchMode,
    pub method: Method,
    cache: Mutex<HashMap<String, Complex64>>,
}

type Labelings = Vec<(BTreeMap<usize, IrrepLabel>, f64)>;

impl Engine {
    pub fn new(table: IrrepTable, template: Template) -> Self {
        Self {
            table,
            template,
            mode: MatchMode::Strict,
            method: Method::Auto,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn check_group(&self, s: &BoundaryState) -> Result<(), ClassifierError> {
        if s.group() != self.table.spec() {
            return Err(ClassifierError::GroupMismatch {
                state: s.group(),
                expected: self.table.spec(),
            });
        }
        s.validate()
    }

    fn sharp(&self, input: &SpinNetwork, class: &SpinNetwork, map: Option<&GraphIso>) -> Result<Complex64, ClassifierError> {
        let key = serde_json::to_string(&(input, class, map)).expect("serializable");
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = match &self.template {
            Template::Cylinder => {
                let c = corpus::cylinder_over(&class.graph);
                let opts = InnerProductOptions {
                    mode: self.mode,
                    in_map: map.cloned(),
                    out_map: Some(GraphIso::identity_map(&class.graph)),
                    method: self.method,
                };
                physical_inner_product(input, class, &c, &self.table, &opts)?.value
            }
            Template::Complex { complex } => {
                let opts = InnerProductOptions {
                    mode: self.mode,
                    method: self.method,
                    ..Default::default()
                };
                physical_inner_product(input, class, complex, &self.table, &opts)?.value
            }
        };
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }

    /// Labelings of `links` with their weights.
    fn labelings(&self, s: &BoundaryState, links: &[usize]) -> Labelings {
        match s {
            BoundaryState::Sharp { network } => {
                vec![(links.iter().map(|l| (*l, network.spins[l])).collect(), 1.0)]
            }
            BoundaryState::Coherent { group, weights, .. } => {
                let GroupSpec::Su2 { twice_cutoff } = group else { unreachable!("validated") };
                let support = weights.support(*twice_cutoff);
                let mut out: Labelings = vec![(BTreeMap::new(), 1.0)];
                for &l in links {
                    let mut next = Vec::with_capacity(out.len() * support[&l].len());
                    for (lab, w) in &out {
                        for &r in &support[&l] {
                            let mut lab = lab.clone();
                            lab.insert(l, r);
                            next.push((lab, w * weights.link_weight(l, r.0)));
                        }
                    }
                    out = next;
                }
                out
            }
        }
    }

    fn network_on(&self, s: &BoundaryState, graph: &Graph, spins: BTreeMap<usize, IrrepLabel>) -> SpinNetwork {
        let mut sn = SpinNetwork::new(s.group(), graph.clone(), spins);
        if let BoundaryState::Sharp { network } = s {
            for &n in &graph.nodes {
                if let Some(&i) = network.intertwiners.get(&n) {
                    sn.intertwiners.insert(n, i);
                }
            }
        }
        sn
    }

    /// `sum w_in w_c <c|P|in>` over the labelings of one pair of graphs.
    fn smeared(
        &self,
        input: &BoundaryState,
        in_graph: &Graph,
        class: &BoundaryState,
        cl_graph: &Graph,
        map: Option<&GraphIso>,
    ) -> Result<Complex64, ClassifierError> {
        let in_links: Vec<usize> = in_graph.links.iter().map(|l| l.id).collect();
        let cl_links: Vec<usize> = cl_graph.links.iter().map(|l| l.id).collect();
        let a = self.labelings(input, &in_links);
        let b = self.labelings(class, &cl_links);
        let needed = a.len().saturating_mul(b.len());
        if needed > SMEARING_BUDGET {
            return Err(ClassifierError::Budget {
                needed,
                limit: SMEARING_BUDGET,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (la, wa) in &a {
            let sa = self.network_on(input, in_graph, la.clone());
            if !sa.validate().is_empty() {
                continue;
            }
            for (lb, wb) in &b {
                let sb = self.network_on(class, cl_graph, lb.clone());
                if !sb.validate().is_empty() {
                    continue;
                }
                acc += self.sharp(&sa, &sb, map)? * (wa * wb);
            }
        }
        Ok(acc)
    }

    /// `A_c = <class | P | input>`, smeared over coherent labelings. Exactly
    /// zero when the graphs are not isomorphic.
    pub fn amplitude(&self, input: &BoundaryState, class: &BoundaryState, class_id: usize) -> Result<Complex64, ClassifierError> {
        self.check_group(input)?;
        self.check_group(class)?;
        let (gi, gc) = (input.graph(), class.graph());
        match &self.template {
            Template::Complex { .. } => self.smeared(input, gi, class, gc, None),
            Template::Cylinder => {
                let id = GraphIso::identity_map(gi);
                let iso = if id.is_valid(gi, gc, self.mode) {
                    id
                } else {
                    match find_isomorphism(gi, gc, self.mode) {
                        IsoSearch::None => return Ok(Complex64::new(0.0, 0.0)),
                        IsoSearch::Unique(m) => m,
                        IsoSearch::Ambiguous => return Err(ClassifierError::Ambiguous(class_id)),
                    }
                };
                // the cylinder over a disjoint union is a disjoint union
                let mut acc = Complex64::new(1.0, 0.0);
                let comps = gc.components();
                if comps.is_empty() {
                    return self.smeared(input, gi, class, gc, Some(&iso));
                }
                for comp in comps {
                    let sub_in = Graph::new(
                        gi.nodes.iter().copied().filter(|n| comp.nodes.contains(&iso.nodes[n])).collect(),
                        gi.links
                            .iter()
                            .copied()
                            .filter(|l| comp.link(iso.links[&l.id].link).is_some())
                            .collect(),
                    );
                    let sub_iso = GraphIso {
                        nodes: sub_in.nodes.iter().map(|n| (*n, iso.nodes[n])).collect(),
                        links: sub_in
                            .links
                            .iter()
                            .map(|l| (l.id, iso.links[&l.id]))
                            .collect::<BTreeMap<usize, LinkImage>>(),
                    };
                    acc *= self.smeared(input, &sub_in, class, &comp, Some(&sub_iso))?;
                    if acc == Complex64::new(0.0, 0.0) {
                        break;
                    }
                }
                Ok(acc)
            }
        }
    }

    pub fn classify(
        &self,
        input: &BoundaryState,
        classes: &BTreeMap<usize, BoundaryState>,
    ) -> Result<Classification, ClassifierError> {
        let mut amps = BTreeMap::new();
        for (&c, s) in classes {
            amps.insert(c, self.amplitude(input, s, c)?);
        }
        Ok(probabilities(&amps))
    }

    /// For a fixed template, the classes whose graph fits its boundary.
    pub fn check_template(&self, classes: &BTreeMap<usize, BoundaryState>) -> Result<(), ClassifierError> {
        let Template::Complex { complex } = &self.template else {
            return Ok(());
        };
        let b = match (complex.boundary("out"), complex.boundaries.as_slice()) {
            (Some(b), _) => b,
            (None, [b]) => b,
            _ => return Err(ClassifierError::Incompatible),
        };
        let bg = complex.boundary_graph(b);
        let fits = classes.values().any(|s| {
            GraphIso::identity_map(s.graph()).is_valid(s.graph(), &bg, self.mode)
                || !matches!(find_isomorphism(s.graph(), &bg, self.mode), IsoSearch::None)
        });
        if fits {
            Ok(())
        } else {
            Err(ClassifierError::Incompatible)
        }
    }
}

/// One-shot classification; see [`Engine::classify`].
pub fn classify(
    input: &BoundaryState,
    classes: &BTreeMap<usize, BoundaryState>,
    template: &Template,
    table: &IrrepTable,
) -> Result<Classification, ClassifierError> {
    let e = Engine::new(table.clone(), template.clone());
    e.check_template(classes)?;
    e.classify(input, classes)
}
