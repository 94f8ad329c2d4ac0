//! Finite-difference ascent on per-class coherent means.

use super::{BoundaryState, ClassifierError, Engine, LabeledDataset, Template};
use crate::exec;
use crate::group_algebra::{GroupSpec, IrrepTable};
use crate::spin_network::{erm, find_isomorphism, CoherentWeights, Graph, GraphIso, IsoSearch, MatchMode};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub step_size: f64,
    pub max_iterations: usize,
    /// Stop when an accepted step improves the objective by less than this.
    pub tolerance: f64,
    pub twice_cutoff: u32,
    pub template: Template,
    /// Finite-difference step in spin units.
    pub fd_step: f64,
    /// Step halvings tried before giving up on an iteration.
    pub backtracking: usize,
    /// Stop as soon as every train item is classified correctly.
    pub stop_at_zero_error: bool,
    /// Starting means per class and link; `J_max / 2` everywhere if absent.
    pub initial_means: Option<BTreeMap<usize, BTreeMap<usize, f64>>>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            step_size: 1.0,
            max_iterations: 200,
            tolerance: 1e-10,
            twice_cutoff: 6,
            template: Template::Cylinder,
            fd_step: 1e-4,
            backtracking: 10,
            stop_at_zero_error: true,
            initial_means: None,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: &str| Err(ClassifierError::Config(m.into()));
        if !(self.step_size > 0.0) {
            return bad("step_size must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.fd_step > 0.0) {
            return bad("fd_step must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub iteration: usize,
    /// Mean log probability of the true class over the included items.
    pub objective: f64,
    pub loss: f64,
    pub train_error: f64,
    pub erm: f64,
    pub step: f64,
    pub means: BTreeMap<usize, BTreeMap<usize, f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ZeroError,
    Gradient,
    Tolerance,
    NoImprovement,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    /// One entry for the start and one per accepted step.
    pub entries: Vec<LogEntry>,
    pub weights: BTreeMap<usize, CoherentWeights>,
    /// Train items whose graph does not match their class graph.
    pub excluded: Vec<usize>,
    pub stop: StopReason,
}

impl TrainingLog {
    pub fn iterations(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn last(&self) -> &LogEntry {
        self.entries.last().expect("start entry")
    }
}

/// Identity map if valid, else the unique isomorphism `a -> b`.
pub(crate) fn graph_match(a: &Graph, b: &Graph, class: usize) -> Result<Option<GraphIso>, ClassifierError> {
    let id = GraphIso::identity_map(a);
    if id.is_valid(a, b, MatchMode::Strict) {
        return Ok(Some(id));
    }
    match find_isomorphism(a, b, MatchMode::Strict) {
        IsoSearch::Unique(m) => Ok(Some(m)),
        IsoSearch::Ambiguous => Err(ClassifierError::Ambiguous(class)),
        IsoSearch::None => Ok(None),
    }
}

pub(crate) fn class_states(
    ds: &LabeledDataset,
    means: &BTreeMap<usize, BTreeMap<usize, f64>>,
) -> BTreeMap<usize, BoundaryState> {
    ds.classes
        .iter()
        .map(|(&c, sn)| {
            (
                c,
                BoundaryState::Coherent {
                    group: ds.group,
                    graph: sn.graph.clone(),
                    weights: CoherentWeights::with_default_spreads(means[&c].clone()),
                },
            )
        })
        .collect()
}

pub(crate) struct Objective<'a> {
    pub ds: &'a LabeledDataset,
    pub engine: Engine,
    /// Included train items with their link map onto the class graph.
    pub included: Vec<(usize, GraphIso)>,
}

pub(crate) struct Eval {
    pub objective: f64,
    pub train_error: f64,
    pub erm: f64,
}

impl Objective<'_> {
    /// Classification error over `items` with the given class means.
    pub fn error(&self, items: &[usize], means: &BTreeMap<usize, BTreeMap<usize, f64>>) -> Result<f64, ClassifierError> {
        if items.is_empty() {
            return Ok(0.0);
        }
        let classes = class_states(self.ds, means);
        let wrong = exec::map_slice(items, |&i| {
            let it = &self.ds.items[i];
            self.engine
                .classify(&it.input, &classes)
                .map(|c| c.prediction() != Some(it.label))
        });
        let mut n = 0;
        for w in wrong {
            n += w? as usize;
        }
        Ok(n as f64 / items.len() as f64)
    }

    pub fn objective(&self, means: &BTreeMap<usize, BTreeMap<usize, f64>>) -> Result<f64, ClassifierError> {
        let classes = class_states(self.ds, means);
        let logs = exec::map_slice(&self.included, |(i, _)| {
            let it = &self.ds.items[*i];
            self.engine
                .classify(&it.input, &classes)
                .map(|c| c.probabilities[&it.label].ln())
        });
        let mut acc = 0.0;
        for l in logs {
            acc += l?;
        }
        Ok(acc / self.included.len() as f64)
    }

    /// Mean ERM of included items against their class means.
    pub fn erm(&self, means: &BTreeMap<usize, BTreeMap<usize, f64>>) -> Result<f64, ClassifierError> {
        let mut acc = 0.0;
        for (i, iso) in &self.included {
            let it = &self.ds.items[*i];
            let spins = it.input.mean_spins();
            let m = &means[&it.label];
            let mapped: BTreeMap<usize, f64> = spins.keys().map(|l| (*l, m[&iso.links[l].link])).collect();
            acc += erm(&spins, &mapped)?;
        }
        Ok(acc / self.included.len() as f64)
    }

    pub fn eval(&self, means: &BTreeMap<usize, BTreeMap<usize, f64>>) -> Result<Eval, ClassifierError> {
        Ok(Eval {
            objective: self.objective(means)?,
            train_error: self.error(&self.ds.train, means)?,
            erm: self.erm(means)?,
        })
    }
}

pub(crate) fn setup<'a>(ds: &'a LabeledDataset, cfg: &TrainingConfig) -> Result<(Objective<'a>, Vec<usize>), ClassifierError> {
    cfg.validate()?;
    ds.validate()?;
    let group = GroupSpec::Su2 {
        twice_cutoff: cfg.twice_cutoff,
    };
    if ds.group != group {
        return Err(ClassifierError::GroupMismatch {
            state: ds.group,
            expected: group,
        });
    }
    if ds.train.is_empty() {
        return Err(ClassifierError::Dataset("empty train split".into()));
    }
    let engine = Engine::new(IrrepTable::new(group)?, cfg.template.clone());
    engine.check_template(&ds.class_states())?;
    let mut included = Vec::new();
    let mut excluded = Vec::new();
    for &i in &ds.train {
        let it = &ds.items[i];
        match graph_match(it.input.graph(), &ds.classes[&it.label].graph, it.label)? {
            Some(iso) => included.push((i, iso)),
            None => excluded.push(i),
        }
    }
    if included.is_empty() {
        return Err(ClassifierError::Degenerate(
            "every train item is topologically incompatible with its label".into(),
        ));
    }
    Ok((Objective { ds, engine, included }, excluded))
}

/// Maximizes the mean log probability of the true class over the train
/// items whose graph matches their class graph.
pub fn train(ds: &LabeledDataset, cfg: &TrainingConfig) -> Result<TrainingLog, ClassifierError> {
    let (obj, excluded) = setup(ds, cfg)?;
    let j_max = cfg.twice_cutoff as f64 / 2.0;
    let mut means: BTreeMap<usize, BTreeMap<usize, f64>> = match &cfg.initial_means {
        Some(m) => m.clone(),
        None => ds
            .classes
            .iter()
            .map(|(&c, sn)| (c, sn.graph.links.iter().map(|l| (l.id, j_max / 2.0)).collect()))
            .collect(),
    };
    for (c, sn) in &ds.classes {
        let ok = means
            .get(c)
            .is_some_and(|m| m.len() == sn.graph.links.len() && sn.graph.links.iter().all(|l| m.contains_key(&l.id)));
        if !ok {
            return Err(ClassifierError::Config(format!("initial means for class {c} must cover its links")));
        }
        if means[c].values().any(|v| !(0.0..=j_max).contains(v)) {
            return Err(ClassifierError::Config(format!("initial means for class {c} outside [0, {j_max}]")));
        }
    }
    let keys: Vec<(usize, usize)> = means
        .iter()
        .flat_map(|(&c, m)| m.keys().map(move |&l| (c, l)))
        .collect();
    let set = |m: &mut BTreeMap<usize, BTreeMap<usize, f64>>, k: (usize, usize), v: f64| {
        m.get_mut(&k.0).unwrap().insert(k.1, v);
    };

    let start = obj.eval(&means)?;
    if start.objective == f64::NEG_INFINITY || start.objective.is_nan() {
        return Err(ClassifierError::Degenerate("true-class amplitudes vanish at the starting means".into()));
    }
    let entry = |it: usize, e: &Eval, step: f64, means: &BTreeMap<usize, BTreeMap<usize, f64>>| LogEntry {
        iteration: it,
        objective: e.objective,
        loss: -e.objective,
        train_error: e.train_error,
        erm: e.erm,
        step,
        means: means.clone(),
    };
    let mut entries = vec![entry(0, &start, 0.0, &means)];
    let mut cur = start;
    let mut stop = StopReason::MaxIterations;
    let h = cfg.fd_step;
    for it in 1..=cfg.max_iterations {
        if cfg.stop_at_zero_error && cur.train_error == 0.0 {
            stop = StopReason::ZeroError;
            break;
        }
        let mut grad = Vec::with_capacity(keys.len());
        for &k in &keys {
            let x = means[&k.0][&k.1];
            let (lo, hi) = ((x - h).max(0.0), (x + h).min(j_max));
            let mut m = means.clone();
            set(&mut m, k, hi);
            let fp = obj.objective(&m)?;
            set(&mut m, k, lo);
            let fm = obj.objective(&m)?;
            let g = (fp - fm) / (hi - lo);
            grad.push(if g.is_finite() { g } else { 0.0 });
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm < cfg.tolerance {
            stop = StopReason::Gradient;
            break;
        }
        let mut step = cfg.step_size;
        let mut accepted = None;
        for _ in 0..=cfg.backtracking {
            let mut m = means.clone();
            for (&k, g) in keys.iter().zip(&grad) {
                let x = means[&k.0][&k.1];
                set(&mut m, k, (x + step * g).clamp(0.0, j_max));
            }
            let f = obj.objective(&m)?;
            if f >= cur.objective {
                accepted = Some(m);
                break;
            }
            step /= 2.0;
        }
        let Some(m) = accepted else {
            stop = StopReason::NoImprovement;
            break;
        };
        let e = obj.eval(&m)?;
        let gain = e.objective - cur.objective;
        means = m;
        entries.push(entry(it, &e, step, &means));
        cur = e;
        if gain < cfg.tolerance && !(cfg.stop_at_zero_error && cur.train_error == 0.0) {
            stop = StopReason::Tolerance;
            break;
        }
    }
    if cfg.stop_at_zero_error && cur.train_error == 0.0 {
        stop = StopReason::ZeroError;
    }
    Ok(TrainingLog {
        entries,
        weights: means
            .into_iter()
            .map(|(c, m)| (c, CoherentWeights::with_default_spreads(m)))
            .collect(),
        excluded,
        stop,
    })
}

/// Share of `items` misclassified against coherent class states with the
/// given weights.
pub fn error_rate(
    ds: &LabeledDataset,
    items: &[usize],
    weights: &BTreeMap<usize, CoherentWeights>,
    template: &Template,
) -> Result<f64, ClassifierError> {
    if items.is_empty() {
        return Ok(0.0);
    }
    let engine = Engine::new(IrrepTable::new(ds.group)?, template.clone());
    let classes: BTreeMap<usize, BoundaryState> = ds
        .classes
        .iter()
        .map(|(&c, sn)| {
            let w = weights
                .get(&c)
                .ok_or_else(|| ClassifierError::Config(format!("no weights for class {c}")))?;
            Ok((
                c,
                BoundaryState::Coherent {
                    group: ds.group,
                    graph: sn.graph.clone(),
                    weights: w.clone(),
                },
            ))
        })
        .collect::<Result<_, ClassifierError>>()?;
    engine.check_template(&classes)?;
    let wrong = exec::map_slice(items, |&i| {
        let it = &ds.items[i];
        engine.classify(&it.input, &classes).map(|c| c.prediction() != Some(it.label))
    });
    let mut n = 0;
    for w in wrong {
        n += w? as usize;
    }
    Ok(n as f64 / items.len() as f64)
}
