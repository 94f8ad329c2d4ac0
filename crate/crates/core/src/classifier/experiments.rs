//! Randomized labels, capacity sweeps and the perceptron comparison.

use super::train::{graph_match, setup, train, StopReason, TrainingConfig};
use super::{
    apply_label_permutation, graph_dataset, randomize_labels, BoundaryState, ClassifierError, Engine,
    LabeledDataset, Template,
};
use crate::group_algebra::{GroupSpec, IrrepTable};
use crate::spin_network::{dim_hilbert_cutoff, total_valence, CoherentWeights, Graph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomLabelRun {
    /// `None` for the unrandomized control.
    pub seed: Option<u64>,
    pub permutation: BTreeMap<usize, usize>,
    /// Train items whose label now names a class with a non-isomorphic graph.
    pub mismatch_fraction: f64,
    /// `1 - mismatch_fraction`: mismatched items have a vanishing true channel.
    pub best_accuracy: f64,
    /// Train accuracy after training; `None` when every item is mismatched.
    pub trained_accuracy: Option<f64>,
    pub stop: Option<StopReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomLabelReport {
    pub control: RandomLabelRun,
    pub runs: Vec<RandomLabelRun>,
    /// Mismatch fraction averaged over every permutation of the classes.
    pub expected_mismatch: f64,
}

/// Largest class count for the exhaustive permutation average.
pub const MAX_PERMUTED_CLASSES: usize = 8;

fn permutations(ids: &[usize]) -> Vec<Vec<usize>> {
    if ids.len() <= 1 {
        return vec![ids.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..ids.len() {
        let mut rest = ids.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Trains on label-permuted copies of `ds` and reports the share of train
/// items whose true channel vanishes topologically. Class graphs must be
/// pairwise non-isomorphic.
pub fn random_label_experiment(
    ds: &LabeledDataset,
    cfg: &TrainingConfig,
    seeds: &[u64],
) -> Result<RandomLabelReport, ClassifierError> {
    ds.validate()?;
    let ids: Vec<usize> = ds.classes.keys().copied().collect();
    for (a, &ca) in ids.iter().enumerate() {
        for &cb in &ids[a + 1..] {
            if !matches!(graph_match(&ds.classes[&ca].graph, &ds.classes[&cb].graph, cb), Ok(None)) {
                return Err(ClassifierError::Dataset(format!(
                    "classes {ca} and {cb} have isomorphic graphs"
                )));
            }
        }
    }
    // compat[i][c]: train item i fits class c
    let mut compat: BTreeMap<usize, BTreeMap<usize, bool>> = BTreeMap::new();
    for &i in &ds.train {
        let g = ds.items[i].input.graph();
        let row = ids
            .iter()
            .map(|&c| Ok((c, graph_match(g, &ds.classes[&c].graph, c)?.is_some())))
            .collect::<Result<_, ClassifierError>>()?;
        compat.insert(i, row);
    }
    let n = ds.train.len().max(1) as f64;
    let mismatch = |perm: &BTreeMap<usize, usize>| {
        ds.train
            .iter()
            .filter(|&&i| !compat[&i][&perm[&ds.items[i].label]])
            .count() as f64
            / n
    };
    let run = |seed: Option<u64>, perm: BTreeMap<usize, usize>| -> Result<RandomLabelRun, ClassifierError> {
        let relabeled = apply_label_permutation(ds, &perm)?;
        let m = mismatch(&perm);
        let (trained_accuracy, stop) = match train(&relabeled, cfg) {
            Ok(log) => (Some(1.0 - log.last().train_error), Some(log.stop)),
            Err(ClassifierError::Degenerate(_)) => (None, None),
            Err(e) => return Err(e),
        };
        Ok(RandomLabelRun {
            seed,
            permutation: perm,
            mismatch_fraction: m,
            best_accuracy: 1.0 - m,
            trained_accuracy,
            stop,
        })
    };
    let control = run(None, ids.iter().map(|&c| (c, c)).collect())?;
    let mut runs = Vec::new();
    for &s in seeds {
        let (_, perm) = randomize_labels(ds, s)?;
        runs.push(run(Some(s), perm)?);
    }
    if ids.len() > MAX_PERMUTED_CLASSES {
        return Err(ClassifierError::Dataset(format!(
            "exhaustive average limited to {MAX_PERMUTED_CLASSES} classes"
        )));
    }
    let all = permutations(&ids);
    let expected_mismatch = all
        .iter()
        .map(|p| mismatch(&ids.iter().copied().zip(p.iter().copied()).collect()))
        .sum::<f64>()
        / all.len() as f64;
    Ok(RandomLabelReport {
        control,
        runs,
        expected_mismatch,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Metric capacities as doubled spin cutoffs.
    pub twice_cutoffs: Vec<u32>,
    /// Topological capacities: total valence `2k` of `k` disjoint loops.
    pub valences: Vec<usize>,
    /// Class generator means as fractions of the cutoff.
    pub mean_fractions: Vec<f64>,
    pub n_train: usize,
    pub n_test: usize,
    pub seed: u64,
    pub training: TrainingConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub j_max: f64,
    pub valence: usize,
    pub train_error: f64,
    pub test_error: f64,
    pub dim_hilbert: u128,
    pub total_valence: usize,
}

/// One row per (cutoff, valence) cell, cutoffs outermost. Returns the rows
/// and their CSV rendering.
pub fn capacity_sweep(cfg: &SweepConfig) -> Result<(Vec<SweepRow>, String), ClassifierError> {
    if cfg.mean_fractions.len() < 2 {
        return Err(ClassifierError::Config("need two or more class means".into()));
    }
    if let Some(f) = cfg.mean_fractions.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(ClassifierError::Config(format!("mean fraction {f} outside [0, 1]")));
    }
    let mut rows = Vec::new();
    for &tc in &cfg.twice_cutoffs {
        let j_max = tc as f64 / 2.0;
        let table = IrrepTable::new(GroupSpec::Su2 { twice_cutoff: tc })?;
        for &v in &cfg.valences {
            if v == 0 || v % 2 == 1 {
                return Err(ClassifierError::Config(format!("valence {v} must be positive and even")));
            }
            let graph = Graph::loops(v / 2);
            let means: Vec<f64> = cfg.mean_fractions.iter().map(|f| f * j_max).collect();
            let ds = graph_dataset(&graph, tc, &means, cfg.n_train, cfg.n_test, cfg.seed)?;
            let tcfg = TrainingConfig {
                twice_cutoff: tc,
                ..cfg.training.clone()
            };
            let log = train(&ds, &tcfg)?;
            let (obj, _) = setup(&ds, &tcfg)?;
            let learned: BTreeMap<usize, BTreeMap<usize, f64>> =
                log.weights.iter().map(|(&c, w)| (c, w.means.clone())).collect();
            rows.push(SweepRow {
                j_max,
                valence: total_valence(&graph),
                train_error: log.last().train_error,
                test_error: obj.error(&ds.test, &learned)?,
                dim_hilbert: dim_hilbert_cutoff(&table, &graph)?,
                total_valence: total_valence(&graph),
            });
        }
    }
    let mut csv = String::from("j_max,valence,train_error,test_error,dim_hilbert,total_valence\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.j_max, r.valence, r.train_error, r.test_error, r.dim_hilbert, r.total_valence
        )
        .unwrap();
    }
    Ok((rows, csv))
}

/// Description of the perceptron encoding, written into every report.
pub fn perceptron_encoding() -> &'static str {
    "input x -> k disjoint loops, loop i a coherent state with mean round_half(s*(x_i + o)); \
     class +/- -> coherent states with means s*(p_i +/- a*w_i/2), p = o - b*w/|w|^2; \
     template: cylinder over the loops; decision: class with larger |A|^2"
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronRow {
    pub scale: f64,
    pub hbar_analog: f64,
    pub agreement: f64,
    pub counted: usize,
    pub ties_excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronReport {
    pub encoding: String,
    pub offset: f64,
    pub separation: f64,
    pub rows: Vec<PerceptronRow>,
    /// Agreement never decreases as the scale grows.
    pub monotone: bool,
}

fn round_half(x: f64) -> f64 {
    (2.0 * x).round() / 2.0
}

/// Compares the amplitude decision with `sign(w.x + b)` at each mean-spin
/// scale (`hbar ~ 1/scale`). Inputs on the decision boundary are skipped.
#[allow(clippy::too_many_arguments)]
pub fn semiclassical_perceptron_check(
    w: &[f64],
    b: f64,
    inputs: &[Vec<f64>],
    scales: &[f64],
    twice_cutoff: u32,
    offset: f64,
    separation: f64,
) -> Result<PerceptronReport, ClassifierError> {
    let k = w.len();
    let w2: f64 = w.iter().map(|x| x * x).sum();
    if k == 0 || w2 == 0.0 {
        return Err(ClassifierError::Config("weights must be nonzero".into()));
    }
    if inputs.iter().any(|x| x.len() != k) {
        return Err(ClassifierError::Config("input length differs from weight length".into()));
    }
    let group = GroupSpec::Su2 { twice_cutoff };
    let j_max = twice_cutoff as f64 / 2.0;
    let engine = Engine::new(IrrepTable::new(group)?, Template::Cylinder);
    let graph = Graph::loops(k);
    let p: Vec<f64> = w.iter().map(|wi| offset - b * wi / w2).collect();
    let coherent = |means: Vec<f64>| -> Result<BoundaryState, ClassifierError> {
        if let Some(m) = means.iter().find(|m| !(0.0..=j_max).contains(*m)) {
            return Err(ClassifierError::Encoding(format!("mean {m} outside [0, {j_max}]")));
        }
        Ok(BoundaryState::Coherent {
            group,
            graph: graph.clone(),
            weights: CoherentWeights::with_default_spreads(means.into_iter().enumerate().collect()),
        })
    };
    let mut rows = Vec::new();
    for &s in scales {
        if !(s > 0.0) {
            return Err(ClassifierError::Config(format!("scale {s} must be positive")));
        }
        let classes: BTreeMap<usize, BoundaryState> = [
            (0, coherent(p.iter().zip(w).map(|(pi, wi)| s * (pi - separation * wi / 2.0)).collect())?),
            (1, coherent(p.iter().zip(w).map(|(pi, wi)| s * (pi + separation * wi / 2.0)).collect())?),
        ]
        .into();
        let (mut agree, mut counted, mut ties) = (0, 0, 0);
        for x in inputs {
            let margin: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + b;
            if margin.abs() < 1e-12 {
                ties += 1;
                continue;
            }
            counted += 1;
            let input = coherent(x.iter().map(|xi| round_half(s * (xi + offset))).collect())?;
            let c = engine.classify(&input, &classes)?;
            let want = if margin > 0.0 { 1 } else { 0 };
            if c.prediction() == Some(want) {
                agree += 1;
            }
        }
        rows.push(PerceptronRow {
            scale: s,
            hbar_analog: 1.0 / s,
            agreement: if counted == 0 { 1.0 } else { agree as f64 / counted as f64 },
            counted,
            ties_excluded: ties,
        });
    }
    let mut sorted: Vec<&PerceptronRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    let monotone = sorted.windows(2).all(|p| p[1].agreement >= p[0].agreement);
    Ok(PerceptronReport {
        encoding: perceptron_encoding().to_string(),
        offset,
        separation,
        rows,
        monotone,
    })
}
