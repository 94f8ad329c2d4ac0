//! Labeled datasets of boundary states, generators and label permutations.

use super::{BoundaryState, ClassifierError};
use crate::group_algebra::{GroupSpec, IrrepLabel, IrrepTable};
use crate::spin_network::{CoherentWeights, Graph, SpinNetwork};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Item {
    pub input: BoundaryState,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledDataset {
    pub group: GroupSpec,
    pub items: Vec<Item>,
    /// Reference output state per class.
    pub classes: BTreeMap<usize, SpinNetwork>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

impl LabeledDataset {
    pub fn validate(&self) -> Result<(), ClassifierError> {
        let bad = |m: String| Err(ClassifierError::Dataset(m));
        for (i, it) in self.items.iter().enumerate() {
            if !self.classes.contains_key(&it.label) {
                return bad(format!("item {i}: unknown class {}", it.label));
            }
            if it.input.group() != self.group {
                return bad(format!("item {i}: group {} differs from {}", it.input.group(), self.group));
            }
            it.input.validate()?;
        }
        for (c, sn) in &self.classes {
            if sn.group != self.group {
                return bad(format!("class {c}: group {} differs from {}", sn.group, self.group));
            }
        }
        let tr: BTreeSet<usize> = self.train.iter().copied().collect();
        let te: BTreeSet<usize> = self.test.iter().copied().collect();
        if tr.len() != self.train.len() || te.len() != self.test.len() {
            return bad("split lists repeat an index".into());
        }
        if tr.intersection(&te).next().is_some() {
            return bad("train and test overlap".into());
        }
        let all: BTreeSet<usize> = tr.union(&te).copied().collect();
        if all != (0..self.items.len()).collect() {
            return bad("splits must cover every item exactly once".into());
        }
        Ok(())
    }

    pub fn class_states(&self) -> BTreeMap<usize, BoundaryState> {
        self.classes
            .iter()
            .map(|(&c, sn)| (c, BoundaryState::Sharp { network: sn.clone() }))
            .collect()
    }
}

/// Items on `graph`: every link of an item of class `c` draws an SU(2)
/// spin from the coherent weight peaked at `means[c]` (default spread).
/// Class references carry the peak spins. The first `n_train` items of
/// each class go to the train split, the next `n_test` to the test split.
pub fn graph_dataset(
    graph: &Graph,
    twice_cutoff: u32,
    means: &[f64],
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<LabeledDataset, ClassifierError> {
    sample_graph_dataset(graph, twice_cutoff, means, n_train, n_test, seed, false)
}

/// Draws to redo before [`separated_graph_dataset`] gives up on an item.
pub const SEPARATION_TRIES: usize = 1000;

/// [`graph_dataset`] with every draw redone until its spins are strictly
/// nearer (Euclidean, per link) to its own class mean than to any other.
pub fn separated_graph_dataset(
    graph: &Graph,
    twice_cutoff: u32,
    means: &[f64],
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<LabeledDataset, ClassifierError> {
    sample_graph_dataset(graph, twice_cutoff, means, n_train, n_test, seed, true)
}

fn sample_graph_dataset(
    graph: &Graph,
    twice_cutoff: u32,
    means: &[f64],
    n_train: usize,
    n_test: usize,
    seed: u64,
    separated: bool,
) -> Result<LabeledDataset, ClassifierError> {
    let group = GroupSpec::Su2 { twice_cutoff };
    IrrepTable::new(group)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::new();
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut classes = BTreeMap::new();
    for (c, &m) in means.iter().enumerate() {
        let w = CoherentWeights::with_default_spreads(graph.links.iter().map(|l| (l.id, m)).collect());
        w.validate(twice_cutoff)?;
        classes.insert(c, SpinNetwork::new(group, graph.clone(), w.peak_spins()));
        let support = w.support(twice_cutoff);
        for k in 0..n_train + n_test {
            let mut draw = || -> BTreeMap<usize, IrrepLabel> {
                graph
                    .links
                    .iter()
                    .map(|l| {
                        let opts = &support[&l.id];
                        let ws: Vec<f64> = opts.iter().map(|r| w.link_weight(l.id, r.0)).collect();
                        let d = WeightedIndex::new(&ws).expect("peak weight is 1");
                        (l.id, opts[d.sample(&mut rng)])
                    })
                    .collect()
            };
            let nearest = |spins: &BTreeMap<usize, IrrepLabel>| {
                let dist = |m: f64| spins.values().map(|r| (r.0 as f64 / 2.0 - m).powi(2)).sum::<f64>();
                let own = dist(m);
                means.iter().enumerate().all(|(o, &mo)| o == c || dist(mo) > own)
            };
            let mut spins = draw();
            if separated {
                let mut tries = 1;
                while !nearest(&spins) {
                    if tries == SEPARATION_TRIES {
                        return Err(ClassifierError::Dataset(format!(
                            "class {c}: no separated draw in {SEPARATION_TRIES} tries"
                        )));
                    }
                    spins = draw();
                    tries += 1;
                }
            }
            let idx = items.len();
            items.push(Item {
                input: BoundaryState::Sharp {
                    network: SpinNetwork::new(group, graph.clone(), spins),
                },
                label: c,
            });
            if k < n_train {
                train.push(idx);
            } else {
                test.push(idx);
            }
        }
    }
    Ok(LabeledDataset {
        group,
        items,
        classes,
        train,
        test,
        seed,
    })
}

/// One class per graph. Items copy their class graph with irreps drawn
/// uniformly per link, redrawn until the labeling is admissible.
pub fn topological_dataset(
    group: GroupSpec,
    graphs: &[Graph],
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<LabeledDataset, ClassifierError> {
    let table = IrrepTable::new(group)?;
    let irreps = table.irreps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::new();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    let mut classes = BTreeMap::new();
    for (c, g) in graphs.iter().enumerate() {
        classes.insert(
            c,
            SpinNetwork::new(group, g.clone(), g.links.iter().map(|l| (l.id, IrrepLabel(0))).collect()),
        );
        for k in 0..n_train + n_test {
            let mut sn = classes[&c].clone();
            for _ in 0..64 {
                let spins = g
                    .links
                    .iter()
                    .map(|l| (l.id, irreps[rng.random_range(0..irreps.len())]))
                    .collect();
                let cand = SpinNetwork::new(group, g.clone(), spins);
                if cand.validate().is_empty() {
                    sn = cand;
                    break;
                }
            }
            let idx = items.len();
            items.push(Item {
                input: BoundaryState::Sharp { network: sn },
                label: c,
            });
            if k < n_train {
                train.push(idx);
            } else {
                test.push(idx);
            }
        }
    }
    Ok(LabeledDataset {
        group,
        items,
        classes,
        train,
        test,
        seed,
    })
}

/// Uniform permutation of the class ids drawn from `seed`.
pub fn label_permutation(classes: &BTreeMap<usize, SpinNetwork>, seed: u64) -> BTreeMap<usize, usize> {
    let ids: Vec<usize> = classes.keys().copied().collect();
    let mut img = ids.clone();
    img.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    ids.into_iter().zip(img).collect()
}

/// Relabels the train items through `perm`; test labels are untouched.
pub fn apply_label_permutation(
    ds: &LabeledDataset,
    perm: &BTreeMap<usize, usize>,
) -> Result<LabeledDataset, ClassifierError> {
    let keys: BTreeSet<usize> = perm.keys().copied().collect();
    let vals: BTreeSet<usize> = perm.values().copied().collect();
    let ids: BTreeSet<usize> = ds.classes.keys().copied().collect();
    if keys != ids || vals != ids {
        return Err(ClassifierError::Dataset("label map is not a permutation of the classes".into()));
    }
    let mut out = ds.clone();
    for &i in &ds.train {
        out.items[i].label = perm[&ds.items[i].label];
    }
    Ok(out)
}

/// [`apply_label_permutation`] with [`label_permutation`]`(seed)`.
pub fn randomize_labels(
    ds: &LabeledDataset,
    seed: u64,
) -> Result<(LabeledDataset, BTreeMap<usize, usize>), ClassifierError> {
    if ds.classes.len() < 2 {
        return Err(ClassifierError::Dataset("need at least two classes".into()));
    }
    let perm = label_permutation(&ds.classes, seed);
    Ok((apply_label_permutation(ds, &perm)?, perm))
}
