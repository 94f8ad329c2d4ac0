use super::{csv_row, Ctx, TrainingArgs};
use crate::diag::{usage, Diagnostic};
use crate::io::{fmt_num, load_json, parse_graph, twice_spin};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use tqnn::classifier::{error_rate, graph_dataset, separated_graph_dataset, train, LabeledDataset};
use tqnn::group_algebra::GroupSpec;

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct TrainArgs {
    /// Dataset JSON; when absent a dataset is generated
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Generator graph: loop, theta, segment, bouquet:K, loops:K, ring:K [default: loop]
    #[arg(long)]
    pub graph: Option<String>,
    /// Generator spin cutoff J_max [default: 3]
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Generator mean spin per class [default: 0.5,2]
    #[arg(long, value_delimiter = ',')]
    pub means: Option<Vec<f64>>,
    /// Train items per class [default: 6]
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Test items per class [default: 4]
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Generator seed [default: 11]
    #[arg(long)]
    pub seed: Option<u64>,
    /// `separated` (redraw items nearer another class) or `coherent` [default: separated]
    #[arg(long)]
    pub sampling: Option<String>,
    #[command(flatten)]
    #[serde(default)]
    pub training: TrainingArgs,
}

/// Generated or loaded dataset; generator fields are cleared when a file is
/// given so the echo shows what was used.
pub fn dataset(a: &mut TrainArgs) -> Result<LabeledDataset, Diagnostic> {
    if let Some(p) = &a.dataset {
        let ds: LabeledDataset = load_json(p)?;
        ds.validate()?;
        (a.graph, a.cutoff, a.means, a.n_train, a.n_test, a.seed, a.sampling) = (None, None, None, None, None, None, None);
        return Ok(ds);
    }
    let graph = parse_graph(a.graph.get_or_insert_with(|| "loop".into()))?;
    let tc = twice_spin(*a.cutoff.get_or_insert(3.0))?;
    let means = a.means.get_or_insert_with(|| vec![0.5, 2.0]).clone();
    let (n_train, n_test) = (*a.n_train.get_or_insert(6), *a.n_test.get_or_insert(4));
    let seed = *a.seed.get_or_insert(11);
    Ok(match a.sampling.get_or_insert_with(|| "separated".into()).as_str() {
        "separated" => separated_graph_dataset(&graph, tc, &means, n_train, n_test, seed)?,
        "coherent" => graph_dataset(&graph, tc, &means, n_train, n_test, seed)?,
        s => return Err(usage(format!("unknown sampling `{s}`"))),
    })
}

pub fn su2_cutoff(ds: &LabeledDataset) -> Result<u32, Diagnostic> {
    match ds.group {
        GroupSpec::Su2 { twice_cutoff } => Ok(twice_cutoff),
        g => Err(usage(format!("training needs an SU2 dataset, got {g}"))),
    }
}

pub fn run(a: &TrainArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("train", a)?;
    let ds = dataset(&mut a)?;
    let cfg = a.training.resolve(su2_cutoff(&ds)?)?;
    let log = train(&ds, &cfg)?;
    let test_error = error_rate(&ds, &ds.test, &log.weights, &cfg.template)?;
    let out = ctx.output("train", &a)?;
    out.json("dataset.json", &ds)?;
    let mut csv = String::from("iteration,objective,loss,train_error,erm,step\n");
    for e in &log.entries {
        csv += &csv_row(&[
            e.iteration.to_string(),
            e.objective.to_string(),
            e.loss.to_string(),
            e.train_error.to_string(),
            e.erm.to_string(),
            e.step.to_string(),
        ]);
    }
    out.text("log.csv", &csv)?;
    out.json("weights.json", &log.weights)?;
    let last = log.last();
    out.json(
        "summary.json",
        &json!({
            "iterations": log.iterations(),
            "stop": log.stop,
            "train_error": last.train_error,
            "test_error": test_error,
            "objective": last.objective,
            "erm": last.erm,
            "excluded": log.excluded,
            "seed": ds.seed,
        }),
    )?;
    let stop = serde_json::to_value(log.stop).unwrap();
    Ok(format!(
        "train error {} test error {} after {} iterations ({})",
        fmt_num(last.train_error),
        fmt_num(test_error),
        log.iterations(),
        stop.as_str().unwrap_or_default()
    ))
}
