use super::train::su2_cutoff;
use super::{csv_row, Ctx, TrainingArgs};
use crate::diag::Diagnostic;
use crate::io::{fmt_num, load_json, parse_graph, parse_group};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use tqnn::classifier::{random_label_experiment, topological_dataset, LabeledDataset};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct RandomLabelsArgs {
    /// Dataset JSON; when absent one class per generator graph is built
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Class graphs [default: loop,theta,bouquet:2]
    #[arg(long, value_delimiter = ',')]
    pub graphs: Option<Vec<String>>,
    /// Generator group, SU2:<J_max> [default: SU2:1]
    #[arg(long)]
    pub group: Option<String>,
    /// Train items per class [default: 4]
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Test items per class [default: 2]
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Generator seed [default: 5]
    #[arg(long)]
    pub data_seed: Option<u64>,
    /// Label permutation seeds [default: 1,2,3]
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[command(flatten)]
    #[serde(default)]
    pub training: TrainingArgs,
}

fn dataset(a: &mut RandomLabelsArgs) -> Result<LabeledDataset, Diagnostic> {
    if let Some(p) = &a.dataset {
        let ds: LabeledDataset = load_json(p)?;
        ds.validate()?;
        (a.graphs, a.group, a.n_train, a.n_test, a.data_seed) = (None, None, None, None, None);
        return Ok(ds);
    }
    let graphs = a
        .graphs
        .get_or_insert_with(|| vec!["loop".into(), "theta".into(), "bouquet:2".into()])
        .iter()
        .map(|g| parse_graph(g))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = parse_group(a.group.get_or_insert_with(|| "SU2:1".into()))?;
    let (n_train, n_test) = (*a.n_train.get_or_insert(4), *a.n_test.get_or_insert(2));
    Ok(topological_dataset(spec, &graphs, n_train, n_test, *a.data_seed.get_or_insert(5))?)
}

pub fn run(a: &RandomLabelsArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("random-labels", a)?;
    let ds = dataset(&mut a)?;
    let seeds = a.seeds.get_or_insert_with(|| vec![1, 2, 3]).clone();
    let cfg = a.training.resolve(su2_cutoff(&ds)?)?;
    let rep = random_label_experiment(&ds, &cfg, &seeds)?;
    let out = ctx.output("random-labels", &a)?;
    out.json("dataset.json", &ds)?;
    out.json("report.json", &rep)?;
    let mut csv = String::from("seed,permutation,mismatch_fraction,best_accuracy,trained_accuracy,stop\n");
    for r in std::iter::once(&rep.control).chain(&rep.runs) {
        let perm: Vec<String> = r.permutation.iter().map(|(a, b)| format!("{a}>{b}")).collect();
        let stop = r.stop.map(|s| serde_json::to_value(s).unwrap().as_str().unwrap_or_default().to_string());
        csv += &csv_row(&[
            r.seed.map_or("control".into(), |s| s.to_string()),
            perm.join(" "),
            r.mismatch_fraction.to_string(),
            r.best_accuracy.to_string(),
            r.trained_accuracy.map_or(String::new(), |v| v.to_string()),
            stop.unwrap_or_default(),
        ]);
    }
    out.text("runs.csv", &csv)?;
    let mean = if rep.runs.is_empty() {
        0.0
    } else {
        rep.runs.iter().map(|r| r.mismatch_fraction).sum::<f64>() / rep.runs.len() as f64
    };
    Ok(format!(
        "control mismatch {}, randomized mean mismatch {} over {} seeds, permutation average {}",
        fmt_num(rep.control.mismatch_fraction),
        fmt_num(mean),
        rep.runs.len(),
        fmt_num(rep.expected_mismatch)
    ))
}
