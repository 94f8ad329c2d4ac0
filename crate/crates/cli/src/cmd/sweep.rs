use super::{csv_row, Ctx, TrainingArgs};
use crate::diag::{usage, Diagnostic};
use crate::io::{fmt_num, twice_spin};
use clap::Args;
use serde::{Deserialize, Serialize};
use tqnn::classifier::{capacity_sweep, semiclassical_perceptron_check, SweepConfig};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// `capacity` or `perceptron` [default: capacity]
    #[arg(long)]
    pub mode: Option<String>,
    /// Capacity: spin cutoffs J_max [default: 1,2,3]
    #[arg(long, value_delimiter = ',')]
    pub cutoffs: Option<Vec<f64>>,
    /// Capacity: total valences, even [default: 2,4]
    #[arg(long, value_delimiter = ',')]
    pub valences: Option<Vec<usize>>,
    /// Capacity: class means as fractions of J_max [default: 0.2,0.8]
    #[arg(long, value_delimiter = ',')]
    pub mean_fractions: Option<Vec<f64>>,
    /// Capacity: train items per class [default: 4]
    #[arg(long)]
    pub n_train: Option<usize>,
    /// Capacity: test items per class [default: 4]
    #[arg(long)]
    pub n_test: Option<usize>,
    /// Capacity: generator seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Perceptron: weight vector [default: 1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
    /// Perceptron: bias [default: -1]
    #[arg(long, allow_hyphen_values = true)]
    pub bias: Option<f64>,
    /// Perceptron: inputs, features comma-separated, repeat per input [default: -0.5 0 0.5 1 1.5 2 2.5]
    #[arg(long = "input", allow_hyphen_values = true)]
    pub inputs: Option<Vec<String>>,
    /// Perceptron: mean-spin scales [default: 1,2]
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Perceptron: spin cutoff J_max [default: 6]
    #[arg(long)]
    pub cutoff: Option<f64>,
    /// Perceptron: feature offset keeping spins nonnegative [default: 0.5]
    #[arg(long)]
    pub offset: Option<f64>,
    /// Perceptron: class separation along w [default: 1]
    #[arg(long)]
    pub separation: Option<f64>,
    #[command(flatten)]
    #[serde(default)]
    pub training: TrainingArgs,
}

fn capacity(a: &mut SweepArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    (a.weights, a.bias, a.inputs, a.scales, a.cutoff, a.offset, a.separation) = (None, None, None, None, None, None, None);
    let twice_cutoffs = a
        .cutoffs
        .get_or_insert_with(|| vec![1.0, 2.0, 3.0])
        .iter()
        .map(|&j| twice_spin(j))
        .collect::<Result<Vec<_>, _>>()?;
    let first = twice_cutoffs.first().copied().ok_or_else(|| usage("`cutoffs` is empty"))?;
    let cfg = SweepConfig {
        twice_cutoffs,
        valences: a.valences.get_or_insert_with(|| vec![2, 4]).clone(),
        mean_fractions: a.mean_fractions.get_or_insert_with(|| vec![0.2, 0.8]).clone(),
        n_train: *a.n_train.get_or_insert(4),
        n_test: *a.n_test.get_or_insert(4),
        seed: *a.seed.get_or_insert(0),
        training: a.training.resolve(first)?,
    };
    let (rows, csv) = capacity_sweep(&cfg)?;
    let out = ctx.output("sweep", &*a)?;
    out.text("sweep.csv", &csv)?;
    out.json("rows.json", &rows)?;
    Ok(format!("{} cells written to sweep.csv", rows.len()))
}

fn parse_input(s: &str) -> Result<Vec<f64>, Diagnostic> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| usage(format!("bad input vector `{s}`"))))
        .collect()
}

fn perceptron(a: &mut SweepArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    (a.cutoffs, a.valences, a.mean_fractions, a.n_train, a.n_test, a.seed) = (None, None, None, None, None, None);
    a.training = TrainingArgs::default();
    let w = a.weights.get_or_insert_with(|| vec![1.0]).clone();
    let b = *a.bias.get_or_insert(-1.0);
    let inputs = a
        .inputs
        .get_or_insert_with(|| ["-0.5", "0", "0.5", "1", "1.5", "2", "2.5"].map(String::from).to_vec())
        .iter()
        .map(|s| parse_input(s))
        .collect::<Result<Vec<_>, _>>()?;
    let scales = a.scales.get_or_insert_with(|| vec![1.0, 2.0]).clone();
    let tc = twice_spin(*a.cutoff.get_or_insert(6.0))?;
    let offset = *a.offset.get_or_insert(0.5);
    let sep = *a.separation.get_or_insert(1.0);
    let rep = semiclassical_perceptron_check(&w, b, &inputs, &scales, tc, offset, sep)?;
    let out = ctx.output("sweep", &*a)?;
    let mut csv = format!("# {}\nscale,hbar_analog,agreement,counted,ties_excluded\n", rep.encoding);
    for r in &rep.rows {
        csv += &csv_row(&[
            r.scale.to_string(),
            r.hbar_analog.to_string(),
            r.agreement.to_string(),
            r.counted.to_string(),
            r.ties_excluded.to_string(),
        ]);
    }
    out.text("perceptron.csv", &csv)?;
    out.json("report.json", &rep)?;
    let ag: Vec<String> = rep.rows.iter().map(|r| fmt_num(r.agreement)).collect();
    Ok(format!("agreement {} monotone={}", ag.join(" "), rep.monotone))
}

pub fn run(a: &SweepArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("sweep", a)?;
    match a.mode.get_or_insert_with(|| "capacity".into()).as_str() {
        "capacity" => capacity(&mut a, ctx),
        "perceptron" => perceptron(&mut a, ctx),
        m => Err(usage(format!("unknown mode `{m}`"))),
    }
}
