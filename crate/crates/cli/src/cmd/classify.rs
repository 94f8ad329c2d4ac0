use super::{parse_template, require, Ctx};
use crate::diag::Diagnostic;
use crate::io::{fmt_num, from_json, parse_group, read_text, state_from_value};
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use tqnn::classifier::{classify, BoundaryState};
use tqnn::group_algebra::IrrepTable;

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ClassifyArgs {
    /// Input boundary state (or bare spin network) JSON
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// JSON object from class id to boundary state
    #[arg(long)]
    pub classes: Option<PathBuf>,
    /// Group the states must share [default: the input's group]
    #[arg(long)]
    pub group: Option<String>,
    /// `cylinder`, or a complex file or bundled name [default: cylinder]
    #[arg(long)]
    pub template: Option<String>,
}

pub fn load_state(path: &Path) -> Result<BoundaryState, Diagnostic> {
    let file = path.display().to_string();
    state_from_value(from_json(&read_text(path)?, &file)?, &file)
}

pub fn load_classes(path: &Path) -> Result<BTreeMap<usize, BoundaryState>, Diagnostic> {
    let file = path.display().to_string();
    let raw: BTreeMap<usize, serde_json::Value> = from_json(&read_text(path)?, &file)?;
    raw.into_iter()
        .map(|(c, v)| {
            let s = state_from_value(v, &file).map_err(|d| {
                let p = d.path.clone().map_or(c.to_string(), |p| format!("{c}.{p}"));
                d.at(p)
            })?;
            Ok((c, s))
        })
        .collect()
}

pub fn run(a: &ClassifyArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("classify", a)?;
    let input = load_state(&require(&a.input, "input")?)?;
    let classes = load_classes(&require(&a.classes, "classes")?)?;
    let spec = parse_group(a.group.get_or_insert_with(|| input.group().to_string()))?;
    let template = parse_template(a.template.get_or_insert_with(|| "cylinder".into()))?;
    let t = IrrepTable::new(spec)?;
    let c = classify(&input, &classes, &template, &t)?;
    let out = ctx.output("classify", &a)?;
    let amps: Vec<_> = c
        .amplitudes
        .iter()
        .map(|(k, v)| json!({ "class": k, "re": v.re, "im": v.im }))
        .collect();
    let pred = c.prediction();
    out.json(
        "classification.json",
        &json!({
            "prediction": pred,
            "probabilities": c.probabilities,
            "amplitudes": amps,
            "degenerate": c.degenerate,
            "zero_channels": c.zero_channels,
        }),
    )?;
    Ok(match pred {
        Some(k) => format!("class {k} (p={})", fmt_num(c.probabilities[&k])),
        None if c.degenerate => "degenerate: every amplitude vanishes".into(),
        None => "tie".into(),
    })
}
