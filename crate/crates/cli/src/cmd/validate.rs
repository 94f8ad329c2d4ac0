use super::bf::BfArgs;
use super::classify::{load_classes, load_state, ClassifyArgs};
use super::concentrate::ConcentrateArgs;
use super::groups::GroupsArgs;
use super::invariance::InvarianceArgs;
use super::path::PathArgs;
use super::random_labels::RandomLabelsArgs;
use super::sweep::SweepArgs;
use super::train::TrainArgs;
use super::{require, Ctx};
use crate::config::{self, ConfigFile};
use crate::diag::{usage, Diagnostic, Kind};
use crate::io::{from_json, load_complex, read_text};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use tqnn::classifier::LabeledDataset;
use tqnn::spin_network::SpinNetwork;

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ValidateArgs {
    /// File to check
    pub file: Option<PathBuf>,
    /// auto, complex, spin-network, boundary-state, classes, dataset or config [default: auto]
    #[arg(long)]
    pub kind: Option<String>,
}

fn detect(v: &serde_json::Value) -> &'static str {
    let has = |k: &str| v.get(k).is_some();
    if has("faces") {
        "complex"
    } else if has("items") {
        "dataset"
    } else if has("kind") {
        "boundary-state"
    } else if has("links") || has("spins") || has("graph") {
        "spin-network"
    } else if v.as_object().is_some_and(|o| !o.is_empty() && o.keys().all(|k| k.parse::<usize>().is_ok())) {
        "classes"
    } else {
        "unknown"
    }
}

fn spin_network(text: &str, file: &str) -> Result<(), Diagnostic> {
    let sn: SpinNetwork = from_json(text, file)?;
    let v = sn.validate();
    if v.is_empty() {
        return Ok(());
    }
    Err(Diagnostic::new(Kind::Domain, format!("{} violation(s)", v.len()))
        .in_file(file)
        .with_details(v.iter().map(|x| x.to_string()).collect()))
}

/// Every section resolves into its argument type.
pub fn check_config(cfg: &ConfigFile) -> Result<(), Diagnostic> {
    let c = Some(cfg);
    config::resolve("groups", &GroupsArgs::default(), c)?;
    config::resolve("bf", &BfArgs::default(), c)?;
    config::resolve("invariance", &InvarianceArgs::default(), c)?;
    config::resolve("path", &PathArgs::default(), c)?;
    config::resolve("concentrate", &ConcentrateArgs::default(), c)?;
    config::resolve("classify", &ClassifyArgs::default(), c)?;
    config::resolve("train", &TrainArgs::default(), c)?;
    config::resolve("random-labels", &RandomLabelsArgs::default(), c)?;
    config::resolve("sweep", &SweepArgs::default(), c)?;
    config::resolve("validate", &ValidateArgs::default(), c)?;
    Ok(())
}

pub fn run(a: &ValidateArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("validate", a)?;
    let path = require(&a.file, "file")?;
    let file = path.display().to_string();
    let mut kind = a.kind.get_or_insert_with(|| "auto".into()).clone();
    if kind == "auto" && path.extension().is_some_and(|e| e == "toml") {
        kind = "config".into();
    }
    if kind == "config" {
        let cfg = config::parse(&read_text(&path)?, &file)?;
        check_config(&cfg).map_err(|d| d.in_file(&file))?;
        return Ok("ok".into());
    }
    let text = read_text(&path)?;
    if kind == "auto" {
        let v: serde_json::Value = from_json(&text, &file)?;
        kind = detect(&v).into();
    }
    match kind.as_str() {
        "complex" => {
            load_complex(&file)?;
        }
        "spin-network" => spin_network(&text, &file)?,
        "boundary-state" => {
            load_state(&path)?.validate().map_err(|e| Diagnostic::from(e).in_file(&file))?;
        }
        "classes" => {
            for (c, s) in load_classes(&path)? {
                s.validate().map_err(|e| Diagnostic::from(e).in_file(&file).at(c.to_string()))?;
            }
        }
        "dataset" => {
            let ds: LabeledDataset = from_json(&text, &file)?;
            ds.validate().map_err(|e| Diagnostic::from(e).in_file(&file))?;
        }
        "unknown" => return Err(Diagnostic::new(Kind::Schema, "cannot tell what kind of file this is; pass --kind").in_file(file)),
        k => return Err(usage(format!("unknown kind `{k}`"))),
    }
    Ok("ok".into())
}
