use super::{require, Ctx};
use crate::diag::{usage, Diagnostic, Kind};
use crate::io::{fmt_num, load_complex, parse_group, read_text};
use clap::Args;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use tqnn::group_algebra::{GroupElement, IrrepTable};
use tqnn::two_complex::{partition_function_with, Amplitude, Method};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct BfArgs {
    /// Complex file, or a bundled name (disk, annulus, sphere, torus, genus2)
    #[arg(long)]
    pub complex: Option<String>,
    /// Z1..Z12, S3, Q8 or SU2:<J_max> [default: S3]
    #[arg(long)]
    pub group: Option<String>,
    /// auto, group-sum, brute-force or character-expansion [default: auto]
    #[arg(long)]
    pub method: Option<String>,
    /// JSON map from boundary edge id to group element (name or index)
    #[arg(long)]
    pub boundary: Option<PathBuf>,
}

#[derive(Serialize)]
struct Report<'a> {
    complex: &'a str,
    method: Method,
    boundary: Option<&'a BTreeMap<usize, GroupElement>>,
    amplitude: Amplitude,
}

pub fn parse_method(s: &str) -> Result<Method, Diagnostic> {
    Ok(match s {
        "auto" => Method::Auto,
        "group-sum" => Method::GroupSum,
        "brute-force" => Method::BruteForce,
        "character-expansion" => Method::CharacterExpansion,
        _ => return Err(usage(format!("unknown method `{s}`"))),
    })
}

fn load_assignment(path: &Path, t: &IrrepTable) -> Result<BTreeMap<usize, GroupElement>, Diagnostic> {
    let file = path.display().to_string();
    let raw: BTreeMap<usize, serde_json::Value> = crate::io::from_json(&read_text(path)?, &file)?;
    let mut out = BTreeMap::new();
    for (e, v) in raw {
        let bad = |m: String| Diagnostic::new(Kind::Schema, m).in_file(&file).at(e.to_string());
        let u = match &v {
            serde_json::Value::String(name) => {
                t.element_by_name(name).ok_or_else(|| bad(format!("no element named `{name}`")))?
            }
            serde_json::Value::Number(n) if t.order().is_some() => {
                GroupElement::Finite(n.as_u64().ok_or_else(|| bad("element index must be a nonnegative integer".into()))? as usize)
            }
            _ => serde_json::from_value(v.clone()).map_err(|err| bad(err.to_string()))?,
        };
        t.check_element(&u).map_err(|err| bad(err.to_string()))?;
        out.insert(e, u);
    }
    Ok(out)
}

pub fn run(a: &BfArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("bf", a)?;
    let name = require(&a.complex, "complex")?;
    let c = load_complex(&name)?;
    let spec = parse_group(a.group.get_or_insert_with(|| "S3".into()))?;
    let method = parse_method(a.method.get_or_insert_with(|| "auto".into()))?;
    let t = IrrepTable::new(spec)?;
    let boundary = a.boundary.as_ref().map(|p| load_assignment(p, &t)).transpose()?;
    let amp = partition_function_with(&c, &t, boundary.as_ref(), method)?;
    let out = ctx.output("bf", &a)?;
    out.json(
        "amplitude.json",
        &Report {
            complex: &name,
            method,
            boundary: boundary.as_ref(),
            amplitude: amp,
        },
    )?;
    let z = amp.value;
    let shown = if z.im.abs() <= 1e-12 * z.re.abs().max(1.0) {
        fmt_num(z.re)
    } else {
        format!("{}{}{}i", fmt_num(z.re), if z.im < 0.0 { "-" } else { "+" }, fmt_num(z.im.abs()))
    };
    Ok(format!("Z={shown}"))
}
