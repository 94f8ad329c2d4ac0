use super::{csv_row, Ctx};
use crate::diag::Diagnostic;
use crate::io::parse_group;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tqnn::group_algebra::{HaarOptions, IrrepTable, DEFAULT_HAAR_NODES};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct GroupsArgs {
    /// Z1..Z12, S3, Q8 or SU2:<J_max> [default: S3]
    #[arg(long)]
    pub group: Option<String>,
    /// Quadrature nodes for SU2 integrals [default: 256]
    #[arg(long)]
    pub nodes: Option<usize>,
}

pub fn run(a: &GroupsArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("groups", a)?;
    let spec = parse_group(a.group.get_or_insert_with(|| "S3".into()))?;
    let nodes = *a.nodes.get_or_insert(DEFAULT_HAAR_NODES);
    let t = IrrepTable::new(spec)?;
    let out = ctx.output("groups", &a)?;
    out.text("characters.csv", &t.character_table_csv())?;

    let irreps = t.irreps();
    let mut table = String::from("label,name,dim\n");
    for &r in &irreps {
        table += &csv_row(&[r.0.to_string(), t.irrep_name(r)?, t.dim(r)?.to_string()]);
    }
    out.text("irreps.csv", &table)?;

    let opts = HaarOptions { nodes, ..Default::default() };
    let mut orth = String::from("r,s,re,im,deviation\n");
    let mut max_dev: f64 = 0.0;
    for &r in &irreps {
        for &s in &irreps {
            let v = t
                .haar_integrate(|u| t.character(r, u).unwrap() * t.character(s, u).unwrap().conj(), opts)?
                .value;
            let dev = (v - if r == s { 1.0 } else { 0.0 }).norm();
            max_dev = max_dev.max(dev);
            orth += &csv_row(&[r.0.to_string(), s.0.to_string(), v.re.to_string(), v.im.to_string(), dev.to_string()]);
        }
    }
    out.text("orthogonality.csv", &orth)?;
    out.json(
        "group.json",
        &json!({
            "group": spec,
            "order": t.order(),
            "irreps": irreps.len(),
            "exactness": t.exactness(),
            "max_orthogonality_deviation": max_dev,
        }),
    )?;
    let order = t.order().map_or("compact".to_string(), |n| format!("order {n}"));
    Ok(format!(
        "{spec}: {order}, {} irreps, max orthogonality deviation {}",
        irreps.len(),
        if max_dev == 0.0 { "0".into() } else { format!("{max_dev:.3e}") }
    ))
}
