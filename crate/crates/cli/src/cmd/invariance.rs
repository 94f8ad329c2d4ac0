use super::{csv_row, Ctx};
use crate::diag::Diagnostic;
use crate::io::{load_complex, parse_group};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tqnn::exec;
use tqnn::group_algebra::{GroupSpec, IrrepTable};
use tqnn::two_complex::{corpus, partition_function, TwoComplex};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct InvarianceArgs {
    /// Complexes (files or bundled names) [default: every bundled complex]
    #[arg(long, value_delimiter = ',')]
    pub complexes: Option<Vec<String>>,
    /// Groups [default: Z1..Z12, S3, Q8]
    #[arg(long, value_delimiter = ',')]
    pub groups: Option<Vec<String>>,
    /// Interior moves per sequence [default: 5]
    #[arg(long)]
    pub moves: Option<usize>,
    /// Move sequences per complex and group [default: 20]
    #[arg(long)]
    pub sequences: Option<usize>,
    /// Base seed; sequence k uses stream k [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn catalog() -> Vec<String> {
    let mut g: Vec<String> = (1..=12).map(|n| GroupSpec::Cyclic(n).to_string()).collect();
    g.push("S3".into());
    g.push("Q8".into());
    g
}

/// Applies up to `moves` random interior moves drawn from `(seed, stream)`.
pub fn subdivide(c: &TwoComplex, moves: usize, seed: u64, stream: u64) -> Result<(TwoComplex, usize), Diagnostic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut c = c.clone();
    let mut applied = 0;
    for _ in 0..moves {
        let Some(mv) = c.random_interior_move(&mut rng) else { break };
        c = c.apply(mv)?;
        applied += 1;
    }
    Ok((c, applied))
}

pub fn run(a: &InvarianceArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("invariance", a)?;
    let names = a
        .complexes
        .get_or_insert_with(|| corpus::NAMES.iter().map(|s| s.to_string()).collect())
        .clone();
    let groups = a.groups.get_or_insert_with(catalog).clone();
    let moves = *a.moves.get_or_insert(5);
    let sequences = *a.sequences.get_or_insert(20);
    let seed = *a.seed.get_or_insert(0);
    let complexes = names.iter().map(|n| load_complex(n)).collect::<Result<Vec<_>, _>>()?;
    let tables = groups
        .iter()
        .map(|g| Ok(IrrepTable::new(parse_group(g)?)?))
        .collect::<Result<Vec<_>, Diagnostic>>()?;
    let out = ctx.output("invariance", &a)?;

    let mut csv = String::from("complex,group,sequence,moves,vertices,edges,faces,z_re,z_im,reference_re,reference_im,rel_deviation\n");
    let (mut max_dev, mut runs): (f64, usize) = (0.0, 0);
    for (name, c) in names.iter().zip(&complexes) {
        for t in &tables {
            let z0 = partition_function(c, t, None)?.value;
            let rows = exec::map_indexed(sequences, |k| -> Result<_, Diagnostic> {
                let (s, applied) = subdivide(c, moves, seed, k as u64)?;
                let z = partition_function(&s, t, None)?.value;
                Ok((s, applied, z))
            });
            for (k, r) in rows.into_iter().enumerate() {
                let (s, applied, z) = r?;
                let dev = (z - z0).norm() / z0.norm().max(f64::MIN_POSITIVE);
                max_dev = max_dev.max(dev);
                runs += 1;
                csv += &csv_row(&[
                    name.clone(),
                    t.spec().to_string(),
                    k.to_string(),
                    applied.to_string(),
                    s.vertices.len().to_string(),
                    s.edges.len().to_string(),
                    s.faces.len().to_string(),
                    z.re.to_string(),
                    z.im.to_string(),
                    z0.re.to_string(),
                    z0.im.to_string(),
                    dev.to_string(),
                ]);
            }
        }
    }
    out.text("invariance.csv", &csv)?;
    out.json("summary.json", &json!({ "runs": runs, "max_rel_deviation": max_dev }))?;
    Ok(format!("max relative deviation {max_dev:.3e} over {runs} sequences"))
}
