use super::{csv_row, Ctx};
use crate::diag::{usage, Diagnostic};
use crate::io::fmt_num;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tqnn::path_integral::{
    concentration_profile, ConcentrationMethod, ConcentrationOptions, MetropolisOptions, ParticleModel, PathLattice,
    Potential, Signature,
};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ConcentrateArgs {
    /// Harmonic potential with this angular frequency [default: free]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Grid points [default: 5]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Time slices, including both ends [default: 4]
    #[arg(long)]
    pub slices: Option<usize>,
    /// [default: -2]
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    /// [default: 2]
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    /// Total time [default: 3]
    #[arg(long)]
    pub time: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// Start point [default: x_min]
    #[arg(long, allow_hyphen_values = true)]
    pub x_in: Option<f64>,
    /// End point [default: x_max]
    #[arg(long, allow_hyphen_values = true)]
    pub x_out: Option<f64>,
    /// Tube radius around the classical path [default: dx]
    #[arg(long)]
    pub radius: Option<f64>,
    /// [default: 1,0.5,0.25,0.1]
    #[arg(long, value_delimiter = ',')]
    pub hbars: Option<Vec<f64>>,
    /// auto, exact or metropolis [default: auto]
    #[arg(long)]
    pub method: Option<String>,
    /// Sampler seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Sampler chains [default: 4]
    #[arg(long)]
    pub chains: Option<usize>,
    /// Sampler sweeps per chain [default: 20000]
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Discarded sweeps per chain [default: 2000]
    #[arg(long)]
    pub burn_in: Option<usize>,
}

pub fn run(a: &ConcentrateArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("concentrate", a)?;
    let lattice = PathLattice {
        x_min: *a.x_min.get_or_insert(-2.0),
        x_max: *a.x_max.get_or_insert(2.0),
        n_points: *a.grid.get_or_insert(5),
        t_in: 0.0,
        t_out: *a.time.get_or_insert(3.0),
        slices: *a.slices.get_or_insert(4),
    };
    lattice.validate()?;
    let model = ParticleModel {
        mass: *a.mass.get_or_insert(1.0),
        potential: a.omega.map_or(Potential::Free, |omega| Potential::Harmonic { omega }),
        ..ParticleModel::free(Signature::Euclidean)
    };
    let x_in = *a.x_in.get_or_insert(lattice.x_min);
    let x_out = *a.x_out.get_or_insert(lattice.x_max);
    let r = *a.radius.get_or_insert(lattice.dx());
    let hbars = a.hbars.get_or_insert_with(|| vec![1.0, 0.5, 0.25, 0.1]).clone();
    let d = MetropolisOptions::default();
    let opts = ConcentrationOptions {
        method: match a.method.get_or_insert_with(|| "auto".into()).as_str() {
            "auto" => ConcentrationMethod::Auto,
            "exact" => ConcentrationMethod::Exact,
            "metropolis" => ConcentrationMethod::Metropolis,
            m => return Err(usage(format!("unknown method `{m}`"))),
        },
        metropolis: MetropolisOptions {
            seed: *a.seed.get_or_insert(d.seed),
            chains: *a.chains.get_or_insert(d.chains),
            sweeps: *a.sweeps.get_or_insert(d.sweeps),
            burn_in: *a.burn_in.get_or_insert(d.burn_in),
            rhat_max: d.rhat_max,
        },
        ..Default::default()
    };
    let rows = concentration_profile(&model, &lattice, x_in, x_out, r, &hbars, &opts)?;
    let out = ctx.output("concentrate", &a)?;
    let mut csv = String::from("hbar,fraction,stderr,method,rhat\n");
    for row in &rows {
        let method = serde_json::to_value(row.method).unwrap();
        csv += &csv_row(&[
            row.hbar.to_string(),
            row.fraction.to_string(),
            row.stderr.to_string(),
            method.as_str().unwrap_or_default().to_string(),
            row.rhat.map_or(String::new(), |v| v.to_string()),
        ]);
    }
    out.text("concentration.csv", &csv)?;
    // ordered by descending hbar
    let mut by_hbar: Vec<_> = rows.iter().collect();
    by_hbar.sort_by(|x, y| y.hbar.total_cmp(&x.hbar));
    let increasing = by_hbar.windows(2).all(|w| w[1].fraction > w[0].fraction);
    out.json("summary.json", &json!({ "rows": rows, "strictly_increasing": increasing }))?;
    let fr: Vec<String> = rows.iter().map(|r| fmt_num(r.fraction)).collect();
    Ok(format!("fractions {} strictly_increasing={increasing}", fr.join(" ")))
}
