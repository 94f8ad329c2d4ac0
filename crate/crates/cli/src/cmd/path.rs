use super::{csv_row, Ctx};
use crate::diag::{usage, Diagnostic};
use crate::io::fmt_num;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::PI;
use tqnn::path_integral::{
    free_propagator_exact, propagate, ParticleModel, PathLattice, Potential, PropagateOptions, Signature,
};

#[derive(Debug, Clone, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct PathArgs {
    /// Free particle (the default when no potential is given)
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub free: Option<bool>,
    /// Harmonic potential with this angular frequency
    #[arg(long)]
    pub omega: Option<f64>,
    /// Imaginary-time (Euclidean) weights [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub euclidean: Option<bool>,
    /// Grid points [default: 257]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Time slices, including both ends [default: 64]
    #[arg(long)]
    pub slices: Option<usize>,
    /// [default: -8]
    #[arg(long, allow_hyphen_values = true)]
    pub x_min: Option<f64>,
    /// [default: 8]
    #[arg(long, allow_hyphen_values = true)]
    pub x_max: Option<f64>,
    /// Total time [default: 1]
    #[arg(long)]
    pub time: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,
    /// [default: 1]
    #[arg(long)]
    pub hbar: Option<f64>,
    /// Source point x_in, on the grid [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub source: Option<f64>,
    /// Evaluate lattices that fail the aliasing guard [default: false]
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub allow_unstable: Option<bool>,
}

fn exact(model: &ParticleModel, t: f64, x: f64, xp: f64) -> (f64, f64) {
    let (m, h) = (model.mass, model.hbar);
    match model.signature {
        Signature::Lorentzian => {
            let k = free_propagator_exact(m, h, t, x, xp);
            (k.re, k.im)
        }
        Signature::Euclidean => {
            let k = (m / (2.0 * PI * h * t)).sqrt() * (-m * (x - xp).powi(2) / (2.0 * h * t)).exp();
            (k, 0.0)
        }
    }
}

pub fn run(a: &PathArgs, ctx: &Ctx) -> Result<String, Diagnostic> {
    let mut a = ctx.resolve("path", a)?;
    if a.free == Some(true) && a.omega.is_some() {
        return Err(usage("`free` and `omega` are exclusive"));
    }
    let potential = match a.omega {
        Some(omega) => {
            a.free = Some(false);
            Potential::Harmonic { omega }
        }
        None => {
            a.free = Some(true);
            Potential::Free
        }
    };
    let signature = if *a.euclidean.get_or_insert(false) {
        Signature::Euclidean
    } else {
        Signature::Lorentzian
    };
    let lattice = PathLattice {
        x_min: *a.x_min.get_or_insert(-8.0),
        x_max: *a.x_max.get_or_insert(8.0),
        n_points: *a.grid.get_or_insert(257),
        t_in: 0.0,
        t_out: *a.time.get_or_insert(1.0),
        slices: *a.slices.get_or_insert(64),
    };
    let model = ParticleModel {
        mass: *a.mass.get_or_insert(1.0),
        hbar: *a.hbar.get_or_insert(1.0),
        potential: potential.clone(),
        signature,
    };
    let source = *a.source.get_or_insert(0.0);
    let opts = PropagateOptions {
        allow_unstable: *a.allow_unstable.get_or_insert(false),
    };
    lattice.validate()?;
    lattice.index_of(source)?;
    let p = propagate(&model, &lattice, opts)?;
    let row = p.from_source(source)?;
    let out = ctx.output("path", &a)?;

    let free = potential == Potential::Free;
    let t = lattice.t_out - lattice.t_in;
    let mut csv = String::from("x_out,re,im,modulus,phase");
    if free {
        csv += ",exact_re,exact_im,exact_modulus,exact_phase";
    }
    csv.push('\n');
    for (x, k) in lattice.positions().iter().zip(&row) {
        let mut f = vec![x.to_string(), k.re.to_string(), k.im.to_string(), k.norm().to_string(), k.arg().to_string()];
        if free {
            let (re, im) = exact(&model, t, *x, source);
            f.extend([re.to_string(), im.to_string(), re.hypot(im).to_string(), im.atan2(re).to_string()]);
        }
        csv += &csv_row(&f);
    }
    out.text("propagator.csv", &csv)?;
    let k0 = p.at(source, source)?;
    out.json(
        "summary.json",
        &json!({
            "nyquist_ratio": p.nyquist_ratio,
            "source": source,
            "k_diagonal": { "re": k0.re, "im": k0.im, "modulus": k0.norm(), "phase": k0.arg() },
        }),
    )?;
    Ok(format!(
        "|K({s},{s})|={} phase={} nyquist_ratio={}",
        fmt_num(k0.norm()),
        fmt_num(k0.arg()),
        fmt_num(p.nyquist_ratio),
        s = fmt_num(source)
    ))
}
