//! Input loaders with schema-path diagnostics and the output directory.

use crate::diag::{usage, Diagnostic, Kind};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::{Path, PathBuf};
use tqnn::classifier::BoundaryState;
use tqnn::group_algebra::GroupSpec;
use tqnn::spin_network::{Graph, SpinNetwork};
use tqnn::two_complex::{corpus, TwoComplex};

pub const VERSION: &str = concat!("tqnn ", env!("CARGO_PKG_VERSION"));

/// Environment variable overriding the output directory.
pub const OUT_ENV: &str = "TQNN_OUT_DIR";

pub fn read_text(path: &Path) -> Result<String, Diagnostic> {
    std::fs::read_to_string(path)
        .map_err(|e| Diagnostic::new(Kind::Input, format!("cannot read input: {e}")).in_file(path.display().to_string()))
}

pub fn from_json<T: DeserializeOwned>(text: &str, file: &str) -> Result<T, Diagnostic> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Diagnostic::new(Kind::Schema, e.into_inner().to_string()).in_file(file).at(path)
    })
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, Diagnostic> {
    from_json(&read_text(path)?, &path.display().to_string())
}

pub fn parse_group(s: &str) -> Result<GroupSpec, Diagnostic> {
    s.parse().map_err(|e| usage(format!("group `{s}`: {e}")))
}

/// A complex from a JSON file, or a bundled corpus entry when no such file
/// exists.
pub fn load_complex(spec: &str) -> Result<TwoComplex, Diagnostic> {
    let path = Path::new(spec);
    let c: TwoComplex = if path.exists() {
        load_json(path)?
    } else if let Some(c) = corpus::by_name(spec) {
        c
    } else {
        return Err(Diagnostic::new(
            Kind::Input,
            format!("no file or bundled complex `{spec}` (bundled: {})", corpus::NAMES.join(", ")),
        ));
    };
    c.validate().map_err(|e| Diagnostic::from(e).in_file(spec))?;
    Ok(c)
}

/// A boundary state; a bare spin network is read as a sharp state.
pub fn state_from_value(v: serde_json::Value, file: &str) -> Result<BoundaryState, Diagnostic> {
    let text = v.to_string();
    if v.get("kind").is_some() {
        from_json(&text, file)
    } else {
        let sn: SpinNetwork = from_json(&text, file)?;
        Ok(BoundaryState::Sharp { network: sn })
    }
}

/// `loop`, `theta`, `segment`, `bouquet:K`, `loops:K` or `ring:K`.
pub fn parse_graph(s: &str) -> Result<Graph, Diagnostic> {
    let bad = || usage(format!("unknown graph `{s}`"));
    let (name, k) = match s.split_once(':') {
        Some((n, k)) => (n, Some(k.parse::<usize>().map_err(|_| bad())?)),
        None => (s, None),
    };
    Ok(match (name, k) {
        ("loop", None) => Graph::single_loop(),
        ("theta", None) => Graph::theta(),
        ("segment", None) => Graph::segment(),
        ("bouquet", Some(k)) if k > 0 => Graph::bouquet(k),
        ("loops", Some(k)) if k > 0 => Graph::loops(k),
        ("ring", Some(k)) if k > 0 => Graph::ring(k),
        _ => return Err(bad()),
    })
}

/// Twice a spin given as a number such as `3` or `2.5`.
pub fn twice_spin(j: f64) -> Result<u32, Diagnostic> {
    let t = (2.0 * j).round();
    if !(j > 0.0) || (2.0 * j - t).abs() > 1e-9 {
        return Err(usage(format!("cutoff {j} must be a positive multiple of 1/2")));
    }
    Ok(t as u32)
}

/// Output directory holding the config echo, the version and the artifacts.
pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn create(dir: PathBuf, echo: &str) -> Result<Self, Diagnostic> {
        std::fs::create_dir_all(&dir).map_err(|e| {
            Diagnostic::new(Kind::Io, format!("cannot create output directory: {e}")).in_file(dir.display().to_string())
        })?;
        let out = Self { dir };
        out.text("config.toml", echo)?;
        out.text("VERSION", &format!("{VERSION}\n"))?;
        Ok(out)
    }

    pub fn text(&self, name: &str, contents: &str) -> Result<(), Diagnostic> {
        let p = self.dir.join(name);
        std::fs::write(&p, contents)
            .map_err(|e| Diagnostic::new(Kind::Io, format!("cannot write: {e}")).in_file(p.display().to_string()))
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), Diagnostic> {
        let s = serde_json::to_string_pretty(value).map_err(|e| Diagnostic::new(Kind::Io, e.to_string()))?;
        self.text(name, &(s + "\n"))
    }
}

/// Compact decimal for summaries: integers without a fraction, otherwise
/// up to ten decimals with trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(3.0000000000000004), "3");
        assert_eq!(fmt_num(2.25), "2.25");
        assert_eq!(fmt_num(-1e-13), "0");
        assert_eq!(fmt_num(0.398942280401), "0.3989422804");
    }

    #[test]
    fn graph_names() {
        assert_eq!(parse_graph("bouquet:2").unwrap(), Graph::bouquet(2));
        assert_eq!(parse_graph("loop").unwrap(), Graph::single_loop());
        assert!(parse_graph("ring:0").is_err());
        assert!(parse_graph("star").is_err());
    }

    #[test]
    fn bundled_complex_fallback() {
        assert_eq!(load_complex("torus.json").unwrap(), corpus::torus());
        assert_eq!(load_complex("no-such-thing").unwrap_err().kind, Kind::Input);
    }
}
