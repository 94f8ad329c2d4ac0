//! TOML configuration: one table per subcommand, flags layered on top.

use crate::diag::{Diagnostic, Kind};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::path::{Path, PathBuf};

pub const SECTIONS: [&str; 10] = [
    "groups",
    "bf",
    "invariance",
    "path",
    "concentrate",
    "classify",
    "train",
    "random-labels",
    "sweep",
    "validate",
];

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub sections: toml::Table,
}

pub fn parse(text: &str, file: &str) -> Result<ConfigFile, Diagnostic> {
    let bad = |m: String| Diagnostic::new(Kind::Config, m).in_file(file);
    let table: toml::Table = toml::from_str(text).map_err(|e| bad(e.message().to_string()))?;
    let mut cfg = ConfigFile::default();
    for (k, v) in table {
        match (k.as_str(), v) {
            ("out", toml::Value::String(s)) => cfg.out = Some(PathBuf::from(s)),
            ("out", _) => return Err(bad("`out` must be a string".into()).at("out")),
            (s, toml::Value::Table(t)) if SECTIONS.contains(&s) => {
                cfg.sections.insert(k, toml::Value::Table(t));
            }
            (s, _) if SECTIONS.contains(&s) => return Err(bad(format!("`{s}` must be a table")).at(s)),
            (s, _) => return Err(bad(format!("unknown key `{s}`")).at(s)),
        }
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<ConfigFile, Diagnostic> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Diagnostic::new(Kind::Input, format!("cannot read config: {e}")).in_file(&file))?;
    parse(&text, &file)
}

fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Config table for `section` overlaid with the set flags, deserialized
/// with unknown keys rejected.
pub fn resolve<T: Serialize + DeserializeOwned>(
    section: &str,
    flags: &T,
    cfg: Option<&ConfigFile>,
) -> Result<T, Diagnostic> {
    let mut base = match cfg.and_then(|c| c.sections.get(section)) {
        Some(toml::Value::Table(t)) => t.clone(),
        _ => toml::Table::new(),
    };
    let over = toml::Table::try_from(flags).map_err(|e| Diagnostic::new(Kind::Usage, e.to_string()))?;
    merge(&mut base, over);
    let text = toml::to_string(&base).map_err(|e| Diagnostic::new(Kind::Config, e.to_string()))?;
    let de = toml::Deserializer::parse(&text).map_err(|e| Diagnostic::new(Kind::Config, e.message().to_string()))?;
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Diagnostic::new(Kind::Config, e.into_inner().message().to_string()).at(format!("{section}.{path}"))
    })
}

/// The resolved parameters of one run, as a TOML document.
pub fn echo<T: Serialize>(section: &str, resolved: &T) -> Result<String, Diagnostic> {
    let inner = toml::Table::try_from(resolved).map_err(|e| Diagnostic::new(Kind::Io, e.to_string()))?;
    let mut doc = toml::Table::new();
    doc.insert(section.to_string(), toml::Value::Table(inner));
    toml::to_string(&doc).map_err(|e| Diagnostic::new(Kind::Io, e.to_string()))
}
