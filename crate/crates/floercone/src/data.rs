//! Bundled model complexes, embedded at build time and overridable through
//! the `FLOERCONE_DATA_DIR` environment variable.

use serde::Serialize;

use crate::knot::{parse_knot_complex, KnotComplex, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KnotClass {
    Staircase,
    Thin,
    Mixed,
}

#[derive(Debug, Clone, Copy)]
pub struct BundledEntry {
    pub name: &'static str,
    pub file: &'static str,
    pub genus: u32,
    pub class: KnotClass,
    pub flip_included: bool,
    text: &'static str,
}

macro_rules! entry {
    ($name:literal, $genus:literal, $class:expr) => {
        BundledEntry {
            name: $name,
            file: concat!("data/v1/", $name, ".kfc"),
            genus: $genus,
            class: $class,
            flip_included: true,
            text: include_str!(concat!("../data/v1/", $name, ".kfc")),
        }
    };
}

pub const ENTRIES: &[BundledEntry] = &[
    entry!("unknot", 0, KnotClass::Staircase),
    entry!("trefoil_rh", 1, KnotClass::Staircase),
    entry!("trefoil_lh", 1, KnotClass::Thin),
    entry!("figure_eight", 1, KnotClass::Thin),
    entry!("t25_rh", 2, KnotClass::Staircase),
    entry!("t34_rh", 3, KnotClass::Staircase),
    entry!("thin_52", 1, KnotClass::Thin),
];

pub const DATA_DIR_ENV: &str = "FLOERCONE_DATA_DIR";

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("unknown knot name `{0}` (see `list-knots` for bundled entries)")]
    UnknownName(String),
    #[error("cannot read `{path}`: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub fn list() -> &'static [BundledEntry] {
    ENTRIES
}

pub fn find(name: &str) -> Option<&'static BundledEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

/// Load a bundled complex by name. When `FLOERCONE_DATA_DIR` is set, the file
/// `<dir>/<name>.kfc` is read instead of the embedded copy.
pub fn load(name: &str) -> Result<KnotComplex, DataError> {
    let entry = find(name).ok_or_else(|| DataError::UnknownName(name.to_string()))?;
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        let path = std::path::Path::new(&dir).join(format!("{name}.kfc"));
        let text = std::fs::read_to_string(&path).map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        return Ok(parse_knot_complex(&text)?);
    }
    Ok(parse_knot_complex(entry.text)?)
}
