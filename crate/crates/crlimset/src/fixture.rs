//! TOML fixture files: one presentation per document, optionally with a
//! morphism block naming the target order, generator images, witness words
//! and claimed relations.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::presentation::{
    MorphismSpec, Presentation, PresentationError, RealizationKind, WitnessExpr, Witnesses,
};
use crate::triangle::Order;
use crate::word::{Word, WordError};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Toml {
        path: String,
        source: toml::de::Error,
    },
    #[error("generator names must be single letters, got '{0}'")]
    BadGenerator(String),
    #[error("peripheral entries must be [meridian, longitude] pairs")]
    BadPeripheral,
    #[error("morphism target n must be an integer >= 4 or \"inf\"")]
    BadTarget,
    #[error("unknown realization '{0}' (expected \"triangle\" or \"lagrangian\")")]
    BadRealization(String),
    #[error("witness block must contain wx, wy, wxy, wxyinv")]
    IncompleteWitnesses,
    #[error("word error in fixture: {0}")]
    Word(#[from] WordError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

#[derive(Deserialize)]
struct RawFixture {
    name: String,
    generators: Vec<String>,
    #[serde(default)]
    relators: Vec<String>,
    #[serde(default)]
    peripheral: Vec<Vec<String>>,
    morphism: Option<RawMorphism>,
}

#[derive(Deserialize)]
struct RawMorphism {
    n: toml::Value,
    #[serde(default)]
    realization: Option<String>,
    #[serde(default)]
    claimed_relations: Vec<String>,
    images: BTreeMap<String, String>,
    witnesses: Option<RawWitnesses>,
}

#[derive(Deserialize)]
struct RawWitnesses {
    wx: String,
    wy: String,
    wxy: String,
    wxyinv: String,
    wa: Option<String>,
    wb: Option<String>,
}

/// Loads a fixture file; the morphism block is optional (homology-only
/// fixtures carry just the presentation).
pub fn load_fixture(path: &Path) -> Result<(Presentation, Option<MorphismSpec>), FixtureError> {
    let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_fixture(&text, &path.display().to_string())
}

pub fn parse_fixture(
    text: &str,
    label: &str,
) -> Result<(Presentation, Option<MorphismSpec>), FixtureError> {
    let raw: RawFixture = toml::from_str(text).map_err(|source| FixtureError::Toml {
        path: label.to_string(),
        source,
    })?;

    let mut generators = Vec::new();
    for g in &raw.generators {
        let mut chars = g.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_lowercase() => generators.push(c),
            _ => return Err(FixtureError::BadGenerator(g.clone())),
        }
    }

    let relators = raw
        .relators
        .iter()
        .map(|s| Word::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut peripheral = Vec::new();
    for pair in &raw.peripheral {
        if pair.len() != 2 {
            return Err(FixtureError::BadPeripheral);
        }
        peripheral.push((Word::parse(&pair[0])?, Word::parse(&pair[1])?));
    }
    let presentation = Presentation::new(&raw.name, &generators, relators, peripheral)?;

    let morphism = match raw.morphism {
        None => None,
        Some(m) => {
            let target_n = match &m.n {
                toml::Value::Integer(k) if *k >= 4 => Order::Finite(*k as u32),
                toml::Value::String(s) if s == "inf" => Order::Infinite,
                _ => return Err(FixtureError::BadTarget),
            };
            let kind = match m.realization.as_deref() {
                None | Some("triangle") => RealizationKind::TriangleUnipotent,
                Some("lagrangian") => RealizationKind::Lagrangian,
                Some(other) => return Err(FixtureError::BadRealization(other.to_string())),
            };
            let mut images = BTreeMap::new();
            for (g, w) in &m.images {
                let mut chars = g.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c.is_ascii_lowercase() => {
                        images.insert(c, Word::parse(w)?);
                    }
                    _ => return Err(FixtureError::BadGenerator(g.clone())),
                }
            }
            let witnesses = match m.witnesses {
                None => None,
                Some(w) => {
                    let mut wa = BTreeMap::new();
                    if let Some(e) = &w.wa {
                        wa.insert('a', WitnessExpr::parse(e)?);
                    }
                    if let Some(e) = &w.wb {
                        wa.insert('b', WitnessExpr::parse(e)?);
                    }
                    Some(Witnesses {
                        wx: Word::parse(&w.wx)?,
                        wy: Word::parse(&w.wy)?,
                        wxy: Word::parse(&w.wxy)?,
                        wxy_inv: Word::parse(&w.wxyinv)?,
                        wa: if wa.is_empty() { None } else { Some(wa) },
                    })
                }
            };
            let claimed_relations = m
                .claimed_relations
                .iter()
                .map(|s| Word::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            Some(MorphismSpec {
                target_n,
                images,
                witnesses,
                claimed_relations,
                kind,
            })
        }
    };

    Ok((presentation, morphism))
}
