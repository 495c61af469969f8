//! JSON documents for models and relation families.
//!
//! A model file is an object with keys `depth`, `signature` (`props` and
//! `noms`, one array per level), `worlds` (one array per level), `domain`
//! (array of id tuples), `relations` (one array of tuple pairs per
//! level), `propval` (array of `{prop, prefix, worlds}` entries) and
//! `nomval` (object mapping nominal to world id). Unknown keys are
//! rejected so typos surface as parse errors instead of silently empty
//! sections.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::equiv::{EquivError, RelationFamily};
use crate::model::{LayeredModel, ModelError, TuplePair, WorldTuple};
use crate::signature::Signature;

/// A world-id tuple pair as stored on disk.
pub type RelPair = (Vec<String>, Vec<String>);

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SignatureSection {
    pub props: Vec<Vec<String>>,
    pub noms: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PropEntry {
    pub prop: String,
    #[serde(default)]
    pub prefix: Vec<String>,
    pub worlds: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub depth: usize,
    pub signature: SignatureSection,
    pub worlds: Vec<Vec<String>>,
    pub domain: Vec<Vec<String>>,
    pub relations: Vec<Vec<RelPair>>,
    #[serde(default)]
    pub propval: Vec<PropEntry>,
    #[serde(default)]
    pub nomval: BTreeMap<String, String>,
}

impl ModelDocument {
    /// Builds the model, reporting shape problems as errors. Repeated
    /// `(prop, prefix)` entries are unioned.
    pub fn into_model(self) -> Result<LayeredModel, ModelError> {
        let collect = |lists: Vec<Vec<String>>| -> Vec<BTreeSet<String>> {
            lists.into_iter().map(|v| v.into_iter().collect()).collect()
        };
        let sig = Signature::new(
            self.depth,
            collect(self.signature.props),
            collect(self.signature.noms),
        )?;
        let worlds: Vec<BTreeSet<String>> = self
            .worlds
            .into_iter()
            .map(|ids| ids.into_iter().collect())
            .collect();
        let domain: BTreeSet<WorldTuple> = self.domain.into_iter().map(WorldTuple::new).collect();
        let rels: Vec<BTreeSet<TuplePair>> = self
            .relations
            .into_iter()
            .map(|pairs| {
                pairs
                    .into_iter()
                    .map(|(a, b)| (WorldTuple::new(a), WorldTuple::new(b)))
                    .collect()
            })
            .collect();
        let mut propval: BTreeMap<(String, WorldTuple), BTreeSet<String>> = BTreeMap::new();
        for entry in self.propval {
            propval
                .entry((entry.prop, WorldTuple::new(entry.prefix)))
                .or_default()
                .extend(entry.worlds);
        }
        LayeredModel::new(sig, worlds, domain, rels, propval, self.nomval)
    }

    pub fn from_model(model: &LayeredModel) -> ModelDocument {
        let depth = model.depth();
        let sig = model.sig();
        ModelDocument {
            depth,
            signature: SignatureSection {
                props: (0..=depth)
                    .map(|k| sig.props_at(k).iter().cloned().collect())
                    .collect(),
                noms: (0..=depth)
                    .map(|k| sig.noms_at(k).iter().cloned().collect())
                    .collect(),
            },
            worlds: (0..=depth)
                .map(|k| model.worlds_at(k).iter().cloned().collect())
                .collect(),
            domain: model.domain().iter().map(|t| t.ids().to_vec()).collect(),
            relations: (0..=depth)
                .map(|k| {
                    model
                        .rel_at(k)
                        .iter()
                        .map(|(a, b)| (a.ids().to_vec(), b.ids().to_vec()))
                        .collect()
                })
                .collect(),
            propval: model
                .propval()
                .iter()
                .map(|((prop, prefix), worlds)| PropEntry {
                    prop: prop.clone(),
                    prefix: prefix.ids().to_vec(),
                    worlds: worlds.iter().cloned().collect(),
                })
                .collect(),
            nomval: model.nomval().clone(),
        }
    }
}

/// A relation family on disk: `kind` is `layered` (with `levels`, one
/// pair array per level) or `hierarchical` (with `pairs`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<RelPair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<RelPair>>,
}

fn to_pairs(raw: Vec<RelPair>) -> BTreeSet<TuplePair> {
    raw.into_iter()
        .map(|(a, b)| (WorldTuple::new(a), WorldTuple::new(b)))
        .collect()
}

fn from_pairs(set: &BTreeSet<TuplePair>) -> Vec<RelPair> {
    set.iter()
        .map(|(a, b)| (a.ids().to_vec(), b.ids().to_vec()))
        .collect()
}

impl FamilyDocument {
    pub fn into_family(self) -> Result<RelationFamily, EquivError> {
        match (self.kind.as_str(), self.levels, self.pairs) {
            ("layered", Some(levels), None) => Ok(RelationFamily::Layered(
                levels.into_iter().map(to_pairs).collect(),
            )),
            ("hierarchical", None, Some(pairs)) => {
                Ok(RelationFamily::Hierarchical(to_pairs(pairs)))
            }
            ("layered", _, _) => Err(EquivError::MalformedFamily(
                "layered family needs exactly the levels key".into(),
            )),
            ("hierarchical", _, _) => Err(EquivError::MalformedFamily(
                "hierarchical family needs exactly the pairs key".into(),
            )),
            (other, _, _) => Err(EquivError::MalformedFamily(format!(
                "unknown family kind {other:?}"
            ))),
        }
    }

    pub fn from_family(family: &RelationFamily) -> FamilyDocument {
        match family {
            RelationFamily::Layered(levels) => FamilyDocument {
                kind: "layered".into(),
                levels: Some(levels.iter().map(from_pairs).collect()),
                pairs: None,
            },
            RelationFamily::Hierarchical(set) => FamilyDocument {
                kind: "hierarchical".into(),
                levels: None,
                pairs: Some(from_pairs(set)),
            },
        }
    }
}
