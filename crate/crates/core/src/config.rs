//! JSON configuration for constraints and objectives.
//!
//! Constraint config:
//! `{"kind":"uniform","k":3}`,
//! `{"kind":"partition","blocks":[["a","b"],["c"]],"capacities":[1,1]}`,
//! `{"kind":"intersection","m1":{...},"m2":{...}}`.
//!
//! Objective config:
//! `{"kind":"linear","weights":{"a":1.5,...}}`,
//! `{"kind":"coverage","types":[["a","b"],...],"type_weights":[...]}`.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::matroid::{IntersectionConstraint, Matroid};
use crate::submodular::SubmodularFn;

/// Element reference in a config file: a string id or a bare integer.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum IdRef {
    Str(String),
    Num(u64),
}

impl IdRef {
    fn as_id(&self) -> String {
        match self {
            IdRef::Str(s) => s.clone(),
            IdRef::Num(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConstraintConfig {
    Uniform {
        k: usize,
    },
    Partition {
        blocks: Vec<Vec<IdRef>>,
        capacities: Vec<usize>,
    },
    Intersection {
        m1: Box<ConstraintConfig>,
        m2: Box<ConstraintConfig>,
    },
}

/// A resolved constraint: one matroid or an intersection of two.
#[derive(Debug, Clone)]
pub enum Constraint {
    Single(Matroid),
    Intersection(IntersectionConstraint),
}

impl Constraint {
    pub fn describe(&self) -> String {
        match self {
            Constraint::Single(m) => m.describe(),
            Constraint::Intersection(c) => c.describe(),
        }
    }

    /// Rank for a single matroid, maximum common cardinality for an
    /// intersection.
    pub fn k(&self) -> usize {
        match self {
            Constraint::Single(m) => m.rank(),
            Constraint::Intersection(c) => c.k_common(),
        }
    }
}

pub fn parse_constraint(text: &str, ids: &[String]) -> Result<Constraint> {
    let cfg: ConstraintConfig = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), format!("constraint config: {e}")))?;
    resolve_constraint(&cfg, ids)
}

pub fn resolve_constraint(cfg: &ConstraintConfig, ids: &[String]) -> Result<Constraint> {
    match cfg {
        ConstraintConfig::Intersection { m1, m2 } => {
            let m1 = resolve_matroid(m1, ids)?;
            let m2 = resolve_matroid(m2, ids)?;
            Ok(Constraint::Intersection(IntersectionConstraint::new(
                m1, m2,
            )?))
        }
        single => Ok(Constraint::Single(resolve_matroid(single, ids)?)),
    }
}

fn resolve_matroid(cfg: &ConstraintConfig, ids: &[String]) -> Result<Matroid> {
    let n = ids.len();
    match cfg {
        ConstraintConfig::Uniform { k } => Ok(Matroid::uniform(n, *k)),
        ConstraintConfig::Partition {
            blocks,
            capacities,
        } => {
            let mut resolved: Vec<Vec<usize>> = Vec::with_capacity(blocks.len());
            for block in blocks {
                let mut indices = Vec::with_capacity(block.len());
                for idref in block {
                    indices.push(lookup(ids, &idref.as_id())?);
                }
                resolved.push(indices);
            }
            Matroid::partition_from_blocks(n, &resolved, capacities)
        }
        ConstraintConfig::Intersection { .. } => Err(Error::invalid(
            "intersection constraints cannot be nested inside another intersection",
        )),
    }
}

fn lookup(ids: &[String], id: &str) -> Result<usize> {
    ids.iter()
        .position(|x| x == id)
        .ok_or_else(|| Error::invalid(format!("unknown element id '{id}' in config")))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Linear {
        weights: BTreeMap<String, f64>,
    },
    Coverage {
        types: Vec<Vec<IdRef>>,
        #[serde(default)]
        type_weights: Option<Vec<f64>>,
    },
}

pub fn parse_objective(text: &str, ids: &[String]) -> Result<SubmodularFn> {
    let cfg: ObjectiveConfig = serde_json::from_str(text)
        .map_err(|e| Error::parse(e.line(), format!("objective config: {e}")))?;
    resolve_objective(&cfg, ids)
}

pub fn resolve_objective(cfg: &ObjectiveConfig, ids: &[String]) -> Result<SubmodularFn> {
    let n = ids.len();
    match cfg {
        ObjectiveConfig::Linear { weights } => {
            // Elements missing from the map default to weight 0.
            let mut w = vec![0.0; n];
            for (id, weight) in weights {
                w[lookup(ids, id)?] = *weight;
            }
            SubmodularFn::linear(w)
        }
        ObjectiveConfig::Coverage {
            types,
            type_weights,
        } => {
            let mut resolved: Vec<Vec<usize>> = Vec::with_capacity(types.len());
            for t in types {
                let mut indices = Vec::with_capacity(t.len());
                for idref in t {
                    indices.push(lookup(ids, &idref.as_id())?);
                }
                resolved.push(indices);
            }
            SubmodularFn::coverage(n, resolved, type_weights.clone())
        }
    }
}
