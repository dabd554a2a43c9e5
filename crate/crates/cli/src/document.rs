//! JSON documents read and written by the command line.

use std::collections::BTreeMap;

use obspace::algebra::{Event, ObservationSpace, PartialDistribution, Partition, SampleSpace};
use obspace::field::{FieldKind, OrderedField, Scalar, ScalarText};
use obspace::fixtures::AnySpace;
use obspace::Error;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// An observation space in interchange form. Exact scalars are strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub points: Vec<String>,
    pub field: String,
    pub tests: Vec<TestDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestDocument {
    pub name: String,
    pub atoms: Vec<Vec<String>>,
    pub probs: Vec<String>,
}

/// Pretty JSON with a trailing newline; key order follows the struct.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("{what}: line {}, column {}: {e}", e.line(), e.column())))
}

impl SpaceDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        parse_json(text, "space document")
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_space<F: ScalarText>(os: &ObservationSpace<F>) -> Self {
        let space = os.space();
        let all: Vec<F> = os.tests().iter().flat_map(|t| t.probs().iter().cloned()).collect();
        let tests = os
            .tests()
            .iter()
            .map(|t| TestDocument {
                name: t.name().to_string(),
                atoms: t
                    .partition()
                    .atoms()
                    .iter()
                    .map(|a| a.indices().map(|i| space.labels()[i].clone()).collect())
                    .collect(),
                probs: t.probs().iter().map(|p| p.clone().into_scalar().to_string()).collect(),
            })
            .collect();
        Self { points: space.labels().to_vec(), field: F::field_kind_of(&all).to_string(), tests }
    }

    pub fn from_any(space: &AnySpace) -> Self {
        match space {
            AnySpace::Rational(os) => Self::from_space(os),
            AnySpace::Quadratic(os) => Self::from_space(os),
            AnySpace::Float(os) => Self::from_space(os),
        }
    }

    /// The field the scalars are read in: `field_override` if given, else
    /// the document's own.
    pub fn field_kind(&self, field_override: Option<FieldKind>) -> Result<FieldKind, CliError> {
        match field_override {
            Some(k) => Ok(k),
            None => self.field.parse().map_err(|e: Error| CliError::Parse(e.to_string())),
        }
    }

    pub fn to_space(&self, field_override: Option<FieldKind>) -> Result<AnySpace, CliError> {
        let kind = self.field_kind(field_override)?;
        Ok(match kind {
            FieldKind::Rational => AnySpace::Rational(self.typed(kind, |s| match s {
                Scalar::Rational(r) => Some(r),
                _ => None,
            })?),
            FieldKind::Quadratic(_) => AnySpace::Quadratic(self.typed(kind, |s| match s {
                Scalar::Quad(q) => Some(q),
                _ => None,
            })?),
            FieldKind::Float => AnySpace::Float(self.typed(kind, |s| match s {
                Scalar::Float(a) => Some(a),
                _ => None,
            })?),
        })
    }

    fn typed<F: OrderedField>(&self, kind: FieldKind, extract: impl Fn(Scalar) -> Option<F>) -> Result<ObservationSpace<F>, CliError> {
        let space = SampleSpace::new(self.points.clone())?;
        let n = space.len();
        let mut tests = Vec::with_capacity(self.tests.len());
        for (k, t) in self.tests.iter().enumerate() {
            let at = |what: String| CliError::Parse(format!("tests[{k}] ({:?}): {what}", t.name));
            let mut atoms = Vec::with_capacity(t.atoms.len());
            for names in &t.atoms {
                let mut idx = Vec::with_capacity(names.len());
                for name in names {
                    idx.push(space.index_of(name).ok_or_else(|| at(format!("unknown point {name:?}")))?);
                }
                atoms.push(Event::from_indices(idx, n)?);
            }
            let partition = Partition::new(n, atoms).map_err(|e| at(e.to_string()))?;
            let probs = t
                .probs
                .iter()
                .map(|p| {
                    let s = kind.parse_scalar(p).map_err(|e| at(e.to_string()))?;
                    extract(s).ok_or_else(|| at(format!("{p:?} is not in the {kind} field")))
                })
                .collect::<Result<Vec<F>, _>>()?;
            tests.push(PartialDistribution::new(t.name.clone(), partition, probs).map_err(|e| at(e.to_string()))?);
        }
        Ok(ObservationSpace::new(space, tests)?)
    }
}

/// A permutation of sample points, `{"images": {"point": "image", ...}}`.
/// Points not listed are fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PermutationDocument {
    pub images: BTreeMap<String, String>,
}

impl PermutationDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        parse_json(text, "permutation document")
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_indices(labels: &[String], images: &[usize]) -> Self {
        let images = images
            .iter()
            .enumerate()
            .filter(|&(i, &j)| i != j)
            .map(|(i, &j)| (labels[i].clone(), labels[j].clone()))
            .collect();
        Self { images }
    }

    /// Images as indices into `labels`.
    pub fn resolve(&self, labels: &[String]) -> Result<Vec<usize>, CliError> {
        let index = |l: &str| {
            labels
                .iter()
                .position(|x| x == l)
                .ok_or_else(|| CliError::Parse(format!("permutation names {l:?}, which is not a grounding variable")))
        };
        let mut images: Vec<usize> = (0..labels.len()).collect();
        for (from, to) in &self.images {
            images[index(from)?] = index(to)?;
        }
        Ok(images)
    }
}

/// Scalar text for a typed field element.
pub fn text<F: ScalarText>(v: &F) -> String {
    v.clone().into_scalar().to_string()
}

pub fn texts<F: ScalarText>(v: &[F]) -> Vec<String> {
    v.iter().map(text).collect()
}
