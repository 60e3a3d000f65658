//! Graded dimension tables and their machine-readable form.
//!
//! Machine output is JSON whose numeric gradings are exact fraction strings
//! (`"5/4"`, `"-7/5"`), never decimals. Rows are sorted by
//! (spinc, alexander, maslov), so identical inputs produce byte-identical
//! output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::rat::Rat;

/// Key of one graded dimension: any subset of (spin^c, Alexander, Maslov).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct DimKey {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spinc: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alexander: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maslov: Option<Rat>,
}

/// Map from grading keys to dimensions; absent keys mean zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GradedDims(pub BTreeMap<DimKey, usize>);

impl GradedDims {
    pub fn from_maslov_dims(spinc: Option<i64>, dims: &BTreeMap<Rat, usize>) -> Self {
        GradedDims(
            dims.iter()
                .map(|(&m, &d)| {
                    (
                        DimKey {
                            spinc,
                            alexander: None,
                            maslov: Some(m),
                        },
                        d,
                    )
                })
                .collect(),
        )
    }

    pub fn from_bigraded_dims(spinc: Option<i64>, dims: &BTreeMap<(Rat, Rat), usize>) -> Self {
        GradedDims(
            dims.iter()
                .map(|(&(a, m), &d)| {
                    (
                        DimKey {
                            spinc,
                            alexander: Some(a),
                            maslov: Some(m),
                        },
                        d,
                    )
                })
                .collect(),
        )
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn merge(&mut self, other: GradedDims) {
        for (k, d) in other.0 {
            *self.0.entry(k).or_insert(0) += d;
        }
    }

    pub fn rows(&self) -> Vec<DimRow> {
        self.0
            .iter()
            .map(|(&key, &dim)| DimRow { key, dim })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DimRow {
    #[serde(flatten)]
    pub key: DimKey,
    pub dim: usize,
}
