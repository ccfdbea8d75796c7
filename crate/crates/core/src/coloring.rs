use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Vertex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColoringKind {
    Proper,
    TwoDipath,
    Oriented,
    /// Values are vertex ids of a target graph rather than colours.
    Homomorphism,
}

/// A vertex colouring or a homomorphism `V(G) -> V(H)`.
///
/// Colours of the non-homomorphism kinds are positive; homomorphism values
/// are 0-based target vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringAssignment {
    pub kind: ColoringKind,
    #[serde(rename = "colors")]
    values: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct ColoringFile {
    schema: u32,
    #[serde(flatten)]
    coloring: ColoringAssignment,
}

impl ColoringAssignment {
    pub fn new(values: Vec<u32>, kind: ColoringKind) -> Self {
        ColoringAssignment { kind, values }
    }

    /// Colours given 1-based, as drawn in figures.
    pub fn colors(values: &[u32]) -> Self {
        Self::new(values.to_vec(), ColoringKind::Oriented)
    }

    #[inline]
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn get(&self, v: Vertex) -> u32 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of distinct values used.
    pub fn color_count(&self) -> usize {
        let mut v = self.values.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    /// Relabels the used values onto `1..=m`, preserving their order.
    pub fn normalized(&self, kind: ColoringKind) -> ColoringAssignment {
        let mut used: Vec<u32> = self.values.clone();
        used.sort_unstable();
        used.dedup();
        let rank: BTreeMap<u32, u32> = used
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u32 + 1))
            .collect();
        ColoringAssignment {
            kind,
            values: self.values.iter().map(|c| rank[c]).collect(),
        }
    }

    /// The colouring induced by a homomorphism: each vertex receives (the
    /// rank of) its image.
    pub fn pullback(&self) -> ColoringAssignment {
        self.normalized(ColoringKind::Oriented)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ColoringFile {
            schema: 1,
            coloring: self.clone(),
        })
        .expect("colouring serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str::<ColoringFile>(text).map(|f| f.coloring)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_compacts_in_order() {
        let c = ColoringAssignment::new(vec![7, 3, 7, 10], ColoringKind::Homomorphism);
        assert_eq!(c.pullback().values(), &[2, 1, 2, 3]);
        assert_eq!(c.color_count(), 3);
    }

    #[test]
    fn json_round_trip() {
        let c = ColoringAssignment::new(vec![1, 2, 1], ColoringKind::TwoDipath);
        let text = c.to_json();
        assert!(text.contains("\"schema\":1"));
        assert_eq!(ColoringAssignment::from_json(&text).unwrap(), c);
    }
}
