//! Element-wise composition and the feature-set algebra that predicts the
//! support of composed vectors.
//!
//! With non-negative weights nothing cancels, so support follows set algebra
//! exactly: `add` and `max` give unions, `mul` and `min` intersections, and a
//! matrix-vector product collects the supports of the columns selected by the
//! vector's features.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_dims, Error, Result};
use crate::vector::{DistVector, FeatureSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementwiseOp {
    Add,
    Mul,
    Min,
    Max,
}

impl ElementwiseOp {
    pub const ALL: [ElementwiseOp; 4] = [
        ElementwiseOp::Add,
        ElementwiseOp::Mul,
        ElementwiseOp::Min,
        ElementwiseOp::Max,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementwiseOp::Add => "add",
            ElementwiseOp::Mul => "mul",
            ElementwiseOp::Min => "min",
            ElementwiseOp::Max => "max",
        }
    }

    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            ElementwiseOp::Add => a + b,
            ElementwiseOp::Mul => a * b,
            ElementwiseOp::Min => a.min(b),
            ElementwiseOp::Max => a.max(b),
        }
    }

    /// Whether the operator's features are the union (rather than the
    /// intersection) of its operands' features.
    pub fn is_union(self) -> bool {
        matches!(self, ElementwiseOp::Add | ElementwiseOp::Max)
    }
}

impl fmt::Display for ElementwiseOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ElementwiseOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ElementwiseOp::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// Coordinate-wise fold of `vs` with `op`.
pub fn compose_elementwise(op: ElementwiseOp, vs: &[&DistVector]) -> Result<DistVector> {
    let (first, rest) = vs.split_first().ok_or(Error::EmptyInput)?;
    let mut acc = first.weights().to_vec();
    for v in rest {
        check_dims(acc.len(), v.dim())?;
        for (a, b) in acc.iter_mut().zip(v.iter()) {
            *a = op.apply(*a, *b);
        }
    }
    Ok(DistVector::from_nonneg(acc))
}

/// Support of `compose_elementwise(op, …)` predicted from operand supports.
pub fn predict_feature_set(op: ElementwiseOp, sets: &[FeatureSet]) -> Result<FeatureSet> {
    let (first, rest) = sets.split_first().ok_or(Error::EmptyInput)?;
    Ok(rest.iter().fold(first.clone(), |acc, s| {
        if op.is_union() {
            acc.union(s)
        } else {
            acc.intersection(s)
        }
    }))
}

/// Support of `M × v`: the union of the column supports `F(w_i)` over the
/// features `i` of `v`.
pub fn predict_matvec_features(columns: &[FeatureSet], v_support: &FeatureSet) -> Result<FeatureSet> {
    if let Some(max) = v_support.iter().last() {
        if max >= columns.len() {
            return Err(Error::DimMismatch {
                left: columns.len(),
                right: max + 1,
            });
        }
    }
    Ok(v_support
        .iter()
        .fold(FeatureSet::new(), |acc, i| acc.union(&columns[i])))
}
