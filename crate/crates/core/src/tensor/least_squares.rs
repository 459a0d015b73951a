//! Least-squares verb matrices fitted to holistic phrase vectors.
//!
//! Row `i` of the verb matrix predicts coordinate `i` of the phrase vector
//! from the argument vector: `w_i = (XᵀX + λI)⁻¹ Xᵀ y_i`, where the rows of
//! `X` are argument vectors and `y_i` holds coordinate `i` of the holistic
//! vectors. All rows are solved at once through one Cholesky factorization.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::vector::DistVector;

/// Relative pivot below which `XᵀX` is treated as singular (ridge = 0 only).
const SINGULAR_PIVOT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArgumentSlot {
    Subject,
    Object,
}

impl ArgumentSlot {
    pub fn name(self) -> &'static str {
        match self {
            ArgumentSlot::Subject => "subject",
            ArgumentSlot::Object => "object",
        }
    }
}

impl fmt::Display for ArgumentSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArgumentSlot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subject" => Ok(ArgumentSlot::Subject),
            "object" => Ok(ArgumentSlot::Object),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresVerbMatrix {
    verb: String,
    slot: ArgumentSlot,
    /// Output × input, row `i` is `w_i`.
    weights: DMatrix<f64>,
}

impl LeastSquaresVerbMatrix {
    pub fn new(verb: &str, slot: ArgumentSlot, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_out = rows.len();
        let n_in = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_in) {
            return Err(Error::Shape("ragged weight rows".into()));
        }
        if rows.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::Shape("non-finite weight".into()));
        }
        let weights = DMatrix::from_fn(n_out, n_in, |i, j| rows[i][j]);
        Ok(Self {
            verb: verb.to_string(),
            slot,
            weights,
        })
    }

    pub fn verb(&self) -> &str {
        &self.verb
    }

    pub fn slot(&self) -> ArgumentSlot {
        self.slot
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.weights[(row, col)]
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.weights.row(i).iter().copied().collect()
    }
}

fn to_matrix(rows: &[&[f64]], what: &str) -> Result<DMatrix<f64>> {
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Shape(format!("{what} rows differ in length")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

/// Solves the ridge-regularized normal equations for the verb matrix.
///
/// `x_rows` are argument vectors and `y_rows` the matching holistic phrase
/// vectors. With `ridge == 0` a rank-deficient `XᵀX` gives
/// [`Error::SingularSystem`].
pub fn train_least_squares(
    verb: &str,
    slot: ArgumentSlot,
    x_rows: &[&[f64]],
    y_rows: &[&[f64]],
    ridge: f64,
) -> Result<LeastSquaresVerbMatrix> {
    if x_rows.len() != y_rows.len() {
        return Err(Error::Shape(format!(
            "{} argument rows but {} target rows",
            x_rows.len(),
            y_rows.len()
        )));
    }
    if x_rows.is_empty() {
        return Err(Error::Shape("no training rows".into()));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidConfig(format!("ridge {ridge} must be finite and >= 0")));
    }
    let x = to_matrix(x_rows, "argument")?;
    let y = to_matrix(y_rows, "target")?;

    let mut gram = x.transpose() * &x;
    for i in 0..gram.nrows() {
        gram[(i, i)] += ridge;
    }
    let max_diag = gram.diagonal().iter().copied().fold(0.0, f64::max);
    let chol = gram.cholesky().ok_or(Error::SingularSystem)?;
    if ridge == 0.0 {
        let l = chol.l_dirty();
        let min_pivot = (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
        if min_pivot.is_nan() || min_pivot <= SINGULAR_PIVOT * max_diag {
            return Err(Error::SingularSystem);
        }
    }
    let solution = chol.solve(&(x.transpose() * y));
    if solution.iter().any(|w| !w.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(LeastSquaresVerbMatrix {
        verb: verb.to_string(),
        slot,
        weights: solution.transpose(),
    })
}

/// `W × arg` with negative predictions clipped to zero.
pub fn compose_least_squares(m: &LeastSquaresVerbMatrix, arg: &DistVector) -> Result<DistVector> {
    if arg.dim() != m.input_dim() {
        return Err(Error::Shape(format!(
            "argument has {} dimensions, matrix expects {}",
            arg.dim(),
            m.input_dim()
        )));
    }
    let out = (0..m.output_dim())
        .map(|i| {
            let y: f64 = m.weights.row(i).iter().zip(arg.iter()).map(|(w, x)| w * x).sum();
            y.max(0.0)
        })
        .collect();
    Ok(DistVector::from_nonneg(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(m: &[Vec<f64>]) -> Vec<&[f64]> {
        m.iter().map(Vec::as_slice).collect()
    }

    #[test]
    fn identity_fit() {
        let x = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let m = train_least_squares("v", ArgumentSlot::Subject, &rows(&x), &rows(&x), 0.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((m.get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_deficient_is_singular() {
        let x = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let y = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert!(matches!(
            train_least_squares("v", ArgumentSlot::Object, &rows(&x), &rows(&y), 0.0),
            Err(Error::SingularSystem)
        ));
        // a ridge makes the same system solvable
        let m = train_least_squares("v", ArgumentSlot::Object, &rows(&x), &rows(&y), 1e-3).unwrap();
        assert!(m.get(1, 0) > 1.9);
    }

    #[test]
    fn shape_errors() {
        let x = vec![vec![1.0, 0.0]];
        let y = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(
            train_least_squares("v", ArgumentSlot::Subject, &rows(&x), &rows(&y), 0.0),
            Err(Error::Shape(_))
        ));
        assert!(train_least_squares("v", ArgumentSlot::Subject, &[], &[], 0.0).is_err());
    }

    #[test]
    fn composition_clips() {
        let id = LeastSquaresVerbMatrix::new("v", ArgumentSlot::Subject, vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let arg = DistVector::new(vec![0.5, 2.0]).unwrap();
        assert_eq!(compose_least_squares(&id, &arg).unwrap(), arg);

        let zero = LeastSquaresVerbMatrix::new("v", ArgumentSlot::Subject, vec![vec![0.0; 2]; 2]).unwrap();
        assert!(compose_least_squares(&zero, &arg).unwrap().is_zero());

        let neg = LeastSquaresVerbMatrix::new("v", ArgumentSlot::Subject, vec![vec![1.0, 1.0], vec![-1.0, -1.0]]).unwrap();
        assert_eq!(compose_least_squares(&neg, &arg).unwrap().weights(), &[2.5, 0.0]);

        assert!(matches!(
            compose_least_squares(&id, &DistVector::new(vec![1.0]).unwrap()),
            Err(Error::Shape(_))
        ));
    }
}
