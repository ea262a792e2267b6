use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::Occupation;
use crate::linalg::RMatrix;

pub const DEFAULT_ALPHA: f64 = 1e-3;

/// Affine multi-output map `y = W x + b` with `W` stored targets × features.
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeModel {
    alpha: f64,
    weights: RMatrix,
    intercept: DVector<f64>,
    feature_order: Vec<Occupation>,
}

impl RidgeModel {
    pub fn new(alpha: f64, weights: RMatrix, intercept: DVector<f64>) -> Result<Self> {
        if weights.nrows() != intercept.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weight rows for {} intercepts",
                weights.nrows(),
                intercept.len()
            )));
        }
        if !weights.iter().chain(intercept.iter()).all(|v| v.is_finite()) || !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidArgument("ridge model entries must be finite".into()));
        }
        Ok(RidgeModel { alpha, weights, intercept, feature_order: Vec::new() })
    }

    /// Attaches the occupation label of each feature column.
    pub fn with_feature_order(mut self, order: Vec<Occupation>) -> Result<Self> {
        if !order.is_empty() && order.len() != self.feature_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} feature labels for {} features",
                order.len(),
                self.feature_count()
            )));
        }
        self.feature_order = order;
        Ok(self)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &RMatrix {
        &self.weights
    }

    pub fn intercept(&self) -> &DVector<f64> {
        &self.intercept
    }

    pub fn feature_order(&self) -> &[Occupation] {
        &self.feature_order
    }

    pub fn feature_count(&self) -> usize {
        self.weights.ncols()
    }

    pub fn target_count(&self) -> usize {
        self.weights.nrows()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.feature_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} features, model expects {}",
                x.len(),
                self.feature_count()
            )));
        }
        let y = &self.weights * DVector::from_column_slice(x) + &self.intercept;
        Ok(y.iter().copied().collect())
    }

    /// Row-wise prediction for a samples × features matrix.
    pub fn predict_matrix(&self, x: &RMatrix) -> Result<RMatrix> {
        if x.ncols() != self.feature_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} features, model expects {}",
                x.ncols(),
                self.feature_count()
            )));
        }
        let mut y = x * self.weights.transpose();
        for mut row in y.row_iter_mut() {
            row += self.intercept.transpose();
        }
        Ok(y)
    }
}

fn column_means(m: &RMatrix) -> DVector<f64> {
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum() / m.nrows() as f64))
}

fn centered(m: &RMatrix, means: &DVector<f64>) -> RMatrix {
    let mut c = m.clone();
    for (j, mut col) in c.column_iter_mut().enumerate() {
        col.add_scalar_mut(-means[j]);
    }
    c
}

/// Closed-form ridge regression with an unpenalized intercept: columns are
/// centered, `W = Ycᵀ Xc (XcᵀXc + αI)⁻¹`, `b = ȳ − W x̄`.
pub fn ridge_fit(x: &RMatrix, y: &RMatrix, alpha: f64) -> Result<RidgeModel> {
    if x.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch(format!("{} feature rows vs {} target rows", x.nrows(), y.nrows())));
    }
    if x.nrows() == 0 {
        return Err(Error::InvalidArgument("ridge fit needs at least one sample".into()));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!("alpha must be finite and non-negative, got {alpha}")));
    }
    let x_mean = column_means(x);
    let y_mean = column_means(y);
    let xc = centered(x, &x_mean);
    let yc = centered(y, &y_mean);
    let p = x.ncols();
    let gram = xc.transpose() * &xc + RMatrix::identity(p, p) * alpha;
    let chol = gram.clone().cholesky().ok_or(Error::SingularNormalMatrix)?;
    if alpha == 0.0 {
        let max_diag = gram.diagonal().max();
        let min_pivot = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |a, &v| a.min(v * v));
        if !(min_pivot > 1e-12 * max_diag.max(f64::MIN_POSITIVE)) {
            return Err(Error::SingularNormalMatrix);
        }
    }
    // (XcᵀXc + αI) Wᵀ = Xcᵀ Yc
    let weights = chol.solve(&(xc.transpose() * &yc)).transpose();
    let intercept = &y_mean - &weights * &x_mean;
    RidgeModel::new(alpha, weights, intercept)
}

#[derive(Serialize, Deserialize)]
struct RidgeDoc {
    alpha: f64,
    weights: Vec<Vec<f64>>,
    intercept: Vec<f64>,
    feature_order: Vec<Occupation>,
}

impl Serialize for RidgeModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RidgeDoc {
            alpha: self.alpha,
            weights: crate::linalg::matrix_to_rows(&self.weights),
            intercept: self.intercept.iter().copied().collect(),
            feature_order: self.feature_order.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RidgeModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = RidgeDoc::deserialize(deserializer)?;
        let cols = doc.weights.first().map_or(doc.feature_order.len(), Vec::len);
        if doc.weights.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("weight rows have unequal lengths"));
        }
        let weights = RMatrix::from_fn(doc.weights.len(), cols, |i, j| doc.weights[i][j]);
        RidgeModel::new(doc.alpha, weights, DVector::from_vec(doc.intercept))
            .and_then(|m| m.with_feature_order(doc.feature_order))
            .map_err(D::Error::custom)
    }
}
