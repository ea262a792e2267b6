use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sigmoid of an affine map on standardized features, trained by full-batch
/// gradient descent on the mean cross-entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticReadout {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

fn softplus(s: f64) -> f64 {
    s.max(0.0) + (-s.abs()).exp().ln_1p()
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

impl LogisticReadout {
    /// Zero-weight model whose standardization comes from `features`.
    /// Constant features keep unit scale.
    pub fn standardized(features: &[Vec<f64>]) -> Result<Self> {
        let first = features.first().ok_or_else(|| Error::InvalidArgument("no training features".into()))?;
        let p = first.len();
        let n = features.len() as f64;
        let mut mean = vec![0.0; p];
        for row in features {
            if row.len() != p {
                return Err(Error::DimensionMismatch("ragged feature rows".into()));
            }
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut scale = vec![0.0; p];
        for row in features {
            for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        for s in &mut scale {
            *s = if *s > 1e-24 { s.sqrt() } else { 1.0 };
        }
        Ok(LogisticReadout { weights: vec![0.0; p], bias: 0.0, mean, scale })
    }

    pub fn feature_count(&self) -> usize {
        self.weights.len()
    }

    /// Weights followed by the bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.weights.len() + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{} parameters for {} features",
                params.len(),
                self.weights.len()
            )));
        }
        let (w, b) = params.split_at(self.weights.len());
        self.weights.copy_from_slice(w);
        self.bias = b[0];
        Ok(())
    }

    pub fn logit(&self, x: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(x.iter().zip(self.mean.iter().zip(&self.scale)))
            .map(|(w, (v, (m, s)))| w * (v - m) / s)
            .sum::<f64>()
            + self.bias
    }

    pub fn probability(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    pub fn predict(&self, x: &[f64]) -> u8 {
        u8::from(self.logit(x) > 0.0)
    }

    pub fn accuracy(&self, features: &[Vec<f64>], labels: &[u8]) -> f64 {
        let hits = features.iter().zip(labels).filter(|(x, &y)| self.predict(x) == y).count();
        hits as f64 / labels.len().max(1) as f64
    }

    /// Mean cross-entropy and its gradient with respect to [`params`](Self::params).
    pub fn loss_and_gradient(&self, features: &[Vec<f64>], labels: &[u8]) -> (f64, Vec<f64>) {
        let p = self.weights.len();
        let n = labels.len().max(1) as f64;
        let mut grad = vec![0.0; p + 1];
        let mut loss = 0.0;
        let mut z = vec![0.0; p];
        for (x, &y) in features.iter().zip(labels) {
            for k in 0..p {
                z[k] = (x[k] - self.mean[k]) / self.scale[k];
            }
            let s = self.weights.iter().zip(&z).map(|(w, v)| w * v).sum::<f64>() + self.bias;
            let y = f64::from(y);
            loss += softplus(s) - y * s;
            let r = sigmoid(s) - y;
            for k in 0..p {
                grad[k] += r * z[k] / n;
            }
            grad[p] += r / n;
        }
        (loss / n, grad)
    }

    /// One gradient step; returns the loss before the step.
    pub fn step(&mut self, features: &[Vec<f64>], labels: &[u8], learning_rate: f64) -> Result<f64> {
        let (loss, grad) = self.loss_and_gradient(features, labels);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged { learning_rate });
        }
        for (w, g) in self.weights.iter_mut().zip(&grad) {
            *w -= learning_rate * g;
        }
        self.bias -= learning_rate * grad[self.weights.len()];
        Ok(loss)
    }
}
