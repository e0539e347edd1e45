use crate::error::{Error, Result};

/// Logistic function, evaluated without overflow for large |z|.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Log-odds of the positive share; the starting margin when boosting from
/// the average.
pub fn init_base_score(labels: &[f64]) -> Result<f64> {
    let pos = labels.iter().filter(|&&y| y == 1.0).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::DegenerateLabels);
    }
    let p = pos as f64 / labels.len() as f64;
    Ok((p / (1.0 - p)).ln())
}

/// First and second derivatives of binary log loss with respect to the
/// margin: `g = p - y`, `h = p (1 - p)`.
pub fn logistic_gradients(labels: &[f64], margins: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut g = vec![0.0; labels.len()];
    let mut h = vec![0.0; labels.len()];
    fill_gradients(labels, margins, &mut g, &mut h);
    (g, h)
}

pub(crate) fn fill_gradients(labels: &[f64], margins: &[f64], g: &mut [f64], h: &mut [f64]) {
    debug_assert_eq!(labels.len(), margins.len());
    for (i, (&y, &m)) in labels.iter().zip(margins).enumerate() {
        let p = sigmoid(m);
        g[i] = p - y;
        h[i] = p * (1.0 - p);
    }
}
