/// Binary cross entropy on a logit, computed as
/// `max(z, 0) − z·y + ln(1 + e^{−|z|})` to stay finite for large `|z|`.
/// Returns the loss and its derivative `σ(z) − y`.
pub fn bce_loss(logit: f64, label: f64) -> (f64, f64) {
    let loss = logit.max(0.0) - logit * label + (-logit.abs()).exp().ln_1p();
    (loss, sigmoid(logit) - label)
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean loss over a batch and the per-logit gradient of that mean.
pub fn bce_batch(logits: &[f64], labels: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(logits.len(), labels.len());
    let n = logits.len() as f64;
    let mut total = 0.0;
    let grads = logits
        .iter()
        .zip(labels)
        .map(|(&z, &y)| {
            let (l, g) = bce_loss(z, y);
            total += l;
            g / n
        })
        .collect();
    (total / n, grads)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_values() {
        assert!((bce_loss(0.0, 1.0).0 - std::f64::consts::LN_2).abs() < 1e-12);
        let (l, g) = bce_loss(40.0, 1.0);
        assert!(l >= 0.0 && l < 1e-15 && g.abs() < 1e-15);
        let (l, _) = bce_loss(-800.0, 1.0);
        assert!((l - 800.0).abs() < 1e-9);
    }

    #[test]
    fn gradient_matches_finite_difference() {
        for &(z, y) in &[(0.3, 1.0), (-2.0, 0.0), (5.0, 0.0), (-0.7, 1.0)] {
            let h = 1e-5;
            let numeric = (bce_loss(z + h, y).0 - bce_loss(z - h, y).0) / (2.0 * h);
            let analytic = bce_loss(z, y).1;
            assert!((numeric - analytic).abs() / analytic.abs() < 1e-8, "{z} {y}");
        }
    }
}
