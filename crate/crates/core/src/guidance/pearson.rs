use crate::error::{Error, Result};

struct Moments {
    x_mean: f64,
    y_mean: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

fn moments(x: &[f64], y: &[f64]) -> Result<Moments> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(format!("{} vs {} values", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::LengthMismatch(format!("need at least 2 values, got {}", x.len())));
    }
    let k = x.len() as f64;
    let x_mean = x.iter().sum::<f64>() / k;
    let y_mean = y.iter().sum::<f64>() / k;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - x_mean, b - y_mean);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx.is_finite() && syy.is_finite() && sxy.is_finite()) {
        return Err(Error::NonFinite("pearson sums".into()));
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance("y"));
    }
    Ok(Moments { x_mean, y_mean, sxx, syy, sxy })
}

/// Sample Pearson correlation, clamped to [-1, 1].
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let m = moments(x, y)?;
    Ok((m.sxy / (m.sxx * m.syy).sqrt()).clamp(-1.0, 1.0))
}

/// The correlation and its gradient with respect to each `y_i`.
pub fn pearson_grad_y(x: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = moments(x, y)?;
    let norm = (m.sxx * m.syy).sqrt();
    let r = m.sxy / norm;
    let grad = x.iter().zip(y).map(|(&a, &b)| (a - m.x_mean) / norm - r * (b - m.y_mean) / m.syy).collect();
    Ok((r.clamp(-1.0, 1.0), grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_values() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(Error::ZeroVariance("x"))));
        assert!(matches!(pearson(&[1.0, 2.0], &[5.0, 5.0]), Err(Error::ZeroVariance("y"))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn gradient_matches_differences() {
        let x = [0.3, 1.7, 2.2, 5.0, 4.1];
        let y = [1.0, 0.2, 3.3, 2.9, 4.4];
        let (_, g) = pearson_grad_y(&x, &y).unwrap();
        let h = 1e-6;
        for i in 0..y.len() {
            let mut yp = y;
            let mut ym = y;
            yp[i] += h;
            ym[i] -= h;
            let fd = (pearson(&x, &yp).unwrap() - pearson(&x, &ym).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8, "{i}: {fd} vs {}", g[i]);
        }
    }
}
