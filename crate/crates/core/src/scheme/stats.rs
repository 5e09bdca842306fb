use crate::math::Complex;

pub fn mean_power(xs: &[Complex]) -> f64 {
    xs.iter().map(|z| z.norm_sqr()).sum::<f64>() / xs.len().max(1) as f64
}

/// Magnitude of the complex correlation coefficient of two equally long
/// sequences (means removed).
pub fn correlation(a: &[Complex], b: &[Complex]) -> f64 {
    assert_eq!(a.len(), b.len(), "correlated sequences differ in length");
    if a.is_empty() {
        return 0.0;
    }
    let n = a.len() as f64;
    let ma: Complex = a.iter().sum::<Complex>() / n;
    let mb: Complex = b.iter().sum::<Complex>() / n;
    let (mut cross, mut pa, mut pb) = (Complex::new(0.0, 0.0), 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        cross += dx * dy.conj();
        pa += dx.norm_sqr();
        pb += dy.norm_sqr();
    }
    if pa == 0.0 || pb == 0.0 {
        return 0.0;
    }
    cross.norm() / (pa * pb).sqrt()
}

/// Lag-1 correlation pooled over independent sequences (rows).
pub fn lag1_autocorrelation<'a>(rows: impl Iterator<Item = &'a [Complex]>) -> f64 {
    let (mut lead, mut lag) = (Vec::new(), Vec::new());
    for row in rows {
        if row.len() < 2 {
            continue;
        }
        lead.extend_from_slice(&row[..row.len() - 1]);
        lag.extend_from_slice(&row[1..]);
    }
    correlation(&lead, &lag)
}
