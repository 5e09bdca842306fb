//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use misobc_core::{HalfPlane, SeededRng};

const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

/// Rows of a numeric CSV fixture, header skipped.
pub fn fixture(name: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(format!("{FIXTURES}/{name}")).expect("fixture readable");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|x| x.trim().parse().expect("numeric field")).collect())
        .collect()
}

/// Golden `C₂ₓ₁(P)` values as `(P, value)`.
pub fn c21_golden() -> Vec<(f64, f64)> {
    fixture("c21_oracle.csv").into_iter().map(|r| (r[0], r[1])).collect()
}

/// Golden `R_Q(D)` values as `(P, D, value)`.
pub fn rq_golden() -> Vec<(f64, f64, f64)> {
    fixture("rq_oracle.csv").into_iter().map(|r| (r[0], r[1], r[2])).collect()
}

fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `E log₂(1 + c X)` for `X ~ Gamma(k, 1)`, integrated on a truncated range
/// split at unit intervals.
pub fn gamma_log2_mean(k: i32, c: f64) -> f64 {
    let norm: f64 = (1..k).map(f64::from).product();
    let f = move |x: f64| (c * x).ln_1p() * x.powi(k - 1) * (-x).exp() / norm;
    let mut total = 0.0;
    for i in 0..80 {
        total += simpson(&f, i as f64, (i + 1) as f64, 1e-15);
    }
    total / std::f64::consts::LN_2
}

/// Exponential integral `E₁(x)` for `x > 0` (series below 1, continued
/// fraction above).
pub fn expint_e1(x: f64) -> f64 {
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum -= term / k as f64;
        }
        -0.577_215_664_901_532_9 - x.ln() + sum
    } else {
        // Lentz evaluation of e^{-x} / (x + 1/(1 + 1/(x + 2/(1 + ...)))).
        let (mut b, mut c, mut d) = (x + 1.0, 1e300, 1.0 / (x + 1.0));
        let mut h = d;
        for i in 1..500 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// `C₂ₓ₁(P) = (1 + (1 − b) e^b E₁(b)) / ln 2` with `b = 2/P`.
pub fn c21_closed_form(power: f64) -> f64 {
    let b = 2.0 / power;
    (1.0 + (1.0 - b) * b.exp() * expint_e1(b)) / std::f64::consts::LN_2
}

/// Every feasible intersection of two boundary lines (axes included):
/// the vertex set of the polygon, without any hull construction.
pub fn brute_vertices(constraints: &[HalfPlane]) -> Vec<(f64, f64)> {
    let mut lines: Vec<(f64, f64, f64)> = constraints.iter().map(|h| (h.a, h.b, h.c)).collect();
    lines.push((1.0, 0.0, 0.0));
    lines.push((0.0, 1.0, 0.0));
    let feasible = |x: f64, y: f64| {
        x >= -1e-9 && y >= -1e-9 && constraints.iter().all(|h| h.a * x + h.b * y <= h.c + 1e-9)
    };
    let mut out = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-14 {
                continue;
            }
            let x = (c1 * b2 - c2 * b1) / det;
            let y = (a1 * c2 - a2 * c1) / det;
            if feasible(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

fn shifted(constraints: &[HalfPlane], tau: f64) -> Vec<HalfPlane> {
    constraints
        .iter()
        .map(|h| HalfPlane { c: h.c - (h.a + h.b) * tau, ..*h })
        .collect()
}

/// Whether `outer ⊖ (τ, τ)` fits inside `inner`, by brute-force vertices.
pub fn eroded_fits(outer: &[HalfPlane], inner: &[HalfPlane], tau: f64) -> bool {
    brute_vertices(&shifted(outer, tau))
        .iter()
        .all(|&(x, y)| inner.iter().all(|h| h.a * x + h.b * y <= h.c + 1e-9))
}

/// Smallest `τ` on a two-level grid (coarse `1e-3`, then `1e-7` inside the
/// bracketing coarse cell) with the eroded outer region inside `inner`.
pub fn gap_scan(outer: &[HalfPlane], inner: &[HalfPlane], tau_max: f64) -> f64 {
    let coarse = 1e-3;
    let mut k = 0u64;
    while !eroded_fits(outer, inner, k as f64 * coarse) {
        k += 1;
        assert!((k as f64) * coarse <= tau_max + coarse, "scan ran past the search range");
    }
    if k == 0 {
        return 0.0;
    }
    let base = (k - 1) as f64 * coarse;
    let fine = 1e-7;
    let mut j = 0u64;
    while !eroded_fits(outer, inner, base + j as f64 * fine) {
        j += 1;
    }
    base + j as f64 * fine
}

/// Closed-form per-user gap between the outer and achievable regions.
pub fn gap_closed_form(c21: f64, c22d: f64) -> f64 {
    let alpha = 3.0 * c21 / c22d - 1.0;
    let symmetric = (2.0 * c21 - c22d) / 3.0;
    let axis = 2.0 * c21 * (1.0 - 1.0 / alpha.max(1.0)) / 3.0;
    symmetric.max(axis).max(0.0)
}

/// Golden-section minimisation of a unimodal function.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > tol {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

/// Rate of two equiprobable variances `s1 < s2` at average distortion
/// `budget`, minimised over the split `(d1, 2·budget − d1)` by a dense grid
/// followed by golden-section refinement of the best cell.
pub fn two_level_rate_brute(s1: f64, s2: f64, budget: f64) -> f64 {
    let rate = |d1: f64| {
        let d2 = 2.0 * budget - d1;
        let part = |s: f64, d: f64| if d >= s { 0.0 } else { (s / d).log2() };
        0.5 * part(s1, d1) + 0.5 * part(s2, d2)
    };
    let lo = (2.0 * budget - s2).max(1e-12);
    let hi = (2.0 * budget).min(s1.max(1e-12)).max(lo);
    let steps = 100_000;
    let mut best = (f64::INFINITY, lo);
    for i in 0..=steps {
        let d1 = lo + (hi - lo) * i as f64 / steps as f64;
        let r = rate(d1);
        if r < best.0 {
            best = (r, d1);
        }
    }
    let cell = (hi - lo) / steps as f64;
    let d1 = golden_section(rate, (best.1 - cell).max(lo), (best.1 + cell).min(hi), 1e-13);
    rate(d1).min(best.0)
}

/// Kolmogorov–Smirnov distance between the sample and `U[0, 1)`.
pub fn ks_uniform(samples: &mut [f64]) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &u)| {
            let (lo, hi) = (i as f64 / n, (i + 1) as f64 / n);
            (u - lo).abs().max((hi - u).abs())
        })
        .fold(0.0, f64::max)
}

/// Pearson correlation of two real sequences.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Random bounded constraint set with 1 to 4 half-planes.
pub fn random_constraints(rng: &mut SeededRng) -> Vec<HalfPlane> {
    loop {
        let count = 1 + (rng.uniform() * 4.0) as usize;
        let hs: Vec<HalfPlane> = (0..count)
            .map(|_| {
                let pick = |rng: &mut SeededRng| if rng.uniform() < 0.15 { 0.0 } else { 0.1 + rng.uniform() * 2.0 };
                let (mut a, b) = (pick(rng), pick(rng));
                if a == 0.0 && b == 0.0 {
                    a = 1.0;
                }
                HalfPlane::new(a, b, 0.5 + 5.0 * rng.uniform()).unwrap()
            })
            .collect();
        if hs.iter().any(|h| h.a > 0.0) && hs.iter().any(|h| h.b > 0.0) {
            return hs;
        }
    }
}
