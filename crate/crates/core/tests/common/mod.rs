//! Shared test support: an independent quadrature oracle for the MAP
//! error probability and a seeded random-instance generator.
//!
//! The oracle never touches the closed-form path under test. It
//! integrates `min(p0 f(r|0), p1 f(r|1))` over the real line with
//! adaptive Simpson quadrature, where `f(r|x)` is the four-component
//! Gaussian mixture induced by the constellation. That integral is the
//! minimum-error detection probability by definition, so agreement
//! validates boundaries and the alternating-sum evaluation at once.

use macsig::{ModelParams, RngStream, SYMBOLS};

const SIGMA_SPAN: f64 = 14.0;
const SEG_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 48;

/// MAP error probability by numerical integration, accurate to roughly
/// 1e-10 absolute for moderate noise levels.
pub fn oracle_pe(params: &ModelParams, pa1: f64, pa2: f64) -> f64 {
    let points = params.constellation(pa1, pa2).points();
    let probs = params.conditional_probs();
    let sigma = params.sigma();
    let mut w0 = [0.0; 4];
    let mut w1 = [0.0; 4];
    for (i, &(l, m)) in SYMBOLS.iter().enumerate() {
        let (g1, g0) = probs.pair(l, m);
        w0[i] = params.p0() * g0;
        w1[i] = params.p1() * g1;
    }
    let density = |r: f64| {
        let mut f0 = 0.0;
        let mut f1 = 0.0;
        for i in 0..4 {
            let z = (r - points[i]) / sigma;
            let phi = (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
            f0 += w0[i] * phi;
            f1 += w1[i] * phi;
        }
        f0.min(f1)
    };

    let lo = points.iter().cloned().fold(f64::INFINITY, f64::min) - SIGMA_SPAN * sigma;
    let hi = points.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + SIGMA_SPAN * sigma;
    let mut cuts = vec![lo, hi];
    for &a in &points {
        for k in [0.0, 2.0, 5.0, 10.0] {
            for s in [-1.0, 1.0] {
                let x = a + s * k * sigma;
                if x > lo && x < hi {
                    cuts.push(x);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += adaptive_simpson(&density, pair[0], pair[1]);
    }
    total
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, m, b, fa, fm, fb, whole, SEG_TOL, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// One random operating point plus an amplitude pair. Spans all three
/// cases with strictly positive amplitudes and a moderate noise range the
/// oracle handles comfortably.
pub fn random_instance(stream: &mut RngStream) -> (ModelParams, f64, f64) {
    let p1 = 0.05 + 0.45 * stream.uniform();
    let eps1 = 0.01 + 0.43 * stream.uniform();
    let eps2 = eps1 + (0.49 - eps1) * stream.uniform();
    let n0 = (0.05f64.ln() + stream.uniform() * (10.0f64.ln() - 0.05f64.ln())).exp();
    let pa1 = 0.05 + 2.45 * stream.uniform();
    let pa2 = 0.05 + 2.45 * stream.uniform();
    let params = ModelParams::new(p1, eps1, eps2, n0, 4.0, 4.0).unwrap();
    (params, pa1, pa2)
}
