//! MAP decision boundaries for the skewed two-sensor constellation.
//!
//! The posterior difference at receive value `x` has the same sign as
//!
//! ```text
//! w(x) = a e^(r_a x) + b e^(r_b x) + c e^(r_c x) + d
//! ```
//!
//! where the signed coefficients come from the per-symbol posterior
//! weights scaled by Gaussian factors, and the rates are proportional to
//! the amplitudes. The decision-0 region is exactly `{x : w(x) <= 0}`
//! (ties decide 0), so finding the boundaries means finding the real
//! roots of `w`. Root structure is rigid: no roots in Case I, exactly one
//! in Case II, and one or three in Case III, with three possible only
//! above the amplitude threshold [`p2_tilde`]. A two-root outcome is a
//! numerical artifact and is reported as a [`ConvergenceError`] rather
//! than papered over.
//!
//! [`ConvergenceError`]: crate::errors::Error::Convergence

use crate::errors::{Error, Result};
use crate::model::{Case, ModelParams};

/// Sign-scan resolution mandated for the primary pass.
const SCAN_POINTS: usize = 4096;
/// Bisection stops when the bracket shrinks below `REL_TOL * max(1, |x|)`.
const REL_TOL: f64 = 1e-12;
const MAX_BISECT_ITERS: usize = 200;
/// ln 4: with at most four exponential terms, a term whose log-magnitude
/// exceeds every other by this margin fixes the sign of the sum.
const LN_MARGIN: f64 = 1.386_294_361_119_890_6;

/// The exponential-sum representation of the posterior difference.
///
/// Coefficient signs are stored separately from log-magnitudes because the
/// Gaussian scale factors `exp(-a_lm^2 / n0)` underflow long before the
/// sign information stops mattering (already at moderate amplitudes when
/// `n0` is small). All evaluation happens in the log domain.
#[derive(Debug, Clone)]
pub struct WCoefficients {
    /// Signs of (a, b, c, d); 0 marks a vanished coefficient.
    signs: [i8; 4],
    /// `ln |bar_lm| - a_lm^2 / n0` for each of (a, b, c, d).
    log_mags: [f64; 4],
    /// Exponential rates for (a, b, c, d); the d rate is always 0.
    rates: [f64; 4],
}

impl WCoefficients {
    pub fn new(params: &ModelParams, pa1: f64, pa2: f64) -> Self {
        debug_assert!(pa1 >= 0.0 && pa2 >= 0.0);
        let bars = params.bar_coefficients().as_array();
        let points = params.constellation(pa1, pa2).points();
        let scale = 2.0 * params.asym_factors().sum() / params.n0();
        let rates = [scale * (pa1 + pa2), scale * pa1, scale * pa2, 0.0];
        let mut signs = [0i8; 4];
        let mut log_mags = [f64::NEG_INFINITY; 4];
        for i in 0..4 {
            if bars[i] != 0.0 {
                signs[i] = if bars[i] > 0.0 { 1 } else { -1 };
                log_mags[i] = bars[i].abs().ln() - points[i] * points[i] / params.n0();
            }
        }
        Self { signs, log_mags, rates }
    }

    /// Linear-domain coefficients (a, b, c, d). These can underflow to
    /// zero; use [`sign_eval`](Self::sign_eval) for anything structural.
    pub fn coefficients(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.signs[i] as f64 * self.log_mags[i].exp())
    }

    /// The three nonzero exponential rates `(r_a, r_b, r_c)`.
    pub fn rates(&self) -> [f64; 3] {
        [self.rates[0], self.rates[1], self.rates[2]]
    }

    /// Evaluates `sign(w(x))` and `ln |w(x)|` without overflow: the largest
    /// exponent is factored out before summing, so exponents up to ~1e300
    /// in magnitude are fine (the contract requires `|x| * rate` up to 1e4).
    /// A zero sign (exact tie) reports log-magnitude `-inf`.
    pub fn sign_eval(&self, x: f64) -> (i8, f64) {
        let terms: [(i8, f64); 4] = std::array::from_fn(|i| {
            if self.signs[i] != 0 {
                (self.signs[i], self.log_mags[i] + self.rates[i] * x)
            } else {
                (0, f64::NEG_INFINITY)
            }
        });
        signed_log_sum(&terms)
    }

    /// Active terms merged by exact rate equality, sorted by rate.
    /// Amplitude degeneracies (a zero amplitude, or equal amplitudes)
    /// produce identical rate expressions bit-for-bit, so exact grouping is
    /// reliable. Groups whose signed sum cancels to zero are dropped.
    fn rate_groups(&self) -> Vec<RateGroup> {
        let mut idx: Vec<usize> = (0..4).filter(|&i| self.signs[i] != 0).collect();
        idx.sort_by(|&i, &j| self.rates[i].total_cmp(&self.rates[j]));
        let mut groups: Vec<RateGroup> = Vec::new();
        for i in idx {
            match groups.last_mut() {
                Some(g) if g.rate == self.rates[i] => {
                    let merged = signed_log_sum(&[
                        (g.sign, g.log_mag),
                        (self.signs[i], self.log_mags[i]),
                    ]);
                    g.sign = merged.0;
                    g.log_mag = merged.1;
                }
                _ => groups.push(RateGroup {
                    rate: self.rates[i],
                    sign: self.signs[i],
                    log_mag: self.log_mags[i],
                }),
            }
        }
        groups.retain(|g| g.sign != 0);
        groups
    }
}

#[derive(Debug, Clone, Copy)]
struct RateGroup {
    rate: f64,
    sign: i8,
    log_mag: f64,
}

/// Sign and log-magnitude of a sum of signed exponentials given as
/// `(sign, ln magnitude)` pairs. Zero-sign entries are ignored.
fn signed_log_sum(terms: &[(i8, f64)]) -> (i8, f64) {
    let m = terms
        .iter()
        .filter(|t| t.0 != 0)
        .map(|t| t.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return (0, f64::NEG_INFINITY);
    }
    let mut sum = 0.0;
    for &(sign, log_mag) in terms {
        if sign != 0 {
            sum += sign as f64 * (log_mag - m).exp();
        }
    }
    if sum == 0.0 {
        (0, f64::NEG_INFINITY)
    } else {
        (if sum > 0.0 { 1 } else { -1 }, m + sum.abs().ln())
    }
}

/// Convenience wrapper for a single posterior-difference sign query.
pub fn w_sign_eval(params: &ModelParams, pa1: f64, pa2: f64, x: f64) -> (i8, f64) {
    WCoefficients::new(params, pa1, pa2).sign_eval(x)
}

/// Sorted decision boundaries and the decision regions they induce.
/// The decision-0 region is closed at every finite endpoint (ties go to 0).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    roots: Vec<f64>,
    d0: Vec<(f64, f64)>,
}

impl BoundarySet {
    fn from_roots(mut roots: Vec<f64>) -> Self {
        roots.sort_by(f64::total_cmp);
        let mut d0 = Vec::new();
        if roots.is_empty() {
            d0.push((f64::NEG_INFINITY, f64::INFINITY));
        } else {
            d0.push((f64::NEG_INFINITY, roots[0]));
            let mut i = 1;
            while i + 1 < roots.len() {
                d0.push((roots[i], roots[i + 1]));
                i += 2;
            }
        }
        Self { roots, d0 }
    }

    /// Boundary locations in increasing order; length 0, 1, or 3.
    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// Intervals mapped to a 0 decision, leftmost first. Finite endpoints
    /// belong to the region.
    pub fn d0_intervals(&self) -> &[(f64, f64)] {
        &self.d0
    }

    /// Open intervals mapped to a 1 decision (complement of
    /// [`d0_intervals`](Self::d0_intervals)).
    pub fn d1_intervals(&self) -> Vec<(f64, f64)> {
        let mut d1 = Vec::new();
        let mut i = 0;
        while i < self.roots.len() {
            let lo = self.roots[i];
            let hi = if i + 1 < self.roots.len() { self.roots[i + 1] } else { f64::INFINITY };
            d1.push((lo, hi));
            i += 2;
        }
        d1
    }

    /// MAP decision for receive value `r`; boundary values decide 0.
    pub fn detect(&self, r: f64) -> u8 {
        if self.roots.contains(&r) {
            return 0;
        }
        let crossings = self.roots.iter().filter(|&&x| x < r).count();
        (crossings % 2) as u8
    }
}

/// Isolates every root of the posterior difference for amplitudes
/// `(pa1, pa2)` and returns the induced decision regions.
///
/// Structural guarantees enforced on the way out: root count 0 in Case I,
/// 1 in Case II, 1 or 3 in Case III and exactly 1 when `pa2 <= p2_tilde`.
/// An even sign-change count triggers one densified re-scan and then a
/// [`ConvergenceError`]; it is never silently reduced.
///
/// [`ConvergenceError`]: crate::errors::Error::Convergence
pub fn find_boundaries(params: &ModelParams, pa1: f64, pa2: f64) -> Result<BoundarySet> {
    validate_amplitudes(pa1, pa2)?;
    let case = params.classify().case;
    if case == Case::I {
        // Every signed weight is <= 0 and d_bar < 0, so w < 0 everywhere.
        return Ok(BoundarySet::from_roots(Vec::new()));
    }
    let wc = WCoefficients::new(params, pa1, pa2);
    let groups = wc.rate_groups();
    match groups.len() {
        // Constant w: sign is p1 - p0 <= 0, the whole line decides 0.
        0 | 1 => Ok(BoundarySet::from_roots(Vec::new())),
        // A collapsed constellation (zero amplitude, or full cancellation)
        // leaves a two-term exponential with an explicit root.
        2 => Ok(BoundarySet::from_roots(two_group_root(&groups))),
        _ => scan_boundaries(params, &wc, &groups, pa1, pa2, case),
    }
}

fn validate_amplitudes(pa1: f64, pa2: f64) -> Result<()> {
    if !(pa1.is_finite() && pa2.is_finite() && pa1 >= 0.0 && pa2 >= 0.0) {
        return Err(Error::Domain("amplitudes must be finite and nonnegative"));
    }
    Ok(())
}

fn two_group_root(groups: &[RateGroup]) -> Vec<f64> {
    let (lo, hi) = (groups[0], groups[1]);
    if lo.sign * hi.sign >= 0 {
        // Same sign at both ends of the rate spectrum: monotone in the
        // dominant exponential, no crossing.
        return Vec::new();
    }
    vec![(lo.log_mag - hi.log_mag) / (hi.rate - lo.rate)]
}

fn scan_boundaries(
    params: &ModelParams,
    wc: &WCoefficients,
    groups: &[RateGroup],
    pa1: f64,
    pa2: f64,
    case: Case,
) -> Result<BoundarySet> {
    // Outside [x_lo, x_hi] one exponential term dominates the rest by a
    // factor > 3, so every root lies inside; union with the conventional
    // 10-sigma window around the constellation.
    let window = scan_window(params, groups, pa1, pa2);
    let plans: Vec<(f64, f64, usize)> = if case == Case::III {
        // Both amplitudes are positive here (a zero amplitude collapses to
        // two rate groups), so the bracket hull applies: every root lies
        // between the two bracket-function endpoints, however they are
        // ordered. Scanning just the padded hull keeps the grid fine enough
        // to separate root clusters near the three-root transition.
        let (lo, hi) = case3_hull(params, pa1, pa2);
        let pad = ((hi - lo) * 0.02)
            .max(0.05 * params.sigma())
            .max(1e-9 * (1.0 + 0.5 * (lo.abs() + hi.abs())));
        vec![
            (lo - pad, hi + pad, SCAN_POINTS),
            (lo - 4.0 * pad, hi + 4.0 * pad, SCAN_POINTS * 8),
            (window.0, window.1, SCAN_POINTS * 8),
        ]
    } else {
        let width = window.1 - window.0;
        vec![
            (window.0, window.1, SCAN_POINTS),
            (window.0 - 1.5 * width, window.1 + 1.5 * width, SCAN_POINTS * 8),
        ]
    };

    let mut roots = Vec::new();
    let mut odd = false;
    for (lo, hi, points) in plans {
        roots = scan_and_refine(wc, lo, hi, points)?;
        if roots.len() % 2 == 1 {
            odd = true;
            break;
        }
    }
    if !odd {
        return Err(Error::Convergence(format!(
            "sign scan found {} boundary crossings for amplitudes ({pa1}, {pa2}); \
             an even count means a root pair was not separated",
            roots.len()
        )));
    }
    validate_count(params, case, pa1, pa2, &roots)?;
    Ok(BoundarySet::from_roots(roots))
}

/// Window certain to contain every root: each bound is where the extreme
/// rate group dominates all others by [`LN_MARGIN`], unioned with a
/// 10-sigma margin around the constellation span.
fn scan_window(params: &ModelParams, groups: &[RateGroup], pa1: f64, pa2: f64) -> (f64, f64) {
    let cons = params.constellation(pa1, pa2);
    let sigma = params.sigma();
    let top = groups[groups.len() - 1];
    let bottom = groups[0];
    let mut lo = cons.a00 - 10.0 * sigma;
    let mut hi = cons.a11 + 10.0 * sigma;
    for g in &groups[..groups.len() - 1] {
        hi = hi.max((g.log_mag - top.log_mag + LN_MARGIN) / (top.rate - g.rate));
    }
    for g in &groups[1..] {
        lo = lo.min((bottom.log_mag - g.log_mag - LN_MARGIN) / (g.rate - bottom.rate));
    }
    (lo, hi)
}

/// Hull of the two Case III bracket endpoints; every root lies inside for
/// positive amplitudes, with the endpoints coinciding at `pa2 == p2_tilde`.
fn case3_hull(params: &ModelParams, pa1: f64, pa2: f64) -> (f64, f64) {
    let bf = bracket_functions(params, pa1, pa2);
    let f = params.asym_factors();
    let k_alpha = bf.k_alpha.expect("k_alpha is defined throughout Case III");
    let k_beta = bf.k_beta.expect("k_beta is defined throughout Case III");
    let e1 = f.alpha * pa2 - k_alpha;
    let e2 = -f.beta * pa2 + k_beta;
    (e1.min(e2), e1.max(e2))
}

fn scan_and_refine(wc: &WCoefficients, lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    let step = (hi - lo) / points as f64;
    let mut roots = Vec::new();
    let mut prev: Option<(f64, i8)> = None;
    for i in 0..=points {
        let x = if i == points { hi } else { lo + step * i as f64 };
        let (sign, _) = wc.sign_eval(x);
        if sign == 0 {
            roots.push(x);
            continue;
        }
        if let Some((px, psign)) = prev {
            if psign != sign {
                roots.push(bisect(wc, px, x, psign)?);
            }
        }
        prev = Some((x, sign));
    }
    roots.sort_by(f64::total_cmp);
    // Collapse duplicates from a grid point landing on a root; genuine
    // neighbors are separated by far more than the bisection tolerance.
    roots.dedup_by(|a, b| (*a - *b).abs() <= 3.0 * REL_TOL * a.abs().max(1.0));
    Ok(roots)
}

fn bisect(wc: &WCoefficients, mut lo: f64, mut hi: f64, sign_lo: i8) -> Result<f64> {
    for _ in 0..MAX_BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= REL_TOL * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let (sign, _) = wc.sign_eval(mid);
        if sign == 0 {
            return Ok(mid);
        }
        if sign == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "bisection did not reach tolerance {REL_TOL} within {MAX_BISECT_ITERS} iterations \
         (bracket [{lo}, {hi}])"
    )))
}

fn validate_count(
    params: &ModelParams,
    case: Case,
    pa1: f64,
    pa2: f64,
    roots: &[f64],
) -> Result<()> {
    let n = roots.len();
    match case {
        Case::I => unreachable!("Case I never reaches the scan"),
        Case::II => {
            if n != 1 {
                return Err(Error::Convergence(format!(
                    "{n} boundary points at amplitudes ({pa1}, {pa2}); Case II requires exactly 1"
                )));
            }
        }
        Case::III => {
            let p2t = p2_tilde(params, pa1)?;
            let slack = 1e-9 * p2t.abs().max(1.0);
            let allowed = if pa2 < p2t - slack { n == 1 } else { n == 1 || n == 3 };
            if !allowed {
                return Err(Error::Convergence(format!(
                    "{n} boundary points at amplitudes ({pa1}, {pa2}); Case III allows 1 \
                     (or 3 above the p2_tilde threshold {p2t})"
                )));
            }
        }
    }
    Ok(())
}

/// Largest second amplitude for which the single-boundary structure is
/// guaranteed in Case III. Defined for `pa1 > 0` in Case III only.
pub fn p2_tilde(params: &ModelParams, pa1: f64) -> Result<f64> {
    let class = params.classify();
    if class.case != Case::III {
        return Err(Error::Case { required: Case::III, actual: class.case });
    }
    if !(pa1 > 0.0 && pa1.is_finite()) {
        return Err(Error::Domain("p2_tilde requires a positive first amplitude"));
    }
    let bars = params.bar_coefficients();
    let apb = params.asym_factors().sum();
    let ratio = (bars.a_bar * bars.d_bar) / (bars.b_bar * bars.c_bar);
    debug_assert!(ratio > 0.0, "Case III sign pattern makes the ratio positive");
    Ok(params.n0() / (2.0 * apb * apb * pa1) * ratio.ln())
}

/// Threshold functions that bound root locations. Each is present only
/// where its defining logarithm exists; absence is not an error.
///
/// In Case II the single root `x` satisfies `x > alpha pa1 - l(pa2)` and
/// `x > alpha pa2 - k(pa1)`. In Case III every root lies between
/// `alpha pa2 - k_alpha(pa1)` and `-beta pa2 + k_beta(pa1)`, the order of
/// the two endpoints flipping at `pa2 == p2_tilde(pa1)`, and
/// `k_alpha + k_beta == (alpha + beta) * p2_tilde(pa1)` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketFunctions {
    pub k: Option<f64>,
    pub l: Option<f64>,
    pub k_alpha: Option<f64>,
    pub k_beta: Option<f64>,
    pub p2_tilde: Option<f64>,
}

pub fn bracket_functions(params: &ModelParams, pa1: f64, pa2: f64) -> BracketFunctions {
    let bars = params.bar_coefficients();
    let f = params.asym_factors();
    let apb = f.sum();
    let amb = f.alpha - f.beta;
    let n0 = params.n0();

    let k = (bars.a_bar > 0.0 && bars.c_bar < 0.0 && pa1 > 0.0).then(|| {
        n0 / (2.0 * apb * pa1) * (bars.a_bar / -bars.c_bar).ln() - amb * pa1 / 2.0
    });
    let l = (bars.a_bar > 0.0 && bars.b_bar < 0.0 && pa2 > 0.0).then(|| {
        n0 / (2.0 * apb * pa2) * (bars.a_bar / -bars.b_bar).ln() - amb * pa2 / 2.0
    });
    let k_beta = (bars.b_bar > 0.0 && pa1 > 0.0).then(|| {
        n0 / (2.0 * apb * pa1) * (-bars.d_bar / bars.b_bar).ln() + amb * pa1 / 2.0
    });
    let p2t = p2_tilde(params, pa1).ok();
    BracketFunctions { k, l, k_alpha: k, k_beta, p2_tilde: p2t }
}
