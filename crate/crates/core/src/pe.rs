//! Exact error probability, power allocation, and high-SNR limits.
//!
//! With the decision boundaries in hand, the detection error probability
//! has a closed form: each joint sensor symbol contributes its posterior
//! weight times the probability that the noise pushes the receive value
//! into the decision-0 region, which is an alternating sum of Gaussian
//! tail terms over the sorted boundaries. This module evaluates that form,
//! the matching single-threshold upper bound and its g/h decomposition,
//! the cap-constrained optimal power allocation, and the noise-free
//! limits of the error probability under several allocation policies.

use serde::Serialize;

use crate::boundary::{find_boundaries, p2_tilde, BoundarySet};
use crate::errors::Result;
use crate::model::{Case, ModelParams};

/// Gaussian tail probability `Q(x) = Pr(N(0,1) > x) = erfc(x / sqrt 2) / 2`.
///
/// Relative error is below 1e-12 for `|x| <= 8` and the absolute error
/// stays under 1e-300 far into the tail, so differences of nearby tail
/// values remain meaningful.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Sums after sorting by increasing magnitude, so small terms accumulate
/// before large ones absorb them. Used for the Q-term sums, whose entries
/// span many orders of magnitude at high SNR.
pub fn stable_sum(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    v.iter().sum()
}

/// Exact error probability together with the pieces it is built from:
/// `pe = p0 + sum(per_symbol_terms)`, where term `i` is the posterior
/// weight of symbol `i` times the probability that noise lands the
/// receive value in the decision-0 region.
#[derive(Debug, Clone)]
pub struct ErrorBreakdown {
    pub pe: f64,
    /// Signed contributions in symbol order 11, 10, 01, 00.
    pub per_symbol_terms: [f64; 4],
    pub boundaries: BoundarySet,
}

/// Exact MAP error probability at amplitudes `(pa1, pa2)`.
///
/// Zero boundaries (Case I, or uninformative degenerate designs) give
/// `pe = p1`; one boundary gives the four-term Q sum; three boundaries the
/// alternating seven-term form. Convergence failures from the boundary
/// scan propagate unchanged.
pub fn error_probability(params: &ModelParams, pa1: f64, pa2: f64) -> Result<ErrorBreakdown> {
    let boundaries = find_boundaries(params, pa1, pa2)?;
    Ok(breakdown_with(params, pa1, pa2, boundaries))
}

fn breakdown_with(
    params: &ModelParams,
    pa1: f64,
    pa2: f64,
    boundaries: BoundarySet,
) -> ErrorBreakdown {
    let bars = params.bar_coefficients().as_array();
    let points = params.constellation(pa1, pa2).points();
    let sigma = params.sigma();
    let mut per_symbol_terms = [0.0; 4];
    for i in 0..4 {
        per_symbol_terms[i] = bars[i] * decide0_probability(boundaries.roots(), points[i], sigma);
    }
    let mut terms = [params.p0(), 0.0, 0.0, 0.0, 0.0];
    terms[1..].copy_from_slice(&per_symbol_terms);
    let pe = stable_sum(&terms).clamp(0.0, 1.0);
    ErrorBreakdown { pe, per_symbol_terms, boundaries }
}

/// `Pr(R in decision-0 region | noiseless value a)` as the alternating tail
/// sum `Q((a-x1)/s) - Q((a-x2)/s) + ...` over the sorted boundaries.
fn decide0_probability(roots: &[f64], a: f64, sigma: f64) -> f64 {
    if roots.is_empty() {
        return 1.0;
    }
    let terms: Vec<f64> = roots
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let q = q_function((a - x) / sigma);
            if j % 2 == 0 {
                q
            } else {
                -q
            }
        })
        .collect();
    stable_sum(&terms).clamp(0.0, 1.0)
}

/// Error probability of the single-threshold rule "decide 0 iff
/// `r <= x_hat`". This upper-bounds the exact error whenever the true
/// boundary set has one root, with equality exactly at that root.
pub fn error_upper_bound(params: &ModelParams, pa1: f64, pa2: f64, x_hat: f64) -> f64 {
    let bars = params.bar_coefficients().as_array();
    let points = params.constellation(pa1, pa2).points();
    let sigma = params.sigma();
    let mut terms = [params.p0(), 0.0, 0.0, 0.0, 0.0];
    for i in 0..4 {
        terms[i + 1] = bars[i] * q_function((points[i] - x_hat) / sigma);
    }
    stable_sum(&terms).clamp(0.0, 1.0)
}

/// Splits the single-threshold error at `x` into the part driven by the
/// sensor-2-distinguished symbols (`g`: the 11 and 01 terms) and the rest
/// (`h`: the 10 and 00 terms), so that
/// `g + h + p0 == error_upper_bound(x)`.
///
/// In Case III with positive amplitudes, `g` is minimized at
/// `alpha * pa2 - k_alpha(pa1)` and `h` at `-beta * pa2 + k_beta(pa1)`;
/// the two minimizers meet at `pa2 == p2_tilde(pa1)`.
pub fn g_h_split(params: &ModelParams, pa1: f64, pa2: f64, x: f64) -> (f64, f64) {
    let bars = params.bar_coefficients();
    let c = params.constellation(pa1, pa2);
    let sigma = params.sigma();
    let g = stable_sum(&[
        bars.a_bar * q_function((c.a11 - x) / sigma),
        bars.c_bar * q_function((c.a01 - x) / sigma),
    ]);
    let h = stable_sum(&[
        bars.b_bar * q_function((c.a10 - x) / sigma),
        bars.d_bar * q_function((c.a00 - x) / sigma),
    ]);
    (g, h)
}

/// Cap-constrained optimal design: which case applies, the amplitudes to
/// use, and the exact error probability they achieve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AllocationResult {
    pub case: Case,
    /// Optimal amplitude scales; mean transmit powers are their squares.
    pub p1_star: f64,
    pub p2_star: f64,
    pub pe_star: f64,
    /// True when the power cap, rather than an interior optimum, sets
    /// `p2_star`.
    pub p2_capped: bool,
}

/// Optimal power allocation under per-sensor mean-power caps.
///
/// Case I: transmit nothing, the receiver always decides 0 and
/// `pe = p1`. Case II: both sensors at full power. Case III: sensor 1 at
/// full power, sensor 2 at the smaller of full power and the interior
/// optimum [`p2_tilde`]. A zero cap on sensor 1 in Case III leaves no
/// interior optimum, so sensor 2 falls back to full power.
pub fn optimal_allocation(params: &ModelParams) -> Result<AllocationResult> {
    let case = params.classify().case;
    let (pa1, pa2, capped) = match case {
        Case::I => (0.0, 0.0, false),
        Case::II => (params.p1max().sqrt(), params.p2max().sqrt(), true),
        Case::III => {
            let pa1 = params.p1max().sqrt();
            let pa2_cap = params.p2max().sqrt();
            if pa1 > 0.0 {
                let tilde = p2_tilde(params, pa1)?;
                (pa1, pa2_cap.min(tilde), pa2_cap <= tilde)
            } else {
                (pa1, pa2_cap, true)
            }
        }
    };
    let pe = if case == Case::I {
        params.p1()
    } else {
        error_probability(params, pa1, pa2)?.pe
    };
    Ok(AllocationResult { case, p1_star: pa1, p2_star: pa2, pe_star: pe, p2_capped: capped })
}

/// How the transmit amplitudes are chosen when sweeping noise levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Policy {
    /// The cap-constrained optimum from [`optimal_allocation`].
    Optimal,
    /// Both sensors at full power regardless of case.
    BothMax,
    /// Sensor 1 at full power, sensor 2 silent.
    Sensor1Only,
    /// Sensor 2 at full power, sensor 1 silent.
    Sensor2Only,
}

/// Noise-free limit of the error probability under `policy`.
///
/// Case I pins the limit at `p1` for every policy. In Case II any design
/// that keeps both sensors audible converges to the error of the
/// "decide 1 only when both sensors say 1" rule. In Case III the optimal
/// design converges to sensor 1's crossover rate, as does a full-power
/// design with distinct caps; equal caps keep the middle constellation
/// points merged, which re-creates the Case II limit. A single sensor is
/// only useful when its crossover rate beats the prior, hence the
/// `min(p1, eps)` form; silent configurations (zero caps) stay at `p1`.
pub fn high_snr_limit(params: &ModelParams, policy: Policy) -> f64 {
    let p1 = params.p1();
    let (e1, e2) = (params.eps1(), params.eps2());
    let case = params.classify().case;
    if case == Case::I {
        return p1;
    }
    let silent1 = params.p1max() == 0.0;
    let silent2 = params.p2max() == 0.0;
    let both_rule = e1 * e2 + p1 * (e1 + e2 - 2.0 * e1 * e2);
    let sensor1 = if silent1 { p1 } else { p1.min(e1) };
    let sensor2 = if silent2 { p1 } else { p1.min(e2) };
    match policy {
        Policy::Sensor1Only => sensor1,
        Policy::Sensor2Only => sensor2,
        Policy::Optimal | Policy::BothMax => match (silent1, silent2) {
            (true, true) => p1,
            (true, false) => sensor2,
            (false, true) => sensor1,
            (false, false) => match case {
                Case::I => unreachable!(),
                Case::II => both_rule,
                Case::III => {
                    if policy == Policy::BothMax && params.p1max() == params.p2max() {
                        both_rule
                    } else {
                        // In Case III the prior exceeds the upper threshold,
                        // which itself is at least e1, so min(p1, e1) = e1.
                        sensor1
                    }
                }
            },
        },
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle values keep every digit
mod tests {
    use super::*;

    fn case3(n0: f64, caps: (f64, f64)) -> ModelParams {
        ModelParams::new(0.4, 0.01, 0.05, n0, caps.0, caps.1).unwrap()
    }

    fn case2() -> ModelParams {
        ModelParams::new(0.3, 0.1, 0.15, 1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn q_function_reference_values() {
        // 50-digit references.
        let table = [
            (0.0, 0.5),
            (0.5, 0.308_537_538_725_986_90),
            (1.0, 0.158_655_253_931_457_05),
            (1.281_551_565_5, 0.100_000_000_007_827_31),
            (2.0, 0.022_750_131_948_179_207),
            (3.0, 1.349_898_031_630_094_5e-3),
            (5.0, 2.866_515_718_791_939_1e-7),
            (8.0, 6.220_960_574_271_784_1e-16),
            (-1.5, 0.933_192_798_731_141_93),
            (10.0, 7.619_853_024_160_526_1e-24),
            (20.0, 2.753_624_118_606_233_7e-89),
            (37.0, 5.725_571_222_524_576_8e-300),
        ];
        for (x, want) in table {
            let got = q_function(x);
            assert!((got - want).abs() <= 1e-10 * want, "Q({x}) = {got}, want {want}");
        }
        for x in [-3.0, -0.2, 0.7, 4.0] {
            assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn stable_sum_accumulates_small_terms_first() {
        let mut v = vec![1.0];
        v.extend(std::iter::repeat_n(1e-17, 100));
        // Left-to-right each tiny term vanishes against 1.0; magnitude
        // ordering lets them pile up first.
        let naive: f64 = v.iter().sum();
        assert_eq!(naive, 1.0);
        assert!(stable_sum(&v) > 1.0);
    }

    #[test]
    fn error_probability_reference_values() {
        // 50-digit bisection + tail-sum references.
        let p = case3(1.0, (1.0, 4.0));
        let checks = [
            (0.5, 0.033_006_445_339_823_422),
            (2.0, 0.031_898_904_406_686_831),
            (0.763_696_431_027_173_8, 0.029_139_891_881_594_342),
        ];
        for (pa2, want) in checks {
            let b = error_probability(&p, 1.0, pa2).unwrap();
            assert!((b.pe - want).abs() < 1e-10, "pa2 = {pa2}: {} vs {want}", b.pe);
        }
        let b = error_probability(&case2(), 1.0, 1.0).unwrap();
        assert!((b.pe - 0.097_566_005_232_172_555).abs() < 1e-10);
    }

    #[test]
    fn breakdown_reassembles_from_parts() {
        for (p, pa1, pa2) in [
            (case3(1.0, (1.0, 4.0)), 1.0, 2.0),
            (case3(1.0, (1.0, 4.0)), 1.0, 0.5),
            (case2(), 1.0, 1.0),
        ] {
            let b = error_probability(&p, pa1, pa2).unwrap();
            let mut terms = vec![p.p0()];
            terms.extend_from_slice(&b.per_symbol_terms);
            assert!((b.pe - stable_sum(&terms)).abs() < 1e-15);
            assert!((0.0..=1.0).contains(&b.pe));
        }
    }

    #[test]
    fn no_signal_or_case1_leaves_the_prior_error() {
        let p = ModelParams::new(0.01, 0.2, 0.3, 1.0, 1.0, 1.0).unwrap();
        for (pa1, pa2) in [(0.0, 0.0), (1.0, 1.0), (3.0, 0.7)] {
            let b = error_probability(&p, pa1, pa2).unwrap();
            assert!((b.pe - 0.01).abs() < 1e-15);
        }
        for p in [case2(), case3(1.0, (1.0, 1.0))] {
            let b = error_probability(&p, 0.0, 0.0).unwrap();
            assert!((b.pe - p.p1()).abs() < 1e-15);
        }
    }

    #[test]
    fn upper_bound_is_tight_exactly_at_the_root() {
        let p = case2();
        let b = error_probability(&p, 1.0, 1.0).unwrap();
        let root = b.boundaries.roots()[0];
        assert!((error_upper_bound(&p, 1.0, 1.0, root) - b.pe).abs() < 1e-14);
        let s = p.sigma();
        for off in [-0.5 * s, 0.5 * s] {
            assert!(error_upper_bound(&p, 1.0, 1.0, root + off) > b.pe + 1e-6);
        }
        // Far-right threshold: always decide 0.
        assert!((error_upper_bound(&p, 1.0, 1.0, 40.0) - p.p1()).abs() < 1e-12);
        // Far-left threshold: always decide 1.
        assert!((error_upper_bound(&p, 1.0, 1.0, -40.0) - p.p0()).abs() < 1e-12);
    }

    #[test]
    fn g_h_split_reassembles_and_minimizes_at_bracket_points() {
        let p = case3(1.0, (1.0, 4.0));
        let (pa1, pa2) = (1.0, 2.0);
        for x in [-1.0, 0.0, 0.3, 1.5, 4.0] {
            let (g, h) = g_h_split(&p, pa1, pa2, x);
            let total = stable_sum(&[g, h, p.p0()]);
            assert!((total - error_upper_bound(&p, pa1, pa2, x)).abs() < 2e-15);
        }
        let bf = crate::boundary::bracket_functions(&p, pa1, pa2);
        let f = p.asym_factors();
        let g_min = f.alpha * pa2 - bf.k_alpha.unwrap();
        let h_min = -f.beta * pa2 + bf.k_beta.unwrap();
        let dx = 1e-4;
        let g_at = |x: f64| g_h_split(&p, pa1, pa2, x).0;
        let h_at = |x: f64| g_h_split(&p, pa1, pa2, x).1;
        assert!(g_at(g_min) < g_at(g_min - dx) && g_at(g_min) < g_at(g_min + dx));
        assert!(h_at(h_min) < h_at(h_min - dx) && h_at(h_min) < h_at(h_min + dx));
    }

    #[test]
    fn minimizers_meet_the_root_at_the_interior_optimum() {
        let p = case3(1.0, (1.0, 4.0));
        let tilde = crate::boundary::p2_tilde(&p, 1.0).unwrap();
        let bf = crate::boundary::bracket_functions(&p, 1.0, tilde);
        let f = p.asym_factors();
        let g_min = f.alpha * tilde - bf.k_alpha.unwrap();
        let h_min = -f.beta * tilde + bf.k_beta.unwrap();
        let root = error_probability(&p, 1.0, tilde).unwrap().boundaries.roots()[0];
        assert!((g_min - h_min).abs() < 1e-10);
        assert!((g_min - root).abs() < 1e-9);
    }

    #[test]
    fn allocation_follows_the_case_table() {
        let r = optimal_allocation(&ModelParams::new(0.01, 0.2, 0.3, 1.0, 1.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(
            (r.case, r.p1_star, r.p2_star, r.pe_star, r.p2_capped),
            (Case::I, 0.0, 0.0, 0.01, false)
        );

        let r = optimal_allocation(&case2()).unwrap();
        assert_eq!((r.case, r.p1_star, r.p2_star, r.p2_capped), (Case::II, 1.0, 1.0, true));
        assert!((r.pe_star - 0.097_566_005_232_172_555).abs() < 1e-10);

        let r = optimal_allocation(&case3(1.0, (1.0, 1.0))).unwrap();
        assert_eq!((r.case, r.p1_star, r.p2_capped), (Case::III, 1.0, false));
        assert!((r.p2_star - 0.763_696_431_027_173_77).abs() < 1e-13);
        assert!((r.pe_star - 0.029_139_891_881_594_342).abs() < 1e-10);

        // Interior optimum scales with the noise level until the cap binds.
        let r = optimal_allocation(&case3(10.0, (1.0, 1.0))).unwrap();
        assert_eq!((r.p2_star, r.p2_capped), (1.0, true));

        // A silent sensor 1 leaves sensor 2 at full power.
        let r = optimal_allocation(&case3(1.0, (0.0, 1.0))).unwrap();
        assert_eq!((r.p1_star, r.p2_star, r.p2_capped), (0.0, 1.0, true));
        assert!(r.pe_star < 0.4);
    }

    #[test]
    fn high_snr_limits_by_case_and_policy() {
        let p = case2();
        assert!((high_snr_limit(&p, Policy::Optimal) - 0.081).abs() < 1e-15);
        assert!((high_snr_limit(&p, Policy::BothMax) - 0.081).abs() < 1e-15);
        assert!((high_snr_limit(&p, Policy::Sensor1Only) - 0.1).abs() < 1e-15);
        assert!((high_snr_limit(&p, Policy::Sensor2Only) - 0.15).abs() < 1e-15);

        let p = case3(1.0, (1.0, 4.0));
        assert_eq!(high_snr_limit(&p, Policy::Optimal), 0.01);
        assert_eq!(high_snr_limit(&p, Policy::BothMax), 0.01);
        assert_eq!(high_snr_limit(&p, Policy::Sensor2Only), 0.05);
        let equal_caps = case3(1.0, (1.0, 1.0));
        let both_rule = 0.01 * 0.05 + 0.4 * (0.06 - 2.0 * 0.01 * 0.05);
        assert!((high_snr_limit(&equal_caps, Policy::BothMax) - both_rule).abs() < 1e-15);
        assert!(high_snr_limit(&equal_caps, Policy::BothMax) > 0.01);

        // Case I: the prior wins under every policy.
        let p = ModelParams::new(0.01, 0.2, 0.3, 1.0, 1.0, 1.0).unwrap();
        for pol in [Policy::Optimal, Policy::BothMax, Policy::Sensor1Only, Policy::Sensor2Only] {
            assert_eq!(high_snr_limit(&p, pol), 0.01);
        }

        // A sensor whose crossover rate exceeds the prior is not worth
        // listening to on its own.
        let p = ModelParams::new(0.02, 0.1, 0.15, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(p.classify().case, Case::II);
        assert_eq!(high_snr_limit(&p, Policy::Sensor1Only), 0.02);

        // Zero caps silence the named sensors.
        let p = case3(1.0, (0.0, 0.0));
        assert_eq!(high_snr_limit(&p, Policy::Optimal), 0.4);
        let p = case3(1.0, (0.0, 1.0));
        assert_eq!(high_snr_limit(&p, Policy::BothMax), 0.05);
        assert_eq!(high_snr_limit(&p, Policy::Sensor1Only), 0.4);
    }

    #[test]
    fn high_snr_convergence_is_monotone_per_decade() {
        // Case III at the optimal allocation.
        let mut last = f64::INFINITY;
        for n0 in [1e-1, 1e-2, 1e-3] {
            let p = case3(n0, (1.0, 1.0));
            let pe = optimal_allocation(&p).unwrap().pe_star;
            assert!(pe >= 0.01 - 1e-12);
            assert!(pe <= last + 1e-12);
            last = pe;
        }
        let pe = optimal_allocation(&case3(1e-1, (1.0, 1.0))).unwrap().pe_star;
        assert!((pe - 0.010_000_889_664_114_564).abs() < 1e-10);

        // Case II at full power.
        let mut last = f64::INFINITY;
        for n0 in [1e-1, 1e-2, 1e-3] {
            let p = ModelParams::new(0.3, 0.1, 0.15, n0, 1.0, 1.0).unwrap();
            let pe = optimal_allocation(&p).unwrap().pe_star;
            assert!(pe >= 0.081 - 1e-12);
            assert!(pe <= last + 1e-12);
            last = pe;
        }
    }
}
