//! System model: a binary source observed by two noisy sensors that
//! transmit simultaneously over a shared Gaussian channel.
//!
//! The source bit `X` has prior `p1 = Pr(X = 1) <= 1/2`. Sensor `i`
//! observes `X` through an independent binary symmetric channel with
//! crossover probability `eps_i`, maps its observation to an amplitude,
//! and the receiver sees the sum of both amplitudes plus `N(0, n0/2)`
//! noise. Everything downstream (decision boundaries, exact error
//! probability, power allocation) is computed from the quantities defined
//! here.

use serde::Serialize;

use crate::errors::{Error, Result};

/// Symbol order used for all per-symbol arrays: the joint sensor output
/// `(x1, x2)` in the order 11, 10, 01, 00. This matches the coefficient
/// order (a, b, c, d) used by the boundary and error modules.
pub const SYMBOLS: [(u8, u8); 4] = [(1, 1), (1, 0), (0, 1), (0, 0)];

/// Validated model parameters. Construct via [`ModelParams::new`]; fields
/// are immutable afterwards so every invariant checked at construction
/// holds for the lifetime of the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    p1: f64,
    eps1: f64,
    eps2: f64,
    n0: f64,
    p1max: f64,
    p2max: f64,
}

impl ModelParams {
    /// Validates and freezes a parameter set.
    ///
    /// Constraints: `p1` in (0, 0.5], `0 < eps1 <= eps2 < 0.5`, `n0 > 0`,
    /// power caps nonnegative, everything finite. Sensors are ordered so
    /// sensor 1 is the more reliable one; callers with the opposite
    /// labeling should swap before constructing.
    pub fn new(p1: f64, eps1: f64, eps2: f64, n0: f64, p1max: f64, p2max: f64) -> Result<Self> {
        for v in [p1, eps1, eps2, n0, p1max, p2max] {
            if !v.is_finite() {
                return Err(Error::Domain("all parameters must be finite"));
            }
        }
        if !(p1 > 0.0 && p1 <= 0.5) {
            return Err(Error::Domain("p1 must lie in (0, 0.5]"));
        }
        if !(eps1 > 0.0 && eps1 < 0.5) {
            return Err(Error::Domain("eps1 must lie in (0, 0.5)"));
        }
        if !(eps2 > 0.0 && eps2 < 0.5) {
            return Err(Error::Domain("eps2 must lie in (0, 0.5)"));
        }
        if eps1 > eps2 {
            return Err(Error::Domain("sensors must be ordered: eps1 <= eps2"));
        }
        if n0.is_nan() || n0 <= 0.0 {
            return Err(Error::Domain("n0 must be positive"));
        }
        if p1max < 0.0 || p2max < 0.0 {
            return Err(Error::Domain("power caps must be nonnegative"));
        }
        Ok(Self { p1, eps1, eps2, n0, p1max, p2max })
    }

    /// Returns a copy with a different noise level, keeping everything else.
    pub fn with_n0(&self, n0: f64) -> Result<Self> {
        Self::new(self.p1, self.eps1, self.eps2, n0, self.p1max, self.p2max)
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p0(&self) -> f64 {
        1.0 - self.p1
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }

    pub fn eps2(&self) -> f64 {
        self.eps2
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }

    /// Channel noise standard deviation, `sqrt(n0 / 2)`.
    pub fn sigma(&self) -> f64 {
        (self.n0 / 2.0).sqrt()
    }

    pub fn p1max(&self) -> f64 {
        self.p1max
    }

    pub fn p2max(&self) -> f64 {
        self.p2max
    }

    /// `10 log10(sqrt(p1max * p2max) / n0)`, the figure-of-merit used when
    /// sweeping noise levels.
    pub fn snr_db(&self) -> f64 {
        10.0 * ((self.p1max * self.p2max).sqrt() / self.n0).log10()
    }

    /// Classifies the prior against the two thresholds that determine the
    /// shape of the optimal design. Boundary values fall to the lower case;
    /// `eps1 == eps2` with `p1 == 0.5` is Case II by that convention (the
    /// upper threshold equals 0.5 exactly there).
    pub fn classify(&self) -> Classification {
        let (e1, e2) = (self.eps1, self.eps2);
        let lower = e1 * e2 / (1.0 - e1 - e2 + 2.0 * e1 * e2);
        let upper = (e1 - e1 * e2) / (e1 + e2 - 2.0 * e1 * e2);
        let case = if self.p1 <= lower {
            Case::I
        } else if self.p1 <= upper {
            Case::II
        } else {
            Case::III
        };
        Classification { case, lower_threshold: lower, upper_threshold: upper }
    }

    /// Joint conditional probabilities of the sensor outputs given the
    /// source bit.
    pub fn conditional_probs(&self) -> ConditionalProbs {
        let (e1, e2) = (self.eps1, self.eps2);
        // Index by (x1 << 1) | x2.
        let given0 = [
            (1.0 - e1) * (1.0 - e2), // 00
            (1.0 - e1) * e2,         // 01
            e1 * (1.0 - e2),         // 10
            e1 * e2,                 // 11
        ];
        let given1 = [
            e1 * e2,                 // 00
            e1 * (1.0 - e2),         // 01
            (1.0 - e1) * e2,         // 10
            (1.0 - e1) * (1.0 - e2), // 11
        ];
        ConditionalProbs { given0, given1 }
    }

    /// Per-symbol posterior weights `p1 * p(l,m|1) - p0 * p(l,m|0)` in
    /// symbol order 11, 10, 01, 00. Their signs determine the case and the
    /// structure of the decision regions.
    pub fn bar_coefficients(&self) -> BarCoefficients {
        let probs = self.conditional_probs();
        let (p1, p0) = (self.p1, self.p0());
        let w = |l: u8, m: u8| p1 * probs.p(l, m, 1) - p0 * probs.p(l, m, 0);
        BarCoefficients {
            a_bar: w(1, 1),
            b_bar: w(1, 0),
            c_bar: w(0, 1),
            d_bar: w(0, 0),
        }
    }

    /// Prior-matched amplitude skew factors. Sensor `i` transmits
    /// `-beta * P_i` for a 0 observation and `alpha * P_i` for a 1, which
    /// gives mean power exactly `P_i^2`.
    pub fn asym_factors(&self) -> AsymFactors {
        let (p1, p0) = (self.p1, self.p0());
        AsymFactors { alpha: (p0 / p1).sqrt(), beta: (p1 / p0).sqrt() }
    }

    /// Received constellation when sensor i uses the skewed pair with
    /// amplitude scale `pa_i >= 0`.
    pub fn constellation(&self, pa1: f64, pa2: f64) -> JointConstellation {
        debug_assert!(pa1 >= 0.0 && pa2 >= 0.0);
        let AsymFactors { alpha, beta } = self.asym_factors();
        let a11 = alpha * (pa1 + pa2);
        let a10 = alpha * pa1 - beta * pa2;
        let a01 = -beta * pa1 + alpha * pa2;
        let a00 = -beta * (pa1 + pa2);
        JointConstellation {
            a11,
            a10,
            a01,
            a00,
            overlap: (a01 - a10).abs() <= 1e-12,
        }
    }
}

/// Prior regime. Case I: the source is skewed enough that the receiver
/// should always decide 0. Case II: only the joint symbol 11 maps to a
/// decision of 1. Case III: sensor 1's report dominates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    I,
    II,
    III,
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Case::I => write!(f, "I"),
            Case::II => write!(f, "II"),
            Case::III => write!(f, "III"),
        }
    }
}

/// Case label plus the two prior thresholds that separate the cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub case: Case,
    pub lower_threshold: f64,
    pub upper_threshold: f64,
}

/// Joint sensor-output distribution conditioned on the source bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalProbs {
    given0: [f64; 4],
    given1: [f64; 4],
}

impl ConditionalProbs {
    /// `Pr(X1 = l, X2 = m | X = given)`.
    pub fn p(&self, l: u8, m: u8, given: u8) -> f64 {
        debug_assert!(l <= 1 && m <= 1 && given <= 1);
        let idx = ((l << 1) | m) as usize;
        if given == 1 {
            self.given1[idx]
        } else {
            self.given0[idx]
        }
    }

    /// Both conditionals for one symbol: `(p(l,m|1), p(l,m|0))`.
    pub fn pair(&self, l: u8, m: u8) -> (f64, f64) {
        (self.p(l, m, 1), self.p(l, m, 0))
    }
}

/// Signed per-symbol posterior weights in symbol order 11, 10, 01, 00.
///
/// `d_bar < 0` always; the sign pattern of the rest tracks the case:
/// Case I all nonpositive, Case II `a_bar > 0 >= b_bar, c_bar`, Case III
/// `a_bar, b_bar > 0 > c_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarCoefficients {
    pub a_bar: f64,
    pub b_bar: f64,
    pub c_bar: f64,
    pub d_bar: f64,
}

impl BarCoefficients {
    /// Symbol order 11, 10, 01, 00, matching [`SYMBOLS`].
    pub fn as_array(&self) -> [f64; 4] {
        [self.a_bar, self.b_bar, self.c_bar, self.d_bar]
    }
}

/// Amplitude skew pair: `alpha * beta = 1` and
/// `alpha + beta = 1 / sqrt(p0 * p1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymFactors {
    pub alpha: f64,
    pub beta: f64,
}

impl AsymFactors {
    pub fn sum(&self) -> f64 {
        self.alpha + self.beta
    }
}

/// Received noiseless sums for the four joint sensor outputs. For positive
/// amplitudes `a00 < a01, a10 < a11`; the middle two coincide exactly when
/// the amplitudes are equal (`overlap`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointConstellation {
    pub a11: f64,
    pub a10: f64,
    pub a01: f64,
    pub a00: f64,
    /// True iff `a01 == a10` within 1e-12.
    pub overlap: bool,
}

impl JointConstellation {
    /// Symbol order 11, 10, 01, 00, matching [`SYMBOLS`].
    pub fn points(&self) -> [f64; 4] {
        [self.a11, self.a10, self.a01, self.a00]
    }
}
