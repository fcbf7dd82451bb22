//! Closed-form SNR approximations and scaling laws.
//!
//! Everything here is an analytic counterpart to the exact placement and
//! SNR machinery, used to predict trends and pick design points without
//! running the placement sweep.
//!
//! For segment selection the central quantity is the span-averaged
//! waveguide gain over one segment of length `D_x / M`,
//!
//! ```text
//! A(M) = (1 - exp(-2 alpha D_x / M)) / (2 alpha D_x / M)
//! ```
//!
//! together with its derivatives in `M` and its ratio against the
//! conventional single-waveguide average. For segment aggregation and
//! multiplexing the lossless coherent and power sums over a centered layout
//! collapse, via an integral comparison, to inverse hyperbolic and inverse
//! tangent expressions in `M`, `L`, and the cross-axis distance `c_y`. The
//! downlink selection approximation plays the same game over the antennas
//! of a single segment with pitch equal to the minimum spacing.

use crate::error::{Error, Result};
use crate::phys::LinkBudget;

// ---- parameter bundle ----

/// Geometry inputs shared by the aggregation and multiplexing
/// approximations. Power and path gain arrive separately so one bundle can
/// be priced under different budgets.
#[derive(Debug, Clone, Copy)]
pub struct ApproxParams {
    /// Segment count `M`.
    pub num_segments: usize,
    /// Segment length `L` [m].
    pub segment_length_m: f64,
    /// Total span `D_x = L * M` [m].
    pub side_length_m: f64,
    /// Squared cross-axis distance from user to waveguide `c_y` [m^2].
    pub c_y_m2: f64,
    /// Minimum antenna spacing [m], used by the downlink approximation.
    pub min_spacing_m: f64,
}

impl ApproxParams {
    /// Bundles the geometry, deriving the span from `L * M`.
    pub fn new(
        num_segments: usize,
        segment_length_m: f64,
        c_y_m2: f64,
        min_spacing_m: f64,
    ) -> Result<ApproxParams> {
        if num_segments == 0 {
            return Err(Error::InvalidArgument(
                "segment count must be at least 1".to_string(),
            ));
        }
        if !(segment_length_m.is_finite() && segment_length_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "segment length must be positive, got {segment_length_m}"
            )));
        }
        if !(c_y_m2.is_finite() && c_y_m2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "squared cross-axis distance must be positive, got {c_y_m2}"
            )));
        }
        if !(min_spacing_m.is_finite() && min_spacing_m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "antenna spacing must be positive, got {min_spacing_m}"
            )));
        }
        Ok(ApproxParams {
            num_segments,
            segment_length_m,
            side_length_m: segment_length_m * num_segments as f64,
            c_y_m2,
            min_spacing_m,
        })
    }

    fn require_odd_segments(&self, what: &str) -> Result<()> {
        if self.num_segments.is_multiple_of(2) {
            return Err(Error::UnsupportedGeometry(format!(
                "{what} is derived for an odd segment count, got {}",
                self.num_segments
            )));
        }
        Ok(())
    }
}

fn check_span(d_x_m: f64) -> Result<()> {
    if !(d_x_m.is_finite() && d_x_m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "span must be positive, got {d_x_m}"
        )));
    }
    Ok(())
}

fn check_cy(c_y_m2: f64) -> Result<()> {
    if !(c_y_m2.is_finite() && c_y_m2 > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "squared cross-axis distance must be positive, got {c_y_m2}"
        )));
    }
    Ok(())
}

// ---- segment selection gain ----

/// Span-averaged waveguide power gain of one segment under selection,
/// `(1 - exp(-t)) / t` with `t = 2 alpha D_x / M`. Equals 1 for a lossless
/// waveguide and grows toward 1 as segments shorten.
pub fn avg_gain_ss(num_segments: f64, d_x_m: f64, alpha_per_m: f64) -> Result<f64> {
    check_span(d_x_m)?;
    if !(num_segments.is_finite() && num_segments > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "segment count must be positive, got {num_segments}"
        )));
    }
    if !(alpha_per_m.is_finite() && alpha_per_m >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "attenuation rate must be non-negative, got {alpha_per_m}"
        )));
    }
    let t = 2.0 * alpha_per_m * d_x_m / num_segments;
    if t == 0.0 {
        return Ok(1.0);
    }
    Ok(-(-t).exp_m1() / t)
}

/// First and second derivatives of [`avg_gain_ss`] with respect to the
/// segment count, in closed form:
///
/// ```text
/// dA/dM   = (1 - (1 + t) exp(-t)) / (2 alpha D_x)
/// d2A/dM2 = -(2 alpha D_x / M^3) exp(-t)
/// ```
///
/// The first is positive and the second negative for every `M > 0` with a
/// lossy waveguide, so the gain rises with diminishing returns.
pub fn gain_derivatives(num_segments: f64, d_x_m: f64, alpha_per_m: f64) -> Result<(f64, f64)> {
    check_span(d_x_m)?;
    if !(num_segments.is_finite() && num_segments > 0.0) {
        return Err(Error::UndefinedDerivative(format!(
            "gain derivatives have a pole at M = 0, got M = {num_segments}"
        )));
    }
    if !(alpha_per_m.is_finite() && alpha_per_m >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "attenuation rate must be non-negative, got {alpha_per_m}"
        )));
    }
    let beta = 2.0 * alpha_per_m * d_x_m;
    if beta == 0.0 {
        return Ok((0.0, 0.0));
    }
    let t = beta / num_segments;
    let e = (-t).exp();
    let d1 = (1.0 - (1.0 + t) * e) / beta;
    let d2 = -(beta / (num_segments * num_segments * num_segments)) * e;
    Ok((d1, d2))
}

/// Ratio of the segmented average gain to the conventional single-waveguide
/// average over the same span,
/// `M (1 - exp(-2 alpha D_x / M)) / (1 - exp(-2 alpha D_x))`.
/// Equals 1 for a lossless waveguide and grows in both `M` and `D_x`.
pub fn gain_ratio(num_segments: f64, d_x_m: f64, alpha_per_m: f64) -> Result<f64> {
    check_span(d_x_m)?;
    if !(num_segments.is_finite() && num_segments > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "segment count must be positive, got {num_segments}"
        )));
    }
    if alpha_per_m == 0.0 {
        return Ok(1.0);
    }
    let beta = 2.0 * alpha_per_m * d_x_m;
    let t = beta / num_segments;
    Ok(num_segments * (-t).exp_m1() / (-beta).exp_m1())
}

/// Limit of [`gain_ratio`] as the segment count grows without bound,
/// `2 alpha D_x / (1 - exp(-2 alpha D_x))`.
pub fn gain_ratio_limit(d_x_m: f64, alpha_per_m: f64) -> Result<f64> {
    check_span(d_x_m)?;
    if alpha_per_m == 0.0 {
        return Ok(1.0);
    }
    let beta = 2.0 * alpha_per_m * d_x_m;
    Ok(-beta / (-beta).exp_m1())
}

/// One point of the selection gain curve.
#[derive(Debug, Clone, Copy)]
pub struct GainCurvePoint {
    /// Segment count `M`.
    pub num_segments: usize,
    /// Span-averaged waveguide gain [`avg_gain_ss`].
    pub gain: f64,
    /// Gain ratio against the conventional baseline [`gain_ratio`].
    pub ratio_to_conventional: f64,
}

/// Evaluates the selection gain and baseline ratio over a list of segment
/// counts.
pub fn gain_curve(
    segment_counts: &[usize],
    d_x_m: f64,
    alpha_per_m: f64,
) -> Result<Vec<GainCurvePoint>> {
    segment_counts
        .iter()
        .map(|&m| {
            if m == 0 {
                return Err(Error::InvalidArgument(
                    "segment count must be at least 1".to_string(),
                ));
            }
            Ok(GainCurvePoint {
                num_segments: m,
                gain: avg_gain_ss(m as f64, d_x_m, alpha_per_m)?,
                ratio_to_conventional: gain_ratio(m as f64, d_x_m, alpha_per_m)?,
            })
        })
        .collect()
}

// ---- segment aggregation approximations ----

/// Which closed form approximates the lossless aggregation SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaApproxVariant {
    /// Integral comparison at fixed segment length, with the cubic
    /// correction term retained.
    Lemma2,
    /// Simplification for a fixed total span, segment length eliminated.
    FixedDx,
    /// Simplification at fixed segment length, correction term dropped.
    FixedL,
}

/// Coherent-sum bracket of the aggregation approximation at fixed segment
/// length,
///
/// ```text
/// 1/sqrt(c_y) + (2/L) asinh((M-1) L / (2 sqrt(c_y)))
///   - ((M-1)/24) L^3 / (c_y^2 + ((M-1) L / 2)^2)^(3/2)
/// ```
///
/// Requires an odd segment count, the derivation centers the user over the
/// middle segment.
pub fn sa_lemma2_bracket(params: &ApproxParams) -> Result<f64> {
    params.require_odd_segments("the aggregation bracket")?;
    let m = params.num_segments as f64;
    let l = params.segment_length_m;
    let cy = params.c_y_m2;
    let sqrt_cy = cy.sqrt();
    let half_reach = (m - 1.0) * l / 2.0;
    let main = 1.0 / sqrt_cy + (2.0 / l) * (half_reach / sqrt_cy).asinh();
    let correction =
        ((m - 1.0) / 24.0) * l * l * l / (cy * cy + half_reach * half_reach).powf(1.5);
    Ok(main - correction)
}

/// Closed-form approximation of the lossless uplink aggregation SNR,
/// `P eta bracket^2 / (M sigma^2)` with the bracket picked by `variant`.
///
/// Requires an odd segment count. The fixed-span variant is loose for small
/// `M` and tightens as `M` grows, the fixed-length variants stay within a
/// percent over practical ranges.
pub fn sa_uplink_approx(
    variant: SaApproxVariant,
    params: &ApproxParams,
    budget: &LinkBudget,
    eta_m2: f64,
) -> Result<f64> {
    params.require_odd_segments("the aggregation approximation")?;
    let m = params.num_segments as f64;
    let l = params.segment_length_m;
    let cy = params.c_y_m2;
    let sqrt_cy = cy.sqrt();
    let bracket = match variant {
        SaApproxVariant::Lemma2 => sa_lemma2_bracket(params)?,
        SaApproxVariant::FixedDx => {
            let d_x = params.side_length_m;
            1.0 / sqrt_cy + (2.0 * m / d_x) * (d_x / (2.0 * sqrt_cy)).asinh()
        }
        SaApproxVariant::FixedL => {
            let half_reach = (m - 1.0) * l / 2.0;
            1.0 / sqrt_cy + (2.0 / l) * (half_reach / sqrt_cy).asinh()
        }
    };
    Ok(budget.power_ratio() * eta_m2 * bracket * bracket / m)
}

/// Segment count minimizing the fixed-span aggregation SNR, as printed in
/// the source derivation: `D_x / (sqrt(2 c_y) asinh(D_x / (2 c_y)))`.
pub fn sa_min_segments(d_x_m: f64, c_y_m2: f64) -> Result<f64> {
    check_span(d_x_m)?;
    check_cy(c_y_m2)?;
    Ok(d_x_m / ((2.0 * c_y_m2).sqrt() * (d_x_m / (2.0 * c_y_m2)).asinh()))
}

/// Stationary point of the fixed-span aggregation bracket when its two `M`
/// dependent terms balance, `D_x / (2 sqrt(c_y) asinh(D_x / (2 sqrt(c_y))))`.
/// This is the value consistent with differentiating [`SaApproxVariant::FixedDx`].
pub fn sa_fixed_dx_stationary_m(d_x_m: f64, c_y_m2: f64) -> Result<f64> {
    check_span(d_x_m)?;
    check_cy(c_y_m2)?;
    let sqrt_cy = c_y_m2.sqrt();
    Ok(d_x_m / (2.0 * sqrt_cy * (d_x_m / (2.0 * sqrt_cy)).asinh()))
}

fn sa_gain_slope(d_x_m: f64, c_y_m2: f64) -> f64 {
    let sqrt_cy = c_y_m2.sqrt();
    (2.0 * sqrt_cy / d_x_m) * (d_x_m / (2.0 * sqrt_cy)).asinh()
}

/// Aggregation SNR over the conventional single-waveguide SNR under the
/// fixed-span approximation, `(1 + b M)^2 / M` with
/// `b = (2 sqrt(c_y) / D_x) asinh(D_x / (2 sqrt(c_y)))`.
pub fn sa_gain_over_conventional(num_segments: f64, d_x_m: f64, c_y_m2: f64) -> Result<f64> {
    check_span(d_x_m)?;
    check_cy(c_y_m2)?;
    if !(num_segments.is_finite() && num_segments > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "segment count must be positive, got {num_segments}"
        )));
    }
    let b = sa_gain_slope(d_x_m, c_y_m2);
    let lin = 1.0 + b * num_segments;
    Ok(lin * lin / num_segments)
}

/// Smallest segment count at which aggregation beats the conventional
/// baseline for good, under the fixed-span approximation.
///
/// The ratio `(1 + b M)^2 / M` starts above 1, dips below in a mid-range
/// when `b < 1/4`, and recovers. This returns the first integer at or past
/// the upper crossing, found from the quadratic root and refined by an
/// integer scan. Returns 1 when the ratio never dips.
pub fn sa_threshold_m(d_x_m: f64, c_y_m2: f64) -> Result<usize> {
    check_span(d_x_m)?;
    check_cy(c_y_m2)?;
    let b = sa_gain_slope(d_x_m, c_y_m2);
    if b >= 0.25 {
        return Ok(1);
    }
    let upper_root = (1.0 - 2.0 * b + (1.0 - 4.0 * b).sqrt()) / (2.0 * b * b);
    let mut m = upper_root.floor().max(1.0) as usize;
    loop {
        if sa_gain_over_conventional(m as f64, d_x_m, c_y_m2)? >= 1.0 {
            return Ok(m);
        }
        m += 1;
    }
}

/// Large-`M` slope of [`sa_gain_over_conventional`] divided by `M`, which is
/// `b^2`. The aggregation advantage grows linearly with the segment count at
/// this rate.
pub fn sa_gain_asymptotic_slope(d_x_m: f64, c_y_m2: f64) -> Result<f64> {
    check_span(d_x_m)?;
    check_cy(c_y_m2)?;
    let b = sa_gain_slope(d_x_m, c_y_m2);
    Ok(b * b)
}

// ---- segment multiplexing approximations ----

/// Which closed form approximates the lossless multiplexing SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmApproxVariant {
    /// Integral comparison with the quartic correction term retained.
    Full,
    /// Correction term dropped.
    Simplified,
    /// Simplified form with the reach `(M-1) L` replaced by the span `D_x`,
    /// an upper bound on the exact SNR.
    Upper,
    /// Reach sent to infinity, the saturation ceiling.
    Limit,
}

/// Closed-form approximation of the lossless uplink multiplexing SNR,
///
/// ```text
/// (P eta / sigma^2) [ 1/c_y + 2 atan((M-1) L / (2 sqrt(c_y))) / (L sqrt(c_y))
///                     - ((M-1)/12) L^3 / (c_y + ((M-1) L / 2)^2)^2 ]
/// ```
///
/// for the full variant, with the other variants simplifying as documented
/// on [`SmApproxVariant`]. The power sum saturates: the limit variant gives
/// the ceiling `(P eta / sigma^2)(1/c_y + pi / (L sqrt(c_y)))`.
pub fn sm_uplink_approx(
    variant: SmApproxVariant,
    params: &ApproxParams,
    budget: &LinkBudget,
    eta_m2: f64,
) -> Result<f64> {
    let m = params.num_segments as f64;
    let l = params.segment_length_m;
    let cy = params.c_y_m2;
    let sqrt_cy = cy.sqrt();
    let bracket = match variant {
        SmApproxVariant::Full => {
            params.require_odd_segments("the multiplexing approximation")?;
            let half_reach = (m - 1.0) * l / 2.0;
            let tail = cy + half_reach * half_reach;
            1.0 / cy + 2.0 * (half_reach / sqrt_cy).atan() / (l * sqrt_cy)
                - ((m - 1.0) / 12.0) * l * l * l / (tail * tail)
        }
        SmApproxVariant::Simplified => {
            params.require_odd_segments("the multiplexing approximation")?;
            let half_reach = (m - 1.0) * l / 2.0;
            1.0 / cy + 2.0 * (half_reach / sqrt_cy).atan() / (l * sqrt_cy)
        }
        SmApproxVariant::Upper => {
            params.require_odd_segments("the multiplexing approximation")?;
            1.0 / cy + 2.0 * (params.side_length_m / (2.0 * sqrt_cy)).atan() / (l * sqrt_cy)
        }
        SmApproxVariant::Limit => 1.0 / cy + std::f64::consts::PI / (l * sqrt_cy),
    };
    Ok(budget.power_ratio() * eta_m2 * bracket)
}

// ---- downlink selection approximation ----

/// Closed-form approximation of the lossless downlink selection SNR with
/// `N` antennas in the chosen segment at pitch `Delta`,
///
/// ```text
/// (P eta / (N sigma^2)) (1/sqrt(c_y) + (2/Delta) asinh((N-1) Delta / (2 sqrt(c_y))))^2
/// ```
pub fn dl_ss_approx(
    num_antennas: usize,
    params: &ApproxParams,
    budget: &LinkBudget,
    eta_m2: f64,
) -> Result<f64> {
    if num_antennas == 0 {
        return Err(Error::InvalidArgument(
            "antenna count must be at least 1".to_string(),
        ));
    }
    let n = num_antennas as f64;
    let delta = params.min_spacing_m;
    let sqrt_cy = params.c_y_m2.sqrt();
    let bracket =
        1.0 / sqrt_cy + (2.0 / delta) * ((n - 1.0) * delta / (2.0 * sqrt_cy)).asinh();
    Ok(budget.power_ratio() * eta_m2 * bracket * bracket / n)
}

// ---- midpoint integration oracle ----

/// Which integrand the midpoint oracle sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MidpointKind {
    /// `1 / sqrt(c_y + x^2)`, the coherent-sum integrand.
    InverseDistance,
    /// `1 / (c_y + x^2)`, the power-sum integrand.
    InverseSquare,
}

/// Compensated midpoint-rule sum `sum_{k=1}^{(M-1)/2} f(L (k - 1/2))` used
/// as an independent check on the integral-comparison brackets. Requires an
/// odd segment count and returns 0 for `M = 1`.
pub fn midpoint_oracle(
    kind: MidpointKind,
    num_segments: usize,
    segment_length_m: f64,
    c_y_m2: f64,
) -> Result<f64> {
    if num_segments.is_multiple_of(2) {
        return Err(Error::UnsupportedGeometry(format!(
            "the midpoint oracle needs an odd segment count, got {num_segments}"
        )));
    }
    if !(segment_length_m.is_finite() && segment_length_m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "segment length must be positive, got {segment_length_m}"
        )));
    }
    check_cy(c_y_m2)?;
    let half = (num_segments - 1) / 2;
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for k in 1..=half {
        let x = segment_length_m * (k as f64 - 0.5);
        let term = match kind {
            MidpointKind::InverseDistance => 1.0 / (c_y_m2 + x * x).sqrt(),
            MidpointKind::InverseSquare => 1.0 / (c_y_m2 + x * x),
        };
        let y = term - compensation;
        let t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }
    Ok(sum)
}
