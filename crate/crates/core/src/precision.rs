//! Working precision, strict-inequality margins and small float helpers.

use rug::float::Round;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum precision accepted anywhere (an IEEE double mantissa).
pub const MIN_PRECISION_BITS: u32 = 53;
pub const DEFAULT_PRECISION_BITS: u32 = 128;
/// Default relative margin below which a strict inequality is not certified.
pub const DEFAULT_EPS_LOG2: i32 = -64;

/// Binary precision in bits, at least 53.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub fn new(bits: u32) -> Result<Self> {
        if bits < MIN_PRECISION_BITS {
            return Err(Error::invalid(format!(
                "precision_bits must be >= {MIN_PRECISION_BITS}, got {bits}"
            )));
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Twice the working precision, used for independent re-computation.
    pub fn doubled(self) -> Self {
        Precision(self.0 * 2)
    }

    pub fn float(self, v: impl Into<f64>) -> Float {
        Float::with_val(self.0, v.into())
    }

    pub fn int(self, v: i64) -> Float {
        Float::with_val(self.0, v)
    }

    pub fn zero(self) -> Float {
        Float::with_val(self.0, 0)
    }

    pub fn one(self) -> Float {
        Float::with_val(self.0, 1)
    }

    /// Exact power of two `2^e`.
    pub fn pow2(self, e: i32) -> Float {
        Float::with_val(self.0, Float::u_exp(1, e))
    }

    pub fn complex(self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.0, (re, im))
    }

    pub fn complex_zero(self) -> Complex {
        Complex::with_val(self.0, (0, 0))
    }

    /// Parses a decimal (or `0x` hexadecimal-mantissa) real at this precision.
    pub fn parse(self, text: &str) -> Result<Float> {
        let t = text.trim();
        let parsed = Float::parse(t).map_err(|e| Error::invalid(format!("bad real `{t}`: {e}")))?;
        let v = Float::with_val(self.0, parsed);
        if !v.is_finite() {
            return Err(Error::invalid(format!("non-finite real `{t}`")));
        }
        Ok(v)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision(DEFAULT_PRECISION_BITS)
    }
}

impl TryFrom<u32> for Precision {
    type Error = Error;
    fn try_from(bits: u32) -> Result<Self> {
        Precision::new(bits)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

/// Relative margin threshold for strict inequalities and relative-error checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tolerance {
    /// The threshold is `2^eps_log2`.
    pub eps_log2: i32,
}

impl Tolerance {
    pub fn from_log2(eps_log2: i32) -> Self {
        Tolerance { eps_log2 }
    }

    pub fn value(self, prec: Precision) -> Float {
        prec.pow2(self.eps_log2)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps_log2: DEFAULT_EPS_LOG2,
        }
    }
}

/// Outcome of checking `lhs < rhs` with a reported margin.
#[derive(Clone, Debug)]
pub struct StrictCheck {
    pub lhs: Float,
    pub rhs: Float,
    /// `rhs - lhs`.
    pub margin: Float,
    /// `(rhs - lhs) / |rhs|`, or the absolute margin when `rhs == 0`.
    pub relative_margin: Float,
    pub holds: bool,
}

impl StrictCheck {
    pub fn less(lhs: &Float, rhs: &Float, tol: Tolerance) -> Self {
        let prec = lhs.prec().max(rhs.prec());
        let margin = Float::with_val(prec, rhs - lhs);
        let relative_margin = if rhs.is_zero() {
            margin.clone()
        } else {
            Float::with_val(prec, &margin / Float::with_val(prec, rhs.abs_ref()))
        };
        let eps = Float::with_val(prec, Float::u_exp(1, tol.eps_log2));
        let holds = relative_margin > eps;
        StrictCheck {
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            margin,
            relative_margin,
            holds,
        }
    }
}

/// Outcome of a check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Holds on the realized terms, but no certified tail bound covers the rest.
    TruncatedOnly,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::TruncatedOnly => "truncated-only",
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    /// Fail dominates truncated-only, which dominates pass.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::TruncatedOnly, _) | (_, Verdict::TruncatedOnly) => Verdict::TruncatedOnly,
            _ => Verdict::Pass,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `lhs <= rhs` up to a few ulps of the working precision.
pub fn le_rounded(lhs: &Float, rhs: &Float) -> bool {
    let prec = lhs.prec().max(rhs.prec());
    let slack = Float::with_val(prec, Float::u_exp(1, 8 - prec as i32));
    let bound = Float::with_val(prec, rhs.abs_ref()) * slack + rhs;
    *lhs <= bound
}

/// `|x - y| / max(|x|, |y|)`, zero when both vanish.
pub fn rel_err(x: &Float, y: &Float) -> Float {
    let prec = x.prec().max(y.prec());
    let diff = Float::with_val(prec, x - y).abs();
    let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, y.abs_ref()));
    if scale.is_zero() {
        return Float::with_val(prec, 0);
    }
    diff / scale
}

/// Complex analogue of [`rel_err`].
pub fn rel_err_complex(x: &Complex, y: &Complex) -> Float {
    let prec = x.prec().0.max(y.prec().0);
    let diff = Float::with_val(prec, Complex::with_val(prec, x - y).abs_ref());
    let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, y.abs_ref()));
    if scale.is_zero() {
        return Float::with_val(prec, 0);
    }
    diff / scale
}

/// Decimal rendering that round-trips at the value's own precision.
pub fn format_exact(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, None)
}

/// Short decimal rendering for reports and certificates.
pub fn format_short(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x.is_sign_positive() { "inf" } else { "-inf" }.to_string();
    }
    x.to_string_radix(10, Some(20))
}

/// Converts to `f64`, rounding toward +infinity.
pub fn to_f64_up(x: &Float) -> f64 {
    x.to_f64_round(Round::Up)
}

pub fn is_finite_complex(z: &Complex) -> bool {
    z.real().is_finite() && z.imag().is_finite()
}
