//! Scalar mathematics of the tone-dichotomy function `k * |x^g - x|`.
//!
//! Gamma correction `x^g` is monotone, which limits how much contrast it can
//! create. Subtracting the identity and rescaling turns it into a unimodal
//! curve on `[0, 1]`: it rises with slope `m_plus` up to the contrast maximum
//! at `d_max`, then falls with slope `m_minus`. Everything derived from that
//! curve (the maximum, the normalization factor `k`, the secant slopes, the
//! region areas and both inversion algorithms) lives in this module. All of
//! it is plain `f64` math with no image container in sight.

mod golden;
mod lut;

pub use golden::{invert_golden, GoldenSearchConfig};
pub use lut::{build_lut, invert_lut, DichotomyLut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side of the contrast maximum a sample falls on.
///
/// `Ascending` covers `x <= d_max` (positive slope), `Descending` covers
/// `x > d_max` (negative slope). The boundary point itself is ascending so
/// that every sample has exactly one branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Ascending,
    Descending,
}

/// Gamma exponent together with every quantity derived from it.
///
/// For a fixed `gamma != 1` the dichotomy curve is completely described by
/// the location of its maximum (`d_max`), the value there (`doc_max`), the
/// normalization `k = 1/doc_max`, the secant slopes of the two branches and
/// the areas under each branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DichotomyParams {
    pub gamma: f64,
    /// Argmax of `|x^g - x|` on `[0, 1]`.
    pub d_max: f64,
    /// Maximum difference of contrasts, `|d_max^g - d_max|`.
    pub doc_max: f64,
    /// Scale factor normalizing the output to `[0, 1]`; `k * doc_max = 1`.
    pub k: f64,
    /// Secant slope of the ascending region, `doc_max / d_max` (infinite at gamma = 0).
    #[serde(with = "serde_slope")]
    pub m_plus: f64,
    /// Secant slope of the descending region, `-doc_max / (1 - d_max)`.
    #[serde(with = "serde_slope")]
    pub m_minus: f64,
    /// Area under the curve over the ascending interval `[0, d_max]`.
    pub r_plus: f64,
    /// Area under the curve over the descending interval `[d_max, 1]`.
    pub r_minus: f64,
}

/// JSON has no infinities; the gamma = 0 slope serializes as a string.
mod serde_slope {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Finite(*v).serialize(s)
        } else {
            Repr::Named(v.to_string()).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        Ok(match Repr::deserialize(d)? {
            Repr::Finite(v) => v,
            Repr::Named(name) => name.parse::<f64>().unwrap_or(f64::NAN),
        })
    }
}

fn check_unit(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{what} = {x} outside [0, 1]")));
    }
    Ok(())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(Error::Domain(format!("gamma = {gamma} must be nonnegative")));
    }
    Ok(())
}

/// `x^g` with the two identity conventions the rest of the crate relies on:
/// `g = 0` maps everything (including 0) to 1, and `g = 1` is exact.
#[inline]
pub(crate) fn pow_gamma(x: f64, gamma: f64) -> f64 {
    if gamma == 0.0 {
        1.0
    } else if gamma == 1.0 {
        x
    } else {
        x.powf(gamma)
    }
}

/// Pointwise gamma correction `x^g` on normalized intensities.
pub fn gamma_correct(x: f64, gamma: f64) -> Result<f64> {
    check_unit(x, "x")?;
    check_gamma(gamma)?;
    Ok(pow_gamma(x, gamma))
}

/// Unnormalized dichotomy value `|x^g - x|`.
///
/// The absolute value resolves to `x^g - x` for `g <= 1` and `x - x^g` for
/// `g > 1`; both forms are nonnegative on the unit interval, so this is also
/// the signed per-branch expression used by the derivative formulas.
pub fn dichotomy_eval(x: f64, gamma: f64) -> Result<f64> {
    check_unit(x, "x")?;
    check_gamma(gamma)?;
    Ok(eval_unchecked(x, gamma))
}

#[inline]
pub(crate) fn eval_unchecked(x: f64, gamma: f64) -> f64 {
    if gamma <= 1.0 {
        pow_gamma(x, gamma) - x
    } else {
        x - pow_gamma(x, gamma)
    }
}

/// Location of the contrast maximum: `d_max = g^(1/(1-g))`.
///
/// The closed form follows from `d/dx (x^g - x) = g x^(g-1) - 1 = 0`. It
/// covers `g = 0` (gives 0) and tends to `1/e` as `g -> 1`, but the limit
/// point itself is rejected because the curve degenerates there.
pub fn compute_d_max(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if gamma == 1.0 {
        return Err(Error::DegenerateGamma);
    }
    Ok(gamma.powf(1.0 / (1.0 - gamma)))
}

impl DichotomyParams {
    /// Full parameter set at the exact closed-form maximum.
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        let d_max = compute_d_max(gamma)?;
        Self::at_peak(gamma, d_max)
    }

    /// Parameter set evaluated at a caller-supplied peak location.
    ///
    /// Needed to reproduce published figures computed from a rounded
    /// `d_max`; with the exact argmax this is identical to `from_gamma`.
    pub fn at_peak(gamma: f64, d: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if gamma == 1.0 {
            return Err(Error::DegenerateGamma);
        }
        check_unit(d, "d")?;
        let doc_max = eval_unchecked(d, gamma);
        let m_plus = if d > 0.0 { doc_max / d } else { f64::INFINITY };
        let m_minus = if d < 1.0 {
            -doc_max / (1.0 - d)
        } else {
            f64::NEG_INFINITY
        };
        let (r_plus, r_minus) = region_integrals(gamma, d)?;
        Ok(Self {
            gamma,
            d_max: d,
            doc_max,
            k: 1.0 / doc_max,
            m_plus,
            m_minus,
            r_plus,
            r_minus,
        })
    }

    /// Branch owning the input sample `x`; the maximum itself is ascending.
    pub fn branch_of(&self, x: f64) -> Branch {
        if x <= self.d_max {
            Branch::Ascending
        } else {
            Branch::Descending
        }
    }

    /// Bracket `[a, b]` of the requested branch.
    pub(crate) fn bracket(&self, branch: Branch) -> (f64, f64) {
        match branch {
            Branch::Ascending => (0.0, self.d_max),
            Branch::Descending => (self.d_max, 1.0),
        }
    }
}

/// Normalized dichotomy value `k * |x^g - x|`, clamped into `[0, 1]` against
/// the one-ulp overshoot of `k * doc_max`.
pub fn dichotomy_normalized(x: f64, params: &DichotomyParams) -> Result<f64> {
    check_unit(x, "x")?;
    Ok(normalized_unchecked(x, params))
}

#[inline]
pub(crate) fn normalized_unchecked(x: f64, params: &DichotomyParams) -> f64 {
    (params.k * eval_unchecked(x, params.gamma)).min(1.0)
}

/// Analytic derivative of order `order` of the signed dichotomy function.
///
/// First order is `g x^(g-1) - 1` (negated for `g > 1`); higher orders drop
/// the linear term and reduce to the falling-factorial power derivative.
pub fn dichotomy_derivative(x: f64, gamma: f64, order: u32) -> Result<f64> {
    check_unit(x, "x")?;
    check_gamma(gamma)?;
    if gamma == 1.0 {
        return Err(Error::DegenerateGamma);
    }
    if order == 0 {
        return Err(Error::Domain("derivative order must be >= 1".into()));
    }
    let exponent = gamma - f64::from(order);
    let magnitude = if order == 1 {
        if x == 0.0 && exponent < 0.0 {
            return Err(Error::SingularPoint { gamma, order });
        }
        gamma * pow_gamma(x, gamma - 1.0) - 1.0
    } else {
        // Falling factorial g(g-1)...(g-order+1); zero whenever g is an
        // integer below `order`, in which case the power term is moot.
        let coeff: f64 = (0..order).map(|i| gamma - f64::from(i)).product();
        if coeff == 0.0 {
            0.0
        } else {
            if x == 0.0 && exponent < 0.0 {
                return Err(Error::SingularPoint { gamma, order });
            }
            coeff * pow_gamma(x, exponent)
        }
    };
    Ok(if gamma <= 1.0 { magnitude } else { -magnitude })
}

/// Forward finite-difference slope of the signed dichotomy function.
pub fn numeric_slope(x: f64, gamma: f64, delta: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if delta <= 0.0 {
        return Err(Error::Domain(format!("delta = {delta} must be positive")));
    }
    check_unit(x, "x")?;
    check_unit(x + delta, "x + delta")?;
    Ok((eval_unchecked(x + delta, gamma) - eval_unchecked(x, gamma)) / delta)
}

/// Areas under the dichotomy curve on `[0, d]` and `[d, 1]`, by exact
/// antiderivative: `int_0^x (t^g - t) dt = x^(g+1)/(g+1) - x^2/2`.
pub fn region_integrals(gamma: f64, d: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    if gamma == 1.0 {
        return Err(Error::DegenerateGamma);
    }
    check_unit(d, "d")?;
    let g1 = gamma + 1.0;
    let dg1 = pow_gamma(d, g1);
    let (r_plus, r_minus) = if gamma < 1.0 {
        (
            dg1 / g1 - d * d / 2.0,
            (1.0 - dg1) / g1 + (d * d - 1.0) / 2.0,
        )
    } else {
        (
            d * d / 2.0 - dg1 / g1,
            (1.0 - d * d) / 2.0 - (1.0 - dg1) / g1,
        )
    };
    Ok((r_plus, r_minus))
}
