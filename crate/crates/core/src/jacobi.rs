//! Three-term recurrence coefficients of orthogonal polynomials from raw
//! moments. The kernel runs over exact rationals: the moment-to-recurrence
//! map loses roughly two digits per step in floating point, which is fatal
//! well before a dozen coefficient pairs, while exact arithmetic keeps the
//! map an identity on rational inputs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::Result;

/// Monic three-term recurrence data: `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`.
///
/// `alpha` holds the diagonal coefficients starting at degree zero and
/// `beta` the off-diagonal ones starting at `beta_1`, so `beta.len()` is
/// one less than `alpha.len()`. A measure supported on `m` points yields
/// exactly `m` diagonal entries; asking for more sets `truncated`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiData {
    /// Total mass of the underlying functional, the zeroth moment.
    pub mass: BigRational,
    pub alpha: Vec<BigRational>,
    pub beta: Vec<BigRational>,
    /// Whether the recurrence stopped early because a polynomial norm
    /// vanished (or collapsed below the exactness guard).
    pub truncated: bool,
}

impl JacobiData {
    pub fn pairs(&self) -> usize {
        self.alpha.len()
    }

    /// Diagonal coefficients as floats; entries out of the double range
    /// come back as NaN.
    pub fn alpha_f64(&self) -> Vec<f64> {
        self.alpha
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn beta_f64(&self) -> Vec<f64> {
        self.beta
            .iter()
            .map(|v| v.to_f64().unwrap_or(f64::NAN))
            .collect()
    }
}

/// Ratio below which a squared polynomial norm counts as a numerical
/// zero relative to its predecessor. Exact inputs hit exact zeros, so
/// this only matters for moments that went through floating point.
fn truncation_guard() -> BigRational {
    BigRational::new(BigInt::from(1), BigInt::from(10u8).pow(20))
}

/// Computes `pairs` recurrence coefficient pairs from the moments
/// `t_0, t_1, ...`, which must contain at least `2 * pairs` entries.
///
/// Fails if the moments are not a positive sequence; stops early with
/// `truncated` set when the measure has fewer atoms than requested.
pub fn jacobi_from_moments(moments: &[BigRational], pairs: usize) -> Result<JacobiData> {
    if pairs == 0 {
        return Err(Error::invalid("at least one recurrence pair is required"));
    }
    if moments.len() < 2 * pairs {
        return Err(Error::invalid(format!(
            "{pairs} recurrence pairs need {} moments, got {}",
            2 * pairs,
            moments.len()
        )));
    }
    let mu0 = moments[0].clone();
    if !mu0.is_positive() {
        return Err(Error::invalid("zeroth moment must be positive"));
    }

    let width = 2 * pairs;
    let zero = BigRational::zero();
    let guard = truncation_guard();

    // rows of mixed products <p_k, x^l>; row k is valid for l in k..width-k
    let mut prev: Vec<BigRational> = vec![zero.clone(); width + 1];
    let mut curr: Vec<BigRational> = moments[..width].to_vec();
    curr.push(zero.clone());
    let mut alpha = vec![moments[1].clone() / mu0.clone()];
    let mut beta: Vec<BigRational> = Vec::new();
    let mut truncated = false;

    for k in 1..pairs {
        let mut next = vec![zero.clone(); width + 1];
        let a_prev = alpha[k - 1].clone();
        let b_prev = if k >= 2 {
            beta[k - 2].clone()
        } else {
            zero.clone()
        };
        for l in k..=(width - 1 - k) {
            let mut v = curr[l + 1].clone() - a_prev.clone() * curr[l].clone();
            if k >= 2 {
                v -= b_prev.clone() * prev[l].clone();
            }
            next[l] = v;
        }
        let n2 = next[k].clone();
        let n2_prev = curr[k - 1].clone();
        if n2.is_negative() {
            return Err(Error::invalid(format!(
                "moments are not a positive sequence: squared norm at degree {k} is negative"
            )));
        }
        if n2.is_zero() || n2.clone() < guard.clone() * n2_prev.clone() {
            truncated = true;
            break;
        }
        beta.push(n2.clone() / n2_prev.clone());
        alpha.push(next[k + 1].clone() / n2.clone() - curr[k].clone() / n2_prev.clone());
        prev = curr;
        curr = next;
    }

    Ok(JacobiData {
        mass: mu0,
        alpha,
        beta,
        truncated,
    })
}

/// Exact conversion of float moments; rejects non-finite entries.
pub fn rationals_from_f64(values: &[f64]) -> Result<Vec<BigRational>> {
    values
        .iter()
        .map(|&v| {
            BigRational::from_float(v)
                .ok_or_else(|| Error::invalid(format!("moment {v} is not a finite number")))
        })
        .collect()
}

/// The factorial moments `t_n = n!` for `n` below `len`.
pub fn exact_factorials(len: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(len);
    let mut acc = BigInt::from(1);
    for n in 0..len {
        if n > 0 {
            acc *= BigInt::from(n);
        }
        out.push(BigRational::from_integer(acc.clone()));
    }
    out
}

/// Evaluates the orthonormal polynomials `p_0, ..., p_{count-1}` at `x`
/// from recurrence data (normalized against the probability rescaling
/// of the measure, so `p_0 = 1`).
pub fn orthonormal_eval(alpha: &[f64], beta: &[f64], x: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > alpha.len() || count > beta.len() + 1 {
        return Err(Error::invalid(format!(
            "evaluating {count} polynomials needs {count} diagonal and {} off-diagonal coefficients",
            count.saturating_sub(1)
        )));
    }
    if beta.iter().take(count - 1).any(|&b| b <= 0.0) {
        return Err(Error::invalid(
            "off-diagonal recurrence coefficients must be positive",
        ));
    }
    let b: Vec<f64> = beta.iter().take(count - 1).map(|v| v.sqrt()).collect();
    let mut out = Vec::with_capacity(count);
    out.push(1.0);
    if count == 1 {
        return Ok(out);
    }
    out.push((x - alpha[0]) / b[0]);
    for k in 1..count - 1 {
        let p = ((x - alpha[k]) * out[k] - b[k - 1] * out[k - 1]) / b[k];
        out.push(p);
    }
    Ok(out)
}
