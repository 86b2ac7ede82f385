//! Moment sequences of Hermitian elements under states, kept in the log
//! domain so indices up to several hundred stay representable. Provides
//! the balanced Hankel positivity test, growth diagnostics, Carleman
//! classification by closed form and by exponent fit, and the
//! zero-or-divergence dichotomy for twisted moment sequences.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Element, StarAlgebra};
use crate::error::Error;
use crate::gns::GnsData;
use crate::linalg;
use crate::sampling;
use crate::{Result, C64};

/// A sequence `t_n` stored as `(sign, log |t_n|)`; exact zeros carry
/// sign 0 and log negative infinity.
#[derive(Debug, Clone)]
pub struct MomentSequence {
    log_abs: Vec<f64>,
    signs: Vec<i8>,
}

impl MomentSequence {
    /// Largest available index.
    pub fn max_index(&self) -> usize {
        self.log_abs.len() - 1
    }

    pub fn log_abs(&self, n: usize) -> f64 {
        self.log_abs[n]
    }

    pub fn sign(&self, n: usize) -> i8 {
        self.signs[n]
    }

    /// The value itself; may overflow to infinity for large indices,
    /// which is why the log accessors exist.
    pub fn value(&self, n: usize) -> f64 {
        self.signs[n] as f64 * self.log_abs[n].exp()
    }

    /// `t_{2n}^(1/2n)`, the normalized even-moment root.
    pub fn normalized_root(&self, n: usize) -> f64 {
        assert!(n >= 1, "normalized roots start at index one");
        let l = self.log_abs[2 * n];
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            (l / (2.0 * n as f64)).exp()
        }
    }

    /// Hankel matrix rescaled by the even moments:
    /// entry `(i, j)` is `t_{i+j} / sqrt(t_{2i} t_{2j})`.
    ///
    /// The rescaling is a congruence, so positive semidefiniteness is
    /// preserved exactly while every entry stays in `[-1, 1]` for true
    /// moment sequences.
    pub fn balanced_hankel(&self, rows: usize) -> Result<DMatrix<f64>> {
        if 2 * (rows - 1) > self.max_index() {
            return Err(Error::invalid(format!(
                "balanced Hankel of size {rows} needs moments up to {}",
                2 * (rows - 1)
            )));
        }
        Ok(DMatrix::from_fn(rows, rows, |i, j| {
            let li = self.log_abs[2 * i];
            let lj = self.log_abs[2 * j];
            if li == f64::NEG_INFINITY || lj == f64::NEG_INFINITY {
                return 0.0;
            }
            let l = self.log_abs[i + j];
            if l == f64::NEG_INFINITY {
                return 0.0;
            }
            self.signs[i + j] as f64 * (l - 0.5 * (li + lj)).exp()
        }))
    }

    /// Smallest eigenvalue of the balanced Hankel matrix.
    pub fn hankel_min_eig(&self, rows: usize) -> Result<f64> {
        let h = self.balanced_hankel(rows)?;
        let hc = h.map(|x| C64::new(x, 0.0));
        Ok(linalg::min_eig(&hc))
    }

    /// Growth diagnostics of the even subsequence.
    pub fn growth_report(&self, op_norm: Option<f64>) -> GrowthReport {
        growth_from_logs(&self.log_abs, op_norm)
    }

    /// Exponent fit of the even subsequence; see [`exponent_fit`].
    pub fn carleman_fit(&self) -> CarlemanFit {
        exponent_fit(&self.log_abs)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrowthReport {
    /// Number of leading even moments that are strictly positive.
    pub usable_pairs: usize,
    pub min_root_slack: f64,
    pub roots_nondecreasing: bool,
    pub min_convexity_slack: f64,
    pub log_convex: bool,
    pub max_root: f64,
    /// Whether every root stays below the operator norm, when one was given.
    pub roots_below_norm: Option<bool>,
}

/// Growth diagnostics over a raw log-moment vector, `log_abs[n]` being
/// the natural log of the n-th moment. Entries past the first
/// nonpositive even moment are ignored.
pub fn growth_from_logs(log_abs: &[f64], op_norm: Option<f64>) -> GrowthReport {
    let k_max = log_abs.len().saturating_sub(1) / 2;
    let mut min_root_slack = f64::INFINITY;
    let mut min_convexity_slack = f64::INFINITY;
    let mut max_root = 0.0f64;
    let mut usable = 0usize;
    for k in 1..=k_max {
        if log_abs[2 * k] == f64::NEG_INFINITY {
            break;
        }
        usable = k;
    }
    for k in 1..usable {
        // roots must not decrease: log t_{2k} / 2k <= log t_{2k+2} / (2k+2)
        let slack = log_abs[2 * k + 2] / (2.0 * k as f64 + 2.0)
            - log_abs[2 * k] / (2.0 * k as f64);
        min_root_slack = min_root_slack.min(slack);
    }
    for k in 1..usable {
        // even moments are log-convex
        let slack =
            log_abs[2 * k - 2] + log_abs[2 * k + 2] - 2.0 * log_abs[2 * k];
        min_convexity_slack = min_convexity_slack.min(slack);
    }
    for k in 1..=usable {
        max_root = max_root.max((log_abs[2 * k] / (2.0 * k as f64)).exp());
    }
    let roots_below_norm = op_norm.map(|nm| max_root <= nm * (1.0 + 1e-9) + 1e-12);
    GrowthReport {
        usable_pairs: usable,
        min_root_slack,
        roots_nondecreasing: min_root_slack >= -1e-10,
        min_convexity_slack,
        log_convex: min_convexity_slack >= -1e-10,
        max_root,
        roots_below_norm,
    }
}

/// Moments `t_n = w(a^n)` of a Hermitian element under the functional
/// behind `gns`, up to index `max_n`.
pub fn moment_sequence(gns: &GnsData, a: &Element, max_n: usize) -> Result<MomentSequence> {
    let r = hermitian_rep(gns, a)?;
    log_quadratic_moments(&r, gns.cyclic_vector(), max_n)
}

/// Twisted moments `t_n = w(b* a^n b)`.
pub fn twisted_moment_sequence(
    gns: &GnsData,
    a: &Element,
    b: &Element,
    max_n: usize,
) -> Result<MomentSequence> {
    let r = hermitian_rep(gns, a)?;
    let u = gns.vector_of(b)?;
    log_quadratic_moments(&r, &u, max_n)
}

fn hermitian_rep(gns: &GnsData, a: &Element) -> Result<DMatrix<C64>> {
    let r = gns.represent(a)?;
    if linalg::hermitian_defect(&r) > 1e-8 * (1.0 + r.norm()) {
        return Err(Error::invalid(
            "moment sequences are defined for Hermitian elements",
        ));
    }
    Ok(linalg::hermitize(&r))
}

/// `t_n = u^H R^n u` for Hermitian `R`, computed by a normalized power
/// iteration with the scale carried separately as a log:
/// even entries are `|R^k u|^2`, odd entries insert one extra factor.
fn log_quadratic_moments(
    r: &DMatrix<C64>,
    u: &DVector<C64>,
    max_n: usize,
) -> Result<MomentSequence> {
    let mut log_abs = vec![f64::NEG_INFINITY; max_n + 1];
    let mut signs = vec![0i8; max_n + 1];
    let n0 = u.norm();
    if n0 <= 0.0 {
        return Ok(MomentSequence { log_abs, signs });
    }
    let mut log_scale = n0.ln();
    let mut unit = u / C64::new(n0, 0.0);
    log_abs[0] = 2.0 * log_scale;
    signs[0] = 1;

    let mut k = 1usize;
    while 2 * k - 1 <= max_n {
        let image = r * &unit;
        // odd entry uses the current unit vector
        let q = unit.dotc(&image).re;
        if q != 0.0 {
            log_abs[2 * k - 1] = 2.0 * log_scale + q.abs().ln();
            signs[2 * k - 1] = if q > 0.0 { 1 } else { -1 };
        }
        if 2 * k > max_n {
            break;
        }
        let nw = image.norm();
        if nw <= 0.0 {
            break;
        }
        log_scale += nw.ln();
        unit = image / C64::new(nw, 0.0);
        log_abs[2 * k] = 2.0 * log_scale;
        signs[2 * k] = 1;
        k += 1;
    }
    Ok(MomentSequence { log_abs, signs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarlemanVerdict {
    /// The Carleman series diverges: the moment problem is determinate.
    Divergent,
    /// The Carleman series converges; determinacy is not implied.
    Convergent,
    Inconclusive,
}

/// Least-squares fit of `log t_n = (alpha/2) n ln n + beta n + gamma`
/// over the even indices in the upper half of the sequence.
#[derive(Debug, Clone, Copy)]
pub struct CarlemanFit {
    /// Growth exponent normalized so that the Stieltjes boundary sits at two.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub points: usize,
    pub verdict: CarlemanVerdict,
}

/// Dead band around the boundary exponent inside which the fit refuses
/// to classify.
const FIT_DEAD_BAND: f64 = 0.05;

/// Minimum number of fit points for a classification.
const FIT_MIN_POINTS: usize = 16;

pub fn exponent_fit(log_moments: &[f64]) -> CarlemanFit {
    let top = log_moments.len().saturating_sub(1);
    let mut rows: Vec<(f64, f64, f64)> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut n = 2usize;
    while n <= top {
        if n > top / 2 && log_moments[n].is_finite() {
            let nf = n as f64;
            rows.push((nf * nf.ln(), nf, 1.0));
            ys.push(log_moments[n]);
        }
        n += 2;
    }
    let points = rows.len();
    if points < 3 {
        return CarlemanFit {
            alpha: f64::NAN,
            beta: f64::NAN,
            gamma: f64::NAN,
            points,
            verdict: CarlemanVerdict::Inconclusive,
        };
    }
    let x = DMatrix::from_fn(points, 3, |i, j| match j {
        0 => rows[i].0,
        1 => rows[i].1,
        _ => rows[i].2,
    });
    let y = DVector::from_vec(ys);
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * y;
    let Some(coef) = xtx.lu().solve(&xty) else {
        return CarlemanFit {
            alpha: f64::NAN,
            beta: f64::NAN,
            gamma: f64::NAN,
            points,
            verdict: CarlemanVerdict::Inconclusive,
        };
    };
    let alpha = 2.0 * coef[0];
    let verdict = if points < FIT_MIN_POINTS {
        CarlemanVerdict::Inconclusive
    } else if alpha <= 2.0 - FIT_DEAD_BAND {
        CarlemanVerdict::Divergent
    } else if alpha >= 2.0 + FIT_DEAD_BAND {
        CarlemanVerdict::Convergent
    } else {
        CarlemanVerdict::Inconclusive
    };
    CarlemanFit {
        alpha,
        beta: coef[1],
        gamma: coef[2],
        points,
        verdict,
    }
}

/// Closed-form moment growth families used as references.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentFamily {
    /// `t_n = n!`
    Factorial,
    /// `t_n = exp(sigma^2 n^2 / 2)`, `sigma > 0`
    LogNormal { sigma: f64 },
    /// `t_n = ratio^n`, `ratio > 0`
    Geometric { ratio: f64 },
    /// `t_n = n^(exponent * n / 2)`
    Power { exponent: f64 },
}

impl MomentFamily {
    pub fn log_moments(&self, count: usize) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(count + 1);
        match *self {
            MomentFamily::Factorial => {
                let mut acc = 0.0f64;
                out.push(0.0);
                for n in 1..=count {
                    acc += (n as f64).ln();
                    out.push(acc);
                }
            }
            MomentFamily::LogNormal { sigma } => {
                if sigma <= 0.0 {
                    return Err(Error::invalid("log-normal width must be positive"));
                }
                for n in 0..=count {
                    let nf = n as f64;
                    out.push(0.5 * sigma * sigma * nf * nf);
                }
            }
            MomentFamily::Geometric { ratio } => {
                if ratio <= 0.0 {
                    return Err(Error::invalid("geometric ratio must be positive"));
                }
                for n in 0..=count {
                    out.push(n as f64 * ratio.ln());
                }
            }
            MomentFamily::Power { exponent } => {
                if exponent <= 0.0 {
                    return Err(Error::invalid("power exponent must be positive"));
                }
                out.push(0.0);
                for n in 1..=count {
                    let nf = n as f64;
                    out.push(0.5 * exponent * nf * nf.ln());
                }
            }
        }
        Ok(out)
    }

    /// Carleman classification from the closed form of the family.
    pub fn closed_form_carleman(&self) -> CarlemanVerdict {
        match *self {
            MomentFamily::Factorial => CarlemanVerdict::Divergent,
            MomentFamily::LogNormal { .. } => CarlemanVerdict::Convergent,
            MomentFamily::Geometric { .. } => CarlemanVerdict::Divergent,
            MomentFamily::Power { exponent } => {
                if exponent <= 2.0 {
                    CarlemanVerdict::Divergent
                } else {
                    CarlemanVerdict::Convergent
                }
            }
        }
    }
}

/// Which side of the zero-or-divergence dichotomy a twisted sequence
/// landed on.
#[derive(Debug, Clone, Copy)]
pub enum StieltjesBranch {
    /// The element annihilates the cyclic vector: expectation and
    /// variance vanish, and with them every higher moment.
    Zero { expectation: f64, variance: f64 },
    /// The inverse-root terms are bounded below, so their series
    /// diverges.
    Divergence { min_term: f64, lower_bound: f64 },
}

#[derive(Debug, Clone)]
pub struct StieltjesReport {
    pub branch: StieltjesBranch,
    /// Worst slack of `t_n <= sqrt(t_0 t_2n)` over samples, in log scale.
    pub self_bound_slack: f64,
    pub self_bound_ok: bool,
    /// Worst slack of the cross bound through the state moments.
    pub cross_bound_slack: f64,
    pub cross_bound_ok: bool,
    /// Worst slack of the even-tail comparison of inverse roots.
    pub tail_slack: f64,
    pub tail_ok: bool,
    pub sampled: usize,
}

/// Verifies the zero-or-divergence dichotomy for `a` under the state
/// behind `gns`: either `a` annihilates the cyclic vector, or the
/// inverse-root series of every twisted moment sequence diverges
/// because its terms are bounded below by the inverse square root of
/// the operator norm. The supporting inequalities are checked for
/// `samples` perturbations `b`.
pub fn stieltjes_check(
    gns: &GnsData,
    alg: &StarAlgebra,
    a: &Element,
    max_n: usize,
    samples: usize,
    seed: u64,
) -> Result<StieltjesReport> {
    let r = hermitian_rep(gns, a)?;
    let op_norm = linalg::spectral_norm(&r);
    let min_eig = linalg::min_eig(&r);
    if min_eig < -1e-8 * (1.0 + op_norm) {
        return Err(Error::invalid(format!(
            "the dichotomy needs a positive element; representation has eigenvalue {min_eig:.3e}"
        )));
    }
    if max_n < 6 || max_n % 2 != 0 {
        return Err(Error::invalid("max_n must be even and at least 6"));
    }

    let cyc = gns.cyclic_vector();
    let moved = &r * cyc;
    if moved.norm() <= 1e-8 * (1.0 + op_norm) * (1.0 + cyc.norm()) {
        let m = log_quadratic_moments(&r, cyc, 2)?;
        let expectation = m.value(1);
        let variance = m.value(2) - expectation * expectation;
        return Ok(StieltjesReport {
            branch: StieltjesBranch::Zero {
                expectation,
                variance,
            },
            self_bound_slack: f64::INFINITY,
            self_bound_ok: true,
            cross_bound_slack: f64::INFINITY,
            cross_bound_ok: true,
            tail_slack: f64::INFINITY,
            tail_ok: true,
            sampled: 0,
        });
    }

    let state_moments = log_quadratic_moments(&r, cyc, max_n)?;
    let mass = state_moments.value(0);
    if (mass - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(
            "the dichotomy check expects a unit-mass functional",
        ));
    }

    // perturbations: the unit first, then seeded random elements with
    // w(b* b) = 1
    let mut rng = sampling::rng_for(seed, 0x57e);
    let mut perturbations: Vec<Element> = vec![alg.unit()];
    while perturbations.len() < samples {
        let b = sampling::random_element(alg, &mut rng, 1.0);
        let u = gns.vector_of(&b)?;
        let nu = u.norm();
        if nu > 1e-6 {
            perturbations.push(b.scale(C64::new(1.0 / nu, 0.0)));
        }
    }

    let mut min_term = f64::INFINITY;
    let mut self_slack = f64::INFINITY;
    let mut cross_slack = f64::INFINITY;
    let mut tail_slack = f64::INFINITY;

    for b in &perturbations {
        let t = twisted_moment_sequence(gns, a, b, max_n)?;
        // w((b*b)^2) enters the cross bound
        let bb = alg.multiply(&alg.star(b)?, b)?;
        let bb2 = alg.multiply(&bb, &bb)?;
        let q4 = gns.recover(&bb2)?.re.max(0.0);
        let log_q4 = if q4 > 0.0 { q4.ln() } else { f64::NEG_INFINITY };

        // usable range: indices up to the last strictly positive entry
        let mut last = 0usize;
        for n in 1..=max_n {
            if t.sign(n) > 0 {
                last = n;
            } else {
                break;
            }
        }
        if last < 4 {
            continue;
        }

        for n in 1..=(last / 2) {
            let nf = n as f64;
            let lhs = t.log_abs(n) / (2.0 * nf);
            self_slack = self_slack.min(t.log_abs(2 * n) / (4.0 * nf) - lhs);
            if state_moments.sign(2 * n) > 0 {
                cross_slack = cross_slack
                    .min((log_q4 + state_moments.log_abs(2 * n)) / (4.0 * nf) - lhs);
            }
        }

        let inv_root = |n: usize| (-t.log_abs(n) / (2.0 * n as f64)).exp();
        for n in 1..=last {
            min_term = min_term.min(inv_root(n));
        }
        // even tail bound: sum of even terms controls half the full sum
        let big_n = (last - 1) / 2;
        if big_n >= 1 {
            let lhs: f64 = (1..=big_n).map(|n| inv_root(2 * n)).sum();
            let rhs: f64 = (2..=(2 * big_n + 1)).map(inv_root).sum::<f64>() * 0.5;
            tail_slack = tail_slack.min(lhs - rhs);
        }
    }

    let lower_bound = if op_norm > 0.0 {
        op_norm.powf(-0.5)
    } else {
        f64::INFINITY
    };
    Ok(StieltjesReport {
        branch: StieltjesBranch::Divergence {
            min_term,
            lower_bound,
        },
        self_bound_slack: self_slack,
        self_bound_ok: self_slack >= -1e-9,
        cross_bound_slack: cross_slack,
        cross_bound_ok: cross_slack >= -1e-9,
        tail_slack,
        tail_ok: tail_slack >= -1e-10,
        sampled: perturbations.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::Functional;

    fn two_point_setup() -> (StarAlgebra, GnsData, Element) {
        // state (1/2, 1/2) on two points, observable (2, 1)
        let alg = StarAlgebra::pointwise(2);
        let w = Functional::from_real_basis_values(&[0.5, 0.5]);
        let gns = GnsData::build(&alg, &w).unwrap();
        let a = Element::from_reals(&[2.0, 1.0]);
        (alg, gns, a)
    }

    #[test]
    fn moments_match_direct_powers() {
        let (_alg, gns, a) = two_point_setup();
        let m = moment_sequence(&gns, &a, 16).unwrap();
        for n in 0..=16u32 {
            // t_n = (2^n + 1) / 2
            let expected = 0.5 * (2f64.powi(n as i32) + 1.0);
            assert!(
                (m.value(n as usize) - expected).abs() < 1e-9 * expected,
                "moment {n}"
            );
        }
    }

    #[test]
    fn deep_moments_stay_finite_in_log_scale() {
        let (_alg, gns, a) = two_point_setup();
        let m = moment_sequence(&gns, &a, 256).unwrap();
        // log t_256 = 255 log 2 + log(1/2 (2 + 2^-255)) ~ 256 log 2 - log 2
        let expected = 255.0 * 2f64.ln();
        assert!((m.log_abs(256) - expected).abs() < 1e-9);
        assert_eq!(m.sign(256), 1);
        // roots climb towards the top of the spectrum
        assert!((m.normalized_root(128) - 2.0).abs() < 0.01);
    }

    #[test]
    fn balanced_hankel_is_psd_with_unit_diagonal() {
        let (_alg, gns, a) = two_point_setup();
        let m = moment_sequence(&gns, &a, 64).unwrap();
        let h = m.balanced_hankel(17).unwrap();
        for i in 0..17 {
            assert!((h[(i, i)] - 1.0).abs() < 1e-12);
        }
        assert!(m.hankel_min_eig(17).unwrap() >= -1e-10);
    }

    #[test]
    fn growth_report_on_two_point_state() {
        let (_alg, gns, a) = two_point_setup();
        let m = moment_sequence(&gns, &a, 128).unwrap();
        let g = m.growth_report(Some(2.0));
        assert!(g.roots_nondecreasing, "slack {}", g.min_root_slack);
        assert!(g.log_convex, "slack {}", g.min_convexity_slack);
        assert_eq!(g.roots_below_norm, Some(true));
        assert_eq!(g.usable_pairs, 64);
    }

    #[test]
    fn nilpotent_moments_terminate() {
        // x on C[x]/(x^3) under evaluation of the constant term
        let alg = StarAlgebra::poly_trunc(2);
        let w = Functional::from_real_basis_values(&[1.0, 0.0, 0.0]);
        let gns = GnsData::build(&alg, &w).unwrap();
        let x = Element::from_reals(&[0.0, 1.0, 0.0]);
        let m = moment_sequence(&gns, &x, 16).unwrap();
        assert_eq!(m.sign(0), 1);
        for n in 1..=16 {
            assert_eq!(m.sign(n), 0, "index {n}");
            assert_eq!(m.log_abs(n), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn exponent_fit_separates_families() {
        let count = 256;
        let fac = MomentFamily::Factorial.log_moments(count).unwrap();
        let ln = MomentFamily::LogNormal { sigma: 1.0 }
            .log_moments(count)
            .unwrap();
        let geo = MomentFamily::Geometric { ratio: 3.0 }
            .log_moments(count)
            .unwrap();
        let p1 = MomentFamily::Power { exponent: 1.0 }
            .log_moments(count)
            .unwrap();
        let p3 = MomentFamily::Power { exponent: 3.0 }
            .log_moments(count)
            .unwrap();

        // factorial sits exactly on the boundary: the fit must not
        // claim convergence, the closed form knows it diverges
        let f = exponent_fit(&fac);
        assert!((f.alpha - 2.0).abs() < FIT_DEAD_BAND);
        assert_ne!(f.verdict, CarlemanVerdict::Convergent);
        assert_eq!(
            MomentFamily::Factorial.closed_form_carleman(),
            CarlemanVerdict::Divergent
        );

        assert_eq!(exponent_fit(&ln).verdict, CarlemanVerdict::Convergent);
        assert_eq!(exponent_fit(&geo).verdict, CarlemanVerdict::Divergent);
        assert_eq!(exponent_fit(&p1).verdict, CarlemanVerdict::Divergent);
        assert_eq!(exponent_fit(&p3).verdict, CarlemanVerdict::Convergent);
        assert_eq!(
            MomentFamily::Power { exponent: 2.0 }.closed_form_carleman(),
            CarlemanVerdict::Divergent
        );
    }

    #[test]
    fn fit_alpha_tracks_power_exponent() {
        let logs = MomentFamily::Power { exponent: 1.0 }
            .log_moments(256)
            .unwrap();
        let fit = exponent_fit(&logs);
        assert!((fit.alpha - 1.0).abs() < 1e-6, "alpha {}", fit.alpha);
        assert!(fit.points >= FIT_MIN_POINTS);
    }

    #[test]
    fn short_sequences_are_inconclusive() {
        let logs = MomentFamily::Geometric { ratio: 2.0 }
            .log_moments(20)
            .unwrap();
        let fit = exponent_fit(&logs);
        assert!(fit.points < FIT_MIN_POINTS);
        assert_eq!(fit.verdict, CarlemanVerdict::Inconclusive);
    }

    #[test]
    fn dichotomy_zero_branch() {
        // x^2 on C[x]/(x^3) annihilates the cyclic vector of the
        // constant-term state
        let alg = StarAlgebra::poly_trunc(2);
        let w = Functional::from_real_basis_values(&[1.0, 0.0, 0.0]);
        let gns = GnsData::build(&alg, &w).unwrap();
        let x2 = Element::from_reals(&[0.0, 0.0, 1.0]);
        let report = stieltjes_check(&gns, &alg, &x2, 32, 4, 7).unwrap();
        match report.branch {
            StieltjesBranch::Zero {
                expectation,
                variance,
            } => {
                assert!(expectation.abs() < 1e-12);
                assert!(variance.abs() < 1e-12);
            }
            StieltjesBranch::Divergence { .. } => panic!("expected the zero branch"),
        }
    }

    #[test]
    fn dichotomy_divergence_branch() {
        let (alg, gns, a) = two_point_setup();
        let report = stieltjes_check(&gns, &alg, &a, 64, 6, 11).unwrap();
        match report.branch {
            StieltjesBranch::Divergence {
                min_term,
                lower_bound,
            } => {
                assert!(min_term >= lower_bound * (1.0 - 1e-9));
            }
            StieltjesBranch::Zero { .. } => panic!("expected the divergence branch"),
        }
        assert!(report.self_bound_ok, "slack {}", report.self_bound_slack);
        assert!(report.cross_bound_ok, "slack {}", report.cross_bound_slack);
        assert!(report.tail_ok, "slack {}", report.tail_slack);
        assert_eq!(report.sampled, 6);
    }

    #[test]
    fn negative_element_is_rejected() {
        let (alg, gns, _a) = two_point_setup();
        let neg = Element::from_reals(&[1.0, -1.0]);
        assert!(matches!(
            stieltjes_check(&gns, &alg, &neg, 32, 4, 3),
            Err(Error::InvalidInput(_))
        ));
    }
}
