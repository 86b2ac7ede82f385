//! Enumeration of multiplicative functionals (characters) and their
//! classification against a cone: which of them are states.
//!
//! Two complete backends cover the supported algebras. On an algebra
//! with declared block structure the characters are exactly the
//! evaluations at the one-dimensional blocks, because a full matrix
//! block of size two or more is simple and noncommutative, so every
//! homomorphism to the complex numbers kills it. On a commutative
//! algebra without block metadata the characters are recovered as the
//! joint left eigenvectors of the transposed multiplication operators,
//! split by a generic random element and verified by a full
//! multiplicativity test.

use nalgebra::{DMatrix, DVector};

use crate::algebra::StarAlgebra;
use crate::cone::ConeModel;
use crate::error::Error;
use crate::functional::{Functional, State};
use crate::linalg;
use crate::sampling;
use crate::{Result, C64};

/// Acceptance threshold for the multiplicativity defect of a candidate.
const MULT_TOL: f64 = 1e-8;

/// Relative width used when clustering eigenvalues of the splitting
/// operator.
const CLUSTER_TOL: f64 = 1e-6;

/// Number of random splitting elements tried before giving up on a
/// cluster whose kernel stays multidimensional.
const MAX_ATTEMPTS: usize = 5;

/// Result of a character enumeration.
#[derive(Debug)]
pub struct CharacterEnumeration {
    /// Characters that are positive for the cone, normalized to states
    /// and sorted by their chart coordinates.
    pub states: Vec<State>,
    /// Multiplicative functionals that are not positive (or not even
    /// Hermitian) for the cone.
    pub non_positive: Vec<Functional>,
    /// True when some eigenvalue cluster kept a multidimensional kernel
    /// through all retries; the enumeration may then be incomplete.
    pub degenerate: bool,
}

/// Worst relative failure of `w(b_i x) = w(b_i) w(x)` over the basis.
pub fn multiplicativity_defect(alg: &StarAlgebra, w: &Functional) -> Result<f64> {
    if w.dim() != alg.dim() {
        return Err(Error::dim("functional dimension mismatch"));
    }
    let wv = w.covector();
    let mut worst = 0.0f64;
    for i in 0..alg.dim() {
        let li = alg.left_basis_matrix(i);
        let lhs = li.transpose() * wv;
        let rhs = wv * wv[i];
        let defect = (lhs - rhs).norm() / (1.0 + li.norm() * wv.norm());
        worst = worst.max(defect);
    }
    Ok(worst)
}

/// Enumerates the characters of the cone's algebra and classifies them
/// against the cone. Deterministic for a fixed seed.
pub fn enumerate_characters(cone: &ConeModel, seed: u64) -> Result<CharacterEnumeration> {
    let alg = cone.algebra();
    let (raw, degenerate) = if alg.block_sizes().is_some() {
        (block_characters(alg), false)
    } else if alg.is_commutative() {
        eigenvector_characters(alg, seed)?
    } else {
        return Err(Error::capability(
            "character enumeration needs a commutative algebra or declared block structure",
        ));
    };

    // dedup, then split into states and the rest
    let mut unique: Vec<Functional> = Vec::new();
    for w in raw {
        if !unique
            .iter()
            .any(|u| u.distance(&w) <= 1e-8 * (1.0 + w.norm()))
        {
            unique.push(w);
        }
    }

    let mut with_coords: Vec<(DVector<f64>, State)> = Vec::new();
    let mut non_positive: Vec<Functional> = Vec::new();
    for w in unique {
        if w.is_hermitian(alg)? && cone.functional_report(&w)?.positive {
            let state = cone.state(&w)?;
            let coords = state.functional().real_coords(alg)?;
            with_coords.push((coords, state));
        } else {
            non_positive.push(w);
        }
    }
    with_coords.sort_by(|a, b| lex_f64(&a.0, &b.0));
    non_positive.sort_by(|a, b| {
        for (x, y) in a.covector().iter().zip(b.covector().iter()) {
            let ord = (x.re, x.im)
                .partial_cmp(&(y.re, y.im))
                .unwrap_or(std::cmp::Ordering::Equal);
            if ord != std::cmp::Ordering::Equal {
                return ord;
            }
        }
        std::cmp::Ordering::Equal
    });

    Ok(CharacterEnumeration {
        states: with_coords.into_iter().map(|(_, s)| s).collect(),
        non_positive,
        degenerate,
    })
}

fn lex_f64(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(ord) => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// Evaluations at the one-by-one blocks.
fn block_characters(alg: &StarAlgebra) -> Vec<Functional> {
    let sizes = alg.block_sizes().expect("caller checked");
    let mut out = Vec::new();
    let mut off = 0;
    for &n in sizes {
        if n == 1 {
            let mut v = DVector::<C64>::zeros(alg.dim());
            v[off] = C64::new(1.0, 0.0);
            out.push(Functional::from_covector(v));
        }
        off += n * n;
    }
    out
}

/// Characters of a commutative algebra as joint left eigenvectors.
fn eigenvector_characters(alg: &StarAlgebra, seed: u64) -> Result<(Vec<Functional>, bool)> {
    let d = alg.dim();
    let unit = alg.unit();
    let mut rng = sampling::rng_for(seed, 0xc4a);
    let mut best: Option<Vec<Functional>> = None;

    'attempt: for _ in 0..MAX_ATTEMPTS {
        let coeffs = sampling::uniform_vector(&mut rng, d, -2.0, 2.0);
        let splitter = alg.element_from_real_coords(&coeffs)?;
        let t = alg.left_mult_matrix(&splitter).transpose();
        let Some(mut eigs) = linalg::complex_eigenvalues(&t) else {
            continue 'attempt;
        };
        eigs.sort_by(|a, b| {
            (a.re, a.im)
                .partial_cmp(&(b.re, b.im))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let scale = eigs.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let width = CLUSTER_TOL * scale;
        let mut clusters: Vec<C64> = Vec::new();
        for e in eigs {
            match clusters.last() {
                Some(&last) if (e - last).norm() <= width => {}
                _ => clusters.push(e),
            }
        }

        let mut found: Vec<Functional> = Vec::new();
        for lambda in clusters {
            let shifted = &t - DMatrix::<C64>::identity(d, d) * lambda;
            let kernel = linalg::nullspace(&shifted, 1e-8);
            match kernel.len() {
                1 => {
                    let w = Functional::from_covector(kernel[0].clone());
                    let mass = w.apply(&unit)?;
                    if mass.norm() <= 1e-8 * w.norm().max(1.0) {
                        continue;
                    }
                    let normalized = w.scale(C64::new(1.0, 0.0) / mass);
                    if multiplicativity_defect(alg, &normalized)? <= MULT_TOL {
                        found.push(normalized);
                    }
                }
                0 => {
                    // an eigenvalue whose kernel evaporated under the
                    // rank cut: split again with a fresh element
                    best = pick_larger(best, found);
                    continue 'attempt;
                }
                _ => {
                    best = pick_larger(best, found);
                    continue 'attempt;
                }
            }
        }
        return Ok((found, false));
    }
    Ok((best.unwrap_or_default(), true))
}

fn pick_larger(best: Option<Vec<Functional>>, candidate: Vec<Functional>) -> Option<Vec<Functional>> {
    match best {
        Some(b) if b.len() >= candidate.len() => Some(b),
        _ => Some(candidate),
    }
}
