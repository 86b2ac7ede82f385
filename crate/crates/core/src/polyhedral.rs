//! Polyhedral cone computations over real coordinates: extreme rays of
//! halfspace intersections by double description, and conic membership
//! by non-negative least squares.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::linalg;
use crate::Result;

/// Threshold for treating a normalized inner product as active (zero).
const ACTIVE_TOL: f64 = 1e-9;

/// Hard cap on intermediate ray counts; beyond this the instance is
/// declared out of reach rather than ground on.
const RAY_CAP: usize = 10_000;

/// V-representation of a polyhedral cone: an orthonormal basis of its
/// lineality space plus unit extreme rays of the pointed quotient.
#[derive(Debug, Clone)]
pub struct RaySystem {
    pub lineality: Vec<DVector<f64>>,
    pub rays: Vec<DVector<f64>>,
}

impl RaySystem {
    /// Dimension of the ambient space.
    pub fn dim(&self) -> usize {
        self.lineality
            .first()
            .or_else(|| self.rays.first())
            .map(|v| v.len())
            .unwrap_or(0)
    }

    /// Whether the cone is pointed (contains no line).
    pub fn is_pointed(&self) -> bool {
        self.lineality.is_empty()
    }
}

fn lex_sort(vectors: &mut [DVector<f64>]) {
    vectors.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b.iter()) {
            match x.partial_cmp(y) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
}

fn dedup_units(vectors: Vec<DVector<f64>>, tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !out.iter().any(|u| (u - &v).norm() <= tol) {
            out.push(v);
        }
    }
    out
}

/// Extreme rays of `{x : c . x >= 0 for every c in constraints}`.
///
/// Zero constraints are dropped; the rest are normalized before the
/// double-description sweep so the activity tolerance is scale-free.
/// Output rays are unit length, deduplicated, and lexicographically
/// sorted, so the result is a deterministic function of the input.
pub fn extreme_rays(constraints: &[DVector<f64>], dim: usize) -> Result<RaySystem> {
    for c in constraints {
        if c.len() != dim {
            return Err(Error::dim("constraint dimension mismatch"));
        }
    }
    let rows: Vec<DVector<f64>> = constraints
        .iter()
        .filter(|c| c.norm() > 1e-14)
        .map(|c| c / c.norm())
        .collect();

    if rows.is_empty() {
        let mut lineality: Vec<DVector<f64>> = (0..dim)
            .map(|j| DVector::from_fn(dim, |i, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        lex_sort(&mut lineality);
        return Ok(RaySystem {
            lineality,
            rays: Vec::new(),
        });
    }

    let a = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let mut lineality = linalg::nullspace_real(&a, 1e-10);

    // orthonormal basis of the row space: project the pointed part there
    let reduced_dim = dim - lineality.len();
    if reduced_dim == 0 {
        lex_sort(&mut lineality);
        return Ok(RaySystem {
            lineality,
            rays: Vec::new(),
        });
    }
    let svd = a.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let smax = svd.singular_values.max().max(0.0);
    let mut q_cols: Vec<DVector<f64>> = Vec::new();
    for k in 0..svd.singular_values.len().min(v_t.nrows()) {
        if svd.singular_values[k] > 1e-10 * smax {
            q_cols.push(v_t.row(k).transpose());
        }
    }
    if q_cols.len() != reduced_dim {
        return Err(Error::inconsistency(format!(
            "row-space dimension {} disagrees with nullity-based value {}",
            q_cols.len(),
            reduced_dim
        )));
    }
    let q = DMatrix::from_fn(dim, reduced_dim, |i, j| q_cols[j][i]);

    let projected: Vec<DVector<f64>> = rows.iter().map(|r| q.transpose() * r).collect();

    // initial simplicial cone from a maximal independent subset
    let mut chosen: Vec<usize> = Vec::new();
    let mut chosen_rows: Vec<DVector<f64>> = Vec::new();
    for (i, r) in projected.iter().enumerate() {
        if chosen.len() == reduced_dim {
            break;
        }
        chosen_rows.push(r.clone());
        if linalg::rank_real_rows(&chosen_rows, 1e-10) == chosen_rows.len() {
            chosen.push(i);
        } else {
            chosen_rows.pop();
        }
    }
    if chosen.len() != reduced_dim {
        return Err(Error::inconsistency(
            "could not assemble a full-rank initial constraint set",
        ));
    }
    let b = DMatrix::from_fn(reduced_dim, reduced_dim, |i, j| chosen_rows[i][j]);
    let b_inv = b
        .try_inverse()
        .ok_or_else(|| Error::inconsistency("full-rank constraint set failed to invert"))?;
    let mut rays: Vec<DVector<f64>> = (0..reduced_dim)
        .map(|j| {
            let col = b_inv.column(j).into_owned();
            let n = col.norm();
            col / n
        })
        .collect();
    let mut processed: Vec<DVector<f64>> = chosen_rows;

    for (i, cons) in projected.iter().enumerate() {
        if chosen.contains(&i) {
            continue;
        }
        let mut plus: Vec<DVector<f64>> = Vec::new();
        let mut zero: Vec<DVector<f64>> = Vec::new();
        let mut minus: Vec<DVector<f64>> = Vec::new();
        for r in rays.drain(..) {
            let s = cons.dot(&r);
            if s > ACTIVE_TOL {
                plus.push(r);
            } else if s < -ACTIVE_TOL {
                minus.push(r);
            } else {
                zero.push(r);
            }
        }
        let mut next: Vec<DVector<f64>> = Vec::new();
        // adjacency: the constraints active at both rays span a face of
        // codimension two in the reduced space
        for rp in &plus {
            for rm in &minus {
                if reduced_dim >= 2 {
                    let active: Vec<DVector<f64>> = processed
                        .iter()
                        .filter(|row| {
                            row.dot(rp).abs() <= ACTIVE_TOL && row.dot(rm).abs() <= ACTIVE_TOL
                        })
                        .cloned()
                        .collect();
                    let adjacent = if reduced_dim == 2 {
                        true
                    } else {
                        linalg::rank_real_rows(&active, 1e-8) == reduced_dim - 2
                    };
                    if adjacent {
                        let sp = cons.dot(rp);
                        let sm = cons.dot(rm);
                        let combo = rm * sp - rp * sm;
                        let n = combo.norm();
                        if n > 1e-14 {
                            next.push(combo / n);
                        }
                    }
                }
            }
        }
        next.extend(plus);
        next.extend(zero);
        rays = dedup_units(next, 1e-8);
        if rays.len() > RAY_CAP {
            return Err(Error::capability(format!(
                "extreme-ray enumeration exceeded {RAY_CAP} intermediate rays"
            )));
        }
        processed.push(cons.clone());
    }

    let mut lifted: Vec<DVector<f64>> = rays
        .into_iter()
        .map(|r| {
            let full = &q * r;
            let n = full.norm();
            full / n
        })
        .collect();
    lifted = dedup_units(lifted, 1e-8);
    lex_sort(&mut lifted);
    lex_sort(&mut lineality);
    Ok(RaySystem {
        lineality,
        rays: lifted,
    })
}

/// Non-negative least squares by active sets: minimizes `|A x - b|`
/// subject to `x >= 0`. Returns the solution and the residual norm.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    if n == 0 {
        return (x, b.norm());
    }
    let scale = a.iter().fold(0.0f64, |m, &v| m.max(v.abs())).max(1e-300);
    let tol = 1e-12 * scale * (b.norm().max(1.0));
    let mut passive = vec![false; n];

    let solve_passive = |passive: &[bool]| -> Option<DVector<f64>> {
        let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
        if idx.is_empty() {
            return Some(DVector::zeros(0));
        }
        let sub = DMatrix::from_fn(a.nrows(), idx.len(), |r, c| a[(r, idx[c])]);
        let svd = sub.svd(true, true);
        svd.solve(b, 1e-12).ok()
    };

    for _ in 0..(10 * n.max(4)) {
        let w = a.transpose() * (b - a * &x);
        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !passive[i] && w[i] > tol {
                if best.map(|(_, bw)| w[i] > bw).unwrap_or(true) {
                    best = Some((i, w[i]));
                }
            }
        }
        let Some((j, _)) = best else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let Some(z) = solve_passive(&passive) else {
                passive[j] = false;
                break;
            };
            if z.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            // step back along the segment from x to z until a variable hits zero
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z[k] <= 0.0 {
                    let xi = x[i];
                    let denom = xi - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(xi / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            if !alpha.is_finite() {
                break;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
                if x[i] <= 1e-14 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    let residual = (b - a * &x).norm();
    (x, residual)
}

/// Whether `target` lies in the conic hull of `generators`, together
/// with the witnessing coefficients when it does.
pub fn conic_membership(
    generators: &[DVector<f64>],
    target: &DVector<f64>,
    rel_tol: f64,
) -> Option<DVector<f64>> {
    if generators.is_empty() {
        return if target.norm() <= rel_tol {
            Some(DVector::zeros(0))
        } else {
            None
        };
    }
    let dim = target.len();
    let a = DMatrix::from_fn(dim, generators.len(), |i, j| generators[j][i]);
    let (x, residual) = nnls(&a, target);
    if residual <= rel_tol * (1.0 + target.norm()) {
        Some(x)
    } else {
        None
    }
}
