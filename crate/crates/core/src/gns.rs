//! Representation of the algebra on the inner-product space induced by
//! a positive functional: quotient by the null ideal, left action on the
//! quotient, cyclic vector, and operator norms.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Element, StarAlgebra};
use crate::error::Error;
use crate::functional::Functional;
use crate::linalg;
use crate::{Result, C64};

/// Default relative eigenvalue cut for the quotient rank decision.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// The induced representation data for one positive functional.
#[derive(Debug, Clone)]
pub struct GnsData {
    gram: DMatrix<C64>,
    quotient_dim: usize,
    /// Quotient map: coefficients of `a` to the class vector of `a`.
    v: DMatrix<C64>,
    /// Right inverse of `v`; `v * v_pinv` is the identity on the quotient.
    v_pinv: DMatrix<C64>,
    /// Images of the basis elements under the representation.
    reps: Vec<DMatrix<C64>>,
    cyclic: DVector<C64>,
    /// Largest seminorm leaked by the null ideal under left multiplication,
    /// relative to the Gram scale; near zero for genuinely positive input.
    ideal_residual: f64,
}

impl GnsData {
    pub fn build(alg: &StarAlgebra, w: &Functional) -> Result<GnsData> {
        Self::build_with_tol(alg, w, DEFAULT_RANK_TOL)
    }

    /// Builds the representation, cutting the Gram spectrum at
    /// `rel_tol * lambda_max` to decide the quotient dimension.
    pub fn build_with_tol(alg: &StarAlgebra, w: &Functional, rel_tol: f64) -> Result<GnsData> {
        let d = alg.dim();
        if w.dim() != d {
            return Err(Error::dim("functional dimension mismatch"));
        }
        let gram_raw = gram_matrix(alg, w)?;
        let defect = linalg::hermitian_defect(&gram_raw);
        let scale = gram_raw.norm().max(1e-300);
        if defect > 1e-8 * scale {
            return Err(Error::invalid(format!(
                "moment matrix is not Hermitian (defect {defect:.3e}); the functional must satisfy w(a*) = conj(w(a))"
            )));
        }
        let gram = linalg::hermitize(&gram_raw);
        let (eigs, vecs) = linalg::herm_eigen(&gram);
        let lambda_max = eigs.last().copied().unwrap_or(0.0).max(0.0);
        let lambda_min = eigs.first().copied().unwrap_or(0.0);
        if lambda_min < -1e-8 * lambda_max.max(1.0) {
            return Err(Error::invalid(format!(
                "functional is not positive on squares: moment matrix has eigenvalue {lambda_min:.3e}"
            )));
        }
        let cut = rel_tol * lambda_max;
        let kept: Vec<usize> = (0..d).filter(|&k| eigs[k] > cut).collect();
        let dropped: Vec<usize> = (0..d).filter(|&k| eigs[k] <= cut).collect();
        let r = kept.len();

        let mut v = DMatrix::<C64>::zeros(r, d);
        let mut v_pinv = DMatrix::<C64>::zeros(d, r);
        for (row, &k) in kept.iter().enumerate() {
            let root = eigs[k].sqrt();
            for i in 0..d {
                // v = diag(sqrt(lambda)) U^H restricted to the kept spectrum
                v[(row, i)] = vecs[(i, k)].conj() * C64::new(root, 0.0);
                v_pinv[(i, row)] = vecs[(i, k)] / C64::new(root, 0.0);
            }
        }

        // left multiplication must preserve the null ideal
        let mut ideal_residual = 0.0f64;
        for &k in &dropped {
            let null_dir = vecs.column(k).into_owned();
            for i in 0..d {
                let image = &v * (alg.left_basis_matrix(i) * &null_dir);
                ideal_residual = ideal_residual.max(image.norm());
            }
        }
        ideal_residual /= lambda_max.max(1e-300).sqrt();
        if ideal_residual > 1e-5 {
            return Err(Error::inconsistency(format!(
                "null ideal is not invariant under left multiplication (residual {ideal_residual:.3e}); \
                 the input functional is unlikely to be positive"
            )));
        }

        let reps: Vec<DMatrix<C64>> = (0..d)
            .map(|i| &v * alg.left_basis_matrix(i) * &v_pinv)
            .collect();
        let cyclic = &v * alg.unit().coeffs();

        Ok(GnsData {
            gram,
            quotient_dim: r,
            v,
            v_pinv,
            reps,
            cyclic,
            ideal_residual,
        })
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient_dim
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn cyclic_vector(&self) -> &DVector<C64> {
        &self.cyclic
    }

    pub fn ideal_residual(&self) -> f64 {
        self.ideal_residual
    }

    /// Class vector of an element in the quotient space.
    pub fn vector_of(&self, a: &Element) -> Result<DVector<C64>> {
        if a.dim() != self.v.ncols() {
            return Err(Error::dim("element dimension mismatch"));
        }
        Ok(&self.v * a.coeffs())
    }

    /// Element mapping onto a given quotient vector.
    pub fn element_for_vector(&self, u: &DVector<C64>) -> Result<Element> {
        if u.len() != self.quotient_dim {
            return Err(Error::dim("quotient vector dimension mismatch"));
        }
        Ok(Element::from_coeffs(&self.v_pinv * u))
    }

    /// Matrix of the representation at `a`.
    pub fn represent(&self, a: &Element) -> Result<DMatrix<C64>> {
        if a.dim() != self.reps.len() {
            return Err(Error::dim("element dimension mismatch"));
        }
        let r = self.quotient_dim;
        let mut m = DMatrix::<C64>::zeros(r, r);
        for (i, z) in a.coeffs().iter().enumerate() {
            if z.norm_sqr() != 0.0 {
                m += &self.reps[i] * *z;
            }
        }
        Ok(m)
    }

    /// Reconstructs the functional value through the representation.
    pub fn recover(&self, a: &Element) -> Result<C64> {
        let m = self.represent(a)?;
        if self.quotient_dim == 0 {
            return Ok(C64::new(0.0, 0.0));
        }
        Ok((self.cyclic.adjoint() * m * &self.cyclic)[(0, 0)])
    }

    /// Operator norm of the representation at `a`.
    pub fn op_norm(&self, a: &Element) -> Result<f64> {
        Ok(linalg::spectral_norm(&self.represent(a)?))
    }

    /// Witness for the operator norm as a quotient quadratic form: an
    /// element `b` with `w(b* b) = 1` and `w(b* a* a b) = |pi(a)|^2`.
    pub fn sup_witness(&self, a: &Element) -> Result<(Element, f64)> {
        let m = self.represent(a)?;
        if self.quotient_dim == 0 {
            return Err(Error::invalid("zero functional has no norm witness"));
        }
        let (eigs, vecs) = linalg::herm_eigen(&(m.adjoint() * &m));
        let top = eigs.len() - 1;
        let u = vecs.column(top).into_owned();
        let b = self.element_for_vector(&u)?;
        Ok((b, eigs[top].max(0.0)))
    }

    /// Dimension of the commutant of the represented algebra; one means
    /// the representation is irreducible.
    pub fn commutant_dimension(&self) -> usize {
        let r = self.quotient_dim;
        if r == 0 {
            return 0;
        }
        let eye = DMatrix::<C64>::identity(r, r);
        let mut stacked = DMatrix::<C64>::zeros(0, r * r);
        for rep in &self.reps {
            // vec(R X - X R) = (I kron R - R^T kron I) vec(X)
            let k = eye.kronecker(rep) - rep.transpose().kronecker(&eye);
            stacked = DMatrix::from_fn(stacked.nrows() + r * r, r * r, |i, j| {
                if i < stacked.nrows() {
                    stacked[(i, j)]
                } else {
                    k[(i - stacked.nrows(), j)]
                }
            });
        }
        linalg::nullspace(&stacked, 1e-9).len()
    }
}

/// Moment matrix `G[i][j] = w(b_i* b_j)` of a functional.
pub fn gram_matrix(alg: &StarAlgebra, w: &Functional) -> Result<DMatrix<C64>> {
    let d = alg.dim();
    if w.dim() != d {
        return Err(Error::dim("functional dimension mismatch"));
    }
    let mut g = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        let bi_star = alg.star(&alg.basis_element(i))?;
        let left = alg.left_mult_matrix(&bi_star);
        for j in 0..d {
            let prod = Element::from_coeffs(&left * alg.basis_element(j).coeffs());
            g[(i, j)] = w.apply(&prod)?;
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn faithful_state_on_blocks() -> (StarAlgebra, Functional) {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        // normalized trace: w(E_ij) = delta_ij / 2
        let w = Functional::from_real_basis_values(&[0.5, 0.0, 0.0, 0.5]);
        (alg, w)
    }

    #[test]
    fn faithful_state_keeps_full_dimension() {
        let (alg, w) = faithful_state_on_blocks();
        let gns = GnsData::build(&alg, &w).unwrap();
        assert_eq!(gns.quotient_dim(), 4);
        assert!(gns.ideal_residual() < 1e-12);
    }

    #[test]
    fn recovery_matches_the_functional() {
        let (alg, w) = faithful_state_on_blocks();
        let gns = GnsData::build(&alg, &w).unwrap();
        let mut rng = sampling::rng_for(3, 9);
        for _ in 0..8 {
            let a = sampling::random_element(&alg, &mut rng, 1.0);
            let direct = w.apply(&a).unwrap();
            let via_rep = gns.recover(&a).unwrap();
            assert!((direct - via_rep).norm() < 1e-10);
        }
    }

    #[test]
    fn representation_is_multiplicative_and_star_compatible() {
        let (alg, w) = faithful_state_on_blocks();
        let gns = GnsData::build(&alg, &w).unwrap();
        let mut rng = sampling::rng_for(4, 9);
        let a = sampling::random_element(&alg, &mut rng, 1.0);
        let b = sampling::random_element(&alg, &mut rng, 1.0);
        let ra = gns.represent(&a).unwrap();
        let rb = gns.represent(&b).unwrap();
        let rab = gns.represent(&alg.multiply(&a, &b).unwrap()).unwrap();
        assert!((&ra * &rb - rab).norm() < 1e-10);
        let ra_star = gns.represent(&alg.star(&a).unwrap()).unwrap();
        assert!((ra.adjoint() - ra_star).norm() < 1e-10);
    }

    #[test]
    fn rank_deficient_state_quotients_out_the_ideal() {
        // evaluation at the first coordinate of C^3 kills the other two
        let alg = StarAlgebra::pointwise(3);
        let w = Functional::from_real_basis_values(&[1.0, 0.0, 0.0]);
        let gns = GnsData::build(&alg, &w).unwrap();
        assert_eq!(gns.quotient_dim(), 1);
        let a = Element::from_reals(&[3.0, -7.0, 11.0]);
        assert!((gns.recover(&a).unwrap() - c(3.0, 0.0)).norm() < 1e-12);
        assert!((gns.op_norm(&a).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_functional_is_rejected() {
        let alg = StarAlgebra::pointwise(2);
        let w = Functional::from_real_basis_values(&[1.0, -1.0]);
        assert!(GnsData::build(&alg, &w).is_err());
    }

    #[test]
    fn sup_witness_achieves_the_operator_norm() {
        let (alg, w) = faithful_state_on_blocks();
        let gns = GnsData::build(&alg, &w).unwrap();
        let mut rng = sampling::rng_for(5, 9);
        let a = sampling::random_element(&alg, &mut rng, 1.0);
        let (b, value) = gns.sup_witness(&a).unwrap();
        let norm = gns.op_norm(&a).unwrap();
        assert!((value - norm * norm).abs() < 1e-9 * (1.0 + norm * norm));
        // the witness is normalized in the induced inner product
        let b_star_b = alg.multiply(&alg.star(&b).unwrap(), &b).unwrap();
        assert!((w.apply(&b_star_b).unwrap() - c(1.0, 0.0)).norm() < 1e-9);
        // and the quadratic form at the witness equals the squared norm
        let ab = alg.multiply(&a, &b).unwrap();
        let form = alg.multiply(&alg.star(&ab).unwrap(), &ab).unwrap();
        assert!((w.apply(&form).unwrap().re - value).abs() < 1e-8 * (1.0 + value));
    }

    #[test]
    fn commutant_of_full_matrix_state_is_trivial() {
        let (alg, w) = faithful_state_on_blocks();
        let gns = GnsData::build(&alg, &w).unwrap();
        // normalized trace on M2 induces the reducible left regular action
        assert_eq!(gns.commutant_dimension(), 4);
        // a rank-one state is irreducible
        let pure = Functional::from_real_basis_values(&[1.0, 0.0, 0.0, 0.0]);
        let gns_pure = GnsData::build(&alg, &pure).unwrap();
        assert_eq!(gns_pure.quotient_dim(), 2);
        assert_eq!(gns_pure.commutant_dimension(), 1);
    }
}
