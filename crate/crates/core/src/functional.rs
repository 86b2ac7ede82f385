//! Linear functionals on a *-algebra, the two-sided module action on
//! them, and states. Positivity of functionals is decided by the cone
//! layer; this module owns the linear structure.

use nalgebra::DVector;

use crate::algebra::{Element, StarAlgebra};
use crate::error::Error;
use crate::{Result, C64};

/// A linear functional, stored as the covector of its values on the
/// distinguished basis: `<w, a> = sum_i w_i a_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    covector: DVector<C64>,
}

impl Functional {
    pub fn from_covector(covector: DVector<C64>) -> Self {
        Functional { covector }
    }

    /// Functional defined by its values on the basis elements.
    pub fn from_basis_values(values: &[C64]) -> Self {
        Functional {
            covector: DVector::from_column_slice(values),
        }
    }

    pub fn from_real_basis_values(values: &[f64]) -> Self {
        Functional {
            covector: DVector::from_iterator(
                values.len(),
                values.iter().map(|&x| C64::new(x, 0.0)),
            ),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Functional {
            covector: DVector::zeros(dim),
        }
    }

    pub fn covector(&self) -> &DVector<C64> {
        &self.covector
    }

    pub fn dim(&self) -> usize {
        self.covector.len()
    }

    pub fn apply(&self, a: &Element) -> Result<C64> {
        if a.dim() != self.dim() {
            return Err(Error::dim("functional and element dimensions differ"));
        }
        Ok(self.covector.dot(a.coeffs()))
    }

    /// Value on the unit.
    pub fn mass(&self, alg: &StarAlgebra) -> Result<C64> {
        self.apply(&alg.unit())
    }

    pub fn scale(&self, z: C64) -> Functional {
        Functional {
            covector: &self.covector * z,
        }
    }

    pub fn add(&self, other: &Functional) -> Functional {
        Functional {
            covector: &self.covector + &other.covector,
        }
    }

    pub fn sub(&self, other: &Functional) -> Functional {
        Functional {
            covector: &self.covector - &other.covector,
        }
    }

    pub fn distance(&self, other: &Functional) -> f64 {
        (&self.covector - &other.covector).norm()
    }

    pub fn norm(&self) -> f64 {
        self.covector.norm()
    }

    /// Whether `<w, a*> = conj(<w, a>)` holds for all `a`.
    pub fn is_hermitian(&self, alg: &StarAlgebra) -> Result<bool> {
        if self.dim() != alg.dim() {
            return Err(Error::dim("functional dimension mismatch"));
        }
        // on basis vectors: <w, b_i*> = (S^T w)_i must equal conj(w_i)
        let lhs = alg.star_matrix().transpose() * &self.covector;
        let rhs = self.covector.map(|z| z.conj());
        Ok((lhs - rhs).norm() <= 1e-10 * (1.0 + self.covector.norm()))
    }

    /// Real chart coordinates (values on the Hermitian basis); errors if
    /// the functional is not Hermitian.
    pub fn real_coords(&self, alg: &StarAlgebra) -> Result<DVector<f64>> {
        alg.functional_real_coords(&self.covector)
    }

    pub fn from_real_coords(alg: &StarAlgebra, v: &DVector<f64>) -> Result<Functional> {
        Ok(Functional {
            covector: alg.functional_from_real_coords(v)?,
        })
    }

    /// Two-sided action: `(b . w . c)(a) = w(c a b)`.
    pub fn bimodule_act(&self, alg: &StarAlgebra, left: &Element, right: &Element) -> Result<Functional> {
        if self.dim() != alg.dim() {
            return Err(Error::dim("functional dimension mismatch"));
        }
        let m = alg.left_mult_matrix(right) * alg.right_mult_matrix(left);
        Ok(Functional {
            covector: m.transpose() * &self.covector,
        })
    }

    /// Conjugation action: `(d |> w)(a) = w(d* a d)`.
    pub fn act(&self, alg: &StarAlgebra, d: &Element) -> Result<Functional> {
        let d_star = alg.star(d)?;
        self.bimodule_act(alg, d, &d_star)
    }
}

/// A normalized positive functional. Construction happens through a
/// cone model, which verifies positivity and rescales the mass to one.
#[derive(Clone, Debug)]
pub struct State {
    functional: Functional,
}

impl State {
    pub(crate) fn from_functional_unchecked(functional: Functional) -> Self {
        State { functional }
    }

    pub fn functional(&self) -> &Functional {
        &self.functional
    }

    pub fn expectation(&self, a: &Element) -> Result<C64> {
        self.functional.apply(a)
    }

    /// `w(a* a) - |w(a)|^2`; nonnegative for states on any *-cone that
    /// makes squares positive.
    pub fn variance(&self, alg: &StarAlgebra, a: &Element) -> Result<f64> {
        let a_star = alg.star(a)?;
        let a_star_a = alg.multiply(&a_star, a)?;
        let second = self.functional.apply(&a_star_a)?;
        let first = self.functional.apply(a)?;
        if second.im.abs() > 1e-8 * (1.0 + second.norm()) {
            return Err(Error::inconsistency(format!(
                "second moment of a Hermitian state came out non-real: {second}"
            )));
        }
        Ok(second.re - first.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn bimodule_action_matches_definition() {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        let mut rng = sampling::rng_for(11, 0);
        let w = Functional::from_covector(DVector::from_fn(4, |_, _| {
            c(sampling::uniform(&mut rng, 1.0), sampling::uniform(&mut rng, 1.0))
        }));
        let b = sampling::random_element(&alg, &mut rng, 1.0);
        let cc = sampling::random_element(&alg, &mut rng, 1.0);
        let a = sampling::random_element(&alg, &mut rng, 1.0);
        let moved = w.bimodule_act(&alg, &b, &cc).unwrap();
        let lhs = moved.apply(&a).unwrap();
        let cab = alg
            .multiply(&cc, &alg.multiply(&a, &b).unwrap())
            .unwrap();
        let rhs = w.apply(&cab).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn conjugation_action_is_positivity_shaped() {
        // on pointwise algebras d |> w rescales by |d_i|^2
        let alg = StarAlgebra::pointwise(2);
        let w = Functional::from_real_basis_values(&[0.5, 0.5]);
        let d = Element::from_slice(&[c(2.0, 0.0), c(0.0, 1.0)]);
        let moved = w.act(&alg, &d).unwrap();
        let e0 = alg.basis_element(0);
        let e1 = alg.basis_element(1);
        assert!((moved.apply(&e0).unwrap() - c(2.0, 0.0)).norm() < 1e-12);
        assert!((moved.apply(&e1).unwrap() - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_detection() {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        // trace functional is Hermitian
        let tr = Functional::from_basis_values(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(tr.is_hermitian(&alg).unwrap());
        // evaluation against E01 alone is not
        let skew = Functional::from_basis_values(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(!skew.is_hermitian(&alg).unwrap());
    }

    #[test]
    fn polarization_recovers_bimodule_from_conjugations() {
        // a . w . b* = (1/4) sum_k i^k ((a + i^k b) |> w)
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        let mut rng = sampling::rng_for(23, 1);
        let w = Functional::from_covector(DVector::from_fn(4, |_, _| {
            c(sampling::uniform(&mut rng, 1.0), sampling::uniform(&mut rng, 1.0))
        }));
        let a = sampling::random_element(&alg, &mut rng, 1.0);
        let b = sampling::random_element(&alg, &mut rng, 1.0);
        let b_star = alg.star(&b).unwrap();
        let direct = w.bimodule_act(&alg, &a, &b_star).unwrap();
        let mut acc = Functional::zero(4);
        let mut ik = c(1.0, 0.0);
        for _ in 0..4 {
            let shifted = a.add(&b.scale(ik));
            acc = acc.add(&w.act(&alg, &shifted).unwrap().scale(ik));
            ik *= c(0.0, 1.0);
        }
        acc = acc.scale(c(0.25, 0.0));
        assert!(acc.distance(&direct) < 1e-12);
    }
}
