//! Positivity cones on the Hermitian part of an algebra and everything
//! decided against them: element and functional positivity, the order
//! axioms, purity of states, coercivity, dominated sets, and regularity
//! of the cone against sums of squares.
//!
//! Two cone descriptions are supported. A functional-generated cone is
//! the set of Hermitian elements on which every listed functional is
//! nonnegative; its polyhedral structure is computed once at
//! construction. A block-PSD cone declares an element positive when all
//! of its matrix blocks are positive semidefinite.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Element, StarAlgebra};
use crate::error::Error;
use crate::functional::{Functional, State};
use crate::gns::{self, GnsData};
use crate::linalg;
use crate::polyhedral::{self, RaySystem};
use crate::sampling;
use crate::{Result, C64};

/// Relative tolerance for deciding positivity of elements and functionals.
const POS_TOL: f64 = 1e-10;

/// Relative tolerance for calling a ray constraint active at a functional.
const ACTIVE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeKind {
    FunctionalGenerated,
    BlockPsd,
}

#[derive(Debug)]
enum Backend {
    FunctionalGenerated {
        generators: Vec<Functional>,
        /// Unit-normalized real chart coordinates of the generators.
        gen_coords: Vec<DVector<f64>>,
        /// Raw (unnormalized) coordinates, for membership certificates.
        gen_coords_raw: Vec<DVector<f64>>,
        /// Extreme rays and lineality of the element cone.
        elem_rays: RaySystem,
        /// Orthonormal basis of the span of the generators.
        span_basis: Vec<DVector<f64>>,
    },
    BlockPsd,
}

/// Element-level positivity verdict with its margin and tolerance.
#[derive(Clone, Copy, Debug)]
pub struct PositivityReport {
    /// Smallest generator value (functional-generated) or smallest block
    /// eigenvalue (block-PSD).
    pub margin: f64,
    pub tol: f64,
    pub positive: bool,
}

/// Functional-level positivity verdict.
#[derive(Clone, Copy, Debug)]
pub struct FunctionalPositivity {
    /// Smallest value on the extreme rays of the element cone.
    pub margin: f64,
    /// Largest absolute value on the lineality of the element cone;
    /// positivity requires this to vanish.
    pub lineality_violation: f64,
    pub tol: f64,
    pub positive: bool,
}

/// Outcome of checking the order axioms on a cone.
#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub unit_positive: bool,
    pub translation_ok: bool,
    pub congruence_ok: bool,
    /// Labels of conjugations that moved a generator outside the cone.
    pub congruence_failures: Vec<String>,
    /// Whether the order is antisymmetric, not merely a quasi-order.
    pub partial_order: bool,
    /// A nonzero element with both signs positive, when one exists.
    pub quasi_order_witness: Option<Element>,
    pub closure_warnings: Vec<String>,
    pub pass: bool,
}

/// One purity criterion with its observed and expected values.
#[derive(Clone, Debug)]
pub struct PurityCriterion {
    pub name: &'static str,
    pub observed: usize,
    pub expected: usize,
    pub pure: bool,
}

#[derive(Clone, Debug)]
pub struct PurityReport {
    pub pure: bool,
    pub criteria: Vec<PurityCriterion>,
}

/// Outcome of the coercive-product check for two coercive elements.
#[derive(Clone, Copy, Debug)]
pub struct CoerciveProductReport {
    /// Common coercivity level of the two squares, capped at two.
    pub epsilon: f64,
    /// Scale at which the product dominates the sum of squares.
    pub lambda: f64,
    /// Margin of `lambda q^2 r^2 - (q^2 + r^2)`.
    pub sum_bound_margin: f64,
    /// Margin of `q^2 r^2`; expected at least `epsilon^2`.
    pub product_margin: f64,
    pub ok: bool,
}

/// A finite set of elements used as a generating family for a down-set.
#[derive(Clone, Debug)]
pub struct DominantSet {
    elements: Vec<Element>,
}

impl DominantSet {
    pub fn new(elements: Vec<Element>) -> Self {
        DominantSet { elements }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Result of a down-set membership search. `Unknown` is honest: the
/// search is bounded, so absence of a witness is not a refutation.
#[derive(Clone, Debug)]
pub enum QdownOutcome {
    Member {
        /// Indices into the dominant set whose product dominates.
        product: Vec<usize>,
        /// Scale at which the product dominates.
        lambda: f64,
    },
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegularityVerdict {
    /// Every extreme direction of the cone was expressed through squares.
    Regular,
    /// A positive direction admits a certified separating functional
    /// that is nonnegative on all squares.
    CounterexampleCandidate,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct RegularityReport {
    pub verdict: RegularityVerdict,
    /// Functional vanishing nowhere on the witness but nonnegative on
    /// squares, present for counterexample candidates.
    pub separator: Option<Functional>,
    /// Positive direction that resisted expression through squares.
    pub witness: Option<Element>,
    pub details: String,
}

#[derive(Debug)]
pub struct ConeModel {
    alg: Arc<StarAlgebra>,
    backend: Backend,
    closure_warnings: Vec<String>,
}

impl ConeModel {
    /// Cone of Hermitian elements on which every generator functional is
    /// nonnegative.
    pub fn functional_generated(alg: Arc<StarAlgebra>, generators: Vec<Functional>) -> Result<Self> {
        let d = alg.dim();
        let mut gen_coords_raw = Vec::with_capacity(generators.len());
        let mut gen_coords = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.dim() != d {
                return Err(Error::dim(format!("generator {i} dimension mismatch")));
            }
            let v = g.real_coords(&alg).map_err(|_| {
                Error::invalid(format!("generator {i} is not a Hermitian functional"))
            })?;
            let n = v.norm();
            if n <= 1e-14 {
                return Err(Error::invalid(format!("generator {i} is zero")));
            }
            gen_coords.push(&v / n);
            gen_coords_raw.push(v);
        }
        let elem_rays = polyhedral::extreme_rays(&gen_coords, d)?;
        let span_basis = orthonormal_span(&gen_coords, d);
        let mut model = ConeModel {
            alg,
            backend: Backend::FunctionalGenerated {
                generators,
                gen_coords,
                gen_coords_raw,
                elem_rays,
                span_basis,
            },
            closure_warnings: Vec::new(),
        };
        model.closure_warnings = model.congruence_scan(0, 0)?;
        Ok(model)
    }

    /// Cone of elements whose matrix blocks are all positive semidefinite.
    /// Requires an algebra with declared block structure.
    pub fn block_psd(alg: Arc<StarAlgebra>) -> Result<Self> {
        if alg.block_sizes().is_none() {
            return Err(Error::capability(
                "block-PSD cone needs an algebra with declared block structure",
            ));
        }
        Ok(ConeModel {
            alg,
            backend: Backend::BlockPsd,
            closure_warnings: Vec::new(),
        })
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.alg
    }

    pub fn algebra_arc(&self) -> Arc<StarAlgebra> {
        Arc::clone(&self.alg)
    }

    pub fn kind(&self) -> ConeKind {
        match self.backend {
            Backend::FunctionalGenerated { .. } => ConeKind::FunctionalGenerated,
            Backend::BlockPsd => ConeKind::BlockPsd,
        }
    }

    /// Warnings recorded at construction when the basis-level action
    /// scan moved a generator outside the described cone.
    pub fn closure_warnings(&self) -> &[String] {
        &self.closure_warnings
    }

    pub fn generators(&self) -> Option<&[Functional]> {
        match &self.backend {
            Backend::FunctionalGenerated { generators, .. } => Some(generators),
            Backend::BlockPsd => None,
        }
    }

    /// Extreme rays of the element cone, available for the
    /// functional-generated description.
    pub fn element_cone_rays(&self) -> Result<&RaySystem> {
        match &self.backend {
            Backend::FunctionalGenerated { elem_rays, .. } => Ok(elem_rays),
            Backend::BlockPsd => Err(Error::capability(
                "extreme rays are only computed for functional-generated cones",
            )),
        }
    }

    /// Positivity of a Hermitian element, with margin.
    pub fn is_positive(&self, a: &Element) -> Result<PositivityReport> {
        let tol = POS_TOL * a.sup_norm().max(1.0);
        let margin = match &self.backend {
            Backend::FunctionalGenerated { gen_coords, .. } => {
                let gamma = self.alg.element_real_coords(a)?;
                gen_coords
                    .iter()
                    .map(|g| g.dot(&gamma))
                    .fold(f64::INFINITY, f64::min)
            }
            Backend::BlockPsd => {
                let blocks = self.alg.element_blocks(a)?;
                let mut margin = f64::INFINITY;
                for b in &blocks {
                    if linalg::hermitian_defect(b) > 1e-10 * (1.0 + b.norm()) {
                        return Err(Error::invalid(
                            "positivity is defined for Hermitian elements only",
                        ));
                    }
                    if b.nrows() > 0 {
                        margin = margin.min(linalg::min_eig(b));
                    }
                }
                margin
            }
        };
        Ok(PositivityReport {
            margin,
            tol,
            positive: margin >= -tol,
        })
    }

    /// Positivity of a Hermitian functional on the whole element cone.
    pub fn functional_report(&self, w: &Functional) -> Result<FunctionalPositivity> {
        match &self.backend {
            Backend::FunctionalGenerated { elem_rays, .. } => {
                let v = w.real_coords(&self.alg)?;
                let tol = POS_TOL * v.norm().max(1.0);
                let margin = elem_rays
                    .rays
                    .iter()
                    .map(|r| v.dot(r))
                    .fold(f64::INFINITY, f64::min);
                let lineality_violation = elem_rays
                    .lineality
                    .iter()
                    .map(|l| v.dot(l).abs())
                    .fold(0.0, f64::max);
                Ok(FunctionalPositivity {
                    margin,
                    lineality_violation,
                    tol,
                    positive: margin >= -tol && lineality_violation <= tol,
                })
            }
            Backend::BlockPsd => {
                if !w.is_hermitian(&self.alg)? {
                    return Err(Error::invalid(
                        "functional positivity is defined for Hermitian functionals only",
                    ));
                }
                let tol = POS_TOL * w.norm().max(1.0);
                let densities = self.densities(w)?;
                let mut margin = f64::INFINITY;
                for d in &densities {
                    if d.nrows() > 0 {
                        margin = margin.min(linalg::min_eig(d));
                    }
                }
                Ok(FunctionalPositivity {
                    margin,
                    lineality_violation: 0.0,
                    tol,
                    positive: margin >= -tol,
                })
            }
        }
    }

    /// Density matrices of a functional on a block algebra:
    /// `w(a) = sum_k tr(D_k A_k)`.
    pub fn densities(&self, w: &Functional) -> Result<Vec<DMatrix<C64>>> {
        if w.dim() != self.alg.dim() {
            return Err(Error::dim("functional dimension mismatch"));
        }
        let fake = Element::from_coeffs(w.covector().clone());
        // entries of the density are the transposed block entries of the covector
        Ok(self
            .alg
            .element_blocks(&fake)?
            .into_iter()
            .map(|b| b.transpose())
            .collect())
    }

    /// Whether `a <= b` in the element order.
    pub fn element_leq(&self, a: &Element, b: &Element) -> Result<bool> {
        Ok(self.is_positive(&b.sub(a))?.positive)
    }

    /// Whether `u <= v` in the dual functional order.
    pub fn functional_leq(&self, u: &Functional, v: &Functional) -> Result<bool> {
        Ok(self.functional_report(&v.sub(u))?.positive)
    }

    /// Nonnegative coefficients expressing a functional through the
    /// generators, or `None` when no such expression exists. This is the
    /// membership route dual to [`ConeModel::functional_report`].
    pub fn in_generator_cone(&self, w: &Functional) -> Result<Option<DVector<f64>>> {
        match &self.backend {
            Backend::FunctionalGenerated { gen_coords_raw, .. } => {
                let v = w.real_coords(&self.alg)?;
                Ok(polyhedral::conic_membership(gen_coords_raw, &v, 1e-7))
            }
            Backend::BlockPsd => Err(Error::capability(
                "generator-cone membership needs a functional-generated cone",
            )),
        }
    }

    /// Validated state: positive functional rescaled to unit mass.
    pub fn state(&self, w: &Functional) -> Result<State> {
        let report = self.functional_report(w)?;
        if !report.positive {
            return Err(Error::invalid(format!(
                "functional is not positive (margin {:.3e}, lineality violation {:.3e})",
                report.margin, report.lineality_violation
            )));
        }
        let mass = w.mass(&self.alg)?;
        if mass.im.abs() > 1e-9 * (1.0 + mass.norm()) || mass.re <= 1e-12 * w.norm().max(1.0) {
            return Err(Error::invalid(format!(
                "functional mass {mass} cannot be normalized to one"
            )));
        }
        Ok(State::from_functional_unchecked(
            w.scale(C64::new(1.0 / mass.re, 0.0)),
        ))
    }

    fn deterministic_action_family(&self) -> Vec<(String, Element)> {
        let d = self.alg.dim();
        let mut family = Vec::new();
        for j in 0..d {
            family.push((format!("b{j}"), self.alg.basis_element(j)));
        }
        for j in 0..d {
            for k in (j + 1)..d {
                let bj = self.alg.basis_element(j);
                let bk = self.alg.basis_element(k);
                family.push((format!("b{j}+b{k}"), bj.add(&bk)));
                family.push((format!("b{j}+i*b{k}"), bj.add(&bk.scale(C64::new(0.0, 1.0)))));
            }
        }
        family
    }

    /// Checks that conjugating each generator by a family of elements
    /// lands back in the positive functionals. Returns failure labels.
    fn congruence_scan(&self, random_extra: usize, seed: u64) -> Result<Vec<String>> {
        let Backend::FunctionalGenerated { generators, .. } = &self.backend else {
            return Ok(Vec::new());
        };
        let mut family = self.deterministic_action_family();
        let mut rng = sampling::rng_for(seed, 0xac7);
        for t in 0..random_extra {
            family.push((
                format!("random{t}"),
                sampling::random_element(&self.alg, &mut rng, 1.5),
            ));
        }
        let mut failures = Vec::new();
        for (label, dd) in &family {
            for (gi, g) in generators.iter().enumerate() {
                let moved = g.act(&self.alg, dd)?;
                let report = self.functional_report(&moved)?;
                if !report.positive {
                    failures.push(format!(
                        "generator {gi} conjugated by {label} leaves the cone \
                         (margin {:.3e}, lineality violation {:.3e})",
                        report.margin, report.lineality_violation
                    ));
                    if failures.len() >= 8 {
                        return Ok(failures);
                    }
                }
            }
        }
        Ok(failures)
    }

    /// Validates the order axioms: positivity of the unit, translation
    /// invariance, congruence invariance, and reports whether the order
    /// is a partial order or merely a quasi-order.
    pub fn validate_cone_axioms(&self, seed: u64) -> Result<AxiomReport> {
        let alg = &*self.alg;
        let unit_positive = self.is_positive(&alg.unit())?.positive;

        // translation: the margin of b - a is unchanged by adding any c
        let mut translation_ok = true;
        let mut rng = sampling::rng_for(seed, 0x7a1);
        for _ in 0..16 {
            let a = sampling::random_hermitian(alg, &mut rng, 1.0)?;
            let b = sampling::random_hermitian(alg, &mut rng, 1.0)?;
            let c_el = sampling::random_hermitian(alg, &mut rng, 1.0)?;
            let diff = b.sub(&a);
            let shifted = b.add(&c_el).sub(&a.add(&c_el));
            let m1 = self.is_positive(&diff)?.margin;
            let m2 = self.is_positive(&shifted)?.margin;
            let scale = diff.sup_norm().max(1.0);
            if (m1 - m2).abs() > 1e-9 * scale {
                translation_ok = false;
                break;
            }
        }

        let (congruence_ok, congruence_failures) = match &self.backend {
            Backend::FunctionalGenerated { .. } => {
                let failures = self.congruence_scan(8, seed)?;
                (failures.is_empty(), failures)
            }
            Backend::BlockPsd => {
                let mut failures = Vec::new();
                let mut rng = sampling::rng_for(seed, 0x7a2);
                for t in 0..16 {
                    let h = sampling::random_hermitian(alg, &mut rng, 1.0)?;
                    let a = alg.multiply(&h, &h)?;
                    let dd = sampling::random_element(alg, &mut rng, 1.0);
                    let dsad = alg.multiply(
                        &alg.star(&dd)?,
                        &alg.multiply(&a, &dd)?,
                    )?;
                    let report = self.is_positive(&dsad)?;
                    if !report.positive {
                        failures.push(format!(
                            "conjugate of sampled square {t} has margin {:.3e}",
                            report.margin
                        ));
                    }
                }
                (failures.is_empty(), failures)
            }
        };

        let (partial_order, quasi_order_witness) = match &self.backend {
            Backend::FunctionalGenerated { elem_rays, .. } => match elem_rays.lineality.first() {
                Some(l) => (false, Some(alg.element_from_real_coords(l)?)),
                None => (true, None),
            },
            Backend::BlockPsd => (true, None),
        };

        let pass = unit_positive && translation_ok && congruence_ok;
        Ok(AxiomReport {
            unit_positive,
            translation_ok,
            congruence_ok,
            congruence_failures,
            partial_order,
            quasi_order_witness,
            closure_warnings: self.closure_warnings.clone(),
            pass,
        })
    }

    /// Purity of a state, decided by all criteria applicable to the cone
    /// description. The criteria must agree; disagreement is reported as
    /// an inconsistency, never resolved silently.
    pub fn is_pure(&self, state: &State) -> Result<PurityReport> {
        let criteria = match &self.backend {
            Backend::FunctionalGenerated {
                elem_rays,
                span_basis,
                ..
            } => {
                let v = state.functional().real_coords(&self.alg)?;
                let scale = v.norm().max(1.0);

                // the state must lie in the span of the generators
                let mut projected = DVector::<f64>::zeros(v.len());
                for b in span_basis {
                    projected += b * v.dot(b);
                }
                let span_defect = (&v - &projected).norm();
                if span_defect > 1e-7 * scale {
                    return Err(Error::inconsistency(format!(
                        "state passed positivity but sits {span_defect:.3e} away \
                         from the generator span"
                    )));
                }

                let active: Vec<&DVector<f64>> = elem_rays
                    .rays
                    .iter()
                    .filter(|r| v.dot(r).abs() <= ACTIVE_TOL * scale)
                    .collect();
                let w_dim = span_basis.len();
                let to_span = |x: &DVector<f64>| -> DVector<f64> {
                    DVector::from_iterator(w_dim, span_basis.iter().map(|b| b.dot(x)))
                };
                let mut rows: Vec<DVector<f64>> = active.iter().map(|r| to_span(r)).collect();
                let face_dim = w_dim - linalg::rank_real_rows(&rows, 1e-8);

                let unit_gamma = self.alg.element_real_coords(&self.alg.unit())?;
                rows.push(to_span(&unit_gamma));
                let vertex_dim = w_dim - linalg::rank_real_rows(&rows, 1e-8);

                vec![
                    PurityCriterion {
                        name: "face-span-dimension",
                        observed: face_dim,
                        expected: 1,
                        pure: face_dim == 1,
                    },
                    PurityCriterion {
                        name: "state-vertex-dimension",
                        observed: vertex_dim,
                        expected: 0,
                        pure: vertex_dim == 0,
                    },
                ]
            }
            Backend::BlockPsd => {
                let densities = self.densities(state.functional())?;
                let rank_sq: usize = densities
                    .iter()
                    .map(|d| {
                        let r = linalg::svd_rank(d, 1e-8);
                        r * r
                    })
                    .sum();
                let gns = GnsData::build(&self.alg, state.functional())?;
                let commutant = gns.commutant_dimension();
                vec![
                    PurityCriterion {
                        name: "density-rank-square-sum",
                        observed: rank_sq,
                        expected: 1,
                        pure: rank_sq == 1,
                    },
                    PurityCriterion {
                        name: "gns-commutant-dimension",
                        observed: commutant,
                        expected: 1,
                        pure: commutant == 1,
                    },
                ]
            }
        };

        let verdicts: Vec<bool> = criteria.iter().map(|c| c.pure).collect();
        if verdicts.iter().any(|&b| b != verdicts[0]) {
            let dump: Vec<String> = criteria
                .iter()
                .map(|c| format!("{}={} (expected {})", c.name, c.observed, c.expected))
                .collect();
            return Err(Error::inconsistency(format!(
                "purity criteria disagree: {}",
                dump.join(", ")
            )));
        }
        Ok(PurityReport {
            pure: verdicts[0],
            criteria,
        })
    }

    /// All pure states of a functional-generated cone: the extreme rays
    /// of the functional cone, normalized to unit mass. Sorted by their
    /// chart coordinates for reproducibility.
    pub fn enumerate_pure_states(&self) -> Result<Vec<State>> {
        let Backend::FunctionalGenerated { generators, .. } = &self.backend else {
            return Err(Error::capability(
                "pure-state enumeration needs a finitely generated functional description",
            ));
        };
        let mut candidates: Vec<Functional> = Vec::new();
        for g in generators {
            let mass = g.mass(&self.alg)?;
            if mass.re <= 1e-10 * g.norm().max(1.0) {
                continue;
            }
            let normalized = g.scale(C64::new(1.0 / mass.re, 0.0));
            if !candidates
                .iter()
                .any(|c| c.distance(&normalized) <= 1e-8 * (1.0 + normalized.norm()))
            {
                candidates.push(normalized);
            }
        }
        let mut out: Vec<(DVector<f64>, State)> = Vec::new();
        for cand in candidates {
            let state = self.state(&cand)?;
            if self.is_pure(&state)?.pure {
                let coords = state.functional().real_coords(&self.alg)?;
                out.push((coords, state));
            }
        }
        out.sort_by(|a, b| {
            for (x, y) in a.0.iter().zip(b.0.iter()) {
                match x.partial_cmp(y) {
                    Some(std::cmp::Ordering::Equal) | None => continue,
                    Some(ord) => return ord,
                }
            }
            std::cmp::Ordering::Equal
        });
        Ok(out.into_iter().map(|(_, s)| s).collect())
    }

    /// Positivity margin of an element required to be positive; errors
    /// on non-positive input.
    pub fn coercivity_margin(&self, q: &Element) -> Result<f64> {
        let report = self.is_positive(q)?;
        if !report.positive {
            return Err(Error::invalid(format!(
                "coercivity is defined for positive elements; margin was {:.3e}",
                report.margin
            )));
        }
        Ok(report.margin.max(0.0))
    }

    /// For coercive `q`, `r` with commuting squares: finds the level
    /// `epsilon`, the scale `lambda = max(1, 2/epsilon)` at which
    /// `q^2 + r^2 <= lambda q^2 r^2`, and checks that the product is
    /// again coercive at level `epsilon^2`.
    pub fn check_coercive_product(&self, q: &Element, r: &Element) -> Result<CoerciveProductReport> {
        let alg = &*self.alg;
        let q2 = alg.multiply(q, q)?;
        let r2 = alg.multiply(r, r)?;
        let prod = alg.multiply(&q2, &r2)?;
        if !alg.is_hermitian(&prod)? {
            return Err(Error::invalid(
                "the squares must commute for the coercive-product check",
            ));
        }
        let m_q = self.is_positive(&q2)?;
        let m_r = self.is_positive(&r2)?;
        if !m_q.positive || m_q.margin <= 1e-12 || !m_r.positive || m_r.margin <= 1e-12 {
            return Err(Error::invalid(format!(
                "inputs are not coercive: square margins {:.3e} and {:.3e}",
                m_q.margin, m_r.margin
            )));
        }
        let epsilon = m_q.margin.min(m_r.margin).min(2.0);
        let lambda = (2.0 / epsilon).max(1.0);
        let sum = q2.add(&r2);
        let bound = prod.scale(C64::new(lambda, 0.0)).sub(&sum);
        let bound_rep = self.is_positive(&bound)?;
        let prod_rep = self.is_positive(&prod)?;
        let product_ok = prod_rep.margin >= epsilon * epsilon - 1e-9 * (1.0 + epsilon * epsilon);
        Ok(CoerciveProductReport {
            epsilon,
            lambda,
            sum_bound_margin: bound_rep.margin,
            product_margin: prod_rep.margin,
            ok: bound_rep.positive && product_ok,
        })
    }

    /// Searches for a product of dominant-set elements and a scale
    /// dominating `a`. Products are taken in nondecreasing index order
    /// up to `max_product_length` factors; scales up to `1e6`.
    pub fn qdown_member(
        &self,
        dominant: &DominantSet,
        a: &Element,
        max_product_length: usize,
    ) -> Result<QdownOutcome> {
        if dominant.is_empty() {
            return Ok(QdownOutcome::Unknown);
        }
        let alg = &*self.alg;
        let n = dominant.len();
        for len in 1..=max_product_length {
            let mut idx = vec![0usize; len];
            loop {
                let mut prod = alg.unit();
                for &i in &idx {
                    prod = alg.multiply(&prod, &dominant.elements[i])?;
                }
                if alg.is_hermitian(&prod)? {
                    if let Some(lambda) = self.dominating_scale(&prod, a)? {
                        return Ok(QdownOutcome::Member {
                            product: idx.clone(),
                            lambda,
                        });
                    }
                }
                if !next_multiset(&mut idx, n) {
                    break;
                }
            }
        }
        Ok(QdownOutcome::Unknown)
    }

    /// Smallest scale (within bisection accuracy) at which `lambda p - a`
    /// is positive, or `None` when none exists up to `1e6`.
    fn dominating_scale(&self, p: &Element, a: &Element) -> Result<Option<f64>> {
        let positive_at = |lambda: f64| -> Result<bool> {
            let diff = p.scale(C64::new(lambda, 0.0)).sub(a);
            Ok(self.is_positive(&diff)?.positive)
        };
        let mut hi = 1.0f64;
        let mut found = false;
        while hi <= 1e6 {
            if positive_at(hi)? {
                found = true;
                break;
            }
            hi *= 2.0;
        }
        if !found {
            return Ok(None);
        }
        let mut lo = if hi == 1.0 { 0.0 } else { hi / 2.0 };
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if positive_at(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }

    /// Compares the cone against the cone generated by squares. For the
    /// block-PSD description positivity and sums of squares agree
    /// exactly. For functional-generated cones each extreme direction is
    /// tested for membership in a sampled sum-of-squares cone; a failure
    /// is certified by a separating functional whose moment matrix is
    /// positive semidefinite, when one exists.
    pub fn regularity_check(&self, seed: u64, square_samples: usize) -> Result<RegularityReport> {
        let alg = &*self.alg;
        match &self.backend {
            Backend::BlockPsd => Ok(RegularityReport {
                verdict: RegularityVerdict::Regular,
                separator: None,
                witness: None,
                details: "every positive element is the square of its Hermitian root".into(),
            }),
            Backend::FunctionalGenerated { elem_rays, .. } => {
                let d = alg.dim();
                let chart = alg.hermitian_chart();
                let mut squares: Vec<Element> = Vec::new();
                for i in 0..d {
                    let h = chart.basis_element(i);
                    squares.push(alg.multiply(&h, &h)?);
                }
                for i in 0..d {
                    for j in (i + 1)..d {
                        let hi = chart.basis_element(i);
                        let hj = chart.basis_element(j);
                        let sum = hi.add(&hj);
                        let diff = hi.sub(&hj);
                        squares.push(alg.multiply(&sum, &sum)?);
                        squares.push(alg.multiply(&diff, &diff)?);
                    }
                }
                let mut rng = sampling::rng_for(seed, 0x505);
                for _ in 0..square_samples {
                    let x = sampling::random_element(alg, &mut rng, 1.5);
                    let xs = alg.star(&x)?;
                    squares.push(alg.multiply(&xs, &x)?);
                }

                let mut square_positivity_failures = 0usize;
                let mut square_coords: Vec<DVector<f64>> = Vec::with_capacity(squares.len());
                for s in &squares {
                    if !self.is_positive(s)?.positive {
                        square_positivity_failures += 1;
                    }
                    square_coords.push(alg.element_real_coords(s)?);
                }

                let mut targets: Vec<DVector<f64>> = elem_rays.rays.clone();
                for l in &elem_rays.lineality {
                    targets.push(l.clone());
                    targets.push(-l);
                }
                if targets.is_empty() {
                    return Ok(RegularityReport {
                        verdict: RegularityVerdict::Regular,
                        separator: None,
                        witness: None,
                        details: "the cone has no extreme directions to test".into(),
                    });
                }

                let a_mat = DMatrix::from_fn(d, square_coords.len(), |i, j| square_coords[j][i]);
                for target in &targets {
                    let (x, residual) = polyhedral::nnls(&a_mat, target);
                    if residual <= 1e-7 * (1.0 + target.norm()) {
                        continue;
                    }
                    // separating direction: nonpositive on the sampled
                    // squares, strictly positive on the target
                    let e = target - &a_mat * &x;
                    let rho_coords = -&e / e.norm();
                    let separator = Functional::from_real_coords(alg, &rho_coords)?;
                    let witness = alg.element_from_real_coords(target)?;
                    let value_on_witness = rho_coords.dot(target);

                    let moment = gns::gram_matrix(alg, &separator)?;
                    let moment_min = linalg::min_eig(&moment);
                    let certified = moment_min >= -1e-9 * (1.0 + moment.norm())
                        && value_on_witness < -1e-9;
                    let details = format!(
                        "direction missed the sampled square cone by {residual:.3e}; \
                         separator takes {value_on_witness:.3e} there and its moment \
                         matrix has minimum eigenvalue {moment_min:.3e}{}",
                        if square_positivity_failures > 0 {
                            format!(
                                " ({square_positivity_failures} sampled squares were \
                                 not positive for this cone)"
                            )
                        } else {
                            String::new()
                        }
                    );
                    return Ok(RegularityReport {
                        verdict: if certified {
                            RegularityVerdict::CounterexampleCandidate
                        } else {
                            RegularityVerdict::Inconclusive
                        },
                        separator: Some(separator),
                        witness: Some(witness),
                        details,
                    });
                }
                Ok(RegularityReport {
                    verdict: RegularityVerdict::Regular,
                    separator: None,
                    witness: None,
                    details: format!(
                        "all {} extreme directions lie in the cone of {} sampled squares{}",
                        targets.len(),
                        squares.len(),
                        if square_positivity_failures > 0 {
                            format!(
                                "; {square_positivity_failures} sampled squares were \
                                 not positive for this cone"
                            )
                        } else {
                            String::new()
                        }
                    ),
                })
            }
        }
    }
}

fn orthonormal_span(vectors: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let a = DMatrix::from_fn(vectors.len(), dim, |i, j| vectors[i][j]);
    let svd = a.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("svd requested v_t");
    let smax = svd.singular_values.max().max(0.0);
    let mut out = Vec::new();
    for k in 0..svd.singular_values.len().min(v_t.nrows()) {
        if svd.singular_values[k] > 1e-10 * smax {
            out.push(v_t.row(k).transpose());
        }
    }
    out
}

fn next_multiset(idx: &mut [usize], n: usize) -> bool {
    let len = idx.len();
    let mut k = len;
    while k > 0 {
        k -= 1;
        if idx[k] + 1 < n {
            let v = idx[k] + 1;
            for slot in idx.iter_mut().skip(k) {
                *slot = v;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_cone(n: usize) -> ConeModel {
        let alg = Arc::new(StarAlgebra::pointwise(n));
        let generators: Vec<Functional> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                Functional::from_real_basis_values(&v)
            })
            .collect();
        ConeModel::functional_generated(alg, generators).unwrap()
    }

    #[test]
    fn pointwise_positivity_is_entrywise() {
        let cone = simplex_cone(3);
        let pos = Element::from_reals(&[1.0, 0.0, 2.0]);
        let neg = Element::from_reals(&[1.0, -0.5, 2.0]);
        assert!(cone.is_positive(&pos).unwrap().positive);
        assert!(!cone.is_positive(&neg).unwrap().positive);
        assert!(cone.closure_warnings().is_empty());
    }

    #[test]
    fn functional_positivity_matches_membership() {
        let cone = simplex_cone(3);
        let inside = Functional::from_real_basis_values(&[0.2, 0.3, 0.5]);
        let outside = Functional::from_real_basis_values(&[0.2, -0.3, 0.5]);
        assert!(cone.functional_report(&inside).unwrap().positive);
        assert!(cone.in_generator_cone(&inside).unwrap().is_some());
        assert!(!cone.functional_report(&outside).unwrap().positive);
        assert!(cone.in_generator_cone(&outside).unwrap().is_none());
    }

    #[test]
    fn axioms_hold_on_the_simplex_cone() {
        let cone = simplex_cone(3);
        let report = cone.validate_cone_axioms(11).unwrap();
        assert!(report.pass);
        assert!(report.partial_order);
        assert!(report.quasi_order_witness.is_none());
    }

    #[test]
    fn nilpotent_line_is_a_quasi_order_witness() {
        // truncated polynomials with the constant-coefficient functional:
        // the nilpotent direction is positive with both signs
        let alg = Arc::new(StarAlgebra::poly_trunc(1));
        let gen = Functional::from_real_basis_values(&[1.0, 0.0]);
        let cone = ConeModel::functional_generated(alg, vec![gen]).unwrap();
        let report = cone.validate_cone_axioms(5).unwrap();
        assert!(report.pass);
        assert!(!report.partial_order);
        let witness = report.quasi_order_witness.unwrap();
        assert!(cone.is_positive(&witness).unwrap().positive);
        assert!(cone.is_positive(&witness.scale(C64::new(-1.0, 0.0))).unwrap().positive);
        assert!(witness.sup_norm() > 1e-8);
    }

    #[test]
    fn block_psd_positivity() {
        let alg = Arc::new(StarAlgebra::matrix_blocks(&[2]).unwrap());
        let cone = ConeModel::block_psd(alg).unwrap();
        let psd = Element::from_slice(&[
            C64::new(2.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        assert!(cone.is_positive(&psd).unwrap().positive);
        let indef = Element::from_slice(&[
            C64::new(1.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(3.0, 0.0),
            C64::new(1.0, 0.0),
        ]);
        let rep = cone.is_positive(&indef).unwrap();
        assert!(!rep.positive);
        assert!((rep.margin + 2.0).abs() < 1e-10);
        let report = cone.validate_cone_axioms(3).unwrap();
        assert!(report.pass);
        assert!(report.partial_order);
    }

    #[test]
    fn purity_on_the_simplex() {
        let cone = simplex_cone(3);
        let vertex = cone
            .state(&Functional::from_real_basis_values(&[1.0, 0.0, 0.0]))
            .unwrap();
        assert!(cone.is_pure(&vertex).unwrap().pure);
        let mixed = cone
            .state(&Functional::from_real_basis_values(&[0.5, 0.5, 0.0]))
            .unwrap();
        assert!(!cone.is_pure(&mixed).unwrap().pure);
        let pure = cone.enumerate_pure_states().unwrap();
        assert_eq!(pure.len(), 3);
    }

    #[test]
    fn purity_on_matrix_blocks() {
        let alg = Arc::new(StarAlgebra::matrix_blocks(&[2]).unwrap());
        let cone = ConeModel::block_psd(alg).unwrap();
        let vector_state = cone
            .state(&Functional::from_real_basis_values(&[1.0, 0.0, 0.0, 0.0]))
            .unwrap();
        assert!(cone.is_pure(&vector_state).unwrap().pure);
        let trace = cone
            .state(&Functional::from_real_basis_values(&[0.5, 0.0, 0.0, 0.5]))
            .unwrap();
        assert!(!cone.is_pure(&trace).unwrap().pure);
        assert!(cone.enumerate_pure_states().is_err());
    }

    #[test]
    fn coercive_product_on_two_points() {
        let cone = simplex_cone(2);
        let q = Element::from_reals(&[2.0, 1.0]);
        let r = Element::from_reals(&[3.0, 2.0]);
        let report = cone.check_coercive_product(&q, &r).unwrap();
        assert!(report.ok);
        assert!((report.epsilon - 1.0).abs() < 1e-12);
        assert!((report.lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn coercive_product_at_the_unit_is_tight() {
        let cone = simplex_cone(2);
        let one = Element::from_reals(&[1.0, 1.0]);
        let report = cone.check_coercive_product(&one, &one).unwrap();
        // 2 * 1 - (1 + 1) = 0: equality, still inside the cone
        assert!(report.ok);
        assert!(report.sum_bound_margin.abs() < 1e-12);
    }

    #[test]
    fn down_set_membership_finds_witnesses() {
        let cone = simplex_cone(2);
        let q = DominantSet::new(vec![Element::from_reals(&[2.0, 1.0])]);
        let a = Element::from_reals(&[5.0, 0.5]);
        match cone.qdown_member(&q, &a, 3).unwrap() {
            QdownOutcome::Member { product, lambda } => {
                assert_eq!(product, vec![0]);
                assert!(lambda >= 2.5 - 1e-6 && lambda <= 2.5 + 1e-3);
            }
            QdownOutcome::Unknown => panic!("expected a dominating product"),
        }
    }

    #[test]
    fn down_set_membership_reports_unknown_honestly() {
        // nothing dominates a direction outside every product's support
        let alg = Arc::new(StarAlgebra::pointwise(2));
        let gen = Functional::from_real_basis_values(&[1.0, 0.0]);
        let cone = ConeModel::functional_generated(alg, vec![gen, Functional::from_real_basis_values(&[0.0, 1.0])]).unwrap();
        let q = DominantSet::new(vec![Element::from_reals(&[1.0, 0.0])]);
        let a = Element::from_reals(&[0.0, 1.0]);
        assert!(matches!(
            cone.qdown_member(&q, &a, 4).unwrap(),
            QdownOutcome::Unknown
        ));
    }

    #[test]
    fn regularity_of_the_simplex_cone() {
        let cone = simplex_cone(3);
        let report = cone.regularity_check(17, 32).unwrap();
        assert_eq!(report.verdict, RegularityVerdict::Regular);
    }

    #[test]
    fn skewed_cone_yields_certified_counterexample() {
        let alg = Arc::new(StarAlgebra::pointwise(2));
        let generators = vec![
            Functional::from_real_basis_values(&[1.0, 2.0]),
            Functional::from_real_basis_values(&[2.0, 1.0]),
        ];
        let cone = ConeModel::functional_generated(alg, generators).unwrap();
        let report = cone.regularity_check(17, 32).unwrap();
        assert_eq!(report.verdict, RegularityVerdict::CounterexampleCandidate);
        let witness = report.witness.unwrap();
        // the witness is positive for the cone but has a negative entry
        assert!(cone.is_positive(&witness).unwrap().positive);
        let min_entry = witness
            .coeffs()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        assert!(min_entry < -1e-6);
    }

    #[test]
    fn nilpotent_regularity_is_inconclusive() {
        let alg = Arc::new(StarAlgebra::poly_trunc(1));
        let gen = Functional::from_real_basis_values(&[1.0, 0.0]);
        let cone = ConeModel::functional_generated(alg, vec![gen]).unwrap();
        let report = cone.regularity_check(17, 32).unwrap();
        assert_eq!(report.verdict, RegularityVerdict::Inconclusive);
    }

    #[test]
    fn states_normalize_mass() {
        let cone = simplex_cone(2);
        let w = Functional::from_real_basis_values(&[2.0, 2.0]);
        let state = cone.state(&w).unwrap();
        let mass = state.functional().mass(cone.algebra()).unwrap();
        assert!((mass - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
