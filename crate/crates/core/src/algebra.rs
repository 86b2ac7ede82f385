//! Finite-dimensional unital associative *-algebras given by structure
//! constants, with multiplication, involution, inversion, and the real
//! coordinate charts used by the order-theoretic layers.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::error::Error;
use crate::linalg;
use crate::{Result, C64};

/// Residual gate for structure validation at construction time.
const LOAD_TOL: f64 = 1e-12;

/// Relative singular-value cut below which a linear system counts as singular.
const INVERT_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// An element of a [`StarAlgebra`], stored as coefficients against the
/// distinguished basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    coeffs: DVector<C64>,
}

impl Element {
    pub fn from_coeffs(coeffs: DVector<C64>) -> Self {
        Element { coeffs }
    }

    pub fn from_slice(coeffs: &[C64]) -> Self {
        Element {
            coeffs: DVector::from_column_slice(coeffs),
        }
    }

    /// Element with the given real coefficients.
    pub fn from_reals(coeffs: &[f64]) -> Self {
        Element {
            coeffs: DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&x| c(x, 0.0))),
        }
    }

    pub fn coeffs(&self) -> &DVector<C64> {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest coefficient magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, z: C64) -> Element {
        Element {
            coeffs: &self.coeffs * z,
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        Element {
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        Element {
            coeffs: &self.coeffs - &other.coeffs,
        }
    }

    pub fn distance(&self, other: &Element) -> f64 {
        (&self.coeffs - &other.coeffs).norm()
    }
}

/// Real coordinate chart for Hermitian elements and Hermitian functionals.
///
/// The columns of `basis` are Hermitian elements forming a real basis of
/// the Hermitian part; evaluation against them identifies Hermitian
/// functionals with real vectors, and the pairing becomes the Euclidean
/// dot product in these charts.
#[derive(Debug)]
pub struct HermitianChart {
    /// d x d complex matrix; column j holds the coefficients of h_j.
    basis: DMatrix<C64>,
    /// Inverse of `basis`, for element coordinates.
    basis_inv: DMatrix<C64>,
    /// Inverse of `basis` transposed (not conjugated), for functional coordinates.
    basis_t_inv: DMatrix<C64>,
}

impl HermitianChart {
    pub fn basis_element(&self, j: usize) -> Element {
        Element::from_coeffs(self.basis.column(j).into_owned())
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// A finite-dimensional unital associative *-algebra over the complex
/// numbers, described by its left-multiplication matrices.
#[derive(Debug)]
pub struct StarAlgebra {
    dim: usize,
    /// left[i] maps coefficients of x to coefficients of b_i * x.
    left: Vec<DMatrix<C64>>,
    /// right[j] maps coefficients of x to coefficients of x * b_j.
    right: Vec<DMatrix<C64>>,
    /// Antilinear involution: coeffs(a*) = star * conj(coeffs(a)).
    star: DMatrix<C64>,
    unit: DVector<C64>,
    commutative: bool,
    blocks: Option<Vec<usize>>,
    chart: OnceLock<HermitianChart>,
}

impl StarAlgebra {
    /// Builds an algebra from its multiplication table, involution matrix,
    /// and unit, validating associativity, the unit laws, and the
    /// involution axioms to within `1e-12` relative residual.
    ///
    /// `table[i]` must be the matrix whose column `j` holds the
    /// coefficients of `b_i * b_j`. When `blocks` is given, the basis is
    /// required to be the row-major matrix-unit basis of the direct sum
    /// of full matrix blocks, and the table is checked against matrix
    /// multiplication.
    pub fn from_structure(
        table: Vec<DMatrix<C64>>,
        star: DMatrix<C64>,
        unit: DVector<C64>,
        blocks: Option<Vec<usize>>,
    ) -> Result<Self> {
        let dim = unit.len();
        if dim == 0 {
            return Err(Error::invalid("algebra dimension must be positive"));
        }
        if table.len() != dim {
            return Err(Error::dim(format!(
                "multiplication table has {} entries for dimension {dim}",
                table.len()
            )));
        }
        for (i, t) in table.iter().enumerate() {
            if t.nrows() != dim || t.ncols() != dim {
                return Err(Error::dim(format!(
                    "table entry {i} is {}x{}, expected {dim}x{dim}",
                    t.nrows(),
                    t.ncols()
                )));
            }
        }
        if star.nrows() != dim || star.ncols() != dim {
            return Err(Error::dim("involution matrix size mismatch"));
        }
        if let Some(bs) = &blocks {
            let total: usize = bs.iter().map(|n| n * n).sum();
            if total != dim {
                return Err(Error::invalid(format!(
                    "block sizes {bs:?} require dimension {total}, algebra has {dim}"
                )));
            }
        }

        let scale = table
            .iter()
            .map(|t| t.iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(1.0, f64::max);
        let tol = LOAD_TOL * scale;

        // right multiplication from the same table
        let mut right = vec![DMatrix::<C64>::zeros(dim, dim); dim];
        for i in 0..dim {
            for j in 0..dim {
                let col = table[i].column(j);
                right[j].set_column(i, &col);
            }
        }

        // associativity: L(b_i b_j) = L_i L_j
        for i in 0..dim {
            for j in 0..dim {
                let prod = &table[i] * &table[j];
                let mut lij = DMatrix::zeros(dim, dim);
                let coeffs = table[i].column(j);
                for (k, z) in coeffs.iter().enumerate() {
                    lij += &table[k] * *z;
                }
                if (prod - lij).norm() > tol * (dim as f64) {
                    return Err(Error::invalid(format!(
                        "structure constants are not associative at basis pair ({i}, {j})"
                    )));
                }
            }
        }

        // unit laws
        let mut l_unit = DMatrix::zeros(dim, dim);
        for (k, z) in unit.iter().enumerate() {
            l_unit += &table[k] * *z;
        }
        if (&l_unit - DMatrix::<C64>::identity(dim, dim)).norm() > tol * (dim as f64) {
            return Err(Error::invalid("unit is not a left unit"));
        }
        let mut r_unit = DMatrix::zeros(dim, dim);
        for (k, z) in unit.iter().enumerate() {
            r_unit += &right[k] * *z;
        }
        if (&r_unit - DMatrix::<C64>::identity(dim, dim)).norm() > tol * (dim as f64) {
            return Err(Error::invalid("unit is not a right unit"));
        }

        // involution: S conj(S) = I, unit fixed, (b_i b_j)* = b_j* b_i*
        let s_conj = star.map(|z| z.conj());
        if (&star * &s_conj - DMatrix::<C64>::identity(dim, dim)).norm() > tol * (dim as f64) {
            return Err(Error::invalid("involution is not involutive"));
        }
        if (&star * unit.map(|z| z.conj()) - &unit).norm() > tol {
            return Err(Error::invalid("involution does not fix the unit"));
        }
        let star_vec = |v: &DVector<C64>| -> DVector<C64> { &star * v.map(|z| z.conj()) };
        for i in 0..dim {
            let si = star_vec(&DVector::from_fn(dim, |r, _| {
                if r == i {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            }));
            for j in 0..dim {
                let sj = star_vec(&DVector::from_fn(dim, |r, _| {
                    if r == j {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                }));
                // left side: (b_i b_j)*
                let lhs = star_vec(&table[i].column(j).into_owned());
                // right side: b_j* b_i*
                let mut l_sj = DMatrix::zeros(dim, dim);
                for (k, z) in sj.iter().enumerate() {
                    l_sj += &table[k] * *z;
                }
                let rhs = l_sj * &si;
                if (lhs - rhs).norm() > tol * (dim as f64) {
                    return Err(Error::invalid(format!(
                        "involution is not antimultiplicative at basis pair ({i}, {j})"
                    )));
                }
            }
        }

        // commutativity is an exact structural property of the table
        let mut commutative = true;
        'outer: for i in 0..dim {
            for j in 0..dim {
                let d = (table[i].column(j) - table[j].column(i)).norm();
                if d > tol {
                    commutative = false;
                    break 'outer;
                }
            }
        }

        let alg = StarAlgebra {
            dim,
            left: table,
            right,
            star,
            unit,
            commutative,
            blocks,
            chart: OnceLock::new(),
        };

        if alg.blocks.is_some() {
            alg.validate_block_structure()?;
        }
        // building the chart also validates that the Hermitian part has
        // full real dimension
        alg.hermitian_chart_checked()?;
        Ok(alg)
    }

    /// The algebra of complex n-tuples with pointwise operations.
    pub fn pointwise(n: usize) -> Self {
        Self::matrix_blocks(&vec![1; n]).expect("pointwise algebra is always valid")
    }

    /// Direct sum of full matrix algebras with the given block sizes,
    /// over the row-major matrix-unit basis.
    pub fn matrix_blocks(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&n| n == 0) {
            return Err(Error::invalid("block sizes must be positive"));
        }
        let dim: usize = sizes.iter().map(|n| n * n).sum();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut off = 0;
        for &n in sizes {
            offsets.push(off);
            off += n * n;
        }
        let idx = |blk: usize, i: usize, j: usize| offsets[blk] + i * sizes[blk] + j;

        let mut table = vec![DMatrix::<C64>::zeros(dim, dim); dim];
        for (blk, &n) in sizes.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    let a = idx(blk, i, j);
                    for p in 0..n {
                        for q in 0..n {
                            let b = idx(blk, p, q);
                            if j == p {
                                table[a][(idx(blk, i, q), b)] = c(1.0, 0.0);
                            }
                        }
                    }
                }
            }
        }
        let mut star = DMatrix::<C64>::zeros(dim, dim);
        for (blk, &n) in sizes.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    star[(idx(blk, j, i), idx(blk, i, j))] = c(1.0, 0.0);
                }
            }
        }
        let mut unit = DVector::<C64>::zeros(dim);
        for (blk, &n) in sizes.iter().enumerate() {
            for i in 0..n {
                unit[idx(blk, i, i)] = c(1.0, 0.0);
            }
        }
        Self::from_structure(table, star, unit, Some(sizes.to_vec()))
    }

    /// Truncated polynomial algebra C[x]/(x^(d+1)) with x Hermitian,
    /// over the basis 1, x, ..., x^d.
    pub fn poly_trunc(d: usize) -> Self {
        let dim = d + 1;
        let mut table = vec![DMatrix::<C64>::zeros(dim, dim); dim];
        for i in 0..dim {
            for j in 0..dim {
                if i + j < dim {
                    table[i][(i + j, j)] = c(1.0, 0.0);
                }
            }
        }
        let star = DMatrix::<C64>::identity(dim, dim);
        let mut unit = DVector::<C64>::zeros(dim);
        unit[0] = c(1.0, 0.0);
        Self::from_structure(table, star, unit, None).expect("truncated polynomial algebra is always valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn block_sizes(&self) -> Option<&[usize]> {
        self.blocks.as_deref()
    }

    pub fn unit(&self) -> Element {
        Element::from_coeffs(self.unit.clone())
    }

    pub fn basis_element(&self, i: usize) -> Element {
        Element::from_coeffs(DVector::from_fn(self.dim, |r, _| {
            if r == i {
                c(1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        }))
    }

    /// Human-readable name of basis element `i`.
    pub fn basis_label(&self, i: usize) -> String {
        if let Some(blocks) = &self.blocks {
            let mut off = 0;
            for (blk, &n) in blocks.iter().enumerate() {
                if i < off + n * n {
                    let r = (i - off) / n;
                    let q = (i - off) % n;
                    if n == 1 {
                        return format!("e{blk}");
                    }
                    return format!("E{blk}[{r},{q}]");
                }
                off += n * n;
            }
        }
        format!("b{i}")
    }

    fn check_dim(&self, a: &Element) -> Result<()> {
        if a.dim() != self.dim {
            return Err(Error::dim(format!(
                "element has dimension {}, algebra has {}",
                a.dim(),
                self.dim
            )));
        }
        Ok(())
    }

    /// Matrix of left multiplication by `a`.
    pub fn left_mult_matrix(&self, a: &Element) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, z) in a.coeffs().iter().enumerate() {
            if z.norm_sqr() != 0.0 {
                m += &self.left[i] * *z;
            }
        }
        m
    }

    /// Matrix of right multiplication by `a`.
    pub fn right_mult_matrix(&self, a: &Element) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (j, z) in a.coeffs().iter().enumerate() {
            if z.norm_sqr() != 0.0 {
                m += &self.right[j] * *z;
            }
        }
        m
    }

    /// Left multiplication matrix of basis element `i`.
    pub fn left_basis_matrix(&self, i: usize) -> &DMatrix<C64> {
        &self.left[i]
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(Element::from_coeffs(self.left_mult_matrix(a) * b.coeffs()))
    }

    pub fn star(&self, a: &Element) -> Result<Element> {
        self.check_dim(a)?;
        Ok(Element::from_coeffs(
            &self.star * a.coeffs().map(|z| z.conj()),
        ))
    }

    pub(crate) fn star_matrix(&self) -> &DMatrix<C64> {
        &self.star
    }

    pub fn power(&self, a: &Element, n: usize) -> Result<Element> {
        self.check_dim(a)?;
        let mut acc = self.unit();
        for _ in 0..n {
            acc = self.multiply(a, &acc)?;
        }
        Ok(acc)
    }

    /// Splits `a = h + i k` with `h`, `k` Hermitian.
    pub fn hermitian_decompose(&self, a: &Element) -> Result<(Element, Element)> {
        let s = self.star(a)?;
        let h = a.add(&s).scale(c(0.5, 0.0));
        let k = a.sub(&s).scale(c(0.0, -0.5));
        Ok((h, k))
    }

    /// Whether `a` equals its own involution, up to `1e-10` relative.
    pub fn is_hermitian(&self, a: &Element) -> Result<bool> {
        let s = self.star(a)?;
        Ok(a.distance(&s) <= 1e-10 * (1.0 + a.coeffs().norm()))
    }

    /// Multiplicative inverse, or `None` when left multiplication by `a`
    /// is singular within a relative tolerance of `1e-10`.
    pub fn try_invert(&self, a: &Element) -> Result<Option<Element>> {
        self.check_dim(a)?;
        let l = self.left_mult_matrix(a);
        let sv = linalg::singular_values(&l);
        let smax = sv.first().copied().unwrap_or(0.0);
        if smax <= 0.0 || sv.last().copied().unwrap_or(0.0) <= INVERT_TOL * smax {
            return Ok(None);
        }
        let lu = l.lu();
        match lu.solve(&self.unit) {
            Some(x) => Ok(Some(Element::from_coeffs(x))),
            None => Ok(None),
        }
    }

    /// Commutator norm of two elements.
    pub fn commutator_norm(&self, a: &Element, b: &Element) -> Result<f64> {
        let ab = self.multiply(a, b)?;
        let ba = self.multiply(b, a)?;
        Ok(ab.distance(&ba))
    }

    fn validate_block_structure(&self) -> Result<()> {
        let blocks = self.blocks.as_ref().expect("caller checked");
        let reference = StarAlgebra::block_table(blocks);
        for i in 0..self.dim {
            if (&self.left[i] - &reference[i]).norm() > LOAD_TOL * (self.dim as f64) {
                return Err(Error::invalid(
                    "declared block sizes do not match the multiplication table",
                ));
            }
        }
        Ok(())
    }

    fn block_table(sizes: &[usize]) -> Vec<DMatrix<C64>> {
        let dim: usize = sizes.iter().map(|n| n * n).sum();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut off = 0;
        for &n in sizes {
            offsets.push(off);
            off += n * n;
        }
        let idx = |blk: usize, i: usize, j: usize| offsets[blk] + i * sizes[blk] + j;
        let mut table = vec![DMatrix::<C64>::zeros(dim, dim); dim];
        for (blk, &n) in sizes.iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    for q in 0..n {
                        table[idx(blk, i, j)][(idx(blk, i, q), idx(blk, j, q))] = c(1.0, 0.0);
                    }
                }
            }
        }
        table
    }

    /// Views an element as one matrix per declared block.
    pub fn element_blocks(&self, a: &Element) -> Result<Vec<DMatrix<C64>>> {
        self.check_dim(a)?;
        let blocks = self
            .blocks
            .as_ref()
            .ok_or_else(|| Error::capability("algebra has no declared block structure"))?;
        let mut out = Vec::with_capacity(blocks.len());
        let mut off = 0;
        for &n in blocks {
            out.push(DMatrix::from_fn(n, n, |i, j| a.coeffs()[off + i * n + j]));
            off += n * n;
        }
        Ok(out)
    }

    /// Element assembled from one matrix per declared block.
    pub fn element_from_blocks(&self, mats: &[DMatrix<C64>]) -> Result<Element> {
        let blocks = self
            .blocks
            .as_ref()
            .ok_or_else(|| Error::capability("algebra has no declared block structure"))?;
        if mats.len() != blocks.len() {
            return Err(Error::dim("wrong number of block matrices"));
        }
        let mut coeffs = DVector::zeros(self.dim);
        let mut off = 0;
        for (m, &n) in mats.iter().zip(blocks) {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::dim("block matrix size mismatch"));
            }
            for i in 0..n {
                for j in 0..n {
                    coeffs[off + i * n + j] = m[(i, j)];
                }
            }
            off += n * n;
        }
        Ok(Element::from_coeffs(coeffs))
    }

    fn hermitian_chart_checked(&self) -> Result<&HermitianChart> {
        if let Some(chart) = self.chart.get() {
            return Ok(chart);
        }
        let d = self.dim;
        // Hermitian elements are the real solutions of coeffs = S conj(coeffs);
        // split into real and imaginary parts and take the real nullspace.
        let p = self.star.map(|z| z.re);
        let q = self.star.map(|z| z.im);
        let mut k = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                k[(i, j)] = if i == j { 1.0 } else { 0.0 } - p[(i, j)];
                k[(i, j + d)] = -q[(i, j)];
                k[(i + d, j)] = -q[(i, j)];
                k[(i + d, j + d)] = if i == j { 1.0 } else { 0.0 } + p[(i, j)];
            }
        }
        let ns = linalg::nullspace_real(&k, 1e-10);
        if ns.len() != d {
            return Err(Error::invalid(format!(
                "Hermitian part has real dimension {}, expected {d}",
                ns.len()
            )));
        }
        let mut basis = DMatrix::<C64>::zeros(d, d);
        for (j, v) in ns.iter().enumerate() {
            for i in 0..d {
                basis[(i, j)] = c(v[i], v[i + d]);
            }
        }
        let basis_inv = basis
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::invalid("Hermitian basis is singular"))?;
        let basis_t_inv = basis
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::invalid("Hermitian basis is singular"))?;
        let chart = HermitianChart {
            basis,
            basis_inv,
            basis_t_inv,
        };
        let _ = self.chart.set(chart);
        Ok(self.chart.get().expect("just set"))
    }

    /// The real coordinate chart shared by Hermitian elements and
    /// Hermitian functionals.
    pub fn hermitian_chart(&self) -> &HermitianChart {
        self.hermitian_chart_checked()
            .expect("chart validated at construction")
    }

    /// Real coordinates of a Hermitian element.
    pub fn element_real_coords(&self, a: &Element) -> Result<DVector<f64>> {
        self.check_dim(a)?;
        let chart = self.hermitian_chart();
        let gamma = &chart.basis_inv * a.coeffs();
        let imag: f64 = gamma.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-9 * (1.0 + a.coeffs().norm()) {
            return Err(Error::invalid(
                "element is not Hermitian; real coordinates are undefined",
            ));
        }
        Ok(gamma.map(|z| z.re))
    }

    /// Hermitian element with the given real coordinates.
    pub fn element_from_real_coords(&self, v: &DVector<f64>) -> Result<Element> {
        let chart = self.hermitian_chart();
        if v.len() != self.dim {
            return Err(Error::dim("coordinate vector length mismatch"));
        }
        Ok(Element::from_coeffs(&chart.basis * v.map(|x| c(x, 0.0))))
    }

    /// Real coordinates (evaluations against the Hermitian basis) of a
    /// Hermitian functional given by its covector.
    pub fn functional_real_coords(&self, w: &DVector<C64>) -> Result<DVector<f64>> {
        if w.len() != self.dim {
            return Err(Error::dim("covector length mismatch"));
        }
        let chart = self.hermitian_chart();
        let vals = chart.basis.transpose() * w;
        let imag: f64 = vals.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-9 * (1.0 + w.norm()) {
            return Err(Error::invalid(
                "functional is not Hermitian; real coordinates are undefined",
            ));
        }
        Ok(vals.map(|z| z.re))
    }

    /// Hermitian functional covector with the given real coordinates.
    pub fn functional_from_real_coords(&self, v: &DVector<f64>) -> Result<DVector<C64>> {
        if v.len() != self.dim {
            return Err(Error::dim("coordinate vector length mismatch"));
        }
        let chart = self.hermitian_chart();
        Ok(&chart.basis_t_inv * v.map(|x| c(x, 0.0)))
    }
}

/// Outcome of probing invertibility of `1 + a^2` over Hermitian elements.
#[derive(Debug, Clone)]
pub struct SymmetricReport {
    /// Number of Hermitian elements probed.
    pub tested: usize,
    /// Hermitian witnesses `a` for which `1 + a^2` failed to invert.
    pub failures: Vec<Element>,
    pub pass: bool,
}

impl StarAlgebra {
    /// Probes whether `1 + a^2` is invertible across a deterministic
    /// spanning family of Hermitian elements plus `samples` seeded
    /// pseudorandom Hermitian elements.
    pub fn symmetric_report(&self, samples: usize, seed: u64) -> Result<SymmetricReport> {
        let chart = self.hermitian_chart();
        let d = self.dim;
        let mut candidates: Vec<Element> = Vec::new();
        for i in 0..d {
            candidates.push(chart.basis_element(i));
        }
        for i in 0..d {
            for j in (i + 1)..d {
                let hi = chart.basis_element(i);
                let hj = chart.basis_element(j);
                candidates.push(hi.add(&hj));
                candidates.push(hi.sub(&hj));
            }
        }
        let mut rng = crate::sampling::rng_for(seed, 0x5e1f);
        for _ in 0..samples {
            candidates.push(crate::sampling::random_hermitian(self, &mut rng, 2.0)?);
        }

        let mut failures = Vec::new();
        let tested = candidates.len();
        for a in candidates {
            let a2 = self.multiply(&a, &a)?;
            let one_plus = self.unit().add(&a2);
            if self.try_invert(&one_plus)?.is_none() {
                failures.push(a);
            }
        }
        Ok(SymmetricReport {
            tested,
            pass: failures.is_empty(),
            failures,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pointwise_multiplies_componentwise() {
        let alg = StarAlgebra::pointwise(3);
        let a = Element::from_reals(&[1.0, 2.0, 3.0]);
        let b = Element::from_reals(&[4.0, 5.0, 6.0]);
        let ab = alg.multiply(&a, &b).unwrap();
        assert_eq!(ab, Element::from_reals(&[4.0, 10.0, 18.0]));
        assert!(alg.is_commutative());
    }

    #[test]
    fn matrix_block_multiplication_matches_matrices() {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        // E01 * E10 = E00, E10 * E01 = E11
        let e01 = alg.basis_element(1);
        let e10 = alg.basis_element(2);
        assert_eq!(alg.multiply(&e01, &e10).unwrap(), alg.basis_element(0));
        assert_eq!(alg.multiply(&e10, &e01).unwrap(), alg.basis_element(3));
        assert!(!alg.is_commutative());
        // involution transposes and conjugates
        let s = alg.star(&e01).unwrap();
        assert_eq!(s, e10);
    }

    #[test]
    fn poly_trunc_is_nilpotent() {
        let alg = StarAlgebra::poly_trunc(2);
        let x = alg.basis_element(1);
        let x2 = alg.multiply(&x, &x).unwrap();
        assert_eq!(x2, alg.basis_element(2));
        let x3 = alg.multiply(&x2, &x).unwrap();
        assert!(x3.sup_norm() < 1e-15);
        assert!(alg.is_commutative());
    }

    #[test]
    fn inversion_round_trip() {
        let alg = StarAlgebra::pointwise(2);
        let a = Element::from_reals(&[2.0, -0.5]);
        let inv = alg.try_invert(&a).unwrap().unwrap();
        let prod = alg.multiply(&a, &inv).unwrap();
        assert!(prod.distance(&alg.unit()) < 1e-12);
        // zero divisor has no inverse
        let z = Element::from_reals(&[1.0, 0.0]);
        assert!(alg.try_invert(&z).unwrap().is_none());
    }

    #[test]
    fn hermitian_decomposition_recombines() {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        let a = Element::from_slice(&[
            C64::new(1.0, 2.0),
            C64::new(0.0, -1.0),
            C64::new(3.0, 0.5),
            C64::new(-2.0, 0.0),
        ]);
        let (h, k) = alg.hermitian_decompose(&a).unwrap();
        assert!(alg.is_hermitian(&h).unwrap());
        assert!(alg.is_hermitian(&k).unwrap());
        let back = h.add(&k.scale(C64::new(0.0, 1.0)));
        assert!(back.distance(&a) < 1e-12);
    }

    #[test]
    fn real_coordinate_charts_round_trip() {
        let alg = StarAlgebra::matrix_blocks(&[2, 1]).unwrap();
        let chart_dim = alg.hermitian_chart().dim();
        assert_eq!(chart_dim, 5);
        let v = DVector::from_vec(vec![0.3, -1.0, 2.0, 0.7, 1.5]);
        let elem = alg.element_from_real_coords(&v).unwrap();
        assert!(alg.is_hermitian(&elem).unwrap());
        let back = alg.element_real_coords(&elem).unwrap();
        assert!((back - v).norm() < 1e-10);
    }

    #[test]
    fn functional_chart_pairing_is_euclidean() {
        let alg = StarAlgebra::pointwise(3);
        let v = DVector::from_vec(vec![0.25, 0.5, 0.25]);
        let w = alg.functional_from_real_coords(&v).unwrap();
        let a = DVector::from_vec(vec![1.0, -2.0, 4.0]);
        let elem = alg.element_from_real_coords(&a).unwrap();
        let pair: C64 = w.dot(elem.coeffs());
        assert!((pair.re - v.dot(&a)).abs() < 1e-12);
        assert!(pair.im.abs() < 1e-12);
    }

    #[test]
    fn symmetric_probe_passes_on_matrix_algebra() {
        let alg = StarAlgebra::matrix_blocks(&[2]).unwrap();
        let report = alg.symmetric_report(8, 7).unwrap();
        assert!(report.pass, "matrix algebras have invertible 1 + a^2");
    }
}
