//! Instance file schema and validation. One file describes one algebra,
//! one cone, named functionals and elements, and an ordered task list.
//! Parsing is total: a file either yields a validated instance or a
//! non-empty list of errors naming the offending fields.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use ostar::algebra::StarAlgebra;
use ostar::cone::ConeModel;
use ostar::functional::{Functional, State};
use ostar::gns;
use ostar::linalg;
use ostar::{Element, C64};

pub const SCHEMA_VERSION: u32 = 1;

/// A scalar literal: a plain number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    fn to_c64(self) -> C64 {
        match self {
            Scalar::Real(x) => C64::new(x, 0.0),
            Scalar::Complex([re, im]) => C64::new(re, im),
        }
    }
}

fn vector(coords: &[Scalar]) -> DVector<C64> {
    DVector::from_iterator(coords.len(), coords.iter().map(|s| s.to_c64()))
}

/// Raw structure-constant description of an algebra.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawStructure {
    pub dim: usize,
    /// `mult[i][j]` is the coefficient vector of the product of basis
    /// elements `i` and `j`.
    pub mult: Vec<Vec<Vec<Scalar>>>,
    /// `star[i]` is the coefficient vector of the involution of basis
    /// element `i`.
    pub star: Vec<Vec<Scalar>>,
    pub unit: Vec<Scalar>,
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
}

/// Per-task parameters. Seeds, tolerances and sample counts default to
/// instance-level values when omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Probe invertibility of `1 + a^2` over Hermitian samples.
    Symmetric {
        #[serde(default = "default_symmetric_samples")]
        samples: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Check translation and congruence invariance and the order kind.
    ConeAxioms {
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Build the cyclic representation of a state and report residuals.
    Gns {
        state: String,
        #[serde(default)]
        expect_quotient_dim: Option<usize>,
        #[serde(default)]
        expect_commutant_dim: Option<usize>,
    },
    /// Decide purity of a state by every applicable criterion.
    Purity {
        state: String,
        #[serde(default)]
        expect_pure: Option<bool>,
    },
    /// Enumerate characters and pure states and cross-check them.
    Compare {
        #[serde(default)]
        expect_count: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Moment sequence diagnostics of an observable under a state.
    Moments {
        state: String,
        observable: String,
        #[serde(default = "default_moment_n")]
        n_max: usize,
        #[serde(default = "default_hankel_rows")]
        hankel_rows: usize,
        #[serde(default)]
        expect_op_norm: Option<f64>,
    },
    /// Zero-or-divergence dichotomy for a positive observable.
    Stieltjes {
        state: String,
        observable: String,
        #[serde(default = "default_stieltjes_n")]
        n_max: usize,
        #[serde(default = "default_stieltjes_samples")]
        samples: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Recurrence coefficients from exact moments of an observable.
    Jacobi {
        state: String,
        observable: String,
        #[serde(default = "default_jacobi_pairs")]
        pairs: usize,
        #[serde(default)]
        expect_truncated: Option<bool>,
        #[serde(default)]
        expect_alpha: Option<Vec<f64>>,
        #[serde(default)]
        expect_beta: Option<Vec<f64>>,
    },
    /// Product domination of two commuting coercive elements.
    Coercive { q: String, r: String },
    /// Membership of a target below a dominant family.
    Qdown {
        dominant: Vec<String>,
        target: String,
        #[serde(default = "default_qdown_len")]
        max_len: usize,
        #[serde(default)]
        expect_member: Option<bool>,
    },
    /// Search for algebraically positive functionals outside the cone.
    Regularity {
        #[serde(default = "default_regularity_squares")]
        squares: usize,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        expect: Option<String>,
    },
}

fn default_symmetric_samples() -> usize {
    16
}
fn default_moment_n() -> usize {
    256
}
fn default_hankel_rows() -> usize {
    17
}
fn default_stieltjes_n() -> usize {
    64
}
fn default_stieltjes_samples() -> usize {
    8
}
fn default_jacobi_pairs() -> usize {
    8
}
fn default_qdown_len() -> usize {
    6
}
fn default_regularity_squares() -> usize {
    64
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub seed: Option<u64>,

    // exactly one algebra form
    #[serde(default)]
    pub pointwise: Option<usize>,
    #[serde(default)]
    pub blocks: Option<Vec<usize>>,
    #[serde(default)]
    pub poly_trunc: Option<usize>,
    #[serde(default)]
    pub structure: Option<RawStructure>,

    // exactly one cone form
    #[serde(default)]
    pub psd_blocks: bool,
    #[serde(default)]
    pub cone_generators: Vec<String>,

    #[serde(default)]
    pub functionals: BTreeMap<String, Vec<Scalar>>,
    #[serde(default)]
    pub elements: BTreeMap<String, Vec<Scalar>>,
    #[serde(default)]
    pub candidate_states: Vec<String>,
    pub tasks: Vec<TaskSpec>,
}

/// A fully resolved instance: algebra and cone built, every name bound.
#[derive(Debug)]
pub struct ValidatedInstance {
    pub name: String,
    pub seed: u64,
    pub algebra: Arc<StarAlgebra>,
    pub cone: ConeModel,
    pub functionals: BTreeMap<String, Functional>,
    pub elements: BTreeMap<String, Element>,
    pub states: BTreeMap<String, State>,
    pub tasks: Vec<TaskSpec>,
}

/// Parses and validates an instance file. Errors carry field locations;
/// the result is all-or-nothing.
pub fn parse_instance(path: &Path) -> Result<ValidatedInstance, Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| vec![format!("{}: {e}", path.display())])?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| {
        vec![format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )]
    })?;
    validate(file)
}

pub fn validate(file: InstanceFile) -> Result<ValidatedInstance, Vec<String>> {
    let mut errors: Vec<String> = Vec::new();
    if file.schema != SCHEMA_VERSION {
        errors.push(format!(
            "schema: version {} is not supported (expected {SCHEMA_VERSION})",
            file.schema
        ));
    }

    let algebra = build_algebra(&file, &mut errors);
    let Some(algebra) = algebra else {
        return Err(nonempty(errors));
    };
    let algebra = Arc::new(algebra);
    let dim = algebra.dim();

    // named functionals and elements, with length checks
    let mut functionals = BTreeMap::new();
    for (name, coords) in &file.functionals {
        if coords.len() != dim {
            errors.push(format!(
                "functionals.{name}: length {} does not match algebra dimension {dim}",
                coords.len()
            ));
            continue;
        }
        functionals.insert(name.clone(), Functional::from_covector(vector(coords)));
    }
    let mut elements = BTreeMap::new();
    for (name, coords) in &file.elements {
        if coords.len() != dim {
            errors.push(format!(
                "elements.{name}: length {} does not match algebra dimension {dim}",
                coords.len()
            ));
            continue;
        }
        elements.insert(name.clone(), Element::from_coeffs(vector(coords)));
    }

    // cone: exactly one of the two descriptions
    let cone = match (file.psd_blocks, !file.cone_generators.is_empty()) {
        (true, true) => {
            errors.push("cone: psd_blocks and cone_generators are mutually exclusive".into());
            None
        }
        (false, false) => {
            errors.push("cone: one of psd_blocks or cone_generators is required".into());
            None
        }
        (true, false) => match ConeModel::block_psd(Arc::clone(&algebra)) {
            Ok(c) => Some(c),
            Err(e) => {
                errors.push(format!("cone: {e}"));
                None
            }
        },
        (false, true) => {
            let mut gens = Vec::new();
            for name in &file.cone_generators {
                match functionals.get(name) {
                    Some(f) => {
                        check_generator(&algebra, name, f, &mut errors);
                        gens.push(f.clone());
                    }
                    None => errors.push(format!("cone_generators: unknown functional '{name}'")),
                }
            }
            if gens.len() == file.cone_generators.len() && errors.is_empty() {
                match ConeModel::functional_generated(Arc::clone(&algebra), gens) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        errors.push(format!("cone: {e}"));
                        None
                    }
                }
            } else {
                None
            }
        }
    };

    // candidate states must normalize
    let mut states = BTreeMap::new();
    if let Some(cone) = &cone {
        for name in &file.candidate_states {
            match functionals.get(name) {
                Some(f) => match cone.state(f) {
                    Ok(s) => {
                        states.insert(name.clone(), s);
                    }
                    Err(e) => errors.push(format!("candidate_states.{name}: {e}")),
                },
                None => errors.push(format!("candidate_states: unknown functional '{name}'")),
            }
        }
    }

    // every task reference must resolve
    fn need_state(
        states: &BTreeMap<String, State>,
        errors: &mut Vec<String>,
        i: usize,
        s: &str,
    ) {
        if !states.contains_key(s) {
            errors.push(format!("tasks[{i}].state: '{s}' is not a candidate state"));
        }
    }
    for (i, task) in file.tasks.iter().enumerate() {
        match task {
            TaskSpec::Gns { state, .. } | TaskSpec::Purity { state, .. } => {
                need_state(&states, &mut errors, i, state)
            }
            TaskSpec::Moments {
                state, observable, ..
            }
            | TaskSpec::Stieltjes {
                state, observable, ..
            }
            | TaskSpec::Jacobi {
                state, observable, ..
            } => {
                need_state(&states, &mut errors, i, state);
                if !elements.contains_key(observable) {
                    errors.push(format!(
                        "tasks[{i}].observable: unknown element '{observable}'"
                    ));
                }
            }
            TaskSpec::Coercive { q, r } => {
                for (field, name) in [("q", q), ("r", r)] {
                    if !elements.contains_key(name) {
                        errors.push(format!("tasks[{i}].{field}: unknown element '{name}'"));
                    }
                }
            }
            TaskSpec::Qdown {
                dominant, target, ..
            } => {
                for name in dominant {
                    if !elements.contains_key(name) {
                        errors.push(format!("tasks[{i}].dominant: unknown element '{name}'"));
                    }
                }
                if !elements.contains_key(target) {
                    errors.push(format!("tasks[{i}].target: unknown element '{target}'"));
                }
            }
            TaskSpec::Regularity { expect, .. } => {
                if let Some(e) = expect {
                    if !matches!(
                        e.as_str(),
                        "regular" | "counterexample_candidate" | "inconclusive"
                    ) {
                        errors.push(format!("tasks[{i}].expect: unknown verdict '{e}'"));
                    }
                }
            }
            _ => {}
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let cone = cone.expect("cone present when no errors were recorded");
    Ok(ValidatedInstance {
        name: file.name,
        seed: file.seed.unwrap_or(0),
        algebra,
        cone,
        functionals,
        elements,
        states,
        tasks: file.tasks,
    })
}

fn build_algebra(file: &InstanceFile, errors: &mut Vec<String>) -> Option<StarAlgebra> {
    let mut forms = 0;
    forms += file.pointwise.is_some() as usize;
    forms += file.blocks.is_some() as usize;
    forms += file.poly_trunc.is_some() as usize;
    forms += file.structure.is_some() as usize;
    if forms != 1 {
        errors.push(format!(
            "algebra: expected exactly one of pointwise, blocks, poly_trunc, structure; found {forms}"
        ));
        return None;
    }
    if let Some(n) = file.pointwise {
        if n == 0 {
            errors.push("pointwise: dimension must be positive".into());
            return None;
        }
        return Some(StarAlgebra::pointwise(n));
    }
    if let Some(sizes) = &file.blocks {
        return match StarAlgebra::matrix_blocks(sizes) {
            Ok(a) => Some(a),
            Err(e) => {
                errors.push(format!("blocks: {e}"));
                None
            }
        };
    }
    if let Some(d) = file.poly_trunc {
        return Some(StarAlgebra::poly_trunc(d));
    }
    let raw = file.structure.as_ref().expect("structure form");
    let d = raw.dim;
    if raw.mult.len() != d
        || raw.mult.iter().any(|row| row.len() != d)
        || raw
            .mult
            .iter()
            .flatten()
            .any(|coeffs| coeffs.len() != d)
    {
        errors.push("structure.mult: expected a dim x dim table of length-dim vectors".into());
        return None;
    }
    if raw.star.len() != d || raw.star.iter().any(|row| row.len() != d) {
        errors.push("structure.star: expected dim vectors of length dim".into());
        return None;
    }
    if raw.unit.len() != d {
        errors.push("structure.unit: expected a vector of length dim".into());
        return None;
    }
    // table[i] has the coefficients of b_i b_j in column j
    let table: Vec<DMatrix<C64>> = (0..d)
        .map(|i| {
            DMatrix::from_fn(d, d, |k, j| raw.mult[i][j][k].to_c64())
        })
        .collect();
    // star[i] is the image of b_i, forming column i
    let star = DMatrix::from_fn(d, d, |k, i| raw.star[i][k].to_c64());
    let unit = vector(&raw.unit);
    match StarAlgebra::from_structure(table, star, unit, raw.blocks.clone()) {
        Ok(a) => Some(a),
        Err(e) => {
            errors.push(format!("structure: {e}"));
            None
        }
    }
}

/// Cone generators must be Hermitian and algebraically positive; a
/// failure is reported with a witness element.
fn check_generator(
    alg: &StarAlgebra,
    name: &str,
    f: &Functional,
    errors: &mut Vec<String>,
) {
    match f.is_hermitian(alg) {
        Ok(true) => {}
        Ok(false) => {
            errors.push(format!("cone_generators: '{name}' is not Hermitian"));
            return;
        }
        Err(e) => {
            errors.push(format!("cone_generators: '{name}': {e}"));
            return;
        }
    }
    let gram = match gns::gram_matrix(alg, f) {
        Ok(g) => g,
        Err(e) => {
            errors.push(format!("cone_generators: '{name}': {e}"));
            return;
        }
    };
    let (eigs, vecs) = linalg::herm_eigen(&gram);
    let scale = eigs.iter().fold(1.0f64, |m, &l| m.max(l.abs()));
    if let Some((k, &lambda)) = eigs
        .iter()
        .enumerate()
        .find(|(_, &l)| l < -1e-9 * scale)
    {
        let witness = Element::from_coeffs(vecs.column(k).into_owned());
        let coords: Vec<String> = witness
            .coeffs()
            .iter()
            .map(|z| format!("{:.4}{:+.4}i", z.re, z.im))
            .collect();
        errors.push(format!(
            "cone_generators: '{name}' fails algebraic positivity: value {lambda:.3e} \
             on the square of [{}]",
            coords.join(", ")
        ));
    }
}

fn nonempty(mut errors: Vec<String>) -> Vec<String> {
    if errors.is_empty() {
        errors.push("instance rejected for an unreported reason".into());
    }
    errors
}

/// Standalone moment-family file: named reference sequences checked
/// against their closed-form growth classifications.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsFile {
    pub schema: u32,
    pub name: String,
    #[serde(default = "default_family_count")]
    pub count: usize,
    pub sequences: Vec<SeqSpec>,
}

fn default_family_count() -> usize {
    256
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeqSpec {
    pub name: String,
    #[serde(default)]
    pub factorial: bool,
    #[serde(default)]
    pub log_normal: Option<f64>,
    #[serde(default)]
    pub geometric: Option<f64>,
    #[serde(default)]
    pub power: Option<f64>,
    /// Recurrence pairs to extract; exact moments exist for the
    /// factorial family only.
    #[serde(default)]
    pub jacobi_pairs: Option<usize>,
}

impl SeqSpec {
    pub fn family(&self) -> Result<ostar::moments::MomentFamily, ostar::Error> {
        use ostar::moments::MomentFamily;
        let mut found = Vec::new();
        if self.factorial {
            found.push(MomentFamily::Factorial);
        }
        if let Some(sigma) = self.log_normal {
            found.push(MomentFamily::LogNormal { sigma });
        }
        if let Some(ratio) = self.geometric {
            found.push(MomentFamily::Geometric { ratio });
        }
        if let Some(exponent) = self.power {
            found.push(MomentFamily::Power { exponent });
        }
        match found.len() {
            1 => Ok(found[0]),
            n => Err(ostar::Error::invalid(format!(
                "sequence '{}' declares {n} families, expected exactly one",
                self.name
            ))),
        }
    }

    pub fn family_label(&self) -> String {
        if self.factorial {
            "factorial".into()
        } else if let Some(s) = self.log_normal {
            format!("log_normal({s})")
        } else if let Some(r) = self.geometric {
            format!("geometric({r})")
        } else if let Some(p) = self.power {
            format!("power({p})")
        } else {
            "unspecified".into()
        }
    }
}

pub fn parse_moments_file(path: &Path) -> Result<MomentsFile, Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| vec![format!("{}: {e}", path.display())])?;
    let file: MomentsFile = serde_json::from_str(&text).map_err(|e| {
        vec![format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        )]
    })?;
    let mut errors = Vec::new();
    if file.schema != SCHEMA_VERSION {
        errors.push(format!(
            "schema: version {} is not supported (expected {SCHEMA_VERSION})",
            file.schema
        ));
    }
    for (i, seq) in file.sequences.iter().enumerate() {
        if let Err(e) = seq.family() {
            errors.push(format!("sequences[{i}]: {e}"));
        }
        for (field, value) in [
            ("log_normal", seq.log_normal),
            ("geometric", seq.geometric),
        ] {
            if let Some(v) = value {
                if v <= 0.0 {
                    errors.push(format!("sequences[{i}].{field}: must be positive"));
                }
            }
        }
        if let Some(p) = seq.power {
            if p < 0.0 {
                errors.push(format!("sequences[{i}].power: must be nonnegative"));
            }
        }
        if seq.jacobi_pairs.is_some() && !seq.factorial {
            errors.push(format!(
                "sequences[{i}].jacobi_pairs: exact moments exist for the factorial \
                 family only"
            ));
        }
    }
    if errors.is_empty() {
        Ok(file)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(text: &str) -> Result<ValidatedInstance, Vec<String>> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| vec![e.to_string()])?;
        validate(file)
    }

    #[test]
    fn shorthand_instance_parses() {
        let inst = parse_str(
            r#"{"schema": 1, "name": "c3", "pointwise": 3, "psd_blocks": true,
                "tasks": [{"task": "compare"}]}"#,
        )
        .unwrap();
        assert_eq!(inst.algebra.dim(), 3);
        assert!(inst.algebra.is_commutative());
    }

    #[test]
    fn missing_unit_names_the_field() {
        let err = parse_str(
            r#"{"schema": 1, "name": "bad", "psd_blocks": true,
                "structure": {"dim": 1, "mult": [[[1]]], "star": [[1]]},
                "tasks": []}"#,
        )
        .unwrap_err();
        assert!(err[0].contains("unit"), "{err:?}");
    }

    #[test]
    fn non_positive_generator_reports_witness() {
        let err = parse_str(
            r#"{"schema": 1, "name": "bad-gen", "pointwise": 2,
                "functionals": {"g": [1.0, -0.001]},
                "cone_generators": ["g"],
                "tasks": []}"#,
        )
        .unwrap_err();
        assert!(
            err.iter().any(|e| e.contains("algebraic positivity")),
            "{err:?}"
        );
        assert!(err.iter().any(|e| e.contains("-1.000e-3")), "{err:?}");
    }

    #[test]
    fn unresolved_references_are_collected() {
        let err = parse_str(
            r#"{"schema": 1, "name": "refs", "pointwise": 2,
                "functionals": {"d1": [1, 0]},
                "cone_generators": ["d1"],
                "candidate_states": ["w"],
                "tasks": [{"task": "gns", "state": "w"},
                          {"task": "moments", "state": "w", "observable": "a"}]}"#,
        )
        .unwrap_err();
        assert!(err.iter().any(|e| e.contains("candidate_states")), "{err:?}");
        assert!(err.iter().any(|e| e.contains("observable")), "{err:?}");
    }

    #[test]
    fn complex_scalars_and_raw_structure() {
        // the two-element group algebra from raw structure constants
        let inst = parse_str(
            r#"{"schema": 1, "name": "z2", "seed": 3,
                "structure": {
                  "dim": 2,
                  "mult": [[[1, 0], [0, 1]], [[0, 1], [1, 0]]],
                  "star": [[1, 0], [0, 1]],
                  "unit": [1, 0]
                },
                "functionals": {"h": [[1, 0], [0, 0]]},
                "cone_generators": ["h"],
                "tasks": []}"#,
        )
        .unwrap();
        assert!(inst.algebra.is_commutative());
        assert_eq!(inst.seed, 3);
    }
}
