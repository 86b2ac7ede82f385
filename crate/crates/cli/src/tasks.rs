//! Sequential task runner for one instance, parallel corpus driver,
//! and the standalone moment-family runner.
//!
//! Exit-code policy: 0 when every enforced check passes, 2 when a
//! verdict contradicts a theorem whose audited hypotheses hold, 1 for
//! operational problems (unreadable files, schema violations, invalid
//! task inputs). Capability limits are recorded and never fatal, and
//! failed hypotheses downgrade dependent checks to warnings.

use std::path::Path;

use nalgebra::DMatrix;

use ostar::character;
use ostar::cone::{ConeKind, DominantSet, QdownOutcome, RegularityVerdict};
use ostar::functional::State;
use ostar::gns::GnsData;
use ostar::jacobi;
use ostar::moments::{self, CarlemanVerdict, MomentFamily, StieltjesBranch};
use ostar::{C64, Element, Error};

use crate::instance::{self, MomentsFile, TaskSpec, ValidatedInstance};
use crate::report::*;

/// Command-line overrides applied on top of instance-level defaults.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

/// Residual ceiling for representation contracts; exceeding it on a
/// clean instance is a theorem violation, not noise.
const RESIDUAL_TOL: f64 = 1e-10;
/// Matching distance for comparing enumerated state sets.
const MATCH_TOL: f64 = 1e-8;
/// Default relative tolerance for expected-value comparisons.
const EXPECT_TOL: f64 = 1e-6;

/// Expands the instance seed into per-task seeds.
fn task_seed(base: u64, index: usize) -> u64 {
    base.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn run_instance_file(path: &Path, ov: &Overrides) -> Result<ReportBundle, Vec<String>> {
    let inst = instance::parse_instance(path)?;
    run_validated(&inst, ov)
}

pub fn run_validated(
    inst: &ValidatedInstance,
    ov: &Overrides,
) -> Result<ReportBundle, Vec<String>> {
    let alg = &*inst.algebra;
    let cone = &inst.cone;
    let seed = ov.seed.unwrap_or(inst.seed);
    let tol = ov.tol.unwrap_or(EXPECT_TOL);

    let mut audit = Audit {
        commutative: alg.is_commutative(),
        symmetric: None,
        order_axioms: None,
        partial_order: None,
    };
    let mut sections = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut capability_notes: Vec<String> = Vec::new();
    let mut inconsistencies: Vec<String> = Vec::new();

    for (i, task) in inst.tasks.iter().enumerate() {
        let base = task_seed(seed, i);
        let outcome = run_task(
            inst, task, base, tol, &mut audit, &mut warnings, &mut inconsistencies,
        );
        match outcome {
            Ok(section) => sections.push(section),
            Err(Error::Capability(msg)) => {
                capability_notes.push(format!("tasks[{i}]: {msg}"));
                sections.push(TaskReport::Skipped {
                    task: task_name(task).into(),
                    reason: msg,
                });
            }
            Err(Error::Inconsistency(msg)) => {
                inconsistencies.push(format!("tasks[{i}]: {msg}"));
                sections.push(TaskReport::Skipped {
                    task: task_name(task).into(),
                    reason: "internal routes disagreed".into(),
                });
            }
            Err(e) => return Err(vec![format!("tasks[{i}]: {e}")]),
        }
    }

    let verdict = if inconsistencies.is_empty() {
        "pass"
    } else {
        "inconsistent"
    };
    Ok(ReportBundle {
        schema: REPORT_SCHEMA,
        name: inst.name.clone(),
        seed,
        algebra: AlgebraInfo {
            dim: alg.dim(),
            commutative: alg.is_commutative(),
            blocks: alg.block_sizes().map(|b| b.to_vec()),
        },
        cone: ConeInfo {
            kind: match cone.kind() {
                ConeKind::FunctionalGenerated => "functional_generated".into(),
                ConeKind::BlockPsd => "block_psd".into(),
            },
            generators: cone.generators().map_or(0, |g| g.len()),
            closure_warnings: cone.closure_warnings().to_vec(),
        },
        audit,
        sections,
        warnings,
        capability_notes,
        inconsistencies,
        verdict: verdict.into(),
    })
}

fn task_name(task: &TaskSpec) -> &'static str {
    match task {
        TaskSpec::Symmetric { .. } => "symmetric",
        TaskSpec::ConeAxioms { .. } => "cone_axioms",
        TaskSpec::Gns { .. } => "gns",
        TaskSpec::Purity { .. } => "purity",
        TaskSpec::Compare { .. } => "compare",
        TaskSpec::Moments { .. } => "moments",
        TaskSpec::Stieltjes { .. } => "stieltjes",
        TaskSpec::Jacobi { .. } => "jacobi",
        TaskSpec::Coercive { .. } => "coercive",
        TaskSpec::Qdown { .. } => "qdown",
        TaskSpec::Regularity { .. } => "regularity",
    }
}

#[allow(clippy::too_many_arguments)]
fn run_task(
    inst: &ValidatedInstance,
    task: &TaskSpec,
    base_seed: u64,
    tol: f64,
    audit: &mut Audit,
    warnings: &mut Vec<String>,
    inconsistencies: &mut Vec<String>,
) -> Result<TaskReport, Error> {
    let alg = &*inst.algebra;
    let cone = &inst.cone;
    let state = |name: &str| -> &State { &inst.states[name] };
    let element = |name: &str| -> &Element { &inst.elements[name] };

    match task {
        TaskSpec::Symmetric { samples, seed } => {
            let report = alg.symmetric_report(*samples, seed.unwrap_or(base_seed))?;
            audit.symmetric = Some(report.pass);
            if !report.pass {
                warnings.push(format!(
                    "symmetric probe failed on {} of {} elements; \
                     spectral arguments are not audited",
                    report.failures.len(),
                    report.tested
                ));
            }
            Ok(TaskReport::Symmetric {
                tested: report.tested,
                failures: report.failures.len(),
                pass: report.pass,
            })
        }

        TaskSpec::ConeAxioms { seed } => {
            let report = cone.validate_cone_axioms(seed.unwrap_or(base_seed))?;
            audit.order_axioms = Some(report.pass);
            audit.partial_order = Some(report.partial_order);
            if !report.pass {
                warnings.push(
                    "degraded order: cone axioms failed; order-dependent verdicts are \
                     not enforced"
                        .into(),
                );
            }
            Ok(TaskReport::ConeAxioms {
                unit_positive: report.unit_positive,
                translation_ok: report.translation_ok,
                congruence_ok: report.congruence_ok,
                congruence_failures: report.congruence_failures,
                partial_order: report.partial_order,
                pass: report.pass,
            })
        }

        TaskSpec::Gns {
            state: name,
            expect_quotient_dim,
            expect_commutant_dim,
        } => {
            let s = state(name);
            let gns = GnsData::build(alg, s.functional())?;
            let dim = alg.dim();
            let reps: Vec<DMatrix<C64>> = (0..dim)
                .map(|k| gns.represent(&alg.basis_element(k)))
                .collect::<Result<_, _>>()?;
            let mut hom = 0.0f64;
            for p in 0..dim {
                for q in 0..dim {
                    let prod = alg.multiply(&alg.basis_element(p), &alg.basis_element(q))?;
                    let lhs = gns.represent(&prod)?;
                    hom = hom.max((lhs - &reps[p] * &reps[q]).norm());
                }
            }
            let mut star_res = 0.0f64;
            for p in 0..dim {
                let lhs = gns.represent(&alg.star(&alg.basis_element(p))?)?;
                star_res = star_res.max((lhs - reps[p].adjoint()).norm());
            }
            let unit_res = {
                let r1 = gns.represent(&alg.unit())?;
                (&r1 - DMatrix::<C64>::identity(gns.quotient_dim(), gns.quotient_dim())).norm()
            };
            let mut recovery = 0.0f64;
            for k in 0..dim {
                let b = alg.basis_element(k);
                let direct = s.functional().apply(&b)?;
                let via_rep = gns.recover(&b)?;
                recovery = recovery.max((direct - via_rep).norm());
            }
            let section = "gns";
            for (what, value) in [
                ("homomorphism residual", hom),
                ("star residual", star_res),
                ("unit residual", unit_res),
                ("state recovery residual", recovery),
                ("ideal residual", gns.ideal_residual()),
            ] {
                if value > RESIDUAL_TOL {
                    inconsistencies.push(format!(
                        "{section}: {what} {value:.3e} exceeds {RESIDUAL_TOL:.0e}"
                    ));
                }
            }
            expect_usize(
                inconsistencies,
                section,
                "quotient dimension",
                gns.quotient_dim(),
                *expect_quotient_dim,
            );
            expect_usize(
                inconsistencies,
                section,
                "commutant dimension",
                gns.commutant_dimension(),
                *expect_commutant_dim,
            );
            Ok(TaskReport::Gns {
                state: name.clone(),
                quotient_dim: gns.quotient_dim(),
                commutant_dim: gns.commutant_dimension(),
                ideal_residual: finite(gns.ideal_residual()),
                homomorphism_residual: finite(hom),
                star_residual: finite(star_res),
                unit_residual: finite(unit_res),
                recovery_residual: finite(recovery),
            })
        }

        TaskSpec::Purity {
            state: name,
            expect_pure,
        } => {
            let s = state(name);
            let report = cone.is_pure(s)?;
            let defect = character::multiplicativity_defect(alg, s.functional())?;
            expect_bool(inconsistencies, "purity", "pure", report.pure, *expect_pure);
            Ok(TaskReport::Purity {
                state: name.clone(),
                pure: report.pure,
                multiplicativity_defect: finite(defect),
                criteria: report
                    .criteria
                    .into_iter()
                    .map(|c| CriterionReport {
                        name: c.name.into(),
                        observed: c.observed,
                        expected: c.expected,
                        pure: c.pure,
                    })
                    .collect(),
            })
        }

        TaskSpec::Compare { expect_count, seed } => {
            let chars = character::enumerate_characters(cone, seed.unwrap_or(base_seed))?;
            let order_ok = audit.order_axioms != Some(false);
            if chars.degenerate {
                warnings.push(
                    "character enumeration hit a degenerate eigenvalue cluster; \
                     the list may be incomplete"
                        .into(),
                );
            }

            // characters are extreme among states, provided the order
            // axioms actually hold
            let characters_all_pure = if order_ok {
                let mut all = true;
                for s in &chars.states {
                    let p = cone.is_pure(s)?;
                    if !p.pure {
                        all = false;
                        inconsistencies
                            .push("compare: a character failed the purity test".into());
                    }
                }
                Some(all)
            } else {
                warnings.push("compare: purity of characters not enforced (degraded order)".into());
                None
            };

            let pure_states = match cone.enumerate_pure_states() {
                Ok(list) => Some(list),
                Err(Error::Capability(msg)) => {
                    // recorded, not fatal
                    warnings.push(format!("compare: pure-state enumeration unavailable: {msg}"));
                    None
                }
                Err(e) => return Err(e),
            };

            // in the commutative case with a clean order the two
            // enumerations must coincide
            let mut sets_match = None;
            let mut match_distance = None;
            if let Some(pure) = &pure_states {
                if audit.commutative && order_ok && !chars.degenerate {
                    let (matched, dist) = match_state_sets(&chars.states, pure);
                    sets_match = Some(matched);
                    match_distance = finite(dist);
                    if !matched {
                        inconsistencies.push(format!(
                            "compare: {} characters vs {} pure states \
                             (max matching distance {dist:.3e})",
                            chars.states.len(),
                            pure.len()
                        ));
                    }
                } else if !order_ok {
                    warnings
                        .push("compare: set comparison skipped (degraded order)".into());
                }
            }

            expect_usize(
                inconsistencies,
                "compare",
                "character count",
                chars.states.len(),
                *expect_count,
            );
            Ok(TaskReport::Compare {
                characters: chars.states.len(),
                non_positive: chars.non_positive.len(),
                degenerate: chars.degenerate,
                pure_states: pure_states.map(|v| v.len()),
                characters_all_pure,
                sets_match,
                match_distance,
            })
        }

        TaskSpec::Moments {
            state: name,
            observable,
            n_max,
            hankel_rows,
            expect_op_norm,
        } => {
            let s = state(name);
            let a = element(observable);
            let gns = GnsData::build(alg, s.functional())?;
            let op = gns.op_norm(a)?;
            let seq = moments::moment_sequence(&gns, a, *n_max)?;
            let rows = (*hankel_rows).min(seq.max_index() / 2 + 1).max(1);
            let hmin = seq.hankel_min_eig(rows)?;
            let hankel_ok = hmin >= -1e-10;
            if !hankel_ok {
                inconsistencies.push(format!(
                    "moments: balanced Hankel matrix of a state has negative \
                     eigenvalue {hmin:.3e}"
                ));
            }
            let growth = seq.growth_report(Some(op));
            if !growth.roots_nondecreasing {
                inconsistencies.push(format!(
                    "moments: normalized roots decreased (slack {:.3e})",
                    growth.min_root_slack
                ));
            }
            if !growth.log_convex {
                inconsistencies.push(format!(
                    "moments: even moments not log-convex (slack {:.3e})",
                    growth.min_convexity_slack
                ));
            }
            let roots_below = growth.roots_below_norm.unwrap_or(false);
            if !roots_below {
                inconsistencies.push(format!(
                    "moments: normalized root {:.6} exceeds operator norm {op:.6}",
                    growth.max_root
                ));
            }
            let fit = seq.carleman_fit();
            // a norm-bounded observable always has divergent Carleman
            // series; a convergent fit verdict contradicts that
            let carleman = if roots_below {
                "divergent"
            } else {
                verdict_str(fit.verdict)
            };
            if matches!(fit.verdict, CarlemanVerdict::Convergent) {
                inconsistencies.push(
                    "moments: exponent fit claims convergence for a norm-bounded \
                     observable"
                        .into(),
                );
            }
            expect_f64(
                inconsistencies,
                "moments",
                "operator norm",
                op,
                *expect_op_norm,
                tol,
            );
            Ok(TaskReport::Moments {
                state: name.clone(),
                observable: observable.clone(),
                n_max: *n_max,
                op_norm: finite(op),
                hankel_rows: rows,
                hankel_min_eig: finite(hmin),
                hankel_ok,
                usable_pairs: growth.usable_pairs,
                min_root_slack: finite(growth.min_root_slack),
                roots_nondecreasing: growth.roots_nondecreasing,
                min_convexity_slack: finite(growth.min_convexity_slack),
                log_convex: growth.log_convex,
                max_root: finite(growth.max_root),
                roots_below_norm: roots_below,
                fit_alpha: finite(fit.alpha),
                fit_points: fit.points,
                fit_verdict: verdict_str(fit.verdict).into(),
                carleman: carleman.into(),
            })
        }

        TaskSpec::Stieltjes {
            state: name,
            observable,
            n_max,
            samples,
            seed,
        } => {
            let s = state(name);
            let a = element(observable);
            let gns = GnsData::build(alg, s.functional())?;
            let report =
                moments::stieltjes_check(&gns, alg, a, *n_max, *samples, seed.unwrap_or(base_seed))?;
            let (branch, expectation, variance, min_term, lower_bound, branch_ok) =
                match report.branch {
                    StieltjesBranch::Zero {
                        expectation,
                        variance,
                    } => ("zero", Some(expectation), Some(variance), None, None, true),
                    StieltjesBranch::Divergence {
                        min_term,
                        lower_bound,
                    } => (
                        "divergence",
                        None,
                        None,
                        Some(min_term),
                        Some(lower_bound),
                        min_term + 1e-12 >= lower_bound * (1.0 - 1e-9),
                    ),
                };
            let bounds_ok =
                report.self_bound_ok && report.cross_bound_ok && report.tail_ok && branch_ok;
            if !bounds_ok {
                inconsistencies.push(format!(
                    "stieltjes: dichotomy bounds violated (self {:.3e}, cross {:.3e}, \
                     tail {:.3e}, branch ok {branch_ok})",
                    report.self_bound_slack, report.cross_bound_slack, report.tail_slack
                ));
            }
            Ok(TaskReport::Stieltjes {
                state: name.clone(),
                observable: observable.clone(),
                branch: branch.into(),
                expectation: expectation.and_then(finite),
                variance: variance.and_then(finite),
                min_term: min_term.and_then(finite),
                lower_bound: lower_bound.and_then(finite),
                self_bound_slack: finite(report.self_bound_slack),
                cross_bound_slack: finite(report.cross_bound_slack),
                tail_slack: finite(report.tail_slack),
                bounds_ok,
                sampled: report.sampled,
            })
        }

        TaskSpec::Jacobi {
            state: name,
            observable,
            pairs,
            expect_truncated,
            expect_alpha,
            expect_beta,
        } => {
            let s = state(name);
            let a = element(observable);
            // moments are taken by direct element powers so that exact
            // dyadic values reach the rational kernel unperturbed
            let mut values = Vec::with_capacity(2 * pairs);
            for n in 0..2 * pairs {
                let z = s.expectation(&alg.power(a, n)?)?;
                if z.im.abs() > 1e-9 * (1.0 + z.re.abs()) {
                    return Err(Error::invalid(format!(
                        "moment {n} of a non-Hermitian pair has imaginary part {:.3e}",
                        z.im
                    )));
                }
                values.push(z.re);
            }
            let rats = jacobi::rationals_from_f64(&values)?;
            let data = jacobi::jacobi_from_moments(&rats, *pairs)?;
            let alpha = data.alpha_f64();
            let beta = data.beta_f64();
            expect_bool(
                inconsistencies,
                "jacobi",
                "truncation",
                data.truncated,
                *expect_truncated,
            );
            expect_vec(inconsistencies, "jacobi", "alpha", &alpha, expect_alpha, tol);
            expect_vec(inconsistencies, "jacobi", "beta", &beta, expect_beta, tol);
            Ok(TaskReport::Jacobi {
                state: name.clone(),
                observable: observable.clone(),
                pairs_requested: *pairs,
                pairs: data.pairs(),
                truncated: data.truncated,
                alpha,
                beta,
            })
        }

        TaskSpec::Coercive { q, r } => {
            let report = cone.check_coercive_product(element(q), element(r))?;
            if !report.ok {
                inconsistencies.push(format!(
                    "coercive: product domination failed (sum margin {:.3e}, \
                     product margin {:.3e})",
                    report.sum_bound_margin, report.product_margin
                ));
            }
            Ok(TaskReport::Coercive {
                q: q.clone(),
                r: r.clone(),
                epsilon: finite(report.epsilon),
                lambda: finite(report.lambda),
                sum_bound_margin: finite(report.sum_bound_margin),
                product_margin: finite(report.product_margin),
                ok: report.ok,
            })
        }

        TaskSpec::Qdown {
            dominant,
            target,
            max_len,
            expect_member,
        } => {
            let set = DominantSet::new(dominant.iter().map(|n| element(n).clone()).collect());
            let outcome = cone.qdown_member(&set, element(target), *max_len)?;
            let (member, product, lambda) = match outcome {
                QdownOutcome::Member { product, lambda } => (true, Some(product), Some(lambda)),
                QdownOutcome::Unknown => (false, None, None),
            };
            match expect_member {
                Some(true) if !member => inconsistencies
                    .push("qdown: expected a membership witness, search found none".into()),
                Some(false) if member => {
                    inconsistencies.push("qdown: unexpected membership witness".into())
                }
                _ => {}
            }
            Ok(TaskReport::Qdown {
                target: target.clone(),
                member,
                product,
                lambda: lambda.and_then(finite),
            })
        }

        TaskSpec::Regularity {
            squares,
            seed,
            expect,
        } => {
            let report = cone.regularity_check(seed.unwrap_or(base_seed), *squares)?;
            let verdict = match report.verdict {
                RegularityVerdict::Regular => "regular",
                RegularityVerdict::CounterexampleCandidate => "counterexample_candidate",
                RegularityVerdict::Inconclusive => "inconclusive",
            };
            if let Some(expected) = expect {
                if expected != verdict {
                    inconsistencies.push(format!(
                        "regularity: verdict {verdict} does not match expected {expected}"
                    ));
                }
            }
            Ok(TaskReport::Regularity {
                verdict: verdict.into(),
                details: report.details,
            })
        }
    }
}

fn verdict_str(v: CarlemanVerdict) -> &'static str {
    match v {
        CarlemanVerdict::Divergent => "divergent",
        CarlemanVerdict::Convergent => "convergent",
        CarlemanVerdict::Inconclusive => "inconclusive",
    }
}

/// Pairs two state lists by sorted chart coordinates and reports the
/// worst covector distance; the lists match when the counts agree and
/// every pair is closer than the matching tolerance.
fn match_state_sets(left: &[State], right: &[State]) -> (bool, f64) {
    if left.len() != right.len() {
        return (false, f64::INFINITY);
    }
    let key = |s: &State| -> Vec<(i64, i64)> {
        s.functional()
            .covector()
            .iter()
            .map(|z| ((z.re * 1e12).round() as i64, (z.im * 1e12).round() as i64))
            .collect()
    };
    let mut l: Vec<&State> = left.iter().collect();
    let mut r: Vec<&State> = right.iter().collect();
    l.sort_by_key(|s| key(s));
    r.sort_by_key(|s| key(s));
    let mut dist = 0.0f64;
    for (a, b) in l.iter().zip(&r) {
        dist = dist.max(a.functional().distance(b.functional()));
    }
    (dist <= MATCH_TOL, dist)
}

fn expect_usize(
    inc: &mut Vec<String>,
    section: &str,
    what: &str,
    observed: usize,
    expected: Option<usize>,
) {
    if let Some(e) = expected {
        if observed != e {
            inc.push(format!("{section}: {what} is {observed}, expected {e}"));
        }
    }
}

fn expect_bool(
    inc: &mut Vec<String>,
    section: &str,
    what: &str,
    observed: bool,
    expected: Option<bool>,
) {
    if let Some(e) = expected {
        if observed != e {
            inc.push(format!("{section}: {what} is {observed}, expected {e}"));
        }
    }
}

fn expect_f64(
    inc: &mut Vec<String>,
    section: &str,
    what: &str,
    observed: f64,
    expected: Option<f64>,
    tol: f64,
) {
    if let Some(e) = expected {
        if (observed - e).abs() > tol * (1.0 + e.abs()) {
            inc.push(format!(
                "{section}: {what} is {observed:.9}, expected {e:.9}"
            ));
        }
    }
}

fn expect_vec(
    inc: &mut Vec<String>,
    section: &str,
    what: &str,
    observed: &[f64],
    expected: &Option<Vec<f64>>,
    tol: f64,
) {
    if let Some(e) = expected {
        if observed.len() != e.len() {
            inc.push(format!(
                "{section}: {what} has {} entries, expected {}",
                observed.len(),
                e.len()
            ));
            return;
        }
        for (k, (&o, &x)) in observed.iter().zip(e).enumerate() {
            if (o - x).abs() > tol * (1.0 + x.abs()) {
                inc.push(format!(
                    "{section}: {what}[{k}] is {o:.9}, expected {x:.9}"
                ));
            }
        }
    }
}

/// One corpus entry: the file stem plus either a finished bundle or the
/// operational errors that prevented one.
pub type CorpusEntry = (String, Result<ReportBundle, Vec<String>>);

/// Runs every `.json` instance in a directory. Instances are
/// independent, so they run on parallel threads; results are reported
/// in filename order and the exit code is the worst one observed.
pub fn run_corpus(dir: &Path, ov: &Overrides) -> Result<(Vec<CorpusEntry>, i32), String> {
    let mut paths: Vec<std::path::PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(format!("{}: no .json instances found", dir.display()));
    }
    let results: Vec<CorpusEntry> = std::thread::scope(|scope| {
        let handles: Vec<_> = paths
            .iter()
            .map(|path| {
                scope.spawn(move || {
                    let stem = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_else(|| path.display().to_string());
                    (stem, run_instance_file(path, ov))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("instance thread")).collect()
    });
    let exit = results
        .iter()
        .map(|(_, r)| match r {
            Ok(bundle) => bundle.exit_code(),
            Err(_) => 1,
        })
        .max()
        .unwrap_or(0);
    Ok((results, exit))
}

/// Runs the standalone moment-family diagnostics.
pub fn run_moments_file(path: &Path) -> Result<MomentsBundle, Vec<String>> {
    let file = instance::parse_moments_file(path)?;
    run_moments(&file).map_err(|e| vec![e.to_string()])
}

pub fn run_moments(file: &MomentsFile) -> Result<MomentsBundle, Error> {
    let mut rows = Vec::new();
    let mut inconsistencies = Vec::new();
    for seq in &file.sequences {
        let family = seq.family()?;
        let logs = family.log_moments(file.count)?;
        let growth = moments::growth_from_logs(&logs, None);
        let fit = moments::exponent_fit(&logs);
        let closed = family.closed_form_carleman();
        if !growth.roots_nondecreasing || !growth.log_convex {
            inconsistencies.push(format!(
                "{}: growth checks failed (root slack {:.3e}, convexity slack {:.3e})",
                seq.name, growth.min_root_slack, growth.min_convexity_slack
            ));
        }
        let agreement = match (closed, fit.verdict) {
            (c, f) if c == f => "match",
            (_, CarlemanVerdict::Inconclusive) | (CarlemanVerdict::Inconclusive, _) => {
                "undecided"
            }
            _ => {
                inconsistencies.push(format!(
                    "{}: closed form says {}, exponent fit says {}",
                    seq.name,
                    verdict_str(closed),
                    verdict_str(fit.verdict)
                ));
                "conflict"
            }
        };
        let (jacobi_alpha, jacobi_beta) = match (&family, seq.jacobi_pairs) {
            (MomentFamily::Factorial, Some(pairs)) => {
                let data =
                    jacobi::jacobi_from_moments(&jacobi::exact_factorials(2 * pairs), pairs)?;
                (Some(data.alpha_f64()), Some(data.beta_f64()))
            }
            _ => (None, None),
        };
        rows.push(FamilyRow {
            name: seq.name.clone(),
            family: seq.family_label(),
            closed_form: verdict_str(closed).into(),
            fit_alpha: finite(fit.alpha),
            fit_points: fit.points,
            fit_verdict: verdict_str(fit.verdict).into(),
            agreement: agreement.into(),
            min_root_slack: finite(growth.min_root_slack),
            roots_nondecreasing: growth.roots_nondecreasing,
            min_convexity_slack: finite(growth.min_convexity_slack),
            log_convex: growth.log_convex,
            jacobi_alpha,
            jacobi_beta,
        });
    }
    let verdict = if inconsistencies.is_empty() {
        "pass"
    } else {
        "inconsistent"
    };
    Ok(MomentsBundle {
        schema: REPORT_SCHEMA,
        name: file.name.clone(),
        count: file.count,
        rows,
        inconsistencies,
        verdict: verdict.into(),
    })
}
