//! Report bundle: one record per task, every residual and margin
//! included, emitted either as human-readable tables or as structured
//! JSON that parses back to the identical bundle.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const REPORT_SCHEMA: u32 = 1;

/// Replaces non-finite values, which have no JSON encoding, with None.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportBundle {
    pub schema: u32,
    pub name: String,
    pub seed: u64,
    pub algebra: AlgebraInfo,
    pub cone: ConeInfo,
    pub audit: Audit,
    pub sections: Vec<TaskReport>,
    pub warnings: Vec<String>,
    pub capability_notes: Vec<String>,
    pub inconsistencies: Vec<String>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraInfo {
    pub dim: usize,
    pub commutative: bool,
    pub blocks: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeInfo {
    pub kind: String,
    pub generators: usize,
    pub closure_warnings: Vec<String>,
}

/// Hypothesis flags accumulated while tasks run. Later checks are
/// gated on them: a theorem is only enforced when its hypotheses have
/// not been observed to fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Audit {
    pub commutative: bool,
    pub symmetric: Option<bool>,
    pub order_axioms: Option<bool>,
    pub partial_order: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionReport {
    pub name: String,
    pub observed: usize,
    pub expected: usize,
    pub pure: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "section", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskReport {
    Symmetric {
        tested: usize,
        failures: usize,
        pass: bool,
    },
    ConeAxioms {
        unit_positive: bool,
        translation_ok: bool,
        congruence_ok: bool,
        congruence_failures: Vec<String>,
        partial_order: bool,
        pass: bool,
    },
    Gns {
        state: String,
        quotient_dim: usize,
        commutant_dim: usize,
        ideal_residual: Option<f64>,
        homomorphism_residual: Option<f64>,
        star_residual: Option<f64>,
        unit_residual: Option<f64>,
        recovery_residual: Option<f64>,
    },
    Purity {
        state: String,
        pure: bool,
        multiplicativity_defect: Option<f64>,
        criteria: Vec<CriterionReport>,
    },
    Compare {
        characters: usize,
        non_positive: usize,
        degenerate: bool,
        pure_states: Option<usize>,
        characters_all_pure: Option<bool>,
        sets_match: Option<bool>,
        match_distance: Option<f64>,
    },
    Moments {
        state: String,
        observable: String,
        n_max: usize,
        op_norm: Option<f64>,
        hankel_rows: usize,
        hankel_min_eig: Option<f64>,
        hankel_ok: bool,
        usable_pairs: usize,
        min_root_slack: Option<f64>,
        roots_nondecreasing: bool,
        min_convexity_slack: Option<f64>,
        log_convex: bool,
        max_root: Option<f64>,
        roots_below_norm: bool,
        fit_alpha: Option<f64>,
        fit_points: usize,
        fit_verdict: String,
        carleman: String,
    },
    Stieltjes {
        state: String,
        observable: String,
        branch: String,
        expectation: Option<f64>,
        variance: Option<f64>,
        min_term: Option<f64>,
        lower_bound: Option<f64>,
        self_bound_slack: Option<f64>,
        cross_bound_slack: Option<f64>,
        tail_slack: Option<f64>,
        bounds_ok: bool,
        sampled: usize,
    },
    Jacobi {
        state: String,
        observable: String,
        pairs_requested: usize,
        pairs: usize,
        truncated: bool,
        alpha: Vec<f64>,
        beta: Vec<f64>,
    },
    Coercive {
        q: String,
        r: String,
        epsilon: Option<f64>,
        lambda: Option<f64>,
        sum_bound_margin: Option<f64>,
        product_margin: Option<f64>,
        ok: bool,
    },
    Qdown {
        target: String,
        member: bool,
        product: Option<Vec<usize>>,
        lambda: Option<f64>,
    },
    Regularity {
        verdict: String,
        details: String,
    },
    Skipped {
        task: String,
        reason: String,
    },
}

impl ReportBundle {
    pub fn exit_code(&self) -> i32 {
        if self.inconsistencies.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

fn opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.3e}"),
        None => "-".into(),
    }
}

fn yn(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn opt_yn(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "yes",
        Some(false) => "no",
        None => "-",
    }
}

pub fn render_text(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "instance {} (schema {}, seed {})",
        bundle.name, bundle.schema, bundle.seed
    );
    let blocks = match &bundle.algebra.blocks {
        Some(b) => format!("{b:?}"),
        None => "none".into(),
    };
    let _ = writeln!(
        w,
        "algebra: dim {}, commutative {}, blocks {}",
        bundle.algebra.dim,
        yn(bundle.algebra.commutative),
        blocks
    );
    let _ = writeln!(
        w,
        "cone: {} ({} generators)",
        bundle.cone.kind, bundle.cone.generators
    );
    for msg in &bundle.cone.closure_warnings {
        let _ = writeln!(w, "  closure: {msg}");
    }
    let _ = writeln!(
        w,
        "audit: commutative={} symmetric={} order-axioms={} partial-order={}",
        yn(bundle.audit.commutative),
        opt_yn(bundle.audit.symmetric),
        opt_yn(bundle.audit.order_axioms),
        opt_yn(bundle.audit.partial_order)
    );
    for (i, section) in bundle.sections.iter().enumerate() {
        render_section(w, i, section);
    }
    for msg in &bundle.capability_notes {
        let _ = writeln!(w, "capability: {msg}");
    }
    for msg in &bundle.warnings {
        let _ = writeln!(w, "warning: {msg}");
    }
    for msg in &bundle.inconsistencies {
        let _ = writeln!(w, "inconsistency: {msg}");
    }
    let _ = writeln!(w, "verdict: {}", bundle.verdict);
    out
}

fn render_section(w: &mut String, i: usize, section: &TaskReport) {
    let _ = match section {
        TaskReport::Symmetric {
            tested,
            failures,
            pass,
        } => writeln!(
            w,
            "[{i}] symmetric      tested={tested} failures={failures} pass={}",
            yn(*pass)
        ),
        TaskReport::ConeAxioms {
            unit_positive,
            translation_ok,
            congruence_ok,
            congruence_failures,
            partial_order,
            pass,
        } => {
            let _ = writeln!(
                w,
                "[{i}] cone-axioms    unit={} translation={} congruence={} partial-order={} pass={}",
                yn(*unit_positive),
                yn(*translation_ok),
                yn(*congruence_ok),
                yn(*partial_order),
                yn(*pass)
            );
            for msg in congruence_failures {
                let _ = writeln!(w, "      congruence failure: {msg}");
            }
            Ok(())
        }
        TaskReport::Gns {
            state,
            quotient_dim,
            commutant_dim,
            ideal_residual,
            homomorphism_residual,
            star_residual,
            unit_residual,
            recovery_residual,
        } => writeln!(
            w,
            "[{i}] gns {state}      quotient={quotient_dim} commutant={commutant_dim} \
             ideal={} hom={} star={} unit={} recovery={}",
            opt(*ideal_residual),
            opt(*homomorphism_residual),
            opt(*star_residual),
            opt(*unit_residual),
            opt(*recovery_residual)
        ),
        TaskReport::Purity {
            state,
            pure,
            multiplicativity_defect,
            criteria,
        } => {
            let _ = writeln!(
                w,
                "[{i}] purity {state}   pure={} mult-defect={}",
                yn(*pure),
                opt(*multiplicativity_defect)
            );
            for c in criteria {
                let _ = writeln!(
                    w,
                    "      {}: observed={} expected={} pure={}",
                    c.name,
                    c.observed,
                    c.expected,
                    yn(c.pure)
                );
            }
            Ok(())
        }
        TaskReport::Compare {
            characters,
            non_positive,
            degenerate,
            pure_states,
            characters_all_pure,
            sets_match,
            match_distance,
        } => writeln!(
            w,
            "[{i}] compare        characters={characters} non-positive={non_positive} \
             degenerate={} pure-states={} chars-pure={} match={} distance={}",
            yn(*degenerate),
            pure_states.map_or("-".into(), |n| n.to_string()),
            opt_yn(*characters_all_pure),
            opt_yn(*sets_match),
            opt(*match_distance)
        ),
        TaskReport::Moments {
            state,
            observable,
            n_max,
            op_norm,
            hankel_rows,
            hankel_min_eig,
            hankel_ok,
            usable_pairs,
            min_root_slack,
            roots_nondecreasing,
            min_convexity_slack,
            log_convex,
            max_root,
            roots_below_norm,
            fit_alpha,
            fit_points,
            fit_verdict,
            carleman,
        } => {
            let _ = writeln!(
                w,
                "[{i}] moments {state}/{observable} n={n_max} op-norm={} carleman={carleman}",
                opt(*op_norm)
            );
            let _ = writeln!(
                w,
                "      hankel rows={hankel_rows} min-eig={} ok={}",
                opt(*hankel_min_eig),
                yn(*hankel_ok)
            );
            let _ = writeln!(
                w,
                "      growth pairs={usable_pairs} root-slack={} nondecreasing={} \
                 convexity-slack={} log-convex={} max-root={} below-norm={}",
                opt(*min_root_slack),
                yn(*roots_nondecreasing),
                opt(*min_convexity_slack),
                yn(*log_convex),
                opt(*max_root),
                yn(*roots_below_norm)
            );
            writeln!(
                w,
                "      fit alpha={} points={fit_points} verdict={fit_verdict}",
                opt(*fit_alpha)
            )
        }
        TaskReport::Stieltjes {
            state,
            observable,
            branch,
            expectation,
            variance,
            min_term,
            lower_bound,
            self_bound_slack,
            cross_bound_slack,
            tail_slack,
            bounds_ok,
            sampled,
        } => {
            let _ = writeln!(
                w,
                "[{i}] stieltjes {state}/{observable} branch={branch} expectation={} \
                 variance={} min-term={} lower-bound={}",
                opt(*expectation),
                opt(*variance),
                opt(*min_term),
                opt(*lower_bound)
            );
            writeln!(
                w,
                "      self={} cross={} tail={} ok={} sampled={sampled}",
                opt(*self_bound_slack),
                opt(*cross_bound_slack),
                opt(*tail_slack),
                yn(*bounds_ok)
            )
        }
        TaskReport::Jacobi {
            state,
            observable,
            pairs_requested,
            pairs,
            truncated,
            alpha,
            beta,
        } => {
            let _ = writeln!(
                w,
                "[{i}] jacobi {state}/{observable} pairs={pairs}/{pairs_requested} truncated={}",
                yn(*truncated)
            );
            let fmt = |v: &[f64]| {
                v.iter()
                    .map(|x| format!("{x:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(w, "      alpha=[{}]", fmt(alpha));
            writeln!(w, "      beta=[{}]", fmt(beta))
        }
        TaskReport::Coercive {
            q,
            r,
            epsilon,
            lambda,
            sum_bound_margin,
            product_margin,
            ok,
        } => writeln!(
            w,
            "[{i}] coercive {q},{r}  epsilon={} lambda={} sum-margin={} product-margin={} ok={}",
            opt(*epsilon),
            opt(*lambda),
            opt(*sum_bound_margin),
            opt(*product_margin),
            yn(*ok)
        ),
        TaskReport::Qdown {
            target,
            member,
            product,
            lambda,
        } => writeln!(
            w,
            "[{i}] qdown {target}   member={} product={} lambda={}",
            yn(*member),
            product
                .as_ref()
                .map_or("-".into(), |p| format!("{p:?}")),
            opt(*lambda)
        ),
        TaskReport::Regularity { verdict, details } => {
            writeln!(w, "[{i}] regularity     verdict={verdict} ({details})")
        }
        TaskReport::Skipped { task, reason } => {
            writeln!(w, "[{i}] {task}        skipped: {reason}")
        }
    };
}

/// Standalone moment-family report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsBundle {
    pub schema: u32,
    pub name: String,
    pub count: usize,
    pub rows: Vec<FamilyRow>,
    pub inconsistencies: Vec<String>,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRow {
    pub name: String,
    pub family: String,
    pub closed_form: String,
    pub fit_alpha: Option<f64>,
    pub fit_points: usize,
    pub fit_verdict: String,
    pub agreement: String,
    pub min_root_slack: Option<f64>,
    pub roots_nondecreasing: bool,
    pub min_convexity_slack: Option<f64>,
    pub log_convex: bool,
    pub jacobi_alpha: Option<Vec<f64>>,
    pub jacobi_beta: Option<Vec<f64>>,
}

impl MomentsBundle {
    pub fn exit_code(&self) -> i32 {
        if self.inconsistencies.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }
}

pub fn render_moments_text(bundle: &MomentsBundle) -> String {
    let mut out = String::new();
    let w = &mut out;
    let _ = writeln!(
        w,
        "moment families {} (schema {}, count {})",
        bundle.name, bundle.schema, bundle.count
    );
    for row in &bundle.rows {
        let _ = writeln!(
            w,
            "  {} [{}]: closed={} fit={} (alpha={} points={}) agreement={}",
            row.name,
            row.family,
            row.closed_form,
            row.fit_verdict,
            opt(row.fit_alpha),
            row.fit_points,
            row.agreement
        );
        let _ = writeln!(
            w,
            "      root-slack={} nondecreasing={} convexity-slack={} log-convex={}",
            opt(row.min_root_slack),
            yn(row.roots_nondecreasing),
            opt(row.min_convexity_slack),
            yn(row.log_convex)
        );
        if let (Some(a), Some(b)) = (&row.jacobi_alpha, &row.jacobi_beta) {
            let fmt = |v: &[f64]| {
                v.iter()
                    .map(|x| format!("{x:.6}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            };
            let _ = writeln!(w, "      jacobi alpha=[{}] beta=[{}]", fmt(a), fmt(b));
        }
    }
    for msg in &bundle.inconsistencies {
        let _ = writeln!(w, "inconsistency: {msg}");
    }
    let _ = writeln!(w, "verdict: {}", bundle.verdict);
    out
}
