//! Seeded verification campaigns. Each suite checks one statement on sampled data and returns a
//! [`VerificationReport`] whose failures can be replayed from their serialized inputs.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::forms::{
    factorize_pair, find_strong_witness, gram_pair_from_maps, invertibility_preservation,
    is_bounded_estimate, preservation_check, scaled_isometry_check, Factorization,
    FactorizeOptions, MultiForm,
};
use crate::linalg::ONE;
use crate::module::{AModuleMap, ModuleVector, ToleranceConfig};
use crate::orthogonality::{
    bj_orthogonal_minimize, bj_orthogonal_witness, bj_symmetry_probe, condition_value, decide,
    ip_orthogonal, minimize_over_algebra, reversed_action_condition, strong_bj_orthogonal,
    OrthogonalityVerdict, Relation, SearchOptions, Witness,
};
use crate::report::{MapFixture, ReplayCase, VerificationReport};
use crate::sampling::{self, trial_rng};

/// Inputs shared by every suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub shape: AlgebraShape,
    pub k: usize,
    /// Arity of the forms in the factorization suite.
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    pub search: SearchOptions,
    /// Corrupt one check on purpose so the harness can show it notices.
    pub plant_violation: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            shape: AlgebraShape::matrix(2).expect("valid shape"),
            k: 2,
            n: 2,
            trials: 50,
            seed: 42,
            tolerances: ToleranceConfig::default(),
            search: SearchOptions::default(),
            plant_violation: false,
        }
    }
}

impl SuiteConfig {
    pub fn new(shape: AlgebraShape, k: usize, trials: usize, seed: u64) -> Self {
        Self {
            shape,
            k,
            trials,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.tolerances.validate()?;
        if self.k == 0 {
            return Err(Error::DimensionMismatch(
                "module rank k must be at least 1".into(),
            ));
        }
        if self.n == 0 {
            return Err(Error::DimensionMismatch(
                "form arity n must be at least 1".into(),
            ));
        }
        Ok(())
    }

    fn search_options(&self) -> SearchOptions {
        SearchOptions {
            seed: self.seed,
            ..self.search
        }
    }
}

/// Registry entry for a suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteInfo {
    pub id: &'static str,
    /// Alternative id accepted on the command line.
    pub alias: Option<&'static str>,
    pub statement: &'static str,
}

pub const SUITES: &[SuiteInfo] = &[
    SuiteInfo {
        id: "counterexample-reversed-action",
        alias: Some("example-2-1"),
        statement: "in M₂ with X = I and Y = E₁₁, X ⊥ˢ_B Y holds while ‖XA + Y‖ < ‖XA‖ at A = −Y",
    },
    SuiteInfo {
        id: "inner-product-equivalence",
        alias: Some("theorem-2-4"),
        statement: "⟨x,y⟩ = 0 iff |xa+y|² ≥ |xa|² for all a, iff |xa+y| ≥ |xa| for all a, iff ‖xa+y‖ ≥ ‖xa‖ for all a, and likewise with x and y exchanged",
    },
    SuiteInfo {
        id: "orthogonality-characterizations",
        alias: Some("section-2-list"),
        statement: "⟨x,y⟩ = 0 iff each classical modulus or norm identity or inequality in λ ∈ ℂ or a ∈ A holds; also iff y⟨y,x⟩ ⊥_B x",
    },
    SuiteInfo {
        id: "state-witness",
        alias: Some("lemma-2-2"),
        statement: "x ⊥_B y iff some state φ has φ(⟨x,x⟩) = ‖x‖² and φ(⟨x,y⟩) = 0",
    },
    SuiteInfo {
        id: "bj-symmetry",
        alias: Some("theorem-4-2"),
        statement: "x ⊥_B y implies ‖x + y‖ ≥ ‖y‖ for all pairs exactly when the algebra is ℂ",
    },
    SuiteInfo {
        id: "factorization",
        alias: None,
        statement: "if E is bounded and strong and F vanishes on the kernel of E, then F = cE for a single c",
    },
    SuiteInfo {
        id: "map-preservation",
        alias: Some("corollary-3-8"),
        statement: "for A-linear T and S, x ⊥ y implies Tx ⊥ Sy iff ⟨Tx, Sy⟩ = c⟨x, y⟩ for a single c",
    },
    SuiteInfo {
        id: "polarization",
        alias: None,
        statement: "a linear T with |Tx| = γ|x| for all x satisfies ⟨Tx, Ty⟩ = γ²⟨x, y⟩",
    },
];

/// Look up a suite by id or alias.
pub fn resolve_suite(id: &str) -> Result<&'static SuiteInfo> {
    SUITES
        .iter()
        .find(|s| s.id == id || s.alias == Some(id))
        .ok_or_else(|| Error::UnknownSuite(id.to_string()))
}

/// Every statement exercised by the suites, with the suite that covers it.
pub const COVERAGE: &[(&str, &str)] = &[
    (
        "strong BJ orthogonality does not give the reversed-action norm inequality",
        "counterexample-reversed-action",
    ),
    (
        "reversed-action modulus and norm inequalities characterize ⟨x,y⟩ = 0",
        "inner-product-equivalence",
    ),
    (
        "classical list of modulus and norm characterizations of ⟨x,y⟩ = 0",
        "orthogonality-characterizations",
    ),
    (
        "‖x + ya‖ = ‖x − ya‖ for all a iff y⟨y,x⟩ ⊥_B x iff x ⊥ y",
        "orthogonality-characterizations",
    ),
    (
        "state criterion for Birkhoff–James orthogonality",
        "state-witness",
    ),
    (
        "‖x + y‖ ≥ ‖y‖ under x ⊥_B y iff the algebra is ℂ",
        "bj-symmetry",
    ),
    ("algebra regarded as a module over itself", "bj-symmetry"),
    (
        "multi-A-linearity, boundedness and strongness of coefficient forms",
        "factorization",
    ),
    (
        "kernel preservation implies F = cE for arity 2",
        "factorization",
    ),
    (
        "kernel preservation implies F = cE for arity n",
        "factorization",
    ),
    (
        "kernel preservation implies F = cE for A-linear functionals over any algebra",
        "factorization",
    ),
    (
        "F preserves invertible values iff c is invertible",
        "factorization",
    ),
    (
        "pairs of A-linear maps preserving orthogonality are A-similarities",
        "map-preservation",
    ),
    (
        "linear maps with |Tx| = γ|x| scale the inner product by γ²",
        "polarization",
    ),
];

/// Run a suite by id or alias.
pub fn run_suite(id: &str, cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let info = resolve_suite(id)?;
    let start = Instant::now();
    let mut report = match info.id {
        "counterexample-reversed-action" => counterexample_reversed_action(cfg)?,
        "inner-product-equivalence" => inner_product_equivalence(cfg)?,
        "orthogonality-characterizations" => orthogonality_characterizations(cfg)?,
        "state-witness" => state_witness(cfg)?,
        "bj-symmetry" => bj_symmetry(cfg)?,
        "factorization" => factorization(cfg)?,
        "map-preservation" => map_preservation(cfg)?,
        "polarization" => polarization(cfg)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    report.suite_id = info.id.to_string();
    report.statement = info.statement.to_string();
    report.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn new_report(id: &str, cfg: &SuiteConfig) -> VerificationReport {
    let statement = resolve_suite(id).map(|s| s.statement).unwrap_or_default();
    VerificationReport::new(
        id,
        statement,
        cfg.shape.block_dims(),
        cfg.k,
        cfg.seed,
        cfg.tolerances,
    )
}

fn plant(report: &mut VerificationReport, cfg: &SuiteConfig) {
    if cfg.plant_violation {
        report.note("a violation was planted on purpose");
        report.fail(
            0,
            "planted violation",
            -1.0,
            ReplayCase::Summary {
                description: "planted by configuration".into(),
            },
        );
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `X = I`, `Y = E₁₁` in `M₂`.
pub fn reversed_action_example() -> (ModuleVector, ModuleVector) {
    let shape = AlgebraShape::matrix(2).expect("valid shape");
    let x = ModuleVector::single(AlgebraElement::identity(&shape));
    let mut e11 = crate::linalg::CMatrix::zeros(2, 2);
    e11[(0, 0)] = ONE;
    let y = ModuleVector::single(AlgebraElement::from_matrix(e11).expect("square block"));
    (x, y)
}

/// The strong BJ relation holds for `(I, E₁₁)` while `‖XA + Y‖ ≥ ‖XA‖` fails at `A = −Y`.
pub fn counterexample_reversed_action(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let opts = cfg.search_options();
    let (x, y) = reversed_action_example();
    let mut report = VerificationReport::new(
        "counterexample-reversed-action",
        "",
        x.shape().block_dims(),
        1,
        cfg.seed,
        *tol,
    );
    report.trials = 1;

    let sbj = strong_bj_orthogonal(&x, &y, tol, &opts)?;
    report.set_metric("strong_bj_min_value", sbj.value);
    if !sbj.holds || (sbj.value - 1.0).abs() > 1e-6 {
        report.fail(
            0,
            "X ⊥ˢ_B Y with minimum 1",
            sbj.margin,
            ReplayCase::Verdict {
                relation: Relation::StrongBirkhoffJames,
                x: x.clone(),
                y: y.clone(),
                expected: true,
            },
        );
    }

    let rev = reversed_action_condition(&x, &y, tol, &opts)?;
    report.set_metric("reversed_action_value", rev.value);
    let mut found = false;
    if let (false, Some(Witness::Element { a })) = (rev.holds, &rev.witness) {
        let xa = x.right_action(a)?;
        let dist = (a + y.entry(0)).norm();
        let sum = xa.try_add(&y)?.norm();
        let xa_norm = xa.norm();
        report.set_metric("witness_distance_to_minus_y", dist);
        report.set_metric("witness_norm_xa_plus_y", sum);
        report.set_metric("witness_norm_xa", xa_norm);
        if dist <= 1e-6 && sum <= 1e-6 && (xa_norm - 1.0).abs() <= 1e-6 {
            found = true;
            report.witness(
                "‖XA + Y‖ = 0 < ‖XA‖ = 1",
                ReplayCase::ConditionPoint {
                    relation: Relation::ReversedAction,
                    x: x.clone(),
                    y: y.clone(),
                    a: a.clone(),
                },
            );
        }
    }
    if !found {
        report.fail(
            0,
            "reversed-action inequality fails at A = −Y",
            -rev.margin,
            ReplayCase::Verdict {
                relation: Relation::ReversedAction,
                x: x.clone(),
                y: y.clone(),
                expected: false,
            },
        );
    }

    let swapped = reversed_action_condition(&y, &x, tol, &opts)?;
    if swapped.holds {
        report.fail(
            0,
            "reversed-action inequality for (Y, X) fails",
            swapped.margin,
            ReplayCase::Verdict {
                relation: Relation::ReversedAction,
                x: y.clone(),
                y: x.clone(),
                expected: false,
            },
        );
    }

    let zero = ModuleVector::zeros(x.shape(), 1);
    for relation in [
        Relation::StrongBirkhoffJames,
        Relation::SquaredModulus,
        Relation::Modulus,
        Relation::ReversedAction,
    ] {
        let v = decide(relation, &x, &zero, tol, &opts)?;
        if !v.holds {
            report.fail(
                0,
                "every condition holds for Y = 0",
                v.margin,
                ReplayCase::Verdict {
                    relation,
                    x: x.clone(),
                    y: zero.clone(),
                    expected: true,
                },
            );
        }
    }
    plant(&mut report, cfg);
    Ok(report)
}

const REVERSED_FAMILIES: [Relation; 3] = [
    Relation::SquaredModulus,
    Relation::Modulus,
    Relation::ReversedAction,
];

/// The three reversed-action families on `(x, y)` and on `(y, x)`, compared with `⟨x,y⟩ = 0`.
pub fn inner_product_equivalence(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let opts = cfg.search_options();
    let mut report = new_report("inner-product-equivalence", cfg);
    report.set_metric("orthogonal_pairs", 0.0);
    report.set_metric("non_orthogonal_pairs", 0.0);
    for trial in 0..cfg.trials {
        report.trials += 1;
        let mut rng = trial_rng(cfg.seed, 1, trial as u64);
        let u: f64 = rng.random();
        let (x, y) = if u < 0.4 {
            sampling::orthogonal_pair(&cfg.shape, cfg.k, &mut rng)
        } else if u < 0.7 {
            sampling::generic_pair(&cfg.shape, cfg.k, &mut rng)
        } else {
            sampling::bj_pair(&cfg.shape, cfg.k, &mut rng)
        };
        let mut ip = ip_orthogonal(&x, &y, tol)?.holds;
        report.count(if ip {
            "orthogonal_pairs"
        } else {
            "non_orthogonal_pairs"
        });
        if cfg.plant_violation && trial == 0 {
            ip = !ip;
            report.note("the inner-product verdict of trial 0 was flipped on purpose");
        }
        let mut disagreeing = Vec::new();
        let mut worst = f64::INFINITY;
        for relation in REVERSED_FAMILIES {
            for (a, b) in [(&x, &y), (&y, &x)] {
                let v = decide(relation, a, b, tol, &opts)?;
                track_margins(&mut report, &v, ip);
                if v.holds != ip {
                    if !disagreeing.contains(&relation) {
                        disagreeing.push(relation);
                    }
                    worst = worst.min(-v.margin.abs());
                }
            }
        }
        if !disagreeing.is_empty() {
            report.fail(
                trial,
                "verdicts disagree with ⟨x,y⟩ = 0",
                worst,
                ReplayCase::VerdictMismatch {
                    x,
                    y,
                    relations: disagreeing,
                },
            );
        }
    }
    Ok(report)
}

fn track_margins(report: &mut VerificationReport, v: &OrthogonalityVerdict, ip: bool) {
    let key = match v.relation {
        Relation::SquaredModulus => "squared_modulus",
        Relation::Modulus => "modulus",
        Relation::ReversedAction => "reversed_action",
        _ => return,
    };
    if ip {
        report.min_metric(&format!("{key}_min_margin_orthogonal"), v.margin);
    } else {
        report.max_metric(&format!("{key}_max_margin_non_orthogonal"), v.margin);
    }
}

/// Normalized slack of item `item` of the classical list at a point, and its tolerance.
/// Items 1 and 4 take `λ`, the others take `a`; negative slack beyond the tolerance is a violation.
pub fn list_item_slack(
    item: usize,
    x: &ModuleVector,
    y: &ModuleVector,
    lambda: Option<Complex64>,
    a: Option<&AlgebraElement>,
    cfg: &ToleranceConfig,
) -> Result<(f64, f64)> {
    let (step, step_norm) = match (item, lambda, a) {
        (1 | 4, Some(l), _) => (y.scale(l), l.norm() * y.norm()),
        (2 | 3 | 5 | 6, _, Some(a)) => {
            let ya = y.right_action(a)?;
            let n = ya.norm();
            (ya, n)
        }
        _ => {
            return Err(Error::Domain(format!(
                "item {item} needs {}",
                if matches!(item, 1 | 4) { "λ" } else { "a" }
            )))
        }
    };
    let scale = x.norm() + step_norm;
    if scale == 0.0 {
        return Ok((0.0, cfg.eq_tol));
    }
    let plus = x.try_add(&step)?;
    let minus = x.try_sub(&step)?;
    let p = x.squared_modulus();
    Ok(match item {
        1 | 2 => (
            -(&plus.squared_modulus() - &minus.squared_modulus()).norm() / (scale * scale),
            cfg.eq_tol,
        ),
        3 => (-(plus.norm() - minus.norm()).abs() / scale, cfg.eq_tol),
        4 | 5 => (
            (&plus.squared_modulus() - &p).min_eigenvalue() / (scale * scale),
            cfg.psd_tol,
        ),
        _ => (
            (&plus.squared_modulus().sqrt_clamped() - &p.sqrt_clamped()).min_eigenvalue() / scale,
            cfg.psd_tol,
        ),
    })
}

/// Look for a point violating item `item` of the classical list; `None` if the search fails.
pub fn find_list_violation(
    item: usize,
    x: &ModuleVector,
    y: &ModuleVector,
    cfg: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<Option<(Option<Complex64>, Option<AlgebraElement>)>> {
    let (nx, ny) = (x.norm(), y.norm());
    let g = x.inner_product(y)?;
    if ny == 0.0 || g.norm() == 0.0 {
        return Ok(None);
    }
    let ratio = if nx > 0.0 { nx / ny } else { 1.0 / ny };
    let mut rng = trial_rng(opts.seed, 0x51, item as u64);
    if matches!(item, 1 | 4) {
        let mut candidates = vec![ONE, Complex64::i(), -ONE, -Complex64::i()];
        for j in -8..=2 {
            let t = ratio * 10f64.powf(j as f64 / 2.0);
            for m in 0..16 {
                candidates.push(Complex64::from_polar(t, m as f64 * PI / 8.0));
            }
        }
        for _ in 0..4 {
            candidates.push(crate::linalg::random_complex(&mut rng) * ratio);
        }
        for lambda in candidates {
            let (s, t) = list_item_slack(item, x, y, Some(lambda), None, cfg)?;
            if s < -t {
                return Ok(Some((Some(lambda), None)));
            }
        }
        return Ok(None);
    }
    let shape = x.shape();
    let direction = g.adjoint().scale_real(ratio / g.norm());
    let mut best: Option<(AlgebraElement, f64)> = None;
    let mut starts = Vec::new();
    for j in -8..=2 {
        let t = 10f64.powf(j as f64 / 2.0);
        for m in 0..8 {
            starts.push(direction.scale(Complex64::from_polar(t, m as f64 * PI / 4.0)));
        }
    }
    for _ in 0..4 {
        starts.push(AlgebraElement::random(shape, &mut rng).scale_real(ratio));
    }
    for a in starts {
        let (s, t) = list_item_slack(item, x, y, None, Some(&a), cfg)?;
        if s < -t {
            return Ok(Some((None, Some(a))));
        }
        if best.as_ref().is_none_or(|(_, b)| s < *b) {
            best = Some((a, s));
        }
    }
    let tol = if item == 3 || item == 2 {
        cfg.eq_tol
    } else {
        cfg.psd_tol
    };
    let objective = |a: &AlgebraElement| {
        list_item_slack(item, x, y, None, Some(a), cfg)
            .map(|(s, _)| s)
            .unwrap_or(f64::INFINITY)
    };
    let start = best
        .map(|(a, _)| a)
        .unwrap_or_else(|| AlgebraElement::zeros(shape));
    let dim = shape.real_dim();
    let (a, s) = minimize_over_algebra(
        shape,
        vec![start, AlgebraElement::zeros(shape)],
        &objective,
        opts.evals_per_dim.max(1) * (dim + 1),
        0.25 * ratio,
        -tol,
    );
    let (_, t) = list_item_slack(item, x, y, None, Some(&a), cfg)?;
    Ok((s < -t).then_some((None, Some(a))))
}

/// Every item of the classical list on orthogonal pairs, and a violation of every item on
/// non-orthogonal pairs; also `y⟨y,x⟩ ⊥_B x` exactly for orthogonal pairs.
pub fn orthogonality_characterizations(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let opts = cfg.search_options();
    let mut report = new_report("orthogonality-characterizations", cfg);
    report.note("items (i) and (ii) compare squared moduli, which is equivalent and avoids square-root rounding");
    for trial in 0..cfg.trials {
        report.trials += 1;
        let mut rng = trial_rng(cfg.seed, 2, trial as u64);
        let u: f64 = rng.random();
        let (x, y) = if u < 0.5 {
            sampling::orthogonal_pair(&cfg.shape, cfg.k, &mut rng)
        } else if u < 0.8 {
            sampling::generic_pair(&cfg.shape, cfg.k, &mut rng)
        } else {
            sampling::bj_pair(&cfg.shape, cfg.k, &mut rng)
        };
        let ip = ip_orthogonal(&x, &y, tol)?.holds;
        let planted = cfg.plant_violation && trial == 0;
        if ip {
            report.count("orthogonal_pairs");
            let lambdas = [
                ONE,
                Complex64::i(),
                -ONE,
                Complex64::new(0.5, 2.0),
                crate::linalg::random_complex(&mut rng),
            ];
            let elements: Vec<AlgebraElement> = (0..5)
                .map(|_| {
                    AlgebraElement::random(&cfg.shape, &mut rng)
                        .scale_real(2f64.powf(rng.random_range(-3.0..3.0)))
                })
                .collect();
            for item in 1..=6 {
                let points: Vec<(Option<Complex64>, Option<AlgebraElement>)> =
                    if matches!(item, 1 | 4) {
                        lambdas.iter().map(|&l| (Some(l), None)).collect()
                    } else {
                        elements.iter().map(|a| (None, Some(a.clone()))).collect()
                    };
                for (lambda, a) in points {
                    let (s, t) = list_item_slack(item, &x, &y, lambda, a.as_ref(), tol)?;
                    report.min_metric(&format!("item{item}_min_slack_orthogonal"), s);
                    if s < -t || (planted && item == 1) {
                        report.fail(
                            trial,
                            format!("item {item} holds for orthogonal pairs"),
                            s,
                            ReplayCase::ListItem {
                                item,
                                x: x.clone(),
                                y: y.clone(),
                                lambda,
                                a,
                            },
                        );
                        break;
                    }
                }
            }
        } else {
            report.count("non_orthogonal_pairs");
            for item in 1..=6 {
                let found = find_list_violation(item, &x, &y, tol, &opts)?;
                if found.is_none() || (planted && item == 1) {
                    report.fail(
                        trial,
                        format!("item {item} is violated for non-orthogonal pairs"),
                        -1.0,
                        ReplayCase::ListItem {
                            item,
                            x: x.clone(),
                            y: y.clone(),
                            lambda: None,
                            a: None,
                        },
                    );
                } else {
                    report.count(&format!("item{item}_violations_found"));
                }
            }
        }
        let v = y.right_action(&y.inner_product(&x)?)?;
        let bj = bj_orthogonal_minimize(&v, &x, tol)?;
        if bj.holds != ip {
            report.fail(
                trial,
                "y⟨y,x⟩ ⊥_B x iff ⟨x,y⟩ = 0",
                -bj.margin.abs(),
                ReplayCase::Verdict {
                    relation: Relation::BirkhoffJames,
                    x: v,
                    y: x.clone(),
                    expected: ip,
                },
            );
        }
    }
    Ok(report)
}

/// Check both Birkhoff–James procedures on one pair; `Err(reason)` describes a disagreement.
fn compare_bj_implementations(
    x: &ModuleVector,
    y: &ModuleVector,
    tol: &ToleranceConfig,
    opts: &SearchOptions,
) -> Result<std::result::Result<(bool, f64, f64), String>> {
    let m = bj_orthogonal_minimize(x, y, tol)?;
    let w = bj_orthogonal_witness(x, y, tol, opts)?;
    if m.holds != w.holds {
        return Ok(Err(format!(
            "minimizer says {}, state criterion says {}",
            m.holds, w.holds
        )));
    }
    if !w.holds {
        return Ok(Ok((false, 0.0, 0.0)));
    }
    let Some(Witness::State { state }) = &w.witness else {
        return Ok(Err("no state was reconstructed".into()));
    };
    let nx = x.norm();
    let ny = y.norm();
    let on_p = (state.apply(&x.squared_modulus())?.re - nx * nx).abs() / (nx * nx);
    let on_g = if ny > 0.0 {
        state.apply(&x.inner_product(y)?)?.norm() / (nx * ny)
    } else {
        0.0
    };
    if on_p > 1e-6 || on_g > 1e-6 {
        return Ok(Err(format!("state misses its bounds: {on_p:e}, {on_g:e}")));
    }
    Ok(Ok((true, on_p, on_g)))
}

/// The minimizing and state-based Birkhoff–James procedures agree, and every reconstructed
/// state is norming for `x` and annihilates `⟨x,y⟩`.
pub fn state_witness(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let opts = cfg.search_options();
    let mut report = new_report("state-witness", cfg);
    report.set_metric("holds", 0.0);
    report.set_metric("max_state_norming_error", 0.0);
    report.set_metric("max_state_annihilation_error", 0.0);
    for trial in 0..cfg.trials {
        report.trials += 1;
        let mut rng = trial_rng(cfg.seed, 3, trial as u64);
        let u: f64 = rng.random();
        let (x, y) = if u < 0.4 {
            sampling::bj_pair(&cfg.shape, cfg.k, &mut rng)
        } else if u < 0.6 {
            sampling::orthogonal_pair(&cfg.shape, cfg.k, &mut rng)
        } else if u < 0.85 {
            sampling::generic_pair(&cfg.shape, cfg.k, &mut rng)
        } else {
            degenerate_top_pair(&cfg.shape, cfg.k, &mut rng)
        };
        if x.norm() == 0.0 {
            continue;
        }
        match compare_bj_implementations(&x, &y, tol, &opts)? {
            Ok((holds, on_p, on_g)) if !(cfg.plant_violation && trial == 0) => {
                if holds {
                    report.count("holds");
                    report.max_metric("max_state_norming_error", on_p);
                    report.max_metric("max_state_annihilation_error", on_g);
                }
            }
            outcome => {
                let reason = outcome.err().unwrap_or_else(|| "planted".into());
                report.fail(trial, reason, -1.0, ReplayCase::BjImplementations { x, y });
            }
        }
    }
    Ok(report)
}

/// `x` with unitary entries scaled by `1/√k`, so `⟨x,x⟩ = 1` and every state is norming.
fn degenerate_top_pair<R: Rng + ?Sized>(
    shape: &AlgebraShape,
    k: usize,
    rng: &mut R,
) -> (ModuleVector, ModuleVector) {
    let s = 1.0 / (k as f64).sqrt();
    let entries = (0..k)
        .map(|_| {
            let blocks = shape
                .block_dims()
                .iter()
                .map(|&d| crate::linalg::random_unitary(d, rng) * real(s))
                .collect();
            AlgebraElement::from_blocks(shape.clone(), blocks).expect("conforming blocks")
        })
        .collect();
    let x = ModuleVector::new(entries).expect("k ≥ 1");
    let y = ModuleVector::random(shape, k, rng);
    let y = if rng.random_bool(0.5) {
        sampling::bj_correction(&x, &y)
    } else {
        y
    };
    (x, y)
}

/// The dichotomy for `x ⊥_B y ⟹ ‖x + y‖ ≥ ‖y‖`.
pub fn bj_symmetry(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let mut report = bj_symmetry_probe(
        &cfg.shape,
        cfg.k,
        cfg.trials,
        &cfg.tolerances,
        &cfg.search_options(),
    )?;
    plant(&mut report, cfg);
    Ok(report)
}

fn require_abelian(shape: &AlgebraShape, arity: usize, what: &str) -> Result<()> {
    if !shape.is_abelian() {
        return Err(Error::UnsupportedShape {
            shape: shape.block_dims().to_vec(),
            arity,
            reason: format!("{what} needs a total set of characters, i.e. an abelian algebra"),
        });
    }
    Ok(())
}

/// Random strong `E`, random `c`, `F = cE`: recover `c`, check `h` is constant near the
/// witness, check the bound inequality, and run the kernel and invertibility checks.
pub fn factorization(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let (shape, k, n) = (&cfg.shape, cfg.k, cfg.n);
    if n >= 2 {
        require_abelian(shape, n, "factorization of arity ≥ 2")?;
    }
    let mut report = new_report("factorization", cfg);
    report.n = Some(n);
    for key in [
        "max_recovery_error",
        "max_h_variation",
        "max_residual",
        "max_bound_ratio",
    ] {
        report.set_metric(key, 0.0);
    }
    for trial in 0..cfg.trials {
        report.trials += 1;
        let trial_seed = sampling::trial_rng(cfg.seed, 4, trial as u64).random::<u64>();
        let mut rng = trial_rng(cfg.seed, 5, trial as u64);
        let mut e = MultiForm::random(shape, k, n, &mut rng)?;
        for _ in 0..20 {
            if find_strong_witness(&e, 100, trial_seed, tol).is_ok() {
                break;
            }
            e = MultiForm::random(shape, k, n, &mut rng)?;
        }
        let c = AlgebraElement::random(shape, &mut rng);
        let f = e.left_multiply(&c)?;
        let case = || ReplayCase::FactorizationRecovery {
            e: e.clone(),
            f: f.clone(),
            c: c.clone(),
        };
        let recovered = match factorize_pair(&e, &f, tol, &FactorizeOptions::with_seed(trial_seed))?
        {
            Factorization::Factorized(r) => r,
            Factorization::PreservationViolated(v) => {
                report.fail(trial, "F = cE passes validation", -v.residual, case());
                continue;
            }
        };
        let scale = 1.0 + c.norm();
        let err = (&recovered.c - &c).norm() / scale;
        report.max_metric("max_recovery_error", err);
        report.max_metric("max_h_variation", recovered.h_variation);
        report.max_metric("max_residual", recovered.residual);
        report.min_metric("min_beta", recovered.beta);
        if err > 1e-7 || recovered.h_variation > 1e-7 || (cfg.plant_violation && trial == 0) {
            report.fail(
                trial,
                "recovery of c and constancy of h",
                1e-7 - err.max(recovered.h_variation),
                case(),
            );
        }

        let m_e = is_bounded_estimate(&e, 100, trial_seed);
        let m_f = is_bounded_estimate(&f, 100, trial_seed);
        let ratio = if m_e > 0.0 && c.norm() > 0.0 {
            m_f / (c.norm() * m_e)
        } else {
            0.0
        };
        report.max_metric("max_bound_ratio", ratio);
        if m_f > c.norm() * m_e * (1.0 + 1e-6) {
            report.fail(trial, "M_F ≤ ‖c‖ M_E", 1.0 + 1e-6 - ratio, case());
        }

        if n >= 3 {
            let b = ModuleVector::random(shape, k, &mut rng);
            let (eb, fb) = (e.slice_last(&b)?, f.slice_last(&b)?);
            if find_strong_witness(&eb, 100, trial_seed, tol).is_ok() {
                if let Factorization::Factorized(r) =
                    factorize_pair(&eb, &fb, tol, &FactorizeOptions::with_seed(trial_seed))?
                {
                    let dev = (&r.c - &c).norm() / scale;
                    report.max_metric("max_slice_deviation", dev);
                    if dev > 1e-7 {
                        report.fail(
                            trial,
                            "slicing the last slot gives the same constant",
                            1e-7 - dev,
                            ReplayCase::FactorizationRecovery {
                                e: eb,
                                f: fb,
                                c: c.clone(),
                            },
                        );
                    }
                } else {
                    report.fail(
                        trial,
                        "sliced pair factorizes",
                        -1.0,
                        ReplayCase::FactorizationRecovery {
                            e: eb,
                            f: fb,
                            c: c.clone(),
                        },
                    );
                }
            }
        }

        let kernel = preservation_check(&e, &f, 10, trial_seed, tol)?;
        report.max_metric("max_kernel_f", kernel.metric("max_kernel_f").unwrap_or(0.0));
        for fail in kernel.failures {
            report.fail(trial, fail.label, fail.margin, fail.case);
        }
        let inv = invertibility_preservation(&e, &f, 10, trial_seed, tol)?;
        if inv.metric("c_invertible") == Some(1.0) {
            report.count("invertible_c");
        }
        for fail in inv.failures {
            report.fail(trial, fail.label, fail.margin, fail.case);
        }
    }
    Ok(report)
}

/// `max ‖⟨Tx, Sy⟩‖ / (M_T M_S ‖x‖‖y‖)` over sampled orthogonal pairs.
fn sampled_preservation(
    t: &AModuleMap,
    s: &AModuleMap,
    samples: usize,
    seed: u64,
) -> Result<(f64, Vec<(ModuleVector, ModuleVector)>)> {
    use crate::module::ModuleMap;
    let bound = |m: &AModuleMap| {
        m.coeffs()
            .iter()
            .flatten()
            .map(AlgebraElement::norm)
            .sum::<f64>()
            .max(f64::MIN_POSITIVE)
    };
    let scale = bound(t) * bound(s);
    let mut worst = 0.0f64;
    let mut pairs = Vec::with_capacity(samples);
    for j in 0..samples {
        let mut rng = trial_rng(seed, 0x3A, j as u64);
        let (x, y) = sampling::orthogonal_pair(t.shape(), t.in_k(), &mut rng);
        let denom = scale * x.norm() * y.norm();
        if denom > 0.0 {
            let r = t.apply(&x)?.inner_product(&s.apply(&y)?)?.norm() / denom;
            worst = worst.max(r);
        }
        pairs.push((x, y));
    }
    Ok((worst, pairs))
}

fn preserves_and_factorizes(
    t: &AModuleMap,
    s: &AModuleMap,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<(bool, bool, f64)> {
    let (worst, _) = sampled_preservation(t, s, 10, seed)?;
    let (e, f) = gram_pair_from_maps(t, s)?;
    let factorized = matches!(
        factorize_pair(&e, &f, tol, &FactorizeOptions::with_seed(seed))?,
        Factorization::Factorized(_)
    );
    Ok((worst <= tol.eq_tol, factorized, worst))
}

/// For pairs of `A`-linear maps: sampled preservation of `⊥` matches factorization of
/// `⟨T·, S·⟩`; the reversed-action families agree on `(Tx, Sy)`; for `T = S` the modulus
/// monotonicity probe is recorded.
pub fn map_preservation(cfg: &SuiteConfig) -> Result<VerificationReport> {
    use crate::module::ModuleMap;
    let tol = &cfg.tolerances;
    let opts = cfg.search_options();
    let (shape, k) = (&cfg.shape, cfg.k);
    require_abelian(shape, 2, "factorization of ⟨T·, S·⟩")?;
    let mut report = new_report("map-preservation", cfg);
    report.note("the modulus monotonicity probe |x| ≤ |y| ⟹ |Tx| ≤ |Ty| is recorded, and discrepancies are flagged rather than failed");
    report.set_metric("monotonicity_discrepancies", 0.0);
    for trial in 0..cfg.trials {
        report.trials += 1;
        let mut rng = trial_rng(cfg.seed, 6, trial as u64);
        let trial_seed: u64 = rng.random();
        let gamma = 2f64.powf(rng.random_range(-1.0..1.0));
        let family = trial % 4;
        let (t, s) = match family {
            0 => {
                let t = AModuleMap::random_unitary(shape, k, &mut rng).scale(real(gamma));
                (t.clone(), t)
            }
            1 => {
                let t = AModuleMap::random_unitary(shape, k, &mut rng).scale(real(gamma));
                let c = AlgebraElement::random(shape, &mut rng);
                let s = AModuleMap::new(
                    t.coeffs()
                        .iter()
                        .map(|row| row.iter().map(|e| &c * e).collect())
                        .collect(),
                )?;
                (t, s)
            }
            2 => (
                AModuleMap::random(shape, k, k, &mut rng),
                AModuleMap::random(shape, k, k, &mut rng),
            ),
            _ => {
                let t = AModuleMap::random(shape, k, k, &mut rng);
                (t.clone(), t)
            }
        };
        let (preserved, mut factorized, worst) = preserves_and_factorizes(&t, &s, trial_seed, tol)?;
        report.count(if preserved {
            "preserving_pairs"
        } else {
            "non_preserving_pairs"
        });
        if preserved {
            report.max_metric("max_preserved_residual", worst);
        }
        if cfg.plant_violation && trial == 0 {
            factorized = !factorized;
        }
        if preserved != factorized {
            report.fail(
                trial,
                "x ⊥ y ⟹ Tx ⊥ Sy iff ⟨Tx, Sy⟩ = c⟨x, y⟩",
                -1.0,
                ReplayCase::PreservationMismatch {
                    t: t.clone(),
                    s: s.clone(),
                    seed: trial_seed,
                },
            );
        }

        let (x, y) = sampling::orthogonal_pair(shape, k, &mut rng);
        let (tx, sy) = (t.apply(&x)?, s.apply(&y)?);
        let ip = ip_orthogonal(&tx, &sy, tol)?.holds;
        let mut disagreeing = Vec::new();
        for relation in REVERSED_FAMILIES {
            if decide(relation, &tx, &sy, tol, &opts)?.holds != ip {
                disagreeing.push(relation);
            }
        }
        if !disagreeing.is_empty() {
            report.fail(
                trial,
                "reversed-action families on (Tx, Sy) agree with Tx ⊥ Sy",
                -1.0,
                ReplayCase::VerdictMismatch {
                    x: tx,
                    y: sy,
                    relations: disagreeing,
                },
            );
        }

        if family == 0 || family == 3 {
            for j in 0..5 {
                let mut prng = trial_rng(trial_seed, 0x3B, j);
                let (x, q) = sampling::orthogonal_pair(shape, k, &mut prng);
                let y = x.try_add(&q)?;
                let slack = monotonicity_slack(&t, &x, &y)?;
                report.min_metric("min_monotonicity_slack", slack);
                if slack < -cfg.tolerances.psd_tol {
                    report.witness(
                        "|x| ≤ |y| with |Tx| ≰ |Ty|",
                        ReplayCase::ModulusMonotonicity {
                            map: t.clone(),
                            x,
                            y,
                        },
                    );
                    if preserved {
                        report.count("monotonicity_discrepancies");
                        report.note(format!(
                            "trial {trial}: monotonicity fails for an orthogonality-preserving map"
                        ));
                    }
                    break;
                }
            }
        }
    }
    Ok(report)
}

/// `λ_min(|Ty| − |Tx|)` normalized by `‖T‖(‖x‖ + ‖y‖)`.
fn monotonicity_slack(t: &AModuleMap, x: &ModuleVector, y: &ModuleVector) -> Result<f64> {
    use crate::module::ModuleMap;
    let tx = t.apply(x)?.squared_modulus().sqrt_clamped();
    let ty = t.apply(y)?.squared_modulus().sqrt_clamped();
    let bound = t
        .coeffs()
        .iter()
        .flatten()
        .map(AlgebraElement::norm)
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let scale = bound * (x.norm() + y.norm());
    Ok(if scale > 0.0 {
        (&ty - &tx).min_eigenvalue() / scale
    } else {
        0.0
    })
}

/// Cyclic shift of coordinates, an `A`-linear unitary.
fn shift_map(shape: &AlgebraShape, k: usize) -> AModuleMap {
    let coeffs = (0..k)
        .map(|r| {
            (0..k)
                .map(|c| {
                    if (r + 1) % k == c {
                        AlgebraElement::identity(shape)
                    } else {
                        AlgebraElement::zeros(shape)
                    }
                })
                .collect()
        })
        .collect();
    AModuleMap::new(coeffs).expect("square coefficient matrix")
}

/// Scaled unitaries `γU` for `γ ∈ {0.5, 1, 2}`, alternately as `A`-linear and as dense
/// complex-linear maps, must satisfy `⟨Tx, Ty⟩ = γ²⟨x, y⟩`; a perturbed map must be caught
/// by the modulus hypothesis.
pub fn polarization(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let tol = &cfg.tolerances;
    let (shape, k) = (&cfg.shape, cfg.k);
    let mut report = new_report("polarization", cfg);
    report.set_metric("max_polarization_error", 0.0);
    report.set_metric("max_modulus_residual", 0.0);
    report.set_metric("max_a_linearity_residual", 0.0);
    for (g, gamma) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        for trial in 0..cfg.trials {
            report.trials += 1;
            let mut rng = trial_rng(cfg.seed, 7 + g as u64, trial as u64);
            let u = if gamma == 1.0 && trial == 0 {
                shift_map(shape, k)
            } else {
                AModuleMap::random_unitary(shape, k, &mut rng)
            };
            let t = u.scale(real(gamma));
            let fixture = if trial % 2 == 1 {
                MapFixture::Dense(t.to_clinear())
            } else {
                MapFixture::ALinear(t)
            };
            let mut r = scaled_isometry_check(&fixture, gamma, 4, rng.random(), tol)?;
            if cfg.plant_violation && trial == 0 && g == 0 {
                r.fail(
                    0,
                    "planted violation",
                    -1.0,
                    ReplayCase::Summary {
                        description: "planted by configuration".into(),
                    },
                );
            }
            for key in [
                "max_polarization_error",
                "max_modulus_residual",
                "max_a_linearity_residual",
            ] {
                if let Some(v) = r.metric(key) {
                    report.max_metric(key, v);
                }
            }
            for f in r.failures {
                report.fail(trial, format!("γ = {gamma}: {}", f.label), f.margin, f.case);
            }
        }
    }
    let mut rng = trial_rng(cfg.seed, 10, 0);
    let noisy = AModuleMap::random_unitary(shape, k, &mut rng)
        .to_clinear()
        .perturbed(1e-3, &mut rng);
    let r = scaled_isometry_check(&MapFixture::Dense(noisy), 1.0, 20, cfg.seed, tol)?;
    let caught = r
        .failures
        .iter()
        .any(|f| matches!(f.case, ReplayCase::ModulusHypothesis { .. }));
    report.set_metric("perturbed_map_rejected", if caught { 1.0 } else { 0.0 });
    if !caught {
        report.fail(
            0,
            "a perturbed map fails the modulus hypothesis",
            -1.0,
            ReplayCase::Summary {
                description: "a map with 1e-3 noise passed |Tx| = γ|x|".into(),
            },
        );
    }
    Ok(report)
}

/// Re-run the check recorded in `case`; `true` when the recorded violation reproduces.
pub fn replay(case: &ReplayCase, cfg: &ToleranceConfig, opts: &SearchOptions) -> Result<bool> {
    use crate::module::ModuleMap;
    Ok(match case {
        ReplayCase::VerdictMismatch { x, y, relations } => {
            let ip = ip_orthogonal(x, y, cfg)?.holds;
            let mut disagree = false;
            for &r in relations {
                disagree |= decide(r, x, y, cfg, opts)?.holds != ip
                    || decide(r, y, x, cfg, opts)?.holds != ip;
            }
            disagree
        }
        ReplayCase::Verdict {
            relation,
            x,
            y,
            expected,
        } => decide(*relation, x, y, cfg, opts)?.holds != *expected,
        ReplayCase::ConditionPoint { relation, x, y, a } => {
            condition_value(*relation, x, y, a)? < -cfg.opt_tol
        }
        ReplayCase::BjAsymmetry { x, y } => {
            bj_orthogonal_minimize(x, y, cfg)?.holds
                && x.try_add(y)?.norm() < y.norm() - cfg.opt_tol * (1.0 + y.norm())
        }
        ReplayCase::BjImplementations { x, y } => {
            compare_bj_implementations(x, y, cfg, opts)?.is_err()
        }
        ReplayCase::ListItem {
            item,
            x,
            y,
            lambda,
            a,
        } => {
            if lambda.is_some() || a.is_some() {
                let (s, t) = list_item_slack(*item, x, y, *lambda, a.as_ref(), cfg)?;
                s < -t
            } else {
                find_list_violation(*item, x, y, cfg, opts)?.is_none()
            }
        }
        ReplayCase::FormResidual { e, f, c, args } => {
            let scale = (1.0 + c.norm())
                * e.coefficient_bound().max(1.0)
                * args.iter().map(ModuleVector::norm).product::<f64>();
            (&f.eval(args)? - &(c * &e.eval(args)?)).norm() > cfg.eq_tol * scale
        }
        ReplayCase::KernelViolation { f, args, .. } => {
            let scale = f.coefficient_bound().max(1.0)
                * args.iter().map(ModuleVector::norm).product::<f64>();
            f.eval(args)?.norm() > cfg.eq_tol * scale
        }
        ReplayCase::InvertibilityLoss { e, f, args } => {
            e.eval(args)?.is_invertible(cfg.sing_tol) && !f.eval(args)?.is_invertible(cfg.sing_tol)
        }
        ReplayCase::ModulusHypothesis { map, gamma, x } => {
            let t = map.as_map();
            let lhs = t.apply(x)?.squared_modulus().sqrt_clamped();
            let rhs = x.squared_modulus().sqrt_clamped().scale_real(*gamma);
            (&lhs - &rhs).norm() / (1.0 + gamma * x.norm()) > cfg.eq_tol
        }
        ReplayCase::PolarizationMismatch { map, gamma, x, y } => {
            let polar = crate::module::polarization_gram(map.as_map(), x, y)?;
            let expected = x.inner_product(y)?.scale_real(gamma * gamma);
            (&polar - &expected).norm() > 1e-8 * gamma * gamma * x.norm() * y.norm()
        }
        ReplayCase::ModulusMonotonicity { map, x, y } => {
            monotonicity_slack(map, x, y)? < -cfg.psd_tol
        }
        ReplayCase::FactorizationRecovery { e, f, c } => {
            match factorize_pair(e, f, cfg, &FactorizeOptions::default()) {
                Ok(Factorization::Factorized(r)) => {
                    (&r.c - c).norm() > 1e-7 * (1.0 + c.norm()) || r.h_variation > 1e-7
                }
                _ => true,
            }
        }
        ReplayCase::PreservationMismatch { t, s, seed } => {
            let _ = t.shape();
            let (preserved, factorized, _) = preserves_and_factorizes(t, s, *seed, cfg)?;
            preserved != factorized
        }
        ReplayCase::Summary { .. } => true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dims: &[usize], k: usize, trials: usize) -> SuiteConfig {
        SuiteConfig::new(AlgebraShape::new(dims.to_vec()).unwrap(), k, trials, 7)
    }

    #[test]
    fn ids_and_aliases_resolve() {
        for s in SUITES {
            assert_eq!(resolve_suite(s.id).unwrap().id, s.id);
            if let Some(a) = s.alias {
                assert_eq!(resolve_suite(a).unwrap().id, s.id);
            }
        }
        assert!(matches!(resolve_suite("nope"), Err(Error::UnknownSuite(_))));
    }

    #[test]
    fn coverage_is_total_and_points_at_known_suites() {
        for (_, id) in COVERAGE {
            assert!(resolve_suite(id).is_ok());
        }
        for s in SUITES {
            assert!(
                COVERAGE.iter().any(|(_, id)| *id == s.id),
                "{} covers nothing",
                s.id
            );
        }
    }

    #[test]
    fn reversed_action_example_passes_and_plant_is_caught() {
        let c = SuiteConfig::default();
        let r = run_suite("example-2-1", &c).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.suite_id, "counterexample-reversed-action");
        let planted = run_suite(
            "example-2-1",
            &SuiteConfig {
                plant_violation: true,
                ..c
            },
        )
        .unwrap();
        assert!(!planted.passed);
    }

    #[test]
    fn small_suites_pass() {
        for id in [
            "inner-product-equivalence",
            "orthogonality-characterizations",
            "state-witness",
            "bj-symmetry",
            "polarization",
        ] {
            let r = run_suite(id, &cfg(&[2], 2, 6)).unwrap();
            assert!(r.passed, "{id}: {:?}", r.failures);
        }
        let r = run_suite(
            "factorization",
            &SuiteConfig {
                n: 3,
                ..cfg(&[1, 1], 2, 5)
            },
        )
        .unwrap();
        assert!(r.passed, "{:?}", r.failures);
        let r = run_suite("map-preservation", &cfg(&[1, 1], 2, 8)).unwrap();
        assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn planted_violations_are_detected() {
        for id in [
            "inner-product-equivalence",
            "orthogonality-characterizations",
            "state-witness",
            "map-preservation",
        ] {
            let c = SuiteConfig {
                plant_violation: true,
                ..cfg(&[1, 1], 1, 2)
            };
            assert!(!run_suite(id, &c).unwrap().passed, "{id}");
        }
    }

    #[test]
    fn nonabelian_factorization_is_a_configuration_error() {
        let e = run_suite("factorization", &cfg(&[2], 2, 1)).unwrap_err();
        assert!(matches!(e, Error::UnsupportedShape { .. }));
        let r = run_suite(
            "factorization",
            &SuiteConfig {
                n: 1,
                ..cfg(&[2], 2, 3)
            },
        )
        .unwrap();
        assert!(r.passed);
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg(&[1, 1], 2, 4);
        let a = run_suite("inner-product-equivalence", &c).unwrap();
        let b = run_suite("inner-product-equivalence", &c).unwrap();
        assert_eq!(
            serde_json::to_string(&a.without_timing()).unwrap(),
            serde_json::to_string(&b.without_timing()).unwrap()
        );
    }

    #[test]
    fn recorded_witnesses_replay() {
        let r = run_suite("bj-symmetry", &cfg(&[2], 1, 2000)).unwrap();
        let w = &r.witnesses[0];
        assert!(replay(
            &w.case,
            &ToleranceConfig::default(),
            &SearchOptions::default()
        )
        .unwrap());
        let r = run_suite("example-2-1", &SuiteConfig::default()).unwrap();
        assert!(replay(
            &r.witnesses[0].case,
            &ToleranceConfig::default(),
            &SearchOptions::default()
        )
        .unwrap());
    }

    #[test]
    fn list_items_on_simple_pairs() {
        let tol = ToleranceConfig::default();
        let s = AlgebraShape::matrix(2).unwrap();
        let x = ModuleVector::single(AlgebraElement::identity(&s));
        let (s1, t1) = list_item_slack(1, &x, &x, Some(ONE), None, &tol).unwrap();
        assert!(s1 < -t1);
        let (_, y) = reversed_action_example();
        for item in 1..=6 {
            assert!(
                find_list_violation(item, &x, &y, &tol, &SearchOptions::default())
                    .unwrap()
                    .is_some(),
                "item {item}"
            );
        }
    }
}
