//! The five named scenarios. Each returns the check list that decides the
//! exit status plus a structured payload for `report.json`; the runner owns
//! all file writing.

use anyhow::{anyhow, Result};
use serde_json::json;

use couplestress::constitutive::couple_stress;
use couplestress::poly::PolyMatrix;
use couplestress::report::Check;
use couplestress::ritz::{patch_test, solve_equilibrium};
use couplestress::tensor::{anti, axl, double_contract};
use couplestress::virtual_work::balance_report;
use couplestress::{
    DomainGeometry, Mat3, MaterialParams, NormalExtension, PolyVector, Ten3, TractionField,
    TractionFlavor, Vec3,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::config::{ScenarioConfig, ScenarioKind};

/// Effective tolerances after the command-line scale factor.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub closure: f64,
    pub solve: f64,
    pub patch: f64,
    pub identity: f64,
    pub invariance: f64,
}

impl Tolerances {
    pub fn from_config(cfg: &ScenarioConfig, scale: f64) -> Tolerances {
        let t = &cfg.tolerances;
        Tolerances {
            closure: t.closure.unwrap_or(1e-8) * scale,
            solve: t.solve.unwrap_or(1e-7) * scale,
            patch: t.patch.unwrap_or(1e-9) * scale,
            identity: t.identity.unwrap_or(1e-12) * scale,
            invariance: t.invariance.unwrap_or(1e-10) * scale,
        }
    }
}

pub struct ScenarioOutcome {
    pub checks: Vec<Check>,
    pub payload: serde_json::Value,
    /// Per-node boundary samples, written when the config (or scenario)
    /// asks for the dump.
    pub tractions: Option<Vec<String>>,
}

pub fn run(
    cfg: &ScenarioConfig,
    domain: &DomainGeometry,
    params: &MaterialParams,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<ScenarioOutcome> {
    match cfg.scenario {
        ScenarioKind::VerifyIdentities => verify_identities(rng, tol),
        ScenarioKind::CompareBc => compare_bc(cfg, domain, params, rng, tol),
        ScenarioKind::MissingTermMap => missing_term_map(cfg, domain, params, rng, tol),
        ScenarioKind::Solve => solve(cfg, domain, params, rng, tol),
        ScenarioKind::PatchTest => run_patch_test(cfg, domain, params, tol),
    }
}

fn verify_identities(rng: &mut ChaCha8Rng, tol: &Tolerances) -> Result<ScenarioOutcome> {
    const CASES: usize = 200;
    let mut worst_curl_grad = 0.0f64;
    let mut worst_div_curl = 0.0f64;
    let mut worst_skw = 0.0f64;
    let mut worst_anti = 0.0f64;
    let mut worst_contract = 0.0f64;
    for _ in 0..CASES {
        let u = PolyVector::random(4, rng).map_err(|e| anyhow!("{}", e))?;
        worst_curl_grad = worst_curl_grad.max(u.div().grad().curl().max_abs_coeff());
        worst_div_curl = worst_div_curl.max(u.curl().div().max_abs_coeff());
        let lhs = u.grad().skw();
        let rhs = PolyMatrix::anti(&u.curl()).scale(0.5);
        worst_skw = worst_skw.max((&lhs - &rhs).max_abs_coeff());

        let v = Vec3::new(
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
            rng.gen_range(-5.0..5.0),
        );
        worst_anti = worst_anti.max((axl(anti(v)).map_err(|e| anyhow!("{}", e))? - v).norm_inf());

        let mut cv = [[[0.0f64; 3]; 3]; 3];
        for plane in cv.iter_mut() {
            for row in plane.iter_mut() {
                for e in row.iter_mut() {
                    *e = rng.gen_range(-1.0..1.0);
                }
            }
        }
        let mut bv = [[0.0f64; 3]; 3];
        for row in bv.iter_mut() {
            for e in row.iter_mut() {
                *e = rng.gen_range(-1.0..1.0);
            }
        }
        let (c, b) = (Ten3(cv), Mat3(bv));
        let fast = double_contract(&c, b);
        let mut slow = Vec3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                for p in 0..3 {
                    slow[i] += c.0[i][j][p] * b.0[p][j];
                }
            }
        }
        worst_contract = worst_contract.max((fast - slow).norm_inf());
    }
    let checks = vec![
        Check::upper("curl-of-gradient", worst_curl_grad, tol.identity),
        Check::upper("divergence-of-curl", worst_div_curl, tol.identity),
        Check::upper("skw-gradient-vs-anti-curl", worst_skw, tol.identity),
        Check::upper("anti-axl-round-trip", worst_anti, tol.identity),
        Check::upper("contraction-vs-triple-loop", worst_contract, tol.identity),
    ];
    Ok(ScenarioOutcome {
        checks,
        payload: json!({ "cases": CASES }),
        tractions: None,
    })
}

fn traction_dump(
    tf: &TractionField,
    domain: &DomainGeometry,
) -> Vec<String> {
    let mut rows = Vec::new();
    for patch in domain.patches() {
        for q in patch.nodes() {
            for flavor in [TractionFlavor::MindlinTiersten, TractionFlavor::Corrected] {
                rows.push(tf.sample(patch, q.x, flavor).csv_row());
            }
        }
    }
    rows
}

fn compare_bc(
    cfg: &ScenarioConfig,
    domain: &DomainGeometry,
    params: &MaterialParams,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<ScenarioOutcome> {
    let u = cfg.field(cfg.fields.u.as_deref().unwrap(), rng)?;
    let du = cfg.field(cfg.fields.du.as_deref().unwrap(), rng)?;
    let f = match cfg.fields.f.as_deref() {
        None | Some("manufactured") => None,
        Some(lit) => Some(cfg.field(lit, rng)?),
    };

    let rp = balance_report(params, &u, &du, f.as_ref(), domain);
    let missed_work = rp.hybrid_residual * rp.internal.abs().max(1.0);

    let mut checks = vec![
        Check::upper("corrected-closure", rp.corrected_residual, tol.closure),
        Check::upper("work-accounting", rp.accounting_residual, tol.closure),
    ];
    if rp.smooth_boundary {
        checks.push(Check::upper("mt-closure", rp.mt_residual, tol.closure));
    }

    let tractions = if cfg.output.tractions {
        Some(traction_dump(&TractionField::new(params, &u), domain))
    } else {
        None
    };

    Ok(ScenarioOutcome {
        checks,
        payload: json!({
            "balance": rp,
            "missed_work": missed_work,
        }),
        tractions,
    })
}

fn missing_term_map(
    cfg: &ScenarioConfig,
    domain: &DomainGeometry,
    params: &MaterialParams,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<ScenarioOutcome> {
    let u = cfg.field(cfg.fields.u.as_deref().unwrap(), rng)?;
    let tf = TractionField::new(params, &u);

    let m = couple_stress(params, &u);
    let trace_residual = m.trace().max_abs_coeff() / m.max_abs_coeff().max(1.0);

    // the constrained quantities may not depend on how the normal is
    // continued off the surface
    let tilt = NormalExtension::Tilted(Vec3::new(0.3, -0.2, 0.6));
    let mut worst_ext = 0.0f64;
    let mut max_missing = 0.0f64;
    let mut max_force_gap = 0.0f64;
    for patch in domain.patches() {
        let alt = if patch.is_flat() {
            tilt
        } else {
            NormalExtension::Affine
        };
        for q in patch.nodes() {
            let canon_t = tf.traction_mt_ext(patch, q.x, NormalExtension::Canonical);
            let alt_t = tf.traction_mt_ext(patch, q.x, alt);
            let canon_m = tf.missing_term_ext(patch, q.x, NormalExtension::Canonical);
            let alt_m = tf.missing_term_ext(patch, q.x, alt);
            worst_ext = worst_ext
                .max((canon_t - alt_t).norm_inf())
                .max((canon_m - alt_m).norm_inf());
            max_missing = max_missing.max(canon_m.norm_inf());
            max_force_gap = max_force_gap
                .max((tf.traction_corrected(patch, q.x) - tf.traction_mt(patch, q.x)).norm_inf());
        }
    }

    let checks = vec![
        Check::upper("trace-free-couple-stress", trace_residual, tol.identity),
        Check::upper("extension-invariance", worst_ext, tol.invariance),
    ];

    Ok(ScenarioOutcome {
        checks,
        payload: json!({
            "max_missing_term": max_missing,
            "max_force_traction_gap": max_force_gap,
        }),
        tractions: Some(traction_dump(&tf, domain)),
    })
}

fn solve(
    cfg: &ScenarioConfig,
    domain: &DomainGeometry,
    params: &MaterialParams,
    rng: &mut ChaCha8Rng,
    tol: &Tolerances,
) -> Result<ScenarioOutcome> {
    let block = cfg.solve.as_ref().unwrap();
    let exact = cfg.field(cfg.fields.exact.as_deref().unwrap(), rng)?;
    let flavor = match block.flavor.as_str() {
        "mt" => TractionFlavor::MindlinTiersten,
        _ => TractionFlavor::Corrected,
    };
    let sol = solve_equilibrium(params, &exact, domain, block.degree, flavor)
        .map_err(|e| anyhow!("solve failed: {}", e))?;

    let checks = match block.expect.as_str() {
        "deviate" => vec![Check::lower(
            "solve-deviation",
            sol.report.l2_error,
            10.0 * tol.solve,
        )],
        _ => vec![
            Check::upper("solve-l2", sol.report.l2_error, tol.solve),
            Check::upper(
                "constraint-defect",
                sol.report.stats.constraint_defect,
                tol.solve,
            ),
        ],
    };

    Ok(ScenarioOutcome {
        checks,
        payload: json!({ "solve": sol.report }),
        tractions: None,
    })
}

fn run_patch_test(
    cfg: &ScenarioConfig,
    domain: &DomainGeometry,
    params: &MaterialParams,
    tol: &Tolerances,
) -> Result<ScenarioOutcome> {
    let block = cfg.patch_test.clone().unwrap_or_default();
    let a = block.a.map(Mat3).unwrap_or_else(|| {
        // pure shear in the xy plane
        let mut m = [[0.0; 3]; 3];
        m[0][1] = 1.0;
        m[1][0] = 1.0;
        Mat3(m)
    });

    let sol = patch_test(params, a, domain, block.degree)
        .map_err(|e| anyhow!("patch test solve failed: {}", e))?;

    let m = couple_stress(params, &PolyVector::linear(a));
    let checks = vec![
        Check::upper("patch-linf", sol.report.linf_error, tol.patch),
        Check::upper("couple-stress-of-homogeneous-state", m.max_abs_coeff(), 1e-14),
    ];

    Ok(ScenarioOutcome {
        checks,
        payload: json!({ "solve": sol.report }),
        tractions: None,
    })
}
