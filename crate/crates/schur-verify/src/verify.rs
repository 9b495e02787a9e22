//! Randomized verification campaigns, a derivative-free falsifier for the
//! converse direction, and the pinned necessity witnesses showing each
//! hypothesis clause earns its keep.
//!
//! Campaigns are deterministic: trial `t` reseeds the generator from
//! `seed ^ t`, so any witness replays in isolation.
//!
//! ```
//! use schur_verify::engine::CaseId;
//! use schur_verify::structure::Structure;
//! use schur_verify::verify::{run_campaign, CampaignConfig};
//!
//! let cfg = CampaignConfig { trials: 200, seed: 1, dim: 1, ..Default::default() };
//! let report = run_campaign(CaseId::S4, &Structure::RealMul, &cfg).unwrap();
//! assert!(report.violations.is_empty());
//! assert!(report.min_margin.unwrap() >= -1e-9);
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{
    gen_instance, instance_from_params, param_dim, violating_instance_from_params, GenConfig,
};
use crate::engine::{
    check_hypothesis, eval_margin, qeq_cross_check, CaseId, SchurInstance,
};
use crate::error::{Error, Result};
use crate::gfun::{godunova_levin_example, GFunctionSpec};
use crate::structure::Structure;

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub dim: usize,
    pub boundary_prob: f64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            trials: 1000,
            seed: 0,
            tol: 1e-9,
            dim: 3,
            boundary_prob: crate::domain::BOUNDARY_PROB,
        }
    }
}

/// A reproducible counterexample candidate: the trial index pins the RNG
/// stream that rebuilt it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub trial: u64,
    pub margin: f64,
    pub scale: f64,
    pub instance: SchurInstance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case: String,
    pub structure: String,
    pub dim: usize,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    /// Smallest normalized margin seen; absent when no trial produced one.
    pub min_margin: Option<f64>,
    pub violations: Vec<Witness>,
    pub skipped: u64,
}

/// Run `trials` independent draws; each trial reseeds from `seed ^ trial`
/// so any witness replays in isolation.
pub fn run_campaign(id: CaseId, s: &Structure, cfg: &CampaignConfig) -> Result<VerificationReport> {
    let gen_cfg = GenConfig {
        dim: cfg.dim,
        boundary_prob: cfg.boundary_prob,
    };
    let mut min_margin: Option<f64> = None;
    let mut violations = Vec::new();
    let mut skipped = 0u64;
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ trial);
        let inst = gen_instance(id, s, &gen_cfg, &mut rng)?;
        let normalized = if id == CaseId::QEQ {
            match qeq_trial(&inst, cfg.tol) {
                Ok(Some(v)) => v,
                Ok(None) => {
                    skipped += 1;
                    continue;
                }
                Err(Error::SkippedSample(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            }
        } else {
            let h = check_hypothesis(id, s, &inst, cfg.tol)?;
            if !h.satisfied {
                return Err(Error::Config(format!(
                    "generator left the hypothesis region at trial {trial}: {:?}",
                    h.failed
                )));
            }
            let m = eval_margin(id, s, &inst)?;
            if m.is_violation(cfg.tol) {
                violations.push(Witness {
                    trial,
                    margin: m.value,
                    scale: m.scale,
                    instance: inst.clone(),
                });
            }
            m.normalized()
        };
        min_margin = Some(min_margin.map_or(normalized, |v: f64| v.min(normalized)));
    }
    Ok(VerificationReport {
        case: id.name().to_string(),
        structure: s.id().to_string(),
        dim: cfg.dim,
        trials: cfg.trials,
        seed: cfg.seed,
        tol: cfg.tol,
        min_margin,
        violations,
        skipped,
    })
}

/// One equivalence trial: both sides of the Q_g correspondence must sit on
/// the same side of zero. Returns the normalized Schur-side margin, or
/// `None` for skipped samples.
fn qeq_trial(inst: &SchurInstance, tol: f64) -> Result<Option<f64>> {
    let f = inst
        .f
        .as_ref()
        .ok_or_else(|| Error::Config("equivalence trial needs f".into()))?;
    let g = inst
        .g
        .as_ref()
        .ok_or_else(|| Error::Config("equivalence trial needs g".into()))?;
    let lambda = inst
        .aux
        .as_ref()
        .and_then(|a| a.alpha)
        .ok_or_else(|| Error::Config("equivalence trial needs lambda".into()))?;
    let x = inst.xs[0].as_scalar().unwrap();
    let z = inst.xs[2].as_scalar().unwrap();
    if !(x > z) {
        return Ok(None);
    }
    match qeq_cross_check(f, g, x, z, lambda, tol) {
        Ok(r) => {
            if !r.signs_agree {
                return Err(Error::Domain(format!(
                    "equivalence broken: schur {} vs q-side {}",
                    r.margin_schur, r.margin_qg
                )));
            }
            Ok(Some(r.margin_schur))
        }
        Err(Error::SkippedSample(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Nelder-Mead

/// Reflection 1, expansion 2, contraction 0.5, shrink 0.5.
pub struct NelderMeadResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evals: u64,
}

pub fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    max_iters: u64,
) -> NelderMeadResult {
    let n = x0.len();
    let mut evals = 0u64;
    let eval = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], evals: &mut u64| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(f, x0, &mut evals);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += step;
        let v = eval(f, &p, &mut evals);
        simplex.push((p, v));
    }
    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(p, _)| p[i]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = (0..n)
            .map(|i| centroid[i] + (centroid[i] - worst.0[i]))
            .collect();
        let fr = eval(f, &reflect, &mut evals);
        if fr < simplex[0].1 {
            let expand: Vec<f64> = (0..n)
                .map(|i| centroid[i] + 2.0 * (centroid[i] - worst.0[i]))
                .collect();
            let fe = eval(f, &expand, &mut evals);
            simplex[n] = if fe < fr { (expand, fe) } else { (reflect, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflect, fr);
        } else {
            let contract: Vec<f64> = (0..n)
                .map(|i| centroid[i] + 0.5 * (worst.0[i] - centroid[i]))
                .collect();
            let fc = eval(f, &contract, &mut evals);
            if fc < worst.1 {
                simplex[n] = (contract, fc);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        v.0[i] = best[i] + 0.5 * (v.0[i] - best[i]);
                    }
                    v.1 = eval(f, &v.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    NelderMeadResult {
        best_params: simplex[0].0.clone(),
        best_value: simplex[0].1,
        evals,
    }
}

// ---------------------------------------------------------------------------
// falsifier

/// Search region: inside the hypothesis (the theorem predicts no negative
/// margins) or with one clause negated by construction (negatives are
/// reachable for the necessity checks).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FalsifyMode {
    HypothesisRegion,
    ViolatingRegion,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FalsifyReport {
    pub case: String,
    pub mode: FalsifyMode,
    pub multistarts: u64,
    pub evals: u64,
    pub best_margin: f64,
    pub found_violation: bool,
    pub witness: Option<SchurInstance>,
}

pub const FALSIFY_MULTISTARTS: u64 = 16;

/// Minimize the normalized margin over the parameterized region with
/// multistart Nelder-Mead. A violation means dropping more than `10 * tol`
/// below zero, well past accumulated rounding.
pub fn falsify(
    id: CaseId,
    g: &GFunctionSpec,
    mode: FalsifyMode,
    seed: u64,
    tol: f64,
    iters_per_start: u64,
) -> Result<FalsifyReport> {
    let k = param_dim(id)?;
    if mode == FalsifyMode::ViolatingRegion
        && !matches!(id, CaseId::S2 | CaseId::S3 | CaseId::S4)
    {
        return Err(Error::Config(
            "violating-region search is wired for the 2-, 3- and 4-variable cases".into(),
        ));
    }
    let mut best_margin = f64::INFINITY;
    let mut best_params: Option<Vec<f64>> = None;
    let mut total_evals = 0u64;
    for start in 0..FALSIFY_MULTISTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x5eed_0000 + start));
        let x0: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mut objective = |p: &[f64]| -> f64 {
            let inst = match mode {
                FalsifyMode::HypothesisRegion => instance_from_params(id, p, g),
                FalsifyMode::ViolatingRegion => violating_instance_from_params(id, p, g),
            };
            match inst.and_then(|i| eval_margin(id, &Structure::RealMul, &i)) {
                Ok(m) => m.normalized(),
                Err(_) => f64::INFINITY,
            }
        };
        let r = nelder_mead(&mut objective, &x0, 0.5, iters_per_start);
        total_evals += r.evals;
        if r.best_value < best_margin {
            best_margin = r.best_value;
            best_params = Some(r.best_params);
        }
    }
    let witness = match &best_params {
        Some(p) => {
            let inst = match mode {
                FalsifyMode::HypothesisRegion => instance_from_params(id, p, g)?,
                FalsifyMode::ViolatingRegion => violating_instance_from_params(id, p, g)?,
            };
            Some(inst)
        }
        None => None,
    };
    Ok(FalsifyReport {
        case: id.name().to_string(),
        mode,
        multistarts: FALSIFY_MULTISTARTS,
        evals: total_evals,
        best_margin,
        found_violation: best_margin < -10.0 * tol,
        witness,
    })
}

// ---------------------------------------------------------------------------
// necessity suite

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NecessityRecord {
    pub name: String,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

/// Pinned witnesses showing the hypotheses are not vacuous: dropping a
/// clause admits instances with strictly negative margins.
pub fn necessity_suite() -> Result<Vec<NecessityRecord>> {
    let mut out = Vec::new();

    // 1. coefficient bound in the 3-variable case: b = 5 > 2 = a + c drives
    // the sum to exactly -1 at (2, 1, 0).
    {
        let inst = SchurInstance::scalar(&[2.0, 1.0, 0.0], &[1.0, 5.0, 1.0], GFunctionSpec::identity());
        let m = eval_margin(CaseId::S3, &Structure::RealMul, &inst)?;
        let exact = crate::exact::oracle_margin_exact(
            &[2.0, 1.0, 0.0],
            &[1.0, 5.0, 1.0],
            &crate::exact::ExactG::from_spec(&GFunctionSpec::identity())?,
        )?;
        let exact_ok = crate::exact::agrees(-1.0, &exact, 0.0);
        out.push(NecessityRecord {
            name: "3var-coefficient-bound".into(),
            passed: (m.value + 1.0).abs() < 1e-12 && exact_ok,
            margin: m.value,
            detail: "a+c >= |b| dropped: margin is exactly -1".into(),
        });
    }

    // 2. sum-chain condition in the 4-variable case: the power-weight
    // instance at (2.5, 2, 1, 0.2) with t = 0.01 violates x1+x4 >= x2+x3
    // and dips below -0.1; a short search confirms the region is open.
    {
        let xs = [2.5, 2.0, 1.0, 0.2];
        let coeffs =
            crate::engine::build_coeffs(&crate::engine::CoeffBuild::FintaPower(0.01), &xs)?;
        let scs: Vec<f64> = coeffs.clone();
        let inst = SchurInstance::scalar(&xs, &scs, GFunctionSpec::identity());
        let pinned = eval_margin(CaseId::S4, &Structure::RealMul, &inst)?;
        let search = falsify(
            CaseId::S4,
            &GFunctionSpec::identity(),
            FalsifyMode::ViolatingRegion,
            42,
            1e-9,
            200,
        )?;
        let passed = pinned.value < -0.1 && search.best_margin < -0.1 && search.evals <= 100_000;
        out.push(NecessityRecord {
            name: "4var-sum-chain".into(),
            passed,
            margin: pinned.value.min(search.best_margin),
            detail: format!(
                "sum chain dropped: pinned margin {:.4}, search best {:.4} in {} evals",
                pinned.value, search.best_margin, search.evals
            ),
        });
    }

    // 3. the Q_g membership proviso: the table function with value 4 at the
    // midpoint, against g = sign(x) sqrt(|x|), lands at sqrt(2) - 2.
    {
        let f = godunova_levin_example();
        let g = GFunctionSpec::sign_sqrt();
        let r = qeq_cross_check(&f, &g, 1.0, 0.0, 0.5, 1e-9)?;
        let expect = 2.0f64.sqrt() - 2.0;
        out.push(NecessityRecord {
            name: "qg-membership-proviso".into(),
            passed: (r.margin_schur - expect).abs() < 1e-12 && r.margin_qg < 0.0 && r.signs_agree,
            margin: r.margin_schur,
            detail: "weighted midpoint witness: margin is sqrt(2) - 2".into(),
        });
    }

    Ok(out)
}

/// Check whether f = the table function fails the g-weighted class for the
/// square-root kernel but passes the plain Q-class: the weighting is not
/// redundant.
pub fn weighting_separates() -> Result<bool> {
    let f = godunova_levin_example();
    let samples = crate::gfun::QSamples {
        count: 512,
        extra: vec![(1.0, 0.0, 0.5)],
    };
    let plain = crate::gfun::certify_qclass(&f, &crate::gfun::QVariant::Q, &samples, 7)?;
    let weighted = crate::gfun::certify_qclass(
        &f,
        &crate::gfun::QVariant::Qg(GFunctionSpec::sign_sqrt()),
        &samples,
        7,
    )?;
    Ok(plain.passed && !weighted.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn campaign_zero_trials_has_no_margin() {
        let cfg = CampaignConfig {
            trials: 0,
            ..Default::default()
        };
        let r = run_campaign(CaseId::S3, &Structure::RealMul, &cfg).unwrap();
        assert!(r.min_margin.is_none());
        assert!(r.violations.is_empty());
    }

    #[test]
    fn campaign_s3_clean() {
        let cfg = CampaignConfig {
            trials: 300,
            seed: 5,
            ..Default::default()
        };
        let r = run_campaign(CaseId::S3, &Structure::RealMul, &cfg).unwrap();
        assert!(r.violations.is_empty(), "violations: {}", r.violations.len());
        assert!(r.min_margin.unwrap() >= -1e-9);
    }

    #[test]
    fn campaign_deterministic() {
        let cfg = CampaignConfig {
            trials: 100,
            seed: 99,
            ..Default::default()
        };
        let a = run_campaign(CaseId::S4, &Structure::RealMul, &cfg).unwrap();
        let b = run_campaign(CaseId::S4, &Structure::RealMul, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn nelder_mead_quadratic() {
        let mut f = |p: &[f64]| (p[0] - 3.0).powi(2) + (p[1] + 1.0).powi(2);
        let r = nelder_mead(&mut f, &[0.0, 0.0], 0.5, 200);
        assert!(r.best_value < 1e-10);
        assert!((r.best_params[0] - 3.0).abs() < 1e-4);
    }

    #[test]
    fn falsify_hypothesis_region_finds_nothing() {
        let r = falsify(
            CaseId::S3,
            &GFunctionSpec::identity(),
            FalsifyMode::HypothesisRegion,
            1,
            1e-9,
            150,
        )
        .unwrap();
        assert!(!r.found_violation, "margin {}", r.best_margin);
    }

    #[test]
    fn falsify_violating_region_finds_negatives() {
        let r = falsify(
            CaseId::S3,
            &GFunctionSpec::identity(),
            FalsifyMode::ViolatingRegion,
            1,
            1e-9,
            150,
        )
        .unwrap();
        assert!(r.found_violation, "margin {}", r.best_margin);
        assert!(r.best_margin < -1e-3);
    }

    #[test]
    fn necessity_suite_all_pass() {
        for rec in necessity_suite().unwrap() {
            assert!(rec.passed, "{}: {} ({})", rec.name, rec.margin, rec.detail);
        }
    }

    #[test]
    fn weighted_class_differs_from_plain() {
        assert!(weighting_separates().unwrap());
    }
}
