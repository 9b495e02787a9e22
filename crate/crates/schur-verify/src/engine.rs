//! The theorem-case registry: one hypothesis predicate and one margin
//! evaluator per inequality, plus the even-to-odd variable-count reduction
//! identities and coefficient builders.
//!
//! A failed hypothesis names every violated clause:
//!
//! ```
//! use schur_verify::engine::{check_hypothesis, CaseId, SchurInstance};
//! use schur_verify::gfun::GFunctionSpec;
//! use schur_verify::structure::Structure;
//!
//! // b = 5 exceeds a + c = 2, so the coefficient bound is violated
//! let inst = SchurInstance::scalar(&[2.0, 1.0, 0.0], &[1.0, 5.0, 1.0],
//!     GFunctionSpec::identity());
//! let h = check_hypothesis(CaseId::S3, &Structure::RealMul, &inst, 1e-9).unwrap();
//! assert!(!h.satisfied);
//! assert!(h.failed.iter().any(|c| c.contains("a+c >= |b|")));
//! ```

use serde::{Deserialize, Serialize};

use crate::element::{cmp, Element};
use crate::error::{Error, Result};
use crate::gfun::{CoeffFunctionSpec, GClass, GFunctionSpec, Parity};
use crate::structure::{is_upper_bound, Structure};

/// Registry identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    /// 2 variables: a g(x-y) + b g(y-x) with a >= |b|.
    S2,
    /// 3 variables with real coefficients, a + c >= |b|.
    S3,
    /// 3 variables with coefficients f(x_i) (monotone/convex/bounded-ratio
    /// weights, including power weights).
    S3F,
    /// 3 variables with coefficients f(a), f(b), f(c) on a monotone chain.
    S3V,
    /// Convex generalization: coefficients (alpha f(a), f(b), (1-alpha) f(c)).
    S3VG,
    /// 4 variables with the sum-chain condition.
    S4,
    /// 5-variable corollary of the 4-variable case.
    S5,
    /// 6 variables; needs the G2 conditions on g.
    S6,
    /// 7-variable corollary of the 6-variable case.
    S7,
    /// Equivalence of the 3-variable weighted inequality with the Q_g
    /// defining inequality.
    QEQ,
    /// 3 variables over a star structure, real coefficients.
    C3,
    /// 3 variables over a commutative ring, element coefficients and star
    /// powers (or an even/odd polynomial).
    C3P,
    /// 4-variable ring case with upper-bound companions for even indices.
    R4,
    /// 5-variable ring corollary.
    R5,
    /// 6-variable ring case; needs invertibility of x2 - x6.
    R6,
    /// 7-variable ring corollary.
    R7,
}

pub const CASE_IDS: &[(&str, CaseId)] = &[
    ("S2", CaseId::S2),
    ("S3", CaseId::S3),
    ("S3F", CaseId::S3F),
    ("S3V", CaseId::S3V),
    ("S3VG", CaseId::S3VG),
    ("S4", CaseId::S4),
    ("S5", CaseId::S5),
    ("S6", CaseId::S6),
    ("S7", CaseId::S7),
    ("QEQ", CaseId::QEQ),
    ("C3", CaseId::C3),
    ("C3P", CaseId::C3P),
    ("R4", CaseId::R4),
    ("R5", CaseId::R5),
    ("R6", CaseId::R6),
    ("R7", CaseId::R7),
];

impl CaseId {
    pub fn parse(s: &str) -> Result<CaseId> {
        CASE_IDS
            .iter()
            .find(|(name, _)| *name == s)
            .map(|(_, id)| *id)
            .ok_or_else(|| Error::Config(format!("unknown case id {s:?}")))
    }

    pub fn name(&self) -> &'static str {
        CASE_IDS
            .iter()
            .find(|(_, id)| id == self)
            .map(|(name, _)| *name)
            .unwrap()
    }
}

/// What the case requires of the scalar function g.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GRequirement {
    None,
    G,
    G2,
    OddG,
}

/// Registry entry: arity, structural requirements, and a short statement of
/// the hypothesis.
#[derive(Debug, Clone)]
pub struct TheoremCase {
    pub id: CaseId,
    pub arity: usize,
    pub g_req: GRequirement,
    pub needs_ring: bool,
    pub statement: &'static str,
}

pub fn registry() -> Vec<TheoremCase> {
    use CaseId::*;
    use GRequirement as GR;
    vec![
        TheoremCase { id: S2, arity: 2, g_req: GR::G, needs_ring: false,
            statement: "x >= y, a >= |b|  =>  a g(x-y) + b g(y-x) >= 0" },
        TheoremCase { id: S3, arity: 3, g_req: GR::G, needs_ring: false,
            statement: "x >= y >= z, a,c >= 0, a+c >= |b|  =>  sum of weighted g-products >= 0" },
        TheoremCase { id: S3F, arity: 3, g_req: GR::G, needs_ring: false,
            statement: "coefficients f(x_i) for admissible f  =>  3-variable sum >= 0" },
        TheoremCase { id: S3V, arity: 3, g_req: GR::G, needs_ring: false,
            statement: "monotone chain a >= b >= c (or reversed), f convex or monotone nonneg" },
        TheoremCase { id: S3VG, arity: 3, g_req: GR::G, needs_ring: false,
            statement: "a >= c, alpha in [0,1], b = alpha a + (1-alpha) c, f convex nonneg" },
        TheoremCase { id: S4, arity: 4, g_req: GR::G, needs_ring: false,
            statement: "x1+x4 >= x2+x3, a1 >= max(|a2|,|a4|), a3 >= |a4|" },
        TheoremCase { id: S5, arity: 5, g_req: GR::G, needs_ring: false,
            statement: "x1+x4 >= x2+x3, a1 >= max(|a2|,|a4|-a5), a3,a5 >= 0, a3+a5 >= |a4|" },
        TheoremCase { id: S6, arity: 6, g_req: GR::G2, needs_ring: false,
            statement: "x1+x6 >= x2+x5 >= x3+x4, a1 >= |a2| >= a5 >= |a6|, a3 >= |a4|" },
        TheoremCase { id: S7, arity: 7, g_req: GR::G2, needs_ring: false,
            statement: "6-variable chains, a1 >= |a2| >= a5 >= |a6|-a7, a3 >= |a4|, a5,a7 >= 0" },
        TheoremCase { id: QEQ, arity: 3, g_req: GR::OddG, needs_ring: false,
            statement: "weighted 3-variable inequality holds iff f is in the g-weighted Q-class" },
        TheoremCase { id: C3, arity: 3, g_req: GR::None, needs_ring: false,
            statement: "x >= y >= z in I, real a,c >= 0, a+c >= |b|  =>  star sum >= 0 in K" },
        TheoremCase { id: C3P, arity: 3, g_req: GR::None, needs_ring: true,
            statement: "ring elements a,c >= 0, a+c upper bound of {b,-b}, star powers or even/odd polynomial" },
        TheoremCase { id: R4, arity: 4, g_req: GR::None, needs_ring: true,
            statement: "sum chain, a1 >= hat(a2) >= a3 >= hat(a4) >= 0" },
        TheoremCase { id: R5, arity: 5, g_req: GR::None, needs_ring: true,
            statement: "sum chain, a1 >= hat(a2) >= a3 >= 0, tail alternative on (a4, a5)" },
        TheoremCase { id: R6, arity: 6, g_req: GR::None, needs_ring: true,
            statement: "two sum chains, (x2-x6) positive definite, a1 >= hat(a2) >= a5 >= hat(a6) >= 0, a3 >= hat(a4) >= 0" },
        TheoremCase { id: R7, arity: 7, g_req: GR::None, needs_ring: true,
            statement: "6-variable ring chains plus tail alternative on (a6, a7)" },
    ]
}

pub fn case(id: CaseId) -> TheoremCase {
    registry().into_iter().find(|c| c.id == id).unwrap()
}

/// Even/odd polynomial with nonnegative coefficients, evaluated with star
/// powers. `coeffs[k]` multiplies the k-th star power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingPoly {
    pub coeffs: Vec<f64>,
}

impl RingPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|&c| c < 0.0) {
            return Err(Error::Domain("polynomial coefficients must be >= 0".into()));
        }
        let even = coeffs.iter().enumerate().any(|(k, &c)| c != 0.0 && k % 2 == 0);
        let odd = coeffs.iter().enumerate().any(|(k, &c)| c != 0.0 && k % 2 == 1);
        if even && odd {
            return Err(Error::Domain(
                "polynomial must have only even or only odd powers".into(),
            ));
        }
        Ok(RingPoly { coeffs })
    }

    pub fn eval(&self, s: &Structure, e: &Element) -> Result<Element> {
        let mut acc: Option<Element> = None;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let term = s.pow_star(e, k as u32)?.scale(c);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        acc.ok_or_else(|| Error::Config("empty polynomial".into()))
    }
}

/// Auxiliary parameters for the weighted and convex-combination cases.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Aux {
    /// (a, b, c) chain for the monotone-chain 3-variable forms.
    pub abc: Option<(f64, f64, f64)>,
    /// Convex-combination weight.
    pub alpha: Option<f64>,
    /// Power-weight exponent.
    pub t: Option<f64>,
    /// Power exponent for the g = x^k forms and the Q_k variant.
    pub k: Option<f64>,
}

/// One concrete input to a theorem case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchurInstance {
    pub xs: Vec<Element>,
    pub coeffs: Vec<Element>,
    /// Upper-bound companions for even-index coefficients (1-based), aligned
    /// with `coeffs`; `None` entries mean the coefficient bounds itself.
    pub hats: Option<Vec<Option<Element>>>,
    pub g: Option<GFunctionSpec>,
    pub f: Option<CoeffFunctionSpec>,
    pub aux: Option<Aux>,
    /// Star exponent for the ring cases.
    pub n: u32,
    /// Optional even/odd polynomial replacing the plain star power.
    pub poly: Option<RingPoly>,
}

impl SchurInstance {
    pub fn scalar(xs: &[f64], coeffs: &[f64], g: GFunctionSpec) -> Self {
        SchurInstance {
            xs: xs.iter().map(|&v| Element::scalar(v)).collect(),
            coeffs: coeffs.iter().map(|&v| Element::scalar(v)).collect(),
            hats: None,
            g: Some(g),
            f: None,
            aux: None,
            n: 1,
            poly: None,
        }
    }
}

/// Signed distance of a Schur sum from the boundary of the positive cone:
/// the sum itself for scalar-valued cases, the smallest eigenvalue for
/// matrix-valued ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub value: f64,
    pub element: Option<Element>,
    pub scale: f64,
}

impl Margin {
    pub fn is_violation(&self, tol: f64) -> bool {
        self.value < -tol * self.scale
    }

    /// Margin normalized by its scale.
    pub fn normalized(&self) -> f64 {
        self.value / self.scale
    }

    fn from_terms(terms: Vec<Element>) -> Result<Margin> {
        let mut scale = 1.0f64;
        let mut sum: Option<Element> = None;
        for t in terms {
            scale = scale.max(1.0 + t.magnitude());
            sum = Some(match sum {
                None => t,
                Some(s) => s.add(&t)?,
            });
        }
        let sum = sum.ok_or_else(|| Error::Config("no terms".into()))?;
        match &sum {
            Element::Scalar(v) => Ok(Margin {
                value: *v,
                element: None,
                scale,
            }),
            Element::Vector { values, .. } => Ok(Margin {
                value: values.iter().cloned().fold(f64::INFINITY, f64::min),
                element: Some(sum.clone()),
                scale,
            }),
            Element::Matrix(m) => Ok(Margin {
                value: m.min_eigenvalue(),
                element: Some(sum.clone()),
                scale,
            }),
        }
    }
}

fn scalar_values(xs: &[Element], what: &str) -> Result<Vec<f64>> {
    xs.iter()
        .map(|e| {
            e.as_scalar()
                .ok_or_else(|| Error::Config(format!("{what} must be scalar")))
        })
        .collect()
}

fn require_g(inst: &SchurInstance) -> Result<&GFunctionSpec> {
    inst.g
        .as_ref()
        .ok_or_else(|| Error::Config("case requires g".into()))
}

/// Effective coefficients: explicit ones, or built from the attached
/// coefficient function / chain parameters.
pub fn effective_coeffs(id: CaseId, inst: &SchurInstance) -> Result<Vec<f64>> {
    if !inst.coeffs.is_empty() {
        return scalar_values(&inst.coeffs, "coefficients");
    }
    let xs = scalar_values(&inst.xs, "variables")?;
    match id {
        CaseId::S3F => {
            if let Some(t) = inst.aux.as_ref().and_then(|a| a.t) {
                build_coeffs(&CoeffBuild::FintaPower(t), &xs)
            } else {
                let f = inst
                    .f
                    .clone()
                    .ok_or_else(|| Error::Config("S3F needs f or t".into()))?;
                build_coeffs(&CoeffBuild::FromF(f), &xs)
            }
        }
        CaseId::S3V => {
            let f = inst.f.clone().ok_or_else(|| Error::Config("S3V needs f".into()))?;
            let (a, b, c) = inst
                .aux
                .as_ref()
                .and_then(|x| x.abc)
                .ok_or_else(|| Error::Config("S3V needs the (a,b,c) chain".into()))?;
            build_coeffs(&CoeffBuild::VornicuFromF(f, a, b, c), &xs)
        }
        CaseId::S3VG => {
            let f = inst.f.clone().ok_or_else(|| Error::Config("S3VG needs f".into()))?;
            let aux = inst.aux.as_ref().ok_or_else(|| Error::Config("S3VG needs aux".into()))?;
            let (a, _, c) = aux.abc.ok_or_else(|| Error::Config("S3VG needs (a,_,c)".into()))?;
            let alpha = aux.alpha.ok_or_else(|| Error::Config("S3VG needs alpha".into()))?;
            build_coeffs(&CoeffBuild::VornicuGeneral(f, a, c, alpha), &xs)
        }
        _ => Err(Error::Config("case has no implicit coefficients".into())),
    }
}

/// Scalar m-variable sum `sum_i a_i prod_{j != i} g(x_i - x_j)`.
fn scalar_sum_terms(xs: &[f64], coeffs: &[f64], g: &GFunctionSpec) -> Vec<f64> {
    (0..xs.len())
        .map(|i| {
            let prod: f64 = (0..xs.len())
                .filter(|&j| j != i)
                .map(|j| g.eval(xs[i] - xs[j]))
                .product();
            coeffs[i] * prod
        })
        .collect()
}

/// One ring term `a_i * prod_{j != i} (x_i - x_j)^n`, star-composed left to
/// right in ascending j. A fixed association order keeps nonassociative
/// products well-defined.
fn ring_term(
    s: &Structure,
    coeff: &Element,
    xs: &[Element],
    i: usize,
    n: u32,
    poly: Option<&RingPoly>,
) -> Result<Element> {
    let mut acc = coeff.clone();
    for j in 0..xs.len() {
        if j == i {
            continue;
        }
        let d = xs[i].sub(&xs[j])?;
        let factor = match poly {
            Some(p) => p.eval(s, &d)?,
            None => s.pow_star(&d, n)?,
        };
        acc = s.star(&acc, &factor)?;
    }
    Ok(acc)
}

/// Evaluate the margin of the cited inequality for a concrete instance.
pub fn eval_margin(id: CaseId, s: &Structure, inst: &SchurInstance) -> Result<Margin> {
    let spec = case(id);
    if inst.xs.len() != spec.arity {
        return Err(Error::Config(format!(
            "{} expects {} variables, got {}",
            id.name(),
            spec.arity,
            inst.xs.len()
        )));
    }
    match id {
        CaseId::S2
        | CaseId::S3
        | CaseId::S3F
        | CaseId::S3V
        | CaseId::S3VG
        | CaseId::S4
        | CaseId::S5
        | CaseId::S6
        | CaseId::S7
        | CaseId::QEQ => {
            let xs = scalar_values(&inst.xs, "variables")?;
            let coeffs = effective_coeffs_or_explicit(id, inst)?;
            if coeffs.len() != spec.arity {
                return Err(Error::Config("coefficient count mismatch".into()));
            }
            let g = require_g(inst)?;
            let terms = scalar_sum_terms(&xs, &coeffs, g);
            let scale = terms.iter().fold(1.0f64, |m, t| m.max(1.0 + t.abs()));
            Ok(Margin {
                value: terms.iter().sum(),
                element: None,
                scale,
            })
        }
        CaseId::C3 => {
            let coeffs = scalar_values(&inst.coeffs, "C3 coefficients")?;
            if coeffs.len() != 3 {
                return Err(Error::Config("C3 needs 3 real coefficients".into()));
            }
            let (x, y, z) = (&inst.xs[0], &inst.xs[1], &inst.xs[2]);
            let terms = vec![
                s.star(&x.sub(y)?, &x.sub(z)?)?.scale(coeffs[0]),
                s.star(&y.sub(x)?, &y.sub(z)?)?.scale(coeffs[1]),
                s.star(&z.sub(x)?, &z.sub(y)?)?.scale(coeffs[2]),
            ];
            Margin::from_terms(terms)
        }
        CaseId::C3P => {
            if !s.is_ring() {
                return Err(Error::Config("C3P needs a ring structure".into()));
            }
            if inst.coeffs.len() != 3 {
                return Err(Error::Config("C3P needs 3 element coefficients".into()));
            }
            let terms: Vec<Element> = (0..3)
                .map(|i| ring_term(s, &inst.coeffs[i], &inst.xs, i, inst.n, inst.poly.as_ref()))
                .collect::<Result<_>>()?;
            Margin::from_terms(terms)
        }
        CaseId::R4 | CaseId::R5 | CaseId::R6 | CaseId::R7 => {
            if !s.is_ring() {
                return Err(Error::Config("ring case needs a ring structure".into()));
            }
            if inst.coeffs.len() != spec.arity {
                return Err(Error::Config("coefficient count mismatch".into()));
            }
            let terms: Vec<Element> = (0..spec.arity)
                .map(|i| ring_term(s, &inst.coeffs[i], &inst.xs, i, inst.n, inst.poly.as_ref()))
                .collect::<Result<_>>()?;
            Margin::from_terms(terms)
        }
    }
}

fn effective_coeffs_or_explicit(id: CaseId, inst: &SchurInstance) -> Result<Vec<f64>> {
    if inst.coeffs.is_empty() {
        effective_coeffs(id, inst)
    } else {
        scalar_values(&inst.coeffs, "coefficients")
    }
}

/// Result of a hypothesis check: every failed clause is named.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisResult {
    pub satisfied: bool,
    pub failed: Vec<String>,
}

struct Clauses {
    tol: f64,
    failed: Vec<String>,
}

impl Clauses {
    fn new(tol: f64) -> Self {
        Clauses {
            tol,
            failed: Vec::new(),
        }
    }

    fn scalar_ge(&mut self, l: f64, r: f64, name: &str) {
        let band = self.tol * (1.0 + l.abs().max(r.abs()));
        if l < r - band {
            self.failed.push(name.to_string());
        }
    }

    fn elem_ge(&mut self, l: &Element, r: &Element, name: &str) {
        match cmp(l, r, self.tol) {
            Ok(res) if res.is_ge() => {}
            _ => self.failed.push(name.to_string()),
        }
    }

    fn upper_bound(&mut self, u: &Element, b: &Element, name: &str) {
        match is_upper_bound(u, b, self.tol) {
            Ok(true) => {}
            _ => self.failed.push(name.to_string()),
        }
    }

    fn check(&mut self, ok: bool, name: &str) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn finish(self) -> HypothesisResult {
        HypothesisResult {
            satisfied: self.failed.is_empty(),
            failed: self.failed,
        }
    }
}

fn nonincreasing_chain(cl: &mut Clauses, xs: &[Element]) {
    for i in 0..xs.len().saturating_sub(1) {
        cl.elem_ge(&xs[i], &xs[i + 1], &format!("x{} >= x{}", i + 1, i + 2));
    }
}

fn sum_chain_4(cl: &mut Clauses, xs: &[Element]) -> Result<()> {
    let l = xs[0].add(&xs[3])?;
    let r = xs[1].add(&xs[2])?;
    cl.elem_ge(&l, &r, "x1+x4 >= x2+x3");
    Ok(())
}

fn sum_chain_6(cl: &mut Clauses, xs: &[Element]) -> Result<()> {
    let a = xs[0].add(&xs[5])?;
    let b = xs[1].add(&xs[4])?;
    let c = xs[2].add(&xs[3])?;
    cl.elem_ge(&a, &b, "x1+x6 >= x2+x5");
    cl.elem_ge(&b, &c, "x2+x5 >= x3+x4");
    Ok(())
}

/// Upper-bound companion for a 0-based even-position coefficient: the
/// supplied hat, or the coefficient itself when it is nonnegative
/// (self-bounding).
fn effective_hat(inst: &SchurInstance, idx: usize, tol: f64) -> Result<Element> {
    if let Some(hats) = &inst.hats {
        if let Some(Some(h)) = hats.get(idx) {
            return Ok(h.clone());
        }
    }
    let a = &inst.coeffs[idx];
    if cmp(a, &a.zero_like(), tol)?.is_ge() {
        Ok(a.clone())
    } else {
        Err(Error::Config(format!(
            "coefficient {} needs an upper-bound companion",
            idx + 1
        )))
    }
}

fn f_is_convex_or_monotone(f: &CoeffFunctionSpec) -> bool {
    matches!(
        f,
        CoeffFunctionSpec::ConvexPiecewiseLinear(_)
            | CoeffFunctionSpec::MonotonePiecewiseLinear(_)
            | CoeffFunctionSpec::PowerWeight(_)
    )
}

/// Check every clause of the case's hypothesis against an instance.
pub fn check_hypothesis(
    id: CaseId,
    s: &Structure,
    inst: &SchurInstance,
    tol: f64,
) -> Result<HypothesisResult> {
    let spec = case(id);
    if inst.xs.len() != spec.arity {
        return Err(Error::Config("arity mismatch".into()));
    }
    let mut cl = Clauses::new(tol);
    nonincreasing_chain(&mut cl, &inst.xs);

    match id {
        CaseId::S2 => {
            let a = scalar_values(&inst.coeffs, "coefficients")?;
            cl.scalar_ge(a[0], a[1].abs(), "a >= |b|");
            check_g_requirement(&mut cl, spec.g_req, inst)?;
        }
        CaseId::S3 => {
            let a = scalar_values(&inst.coeffs, "coefficients")?;
            cl.scalar_ge(a[0], 0.0, "a >= 0");
            cl.scalar_ge(a[2], 0.0, "c >= 0");
            cl.scalar_ge(a[0] + a[2], a[1].abs(), "a+c >= |b|");
            check_g_requirement(&mut cl, spec.g_req, inst)?;
        }
        CaseId::S3F => {
            check_g_requirement(&mut cl, spec.g_req, inst)?;
            let xs = scalar_values(&inst.xs, "variables")?;
            if let Some(t) = inst.aux.as_ref().and_then(|a| a.t) {
                cl.check(t > 0.0, "t > 0");
                for (i, &x) in xs.iter().enumerate() {
                    cl.scalar_ge(x, 0.0, &format!("x{} >= 0", i + 1));
                }
            } else if let Some(f) = &inst.f {
                cl.check(f.validate().is_ok(), "f well-formed");
                let bounded_only = matches!(f, CoeffFunctionSpec::BoundedRatio { .. });
                if bounded_only {
                    // the bounded-ratio route needs the power form of g
                    let g = require_g(inst)?;
                    cl.check(g.is_integer_power().is_some(), "bounded-ratio f needs g = x^k");
                } else {
                    cl.check(f_is_convex_or_monotone(f), "f convex or monotone");
                }
                for &x in &xs {
                    if let Ok(v) = f.eval(x) {
                        cl.scalar_ge(v, 0.0, "f nonnegative on the variables");
                    } else {
                        cl.check(false, "f defined on the variables");
                    }
                }
            } else {
                return Err(Error::Config("S3F needs f or t".into()));
            }
        }
        CaseId::S3V => {
            check_g_requirement(&mut cl, spec.g_req, inst)?;
            let f = inst.f.as_ref().ok_or_else(|| Error::Config("S3V needs f".into()))?;
            let (a, b, c) = inst
                .aux
                .as_ref()
                .and_then(|x| x.abc)
                .ok_or_else(|| Error::Config("S3V needs the (a,b,c) chain".into()))?;
            // a <= b <= c mirrors to a >= b >= c; accept either and
            // canonicalize.
            let descending = a >= c;
            let (a, b, c) = if descending { (a, b, c) } else { (c, b, a) };
            cl.scalar_ge(a, b, "a >= b (after canonicalization)");
            cl.scalar_ge(b, c, "b >= c (after canonicalization)");
            cl.check(f_is_convex_or_monotone(f), "f convex or monotone");
            for v in [a, b, c] {
                if let Ok(fv) = f.eval(v) {
                    cl.scalar_ge(fv, 0.0, "f nonnegative on the chain");
                } else {
                    cl.check(false, "f defined on the chain");
                }
            }
        }
        CaseId::S3VG => {
            check_g_requirement(&mut cl, spec.g_req, inst)?;
            let f = inst.f.as_ref().ok_or_else(|| Error::Config("S3VG needs f".into()))?;
            let aux = inst.aux.as_ref().ok_or_else(|| Error::Config("S3VG needs aux".into()))?;
            let (a, _, c) = aux.abc.ok_or_else(|| Error::Config("S3VG needs (a,_,c)".into()))?;
            let alpha = aux.alpha.ok_or_else(|| Error::Config("S3VG needs alpha".into()))?;
            cl.check((0.0..=1.0).contains(&alpha), "alpha in [0,1]");
            cl.scalar_ge(a, c, "a >= c");
            cl.check(
                matches!(f, CoeffFunctionSpec::ConvexPiecewiseLinear(_))
                    || matches!(f, CoeffFunctionSpec::PowerWeight(t) if *t >= 1.0),
                "f convex",
            );
        }
        CaseId::S4 => {
            sum_chain_4(&mut cl, &inst.xs)?;
            let a = scalar_values(&effective_coeff_elems(id, inst)?, "coefficients")?;
            cl.scalar_ge(a[0], a[1].abs().max(a[3].abs()), "a1 >= max(|a2|,|a4|)");
            cl.scalar_ge(a[2], a[3].abs(), "a3 >= |a4|");
            check_g_requirement(&mut cl, spec.g_req, inst)?;
        }
        CaseId::S5 => {
            sum_chain_4(&mut cl, &inst.xs)?;
            let a = scalar_values(&inst.coeffs, "coefficients")?;
            cl.scalar_ge(a[2], 0.0, "a3 >= 0");
            cl.scalar_ge(a[4], 0.0, "a5 >= 0");
            cl.scalar_ge(a[2] + a[4], a[3].abs(), "a3+a5 >= |a4|");
            cl.scalar_ge(a[0], a[1].abs().max(a[3].abs() - a[4]), "a1 >= max(|a2|,|a4|-a5)");
            check_g_requirement(&mut cl, spec.g_req, inst)?;
        }
        CaseId::S6 => {
            sum_chain_6(&mut cl, &inst.xs)?;
            let a = scalar_values(&inst.coeffs, "coefficients")?;
            cl.scalar_ge(a[0], a[1].abs(), "a1 >= |a2|");
            cl.scalar_ge(a[1].abs(), a[4], "|a2| >= a5");
            cl.scalar_ge(a[4], a[5].abs(), "a5 >= |a6|");
            cl.scalar_ge(a[2], a[3].abs(), "a3 >= |a4|");
            check_g_requirement(&mut cl, spec.g_req, inst)?;
        }
        CaseId::S7 => {
            sum_chain_6(&mut cl, &inst.xs[..6].to_vec())?;
            cl.elem_ge(&inst.xs[5], &inst.xs[6], "x6 >= x7");
            let a = scalar_values(&inst.coeffs, "coefficients")?;
            cl.scalar_ge(a[0], a[1].abs(), "a1 >= |a2|");
            cl.scalar_ge(a[1].abs(), a[4], "|a2| >= a5");
            cl.scalar_ge(a[4], a[5].abs() - a[6], "a5 >= |a6|-a7");
            cl.scalar_ge(a[2], a[3].abs(), "a3 >= |a4|");
            cl.scalar_ge(a[4], 0.0, "a5 >= 0");
            cl.scalar_ge(a[6], 0.0, "a7 >= 0");
            check_g_requirement(&mut cl, spec.g_req, inst)?;
        }
        CaseId::QEQ => {
            let g = require_g(inst)?;
            cl.check(g.parity() == Parity::Odd, "g odd");
        }
        CaseId::C3 => {
            let a = scalar_values(&inst.coeffs, "coefficients")?;
            cl.scalar_ge(a[0], 0.0, "a >= 0");
            cl.scalar_ge(a[2], 0.0, "c >= 0");
            cl.scalar_ge(a[0] + a[2], a[1].abs(), "a+c >= |b|");
        }
        CaseId::C3P => {
            cl.check(s.is_ring(), "structure is a ring");
            let zero = inst.coeffs[0].zero_like();
            cl.elem_ge(&inst.coeffs[0], &zero, "a >= 0");
            cl.elem_ge(&inst.coeffs[2], &zero, "c >= 0");
            let ac = inst.coeffs[0].add(&inst.coeffs[2])?;
            cl.upper_bound(&ac, &inst.coeffs[1], "a+c upper bound of {b,-b}");
        }
        CaseId::R4 => {
            cl.check(s.is_ring(), "structure is a ring");
            sum_chain_4(&mut cl, &inst.xs)?;
            let h2 = effective_hat(inst, 1, tol)?;
            let h4 = effective_hat(inst, 3, tol)?;
            cl.upper_bound(&h2, &inst.coeffs[1], "hat(a2) bounds {a2,-a2}");
            cl.upper_bound(&h4, &inst.coeffs[3], "hat(a4) bounds {a4,-a4}");
            cl.elem_ge(&inst.coeffs[0], &h2, "a1 >= hat(a2)");
            cl.elem_ge(&h2, &inst.coeffs[2], "hat(a2) >= a3");
            cl.elem_ge(&inst.coeffs[2], &h4, "a3 >= hat(a4)");
            cl.elem_ge(&h4, &h4.zero_like(), "hat(a4) >= 0");
        }
        CaseId::R5 => {
            cl.check(s.is_ring(), "structure is a ring");
            sum_chain_4(&mut cl, &inst.xs[..4].to_vec())?;
            cl.elem_ge(&inst.xs[3], &inst.xs[4], "x4 >= x5");
            let h2 = effective_hat(inst, 1, tol)?;
            let h4 = effective_hat(inst, 3, tol)?;
            cl.upper_bound(&h2, &inst.coeffs[1], "hat(a2) bounds {a2,-a2}");
            cl.upper_bound(&h4, &inst.coeffs[3], "hat(a4) bounds {a4,-a4}");
            cl.elem_ge(&inst.coeffs[0], &h2, "a1 >= hat(a2)");
            cl.elem_ge(&h2, &inst.coeffs[2], "hat(a2) >= a3");
            let zero = inst.coeffs[2].zero_like();
            cl.elem_ge(&inst.coeffs[2], &zero, "a3 >= 0");
            // tail alternative: a3+a5 >= hat(a4) >= a5 >= 0, or a5 >= hat(a4) >= 0
            let a5 = &inst.coeffs[4];
            let first = clause_chain_holds(
                &[inst.coeffs[2].add(a5)?, h4.clone(), a5.clone(), zero.clone()],
                tol,
            );
            let second = clause_chain_holds(&[a5.clone(), h4.clone(), zero], tol);
            cl.check(first || second, "tail alternative on (a4, a5)");
        }
        CaseId::R6 | CaseId::R7 => {
            cl.check(s.is_ring(), "structure is a ring");
            let head = &inst.xs[..6];
            sum_chain_6(&mut cl, head)?;
            if id == CaseId::R7 {
                cl.elem_ge(&inst.xs[5], &inst.xs[6], "x6 >= x7");
            }
            // positive definiteness of x2 - x6, hence invertibility
            let d = inst.xs[1].sub(&inst.xs[5])?;
            let pd = match &d {
                Element::Scalar(v) => *v > tol * (1.0 + v.abs()),
                Element::Matrix(m) => {
                    m.min_eigenvalue() > tol * (1.0 + m.frobenius_norm())
                }
                Element::Vector { values, .. } => values.iter().all(|&v| v > tol),
            };
            cl.check(pd, "(x2-x6) positive definite");
            let h2 = effective_hat(inst, 1, tol)?;
            let h4 = effective_hat(inst, 3, tol)?;
            let h6 = effective_hat(inst, 5, tol)?;
            cl.upper_bound(&h2, &inst.coeffs[1], "hat(a2) bounds {a2,-a2}");
            cl.upper_bound(&h4, &inst.coeffs[3], "hat(a4) bounds {a4,-a4}");
            cl.upper_bound(&h6, &inst.coeffs[5], "hat(a6) bounds {a6,-a6}");
            let zero = inst.coeffs[0].zero_like();
            cl.elem_ge(&inst.coeffs[0], &h2, "a1 >= hat(a2)");
            cl.elem_ge(&h2, &inst.coeffs[4], "hat(a2) >= a5");
            cl.elem_ge(&inst.coeffs[2], &h4, "a3 >= hat(a4)");
            cl.elem_ge(&h4, &zero, "hat(a4) >= 0");
            if id == CaseId::R6 {
                cl.elem_ge(&inst.coeffs[4], &h6, "a5 >= hat(a6)");
                cl.elem_ge(&h6, &zero, "hat(a6) >= 0");
            } else {
                let a5 = &inst.coeffs[4];
                let a7 = &inst.coeffs[6];
                let first = clause_chain_holds(
                    &[a5.add(a7)?, h6.clone(), a7.clone(), zero.clone()],
                    tol,
                );
                let second = clause_chain_holds(&[a7.clone(), h6.clone(), zero.clone()], tol);
                cl.check(first || second, "tail alternative on (a6, a7)");
                // the head chain still must reach hat(a6)
                cl.elem_ge(&inst.coeffs[4], &h6.sub(a7)?, "a5 >= hat(a6)-a7");
                cl.elem_ge(a5, &zero, "a5 >= 0");
            }
        }
    }
    Ok(cl.finish())
}

fn clause_chain_holds(chain: &[Element], tol: f64) -> bool {
    chain.windows(2).all(|w| {
        cmp(&w[0], &w[1], tol)
            .map(|r| r.is_ge())
            .unwrap_or(false)
    })
}

fn effective_coeff_elems(id: CaseId, inst: &SchurInstance) -> Result<Vec<Element>> {
    if inst.coeffs.is_empty() {
        Ok(effective_coeffs(id, inst)?
            .into_iter()
            .map(Element::scalar)
            .collect())
    } else {
        Ok(inst.coeffs.clone())
    }
}

fn check_g_requirement(cl: &mut Clauses, req: GRequirement, inst: &SchurInstance) -> Result<()> {
    match req {
        GRequirement::None => Ok(()),
        GRequirement::G => {
            require_g(inst)?;
            Ok(())
        }
        GRequirement::G2 => {
            let g = require_g(inst)?;
            cl.check(g.claimed() == GClass::G2, "g claimed in the G2 class");
            Ok(())
        }
        GRequirement::OddG => {
            let g = require_g(inst)?;
            cl.check(g.parity() == Parity::Odd, "g odd");
            Ok(())
        }
    }
}

/// Coefficient builders for the weighted cases.
#[derive(Debug, Clone)]
pub enum CoeffBuild {
    /// Finta weights `x_i^t`, requiring `x_i >= 0` and `t > 0`.
    FintaPower(f64),
    /// `f(x_i)`.
    FromF(CoeffFunctionSpec),
    /// `(f(a), f(b), f(c))` on a monotone chain.
    VornicuFromF(CoeffFunctionSpec, f64, f64, f64),
    /// `(alpha f(a), f(alpha a + (1-alpha) c), (1-alpha) f(c))`.
    VornicuGeneral(CoeffFunctionSpec, f64, f64, f64),
}

pub fn build_coeffs(kind: &CoeffBuild, xs: &[f64]) -> Result<Vec<f64>> {
    match kind {
        CoeffBuild::FintaPower(t) => {
            if *t <= 0.0 {
                return Err(Error::Domain("power weight needs t > 0".into()));
            }
            xs.iter()
                .map(|&x| {
                    if x < 0.0 {
                        Err(Error::Domain(format!("power weight at negative x = {x}")))
                    } else if x == 0.0 {
                        Ok(0.0)
                    } else {
                        Ok(x.powf(*t))
                    }
                })
                .collect()
        }
        CoeffBuild::FromF(f) => xs.iter().map(|&x| f.eval(x)).collect(),
        CoeffBuild::VornicuFromF(f, a, b, c) => {
            Ok(vec![f.eval(*a)?, f.eval(*b)?, f.eval(*c)?])
        }
        CoeffBuild::VornicuGeneral(f, a, c, alpha) => {
            if !(0.0..=1.0).contains(alpha) {
                return Err(Error::Domain("alpha must lie in [0,1]".into()));
            }
            let b = alpha * a + (1.0 - alpha) * c;
            Ok(vec![
                alpha * f.eval(*a)?,
                f.eval(b)?,
                (1.0 - alpha) * f.eval(*c)?,
            ])
        }
    }
}

/// The three summands of the even-to-odd reduction rewriting, plus the
/// residual against direct evaluation of the normalized instance.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub reduced: Margin,
    pub correction: Margin,
    pub tail: Margin,
    pub residual: f64,
    pub scale: f64,
}

/// Rewrite a 5- or 7-variable sum as (reduced even-variable sum) +
/// (correction) + (nonnegative tail), after the proof's normalization of the
/// last coefficient. The identity is exact; `residual` measures the
/// implementation's wiring.
pub fn decompose_reduction(
    id: CaseId,
    s: &Structure,
    inst: &SchurInstance,
) -> Result<Decomposition> {
    match id {
        CaseId::S5 | CaseId::S7 => decompose_scalar(id, inst),
        CaseId::R5 | CaseId::R7 => decompose_ring(id, s, inst),
        _ => Err(Error::Config("decomposition applies to S5, S7, R5, R7".into())),
    }
}

fn decompose_scalar(id: CaseId, inst: &SchurInstance) -> Result<Decomposition> {
    let m = if id == CaseId::S5 { 5 } else { 7 };
    let xs = scalar_values(&inst.xs, "variables")?;
    let mut coeffs = scalar_values(&inst.coeffs, "coefficients")?;
    if xs.len() != m || coeffs.len() != m {
        return Err(Error::Config("arity mismatch in decomposition".into()));
    }
    let g = require_g(inst)?;
    // normalization: cap the last coefficient at |a_{m-1}|; dropping the
    // excess only removes a nonnegative term
    let prev_abs = coeffs[m - 2].abs();
    if coeffs[m - 1] > prev_abs {
        coeffs[m - 1] = prev_abs;
    }
    let alpha = if coeffs[m - 2] >= 0.0 { 1.0 } else { -1.0 };

    // tilde coefficients: a_i g(x_i - x_m) for i < m-1, and the tail weight
    // a_m g(x_{m-1} - x_m)
    let tilde: Vec<f64> = (0..m - 1).map(|i| coeffs[i] * g.eval(xs[i] - xs[m - 1])).collect();
    let tilde_last = coeffs[m - 1] * g.eval(xs[m - 2] - xs[m - 1]);

    let head = &xs[..m - 1];
    let mut reduced_coeffs = tilde[..m - 2].to_vec();
    reduced_coeffs.push(0.0);
    let reduced_terms = scalar_sum_terms(head, &reduced_coeffs, g);
    let reduced: f64 = reduced_terms.iter().sum();

    let correction_prod: f64 = (0..m - 2)
        .map(|j| g.eval(xs[m - 2] - xs[j]))
        .product();
    let correction = (tilde[m - 2] - alpha * tilde_last) * correction_prod;

    let gamma_last: f64 = (0..m - 1).map(|j| g.eval(xs[m - 1] - xs[j])).product();
    let gamma_prev: f64 = (0..m)
        .filter(|&j| j != m - 2)
        .map(|j| g.eval(xs[m - 2] - xs[j]))
        .product();
    let tail = coeffs[m - 1] * (gamma_last + alpha * gamma_prev);

    let direct_terms = scalar_sum_terms(&xs, &coeffs, g);
    let direct: f64 = direct_terms.iter().sum();
    let scale = direct_terms
        .iter()
        .fold(1.0f64, |mx, t| mx.max(1.0 + t.abs()));
    let residual = (direct - (reduced + correction + tail)).abs();

    let part = |v: f64| Margin {
        value: v,
        element: None,
        scale,
    };
    Ok(Decomposition {
        reduced: part(reduced),
        correction: part(correction),
        tail: part(tail),
        residual,
        scale,
    })
}

fn decompose_ring(id: CaseId, s: &Structure, inst: &SchurInstance) -> Result<Decomposition> {
    let m = if id == CaseId::R5 { 5 } else { 7 };
    if inst.xs.len() != m || inst.coeffs.len() != m {
        return Err(Error::Config("arity mismatch in decomposition".into()));
    }
    let tol = 1e-9;
    let mut coeffs = inst.coeffs.clone();
    // normalization: if a_m strictly dominates hat(a_{m-1}), cap it there
    let hat_prev = effective_hat(inst, m - 2, tol)?;
    if let Ok(r) = cmp(&coeffs[m - 1], &hat_prev, tol) {
        if r.tag == crate::element::OrderTag::Greater {
            coeffs[m - 1] = hat_prev.clone();
        }
    }
    let n = inst.n;
    let pow_diff = |i: usize, j: usize| -> Result<Element> {
        s.pow_star(&inst.xs[i].sub(&inst.xs[j])?, n)
    };

    // tilde coefficients
    let mut tilde: Vec<Element> = Vec::with_capacity(m - 1);
    for (i, c) in coeffs.iter().take(m - 1).enumerate() {
        tilde.push(s.star(c, &pow_diff(i, m - 1)?)?);
    }
    let tilde_last = s.star(&coeffs[m - 1], &pow_diff(m - 2, m - 1)?)?;

    // reduced sum over the first m-2 tilde coefficients on the head variables
    let head: Vec<Element> = inst.xs[..m - 1].to_vec();
    let mut reduced_terms: Vec<Element> = Vec::new();
    for (i, t) in tilde.iter().take(m - 2).enumerate() {
        reduced_terms.push(ring_term(s, t, &head, i, n, None)?);
    }
    let reduced = Margin::from_terms(reduced_terms)?;

    // correction: (tilde_{m-1} - tilde_m) * prod_{j <= m-3} (x_{m-1} - x_j)^n
    let mut corr = tilde[m - 2].sub(&tilde_last)?;
    for j in 0..m - 2 {
        corr = s.star(&corr, &pow_diff(m - 2, j)?)?;
    }
    let correction = Margin::from_terms(vec![corr])?;

    // tail: a_m * (gamma_m + gamma_{m-1})
    let gamma = |i: usize| -> Result<Element> {
        let mut acc: Option<Element> = None;
        for j in 0..m {
            if j == i {
                continue;
            }
            let f = pow_diff(i, j)?;
            acc = Some(match acc {
                None => f,
                Some(a) => s.star(&a, &f)?,
            });
        }
        Ok(acc.unwrap())
    };
    let tail_sum = gamma(m - 1)?.add(&gamma(m - 2)?)?;
    let tail = Margin::from_terms(vec![s.star(&coeffs[m - 1], &tail_sum)?])?;

    let norm_inst = SchurInstance {
        coeffs: coeffs.clone(),
        ..inst.clone()
    };
    let direct = eval_margin(id, s, &norm_inst)?;

    let residual = match (&direct.element, &reduced.element) {
        (Some(_), _) => {
            let total = reduced
                .element
                .clone()
                .unwrap()
                .add(correction.element.as_ref().unwrap())?
                .add(tail.element.as_ref().unwrap())?;
            direct
                .element
                .clone()
                .unwrap()
                .sub(&total)?
                .magnitude()
        }
        _ => {
            let total = reduced.value + correction.value + tail.value;
            (direct.value - total).abs()
        }
    };
    Ok(Decomposition {
        reduced,
        correction,
        tail,
        residual,
        scale: direct.scale,
    })
}

/// Cross-check of the weighted 3-variable inequality against the g-weighted
/// Q-class defining inequality at one point, via `y = lambda x + (1-lambda) z`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QeqCrossCheck {
    pub margin_schur: f64,
    pub margin_qg: f64,
    pub signs_agree: bool,
}

pub fn qeq_cross_check(
    f: &CoeffFunctionSpec,
    g: &GFunctionSpec,
    x: f64,
    z: f64,
    lambda: f64,
    tol: f64,
) -> Result<QeqCrossCheck> {
    if !(x > z) {
        return Err(Error::Config("needs x > z".into()));
    }
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::Config("lambda must lie in (0,1)".into()));
    }
    if g.parity() != Parity::Odd {
        return Err(Error::Config("g must be odd".into()));
    }
    let gl = g.eval(lambda * (x - z));
    let gr = g.eval((1.0 - lambda) * (x - z));
    if gl == 0.0 || gr == 0.0 {
        return Err(Error::SkippedSample("g vanishes at a weighted difference".into()));
    }
    let y = lambda * x + (1.0 - lambda) * z;
    let coeffs = vec![f.eval(x)?, f.eval(y)?, f.eval(z)?];
    let terms = scalar_sum_terms(&[x, y, z], &coeffs, g);
    let margin_schur: f64 = terms.iter().sum();
    let scale_schur = terms.iter().fold(1.0f64, |m, t| m.max(1.0 + t.abs()));

    let gxz = g.eval(x - z);
    let rhs = coeffs[0] * gxz / gl + coeffs[2] * gxz / gr;
    let margin_qg = rhs - coeffs[1];
    let scale_qg = 1.0 + rhs.abs().max(coeffs[1].abs());

    let signs_agree =
        (margin_schur >= -tol * scale_schur) == (margin_qg >= -tol * scale_qg);
    Ok(QeqCrossCheck {
        margin_schur,
        margin_qg,
        signs_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::SymMat;
    use crate::gfun::godunova_levin_example;

    fn identity() -> GFunctionSpec {
        GFunctionSpec::identity()
    }

    #[test]
    fn s3_hand_computed_margin() {
        // 1*1*2 + 1*1*(-1) + 1*(-2)*(-1) = 3
        let inst = SchurInstance::scalar(&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0], identity());
        let m = eval_margin(CaseId::S3, &Structure::RealMul, &inst).unwrap();
        assert!((m.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn s3_degenerate_zero() {
        let inst = SchurInstance::scalar(&[1.0, 1.0, 1.0], &[2.0, -1.0, 0.5], identity());
        let m = eval_margin(CaseId::S3, &Structure::RealMul, &inst).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn s3_hypothesis_boundary_admitted() {
        let inst = SchurInstance::scalar(&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], identity());
        let h = check_hypothesis(CaseId::S3, &Structure::RealMul, &inst, 1e-9).unwrap();
        assert!(h.satisfied, "failed: {:?}", h.failed);
    }

    #[test]
    fn s3_hypothesis_violation_named() {
        let inst = SchurInstance::scalar(&[2.0, 1.0, 0.0], &[1.0, 5.0, 1.0], identity());
        let h = check_hypothesis(CaseId::S3, &Structure::RealMul, &inst, 1e-9).unwrap();
        assert!(!h.satisfied);
        assert!(h.failed.iter().any(|c| c.contains("a+c >= |b|")));
    }

    #[test]
    fn s4_equality_boundary() {
        let inst = SchurInstance::scalar(&[3.0, 2.0, 1.0, 0.0], &[1.0, 1.0, 1.0, 1.0], identity());
        let h = check_hypothesis(CaseId::S4, &Structure::RealMul, &inst, 1e-9).unwrap();
        assert!(h.satisfied, "failed: {:?}", h.failed);
    }

    #[test]
    fn finta_violating_point_margin() {
        // x1 + x4 = 2.7 < 3 = x2 + x3: hypothesis fails and the margin is
        // negative (about -1.22).
        let xs = [2.5, 2.0, 1.0, 0.2];
        let coeffs = build_coeffs(&CoeffBuild::FintaPower(0.01), &xs).unwrap();
        let inst = SchurInstance::scalar(&xs, &coeffs, identity());
        let h = check_hypothesis(CaseId::S4, &Structure::RealMul, &inst, 1e-9).unwrap();
        assert!(!h.satisfied);
        let m = eval_margin(CaseId::S4, &Structure::RealMul, &inst).unwrap();
        assert!(m.value < -1.2 && m.value > -1.25, "margin {}", m.value);
    }

    #[test]
    fn build_finta_linear() {
        let c = build_coeffs(&CoeffBuild::FintaPower(1.0), &[3.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(c, vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn build_finta_negative_rejected() {
        assert!(build_coeffs(&CoeffBuild::FintaPower(1.0), &[1.0, -1.0]).is_err());
    }

    #[test]
    fn build_vornicu_general() {
        let f = CoeffFunctionSpec::ConvexPiecewiseLinear(vec![(0.0, 0.0), (10.0, 10.0)]);
        let c = build_coeffs(&CoeffBuild::VornicuGeneral(f, 4.0, 0.0, 0.5), &[3.0, 2.0, 1.0])
            .unwrap();
        assert_eq!(c, vec![2.0, 2.0, 0.0]);
    }

    #[test]
    fn build_from_gl_table() {
        let c = build_coeffs(
            &CoeffBuild::FromF(godunova_levin_example()),
            &[1.0, 0.5, 0.0],
        )
        .unwrap();
        assert_eq!(c, vec![1.0, 4.0, 1.0]);
    }

    #[test]
    fn c3_frobenius_scalar_output() {
        let x = Element::matrix(SymMat::diag(&[3.0, 2.0]));
        let y = Element::matrix(SymMat::diag(&[2.0, 1.0]));
        let z = Element::matrix(SymMat::diag(&[1.0, 0.0]));
        let inst = SchurInstance {
            xs: vec![x, y, z],
            coeffs: vec![Element::scalar(1.0), Element::scalar(1.0), Element::scalar(1.0)],
            hats: None,
            g: None,
            f: None,
            aux: None,
            n: 1,
            poly: None,
        };
        let m = eval_margin(CaseId::C3, &Structure::Frobenius, &inst).unwrap();
        // each diagonal coordinate contributes the scalar S3 sum 2-1+2 = 3...
        // for xs (3,2,1) and (2,1,0): per-coordinate sum is 3; trace doubles it.
        assert!((m.value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn r4_diagonal_reduction_matches_scalar() {
        // diagonal chain: coordinates (3,2,1,0) and (2,1,0,-1)
        let xs: Vec<Element> = [(3.0, 2.0), (2.0, 1.0), (1.0, 0.0), (0.0, -1.0)]
            .iter()
            .map(|&(a, b)| Element::matrix(SymMat::diag(&[a, b])))
            .collect();
        let one = Element::matrix(SymMat::identity(2));
        let inst = SchurInstance {
            xs,
            coeffs: vec![one.clone(), one.clone(), one.clone(), one.clone()],
            hats: None,
            g: None,
            f: None,
            aux: None,
            n: 1,
            poly: None,
        };
        let m = eval_margin(CaseId::R4, &Structure::MatmulCommuting, &inst).unwrap();
        let el = m.element.unwrap();
        let mat = el.as_matrix().unwrap();
        for (coord, base) in [(0usize, [3.0, 2.0, 1.0, 0.0]), (1usize, [2.0, 1.0, 0.0, -1.0])] {
            let sinst = SchurInstance::scalar(&base, &[1.0; 4], GFunctionSpec::identity());
            let sm = eval_margin(CaseId::S4, &Structure::RealMul, &sinst).unwrap();
            assert!(
                (mat.get(coord, coord) - sm.value).abs() < 1e-12,
                "coordinate {coord}"
            );
        }
    }

    #[test]
    fn s5_decomposition_identity() {
        let inst = SchurInstance::scalar(
            &[4.0, 3.0, 2.0, 1.0, 0.0],
            &[3.0, 1.0, 2.0, 1.0, 1.0],
            identity(),
        );
        let d = decompose_reduction(CaseId::S5, &Structure::RealMul, &inst).unwrap();
        assert!(d.residual <= 1e-9 * d.scale, "residual {}", d.residual);
        assert!(d.tail.value >= -1e-9 * d.scale);
    }

    #[test]
    fn s5_decomposition_degenerate() {
        let inst = SchurInstance::scalar(&[1.0; 5], &[2.0, 1.0, 1.0, 1.0, 1.0], identity());
        let d = decompose_reduction(CaseId::S5, &Structure::RealMul, &inst).unwrap();
        assert_eq!(d.residual, 0.0);
        assert_eq!(d.reduced.value + d.correction.value + d.tail.value, 0.0);
    }

    #[test]
    fn qeq_gl_witness() {
        let f = godunova_levin_example();
        let g = GFunctionSpec::sign_sqrt();
        let r = qeq_cross_check(&f, &g, 1.0, 0.0, 0.5, 1e-9).unwrap();
        // sqrt(1/2) + sqrt(1/2) - 2 = sqrt(2) - 2
        assert!((r.margin_schur - (2.0f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!(r.margin_qg < 0.0);
        assert!(r.signs_agree);
    }

    #[test]
    fn qeq_proviso_skips() {
        let f = godunova_levin_example();
        let g = GFunctionSpec::identity();
        // x = z is rejected before the proviso
        assert!(matches!(
            qeq_cross_check(&f, &g, 1.0, 1.0, 0.5, 1e-9),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn arity_mismatch_rejected() {
        let inst = SchurInstance::scalar(&[1.0, 0.0], &[1.0, 1.0], identity());
        assert!(matches!(
            eval_margin(CaseId::S3, &Structure::RealMul, &inst),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn ring_poly_parity_enforced() {
        assert!(RingPoly::new(vec![1.0, 1.0]).is_err());
        assert!(RingPoly::new(vec![0.0, 1.0, 0.0, 2.0]).is_ok());
        assert!(RingPoly::new(vec![1.0, 0.0, 2.0]).is_ok());
        assert!(RingPoly::new(vec![-1.0]).is_err());
    }

    #[test]
    fn s3_permutation_symmetry() {
        let g = GFunctionSpec::power(2);
        let xs = [2.5, 1.0, -0.5];
        let cs = [1.5, 1.5, 1.5];
        let base = eval_margin(
            CaseId::S3,
            &Structure::RealMul,
            &SchurInstance::scalar(&xs, &cs, g.clone()),
        )
        .unwrap();
        let perms = [[0usize, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1], [0, 2, 1]];
        for p in perms {
            let pxs: Vec<f64> = p.iter().map(|&i| xs[i]).collect();
            let pcs: Vec<f64> = p.iter().map(|&i| cs[i]).collect();
            let m = eval_margin(
                CaseId::S3,
                &Structure::RealMul,
                &SchurInstance::scalar(&pxs, &pcs, g.clone()),
            )
            .unwrap();
            assert!((m.value - base.value).abs() <= 1e-12 * base.scale);
        }
    }
}
