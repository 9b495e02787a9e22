//! Scalar function families: the even-or-odd monotone class (G), its
//! refinement with the product and sum inequalities (G2), coefficient
//! function families, and sampling-based certifiers for class membership.
//!
//! Certification is empirical: a function passes a class when every grid
//! and random probe satisfies the defining inequalities.
//!
//! ```
//! use schur_verify::gfun::{certify_class, GClass, GFunctionSpec, GridPlan};
//!
//! let grid = GridPlan::default();
//! // odd powers x^k are in the stronger class
//! let report = certify_class(&GFunctionSpec::power(3), GClass::G2, &grid, 7).unwrap();
//! assert!(report.passed);
//! // sign(x) is monotone and odd (class G) but fails the G2 sum inequality
//! let sign = GFunctionSpec::base(schur_verify::gfun::GBase::Sign).unwrap();
//! assert!(certify_class(&sign, GClass::G, &grid, 7).unwrap().passed);
//! assert!(!certify_class(&sign, GClass::G2, &grid, 7).unwrap().passed);
//! ```

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive factors a G-function spec is built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GBase {
    /// Constant `a >= 0`.
    Const(f64),
    /// sign(x): -1, 0, 1.
    Sign,
    /// `|x|^s` with `s >= 0`.
    AbsPow(f64),
    /// `e^{|x|}`.
    ExpAbs,
    /// `x` itself.
    Identity,
}

impl GBase {
    fn eval(&self, x: f64) -> f64 {
        match self {
            GBase::Const(a) => *a,
            GBase::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            GBase::AbsPow(s) => x.abs().powf(*s),
            GBase::ExpAbs => x.abs().exp(),
            GBase::Identity => x,
        }
    }

    fn parity(&self) -> Parity {
        match self {
            GBase::Sign | GBase::Identity => Parity::Odd,
            _ => Parity::Even,
        }
    }

    fn claimed(&self) -> GClass {
        match self {
            GBase::Const(_) | GBase::ExpAbs | GBase::Identity => GClass::G2,
            // sign fails the sum inequality at the y = 0 boundary, so the
            // library claims it as G only; certification decides the rest.
            GBase::Sign => GClass::G,
            GBase::AbsPow(s) => {
                if *s >= 1.0 {
                    GClass::G2
                } else {
                    GClass::G
                }
            }
        }
    }

    fn name(&self) -> String {
        match self {
            GBase::Const(a) => format!("const({a})"),
            GBase::Sign => "sign".into(),
            GBase::AbsPow(s) => format!("abspow({s})"),
            GBase::ExpAbs => "expabs".into(),
            GBase::Identity => "id".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Membership claim attached to a spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GClass {
    G,
    G2,
}

/// A parity-tagged scalar function: a pointwise product of primitive
/// factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GFunctionSpec {
    factors: Vec<GBase>,
    claimed: GClass,
}

impl GFunctionSpec {
    pub fn base(b: GBase) -> Result<Self> {
        if let GBase::Const(a) = b {
            if a < 0.0 {
                return Err(Error::Domain("constant factor must be >= 0".into()));
            }
        }
        if let GBase::AbsPow(s) = b {
            if s < 0.0 {
                return Err(Error::Domain("abspow exponent must be >= 0".into()));
            }
        }
        let claimed = b.claimed();
        Ok(GFunctionSpec {
            factors: vec![b],
            claimed,
        })
    }

    /// Builder with an explicit claim, for curated library entries whose
    /// membership is known independently of the factor-wise closure rule
    /// (e.g. `sign(x)|x|^k` for odd k is the power function `x^k`).
    pub fn with_claim(factors: Vec<GBase>, claimed: GClass) -> Result<Self> {
        let spec = GFunctionSpec { factors, claimed };
        if spec.eval(0.0) < 0.0 {
            return Err(Error::Domain("g(0) must be >= 0".into()));
        }
        Ok(spec)
    }

    pub fn identity() -> Self {
        Self::base(GBase::Identity).unwrap()
    }

    pub fn sign_sqrt() -> Self {
        // sign(x) * sqrt(|x|): odd, monotone, in G but not G2.
        GFunctionSpec {
            factors: vec![GBase::Sign, GBase::AbsPow(0.5)],
            claimed: GClass::G,
        }
    }

    /// `x^k` as `sign(x)^k |x|^k`; exact parity by construction.
    pub fn power(k: u32) -> Self {
        if k % 2 == 0 {
            GFunctionSpec {
                factors: vec![GBase::AbsPow(k as f64)],
                claimed: GClass::G2,
            }
        } else {
            GFunctionSpec {
                factors: vec![GBase::Sign, GBase::AbsPow(k as f64)],
                claimed: GClass::G2,
            }
        }
    }

    pub fn parity(&self) -> Parity {
        let odd = self
            .factors
            .iter()
            .filter(|f| f.parity() == Parity::Odd)
            .count();
        if odd % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn claimed(&self) -> GClass {
        self.claimed
    }

    pub fn name(&self) -> String {
        self.factors
            .iter()
            .map(|f| f.name())
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.factors.iter().map(|f| f.eval(x)).product()
    }

    /// Recognize `c * x^k` (c > 0, integer k >= 0) from the factor list;
    /// returns the exponent. The sign parity must match the exponent parity
    /// so the product really is a power of x, not of |x|.
    pub fn is_integer_power(&self) -> Option<u32> {
        match self.exact_power_form() {
            Some((k, true, _)) => Some(k),
            Some((k, false, _)) if k % 2 == 0 => Some(k),
            _ => None,
        }
    }

    /// Recognize an exact integer-power form `c * x^k` or `c * |x|^k` from
    /// the factor list: `(k, signed, c)` with `signed` true for `x^k`.
    pub fn exact_power_form(&self) -> Option<(u32, bool, f64)> {
        let mut exponent = 0.0f64;
        let mut signs = 0usize;
        let mut constant = 1.0f64;
        for f in &self.factors {
            match f {
                GBase::Const(c) if *c > 0.0 => constant *= c,
                GBase::Const(_) => return None,
                GBase::Sign => signs += 1,
                GBase::AbsPow(p) => exponent += p,
                GBase::Identity => {
                    signs += 1;
                    exponent += 1.0;
                }
                GBase::ExpAbs => return None,
            }
        }
        if exponent.fract() != 0.0 || exponent < 0.0 {
            return None;
        }
        let k = exponent as u32;
        if signs > 0 && k == 0 {
            // sign factors with no |x| power vanish at 0 (e.g. sign^2 is the
            // indicator of x != 0), which no power of x reproduces
            return None;
        }
        if signs % 2 == (k % 2) as usize {
            // sign parity matches the exponent: this is x^k
            Some((k, true, constant))
        } else if signs % 2 == 0 {
            // no net sign: |x|^k
            Some((k, false, constant))
        } else {
            // sign(x)|x|^k with mismatched parity has no exact power form
            None
        }
    }

    /// Pointwise product; claimed G2 only when both inputs are (the closure
    /// lemma for products).
    pub fn product(&self, other: &GFunctionSpec) -> GFunctionSpec {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        let claimed = if self.claimed == GClass::G2 && other.claimed == GClass::G2 {
            GClass::G2
        } else {
            GClass::G
        };
        GFunctionSpec { factors, claimed }
    }
}

/// Coefficient function families for the weighted 3- and 4-variable cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoeffFunctionSpec {
    /// `x -> x^t` on `x >= 0`, with `0^t = 0` for `t > 0`.
    PowerWeight(f64),
    /// Piecewise linear with nondecreasing slopes; breakpoints sorted by x.
    ConvexPiecewiseLinear(Vec<(f64, f64)>),
    /// Piecewise linear with single-signed slopes.
    MonotonePiecewiseLinear(Vec<(f64, f64)>),
    /// `c0 + amplitude * sin(frequency * x + phase)` with
    /// `amplitude < 3 c0 / 5`, which forces `max f < 4 min f`.
    BoundedRatio {
        c0: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// Pointwise table with a default value; lookups compare keys exactly.
    TableFunction {
        points: Vec<(f64, f64)>,
        default: f64,
    },
}

impl CoeffFunctionSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoeffFunctionSpec::PowerWeight(t) => {
                if *t <= 0.0 {
                    return Err(Error::Domain("power weight needs t > 0".into()));
                }
            }
            CoeffFunctionSpec::ConvexPiecewiseLinear(bp) => {
                let slopes = breakpoint_slopes(bp)?;
                if slopes.windows(2).any(|w| w[1] < w[0] - 1e-12) {
                    return Err(Error::Domain("slopes must be nondecreasing".into()));
                }
            }
            CoeffFunctionSpec::MonotonePiecewiseLinear(bp) => {
                let slopes = breakpoint_slopes(bp)?;
                let pos = slopes.iter().any(|&s| s > 0.0);
                let neg = slopes.iter().any(|&s| s < 0.0);
                if pos && neg {
                    return Err(Error::Domain("slopes must be single-signed".into()));
                }
            }
            CoeffFunctionSpec::BoundedRatio { c0, amplitude, .. } => {
                if *c0 <= 0.0 || *amplitude < 0.0 || *amplitude >= 3.0 * c0 / 5.0 {
                    return Err(Error::Domain(
                        "bounded ratio needs 0 <= amplitude < 3*c0/5".into(),
                    ));
                }
            }
            CoeffFunctionSpec::TableFunction { .. } => {}
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            CoeffFunctionSpec::PowerWeight(t) => {
                if x < 0.0 {
                    return Err(Error::Domain(format!("power weight at negative x = {x}")));
                }
                if x == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(x.powf(*t))
                }
            }
            CoeffFunctionSpec::ConvexPiecewiseLinear(bp)
            | CoeffFunctionSpec::MonotonePiecewiseLinear(bp) => Ok(piecewise_linear(bp, x)),
            CoeffFunctionSpec::BoundedRatio {
                c0,
                amplitude,
                frequency,
                phase,
            } => Ok(c0 + amplitude * (frequency * x + phase).sin()),
            CoeffFunctionSpec::TableFunction { points, default } => Ok(points
                .iter()
                .find(|(k, _)| *k == x)
                .map(|(_, v)| *v)
                .unwrap_or(*default)),
        }
    }

    /// Sampling range used by the Q-class certifiers.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            CoeffFunctionSpec::PowerWeight(_) => (0.0, 10.0),
            CoeffFunctionSpec::TableFunction { .. } => (0.0, 1.0),
            _ => (-10.0, 10.0),
        }
    }
}

fn breakpoint_slopes(bp: &[(f64, f64)]) -> Result<Vec<f64>> {
    if bp.len() < 2 {
        return Ok(Vec::new());
    }
    if bp.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Domain("breakpoints must be strictly increasing".into()));
    }
    Ok(bp
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .collect())
}

fn piecewise_linear(bp: &[(f64, f64)], x: f64) -> f64 {
    match bp.len() {
        0 => 0.0,
        1 => bp[0].1,
        _ => {
            // extrapolate with the end slopes
            let seg = if x <= bp[1].0 {
                (bp[0], bp[1])
            } else if x >= bp[bp.len() - 2].0 {
                (bp[bp.len() - 2], bp[bp.len() - 1])
            } else {
                let i = bp.partition_point(|(k, _)| *k <= x) - 1;
                (bp[i], bp[i + 1])
            };
            let ((x0, y0), (x1, y1)) = seg;
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

/// The Godunova-Levin style Q-class witness function on [0, 1]:
/// 4 at x = 1/2, 1 elsewhere. Nonconstant, with f(1/2) = 2 (f(0) + f(1)).
pub fn godunova_levin_example() -> CoeffFunctionSpec {
    CoeffFunctionSpec::TableFunction {
        points: vec![(0.5, 4.0)],
        default: 1.0,
    }
}

/// One recorded condition in a certification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Worst margin seen, already divided by the per-sample scale.
    pub worst_margin: f64,
    /// Sample at which the worst margin occurred.
    pub witness: Vec<f64>,
}

const CERT_TOL: f64 = 1e-9;

/// Certification outcome: passes iff every check's worst scaled margin is
/// above `-1e-9`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertReport {
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    pub sample_count: usize,
    pub seed: u64,
}

impl CertReport {
    fn from_checks(checks: Vec<CheckRecord>, sample_count: usize, seed: u64) -> Self {
        let passed = checks.iter().all(|c| c.worst_margin >= -CERT_TOL);
        CertReport {
            passed,
            checks,
            sample_count,
            seed,
        }
    }

    pub fn failing_checks(&self) -> Vec<&CheckRecord> {
        self.checks
            .iter()
            .filter(|c| c.worst_margin < -CERT_TOL)
            .collect()
    }
}

/// Sampling plan for class certification.
#[derive(Debug, Clone)]
pub struct GridPlan {
    /// Log-spaced magnitudes per variable.
    pub magnitudes: usize,
    /// Seeded uniform random triples on top of the deterministic grid.
    pub random_triples: usize,
    pub range: (f64, f64),
    /// Probe second differences of g and log g away from zero.
    pub derivative_probes: bool,
}

impl Default for GridPlan {
    fn default() -> Self {
        GridPlan {
            magnitudes: 64,
            random_triples: 256,
            range: (1e-3, 1e3),
            derivative_probes: true,
        }
    }
}

impl GridPlan {
    fn magnitude_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        let n = self.magnitudes;
        let mut v = Vec::with_capacity(n + 1);
        v.push(0.0); // boundary always included
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            v.push(lo * (hi / lo).powf(t));
        }
        v
    }
}

struct CheckAccumulator {
    id: &'static str,
    worst: f64,
    witness: Vec<f64>,
}

impl CheckAccumulator {
    fn new(id: &'static str) -> Self {
        CheckAccumulator {
            id,
            worst: f64::INFINITY,
            witness: Vec::new(),
        }
    }

    fn record(&mut self, margin: f64, scale: f64, witness: &[f64]) {
        // Non-finite samples (overflow of e^{|x|} at grid extremes) are not
        // decidable in f64 and are skipped.
        if !margin.is_finite() || !scale.is_finite() {
            return;
        }
        let scaled = margin / scale;
        if scaled < self.worst {
            self.worst = scaled;
            self.witness = witness.to_vec();
        }
    }

    fn finish(self) -> CheckRecord {
        CheckRecord {
            id: self.id.to_string(),
            worst_margin: if self.worst.is_finite() { self.worst } else { 0.0 },
            witness: self.witness,
        }
    }
}

fn pair_scale(a: f64, b: f64) -> f64 {
    1.0 + a.abs().max(b.abs())
}

/// Certify a spec against the G or G2 conditions by grid plus seeded random
/// sampling.
///
/// G checks: `g(0) >= 0`, monotonicity on nonnegative pairs, exact parity.
/// G2 adds the product inequality, the sum inequality, the midpoint
/// consequence, the four-tuple product-difference inequality, and (when
/// enabled) finite-difference probes of `(log g)'' <= 0` and `g'' >= 0`.
pub fn certify_class(
    g: &GFunctionSpec,
    target: GClass,
    grid: &GridPlan,
    seed: u64,
) -> Result<CertReport> {
    if grid.magnitudes < 2 {
        return Err(Error::Config("empty certification grid".into()));
    }
    let mags = grid.magnitude_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = grid.range;
    let mut sample_count = 0usize;

    let mut g0 = CheckAccumulator::new("g0-nonneg");
    g0.record(g.eval(0.0), 1.0, &[0.0]);

    let mut mono = CheckAccumulator::new("monotone-nonneg");
    let mut parity = CheckAccumulator::new("parity-exact");
    let sign = match g.parity() {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    };
    for (i, &x) in mags.iter().enumerate() {
        let gx = g.eval(x);
        let gmx = g.eval(-x);
        parity.record(-(gmx - sign * gx).abs(), 1.0, &[x]);
        for &y in &mags[..i] {
            // x >= y >= 0 by grid ordering
            let gy = g.eval(y);
            mono.record(gx - gy, pair_scale(gx, gy), &[x, y]);
            sample_count += 1;
        }
    }

    let mut checks = vec![g0.finish(), mono.finish(), parity.finish()];

    if target == GClass::G2 {
        let mut prod = CheckAccumulator::new("product-ineq");
        let mut sum = CheckAccumulator::new("sum-ineq");
        let mut mid = CheckAccumulator::new("midpoint");
        let mut four = CheckAccumulator::new("four-tuple");

        let mut triples: Vec<(f64, f64, f64)> = Vec::new();
        // deterministic grid: magnitudes for each variable, ordered so that
        // x >= y >= 0, z >= 0; the y = 0 and z = 0 boundaries come from the
        // 0 entry of the grid.
        for &x in mags.iter() {
            for &y in mags.iter().filter(|&&y| y <= x) {
                for &z in [0.0, x.max(1e-3), (x + y) * 0.5 + lo].iter() {
                    triples.push((x, y, z));
                }
            }
        }
        for _ in 0..grid.random_triples {
            let mut x = rng.gen_range(0.0..hi.min(20.0));
            let mut y = rng.gen_range(0.0..hi.min(20.0));
            if y > x {
                std::mem::swap(&mut x, &mut y);
            }
            let z = rng.gen_range(0.0..hi.min(20.0));
            triples.push((x, y, z));
        }

        for &(x, y, z) in &triples {
            sample_count += 1;
            let (gx, gy) = (g.eval(x), g.eval(y));
            let (gyz, gxz) = (g.eval(y + z), g.eval(x + z));
            let lhs = gx * gyz;
            let rhs = gy * gxz;
            prod.record(lhs - rhs, pair_scale(lhs, rhs), &[x, y, z]);
            let ls = gx + gyz;
            let rs = gy + gxz;
            sum.record(rs - ls, pair_scale(ls, rs), &[x, y, z]);
            if z <= x {
                let lhs = gx * gx;
                let rhs = g.eval(x - z) * gxz;
                mid.record(lhs - rhs, pair_scale(lhs, rhs), &[x, z]);
            }
        }

        // four-tuple samples: x >= y >= 0, z >= w >= 0, t >= u >= 0
        for _ in 0..grid.random_triples {
            let mut pick = || {
                let a: f64 = rng.gen_range(0.0..hi.min(20.0));
                let b: f64 = rng.gen_range(0.0..hi.min(20.0));
                (a.max(b), a.min(b))
            };
            let (x, y) = pick();
            let (z, w) = pick();
            let (t, u) = pick();
            sample_count += 1;
            let lhs = g.eval(x + t) * g.eval(z + t) - g.eval(x) * g.eval(z);
            let rhs = g.eval(y + u) * g.eval(w + u) - g.eval(y) * g.eval(w);
            four.record(lhs - rhs, pair_scale(lhs, rhs), &[x, y, z, w, t, u]);
        }

        checks.push(prod.finish());
        checks.push(sum.finish());
        checks.push(mid.finish());
        checks.push(four.finish());

        if grid.derivative_probes {
            let mut logcc = CheckAccumulator::new("log-concavity-fd");
            let mut convex = CheckAccumulator::new("convexity-fd");
            let h = 1e-3;
            for i in 0..32 {
                let x = 0.5 + 0.5 * i as f64;
                let (gm, g0v, gp) = (g.eval(x - h), g.eval(x), g.eval(x + h));
                sample_count += 1;
                let second = (gp - 2.0 * g0v + gm) / (h * h);
                // second differences amplify rounding noise by 1/h^2; the
                // loose scale keeps them sensitive only to genuine curvature
                convex.record(second, (1.0 + g0v.abs()) / (h * h) * 1e-4, &[x]);
                if gm > 0.0 && g0v > 0.0 && gp > 0.0 {
                    let (lm, l0, lp) = (gm.ln(), g0v.ln(), gp.ln());
                    let lmax = lm.abs().max(l0.abs()).max(lp.abs());
                    let ls = (lp - 2.0 * l0 + lm) / (h * h);
                    logcc.record(-ls, (1.0 + lmax) / (h * h) * 1e-4, &[x]);
                }
            }
            checks.push(logcc.finish());
            checks.push(convex.finish());
        }
    }

    Ok(CertReport::from_checks(checks, sample_count, seed))
}

/// Q-class variant selector.
#[derive(Debug, Clone)]
pub enum QVariant {
    Q,
    Qg(GFunctionSpec),
    Qk(f64),
}

/// Sampling plan for Q-class certification.
#[derive(Debug, Clone)]
pub struct QSamples {
    pub count: usize,
    /// Extra (x, z, lambda) triples always evaluated.
    pub extra: Vec<(f64, f64, f64)>,
}

impl Default for QSamples {
    fn default() -> Self {
        QSamples {
            count: 512,
            extra: Vec::new(),
        }
    }
}

const LAMBDA_MARGIN: f64 = 1e-6;

/// Certify a coefficient function against the Q / Q_g / Q_k defining
/// inequality on seeded samples. Samples where the Q_g proviso fails
/// (`g` vanishing at the weighted differences) are skipped.
pub fn certify_qclass(
    f: &CoeffFunctionSpec,
    variant: &QVariant,
    samples: &QSamples,
    seed: u64,
) -> Result<CertReport> {
    f.validate()?;
    if let QVariant::Qg(g) = variant {
        if g.parity() != Parity::Odd {
            return Err(Error::Config("Q_g requires an odd g".into()));
        }
    }
    if let QVariant::Qk(k) = variant {
        if *k < 0.0 {
            return Err(Error::Config("Q_k requires k >= 0".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = f.domain();
    let mut acc = CheckAccumulator::new("q-defining-ineq");
    let mut evaluated = 0usize;

    let eval_sample = |x: f64, z: f64, lambda: f64, acc: &mut CheckAccumulator| -> Result<bool> {
        let mid = lambda * x + (1.0 - lambda) * z;
        let fmid = f.eval(mid)?;
        let (fx, fz) = (f.eval(x)?, f.eval(z)?);
        let rhs = match variant {
            QVariant::Q => fx / lambda + fz / (1.0 - lambda),
            QVariant::Qk(k) => fx / lambda.powf(*k) + fz / (1.0 - lambda).powf(*k),
            QVariant::Qg(g) => {
                let gxz = g.eval(x - z);
                let gl = g.eval(lambda * (x - z));
                let gr = g.eval((1.0 - lambda) * (x - z));
                if gl == 0.0 || gr == 0.0 {
                    return Ok(false);
                }
                fx * gxz / gl + fz * gxz / gr
            }
        };
        acc.record(rhs - fmid, pair_scale(rhs, fmid), &[x, z, lambda]);
        Ok(true)
    };

    for &(x, z, lambda) in &samples.extra {
        if eval_sample(x, z, lambda, &mut acc)? {
            evaluated += 1;
        }
    }
    let mut produced = 0usize;
    while produced < samples.count {
        let x = rng.gen_range(lo..hi);
        let z = rng.gen_range(lo..hi);
        let lambda = rng.gen_range(LAMBDA_MARGIN..1.0 - LAMBDA_MARGIN);
        produced += 1;
        if x == z {
            continue;
        }
        if eval_sample(x, z, lambda, &mut acc)? {
            evaluated += 1;
        }
    }

    Ok(CertReport::from_checks(vec![acc.finish()], evaluated, seed))
}

/// Named library entry for campaigns and the CLI.
#[derive(Debug, Clone)]
pub struct LibraryEntry {
    pub name: String,
    pub spec: GFunctionSpec,
}

/// The curated function library: the catalogue members, the power
/// functions, and representative products. Each entry carries the class the
/// library claims for it; `certified_library` filters by certification.
pub fn library() -> Vec<LibraryEntry> {
    let b = |base: GBase| GFunctionSpec::base(base).unwrap();
    let mut out: Vec<(String, GFunctionSpec)> = vec![
        ("const1".into(), b(GBase::Const(1.0))),
        ("const2.5".into(), b(GBase::Const(2.5))),
        ("sign".into(), b(GBase::Sign)),
        ("id".into(), b(GBase::Identity)),
        ("abs".into(), b(GBase::AbsPow(1.0))),
        ("abspow1.5".into(), b(GBase::AbsPow(1.5))),
        ("abspow2".into(), b(GBase::AbsPow(2.0))),
        ("abspow0.5".into(), b(GBase::AbsPow(0.5))),
        ("expabs".into(), b(GBase::ExpAbs)),
        ("sign*sqrt".into(), GFunctionSpec::sign_sqrt()),
        ("x^3".into(), GFunctionSpec::power(3)),
        ("x^5".into(), GFunctionSpec::power(5)),
        (
            "abs*expabs".into(),
            b(GBase::AbsPow(1.0)).product(&b(GBase::ExpAbs)),
        ),
        (
            "abspow2*expabs".into(),
            b(GBase::AbsPow(2.0)).product(&b(GBase::ExpAbs)),
        ),
    ];
    out.drain(..)
        .map(|(name, spec)| LibraryEntry { name, spec })
        .collect()
}

/// Library members whose claimed class survives certification at the given
/// target. Used to draw `g` for campaigns.
pub fn certified_library(target: GClass, grid: &GridPlan, seed: u64) -> Vec<LibraryEntry> {
    library()
        .into_iter()
        .filter(|e| {
            (target == GClass::G || e.spec.claimed() == GClass::G2)
                && certify_class(&e.spec, target, grid, seed)
                    .map(|r| r.passed)
                    .unwrap_or(false)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_sign() {
        let g = GFunctionSpec::base(GBase::Sign).unwrap();
        assert_eq!(g.eval(-3.0), -1.0);
        assert_eq!(g.eval(0.0), 0.0);
    }

    #[test]
    fn eval_abspow_square() {
        let g = GFunctionSpec::base(GBase::AbsPow(2.0)).unwrap();
        assert_eq!(g.eval(-3.0), 9.0);
    }

    #[test]
    fn eval_sign_sqrt() {
        let g = GFunctionSpec::sign_sqrt();
        assert_eq!(g.eval(0.25), 0.5);
        assert_eq!(g.eval(-0.25), -0.5);
    }

    #[test]
    fn product_with_const_one_matches() {
        let g = GFunctionSpec::power(3);
        let one = GFunctionSpec::base(GBase::Const(1.0)).unwrap();
        let p = one.product(&g);
        for x in [-2.0, -0.5, 0.0, 0.3, 4.0] {
            assert_eq!(p.eval(x), g.eval(x));
        }
    }

    #[test]
    fn product_sign_cube_is_cube() {
        let p = GFunctionSpec::base(GBase::Sign)
            .unwrap()
            .product(&GFunctionSpec::base(GBase::AbsPow(3.0)).unwrap());
        for x in [-2.0f64, -1.0, 0.0, 1.5, 3.0] {
            assert!((p.eval(x) - x.powi(3)).abs() <= 1e-12 * x.powi(3).abs().max(1.0));
        }
        assert_eq!(p.parity(), Parity::Odd);
    }

    #[test]
    fn abs_times_abs_is_square() {
        let a = GFunctionSpec::base(GBase::AbsPow(1.0)).unwrap();
        let p = a.product(&a);
        for x in [-2.0f64, 0.0, 1.5] {
            assert_eq!(p.eval(x), x * x);
        }
    }

    #[test]
    fn parity_exact_to_last_bit() {
        for e in library() {
            let sign = match e.spec.parity() {
                Parity::Even => 1.0,
                Parity::Odd => -1.0,
            };
            for x in [0.1, 1.0, 2.5, 77.0, 1e-3, 1e3] {
                assert_eq!(
                    e.spec.eval(-x),
                    sign * e.spec.eval(x),
                    "parity broken for {}",
                    e.name
                );
            }
        }
    }

    #[test]
    fn certify_expabs_g2() {
        let g = GFunctionSpec::base(GBase::ExpAbs).unwrap();
        let r = certify_class(&g, GClass::G2, &GridPlan::default(), 7).unwrap();
        assert!(r.passed, "failing: {:?}", r.failing_checks());
    }

    #[test]
    fn certify_abs_g2() {
        let g = GFunctionSpec::base(GBase::AbsPow(1.0)).unwrap();
        let r = certify_class(&g, GClass::G2, &GridPlan::default(), 7).unwrap();
        assert!(r.passed, "failing: {:?}", r.failing_checks());
    }

    #[test]
    fn sign_sqrt_is_g_but_not_g2() {
        let g = GFunctionSpec::sign_sqrt();
        let r = certify_class(&g, GClass::G, &GridPlan::default(), 7).unwrap();
        assert!(r.passed);
        let r2 = certify_class(&g, GClass::G2, &GridPlan::default(), 7).unwrap();
        assert!(!r2.passed);
        // sqrt is concave: the violation shows up in the sum inequality
        // (e.g. x=2, y=1, z=1: sqrt(2)+sqrt(2) > 1+sqrt(3)), while the
        // product inequality x z >= y z holds for sqrt.
        let failing: Vec<&str> = r2.failing_checks().iter().map(|c| c.id.as_str()).collect();
        assert!(failing.contains(&"sum-ineq"), "failing: {failing:?}");
        assert!(!failing.contains(&"product-ineq"), "failing: {failing:?}");
    }

    #[test]
    fn gl_function_values() {
        let f = godunova_levin_example();
        assert_eq!(f.eval(0.5).unwrap(), 4.0);
        assert_eq!(f.eval(0.0).unwrap(), 1.0);
        assert_eq!(f.eval(0.7).unwrap(), 1.0);
        // f(1/2) = 2 (f(0) + f(1))
        assert_eq!(
            f.eval(0.5).unwrap(),
            2.0 * (f.eval(0.0).unwrap() + f.eval(1.0).unwrap())
        );
    }

    #[test]
    fn gl_function_is_q_class() {
        let f = godunova_levin_example();
        let r = certify_qclass(&f, &QVariant::Q, &QSamples::default(), 11).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn gl_function_fails_qg_with_sign_sqrt() {
        let f = godunova_levin_example();
        let mut samples = QSamples::default();
        samples.extra.push((1.0, 0.0, 0.5));
        let r = certify_qclass(&f, &QVariant::Qg(GFunctionSpec::sign_sqrt()), &samples, 11).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn convex_nonneg_is_q_class() {
        let f = CoeffFunctionSpec::ConvexPiecewiseLinear(vec![
            (-10.0, 21.0),
            (0.0, 1.0),
            (10.0, 31.0),
        ]);
        let r = certify_qclass(&f, &QVariant::Q, &QSamples::default(), 11).unwrap();
        assert!(r.passed, "failing: {:?}", r.failing_checks());
    }

    #[test]
    fn qg_rejects_even_g() {
        let f = godunova_levin_example();
        let g = GFunctionSpec::base(GBase::AbsPow(2.0)).unwrap();
        assert!(matches!(
            certify_qclass(&f, &QVariant::Qg(g), &QSamples::default(), 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn empty_grid_rejected() {
        let g = GFunctionSpec::identity();
        let grid = GridPlan {
            magnitudes: 0,
            ..GridPlan::default()
        };
        assert!(matches!(
            certify_class(&g, GClass::G, &grid, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn g2_closure_under_products() {
        let grid = GridPlan::default();
        let g2: Vec<_> = library()
            .into_iter()
            .filter(|e| {
                e.spec.claimed() == GClass::G2
                    && certify_class(&e.spec, GClass::G2, &grid, 3).unwrap().passed
            })
            .collect();
        assert!(g2.len() >= 5);
        for a in &g2 {
            for b in &g2 {
                let p = a.spec.product(&b.spec);
                let r = certify_class(&p, GClass::G2, &grid, 3).unwrap();
                assert!(
                    r.passed,
                    "product {}*{} failed: {:?}",
                    a.name,
                    b.name,
                    r.failing_checks()
                );
            }
        }
    }
}
