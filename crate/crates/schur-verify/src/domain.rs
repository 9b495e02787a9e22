//! Random generation of hypothesis-satisfying instances for every case and
//! structure pairing, plus parameterized instance maps for the numeric
//! falsifier. Chain conditions are satisfied by construction: differences
//! are built from nonnegative (or positive-semidefinite) increments, and
//! sum-chain constraints add a dedicated slack increment.

use rand::Rng;

use crate::element::{Element, Kind, SymMat};
use crate::engine::{case, CaseId, SchurInstance};
use crate::error::{Error, Result};
use crate::gfun::{CoeffFunctionSpec, GClass, GFunctionSpec, Parity};
use crate::structure::{NonnegMatrix, Structure};

/// Hard cap on carrier dimension, including grown Kronecker outputs.
pub const MAX_DIM: usize = 16;

/// Probability of collapsing a slack to put the instance on a hypothesis
/// boundary.
pub const BOUNDARY_PROB: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub dim: usize,
    pub boundary_prob: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            dim: 3,
            boundary_prob: BOUNDARY_PROB,
        }
    }
}

/// Loewner margin of `a - b`: its smallest eigenvalue.
pub fn loewner_margin(a: &SymMat, b: &SymMat) -> Result<f64> {
    Ok(a.sub(b)?.min_eigenvalue())
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn slack(rng: &mut impl Rng, boundary: bool) -> f64 {
    if boundary {
        0.0
    } else {
        log_uniform(rng, 1e-3, 3.0)
    }
}

/// Slack that collapses to zero only half the time on boundary draws, so a
/// boundary instance pins a random subset of clauses.
fn slack_hb(rng: &mut impl Rng, boundary: bool) -> f64 {
    let b = boundary && rng.gen_bool(0.5);
    slack(rng, b)
}

fn signed_mag(rng: &mut impl Rng, mag: f64) -> f64 {
    if rng.gen_bool(0.5) {
        mag
    } else {
        -mag
    }
}

/// Random sign and random fraction of an upper bound `h >= 0`.
fn sgn_frac(rng: &mut impl Rng, h: f64) -> f64 {
    let u: f64 = rng.gen_range(0.0..=1.0);
    signed_mag(rng, h * u)
}

/// Build a random structure of the given id; the data-bearing ones get
/// seeded payloads.
pub fn random_structure(id: &str, dim: usize, rng: &mut impl Rng) -> Result<Structure> {
    match id {
        "REAL_MUL" => Ok(Structure::RealMul),
        "VEC_DOT" => Ok(Structure::VecDot),
        "VEC_BILINEAR" => {
            let data: Vec<f64> = (0..dim * dim).map(|_| rng.gen_range(0.0..2.0)).collect();
            Ok(Structure::VecBilinear(NonnegMatrix::new(dim, data)?))
        }
        "FUNC_QUAD" => {
            let weights: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..2.0)).collect();
            Ok(Structure::FuncQuad { weights })
        }
        "MATMUL_COMMUTING" => Ok(Structure::MatmulCommuting),
        "FROBENIUS" => Ok(Structure::Frobenius),
        "HADAMARD" => Ok(Structure::Hadamard),
        "KRONECKER" => Ok(Structure::Kronecker),
        "RKRONECKER" => Ok(Structure::RKronecker),
        other => Err(Error::Config(format!("unknown structure id {other:?}"))),
    }
}

// ---------------------------------------------------------------------------
// scalar building blocks

/// Descending chain of `m` scalars whose differences carry the case's
/// sum-chain constraints by construction.
pub fn gen_scalar_chain(id: CaseId, rng: &mut impl Rng, boundary: bool) -> Vec<f64> {
    let m = case(id).arity;
    let mut d: Vec<f64> = (0..m.saturating_sub(1))
        .map(|_| slack_hb(rng, boundary))
        .collect();
    match m {
        4 | 5 => {
            // x1 + x4 >= x2 + x3  <=>  d1 >= d3
            d[0] = d[2] + slack(rng, boundary);
        }
        6 | 7 => {
            // x1 + x6 >= x2 + x5 >= x3 + x4  <=>  d1 >= d5, d2 >= d4
            d[0] = d[4] + slack(rng, boundary);
            d[1] = d[3] + slack(rng, boundary);
            if matches!(id, CaseId::R6 | CaseId::R7) {
                // keep x2 - x6 strictly positive for invertibility
                d[1] += 1e-2;
            }
        }
        _ => {}
    }
    let base = rng.gen_range(-2.0..2.0);
    let mut xs = vec![0.0; m];
    xs[m - 1] = base;
    for i in (0..m - 1).rev() {
        xs[i] = xs[i + 1] + d[i];
    }
    xs
}

/// Coefficients satisfying the scalar hypothesis of the case, tight on a
/// random clause when `boundary` is set.
pub fn gen_scalar_coeffs(id: CaseId, rng: &mut impl Rng, boundary: bool) -> Vec<f64> {
        match id {
        CaseId::S2 => {
            let b = { let m = log_uniform(rng, 1e-2, 3.0); signed_mag(rng, m) };
            let a = b.abs() + slack(rng, boundary);
            vec![a, b]
        }
        CaseId::S3 | CaseId::C3 => {
            let a = slack(rng, false);
            let c = slack_hb(rng, boundary);
            let bmag = if boundary {
                a + c
            } else {
                rng.gen_range(0.0..(a + c))
            };
            vec![a, signed_mag(rng, bmag), c]
        }
        CaseId::S4 => {
            let a4 = { let m = log_uniform(rng, 1e-2, 2.0); signed_mag(rng, m) };
            let a2 = { let m = log_uniform(rng, 1e-2, 2.0); signed_mag(rng, m) };
            let a3 = a4.abs() + slack(rng, boundary);
            let a1 = a2.abs().max(a4.abs()) + slack(rng, boundary);
            vec![a1, a2, a3, a4]
        }
        CaseId::S5 => {
            let a5 = slack_hb(rng, boundary);
            let a3 = slack(rng, false);
            let a4 = { let m = rng.gen_range(0.0..(a3 + a5 + 1e-12)); signed_mag(rng, m) };
            let a2 = { let m = log_uniform(rng, 1e-2, 2.0); signed_mag(rng, m) };
            let a1 = a2.abs().max(a4.abs() - a5) + slack(rng, boundary);
            vec![a1, a2, a3, a4, a5]
        }
        CaseId::S6 => {
            let a6 = { let m = log_uniform(rng, 1e-2, 1.0); signed_mag(rng, m) };
            let a5 = a6.abs() + slack(rng, boundary);
            let a2 = { let m = a5 + slack(rng, boundary); signed_mag(rng, m) };
            let a1 = a2.abs() + slack(rng, boundary);
            let a4 = { let m = log_uniform(rng, 1e-2, 2.0); signed_mag(rng, m) };
            let a3 = a4.abs() + slack(rng, boundary);
            vec![a1, a2, a3, a4, a5, a6]
        }
        CaseId::S7 => {
            let a7 = slack_hb(rng, boundary);
            let a6 = { let m = log_uniform(rng, 1e-2, 1.0); signed_mag(rng, m) };
            let a5 = (a6.abs() - a7).max(0.0) + slack(rng, boundary);
            let a2 = { let m = a5 + slack(rng, boundary); signed_mag(rng, m) };
            let a1 = a2.abs() + slack(rng, boundary);
            let a4 = { let m = log_uniform(rng, 1e-2, 2.0); signed_mag(rng, m) };
            let a3 = a4.abs() + slack(rng, boundary);
            vec![a1, a2, a3, a4, a5, a6, a7]
        }
        _ => unreachable!("scalar coefficients only for the scalar-coefficient cases"),
    }
}

fn random_coeff_function(rng: &mut impl Rng) -> CoeffFunctionSpec {
    match rng.gen_range(0u32..4) {
        0 => CoeffFunctionSpec::PowerWeight(rng.gen_range(0.2..3.0)),
        1 => {
            // convex nonnegative: integrate increasing slopes, then lift
            let mut slope = rng.gen_range(-2.0..0.0);
            let mut x = -3.0;
            let mut y: f64 = rng.gen_range(0.0..2.0);
            let mut pts = vec![(x, y)];
            for _ in 0..4 {
                let dx = rng.gen_range(0.5..2.0);
                x += dx;
                y += slope * dx;
                pts.push((x, y));
                slope += rng.gen_range(0.1..1.5);
            }
            let min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let lift = if min < 0.0 { -min } else { 0.0 };
            CoeffFunctionSpec::ConvexPiecewiseLinear(
                pts.into_iter().map(|(a, b)| (a, b + lift)).collect(),
            )
        }
        2 => {
            let descending = rng.gen_bool(0.5);
            let mut x = -3.0;
            let mut y = rng.gen_range(0.0..1.0);
            let mut pts = vec![(x, y)];
            for _ in 0..4 {
                x += rng.gen_range(0.5..2.0);
                y += rng.gen_range(0.0..1.5);
                pts.push((x, y));
            }
            if descending {
                let top = pts.last().unwrap().1;
                for p in pts.iter_mut() {
                    p.1 = top - p.1;
                }
            }
            CoeffFunctionSpec::MonotonePiecewiseLinear(pts)
        }
        _ => {
            // max/min ratio stays below 4: amplitude under 0.55 * center
            let c0 = rng.gen_range(0.5..2.0);
            CoeffFunctionSpec::BoundedRatio {
                c0,
                amplitude: rng.gen_range(0.0..0.55 * c0),
                frequency: rng.gen_range(0.5..4.0),
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
            }
        }
    }
}

/// Sampling range that keeps a coefficient function inside its nonnegative
/// region: the breakpoint hull for piecewise specs (extrapolation beyond it
/// can dip negative), the declared domain otherwise.
fn sample_range(f: &CoeffFunctionSpec) -> (f64, f64) {
    match f {
        CoeffFunctionSpec::ConvexPiecewiseLinear(bp)
        | CoeffFunctionSpec::MonotonePiecewiseLinear(bp)
            if bp.len() >= 2 =>
        {
            (bp.first().unwrap().0, bp.last().unwrap().0)
        }
        _ => f.domain(),
    }
}

/// A random library function compatible with the case's g requirement.
pub fn random_g(id: CaseId, rng: &mut impl Rng) -> GFunctionSpec {
    let req = case(id).g_req;
    let lib = crate::gfun::library();
    let pool: Vec<GFunctionSpec> = lib
        .into_iter()
        .map(|e| e.spec)
        .filter(|g| match req {
            crate::engine::GRequirement::G2 => g.claimed() == GClass::G2,
            crate::engine::GRequirement::OddG => g.parity() == Parity::Odd,
            _ => true,
        })
        .collect();
    pool[rng.gen_range(0..pool.len())].clone()
}

// ---------------------------------------------------------------------------
// matrix building blocks

fn sym_gaussian(rng: &mut impl Rng, dim: usize, scale: f64) -> SymMat {
    let data: Vec<f64> = (0..dim * dim)
        .map(|_| {
            // Box-Muller
            let u: f64 = rng.gen_range(1e-12..1.0);
            let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            scale * (-2.0 * u.ln()).sqrt() * v.cos()
        })
        .collect();
    SymMat::new(dim, data).unwrap()
}

/// Gram matrix `G^T G` of a random `rank x dim` factor: positive
/// semidefinite, rank-deficient when `rank < dim`.
pub fn psd_gram(rng: &mut impl Rng, dim: usize, rank: usize) -> SymMat {
    let g: Vec<f64> = (0..rank * dim)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let mut data = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut s = 0.0;
            for r in 0..rank {
                s += g[r * dim + i] * g[r * dim + j];
            }
            data[i * dim + j] = s;
        }
    }
    SymMat::new(dim, data).unwrap()
}

fn psd_increment(rng: &mut impl Rng, dim: usize, boundary: bool) -> SymMat {
    if boundary && rng.gen_bool(0.5) {
        return SymMat::zeros(dim);
    }
    let rank = if boundary {
        1
    } else {
        rng.gen_range(1..=dim)
    };
    psd_gram(rng, dim, rank)
}

/// Loewner-descending chain of `m` symmetric matrices with the case's
/// sum-chain constraints built in, and `x2 - x6` strictly positive definite
/// for the 6/7-variable ring cases.
pub fn gen_matrix_chain(
    id: CaseId,
    rng: &mut impl Rng,
    dim: usize,
    boundary: bool,
) -> Vec<SymMat> {
    let m = case(id).arity;
    let mut d: Vec<SymMat> = (0..m - 1)
        .map(|_| psd_increment(rng, dim, boundary))
        .collect();
    match m {
        4 | 5 => {
            d[0] = d[2].add(&psd_increment(rng, dim, boundary)).unwrap();
        }
        6 | 7 => {
            d[0] = d[4].add(&psd_increment(rng, dim, boundary)).unwrap();
            d[1] = d[3].add(&psd_increment(rng, dim, boundary)).unwrap();
            if matches!(id, CaseId::R6 | CaseId::R7) {
                d[1] = d[1].add(&SymMat::identity(dim).scale(1e-2)).unwrap();
            }
        }
        _ => {}
    }
    let mut xs = vec![SymMat::zeros(dim); m];
    xs[m - 1] = sym_gaussian(rng, dim, 0.7);
    for i in (0..m - 1).rev() {
        xs[i] = xs[i + 1].add(&d[i]).unwrap();
    }
    xs
}

/// Random orthogonal matrix: Gram-Schmidt on a Gaussian square factor.
pub fn random_orthogonal(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut cols: Vec<Vec<f64>> = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| {
                        let u: f64 = rng.gen_range(1e-12..1.0);
                        let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                        (-2.0 * u.ln()).sqrt() * v.cos()
                    })
                    .collect()
            })
            .collect();
        let mut ok = true;
        for k in 0..dim {
            for j in 0..k {
                let dot: f64 = (0..dim).map(|i| cols[k][i] * cols[j][i]).sum();
                for i in 0..dim {
                    cols[k][i] -= dot * cols[j][i];
                }
            }
            let norm: f64 = (0..dim).map(|i| cols[k][i] * cols[k][i]).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for i in 0..dim {
                cols[k][i] /= norm;
            }
        }
        if ok {
            // row-major Q with Q[i][k] = cols[k][i]
            let mut q = vec![0.0; dim * dim];
            for k in 0..dim {
                for i in 0..dim {
                    q[i * dim + k] = cols[k][i];
                }
            }
            return q;
        }
    }
}

/// `Q diag(v) Q^T` for a row-major orthogonal `q`.
pub fn conjugate_diag(q: &[f64], v: &[f64]) -> SymMat {
    let dim = v.len();
    let mut data = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut s = 0.0;
            for k in 0..dim {
                s += q[i * dim + k] * v[k] * q[j * dim + k];
            }
            data[i * dim + j] = s;
        }
    }
    SymMat::new(dim, data).unwrap()
}

// ---------------------------------------------------------------------------
// ring coefficient chains

/// Scalar coefficients plus explicit upper bounds for the even positions,
/// satisfying the ring case's coefficient hypothesis.
pub fn gen_scalar_ring_coeffs(
    id: CaseId,
    rng: &mut impl Rng,
    boundary: bool,
) -> (Vec<f64>, Vec<Option<f64>>) {
    let branch = rng.gen_bool(0.5);
    gen_scalar_ring_coeffs_branch(id, rng, boundary, branch)
}

/// Same, with the tail-alternative branch of the 5/7-variable cases pinned;
/// coordinate-wise generation for commuting matrices must use one branch
/// across all coordinates or the matrix-level alternative can fail.
fn gen_scalar_ring_coeffs_branch(
    id: CaseId,
    rng: &mut impl Rng,
    boundary: bool,
    branch: bool,
) -> (Vec<f64>, Vec<Option<f64>>) {
        match id {
        CaseId::C3P => {
            let a = slack(rng, false);
            let c = slack_hb(rng, boundary);
            let b = sgn_frac(rng, a + c);
            (vec![a, b, c], vec![None, None, None])
        }
        CaseId::R4 => {
            let h4 = slack_hb(rng, boundary);
            let a3 = h4 + slack(rng, boundary);
            let h2 = a3 + slack(rng, boundary);
            let a1 = h2 + slack(rng, boundary);
            let a2 = sgn_frac(rng, h2);
            let a4 = sgn_frac(rng, h4);
            (
                vec![a1, a2, a3, a4],
                vec![None, Some(h2), None, Some(h4)],
            )
        }
        CaseId::R5 => {
            let a3 = slack(rng, false);
            let h2 = a3 + slack(rng, boundary);
            let a1 = h2 + slack(rng, boundary);
            let a2 = sgn_frac(rng, h2);
            let (a5, h4) = if branch {
                // a3 + a5 >= h4 >= a5 >= 0
                let a5 = slack_hb(rng, boundary);
                (a5, a5 + rng.gen_range(0.0..=1.0) * a3)
            } else {
                // a5 >= h4 >= 0
                let a5 = slack(rng, false);
                (a5, rng.gen_range(0.0..=1.0) * a5)
            };
            let a4 = sgn_frac(rng, h4);
            (
                vec![a1, a2, a3, a4, a5],
                vec![None, Some(h2), None, Some(h4), None],
            )
        }
        CaseId::R6 => {
            let h6 = slack_hb(rng, boundary);
            let a5 = h6 + slack(rng, boundary);
            let h2 = a5 + slack(rng, boundary);
            let a1 = h2 + slack(rng, boundary);
            let h4 = slack_hb(rng, boundary);
            let a3 = h4 + slack(rng, boundary);
            let (a2, a4, a6) = (sgn_frac(rng, h2), sgn_frac(rng, h4), sgn_frac(rng, h6));
            (
                vec![a1, a2, a3, a4, a5, a6],
                vec![None, Some(h2), None, Some(h4), None, Some(h6)],
            )
        }
        CaseId::R7 => {
            let a5 = slack(rng, false);
            let h2 = a5 + slack(rng, boundary);
            let a1 = h2 + slack(rng, boundary);
            let h4 = slack_hb(rng, boundary);
            let a3 = h4 + slack(rng, boundary);
            let (a7, h6) = if branch {
                // a5 + a7 >= h6 >= a7 >= 0
                let a7 = slack_hb(rng, boundary);
                (a7, a7 + rng.gen_range(0.0..=1.0) * a5)
            } else {
                // a7 >= h6 >= 0
                let a7 = slack(rng, false);
                (a7, rng.gen_range(0.0..=1.0) * a7)
            };
            let (a2, a4, a6) = (sgn_frac(rng, h2), sgn_frac(rng, h4), sgn_frac(rng, h6));
            (
                vec![a1, a2, a3, a4, a5, a6, a7],
                vec![None, Some(h2), None, Some(h4), None, Some(h6), None],
            )
        }
        _ => unreachable!("ring coefficients only for the ring cases"),
    }
}

/// Full-matrix coefficient chains for the Loewner-ordered ring structures:
/// hats form a positive-semidefinite descending chain and the even-position
/// coefficients are symmetric with spectral radius below the hat's smallest
/// eigenvalue.
fn gen_matrix_ring_coeffs(
    id: CaseId,
    rng: &mut impl Rng,
    dim: usize,
    boundary: bool,
) -> (Vec<Element>, Vec<Option<Element>>) {
    let (proto, proto_hats) = gen_scalar_ring_coeffs(id, rng, boundary);
    let mut coeffs = Vec::with_capacity(proto.len());
    let mut hats = Vec::with_capacity(proto.len());
    // rebuild the chain in matrix form: odd positions become the scalar
    // value plus a PSD perturbation bounded by the slack to the next link;
    // simplest sound lift is scalar * identity for chain members, with
    // dense symmetric even-position coefficients under the hat.
    for (i, (&a, h)) in proto.iter().zip(proto_hats.iter()).enumerate() {
        match h {
            Some(hv) => {
                let hat = SymMat::identity(dim).scale(*hv);
                let raw = sym_gaussian(rng, dim, 1.0);
                let r = raw
                    .eigenvalues()
                    .iter()
                    .fold(0.0f64, |acc, &v| acc.max(v.abs()));
                let scaled = if r > 0.0 {
                    raw.scale(a.abs().min(*hv) / r)
                } else {
                    raw
                };
                coeffs.push(Element::matrix(scaled));
                hats.push(Some(Element::matrix(hat)));
                let _ = i;
            }
            None => {
                coeffs.push(Element::matrix(SymMat::identity(dim).scale(a)));
                hats.push(None);
            }
        }
    }
    (coeffs, hats)
}

// ---------------------------------------------------------------------------
// top-level instance generation

/// Draw one hypothesis-satisfying instance for a case/structure pairing.
pub fn gen_instance(
    id: CaseId,
    s: &Structure,
    cfg: &GenConfig,
    rng: &mut impl Rng,
) -> Result<SchurInstance> {
    if cfg.dim == 0 || cfg.dim > MAX_DIM {
        return Err(Error::Dimension(format!(
            "dim must lie in 1..={MAX_DIM}, got {}",
            cfg.dim
        )));
    }
    let spec = case(id);
    let boundary = rng.gen_bool(cfg.boundary_prob);
    match id {
        CaseId::S2
        | CaseId::S3
        | CaseId::S4
        | CaseId::S5
        | CaseId::S6
        | CaseId::S7 => {
            if !matches!(s, Structure::RealMul) {
                return Err(Error::Config(format!(
                    "{} runs over REAL_MUL only",
                    id.name()
                )));
            }
            let xs = gen_scalar_chain(id, rng, boundary);
            let coeffs = gen_scalar_coeffs(id, rng, boundary);
            Ok(SchurInstance::scalar(&xs, &coeffs, random_g(id, rng)))
        }
        CaseId::S3F => {
            let mut xs = gen_scalar_chain(id, rng, boundary);
            if rng.gen_bool(0.5) {
                // power-weight variant needs nonnegative variables
                let shift = -xs[2].min(0.0);
                for x in xs.iter_mut() {
                    *x += shift;
                }
                let t = rng.gen_range(0.01..3.0);
                let mut inst = SchurInstance::scalar(&xs, &[], GFunctionSpec::power(1));
                inst.coeffs = Vec::new();
                inst.aux = Some(crate::engine::Aux {
                    t: Some(t),
                    ..Default::default()
                });
                Ok(inst)
            } else {
                let f = random_coeff_function(rng);
                let g = if matches!(f, CoeffFunctionSpec::BoundedRatio { .. }) {
                    GFunctionSpec::power(1 + 2 * rng.gen_range(0u32..2))
                } else {
                    random_g(id, rng)
                };
                let (lo, hi) = sample_range(&f);
                let mut xs: Vec<f64> = (0..3).map(|_| rng.gen_range(lo..hi)).collect();
                xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let mut inst = SchurInstance::scalar(&xs, &[], g);
                inst.coeffs = Vec::new();
                inst.f = Some(f);
                Ok(inst)
            }
        }
        CaseId::S3V => {
            let f = random_coeff_function(rng);
            let f = match f {
                CoeffFunctionSpec::BoundedRatio { .. } => {
                    CoeffFunctionSpec::PowerWeight(rng.gen_range(0.2..3.0))
                }
                other => other,
            };
            let (lo, hi) = sample_range(&f);
            let mut abc: Vec<f64> = (0..3).map(|_| rng.gen_range(lo..hi)).collect();
            abc.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if rng.gen_bool(0.5) {
                abc.reverse(); // ascending chains are accepted too
            }
            let xs = gen_scalar_chain(id, rng, boundary);
            let mut inst = SchurInstance::scalar(&xs, &[], random_g(id, rng));
            inst.coeffs = Vec::new();
            inst.f = Some(f);
            inst.aux = Some(crate::engine::Aux {
                abc: Some((abc[0], abc[1], abc[2])),
                ..Default::default()
            });
            Ok(inst)
        }
        CaseId::S3VG => {
            let f = CoeffFunctionSpec::ConvexPiecewiseLinear(match random_coeff_function(rng) {
                CoeffFunctionSpec::ConvexPiecewiseLinear(p) => p,
                _ => vec![(-3.0, 3.0), (0.0, 0.0), (3.0, 3.0)],
            });
            let (lo, hi) = sample_range(&f);
            let c = rng.gen_range(lo..hi);
            let a = rng.gen_range(c..hi.max(c + 1e-6));
            let alpha: f64 = if boundary {
                if rng.gen_bool(0.5) {
                    0.0
                } else {
                    1.0
                }
            } else {
                rng.gen_range(0.0..=1.0)
            };
            let b = alpha * a + (1.0 - alpha) * c;
            let xs = gen_scalar_chain(id, rng, boundary);
            let mut inst = SchurInstance::scalar(&xs, &[], random_g(id, rng));
            inst.coeffs = Vec::new();
            inst.f = Some(f);
            inst.aux = Some(crate::engine::Aux {
                abc: Some((a, b, c)),
                alpha: Some(alpha),
                ..Default::default()
            });
            Ok(inst)
        }
        CaseId::QEQ => {
            let f = random_coeff_function(rng);
            let (lo, hi) = sample_range(&f);
            let lambda = rng.gen_range(0.01..0.99);
            let z = rng.gen_range(lo..hi);
            let x = rng.gen_range(z..hi) + 1e-6;
            let xs = vec![x, lambda * x + (1.0 - lambda) * z, z];
            let lib: Vec<GFunctionSpec> = crate::gfun::library()
                .into_iter()
                .map(|e| e.spec)
                .filter(|g| g.parity() == Parity::Odd)
                .collect();
            let g = lib[rng.gen_range(0..lib.len())].clone();
            let mut inst = SchurInstance::scalar(&xs, &[], g);
            inst.coeffs = Vec::new();
            inst.f = Some(f);
            inst.aux = Some(crate::engine::Aux {
                alpha: Some(lambda),
                ..Default::default()
            });
            Ok(inst)
        }
        CaseId::C3 => {
            let coeffs = gen_scalar_coeffs(CaseId::C3, rng, boundary);
            let xs = gen_structure_chain(id, s, cfg, rng, boundary)?;
            Ok(SchurInstance {
                xs,
                coeffs: coeffs.into_iter().map(Element::scalar).collect(),
                hats: None,
                g: None,
                f: None,
                aux: None,
                n: 1,
                poly: None,
            })
        }
        CaseId::C3P | CaseId::R4 | CaseId::R5 | CaseId::R6 | CaseId::R7 => {
            if !s.is_ring() {
                return Err(Error::Config(format!(
                    "{} needs a ring structure, got {}",
                    id.name(),
                    s.id()
                )));
            }
            // The 4-to-7 term ring statements are proved for commutative
            // rings; the Kronecker-style stars are associative but not
            // symmetric, and random sweeps falsify the 4-term bound there.
            if id != CaseId::C3P && !(s.symmetric_star() && s.associative_star()) {
                return Err(Error::Config(format!(
                    "{} needs a commutative star, got {}",
                    id.name(),
                    s.id()
                )));
            }
            let n = ring_power(id, s, rng);
            check_grown_dim(s, cfg.dim, spec.arity, n)?;
            match s {
                Structure::RealMul => {
                    let xs = gen_scalar_chain(id, rng, boundary);
                    let (coeffs, hats) = gen_scalar_ring_coeffs(id, rng, boundary);
                    Ok(SchurInstance {
                        xs: xs.into_iter().map(Element::scalar).collect(),
                        coeffs: coeffs.into_iter().map(Element::scalar).collect(),
                        hats: Some(
                            hats.into_iter()
                                .map(|h| h.map(Element::scalar))
                                .collect(),
                        ),
                        g: None,
                        f: None,
                        aux: None,
                        n,
                        poly: maybe_poly(id, rng, n),
                    })
                }
                Structure::MatmulCommuting => {
                    let q = random_orthogonal(rng, cfg.dim);
                    let m = spec.arity;
                    // one scalar chain per eigen-coordinate, all sharing Q
                    let mut xcols: Vec<Vec<f64>> = vec![Vec::new(); m];
                    let mut ccols: Vec<Vec<f64>> = vec![Vec::new(); m];
                    let mut hcols: Vec<Vec<Option<f64>>> = vec![Vec::new(); m];
                    let branch = rng.gen_bool(0.5);
                    for _ in 0..cfg.dim {
                        let xs = gen_scalar_chain(id, rng, boundary);
                        let (cs, hs) = gen_scalar_ring_coeffs_branch(id, rng, boundary, branch);
                        for i in 0..m {
                            xcols[i].push(xs[i]);
                            ccols[i].push(cs[i]);
                            hcols[i].push(hs[i]);
                        }
                    }
                    let lift = |v: &Vec<f64>| Element::matrix(conjugate_diag(&q, v));
                    let xs: Vec<Element> = xcols.iter().map(lift).collect();
                    let coeffs: Vec<Element> = ccols.iter().map(lift).collect();
                    let hats: Vec<Option<Element>> = hcols
                        .iter()
                        .map(|col| {
                            if col.iter().all(|h| h.is_some()) {
                                let v: Vec<f64> = col.iter().map(|h| h.unwrap()).collect();
                                Some(Element::matrix(conjugate_diag(&q, &v)))
                            } else {
                                None
                            }
                        })
                        .collect();
                    Ok(SchurInstance {
                        xs,
                        coeffs,
                        hats: Some(hats),
                        g: None,
                        f: None,
                        aux: None,
                        n,
                        poly: maybe_poly(id, rng, n),
                    })
                }
                Structure::Hadamard => {
                    let xs = gen_matrix_chain(id, rng, cfg.dim, boundary)
                        .into_iter()
                        .map(Element::matrix)
                        .collect();
                    let (coeffs, hats) = gen_matrix_ring_coeffs(id, rng, cfg.dim, boundary);
                    Ok(SchurInstance {
                        xs,
                        coeffs,
                        hats: Some(hats),
                        g: None,
                        f: None,
                        aux: None,
                        n,
                        poly: None,
                    })
                }
                Structure::Kronecker | Structure::RKronecker => {
                    // coefficients stay 1x1 so every summand has the same
                    // grown dimension
                    let kdim = cfg.dim.min(2);
                    let xs = gen_matrix_chain(id, rng, kdim, boundary)
                        .into_iter()
                        .map(Element::matrix)
                        .collect();
                    let (cs, hs) = gen_scalar_ring_coeffs(id, rng, boundary);
                    Ok(SchurInstance {
                        xs,
                        coeffs: cs
                            .into_iter()
                            .map(|v| Element::matrix(SymMat::diag(&[v])))
                            .collect(),
                        hats: Some(
                            hs.into_iter()
                                .map(|h| h.map(|v| Element::matrix(SymMat::diag(&[v]))))
                                .collect(),
                        ),
                        g: None,
                        f: None,
                        aux: None,
                        n,
                        poly: None,
                    })
                }
                _ => Err(Error::Config(format!(
                    "{} is not a ring structure",
                    s.id()
                ))),
            }
        }
    }
}

fn ring_power(id: CaseId, s: &Structure, rng: &mut impl Rng) -> u32 {
    match s {
        // Kronecker-style products grow the carrier dimension by a factor of
        // d^((arity-1)*n), so higher powers stay off those structures.
        Structure::Kronecker | Structure::RKronecker => 1,
        _ => match id {
            CaseId::C3P => {
                if matches!(s, Structure::MatmulCommuting | Structure::RealMul)
                    && rng.gen_bool(0.3)
                {
                    3
                } else {
                    1
                }
            }
            CaseId::R4 | CaseId::R5 => rng.gen_range(1..=3),
            CaseId::R6 | CaseId::R7 => rng.gen_range(1..=2),
            _ => 1,
        },
    }
}

fn maybe_poly(id: CaseId, rng: &mut impl Rng, n: u32) -> Option<crate::engine::RingPoly> {
    if id == CaseId::C3P && n == 1 && rng.gen_bool(0.3) {
        // odd polynomial with nonnegative coefficients
        Some(
            crate::engine::RingPoly::new(vec![
                0.0,
                rng.gen_range(0.1..2.0),
                0.0,
                rng.gen_range(0.0..1.0),
            ])
            .unwrap(),
        )
    } else {
        None
    }
}

fn check_grown_dim(s: &Structure, dim: usize, arity: usize, n: u32) -> Result<()> {
    if matches!(s, Structure::Kronecker | Structure::RKronecker) {
        let d = dim.min(2);
        let grown = d.pow((arity as u32 - 1) * n);
        if grown > MAX_DIM {
            return Err(Error::Dimension(format!(
                "Kronecker output dimension {grown} exceeds the cap {MAX_DIM}"
            )));
        }
    }
    Ok(())
}

/// Ordered element chains for the 3-variable star case on every carrier.
fn gen_structure_chain(
    id: CaseId,
    s: &Structure,
    cfg: &GenConfig,
    rng: &mut impl Rng,
    boundary: bool,
) -> Result<Vec<Element>> {
    match s.input_kind() {
        Kind::Scalar => Ok(gen_scalar_chain(id, rng, boundary)
            .into_iter()
            .map(Element::scalar)
            .collect()),
        Kind::Vector => {
            let m = case(id).arity;
            let mut per_coord: Vec<Vec<f64>> = Vec::with_capacity(cfg.dim);
            for _ in 0..cfg.dim {
                per_coord.push(gen_scalar_chain(id, rng, boundary));
            }
            Ok((0..m)
                .map(|i| Element::vector(per_coord.iter().map(|c| c[i]).collect()))
                .collect())
        }
        Kind::Matrix => {
            let chain = if matches!(s, Structure::MatmulCommuting) {
                let q = random_orthogonal(rng, cfg.dim);
                let m = case(id).arity;
                let mut cols: Vec<Vec<f64>> = vec![Vec::new(); m];
                for _ in 0..cfg.dim {
                    let xs = gen_scalar_chain(id, rng, boundary);
                    for i in 0..m {
                        cols[i].push(xs[i]);
                    }
                }
                cols.iter().map(|v| conjugate_diag(&q, v)).collect()
            } else {
                gen_matrix_chain(id, rng, cfg.dim, boundary)
            };
            Ok(chain.into_iter().map(Element::matrix).collect())
        }
    }
}

// ---------------------------------------------------------------------------
// parameterized maps for the falsifier

/// Number of free parameters for the scalar falsifier map.
pub fn param_dim(id: CaseId) -> Result<usize> {
    let m = case(id).arity;
    match id {
        CaseId::S2 => Ok(4),
        CaseId::S3 => Ok(6),
        CaseId::S4 | CaseId::S5 | CaseId::S6 | CaseId::S7 => Ok(2 * m),
        _ => Err(Error::Config(format!(
            "{} has no scalar falsifier map",
            id.name()
        ))),
    }
}

/// Map a free parameter vector onto a hypothesis-satisfying instance; the
/// map is total, so the optimizer roams an unconstrained space while every
/// probe stays inside the hypothesis region.
pub fn instance_from_params(
    id: CaseId,
    params: &[f64],
    g: &GFunctionSpec,
) -> Result<SchurInstance> {
    if params.len() != param_dim(id)? {
        return Err(Error::Config("parameter count mismatch".into()));
    }
    let m = case(id).arity;
    let p = params;
    // chain from |increments|, base free
    let mut d: Vec<f64> = (0..m - 1).map(|i| p[i].abs()).collect();
    let base = p[m - 1];
    match m {
        4 | 5 => d[0] = d[2] + d[0],
        6 | 7 => {
            d[0] = d[4] + d[0];
            d[1] = d[3] + d[1];
        }
        _ => {}
    }
    let mut xs = vec![0.0; m];
    xs[m - 1] = base;
    for i in (0..m - 1).rev() {
        xs[i] = xs[i + 1] + d[i];
    }
    let q = &p[m..];
    let coeffs: Vec<f64> = match id {
        CaseId::S2 => {
            let b = q[0];
            vec![b.abs() + q[1].abs(), b]
        }
        CaseId::S3 => {
            let (a, c) = (q[0].abs(), q[1].abs());
            vec![a, (a + c) * q[2].sin(), c]
        }
        CaseId::S4 => {
            let a4 = q[0];
            let a2 = q[1];
            vec![
                a2.abs().max(a4.abs()) + q[2].abs(),
                a2,
                a4.abs() + q[3].abs(),
                a4,
            ]
        }
        CaseId::S5 => {
            let a5 = q[0].abs();
            let a3 = q[1].abs();
            let a4 = (a3 + a5) * q[2].sin();
            let a2 = q[3];
            let a1 = a2.abs().max(a4.abs() - a5) + q[4].abs();
            vec![a1, a2, a3, a4, a5]
        }
        CaseId::S6 => {
            let a6 = q[0];
            let a5 = a6.abs() + q[1].abs();
            let a2mag = a5 + q[2].abs();
            let a2 = a2mag * if q[3] >= 0.0 { 1.0 } else { -1.0 };
            let a1 = a2mag + q[4].abs();
            let a4 = q[5];
            let a3 = a4.abs() + q[1].abs();
            vec![a1, a2, a3, a4, a5, a6]
        }
        CaseId::S7 => {
            let a7 = q[0].abs();
            let a6 = q[1];
            let a5 = (a6.abs() - a7).max(0.0) + q[2].abs();
            let a2mag = a5 + q[3].abs();
            let a2 = a2mag * if q[4] >= 0.0 { 1.0 } else { -1.0 };
            let a1 = a2mag + q[5].abs();
            let a4 = q[6];
            let a3 = a4.abs() + q[2].abs();
            vec![a1, a2, a3, a4, a5, a6, a7]
        }
        _ => unreachable!(),
    };
    Ok(SchurInstance::scalar(&xs, &coeffs, g.clone()))
}

/// Map parameters onto an instance with exactly one hypothesis clause
/// negated by construction: the sum-chain condition for the 4-variable-and-up
/// cases, the coefficient bound for the 2- and 3-variable ones.
pub fn violating_instance_from_params(
    id: CaseId,
    params: &[f64],
    g: &GFunctionSpec,
) -> Result<SchurInstance> {
    let mut inst = instance_from_params(id, params, g)?;
    let xs: Vec<f64> = inst.xs.iter().map(|e| e.as_scalar().unwrap()).collect();
    let cs: Vec<f64> = inst.coeffs.iter().map(|e| e.as_scalar().unwrap()).collect();
    match id {
        CaseId::S2 => {
            // a < |b|
            let b = if cs[1] == 0.0 { 1.0 } else { cs[1] };
            inst.coeffs = vec![
                Element::scalar(b.abs() * 0.9 / (1.0 + params[3].abs())),
                Element::scalar(b),
            ];
        }
        CaseId::S3 => {
            // |b| > a + c
            let (a, c) = (cs[0], cs[2]);
            let sign = if params[5] >= 0.0 { 1.0 } else { -1.0 };
            let b = sign * ((a + c) * (1.0 + params[2].abs()) + 0.1);
            inst.coeffs = vec![Element::scalar(a), Element::scalar(b), Element::scalar(c)];
        }
        _ => {
            // break the top sum-chain link: shrink d1 below d3 (resp. d5)
            let m = xs.len();
            let other = if m <= 5 { xs[2] - xs[3] } else { xs[4] - xs[5] };
            let frac = params[0].abs() / (1.0 + params[0].abs());
            let d1 = other * frac * 0.999;
            let mut nxs = xs.clone();
            nxs[0] = nxs[1] + d1;
            inst.xs = nxs.into_iter().map(Element::scalar).collect();
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{check_hypothesis, eval_margin};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn scalar_chain_constraints_hold() {
        let mut r = rng(7);
        for _ in 0..200 {
            let b = r.gen_bool(0.3);
            let xs = gen_scalar_chain(CaseId::S6, &mut r, b);
            for w in xs.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert!(xs[0] + xs[5] >= xs[1] + xs[4] - 1e-12);
            assert!(xs[1] + xs[4] >= xs[2] + xs[3] - 1e-12);
        }
    }

    #[test]
    fn generated_scalar_instances_satisfy_hypothesis() {
        let mut r = rng(11);
        let cfg = GenConfig::default();
        for id in [CaseId::S2, CaseId::S3, CaseId::S4, CaseId::S5, CaseId::S6, CaseId::S7] {
            for _ in 0..100 {
                let inst = gen_instance(id, &Structure::RealMul, &cfg, &mut r).unwrap();
                let h = check_hypothesis(id, &Structure::RealMul, &inst, 1e-9).unwrap();
                assert!(h.satisfied, "{}: {:?}", id.name(), h.failed);
            }
        }
    }

    #[test]
    fn generated_ring_instances_satisfy_hypothesis() {
        let cfg = GenConfig {
            dim: 2,
            ..GenConfig::default()
        };
        for id in [CaseId::C3P, CaseId::R4, CaseId::R5, CaseId::R6, CaseId::R7] {
            for s in [Structure::MatmulCommuting, Structure::Hadamard] {
                let mut r = rng(13);
                for _ in 0..40 {
                    let inst = gen_instance(id, &s, &cfg, &mut r).unwrap();
                    let h = check_hypothesis(id, &s, &inst, 1e-9).unwrap();
                    assert!(h.satisfied, "{} over {}: {:?}", id.name(), s.id(), h.failed);
                }
            }
        }
    }

    #[test]
    fn commuting_chain_really_commutes() {
        let mut r = rng(3);
        let cfg = GenConfig {
            dim: 3,
            ..GenConfig::default()
        };
        let inst = gen_instance(CaseId::R4, &Structure::MatmulCommuting, &cfg, &mut r).unwrap();
        let mats: Vec<&SymMat> = inst
            .xs
            .iter()
            .chain(inst.coeffs.iter())
            .map(|e| e.as_matrix().unwrap())
            .collect();
        for a in &mats {
            for b in &mats {
                assert!(a.commutator_norm(b) < 1e-9);
            }
        }
    }

    #[test]
    fn kronecker_instance_dimensions() {
        let mut r = rng(5);
        let cfg = GenConfig {
            dim: 2,
            ..GenConfig::default()
        };
        let inst = gen_instance(CaseId::C3P, &Structure::Kronecker, &cfg, &mut r).unwrap();
        let m = eval_margin(CaseId::C3P, &Structure::Kronecker, &inst).unwrap();
        let el = m.element.unwrap();
        // 1x1 coefficient times two 2x2 factors: dimension 4
        assert_eq!(el.as_matrix().unwrap().dim(), 4);

        // the longer ring statements need a commutative star, which the
        // Kronecker product is not
        assert!(gen_instance(CaseId::R4, &Structure::Kronecker, &cfg, &mut r).is_err());
    }

    #[test]
    fn falsifier_map_stays_in_hypothesis() {
        let mut r = rng(17);
        let g = GFunctionSpec::identity();
        for id in [CaseId::S2, CaseId::S3, CaseId::S4, CaseId::S5, CaseId::S6, CaseId::S7] {
            let k = param_dim(id).unwrap();
            for _ in 0..100 {
                let p: Vec<f64> = (0..k).map(|_| r.gen_range(-3.0..3.0)).collect();
                let inst = instance_from_params(id, &p, &g).unwrap();
                let h = check_hypothesis(id, &Structure::RealMul, &inst, 1e-9).unwrap();
                assert!(h.satisfied, "{}: {:?}", id.name(), h.failed);
            }
        }
    }

    #[test]
    fn violating_map_breaks_exactly_one_clause() {
        let mut r = rng(19);
        let g = GFunctionSpec::identity();
        for id in [CaseId::S2, CaseId::S3, CaseId::S4] {
            let k = param_dim(id).unwrap();
            for _ in 0..100 {
                let p: Vec<f64> = (0..k).map(|_| r.gen_range(-3.0..3.0)).collect();
                let inst = violating_instance_from_params(id, &p, &g).unwrap();
                let h = check_hypothesis(id, &Structure::RealMul, &inst, 1e-9).unwrap();
                assert!(!h.satisfied, "{} should violate", id.name());
            }
        }
    }

    #[test]
    fn orthogonality_of_random_q() {
        let mut r = rng(23);
        let q = random_orthogonal(&mut r, 4);
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = (0..4).map(|k| q[i * 4 + k] * q[j * 4 + k]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn psd_gram_is_psd() {
        let mut r = rng(29);
        for _ in 0..20 {
            let rank = r.gen_range(1..=4);
            let m = psd_gram(&mut r, 4, rank);
            assert!(m.min_eigenvalue() > -1e-10);
        }
    }

    #[test]
    fn c3_instances_across_structures() {
        let mut r = rng(31);
        let cfg = GenConfig {
            dim: 3,
            ..GenConfig::default()
        };
        for sid in crate::structure::STRUCTURE_IDS {
            let s = random_structure(sid, cfg.dim, &mut r).unwrap();
            let inst = gen_instance(CaseId::C3, &s, &cfg, &mut r).unwrap();
            let h = check_hypothesis(CaseId::C3, &s, &inst, 1e-9).unwrap();
            assert!(h.satisfied, "{sid}: {:?}", h.failed);
            let m = eval_margin(CaseId::C3, &s, &inst).unwrap();
            assert!(m.value >= -1e-9 * m.scale, "{sid}: margin {}", m.value);
        }
    }
}
