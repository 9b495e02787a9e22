//! Structure descriptors: which carrier triple `(I, J, K)` and star product
//! are in play, with capability flags (ring, symmetric star, associativity).
//!
//! Each variant corresponds to one row of the catalogue of admissible
//! products: real multiplication, the dot product, a bilinear form with a
//! nonnegative matrix, a weighted quadrature pairing, matrix multiplication
//! on commuting symmetric matrices, the Frobenius inner product, and the
//! Hadamard, Kronecker and reverse Kronecker products.

use serde::{Deserialize, Serialize};

use crate::element::{cmp, Element, Kind, SymMat};
use crate::error::{Error, Result};

/// Entrywise-nonnegative square matrix parametrizing the bilinear form
/// `x * y = x^T A y`. Not required to be symmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonnegMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl NonnegMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension("bilinear matrix size mismatch".into()));
        }
        if data.iter().any(|&v| v < 0.0) {
            return Err(Error::Domain("bilinear matrix must be entrywise >= 0".into()));
        }
        Ok(NonnegMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }
}

/// The star-product family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Structure {
    /// `R x R -> R`, ordinary multiplication.
    RealMul,
    /// `R^n x R^n -> R`, dot product.
    VecDot,
    /// `R^n x R^n -> R`, `x^T A y` with entrywise-nonnegative `A`.
    VecBilinear(NonnegMatrix),
    /// Quadrature pairing `sum_i w_i f_i g_i` of function samples.
    FuncQuad { weights: Vec<f64> },
    /// Matrix multiplication restricted to commuting symmetric matrices.
    MatmulCommuting,
    /// Frobenius inner product `Tr(A B)` of symmetric matrices.
    Frobenius,
    /// Hadamard (entrywise) product.
    Hadamard,
    /// Kronecker product; output dimension is the product of input dims.
    Kronecker,
    /// Reverse Kronecker product `A *_r B = B (x) A`.
    RKronecker,
}

/// Stable identifiers used by the CLI and report files.
pub const STRUCTURE_IDS: &[&str] = &[
    "REAL_MUL",
    "VEC_DOT",
    "VEC_BILINEAR",
    "FUNC_QUAD",
    "MATMUL_COMMUTING",
    "FROBENIUS",
    "HADAMARD",
    "KRONECKER",
    "RKRONECKER",
];

impl Structure {
    pub fn id(&self) -> &'static str {
        match self {
            Structure::RealMul => "REAL_MUL",
            Structure::VecDot => "VEC_DOT",
            Structure::VecBilinear(_) => "VEC_BILINEAR",
            Structure::FuncQuad { .. } => "FUNC_QUAD",
            Structure::MatmulCommuting => "MATMUL_COMMUTING",
            Structure::Frobenius => "FROBENIUS",
            Structure::Hadamard => "HADAMARD",
            Structure::Kronecker => "KRONECKER",
            Structure::RKronecker => "RKRONECKER",
        }
    }

    /// Carrier kind of the input groups `I = J`.
    pub fn input_kind(&self) -> Kind {
        match self {
            Structure::RealMul => Kind::Scalar,
            Structure::VecDot | Structure::VecBilinear(_) | Structure::FuncQuad { .. } => {
                Kind::Vector
            }
            _ => Kind::Matrix,
        }
    }

    /// Carrier kind of the output group `K`.
    pub fn output_kind(&self) -> Kind {
        match self {
            Structure::RealMul
            | Structure::VecDot
            | Structure::VecBilinear(_)
            | Structure::FuncQuad { .. }
            | Structure::Frobenius => Kind::Scalar,
            _ => Kind::Matrix,
        }
    }

    /// Whether `(I, +, *)` closes into a partially ordered commutative ring.
    /// Kronecker products qualify only under the all-orders carrier
    /// convention, where dimensions grow with each product.
    pub fn is_ring(&self) -> bool {
        matches!(
            self,
            Structure::RealMul
                | Structure::MatmulCommuting
                | Structure::Hadamard
                | Structure::Kronecker
                | Structure::RKronecker
        )
    }

    pub fn symmetric_star(&self) -> bool {
        match self {
            Structure::RealMul
            | Structure::VecDot
            | Structure::FuncQuad { .. }
            | Structure::MatmulCommuting
            | Structure::Frobenius
            | Structure::Hadamard => true,
            Structure::VecBilinear(a) => {
                (0..a.dim()).all(|i| (0..a.dim()).all(|j| a.get(i, j) == a.get(j, i)))
            }
            Structure::Kronecker | Structure::RKronecker => false,
        }
    }

    pub fn associative_star(&self) -> bool {
        // For the binary products that stay inside one carrier.
        matches!(
            self,
            Structure::RealMul
                | Structure::MatmulCommuting
                | Structure::Hadamard
                | Structure::Kronecker
                | Structure::RKronecker
        )
    }

    pub fn is_real_vector_space(&self) -> bool {
        true
    }

    fn check_input(&self, e: &Element, side: &str) -> Result<()> {
        if e.kind() != self.input_kind() {
            return Err(Error::Dimension(format!(
                "{side} operand kind {:?} invalid for {}",
                e.kind(),
                self.id()
            )));
        }
        Ok(())
    }

    /// The star product per structure. Distributive and
    /// nonnegativity-preserving over the declared cones.
    pub fn star(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_input(a, "left")?;
        self.check_input(b, "right")?;
        match self {
            Structure::RealMul => Ok(Element::scalar(
                a.as_scalar().unwrap() * b.as_scalar().unwrap(),
            )),
            Structure::VecDot => {
                let (x, y) = (vector_values(a)?, vector_values(b)?);
                same_len(x, y)?;
                Ok(Element::scalar(x.iter().zip(y).map(|(p, q)| p * q).sum()))
            }
            Structure::VecBilinear(m) => {
                let (x, y) = (vector_values(a)?, vector_values(b)?);
                same_len(x, y)?;
                if x.len() != m.dim() {
                    return Err(Error::Dimension("bilinear form dim mismatch".into()));
                }
                let mut s = 0.0;
                for i in 0..x.len() {
                    for j in 0..y.len() {
                        s += x[i] * m.get(i, j) * y[j];
                    }
                }
                Ok(Element::scalar(s))
            }
            Structure::FuncQuad { weights } => {
                let (x, y) = (vector_values(a)?, vector_values(b)?);
                same_len(x, y)?;
                if x.len() != weights.len() {
                    return Err(Error::Dimension("quadrature weight length mismatch".into()));
                }
                Ok(Element::scalar(
                    x.iter()
                        .zip(y)
                        .zip(weights)
                        .map(|((p, q), w)| w * p * q)
                        .sum(),
                ))
            }
            Structure::MatmulCommuting => {
                let (x, y) = (matrix_of(a)?, matrix_of(b)?);
                Ok(Element::Matrix(x.matmul(y)?))
            }
            Structure::Frobenius => {
                let (x, y) = (matrix_of(a)?, matrix_of(b)?);
                if x.dim() != y.dim() {
                    return Err(Error::Dimension("frobenius dim mismatch".into()));
                }
                let mut s = 0.0;
                for i in 0..x.dim() {
                    for j in 0..x.dim() {
                        s += x.get(i, j) * y.get(i, j);
                    }
                }
                Ok(Element::scalar(s))
            }
            Structure::Hadamard => {
                let (x, y) = (matrix_of(a)?, matrix_of(b)?);
                Ok(Element::Matrix(x.hadamard(y)?))
            }
            Structure::Kronecker => {
                let (x, y) = (matrix_of(a)?, matrix_of(b)?);
                Ok(Element::Matrix(x.kronecker(y)))
            }
            Structure::RKronecker => {
                let (x, y) = (matrix_of(a)?, matrix_of(b)?);
                Ok(Element::Matrix(y.kronecker(x)))
            }
        }
    }

    /// Star identity, when the structure has one.
    pub fn star_identity(&self, dim: usize) -> Result<Element> {
        match self {
            Structure::RealMul => Ok(Element::scalar(1.0)),
            Structure::MatmulCommuting => Ok(Element::Matrix(SymMat::identity(dim))),
            Structure::Hadamard => Ok(Element::Matrix(SymMat::ones(dim))),
            Structure::Kronecker | Structure::RKronecker => {
                Ok(Element::Matrix(SymMat::new(1, vec![1.0])?))
            }
            _ => Err(Error::UnsupportedPower(format!(
                "{} has no star identity",
                self.id()
            ))),
        }
    }

    /// n-fold star product `a * a * ... * a`.
    ///
    /// `n = 1` returns `a` unchanged; `n = 0` returns the star identity when
    /// one exists. Powers beyond 1 need an associative ring product; under
    /// Kronecker the output dimension grows as `dim^n`.
    pub fn pow_star(&self, a: &Element, n: u32) -> Result<Element> {
        self.check_input(a, "power")?;
        if n == 0 {
            return self.star_identity(a.dim());
        }
        if n == 1 {
            return Ok(a.clone());
        }
        if !(self.is_ring() && self.associative_star()) {
            return Err(Error::UnsupportedPower(format!(
                "{} does not support star powers >= 2",
                self.id()
            )));
        }
        let mut acc = a.clone();
        for _ in 1..n {
            acc = self.star(&acc, a)?;
        }
        Ok(acc)
    }

    /// Left-to-right star product over `factors`. The fixed association
    /// order keeps nonassociative products well-defined.
    pub fn star_fold(&self, factors: &[Element]) -> Result<Element> {
        let (first, rest) = factors
            .split_first()
            .ok_or_else(|| Error::Config("empty star product".into()))?;
        let mut acc = first.clone();
        for f in rest {
            acc = self.star(&acc, f)?;
        }
        Ok(acc)
    }

    /// Compare in the output carrier `K` order.
    pub fn cmp_output(&self, a: &Element, b: &Element, tol: f64) -> Result<crate::element::OrderResult> {
        cmp(a, b, tol)
    }
}

/// `u` is an upper bound of `{b, -b}`: `u >= b` and `u >= -b` in the carrier
/// order. The ring-case surrogate for the absolute value.
pub fn is_upper_bound(u: &Element, b: &Element, tol: f64) -> Result<bool> {
    Ok(cmp(u, b, tol)?.is_ge() && cmp(u, &b.neg(), tol)?.is_ge())
}

fn vector_values(e: &Element) -> Result<&Vec<f64>> {
    match e {
        Element::Vector { values, .. } => Ok(values),
        _ => Err(Error::Dimension("expected vector element".into())),
    }
}

fn matrix_of(e: &Element) -> Result<&SymMat> {
    match e {
        Element::Matrix(m) => Ok(m),
        _ => Err(Error::Dimension("expected matrix element".into())),
    }
}

fn same_len(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Dimension("vector length mismatch".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::OrderTag;

    #[test]
    fn frobenius_of_identities() {
        let i2 = Element::matrix(SymMat::identity(2));
        let r = Structure::Frobenius.star(&i2, &i2).unwrap();
        assert_eq!(r.as_scalar(), Some(2.0));
    }

    #[test]
    fn hadamard_zero_annihilates() {
        let m = Element::matrix(SymMat::new(2, vec![1.0, 2.0, 2.0, 3.0]).unwrap());
        let z = m.zero_like();
        let r = Structure::Hadamard.star(&m, &z).unwrap();
        assert_eq!(r, z);
    }

    #[test]
    fn kronecker_of_diagonals() {
        let a = Element::matrix(SymMat::diag(&[1.0, 2.0]));
        let b = Element::matrix(SymMat::diag(&[3.0, 4.0]));
        let r = Structure::Kronecker.star(&a, &b).unwrap();
        assert_eq!(
            r.as_matrix().unwrap(),
            &SymMat::diag(&[3.0, 4.0, 6.0, 8.0])
        );
    }

    #[test]
    fn reverse_kronecker_swaps_factors() {
        let a = Element::matrix(SymMat::new(2, vec![1.0, 0.5, 0.5, 2.0]).unwrap());
        let b = Element::matrix(SymMat::diag(&[3.0, 4.0]));
        let fwd = Structure::Kronecker.star(&b, &a).unwrap();
        let rev = Structure::RKronecker.star(&a, &b).unwrap();
        assert_eq!(fwd, rev);
    }

    #[test]
    fn pow_star_real() {
        let r = Structure::RealMul
            .pow_star(&Element::scalar(3.0), 2)
            .unwrap();
        assert_eq!(r.as_scalar(), Some(9.0));
    }

    #[test]
    fn pow_star_identity_case() {
        let m = Element::matrix(SymMat::new(2, vec![1.0, 0.2, 0.2, 3.0]).unwrap());
        assert_eq!(Structure::Hadamard.pow_star(&m, 1).unwrap(), m);
    }

    #[test]
    fn pow_star_commuting_diag() {
        let m = Element::matrix(SymMat::diag(&[2.0, 3.0]));
        let r = Structure::MatmulCommuting.pow_star(&m, 3).unwrap();
        assert_eq!(r.as_matrix().unwrap(), &SymMat::diag(&[8.0, 27.0]));
    }

    #[test]
    fn pow_star_rejected_for_non_ring() {
        let v = Element::vector(vec![1.0, 2.0]);
        assert!(matches!(
            Structure::VecDot.pow_star(&v, 2),
            Err(Error::UnsupportedPower(_))
        ));
        assert!(matches!(
            Structure::VecDot.pow_star(&v, 0),
            Err(Error::UnsupportedPower(_))
        ));
    }

    #[test]
    fn upper_bound_scalar() {
        assert!(is_upper_bound(&Element::scalar(5.0), &Element::scalar(-3.0), 1e-9).unwrap());
        assert!(!is_upper_bound(&Element::scalar(2.0), &Element::scalar(-3.0), 1e-9).unwrap());
    }

    #[test]
    fn upper_bound_loewner() {
        let i2 = Element::matrix(SymMat::identity(2));
        let b = Element::matrix(SymMat::diag(&[0.5, -0.5]));
        assert!(is_upper_bound(&i2, &b, 1e-9).unwrap());
        let u = Element::matrix(SymMat::diag(&[1.0, 0.0]));
        let c = Element::matrix(SymMat::diag(&[0.0, 1.0]));
        assert!(!is_upper_bound(&u, &c, 1e-9).unwrap());
    }

    #[test]
    fn quad_star_is_weighted_sum() {
        let s = Structure::FuncQuad {
            weights: vec![0.5, 0.5],
        };
        let f = Element::vector(vec![2.0, 4.0]);
        let g = Element::vector(vec![1.0, 3.0]);
        assert_eq!(s.star(&f, &g).unwrap().as_scalar(), Some(7.0));
    }

    #[test]
    fn bilinear_form() {
        let a = NonnegMatrix::new(2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        let s = Structure::VecBilinear(a);
        let x = Element::vector(vec![1.0, 1.0]);
        let y = Element::vector(vec![1.0, 1.0]);
        // [1 1] [[1,2],[0,1]] [1,1]^T = 4
        assert_eq!(s.star(&x, &y).unwrap().as_scalar(), Some(4.0));
        let mut r = Structure::MatmulCommuting.star(&x, &y);
        assert!(r.is_err());
        r = s.star(&x, &Element::scalar(1.0));
        assert!(r.is_err());
    }

    #[test]
    fn order_result_tags() {
        let a = Element::scalar(2.0);
        let b = Element::scalar(1.0);
        assert_eq!(cmp(&a, &b, 1e-9).unwrap().tag, OrderTag::Greater);
    }
}
