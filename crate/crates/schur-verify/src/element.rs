//! Carrier elements and tolerance-aware partial-order comparison.
//!
//! An [`Element`] is a real scalar, a real vector (with an optional quadrature
//! weight vector), or a real symmetric matrix. Scalars carry the total order
//! on the reals, vectors the elementwise cone order, and matrices the Loewner
//! order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi;

/// Dense real symmetric matrix, row-major storage.
///
/// Construction symmetrizes the payload, so every stored matrix is symmetric
/// to working precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMat {
    dim: usize,
    data: Vec<f64>,
}

impl SymMat {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "matrix payload has {} entries, expected {}",
                data.len(),
                dim * dim
            )));
        }
        let mut m = SymMat { dim, data };
        m.symmetrize();
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        SymMat {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn ones(dim: usize) -> Self {
        SymMat {
            dim,
            data: vec![1.0; dim * dim],
        }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = Self::zeros(dim);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * dim + i] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn symmetrize(&mut self) {
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let avg = 0.5 * (self.get(i, j) + self.get(j, i));
                self.set(i, j, avg);
                self.set(j, i, avg);
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi::symmetric_eigenvalues(&self.data, self.dim)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        jacobi::min_eigenvalue(&self.data, self.dim)
    }

    pub fn add(&self, other: &SymMat) -> Result<SymMat> {
        if self.dim != other.dim {
            return Err(Error::Dimension("matrix add dim mismatch".into()));
        }
        Ok(SymMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, s: f64) -> SymMat {
        SymMat {
            dim: self.dim,
            data: self.data.iter().map(|v| s * v).collect(),
        }
    }

    pub fn neg(&self) -> SymMat {
        self.scale(-1.0)
    }

    pub fn sub(&self, other: &SymMat) -> Result<SymMat> {
        self.add(&other.neg())
    }

    /// Plain matrix product. The result is symmetrized; callers are expected
    /// to pass commuting symmetric factors, for which the true product is
    /// already symmetric.
    pub fn matmul(&self, other: &SymMat) -> Result<SymMat> {
        if self.dim != other.dim {
            return Err(Error::Dimension("matmul dim mismatch".into()));
        }
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += aik * other.get(k, j);
                }
            }
        }
        SymMat::new(d, out)
    }

    /// Commutator norm `||AB - BA||_F`, without symmetrization.
    pub fn commutator_norm(&self, other: &SymMat) -> f64 {
        let d = self.dim;
        let mut ab = vec![0.0; d * d];
        let mut ba = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                for j in 0..d {
                    ab[i * d + j] += self.get(i, k) * other.get(k, j);
                    ba[i * d + j] += other.get(i, k) * self.get(k, j);
                }
            }
        }
        ab.iter()
            .zip(&ba)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    pub fn hadamard(&self, other: &SymMat) -> Result<SymMat> {
        if self.dim != other.dim {
            return Err(Error::Dimension("hadamard dim mismatch".into()));
        }
        Ok(SymMat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn kronecker(&self, other: &SymMat) -> SymMat {
        let (da, db) = (self.dim, other.dim);
        let d = da * db;
        let mut out = vec![0.0; d * d];
        for i in 0..da {
            for j in 0..da {
                let aij = self.get(i, j);
                for k in 0..db {
                    for l in 0..db {
                        out[(i * db + k) * d + (j * db + l)] = aij * other.get(k, l);
                    }
                }
            }
        }
        SymMat { dim: d, data: out }
    }

    /// Matrix inverse via Gauss-Jordan. Used only for the well-conditioned
    /// positive definite differences of the 6/7-variable ring hypotheses.
    pub fn inverse(&self) -> Result<SymMat> {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut inv = SymMat::identity(d).data;
        for col in 0..d {
            // partial pivot
            let mut piv = col;
            for r in col + 1..d {
                if a[r * d + col].abs() > a[piv * d + col].abs() {
                    piv = r;
                }
            }
            if a[piv * d + col].abs() < 1e-14 {
                return Err(Error::Domain("matrix not invertible".into()));
            }
            if piv != col {
                for j in 0..d {
                    a.swap(col * d + j, piv * d + j);
                    inv.swap(col * d + j, piv * d + j);
                }
            }
            let p = a[col * d + col];
            for j in 0..d {
                a[col * d + j] /= p;
                inv[col * d + j] /= p;
            }
            for r in 0..d {
                if r == col {
                    continue;
                }
                let f = a[r * d + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..d {
                    a[r * d + j] -= f * a[col * d + j];
                    inv[r * d + j] -= f * inv[col * d + j];
                }
            }
        }
        SymMat::new(d, inv)
    }
}

/// Tagged carrier value: scalar, weighted vector, or symmetric matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Element {
    Scalar(f64),
    Vector {
        values: Vec<f64>,
        /// Optional quadrature weights, all nonnegative, same length.
        weights: Option<Vec<f64>>,
    },
    Matrix(SymMat),
}

/// Carrier kind of an [`Element`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kind {
    Scalar,
    Vector,
    Matrix,
}

impl Element {
    pub fn scalar(v: f64) -> Element {
        Element::Scalar(v)
    }

    pub fn vector(values: Vec<f64>) -> Element {
        Element::Vector {
            values,
            weights: None,
        }
    }

    pub fn weighted_vector(values: Vec<f64>, weights: Vec<f64>) -> Result<Element> {
        if values.len() != weights.len() {
            return Err(Error::Dimension("weight vector length mismatch".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::Domain("negative quadrature weight".into()));
        }
        Ok(Element::Vector {
            values,
            weights: Some(weights),
        })
    }

    pub fn matrix(m: SymMat) -> Element {
        Element::Matrix(m)
    }

    pub fn kind(&self) -> Kind {
        match self {
            Element::Scalar(_) => Kind::Scalar,
            Element::Vector { .. } => Kind::Vector,
            Element::Matrix(_) => Kind::Matrix,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Element::Scalar(_) => 1,
            Element::Vector { values, .. } => values.len(),
            Element::Matrix(m) => m.dim(),
        }
    }

    pub fn zero_like(&self) -> Element {
        match self {
            Element::Scalar(_) => Element::Scalar(0.0),
            Element::Vector { values, weights } => Element::Vector {
                values: vec![0.0; values.len()],
                weights: weights.clone(),
            },
            Element::Matrix(m) => Element::Matrix(SymMat::zeros(m.dim())),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Element::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_matrix(&self) -> Option<&SymMat> {
        match self {
            Element::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        match (self, other) {
            (Element::Scalar(a), Element::Scalar(b)) => Ok(Element::Scalar(a + b)),
            (
                Element::Vector { values: a, weights },
                Element::Vector { values: b, .. },
            ) => {
                if a.len() != b.len() {
                    return Err(Error::Dimension("vector add length mismatch".into()));
                }
                Ok(Element::Vector {
                    values: a.iter().zip(b).map(|(x, y)| x + y).collect(),
                    weights: weights.clone(),
                })
            }
            (Element::Matrix(a), Element::Matrix(b)) => Ok(Element::Matrix(a.add(b)?)),
            _ => Err(Error::Dimension("element kind mismatch in add".into())),
        }
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Element {
        match self {
            Element::Scalar(v) => Element::Scalar(s * v),
            Element::Vector { values, weights } => Element::Vector {
                values: values.iter().map(|v| s * v).collect(),
                weights: weights.clone(),
            },
            Element::Matrix(m) => Element::Matrix(m.scale(s)),
        }
    }

    /// Magnitude used for relative tolerance scales: absolute value,
    /// max-abs entry, or Frobenius norm.
    pub fn magnitude(&self) -> f64 {
        match self {
            Element::Scalar(v) => v.abs(),
            Element::Vector { values, .. } => {
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
            Element::Matrix(m) => m.frobenius_norm(),
        }
    }
}

/// Outcome tag of a partial-order comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrderTag {
    Greater,
    Less,
    Equal,
    Incomparable,
}

/// Comparison result with a signed margin: the smallest entry (vectors) or
/// eigenvalue (matrices) of the difference, or the difference itself for
/// scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderResult {
    pub tag: OrderTag,
    pub margin: f64,
}

impl OrderResult {
    pub fn is_ge(&self) -> bool {
        matches!(self.tag, OrderTag::Greater | OrderTag::Equal)
    }

    pub fn is_le(&self) -> bool {
        matches!(self.tag, OrderTag::Less | OrderTag::Equal)
    }
}

/// Compare `a` against `b` in the partial order of their carrier.
///
/// Scalars use the total order with an absolute band of `tol`. Vectors use
/// the elementwise cone order and matrices the Loewner order, both with a
/// relative band `tol * (1 + magnitude)`.
pub fn cmp(a: &Element, b: &Element, tol: f64) -> Result<OrderResult> {
    if tol < 0.0 {
        return Err(Error::Config("negative tolerance".into()));
    }
    if a.kind() != b.kind() || a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "cmp on {:?}/dim {} vs {:?}/dim {}",
            a.kind(),
            a.dim(),
            b.kind(),
            b.dim()
        )));
    }
    match (a, b) {
        (Element::Scalar(x), Element::Scalar(y)) => {
            let d = x - y;
            let tag = if d.abs() <= tol {
                OrderTag::Equal
            } else if d > 0.0 {
                OrderTag::Greater
            } else {
                OrderTag::Less
            };
            Ok(OrderResult { tag, margin: d })
        }
        (Element::Vector { values: x, .. }, Element::Vector { values: y, .. }) => {
            let scale = 1.0 + a.magnitude().max(b.magnitude());
            let band = tol * scale;
            let diffs: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
            let min = diffs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = diffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let tag = if min >= -band && max <= band {
                OrderTag::Equal
            } else if min >= -band {
                OrderTag::Greater
            } else if max <= band {
                OrderTag::Less
            } else {
                OrderTag::Incomparable
            };
            Ok(OrderResult { tag, margin: min })
        }
        (Element::Matrix(x), Element::Matrix(y)) => {
            let scale = 1.0 + x.frobenius_norm().max(y.frobenius_norm());
            let band = tol * scale;
            let diff = x.sub(y)?;
            let evs = diff.eigenvalues();
            let min = *evs.first().unwrap_or(&0.0);
            let max = *evs.last().unwrap_or(&0.0);
            let tag = if min >= -band && max <= band {
                OrderTag::Equal
            } else if min >= -band {
                OrderTag::Greater
            } else if max <= band {
                OrderTag::Less
            } else {
                OrderTag::Incomparable
            };
            Ok(OrderResult { tag, margin: min })
        }
        _ => unreachable!("kind equality checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cmp_scalar_identity() {
        let x = Element::scalar(1.5);
        let r = cmp(&x, &x, 1e-9).unwrap();
        assert_eq!(r.tag, OrderTag::Equal);
        assert_eq!(r.margin, 0.0);
    }

    #[test]
    fn cmp_loewner_greater() {
        // diag(2,1) - diag(1,0) = I, smallest eigenvalue 1.
        let a = Element::matrix(SymMat::diag(&[2.0, 1.0]));
        let b = Element::matrix(SymMat::diag(&[1.0, 0.0]));
        let r = cmp(&a, &b, 1e-9).unwrap();
        assert_eq!(r.tag, OrderTag::Greater);
        assert!((r.margin - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cmp_loewner_incomparable() {
        // diag(1,0) - diag(0,1) = diag(1,-1): mixed-sign eigenvalues.
        let a = Element::matrix(SymMat::diag(&[1.0, 0.0]));
        let b = Element::matrix(SymMat::diag(&[0.0, 1.0]));
        let r = cmp(&a, &b, 1e-9).unwrap();
        assert_eq!(r.tag, OrderTag::Incomparable);
    }

    #[test]
    fn cmp_vector_cone() {
        let a = Element::vector(vec![2.0, 3.0]);
        let b = Element::vector(vec![1.0, 1.0]);
        assert_eq!(cmp(&a, &b, 1e-9).unwrap().tag, OrderTag::Greater);
        assert_eq!(cmp(&b, &a, 1e-9).unwrap().tag, OrderTag::Less);
        let c = Element::vector(vec![3.0, 0.0]);
        assert_eq!(cmp(&a, &c, 1e-9).unwrap().tag, OrderTag::Incomparable);
    }

    #[test]
    fn kind_mismatch_rejected() {
        let a = Element::scalar(1.0);
        let b = Element::vector(vec![1.0]);
        assert!(matches!(cmp(&a, &b, 1e-9), Err(Error::Dimension(_))));
    }

    #[test]
    fn symmetrization_on_construction() {
        let m = SymMat::new(2, vec![1.0, 2.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(1, 0), 1.0);
    }

    #[test]
    fn negative_weights_rejected() {
        assert!(Element::weighted_vector(vec![1.0], vec![-0.5]).is_err());
    }

    #[test]
    fn inverse_of_spd() {
        let m = SymMat::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv).unwrap();
        assert!((prod.get(0, 0) - 1.0).abs() < 1e-12);
        assert!(prod.get(0, 1).abs() < 1e-12);
    }
}
