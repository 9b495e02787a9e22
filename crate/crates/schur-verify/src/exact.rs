//! Exact-rational oracle for the scalar cases. Every finite `f64` is a
//! dyadic rational, so converting inputs to `BigRational` and evaluating the
//! sum with integer powers gives the exact margin of the floating-point
//! instance — an independent reference for the `f64` evaluator.
//!
//! ```
//! use num_traits::ToPrimitive;
//! use schur_verify::exact::{oracle_margin_exact, ExactG};
//! use schur_verify::gfun::GFunctionSpec;
//!
//! let g = ExactG::from_spec(&GFunctionSpec::identity()).unwrap();
//! // a clause-violating witness evaluates to exactly -1, no rounding
//! let exact = oracle_margin_exact(&[2.0, 1.0, 0.0], &[1.0, 5.0, 1.0], &g).unwrap();
//! assert_eq!(exact.to_f64().unwrap(), -1.0);
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gfun::GFunctionSpec;

/// Largest exponent the oracle accepts; higher powers are outside the
/// curated library anyway.
pub const MAX_ORACLE_POWER: u32 = 5;

/// The g-forms the oracle can evaluate exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactG {
    /// `c * x^k`.
    Power { k: u32, scale: BigRational },
    /// `c * |x|^k`.
    AbsPower { k: u32, scale: BigRational },
}

fn rational_from_f64(x: f64, what: &str) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::Domain(format!("{what} is not finite: {x}")))
}

impl ExactG {
    /// Match a function spec against the supported exact forms.
    pub fn from_spec(g: &GFunctionSpec) -> Result<ExactG> {
        let (k, signed, c) = g.exact_power_form().ok_or_else(|| {
            Error::UnsupportedPower(format!("{} has no exact power form", g.name()))
        })?;
        if k > MAX_ORACLE_POWER {
            return Err(Error::UnsupportedPower(format!(
                "exponent {k} exceeds the oracle cap {MAX_ORACLE_POWER}"
            )));
        }
        let scale = rational_from_f64(c, "constant factor")?;
        Ok(if signed {
            ExactG::Power { k, scale }
        } else {
            ExactG::AbsPower { k, scale }
        })
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        match self {
            ExactG::Power { k, scale } => scale * pow_rational(x, *k),
            ExactG::AbsPower { k, scale } => scale * pow_rational(&x.abs(), *k),
        }
    }
}

fn pow_rational(x: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::from(BigInt::from(1));
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// Exact margin of the m-variable scalar sum
/// `sum_i a_i prod_{j != i} g(x_i - x_j)`.
pub fn oracle_margin_exact(xs: &[f64], coeffs: &[f64], g: &ExactG) -> Result<BigRational> {
    if xs.len() != coeffs.len() || xs.is_empty() {
        return Err(Error::Config("oracle needs matching nonempty inputs".into()));
    }
    let rx: Vec<BigRational> = xs
        .iter()
        .map(|&x| rational_from_f64(x, "variable"))
        .collect::<Result<_>>()?;
    let ra: Vec<BigRational> = coeffs
        .iter()
        .map(|&a| rational_from_f64(a, "coefficient"))
        .collect::<Result<_>>()?;
    let mut sum = BigRational::zero();
    for i in 0..rx.len() {
        let mut term = ra[i].clone();
        for j in 0..rx.len() {
            if j != i {
                term *= g.eval(&(&rx[i] - &rx[j]));
            }
        }
        sum += term;
    }
    Ok(sum)
}

/// Relative agreement of a floating margin with the exact one:
/// `|m - exact| <= tol * (1 + |exact|)`.
pub fn agrees(margin: f64, exact: &BigRational, tol: f64) -> bool {
    let approx = exact.to_f64().unwrap_or(f64::NAN);
    if !approx.is_finite() {
        return false;
    }
    (margin - approx).abs() <= tol * (1.0 + approx.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn power(k: u32) -> ExactG {
        ExactG::from_spec(&GFunctionSpec::power(k)).unwrap()
    }

    #[test]
    fn identity_oracle_matches_hand_value() {
        let m = oracle_margin_exact(&[3.0, 2.0, 1.0], &[1.0, 1.0, 1.0], &power(1)).unwrap();
        assert_eq!(m, BigRational::from(BigInt::from(3)));
    }

    #[test]
    fn classic_schur_t1_at_rationals() {
        // x(x-y)(x-z) + y(y-z)(y-x) + z(z-x)(z-y) at (1, 1/2, 1/4)
        let xs = [1.0, 0.5, 0.25];
        let g = power(1);
        let coeffs = xs;
        let m = oracle_margin_exact(&xs, &coeffs, &g).unwrap();
        // 1*(1/2)*(3/4) + (1/2)*(1/4)*(-1/2) + (1/4)*(-3/4)*(-1/4)
        let expect = BigRational::new(BigInt::from(3), BigInt::from(8))
            - BigRational::new(BigInt::from(1), BigInt::from(16))
            + BigRational::new(BigInt::from(3), BigInt::from(64));
        assert_eq!(m, expect);
    }

    #[test]
    fn dyadic_conversion_is_exact() {
        let x = 0.1f64; // not exactly 1/10 in binary
        let r = BigRational::from_float(x).unwrap();
        assert_ne!(r, BigRational::new(BigInt::from(1), BigInt::from(10)));
        assert_eq!(r.to_f64().unwrap(), x);
    }

    #[test]
    fn abs_power_even_odd_difference() {
        let g_abs = ExactG::from_spec(&GFunctionSpec::power(2)).unwrap();
        let x = BigRational::from(BigInt::from(-3));
        assert_eq!(g_abs.eval(&x), BigRational::from(BigInt::from(9)));
        let g3 = power(3);
        assert_eq!(g3.eval(&x), BigRational::from(BigInt::from(-27)));
    }

    #[test]
    fn power_cap_enforced() {
        let g = GFunctionSpec::power(6);
        assert!(matches!(
            ExactG::from_spec(&g),
            Err(Error::UnsupportedPower(_))
        ));
    }

    #[test]
    fn expabs_rejected() {
        let g = GFunctionSpec::base(crate::gfun::GBase::ExpAbs).unwrap();
        assert!(ExactG::from_spec(&g).is_err());
    }

    #[test]
    fn agreement_band() {
        let exact = BigRational::one();
        assert!(agrees(1.0 + 1e-12, &exact, 1e-9));
        assert!(!agrees(1.1, &exact, 1e-9));
    }

    #[test]
    fn necessity_witness_is_exactly_minus_one() {
        let m = oracle_margin_exact(&[2.0, 1.0, 0.0], &[1.0, 5.0, 1.0], &power(1)).unwrap();
        assert_eq!(m, BigRational::from(BigInt::from(-1)));
    }
}
