//! Truncated number-basis matrix mechanics.
//!
//! This module is the independent cross-check for every closed-form
//! expression in the crate: operators become dense matrices, states become
//! coefficient vectors, and expectation values become quadratic forms. The
//! truncation dimension adapts until the neglected coefficient mass falls
//! below a target, so results carry a certified tail bound instead of a
//! hope.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qspecial::{check_domain, q_exp, q_number, DeformationParameter};

/// How the adaptive basis truncation is chosen: start at `start` states,
/// double until the analytic tail bound drops below `tail_target`, give up
/// past `max`.
#[derive(Debug, Clone, Copy)]
pub struct DimPolicy {
    pub start: usize,
    pub max: usize,
    pub tail_target: f64,
}

impl Default for DimPolicy {
    fn default() -> Self {
        DimPolicy {
            start: 32,
            max: 4096,
            tail_target: 1e-14,
        }
    }
}

impl DimPolicy {
    /// Same policy with a different hard cap.
    pub fn with_max(mut self, max: usize) -> Self {
        self.max = max;
        self
    }
}

/// A number-basis state: coefficients `c_0 .. c_{dim-1}` plus an upper
/// bound on the squared-norm mass lost to truncation.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub coeffs: DVector<Complex64>,
    pub tail_norm: f64,
}

impl FockVector {
    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// A dense operator on the truncated basis. `hermitian` records whether
/// the operator is self-adjoint in exact arithmetic; expectation values of
/// such operators get their residual imaginary part clamped.
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub matrix: DMatrix<Complex64>,
    pub hermitian: bool,
}

impl FockOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim >= 2 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "basis dimension must be at least 2, got {dim}"
        )))
    }
}

/// Lowering operator: `a |n> = sqrt([n]_q) |n-1>`.
pub fn build_annihilator(q: DeformationParameter, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let mut m = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = Complex64::new(q_number(n as u32, q).sqrt(), 0.0);
    }
    Ok(FockOperator {
        matrix: m,
        hermitian: false,
    })
}

/// Raising operator, the adjoint of [`build_annihilator`].
pub fn build_creation(q: DeformationParameter, dim: usize) -> Result<FockOperator> {
    let a = build_annihilator(q, dim)?;
    Ok(FockOperator {
        matrix: a.matrix.adjoint(),
        hermitian: false,
    })
}

/// Number operator, diagonal `n`.
pub fn build_number(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(r as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(FockOperator {
        matrix: m,
        hermitian: true,
    })
}

/// Diagonal operator `q^{n/2}`, used in the asymmetric quadrature.
pub fn build_q_half_number(q: DeformationParameter, dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let sq = q.value().sqrt();
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(sq.powi(r as i32), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(FockOperator {
        matrix: m,
        hermitian: true,
    })
}

/// The three quadratures `(X1, X2, P)`:
/// `X1 = (a' + a)/sqrt(2)`, `X2 = (q^{n/2} a' + a q^{n/2})/sqrt(2)`,
/// `P = i (a' - a)/sqrt(2)`, where `a'` is the raising operator.
pub fn build_quadratures(
    q: DeformationParameter,
    dim: usize,
) -> Result<(FockOperator, FockOperator, FockOperator)> {
    let a = build_annihilator(q, dim)?;
    let ad = build_creation(q, dim)?;
    let qh = build_q_half_number(q, dim)?;
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let x1 = (&ad.matrix + &a.matrix) * s;
    // qh is diagonal, so the products reduce to row and column scalings.
    let x2 = DMatrix::from_fn(dim, dim, |r, c| {
        (qh.matrix[(r, r)] * ad.matrix[(r, c)] + a.matrix[(r, c)] * qh.matrix[(c, c)]) * s
    });
    let p = (&ad.matrix - &a.matrix) * (s * Complex64::new(0.0, 1.0));
    Ok((
        FockOperator {
            matrix: x1,
            hermitian: true,
        },
        FockOperator {
            matrix: x2,
            hermitian: true,
        },
        FockOperator {
            matrix: p,
            hermitian: true,
        },
    ))
}

/// Smallest policy-admissible dimension whose normalized tail mass bound is
/// below the policy target, together with that bound.
fn truncation_dim(z_sq: f64, q: DeformationParameter, policy: &DimPolicy) -> Result<(usize, f64)> {
    let norm = q_exp(Complex64::new(z_sq, 0.0), q)?.value.re;
    let mut dim = policy.start.max(2);
    loop {
        if let Some(bound) = tail_mass_bound(z_sq, q, dim) {
            let normalized = bound / norm;
            if normalized <= policy.tail_target {
                return Ok((dim, normalized));
            }
        }
        if dim >= policy.max {
            let b = tail_mass_bound(z_sq, q, dim)
                .map(|m| m / norm)
                .unwrap_or(f64::INFINITY);
            return Err(Error::DimensionOverflow {
                max: policy.max,
                tail_bound: b,
            });
        }
        dim = (dim * 2).min(policy.max);
    }
}

/// Bound on `sum_{k >= dim} z_sq^k / [k]_q!`, or None while the terms are
/// still growing at the cut.
fn tail_mass_bound(z_sq: f64, q: DeformationParameter, dim: usize) -> Option<f64> {
    let mut t = 1.0f64;
    for k in 1..=dim {
        t *= z_sq / q_number(k as u32, q);
    }
    let ratio = z_sq / q_number(dim as u32 + 1, q);
    if ratio < 1.0 {
        Some(t / (1.0 - ratio))
    } else {
        None
    }
}

/// Normalized coherent state of the deformed oscillator,
/// `|z> = e_q(|z|^2)^{-1/2} sum_n z^n / sqrt([n]_q!) |n>`.
///
/// Fails with a domain error when `|z|^2` is outside the convergence
/// domain of the normalizing exponential.
pub fn coherent_vector(
    z: Complex64,
    q: DeformationParameter,
    policy: &DimPolicy,
) -> Result<FockVector> {
    check_domain("coherent state normalization", z.norm_sqr(), q)?;
    let (dim, tail_norm) = truncation_dim(z.norm_sqr(), q, policy)?;
    let norm = q_exp(Complex64::new(z.norm_sqr(), 0.0), q)?.value.re;
    let mut coeffs = DVector::zeros(dim);
    let mut c = Complex64::new(1.0 / norm.sqrt(), 0.0);
    coeffs[0] = c;
    for n in 1..dim {
        c *= z / q_number(n as u32, q).sqrt();
        coeffs[n] = c;
    }
    Ok(FockVector { coeffs, tail_norm })
}

/// Quadratic form `<v| op |v>`. For operators flagged hermitian the
/// residual imaginary part is clamped to zero; a warning is logged if it
/// exceeds `1e-12` relative to the magnitude of the result.
pub fn expectation(op: &FockOperator, v: &FockVector) -> Result<Complex64> {
    if op.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: v.dim(),
        });
    }
    let mv = &op.matrix * &v.coeffs;
    let val = v.coeffs.dotc(&mv);
    if op.hermitian {
        let scale = 1.0 + val.re.abs();
        if val.im.abs() > 1e-12 * scale {
            log::warn!(
                "hermitian expectation has imaginary residue {:.3e} (re {:.6e}); clamping",
                val.im,
                val.re
            );
        }
        Ok(Complex64::new(val.re, 0.0))
    } else {
        Ok(val)
    }
}

/// Inner product `<u|v>`, conjugate-linear in the first argument.
pub fn inner_product(u: &FockVector, v: &FockVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    Ok(u.coeffs.dotc(&v.coeffs))
}

/// Zero-pads a vector to a larger dimension so it can be combined with
/// operators or vectors living on a bigger truncation.
pub fn padded(v: &FockVector, dim: usize) -> Result<FockVector> {
    if dim < v.dim() {
        return Err(Error::DimensionMismatch {
            left: v.dim(),
            right: dim,
        });
    }
    let mut coeffs = DVector::zeros(dim);
    for n in 0..v.dim() {
        coeffs[n] = v.coeffs[n];
    }
    Ok(FockVector {
        coeffs,
        tail_norm: v.tail_norm,
    })
}

/// Applies an operator to a vector. The tail bound of the input is carried
/// over unchanged, which is a good description as long as the operator does
/// not move significant mass across the truncation edge.
pub fn apply(op: &FockOperator, v: &FockVector) -> Result<FockVector> {
    if op.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: op.dim(),
            right: v.dim(),
        });
    }
    Ok(FockVector {
        coeffs: &op.matrix * &v.coeffs,
        tail_norm: v.tail_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn q(v: f64) -> DeformationParameter {
        DeformationParameter::new(v).unwrap()
    }

    #[test]
    fn dimension_preconditions() {
        assert!(build_annihilator(q(0.5), 1).is_err());
        assert!(build_annihilator(q(0.5), 2).is_ok());
        assert!(build_number(0).is_err());
    }

    #[test]
    fn deformed_commutation_identity() {
        // a a' - q a' a = 1 on the block that truncation leaves exact
        // (the last row and column feel the cut and are excluded).
        let dim = 60;
        for qe in [0.1, 0.3, 0.5, 0.8, 1.0] {
            let d = q(qe);
            let a = build_annihilator(d, dim).unwrap();
            let ad = build_creation(d, dim).unwrap();
            let lhs = &a.matrix * &ad.matrix - &ad.matrix * &a.matrix * Complex64::new(qe, 0.0);
            for r in 0..dim - 1 {
                for c in 0..dim - 1 {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(lhs[(r, c)].re, want, epsilon = 1e-13);
                    assert_abs_diff_eq!(lhs[(r, c)].im, 0.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn number_relation() {
        // a' a is diagonal with entries [n]_q.
        let d = q(0.35);
        let a = build_annihilator(d, 40).unwrap();
        let ad = build_creation(d, 40).unwrap();
        let n_op = &ad.matrix * &a.matrix;
        for k in 0..40 {
            assert_relative_eq!(
                n_op[(k, k)].re,
                q_number(k as u32, d),
                max_relative = 1e-13,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn quadratures_are_hermitian() {
        let (x1, x2, p) = build_quadratures(q(0.6), 30).unwrap();
        for op in [&x1, &x2, &p] {
            assert!(op.hermitian);
            let diff = &op.matrix - op.matrix.adjoint();
            assert!(diff.iter().all(|c| c.norm() < 1e-14));
        }
    }

    #[test]
    fn classical_limit_of_quadratures() {
        // At q = 1 the asymmetric quadrature collapses onto X1.
        let (x1, x2, _) = build_quadratures(q(1.0), 25).unwrap();
        let diff = &x1.matrix - &x2.matrix;
        assert!(diff.iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn coherent_truncation_and_norm() {
        let policy = DimPolicy::default();
        let v = coherent_vector(Complex64::new(0.9, 0.7), q(0.5), &policy).unwrap();
        assert!(v.tail_norm <= policy.tail_target);
        let nsq = v.norm_sq();
        assert!(nsq <= 1.0 + 1e-13);
        assert!(1.0 - nsq <= v.tail_norm + 1e-13);
    }

    #[test]
    fn coherent_eigen_relation() {
        let policy = DimPolicy::default();
        let d = q(0.5);
        let z = Complex64::new(1.1, -0.5);
        let v = coherent_vector(z, d, &policy).unwrap();
        let a = build_annihilator(d, v.dim()).unwrap();
        let av = apply(&a, &v).unwrap();
        let mut resid = 0.0f64;
        for n in 0..v.dim() {
            resid += (av.coeffs[n] - z * v.coeffs[n]).norm_sqr();
        }
        assert!(resid.sqrt() <= 10.0 * v.tail_norm.sqrt());
    }

    #[test]
    fn coherent_classical_limit() {
        let z = Complex64::new(1.5, 0.0);
        let v = coherent_vector(z, q(1.0), &DimPolicy::default()).unwrap();
        let pref = (-z.norm_sqr() / 2.0).exp();
        let mut fact = 1.0f64;
        for n in 0..20 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = pref * z.powu(n as u32) / fact.sqrt();
            assert_abs_diff_eq!(v.coeffs[n].re, want.re, epsilon = 1e-12);
            assert_abs_diff_eq!(v.coeffs[n].im, want.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn coherent_domain_rejection() {
        assert!(coherent_vector(Complex64::new(1.5, 0.0), q(0.5), &DimPolicy::default()).is_err());
    }

    #[test]
    fn dimension_cap_overflow() {
        let policy = DimPolicy {
            start: 4,
            max: 8,
            tail_target: 1e-14,
        };
        let err = coherent_vector(Complex64::new(2.4, 0.0), q(0.9), &policy).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { .. }));
    }

    #[test]
    fn expectation_and_adjointness() {
        let policy = DimPolicy::default();
        let d = q(1.0);
        let z = Complex64::new(1.3, 0.0);
        let v = coherent_vector(z, d, &policy).unwrap();
        let n_op = build_number(v.dim()).unwrap();
        let mean_n = expectation(&n_op, &v).unwrap();
        assert_abs_diff_eq!(mean_n.re, z.norm_sqr(), epsilon = 1e-10);
        assert_eq!(mean_n.im, 0.0);

        let a = build_annihilator(d, v.dim()).unwrap();
        let ad = build_creation(d, v.dim()).unwrap();
        let u = apply(&ad, &v).unwrap();
        let lhs = inner_product(&v, &apply(&a, &v).unwrap()).unwrap();
        let rhs = inner_product(&u, &v).unwrap();
        assert_abs_diff_eq!(lhs.re, rhs.re, epsilon = 1e-12);
        assert_abs_diff_eq!(lhs.im, rhs.im, epsilon = 1e-12);
    }

    #[test]
    fn asymmetric_quadrature_reference_value() {
        // <z|X2|z> for z = 1, q = 0.5; reference from 40-digit arithmetic.
        let d = q(0.5);
        let v = coherent_vector(Complex64::new(1.0, 0.0), d, &DimPolicy::default()).unwrap();
        let (_, x2, _) = build_quadratures(d, v.dim()).unwrap();
        let got = expectation(&x2, &v).unwrap();
        assert_relative_eq!(got.re, 0.6511572755150400929133, max_relative = 1e-12);
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let d = q(0.5);
        let v = coherent_vector(Complex64::new(0.5, 0.0), d, &DimPolicy::default()).unwrap();
        let a = build_annihilator(d, v.dim() * 2).unwrap();
        assert!(matches!(
            expectation(&a, &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
