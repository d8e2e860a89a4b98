//! Deformed basic functions: bracket numbers, their factorials, the
//! q-shifted factorial, and the deformed exponential series.
//!
//! Everything here is parametrised by a [`DeformationParameter`] `q` with
//! `0 < q <= 1`. At `q = 1` the deformation switches off and the functions
//! reduce to `n`, `n!` and `exp`; that limit is handled by dedicated closed
//! forms rather than by summing a slowly converging series.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative tolerance for series evaluation. Close to machine
/// precision so series values stay comparable with closed forms.
pub const DEFAULT_TOLERANCE: f64 = 1e-15;

/// Fraction of the convergence radius accepted as in-domain. Arguments in
/// the outer 0.1% shell are rejected instead of silently returning a value
/// dominated by a divergent tail.
pub const DOMAIN_MARGIN: f64 = 0.999;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;

/// Deformation parameter restricted to the interval `(0, 1]`.
///
/// The value `q = 1` is stored exactly and triggers undeformed closed
/// forms throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationParameter(f64);

impl DeformationParameter {
    /// Accepts `0 < q <= 1`; anything else (including NaN) is a
    /// configuration error.
    pub fn new(q: f64) -> Result<Self> {
        if q.is_finite() && q > 0.0 && q <= 1.0 {
            Ok(DeformationParameter(q))
        } else {
            Err(Error::Config(format!(
                "deformation parameter must satisfy 0 < q <= 1, got {q}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// True exactly at the undeformed point `q = 1`.
    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }

    /// Convergence radius `1 / (1 - q)` of the deformed exponential,
    /// infinite at `q = 1`.
    pub fn convergence_radius(self) -> f64 {
        if self.is_classical() {
            f64::INFINITY
        } else {
            1.0 / (1.0 - self.0)
        }
    }

    /// Whether a series argument of the given modulus is accepted, i.e.
    /// lies within [`DOMAIN_MARGIN`] of the convergence radius.
    pub fn admits(self, modulus: f64) -> bool {
        self.is_classical() || modulus <= DOMAIN_MARGIN * self.convergence_radius()
    }
}

pub(crate) fn check_domain(what: &'static str, modulus: f64, q: DeformationParameter) -> Result<()> {
    if q.admits(modulus) {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            modulus,
            limit: DOMAIN_MARGIN * q.convergence_radius(),
        })
    }
}

/// Bracket number `[n]_q = (1 - q^n) / (1 - q)`, equal to `n` at `q = 1`.
pub fn q_number(n: u32, q: DeformationParameter) -> f64 {
    if q.is_classical() {
        return n as f64;
    }
    // (1 - q^n) via expm1/ln_1p keeps full precision for q close to 1.
    let one_minus_qn = -((n as f64) * (q.value() - 1.0).ln_1p()).exp_m1();
    one_minus_qn / (1.0 - q.value())
}

/// Bracket factorial `[n]_q! = [1]_q [2]_q ... [n]_q`, with `[0]_q! = 1`.
///
/// May overflow to infinity for large `n` at `q` near 1; use
/// [`ln_q_factorial`] when only the logarithm is needed.
pub fn q_factorial(n: u32, q: DeformationParameter) -> f64 {
    (1..=n).map(|k| q_number(k, q)).product()
}

/// Natural logarithm of the bracket factorial.
pub fn ln_q_factorial(n: u32, q: DeformationParameter) -> f64 {
    (1..=n).map(|k| q_number(k, q).ln()).sum()
}

/// Finite q-shifted factorial `(a; q)_n = prod_{k=0}^{n-1} (1 - a q^k)`.
pub fn q_pochhammer(a: Complex64, q: DeformationParameter, n: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..n {
        acc *= Complex64::new(1.0, 0.0) - aq;
        aq *= q.value();
    }
    acc
}

/// Outcome of a deformed exponential evaluation.
#[derive(Debug, Clone, Copy)]
pub struct QExpResult {
    pub value: Complex64,
    /// Number of series terms actually summed (1 when a closed form was used).
    pub terms_used: usize,
    /// Upper bound on the modulus of the truncated tail.
    pub tail_bound: f64,
}

/// Deformed exponential `e_q(x) = sum_n x^n / [n]_q!` at the default
/// tolerance.
pub fn q_exp(x: Complex64, q: DeformationParameter) -> Result<QExpResult> {
    q_exp_tol(x, q, DEFAULT_TOLERANCE)
}

/// Deformed exponential with an explicit relative tolerance.
///
/// The series converges for `|x| < 1/(1-q)`; arguments outside
/// [`DOMAIN_MARGIN`] times that radius are rejected with a domain error.
/// Truncation uses the fact that the term ratio `|x| / [n]_q` decreases in
/// `n`, giving a geometric bound on the remainder.
pub fn q_exp_tol(x: Complex64, q: DeformationParameter, tol: f64) -> Result<QExpResult> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    check_domain("deformed exponential", x.norm(), q)?;
    if q.is_classical() {
        return Ok(QExpResult {
            value: x.exp(),
            terms_used: 1,
            tail_bound: 0.0,
        });
    }
    if x == Complex64::new(0.0, 0.0) {
        return Ok(QExpResult {
            value: Complex64::new(1.0, 0.0),
            terms_used: 1,
            tail_bound: 0.0,
        });
    }

    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut tail_bound = f64::INFINITY;
    for n in 1..MAX_TERMS {
        term *= x / q_number(n as u32, q);
        sum += term;
        let ratio_next = x.norm() / q_number(n as u32 + 1, q);
        if ratio_next < 1.0 {
            tail_bound = term.norm() * ratio_next / (1.0 - ratio_next);
            if tail_bound <= tol * sum.norm() {
                return Ok(QExpResult {
                    value: sum,
                    terms_used: n + 1,
                    tail_bound,
                });
            }
        }
    }
    Err(Error::NonConvergence {
        terms: MAX_TERMS,
        tail_bound,
        tol,
    })
}
