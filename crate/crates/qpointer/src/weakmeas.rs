//! Pre- and post-selected weak measurement with a deformed coherent
//! pointer.
//!
//! The system is prepared in a coherent state `|alpha>`, coupled weakly
//! (strength `g`) to a pointer prepared in `|z>`, and post-selected onto
//! `|beta>`. Conditioning leaves the pointer in
//!
//! ```text
//! |Phi> = N <beta|alpha> (1 + k a' - k a) |z>,   k = g A_w / sqrt(2)
//! ```
//!
//! where `A_w` is the weak value of the measured quadrature. This module
//! computes weak values, the overlap of the selection states, the real
//! normalization factor `N`, and the conditioned pointer vector itself.

use num_complex::Complex64;

use crate::brackets::{b_parts, u_bracket};
use crate::error::{Error, Result};
use crate::fockspace::{
    apply, build_annihilator, build_creation, build_quadratures, coherent_vector, expectation,
    DimPolicy, FockVector,
};
use crate::qspecial::{check_domain, q_exp, DeformationParameter};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Polar label `modulus * exp(i phase)` for a coherent-state amplitude.
/// The phase is stored normalized to `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    modulus: f64,
    phase: f64,
}

impl CoherentLabel {
    pub fn new(modulus: f64, phase: f64) -> Result<Self> {
        if !modulus.is_finite() || modulus < 0.0 {
            return Err(Error::Config(format!(
                "coherent amplitude modulus must be finite and non-negative, got {modulus}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::Config(format!("coherent phase must be finite, got {phase}")));
        }
        Ok(CoherentLabel {
            modulus,
            phase: phase.rem_euclid(std::f64::consts::TAU),
        })
    }

    pub fn from_complex(c: Complex64) -> Self {
        CoherentLabel {
            modulus: c.norm(),
            phase: c.arg().rem_euclid(std::f64::consts::TAU),
        }
    }

    pub fn modulus(self) -> f64 {
        self.modulus
    }

    pub fn phase(self) -> f64 {
        self.phase
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }
}

/// Which pointer quadrature is weakly coupled to the system.
///
/// `X1 = (a' + a)/sqrt(2)` is symmetric; `X2 = (q^{n/2} a' + a q^{n/2})/sqrt(2)`
/// carries the deformation and collapses onto `X1` at `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    X1,
    X2,
}

impl Observable {
    pub fn as_str(self) -> &'static str {
        match self {
            Observable::X1 => "x1",
            Observable::X2 => "x2",
        }
    }
}

impl std::str::FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x1" => Ok(Observable::X1),
            "x2" => Ok(Observable::X2),
            other => Err(Error::Config(format!(
                "unknown observable '{other}' (expected x1 or x2)"
            ))),
        }
    }
}

/// Full parameter set of one conditioned measurement.
#[derive(Debug, Clone)]
pub struct MeasurementConfig {
    pub q: DeformationParameter,
    pub g: f64,
    pub z: CoherentLabel,
    pub alpha: CoherentLabel,
    pub beta: CoherentLabel,
    pub observable: Observable,
    dim_policy: DimPolicy,
}

impl MeasurementConfig {
    /// Validates the coupling strength, the pointer amplitude, and (for the
    /// deformed quadrature) the selection product that enters its weak
    /// value. Selection moduli themselves are only constrained by the
    /// operations that genuinely need normalizable selection states.
    pub fn new(
        q: DeformationParameter,
        g: f64,
        z: CoherentLabel,
        alpha: CoherentLabel,
        beta: CoherentLabel,
        observable: Observable,
    ) -> Result<Self> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::Config(format!(
                "coupling strength must be finite and non-negative, got {g}"
            )));
        }
        check_domain("pointer amplitude", z.modulus() * z.modulus(), q)?;
        if observable == Observable::X2 {
            check_domain("selection product", alpha.modulus() * beta.modulus(), q)?;
        }
        Ok(MeasurementConfig {
            q,
            g,
            z,
            alpha,
            beta,
            observable,
            dim_policy: DimPolicy::default(),
        })
    }

    pub fn with_dim_policy(mut self, policy: DimPolicy) -> Self {
        self.dim_policy = policy;
        self
    }

    pub fn dim_policy(&self) -> &DimPolicy {
        &self.dim_policy
    }

    pub fn z_c(&self) -> Complex64 {
        self.z.to_complex()
    }

    pub fn alpha_c(&self) -> Complex64 {
        self.alpha.to_complex()
    }

    pub fn beta_c(&self) -> Complex64 {
        self.beta.to_complex()
    }

    /// Pointer coupling `k = g A_w / sqrt(2)`.
    pub(crate) fn coupling(&self, aw: Complex64) -> Complex64 {
        aw.scale(self.g / SQRT_2)
    }
}

/// A weak value together with a flag marking nearly orthogonal selection
/// (overlap modulus below `1e-12`), where weak values lose their
/// interpretation as a gentle average.
#[derive(Debug, Clone, Copy)]
pub struct WeakValue {
    pub value: Complex64,
    pub anomalous: bool,
}

/// Overlap `<beta|alpha> = e_q(conj(beta) alpha) /
/// sqrt(e_q(|alpha|^2) e_q(|beta|^2))` of two deformed coherent states.
pub fn fidelity(
    alpha: CoherentLabel,
    beta: CoherentLabel,
    q: DeformationParameter,
) -> Result<Complex64> {
    check_domain("first selection amplitude", alpha.modulus() * alpha.modulus(), q)?;
    check_domain("second selection amplitude", beta.modulus() * beta.modulus(), q)?;
    check_domain("selection product", alpha.modulus() * beta.modulus(), q)?;
    let cross = q_exp(beta.to_complex().conj() * alpha.to_complex(), q)?.value;
    let na = q_exp(Complex64::new(alpha.modulus() * alpha.modulus(), 0.0), q)?.value.re;
    let nb = q_exp(Complex64::new(beta.modulus() * beta.modulus(), 0.0), q)?.value.re;
    let fid = cross / (na * nb).sqrt();
    if fid.norm() > 1.0 + 1e-10 {
        log::warn!("selection overlap modulus {:.3e} exceeds 1", fid.norm());
    }
    Ok(fid)
}

/// Weak value of the symmetric quadrature, `(alpha + conj(beta)) / sqrt(2)`.
/// Independent of the deformation.
pub fn weak_value_x1(alpha: CoherentLabel, beta: CoherentLabel) -> WeakValue {
    WeakValue {
        value: (alpha.to_complex() + beta.to_complex().conj()).scale(1.0 / SQRT_2),
        anomalous: false,
    }
}

/// Weak value of the deformed quadrature,
/// `sqrt(q) (alpha + conj(beta)) / sqrt(2) * e_q(sqrt(q) w) / e_q(w)` with
/// `w = conj(beta) alpha`. Reduces to the symmetric one at `q = 1`.
pub fn weak_value_x2(
    alpha: CoherentLabel,
    beta: CoherentLabel,
    q: DeformationParameter,
) -> Result<WeakValue> {
    check_domain("selection product", alpha.modulus() * beta.modulus(), q)?;
    let w = beta.to_complex().conj() * alpha.to_complex();
    let num = q_exp(w.scale(q.value().sqrt()), q)?.value;
    let den = q_exp(w, q)?.value;
    let value = (alpha.to_complex() + beta.to_complex().conj())
        .scale(q.value().sqrt() / SQRT_2)
        * num
        / den;
    Ok(WeakValue {
        value,
        anomalous: false,
    })
}

/// Weak value of the configured observable, with the anomalous-selection
/// flag filled in whenever the overlap itself is computable.
pub fn weak_value(config: &MeasurementConfig) -> Result<WeakValue> {
    let mut wv = match config.observable {
        Observable::X1 => weak_value_x1(config.alpha, config.beta),
        Observable::X2 => weak_value_x2(config.alpha, config.beta, config.q)?,
    };
    let a2 = config.alpha.modulus() * config.alpha.modulus();
    let b2 = config.beta.modulus() * config.beta.modulus();
    let ab = config.alpha.modulus() * config.beta.modulus();
    if config.q.admits(a2) && config.q.admits(b2) && config.q.admits(ab) {
        wv.anomalous = fidelity(config.alpha, config.beta, config.q)?.norm() < 1e-12;
    } else {
        log::debug!("selection states not normalizable; anomalous flag left unset");
    }
    Ok(wv)
}

/// Coherent-state mean of the deformed quadrature, `<z|X2|z>`, evaluated by
/// dense matrix arithmetic. Serves as the eigenvalue-scale baseline that
/// weak values are compared against.
pub fn eigenvalue_scale(
    z: CoherentLabel,
    q: DeformationParameter,
    policy: &DimPolicy,
) -> Result<f64> {
    let v = coherent_vector(z.to_complex(), q, policy)?;
    let (_, x2, _) = build_quadratures(q, v.dim())?;
    Ok(expectation(&x2, &v)?.re)
}

/// Norm bracket `<z|(1 + conj(k)(a - a'))(1 + k(a' - a))|z>` of the
/// unnormalized conditioned pointer. Strictly positive in exact
/// arithmetic.
pub(crate) fn norm_bracket(config: &MeasurementConfig, k: Complex64) -> f64 {
    u_bracket(&b_parts(config.z_c(), config.q.value()), k).re
}

/// Unnormalized conditioned pointer `(1 + k a' - k a)|z>` as a basis
/// vector, with two extra rows of headroom so the raising operator does
/// not clip.
pub(crate) fn pointer_unnormalized(
    z: Complex64,
    q: DeformationParameter,
    k: Complex64,
    policy: &DimPolicy,
) -> Result<FockVector> {
    let v = coherent_vector(z, q, policy)?;
    let dim = v.dim() + 2;
    let padded = crate::fockspace::padded(&v, dim)?;
    let a = build_annihilator(q, dim)?;
    let ad = build_creation(q, dim)?;
    let raised = apply(&ad, &padded)?;
    let lowered = apply(&a, &padded)?;
    let mut u = padded;
    for n in 0..dim {
        u.coeffs[n] += k * (raised.coeffs[n] - lowered.coeffs[n]);
    }
    Ok(u)
}

/// Outcome of [`normalization_check`]: the closed-form factor, the one
/// recomputed from the dense pointer vector, and their relative distance.
#[derive(Debug, Clone, Copy)]
pub struct NormalizationCheck {
    pub closed: f64,
    pub oracle: f64,
    pub rel_delta: f64,
}

/// Real normalization factor `N` of the conditioned pointer, from the
/// closed-form norm bracket. The matrix-mechanics value is computed
/// alongside and logged if it disagrees beyond `1e-8`.
pub fn normalization(config: &MeasurementConfig, aw: Complex64) -> Result<f64> {
    let check = normalization_check(config, aw)?;
    if check.rel_delta > 1e-8 {
        log::warn!(
            "normalization bracket disagrees with matrix value: closed {:.12e}, matrix {:.12e}",
            check.closed,
            check.oracle
        );
    } else {
        log::debug!("normalization cross-check delta {:.3e}", check.rel_delta);
    }
    Ok(check.closed)
}

/// As [`normalization`], but returns both values and their relative delta
/// instead of logging.
pub fn normalization_check(config: &MeasurementConfig, aw: Complex64) -> Result<NormalizationCheck> {
    let k = config.coupling(aw);
    let bracket = norm_bracket(config, k);
    if bracket <= 0.0 {
        return Err(Error::NonPositiveNorm { value: bracket });
    }
    let overlap = fidelity(config.alpha, config.beta, config.q)?.norm();
    if overlap == 0.0 {
        return Err(Error::NonPositiveNorm { value: 0.0 });
    }
    let closed = 1.0 / (overlap * bracket.sqrt());
    let u = pointer_unnormalized(config.z_c(), config.q, k, &config.dim_policy)?;
    let oracle = 1.0 / (overlap * u.norm_sq().sqrt());
    Ok(NormalizationCheck {
        closed,
        oracle,
        rel_delta: crate::rel_delta(closed, oracle),
    })
}

/// Normalized conditioned pointer state, including the overlap phase of
/// the selection. With `g = 0` this is the initial coherent state times a
/// global phase.
pub fn pointer_state(config: &MeasurementConfig, aw: Complex64) -> Result<FockVector> {
    let k = config.coupling(aw);
    let mut u = pointer_unnormalized(config.z_c(), config.q, k, &config.dim_policy)?;
    let norm = u.norm_sq().sqrt();
    if !(norm > 0.0) {
        return Err(Error::NonPositiveNorm { value: norm });
    }
    let phase = fidelity(config.alpha, config.beta, config.q)?.arg();
    let rot = Complex64::from_polar(1.0 / norm, phase);
    for n in 0..u.dim() {
        u.coeffs[n] *= rot;
    }
    Ok(u)
}
