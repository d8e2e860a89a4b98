//! Photon statistics and quadrature moments of the conditioned pointer.
//!
//! All quantities come in two independent flavors: closed forms assembled
//! from the bracket polynomials, and dense matrix mechanics on the pointer
//! vector. The closed forms are what the crate reports; the matrix values
//! ride along as `oracle_deltas` so every number carries its own
//! cross-check.

use num_complex::Complex64;

use crate::brackets::{a1_parts, a2_parts, b1_parts, b2_parts, b_parts, g2_parts, u_bracket};
use crate::error::{Error, Result};
use crate::fockspace::{build_annihilator, build_creation};
use crate::qspecial::{q_exp, q_number};
use crate::weakmeas::{pointer_unnormalized, weak_value, MeasurementConfig};
use crate::{rel_delta, rel_delta_c};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Mean photon number below which intensity ratios are ruled undefined.
const MEAN_PHOTON_FLOOR: f64 = 1e-14;

struct ClosedBrackets {
    q: f64,
    k: Complex64,
    /// norm bracket
    b: f64,
    /// first moment bracket `<u| a'a |u>`
    b1: f64,
    /// second moment bracket `<u| (a'a)^2 |u>`
    b2: f64,
    /// two-photon bracket `<u| a'^2 a^2 |u>`
    g2: f64,
    a1: Complex64,
    a2: Complex64,
}

fn closed_brackets(config: &MeasurementConfig) -> Result<ClosedBrackets> {
    let aw = weak_value(config)?.value;
    let k = config.coupling(aw);
    let z = config.z_c();
    let q = config.q.value();
    Ok(ClosedBrackets {
        q,
        k,
        b: u_bracket(&b_parts(z, q), k).re,
        b1: u_bracket(&b1_parts(z, q), k).re,
        b2: u_bracket(&b2_parts(z, q), k).re,
        g2: u_bracket(&g2_parts(z, q), k).re,
        a1: u_bracket(&a1_parts(z, q), k),
        a2: u_bracket(&a2_parts(z, q), k),
    })
}

impl ClosedBrackets {
    fn mean_photon(&self) -> f64 {
        self.b1 / self.b
    }

    fn mandel(&self) -> Result<f64> {
        let m1 = self.mean_photon();
        if m1 <= MEAN_PHOTON_FLOOR {
            return Err(Error::ZeroMeanPhoton);
        }
        Ok((self.b2 / self.b - m1 * m1) / m1 - 1.0)
    }

    fn g2_zero(&self) -> Result<f64> {
        let m1 = self.mean_photon();
        if m1 <= MEAN_PHOTON_FLOOR {
            return Err(Error::ZeroMeanPhoton);
        }
        Ok(self.g2 / self.b / (m1 * m1))
    }

    fn moments(&self) -> QuadratureMoments {
        let b = self.b;
        let mean_x = SQRT_2 * self.a1.re / b;
        let mean_p = SQRT_2 * self.a1.im / b;
        let x2 = (2.0 * self.a2.re + (1.0 + self.q) * self.b1 + b) / (2.0 * b);
        let p2 = (-2.0 * self.a2.re + (1.0 + self.q) * self.b1 + b) / (2.0 * b);
        let var_x = clamp_variance(x2 - mean_x * mean_x);
        let var_p = clamp_variance(p2 - mean_p * mean_p);
        let cross_xp = Complex64::new(
            self.a2.im / b,
            (b - (1.0 - self.q) * self.b1) / (2.0 * b),
        );
        let commutator_expect = Complex64::new(0.0, 1.0 - (1.0 - self.q) * self.b1 / b);
        let half_comm = 0.5 * commutator_expect.norm();
        // Dead band keeps the flag stable when a variance sits exactly on
        // the bound, as it does for an uncoupled pointer.
        let margin = 1e-10 * half_comm.max(1.0);
        QuadratureMoments {
            mean_x,
            mean_p,
            var_x,
            var_p,
            cross_xp,
            commutator_expect,
            squeezed_x: var_x < half_comm - margin,
            squeezed_p: var_p < half_comm - margin,
        }
    }
}

fn clamp_variance(v: f64) -> f64 {
    if v < -1e-12 {
        log::warn!("variance {v:.3e} is negative beyond rounding; clamping to 0");
    }
    v.max(0.0)
}

/// Number-basis probabilities of the conditioned pointer.
#[derive(Debug, Clone)]
pub struct PhotonDistribution {
    /// `probs[n]` is the probability of finding `n` quanta; the vector
    /// covers the whole adaptive truncation, so it sums to 1 within the
    /// truncation tail.
    pub probs: Vec<f64>,
    /// Pointwise deviation from the dense matrix evaluation, aligned with
    /// `probs`.
    pub deltas: Vec<f64>,
    /// Largest entry of `deltas`.
    pub cross_check_delta: f64,
}

impl PhotonDistribution {
    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }
}

/// Closed-form photon distribution
/// `p_n = |t_n (1 - k z) + k sqrt([n]_q) t_{n-1}|^2 / (B e_q(|z|^2))`
/// with `t_n = z^n / sqrt([n]_q!)`, cross-checked against the squared
/// coefficients of the dense pointer vector.
pub fn photon_distribution(config: &MeasurementConfig) -> Result<PhotonDistribution> {
    let cb = closed_brackets(config)?;
    let z = config.z_c();
    let u = pointer_unnormalized(z, config.q, cb.k, config.dim_policy())?;
    let nsq = u.norm_sq();
    let e = q_exp(Complex64::new(z.norm_sqr(), 0.0), config.q)?.value.re;
    let scale = 1.0 / (cb.b * e);
    let front = Complex64::new(1.0, 0.0) - cb.k * z;

    let mut probs = Vec::with_capacity(u.dim());
    let mut deltas = Vec::with_capacity(u.dim());
    let mut t_prev = Complex64::new(0.0, 0.0);
    let mut t = Complex64::new(1.0, 0.0);
    for n in 0..u.dim() {
        if n > 0 {
            let root = q_number(n as u32, config.q).sqrt();
            let t_next = t * z / root;
            t_prev = t;
            t = t_next;
        }
        let amp = if n == 0 {
            front
        } else {
            t * front + cb.k * t_prev * q_number(n as u32, config.q).sqrt()
        };
        let p = (amp.norm_sqr() * scale).max(0.0);
        let matrix_p = u.coeffs[n].norm_sqr() / nsq;
        probs.push(p);
        deltas.push((p - matrix_p).abs());
    }
    let cross_check_delta = deltas.iter().copied().fold(0.0, f64::max);
    if cross_check_delta > 1e-10 {
        log::warn!(
            "photon distribution deviates from the matrix pointer by {cross_check_delta:.3e}"
        );
    }
    Ok(PhotonDistribution {
        probs,
        deltas,
        cross_check_delta,
    })
}

/// Mean photon number of the conditioned pointer.
pub fn mean_photon(config: &MeasurementConfig) -> Result<f64> {
    Ok(closed_brackets(config)?.mean_photon())
}

/// Mandel parameter `(<n^2> - <n>^2)/<n> - 1`; negative values mean
/// sub-Poissonian statistics. Fails with [`Error::ZeroMeanPhoton`] when
/// the pointer carries no quanta.
pub fn mandel_q(config: &MeasurementConfig) -> Result<f64> {
    closed_brackets(config)?.mandel()
}

/// Equal-time second-order coherence `<a'^2 a^2> / <a'a>^2`; below 1 means
/// antibunching.
pub fn g2_zero(config: &MeasurementConfig) -> Result<f64> {
    closed_brackets(config)?.g2_zero()
}

/// First and second moments of `X = (a'+a)/sqrt(2)` and
/// `P = i(a'-a)/sqrt(2)` in the conditioned pointer.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureMoments {
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `<XP>`; its imaginary part is half the commutator expectation.
    pub cross_xp: Complex64,
    /// `<[X, P]>`, purely imaginary; deformation shrinks it below `i`.
    pub commutator_expect: Complex64,
    /// Variance below half the commutator modulus by more than a small
    /// dead band, so boundary states never flap.
    pub squeezed_x: bool,
    pub squeezed_p: bool,
}

/// Closed-form quadrature moments of the conditioned pointer.
pub fn quadrature_moments(config: &MeasurementConfig) -> Result<QuadratureMoments> {
    Ok(closed_brackets(config)?.moments())
}

/// Relative distances between the closed forms and the dense matrix
/// evaluation, one entry per reported quantity.
#[derive(Debug, Clone, Copy)]
pub struct OracleDeltas {
    pub mean_photon: f64,
    pub mandel_q: f64,
    pub g2_zero: f64,
    pub distribution: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub cross_xp: f64,
    pub commutator: f64,
}

impl OracleDeltas {
    pub fn max_delta(&self) -> f64 {
        [
            self.mean_photon,
            self.mandel_q,
            self.g2_zero,
            self.distribution,
            self.mean_x,
            self.mean_p,
            self.var_x,
            self.var_p,
            self.cross_xp,
            self.commutator,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Everything at once: intensity statistics, distribution, quadrature
/// moments, and the cross-check deltas.
#[derive(Debug, Clone)]
pub struct StatisticsReport {
    pub mean_photon: f64,
    pub mandel_q: f64,
    pub g2_zero: f64,
    pub distribution: PhotonDistribution,
    pub moments: QuadratureMoments,
    pub oracle_deltas: OracleDeltas,
}

/// Computes the full closed-form report and re-derives every quantity from
/// the dense pointer vector. Disagreements beyond `1e-8` are logged.
pub fn statistics_report(config: &MeasurementConfig) -> Result<StatisticsReport> {
    let cb = closed_brackets(config)?;
    let mean = cb.mean_photon();
    let mandel = cb.mandel()?;
    let g2 = cb.g2_zero()?;
    let moments = cb.moments();
    let distribution = photon_distribution(config)?;

    // Matrix side: one pointer vector, raising and lowering matrices, and
    // norms of applied vectors.
    let u = pointer_unnormalized(config.z_c(), config.q, cb.k, config.dim_policy())?;
    let nsq = u.norm_sq();
    let a = build_annihilator(config.q, u.dim())?.matrix;
    let ad = build_creation(config.q, u.dim())?.matrix;
    let au = &a * &u.coeffs;
    let adu = &ad * &u.coeffs;
    let nu = &ad * &au;
    let aau = &a * &au;

    let mean_o = au.norm_squared() / nsq;
    let n2_o = nu.norm_squared() / nsq;
    let two_photon_o = aau.norm_squared() / nsq;
    let mandel_o = (n2_o - mean_o * mean_o) / mean_o - 1.0;
    let g2_o = two_photon_o / (mean_o * mean_o);

    let inv_sqrt2 = Complex64::new(1.0 / SQRT_2, 0.0);
    let xu = (&adu + &au) * inv_sqrt2;
    let pu = (&adu - &au) * (inv_sqrt2 * Complex64::new(0.0, 1.0));
    let mean_x_o = u.coeffs.dotc(&xu).re / nsq;
    let mean_p_o = u.coeffs.dotc(&pu).re / nsq;
    let var_x_o = xu.norm_squared() / nsq - mean_x_o * mean_x_o;
    let var_p_o = pu.norm_squared() / nsq - mean_p_o * mean_p_o;
    let xp_o = xu.dotc(&pu) / nsq;
    let comm_o = xp_o - xp_o.conj();

    let oracle_deltas = OracleDeltas {
        mean_photon: rel_delta(mean, mean_o),
        mandel_q: rel_delta(mandel, mandel_o),
        g2_zero: rel_delta(g2, g2_o),
        distribution: distribution.cross_check_delta,
        mean_x: rel_delta(moments.mean_x, mean_x_o),
        mean_p: rel_delta(moments.mean_p, mean_p_o),
        var_x: rel_delta(moments.var_x, var_x_o),
        var_p: rel_delta(moments.var_p, var_p_o),
        cross_xp: rel_delta_c(moments.cross_xp, xp_o),
        commutator: rel_delta_c(moments.commutator_expect, comm_o),
    };
    let worst = oracle_deltas.max_delta();
    if worst > 1e-8 {
        log::warn!("closed forms deviate from matrix mechanics by {worst:.3e}");
    }
    Ok(StatisticsReport {
        mean_photon: mean,
        mandel_q: mandel,
        g2_zero: g2,
        distribution,
        moments,
        oracle_deltas,
    })
}
