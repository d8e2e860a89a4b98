//! Closed-form matrix elements of the measured pointer state.
//!
//! The post-measurement pointer is proportional to `(1 + k a' - k a) |z>`
//! with a complex coupling `k`. Every statistic the crate reports reduces
//! to quadratic forms of that state, which expand into four coherent-state
//! matrix elements per operator `O`:
//!
//! ```text
//! <u| O |u> = T00 + k T01 + conj(k) T10 + |k|^2 T11
//! T00 = <z| O |z>            T01 = <z| O (a' - a) |z>
//! T10 = <z| (a - a') O |z>   T11 = <z| (a - a') O (a' - a) |z>
//! ```
//!
//! The polynomials below were obtained by normal ordering with the rule
//! `a a'^m = [m]_q a'^(m-1) + q^m a'^m a` and then evaluating
//! `<z| a'^r a^s |z> = conj(z)^r z^s`. Each set is validated against dense
//! matrix arithmetic in the tests.

use num_complex::Complex64;

/// `[T00, T01, T10, T11]` for the identity.
pub(crate) fn b_parts(z: Complex64, q: f64) -> [Complex64; 4] {
    let zb = z.conj();
    let z2 = z * z;
    let zb2 = zb * zb;
    let m = z.norm_sqr();
    [
        Complex64::new(1.0, 0.0),
        zb - z,
        z - zb,
        Complex64::new(1.0 + (1.0 + q) * m, 0.0) - z2 - zb2,
    ]
}

/// Parts for the lowering operator `a`.
pub(crate) fn a1_parts(z: Complex64, q: f64) -> [Complex64; 4] {
    let zb = z.conj();
    let z2 = z * z;
    let m = z.norm_sqr();
    [
        z,
        Complex64::new(1.0 + q * m, 0.0) - z2,
        z2 - Complex64::new(m, 0.0),
        z.scale(1.0 + q) - zb - z2 * z + (z.scale(1.0 + q * q) - zb.scale(q)).scale(m),
    ]
}

/// Parts for `a^2`.
pub(crate) fn a2_parts(z: Complex64, q: f64) -> [Complex64; 4] {
    let z2 = z * z;
    let m = z.norm_sqr();
    let q2 = q * q;
    let q3 = q2 * q;
    [
        z2,
        z.scale(1.0 + q) - z2 * z + z.scale(q2 * m),
        z2 * z - z.scale(m),
        z2.scale(1.0 + q + q2) - z2 * z2 - Complex64::new((1.0 + q) * m + q2 * m * m, 0.0)
            + z2.scale((1.0 + q3) * m),
    ]
}

/// Parts for the number-like product `a' a`.
pub(crate) fn b1_parts(z: Complex64, q: f64) -> [Complex64; 4] {
    let zb = z.conj();
    let z2 = z * z;
    let zb2 = zb * zb;
    let m = z.norm_sqr();
    let q2 = q * q;
    let q3 = q2 * q;
    [
        Complex64::new(m, 0.0),
        zb + (zb.scale(q) - z).scale(m),
        z + (z.scale(q) - zb).scale(m),
        Complex64::new(1.0, 0.0) - z2 - zb2
            + (Complex64::new(q2 + 2.0 * q, 0.0) - (z2 + zb2).scale(q)).scale(m)
            + Complex64::new((1.0 + q3) * m * m, 0.0),
    ]
}

/// Parts for `(a' a)^2`.
pub(crate) fn b2_parts(z: Complex64, q: f64) -> [Complex64; 4] {
    let zb = z.conj();
    let z2 = z * z;
    let zb2 = zb * zb;
    let s = z2 + zb2;
    let m = z.norm_sqr();
    let q2 = q * q;
    let q3 = q2 * q;
    let q4 = q3 * q;
    let q5 = q4 * q;
    let q6 = q5 * q;
    [
        Complex64::new(m + q * m * m, 0.0),
        zb + (zb.scale(q2 + 2.0 * q) - z).scale(m) + (zb.scale(q3) - z.scale(q)).scale(m * m),
        z + (z.scale(q2 + 2.0 * q) - zb).scale(m) + (z.scale(q3) - zb.scale(q)).scale(m * m),
        Complex64::new(1.0, 0.0) - z2 - zb2
            + (Complex64::new(q3 + 3.0 * q2 + 3.0 * q, 0.0) - s.scale(q2 + 2.0 * q)).scale(m)
            + (Complex64::new(q5 + 2.0 * q4 + 3.0 * q3 + 1.0, 0.0) - s.scale(q3)).scale(m * m)
            + Complex64::new((q6 + q) * m * m * m, 0.0),
    ]
}

/// Parts for the two-photon product `a'^2 a^2`.
pub(crate) fn g2_parts(z: Complex64, q: f64) -> [Complex64; 4] {
    let zb = z.conj();
    let z2 = z * z;
    let zb2 = zb * zb;
    let s = z2 + zb2;
    let m = z.norm_sqr();
    let q2 = q * q;
    let q3 = q2 * q;
    let q4 = q3 * q;
    let q5 = q4 * q;
    [
        Complex64::new(m * m, 0.0),
        zb.scale((1.0 + q) * m) + (zb.scale(q2) - z).scale(m * m),
        z.scale((1.0 + q) * m) + (z.scale(q2) - zb).scale(m * m),
        (Complex64::new((1.0 + q) * (1.0 + q), 0.0) - s.scale(1.0 + q)).scale(m)
            + (Complex64::new(q4 + 2.0 * q3 + 2.0 * q2, 0.0) - s.scale(q2)).scale(m * m)
            + Complex64::new((1.0 + q5) * m * m * m, 0.0),
    ]
}

/// Assembles the quadratic form from its four parts and a coupling.
pub(crate) fn u_bracket(parts: &[Complex64; 4], k: Complex64) -> Complex64 {
    parts[0] + k * parts[1] + k.conj() * parts[2] + parts[3].scale(k.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::{
        build_annihilator, build_creation, coherent_vector, DimPolicy,
    };
    use crate::qspecial::DeformationParameter;
    use nalgebra::DMatrix;

    // Numeric T parts from dense matrices: the independent check that the
    // normal-ordered polynomials are transcribed correctly.
    fn matrix_parts(
        op: &DMatrix<Complex64>,
        z: Complex64,
        q: DeformationParameter,
    ) -> [Complex64; 4] {
        let policy = DimPolicy {
            start: 64,
            max: 256,
            tail_target: 1e-14,
        };
        let v = coherent_vector(z, q, &policy).unwrap();
        let dim = v.dim();
        let a = build_annihilator(q, dim).unwrap().matrix;
        let ad = build_creation(q, dim).unwrap().matrix;
        let d = &ad - &a;
        let dv = &d * &v.coeffs;
        let t00 = v.coeffs.dotc(&(op * &v.coeffs));
        let t01 = v.coeffs.dotc(&(op * &dv));
        let t10 = dv.dotc(&(op * &v.coeffs));
        let t11 = dv.dotc(&(op * &dv));
        [t00, t01, t10, t11]
    }

    fn check(closed: [Complex64; 4], numeric: [Complex64; 4], label: &str) {
        for (i, (c, n)) in closed.iter().zip(numeric.iter()).enumerate() {
            let scale = c.norm().max(n.norm()).max(1.0);
            assert!(
                (c - n).norm() / scale < 1e-12,
                "{label} part {i}: closed {c} vs numeric {n}"
            );
        }
    }

    #[test]
    fn polynomials_match_matrix_arithmetic() {
        let cases = [
            (Complex64::new(0.7, 0.4), 0.4),
            (Complex64::new(-0.9, 0.55), 0.85),
            (Complex64::new(0.3, -1.1), 0.65),
            (Complex64::new(1.2, 0.1), 1.0),
        ];
        for (z, qe) in cases {
            let q = DeformationParameter::new(qe).unwrap();
            let policy = DimPolicy {
                start: 64,
                max: 256,
                tail_target: 1e-14,
            };
            let dim = coherent_vector(z, q, &policy).unwrap().dim();
            let a = build_annihilator(q, dim).unwrap().matrix;
            let ad = build_creation(q, dim).unwrap().matrix;
            let ident = DMatrix::<Complex64>::identity(dim, dim);
            let n_op = &ad * &a;

            check(b_parts(z, qe), matrix_parts(&ident, z, q), "identity");
            check(a1_parts(z, qe), matrix_parts(&a, z, q), "a");
            check(a2_parts(z, qe), matrix_parts(&(&a * &a), z, q), "a^2");
            check(b1_parts(z, qe), matrix_parts(&n_op, z, q), "a'a");
            check(b2_parts(z, qe), matrix_parts(&(&n_op * &n_op), z, q), "(a'a)^2");
            check(
                g2_parts(z, qe),
                matrix_parts(&(&ad * &ad * &a * &a), z, q),
                "a'^2 a^2",
            );
        }
    }

    #[test]
    fn assembled_bracket_matches_displaced_vector() {
        let z = Complex64::new(0.8, -0.3);
        let qe = 0.7;
        let q = DeformationParameter::new(qe).unwrap();
        let k = Complex64::new(0.23, 0.41);
        let policy = DimPolicy {
            start: 64,
            max: 256,
            tail_target: 1e-14,
        };
        let v = coherent_vector(z, q, &policy).unwrap();
        let dim = v.dim();
        let a = build_annihilator(q, dim).unwrap().matrix;
        let ad = build_creation(q, dim).unwrap().matrix;
        let u = &v.coeffs + (&ad - &a) * &v.coeffs * k;
        let n_op = &ad * &a;

        let got = u_bracket(&b1_parts(z, qe), k);
        let want = u.dotc(&(&n_op * &u));
        assert!((got - want).norm() < 1e-12 * want.norm().max(1.0));

        let got = u_bracket(&b_parts(z, qe), k);
        let want = u.dotc(&u);
        assert!((got - want).norm() < 1e-12 * want.norm().max(1.0));
    }
}
