//! Scalar special functions: log-Gamma, Beta, Bessel J of real order,
//! orthonormal Jacobi polynomials for the weight (1-x^2)^alpha, and the
//! sinc-type kernel K_alpha that generates the concentration operator.

use crate::error::{Error, Result};

/// ln(pi)
const LN_PI: f64 = 1.1447298858494002;
/// ln(2 sqrt(e/pi))
const LN_2_SQRT_E_OVER_PI: f64 = 0.6207822376352452;

/// Lanczos coefficients for the log-Gamma approximation (Pugh's thesis, g = 10.900511).
const GAMMA_DK: &[f64] = &[
    2.4857408913875355e-5,
    1.0514237858172197,
    -3.4568709722201625,
    4.512277094668948,
    -2.9828522532357664,
    1.056397115771267,
    -1.9542877319164587e-1,
    1.709705434044412e-2,
    -5.719261174043057e-4,
    4.633994733599057e-6,
    -2.7199490848860772e-9,
];

const GAMMA_R: f64 = 10.900511;

pub(crate) fn ln_gamma_raw(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, (i, c)| s + c / (i as f64 - x));
        LN_PI
            - (std::f64::consts::PI * x).sin().ln()
            - s.ln()
            - LN_2_SQRT_E_OVER_PI
            - (0.5 - x) * ((0.5 - x + GAMMA_R) / std::f64::consts::E).ln()
    } else {
        let s = GAMMA_DK
            .iter()
            .enumerate()
            .skip(1)
            .fold(GAMMA_DK[0], |s, (i, c)| s + c / (x + i as f64 - 1.0));
        s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + GAMMA_R) / std::f64::consts::E).ln()
    }
}

/// Natural logarithm of the Gamma function for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_raw(x))
}

/// Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a+b), via log-Gamma.
pub fn beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(Error::Domain(format!(
            "beta requires positive arguments, got ({a}, {b})"
        )));
    }
    Ok((ln_gamma_raw(a) + ln_gamma_raw(b) - ln_gamma_raw(a + b)).exp())
}

/// Total mass of the weight, int_{-1}^{1} (1-x^2)^alpha dx = sqrt(pi) Gamma(a+1)/Gamma(a+3/2).
pub fn weight_mass(alpha: f64) -> f64 {
    debug_assert!(alpha > -1.0);
    std::f64::consts::PI.sqrt() * (ln_gamma_raw(alpha + 1.0) - ln_gamma_raw(alpha + 1.5)).exp()
}

const BESSEL_NU_MAX: f64 = 400.0;
const BESSEL_X_MAX: f64 = 300.0;

/// Bessel function of the first kind J_nu(x) for nu in [0, 400], x in [0, 300].
///
/// Ascending series where it is cancellation-free (x^2 <= 4(nu+1)), a
/// normalized backward (Miller) recurrence otherwise.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if nu < 0.0 || x < 0.0 || !nu.is_finite() || !x.is_finite() {
        return Err(Error::Domain(format!(
            "bessel_j requires nu >= 0 and x >= 0, got ({nu}, {x})"
        )));
    }
    if nu > BESSEL_NU_MAX || x > BESSEL_X_MAX {
        return Err(Error::Range(format!(
            "bessel_j envelope is nu <= {BESSEL_NU_MAX}, x <= {BESSEL_X_MAX}, got ({nu}, {x})"
        )));
    }
    Ok(bessel_j_unchecked(nu, x))
}

pub(crate) fn bessel_j_unchecked(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x * x <= 4.0 * (nu + 1.0) {
        return bessel_series(nu, x);
    }
    let base = nu.fract();
    let idx = nu.trunc() as usize;
    bessel_ladder(base, idx + 1, x)[idx]
}

/// Ascending power series; every term ratio is below 1 in the regime where it
/// is used, so there is no cancellation.
fn bessel_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let lt0 = nu * h.ln() - ln_gamma_raw(nu + 1.0);
    if lt0 < -745.0 {
        return 0.0;
    }
    let t0 = lt0.exp();
    let mut term = t0;
    let mut sum = t0;
    let h2 = h * h;
    for m in 1..500 {
        let m = m as f64;
        term *= -h2 / (m * (nu + m));
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    sum
}

fn envj(n: f64, x: f64) -> f64 {
    0.5 * (6.28 * n).log10() - n * (1.36 * x / n).log10()
}

/// Starting order for the backward recurrence so that `count` orders come out
/// with ~16 significant digits (Zhang & Jin's MSTA2 heuristic).
fn miller_start(x: f64, count: usize) -> usize {
    let n = count.max(1) as f64;
    let hmp = 8.0;
    let ejn = envj(n, x);
    let (obj, mut n0) = if ejn <= hmp {
        (16.0, (1.1 * x).trunc() + 1.0)
    } else {
        (hmp + ejn, n)
    };
    let mut f0 = envj(n0, x) - obj;
    let mut n1 = n0 + 5.0;
    let mut f1 = envj(n1, x) - obj;
    let mut nn = n1;
    for _ in 0..20 {
        nn = n1 - (n1 - n0) / (1.0 - f0 / f1);
        let f = envj(nn, x) - obj;
        if (nn - n1).abs() < 1.0 {
            break;
        }
        n0 = n1;
        f0 = f1;
        n1 = nn;
        f1 = f;
    }
    (nn as usize + 10).max(count + 10)
}

/// J_{nu0 + j}(x) for j = 0..count, with 0 <= nu0 < 1 and x > 0.
///
/// Backward recurrence from above the turning point, normalized by the
/// Gegenbauer-type sum identity
/// (x/2)^nu0 = sum_k (nu0 + 2k) Gamma(nu0 + k)/k! J_{nu0 + 2k}(x),
/// which reduces to J_0 + 2 J_2 + 2 J_4 + ... = 1 for nu0 = 0.
pub(crate) fn bessel_ladder(nu0: f64, count: usize, x: f64) -> Vec<f64> {
    debug_assert!((0.0..1.0).contains(&nu0) && x > 0.0);
    let start = miller_start(x, count);
    let mut f = vec![0.0f64; start + 2];
    f[start + 1] = 0.0;
    f[start] = 1e-160;
    for k in (0..start).rev() {
        let v = 2.0 * (nu0 + k as f64 + 1.0) / x * f[k + 1] - f[k + 2];
        f[k] = v;
        if v.abs() > 1e250 {
            for g in f[k..].iter_mut() {
                *g *= 1e-250;
            }
        }
    }
    // normalization sum over even ladder offsets
    let mut s = 0.0;
    if nu0 < 1e-300 {
        let mut j = 0;
        while 2 * j <= start {
            s += if j == 0 { f[0] } else { 2.0 * f[2 * j] };
            j += 1;
        }
        s = s.recip();
    } else {
        let mut j = 0;
        while 2 * j <= start {
            let c = (nu0 + 2.0 * j as f64)
                * (ln_gamma_raw(nu0 + j as f64) - ln_gamma_raw(j as f64 + 1.0)).exp();
            s += c * f[2 * j];
            j += 1;
        }
        s = (nu0 * (0.5 * x).ln()).exp() / s;
    }
    f.truncate(count);
    for v in f.iter_mut() {
        *v *= s;
    }
    f
}

/// Recurrence coefficient e_j of the orthonormal Jacobi family for (1-x^2)^alpha:
/// x p_{j-1} = e_j p_j + e_{j-1} p_{j-2}.
pub(crate) fn jacobi_recur_e(j: usize, alpha: f64) -> f64 {
    if j == 1 {
        (1.0 / (3.0 + 2.0 * alpha)).sqrt()
    } else {
        let j = j as f64;
        (j * (j + 2.0 * alpha) / ((2.0 * j + 2.0 * alpha + 1.0) * (2.0 * j + 2.0 * alpha - 1.0)))
            .sqrt()
    }
}

/// Values of the orthonormal Jacobi polynomials P~_0 .. P~_{count-1} at x.
pub(crate) fn jacobi_values(count: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let mut pm1 = 0.0;
    let mut p0 = weight_mass(alpha).sqrt().recip();
    out.push(p0);
    let mut e_prev = 0.0;
    for j in 1..count {
        let e_j = jacobi_recur_e(j, alpha);
        let p1 = (x * p0 - e_prev * pm1) / e_j;
        out.push(p1);
        pm1 = p0;
        p0 = p1;
        e_prev = e_j;
    }
    out
}

/// Orthonormal Jacobi polynomial P~_k^{(alpha,alpha)}(x) = P_k^{(alpha,alpha)}(x)/sqrt(h_k),
/// unit-norm in L^2([-1,1], (1-x^2)^alpha).
pub fn jacobi_eval(k: usize, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("jacobi_eval requires alpha > -1, got {alpha}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("jacobi_eval requires |x| <= 1, got {x}")));
    }
    Ok(jacobi_values(k + 1, alpha, x)[k])
}

/// Squared norm h_k = 2^{2a+1} Gamma^2(k+a+1) / (k! (2k+2a+1) Gamma(k+2a+1)) of the
/// classical Jacobi polynomial P_k^{(a,a)} in L^2([-1,1], (1-x^2)^a).
pub fn jacobi_norm_h(k: usize, alpha: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!(
            "jacobi_norm_h requires alpha > -1, got {alpha}"
        )));
    }
    let k = k as f64;
    Ok(((2.0 * alpha + 1.0) * std::f64::consts::LN_2 + 2.0 * ln_gamma_raw(k + alpha + 1.0)
        - ln_gamma_raw(k + 1.0)
        - (2.0 * k + 2.0 * alpha + 1.0).ln()
        - ln_gamma_raw(k + 2.0 * alpha + 1.0))
    .exp())
}

/// Kernel K_alpha(x) = sqrt(pi) 2^{a+1/2} Gamma(a+1) J_{a+1/2}(x) / x^{a+1/2}
/// = int_{-1}^{1} e^{ixy} (1-x^2)^alpha dy; even in x, K_0(x) = 2 sin(x)/x.
pub fn kernel_k(alpha: f64, x: f64) -> f64 {
    debug_assert!(alpha > -1.0);
    let ax = x.abs();
    if ax < 1e-3 {
        // Taylor series of the Fourier integral: removable 0/0 at x = 0.
        let mut sum = 0.0;
        let mut fact = 1.0; // (2m)!
        let mut xp = 1.0; // x^{2m}
        let mut sign = 1.0;
        for m in 0..6usize {
            if m > 0 {
                let t = 2.0 * m as f64;
                fact *= (t - 1.0) * t;
                xp *= ax * ax;
                sign = -sign;
            }
            let b = (ln_gamma_raw(m as f64 + 0.5) + ln_gamma_raw(alpha + 1.0)
                - ln_gamma_raw(m as f64 + alpha + 1.5))
            .exp();
            sum += sign * xp / fact * b;
        }
        return sum;
    }
    let nu = alpha + 0.5;
    let pref = (0.5 * LN_PI + nu * std::f64::consts::LN_2 + ln_gamma_raw(alpha + 1.0)
        - nu * ax.ln())
    .exp();
    pref * bessel_j_unchecked(nu, ax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ::approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(1.0).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            ln_gamma(0.5).unwrap(),
            0.5 * std::f64::consts::PI.ln(),
            max_relative = 1e-13
        );
        assert_relative_eq!(ln_gamma(10.0).unwrap(), 362880.0f64.ln(), max_relative = 1e-13);
        // relative accuracy across the operating interval, against Gamma(x+1) = x Gamma(x)
        let mut x = 1e-3;
        while x < 1e4 {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = x.ln() + ln_gamma(x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13, epsilon = 1e-13);
            x *= 1.7;
        }
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(beta(0.5, 0.5).unwrap(), std::f64::consts::PI, max_relative = 1e-13);
        // frozen from a 50-digit Gamma oracle; equals pi/16
        assert_relative_eq!(beta(1.5, 2.5).unwrap(), 0.1963495408493620774, max_relative = 1e-13);
        assert!(beta(0.0, 1.0).is_err());
        assert!(beta(1.0, -2.0).is_err());
    }

    #[test]
    fn bessel_trivial_and_frozen() {
        assert_eq!(bessel_j(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(2.5, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            bessel_j(0.5, std::f64::consts::FRAC_PI_2).unwrap(),
            2.0 / std::f64::consts::PI,
            max_relative = 1e-12
        );
        // closed form sqrt(2/pi)(sin 1 - cos 1), frozen from a 50-digit series oracle
        assert_relative_eq!(
            bessel_j(1.5, 1.0).unwrap(),
            0.2402978391234270109,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bessel_spot_checks_against_high_precision() {
        // frozen from mpmath at 50 digits; spans series, ladder and seam regimes
        let cases = [
            (100.25, 80.0, 3.8587542882428796997e-6),
            (350.5, 300.0, 1.1379064287217746939e-10),
            (55.5, 250.0, 0.0074259066387086221594),
            (0.75, 299.0, -0.0071928967535852605639),
            (12.5, 12.5, 0.19264627300995895414),
            (37.0, 36.0, 0.098522259730095096479),
            (3.25, 14.0, -0.12636024313362556141),
            (0.0, 300.0, -0.033298554876305668007),
            (20.5, 0.25, 2.7649686941954756899e-38),
            (200.0, 199.0, 0.0646389635767720465),
        ];
        for (nu, x, want) in cases {
            let got = bessel_j(nu, x).unwrap();
            assert_relative_eq!(got, want, max_relative = 1e-10);
        }
    }

    #[test]
    fn bessel_domain_and_envelope() {
        assert!(matches!(bessel_j(-0.5, 1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(1.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(401.0, 1.0), Err(Error::Range(_))));
        assert!(matches!(bessel_j(1.0, 301.0), Err(Error::Range(_))));
    }

    #[test]
    fn bessel_branch_seam_agreement() {
        // On the seam x = 2 sqrt(nu+1) both the series and the ladder apply;
        // they must agree to 1e-10.
        for nu in [0.0, 0.5, 2.25, 7.5, 20.0, 55.5, 150.0] {
            let x = 2.0 * (nu + 1.0f64).sqrt();
            if x > BESSEL_X_MAX {
                continue;
            }
            let series = bessel_series(nu, x);
            let base = nu.fract();
            let idx = nu.trunc() as usize;
            let ladder = bessel_ladder(base, idx + 1, x)[idx];
            assert_relative_eq!(series, ladder, max_relative = 1e-10);
        }
    }

    #[test]
    fn bessel_uniform_bound() {
        // |J_nu(x)| <= x^nu / (2^nu Gamma(nu+1)) pointwise on a grid of the envelope
        let mut checked = 0usize;
        for i in 0..100 {
            let nu = 400.0 * (i as f64 + 0.5) / 100.0;
            for j in 0..100 {
                let x = 300.0 * (j as f64 + 0.5) / 100.0;
                let v = bessel_j(nu, x).unwrap();
                let lb = nu * (0.5 * x).ln() - ln_gamma_raw(nu + 1.0);
                let bound = if lb > 709.0 { f64::INFINITY } else { lb.exp() };
                assert!(
                    v.abs() <= bound * (1.0 + 1e-12) + 1e-300,
                    "bound violated at nu={nu} x={x}: |J|={} bound={bound}",
                    v.abs()
                );
                checked += 1;
            }
        }
        assert_eq!(checked, 10_000);
    }

    #[test]
    fn jacobi_trivial_values() {
        // P~_0 at alpha=0 is 1/sqrt(2)
        assert_relative_eq!(
            jacobi_eval(0, 0.0, 0.3).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-14
        );
        // odd parity of degree 1
        let p = jacobi_eval(1, 0.0, 0.4).unwrap();
        let m = jacobi_eval(1, 0.0, -0.4).unwrap();
        assert_eq!(p, -m);
        // frozen from the 50-digit recurrence oracle
        assert_relative_eq!(
            jacobi_eval(5, 0.5, 0.7).unwrap(),
            -1.1152511237078130798,
            max_relative = 1e-12
        );
        assert!(jacobi_eval(3, 0.0, 1.5).is_err());
        assert!(jacobi_eval(3, -1.0, 0.5).is_err());
    }

    #[test]
    fn jacobi_parity_exact() {
        for k in 0..40 {
            for &x in &[0.1, 0.35, 0.99] {
                let p = jacobi_eval(k, 0.25, x).unwrap();
                let m = jacobi_eval(k, 0.25, -x).unwrap();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(p, sign * m, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn jacobi_norm_h_values() {
        assert_relative_eq!(jacobi_norm_h(0, 0.0).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(jacobi_norm_h(0, 1.0).unwrap(), 4.0 / 3.0, max_relative = 1e-14);
        // frozen from the Gamma-product oracle at 50 digits
        assert_relative_eq!(
            jacobi_norm_h(7, 0.25).unwrap(),
            0.18101524364281632687,
            max_relative = 1e-13
        );
        assert!(jacobi_norm_h(7, 0.25).unwrap() > 0.0);
    }

    #[test]
    fn kernel_trivial_and_frozen() {
        assert_relative_eq!(kernel_k(0.0, 0.0), 2.0, max_relative = 1e-14);
        assert!(kernel_k(0.0, std::f64::consts::PI).abs() < 1e-14);
        // K_0 = 2 sin(x)/x away from zero
        assert_relative_eq!(kernel_k(0.0, 1.3), 2.0 * 1.3f64.sin() / 1.3, max_relative = 1e-12);
        // frozen quadrature oracle of int e^{2iy}(1-y^2) dy
        assert_relative_eq!(kernel_k(1.0, 2.0), 0.8707955499599832347, max_relative = 1e-12);
        // both sides of the series/Bessel seam at |x| = 1e-3, frozen from mpmath
        assert_relative_eq!(kernel_k(0.6, 0.999e-3), 1.5133645030071747063, max_relative = 1e-12);
        assert_relative_eq!(kernel_k(0.6, 1.001e-3), 1.5133645022865249155, max_relative = 1e-12);
        // K_1(0) limit
        assert_relative_eq!(kernel_k(1.0, 0.0), 4.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn kernel_even_symmetry_exact() {
        for &x in &[0.0, 1e-4, 0.5, 2.0, 17.3, 101.0] {
            assert_eq!(kernel_k(0.75, x), kernel_k(0.75, -x));
        }
    }

    #[test]
    fn spherical_closed_form_recursion_oracle() {
        // Half-integer orders against the spherical Bessel recursion.
        // Upward recursion from j_0, j_{-1} is used where it is stable (x >= nu);
        // below that the independent check is the plain ascending series, whose
        // term growth stays polynomial for these orders.
        for half in 0..21usize {
            let nu = half as f64 + 0.5;
            for j in 1..=25 {
                let x = 2.0 * j as f64;
                let got = bessel_j(nu, x).unwrap();
                let envelope = (2.0 / (std::f64::consts::PI * x)).sqrt();
                let want = if x >= nu {
                    // j_n(x) = sqrt(pi/(2x)) J_{n+1/2}(x); upward recursion from
                    // j_{-1} = cos(x)/x, j_0 = sin(x)/x.
                    let mut jm = x.cos() / x;
                    let mut j0 = x.sin() / x;
                    for n in 0..half {
                        let jn = (2.0 * n as f64 + 1.0) / x * j0 - jm;
                        jm = j0;
                        j0 = jn;
                    }
                    (2.0 * x / std::f64::consts::PI).sqrt() * j0
                } else {
                    bessel_series(nu, x)
                };
                assert!(
                    (got - want).abs() <= 1e-9 * want.abs().max(1e-3 * envelope),
                    "nu={nu} x={x}: got {got} want {want}"
                );
            }
        }
    }
}
