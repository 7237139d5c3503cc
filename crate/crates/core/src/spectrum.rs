//! Eigenvalues of the weighted finite Fourier transform (mu_n, up to the i^n
//! phase) and of the concentration operator (lambda_n), a Nystrom
//! discretization of the concentration operator as a brute-force oracle, and
//! the trace identity.

use crate::basis::{GpswfBasis, GpswfParams};
use crate::eigtri::{gauss_jacobi, QuadratureRule, SymTridiag};
use crate::error::{Error, Result};
use crate::specfun::{bessel_ladder, kernel_k, ln_gamma_raw, weight_mass};

/// Per-index spectral record: mu_n = i^{phase_power} mu_abs and
/// lambda_n = (c/2pi) mu_abs^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTriple {
    pub n: usize,
    pub chi: f64,
    pub mu_abs: f64,
    pub lambda: f64,
    pub phase_power: u8,
}

/// |mu_n| and the phase power n mod 4, from the eigen-relation
/// F_c psi_n = mu_n psi_n evaluated at a reference point.
///
/// The transform of the expansion is summed in closed form:
/// F_c P~_k(x) = i^k sqrt(pi) (2/(cx))^{a+1/2} Gamma(k+a+1)/Gamma(k+1)
///              J_{k+a+1/2}(cx) / sqrt(h_k).
/// The reference point maximizes |psi_n| over a 257-point Chebyshev grid,
/// excluding points where c|x| < 1e-6 (the Bessel argument degenerates).
pub fn compute_mu(basis: &GpswfBasis, n: usize) -> Result<(f64, u8)> {
    if n >= basis.count() {
        return Err(Error::Index { index: n, count: basis.count() });
    }
    let params = basis.params();
    let (alpha, c) = (params.alpha(), params.c());
    let phase = (n % 4) as u8;
    if c == 0.0 {
        // F_0 f is the constant int f omega_alpha; only n = 0 survives.
        return Ok(if n == 0 { (weight_mass(alpha), 0) } else { (0.0, phase) });
    }
    // reference point scan
    let grid: Vec<f64> = (0..257)
        .map(|j| (std::f64::consts::PI * j as f64 / 256.0).cos())
        .collect();
    let values = basis.eval_psi_grid(n, &grid)?;
    let gmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut best: Option<usize> = None;
    for (j, (&x, &v)) in grid.iter().zip(&values).enumerate() {
        if (c * x).abs() < 1e-6 {
            continue;
        }
        if best.is_none_or(|b| v.abs() > values[b].abs()) {
            best = Some(j);
        }
    }
    let j = best.ok_or_else(|| Error::Numerical("no valid reference point".into()))?;
    if values[j].abs() < 0.1 * gmax {
        return Err(Error::Numerical(format!(
            "no well-conditioned reference point for index {n}"
        )));
    }
    let xa = grid[j].abs();
    let parity_sign = if grid[j] < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    let psi_ref = parity_sign * values[j];

    let beta = basis.beta_coeffs(n)?;
    let k_size = beta.len();
    let cx = c * xa;
    // orders past the Bessel tail contribute zero regardless of beta
    let k_count = k_size.min((2.0 * cx).ceil() as usize + 60);
    let nu0 = alpha + 0.5;
    let i0 = nu0.trunc() as usize;
    let frac = nu0.fract();
    let ladder = bessel_ladder(frac, i0 + k_count, cx);
    let log_front = 0.5 * std::f64::consts::PI.ln() + nu0 * (2.0 / cx).ln();
    let mut s = 0.0;
    let mut term_scale = 0.0f64;
    for k in (n % 2..k_count).step_by(2) {
        let kf = k as f64;
        // Gamma(k+a+1)/Gamma(k+1)/sqrt(h_k) in log form
        let ln_h = (2.0 * alpha + 1.0) * std::f64::consts::LN_2
            + 2.0 * ln_gamma_raw(kf + alpha + 1.0)
            - ln_gamma_raw(kf + 1.0)
            - (2.0 * kf + 2.0 * alpha + 1.0).ln()
            - ln_gamma_raw(kf + 2.0 * alpha + 1.0);
        let coeff =
            (log_front + ln_gamma_raw(kf + alpha + 1.0) - ln_gamma_raw(kf + 1.0) - 0.5 * ln_h)
                .exp();
        // i^k = i^n (-1)^{(k-n)/2} on the parity class of n
        let sign = if k.abs_diff(n) % 4 == 0 { 1.0 } else { -1.0 };
        let term = beta[k] * sign * coeff * ladder[i0 + k];
        term_scale = term_scale.max(term.abs());
        s += term;
    }
    let r = s / psi_ref;
    // the i^n phase leaves a real positive factor
    let mu_scale = (2.0 * std::f64::consts::PI / c).sqrt();
    if r < -1e-8 * mu_scale {
        return Err(Error::Numerical(format!(
            "phase of mu_{n} deviates from i^{n}: residual {r:e}"
        )));
    }
    Ok((r.max(0.0), phase))
}

/// lambda_n = (c/2pi) |mu_n|^2; reported as 0 for the degenerate c = 0 family.
pub fn compute_lambda(basis: &GpswfBasis, n: usize) -> Result<f64> {
    let (mu, _) = compute_mu(basis, n)?;
    Ok(basis.params().c() / (2.0 * std::f64::consts::PI) * mu * mu)
}

/// The full (chi, |mu|, lambda) record for n = 0..count.
pub fn spectral_triples(basis: &GpswfBasis, count: usize) -> Result<Vec<SpectralTriple>> {
    if count > basis.count() {
        return Err(Error::Index { index: count, count: basis.count() });
    }
    (0..count)
        .map(|n| {
            let (mu_abs, phase_power) = compute_mu(basis, n)?;
            Ok(SpectralTriple {
                n,
                chi: basis.chi(n)?,
                mu_abs,
                lambda: basis.params().c() / (2.0 * std::f64::consts::PI) * mu_abs * mu_abs,
                phase_power,
            })
        })
        .collect()
}

/// Householder reduction of a dense symmetric matrix to tridiagonal form.
/// When `transform` is set, `a` is overwritten with the orthogonal matrix Q
/// accumulating the reduction (A = Q T Q^T); otherwise `a` is scratch.
fn householder_tridiag(a: &mut [Vec<f64>], transform: bool) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = a[i][..=l].iter().map(|x| x.abs()).sum();
            if scale == 0.0 {
                e[i] = a[i][l];
            } else {
                for k in 0..=l {
                    a[i][k] /= scale;
                    h += a[i][k] * a[i][k];
                }
                let f = a[i][l];
                let g = -h.sqrt().copysign(f);
                e[i] = scale * g;
                h -= f * g;
                a[i][l] = f - g;
                let mut fsum = 0.0;
                for j in 0..=l {
                    if transform {
                        a[j][i] = a[i][j] / h;
                    }
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j][k] * a[i][k];
                    }
                    for k in j + 1..=l {
                        g += a[k][j] * a[i][k];
                    }
                    e[j] = g / h;
                    fsum += e[j] * a[i][j];
                }
                let hh = fsum / (h + h);
                for j in 0..=l {
                    let f = a[i][j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j][k] -= f * e[k] + g * a[i][k];
                    }
                }
            }
        } else {
            e[i] = a[i][l];
        }
        d[i] = h;
    }
    if transform {
        d[0] = 0.0;
    }
    e[0] = 0.0;
    for i in 0..n {
        if transform {
            if d[i] != 0.0 {
                for j in 0..i {
                    let mut g = 0.0;
                    for k in 0..i {
                        g += a[i][k] * a[k][j];
                    }
                    for k in 0..i {
                        a[k][j] -= g * a[k][i];
                    }
                }
            }
            d[i] = a[i][i];
            a[i][i] = 1.0;
            for j in 0..i {
                a[j][i] = 0.0;
                a[i][j] = 0.0;
            }
        } else {
            d[i] = a[i][i];
        }
    }
    (d, e)
}

fn kernel_matrix(alpha: f64, c: f64, rule: &QuadratureRule) -> Vec<Vec<f64>> {
    let m = rule.len();
    let nodes = rule.nodes();
    let sw: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let scale = c / (2.0 * std::f64::consts::PI);
    let mut a = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let v = scale * sw[i] * sw[j] * kernel_k(alpha, c * (nodes[i] - nodes[j]));
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

/// Top `count` eigenvalues (descending) of the Nystrom discretization of the
/// concentration operator on an m-point Gauss-Jacobi rule. The real symmetric
/// kernel matrix is conjugated by sqrt(weights), which keeps it symmetric.
pub fn nystrom_lambda(params: &GpswfParams, m: usize, count: usize) -> Result<Vec<f64>> {
    if m < 4 * count + 50 {
        return Err(Error::Precondition(format!(
            "nystrom_lambda needs m >= 4*count + 50, got m = {m}, count = {count}"
        )));
    }
    let rule = gauss_jacobi(params.alpha(), m)?;
    let mut a = kernel_matrix(params.alpha(), params.c(), &rule);
    let (d, e) = householder_tridiag(&mut a, false);
    let t = SymTridiag::new(d, e[1..].to_vec())?;
    let mut vals = crate::eigtri::symtrid_eigenvalues(&t)?;
    vals.reverse();
    vals.truncate(count);
    Ok(vals)
}

/// Full Nystrom solution: eigenvalues plus node values of the eigenfunctions,
/// with the Nystrom extension formula for evaluation anywhere on [-1, 1].
/// This is the brute-force oracle path; it shares no code with the
/// Jacobi-eigensystem route beyond the scalar kernel.
pub struct NystromSolution {
    alpha: f64,
    c: f64,
    lambdas: Vec<f64>,
    rule: QuadratureRule,
    psi_nodes: Vec<Vec<f64>>,
}

pub fn nystrom_solve(params: &GpswfParams, m: usize, count: usize) -> Result<NystromSolution> {
    if m < 4 * count + 50 {
        return Err(Error::Precondition(format!(
            "nystrom_solve needs m >= 4*count + 50, got m = {m}, count = {count}"
        )));
    }
    let (alpha, c) = (params.alpha(), params.c());
    let rule = gauss_jacobi(alpha, m)?;
    let mut a = kernel_matrix(alpha, c, &rule);
    let (mut d, mut e) = householder_tridiag(&mut a, true);
    // columns of q are the eigenvectors after rotation
    let mut z: Vec<Vec<f64>> = (0..m).map(|j| (0..m).map(|k| a[k][j]).collect()).collect();
    {
        let mut e_work = e.split_off(1);
        e_work.push(0.0);
        crate::eigtri::tqli_with_vectors(&mut d, &mut e_work, &mut z)?;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap());
    let sw: Vec<f64> = rule.weights().iter().map(|w| w.sqrt()).collect();
    let mut lambdas = Vec::with_capacity(count);
    let mut psi_nodes = Vec::with_capacity(count);
    for &j in order.iter().take(count) {
        lambdas.push(d[j]);
        let psi: Vec<f64> = z[j].iter().zip(&sw).map(|(u, s)| u / s).collect();
        psi_nodes.push(psi);
    }
    let mut solution = NystromSolution { alpha, c, lambdas, rule, psi_nodes };
    // sign convention psi_n(1) > 0, applied through the extension formula
    for n in 0..count {
        if solution.eval_psi(n, 1.0) < 0.0 {
            for v in solution.psi_nodes[n].iter_mut() {
                *v = -*v;
            }
        }
    }
    Ok(solution)
}

impl NystromSolution {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Nystrom extension: psi(x) = (c/2pi)/lambda sum_j w_j K(c(x-x_j)) psi_j,
    /// smooth in x and valid on all of [-1, 1].
    pub fn eval_psi(&self, n: usize, x: f64) -> f64 {
        let scale = self.c / (2.0 * std::f64::consts::PI) / self.lambdas[n];
        let mut s = 0.0;
        for ((&xj, &wj), &pj) in self
            .rule
            .nodes()
            .iter()
            .zip(self.rule.weights())
            .zip(&self.psi_nodes[n])
        {
            s += wj * kernel_k(self.alpha, self.c * (x - xj)) * pj;
        }
        s * scale
    }
}

/// Trace identity: sum of all lambda_n equals
/// (c/2pi) (sqrt(pi) Gamma(a+1)/Gamma(a+3/2))^2.
/// Returns (computed, analytic); the computed sum accumulates lambda_n until
/// terms fall below 1e-15.
pub fn trace_identity(params: &GpswfParams) -> Result<(f64, f64)> {
    let (alpha, c) = (params.alpha(), params.c());
    if !(c > 0.0) {
        return Err(Error::Domain("trace identity requires c > 0".into()));
    }
    let mass = weight_mass(alpha);
    let analytic = c / (2.0 * std::f64::consts::PI) * mass * mass;
    let mut n_max = (0.8 * c).ceil() as usize + 25;
    loop {
        let p = GpswfParams::for_max_index(alpha, c, n_max)?;
        let basis = crate::basis::compute_basis(&p, n_max)?;
        let mut sum = 0.0;
        let mut tail_ok = false;
        for n in 0..=n_max {
            let lam = compute_lambda(&basis, n)?;
            sum += lam;
            if lam < 1e-15 {
                tail_ok = true;
                break;
            }
        }
        if tail_ok {
            return Ok((sum, analytic));
        }
        if n_max >= 240 {
            return Err(Error::Numerical(
                "trace summation did not reach the 1e-15 tail".into(),
            ));
        }
        n_max += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::compute_basis;
    use ::approx::assert_relative_eq;

    #[test]
    fn mu_limit_small_bandwidth() {
        // mu_0 -> int omega dy as c -> 0+; at alpha = 0 the limit is 2
        let p = GpswfParams::for_max_index(0.0, 1e-4, 4).unwrap();
        let basis = compute_basis(&p, 4).unwrap();
        let (mu0, ph) = compute_mu(&basis, 0).unwrap();
        assert_eq!(ph, 0);
        assert_relative_eq!(mu0, 2.0, max_relative = 1e-6);
    }

    #[test]
    fn mu_degenerate_zero_bandwidth() {
        let p = GpswfParams::for_max_index(0.5, 0.0, 3).unwrap();
        let basis = compute_basis(&p, 3).unwrap();
        let (mu0, _) = compute_mu(&basis, 0).unwrap();
        assert_relative_eq!(mu0, weight_mass(0.5), max_relative = 1e-13);
        for n in 1..=3 {
            let (mu, ph) = compute_mu(&basis, n).unwrap();
            assert_eq!(mu, 0.0);
            assert_eq!(ph, (n % 4) as u8);
        }
        assert_eq!(compute_lambda(&basis, 0).unwrap(), 0.0);
    }

    #[test]
    fn phase_power_is_n_mod_4() {
        let p = GpswfParams::for_max_index(0.0, 3.0, 9).unwrap();
        let basis = compute_basis(&p, 9).unwrap();
        for t in spectral_triples(&basis, 10).unwrap() {
            assert_eq!(t.phase_power, (t.n % 4) as u8);
        }
    }

    #[test]
    fn lambda_in_unit_interval_and_decreasing() {
        let p = GpswfParams::for_max_index(0.0, 10.0, 20).unwrap();
        let basis = compute_basis(&p, 20).unwrap();
        let ts = spectral_triples(&basis, 21).unwrap();
        for t in &ts {
            assert!(t.lambda > 0.0 && t.lambda <= 1.0 + 1e-12, "lambda_{} = {}", t.n, t.lambda);
        }
        for w in ts.windows(2) {
            assert!(w[1].lambda < w[0].lambda);
        }
        // alpha = 1, c = 50, n = 40: deep plunge tail
        let p = GpswfParams::for_max_index(1.0, 50.0, 40).unwrap();
        let basis = compute_basis(&p, 40).unwrap();
        assert!(compute_lambda(&basis, 40).unwrap() < 1e-6);
    }

    #[test]
    fn trace_analytic_values() {
        // alpha = 0: analytic trace is 2c/pi
        let p = GpswfParams::new(0.0, 20.0, 8).unwrap();
        let (_, analytic) = trace_identity(&p).unwrap();
        assert_relative_eq!(analytic, 40.0 / std::f64::consts::PI, max_relative = 1e-14);
        // alpha = 1: (c/2pi) (sqrt(pi) Gamma(2)/Gamma(5/2))^2 = (c/2pi)(4/3)^2... via mass
        let p = GpswfParams::new(1.0, 6.0, 8).unwrap();
        let (_, analytic) = trace_identity(&p).unwrap();
        let mass = weight_mass(1.0);
        assert_relative_eq!(analytic, 6.0 / (2.0 * std::f64::consts::PI) * mass * mass);
        assert_relative_eq!(mass, 4.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn trace_matches_spectrum_sum() {
        let p = GpswfParams::new(0.0, 20.0, 8).unwrap();
        let (computed, analytic) = trace_identity(&p).unwrap();
        assert_relative_eq!(computed, analytic, max_relative = 1e-8);
    }

    #[test]
    fn nystrom_rejects_small_rules() {
        let p = GpswfParams::new(0.0, 1.0, 8).unwrap();
        assert!(nystrom_lambda(&p, 57, 2).is_err());
        assert!(nystrom_lambda(&p, 58, 2).is_ok());
    }

    #[test]
    fn nystrom_small_bandwidth_perturbative() {
        // c -> 0: lambda_0 ~ (2c/pi)(1 - c^2/9) at alpha = 0, and the rest are
        // second order in c
        let p = GpswfParams::new(0.0, 0.1, 8).unwrap();
        let lam = nystrom_lambda(&p, 200, 3).unwrap();
        let leading = 2.0 * 0.1 / std::f64::consts::PI;
        assert_relative_eq!(lam[0], leading * (1.0 - 0.01 / 9.0), max_relative = 1e-4);
        assert_relative_eq!(lam[0], leading, max_relative = 2e-3);
        // lambda_1 is third order in c, lambda_2 fifth order
        assert!(lam[1] < 2e-3 * lam[0]);
        assert!(lam[2] < 1e-3 * lam[1]);
        for l in &lam {
            assert!(*l > 0.0 && *l < 1.0);
        }
    }

    #[test]
    fn nystrom_trace_sum() {
        // sum of all Nystrom eigenvalues approximates the analytic trace
        let p = GpswfParams::new(0.0, 10.0, 8).unwrap();
        let m = 300;
        let lam = nystrom_lambda(&p, m, 60).unwrap();
        let total: f64 = lam.iter().filter(|l| **l > 0.0).sum();
        assert_relative_eq!(total, 20.0 / std::f64::consts::PI, max_relative = 1e-8);
    }
}
