//! Symmetric tridiagonal eigensolver (implicit-shift QL with Wilkinson shifts)
//! and Gauss-Jacobi quadrature for the weight (1-x^2)^alpha via Golub-Welsch.

use crate::error::{Error, Result};
use crate::specfun::{jacobi_recur_e, weight_mass};

/// A symmetric tridiagonal matrix, stored as its diagonal and off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Precondition(format!(
                "tridiagonal sizes inconsistent: diag {} offdiag {}",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(offdiag.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Precondition("non-finite tridiagonal entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }
}

const MAX_QL_ITER: usize = 50;

/// One QL sweep machine over (d, e), optionally accumulating rotations into
/// the columns of `z`. Standard implicit-shift tridiagonal QL.
fn tqli(d: &mut [f64], e: &mut [f64], mut z: Option<&mut Vec<Vec<f64>>>) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    // e is used with one slot of slack at the end
    debug_assert_eq!(e.len(), n);
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge for eigenvalue index {l}"
                )));
            }
            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflowed = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    let (a, b) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut a[i], &mut b[0]);
                    for (u, v) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *v;
                        *v = s * *u + c * f;
                        *u = c * *u - s * f;
                    }
                }
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// QL sweep on raw (d, e) storage with rotation accumulation into the columns
/// of `z`; `e` needs one slot of slack at the end. Used by the dense
/// symmetric path after Householder reduction.
pub(crate) fn tqli_with_vectors(
    d: &mut [f64],
    e: &mut [f64],
    z: &mut Vec<Vec<f64>>,
) -> Result<()> {
    tqli(d, e, Some(z))
}

/// All eigenvalues of `t` in ascending order, no eigenvectors.
pub fn symtrid_eigenvalues(t: &SymTridiag) -> Result<Vec<f64>> {
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    tqli(&mut d, &mut e, None)?;
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// The `count` smallest eigenpairs of `t`, eigenvalues ascending, eigenvectors
/// unit-norm and mutually orthogonal.
///
/// Sign convention: each eigenvector is scaled so that its largest-magnitude
/// component is positive, ties broken by lowest index.
pub fn symtrid_eigen(t: &SymTridiag, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = t.size();
    if count > n {
        return Err(Error::Precondition(format!(
            "requested {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let mut d = t.diag.clone();
    let mut e = t.offdiag.clone();
    e.push(0.0);
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut col = vec![0.0; n];
            col[j] = 1.0;
            col
        })
        .collect();
    tqli(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let mut out = Vec::with_capacity(count);
    for &j in order.iter().take(count) {
        let mut v = std::mem::take(&mut z[j]);
        let mut imax = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[imax].abs() {
                imax = i;
            }
        }
        if v[imax] < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        out.push((d[j], v));
    }
    Ok(out)
}

/// Gauss-Jacobi quadrature rule for the weight (1-x^2)^alpha on [-1, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    alpha: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Approximates int_{-1}^{1} f(x) (1-x^2)^alpha dx.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Golub-Welsch: nodes are the eigenvalues of the m-point Jacobi recurrence
/// matrix, weights come from the first components of its eigenvectors scaled
/// by the total mass of the weight.
pub fn gauss_jacobi(alpha: f64, m: usize) -> Result<QuadratureRule> {
    if !(alpha > -1.0) {
        return Err(Error::Domain(format!("gauss_jacobi requires alpha > -1, got {alpha}")));
    }
    if m == 0 {
        return Err(Error::Precondition("gauss_jacobi requires m >= 1".into()));
    }
    let diag = vec![0.0; m];
    let off: Vec<f64> = (1..m).map(|j| jacobi_recur_e(j, alpha)).collect();
    let t = SymTridiag::new(diag, off)?;
    let pairs = symtrid_eigen(&t, m)?;
    let mass = weight_mass(alpha);
    let mut nodes: Vec<f64> = pairs.iter().map(|(x, _)| *x).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|(_, v)| mass * v[0] * v[0]).collect();
    // enforce the exact +/- symmetry of the rule
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    for i in 0..m {
        if !(nodes[i] > -1.0 && nodes[i] < 1.0) || weights[i] <= 0.0 {
            return Err(Error::Numerical(format!(
                "invalid Gauss-Jacobi node/weight at index {i}: ({}, {})",
                nodes[i], weights[i]
            )));
        }
        if i > 0 && nodes[i] <= nodes[i - 1] {
            return Err(Error::Numerical(format!("nodes not strictly increasing at {i}")));
        }
    }
    Ok(QuadratureRule { alpha, nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::beta;
    use ::approx::assert_relative_eq;

    #[test]
    fn two_by_two_closed_form() {
        let t = SymTridiag::new(vec![2.0, 2.0], vec![1.0]).unwrap();
        let pairs = symtrid_eigen(&t, 2).unwrap();
        assert_relative_eq!(pairs[0].0, 1.0, max_relative = 1e-14);
        assert_relative_eq!(pairs[1].0, 3.0, max_relative = 1e-14);
        let vals = symtrid_eigenvalues(&t).unwrap();
        assert_relative_eq!(vals[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(vals[1], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn single_entry() {
        let t = SymTridiag::new(vec![-4.5], vec![]).unwrap();
        let pairs = symtrid_eigen(&t, 1).unwrap();
        assert_eq!(pairs[0].0, -4.5);
        assert_eq!(pairs[0].1, vec![1.0]);
    }

    #[test]
    fn rejects_inconsistent_input() {
        assert!(SymTridiag::new(vec![1.0, 2.0], vec![0.1, 0.2]).is_err());
        assert!(SymTridiag::new(vec![1.0, f64::NAN], vec![0.1]).is_err());
        let t = SymTridiag::new(vec![1.0, 2.0], vec![0.5]).unwrap();
        assert!(symtrid_eigen(&t, 3).is_err());
    }

    #[test]
    fn deterministic_sign_convention() {
        let t = SymTridiag::new(vec![1.0, 2.0, 3.0, 2.0], vec![0.7, -0.3, 0.9]).unwrap();
        for (_, v) in symtrid_eigen(&t, 4).unwrap() {
            let mut imax = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[imax].abs() {
                    imax = i;
                }
            }
            assert!(v[imax] > 0.0);
        }
    }

    #[test]
    fn gauss_legendre_two_points() {
        let rule = gauss_jacobi(0.0, 2).unwrap();
        assert_relative_eq!(rule.nodes()[0], -1.0 / 3.0f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(rule.nodes()[1], 1.0 / 3.0f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(rule.weights()[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(rule.weights()[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_legendre_one_point() {
        let rule = gauss_jacobi(0.0, 1).unwrap();
        assert_eq!(rule.nodes()[0], 0.0);
        assert_relative_eq!(rule.weights()[0], 2.0, max_relative = 1e-14);
    }

    #[test]
    fn quartic_moment_alpha_one() {
        // int (1-x^2) x^4 dx = 4/35, exact by symbolic integration
        let rule = gauss_jacobi(1.0, 20).unwrap();
        let got = rule.integrate(|x| x.powi(4));
        assert_relative_eq!(got, 4.0 / 35.0, max_relative = 1e-13);
    }

    #[test]
    fn moments_match_beta_function() {
        for &alpha in &[0.0, 0.25, 0.5, 1.0, 2.0, -0.5] {
            for &m in &[1usize, 2, 5, 20, 64] {
                let rule = gauss_jacobi(alpha, m).unwrap();
                let mass = rule.integrate(|_| 1.0);
                assert_relative_eq!(mass, weight_mass(alpha), max_relative = 1e-12);
                for j in 0..2 * m {
                    let got = rule.integrate(|x| x.powi(j as i32));
                    if j % 2 == 0 {
                        let want = beta(j as f64 / 2.0 + 0.5, alpha + 1.0).unwrap();
                        assert_relative_eq!(got, want, max_relative = 1e-11);
                    } else {
                        assert!(got.abs() <= 1e-11, "odd moment {j} = {got}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_quadrature_params() {
        assert!(gauss_jacobi(-1.0, 5).is_err());
        assert!(gauss_jacobi(0.0, 0).is_err());
    }
}
