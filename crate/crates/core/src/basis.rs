//! Assembly of the Jacobi-expansion eigensystem: the eigenvalues chi_n, the
//! expansion coefficients beta_k^n (split by parity), and evaluation of the
//! eigenfunctions psi_n on [-1, 1].

use crate::eigtri::{symtrid_eigen, SymTridiag};
use crate::error::{Error, Result};
use crate::specfun::{jacobi_recur_e, jacobi_values, weight_mass};

/// Operating cap on the bandwidth, set by the Bessel order/argument envelope
/// used in the spectrum computations.
pub const MAX_BANDWIDTH: f64 = 150.0;

/// Relative tail threshold: the last retained expansion coefficient of every
/// eigenvector must be below this times its largest coefficient.
const TAIL_TOL: f64 = 1e-13;

/// One GPSWF family: weight exponent alpha, bandwidth c, and the truncation
/// order K of the Jacobi expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpswfParams {
    alpha: f64,
    c: f64,
    matrix_size: usize,
}

impl GpswfParams {
    pub fn new(alpha: f64, c: f64, matrix_size: usize) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::Domain(format!("alpha must be > -1, got {alpha}")));
        }
        if !(c >= 0.0) {
            return Err(Error::Domain(format!("bandwidth c must be >= 0, got {c}")));
        }
        if c > MAX_BANDWIDTH {
            return Err(Error::Range(format!("bandwidth c = {c} exceeds the supported {MAX_BANDWIDTH}")));
        }
        if matrix_size < 4 {
            return Err(Error::Precondition(format!("matrix_size must be >= 4, got {matrix_size}")));
        }
        Ok(Self { alpha, c, matrix_size })
    }

    /// Truncation rule: K = max(2(N+1), ceil(1.2 (N+c)) + 40), rounded to even.
    /// The expansion coefficients decay super-geometrically past
    /// k ~ max(n, 2c/pi), so a linear margin suffices; compute_basis still
    /// checks the tail and doubles K if needed.
    pub fn for_max_index(alpha: f64, c: f64, n_max: usize) -> Result<Self> {
        let lin = (1.2 * (n_max as f64 + c)).ceil() as usize + 40;
        let mut k = lin.max(2 * (n_max + 1));
        k += k % 2;
        Self::new(alpha, c, k)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    fn doubled(&self) -> Result<Self> {
        Self::new(self.alpha, self.c, self.matrix_size * 2)
    }
}

/// Diagonal coupling factor of the eigensystem (the coefficient of c^2 on the
/// diagonal). The generic expression is 0/0 at (k=0, alpha=1/2) and
/// (k=1, alpha=-1/2); the factors cancel exactly, so those rows use the
/// reduced forms.
fn diag_factor(k: usize, alpha: f64) -> f64 {
    match k {
        0 => 1.0 / (2.0 * alpha + 3.0),
        1 => 3.0 / (2.0 * alpha + 5.0),
        _ => {
            let k = k as f64;
            (2.0 * k * (k + 2.0 * alpha + 1.0) + 2.0 * alpha - 1.0)
                / ((2.0 * k + 2.0 * alpha + 3.0) * (2.0 * k + 2.0 * alpha - 1.0))
        }
    }
}

/// Off-diagonal coupling factor between degrees k and k+2 (the coefficient of
/// c^2). At k=0 a (2 alpha + 1) factor is cancelled for the same reason.
fn offdiag_factor(k: usize, alpha: f64) -> f64 {
    if k == 0 {
        (2.0 * (2.0 * alpha + 2.0) / (2.0 * alpha + 5.0)).sqrt() / (2.0 * alpha + 3.0)
    } else {
        let k = k as f64;
        ((k + 1.0) * (k + 2.0) * (k + 2.0 * alpha + 1.0) * (k + 2.0 * alpha + 2.0)).sqrt()
            / ((2.0 * k + 2.0 * alpha + 3.0)
                * ((2.0 * k + 2.0 * alpha + 5.0) * (2.0 * k + 2.0 * alpha + 1.0)).sqrt())
    }
}

/// The two parity blocks of the eigensystem: even degrees k = 0, 2, 4, ... and
/// odd degrees k = 1, 3, 5, ... The diagonal entry at degree k is
/// k(k+2a+1) + c^2 * diag_factor(k), the coupling k <-> k+2 is
/// c^2 * offdiag_factor(k).
pub fn assemble_blocks(params: &GpswfParams) -> Result<(SymTridiag, SymTridiag)> {
    let (alpha, c, k_size) = (params.alpha, params.c, params.matrix_size);
    let c2 = c * c;
    let mut blocks = Vec::with_capacity(2);
    for parity in 0..2usize {
        let ks: Vec<usize> = (parity..k_size).step_by(2).collect();
        let diag: Vec<f64> = ks
            .iter()
            .map(|&k| {
                let kf = k as f64;
                kf * (kf + 2.0 * alpha + 1.0) + c2 * diag_factor(k, alpha)
            })
            .collect();
        let off: Vec<f64> = ks[..ks.len() - 1]
            .iter()
            .map(|&k| c2 * offdiag_factor(k, alpha))
            .collect();
        blocks.push(SymTridiag::new(diag, off)?);
    }
    let odd = blocks.pop().unwrap();
    let even = blocks.pop().unwrap();
    Ok((even, odd))
}

/// A computed GPSWF family: ascending chi_n and unit-norm expansion
/// coefficient vectors with explicit parity zeros.
#[derive(Debug, Clone)]
pub struct GpswfBasis {
    params: GpswfParams,
    chi: Vec<f64>,
    beta: Vec<Vec<f64>>,
    count: usize,
}

impl GpswfBasis {
    pub fn params(&self) -> &GpswfParams {
        &self.params
    }

    /// Number of computed indices.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn chi_values(&self) -> &[f64] {
        &self.chi
    }

    pub fn chi(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        Ok(self.chi[n])
    }

    /// Expansion coefficients beta_k^n over Jacobi degrees k = 0..K;
    /// beta_k^n = 0 whenever k and n differ in parity.
    pub fn beta_coeffs(&self, n: usize) -> Result<&[f64]> {
        self.check_index(n)?;
        Ok(&self.beta[n])
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n >= self.count {
            return Err(Error::Index { index: n, count: self.count });
        }
        Ok(())
    }

    /// psi_n(x) = sum_k beta_k^n P~_k(x). Sign fixed so psi_n(1) > 0;
    /// psi_n(-x) = (-1)^n psi_n(x) holds exactly.
    pub fn eval_psi(&self, n: usize, x: f64) -> Result<f64> {
        self.check_index(n)?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("eval_psi requires |x| <= 1, got {x}")));
        }
        Ok(eval_jacobi_series(self.params.alpha, &self.beta[n], x))
    }

    /// Vectorized eval_psi over a grid.
    pub fn eval_psi_grid(&self, n: usize, grid: &[f64]) -> Result<Vec<f64>> {
        self.check_index(n)?;
        if let Some(bad) = grid.iter().find(|x| !(-1.0..=1.0).contains(*x)) {
            return Err(Error::Domain(format!("grid point {bad} outside [-1, 1]")));
        }
        Ok(grid
            .iter()
            .map(|&x| eval_jacobi_series(self.params.alpha, &self.beta[n], x))
            .collect())
    }

    /// (psi_n(x), psi_n'(x)) by term-wise differentiation of the expansion.
    pub fn eval_psi_deriv(&self, n: usize, x: f64) -> Result<(f64, f64)> {
        self.check_index(n)?;
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("eval_psi_deriv requires |x| <= 1, got {x}")));
        }
        Ok(eval_jacobi_series_deriv(self.params.alpha, &self.beta[n], x))
    }
}

/// Evaluates sum_k coeffs[k] P~_k(x) in a single recurrence pass.
pub(crate) fn eval_jacobi_series(alpha: f64, coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    let mut pm1 = 0.0;
    let mut p0 = weight_mass(alpha).sqrt().recip();
    let mut e_prev = 0.0;
    for (j, &c) in coeffs.iter().enumerate() {
        if j > 0 {
            let e_j = jacobi_recur_e(j, alpha);
            let p1 = (x * p0 - e_prev * pm1) / e_j;
            pm1 = p0;
            p0 = p1;
            e_prev = e_j;
        }
        acc += c * p0;
    }
    acc
}

/// Same pass, accumulating the term-wise derivative as well.
pub(crate) fn eval_jacobi_series_deriv(alpha: f64, coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut acc = 0.0;
    let mut dacc = 0.0;
    let mut pm1 = 0.0;
    let mut p0 = weight_mass(alpha).sqrt().recip();
    let mut dm1 = 0.0;
    let mut d0 = 0.0;
    let mut e_prev = 0.0;
    for (j, &c) in coeffs.iter().enumerate() {
        if j > 0 {
            let e_j = jacobi_recur_e(j, alpha);
            let p1 = (x * p0 - e_prev * pm1) / e_j;
            let d1 = (p0 + x * d0 - e_prev * dm1) / e_j;
            pm1 = p0;
            p0 = p1;
            dm1 = d0;
            d0 = d1;
            e_prev = e_j;
        }
        acc += c * p0;
        dacc += c * d0;
    }
    (acc, dacc)
}

/// Computes the first n_max + 1 eigenpairs of the family.
///
/// The even and odd spectra are merged by value and the parity of index n is
/// checked to equal n mod 2. If the expansion tail of any retained
/// eigenvector is not negligible, the matrix size is doubled and the
/// computation retried (up to 3 times).
pub fn compute_basis(params: &GpswfParams, n_max: usize) -> Result<GpswfBasis> {
    let mut p = *params;
    if p.matrix_size < 2 * (n_max + 1) {
        return Err(Error::Precondition(format!(
            "matrix_size {} too small for max index {n_max}",
            p.matrix_size
        )));
    }
    let mut worst_tail = f64::INFINITY;
    for _attempt in 0..4 {
        let (basis, tail) = compute_once(&p, n_max)?;
        if tail <= TAIL_TOL {
            return Ok(basis);
        }
        worst_tail = tail;
        p = p.doubled()?;
    }
    Err(Error::Truncation { worst_tail })
}

fn compute_once(params: &GpswfParams, n_max: usize) -> Result<(GpswfBasis, f64)> {
    let k_size = params.matrix_size;
    let (even, odd) = assemble_blocks(params)?;
    let mut merged: Vec<(f64, usize, Vec<f64>)> = Vec::with_capacity(k_size);
    for (parity, block) in [(0usize, even), (1usize, odd)] {
        let need = (n_max + 2 - parity).div_ceil(2).min(block.size());
        for (chi, vec) in symtrid_eigen(&block, need)? {
            merged.push((chi, parity, vec));
        }
    }
    merged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    merged.truncate(n_max + 1);
    if merged.len() != n_max + 1 {
        return Err(Error::Precondition(format!(
            "matrix too small: got {} eigenvalues, need {}",
            merged.len(),
            n_max + 1
        )));
    }
    // Sturm-Liouville interlacing is expected, not assumed.
    for (n, (_, parity, _)) in merged.iter().enumerate() {
        if *parity != n % 2 {
            return Err(Error::Numerical(format!(
                "even/odd spectra do not interlace at index {n}"
            )));
        }
    }
    let p1 = jacobi_values(k_size, params.alpha, 1.0);
    let mut chi = Vec::with_capacity(n_max + 1);
    let mut beta = Vec::with_capacity(n_max + 1);
    let mut worst_tail = 0.0f64;
    for (value, parity, packed) in merged {
        let mut full = vec![0.0; k_size];
        for (j, &b) in packed.iter().enumerate() {
            full[parity + 2 * j] = b;
        }
        let at_one: f64 = full.iter().zip(&p1).map(|(b, p)| b * p).sum();
        if at_one < 0.0 {
            for b in full.iter_mut() {
                *b = -*b;
            }
        }
        let maxc = full.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        let tail = packed.last().map_or(0.0, |b| b.abs());
        worst_tail = worst_tail.max(tail / maxc);
        chi.push(value);
        beta.push(full);
    }
    Ok((
        GpswfBasis { params: *params, chi, beta, count: n_max + 1 },
        worst_tail,
    ))
}
