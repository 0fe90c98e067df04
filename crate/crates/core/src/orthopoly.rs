//! Polynomials in Gegenbauer bases.
//!
//! Every semi-classical polynomial of this crate is a short linear combination of
//! Gegenbauer polynomials `C_k^{(alpha)}` with `alpha = 3/2` (continuity 0) or
//! `alpha = 5/2` (continuity 1). [`GegenbauerSeries`] stores such a combination and
//! supports evaluation, differentiation, conversion to the monomial basis and real
//! root extraction.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const TRIM_RELATIVE: f64 = 1e-14;

/// `C_n^{(alpha)}(x)` by the three-term recurrence. Negative degrees give 0.
pub fn gegenbauer_eval(n: i64, alpha: f64, x: f64) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * alpha * x;
    for k in 2..=n {
        let k = k as f64;
        let next = (2.0 * (k + alpha - 1.0) * x * cur - (k + 2.0 * alpha - 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    cur
}

/// `sum_k coeffs[k] * C_k^{(alpha)}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GegenbauerSeries {
    alpha: f64,
    coeffs: Vec<f64>,
}

impl GegenbauerSeries {
    /// Builds a series and trims trailing coefficients below `1e-14 * max|a_k|`.
    ///
    /// Panics if `alpha` is not positive.
    pub fn new(alpha: f64, coeffs: Vec<f64>) -> Self {
        assert!(alpha > 0.0, "Gegenbauer parameter must be positive");
        let mut s = Self { alpha, coeffs };
        s.trim();
        s
    }

    pub fn zero(alpha: f64) -> Self {
        Self::new(alpha, Vec::new())
    }

    /// Builds a series from `(degree, coefficient)` terms; terms with negative degree vanish.
    pub fn from_terms(alpha: f64, terms: &[(i64, f64)]) -> Self {
        let top = terms.iter().map(|&(k, _)| k).max().unwrap_or(-1);
        let mut coeffs = vec![0.0; (top + 1).max(0) as usize];
        for &(k, a) in terms {
            if k >= 0 {
                coeffs[k as usize] += a;
            }
        }
        Self::new(alpha, coeffs)
    }

    fn trim(&mut self) {
        let max = self.coeffs.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        let cutoff = TRIM_RELATIVE * max;
        while let Some(&last) = self.coeffs.last() {
            if last.abs() <= cutoff {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, a| m.max(a.abs()))
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.coeffs.len();
        if n == 0 {
            return 0.0;
        }
        let alpha = self.alpha;
        // C_{k+1} = a(k) C_k + b(k) C_{k-1}
        let a = |k: usize| 2.0 * (k as f64 + alpha) * x / (k as f64 + 1.0);
        let b = |k: usize| -(k as f64 + 2.0 * alpha - 1.0) / (k as f64 + 1.0);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for k in (1..n).rev() {
            let bk = self.coeffs[k] + a(k) * b1 + b(k + 1) * b2;
            b2 = b1;
            b1 = bk;
        }
        self.coeffs[0] + b1 * 2.0 * alpha * x + b(1) * b2
    }

    /// k-th derivative; the basis parameter of the result is `alpha + k`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            let alpha = out.alpha;
            let coeffs = out.coeffs.iter().skip(1).map(|a| 2.0 * alpha * a).collect();
            out = Self::new(alpha + 1.0, coeffs);
        }
        out
    }

    /// `p(-x)`, using `C_k(-x) = (-1)^k C_k(x)`.
    pub fn reflected(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| if k % 2 == 0 { *a } else { -a })
            .collect();
        Self::new(self.alpha, coeffs)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.alpha, self.coeffs.iter().map(|a| a * factor).collect())
    }

    /// `self + factor * other`. Panics if the bases differ.
    pub fn add_scaled(&self, other: &Self, factor: f64) -> Self {
        assert_eq!(self.alpha, other.alpha, "series in different bases");
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(0.0)
                    + factor * other.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Self::new(self.alpha, coeffs)
    }

    /// Expansion in the monomial basis.
    pub fn to_monomial(&self) -> Poly {
        let mut acc = vec![0.0; self.coeffs.len()];
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 2.0 * self.alpha];
        for (k, a) in self.coeffs.iter().enumerate() {
            let basis = match k {
                0 => &prev,
                _ => &cur,
            };
            for (i, c) in basis.iter().enumerate() {
                acc[i] += a * c;
            }
            if k >= 1 {
                // advance cur to C_{k+1}
                let kk = (k + 1) as f64;
                let mut next = vec![0.0; k + 2];
                for (i, c) in cur.iter().enumerate() {
                    next[i + 1] += 2.0 * (kk + self.alpha - 1.0) * c / kk;
                }
                for (i, c) in prev.iter().enumerate() {
                    next[i] -= (kk + 2.0 * self.alpha - 2.0) * c / kk;
                }
                prev = std::mem::replace(&mut cur, next);
            }
        }
        Poly::new(acc)
    }
}

/// Polynomial in the monomial basis, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `(x - root)`
    pub fn linear_root(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self, k: usize) -> Self {
        let mut c = self.coeffs.clone();
        for _ in 0..k {
            if c.is_empty() {
                break;
            }
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| i as f64 * a)
                .collect();
        }
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(Vec::new());
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|k| {
                self.coeffs.get(k).copied().unwrap_or(0.0)
                    + other.coeffs.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        Self::new(c)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let p = (i + 1) as i32;
                c * (b.powi(p) - a.powi(p)) / p as f64
            })
            .sum()
    }
}

/// Real roots of a series, as far as 64-bit arithmetic resolves them.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    /// Every real root, ascending, repeated by multiplicity.
    pub roots: Vec<f64>,
    /// Number of complex-conjugate pairs among the eigenvalues.
    pub complex_pairs: usize,
    /// How many of `roots` fall outside `[-1 - 1e-8, 1 + 1e-8]`.
    pub outside: usize,
    /// Largest `|p(root)| / max|a_k|` after polishing.
    pub max_residual: f64,
}

impl RootSet {
    pub fn in_interval(&self) -> Vec<f64> {
        self.roots
            .iter()
            .copied()
            .filter(|x| x.abs() <= 1.0 + INTERVAL_SLACK)
            .collect()
    }

    pub fn all_real(&self) -> bool {
        self.complex_pairs == 0
    }
}

pub const INTERVAL_SLACK: f64 = 1e-8;

// Eigenvalues with |Im| below this (relative) are treated as real before polishing.
const REAL_CUTOFF: f64 = 1e-6;

/// Roots via the balanced companion matrix, Newton-polished in the Gegenbauer basis.
pub fn real_roots(p: &GegenbauerSeries) -> Result<RootSet> {
    let degree = p.degree().unwrap_or(0);
    if degree < 1 {
        return Err(Error::DegreeTooLowForRoots(degree));
    }
    let mono = p.to_monomial();
    let c = mono.coeffs();
    let lead = c[degree];
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -c[i] / lead;
    }
    nalgebra::linalg::balancing::balance_parlett_reinsch(&mut companion);
    let eig = companion.complex_eigenvalues();

    let dp = p.derivative(1);
    let scale = p.max_coeff();
    let mut roots = Vec::with_capacity(degree);
    let mut complex = 0usize;
    for z in eig.iter() {
        if z.im.abs() <= REAL_CUTOFF * z.norm().max(1.0) {
            roots.push(polish(p, &dp, z.re));
        } else {
            complex += 1;
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    let outside = roots
        .iter()
        .filter(|x| x.abs() > 1.0 + INTERVAL_SLACK)
        .count();
    let max_residual = roots
        .iter()
        .map(|&x| p.eval(x).abs() / scale)
        .fold(0.0, f64::max);
    Ok(RootSet {
        roots,
        complex_pairs: complex / 2,
        outside,
        max_residual,
    })
}

fn polish(p: &GegenbauerSeries, dp: &GegenbauerSeries, x0: f64) -> f64 {
    let mut best = x0;
    let mut best_res = p.eval(x0).abs();
    let mut x = x0;
    for _ in 0..50 {
        let fx = p.eval(x);
        let dfx = dp.eval(x);
        if fx == 0.0 || dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let step = fx / dfx;
        x -= step;
        let res = p.eval(x).abs();
        if res < best_res {
            best = x;
            best_res = res;
        }
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            break;
        }
    }
    best
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`; exact up to degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

/// Integral of `f` over `[a, b]` with an `n`-point Gauss–Legendre rule.
pub fn integrate_gl(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}
