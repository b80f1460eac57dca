//! Order statistics of uniform samples: the gap density `f_{n,k}`, its
//! closed-form integrals, and Monte Carlo checks of the gap law and of
//! the expected log-gap identity.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linext::LinearExtension;
use crate::numeric::rational_to_f64;
use crate::polytope::{gap, order_point_in_simplex, OrderPoint};
use crate::poset::Poset;
use crate::quadrature::integrate;
use crate::scalar::Scalar;

/// Absolute tolerance used for every quadrature in this module.
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Split point for the logarithmic endpoint singularity.
const LOG_SPLIT: f64 = 1e-6;
/// Smallest sample size accepted by the Kolmogorov–Smirnov checks.
pub const MIN_KS_SAMPLES: usize = 10_000;

/// Exact harmonic numbers `H_q = Σ_{i ≤ q} 1/i`, `H_0 = 0`, grown on demand.
#[derive(Clone, Debug)]
pub struct HarmonicTable {
    values: Vec<BigRational>,
}

impl Default for HarmonicTable {
    fn default() -> Self {
        HarmonicTable {
            values: vec![BigRational::zero()],
        }
    }
}

impl HarmonicTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(max_q: usize) -> Self {
        let mut table = Self::default();
        table.get(max_q);
        table
    }

    pub fn get(&mut self, q: usize) -> &BigRational {
        while self.values.len() <= q {
            let next = self.values.len();
            let h = self.values.last().unwrap() + BigRational::new(1.into(), BigInt::from(next));
            self.values.push(h);
        }
        &self.values[q]
    }

    /// Read-only lookup for entries already computed.
    pub fn cached(&self, q: usize) -> Option<&BigRational> {
        self.values.get(q)
    }
}

/// `H_q` as an exact rational.
pub fn harmonic(q: usize) -> BigRational {
    HarmonicTable::new().get(q).clone()
}

/// `H_q` in floating point.
pub fn harmonic_f64(q: usize) -> f64 {
    (1..=q).rev().map(|i| 1.0 / i as f64).sum()
}

fn binomial_f<T: Scalar>(n: usize, k: usize) -> T {
    let b = num_integer::binomial(BigUint::from(n), BigUint::from(k));
    T::from_f64(b.to_f64().unwrap_or(f64::INFINITY)).unwrap_or_else(T::infinity)
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k >= n {
        return Err(Error::Domain(format!("need 0 <= k < n, got n = {n}, k = {k}")));
    }
    Ok(())
}

fn check_unit<T: Scalar>(s: T) -> Result<()> {
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::Domain(format!("s = {s} lies outside [0, 1]")));
    }
    Ok(())
}

/// `f_{n,k}(s) = n C(n-1,k) s^k (1-s)^{n-k-1}`: the Beta(k+1, n-k) density.
pub fn density_f<T: Scalar>(n: usize, k: usize, s: T) -> Result<T> {
    check_nk(n, k)?;
    check_unit(s)?;
    Ok(density_unchecked(n, k, s))
}

fn density_unchecked<T: Scalar>(n: usize, k: usize, s: T) -> T {
    let coef = T::from_usize_lossy(n) * binomial_f::<T>(n - 1, k);
    coef * s.powi(k as i32) * (T::one() - s).powi((n - k - 1) as i32)
}

/// Closed form `J_{n,k}(s) = Σ_{l=k+1}^{n} C(n,l) s^{n-l} (1-s)^l`, the
/// probability that a `f_{n,k}` variable is at most `1 - s`.
pub fn j_closed<T: Scalar>(n: usize, k: usize, s: T) -> T {
    (k + 1..=n)
        .map(|l| binomial_f::<T>(n, l) * s.powi((n - l) as i32) * (T::one() - s).powi(l as i32))
        .sum()
}

/// CDF of `f_{n,k}` at `x`.
pub fn gap_cdf<T: Scalar>(n: usize, k: usize, x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if x >= T::one() {
        T::one()
    } else {
        j_closed(n, k, T::one() - x)
    }
}

/// `k C(n,k) ∫_0^{1-s} t^{n-k} (1-t-s)^{k-1} dt`, for `1 <= k <= n`.
pub fn i_integral(n: usize, k: usize, s: f64) -> Result<f64> {
    if k < 1 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    check_unit(s)?;
    let coef = k as f64 * binomial_f::<f64>(n, k);
    integrate(
        |t: f64| coef * t.powi((n - k) as i32) * (1.0 - t - s).max(0.0).powi((k - 1) as i32),
        0.0,
        1.0 - s,
        QUADRATURE_TOL,
    )
}

/// `n C(n-1,k) ∫_0^{1-s} t^k (1-t)^{n-k-1} dt`.
pub fn j_integral(n: usize, k: usize, s: f64) -> Result<f64> {
    check_nk(n, k)?;
    check_unit(s)?;
    integrate(|t: f64| density_unchecked(n, k, t), 0.0, 1.0 - s, QUADRATURE_TOL)
}

/// `E[ln z]` for `z ~ f_{n,k}`. The logarithmic singularity at 0 is
/// handled by `t = e^{-u}` on `(0, ε)`.
pub fn h_integral(n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    let body = integrate(
        |t: f64| density_unchecked(n, k, t) * t.ln(),
        LOG_SPLIT,
        1.0,
        QUADRATURE_TOL / 2.0,
    )?;
    let u0 = -LOG_SPLIT.ln();
    let tail = integrate(
        |u: f64| {
            let t = (-u).exp();
            -u * density_unchecked(n, k, t) * t
        },
        u0,
        u0 + 60.0,
        QUADRATURE_TOL / 2.0,
    )?;
    Ok(body + tail)
}

/// Residuals `|quadrature - closed form|` for the three integral identities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosedFormResiduals {
    /// `I_{n,k}(s)` against `(1-s)^n`; `None` for `k = 0`, where it is undefined.
    pub i: Option<f64>,
    /// `J_{n,k}(s)` against the binomial tail sum.
    pub j: f64,
    /// `H_{n,k}` against `H_k - H_n` (independent of `s`).
    pub h: f64,
}

impl ClosedFormResiduals {
    pub fn max(&self) -> f64 {
        self.i.unwrap_or(0.0).max(self.j).max(self.h)
    }
}

pub fn i_residual(n: usize, k: usize, s: f64) -> Result<f64> {
    Ok((i_integral(n, k, s)? - (1.0 - s).powi(n as i32)).abs())
}

pub fn j_residual(n: usize, k: usize, s: f64) -> Result<f64> {
    Ok((j_integral(n, k, s)? - j_closed(n, k, s)).abs())
}

pub fn h_residual(n: usize, k: usize) -> Result<f64> {
    let mut table = HarmonicTable::new();
    let exact = table.get(k).clone() - table.get(n).clone();
    Ok((h_integral(n, k)? - rational_to_f64(&exact)).abs())
}

/// Checks all three identities at `(n, k, s)` with `0 <= k < n`.
pub fn closed_form_checks(n: usize, k: usize, s: f64) -> Result<ClosedFormResiduals> {
    check_nk(n, k)?;
    check_unit(s)?;
    Ok(ClosedFormResiduals {
        i: if k >= 1 { Some(i_residual(n, k, s)?) } else { None },
        j: j_residual(n, k, s)?,
        h: h_residual(n, k)?,
    })
}

/// Asymptotic Kolmogorov–Smirnov coefficient `c(α) = sqrt(-ln(α/2) / 2)`.
pub fn ks_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample critical value for `m` observations.
pub fn ks_critical(alpha: f64, m: usize) -> f64 {
    ks_coefficient(alpha) / (m as f64).sqrt()
}

/// Two-sample critical value for sample sizes `m1`, `m2`.
pub fn ks_critical_two_sample(alpha: f64, m1: usize, m2: usize) -> f64 {
    let (a, b) = (m1 as f64, m2 as f64);
    ks_coefficient(alpha) * ((a + b) / (a * b)).sqrt()
}

/// Sup distance between the empirical CDF of `xs` and `cdf`.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(t, &x)| {
            let f = cdf(x);
            (((t + 1) as f64 / m) - f).max(f - t as f64 / m)
        })
        .fold(0.0, f64::max)
}

/// Sup distance between two empirical CDFs.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut s, mut t) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while s < a.len() && t < b.len() {
        let x = a[s].min(b[t]);
        while s < a.len() && a[s] <= x {
            s += 1;
        }
        while t < b.len() && b[t] <= x {
            t += 1;
        }
        d = d.max((s as f64 / na - t as f64 / nb).abs());
    }
    d
}

fn sorted_uniforms<R: Rng + ?Sized>(n: usize, rng: &mut R, buf: &mut Vec<f64>) {
    buf.clear();
    buf.extend((0..n).map(|_| rng.random::<f64>()));
    buf.sort_by(f64::total_cmp);
}

/// Draws `samples` gaps `z_{i+d} - z_i` of sorted uniforms (1-based
/// positions; `i = 0` stands for `z_0 = 0`).
pub fn sample_gaps(n: usize, i: usize, d: usize, samples: usize, seed: u64) -> Result<Vec<f64>> {
    if d == 0 || i + d > n {
        return Err(Error::Domain(format!(
            "need 0 <= i < i + d <= n, got n = {n}, i = {i}, d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = Vec::with_capacity(n);
    Ok((0..samples)
        .map(|_| {
            sorted_uniforms(n, &mut rng, &mut z);
            let lo = if i == 0 { 0.0 } else { z[i - 1] };
            z[i + d - 1] - lo
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
}

impl KsOutcome {
    pub fn passed(&self) -> bool {
        self.statistic <= self.critical
    }
}

/// KS distance between sampled gaps `z_{i+d} - z_i` and `f_{n,d-1}`,
/// with the critical value at significance `alpha`.
pub fn gap_distribution_check(
    n: usize,
    i: usize,
    d: usize,
    samples: usize,
    seed: u64,
    alpha: f64,
) -> Result<KsOutcome> {
    if samples < MIN_KS_SAMPLES {
        return Err(Error::Domain(format!(
            "KS checks need at least {MIN_KS_SAMPLES} samples, got {samples}"
        )));
    }
    let mut gaps = sample_gaps(n, i, d, samples, seed)?;
    Ok(KsOutcome {
        statistic: ks_statistic(&mut gaps, |x| gap_cdf(n, d - 1, x)),
        critical: ks_critical(alpha, samples),
    })
}

/// Two-sample KS between gap samples at positions `i1` and `i2`; the gap
/// law depends on `d` only.
pub fn gap_position_independence(
    n: usize,
    d: usize,
    i1: usize,
    i2: usize,
    samples: usize,
    seed: u64,
    alpha: f64,
) -> Result<KsOutcome> {
    if samples < MIN_KS_SAMPLES {
        return Err(Error::Domain(format!(
            "KS checks need at least {MIN_KS_SAMPLES} samples, got {samples}"
        )));
    }
    let mut a = sample_gaps(n, i1, d, samples, seed)?;
    let mut b = sample_gaps(n, i2, d, samples, seed.wrapping_add(0x9e37_79b9_7f4a_7c15))?;
    Ok(KsOutcome {
        statistic: ks_two_sample(&mut a, &mut b),
        critical: ks_critical_two_sample(alpha, samples, samples),
    })
}

/// Monte Carlo check of `E_{y ∈ O(σ)}[ln d_i(y)] = H_{d_i(σ)-1} - H_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpLnCheck {
    pub estimate: f64,
    pub target: f64,
    pub stderr: f64,
}

impl ExpLnCheck {
    pub fn residual(&self) -> f64 {
        (self.estimate - self.target).abs()
    }
}

pub fn exp_ln_gap_check(
    poset: &Poset,
    ext: &LinearExtension,
    element: usize,
    samples: usize,
    seed: u64,
) -> Result<ExpLnCheck> {
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    if element >= poset.n() {
        return Err(Error::IndexOutOfRange {
            index: element,
            n: poset.n(),
        });
    }
    let d = crate::quantum::d_vector(poset, ext)?[element];
    let mut table = HarmonicTable::new();
    let target = rational_to_f64(&(table.get(d - 1).clone() - table.get(poset.n()).clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut taken = 0usize;
    while taken < samples {
        let y: OrderPoint<f64> = order_point_in_simplex(ext, &mut rng);
        let g = gap(poset, &y.y, element);
        if g <= 0.0 {
            continue;
        }
        let v = g.ln();
        sum += v;
        sum_sq += v * v;
        taken += 1;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = (sum_sq - m * mean * mean) / (m - 1.0);
    Ok(ExpLnCheck {
        estimate: mean,
        target,
        stderr: (var.max(0.0) / m).sqrt(),
    })
}
