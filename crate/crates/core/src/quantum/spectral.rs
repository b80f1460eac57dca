use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A real symmetric linear operator.
pub trait SymmetricOperator<T> {
    fn dim(&self) -> usize;
    /// `out = A x`.
    fn apply(&self, x: &[T], out: &mut [T]);
}

/// Dense row-major symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSymmetric<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseSymmetric<T> {
    /// Builds `A[k][l] = entry(k, l)`; only `k <= l` is evaluated.
    pub fn from_fn(n: usize, entry: impl Fn(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for k in 0..n {
            for l in k..n {
                let v = entry(k, l);
                data[k * n + l] = v;
                data[l * n + k] = v;
            }
        }
        DenseSymmetric { n, data }
    }

    pub fn get(&self, k: usize, l: usize) -> T {
        self.data[k * self.n + l]
    }
}

impl<T: Scalar> SymmetricOperator<T> for DenseSymmetric<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for (row, o) in self.data.chunks_exact(self.n).zip(out.iter_mut()) {
            *o = row.iter().zip(x).map(|(&a, &b)| a * b).sum();
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct PowerOptions {
    /// Relative tolerance on the predicted remaining change.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: 1e-9,
            max_iter: 200_000,
            seed: 0x5eed,
        }
    }
}

pub fn spectral_norm<T: Scalar, A: SymmetricOperator<T> + ?Sized>(a: &A, tol: f64) -> Result<T> {
    spectral_norm_with(
        a,
        &PowerOptions {
            tol,
            ..PowerOptions::default()
        },
    )
}

/// Largest absolute eigenvalue of a symmetric operator by power
/// iteration from a seeded positive random start.
///
/// The estimate is `‖A v‖` for the current unit iterate `v`; for
/// symmetric `A` it increases monotonically towards `‖A‖`, and the ±λ
/// pairs of bipartite nonnegative matrices do not stall it. Iteration
/// stops once the last change, extrapolated geometrically with the
/// observed contraction ratio, is below `tol` relative to the estimate.
pub fn spectral_norm_with<T: Scalar, A: SymmetricOperator<T> + ?Sized>(
    a: &A,
    opts: &PowerOptions,
) -> Result<T> {
    let n = a.dim();
    if n == 0 {
        return Ok(T::zero());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<T> = (0..n).map(|_| T::lit(0.5 + rng.random::<f64>())).collect();
    normalize(&mut v);
    let mut w = vec![T::zero(); n];
    let tol = T::lit(opts.tol);
    let mut estimate = T::zero();
    let mut last_delta: Option<T> = None;
    for iter in 0..opts.max_iter {
        a.apply(&v, &mut w);
        let norm = norm2(&w);
        if norm == T::zero() {
            return Ok(T::zero());
        }
        let delta = (norm - estimate).abs();
        estimate = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = *wi / norm;
        }
        if iter >= 2 && delta <= tol * estimate {
            let remaining = match last_delta {
                Some(prev) if prev > T::zero() && delta < prev => {
                    let r = delta / prev;
                    delta * r / (T::one() - r)
                }
                _ => delta,
            };
            if remaining <= tol * estimate {
                return Ok(estimate);
            }
        }
        last_delta = Some(delta);
    }
    Err(Error::NonConvergence {
        what: "power iteration",
        iterations: opts.max_iter,
        residual: last_delta.map_or(f64::NAN, |d| (d / estimate).as_f64()),
    })
}

fn norm2<T: Scalar>(x: &[T]) -> T {
    x.iter().map(|&v| v * v).sum::<T>().sqrt()
}

fn normalize<T: Scalar>(x: &mut [T]) {
    let s = norm2(x);
    for v in x.iter_mut() {
        *v = *v / s;
    }
}

/// The `m × m` Hilbert matrix `A[k][l] = 1/(k+l-1)` (1-based).
pub fn hilbert_matrix<T: Scalar>(m: usize) -> DenseSymmetric<T> {
    DenseSymmetric::from_fn(m, |k, l| T::one() / T::from_usize_lossy(k + l + 1))
}

pub fn hilbert_norm<T: Scalar>(m: usize) -> Result<T> {
    spectral_norm(&hilbert_matrix::<T>(m), 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrices() {
        let zero = DenseSymmetric::from_fn(3, |_, _| 0.0);
        assert_eq!(spectral_norm(&zero, 1e-9).unwrap(), 0.0);
        let swap = DenseSymmetric::from_fn(2, |k, l| if k == l { 0.0 } else { 1.0 });
        assert!((spectral_norm::<f64, _>(&swap, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        // eigenvalues 3 and -5
        let m = DenseSymmetric::from_fn(2, |k, l| match (k, l) {
            (0, 0) => -1.0,
            (1, 1) => -1.0,
            _ => 4.0,
        });
        assert!((spectral_norm::<f64, _>(&m, 1e-12).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn hilbert_norms_are_below_pi() {
        // reference values from a dense symmetric eigensolver
        let h10: f64 = hilbert_norm(10).unwrap();
        assert!((h10 - 1.751_919_670_265_178).abs() < 1e-9, "{h10}");
        let h200: f64 = hilbert_norm(200).unwrap();
        assert!((h200 - 2.274_266_987_431_881).abs() < 1e-8, "{h200}");
        assert!(h200 < std::f64::consts::PI);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let m = DenseSymmetric::from_fn(3, |k, l| if k == l { 1.0 + k as f64 * 1e-3 } else { 0.0 });
        let opts = PowerOptions {
            tol: 1e-15,
            max_iter: 3,
            seed: 1,
        };
        assert!(matches!(
            spectral_norm_with(&m, &opts),
            Err(Error::NonConvergence { .. })
        ));
    }
}
