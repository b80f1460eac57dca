//! Poset entropy: `H(P) = min_{z ∈ C(P)} -(1/n) Σ ln z_i`, and the
//! classical bound `LB(P) = n (ln n - H(P))`.
//!
//! Solved with a logarithmic barrier on the maximal-chain constraints and
//! damped Newton centering. The objective is its own barrier for `z > 0`.

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_NEWTON_STEPS: usize = 1000;
/// Minimizer coordinates below this are reported as a failure.
const MIN_COORDINATE: f64 = 1e-9;
/// Barrier parameter growth per outer iteration.
const BARRIER_GROWTH: f64 = 8.0;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropySolution<T> {
    /// Entropy in nats.
    pub h: T,
    /// The minimizer, a point of the chain polytope.
    pub z_star: Vec<T>,
    /// Duality gap bound `(m + λ sqrt(m + n)) / t` at termination.
    pub kkt_residual: T,
    pub newton_steps: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct EntropyOptions {
    pub tol: f64,
    pub max_newton_steps: usize,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            tol: DEFAULT_TOL,
            max_newton_steps: DEFAULT_MAX_NEWTON_STEPS,
        }
    }
}

pub fn entropy<T: Scalar>(poset: &Poset, tol: f64) -> Result<EntropySolution<T>> {
    entropy_with(
        poset,
        &EntropyOptions {
            tol,
            ..EntropyOptions::default()
        },
    )
}

pub fn entropy_with<T: Scalar>(poset: &Poset, opts: &EntropyOptions) -> Result<EntropySolution<T>> {
    if !(opts.tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let chains: Vec<Vec<usize>> = poset
        .maximal_chains()
        .into_iter()
        .map(|c| c.elements().to_vec())
        .collect();
    Barrier::new(poset.n(), chains).solve(opts)
}

/// `n (ln n - H(P))`.
pub fn lb<T: Scalar>(poset: &Poset, tol: f64) -> Result<T> {
    let sol = entropy::<T>(poset, tol)?;
    Ok(lb_from_entropy(poset.n(), sol.h))
}

pub fn lb_from_entropy<T: Scalar>(n: usize, h: T) -> T {
    let n = T::from_usize_lossy(n);
    n * (n.ln() - h)
}

struct Barrier {
    n: usize,
    chains: Vec<Vec<usize>>,
}

impl Barrier {
    fn new(n: usize, chains: Vec<Vec<usize>>) -> Self {
        Barrier { n, chains }
    }

    fn slacks<T: Scalar>(&self, z: &[T]) -> Vec<T> {
        self.chains
            .iter()
            .map(|c| T::one() - c.iter().map(|&i| z[i]).sum::<T>())
            .collect()
    }

    /// Barrier value `t f(z) - Σ ln s_c`, or `None` outside the domain.
    fn value<T: Scalar>(&self, t: T, z: &[T]) -> Option<T> {
        if z.iter().any(|&v| v <= T::zero()) {
            return None;
        }
        let s = self.slacks(z);
        if s.iter().any(|&v| v <= T::zero()) {
            return None;
        }
        let n = T::from_usize_lossy(self.n);
        let f = -z.iter().map(|v| v.ln()).sum::<T>() / n;
        Some(t * f - s.iter().map(|v| v.ln()).sum::<T>())
    }

    fn gradient_hessian<T: Scalar>(&self, t: T, z: &[T]) -> (Vec<T>, Vec<T>) {
        let n = self.n;
        let nf = T::from_usize_lossy(n);
        let s = self.slacks(z);
        let mut g: Vec<T> = z.iter().map(|&v| -t / (nf * v)).collect();
        let mut h = vec![T::zero(); n * n];
        for i in 0..n {
            h[i * n + i] = t / (nf * z[i] * z[i]);
        }
        for (c, &sc) in self.chains.iter().zip(&s) {
            let inv = T::one() / sc;
            let inv2 = inv * inv;
            for &i in c {
                g[i] = g[i] + inv;
                for &j in c {
                    h[i * n + j] = h[i * n + j] + inv2;
                }
            }
        }
        (g, h)
    }

    /// Suboptimality bound of an approximately centered point with Newton
    /// decrement `lambda`.
    fn gap_bound<T: Scalar>(&self, m: T, t: T, lambda: T) -> T {
        let nu = m + T::from_usize_lossy(self.n);
        (m + lambda * nu.sqrt()) / t
    }

    fn solve<T: Scalar>(&self, opts: &EntropyOptions) -> Result<EntropySolution<T>> {
        let n = self.n;
        let m = T::from_usize_lossy(self.chains.len());
        let longest = self.chains.iter().map(Vec::len).max().unwrap_or(1);
        let mut z = vec![T::one() / T::from_usize_lossy(longest + 1); n];
        let tol = T::lit(opts.tol);
        let mut t = T::one();
        let mut steps = 0;
        let mut lambda;
        let centering_tol = T::epsilon().sqrt() * T::lit(1e-4);
        loop {
            // centering
            loop {
                let (g, mut h) = self.gradient_hessian(t, &z);
                let mut dz: Vec<T> = g.iter().map(|&v| -v).collect();
                if !cholesky_solve(&mut h, n, &mut dz) {
                    return Err(Error::NonConvergence {
                        what: "entropy solver (singular Newton system)",
                        iterations: steps,
                        residual: f64::NAN,
                    });
                }
                let decrement: T = -g.iter().zip(&dz).map(|(&a, &b)| a * b).sum::<T>();
                lambda = decrement.max(T::zero()).sqrt();
                if decrement / T::lit(2.0) <= centering_tol {
                    break;
                }
                if steps >= opts.max_newton_steps {
                    return Err(Error::NonConvergence {
                        what: "entropy solver",
                        iterations: steps,
                        residual: self.gap_bound(m, t, lambda).as_f64(),
                    });
                }
                steps += 1;
                let current = self.value(t, &z).expect("iterate stays interior");
                let mut alpha = T::one();
                let trial = |alpha: T| -> Vec<T> {
                    z.iter().zip(&dz).map(|(&v, &d)| v + alpha * d).collect()
                };
                loop {
                    let cand = trial(alpha);
                    if let Some(v) = self.value(t, &cand) {
                        if v < current && v <= current - T::lit(0.25) * alpha * decrement {
                            z = cand;
                            break;
                        }
                    }
                    alpha = alpha * T::lit(0.5);
                    if alpha < T::lit(1e-12) {
                        // no measurable progress left at this barrier weight
                        break;
                    }
                }
                if alpha < T::lit(1e-12) {
                    break;
                }
            }
            let residual = self.gap_bound(m, t, lambda);
            if residual <= tol {
                if let Some(v) = z.iter().find(|&&v| v < T::lit(MIN_COORDINATE)) {
                    return Err(Error::NonConvergence {
                        what: "entropy solver (minimizer coordinate at the boundary)",
                        iterations: steps,
                        residual: v.as_f64(),
                    });
                }
                let nf = T::from_usize_lossy(n);
                let h = -z.iter().map(|v| v.ln()).sum::<T>() / nf;
                return Ok(EntropySolution {
                    h,
                    z_star: z,
                    kkt_residual: residual,
                    newton_steps: steps,
                });
            }
            t = t * T::lit(BARRIER_GROWTH);
        }
    }
}

/// Solves `A x = b` in place for symmetric positive definite `A`
/// (row-major `n × n`). Returns `false` if `A` is not numerically SPD.
pub(crate) fn cholesky_solve<T: Scalar>(a: &mut [T], n: usize, b: &mut [T]) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d = d - a[j * n + k] * a[j * n + k];
        }
        if !(d > T::zero()) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s = s - a[i * n + k] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s = s - a[k * n + i] * b[k];
        }
        b[i] = s / a[i * n + i];
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sp::parse_sp;

    #[test]
    fn pair_plus_point_entropy() {
        let p = Poset::from_relations(3, [(1, 0)]).unwrap();
        let sol = entropy::<f64>(&p, 1e-10).unwrap();
        assert!((sol.h - (2.0 / 3.0) * 2f64.ln()).abs() < 1e-8, "{}", sol.h);
        for (z, e) in sol.z_star.iter().zip([0.5, 0.5, 1.0]) {
            assert!((z - e).abs() < 1e-7);
        }
        assert!(sol.kkt_residual <= 1e-10);
        let lb: f64 = lb(&p, 1e-10).unwrap();
        assert!((lb - 1.909543).abs() < 1e-6, "{lb}");
    }

    #[test]
    fn chain_and_antichain_entropy() {
        for n in 1..7 {
            let c = entropy::<f64>(&Poset::chain(n), 1e-9).unwrap();
            assert!((c.h - (n as f64).ln()).abs() < 1e-7);
            assert!(c.z_star.iter().all(|z| (z - 1.0 / n as f64).abs() < 1e-6));
            let a = entropy::<f64>(&Poset::antichain(n), 1e-9).unwrap();
            assert!(a.h.abs() < 1e-7);
            assert!(a.z_star.iter().all(|z| (z - 1.0).abs() < 1e-6));
            assert!(lb::<f64>(&Poset::chain(n), 1e-9).unwrap().abs() < 1e-6);
            let anti_lb: f64 = lb(&Poset::antichain(n), 1e-9).unwrap();
            assert!((anti_lb - n as f64 * (n as f64).ln()).abs() < 1e-6);
        }
    }

    #[test]
    fn minimizer_is_feasible() {
        let p = parse_sp(". * (.+.+.) * (. + (. * .))").unwrap().realize();
        let sol = entropy::<f64>(&p, 1e-8).unwrap();
        let chains = p.maximal_chains();
        assert!(crate::polytope::max_chain_sum(&chains, &sol.z_star) <= 1.0);
        assert!(sol.z_star.iter().all(|&z| z > 0.0));
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(entropy::<f64>(&Poset::chain(2), 0.0).is_err());
    }

    #[test]
    fn iteration_cap_reports_nonconvergence() {
        let opts = EntropyOptions {
            tol: 1e-8,
            max_newton_steps: 2,
        };
        assert!(matches!(
            entropy_with::<f64>(&Poset::chain(4), &opts),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn single_precision_solve() {
        let p = Poset::from_relations(3, [(1, 0)]).unwrap();
        let sol = entropy::<f32>(&p, 1e-4).unwrap();
        assert!((sol.h - (2.0f32 / 3.0) * 2f32.ln()).abs() < 1e-3);
    }

    #[test]
    fn cholesky_small_system() {
        let mut a: Vec<f64> = vec![4.0, 2.0, 2.0, 3.0];
        let mut b: Vec<f64> = vec![2.0, 1.0];
        assert!(cholesky_solve(&mut a, 2, &mut b));
        assert!((b[0] - 0.5).abs() < 1e-15 && b[1].abs() < 1e-15);
        let mut bad = vec![1.0, 2.0, 2.0, 1.0];
        assert!(!cholesky_solve(&mut bad, 2, &mut [0.0, 0.0]));
    }
}
