//! Order and chain polytopes, the piecewise-linear transfer map between
//! them, and uniform samplers.
//!
//! `O(P)` holds the points of `[0,1]^n` that are monotone along the order.
//! `C(P)` holds the nonnegative points whose sum along every chain is at
//! most one. The transfer map sends `y ∈ O(P)` to the vector of gaps
//! `d_i(y)` to the nearest predecessor (or `y_i` for a minimal element);
//! it is a volume-preserving bijection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linext::{ExtensionSampler, LinearExtension, Limits};
use crate::poset::{Chain, Poset};
use crate::scalar::Scalar;

/// Coordinate tolerance for membership tests.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// A point of the order polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderPoint<T> {
    pub y: Vec<T>,
}

/// A point of the chain polytope.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainPoint<T> {
    pub z: Vec<T>,
}

impl<T: Scalar> OrderPoint<T> {
    pub fn new(y: Vec<T>) -> Self {
        OrderPoint { y }
    }
}

impl<T: Scalar> ChainPoint<T> {
    pub fn new(z: Vec<T>) -> Self {
        ChainPoint { z }
    }

    /// `-(1/n) Σ ln z_i`.
    pub fn neg_mean_log(&self) -> T {
        let n = T::from_usize_lossy(self.z.len());
        -self.z.iter().map(|z| z.ln()).sum::<T>() / n
    }
}

fn check_len(poset: &Poset, len: usize) -> Result<()> {
    if len != poset.n() {
        return Err(Error::SizeMismatch {
            left: len,
            right: poset.n(),
        });
    }
    Ok(())
}

/// Gap to the nearest predecessor, or the coordinate itself for a
/// minimal element.
pub fn gap<T: Scalar>(poset: &Poset, y: &[T], i: usize) -> T {
    poset
        .predecessors(i)
        .map(|j| y[i] - y[j])
        .fold(None, |m: Option<T>, g| Some(m.map_or(g, |m| m.min(g))))
        .unwrap_or(y[i])
}

/// Applies the transfer map `O(P) → C(P)`.
pub fn transfer<T: Scalar>(poset: &Poset, point: &OrderPoint<T>) -> Result<ChainPoint<T>> {
    check_len(poset, point.y.len())?;
    let tol = T::lit(FEASIBILITY_TOL);
    let y = &point.y;
    for (i, &v) in y.iter().enumerate() {
        if v < -tol || v > T::one() + tol || v.is_nan() {
            return Err(Error::Domain(format!(
                "coordinate {} = {v} lies outside [0, 1]",
                i + 1
            )));
        }
    }
    for (j, i) in poset.relations() {
        if y[j] > y[i] + tol {
            return Err(Error::NotConsistent { i: j, j: i });
        }
    }
    let z = (0..poset.n()).map(|i| gap(poset, y, i)).collect();
    Ok(ChainPoint { z })
}

/// Inverts the transfer map: `y_i = z_i + max_{j < i} y_j`, evaluated in
/// topological order. The same recursion gives the heaviest chain sum, so
/// membership in `C(P)` is checked without enumerating chains.
pub fn transfer_inverse<T: Scalar>(poset: &Poset, point: &ChainPoint<T>) -> Result<OrderPoint<T>> {
    check_len(poset, point.z.len())?;
    let tol = T::lit(FEASIBILITY_TOL);
    if let Some((i, v)) = point.z.iter().enumerate().find(|(_, &v)| v < -tol || v.is_nan()) {
        return Err(Error::NotInChainPolytope(format!(
            "coordinate {} = {v} is negative",
            i + 1
        )));
    }
    let y = heaviest_chain_sums(poset, &poset.topological_order(), &point.z);
    if let Some((i, v)) = y.iter().enumerate().find(|(_, &v)| v > T::one() + tol) {
        return Err(Error::NotInChainPolytope(format!(
            "a chain ending at element {} sums to {v}",
            i + 1
        )));
    }
    Ok(OrderPoint { y })
}

/// For each element, the largest sum of `weights` over chains ending there.
fn heaviest_chain_sums<T: Scalar>(poset: &Poset, topo: &[usize], weights: &[T]) -> Vec<T> {
    let mut acc = vec![T::zero(); poset.n()];
    for &i in topo {
        let below = poset
            .predecessors(i)
            .map(|j| acc[j])
            .fold(T::zero(), |a, b| a.max(b));
        acc[i] = weights[i] + below;
    }
    acc
}

/// Largest chain sum over an explicit chain family.
pub fn max_chain_sum<T: Scalar>(chains: &[Chain], z: &[T]) -> T {
    chains
        .iter()
        .map(|c| c.elements().iter().map(|&i| z[i]).sum::<T>())
        .fold(T::zero(), |a, b| a.max(b))
}

/// Places sorted uniforms according to an extension: the result is
/// uniform on the simplex `O(σ)`.
pub fn order_point_in_simplex<T: Scalar, R: Rng + ?Sized>(
    ext: &LinearExtension,
    rng: &mut R,
) -> OrderPoint<T> {
    let mut u: Vec<f64> = (0..ext.len()).map(|_| rng.random::<f64>()).collect();
    u.sort_by(f64::total_cmp);
    OrderPoint {
        y: ext.ranks().iter().map(|&r| T::lit(u[r - 1])).collect(),
    }
}

/// Reusable uniform sampler over `O(P)` and `C(P)`.
#[derive(Clone, Debug)]
pub struct PolytopeSampler {
    poset: Poset,
    extensions: ExtensionSampler,
}

impl PolytopeSampler {
    pub fn new(poset: &Poset, limits: &Limits) -> Result<Self> {
        Ok(PolytopeSampler {
            poset: poset.clone(),
            extensions: ExtensionSampler::new(poset, limits)?,
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    /// Uniform on `O(P)`: a uniform extension, then sorted uniforms.
    pub fn order_point<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> OrderPoint<T> {
        let ext = self.extensions.sample(rng);
        order_point_in_simplex(&ext, rng)
    }

    /// Uniform on `C(P)`, the transfer image of a uniform order point.
    pub fn chain_point<T: Scalar, R: Rng + ?Sized>(&self, rng: &mut R) -> ChainPoint<T> {
        let y = self.order_point(rng);
        transfer(&self.poset, &y).expect("sampled points lie in O(P)")
    }
}

pub fn sample_order_point<T: Scalar>(poset: &Poset, seed: u64) -> Result<OrderPoint<T>> {
    let sampler = PolytopeSampler::new(poset, &Limits::default())?;
    Ok(sampler.order_point(&mut ChaCha8Rng::seed_from_u64(seed)))
}

pub fn sample_chain_point<T: Scalar>(poset: &Poset, seed: u64) -> Result<ChainPoint<T>> {
    let sampler = PolytopeSampler::new(poset, &Limits::default())?;
    Ok(sampler.chain_point(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Hit-or-miss estimate of `vol C(P)` from uniform points of the unit
/// cube. Returns the estimate and its binomial standard error.
pub fn chain_polytope_volume_mc(poset: &Poset, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::Domain("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = poset.topological_order();
    let preds: Vec<Vec<usize>> = (0..poset.n()).map(|i| poset.predecessors(i).collect()).collect();
    let mut z = vec![0.0f64; poset.n()];
    let mut acc = vec![0.0f64; poset.n()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for v in z.iter_mut() {
            *v = rng.random();
        }
        let mut inside = true;
        for &i in &topo {
            let below = preds[i].iter().map(|&j| acc[j]).fold(0.0, f64::max);
            acc[i] = z[i] + below;
            if acc[i] > 1.0 {
                inside = false;
                break;
            }
        }
        hits += inside as usize;
    }
    let p = hits as f64 / samples as f64;
    Ok((p, (p * (1.0 - p) / samples as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair_plus_point() -> Poset {
        Poset::from_relations(3, [(1, 0)]).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn transfer_examples() {
        let z = transfer(&pair_plus_point(), &OrderPoint::new(vec![0.5, 0.2, 0.7])).unwrap();
        assert!(close(&z.z, &[0.3, 0.2, 0.7], 1e-15));
        let y = vec![0.9, 0.1, 0.4];
        let z = transfer(&Poset::antichain(3), &OrderPoint::new(y.clone())).unwrap();
        assert_eq!(z.z, y);
        let z = transfer(&Poset::chain(3), &OrderPoint::new(vec![0.1, 0.4, 0.9])).unwrap();
        assert!(close(&z.z, &[0.1, 0.3, 0.5], 1e-15));
    }

    #[test]
    fn transfer_rejects_inconsistent_points() {
        assert!(matches!(
            transfer(&Poset::chain(2), &OrderPoint::new(vec![0.6, 0.5])),
            Err(Error::NotConsistent { i: 0, j: 1 })
        ));
        assert!(transfer(&Poset::chain(2), &OrderPoint::new(vec![0.1, 1.5])).is_err());
        assert!(transfer(&Poset::chain(2), &OrderPoint::new(vec![0.1])).is_err());
    }

    #[test]
    fn inverse_examples() {
        let cases: [(Poset, Vec<f64>); 3] = [
            (pair_plus_point(), vec![0.5, 0.2, 0.7]),
            (Poset::antichain(3), vec![0.9, 0.1, 0.4]),
            (Poset::chain(3), vec![0.1, 0.4, 0.9]),
        ];
        for (p, y) in cases {
            let z = transfer(&p, &OrderPoint::new(y.clone())).unwrap();
            let back = transfer_inverse(&p, &z).unwrap();
            assert!(close(&back.y, &y, 1e-12));
        }
        let y = transfer_inverse(&pair_plus_point(), &ChainPoint::new(vec![0.5, 0.5, 1.0])).unwrap();
        assert!(close(&y.y, &[1.0, 0.5, 1.0], 0.0));
        let y = transfer_inverse(&pair_plus_point(), &ChainPoint::new(vec![0.0; 3])).unwrap();
        assert_eq!(y.y, vec![0.0; 3]);
    }

    #[test]
    fn inverse_rejects_points_outside() {
        assert!(matches!(
            transfer_inverse(&Poset::chain(2), &ChainPoint::new(vec![0.6, 0.6])),
            Err(Error::NotInChainPolytope(_))
        ));
        assert!(matches!(
            transfer_inverse(&Poset::chain(2), &ChainPoint::new(vec![-0.1, 0.6])),
            Err(Error::NotInChainPolytope(_))
        ));
    }

    #[test]
    fn transfer_works_in_single_precision() {
        let z = transfer(&Poset::chain(3), &OrderPoint::new(vec![0.25f32, 0.5, 1.0])).unwrap();
        assert_eq!(z.z, vec![0.25f32, 0.25, 0.5]);
    }

    #[test]
    fn sampled_points_are_consistent() {
        let p = pair_plus_point();
        let sampler = PolytopeSampler::new(&p, &Limits::default()).unwrap();
        let chains = p.maximal_chains();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let y: OrderPoint<f64> = sampler.order_point(&mut rng);
            assert!(y.y[1] <= y.y[0]);
            let z = transfer(&p, &y).unwrap();
            assert!(max_chain_sum(&chains, &z.z) <= 1.0 + 1e-12);
        }
        let c2: OrderPoint<f64> = sample_order_point(&Poset::chain(2), 11).unwrap();
        assert!(c2.y[0] <= c2.y[1]);
    }

    #[test]
    fn chain2_mean_coordinate() {
        // uniform on the triangle z1 + z2 <= 1: E[z1] = 1/3
        let sampler = PolytopeSampler::new(&Poset::chain(2), &Limits::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let m = 100_000;
        let xs: Vec<f64> = (0..m).map(|_| sampler.chain_point::<f64, _>(&mut rng).z[0]).collect();
        let mean = xs.iter().sum::<f64>() / m as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        assert!((mean - 1.0 / 3.0).abs() < 4.0 * (var / m as f64).sqrt());
    }

    #[test]
    fn volume_examples() {
        assert_eq!(chain_polytope_volume_mc(&Poset::antichain(3), 1000, 1).unwrap(), (1.0, 0.0));
        let (v, se) = chain_polytope_volume_mc(&Poset::chain(2), 100_000, 1).unwrap();
        assert!((v - 0.5).abs() < 4.0 * se);
        let (v, se) = chain_polytope_volume_mc(&pair_plus_point(), 100_000, 2).unwrap();
        assert!((v - 0.5).abs() < 3.0 * se);
        assert!(chain_polytope_volume_mc(&pair_plus_point(), 0, 2).is_err());
    }
}
