//! The quantum side: d-vectors, the exact adversary quantity QLB, its
//! polytope form QH, series-parallel recurrences, and the adversary
//! matrices with their spectral certificates.

mod adversary;
mod spectral;

pub use adversary::{
    build_adversary, build_adversary_with, gamma_ij, verify_adversary, AdversaryCertificate,
    AdversaryMatrix, VerifyOptions, DEFAULT_MATRIX_CAP,
};
pub use spectral::{
    hilbert_matrix, hilbert_norm, spectral_norm, spectral_norm_with, DenseSymmetric,
    PowerOptions, SymmetricOperator,
};

use std::ops::Index;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linext::{enumerate_extensions_with, LinearExtension, Limits};
use crate::numeric::{ln_binomial, rational_from_usize, rational_to_f64};
use crate::orderstats::HarmonicTable;
use crate::polytope::PolytopeSampler;
use crate::poset::Poset;
use crate::sp::SpExpr;

/// `d_i(σ)`: the rank gap from element `i` down to its highest-ranked
/// predecessor, or the rank itself for a minimal element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DVector(Vec<usize>);

impl DVector {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }
}

impl Index<usize> for DVector {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

pub fn d_vector(poset: &Poset, ext: &LinearExtension) -> Result<DVector> {
    if !ext.is_extension_of(poset) {
        return Err(Error::NotAnExtension);
    }
    Ok(DVector(d_values(poset, ext)))
}

fn d_values(poset: &Poset, ext: &LinearExtension) -> Vec<usize> {
    (0..poset.n())
        .map(|i| {
            let top = poset.predecessors(i).map(|j| ext.rank(j)).max().unwrap_or(0);
            ext.rank(i) - top
        })
        .collect()
}

/// `Σ_i H_{d_i(σ) - 1}` for one extension.
pub fn harmonic_sum(table: &mut HarmonicTable, d: &DVector) -> BigRational {
    d.as_slice()
        .iter()
        .fold(BigRational::zero(), |acc, &di| acc + table.get(di - 1))
}

/// Exact `QLB(P) = E_σ[Σ_i H_{d_i(σ)-1}]` by enumerating `Δ(P)`.
pub fn qlb_enum(poset: &Poset) -> Result<BigRational> {
    qlb_enum_with(poset, &Limits::default())
}

pub fn qlb_enum_with(poset: &Poset, limits: &Limits) -> Result<BigRational> {
    let n = poset.n();
    // tally[d] counts (σ, i) with d_i(σ) = d
    let mut tally = vec![0u64; n + 1];
    let mut count = 0u64;
    for ext in enumerate_extensions_with(poset, limits)? {
        for d in d_values(poset, &ext) {
            tally[d] += 1;
        }
        count += 1;
    }
    let mut table = HarmonicTable::with_capacity(n);
    let total = tally
        .iter()
        .enumerate()
        .skip(2)
        .fold(BigRational::zero(), |acc, (d, &c)| {
            acc + table.get(d - 1).clone() * BigRational::from_integer(BigInt::from(c))
        });
    Ok(total / BigRational::from_integer(BigInt::from(count)))
}

/// `QH(P) = H_n - QLB(P) / n`.
pub fn qh_exact(poset: &Poset) -> Result<BigRational> {
    qh_exact_with(poset, &Limits::default())
}

pub fn qh_exact_with(poset: &Poset, limits: &Limits) -> Result<BigRational> {
    let qlb = qlb_enum_with(poset, limits)?;
    Ok(qh_from_qlb(poset.n(), &qlb))
}

pub fn qh_from_qlb(n: usize, qlb: &BigRational) -> BigRational {
    HarmonicTable::new().get(n).clone() - qlb / rational_from_usize(n)
}

/// Sample mean and standard error of `-(1/n) Σ ln z_i` over uniform
/// points of the chain polytope.
pub fn qh_mc(poset: &Poset, samples: usize, seed: u64) -> Result<(f64, f64)> {
    qh_mc_with(poset, samples, seed, &Limits::default())
}

pub fn qh_mc_with(poset: &Poset, samples: usize, seed: u64, limits: &Limits) -> Result<(f64, f64)> {
    if samples < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    let sampler = PolytopeSampler::new(poset, limits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    let mut taken = 0;
    while taken < samples {
        let z = sampler.chain_point::<f64, _>(&mut rng);
        // a zero coordinate has probability zero; redraw
        if z.z.iter().any(|&v| v <= 0.0) {
            continue;
        }
        let v = z.neg_mean_log();
        sum += v;
        sum_sq += v * v;
        taken += 1;
    }
    let m = samples as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok((mean, (var / m).sqrt()))
}

/// `(n1+n2) H_{n1+n2} - n1 H_{n1} - n2 H_{n2}`: the QLB gained by a
/// parallel composition of blocks of sizes `n1` and `n2`.
pub fn parallel_gain(table: &mut HarmonicTable, n1: usize, n2: usize) -> BigRational {
    let n = n1 + n2;
    let hn = table.get(n).clone();
    (hn.clone() - table.get(n1)) * rational_from_usize(n1)
        + (hn - table.get(n2)) * rational_from_usize(n2)
}

/// QLB of a series-parallel expression from the composition rules:
/// series adds, parallel adds plus [`parallel_gain`]. n-ary nodes fold
/// left.
pub fn qlb_sp(expr: &SpExpr) -> Result<BigRational> {
    fn go(e: &SpExpr, table: &mut HarmonicTable) -> Result<(usize, BigRational)> {
        match e {
            SpExpr::Singleton => Ok((1, BigRational::zero())),
            SpExpr::NBlock(_) => Err(Error::UnsupportedNBlock),
            SpExpr::Series(children) => {
                let mut size = 0;
                let mut acc = BigRational::zero();
                for child in children {
                    let (s, q) = go(child, table)?;
                    size += s;
                    acc += q;
                }
                Ok((size, acc))
            }
            SpExpr::Parallel(children) => {
                let mut iter = children.iter();
                let (mut size, mut acc) = go(iter.next().expect("non-empty node"), table)?;
                for child in iter {
                    let (s, q) = go(child, table)?;
                    acc = acc + q + parallel_gain(table, size, s);
                    size += s;
                }
                Ok((size, acc))
            }
        }
    }
    go(expr, &mut HarmonicTable::new()).map(|(_, q)| q)
}

/// Analytic bounds for `N_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct NkBounds {
    /// `ln C(2k, k)`, the ITLB of the sub-extension `A + B`.
    pub itlb_lo: f64,
    /// `ln C(4k, 2k)`, the ITLB of the relaxation `(A ⊕ B) + (C ⊕ D)`.
    pub itlb_hi: f64,
    /// `2 (2k H_{2k} - 2k H_k)`, the QLB of the extension `(A+B) ⊕ (C+D)`.
    pub qlb_lo: f64,
    pub qlb_lo_exact: BigRational,
}

pub fn nk_bounds(k: usize) -> Result<NkBounds> {
    if k == 0 {
        return Err(Error::Domain("N_k needs k >= 1".into()));
    }
    let mut table = HarmonicTable::new();
    let qlb_lo_exact = parallel_gain(&mut table, k, k) * rational_from_usize(2);
    Ok(NkBounds {
        itlb_lo: ln_binomial(2 * k as u64, k as u64),
        itlb_hi: ln_binomial(4 * k as u64, 2 * k as u64),
        qlb_lo: rational_to_f64(&qlb_lo_exact),
        qlb_lo_exact,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TechRatio {
    pub n1: usize,
    pub n2: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TechConstant {
    pub c_min: f64,
    pub argmin: (usize, usize),
    /// Every `(n1, n2)` with `1 <= n1 <= n2 <= max_n`, row-major.
    pub ratios: Vec<TechRatio>,
}

/// `[(n1+n2) H_{n1+n2} - n1 H_{n1} - n2 H_{n2}] / ln C(n1+n2, n1)`.
///
/// Floating-point evaluation; both parts are sums of positive terms.
/// [`tech_constant`] evaluates the numerator exactly instead.
pub fn tech_ratio(n1: usize, n2: usize) -> f64 {
    let n = n1 + n2;
    let tail = |from: usize| (from + 1..=n).rev().map(|i| 1.0 / i as f64).sum::<f64>();
    let gain = n1 as f64 * tail(n1) + n2 as f64 * tail(n2);
    gain / ln_binomial_f64(n, n1.min(n2))
}

/// `ln C(n, k)` as a sum of positive logarithms.
fn ln_binomial_f64(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Harmonic numbers over a common denominator: `H_q = numer[q] / lcm`
/// with `lcm = lcm(1, ..., max)`, so exact sums need no gcd work.
struct ScaledHarmonics {
    lcm: BigInt,
    numer: Vec<BigInt>,
}

impl ScaledHarmonics {
    fn new(max: usize) -> Self {
        let lcm = (1..=max).fold(BigInt::from(1), |acc, q| num_integer::Integer::lcm(&acc, &BigInt::from(q)));
        let mut numer = vec![BigInt::zero()];
        for q in 1..=max {
            let next = &numer[q - 1] + &lcm / q;
            numer.push(next);
        }
        ScaledHarmonics { lcm, numer }
    }

    /// Exact `n1 (H_n - H_{n1}) + n2 (H_n - H_{n2})`, rounded once.
    fn gain(&self, n1: usize, n2: usize) -> f64 {
        let n = n1 + n2;
        let scaled = &self.numer[n] * n - &self.numer[n1] * n1 - &self.numer[n2] * n2;
        rational_to_f64(&BigRational::new_raw(scaled, self.lcm.clone()))
    }
}

/// [`tech_ratio`] with the numerator in exact rationals and the
/// denominator from the exact binomial.
pub fn tech_ratio_exact(table: &mut HarmonicTable, n1: usize, n2: usize) -> f64 {
    rational_to_f64(&parallel_gain(table, n1, n2)) / ln_binomial((n1 + n2) as u64, n1 as u64)
}

/// Scans all `1 <= n1 <= n2 <= max_n` for the smallest ratio.
pub fn tech_constant(max_n: usize) -> Result<TechConstant> {
    if max_n < 2 {
        return Err(Error::Domain("max_n must be at least 2".into()));
    }
    let harmonics = ScaledHarmonics::new(2 * max_n);
    let ratios: Vec<TechRatio> = (1..=max_n)
        .into_par_iter()
        .flat_map_iter(|n1| {
            let harmonics = &harmonics;
            (n1..=max_n).map(move |n2| TechRatio {
                n1,
                n2,
                ratio: harmonics.gain(n1, n2) / ln_binomial_f64(n1 + n2, n1.min(n2)),
            })
        })
        .collect();
    let best = ratios
        .iter()
        .min_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("max_n >= 2 gives at least one pair");
    Ok(TechConstant {
        c_min: best.ratio,
        argmin: (best.n1, best.n2),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;
    use crate::sp::parse_sp;

    fn pair_plus_point() -> Poset {
        Poset::from_relations(3, [(1, 0)]).unwrap()
    }

    #[test]
    fn d_vector_examples() {
        // element order (b, c, a)
        let ext = LinearExtension::from_order(vec![1, 2, 0]);
        assert_eq!(d_vector(&pair_plus_point(), &ext).unwrap().as_slice(), &[2, 1, 2]);
        let id = LinearExtension::from_order((0..5).collect());
        assert_eq!(d_vector(&Poset::chain(5), &id).unwrap().as_slice(), &[1; 5]);
        let ext = LinearExtension::from_order(vec![2, 0, 3, 1]);
        let d = d_vector(&Poset::antichain(4), &ext).unwrap();
        assert_eq!(d.as_slice(), ext.ranks());
        let bad = LinearExtension::from_order(vec![0, 1, 2]);
        assert!(matches!(d_vector(&pair_plus_point(), &bad), Err(Error::NotAnExtension)));
    }

    #[test]
    fn qlb_examples() {
        assert!(qlb_enum(&Poset::chain(6)).unwrap().is_zero());
        assert_eq!(qlb_enum(&Poset::antichain(2)).unwrap(), rational(1, 1));
        assert_eq!(qlb_enum(&pair_plus_point()).unwrap(), rational(3, 2));
        assert_eq!(qlb_enum(&Poset::antichain(3)).unwrap(), rational(5, 2));
    }

    #[test]
    fn qh_examples() {
        assert_eq!(qh_exact(&Poset::chain(1)).unwrap(), rational(1, 1));
        for n in 1..6 {
            assert_eq!(qh_exact(&Poset::antichain(n)).unwrap(), rational(1, 1));
        }
        assert_eq!(qh_exact(&pair_plus_point()).unwrap(), rational(4, 3));
    }

    #[test]
    fn qh_monte_carlo_examples() {
        for (p, exact, seed) in [
            (Poset::antichain(3), 1.0, 1),
            (pair_plus_point(), 4.0 / 3.0, 2),
            (Poset::chain(2), 1.5, 3),
        ] {
            let (est, se) = qh_mc(&p, 100_000, seed).unwrap();
            assert!((est - exact).abs() <= 3.0 * se, "{est} ± {se} vs {exact}");
        }
        assert!(qh_mc(&pair_plus_point(), 1, 0).is_err());
    }

    #[test]
    fn qlb_sp_examples() {
        assert!(qlb_sp(&parse_sp(". * . * .").unwrap()).unwrap().is_zero());
        assert_eq!(qlb_sp(&parse_sp("(. * .) + .").unwrap()).unwrap(), rational(3, 2));
        for k in 1..6 {
            let e = parse_sp(&format!("chain({k}) + chain({k})")).unwrap();
            let mut t = HarmonicTable::new();
            let expected = (t.get(2 * k).clone() - t.get(k).clone()) * rational_from_usize(2 * k);
            assert_eq!(qlb_sp(&e).unwrap(), expected);
        }
        assert!(matches!(qlb_sp(&SpExpr::NBlock(1)), Err(Error::UnsupportedNBlock)));
    }

    #[test]
    fn nk_bound_values() {
        let b = nk_bounds(1).unwrap();
        assert!((b.itlb_lo - 2f64.ln()).abs() < 1e-15);
        assert!((b.itlb_hi - 6f64.ln()).abs() < 1e-15);
        assert_eq!(b.qlb_lo_exact, rational(2, 1));
        let n2 = SpExpr::NBlock(2).realize();
        assert!(rational_to_f64(&qlb_enum(&n2).unwrap()) >= nk_bounds(2).unwrap().qlb_lo);
        assert!(nk_bounds(0).is_err());
    }

    #[test]
    fn tech_ratio_closed_forms() {
        assert!((tech_ratio(1, 1) - 1.0 / 2f64.ln()).abs() < 1e-14);
        for n in 2..20 {
            let expected = crate::orderstats::harmonic_f64(n - 1) / (n as f64).ln();
            assert!((tech_ratio(1, n - 1) - expected).abs() < 1e-12);
        }
        let tc = tech_constant(2).unwrap();
        assert_eq!(tc.ratios.len(), 3);
        assert!(tc.ratios.iter().any(|r| (r.n1, r.n2) == (1, 1)));
        assert!(tech_constant(1).is_err());
    }

    #[test]
    fn float_ratio_matches_exact_ratio() {
        let mut table = HarmonicTable::new();
        for (n1, n2) in [(1, 1), (2, 3), (7, 7), (1, 499), (250, 250), (123, 456), (500, 500)] {
            let exact = tech_ratio_exact(&mut table, n1, n2);
            assert!((tech_ratio(n1, n2) - exact).abs() <= 1e-13 * exact, "{n1} {n2}");
            let scan = tech_constant(n2.max(2)).unwrap();
            let r = scan.ratios.iter().find(|r| (r.n1, r.n2) == (n1, n2)).unwrap();
            assert!((r.ratio - exact).abs() <= 1e-14 * exact, "{n1} {n2}");
        }
    }
}
