use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_rational::BigRational;
use rayon::prelude::*;

use super::spectral::{spectral_norm_with, PowerOptions, SymmetricOperator};
use super::{d_values, qlb_enum_with};
use crate::error::{Error, Result};
use crate::linext::{count_extensions_with, enumerate_extensions_with, LinearExtension, Limits};
use crate::numeric::rational_to_f64;
use crate::poset::Poset;
use crate::scalar::Scalar;

pub const DEFAULT_MATRIX_CAP: usize = 4000;

/// Sparse symmetric adversary matrix indexed by linear extensions in
/// lexicographic order.
///
/// For each extension σ and each element `i`, moving `i` down by `d`
/// positions (for `1 <= d <= d_i(σ) - 1`) yields another extension τ;
/// both `(σ, τ)` and `(τ, σ)` are set to `1/d`. Elements passed over by
/// such a move are incomparable to `i`, so τ never needs a membership
/// test.
#[derive(Clone, Debug)]
pub struct AdversaryMatrix<T> {
    extensions: Vec<LinearExtension>,
    index_of: HashMap<Vec<usize>, usize>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
    /// Gap `d` of the move behind each stored entry.
    moves: Vec<usize>,
}

impl<T: Scalar> AdversaryMatrix<T> {
    pub fn dim(&self) -> usize {
        self.extensions.len()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn extensions(&self) -> &[LinearExtension] {
        &self.extensions
    }

    pub fn index_of(&self, ext: &LinearExtension) -> Option<usize> {
        self.index_of.get(ext.order()).copied()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => T::zero(),
        }
    }

    /// All stored `(row, col, value)` triples, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.dim()).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.cols[k], self.vals[k]))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(r, c, v)| self.get(c, r) == v)
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut dense = vec![vec![T::zero(); self.dim()]; self.dim()];
        for (r, c, v) in self.entries() {
            dense[r][c] = v;
        }
        dense
    }

    /// `vᵀ Γ v` for the uniform unit vector: the mean row sum.
    pub fn uniform_rayleigh(&self) -> T {
        self.vals.iter().copied().sum::<T>() / T::from_usize_lossy(self.dim())
    }

    fn filtered(&self, keep: impl Fn(usize, usize) -> bool) -> AdversaryMatrix<T> {
        let mut row_ptr = Vec::with_capacity(self.dim() + 1);
        let (mut cols, mut vals, mut moves) = (Vec::new(), Vec::new(), Vec::new());
        row_ptr.push(0);
        for r in 0..self.dim() {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                if keep(r, self.cols[k]) {
                    cols.push(self.cols[k]);
                    vals.push(self.vals[k]);
                    moves.push(self.moves[k]);
                }
            }
            row_ptr.push(cols.len());
        }
        AdversaryMatrix {
            extensions: self.extensions.clone(),
            index_of: self.index_of.clone(),
            row_ptr,
            cols,
            vals,
            moves,
        }
    }
}

impl<T: Scalar> SymmetricOperator<T> for AdversaryMatrix<T> {
    fn dim(&self) -> usize {
        self.extensions.len()
    }

    fn apply(&self, x: &[T], out: &mut [T]) {
        for (r, o) in out.iter_mut().enumerate() {
            let range = self.row_ptr[r]..self.row_ptr[r + 1];
            *o = self.cols[range.clone()]
                .iter()
                .zip(&self.vals[range])
                .map(|(&c, &v)| v * x[c])
                .sum();
        }
    }
}

pub fn build_adversary<T: Scalar>(poset: &Poset) -> Result<AdversaryMatrix<T>> {
    build_adversary_with(poset, DEFAULT_MATRIX_CAP, &Limits::default())
}

pub fn build_adversary_with<T: Scalar>(
    poset: &Poset,
    cap: usize,
    limits: &Limits,
) -> Result<AdversaryMatrix<T>> {
    let count = count_extensions_with(poset, limits)?;
    if count > BigUint::from(cap) {
        return Err(Error::LimitExceeded {
            what: "adversary matrix dimension",
            value: count.to_string(),
            limit: cap.to_string(),
        });
    }
    let extensions: Vec<LinearExtension> = enumerate_extensions_with(poset, limits)?.collect();
    let index_of: HashMap<Vec<usize>, usize> = extensions
        .iter()
        .enumerate()
        .map(|(idx, e)| (e.order().to_vec(), idx))
        .collect();
    let mut entries: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (row, sigma) in extensions.iter().enumerate() {
        let d = d_values(poset, sigma);
        for i in 0..poset.n() {
            let pos = sigma.rank(i);
            for gap in 1..d[i] {
                let tau = sigma.move_down(pos - gap, gap);
                let col = index_of[tau.order()];
                entries.insert((row, col), gap);
                entries.insert((col, row), gap);
            }
        }
    }
    let dim = extensions.len();
    let mut row_ptr = vec![0usize; dim + 1];
    for &(r, _) in entries.keys() {
        row_ptr[r + 1] += 1;
    }
    for r in 0..dim {
        row_ptr[r + 1] += row_ptr[r];
    }
    let cols = entries.keys().map(|&(_, c)| c).collect();
    let moves: Vec<usize> = entries.values().copied().collect();
    let vals = moves
        .iter()
        .map(|&g| T::one() / T::from_usize_lossy(g))
        .collect();
    Ok(AdversaryMatrix {
        extensions,
        index_of,
        row_ptr,
        cols,
        vals,
        moves,
    })
}

/// `Γ^{ij}`: keeps the entries whose two extensions order `i` and `j`
/// differently.
pub fn gamma_ij<T: Scalar>(
    gamma: &AdversaryMatrix<T>,
    i: usize,
    j: usize,
) -> Result<AdversaryMatrix<T>> {
    let n = gamma.extensions.first().map_or(0, LinearExtension::len);
    for index in [i, j] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if i == j {
        return Err(Error::Domain("Γ^{ij} needs two distinct elements".into()));
    }
    let ext = &gamma.extensions;
    Ok(gamma.filtered(|r, c| {
        (ext[r].rank(i) <= ext[r].rank(j)) != (ext[c].rank(i) <= ext[c].rank(j))
    }))
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub matrix_cap: usize,
    pub limits: Limits,
    pub power: PowerOptions,
    /// Relative slack on the norm comparisons.
    pub rel_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            matrix_cap: DEFAULT_MATRIX_CAP,
            limits: Limits::default(),
            power: PowerOptions::default(),
            rel_tol: 1e-6,
        }
    }
}

/// Spectral certificate for one poset.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryCertificate {
    pub num_extensions: usize,
    pub qlb_exact: BigRational,
    pub qlb: f64,
    /// `‖Γ‖`.
    pub gamma_norm: f64,
    /// `max_{i<j} ‖Γ^{ij}‖` and a maximizing pair (0-based).
    pub max_gamma_ij_norm: f64,
    pub argmax_pair: Option<(usize, usize)>,
    /// `vᵀ Γ v` for the uniform unit vector.
    pub uniform_rayleigh: f64,
    /// `‖Γ‖ / max ‖Γ^{ij}‖`; infinite when every `Γ^{ij}` vanishes but
    /// `Γ` does not, and zero when both vanish.
    pub ratio: f64,
    /// `‖Γ‖ ≥ QLB`.
    pub lemma1_ok: bool,
    /// `max ‖Γ^{ij}‖ ≤ 2π`.
    pub lemma2_ok: bool,
    /// `ratio ≥ QLB / (2π)`.
    pub lemma3_ok: bool,
}

impl AdversaryCertificate {
    pub fn all_ok(&self) -> bool {
        self.lemma1_ok && self.lemma2_ok && self.lemma3_ok
    }
}

/// Builds `Γ` and every `Γ^{ij}`, computes their norms, and checks the
/// numerator bound, the `2π` denominator bound and the resulting ratio
/// bound. Failures are flags, never errors.
pub fn verify_adversary(poset: &Poset, opts: &VerifyOptions) -> Result<AdversaryCertificate> {
    let gamma: AdversaryMatrix<f64> = build_adversary_with(poset, opts.matrix_cap, &opts.limits)?;
    let qlb_exact = qlb_enum_with(poset, &opts.limits)?;
    let qlb = rational_to_f64(&qlb_exact);
    let gamma_norm: f64 = spectral_norm_with(&gamma, &opts.power)?;
    let n = poset.n();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let norms = pairs
        .par_iter()
        .map(|&(i, j)| {
            let masked = gamma_ij(&gamma, i, j)?;
            spectral_norm_with::<f64, _>(&masked, &opts.power).map(|v| ((i, j), v))
        })
        .collect::<Result<Vec<_>>>()?;
    let (argmax_pair, max_gamma_ij_norm) = norms
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map_or((None, 0.0), |(p, v)| (Some(p), v));
    let ratio = if max_gamma_ij_norm > 0.0 {
        gamma_norm / max_gamma_ij_norm
    } else if gamma_norm > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    let tol = opts.rel_tol;
    let two_pi = 2.0 * PI;
    let lemma1_ok = gamma_norm >= qlb - tol * qlb;
    let lemma2_ok = max_gamma_ij_norm <= two_pi + tol * two_pi;
    let qlb_ratio = qlb / two_pi;
    let lemma3_ok = ratio >= qlb_ratio - tol * qlb_ratio.max(1.0);
    Ok(AdversaryCertificate {
        num_extensions: gamma.dim(),
        qlb_exact,
        qlb,
        gamma_norm,
        max_gamma_ij_norm,
        argmax_pair,
        uniform_rayleigh: gamma.uniform_rayleigh(),
        ratio,
        lemma1_ok,
        lemma2_ok,
        lemma3_ok,
    })
}
