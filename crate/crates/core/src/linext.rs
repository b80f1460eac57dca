//! Linear extensions: exact counting, lexicographic enumeration and
//! exactly uniform sampling, all driven by a dynamic program over
//! down-sets (order ideals) encoded as bitmasks.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::ln_biguint;
use crate::poset::Poset;
use crate::sp::SpExpr;

pub const DEFAULT_MAX_ELEMENTS: usize = 20;
pub const DEFAULT_MAX_ENUMERATION: u64 = 1_000_000;
/// Down-sets are stored as `u64` masks.
const HARD_MAX_ELEMENTS: usize = 63;

/// Size caps for the exponential algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum poset size for the down-set dynamic program.
    pub max_elements: usize,
    /// Maximum number of extensions that may be enumerated.
    pub max_enumeration: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_elements: DEFAULT_MAX_ELEMENTS,
            max_enumeration: DEFAULT_MAX_ENUMERATION,
        }
    }
}

/// A linear extension σ. `rank(i)` is σ(i) ∈ `1..=n`; `order()[r]` is the
/// element at (0-based) position `r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearExtension {
    order: Vec<usize>,
    rank: Vec<usize>,
}

impl LinearExtension {
    /// From an element sequence (lowest rank first). Panics if `order` is
    /// not a permutation of `0..order.len()`.
    pub fn from_order(order: Vec<usize>) -> Self {
        let mut rank = vec![0; order.len()];
        for (pos, &e) in order.iter().enumerate() {
            assert!(rank[e] == 0, "element {e} repeated");
            rank[e] = pos + 1;
        }
        LinearExtension { order, rank }
    }

    /// From 1-based ranks.
    pub fn from_ranks(rank: Vec<usize>) -> Result<Self> {
        let n = rank.len();
        let mut order = vec![usize::MAX; n];
        for (e, &r) in rank.iter().enumerate() {
            if r == 0 || r > n || order[r - 1] != usize::MAX {
                return Err(Error::NotAnExtension);
            }
            order[r - 1] = e;
        }
        Ok(LinearExtension { order, rank })
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn ranks(&self) -> &[usize] {
        &self.rank
    }

    #[inline]
    pub fn rank(&self, element: usize) -> usize {
        self.rank[element]
    }

    pub fn is_extension_of(&self, poset: &Poset) -> bool {
        self.len() == poset.n() && poset.relations().all(|(i, j)| self.rank[i] < self.rank[j])
    }

    /// Moves the element at 1-based position `to + d` down to position
    /// `to`, shifting the elements in between up by one.
    pub fn move_down(&self, to: usize, d: usize) -> LinearExtension {
        let mut order = self.order.clone();
        order[to - 1..to + d].rotate_right(1);
        LinearExtension::from_order(order)
    }
}

fn check_size(poset: &Poset, limits: &Limits) -> Result<()> {
    let cap = limits.max_elements.min(HARD_MAX_ELEMENTS);
    if poset.n() > cap {
        return Err(Error::LimitExceeded {
            what: "poset size",
            value: poset.n().to_string(),
            limit: cap.to_string(),
        });
    }
    Ok(())
}

/// Memoized completion counts: `completions(D)` is the number of ways to
/// finish a linear extension whose first `|D|` positions hold down-set `D`.
#[derive(Clone, Debug)]
pub struct DownsetTable {
    n: usize,
    pred: Vec<u64>,
    table: HashMap<u64, BigUint>,
}

impl DownsetTable {
    pub fn new(poset: &Poset, limits: &Limits) -> Result<Self> {
        check_size(poset, limits)?;
        let pred = poset.predecessor_masks().expect("size checked");
        let mut table = DownsetTable {
            n: poset.n(),
            pred,
            table: HashMap::new(),
        };
        table.fill(0);
        Ok(table)
    }

    fn full(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// Elements that may be placed next, in increasing index order.
    pub fn available(&self, placed: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&x| placed & (1 << x) == 0 && self.pred[x] & !placed == 0)
    }

    fn fill(&mut self, placed: u64) -> BigUint {
        if placed == self.full() {
            return BigUint::one();
        }
        if let Some(c) = self.table.get(&placed) {
            return c.clone();
        }
        let next: Vec<usize> = self.available(placed).collect();
        let mut total = BigUint::zero();
        for x in next {
            total += self.fill(placed | (1 << x));
        }
        self.table.insert(placed, total.clone());
        total
    }

    pub fn completions(&self, placed: u64) -> BigUint {
        if placed == self.full() {
            BigUint::one()
        } else {
            self.table.get(&placed).cloned().unwrap_or_default()
        }
    }

    pub fn total(&self) -> BigUint {
        self.completions(0)
    }

    /// The `index`-th extension (0-based) in lexicographic order of the
    /// element sequence.
    pub fn unrank(&self, index: &BigUint) -> LinearExtension {
        let mut rest = index.clone();
        let mut placed = 0u64;
        let mut order = Vec::with_capacity(self.n);
        while order.len() < self.n {
            let mut chosen = None;
            for x in self.available(placed) {
                let c = self.completions(placed | (1 << x));
                if rest < c {
                    chosen = Some(x);
                    break;
                }
                rest -= c;
            }
            let x = chosen.expect("rank below the extension count");
            order.push(x);
            placed |= 1 << x;
        }
        LinearExtension::from_order(order)
    }
}

/// Exact `|Δ(P)|` under the default limits.
pub fn count_extensions(poset: &Poset) -> Result<BigUint> {
    count_extensions_with(poset, &Limits::default())
}

pub fn count_extensions_with(poset: &Poset, limits: &Limits) -> Result<BigUint> {
    Ok(DownsetTable::new(poset, limits)?.total())
}

/// `ln |Δ(P)|`.
pub fn itlb(poset: &Poset) -> Result<f64> {
    Ok(ln_biguint(&count_extensions(poset)?))
}

pub fn itlb_with(poset: &Poset, limits: &Limits) -> Result<f64> {
    Ok(ln_biguint(&count_extensions_with(poset, limits)?))
}

/// Every extension exactly once, lexicographic in the element sequence.
pub fn enumerate_extensions(poset: &Poset) -> Result<ExtensionIter> {
    enumerate_extensions_with(poset, &Limits::default())
}

pub fn enumerate_extensions_with(poset: &Poset, limits: &Limits) -> Result<ExtensionIter> {
    let count = count_extensions_with(poset, limits)?;
    if count > BigUint::from(limits.max_enumeration) {
        return Err(Error::LimitExceeded {
            what: "number of linear extensions",
            value: count.to_string(),
            limit: limits.max_enumeration.to_string(),
        });
    }
    let n = poset.n();
    Ok(ExtensionIter {
        pred: poset.predecessor_masks().expect("size checked"),
        order: Vec::with_capacity(n),
        cursor: vec![0; n + 1],
        placed: 0,
        done: false,
    })
}

/// Depth-first lexicographic generator.
#[derive(Clone, Debug)]
pub struct ExtensionIter {
    pred: Vec<u64>,
    order: Vec<usize>,
    cursor: Vec<usize>,
    placed: u64,
    done: bool,
}

impl ExtensionIter {
    fn pop(&mut self) {
        let x = self.order.pop().expect("non-empty prefix");
        self.placed &= !(1 << x);
    }
}

impl Iterator for ExtensionIter {
    type Item = LinearExtension;

    fn next(&mut self) -> Option<LinearExtension> {
        let n = self.pred.len();
        while !self.done {
            let depth = self.order.len();
            if depth == n {
                let ext = LinearExtension::from_order(self.order.clone());
                self.pop();
                return Some(ext);
            }
            let placed = self.placed;
            let pred = &self.pred;
            let next = (self.cursor[depth]..n)
                .find(|&x| placed & (1 << x) == 0 && pred[x] & !placed == 0);
            match next {
                Some(x) => {
                    self.cursor[depth] = x + 1;
                    self.cursor[depth + 1] = 0;
                    self.order.push(x);
                    self.placed |= 1 << x;
                }
                None if depth == 0 => self.done = true,
                None => self.pop(),
            }
        }
        None
    }
}

/// Draws exactly uniform linear extensions by unranking a uniform index.
#[derive(Clone, Debug)]
pub struct ExtensionSampler {
    table: DownsetTable,
    total: BigUint,
    small: Option<SmallTable>,
}

/// `u128` copy of the down-set table used when the count fits.
#[derive(Clone, Debug)]
struct SmallTable {
    total: u128,
    table: HashMap<u64, u128>,
}

impl ExtensionSampler {
    pub fn new(poset: &Poset, limits: &Limits) -> Result<Self> {
        let table = DownsetTable::new(poset, limits)?;
        let total = table.total();
        let small = total.to_u128().map(|total| SmallTable {
            total,
            table: table
                .table
                .iter()
                .map(|(&k, v)| (k, v.to_u128().expect("bounded by total")))
                .collect(),
        });
        Ok(ExtensionSampler { table, total, small })
    }

    pub fn count(&self) -> &BigUint {
        &self.total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearExtension {
        match &self.small {
            Some(small) => self.unrank_small(small, rng.random_range(0..small.total)),
            None => self.table.unrank(&random_below(&self.total, rng)),
        }
    }

    fn unrank_small(&self, small: &SmallTable, mut rest: u128) -> LinearExtension {
        let n = self.table.n;
        let full = self.table.full();
        let mut placed = 0u64;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let mut chosen = None;
            for x in self.table.available(placed) {
                let next = placed | (1 << x);
                let c = if next == full { 1 } else { small.table[&next] };
                if rest < c {
                    chosen = Some(x);
                    break;
                }
                rest -= c;
            }
            let x = chosen.expect("rank below the extension count");
            order.push(x);
            placed |= 1 << x;
        }
        LinearExtension::from_order(order)
    }
}

/// Uniform integer in `0..bound` by rejection on `bits(bound)` random bits.
fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let excess = (words as u64 * 32 - bits) as u32;
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        if let Some(top) = digits.last_mut() {
            *top >>= excess;
        }
        let candidate = BigUint::new(digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// One uniform extension, deterministic in `seed`.
pub fn sample_extension(poset: &Poset, seed: u64) -> Result<LinearExtension> {
    let sampler = ExtensionSampler::new(poset, &Limits::default())?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// `|Δ|` of a series-parallel expression by the product and multinomial
/// recurrences.
pub fn count_extensions_sp(expr: &SpExpr) -> Result<BigUint> {
    fn go(e: &SpExpr) -> Result<(usize, BigUint)> {
        match e {
            SpExpr::Singleton => Ok((1, BigUint::one())),
            SpExpr::NBlock(_) => Err(Error::UnsupportedNBlock),
            SpExpr::Series(children) => {
                let mut size = 0;
                let mut count = BigUint::one();
                for child in children {
                    let (s, c) = go(child)?;
                    size += s;
                    count *= c;
                }
                Ok((size, count))
            }
            SpExpr::Parallel(children) => {
                let mut size = 0;
                let mut count = BigUint::one();
                for child in children {
                    let (s, c) = go(child)?;
                    size += s;
                    count *= c * num_integer::binomial(BigUint::from(size), BigUint::from(s));
                }
                Ok((size, count))
            }
        }
    }
    go(expr).map(|(_, c)| c)
}
