//! Instance generators for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::poset::Poset;
use crate::sp::SpExpr;

/// Random poset: each pair of a random labeling, ordered by the labeling,
/// becomes a relation with probability `density`; then closed.
pub fn random_poset<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Poset {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(density) {
                pairs.push((labels[a], labels[b]));
            }
        }
    }
    Poset::from_relations(n, pairs).expect("pairs follow a linear order")
}

/// Random series-parallel expression on exactly `n` elements.
pub fn random_sp_expr<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SpExpr {
    assert!(n >= 1, "expressions need at least one element");
    if n == 1 {
        return SpExpr::Singleton;
    }
    let left = rng.random_range(1..n);
    let a = random_sp_expr(left, rng);
    let b = random_sp_expr(n - left, rng);
    if rng.random_bool(0.5) {
        SpExpr::series([a, b])
    } else {
        SpExpr::parallel([a, b])
    }
}

/// Every labeled poset on `n <= 5` elements.
pub fn all_posets(n: usize) -> Vec<Poset> {
    assert!((1..=5).contains(&n), "exhaustive enumeration is limited to n <= 5");
    let slots: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    'masks: for mask in 0u64..(1 << slots.len()) {
        let mut rows = vec![0u32; n];
        for (bit, &(i, j)) in slots.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                rows[i] |= 1 << j;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if rows[i] >> j & 1 == 1 && (rows[j] >> i & 1 == 1 || rows[j] & !rows[i] != 0) {
                    continue 'masks;
                }
            }
        }
        let pairs = slots.iter().filter(|&&(i, j)| rows[i] >> j & 1 == 1).copied();
        out.push(Poset::from_relations(n, pairs).expect("validated relation"));
    }
    out
}

/// Small fixed posets used throughout the suites: chains, antichains,
/// the two-element-chain-plus-point poset, the N family and a few
/// series-parallel shapes.
pub fn named_posets() -> Vec<(String, Poset)> {
    let mut out = vec![
        ("singleton".to_string(), Poset::chain(1)),
        ("b<a, c".to_string(), Poset::from_relations(3, [(1, 0)]).unwrap()),
        ("N(1)".to_string(), SpExpr::NBlock(1).realize()),
        ("N(2)".to_string(), SpExpr::NBlock(2).realize()),
    ];
    for n in [2, 3, 5] {
        out.push((format!("chain({n})"), Poset::chain(n)));
        out.push((format!("antichain({n})"), Poset::antichain(n)));
    }
    for text in [
        ". * (.+.+.) * (. + (. * .))",
        "(. * .) + (. * .)",
        "(. + .) * (. + .)",
        "chain(3) + chain(2) + .",
        "(. + . + .) * (. + .) * .",
    ] {
        let e = crate::sp::parse_sp(text).expect("built-in expression");
        out.push((text.to_string(), e.realize()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn labeled_poset_counts() {
        // OEIS A001035
        let expected = [1, 3, 19, 219, 4231];
        for (n, &e) in (1..=5).zip(&expected) {
            assert_eq!(all_posets(n).len(), e);
        }
    }

    #[test]
    fn random_expressions_have_requested_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..15 {
            assert_eq!(random_sp_expr(n, &mut rng).size(), n);
            assert_eq!(random_poset(n, 0.3, &mut rng).n(), n);
        }
    }
}
