//! Finite posets stored as strict, transitively closed relations.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A finite poset on the ground set `0..n`.
///
/// `less(i, j)` is the strict order `i <_P j`. The relation is always
/// irreflexive, antisymmetric and transitively closed; every constructor
/// enforces this, so a `Poset` value never needs re-validation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poset {
    n: usize,
    rel: Vec<bool>,
}

/// A chain `elems[0] <_P elems[1] <_P ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain(Vec<usize>);

impl Chain {
    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.contains(&x)
    }
}

impl Poset {
    /// Builds the transitive closure of `pairs`, where `(i, j)` means
    /// `i < j` with 0-based indices.
    pub fn from_relations<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::Domain("a poset needs at least one element".into()));
        }
        let mut rel = vec![false; n * n];
        for (i, j) in pairs {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            if i == j {
                return Err(Error::Cycle { a: i, b: j });
            }
            rel[i * n + j] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if !rel[i * n + k] {
                    continue;
                }
                for j in 0..n {
                    if rel[k * n + j] {
                        rel[i * n + j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            if rel[i * n + i] {
                let b = (0..n)
                    .find(|&j| j != i && rel[i * n + j] && rel[j * n + i])
                    .unwrap_or(i);
                return Err(Error::Cycle { a: i, b });
            }
        }
        Ok(Poset { n, rel })
    }

    /// `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Self {
        Self::from_relations(n, (1..n).map(|i| (i - 1, i))).expect("chain is acyclic")
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_relations(n, std::iter::empty()).expect("antichain is acyclic")
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn less(&self, i: usize, j: usize) -> bool {
        self.rel[i * self.n + j]
    }

    #[inline]
    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.less(i, j) || self.less(j, i)
    }

    /// All strict pairs `(i, j)` with `i < j`, row-major.
    pub fn relations(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n * n)
            .filter(move |&t| self.rel[t])
            .map(move |t| (t / n, t % n))
    }

    pub fn relation_count(&self) -> usize {
        self.rel.iter().filter(|&&b| b).count()
    }

    pub fn predecessors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.less(j, i))
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.less(i, j))
    }

    pub fn is_minimal(&self, i: usize) -> bool {
        self.predecessors(i).next().is_none()
    }

    pub fn is_maximal(&self, i: usize) -> bool {
        self.successors(i).next().is_none()
    }

    /// True when the relation is a total order.
    pub fn is_chain(&self) -> bool {
        self.relation_count() == self.n * (self.n - 1) / 2
    }

    /// Transitive reduction: pairs `(i, j)` where `j` covers `i`.
    pub fn cover_relations(&self) -> Vec<(usize, usize)> {
        self.relations()
            .filter(|&(i, j)| !(0..self.n).any(|k| self.less(i, k) && self.less(k, j)))
            .collect()
    }

    /// Strict-predecessor bitmask of every element; `None` above 64 elements.
    pub fn predecessor_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        Some(
            (0..self.n)
                .map(|i| self.predecessors(i).fold(0u64, |m, j| m | (1 << j)))
                .collect(),
        )
    }

    /// A linear extension as an element sequence. Sorting by the number
    /// of predecessors works because `j < i` implies a strictly smaller
    /// down-set.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&i| (self.predecessors(i).count(), i));
        order
    }

    /// Number of elements in a longest chain.
    pub fn height(&self) -> usize {
        let mut depth = vec![1usize; self.n];
        for i in self.topological_order() {
            depth[i] = 1 + self.predecessors(i).map(|j| depth[j]).max().unwrap_or(0);
        }
        depth.into_iter().max().unwrap_or(0)
    }

    /// Every maximal chain exactly once, found by DFS along cover edges
    /// from each minimal element. Exponential in the worst case.
    pub fn maximal_chains(&self) -> Vec<Chain> {
        let mut upper: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for (i, j) in self.cover_relations() {
            upper[i].push(j);
        }
        let mut chains = Vec::new();
        let mut path = Vec::new();
        for start in (0..self.n).filter(|&i| self.is_minimal(i)) {
            path.push(start);
            walk_covers(&upper, &mut path, &mut chains);
            path.pop();
        }
        chains
    }

    /// True iff every relation of `base` also holds in `self`.
    pub fn extends(&self, base: &Poset) -> Result<bool> {
        if self.n != base.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: base.n,
            });
        }
        Ok(base.rel.iter().zip(&self.rel).all(|(&b, &s)| !b || s))
    }

    /// Number of 4-element subsets inducing a copy of the N poset.
    ///
    /// Four elements induce N exactly when their comparability graph is
    /// the path on four vertices: a transitive orientation of that path
    /// must alternate, giving N (which is self-dual).
    pub fn count_induced_n(&self) -> u64 {
        let n = self.n;
        let mut count = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let q = [a, b, c, d];
                        let mut degree = [0u8; 4];
                        let mut edges = 0;
                        for s in 0..4 {
                            for t in s + 1..4 {
                                if self.comparable(q[s], q[t]) {
                                    degree[s] += 1;
                                    degree[t] += 1;
                                    edges += 1;
                                }
                            }
                        }
                        degree.sort_unstable();
                        if edges == 3 && degree == [1, 1, 2, 2] {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    /// The poset obtained by renaming element `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Poset> {
        if perm.len() != self.n {
            return Err(Error::SizeMismatch {
                left: perm.len(),
                right: self.n,
            });
        }
        Poset::from_relations(self.n, self.relations().map(|(i, j)| (perm[i], perm[j])))
    }

    /// The subposet induced by `elems`, renumbered `0..elems.len()`.
    pub fn induced(&self, elems: &[usize]) -> Result<Poset> {
        let pairs: Vec<_> = (0..elems.len())
            .flat_map(|s| (0..elems.len()).map(move |t| (s, t)))
            .filter(|&(s, t)| self.less(elems[s], elems[t]))
            .collect();
        Poset::from_relations(elems.len(), pairs)
    }

    /// Parses the `.poset` text format: `#` comments, then `n`, then one
    /// 1-based `i j` pair per line meaning `i < j`.
    pub fn parse_text(text: &str) -> Result<Poset> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, line)| (no + 1, line.trim()))
            .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'));
        let (first_no, first) = lines.next().ok_or_else(|| Error::Parse {
            position: 1,
            message: "missing element count".into(),
        })?;
        let n: usize = first.parse().map_err(|_| Error::Parse {
            position: first_no,
            message: format!("expected an element count, found {first:?}"),
        })?;
        let mut pairs = Vec::new();
        for (no, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[i, j]) if i >= 1 && j >= 1 => pairs.push((i - 1, j - 1)),
                Some(&[_, _]) => {
                    return Err(Error::Parse {
                        position: no,
                        message: "element indices are 1-based".into(),
                    })
                }
                _ => {
                    return Err(Error::Parse {
                        position: no,
                        message: format!("expected `i j`, found {line:?}"),
                    })
                }
            }
        }
        Poset::from_relations(n, pairs)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Poset> {
        Self::parse_text(&std::fs::read_to_string(path)?)
    }

    /// Serializes the transitive reduction in the `.poset` format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (i, j) in self.cover_relations() {
            writeln!(out, "{} {}", i + 1, j + 1).unwrap();
        }
        out
    }
}

fn walk_covers(upper: &[Vec<usize>], path: &mut Vec<usize>, chains: &mut Vec<Chain>) {
    let top = *path.last().unwrap();
    if upper[top].is_empty() {
        chains.push(Chain(path.clone()));
        return;
    }
    for &next in &upper[top] {
        path.push(next);
        walk_covers(upper, path, chains);
        path.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(n: usize, pairs: &[(usize, usize)]) -> Result<Poset> {
        Poset::from_relations(n, pairs.iter().map(|&(i, j)| (i - 1, j - 1)))
    }

    fn pair_plus_point() -> Poset {
        one_based(3, &[(2, 1)]).unwrap()
    }

    fn chain_elems(chains: &[Chain]) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = chains.iter().map(|c| c.elements().to_vec()).collect();
        v.sort();
        v
    }

    #[test]
    fn builds_pair_plus_point_poset() {
        let p = pair_plus_point();
        assert_eq!(p.relations().collect::<Vec<_>>(), vec![(1, 0)]);
    }

    #[test]
    fn antichain_has_no_relations() {
        let p = one_based(4, &[]).unwrap();
        assert_eq!(p.relation_count(), 0);
        assert_eq!(p, Poset::antichain(4));
    }

    #[test]
    fn closure_adds_transitive_pair() {
        let p = one_based(3, &[(1, 2), (2, 3)]).unwrap();
        assert!(p.less(0, 2));
        assert_eq!(p, Poset::chain(3));
    }

    #[test]
    fn cycle_is_rejected() {
        assert!(matches!(one_based(2, &[(1, 2), (2, 1)]), Err(Error::Cycle { .. })));
        assert!(matches!(one_based(2, &[(1, 1)]), Err(Error::Cycle { .. })));
        assert!(matches!(
            one_based(3, &[(1, 2), (2, 3), (3, 1)]),
            Err(Error::Cycle { .. })
        ));
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(
            one_based(2, &[(1, 3)]),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert!(Poset::from_relations(0, []).is_err());
    }

    #[test]
    fn maximal_chains_examples() {
        assert_eq!(chain_elems(&pair_plus_point().maximal_chains()), vec![vec![1, 0], vec![2]]);
        assert_eq!(chain_elems(&Poset::chain(3).maximal_chains()), vec![vec![0, 1, 2]]);
        assert_eq!(
            chain_elems(&Poset::antichain(3).maximal_chains()),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn maximal_chains_of_diamond() {
        let p = Poset::from_relations(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(
            chain_elems(&p.maximal_chains()),
            vec![vec![0, 1, 3], vec![0, 2, 3]]
        );
        assert_eq!(p.height(), 3);
    }

    #[test]
    fn extends_examples() {
        let chain = Poset::chain(3);
        let anti = Poset::antichain(3);
        assert!(chain.extends(&anti).unwrap());
        assert!(!anti.extends(&chain).unwrap());
        assert!(matches!(
            chain.extends(&Poset::chain(2)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn n_poset_is_counted_once() {
        // a < b, c < b, c < d
        let n = Poset::from_relations(4, [(0, 1), (2, 1), (2, 3)]).unwrap();
        assert_eq!(n.count_induced_n(), 1);
        assert_eq!(Poset::chain(4).count_induced_n(), 0);
        assert_eq!(Poset::antichain(5).count_induced_n(), 0);
    }

    #[test]
    fn text_round_trip_writes_reduction() {
        let p = Poset::chain(3);
        let text = p.to_text();
        assert_eq!(text, "3\n1 2\n2 3\n");
        assert_eq!(Poset::parse_text(&text).unwrap(), p);
    }

    #[test]
    fn text_parser_skips_comments_and_reports_lines() {
        let p = Poset::parse_text("# a two-chain and a point\n\n3\n# b < a\n2 1\n").unwrap();
        assert_eq!(p, pair_plus_point());
        match Poset::parse_text("3\n1 x\n") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(Poset::parse_text("3\n0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(Poset::parse_text("2\n1 2\n2 1\n"), Err(Error::Cycle { .. })));
    }

    #[test]
    fn topological_order_respects_relation() {
        let p = Poset::from_relations(5, [(4, 0), (0, 3), (2, 1)]).unwrap();
        let order = p.topological_order();
        let pos: Vec<usize> = (0..5).map(|e| order.iter().position(|&x| x == e).unwrap()).collect();
        for (i, j) in p.relations() {
            assert!(pos[i] < pos[j]);
        }
    }
}
