//! Series-parallel expressions: parsing, realization and recognition.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! parallel := series ('+' series)*
//! series   := atom ('*' atom)*
//! atom     := '.' | '(' parallel ')' | 'N(' k ')' | 'chain(' k ')' | 'antichain(' k ')'
//! ```
//!
//! `*` is the ordinal sum (left block below right block) and `+` the
//! disjoint union. Both are stored n-ary and flattened, so structurally
//! equal posets built the same way compare equal.

use std::fmt;

use crate::error::{Error, Result};
use crate::poset::Poset;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpExpr {
    Singleton,
    Series(Vec<SpExpr>),
    Parallel(Vec<SpExpr>),
    /// The N poset with every element replaced by a `k`-chain.
    NBlock(usize),
}

impl SpExpr {
    /// Series composition, flattening nested series nodes.
    pub fn series(children: impl IntoIterator<Item = SpExpr>) -> SpExpr {
        let mut flat = Vec::new();
        for child in children {
            match child {
                SpExpr::Series(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            SpExpr::Series(flat)
        }
    }

    /// Parallel composition, flattening nested parallel nodes.
    pub fn parallel(children: impl IntoIterator<Item = SpExpr>) -> SpExpr {
        let mut flat = Vec::new();
        for child in children {
            match child {
                SpExpr::Parallel(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            SpExpr::Parallel(flat)
        }
    }

    pub fn chain(k: usize) -> SpExpr {
        SpExpr::series(std::iter::repeat_n(SpExpr::Singleton, k))
    }

    pub fn antichain(k: usize) -> SpExpr {
        SpExpr::parallel(std::iter::repeat_n(SpExpr::Singleton, k))
    }

    /// Number of elements of the realized poset.
    pub fn size(&self) -> usize {
        match self {
            SpExpr::Singleton => 1,
            SpExpr::Series(c) | SpExpr::Parallel(c) => c.iter().map(SpExpr::size).sum(),
            SpExpr::NBlock(k) => 4 * k,
        }
    }

    pub fn contains_nblock(&self) -> bool {
        match self {
            SpExpr::Singleton => false,
            SpExpr::NBlock(_) => true,
            SpExpr::Series(c) | SpExpr::Parallel(c) => c.iter().any(SpExpr::contains_nblock),
        }
    }

    /// Builds the poset, numbering leaves left to right.
    pub fn realize(&self) -> Poset {
        let mut pairs = Vec::new();
        let n = self.emit_pairs(0, &mut pairs);
        Poset::from_relations(n, pairs).expect("series-parallel relations are acyclic")
    }

    fn emit_pairs(&self, offset: usize, pairs: &mut Vec<(usize, usize)>) -> usize {
        match self {
            SpExpr::Singleton => 1,
            SpExpr::Parallel(children) => {
                let mut at = offset;
                for child in children {
                    at += child.emit_pairs(at, pairs);
                }
                at - offset
            }
            SpExpr::Series(children) => {
                let mut at = offset;
                for child in children {
                    let len = child.emit_pairs(at, pairs);
                    // everything placed so far lies below this block
                    for lo in offset..at {
                        for hi in at..at + len {
                            pairs.push((lo, hi));
                        }
                    }
                    at += len;
                }
                at - offset
            }
            SpExpr::NBlock(k) => {
                let k = *k;
                let block = |b: usize, i: usize| offset + b * k + i;
                let (a, b, c, d) = (0, 1, 2, 3);
                for ch in [a, b, c, d] {
                    for i in 1..k {
                        pairs.push((block(ch, i - 1), block(ch, i)));
                    }
                }
                for (lo, hi) in [(a, b), (c, b), (c, d)] {
                    for i in 0..k {
                        for j in 0..k {
                            pairs.push((block(lo, i), block(hi, j)));
                        }
                    }
                }
                4 * k
            }
        }
    }
}

impl fmt::Display for SpExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpExpr::Singleton => f.write_str("."),
            SpExpr::NBlock(k) => write!(f, "N({k})"),
            SpExpr::Series(children) => {
                for (t, child) in children.iter().enumerate() {
                    if t > 0 {
                        f.write_str(" * ")?;
                    }
                    match child {
                        SpExpr::Parallel(_) => write!(f, "({child})")?,
                        _ => write!(f, "{child}")?,
                    }
                }
                Ok(())
            }
            SpExpr::Parallel(children) => {
                for (t, child) in children.iter().enumerate() {
                    if t > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{child}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for SpExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_sp(s)
    }
}

/// Parses the inline expression syntax.
pub fn parse_sp(text: &str) -> Result<SpExpr> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let expr = parser.parallel()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, message: &str) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<()> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", byte as char)))
        }
    }

    fn parallel(&mut self) -> Result<SpExpr> {
        let mut parts = vec![self.series()?];
        while self.peek() == Some(b'+') {
            self.pos += 1;
            parts.push(self.series()?);
        }
        Ok(SpExpr::parallel(parts))
    }

    fn series(&mut self) -> Result<SpExpr> {
        let mut parts = vec![self.atom()?];
        while self.peek() == Some(b'*') {
            self.pos += 1;
            parts.push(self.atom()?);
        }
        Ok(SpExpr::series(parts))
    }

    fn atom(&mut self) -> Result<SpExpr> {
        match self.peek() {
            Some(b'.') => {
                self.pos += 1;
                Ok(SpExpr::Singleton)
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.parallel()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let build: fn(usize) -> SpExpr = match word {
                    "N" => SpExpr::NBlock,
                    "chain" => SpExpr::chain,
                    "antichain" => SpExpr::antichain,
                    _ => {
                        self.pos = start;
                        return Err(self.error(&format!("unknown primitive `{word}`")));
                    }
                };
                self.expect(b'(')?;
                let k_pos = self.pos;
                let k = self.integer()?;
                self.expect(b')')?;
                if k < 1 {
                    return Err(Error::InvalidSize { position: k_pos, k });
                }
                Ok(build(k))
            }
            Some(_) => Err(self.error("expected `.`, `(` or a primitive")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                position: start,
                message: "integer too large".into(),
            })
    }
}

/// A successful decomposition: `expr.realize()` is `P` after renaming
/// canonical element `t` to `leaves[t]`.
#[derive(Clone, Debug)]
pub struct SpDecomposition {
    pub expr: SpExpr,
    pub leaves: Vec<usize>,
}

/// Decomposes `poset` into series and parallel compositions, or returns
/// `None` when it is not series-parallel (i.e. it contains an induced N).
pub fn recognize_sp(poset: &Poset) -> Option<SpDecomposition> {
    let elems: Vec<usize> = (0..poset.n()).collect();
    let mut leaves = Vec::with_capacity(poset.n());
    let expr = decompose(poset, &elems, &mut leaves)?;
    Some(SpDecomposition { expr, leaves })
}

fn decompose(poset: &Poset, elems: &[usize], leaves: &mut Vec<usize>) -> Option<SpExpr> {
    if elems.len() == 1 {
        leaves.push(elems[0]);
        return Some(SpExpr::Singleton);
    }
    let parts = components(elems, |a, b| poset.comparable(a, b));
    if parts.len() > 1 {
        let children = parts
            .iter()
            .map(|part| decompose(poset, part, leaves))
            .collect::<Option<Vec<_>>>()?;
        return Some(SpExpr::Parallel(children));
    }
    let mut parts = components(elems, |a, b| !poset.comparable(a, b));
    if parts.len() == 1 {
        return None;
    }
    // co-components are totally ordered blockwise
    parts.sort_by(|x, y| {
        if poset.less(x[0], y[0]) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
    for w in parts.windows(2) {
        if !w[0].iter().all(|&a| w[1].iter().all(|&b| poset.less(a, b))) {
            return None;
        }
    }
    let children = parts
        .iter()
        .map(|part| decompose(poset, part, leaves))
        .collect::<Option<Vec<_>>>()?;
    Some(SpExpr::Series(children))
}

/// Connected components of the graph on `elems` with edges `adjacent`,
/// each sorted, ordered by smallest element.
fn components(elems: &[usize], adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut seen = vec![false; elems.len()];
    let mut parts = Vec::new();
    for s in 0..elems.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut part = Vec::new();
        while let Some(u) = stack.pop() {
            part.push(elems[u]);
            for v in 0..elems.len() {
                if !seen[v] && adjacent(elems[u], elems[v]) {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEVEN_ELEMENTS: &str = ". * (.+.+.) * (. + (. * .))";

    #[test]
    fn parses_seven_element_expression() {
        let e = parse_sp(SEVEN_ELEMENTS).unwrap();
        assert_eq!(e.size(), 7);
        assert_eq!(
            e,
            SpExpr::Series(vec![
                SpExpr::Singleton,
                SpExpr::antichain(3),
                SpExpr::Parallel(vec![SpExpr::Singleton, SpExpr::chain(2)]),
            ])
        );
        let p = e.realize();
        // bottom element below everything
        assert!((1..7).all(|j| p.less(0, j)));
        // middle antichain below the top block
        assert!((1..4).all(|i| (4..7).all(|j| p.less(i, j))));
        assert!(p.less(5, 6) && !p.comparable(4, 5) && !p.comparable(4, 6));
        assert_eq!(p.relation_count(), 6 + 3 * 3 + 1);
    }

    #[test]
    fn sugar_expands() {
        assert_eq!(
            parse_sp("chain(3)").unwrap(),
            SpExpr::Series(vec![SpExpr::Singleton; 3])
        );
        assert_eq!(parse_sp("antichain(1)").unwrap(), SpExpr::Singleton);
        assert_eq!(parse_sp(" N ( 2 ) ").unwrap(), SpExpr::NBlock(2));
    }

    #[test]
    fn malformed_input_reports_position() {
        match parse_sp(". + * .") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_sp(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_sp("(. + ."), Err(Error::Parse { .. })));
        assert!(matches!(parse_sp(". ."), Err(Error::Parse { .. })));
        assert!(matches!(parse_sp("tree(2)"), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse_sp("chain(0)"), Err(Error::InvalidSize { k: 0, .. })));
    }

    #[test]
    fn realize_small_examples() {
        assert_eq!(parse_sp(". + .").unwrap().realize(), Poset::antichain(2));
        assert_eq!(parse_sp(". * .").unwrap().realize(), Poset::chain(2));
        let n = parse_sp("N(1)").unwrap().realize();
        assert_eq!(
            n.relations().collect::<Vec<_>>(),
            vec![(0, 1), (2, 1), (2, 3)]
        );
    }

    #[test]
    fn nblock_relation_count() {
        for k in 1..6 {
            let p = SpExpr::NBlock(k).realize();
            assert_eq!(p.n(), 4 * k);
            assert_eq!(p.relation_count(), 3 * k * k + 4 * (k * (k - 1) / 2));
        }
    }

    #[test]
    fn display_reparses_to_same_expression() {
        for text in [SEVEN_ELEMENTS, "N(2) * (. + chain(2))", "(. + .) * (. + .) + ."] {
            let e = parse_sp(text).unwrap();
            assert_eq!(parse_sp(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn recognizes_antichain_and_rejects_n() {
        let d = recognize_sp(&Poset::antichain(3)).unwrap();
        assert_eq!(d.expr, SpExpr::antichain(3));
        assert!(recognize_sp(&SpExpr::NBlock(1).realize()).is_none());
        assert!(recognize_sp(&SpExpr::NBlock(2).realize()).is_none());
    }

    #[test]
    fn recognize_round_trips_seven_element() {
        let p = parse_sp(SEVEN_ELEMENTS).unwrap().realize();
        let d = recognize_sp(&p).unwrap();
        let q = d.expr.realize();
        for s in 0..7 {
            for t in 0..7 {
                assert_eq!(q.less(s, t), p.less(d.leaves[s], d.leaves[t]));
            }
        }
    }
}
