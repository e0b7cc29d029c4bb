//! Elements of Thompson's group V as reduced prefix-replacement tables.
//!
//! A table `{(a_i, b_i)}` pairs two complete antichains and acts on words
//! below the domain antichain by `a_i·x ↦ b_i·x`. Every element is kept in
//! its unique reduced form: no two entries `(a0 → b0)`, `(a1 → b1)` coexist.
//! Composition is written left to right: `u.compose(&v)` applies `u` first.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prefix_words::{is_complete_antichain, Antichain, Word};

/// One table entry: domain word and range word.
pub type Pair = (Word, Word);

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VElement {
    /// Sorted lexicographically by domain word; always reduced.
    pairs: Vec<Pair>,
}

fn validate_side(words: Vec<Word>) -> Result<()> {
    let mut seen = HashSet::with_capacity(words.len());
    for w in &words {
        if !seen.insert(w) {
            return Err(Error::NotBijection(w.clone()));
        }
    }
    let a = Antichain::new(words)?;
    if a.is_complete() {
        Ok(())
    } else {
        Err(Error::IncompleteCover)
    }
}

/// Checks that both columns are complete antichains without repeats.
pub fn validate_table(pairs: &[Pair]) -> Result<()> {
    validate_side(pairs.iter().map(|p| p.0.clone()).collect())?;
    validate_side(pairs.iter().map(|p| p.1.clone()).collect())
}

fn is_sibling_merge(left: &Pair, right: &Pair) -> Option<Pair> {
    let (a0, b0) = left;
    let (a1, b1) = right;
    if a0.is_empty() || b0.is_empty() || a1.is_empty() || b1.is_empty() {
        return None;
    }
    if a0.last_bit() != Some(0) || a1.last_bit() != Some(1) {
        return None;
    }
    if b0.last_bit() != Some(0) || b1.last_bit() != Some(1) {
        return None;
    }
    let (a, a_other) = (a0.parent()?, a1.parent()?);
    let (b, b_other) = (b0.parent()?, b1.parent()?);
    (a == a_other && b == b_other).then_some((a, b))
}

/// Merges sibling entries until none remain. Input must be a valid table.
///
/// In lexicographic order two sibling leaves are adjacent, and a merged
/// parent can only pair with its own sibling, which is either the entry now
/// on top of the stack or one still to come; one stack pass is enough.
pub(crate) fn reduce_table(mut pairs: Vec<Pair>) -> Vec<Pair> {
    pairs.sort_by(|x, y| x.0.tree_cmp(&y.0));
    let mut stack: Vec<Pair> = Vec::with_capacity(pairs.len());
    for p in pairs {
        stack.push(p);
        while stack.len() >= 2 {
            let n = stack.len();
            match is_sibling_merge(&stack[n - 2], &stack[n - 1]) {
                Some(merged) => {
                    stack.truncate(n - 2);
                    stack.push(merged);
                }
                None => break,
            }
        }
    }
    stack
}

/// Index of the entry whose domain word is a prefix of `w`, in a table sorted
/// lexicographically by domain.
fn entry_index(sorted: &[Pair], w: &Word) -> Option<usize> {
    let idx = sorted.partition_point(|(d, _)| d.bits() <= w.bits());
    (idx > 0 && sorted[idx - 1].0.is_prefix_of(w)).then(|| idx - 1)
}

/// Composes two valid tables (first `u`, then `v`) without reducing.
/// `v` must be sorted lexicographically by domain.
pub(crate) fn compose_tables(u: &[Pair], v_sorted: &[Pair]) -> Vec<Pair> {
    let mut out = Vec::with_capacity(u.len().max(v_sorted.len()));
    for (a, b) in u {
        if let Some(i) = entry_index(v_sorted, b) {
            let (d, r) = &v_sorted[i];
            let rest = &b.bits()[d.len()..];
            out.push((a.clone(), r.concat_bits(rest)));
        } else {
            let start = v_sorted.partition_point(|(d, _)| d.bits() < b.bits());
            for (d, r) in v_sorted[start..]
                .iter()
                .take_while(|(d, _)| b.is_prefix_of(d))
            {
                out.push((a.concat_bits(&d.bits()[b.len()..]), r.clone()));
            }
        }
    }
    out
}

impl VElement {
    pub fn identity() -> Self {
        VElement {
            pairs: vec![(Word::empty(), Word::empty())],
        }
    }

    /// Validates a prefix-replacement table and returns its reduced form.
    pub fn from_pairs(pairs: Vec<Pair>) -> Result<Self> {
        validate_table(&pairs)?;
        Ok(Self::from_valid_table(pairs))
    }

    /// Reduces a table already known to be valid.
    pub(crate) fn from_valid_table(pairs: Vec<Pair>) -> Self {
        debug_assert!(validate_table(&pairs).is_ok(), "invalid table {pairs:?}");
        VElement {
            pairs: reduce_table(pairs),
        }
    }

    /// Table entries in lexicographic order of the domain word.
    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Table entries in canonical (length, then lexicographic) domain order.
    pub fn canonical_pairs(&self) -> Vec<Pair> {
        let mut p = self.pairs.clone();
        p.sort();
        p
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.len() == 1 && self.pairs[0].0.is_empty()
    }

    pub fn domain(&self) -> Antichain {
        Antichain::new(self.pairs.iter().map(|p| p.0.clone()).collect()).expect("valid table")
    }

    pub fn range(&self) -> Antichain {
        Antichain::new(self.pairs.iter().map(|p| p.1.clone()).collect()).expect("valid table")
    }

    /// Length of the longest domain word.
    pub fn depth(&self) -> usize {
        self.pairs.iter().map(|p| p.0.len()).max().unwrap_or(0)
    }

    /// Length of the longest word in either column.
    pub fn max_word_len(&self) -> usize {
        self.pairs
            .iter()
            .map(|p| p.0.len().max(p.1.len()))
            .max()
            .unwrap_or(0)
    }

    /// The entry whose domain word is a prefix of `w`.
    pub fn entry_for(&self, w: &Word) -> Option<&Pair> {
        entry_index(&self.pairs, w).map(|i| &self.pairs[i])
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        let (d, r) = self
            .entry_for(w)
            .ok_or_else(|| Error::UndefinedOnVertex(w.clone()))?;
        Ok(r.concat_bits(&w.bits()[d.len()..]))
    }

    /// Applies `self`, then `other`.
    pub fn compose(&self, other: &VElement) -> VElement {
        VElement {
            pairs: reduce_table(compose_tables(&self.pairs, &other.pairs)),
        }
    }

    pub fn inverse(&self) -> VElement {
        VElement {
            pairs: reduce_table(
                self.pairs
                    .iter()
                    .map(|(a, b)| (b.clone(), a.clone()))
                    .collect(),
            ),
        }
    }

    /// `self^k` by repeated squaring; negative exponents invert first.
    pub fn power(&self, k: i64) -> VElement {
        let mut base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = VElement::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// `w^{-1} · self · w`.
    pub fn conjugate_by(&self, w: &VElement) -> VElement {
        w.inverse().compose(self).compose(w)
    }

    pub fn equals(&self, other: &VElement) -> bool {
        self == other
    }

    /// The unreduced table obtained by splitting the entry with domain `a`.
    pub fn expanded_table(&self, a: &Word) -> Result<Vec<Pair>> {
        expand_table(&self.pairs, a)
    }

    /// Image of the cone `[u]` as a list of cones (one cone when `u` lies
    /// below a domain word, otherwise the images of the domain words below `u`).
    pub fn image_of_cone(&self, u: &Word) -> Vec<Word> {
        if let Some((d, r)) = self.entry_for(u) {
            return vec![r.concat_bits(&u.bits()[d.len()..])];
        }
        let start = self.pairs.partition_point(|(d, _)| d.bits() < u.bits());
        self.pairs[start..]
            .iter()
            .take_while(|(d, _)| u.is_prefix_of(d))
            .map(|(_, r)| r.clone())
            .collect()
    }
}

/// Splits the entry with domain word `a` in an arbitrary valid table.
pub fn expand_table(pairs: &[Pair], a: &Word) -> Result<Vec<Pair>> {
    let pos = pairs
        .iter()
        .position(|(d, _)| d == a)
        .ok_or_else(|| Error::NotAMember(a.clone()))?;
    let mut out = pairs.to_vec();
    let (d, r) = out.remove(pos);
    out.push((d.child(0), r.child(0)));
    out.push((d.child(1), r.child(1)));
    Ok(out)
}

/// Validates a table and returns its reduced form.
pub fn reduce(pairs: Vec<Pair>) -> Result<VElement> {
    VElement::from_pairs(pairs)
}

/// Leaves of a random binary tree with `n_carets` carets, in lexicographic order.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, n_carets: usize) -> Vec<Word> {
    let mut leaves = vec![Word::empty()];
    for _ in 0..n_carets {
        let i = rng.gen_range(0..leaves.len());
        let leaf = leaves.swap_remove(i);
        leaves.push(leaf.child(0));
        leaves.push(leaf.child(1));
    }
    leaves.sort_by(Word::tree_cmp);
    leaves
}

/// Two random trees with `n_carets` carets each and a random leaf bijection.
pub fn random_element_with<R: Rng + ?Sized>(rng: &mut R, n_carets: usize) -> VElement {
    let domain = random_tree(rng, n_carets);
    let mut range = random_tree(rng, n_carets);
    range.shuffle(rng);
    VElement::from_valid_table(domain.into_iter().zip(range).collect())
}

/// Deterministic random element for a seed.
pub fn random_element(seed: u64, n_carets: usize) -> VElement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_with(&mut rng, n_carets)
}

impl fmt::Display for VElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b) in self.canonical_pairs() {
            writeln!(f, "{a} -> {b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.canonical_pairs().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        f.write_str("}")
    }
}

/// Named elements used throughout the examples and tests.
pub mod named {
    use super::*;

    fn table(entries: &[(&str, &str)]) -> VElement {
        VElement::from_pairs(
            entries
                .iter()
                .map(|(a, b)| (Word::lit(a), Word::lit(b)))
                .collect(),
        )
        .expect("named element is valid")
    }

    /// The swap `s` of the cones `[0]` and `[1]`.
    pub fn swap() -> VElement {
        table(&[("0", "1"), ("1", "0")])
    }

    /// The north-south element `t`: attractor `0^ω`, repeller `1^ω`.
    pub fn shift() -> VElement {
        table(&[("0", "00"), ("10", "01"), ("11", "1")])
    }
}

/// True iff the table, read as a prefix map, is defined on every long word.
pub fn is_valid_table(pairs: &[Pair]) -> bool {
    let d: Vec<Word> = pairs.iter().map(|p| p.0.clone()).collect();
    let r: Vec<Word> = pairs.iter().map(|p| p.1.clone()).collect();
    is_complete_antichain(&d) && is_complete_antichain(&r)
}

#[cfg(test)]
mod tests {
    use super::named::{shift, swap};
    use super::*;

    fn w(s: &str) -> Word {
        Word::lit(s)
    }

    fn el(entries: &[(&str, &str)]) -> VElement {
        VElement::from_pairs(entries.iter().map(|(a, b)| (w(a), w(b))).collect()).unwrap()
    }

    /// Pointwise composition oracle: apply both maps to every word of a fixed length.
    fn agree_pointwise(x: &VElement, f: impl Fn(&Word) -> Word, len: usize) -> bool {
        Word::all_of_length(len).all(|u| x.apply(&u).unwrap() == f(&u))
    }

    #[test]
    fn from_pairs_examples() {
        assert!(el(&[("^", "^")]).is_identity());
        assert!(el(&[("00", "00"), ("01", "01"), ("1", "1")]).is_identity());
        let t = shift();
        assert_eq!(t.len(), 3);
        assert_eq!(t.pairs()[0], (w("0"), w("00")));
    }

    #[test]
    fn from_pairs_errors() {
        assert!(matches!(
            VElement::from_pairs(vec![(w("0"), w("0")), (w("01"), w("1"))]),
            Err(Error::InvalidAntichain(..))
        ));
        assert_eq!(
            VElement::from_pairs(vec![(w("0"), w("0")), (w("10"), w("1"))]),
            Err(Error::IncompleteCover)
        );
        assert!(matches!(
            VElement::from_pairs(vec![(w("0"), w("0")), (w("1"), w("0"))]),
            Err(Error::NotBijection(_))
        ));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(VElement::identity().apply(&w("0110")).unwrap(), w("0110"));
        assert_eq!(swap().apply(&w("001")).unwrap(), w("101"));
        assert_eq!(shift().apply(&w("110")).unwrap(), w("10"));
        assert_eq!(
            shift().apply(&w("1")),
            Err(Error::UndefinedOnVertex(w("1")))
        );
    }

    #[test]
    fn compose_examples() {
        let (s, t) = (swap(), shift());
        assert!(s.compose(&s).is_identity());
        let st = s.compose(&t);
        assert_eq!(st, el(&[("00", "01"), ("01", "1"), ("1", "00")]));
        // oracle: pointwise on all words of length 4
        assert!(agree_pointwise(
            &st,
            |u| t.apply(&s.apply(u).unwrap()).unwrap(),
            4
        ));
        assert!(t.power(0).is_identity());
        assert_eq!(t.inverse(), el(&[("00", "0"), ("01", "10"), ("1", "11")]));
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(vec![
            (w("0"), w("0")),
            (w("10"), w("10")),
            (w("11"), w("11")),
        ])
        .unwrap();
        assert!(r.is_identity());
        let t = shift();
        assert_eq!(reduce(t.pairs().to_vec()).unwrap(), t);
    }

    #[test]
    fn random_element_examples() {
        assert!(random_element(99, 0).is_identity());
        assert!(random_element(1, 3).len() <= 4);
        assert_eq!(random_element(42, 7), random_element(42, 7));
    }

    #[test]
    fn image_of_cone_splits_above_domain() {
        let t = shift();
        assert_eq!(t.image_of_cone(&w("01")), vec![w("001")]);
        assert_eq!(t.image_of_cone(&w("1")), vec![w("01"), w("1")]);
    }

    #[test]
    fn power_matches_iterated_compose() {
        let t = shift();
        let mut acc = VElement::identity();
        for k in 0..9 {
            assert_eq!(t.power(k), acc);
            acc = acc.compose(&t);
        }
        assert_eq!(
            t.power(-3),
            t.inverse().compose(&t.inverse()).compose(&t.inverse())
        );
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_v(max_carets: usize) -> impl Strategy<Value = VElement> {
            (any::<u64>(), 0..=max_carets).prop_map(|(seed, n)| random_element(seed, n))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]

            #[test]
            fn group_axioms(u in arb_v(8), v in arb_v(8), x in arb_v(8)) {
                prop_assert_eq!(u.compose(&v).compose(&x), u.compose(&v.compose(&x)));
                prop_assert!(u.compose(&u.inverse()).is_identity());
                prop_assert!(u.inverse().compose(&u).is_identity());
                prop_assert_eq!(VElement::identity().compose(&u), u.clone());
                prop_assert_eq!(u.compose(&VElement::identity()), u);
            }

            #[test]
            fn compose_agrees_pointwise(u in arb_v(6), v in arb_v(6)) {
                let uv = u.compose(&v);
                let len = u.depth() + v.depth() + uv.depth();
                prop_assert!(agree_pointwise(&uv, |x| v.apply(&u.apply(x).unwrap()).unwrap(), len));
            }

            #[test]
            fn expand_then_reduce_round_trips(u in arb_v(8), pick in any::<prop::sample::Index>()) {
                let a = u.pairs()[pick.index(u.len())].0.clone();
                let expanded = u.expanded_table(&a).unwrap();
                let r = reduce(expanded.clone()).unwrap();
                prop_assert_eq!(&r, &u);
                // reduction preserves the map at the expanded depth
                let depth = expanded.iter().map(|p| p.0.len()).max().unwrap();
                for x in Word::all_of_length(depth) {
                    let (d, img) = expanded.iter().find(|(d, _)| d.is_prefix_of(&x)).unwrap();
                    prop_assert_eq!(r.apply(&x).unwrap(), img.concat_bits(&x.bits()[d.len()..]));
                }
            }

            #[test]
            fn equality_matches_pointwise_oracle(u in arb_v(4), v in arb_v(4)) {
                let len = u.depth().max(v.depth());
                let pointwise = Word::all_of_length(len)
                    .all(|x| u.apply(&x).unwrap() == v.apply(&x).unwrap());
                prop_assert_eq!(u.equals(&v), pointwise);
            }

            #[test]
            fn power_is_additive(u in arb_v(5), m in -4i64..5, n in -4i64..5) {
                prop_assert_eq!(u.power(m + n), u.power(m).compose(&u.power(n)));
            }
        }
    }
}
