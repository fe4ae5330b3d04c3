//! Positive braid words, permutations and closed-braid bookkeeping.
//!
//! A [`BraidWord`] stores only positive generators: letter `i` is the
//! crossing σᵢ between strand positions `i` and `i + 1` (1-based). There is
//! no way to express a negative crossing.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("letter {letter} out of range [1, {max}] for {strands} strands")]
    LetterOutOfRange {
        letter: u64,
        strands: usize,
        max: usize,
    },
    #[error("invalid token {0:?}: expected a positive integer")]
    BadToken(String),
    #[error("strand count must be at least 1")]
    NoStrands,
    #[error("permutation images are not a bijection on 1..{0}")]
    NotABijection(usize),
    #[error("closure has {0} components, not a knot")]
    NotAKnot(usize),
    #[error("length - strands + 1 = {0} is odd for a knot closure")]
    OddGenusNumerator(i64),
}

/// A positive braid on `strands` strands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<usize>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<usize>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::NoStrands);
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l >= strands) {
            return Err(BraidError::LetterOutOfRange {
                letter: bad as u64,
                strands,
                max: strands - 1,
            });
        }
        Ok(Self { strands, letters })
    }

    /// The trivial braid on `strands` strands.
    pub fn identity(strands: usize) -> Self {
        assert!(strands >= 1);
        Self {
            strands,
            letters: Vec::new(),
        }
    }

    /// The canonical unknot representative: the empty word on one strand.
    pub fn unknot() -> Self {
        Self::identity(1)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    /// Number of crossings.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `length - strands + 1`, i.e. one minus the Euler characteristic of the
    /// Seifert surface built from the closed braid. Additive under the
    /// connected-sum splits performed by the factoring module.
    pub fn euler_defect(&self) -> i64 {
        self.letters.len() as i64 - self.strands as i64 + 1
    }

    /// Occurrence count of every generator `1..strands`, indexed by `g - 1`.
    pub fn generator_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.strands.saturating_sub(1)];
        for &l in &self.letters {
            counts[l - 1] += 1;
        }
        counts
    }

    /// Rotates the word left by `k` letters (conjugation; closure unchanged).
    pub fn rotated(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            let k = k % letters.len();
            letters.rotate_left(k);
        }
        Self {
            strands: self.strands,
            letters,
        }
    }

    /// Places this word on strands `offset + 1 ..= offset + strands` of a
    /// braid with `total` strands.
    pub fn embedded(&self, offset: usize, total: usize) -> Result<Self, BraidError> {
        Self::new(total, self.letters.iter().map(|&l| l + offset).collect())
    }

    /// Product of adjacent transpositions, in letter order.
    pub fn permutation(&self) -> Permutation {
        // arrangement[pos] = strand that currently occupies position pos
        let mut arrangement: Vec<usize> = (0..self.strands).collect();
        for &l in &self.letters {
            arrangement.swap(l - 1, l);
        }
        let mut images = vec![0; self.strands];
        for (pos, &strand) in arrangement.iter().enumerate() {
            images[strand] = pos;
        }
        Permutation { images }
    }

    pub fn closure_info(&self) -> ClosureInfo {
        let permutation = self.permutation();
        let components = permutation.cycle_count();
        ClosureInfo {
            permutation,
            components,
            is_knot: components == 1,
        }
    }

    /// The lexicographically least cyclic rotation of the letters.
    pub fn canonical_rotation(&self) -> Self {
        let k = least_rotation(&self.letters);
        self.rotated(k)
    }

    /// Genus of the closure via the Bennequin–Stallings formula
    /// `g = (c - n + 1) / 2`, valid for positive braid knots.
    pub fn genus_positive(&self) -> Result<u64, BraidError> {
        let info = self.closure_info();
        if !info.is_knot {
            return Err(BraidError::NotAKnot(info.components));
        }
        let defect = self.euler_defect();
        if defect % 2 != 0 {
            return Err(BraidError::OddGenusNumerator(defect));
        }
        // a knot closure has at least strands - 1 crossings
        debug_assert!(defect >= 0);
        Ok((defect / 2) as u64)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Parses a braid word.
///
/// Accepted forms are a compact digit string (`122112234343344`, one letter
/// per digit) or integers separated by commas and/or whitespace. A text with
/// no separator is always read as compact digits. When `strands` is `None`
/// the strand count is `1 + max letter`, or 1 for the empty word.
pub fn parse_braid(text: &str, strands: Option<usize>) -> Result<BraidWord, BraidError> {
    let text = text.trim();
    let separated = text.contains(|c: char| c == ',' || c.is_whitespace());
    let mut letters = Vec::new();
    if separated {
        for token in text.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let value: u64 = token
                .parse()
                .map_err(|_| BraidError::BadToken(token.to_string()))?;
            letters.push(value);
        }
    } else {
        for c in text.chars() {
            let d = c
                .to_digit(10)
                .ok_or_else(|| BraidError::BadToken(c.to_string()))?;
            letters.push(u64::from(d));
        }
    }

    let strands = match strands {
        Some(s) => s,
        None => letters.iter().max().map_or(1, |&m| m as usize + 1),
    };
    if strands == 0 {
        return Err(BraidError::NoStrands);
    }
    if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l >= strands as u64) {
        return Err(BraidError::LetterOutOfRange {
            letter: bad,
            strands,
            max: strands - 1,
        });
    }
    Ok(BraidWord {
        strands,
        letters: letters.into_iter().map(|l| l as usize).collect(),
    })
}

/// A bijection on `0..n`. `images[j]` is where the strand starting at
/// position `j` ends up.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self, BraidError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(BraidError::NotABijection(n));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// Builds a permutation from 1-based images, as written in cycle-free
    /// one-line notation.
    pub fn from_one_based(images: &[usize]) -> Result<Self, BraidError> {
        if images.contains(&0) {
            return Err(BraidError::NotABijection(images.len()));
        }
        Self::from_images(images.iter().map(|&i| i - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Permutation {
            images: self.images.iter().map(|&i| other.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (j, &i) in self.images.iter().enumerate() {
            images[i] = j;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(j, &i)| i == j)
    }

    /// Disjoint cycles, each starting at its least element, ordered by that
    /// element. Fixed points are included as 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j);
                j = self.images[j];
            }
            cycles.push(cycle);
        }
        cycles
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Cycle lengths in decreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    }

    pub fn inversion_count(&self) -> usize {
        let n = self.len();
        let mut count = 0;
        for a in 0..n {
            for b in a + 1..n {
                if self.images[a] > self.images[b] {
                    count += 1;
                }
            }
        }
        count
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation with 1-based labels, fixed points omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            f.write_str("(")?;
            for (i, j) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", j + 1)?;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureInfo {
    pub permutation: Permutation,
    pub components: usize,
    pub is_knot: bool,
}

/// Positive permutation braid realizing `target`.
///
/// Insertion sort on the destinations: for k = 2..n the element at position
/// k moves left to its sorted slot, emitting the descending run of letters it
/// crosses. Every pair of strands crosses at most once, so the word length is
/// the inversion count of `target`.
pub fn positive_sort_braid(target: &Permutation) -> BraidWord {
    let n = target.len().max(1);
    let mut dest: Vec<usize> = target.images().to_vec();
    let mut letters = Vec::with_capacity(target.inversion_count());
    for k in 1..dest.len() {
        let mut j = k;
        while j > 0 && dest[j - 1] > dest[j] {
            dest.swap(j - 1, j);
            letters.push(j);
            j -= 1;
        }
    }
    BraidWord {
        strands: n,
        letters,
    }
}

/// The positive half twist on `q` strands: (1)(2 1)(3 2 1)...(q-1 ... 1).
pub fn half_twist_word(q: usize) -> BraidWord {
    assert!(q >= 1, "a half twist needs at least one strand");
    let mut letters = Vec::with_capacity(q * (q - 1) / 2);
    for top in 1..q {
        letters.extend((1..=top).rev());
    }
    BraidWord {
        strands: q,
        letters,
    }
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub(crate) fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut failure: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let mut i = failure[j - k - 1];
        while i != -1 && at(j) != at(k + i as usize + 1) {
            if at(j) < at(k + i as usize + 1) {
                k = j - i as usize - 1;
            }
            i = failure[i as usize];
        }
        if i == -1 && at(j) != at(k) {
            if at(j) < at(k) {
                k = j;
            }
            failure[j - k] = -1;
        } else {
            failure[j - k] = i + 1;
        }
    }
    k % n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXAMPLE_WORD: [usize; 15] = [1, 2, 2, 1, 1, 2, 2, 3, 4, 3, 4, 3, 3, 4, 4];

    fn w(strands: usize, letters: &[usize]) -> BraidWord {
        BraidWord::new(strands, letters.to_vec()).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_braid("111", Some(2)).unwrap(), w(2, &[1, 1, 1]));
        assert_eq!(parse_braid("", Some(1)).unwrap(), BraidWord::unknot());
        assert_eq!(parse_braid("", None).unwrap(), BraidWord::unknot());
        assert_eq!(
            parse_braid("122112234343344", None).unwrap(),
            w(5, &EXAMPLE_WORD)
        );
        assert_eq!(parse_braid("10, 11 3", None).unwrap(), w(12, &[10, 11, 3]));
        assert_eq!(parse_braid(" 1,2 ,3 ", Some(6)).unwrap(), w(6, &[1, 2, 3]));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_braid("13", Some(3)),
            Err(BraidError::LetterOutOfRange { letter: 3, .. })
        ));
        assert!(matches!(
            parse_braid("102", None),
            Err(BraidError::LetterOutOfRange { .. })
        ));
        assert!(matches!(
            parse_braid("1 x 2", None),
            Err(BraidError::BadToken(_))
        ));
        assert!(matches!(
            parse_braid("1-2", None),
            Err(BraidError::BadToken(_))
        ));
        assert!(matches!(
            parse_braid("", Some(0)),
            Err(BraidError::NoStrands)
        ));
        assert!(matches!(
            parse_braid("1", Some(1)),
            Err(BraidError::LetterOutOfRange { .. })
        ));
    }

    #[test]
    fn closure_examples() {
        let info = w(2, &[1, 1, 1]).closure_info();
        assert_eq!(
            info.permutation,
            Permutation::from_one_based(&[2, 1]).unwrap()
        );
        assert_eq!((info.components, info.is_knot), (1, true));

        let info = w(2, &[1, 1]).closure_info();
        assert!(info.permutation.is_identity());
        assert_eq!((info.components, info.is_knot), (2, false));

        // hand composition: 1 -> 2 -> 1 -> 1, 2 -> 1 -> 2 -> 3, 3 -> 3 -> 3 -> 2
        let info = w(3, &[1, 1, 2]).closure_info();
        assert_eq!(
            info.permutation,
            Permutation::from_one_based(&[1, 3, 2]).unwrap()
        );
        assert_eq!(info.permutation.cycle_type(), vec![2, 1]);
        assert_eq!((info.components, info.is_knot), (2, false));
    }

    #[test]
    fn example_word_closes_to_two_components() {
        // σ1 σ2² σ1² σ2² reduces to σ1, and (σ3σ4)² is a 3-cycle on {3,4,5}
        let info = w(5, &EXAMPLE_WORD).closure_info();
        assert_eq!(info.permutation.cycle_type(), vec![3, 2]);
        assert_eq!(info.components, 2);
        assert_eq!(
            w(5, &EXAMPLE_WORD).genus_positive(),
            Err(BraidError::NotAKnot(2))
        );
    }

    #[test]
    fn canonical_rotation_examples() {
        assert_eq!(w(3, &[2, 1, 1]).canonical_rotation(), w(3, &[1, 1, 2]));
        assert_eq!(
            BraidWord::identity(2).canonical_rotation(),
            BraidWord::identity(2)
        );
        let rotated = w(5, &EXAMPLE_WORD).rotated(2);
        assert_eq!(
            rotated.letters(),
            &[2, 1, 1, 2, 2, 3, 4, 3, 4, 3, 3, 4, 4, 1, 2]
        );
        assert_eq!(
            rotated.canonical_rotation(),
            w(5, &EXAMPLE_WORD).canonical_rotation()
        );
        assert_eq!(rotated.canonical_rotation().letters()[..4], [1, 1, 2, 2]);
    }

    #[test]
    fn sort_braid_examples() {
        assert!(positive_sort_braid(&Permutation::identity(4)).is_empty());
        assert_eq!(
            positive_sort_braid(&Permutation::from_one_based(&[2, 1]).unwrap()).letters(),
            &[1]
        );
        // (a, b, c) -> (c, a, b): a goes to 2, b to 3, c to 1
        let shuffle = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let word = positive_sort_braid(&shuffle);
        assert_eq!(word.letters(), &[2, 1]);
        assert_eq!(word.permutation(), shuffle);
    }

    #[test]
    fn half_twist_examples() {
        assert!(half_twist_word(1).is_empty());
        assert_eq!(half_twist_word(2).letters(), &[1]);
        let t3 = half_twist_word(3);
        assert_eq!(t3.letters(), &[1, 2, 1]);
        assert_eq!(
            t3.permutation(),
            Permutation::from_one_based(&[3, 2, 1]).unwrap()
        );
    }

    #[test]
    fn genus_examples() {
        assert_eq!(w(2, &[1, 1, 1]).genus_positive(), Ok(1));
        assert_eq!(BraidWord::unknot().genus_positive(), Ok(0));
        assert_eq!(w(2, &[1, 1]).genus_positive(), Err(BraidError::NotAKnot(2)));
    }

    #[test]
    fn half_twists_reverse_order() {
        for q in 1..=8 {
            let t = half_twist_word(q);
            assert_eq!(t.len(), q * (q - 1) / 2);
            let rev: Vec<usize> = (0..q).rev().collect();
            assert_eq!(t.permutation().images(), &rev[..]);
        }
    }

    fn all_permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_permutations(n - 1) {
            for slot in 0..n {
                let mut q = p.clone();
                q.insert(slot, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn sort_braid_realizes_every_small_permutation() {
        for n in 1..=6 {
            for images in all_permutations(n) {
                let pi = Permutation::from_images(images).unwrap();
                let word = positive_sort_braid(&pi);
                assert_eq!(word.len(), pi.inversion_count());
                assert_eq!(word.permutation(), pi);
                // each pair of strands crosses at most once
                let mut arrangement: Vec<usize> = (0..n).collect();
                let mut crossed = std::collections::HashSet::new();
                for &l in word.letters() {
                    let pair = (
                        arrangement[l - 1].min(arrangement[l]),
                        arrangement[l - 1].max(arrangement[l]),
                    );
                    assert!(crossed.insert(pair));
                    arrangement.swap(l - 1, l);
                }
            }
        }
    }

    #[test]
    fn least_rotation_matches_brute_force() {
        let words: [&[u8]; 6] = [b"", b"a", b"baa", b"abab", b"cabcab", b"2211221"];
        for s in words {
            let best = (0..s.len().max(1))
                .min_by_key(|&k| {
                    let mut v = s.to_vec();
                    if !v.is_empty() {
                        v.rotate_left(k);
                    }
                    v
                })
                .unwrap();
            let mut a = s.to_vec();
            let mut b = s.to_vec();
            if !s.is_empty() {
                a.rotate_left(best);
                b.rotate_left(least_rotation(s));
            }
            assert_eq!(a, b);
        }
    }

    fn arb_word() -> impl Strategy<Value = BraidWord> {
        (1usize..=8).prop_flat_map(|n| {
            let letters = if n == 1 {
                Just(Vec::new()).boxed()
            } else {
                prop::collection::vec(1..n, 0..=20).boxed()
            };
            letters.prop_map(move |l| BraidWord::new(n, l).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rotation_preserves_closure(b in arb_word(), k in 0usize..40) {
            let r = b.rotated(k);
            let (p, q) = (b.permutation(), r.permutation());
            prop_assert_eq!(p.cycle_type(), q.cycle_type());
            prop_assert_eq!(b.closure_info().components, r.closure_info().components);
        }

        #[test]
        fn canonical_rotation_is_least_and_idempotent(b in arb_word(), k in 0usize..40) {
            let c = b.canonical_rotation();
            prop_assert_eq!(&c.canonical_rotation(), &c);
            prop_assert_eq!(&b.rotated(k).canonical_rotation(), &c);
            for j in 0..b.len() {
                prop_assert!(c.letters() <= b.rotated(j).letters());
            }
        }

        #[test]
        fn print_then_parse_round_trips(b in arb_word()) {
            let text = b.to_string();
            prop_assert_eq!(parse_braid(&text, Some(b.strands())).unwrap(), b);
        }

        #[test]
        fn knot_closures_have_even_defect(b in arb_word()) {
            if b.closure_info().is_knot {
                prop_assert_eq!(b.euler_defect().rem_euclid(2), 0);
                prop_assert!(b.genus_positive().is_ok());
            }
        }
    }
}
