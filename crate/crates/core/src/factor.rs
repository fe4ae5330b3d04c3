//! Prime factorization of positive braid closures.
//!
//! The pipeline first removes nugatory crossings (generators that occur
//! exactly once) and then repeatedly looks for a factoring circle around the
//! braid axis. For a closed positive braid diagram in which every generator
//! occurs at least twice, such a circle exists exactly when, for some
//! `1 < r < n`, the letters `r - 1` and `r` are not interleaved around the
//! cyclic word: all `r - 1`s sit in one arc and all `r`s in the complementary
//! arc. Letters that differ by two or more commute, so the word can then be
//! rewritten (rotation plus far commutations) as a block of letters `< r`
//! followed by a block of letters `>= r`. A word with no such split is prime.

use thiserror::Error;

use crate::braid::{BraidError, BraidWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("closure has {0} components, not a knot")]
    NotAKnot(usize),
    #[error("generator {0} does not occur: the closure is a split link")]
    MissingGenerator(usize),
    #[error("generator {generator} occurs {count} times, expected exactly once")]
    NotSingleOccurrence { generator: usize, count: usize },
    #[error("generator {0} occurs only once: the diagram is reducible")]
    Reducible(usize),
    #[error("split point {0:?} is not valid for this word")]
    InvalidSplit(SplitPoint),
    #[error("invariant violated while splitting {word}: {what}")]
    Invariant { word: String, what: String },
    #[error(transparent)]
    Braid(#[from] BraidError),
}

/// Where a word splits into a connected sum.
///
/// After rotating left by `rotation`, the letters `r - 1` and `r` appear as a
/// run of `r - 1`s followed by a run of `r`s. Commuting distant generators
/// then brings every letter `< r` in front of every letter `>= r`; the high
/// block starts at 1-based position `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplitPoint {
    pub rotation: usize,
    pub r: usize,
    pub q: usize,
}

/// How one step of the recursion split a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    /// A generator occurring once; the children are joined by that crossing.
    SingleOccurrence {
        generator: usize,
    },
    Threshold(SplitPoint),
}

/// One split performed during factorization, with the words involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitRecord {
    pub kind: SplitKind,
    pub parent: BraidWord,
    pub low: BraidWord,
    pub high: BraidWord,
}

impl SplitRecord {
    /// `c - n + 1` of the parent equals the children's sum.
    pub fn conserves_defect(&self) -> bool {
        self.parent.euler_defect() == self.low.euler_defect() + self.high.euler_defect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// Prime factors, each the canonical rotation of an indecomposable word in
    /// which every generator occurs at least twice. Sorted by
    /// (strands, length, letters).
    pub prime_factors: Vec<BraidWord>,
    /// Number of components of the factored closure (1 for knots).
    pub components: usize,
}

impl Factorization {
    pub fn factor_count(&self) -> usize {
        self.prime_factors.len()
    }

    pub fn is_unknot(&self) -> bool {
        self.components == 1 && self.prime_factors.is_empty()
    }
}

/// Finds the least split point `(rotation, r, q)`, or `None` when the word is
/// prime.
///
/// Requires every generator to occur at least twice.
pub fn cyclic_decomposition(b: &BraidWord) -> Result<Option<SplitPoint>, FactorError> {
    let counts = b.generator_counts();
    if let Some(g) = counts.iter().position(|&c| c == 0) {
        return Err(FactorError::MissingGenerator(g + 1));
    }
    if let Some(g) = counts.iter().position(|&c| c == 1) {
        return Err(FactorError::Reducible(g + 1));
    }
    let n = b.strands();
    let mut best: Option<SplitPoint> = None;
    for r in 2..n {
        let Some(rotation) = split_rotation(b.letters(), r) else {
            continue;
        };
        let q = b.letters().iter().filter(|&&l| l < r).count() + 1;
        let point = SplitPoint { rotation, r, q };
        if best.is_none_or(|cur| point < cur) {
            best = Some(point);
        }
    }
    Ok(best)
}

/// Least rotation after which the `{r-1, r}` subsequence reads
/// `(r-1)^a r^b`, if the two letters are not interleaved cyclically.
fn split_rotation(letters: &[usize], r: usize) -> Option<usize> {
    let marks: Vec<(usize, bool)> = letters
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == r - 1 || l == r)
        .map(|(i, &l)| (i, l == r))
        .collect();
    let m = marks.len();
    let changes = (0..m)
        .filter(|&i| marks[i].1 != marks[(i + 1) % m].1)
        .count();
    if changes != 2 {
        return None;
    }
    // s: first mark of the (r-1)-run; e: the mark just before it, the last r
    let s = (0..m)
        .find(|&i| !marks[i].1 && marks[(i + m - 1) % m].1)
        .expect("two changes imply a run boundary");
    let first_low = marks[s].0;
    let last_high = marks[(s + m - 1) % m].0;
    Some(if last_high < first_low {
        last_high + 1
    } else {
        0
    })
}

fn validate_split(b: &BraidWord, s: SplitPoint) -> Result<BraidWord, FactorError> {
    let n = b.strands();
    if s.r < 2 || s.r >= n || b.is_empty() || s.rotation >= b.len() {
        return Err(FactorError::InvalidSplit(s));
    }
    let rotated = b.rotated(s.rotation);
    let pair: Vec<usize> = rotated
        .letters()
        .iter()
        .copied()
        .filter(|&l| l == s.r - 1 || l == s.r)
        .collect();
    let low_run = pair.iter().take_while(|&&l| l == s.r - 1).count();
    let well_formed = low_run > 0
        && low_run < pair.len()
        && pair[low_run..].iter().all(|&l| l == s.r)
        && rotated.letters().iter().filter(|&&l| l < s.r).count() + 1 == s.q;
    if !well_formed {
        return Err(FactorError::InvalidSplit(s));
    }
    Ok(rotated)
}

/// Splits `b` at `s` into the low factor in `B_r` and the high factor, shifted
/// down by `r - 1`, in `B_{n-r+1}`.
pub fn split_threshold(
    b: &BraidWord,
    s: SplitPoint,
) -> Result<(BraidWord, BraidWord), FactorError> {
    let rotated = validate_split(b, s)?;
    let low: Vec<usize> = rotated
        .letters()
        .iter()
        .copied()
        .filter(|&l| l < s.r)
        .collect();
    let high: Vec<usize> = rotated
        .letters()
        .iter()
        .filter(|&&l| l >= s.r)
        .map(|&l| l - (s.r - 1))
        .collect();
    Ok((
        BraidWord::new(s.r, low)?,
        BraidWord::new(b.strands() - s.r + 1, high)?,
    ))
}

/// Cuts the closure at the only crossing of generator `g`.
///
/// Returns the letters `< g` as a word in `B_g` and the letters `> g`, shifted
/// down by `g`, as a word in `B_{n-g}`. For `g = n - 1` this is Markov
/// destabilization and the high factor is the empty word on one strand.
pub fn split_single_occurrence(
    b: &BraidWord,
    g: usize,
) -> Result<(BraidWord, BraidWord), FactorError> {
    let count = b.letters().iter().filter(|&&l| l == g).count();
    if g == 0 || g >= b.strands() || count != 1 {
        return Err(FactorError::NotSingleOccurrence {
            generator: g,
            count,
        });
    }
    let low: Vec<usize> = b.letters().iter().copied().filter(|&l| l < g).collect();
    let high: Vec<usize> = b
        .letters()
        .iter()
        .filter(|&&l| l > g)
        .map(|&l| l - g)
        .collect();
    Ok((
        BraidWord::new(g, low)?,
        BraidWord::new(b.strands() - g, high)?,
    ))
}

/// Factors a positive braid knot into primes.
pub fn factorize(b: &BraidWord) -> Result<Factorization, FactorError> {
    factorize_traced(b).map(|(f, _)| f)
}

/// Like [`factorize`], also returning every split performed.
pub fn factorize_traced(b: &BraidWord) -> Result<(Factorization, Vec<SplitRecord>), FactorError> {
    let info = b.closure_info();
    if !info.is_knot {
        return Err(FactorError::NotAKnot(info.components));
    }
    factorize_nonsplit_traced(b)
}

/// Factors a non-split positive braid closure, knot or link.
///
/// Every generator must occur; otherwise the closure is a split link.
pub fn factorize_nonsplit(b: &BraidWord) -> Result<Factorization, FactorError> {
    factorize_nonsplit_traced(b).map(|(f, _)| f)
}

pub fn factorize_nonsplit_traced(
    b: &BraidWord,
) -> Result<(Factorization, Vec<SplitRecord>), FactorError> {
    if let Some(g) = b.generator_counts().iter().position(|&c| c == 0) {
        return Err(FactorError::MissingGenerator(g + 1));
    }
    let components = b.closure_info().components;
    let mut primes = Vec::new();
    let mut trace = Vec::new();
    let mut pending = vec![b.clone()];
    while let Some(word) = pending.pop() {
        if word.strands() == 1 {
            continue;
        }
        let counts = word.generator_counts();
        if let Some(g) = counts.iter().position(|&c| c == 0) {
            return Err(FactorError::MissingGenerator(g + 1));
        }
        let (kind, low, high) = if let Some(g) = counts.iter().position(|&c| c == 1) {
            let (low, high) = split_single_occurrence(&word, g + 1)?;
            (SplitKind::SingleOccurrence { generator: g + 1 }, low, high)
        } else if let Some(point) = cyclic_decomposition(&word)? {
            let (low, high) = split_threshold(&word, point)?;
            (SplitKind::Threshold(point), low, high)
        } else {
            primes.push(word.canonical_rotation());
            continue;
        };
        let record = SplitRecord {
            kind,
            parent: word,
            low,
            high,
        };
        check_split(&record)?;
        pending.push(record.high.clone());
        pending.push(record.low.clone());
        trace.push(record);
    }
    primes.sort_by(|a, b| {
        (a.strands(), a.len(), a.letters()).cmp(&(b.strands(), b.len(), b.letters()))
    });
    Ok((
        Factorization {
            prime_factors: primes,
            components,
        },
        trace,
    ))
}

fn check_split(rec: &SplitRecord) -> Result<(), FactorError> {
    let fail = |what: String| {
        Err(FactorError::Invariant {
            word: rec.parent.to_string(),
            what,
        })
    };
    if !rec.conserves_defect() {
        return fail(format!(
            "c - n + 1 not conserved: {} != {} + {}",
            rec.parent.euler_defect(),
            rec.low.euler_defect(),
            rec.high.euler_defect()
        ));
    }
    let (c, n) = (rec.parent.len(), rec.parent.strands());
    let (c1, n1, c2, n2) = (
        rec.low.len(),
        rec.low.strands(),
        rec.high.len(),
        rec.high.strands(),
    );
    let counts_ok = match rec.kind {
        SplitKind::Threshold(_) => c == c1 + c2 && n + 1 == n1 + n2,
        SplitKind::SingleOccurrence { .. } => c == c1 + c2 + 1 && n == n1 + n2,
    };
    if !counts_ok {
        return fail("crossing or strand counts do not add up".into());
    }
    let parent = rec.parent.closure_info().components;
    let children = rec.low.closure_info().components + rec.high.closure_info().components;
    if parent + 1 != children {
        return fail(format!(
            "components {parent} do not split as {children} - 1"
        ));
    }
    if c1 + n1 >= c + n || c2 + n2 >= c + n {
        return fail("split did not shrink the word".into());
    }
    Ok(())
}
