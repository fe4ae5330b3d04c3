//! Periodic orbits of a template and their braids.
//!
//! A periodic orbit is a primitive cyclic word of bands in which each band
//! may follow its predecessor. Its braid has one strand per rotation of the
//! word and is assembled in one pass through the template: the top cross
//! section (strands sorted along each branch line by itinerary), the band
//! crossings, the half twists, and finally the merge at each branch line,
//! which sorts incoming strands back into the top order.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;
use thiserror::Error;

use crate::braid::{half_twist_word, positive_sort_braid, BraidError, BraidWord, Permutation};
use crate::factor::{factorize_traced, FactorError, SplitRecord};
use crate::invariants::{alexander, AlexanderError, LaurentPoly};
use crate::template::Template;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("empty orbit word")]
    Empty,
    #[error("unknown band {0:?}")]
    UnknownBand(String),
    #[error("band {to} cannot follow band {from}")]
    NotAdjacent { from: String, to: String },
    #[error("{0} is a proper power of a shorter orbit")]
    NotPrimitive(String),
    #[error("orbit {orbit}: {what}")]
    Invariant { orbit: String, what: String },
    #[error("orbit {orbit}: {source}")]
    Factor { orbit: String, source: FactorError },
    #[error("orbit {orbit}: {source}")]
    Alexander {
        orbit: String,
        source: AlexanderError,
    },
    #[error("orbit {orbit}: {source}")]
    Braid { orbit: String, source: BraidError },
}

/// A primitive periodic orbit, stored as its least rotation under band
/// declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitWord {
    bands: Vec<usize>,
}

impl OrbitWord {
    /// Validates adjacency and primitivity and canonicalizes the rotation.
    pub fn new(t: &Template, bands: Vec<usize>) -> Result<Self, OrbitError> {
        if bands.is_empty() {
            return Err(OrbitError::Empty);
        }
        if let Some(&b) = bands.iter().find(|&&b| b >= t.bands.len()) {
            return Err(OrbitError::UnknownBand(b.to_string()));
        }
        let p = bands.len();
        for i in 0..p {
            let (from, to) = (bands[i], bands[(i + 1) % p]);
            if !t.successors(from).contains(&to) {
                return Err(OrbitError::NotAdjacent {
                    from: t.bands[from].id.clone(),
                    to: t.bands[to].id.clone(),
                });
            }
        }
        if !is_primitive(&bands) {
            return Err(OrbitError::NotPrimitive(label(t, &bands)));
        }
        let k = crate::braid::least_rotation(&bands);
        let mut bands = bands;
        bands.rotate_left(k);
        Ok(Self { bands })
    }

    /// Parses band ids joined by `.`, e.g. `x.x.y.x.y`.
    pub fn parse(t: &Template, text: &str) -> Result<Self, OrbitError> {
        let bands = text
            .split('.')
            .map(|id| {
                t.band_index(id.trim())
                    .ok_or_else(|| OrbitError::UnknownBand(id.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(t, bands)
    }

    pub fn bands(&self) -> &[usize] {
        &self.bands
    }

    pub fn period(&self) -> usize {
        self.bands.len()
    }

    /// Band ids joined by `.`.
    pub fn label(&self, t: &Template) -> String {
        label(t, &self.bands)
    }
}

fn label(t: &Template, bands: &[usize]) -> String {
    bands
        .iter()
        .map(|&b| t.bands[b].id.as_str())
        .collect::<Vec<_>>()
        .join(".")
}

fn is_primitive(w: &[usize]) -> bool {
    let p = w.len();
    (1..p)
        .filter(|&d| p.is_multiple_of(d))
        .all(|d| (0..p).any(|i| w[i] != w[(i + d) % p]))
}

/// All primitive periodic orbits of period `<= max_period`, sorted by
/// (period, word).
pub fn enumerate_orbits(t: &Template, max_period: usize) -> Vec<OrbitWord> {
    let mut out = Vec::new();
    for start in 0..t.bands.len() {
        let mut word = vec![start];
        extend_orbits(t, max_period, &mut word, &mut out);
    }
    out.sort_by(|a, b| (a.period(), &a.bands).cmp(&(b.period(), &b.bands)));
    out
}

fn extend_orbits(t: &Template, max_period: usize, word: &mut Vec<usize>, out: &mut Vec<OrbitWord>) {
    let first = word[0];
    let last = *word.last().unwrap();
    if t.successors(last).contains(&first)
        && is_primitive(word)
        && crate::braid::least_rotation(word) == 0
    {
        out.push(OrbitWord {
            bands: word.clone(),
        });
    }
    if word.len() == max_period {
        return;
    }
    // the least rotation starts with the least band
    for &next in t.successors(last) {
        if next >= first {
            word.push(next);
            extend_orbits(t, max_period, word, out);
            word.pop();
        }
    }
}

/// `tr(A^p)` for `p = 1..=max_period`, where `A` is the band transition
/// matrix. Counts closed band walks of length `p`.
pub fn transition_traces(t: &Template, max_period: usize) -> Vec<u128> {
    let a: Vec<Vec<u128>> = t
        .transition_matrix()
        .into_iter()
        .map(|row| row.into_iter().map(u128::from).collect())
        .collect();
    let n = a.len();
    let mut power = a.clone();
    let mut traces = Vec::with_capacity(max_period);
    for p in 1..=max_period {
        if p > 1 {
            power = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| power[i][k] * a[k][j]).sum())
                        .collect()
                })
                .collect();
        }
        traces.push((0..n).map(|i| power[i][i]).sum());
    }
    traces
}

/// One branch line's merge: incoming strands, grouped by input band, sorted
/// into the next top cross section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeStage {
    pub branch_line: usize,
    /// First strand position (0-based) of this branch line's segment.
    pub offset: usize,
    /// `(band, strand count)` per input slot, left to right.
    pub blocks: Vec<(usize, usize)>,
    /// Local permutation applied by the merge braid.
    pub permutation: Permutation,
}

impl MergeStage {
    /// Strands from the same input band keep their relative order.
    pub fn is_shuffle(&self) -> bool {
        let mut start = 0;
        for &(_, len) in &self.blocks {
            let block = &self.permutation.images()[start..start + len];
            if block.windows(2).any(|w| w[0] > w[1]) {
                return false;
            }
            start += len;
        }
        start == self.permutation.len()
    }
}

/// The braid of an orbit together with the data of each construction stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitBraid {
    pub braid: BraidWord,
    /// Rotation index of the strand at each top position.
    pub top_order: Vec<usize>,
    /// Strands carried by each band.
    pub band_loads: Vec<usize>,
    pub band_crossings: usize,
    pub twist_crossings: usize,
    pub merges: Vec<MergeStage>,
}

impl OrbitBraid {
    pub fn merge_crossings(&self) -> usize {
        self.merges
            .iter()
            .map(|m| m.permutation.inversion_count())
            .sum()
    }
}

/// Itinerary order of rotations `i` and `j` of `w` on a common branch line.
fn itinerary_cmp(t: &Template, w: &[usize], i: usize, j: usize) -> Ordering {
    let p = w.len();
    let mut flipped = false;
    for k in 0..p {
        let (a, b) = (w[(i + k) % p], w[(j + k) % p]);
        if a != b {
            let ord = t.bands[a].source.slot.cmp(&t.bands[b].source.slot);
            return if flipped { ord.reverse() } else { ord };
        }
        flipped ^= t.bands[a].twists % 2 == 1;
    }
    Ordering::Equal
}

struct Builder {
    letters: Vec<usize>,
    arrangement: Vec<usize>,
}

impl Builder {
    fn emit(&mut self, word: &BraidWord, offset: usize) {
        for &l in word.letters() {
            let g = l + offset;
            self.letters.push(g);
            self.arrangement.swap(g - 1, g);
        }
    }
}

/// Builds the positive braid of the orbit `w`, given as any rotation.
pub fn build_orbit_braid(t: &Template, w: &[usize]) -> Result<OrbitBraid, OrbitError> {
    let p = w.len();
    let orbit = label(t, w);
    let invariant = |what: String| OrbitError::Invariant {
        orbit: orbit.clone(),
        what,
    };

    let mut top_order: Vec<usize> = (0..p).collect();
    top_order.sort_by(|&i, &j| {
        let (bi, bj) = (
            t.bands[w[i]].source.branch_line,
            t.bands[w[j]].source.branch_line,
        );
        bi.cmp(&bj).then_with(|| itinerary_cmp(t, w, i, j))
    });
    let mut top_position = vec![0; p];
    for (pos, &r) in top_order.iter().enumerate() {
        top_position[r] = pos;
    }

    let mut band_loads = vec![0; t.bands.len()];
    for &b in w {
        band_loads[b] += 1;
    }

    let mut builder = Builder {
        letters: Vec::new(),
        arrangement: top_order.clone(),
    };

    // band crossings: each crossing of strips carrying a and b strands
    let mut strips = t.top_strip_order();
    let mut band_crossings = 0;
    for &c in &t.crossing_word {
        let offset: usize = strips[..c - 1].iter().map(|&s| band_loads[s]).sum();
        let (a, b) = (band_loads[strips[c - 1]], band_loads[strips[c]]);
        let images: Vec<usize> = (0..a).map(|k| k + b).chain(0..b).collect();
        let block_swap = Permutation::from_images(images).expect("block swap is a bijection");
        builder.emit(&positive_sort_braid(&block_swap), offset);
        band_crossings += a * b;
        strips.swap(c - 1, c);
    }

    let strip_offset = |band: usize| -> usize {
        strips
            .iter()
            .take_while(|&&s| s != band)
            .map(|&s| band_loads[s])
            .sum()
    };

    let mut twist_crossings = 0;
    for (band, info) in t.bands.iter().enumerate() {
        let q = band_loads[band];
        if q < 2 || info.twists == 0 {
            continue;
        }
        let offset = strip_offset(band);
        let twist = half_twist_word(q);
        for _ in 0..info.twists {
            builder.emit(&twist, offset);
            twist_crossings += twist.len();
        }
    }

    let mut merges = Vec::with_capacity(t.branch_lines.len());
    let mut offset = 0;
    for (bl, line) in t.branch_lines.iter().enumerate() {
        let blocks: Vec<(usize, usize)> = line.inputs.iter().map(|&b| (b, band_loads[b])).collect();
        let len: usize = blocks.iter().map(|&(_, n)| n).sum();
        let images: Vec<usize> = builder.arrangement[offset..offset + len]
            .iter()
            .map(|&r| top_position[(r + 1) % p])
            .map(|dest| dest.wrapping_sub(offset))
            .collect();
        let permutation = Permutation::from_images(images).map_err(|_| {
            invariant(format!(
                "merge at branch line {} leaves its segment",
                line.id
            ))
        })?;
        builder.emit(&positive_sort_braid(&permutation), offset);
        merges.push(MergeStage {
            branch_line: bl,
            offset,
            blocks,
            permutation,
        });
        offset += len;
    }

    for (pos, &r) in builder.arrangement.iter().enumerate() {
        if top_order[pos] != (r + 1) % p {
            return Err(invariant(format!(
                "bottom cross section does not close at position {}",
                pos + 1
            )));
        }
    }

    let braid = BraidWord::new(p, builder.letters).map_err(|source| OrbitError::Braid {
        orbit: orbit.clone(),
        source,
    })?;
    Ok(OrbitBraid {
        braid,
        top_order,
        band_loads,
        band_crossings,
        twist_crossings,
        merges,
    })
}

/// The positive braid of an orbit.
pub fn orbit_braid(t: &Template, w: &OrbitWord) -> Result<BraidWord, OrbitError> {
    build_orbit_braid(t, w.bands()).map(|b| b.braid)
}

#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub orbit: OrbitWord,
    pub braid: BraidWord,
    pub genus: u64,
    pub prime_factors: Vec<BraidWord>,
    pub alexander: LaurentPoly,
    pub construction: OrbitBraid,
    pub splits: Vec<SplitRecord>,
}

impl OrbitRecord {
    pub fn crossings(&self) -> usize {
        self.braid.len()
    }

    pub fn factor_count(&self) -> usize {
        self.prime_factors.len()
    }
}

/// Braid, genus, factorization and Alexander polynomial of one orbit.
pub fn orbit_record(t: &Template, orbit: &OrbitWord) -> Result<OrbitRecord, OrbitError> {
    let name = orbit.label(t);
    let construction = build_orbit_braid(t, orbit.bands())?;
    let braid = construction.braid.clone();
    let genus = braid.genus_positive().map_err(|source| OrbitError::Braid {
        orbit: name.clone(),
        source,
    })?;
    let (factorization, splits) =
        factorize_traced(&braid).map_err(|source| OrbitError::Factor {
            orbit: name.clone(),
            source,
        })?;
    let alexander = alexander(&braid).map_err(|source| OrbitError::Alexander {
        orbit: name,
        source,
    })?;
    Ok(OrbitRecord {
        orbit: orbit.clone(),
        braid,
        genus,
        prime_factors: factorization.prime_factors,
        alexander,
        construction,
        splits,
    })
}

#[derive(Debug, Clone)]
pub struct Census {
    pub max_period: usize,
    pub records: Vec<OrbitRecord>,
    pub max_factor_count: usize,
    pub bound: BigUint,
}

impl Census {
    /// No orbit has more prime factors than the template's bound.
    pub fn within_bound(&self) -> bool {
        BigUint::from(self.max_factor_count) <= self.bound
    }
}

/// Records for every orbit of period `<= max_period`, in enumeration order.
///
/// Orbits are processed on the current rayon pool; the output does not
/// depend on the number of threads.
pub fn census(t: &Template, max_period: usize) -> Result<Census, OrbitError> {
    let orbits = enumerate_orbits(t, max_period);
    let results: Vec<Result<OrbitRecord, OrbitError>> =
        orbits.par_iter().map(|o| orbit_record(t, o)).collect();
    let records = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let max_factor_count = records
        .iter()
        .map(OrbitRecord::factor_count)
        .max()
        .unwrap_or(0);
    Ok(Census {
        max_period,
        records,
        max_factor_count,
        bound: t.stats().bound,
    })
}

impl fmt::Display for OrbitWord {
    /// Band indices joined by `.`; use [`OrbitWord::label`] for band ids.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bands.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("."))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::parse_braid;
    use crate::template::{parse_template, LORENZ};

    fn labels(t: &Template, orbits: &[OrbitWord]) -> Vec<String> {
        orbits.iter().map(|o| o.label(t)).collect()
    }

    #[test]
    fn lorenz_orbits_up_to_period_three() {
        let t = Template::lorenz();
        assert_eq!(labels(&t, &enumerate_orbits(&t, 1)), ["x", "y"]);
        assert_eq!(
            labels(&t, &enumerate_orbits(&t, 3)),
            ["x", "y", "x.y", "x.x.y", "x.y.y"]
        );
        // trace formula by hand: tr(A^p) = 2^p
        assert_eq!(transition_traces(&t, 3), vec![2, 4, 8]);
    }

    #[test]
    fn annulus_has_one_orbit() {
        let t = Template::annulus();
        let orbits = enumerate_orbits(&t, 10);
        assert_eq!(labels(&t, &orbits), ["u"]);
        assert_eq!(orbit_braid(&t, &orbits[0]).unwrap(), BraidWord::unknot());
    }

    #[test]
    fn orbit_words_validate() {
        let t = Template::lorenz();
        assert_eq!(OrbitWord::parse(&t, "y.x").unwrap().label(&t), "x.y");
        assert_eq!(
            OrbitWord::parse(&t, "x.y.x.y"),
            Err(OrbitError::NotPrimitive("x.y.x.y".into()))
        );
        assert_eq!(
            OrbitWord::parse(&t, "x.z"),
            Err(OrbitError::UnknownBand("z".into()))
        );
        let two = parse_template(
            "template t\nbranchline p\nbranchline q\n\
             band a from p[0] to p[0] twists 0\nband b from p[1] to q[0] twists 0\n\
             band c from q[0] to p[1] twists 0\nband d from q[1] to q[1] twists 0\ncross 2\n",
        )
        .unwrap();
        assert!(matches!(
            OrbitWord::parse(&two, "a.c"),
            Err(OrbitError::NotAdjacent { .. })
        ));
        assert!(OrbitWord::parse(&two, "b.c").is_ok());
    }

    #[test]
    fn lorenz_braid_examples() {
        let t = Template::lorenz();
        let xy = OrbitWord::parse(&t, "x.y").unwrap();
        assert_eq!(
            orbit_braid(&t, &xy).unwrap(),
            BraidWord::new(2, vec![1]).unwrap()
        );
        let x = OrbitWord::parse(&t, "x").unwrap();
        assert_eq!(orbit_braid(&t, &x).unwrap(), BraidWord::unknot());
    }

    #[test]
    fn lorenz_trefoil_orbit() {
        let t = Template::lorenz();
        let w = OrbitWord::parse(&t, "x.x.y.x.y").unwrap();
        let built = build_orbit_braid(&t, w.bands()).unwrap();
        // rotations r0..r4 sorted by lexicographic futures, x < y
        assert_eq!(built.top_order, vec![0, 3, 1, 4, 2]);
        assert_eq!(built.merges.len(), 1);
        assert_eq!(
            built.merges[0].permutation,
            Permutation::from_one_based(&[3, 4, 5, 1, 2]).unwrap()
        );
        assert_eq!(built.braid, parse_braid("321432", Some(5)).unwrap());
        assert_eq!(built.braid.genus_positive(), Ok(1));
        let record = orbit_record(&t, &w).unwrap();
        assert_eq!(
            record.alexander,
            LaurentPoly::from_terms([(-1, 1), (0, -1), (1, 1)])
        );
        assert_eq!(record.factor_count(), 1);
    }

    #[test]
    fn twisted_band_reverses_within_band_order() {
        let text = LORENZ.replace(
            "y from b[1] to b[1] twists 0",
            "y from b[1] to b[1] twists 1",
        );
        let t = parse_template(&text).unwrap();
        // y.y.x: rotations yyx, yxy, xyy. With one half twist on y, the order
        // of yyx vs yxy diverges after crossing y once, so it flips.
        let w = OrbitWord::parse(&t, "x.y.y").unwrap();
        let built = build_orbit_braid(&t, w.bands()).unwrap();
        // w = x y y: r0 = xyy, r1 = yyx, r2 = yxy; untwisted order would be r2 < r1
        assert_eq!(built.top_order, vec![0, 1, 2]);
        assert_eq!(built.twist_crossings, 1);
        assert!(built.merges.iter().all(MergeStage::is_shuffle));
    }

    #[test]
    fn closure_is_the_rotation_cycle() {
        let t = Template::lorenz();
        for orbit in enumerate_orbits(&t, 8) {
            let built = build_orbit_braid(&t, orbit.bands()).unwrap();
            let p = orbit.period();
            let perm = built.braid.permutation();
            for (pos, &r) in built.top_order.iter().enumerate() {
                let next = built
                    .top_order
                    .iter()
                    .position(|&s| s == (r + 1) % p)
                    .unwrap();
                assert_eq!(perm.apply(pos), next);
            }
            assert!(built.braid.closure_info().is_knot);
        }
    }

    #[test]
    fn rotation_does_not_change_the_braid() {
        let t = parse_template(&LORENZ.replace("twists 0\nband y", "twists 3\nband y")).unwrap();
        for orbit in enumerate_orbits(&t, 7) {
            let base = build_orbit_braid(&t, orbit.bands()).unwrap().braid;
            for k in 1..orbit.period() {
                let mut w = orbit.bands().to_vec();
                w.rotate_left(k);
                assert_eq!(build_orbit_braid(&t, &w).unwrap().braid, base);
            }
        }
    }

    #[test]
    fn census_is_independent_of_thread_count() {
        let t = Template::lorenz();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| census(&t, 8)).unwrap();
        let b = four.install(|| census(&t, 8)).unwrap();
        let key = |c: &Census| -> Vec<(String, String)> {
            c.records
                .iter()
                .map(|r| (r.orbit.label(&t), r.braid.to_string()))
                .collect()
        };
        assert_eq!(key(&a), key(&b));
    }
}
