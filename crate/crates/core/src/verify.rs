//! Invariant suites run over a finished census.

use std::fmt;

use crate::braid::BraidWord;
use crate::factor::factorize;
use crate::invariants::{alexander, LaurentPoly};
use crate::orbit::{build_orbit_braid, enumerate_orbits, transition_traces, Census, OrbitRecord};
use crate::template::Template;

/// Outcome of one named invariant over the whole census.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    /// Number of individual assertions made.
    pub cases: usize,
    /// First few failures, rendered.
    pub failures: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn assert(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < 5 {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAILED" };
        write!(f, "{:<24} {:>6} cases  {}", self.name, self.cases, status)?;
        for failure in &self.failures {
            write!(f, "\n    {failure}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `Σ_{d | p} d · prim(d)` against `tr(A^p)` for every `p <= max_period`.
pub fn trace_formula(t: &Template, max_period: usize) -> Check {
    let mut check = Check::new("trace formula");
    let orbits = enumerate_orbits(t, max_period);
    let mut primitive = vec![0u128; max_period + 1];
    for o in &orbits {
        primitive[o.period()] += 1;
    }
    for (p, &trace) in (1..=max_period).zip(&transition_traces(t, max_period)) {
        let sum: u128 = (1..=p)
            .filter(|&d| p.is_multiple_of(d))
            .map(|d| d as u128 * primitive[d])
            .sum();
        check.assert(sum == trace, || {
            format!("period {p}: orbit sum {sum} != trace {trace}")
        });
    }
    check
}

/// Runs every census invariant. `rotation_sample` bounds how many orbits are
/// rebuilt from a rotated word (the most expensive check).
pub fn verify_census(t: &Template, census: &Census, rotation_sample: usize) -> VerifyReport {
    let mut closure = Check::new("closure cycle");
    let mut ledger = Check::new("crossing ledger");
    let mut shuffle = Check::new("shuffle merges");
    let mut genus = Check::new("genus additivity");
    let mut multiplicative = Check::new("alexander product");
    let mut rotation = Check::new("rotation independence");
    let mut bound = Check::new("prime factor bound");

    for record in &census.records {
        let name = || record.orbit.label(t);
        check_closure(record, &mut closure, name);
        check_ledger(t, record, &mut ledger, name);
        for stage in &record.construction.merges {
            shuffle.assert(stage.is_shuffle(), || {
                format!(
                    "{}: merge at branch line {} is not a shuffle",
                    name(),
                    stage.branch_line
                )
            });
        }
        for split in &record.splits {
            genus.assert(split.conserves_defect(), || {
                format!(
                    "{}: split of [{}] into [{}] and [{}]",
                    name(),
                    split.parent,
                    split.low,
                    split.high
                )
            });
        }
        let total: i64 = record
            .prime_factors
            .iter()
            .map(BraidWord::euler_defect)
            .sum();
        genus.assert(
            total == record.braid.euler_defect()
                && record.braid.euler_defect() == 2 * record.genus as i64,
            || {
                format!(
                    "{}: factor defects sum to {total}, braid has {}",
                    name(),
                    record.braid.euler_defect()
                )
            },
        );
        let product = factor_product(&record.prime_factors);
        multiplicative.assert(product.as_ref() == Ok(&record.alexander), || {
            format!(
                "{}: Δ = {}, product of factors = {:?}",
                name(),
                record.alexander,
                product
            )
        });
    }

    for record in sample(&census.records, rotation_sample) {
        let p = record.orbit.period();
        let mut w = record.orbit.bands().to_vec();
        w.rotate_left(p / 2);
        let ok = build_orbit_braid(t, &w).is_ok_and(|rebuilt| {
            factorize(&rebuilt.braid).is_ok_and(|f| f.factor_count() == record.factor_count())
                && alexander(&rebuilt.braid).as_ref() == Ok(&record.alexander)
        });
        rotation.assert(ok, || {
            format!(
                "{}: rotation by {} changes the invariants",
                record.orbit.label(t),
                p / 2
            )
        });
    }

    bound.assert(census.within_bound(), || {
        format!(
            "max factor count {} exceeds N = {}",
            census.max_factor_count, census.bound
        )
    });

    let checks = vec![
        trace_formula(t, census.max_period),
        closure,
        ledger,
        shuffle,
        genus,
        multiplicative,
        rotation,
        bound,
    ];
    VerifyReport { checks }
}

fn check_closure(record: &OrbitRecord, check: &mut Check, name: impl Fn() -> String) {
    let top = &record.construction.top_order;
    let p = top.len();
    let mut position = vec![0; p];
    for (pos, &r) in top.iter().enumerate() {
        position[r] = pos;
    }
    let perm = record.braid.permutation();
    let ok = (0..p).all(|pos| perm.apply(pos) == position[(top[pos] + 1) % p]);
    check.assert(ok && perm.cycle_count() == 1, || {
        format!("{}: closure permutation {perm}", name())
    });
}

fn check_ledger(t: &Template, record: &OrbitRecord, check: &mut Check, name: impl Fn() -> String) {
    let loads = &record.construction.band_loads;
    let mut strips = t.top_strip_order();
    let mut band = 0;
    for &c in &t.crossing_word {
        band += loads[strips[c - 1]] * loads[strips[c]];
        strips.swap(c - 1, c);
    }
    let twist: usize = t
        .bands
        .iter()
        .zip(loads)
        .map(|(b, &q)| b.twists as usize * q * q.saturating_sub(1) / 2)
        .sum();
    let merge = record.construction.merge_crossings();
    let expected = band + twist + merge;
    check.assert(record.crossings() == expected, || {
        format!(
            "{}: {} crossings, ledger {band} + {twist} + {merge}",
            name(),
            record.crossings()
        )
    });
}

fn factor_product(factors: &[BraidWord]) -> Result<LaurentPoly, String> {
    factors
        .iter()
        .map(|f| alexander(f).map_err(|e| format!("factor [{f}]: {e}")))
        .product()
}

/// Up to `n` records spread evenly over the census.
fn sample(records: &[OrbitRecord], n: usize) -> impl Iterator<Item = &OrbitRecord> {
    let step = if n == 0 {
        usize::MAX
    } else {
        records.len().div_ceil(n).max(1)
    };
    records.iter().step_by(step).take(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::census;

    #[test]
    fn lorenz_census_passes() {
        let t = Template::lorenz();
        let c = census(&t, 7).unwrap();
        let report = verify_census(&t, &c, 10);
        for check in &report.checks {
            assert!(check.passed(), "{check}");
            assert!(check.cases > 0, "{check}");
        }
        assert_eq!(report.check("trace formula").unwrap().cases, 7);
    }

    #[test]
    fn failures_are_reported() {
        let t = Template::lorenz();
        let mut c = census(&t, 5).unwrap();
        c.records[2].alexander = LaurentPoly::monomial(2, 0);
        c.max_factor_count = 19;
        let report = verify_census(&t, &c, 0);
        assert!(!report.passed());
        assert!(!report.check("alexander product").unwrap().passed());
        assert!(!report.check("prime factor bound").unwrap().passed());
        assert!(report.check("closure cycle").unwrap().passed());
    }
}
