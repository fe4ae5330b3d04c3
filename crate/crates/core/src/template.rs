//! Combinatorial model of a positive braided template.
//!
//! Branch lines are laid out left to right in declaration order. Each band
//! leaves a branch line through an output slot, passes through the band
//! crossing region and its own half twists, and enters a branch line through
//! an input slot. Every band entering a branch line is stretched over the
//! whole branch line, so orbits see the template as a shift of finite type
//! on the bands.
//!
//! Template files are line oriented:
//!
//! ```text
//! template lorenz
//! branchline b
//! band x from b[0] to b[0] twists 0
//! band y from b[1] to b[1] twists 0
//! cross 1            # strips at positions 1 and 2 cross, read top to bottom
//! ```

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

pub const LORENZ: &str = "\
template lorenz
branchline b
band x from b[0] to b[0] twists 0
band y from b[1] to b[1] twists 0
";

pub const ANNULUS: &str = "\
template annulus
branchline a
band u from a[0] to a[0] twists 0
";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{kind}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct TemplateError {
    pub line: Option<usize>,
    pub kind: TemplateErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("missing `template <name>` line")]
    MissingName,
    #[error("duplicate identifier {0:?}")]
    Duplicate(String),
    #[error("unknown branch line {0:?}")]
    UnknownBranchLine(String),
    #[error("negative twist count {0}")]
    NegativeTwists(i64),
    #[error("{side} slot {slot} of branch line {branch_line:?} is assigned twice")]
    DoublyAssigned {
        branch_line: String,
        side: &'static str,
        slot: usize,
    },
    #[error("{side} slot {slot} of branch line {branch_line:?} is unassigned")]
    Unassigned {
        branch_line: String,
        side: &'static str,
        slot: usize,
    },
    #[error("branch line {0:?} needs at least one input and one output band")]
    EmptyBranchLine(String),
    #[error("crossing position {pos} out of range 1..{max}")]
    CrossingOutOfRange { pos: usize, max: usize },
    #[error("crossing word maps top strips {top} to {got}, but the input slots read {bottom}")]
    CrossingMismatch {
        top: String,
        got: String,
        bottom: String,
    },
    #[error("template is disconnected")]
    Disconnected,
    #[error("template has no branch lines")]
    Empty,
}

fn err(line: usize, kind: TemplateErrorKind) -> TemplateError {
    TemplateError {
        line: Some(line),
        kind,
    }
}

/// A band end: `slot` (0-based) on branch line `branch_line` (index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SlotRef {
    pub branch_line: usize,
    pub slot: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchLine {
    pub id: String,
    /// Band indices by input slot, left to right.
    pub inputs: Vec<usize>,
    /// Band indices by output slot, left to right.
    pub outputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Band {
    pub id: String,
    pub source: SlotRef,
    pub target: SlotRef,
    /// Positive half twists.
    pub twists: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub branch_lines: Vec<BranchLine>,
    pub bands: Vec<Band>,
    /// Strip positions (1-based); letter `i` crosses strips `i` and `i + 1`.
    pub crossing_word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateStats {
    /// Joining charts.
    pub joining: usize,
    /// Splitting charts.
    pub splitting: usize,
    pub bands: usize,
    pub branch_lines: usize,
    /// First Betti number of the template.
    pub betti1: usize,
    /// Upper bound on the number of prime factors of any knot on the template.
    pub bound: BigUint,
}

/// `1 + betti1 + J(1 + (2J)!)(2J(1 + (2J)!) - 1)`.
pub fn prime_factor_bound(joining: usize, betti1: usize) -> BigUint {
    let j = BigUint::from(joining);
    let fact: BigUint = (1..=2 * joining as u64).map(BigUint::from).product();
    let a = BigUint::from(1u32) + fact;
    let mut inner = BigUint::from(2u32) * &j * &a;
    let product = if joining == 0 {
        BigUint::ZERO
    } else {
        inner -= 1u32;
        j * a * inner
    };
    BigUint::from(1u32) + BigUint::from(betti1) + product
}

impl Template {
    pub fn lorenz() -> Self {
        parse_template(LORENZ).expect("Lorenz preset parses")
    }

    pub fn annulus() -> Self {
        parse_template(ANNULUS).expect("annulus preset parses")
    }

    pub fn band_index(&self, id: &str) -> Option<usize> {
        self.bands.iter().position(|b| b.id == id)
    }

    /// Band strips at the top of the crossing region: output slots
    /// concatenated in branch-line order.
    pub fn top_strip_order(&self) -> Vec<usize> {
        self.branch_lines
            .iter()
            .flat_map(|bl| bl.outputs.iter().copied())
            .collect()
    }

    /// Band strips at the bottom: input slots concatenated in branch-line
    /// order.
    pub fn bottom_strip_order(&self) -> Vec<usize> {
        self.branch_lines
            .iter()
            .flat_map(|bl| bl.inputs.iter().copied())
            .collect()
    }

    /// Bands an orbit may take right after `band`.
    pub fn successors(&self, band: usize) -> &[usize] {
        &self.branch_lines[self.bands[band].target.branch_line].outputs
    }

    /// `A[i][j] = 1` iff band `j` may follow band `i`.
    pub fn transition_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.bands.len();
        let mut a = vec![vec![0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for &j in self.successors(i) {
                row[j] = 1;
            }
        }
        a
    }

    pub fn stats(&self) -> TemplateStats {
        let joining = self.branch_lines.iter().map(|bl| bl.inputs.len() - 1).sum();
        let splitting = self
            .branch_lines
            .iter()
            .map(|bl| bl.outputs.len() - 1)
            .sum();
        let betti1 = self.bands.len() + 1 - self.branch_lines.len();
        TemplateStats {
            joining,
            splitting,
            bands: self.bands.len(),
            branch_lines: self.branch_lines.len(),
            betti1,
            bound: prime_factor_bound(joining, betti1),
        }
    }

    fn band_names(&self, order: &[usize]) -> String {
        let names: Vec<&str> = order.iter().map(|&b| self.bands[b].id.as_str()).collect();
        format!("({})", names.join(" "))
    }
}

impl fmt::Display for Template {
    /// Writes the template back in file syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "template {}", self.name)?;
        for bl in &self.branch_lines {
            writeln!(f, "branchline {}", bl.id)?;
        }
        for b in &self.bands {
            writeln!(
                f,
                "band {} from {}[{}] to {}[{}] twists {}",
                b.id,
                self.branch_lines[b.source.branch_line].id,
                b.source.slot,
                self.branch_lines[b.target.branch_line].id,
                b.target.slot,
                b.twists
            )?;
        }
        for c in &self.crossing_word {
            writeln!(f, "cross {c}")?;
        }
        Ok(())
    }
}

struct RawBand {
    line: usize,
    id: String,
    from: (String, usize),
    to: (String, usize),
    twists: u32,
}

fn parse_slot(line: usize, tok: &str) -> Result<(String, usize), TemplateError> {
    let syntax = || {
        err(
            line,
            TemplateErrorKind::Syntax(format!("bad slot reference {tok:?}, expected <id>[<slot>]")),
        )
    };
    let (id, rest) = tok.split_once('[').ok_or_else(syntax)?;
    let slot = rest.strip_suffix(']').ok_or_else(syntax)?;
    let slot: usize = slot.parse().map_err(|_| syntax())?;
    if id.is_empty() {
        return Err(syntax());
    }
    Ok((id.to_string(), slot))
}

fn expect_keyword(line: usize, got: Option<&str>, want: &str) -> Result<(), TemplateError> {
    match got {
        Some(t) if t == want => Ok(()),
        other => Err(err(
            line,
            TemplateErrorKind::Syntax(format!(
                "expected `{want}`, found {:?}",
                other.unwrap_or("end of line")
            )),
        )),
    }
}

/// Parses and validates a template file.
pub fn parse_template(text: &str) -> Result<Template, TemplateError> {
    let mut name: Option<String> = None;
    let mut branch_ids: Vec<(usize, String)> = Vec::new();
    let mut raw_bands: Vec<RawBand> = Vec::new();
    let mut crossings: Vec<(usize, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        let rest: Vec<&str> = tokens.collect();
        let arity = |n: usize| -> Result<(), TemplateError> {
            if rest.len() == n {
                Ok(())
            } else {
                Err(err(
                    line,
                    TemplateErrorKind::Syntax(format!(
                        "`{keyword}` takes {n} argument(s), found {}",
                        rest.len()
                    )),
                ))
            }
        };
        match keyword {
            "template" => {
                arity(1)?;
                if name.is_some() {
                    return Err(err(
                        line,
                        TemplateErrorKind::Syntax("second `template` line".into()),
                    ));
                }
                name = Some(rest[0].to_string());
            }
            "branchline" => {
                arity(1)?;
                if branch_ids.iter().any(|(_, id)| id == rest[0]) {
                    return Err(err(line, TemplateErrorKind::Duplicate(rest[0].to_string())));
                }
                branch_ids.push((line, rest[0].to_string()));
            }
            "band" => {
                arity(7)?;
                let id = rest[0].to_string();
                if raw_bands.iter().any(|b| b.id == id) {
                    return Err(err(line, TemplateErrorKind::Duplicate(id)));
                }
                let mut it = rest[1..].iter().copied();
                expect_keyword(line, it.next(), "from")?;
                let from = parse_slot(line, it.next().unwrap_or(""))?;
                expect_keyword(line, it.next(), "to")?;
                let to = parse_slot(line, it.next().unwrap_or(""))?;
                expect_keyword(line, it.next(), "twists")?;
                let t = it.next().unwrap_or("");
                let value: i64 = t.parse().map_err(|_| {
                    err(
                        line,
                        TemplateErrorKind::Syntax(format!("bad twist count {t:?}")),
                    )
                })?;
                if value < 0 {
                    return Err(err(line, TemplateErrorKind::NegativeTwists(value)));
                }
                let twists = u32::try_from(value).map_err(|_| {
                    err(
                        line,
                        TemplateErrorKind::Syntax(format!("twist count {value} too large")),
                    )
                })?;
                raw_bands.push(RawBand {
                    line,
                    id,
                    from,
                    to,
                    twists,
                });
            }
            "cross" => {
                arity(1)?;
                let pos: usize = rest[0].parse().map_err(|_| {
                    err(
                        line,
                        TemplateErrorKind::Syntax(format!("bad crossing position {:?}", rest[0])),
                    )
                })?;
                crossings.push((line, pos));
            }
            other => {
                return Err(err(
                    line,
                    TemplateErrorKind::Syntax(format!("unknown directive `{other}`")),
                ));
            }
        }
    }

    let name = name.ok_or(TemplateError {
        line: None,
        kind: TemplateErrorKind::MissingName,
    })?;
    if branch_ids.is_empty() {
        return Err(TemplateError {
            line: None,
            kind: TemplateErrorKind::Empty,
        });
    }
    let lookup: HashMap<&str, usize> = branch_ids
        .iter()
        .enumerate()
        .map(|(i, (_, id))| (id.as_str(), i))
        .collect();

    // slot tables: per branch line, slot -> (band, declaring line)
    let mut outputs: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new(); branch_ids.len()];
    let mut inputs: Vec<Vec<Option<(usize, usize)>>> = vec![Vec::new(); branch_ids.len()];
    let mut bands = Vec::with_capacity(raw_bands.len());
    for (bi, rb) in raw_bands.iter().enumerate() {
        let resolve = |(id, slot): &(String, usize)| -> Result<SlotRef, TemplateError> {
            let &branch_line = lookup
                .get(id.as_str())
                .ok_or_else(|| err(rb.line, TemplateErrorKind::UnknownBranchLine(id.clone())))?;
            Ok(SlotRef {
                branch_line,
                slot: *slot,
            })
        };
        let source = resolve(&rb.from)?;
        let target = resolve(&rb.to)?;
        for (table, at, side) in [
            (&mut outputs, source, "output"),
            (&mut inputs, target, "input"),
        ] {
            let slots = &mut table[at.branch_line];
            if slots.len() <= at.slot {
                slots.resize(at.slot + 1, None);
            }
            if slots[at.slot].is_some() {
                return Err(err(
                    rb.line,
                    TemplateErrorKind::DoublyAssigned {
                        branch_line: branch_ids[at.branch_line].1.clone(),
                        side,
                        slot: at.slot,
                    },
                ));
            }
            slots[at.slot] = Some((bi, rb.line));
        }
        bands.push(Band {
            id: rb.id.clone(),
            source,
            target,
            twists: rb.twists,
        });
    }

    let mut branch_lines = Vec::with_capacity(branch_ids.len());
    for (i, (line, id)) in branch_ids.iter().enumerate() {
        let collect = |table: &Vec<Option<(usize, usize)>>, side: &'static str| {
            table
                .iter()
                .enumerate()
                .map(|(slot, entry)| {
                    entry.map(|(b, _)| b).ok_or_else(|| {
                        err(
                            *line,
                            TemplateErrorKind::Unassigned {
                                branch_line: id.clone(),
                                side,
                                slot,
                            },
                        )
                    })
                })
                .collect::<Result<Vec<usize>, _>>()
        };
        let ins = collect(&inputs[i], "input")?;
        let outs = collect(&outputs[i], "output")?;
        if ins.is_empty() || outs.is_empty() {
            return Err(err(*line, TemplateErrorKind::EmptyBranchLine(id.clone())));
        }
        branch_lines.push(BranchLine {
            id: id.clone(),
            inputs: ins,
            outputs: outs,
        });
    }

    let template = Template {
        name,
        branch_lines,
        bands,
        crossing_word: crossings.iter().map(|&(_, p)| p).collect(),
    };

    // crossing word must carry the top strip order onto the bottom order
    let mut strips = template.top_strip_order();
    let max = strips.len().saturating_sub(1);
    for &(line, pos) in &crossings {
        if pos == 0 || pos > max {
            return Err(err(
                line,
                TemplateErrorKind::CrossingOutOfRange { pos, max },
            ));
        }
        strips.swap(pos - 1, pos);
    }
    let bottom = template.bottom_strip_order();
    if strips != bottom {
        return Err(TemplateError {
            line: crossings.last().map(|&(l, _)| l),
            kind: TemplateErrorKind::CrossingMismatch {
                top: template.band_names(&template.top_strip_order()),
                got: template.band_names(&strips),
                bottom: template.band_names(&bottom),
            },
        });
    }

    if !is_connected(&template) {
        return Err(TemplateError {
            line: None,
            kind: TemplateErrorKind::Disconnected,
        });
    }
    Ok(template)
}

fn is_connected(t: &Template) -> bool {
    let v = t.branch_lines.len();
    let mut seen = vec![false; v];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for b in &t.bands {
            for (p, q) in [
                (b.source.branch_line, b.target.branch_line),
                (b.target.branch_line, b.source.branch_line),
            ] {
                if p == x && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_BRANCH: &str = "\
template two-branch
branchline p
branchline q
band a from p[0] to p[0] twists 0
band b from p[1] to q[0] twists 1
band c from q[0] to p[1] twists 0
band d from q[1] to q[1] twists 0
cross 2
";

    fn kind(text: &str) -> TemplateErrorKind {
        parse_template(text).unwrap_err().kind
    }

    #[test]
    fn lorenz_parses() {
        let t = Template::lorenz();
        assert_eq!(t.branch_lines.len(), 1);
        assert_eq!(t.bands.len(), 2);
        assert!(t.crossing_word.is_empty());
        let s = t.stats();
        assert_eq!((s.joining, s.splitting, s.bands, s.betti1), (1, 1, 2, 2));
        assert_eq!(s.bound, BigUint::from(18u32));
    }

    #[test]
    fn twisted_lorenz_parses() {
        let text = LORENZ.replace(
            "y from b[1] to b[1] twists 0",
            "y from b[1] to b[1] twists 2",
        );
        let t = parse_template(&text).unwrap();
        assert_eq!(t.bands[1].twists, 2);
    }

    #[test]
    fn doubly_assigned_slot() {
        let text = LORENZ.replace("y from b[1] to b[1]", "y from b[1] to b[0]");
        let e = parse_template(&text).unwrap_err();
        assert_eq!(e.line, Some(4));
        assert!(matches!(
            e.kind,
            TemplateErrorKind::DoublyAssigned {
                side: "input",
                slot: 0,
                ..
            }
        ));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            kind(&LORENZ.replace("to b[0]", "to c[0]")),
            TemplateErrorKind::UnknownBranchLine(id) if id == "c"
        ));
        assert!(matches!(
            kind(&LORENZ.replace("b[1] to b[1]", "b[2] to b[1]")),
            TemplateErrorKind::Unassigned {
                side: "output",
                slot: 1,
                ..
            }
        ));
        assert_eq!(
            kind(&LORENZ.replace("twists 0\nband y", "twists -1\nband y")),
            TemplateErrorKind::NegativeTwists(-1)
        );
        assert!(matches!(
            kind(&TWO_BRANCH.replace("cross 2", "cross 1")),
            TemplateErrorKind::CrossingMismatch { .. }
        ));
        assert!(matches!(
            kind(&TWO_BRANCH.replace("cross 2", "cross 3")),
            TemplateErrorKind::CrossingMismatch { .. }
        ));
        assert_eq!(
            kind(&TWO_BRANCH.replace("cross 2", "cross 4")),
            TemplateErrorKind::CrossingOutOfRange { pos: 4, max: 3 }
        );
        assert_eq!(kind("branchline b\n"), TemplateErrorKind::MissingName);
        assert!(
            matches!(kind("template t\nbranchline b\nbranchline c\nband x from b[0] to b[0] twists 0\n"),
            TemplateErrorKind::EmptyBranchLine(id) if id == "c")
        );
        let two_annuli = "template t\nbranchline b\nbranchline c\n\
            band x from b[0] to b[0] twists 0\nband y from c[0] to c[0] twists 0\n";
        assert_eq!(kind(two_annuli), TemplateErrorKind::Disconnected);
        assert!(matches!(
            kind("template t\nbogus\n"),
            TemplateErrorKind::Syntax(_)
        ));
        assert!(matches!(
            kind(&LORENZ.replace("b[0] to", "b0 to")),
            TemplateErrorKind::Syntax(_)
        ));
    }

    #[test]
    fn stats_examples() {
        let t = parse_template(TWO_BRANCH).unwrap();
        let s = t.stats();
        assert_eq!(
            (s.joining, s.splitting, s.bands, s.branch_lines, s.betti1),
            (2, 2, 4, 2, 3)
        );
        assert_eq!(s.bound, BigUint::from(4954u32));

        let a = Template::annulus().stats();
        assert_eq!((a.joining, a.splitting, a.betti1), (0, 0, 1));
        assert_eq!(a.bound, BigUint::from(2u32));
    }

    #[test]
    fn bound_is_monotone_in_joining_charts() {
        for betti1 in 1..4 {
            let values: Vec<BigUint> = (0..8).map(|j| prime_factor_bound(j, betti1)).collect();
            assert!(values.windows(2).all(|w| w[0] < w[1]));
        }
        // (2J)! passes u64 at J = 11
        let big = prime_factor_bound(11, 12);
        assert!(big > BigUint::from(u64::MAX));
    }

    #[test]
    fn successors_follow_the_target_branch_line() {
        let t = Template::lorenz();
        assert_eq!(t.successors(0), &[0, 1]);
        assert_eq!(t.successors(1), &[0, 1]);
        let t = parse_template(TWO_BRANCH).unwrap();
        let (b, c, d) = (1, 2, 3);
        assert_eq!(t.successors(b), &[c, d]);
        assert_eq!(t.successors(d), &[c, d]);
        assert_eq!(t.successors(c), &[0, b]);
    }

    #[test]
    fn strip_orders_and_display_round_trip() {
        let t = parse_template(TWO_BRANCH).unwrap();
        assert_eq!(t.top_strip_order(), vec![0, 1, 2, 3]);
        assert_eq!(t.bottom_strip_order(), vec![0, 2, 1, 3]);
        assert_eq!(parse_template(&t.to_string()).unwrap(), t);
    }
}
