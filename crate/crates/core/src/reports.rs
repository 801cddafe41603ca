//! Aggregate assumption statistics over the eligible words of a lexicon.
//!
//! A source word is eligible when it has at least two senses and at least
//! one target-language translation. Counts are kept as integers; percentages
//! are rounded to one decimal (half to even) only when rendered.

use std::fmt;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::assumptions::{profile, AssumptionProfile, Direction};
use crate::model::MultiWordnet;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no eligible {0} words (need >=2 senses and >=1 translation)")]
    EmptyPopulation(Direction),
    #[error("write failed: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// A percentage in tenths, rounded half to even from an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent {
    tenths: u64,
}

impl Percent {
    pub fn from_counts(count: usize, total: usize) -> Percent {
        assert!(total > 0, "percentage of an empty population");
        let num = 1000 * count as u128;
        let den = total as u128;
        let (q, r) = (num / den, num % den);
        let tenths = match (2 * r).cmp(&den) {
            std::cmp::Ordering::Less => q,
            std::cmp::Ordering::Greater => q + 1,
            std::cmp::Ordering::Equal => q + (q & 1),
        };
        Percent {
            tenths: tenths as u64,
        }
    }

    pub fn tenths(self) -> u64 {
        self.tenths
    }

    pub fn value(self) -> f64 {
        self.tenths as f64 / 10.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.tenths / 10, self.tenths % 10)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // shortest round-trip formatting of tenths/10 always has one decimal
        serializer.serialize_f64(self.value())
    }
}

/// Rows of the per-assumption table, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table1Row {
    OsptPsa,
    OtpsSpa,
    Gpa,
    Ssa,
    Gsa,
    NoLg,
}

impl Table1Row {
    pub const ALL: [Table1Row; 6] = [
        Table1Row::OsptPsa,
        Table1Row::OtpsSpa,
        Table1Row::Gpa,
        Table1Row::Ssa,
        Table1Row::Gsa,
        Table1Row::NoLg,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Table1Row::OsptPsa => "OSPT/PSA",
            Table1Row::OtpsSpa => "OTPS/SPA",
            Table1Row::Gpa => "GPA",
            Table1Row::Ssa => "SSA",
            Table1Row::Gsa => "GSA",
            Table1Row::NoLg => "NoLG",
        }
    }

    fn holds(self, p: &AssumptionProfile) -> bool {
        let f = &p.flags;
        match self {
            Table1Row::OsptPsa => f.ospt,
            Table1Row::OtpsSpa => f.otps,
            Table1Row::Gpa => f.gpa,
            Table1Row::Ssa => f.ssa,
            Table1Row::Gsa => f.gsa,
            Table1Row::NoLg => f.nolg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table1Report {
    pub direction: Direction,
    pub eligible_word_count: usize,
    /// Satisfying-word counts, indexed like [`Table1Row::ALL`].
    pub counts: [usize; 6],
}

impl Table1Report {
    pub fn count(&self, row: Table1Row) -> usize {
        self.counts[row as usize]
    }

    pub fn percent(&self, row: Table1Row) -> Percent {
        Percent::from_counts(self.count(row), self.eligible_word_count)
    }
}

impl Serialize for Table1Report {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let percentages: std::collections::BTreeMap<&str, Percent> = Table1Row::ALL
            .iter()
            .map(|&r| (r.label(), self.percent(r)))
            .collect();
        serde_json::json!({
            "direction": self.direction,
            "eligible_word_count": self.eligible_word_count,
            "percentages": percentages,
        })
        .serialize(serializer)
    }
}

/// One cell of the 2×2×2 breakdown.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Combination {
    pub ospt: bool,
    pub otps: bool,
    pub nolg: bool,
}

impl Combination {
    /// All eight cells; the last one is the bijection cell.
    pub fn all() -> [Combination; 8] {
        std::array::from_fn(Combination::from_index)
    }

    fn from_index(i: usize) -> Combination {
        Combination {
            ospt: i & 4 != 0,
            otps: i & 2 != 0,
            nolg: i & 1 != 0,
        }
    }

    pub fn index(self) -> usize {
        (self.ospt as usize) << 2 | (self.otps as usize) << 1 | self.nolg as usize
    }

    pub const BIJECTION: Combination = Combination {
        ospt: true,
        otps: true,
        nolg: true,
    };
}

fn mark(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table2Report {
    pub direction: Direction,
    pub eligible_word_count: usize,
    /// Word counts per cell, indexed by [`Combination::index`].
    pub cells: [usize; 8],
}

impl Table2Report {
    pub fn count(&self, c: Combination) -> usize {
        self.cells[c.index()]
    }

    pub fn percent(&self, c: Combination) -> Percent {
        Percent::from_counts(self.count(c), self.eligible_word_count)
    }
}

impl Serialize for Table2Report {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let cells: Vec<serde_json::Value> = Combination::all()
            .iter()
            .map(|&c| {
                serde_json::json!({
                    "NoLG": c.nolg,
                    "OSPT": c.ospt,
                    "OTPS": c.otps,
                    "percent": self.percent(c),
                })
            })
            .collect();
        serde_json::json!({
            "cells": cells,
            "direction": self.direction,
            "eligible_word_count": self.eligible_word_count,
        })
        .serialize(serializer)
    }
}

/// Profiles of all eligible source words, sorted by lemma.
pub fn eligible_profiles(m: &MultiWordnet, d: Direction) -> Vec<AssumptionProfile> {
    m.words_in_language(d.source)
        .par_iter()
        .map(|w| profile(m, d, w).expect("indexed words are in vocabulary"))
        .filter(|p| p.eligible)
        .collect()
}

fn nonempty(profiles: &[AssumptionProfile], d: Direction) -> Result<(), ReportError> {
    if profiles.is_empty() {
        return Err(ReportError::EmptyPopulation(d));
    }
    Ok(())
}

pub fn table1_from_profiles(
    profiles: &[AssumptionProfile],
    d: Direction,
) -> Result<Table1Report, ReportError> {
    nonempty(profiles, d)?;
    let mut counts = [0usize; 6];
    for p in profiles {
        for row in Table1Row::ALL {
            counts[row as usize] += row.holds(p) as usize;
        }
    }
    Ok(Table1Report {
        direction: d,
        eligible_word_count: profiles.len(),
        counts,
    })
}

pub fn table2_from_profiles(
    profiles: &[AssumptionProfile],
    d: Direction,
) -> Result<Table2Report, ReportError> {
    nonempty(profiles, d)?;
    let mut cells = [0usize; 8];
    for p in profiles {
        let c = Combination {
            ospt: p.flags.ospt,
            otps: p.flags.otps,
            nolg: p.flags.nolg,
        };
        cells[c.index()] += 1;
    }
    Ok(Table2Report {
        direction: d,
        eligible_word_count: profiles.len(),
        cells,
    })
}

pub fn table1(m: &MultiWordnet, d: Direction) -> Result<Table1Report, ReportError> {
    table1_from_profiles(&eligible_profiles(m, d), d)
}

pub fn table2(m: &MultiWordnet, d: Direction) -> Result<Table2Report, ReportError> {
    table2_from_profiles(&eligible_profiles(m, d), d)
}

fn csv_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink)
}

/// Renders one column per report, rows as in [`Table1Row::ALL`].
pub fn write_table1_csv<W: Write>(reports: &[Table1Report], sink: W) -> Result<(), ReportError> {
    let mut w = csv_writer(sink);
    let mut header = vec!["assumption".to_string()];
    header.extend(reports.iter().map(|r| r.direction.target.to_string()));
    w.write_record(&header)?;
    for row in Table1Row::ALL {
        let mut rec = vec![row.label().to_string()];
        rec.extend(reports.iter().map(|r| r.percent(row).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Renders the eight cells as rows, one percentage column per report.
pub fn write_table2_csv<W: Write>(reports: &[Table2Report], sink: W) -> Result<(), ReportError> {
    let mut w = csv_writer(sink);
    let mut header: Vec<String> = vec!["OSPT".into(), "OTPS".into(), "NoLG".into()];
    header.extend(reports.iter().map(|r| r.direction.target.to_string()));
    w.write_record(&header)?;
    for c in Combination::all() {
        let mut rec: Vec<String> = vec![mark(c.ospt).into(), mark(c.otps).into(), mark(c.nolg).into()];
        rec.extend(reports.iter().map(|r| r.percent(c).to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

const PROFILE_COLUMNS: [&str; 17] = [
    "lang",
    "lemma",
    "pos",
    "target",
    "sense_count",
    "translation_count",
    "eligible",
    "OSPT",
    "PSA",
    "OTPS",
    "SPA",
    "SSA",
    "GSA",
    "GPA",
    "NoLG",
    "OCPW",
    "parallel_polysemy_partners",
];

pub fn write_profiles_csv<W: Write>(
    profiles: &[AssumptionProfile],
    sink: W,
) -> Result<usize, ReportError> {
    let mut w = csv_writer(sink);
    w.write_record(PROFILE_COLUMNS)?;
    for p in profiles {
        let f = &p.flags;
        let b = |x: bool| x.to_string();
        w.write_record([
            p.word.language().to_string(),
            p.word.lemma().to_string(),
            p.word.pos().to_string(),
            p.direction.target.to_string(),
            p.sense_count.to_string(),
            p.translation_count.to_string(),
            b(p.eligible),
            b(f.ospt),
            b(f.psa),
            b(f.otps),
            b(f.spa),
            b(f.ssa),
            b(f.gsa),
            b(f.gpa),
            b(f.nolg),
            b(f.ocpw),
            p.parallel_polysemy_partners.join(" "),
        ])?;
    }
    w.flush()?;
    Ok(profiles.len())
}

/// One CSV row per eligible word (header first); returns the row count.
pub fn dump_profiles<W: Write>(
    m: &MultiWordnet,
    d: Direction,
    sink: W,
) -> Result<usize, ReportError> {
    let profiles = eligible_profiles(m, d);
    nonempty(&profiles, d)?;
    write_profiles_csv(&profiles, sink)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_even() {
        // 1/8 = 12.5% exactly; 1/16 = 6.25% -> 6.2; 3/16 = 18.75% -> 18.8
        assert_eq!(Percent::from_counts(1, 8).to_string(), "12.5");
        assert_eq!(Percent::from_counts(1, 16).to_string(), "6.2");
        assert_eq!(Percent::from_counts(3, 16).to_string(), "18.8");
        assert_eq!(Percent::from_counts(1, 3).to_string(), "33.3");
        assert_eq!(Percent::from_counts(2, 3).to_string(), "66.7");
        assert_eq!(Percent::from_counts(0, 7).to_string(), "0.0");
        assert_eq!(Percent::from_counts(7, 7).to_string(), "100.0");
        assert_eq!(Percent::from_counts(1, 2000).to_string(), "0.0");
        assert_eq!(Percent::from_counts(3, 2000).to_string(), "0.2");
    }

    #[test]
    fn percent_json_has_one_decimal() {
        for (c, t) in [(1, 3), (2, 3), (0, 1), (1, 1), (1, 8), (17, 19), (1, 7)] {
            let p = Percent::from_counts(c, t);
            assert_eq!(serde_json::to_string(&p).unwrap(), p.to_string());
        }
    }

    #[test]
    fn combination_order_matches_table_layout() {
        let all = Combination::all();
        assert_eq!(
            all[0],
            Combination {
                ospt: false,
                otps: false,
                nolg: false
            }
        );
        assert_eq!(all[7], Combination::BIJECTION);
        for (i, c) in all.iter().enumerate() {
            assert_eq!(c.index(), i);
        }
    }
}
