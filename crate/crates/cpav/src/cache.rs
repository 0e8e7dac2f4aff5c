//! On-disk cache of exact count tables.
//!
//! One plain-text file per `(pattern, n_max)`:
//!
//! ```text
//! cpav-count-table 1
//! pattern 1,3,2
//! n_max 5
//! 1
//! 1
//! 2
//! 5
//! 16
//! 63
//! ```
//!
//! Files are written to a temporary file in the cache directory and renamed
//! into place, so readers never see a partial entry. Every entry is checked
//! with [`CountTable::from_counts`] when loaded; invalid files are ignored.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use cpav_core::enumerate::CountTable;
use cpav_core::Pattern;
use num_bigint::BigUint;

pub const HEADER: &str = "cpav-count-table 1";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

fn key(pattern: &Pattern) -> String {
    let parts: Vec<String> = pattern.entries().iter().map(|v| v.to_string()).collect();
    parts.join("-")
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, pattern: &Pattern, n_max: usize) -> PathBuf {
        self.dir.join(format!("{}_n{}.txt", key(pattern), n_max))
    }

    /// The table for `(pattern, n_max)`, or the prefix of a cached table
    /// with a larger `n_max`.
    pub fn load(&self, pattern: &Pattern, n_max: usize) -> Option<CountTable> {
        if let Some(t) = read_entry(&self.path(pattern, n_max), pattern) {
            return (t.n_max() == n_max).then_some(t);
        }
        let prefix = format!("{}_n", key(pattern));
        let mut best: Option<usize> = None;
        for entry in fs::read_dir(&self.dir).ok()?.flatten() {
            let name = entry.file_name();
            let Some(rest) = name.to_str().and_then(|s| s.strip_prefix(&prefix)) else {
                continue;
            };
            let Some(n) = rest.strip_suffix(".txt").and_then(|s| s.parse::<usize>().ok()) else {
                continue;
            };
            if n > n_max && best.is_none_or(|b| n < b) {
                best = Some(n);
            }
        }
        let table = read_entry(&self.path(pattern, best?), pattern)?;
        table.prefix(n_max)
    }

    pub fn store(&self, table: &CountTable) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let target = self.path(table.sigma(), table.n_max());
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(render(table).as_bytes())?;
        tmp.flush()?;
        tmp.persist(&target).map_err(|e| e.error)?;
        Ok(target)
    }
}

pub fn render(table: &CountTable) -> String {
    let entries: Vec<String> = table.sigma().entries().iter().map(|v| v.to_string()).collect();
    let mut out = format!("{HEADER}\npattern {}\nn_max {}\n", entries.join(","), table.n_max());
    for c in table.counts() {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Option<CountTable> {
    let mut lines = text.lines();
    if lines.next()? != HEADER {
        return None;
    }
    let pattern: Pattern = lines.next()?.strip_prefix("pattern ")?.parse().ok()?;
    let n_max: usize = lines.next()?.strip_prefix("n_max ")?.parse().ok()?;
    let counts = lines.map(|l| l.parse::<BigUint>().ok()).collect::<Option<Vec<_>>>()?;
    if counts.len() != n_max + 1 {
        return None;
    }
    CountTable::from_counts(pattern, counts).ok()
}

fn read_entry(path: &Path, pattern: &Pattern) -> Option<CountTable> {
    let table = parse(&fs::read_to_string(path).ok()?)?;
    (table.sigma() == pattern).then_some(table)
}
