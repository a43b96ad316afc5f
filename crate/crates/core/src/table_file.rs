//! The `subsetweights 1` text format for weight tables.
//!
//! ```text
//! subsetweights 1
//! n 4
//! entries 3
//! .\t4.38
//! 0\t4.44
//! 1\t4.25
//! ```
//!
//! Each entry line is a subset (comma-separated ascending indices, or `.`)
//! and a natural-log weight separated by a tab. Writers emit entries in
//! lexicographic order.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::collection::WeightedCollection;
use crate::error::{Error, Result};
use crate::subset::{Subset, MAX_GROUND};

const MAGIC: &str = "subsetweights 1";

pub fn load(path: impl AsRef<Path>) -> Result<WeightedCollection> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, path)
}

/// Parses a weight table; `origin` only labels error messages.
pub fn parse(text: &str, origin: &Path) -> Result<WeightedCollection> {
    let err = |line: usize, msg: String| Error::Parse { path: origin.to_path_buf(), line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));

    let mut header = |want: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((no, l)) => Ok((no, l.to_string())),
            None => Err(err(0, format!("unexpected end of file, expected `{want}`"))),
        }
    };
    let (no, magic) = header(MAGIC)?;
    if magic.trim() != MAGIC {
        return Err(err(no, format!("expected `{MAGIC}`")));
    }
    let (no, l) = header("n <int>")?;
    let n = keyed_int(&l, "n").ok_or_else(|| err(no, "expected `n <int>`".into()))?;
    if n > MAX_GROUND {
        return Err(err(no, format!("n = {n} exceeds {MAX_GROUND}")));
    }
    let (no, l) = header("entries <m>")?;
    let m = keyed_int(&l, "entries").ok_or_else(|| err(no, "expected `entries <m>`".into()))?;

    let mut entries = Vec::with_capacity(m);
    for (no, l) in lines.by_ref() {
        if entries.len() == m {
            if l.trim().is_empty() {
                continue;
            }
            return Err(err(no, format!("more than the declared {m} entries")));
        }
        let (set_txt, w_txt) = l
            .split_once('\t')
            .ok_or_else(|| err(no, "expected `<subset>\\t<log_weight>`".into()))?;
        let s: Subset = set_txt.parse().map_err(|e| err(no, format!("{e}")))?;
        if !s.fits(n) {
            return Err(err(no, format!("subset {s} has an element >= n = {n}")));
        }
        let lw: f64 = w_txt
            .trim()
            .parse()
            .map_err(|_| err(no, format!("bad log-weight {w_txt:?}")))?;
        if !lw.is_finite() {
            return Err(err(no, format!("log-weight {w_txt:?} is not finite")));
        }
        entries.push((s, lw));
    }
    if entries.len() != m {
        return Err(err(0, format!("declared {m} entries, found {}", entries.len())));
    }
    WeightedCollection::new(n, entries).map_err(|e| err(0, e.to_string()))
}

fn keyed_int(line: &str, key: &str) -> Option<usize> {
    let mut it = line.split_whitespace();
    if it.next()? != key {
        return None;
    }
    let v = it.next()?.parse().ok()?;
    it.next().is_none().then_some(v)
}

/// Renders a collection in the text format.
pub fn to_string(c: &WeightedCollection) -> String {
    let mut out = String::with_capacity(32 + c.m() * 24);
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "n {}", c.n());
    let _ = writeln!(out, "entries {}", c.m());
    for (s, lw) in c.iter() {
        // `{}` prints the shortest decimal that round-trips.
        let _ = writeln!(out, "{s}\t{lw}");
    }
    out
}

pub fn save(c: &WeightedCollection, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(to_string(c).as_bytes()).map_err(|e| Error::io(path, e))
}
