//! Small hand-built instances used by tests and examples.

use crate::collection::WeightedCollection;
use crate::subset::Subset;

/// Element names of the worked example: `A = 0`, `B = 1`, `C = 2`, `D = 3`.
pub const WORKED_NAMES: [char; 4] = ['A', 'B', 'C', 'D'];

/// Linear weights of the eleven sets of the worked example over `{A,B,C,D}`.
pub const WORKED_WEIGHTS: [(&[usize], f64); 11] = [
    (&[0, 1], 99.0),
    (&[0, 3], 90.0),
    (&[0], 85.0),
    (&[], 80.0),
    (&[1], 70.0),
    (&[0, 2], 60.0),
    (&[3], 50.0),
    (&[1, 3], 14.0),
    (&[2], 13.0),
    (&[2, 3], 12.0),
    (&[1, 2], 11.0),
];

/// The worked example: all subsets of `{A,B,C,D}` with at most two elements.
pub fn worked_example() -> WeightedCollection {
    let entries = WORKED_WEIGHTS
        .iter()
        .map(|&(xs, w)| (subset(xs), w.ln()))
        .collect();
    WeightedCollection::new(4, entries).expect("worked example is downward closed")
}

/// Parses a set written with the worked example's letters, e.g. `"BCD"`.
/// The empty string and `"∅"` denote the empty set.
pub fn lettered(name: &str) -> Subset {
    let mut s = Subset::EMPTY;
    for ch in name.chars().filter(|c| *c != '∅') {
        let x = WORKED_NAMES
            .iter()
            .position(|&c| c == ch)
            .unwrap_or_else(|| panic!("unknown element {ch}"));
        s = s.with(x);
    }
    s
}

/// Formats a set with the worked example's letters; the empty set is `∅`.
pub fn letters(s: Subset) -> String {
    if s.is_empty() {
        return "∅".into();
    }
    s.iter().map(|x| WORKED_NAMES[x]).collect()
}

fn subset(xs: &[usize]) -> Subset {
    Subset::from_elements(xs.iter().copied()).expect("indices below 64")
}
