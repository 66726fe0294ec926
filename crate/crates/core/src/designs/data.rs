//! Designs shipped with the crate.

use ndarray::Array2;

use super::conference::{validate_conference, ConferenceDesign};
use super::csv::parse_design;

/// Seven-factor, 34-run concatenated design (two center runs) used in a
/// pesticide-extraction robustness study.
pub const TABLE2_CSV: &str = include_str!("../../data/table2.csv");

/// Paley conference matrices, keyed by order.
pub const PALEY_CSV: [(usize, &str); 7] = [
    (6, include_str!("../../data/paley_6.csv")),
    (8, include_str!("../../data/paley_8.csv")),
    (12, include_str!("../../data/paley_12.csv")),
    (14, include_str!("../../data/paley_14.csv")),
    (18, include_str!("../../data/paley_18.csv")),
    (20, include_str!("../../data/paley_20.csv")),
    (24, include_str!("../../data/paley_24.csv")),
];

pub fn table2() -> Array2<i8> {
    parse_design(TABLE2_CSV).expect("bundled design parses")
}

pub fn bundled_conference(order: usize) -> Option<ConferenceDesign> {
    let (_, text) = PALEY_CSV.iter().find(|(n, _)| *n == order)?;
    Some(validate_conference(parse_design(text).ok()?).expect("bundled design is valid"))
}
