//! Reported ONMI / Recall percentages for the three input variants, used by
//! `repro` as an informational comparison.

pub struct Reference {
    pub dataset: &'static str,
    pub input: &'static str,
    pub onmi: f64,
    pub recall: f64,
}

const fn r(dataset: &'static str, input: &'static str, onmi: f64, recall: f64) -> Reference {
    Reference { dataset, input, onmi, recall }
}

pub const REFERENCES: &[Reference] = &[
    r("facebook-686", "x", 20.3, 31.1),
    r("facebook-686", "g", 20.8, 29.5),
    r("facebook-686", "u", 19.5, 26.2),
    r("facebook-348", "x", 32.6, 48.5),
    r("facebook-348", "g", 35.8, 52.6),
    r("facebook-348", "u", 31.3, 51.3),
    r("facebook-1684", "x", 27.2, 47.2),
    r("facebook-1684", "g", 44.1, 59.1),
    r("facebook-1684", "u", 35.9, 55.9),
    r("engineering", "x", 42.1, 56.4),
    r("engineering", "g", 21.9, 49.2),
    r("engineering", "u", 26.6, 48.4),
    r("computer-science", "x", 53.8, 60.8),
    r("computer-science", "g", 39.1, 54.7),
    r("computer-science", "u", 38.5, 56.1),
    r("chemistry", "x", 47.1, 59.1),
    r("chemistry", "g", 27.1, 52.6),
    r("chemistry", "u", 34.5, 56.4),
];

pub fn lookup(dataset: &str, input: &str) -> Option<&'static Reference> {
    REFERENCES
        .iter()
        .find(|r| r.dataset.eq_ignore_ascii_case(dataset) && r.input == input)
}
