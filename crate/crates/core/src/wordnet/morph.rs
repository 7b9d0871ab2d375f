//! Regular inflection rules (the detachment table of WordNet's morphy).
//! Exception lists are not consulted.

use super::Pos;

const NOUN_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ses", "s"),
    ("ves", "f"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
];

const VERB_RULES: &[(&str, &str)] = &[
    ("s", ""),
    ("ies", "y"),
    ("es", "e"),
    ("es", ""),
    ("ed", "e"),
    ("ed", ""),
    ("ing", "e"),
    ("ing", ""),
];

const ADJ_RULES: &[(&str, &str)] = &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")];

/// Candidate base forms of `form` for one section, in rule order.
pub(crate) fn base_forms(form: &str, pos: Pos) -> Vec<String> {
    let rules = match pos.section() {
        Pos::Noun => NOUN_RULES,
        Pos::Verb => VERB_RULES,
        Pos::Adverb => &[],
        _ => ADJ_RULES,
    };
    let mut out: Vec<String> = Vec::new();
    for (suffix, replacement) in rules {
        if let Some(stem) = form.strip_suffix(suffix) {
            let candidate = format!("{stem}{replacement}");
            if !candidate.is_empty() && !out.contains(&candidate) {
                out.push(candidate);
            }
        }
    }
    out
}
