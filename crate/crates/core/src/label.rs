//! Node label ordering and the counterfactual label grammar.
//!
//! Labels are opaque strings. Ordering is by leading integer (labels without
//! one sort last), then by the full string. Intervened copies are written
//! `base^do(c1,c2)` with the treatment labels sorted in that order.

use std::cmp::Ordering;

fn numeric_prefix(s: &str) -> Option<u64> {
    let digits: &str = &s[..s.bytes().take_while(|b| b.is_ascii_digit()).count()];
    if digits.is_empty() {
        None
    } else {
        digits.parse().ok()
    }
}

/// Total order on labels: (numeric prefix, full label).
pub fn label_cmp(a: &str, b: &str) -> Ordering {
    match (numeric_prefix(a), numeric_prefix(b)) {
        (Some(x), Some(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(b),
    }
}

pub fn sort_labels(labels: &mut [String]) {
    labels.sort_by(|a, b| label_cmp(a, b));
}

/// A parsed node label: a base label plus an optional world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum World {
    Observational,
    /// Intervened on the listed treatment labels (sorted).
    Do(Vec<String>),
    /// Internal parallel-world index used while building multi-world graphs.
    Indexed(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeLabel {
    pub base: String,
    pub world: World,
}

impl NodeLabel {
    pub fn observational(base: &str) -> Self {
        NodeLabel { base: base.to_string(), world: World::Observational }
    }

    pub fn intervened<S: AsRef<str>>(base: &str, treatment: &[S]) -> Self {
        let mut t: Vec<String> = treatment.iter().map(|s| s.as_ref().to_string()).collect();
        sort_labels(&mut t);
        t.dedup();
        if t.is_empty() {
            return Self::observational(base);
        }
        NodeLabel { base: base.to_string(), world: World::Do(t) }
    }

    pub fn parse(s: &str) -> Self {
        if let Some(pos) = s.find("^do(") {
            if s.ends_with(')') {
                let inner = &s[pos + 4..s.len() - 1];
                let items: Vec<&str> = inner.split(',').filter(|x| !x.is_empty()).collect();
                return Self::intervened(&s[..pos], &items);
            }
        }
        if let Some(pos) = s.find("^[") {
            if s.ends_with(']') {
                if let Ok(k) = s[pos + 2..s.len() - 1].parse::<usize>() {
                    return NodeLabel { base: s[..pos].to_string(), world: World::Indexed(k) };
                }
            }
        }
        Self::observational(s)
    }

    pub fn is_observational(&self) -> bool {
        self.world == World::Observational
    }
}

impl std::fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.world {
            World::Observational => write!(f, "{}", self.base),
            World::Do(t) => write!(f, "{}^do({})", self.base, t.join(",")),
            World::Indexed(k) => write!(f, "{}^[{}]", self.base, k),
        }
    }
}

/// `base^do(treatment)`, or `base` itself for an empty treatment.
pub fn do_label<S: AsRef<str>>(base: &str, treatment: &[S]) -> String {
    NodeLabel::intervened(base, treatment).to_string()
}
