use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ast::RewardProgram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reweight {
    pub name: String,
    pub old: f64,
    pub new: f64,
}

/// Term-level edit between two programs, keyed by term name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EditSummary {
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub reweighted: Vec<Reweight>,
    pub bodies_changed: Vec<String>,
}

impl EditSummary {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty()
            && self.removed.is_empty()
            && self.reweighted.is_empty()
            && self.bodies_changed.is_empty()
    }

    pub fn counts(&self) -> (usize, usize, usize, usize) {
        (
            self.added.len(),
            self.removed.len(),
            self.reweighted.len(),
            self.bodies_changed.len(),
        )
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let (a, r, w, b) = self.counts();
        let _ = writeln!(out, "added: {a}\nremoved: {r}\nreweighted: {w}\nbodies_changed: {b}");
        for n in &self.added {
            let _ = writeln!(out, "+ {n}");
        }
        for n in &self.removed {
            let _ = writeln!(out, "- {n}");
        }
        for rw in &self.reweighted {
            let _ = writeln!(out, "~ {} weight {} -> {} (delta {})", rw.name, rw.old, rw.new, rw.new - rw.old);
        }
        for n in &self.bodies_changed {
            let _ = writeln!(out, "* {n} body changed");
        }
        out
    }
}

pub fn structural_diff(old: &RewardProgram, new: &RewardProgram) -> EditSummary {
    let find = |p: &RewardProgram, name: &str| p.terms.iter().find(|t| t.name == name).cloned();
    let mut summary = EditSummary::default();
    for t in &new.terms {
        match find(old, &t.name) {
            None => summary.added.push(t.name.clone()),
            Some(prev) => {
                if prev.weight != t.weight {
                    summary.reweighted.push(Reweight {
                        name: t.name.clone(),
                        old: prev.weight,
                        new: t.weight,
                    });
                }
                if prev.body != t.body {
                    summary.bodies_changed.push(t.name.clone());
                }
            }
        }
    }
    for t in &old.terms {
        if find(new, &t.name).is_none() {
            summary.removed.push(t.name.clone());
        }
    }
    summary
}
