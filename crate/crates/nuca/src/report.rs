//! JSON renderings of analysis results.

use nuca_core::analysis::{KernelWitness, OrphanWitness, PreInjWitness};
use nuca_core::{Domain, FiniteSupport, RuleId};
use serde_json::{json, Value};

/// Rule names joined into one word: without separators when every name is a
/// single character, with spaces otherwise.
pub fn word(names: &[String], ids: &[RuleId]) -> String {
    let parts: Vec<&str> = ids.iter().map(|&i| names[i as usize].as_str()).collect();
    if parts.iter().all(|p| p.chars().count() == 1) {
        parts.concat()
    } else {
        parts.join(" ")
    }
}

pub fn interval(d: &Domain) -> Value {
    json!([d.lo(), d.hi()])
}

pub fn finite_support(c: &FiniteSupport) -> Value {
    let cells: Vec<Value> = c.cells().map(|(p, v)| json!([p.x, v])).collect();
    json!({ "background": c.background(), "cells": cells })
}

pub fn orphan(w: &OrphanWitness, verified: bool) -> Value {
    json!({
        "domain": interval(&w.domain),
        "pattern": w.pattern.states(),
        "mode": w.mode.name(),
        "verified": verified,
    })
}

pub fn kernel(w: &KernelWitness, verified: bool) -> Value {
    json!({
        "window": interval(&w.window),
        "element": finite_support(&w.element),
        "verified": verified,
    })
}

pub fn collision(w: &PreInjWitness, verified: bool) -> Value {
    json!({
        "background": w.background,
        "window": interval(&w.window),
        "c1": finite_support(&w.c1),
        "c2": finite_support(&w.c2),
        "mode": w.mode.name(),
        "verified": verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words() {
        let names: Vec<String> = ["A", "B"].map(String::from).to_vec();
        assert_eq!(word(&names, &[1, 0, 1]), "BAB");
        let long: Vec<String> = ["gamma", "delta"].map(String::from).to_vec();
        assert_eq!(word(&long, &[0, 1]), "gamma delta");
    }

    #[test]
    fn supports() {
        let c = FiniteSupport::line(0, [(3, 1), (-1, 1)]);
        assert_eq!(finite_support(&c).to_string(), r#"{"background":0,"cells":[[-1,1],[3,1]]}"#);
    }
}
