//! The built-in curve corpus and the harness running the main theorem over it.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::check_main_theorem;
use crate::error::{Error, Result};
use crate::poly::{parse, BivariatePolynomial};
use crate::rational::Rational;
use crate::resolution::{resolve_curve, Resolution};

#[derive(Debug, Clone)]
pub struct CorpusCurve {
    pub family: &'static str,
    pub source: String,
    pub poly: BivariatePolynomial,
}

const PRODUCTS: &[&str] = &[
    "x*y",
    "x*y*(x - y)",
    "x*y*(x - y)*(x + y)",
    "(y^2 - x^3)*(x^2 - y^3)",
    "y*(y - x^2)",
    "(y - x^2)*(y + x^2)",
    "x*(y^2 - x^3)",
    "y*(y^2 - x^3)",
    "(y^2 - x^3)*(y^2 + x^3)",
    "(y^2 - x^3)*(y^2 - 2*x^3)",
    "y*(y - x^3)*(y + x^3)",
    "(x^2 - y^3)*(x^3 - y^5)",
];

const MAX_CLUSTER: usize = 64;

/// Cusps first, then the worked curve, products and the perturbed powers.
/// Perturbations are kept only when the curve is reduced with rational
/// tangents along the whole resolution.
pub fn corpus() -> Vec<CorpusCurve> {
    let mut out = Vec::new();
    let mut push = |family, source: String| {
        let poly = parse(&source).expect("corpus source parses");
        out.push(CorpusCurve { family, source, poly });
    };
    for q in 3..=12i64 {
        for p in 2..q {
            if p.gcd(&q) == 1 {
                push("cusp", format!("x^{p} - y^{q}"));
            }
        }
    }
    push("worked", "(x^3 - y^2)^2 - x^5*y".to_string());
    for s in PRODUCTS {
        push("product", s.to_string());
    }
    for (a, b) in [(2i64, 3i64), (3, 2), (3, 4), (4, 3), (2, 5)] {
        for c in 2..=3i64 {
            let deg = a * b * c;
            for i in 0..=deg {
                for j in 0..=deg {
                    let d = i * b + j * a;
                    if d <= deg || d > deg + a.max(b) {
                        continue;
                    }
                    for sign in ['-', '+'] {
                        let source = format!("(x^{a} - y^{b})^{c} {sign} {}", monomial(i, j));
                        let poly = parse(&source).expect("corpus source parses");
                        if resolve_curve(&poly).is_ok_and(|r| r.cluster.cluster.len() <= MAX_CLUSTER) {
                            out.push(CorpusCurve { family: "perturbed", source, poly });
                        }
                    }
                }
            }
        }
    }
    out
}

fn monomial(i: i64, j: i64) -> String {
    match (i, j) {
        (0, _) => format!("y^{j}"),
        (_, 0) => format!("x^{i}"),
        _ => format!("x^{i}*y^{j}"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusEntry {
    pub family: &'static str,
    pub curve: String,
    pub points: usize,
    #[serde(with = "crate::rational::serde_fraction_opt")]
    pub lct_direct: Option<Rational>,
    #[serde(with = "crate::rational::serde_fraction_opt")]
    pub lct_term: Option<Rational>,
    pub passed: bool,
    pub error: Option<String>,
}

pub fn check_curve(c: &CorpusCurve) -> CorpusEntry {
    let mut entry = CorpusEntry {
        family: c.family,
        curve: c.source.clone(),
        points: 0,
        lct_direct: None,
        lct_term: None,
        passed: false,
        error: None,
    };
    let outcome = resolve_curve(&c.poly).and_then(|r: Resolution| {
        entry.points = r.cluster.cluster.len();
        let d = r.diagram.ok_or_else(|| Error::Precondition("smooth germ".into()))?;
        check_main_theorem(&d)
    });
    match outcome {
        Ok(report) => {
            entry.lct_direct = Some(report.lct_direct);
            entry.lct_term = Some(report.lct_term);
            entry.passed = true;
        }
        Err(e) => entry.error = Some(e.to_string()),
    }
    entry
}

pub fn run_corpus(curves: &[CorpusCurve]) -> Vec<CorpusEntry> {
    curves.par_iter().map(check_curve).collect()
}

/// Resolves every corpus curve, in corpus order.
pub fn resolved_corpus() -> Result<Vec<(CorpusCurve, Resolution)>> {
    corpus()
        .into_par_iter()
        .map(|c| resolve_curve(&c.poly).map(|r| (c, r)))
        .collect()
}
