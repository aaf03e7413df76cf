//! The log canonical threshold of a curve through the term ideals of its
//! adapted coordinate systems.

use serde::Serialize;

use crate::enriques::EnriquesDiagram;
use crate::error::{Error, Result};
use crate::monomial_diagram::diagram_to_staircase;
use crate::newton::Staircase;
use crate::rational::Rational;

/// Drops every free vertex with a satellite on its root path, and everything
/// below it.
pub fn nondegenerate_part(d: &EnriquesDiagram) -> Result<EnriquesDiagram> {
    let t = &d.tree;
    let mut keep = vec![true; d.len()];
    for i in 1..d.len() {
        let p = t.parent(i).unwrap();
        keep[i] = keep[p] && !(t.is_free(i) && !core_free(d, p));
    }
    Ok(d.restrict(&keep)?.0)
}

/// Free with an all-free root path.
fn core_free(d: &EnriquesDiagram, mut i: usize) -> bool {
    loop {
        if !d.tree.is_free(i) {
            return false;
        }
        match d.tree.parent(i) {
            Some(p) => i = p,
            None => return true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdaptedCandidate {
    /// 1-based index of the end of the free chain.
    pub rho: usize,
    /// 1-based vertices of `D` making up the subdiagram.
    pub vertices: Vec<usize>,
    #[serde(skip)]
    pub subdiagram: EnriquesDiagram,
    pub staircase: Staircase,
    #[serde(with = "crate::rational::serde_fraction")]
    pub lct: Rational,
}

/// One candidate per end `P_ρ` of a maximal chain of free points starting at
/// the root: the path to `P_ρ` together with every satellite reached from it
/// through satellites.
pub fn adapted_candidates(d: &EnriquesDiagram) -> Result<Vec<AdaptedCandidate>> {
    let t = &d.tree;
    let core: Vec<bool> = (0..d.len()).map(|i| core_free(d, i)).collect();
    let ends: Vec<usize> =
        (0..d.len()).filter(|&i| core[i] && !t.children(i).any(|c| core[c])).collect();
    let mut out = Vec::with_capacity(ends.len());
    for rho in ends {
        let mut keep = vec![false; d.len()];
        for i in 0..d.len() {
            keep[i] = if core[i] {
                t.is_ancestor(i, rho)
            } else {
                !t.is_free(i) && keep[t.parent(i).unwrap()]
            };
        }
        let (sub, kept) = d.restrict(&keep)?;
        let staircase = diagram_to_staircase(&sub)?;
        let lct = staircase.ideal().lct()?;
        out.push(AdaptedCandidate {
            rho: rho + 1,
            vertices: kept.iter().map(|&i| i + 1).collect(),
            subdiagram: sub,
            staircase,
            lct,
        });
    }
    Ok(out)
}

pub fn lct_via_term_ideals(d: &EnriquesDiagram) -> Result<Rational> {
    adapted_candidates(d)?
        .into_iter()
        .map(|c| c.lct)
        .min()
        .ok_or_else(|| Error::InvalidTree("no candidate".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathCheck {
    /// 1-based witness vertex and leaf of the path through it.
    pub witness: usize,
    pub leaf: usize,
    #[serde(with = "crate::rational::serde_fraction")]
    pub lct_path: Rational,
    /// Weights of the non-degenerate part of the path diagram.
    pub nondegenerate_weights: Vec<i64>,
    #[serde(with = "crate::rational::serde_fraction")]
    pub lct_nondegenerate: Rational,
    /// Some candidate containing the end of the non-degenerate part attains the minimum.
    pub candidate_attains: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    #[serde(with = "crate::rational::serde_fraction")]
    pub lct_direct: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub lct_term: Rational,
    pub equal: bool,
    /// 1-based vertices attaining the cluster minimum.
    pub witness_vertices: Vec<usize>,
    /// `ρ` of a candidate attaining the term-ideal minimum.
    pub witness_candidate: usize,
    pub candidates: Vec<AdaptedCandidate>,
    pub paths: Vec<PathCheck>,
    /// Ends of free chains behind satellites; no adapted system reaches them.
    pub excluded_free_ends: Vec<usize>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.equal && self.paths.iter().all(|p| p.agree)
    }
}

/// Compares the cluster formula with the term-ideal minimum and checks the
/// root-to-leaf paths through every witness vertex.
pub fn check_main_theorem(d: &EnriquesDiagram) -> Result<TheoremReport> {
    let report = theorem_report(d)?;
    if !report.holds() {
        let detail = serde_json::to_string(&report).unwrap_or_default();
        return Err(Error::TheoremViolation(detail));
    }
    Ok(report)
}

pub fn theorem_report(d: &EnriquesDiagram) -> Result<TheoremReport> {
    let direct = d.to_weighted_cluster().lct()?;
    let candidates = adapted_candidates(d)?;
    let best = candidates.iter().min_by(|a, b| a.lct.cmp(&b.lct)).expect("the root is a candidate");
    let lct_term = best.lct.clone();
    let t = &d.tree;
    let mut paths = Vec::new();
    for &w in &direct.argmin {
        for leaf in (w..d.len()).filter(|&l| t.outdegree(l) == 0 && t.is_ancestor(w, l)) {
            let keep: Vec<bool> = (0..d.len()).map(|i| t.is_ancestor(i, leaf)).collect();
            let (path, _) = d.restrict(&keep)?;
            let lct_path = path.to_weighted_cluster().lct()?.value;
            let nd = nondegenerate_part(&path)?;
            let lct_nd = nd.to_weighted_cluster().lct()?.value;
            // the last free point of the non-degenerate part, as a vertex of D
            let nd_len = nd.len();
            let path_vertices: Vec<usize> = (0..d.len()).filter(|&i| keep[i]).collect();
            let end = (0..nd_len).rev().find(|&i| nd.tree.is_free(i)).map(|i| path_vertices[i]).unwrap_or(0);
            let candidate_attains =
                candidates.iter().any(|c| c.lct == direct.value && t.is_ancestor(end, c.rho - 1));
            let agree = lct_path == direct.value && lct_nd == direct.value && candidate_attains;
            paths.push(PathCheck {
                witness: w + 1,
                leaf: leaf + 1,
                lct_path,
                nondegenerate_weights: nd.weights.clone(),
                lct_nondegenerate: lct_nd,
                candidate_attains,
                agree,
            });
        }
    }
    let core: Vec<bool> = (0..d.len()).map(|i| core_free(d, i)).collect();
    let excluded_free_ends = (0..d.len())
        .filter(|&i| t.is_free(i) && !core[i] && !t.children(i).any(|c| t.is_free(c)))
        .map(|i| i + 1)
        .collect();
    Ok(TheoremReport {
        equal: direct.value == lct_term,
        lct_direct: direct.value,
        lct_term,
        witness_vertices: direct.argmin.iter().map(|a| a + 1).collect(),
        witness_candidate: best.rho,
        candidates,
        paths,
        excluded_free_ends,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enriques::tests::example_24;
    use crate::enriques::EnriquesTree;
    use crate::newton::MonomialIdeal;
    use crate::poly::parse;
    use crate::rational::{int, rat};
    use crate::resolution::resolve_curve;

    #[test]
    fn nondegenerate_part_examples() {
        assert_eq!(nondegenerate_part(&example_24()).unwrap().weights, vec![4, 2, 2]);
        let t = EnriquesDiagram::t_pq(5, 7).unwrap();
        assert_eq!(nondegenerate_part(&t).unwrap(), t);
        let single = EnriquesDiagram::new(EnriquesTree::single(), vec![3]).unwrap();
        assert_eq!(nondegenerate_part(&single).unwrap(), single);
    }

    #[test]
    fn candidate_examples() {
        let c = adapted_candidates(&example_24()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].rho, 2);
        assert_eq!(c[0].subdiagram.weights, vec![4, 2, 2]);
        assert_eq!(c[0].lct, rat(5, 12));
        let t = EnriquesDiagram::t_pq(5, 7).unwrap();
        let c = adapted_candidates(&t).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].subdiagram, t);
        assert_eq!(c[0].lct, rat(12, 35));
        let node = EnriquesDiagram::new(EnriquesTree::single(), vec![2]).unwrap();
        let c = adapted_candidates(&node).unwrap();
        assert_eq!(c[0].rho, 1);
        assert_eq!(c[0].staircase, Staircase::of(MonomialIdeal::maximal_power(2)));
        assert_eq!(c[0].lct, int(1));
    }

    #[test]
    fn term_lct_examples() {
        assert_eq!(lct_via_term_ideals(&example_24()).unwrap(), rat(5, 12));
        assert_eq!(lct_via_term_ideals(&EnriquesDiagram::t_pq(5, 7).unwrap()).unwrap(), rat(12, 35));
        let single = EnriquesDiagram::new(EnriquesTree::single(), vec![7]).unwrap();
        assert_eq!(lct_via_term_ideals(&single).unwrap(), rat(2, 7));
    }

    #[test]
    fn theorem_examples() {
        let r = check_main_theorem(&example_24()).unwrap();
        assert!(r.equal);
        assert_eq!(r.lct_direct, rat(5, 12));
        assert_eq!(r.witness_vertices, vec![3]);
        assert_eq!(r.paths[0].nondegenerate_weights, vec![4, 2, 2]);
        assert_eq!(r.excluded_free_ends, vec![4]);
        let d = resolve_curve(&parse("x^5 - y^7").unwrap()).unwrap().diagram.unwrap();
        let r = check_main_theorem(&d).unwrap();
        assert_eq!((r.lct_direct.clone(), r.equal), (rat(12, 35), true));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["lct_direct"], "12/35");
    }

    #[test]
    fn several_free_chains() {
        // three smooth branches with distinct tangents and one tangent pair
        for src in ["x*y*(x - y)", "(y - x^2)*(y + x^2)*x", "(y^2 - x^3)*(x^2 - y^3)", "y*(y - x^3)*(y + x^3)"] {
            let d = resolve_curve(&parse(src).unwrap()).unwrap().diagram.unwrap();
            let r = check_main_theorem(&d).unwrap();
            for c in &r.candidates {
                assert!(c.lct >= r.lct_direct, "{src}");
                assert_eq!(c.lct, c.subdiagram.to_weighted_cluster().lct().unwrap().value, "{src}");
            }
        }
    }
}
