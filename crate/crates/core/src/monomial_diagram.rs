//! Binary Enriques diagrams and integrally closed monomial ideals.
//!
//! Blowing up the origin, the only infinitely near points of a monomial
//! ideal are the origins of the two charts: chart `A` (`x = x'y'`, `y = y'`,
//! the direction of the `y`-axis) and chart `B` (`x = x'`, `y = x'y'`).
//! Diagrams built here use a fixed drawing convention: free points get slant
//! edges, satellites reached through chart `B` get horizontal edges and
//! satellites reached through chart `A` get vertical ones. The root's chart-`A`
//! subtree therefore carries the facets of slope `<= -1` and its chart-`B`
//! subtree the facets of slope `> -1`.

use crate::enriques::{EdgeKind, EnriquesDiagram, EnriquesTree, Node};
use crate::error::{Error, Result};
use crate::newton::{triangle_or_empty, Direction, LatticePoint, MonomialIdeal, Staircase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chart {
    A,
    B,
}

impl Chart {
    /// Exponent of the total transform of `a^i b^j` in the chart coordinates.
    pub fn pull(self, (i, j): (u64, u64)) -> (u64, u64) {
        match self {
            Chart::A => (i, i + j),
            Chart::B => (i + j, j),
        }
    }
}

/// Weak transform at the chart origin: pull back and divide by `E^c`.
fn transform(ideal: &MonomialIdeal, c: u64, chart: Chart) -> MonomialIdeal {
    let gens = ideal.generators().iter().map(|g| {
        let (i, j) = chart.pull((g.m, g.n));
        match chart {
            Chart::A => LatticePoint::new(i, j - c),
            Chart::B => LatticePoint::new(i - c, j),
        }
    });
    MonomialIdeal::new(gens).expect("a nonempty generator set")
}

fn order(ideal: &MonomialIdeal) -> u64 {
    ideal.generators().iter().map(|g| g.m + g.n).min().expect("nonempty")
}

/// Diagram of the integral closure of the staircase's ideal.
pub fn staircase_to_diagram(s: &Staircase) -> Result<EnriquesDiagram> {
    if s.is_empty() {
        return Err(Error::EmptyIdeal);
    }
    if !s.is_finite() {
        return Err(Error::InfiniteStaircase(s.ideal().to_string()));
    }
    let closed = s.ideal().integral_closure();
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    // (ideal, parent, edge, exceptional along {a=0}, exceptional along {b=0})
    let mut stack = vec![(closed, None, None, false, false)];
    while let Some((ideal, parent, edge, la, lb)) = stack.pop() {
        let c = order(&ideal);
        let me = nodes.len();
        nodes.push(Node { parent, edge });
        weights.push(c as i64);
        let mut pending = Vec::new();
        for chart in [Chart::A, Chart::B] {
            let next = transform(&ideal, c, chart);
            if next.is_unit() {
                continue;
            }
            let (la2, lb2) = match chart {
                Chart::A => (la, true),
                Chart::B => (true, lb),
            };
            let kind = match (la2 && lb2, chart) {
                (false, _) => EdgeKind::Slant,
                (true, Chart::A) => EdgeKind::Vertical,
                (true, Chart::B) => EdgeKind::Horizontal,
            };
            pending.push((next, Some(me), Some(kind), la2, lb2));
        }
        // preorder with the chart-A child first
        stack.extend(pending.into_iter().rev());
    }
    EnriquesDiagram::new(EnriquesTree::new(nodes)?, weights)
}

/// The chart of every vertex (the root gets `None`) after reading the
/// diagram in the convention of [`staircase_to_diagram`].
pub fn charts(d: &EnriquesDiagram) -> Result<Vec<Option<Chart>>> {
    let t = canonical_tree(&d.tree)?;
    decode(&t.0, &t.1)
}

/// Sides of the root's children and the tree rewritten so that every
/// free-to-satellite edge follows the convention of its side.
fn canonical_tree(t: &EnriquesTree) -> Result<(EnriquesTree, Vec<Chart>)> {
    let class = t.classify();
    if !class.binary {
        let why = class.witnesses.first().map(|w| format!("vertex {}: {}", w.vertex, w.reason));
        return Err(Error::Precondition(format!("diagram is not binary ({})", why.unwrap_or_default())));
    }
    let roots: Vec<usize> = t.children(0).collect();
    let first_satellite_kind = |r: usize| {
        (r..t.len()).find(|&j| t.is_ancestor(r, j) && !t.is_free(j)).and_then(|j| t.edge(j))
    };
    let k0: Vec<Option<EdgeKind>> = roots.iter().map(|&r| first_satellite_kind(r)).collect();
    let sides: Vec<Chart> = match k0.as_slice() {
        [] => vec![],
        [Some(EdgeKind::Vertical)] => vec![Chart::B],
        [_] => vec![Chart::A],
        [a, b] if a != b && a.is_some() && b.is_some() => {
            if *a == Some(EdgeKind::Horizontal) {
                vec![Chart::A, Chart::B]
            } else {
                vec![Chart::B, Chart::A]
            }
        }
        [Some(EdgeKind::Vertical), None] => vec![Chart::B, Chart::A],
        [None, Some(EdgeKind::Horizontal)] => vec![Chart::B, Chart::A],
        [_, _] => vec![Chart::A, Chart::B],
        _ => unreachable!("binary trees have root degree at most 2"),
    };
    let mut tree = t.clone();
    for (&r, &side) in roots.iter().zip(&sides) {
        let want = match side {
            Chart::A => EdgeKind::Horizontal,
            Chart::B => EdgeKind::Vertical,
        };
        for j in r..tree.len() {
            if tree.is_ancestor(r, j) && !tree.is_free(j) && tree.is_free(tree.parent(j).unwrap()) && tree.edge(j) != Some(want) {
                tree = tree.mirror_subtree(j)?;
            }
        }
    }
    Ok((tree, sides))
}

fn decode(t: &EnriquesTree, sides: &[Chart]) -> Result<Vec<Option<Chart>>> {
    let mut chart = vec![None; t.len()];
    let mut labels = vec![(false, false); t.len()];
    for (k, r) in t.children(0).enumerate() {
        chart[r] = Some(sides[k]);
    }
    for j in 1..t.len() {
        let u = t.parent(j).unwrap();
        let (la, lb) = labels[u];
        let c = match (u, t.edge(j).unwrap()) {
            (0, _) => chart[j].unwrap(),
            (_, EdgeKind::Horizontal) => Chart::B,
            (_, EdgeKind::Vertical) => Chart::A,
            (_, EdgeKind::Slant) if !la => Chart::A,
            (_, EdgeKind::Slant) if !lb => Chart::B,
            _ => return Err(Error::Precondition(format!("vertex {}: slant edge out of a satellite", j + 1))),
        };
        chart[j] = Some(c);
        labels[j] = match c {
            Chart::A => (la, true),
            Chart::B => (true, lb),
        };
        let free = !(labels[j].0 && labels[j].1);
        if free != t.is_free(j) {
            return Err(Error::Precondition(format!("vertex {}: edge kind does not fit a monomial chart", j + 1)));
        }
    }
    for u in 0..t.len() {
        let mut cs: Vec<Chart> = t.children(u).map(|c| chart[c].unwrap()).collect();
        let n = cs.len();
        cs.dedup();
        if cs.len() != n {
            return Err(Error::Precondition(format!("vertex {}: two successors in the same chart", u + 1)));
        }
    }
    Ok(chart)
}

/// The same diagram renumbered and redrawn in the convention of
/// [`staircase_to_diagram`]: preorder, chart-`A` successor first.
pub fn canonical(d: &EnriquesDiagram) -> Result<EnriquesDiagram> {
    let (tree, sides) = canonical_tree(&d.tree)?;
    let chart = decode(&tree, &sides)?;
    let (tree, order) = tree.reorder(|t, u| {
        let mut kids: Vec<usize> = t.children(u).collect();
        kids.sort_by_key(|&c| chart[c] == Some(Chart::B));
        kids
    });
    // kinds of the root's children are slant; the preorder fixes the sides
    let weights = order.iter().map(|&u| d.weights[u]).collect();
    EnriquesDiagram::new(tree, weights)
}

/// Whether the diagram records no orientation: every point is free and the
/// root has at most one successor, so the diagram cannot tell `x` from `y`.
pub fn is_orientation_free(d: &EnriquesDiagram) -> bool {
    d.tree.outdegree(0) <= 1 && (0..d.len()).all(|i| d.tree.is_free(i))
}

/// Staircase of the complete ideal of a binary unloaded diagram:
/// `Σ = (Σ_c +_v Σ(A)) +_h Σ(B)` at every vertex.
pub fn diagram_to_staircase(d: &EnriquesDiagram) -> Result<Staircase> {
    if !d.is_unloaded() {
        let k = d.to_weighted_cluster();
        let a = k.first_violation().unwrap();
        return Err(Error::ProximityViolation(a + 1));
    }
    let chart = charts(d)?;
    let mut stairs: Vec<Option<Staircase>> = vec![None; d.len()];
    for u in (0..d.len()).rev() {
        let mut s = triangle_or_empty(d.weights[u] as u64);
        for want in [Chart::A, Chart::B] {
            if let Some(c) = d.tree.children(u).find(|&c| chart[c] == Some(want)) {
                let sub = stairs[c].take().expect("children are processed first");
                let dir = match want {
                    Chart::A => Direction::Vertical,
                    Chart::B => Direction::Horizontal,
                };
                s = s.sum(&sub, dir)?;
            }
        }
        stairs[u] = Some(s);
    }
    Ok(stairs[0].take().expect("the root"))
}

/// Exponent maps `(m, n) ↦` exponent of the pullback of `x^m y^n` at each
/// vertex, for the chart reading of the diagram.
pub fn vertex_pullbacks(d: &EnriquesDiagram) -> Result<Vec<Vec<Chart>>> {
    let chart = charts(d)?;
    let mut paths: Vec<Vec<Chart>> = vec![Vec::new(); d.len()];
    for j in 1..d.len() {
        let mut p = paths[d.tree.parent(j).unwrap()].clone();
        p.push(chart[j].unwrap());
        paths[j] = p;
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enriques::tests::example_24;
    use crate::rational::rat;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use EdgeKind::{Horizontal as H, Slant as S, Vertical as V};

    fn ideal(pairs: &[(u64, u64)]) -> MonomialIdeal {
        MonomialIdeal::from_pairs(pairs).unwrap()
    }

    /// Membership through divisorial valuations: `x^m y^n` lies in the ideal of
    /// the diagram iff its order along every exceptional divisor reaches the
    /// strict multiplicity `e_u`.
    fn valuation_member(d: &EnriquesDiagram, paths: &[Vec<Chart>], e: &[BigInt], m: u64, n: u64) -> bool {
        paths.iter().zip(e).all(|(path, eu)| {
            let (i, j) = path.iter().fold((m, n), |acc, c| c.pull(acc));
            BigInt::from(i + j) >= *eu
        }) && !d.is_empty()
    }

    fn assert_matches_valuations(d: &EnriquesDiagram) {
        let s = diagram_to_staircase(d).unwrap();
        let paths = vertex_pullbacks(d).unwrap();
        let e = d.to_weighted_cluster().strict();
        let bound = 2 + d.weights.iter().sum::<i64>() as u64 * 2;
        for m in 0..bound {
            for n in 0..bound {
                assert_eq!(
                    s.ideal().contains(&LatticePoint::new(m, n)),
                    valuation_member(d, &paths, &e, m, n),
                    "x^{m} y^{n} for {:?}",
                    d
                );
            }
        }
    }

    #[test]
    fn staircase_to_diagram_examples() {
        let d = staircase_to_diagram(&Staircase::of(ideal(&[(2, 0), (0, 3)]))).unwrap();
        assert_eq!(d, EnriquesDiagram::t_pq(2, 3).unwrap());
        let d = staircase_to_diagram(&Staircase::of(MonomialIdeal::maximal_power(4))).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.weights, vec![4]);
        let d = staircase_to_diagram(&Staircase::of(ideal(&[(8, 0), (3, 2), (0, 4)]))).unwrap();
        assert_eq!(d.weights[0], 4);
        assert!(d.tree.classify().binary && d.is_unloaded());
        // both facets have slope > -1: one side holding mirrored T_{2,3} ∪ T_{2,5}
        let mirrored = |p, q| {
            let t = EnriquesDiagram::t_pq(p, q).unwrap();
            let first = (0..t.len()).find(|&i| !t.tree.is_free(i)).unwrap();
            EnriquesDiagram::new(t.tree.mirror_subtree(first).unwrap(), t.weights.clone()).unwrap()
        };
        assert_eq!(d, canonical(&mirrored(2, 3).union(&mirrored(2, 5)).unwrap()).unwrap());
        // slope -2/3 sits on the chart-B side and is drawn mirrored
        let d = staircase_to_diagram(&Staircase::of(ideal(&[(3, 0), (0, 2)]))).unwrap();
        assert_eq!(d.tree.edges(), vec![S, V]);
        assert_eq!(d.weights, vec![2, 1, 1]);
        assert_eq!(staircase_to_diagram(&Staircase::empty()), Err(Error::EmptyIdeal));
    }

    #[test]
    fn diagram_to_staircase_examples() {
        let t57 = EnriquesDiagram::t_pq(5, 7).unwrap();
        let s = diagram_to_staircase(&t57).unwrap();
        assert_eq!(s.ideal(), &ideal(&[(5, 0), (0, 7)]).integral_closure());
        let single = EnriquesDiagram::new(EnriquesTree::single(), vec![3]).unwrap();
        assert_eq!(diagram_to_staircase(&single).unwrap(), Staircase::of(MonomialIdeal::maximal_power(3)));
        let u = t57
            .union(&EnriquesDiagram::t_pq(4, 7).unwrap())
            .unwrap()
            .union(&EnriquesDiagram::t_pq(3, 4).unwrap())
            .unwrap();
        let s = diagram_to_staircase(&u).unwrap();
        let facets: Vec<(u64, u64, u64)> = s.ideal().newton_facets().iter().map(|f| (f.p, f.q, f.d)).collect();
        assert_eq!(facets, vec![(4, 7, 1), (5, 7, 1), (3, 4, 1)]);
        assert_eq!(staircase_to_diagram(&s).unwrap(), canonical(&u).unwrap());
        assert!(matches!(diagram_to_staircase(&example_24()), Err(Error::Precondition(_))));
        let loaded = EnriquesDiagram::new(EnriquesTree::chain(&[S, H]).unwrap(), vec![1, 0, 1]).unwrap();
        assert_eq!(diagram_to_staircase(&loaded), Err(Error::ProximityViolation(2)));
    }

    #[test]
    fn example_staircase_lct() {
        // the candidate diagram (4, 2, 2) of the example curve
        let d = EnriquesDiagram::new(EnriquesTree::chain(&[S, H]).unwrap(), vec![4, 2, 2]).unwrap();
        let s = diagram_to_staircase(&d).unwrap();
        assert_eq!(s.ideal().pairs(), vec![(0, 6), (1, 5), (2, 3), (3, 2), (4, 0)]);
        assert_eq!(s.ideal().lct().unwrap(), rat(5, 12));
        assert_matches_valuations(&d);
    }

    #[test]
    fn curve_convention_trees_are_read_by_side() {
        // chart-B side drawn with a horizontal first satellite edge
        let nodes = vec![
            Node { parent: None, edge: None },
            Node { parent: Some(0), edge: Some(S) },
            Node { parent: Some(1), edge: Some(H) },
            Node { parent: Some(0), edge: Some(S) },
            Node { parent: Some(3), edge: Some(H) },
        ];
        let d = EnriquesDiagram::new(EnriquesTree::new(nodes).unwrap(), vec![5, 1, 1, 2, 1]).unwrap();
        let c = canonical(&d).unwrap();
        assert_eq!(c.to_weighted_cluster().cluster.proximity_matrix(), d.to_weighted_cluster().cluster.proximity_matrix());
        let s = diagram_to_staircase(&d).unwrap();
        assert_eq!(staircase_to_diagram(&s).unwrap(), c);
        assert_matches_valuations(&d);
    }

    pub(crate) fn random_binary_diagram(shape: &[u8], branch: &[i64]) -> EnriquesDiagram {
        // grow a chart tree: each entry picks a vertex and a chart to add
        let mut nodes = vec![Node { parent: None, edge: None }];
        let mut labels = vec![(false, false)];
        let mut used: Vec<[bool; 2]> = vec![[false; 2]];
        for (k, &g) in shape.iter().enumerate() {
            let u = (g as usize * 7 + k) % nodes.len();
            let c = if g % 2 == 0 { Chart::A } else { Chart::B };
            let ci = (c == Chart::B) as usize;
            if used[u][ci] {
                continue;
            }
            let (la, lb) = labels[u];
            let (la2, lb2) = match c {
                Chart::A => (la, true),
                Chart::B => (true, lb),
            };
            let kind = match (la2 && lb2, c) {
                (false, _) => S,
                (true, Chart::A) => V,
                (true, Chart::B) => H,
            };
            used[u][ci] = true;
            nodes.push(Node { parent: Some(u), edge: Some(kind) });
            labels.push((la2, lb2));
            used.push([false; 2]);
        }
        let tree = EnriquesTree::new(nodes).unwrap();
        let cl = tree.to_cluster();
        let r = tree.len();
        let b: Vec<BigInt> = (0..r)
            .map(|i| {
                let leaf = tree.outdegree(i) == 0;
                BigInt::from(branch[i % branch.len()] + leaf as i64)
            })
            .collect();
        let w = cl.branch_to_total(&b).iter().map(|x| i64::try_from(x).unwrap()).collect();
        EnriquesDiagram::new(tree, w).unwrap()
    }

    proptest! {
        #[test]
        fn staircase_matches_valuations(shape in prop::collection::vec(0u8..8, 0..7), branch in prop::collection::vec(0i64..3, 1..5)) {
            let d = random_binary_diagram(&shape, &branch);
            prop_assume!(d.tree.classify().binary);
            assert_matches_valuations(&d);
        }

        #[test]
        fn staircase_round_trip(gens in prop::collection::vec((0u64..=15, 0u64..=15), 0..5), a in 1u64..=15, b in 1u64..=15) {
            let mut pts: Vec<LatticePoint> = gens.iter().map(|&(m, n)| LatticePoint::new(m, n)).collect();
            pts.push(LatticePoint::new(a, 0));
            pts.push(LatticePoint::new(0, b));
            let s = Staircase::of(MonomialIdeal::new(pts).unwrap().integral_closure());
            prop_assume!(!s.is_empty());
            let d = staircase_to_diagram(&s).unwrap();
            let back = diagram_to_staircase(&d).unwrap();
            if is_orientation_free(&d) {
                prop_assert!(back == s || back == s.transpose());
            } else {
                prop_assert_eq!(back, s);
            }
        }

        #[test]
        fn diagram_round_trip(shape in prop::collection::vec(0u8..8, 0..9), branch in prop::collection::vec(0i64..3, 1..5)) {
            let d = random_binary_diagram(&shape, &branch);
            prop_assume!(d.tree.classify().binary);
            let c = canonical(&d).unwrap();
            let back = staircase_to_diagram(&diagram_to_staircase(&d).unwrap()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
