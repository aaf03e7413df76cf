//! Acceptance suite: one line per criterion, exact equality throughout.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use singular_lct::corpus::{corpus, resolved_corpus, run_corpus};
use singular_lct::engine::lct_via_term_ideals;
use singular_lct::enriques::{EdgeKind, EnriquesDiagram, EnriquesTree, Node};
use singular_lct::euclid::{branch_coefficients, branch_strict_matrix, verify_main_inequality};
use singular_lct::monomial_diagram::{canonical, diagram_to_staircase, is_orientation_free, staircase_to_diagram, Chart};
use singular_lct::newton::term_ideal;
use singular_lct::poly::parse;
use singular_lct::rational::{int, join, rat};
use singular_lct::resolution::resolve_curve;
use singular_lct::{LatticePoint, MonomialIdeal, Rational, Staircase, WeightedCluster};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn coprime_pairs(min_p: i64, max_q: i64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for q in 2..=max_q {
        for p in min_p..q {
            if p.gcd(&q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

fn howald_example() -> Outcome {
    let a = MonomialIdeal::from_pairs(&[(8, 0), (3, 2), (0, 4)]).map_err(e)?;
    let lct = a.lct().map_err(e)?;
    ensure(lct == rat(5, 12), || format!("lct = {lct}"))?;
    let j = a.multiplier_ideal(&lct).map_err(e)?;
    let maximal = MonomialIdeal::from_pairs(&[(1, 0), (0, 1)]).map_err(e)?;
    ensure(j == maximal, || format!("multiplier ideal at 5/12 = {j}"))?;
    Ok(format!("lct = {lct}, multiplier ideal {j}"))
}

fn worked_curve() -> Outcome {
    let f = parse("(x^3 - y^2)^2 - x^5*y").map_err(e)?;
    let r = resolve_curve(&f).map_err(e)?;
    let d = r.diagram.ok_or("no diagram")?;
    let t23 = EnriquesDiagram::t_pq(2, 3).map_err(e)?.tree;
    ensure(d.tree == t23.connected_sum(&t23).map_err(e)?, || format!("tree {:?}", d.tree.edges()))?;
    ensure(d.weights == vec![4, 2, 2, 1, 1], || format!("weights {:?}", d.weights))?;
    let direct = d.to_weighted_cluster().lct().map_err(e)?.value;
    let term = lct_via_term_ideals(&d).map_err(e)?;
    ensure(direct == rat(5, 12) && term == rat(5, 12), || format!("lct {direct}, via term ideals {term}"))?;
    let mono = term_ideal(&f).map_err(e)?.jumping_numbers(&int(1)).map_err(e)?;
    ensure(mono.starts_with(&[rat(5, 12), rat(7, 12)]), || format!("monomial jumping {}", join(&mono)))?;
    let curve = d.to_weighted_cluster().jumping_numbers(&int(1)).map_err(e)?;
    ensure(curve.starts_with(&[rat(5, 12), rat(15, 26)]), || format!("curve jumping {}", join(&curve)))?;
    Ok(format!("T23#T23 (4,2,2,1,1), lct 5/12 both ways, jumping {} | {} ...", join(&mono[..2]), join(&curve[..2])))
}

fn unloading_example() -> Outcome {
    let f = parse("x^5 - y^7").map_err(e)?;
    let c = resolve_curve(&f).map_err(e)?.cluster.cluster;
    let k = WeightedCluster::new(c, vec![4, 2, 0, 2, 1]).map_err(e)?;
    let u = k.unload().map_err(e)?;
    ensure(u.weights == vec![4, 2, 1, 1, 0], || format!("unloaded {:?}", u.weights))?;
    ensure(u.excesses() == vec![0, 1, 0, 1, 0], || format!("branch vector {:?}", u.excesses()))?;
    Ok("{4,2,0,2,1} -> {4,2,1,1,0} = B2 + B4".into())
}

fn cusp_family() -> Outcome {
    let pairs = coprime_pairs(2, 20);
    for &(p, q) in &pairs {
        let f = parse(&format!("x^{p} - y^{q}")).map_err(e)?;
        let k = resolve_curve(&f).map_err(e)?.cluster;
        let expected = rat(1, p) + rat(1, q);
        let lct = k.lct().map_err(e)?.value;
        let a = MonomialIdeal::from_pairs(&[(p as u64, 0), (0, q as u64)]).map_err(e)?;
        let howald = a.lct().map_err(e)?;
        ensure(lct == expected && howald == expected, || format!("({p},{q}): {lct} vs {howald}"))?;
        let curve = k.jumping_numbers(&int(1)).map_err(e)?;
        let mono: Vec<Rational> =
            a.jumping_numbers(&int(1)).map_err(e)?.into_iter().filter(|x| *x < int(1)).collect();
        ensure(curve == mono, || format!("({p},{q}): {} vs {}", join(&curve), join(&mono)))?;
    }
    Ok(format!("{} coprime pairs, lct and jumping numbers in (0,1) agree", pairs.len()))
}

fn main_theorem_corpus() -> Outcome {
    let curves = corpus();
    let entries = run_corpus(&curves);
    ensure(entries.len() >= 50, || format!("only {} curves", entries.len()))?;
    let failed: Vec<String> = entries
        .iter()
        .filter(|x| !x.passed)
        .map(|x| format!("{}: {}", x.curve, x.error.clone().unwrap_or_default()))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    Ok(format!("{} curves, lct_direct = lct_term on all", entries.len()))
}

fn mechanization() -> Outcome {
    let mut checked = 0;
    for (p, q) in coprime_pairs(2, 8) {
        let t = EnriquesDiagram::t_pq(p, q).map_err(e)?.tree;
        for (p2, q2) in coprime_pairs(1, 8) {
            let rep = verify_main_inequality(&t, p2, q2).map_err(e)?;
            ensure(rep.holds, || format!("T({p},{q}) # T({p2},{q2}) fails: {rep:?}"))?;
            checked += 1;
        }
    }
    let mut entries = 0;
    for (p, q) in coprime_pairs(1, 12) {
        let c = EnriquesDiagram::t_pq(p, q).map_err(e)?.tree.to_cluster();
        let m = branch_strict_matrix(&c);
        let r = c.len();
        for a in 0..r {
            let closed = branch_coefficients(p, q, a as i64 + 1).map_err(e)?;
            ensure(m[a][r - 1] == BigInt::from(closed.e_r), || format!("({p},{q}) alpha {}", a + 1))?;
            entries += 1;
        }
    }
    let mut pruned = 0;
    for (_, r) in resolved_corpus().map_err(e)? {
        let Some(d) = r.diagram else { continue };
        let class = d.tree.classify();
        if !class.unibranch || class.non_degenerate {
            continue;
        }
        let before = d.to_weighted_cluster().lct().map_err(e)?.value;
        let after = d.prune_last().map_err(e)?.to_weighted_cluster().lct().map_err(e)?.value;
        ensure(before == after, || format!("prune_last changes {before} to {after}"))?;
        pruned += 1;
    }
    ensure(pruned > 0, || "no degenerate unibranch diagram in the corpus".into())?;
    let t57 = EnriquesDiagram::t_pq(5, 7).map_err(e)?;
    let before = t57.to_weighted_cluster().lct().map_err(e)?.value;
    let after = t57.prune_last().map_err(e)?.to_weighted_cluster().lct().map_err(e)?.value;
    ensure(before == rat(12, 35) && after == rat(7, 20), || format!("T57 control: {before} -> {after}"))?;
    Ok(format!(
        "{checked} connected sums, {entries} closed forms, {pruned} degenerate diagrams pruned, T57 12/35 -> 7/20"
    ))
}

/// A random unloaded diagram on a chart tree with at most `max` vertices.
fn random_binary_diagram(rng: &mut ChaCha8Rng, max: usize) -> EnriquesDiagram {
    let mut nodes = vec![Node { parent: None, edge: None }];
    let mut labels = vec![(false, false)];
    let mut used = vec![[false; 2]];
    let target = rng.gen_range(1..=max);
    while nodes.len() < target {
        let u = rng.gen_range(0..nodes.len());
        let chart = if rng.gen_bool(0.5) { Chart::A } else { Chart::B };
        let ci = (chart == Chart::B) as usize;
        if used[u][ci] {
            continue;
        }
        let (la, lb) = labels[u];
        let (la, lb) = match chart {
            Chart::A => (la, true),
            Chart::B => (true, lb),
        };
        let edge = match (la && lb, chart) {
            (false, _) => EdgeKind::Slant,
            (true, Chart::A) => EdgeKind::Vertical,
            (true, Chart::B) => EdgeKind::Horizontal,
        };
        used[u][ci] = true;
        nodes.push(Node { parent: Some(u), edge: Some(edge) });
        labels.push((la, lb));
        used.push([false; 2]);
    }
    let tree = EnriquesTree::new(nodes).expect("chart trees are valid");
    let cluster = tree.to_cluster();
    let branch: Vec<BigInt> = (0..tree.len())
        .map(|i| BigInt::from(rng.gen_range(0..3) + (tree.outdegree(i) == 0) as i64))
        .collect();
    let weights = cluster.branch_to_total(&branch).iter().map(|w| i64::try_from(w).unwrap()).collect();
    EnriquesDiagram::new(tree, weights).expect("nonnegative branch vectors give diagrams")
}

fn random_closed_staircase(rng: &mut ChaCha8Rng) -> Staircase {
    let mut points = vec![
        LatticePoint::new(rng.gen_range(1..=15), 0),
        LatticePoint::new(0, rng.gen_range(1..=15)),
    ];
    for _ in 0..rng.gen_range(0..5) {
        points.push(LatticePoint::new(rng.gen_range(1..=15), rng.gen_range(1..=15)));
    }
    Staircase::of(MonomialIdeal::new(points).expect("nonempty").integral_closure())
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..200 {
        let d = random_binary_diagram(&mut rng, 10);
        let back = staircase_to_diagram(&diagram_to_staircase(&d).map_err(e)?).map_err(e)?;
        ensure(back == canonical(&d).map_err(e)?, || format!("diagram {i}: {:?} {:?}", d.tree.edges(), d.weights))?;
    }
    let mut swapped = 0;
    for i in 0..200 {
        let s = random_closed_staircase(&mut rng);
        let d = staircase_to_diagram(&s).map_err(e)?;
        let back = diagram_to_staircase(&d).map_err(e)?;
        if back != s {
            // an all-free chain cannot record which axis is which
            ensure(is_orientation_free(&d) && back == s.transpose(), || format!("staircase {i}: {}", s.ideal()))?;
            swapped += 1;
        }
    }
    Ok(format!(
        "200 diagrams exact; 200 staircases exact except {swapped} all-free chains recovered up to swapping x and y"
    ))
}

fn resolution_independence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
    let mut checks = 0;
    for (curve, r) in resolved_corpus().map_err(e)? {
        let k = r.cluster;
        let parent = rng.gen_range(0..k.len());
        let extended = k.cluster.with_free_point(parent).map_err(e)?;
        let mut weights = k.weights.clone();
        weights.push(0);
        let k2 = WeightedCluster::new(extended, weights).map_err(e)?;
        let breakpoints = k.jumping_candidates(&int(1));
        for j in 0..10 {
            let xi = if j % 2 == 0 && !breakpoints.is_empty() {
                breakpoints[rng.gen_range(0..breakpoints.len())].clone()
            } else {
                rat(rng.gen_range(1..100), 100)
            };
            if xi >= int(1) {
                continue;
            }
            let a = k.multiplier_cluster(&xi).map_err(e)?;
            let b = k2.multiplier_cluster(&xi).map_err(e)?;
            let same = b.weights[..a.len()] == a.weights[..] && b.weights[a.len()] == 0;
            ensure(same, || format!("{} at {xi}: {:?} vs {:?}", curve.source, a.weights, b.weights))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} multiplier clusters unchanged by an extra free point"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("monomial lct and multiplier ideal", howald_example),
        ("worked curve end to end", worked_curve),
        ("unloading and branch vector", unloading_example),
        ("cusp family p<q<=20", cusp_family),
        ("main theorem on the corpus", main_theorem_corpus),
        ("inequalities, closed forms, pruning", mechanization),
        ("diagram and staircase round trips", round_trips),
        ("resolution independence of multiplier clusters", resolution_independence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.1}s): {why}", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
