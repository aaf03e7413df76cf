//! Minimal log resolution of a plane curve germ at the origin by point
//! blowups over `ℚ`.
//!
//! Every point is handled in local coordinates `(a, b)` together with the
//! exceptional components through it: `la` is the component lying along
//! `{a = 0}`, `lb` the one along `{b = 0}`. Blowing up, the chart
//! `a = a'b', b = b'` has the new component along `{b' = 0}`, the chart
//! `a = a', b = a'b'` along `{a' = 0}`, and points `b' = s ≠ 0` of the second
//! chart lie on the new component only.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cluster::{Cluster, ClusterPoint, WeightedCluster};
use crate::enriques::EnriquesDiagram;
use crate::error::{Error, Result};
use crate::poly::BivariatePolynomial;
use crate::rational::Rational;

const MAX_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChartStep {
    /// `x = x'y', y = y'` at the origin.
    A,
    /// `x = x', y = x'y'` at the origin.
    B,
    /// `x = x', y = x'(y' + s)`.
    Translated(#[serde(with = "crate::rational::serde_fraction")] Rational),
}

impl ChartStep {
    /// Total transform of `p` under this step.
    pub fn pull(&self, p: &BivariatePolynomial) -> BivariatePolynomial {
        match self {
            ChartStep::A => p.substitute_monomial(1, 0, 1, 1),
            ChartStep::B => p.substitute_monomial(1, 1, 0, 1),
            ChartStep::Translated(s) => p.substitute_monomial(1, 1, 0, 1).translate_y(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    /// The weighted cluster; empty for a smooth germ.
    pub cluster: WeightedCluster,
    /// Its Enriques diagram; `None` for a smooth germ.
    pub diagram: Option<EnriquesDiagram>,
    /// Chart steps from the origin to each cluster point.
    pub paths: Vec<Vec<ChartStep>>,
}

struct Pending {
    poly: BivariatePolynomial,
    la: Option<usize>,
    lb: Option<usize>,
    parent: Option<usize>,
    path: Vec<ChartStep>,
}

pub fn resolve_curve(f: &BivariatePolynomial) -> Result<Resolution> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.coeff(0, 0).is_zero() {
        return Err(Error::NotThroughOrigin);
    }
    check_reduced(f)?;
    let mut points: Vec<ClusterPoint> = Vec::new();
    let mut weights: Vec<i64> = Vec::new();
    let mut paths: Vec<Vec<ChartStep>> = Vec::new();
    let mut stack = vec![Pending { poly: f.clone(), la: None, lb: None, parent: None, path: vec![] }];
    while let Some(pt) = stack.pop() {
        let m = pt.poly.multiplicity()?;
        if !needs_blowup(&pt, m) {
            continue;
        }
        if points.len() >= MAX_POINTS {
            return Err(Error::ResolutionTooDeep(points.len()));
        }
        let me = points.len();
        let mut prox: Vec<usize> = pt.parent.into_iter().collect();
        for l in [pt.la, pt.lb].into_iter().flatten() {
            if Some(l) != pt.parent {
                prox.push(l);
            }
        }
        points.push(ClusterPoint { parent: pt.parent, prox });
        weights.push(i64::from(m));
        paths.push(pt.path.clone());

        let lead = pt.poly.form(m);
        let along_a = lead.x_adic_order().unwrap_or(0);
        let along_b = lead.y_adic_order().unwrap_or(0);
        // roots of L(1, s) away from s = 0
        let reduced = lead.divide_monomial(along_a, along_b).expect("orders divide the form");
        let roots = rational_roots(&reduced.dehomogenize_at_x());
        let found: u32 = along_a + along_b + roots.iter().map(|(_, k)| k).sum::<u32>();
        if found < m {
            return Err(Error::NonRationalTangent(lead.to_string()));
        }
        let mut children = Vec::new();
        if along_a > 0 {
            let poly = ChartStep::A.pull(&pt.poly).divide_monomial(0, m).expect("strict transform");
            children.push((poly, pt.la, Some(me), ChartStep::A));
        }
        for (s, _) in &roots {
            let poly = ChartStep::B.pull(&pt.poly).divide_monomial(m, 0).expect("strict transform").translate_y(s);
            children.push((poly, Some(me), None, ChartStep::Translated(s.clone())));
        }
        if along_b > 0 {
            let poly = ChartStep::B.pull(&pt.poly).divide_monomial(m, 0).expect("strict transform");
            children.push((poly, Some(me), pt.lb, ChartStep::B));
        }
        for (poly, la, lb, step) in children.into_iter().rev() {
            let mut path = pt.path.clone();
            path.push(step);
            stack.push(Pending { poly, la, lb, parent: Some(me), path });
        }
    }
    let cluster = WeightedCluster::new(Cluster::new(points)?, weights)?;
    debug_assert!(cluster.is_unloaded());
    let diagram =
        if cluster.is_empty() { None } else { Some(EnriquesDiagram::from_weighted_cluster(&cluster)?) };
    Ok(Resolution { cluster, diagram, paths })
}

/// Whether the point must be blown up for the total transform to have
/// simple normal crossings there.
fn needs_blowup(pt: &Pending, m: u32) -> bool {
    if m >= 2 {
        return true;
    }
    if m == 0 || pt.parent.is_none() {
        return false;
    }
    match (pt.la, pt.lb) {
        (Some(_), Some(_)) => true,
        // transverse to {a = 0} iff the linear part involves b
        (Some(_), None) => pt.poly.coeff(0, 1).is_zero(),
        (None, Some(_)) => pt.poly.coeff(1, 0).is_zero(),
        (None, None) => false,
    }
}

/// Nonzero rational roots with multiplicities of `Σ c_i s^i`.
fn rational_roots(coeffs: &[Rational]) -> Vec<(Rational, u32)> {
    let mut poly = integer_coefficients(coeffs);
    let mut roots = Vec::new();
    if poly.len() <= 1 {
        return roots;
    }
    let lead = poly.last().unwrap().abs();
    let constant = poly[0].abs();
    let mut candidates = Vec::new();
    for p in divisors(&constant) {
        for q in divisors(&lead) {
            for sign in [1, -1] {
                candidates.push(Rational::new(BigInt::from(sign) * &p, q.clone()));
            }
        }
    }
    candidates.sort();
    candidates.dedup();
    for s in candidates {
        let mut k = 0;
        while poly.len() > 1 && eval_int(&poly, &s).is_zero() {
            poly = deflate(&poly, &s);
            k += 1;
        }
        if k > 0 {
            roots.push((s, k));
        }
    }
    roots
}

fn integer_coefficients(coeffs: &[Rational]) -> Vec<BigInt> {
    let mut c: Vec<Rational> = coeffs.to_vec();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
    }
    let l = c.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = c.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

fn eval_int(poly: &[BigInt], s: &Rational) -> Rational {
    poly.iter().rev().fold(Rational::zero(), |acc, c| acc * s + Rational::from_integer(c.clone()))
}

/// Divides by `(s - root)` and rescales to integer coefficients.
fn deflate(poly: &[BigInt], root: &Rational) -> Vec<BigInt> {
    let n = poly.len() - 1;
    let mut out = vec![Rational::zero(); n];
    let mut carry = Rational::zero();
    for i in (1..=n).rev() {
        carry = carry * root + Rational::from_integer(poly[i].clone());
        out[i - 1] = carry.clone();
    }
    integer_coefficients(&out)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    let mut d = BigInt::from(2);
    while &d * &d <= rest {
        let mut k = 0;
        while (&rest % &d).is_zero() {
            rest /= &d;
            k += 1;
        }
        if k > 0 {
            primes.push((d.clone(), k));
        }
        d += 1;
    }
    if rest > BigInt::one() {
        primes.push((rest, 1));
    }
    let mut out = vec![BigInt::one()];
    for (p, k) in primes {
        let mut next = Vec::new();
        for x in &out {
            let mut pk = BigInt::one();
            for _ in 0..=k {
                next.push(x * &pk);
                pk *= &p;
            }
        }
        out = next;
    }
    out
}

/// Rejects polynomials with a repeated factor.
pub fn check_reduced(f: &BivariatePolynomial) -> Result<()> {
    let p = to_ypoly(f);
    let content = p.iter().fold(Vec::new(), |acc, c| ugcd(&acc, c));
    if udeg(&ugcd(&content, &uderiv(&content))) > 0 {
        return Err(Error::NonReduced(f.to_string()));
    }
    let pp = primitive(&p);
    if pp.len() <= 1 {
        return Ok(());
    }
    // The discriminant of pp in y has degree at most (2n - 2)m in x and the
    // leading coefficient at most m, so some x = c among (2n - 1)m + 1 values
    // gives a squarefree specialization of full degree iff pp is squarefree.
    let n = pp.len() - 1;
    let m = pp.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0);
    for c in 0..=((2 * n - 1) * m) as i64 {
        let c = Rational::from_integer(c.into());
        let g: UPoly = utrim(pp.iter().map(|k| ueval(k, &c)).collect());
        if g.len() == pp.len() && udeg(&ugcd(&g, &uderiv(&g))) == 0 {
            return Ok(());
        }
    }
    Err(Error::NonReduced(f.to_string()))
}

// Q[x] as coefficient vectors, lowest degree first, no trailing zeros.
type UPoly = Vec<Rational>;
// Q[x][y] as coefficient vectors in y.
type YPoly = Vec<UPoly>;

fn utrim(mut p: UPoly) -> UPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn udeg(p: &UPoly) -> isize {
    p.len() as isize - 1
}

fn uderiv(p: &UPoly) -> UPoly {
    utrim(p.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer(i.into())).collect())
}

fn ueval(p: &UPoly, c: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, k| acc * c + k)
}

fn udivrem(a: &UPoly, b: &UPoly) -> (UPoly, UPoly) {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b.last().expect("nonzero divisor").clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lb;
        for (i, x) in b.iter().enumerate() {
            r[shift + i] -= &c * x;
        }
        q[shift] = c;
        r = utrim(r);
    }
    (utrim(q), r)
}

/// Monic gcd; the gcd with the zero polynomial is the other argument made monic.
fn ugcd(a: &UPoly, b: &UPoly) -> UPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = udivrem(&a, &b);
        a = b;
        b = r;
    }
    match a.last() {
        Some(l) => {
            let l = l.clone();
            a.iter().map(|c| c / &l).collect()
        }
        None => a,
    }
}

fn to_ypoly(f: &BivariatePolynomial) -> YPoly {
    let deg = f.support().map(|(_, n)| n).max().unwrap_or(0) as usize;
    let mut out: YPoly = vec![Vec::new(); deg + 1];
    for (&(m, n), c) in f.terms() {
        let slot = &mut out[n as usize];
        if slot.len() <= m as usize {
            slot.resize(m as usize + 1, Rational::zero());
        }
        slot[m as usize] = c.clone();
    }
    out.into_iter().map(utrim).collect()
}

fn primitive(p: &YPoly) -> YPoly {
    let content = p.iter().fold(Vec::new(), |acc, c| ugcd(&acc, c));
    if content.is_empty() {
        return p.clone();
    }
    p.iter().map(|c| if c.is_empty() { Vec::new() } else { udivrem(c, &content).0 }).collect()
}
