//! Monomial ideals in two variables, their Newton polygons and staircases,
//! and Howald's description of their multiplier ideals.
//!
//! A monomial ideal is stored by its minimal generators, sorted by increasing
//! `x`-exponent (hence strictly decreasing `y`-exponent). The Newton polygon is
//! cut out by one affine inequality `g >= 1` per compact facet, plus the two
//! axis-parallel rays when the ideal has no pure power of a variable.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::BivariatePolynomial;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u64; 2]", into = "[u64; 2]")]
pub struct LatticePoint {
    pub m: u64,
    pub n: u64,
}

impl LatticePoint {
    pub const fn new(m: u64, n: u64) -> Self {
        Self { m, n }
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &LatticePoint) -> bool {
        self.m <= other.m && self.n <= other.n
    }
}

impl From<[u64; 2]> for LatticePoint {
    fn from(a: [u64; 2]) -> Self {
        Self::new(a[0], a[1])
    }
}

impl From<LatticePoint> for [u64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.m, p.n]
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

fn minimal_elements(points: impl IntoIterator<Item = LatticePoint>) -> Vec<LatticePoint> {
    let mut pts: Vec<LatticePoint> = points.into_iter().collect();
    pts.sort();
    pts.dedup();
    let mut out: Vec<LatticePoint> = Vec::new();
    for p in pts {
        // sorted by m, so p is minimal iff its n is below every kept n
        if out.last().is_none_or(|last| p.n < last.n) {
            out.push(p);
        }
    }
    out
}

/// A nonzero monomial ideal, `(1)` included.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatticePoint>", into = "Vec<LatticePoint>")]
pub struct MonomialIdeal {
    generators: Vec<LatticePoint>,
}

impl TryFrom<Vec<LatticePoint>> for MonomialIdeal {
    type Error = Error;
    fn try_from(v: Vec<LatticePoint>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<MonomialIdeal> for Vec<LatticePoint> {
    fn from(a: MonomialIdeal) -> Self {
        a.generators
    }
}

impl MonomialIdeal {
    /// Keeps only the minimal exponents; fails on an empty list.
    pub fn new(points: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        let generators = minimal_elements(points);
        if generators.is_empty() {
            return Err(Error::EmptyIdeal);
        }
        Ok(Self { generators })
    }

    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(m, n)| LatticePoint::new(m, n)))
    }

    pub fn unit() -> Self {
        Self { generators: vec![LatticePoint::new(0, 0)] }
    }

    /// `(x, y)^c`.
    pub fn maximal_power(c: u64) -> Self {
        Self { generators: (0..=c).map(|i| LatticePoint::new(i, c - i)).collect() }
    }

    pub fn generators(&self) -> &[LatticePoint] {
        &self.generators
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        self.generators.iter().map(|p| (p.m, p.n)).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.generators[0] == LatticePoint::new(0, 0)
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.generators.iter().any(|g| g.divides(p))
    }

    /// Ideal inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &MonomialIdeal) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    /// Both a pure power of `x` and of `y` belong to the ideal.
    pub fn has_finite_colength(&self) -> bool {
        self.generators[0].m == 0 && self.generators.last().expect("nonempty").n == 0
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.generators.iter().map(|p| LatticePoint::new(p.n, p.m))).expect("nonempty")
    }

    fn leftmost(&self) -> LatticePoint {
        self.generators[0]
    }

    fn bottom(&self) -> LatticePoint {
        *self.generators.last().expect("nonempty")
    }

    /// Vertices of the Newton polygon, from the leftmost to the lowest.
    pub fn newton_vertices(&self) -> Vec<LatticePoint> {
        let mut hull: Vec<LatticePoint> = Vec::new();
        for &c in &self.generators {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.m as i128 - a.m as i128) * (c.n as i128 - b.n as i128)
                    - (b.n as i128 - a.n as i128) * (c.m as i128 - b.m as i128);
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(c);
        }
        hull
    }

    /// The affine functions whose `>= 1` locus cuts out the Newton polygon
    /// inside the first quadrant.
    pub fn support_functions(&self) -> Vec<SupportFunction> {
        let mut out: Vec<SupportFunction> =
            self.newton_facets().iter().map(|f| f.support.clone()).collect();
        let left = self.leftmost();
        if left.m > 0 {
            out.push(SupportFunction::new(Rational::new(BigInt::one(), BigInt::from(left.m)), Rational::zero()));
        }
        let bottom = self.bottom();
        if bottom.n > 0 {
            out.push(SupportFunction::new(Rational::zero(), Rational::new(BigInt::one(), BigInt::from(bottom.n))));
        }
        out
    }

    /// Compact facets, steepest first.
    pub fn newton_facets(&self) -> Vec<NewtonFacet> {
        self.newton_vertices()
            .windows(2)
            .map(|w| NewtonFacet::between(w[0], w[1]))
            .collect()
    }

    /// Exponents of the integral closure: all lattice points of the Newton polygon.
    pub fn integral_closure(&self) -> MonomialIdeal {
        let left = self.leftmost();
        let bottom = self.bottom();
        let facets = self.newton_facets();
        let mut points = Vec::new();
        for m in left.m..=bottom.m {
            let mut n_req = bottom.n;
            for f in &facets {
                // q m + p n >= c
                let rest = f.level as i128 - (f.q as i128) * (m as i128);
                if rest > 0 {
                    let need = (rest + f.p as i128 - 1) / f.p as i128;
                    n_req = n_req.max(need as u64);
                }
            }
            points.push(LatticePoint::new(m, n_req));
        }
        MonomialIdeal::new(points).expect("nonempty")
    }

    fn check_lct_domain(&self) -> Result<()> {
        if self.is_unit() {
            return Err(Error::UnitIdeal);
        }
        if self.generators.len() == 1 {
            let g = self.generators[0];
            if g.m == 0 || g.n == 0 {
                return Err(Error::PrincipalMonomial(self.to_string()));
            }
        }
        Ok(())
    }

    /// `min_j g_j(1, 1)` over the support functions.
    pub fn lct(&self) -> Result<Rational> {
        self.check_lct_domain()?;
        let one = LatticeVector::ones();
        Ok(self
            .support_functions()
            .iter()
            .map(|g| g.eval_shifted(&one))
            .min()
            .expect("a proper ideal has at least one support function"))
    }

    /// Howald: monomials `x^m` with `m + (1,1)` strictly inside `ξ·Newt`.
    pub fn multiplier_ideal(&self, xi: &Rational) -> Result<MonomialIdeal> {
        if !xi.is_positive() {
            return Err(Error::InvalidArgument(format!("ξ must be positive, got {xi}")));
        }
        if self.is_unit() {
            return Ok(Self::unit());
        }
        let supports = self.support_functions();
        // the y-exponent bound once every x-dependent constraint is slack
        let floor_n = supports
            .iter()
            .filter(|g| g.a.is_zero())
            .map(|g| floor_nonneg(&(xi / &g.b)))
            .max()
            .unwrap_or(0);
        let column_min = |m: u64| -> Option<u64> {
            let mut n_req = 0u64;
            let v1 = Rational::from_integer(BigInt::from(m + 1));
            for g in &supports {
                let slack = xi - &g.a * &v1;
                if g.b.is_zero() {
                    if !slack.is_negative() {
                        return None;
                    }
                } else {
                    // n + 1 > slack / b
                    n_req = n_req.max(floor_nonneg(&(slack / &g.b)));
                }
            }
            Some(n_req)
        };
        let mut points = Vec::new();
        let mut m = 0u64;
        loop {
            if let Some(n) = column_min(m) {
                points.push(LatticePoint::new(m, n));
                if n <= floor_n {
                    break;
                }
            }
            m += 1;
        }
        MonomialIdeal::new(points)
    }

    /// Jumping numbers in `(0, bound]`.
    pub fn jumping_numbers(&self, bound: &Rational) -> Result<Vec<Rational>> {
        self.check_lct_domain()?;
        if !bound.is_positive() {
            return Err(Error::InvalidArgument(format!("bound must be positive, got {bound}")));
        }
        let mut candidates = Vec::new();
        for g in self.support_functions() {
            g.values_up_to(bound, &mut candidates);
        }
        candidates.sort();
        candidates.dedup();
        let mut out = Vec::new();
        let mut previous = Rational::zero();
        for c in candidates {
            let before = (&previous + &c) / Rational::from_integer(BigInt::from(2));
            if self.multiplier_ideal(&before)? != self.multiplier_ideal(&c)? {
                out.push(c.clone());
            }
            previous = c;
        }
        Ok(out)
    }
}

fn floor_nonneg(r: &Rational) -> u64 {
    if r.is_negative() {
        0
    } else {
        r.floor().to_integer().to_u64().expect("exponent fits in u64")
    }
}

impl fmt::Display for MonomialIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return write!(f, "(1)");
        }
        let parts: Vec<String> = self
            .generators
            .iter()
            .map(|p| {
                let x = match p.m {
                    0 => String::new(),
                    1 => "x".into(),
                    m => format!("x^{m}"),
                };
                let y = match p.n {
                    0 => String::new(),
                    1 => "y".into(),
                    n => format!("y^{n}"),
                };
                format!("{x}{y}")
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `(1, 1)` and its lattice translates, as exact rationals.
#[derive(Debug, Clone)]
pub struct LatticeVector(pub Rational, pub Rational);

impl LatticeVector {
    pub fn ones() -> Self {
        Self(Rational::one(), Rational::one())
    }
}

/// `g(m, n) = a·m + b·n`, normalized so the Newton polygon is `g >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportFunction {
    #[serde(with = "crate::rational::serde_fraction")]
    pub a: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub b: Rational,
}

impl SupportFunction {
    pub fn new(a: Rational, b: Rational) -> Self {
        Self { a, b }
    }

    pub fn eval(&self, m: &Rational, n: &Rational) -> Rational {
        &self.a * m + &self.b * n
    }

    fn eval_shifted(&self, v: &LatticeVector) -> Rational {
        self.eval(&v.0, &v.1)
    }

    /// All values `g(v)` with `v >= (1,1)` integral and `g(v) <= bound`.
    fn values_up_to(&self, bound: &Rational, out: &mut Vec<Rational>) {
        let one = Rational::one();
        let big = |r: Rational| floor_nonneg(&r);
        if self.b.is_zero() {
            for v1 in 1..=big(bound / &self.a) {
                out.push(self.eval(&Rational::from_integer(v1.into()), &one));
            }
        } else if self.a.is_zero() {
            for v2 in 1..=big(bound / &self.b) {
                out.push(self.eval(&one, &Rational::from_integer(v2.into())));
            }
        } else {
            let max_v1 = big((bound - &self.b) / &self.a);
            for v1 in 1..=max_v1 {
                let r1 = Rational::from_integer(v1.into());
                let max_v2 = big((bound - &self.a * &r1) / &self.b);
                for v2 in 1..=max_v2 {
                    out.push(self.eval(&r1, &Rational::from_integer(v2.into())));
                }
            }
        }
    }
}

/// A compact facet of direction `(p, -q)` and lattice length `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonFacet {
    pub p: u64,
    pub q: u64,
    pub d: u64,
    pub start: LatticePoint,
    pub end: LatticePoint,
    /// `q·m + p·n` on the facet.
    pub level: u64,
    pub support: SupportFunction,
}

impl NewtonFacet {
    fn between(start: LatticePoint, end: LatticePoint) -> Self {
        let dm = end.m - start.m;
        let dn = start.n - end.n;
        let d = dm.gcd(&dn);
        let (p, q) = (dm / d, dn / d);
        let level = q * start.m + p * start.n;
        let lv = BigInt::from(level);
        let support = SupportFunction::new(
            Rational::new(BigInt::from(q), lv.clone()),
            Rational::new(BigInt::from(p), lv),
        );
        Self { p, q, d, start, end, level, support }
    }

    /// Slope `-q/p` of the facet.
    pub fn slope(&self) -> Rational {
        -Rational::new(BigInt::from(self.q), BigInt::from(self.p))
    }
}

/// Monomial ideal generated by the minimal exponents of `f`.
pub fn term_ideal(f: &BivariatePolynomial) -> Result<MonomialIdeal> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    MonomialIdeal::new(f.support().map(|(m, n)| LatticePoint::new(m as u64, n as u64)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
}

/// A subset of `ℕ²` whose complement is stable under `+ℕ²`, stored through the
/// minimal generators of that complement. An empty staircase is the unit ideal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Staircase {
    ideal: MonomialIdeal,
}

impl Staircase {
    pub fn of(ideal: MonomialIdeal) -> Self {
        Self { ideal }
    }

    pub fn empty() -> Self {
        Self { ideal: MonomialIdeal::unit() }
    }

    pub fn ideal(&self) -> &MonomialIdeal {
        &self.ideal
    }

    pub fn into_ideal(self) -> MonomialIdeal {
        self.ideal
    }

    pub fn generators(&self) -> &[LatticePoint] {
        self.ideal.generators()
    }

    pub fn is_finite(&self) -> bool {
        self.ideal.has_finite_colength()
    }

    pub fn is_empty(&self) -> bool {
        self.ideal.is_unit()
    }

    fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InfiniteStaircase(self.ideal.to_string()))
        }
    }

    /// Widths of the horizontal slices `n = 0, 1, …` (non-increasing, positive).
    pub fn rows(&self) -> Result<Vec<u64>> {
        self.require_finite()?;
        let height = self.ideal.generators[0].n;
        Ok((0..height)
            .map(|j| {
                self.ideal
                    .generators
                    .iter()
                    .filter(|g| g.n <= j)
                    .map(|g| g.m)
                    .min()
                    .expect("(0, height) bounds the search")
            })
            .collect())
    }

    /// Heights of the vertical slices `m = 0, 1, …`.
    pub fn columns(&self) -> Result<Vec<u64>> {
        self.transpose().rows()
    }

    pub fn from_rows(rows: &[u64]) -> Result<Self> {
        if rows.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!("slices must be non-increasing: {rows:?}")));
        }
        let rows: Vec<u64> = rows.iter().copied().take_while(|&w| w > 0).collect();
        let mut gens: Vec<LatticePoint> =
            rows.iter().enumerate().map(|(j, &w)| LatticePoint::new(w, j as u64)).collect();
        gens.push(LatticePoint::new(0, rows.len() as u64));
        Ok(Self { ideal: MonomialIdeal::new(gens)? })
    }

    pub fn from_columns(columns: &[u64]) -> Result<Self> {
        Ok(Self::from_rows(columns)?.transpose())
    }

    pub fn transpose(&self) -> Self {
        Self { ideal: self.ideal.transpose() }
    }

    /// Number of cells.
    pub fn len(&self) -> Result<u64> {
        Ok(self.rows()?.iter().sum())
    }

    pub fn contains_cell(&self, p: &LatticePoint) -> bool {
        !self.ideal.contains(p)
    }

    /// Slicewise sum.
    pub fn sum(&self, other: &Staircase, direction: Direction) -> Result<Staircase> {
        let (a, b) = match direction {
            Direction::Horizontal => (self.rows()?, other.rows()?),
            Direction::Vertical => (self.columns()?, other.columns()?),
        };
        let len = a.len().max(b.len());
        let summed: Vec<u64> = (0..len)
            .map(|i| a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0))
            .collect();
        match direction {
            Direction::Horizontal => Self::from_rows(&summed),
            Direction::Vertical => Self::from_columns(&summed),
        }
    }
}

/// `{(m, n) | m + n < c}`, the staircase of `(x, y)^c`.
pub fn triangle(c: i64) -> Result<Staircase> {
    if c <= 0 {
        return Err(Error::InvalidArgument(format!("triangle size must be positive, got {c}")));
    }
    Ok(triangle_or_empty(c as u64))
}

pub(crate) fn triangle_or_empty(c: u64) -> Staircase {
    if c == 0 {
        Staircase::empty()
    } else {
        Staircase::of(MonomialIdeal::maximal_power(c))
    }
}

pub fn staircase_sum(a: &Staircase, b: &Staircase, direction: Direction) -> Result<Staircase> {
    a.sum(b, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;
    use crate::rational::{int, rat};

    fn ideal(pairs: &[(u64, u64)]) -> MonomialIdeal {
        MonomialIdeal::from_pairs(pairs).unwrap()
    }

    #[test]
    fn term_ideal_examples() {
        let f = parse("(x^3 - y^2)^2 - x^5*y").unwrap();
        assert_eq!(term_ideal(&f).unwrap().pairs(), vec![(0, 4), (3, 2), (5, 1), (6, 0)]);
        assert_eq!(term_ideal(&parse("x^5 - y^7").unwrap()).unwrap().pairs(), vec![(0, 7), (5, 0)]);
        assert_eq!(term_ideal(&parse("(x+y)^2").unwrap()).unwrap().pairs(), vec![(0, 2), (1, 1), (2, 0)]);
        assert_eq!(term_ideal(&BivariatePolynomial::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn integral_closure_examples() {
        assert_eq!(ideal(&[(2, 0), (0, 2)]).integral_closure(), ideal(&[(2, 0), (1, 1), (0, 2)]));
        let a = ideal(&[(8, 0), (3, 2), (0, 4)]);
        assert_eq!(a.integral_closure(), ideal(&[(8, 0), (6, 1), (3, 2), (2, 3), (0, 4)]));
        let b = ideal(&[(3, 0), (2, 1), (1, 2), (0, 3)]);
        assert_eq!(b.integral_closure(), b);
        let c = ideal(&[(5, 0), (0, 7)]).integral_closure();
        assert!(c.contains(&LatticePoint::new(3, 3)));
        // brute-force membership over the box
        for m in 0..=5u64 {
            for n in 0..=7u64 {
                let inside = rat(m as i64, 5) + rat(n as i64, 7) >= int(1);
                assert_eq!(c.contains(&LatticePoint::new(m, n)), inside, "({m},{n})");
            }
        }
    }

    #[test]
    fn facet_examples() {
        let f = ideal(&[(8, 0), (3, 2), (0, 4)]).newton_facets();
        assert_eq!(f.iter().map(|f| (f.p, f.q, f.d)).collect::<Vec<_>>(), vec![(3, 2, 1), (5, 2, 1)]);
        let g = ideal(&[(6, 0), (5, 1), (3, 2), (0, 4)]).newton_facets();
        assert_eq!(g.len(), 1);
        assert_eq!((g[0].p, g[0].q, g[0].d), (3, 2, 2));
        assert_eq!(g[0].support, SupportFunction::new(rat(1, 6), rat(1, 4)));
        let h = ideal(&[(5, 0), (0, 7)]).newton_facets();
        assert_eq!((h[0].p, h[0].q, h[0].d), (5, 7, 1));
    }

    #[test]
    fn lct_examples() {
        assert_eq!(ideal(&[(8, 0), (3, 2), (0, 4)]).lct().unwrap(), rat(5, 12));
        assert_eq!(ideal(&[(6, 0), (5, 1), (3, 2), (0, 4)]).lct().unwrap(), rat(5, 12));
        assert_eq!(ideal(&[(1, 0), (0, 1)]).lct().unwrap(), int(2));
        assert_eq!(MonomialIdeal::unit().lct(), Err(Error::UnitIdeal));
        assert!(matches!(ideal(&[(3, 0)]).lct(), Err(Error::PrincipalMonomial(_))));
        // non-finite colength ideals use the axis rays
        assert_eq!(ideal(&[(1, 1)]).lct().unwrap(), int(1));
        assert_eq!(ideal(&[(2, 1), (1, 3)]).lct().unwrap(), rat(3, 5));
    }

    #[test]
    fn howald_examples() {
        let a = ideal(&[(8, 0), (3, 2), (0, 4)]);
        assert_eq!(a.multiplier_ideal(&rat(5, 12)).unwrap(), ideal(&[(1, 0), (0, 1)]));
        assert_eq!(a.multiplier_ideal(&rat(2, 5)).unwrap(), MonomialIdeal::unit());
        assert_eq!(ideal(&[(2, 0), (0, 2)]).multiplier_ideal(&int(1)).unwrap(), ideal(&[(1, 0), (0, 1)]));
        assert!(a.multiplier_ideal(&int(0)).is_err());
    }

    #[test]
    fn jumping_examples() {
        let a = ideal(&[(6, 0), (5, 1), (3, 2), (0, 4)]);
        let j = a.jumping_numbers(&int(1)).unwrap();
        assert_eq!(&j[..2], &[rat(5, 12), rat(7, 12)]);
        // the bound is inclusive: 3/2 = 1/2 + 3/3 is a jump of (x^2, y^3)
        assert_eq!(
            ideal(&[(2, 0), (0, 3)]).jumping_numbers(&rat(3, 2)).unwrap(),
            vec![rat(5, 6), rat(7, 6), rat(4, 3), rat(3, 2)]
        );
        assert_eq!(ideal(&[(1, 0), (0, 1)]).jumping_numbers(&int(2)).unwrap(), vec![int(2)]);
    }

    #[test]
    fn staircase_examples() {
        let s2 = triangle(2).unwrap();
        let s1 = triangle(1).unwrap();
        assert_eq!(s2.sum(&s1, Direction::Horizontal).unwrap().rows().unwrap(), vec![3, 1]);
        assert_eq!(s2.sum(&Staircase::empty(), Direction::Horizontal).unwrap(), s2);
        assert_eq!(triangle(1).unwrap().len().unwrap(), 1);
        assert_eq!(triangle(3).unwrap().len().unwrap(), 6);
        assert_eq!(triangle(3).unwrap().rows().unwrap(), vec![3, 2, 1]);
        assert!(triangle(0).is_err());
        let infinite = Staircase::of(ideal(&[(1, 1)]));
        assert!(matches!(infinite.sum(&s1, Direction::Vertical), Err(Error::InfiniteStaircase(_))));
    }
}
