//! Continued-fraction data of `T_{p,q}` and the branch-basis computations
//! behind the unibranch inequality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cluster::{mat_mul, transpose, Cluster};
use crate::enriques::{EnriquesDiagram, EnriquesTree};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Euclid's algorithm on `(q, p)` with the auxiliary sequences `f` and `δ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EuclidData {
    pub p: i64,
    pub q: i64,
    /// Quotients `a_1 … a_m`.
    pub a: Vec<i64>,
    /// Remainders `r_1 … r_m` (`r_0 = q`, `r_1 = p`, `r_{m+1} = 0`).
    pub r: Vec<i64>,
    /// `f_{-1} … f_m`.
    pub f: Vec<i64>,
    /// `δ_0 … δ_{m+1}`.
    pub delta: Vec<i64>,
}

pub fn euclid_data(p: i64, q: i64) -> Result<EuclidData> {
    if p < 1 || p >= q || p.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!("need coprime 1 <= p < q, got ({p}, {q})")));
    }
    let mut a = Vec::new();
    let mut r = Vec::new();
    let (mut prev, mut cur) = (q, p);
    while cur != 0 {
        a.push(prev / cur);
        r.push(cur);
        (prev, cur) = (cur, prev % cur);
    }
    let m = a.len();
    let mut f = vec![0i64; m + 2];
    let mut delta = vec![0i64; m + 2];
    delta[0] = 1;
    delta[1] = 1;
    // f[j + 1] holds f_j; a[j - 1] holds a_j
    for j in 1..=m + 1 {
        if j >= 2 {
            delta[j] = delta[j - 2] + a[j - 2] * f[j - 1];
        }
        if j <= m {
            f[j + 1] = f[j - 1] + a[j - 1] * delta[j];
        }
    }
    Ok(EuclidData { p, q, a, r, f, delta })
}

impl EuclidData {
    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// `f_j` for `-1 <= j <= m`.
    pub fn f(&self, j: i64) -> i64 {
        self.f[(j + 1) as usize]
    }

    /// `δ_j` for `0 <= j <= m + 1`.
    pub fn delta(&self, j: i64) -> i64 {
        self.delta[j as usize]
    }

    /// `a_j` for `1 <= j <= m`.
    pub fn a(&self, j: i64) -> i64 {
        self.a[(j - 1) as usize]
    }

    /// `r_j` for `0 <= j <= m + 1`.
    pub fn r(&self, j: i64) -> i64 {
        match j {
            0 => self.q,
            j if j as usize == self.m() + 1 => 0,
            j => self.r[(j - 1) as usize],
        }
    }

    /// Number of vertices of `T_{p,q}`.
    pub fn vertices(&self) -> i64 {
        self.a.iter().sum()
    }

    /// Checks the recurrences, the remainder formula and the terminal values.
    pub fn check(&self) -> Result<()> {
        let m = self.m() as i64;
        let fail = |what: String| Err(Error::InvalidArgument(format!("({}, {}): {what}", self.p, self.q)));
        if self.f(-1) != 0 || self.f(0) != 0 || self.delta(0) != 1 || self.delta(1) != 1 {
            return fail("initial values".into());
        }
        for j in 1..=m {
            if self.f(j) != self.f(j - 2) + self.a(j) * self.delta(j) {
                return fail(format!("f_{j}"));
            }
            let r = if j % 2 == 1 {
                -self.f(j - 1) * self.q + self.delta(j) * self.p
            } else {
                self.delta(j) * self.q - self.f(j - 1) * self.p
            };
            if r != self.r(j) {
                return fail(format!("r_{j}"));
            }
            if self.r(j - 1) != self.a(j) * self.r(j) + self.r(j + 1) {
                return fail(format!("division step {j}"));
            }
        }
        for j in 2..=m + 1 {
            if self.delta(j) != self.delta(j - 2) + self.a(j - 1) * self.f(j - 2) {
                return fail(format!("δ_{j}"));
            }
        }
        let (fm, dm) = if m % 2 == 1 { (self.q, self.p) } else { (self.p, self.q) };
        if self.f(m) != fm || self.delta(m + 1) != dm {
            return fail("terminal values".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchCoefficients {
    /// `e_r(B_α)`, the multiplicity of the last strict transform in `B_α`.
    pub e_r: i64,
    /// `w_1(B_α)` where the closed form applies (`None` for `α = 1`).
    pub w_1: Option<i64>,
}

/// Closed forms for `e_r(B_α)` and `w_1(B_α)` on `T_{p,q}`, `α` 1-based.
pub fn branch_coefficients(p: i64, q: i64, alpha: i64) -> Result<BranchCoefficients> {
    let d = euclid_data(p, q)?;
    let m = d.m() as i64;
    if alpha < 1 || alpha > d.vertices() {
        return Err(Error::InvalidArgument(format!("α = {alpha} outside 1..={}", d.vertices())));
    }
    let mut start = 0;
    let mut e_r = None;
    let mut w_1 = None;
    for j in 1..=m {
        let k = alpha - start;
        let aj = d.a(j);
        if (1..=aj).contains(&k) && e_r.is_none() {
            let factor = if j % 2 == 1 { p } else { q };
            e_r = Some((d.f(j - 2) + k * d.delta(j)) * factor);
        }
        let top = if j < m { aj + 1 } else { aj };
        if (2..=top).contains(&k) && w_1.is_none() {
            w_1 = Some(if j % 2 == 1 {
                d.delta(j - 1) + k * d.f(j - 1)
            } else {
                d.f(j - 2) + k * d.delta(j)
            });
        }
        start += aj;
    }
    Ok(BranchCoefficients { e_r: e_r.expect("α is in range"), w_1 })
}

/// `(Π Πᵗ)⁻¹`; row `α` holds the strict multiplicities `e_β(B_α)`.
pub fn branch_strict_matrix(c: &Cluster) -> Vec<Vec<BigInt>> {
    let inv = c.proximity_matrix().inverse();
    mat_mul(&transpose(&inv), &inv)
}

/// `(Πᵗ)⁻¹`; row `α` holds the total weights `w_β(B_α)`.
pub fn branch_total_matrix(c: &Cluster) -> Vec<Vec<BigInt>> {
    transpose(&c.proximity_matrix().inverse())
}

/// Total weights of the branch divisor `B_α` (0-based `α`).
pub fn branch_total(c: &Cluster, alpha: usize) -> Vec<BigInt> {
    let mut b = vec![BigInt::zero(); c.len()];
    b[alpha] = BigInt::one();
    c.branch_to_total(&b)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityRow {
    /// 1-based index of the branch divisor.
    pub alpha: usize,
    #[serde(with = "crate::rational::serde_fraction")]
    pub at_junction: Rational,
    #[serde(with = "crate::rational::serde_fraction")]
    pub at_end: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    /// Vertices of `t`; the junction is vertex `r`.
    pub r: usize,
    /// Vertices of the connected sum.
    pub s: usize,
    pub rows: Vec<InequalityRow>,
    pub holds: bool,
}

/// For `S = t # T_{p',q'}`, compares `e_r(B_α)/(k_r+1)` with
/// `e_s(B_α)/(k_s+1)` for every `α`, using the exact inverse of `Π_S Π_Sᵗ`.
pub fn verify_main_inequality(t: &EnriquesTree, p2: i64, q2: i64) -> Result<InequalityReport> {
    if !t.is_unibranch() || (1..t.len()).any(|i| t.parent(i) != Some(i - 1)) {
        return Err(Error::Precondition("t must be a path numbered from the root".into()));
    }
    if (0..t.len()).all(|i| t.is_free(i)) {
        return Err(Error::Precondition("t has no proper L-shaped branch".into()));
    }
    if q2 < 2 {
        return Err(Error::Precondition(format!("need q' >= 2, got {q2}")));
    }
    let tail = EnriquesDiagram::t_pq(p2, q2)?.tree;
    let sum = t.connected_sum(&tail)?;
    Ok(inequality_table(&sum.to_cluster(), t.len()))
}

/// The ratio table for a cluster with junction at 1-based vertex `r`.
pub fn inequality_table(c: &Cluster, r: usize) -> InequalityReport {
    let s = c.len();
    let m = branch_strict_matrix(c);
    let k = c.log_discrepancies().entries;
    let rows: Vec<InequalityRow> = (0..s)
        .map(|a| {
            let at_junction = Rational::new(m[a][r - 1].clone(), &k[r - 1] + 1);
            let at_end = Rational::new(m[a][s - 1].clone(), &k[s - 1] + 1);
            let holds = at_junction > at_end;
            InequalityRow { alpha: a + 1, at_junction, at_end, holds }
        })
        .collect();
    let holds = rows.iter().all(|row| row.holds);
    InequalityReport { r, s, rows, holds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enriques::EdgeKind;
    use proptest::prelude::*;

    fn coprime_pairs(max_q: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for q in 2..=max_q {
            for p in 1..q {
                if p.gcd(&q) == 1 {
                    out.push((p, q));
                }
            }
        }
        out
    }

    #[test]
    fn euclid_examples() {
        let d = euclid_data(5, 7).unwrap();
        assert_eq!(d.a, vec![1, 2, 2]);
        assert_eq!(d.f, vec![0, 0, 1, 2, 7]);
        assert_eq!(d.delta, vec![1, 1, 1, 3, 5]);
        assert_eq!((d.f(3), d.delta(4)), (7, 5));
        let d = euclid_data(1, 2).unwrap();
        assert_eq!(d.a, vec![2]);
        assert_eq!((d.f(1), d.delta(2)), (2, 1));
        let d = euclid_data(1, 9).unwrap();
        assert_eq!(d.a, vec![9]);
        assert!(d.delta.iter().all(|&x| x == 1));
        assert!(euclid_data(2, 4).is_err());
        assert!(euclid_data(3, 3).is_err());
    }

    #[test]
    fn euclid_invariants_hold() {
        for (p, q) in coprime_pairs(40) {
            euclid_data(p, q).unwrap().check().unwrap();
        }
    }

    #[test]
    fn branch_coefficient_examples() {
        assert_eq!(branch_coefficients(5, 7, 5).unwrap(), BranchCoefficients { e_r: 35, w_1: Some(5) });
        assert_eq!(branch_coefficients(5, 7, 1).unwrap().e_r, 5);
        assert_eq!(branch_coefficients(5, 7, 1).unwrap().w_1, None);
        assert!(branch_coefficients(5, 7, 6).is_err());
        assert!(branch_coefficients(5, 7, 0).is_err());
    }

    #[test]
    fn branch_coefficients_match_matrices() {
        for (p, q) in coprime_pairs(12) {
            let c = EnriquesDiagram::t_pq(p, q).unwrap().tree.to_cluster();
            let strict = branch_strict_matrix(&c);
            let total = branch_total_matrix(&c);
            let r = c.len();
            for a in 0..r {
                let closed = branch_coefficients(p, q, a as i64 + 1).unwrap();
                assert_eq!(strict[a][r - 1], BigInt::from(closed.e_r), "e_r(B_{}) for ({p},{q})", a + 1);
                if let Some(w) = closed.w_1 {
                    assert_eq!(total[a][0], BigInt::from(w), "w_1(B_{}) for ({p},{q})", a + 1);
                }
                assert_eq!(total[a], branch_total(&c, a));
            }
            // w_1(B_r) = p and e_r(B_r) = pq
            assert_eq!(total[r - 1][0], BigInt::from(p));
            assert_eq!(strict[r - 1][r - 1], BigInt::from(p * q));
        }
    }

    #[test]
    fn main_inequality_examples() {
        let t23 = EnriquesDiagram::t_pq(2, 3).unwrap().tree;
        let rep = verify_main_inequality(&t23, 2, 3).unwrap();
        assert_eq!(rep.rows.len(), 5);
        assert!(rep.holds);
        let t57 = EnriquesDiagram::t_pq(5, 7).unwrap().tree;
        assert!(verify_main_inequality(&t57, 1, 2).unwrap().holds);
        let t14 = EnriquesDiagram::t_pq(1, 4).unwrap().tree;
        assert!(matches!(verify_main_inequality(&t14, 2, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn mirrored_tail_gives_the_same_matrix() {
        for (p, q) in coprime_pairs(8).into_iter().filter(|&(p, _)| p >= 2) {
            let t = EnriquesDiagram::t_pq(p, q).unwrap().tree;
            for (p2, q2) in coprime_pairs(8) {
                let tail = EnriquesDiagram::t_pq(p2, q2).unwrap().tree;
                let sum = t.connected_sum(&tail).unwrap();
                let mirrored = sum.mirror_subtree(t.len()).unwrap_or_else(|_| sum.clone());
                assert_eq!(sum.to_cluster(), mirrored.to_cluster());
            }
        }
    }

    fn chain_strategy() -> impl Strategy<Value = EnriquesTree> {
        prop::collection::vec(0u8..3, 0..8).prop_map(|choices| {
            let mut kinds = Vec::new();
            for c in choices {
                let k = if kinds.is_empty() {
                    EdgeKind::Slant
                } else {
                    [EdgeKind::Slant, EdgeKind::Horizontal, EdgeKind::Vertical][c as usize]
                };
                kinds.push(k);
            }
            EnriquesTree::chain(&kinds).unwrap()
        })
    }

    proptest! {
        #[test]
        fn decomposition_of_branch_divisors(t in chain_strategy(), pick in 0usize..1000) {
            let pairs = coprime_pairs(9);
            let (p2, q2) = pairs[pick % pairs.len()];
            let tail = EnriquesDiagram::t_pq(p2, q2).unwrap().tree;
            let s = t.connected_sum(&tail).unwrap().to_cluster();
            let tc = tail.to_cluster();
            let r = t.len();
            let br = branch_total(&s, r - 1);
            for beta in 0..tc.len() {
                let wt = branch_total(&tc, beta);
                let mut rhs: Vec<BigInt> = br.iter().map(|x| x * &wt[0]).collect();
                rhs[r - 1] -= &wt[0];
                for (a2, w) in wt.iter().enumerate() {
                    rhs[r - 1 + a2] += w;
                }
                prop_assert_eq!(branch_total(&s, r - 1 + beta), rhs);
            }
        }
    }
}
