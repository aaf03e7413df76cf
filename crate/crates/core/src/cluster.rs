//! Clusters of infinitely near points.
//!
//! Points are indexed from 0 internally (`P_{α+1}` in the usual 1-based
//! notation) and every point comes after its parent and after the points it
//! is proximate to. The proximity matrix `Π` has rows expressing strict
//! transforms in total transforms: `E_α = W_α - Σ_{P_β ≺ P_α} W_β`, so with
//! row vectors `w = e·Π`, `b = w·Πᵗ` and `k·Π = (1, …, 1)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClusterPoint {
    pub parent: Option<usize>,
    /// Points this one is proximate to; always contains the parent.
    pub prox: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Cluster {
    points: Vec<ClusterPoint>,
}

impl Cluster {
    /// Validates the points; proximity lists are reordered parent first.
    pub fn new(mut points: Vec<ClusterPoint>) -> Result<Self> {
        for p in &mut points {
            if let Some(par) = p.parent {
                p.prox.sort_by_key(|&t| (t != par, t));
            }
        }
        for (i, p) in points.iter().enumerate() {
            let bad = |msg: String| Err(Error::InvalidCluster(format!("P{}: {msg}", i + 1)));
            match p.parent {
                None if i == 0 => {
                    if !p.prox.is_empty() {
                        return bad("the proper point is proximate to nothing".into());
                    }
                    continue;
                }
                None => return bad("only the first point may be proper".into()),
                Some(par) if par >= i => return bad("parent must precede the point".into()),
                Some(par) => {
                    let mut prox = p.prox.clone();
                    prox.sort_unstable();
                    prox.dedup();
                    if prox.len() != p.prox.len() || !prox.contains(&par) {
                        return bad("proximity set must contain the parent once".into());
                    }
                    if prox.len() > 2 {
                        return bad("a point is proximate to at most two points".into());
                    }
                    for &t in &prox {
                        if t != par && !is_ancestor(&points, t, par) {
                            return bad(format!("proximate to P{} which is not an ancestor", t + 1));
                        }
                    }
                }
            }
        }
        Ok(Self { points })
    }

    /// The cluster with one proper point.
    pub fn single() -> Self {
        Self { points: vec![ClusterPoint { parent: None, prox: vec![] }] }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ClusterPoint] {
        &self.points
    }

    pub fn parent(&self, i: usize) -> Option<usize> {
        self.points[i].parent
    }

    /// `P_i ≺ P_j`.
    pub fn is_proximate(&self, i: usize, j: usize) -> bool {
        self.points[i].prox.contains(&j)
    }

    pub fn is_satellite(&self, i: usize) -> bool {
        self.points[i].prox.len() == 2
    }

    pub fn is_free(&self, i: usize) -> bool {
        !self.is_satellite(i)
    }

    /// Points proximate to `P_i`.
    pub fn proximate_to(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (i + 1..self.len()).filter(move |&j| self.is_proximate(j, i))
    }

    pub fn children(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (i + 1..self.len()).filter(move |&j| self.points[j].parent == Some(i))
    }

    /// Adds a free point on the exceptional divisor of `parent`.
    pub fn with_free_point(&self, parent: usize) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(ClusterPoint { parent: Some(parent), prox: vec![parent] });
        Self::new(points)
    }

    /// Restriction to an ancestor-closed set of points, renumbered in order.
    pub fn restrict(&self, keep: &[bool]) -> Result<(Self, Vec<usize>)> {
        let mut map = vec![usize::MAX; self.len()];
        let mut kept = Vec::new();
        for i in 0..self.len() {
            if keep[i] {
                map[i] = kept.len();
                kept.push(i);
            }
        }
        let mut points = Vec::with_capacity(kept.len());
        for &i in &kept {
            let p = &self.points[i];
            if p.prox.iter().any(|&t| !keep[t]) {
                return Err(Error::InvalidCluster(format!("restriction drops a point P{} depends on", i + 1)));
            }
            points.push(ClusterPoint { parent: p.parent.map(|t| map[t]), prox: p.prox.iter().map(|&t| map[t]).collect() });
        }
        Ok((Self::new(points)?, kept))
    }

    pub fn proximity_matrix(&self) -> ProximityMatrix {
        let r = self.len();
        let mut rows = vec![vec![0i8; r]; r];
        for (a, row) in rows.iter_mut().enumerate() {
            row[a] = 1;
            for b in self.proximate_to(a) {
                row[b] = -1;
            }
        }
        ProximityMatrix { rows }
    }

    /// `e = w·Π⁻¹`, i.e. `e_α = w_α + Σ_{P_α ≺ P_β} e_β`.
    pub fn total_to_strict(&self, w: &[BigInt]) -> Vec<BigInt> {
        let mut e: Vec<BigInt> = Vec::with_capacity(w.len());
        for (a, wa) in w.iter().enumerate() {
            let mut v = wa.clone();
            for &t in &self.points[a].prox {
                v += &e[t];
            }
            e.push(v);
        }
        e
    }

    /// `w = e·Π`, i.e. `w_β = e_β - Σ_{P_β ≺ P_α} e_α`.
    pub fn strict_to_total(&self, e: &[BigInt]) -> Vec<BigInt> {
        e.iter()
            .enumerate()
            .map(|(b, eb)| {
                let mut v = eb.clone();
                for &t in &self.points[b].prox {
                    v -= &e[t];
                }
                v
            })
            .collect()
    }

    /// `b = w·Πᵗ = w - w̄`.
    pub fn total_to_branch(&self, w: &[BigInt]) -> Vec<BigInt> {
        (0..self.len())
            .map(|a| {
                let mut v = w[a].clone();
                for j in self.proximate_to(a) {
                    v -= &w[j];
                }
                v
            })
            .collect()
    }

    /// Inverse of [`Cluster::total_to_branch`].
    pub fn branch_to_total(&self, b: &[BigInt]) -> Vec<BigInt> {
        let r = self.len();
        let mut w = vec![BigInt::zero(); r];
        for a in (0..r).rev() {
            let mut v = b[a].clone();
            for j in self.proximate_to(a) {
                v += &w[j];
            }
            w[a] = v;
        }
        w
    }

    /// Coefficients `k_α` of the relative canonical divisor in the strict basis.
    pub fn log_discrepancies(&self) -> BasisVector {
        let ones = vec![BigInt::one(); self.len()];
        BasisVector { entries: self.total_to_strict(&ones), basis: Basis::LogDisc }
    }

    pub fn change_basis(&self, v: &BasisVector, target: Basis) -> Result<BasisVector> {
        if v.entries.len() != self.len() {
            return Err(Error::InvalidArgument(format!(
                "vector of length {} on a cluster of {} points",
                v.entries.len(),
                self.len()
            )));
        }
        if v.basis == target {
            return Err(Error::InvalidArgument(format!("vector is already in the {target:?} basis")));
        }
        let total = match v.basis {
            Basis::Total => v.entries.clone(),
            Basis::Strict | Basis::LogDisc => self.strict_to_total(&v.entries),
            Basis::Branch => self.branch_to_total(&v.entries),
        };
        let entries = match target {
            Basis::Total => total,
            Basis::Strict => self.total_to_strict(&total),
            Basis::Branch => self.total_to_branch(&total),
            Basis::LogDisc => {
                return Err(Error::InvalidArgument("LOGDISC is not a conversion target".into()))
            }
        };
        Ok(BasisVector { entries, basis: target })
    }
}

fn is_ancestor(points: &[ClusterPoint], a: usize, mut i: usize) -> bool {
    loop {
        if i == a {
            return true;
        }
        match points[i].parent {
            Some(p) => i = p,
            None => return false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProximityMatrix {
    pub rows: Vec<Vec<i8>>,
}

impl ProximityMatrix {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, a: usize, b: usize) -> i8 {
        self.rows[a][b]
    }

    pub fn to_bigint(&self) -> Vec<Vec<BigInt>> {
        self.rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    /// Exact inverse; integral because `Π` is unipotent upper triangular.
    pub fn inverse(&self) -> Vec<Vec<BigInt>> {
        let r = self.size();
        let mut inv = vec![vec![BigInt::zero(); r]; r];
        // column by column: Π·x = unit_c, back substitution
        for c in 0..r {
            for a in (0..r).rev() {
                let mut v = if a == c { BigInt::one() } else { BigInt::zero() };
                for b in a + 1..r {
                    if self.rows[a][b] != 0 {
                        v -= BigInt::from(self.rows[a][b]) * &inv[b][c];
                    }
                }
                inv[a][c] = v;
            }
        }
        inv
    }
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][k] * &bk[j];
            }
        }
    }
    out
}

pub fn transpose(a: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| (0..n).map(|i| a[i][j].clone()).collect()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Basis {
    /// Coefficients on the total transforms `W_α` (the cluster weights).
    Total,
    /// Coefficients on the strict transforms `E_α`.
    Strict,
    /// Coefficients on the branch basis `B_α`.
    Branch,
    /// The relative canonical divisor in the strict basis.
    LogDisc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisVector {
    pub entries: Vec<BigInt>,
    pub basis: Basis,
}

impl BasisVector {
    pub fn new(entries: Vec<BigInt>, basis: Basis) -> Self {
        Self { entries, basis }
    }

    pub fn from_i64(entries: &[i64], basis: Basis) -> Self {
        Self { entries: entries.iter().map(|&x| BigInt::from(x)).collect(), basis }
    }
}

/// A cluster with weights in the total basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedCluster {
    pub cluster: Cluster,
    pub weights: Vec<i64>,
}

/// Outcome of [`WeightedCluster::lct`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterLct {
    pub value: Rational,
    /// 0-based indices attaining the minimum.
    pub argmin: Vec<usize>,
}

const UNLOADING_CAP: usize = 10_000_000;

impl WeightedCluster {
    pub fn new(cluster: Cluster, weights: Vec<i64>) -> Result<Self> {
        if weights.len() != cluster.len() {
            return Err(Error::InvalidCluster(format!(
                "{} weights for {} points",
                weights.len(),
                cluster.len()
            )));
        }
        Ok(Self { cluster, weights })
    }

    pub fn len(&self) -> usize {
        self.cluster.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cluster.is_empty()
    }

    fn big_weights(&self) -> Vec<BigInt> {
        self.weights.iter().map(|&w| BigInt::from(w)).collect()
    }

    pub fn total(&self) -> BasisVector {
        BasisVector { entries: self.big_weights(), basis: Basis::Total }
    }

    /// Multiplicities `e_α` of the associated divisor along each `E_α`.
    pub fn strict(&self) -> Vec<BigInt> {
        self.cluster.total_to_strict(&self.big_weights())
    }

    /// Excesses `b_α = w_α - w̄_α`.
    pub fn excesses(&self) -> Vec<i64> {
        (0..self.len())
            .map(|a| self.weights[a] - self.cluster.proximate_to(a).map(|j| self.weights[j]).sum::<i64>())
            .collect()
    }

    pub fn is_unloaded(&self) -> bool {
        self.excesses().iter().all(|&b| b >= 0)
    }

    pub fn first_violation(&self) -> Option<usize> {
        self.excesses().iter().position(|&b| b < 0)
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0)
    }

    /// One unloading step at `P_a`.
    pub fn unload_step(&mut self, a: usize) -> Result<()> {
        self.weights[a] = self.weights[a].checked_add(1).ok_or(Error::Overflow("unloading"))?;
        let targets: Vec<usize> = self.cluster.proximate_to(a).collect();
        for j in targets {
            self.weights[j] = self.weights[j].checked_sub(1).ok_or(Error::Overflow("unloading"))?;
        }
        Ok(())
    }

    /// Unloads at the smallest violated point until the proximity relations hold.
    pub fn unload(&self) -> Result<WeightedCluster> {
        self.unload_by(|violated| violated[0]).map(|(k, _)| k)
    }

    /// Unloads choosing the next point among the violated ones with `pick`;
    /// also returns the points unloaded, in order.
    pub fn unload_by(
        &self,
        mut pick: impl FnMut(&[usize]) -> usize,
    ) -> Result<(WeightedCluster, Vec<usize>)> {
        let mut k = self.clone();
        let mut steps = Vec::new();
        loop {
            let violated: Vec<usize> =
                k.excesses().iter().enumerate().filter(|(_, &b)| b < 0).map(|(i, _)| i).collect();
            if violated.is_empty() {
                return Ok((k, steps));
            }
            if steps.len() >= UNLOADING_CAP {
                return Err(Error::UnloadingDiverged(steps.len()));
            }
            let a = pick(&violated);
            debug_assert!(violated.contains(&a));
            k.unload_step(a)?;
            steps.push(a);
        }
    }

    /// `min_α (k_α + 1)/e_α` and the points attaining it.
    pub fn lct(&self) -> Result<ClusterLct> {
        if self.is_zero() {
            return Err(Error::ZeroWeights);
        }
        if let Some(a) = self.first_violation() {
            return Err(Error::ProximityViolation(a + 1));
        }
        let e = self.strict();
        let k = self.cluster.log_discrepancies().entries;
        let mut best: Option<Rational> = None;
        let mut argmin = Vec::new();
        for a in 0..self.len() {
            if !e[a].is_positive() {
                continue;
            }
            let ratio = Rational::new(&k[a] + BigInt::one(), e[a].clone());
            match &best {
                Some(b) if ratio > *b => {}
                Some(b) if ratio == *b => argmin.push(a),
                _ => {
                    best = Some(ratio);
                    argmin = vec![a];
                }
            }
        }
        Ok(ClusterLct { value: best.expect("nonzero weights"), argmin })
    }

    fn require_curve_weights(&self) -> Result<()> {
        if self.is_zero() {
            return Err(Error::ZeroWeights);
        }
        if let Some(a) = self.first_violation() {
            return Err(Error::ProximityViolation(a + 1));
        }
        Ok(())
    }

    /// Unloaded cluster of `𝒥(ξ·C)` for `0 < ξ < 1`.
    pub fn multiplier_cluster(&self, xi: &Rational) -> Result<WeightedCluster> {
        self.require_curve_weights()?;
        if !xi.is_positive() || *xi >= Rational::one() {
            return Err(Error::InvalidArgument(format!("ξ must lie in (0, 1), got {xi}")));
        }
        let e = self.strict();
        let k = self.cluster.log_discrepancies().entries;
        self.multiplier_from(xi, &e, &k)
    }

    fn multiplier_from(&self, xi: &Rational, e: &[BigInt], k: &[BigInt]) -> Result<WeightedCluster> {
        let d: Vec<BigInt> = e
            .iter()
            .zip(k)
            .map(|(ea, ka)| (xi * Rational::from_integer(ea.clone())).floor().to_integer() - ka)
            .collect();
        let v = self.cluster.strict_to_total(&d);
        let weights = v
            .iter()
            .map(|x| i64::try_from(x).map_err(|_| Error::Overflow("multiplier cluster")))
            .collect::<Result<Vec<_>>>()?;
        WeightedCluster::new(self.cluster.clone(), weights)?.unload()
    }

    /// Jumping numbers of the curve in `(0, bound]`, excluding `1`.
    pub fn jumping_numbers(&self, bound: &Rational) -> Result<Vec<Rational>> {
        self.require_curve_weights()?;
        if !bound.is_positive() || *bound > Rational::one() {
            return Err(Error::InvalidArgument(format!("bound must lie in (0, 1], got {bound}")));
        }
        let e = self.strict();
        let k = self.cluster.log_discrepancies().entries;
        // every ξ where some ⌊ξ e_α⌋ changes
        let mut breakpoints = Vec::new();
        for ea in &e {
            if !ea.is_positive() {
                continue;
            }
            let mut n = BigInt::one();
            while n < *ea {
                let c = Rational::new(n.clone(), ea.clone());
                if c > *bound {
                    break;
                }
                breakpoints.push(c);
                n += 1;
            }
        }
        breakpoints.sort();
        breakpoints.dedup();
        let mut previous = WeightedCluster::new(self.cluster.clone(), vec![0; self.len()])?;
        let mut out = Vec::new();
        for c in breakpoints {
            let current = self.multiplier_from(&c, &e, &k)?;
            if current != previous {
                out.push(c);
            }
            previous = current;
        }
        Ok(out)
    }

    /// Candidate jumping numbers `(k_α + j)/e_α`, `j >= 1`, up to `bound`.
    pub fn jumping_candidates(&self, bound: &Rational) -> Vec<Rational> {
        let e = self.strict();
        let k = self.cluster.log_discrepancies().entries;
        let mut out = Vec::new();
        for (ea, ka) in e.iter().zip(&k) {
            if !ea.is_positive() {
                continue;
            }
            let mut j = BigInt::one();
            loop {
                let c = Rational::new(ka + &j, ea.clone());
                if c > *bound {
                    break;
                }
                out.push(c);
                j += 1;
            }
        }
        out.sort();
        out.dedup();
        out
    }
}

/// JSON form: `{"points":[{"id":1,"parent":null,"prox":[]},…],"weights":[…]}`, 1-based ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub points: Vec<PointJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointJson {
    pub id: usize,
    pub parent: Option<usize>,
    pub prox: Vec<usize>,
}

impl From<&Cluster> for ClusterJson {
    fn from(c: &Cluster) -> Self {
        ClusterJson {
            points: c
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| PointJson {
                    id: i + 1,
                    parent: p.parent.map(|t| t + 1),
                    prox: p.prox.iter().map(|&t| t + 1).collect(),
                })
                .collect(),
            weights: None,
        }
    }
}

impl From<&WeightedCluster> for ClusterJson {
    fn from(k: &WeightedCluster) -> Self {
        let mut j = ClusterJson::from(&k.cluster);
        j.weights = Some(k.weights.clone());
        j
    }
}

impl ClusterJson {
    pub fn to_cluster(&self) -> Result<Cluster> {
        let mut points = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if p.id != i + 1 {
                return Err(Error::InvalidCluster(format!("ids must be 1, 2, … in order; found {}", p.id)));
            }
            let shift = |t: usize| {
                t.checked_sub(1).ok_or_else(|| Error::InvalidCluster("ids are 1-based".into()))
            };
            points.push(ClusterPoint {
                parent: p.parent.map(shift).transpose()?,
                prox: p.prox.iter().map(|&t| shift(t)).collect::<Result<_>>()?,
            });
        }
        Cluster::new(points)
    }

    pub fn to_weighted(&self) -> Result<WeightedCluster> {
        let cluster = self.to_cluster()?;
        let weights = self
            .weights
            .clone()
            .ok_or_else(|| Error::InvalidCluster("missing \"weights\"".into()))?;
        WeightedCluster::new(cluster, weights)
    }
}
