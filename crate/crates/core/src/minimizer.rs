//! Minimal tuples: integer tuples `(n_1, ..., n_s)` with prescribed weight
//! `sum n_i d_i` and least square-sum `sum n_i^2`.
//!
//! For every residue `0 <= r < a` the minimal tuples give `S_r`, `m_r` and
//! `eps_r = S_r - r^2/a`; shifting them by multiples of the degree vector
//! gives the minimal tuples for every `n = k*a + r`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::profiles::DegreeProfile;
use crate::ResourceLimit;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinimizerError {
    #[error("tuple has {found} entries but the profile has {expected} coordinates")]
    LengthMismatch { expected: usize, found: usize },
    #[error("residue {r} is outside [0, {order})")]
    Range { r: u64, order: u64 },
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
}

/// Ordered integer tuple aligned with the coordinates of a [`DegreeProfile`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntTuple(pub Vec<i64>);

impl IntTuple {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn square_sum(&self) -> u128 {
        self.0
            .iter()
            .map(|&x| (x as i128 * x as i128) as u128)
            .sum()
    }

    /// All entries non-negative.
    pub fn is_eligible(&self) -> bool {
        self.0.iter().all(|&x| x >= 0)
    }
}

impl From<Vec<i64>> for IntTuple {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl fmt::Display for IntTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All minimal tuples for one residue `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalReport {
    pub r: u64,
    /// Lexicographically sorted.
    pub tuples: Vec<IntTuple>,
    pub s_r: u64,
    pub eps_r: BigRational,
}

impl MinimalReport {
    pub fn m_r(&self) -> usize {
        self.tuples.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StabilityBound {
    pub b: u64,
    /// `N = b * a`.
    pub n_threshold: u64,
}

/// Minimal tuples for an arbitrary `n`, obtained by lifting those of `n mod a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedMinimal {
    pub n: u64,
    pub k: u64,
    pub r: u64,
    pub tuples: Vec<IntTuple>,
    pub square_sum: u128,
    /// Every lifted tuple has non-negative entries.
    pub all_eligible: bool,
}

fn check_len(p: &DegreeProfile, t: &IntTuple) -> Result<(), MinimizerError> {
    if t.len() == p.len() {
        Ok(())
    } else {
        Err(MinimizerError::LengthMismatch {
            expected: p.len(),
            found: t.len(),
        })
    }
}

/// `sum n_i d_i`.
pub fn weight(t: &IntTuple, p: &DegreeProfile) -> Result<i64, MinimizerError> {
    check_len(p, t)?;
    Ok(t.0
        .iter()
        .zip(p.degrees())
        .map(|(&x, &d)| x * d as i64)
        .sum())
}

struct Search {
    degrees: Vec<i64>,
    /// Coordinates in decreasing-degree order.
    order: Vec<usize>,
    /// `tail_sq[k]` = sum of squared degrees over `order[k..]`.
    tail_sq: Vec<i128>,
    best: i128,
    found: Vec<Vec<i64>>,
    current: Vec<i64>,
    nonnegative: bool,
}

impl Search {
    fn new(p: &DegreeProfile, target: i64, nonnegative: bool) -> Self {
        let degrees: Vec<i64> = p.degrees().iter().map(|&d| d as i64).collect();
        let mut order: Vec<usize> = (0..degrees.len()).collect();
        order.sort_by(|&i, &j| degrees[j].cmp(&degrees[i]).then(i.cmp(&j)));
        let mut tail_sq = vec![0i128; order.len() + 1];
        for k in (0..order.len()).rev() {
            let d = degrees[order[k]] as i128;
            tail_sq[k] = tail_sq[k + 1] + d * d;
        }
        Self {
            current: vec![0; degrees.len()],
            degrees,
            order,
            tail_sq,
            // (target, 0, ..., 0) is admissible because d_1 = 1
            best: target as i128 * target as i128,
            found: Vec::new(),
            nonnegative,
        }
    }

    fn record(&mut self, cost: i128) {
        if cost < self.best {
            self.best = cost;
            self.found.clear();
        }
        if cost == self.best {
            self.found.push(self.current.clone());
        }
    }

    fn dfs(&mut self, level: usize, remaining: i64, cost: i128) {
        let idx = self.order[level];
        let d = self.degrees[idx];
        let rest_sq = self.tail_sq[level + 1];
        if rest_sq == 0 {
            if remaining % d == 0 && !(self.nonnegative && remaining < 0) {
                let v = remaining / d;
                let total = cost + v as i128 * v as i128;
                if total <= self.best {
                    self.current[idx] = v;
                    self.record(total);
                    self.current[idx] = 0;
                }
            }
            return;
        }
        // Cheapest completion from value v: v^2 + (remaining - v d)^2 / rest_sq
        // (the real relaxation). Convex in v and symmetric about
        // remaining * d / tail_sq, so scan outward from the nearest integer
        // and stop each direction at the first value that cannot tie.
        let full_sq = self.tail_sq[level];
        let mut center = div_round(remaining as i128 * d as i128, full_sq) as i64;
        let floor = if self.nonnegative { 0 } else { i64::MIN };
        center = center.max(floor);
        let feasible = |v: i64, best: i128| {
            let left = remaining as i128 - v as i128 * d as i128;
            (cost + v as i128 * v as i128) * rest_sq + left * left <= best * rest_sq
        };
        let mut v = center;
        while feasible(v, self.best) {
            self.descend(level, idx, v, d, remaining, cost);
            v += 1;
        }
        let mut v = center - 1;
        while v >= floor && feasible(v, self.best) {
            self.descend(level, idx, v, d, remaining, cost);
            v -= 1;
        }
    }

    fn descend(&mut self, level: usize, idx: usize, v: i64, d: i64, remaining: i64, cost: i128) {
        self.current[idx] = v;
        self.dfs(level + 1, remaining - v * d, cost + v as i128 * v as i128);
        self.current[idx] = 0;
    }
}

/// Round-half-up of `num / den` for `den > 0`.
fn div_round(num: i128, den: i128) -> i128 {
    (2 * num + den).div_euclid(2 * den)
}

/// Branch-and-bound search for every tuple of the given weight with least
/// square-sum. Returns the tuples (sorted) and the minimum.
pub fn search_minimal(p: &DegreeProfile, target: u64) -> (Vec<IntTuple>, u128) {
    run_search(p, target, false)
}

/// Like [`search_minimal`], restricted to eligible (non-negative) tuples.
/// These index the orbits of largest size among those that actually occur.
pub fn search_minimal_eligible(p: &DegreeProfile, target: u64) -> (Vec<IntTuple>, u128) {
    run_search(p, target, true)
}

fn run_search(p: &DegreeProfile, target: u64, nonnegative: bool) -> (Vec<IntTuple>, u128) {
    let mut search = Search::new(p, target as i64, nonnegative);
    search.dfs(0, target as i64, 0);
    let best = search.best as u128;
    let mut tuples: Vec<IntTuple> = search.found.into_iter().map(IntTuple).collect();
    tuples.sort();
    tuples.dedup();
    (tuples, best)
}

/// `S - r^2/a` as an exact rational.
pub(crate) fn defect(square_sum: u64, r: u64, a: u64) -> BigRational {
    let s = BigRational::from_integer(BigInt::from(square_sum));
    let r = BigInt::from(r);
    s - BigRational::new(&r * &r, BigInt::from(a))
}

fn check_residue(p: &DegreeProfile, r: u64) -> Result<(), MinimizerError> {
    if r < p.order() {
        Ok(())
    } else {
        Err(MinimizerError::Range {
            r,
            order: p.order(),
        })
    }
}

/// All minimal tuples for residue `r`, with `S_r`, `m_r` and `eps_r`.
pub fn minimal_tuples(p: &DegreeProfile, r: u64) -> Result<MinimalReport, MinimizerError> {
    check_residue(p, r)?;
    let (tuples, s) = search_minimal(p, r);
    let s_r = s as u64;
    Ok(MinimalReport {
        r,
        tuples,
        s_r,
        eps_r: defect(s_r, r, p.order()),
    })
}

/// `eps_r = S_r - r^2/a`.
pub fn epsilon(p: &DegreeProfile, r: u64) -> Result<BigRational, MinimizerError> {
    Ok(minimal_tuples(p, r)?.eps_r)
}

/// Minimal reports for every residue `0..a`, in ascending order. Residues
/// are searched in parallel.
pub fn minimal_table(p: &DegreeProfile) -> Vec<MinimalReport> {
    (0..p.order())
        .into_par_iter()
        .map(|r| minimal_tuples(p, r).expect("residue in range"))
        .collect()
}

/// Smallest `b >= 0` with `b d_i + r_i >= 0` for every entry of every
/// minimal tuple in `table`.
pub fn stability_bound_from(p: &DegreeProfile, table: &[MinimalReport]) -> StabilityBound {
    let b = table
        .iter()
        .flat_map(|rep| rep.tuples.iter())
        .flat_map(|t| t.0.iter().copied().zip(p.degrees().iter().copied()))
        .filter(|&(x, _)| x < 0)
        .map(|(x, d)| (x.unsigned_abs()).div_ceil(d))
        .max()
        .unwrap_or(0);
    StabilityBound {
        b,
        n_threshold: b * p.order(),
    }
}

pub fn stability_bound(p: &DegreeProfile) -> StabilityBound {
    stability_bound_from(p, &minimal_table(p))
}

/// `(k d_1 + r_1, ..., k d_s + r_s)`.
pub fn lift_minimal(
    p: &DegreeProfile,
    residue_tuple: &IntTuple,
    k: u64,
) -> Result<IntTuple, MinimizerError> {
    check_len(p, residue_tuple)?;
    let k = k as i64;
    Ok(IntTuple(
        residue_tuple
            .0
            .iter()
            .zip(p.degrees())
            .map(|(&x, &d)| k * d as i64 + x)
            .collect(),
    ))
}

/// Minimal tuples for `n`, by lifting the minimal tuples of `n mod a`.
pub fn minimal_tuples_for_n(p: &DegreeProfile, n: u64) -> LiftedMinimal {
    let rep = minimal_tuples(p, n % p.order()).expect("residue in range");
    lift_report(p, n, &rep)
}

pub(crate) fn lift_report(p: &DegreeProfile, n: u64, rep: &MinimalReport) -> LiftedMinimal {
    let a = p.order();
    let (k, r) = (n / a, n % a);
    debug_assert_eq!(rep.r, r);
    let tuples: Vec<IntTuple> = rep
        .tuples
        .iter()
        .map(|t| lift_minimal(p, t, k).expect("report tuples match the profile"))
        .collect();
    let all_eligible = tuples.iter().all(IntTuple::is_eligible);
    let (k128, a128, r128) = (k as u128, a as u128, r as u128);
    LiftedMinimal {
        n,
        k,
        r,
        tuples,
        square_sum: k128 * k128 * a128 + 2 * k128 * r128 + rep.s_r as u128,
        all_eligible,
    }
}

/// `reachable[k][w]`: weight `w` is a non-negative combination of the
/// degrees at coordinates `k..`.
fn reachability(degrees: &[u64], n: usize) -> Vec<Vec<bool>> {
    let s = degrees.len();
    let mut reach = vec![vec![false; n + 1]; s + 1];
    reach[s][0] = true;
    for k in (0..s).rev() {
        let d = degrees[k] as usize;
        for w in 0..=n {
            reach[k][w] = reach[k + 1][w] || (w >= d && reach[k][w - d]);
        }
    }
    reach
}

/// Number of eligible tuples for `n` (saturating).
pub fn count_eligible(p: &DegreeProfile, n: u64) -> u128 {
    let n = n as usize;
    let mut ways = vec![0u128; n + 1];
    ways[0] = 1;
    for &d in p.degrees() {
        let d = d as usize;
        for w in d..=n {
            ways[w] = ways[w].saturating_add(ways[w - d]);
        }
    }
    ways[n]
}

/// Every non-negative solution of `sum n_i d_i = n`, in lexicographic order.
pub fn eligible_tuples(p: &DegreeProfile, n: u64) -> Vec<IntTuple> {
    let reach = reachability(p.degrees(), n as usize);
    let mut out = Vec::new();
    let mut current = vec![0i64; p.len()];
    fn walk(
        degrees: &[u64],
        reach: &[Vec<bool>],
        k: usize,
        remaining: usize,
        current: &mut Vec<i64>,
        out: &mut Vec<IntTuple>,
    ) {
        if k == degrees.len() {
            out.push(IntTuple(current.clone()));
            return;
        }
        let d = degrees[k] as usize;
        let mut v = 0;
        while v * d <= remaining {
            if reach[k + 1][remaining - v * d] {
                current[k] = v as i64;
                walk(degrees, reach, k + 1, remaining - v * d, current, out);
            }
            v += 1;
        }
        current[k] = 0;
    }
    walk(p.degrees(), &reach, 0, n as usize, &mut current, &mut out);
    out
}

/// [`eligible_tuples`], refusing when there would be more than `max` tuples.
pub fn eligible_tuples_limited(
    p: &DegreeProfile,
    n: u64,
    max: u128,
) -> Result<Vec<IntTuple>, ResourceLimit> {
    let needed = count_eligible(p, n);
    if needed > max {
        return Err(ResourceLimit {
            what: "eligible tuples",
            needed,
            limit: max,
        });
    }
    Ok(eligible_tuples(p, n))
}
