//! Orbit polynomials, the full count `f_n(q) = |Hom(A, GL_n(q))|`, and its
//! leading term.
//!
//! Conjugation orbits of `Hom(A, GL_n(q))` are indexed by eligible tuples
//! `(n_1, ..., n_s)`. The stabilizer of the orbit for a tuple is
//! `prod GL_{n_i}(q)`, so the orbit has `|GL_n(q)| / prod |GL_{n_i}(q)|`
//! points, a monic polynomial of degree `n^2 - sum n_i^2`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use thiserror::Error;

use crate::exactpoly::{gl_order_poly, IntPolynomial, PolyError};
use crate::minimizer::{
    self, lift_report, minimal_table, search_minimal_eligible, stability_bound_from, weight,
    IntTuple, LiftedMinimal, MinimalReport, MinimizerError, StabilityBound,
};
use crate::profiles::DegreeProfile;
use crate::ResourceLimit;

/// Default cap on the number of eligible tuples (orbits) summed by
/// [`hom_count_poly`].
pub const DEFAULT_MAX_TUPLES: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("tuple {0} has a negative entry")]
    IneligibleTuple(IntTuple),
    #[error(transparent)]
    Minimizer(#[from] MinimizerError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error("n = {n} is below the stability threshold N = {threshold}")]
    UnstableRegime { n: u64, threshold: u64 },
}

/// `q^j - 1`
fn q_pow_minus_one(j: usize) -> IntPolynomial {
    let mut c = vec![BigInt::from(0); j + 1];
    c[0] = BigInt::from(-1);
    c[j] = BigInt::from(1);
    IntPolynomial::from_coeffs(c)
}

/// `|GL_n| / prod |GL_{n_i}|` for the multiplicities `parts` (sorted
/// descending, zeros dropped) of an `n`-dimensional module.
///
/// With `c = n - sum n_i` this equals
/// `q^e * [n; n_1, ..., n_k, c]_q * prod_{j=1}^{c} (q^j - 1)`, where
/// `e = C(n,2) - sum C(n_i,2)`. The q-multinomial is built from Gaussian
/// binomials one factor at a time; every partial quotient is a polynomial,
/// so each division by `q^j - 1` is exact.
fn orbit_poly_from_parts(n: u64, parts: &[u64]) -> Result<IntPolynomial, PolyError> {
    let used: u64 = parts.iter().sum();
    debug_assert!(used <= n);
    let leftover = n - used;
    let mut acc = IntPolynomial::one();
    let mut filled = 0u64;
    for &k in parts.iter().chain(std::iter::once(&leftover)) {
        // multiply by [filled + k choose k]_q
        for j in 1..=k {
            let num = q_pow_minus_one((filled + j) as usize);
            acc = (&acc * &num).div_exact(&q_pow_minus_one(j as usize))?;
        }
        filled += k;
    }
    for j in 1..=leftover {
        acc = &acc * &q_pow_minus_one(j as usize);
    }
    let pairs = |m: u64| m * m.saturating_sub(1) / 2;
    let e = pairs(n) - parts.iter().map(|&k| pairs(k)).sum::<u64>();
    Ok(acc.shift(e as usize))
}

/// Dimension `n` and the sorted nonzero multiplicities of an eligible tuple.
fn eligible_parts(p: &DegreeProfile, t: &IntTuple) -> Result<(u64, Vec<u64>), CountingError> {
    let n = weight(t, p)?;
    if !t.is_eligible() {
        return Err(CountingError::IneligibleTuple(t.clone()));
    }
    let mut parts: Vec<u64> = t.0.iter().filter(|&&x| x > 0).map(|&x| x as u64).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    Ok((n as u64, parts))
}

/// Size of the conjugation orbit indexed by the eligible tuple `t`.
pub fn orbit_poly(p: &DegreeProfile, t: &IntTuple) -> Result<IntPolynomial, CountingError> {
    let (n, parts) = eligible_parts(p, t)?;
    Ok(orbit_poly_from_parts(n, &parts)?)
}

/// The same orbit size by the direct route: `|GL_n|` divided exactly by
/// `prod |GL_{n_i}|`. Quadratic in the degree; used for cross-checks.
pub fn orbit_poly_by_division(
    p: &DegreeProfile,
    t: &IntTuple,
) -> Result<IntPolynomial, CountingError> {
    let (n, parts) = eligible_parts(p, t)?;
    let stabilizer = parts.iter().fold(IntPolynomial::one(), |acc, &k| {
        acc * gl_order_poly(k as usize)
    });
    Ok(gl_order_poly(n as usize).div_exact(&stabilizer)?)
}

/// `f_n` with the default tuple cap.
pub fn hom_count_poly(p: &DegreeProfile, n: u64) -> Result<IntPolynomial, CountingError> {
    hom_count_poly_limited(p, n, DEFAULT_MAX_TUPLES)
}

/// `f_n(q) = |Hom(A, GL_n(q))|` as the sum of all orbit polynomials.
///
/// Tuples that are permutations of one another have the same orbit size, so
/// each distinct multiset of parts is computed once (in parallel) and
/// weighted by its multiplicity.
pub fn hom_count_poly_limited(
    p: &DegreeProfile,
    n: u64,
    max_tuples: u128,
) -> Result<IntPolynomial, CountingError> {
    let tuples = minimizer::eligible_tuples_limited(p, n, max_tuples)?;
    let mut multiplicity: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for t in &tuples {
        *multiplicity.entry(eligible_parts(p, t)?.1).or_default() += 1;
    }
    let orbits: Vec<(IntPolynomial, u64)> = multiplicity
        .into_par_iter()
        .map(|(parts, mult)| orbit_poly_from_parts(n, &parts).map(|poly| (poly, mult)))
        .collect::<Result<_, _>>()?;
    Ok(orbits
        .into_iter()
        .map(|(poly, mult)| &poly * &IntPolynomial::constant(mult))
        .sum())
}

/// Leading term `m_r q^(n^2(1 - 1/a) - eps_r)` of `f_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingTerm {
    /// `m_r`.
    pub coefficient: u64,
    pub exponent: u128,
    pub n: u64,
    pub r: u64,
    pub s_r: u64,
    pub eps_r: BigRational,
    /// `n >= N`; below the threshold the values are the formula's, not
    /// necessarily the true leading term of `f_n`.
    pub stable: bool,
    pub threshold: u64,
}

/// The true leading term of `f_n` for any `n`: the orbits of largest size
/// come from the eligible tuples of least square-sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EligibleLeading {
    pub coefficient: u64,
    pub exponent: u128,
    pub tuples: Vec<IntTuple>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyReport {
    pub dimension: u128,
    pub top_components: u64,
}

/// Minimal reports for every residue plus the stability bound of a profile,
/// computed once and reused across `n`.
#[derive(Debug, Clone)]
pub struct ProfileAnalysis {
    profile: DegreeProfile,
    table: Vec<MinimalReport>,
    bound: StabilityBound,
}

impl ProfileAnalysis {
    pub fn new(profile: &DegreeProfile) -> Self {
        let table = minimal_table(profile);
        let bound = stability_bound_from(profile, &table);
        Self {
            profile: profile.clone(),
            table,
            bound,
        }
    }

    pub fn profile(&self) -> &DegreeProfile {
        &self.profile
    }

    pub fn table(&self) -> &[MinimalReport] {
        &self.table
    }

    pub fn bound(&self) -> StabilityBound {
        self.bound
    }

    pub fn report(&self, r: u64) -> &MinimalReport {
        &self.table[r as usize]
    }

    pub fn minimal_for_n(&self, n: u64) -> LiftedMinimal {
        lift_report(&self.profile, n, self.report(n % self.profile.order()))
    }

    pub fn leading_term(&self, n: u64) -> LeadingTerm {
        let a = self.profile.order() as u128;
        let r = n % self.profile.order();
        let rep = self.report(r);
        let (n2, r2) = ((n as u128).pow(2), (r as u128).pow(2));
        // a | n - r, hence a | n^2 - r^2
        assert_eq!((n2 - r2) % a, 0, "n^2 - r^2 not divisible by a");
        let exponent = n2 - (n2 - r2) / a - rep.s_r as u128;
        assert!(exponent * a <= n2 * (a - 1), "exponent above n^2(1 - 1/a)");
        assert!(
            exponent * a >= (n2 - r2) * (a - 1),
            "exponent below (n^2 - r^2)(1 - 1/a)"
        );
        LeadingTerm {
            coefficient: rep.m_r() as u64,
            exponent,
            n,
            r,
            s_r: rep.s_r,
            eps_r: rep.eps_r.clone(),
            stable: n >= self.bound.n_threshold,
            threshold: self.bound.n_threshold,
        }
    }

    pub fn variety_report(&self, n: u64) -> Result<VarietyReport, CountingError> {
        let lt = self.leading_term(n);
        if !lt.stable {
            return Err(CountingError::UnstableRegime {
                n,
                threshold: lt.threshold,
            });
        }
        Ok(VarietyReport {
            dimension: lt.exponent,
            top_components: lt.coefficient,
        })
    }
}

pub fn leading_term(p: &DegreeProfile, n: u64) -> LeadingTerm {
    ProfileAnalysis::new(p).leading_term(n)
}

pub fn variety_report(p: &DegreeProfile, n: u64) -> Result<VarietyReport, CountingError> {
    ProfileAnalysis::new(p).variety_report(n)
}

/// Leading term of `f_n` read off the eligible tuples of least square-sum,
/// without building the polynomial.
pub fn eligible_leading_term(p: &DegreeProfile, n: u64) -> EligibleLeading {
    let (tuples, best) = search_minimal_eligible(p, n);
    EligibleLeading {
        coefficient: tuples.len() as u64,
        exponent: (n as u128).pow(2) - best,
        tuples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::parse_group_spec;

    fn prof(s: &str) -> DegreeProfile {
        parse_group_spec(s).unwrap().profile().unwrap()
    }

    fn t(v: &[i64]) -> IntTuple {
        IntTuple(v.to_vec())
    }

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    #[test]
    fn orbit_examples() {
        let c2 = prof("cyclic:2");
        assert_eq!(orbit_poly(&c2, &t(&[1, 1])).unwrap(), p(&[0, 1, 1]));
        assert_eq!(orbit_poly(&c2, &t(&[2, 0])).unwrap(), IntPolynomial::one());
        assert_eq!(
            orbit_poly(&prof("sym:4"), &t(&[1, 0, 0, 0, 0])).unwrap(),
            IntPolynomial::one()
        );
    }

    #[test]
    fn orbit_errors() {
        let c2 = prof("cyclic:2");
        assert_eq!(
            orbit_poly(&c2, &t(&[-1, 2])),
            Err(CountingError::IneligibleTuple(t(&[-1, 2])))
        );
        assert!(matches!(
            orbit_poly(&c2, &t(&[1])),
            Err(CountingError::Minimizer(
                MinimizerError::LengthMismatch { .. }
            ))
        ));
    }

    #[test]
    fn orbit_routes_agree() {
        let s4 = prof("sym:4");
        for n in 0..=9 {
            for tup in minimizer::eligible_tuples(&s4, n) {
                let fast = orbit_poly(&s4, &tup).unwrap();
                let slow = orbit_poly_by_division(&s4, &tup).unwrap();
                assert_eq!(fast, slow, "{tup}");
                let expect_deg = (n * n) as u128 - tup.square_sum();
                assert_eq!(fast.degree(), Some(expect_deg as usize));
                assert_eq!(fast.leading_coefficient(), Some(&BigInt::from(1)));
            }
        }
    }

    #[test]
    fn degree_two_orbit_has_negative_coefficient() {
        // |GL_2| / |GL_1| for one copy of a 2-dimensional irreducible
        let orbit = orbit_poly(&prof("sym:4"), &t(&[0, 0, 1, 0, 0])).unwrap();
        assert_eq!(orbit, p(&[0, -1, 0, 1]));
        assert!(!orbit.is_nonnegative());
    }

    #[test]
    fn linear_orbits_are_nonnegative() {
        // only degree-1 coordinates: a power of q times a q-multinomial
        let c4 = prof("cyclic:4");
        for n in 0..=8 {
            for tup in minimizer::eligible_tuples(&c4, n) {
                assert!(orbit_poly(&c4, &tup).unwrap().is_nonnegative(), "{tup}");
            }
        }
    }

    #[test]
    fn hom_count_examples() {
        let c2 = prof("cyclic:2");
        assert_eq!(hom_count_poly(&c2, 2).unwrap(), p(&[2, 1, 1]));
        assert_eq!(hom_count_poly(&c2, 1).unwrap(), p(&[2]));
        assert_eq!(
            hom_count_poly(&prof("sym:5"), 0).unwrap(),
            IntPolynomial::one()
        );
    }

    #[test]
    fn hom_count_cap() {
        let err = hom_count_poly_limited(&prof("sym:4"), 12, 10).unwrap_err();
        assert!(matches!(err, CountingError::ResourceLimit(_)));
    }

    #[test]
    fn leading_examples() {
        let s4 = ProfileAnalysis::new(&prof("sym:4"));
        let lt = s4.leading_term(25);
        assert_eq!((lt.coefficient, lt.exponent, lt.stable), (2, 598, true));
        let lt = s4.leading_term(24);
        assert_eq!((lt.coefficient, lt.exponent, lt.stable), (1, 552, true));
        let lt = leading_term(&prof("cyclic:2"), 2);
        assert_eq!((lt.coefficient, lt.exponent, lt.stable), (1, 2, true));
    }

    #[test]
    fn below_threshold_is_flagged() {
        let s5 = ProfileAnalysis::new(&prof("sym:5"));
        let lt = s5.leading_term(3);
        assert!(!lt.stable);
        assert_eq!((lt.coefficient, lt.exponent), (4, 7));
        // true top orbits at n = 3 are (1,2,0,...) and (2,1,0,...)
        let actual = eligible_leading_term(s5.profile(), 3);
        assert_eq!((actual.coefficient, actual.exponent), (2, 4));
        assert!(matches!(
            s5.variety_report(3),
            Err(CountingError::UnstableRegime {
                n: 3,
                threshold: 120
            })
        ));
    }

    #[test]
    fn variety_examples() {
        let v = variety_report(&prof("sym:4"), 25).unwrap();
        assert_eq!((v.dimension, v.top_components), (598, 2));
        let v = variety_report(&prof("cyclic:2"), 4).unwrap();
        assert_eq!((v.dimension, v.top_components), (8, 1));
        let v = variety_report(&prof("sym:5"), 120).unwrap();
        assert_eq!((v.dimension, v.top_components), (14280, 1));
    }

    #[test]
    fn eligible_leading_matches_polynomial() {
        for spec in ["sym:4", "dihedral:5", "cyclic:3"] {
            let pr = prof(spec);
            for n in 0..=14 {
                let f = hom_count_poly(&pr, n).unwrap();
                let lead = eligible_leading_term(&pr, n);
                assert_eq!(f.degree(), Some(lead.exponent as usize), "{spec} n={n}");
                assert_eq!(
                    f.leading_coefficient(),
                    Some(&BigInt::from(lead.coefficient)),
                    "{spec} n={n}"
                );
            }
        }
    }
}
