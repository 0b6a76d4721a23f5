//! Signatures, Riemann-Hurwitz genus arithmetic, closed-form admissibility,
//! the extension principle and the graded monoid operations.
//!
//! A signature `(h; m_1,...,m_r)` records the orbifold genus `h` of the
//! quotient surface together with the branch orders `m_i >= 2`. For the two
//! target groups admissibility reduces to a linear inequality in the period
//! multiplicities (plus one exceptional signature for `PSL(2,7)`), which
//! [`classify`] evaluates without any search. The search-based oracle in
//! [`crate::epi`] is deliberately independent so the two can cross-validate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{build_psl2, FiniteGroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SignatureError {
    #[error("period {0} is smaller than 2")]
    PeriodTooSmall(u32),
    #[error(
        "hypothesis violation: period {0} must occur in the signature and be 2 or an odd prime"
    )]
    HypothesisViolation(u32),
    #[error(
        "orbifold genera differ ({0} vs {1}); the genus-preserving combine needs equal genera"
    )]
    GenusMismatch(u32, u32),
    #[error("period {0} is not an element order of the group")]
    BadPeriod(u32),
    #[error("cannot parse signature from `{0}`")]
    Parse(String),
}

/// Orbifold genus plus sorted period multiset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Signature {
    h: u32,
    periods: Vec<u32>,
}

impl Signature {
    /// Build a signature; periods are sorted, each must be `>= 2`.
    pub fn new(h: u32, mut periods: Vec<u32>) -> Result<Signature, SignatureError> {
        if let Some(&bad) = periods.iter().find(|&&m| m < 2) {
            return Err(SignatureError::PeriodTooSmall(bad));
        }
        periods.sort_unstable();
        Ok(Signature { h, periods })
    }

    pub fn orbifold_genus(&self) -> u32 {
        self.h
    }

    pub fn periods(&self) -> &[u32] {
        &self.periods
    }

    pub fn period_count(&self) -> usize {
        self.periods.len()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.h)?;
        if self.periods.is_empty() {
            write!(f, "-")?;
        } else {
            for (i, m) in self.periods.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{m}")?;
            }
        }
        write!(f, ")")
    }
}

impl FromStr for Signature {
    type Err = SignatureError;

    /// Accepts the tuple syntax `(h;m1,m2,...)` (empty period list written
    /// `(h;)` or `(h;-)`) and the exponent syntax `h=0 2^4 3^1`.
    fn from_str(s: &str) -> Result<Signature, SignatureError> {
        let raw = s.trim();
        let parse_err = || SignatureError::Parse(raw.to_string());
        if let Some(body) = raw.strip_prefix('(') {
            let body = body.strip_suffix(')').ok_or_else(parse_err)?;
            let (h_str, periods_str) = body.split_once(';').ok_or_else(parse_err)?;
            let h: u32 = h_str.trim().parse().map_err(|_| parse_err())?;
            let periods_str = periods_str.trim();
            let periods =
                if periods_str.is_empty() || periods_str == "-" || periods_str == "\u{2212}" {
                    Vec::new()
                } else {
                    periods_str
                        .split(',')
                        .map(|tok| tok.trim().parse::<u32>().map_err(|_| parse_err()))
                        .collect::<Result<Vec<_>, _>>()?
                };
            return Signature::new(h, periods);
        }
        // exponent syntax: `h=0 2^4 3^1 4^2 7^3`
        let mut h: Option<u32> = None;
        let mut periods = Vec::new();
        for tok in raw.split_whitespace() {
            if let Some(v) = tok.strip_prefix("h=") {
                if h.is_some() {
                    return Err(parse_err());
                }
                h = Some(v.parse().map_err(|_| parse_err())?);
            } else if let Some((m, a)) = tok.split_once('^') {
                let m: u32 = m.parse().map_err(|_| parse_err())?;
                let a: u32 = a.parse().map_err(|_| parse_err())?;
                periods.extend(std::iter::repeat_n(m, a as usize));
            } else {
                let m: u32 = tok.parse().map_err(|_| parse_err())?;
                periods.push(m);
            }
        }
        match h {
            Some(h) => Signature::new(h, periods),
            None => Err(parse_err()),
        }
    }
}

/// Exponent-vector form of a signature over a group's allowed periods:
/// `h` plus period value -> multiplicity.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExponentVector {
    pub h: u32,
    pub a: BTreeMap<u32, u32>,
}

/// The two groups whose closed-form admissibility criteria are built in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum GroupId {
    Psl27,
    Psl211,
}

impl GroupId {
    pub fn order(self) -> u64 {
        match self {
            GroupId::Psl27 => 168,
            GroupId::Psl211 => 660,
        }
    }

    /// Element orders `> 1`, i.e., the admissible periods.
    pub fn allowed_periods(self) -> &'static [u32] {
        match self {
            GroupId::Psl27 => &[2, 3, 4, 7],
            GroupId::Psl211 => &[2, 3, 5, 6, 11],
        }
    }

    /// Genus weight of one period: `|G|/2 * (1 - 1/m)`.
    pub fn weight(self, period: u32) -> u64 {
        let g = self.order();
        g * u64::from(period - 1) / (2 * u64::from(period))
    }

    pub fn min_genus(self) -> u64 {
        match self {
            GroupId::Psl27 => 3,
            GroupId::Psl211 => 26,
        }
    }

    /// Materialize the group itself.
    pub fn build(self) -> FiniteGroup {
        match self {
            GroupId::Psl27 => build_psl2(7).expect("7 is in range"),
            GroupId::Psl211 => build_psl2(11).expect("11 is in range"),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::Psl27 => write!(f, "psl2:7"),
            GroupId::Psl211 => write!(f, "psl2:11"),
        }
    }
}

impl FromStr for GroupId {
    type Err = SignatureError;

    fn from_str(s: &str) -> Result<GroupId, SignatureError> {
        match s.trim() {
            "psl2:7" | "psl2_7" => Ok(GroupId::Psl27),
            "psl2:11" | "psl2_11" => Ok(GroupId::Psl211),
            other => Err(SignatureError::Parse(other.to_string())),
        }
    }
}

/// Exact Riemann-Hurwitz genus
/// `g = 1 + |G|(h-1) + (|G|/2) * sum(1 - 1/m_i)`,
/// generic over the rational scalar. Negative for signatures too light to
/// support an action, and fractional when periods do not divide evenly,
/// which is why the result is a rational plus the [`is_integral`] predicate
/// rather than an integer.
pub fn riemann_hurwitz_genus<T>(group_order: u64, sig: &Signature) -> Ratio<T>
where
    T: Clone + num_integer::Integer + Signed + FromPrimitive,
{
    let ord = T::from_u64(group_order).expect("group order fits the scalar");
    let one = Ratio::from_integer(T::one());
    let two = Ratio::from_integer(T::from_u8(2).unwrap());
    let h = Ratio::from_integer(T::from_u32(sig.h).expect("genus fits the scalar"));
    let ordq = Ratio::from_integer(ord);
    let mut g = one.clone() + ordq.clone() * (h - one.clone());
    let half = ordq / two;
    for &m in &sig.periods {
        let m = Ratio::from_integer(T::from_u32(m).unwrap());
        g = g + half.clone() * (one.clone() - one.clone() / m);
    }
    g
}

/// Whether an exact genus value is an integer.
pub fn is_integral<T>(g: &Ratio<T>) -> bool
where
    T: Clone + num_integer::Integer,
{
    g.is_integer()
}

/// Genus of the closed-form criterion, `1 + |G|(h-1) + sum w_m a_m`, as a
/// plain integer (all weights are integral for allowed periods).
pub fn theorem_genus(gid: GroupId, ev: &ExponentVector) -> i64 {
    let mut g = 1 + gid.order() as i64 * (i64::from(ev.h) - 1);
    for (&m, &a) in &ev.a {
        g += gid.weight(m) as i64 * i64::from(a);
    }
    g
}

/// Machine-checkable rejection codes.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    BadPeriod,
    BelowMinGenus,
    ExcludedException,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            RejectReason::BadPeriod => "bad_period",
            RejectReason::BelowMinGenus => "below_min_genus",
            RejectReason::ExcludedException => "excluded_exception",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Classification {
    Admissible(u64),
    Rejected(RejectReason),
}

impl Classification {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Classification::Admissible(_))
    }
}

/// Closed-form admissibility: every period must be an element order of the
/// group, the genus expression must reach the minimum genus, and for
/// `PSL(2,7)` the signature `(1;2)` is excluded.
pub fn classify(gid: GroupId, sig: &Signature) -> Classification {
    let ev = match to_exponent_vector(gid, sig) {
        Ok(ev) => ev,
        Err(_) => return Classification::Rejected(RejectReason::BadPeriod),
    };
    let genus = theorem_genus(gid, &ev);
    if genus < gid.min_genus() as i64 {
        return Classification::Rejected(RejectReason::BelowMinGenus);
    }
    if gid == GroupId::Psl27 && sig.h == 1 && sig.periods == [2] {
        return Classification::Rejected(RejectReason::ExcludedException);
    }
    Classification::Admissible(genus as u64)
}

/// Extension principle: duplicating a period that already occurs yields a
/// new signature, provided the period is 2 or an odd prime.
pub fn extend_signature(sig: &Signature, period: u32) -> Result<Signature, SignatureError> {
    let occurs = sig.periods.contains(&period);
    let eligible = period == 2 || (!period.is_multiple_of(2) && is_odd_prime(period));
    if !occurs || !eligible {
        return Err(SignatureError::HypothesisViolation(period));
    }
    let mut periods = sig.periods.clone();
    periods.push(period);
    Signature::new(sig.h, periods)
}

fn is_odd_prime(n: u32) -> bool {
    if n < 3 || n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// The graded-monoid sum: orbifold genera add, period multisets merge.
pub fn monoid_combine(a: &Signature, b: &Signature) -> Signature {
    let mut periods = a.periods.clone();
    periods.extend_from_slice(&b.periods);
    Signature::new(a.h + b.h, periods).expect("merged periods stay valid")
}

/// The genus-preserving special case: both operands must share the same
/// orbifold genus, which the result keeps.
pub fn monoid_combine_same_genus(
    a: &Signature,
    b: &Signature,
) -> Result<Signature, SignatureError> {
    if a.h != b.h {
        return Err(SignatureError::GenusMismatch(a.h, b.h));
    }
    let mut periods = a.periods.clone();
    periods.extend_from_slice(&b.periods);
    Signature::new(a.h, periods)
}

/// Lossless conversion to the exponent-vector form; periods outside the
/// group's element orders are rejected.
pub fn to_exponent_vector(gid: GroupId, sig: &Signature) -> Result<ExponentVector, SignatureError> {
    let mut a: BTreeMap<u32, u32> = gid.allowed_periods().iter().map(|&m| (m, 0)).collect();
    for &m in &sig.periods {
        match a.get_mut(&m) {
            Some(slot) => *slot += 1,
            None => return Err(SignatureError::BadPeriod(m)),
        }
    }
    Ok(ExponentVector { h: sig.h, a })
}

/// Inverse of [`to_exponent_vector`].
pub fn from_exponent_vector(ev: &ExponentVector) -> Signature {
    let mut periods = Vec::new();
    for (&m, &mult) in &ev.a {
        periods.extend(std::iter::repeat_n(m, mult as usize));
    }
    Signature::new(ev.h, periods).expect("exponent vectors carry valid periods")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn sig(s: &str) -> Signature {
        s.parse().unwrap()
    }

    #[test]
    fn genus_values() {
        let g = |order, s: &str| riemann_hurwitz_genus::<i64>(order, &sig(s));
        assert_eq!(g(168, "(0;2,3,7)"), Rat::from_integer(3));
        assert_eq!(g(660, "(0;2,3,11)"), Rat::from_integer(26));
        assert_eq!(g(168, "(1;-)"), Rat::from_integer(1));
        assert_eq!(g(660, "(1;)"), Rat::from_integer(1));
        assert_eq!(g(168, "(0;3,3,4)"), Rat::from_integer(8));
        assert_eq!(g(168, "(0;2,2,2,2,2)"), Rat::from_integer(43));
        assert_eq!(g(168, "(0;2,2,2)"), Rat::from_integer(-41));
    }

    #[test]
    fn genus_can_be_fractional() {
        // (0;2) over a group of order 3: 1 - 3 + (3/2)(1/2) = -5/4
        let g = riemann_hurwitz_genus::<i64>(3, &sig("(0;2)"));
        assert_eq!(g, Rat::new(-5, 4));
        assert!(!is_integral(&g));
    }

    #[test]
    fn generic_scalar_agreement() {
        use num_bigint::BigInt;
        let s = sig("(2;2,3,4,7,7)");
        let small = riemann_hurwitz_genus::<i64>(168, &s);
        let big = riemann_hurwitz_genus::<BigInt>(168, &s);
        assert_eq!(BigInt::from(*small.numer()), *big.numer());
        assert_eq!(BigInt::from(*small.denom()), *big.denom());
    }

    #[test]
    fn classify_psl2_7() {
        let c = |s: &str| classify(GroupId::Psl27, &sig(s));
        assert_eq!(
            c("(1;2)"),
            Classification::Rejected(RejectReason::ExcludedException)
        );
        assert_eq!(c("(0;2,2,2,2,2)"), Classification::Admissible(43));
        assert_eq!(
            c("(0;2,2,2)"),
            Classification::Rejected(RejectReason::BelowMinGenus)
        );
        assert_eq!(
            c("(0;2,3,5)"),
            Classification::Rejected(RejectReason::BadPeriod)
        );
        assert_eq!(c("(0;2,3,7)"), Classification::Admissible(3));
        assert_eq!(c("(2;-)"), Classification::Admissible(169));
        assert_eq!(
            c("(1;-)"),
            Classification::Rejected(RejectReason::BelowMinGenus)
        );
        assert_eq!(c("(1;2,2)"), Classification::Admissible(85));
    }

    #[test]
    fn classify_psl2_11() {
        let c = |s: &str| classify(GroupId::Psl211, &sig(s));
        // no excluded exception for PSL(2,11): (1;2) has genus 166
        assert_eq!(c("(1;2)"), Classification::Admissible(166));
        assert_eq!(c("(0;2,3,11)"), Classification::Admissible(26));
        assert_eq!(
            c("(0;2,3,7)"),
            Classification::Rejected(RejectReason::BadPeriod)
        );
        assert_eq!(
            c("(0;2,2,2,2)"),
            Classification::Rejected(RejectReason::BelowMinGenus)
        );
    }

    #[test]
    fn theorem_weights() {
        assert_eq!(GroupId::Psl27.weight(2), 42);
        assert_eq!(GroupId::Psl27.weight(3), 56);
        assert_eq!(GroupId::Psl27.weight(4), 63);
        assert_eq!(GroupId::Psl27.weight(7), 72);
        assert_eq!(GroupId::Psl211.weight(2), 165);
        assert_eq!(GroupId::Psl211.weight(3), 220);
        assert_eq!(GroupId::Psl211.weight(5), 264);
        assert_eq!(GroupId::Psl211.weight(6), 275);
        assert_eq!(GroupId::Psl211.weight(11), 300);
    }

    #[test]
    fn extension_principle() {
        let s = sig("(0;2,3,7)");
        assert_eq!(extend_signature(&s, 7).unwrap(), sig("(0;2,3,7,7)"));
        assert_eq!(
            extend_signature(&s, 4),
            Err(SignatureError::HypothesisViolation(4))
        );
        assert_eq!(
            extend_signature(&sig("(0;3,4,4)"), 3).unwrap(),
            sig("(0;3,3,4,4)")
        );
        // 4 occurs but is neither 2 nor an odd prime
        assert_eq!(
            extend_signature(&sig("(0;3,4,4)"), 4),
            Err(SignatureError::HypothesisViolation(4))
        );
        // 6 occurs but is composite
        assert_eq!(
            extend_signature(&sig("(0;6,6)"), 6),
            Err(SignatureError::HypothesisViolation(6))
        );
    }

    #[test]
    fn monoid_operations() {
        assert_eq!(
            monoid_combine(&sig("(0;2,3)"), &sig("(1;7)")),
            sig("(1;2,3,7)")
        );
        let s = sig("(2;3,3)");
        assert_eq!(monoid_combine(&s, &sig("(0;)")), s);
        assert_eq!(
            monoid_combine_same_genus(&sig("(0;2,2)"), &sig("(0;3,3)")).unwrap(),
            sig("(0;2,2,3,3)")
        );
        assert!(monoid_combine_same_genus(&sig("(0;2)"), &sig("(1;2)")).is_err());
    }

    #[test]
    fn exponent_vector_round_trip() {
        let s = sig("(0;2,2,3)");
        let ev = to_exponent_vector(GroupId::Psl27, &s).unwrap();
        assert_eq!(ev.h, 0);
        assert_eq!(ev.a[&2], 2);
        assert_eq!(ev.a[&3], 1);
        assert_eq!(ev.a[&4], 0);
        assert_eq!(ev.a[&7], 0);
        assert_eq!(from_exponent_vector(&ev), s);

        let free = sig("(1;-)");
        let ev = to_exponent_vector(GroupId::Psl27, &free).unwrap();
        assert!(ev.a.values().all(|&a| a == 0));
        assert_eq!(from_exponent_vector(&ev), free);

        assert_eq!(
            to_exponent_vector(GroupId::Psl27, &sig("(0;2,3,5)")),
            Err(SignatureError::BadPeriod(5))
        );
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(sig("(0;2,3,7)").to_string(), "(0;2,3,7)");
        assert_eq!(sig("(1;-)").to_string(), "(1;-)");
        assert_eq!(sig("(1;)").to_string(), "(1;-)");
        assert_eq!(sig(" ( 2 ; 7 , 2 , 3 ) ").to_string(), "(2;2,3,7)");
        assert_eq!(sig("h=0 2^4 3^1 4^2 7^3").periods().len(), 10);
        assert_eq!(sig("h=1 2^0").to_string(), "(1;-)");
        assert!("(0;2,3,7".parse::<Signature>().is_err());
        assert!("h=0 x^2".parse::<Signature>().is_err());
        assert!("(0;1,2)".parse::<Signature>().is_err());
    }
}
