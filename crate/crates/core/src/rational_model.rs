//! Rationals as M-atoms and nonconvergent Cauchy sequences of rationals as
//! m-atoms.
//!
//! A sequence is given symbolically by its irrational limit `q + r·√d` and a
//! vanishing tail shape. Two sequences are `∼`-equivalent exactly when their
//! limits coincide, so equivalence reduces to comparing canonical limits.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::universe::{AtomSort, EntityHandle, Species, Universe, UniverseBuilder};

/// Terms approximate the limit to within `|shape(n)| · TERM_SCALE`, and carry
/// `shape(n) · TERM_SCALE` as their visible tail.
fn term_scale() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1_000_000_000u64))
}

/// Smallest allowed distance between two distinct limits of one spec.
pub fn min_limit_gap() -> BigRational {
    BigRational::new(BigInt::from(4), BigInt::from(1_000_000u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tail {
    InvN,
    InvN2,
    AltInvN,
    PowHalf,
}

impl Tail {
    pub const ALL: [Tail; 4] = [Tail::InvN, Tail::InvN2, Tail::AltInvN, Tail::PowHalf];

    pub fn name(self) -> &'static str {
        match self {
            Tail::InvN => "inv_n",
            Tail::InvN2 => "inv_n2",
            Tail::AltInvN => "alt_inv_n",
            Tail::PowHalf => "pow_half",
        }
    }

    /// `1/n`, `1/n²`, `(−1)ⁿ/n` or `2⁻ⁿ`.
    pub fn shape(self, n: u64) -> BigRational {
        assert!(n >= 1, "sequences are indexed from 1");
        let n_big = BigInt::from(n);
        match self {
            Tail::InvN => BigRational::new(BigInt::one(), n_big),
            Tail::InvN2 => BigRational::new(BigInt::one(), &n_big * &n_big),
            Tail::AltInvN if n.is_multiple_of(2) => BigRational::new(BigInt::one(), n_big),
            Tail::AltInvN => BigRational::new(-BigInt::one(), n_big),
            Tail::PowHalf => BigRational::new(BigInt::one(), BigInt::one() << n),
        }
    }

    /// `|shape(n)|`, the bound on the distance of the n-th term to the limit.
    pub fn bound(self, n: u64) -> BigRational {
        self.shape(n).abs()
    }
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Tail {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tail::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                Error::validation(format!(
                    "unknown tail `{s}` (expected inv_n, inv_n2, alt_inv_n or pow_half)"
                ))
            })
    }
}

/// The limit `q + r·√d`. Fields are public so that malformed descriptors can
/// be built and rejected by [`validate_sequence`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LimitDescriptor {
    pub q: BigRational,
    pub r: BigRational,
    pub d: u64,
}

impl LimitDescriptor {
    pub fn new(q: BigRational, r: BigRational, d: u64) -> Self {
        LimitDescriptor { q, r, d }
    }

    /// Moves square factors of `d` into `r`, so that equal limits have equal
    /// descriptors. Fails when `r = 0` or `d` has no irrational part.
    pub fn canonical(&self) -> Result<LimitDescriptor> {
        if self.r.is_zero() {
            return Err(Error::validation(
                "r = 0: the limit is rational, so the sequence converges in ℚ",
            ));
        }
        let (outer, inner) = split_square(self.d);
        if inner <= 1 {
            return Err(Error::validation(format!(
                "d = {} is not a square-free integer > 1: √d is rational, so the sequence converges in ℚ",
                self.d
            )));
        }
        Ok(LimitDescriptor {
            q: self.q.clone(),
            r: &self.r * BigRational::from_integer(BigInt::from(outer)),
            d: inner,
        })
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical().is_ok_and(|c| &c == self)
    }

    /// Interval `[lo, hi]` containing `q + r·√d`, of width at most
    /// `|r|·2⁻ᵇⁱᵗˢ`.
    pub fn enclosure(&self, bits: u64) -> (BigRational, BigRational) {
        let (slo, shi) = sqrt_bounds(self.d, bits);
        let a = &self.q + &self.r * &slo;
        let b = &self.q + &self.r * &shi;
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Species tag of the m-atoms realizing sequences with this limit.
    pub fn tag(&self) -> String {
        format!("lim({self})")
    }
}

impl fmt::Display for LimitDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√{}", self.q, self.r, self.d)
    }
}

/// Writes `d = outer² · inner` with `inner` square-free.
fn split_square(d: u64) -> (u64, u64) {
    let mut outer = 1u64;
    let mut inner = d;
    let mut p = 2u64;
    while p.saturating_mul(p) <= inner {
        while inner.is_multiple_of(p * p) {
            inner /= p * p;
            outer *= p;
        }
        p += 1;
    }
    (outer, inner)
}

/// `floor(√d · 2ᵏ) / 2ᵏ` and the same plus `2⁻ᵏ`, which bracket `√d`.
pub fn sqrt_bounds(d: u64, k: u64) -> (BigRational, BigRational) {
    let scaled: BigUint = BigUint::from(d) << (2 * k);
    let s = BigInt::from(scaled.sqrt());
    let den = BigInt::one() << k;
    let lo = BigRational::new(s.clone(), den.clone());
    if (&s * &s) == BigInt::from(d) << (2 * k) {
        return (lo.clone(), lo);
    }
    (lo, BigRational::new(s + 1, den))
}

fn bits_for(x: &BigRational) -> u64 {
    if x <= &BigRational::one() {
        return 0;
    }
    let c = x.ceil().to_integer();
    c.bits()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MSequence {
    pub limit: LimitDescriptor,
    pub tail: Tail,
}

impl MSequence {
    pub fn new(limit: LimitDescriptor, tail: Tail) -> Self {
        MSequence { limit, tail }
    }

    /// Precision `k` such that `|r|·2⁻ᵏ ≤ |shape(n)| · TERM_SCALE`.
    fn precision(&self, n: u64) -> u64 {
        if self.limit.r.is_zero() {
            return 0;
        }
        let need = self.limit.r.abs() / (self.tail.bound(n) * term_scale());
        bits_for(&need)
    }

    /// The n-th term (n ≥ 1): `q + r·σ + shape(n)·10⁻⁹`, where `σ` is the
    /// dyadic floor of `√d` fine enough that `|r|·|σ − √d| ≤ |shape(n)|·10⁻⁹`.
    pub fn term(&self, n: u64) -> BigRational {
        let (sigma, _) = sqrt_bounds(self.limit.d, self.precision(n));
        &self.limit.q + &self.limit.r * sigma + self.tail.shape(n) * term_scale()
    }

    /// Certifies `|a_n − (q + r√d)| ≤ tail(n)` with an enclosure of the limit.
    pub fn certify_term(&self, n: u64) -> bool {
        let a = self.term(n);
        let (lo, hi) = self.limit.enclosure(self.precision(n) + 8);
        let bound = self.tail.bound(n);
        (&a - lo).abs() <= bound && (&a - hi).abs() <= bound
    }
}

impl fmt::Display for MSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.limit, self.tail)
    }
}

/// `a ∼ b`: the sequences have the same limit.
pub fn seq_equiv(a: &MSequence, b: &MSequence) -> bool {
    match (a.limit.canonical(), b.limit.canonical()) {
        (Ok(x), Ok(y)) => x == y,
        _ => a.limit == b.limit,
    }
}

/// Number of leading terms examined by [`validate_sequence`].
pub const CERTIFIED_PREFIX: u64 = 32;

/// Checks that `s` denotes a nonconvergent Cauchy sequence: `d` reduces to a
/// square-free integer above 1, `r ≠ 0`, every term of the prefix lies within
/// its tail bound of the limit, and `|a_n − a_m| ≤ 2·tail(min(n, m))` on the
/// prefix. Returns the canonical limit.
pub fn validate_sequence(s: &MSequence) -> Result<LimitDescriptor> {
    let canonical = s.limit.canonical()?;
    let terms: Vec<BigRational> = (1..=CERTIFIED_PREFIX).map(|n| s.term(n)).collect();
    for n in 1..=CERTIFIED_PREFIX {
        if !s.certify_term(n) {
            return Err(Error::validation(format!(
                "term {n} is not within {} of the limit",
                s.tail.bound(n)
            )));
        }
    }
    let two = BigRational::from_integer(BigInt::from(2));
    for n in 1..=CERTIFIED_PREFIX {
        for m in n + 1..=CERTIFIED_PREFIX {
            let gap = (&terms[n as usize - 1] - &terms[m as usize - 1]).abs();
            if gap > &two * s.tail.bound(n) {
                return Err(Error::validation(format!(
                    "Cauchy bound fails between terms {n} and {m}"
                )));
            }
        }
    }
    Ok(canonical)
}

/// A declared quasi-set of a rational spec. Members are `r<i>` (the i-th
/// rational), `s<i>` (the i-th sequence) or the id of an earlier quasi-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSetSpec {
    pub id: String,
    pub members: Vec<String>,
    /// Declared ZFU flag; derived from the members when absent.
    pub zfu: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalUniverseSpec {
    pub rationals: Vec<BigRational>,
    pub sequences: Vec<MSequence>,
    pub qsets: Vec<QSetSpec>,
}

pub fn rational_atom_name(i: usize) -> String {
    format!("r{i}")
}

pub fn sequence_atom_name(i: usize) -> String {
    format!("s{i}")
}

pub fn rational_tag(x: &BigRational) -> String {
    format!("rat({x})")
}

/// Validates every sequence and checks that distinct limits are more than
/// `4·10⁻⁶` apart. Returns the canonical limits in sequence order.
pub fn validate_spec(spec: &RationalUniverseSpec) -> Result<Vec<LimitDescriptor>> {
    let limits = spec
        .sequences
        .iter()
        .enumerate()
        .map(|(i, s)| {
            validate_sequence(s)
                .map_err(|e| Error::validation(format!("sequence {i}: {}", strip_validation(e))))
        })
        .collect::<Result<Vec<_>>>()?;
    let gap = min_limit_gap();
    let mut first: Vec<(usize, &LimitDescriptor)> = Vec::new();
    for (i, l) in limits.iter().enumerate() {
        if first.iter().any(|(_, m)| *m == l) {
            continue;
        }
        let (lo, hi) = l.enclosure(64);
        for &(j, m) in &first {
            let (mlo, mhi) = m.enclosure(64);
            let separation = (&lo - &mhi).max(&mlo - &hi);
            if separation <= gap {
                return Err(Error::validation(format!(
                    "sequences {j} and {i} have distinct limits closer than 4·10⁻⁶; \
                     the numeric oracle cannot resolve them"
                )));
            }
        }
        first.push((i, l));
    }
    Ok(limits)
}

fn strip_validation(e: Error) -> String {
    match e {
        Error::Validation(m) => m,
        other => other.to_string(),
    }
}

/// Builds the universe: rational `i` becomes the M-atom `r<i>` with species
/// `rat(x)`, sequence `i` the m-atom `s<i>` with species `lim(...)` of its
/// canonical limit, followed by the declared quasi-sets.
pub fn build_universe(spec: &RationalUniverseSpec) -> Result<Universe> {
    let limits = validate_spec(spec)?;
    let mut b = UniverseBuilder::new();
    let mut ids: HashMap<String, EntityHandle> = HashMap::new();
    for (i, x) in spec.rationals.iter().enumerate() {
        let name = rational_atom_name(i);
        let h = b.add_atom(name.clone(), AtomSort::Macro, Species::new(rational_tag(x)))?;
        ids.insert(name, h);
    }
    for (i, l) in limits.iter().enumerate() {
        let name = sequence_atom_name(i);
        let h = b.add_atom(name.clone(), AtomSort::Micro, Species::new(l.tag()))?;
        ids.insert(name, h);
    }
    for (k, q) in spec.qsets.iter().enumerate() {
        let members = q
            .members
            .iter()
            .map(|m| {
                ids.get(m).copied().ok_or_else(|| {
                    Error::validation(format!(
                        "qset {k} (`{}`): member `{m}` is not a rational, a sequence or an earlier qset",
                        q.id
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let zfu = match q.zfu {
            Some(z) => z,
            None => !members
                .iter()
                .any(|&m| b.universe().reaches_micro(m).unwrap_or(false)),
        };
        let h = b
            .add_qset(q.id.clone(), members, zfu)
            .map_err(|e| Error::validation(format!("qset {k}: {}", strip_validation(e))))?;
        ids.insert(q.id.clone(), h);
    }
    Ok(b.build())
}

/// Parses `p/q` or `p`, reducing to lowest terms.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let parse = |x: &str| {
        BigInt::from_str(x).map_err(|_| Error::validation(format!("`{s}` is not a rational p/q")))
    };
    let (num, den) = (parse(num)?, parse(den)?);
    if den.is_zero() {
        return Err(Error::validation(format!("`{s}` has a zero denominator")));
    }
    Ok(BigRational::new(num, den))
}
