use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use quasiset::rational_model::MSequence;
use quasiset::{EntityHandle, Universe};
use serde_json::Value;

// ---------------------------------------------------------------------------
// D_O-system witnesses, re-derived from the raw file

type State = BTreeMap<String, (BigRational, String)>;

struct RawParticle {
    x: State,
    lam: BigRational,
    micro: bool,
    macro_: bool,
}

struct RawSystem {
    lambda: Vec<BigRational>,
    pool: Vec<State>,
    particles: Vec<RawParticle>,
}

fn rational(s: &str) -> BigRational {
    s.trim()
        .parse()
        .unwrap_or_else(|_| panic!("not a rational: {s}"))
}

fn state(v: &Value) -> State {
    v.as_object()
        .expect("state object")
        .iter()
        .map(|(k, mag)| {
            let text = mag.as_str().expect("magnitude string");
            let (value, unit) = text.split_once(' ').unwrap_or((text, ""));
            (k.clone(), (rational(value), unit.trim().to_string()))
        })
        .collect()
}

fn raw_system(path: &Path) -> RawSystem {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let lambda: Vec<BigRational> = v["lambda"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| rational(s.as_str().unwrap()))
        .collect();
    let pool: Vec<State> = v["X"].as_array().unwrap().iter().map(state).collect();
    let particles = v["P"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let x = match &p["x"] {
                Value::Number(k) => pool[k.as_u64().unwrap() as usize].clone(),
                other => state(other),
            };
            let lam = match &p["lam"] {
                Value::Number(k) => lambda[k.as_u64().unwrap() as usize - 1].clone(),
                other => rational(other.as_str().unwrap()),
            };
            let scales: Vec<&str> = match &p["scale"] {
                Value::String(s) => vec![s.as_str()],
                Value::Array(a) => a.iter().map(|s| s.as_str().unwrap()).collect(),
                other => panic!("bad scale {other}"),
            };
            RawParticle {
                x,
                lam,
                micro: scales.contains(&"micro"),
                macro_: scales.contains(&"macro"),
            }
        })
        .collect();
    RawSystem {
        lambda,
        pool,
        particles,
    }
}

/// Checks the witness reported for axiom `axiom` (e.g. "D3") against the
/// definition of the axiom, reading the system file directly.
pub fn do_witness_is_genuine(path: &Path, axiom: &str, kind: &str, idx: &[usize]) -> bool {
    let s = raw_system(path);
    let ps = &s.particles;
    let pair = || (&ps[idx[0]], &ps[idx[1]]);
    let same = |p: &RawParticle, q: &RawParticle| p.x == q.x && p.lam == q.lam;
    match (axiom, kind) {
        ("D1", "labels") => {
            let (i, j) = (idx[0], idx[1]);
            i != j && i >= 1 && j >= 1 && s.lambda[i - 1] == s.lambda[j - 1]
        }
        ("D2", "particle") => {
            let p = &ps[idx[0]];
            !s.pool.contains(&p.x) || !s.lambda.contains(&p.lam)
        }
        ("D3", "particles") => {
            let (p, q) = pair();
            p.lam == q.lam && p.x != q.x
        }
        ("D4", "particles") => {
            let (p, q) = pair();
            p.macro_ && q.macro_ && p.x == q.x && !same(p, q)
        }
        ("D5", "particles") => {
            let (p, q) = pair();
            p.x == q.x && !same(p, q) && !(p.micro && q.micro)
        }
        ("D6", "particle") => {
            let p = &ps[idx[0]];
            p.micro == p.macro_
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Power quasi-sets

/// All sub-collections of `items`, each sorted, by plain recursion.
pub fn subsets(items: &[EntityHandle]) -> BTreeSet<Vec<EntityHandle>> {
    match items.split_first() {
        None => BTreeSet::from([Vec::new()]),
        Some((&first, rest)) => {
            let without = subsets(rest);
            let with: Vec<Vec<EntityHandle>> = without
                .iter()
                .map(|s| {
                    let mut s = s.clone();
                    s.push(first);
                    s.sort();
                    s
                })
                .collect();
            without.into_iter().chain(with).collect()
        }
    }
}

pub fn sorted_members(u: &Universe, x: EntityHandle) -> Vec<EntityHandle> {
    let mut m = u.members(x).unwrap().to_vec();
    m.sort();
    m
}

// ---------------------------------------------------------------------------
// Sequences: interval enclosures with denominators 10⁹

/// Closed interval with rational end points.
#[derive(Debug, Clone)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    fn add(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn sub(&self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    fn scale(&self, r: &BigRational) -> Interval {
        let (a, b) = (r * &self.lo, r * &self.hi);
        if r.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    fn widen(&self, e: &BigRational) -> Interval {
        Interval {
            lo: &self.lo - e,
            hi: &self.hi + e,
        }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// Bounds on |x| for x in the interval.
    fn abs_bounds(&self) -> (BigRational, BigRational) {
        let hi = self.lo.abs().max(self.hi.abs());
        let lo = if self.lo.is_positive() {
            self.lo.clone()
        } else if self.hi.is_negative() {
            -self.hi.clone()
        } else {
            BigRational::zero()
        };
        (lo, hi)
    }
}

fn giga() -> BigInt {
    BigInt::from(1_000_000_000u64)
}

/// `[s/10⁹, (s+1)/10⁹]` with `s = ⌊√d·10⁹⌋`.
pub fn sqrt_enclosure(d: u64) -> Interval {
    let scaled = BigUint::from(d) * BigUint::from(10u32).pow(18);
    let s = BigInt::from(scaled.sqrt());
    Interval {
        lo: BigRational::new(s.clone(), giga()),
        hi: BigRational::new(s + 1, giga()),
    }
}

/// Enclosure of the m-th term: the limit `q + r√d` widened by 10⁻⁹, which
/// covers the scaled tail of every supported shape.
pub fn term_enclosure(seq: &MSequence) -> Interval {
    let l = &seq.limit;
    let q = Interval {
        lo: l.q.clone(),
        hi: l.q.clone(),
    };
    q.add(&sqrt_enclosure(l.d).scale(&l.r))
        .widen(&BigRational::new(BigInt::from(1), giga()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Close,
    Apart,
    Undecided,
}

/// Decides `|a_m − b_m| < 10⁻⁶` from the enclosures alone.
pub fn terms_close(a: &MSequence, b: &MSequence) -> Verdict {
    let diff = term_enclosure(a).sub(&term_enclosure(b));
    let tol = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    let (lo, hi) = diff.abs_bounds();
    if hi < tol {
        Verdict::Close
    } else if lo >= tol {
        Verdict::Apart
    } else {
        Verdict::Undecided
    }
}
