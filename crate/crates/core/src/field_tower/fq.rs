//! Finite fields `F_{p^f}` with a canonical primitive modulus and full log tables.
//!
//! Elements are stored by their base-`p` digit encoding: digit `i` is the
//! coefficient of `X^i` in the reduced polynomial representative.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::FieldError;

/// Largest field size for which log tables are built.
pub const MAX_Q: u64 = 1 << 16;

/// An element of some [`FqField`], in digit encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fe(pub(crate) u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Raw digit encoding; stable across runs for a fixed field.
    pub fn encoding(self) -> u32 {
        self.0
    }
}

#[derive(Debug)]
pub struct FqField {
    p: u32,
    f: u32,
    q: u32,
    /// Monic modulus, low degree first, length `f + 1`.
    modulus: Vec<u32>,
    /// `exp[k]` = encoding of `g^k`, `0 <= k < q - 1`.
    exp: Vec<u32>,
    /// `log[enc]` = k with `g^k = enc`; `log[0]` is unused.
    log: Vec<u32>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.f == other.f
    }
}
impl Eq for FqField {}

pub(crate) fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FqField {
    /// Builds `F_{p^f}` from the lexicographically smallest primitive modulus.
    ///
    /// Candidates `X^f + c_{f-1} X^{f-1} + ... + c_0` are scanned in increasing
    /// order of the integer `sum c_i p^i`, i.e. lexicographically on
    /// `(c_{f-1}, ..., c_0)`.
    pub fn new(p: u32, f: u32) -> Result<Arc<FqField>, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if f == 0 {
            return Err(FieldError::BadDegree(0));
        }
        let q64 = (p as u64).checked_pow(f).unwrap_or(u64::MAX);
        if q64 > MAX_Q {
            return Err(FieldError::FieldTooLarge { p, f });
        }
        let q = q64 as u32;
        let pf = q; // number of candidate tails
        for tail in 0..pf {
            let mut modulus = digits(tail, p, f);
            if modulus[0] == 0 {
                continue;
            }
            modulus.push(1);
            if let Some(exp) = power_cycle(&modulus, p, f, q) {
                let mut log = vec![0u32; q as usize];
                for (k, &e) in exp.iter().enumerate() {
                    log[e as usize] = k as u32;
                }
                return Ok(Arc::new(FqField {
                    p,
                    f,
                    q,
                    modulus,
                    exp,
                    log,
                }));
            }
        }
        unreachable!("a primitive polynomial of every degree exists")
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn f(&self) -> u32 {
        self.f
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Order of the multiplicative group.
    pub fn order(&self) -> u32 {
        self.q - 1
    }
    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Fe {
        Fe(0)
    }
    pub fn one(&self) -> Fe {
        Fe(1)
    }
    /// The class of `X`.
    pub fn generator(&self) -> Fe {
        Fe(self.exp[1 % self.exp.len()])
    }

    /// `g^k` for any integer `k`.
    pub fn exp(&self, k: i64) -> Fe {
        let m = self.order() as i64;
        Fe(self.exp[k.rem_euclid(m) as usize])
    }

    /// Discrete log to base `g`, in `[0, q-1)`; `None` for zero.
    pub fn log(&self, a: Fe) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        Fe(out)
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            let d = (self.p - x % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
        }
        Fe(out)
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe(0);
        }
        let k = self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64;
        Fe(self.exp[(k % self.order() as u64) as usize])
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        let k = self.log(a)? as i64;
        Some(self.exp(-k))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Option<Fe> {
        Some(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, n: i64) -> Fe {
        match self.log(a) {
            None => {
                if n == 0 {
                    Fe(1)
                } else {
                    Fe(0)
                }
            }
            Some(k) => {
                let m = self.order() as i128;
                let e = (k as i128 * n as i128).rem_euclid(m);
                Fe(self.exp[e as usize])
            }
        }
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.p as i64) as u32)
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(a, self.p as i64)
    }

    /// Inverse of `a -> a^{p^k}`.
    pub fn frobenius_inv(&self, a: Fe, k: u32) -> Fe {
        // a^{p^{-k}} = a^{p^{f - k mod f}}
        let kk = (self.f - k % self.f) % self.f;
        self.pow(a, (self.p as i64).pow(kk))
    }

    /// Absolute trace to the prime field, as an integer in `[0, p)`.
    pub fn abs_trace(&self, a: Fe) -> u32 {
        let mut acc = Fe(0);
        let mut x = a;
        for _ in 0..self.f {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    /// Nonzero elements in discrete-log order `g^0, g^1, ...`.
    pub fn units(&self) -> impl Iterator<Item = Fe> + '_ {
        self.exp.iter().map(|&e| Fe(e))
    }

    /// `F_p`-basis `1, g, ..., g^{f-1}`.
    pub fn prime_basis(&self) -> Vec<Fe> {
        (0..self.f as i64).map(|k| self.exp(k)).collect()
    }

    /// Coordinates over `F_p` in the monomial basis `1, X, ..., X^{f-1}`.
    pub fn digits_of(&self, a: Fe) -> Vec<u32> {
        digits(a.0, self.p, self.f)
    }

    pub fn from_digits(&self, ds: &[u32]) -> Fe {
        let mut out = 0u32;
        for &d in ds.iter().rev() {
            out = out * self.p + d % self.p;
        }
        Fe(out)
    }

    /// Canonical text form: `"0"` or `"g^k"`.
    pub fn format(&self, a: Fe) -> String {
        match self.log(a) {
            None => "0".to_string(),
            Some(k) => format!("g^{k}"),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Fe, FieldError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Fe(0));
        }
        let k = s
            .strip_prefix("g^")
            .and_then(|t| t.parse::<i64>().ok())
            .ok_or_else(|| FieldError::Parse(s.to_string()))?;
        Ok(self.exp(k))
    }

    /// Evaluates a polynomial with prime-field coefficients (constant first).
    pub fn eval_prime_poly(&self, coeffs: &[u32], x: Fe) -> Fe {
        let mut acc = Fe(0);
        for &c in coeffs.iter().rev() {
            acc = self.add(self.mul(acc, x), self.from_int(c as i64));
        }
        acc
    }

    /// Embedding `self -> big` as the exponent `k` with `g_self -> g_big^k`.
    ///
    /// The smallest `k` whose power is a root of `self`'s modulus is taken, so
    /// the choice is deterministic.
    pub fn embedding_exponent(&self, big: &FqField) -> Result<u32, FieldError> {
        if self.p != big.p || !big.f.is_multiple_of(self.f) {
            return Err(FieldError::NotSubfield {
                small: (self.p, self.f),
                big: (big.p, big.f),
            });
        }
        let step = big.order() / self.order();
        let mut k = step;
        loop {
            if k >= big.order() + step {
                unreachable!("subfield generator must be found");
            }
            let x = big.exp(k as i64 % big.order() as i64);
            if big.eval_prime_poly(&self.modulus, x).is_zero() {
                return Ok(k % big.order());
            }
            k += step;
        }
    }
}

fn digits(mut x: u32, p: u32, f: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(f as usize);
    for _ in 0..f {
        out.push(x % p);
        x /= p;
    }
    out
}

/// Powers of `X` modulo `modulus`, if `X` has order exactly `q - 1`.
fn power_cycle(modulus: &[u32], p: u32, f: u32, q: u32) -> Option<Vec<u32>> {
    let f = f as usize;
    let enc = |v: &[u32]| v.iter().rev().fold(0u32, |acc, &d| acc * p + d);
    let mut cur = vec![0u32; f];
    cur[0] = 1;
    let mut out = Vec::with_capacity((q - 1) as usize);
    out.push(1u32);
    for k in 1..q {
        // multiply by X
        let top = cur[f - 1];
        for i in (1..f).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        if top != 0 {
            for i in 0..f {
                cur[i] = (cur[i] + (p - modulus[i] % p) * top) % p;
            }
        }
        let e = enc(&cur);
        if e == 1 {
            return if k == q - 1 { Some(out) } else { None };
        }
        out.push(e);
    }
    None
}

/// Map between a field and one of its subfields, fixed by
/// [`FqField::embedding_exponent`].
#[derive(Debug)]
pub struct Embedding {
    pub small: Arc<FqField>,
    pub big: Arc<FqField>,
    pub exponent: u32,
    back: HashMap<u32, u32>,
}

impl Embedding {
    pub fn new(small: Arc<FqField>, big: Arc<FqField>) -> Result<Embedding, FieldError> {
        let exponent = small.embedding_exponent(&big)?;
        let mut back = HashMap::new();
        back.insert(0, 0);
        for (j, a) in small.units().enumerate() {
            let img = big.pow(big.generator(), exponent as i64 * j as i64);
            back.insert(img.0, a.0);
        }
        Ok(Embedding {
            small,
            big,
            exponent,
            back,
        })
    }

    pub fn apply(&self, a: Fe) -> Fe {
        match self.small.log(a) {
            None => Fe(0),
            Some(j) => self.big.exp(self.exponent as i64 * j as i64),
        }
    }

    /// Preimage of an element lying in the image.
    pub fn preimage(&self, b: Fe) -> Option<Fe> {
        self.back.get(&b.0).map(|&x| Fe(x))
    }
}

impl fmt::Display for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}", self.p, self.f)
    }
}
