//! Exact arithmetic in the finite chain rings `Z_{p^s}`, `GF(p^d)` and
//! `GR(p^s, d)`.
//!
//! An element is stored as its canonical index: the coefficient vector
//! `c_0 + c_1 x + … + c_{d-1} x^{d-1}` (each `c_i` in `[0, p^s)`) read as the
//! base-`p^s` number `Σ c_i (p^s)^i`. Index 0 is the zero element, index 1 is
//! the identity, and for `d = 1` the index is the residue itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default bound on `|R| = p^{sd}`.
pub const DEFAULT_RING_CAP: u64 = 1 << 16;

// Rings up to this order carry a precomputed addition table.
const ADD_TABLE_MAX: u64 = 512;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// `Some((p, k))` when `q = p^k` with `p` prime and `k ≥ 1`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !q.is_multiple_of(p) {
        // no factor up to sqrt(q)
        return Some((q, 1));
    }
    let mut r = q;
    let mut k = 0;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let m = modulus as u128;
    let mut acc: u128 = 1 % m;
    let mut b = base as u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

fn checked_pow(base: u64, exp: u64) -> Option<u64> {
    let e = u32::try_from(exp).ok()?;
    base.checked_pow(e)
}

/// A ring element by canonical index.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// An element `(x, y)` of `G = R × R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: Elem,
    pub y: Elem,
}

/// A concrete finite chain ring with residue field `GF(p^d)` and nilpotency
/// length `s`, realized as the Galois ring `Z_{p^s}[x]/(f)`.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct ChainRing {
    p: u64,
    s: u32,
    d: u32,
    /// `p^s`, the characteristic.
    ps: u64,
    size: u64,
    /// Monic modulus, low coefficient first, length `d + 1`.
    modulus: Vec<u64>,
    add_table: Option<Vec<u32>>,
}

impl PartialEq for ChainRing {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s && self.d == other.d && self.modulus == other.modulus
    }
}

impl Eq for ChainRing {}

impl ChainRing {
    /// Builds the ring with the default size cap.
    pub fn new(p: u64, s: u32, d: u32) -> Result<Self> {
        Self::with_cap(p, s, d, DEFAULT_RING_CAP)
    }

    pub fn with_cap(p: u64, s: u32, d: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 || d == 0 {
            return Err(Error::InvalidParameters(format!(
                "nilpotency length s and residue degree d must be at least 1 (s = {s}, d = {d})"
            )));
        }
        let size = checked_pow(p, u64::from(s) * u64::from(d))
            .filter(|&n| n <= cap && n <= u64::from(u32::MAX))
            .ok_or(Error::SizeCap {
                what: "ring order p^(sd)",
                size: checked_pow(p, u64::from(s) * u64::from(d)).unwrap_or(u64::MAX),
                cap,
            })?;
        let ps = p.pow(s);
        let modulus = if d == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, d as usize)
        };
        let mut ring = ChainRing {
            p,
            s,
            d,
            ps,
            size,
            modulus,
            add_table: None,
        };
        if size <= ADD_TABLE_MAX && d > 1 {
            let n = size as usize;
            let mut table = vec![0u32; n * n];
            for a in 0..n {
                for b in 0..n {
                    table[a * n + b] = ring.add_slow(Elem(a as u32), Elem(b as u32)).0;
                }
            }
            ring.add_table = Some(table);
        }
        Ok(ring)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// `p^s`.
    pub fn characteristic(&self) -> u64 {
        self.ps
    }

    /// `|R| = p^{sd}`.
    pub fn order(&self) -> u64 {
        self.size
    }

    /// `p^d`, the order of the residue field.
    pub fn residue_order(&self) -> u64 {
        self.p.pow(self.d)
    }

    /// The monic modulus, low coefficient first (`[0, 1]` when `d = 1`).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn is_field(&self) -> bool {
        self.s == 1
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.size as u32).map(Elem)
    }

    pub fn elem(&self, index: u64) -> Result<Elem> {
        if index < self.size {
            Ok(Elem(index as u32))
        } else {
            Err(Error::OutOfRange {
                index,
                order: self.size,
            })
        }
    }

    /// Image of an integer under `Z → R`.
    pub fn from_int(&self, n: i64) -> Elem {
        Elem(n.rem_euclid(self.ps as i64) as u32)
    }

    pub fn coeffs(&self, a: Elem) -> Vec<u64> {
        let mut v = Vec::with_capacity(self.d as usize);
        let mut n = u64::from(a.0);
        for _ in 0..self.d {
            v.push(n % self.ps);
            n /= self.ps;
        }
        v
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<Elem> {
        if coeffs.len() != self.d as usize {
            return Err(Error::InvalidParameters(format!(
                "expected {} coefficients, got {}",
                self.d,
                coeffs.len()
            )));
        }
        let mut n = 0u64;
        for &c in coeffs.iter().rev() {
            if c >= self.ps {
                return Err(Error::OutOfRange {
                    index: c,
                    order: self.ps,
                });
            }
            n = n * self.ps + c;
        }
        Ok(Elem(n as u32))
    }

    fn add_slow(&self, a: Elem, b: Elem) -> Elem {
        let (mut x, mut y) = (u64::from(a.0), u64::from(b.0));
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.d {
            out += (x % self.ps + y % self.ps) % self.ps * place;
            x /= self.ps;
            y /= self.ps;
            place *= self.ps;
        }
        Elem(out as u32)
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.d == 1 {
            return Elem(((u64::from(a.0) + u64::from(b.0)) % self.ps) as u32);
        }
        match &self.add_table {
            Some(t) => Elem(t[a.index() * self.size as usize + b.index()]),
            None => self.add_slow(a, b),
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        if self.d == 1 {
            return Elem(((self.ps - u64::from(a.0)) % self.ps) as u32);
        }
        let mut x = u64::from(a.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.d {
            out += (self.ps - x % self.ps) % self.ps * place;
            x /= self.ps;
            place *= self.ps;
        }
        Elem(out as u32)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if self.d == 1 {
            return Elem((u64::from(a.0) * u64::from(b.0) % self.ps) as u32);
        }
        let d = self.d as usize;
        let (x, y) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + xi * yj) % self.ps;
            }
        }
        // x^d ≡ -(f_0 + … + f_{d-1} x^{d-1})
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for j in 0..d {
                let sub = c * self.modulus[j] % self.ps;
                prod[k - d + j] = (prod[k - d + j] + self.ps - sub) % self.ps;
            }
        }
        self.from_coeffs(&prod[..d]).expect("reduced coefficients")
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut acc = Elem::ONE;
        if self.size == 1 {
            return Elem::ZERO;
        }
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// A unit is an element whose reduction mod `p` is nonzero.
    pub fn is_unit(&self, a: Elem) -> bool {
        self.coeffs(a).iter().any(|c| c % self.p != 0)
    }

    /// Membership in the maximal ideal `I = (p)`.
    pub fn in_ideal(&self, a: Elem) -> bool {
        !self.is_unit(a)
    }

    /// Membership in `I^k = (p^k)`.
    pub fn in_ideal_power(&self, a: Elem, k: u32) -> bool {
        if k >= self.s {
            return a == Elem::ZERO;
        }
        let pk = self.p.pow(k);
        self.coeffs(a).iter().all(|c| c % pk == 0)
    }

    /// The coset representatives `J` of `R / I`: the `p^d` elements with
    /// every coefficient in `[0, p)`, in canonical order.
    pub fn coset_reps(&self) -> Vec<Elem> {
        let q = self.residue_order() as usize;
        (0..q)
            .map(|n| {
                let mut rest = n as u64;
                let mut idx = 0u64;
                let mut place = 1u64;
                for _ in 0..self.d {
                    idx += (rest % self.p) * place;
                    rest /= self.p;
                    place *= self.ps;
                }
                Elem(idx as u32)
            })
            .collect()
    }

    /// `|G| = |R|^2`.
    pub fn group_order(&self) -> u64 {
        self.size * self.size
    }

    pub fn group_index(&self, g: GroupElement) -> u32 {
        (u64::from(g.x.0) * self.size + u64::from(g.y.0)) as u32
    }

    pub fn group_element(&self, index: u32) -> GroupElement {
        let n = self.size as u32;
        GroupElement {
            x: Elem(index / n),
            y: Elem(index % n),
        }
    }

    /// Addition in `G = R × R` on canonical indices.
    pub fn group_add(&self, g: u32, h: u32) -> u32 {
        let n = self.size as u32;
        let x = self.add(Elem(g / n), Elem(h / n));
        let y = self.add(Elem(g % n), Elem(h % n));
        x.0 * n + y.0
    }

    pub fn group_neg(&self, g: u32) -> u32 {
        let n = self.size as u32;
        self.neg(Elem(g / n)).0 * n + self.neg(Elem(g % n)).0
    }

    pub fn group_sub(&self, g: u32, h: u32) -> u32 {
        self.group_add(g, self.group_neg(h))
    }
}

/// Remainder of `a` modulo the monic `m` over `Z_p`, low coefficient first.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let c = r.pop().unwrap();
        if c == 0 {
            continue;
        }
        let off = r.len() - dm;
        for j in 0..dm {
            r[off + j] = (r[off + j] + p - c * m[j] % p) % p;
        }
    }
    r
}

fn monic_with_low(p: u64, degree: usize, mut low: u64) -> Vec<u64> {
    let mut v = Vec::with_capacity(degree + 1);
    for _ in 0..degree {
        v.push(low % p);
        low /= p;
    }
    v.push(1);
    v
}

/// Irreducibility over `Z_p` by trial division with every monic polynomial
/// of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let deg = poly.len() - 1;
    for k in 1..=deg / 2 {
        for low in 0..p.pow(k as u32) {
            let cand = monic_with_low(p, k, low);
            if poly_rem(poly, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// The least monic irreducible polynomial of degree `d` over `Z_p`, ordering
/// candidates by their lower coefficients read as the base-`p` number
/// `Σ c_i p^i`.
pub fn least_irreducible(p: u64, d: usize) -> Vec<u64> {
    (0..p.pow(d as u32))
        .map(|low| monic_with_low(p, d, low))
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}
