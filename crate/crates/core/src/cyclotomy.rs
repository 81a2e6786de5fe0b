//! Cyclotomic classes `C_i = ω^i⟨ω^e⟩` of `F_q^*` and the cyclotomic numbers
//! `(i, j)_e = |(C_i + 1) ∩ C_j|`, by brute force and by the closed forms for
//! `e = 4` and `e = 6` (both with `f = (q − 1)/e` even).

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{pow_mod, prime_power, ChainRing, Elem};
use crate::error::{Error, Result};

/// Largest field order handled by [`FiniteField`].
pub const DEFAULT_FIELD_CAP: u64 = 1 << 21;

/// `F_q` with discrete log tables for the least primitive element.
///
/// Elements are canonical indices of the underlying ring, so for prime `q`
/// an element is its integer value.
#[derive(Debug)]
pub struct FiniteField {
    ring: ChainRing,
    q: u64,
    omega: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FiniteField {
    pub fn new(q: u64) -> Result<Self> {
        Self::with_cap(q, DEFAULT_FIELD_CAP)
    }

    pub fn with_cap(q: u64, cap: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        let ring = ChainRing::with_cap(p, 1, k, cap)?;
        let order = q - 1;
        let factors = prime_factors(order);
        let omega = (1..q as u32)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| ring.pow(Elem(g), order / r) != Elem::ONE)
            })
            .expect("F_q^* is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut x = Elem::ONE;
        for i in 0..order as u32 {
            exp.push(x.0);
            log[x.index()] = i;
            x = ring.mul(x, Elem(omega));
        }
        Ok(FiniteField {
            ring,
            q,
            omega,
            exp,
            log,
        })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.ring.p()
    }

    pub fn ring(&self) -> &ChainRing {
        &self.ring
    }

    /// The least primitive element in canonical order.
    pub fn omega(&self) -> u32 {
        self.omega
    }

    /// `ω^i`.
    pub fn exp(&self, i: u64) -> u32 {
        self.exp[(i % (self.q - 1)) as usize]
    }

    /// Discrete log to base `ω`; `None` at zero.
    pub fn log(&self, x: u32) -> Option<u64> {
        match self.log[x as usize] {
            u32::MAX => None,
            l => Some(u64::from(l)),
        }
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.ring.add(Elem(a), Elem(b)).0
    }

    pub fn neg(&self, a: u32) -> u32 {
        self.ring.neg(Elem(a)).0
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let l = u64::from(self.log[a as usize]) + u64::from(self.log[b as usize]);
        self.exp(l)
    }

    pub fn inv(&self, a: u32) -> Option<u32> {
        self.log(a).map(|l| self.exp(self.q - 1 - l))
    }

    /// The image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u32 {
        self.ring.from_int(n).0
    }
}

/// The classes of order `e` in `F_q`.
#[derive(Clone, Debug)]
pub struct CyclotomicSetup {
    field: Arc<FiniteField>,
    e: u64,
    f: u64,
}

/// Builds the order-`e` classes of `F_q`; needs `e | q − 1` and `e, f > 1`.
pub fn setup(q: u64, e: u64) -> Result<CyclotomicSetup> {
    if prime_power(q).is_none() {
        return Err(Error::NotPrimePower(q));
    }
    if e < 2 || !(q - 1).is_multiple_of(e) || (q - 1) / e < 2 {
        return Err(Error::InvalidParameters(format!(
            "e = {e} must divide q - 1 = {} with e, (q-1)/e > 1",
            q - 1
        )));
    }
    CyclotomicSetup::new(Arc::new(FiniteField::new(q)?), e)
}

impl CyclotomicSetup {
    pub fn new(field: Arc<FiniteField>, e: u64) -> Result<Self> {
        let q = field.order();
        if e < 2 || !(q - 1).is_multiple_of(e) || (q - 1) / e < 2 {
            return Err(Error::InvalidParameters(format!(
                "e = {e} must divide q - 1 = {} with e, (q-1)/e > 1",
                q - 1
            )));
        }
        Ok(CyclotomicSetup {
            f: (q - 1) / e,
            field,
            e,
        })
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.field.order()
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn f(&self) -> u64 {
        self.f
    }

    pub fn omega(&self) -> u32 {
        self.field.omega()
    }

    /// Members of `C_i` in the order `ω^i, ω^{i+e}, …`.
    pub fn class(&self, i: u64) -> Vec<u32> {
        (0..self.f)
            .map(|j| self.field.exp(i + self.e * j))
            .collect()
    }

    /// Index of the class holding `x`; `None` at zero.
    pub fn class_of(&self, x: u32) -> Option<u64> {
        self.field.log(x).map(|l| l % self.e)
    }

    /// The class of `−1`.
    pub fn minus_one_class(&self) -> u64 {
        self.class_of(self.field.neg(1)).expect("-1 is nonzero")
    }
}

/// An `e × e` matrix of cyclotomic numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CyclotomicTable {
    pub q: u64,
    pub e: u64,
    pub rows: Vec<Vec<u64>>,
}

impl CyclotomicTable {
    pub fn get(&self, i: u64, j: u64) -> u64 {
        self.rows[i as usize][j as usize]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    /// Whether `(i, ·)` is constant.
    pub fn row_is_flat(&self, i: u64) -> bool {
        self.rows[i as usize].windows(2).all(|p| p[0] == p[1])
    }
}

impl fmt::Display for CyclotomicTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .rows
            .iter()
            .flatten()
            .map(|x| x.to_string().len())
            .max()
            .unwrap_or(1);
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Counts `|(C_i + 1) ∩ C_j|` directly.
pub fn cyclotomic_numbers_bruteforce(setup: &CyclotomicSetup) -> CyclotomicTable {
    let e = setup.e as usize;
    let mut rows = vec![vec![0u64; e]; e];
    let field = setup.field();
    for l in 0..setup.q() - 1 {
        let x = field.exp(l);
        if let Some(j) = setup.class_of(field.add(x, 1)) {
            rows[(l % setup.e) as usize][j as usize] += 1;
        }
    }
    CyclotomicTable {
        q: setup.q(),
        e: setup.e,
        rows,
    }
}

/// `Σ_j (i, j) = f − [i is the class of −1]` for every row.
pub fn row_sums_hold(setup: &CyclotomicSetup, table: &CyclotomicTable) -> bool {
    let minus_one = setup.minus_one_class();
    (0..setup.e).all(|i| {
        let sum: u64 = table.rows[i as usize].iter().sum();
        sum == setup.f - u64::from(i == minus_one)
    })
}

/// `q = s² + 4t²` with `s ≡ 1 (mod 4)` and `p ∤ s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadDecomp {
    pub s: i64,
    pub t: i64,
}

/// `q = a² + 3b²` with `a ≡ 1 (mod 3)` and `p ∤ a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SexticDecomp {
    pub a: i64,
    pub b: i64,
}

fn isqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&x| x * x == n)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Decompositions `q = x² + c·y²` with `x ≡ 1 (mod r)`, `p ∤ x` and `y ≥ 0`.
fn norm_forms(q: u64, c: u64, r: i64) -> Vec<(i64, i64)> {
    let p = prime_power(q).map(|(p, _)| p).unwrap_or(q);
    let mut out = Vec::new();
    let mut y = 0u64;
    while c * y * y <= q {
        if let Some(x) = isqrt(q - c * y * y) {
            for x in [x as i64, -(x as i64)] {
                if x.rem_euclid(r) == 1 && gcd(x.unsigned_abs(), p) == 1 {
                    out.push((x, y as i64));
                }
            }
        }
        y += 1;
    }
    out
}

fn exact_div(num: i64, den: i64, what: &str) -> Result<u64> {
    if num < 0 || num % den != 0 {
        return Err(Error::Verification(format!(
            "{what}: {num}/{den} is not a nonnegative integer"
        )));
    }
    Ok((num / den) as u64)
}

fn quartic_matrix(q: u64, d: QuadDecomp) -> Result<Vec<Vec<u64>>> {
    let (q, s, t) = (q as i64, d.s, d.t);
    let a = exact_div(q - 11 - 6 * s, 16, "(0,0)")?;
    let b = exact_div(q - 3 + 2 * s + 8 * t, 16, "(0,1)")?;
    let c = exact_div(q - 3 + 2 * s, 16, "(0,2)")?;
    let dd = exact_div(q - 3 + 2 * s - 8 * t, 16, "(0,3)")?;
    let e = exact_div(q + 1 - 2 * s, 16, "(1,2)")?;
    Ok(vec![
        vec![a, b, c, dd],
        vec![b, dd, e, e],
        vec![c, e, c, e],
        vec![dd, e, e, b],
    ])
}

/// Closed-form order-4 table (`q ≡ 1 mod 8`, `p ≡ 1 mod 4`).
///
/// The sign of `t` is the one whose table agrees with the brute-force count
/// for the canonical `ω`; flipping it swaps `(0,1)` and `(0,3)`.
pub fn table_e4(setup: &CyclotomicSetup) -> Result<(QuadDecomp, CyclotomicTable)> {
    let q = setup.q();
    let p = setup.field().characteristic();
    if setup.e() != 4 || !setup.f().is_multiple_of(2) || p % 4 != 1 {
        return Err(Error::Precondition(format!(
            "order-4 formulas need e = 4, f even and p = 1 mod 4 (q = {q}, e = {})",
            setup.e()
        )));
    }
    let brute = cyclotomic_numbers_bruteforce(setup);
    let candidates = norm_forms(q, 4, 4);
    if candidates.is_empty() {
        return Err(Error::Verification(format!(
            "no decomposition q = s^2 + 4t^2 for q = {q}"
        )));
    }
    for (s, t) in candidates {
        for t in [t, -t] {
            let d = QuadDecomp { s, t };
            if let Ok(rows) = quartic_matrix(q, d) {
                let table = CyclotomicTable { q, e: 4, rows };
                if table == brute {
                    return Ok((d, table));
                }
            }
        }
    }
    Err(Error::Verification(format!(
        "no sign of t reproduces the order-4 cyclotomic numbers of F_{q}"
    )))
}

/// The `m` with `ω^m = 2`.
pub fn cube_index(setup: &CyclotomicSetup) -> Option<u64> {
    let field = setup.field();
    field.log(field.from_int(2))
}

fn sextic_matrix(q: u64, d: SexticDecomp) -> Result<Vec<Vec<u64>>> {
    let (q, a, b) = (q as i64, d.a, d.b);
    let c00 = exact_div(q - 17 - 20 * a, 36, "(0,0)")?;
    let c01 = exact_div(q - 5 + 4 * a + 18 * b, 36, "(0,1)")?;
    let c02 = exact_div(q - 5 + 4 * a + 6 * b, 36, "(0,2)")?;
    let c03 = exact_div(q - 5 + 4 * a, 36, "(0,3)")?;
    let c04 = exact_div(q - 5 + 4 * a - 6 * b, 36, "(0,4)")?;
    let c05 = exact_div(q - 5 + 4 * a - 18 * b, 36, "(0,5)")?;
    let e = exact_div(q + 1 - 2 * a, 36, "(1,2)")?;
    Ok(vec![
        vec![c00, c01, c02, c03, c04, c05],
        vec![c01, c05, e, e, e, e],
        vec![c02, e, c04, e, e, e],
        vec![c03, e, e, c03, e, e],
        vec![c04, e, e, e, c02, e],
        vec![c05, e, e, e, e, c01],
    ])
}

/// Closed-form order-6 table (`q ≡ 1 mod 12`, 2 a cube in `F_q`).
///
/// The sign of `b` is fixed by `ω^{(q−1)/3} ≡ −(a + b)/(a − b) (mod p)`.
pub fn table_e6(setup: &CyclotomicSetup) -> Result<(SexticDecomp, CyclotomicTable)> {
    let q = setup.q();
    let field = setup.field();
    let p = field.characteristic();
    if setup.e() != 6 || !setup.f().is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "order-6 formulas need e = 6 and f even (q = {q}, e = {})",
            setup.e()
        )));
    }
    match cube_index(setup) {
        Some(m) if m % 3 == 0 => {}
        _ => {
            return Err(Error::Precondition(format!("2 is not a cube in F_{q}")));
        }
    }
    let root = field.exp((q - 1) / 3);
    if u64::from(root) >= p {
        return Err(Error::Precondition(format!(
            "the cube root of unity of F_{q} is not in the prime field"
        )));
    }
    let root = u64::from(root);
    for (a, b) in norm_forms(q, 3, 3) {
        for b in [b, -b] {
            let num = (-(a + b)).rem_euclid(p as i64) as u64;
            let den = (a - b).rem_euclid(p as i64) as u64;
            if den == 0 {
                continue;
            }
            // -(a+b)/(a-b) mod p via Fermat inversion
            let ratio = num * pow_mod(den, p - 2, p) % p;
            if ratio == root {
                let d = SexticDecomp { a, b };
                let rows = sextic_matrix(q, d)?;
                return Ok((d, CyclotomicTable { q, e: 6, rows }));
            }
        }
    }
    Err(Error::Verification(format!(
        "no decomposition q = a^2 + 3b^2 matches the cube root of unity of F_{q}"
    )))
}

/// Where the convolution `C_0 · C_i` departs from
/// `Σ_k (i, k) C_k + |C_0 ∩ −C_i|·[0]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SchurWitness {
    pub element: u32,
    pub expected: u64,
    pub found: u64,
}

/// Checks the Schur-ring product `C_0 · C_i` by direct convolution in the
/// additive group of `F_q`.
pub fn schur_check(setup: &CyclotomicSetup, i: u64) -> Result<(), SchurWitness> {
    let field = setup.field();
    let table = cyclotomic_numbers_bruteforce(setup);
    let c0 = setup.class(0);
    let ci = setup.class(i);
    let mut tally = vec![0u64; setup.q() as usize];
    for &x in &c0 {
        for &y in &ci {
            tally[field.add(x, y) as usize] += 1;
        }
    }
    let minus_ci: std::collections::HashSet<u32> = ci.iter().map(|&y| field.neg(y)).collect();
    let at_zero = c0.iter().filter(|x| minus_ci.contains(x)).count() as u64;
    for (z, &found) in tally.iter().enumerate() {
        let expected = match setup.class_of(z as u32) {
            None => at_zero,
            Some(k) => table.get(i, k),
        };
        if found != expected {
            return Err(SchurWitness {
                element: z as u32,
                expected,
                found,
            });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_basics() {
        let f = FiniteField::new(17).unwrap();
        assert_eq!(f.omega(), 3);
        assert_eq!(f.mul(5, 7), 35 % 17);
        assert_eq!(f.inv(3), Some(6));
        assert_eq!(f.log(0), None);

        let f9 = FiniteField::new(9).unwrap();
        assert_eq!(f9.exp(8), 1);
        let mut seen: Vec<u32> = (0..8).map(|i| f9.exp(i)).collect();
        seen.sort_unstable();
        assert_eq!(seen, (1..9).collect::<Vec<_>>());

        assert_eq!(FiniteField::new(12).unwrap_err(), Error::NotPrimePower(12));
    }

    #[test]
    fn setups() {
        let s = setup(17, 4).unwrap();
        assert_eq!(s.omega(), 3);
        let mut c0 = s.class(0);
        c0.sort_unstable();
        assert_eq!(c0, vec![1, 4, 13, 16]);

        let mut qr = setup(5, 2).unwrap().class(0);
        qr.sort_unstable();
        assert_eq!(qr, vec![1, 4]);

        let s16 = setup(16, 5).unwrap();
        assert_eq!(s16.f(), 3);
        let mut all: Vec<u32> = (0..5).flat_map(|i| s16.class(i)).collect();
        all.sort_unstable();
        assert_eq!(all, (1..16).collect::<Vec<_>>());

        assert!(setup(17, 5).is_err());
        assert!(setup(7, 6).is_err());
    }

    #[test]
    fn brute_force_q17() {
        let s = setup(17, 4).unwrap();
        let t = cyclotomic_numbers_bruteforce(&s);
        assert_eq!(t.get(0, 0), 0);
        assert_eq!(t.get(1, 2), 1);
        assert!(row_sums_hold(&s, &t));
        assert!(t.row_is_flat(2));
        assert!(!t.row_is_flat(1));
    }

    #[test]
    fn quartic_formulas() {
        let s = setup(17, 4).unwrap();
        let (d, t) = table_e4(&s).unwrap();
        assert_eq!(d.s, 1);
        assert_eq!(d.t.abs(), 2);
        assert_eq!(t.get(0, 2), 1);
        assert_eq!(t.get(0, 0), 0);
        assert!(table_e4(&setup(13, 4).unwrap()).is_err());
        assert!(table_e4(&setup(17, 2).unwrap()).is_err());
    }

    #[test]
    fn sextic_formulas() {
        let s = setup(109, 6).unwrap();
        assert_eq!(cube_index(&s).map(|m| m % 3), Some(0));
        let (d, t) = table_e6(&s).unwrap();
        assert_eq!((d.a, d.b.abs()), (1, 6));
        assert_eq!(t.get(0, 3), 3);
        assert_eq!(t.get(1, 3), 3);
        assert_eq!(t, cyclotomic_numbers_bruteforce(&s));
        // 2 is not a cube mod 13
        assert!(matches!(
            table_e6(&setup(13, 6).unwrap()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn schur_relation() {
        assert_eq!(schur_check(&setup(17, 4).unwrap(), 2), Ok(()));
        assert_eq!(schur_check(&setup(5, 2).unwrap(), 0), Ok(()));
        assert_eq!(schur_check(&setup(13, 3).unwrap(), 1), Ok(()));
        for i in 0..4 {
            assert_eq!(schur_check(&setup(81, 4).unwrap(), i), Ok(()));
        }
    }

    #[test]
    fn display_is_aligned() {
        let t = CyclotomicTable {
            q: 0,
            e: 2,
            rows: vec![vec![1, 10], vec![100, 0]],
        };
        assert_eq!(t.to_string(), "  1  10\n100   0\n");
        assert_eq!(t.to_json(), r#"{"q":0,"e":2,"rows":[[1,10],[100,0]]}"#);
    }
}
