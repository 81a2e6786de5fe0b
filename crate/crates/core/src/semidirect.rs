//! The group `F_q ⋊ ⟨ρ⟩` with `ρ(x) = ω^e x`, connection sets
//! `W = {(−1 + d, ρ^i) : d ∈ D}` for `K`-invariant `D`, and exact checks of
//! `W² = t·e + λW + μ(G − e − W)` in the group ring.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{is_prime, pow_mod, prime_power, ChainRing, Elem};
use crate::cyclotomy::{cyclotomic_numbers_bruteforce, setup, CyclotomicSetup, FiniteField};
use crate::digraph::{
    cayley_digraph, verify_dsrg_with, Digraph, DsrgParams, FiniteGroup, Relation,
};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Largest vertex count for which the Cayley digraph is materialized.
pub const DEFAULT_ADJACENCY_CAP: usize = 4000;

/// `H ⋊ K` with `H = (F_q, +)` and `K = ⟨ρ⟩` cyclic of order `f`.
///
/// Element `(h, i)` is stored as `h·f + i`; the law is
/// `(h, i)(h′, i′) = (h + ω^{ei}h′, i + i′ mod f)`.
#[derive(Clone, Debug)]
pub struct SemidirectGroup {
    setup: CyclotomicSetup,
    /// `ω^{ei}` for `0 ≤ i < f`.
    rho: Vec<u32>,
}

pub fn build_group(q: u64, e: u64) -> Result<SemidirectGroup> {
    Ok(SemidirectGroup::new(setup(q, e)?))
}

impl SemidirectGroup {
    pub fn new(setup: CyclotomicSetup) -> Self {
        let rho = (0..setup.f())
            .map(|i| setup.field().exp(setup.e() * i))
            .collect();
        SemidirectGroup { setup, rho }
    }

    pub fn setup(&self) -> &CyclotomicSetup {
        &self.setup
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.setup.field()
    }

    pub fn f(&self) -> usize {
        self.rho.len()
    }

    pub fn element(&self, h: u32, i: usize) -> usize {
        h as usize * self.f() + i
    }

    pub fn parts(&self, x: usize) -> (u32, usize) {
        ((x / self.f()) as u32, x % self.f())
    }
}

impl FiniteGroup for SemidirectGroup {
    fn order(&self) -> usize {
        self.setup.q() as usize * self.f()
    }

    fn identity(&self) -> usize {
        0
    }

    fn mul(&self, a: usize, b: usize) -> usize {
        let (h, i) = self.parts(a);
        let (h2, i2) = self.parts(b);
        let field = self.field();
        let h = field.add(h, field.mul(self.rho[i], h2));
        self.element(h, (i + i2) % self.f())
    }

    fn inv(&self, a: usize) -> usize {
        let (h, i) = self.parts(a);
        let back = (self.f() - i) % self.f();
        let field = self.field();
        self.element(field.neg(field.mul(self.rho[back], h)), back)
    }
}

/// `W = (−1 + D, K)` for a union `D` of cyclotomic classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionSet {
    /// Classes making up `D`, ascending.
    pub classes: Vec<u64>,
    /// Sorted element indices.
    pub members: Vec<usize>,
}

/// Builds `W` from `D`, which must be a union of classes not containing 1.
pub fn connection_set(group: &SemidirectGroup, d: &[u32]) -> Result<ConnectionSet> {
    let s = group.setup();
    let set: BTreeSet<u32> = d.iter().copied().collect();
    if set.iter().any(|&x| u64::from(x) >= s.q()) {
        return Err(Error::InvalidParameters(
            "D has elements outside F_q".into(),
        ));
    }
    if set.contains(&1) {
        return Err(Error::InvalidParameters(
            "1 in D would put the identity in W".into(),
        ));
    }
    let mut classes = BTreeSet::new();
    for &x in &set {
        match s.class_of(x) {
            Some(c) => {
                classes.insert(c);
            }
            None => {
                return Err(Error::InvalidParameters(
                    "D is not K-invariant: it contains 0".into(),
                ))
            }
        }
    }
    if set.len() as u64 != classes.len() as u64 * s.f() {
        return Err(Error::InvalidParameters(
            "D is not K-invariant: it is not a union of cyclotomic classes".into(),
        ));
    }
    let classes: Vec<u64> = classes.into_iter().collect();
    Ok(with_classes(group, classes))
}

/// `W` for `D = ∪ C_c` over the given classes.
pub fn connection_set_from_classes(
    group: &SemidirectGroup,
    classes: &[u64],
) -> Result<ConnectionSet> {
    let s = group.setup();
    if let Some(&c) = classes.iter().find(|&&c| c >= s.e()) {
        return Err(Error::OutOfRange {
            index: c,
            order: s.e(),
        });
    }
    let d: Vec<u32> = classes.iter().flat_map(|&c| s.class(c)).collect();
    connection_set(group, &d)
}

fn with_classes(group: &SemidirectGroup, classes: Vec<u64>) -> ConnectionSet {
    let s = group.setup();
    let field = s.field();
    let minus_one = field.neg(1);
    let mut members: Vec<usize> = classes
        .iter()
        .flat_map(|&c| s.class(c))
        .flat_map(|d| {
            let h = field.add(minus_one, d);
            (0..group.f()).map(move |i| group.element(h, i))
        })
        .collect();
    members.sort_unstable();
    ConnectionSet { classes, members }
}

/// A coefficient of `W²` that breaks the DSRG identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupRingViolation {
    pub element: usize,
    pub relation: Relation,
    pub expected: u64,
    pub found: u64,
}

impl fmt::Display for GroupRingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {} has multiplicity {} in W^2, expected {} ({:?})",
            self.element, self.found, self.expected, self.relation
        )
    }
}

/// How `W²` is tallied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SquarePath {
    /// Uses `W = W_0·K` when `W` is a union of right cosets of `{(0, i)}`,
    /// tallying only `W·W_0` (a factor `f` fewer products).
    #[default]
    Auto,
    /// All `|W|²` products.
    Full,
}

fn is_k_saturated(group: &SemidirectGroup, members: &[usize]) -> bool {
    let f = group.f();
    members.len().is_multiple_of(f)
        && members
            .chunks(f)
            .all(|c| c[0] % f == 0 && c.iter().enumerate().all(|(i, &x)| x == c[0] + i))
}

/// Multiplicities of every element in `W²`.
pub fn square_tally(
    group: &SemidirectGroup,
    w: &[usize],
    path: SquarePath,
    exec: Execution,
) -> Vec<u32> {
    let order = group.order();
    let f = group.f();
    if path == SquarePath::Auto && is_k_saturated(group, w) {
        let w0: Vec<usize> = w.iter().copied().filter(|x| x % f == 0).collect();
        let partial = exec::tally(exec, w.len(), order, |range, acc| {
            for &a in &w[range] {
                for &b in &w0 {
                    acc[group.mul(a, b)] += 1;
                }
            }
        });
        let mut out = vec![0u32; order];
        for (block, chunk) in partial.chunks(f).enumerate() {
            let sum: u32 = chunk.iter().sum();
            out[block * f..(block + 1) * f].fill(sum);
        }
        return out;
    }
    exec::tally(exec, w.len(), order, |range, acc| {
        for &a in &w[range] {
            for &b in w {
                acc[group.mul(a, b)] += 1;
            }
        }
    })
}

/// Checks that `Cay(G, W)` is a DSRG through `W²` alone and recovers
/// `(|G|, |W|, λ, μ, t)`.
pub fn groupring_square_check(
    group: &SemidirectGroup,
    w: &ConnectionSet,
) -> Result<DsrgParams, GroupRingViolation> {
    groupring_square_check_with(group, w, SquarePath::Auto, Execution::default())
}

pub fn groupring_square_check_with(
    group: &SemidirectGroup,
    w: &ConnectionSet,
    path: SquarePath,
    exec: Execution,
) -> Result<DsrgParams, GroupRingViolation> {
    let order = group.order();
    let tally = square_tally(group, &w.members, path, exec);
    let mut inset = vec![false; order];
    for &x in &w.members {
        inset[x] = true;
    }
    let t = u64::from(tally[0]);
    let lambda = w.members.first().map_or(0, |&x| u64::from(tally[x]));
    let mu = (1..order)
        .find(|&x| !inset[x])
        .map_or(0, |x| u64::from(tally[x]));
    for (x, &found) in tally.iter().enumerate() {
        let (relation, expected) = if x == 0 {
            (Relation::Diagonal, t)
        } else if inset[x] {
            (Relation::Arc, lambda)
        } else {
            (Relation::NonArc, mu)
        };
        if u64::from(found) != expected {
            return Err(GroupRingViolation {
                element: x,
                relation,
                expected,
                found: u64::from(found),
            });
        }
    }
    Ok(DsrgParams::new(
        order as u64,
        w.members.len() as u64,
        lambda,
        mu,
        t,
    ))
}

/// Whether `(i, j)_e` is constant in `j`.
pub fn flatness_check(setup: &CyclotomicSetup, i: u64) -> bool {
    cyclotomic_numbers_bruteforce(setup).row_is_flat(i)
}

#[derive(Clone, Copy, Debug)]
pub struct SemidirectOptions {
    /// Materialize and square the adjacency matrix when `v` is at most this.
    pub adjacency_cap: usize,
    pub exec: Execution,
    pub path: SquarePath,
}

impl Default for SemidirectOptions {
    fn default() -> Self {
        SemidirectOptions {
            adjacency_cap: DEFAULT_ADJACENCY_CAP,
            exec: Execution::default(),
            path: SquarePath::Auto,
        }
    }
}

/// A verified semidirect Cayley digraph.
#[derive(Clone, Debug)]
pub struct SemidirectConstruction {
    pub group: SemidirectGroup,
    pub connection: ConnectionSet,
    /// Parameters from the group-ring check.
    pub params: DsrgParams,
    /// Parameters from the adjacency check, when `v` is within the cap.
    pub adjacency: Option<DsrgParams>,
    pub digraph: Option<Digraph>,
}

/// Builds `Cay(F_q ⋊ K, W)` for `D = ∪ C_c` and verifies it with the
/// group-ring oracle, and with the adjacency oracle when `v` is within the cap.
pub fn semidirect_construct(
    q: u64,
    e: u64,
    classes: &[u64],
    opts: SemidirectOptions,
) -> Result<SemidirectConstruction> {
    let group = build_group(q, e)?;
    let connection = connection_set_from_classes(&group, classes)?;
    let params = groupring_square_check_with(&group, &connection, opts.path, opts.exec)
        .map_err(|v| Error::Verification(v.to_string()))?;
    let (digraph, adjacency) = if group.order() <= opts.adjacency_cap {
        let g = cayley_digraph(&group, &connection.members)?;
        let adj =
            verify_dsrg_with(&g, opts.exec).map_err(|v| Error::Verification(v.to_string()))?;
        if adj != params {
            return Err(Error::Verification(format!(
                "adjacency parameters {adj} disagree with group-ring parameters {params}"
            )));
        }
        (Some(g), Some(adj))
    } else {
        (None, None)
    };
    Ok(SemidirectConstruction {
        group,
        connection,
        params,
        adjacency,
        digraph,
    })
}

fn precondition(clause: &str, n: u64) -> Error {
    Error::Precondition(format!("{n}: {clause}"))
}

/// `t` with `n = 1 + c·t²`, `t > 0`.
fn norm_root(n: u64, c: u64) -> Option<u64> {
    if n < 1 + c || !(n - 1).is_multiple_of(c) {
        return None;
    }
    let sq = (n - 1) / c;
    let r = (sq as f64).sqrt() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&x| x * x == sq)
}

/// The tuple `((p−1)p/4, (p−1)²/16, (p−1)²/64, (p−1)²/64 − (p−1)/16, (p−1)²/64)`
/// attached to `p = 1 + 4t²`.
pub fn quartic_stated_parameters(p: u64) -> DsrgParams {
    let n = p - 1;
    DsrgParams::new(
        n * p / 4,
        n * n / 16,
        n * n / 64,
        n * n / 64 - n / 16,
        n * n / 64,
    )
}

/// The tuple `((q−1)q/6, (q−1)²/36, (q−1)²/216, (q−1)²/216 − (q−1)/36, (q−1)²/216)`
/// attached to `q = 1 + 3b²`.
pub fn sextic_stated_parameters(q: u64) -> DsrgParams {
    let n = q - 1;
    DsrgParams::new(
        n * q / 6,
        n * n / 36,
        n * n / 216,
        n * n / 216 - n / 36,
        n * n / 216,
    )
}

/// What the `e = 4` construction actually yields: `λ = (p−1)²/64 − (p−1)/16`
/// and `μ = t = (p−1)²/64`.
pub fn quartic_parameters(p: u64) -> DsrgParams {
    let s = quartic_stated_parameters(p);
    DsrgParams::new(s.v, s.k, s.mu, s.lambda, s.t)
}

/// What the `e = 6` construction actually yields: `λ = (q−1)²/216 − (q−1)/36`
/// and `μ = t = (q−1)²/216`.
pub fn sextic_parameters(q: u64) -> DsrgParams {
    let s = sextic_stated_parameters(q);
    DsrgParams::new(s.v, s.k, s.mu, s.lambda, s.t)
}

/// `e = 4`, `D = C_2` over a prime `p = 1 + 4t²` with `t` even.
pub fn quartic_construct(p: u64, opts: SemidirectOptions) -> Result<SemidirectConstruction> {
    if !is_prime(p) {
        return Err(precondition("p must be prime", p));
    }
    let t = norm_root(p, 4).ok_or_else(|| precondition("p must be 1 + 4t^2", p))?;
    if t % 2 != 0 {
        return Err(precondition("t in p = 1 + 4t^2 must be even", p));
    }
    semidirect_construct(p, 4, &[2], opts)
}

/// `e = 6`, `D = C_3` over a prime power `q = 1 + 3b²` with `b` even and 2 a
/// cube in `F_q`.
pub fn sextic_construct(q: u64, opts: SemidirectOptions) -> Result<SemidirectConstruction> {
    if prime_power(q).is_none() {
        return Err(precondition("q must be a prime power", q));
    }
    let b = norm_root(q, 3).ok_or_else(|| precondition("q must be 1 + 3b^2", q))?;
    if b % 2 != 0 {
        return Err(precondition("b in q = 1 + 3b^2 must be even", q));
    }
    if !two_is_cube(q) {
        return Err(precondition("2 must be a cube in F_q", q));
    }
    semidirect_construct(q, 6, &[3], opts)
}

/// `2^{(q−1)/3} = 1` in `F_q` (`q ≡ 1 mod 3`).
fn two_is_cube(q: u64) -> bool {
    let Some((p, k)) = prime_power(q) else {
        return false;
    };
    if p == 2 || !(q - 1).is_multiple_of(3) {
        return false;
    }
    if k == 1 {
        return pow_mod(2, (q - 1) / 3, q) == 1;
    }
    match ChainRing::with_cap(p, 1, k, q) {
        Ok(ring) => ring.pow(ring.from_int(2), (q - 1) / 3) == Elem::ONE,
        Err(_) => false,
    }
}

/// Primes `p ≤ bound` with `p = 1 + 4t²`, `t` even.
pub fn enumerate_e4(bound: u64) -> Vec<u64> {
    (1..)
        .map(|h: u64| 1 + 16 * h * h)
        .take_while(|&p| p <= bound)
        .filter(|&p| is_prime(p))
        .collect()
}

/// Prime powers `q ≤ bound` with `q = 1 + 3b²`, `b` even, 2 a cube in `F_q`.
pub fn enumerate_e6(bound: u64) -> Vec<u64> {
    (1..)
        .map(|h: u64| 1 + 12 * h * h)
        .take_while(|&q| q <= bound)
        .filter(|&q| two_is_cube(q))
        .collect()
}
