//! Partial sum families over `G = R × R` built from the spread, and their
//! verification by exact group-ring convolution.
//!
//! A family `{S_{i,j}}` on `m` blocks is a PSF with parameters
//! `(m, n, k, λ, μ, t)` when no diagonal set contains `0_G`, every row and
//! column of sizes sums to `k`, and for every cell
//!
//! ```text
//! Σ_l S_{i,l} S_{l,j} = μ·G + (λ − μ)·S_{i,j} + δ_{i,j}(t − μ)·0_G
//! ```
//!
//! in `Z[G]`. Its difference digraph is then an `(mn, k, λ, μ, t)`-DSRG.

use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{is_prime, ChainRing};
use crate::digraph::{DsrgParams, Relation};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::spread::Spread;

/// `(w, z1, z2)` of a family produced by [`build_psf`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub w: u64,
    pub z1: u64,
    pub z2: u64,
}

/// `z2 = w − 1` or `w`, and `z2 = 1` when `w = 1`.
pub fn z2_admissible(w: u64, z2: u64) -> bool {
    z2 == w || (w >= 2 && z2 == w - 1)
}

/// Parameters of the construction over a ring of order `n = p^{sd}`, without
/// range checks.
pub(crate) fn formula(n: u64, w: u64, z1: u64, z2: u64) -> DsrgParams {
    let (n, w, z1, z2) = (n as i128, w as i128, z1 as i128, z2 as i128);
    let v = (z1 + 1) * n * n;
    let k = (n - 1) * w + z1 * z2 * n;
    let lambda = n + w * w - 3 * w + z1 * z2 * z2;
    let mu = w * w - w + z1 * z2 * z2;
    let t = n * w - w + z1 * z2 * z2;
    DsrgParams::new(v as u64, k as u64, lambda as u64, mu as u64, t as u64)
}

fn check_ranges(q: u64, n: u64, w: u64, z1: u64, z2: u64) -> Result<()> {
    if w == 0 || w > q {
        return Err(Error::InvalidParameters(format!(
            "window width w must satisfy 1 <= w <= p^d = {q}, got {w}"
        )));
    }
    if z1 == 0 || z1 > q - w + 1 {
        return Err(Error::InvalidParameters(format!(
            "z1 must satisfy 1 <= z1 <= p^d - w + 1 = {}, got {z1}",
            q - w + 1
        )));
    }
    if z2 == 0 || z2 > n {
        return Err(Error::InvalidParameters(format!(
            "z2 must satisfy 1 <= z2 <= p^(sd) = {n}, got {z2}"
        )));
    }
    Ok(())
}

/// DSRG parameters `(v, k, λ, μ, t)` of the family with window width `w`,
/// `z1 + 1` blocks and `z2` cosets per off-diagonal cell:
///
/// `((z1+1)N², (N−1)w + z1z2N, N + w² − 3w + z1z2², w² − w + z1z2², Nw − w + z1z2²)`
/// with `N = p^{sd}`.
pub fn psf_parameters(p: u64, s: u32, d: u32, w: u64, z1: u64, z2: u64) -> Result<DsrgParams> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 || d == 0 {
        return Err(Error::InvalidParameters(
            "s and d must be at least 1".into(),
        ));
    }
    let q = p
        .checked_pow(d)
        .ok_or_else(|| Error::InvalidParameters("p^d overflows".into()))?;
    let n = q
        .checked_pow(s)
        .filter(|n| n.checked_mul(*n).is_some())
        .ok_or_else(|| Error::InvalidParameters("p^(2sd) overflows".into()))?;
    check_ranges(q, n, w, z1, z2)?;
    if !z2_admissible(w, z2) {
        return Err(Error::InvalidZ2 { w, z2 });
    }
    Ok(formula(n, w, z1, z2))
}

/// A choice of windows and coset counts for [`build_psf`].
#[derive(Clone, Debug)]
pub struct PsfConfig {
    ring: Arc<ChainRing>,
    w: u64,
    z1: u64,
    z2: u64,
    starts: Vec<u64>,
    seed: Option<u64>,
}

impl PsfConfig {
    /// Windows default to the leftmost ones, `A_i = D_[i, i+w−1]`.
    ///
    /// Only the ranges are checked here; the `z2` rule is enforced by
    /// [`build_psf`] so that violating configurations can still be built with
    /// [`build_psf_forced`].
    pub fn new(ring: Arc<ChainRing>, w: u64, z1: u64, z2: u64) -> Result<Self> {
        check_ranges(ring.residue_order(), ring.order(), w, z1, z2)?;
        Ok(PsfConfig {
            ring,
            w,
            z1,
            z2,
            starts: (0..=z1).collect(),
            seed: None,
        })
    }

    /// Explicit window starts `k_0 < k_1 < … < k_{z1}`.
    pub fn with_starts(mut self, starts: Vec<u64>) -> Result<Self> {
        let last = self.ring.residue_order() - self.w + 1;
        if starts.len() as u64 != self.z1 + 1 {
            return Err(Error::InvalidParameters(format!(
                "expected z1 + 1 = {} window starts, got {}",
                self.z1 + 1,
                starts.len()
            )));
        }
        if starts.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::InvalidParameters(
                "window starts must be strictly increasing".into(),
            ));
        }
        if starts.iter().any(|&k| k > last) {
            return Err(Error::InvalidParameters(format!(
                "window starts must lie in 0..={last}"
            )));
        }
        self.starts = starts;
        Ok(self)
    }

    /// Picks each `T_{i,j}` as `z2` random cosets instead of the first ones.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn ring(&self) -> &Arc<ChainRing> {
        &self.ring
    }

    pub fn construction(&self) -> Construction {
        Construction {
            w: self.w,
            z1: self.z1,
            z2: self.z2,
        }
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }

    pub fn is_admissible(&self) -> bool {
        z2_admissible(self.w, self.z2)
    }

    pub fn parameters(&self) -> Result<DsrgParams> {
        if !self.is_admissible() {
            return Err(Error::InvalidZ2 {
                w: self.w,
                z2: self.z2,
            });
        }
        Ok(formula(self.ring.order(), self.w, self.z1, self.z2))
    }
}

/// An `m × m` array of subsets of `G`, stored as sorted canonical indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsfFamily {
    ring: Arc<ChainRing>,
    m: usize,
    sets: Vec<Vec<u32>>,
    declared: Option<DsrgParams>,
    construction: Option<Construction>,
}

impl PsfFamily {
    /// Wraps arbitrary sets (row-major, `m²` of them). Indices are sorted and
    /// deduplicated.
    pub fn from_sets(
        ring: Arc<ChainRing>,
        m: usize,
        mut sets: Vec<Vec<u32>>,
        declared: Option<DsrgParams>,
    ) -> Result<Self> {
        if sets.len() != m * m {
            return Err(Error::InvalidParameters(format!(
                "expected {} sets for m = {m}, got {}",
                m * m,
                sets.len()
            )));
        }
        let order = ring.group_order();
        for set in &mut sets {
            if let Some(&g) = set.iter().find(|&&g| u64::from(g) >= order) {
                return Err(Error::OutOfRange {
                    index: u64::from(g),
                    order,
                });
            }
            set.sort_unstable();
            set.dedup();
        }
        Ok(PsfFamily {
            ring,
            m,
            sets,
            declared,
            construction: None,
        })
    }

    pub fn ring(&self) -> &Arc<ChainRing> {
        &self.ring
    }

    /// Number of blocks `m`.
    pub fn blocks(&self) -> usize {
        self.m
    }

    pub fn group_order(&self) -> u64 {
        self.ring.group_order()
    }

    pub fn set(&self, i: usize, j: usize) -> &[u32] {
        &self.sets[i * self.m + j]
    }

    /// Parameters claimed by the construction; `None` when withheld.
    pub fn declared(&self) -> Option<DsrgParams> {
        self.declared
    }

    pub fn construction(&self) -> Option<Construction> {
        self.construction
    }

    pub fn to_json(&self) -> String {
        let m = self.m;
        let doc = FamilyJson {
            p: self.ring.p(),
            s: self.ring.s(),
            d: self.ring.d(),
            m,
            sets: (0..m)
                .map(|i| (0..m).map(|j| self.set(i, j).to_vec()).collect())
                .collect(),
            params: self.declared.map(|p| p.as_array()),
        };
        serde_json::to_string(&doc).expect("family serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FamilyJson = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameters(format!("family JSON: {e}")))?;
        let ring = Arc::new(ChainRing::new(doc.p, doc.s, doc.d)?);
        if doc.sets.len() != doc.m || doc.sets.iter().any(|row| row.len() != doc.m) {
            return Err(Error::InvalidParameters(format!(
                "family JSON: sets must be a {0}x{0} array",
                doc.m
            )));
        }
        let sets = doc.sets.into_iter().flatten().collect();
        let declared = doc
            .params
            .map(|[v, k, l, m, t]| DsrgParams::new(v, k, l, m, t));
        PsfFamily::from_sets(ring, doc.m, sets, declared)
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyJson {
    p: u64,
    s: u32,
    d: u32,
    m: usize,
    sets: Vec<Vec<Vec<u32>>>,
    params: Option<[u64; 5]>,
}

/// Builds the family; rejects `z2 ∉ {w − 1, w}`.
pub fn build_psf(cfg: &PsfConfig) -> Result<PsfFamily> {
    cfg.parameters()?;
    build_psf_forced(cfg)
}

/// Builds the family whatever `z2` is. Declared parameters are withheld when
/// `z2` violates the admissibility rule.
pub fn build_psf_forced(cfg: &PsfConfig) -> Result<PsfFamily> {
    let ring = cfg.ring.clone();
    let spread = Spread::build(ring.clone())?;
    let m = (cfg.z1 + 1) as usize;
    let w = cfg.w as usize;
    let z2 = cfg.z2 as usize;
    let starts: Vec<usize> = cfg.starts.iter().map(|&k| k as usize).collect();

    let mut coset_cache: Vec<Option<Vec<u32>>> = vec![None; spread.lines().len()];
    let mut rng = cfg.seed.map(ChaCha8Rng::seed_from_u64);
    let mut sets = Vec::with_capacity(m * m);

    for (i, &start) in starts.iter().enumerate() {
        for j in 0..m {
            if i == j {
                let mut set: Vec<u32> = (start..start + w)
                    .flat_map(|pos| spread.line_at(pos).members.iter().copied())
                    .filter(|&g| g != 0)
                    .collect();
                set.sort_unstable();
                set.dedup();
                sets.push(set);
                continue;
            }
            let pos = if i < j { start } else { start + w - 1 };
            let cosets = coset_cache[pos].get_or_insert_with(|| spread.cosets_at(pos));
            let reps: Vec<u32> = match rng.as_mut() {
                None => cosets[..z2].to_vec(),
                Some(rng) => {
                    let mut picked = sample(rng, cosets.len(), z2).into_vec();
                    picked.sort_unstable();
                    picked.into_iter().map(|c| cosets[c]).collect()
                }
            };
            let line = &spread.line_at(pos).members;
            let ring = &ring;
            let mut set: Vec<u32> = reps
                .iter()
                .flat_map(|&g| line.iter().map(move |&l| ring.group_add(g, l)))
                .collect();
            set.sort_unstable();
            sets.push(set);
        }
    }

    Ok(PsfFamily {
        declared: cfg.parameters().ok(),
        construction: Some(cfg.construction()),
        ring,
        m,
        sets,
    })
}

/// Why a family fails to be a PSF.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsfViolation {
    IdentityOnDiagonal {
        block: usize,
    },
    RowSum {
        block: usize,
        expected: u64,
        found: u64,
    },
    ColumnSum {
        block: usize,
        expected: u64,
        found: u64,
    },
    /// The coefficient of `element` in `Σ_l S_{i,l} S_{l,j}` deviates.
    Multiplicity {
        i: usize,
        j: usize,
        element: u32,
        relation: Relation,
        expected: u64,
        found: u64,
    },
}

impl fmt::Display for PsfViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsfViolation::IdentityOnDiagonal { block } => {
                write!(f, "S[{block}][{block}] contains the identity")
            }
            PsfViolation::RowSum {
                block,
                expected,
                found,
            } => write!(f, "row {block} has total size {found}, expected {expected}"),
            PsfViolation::ColumnSum {
                block,
                expected,
                found,
            } => write!(f, "column {block} has total size {found}, expected {expected}"),
            PsfViolation::Multiplicity {
                i,
                j,
                element,
                relation,
                expected,
                found,
            } => write!(
                f,
                "cell ({i}, {j}): element {element} has multiplicity {found}, expected {expected} ({relation:?})"
            ),
        }
    }
}

fn cell_tally(fam: &PsfFamily, i: usize, j: usize) -> Vec<u32> {
    let ring = &fam.ring;
    let mut tally = vec![0u32; ring.group_order() as usize];
    for l in 0..fam.m {
        let right = fam.set(l, j);
        for &x in fam.set(i, l) {
            for &y in right {
                tally[ring.group_add(x, y) as usize] += 1;
            }
        }
    }
    tally
}

#[derive(Clone, Copy, Default)]
struct Constants {
    t: Option<u64>,
    lambda: Option<u64>,
    mu: Option<u64>,
}

impl Constants {
    fn absorb(&mut self, fam: &PsfFamily, i: usize, j: usize, tally: &[u32]) {
        let set = fam.set(i, j);
        if i == j && self.t.is_none() {
            self.t = Some(u64::from(tally[0]));
        }
        if self.lambda.is_none() {
            if let Some(&g) = set.first() {
                self.lambda = Some(u64::from(tally[g as usize]));
            }
        }
        if self.mu.is_none() {
            let skip_zero = i == j;
            let mut member = set.iter().peekable();
            for g in 0..tally.len() as u32 {
                if member.peek() == Some(&&g) {
                    member.next();
                    continue;
                }
                if skip_zero && g == 0 {
                    continue;
                }
                self.mu = Some(u64::from(tally[g as usize]));
                break;
            }
        }
    }

    fn complete(&self) -> bool {
        self.t.is_some() && self.lambda.is_some() && self.mu.is_some()
    }
}

fn check_cell(fam: &PsfFamily, i: usize, j: usize, c: (u64, u64, u64)) -> Option<PsfViolation> {
    let (t, lambda, mu) = c;
    let tally = cell_tally(fam, i, j);
    let mut inset = vec![false; tally.len()];
    for &g in fam.set(i, j) {
        inset[g as usize] = true;
    }
    tally.iter().enumerate().find_map(|(g, &found)| {
        let (relation, expected) = if i == j && g == 0 {
            (Relation::Diagonal, t)
        } else if inset[g] {
            (Relation::Arc, lambda)
        } else {
            (Relation::NonArc, mu)
        };
        (u64::from(found) != expected).then_some(PsfViolation::Multiplicity {
            i,
            j,
            element: g as u32,
            relation,
            expected,
            found: u64::from(found),
        })
    })
}

/// Checks the three PSF conditions and recovers `(v, k, λ, μ, t)`.
///
/// The constants come from the `(0, 0)` cell (later cells only fill in a
/// constant that cell cannot witness); every cell is then compared against
/// them.
pub fn verify_psf(fam: &PsfFamily) -> Result<DsrgParams, PsfViolation> {
    verify_psf_with(fam, Execution::default())
}

pub fn verify_psf_with(fam: &PsfFamily, exec: Execution) -> Result<DsrgParams, PsfViolation> {
    let m = fam.m;
    if m == 0 {
        return Ok(DsrgParams::new(0, 0, 0, 0, 0));
    }
    for block in 0..m {
        if fam.set(block, block).first() == Some(&0) {
            return Err(PsfViolation::IdentityOnDiagonal { block });
        }
    }
    let k: u64 = (0..m).map(|j| fam.set(0, j).len() as u64).sum();
    for block in 0..m {
        let row: u64 = (0..m).map(|j| fam.set(block, j).len() as u64).sum();
        if row != k {
            return Err(PsfViolation::RowSum {
                block,
                expected: k,
                found: row,
            });
        }
        let col: u64 = (0..m).map(|i| fam.set(i, block).len() as u64).sum();
        if col != k {
            return Err(PsfViolation::ColumnSum {
                block,
                expected: k,
                found: col,
            });
        }
    }

    let mut consts = Constants::default();
    for cell in 0..m * m {
        let (i, j) = (cell / m, cell % m);
        consts.absorb(fam, i, j, &cell_tally(fam, i, j));
        if consts.complete() {
            break;
        }
    }
    let c = (
        consts.t.unwrap_or(0),
        consts.lambda.unwrap_or(0),
        consts.mu.unwrap_or(0),
    );

    match exec::find_first(exec, 0..m * m, |cell| {
        check_cell(fam, cell / m, cell % m, c)
    }) {
        Some(v) => Err(v),
        None => Ok(DsrgParams::new(
            m as u64 * fam.group_order(),
            k,
            c.1,
            c.2,
            c.0,
        )),
    }
}

/// Equal diagonal sizes, equal off-diagonal sizes, and diagonal sets
/// partitioning `G ∖ {0}`.
pub fn is_uniform(fam: &PsfFamily) -> bool {
    let m = fam.m;
    let diag: Vec<usize> = (0..m).map(|i| fam.set(i, i).len()).collect();
    if diag.windows(2).any(|p| p[0] != p[1]) {
        return false;
    }
    let off: Vec<usize> = (0..m)
        .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| fam.set(i, j).len())
        .collect();
    if off.windows(2).any(|p| p[0] != p[1]) {
        return false;
    }
    let order = fam.group_order() as usize;
    let mut hit = vec![0u32; order];
    for i in 0..m {
        for &g in fam.set(i, i) {
            hit[g as usize] += 1;
        }
    }
    hit[0] == 0 && hit[1..].iter().all(|&h| h == 1)
}

/// The uniform family over `GF(p^d)`: `m = (p^d + 1)/w` windows
/// `A_i = D_[wi, w(i+1)−1]` tiling all `p^d + 1` lines.
pub fn build_uniform_psf(p: u64, d: u32, w: u64, z2: u64) -> Result<PsfFamily> {
    let ring = Arc::new(ChainRing::new(p, 1, d)?);
    let q = ring.residue_order();
    if w == 0 || (q + 1) % w != 0 {
        return Err(Error::InvalidParameters(format!(
            "w = {w} must divide p^d + 1 = {}",
            q + 1
        )));
    }
    let m = (q + 1) / w;
    if m < 2 {
        return Err(Error::InvalidParameters(format!(
            "w = {w} leaves a single block"
        )));
    }
    let cfg = PsfConfig::new(ring, w, m - 1, z2)?.with_starts((0..m).map(|i| w * i).collect())?;
    build_psf(&cfg)
}

/// Drops block `c` of a family with at least three blocks.
pub fn deleted_family(fam: &PsfFamily, c: usize) -> Result<PsfFamily> {
    let cons = fam
        .construction
        .ok_or_else(|| Error::Precondition("only families from build_psf can be deleted".into()))?;
    if cons.z1 < 2 {
        return Err(Error::Precondition(format!(
            "deleting a block needs z1 >= 2, got z1 = {}",
            cons.z1
        )));
    }
    if c >= fam.m {
        return Err(Error::OutOfRange {
            index: c as u64,
            order: fam.m as u64,
        });
    }
    let keep: Vec<usize> = (0..fam.m).filter(|&i| i != c).collect();
    let sets = keep
        .iter()
        .flat_map(|&i| keep.iter().map(move |&j| fam.set(i, j).to_vec()))
        .collect();
    let reduced = Construction {
        z1: cons.z1 - 1,
        ..cons
    };
    Ok(PsfFamily {
        ring: fam.ring.clone(),
        m: fam.m - 1,
        sets,
        declared: fam
            .declared
            .map(|_| formula(fam.ring.order(), reduced.w, reduced.z1, reduced.z2)),
        construction: Some(reduced),
    })
}

/// The family of the complementary digraph: `G ∖ {0} ∖ S_{i,i}` on the
/// diagonal and `G ∖ S_{i,j}` elsewhere.
pub fn complement_family(fam: &PsfFamily) -> PsfFamily {
    let m = fam.m;
    let order = fam.group_order() as u32;
    let sets = (0..m * m)
        .map(|cell| {
            let (i, j) = (cell / m, cell % m);
            let mut member = fam.set(i, j).iter().peekable();
            let mut out = Vec::with_capacity(order as usize - fam.set(i, j).len());
            for g in 0..order {
                if member.peek() == Some(&&g) {
                    member.next();
                } else if !(i == j && g == 0) {
                    out.push(g);
                }
            }
            out
        })
        .collect();
    PsfFamily {
        ring: fam.ring.clone(),
        m,
        sets,
        declared: fam.declared.and_then(|p| p.complement()),
        construction: None,
    }
}
