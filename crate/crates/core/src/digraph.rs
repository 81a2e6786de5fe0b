//! Bit-packed digraphs and the exact DSRG identity
//! `A² = tI + λA + μ(J − I − A)`.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::psf::PsfFamily;

/// Default bound on the vertex count of a materialized digraph.
pub const DEFAULT_VERTEX_CAP: usize = 20_000;

/// Parameters `(v, k, λ, μ, t)` of a directed strongly regular graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DsrgParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
    pub t: u64,
}

impl DsrgParams {
    pub const fn new(v: u64, k: u64, lambda: u64, mu: u64, t: u64) -> Self {
        DsrgParams {
            v,
            k,
            lambda,
            mu,
            t,
        }
    }

    pub fn as_array(&self) -> [u64; 5] {
        [self.v, self.k, self.lambda, self.mu, self.t]
    }

    /// Parameters of the complementary digraph,
    /// `(v, v−k−1, v−2k+μ−2, v−2k+λ, v−2k+t−1)`.
    ///
    /// `None` when a component would be negative, which only happens for
    /// tuples that are not realized by any digraph.
    pub fn complement(&self) -> Option<DsrgParams> {
        let (v, k, l, m, t) = (
            self.v as i128,
            self.k as i128,
            self.lambda as i128,
            self.mu as i128,
            self.t as i128,
        );
        let c = [
            v,
            v - k - 1,
            v - 2 * k + m - 2,
            v - 2 * k + l,
            v - 2 * k + t - 1,
        ];
        if c.iter().any(|&x| x < 0) {
            return None;
        }
        Some(DsrgParams::new(
            c[0] as u64,
            c[1] as u64,
            c[2] as u64,
            c[3] as u64,
            c[4] as u64,
        ))
    }

    /// Not complete, not an undirected SRG (`t = k`) and not a doubly regular
    /// tournament (`t = 0`).
    pub fn is_genuine(&self) -> bool {
        0 < self.t && self.t < self.k && self.k + 1 < self.v
    }

    /// `k(k + μ − λ) = t + (v − 1)μ`, obtained by multiplying the defining
    /// identity by the all-ones vector. Every DSRG satisfies it.
    pub fn satisfies_counting_identity(&self) -> bool {
        let (v, k, l, m, t) = (
            self.v as i128,
            self.k as i128,
            self.lambda as i128,
            self.mu as i128,
            self.t as i128,
        );
        k * (k + m - l) == t + (v - 1) * m
    }
}

impl fmt::Display for DsrgParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {})",
            self.v, self.k, self.lambda, self.mu, self.t
        )
    }
}

pub fn complement_params(p: &DsrgParams) -> Option<DsrgParams> {
    p.complement()
}

/// Genuineness for verified parameters on `v` vertices.
pub fn is_genuine(p: &DsrgParams, v: u64) -> bool {
    p.v == v && p.is_genuine()
}

/// JSON verification report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub mu: u64,
    pub t: u64,
    pub genuine: bool,
}

impl From<DsrgParams> for Report {
    fn from(p: DsrgParams) -> Self {
        Report {
            v: p.v,
            k: p.k,
            lambda: p.lambda,
            mu: p.mu,
            t: p.t,
            genuine: p.is_genuine(),
        }
    }
}

/// Which entry of `A²` a witness refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Diagonal,
    Arc,
    NonArc,
}

/// Why a digraph is not a DSRG.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DsrgViolation {
    OutDegree {
        vertex: usize,
        expected: u64,
        found: u64,
    },
    InDegree {
        vertex: usize,
        expected: u64,
        found: u64,
    },
    Entry {
        u: usize,
        w: usize,
        relation: Relation,
        expected: u64,
        found: u64,
    },
}

impl fmt::Display for DsrgViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DsrgViolation::OutDegree {
                vertex,
                expected,
                found,
            } => write!(
                f,
                "vertex {vertex} has out-degree {found}, expected {expected}"
            ),
            DsrgViolation::InDegree {
                vertex,
                expected,
                found,
            } => write!(
                f,
                "vertex {vertex} has in-degree {found}, expected {expected}"
            ),
            DsrgViolation::Entry {
                u,
                w,
                relation,
                expected,
                found,
            } => write!(
                f,
                "A^2[{u}][{w}] = {found}, expected {expected} ({relation:?})"
            ),
        }
    }
}

/// Loop-free digraph with bit-packed adjacency rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    v: usize,
    words: usize,
    bits: Vec<u64>,
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("v", &self.v)
            .field("arcs", &self.arc_count())
            .finish()
    }
}

impl Digraph {
    pub fn empty(v: usize) -> Self {
        let words = v.div_ceil(64);
        Digraph {
            v,
            words,
            bits: vec![0; v * words],
        }
    }

    pub fn from_arcs(v: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Digraph::empty(v);
        for (u, w) in arcs {
            g.insert_arc(u, w)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    pub fn insert_arc(&mut self, u: usize, w: usize) -> Result<()> {
        if u >= self.v || w >= self.v {
            return Err(Error::OutOfRange {
                index: u.max(w) as u64,
                order: self.v as u64,
            });
        }
        if u == w {
            return Err(Error::InvalidParameters(format!("loop at vertex {u}")));
        }
        self.set(u, w);
        Ok(())
    }

    #[inline]
    fn set(&mut self, u: usize, w: usize) {
        self.bits[u * self.words + w / 64] |= 1 << (w % 64);
    }

    #[inline]
    pub fn has_arc(&self, u: usize, w: usize) -> bool {
        self.bits[u * self.words + w / 64] >> (w % 64) & 1 == 1
    }

    pub fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    pub fn out_degree(&self, u: usize) -> u64 {
        self.row(u).iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn arc_count(&self) -> u64 {
        self.bits.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn out_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + b)
            })
        })
    }

    /// All arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.v).flat_map(move |u| self.out_neighbors(u).map(move |w| (u, w)))
    }

    pub fn transpose(&self) -> Digraph {
        let mut t = Digraph::empty(self.v);
        for (u, w) in self.arcs() {
            t.set(w, u);
        }
        t
    }

    /// Every non-arc off the diagonal becomes an arc and vice versa.
    pub fn complement(&self) -> Digraph {
        let mut c = self.clone();
        let tail = self.v % 64;
        for u in 0..self.v {
            let row = &mut c.bits[u * self.words..(u + 1) * self.words];
            for word in row.iter_mut() {
                *word = !*word;
            }
            if tail != 0 {
                row[self.words - 1] &= (1u64 << tail) - 1;
            }
            row[u / 64] &= !(1u64 << (u % 64));
        }
        c
    }

    /// Number of unordered pairs `{u, w}` joined in both directions.
    pub fn undirected_edge_count(&self) -> u64 {
        self.arcs()
            .filter(|&(u, w)| u < w && self.has_arc(w, u))
            .count() as u64
    }

    /// Writes `v <v> arcs <a>` followed by one `u w` line per arc.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "v {} arcs {}", self.v, self.arc_count())?;
        for (u, w) in self.arcs() {
            writeln!(out, "{u} {w}")?;
        }
        out.flush()
    }

    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Digraph> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| parse_err(1, e.to_string()))?,
            None => return Err(parse_err(1, "empty file".into())),
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (v, arcs) = match fields.as_slice() {
            ["v", v, "arcs", a] => (
                v.parse::<usize>()
                    .map_err(|_| parse_err(1, format!("bad vertex count {v:?}")))?,
                a.parse::<u64>()
                    .map_err(|_| parse_err(1, format!("bad arc count {a:?}")))?,
            ),
            _ => {
                return Err(parse_err(
                    1,
                    format!("expected header \"v <v> arcs <a>\", found {header:?}"),
                ))
            }
        };
        if v > DEFAULT_VERTEX_CAP * 16 {
            return Err(parse_err(1, format!("vertex count {v} is too large")));
        }
        let mut g = Digraph::empty(v);
        let mut seen = 0u64;
        for (i, line) in lines.enumerate() {
            let n = i + 2;
            let line = line.map_err(|e| parse_err(n, e.to_string()))?;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let (u, w) = match parts.as_slice() {
                [u, w] => (
                    u.parse::<usize>()
                        .map_err(|_| parse_err(n, format!("bad vertex {u:?}")))?,
                    w.parse::<usize>()
                        .map_err(|_| parse_err(n, format!("bad vertex {w:?}")))?,
                ),
                _ => return Err(parse_err(n, format!("expected \"u w\", found {line:?}"))),
            };
            if u >= v || w >= v {
                return Err(parse_err(n, format!("vertex out of range 0..{v}")));
            }
            if u == w {
                return Err(parse_err(n, format!("loop at vertex {u}")));
            }
            if g.has_arc(u, w) {
                return Err(parse_err(n, format!("duplicate arc {u} {w}")));
            }
            g.set(u, w);
            seen += 1;
        }
        if seen != arcs {
            return Err(parse_err(
                1,
                format!("header declares {arcs} arcs but the file lists {seen}"),
            ));
        }
        Ok(g)
    }
}

/// Checks regularity and `A² = tI + λA + μ(J − I − A)` exactly.
///
/// Constants are read off row 0; a slot with no witnessing entry (λ when
/// `k = 0`, μ when the digraph is complete) is reported as 0.
pub fn verify_dsrg(g: &Digraph) -> Result<DsrgParams, DsrgViolation> {
    verify_dsrg_with(g, Execution::default())
}

pub fn verify_dsrg_with(g: &Digraph, exec: Execution) -> Result<DsrgParams, DsrgViolation> {
    let v = g.v;
    if v == 0 {
        return Ok(DsrgParams::new(0, 0, 0, 0, 0));
    }
    let k = g.out_degree(0);
    if let Some(bad) = exec::find_first(exec, 0..v, |u| {
        let d = g.out_degree(u);
        (d != k).then_some(DsrgViolation::OutDegree {
            vertex: u,
            expected: k,
            found: d,
        })
    }) {
        return Err(bad);
    }
    let gt = g.transpose();
    if let Some(bad) = exec::find_first(exec, 0..v, |u| {
        let d = gt.out_degree(u);
        (d != k).then_some(DsrgViolation::InDegree {
            vertex: u,
            expected: k,
            found: d,
        })
    }) {
        return Err(bad);
    }

    // Square whichever of A and its complement is sparser; for a k-regular A
    // with complement B of degree k' = v - 1 - k,
    // A² = (v - 2 - 2k')J + I + 2B + B².
    let dense = 2 * k > v as u64 - 1;
    let comp;
    let b = if dense {
        comp = g.complement();
        &comp
    } else {
        g
    };
    let shift = if dense {
        v as i64 - 2 - 2 * (v as i64 - 1 - k as i64)
    } else {
        0
    };
    let planes = (64 - b.out_degree(0).leading_zeros()).max(1) as usize;
    let square_row = |u: usize| {
        let mut acc = BitPlanes::new(planes, g.words);
        for z in b.out_neighbors(u) {
            acc.add(b.row(z));
        }
        acc
    };
    // A²[u][w] from the count B²[u][w]
    let lift = |u: usize, w: usize, count: u64| -> u64 {
        if !dense {
            return count;
        }
        let extra = i64::from(u == w) + 2 * i64::from(b.has_arc(u, w));
        (count as i64 + shift + extra) as u64
    };

    let row0 = square_row(0);
    let t = lift(0, 0, row0.count(0));
    let lambda = (1..v)
        .find(|&w| g.has_arc(0, w))
        .map_or(0, |w| lift(0, w, row0.count(w)));
    let mu = (1..v)
        .find(|&w| !g.has_arc(0, w))
        .map_or(0, |w| lift(0, w, row0.count(w)));
    drop(row0);

    // expected B² values per relation
    let target = |base: u64, extra: i64| base as i64 - if dense { shift + extra } else { 0 };
    let (want_diag, want_arc, want_non) = (target(t, 1), target(lambda, 0), target(mu, 2));
    let tail = match v % 64 {
        0 => !0u64,
        r => (1u64 << r) - 1,
    };

    let bad = exec::find_first(exec, 0..v, |u| {
        let acc = square_row(u);
        let row = g.row(u);
        (0..g.words).find_map(|j| {
            let valid = if j + 1 == g.words { tail } else { !0 };
            let diag = if j == u / 64 { 1u64 << (u % 64) } else { 0 };
            let arc = row[j];
            let non = !arc & !diag & valid;
            let wrong = (arc & !acc.eq_mask(j, want_arc))
                | (non & !acc.eq_mask(j, want_non))
                | (diag & !acc.eq_mask(j, want_diag));
            if wrong == 0 {
                return None;
            }
            let w = j * 64 + wrong.trailing_zeros() as usize;
            let (relation, expected) = if u == w {
                (Relation::Diagonal, t)
            } else if g.has_arc(u, w) {
                (Relation::Arc, lambda)
            } else {
                (Relation::NonArc, mu)
            };
            Some(DsrgViolation::Entry {
                u,
                w,
                relation,
                expected,
                found: lift(u, w, acc.count(w)),
            })
        })
    });
    match bad {
        Some(b) => Err(b),
        None => Ok(DsrgParams::new(v as u64, k, lambda, mu, t)),
    }
}

/// Column counts of one row of a matrix square, bit-sliced: bit `w` of plane
/// `b` is bit `b` of the count in column `w`.
struct BitPlanes {
    words: usize,
    planes: Vec<u64>,
    carry: Vec<u64>,
}

impl BitPlanes {
    fn new(depth: usize, words: usize) -> Self {
        BitPlanes {
            words,
            planes: vec![0; depth * words],
            carry: vec![0; words],
        }
    }

    /// Adds a 0/1 row to every column counter (ripple carry across planes).
    fn add(&mut self, row: &[u64]) {
        self.carry.copy_from_slice(row);
        for plane in self.planes.chunks_exact_mut(self.words) {
            let mut live = 0;
            for (x, c) in plane.iter_mut().zip(self.carry.iter_mut()) {
                let sum = *x ^ *c;
                *c &= *x;
                *x = sum;
                live |= *c;
            }
            if live == 0 {
                break;
            }
        }
    }

    /// Bits of word `j` whose counter equals `value`.
    fn eq_mask(&self, j: usize, value: i64) -> u64 {
        let depth = self.planes.len() / self.words;
        if value < 0 || (depth < 63 && value >> depth != 0) {
            return 0;
        }
        self.planes
            .chunks_exact(self.words)
            .enumerate()
            .fold(!0u64, |m, (b, plane)| {
                m & if value >> b & 1 == 1 {
                    plane[j]
                } else {
                    !plane[j]
                }
            })
    }

    fn count(&self, w: usize) -> u64 {
        self.planes
            .chunks_exact(self.words)
            .enumerate()
            .map(|(b, plane)| (plane[w / 64] >> (w % 64) & 1) << b)
            .sum()
    }
}

/// Difference digraph of a family on `m` copies of `G`: vertex
/// `i·|G| + g`, and an arc from `x ∈ G_i` to `y ∈ G_j` iff `x − y ∈ S_{i,j}`.
pub fn difference_digraph(fam: &PsfFamily, cap: usize) -> Result<Digraph> {
    let ring = fam.ring();
    let n = ring.group_order() as usize;
    let m = fam.blocks();
    let v = m * n;
    if v > cap {
        return Err(Error::SizeCap {
            what: "difference digraph vertex count",
            size: v as u64,
            cap: cap as u64,
        });
    }
    let mut g = Digraph::empty(v);
    for i in 0..m {
        for j in 0..m {
            for &s in fam.set(i, j) {
                for x in 0..n as u32 {
                    let y = ring.group_sub(x, s);
                    g.set(i * n + x as usize, j * n + y as usize);
                }
            }
        }
    }
    Ok(g)
}

/// A finite group on `0..order()` given by its multiplication.
pub trait FiniteGroup {
    fn order(&self) -> usize;
    fn identity(&self) -> usize;
    fn mul(&self, a: usize, b: usize) -> usize;
    fn inv(&self, a: usize) -> usize;
}

/// `Cay(G, S)`: an arc `x → x·s` for every `s ∈ S`.
pub fn cayley_digraph<G: FiniteGroup + ?Sized>(group: &G, connection: &[usize]) -> Result<Digraph> {
    let v = group.order();
    if connection.contains(&group.identity()) {
        return Err(Error::InvalidParameters(
            "the connection set contains the identity".into(),
        ));
    }
    if let Some(&s) = connection.iter().find(|&&s| s >= v) {
        return Err(Error::OutOfRange {
            index: s as u64,
            order: v as u64,
        });
    }
    let mut g = Digraph::empty(v);
    for x in 0..v {
        for &s in connection {
            g.set(x, group.mul(x, s));
        }
    }
    Ok(g)
}
