//! Sweep of every spread-family configuration up to a vertex bound.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::prime_power;
use crate::digraph::DsrgParams;
use crate::psf::{formula, z2_admissible};

/// One `(p, s, d, w, z1, z2)` choice for the spread family construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Realization {
    pub p: u64,
    pub s: u32,
    pub d: u32,
    pub w: u64,
    pub z1: u64,
    pub z2: u64,
}

impl Realization {
    pub fn params(&self) -> DsrgParams {
        let n = self.p.pow(self.s * self.d);
        formula(n, self.w, self.z1, self.z2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub params: DsrgParams,
    pub complement: Option<DsrgParams>,
    pub genuine: bool,
    /// The least realization producing `params`.
    pub realization: Realization,
}

/// Every admissible configuration with `v ≤ bound`, in lexicographic order
/// of `(p, s, d, w, z1, z2)`.
pub fn realizations(bound: u64) -> Vec<Realization> {
    let mut out = Vec::new();
    let mut n = 2u64;
    while 2 * n * n <= bound {
        if let Some((p, k)) = prime_power(n) {
            for d in (1..=k).filter(|d| k % d == 0) {
                let s = k / d;
                let q = p.pow(d);
                for w in 1..=q {
                    for z1 in (1..=q - w + 1).take_while(|z1| (z1 + 1) * n * n <= bound) {
                        for z2 in [w.saturating_sub(1), w] {
                            if z2_admissible(w, z2) {
                                out.push(Realization { p, s, d, w, z1, z2 });
                            }
                        }
                    }
                }
            }
        }
        n += 1;
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Distinct parameter tuples realizable with `v ≤ bound`, sorted, each with
/// its complement and genuineness.
pub fn parameter_table(bound: u64) -> Vec<TableRow> {
    let mut rows: BTreeMap<DsrgParams, Realization> = BTreeMap::new();
    for r in realizations(bound) {
        rows.entry(r.params()).or_insert(r);
    }
    rows.into_iter()
        .map(|(params, realization)| TableRow {
            params,
            complement: params.complement(),
            genuine: params.is_genuine(),
            realization,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bounds() {
        assert!(parameter_table(0).is_empty());
        assert!(parameter_table(7).is_empty());
        let t = parameter_table(10);
        let params: Vec<DsrgParams> = t.iter().map(|r| r.params).collect();
        assert_eq!(
            params,
            vec![
                DsrgParams::new(8, 3, 1, 1, 2),
                DsrgParams::new(8, 4, 1, 3, 3),
                DsrgParams::new(8, 6, 4, 6, 6),
            ]
        );
        assert_eq!(
            t[0].realization,
            Realization {
                p: 2,
                s: 1,
                d: 1,
                w: 1,
                z1: 1,
                z2: 1
            }
        );
        // w = z2 = p^d gives t = k
        assert!(!t[2].genuine);
    }

    #[test]
    fn listed_tuples_appear() {
        let t = parameter_table(110);
        for (v, k, l, m, tt) in [
            (50, 18, 7, 6, 12),
            (75, 28, 11, 10, 16),
            (75, 32, 13, 14, 20),
            (98, 26, 9, 6, 16),
            (98, 32, 11, 10, 22),
            (98, 39, 16, 15, 27),
            (100, 38, 15, 14, 20),
            (100, 42, 17, 18, 24),
        ] {
            let p = DsrgParams::new(v, k, l, m, tt);
            let row = t.iter().find(|r| r.params == p).expect("tuple realized");
            assert!(row.genuine);
            assert_eq!(row.realization.params(), p);
        }
        assert!(t.windows(2).all(|w| w[0].params < w[1].params));
    }
}
