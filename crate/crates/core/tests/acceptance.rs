//! The nine acceptance criteria. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fail.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dsrg_core::algebra::prime_power;
use dsrg_core::cyclotomy::{
    cyclotomic_numbers_bruteforce, row_sums_hold, schur_check, setup, table_e4, table_e6,
};
use dsrg_core::digraph::{cayley_digraph, difference_digraph, verify_dsrg, DEFAULT_VERTEX_CAP};
use dsrg_core::psf::{
    build_psf, build_psf_forced, build_uniform_psf, complement_family, is_uniform, psf_parameters,
    verify_psf, z2_admissible,
};
use dsrg_core::semidirect::{
    build_group, connection_set_from_classes, enumerate_e4, enumerate_e6, flatness_check,
    groupring_square_check, quartic_construct, semidirect_construct, sextic_construct,
    SemidirectOptions,
};
use dsrg_core::sweep::realizations;
use dsrg_core::{ChainRing, DsrgParams, PsfConfig, Spread};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ring(p: u64, s: u32, d: u32) -> Arc<ChainRing> {
    Arc::new(ChainRing::new(p, s, d).expect("ring"))
}

fn adjacency_params(fam: &dsrg_core::PsfFamily) -> Result<DsrgParams, String> {
    let g = difference_digraph(fam, DEFAULT_VERTEX_CAP).map_err(|e| e.to_string())?;
    verify_dsrg(&g).map_err(|v| v.to_string())
}

fn new_parameter_tuples() -> Check {
    let listed = [
        (50, 18, 7, 6, 12),
        (75, 28, 11, 10, 16),
        (75, 32, 13, 14, 20),
        (98, 26, 9, 6, 16),
        (98, 32, 11, 10, 22),
        (98, 39, 16, 15, 27),
        (100, 38, 15, 14, 20),
        (100, 42, 17, 18, 24),
    ];
    let configs = realizations(110);
    for (v, k, l, m, t) in listed {
        let want = DsrgParams::new(v, k, l, m, t);
        let r = configs
            .iter()
            .find(|r| r.params() == want)
            .ok_or_else(|| format!("no configuration realizes {want}"))?;
        let cfg =
            PsfConfig::new(ring(r.p, r.s, r.d), r.w, r.z1, r.z2).map_err(|e| e.to_string())?;
        let fam = build_psf(&cfg).map_err(|e| e.to_string())?;
        let g = difference_digraph(&fam, DEFAULT_VERTEX_CAP).map_err(|e| e.to_string())?;
        let got = verify_dsrg(&g).map_err(|e| format!("{want}: {e}"))?;
        ensure(got == want, || format!("{want}: adjacency gives {got}"))?;
        let comp =
            verify_dsrg(&g.complement()).map_err(|e| format!("complement of {want}: {e}"))?;
        ensure(Some(comp) == want.complement(), || {
            format!("complement of {want}: adjacency gives {comp}")
        })?;
    }
    Ok("8 tuples and their complements verified by the adjacency identity".into())
}

fn admissibility_dichotomy() -> Check {
    let mut ok = 0;
    let mut rejected = 0;
    for (p, s, d) in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (5, 1, 1), (3, 1, 2)] {
        let r = ring(p, s, d);
        let q = r.residue_order();
        let n = r.order();
        for w in 1..=q {
            for z1 in 1..=q - w + 1 {
                for z2 in 1..=n {
                    let cfg = PsfConfig::new(r.clone(), w, z1, z2).map_err(|e| e.to_string())?;
                    let fam = build_psf_forced(&cfg).map_err(|e| e.to_string())?;
                    let verdict = verify_psf(&fam);
                    let label = format!("(p,s,d,w,z1,z2) = ({p},{s},{d},{w},{z1},{z2})");
                    if z2_admissible(w, z2) {
                        let want = psf_parameters(p, s, d, w, z1, z2).map_err(|e| e.to_string())?;
                        ensure(verdict == Ok(want), || {
                            format!("{label}: expected {want}, got {verdict:?}")
                        })?;
                        ok += 1;
                    } else {
                        ensure(verdict.is_err(), || {
                            format!("{label}: forced build verified as {verdict:?}")
                        })?;
                        rejected += 1;
                    }
                }
            }
        }
    }
    Ok(format!(
        "{ok} admissible builds verified, {rejected} forced builds rejected"
    ))
}

fn galois_ring_instance() -> Check {
    let cfg = PsfConfig::new(ring(2, 2, 1), 2, 1, 1).map_err(|e| e.to_string())?;
    let fam = build_psf(&cfg).map_err(|e| e.to_string())?;
    let got = adjacency_params(&fam)?;
    let want = DsrgParams::new(32, 10, 3, 3, 7);
    ensure(got == want, || {
        format!("adjacency gives {got}, expected {want}")
    })?;
    Ok(format!("Z_4 family verifies as {got}"))
}

fn uniform_families() -> Check {
    let mut count = 0;
    for (p, d, w) in [(3, 1, 2), (5, 1, 2), (5, 1, 3), (7, 1, 2)] {
        for z2 in [w - 1, w] {
            let fam = build_uniform_psf(p, d, w, z2).map_err(|e| e.to_string())?;
            let label = format!("(p,d,w,z2) = ({p},{d},{w},{z2})");
            ensure(is_uniform(&fam), || format!("{label}: not uniform"))?;
            let declared = fam
                .declared()
                .ok_or_else(|| format!("{label}: no declared parameters"))?;
            let conv = verify_psf(&fam).map_err(|e| format!("{label}: {e}"))?;
            let adj = adjacency_params(&fam).map_err(|e| format!("{label}: {e}"))?;
            ensure(conv == declared && adj == declared, || {
                format!("{label}: declared {declared}, convolution {conv}, adjacency {adj}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} uniform families verified"))
}

fn cyclotomy_oracles() -> Check {
    for q in [17, 257, 401, 577, 1297, 1601, 3137] {
        let s = setup(q, 4).map_err(|e| e.to_string())?;
        let (_, table) = table_e4(&s).map_err(|e| format!("q = {q}: {e}"))?;
        ensure(table == cyclotomic_numbers_bruteforce(&s), || {
            format!("q = {q}: order-4 table differs")
        })?;
    }
    for q in [109, 433] {
        let s = setup(q, 6).map_err(|e| e.to_string())?;
        let (_, table) = table_e6(&s).map_err(|e| format!("q = {q}: {e}"))?;
        ensure(table == cyclotomic_numbers_bruteforce(&s), || {
            format!("q = {q}: order-6 table differs")
        })?;
    }
    let mut checks = 0;
    for q in (3..=500).filter(|&q| prime_power(q).is_some()) {
        for e in (2..q).filter(|e| (q - 1) % e == 0 && (q - 1) / e > 1) {
            let s = setup(q, e).map_err(|e| e.to_string())?;
            for i in 0..e {
                schur_check(&s, i).map_err(|w| format!("q = {q}, e = {e}, i = {i}: {w:?}"))?;
                checks += 1;
            }
        }
    }
    Ok(format!("9 closed-form tables match brute force; {checks} class products satisfy the Schur relation"))
}

fn quartic_construction() -> Check {
    let mut problems = Vec::new();
    let want17 = DsrgParams::new(68, 16, 4, 3, 4);
    let c = quartic_construct(17, SemidirectOptions::default()).map_err(|e| e.to_string())?;
    let adj = c.adjacency.ok_or("p = 17: adjacency oracle not run")?;
    if c.params != want17 || adj != want17 {
        problems.push(format!(
            "p = 17: group ring gives {}, adjacency gives {adj}, expected {want17}",
            c.params
        ));
    }
    let want257 = DsrgParams::new(16448, 4096, 1024, 1008, 1024);
    let c = quartic_construct(257, SemidirectOptions::default()).map_err(|e| e.to_string())?;
    if c.params != want257 {
        problems.push(format!(
            "p = 257: group ring gives {}, expected {want257}",
            c.params
        ));
    }
    ensure(problems.is_empty(), || problems.join("; "))?;
    Ok(format!("p = 17 gives {want17}, p = 257 gives {want257}"))
}

fn sextic_construction() -> Check {
    let want = DsrgParams::new(1962, 324, 54, 51, 54);
    let c = sextic_construct(109, SemidirectOptions::default()).map_err(|e| e.to_string())?;
    let adj = c.adjacency.ok_or("q = 109: adjacency oracle not run")?;
    ensure(c.params == want && adj == want, || {
        format!(
            "q = 109: group ring gives {}, adjacency gives {adj}, expected {want}",
            c.params
        )
    })?;
    Ok(format!("q = 109 gives {want}"))
}

fn enumeration_counts() -> Check {
    let e4 = enumerate_e4(1_000_000);
    ensure(e4.len() == 59, || format!("e4: {} primes", e4.len()))?;
    ensure(
        e4[..4] == [17, 257, 401, 577] && e4.last() == Some(&921_601),
        || format!("e4: starts {:?}, ends {:?}", &e4[..4], e4.last()),
    )?;
    let e6 = enumerate_e6(1_000_000);
    ensure(e6.len() == 25, || format!("e6: {} values", e6.len()))?;
    ensure(
        e6[..3] == [109, 433, 3889] && e6.last() == Some(&995_329),
        || format!("e6: starts {:?}, ends {:?}", &e6[..3], e6.last()),
    )?;
    Ok("59 quartic primes and 25 sextic prime powers below 10^6".into())
}

fn property_suites() -> Check {
    // spreads over every ring of order at most 256
    let mut rings = 0;
    for p in (2..=256u64).filter(|&p| dsrg_core::algebra::is_prime(p)) {
        let mut k = 1;
        while p.pow(k) <= 256 {
            for d in (1..=k).filter(|d| k % d == 0) {
                let r = ring(p, k / d, d);
                let (q, n) = (r.residue_order(), r.order());
                let sp = Spread::build(r).map_err(|e| e.to_string())?;
                let label = format!("(p,s,d) = ({p},{},{d})", k / d);
                ensure(sp.lines().len() as u64 == q + 1, || {
                    format!("{label}: line count")
                })?;
                ensure(sp.pairwise_trivial(), || {
                    format!("{label}: lines meet outside the origin")
                })?;
                let covered = sp.covered_count() as u64;
                let expected = (q + 1) * (n - 1) + 1;
                ensure(
                    covered == expected && (covered == n * n) == (k / d == 1),
                    || format!("{label}: covers {covered} elements"),
                )?;
                rings += 1;
            }
            k += 1;
        }
    }

    // cyclotomic row sums
    let mut setups = 0;
    for q in (3..=600).filter(|&q| prime_power(q).is_some()) {
        for e in (2..q).filter(|e| (q - 1) % e == 0 && (q - 1) / e > 1) {
            let s = setup(q, e).map_err(|e| e.to_string())?;
            let t = cyclotomic_numbers_bruteforce(&s);
            ensure(row_sums_hold(&s, &t), || {
                format!("q = {q}, e = {e}: row sums")
            })?;
            setups += 1;
        }
    }

    // complement involutions and convolution/adjacency agreement on every
    // family with v <= 1000
    let mut families = 0;
    for r in realizations(1000) {
        let cfg =
            PsfConfig::new(ring(r.p, r.s, r.d), r.w, r.z1, r.z2).map_err(|e| e.to_string())?;
        let fam = build_psf(&cfg).map_err(|e| e.to_string())?;
        let label = format!("{r:?}");
        let conv = verify_psf(&fam).map_err(|e| format!("{label}: {e}"))?;
        let g = difference_digraph(&fam, DEFAULT_VERTEX_CAP).map_err(|e| e.to_string())?;
        let adj = verify_dsrg(&g).map_err(|e| format!("{label}: {e}"))?;
        ensure(conv == adj && Some(conv) == fam.declared(), || {
            format!("{label}: {conv} vs {adj}")
        })?;
        let comp = complement_family(&fam);
        let gc = g.complement();
        ensure(gc.complement() == g, || {
            format!("{label}: digraph complement is not an involution")
        })?;
        let back = complement_family(&comp);
        let m = fam.blocks();
        ensure(
            (0..m * m).all(|c| back.set(c / m, c % m) == fam.set(c / m, c % m)),
            || format!("{label}: family complement is not an involution"),
        )?;
        let conv_c = verify_psf(&comp).map_err(|e| format!("{label} complement: {e}"))?;
        let adj_c = verify_dsrg(&gc).map_err(|e| format!("{label} complement: {e}"))?;
        ensure(conv_c == adj_c && Some(adj_c) == adj.complement(), || {
            format!("{label}: complement gives {conv_c} / {adj_c}")
        })?;
        ensure(
            Some(adj_c.complement().unwrap_or(adj_c)) == Some(adj),
            || format!("{label}: parameter involution"),
        )?;
        families += 1;
    }

    // group ring versus adjacency on single-class Cayley digraphs; every
    // e = 4 or e = 6 digraph with v <= 4000 has q <= 200
    let mut cayley = 0;
    for q in (3..=200u64).filter(|&q| prime_power(q).is_some()) {
        for e in (2..q).filter(|e| (q - 1) % e == 0 && ((q - 1) / e) % 2 == 0) {
            if q * (q - 1) / e > 4000 {
                continue;
            }
            let group = build_group(q, e).map_err(|e| e.to_string())?;
            for i in 1..e {
                let w = connection_set_from_classes(&group, &[i]).map_err(|e| e.to_string())?;
                let ring_verdict = groupring_square_check(&group, &w);
                let g = cayley_digraph(&group, &w.members).map_err(|e| e.to_string())?;
                let adj_verdict = verify_dsrg(&g);
                let label = format!("q = {q}, e = {e}, D = C_{i}");
                ensure(ring_verdict.is_ok() == adj_verdict.is_ok(), || {
                    format!("{label}: group ring {ring_verdict:?}, adjacency {adj_verdict:?}")
                })?;
                if let (Ok(a), Ok(b)) = (&ring_verdict, &adj_verdict) {
                    ensure(a == b, || format!("{label}: {a} vs {b}"))?;
                }
                ensure(
                    ring_verdict.is_ok() == flatness_check(group.setup(), i),
                    || format!("{label}: flatness disagrees with the group-ring check"),
                )?;
                cayley += 1;
            }
        }
    }
    let c = semidirect_construct(17, 4, &[2], SemidirectOptions::default())
        .map_err(|e| e.to_string())?;
    ensure(c.params.is_genuine(), || {
        "p = 17 construction is not genuine".into()
    })?;

    Ok(format!(
        "{rings} spreads, {setups} cyclotomic setups, {families} families, {cayley} Cayley digraphs"
    ))
}

type Criterion = (&'static str, fn() -> Check, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "new-parameter reproduction",
            new_parameter_tuples,
            Duration::from_secs(5),
        ),
        (
            "admissibility dichotomy",
            admissibility_dichotomy,
            Duration::from_secs(60),
        ),
        (
            "Galois-ring instance",
            galois_ring_instance,
            Duration::from_secs(1),
        ),
        (
            "uniform families",
            uniform_families,
            Duration::from_secs(10),
        ),
        (
            "cyclotomy oracle agreement",
            cyclotomy_oracles,
            Duration::from_secs(30),
        ),
        (
            "quartic semidirect construction",
            quartic_construction,
            Duration::from_secs(60),
        ),
        (
            "sextic semidirect construction",
            sextic_construction,
            Duration::from_secs(60),
        ),
        (
            "enumeration counts",
            enumeration_counts,
            Duration::from_secs(30),
        ),
        ("property suites", property_suites, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (n, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *budget => {
                Err(format!("{msg}, but took {took:.2?} (budget {budget:?})"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {}. {name}: {msg} [{took:.2?}]", n + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {}. {name}: {msg} [{took:.2?}]", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
