use anyhow::{bail, Result};
use evidal_core::belief::{random_bayesian, random_mass, FocalSet, Frame, MassFunction};
use evidal_core::stats::{friedman_test, holm_adjust};
use evidal_core::uncertainty::{
    discord, epistemic_binary_relative_likelihood, evidential_epistemic_aleatoric, nonspecificity,
    shannon_entropy,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RANDOM_CASES: usize = 1000;
const TOL: f64 = 1e-9;

/// One named invariant and whether it held.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub failure: Option<String>,
}

fn check(name: &'static str, result: std::result::Result<(), String>) -> Check {
    Check {
        name,
        failure: result.err(),
    }
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

/// Runs the built-in invariant suite.
pub fn checks() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    vec![
        check("worked example", worked_example()),
        check("belief/plausibility duality", duality(&mut rng)),
        check("Bel <= BetP <= Pl", ordering(&mut rng)),
        check("Dempster commutativity", commutativity(&mut rng)),
        check(
            "discord equals entropy on Bayesian masses",
            bayesian_discord(&mut rng),
        ),
        check("relative likelihood without evidence", rl_empty()),
        check("unanimous Friedman statistic", friedman_unanimous()),
        check("Holm monotonicity", holm(&mut rng)),
    ]
}

pub fn run() -> Result<()> {
    let results = checks();
    let failed = results.iter().filter(|c| c.failure.is_some()).count();
    for c in &results {
        match &c.failure {
            None => println!("ok    {}", c.name),
            Some(why) => println!("FAIL  {}: {why}", c.name),
        }
    }
    if failed > 0 {
        bail!("{failed} of {} checks failed", results.len());
    }
    println!("all {} checks passed", results.len());
    Ok(())
}

fn worked_example() -> std::result::Result<(), String> {
    let frame = Frame::new(["Cat", "Dog"]).map_err(|e| e.to_string())?;
    let m = MassFunction::new(
        frame.clone(),
        [(FocalSet::singleton(0), 0.5), (frame.full_set(), 0.5)],
    )
    .map_err(|e| e.to_string())?;
    let betp = m.betp();
    ensure(betp.values() == [0.75, 0.25], || {
        format!("BetP = {:?}", betp.values())
    })?;
    let d = discord(&m).value;
    ensure((d + 0.5 * 0.75f64.log2()).abs() < 1e-12, || {
        format!("discord = {d}")
    })?;
    let n = nonspecificity(&m).value;
    ensure(n == 0.5, || format!("nonspecificity = {n}"))?;
    let (ue, ua) = evidential_epistemic_aleatoric(&m);
    ensure(
        (ue.value - 1.0).abs() < 1e-12 && ua.value.abs() < 1e-12,
        || format!("(U_e, U_a) = ({}, {})", ue.value, ua.value),
    )
}

fn random_frame(rng: &mut ChaCha8Rng) -> Frame {
    Frame::indexed(rng.random_range(2..=5)).expect("small frame")
}

fn all_subsets(frame: &Frame) -> impl Iterator<Item = FocalSet> {
    (1..(1u32 << frame.len())).map(FocalSet::from_bits)
}

fn duality(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..RANDOM_CASES {
        let frame = random_frame(rng);
        let m = random_mass(&frame, 6, rng);
        for a in all_subsets(&frame) {
            let pl = m.pl(a).map_err(|e| e.to_string())?;
            let complement = a.complement(frame.len());
            let bel_c = if complement.is_empty() {
                0.0
            } else {
                m.bel(complement).map_err(|e| e.to_string())?
            };
            ensure((pl - (1.0 - bel_c)).abs() < TOL, || {
                format!("Pl({a:?}) = {pl}, 1 - Bel(complement) = {}", 1.0 - bel_c)
            })?;
        }
    }
    Ok(())
}

fn ordering(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..RANDOM_CASES {
        let frame = random_frame(rng);
        let m = random_mass(&frame, 6, rng);
        for a in all_subsets(&frame) {
            let bel = m.bel(a).map_err(|e| e.to_string())?;
            let pl = m.pl(a).map_err(|e| e.to_string())?;
            let betp = m.betp_subset(a).map_err(|e| e.to_string())?;
            ensure(bel <= betp + TOL && betp <= pl + TOL, || {
                format!("{bel} <= {betp} <= {pl} fails for {a:?}")
            })?;
        }
    }
    Ok(())
}

fn commutativity(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..RANDOM_CASES {
        let frame = random_frame(rng);
        let a = random_mass(&frame, 4, rng);
        let b = random_mass(&frame, 4, rng);
        match (a.combine_dempster(&b), b.combine_dempster(&a)) {
            (Ok(ab), Ok(ba)) => {
                for s in all_subsets(&frame) {
                    ensure((ab.mass(s) - ba.mass(s)).abs() < TOL, || {
                        format!("m({s:?}) differs")
                    })?;
                }
            }
            (Err(_), Err(_)) => {}
            _ => return Err("only one order is in total conflict".into()),
        }
    }
    Ok(())
}

fn bayesian_discord(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..RANDOM_CASES {
        let frame = random_frame(rng);
        let m = random_bayesian(&frame, rng);
        let (d, h) = (discord(&m).value, shannon_entropy(&m.betp()).value);
        ensure((d - h).abs() < TOL, || {
            format!("discord {d} != entropy {h}")
        })?;
    }
    Ok(())
}

fn rl_empty() -> std::result::Result<(), String> {
    let (ue, ua) =
        epistemic_binary_relative_likelihood(0.0, 0.0, 100_000).map_err(|e| e.to_string())?;
    ensure(ue.value == 1.0 && ua.value == 0.0, || {
        format!("(U_e, U_a) = ({}, {})", ue.value, ua.value)
    })
}

fn friedman_unanimous() -> std::result::Result<(), String> {
    let rows = vec![vec![3.0, 2.0, 1.0]; 15];
    let r = friedman_test(&rows).map_err(|e| e.to_string())?;
    ensure(r.statistic == 30.0, || {
        format!("statistic = {}", r.statistic)
    })
}

fn holm(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..RANDOM_CASES {
        let p: Vec<f64> = (0..rng.random_range(1..12))
            .map(|_| rng.random::<f64>())
            .collect();
        let adj = holm_adjust(&p);
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
        ensure(order.windows(2).all(|w| adj[w[0]] <= adj[w[1]]), || {
            format!("not monotone: {p:?} -> {adj:?}")
        })?;
        ensure(p.iter().zip(&adj).all(|(r, a)| a >= r && *a <= 1.0), || {
            format!("out of range: {p:?} -> {adj:?}")
        })?;
    }
    Ok(())
}
