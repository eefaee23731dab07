//! End-to-end acceptance suite. Runs every criterion at full scale and prints
//! one PASS/FAIL line each; exits non-zero when any criterion fails.
//!
//! Run with `cargo test --release -p fsync-core --test acceptance`.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use fsync_core::bounds::{
    check_channel_capacity, convergence_lower_bound, empirical_convergence_time, fi_recursion, NoiseFisher,
};
use fsync_core::dist::{DistributionSpec, FamilyCatalog};
use fsync_core::fisherineq::{
    check_fii_1d, check_fii_2d_dependent, default_grids_2d, BivariateGaussianSpec, Grid1D, FII_1D_TOL, FII_2D_TOL,
};
use fsync_core::montecarlo::{
    check_competitiveness, check_unbiasedness, kappa_trend, run_experiment, ExperimentConfig, ExperimentResult,
    TauPolicy,
};
use fsync_core::pattern::{
    gen_random_independent, gen_tournament, validate_independence, Independence, MeetingEvent, MeetingPattern,
    RelevantSets,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn gauss(v: f64) -> DistributionSpec {
    DistributionSpec::gaussian(v).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gaussian_tournament_run(tau: f64) -> Result<ExperimentResult, String> {
    let p = gen_tournament(64, &mut rng(64)).map_err(err)?;
    let mut cfg = ExperimentConfig::new(p, vec![gauss(1.0); 64], gauss(1.0), 50_000, 2024);
    cfg.tau_star = TauPolicy::Fixed(tau);
    run_experiment(&cfg).map_err(err)
}

fn gaussian_optimality(base: &ExperimentResult) -> Outcome {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut bad = 0;
    for c in base.cells.iter().flatten() {
        for v in [c.variance * c.fi_bound, c.variance * c.accuracy.unwrap()] {
            lo = lo.min(v);
            hi = hi.max(v);
            if !(0.95..=1.05).contains(&v) {
                bad += 1;
            }
        }
    }
    ensure(
        bad == 0,
        format!("var*J and var*c in [{lo:.4}, {hi:.4}], {bad} values outside [0.95, 1.05]"),
    )
}

fn unbiasedness(base: &ExperimentResult) -> Outcome {
    let shifted = gaussian_tournament_run(1e6)?;
    let (r0, r1) = (check_unbiasedness(base, 0.0), check_unbiasedness(&shifted, 1e6));
    let frac = r0.violation_fraction().max(r1.violation_fraction());
    let mut mean_gap: f64 = 0.0;
    let mut var_gap: f64 = 0.0;
    for (a, b) in base.cells.iter().flatten().zip(shifted.cells.iter().flatten()) {
        mean_gap = mean_gap.max((b.mean - a.mean - 1e6).abs());
        var_gap = var_gap.max((b.variance - a.variance).abs() / a.variance);
    }
    ensure(
        frac <= 0.005 && mean_gap <= 1e-6 && var_gap <= 1e-9,
        format!(
            "4-sigma failures {:.3}%, mean shift error {mean_gap:.2e}, variance rel diff {var_gap:.2e}",
            100.0 * frac
        ),
    )
}

fn competitiveness() -> Outcome {
    let catalog =
        FamilyCatalog::new(vec![DistributionSpec::logistic(1.0).unwrap(), gauss(1.0)], gauss(1.0)).map_err(err)?;
    let delta0 = catalog.delta0().map_err(err)?;
    let p = gen_random_independent(100, 5, 0.5, &mut rng(100)).map_err(err)?;
    let assignment = (0..100).map(|a| catalog.initial[a % 2]).collect();
    let r = run_experiment(&ExperimentConfig::new(p, assignment, gauss(1.0), 50_000, 31)).map_err(err)?;
    let rep = check_competitiveness(&r, &r.fisher, delta0, 0.05).map_err(err)?;
    let delta_ok = (delta0 - PI * PI / 9.0).abs() <= 1e-4;
    ensure(
        delta_ok && rep.passed(),
        format!(
            "delta0 = {delta0:.8} (pi^2/9 = {:.8}); {} exact, {} per-event, {} statistical violations; min c*delta0/J = {:.6}, max var*J = {:.4}",
            PI * PI / 9.0,
            rep.exact_violations.len(),
            rep.per_event_violations.len(),
            rep.statistical_violations.len(),
            rep.min_exact_margin,
            rep.max_ratio
        ),
    )
}

fn random_spec<R: Rng>(rng: &mut R) -> DistributionSpec {
    match rng.random_range(0..3) {
        0 => gauss(rng.random_range(0.1..4.0)),
        1 => DistributionSpec::logistic(rng.random_range(0.3..2.0)).unwrap(),
        _ => DistributionSpec::mixture2(
            rng.random_range(0.1..0.9),
            rng.random_range(0.0..2.0),
            rng.random_range(0.1..1.0),
        )
        .unwrap(),
    }
}

fn channel_capacity() -> Outcome {
    let mut patterns = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mut g = rng(4000 + seed);
        let tournament = gen_tournament(1 << g.random_range(1..8), &mut g).map_err(err)?;
        let n = g.random_range(2..80);
        let random = gen_random_independent(n, g.random_range(1..8), g.random_range(0.05..1.0), &mut g).map_err(err)?;
        for p in [tournament, random] {
            let initial: Vec<f64> = (0..p.n())
                .map(|_| random_spec(&mut g).fisher_information())
                .collect::<Result<_, _>>()
                .map_err(err)?;
            let j_n = random_spec(&mut g).fisher_information().map_err(err)?;
            let traj = fi_recursion(&p, &initial, NoiseFisher::Finite(j_n)).map_err(err)?;
            for s in &traj.steps {
                if !(s.increment < j_n) {
                    return Err(format!("increment {} >= J_N {j_n} at {}", s.increment, s.event));
                }
            }
            worst = worst.max(check_channel_capacity(&traj) / j_n);
            patterns += 1;
        }
    }
    Ok(format!("{patterns} patterns, largest increment / J_N = {worst:.6}"))
}

/// `heads` sensors each observe a different passive sensor in every round, so
/// their accuracy grows linearly while the observed sets stay disjoint.
fn heads_and_passives(heads: usize, passives: usize, rounds: usize) -> MeetingPattern {
    let events = (0..rounds)
        .flat_map(|r| (0..heads).map(move |h| MeetingEvent::new(r, h, heads + (h + r) % passives)))
        .collect();
    MeetingPattern::new(heads + passives, events).unwrap()
}

fn convergence_time() -> Outcome {
    let bound = convergence_lower_bound(0.1, &[1.0; 9], NoiseFisher::Finite(4.0));
    let clamp = convergence_lower_bound(1.0, &[1.0; 9], NoiseFisher::Finite(4.0));
    if (bound.bound - 24.75).abs() > 1e-12 || clamp.bound != 0.0 {
        return Err(format!(
            "bound {} (expected 24.75), clamp case {}",
            bound.bound, clamp.bound
        ));
    }
    let candidates = [
        ("heads/passives n=301", heads_and_passives(151, 150, 150), 20_000),
        ("tournament n=64", gen_tournament(64, &mut rng(5)).map_err(err)?, 5_000),
        (
            "random n=100 depth 8",
            gen_random_independent(100, 8, 0.5, &mut rng(6)).map_err(err)?,
            5_000,
        ),
    ];
    let mut finite = 0;
    let mut parts = Vec::new();
    for (name, p, trials) in candidates {
        let n = p.n();
        let r = run_experiment(&ExperimentConfig::new(
            p.clone(),
            vec![gauss(1.0); n],
            gauss(0.25),
            trials,
            55,
        ))
        .map_err(err)?;
        let t = empirical_convergence_time(&r.variances(), &p, 0.1);
        if t.is_finite() {
            finite += 1;
        }
        if t < bound.bound {
            return Err(format!("{name}: T = {t} below bound {}", bound.bound));
        }
        parts.push(format!("{name}: T = {t}"));
    }
    ensure(
        finite > 0,
        format!("bound {:.4} (clamp case 0); {}", bound.bound, parts.join(", ")),
    )
}

fn fisher_inequality() -> Outcome {
    let noise = gauss(1.0);
    let mut parts = Vec::new();
    let mut ok = true;
    for rho in [0.0, 0.5, 0.9] {
        let p1 = BivariateGaussianSpec::new(1.0, 1.0, rho).map_err(err)?;
        let (g1, g3) = default_grids_2d(&p1, &noise, 513).map_err(err)?;
        let r = check_fii_2d_dependent(&p1, &noise, &g1, &g3).map_err(err)?;
        let one_m = 1.0 - rho * rho;
        let e1 = (r.j_p1 * one_m - 1.0).abs();
        let er = (r.j_r * (one_m + 1.0) - 1.0).abs();
        ok &= e1 <= FII_2D_TOL && er <= FII_2D_TOL;
        parts.push(format!(
            "rho={rho}: rel err J_p1 {e1:.1e}, J_r {er:.1e}, slack {:.1e}",
            r.slack
        ));
    }
    let logistic = DistributionSpec::logistic(1.0).map_err(err)?;
    let g = Grid1D::for_pair(&logistic, &noise, 4001).map_err(err)?;
    let s = check_fii_1d(&logistic, &noise, &g).map_err(err)?;
    ok &= s.slack >= -FII_1D_TOL;
    parts.push(format!("logistic*gaussian slack {:.4e}", s.slack));
    ensure(ok, parts.join("; "))
}

fn kappa_trends() -> Outcome {
    let mixture = DistributionSpec::mixture2(0.5, 1.0, 0.25).map_err(err)?;
    let configs = |spec: DistributionSpec| -> Result<Vec<ExperimentConfig>, String> {
        (2..=7)
            .map(|depth| {
                let n = 1usize << depth;
                let p = gen_tournament(n, &mut rng(700 + depth as u64)).map_err(err)?;
                Ok(ExperimentConfig::new(
                    p,
                    vec![spec; n],
                    gauss(1.0),
                    20_000,
                    77 + depth as u64,
                ))
            })
            .collect()
    };
    let mix = kappa_trend(&configs(mixture)?).map_err(err)?;
    let control = kappa_trend(&configs(gauss(1.0))?).map_err(err)?;

    let var_decreasing = mix
        .windows(2)
        .all(|w| w[1].max_final_variance < w[0].max_final_variance);
    let kappa_nonincreasing = mix.windows(2).all(|w| w[1].kappa_hat <= w[0].kappa_hat * 1.02);
    let ends = mix.last().unwrap().kappa_hat < mix[0].kappa_hat;
    let control_ok = control.iter().all(|k| (k.kappa_hat - 1.0).abs() <= 0.05);
    let fmt = |ks: &[fsync_core::montecarlo::KappaPoint]| {
        ks.iter()
            .map(|k| format!("{:.3}", k.kappa_hat))
            .collect::<Vec<_>>()
            .join(" ")
    };
    ensure(
        var_decreasing && kappa_nonincreasing && ends && control_ok,
        format!(
            "mixture kappa {} (max var {}); gaussian kappa {}",
            fmt(&mix),
            mix.iter()
                .map(|k| format!("{:.4}", k.max_final_variance))
                .collect::<Vec<_>>()
                .join(" "),
            fmt(&control)
        ),
    )
}

fn disjoint_union_holds(p: &MeetingPattern) -> bool {
    let mut sets = RelevantSets::initial(p.n());
    for events in p.rounds() {
        let before = sets.clone();
        sets.advance(events);
        for e in events {
            if sets.get(e.observer).len() != before.get(e.observer).len() + before.get(e.observed).len() {
                return false;
            }
        }
    }
    true
}

fn independence_machinery() -> Outcome {
    let bad = MeetingPattern::new(2, vec![MeetingEvent::new(0, 0, 1), MeetingEvent::new(1, 1, 0)]).map_err(err)?;
    let named = match validate_independence(&bad) {
        Independence::Violation { event, .. } if event.round == 1 => event,
        other => return Err(format!("counterexample not rejected at round 1: {other:?}")),
    };
    let mut checked = 0;
    for seed in 0..200u64 {
        let mut g = rng(8000 + seed);
        let tournament = gen_tournament(1 << g.random_range(1..9), &mut g).map_err(err)?;
        let n = g.random_range(2..120);
        let random =
            gen_random_independent(n, g.random_range(1..10), g.random_range(0.05..1.0), &mut g).map_err(err)?;
        for p in [tournament, random] {
            if !validate_independence(&p).is_valid() {
                return Err(format!("generated pattern rejected (seed {seed})"));
            }
            if !disjoint_union_holds(&p) {
                return Err(format!("disjoint-union identity broken (seed {seed})"));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "counterexample rejected at {named}; {checked} generated patterns valid"
    ))
}

fn report(name: &str, started: Instant, outcome: Outcome, failed: &mut usize) {
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok(detail) => println!("PASS {name} ({secs:.1}s): {detail}"),
        Err(detail) => {
            *failed += 1;
            println!("FAIL {name} ({secs:.1}s): {detail}");
        }
    }
}

fn main() -> ExitCode {
    let mut failed = 0;

    let t = Instant::now();
    let base = gaussian_tournament_run(0.0);
    let c1 = base.as_ref().map_err(Clone::clone).and_then(gaussian_optimality);
    report("1 gaussian-optimality", t, c1, &mut failed);
    let t = Instant::now();
    let c2 = base.as_ref().map_err(Clone::clone).and_then(unbiasedness);
    report("2 unbiasedness", t, c2, &mut failed);
    drop(base);

    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("3 competitiveness", competitiveness),
        ("4 channel-capacity", channel_capacity),
        ("5 convergence-time", convergence_time),
        ("6 fisher-inequality", fisher_inequality),
        ("7 kappa-trends", kappa_trends),
        ("8 independence", independence_machinery),
    ];
    for (name, run) in criteria {
        let t = Instant::now();
        report(name, t, run(), &mut failed);
    }

    println!("{} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
