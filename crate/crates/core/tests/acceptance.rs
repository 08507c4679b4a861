//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances are pinned below.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use statrs::function::gamma::{gamma, gamma_lr};

use pmibound::bounds::{mi_chain, verify_bound_sweep, BoundKind, Sweep, SweepPoint};
use pmibound::info::{fisher_information, pmi, sfi};
use pmibound::quantum::{
    born_probability, cqfi, qfi, sld, sld_residual, DiagonalFamily, Povm, QubitPhaseFamily, StateFamily,
};
use pmibound::scenarios::{demon_work_check, linspace, DemonRecord, LangevinScenario, QubitPhaseScenario};
use pmibound::{lambda_general, ConditionalModel, Outcome, Prior, SoftmaxModel};

const SLACK_TOLERANCE: f64 = 1e-6;
const SWEEP_BUDGET: Duration = Duration::from_secs(10);
const CHAIN_BUDGET: Duration = Duration::from_secs(30);
const SQRT_LAMBDA_REL: f64 = 1e-10;
const CQFI_TOL: f64 = 1e-8;
const CHAIN_TOL: f64 = 1e-6;
/// Agreement demanded between the library MI and the 10x oracle.
const ORACLE_MI_TOL: f64 = 1e-6;
const SCORE_MEAN_TOL: f64 = 1e-8;
const FISHER_TOL: f64 = 1e-10;
const QUANTUM_TOL: f64 = 1e-8;
const DEMON_RECORDS: usize = 1000;
const CONVERGENCE_REL: f64 = 1e-4;

const SWEEP_N: usize = 50;
const QUBIT_THETA_N: usize = 41;

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Verdict);

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn langevin_x_samples() -> Vec<Outcome> {
    linspace(-4.0, 4.0, SWEEP_N)
        .unwrap()
        .into_iter()
        .map(Outcome::Value)
        .collect()
}

fn langevin_sweep(scenario: &LangevinScenario, kind: &BoundKind) -> (Sweep, Duration) {
    let (model, prior) = scenario.build().unwrap();
    let thetas = linspace(prior.grid().min(), prior.grid().max(), SWEEP_N).unwrap();
    let start = Instant::now();
    let sweep = verify_bound_sweep(&model, &prior, kind, &langevin_x_samples(), &thetas, SLACK_TOLERANCE).unwrap();
    (sweep, start.elapsed())
}

fn qubit_sweep(grid_points: usize) -> Sweep {
    let (model, prior) = QubitPhaseScenario {
        grid_points,
        ..QubitPhaseScenario::default()
    }
    .build()
    .unwrap();
    let thetas = linspace(0.0, FRAC_PI_2, QUBIT_THETA_N).unwrap();
    let xs = [Outcome::Index(0), Outcome::Index(1)];
    verify_bound_sweep(&model, &prior, &BoundKind::Theorem3, &xs, &thetas, SLACK_TOLERANCE).unwrap()
}

fn bounds_of(sweep: &Sweep) -> Vec<Option<f64>> {
    sweep
        .points
        .iter()
        .map(|p| match p {
            SweepPoint::Evaluated(r) => Some(r.bound),
            SweepPoint::Skipped { .. } => None,
        })
        .collect()
}

fn theorem1_sweep() -> Verdict {
    let (sweep, elapsed) = langevin_sweep(&LangevinScenario::default(), &BoundKind::Theorem1);
    let s = &sweep.summary;
    verdict(
        s.violations == 0 && s.skipped == 0 && s.min_slack > 0.0 && elapsed < SWEEP_BUDGET,
        format!(
            "{} points, violations={}, skipped={}, min_slack={:.3e}, {:.2?}",
            s.n_points, s.violations, s.skipped, s.min_slack, elapsed
        ),
    )
}

fn theorem2_sweep() -> Verdict {
    let scenario = LangevinScenario::gaussian_default();
    let (sweep, elapsed) = langevin_sweep(&scenario, &BoundKind::Theorem2);
    let s = &sweep.summary;

    // √Λ with f = p(θ) against the direct form |score·p + ṗ| on every prior node
    let (model, prior) = scenario.build().unwrap();
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for x in langevin_x_samples() {
        for ((&t, &p), &dp) in prior.grid().nodes().iter().zip(prior.density()).zip(prior.derivative()) {
            if model.pdf(x, t) <= 1e-12 {
                continue;
            }
            let score = model.score(x, t);
            let root = lambda_general(score * score, score, p, dp).unwrap().sqrt();
            let direct = (score * p + dp).abs();
            if root != direct {
                worst = worst.max((root - direct).abs() / direct.max(f64::MIN_POSITIVE));
            }
            compared += 1;
        }
    }
    verdict(
        s.violations == 0 && s.skipped == 0 && worst <= SQRT_LAMBDA_REL,
        format!(
            "{} points, violations={}, min_slack={:.3e}, {:.2?}; sqrt-lambda identity on {} nodes, worst rel {:.2e}",
            s.n_points, s.violations, s.min_slack, elapsed, compared, worst
        ),
    )
}

fn theorem3_sweep() -> Verdict {
    let sweep = qubit_sweep(pmibound::DEFAULT_GRID_POINTS);
    let s = &sweep.summary;
    let family = QubitPhaseFamily;
    let povm = Povm::sigma_x();
    let (model, _) = QubitPhaseScenario::default().build().unwrap();
    let mut worst_cqfi = 0.0f64;
    let mut worst_tan = 0.0f64;
    let mut max_sfi = 0.0f64;
    for point in &sweep.points {
        if let SweepPoint::Evaluated(r) = point {
            let Outcome::Index(k) = r.x else { unreachable!() };
            worst_cqfi = worst_cqfi.max((cqfi(&family, &povm, k, r.theta).unwrap() - 1.0).abs());
        }
    }
    for &t in &linspace(0.0, FRAC_PI_2, QUBIT_THETA_N).unwrap() {
        let iota = sfi(&model, Outcome::Index(0), t).unwrap();
        worst_tan = worst_tan.max((iota - (t / 2.0).tan().powi(2)).abs());
        max_sfi = max_sfi.max(iota);
    }
    verdict(
        s.violations == 0 && worst_cqfi <= CQFI_TOL && max_sfi <= 1.0 + CQFI_TOL && worst_tan <= CQFI_TOL,
        format!(
            "{} points ({} skipped at p=0), violations={}, min_slack={:.3e}, |cqfi-1|<={:.1e}, max sfi(+)={:.9}, |sfi-tan^2|<={:.1e}",
            s.n_points, s.skipped, s.violations, s.min_slack, worst_cqfi, max_sfi, worst_tan
        ),
    )
}

/// Midpoint rule with `n` cells on `[a, b]`.
fn midpoint(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Langevin MI for a uniform stiffness prior on `[a, b]`:
/// `h(X) − E_θ[½ ln(2πe D/θ)]` with the marginal from the incomplete gamma
/// function and `h(X)` by midpoint quadrature at 10x the library resolution.
fn langevin_mi_oracle(diffusion: f64, a: f64, b: f64) -> f64 {
    let width = b - a;
    let g = gamma(1.5);
    let marginal = |x: f64| {
        let c = x * x / (2.0 * diffusion);
        let raw = if c == 0.0 {
            (b.powf(1.5) - a.powf(1.5)) * 2.0 / 3.0
        } else {
            c.powf(-1.5) * g * (gamma_lr(1.5, c * b) - gamma_lr(1.5, c * a))
        };
        raw / ((2.0 * PI * diffusion).sqrt() * width)
    };
    let reach = 16.0 * (diffusion / a).sqrt();
    let entropy = 2.0
        * midpoint(0.0, reach, 10 * pmibound::scenarios::LANGEVIN_X_NODES, |x| {
            let m = marginal(x);
            if m > 0.0 {
                -m * m.ln()
            } else {
                0.0
            }
        });
    // E[ln θ] for θ ~ U[a, b]
    let mean_log = ((b * b.ln() - b) - (a * a.ln() - a)) / width;
    entropy - 0.5 * ((2.0 * PI * std::f64::consts::E * diffusion).ln() - mean_log)
}

/// Qubit MI by midpoint quadrature in θ with the closed-form marginal.
fn qubit_mi_oracle(theta_max: f64, n: usize) -> f64 {
    let plus = 0.5 + theta_max.sin() / (2.0 * theta_max);
    let marginals = [plus, 1.0 - plus];
    midpoint(0.0, theta_max, n, |t| {
        let p = [0.5 * (1.0 + t.cos()), 0.5 * (1.0 - t.cos())];
        p.iter()
            .zip(&marginals)
            .filter(|(&q, _)| q > 0.0)
            .map(|(&q, &m)| q * (q / m).ln())
            .sum::<f64>()
    }) / theta_max
}

fn averaging_chain() -> Verdict {
    let start = Instant::now();
    let (lm, lp) = LangevinScenario::default().build().unwrap();
    let lchain = mi_chain(&lm, &lp, &BoundKind::Theorem1, CHAIN_TOL).unwrap();
    let (qm, qp) = QubitPhaseScenario::default().build().unwrap();
    let qchain = mi_chain(&qm, &qp, &BoundKind::Theorem3, CHAIN_TOL).unwrap();
    let elapsed = start.elapsed();

    let l_oracle = langevin_mi_oracle(1.0, 0.5, 1.5);
    let q_oracle = qubit_mi_oracle(FRAC_PI_2, 10 * pmibound::DEFAULT_GRID_POINTS);
    let ordered = |oracle: f64, c: &pmibound::MiChain| {
        oracle <= c.averaged_pointwise_bound && c.averaged_pointwise_bound <= c.mi_bound_average + CHAIN_TOL
    };
    let agree = (l_oracle - lchain.mutual_information).abs() <= ORACLE_MI_TOL
        && (q_oracle - qchain.mutual_information).abs() <= ORACLE_MI_TOL;
    verdict(
        ordered(l_oracle, &lchain) && ordered(q_oracle, &qchain) && agree && elapsed < CHAIN_BUDGET,
        format!(
            "langevin {:.6} <= {:.6} <= {:.6} (library MI {:.9}); qubit {:.6} <= {:.6} <= {:.6} (library MI {:.9}); {:.2?}",
            l_oracle,
            lchain.averaged_pointwise_bound,
            lchain.mi_bound_average,
            lchain.mutual_information,
            q_oracle,
            qchain.averaged_pointwise_bound,
            qchain.mi_bound_average,
            qchain.mutual_information,
            elapsed
        ),
    )
}

fn cross_term() -> Verdict {
    let model = SoftmaxModel::new([
        ("a", vec![0.0, 1.2, -0.4]),
        ("b", vec![0.3, -0.7, 0.2, 0.05]),
        ("c", vec![-0.5]),
    ])
    .unwrap();
    let xs = model.outcome_space().outcomes();
    let mut worst_mean = 0.0f64;
    let mut worst_fisher = 0.0f64;
    for &t in &linspace(-2.0, 2.0, 100).unwrap() {
        let mean: f64 = xs.iter().map(|&x| model.pdf(x, t) * model.score(x, t)).sum();
        let mean_sfi: f64 = xs.iter().map(|&x| model.pdf(x, t) * sfi(&model, x, t).unwrap()).sum();
        worst_mean = worst_mean.max(mean.abs());
        worst_fisher = worst_fisher.max((mean_sfi - fisher_information(&model, t).unwrap()).abs());
    }
    verdict(
        worst_mean <= SCORE_MEAN_TOL && worst_fisher <= FISHER_TOL,
        format!("100 nodes, |E[score]|<={worst_mean:.2e}, |E[sfi]-F|<={worst_fisher:.2e}"),
    )
}

/// Worst `|Σ p·cqfi − qfi|` and SLD residual over `thetas`.
fn quantum_worst<F: StateFamily>(family: &F, povm: &Povm, thetas: &[f64]) -> (f64, f64) {
    let mut worst_sum = 0.0f64;
    let mut worst_residual = 0.0f64;
    for &t in thetas {
        let rho = family.rho(t).unwrap();
        let drho = family.drho(t).unwrap();
        let l = sld(&rho, &drho).unwrap();
        worst_residual = worst_residual.max(sld_residual(&rho, &drho, &l).unwrap());
        let mut total = 0.0;
        for (k, e) in povm.elements().iter().enumerate() {
            let p = born_probability(&rho, e).unwrap();
            if p > 1e-12 {
                total += p * cqfi(family, povm, k, t).unwrap();
            }
        }
        worst_sum = worst_sum.max((total - qfi(family, t).unwrap()).abs());
    }
    (worst_sum, worst_residual)
}

fn quantum_identities() -> Verdict {
    let thetas = linspace(0.05, 1.5, 30).unwrap();
    let mut rows = Vec::new();
    for povm in [Povm::sigma_x(), Povm::sigma_y(), Povm::sigma_z()] {
        rows.push(("qubit", quantum_worst(&QubitPhaseFamily, &povm, &thetas)));
    }
    let diag = DiagonalFamily::new(|t: f64| 0.5 + 0.4 * t.sin(), |t: f64| 0.4 * t.cos());
    for povm in [Povm::sigma_z(), Povm::sigma_x()] {
        rows.push(("diagonal", quantum_worst(&diag, &povm, &thetas)));
    }
    let three = common::three_level_family(vec![0.2, 0.7, -0.3, 0.4, 0.5, -0.8, 0.3, 0.9, -0.2, 0.6]);
    let povms = [
        common::projective_povm(3, &[0.4, -1.1, 0.7, 2.0, -0.3, 1.3]),
        common::binary_povm(3, &[0.9, 0.35, 0.1], &[1.7, 0.2, -0.9, 0.5, 1.1, -1.4]),
    ];
    for povm in &povms {
        rows.push(("three-level", quantum_worst(&three, povm, &thetas)));
    }
    let worst_sum = rows.iter().map(|r| r.1 .0).fold(0.0, f64::max);
    let worst_res = rows.iter().map(|r| r.1 .1).fold(0.0, f64::max);
    verdict(
        worst_sum <= QUANTUM_TOL && worst_res <= QUANTUM_TOL,
        format!(
            "{} family/POVM pairs, |sum p*cqfi - qfi|<={worst_sum:.2e}, SLD residual<={worst_res:.2e}",
            rows.len()
        ),
    )
}

fn demon_chain() -> Verdict {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (lm, lp) = LangevinScenario::default().build().unwrap();
    let (qm, qp) = QubitPhaseScenario::default().build().unwrap();
    let mut chained = 0usize;
    let mut flagged = 0usize;
    let mut tried_violations = 0usize;
    for n in 0..DEMON_RECORDS {
        let (model, prior, x, theta): (&dyn ConditionalModel, &Prior, Outcome, f64) = if n % 2 == 0 {
            (
                &lm,
                &lp,
                Outcome::Value(rng.random_range(-4.0..4.0)),
                rng.random_range(0.5..1.5),
            )
        } else {
            // cos θ = −1 never occurs on [0, π/2], so both outcomes have p > 0 off θ = 0
            (
                &qm,
                &qp,
                Outcome::Index(rng.random_range(0..2)),
                rng.random_range(0.01..FRAC_PI_2),
            )
        };
        let i = pmi(model, prior, x, theta).unwrap();
        let beta = rng.random_range(0.1..10.0);
        let delta_f = rng.random_range(-2.0..2.0);
        let deficit = rng.random_range(0.0..3.0);
        let record = DemonRecord {
            beta,
            work_extracted: (i - deficit) / beta + delta_f,
            delta_f,
            x,
            theta,
        };
        let check = demon_work_check(&record, model, prior).unwrap();
        if check.sagawa_ueda_ok && check.chained_ok {
            chained += 1;
        }
        // a record exceeding the pointwise bound itself
        let excess = rng.random_range(1e-6..1.0);
        let bad = DemonRecord {
            work_extracted: (check.bound + excess) / beta + delta_f,
            ..record
        };
        let bad_check = demon_work_check(&bad, model, prior).unwrap();
        tried_violations += 1;
        if !bad_check.chained_ok && !bad_check.sagawa_ueda_ok {
            flagged += 1;
        }
    }
    verdict(
        chained == DEMON_RECORDS && flagged == tried_violations,
        format!("chained_ok {chained}/{DEMON_RECORDS}, violations flagged {flagged}/{tried_violations}"),
    )
}

fn max_relative_change(coarse: &[Option<f64>], fine: &[Option<f64>]) -> Option<f64> {
    if coarse.len() != fine.len() {
        return None;
    }
    let mut worst = 0.0f64;
    for (a, b) in coarse.iter().zip(fine) {
        match (a, b) {
            (Some(a), Some(b)) => worst = worst.max((a - b).abs() / b.abs()),
            (None, None) => {}
            _ => return None,
        }
    }
    Some(worst)
}

fn convergence() -> Verdict {
    let n = pmibound::DEFAULT_GRID_POINTS;
    let refined = 2 * n - 1;
    let mut parts = Vec::new();
    let mut pass = true;
    let mut record = |name: &str, change: Option<f64>| {
        pass &= change.is_some_and(|c| c < CONVERGENCE_REL);
        parts.push(match change {
            Some(c) => format!("{name} {c:.2e}"),
            None => format!("{name} skip pattern changed"),
        });
    };
    for (name, scenario, kind) in [
        ("theorem1", LangevinScenario::default(), BoundKind::Theorem1),
        ("theorem2", LangevinScenario::gaussian_default(), BoundKind::Theorem2),
    ] {
        let coarse = langevin_sweep(&scenario, &kind).0;
        let fine = langevin_sweep(
            &LangevinScenario {
                grid_points: refined,
                ..scenario
            },
            &kind,
        )
        .0;
        record(name, max_relative_change(&bounds_of(&coarse), &bounds_of(&fine)));
    }
    record(
        "theorem3",
        max_relative_change(&bounds_of(&qubit_sweep(n)), &bounds_of(&qubit_sweep(refined))),
    );

    let chains = |grid_points: usize| {
        let (lm, lp) = LangevinScenario {
            grid_points,
            ..LangevinScenario::default()
        }
        .build()
        .unwrap();
        let (qm, qp) = QubitPhaseScenario {
            grid_points,
            ..QubitPhaseScenario::default()
        }
        .build()
        .unwrap();
        [
            mi_chain(&lm, &lp, &BoundKind::Theorem1, CHAIN_TOL).unwrap(),
            mi_chain(&qm, &qp, &BoundKind::Theorem3, CHAIN_TOL).unwrap(),
        ]
        .iter()
        .flat_map(|c| [Some(c.averaged_pointwise_bound), Some(c.mi_bound_average)])
        .collect::<Vec<_>>()
    };
    record("chain bounds", max_relative_change(&chains(n), &chains(refined)));
    verdict(
        pass,
        format!("{n} -> {refined} nodes, max relative change: {}", parts.join(", ")),
    )
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let criteria: [Criterion; 8] = [
        ("theorem1 langevin sweep", theorem1_sweep),
        ("theorem2 gaussian-prior sweep", theorem2_sweep),
        ("theorem3 qubit sweep", theorem3_sweep),
        ("averaging chain", averaging_chain),
        ("cross-term cancellation", cross_term),
        ("quantum identities", quantum_identities),
        ("demon chain", demon_chain),
        ("grid-doubling convergence", convergence),
    ];
    let mut failures = 0;
    for (name, run) in criteria {
        let v = run();
        if !v.pass {
            failures += 1;
        }
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
