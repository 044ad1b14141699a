//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use remctl_core::bloch::{angle, branch_target_vectors, coherent_vector, protocol_geometry_report};
use remctl_core::decoh::{attach_environment, decohering_control_unitary, measure_with_environment};
use remctl_core::protocol::{
    apply_control_unitary, completeness_sum, kraus_branches, make_pair, measure_control, outcome_probabilities,
    remote_step_on_bipartite_target, schmidt_form_target, OutcomeSelection,
};
use remctl_core::random::{haar_state, haar_unitary};
use remctl_core::reach::campaign::{format_table, run_campaign, CampaignConfig};
use remctl_core::reach::coverage::{reachable_set_coverage, SphereGrid};
use remctl_core::reach::gates::{GateFamily, ParamRange};
use remctl_core::reach::Protocol;
use remctl_core::{
    partial_trace, schmidt_decompose, schmidt_number, BipartiteState, CMatrix, PureState, Subsystem, UnitaryGate, C,
};

const SAMPLES: usize = 1000;
const DIMS: [usize; 3] = [2, 3, 4];

const TOL_COMPLETENESS: f64 = 1e-12;
const TOL_PROTOCOL: f64 = 1e-12;
const TOL_HADAMARD: f64 = 1e-15;
const COVERAGE_UNITARY: (f64, f64) = (0.45, 0.55);
const COVERAGE_KRAUS_MIN: f64 = 0.95;
const COVERAGE_GRID: (usize, usize) = (32, 64);
const COVERAGE_SWEEP: usize = 512;
const TOL_GEOMETRY: f64 = 1e-9;
const TOL_DECOHERENCE: f64 = 1e-12;
const TOL_SCHMIDT: f64 = 1e-10;
const CAMPAIGN_RATIO: f64 = 2.0;
const NET_PROB_RANGE: (f64, f64) = (0.0, 0.2);

const LIMIT_COMPLETENESS: Duration = Duration::from_secs(5);
const LIMIT_COVERAGE: Duration = Duration::from_secs(30);
const LIMIT_CAMPAIGN: Duration = Duration::from_secs(120);

type U = UnitaryGate<f64>;
type S = PureState<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn kraus_completeness() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst: f64 = 0.0;
    for &n in &DIMS {
        for _ in 0..SAMPLES {
            let u: U = haar_unitary(n, &mut r);
            let pair = make_pair(haar_state::<f64, _>(n, &mut r).amplitudes()).unwrap();
            let sum = completeness_sum(&kraus_branches(&u, &pair).unwrap());
            worst = worst.max(sum.max_abs_diff(&CMatrix::identity(n)));
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= TOL_COMPLETENESS && t < LIMIT_COMPLETENESS,
        format!("max |sum - I| = {worst:.1e} (tol {TOL_COMPLETENESS:.0e}), {t:.2?} (limit {LIMIT_COMPLETENESS:?})"),
    )
}

fn protocol_consistency() -> Outcome {
    let mut r = rng(2);
    let (mut sum_err, mut state_err): (f64, f64) = (0.0, 0.0);
    for &n in &DIMS {
        for _ in 0..SAMPLES {
            let u: U = haar_unitary(n, &mut r);
            let pair = make_pair(haar_state::<f64, _>(n, &mut r).amplitudes()).unwrap();
            let probs = outcome_probabilities(&pair, &u).unwrap();
            sum_err = sum_err.max((probs.iter().sum::<f64>() - 1.0).abs());
            let steered = apply_control_unitary(&pair, &u).unwrap();
            for b in kraus_branches(&u, &pair).unwrap() {
                if b.probability < 1e-12 {
                    continue;
                }
                let o = measure_control(&steered, OutcomeSelection::Fixed(b.index)).unwrap();
                let k = b.branch_state(pair.coefficients()).unwrap();
                state_err = state_err.max(k.distance_up_to_phase(&o.target_state));
            }
        }
    }
    outcome(
        sum_err <= TOL_PROTOCOL && state_err <= TOL_PROTOCOL,
        format!("|sum P - 1| = {sum_err:.1e}, branch state distance = {state_err:.1e} (tol {TOL_PROTOCOL:.0e})"),
    )
}

fn hadamard_extraction() -> Outcome {
    let pair = make_pair(&[C::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
    let b = kraus_branches(&U::hadamard(), &pair).unwrap();
    let s = C::new(FRAC_1_SQRT_2, 0.0);
    let e1 = b[0].operator().max_abs_diff(&CMatrix::identity(2).scale(s));
    let e2 = b[1].operator().max_abs_diff(&U::pauli_z().matrix().scale(s));
    outcome(
        e1 <= TOL_HADAMARD && e2 <= TOL_HADAMARD,
        format!("|Y1 - I/sqrt2| = {e1:.1e}, |Y2 - Z/sqrt2| = {e2:.1e} (tol {TOL_HADAMARD:.0e})"),
    )
}

fn reachability() -> Outcome {
    let start = Instant::now();
    let plus = S::from_reals(&[1.0, 1.0]).unwrap();
    let grid = SphereGrid::new(COVERAGE_GRID.0, COVERAGE_GRID.1);
    let fam = GateFamily::restricted();
    let unitary = reachable_set_coverage(&plus, &fam, false, grid, COVERAGE_SWEEP);
    let kraus = reachable_set_coverage(&plus, &fam, true, grid, COVERAGE_SWEEP);
    let t = start.elapsed();
    let wide = fam.with_ranges([ParamRange::closed(0.0, PI), ParamRange::half_open(0.0, 2.0 * PI)]);
    let wide_u = reachable_set_coverage(&plus, &wide, false, grid, COVERAGE_SWEEP);
    let wide_k = reachable_set_coverage(&plus, &wide, true, grid, COVERAGE_SWEEP);
    outcome(
        (COVERAGE_UNITARY.0..=COVERAGE_UNITARY.1).contains(&unitary)
            && kraus >= COVERAGE_KRAUS_MIN
            && t < LIMIT_COVERAGE,
        format!(
            "unitary {unitary:.4} (want {:.2}..{:.2}), kraus {kraus:.4} (want >= {COVERAGE_KRAUS_MIN}), {t:.2?}; \
             info: theta<=pi, phi<2pi gives unitary {wide_u:.4}, kraus {wide_k:.4}",
            COVERAGE_UNITARY.0, COVERAGE_UNITARY.1
        ),
    )
}

fn geometry() -> Outcome {
    let mut r = rng(5);
    let half = FRAC_1_SQRT_2;
    let (mut worst_angle, mut worst_rule): (f64, f64) = (0.0, 0.0);
    let mut done = 0;
    while done < SAMPLES {
        let u: U = haar_unitary(2, &mut r);
        let a = haar_state::<f64, _>(2, &mut r);
        if (a.amplitudes()[0].norm_sqr() - 0.5).abs() < 1e-3 {
            continue;
        }
        done += 1;
        let rep = protocol_geometry_report(a.amplitudes(), &u).unwrap();
        worst_angle = worst_angle.max(rep.angles.max_residual());
        // (a) shrink along z, (b) steering keeps |v^(t)|, (c) branches are pure
        let ent = rep.target_entangled;
        let rule_a = if ent.magnitude() < half {
            ent.vx.abs().max(ent.vy.abs())
        } else {
            1.0
        };
        let rule_b = (rep.target.magnitude() - ent.magnitude()).abs();
        let rule_c = rep
            .branches
            .iter()
            .map(|b| (b.target.magnitude() - half).abs())
            .fold(0.0, f64::max);
        worst_rule = worst_rule.max(rule_a).max(rule_b).max(rule_c);
        let rho = partial_trace(
            &apply_control_unitary(&make_pair(a.amplitudes()).unwrap(), &u).unwrap(),
            Subsystem::A,
        );
        worst_rule = worst_rule.max((coherent_vector(&rho).unwrap().magnitude() - ent.magnitude()).abs());
    }
    let mut worst_max: f64 = 0.0;
    for _ in 0..SAMPLES {
        let u: U = haar_unitary(2, &mut r);
        let v = branch_target_vectors(&[C::new(half, 0.0); 2], &u).unwrap();
        let ang = angle(&v[0].unwrap(), &v[1].unwrap()).unwrap();
        worst_max = worst_max.max((ang - PI).abs());
    }
    let pass = worst_angle <= TOL_GEOMETRY && worst_rule <= TOL_GEOMETRY && worst_max <= TOL_GEOMETRY;
    outcome(
        pass,
        format!(
            "angle equalities {worst_angle:.1e}, rules (a)-(c) {worst_rule:.1e}, maximal |angle - pi| {worst_max:.1e} (tol {TOL_GEOMETRY:.0e})"
        ),
    )
}

fn decoherence() -> Outcome {
    let mut r = rng(6);
    let (mut dp, mut ds): (f64, f64) = (0.0, 0.0);
    let mut mismatched = 0;
    for k in 0..SAMPLES {
        let n = DIMS[k % DIMS.len()];
        let u: U = haar_unitary(n, &mut r);
        let pair = make_pair(haar_state::<f64, _>(n, &mut r).amplitudes()).unwrap();
        let m = k % n;
        let noisy = decohering_control_unitary(&attach_environment(&pair, n).unwrap(), &u).unwrap();
        let clean = apply_control_unitary(&pair, &u).unwrap();
        match (
            measure_with_environment(&noisy, m),
            measure_control(&clean, OutcomeSelection::Fixed(m)),
        ) {
            (Ok((t, p)), Ok(o)) => {
                dp = dp.max((p - o.probability).abs());
                ds = ds.max(t.distance_up_to_phase(&o.target_state));
            }
            _ => mismatched += 1,
        }
    }
    outcome(
        dp <= TOL_DECOHERENCE && ds <= TOL_DECOHERENCE && mismatched == 0,
        format!("probability diff {dp:.1e}, branch state distance {ds:.1e} (tol {TOL_DECOHERENCE:.0e}), failed branches {mismatched}"),
    )
}

fn schmidt_change() -> Outcome {
    let bell = schmidt_form_target(&[C::new(FRAC_1_SQRT_2, 0.0); 2]).unwrap();
    let before = schmidt_number(&bell, 1e-10);
    let (after_state, p) = remote_step_on_bipartite_target(&bell, &U::identity(2), 0).unwrap();
    let after = schmidt_number(&after_state, 1e-10);

    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for k in 0..SAMPLES {
        let (na, nb) = (DIMS[k % 3], DIMS[(k / 3) % 3]);
        let amps = haar_state::<f64, _>(na * nb, &mut r).amplitudes().to_vec();
        let s = BipartiteState::new(na, nb, amps).unwrap();
        let c0 = schmidt_decompose(&s).coefficients;
        let ua: U = haar_unitary(na, &mut r);
        let ub: U = haar_unitary(nb, &mut r);
        for moved in [
            s.apply_local(Some(&ua), None).unwrap(),
            s.apply_local(None, Some(&ub)).unwrap(),
        ] {
            let c1 = schmidt_decompose(&moved).coefficients;
            worst = c0.iter().zip(&c1).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
        }
    }
    outcome(
        before == 2 && after == 1 && worst <= TOL_SCHMIDT,
        format!("Schmidt number {before} -> {after} (P = {p:.3}), local-unitary coefficient drift {worst:.1e} (tol {TOL_SCHMIDT:.0e})"),
    )
}

fn campaign() -> Outcome {
    let start = Instant::now();
    let cfg = CampaignConfig::default();
    let out = run_campaign(&cfg).unwrap();
    let t = start.elapsed();
    let row = |p: Protocol| out.summary.rows.iter().find(|r| r.protocol == p).unwrap();
    let (u, r) = (row(Protocol::Unitary), row(Protocol::Remote));
    let in_range = |x: f64| x > NET_PROB_RANGE.0 && x < NET_PROB_RANGE.1;
    let ratio = r.reached_total as f64 / u.reached_total.max(1) as f64;
    for line in format_table(&out.summary).lines() {
        println!("    {line}");
    }
    outcome(
        t < LIMIT_CAMPAIGN
            && r.reached_total as f64 >= CAMPAIGN_RATIO * u.reached_total as f64
            && in_range(u.net_prob_mean)
            && in_range(r.net_prob_mean),
        format!(
            "reached remote {} vs unitary {} (ratio {ratio:.3}, want >= {CAMPAIGN_RATIO}), net prob {:.4} / {:.4} (want in (0, 0.2)), {t:.2?}",
            r.reached_total, u.reached_total, r.net_prob_mean, u.net_prob_mean
        ),
    )
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("remctl-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let run = |name: &str, par: &str| {
        let path = dir.join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_remctl"))
            .args(["campaign", "--seed", "42", "--parallelism", par, "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        (
            std::fs::read(&path).unwrap(),
            std::fs::read(path.with_extension("summary.json")).unwrap(),
        )
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "4");
    let c = run("c.csv", "1");
    std::fs::remove_dir_all(&dir).ok();
    outcome(
        a == b && a == c,
        format!(
            "CSV {} bytes; parallelism 1 vs 4 identical: {}, repeat identical: {}",
            a.0.len(),
            a == b,
            a == c
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Kraus completeness", kraus_completeness),
        ("protocol consistency", protocol_consistency),
        ("Hadamard gate extraction", hadamard_extraction),
        ("reachability enlargement", reachability),
        ("Bloch geometry", geometry),
        ("decoherence immunity", decoherence),
        ("Schmidt-number change", schmidt_change),
        ("campaign reproduction", campaign),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
