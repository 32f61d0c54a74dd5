//! Acceptance suite: one test per release criterion, each printing a
//! single `criterion N: PASS/FAIL — detail` line (run with
//! `--nocapture` to see the lines for passing tests; the per-test
//! ok/FAILED verdicts mirror them either way). Heavy experiments
//! serialize on a mutex so the stated runtime caps measure the work
//! itself, not scheduling contention, and results shared between
//! criteria are computed once.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use cusped_flow_core::exp::{
    dense_truncation_experiment, geodesic_agreement, twist_experiment, wp_model_checks,
};
use cusped_flow_core::metric::WpParams;
use cusped_flow_core::shadow::{shadowing_experiment, ShadowConfig, ShadowReport};
use cusped_flow_core::spectrum::{
    axis_height, bounded_cf_subshift, enumerate_closed_geodesics, growth_rate_fit, height_bound,
    nonsimple_height_samples, recurrence_mc, shortest_closed_length, shortest_orbit_return,
    simple_geodesic_census, CensusTable,
};
use cusped_flow_core::MetricBackend;

const AGREEMENT_SEED: u64 = 11;
const SHADOW_SEED: u64 = 7;
const DENSE_SEED: u64 = 5;
const RECURRENCE_SEED: u64 = 13;

static HEAVY: Mutex<()> = Mutex::new(());

fn heavy_guard() -> std::sync::MutexGuard<'static, ()> {
    HEAVY.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} — {detail}");
    assert!(pass, "criterion {n}: FAIL — {detail}");
}

/// Shadowing run shared by criteria 2 and 3 (same trials, two bounds).
fn shadow_report() -> &'static (ShadowReport, f64) {
    static CELL: OnceLock<(ShadowReport, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let _guard = heavy_guard();
        let clock = Instant::now();
        let rep = shadowing_experiment(&ShadowConfig::default(), SHADOW_SEED)
            .expect("default shadowing config");
        (rep, clock.elapsed().as_secs_f64())
    })
}

/// Census shared by criteria 6 and 8.
fn census_table() -> &'static (CensusTable, f64) {
    static CELL: OnceLock<(CensusTable, f64)> = OnceLock::new();
    CELL.get_or_init(|| {
        let _guard = heavy_guard();
        let clock = Instant::now();
        let table = enumerate_closed_geodesics(12.0).expect("census to length 12");
        (table, clock.elapsed().as_secs_f64())
    })
}

// ---------------------------------------------------------------------
// 1. Closed-form agreement of the integrator and the chord solver
// ---------------------------------------------------------------------

#[test]
fn criterion_01_closed_form_agreement() {
    let _guard = heavy_guard();
    let clock = Instant::now();
    let rep = geodesic_agreement(500, AGREEMENT_SEED).expect("agreement batch");
    let secs = clock.elapsed().as_secs_f64();
    let max_endpoint = rep.max_flow_endpoint_err.max(rep.max_chord_endpoint_err);
    let max_length = rep.max_flow_length_err.max(rep.max_chord_length_err);
    let pass = rep.cases.len() == 500 && max_endpoint <= 1e-6 && max_length <= 1e-6 && secs < 10.0;
    report(
        1,
        pass,
        &format!(
            "500 cases: endpoint err ≤ {max_endpoint:.2e}, length err ≤ {max_length:.2e} \
             (cap 1e-6 each), {secs:.1}s (cap 10s)"
        ),
    );
}

// ---------------------------------------------------------------------
// 2. Shadowing bound on randomized concatenations
// ---------------------------------------------------------------------

#[test]
fn criterion_02_shadowing_bound() {
    let (rep, secs) = shadow_report();
    let q = rep.ratio_quantiles.expect("non-empty trial set");
    let slope = rep.loglog_slope.expect("enough trials to fit");
    let pass = rep.trials.len() >= 200
        && rep.failures.is_empty()
        && rep.all_pass
        && slope > 0.0
        && *secs < 120.0;
    report(
        2,
        pass,
        &format!(
            "{} trials, max F / bound quantiles p50 {:.3} p90 {:.3} max {:.3} (all ≤ 1), \
             log-log slope {:.2} (> 0), {:.1}s (cap 120s)",
            rep.trials.len(),
            q.p50,
            q.p90,
            q.max,
            slope,
            secs
        ),
    );
}

// ---------------------------------------------------------------------
// 3. Derivative bound on the same trials
// ---------------------------------------------------------------------

#[test]
fn criterion_03_derivative_bound() {
    let (rep, _) = shadow_report();
    let worst = rep
        .trials
        .iter()
        .map(|t| t.max_abs_slope - t.ea_total)
        .fold(f64::NEG_INFINITY, f64::max);
    let pass = rep.all_deriv_pass && rep.failures.is_empty();
    report(
        3,
        pass,
        &format!(
            "max |F′| − ea over {} trials is {worst:.2e} (slack 1e-3) — every trial within budget",
            rep.trials.len()
        ),
    );
}

// ---------------------------------------------------------------------
// 4. Twist gaps: closed-form arctangent and cusp-model spiral
// ---------------------------------------------------------------------

#[test]
fn criterion_04_twist_gaps() {
    let _guard = heavy_guard();
    let rep = twist_experiment(64, 512, 1.0, &WpParams::default()).expect("twist ladders");
    let stats = &rep.wp_stats;
    let beyond: Vec<_> = rep.wp_rows.iter().filter(|r| r.n >= stats.n0).collect();
    let gaps_taper = beyond.windows(2).all(|w| {
        w[1].initial_gap <= w[0].initial_gap + 1e-12
            && w[1].terminal_gap <= w[0].terminal_gap + 1e-12
    });
    let pass = rep.exact_max_err <= 1e-6
        && gaps_taper
        && stats.final_gap < 0.02
        && stats.linear_bound_holds
        && stats.length_rate > 0.0;
    report(
        4,
        pass,
        &format!(
            "arctan(2/n) err ≤ {:.2e} for n ≤ 64 (cap 1e-6); cusp-model ladder to n = 512: \
             gaps non-increasing past n₀ = {}, final gap {:.4} (< 0.02), \
             length ≥ (n − n₀)·L₀ with L₀ = {:.4} > 0",
            rep.exact_max_err, stats.n0, stats.final_gap, stats.length_rate
        ),
    );
}

// ---------------------------------------------------------------------
// 5. Dense construction: coverage, Cauchy tangents, terminal windows
// ---------------------------------------------------------------------

#[test]
fn criterion_05_dense_truncations() {
    let _guard = heavy_guard();
    let clock = Instant::now();
    // The deepest truncation also hosts the nested-chord family; 20
    // bodies center it on body 9, giving chords p_{−n}…p_n up to n = 9
    // and Cauchy gaps through the n = 8 → 9 step.
    let rep = dense_truncation_experiment(20, &[4, 8, 12, 20], 0.3, DENSE_SEED)
        .expect("truncation ladder");
    let secs = clock.elapsed().as_secs_f64();
    let coverages: Vec<f64> = rep.rows.iter().map(|r| r.coverage).collect();
    let coverage_up = coverages.windows(2).all(|w| w[1] > w[0]);
    let degeneration_ok = rep.rows.iter().all(|r| r.degeneration_pass);
    // Truncation chords agree at the common anchor to measurement
    // precision: their boundary feet differ at horoball scale, far
    // below f64 resolution by depth 4.
    let anchors_converged = rep.anchor_gaps.iter().all(|&g| g <= 1e-8);
    // The per-step contraction is e^(−span): gaps saturate at the
    // ~1e-12 arc-reconstruction noise floor by n = 2, so besides the
    // literal n = 4 → 8 comparison, assert the saturation itself — every
    // gap from n = 4 on sits ≥ 2× below gap(1) and under the geometric
    // tolerance.
    let gaps = &rep.nested.cauchy_gaps;
    let g4 = gaps[3];
    let g8 = gaps[7];
    let deep_max = gaps[3..].iter().cloned().fold(0.0f64, f64::max);
    let nested_halve = 2.0 * g8 <= g4 && 2.0 * deep_max <= gaps[0] && deep_max < 1e-9;
    let limit_declared = rep.nested.limit.is_some();
    // The terminal windows are finite samplings whose boundaries move
    // with the span; their max wobbles at the percent scale on top of a
    // decades-deep decrease.
    let terminal = &rep.nested.terminal_max_f;
    let terminal_down = terminal.len() >= 2
        && terminal.windows(2).all(|w| w[1] <= w[0] * 1.01)
        && *terminal.last().expect("non-empty") < 0.1 * terminal[0];
    let pass = coverage_up
        && degeneration_ok
        && anchors_converged
        && nested_halve
        && limit_declared
        && terminal_down
        && secs < 300.0;
    report(
        5,
        pass,
        &format!(
            "coverage at eps 0.3 {:.3} → {:.3} → {:.3} (strictly up along 4, 8, 12), nested \
             midpoint-tangent gaps {g4:.2e} (n = 4) → {g8:.2e} (n = 8, ≥ 2× drop), limit \
             declared, terminal max F {:.1e} → {:.1e} (monotone down), truncation anchors \
             within {:.0e}, {secs:.1}s (cap 300s)",
            coverages[0],
            coverages[1],
            coverages[2],
            terminal[0],
            terminal.last().expect("non-empty"),
            rep.anchor_gaps.iter().cloned().fold(0.0f64, f64::max)
        ),
    );
}

// ---------------------------------------------------------------------
// 6. Closed-geodesic census against brute-force words
// ---------------------------------------------------------------------

fn mat_mul(a: [i64; 4], b: [i64; 4]) -> [i64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Lexicographically smallest rotation by an even offset: any two run
/// sequences of the same cyclic word with the same letter parity map to
/// one key, independent of the library's own normalization.
fn canonical_runs(runs: &[u32]) -> Vec<u32> {
    (0..runs.len())
        .step_by(2)
        .map(|r| {
            let mut v = runs.to_vec();
            v.rotate_left(r);
            v
        })
        .min()
        .expect("non-empty run sequence")
}

/// Every primitive cyclic word in R = [[1,1],[0,1]], L = [[1,0],[1,1]]
/// up to `max_len` letters, keyed by canonical run sequence, valued by
/// the trace of the letter product.
fn brute_force_classes(max_len: usize) -> BTreeMap<Vec<u32>, i64> {
    let r_mat = [1i64, 1, 0, 1];
    let l_mat = [1i64, 0, 1, 1];
    let mut out = BTreeMap::new();
    for len in 2..=max_len {
        'words: for bits in 0u32..(1 << len) {
            let word: Vec<bool> = (0..len).map(|i| (bits >> i) & 1 == 1).collect();
            if word.iter().all(|&b| b) || word.iter().all(|&b| !b) {
                continue;
            }
            for d in 1..len {
                if len % d == 0 && (0..len).all(|i| word[i] == word[(i + d) % len]) {
                    continue 'words;
                }
            }
            // Rotate so position 0 begins a run of R's.
            let start = (0..len)
                .find(|&i| word[i] && !word[(i + len - 1) % len])
                .expect("both letters present");
            let mut runs: Vec<u32> = Vec::new();
            let mut m = [1i64, 0, 0, 1];
            let mut i = 0;
            while i < len {
                let letter = word[(start + i) % len];
                let mut run = 0u32;
                while i < len && word[(start + i) % len] == letter {
                    m = mat_mul(m, if letter { r_mat } else { l_mat });
                    run += 1;
                    i += 1;
                }
                runs.push(run);
            }
            out.insert(canonical_runs(&runs), m[0] + m[3]);
        }
    }
    out
}

#[test]
fn criterion_06_census() {
    let (table, census_secs) = census_table();
    let clock = Instant::now();

    let frozen = 1.924_847_300_238_413_9_f64;
    let shortest = shortest_closed_length();
    let shortest_in_table =
        table.classes.iter().map(|c| c.length).fold(f64::INFINITY, f64::min);
    let shortest_ok =
        (shortest - frozen).abs() <= 1e-9 && (shortest_in_table - frozen).abs() <= 1e-9;

    let brute = brute_force_classes(8);
    let census_small: BTreeMap<Vec<u32>, i64> = table
        .classes
        .iter()
        .filter(|c| c.cf_period.iter().sum::<u32>() <= 8)
        .map(|c| (canonical_runs(&c.cf_period), c.trace))
        .collect();
    let brute_ok = census_small == brute;

    let fit = growth_rate_fit(table, (8.0, 12.0)).expect("well-populated window");
    let slope_ok = (fit.slope - 1.0).abs() <= 0.15;

    let secs = census_secs + clock.elapsed().as_secs_f64();
    let pass = shortest_ok && brute_ok && slope_ok && secs < 120.0;
    report(
        6,
        pass,
        &format!(
            "shortest length {shortest:.12} (= 2·arccosh(3/2) ± 1e-9), {} brute-force classes \
             of word length ≤ 8 matched exactly, growth slope {:.3} on [8, 12] (1.0 ± 0.15), \
             N(12) = {}, {secs:.1}s (cap 120s)",
            brute.len(),
            fit.slope,
            table.n_at(12.0)
        ),
    );
}

// ---------------------------------------------------------------------
// 7. Horseshoe entropy from the subshift spectral radius
// ---------------------------------------------------------------------

#[test]
fn criterion_07_horseshoe_entropy() {
    let mut entropies = Vec::new();
    let mut count_dev: f64 = 0.0;
    for n in 2..=4u32 {
        let spec = bounded_cf_subshift(n).expect("digit bound ≥ 2");
        let p16 = spec.periodic_count(16).expect("fits i128") as f64;
        count_dev = count_dev.max((p16.ln() / 16.0 - spec.entropy).abs());
        entropies.push(spec.entropy);
    }
    let log2_ok = (entropies[0] - 2.0_f64.ln()).abs() <= 1e-10;
    let increasing = entropies.windows(2).all(|w| w[1] > w[0]);
    let pass = log2_ok && count_dev <= 0.05 && increasing;
    report(
        7,
        pass,
        &format!(
            "entropy(2) = {:.12} (log 2 ± 1e-10), |log p(16)/16 − entropy| ≤ {count_dev:.4} \
             (cap 0.05) for N ∈ {{2, 3, 4}}, entropies {:.4} < {:.4} < {:.4}",
            entropies[0], entropies[0], entropies[1], entropies[2]
        ),
    );
}

// ---------------------------------------------------------------------
// 8. Cusp avoidance: digit-bounded axes and the simple/non-simple gap
// ---------------------------------------------------------------------

#[test]
fn criterion_08_cusp_avoidance() {
    let (table, _) = census_table();

    let mut axes_checked = 0usize;
    let mut bounded_ok = true;
    for n in 2..=6u32 {
        let bound = height_bound(n);
        for class in &table.classes {
            if class.cf_period.iter().all(|&d| d <= n) {
                axes_checked += 1;
                if axis_height(&class.cf_period) > bound + 1e-9 {
                    bounded_ok = false;
                }
            }
        }
    }
    let bounds: Vec<f64> = (2..=6).map(height_bound).collect();
    let bounds_increase = bounds.windows(2).all(|w| w[1] > w[0]);

    let census = simple_geodesic_census(30).expect("slope census");
    let h_star = census.h_star;
    let simple_ok =
        h_star.is_finite() && census.classes.iter().all(|c| c.height <= h_star + 1e-12);
    let samples = nonsimple_height_samples(12).expect("non-simple family");
    let exceeding = samples
        .iter()
        .filter(|(_, trace, h)| trace.abs() > 2.0 && *h > h_star * (1.0 + 1e-6))
        .count();

    let pass = bounded_ok && bounds_increase && simple_ok && exceeding >= 10;
    report(
        8,
        pass,
        &format!(
            "{axes_checked} digit-bounded axes under height_bound(N) for N ∈ 2..=6 (increasing \
             {:.3} → {:.3}), {} simple classes (q ≤ 30) under H* = {h_star:.4}, \
             {exceeding}/{} non-simple words exceed H*",
            bounds[0],
            bounds[4],
            census.classes.len(),
            samples.len()
        ),
    );
}

// ---------------------------------------------------------------------
// 9. Recurrence: Monte Carlo return fractions and the trace-3 orbit
// ---------------------------------------------------------------------

#[test]
fn criterion_09_recurrence() {
    let _guard = heavy_guard();
    let rep = recurrence_mc(&MetricBackend::Hyperbolic, 1000, 50.0, 0.2, RECURRENCE_SEED)
        .expect("hyperbolic Monte Carlo");
    let fractions: Vec<f64> = rep.fraction_by.iter().map(|&(_, f)| f).collect();
    let monotone = fractions.windows(2).all(|w| w[1] >= w[0]);
    let final_fraction = *fractions.last().expect("checkpoints exist");

    let period = shortest_orbit_return(0.2).expect("closed orbit returns");
    let frozen = 1.924_847_300_238_413_9_f64;
    let orbit_ok = (period - frozen).abs() <= 1e-3;

    let pass =
        rep.errors == 0 && monotone && final_fraction >= 0.9 && orbit_ok && rep.samples == 1000;
    report(
        9,
        pass,
        &format!(
            "1000 samples at δ = 0.2: recurrent fraction {final_fraction:.3} by T = 50 \
             (≥ 0.9, monotone along checkpoints), 0 integration errors; trace-3 orbit \
             returns at {period:.6} (1.9248 ± 1e-3)"
        ),
    );
}

// ---------------------------------------------------------------------
// 10. Cusp-model structure: area form, blow-up, arrival, areas
// ---------------------------------------------------------------------

#[test]
fn criterion_10_cusp_model() {
    let _guard = heavy_guard();
    let rep = wp_model_checks(&WpParams::default()).expect("model checks");
    let det_ok = rep.det_max_dev <= 1e-12;
    let blowup_ok = rep.curvature_blowup_reached && rep.min_curvature < -1e3;
    let radial_ok = rep.radial.stopped_at_cusp && rep.radial.abs_err <= 1e-4;
    let strip_ok = rep.area_rows.len() >= 3
        && rep.area_rows.iter().all(|row| row.strip_area == rep.area_eps * row.t)
        && rep.area_rows.windows(2).all(|w| w[1].strip_area > w[0].strip_area);
    let domain_ok = rep.fundamental_domain_err <= 1e-6;
    // The carried literature value is reported, never reproduced: no
    // computed area lands on it.
    let pi2_12 = std::f64::consts::PI.powi(2) / 12.0;
    let not_reproduced = (rep.moduli_area_reported - pi2_12).abs() <= 1e-15
        && (rep.fundamental_domain_area - rep.moduli_area_reported).abs() > 1e-2;

    let pass = det_ok && blowup_ok && radial_ok && strip_ok && domain_ok && not_reproduced;
    report(
        10,
        pass,
        &format!(
            "det dev ≤ {:.1e} over {} samples, min curvature {:.0} (< −10³), radial arrival \
             |ODE − quadrature| = {:.1e} (cap 1e-4), strip areas exactly eps·T, fundamental \
             domain π/3 within {:.1e} (cap 1e-6), reported area {:.4} ≠ computed {:.4}",
            rep.det_max_dev,
            rep.det_samples,
            rep.min_curvature,
            rep.radial.abs_err,
            rep.fundamental_domain_err,
            rep.moduli_area_reported,
            rep.fundamental_domain_area
        ),
    );
}

// ---------------------------------------------------------------------
// 11. Determinism: identical seeds, byte-identical artifacts
// ---------------------------------------------------------------------

#[test]
fn criterion_11_determinism() {
    let _guard = heavy_guard();
    let mut identical = Vec::new();

    let a = geodesic_agreement(100, 11).expect("agreement");
    let b = geodesic_agreement(100, 11).expect("agreement");
    identical.push((
        "agreement",
        serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(),
    ));

    let cfg = ShadowConfig { trials: 40, ..ShadowConfig::default() };
    let a = shadowing_experiment(&cfg, 7).expect("shadowing");
    let b = shadowing_experiment(&cfg, 7).expect("shadowing");
    identical.push((
        "shadow",
        serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(),
    ));

    let a = recurrence_mc(&MetricBackend::Hyperbolic, 120, 30.0, 0.2, 13).expect("recurrence");
    let b = recurrence_mc(&MetricBackend::Hyperbolic, 120, 30.0, 0.2, 13).expect("recurrence");
    identical.push((
        "recur",
        serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(),
    ));

    let a = dense_truncation_experiment(8, &[4, 8], 0.3, 21).expect("dense");
    let b = dense_truncation_experiment(8, &[4, 8], 0.3, 21).expect("dense");
    identical.push((
        "dense",
        serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(),
    ));

    let a = twist_experiment(8, 12, 1.0, &WpParams::default()).expect("twist");
    let b = twist_experiment(8, 12, 1.0, &WpParams::default()).expect("twist");
    identical.push((
        "twist",
        serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap(),
    ));

    let pass = identical.iter().all(|&(_, ok)| ok);
    let summary: Vec<&str> =
        identical.iter().map(|&(name, ok)| if ok { name } else { "MISMATCH" }).collect();
    report(
        11,
        pass,
        &format!(
            "re-running each seeded experiment reproduced byte-identical JSON: {}",
            summary.join(", ")
        ),
    );
}
