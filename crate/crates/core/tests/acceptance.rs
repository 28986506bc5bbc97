//! Acceptance criteria. Each prints one PASS/FAIL line; the binary exits
//! non-zero if any criterion fails.

use std::time::{Duration, Instant};

use beamloc::beam_model::{
    beamwidth_3db, focal_distance, focal_major_radius, invert_focus, rayleigh_length, Focus,
    FocusedBeam, PlanePoint,
};
use beamloc::codebook::{children, pilot_counts, FocusCodebook};
use beamloc::harness::export::{write_cdf, write_samples, write_sweep, write_track, Summary};
use beamloc::harness::{
    ks_two_sample, noise_sweep, run_campaign, run_tracking, sample_rx, CodebookChoice, Scenario,
};
use beamloc::localizer::{
    AreaOfInterest, Localizer, NoiseModel, Phase, RxGroundTruth, SearchMode, SearchTrace,
};
use beamloc::units;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 1;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    (x - target).abs() <= rel * target
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail = format!("{} [{:.1} s]", o.detail, elapsed.as_secs_f64());
    if let Some(limit) = limit {
        if elapsed > limit {
            o.pass = false;
            o.detail = format!("{} exceeds {} s", o.detail, limit.as_secs());
        }
    }
    o
}

fn k150() -> f64 {
    units::wavenumber(units::wavelength(150e9_f64))
}

fn c1_inverse_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0f64;
    for _ in 0..10_000 {
        let d_f: f64 = rng.random_range(0.05..50.0);
        let r_max: f64 = rng.random_range(1e-3..10.0);
        let k = rng.random_range(100.0..20_000.0);
        let (f0, w) = invert_focus(d_f, r_max, k).unwrap();
        let z_r = rayleigh_length(w, k).unwrap();
        let d = focal_distance(f0, z_r).unwrap();
        let r = focal_major_radius(f0, z_r).unwrap();
        worst = worst
            .max(((d - d_f) / d_f).abs())
            .max(((r - r_max) / r_max).abs());
    }
    outcome(
        worst < 1e-9,
        format!("worst relative error {worst:.2e} (< 1e-9)"),
    )
}

fn c2_half_power_ellipse() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let k = k150();
    let mut worst = 0f64;
    for _ in 0..1_000 {
        let f0 = rng.random_range(0.1..20.0);
        let w = rng.random_range(0.01..0.3);
        let beam = FocusedBeam::new(1.0, w, w, 0.0, Focus::Finite(f0), k).unwrap();
        let z_r = rayleigh_length(w, k).unwrap();
        let d_f = focal_distance(f0, z_r).unwrap();
        let r = focal_major_radius(f0, z_r).unwrap();
        let peak = beam.power_density(PlanePoint::new(0.0, d_f));
        for z in [d_f - r, d_f + r] {
            let ratio = beam.power_density(PlanePoint::new(0.0, z)) / peak;
            worst = worst.max((ratio / 0.5 - 1.0).abs());
        }
    }
    outcome(
        worst < 1e-9,
        format!("worst relative deviation {worst:.2e} (< 1e-9)"),
    )
}

fn c3_beamwidth_and_rayleigh() -> Outcome {
    let lambda = units::wavelength(150e9_f64);
    let narrow = beamwidth_3db(0.07, lambda).unwrap().to_degrees();
    let wide = beamwidth_3db(0.25, lambda).unwrap().to_degrees();
    let z_r = rayleigh_length(0.25, k150()).unwrap();
    let pass =
        (narrow - 0.61).abs() <= 0.01 && (wide - 0.17).abs() <= 0.01 && (z_r - 98.0).abs() <= 1.0;
    outcome(
        pass,
        format!("θ3dB(7 cm)={narrow:.4}°, θ3dB(25 cm)={wide:.4}°, z_R(25 cm)={z_r:.2} m"),
    )
}

fn c4_table_of_radii() -> Outcome {
    let expected = [
        1.5, 0.75, 0.375, 0.1875, 0.09375, 0.046875, 0.0234375, 0.01171875,
    ];
    let cb = FocusCodebook::new(5.0, 0.3, 8, k150()).unwrap();
    let got: Vec<f64> = (1..=8).map(|l| cb.codeword(l, 1).major_radius).collect();
    let level_consistent =
        (1..=8).all(|l| cb.level(l).iter().all(|c| c.major_radius == got[l - 1]));
    let worst = got
        .iter()
        .zip(expected)
        .map(|(g, e)| ((g - e) / e).abs())
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-12 && level_consistent,
        format!("r_max per level {got:?}, worst relative deviation {worst:.1e}"),
    )
}

fn c5_pilot_counts() -> Outcome {
    let got = pilot_counts(10);
    outcome(got == (1024, 20), format!("pilot_counts(10) = {got:?}"))
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn c6_ranging_oracle() -> Outcome {
    let loc = Scenario::<f64>::scenario1().localizer().unwrap();
    let focus = loc.focus_codebook();
    let last = focus.depth();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 500;
    let mut agree = 0;
    for j in 0..n {
        let d = 0.1 + 4.9 * (j as f64 + 0.5) / n as f64;
        let rx = RxGroundTruth::new(0.0, d).unwrap();
        let powers: Vec<f64> = (1..=focus.level(last).len())
            .map(|i| loc.measure_focus(last, i, 0.0, &rx, &mut rng))
            .collect();
        let oracle = argmax(&powers) + 1;
        let mut trace = SearchTrace::default();
        loc.phase2(0.0, &rx, false, &mut rng, &mut trace);
        if trace.steps.last().unwrap().chosen == oracle {
            agree += 1;
        }
    }
    let frac = agree as f64 / n as f64;
    outcome(
        frac >= 0.99,
        format!("{agree}/{n} grid points agree with exhaustive argmax ({frac:.3} ≥ 0.99)"),
    )
}

fn c7_direction_oracle() -> Outcome {
    let s = Scenario::<f64>::scenario1();
    let loc = s.localizer().unwrap();
    let area = s.area().unwrap();
    let dir = loc.direction_codebook();
    let last = dir.depth();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 1_000;
    let mut agree = 0;
    for _ in 0..n {
        let rx = sample_rx(&mut rng, &area);
        let powers: Vec<f64> = (1..=dir.level(last).len())
            .map(|i| loc.measure_direction(last, i, &rx, &mut rng))
            .collect();
        let oracle = argmax(&powers) + 1;
        let mut trace = SearchTrace::default();
        loc.phase1(&rx, false, &mut rng, &mut trace);
        if trace.steps.last().unwrap().chosen.abs_diff(oracle) <= 1 {
            agree += 1;
        }
    }
    let frac = agree as f64 / n as f64;
    outcome(
        frac >= 0.99,
        format!(
            "{agree}/{n} receivers within one final cell of exhaustive argmax ({frac:.3} ≥ 0.99)"
        ),
    )
}

fn c8_ideal_mode() -> Outcome {
    let s = Scenario::<f64>::scenario1().with_mode(SearchMode::Ideal);
    let c = run_campaign(&s, 10_000, SEED).unwrap();
    // one final-level direction cell at the far edge of the area
    let cell = s.max_distance * 2f64.powi(1 - s.direction_levels as i32);
    let max_bound = 0.041 + cell;
    let pass = within(c.stats.mean, 0.0195, 0.15) && c.stats.max <= max_bound;
    outcome(
        pass,
        format!(
            "mean {:.4} m (1.95 cm ± 15%), max {:.4} m (≤ {:.4} m)",
            c.stats.mean, c.stats.max, max_bound
        ),
    )
}

struct Measured {
    s1: beamloc::harness::Campaign<f64>,
    s2: beamloc::harness::Campaign<f64>,
}

fn c9_scenario1_measured(m: &Measured) -> Outcome {
    let st = &m.s1.stats;
    let pass = within(st.mean, 0.0197, 0.25) && st.p999 <= 0.10;
    outcome(
        pass,
        format!(
            "mean {:.4} m (1.97 cm ± 25%), p99.9 {:.4} m (≤ 0.10 m)",
            st.mean, st.p999
        ),
    )
}

fn c10_scenario2_measured(m: &Measured) -> Outcome {
    let (a, b) = (m.s1.stats.mean, m.s2.stats.mean);
    let ratio = b / a;
    let pass = within(b, 0.042, 0.25) && within(ratio, 2.0, 0.2);
    outcome(
        pass,
        format!("mean {b:.4} m (4.2 cm ± 25%), ratio to scenario 1 {ratio:.3} (2 ± 20%)"),
    )
}

fn c11_noise_sweep() -> Outcome {
    let n = 2_000;
    let mut pass = true;
    let mut parts = Vec::new();
    for base in [Scenario::<f64>::scenario1(), Scenario::<f64>::scenario2()] {
        let quiet = noise_sweep(&base, &[-130.0, -120.0, -110.0], n, SEED).unwrap();
        let loud = noise_sweep(&base, &[20.0], n, SEED).unwrap();
        let bfr = noise_sweep(&base, &[-50.0], n, SEED).unwrap()[0].success_probability;
        let rbfr = noise_sweep(
            &base.clone().with_codebook(CodebookChoice::Rbfr),
            &[-50.0],
            n,
            SEED,
        )
        .unwrap()[0]
            .success_probability;
        let quiet_min = quiet
            .iter()
            .map(|p| p.success_probability)
            .fold(1.0, f64::min);
        let loud_s = loud[0].success_probability;
        pass &= quiet_min >= 0.95 && loud_s <= 0.05 && rbfr - bfr >= 0.15;
        parts.push(format!(
            "{}: min success ≤-110 dBm {quiet_min:.3} (≥ 0.95), +20 dBm {loud_s:.3} (≤ 0.05), R-bfr − Bfr at -50 dBm {:.3} (≥ 0.15)",
            base.name,
            rbfr - bfr
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c12_perfect_phase1(m: &Measured) -> Outcome {
    let s = Scenario::<f64>::scenario1().with_mode(SearchMode::PerfectPhase1);
    // independent sample from the measured campaign
    let perfect = run_campaign(&s, 10_000, SEED + 1).unwrap();
    let ks = ks_two_sample(&m.s1.errors(), &perfect.errors()).unwrap();
    outcome(
        ks.p_value > 0.01,
        format!(
            "KS D = {:.4}, p = {:.3} (not rejected at 0.01)",
            ks.statistic, ks.p_value
        ),
    )
}

fn c13_tracking() -> Outcome {
    let s = Scenario::<f64>::scenario1_track();
    let c = run_tracking(&s, 1_000, SEED).unwrap();
    let st = &c.stats;
    let pass = within(st.mean, 0.02, 0.3) && st.p999 <= 0.06;
    outcome(
        pass,
        format!(
            "{} epochs, mean {:.4} m (2 cm ± 30%), p99.9 {:.4} m (≤ 0.06 m), {} pilots/epoch",
            st.n_samples, st.mean, st.p999, st.mean_pilots
        ),
    )
}

fn outputs(seed: u64) -> Vec<u8> {
    let s = Scenario::<f64>::scenario1().with_noise_dbm(-70.0);
    let mut out = Vec::new();
    let c = run_campaign(&s, 2_000, seed).unwrap();
    write_cdf(&mut out, &c.stats).unwrap();
    write_samples(&mut out, &c).unwrap();
    Summary::new(&s, 2_000, seed, &c.stats)
        .write(&mut out)
        .unwrap();
    write_sweep(
        &mut out,
        &noise_sweep(&s, &[-90.0, -50.0], 500, seed).unwrap(),
    )
    .unwrap();
    let t = run_tracking(&Scenario::<f64>::scenario1_track(), 100, seed).unwrap();
    write_track(&mut out, &t.runs).unwrap();
    Summary::new(&s, 100, seed, &t.stats)
        .write(&mut out)
        .unwrap();
    out
}

fn c14_determinism() -> Outcome {
    let runs: Vec<Vec<u8>> = [1, 4, 1, 3]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| outputs(42))
        })
        .collect();
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    let other = outputs(43) != runs[0];
    outcome(
        identical && other,
        format!(
            "{} bytes identical across 1/4/1/3 threads: {identical}; different seed differs: {other}",
            runs[0].len()
        ),
    )
}

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario<f64> {
    let direction_levels = rng.random_range(2..=12);
    let mut s = Scenario::<f64>::scenario1();
    s.name = "random".into();
    s.elements = 1 << direction_levels;
    s.direction_levels = direction_levels;
    s.entry_level = rng.random_range(1..=direction_levels);
    s.focus_levels = rng.random_range(1..=8);
    s.alpha = rng.random_range(0.25..=0.5);
    s.max_distance = rng.random_range(1.0..20.0);
    s.min_distance = 0.1;
    s.max_angle = rng.random_range(5f64..60.0).to_radians();
    s.codebook = if rng.random_bool(0.5) {
        CodebookChoice::Bfr
    } else {
        CodebookChoice::Rbfr
    };
    s.freeze_level = rng.random_range(1..=direction_levels);
    s.noise = if rng.random_bool(0.5) {
        NoiseModel::None
    } else {
        NoiseModel::Awgn {
            power: units::dbm_to_watts(rng.random_range(-120.0..0.0)),
        }
    };
    s
}

fn check_codebooks(s: &Scenario<f64>) -> Result<(), String> {
    let dir = s.direction_codebook().map_err(|e| e.to_string())?;
    for l in 1..=dir.depth() {
        let level = dir.level(l);
        let half = 2f64.powi(-(l as i32));
        // cells tile [-1, 1]
        if (level[0].u_center - half + 1.0).abs() > 1e-12
            || (level[level.len() - 1].u_center + half - 1.0).abs() > 1e-12
            || level
                .windows(2)
                .any(|w| (w[1].u_center - w[0].u_center - 2.0 * half).abs() > 1e-12)
        {
            return Err(format!("direction level {l} does not tile sine space"));
        }
        if l < dir.depth() {
            for cw in level {
                let (a, b) = children(cw.index);
                for c in [dir.codeword(l + 1, a), dir.codeword(l + 1, b)] {
                    let h = c.half_cell();
                    if c.u_center - h < cw.u_center - half - 1e-12
                        || c.u_center + h > cw.u_center + half + 1e-12
                    {
                        return Err(format!(
                            "direction child of ({l}, {}) leaves its cell",
                            cw.index
                        ));
                    }
                }
            }
        }
    }
    let focus = s.focus_codebook().map_err(|e| e.to_string())?;
    let eps = 1e-9 * s.max_distance;
    for l in 1..=focus.depth() {
        let level = focus.level(l);
        let lo = level[0].focal_distance - level[0].major_radius;
        let hi = level[level.len() - 1].focal_distance + level[level.len() - 1].major_radius;
        if lo > eps || hi < s.max_distance - eps {
            return Err(format!("focus level {l} covers [{lo}, {hi}] only"));
        }
        for w in level.windows(2) {
            if w[0].focal_distance + w[0].major_radius
                < w[1].focal_distance - w[1].major_radius - eps
            {
                return Err(format!("gap between focal areas at level {l}"));
            }
        }
        for w in level.windows(3) {
            if w[0].focal_distance + w[0].major_radius
                > w[2].focal_distance - w[2].major_radius + eps
            {
                return Err(format!("three focal areas overlap at level {l}"));
            }
        }
    }
    Ok(())
}

fn check_descent(loc: &Localizer<f64>, trace: &SearchTrace<f64>) -> Result<(), String> {
    let dir = loc.direction_codebook();
    let focus = loc.focus_codebook();
    for w in trace.steps.windows(2) {
        let (parent, child) = (&w[0], &w[1]);
        if parent.phase != child.phase {
            continue;
        }
        let (a, b) = children(parent.chosen);
        if child.level != parent.level + 1 || child.candidates != vec![a, b] {
            return Err(format!(
                "step at level {} does not refine its parent",
                child.level
            ));
        }
        let nested = match child.phase {
            Phase::Direction => {
                let p = dir.codeword(parent.level, parent.chosen);
                let c = dir.codeword(child.level, child.chosen);
                c.u_center - c.half_cell() >= p.u_center - p.half_cell() - 1e-12
                    && c.u_center + c.half_cell() <= p.u_center + p.half_cell() + 1e-12
            }
            Phase::Ranging => {
                let cell = |l: usize| loc.area().max_distance * 2f64.powi(-(l as i32) - 1);
                let p = focus.codeword(parent.level, parent.chosen).focal_distance;
                let c = focus.codeword(child.level, child.chosen).focal_distance;
                let eps = 1e-9 * focus.max_distance();
                c - cell(child.level) >= p - cell(parent.level) - eps
                    && c + cell(child.level) <= p + cell(parent.level) + eps
            }
        };
        if !nested {
            return Err(format!(
                "winner at level {} leaves its parent's cell",
                child.level
            ));
        }
    }
    Ok(())
}

fn c15_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let configs = 300;
    for i in 0..configs {
        let s = random_scenario(&mut rng);
        if let Err(e) = check_codebooks(&s) {
            return outcome(false, format!("config {i}: {e}"));
        }
        let loc = s.localizer().unwrap();
        let area: AreaOfInterest<f64> = s.area().unwrap();
        for _ in 0..20 {
            let rx = sample_rx(&mut rng, &area);
            for mode in [
                SearchMode::Measured,
                SearchMode::Ideal,
                SearchMode::PerfectPhase1,
            ] {
                let (_, trace) = loc.localize(&rx, mode, &mut rng).unwrap();
                if let Err(e) = check_descent(&loc, &trace) {
                    return outcome(false, format!("config {i}, {mode:?}: {e}"));
                }
            }
        }
    }
    outcome(
        true,
        format!("{configs} random configurations × 20 receivers × 3 modes"),
    )
}

fn main() {
    // `cargo test -- --list` and filters are not supported; everything runs.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let secs = |s| Some(Duration::from_secs(s));
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (
            1,
            "focus inversion roundtrip",
            timed(secs(1), c1_inverse_roundtrip),
        ),
        (
            2,
            "half-power ellipse",
            timed(secs(1), c2_half_power_ellipse),
        ),
        (
            3,
            "beamwidth and Rayleigh length",
            timed(None, c3_beamwidth_and_rayleigh),
        ),
        (4, "focus codebook radii", timed(None, c4_table_of_radii)),
        (5, "pilot counts", timed(None, c5_pilot_counts)),
        (
            6,
            "ranging vs exhaustive oracle",
            timed(secs(30), c6_ranging_oracle),
        ),
        (
            7,
            "direction vs exhaustive oracle",
            timed(None, c7_direction_oracle),
        ),
        (8, "scenario 1 ideal mode", timed(secs(120), c8_ideal_mode)),
    ];
    let measured = Measured {
        s1: run_campaign(&Scenario::scenario1(), 10_000, SEED).unwrap(),
        s2: run_campaign(&Scenario::scenario2(), 10_000, SEED).unwrap(),
    };
    results.push((
        9,
        "scenario 1 measured",
        timed(None, || c9_scenario1_measured(&measured)),
    ));
    results.push((
        10,
        "scenario 2 measured",
        timed(None, || c10_scenario2_measured(&measured)),
    ));
    results.push((11, "noise sweep shape", timed(secs(600), c11_noise_sweep)));
    results.push((
        12,
        "perfect phase 1 vs measured",
        timed(None, || c12_perfect_phase1(&measured)),
    ));
    results.push((13, "tracking", timed(secs(300), c13_tracking)));
    results.push((14, "determinism", timed(None, c14_determinism)));
    results.push((
        15,
        "codebook and descent invariants",
        timed(None, c15_invariants),
    ));

    let mut failed = 0;
    for (id, name, o) in &results {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag}: {name}: {}", o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
