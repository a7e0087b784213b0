//! Parallel evaluation of a sweep with deterministic assembly.

use std::cmp::Ordering;
use std::fmt;

use pwshift_core::{phase_shift, phase_shifts, AmplitudeMode, Method, PhaseShiftRecord, Wave};
use rayon::prelude::*;

use crate::config::SweepConfig;

/// A record that could not be computed.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepFailure {
    pub method: Method,
    pub mode: AmplitudeMode,
    pub wave: Wave,
    pub k: f64,
    pub alpha: f64,
    pub error: String,
}

impl fmt::Display for SweepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "method={} mode={} wave={} k={:e} alpha={:e}: {}",
            self.method, self.mode, self.wave, self.k, self.alpha, self.error
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    pub records: Vec<PhaseShiftRecord>,
    pub failures: Vec<SweepFailure>,
}

impl SweepResult {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Copy)]
struct Point {
    method: Method,
    mode: AmplitudeMode,
    alpha: f64,
    k: f64,
}

fn order(
    a: (Method, &AmplitudeMode, Wave, f64, f64),
    b: (Method, &AmplitudeMode, Wave, f64, f64),
) -> Ordering {
    a.0.cmp(&b.0)
        .then_with(|| a.1.to_string().cmp(&b.1.to_string()))
        .then_with(|| a.2.cmp(&b.2))
        .then_with(|| a.3.total_cmp(&b.3))
        .then_with(|| a.4.total_cmp(&b.4))
}

/// Evaluate every (method, mode, wave, alpha, k) combination.
///
/// Points run on a pool of `config.jobs` threads (0 = one per core). Each
/// point is computed independently, so the assembled, sorted output does
/// not depend on scheduling. `k` and `alpha` in the records are in
/// `config.unit`; the engine sees them divided by `config.mass`.
pub fn run_sweep(config: &SweepConfig) -> SweepResult {
    let ks = config.k_grid.points();
    let mut points = Vec::new();
    for &method in &config.methods {
        for &mode in &config.modes {
            for &alpha in &config.alpha_list {
                for &k in &ks {
                    points.push(Point {
                        method,
                        mode,
                        alpha,
                        k,
                    });
                }
            }
        }
    }

    let eval = || -> Vec<(Vec<PhaseShiftRecord>, Vec<SweepFailure>)> {
        points.par_iter().map(|p| evaluate(config, p)).collect()
    };
    let chunks = match rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
    {
        Ok(pool) => pool.install(eval),
        Err(_) => eval(),
    };

    let mut out = SweepResult::default();
    for (recs, fails) in chunks {
        out.records.extend(recs);
        out.failures.extend(fails);
    }
    out.records.sort_by(|a, b| {
        order(
            (a.method, &a.mode, a.wave, a.alpha, a.k),
            (b.method, &b.mode, b.wave, b.alpha, b.k),
        )
    });
    out.failures.sort_by(|a, b| {
        order(
            (a.method, &a.mode, a.wave, a.alpha, a.k),
            (b.method, &b.mode, b.wave, b.alpha, b.k),
        )
    });
    out
}

fn evaluate(config: &SweepConfig, p: &Point) -> (Vec<PhaseShiftRecord>, Vec<SweepFailure>) {
    let k = p.k / config.mass;
    let alpha = p.alpha / config.mass;
    let relabel = |mut r: PhaseShiftRecord| {
        r.k = p.k;
        r.alpha = p.alpha;
        r
    };
    match phase_shifts(
        p.method,
        &p.mode,
        &config.waves,
        1.0,
        k,
        alpha,
        config.quad_order,
    ) {
        Ok(recs) => (recs.into_iter().map(relabel).collect(), Vec::new()),
        Err(_) => {
            // retry wave by wave so one bad wave does not take the others down
            let mut recs = Vec::new();
            let mut fails = Vec::new();
            for &wave in &config.waves {
                match phase_shift(p.method, &p.mode, wave, 1.0, k, alpha, config.quad_order) {
                    Ok(r) => recs.push(relabel(r)),
                    Err(e) => fails.push(SweepFailure {
                        method: p.method,
                        mode: p.mode,
                        wave,
                        k: p.k,
                        alpha: p.alpha,
                        error: e.to_string(),
                    }),
                }
            }
            (recs, fails)
        }
    }
}
