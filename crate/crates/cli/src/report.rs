//! Sign-pattern summary, low-k fits and parity checks over a finished sweep.
//!
//! A |delta| at or below `delta_resolution` (the rounding floor of its
//! projection) is written as `0` in the sign strings.

use std::fmt::{self, Write as _};

use pwshift_core::kinematics::ELECTRON_MASS_EV;
use pwshift_core::partial_wave::{delta_resolution, PotentialEstimate};
use pwshift_core::{Method, PhaseShiftRecord, Vertex, Wave};
use serde::Serialize;

/// Resolved points used for the low-k linear fit.
pub const FIT_WINDOW: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignPattern {
    /// delta > 0 wherever it is resolved
    Attractive,
    /// delta < 0 wherever it is resolved
    Repulsive,
    Vanishing,
    Mixed,
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SignPattern::Attractive => "attractive",
            SignPattern::Repulsive => "repulsive",
            SignPattern::Vanishing => "vanishing",
            SignPattern::Mixed => "mixed",
        })
    }
}

impl SignPattern {
    /// Zeros are neutral: `00--` is repulsive, `+-` is mixed.
    fn of(signs: &str) -> Self {
        let plus = signs.contains('+');
        let minus = signs.contains('-');
        match (plus, minus) {
            (false, false) => SignPattern::Vanishing,
            (true, false) => SignPattern::Attractive,
            (false, true) => SignPattern::Repulsive,
            (true, true) => SignPattern::Mixed,
        }
    }

    /// Combined pattern of several waves, zeros ignored.
    fn combine(items: impl IntoIterator<Item = SignPattern>) -> Self {
        let mut seen: Option<SignPattern> = None;
        for p in items {
            match (p, seen) {
                (SignPattern::Vanishing, _) => {}
                (SignPattern::Mixed, _) => return SignPattern::Mixed,
                (p, None) => seen = Some(p),
                (p, Some(s)) if p != s => return SignPattern::Mixed,
                _ => {}
            }
        }
        seen.unwrap_or(SignPattern::Vanishing)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitSummary {
    /// d(delta)/dk with k in units of the electron mass.
    pub slope: f64,
    pub intercept: f64,
    pub max_deviation: f64,
    pub v_ev: f64,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignRow {
    pub method: String,
    pub mode: String,
    pub wave: String,
    pub alpha: f64,
    /// One of `+ - 0` per k point, ascending k.
    pub signs: String,
    pub pattern: SignPattern,
    pub fit: Option<FitSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParityCheck {
    pub method: String,
    pub mode: String,
    pub alpha: f64,
    pub even: SignPattern,
    pub odd: SignPattern,
    /// Even waves one sign or zero, odd waves the other sign or zero.
    pub dichotomy: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeviationNote {
    pub reference: String,
    pub method: String,
    pub mode: String,
    pub wave: String,
    pub alpha: f64,
    pub expected: SignPattern,
    pub observed: SignPattern,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignCalibration {
    pub mode: String,
    pub alpha: f64,
    pub s_wave: SignPattern,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FigureReport {
    pub record_count: usize,
    pub k_points: usize,
    pub fit_window: usize,
    pub rows: Vec<SignRow>,
    pub parity: Vec<ParityCheck>,
    /// Method A modes whose parity dichotomy holds at every alpha.
    pub dichotomy_modes: Vec<String>,
    pub deviations: Vec<DeviationNote>,
    pub sign_calibration: Vec<SignCalibration>,
    /// Rows that are attractive across the whole grid.
    pub attractive: Vec<SignRow>,
}

/// Reference sign pattern for a wave: operator sandwich expects attractive
/// even waves and repulsive odd waves, all nonzero; the Dirac-spinor method
/// expects repulsive even waves and vanishing odd waves.
pub fn expected_pattern(method: Method, wave: Wave) -> SignPattern {
    match (method, wave.is_even()) {
        (Method::A, true) => SignPattern::Attractive,
        (Method::A, false) => SignPattern::Repulsive,
        (Method::B, true) => SignPattern::Repulsive,
        (Method::B, false) => SignPattern::Vanishing,
    }
}

fn reference_name(method: Method) -> &'static str {
    match method {
        Method::A => "operator-sandwich reference: S,D attractive, P,F repulsive, all nonzero",
        Method::B => "Dirac-spinor reference: S,D repulsive, P,F vanishing",
    }
}

type Curve = (Method, String, f64);

/// Build the report. `mass` is the electron mass in the unit of the
/// records' `k`, used to express fit slopes per internal unit.
pub fn build_report(records: &[PhaseShiftRecord], mass: f64) -> FigureReport {
    let mut groups: Vec<((Curve, Wave), Vec<&PhaseShiftRecord>)> = Vec::new();
    for r in records {
        let key = ((r.method, r.mode.to_string(), r.alpha), r.wave);
        match groups.iter_mut().find(|(k, _)| {
            k.0 .0 == key.0 .0
                && k.0 .1 == key.0 .1
                && k.0 .2.to_bits() == key.0 .2.to_bits()
                && k.1 == key.1
        }) {
            Some((_, v)) => v.push(r),
            None => groups.push((key, vec![r])),
        }
    }

    let mut rows = Vec::new();
    let mut k_points = 0;
    for (((method, mode, alpha), wave), mut recs) in groups {
        recs.sort_by(|a, b| a.k.total_cmp(&b.k));
        k_points = k_points.max(recs.len());
        let signs: String = recs
            .iter()
            .map(|r| {
                let floor = delta_resolution(1.0, r.k / mass, r.alpha / mass, r.mode.channels)
                    .unwrap_or(0.0);
                if r.delta.abs() <= floor {
                    '0'
                } else if r.delta > 0.0 {
                    '+'
                } else {
                    '-'
                }
            })
            .collect();
        let pattern = SignPattern::of(&signs);
        // lowest resolved points only
        let window: Vec<&&PhaseShiftRecord> = recs
            .iter()
            .zip(signs.chars())
            .filter(|(_, c)| *c != '0')
            .map(|(r, _)| r)
            .take(FIT_WINDOW)
            .collect();
        let fit = (window.len() >= 2)
            .then(|| {
                let ks: Vec<f64> = window.iter().map(|r| r.k / mass).collect();
                let ds: Vec<f64> = window.iter().map(|r| r.delta).collect();
                PotentialEstimate::from_window(&ks, &ds, ELECTRON_MASS_EV).ok()
            })
            .flatten()
            .map(|e| FitSummary {
                slope: e.fit.slope,
                intercept: e.fit.intercept,
                max_deviation: e.fit.max_deviation,
                v_ev: e.v_ev,
                warning: e.warning(),
            });
        rows.push(SignRow {
            method: method.to_string(),
            mode,
            wave: wave.to_string(),
            alpha,
            signs,
            pattern,
            fit,
        });
    }

    let mut parity = Vec::new();
    let mut curves: Vec<(String, String, f64)> = Vec::new();
    for r in &rows {
        if !curves
            .iter()
            .any(|c| c.0 == r.method && c.1 == r.mode && c.2.to_bits() == r.alpha.to_bits())
        {
            curves.push((r.method.clone(), r.mode.clone(), r.alpha));
        }
    }
    for (method, mode, alpha) in curves {
        let patterns = |even: bool| -> Vec<SignPattern> {
            rows.iter()
                .filter(|r| {
                    r.method == method
                        && r.mode == mode
                        && r.alpha.to_bits() == alpha.to_bits()
                        && r.wave.parse::<Wave>().is_ok_and(|w| w.is_even() == even)
                })
                .map(|r| r.pattern)
                .collect()
        };
        let (evens, odds) = (patterns(true), patterns(false));
        if evens.is_empty() || odds.is_empty() {
            continue;
        }
        let even = SignPattern::combine(evens);
        let odd = SignPattern::combine(odds);
        let dichotomy = even != SignPattern::Mixed
            && odd != SignPattern::Mixed
            && !(even == SignPattern::Vanishing && odd == SignPattern::Vanishing)
            && (even != odd);
        parity.push(ParityCheck {
            method: method.clone(),
            mode: mode.clone(),
            alpha,
            even,
            odd,
            dichotomy,
        });
    }

    let mut dichotomy_modes: Vec<String> = Vec::new();
    for p in parity.iter().filter(|p| p.method == "A") {
        if !dichotomy_modes.contains(&p.mode)
            && parity
                .iter()
                .filter(|q| q.method == "A" && q.mode == p.mode)
                .all(|q| q.dichotomy)
        {
            dichotomy_modes.push(p.mode.clone());
        }
    }

    let mut deviations = Vec::new();
    let mut sign_calibration = Vec::new();
    for r in &rows {
        let (Ok(method), Ok(wave)) = (r.method.parse::<Method>(), r.wave.parse::<Wave>()) else {
            continue;
        };
        let expected = expected_pattern(method, wave);
        if r.pattern != expected {
            deviations.push(DeviationNote {
                reference: reference_name(method).to_string(),
                method: r.method.clone(),
                mode: r.mode.clone(),
                wave: r.wave.clone(),
                alpha: r.alpha,
                expected,
                observed: r.pattern,
            });
        }
        let gamma0 = r
            .mode
            .parse::<pwshift_core::AmplitudeMode>()
            .is_ok_and(|m| m.vertex == Vertex::Gamma0Only);
        if method == Method::B && wave == Wave::S && gamma0 {
            sign_calibration.push(SignCalibration {
                mode: r.mode.clone(),
                alpha: r.alpha,
                s_wave: r.pattern,
                pass: r.pattern == SignPattern::Repulsive,
            });
        }
    }

    let attractive = rows
        .iter()
        .filter(|r| r.pattern == SignPattern::Attractive)
        .cloned()
        .collect();

    FigureReport {
        record_count: records.len(),
        k_points,
        fit_window: FIT_WINDOW,
        rows,
        parity,
        dichotomy_modes,
        deviations,
        sign_calibration,
        attractive,
    }
}

impl FigureReport {
    /// Cross-checks between sections. Returns the first inconsistency.
    pub fn check_consistency(&self) -> Result<(), String> {
        let covered: usize = self.rows.iter().map(|r| r.signs.len()).sum();
        if covered != self.record_count {
            return Err(format!(
                "sign rows cover {covered} records, sweep has {}",
                self.record_count
            ));
        }
        for r in &self.rows {
            if SignPattern::of(&r.signs) != r.pattern {
                return Err(format!(
                    "row {} {} {} alpha={}: pattern disagrees with signs",
                    r.method, r.mode, r.wave, r.alpha
                ));
            }
            let method: Method = r.method.parse().map_err(|e| format!("{e}"))?;
            let wave: Wave = r.wave.parse().map_err(|e| format!("{e}"))?;
            let noted = self.deviations.iter().any(|d| {
                d.method == r.method && d.mode == r.mode && d.wave == r.wave && d.alpha == r.alpha
            });
            if noted != (r.pattern != expected_pattern(method, wave)) {
                return Err(format!(
                    "deviation notes out of step with row {} {} {} alpha={}",
                    r.method, r.mode, r.wave, r.alpha
                ));
            }
        }
        for p in &self.parity {
            let even = SignPattern::combine(self.wave_patterns(p, true));
            let odd = SignPattern::combine(self.wave_patterns(p, false));
            if (even, odd) != (p.even, p.odd) {
                return Err(format!(
                    "parity entry {} {} alpha={} disagrees with rows",
                    p.method, p.mode, p.alpha
                ));
            }
        }
        let attractive = self
            .rows
            .iter()
            .filter(|r| r.pattern == SignPattern::Attractive)
            .count();
        if attractive != self.attractive.len() {
            return Err("attractive-channel list disagrees with rows".into());
        }
        Ok(())
    }

    fn wave_patterns<'a>(
        &'a self,
        p: &'a ParityCheck,
        even: bool,
    ) -> impl Iterator<Item = SignPattern> + 'a {
        self.rows
            .iter()
            .filter(move |r| {
                r.method == p.method
                    && r.mode == p.mode
                    && r.alpha == p.alpha
                    && r.wave.parse::<Wave>().is_ok_and(|w| w.is_even() == even)
            })
            .map(|r| r.pattern)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Phase-shift sign report");
        let _ = writeln!(
            s,
            "\n{} records, {} k points. `0` marks |delta| at or below the rounding floor of its projection.",
            self.record_count, self.k_points
        );
        let _ = writeln!(
            s,
            "Fits use the lowest {} resolved k points; V = -(197)^3 slope / (2 M), M = {} eV, slope per electron mass.\n",
            self.fit_window, ELECTRON_MASS_EV
        );
        let _ = writeln!(s, "## Signs\n");
        let _ = writeln!(
            s,
            "| method | mode | wave | alpha | signs (low k -> high k) | pattern | slope | V [eV] |"
        );
        let _ = writeln!(s, "|---|---|---|---|---|---|---|---|");
        for r in &self.rows {
            let (slope, v) = match &r.fit {
                Some(f) => (format!("{:.4e}", f.slope), format!("{:.4e}", f.v_ev)),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | `{}` | {} | {} | {} |",
                r.method, r.mode, r.wave, r.alpha, r.signs, r.pattern, slope, v
            );
        }
        let warnings: Vec<String> = self
            .rows
            .iter()
            .filter_map(|r| {
                r.fit.as_ref()?.warning.as_ref().map(|w| {
                    format!(
                        "- {} {} {} alpha={}: {w}",
                        r.method, r.mode, r.wave, r.alpha
                    )
                })
            })
            .collect();
        if !warnings.is_empty() {
            let _ = writeln!(s, "\nFit warnings:\n");
            for w in warnings {
                let _ = writeln!(s, "{w}");
            }
        }

        let _ = writeln!(s, "\n## Parity\n");
        let _ = writeln!(s, "| method | mode | alpha | even l | odd l | dichotomy |");
        let _ = writeln!(s, "|---|---|---|---|---|---|");
        for p in &self.parity {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} |",
                p.method,
                p.mode,
                p.alpha,
                p.even,
                p.odd,
                if p.dichotomy { "yes" } else { "no" }
            );
        }
        let _ = writeln!(
            s,
            "\nMethod A modes with the dichotomy at every alpha: {}",
            if self.dichotomy_modes.is_empty() {
                "none".to_string()
            } else {
                self.dichotomy_modes.join(", ")
            }
        );

        let _ = writeln!(
            s,
            "\n## Sign calibration (method B, gamma0 vertex, S wave)\n"
        );
        if self.sign_calibration.is_empty() {
            let _ = writeln!(s, "not covered by this sweep");
        }
        for c in &self.sign_calibration {
            let _ = writeln!(
                s,
                "- {} alpha={}: {} ({})",
                c.mode,
                c.alpha,
                c.s_wave,
                if c.pass { "ok" } else { "FAIL" }
            );
        }

        let _ = writeln!(s, "\n## Deviations from the reference sign patterns\n");
        if self.deviations.is_empty() {
            let _ = writeln!(s, "none");
        }
        for d in &self.deviations {
            let _ = writeln!(
                s,
                "- [{}] {} {} {} alpha={}: expected {}, observed {}",
                d.reference, d.method, d.mode, d.wave, d.alpha, d.expected, d.observed
            );
        }

        let _ = writeln!(s, "\n## Attractive channels\n");
        if self.attractive.is_empty() {
            let _ = writeln!(
                s,
                "none in this sweep (restrict the operator terms with --term-mask to isolate one)"
            );
        }
        for r in &self.attractive {
            let v = r
                .fit
                .as_ref()
                .map(|f| format!("slope {:.4e}, V {:.4e} eV", f.slope, f.v_ev))
                .unwrap_or_default();
            let _ = writeln!(
                s,
                "- {} {} {} alpha={}: {v}",
                r.method, r.mode, r.wave, r.alpha
            );
        }
        s
    }
}
