//! Regime classification and the closed-form asymptotic shifts.
//!
//! Every formula is written in the units `omega0 = c = 1` (so `z -> zeta`,
//! `beta -> theta`) as a bracket `B` multiplying `hbar omega0^4 alpha0 / (4 pi eps0 c^3)`;
//! in reduced units the value is `(32/3) B`. Shorthands for the weights
//! `w_j = alpha_j / alpha0`:
//!
//! ```text
//! S1 = wx + wy + 2wz     S2 = 2wx + 2wy - wz     P = wx + wy
//! D  = wx + wy - wz      E  = wx + wy - 2wz
//! tau = 32 pi^5 zeta^2 S2 / (315 theta^6)
//! ```

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::KernelConfig;
use crate::model::{AtomSpec, ReducedPoint, StateLabel};
use crate::shifts;

pub const DEFAULT_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TemperatureLimit {
    Low,
    High,
    Crossover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceRegime {
    Short,
    Intermediate,
    Long,
    Crossover,
}

impl TemperatureLimit {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemperatureLimit::Low => "low",
            TemperatureLimit::High => "high",
            TemperatureLimit::Crossover => "crossover",
        }
    }
}

impl DistanceRegime {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceRegime::Short => "short",
            DistanceRegime::Intermediate => "intermediate",
            DistanceRegime::Long => "long",
            DistanceRegime::Crossover => "crossover",
        }
    }
}

/// The ratios the classification looked at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Margins {
    pub theta: f64,
    pub zeta: f64,
    pub zeta_over_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeTag {
    pub temperature: TemperatureLimit,
    pub distance: DistanceRegime,
    pub margins: Margins,
    pub threshold: f64,
}

impl RegimeTag {
    pub fn is_crossover(&self) -> bool {
        self.temperature == TemperatureLimit::Crossover || self.distance == DistanceRegime::Crossover
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.temperature.as_str(), self.distance.as_str())
    }
}

/// Tag a point. `threshold` is how far a ratio must be from 1 to count as
/// much larger or smaller.
pub fn classify(point: ReducedPoint, threshold: f64) -> Result<RegimeTag> {
    if !(threshold.is_finite() && threshold > 1.0) {
        return Err(Error::invalid(format!("threshold must exceed 1, got {threshold}")));
    }
    let (z, t) = (point.zeta, point.theta);
    let zt = z / t;
    let big = |x: f64| x > threshold;
    let small = |x: f64| x < 1.0 / threshold;

    let temperature = if big(t) {
        TemperatureLimit::Low
    } else if small(t) {
        TemperatureLimit::High
    } else {
        TemperatureLimit::Crossover
    };
    let distance = match temperature {
        TemperatureLimit::Low => {
            if small(z) {
                DistanceRegime::Short
            } else if big(z) && small(zt) {
                DistanceRegime::Intermediate
            } else if big(zt) {
                DistanceRegime::Long
            } else {
                DistanceRegime::Crossover
            }
        }
        TemperatureLimit::High => {
            if small(zt) {
                DistanceRegime::Short
            } else if big(zt) && small(z) {
                DistanceRegime::Intermediate
            } else if big(z) {
                DistanceRegime::Long
            } else {
                DistanceRegime::Crossover
            }
        }
        TemperatureLimit::Crossover => {
            if z < t.min(1.0) / threshold {
                DistanceRegime::Short
            } else if z > t.max(1.0) * threshold {
                DistanceRegime::Long
            } else {
                DistanceRegime::Crossover
            }
        }
    };
    Ok(RegimeTag {
        temperature,
        distance,
        margins: Margins { theta: t, zeta: z, zeta_over_theta: zt },
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Tf,
    Rr,
    Total,
}

impl Part {
    pub fn as_str(&self) -> &'static str {
        match self {
            Part::Tf => "tf",
            Part::Rr => "rr",
            Part::Total => "total",
        }
    }
}

/// One evaluable formula: catalog entry plus which state and which part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct FormulaKey {
    pub id: u8,
    pub state: StateLabel,
    pub part: Part,
}

impl FormulaKey {
    pub fn new(id: u8, state: StateLabel, part: Part) -> Self {
        Self { id, state, part }
    }
}

impl fmt::Display for FormulaKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{} {} {}", self.id, self.state, self.part.as_str())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CatalogEntry {
    pub id: u8,
    pub description: &'static str,
    pub temperature: TemperatureLimit,
    /// `None` when the formula holds at any distance.
    pub distance: Option<DistanceRegime>,
    pub isotropic_only: bool,
    pub forms: &'static [(StateLabel, Part)],
}

use DistanceRegime as Dr;
use Part::{Rr, Tf, Total};
use StateLabel::{Excited as Ex, Ground as Gr, ThermalAverage as Av};
use TemperatureLimit as Tl;

const fn entry(
    id: u8,
    description: &'static str,
    temperature: TemperatureLimit,
    distance: Option<DistanceRegime>,
    isotropic_only: bool,
    forms: &'static [(StateLabel, Part)],
) -> CatalogEntry {
    CatalogEntry { id, description, temperature, distance, isotropic_only, forms }
}

pub static CATALOG: [CatalogEntry; 31] = [
    entry(1, "ground total, cold, near wall", Tl::Low, Some(Dr::Short), false, &[(Gr, Total)]),
    entry(2, "ground total, cold, near wall, van der Waals", Tl::Low, Some(Dr::Short), true, &[(Gr, Total)]),
    entry(3, "ground total, cold, intermediate", Tl::Low, Some(Dr::Intermediate), false, &[(Gr, Total)]),
    entry(4, "ground total, cold, intermediate", Tl::Low, Some(Dr::Intermediate), true, &[(Gr, Total)]),
    entry(5, "ground total, cold, far", Tl::Low, Some(Dr::Long), false, &[(Gr, Total)]),
    entry(6, "ground total, cold, far, Lifshitz", Tl::Low, Some(Dr::Long), true, &[(Gr, Total)]),
    entry(7, "excited total, cold, near wall", Tl::Low, Some(Dr::Short), false, &[(Ex, Total)]),
    entry(8, "excited total, cold, intermediate", Tl::Low, Some(Dr::Intermediate), false, &[(Ex, Total)]),
    entry(9, "excited total, cold, intermediate", Tl::Low, Some(Dr::Intermediate), true, &[(Ex, Total)]),
    entry(10, "excited total, cold, far", Tl::Low, Some(Dr::Long), false, &[(Ex, Total)]),
    entry(11, "excited total, cold, far", Tl::Low, Some(Dr::Long), true, &[(Ex, Total)]),
    entry(12, "tf, hot, kernel form", Tl::High, None, false, &[(Gr, Tf), (Ex, Tf)]),
    entry(13, "tf, hot, near wall", Tl::High, Some(Dr::Short), false, &[(Gr, Tf), (Ex, Tf)]),
    entry(14, "rr, hot, near wall", Tl::High, Some(Dr::Short), false, &[(Gr, Rr), (Ex, Rr)]),
    entry(15, "total, hot, near wall", Tl::High, Some(Dr::Short), true, &[(Gr, Total), (Ex, Total)]),
    entry(16, "ground total, hot, intermediate", Tl::High, Some(Dr::Intermediate), false, &[(Gr, Total)]),
    entry(17, "excited total, hot, intermediate", Tl::High, Some(Dr::Intermediate), false, &[(Ex, Total)]),
    entry(18, "total, hot, intermediate", Tl::High, Some(Dr::Intermediate), true, &[(Gr, Total), (Ex, Total)]),
    entry(19, "tf and rr, hot, far", Tl::High, Some(Dr::Long), false, &[(Gr, Tf), (Ex, Tf), (Gr, Rr), (Ex, Rr)]),
    entry(20, "total, hot, far", Tl::High, Some(Dr::Long), true, &[(Gr, Total), (Ex, Total)]),
    entry(21, "thermal average, exact", Tl::Crossover, None, false, &[(Av, Tf), (Av, Rr), (Av, Total)]),
    entry(22, "thermal average, hot, near wall", Tl::High, Some(Dr::Short), false, &[(Av, Tf), (Av, Rr), (Av, Total)]),
    entry(23, "thermal average total, hot, near wall", Tl::High, Some(Dr::Short), true, &[(Av, Total)]),
    entry(24, "thermal average, hot, intermediate", Tl::High, Some(Dr::Intermediate), false, &[(Av, Tf), (Av, Rr), (Av, Total)]),
    entry(25, "thermal average, hot, far", Tl::High, Some(Dr::Long), false, &[(Av, Tf), (Av, Rr), (Av, Total)]),
    entry(26, "tf, cold, near wall", Tl::Low, Some(Dr::Short), false, &[(Gr, Tf), (Ex, Tf)]),
    entry(27, "rr, cold, near wall", Tl::Low, Some(Dr::Short), false, &[(Gr, Rr), (Ex, Rr)]),
    entry(28, "tf, cold, intermediate", Tl::Low, Some(Dr::Intermediate), false, &[(Gr, Tf), (Ex, Tf)]),
    entry(29, "rr, cold, intermediate", Tl::Low, Some(Dr::Intermediate), false, &[(Gr, Rr), (Ex, Rr)]),
    entry(30, "tf, cold, far", Tl::Low, Some(Dr::Long), false, &[(Gr, Tf), (Ex, Tf)]),
    entry(31, "rr, cold, far", Tl::Low, Some(Dr::Long), false, &[(Gr, Rr), (Ex, Rr)]),
];

pub fn catalog_entry(id: u8) -> Result<&'static CatalogEntry> {
    CATALOG
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::invalid(format!("unknown formula id {id}")))
}

/// Every (id, state, part) the catalog can evaluate.
pub fn all_keys() -> Vec<FormulaKey> {
    CATALOG
        .iter()
        .flat_map(|e| e.forms.iter().map(move |&(s, p)| FormulaKey::new(e.id, s, p)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Approximation {
    pub key: FormulaKey,
    /// Reduced units.
    pub value: f64,
    /// False when the point lies outside the formula's regime.
    pub in_regime: bool,
    pub regime: RegimeTag,
}

struct Shorthand {
    wz: f64,
    s1: f64,
    s2: f64,
    p: f64,
    d: f64,
    e: f64,
}

impl Shorthand {
    fn new(atom: &AtomSpec) -> Self {
        let [wx, wy, wz] = atom.weights();
        Self {
            wz,
            s1: wx + wy + 2.0 * wz,
            s2: 2.0 * wx + 2.0 * wy - wz,
            p: wx + wy,
            d: wx + wy - wz,
            e: wx + wy - 2.0 * wz,
        }
    }
}

const REDUCE: f64 = 32.0 / 3.0;

/// Is the point inside the entry's regime (default threshold)?
pub fn in_regime(entry: &CatalogEntry, tag: &RegimeTag) -> bool {
    if entry.id == 21 {
        return true;
    }
    tag.temperature == entry.temperature && entry.distance.is_none_or(|d| d == tag.distance)
}

/// Evaluate one catalog formula, reduced units.
pub fn asymptotic_shift(key: FormulaKey, atom: &AtomSpec, point: ReducedPoint) -> Result<Approximation> {
    asymptotic_shift_with(key, atom, point, &KernelConfig::default())
}

/// As [`asymptotic_shift`], with the kernel settings used by the
/// kernel-based entries (12 and 21).
pub fn asymptotic_shift_with(
    key: FormulaKey,
    atom: &AtomSpec,
    point: ReducedPoint,
    cfg: &KernelConfig,
) -> Result<Approximation> {
    let entry = catalog_entry(key.id)?;
    if !entry.forms.contains(&(key.state, key.part)) {
        return Err(Error::invalid(format!("formula {key} is not in the catalog")));
    }
    if entry.isotropic_only && !atom.is_isotropic() {
        return Err(Error::invalid(format!("formula #{} assumes an isotropic atom", key.id)));
    }
    let regime = classify(point, DEFAULT_THRESHOLD)?;
    let value = evaluate(key, atom, point, cfg)?;
    Ok(Approximation {
        key,
        value,
        in_regime: in_regime(entry, &regime),
        regime,
    })
}

fn evaluate(key: FormulaKey, atom: &AtomSpec, point: ReducedPoint, cfg: &KernelConfig) -> Result<f64> {
    let w = Shorthand::new(atom);
    let z = point.zeta;
    let t = point.theta;
    // 1/theta vanishes at zero temperature
    let it = 1.0 / t;
    let z2 = z * z;
    let z3 = z2 * z;
    let z4 = z2 * z2;
    let (s, c) = (2.0 * z).sin_cos();
    let tau = 32.0 * PI.powi(5) * z2 * w.s2 * it.powi(6) / 315.0;
    let tau_iso = 32.0 * PI.powi(5) * z2 * it.powi(6) / 315.0;
    // shared oscillatory pieces
    let osc_half = (3.0 * w.p / (8.0 * z) - 3.0 * w.s1 / (32.0 * z3)) * c - 3.0 * w.s1 / (16.0 * z2) * s;
    let osc_full = 2.0 * osc_half;
    let sign = |state: StateLabel| if state == Ex { -1.0 } else { 1.0 };

    let bracket = match (key.id, key.part) {
        (1, _) => -(3.0 * w.s1 / (32.0 * z3) - 3.0 * w.wz / (4.0 * PI * z2) - w.p * z.ln() + tau),
        (2, _) => -(1.0 / (8.0 * z3) + tau_iso),
        (3, _) | (4, _) => -(3.0 / (8.0 * PI * z4) + tau),
        (5, _) => -(3.0 * w.s1 / (16.0 * z3) * it),
        (6, _) => -(it / (4.0 * z3)),
        (7, _) => -(3.0 * w.s1 / (32.0 * z3) - tau),
        (8, _) | (9, _) => osc_full + 3.0 / (8.0 * PI * z4) + tau,
        (10, _) | (11, _) => osc_full + 3.0 * w.s1 / (16.0 * z3) * it,
        (12, _) => {
            let ks = shifts::weighted_kernels(atom, point, cfg, shifts::Derivative::No, true)?;
            let ground: f64 = ks
                .iter()
                .map(|k| -k.weight * (2.0 * it * k.f - k.g.map_or(0.0, |g| g.value)))
                .sum();
            return Ok(sign(key.state) * ground);
        }
        (13, _) => sign(key.state) * 3.0 * w.s1 * it / (16.0 * z3),
        (14, _) | (22, Rr) | (24, Rr) | (27, _) => -3.0 * w.s1 / (32.0 * z3),
        (15, _) => sign(key.state) * it / (4.0 * z3),
        (16, _) => -(3.0 * w.e * it / (8.0 * z) - 9.0 * z * it / 8.0 * (w.p - 2.0 * w.wz / 3.0)
            + 3.0 * w.s1 / (32.0 * z3)),
        (17, _) => 3.0 * w.e * it / (8.0 * z) - 9.0 * z * it / 8.0 * (w.p - 2.0 * w.wz / 3.0)
            - 3.0 * w.s1 / (32.0 * z3),
        (18, _) => match key.state {
            Gr => z * it / 2.0 - 1.0 / (8.0 * z3),
            _ => -(z * it / 2.0 + 1.0 / (8.0 * z3)),
        },
        (19, Tf) => {
            let ground = -((3.0 * w.p * it / (4.0 * z) - 3.0 * w.s1 * it / (16.0 * z3)) * c
                - 3.0 * w.s1 * it / (8.0 * z2) * s
                + 3.0 * w.s1 * it / (16.0 * z3));
            sign(key.state) * ground
        }
        (19, _) | (29, _) | (31, _) => osc_half,
        (20, _) => {
            let ground = -((it / (2.0 * z) - it / (4.0 * z3)) * c - it / (2.0 * z2) * s + it / (4.0 * z3));
            sign(key.state) * ground
        }
        (21, part) => {
            let b = shifts::shift_total(Av, atom, point, cfg)?;
            return Ok(match part {
                Tf => b.tf,
                Rr => b.rr,
                Total => b.total,
            });
        }
        (22, Tf) => (3.0 / (32.0 * z3) - 3.0 * t / (64.0 * z3)) * w.s1,
        (22, _) => -3.0 * t * w.s1 / (64.0 * z3),
        (23, _) => -t / (16.0 * z3),
        (24, Tf) => -(3.0 * w.e / (16.0 * z) + 3.0 * w.wz / (4.0 * PI * z2) - t * t * w.s1 / (128.0 * z3)),
        (24, _) | (25, Total) => -(3.0 / (32.0 * z3) - t * t / (128.0 * z3)) * w.s1,
        (25, Tf) => -(osc_half + (3.0 / (32.0 * z3) - t * t / (128.0 * z3)) * w.s1),
        (25, _) => osc_half,
        (26, _) => {
            let ground = -(-3.0 * w.wz / (4.0 * PI * z2) - w.d * z.ln()
                - (2.0 * PI.powi(3) * it.powi(4) / 15.0 + 16.0 * PI.powi(5) * it.powi(6) / 63.0) * w.d
                + tau);
            sign(key.state) * ground
        }
        (28, _) => sign(key.state) * -(osc_half + 3.0 / (8.0 * PI * z4) + tau),
        (30, _) => sign(key.state) * -(osc_half + 3.0 * w.s1 / (16.0 * z3) * it),
        _ => unreachable!("catalog forms are checked above"),
    };
    Ok(REDUCE * bracket)
}

/// One grid point of a [`validate_regime`] run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeSample {
    pub point: ReducedPoint,
    pub exact: f64,
    pub approximate: f64,
    pub relative_deviation: f64,
    pub in_regime: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub key: FormulaKey,
    pub tolerance: f64,
    pub max_relative_deviation: f64,
    pub samples: Vec<RegimeSample>,
    pub pass: bool,
}

/// The exact counterpart of a catalog formula.
pub fn exact_shift(key: FormulaKey, atom: &AtomSpec, point: ReducedPoint, cfg: &KernelConfig) -> Result<f64> {
    let b = shifts::shift_total(key.state, atom, point, cfg)?;
    Ok(match key.part {
        Tf => b.tf,
        Rr => b.rr,
        Total => b.total,
    })
}

/// Compare a formula with the exact engine over a grid.
pub fn validate_regime(
    key: FormulaKey,
    atom: &AtomSpec,
    grid: &[ReducedPoint],
    tol: f64,
    cfg: &KernelConfig,
) -> Result<RegimeReport> {
    let mut samples = Vec::with_capacity(grid.len());
    for &p in grid {
        let approx = asymptotic_shift_with(key, atom, p, cfg)?;
        let exact = exact_shift(key, atom, p, cfg)?;
        samples.push(RegimeSample {
            point: p,
            exact,
            approximate: approx.value,
            relative_deviation: ((approx.value - exact) / exact).abs(),
            in_regime: approx.in_regime,
        });
    }
    let max_relative_deviation = samples.iter().map(|s| s.relative_deviation).fold(0.0, f64::max);
    Ok(RegimeReport {
        key,
        tolerance: tol,
        max_relative_deviation,
        pass: !samples.is_empty() && max_relative_deviation < tol,
        samples,
    })
}
