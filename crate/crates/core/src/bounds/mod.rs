//! Comparison functions, empirical constant fitting and the inequality
//! suites built on the certified brackets of [`crate::extremal`].
//!
//! Every left-hand side is assembled from one-sided bounds in the direction
//! that can only make an inequality look worse (upper bounds where the
//! quantity is bounded above, lower bounds where it is subtracted), so a
//! fitted constant over-estimates the true one and never fakes compliance.

mod suites;

use std::io::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::domains::{rng_from_seed, DomainGeometry};
use crate::error::{Error, Result};
use crate::point::{Point, C64};

pub use suites::{check_localization, check_theorem_global, classical_report, verify_classical, LocalizationSetup};

/// Below this the series branch of [`h_eval`] is used.
const H_SERIES_SWITCH: f64 = 1e-4;

/// `h(x) = x(1+x)/log(1+x)` for `x > 0`. Increasing, with `h(0⁺) = 1`.
pub fn h_eval(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Input(format!("h is defined for finite x > 0, got {x}")));
    }
    Ok(if x < H_SERIES_SWITCH {
        // x/log(1+x) = 1 + x/2 − x²/12 + x³/24 − 19x⁴/720 + …
        let q = 1.0 + x * (0.5 + x * (-1.0 / 12.0 + x * (1.0 / 24.0 - x * 19.0 / 720.0)));
        (1.0 + x) * q
    } else {
        x * (1.0 + x) / x.ln_1p()
    })
}

/// Value of `f_D`. `degenerate` marks `z = w`, where `h(0⁺) = 1` is used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FValue {
    pub value: f64,
    pub degenerate: bool,
}

/// `f_D(z,w) = δ(z)δ(w)·h(|z−w| / (δ(z)δ(w))^{1/2})`.
pub fn f_bound(d: &DomainGeometry, z: &Point, w: &Point) -> Result<FValue> {
    let (dz, dw) = (d.boundary_distance(z)?, d.boundary_distance(w)?);
    let dist = z.dist(w);
    let root = (dz * dw).sqrt();
    if dist == 0.0 {
        return Ok(FValue {
            value: dz * dw,
            degenerate: true,
        });
    }
    Ok(FValue {
        value: dz * dw * h_eval(dist / root)?,
        degenerate: false,
    })
}

/// `g_D(z,w) = |z−w|(|z−w| + (δ(z)δ(w))^{1/2})`.
pub fn g_bound(d: &DomainGeometry, z: &Point, w: &Point) -> Result<f64> {
    let (dz, dw) = (d.boundary_distance(z)?, d.boundary_distance(w)?);
    let dist = z.dist(w);
    Ok(dist * (dist + (dz * dw).sqrt()))
}

/// How a row's left-hand side is compared with its shape value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    /// `lhs ≤ 1 + C·shape`.
    Ratio,
    /// `lhs ≤ C·shape`.
    Difference,
    /// `lhs ≤ shape`, no constant.
    Exact,
}

impl FitForm {
    /// Constant this row needs, `None` if no finite constant works.
    pub fn required(self, lhs: f64, shape: f64) -> Option<f64> {
        let excess = match self {
            FitForm::Ratio => lhs - 1.0,
            FitForm::Difference => lhs,
            FitForm::Exact => return Some(0.0),
        };
        if excess <= 0.0 {
            Some(0.0)
        } else if shape > 0.0 {
            Some(excess / shape)
        } else {
            None
        }
    }

    pub fn rhs(self, c: f64, shape: f64) -> f64 {
        match self {
            FitForm::Ratio => 1.0 + c * shape,
            FitForm::Difference => c * shape,
            FitForm::Exact => shape,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub lhs: f64,
    pub shape: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    /// Sup of the per-row required constants (0 for an empty fit).
    pub constant: f64,
    /// `C(full)/C(random half)`; 1 when both vanish, ∞ when only the half does.
    pub stability: f64,
    /// Rows with positive excess and non-positive shape.
    pub unboundable: usize,
}

fn sup_constant(form: FitForm, rows: &[FitRow]) -> (f64, usize) {
    let mut c = 0.0f64;
    let mut bad = 0;
    for r in rows {
        match form.required(r.lhs, r.shape) {
            Some(x) => c = c.max(x),
            None => bad += 1,
        }
    }
    (c, bad)
}

/// Sup-fitted constant and its half-sample stability ratio; the half is a
/// seeded random subset of `⌈n/2⌉` rows.
pub fn fit_constant(rows: &[FitRow], form: FitForm, seed: u64) -> Result<Fit> {
    if rows.is_empty() {
        return Err(Error::Input("cannot fit a constant to zero rows".into()));
    }
    let (full, unboundable) = sup_constant(form, rows);
    let mut idx: Vec<usize> = (0..rows.len()).collect();
    idx.shuffle(&mut rng_from_seed(seed));
    let half: Vec<FitRow> = idx[..rows.len().div_ceil(2)].iter().map(|&i| rows[i]).collect();
    let (half_c, _) = sup_constant(form, &half);
    let stability = if full == 0.0 {
        1.0
    } else if half_c == 0.0 {
        f64::INFINITY
    } else {
        full / half_c
    };
    Ok(Fit {
        constant: full,
        stability,
        unboundable,
    })
}

/// Identifies the inequality a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// `l/c ≤ 1 + C f_D`.
    Zero,
    /// `l − c ≤ C g_D`.
    LipGlobal,
    /// `κ/γ ≤ 1 + C δ²|X|`, evaluated verbatim.
    MetricGlobal,
    /// `κ − γ ≤ C δ|X|`.
    MetricGlobalWeak,
    /// `k_{D∩U}/c_D ≤ 1 + C f_D`.
    Quo,
    /// `k_{D∩U} − c_D ≤ C g_D`.
    Lip,
    /// `κ_{D∩U}/γ_D ≤ 1 + C δ²`.
    Met,
    /// `k_{D∩U} − k_D ≤ C |z−w|^{1/2}`.
    LipWeak,
    /// `κ_{D∩U}/κ_D ≤ 1 + C δ`.
    MetWeak,
    /// `l − c ≤ C |z−w|^{1/2}`.
    Root,
    /// `κ − γ ≤ C|X|`.
    Rt,
    /// `k ≤ log(1 + C|z−w|/(δ(z)δ(w))^{1/2})`, fitted as `e^k − 1 ≤ C·x`.
    Dini,
    /// `½|log(δ(z)/δ(w))| ≤ k`.
    Low,
    /// `k ≥ ½log 1/δ(z) + ½log 1/δ(w) − C`.
    Vis,
    /// `l ≤ ½log 1/δ(z) + ½log 1/δ(w) + C`.
    RemarkB,
}

impl InequalityId {
    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Zero => "zero",
            InequalityId::LipGlobal => "lip_global",
            InequalityId::MetricGlobal => "metric_global",
            InequalityId::MetricGlobalWeak => "metric_global_weak",
            InequalityId::Quo => "quo",
            InequalityId::Lip => "lip",
            InequalityId::Met => "met",
            InequalityId::LipWeak => "lip_weak",
            InequalityId::MetWeak => "met_weak",
            InequalityId::Root => "root",
            InequalityId::Rt => "rt",
            InequalityId::Dini => "dini",
            InequalityId::Low => "low",
            InequalityId::Vis => "vis",
            InequalityId::RemarkB => "remark_b",
        }
    }

    pub fn form(self) -> FitForm {
        match self {
            InequalityId::Zero
            | InequalityId::MetricGlobal
            | InequalityId::Quo
            | InequalityId::Met
            | InequalityId::MetWeak => FitForm::Ratio,
            InequalityId::Low => FitForm::Exact,
            _ => FitForm::Difference,
        }
    }
}

/// One evaluated pair (or tangent vector when `direction` is set).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub z: Point,
    pub w: Option<Point>,
    pub direction: Option<Vec<C64>>,
    pub delta_z: f64,
    pub delta_w: Option<f64>,
    pub lhs: f64,
    pub shape: f64,
    /// Constant this row needs; `None` when unboundable.
    pub required: Option<f64>,
    /// `rhs(C) − lhs` at the fitted constant.
    pub margin: f64,
    /// Shape of a competing bound, when the report compares two.
    pub alt_shape: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub inequality: InequalityId,
    pub form: FitForm,
    pub rows: Vec<ReportRow>,
    pub constant: f64,
    pub stability: f64,
    pub unboundable: usize,
    /// Rows whose brackets failed.
    pub dropped: usize,
    /// Lower sharpness: min of `lhs/shape` over the rows it applies to.
    pub sharpness: Option<f64>,
}

/// Summary written as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub inequality: String,
    #[serde(rename = "C")]
    pub constant: f64,
    pub stability: f64,
    pub rows: usize,
    pub dropped: usize,
    pub unboundable: usize,
    pub min_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<f64>,
}

/// Pre-fit row: everything but `required` and `margin`.
#[derive(Debug, Clone)]
pub(crate) struct RawRow {
    pub z: Point,
    pub w: Option<Point>,
    pub direction: Option<Vec<C64>>,
    pub delta_z: f64,
    pub delta_w: Option<f64>,
    pub lhs: f64,
    pub shape: f64,
    pub alt_shape: Option<f64>,
}

impl ComparisonReport {
    /// Fits the constant over `raw` and fills in per-row margins.
    pub(crate) fn build(id: InequalityId, raw: Vec<RawRow>, dropped: usize, seed: u64) -> Result<Self> {
        let form = id.form();
        let fit_rows: Vec<FitRow> = raw
            .iter()
            .map(|r| FitRow {
                lhs: r.lhs,
                shape: r.shape,
            })
            .collect();
        let fit = if fit_rows.is_empty() {
            Fit {
                constant: 0.0,
                stability: 1.0,
                unboundable: 0,
            }
        } else {
            fit_constant(&fit_rows, form, seed)?
        };
        let rows = raw
            .into_iter()
            .map(|r| ReportRow {
                required: form.required(r.lhs, r.shape),
                margin: form.rhs(fit.constant, r.shape) - r.lhs,
                z: r.z,
                w: r.w,
                direction: r.direction,
                delta_z: r.delta_z,
                delta_w: r.delta_w,
                lhs: r.lhs,
                shape: r.shape,
                alt_shape: r.alt_shape,
            })
            .collect();
        Ok(ComparisonReport {
            inequality: id,
            form,
            rows,
            constant: fit.constant,
            stability: fit.stability,
            unboundable: fit.unboundable,
            dropped,
            sharpness: None,
        })
    }

    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }

    /// Constant fitted against `alt_shape` instead, over rows that have one.
    pub fn alt_constant(&self) -> Option<f64> {
        let rows: Vec<FitRow> = self
            .rows
            .iter()
            .filter_map(|r| r.alt_shape.map(|s| FitRow { lhs: r.lhs, shape: s }))
            .collect();
        (!rows.is_empty()).then(|| sup_constant(self.form, &rows).0)
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            inequality: self.inequality.name().to_string(),
            constant: self.constant,
            stability: self.stability,
            rows: self.rows.len(),
            dropped: self.dropped,
            unboundable: self.unboundable,
            min_margin: if self.rows.is_empty() { 0.0 } else { self.min_margin() },
            sharpness: self.sharpness,
        }
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.summary())?)
    }

    /// One CSV row per pair. Complex vectors are written as
    /// `re+imi` entries separated by `;`, floats in shortest round-trip form,
    /// so output is byte-identical across runs.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "inequality",
            "z",
            "w",
            "direction",
            "delta_z",
            "delta_w",
            "lhs",
            "shape",
            "required_c",
            "margin",
        ])?;
        for r in &self.rows {
            w.write_record([
                self.inequality.name().to_string(),
                format_vector(&r.z.0),
                r.w.as_ref().map_or(String::new(), |p| format_vector(&p.0)),
                r.direction.as_deref().map_or(String::new(), format_vector),
                r.delta_z.to_string(),
                r.delta_w.map_or(String::new(), |x| x.to_string()),
                r.lhs.to_string(),
                r.shape.to_string(),
                r.required.map_or("unboundable".to_string(), |x| x.to_string()),
                r.margin.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

pub(crate) fn format_vector(v: &[C64]) -> String {
    v.iter()
        .map(|c| format!("{}{:+}i", c.re, c.im))
        .collect::<Vec<_>>()
        .join(";")
}
