//! Parameter sweeps over `w_p`, `L` or `λ_p`, one table row per grid point.
//!
//! Rows are computed in parallel and collected in sweep order. CSV headers
//! carry units as `name[unit]`; values are written with 17 significant
//! digits so a table reads back bit-identical.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::constants::{C, HBAR};
use crate::entanglement::{
    analytic_widths, entanglement_report, EntanglementOptions, GridSpec, RNumeric, WidthConvention,
};
use crate::error::{Error, Result};
use crate::moments_mass::{
    mass_from_moments, mass_via_schmidt, momentum_deficit, q_minus_sq_report, Method, Regime,
    RegimeThresholds, ValidityFlag,
};
use crate::quadrature::QuadratureSpec;
use crate::spdc_state::{normalization_constant, SpdcConfig, DEFAULT_ANISOTROPY_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "w_p")]
    WaistP,
    #[serde(rename = "L")]
    Length,
    #[serde(rename = "lambda_p")]
    LambdaP,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::WaistP => "w_p",
            SweepParam::Length => "L",
            SweepParam::LambdaP => "lambda_p",
        }
    }

    fn apply(&self, cfg: SpdcConfig, v: f64) -> Result<SpdcConfig> {
        match self {
            SweepParam::WaistP => cfg.with_w_p(v),
            SweepParam::Length => cfg.with_length(v),
            SweepParam::LambdaP => cfg.with_lambda_p(v),
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w_p" | "w_p_m" => Ok(SweepParam::WaistP),
            "L" | "L_m" => Ok(SweepParam::Length),
            "lambda_p" | "lambda_p_m" => Ok(SweepParam::LambdaP),
            other => Err(Error::InvalidAxis(format!(
                "unknown sweep parameter `{other}` (expected w_p, L or lambda_p)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// One sweep axis, written `param=start:end:count[:lin|log]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub end: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepAxis {
    pub fn new(param: SweepParam, start: f64, end: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidAxis("point count must be at least 1".into()));
        }
        if !(start > 0.0 && end > 0.0 && start.is_finite() && end.is_finite()) {
            return Err(Error::InvalidAxis(format!(
                "{} range must be positive and finite, got {start}..{end}",
                param.name()
            )));
        }
        if count == 1 && start != end {
            return Err(Error::InvalidAxis("a single-point axis needs start == end".into()));
        }
        Ok(Self {
            param,
            start,
            end,
            count,
            spacing,
        })
    }

    /// Grid values; endpoints are exact.
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i + 1 == self.count {
                    return self.end;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.start + t * (self.end - self.start),
                    Spacing::Log => (self.start.ln() + t * (self.end.ln() - self.start.ln())).exp(),
                }
            })
            .collect()
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAxis(format!("`{s}`: expected param=start:end:count[:lin|log]"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let count = parts[2].parse::<usize>().map_err(|_| bad())?;
        let spacing = match parts.get(3).copied() {
            None | Some("lin") | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(_) => return Err(bad()),
        };
        Self::new(name.trim().parse()?, num(parts[0])?, num(parts[1])?, count, spacing)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spacing = match self.spacing {
            Spacing::Linear => "lin",
            Spacing::Log => "log",
        };
        write!(f, "{}={:e}:{:e}:{}:{}", self.param.name(), self.start, self.end, self.count, spacing)
    }
}

/// What each row computes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub quadrature: QuadratureSpec,
    pub anisotropy_threshold: f64,
    pub thresholds: RegimeThresholds,
    pub grid: GridSpec,
    pub r_numeric: bool,
    /// Grid-doubling SVD per row; slow, off by default.
    pub svd: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            quadrature: QuadratureSpec::default(),
            anisotropy_threshold: DEFAULT_ANISOTROPY_THRESHOLD,
            thresholds: RegimeThresholds::default(),
            grid: GridSpec::default(),
            r_numeric: true,
            svd: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub lambda_p: f64,
    pub w_p: f64,
    pub length: f64,
    pub n_o: f64,
    pub n_p_prime_abs: f64,
    pub n_norm: f64,
    pub q_plus_sq: f64,
    pub q_minus_sq_log: f64,
    pub q_minus_sq_numeric: f64,
    pub delta_p: f64,
    pub mass_log: f64,
    pub mass_numeric: f64,
    pub a: f64,
    pub b: f64,
    pub r_analytic: f64,
    pub r_numeric: Option<f64>,
    pub k_regime: f64,
    pub k_svd: Option<f64>,
    pub mass_via_k: f64,
    /// ħ/(cw_p), the mass unit of the Schmidt-number form.
    pub mass_unit: f64,
    /// `mass_numeric / (mass_unit·K_regime)`.
    pub mass_over_k: f64,
    pub regime: Regime,
    /// Validity-flag tokens, `;`-separated; empty when none apply.
    pub flags: String,
}

impl SweepRow {
    pub fn config(&self) -> Result<SpdcConfig> {
        SpdcConfig::with_anisotropy(self.lambda_p, self.w_p, self.length, self.n_o, self.n_p_prime_abs)
    }
}

/// Evaluates every quantity of one row.
pub fn compute_row(index: usize, cfg: &SpdcConfig, opts: &SweepOptions) -> Result<SweepRow> {
    let spec = &opts.quadrature;
    let numeric = momentum_deficit(cfg, Method::NumericExact, spec)?;
    let log = momentum_deficit(cfg, Method::AnalyticLog, spec)?;
    let q_minus = q_minus_sq_report(cfg, spec)?;
    let mass_numeric = mass_from_moments(cfg, &numeric, opts.anisotropy_threshold);
    let mass_log = mass_from_moments(cfg, &log, opts.anisotropy_threshold);

    let ent = entanglement_report(
        cfg,
        &EntanglementOptions {
            grid: opts.grid,
            thresholds: opts.thresholds,
            k2_fixed: 0.0,
            convention: WidthConvention::Rms,
            compute_r_numeric: opts.r_numeric,
            compute_svd: opts.svd,
        },
    )?;
    let (a, b) = analytic_widths(cfg);
    let k_regime = ent.k_regime_estimate.value;
    let mass_unit = HBAR / (C * cfg.w_p());

    let mut flags: Vec<&str> = mass_numeric.validity_flags.iter().map(ValidityFlag::token).collect();
    if ent.k_regime_estimate.low_confidence {
        flags.push(ValidityFlag::IntermediateRegime.token());
    }

    Ok(SweepRow {
        index,
        lambda_p: cfg.lambda_p(),
        w_p: cfg.w_p(),
        length: cfg.length(),
        n_o: cfg.n_o(),
        n_p_prime_abs: cfg.n_p_prime_abs(),
        n_norm: normalization_constant(cfg),
        q_plus_sq: numeric.q_plus_sq_mean,
        q_minus_sq_log: q_minus.analytic_log,
        q_minus_sq_numeric: q_minus.numeric_exact,
        delta_p: numeric.delta_p,
        mass_log: mass_log.mass,
        mass_numeric: mass_numeric.mass,
        a,
        b,
        r_analytic: ent.r_analytic,
        r_numeric: ent.r_numeric.map(|r: RNumeric| r.value),
        k_regime,
        k_svd: ent.k_svd.map(|k| k.k),
        mass_via_k: mass_via_schmidt(cfg, k_regime)?.full,
        mass_unit,
        mass_over_k: mass_numeric.mass / (mass_unit * k_regime),
        regime: ent.regime,
        flags: flags.join(";"),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axes: Vec<SweepAxis>,
    pub rows: Vec<SweepRow>,
}

/// Column headers with units, in CSV order.
pub const CSV_HEADERS: [&str; 24] = [
    "index",
    "lambda_p[m]",
    "w_p[m]",
    "L[m]",
    "n_o[1]",
    "n_p_prime_abs[1]",
    "N_norm[m]",
    "q_plus_sq[1/m^2]",
    "q_minus_sq_log[1/m^2]",
    "q_minus_sq_numeric[1/m^2]",
    "delta_p[kg*m/s]",
    "mass_log[kg]",
    "mass_numeric[kg]",
    "a[1/m]",
    "b[1/m]",
    "R_analytic[1]",
    "R_numeric[1]",
    "K_regime[1]",
    "K_svd[1]",
    "mass_via_K[kg]",
    "mass_unit[kg]",
    "mass_over_K[1]",
    "regime",
    "flags",
];

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

impl SweepTable {
    /// Cartesian product of the axes (first axis outermost) applied to
    /// `template`; rows computed in parallel, kept in sweep order.
    pub fn run(template: &SpdcConfig, axes: &[SweepAxis], opts: &SweepOptions) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidAxis(format!("expected one or two axes, got {}", axes.len())));
        }
        if axes.len() == 2 && axes[0].param == axes[1].param {
            return Err(Error::InvalidAxis(format!("axis `{}` given twice", axes[0].param.name())));
        }
        let mut configs = vec![*template];
        for axis in axes {
            let values = axis.values();
            configs = configs
                .iter()
                .flat_map(|cfg| values.iter().map(move |&v| axis.param.apply(*cfg, v)))
                .collect::<Result<_>>()?;
        }
        let rows = configs
            .par_iter()
            .enumerate()
            .map(|(i, cfg)| compute_row(i, cfg, opts))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            axes: axes.to_vec(),
            rows,
        })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(CSV_HEADERS).map_err(io)?;
        for r in &self.rows {
            let record = [
                r.index.to_string(),
                fmt_f64(r.lambda_p),
                fmt_f64(r.w_p),
                fmt_f64(r.length),
                fmt_f64(r.n_o),
                fmt_f64(r.n_p_prime_abs),
                fmt_f64(r.n_norm),
                fmt_f64(r.q_plus_sq),
                fmt_f64(r.q_minus_sq_log),
                fmt_f64(r.q_minus_sq_numeric),
                fmt_f64(r.delta_p),
                fmt_f64(r.mass_log),
                fmt_f64(r.mass_numeric),
                fmt_f64(r.a),
                fmt_f64(r.b),
                fmt_f64(r.r_analytic),
                fmt_opt(r.r_numeric),
                fmt_f64(r.k_regime),
                fmt_opt(r.k_svd),
                fmt_f64(r.mass_via_k),
                fmt_f64(r.mass_unit),
                fmt_f64(r.mass_over_k),
                r.regime.label().to_string(),
                r.flags.clone(),
            ];
            w.write_record(&record).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Rows of a CSV produced by [`SweepTable::to_csv`].
    pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let bad = |what: &str| Error::Io(format!("malformed sweep CSV: {what}"));
        let headers = rdr.headers().map_err(|e| Error::Io(e.to_string()))?;
        if headers.iter().ne(CSV_HEADERS.iter().copied()) {
            return Err(bad("unexpected header"));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            let f = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_HEADERS[i]));
            let opt = |i: usize| if rec[i].is_empty() { Ok(None) } else { f(i).map(Some) };
            rows.push(SweepRow {
                index: rec[0].parse().map_err(|_| bad("index"))?,
                lambda_p: f(1)?,
                w_p: f(2)?,
                length: f(3)?,
                n_o: f(4)?,
                n_p_prime_abs: f(5)?,
                n_norm: f(6)?,
                q_plus_sq: f(7)?,
                q_minus_sq_log: f(8)?,
                q_minus_sq_numeric: f(9)?,
                delta_p: f(10)?,
                mass_log: f(11)?,
                mass_numeric: f(12)?,
                a: f(13)?,
                b: f(14)?,
                r_analytic: f(15)?,
                r_numeric: opt(16)?,
                k_regime: f(17)?,
                k_svd: opt(18)?,
                mass_via_k: f(19)?,
                mass_unit: f(20)?,
                mass_over_k: f(21)?,
                regime: rec[22].parse()?,
                flags: rec[23].to_string(),
            });
        }
        Ok(rows)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))
    }
}
