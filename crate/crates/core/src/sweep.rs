//! Figure presets: each turns a [`Scenario`] into a table written as CSV.
//!
//! Rates and capacities are written in bits per second (bits per frame
//! divided by the frame duration); delays in frames. Rows are computed in
//! parallel and assembled in sweep order, and every random draw comes from
//! the scenario seed, so a rerun reproduces the CSV body byte for byte.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::access::{per_user_rf_params, per_user_vlc_params, AccessConfig, AccessScheme};
use crate::channel::VlcLink;
use crate::delay::{ArrivalSpec, EcTable};
use crate::ec::{max_cell_radius, BlockageModel, Blocked, EcCurve, IlluminationSpec};
use crate::queue::{
    empirical_delay_violation, fit_tail_exponent_with, simulate_queue, RfService,
    ServiceProcess, VlcService,
};
use crate::scenario::Scenario;
use crate::units::theta_from_db;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    /// Effective capacity against θ for several RF AP offsets and LED angles.
    EcSweep,
    /// VLC effective capacity against LoS availability.
    BlockageSweep,
    /// Per-user effective capacity against the number of users.
    UsersSweep,
    /// Delay bounds against the arrival rate.
    DelaySweep,
    /// Queue simulations checking the tail exponent and delay bounds.
    QueueValidate,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::EcSweep,
        Figure::BlockageSweep,
        Figure::UsersSweep,
        Figure::DelaySweep,
        Figure::QueueValidate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::EcSweep => "ec-sweep",
            Figure::BlockageSweep => "blockage-sweep",
            Figure::UsersSweep => "users-sweep",
            Figure::DelaySweep => "delay-sweep",
            Figure::QueueValidate => "queue-validate",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::invalid("figure", format!("unknown preset `{s}`")))
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Text(String),
    /// Written as an empty field (infeasible bound, failed fit, ...).
    Missing,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `+ 0.0` folds -0 into 0.
            Value::Num(x) if x.is_finite() => write!(f, "{}", x + 0.0),
            Value::Num(_) | Value::Missing => Ok(()),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Num(x)
    }
}

/// Provenance written next to the CSV as `<csv>.meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub figure: Figure,
    pub seed: u64,
    pub config_hash: String,
    pub timestamp: String,
    pub samples: usize,
    pub method: String,
    pub frame_s: f64,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub meta: SweepMeta,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match &r[j] {
                    Value::Num(x) => *x,
                    _ => f64::NAN,
                })
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Io(e.into());
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            out.write_record(r.iter().map(|v| v.to_string())).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn csv_body(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn meta_path(csv: &Path) -> PathBuf {
        let mut name = csv.file_name().unwrap_or_default().to_os_string();
        name.push(".meta.json");
        csv.with_file_name(name)
    }

    /// Writes the CSV and its metadata sidecar.
    pub fn save(&self, csv: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(csv)?))?;
        let meta = serde_json::to_string_pretty(&self.meta).map_err(|e| Error::Io(e.into()))?;
        std::fs::write(Self::meta_path(csv), meta + "\n")?;
        Ok(())
    }
}

pub fn run_sweep(scenario: &Scenario, figure: Figure) -> Result<SweepResult> {
    let (header, rows) = match figure {
        Figure::EcSweep => ec_sweep(scenario)?,
        Figure::BlockageSweep => blockage_sweep(scenario)?,
        Figure::UsersSweep => users_sweep(scenario)?,
        Figure::DelaySweep => delay_sweep(scenario)?,
        Figure::QueueValidate => queue_validate(scenario)?,
    };
    debug_assert!(rows.iter().all(|r| r.len() == header.len()));
    Ok(SweepResult {
        meta: SweepMeta {
            figure,
            seed: scenario.seed.0,
            config_hash: scenario.config_hash(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            samples: scenario.samples,
            method: scenario.method.to_string(),
            frame_s: scenario.qos.frame,
            columns: header.clone(),
        },
        header,
        rows,
    })
}

type Table = (Vec<String>, Vec<Vec<Value>>);

/// Label, swept parameter, EC curve and matching service process.
type QueueJob = (String, f64, Box<dyn EcCurve>, Box<dyn ServiceProcess>);

fn tag(x: f64) -> String {
    format!("{x}").replace('.', "p").replace('-', "m")
}

fn rf_curves(s: &Scenario, offsets: &[f64]) -> Result<Vec<Box<dyn EcCurve>>> {
    offsets
        .iter()
        .map(|&y| {
            let geom = s.geometry.with_rf_offset(y);
            Ok(Box::new(s.rf_curve(&s.rf, s.qos.frame, &geom)?) as Box<dyn EcCurve>)
        })
        .collect()
}

fn vlc_curves(s: &Scenario, angles: &[f64]) -> Result<Vec<Box<dyn EcCurve>>> {
    angles
        .iter()
        .map(|&phi| Ok(Box::new(s.vlc_curve(&s.vlc_with_angle(phi), s.qos.frame)?) as Box<dyn EcCurve>))
        .collect()
}

fn ec_sweep(s: &Scenario) -> Result<Table> {
    let w = &s.sweep;
    let rf = rf_curves(s, &w.ec_rf_offsets)?;
    let vlc = vlc_curves(s, &w.ec_angles_deg)?;
    let mut header = vec!["theta_db".to_string()];
    for &y in &w.ec_rf_offsets {
        header.push(format!("ec_rf_yr{}_bps", tag(y)));
        header.push(format!("ec_rf_yr{}_stderr_bps", tag(y)));
    }
    for &phi in &w.ec_angles_deg {
        header.push(format!("ec_vlc_phi{}_bps", tag(phi)));
    }
    let t = s.qos.frame;
    let rows = w
        .ec_theta_db
        .par_iter()
        .map(|&db| {
            let theta = theta_from_db(db);
            let mut row = vec![Value::Num(db)];
            for c in &rf {
                let e = c.effective_capacity(theta)?;
                row.push((e.value / t).into());
                row.push((e.stderr / t).into());
            }
            for c in &vlc {
                row.push((c.effective_capacity(theta)?.value / t).into());
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

fn blockage_sweep(s: &Scenario) -> Result<Table> {
    let w = &s.sweep;
    let vlc = vlc_curves(s, &w.blockage_angles_deg)?;
    let mut header = vec!["mu".to_string()];
    for &phi in &w.blockage_angles_deg {
        for &om in &w.blockage_omega {
            header.push(format!("ec_vlc_phi{}_omega{}_bps", tag(phi), tag(om)));
        }
    }
    let theta = s.qos.theta;
    let t = s.qos.frame;
    let rows = w
        .blockage_mu
        .par_iter()
        .map(|&mu| {
            let mut row = vec![Value::Num(mu)];
            for c in &vlc {
                for &om in &w.blockage_omega {
                    let b = Blocked::new(c, BlockageModel::new(mu, om)?)?;
                    row.push((b.effective_capacity(theta)?.value / t).into());
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

fn users_sweep(s: &Scenario) -> Result<Table> {
    let w = &s.sweep;
    let vlc = s.vlc_with_angle(w.users_angle_deg);
    let geom = s.geometry.with_rf_offset(w.users_rf_offset);
    let radii = w
        .users_spans
        .iter()
        .map(|&span| max_cell_radius(&IlluminationSpec::from_span(span)?, geom.vertical, &vlc))
        .collect::<Result<Vec<_>>>()?;
    let mut header = vec!["users".to_string(), "ec_rf_tdma_bps".into(), "ec_rf_fdma_bps".into()];
    for scheme in ["tdma", "fdma"] {
        for &span in &w.users_spans {
            header.push(format!("ec_vlc_{scheme}_span{}_bps", tag(span)));
        }
    }
    let theta = s.qos.theta;
    let t = s.qos.frame;
    let mut rows = Vec::with_capacity(w.users.len());
    // Sequential over N: each RF curve already parallelizes its draws.
    for &n in &w.users {
        let mut row = vec![Value::Num(n as f64)];
        for scheme in [AccessScheme::Tdma, AccessScheme::Fdma] {
            let (rf, frame) = per_user_rf_params(&s.rf, t, AccessConfig::new(scheme, n)?);
            let c = s.rf_curve(&rf, frame, &geom)?;
            row.push((c.effective_capacity(theta)?.value / t).into());
        }
        for scheme in [AccessScheme::Tdma, AccessScheme::Fdma] {
            let (v, frame) = per_user_vlc_params(&vlc, t, AccessConfig::new(scheme, n)?);
            for &r in &radii {
                let c = s.vlc_curve_with_radius(&v, frame, r)?;
                row.push((c.effective_capacity(theta)?.value / t).into());
            }
        }
        rows.push(row);
    }
    Ok((header, rows))
}

fn delay_sweep(s: &Scenario) -> Result<Table> {
    let w = &s.sweep;
    let mut curves = rf_curves(s, &w.delay_rf_offsets)?;
    curves.extend(vlc_curves(s, &w.delay_angles_deg)?);
    let tables = curves
        .iter()
        .map(|c| s.delay.search.tabulate_curve(c))
        .collect::<Result<Vec<EcTable>>>()?;
    let mut header = vec!["arrival_bps".to_string(), "arrival_bits_per_frame".into()];
    for &y in &w.delay_rf_offsets {
        header.push(format!("delay_rf_yr{}_frames", tag(y)));
    }
    for &phi in &w.delay_angles_deg {
        header.push(format!("delay_vlc_phi{}_frames", tag(phi)));
    }
    let t = s.qos.frame;
    let rows = w
        .delay_arrivals
        .par_iter()
        .map(|&a| {
            let arr = ArrivalSpec::new(a, s.delay.epsilon)?;
            let mut row = vec![Value::Num(a / t), Value::Num(a)];
            for (c, table) in curves.iter().zip(&tables) {
                let b = table.bound(|th| c.effective_capacity(th).map(|e| e.value), &arr)?;
                row.push(if b.feasible { Value::Num(b.d) } else { Value::Missing });
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

fn queue_validate(s: &Scenario) -> Result<Table> {
    let w = &s.sweep;
    let header: Vec<String> = [
        "link",
        "parameter",
        "theta0",
        "arrival_bps",
        "theta_hat",
        "theta_ratio",
        "busy_fraction",
        "r_squared",
        "epsilon",
        "delay_bound_frames",
        "delay_bound_whole_frames",
        "violation",
        "violation_upper",
        "status",
    ]
    .map(String::from)
    .to_vec();
    let t = s.qos.frame;
    let mut jobs: Vec<QueueJob> = Vec::new();
    for &y in &w.queue_rf_offsets {
        let geom = s.geometry.with_rf_offset(y);
        jobs.push((
            format!("rf_yr{}", tag(y)),
            y,
            Box::new(s.rf_curve(&s.rf, t, &geom)?),
            Box::new(RfService {
                geometry: geom,
                rf: s.rf.clone(),
                frame: t,
                seed: s.seed,
            }),
        ));
    }
    for &phi in &w.queue_angles_deg {
        let vlc = s.vlc_with_angle(phi);
        jobs.push((
            format!("vlc_phi{}", tag(phi)),
            phi,
            Box::new(s.vlc_curve(&vlc, t)?),
            Box::new(VlcService {
                link: VlcLink::new(s.geometry.vertical, &vlc, t)?,
                cell_radius: s.cell_radius_for(&vlc)?,
                seed: s.seed,
            }),
        ));
    }
    let mut rows = Vec::new();
    for (name, param, curve, service) in &jobs {
        let table = s.delay.search.tabulate_curve(curve)?;
        for &db in &w.queue_theta0_db {
            let theta0 = theta_from_db(db);
            let a = curve.effective_capacity(theta0)?.value;
            let trace = simulate_queue(a, service.as_ref(), s.queue.frames)?;
            let arr = ArrivalSpec::new(a, s.delay.epsilon)?;
            let bound = table.bound(|th| curve.effective_capacity(th).map(|e| e.value), &arr)?;
            let mut row = vec![
                Value::Text(name.clone()),
                Value::Num(*param),
                Value::Num(theta0),
                Value::Num(a / t),
            ];
            let status = match fit_tail_exponent_with(&trace, s.queue.window) {
                Ok(fit) => {
                    row.push(fit.theta_hat.into());
                    row.push((fit.theta_hat / theta0).into());
                    row.push(trace.busy_fraction().into());
                    row.push(fit.r_squared.into());
                    "ok".to_string()
                }
                Err(e) => {
                    row.extend([Value::Missing, Value::Missing]);
                    row.push(trace.busy_fraction().into());
                    row.push(Value::Missing);
                    match e {
                        Error::InsufficientTail(_) => "insufficient-tail".to_string(),
                        other => return Err(other),
                    }
                }
            };
            row.push(s.delay.epsilon.into());
            if bound.feasible {
                let v = empirical_delay_violation(&trace, bound.frames());
                row.extend([
                    Value::Num(bound.d),
                    Value::Num(bound.frames()),
                    v.probability.into(),
                    v.upper.into(),
                ]);
            } else {
                row.extend([Value::Missing, Value::Missing, Value::Missing, Value::Missing]);
            }
            row.push(Value::Text(status));
            rows.push(row);
        }
    }
    Ok((header, rows))
}
