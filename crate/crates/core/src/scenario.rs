//! Declarative scenario files.
//!
//! A scenario is a TOML document whose sections mirror the domain types.
//! Angles are in degrees, θ in dB (`10 log10 θ`), powers in W, bandwidths
//! in Hz and distances in m. An absent section takes the Table-1 defaults;
//! a present section must spell out every field, so a missing key is
//! reported together with the default it would have had. Unknown keys are
//! rejected.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::access::{AccessConfig, AccessScheme};
use crate::channel::{Geometry, QosSpec, RfParams, VlcParams};
use crate::delay::DelaySearch;
use crate::ec::{
    max_cell_radius, BlockageModel, FadingAverage, IlluminationSpec, McSettings, Method,
    RfEcCurve, VlcEcCurve,
};
use crate::queue::TailWindow;
use crate::rng::StreamSeed;
use crate::units::{db_to_linear, linear_to_db};
use crate::{Error, Result};

/// One problem found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    /// Dotted field path, e.g. `vlc.half_power_angle_deg`.
    pub path: String,
    pub message: String,
    /// 1-based line and column, for syntax errors.
    pub location: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(Diagnostic {
            path: path.into(),
            message: message.into(),
            location: None,
        });
    }

    fn check(&mut self, path: &str, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.push(path, message());
        }
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            match d.location {
                Some((l, c)) => write!(f, "  line {l}, column {c}: {}: {}", d.path, d.message)?,
                None => write!(f, "  {}: {}", d.path, d.message)?,
            }
        }
        Ok(())
    }
}

/// How the VLC cell radius is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellSizing {
    /// `d_c = d_v tan φ½`: the cell reaches the LED half-intensity angle.
    ViewingAngle,
    /// Largest radius meeting the illuminance span.
    Illumination,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelaySettings {
    pub epsilon: f64,
    pub search: DelaySearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueSettings {
    pub frames: usize,
    pub window: TailWindow,
}

/// Axes of the figure presets.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxes {
    pub ec_theta_db: Vec<f64>,
    pub ec_rf_offsets: Vec<f64>,
    pub ec_angles_deg: Vec<f64>,
    pub blockage_mu: Vec<f64>,
    pub blockage_omega: Vec<f64>,
    pub blockage_angles_deg: Vec<f64>,
    pub users: Vec<u32>,
    pub users_spans: Vec<f64>,
    pub users_angle_deg: f64,
    pub users_rf_offset: f64,
    pub delay_arrivals: Vec<f64>,
    pub delay_rf_offsets: Vec<f64>,
    pub delay_angles_deg: Vec<f64>,
    pub queue_theta0_db: Vec<f64>,
    pub queue_rf_offsets: Vec<f64>,
    pub queue_angles_deg: Vec<f64>,
}

/// A fully resolved and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub seed: StreamSeed,
    /// Evaluation method of VLC expectations. RF is always Monte Carlo.
    pub method: Method,
    pub samples: usize,
    /// `cell_radius` is resolved for the base VLC parameters.
    pub geometry: Geometry,
    pub cell: CellSizing,
    pub illumination: IlluminationSpec,
    pub rf: RfParams,
    pub fading_average: FadingAverage,
    pub vlc: VlcParams,
    pub qos: QosSpec,
    pub blockage: BlockageModel,
    pub access: AccessConfig,
    pub delay: DelaySettings,
    pub queue: QueueSettings,
    pub sweep: SweepAxes,
}

impl Scenario {
    /// The reference scenario: `d_v = 2.5 m`, `T = 0.1 ms`, `φ½ = 45°`,
    /// `y_r = 20 m`, `θ = -30 dB`, reference link parameters.
    pub fn reference() -> Self {
        Self::from_raw(&RawConfig::default()).expect("defaults are valid")
    }

    pub fn from_toml_str(text: &str) -> std::result::Result<Self, Diagnostics> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| syntax_diagnostic(text, &e))?;
        Self::from_raw(&raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(Error::Config)
    }

    /// Every field spelled out, suitable as a starting config.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(&self.to_raw()).expect("scenario serializes")
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn config_hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn mc(&self) -> McSettings {
        McSettings {
            samples: self.samples,
            seed: self.seed,
        }
    }

    pub fn vlc_with_angle(&self, half_power_angle_deg: f64) -> VlcParams {
        VlcParams {
            half_power_angle: half_power_angle_deg.to_radians(),
            ..self.vlc.clone()
        }
    }

    pub fn cell_radius_for(&self, vlc: &VlcParams) -> Result<f64> {
        match self.cell {
            CellSizing::ViewingAngle => Ok(self.geometry.vertical * vlc.half_power_angle.tan()),
            CellSizing::Illumination => max_cell_radius(&self.illumination, self.geometry.vertical, vlc),
            CellSizing::Fixed(r) => Ok(r),
        }
    }

    pub fn vlc_curve(&self, vlc: &VlcParams, frame: f64) -> Result<VlcEcCurve> {
        self.vlc_curve_with_radius(vlc, frame, self.cell_radius_for(vlc)?)
    }

    pub fn vlc_curve_with_radius(&self, vlc: &VlcParams, frame: f64, radius: f64) -> Result<VlcEcCurve> {
        let geom = self.geometry.with_cell_radius(radius);
        VlcEcCurve::new(&geom, vlc, frame, self.method, self.mc())
    }

    pub fn rf_curve(&self, rf: &RfParams, frame: f64, geom: &Geometry) -> Result<RfEcCurve> {
        RfEcCurve::new(geom, rf, frame, self.mc(), self.fading_average)
    }

    fn from_raw(raw: &RawConfig) -> std::result::Result<Self, Diagnostics> {
        let mut d = Diagnostics::default();
        let def = RawConfig::filled();

        let seed = raw.seed.unwrap_or(def.seed.unwrap());
        let method_s = raw.method.clone().unwrap_or(def.method.clone().unwrap());
        let method = method_s.parse::<Method>().unwrap_or_else(|_| {
            d.push("method", format!("`{method_s}` is not one of closed-form, quadrature, monte-carlo"));
            Method::Quadrature
        });
        let samples = raw.samples.unwrap_or(def.samples.unwrap());
        d.check("samples", samples >= 2, || format!("must be at least 2, got {samples}"));

        let g = Section::new(&mut d, "geometry", raw.geometry.as_ref(), def.geometry.as_ref().unwrap());
        let vertical = g.get("vertical_m", |s| s.vertical_m);
        let rf_offset = g.get("rf_offset_m", |s| s.rf_offset_m);
        d.check("geometry.vertical_m", vertical > 0.0 && vertical.is_finite(), || {
            format!("must be positive, got {vertical}")
        });
        d.check("geometry.rf_offset_m", rf_offset.is_finite(), || "must be finite".into());

        let c = Section::new(&mut d, "cell", raw.cell.as_ref(), def.cell.as_ref().unwrap());
        let sizing = c.get("sizing", |s| s.sizing.clone());
        let cell = match sizing.as_str() {
            "viewing-angle" => CellSizing::ViewingAngle,
            "illumination" => CellSizing::Illumination,
            "fixed" => match raw.cell.as_ref().and_then(|s| s.radius_m) {
                Some(r) => {
                    d.check("cell.radius_m", r >= 0.0 && r.is_finite(), || {
                        format!("must be nonnegative, got {r}")
                    });
                    CellSizing::Fixed(r)
                }
                None => {
                    d.push("cell.radius_m", "required when cell.sizing = \"fixed\"");
                    CellSizing::Fixed(0.0)
                }
            },
            other => {
                d.push(
                    "cell.sizing",
                    format!("`{other}` is not one of viewing-angle, illumination, fixed"),
                );
                CellSizing::ViewingAngle
            }
        };
        if !matches!(cell, CellSizing::Fixed(_)) {
            if let Some(r) = raw.cell.as_ref().and_then(|s| s.radius_m) {
                d.push("cell.radius_m", format!("only used with sizing = \"fixed\" (got {r})"));
            }
        }

        let il = Section::new(&mut d, "illumination", raw.illumination.as_ref(), def.illumination.as_ref().unwrap());
        let e_min = il.get("e_min_lx", |s| s.e_min_lx);
        let e_max = il.get("e_max_lx", |s| s.e_max_lx);
        d.check("illumination.e_min_lx", e_min > 0.0 && e_min.is_finite(), || {
            format!("must be positive, got {e_min}")
        });
        d.check("illumination.e_max_lx", e_max >= e_min && e_max.is_finite(), || {
            format!("must be at least e_min_lx = {e_min}, got {e_max}")
        });

        let r = Section::new(&mut d, "rf", raw.rf.as_ref(), def.rf.as_ref().unwrap());
        let rf = RfParams {
            bandwidth: r.get("bandwidth_hz", |s| s.bandwidth_hz),
            power: r.get("power_w", |s| s.power_w),
            rician_k: db_to_linear(r.get("rician_k_db", |s| s.rician_k_db)),
            path_loss_exponent: r.get("path_loss_exponent", |s| s.path_loss_exponent),
            shadowing_std_db: r.get("shadowing_std_db", |s| s.shadowing_std_db),
            noise_psd: crate::units::dbm_per_mhz_to_w_per_hz(r.get("noise_psd_dbm_per_mhz", |s| s.noise_psd_dbm_per_mhz)),
            ref_path_loss_db: r.get("ref_path_loss_db", |s| s.ref_path_loss_db),
            ref_distance: r.get("ref_distance_m", |s| s.ref_distance_m),
        };
        let fading_s = r.get("fading_average", |s| s.fading_average.clone());
        let fading_average = match fading_s.as_str() {
            "sampled" => FadingAverage::Sampled,
            "integrated" => FadingAverage::Integrated,
            other => {
                d.push("rf.fading_average", format!("`{other}` is not one of sampled, integrated"));
                FadingAverage::Integrated
            }
        };
        positive(&mut d, "rf.bandwidth_hz", rf.bandwidth);
        positive(&mut d, "rf.power_w", rf.power);
        positive(&mut d, "rf.path_loss_exponent", rf.path_loss_exponent);
        positive(&mut d, "rf.ref_distance_m", rf.ref_distance);
        positive(&mut d, "rf.noise_psd_dbm_per_mhz", rf.noise_psd);
        d.check("rf.rician_k_db", rf.rician_k.is_finite(), || "must be finite".into());
        d.check("rf.shadowing_std_db", rf.shadowing_std_db >= 0.0, || {
            format!("must be nonnegative, got {}", rf.shadowing_std_db)
        });
        d.check("rf.ref_path_loss_db", rf.ref_path_loss_db.is_finite(), || "must be finite".into());

        let v = Section::new(&mut d, "vlc", raw.vlc.as_ref(), def.vlc.as_ref().unwrap());
        let half = v.get("half_power_angle_deg", |s| s.half_power_angle_deg);
        let fov = v.get("fov_deg", |s| s.fov_deg);
        let vlc = VlcParams {
            pd_area: v.get("pd_area_m2", |s| s.pd_area_m2),
            fov: fov.to_radians(),
            half_power_angle: half.to_radians(),
            refractive_index: v.get("refractive_index", |s| s.refractive_index),
            filter_gain: v.get("filter_gain", |s| s.filter_gain),
            responsivity: v.get("responsivity_a_per_w", |s| s.responsivity_a_per_w),
            optical_to_electrical: v.get("optical_to_electrical", |s| s.optical_to_electrical),
            optical_power: v.get("optical_power_w", |s| s.optical_power_w),
            bandwidth: v.get("bandwidth_hz", |s| s.bandwidth_hz),
            noise_psd: v.get("noise_psd_a2_per_hz", |s| s.noise_psd_a2_per_hz),
            rate_constant: v.get("rate_constant", |s| s.rate_constant),
        };
        angle_open(&mut d, "vlc.half_power_angle_deg", half);
        d.check("vlc.fov_deg", fov > 0.0 && fov <= 90.0, || format!("must lie in (0, 90] degrees, got {fov}"));
        positive(&mut d, "vlc.pd_area_m2", vlc.pd_area);
        positive(&mut d, "vlc.refractive_index", vlc.refractive_index);
        positive(&mut d, "vlc.filter_gain", vlc.filter_gain);
        positive(&mut d, "vlc.responsivity_a_per_w", vlc.responsivity);
        positive(&mut d, "vlc.optical_to_electrical", vlc.optical_to_electrical);
        positive(&mut d, "vlc.optical_power_w", vlc.optical_power);
        positive(&mut d, "vlc.bandwidth_hz", vlc.bandwidth);
        positive(&mut d, "vlc.noise_psd_a2_per_hz", vlc.noise_psd);
        positive(&mut d, "vlc.rate_constant", vlc.rate_constant);

        let q = Section::new(&mut d, "qos", raw.qos.as_ref(), def.qos.as_ref().unwrap());
        let theta_db = q.get("theta_db", |s| s.theta_db);
        let frame = q.get("frame_s", |s| s.frame_s);
        d.check("qos.theta_db", theta_db.is_finite(), || "must be finite".into());
        positive(&mut d, "qos.frame_s", frame);

        let b = Section::new(&mut d, "blockage", raw.blockage.as_ref(), def.blockage.as_ref().unwrap());
        let blockage = BlockageModel {
            mu: b.get("mu", |s| s.mu),
            omega: b.get("omega", |s| s.omega),
        };
        unit_closed(&mut d, "blockage.mu", blockage.mu);
        ratio(&mut d, "blockage.omega", blockage.omega);

        let a = Section::new(&mut d, "access", raw.access.as_ref(), def.access.as_ref().unwrap());
        let scheme_s = a.get("scheme", |s| s.scheme.clone());
        let users = a.get("users", |s| s.users);
        let scheme = scheme_s.parse::<AccessScheme>().unwrap_or_else(|_| {
            d.push("access.scheme", format!("`{scheme_s}` is not one of tdma, fdma"));
            AccessScheme::Tdma
        });
        d.check("access.users", users >= 1, || "need at least one user".into());

        let dl = Section::new(&mut d, "delay", raw.delay.as_ref(), def.delay.as_ref().unwrap());
        let delay = DelaySettings {
            epsilon: dl.get("epsilon", |s| s.epsilon),
            search: DelaySearch {
                theta_lo: dl.get("theta_lo", |s| s.theta_lo),
                theta_hi: dl.get("theta_hi", |s| s.theta_hi),
                grid_points: dl.get("grid_points", |s| s.grid_points) as usize,
                ..DelaySearch::default()
            },
        };
        d.check("delay.epsilon", delay.epsilon > 0.0 && delay.epsilon < 1.0, || {
            format!("must lie in (0, 1), got {}", delay.epsilon)
        });
        positive(&mut d, "delay.theta_lo", delay.search.theta_lo);
        d.check("delay.theta_hi", delay.search.theta_hi > delay.search.theta_lo, || {
            format!("must exceed theta_lo = {}", delay.search.theta_lo)
        });
        d.check("delay.grid_points", delay.search.grid_points >= 2, || "need at least 2".into());

        let qu = Section::new(&mut d, "queue", raw.queue.as_ref(), def.queue.as_ref().unwrap());
        let queue = QueueSettings {
            frames: qu.get("frames", |s| s.frames) as usize,
            window: TailWindow {
                lo_quantile: qu.get("lo_quantile", |s| s.lo_quantile),
                hi_quantile: qu.get("hi_quantile", |s| s.hi_quantile),
                ..TailWindow::default()
            },
        };
        d.check("queue.frames", queue.frames >= 1, || "must be positive".into());
        d.check("queue.lo_quantile", (0.0..1.0).contains(&queue.window.lo_quantile), || {
            format!("must lie in [0, 1), got {}", queue.window.lo_quantile)
        });
        d.check(
            "queue.hi_quantile",
            queue.window.hi_quantile > queue.window.lo_quantile && queue.window.hi_quantile < 1.0,
            || format!("must lie in (lo_quantile, 1), got {}", queue.window.hi_quantile),
        );

        let sweep = resolve_sweep(&mut d, raw.sweep.as_ref(), def.sweep.as_ref().unwrap());

        if !d.is_empty() {
            return Err(d);
        }
        let mut s = Scenario {
            seed: StreamSeed(seed),
            method,
            samples: samples as usize,
            geometry: Geometry {
                vertical,
                cell_radius: 0.0,
                rf_offset,
            },
            cell,
            illumination: IlluminationSpec { e_min, e_max },
            rf,
            fading_average,
            vlc,
            qos: QosSpec::from_db(theta_db, frame).map_err(|e| single("qos", e))?,
            blockage,
            access: AccessConfig { scheme, users },
            delay,
            queue,
            sweep,
        };
        s.geometry.cell_radius = s.cell_radius_for(&s.vlc).map_err(|e| single("cell", e))?;
        Ok(s)
    }

    fn to_raw(&self) -> RawConfig {
        let (sizing, radius) = match self.cell {
            CellSizing::ViewingAngle => ("viewing-angle", None),
            CellSizing::Illumination => ("illumination", None),
            CellSizing::Fixed(r) => ("fixed", Some(r)),
        };
        let w = &self.sweep;
        RawConfig {
            seed: Some(self.seed.0),
            method: Some(self.method.to_string()),
            samples: Some(self.samples as u64),
            geometry: Some(RawGeometry {
                vertical_m: Some(self.geometry.vertical),
                rf_offset_m: Some(self.geometry.rf_offset),
            }),
            cell: Some(RawCell {
                sizing: Some(sizing.into()),
                radius_m: radius,
            }),
            illumination: Some(RawIllumination {
                e_min_lx: Some(self.illumination.e_min),
                e_max_lx: Some(self.illumination.e_max),
            }),
            rf: Some(RawRf {
                bandwidth_hz: Some(self.rf.bandwidth),
                power_w: Some(self.rf.power),
                rician_k_db: Some(linear_to_db(self.rf.rician_k)),
                path_loss_exponent: Some(self.rf.path_loss_exponent),
                shadowing_std_db: Some(self.rf.shadowing_std_db),
                noise_psd_dbm_per_mhz: Some(linear_to_db(self.rf.noise_psd * 1e9)),
                ref_path_loss_db: Some(self.rf.ref_path_loss_db),
                ref_distance_m: Some(self.rf.ref_distance),
                fading_average: Some(
                    match self.fading_average {
                        FadingAverage::Sampled => "sampled",
                        FadingAverage::Integrated => "integrated",
                    }
                    .into(),
                ),
            }),
            vlc: Some(RawVlc {
                pd_area_m2: Some(self.vlc.pd_area),
                fov_deg: Some(self.vlc.fov.to_degrees()),
                half_power_angle_deg: Some(self.vlc.half_power_angle.to_degrees()),
                refractive_index: Some(self.vlc.refractive_index),
                filter_gain: Some(self.vlc.filter_gain),
                responsivity_a_per_w: Some(self.vlc.responsivity),
                optical_to_electrical: Some(self.vlc.optical_to_electrical),
                optical_power_w: Some(self.vlc.optical_power),
                bandwidth_hz: Some(self.vlc.bandwidth),
                noise_psd_a2_per_hz: Some(self.vlc.noise_psd),
                rate_constant: Some(self.vlc.rate_constant),
            }),
            qos: Some(RawQos {
                theta_db: Some(linear_to_db(self.qos.theta)),
                frame_s: Some(self.qos.frame),
            }),
            blockage: Some(RawBlockage {
                mu: Some(self.blockage.mu),
                omega: Some(self.blockage.omega),
            }),
            access: Some(RawAccess {
                scheme: Some(self.access.scheme.to_string()),
                users: Some(self.access.users),
            }),
            delay: Some(RawDelay {
                epsilon: Some(self.delay.epsilon),
                theta_lo: Some(self.delay.search.theta_lo),
                theta_hi: Some(self.delay.search.theta_hi),
                grid_points: Some(self.delay.search.grid_points as u64),
            }),
            queue: Some(RawQueue {
                frames: Some(self.queue.frames as u64),
                lo_quantile: Some(self.queue.window.lo_quantile),
                hi_quantile: Some(self.queue.window.hi_quantile),
            }),
            sweep: Some(RawSweep {
                ec: Some(RawEcSweep {
                    theta_db: Some(w.ec_theta_db.clone()),
                    rf_offsets_m: Some(w.ec_rf_offsets.clone()),
                    half_power_angles_deg: Some(w.ec_angles_deg.clone()),
                }),
                blockage: Some(RawBlockageSweep {
                    mu: Some(w.blockage_mu.clone()),
                    omega: Some(w.blockage_omega.clone()),
                    half_power_angles_deg: Some(w.blockage_angles_deg.clone()),
                }),
                users: Some(RawUsersSweep {
                    users: Some(w.users.clone()),
                    spans: Some(w.users_spans.clone()),
                    half_power_angle_deg: Some(w.users_angle_deg),
                    rf_offset_m: Some(w.users_rf_offset),
                }),
                delay: Some(RawDelaySweep {
                    arrivals_bits_per_frame: Some(w.delay_arrivals.clone()),
                    rf_offsets_m: Some(w.delay_rf_offsets.clone()),
                    half_power_angles_deg: Some(w.delay_angles_deg.clone()),
                }),
                queue: Some(RawQueueSweep {
                    theta0_db: Some(w.queue_theta0_db.clone()),
                    rf_offsets_m: Some(w.queue_rf_offsets.clone()),
                    half_power_angles_deg: Some(w.queue_angles_deg.clone()),
                }),
            }),
        }
    }
}

fn single(path: &str, e: Error) -> Diagnostics {
    let mut d = Diagnostics::default();
    d.push(path, e.to_string());
    d
}

fn positive(d: &mut Diagnostics, path: &str, v: f64) {
    d.check(path, v > 0.0 && v.is_finite(), || format!("must be positive and finite, got {v}"));
}

fn angle_open(d: &mut Diagnostics, path: &str, deg: f64) {
    d.check(path, deg > 0.0 && deg < 90.0, || format!("must lie in (0, 90) degrees, got {deg}"));
}

fn unit_closed(d: &mut Diagnostics, path: &str, v: f64) {
    d.check(path, (0.0..=1.0).contains(&v), || format!("must lie in [0, 1], got {v}"));
}

fn ratio(d: &mut Diagnostics, path: &str, v: f64) {
    d.check(path, (0.0..1.0).contains(&v), || format!("must lie in [0, 1), got {v}"));
}

fn syntax_diagnostic(text: &str, e: &toml::de::Error) -> Diagnostics {
    let location = e.span().map(|span| {
        let before = &text[..span.start.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    });
    Diagnostics(vec![Diagnostic {
        path: "<config>".into(),
        message: e.message().trim().to_string(),
        location,
    }])
}

/// Reads fields of one config section, reporting keys missing from a
/// section that is present.
struct Section<'a, T> {
    name: &'static str,
    present: Option<&'a T>,
    default: &'a T,
    diags: std::cell::RefCell<&'a mut Diagnostics>,
}

impl<'a, T> Section<'a, T> {
    fn new(diags: &'a mut Diagnostics, name: &'static str, present: Option<&'a T>, default: &'a T) -> Self {
        Self {
            name,
            present,
            default,
            diags: std::cell::RefCell::new(diags),
        }
    }

    fn get<V: FieldValue>(&self, key: &str, field: impl Fn(&T) -> Option<V>) -> V {
        let default = field(self.default).expect("defaults are filled");
        match self.present {
            None => default,
            Some(s) => field(s).unwrap_or_else(|| {
                self.diags.borrow_mut().push(
                    format!("{}.{}", self.name, key),
                    format!("missing; the default is {}", default.show()),
                );
                default
            }),
        }
    }
}

/// Values that can appear in a section.
trait FieldValue: Clone {
    fn show(&self) -> String;
}

macro_rules! field_value {
    ($($t:ty),*) => {$(
        impl FieldValue for $t {
            fn show(&self) -> String {
                format!("{:?}", self)
            }
        }
    )*};
}
field_value!(f64, u32, u64, String, Vec<f64>, Vec<u32>);

// --- raw TOML schema --------------------------------------------------------

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub samples: Option<u64>,
    pub geometry: Option<RawGeometry>,
    pub cell: Option<RawCell>,
    pub illumination: Option<RawIllumination>,
    pub rf: Option<RawRf>,
    pub vlc: Option<RawVlc>,
    pub qos: Option<RawQos>,
    pub blockage: Option<RawBlockage>,
    pub access: Option<RawAccess>,
    pub delay: Option<RawDelay>,
    pub queue: Option<RawQueue>,
    pub sweep: Option<RawSweep>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGeometry {
    pub vertical_m: Option<f64>,
    pub rf_offset_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCell {
    pub sizing: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawIllumination {
    pub e_min_lx: Option<f64>,
    pub e_max_lx: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRf {
    pub bandwidth_hz: Option<f64>,
    pub power_w: Option<f64>,
    pub rician_k_db: Option<f64>,
    pub path_loss_exponent: Option<f64>,
    pub shadowing_std_db: Option<f64>,
    pub noise_psd_dbm_per_mhz: Option<f64>,
    pub ref_path_loss_db: Option<f64>,
    pub ref_distance_m: Option<f64>,
    pub fading_average: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVlc {
    pub pd_area_m2: Option<f64>,
    pub fov_deg: Option<f64>,
    pub half_power_angle_deg: Option<f64>,
    pub refractive_index: Option<f64>,
    pub filter_gain: Option<f64>,
    pub responsivity_a_per_w: Option<f64>,
    pub optical_to_electrical: Option<f64>,
    pub optical_power_w: Option<f64>,
    pub bandwidth_hz: Option<f64>,
    pub noise_psd_a2_per_hz: Option<f64>,
    pub rate_constant: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQos {
    pub theta_db: Option<f64>,
    pub frame_s: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBlockage {
    pub mu: Option<f64>,
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAccess {
    pub scheme: Option<String>,
    pub users: Option<u32>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDelay {
    pub epsilon: Option<f64>,
    pub theta_lo: Option<f64>,
    pub theta_hi: Option<f64>,
    pub grid_points: Option<u64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQueue {
    pub frames: Option<u64>,
    pub lo_quantile: Option<f64>,
    pub hi_quantile: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub ec: Option<RawEcSweep>,
    pub blockage: Option<RawBlockageSweep>,
    pub users: Option<RawUsersSweep>,
    pub delay: Option<RawDelaySweep>,
    pub queue: Option<RawQueueSweep>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEcSweep {
    pub theta_db: Option<Vec<f64>>,
    pub rf_offsets_m: Option<Vec<f64>>,
    pub half_power_angles_deg: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBlockageSweep {
    pub mu: Option<Vec<f64>>,
    pub omega: Option<Vec<f64>>,
    pub half_power_angles_deg: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUsersSweep {
    pub users: Option<Vec<u32>>,
    pub spans: Option<Vec<f64>>,
    pub half_power_angle_deg: Option<f64>,
    pub rf_offset_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDelaySweep {
    pub arrivals_bits_per_frame: Option<Vec<f64>>,
    pub rf_offsets_m: Option<Vec<f64>>,
    pub half_power_angles_deg: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawQueueSweep {
    pub theta0_db: Option<Vec<f64>>,
    pub rf_offsets_m: Option<Vec<f64>>,
    pub half_power_angles_deg: Option<Vec<f64>>,
}

fn range(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

impl RawConfig {
    /// The defaults with every field present.
    fn filled() -> Self {
        let rf = RfParams::reference();
        let vlc = VlcParams::reference(45.0);
        RawConfig {
            seed: Some(1),
            method: Some("quadrature".into()),
            samples: Some(1_000_000),
            geometry: Some(RawGeometry {
                vertical_m: Some(2.5),
                rf_offset_m: Some(20.0),
            }),
            cell: Some(RawCell {
                sizing: Some("viewing-angle".into()),
                radius_m: None,
            }),
            illumination: Some(RawIllumination {
                e_min_lx: Some(300.0),
                e_max_lx: Some(900.0),
            }),
            rf: Some(RawRf {
                bandwidth_hz: Some(rf.bandwidth),
                power_w: Some(rf.power),
                rician_k_db: Some(5.0),
                path_loss_exponent: Some(rf.path_loss_exponent),
                shadowing_std_db: Some(rf.shadowing_std_db),
                noise_psd_dbm_per_mhz: Some(-114.0),
                ref_path_loss_db: Some(rf.ref_path_loss_db),
                ref_distance_m: Some(rf.ref_distance),
                fading_average: Some("integrated".into()),
            }),
            vlc: Some(RawVlc {
                pd_area_m2: Some(vlc.pd_area),
                fov_deg: Some(90.0),
                half_power_angle_deg: Some(45.0),
                refractive_index: Some(vlc.refractive_index),
                filter_gain: Some(vlc.filter_gain),
                responsivity_a_per_w: Some(vlc.responsivity),
                optical_to_electrical: Some(vlc.optical_to_electrical),
                optical_power_w: Some(vlc.optical_power),
                bandwidth_hz: Some(vlc.bandwidth),
                noise_psd_a2_per_hz: Some(vlc.noise_psd),
                rate_constant: Some(vlc.rate_constant),
            }),
            qos: Some(RawQos {
                theta_db: Some(-30.0),
                frame_s: Some(1e-4),
            }),
            blockage: Some(RawBlockage {
                mu: Some(1.0),
                omega: Some(0.0),
            }),
            access: Some(RawAccess {
                scheme: Some("tdma".into()),
                users: Some(1),
            }),
            delay: Some(RawDelay {
                epsilon: Some(1e-6),
                theta_lo: Some(1e-8),
                theta_hi: Some(1e-1),
                grid_points: Some(200),
            }),
            queue: Some(RawQueue {
                frames: Some(10_000_000),
                lo_quantile: Some(0.90),
                hi_quantile: Some(0.999),
            }),
            sweep: Some(RawSweep {
                ec: Some(RawEcSweep {
                    theta_db: Some(range(-60.0, -10.0, 1.0)),
                    rf_offsets_m: Some(vec![5.0, 10.0, 20.0, 30.0]),
                    half_power_angles_deg: Some(vec![30.0, 45.0, 60.0]),
                }),
                blockage: Some(RawBlockageSweep {
                    mu: Some(range(0.0, 1.0, 0.05).into_iter().map(|m| (m * 100.0).round() / 100.0).collect()),
                    omega: Some(vec![0.0, 0.5]),
                    half_power_angles_deg: Some(vec![30.0, 45.0, 60.0]),
                }),
                users: Some(RawUsersSweep {
                    users: Some(vec![1, 2, 4, 8, 16]),
                    spans: Some(vec![1.5, 2.0, 3.0]),
                    half_power_angle_deg: Some(45.0),
                    rf_offset_m: Some(20.0),
                }),
                delay: Some(RawDelaySweep {
                    arrivals_bits_per_frame: Some(range(1000.0, 59000.0, 2000.0)),
                    rf_offsets_m: Some(vec![5.0, 10.0, 20.0, 30.0]),
                    half_power_angles_deg: Some(vec![30.0, 45.0, 60.0]),
                }),
                queue: Some(RawQueueSweep {
                    theta0_db: Some(vec![-40.0, -30.0]),
                    rf_offsets_m: Some(vec![5.0, 20.0]),
                    half_power_angles_deg: Some(vec![30.0, 45.0, 60.0]),
                }),
            }),
        }
    }
}

fn resolve_sweep(d: &mut Diagnostics, raw: Option<&RawSweep>, def: &RawSweep) -> SweepAxes {
    let sub = |r: Option<&RawSweep>| r.cloned().unwrap_or_default();
    let raw_s = sub(raw);

    let e = Section::new(d, "sweep.ec", raw_s.ec.as_ref(), def.ec.as_ref().unwrap());
    let ec_theta_db = e.get("theta_db", |s| s.theta_db.clone());
    let ec_rf_offsets = e.get("rf_offsets_m", |s| s.rf_offsets_m.clone());
    let ec_angles_deg = e.get("half_power_angles_deg", |s| s.half_power_angles_deg.clone());

    let b = Section::new(d, "sweep.blockage", raw_s.blockage.as_ref(), def.blockage.as_ref().unwrap());
    let blockage_mu = b.get("mu", |s| s.mu.clone());
    let blockage_omega = b.get("omega", |s| s.omega.clone());
    let blockage_angles_deg = b.get("half_power_angles_deg", |s| s.half_power_angles_deg.clone());

    let u = Section::new(d, "sweep.users", raw_s.users.as_ref(), def.users.as_ref().unwrap());
    let users = u.get("users", |s| s.users.clone());
    let users_spans = u.get("spans", |s| s.spans.clone());
    let users_angle_deg = u.get("half_power_angle_deg", |s| s.half_power_angle_deg);
    let users_rf_offset = u.get("rf_offset_m", |s| s.rf_offset_m);

    let dl = Section::new(d, "sweep.delay", raw_s.delay.as_ref(), def.delay.as_ref().unwrap());
    let delay_arrivals = dl.get("arrivals_bits_per_frame", |s| s.arrivals_bits_per_frame.clone());
    let delay_rf_offsets = dl.get("rf_offsets_m", |s| s.rf_offsets_m.clone());
    let delay_angles_deg = dl.get("half_power_angles_deg", |s| s.half_power_angles_deg.clone());

    let q = Section::new(d, "sweep.queue", raw_s.queue.as_ref(), def.queue.as_ref().unwrap());
    let queue_theta0_db = q.get("theta0_db", |s| s.theta0_db.clone());
    let queue_rf_offsets = q.get("rf_offsets_m", |s| s.rf_offsets_m.clone());
    let queue_angles_deg = q.get("half_power_angles_deg", |s| s.half_power_angles_deg.clone());

    let nonempty = |d: &mut Diagnostics, path: &str, n: usize| {
        d.check(path, n > 0, || "must not be empty".into());
    };
    nonempty(d, "sweep.ec.theta_db", ec_theta_db.len());
    nonempty(d, "sweep.blockage.mu", blockage_mu.len());
    nonempty(d, "sweep.users.users", users.len());
    nonempty(d, "sweep.delay.arrivals_bits_per_frame", delay_arrivals.len());
    nonempty(d, "sweep.queue.theta0_db", queue_theta0_db.len());
    for (path, xs) in [
        ("sweep.ec.half_power_angles_deg", &ec_angles_deg),
        ("sweep.blockage.half_power_angles_deg", &blockage_angles_deg),
        ("sweep.delay.half_power_angles_deg", &delay_angles_deg),
        ("sweep.queue.half_power_angles_deg", &queue_angles_deg),
    ] {
        for &x in xs.iter() {
            angle_open(d, path, x);
        }
    }
    angle_open(d, "sweep.users.half_power_angle_deg", users_angle_deg);
    for &x in &ec_theta_db {
        d.check("sweep.ec.theta_db", x.is_finite(), || "entries must be finite".into());
    }
    for &x in &queue_theta0_db {
        d.check("sweep.queue.theta0_db", x.is_finite(), || "entries must be finite".into());
    }
    for &x in &blockage_mu {
        unit_closed(d, "sweep.blockage.mu", x);
    }
    for &x in &blockage_omega {
        ratio(d, "sweep.blockage.omega", x);
    }
    for &n in &users {
        d.check("sweep.users.users", n >= 1, || "entries must be at least 1".into());
    }
    for &s in &users_spans {
        d.check("sweep.users.spans", s >= 1.0 && s.is_finite(), || {
            format!("spans are E_max/E_min and must be at least 1, got {s}")
        });
    }
    for &a in &delay_arrivals {
        positive(d, "sweep.delay.arrivals_bits_per_frame", a);
    }
    for (path, xs) in [
        ("sweep.ec.rf_offsets_m", &ec_rf_offsets),
        ("sweep.delay.rf_offsets_m", &delay_rf_offsets),
        ("sweep.queue.rf_offsets_m", &queue_rf_offsets),
    ] {
        for &x in xs.iter() {
            d.check(path, x.is_finite(), || "entries must be finite".into());
        }
    }

    SweepAxes {
        ec_theta_db,
        ec_rf_offsets,
        ec_angles_deg,
        blockage_mu,
        blockage_omega,
        blockage_angles_deg,
        users,
        users_spans,
        users_angle_deg,
        users_rf_offset,
        delay_arrivals,
        delay_rf_offsets,
        delay_angles_deg,
        queue_theta0_db,
        queue_rf_offsets,
        queue_angles_deg,
    }
}
