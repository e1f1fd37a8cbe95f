//! Discrete-time FCFS buffer fed by a constant bit rate.
//!
//! Each frame `a` bits arrive and then up to `R_l` bits leave, so the backlog
//! follows the Lindley recursion `Q_{l+1} = max(Q_l + a - R_l, 0)`. The delay
//! of the bits arriving in frame `l` is the number of further frames needed
//! before all of them have left.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{
    rf_rate, sample_rf_fading, sample_user_point, sample_user_position, Geometry, RfParams,
    VlcLink,
};
use crate::ec::BlockageModel;
use crate::rng::{uniform, Purpose, StreamSeed, CHUNK};
use crate::{Error, Result};

/// Marks an arrival whose delay runs past the end of the trace.
pub const CENSORED: u32 = u32::MAX;

/// Frames generated per parallel batch.
const BATCH: usize = 64 * CHUNK;

/// Per-frame service in bits, generated chunk by chunk so that the draw of
/// frame `l` depends only on the seed and `l`.
pub trait ServiceProcess: Sync {
    /// Writes the rates of frames `chunk * CHUNK ..` into `out`
    /// (`out.len() <= CHUNK`).
    fn fill(&self, chunk: usize, out: &mut [f64]) -> Result<()>;

    fn seed(&self) -> Option<StreamSeed> {
        None
    }
}

/// The VLC rate of a user redrawn uniformly on the cell every frame.
#[derive(Debug, Clone)]
pub struct VlcService {
    pub link: VlcLink,
    pub cell_radius: f64,
    pub seed: StreamSeed,
}

impl ServiceProcess for VlcService {
    fn fill(&self, chunk: usize, out: &mut [f64]) -> Result<()> {
        let mut rng = self.seed.chunk(Purpose::QueueService, chunk);
        for r in out {
            let d = sample_user_position(self.cell_radius, &mut rng);
            *r = self.link.rate(d * d);
        }
        Ok(())
    }

    fn seed(&self) -> Option<StreamSeed> {
        Some(self.seed)
    }
}

/// The RF rate with position, shadowing and fading redrawn every frame.
#[derive(Debug, Clone)]
pub struct RfService {
    pub geometry: Geometry,
    pub rf: RfParams,
    pub frame: f64,
    pub seed: StreamSeed,
}

impl ServiceProcess for RfService {
    fn fill(&self, chunk: usize, out: &mut [f64]) -> Result<()> {
        let mut rng = self.seed.chunk(Purpose::QueueService, chunk);
        for r in out {
            let d0 = self.geometry.rf_distance(sample_user_point(&self.geometry, &mut rng));
            *r = rf_rate(sample_rf_fading(d0, &self.rf, &mut rng)?.power(), &self.rf, self.frame);
        }
        Ok(())
    }

    fn seed(&self) -> Option<StreamSeed> {
        Some(self.seed)
    }
}

/// Thins another service with Bernoulli line-of-sight blockage.
#[derive(Debug, Clone)]
pub struct BlockedService<S> {
    pub inner: S,
    pub model: BlockageModel,
    pub seed: StreamSeed,
}

impl<S: ServiceProcess> ServiceProcess for BlockedService<S> {
    fn fill(&self, chunk: usize, out: &mut [f64]) -> Result<()> {
        self.inner.fill(chunk, out)?;
        let mut rng = self.seed.chunk(Purpose::Custom(0xb10c), chunk);
        for r in out {
            if uniform(&mut rng) >= self.model.mu {
                *r *= self.model.omega;
            }
        }
        Ok(())
    }

    fn seed(&self) -> Option<StreamSeed> {
        Some(self.seed)
    }
}

/// Replays a fixed rate sequence; asking for frames past its end is an error.
#[derive(Debug, Clone)]
pub struct ReplayService(pub Vec<f64>);

impl ServiceProcess for ReplayService {
    fn fill(&self, chunk: usize, out: &mut [f64]) -> Result<()> {
        let start = chunk * CHUNK;
        let src = self
            .0
            .get(start..start + out.len())
            .ok_or_else(|| Error::Queue(format!("replay holds only {} frames", self.0.len())))?;
        out.copy_from_slice(src);
        Ok(())
    }
}

/// I.i.d. rates from a user-supplied sampler, one substream per chunk.
pub struct FnService<F> {
    pub sample: F,
    pub seed: StreamSeed,
}

impl<F> ServiceProcess for FnService<F>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    fn fill(&self, chunk: usize, out: &mut [f64]) -> Result<()> {
        let mut rng = self.seed.chunk(Purpose::QueueService, chunk);
        for r in out {
            *r = (self.sample)(&mut rng);
        }
        Ok(())
    }

    fn seed(&self) -> Option<StreamSeed> {
        Some(self.seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueTrace {
    /// Bits arriving per frame.
    pub arrival: f64,
    /// Backlog at frame boundaries, `queue[0] = 0`, length `frames + 1`.
    pub queue: Vec<f64>,
    /// Delay in frames of the bits arriving in each frame, or [`CENSORED`].
    pub delays: Vec<u32>,
    pub frames: usize,
    pub seed: Option<StreamSeed>,
    /// Sum of offered service over the trace.
    pub offered: f64,
    /// Bits that actually left the buffer.
    pub departed: f64,
    /// Arrival rate is not below the empirical mean service rate.
    pub unstable: bool,
}

impl QueueTrace {
    pub fn final_backlog(&self) -> f64 {
        *self.queue.last().unwrap_or(&0.0)
    }

    pub fn arrived(&self) -> f64 {
        self.arrival * self.frames as f64
    }

    pub fn mean_service(&self) -> f64 {
        self.offered / self.frames as f64
    }

    /// Fraction of frames ending with a nonempty buffer.
    pub fn busy_fraction(&self) -> f64 {
        self.queue[1..].iter().filter(|&&q| q > 0.0).count() as f64 / self.frames as f64
    }

    pub fn censored(&self) -> usize {
        self.delays.iter().filter(|&&d| d == CENSORED).count()
    }

    /// `frame,queue_bits,delay_frames`; censored delays are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Io(e.into());
        out.write_record(["frame", "queue_bits", "delay_frames"]).map_err(io)?;
        for l in 0..self.frames {
            let d = match self.delays[l] {
                CENSORED => String::new(),
                d => d.to_string(),
            };
            out.write_record([l.to_string(), self.queue[l + 1].to_string(), d])
                .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

/// Runs the Lindley recursion for `frames` frames.
pub fn simulate_queue<S: ServiceProcess + ?Sized>(a: f64, service: &S, frames: usize) -> Result<QueueTrace> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::invalid("queue.arrival", format!("must be nonnegative, got {a}")));
    }
    if frames == 0 {
        return Err(Error::invalid("queue.frames", "must be positive"));
    }
    if frames >= CENSORED as usize {
        return Err(Error::Queue(format!("{frames} frames overflow the delay counters")));
    }
    let mut queue = Vec::with_capacity(frames + 1);
    queue.push(0.0);
    let mut q = 0.0f64;
    let mut offered = 0.0;
    let mut departed = 0.0;
    let mut rates = vec![0.0; BATCH.min(frames)];
    let mut start = 0;
    while start < frames {
        let len = BATCH.min(frames - start);
        let first_chunk = start / CHUNK;
        rates[..len]
            .par_chunks_mut(CHUNK)
            .enumerate()
            .try_for_each(|(i, c)| service.fill(first_chunk + i, c))?;
        for &r in &rates[..len] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Queue(format!("service produced an invalid rate {r}")));
            }
            let backlog = q + a;
            let served = backlog.min(r);
            offered += r;
            departed += served;
            q = (backlog - r).max(0.0);
            queue.push(q);
        }
        start += len;
    }
    let delays = fcfs_delays(&queue, a);
    Ok(QueueTrace {
        arrival: a,
        unstable: a > 0.0 && a >= offered / frames as f64,
        queue,
        delays,
        frames,
        seed: service.seed(),
        offered,
        departed,
    })
}

/// Delay of the bits arriving in frame `l`: the smallest `m - l`, `m ≥ l`,
/// with `Q_{m+1} ≤ (m - l) a`, i.e. everything queued up to and including
/// frame `l` has left by the end of frame `m`. The minimizing `m` is
/// nondecreasing in `l`, so one forward pass suffices.
fn fcfs_delays(queue: &[f64], a: f64) -> Vec<u32> {
    let frames = queue.len() - 1;
    let mut delays = vec![CENSORED; frames];
    let mut m = 0usize;
    for (l, d) in delays.iter_mut().enumerate() {
        m = m.max(l);
        while m < frames {
            let later = (m - l) as f64 * a;
            if queue[m + 1] <= later + 1e-9 * later.max(1.0) {
                break;
            }
            m += 1;
        }
        if m == frames {
            break;
        }
        *d = (m - l) as u32;
    }
    delays
}

/// Quantile window of the tail fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailWindow {
    pub lo_quantile: f64,
    pub hi_quantile: f64,
    /// Fit the backlog distribution conditioned on a nonempty buffer.
    pub busy_only: bool,
    pub points: usize,
}

impl Default for TailWindow {
    fn default() -> Self {
        Self {
            lo_quantile: 0.90,
            hi_quantile: 0.999,
            busy_only: false,
            points: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailFit {
    /// Estimated decay rate of `Pr{Q ≥ q}`, 1/bit.
    pub theta_hat: f64,
    pub q_lo: f64,
    pub q_hi: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
}

/// Least-squares slope of `ln Pr{Q ≥ q}` over the default window.
pub fn fit_tail_exponent(trace: &QueueTrace) -> Result<TailFit> {
    fit_tail_exponent_with(trace, TailWindow::default())
}

pub fn fit_tail_exponent_with(trace: &QueueTrace, window: TailWindow) -> Result<TailFit> {
    let TailWindow {
        lo_quantile,
        hi_quantile,
        busy_only,
        points,
    } = window;
    if !(0.0 <= lo_quantile && lo_quantile < hi_quantile && hi_quantile < 1.0) || points < 3 {
        return Err(Error::invalid("queue.tail_window", "need 0 <= lo < hi < 1 and 3+ points"));
    }
    let mut qs: Vec<f64> = trace.queue[1..]
        .iter()
        .copied()
        .filter(|&q| !busy_only || q > 0.0)
        .collect();
    if qs.len() < 100 {
        return Err(Error::InsufficientTail(format!(
            "only {} backlog samples (busy fraction {:.3e})",
            qs.len(),
            trace.busy_fraction()
        )));
    }
    qs.par_sort_unstable_by(f64::total_cmp);
    let n = qs.len();
    let quantile = |p: f64| qs[((p * n as f64) as usize).min(n - 1)];
    let (q_lo, q_hi) = (quantile(lo_quantile), quantile(hi_quantile));
    if q_lo <= 0.0 || q_hi <= q_lo {
        return Err(Error::InsufficientTail(format!(
            "quantile window [{q_lo:.4e}, {q_hi:.4e}] bits is degenerate; \
             busy fraction {:.3e} over {} frames",
            trace.busy_fraction(),
            trace.frames
        )));
    }
    let (mut xs, mut ys) = (Vec::with_capacity(points), Vec::with_capacity(points));
    for j in 0..points {
        let q = q_lo + (q_hi - q_lo) * j as f64 / (points - 1) as f64;
        let above = n - qs.partition_point(|&x| x < q);
        xs.push(q);
        ys.push((above as f64 / n as f64).ln());
    }
    let mx = xs.iter().sum::<f64>() / points as f64;
    let my = ys.iter().sum::<f64>() / points as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    Ok(TailFit {
        theta_hat: -slope,
        q_lo,
        q_hi,
        r_squared: if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 },
    })
}

/// Observed `Pr{D > d}` over uncensored arrivals with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
    pub exceeded: u64,
    pub total: u64,
}

pub fn empirical_delay_violation(trace: &QueueTrace, d: f64) -> Violation {
    let (mut exceeded, mut total) = (0u64, 0u64);
    for &x in &trace.delays {
        if x != CENSORED {
            total += 1;
            if x as f64 > d {
                exceeded += 1;
            }
        }
    }
    let (lower, upper) = wilson_interval(exceeded, total, 1.959_963_984_540_054);
    Violation {
        probability: if total == 0 { 0.0 } else { exceeded as f64 / total as f64 },
        lower,
        upper,
        exceeded,
        total,
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    ((center - half).max(0.0), (center + half).min(1.0))
}
