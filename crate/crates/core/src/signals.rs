//! Continuous test signals, uniform grids and random sample instants.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Trig,
    #[serde(rename = "gauspuls")]
    GaussPulse,
    Square,
}

impl SignalKind {
    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Trig => "trig",
            SignalKind::GaussPulse => "gauspuls",
            SignalKind::Square => "square",
        }
    }
}

impl std::fmt::Display for SignalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Waveform {
    Sin,
    Cos,
}

/// One `amplitude * sin|cos(2π f t)` term of a trigonometric signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigComponent {
    pub amplitude: f64,
    pub frequency: f64,
    pub waveform: Waveform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigParams {
    pub components: Vec<TrigComponent>,
}

impl Default for TrigParams {
    /// `0.3 sin(2π·50t) + 0.6 cos(2π·100t) + 0.1 sin(2π·200t) + 0.9 cos(2π·400t)`.
    fn default() -> Self {
        let c = |amplitude, frequency, waveform| TrigComponent {
            amplitude,
            frequency,
            waveform,
        };
        Self {
            components: vec![
                c(0.3, 50.0, Waveform::Sin),
                c(0.6, 100.0, Waveform::Cos),
                c(0.1, 200.0, Waveform::Sin),
                c(0.9, 400.0, Waveform::Cos),
            ],
        }
    }
}

impl TrigParams {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(invalid("trigonometric signal needs at least one component"));
        }
        for c in &self.components {
            if !(c.frequency > 0.0 && c.frequency.is_finite()) {
                return Err(invalid(format!(
                    "frequency must be > 0, got {}",
                    c.frequency
                )));
            }
            if !c.amplitude.is_finite() {
                return Err(invalid("amplitude must be finite"));
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let phase = 2.0 * PI * c.frequency * t;
                match c.waveform {
                    Waveform::Sin => c.amplitude * phase.sin(),
                    Waveform::Cos => c.amplitude * phase.cos(),
                }
            })
            .sum()
    }
}

/// Evaluates the default four-tone trigonometric signal.
pub fn eval_trig(t: f64) -> f64 {
    TrigParams::default().eval(t)
}

/// Gaussian-modulated cosine pulse parameters.
///
/// `bandwidth` is the fractional bandwidth measured at `bandwidth_ref_db`
/// below the spectral peak; `truncation_db` sets where the time envelope is
/// cut off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussPulseParams {
    pub center_freq: f64,
    pub bandwidth: f64,
    pub bandwidth_ref_db: f64,
    pub truncation_db: f64,
}

impl Default for GaussPulseParams {
    fn default() -> Self {
        Self {
            center_freq: 50e3,
            bandwidth: 0.6,
            bandwidth_ref_db: -6.0,
            truncation_db: -60.0,
        }
    }
}

impl GaussPulseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.center_freq > 0.0 && self.center_freq.is_finite()) {
            return Err(invalid(format!(
                "center frequency must be > 0, got {}",
                self.center_freq
            )));
        }
        if !(self.bandwidth > 0.0 && self.bandwidth < 2.0) {
            return Err(invalid(format!(
                "fractional bandwidth must lie in (0, 2), got {}",
                self.bandwidth
            )));
        }
        if self.bandwidth_ref_db.is_nan() || self.bandwidth_ref_db >= 0.0 {
            return Err(invalid("bandwidth reference level must be negative dB"));
        }
        if self.truncation_db.is_nan() || self.truncation_db >= 0.0 {
            return Err(invalid("truncation level must be negative dB"));
        }
        Ok(())
    }

    /// Time-domain variance `t_v` of the envelope `exp(-t² / (2 t_v))`.
    pub fn time_variance(&self) -> f64 {
        let r = 10f64.powf(self.bandwidth_ref_db / 20.0);
        -2.0 * r.ln() / (PI * PI * self.bandwidth.powi(2) * self.center_freq.powi(2))
    }

    /// Time at which the envelope has decayed to `truncation_db`.
    pub fn cutoff(&self) -> f64 {
        let level = 10f64.powf(self.truncation_db / 20.0);
        (-2.0 * self.time_variance() * level.ln()).sqrt()
    }

    /// Number of points in the grid `-cutoff, -cutoff + T, ...` that stays
    /// within `[-cutoff, cutoff]`.
    pub fn grid_len(&self, interval: f64) -> usize {
        (2.0 * self.cutoff() / interval).floor() as usize + 1
    }

    pub fn envelope(&self, t: f64) -> f64 {
        (-t * t / (2.0 * self.time_variance())).exp()
    }

    fn eval_unchecked(&self, t: f64) -> f64 {
        self.envelope(t) * (2.0 * PI * self.center_freq * t).cos()
    }
}

pub fn eval_gauspuls(t: f64, params: &GaussPulseParams) -> Result<f64> {
    params.validate()?;
    Ok(params.eval_unchecked(t))
}

/// Bipolar square wave. Each period starts with a `+amplitude` segment of
/// length `duty * period`; transition instants belong to the segment they
/// start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareParams {
    pub period: f64,
    pub duty: f64,
    pub amplitude: f64,
}

impl SquareParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(invalid(format!("period must be > 0, got {}", self.period)));
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return Err(invalid(format!(
                "duty ratio must lie in (0, 1), got {}",
                self.duty
            )));
        }
        Ok(())
    }
}

pub fn eval_square(t: f64, params: &SquareParams) -> f64 {
    let q = t / params.period;
    let phase = q - q.floor();
    if phase < params.duty {
        params.amplitude
    } else {
        -params.amplitude
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Trig(TrigParams),
    GaussPulse(GaussPulseParams),
    Square(SquareParams),
}

/// A validated continuous-time test signal `x_c(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousSignal {
    shape: Shape,
}

impl ContinuousSignal {
    pub fn trig(params: TrigParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            shape: Shape::Trig(params),
        })
    }

    pub fn gauss_pulse(params: GaussPulseParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            shape: Shape::GaussPulse(params),
        })
    }

    pub fn square(params: SquareParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            shape: Shape::Square(params),
        })
    }

    pub fn kind(&self) -> SignalKind {
        match self.shape {
            Shape::Trig(_) => SignalKind::Trig,
            Shape::GaussPulse(_) => SignalKind::GaussPulse,
            Shape::Square(_) => SignalKind::Square,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.shape {
            Shape::Trig(p) => p.eval(t),
            Shape::GaussPulse(p) => p.eval_unchecked(t),
            Shape::Square(p) => eval_square(t, p),
        }
    }
}

/// A uniform time grid of `len` points starting at `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub origin: f64,
    pub interval: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(origin: f64, interval: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(invalid(format!("grid needs at least 2 points, got {len}")));
        }
        if !(interval > 0.0 && interval.is_finite()) {
            return Err(invalid(format!(
                "sampling interval must be > 0, got {interval}"
            )));
        }
        if !origin.is_finite() {
            return Err(invalid("grid origin must be finite"));
        }
        Ok(Self {
            origin,
            interval,
            len,
        })
    }

    #[inline]
    pub fn time(&self, n: usize) -> f64 {
        self.origin + n as f64 * self.interval
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|n| self.time(n)).collect()
    }

    /// Length of the window `[origin, origin + len * interval)` covered by the grid.
    pub fn duration(&self) -> f64 {
        self.len as f64 * self.interval
    }
}

/// Samples of a signal on a uniform grid (the reference `x_d^u`).
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSignal {
    pub values: Vec<f64>,
    pub grid: Grid,
}

impl UniformSignal {
    pub fn new(values: Vec<f64>, grid: Grid) -> Result<Self> {
        if values.len() != grid.len {
            return Err(Error::DimensionMismatch {
                expected: grid.len,
                actual: values.len(),
            });
        }
        Ok(Self { values, grid })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn uniform_samples(
    signal: &ContinuousSignal,
    len: usize,
    interval: f64,
    origin: f64,
) -> Result<UniformSignal> {
    let grid = Grid::new(origin, interval, len)?;
    Ok(sample_grid(signal, &grid))
}

pub fn sample_grid(signal: &ContinuousSignal, grid: &Grid) -> UniformSignal {
    UniformSignal {
        values: (0..grid.len).map(|n| signal.eval(grid.time(n))).collect(),
        grid: *grid,
    }
}

/// Sample instants inside the window `[origin, origin + duration)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTimes {
    pub times: Vec<f64>,
    pub origin: f64,
    pub duration: f64,
    /// Seed the instants were drawn with, if they were drawn at random.
    pub seed: Option<u64>,
}

impl SampleTimes {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn check_order(&self) -> Result<()> {
        check_strictly_increasing(&self.times)
    }
}

pub(crate) fn check_strictly_increasing(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Ordering {
                index: i + 1,
                prev: w[0],
                next: w[1],
            });
        }
    }
    Ok(())
}

/// Draws `count` i.i.d. uniform instants on `[origin, origin + duration)` and
/// sorts them. If sorting exposes a tie the whole set is redrawn from the
/// continuing stream, so the result is strictly increasing.
pub fn draw_random_times(
    count: usize,
    duration: f64,
    origin: f64,
    seed: u64,
) -> Result<SampleTimes> {
    if count == 0 {
        return Err(invalid("number of random samples must be >= 1"));
    }
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(invalid(format!("duration must be > 0, got {duration}")));
    }
    let end = origin + duration;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut times = Vec::with_capacity(count);
    loop {
        times.clear();
        while times.len() < count {
            let t = origin + duration * rng.random::<f64>();
            // rounding can land exactly on the open end of the window
            if t < end {
                times.push(t);
            }
        }
        times.sort_by(f64::total_cmp);
        if check_strictly_increasing(&times).is_ok() {
            break;
        }
    }
    Ok(SampleTimes {
        times,
        origin,
        duration,
        seed: Some(seed),
    })
}

/// Random measurements `x_d^r[m] = x_c(t_m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSampleSet {
    pub times: SampleTimes,
    pub values: Vec<f64>,
}

pub fn sample_at(signal: &ContinuousSignal, times: &SampleTimes) -> Result<RandomSampleSet> {
    times.check_order()?;
    Ok(RandomSampleSet {
        values: times.times.iter().map(|&t| signal.eval(t)).collect(),
        times: times.clone(),
    })
}
