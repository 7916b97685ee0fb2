//! Experiment records, their on-disk format, and conversion into growth samples.
//!
//! A run file is a block of `key=value` header lines followed by CSV:
//!
//! ```text
//! id=1
//! avg_red_ppfd_on=166
//! avg_blue_ppfd_on=18
//! on_hours=18
//! off_hours=6
//! phase_hours=0
//! timestamp,red_ppfd,blue_ppfd,ec,ph,temp_c,humidity_pct,leaf_areas
//! 2024-01-01T00:00:00,166,18,1800,6.5,25,60,5.1;4.9
//! ```

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{GrowthFeatures, GrowthRate, GrowthSample};
use crate::scalar::Scalar;

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S%.f";
const COLUMNS: &str = "timestamp,red_ppfd,blue_ppfd,ec,ph,temp_c,humidity_pct,leaf_areas";
pub const TRAIN_RUNS: [u8; 3] = [1, 2, 4];
pub const TEST_RUN: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorRecord {
    pub timestamp: NaiveDateTime,
    pub red_ppfd: f64,
    pub blue_ppfd: f64,
    /// µS/cm
    pub ec: f64,
    pub ph: f64,
    pub temp_c: f64,
    pub humidity_pct: f64,
    /// Per-plant leaf area, cm².
    pub leaf_areas: Vec<f64>,
}

impl SensorRecord {
    pub fn validate(&self) -> Result<()> {
        if !(self.red_ppfd >= 0.0 && self.blue_ppfd >= 0.0) || !self.red_ppfd.is_finite() || !self.blue_ppfd.is_finite()
        {
            return Err(Error::Validation(format!("{}: PPFD must be finite and >= 0", self.timestamp)));
        }
        if self.leaf_areas.is_empty() {
            return Err(Error::Validation(format!("{}: at least one leaf area is required", self.timestamp)));
        }
        if self.leaf_areas.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::Validation(format!("{}: leaf areas must be finite and >= 0", self.timestamp)));
        }
        if [self.ec, self.ph, self.temp_c, self.humidity_pct].iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("{}: sensor values must be finite", self.timestamp)));
        }
        Ok(())
    }

    pub fn mean_leaf_area(&self) -> f64 {
        self.leaf_areas.iter().sum::<f64>() / self.leaf_areas.len() as f64
    }
}

/// Lights on for `on_hours`, then off for `off_hours`, repeating from `phase_hours` past
/// midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DutyCycle {
    pub on_hours: u32,
    pub off_hours: u32,
    pub phase_hours: u32,
}

impl DutyCycle {
    pub fn validate(&self) -> Result<()> {
        let period = self.on_hours + self.off_hours;
        if period == 0 || 24 % period != 0 {
            return Err(Error::Validation(format!("duty period {period} h must divide 24")));
        }
        if self.phase_hours >= 24 {
            return Err(Error::Validation(format!("duty phase {} must be < 24", self.phase_hours)));
        }
        Ok(())
    }

    pub fn is_on(&self, hour_of_day: u32) -> bool {
        let period = self.on_hours + self.off_hours;
        (hour_of_day % 24 + 24 - self.phase_hours) % period < self.on_hours
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub id: u8,
    pub avg_red_ppfd_on: f64,
    pub avg_blue_ppfd_on: f64,
    pub duty: DutyCycle,
    pub records: Vec<SensorRecord>,
}

impl ExperimentRun {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.id) {
            return Err(Error::Validation(format!("run id must be 1-4, got {}", self.id)));
        }
        if !(self.avg_red_ppfd_on >= 0.0 && self.avg_blue_ppfd_on >= 0.0) {
            return Err(Error::Validation("run PPFD settings must be >= 0".into()));
        }
        self.duty.validate()?;
        for r in &self.records {
            r.validate()?;
        }
        if let Some(w) = self.records.windows(2).find(|w| w[1].timestamp <= w[0].timestamp) {
            return Err(Error::Validation(format!(
                "run {}: timestamps must strictly increase ({} then {})",
                self.id, w[0].timestamp, w[1].timestamp
            )));
        }
        Ok(())
    }
}

fn preset(id: u8, red: f64, blue: f64, on: u32, off: u32) -> ExperimentRun {
    ExperimentRun {
        id,
        avg_red_ppfd_on: red,
        avg_blue_ppfd_on: blue,
        duty: DutyCycle { on_hours: on, off_hours: off, phase_hours: 0 },
        records: Vec::new(),
    }
}

/// Light settings of the four reference experiments, without records.
pub fn preset_runs() -> [ExperimentRun; 4] {
    [
        preset(1, 166.0, 18.0, 18, 6),
        preset(2, 144.0, 54.0, 18, 6),
        preset(3, 160.0, 54.0, 9, 3),
        preset(4, 87.0, 37.0, 13, 11),
    ]
}

fn parse_f64(field: &str, name: &str, line: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|e| Error::Parse { line, message: format!("{name}: {e} ({field:?})") })
}

pub fn read_run<R: BufRead>(mut reader: R) -> Result<ExperimentRun> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let lines: Vec<&str> = text.lines().collect();

    let (mut id, mut red, mut blue, mut on, mut off, mut phase) = (None, None, None, None, None, None);
    let mut i = 0;
    while i < lines.len() && lines[i] != COLUMNS && lines[i].contains('=') {
        let line = i + 1;
        let (key, value) = lines[i].split_once('=').expect("checked above");
        let bad = |e: String| Error::Parse { line, message: format!("{key}: {e}") };
        match key.trim() {
            "id" => id = Some(value.trim().parse::<u8>().map_err(|e| bad(e.to_string()))?),
            "avg_red_ppfd_on" => red = Some(parse_f64(value, key, line)?),
            "avg_blue_ppfd_on" => blue = Some(parse_f64(value, key, line)?),
            "on_hours" => on = Some(value.trim().parse::<u32>().map_err(|e| bad(e.to_string()))?),
            "off_hours" => off = Some(value.trim().parse::<u32>().map_err(|e| bad(e.to_string()))?),
            "phase_hours" => phase = Some(value.trim().parse::<u32>().map_err(|e| bad(e.to_string()))?),
            other => return Err(Error::Parse { line, message: format!("unknown header key {other:?}") }),
        }
        i += 1;
    }
    let header_end = i + 1;
    let missing = |k: &str| Error::Parse { line: header_end, message: format!("missing header key {k}") };
    let mut run = ExperimentRun {
        id: id.ok_or_else(|| missing("id"))?,
        avg_red_ppfd_on: red.ok_or_else(|| missing("avg_red_ppfd_on"))?,
        avg_blue_ppfd_on: blue.ok_or_else(|| missing("avg_blue_ppfd_on"))?,
        duty: DutyCycle {
            on_hours: on.ok_or_else(|| missing("on_hours"))?,
            off_hours: off.ok_or_else(|| missing("off_hours"))?,
            phase_hours: phase.unwrap_or(0),
        },
        records: Vec::new(),
    };

    if i < lines.len() {
        if lines[i] != COLUMNS {
            return Err(Error::Parse { line: i + 1, message: format!("expected column header {COLUMNS:?}") });
        }
        let body = lines[i + 1..].join("\n");
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line() as usize + header_end).unwrap_or(header_end);
                Error::Parse { line, message: e.to_string() }
            })?;
            let line = rec.position().map(|p| p.line() as usize).unwrap_or(0) + header_end;
            if rec.len() != 8 {
                return Err(Error::Parse { line, message: format!("expected 8 fields, found {}", rec.len()) });
            }
            let timestamp = NaiveDateTime::parse_from_str(rec[0].trim(), TIMESTAMP_FORMAT)
                .map_err(|e| Error::Parse { line, message: format!("timestamp: {e} ({:?})", &rec[0]) })?;
            let leaf_areas = rec[7]
                .split(';')
                .filter(|s| !s.trim().is_empty())
                .map(|s| parse_f64(s, "leaf_areas", line))
                .collect::<Result<Vec<_>>>()?;
            let record = SensorRecord {
                timestamp,
                red_ppfd: parse_f64(&rec[1], "red_ppfd", line)?,
                blue_ppfd: parse_f64(&rec[2], "blue_ppfd", line)?,
                ec: parse_f64(&rec[3], "ec", line)?,
                ph: parse_f64(&rec[4], "ph", line)?,
                temp_c: parse_f64(&rec[5], "temp_c", line)?,
                humidity_pct: parse_f64(&rec[6], "humidity_pct", line)?,
                leaf_areas,
            };
            record.validate().map_err(|e| Error::Parse { line, message: e.to_string() })?;
            run.records.push(record);
        }
    }
    run.validate()?;
    Ok(run)
}

pub fn write_run<W: Write>(run: &ExperimentRun, mut w: W) -> Result<()> {
    run.validate()?;
    writeln!(w, "id={}", run.id)?;
    writeln!(w, "avg_red_ppfd_on={}", run.avg_red_ppfd_on)?;
    writeln!(w, "avg_blue_ppfd_on={}", run.avg_blue_ppfd_on)?;
    writeln!(w, "on_hours={}", run.duty.on_hours)?;
    writeln!(w, "off_hours={}", run.duty.off_hours)?;
    writeln!(w, "phase_hours={}", run.duty.phase_hours)?;
    writeln!(w, "{COLUMNS}")?;
    for r in &run.records {
        let areas: Vec<String> = r.leaf_areas.iter().map(|a| a.to_string()).collect();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.timestamp.format(TIMESTAMP_FORMAT),
            r.red_ppfd,
            r.blue_ppfd,
            r.ec,
            r.ph,
            r.temp_c,
            r.humidity_pct,
            areas.join(";")
        )?;
    }
    Ok(())
}

fn read_run_file(path: &Path) -> Result<ExperimentRun> {
    let file = fs::File::open(path)?;
    read_run(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        Error::Validation(m) => Error::Validation(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Loads one run file, or every `*.csv` run file in a directory (sorted by name).
pub fn load_runs(path: impl AsRef<Path>) -> Result<Vec<ExperimentRun>> {
    let path = path.as_ref();
    let runs = if path.is_dir() {
        let mut files: Vec<_> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        files.iter().map(|p| read_run_file(p)).collect::<Result<Vec<_>>>()?
    } else {
        vec![read_run_file(path)?]
    };
    check_unique(&runs)?;
    Ok(runs)
}

/// Writes `run_<id>.csv` per run into `dir`, creating it if needed.
pub fn save_runs(dir: impl AsRef<Path>, runs: &[ExperimentRun]) -> Result<()> {
    check_unique(runs)?;
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for run in runs {
        let file = fs::File::create(dir.join(format!("run_{}.csv", run.id)))?;
        let mut w = std::io::BufWriter::new(file);
        write_run(run, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn check_unique(runs: &[ExperimentRun]) -> Result<()> {
    let mut seen = [false; 256];
    for r in runs {
        if std::mem::replace(&mut seen[r.id as usize], true) {
            return Err(Error::Validation(format!("duplicate run id {}", r.id)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet<T> {
    pub samples: Vec<GrowthSample<T>>,
    /// Windows discarded because the mean leaf area did not increase.
    pub dropped: usize,
}

impl<T> SampleSet<T> {
    pub fn windows(&self) -> usize {
        self.samples.len() + self.dropped
    }
}

fn hours_between(a: NaiveDateTime, b: NaiveDateTime) -> f64 {
    (b - a).num_milliseconds() as f64 / 3_600_000.0
}

/// Cuts the run into consecutive windows of at least `delta_t_hours`.
///
/// Each window starts at a record and ends at the first later record at least
/// `delta_t_hours` after it; the next window starts where the previous ended. Features
/// are means over the records in `[start, end)`, `t` is the start's age in days since the
/// first record, and leaf areas are per-record plant means at both ends.
pub fn build_samples<T: Scalar>(run: &ExperimentRun, delta_t_hours: f64) -> Result<SampleSet<T>> {
    if !(delta_t_hours > 0.0) {
        return Err(Error::Validation(format!("window length must be positive, got {delta_t_hours}")));
    }
    let recs = &run.records;
    if recs.len() < 2 || hours_between(recs[0].timestamp, recs[recs.len() - 1].timestamp) < delta_t_hours {
        return Err(Error::Validation(format!(
            "run {}: need at least 2 records spanning {delta_t_hours} h, have {}",
            run.id,
            recs.len()
        )));
    }
    let origin = recs[0].timestamp;
    let mut out = SampleSet { samples: Vec::new(), dropped: 0 };
    let mut s = 0;
    while let Some(e) =
        (s + 1..recs.len()).find(|&e| hours_between(recs[s].timestamp, recs[e].timestamp) >= delta_t_hours)
    {
        let window = &recs[s..e];
        let n = window.len() as f64;
        let mean = |f: fn(&SensorRecord) -> f64| window.iter().map(f).sum::<f64>() / n;
        let features = GrowthFeatures::new(
            T::lit(mean(|r| r.red_ppfd)),
            T::lit(mean(|r| r.blue_ppfd)),
            T::lit(mean(|r| r.ec)),
            T::lit(mean(|r| r.ph)),
            T::lit(hours_between(origin, recs[s].timestamp) / 24.0),
        );
        let (l1, l2) = (recs[s].mean_leaf_area(), recs[e].mean_leaf_area());
        if l2 > l1 {
            let dt = hours_between(recs[s].timestamp, recs[e].timestamp);
            out.samples.push(GrowthSample::new(features, T::lit(dt), T::lit(l1), T::lit(l2))?);
        } else {
            out.dropped += 1;
        }
        s = e;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainTestSplit<T> {
    pub train: Vec<GrowthSample<T>>,
    pub test: Vec<GrowthSample<T>>,
    pub dropped: usize,
}

/// Runs 1, 2 and 4 train; run 3 tests. Runs with fewer than two records contribute no
/// samples.
pub fn split_train_test<T: Scalar>(runs: &[ExperimentRun], delta_t_hours: f64) -> Result<TrainTestSplit<T>> {
    let find = |id: u8| runs.iter().find(|r| r.id == id).ok_or(Error::MissingRun(id));
    let samples = |run: &ExperimentRun| -> Result<SampleSet<T>> {
        if run.records.len() < 2 {
            log::warn!("run {} has {} records, contributing no samples", run.id, run.records.len());
            return Ok(SampleSet { samples: Vec::new(), dropped: 0 });
        }
        build_samples(run, delta_t_hours)
    };
    let mut split = TrainTestSplit { train: Vec::new(), test: Vec::new(), dropped: 0 };
    for id in TRAIN_RUNS {
        let set = samples(find(id)?)?;
        split.train.extend(set.samples);
        split.dropped += set.dropped;
    }
    let set = samples(find(TEST_RUN)?)?;
    if set.samples.is_empty() {
        log::warn!("test run {TEST_RUN} produced no samples");
    }
    split.test = set.samples;
    split.dropped += set.dropped;
    Ok(split)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticRunConfig {
    pub days: u32,
    pub plants: usize,
    pub initial_leaf_area: f64,
    /// Uniform spread of each plant's starting area around `initial_leaf_area`.
    pub initial_spread: f64,
    pub ec: f64,
    pub ph: f64,
    pub ec_noise: f64,
    pub ph_noise: f64,
    pub start: NaiveDateTime,
    pub seed: u64,
}

impl Default for SyntheticRunConfig {
    fn default() -> Self {
        Self {
            days: 15,
            plants: 4,
            initial_leaf_area: 5.0,
            initial_spread: 0.5,
            ec: 1800.0,
            ph: 6.5,
            ec_noise: 20.0,
            ph_noise: 0.03,
            start: NaiveDate::from_ymd_opt(2024, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap(),
            seed: 0,
        }
    }
}

/// Hourly records for a run's light settings, with leaf areas grown by `model`.
///
/// Each record holds the conditions applied during the following hour and the areas at
/// its start; every plant gains `exp(g)` cm² per hour.
pub fn synthetic_run<M: GrowthRate<f64>>(
    template: &ExperimentRun,
    model: &M,
    config: &SyntheticRunConfig,
) -> Result<ExperimentRun> {
    template.duty.validate()?;
    if config.plants == 0 {
        return Err(Error::Validation("need at least one plant".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ (template.id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut areas: Vec<f64> = (0..config.plants)
        .map(|_| config.initial_leaf_area + config.initial_spread * (2.0 * rng.gen::<f64>() - 1.0))
        .collect();
    let hours = config.days * 24;
    let mut records = Vec::with_capacity(hours as usize + 1);
    for h in 0..=hours {
        let on = template.duty.is_on(h % 24);
        let (red, blue) = if on { (template.avg_red_ppfd_on, template.avg_blue_ppfd_on) } else { (0.0, 0.0) };
        let ec = config.ec + config.ec_noise * (2.0 * rng.gen::<f64>() - 1.0);
        let ph = config.ph + config.ph_noise * (2.0 * rng.gen::<f64>() - 1.0);
        let temp_c = 25.0 + 0.5 * (2.0 * rng.gen::<f64>() - 1.0);
        let humidity_pct = 60.0 + 5.0 * (2.0 * rng.gen::<f64>() - 1.0);
        records.push(SensorRecord {
            timestamp: config.start + Duration::hours(h as i64),
            red_ppfd: red,
            blue_ppfd: blue,
            ec,
            ph,
            temp_c,
            humidity_pct,
            leaf_areas: areas.clone(),
        });
        let gain = model.growth_exponent(&GrowthFeatures::new(red, blue, ec, ph, h as f64 / 24.0)).exp();
        areas.iter_mut().for_each(|a| *a += gain);
    }
    let run = ExperimentRun { records, ..template.clone() };
    run.validate()?;
    Ok(run)
}
