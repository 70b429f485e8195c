//! Recorded missions from delimited text.
//!
//! A mission is two tables, IMU and DVL, each with a header row. A TOML
//! schema names the columns and their unit scales:
//!
//! ```toml
//! pitch_deg = 20.0
//!
//! [imu]
//! file = "imu.csv"
//! time = "time"
//! specific_force = ["fx", "fy", "fz"]
//! angular_rate = ["wx", "wy", "wz"]
//! gyro_scale = 0.017453292519943295   # deg/s -> rad/s
//!
//! [dvl]
//! file = "dvl.csv"
//! time = "time"
//! beams = ["b1", "b2", "b3", "b4"]
//! truth = ["vx", "vy", "vz"]
//! ```
//!
//! Either `beams` or `truth` may be omitted: missing beams are projected
//! from the truth, missing truth is the least-squares solution of the beams.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{DvlEpoch, ImuRecord, Mission, DVL_RATE_HZ, IMU_RATE_HZ};
use crate::error::{Error, Result};
use crate::estimator::LsEstimator;
use crate::geometry::{build_transform, BeamGeometry, BodyVelocity};
use crate::scalar::Real;

/// Largest accepted relative deviation of a table's mean sample rate.
pub const RATE_TOLERANCE: f64 = 0.05;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImuColumns {
    pub file: PathBuf,
    pub time: String,
    pub specific_force: [String; 3],
    pub angular_rate: [String; 3],
    /// Multiplier taking the time column to seconds.
    #[serde(default = "one")]
    pub time_scale: f64,
    /// Multiplier taking specific force to m/s².
    #[serde(default = "one")]
    pub accel_scale: f64,
    /// Multiplier taking angular rate to rad/s.
    #[serde(default = "one")]
    pub gyro_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DvlColumns {
    pub file: PathBuf,
    pub time: String,
    #[serde(default)]
    pub beams: Option<[String; 4]>,
    #[serde(default)]
    pub truth: Option<[String; 3]>,
    #[serde(default = "one")]
    pub time_scale: f64,
    /// Multiplier taking beam and truth velocities to m/s.
    #[serde(default = "one")]
    pub velocity_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    pub pitch_deg: f64,
    /// Field separator; detected from the header row when absent.
    #[serde(default)]
    pub delimiter: Option<char>,
    pub imu: ImuColumns,
    pub dvl: DvlColumns,
}

impl ColumnSchema {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("column schema: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

struct Table {
    name: String,
    index: HashMap<String, usize>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    fn read(path: &Path, delimiter: Option<char>) -> Result<Self> {
        let name = path.display().to_string();
        let text = std::fs::read_to_string(path)?;
        let header = text.lines().next().filter(|l| !l.trim().is_empty());
        let Some(header) = header else {
            return Err(Error::Data(format!("{name}: empty file")));
        };
        let delim = delimiter.unwrap_or(if header.contains('\t') { '\t' } else { ',' });
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delim as u8)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let index = reader
            .headers()
            .map_err(|e| Error::Data(format!("{name}: {e}")))?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        let mut rows = Vec::new();
        for (n, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| Error::Data(format!("{name}: {e}")))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Data(format!("{name}: row {}: `{f}` is not a number", n + 2)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Data(format!("{name}: no data rows")));
        }
        Ok(Self { name, index, rows })
    }

    fn column(&self, col: &str, scale: f64) -> Result<Vec<f64>> {
        let &i = self
            .index
            .get(col)
            .ok_or_else(|| Error::Data(format!("{}: missing column `{col}`", self.name)))?;
        Ok(self.rows.iter().map(|r| r[i] * scale).collect())
    }

    fn columns<const N: usize>(&self, cols: &[String; N], scale: f64) -> Result<[Vec<f64>; N]> {
        let v = cols.iter().map(|c| self.column(c, scale)).collect::<Result<Vec<_>>>()?;
        Ok(v.try_into().expect("length N"))
    }
}

fn check_time(name: &str, t: &[f64], nominal_hz: f64) -> Result<()> {
    if let Some(w) = t.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Data(format!("{name}: time not strictly increasing at {}", w[1])));
    }
    if t.len() >= 2 {
        let rate = (t.len() - 1) as f64 / (t[t.len() - 1] - t[0]);
        if ((rate - nominal_hz) / nominal_hz).abs() > RATE_TOLERANCE {
            return Err(Error::Data(format!(
                "{name}: mean rate {rate:.3} Hz deviates more than {}% from {nominal_hz} Hz",
                RATE_TOLERANCE * 100.0
            )));
        }
    }
    Ok(())
}

/// Reads a mission; table paths in the schema are relative to `dir`.
/// Loaded beams are stored as both clean and corrupted beams until an
/// error model is applied.
pub fn load_mission<T: Real>(dir: &Path, id: u64, schema: &ColumnSchema) -> Result<Mission<T>> {
    let geometry = BeamGeometry::<T>::janus(T::lit(schema.pitch_deg))?;
    let h = build_transform(&geometry);

    let it = Table::read(&dir.join(&schema.imu.file), schema.delimiter)?;
    let imu_t = it.column(&schema.imu.time, schema.imu.time_scale)?;
    let f = it.columns(&schema.imu.specific_force, schema.imu.accel_scale)?;
    let w = it.columns(&schema.imu.angular_rate, schema.imu.gyro_scale)?;
    check_time(&it.name, &imu_t, IMU_RATE_HZ)?;

    let dt = Table::read(&dir.join(&schema.dvl.file), schema.delimiter)?;
    let dvl_t = dt.column(&schema.dvl.time, schema.dvl.time_scale)?;
    check_time(&dt.name, &dvl_t, DVL_RATE_HZ)?;
    let scale = schema.dvl.velocity_scale;
    let beams = schema.dvl.beams.as_ref().map(|c| dt.columns(c, scale)).transpose()?;
    let truth = schema.dvl.truth.as_ref().map(|c| dt.columns(c, scale)).transpose()?;

    let imu = imu_t
        .iter()
        .enumerate()
        .map(|(i, &t)| ImuRecord {
            t,
            specific_force: std::array::from_fn(|a| T::lit(f[a][i])),
            angular_rate: std::array::from_fn(|a| T::lit(w[a][i])),
        })
        .collect();

    if beams.is_none() && truth.is_none() {
        return Err(Error::Config("column schema: dvl needs `beams`, `truth` or both".into()));
    }
    let ls = LsEstimator::new(h)?;
    let dvl = dvl_t
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (b, v) = match (&beams, &truth) {
                (Some(b), Some(v)) => (b.each_ref().map(|c| T::lit(c[k])), v.each_ref().map(|c| T::lit(c[k]))),
                (Some(b), None) => {
                    let b = b.each_ref().map(|c| T::lit(c[k]));
                    (b, ls.estimate_beams(&b).0)
                }
                (None, Some(v)) => {
                    let v = v.each_ref().map(|c| T::lit(c[k]));
                    (h.apply(&v), v)
                }
                (None, None) => unreachable!(),
            };
            DvlEpoch { t, clean_beams: b, corrupted_beams: b, truth_velocity: BodyVelocity(v) }
        })
        .collect();

    let duration = imu_t[imu_t.len() - 1] - imu_t[0] + 1.0 / IMU_RATE_HZ;
    let mission = Mission { id, pitch_deg: schema.pitch_deg, imu, dvl, duration, corruption: None };
    mission.validate()?;
    Ok(mission)
}
