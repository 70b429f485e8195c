//! Canonical mission container.
//!
//! Line-oriented UTF-8 text:
//!
//! ```text
//! dvlnet-mission 1
//! id 7
//! pitch_deg 30
//! duration 400
//! corruption bias=0.001,0.001,0.001,0.001 noise_std=0.15 seed=1
//! columns imu t fx fy fz wx wy wz
//! columns dvl t clean1..4 corrupted1..4 vx vy vz
//! imu 40000
//! <t> <fx> ... <wz>
//! dvl 400
//! <t> <clean1> ... <vz>
//! sha256 <hex digest of every preceding byte>
//! ```
//!
//! Numbers use the shortest decimal form that parses back to the same
//! `f64`, so a write/read cycle is bit-exact. `corruption none` marks a
//! mission whose corrupted beams equal the clean ones.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dataset::{DvlEpoch, ImuRecord, Mission};
use crate::error::{Error, Result};
use crate::geometry::{BodyVelocity, ErrorModelConfig};
use crate::scalar::Real;

pub const MAGIC: &str = "dvlnet-mission";
pub const FORMAT_VERSION: u32 = 1;
const IMU_COLUMNS: &str = "t fx fy fz wx wy wz";
const DVL_COLUMNS: &str = "t clean1 clean2 clean3 clean4 corrupted1 corrupted2 corrupted3 corrupted4 vx vy vz";

fn push_row<T: Real>(out: &mut String, t: f64, values: impl IntoIterator<Item = T>) {
    write!(out, "{t:?}").unwrap();
    for v in values {
        write!(out, " {:?}", v.as_f64()).unwrap();
    }
    out.push('\n');
}

pub fn to_canonical<T: Real>(m: &Mission<T>) -> String {
    let mut s = String::new();
    writeln!(s, "{MAGIC} {FORMAT_VERSION}").unwrap();
    writeln!(s, "id {}", m.id).unwrap();
    writeln!(s, "pitch_deg {:?}", m.pitch_deg).unwrap();
    writeln!(s, "duration {:?}", m.duration).unwrap();
    match &m.corruption {
        None => s.push_str("corruption none\n"),
        Some(c) => {
            let bias: Vec<String> = c.bias.iter().map(|b| format!("{:?}", b.as_f64())).collect();
            writeln!(s, "corruption bias={} noise_std={:?} seed={}", bias.join(","), c.noise_std.as_f64(), c.seed)
                .unwrap();
        }
    }
    writeln!(s, "columns imu {IMU_COLUMNS}").unwrap();
    writeln!(s, "columns dvl {DVL_COLUMNS}").unwrap();
    writeln!(s, "imu {}", m.imu.len()).unwrap();
    for r in &m.imu {
        push_row(&mut s, r.t, r.channels());
    }
    writeln!(s, "dvl {}", m.dvl.len()).unwrap();
    for e in &m.dvl {
        let values = e.clean_beams.into_iter().chain(e.corrupted_beams).chain(e.truth_velocity.0);
        push_row(&mut s, e.t, values);
    }
    let digest = hex::encode(Sha256::digest(s.as_bytes()));
    writeln!(s, "sha256 {digest}").unwrap();
    s
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Data(format!("canonical mission: {}", msg.into()))
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.iter.next().map(|(i, l)| (i + 1, l)).ok_or_else(|| bad("unexpected end of file"))
    }

    fn keyed(&mut self, key: &str) -> Result<&'a str> {
        let (n, line) = self.next()?;
        line.strip_prefix(key)
            .and_then(|r| r.strip_prefix(' '))
            .ok_or_else(|| bad(format!("line {n}: expected `{key}`")))
    }
}

fn num<N: std::str::FromStr>(s: &str, what: &str) -> Result<N> {
    s.trim().parse().map_err(|_| bad(format!("bad {what} `{s}`")))
}

fn row(line: &str, n: usize, width: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = line
        .split(' ')
        .map(|x| num(x, "number"))
        .collect::<Result<_>>()
        .map_err(|e| bad(format!("line {n}: {e}")))?;
    if v.len() != width {
        return Err(bad(format!("line {n}: {} fields, expected {width}", v.len())));
    }
    Ok(v)
}

fn parse_corruption<T: Real>(s: &str) -> Result<Option<ErrorModelConfig<T>>> {
    if s == "none" {
        return Ok(None);
    }
    let mut bias = None;
    let mut noise_std = None;
    let mut seed = None;
    for part in s.split(' ') {
        match part.split_once('=') {
            Some(("bias", v)) => {
                let b: Vec<f64> = v.split(',').map(|x| num(x, "bias")).collect::<Result<_>>()?;
                let b: [f64; 4] = b.try_into().map_err(|_| bad("bias needs 4 values"))?;
                bias = Some(b.map(T::lit));
            }
            Some(("noise_std", v)) => noise_std = Some(T::lit(num(v, "noise_std")?)),
            Some(("seed", v)) => seed = Some(num(v, "seed")?),
            _ => return Err(bad(format!("bad corruption field `{part}`"))),
        }
    }
    match (bias, noise_std, seed) {
        (Some(bias), Some(noise_std), Some(seed)) => Ok(Some(ErrorModelConfig { bias, noise_std, seed })),
        _ => Err(bad("corruption line needs bias, noise_std and seed")),
    }
}

pub fn from_canonical<T: Real>(text: &str) -> Result<Mission<T>> {
    let body_end = text.rfind("sha256 ").ok_or_else(|| bad("missing checksum"))?;
    let (body, trailer) = text.split_at(body_end);
    let claimed = trailer.trim_start_matches("sha256 ").trim_end();
    if hex::encode(Sha256::digest(body.as_bytes())) != claimed {
        return Err(bad("checksum mismatch"));
    }
    let mut lines = Lines { iter: body.lines().enumerate() };
    let (_, head) = lines.next()?;
    let version = head
        .strip_prefix(MAGIC)
        .map(|v| num::<u32>(v, "version"))
        .ok_or_else(|| bad("not a mission file"))??;
    if version != FORMAT_VERSION {
        return Err(bad(format!("unsupported version {version}")));
    }
    let id = num(lines.keyed("id")?, "id")?;
    let pitch_deg = num(lines.keyed("pitch_deg")?, "pitch")?;
    let duration = num(lines.keyed("duration")?, "duration")?;
    let corruption = parse_corruption(lines.keyed("corruption")?)?;
    if lines.keyed("columns imu")? != IMU_COLUMNS || lines.keyed("columns dvl")? != DVL_COLUMNS {
        return Err(bad("unexpected column layout"));
    }
    let n_imu: usize = num(lines.keyed("imu")?, "imu count")?;
    let mut imu = Vec::with_capacity(n_imu);
    for _ in 0..n_imu {
        let (n, line) = lines.next()?;
        let v = row(line, n, 7)?;
        imu.push(ImuRecord {
            t: v[0],
            specific_force: [v[1], v[2], v[3]].map(T::lit),
            angular_rate: [v[4], v[5], v[6]].map(T::lit),
        });
    }
    let n_dvl: usize = num(lines.keyed("dvl")?, "dvl count")?;
    let mut dvl = Vec::with_capacity(n_dvl);
    for _ in 0..n_dvl {
        let (n, line) = lines.next()?;
        let v = row(line, n, 12)?;
        let at = |i: usize| T::lit(v[i]);
        dvl.push(DvlEpoch {
            t: v[0],
            clean_beams: [at(1), at(2), at(3), at(4)],
            corrupted_beams: [at(5), at(6), at(7), at(8)],
            truth_velocity: BodyVelocity([at(9), at(10), at(11)]),
        });
    }
    if lines.iter.next().is_some() {
        return Err(bad("trailing data before checksum"));
    }
    let m = Mission { id, pitch_deg, imu, dvl, duration, corruption };
    m.validate()?;
    Ok(m)
}

pub fn save_mission<T: Real>(m: &Mission<T>, path: &Path) -> Result<()> {
    fs::write(path, to_canonical(m))?;
    Ok(())
}

pub fn read_mission<T: Real>(path: &Path) -> Result<Mission<T>> {
    from_canonical(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::synth::{desk_missions, synthesize_mission, ImuNoise};

    fn sample() -> Mission<f64> {
        let cfg = desk_missions(2, 12.0, 30.0, ErrorModelConfig::field_trial(3), ImuNoise::default(), 5);
        synthesize_mission(&cfg[1]).unwrap()
    }

    #[test]
    fn bit_exact_round_trip() {
        let m = sample();
        let text = to_canonical(&m);
        let back: Mission<f64> = from_canonical(&text).unwrap();
        assert_eq!(back, m);
        for (a, b) in back.dvl.iter().zip(&m.dvl) {
            for (x, y) in a.corrupted_beams.iter().zip(&b.corrupted_beams) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(to_canonical(&back), text);
    }

    #[test]
    fn f32_round_trip() {
        let cfg = desk_missions(1, 6.0, 25.0, ErrorModelConfig::field_trial(3), ImuNoise::default(), 5);
        let m: Mission<f32> = synthesize_mission(&cfg[0]).unwrap();
        assert_eq!(from_canonical::<f32>(&to_canonical(&m)).unwrap(), m);
    }

    #[test]
    fn tamper_detected() {
        let text = to_canonical(&sample()).replacen("dvl 12\n0.0 ", "dvl 12\n0.5 ", 1);
        assert!(from_canonical::<f64>(&text).unwrap_err().to_string().contains("checksum"));
    }

    #[test]
    fn uncorrupted_mission() {
        let mut m = sample();
        m.corruption = None;
        assert_eq!(from_canonical::<f64>(&to_canonical(&m)).unwrap().corruption, None);
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mission");
        let m = sample();
        save_mission(&m, &path).unwrap();
        assert_eq!(read_mission::<f64>(&path).unwrap(), m);
    }
}
