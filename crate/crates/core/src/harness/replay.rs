//! IMU log replay.
//!
//! Log schema: `t,gx,gy,gz,ax,ay,az,mx,my,mz[,qw,qx,qy,qz]` with the gyro in
//! deg/s. The optional truth quaternion uses this crate's convention
//! (`O = I - 2 qw q^x + 2 (q^x)^2` with `q = (qx, qy, qz)`).

use std::io::Read;
use std::path::Path;

use crate::error::HarnessError;
use crate::harness::{run_estimators, step_intervals, RunResult, ScenarioConfig, StepInput};
use crate::sensors::{orientation_from_accel_mag, ImuRecord};
use crate::so3::{quat_to_matrix, UnitQuaternion, Vec3};

pub const LOG_COLUMNS: [&str; 10] = ["t", "gx", "gy", "gz", "ax", "ay", "az", "mx", "my", "mz"];
pub const TRUTH_COLUMNS: [&str; 4] = ["qw", "qx", "qy", "qz"];

/// Gaps longer than this multiple of the median interval are reported.
pub const GAP_FACTOR: f64 = 5.0;

fn malformed(row: usize, reason: impl Into<String>) -> HarnessError {
    HarnessError::MalformedRecord {
        row,
        reason: reason.into(),
    }
}

pub fn read_log_csv(path: &Path) -> Result<Vec<ImuRecord>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_log(file)
}

/// Parses a log. Row numbers in errors count data rows from 1.
pub fn parse_log<R: Read>(reader: R) -> Result<Vec<ImuRecord>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let with_truth = match header.len() {
        10 => false,
        14 => true,
        n => return Err(malformed(0, format!("expected 10 or 14 columns, header has {n}"))),
    };
    let expected = LOG_COLUMNS.iter().chain(TRUTH_COLUMNS.iter().take(if with_truth { 4 } else { 0 }));
    for (got, want) in header.iter().zip(expected) {
        if got != want {
            return Err(malformed(0, format!("header column '{got}' should be '{want}'")));
        }
    }

    let mut records: Vec<ImuRecord> = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| malformed(row_no, e.to_string()))?;
        if row.len() != header.len() {
            return Err(malformed(row_no, format!("expected {} fields, got {}", header.len(), row.len())));
        }
        let values = row
            .iter()
            .enumerate()
            .map(|(c, s)| {
                s.parse::<f64>()
                    .map_err(|_| malformed(row_no, format!("column '{}': cannot parse '{s}'", header[c])))
            })
            .collect::<Result<Vec<f64>, _>>()?;

        let t = values[0];
        if !t.is_finite() {
            return Err(malformed(row_no, "non-finite time stamp"));
        }
        if let Some(prev) = records.last() {
            if t <= prev.t {
                return Err(malformed(row_no, format!("time {t} does not increase (previous {})", prev.t)));
            }
        }
        let gyro_deg = Vec3::new(values[1], values[2], values[3]);
        if !gyro_deg.iter().all(|g| g.is_finite()) {
            return Err(malformed(row_no, "non-finite gyro sample"));
        }
        let truth_quat = if with_truth {
            let q = &values[10..14];
            if q.iter().all(|x| x.is_finite()) {
                Some(
                    UnitQuaternion::new(q[0], Vec3::new(q[1], q[2], q[3]))
                        .ok_or_else(|| malformed(row_no, "zero truth quaternion"))?,
                )
            } else {
                None
            }
        } else {
            None
        };
        records.push(ImuRecord {
            t,
            gyro_deg,
            accel: Vec3::new(values[4], values[5], values[6]),
            mag: Vec3::new(values[7], values[8], values[9]),
            truth_quat,
        });
    }
    if records.is_empty() {
        return Err(malformed(0, "log contains no records"));
    }
    Ok(records)
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Replays a log through the configured estimators. Rows whose
/// accelerometer/magnetometer pair gives no orientation are propagated
/// without a measurement update.
pub fn replay_log(records: &[ImuRecord], cfg: &ScenarioConfig) -> Result<RunResult, HarnessError> {
    cfg.validate()?;
    if records.is_empty() {
        return Err(malformed(0, "log contains no records"));
    }
    for (i, pair) in records.windows(2).enumerate() {
        if pair[1].t <= pair[0].t {
            return Err(malformed(i + 2, "time stamps must increase"));
        }
    }
    let times: Vec<f64> = records.iter().map(|r| r.t).collect();
    let dts = step_intervals(&times, cfg.dt);

    let mut warnings = Vec::new();
    if records.len() > 2 {
        let gaps: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
        let med = median(gaps.clone());
        for (i, g) in gaps.iter().enumerate() {
            if *g > GAP_FACTOR * med {
                warnings.push(format!("row {}: gap of {g} s (median interval {med} s)", i + 2));
            }
        }
    }

    let mut inputs = Vec::with_capacity(records.len());
    for (i, (r, dt)) in records.iter().zip(dts).enumerate() {
        let measured = match orientation_from_accel_mag(&r.accel, &r.mag) {
            Ok(o) => Some(o),
            Err(e) => {
                warnings.push(format!("row {}: {e}; measurement held", i + 1));
                None
            }
        };
        inputs.push(StepInput {
            t: r.t,
            dt,
            gyro: r.gyro_deg.map(f64::to_radians),
            measured,
            truth: r.truth_quat.as_ref().map(quat_to_matrix),
        });
    }
    let mut result = run_estimators(&inputs, cfg)?;
    result.warnings.extend(warnings);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "t,gx,gy,gz,ax,ay,az,mx,my,mz\n";

    #[test]
    fn parses_plain_and_truth_logs() {
        let text = format!("{HEADER}0,1,2,3,0,0,9.8,0.5,0,0.8\n0.01,0,0,0,0,0,9.8,0.5,0,0.8\n");
        let recs = parse_log(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].gyro_deg, Vec3::new(1.0, 2.0, 3.0));
        assert!(recs[0].truth_quat.is_none());

        let text = "t,gx,gy,gz,ax,ay,az,mx,my,mz,qw,qx,qy,qz\n0,0,0,0,0,0,1,1,0,1,1,0,0,0\n";
        let recs = parse_log(text.as_bytes()).unwrap();
        assert_eq!(recs[0].truth_quat, Some(UnitQuaternion::identity()));
    }

    #[test]
    fn non_monotonic_time_names_the_row() {
        let text = format!("{HEADER}0,0,0,0,0,0,1,1,0,1\n0.02,0,0,0,0,0,1,1,0,1\n0.01,0,0,0,0,0,1,1,0,1\n");
        match parse_log(text.as_bytes()) {
            Err(HarnessError::MalformedRecord { row, .. }) => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_fields_are_malformed() {
        for text in [
            format!("{HEADER}0,0,0,0,0,0,1,1,0\n"),
            format!("{HEADER}0,0,x,0,0,0,1,1,0,1\n"),
            format!("{HEADER}0,NaN,0,0,0,0,1,1,0,1\n"),
            "t,gx\n0,1\n".to_string(),
            "a,gx,gy,gz,ax,ay,az,mx,my,mz\n0,0,0,0,0,0,1,1,0,1\n".to_string(),
            HEADER.to_string(),
        ] {
            assert!(matches!(parse_log(text.as_bytes()), Err(HarnessError::MalformedRecord { .. })), "{text}");
        }
    }

    #[test]
    fn nan_accel_row_is_held() {
        let mut text = HEADER.to_string();
        for k in 0..50 {
            let ax = if k == 20 { "NaN".to_string() } else { "0".to_string() };
            text.push_str(&format!("{},10,0,0,{ax},0,9.8,0.5,0,0.8\n", k as f64 * 0.01));
        }
        let recs = parse_log(text.as_bytes()).unwrap();
        let result = replay_log(&recs, &ScenarioConfig::default()).unwrap();
        assert_eq!(result.rows.len(), 50);
        assert!(result.rows[20].measured.is_none());
        assert!(result.failures.is_empty());
        assert!(result.warnings.iter().any(|w| w.starts_with("row 21")));
        let rcae = result.rows[20].rcae.as_ref().unwrap();
        assert!(rcae.z.is_nan());
    }

    #[test]
    fn long_gaps_are_flagged() {
        let mut text = HEADER.to_string();
        for t in [0.0, 0.01, 0.02, 0.03, 0.5, 0.51] {
            text.push_str(&format!("{t},0,0,0,0,0,9.8,0.5,0,0.8\n"));
        }
        let recs = parse_log(text.as_bytes()).unwrap();
        let result = replay_log(&recs, &ScenarioConfig::default()).unwrap();
        assert!(result.warnings.iter().any(|w| w.contains("gap")));
    }
}
