//! CSV and text output.
//!
//! Run files carry angles in degrees, floats in 17 significant digits and
//! `NaN` for absent values. Column layout:
//!
//! ```text
//! t,psi_true,theta_true,phi_true,psi_meas,theta_meas,phi_meas,
//! <name>_psi,<name>_theta,<name>_phi,<name>_z   (per estimator)
//! rcae_u,rcae_kp,rcae_ki,rcae_kd,rcae_eta_x,rcae_eta_y,rcae_eta_z   (with rcae)
//! ```

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::HarnessError;
use crate::harness::{EstimatorKind, RunResult};
use crate::sensors::ImuRecord;
use crate::so3::Euler321;

/// 17 significant digits, `NaN` for any non-finite value.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "NaN".to_string()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn push_euler(fields: &mut Vec<f64>, e: Option<&Euler321>) {
    match e {
        Some(e) => {
            let [y, p, r] = e.to_degrees();
            fields.extend([y, p, r]);
        }
        None => fields.extend([f64::NAN; 3]),
    }
}

fn join(fields: &[f64]) -> String {
    let mut line = String::new();
    for (i, x) in fields.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&format_float(*x));
    }
    line
}

pub fn run_header(estimators: &[EstimatorKind]) -> String {
    let mut cols: Vec<String> = ["t", "psi_true", "theta_true", "phi_true", "psi_meas", "theta_meas", "phi_meas"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for k in estimators {
        for suffix in ["psi", "theta", "phi", "z"] {
            cols.push(format!("{}_{suffix}", k.name()));
        }
    }
    if estimators.contains(&EstimatorKind::Rcae) {
        for c in ["rcae_u", "rcae_kp", "rcae_ki", "rcae_kd", "rcae_eta_x", "rcae_eta_y", "rcae_eta_z"] {
            cols.push(c.to_string());
        }
    }
    cols.join(",")
}

/// Renders the run table for the selected estimators, which must be a
/// subset of those in `result`.
pub fn render_run_csv(result: &RunResult, estimators: &[EstimatorKind]) -> Result<String, HarnessError> {
    let columns = estimators
        .iter()
        .map(|k| {
            result
                .column(*k)
                .ok_or_else(|| HarnessError::Config(format!("estimator {k} was not run")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let with_rcae = estimators.contains(&EstimatorKind::Rcae);

    let mut out = run_header(estimators);
    out.push('\n');
    let mut fields = Vec::new();
    for row in &result.rows {
        fields.clear();
        fields.push(row.t);
        push_euler(&mut fields, row.truth.as_ref());
        push_euler(&mut fields, row.measured.as_ref());
        for &c in &columns {
            let est = &row.estimates[c];
            push_euler(&mut fields, Some(&est.euler));
            fields.push(est.z);
        }
        if with_rcae {
            match &row.rcae {
                Some(r) => {
                    fields.push(r.u);
                    fields.extend(r.theta);
                    fields.extend(r.eta.iter());
                }
                None => fields.extend([f64::NAN; 7]),
            }
        }
        out.push_str(&join(&fields));
        out.push('\n');
    }
    Ok(out)
}

pub fn write_run_csv(path: &Path, result: &RunResult, estimators: &[EstimatorKind]) -> Result<(), HarnessError> {
    let text = render_run_csv(result, estimators)?;
    std::fs::write(path, text).map_err(io_err(path))
}

/// Writes an IMU log readable by [`read_log_csv`](crate::harness::read_log_csv);
/// the gyro is written in deg/s.
pub fn write_log_csv(path: &Path, records: &[ImuRecord]) -> Result<(), HarnessError> {
    let with_truth = records.iter().any(|r| r.truth_quat.is_some());
    let mut out = String::from("t,gx,gy,gz,ax,ay,az,mx,my,mz");
    if with_truth {
        out.push_str(",qw,qx,qy,qz");
    }
    out.push('\n');
    let mut fields = Vec::with_capacity(14);
    for r in records {
        fields.clear();
        fields.push(r.t);
        fields.extend(r.gyro_deg.iter());
        fields.extend(r.accel.iter());
        fields.extend(r.mag.iter());
        if with_truth {
            match &r.truth_quat {
                Some(q) => fields.extend(q.to_array()),
                None => fields.extend([f64::NAN; 4]),
            }
        }
        out.push_str(&join(&fields));
        out.push('\n');
    }
    let mut file = std::fs::File::create(path).map_err(io_err(path))?;
    file.write_all(out.as_bytes()).map_err(io_err(path))
}

fn fmt_opt3(v: Option<[f64; 3]>) -> String {
    match v {
        Some([a, b, c]) => format!("{a:>10.4} {b:>10.4} {c:>10.4}"),
        None => format!("{:>10} {:>10} {:>10}", "-", "-", "-"),
    }
}

/// Plain-text summary over the final quarter of the run.
pub fn render_summary_table(result: &RunResult) -> String {
    let s = &result.summary;
    let mut out = String::new();
    let _ = writeln!(out, "steady-state window: final 25% of {} samples", result.rows.len());
    let _ = writeln!(
        out,
        "{:<12} {:>12} {:>10} {:>10} {:>10}  status",
        "estimator", "mean|z|", "rms_psi", "rms_theta", "rms_phi"
    );
    for e in &s.estimators {
        let _ = writeln!(
            out,
            "{:<12} {:>12.4e} {}  {}",
            e.kind.name(),
            e.mean_abs_z,
            fmt_opt3(e.rms_euler_errors_deg),
            if e.failed { "failed" } else { "ok" }
        );
    }
    let _ = writeln!(
        out,
        "{:<12} {:>12} {}",
        "measurement",
        "-",
        fmt_opt3(s.measurement_rms_euler_errors_deg)
    );
    let _ = writeln!(out, "rms errors in degrees; wall clock {:.3} s", s.wall_clock.as_secs_f64());
    out
}

pub fn write_summary_table(path: &Path, result: &RunResult) -> Result<(), HarnessError> {
    std::fs::write(path, render_summary_table(result)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0, std::f64::consts::PI] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(format_float(f64::NAN), "NaN");
        assert_eq!(format_float(f64::INFINITY), "NaN");
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn header_layout() {
        assert_eq!(
            run_header(&[EstimatorKind::Rcae, EstimatorKind::Mekf]),
            "t,psi_true,theta_true,phi_true,psi_meas,theta_meas,phi_meas,\
             rcae_psi,rcae_theta,rcae_phi,rcae_z,mekf_psi,mekf_theta,mekf_phi,mekf_z,\
             rcae_u,rcae_kp,rcae_ki,rcae_kd,rcae_eta_x,rcae_eta_y,rcae_eta_z"
        );
        assert_eq!(
            run_header(&[EstimatorKind::DeadReckon]),
            "t,psi_true,theta_true,phi_true,psi_meas,theta_meas,phi_meas,\
             dead_reckon_psi,dead_reckon_theta,dead_reckon_phi,dead_reckon_z"
        );
    }
}
