//! CSV and JSON emission with fixed float formatting and atomic writes.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::correlation::CorrelationTrace;
use crate::error::Result;
use crate::spectral::SpectralAmplitude;
use crate::units::SPEED_OF_LIGHT;

pub const SPECTRUM_HEADER: &str = "omega_rad_per_s,nu_detuning_thz,wavelength_nm,re_f,im_f,s";
pub const TRACE_HEADER: &str = "tau_s,value";

/// 17 significant digits in exponent form.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Spectrum rows; `center_omega` is the signal center in rad/s.
pub fn spectrum_csv(f: &SpectralAmplitude, center_omega: f64) -> String {
    let mut out = String::with_capacity(120 * f.values().len());
    out.push_str(SPECTRUM_HEADER);
    out.push('\n');
    for (w, v) in f.grid().omegas().iter().zip(f.values()) {
        let nu = w / (2.0 * std::f64::consts::PI) * 1e-12;
        let lambda = 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / (center_omega + w) * 1e9;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_float(*w),
            format_float(nu),
            format_float(lambda),
            format_float(v.re),
            format_float(v.im),
            format_float(v.norm_sqr())
        );
    }
    out
}

pub fn trace_csv(trace: &CorrelationTrace) -> String {
    let mut out = String::with_capacity(50 * trace.values.len());
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for (t, v) in trace.tau.taus().iter().zip(&trace.values) {
        let _ = writeln!(out, "{},{}", format_float(*t), format_float(*v));
    }
    out
}

/// Generic numeric table.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Plain gnuplot script plotting column `y` against column `x` of a CSV.
pub fn gnuplot_script(csv_name: &str, x: usize, y: usize, xlabel: &str, ylabel: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\nplot '{csv_name}' using {x}:{y} with lines\npause -1\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::{TauGrid, TraceKind, TraceNormalization};
    use crate::spectral::{FrequencyGrid, Provenance};
    use num_complex::Complex64;

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.5e14), "-2.5000000000000000e14");
        for v in [std::f64::consts::PI, 1e-300, 123456.789] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn spectrum_rows_and_header() {
        let grid = FrequencyGrid::new(1e13, 129).unwrap();
        let raw = grid.omegas().iter().map(|w| Complex64::new((-w * w / 1e26).exp(), 0.0)).collect();
        let prov = Provenance { source: "test".into(), phase_mode: None, length_used: 0.01 };
        let f = SpectralAmplitude::from_raw(grid, raw, prov).unwrap();
        let csv = spectrum_csv(&f, 2.68e15);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], SPECTRUM_HEADER);
        assert_eq!(lines.len(), 130);
        let mid: Vec<f64> = lines[65].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(mid[0], 0.0);
        assert_eq!(mid[5], 1.0);
        assert!((mid[2] - 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 2.68e15 * 1e9).abs() < 1e-9);
    }

    #[test]
    fn trace_rows() {
        let tau = TauGrid::new(1e-12, 5).unwrap();
        let t = CorrelationTrace {
            kind: TraceKind::G1,
            tau,
            values: vec![0.0, 0.5, 1.0, 0.5, 0.0],
            normalization: TraceNormalization::ValueAtZeroOne,
        };
        let csv = trace_csv(&t);
        assert!(csv.starts_with("tau_s,value\n-9.9999999999999998e-13,0.0000000000000000e0\n"));
        assert_eq!(csv.lines().count(), 6);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, b"a").unwrap();
        write_atomic(&p, b"b").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        let leftovers = std::fs::read_dir(p.parent().unwrap()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
