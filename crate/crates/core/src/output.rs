//! CSV emission. Floats are written in scientific notation with a fixed
//! number of significant digits (17 by default, enough to round-trip binary64).

use std::io::{self, Write};

use crate::convergence::ConvergenceTable;
use crate::experiments::PeriodSample;
use crate::hamiltonian::EnergySeries;
use crate::report::RunReport;

pub const DEFAULT_PRECISION: usize = 17;

/// Formats `x` with `digits` significant digits.
pub fn format_float(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.max(1) - 1, x)
}

fn format_line(header: &str, digits: usize) -> String {
    format!("# {header}; floats: scientific, {digits} significant digits\n")
}

/// Default component names: `y0, y1, ...`.
pub fn default_names(m: usize) -> Vec<String> {
    (0..m).map(|i| format!("y{i}")).collect()
}

/// Canonical names for `(q, p)` states with `d` degrees of freedom.
pub fn phase_names(d: usize) -> Vec<String> {
    if d == 1 {
        return vec!["q".into(), "p".into()];
    }
    (1..=d)
        .map(|i| format!("q{i}"))
        .chain((1..=d).map(|i| format!("p{i}")))
        .collect()
}

/// Columns `n, t, <components>, [H,] iterations`; iterations of row 0 is 0.
pub fn write_run_csv<W: Write + ?Sized>(
    out: &mut W,
    report: &RunReport,
    names: &[String],
    digits: usize,
) -> io::Result<()> {
    out.write_all(format_line("run", digits).as_bytes())?;
    let mut header = vec!["n".to_string(), "t".to_string()];
    header.extend(names.iter().cloned());
    if report.energy.is_some() {
        header.push("H".into());
    }
    header.push("iterations".into());
    writeln!(out, "{}", header.join(","))?;
    for (n, y) in report.states.iter().enumerate() {
        let mut row = vec![n.to_string(), format_float(report.time(n), digits)];
        row.extend(y.iter().map(|&v| format_float(v, digits)));
        if let Some(e) = &report.energy {
            row.push(format_float(e[n], digits));
        }
        let it = if n == 0 { 0 } else { report.iterations[n - 1] };
        row.push(it.to_string());
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Columns `n, t, H, dH` (`dH` empty on row 0).
pub fn write_energy_csv<W: Write + ?Sized>(out: &mut W, report: &RunReport, series: &EnergySeries, digits: usize) -> io::Result<()> {
    out.write_all(format_line("energy", digits).as_bytes())?;
    writeln!(out, "n,t,H,dH")?;
    for (n, &h) in series.values.iter().enumerate() {
        let d = if n == 0 {
            String::new()
        } else {
            format_float(series.increments[n - 1], digits)
        };
        writeln!(out, "{n},{},{},{d}", format_float(report.time(n), digits), format_float(h, digits))?;
    }
    Ok(())
}

pub fn write_samples_csv<W: Write + ?Sized>(
    out: &mut W,
    samples: &[PeriodSample],
    names: &[String],
    digits: usize,
) -> io::Result<()> {
    out.write_all(format_line("period samples", digits).as_bytes())?;
    let mut header = vec!["period".to_string(), "n".to_string(), "t".to_string()];
    header.extend(names.iter().cloned());
    writeln!(out, "{}", header.join(","))?;
    for (i, s) in samples.iter().enumerate() {
        let mut row = vec![i.to_string(), s.step.to_string(), format_float(s.t, digits)];
        row.extend(s.state.iter().map(|&v| format_float(v, digits)));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn write_convergence_csv<W: Write + ?Sized>(out: &mut W, tables: &[ConvergenceTable], digits: usize) -> io::Result<()> {
    out.write_all(format_line("convergence", digits).as_bytes())?;
    writeln!(out, "method,h,mesh_error,uniform_error,mesh_slope,uniform_slope")?;
    let opt = |v: Option<f64>| v.map(|x| format_float(x, digits)).unwrap_or_default();
    for t in tables {
        for r in &t.rows {
            writeln!(
                out,
                "\"{}\",{},{},{},{},{}",
                t.label,
                format_float(r.h, digits),
                format_float(r.mesh_error, digits),
                format_float(r.uniform_error, digits),
                opt(r.mesh_slope),
                opt(r.uniform_slope)
            )?;
        }
    }
    Ok(())
}
