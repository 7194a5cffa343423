//! CSV writers. Numbers use the shortest representation that parses back
//! to the same `f64`.

use std::io::{self, Write};

use crate::dynamics::Trajectory;
use crate::model::Moment;
use crate::oracle::ClosureReport;
use crate::runner::{SignMatrix, SweepSurface, WitnessSeries};
use crate::witnesses::WitnessRecord;

/// Shortest round-trip text for `x`; `NaN`, `inf` and `-inf` for the
/// non-finite values.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_row(w: &mut dyn Write, first: f64, rest: impl IntoIterator<Item = f64>) -> io::Result<()> {
    let mut line = format_number(first);
    for v in rest {
        line.push(',');
        line.push_str(&format_number(v));
    }
    line.push('\n');
    w.write_all(line.as_bytes())
}

/// `tau,re_A,im_A,...` over all tracked moments.
pub fn write_trajectory(w: &mut dyn Write, trajectory: &Trajectory) -> io::Result<()> {
    let mut header = String::from("tau");
    for m in Moment::ALL {
        header.push_str(&format!(",re_{0},im_{0}", m.name()));
    }
    writeln!(w, "{header}")?;
    for (t, s) in trajectory.iter() {
        write_row(w, t, s.0.iter().flat_map(|z| [z.re, z.im]))?;
    }
    Ok(())
}

/// `tau` followed by the witness columns at `columns` (indices into
/// [`WitnessRecord::column_names`]).
pub fn write_witness_series(
    w: &mut dyn Write,
    series: &WitnessSeries,
    columns: &[usize],
) -> io::Result<()> {
    let names = WitnessRecord::column_names();
    let mut header = String::from("tau");
    for &c in columns {
        header.push(',');
        header.push_str(&names[c]);
    }
    writeln!(w, "{header}")?;
    for (t, r) in series.times.iter().zip(&series.records) {
        let values = r.values();
        write_row(w, *t, columns.iter().map(|&c| values[c]))?;
    }
    Ok(())
}

pub fn write_sign_matrix(w: &mut dyn Write, matrix: &SignMatrix) -> io::Result<()> {
    writeln!(w, "config,chi,witness,cell,min,argmin")?;
    for c in &matrix.cells {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            c.config,
            format_number(c.chi),
            c.label,
            if c.tick { "tick" } else { "cross" },
            format_number(c.min),
            format_number(c.argmin)
        )?;
    }
    Ok(())
}

/// Wide layout: `tau`, then one `<column>@chi=<chi>` column per grid point
/// and selected witness. Failed grid points are filled with NaN.
pub fn write_sweep(w: &mut dyn Write, surface: &SweepSurface) -> io::Result<()> {
    let mut header = String::from("tau");
    for row in &surface.rows {
        for name in &surface.columns {
            header.push_str(&format!(",{name}@chi={}", format_number(row.chi)));
        }
    }
    writeln!(w, "{header}")?;
    for (k, &t) in surface.times.iter().enumerate() {
        let values = surface.rows.iter().flat_map(|row| {
            (0..surface.columns.len()).map(move |c| match &row.values {
                Ok(cols) => cols[c][k],
                Err(_) => f64::NAN,
            })
        });
        write_row(w, t, values)?;
    }
    Ok(())
}

/// `tau,first_moment_abserr,second_moment_abserr`, then `exact_q,decoupled_q,abserr_q` per quantity.
pub fn write_closure_report(w: &mut dyn Write, report: &ClosureReport) -> io::Result<()> {
    let mut header = String::from("tau,first_moment_abserr,second_moment_abserr");
    for c in &report.columns {
        header.push_str(&format!(",exact_{0},decoupled_{0},abserr_{0}", c.name));
    }
    writeln!(w, "{header}")?;
    for (k, &t) in report.times.iter().enumerate() {
        let values = [report.first_moment_error[k], report.second_moment_error[k]]
            .into_iter()
            .chain(
                report
                    .columns
                    .iter()
                    .flat_map(|c| [c.exact[k], c.decoupled[k], c.abs_error(k)]),
            );
        write_row(w, t, values)?;
    }
    Ok(())
}
