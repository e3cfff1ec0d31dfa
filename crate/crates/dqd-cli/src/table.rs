//! The CSV dialect shared by every emitting subcommand: `# format=1` as
//! the first line, a header as the second, comma separators, `.` decimal
//! point, 12 significant digits on all numbers, and a trailing `status`
//! column holding `ok` or `error:<code>`. Rows for failed grid points
//! carry NaN observables instead of aborting the run.

use std::path::Path;

use dqd_core::model::{hybridization_width, ModelSpec};
use dqd_core::pipeline::PointResult;

use crate::fail::{error_slug, Failure};

pub const FORMAT_LINE: &str = "# format=1";

pub const RESULT_HEADER: &str = "t,t_prime,u,temperature,b,j,gamma,concurrence,c_ud,c_par,\
p_ud,p_par,spin_dot,dn2_a,n_a,e0,log_z,status";

pub const PHASE_HEADER: &str =
    "u_over_gamma,u,gamma,t_k,j_c_numeric,t_c_numeric,j_c_analytic,j_quarter,dn2_a_at_jc,status";

pub const SCALES_HEADER: &str =
    "u,gamma,j,d1,d2,c,t_k,t_k2,j_rkky,j_c_series,j_c_side_coupled,j_c_parallel,status";

/// 12 significant digits in scientific notation.
pub fn sig(x: f64) -> String {
    format!("{x:.11e}")
}

/// Superexchange echoed on every row; NaN when `U = 0` leaves the
/// quotient undefined.
pub fn echoed_j(spec: &ModelSpec) -> f64 {
    if spec.u > 0.0 {
        4.0 * spec.t * spec.t / spec.u
    } else {
        f64::NAN
    }
}

/// One result row for a parameter point: echoed inputs, then observables
/// or NaN placeholders with an error status.
pub fn result_row(spec: &ModelSpec, outcome: &Result<PointResult, dqd_core::Error>) -> String {
    let gamma = hybridization_width(spec)
        .map(|g| g.value())
        .unwrap_or(f64::NAN);
    let mut cols = vec![
        sig(spec.t),
        sig(spec.t_prime),
        sig(spec.u),
        sig(spec.temperature),
        sig(spec.b_field),
        sig(echoed_j(spec)),
        sig(gamma),
    ];
    match outcome {
        Ok(point) => {
            let r = &point.report;
            cols.extend([
                sig(r.concurrence),
                sig(r.c_antiparallel),
                sig(r.c_parallel),
                sig(r.p_antiparallel),
                sig(r.p_parallel),
                sig(point.correlators.spin_dot),
                sig(point.correlators.dn2_a),
                sig(point.correlators.n_a),
                sig(point.ground_energy),
                sig(point.log_z_shifted),
                "ok".to_string(),
            ]);
        }
        Err(e) => {
            cols.extend(std::iter::repeat(sig(f64::NAN)).take(10));
            cols.push(format!("error:{}", error_slug(e)));
        }
    }
    cols.join(",")
}

/// Assemble a complete document: format line, header, rows, trailing
/// newline.
pub fn document(header: &str, rows: &[String]) -> String {
    let mut out = String::with_capacity(FORMAT_LINE.len() + header.len() + rows.len() * 256 + 4);
    out.push_str(FORMAT_LINE);
    out.push('\n');
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

/// Write to the path, or to standard output when no path was given.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            Failure::config(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(content.as_bytes())
                .map_err(Failure::from)
        }
    }
}
