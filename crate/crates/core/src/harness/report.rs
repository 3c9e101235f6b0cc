//! Human-readable and CSV renderings of a sweep result.

use std::fmt::Write as _;

use super::sweep::{Metric, SweepResult};
use crate::diagnostics::energy::fmt_float;

pub const REPORT_CSV_HEADER: &str =
    "epsilon,dt,n_steps,moment_error,field_error,pointwise_error,micro_integral,final_energy,dissipation_integral";

pub fn render_csv(result: &SweepResult) -> String {
    let mut s = format!("{REPORT_CSV_HEADER}\n");
    for r in &result.per_epsilon {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            fmt_float(r.epsilon),
            fmt_float(r.dt),
            r.n_steps,
            fmt_float(r.moment_error),
            fmt_float(r.field_error),
            fmt_float(r.pointwise_error),
            fmt_float(r.micro_integral),
            fmt_float(r.final_energy),
            fmt_float(r.dissipation_integral)
        );
    }
    s
}

pub fn render_text(result: &SweepResult) -> String {
    let mut s = String::new();
    let g = &result.grid;
    let _ = writeln!(s, "config {}", result.config_hash);
    let _ = writeln!(
        s,
        "grid d={} n_x={} n_v={} L={}; T={}; k={}",
        g.dim, g.n_x, g.n_v, g.length, result.config.solver.t_final, result.config.diagnostics.k
    );
    if let Some(f) = &result.fluid {
        let _ = writeln!(s, "fluid reference dt={:e} steps={} min density={:.6}", f.dt, f.n_steps, f.min_density);
    }
    let _ = writeln!(s, "errors are {}", result.time_sup);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:>10} {:>10} {:>13} {:>13} {:>13} {:>13}",
        "epsilon", "dt", "moment", "field", "pointwise", "micro"
    );
    for r in &result.per_epsilon {
        let _ = writeln!(
            s,
            "{:>10} {:>10.3e} {:>13.6e} {:>13.6e} {:>13.6e} {:>13.6e}",
            r.epsilon, r.dt, r.moment_error, r.field_error, r.pointwise_error, r.micro_integral
        );
    }
    if !result.rates.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "rates in epsilon between adjacent runs");
        let _ = write!(s, "{:>21}", "pair");
        for m in Metric::ALL {
            let _ = write!(s, " {:>13}", m.name());
        }
        let _ = writeln!(s);
        for p in &result.rates {
            let _ = write!(s, "{:>21}", format!("{} -> {}", p.eps_coarse, p.eps_fine));
            for m in Metric::ALL {
                let _ = write!(s, " {:>13}", p.get(m).to_string());
            }
            let _ = writeln!(s);
        }
    }
    if !result.incomplete.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "INCOMPLETE: {:?}", result.incomplete);
    }
    if let Some(f) = &result.failure {
        let _ = writeln!(s, "failure: {f}");
    }
    s
}
