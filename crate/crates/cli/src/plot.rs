//! Long-format CSV for external plotting, one file per figure.

use std::collections::BTreeMap;
use std::fmt::Write;

use mzk_core::report::Payload;
use mzk_core::ExperimentReport;

pub const HEADER: &str = "experiment,m_or_N_or_j,t_or_sample,value,envelope";

/// Shortest round-trip text, switching to exponent form for very small or
/// large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

struct Figure<'a> {
    experiment: &'a str,
    body: String,
}

impl<'a> Figure<'a> {
    fn new(experiment: &'a str) -> Self {
        Self { experiment, body: format!("{HEADER}\n") }
    }

    fn row(&mut self, key: impl std::fmt::Display, t: f64, value: f64, envelope: Option<f64>) {
        let env = envelope.map(num).unwrap_or_default();
        writeln!(self.body, "{},{key},{},{},{env}", self.experiment, num(t), num(value)).expect("writing to a String");
    }
}

/// Flattens the report arrays into `figure name → CSV text`. Deterministic:
/// the same report always gives byte-identical files. A report without
/// data gives a header-only file named after the experiment.
pub fn emit_plot_data(report: &ExperimentReport) -> BTreeMap<String, String> {
    let exp = report.experiment.as_str();
    let mut out = BTreeMap::new();
    let mut put = |name: &str, fig: Figure| {
        out.insert(name.to_string(), fig.body);
    };
    match &report.payload {
        Payload::Simulation(s) => {
            let log = &s.conservation;
            let mut l2 = Figure::new(exp);
            let mut tail = Figure::new(exp);
            for (i, t) in log.times.iter().enumerate() {
                l2.row(log.cutoff, *t, log.l2[i], log.l2.first().copied());
                tail.row(log.cutoff, *t, log.hs_tail[i], log.hs_tail.first().copied());
            }
            put("conservation", l2);
            put("hs_tail", tail);
        }
        Payload::ExactWave(r) => {
            let mut f = Figure::new(exp);
            for (t, e) in r.times.iter().zip(&r.relative_errors) {
                f.row(r.m, *t, *e, None);
            }
            put("exact_wave", f);
        }
        Payload::Divergence(r) => {
            let mut d = Figure::new(exp);
            let mut err = Figure::new(exp);
            for run in &r.runs {
                for i in 0..run.times.len() {
                    d.row(run.m, run.times[i], run.distance[i], Some(run.envelope[i]));
                    err.row(run.m, run.times[i], run.error1_hs[i], None);
                }
            }
            put("divergence", d);
            put("approximation_error", err);
        }
        Payload::Convergence(r) => {
            let mut f = Figure::new(exp);
            let t_end = r.sample_times.last().copied().unwrap_or(0.0);
            for &(n, e) in &r.sup_errors {
                let fitted = r.fit.as_ref().map(|fit| fit.intercept.exp() * (n as f64).powf(fit.exponent));
                f.row(n, t_end, e, fitted);
            }
            put("galerkin_convergence", f);
        }
        Payload::EnergyIdentity(r) => {
            let mut f = Figure::new(exp);
            for (i, e) in r.at_delta.iter().enumerate() {
                f.row(r.cutoff, i as f64, e.discrepancy, None);
            }
            put("energy_identity", f);
        }
        Payload::Ratios(reports) => {
            for r in reports {
                let key = r.parameters.get("j").or_else(|| r.parameters.get("band")).cloned().unwrap_or_default();
                let name = r.inequality.clone();
                let entry = out.entry(name).or_insert_with(|| Figure::new(exp).body);
                for (i, s) in r.samples.iter().enumerate() {
                    writeln!(entry, "{exp},{key},{i},{},", num(s.ratio)).expect("writing to a String");
                }
            }
            if reports.is_empty() {
                out.insert(exp.to_string(), format!("{HEADER}\n"));
            }
        }
        Payload::Transference(r) => {
            let mut f = Figure::new(exp);
            f.row(r.s, 0.0, r.max_discrepancy, Some(r.error_estimate));
            put("transference", f);
        }
        Payload::Empty => put(exp, Figure::new(exp)),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let files = emit_plot_data(&ExperimentReport::empty("illposed"));
        assert_eq!(files.len(), 1);
        assert_eq!(files["illposed"], format!("{HEADER}\n"));
    }

    #[test]
    fn number_format_round_trips() {
        for x in [0.0, 1.0, 0.001, 1.3877787807814457e-17, -2.5e20, 123.456] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(1e-17), "1e-17");
        assert_eq!(num(0.5), "0.5");
    }
}
