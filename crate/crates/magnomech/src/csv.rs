//! CSV writers. Every float is printed with 17 significant digits so output
//! is byte-identical across runs and round-trips exactly.

use std::fmt::Write as _;

use magnomech_core::analysis::{fano_asymmetry, CrossingReport, WindowReport};
use magnomech_core::oracle::CrossValidation;
use magnomech_core::response::{GroupDelay, Spectrum};
use magnomech_core::steady::MagnonSweep;

pub const STEADY_HEADER: &str = "B_tesla,magnon_number,re_n2s,im_n2s,delta_n2_eff,iterations";
pub const SPECTRUM_HEADER: &str = "delta_over_omega_p,re_eout,im_eout,re_t,im_t,t2,tau_s";
pub const VALIDATION_HEADER: &str = "delta_over_omega_p,rel_dev";
pub const WINDOWS_HEADER: &str = "center_delta_over_omega_p,depth,left_peak,right_peak,asymmetry";
pub const CROSSINGS_HEADER: &str = "parameter,value,direction";
pub const DELAY_SWEEP_HEADER: &str = "parameter,value,tau_s,richardson,reliable";

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// Rows optionally prefixed by a series label, for long-format tables.
pub struct Table {
    text: String,
    labelled: bool,
}

impl Table {
    pub fn new(header: &str, labelled: bool) -> Self {
        let mut text = String::new();
        if labelled {
            text.push_str("series,");
        }
        text.push_str(header);
        text.push('\n');
        Table { text, labelled }
    }

    pub fn row(&mut self, label: &str, fields: &[String]) {
        if self.labelled {
            self.text.push_str(label);
            self.text.push(',');
        }
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.text, "# {line}");
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn spectrum_rows(table: &mut Table, label: &str, spectrum: &Spectrum, omega_p: f64) {
    for p in &spectrum.points {
        table.row(
            label,
            &[
                number(p.delta / omega_p),
                number(p.eout.re),
                number(p.eout.im),
                number(p.t.re),
                number(p.t.im),
                number(p.t2),
                number(p.tau),
            ],
        );
    }
}

pub fn steady_rows(table: &mut Table, label: &str, sweep: &MagnonSweep) {
    for p in &sweep.points {
        let s = &p.state;
        table.row(
            label,
            &[
                number(p.b_field),
                number(s.magnon_number),
                number(s.n2s.re),
                number(s.n2s.im),
                number(s.delta_n2_eff),
                s.iterations.to_string(),
            ],
        );
    }
}

pub fn window_rows(table: &mut Table, label: &str, report: &WindowReport, omega_p: f64) {
    for w in &report.windows {
        let asymmetry = fano_asymmetry(w).unwrap_or(f64::NAN);
        table.row(
            label,
            &[
                number(w.center_delta / omega_p),
                number(w.depth),
                number(w.left_peak),
                number(w.right_peak),
                number(asymmetry),
            ],
        );
    }
}

/// Crossing values in the parameter's native unit (rad/s for frequencies).
pub fn crossing_rows(table: &mut Table, label: &str, report: &CrossingReport) {
    for c in &report.crossings {
        table.row(
            label,
            &[
                report.parameter.name().to_string(),
                number(c.parameter_value),
                c.direction.as_str().to_string(),
            ],
        );
    }
}

pub fn delay_sweep_rows(table: &mut Table, label: &str, parameter: &str, samples: &[(f64, GroupDelay)]) {
    for (value, g) in samples {
        table.row(
            label,
            &[
                parameter.to_string(),
                number(*value),
                number(g.tau),
                number(g.richardson),
                g.reliable.to_string(),
            ],
        );
    }
}

/// Per-point deviations followed by a summary comment; failed points are
/// written as NaN and listed in comments.
pub fn validation_csv(report: &CrossValidation, omega_p: f64) -> String {
    let mut table = Table::new(VALIDATION_HEADER, false);
    for p in &report.points {
        table.row("", &[number(p.delta / omega_p), number(*p.rel_dev.as_ref().unwrap_or(&f64::NAN))]);
    }
    for p in report.failures() {
        if let Err(e) = &p.rel_dev {
            table.comment(&format!("failed at delta_over_omega_p={}: {e}", number(p.delta / omega_p)));
        }
    }
    table.comment(&format!(
        "max_rel_dev={},argmax_delta_over_omega_p={},max_oracle_residual={}",
        number(report.max_rel_dev),
        number(report.argmax_delta / omega_p),
        number(report.max_residual)
    ));
    table.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(number(0.1), "1.0000000000000001e-1");
        assert_eq!(number(-2.0), "-2.0000000000000000e0");
        assert_eq!(number(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn labelled_table() {
        let mut t = Table::new("a,b", true);
        t.row("f=0", &["1".into(), "2".into()]);
        assert_eq!(t.finish(), "series,a,b\nf=0,1,2\n");
    }
}
