//! The aggregated bounds report and its serializations.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::entropy::{entropy_with, lb_from_entropy, EntropyOptions};
use crate::error::Result;
use crate::linext::{count_extensions_with, Limits};
use crate::numeric::{ln_biguint, rational_to_f64};
use crate::poset::Poset;
use crate::quantum::{qh_from_qlb, qlb_enum_with, verify_adversary, VerifyOptions};

/// Slack for the `ITLB <= LB <= 2 ITLB` check.
pub const SANDWICH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct AnalyzeOptions {
    pub limits: Limits,
    pub matrix_cap: usize,
    /// Duality-gap tolerance of the entropy solver.
    pub tol: f64,
    pub verify: VerifyOptions,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            limits: Limits::default(),
            matrix_cap: crate::quantum::DEFAULT_MATRIX_CAP,
            tol: crate::entropy::DEFAULT_TOL,
            verify: VerifyOptions::default(),
        }
    }
}

/// Every bound for one poset. Quantities needing enumeration are `None`
/// when `|Δ(P)|` exceeds the corresponding cap.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub n: usize,
    pub num_extensions: BigUint,
    pub itlb: f64,
    pub entropy: f64,
    pub lb: f64,
    pub qlb: Option<f64>,
    pub qh: Option<f64>,
    pub gamma_norm: Option<f64>,
    pub max_gamma_ij_norm: Option<f64>,
    pub lemma1_ok: Option<bool>,
    pub lemma2_ok: Option<bool>,
    pub lemma3_ok: Option<bool>,
    pub sandwich_ok: bool,
}

pub fn analyze(poset: &Poset, opts: &AnalyzeOptions) -> Result<BoundsReport> {
    let count = count_extensions_with(poset, &opts.limits)?;
    let itlb = ln_biguint(&count);
    let sol = entropy_with::<f64>(
        poset,
        &EntropyOptions {
            tol: opts.tol,
            ..EntropyOptions::default()
        },
    )?;
    let lb = lb_from_entropy(poset.n(), sol.h);
    let (qlb, qh) = if count <= BigUint::from(opts.limits.max_enumeration) {
        let exact = qlb_enum_with(poset, &opts.limits)?;
        let qh = qh_from_qlb(poset.n(), &exact);
        (Some(rational_to_f64(&exact)), Some(rational_to_f64(&qh)))
    } else {
        (None, None)
    };
    let mut report = BoundsReport {
        n: poset.n(),
        num_extensions: count.clone(),
        itlb,
        entropy: sol.h,
        lb,
        qlb,
        qh,
        gamma_norm: None,
        max_gamma_ij_norm: None,
        lemma1_ok: None,
        lemma2_ok: None,
        lemma3_ok: None,
        sandwich_ok: itlb <= lb + SANDWICH_TOL && lb <= 2.0 * itlb + SANDWICH_TOL,
    };
    if count <= BigUint::from(opts.matrix_cap) {
        let verify = VerifyOptions {
            matrix_cap: opts.matrix_cap,
            limits: opts.limits,
            ..opts.verify
        };
        let cert = verify_adversary(poset, &verify)?;
        report.gamma_norm = Some(cert.gamma_norm);
        report.max_gamma_ij_norm = Some(cert.max_gamma_ij_norm);
        report.lemma1_ok = Some(cert.lemma1_ok);
        report.lemma2_ok = Some(cert.lemma2_ok);
        report.lemma3_ok = Some(cert.lemma3_ok);
    }
    Ok(report)
}

/// Report value as it appears in any output format.
enum Field {
    Int(String),
    Real(Option<f64>),
    Flag(Option<bool>),
}

impl BoundsReport {
    /// False when any computed lemma flag or the sandwich check failed.
    pub fn all_ok(&self) -> bool {
        self.sandwich_ok
            && [self.lemma1_ok, self.lemma2_ok, self.lemma3_ok]
                .iter()
                .all(|f| f.unwrap_or(true))
    }

    fn fields(&self) -> Vec<(&'static str, Field)> {
        vec![
            ("n", Field::Int(self.n.to_string())),
            ("num_extensions", Field::Int(self.num_extensions.to_string())),
            ("itlb", Field::Real(Some(self.itlb))),
            ("entropy", Field::Real(Some(self.entropy))),
            ("lb", Field::Real(Some(self.lb))),
            ("qlb", Field::Real(self.qlb)),
            ("qh", Field::Real(self.qh)),
            ("gamma_norm", Field::Real(self.gamma_norm)),
            ("max_gamma_ij_norm", Field::Real(self.max_gamma_ij_norm)),
            ("lemma1_ok", Field::Flag(self.lemma1_ok)),
            ("lemma2_ok", Field::Flag(self.lemma2_ok)),
            ("lemma3_ok", Field::Flag(self.lemma3_ok)),
            ("sandwich_ok", Field::Flag(Some(self.sandwich_ok))),
        ]
    }

    /// Flat JSON object; reals carry 17 significant digits, missing
    /// values are `null`.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields()
            .into_iter()
            .map(|(key, value)| format!("\"{key}\": {}", render(&value, "null")))
            .collect();
        format!("{{{}}}", body.join(", "))
    }

    /// Header line plus one data row; missing values are empty.
    pub fn to_csv(&self) -> String {
        let fields = self.fields();
        let header: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        let row: Vec<String> = fields.iter().map(|(_, v)| render(v, "")).collect();
        format!("{}\n{}\n", header.join(","), row.join(","))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.fields() {
            writeln!(out, "{key:<18} {}", render(&value, "n/a")).unwrap();
        }
        out
    }
}

/// `{:.16e}` gives 17 significant digits and is valid JSON.
pub fn format_real(x: f64) -> Option<String> {
    x.is_finite().then(|| format!("{x:.16e}"))
}

fn render(value: &Field, missing: &str) -> String {
    match value {
        Field::Int(s) => s.clone(),
        Field::Real(Some(x)) => format_real(*x).unwrap_or_else(|| missing.to_string()),
        Field::Flag(Some(b)) => b.to_string(),
        Field::Real(None) | Field::Flag(None) => missing.to_string(),
    }
}
