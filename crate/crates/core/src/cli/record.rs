//! Wire formats for [`CertReport`]: one JSON object per line, or one CSV row
//! under the fixed header [`CSV_HEADER`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::criterion::{CertReport, Depth, Route, Verdict};

pub const CSV_HEADER: [&str; 13] = [
    "m", "d", "p", "h_m", "h_d", "h_g", "r", "t", "verdict", "route", "precision", "alpha", "notes",
];

/// JSON form of a report.
///
/// `r` is the exact congruence depth or null; `r_saturated_at` carries the
/// precision when `r` did not resolve. `per_tag` maps each prime tag such as
/// `"(+,-)"` to its valuation, null when saturated. `alpha` uses the compact
/// `a,b,c,e,den` form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub m: i64,
    pub d: i64,
    pub p: u64,
    pub g: Option<i64>,
    pub h_m: Option<u64>,
    pub h_d: Option<u64>,
    pub h_g: Option<u64>,
    pub r: Option<u32>,
    pub r_saturated_at: Option<u32>,
    pub per_tag: Option<BTreeMap<String, Option<u32>>>,
    pub t: Option<u32>,
    pub alpha: Option<String>,
    pub verdict: Verdict,
    pub route: Route,
    pub precision: u32,
    pub notes: String,
}

impl From<&CertReport> for ReportRecord {
    fn from(r: &CertReport) -> Self {
        let depth = r.r.as_ref();
        Self {
            m: r.m,
            d: r.d,
            p: r.p,
            g: r.triple.map(|t| t.g()),
            h_m: r.h_m,
            h_d: r.h_d,
            h_g: r.h_g,
            r: r.r_value(),
            r_saturated_at: depth.and_then(|d| match d.r {
                Depth::SaturatedAt(n) => Some(n),
                _ => None,
            }),
            per_tag: depth.map(|d| {
                d.per_tag
                    .iter()
                    .map(|(tag, v)| (tag.to_string(), v.exact()))
                    .collect()
            }),
            t: r.t,
            alpha: r.alpha.as_ref().map(|a| a.to_compact()),
            verdict: r.verdict,
            route: r.route,
            precision: r.precision_used,
            notes: r.notes.clone(),
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl ReportRecord {
    pub fn csv_row(&self) -> [String; 13] {
        [
            self.m.to_string(),
            self.d.to_string(),
            self.p.to_string(),
            opt(self.h_m),
            opt(self.h_d),
            opt(self.h_g),
            opt(self.r),
            opt(self.t),
            self.verdict.to_string(),
            self.route.to_string(),
            self.precision.to_string(),
            self.alpha.clone().unwrap_or_default(),
            self.notes.clone(),
        ]
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("record serializes")
    }

    /// Multi-line human summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("field     Q(sqrt(-{}), sqrt({})), p = {}\n", self.m, self.d, self.p));
        if let (Some(hm), Some(hd), Some(hg)) = (self.h_m, self.h_d, self.h_g) {
            out.push_str(&format!("classes   h_m = {hm}, h_d = {hd}, h_g = {hg}\n"));
        }
        if let Some(r) = self.r {
            out.push_str(&format!("r         {r} (precision {})\n", self.precision));
        } else if let Some(n) = self.r_saturated_at {
            out.push_str(&format!("r         unresolved at precision {n}\n"));
        }
        if let Some(tags) = &self.per_tag {
            let parts: Vec<String> = tags
                .iter()
                .map(|(k, v)| format!("{k}={}", opt(*v)))
                .collect();
            out.push_str(&format!("per tag   {}\n", parts.join(" ")));
        }
        if let (Some(t), Some(a)) = (self.t, &self.alpha) {
            out.push_str(&format!("witness   t = {t}, alpha = {a}\n"));
        }
        out.push_str(&format!("verdict   {} ({})\n", self.verdict, self.route));
        if !self.notes.is_empty() {
            out.push_str(&format!("notes     {}\n", self.notes));
        }
        out
    }
}
