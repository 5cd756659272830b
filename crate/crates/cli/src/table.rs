//! Fixed-width table rendering of reports.

use std::collections::BTreeMap;

use wildtame_core::{KernelReport, Verdict};

const WIDTHS: [usize; 10] = [8, 18, 3, 3, 4, 10, 14, 14, 17, 16];

fn line(cells: &[String]) -> String {
    let mut s = String::new();
    for (c, w) in cells.iter().zip(WIDTHS) {
        s.push_str(&format!("{c:<w$}  "));
    }
    s.trim_end().to_string()
}

pub fn header() -> String {
    let h = ["delta", "k'", "idx", "v3", "rank", "Psi(k')", "WK2{3}", "K2{3}", "verdict", "assurance"];
    line(&h.map(String::from))
}

pub fn row(r: &KernelReport) -> String {
    let psi = r
        .evidence
        .iter()
        .find(|e| e.rule == "PSI")
        .map(|e| e.inputs.get("Psi").cloned().unwrap_or_else(|| e.inputs["status"].clone()))
        .unwrap_or_else(|| "?".into());
    let dash = || "-".to_string();
    line(&[
        r.delta.clone(),
        r.k_prime.as_ref().map(|k| k.label.clone()).unwrap_or_else(dash),
        r.local_index.clone(),
        r.v3_order.clone().unwrap_or_else(dash),
        r.rank3.clone().unwrap_or_else(dash),
        psi,
        r.wk_structure.to_string(),
        r.k2_structure.to_string(),
        r.verdict.to_string(),
        r.assurance.to_string(),
    ])
}

pub fn footer(total: usize, counts: &BTreeMap<Verdict, usize>) -> String {
    let parts: Vec<String> = counts.iter().map(|(v, n)| format!("{v}={n}")).collect();
    format!("reports={total} {}", parts.join(" "))
}
