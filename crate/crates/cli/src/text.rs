use pbw_core::certify::TensorCheck;
use pbw_core::rewrite::DegreeVerdict;
use pbw_core::HilbertReport;

use crate::Report;

/// `label: value` lines with the labels padded to a common width.
pub fn fields(rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

pub fn tensor(t: &TensorCheck) -> String {
    match &t.witness {
        None => t.verdict.to_string(),
        Some(w) => format!("{} at {:?} (value {})", t.verdict, w.indices, w.value),
    }
}

fn verdict(v: &DegreeVerdict) -> String {
    match v {
        DegreeVerdict::Match => "match".into(),
        DegreeVerdict::Defect(d) => format!("defect {d:+}"),
        DegreeVerdict::Unknown => "unknown".into(),
    }
}

pub fn hilbert(r: &HilbertReport) -> String {
    let mut out = fields(&[
        ("mode", r.mode.to_string()),
        ("complete through", r.complete_through.map_or("-".into(), |c| c.to_string())),
        ("rules", r.rule_count.to_string()),
    ]);
    if !r.excluded_points.is_empty() {
        let pts: Vec<String> = r.excluded_points.iter().map(ToString::to_string).collect();
        out += &fields(&[("excluded points", pts.join(", "))]);
    }
    let rows: Vec<[String; 4]> = (0..=r.max_degree)
        .map(|k| [k.to_string(), r.dims[k].to_string(), r.expected[k].to_string(), verdict(&r.verdicts[k])])
        .collect();
    let head = ["k", "dim", "dim S^k", "verdict"];
    let widths: Vec<usize> = (0..4)
        .map(|c| rows.iter().map(|r| r[c].len()).chain([head[c].len()]).max().unwrap_or(0))
        .collect();
    out.push('\n');
    let line = |cells: [&str; 4]| {
        format!(
            "{:>w0$}  {:>w1$}  {:>w2$}  {}\n",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2]
        )
    };
    out += &line(head);
    for r in &rows {
        out += &line([&r[0], &r[1], &r[2], &r[3]]);
    }
    out += &format!("\noverall: {}\n", verdict(&r.overall()));
    out
}

pub fn render(r: &Report, version: &str) -> String {
    let mut out = format!("pbw-workbench {version}  {}\n", r.command);
    if let Some(prov) = r.provenance.as_object() {
        for (k, v) in prov {
            out += &format!("  {k}: {}\n", v);
        }
    }
    if let Some(p) = &r.presentation {
        out += "\npresentation\n";
        for line in p.to_string().lines() {
            out += &format!("  {line}\n");
        }
    }
    out.push('\n');
    out += &r.text;
    out += &format!("\nexit code {}\n", r.code);
    out
}
