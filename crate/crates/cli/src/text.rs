//! Human-readable rendering at six significant digits.

use std::fmt::Write;

use qmarg::{ComplexMatrix, ExtremalityReport, PptReport, C64};

pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.5e}")
    }
}

pub fn complex(z: C64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => num(z.re),
        (true, false) => format!("{}i", num(z.im)),
        (false, false) => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", num(z.re), num(z.im.abs()))
        }
    }
}

pub fn list(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn matrix(out: &mut String, label: &str, m: &ComplexMatrix) {
    let cells: Vec<Vec<String>> = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| complex(m[(i, j)])).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let _ = writeln!(out, "{label} ({}x{}):", m.rows(), m.cols());
    for row in cells {
        let padded: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "  [{}]", padded.join("  "));
    }
}

pub fn ppt(out: &mut String, r: &PptReport) {
    let _ = writeln!(out, "partial transpose spectrum: {}", list(&r.spectrum));
    let _ = writeln!(out, "partial transpose min eigenvalue: {}", num(r.min_eigenvalue));
    let _ = writeln!(out, "PPT: {}  verdict: {}", r.is_ppt, r.verdict);
}

pub fn extremality(out: &mut String, r: &ExtremalityReport) {
    let _ = writeln!(
        out,
        "{} test: stacked rank {}/{}  verdict: {}",
        r.criterion,
        r.stacked_rank,
        r.family_size,
        if r.verdict { "extreme" } else { "not extreme" }
    );
    let opt = |x: Option<f64>| x.map_or("-".to_string(), num);
    let _ = writeln!(
        out,
        "  rank threshold {}  smallest retained {}  largest discarded {}",
        num(r.margin.threshold),
        opt(r.margin.smallest_retained),
        opt(r.margin.largest_discarded)
    );
}
