use nalgebra::Vector3;
use num_complex::Complex64;
use std::fmt::Write;

use crate::greens::{Site, TabulatedEntry, TabulatedGreenSet};
use crate::{Error, Result};

pub const GREEN_TABLE_HEADER: &str = "green-table v1";

fn malformed(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn number(field: &str, line: usize, column: usize, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| malformed(line, column, format!("{what}: `{}` is not a number", field.trim())))
}

/// Parses a `green-table v1` document.
pub fn load_green_table(text: &str) -> Result<TabulatedGreenSet> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.by_ref().find(|(_, l)| !l.trim().is_empty()) {
        Some((_, l)) if l.trim() == GREEN_TABLE_HEADER => {}
        Some((n, l)) => {
            return Err(malformed(n, 1, format!("expected `{GREEN_TABLE_HEADER}`, found `{}`", l.trim())))
        }
        None => return Err(malformed(1, 1, "empty green table")),
    }

    let mut sites = Vec::new();
    let mut metadata = Vec::new();
    let mut entries = Vec::new();
    for (n, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once(':') {
                metadata.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("site ") {
            if !entries.is_empty() {
                return Err(malformed(n, 1, "site declarations must precede data lines"));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(malformed(n, 1, "expected `site <label> <x_m> <y_m> <z_m>`"));
            }
            let mut xyz = [0.0; 3];
            for (k, f) in fields[1..].iter().enumerate() {
                xyz[k] = number(f, n, 1, "site coordinate")?;
            }
            sites.push(Site::new(fields[0], Vector3::from(xyz)));
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(malformed(
                n,
                1,
                format!("expected 5 comma-separated fields, found {}", fields.len()),
            ));
        }
        let mut column = 1;
        let mut cols = [0usize; 5];
        for (k, f) in fields.iter().enumerate() {
            cols[k] = column;
            column += f.chars().count() + 1;
        }
        let omega = number(fields[0], n, cols[0], "omega_rad_s")?;
        let re = number(fields[3], n, cols[3], "re_J_rad_s")?;
        let im = number(fields[4], n, cols[4], "im_J_rad_s")?;
        entries.push(TabulatedEntry {
            omega,
            site_i: fields[1].trim().to_string(),
            site_j: fields[2].trim().to_string(),
            value: Complex64::new(re, im),
            line: n,
        });
    }
    TabulatedGreenSet::from_entries(sites, metadata, entries)
}

/// Renders a set in the `green-table v1` format.
pub fn write_green_table(set: &TabulatedGreenSet) -> String {
    let mut out = format!("{GREEN_TABLE_HEADER}\n");
    for (k, v) in set.metadata() {
        let _ = writeln!(out, "# {k}: {v}");
    }
    for s in set.sites() {
        let p = s.position;
        let _ = writeln!(out, "site {} {:e} {:e} {:e}", s.label, p.x, p.y, p.z);
    }
    for (omega, i, j, v) in set.entries() {
        let _ = writeln!(out, "{omega:e}, {i}, {j}, {:e}, {:e}", v.re, v.im);
    }
    out
}
