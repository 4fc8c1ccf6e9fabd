use num_complex::Complex64;
use std::collections::BTreeMap;

use super::{GreenProvider, ProjectedGreen, Site, Vec3};
use crate::constants::DEBYE;
use crate::{Error, Result};

/// Metadata key naming the dipole (debye) the tabulated rates refer to.
pub const REFERENCE_DIPOLE_KEY: &str = "reference_dipole_debye";

/// One tabulated value `J_ij(ω)` in rad/s.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedEntry {
    pub omega: f64,
    pub site_i: String,
    pub site_j: String,
    pub value: Complex64,
    /// Source line, for diagnostics (0 when not read from a file).
    pub line: usize,
}

/// Externally computed projected Green values on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedGreenSet {
    sites: Vec<Site>,
    frequencies: Vec<f64>,
    /// `(i, j)` → value per grid frequency.
    values: BTreeMap<(usize, usize), Vec<Complex64>>,
    metadata: Vec<(String, String)>,
}

impl TabulatedGreenSet {
    pub fn from_entries(
        sites: Vec<Site>,
        metadata: Vec<(String, String)>,
        entries: Vec<TabulatedEntry>,
    ) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::validation("green table declares no sites"));
        }
        for (n, s) in sites.iter().enumerate() {
            if sites[..n].iter().any(|o| o.label == s.label) {
                return Err(Error::validation(format!("site `{}` declared twice", s.label)));
            }
        }
        let index_of = |label: &str, line: usize| {
            sites
                .iter()
                .position(|s| s.label == label)
                .ok_or_else(|| Error::validation(format!("line {line}: unknown site `{label}`")))
        };

        let mut frequencies: Vec<f64> = entries.iter().map(|e| e.omega).collect();
        if frequencies.iter().any(|w| !w.is_finite()) {
            return Err(Error::validation("non-finite frequency in green table"));
        }
        frequencies.sort_by(f64::total_cmp);
        frequencies.dedup();
        if frequencies.is_empty() {
            return Err(Error::validation("green table has no data lines"));
        }

        let n = sites.len();
        let mut slots: BTreeMap<(usize, usize), Vec<Option<Complex64>>> = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                slots.insert((i, j), vec![None; frequencies.len()]);
            }
        }
        for e in &entries {
            let i = index_of(&e.site_i, e.line)?;
            let j = index_of(&e.site_j, e.line)?;
            let w = frequencies
                .binary_search_by(|f| f.total_cmp(&e.omega))
                .expect("frequency collected above");
            let cell = &mut slots.get_mut(&(i, j)).expect("all pairs allocated")[w];
            if cell.is_some() {
                return Err(Error::validation(format!(
                    "line {}: duplicate entry for (omega = {:e}, {}, {}) is ambiguous",
                    e.line, e.omega, e.site_i, e.site_j
                )));
            }
            if i == j && e.value.im < 0.0 {
                return Err(Error::validation(format!(
                    "line {}: passivity violated at site `{}`, omega = {:e} rad/s: Im J = {:e} < 0",
                    e.line, e.site_i, e.omega, e.value.im
                )));
            }
            *cell = Some(e.value);
        }

        let mut values = BTreeMap::new();
        for ((i, j), column) in slots {
            let mut filled = Vec::with_capacity(column.len());
            for (w, v) in column.into_iter().enumerate() {
                match v {
                    Some(v) => filled.push(v),
                    None => {
                        return Err(Error::validation(format!(
                            "missing pair ({}, {}) at omega = {:e} rad/s",
                            sites[i].label, sites[j].label, frequencies[w]
                        )))
                    }
                }
            }
            values.insert((i, j), filled);
        }

        let set = TabulatedGreenSet {
            sites,
            frequencies,
            values,
            metadata,
        };
        set.reference_dipole()?;
        Ok(set)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn metadata(&self) -> &[(String, String)] {
        &self.metadata
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Number of stored `(ω, i, j)` values.
    pub fn len(&self) -> usize {
        self.values.len() * self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Iterates over all entries in (pair, frequency) order.
    pub fn entries(&self) -> impl Iterator<Item = (f64, &str, &str, Complex64)> + '_ {
        self.values.iter().flat_map(move |(&(i, j), column)| {
            column.iter().zip(&self.frequencies).map(move |(v, &w)| {
                (w, self.sites[i].label.as_str(), self.sites[j].label.as_str(), *v)
            })
        })
    }

    fn reference_dipole(&self) -> Result<Option<f64>> {
        match self.metadata_value(REFERENCE_DIPOLE_KEY) {
            None => Ok(None),
            Some(text) => match text.trim().parse::<f64>() {
                Ok(d) if d > 0.0 => Ok(Some(d * DEBYE)),
                _ => Err(Error::validation(format!(
                    "metadata `{REFERENCE_DIPOLE_KEY}` must be a positive number, got `{text}`"
                ))),
            },
        }
    }

    fn site_index(&self, label: &str) -> Result<usize> {
        self.sites
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSite(label.to_string()))
    }

    /// Linear interpolation in ω of real and imaginary parts; grid hits
    /// return the stored value unchanged.
    pub fn tabulated_projected(&self, site_a: &str, site_b: &str, omega: f64) -> Result<ProjectedGreen> {
        let i = self.site_index(site_a)?;
        let j = self.site_index(site_b)?;
        let column = &self.values[&(i, j)];
        let (min, max) = (self.frequencies[0], *self.frequencies.last().unwrap());
        if !(omega >= min && omega <= max) {
            return Err(Error::OutOfRange { omega, min, max });
        }
        let value = match self.frequencies.binary_search_by(|f| f.total_cmp(&omega)) {
            Ok(w) => column[w],
            Err(hi) => {
                let lo = hi - 1;
                let (w0, w1) = (self.frequencies[lo], self.frequencies[hi]);
                let f = (omega - w0) / (w1 - w0);
                column[lo] * (1.0 - f) + column[hi] * f
            }
        };
        Ok(ProjectedGreen::new(value))
    }
}

impl GreenProvider for TabulatedGreenSet {
    fn projected(&self, a: &Site, b: &Site, omega: f64, d: &Vec3) -> Result<ProjectedGreen> {
        let j = self.tabulated_projected(&a.label, &b.label, omega)?;
        Ok(match self.reference_dipole()? {
            Some(d_ref) => j.scaled(d.norm_squared() / (d_ref * d_ref)),
            None => j,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sites() -> Vec<Site> {
        vec![Site::on_axis("a", 0.0), Site::on_axis("b", 1e-7)]
    }

    fn entries(bad_self: Option<f64>) -> Vec<TabulatedEntry> {
        let mut out = vec![];
        let mut line = 1;
        for (w, scale) in [(1.0, 1.0), (2.0, 3.0), (4.0, 5.0)] {
            for (i, j) in [("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")] {
                let mut value = if i == j {
                    Complex64::new(0.1 * scale, 2.0 * scale)
                } else {
                    Complex64::new(0.5 * scale, -0.25 * scale)
                };
                if let Some(im) = bad_self {
                    if i == "a" && j == "a" && w == 2.0 {
                        value.im = im;
                    }
                }
                out.push(TabulatedEntry {
                    omega: w,
                    site_i: i.into(),
                    site_j: j.into(),
                    value,
                    line,
                });
                line += 1;
            }
        }
        out
    }

    #[test]
    fn exact_grid_hit_and_midpoint() {
        let set = TabulatedGreenSet::from_entries(sites(), vec![], entries(None)).unwrap();
        assert_eq!(set.len(), 12);
        let hit = set.tabulated_projected("a", "b", 2.0).unwrap().value();
        assert_eq!(hit, Complex64::new(1.5, -0.75));
        let mid = set.tabulated_projected("a", "a", 3.0).unwrap().value();
        assert_eq!(mid, (Complex64::new(0.3, 6.0) + Complex64::new(0.5, 10.0)) / 2.0);
    }

    #[test]
    fn refuses_extrapolation_and_unknown_sites() {
        let set = TabulatedGreenSet::from_entries(sites(), vec![], entries(None)).unwrap();
        assert!(matches!(set.tabulated_projected("a", "b", 4.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(set.tabulated_projected("a", "c", 2.0), Err(Error::UnknownSite(_))));
    }

    #[test]
    fn rejects_active_self_term() {
        let err = TabulatedGreenSet::from_entries(sites(), vec![], entries(Some(-1e-3))).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`a`") && msg.contains("2e0"), "{msg}");
    }

    #[test]
    fn rejects_duplicates_and_gaps() {
        let mut dup = entries(None);
        dup.push(dup[3].clone());
        assert!(TabulatedGreenSet::from_entries(sites(), vec![], dup)
            .unwrap_err()
            .to_string()
            .contains("ambiguous"));
        let mut gap = entries(None);
        gap.remove(5);
        assert!(TabulatedGreenSet::from_entries(sites(), vec![], gap)
            .unwrap_err()
            .to_string()
            .contains("missing pair"));
    }
}
