use std::collections::HashSet;
use std::path::Path;

use super::{CrystalRecord, SellmeierForm, ThermoOptic};
use crate::error::{Error, Result};

/// Validated set of crystal records, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalog {
    records: Vec<CrystalRecord>,
}

impl Catalog {
    pub fn new(records: Vec<CrystalRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            if !seen.insert(r.name.clone()) {
                return Err(Error::DuplicateName(r.name.clone()));
            }
            validate_record(r)?;
        }
        Ok(Catalog { records })
    }

    pub fn get(&self, name: &str) -> Option<&CrystalRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn require(&self, name: &str) -> Result<&CrystalRecord> {
        self.get(name).ok_or_else(|| Error::UnknownCrystal(name.to_string()))
    }

    pub fn records(&self) -> &[CrystalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog> {
    let text = std::fs::read_to_string(path)?;
    parse_catalog(&text)
}

pub fn parse_catalog(text: &str) -> Result<Catalog> {
    let records: Vec<CrystalRecord> = serde_json::from_str(text)?;
    Catalog::new(records)
}

/// The catalog shipped with the crate.
pub fn builtin_catalog() -> Catalog {
    parse_catalog(BUILTIN_CATALOG).expect("shipped catalog parses")
}

pub const BUILTIN_CATALOG: &str = include_str!("../../../../data/crystals.json");

pub fn serialize_catalog(catalog: &Catalog) -> String {
    serde_json::to_string_pretty(&catalog.records).expect("records serialize")
}

const INDEX_SAMPLES: usize = 512;

/// Check every record invariant; the error names the record and the invariant.
pub fn validate_record(r: &CrystalRecord) -> Result<()> {
    let name = r.name.as_str();
    let [lo, hi] = r.transparency;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(Error::invariant(name, format!("transparency must satisfy 0 < min < max, got [{lo}, {hi}]")));
    }
    if !r.reference_temperature.is_finite() {
        return Err(Error::invariant(name, "reference temperature not finite"));
    }
    if !(r.electro_optic_o.is_finite() && r.electro_optic_e.is_finite()) {
        return Err(Error::invariant(name, "electro-optic coefficients not finite"));
    }
    for (axis, form) in [("o", &r.sellmeier_o), ("e", &r.sellmeier_e)] {
        check_sellmeier(name, axis, form, lo, hi)?;
    }
    for (axis, eta) in [("o", &r.thermo_optic_o), ("e", &r.thermo_optic_e)] {
        check_thermo(name, axis, eta)?;
    }
    Ok(())
}

fn check_sellmeier(name: &str, axis: &str, form: &SellmeierForm, lo: f64, hi: f64) -> Result<()> {
    if form.terms.is_empty() {
        return Err(Error::invariant(name, format!("sellmeier_{axis}: at least one resonance term required")));
    }
    let coeffs = std::iter::once(form.a)
        .chain(std::iter::once(form.d))
        .chain(form.terms.iter().flat_map(|t| [t.b, t.c]));
    if coeffs.into_iter().any(|v| !v.is_finite()) {
        return Err(Error::invariant(name, format!("sellmeier_{axis}: non-finite coefficient")));
    }
    let (lo2, hi2) = (lo * lo, hi * hi);
    for t in &form.terms {
        if t.c >= lo2 && t.c <= hi2 {
            return Err(Error::invariant(
                name,
                format!("sellmeier_{axis}: pole C = {} um^2 lies inside transparency range [{lo2}, {hi2}] um^2", t.c),
            ));
        }
    }
    for i in 0..=INDEX_SAMPLES {
        let l = lo + (hi - lo) * i as f64 / INDEX_SAMPLES as f64;
        let n2 = form.n_squared(l);
        if !(n2.is_finite() && n2 > 1.0) {
            return Err(Error::invariant(
                name,
                format!("sellmeier_{axis}: n^2 = {n2} at {l} um must be finite and > 1"),
            ));
        }
    }
    Ok(())
}

fn check_thermo(name: &str, axis: &str, eta: &ThermoOptic) -> Result<()> {
    match eta {
        ThermoOptic::Constant(v) if !v.is_finite() => {
            Err(Error::invariant(name, format!("thermo_optic_{axis}: not finite")))
        }
        ThermoOptic::Constant(_) => Ok(()),
        ThermoOptic::Table(rows) => {
            if rows.is_empty() {
                return Err(Error::invariant(name, format!("thermo_optic_{axis}: empty table")));
            }
            if rows.iter().any(|(l, v)| !l.is_finite() || !v.is_finite()) {
                return Err(Error::invariant(name, format!("thermo_optic_{axis}: non-finite entry")));
            }
            if rows.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::invariant(
                    name,
                    format!("thermo_optic_{axis}: table not strictly sorted by wavelength"),
                ));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record_json(name: &str, pole: f64, lo: f64, hi: f64) -> String {
        format!(
            r#"{{"name":"{name}","symmetry":"uniaxial-negative",
            "sellmeier_o":{{"form_id":"standard","A":1.2,"terms":[{{"B":1.0,"C":{pole}}}],"D":0.0}},
            "sellmeier_e":{{"form_id":"standard","A":1.2,"terms":[{{"B":0.9,"C":0.01}}],"D":0.0}},
            "thermo_optic_o":{{"constant":-3.9e-5}},"thermo_optic_e":{{"table":[[0.4,-3e-5],[1.0,-2.9e-5]]}},
            "electro_optic_o":0.0,"electro_optic_e":0.0,
            "transparency":[{lo},{hi}],"reference_temperature":25.0}}"#
        )
    }

    #[test]
    fn minimal_valid_catalog() {
        let text = format!("[{}]", record_json("A", 0.01, 0.4, 1.1));
        let cat = parse_catalog(&text).unwrap();
        assert_eq!(cat.len(), 1);
    }

    #[test]
    fn pole_inside_range_rejected() {
        let text = format!("[{}]", record_json("BAD", 0.25, 0.4, 1.1));
        match parse_catalog(&text) {
            Err(Error::Invariant { record, invariant }) => {
                assert_eq!(record, "BAD");
                assert!(invariant.contains("pole"));
            }
            other => panic!("expected invariant error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_names_rejected() {
        let r = record_json("A", 0.01, 0.4, 1.1);
        let text = format!("[{r},{r}]");
        assert!(matches!(parse_catalog(&text), Err(Error::DuplicateName(n)) if n == "A"));
    }

    #[test]
    fn unknown_fields_rejected_with_position() {
        let r = record_json("A", 0.01, 0.4, 1.1).replace("\"symmetry\"", "\"colour\":1,\"symmetry\"");
        match parse_catalog(&format!("[{r}]")) {
            Err(Error::Parse { line, message, .. }) => {
                assert!(line >= 1);
                assert!(message.contains("colour"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_text_is_parse_error() {
        assert!(matches!(parse_catalog(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn unsorted_table_rejected() {
        let r = record_json("A", 0.01, 0.4, 1.1).replace("[[0.4,-3e-5],[1.0,-2.9e-5]]", "[[1.0,-3e-5],[0.4,-2.9e-5]]");
        assert!(matches!(parse_catalog(&format!("[{r}]")), Err(Error::Invariant { .. })));
    }

    #[test]
    fn reversed_transparency_rejected() {
        let text = format!("[{}]", record_json("A", 0.01, 1.1, 0.4));
        assert!(matches!(parse_catalog(&text), Err(Error::Invariant { .. })));
    }

    #[test]
    fn shipped_catalog_round_trips() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/crystals.json");
        let cat = load_catalog(path).unwrap();
        let again = parse_catalog(&serialize_catalog(&cat)).unwrap();
        assert_eq!(cat, again);
    }
}
