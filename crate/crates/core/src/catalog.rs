//! Built-in intersection forms with documented admissible points.
//!
//! Each entry ships as a manifold JSON file and is loaded through
//! [`IntersectionForm::from_json`]. `CY3GEN` is synthetic test data shaped
//! like a Calabi–Yau threefold with `h^{1,1} = 2`.

use crate::class::CohClass;
use crate::error::{Error, Result};
use crate::intersection::IntersectionForm;

pub struct CatalogEntry {
    pub name: &'static str,
    pub json: &'static str,
    pub default_omega: &'static [f64],
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "P1XP1",
        json: include_str!("../catalog/P1XP1.json"),
        default_omega: &[1.0, 1.0],
    },
    CatalogEntry {
        name: "P3",
        json: include_str!("../catalog/P3.json"),
        default_omega: &[1.0],
    },
    CatalogEntry {
        name: "QUINTIC",
        json: include_str!("../catalog/QUINTIC.json"),
        default_omega: &[1.0],
    },
    CatalogEntry {
        name: "BLP2",
        json: include_str!("../catalog/BLP2.json"),
        default_omega: &[2.0, -1.0],
    },
    CatalogEntry {
        name: "LOR3",
        json: include_str!("../catalog/LOR3.json"),
        default_omega: &[1.0, 0.0, 0.0],
    },
    CatalogEntry {
        name: "CY3GEN",
        json: include_str!("../catalog/CY3GEN.json"),
        default_omega: &[1.0, 1.0],
    },
];

impl CatalogEntry {
    pub fn form(&self) -> IntersectionForm {
        IntersectionForm::from_json(self.json).expect("catalog entries parse")
    }

    pub fn default_omega(&self) -> CohClass {
        CohClass::new(self.default_omega.to_vec())
    }
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|e| e.name)
}

/// Looks up an entry by name, case-insensitively.
pub fn entry(name: &str) -> Option<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// The form for a catalog name.
pub fn form(name: &str) -> Result<IntersectionForm> {
    entry(name)
        .map(CatalogEntry::form)
        .ok_or_else(|| Error::InvalidInput(format!("unknown catalog entry {name:?}")))
}

/// The documented default point for a catalog name.
pub fn default_omega(name: &str) -> Option<CohClass> {
    entry(name).map(CatalogEntry::default_omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lefschetz::ConePoint;

    #[test]
    fn every_entry_parses_and_admits_its_default() {
        for e in CATALOG {
            let f = e.form();
            assert_eq!(f.name(), e.name);
            assert_eq!(f.rank(), e.default_omega.len());
            ConePoint::new(&f, e.default_omega()).unwrap();
        }
    }

    #[test]
    fn round_trip_through_json() {
        for e in CATALOG {
            let f = e.form();
            let again = IntersectionForm::from_json(&f.to_json()).unwrap();
            assert_eq!(again, f);
        }
    }

    #[test]
    fn lookup() {
        assert!(entry("lor3").is_some());
        assert!(form("nope").is_err());
        assert_eq!(names().count(), 6);
    }
}
