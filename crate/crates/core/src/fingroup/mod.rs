//! Finite groups, finite abelian groups and their homomorphisms.
//!
//! Table groups always use index 0 for the identity. Abelian groups are kept
//! in invariant-factor form; integer matrix work (Smith and Hermite normal
//! forms) lives in [`intmat`].

mod abelian;
pub mod catalog;
mod hom;
pub mod intmat;
mod table;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::Value;

pub use abelian::{are_isomorphic, invariant_factors_from_orders, AbelianHom, FinAbGroup};
pub(crate) use abelian::{decode, encode};
pub(crate) use hom::{abelian_generator_images, table_hom_maps};
pub use hom::{
    compose, enumerate_abelian_homs, enumerate_homs, extend_from_generators, find_isomorphism,
    is_homomorphism, Homomorphism, Subgroup,
};
pub use intmat::{hermite_normal_form, smith_normal_form, IntMatrix, Lattice, SmithForm};
pub use table::{FinGroup, DEFAULT_TABLE_BOUND};

use crate::error::{Error, Result};

impl Serialize for FinGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("kind", "table")?;
        m.serialize_entry("op_table", &self.rows())?;
        m.serialize_entry("name", self.name())?;
        m.end()
    }
}

impl Serialize for FinAbGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("kind", "abelian")?;
        m.serialize_entry("factors", self.factors())?;
        m.serialize_entry("name", &self.name())?;
        m.end()
    }
}

impl Serialize for Homomorphism {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("source", &**self.source())?;
        m.serialize_entry("target", &**self.target())?;
        m.serialize_entry("map", self.map())?;
        m.end()
    }
}

impl Serialize for AbelianHom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("source", self.source())?;
        m.serialize_entry("target", self.target())?;
        m.serialize_entry("matrix", self.matrix())?;
        m.end()
    }
}

/// A group read back from its JSON form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupJson {
    Table(FinGroup),
    Abelian(FinAbGroup),
}

/// Parses `{"kind": "table", "op_table", "name"}` or
/// `{"kind": "abelian", "factors", "name"}`.
pub fn group_from_json(v: &Value) -> Result<GroupJson> {
    let bad = |msg: &str| Error::Invalid(format!("group JSON: {msg}"));
    let name = v.get("name").and_then(Value::as_str).unwrap_or("");
    match v.get("kind").and_then(Value::as_str) {
        Some("table") => {
            let rows: Vec<Vec<usize>> = serde_json::from_value(
                v.get("op_table")
                    .cloned()
                    .ok_or_else(|| bad("missing op_table"))?,
            )
            .map_err(|e| bad(&e.to_string()))?;
            Ok(GroupJson::Table(FinGroup::from_table(name, rows)?))
        }
        Some("abelian") => {
            let factors: Vec<u64> = serde_json::from_value(
                v.get("factors")
                    .cloned()
                    .ok_or_else(|| bad("missing factors"))?,
            )
            .map_err(|e| bad(&e.to_string()))?;
            Ok(GroupJson::Abelian(FinAbGroup::from_invariant(factors)?))
        }
        _ => Err(bad("kind must be \"table\" or \"abelian\"")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn group_json_shapes() {
        let z = FinAbGroup::cyclic_product(&[2, 4]).unwrap();
        assert_eq!(
            serde_json::to_value(&z).unwrap(),
            json!({"kind": "abelian", "factors": [2, 4], "name": "Z/2 x Z/4"})
        );
        let t = z.to_fin_group().unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["kind"], "table");
        assert_eq!(v["op_table"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn group_json_reads_back() {
        for g in [catalog::s3(), catalog::q8(), FinGroup::trivial()] {
            let v = serde_json::to_value(&g).unwrap();
            match group_from_json(&v).unwrap() {
                GroupJson::Table(h) => assert_eq!(h.rows(), g.rows()),
                other => panic!("unexpected {other:?}"),
            }
        }
        let a = FinAbGroup::cyclic_product(&[3, 9]).unwrap();
        let v = serde_json::to_value(&a).unwrap();
        assert_eq!(group_from_json(&v).unwrap(), GroupJson::Abelian(a));
        assert!(group_from_json(&json!({"kind": "abelian", "factors": [4, 2]})).is_err());
        assert!(group_from_json(&json!({"kind": "ring"})).is_err());
    }

    #[test]
    fn hom_json_shapes() {
        let z4 = FinAbGroup::cyclic(4);
        let z2 = FinAbGroup::cyclic(2);
        let (_, proj) = z4.quotient(&[vec![2]]).unwrap();
        let v = serde_json::to_value(&proj).unwrap();
        assert_eq!(v["matrix"], json!([[1]]));
        assert_eq!(v["target"], serde_json::to_value(&z2).unwrap());
        let t = std::sync::Arc::new(z4.to_fin_group().unwrap());
        let h = Homomorphism::identity(t);
        let v = serde_json::to_value(&h).unwrap();
        assert_eq!(v["map"], json!([0, 1, 2, 3]));
    }
}
