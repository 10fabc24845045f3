//! JSON document formats.
//!
//! `gadget.json`:
//!
//! ```json
//! {"locations":["a","b"],"name":"1-toggle","states":["A","B"],
//!  "transitions":[["A","a","b","B"],["B","b","a","A"]]}
//! ```
//!
//! `system.json`: `gadgets` holds inline gadget objects, or strings naming a
//! gadget file (resolved against the system file's directory) or a built-in
//! gadget as `catalog:<key>`. Instances name their gadget by index and their
//! initial state by name. Components list `"instance:location"` strings;
//! `start` and `target` are component indices.
//!
//! ```json
//! {"components":[["0:a"],["0:b"]],"gadgets":[{...}],
//!  "instances":[{"gadget":0,"initial":"A"}],"start":0,"target":1}
//! ```
//!
//! Serialization is canonical: keys sorted, transitions sorted by their name
//! tuples, component members sorted by instance and location index.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog;
use crate::error::{Error, Result};
use crate::gadget::Gadget;
use crate::system::{Instance, System};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GadgetDoc {
    locations: Vec<String>,
    name: String,
    states: Vec<String>,
    transitions: Vec<[String; 4]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    gadget: usize,
    initial: String,
}

#[derive(Serialize, Deserialize)]
struct SystemDoc {
    components: Vec<Vec<String>>,
    gadgets: Vec<Value>,
    instances: Vec<InstanceDoc>,
    #[serde(default)]
    start: Option<usize>,
    #[serde(default)]
    target: Option<usize>,
}

fn gadget_doc(g: &Gadget) -> GadgetDoc {
    let mut transitions: Vec<[String; 4]> = g
        .transitions()
        .iter()
        .map(|t| {
            [
                g.states()[t.from_state].clone(),
                g.locations()[t.from_loc].clone(),
                g.locations()[t.to_loc].clone(),
                g.states()[t.to_state].clone(),
            ]
        })
        .collect();
    transitions.sort();
    GadgetDoc { locations: g.locations().to_vec(), name: g.name().to_string(), states: g.states().to_vec(), transitions }
}

fn gadget_from_doc(doc: GadgetDoc) -> Result<Gadget> {
    let refs: Vec<(&str, &str, &str, &str)> =
        doc.transitions.iter().map(|t| (t[0].as_str(), t[1].as_str(), t[2].as_str(), t[3].as_str())).collect();
    let states: Vec<&str> = doc.states.iter().map(String::as_str).collect();
    let locations: Vec<&str> = doc.locations.iter().map(String::as_str).collect();
    Gadget::from_names(doc.name.as_str(), &states, &locations, &refs)
}

/// Gadget with its transitions in canonical order.
pub fn canonical_gadget(g: &Gadget) -> Gadget {
    gadget_from_doc(gadget_doc(g)).expect("canonicalizing a valid gadget")
}

pub fn gadget_to_value(g: &Gadget) -> Value {
    serde_json::to_value(gadget_doc(g)).expect("gadget serializes")
}

pub fn gadget_to_json(g: &Gadget) -> String {
    serde_json::to_string(&gadget_doc(g)).expect("gadget serializes")
}

pub fn gadget_from_value(v: Value) -> Result<Gadget> {
    gadget_from_doc(serde_json::from_value(v)?)
}

pub fn gadget_from_json(s: &str) -> Result<Gadget> {
    gadget_from_doc(serde_json::from_str(s)?)
}

pub fn read_gadget(path: &Path) -> Result<Gadget> {
    gadget_from_json(&std::fs::read_to_string(path)?)
}

fn resolve_gadget(v: Value, base: Option<&Path>) -> Result<Gadget> {
    match v {
        Value::String(s) => {
            if let Some(key) = s.strip_prefix("catalog:") {
                return Ok(catalog::get(key)?.gadget);
            }
            let p = match base {
                Some(b) => b.join(&s),
                None => s.into(),
            };
            read_gadget(&p)
        }
        other => gadget_from_value(other),
    }
}

fn system_doc(sys: &System) -> SystemDoc {
    let components = sys
        .components()
        .iter()
        .map(|members| {
            let mut m = members.clone();
            m.sort_unstable();
            m.into_iter().map(|(i, loc)| format!("{i}:{}", sys.gadget_of(i).locations()[loc])).collect()
        })
        .collect();
    SystemDoc {
        components,
        gadgets: sys.gadgets().iter().map(gadget_to_value).collect(),
        instances: sys
            .instances()
            .iter()
            .map(|inst| InstanceDoc {
                gadget: inst.gadget,
                initial: sys.gadgets()[inst.gadget].states()[inst.initial].clone(),
            })
            .collect(),
        start: sys.start(),
        target: sys.target(),
    }
}

fn system_from_doc(doc: SystemDoc, base: Option<&Path>) -> Result<System> {
    let gadgets = doc
        .gadgets
        .into_iter()
        .map(|v| resolve_gadget(v, base))
        .collect::<Result<Vec<_>>>()?;
    let mut instances = Vec::with_capacity(doc.instances.len());
    for (i, d) in doc.instances.iter().enumerate() {
        let g = gadgets
            .get(d.gadget)
            .ok_or_else(|| Error::InvalidSystem(format!("instance {i} references missing gadget {}", d.gadget)))?;
        let initial = g.state_index(&d.initial).ok_or_else(|| Error::UnknownId(d.initial.clone()))?;
        instances.push(Instance { gadget: d.gadget, initial });
    }
    let mut components = Vec::with_capacity(doc.components.len());
    for members in &doc.components {
        let mut comp = Vec::with_capacity(members.len());
        for m in members {
            let (i, loc) = m.split_once(':').ok_or_else(|| Error::InvalidInput(format!("bad location reference {m}")))?;
            let i: usize = i.parse().map_err(|_| Error::InvalidInput(format!("bad instance index in {m}")))?;
            let inst = instances.get(i).ok_or_else(|| Error::UnknownId(m.clone()))?;
            let loc = gadgets[inst.gadget].location_index(loc).ok_or_else(|| Error::UnknownId(m.clone()))?;
            comp.push((i, loc));
        }
        components.push(comp);
    }
    System::new(gadgets, instances, components, doc.start, doc.target)
}

pub fn system_to_value(sys: &System) -> Value {
    serde_json::to_value(system_doc(sys)).expect("system serializes")
}

pub fn system_to_json(sys: &System) -> String {
    serde_json::to_string(&system_doc(sys)).expect("system serializes")
}

pub fn system_from_value(v: Value, base: Option<&Path>) -> Result<System> {
    system_from_doc(serde_json::from_value(v)?, base)
}

pub fn system_from_json(s: &str) -> Result<System> {
    system_from_doc(serde_json::from_str(s)?, None)
}

pub fn read_system(path: &Path) -> Result<System> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    system_from_value(v, path.parent())
}

/// A system exposing some components to the outside, with helper agents.
#[derive(Clone, Debug)]
pub struct GadgetNetwork {
    pub system: System,
    pub boundary: Vec<usize>,
    pub helpers: Vec<usize>,
    pub cap: Option<usize>,
}

pub fn network_to_json(n: &GadgetNetwork) -> String {
    let mut v = system_to_value(&n.system);
    let obj = v.as_object_mut().expect("system is an object");
    obj.insert("boundary".into(), serde_json::to_value(&n.boundary).expect("ints"));
    obj.insert("cap".into(), serde_json::to_value(n.cap).expect("ints"));
    obj.insert("helpers".into(), serde_json::to_value(&n.helpers).expect("ints"));
    serde_json::to_string(&v).expect("network serializes")
}

pub fn network_from_value(mut v: Value, base: Option<&Path>) -> Result<GadgetNetwork> {
    let obj = v.as_object_mut().ok_or_else(|| Error::InvalidInput("network must be an object".into()))?;
    let take = |obj: &mut serde_json::Map<String, Value>, k: &str| obj.remove(k).unwrap_or(Value::Null);
    let boundary: Vec<usize> = serde_json::from_value(take(obj, "boundary"))?;
    let helpers: Vec<usize> = match take(obj, "helpers") {
        Value::Null => Vec::new(),
        h => serde_json::from_value(h)?,
    };
    let cap: Option<usize> = serde_json::from_value(take(obj, "cap"))?;
    let system = system_from_value(v, base)?;
    for &c in boundary.iter().chain(&helpers) {
        if c >= system.component_count() {
            return Err(Error::InvalidSystem(format!("component {c} does not exist")));
        }
    }
    Ok(GadgetNetwork { system, boundary, helpers, cap })
}

pub fn read_network(path: &Path) -> Result<GadgetNetwork> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    network_from_value(v, path.parent())
}

/// Transition tuples of a gadget as names, in canonical order.
pub fn named_transitions(g: &Gadget) -> Vec<[String; 4]> {
    gadget_doc(g).transitions
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_list, locking_2_toggle, one_toggle};
    use crate::system::SystemBuilder;

    #[test]
    fn catalog_round_trips() {
        for e in catalog_list() {
            let s = gadget_to_json(&e.gadget);
            let g = gadget_from_json(&s).unwrap();
            assert_eq!(gadget_to_json(&g), s, "{}", e.key);
            assert_eq!(g.states(), e.gadget.states());
            assert_eq!(g.locations(), e.gadget.locations());
            let mut a: Vec<_> = e.gadget.transitions().to_vec();
            let mut b: Vec<_> = g.transitions().to_vec();
            a.sort_by_key(|t| (t.from_state, t.from_loc, t.to_loc, t.to_state));
            b.sort_by_key(|t| (t.from_state, t.from_loc, t.to_loc, t.to_state));
            assert_eq!(a, b, "{}", e.key);
        }
    }

    #[test]
    fn gadget_keys_are_sorted() {
        let s = gadget_to_json(&one_toggle());
        assert_eq!(
            s,
            r#"{"locations":["a","b"],"name":"1-toggle","states":["A","B"],"transitions":[["A","a","b","B"],["B","b","a","A"]]}"#
        );
    }

    #[test]
    fn system_round_trip_and_catalog_reference() {
        let mut b = SystemBuilder::new();
        let l2t = locking_2_toggle();
        let g0 = b.add_instance(&l2t, 2);
        let g1 = b.add_instance(&one_toggle(), 0);
        let top = b.node_of(g0, 0);
        b.attach(g1, 0, top);
        b.set_start(top);
        let (sys, _) = b.build().unwrap();
        let s = system_to_json(&sys);
        let back = system_from_json(&s).unwrap();
        assert_eq!(system_to_json(&back), s);

        let doc = r#"{"components":[["0:a"],["0:b"]],"gadgets":["catalog:1-toggle"],
            "instances":[{"gadget":0,"initial":"B"}],"start":1}"#;
        let sys = system_from_json(doc).unwrap();
        assert_eq!(sys.initial_states(), vec![1]);
        assert_eq!(sys.start(), Some(1));
    }

    #[test]
    fn bad_documents() {
        assert!(gadget_from_json("{}").is_err());
        let doc = r#"{"components":[["0:zz"]],"gadgets":["catalog:1-toggle"],"instances":[{"gadget":0,"initial":"A"}]}"#;
        assert!(matches!(system_from_json(doc), Err(Error::UnknownId(_))));
    }
}
