//! JSON instance documents.
//!
//! ```json
//! {
//!   "horizon": { "start": "05:00", "end": "24:00", "delta": 10 },
//!   "ports": [ { "id": 1, "name": "Mainland", "berths": 2, "transfer_slots": 1 } ],
//!   "ferries": [ { "id": 1, "name": "Aava", "capacity": 120, "home": 1,
//!                  "cost_moving_per_hour": 900, "cost_docked_per_hour": "120.5",
//!                  "shift_salary": 0, "dwell": { "1": 2 }, "travel": { "1-2": 35 } } ],
//!   "demands": [ { "from": 1, "to": 2, "time": "07:15", "aeq": 40 } ],
//!   "costs": { "lambda": 1, "nu": 1, "big_m": 11400, "mode": "HOMEPORT_FREE",
//!              "dwell_form": "FULL", "transfer_form": "FULL", "crew_window": ["11:00", "13:00"] }
//! }
//! ```
//!
//! Times are `"HH:MM"` strings or integer minutes after midnight. Rational
//! fields take JSON numbers, decimal strings or `"p/q"` strings. Every key
//! of `costs` is optional and falls back to the documented defaults. Unknown
//! keys are rejected.

use std::collections::BTreeMap;

use ferrysched_core::instance::{
    format_clock, parse_clock, CostParams, Demand, DwellForm, Ferry, Horizon, InstanceError, Minutes,
    NetworkMode, Port, PortId, ProblemInstance, TransferForm,
};
use ferrysched_core::num::{self, Rational};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeValue {
    Minutes(i64),
    Clock(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalValue {
    Number(serde_json::Number),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonDoc {
    pub start: TimeValue,
    pub end: TimeValue,
    pub delta: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortDoc {
    pub id: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub berths: u32,
    #[serde(default)]
    pub transfer_slots: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FerryDoc {
    pub id: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub capacity: u64,
    pub home: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_moving_per_hour: Option<RationalValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_docked_per_hour: Option<RationalValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_salary: Option<RationalValue>,
    #[serde(default)]
    pub dwell: BTreeMap<String, u32>,
    pub travel: BTreeMap<String, i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandDoc {
    pub from: u16,
    pub to: u16,
    pub time: TimeValue,
    pub aeq: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<RationalValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<RationalValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<RationalValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell_form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer_form: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crew_window: Option<[TimeValue; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub horizon: HorizonDoc,
    pub ports: Vec<PortDoc>,
    #[serde(default)]
    pub ferries: Vec<FerryDoc>,
    #[serde(default)]
    pub demands: Vec<DemandDoc>,
    #[serde(default)]
    pub costs: CostsDoc,
}

fn time_of(v: &TimeValue, path: &str) -> Result<Minutes, InstanceError> {
    match v {
        TimeValue::Minutes(m) => Ok(*m),
        TimeValue::Clock(s) => parse_clock(s).ok_or_else(|| InstanceError::schema(path, format!("`{s}` is not HH:MM"))),
    }
}

fn rational_of(v: &Option<RationalValue>, path: &str) -> Result<Option<Rational>, InstanceError> {
    let Some(v) = v else { return Ok(None) };
    let text = match v {
        RationalValue::Number(n) => n.to_string(),
        RationalValue::Text(s) => s.clone(),
    };
    num::parse_decimal(&text)
        .map(Some)
        .ok_or_else(|| InstanceError::schema(path, format!("`{text}` is not a number or fraction")))
}

fn rational_doc(r: &Rational) -> RationalValue {
    if num::is_integral(r) {
        if let Ok(n) = r.to_integer().to_string().parse::<i64>() {
            return RationalValue::Number(n.into());
        }
    }
    let text = num::format_decimal(r);
    if num::parse_decimal(&text).as_ref() == Some(r) {
        RationalValue::Text(text)
    } else {
        RationalValue::Text(format!("{}/{}", r.numer(), r.denom()))
    }
}

fn port_key(key: &str, path: &str) -> Result<PortId, InstanceError> {
    key.trim()
        .parse::<u16>()
        .map(PortId)
        .map_err(|_| InstanceError::schema(path, format!("`{key}` is not a port id")))
}

fn mode_of(text: &str, path: &str) -> Result<NetworkMode, InstanceError> {
    [NetworkMode::Basic, NetworkMode::HomeportFree, NetworkMode::TwoShift]
        .into_iter()
        .find(|m| m.as_str().eq_ignore_ascii_case(text))
        .ok_or_else(|| InstanceError::schema(path, format!("unknown mode `{text}`")))
}

fn dwell_form_of(text: &str, path: &str) -> Result<DwellForm, InstanceError> {
    [DwellForm::Full, DwellForm::Simplified]
        .into_iter()
        .find(|m| m.as_str().eq_ignore_ascii_case(text))
        .ok_or_else(|| InstanceError::schema(path, format!("unknown dwell form `{text}`")))
}

fn transfer_form_of(text: &str, path: &str) -> Result<TransferForm, InstanceError> {
    [TransferForm::Full, TransferForm::Single]
        .into_iter()
        .find(|m| m.as_str().eq_ignore_ascii_case(text))
        .ok_or_else(|| InstanceError::schema(path, format!("unknown transfer form `{text}`")))
}

/// Parses and validates an instance document.
pub fn load_instance(text: &str) -> Result<ProblemInstance, InstanceError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: InstanceDoc = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        InstanceError::schema(if path == "." { String::from("document") } else { path }, e.inner().to_string())
    })?;
    from_doc(&doc)
}

pub fn from_doc(doc: &InstanceDoc) -> Result<ProblemInstance, InstanceError> {
    let start = time_of(&doc.horizon.start, "horizon.start")?;
    let end = time_of(&doc.horizon.end, "horizon.end")?;
    let horizon = Horizon::new(start, end, doc.horizon.delta)?;

    let ports = doc
        .ports
        .iter()
        .map(|p| Port::new(p.id, p.name.clone().unwrap_or_else(|| format!("P{}", p.id)), p.berths, p.transfer_slots))
        .collect();

    let mut ferries = Vec::new();
    for (i, f) in doc.ferries.iter().enumerate() {
        let path = |field: &str| format!("ferries[{i}].{field}");
        let mut ferry = Ferry::new(f.id, f.name.clone().unwrap_or_else(|| format!("F{}", f.id)), f.capacity, f.home);
        let moving = rational_of(&f.cost_moving_per_hour, &path("cost_moving_per_hour"))?.unwrap_or_default();
        let docked = rational_of(&f.cost_docked_per_hour, &path("cost_docked_per_hour"))?.unwrap_or_default();
        ferry = ferry.rates_per_hour(moving, docked);
        ferry.shift_salary = rational_of(&f.shift_salary, &path("shift_salary"))?.unwrap_or_default();
        for (key, &slots) in &f.dwell {
            let p = path(&format!("dwell.{key}"));
            ferry.dwell.insert(port_key(key, &p)?, slots);
        }
        for (key, &minutes) in &f.travel {
            let p = path(&format!("travel.{key}"));
            let (a, b) = key.split_once('-').ok_or_else(|| InstanceError::schema(&p, "travel keys look like `k-h`"))?;
            ferry.travel.insert((port_key(a, &p)?, port_key(b, &p)?), minutes);
        }
        ferries.push(ferry);
    }

    let mut demands = Vec::new();
    for (i, d) in doc.demands.iter().enumerate() {
        demands.push(Demand::new(d.from, d.to, time_of(&d.time, &format!("demands[{i}].time"))?, d.aeq));
    }

    let c = &doc.costs;
    let mut costs = CostParams::defaults(&horizon);
    if let Some(v) = rational_of(&c.lambda, "costs.lambda")? {
        costs.lambda = v;
    }
    if let Some(v) = rational_of(&c.nu, "costs.nu")? {
        costs.nu = v;
    }
    if let Some(v) = rational_of(&c.big_m, "costs.big_m")? {
        costs.big_m = v;
    }
    if let Some(m) = &c.mode {
        costs.mode = mode_of(m, "costs.mode")?;
    }
    if let Some(m) = &c.dwell_form {
        costs.dwell_form = dwell_form_of(m, "costs.dwell_form")?;
    }
    if let Some(m) = &c.transfer_form {
        costs.transfer_form = transfer_form_of(m, "costs.transfer_form")?;
    }
    if let Some([t1, t2]) = &c.crew_window {
        costs.crew_window = Some((time_of(t1, "costs.crew_window[0]")?, time_of(t2, "costs.crew_window[1]")?));
    }
    ProblemInstance::new(ports, ferries, demands, horizon, costs)
}

/// Document form of an instance; [`from_doc`] of the result is equal to `inst`.
pub fn to_doc(inst: &ProblemInstance) -> InstanceDoc {
    let clock = |m: Minutes| TimeValue::Clock(format_clock(m));
    let h = inst.horizon();
    let costs = inst.costs();
    InstanceDoc {
        horizon: HorizonDoc { start: clock(h.start()), end: clock(h.end()), delta: h.delta() },
        ports: inst
            .ports()
            .iter()
            .map(|p| PortDoc { id: p.id.0, name: Some(p.name.clone()), berths: p.berths, transfer_slots: p.transfer_slots })
            .collect(),
        ferries: inst
            .ferries()
            .iter()
            .map(|f| FerryDoc {
                id: f.id.0,
                name: Some(f.name.clone()),
                capacity: f.capacity,
                home: f.home.0,
                cost_moving_per_hour: Some(rational_doc(&f.moving_rate_per_hour())),
                cost_docked_per_hour: Some(rational_doc(&f.docked_rate_per_hour())),
                shift_salary: Some(rational_doc(&f.shift_salary)),
                dwell: f.dwell.iter().map(|(k, &w)| (k.0.to_string(), w)).collect(),
                travel: f.travel.iter().map(|((a, b), &t)| (format!("{}-{}", a.0, b.0), t)).collect(),
            })
            .collect(),
        demands: inst
            .demands()
            .iter()
            .map(|d| DemandDoc { from: d.origin.0, to: d.destination.0, time: clock(d.time), aeq: d.volume })
            .collect(),
        costs: CostsDoc {
            lambda: Some(rational_doc(&costs.lambda)),
            nu: Some(rational_doc(&costs.nu)),
            big_m: Some(rational_doc(&costs.big_m)),
            mode: Some(costs.mode.as_str().into()),
            dwell_form: Some(costs.dwell_form.as_str().into()),
            transfer_form: Some(costs.transfer_form.as_str().into()),
            crew_window: costs.crew_window.map(|(a, b)| [clock(a), clock(b)]),
        },
    }
}

/// Pretty-printed JSON document.
pub fn save_instance(inst: &ProblemInstance) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(inst)).expect("instance documents serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ferrysched_core::num::ratio;

    const MINIMAL: &str = r#"{
        "horizon": { "start": "06:00", "end": "07:00", "delta": 10 },
        "ports": [ { "id": 1, "berths": 1 }, { "id": 2, "berths": 1 } ],
        "ferries": [ { "id": 1, "capacity": 4, "home": 1, "cost_moving_per_hour": 30,
                       "cost_docked_per_hour": "7.5", "travel": { "1-2": 20, "2-1": 20 } } ],
        "demands": [ { "from": 1, "to": 2, "time": "06:03", "aeq": 2 } ]
    }"#;

    #[test]
    fn minimal_document_loads() {
        let inst = load_instance(MINIMAL).unwrap();
        assert_eq!(inst.horizon().slots(), 6);
        assert_eq!(inst.ferries()[0].docked_rate, ratio(1, 8));
        assert_eq!(inst.demands()[0].slot, 2);
        assert_eq!(inst.costs().mode, NetworkMode::HomeportFree);
    }

    #[test]
    fn full_day_has_114_slots() {
        let text = MINIMAL.replace("\"06:00\"", "\"05:00\"").replace("\"07:00\"", "\"24:00\"");
        assert_eq!(load_instance(&text).unwrap().horizon().slots(), 114);
    }

    #[test]
    fn unknown_keys_and_bad_fields_report_paths() {
        let err = load_instance(&MINIMAL.replace("\"berths\": 1 }, {", "\"berths\": 1, \"cranes\": 2 }, {")).unwrap_err();
        assert!(err.path().starts_with("ports[0]"), "{err}");
        let err = load_instance(&MINIMAL.replace("\"1-2\"", "\"1to2\"")).unwrap_err();
        assert_eq!(err.path(), "ferries[0].travel.1to2");
        let err = load_instance(&MINIMAL.replace("\"06:03\"", "\"6h03\"")).unwrap_err();
        assert_eq!(err.path(), "demands[0].time");
    }

    #[test]
    fn save_and_load_round_trip() {
        let inst = load_instance(MINIMAL).unwrap();
        let again = load_instance(&save_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }
}
