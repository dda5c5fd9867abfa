use ferrysched_core::instance::{Ferry, Horizon, InstanceBuilder, NetworkMode};
use ferrysched_core::model::{Site, VarRole};
use ferrysched_core::naming::{
    constraint_name, is_valid_name, parse_constraint_name, parse_variable_name, variable_name,
};
use ferrysched_core::network::build_ferry_network;
use ferrysched_core::{FerryId, Node, PortId};
use proptest::prelude::*;

fn node() -> impl Strategy<Value = Node> {
    prop_oneof![
        (1u16..=300, 1u32..=500).prop_map(|(p, i)| Node::at(PortId(p), i)),
        Just(Node::Alpha),
        Just(Node::Beta),
        Just(Node::Gamma),
        (1u16..=300).prop_map(|k| Node::Zeta(PortId(k))),
    ]
}

fn role() -> impl Strategy<Value = VarRole> {
    prop_oneof![
        (1u16..=99).prop_map(|f| VarRole::Ferry(FerryId(f))),
        (1u16..=300).prop_map(|k| VarRole::Passenger(PortId(k))),
    ]
}

fn site() -> impl Strategy<Value = Site> {
    let port = || (1u16..=300).prop_map(PortId);
    prop_oneof![
        ((1u16..=99).prop_map(FerryId), node()).prop_map(|(ferry, node)| Site::FerryNode { ferry, node }),
        (port(), 1u32..=500).prop_map(|(port, slot)| Site::WaitingArc { port, slot }),
        (port(), node()).prop_map(|(destination, node)| Site::PaxNode { destination, node }),
        (node(), node()).prop_map(|(from, to)| Site::ServiceArc { from, to }),
        ((1u16..=99).prop_map(FerryId), port(), 1u32..=500)
            .prop_map(|(ferry, port, slot)| Site::Dwell { ferry, port, slot }),
        (port(), port(), 1u32..=500, 1u32..=500)
            .prop_map(|(destination, port, slot, until)| Site::Transfer { destination, port, slot, until }),
    ]
}

proptest! {
    #[test]
    fn variable_names_round_trip(r in role(), from in node(), to in node()) {
        let name = variable_name(r, from, to);
        prop_assert!(is_valid_name(&name));
        prop_assert_eq!(parse_variable_name(&name), Some((r, from, to)));
    }

    #[test]
    fn constraint_names_round_trip(s in site()) {
        let name = constraint_name(&s);
        prop_assert!(is_valid_name(&name));
        prop_assert_eq!(parse_constraint_name(&name), Some(s));
    }

    #[test]
    fn landing_slot_rounds_travel_up(delta in 1i64..=30, from in 1u32..=50, travel in 1i64..=300) {
        let h = Horizon::new(0, delta * 100, delta).unwrap();
        let landing = h.landing_slot(from, travel);
        // [DERIVED] the first grid time not earlier than departure plus travel.
        prop_assert!(h.time_of(landing) >= h.time_of(from) + travel);
        prop_assert!(h.time_of(landing - 1) < h.time_of(from) + travel);
    }

    #[test]
    fn service_arcs_stay_on_the_grid(
        q in 3u32..=12,
        t12 in 1i64..=50,
        t13 in 1i64..=50,
        t23 in 1i64..=50,
        mode in prop_oneof![Just(NetworkMode::Basic), Just(NetworkMode::HomeportFree)],
    ) {
        let inst = InstanceBuilder::new(Horizon::new(0, 10 * q as i64, 10).unwrap())
            .mode(mode)
            .port(1, 0)
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "F", 5, 1).both_ways(1, 2, t12).both_ways(1, 3, t13).both_ways(2, 3, t23))
            .build()
            .unwrap();
        let net = build_ferry_network(&inst, FerryId(1)).unwrap();
        let travel = |a: u16, b: u16| match (a.min(b), a.max(b)) {
            (1, 2) => t12,
            (1, 3) => t13,
            _ => t23,
        };
        let mut service = 0;
        for a in 1..=3u16 {
            for b in 1..=3u16 {
                if a != b {
                    let steps = ((travel(a, b) + 9) / 10) as u32;
                    service += q.saturating_sub(steps);
                }
            }
        }
        let count = |k| net.arcs.iter().filter(|arc| arc.kind == k).count() as u32;
        prop_assert_eq!(count(ferrysched_core::ArcKind::Service), service);
        prop_assert_eq!(count(ferrysched_core::ArcKind::Waiting), 3 * (q - 1));
    }
}
