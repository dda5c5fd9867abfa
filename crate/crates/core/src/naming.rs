//! Deterministic names for variables and constraints.
//!
//! Variables: `Y_f<f>_<from>_<to>` for ferry arcs and `X_d<k>_<from>_<to>`
//! for passenger arcs of destination `k`. Nodes print as `<port>_<slot>`,
//! `A` (alpha), `G` (gamma), `B` (beta) or `Z<port>` (passenger sink), so
//! `Y_f1_1_3_2_5` is ferry 1 sailing from port 1 slot 3 to port 2 slot 5.
//!
//! Constraints: `FB_f<f>_<node>`, `BERTH_<port>_<slot>`, `PB_d<k>_<node>`,
//! `CAP_<from>_<to>`, `DW_f<f>_<port>_<slot>`, `TR_d<k>_<port>_<slot>_<until>`.
//!
//! Every name uses only `[A-Za-z0-9_]` and stays far below 255 characters.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::instance::{FerryId, PortId};
use crate::model::{Site, VarRole};
use crate::network::Node;

pub const MAX_NAME_LEN: usize = 255;

pub fn variable_name(role: VarRole, from: Node, to: Node) -> String {
    match role {
        VarRole::Ferry(f) => format!("Y_f{}_{}_{}", f.0, from, to),
        VarRole::Passenger(k) => format!("X_d{}_{}_{}", k.0, from, to),
    }
}

pub fn constraint_name(site: &Site) -> String {
    match *site {
        Site::FerryNode { ferry, node } => format!("FB_f{}_{}", ferry.0, node),
        Site::WaitingArc { port, slot } => format!("BERTH_{}_{}", port.0, slot),
        Site::PaxNode { destination, node } => format!("PB_d{}_{}", destination.0, node),
        Site::ServiceArc { from, to } => format!("CAP_{from}_{to}"),
        Site::Dwell { ferry, port, slot } => format!("DW_f{}_{}_{}", ferry.0, port.0, slot),
        Site::Transfer { destination, port, slot, until } => {
            format!("TR_d{}_{}_{}_{}", destination.0, port.0, slot, until)
        }
    }
}

/// Whether `name` fits the scheme's character set and length limit.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.len() <= MAX_NAME_LEN && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn parse_u16(token: &str) -> Option<u16> {
    if token.is_empty() || token.starts_with('0') || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

fn parse_u32(token: &str) -> Option<u32> {
    if token.is_empty() || token.starts_with('0') || !token.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    token.parse().ok()
}

/// Parses a sequence of node tokens, consuming the whole slice.
fn parse_nodes(tokens: &[&str]) -> Option<Vec<Node>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i];
        let node = match t {
            "A" => Node::Alpha,
            "G" => Node::Gamma,
            "B" => Node::Beta,
            _ if t.starts_with('Z') => Node::Zeta(PortId(parse_u16(&t[1..])?)),
            _ => {
                let port = parse_u16(t)?;
                let slot = parse_u32(tokens.get(i + 1)?)?;
                i += 1;
                Node::at(PortId(port), slot)
            }
        };
        out.push(node);
        i += 1;
    }
    Some(out)
}

/// Inverse of [`variable_name`].
pub fn parse_variable_name(name: &str) -> Option<(VarRole, Node, Node)> {
    let tokens: Vec<&str> = name.split('_').collect();
    if tokens.len() < 4 {
        return None;
    }
    let role = match (tokens[0], tokens[1]) {
        ("Y", owner) if owner.starts_with('f') => VarRole::Ferry(FerryId(parse_u16(&owner[1..])?)),
        ("X", owner) if owner.starts_with('d') => VarRole::Passenger(PortId(parse_u16(&owner[1..])?)),
        _ => return None,
    };
    match parse_nodes(&tokens[2..])?.as_slice() {
        [from, to] => Some((role, *from, *to)),
        _ => None,
    }
}

/// Inverse of [`constraint_name`].
pub fn parse_constraint_name(name: &str) -> Option<Site> {
    let tokens: Vec<&str> = name.split('_').collect();
    let owner = |t: &str, prefix: char| -> Option<u16> { parse_u16(t.strip_prefix(prefix)?) };
    let site = match *tokens.first()? {
        "FB" => {
            let ferry = FerryId(owner(tokens.get(1)?, 'f')?);
            match parse_nodes(&tokens[2..])?.as_slice() {
                [node] => Site::FerryNode { ferry, node: *node },
                _ => return None,
            }
        }
        "PB" => {
            let destination = PortId(owner(tokens.get(1)?, 'd')?);
            match parse_nodes(&tokens[2..])?.as_slice() {
                [node] => Site::PaxNode { destination, node: *node },
                _ => return None,
            }
        }
        "BERTH" if tokens.len() == 3 => {
            Site::WaitingArc { port: PortId(parse_u16(tokens[1])?), slot: parse_u32(tokens[2])? }
        }
        "CAP" => match parse_nodes(&tokens[1..])?.as_slice() {
            [from, to] => Site::ServiceArc { from: *from, to: *to },
            _ => return None,
        },
        "DW" if tokens.len() == 4 => Site::Dwell {
            ferry: FerryId(owner(tokens[1], 'f')?),
            port: PortId(parse_u16(tokens[2])?),
            slot: parse_u32(tokens[3])?,
        },
        "TR" if tokens.len() == 5 => Site::Transfer {
            destination: PortId(owner(tokens[1], 'd')?),
            port: PortId(parse_u16(tokens[2])?),
            slot: parse_u32(tokens[3])?,
            until: parse_u32(tokens[4])?,
        },
        _ => return None,
    };
    Some(site)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_names_round_trip() {
        let cases = [
            (VarRole::Ferry(FerryId(1)), Node::at(PortId(1), 3), Node::at(PortId(2), 5), "Y_f1_1_3_2_5"),
            (VarRole::Ferry(FerryId(12)), Node::Alpha, Node::at(PortId(4), 1), "Y_f12_A_4_1"),
            (VarRole::Ferry(FerryId(2)), Node::at(PortId(1), 114), Node::Beta, "Y_f2_1_114_B"),
            (VarRole::Ferry(FerryId(2)), Node::Gamma, Node::Beta, "Y_f2_G_B"),
            (VarRole::Passenger(PortId(3)), Node::at(PortId(2), 9), Node::Zeta(PortId(3)), "X_d3_2_9_Z3"),
        ];
        for (role, from, to, name) in cases {
            assert_eq!(variable_name(role, from, to), name);
            assert_eq!(parse_variable_name(name), Some((role, from, to)));
            assert!(is_valid_name(name));
        }
        assert_eq!(parse_variable_name("Y_f1_1_3_2"), None);
        assert_eq!(parse_variable_name("Y_f01_1_3_2_5"), None);
        assert_eq!(parse_variable_name("Q_f1_1_3_2_5"), None);
    }

    #[test]
    fn constraint_names_round_trip() {
        let sites = [
            Site::FerryNode { ferry: FerryId(1), node: Node::Alpha },
            Site::FerryNode { ferry: FerryId(3), node: Node::at(PortId(2), 7) },
            Site::WaitingArc { port: PortId(2), slot: 4 },
            Site::PaxNode { destination: PortId(3), node: Node::Zeta(PortId(3)) },
            Site::ServiceArc { from: Node::at(PortId(1), 3), to: Node::at(PortId(2), 5) },
            Site::Dwell { ferry: FerryId(1), port: PortId(2), slot: 4 },
            Site::Transfer { destination: PortId(3), port: PortId(2), slot: 4, until: 5 },
        ];
        for site in sites {
            let name = constraint_name(&site);
            assert!(is_valid_name(&name), "{name}");
            assert_eq!(parse_constraint_name(&name), Some(site), "{name}");
        }
    }
}
