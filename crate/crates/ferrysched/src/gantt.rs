//! Gantt-style schedule plots: ports across, time of day downwards, one
//! polyline per ferry through its port calls.

use std::fmt::Write;

use ferrysched_core::instance::{format_clock, FerryId, Minutes, PortId, ProblemInstance};
use ferrysched_core::schedule::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub ferry: FerryId,
    pub port: PortId,
    pub time_min: Minutes,
}

/// Two vertices per port call, arrival then departure, in time order.
pub fn vertices(inst: &ProblemInstance, schedule: &Schedule) -> Vec<Vertex> {
    let mut out = Vec::new();
    for fs in &schedule.ferries {
        for call in fs.calls(inst) {
            out.push(Vertex { ferry: fs.ferry, port: call.port, time_min: call.arrive_min });
            out.push(Vertex { ferry: fs.ferry, port: call.port, time_min: call.depart_min });
        }
    }
    out
}

pub fn gantt_csv(inst: &ProblemInstance, schedule: &Schedule) -> String {
    let mut out = String::from("ferry,port,time_min\n");
    for v in vertices(inst, schedule) {
        let _ = writeln!(out, "{},{},{}", v.ferry.0, v.port.0, v.time_min);
    }
    out
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn gantt_svg(inst: &ProblemInstance, schedule: &Schedule) -> String {
    let (left, top, col, height) = (70.0, 40.0, 110.0, 640.0);
    let n = inst.ports().len().max(1);
    let width = left + col * n as f64 + 180.0;
    let h = inst.horizon();
    let span = (h.end() - h.start()).max(1) as f64;
    let x = |p: PortId| left + col * (p.0 as f64 - 0.5);
    let y = |t: Minutes| top + height * (t - h.start()) as f64 / span;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{}" font-family="sans-serif" font-size="12">"#,
        top + height + 40.0
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for port in inst.ports() {
        let px = x(port.id);
        let _ = writeln!(
            out,
            r##"<line x1="{px}" y1="{top}" x2="{px}" y2="{}" stroke="#ccc"/>"##,
            top + height
        );
        let _ = writeln!(out, r#"<text x="{px}" y="{}" text-anchor="middle">{}</text>"#, top - 12.0, escape(&port.name));
    }
    let mut tick = (h.start() + 59) / 60 * 60;
    while tick <= h.end() {
        let ty = y(tick);
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{ty}" x2="{}" y2="{ty}" stroke="#eee"/>"##,
            left - 5.0,
            left + col * n as f64
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 8.0, ty + 4.0, format_clock(tick));
        tick += 60;
    }
    let verts = vertices(inst, schedule);
    for (i, fs) in schedule.ferries.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> =
            verts.iter().filter(|v| v.ferry == fs.ferry).map(|v| format!("{:.1},{:.1}", x(v.port), y(v.time_min))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = top + 20.0 * i as f64;
        let lx = left + col * n as f64 + 20.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 24.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&inst.ferry(fs.ferry).name));
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ferrysched_core::instance::{Ferry, Horizon, InstanceBuilder};
    use ferrysched_core::schedule::extract_schedule;
    use ferrysched_core::Assignment;

    #[test]
    fn idle_ferries_are_vertical_segments() {
        let inst = InstanceBuilder::new(Horizon::new(360, 420, 10).unwrap())
            .port(1, 0)
            .port(1, 0)
            .ferry(Ferry::new(1, "A", 3, 1).both_ways(1, 2, 10))
            .ferry(Ferry::new(2, "B", 3, 2).both_ways(1, 2, 10))
            .build()
            .unwrap();
        let s = extract_schedule(&inst, &Assignment::idle(&inst)).unwrap();
        assert_eq!(
            gantt_csv(&inst, &s),
            "ferry,port,time_min\n1,1,360\n1,1,410\n2,2,360\n2,2,410\n"
        );
        let svg = gantt_svg(&inst, &s);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">07:00<"));
    }
}
