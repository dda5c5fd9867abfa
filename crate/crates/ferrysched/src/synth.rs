//! Deterministic instance generators: the tiny verification suite, the
//! size-scaling family, a case-study-sized archipelago and random instances.

use ferrysched_core::instance::{Ferry, Horizon, InstanceBuilder, Minutes, NetworkMode, ProblemInstance};
use ferrysched_core::num::int;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape of a random instance.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub ports: u16,
    pub ferries: u16,
    pub slots: u32,
    /// Total demand is drawn from `0..=max_demand`.
    pub max_demand: u64,
    pub mode: NetworkMode,
    pub dwell: bool,
    pub transfer: bool,
}

impl RandomSpec {
    pub fn tiny(mode: NetworkMode) -> Self {
        RandomSpec { ports: 3, ferries: 2, slots: 8, max_demand: 6, mode, dwell: true, transfer: true }
    }
}

const START: Minutes = 6 * 60;
const DELTA: Minutes = 10;

/// Random instance; the same `seed` and `RandomSpec` always give the same instance.
pub fn random_instance(seed: u64, spec: &RandomSpec) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.ports.max(2);
    let q = spec.slots.max(4);
    let end = START + DELTA * q as Minutes;
    let mut b = InstanceBuilder::new(Horizon::new(START, end, DELTA).expect("valid horizon")).mode(spec.mode);
    let dwell = if spec.dwell { rng.gen_range(0..=1u32) } else { 0 };
    let hub = rng.gen_range(1..=n);
    for k in 1..=n {
        let berths = if spec.ferries >= 2 && k == hub && rng.gen_bool(0.5) { 1 } else { 2 };
        let transfer = if spec.transfer && dwell >= 1 && k == hub { 1 } else { 0 };
        b = b.port(berths, transfer);
    }
    let mut pairs: Vec<(u16, u16)> = Vec::new();
    for a in 1..=n {
        for c in a + 1..=n {
            pairs.push((a, c));
        }
    }
    for f in 1..=spec.ferries {
        // Distinct homes keep basic-mode instances away from berth deadlocks.
        let home = (f - 1) % n + 1;
        let mut ferry = Ferry::new(f, format!("F{f}"), rng.gen_range(2..=4), home)
            .rates_per_hour(int(rng.gen_range(30..=60)), int(rng.gen_range(3..=12)));
        if spec.mode == NetworkMode::TwoShift {
            ferry = ferry.shift_salary(int(rng.gen_range(2..=8)));
        }
        let mut served = 0;
        for &(a, c) in &pairs {
            if served > 0 && rng.gen_bool(0.3) {
                continue;
            }
            ferry = ferry.both_ways(a, c, DELTA * rng.gen_range(1..=2) + rng.gen_range(0..=5));
            served += 1;
        }
        for k in 1..=n {
            ferry = ferry.dwell(k, dwell);
        }
        b = b.ferry(ferry);
    }
    let mut left = rng.gen_range(0..=spec.max_demand);
    while left > 0 {
        let volume = rng.gen_range(1..=left.min(3));
        let origin = rng.gen_range(1..=n);
        let mut dest = rng.gen_range(1..=n - 1);
        if dest >= origin {
            dest += 1;
        }
        let time = START + rng.gen_range(0..(DELTA * q as Minutes / 2));
        b = b.demand(origin, dest, time, volume);
        left -= volume;
    }
    if spec.mode == NetworkMode::TwoShift {
        let third = DELTA * (q / 3) as Minutes;
        b = b.crew_window(START + third, START + 2 * third);
    }
    b.build().expect("generated instance is valid")
}

/// At least twenty tiny instances (at most two ferries, three ports, ten
/// slots and six AEQ) rotating through dwell, transfer, berth and crew
/// features.
pub fn tiny_suite() -> Vec<(String, ProblemInstance)> {
    let modes = [NetworkMode::HomeportFree, NetworkMode::Basic, NetworkMode::TwoShift, NetworkMode::HomeportFree];
    (0..24u64)
        .map(|idx| {
            let mode = modes[idx as usize % modes.len()];
            let spec = RandomSpec {
                ports: if idx % 3 == 0 { 2 } else { 3 },
                ferries: if idx % 2 == 0 { 1 } else { 2 },
                slots: 6 + (idx % 3) as u32,
                max_demand: 6,
                mode,
                dwell: idx % 5 != 0,
                transfer: idx % 5 == 2 || idx % 5 == 4,
            };
            (format!("tiny-{idx:02}-{}", mode.as_str().to_lowercase()), random_instance(7919 * idx + 13, &spec))
        })
        .collect()
}

/// Member of the size-scaling family: `n` fully connected ports, `m`
/// ferries with distinct travel times, `q` slots, one demand per
/// destination.
pub fn scaling_instance(n: u16, m: u16, q: u32) -> ProblemInstance {
    let end = START + DELTA * q as Minutes;
    let mut b = InstanceBuilder::new(Horizon::new(START, end, DELTA).expect("valid horizon"));
    for _ in 1..=n {
        b = b.port(2, 0);
    }
    for f in 1..=m {
        let mut ferry = Ferry::new(f, format!("F{f}"), 50, (f - 1) % n + 1).rates_per_hour(int(60), int(12));
        for a in 1..=n {
            for c in a + 1..=n {
                let minutes = DELTA * (f as Minutes) + 5 * ((a + c) % 2) as Minutes;
                ferry = ferry.both_ways(a, c, minutes);
            }
            ferry = ferry.dwell(a, 1);
        }
        b = b.ferry(ferry);
    }
    for k in 1..=n {
        let origin = k % n + 1;
        b = b.demand(origin, k, START, 5);
    }
    b.build().expect("scaling instance is valid")
}

/// Seven-port, four-ferry archipelago over a 05:00 to 24:00 day with ten
/// minute slots and 1000 to 2000 AEQ of demand.
pub fn case_study(seed: u64) -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = 5 * 60;
    let end = 24 * 60;
    let mut b = InstanceBuilder::new(Horizon::new(start, end, DELTA).expect("valid horizon"));
    // Port 1 is the mainland terminal, ports 2 and 3 are island hubs.
    let berths = [3, 2, 2, 1, 1, 1, 1];
    let transfer = [1, 1, 1, 0, 0, 0, 0];
    for k in 0..7 {
        b = b.port(berths[k], transfer[k]);
    }
    let lines: [&[(u16, u16, Minutes)]; 4] = [
        &[(1, 2, 35), (1, 3, 50), (2, 3, 25), (2, 4, 20), (1, 4, 45), (3, 4, 30)],
        &[(1, 2, 35), (2, 5, 30), (1, 5, 60), (2, 3, 25), (3, 5, 40), (1, 3, 50)],
        &[(1, 3, 50), (3, 6, 25), (3, 7, 40), (6, 7, 20), (1, 6, 65), (2, 6, 45)],
        &[(2, 4, 20), (4, 5, 25), (2, 5, 30), (5, 7, 45), (3, 7, 40), (2, 7, 55)],
    ];
    let homes = [1, 1, 3, 2];
    let capacities = [120, 90, 80, 60];
    for f in 0..4u16 {
        let speed = 100 + 12 * f as Minutes;
        let mut ferry = Ferry::new(f + 1, format!("M/S {}", ["Aava", "Bore", "Cisu", "Dyyni"][f as usize]), capacities[f as usize], homes[f as usize])
            .rates_per_hour(int(900 + 150 * f as i64), int(120 + 20 * f as i64));
        for &(a, c, minutes) in lines[f as usize] {
            ferry = ferry.both_ways(a, c, minutes * speed / 100);
        }
        for k in 1..=7 {
            ferry = ferry.dwell(k, if k <= 3 { 2 } else { 1 });
        }
        b = b.ferry(ferry);
    }
    let total: u64 = rng.gen_range(1000..=2000);
    let mut pairs: Vec<(u16, u16)> = Vec::new();
    for o in 1..=7u16 {
        for d in 1..=7u16 {
            if o != d {
                pairs.push((o, d));
            }
        }
    }
    let mut left = total;
    while left > 0 {
        let &(o, d) = pairs.choose(&mut rng).expect("pairs");
        let volume = rng.gen_range(5..=40).min(left);
        let time = start + rng.gen_range(0..(end - start - 120));
        b = b.demand(o, d, time, volume);
        left -= volume;
    }
    b.build().expect("case study instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ferrysched_core::total_demand_aeq;

    #[test]
    fn tiny_suite_respects_caps() {
        let suite = tiny_suite();
        assert!(suite.len() >= 20);
        for (_, inst) in &suite {
            assert!(inst.ferries().len() <= 2);
            assert!(inst.ports().len() <= 3);
            assert!(inst.horizon().slots() <= 10);
            assert!(total_demand_aeq(inst) <= 6);
        }
        let modes: std::collections::BTreeSet<_> = suite.iter().map(|(_, i)| i.costs().mode).collect();
        assert_eq!(modes.len(), 3);
        assert!(suite.iter().any(|(_, i)| i.ports().iter().any(|p| p.transfer_slots > 0)));
        assert!(suite.iter().any(|(_, i)| i.ports().iter().any(|p| p.berths == 1) && i.ferries().len() == 2));
        assert!(suite.iter().any(|(_, i)| i.ferries().iter().any(|f| f.dwell.values().any(|&w| w > 0))));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(case_study(3), case_study(3));
        assert_eq!(random_instance(5, &RandomSpec::tiny(NetworkMode::Basic)), random_instance(5, &RandomSpec::tiny(NetworkMode::Basic)));
    }

    #[test]
    fn case_study_demand_in_range() {
        let inst = case_study(1);
        assert_eq!(inst.horizon().slots(), 114);
        assert!((1000..=2000).contains(&total_demand_aeq(&inst)));
    }
}
