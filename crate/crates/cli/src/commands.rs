//! Subcommand implementations.

use std::path::Path;

use serde::Serialize;
use sibc::bounds::group4_thresholds;
use sibc::fme::{derivation, equivalent_sampled, LinSystem};
use sibc::graphs::{decompose, enumerate_all, SideInfoGraph};
use sibc::regions::{build_region, sig9, slice2d, slice2d_bisect, BoundSelector, SearchConfig, SliceSpec, MEMBER_TOL};
use sibc::simulator::{compare_decoders, run_sim, scheme_for, DecodeMode, SimConfig, SimReport, DEFAULT_BIT_CAP};
use sibc::{ExactSystem, Rational};

use crate::input::{self, code, emit, format_of, Failure, FileConfig, Format};
use crate::{ClassifyArgs, FmeArgs, ModeArg, RegionArgs, SimulateArgs, SliceMethod, ThresholdArgs};

const DEFAULT_SLICE_GRID: usize = 200;
const DEFAULT_ASSIGNMENTS: usize = 100;
const DEFAULT_FME_SEED: u64 = 7;
const DEFAULT_BLOCKLENGTH: usize = 256;
const DEFAULT_TRIALS: u64 = 1000;

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure::new(code::FAILURE, e.to_string()))
}

fn required_graph(flag: Option<&String>, file: &FileConfig) -> Result<SideInfoGraph, Failure> {
    let arg = flag.or(file.graph.as_ref()).ok_or_else(|| Failure::parse("--graph is required"))?;
    input::graph(arg)
}

#[derive(Serialize)]
struct Classification {
    arcs: Vec<[usize; 2]>,
    group: u8,
    member: u8,
    capacity_known: bool,
    known: Vec<Vec<usize>>,
}

fn classification(g: &SideInfoGraph) -> Result<Classification, Failure> {
    let gm = decompose(g)?;
    Ok(Classification {
        arcs: g.arcs().iter().map(|&(i, j)| [i, j]).collect(),
        group: gm.group,
        member: gm.member,
        capacity_known: gm.capacity_known(),
        known: (1..=3).map(|i| g.out_neighbors(i).into_iter().collect()).collect(),
    })
}

fn status(c: &Classification) -> String {
    let known = if c.capacity_known { "capacity known" } else { "capacity unknown" };
    format!("group {}, member {}, {known}", c.group, c.member)
}

fn set(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn classify(a: ClassifyArgs, file: &FileConfig) -> Result<(), Failure> {
    let format = format_of(a.common.out.as_deref(), Format::Text)?;
    let text = if a.all {
        let all: Vec<Classification> = enumerate_all(3)?.iter().map(classification).collect::<Result<_, _>>()?;
        let known = all.iter().filter(|c| c.capacity_known).count();
        match format {
            Format::Json => json(&all)?,
            Format::Csv => {
                let mut out = String::from("group,member,capacity_known,arcs\n");
                for c in &all {
                    let arcs: Vec<String> = c.arcs.iter().map(|[i, j]| format!("{i}->{j}")).collect();
                    out.push_str(&format!("{},{},{},{}\n", c.group, c.member, c.capacity_known, arcs.join(" ")));
                }
                out
            }
            Format::Text => {
                let mut out = String::new();
                for c in &all {
                    out.push_str(&format!("G1{} ∪ G2{}: {}\n", c.group, c.member, status(c)));
                }
                out.push_str(&format!("{} configurations: {known} capacity known, {} unknown\n", all.len(), all.len() - known));
                out
            }
        }
    } else {
        let g = required_graph(a.common.graph.as_ref(), file)?;
        let c = classification(&g)?;
        match format {
            Format::Json => json(&c)?,
            Format::Csv => format!("group,member,capacity_known\n{},{},{}\n", c.group, c.member, c.capacity_known),
            Format::Text => {
                let sets: Vec<String> = c.known.iter().enumerate().map(|(i, k)| format!("O{} = {}", i + 1, set(k))).collect();
                format!("{}\n{}\n", status(&c), sets.join(", "))
            }
        }
    };
    emit(a.common.out.as_ref(), &text)
}

pub fn region(a: RegionArgs, file: &FileConfig) -> Result<(), Failure> {
    let g = required_graph(a.common.graph.as_ref(), file)?;
    let p = input::channel(a.common.channel.as_deref().or(file.channel.as_deref()))?;
    let bound_name = a.bound.as_deref().or(file.bound.as_deref()).unwrap_or("capacity");
    let selector: BoundSelector = bound_name.parse().map_err(|e: String| Failure::new(code::SELECTOR, e))?;
    let search = SearchConfig::with_grid(a.search_grid.or(file.search_grid).unwrap_or(SearchConfig::default().grid));
    let fixed = a.fix.iter().map(|f| input::fixed(f)).collect::<Result<Vec<_>, _>>()?;
    let grid = a.grid.or(file.grid).unwrap_or(DEFAULT_SLICE_GRID);
    let mut spec = SliceSpec::new(fixed, input::axis(&a.sweep)?, input::axis(&a.response)?, grid);
    if let Some(range) = &a.range {
        match input::numbers(range)?[..] {
            [lo, hi] => spec.sweep_range = Some((lo, hi)),
            _ => return Err(Failure::parse("--range expects lo,hi")),
        }
    }
    let format = format_of(a.common.out.as_deref(), Format::Csv)?;
    let region = build_region(selector, &g, &p, search)?;
    let slice = match a.method {
        SliceMethod::Direct => slice2d(region.as_ref(), &spec)?,
        SliceMethod::Bisect => slice2d_bisect(region.as_ref(), &spec, a.tol.or(file.tol).unwrap_or(MEMBER_TOL))?,
    };
    let text = match format {
        Format::Json => json(&slice)?,
        _ => slice.to_csv(),
    };
    emit(a.common.out.as_ref(), &text)
}

#[derive(Serialize)]
struct ThresholdRow {
    r1: f64,
    r_thr3: f64,
    r_thr3_prime: f64,
}

pub fn thresholds(a: ThresholdArgs, file: &FileConfig) -> Result<(), Failure> {
    let p = input::channel(a.common.channel.as_deref().or(file.channel.as_deref()))?;
    if p.num_receivers() != 3 {
        return Err(Failure::parse("thresholds need a three-receiver channel"));
    }
    let c1 = p.single_user(1);
    let r1s = match &a.r1 {
        Some(list) => input::numbers(list)?,
        None => {
            let mut v: Vec<f64> = (0..).map(|k| k as f64 / 10.0).take_while(|&r| r < c1).collect();
            v.push(c1);
            v
        }
    };
    let rows = r1s
        .iter()
        .map(|&r1| {
            let t = group4_thresholds(&p, r1)?;
            Ok(ThresholdRow { r1, r_thr3: t.r_thr3, r_thr3_prime: t.r_thr3_prime })
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let text = match format_of(a.common.out.as_deref(), Format::Csv)? {
        Format::Json => json(&rows)?,
        _ => {
            let mut out = String::from("r1,r_thr3,r_thr3_prime\n");
            for r in &rows {
                out.push_str(&format!("{},{},{}\n", sig9(r.r1), sig9(r.r_thr3), sig9(r.r_thr3_prime)));
            }
            out
        }
    };
    emit(a.common.out.as_ref(), &text)
}

/// System text from a file or a shipped derivation, `expected` selecting its projection.
fn system_text(arg: &str, expected: bool) -> Result<String, Failure> {
    match arg.strip_prefix("builtin:") {
        Some(name) => {
            let d = derivation(name).ok_or_else(|| Failure::parse(format!("no shipped derivation `{name}`")))?;
            Ok(if expected { d.expected } else { d.source }.to_string())
        }
        None => input::read(Path::new(arg)),
    }
}

pub fn fme(a: FmeArgs, file: &FileConfig) -> Result<(), Failure> {
    let parsed = LinSystem::<Rational>::parse(&system_text(&a.system, false)?)?;
    let eliminate: Vec<String> = match &a.eliminate {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => parsed.eliminate.clone(),
    };
    let derived = parsed.system.eliminate_all(&eliminate)?.remove_redundant();
    emit(a.out.as_ref(), &derived.to_string())?;
    if let Some(expect) = &a.expect {
        let target: ExactSystem = LinSystem::parse(&system_text(expect, true)?)?.system;
        let assignments = a.assignments.or(file.assignments).unwrap_or(DEFAULT_ASSIGNMENTS);
        let seed = a.seed.or(file.seed).unwrap_or(DEFAULT_FME_SEED);
        let same = equivalent_sampled(&derived, &target, assignments, seed)?;
        eprintln!("equivalent: {same}");
        if !same {
            return Err(Failure::new(code::FAILURE, "derived system differs from the expected system"));
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct Comparison {
    joint: SimReport,
    separate: SimReport,
}

pub fn simulate(a: SimulateArgs, file: &FileConfig) -> Result<(), Failure> {
    let g = required_graph(a.common.graph.as_ref(), file)?;
    let p = input::channel(a.common.channel.as_deref().or(file.channel.as_deref()))?;
    let gm = decompose(&g)?;
    let mut spec = scheme_for(gm, &g)?;
    if let Some(alpha) = &a.alpha {
        spec = spec.with_alphas(&input::numbers(alpha)?)?;
    }
    let n = a.n.or(file.n).unwrap_or(DEFAULT_BLOCKLENGTH);
    let trials = a.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = a.seed.or(file.seed).unwrap_or(0);
    let cfg = match (&a.bits, &a.rates) {
        (Some(bits), _) => {
            let bits = input::numbers(bits)?
                .into_iter()
                .map(|b| if b >= 0.0 && b.fract() == 0.0 { Ok(b as u32) } else { Err(Failure::parse(format!("invalid bit count {b}"))) })
                .collect::<Result<_, _>>()?;
            let cfg = SimConfig { n, bits, trials, seed, channel: p };
            cfg.validate()?;
            cfg
        }
        (None, Some(rates)) => {
            let cap = a.bit_cap.or(file.bit_cap).unwrap_or(DEFAULT_BIT_CAP);
            SimConfig::from_rates(n, &input::numbers(rates)?, cap, trials, seed, p)?
        }
        (None, None) => return Err(Failure::parse("--rates or --bits is required")),
    };
    let text = match a.mode {
        ModeArg::Joint => json(&run_sim(&spec, &cfg, DecodeMode::Joint)?.report(&cfg, DecodeMode::Joint))?,
        ModeArg::Separate => json(&run_sim(&spec, &cfg, DecodeMode::Separate)?.report(&cfg, DecodeMode::Separate))?,
        ModeArg::Compare => {
            let (joint, separate) = compare_decoders(&spec, &cfg)?;
            json(&Comparison {
                joint: joint.report(&cfg, DecodeMode::Joint),
                separate: separate.report(&cfg, DecodeMode::Separate),
            })?
        }
    };
    emit(a.common.out.as_ref(), &text)
}
