//! Trial loop: codebook generation, transmission and maximum-likelihood decoding.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::scheme::{Component, SchemeSpec};
use super::{DecodeMode, SimConfig, SimError, SimResult, MAX_CANDIDATE_BITS, MAX_CODEBOOK_SAMPLES};

/// A payload field: a message part or an XOR node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Part(usize),
    Xor(usize),
}

/// Bit-level layout of a scheme under concrete message sizes.
struct Layout {
    part_bits: Vec<u32>,
    part_msg: Vec<usize>,
    xors: Vec<Vec<usize>>,
    layers: Vec<Vec<(Field, u32)>>,
    layer_bits: Vec<u32>,
    sd: Vec<f64>,
}

impl Layout {
    fn new(spec: &SchemeSpec, cfg: &SimConfig) -> Result<Self, SimError> {
        let parts = spec.parts();
        let part_bits = spec.part_bits(&cfg.bits);
        let index = |p| parts.iter().position(|q| *q == p).expect("validated part reference");
        let mut xors: Vec<Vec<usize>> = Vec::new();
        let mut layers = Vec::new();
        let mut layer_bits = Vec::new();
        for l in &spec.layers {
            let mut fields = Vec::new();
            let mut shift = 0u32;
            for c in &l.payload {
                let (field, width) = match c {
                    Component::Part(p) => (Field::Part(index(*p)), part_bits[index(*p)]),
                    Component::Xor(ops) => {
                        let mut ops: Vec<usize> = ops.iter().map(|p| index(*p)).collect();
                        ops.sort_unstable();
                        ops.dedup();
                        let width = ops.iter().map(|&o| part_bits[o]).max().unwrap_or(0);
                        let x = xors.iter().position(|o| *o == ops).unwrap_or_else(|| {
                            xors.push(ops);
                            xors.len() - 1
                        });
                        (Field::Xor(x), width)
                    }
                };
                fields.push((field, shift));
                shift += width;
            }
            if shift > 64 {
                return Err(SimError::Config(format!("subcodebook index of {shift} bits exceeds 64")));
            }
            layers.push(fields);
            layer_bits.push(shift);
        }
        let power = cfg.channel.power();
        let sd: Vec<f64> = spec.layers.iter().map(|l| (l.alpha * power).sqrt()).collect();
        if let Some(k) = (0..sd.len()).find(|&k| sd[k] == 0.0 && layer_bits[k] > 0) {
            return Err(SimError::ZeroPower(k + 1));
        }
        Ok(Layout { part_bits, part_msg: parts.iter().map(|p| p.msg).collect(), xors, layers, layer_bits, sd })
    }

    fn width(&self, f: Field) -> u32 {
        match f {
            Field::Part(p) => self.part_bits[p],
            Field::Xor(x) => self.xors[x].iter().map(|&o| self.part_bits[o]).max().unwrap_or(0),
        }
    }

    fn parts_of(&self, msgs: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.part_msg.len()).filter(|&p| msgs(self.part_msg[p])).collect()
    }
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// What a receiver currently knows: part values and XOR values.
#[derive(Clone)]
struct Known {
    parts: Vec<Option<u64>>,
    xors: Vec<Option<u64>>,
}

impl Known {
    fn empty(lay: &Layout) -> Self {
        Known { parts: vec![None; lay.part_bits.len()], xors: vec![None; lay.xors.len()] }
    }

    fn value(&self, lay: &Layout, f: Field) -> Option<u64> {
        match f {
            Field::Part(p) => self.parts[p],
            Field::Xor(x) => self.xors[x].or_else(|| lay.xors[x].iter().try_fold(0, |acc, &o| Some(acc ^ self.parts[o]?))),
        }
    }

    fn set(&mut self, f: Field, v: u64) {
        match f {
            Field::Part(p) => self.parts[p] = Some(v),
            Field::Xor(x) => self.xors[x] = Some(v),
        }
    }

    fn layer_index(&self, lay: &Layout, l: usize) -> Option<u64> {
        lay.layers[l].iter().try_fold(0, |acc, &(f, shift)| Some(acc | self.value(lay, f)? << shift))
    }

    /// Derives XOR values from known operands and lone unknown operands from known XORs.
    fn close(&mut self, lay: &Layout) {
        loop {
            let mut changed = false;
            for (x, ops) in lay.xors.iter().enumerate() {
                let missing: Vec<usize> = ops.iter().copied().filter(|&o| self.parts[o].is_none()).collect();
                match (self.xors[x], missing.as_slice()) {
                    (None, []) => {
                        self.xors[x] = self.value(lay, Field::Xor(x));
                        changed = true;
                    }
                    (Some(v), [o]) => {
                        let rest = ops.iter().filter(|&&p| p != *o).fold(v, |acc, &p| acc ^ self.parts[p].unwrap_or(0));
                        self.parts[*o] = Some(rest & mask(lay.part_bits[*o]));
                        changed = true;
                    }
                    _ => {}
                }
            }
            if !changed {
                return;
            }
        }
    }
}

struct StepPlan {
    decode: Vec<usize>,
    subtract: Vec<usize>,
    atoms: Vec<(Field, u32)>,
}

/// Symbolic decoding schedule of one receiver in one mode.
struct Plan {
    mode: DecodeMode,
    side: Vec<usize>,
    steps: Vec<StepPlan>,
    own: Vec<usize>,
    samples: usize,
}

fn plan(spec: &SchemeSpec, lay: &Layout, r: usize, mode: DecodeMode, n: usize) -> Result<Plan, SimError> {
    let side = lay.parts_of(|m| spec.side_info.knows(r, m));
    let mut known = Known::empty(lay);
    if mode == DecodeMode::Joint {
        for &p in &side {
            known.parts[p] = Some(0);
        }
    }
    known.close(lay);
    let mut steps = Vec::new();
    let mut samples = 0usize;
    for (s, step) in spec.decoders[r - 1].iter().enumerate() {
        let mut subtract = Vec::new();
        for l in (0..lay.layers.len()).filter(|l| !step.decode.contains(l) && !step.noise.contains(l)) {
            if known.layer_index(lay, l).is_some() {
                subtract.push(l);
            } else if mode == DecodeMode::Joint {
                return Err(SimError::Scheme(format!(
                    "receiver {r} step {} neither decodes, knows nor treats as noise layer {}",
                    s + 1,
                    l + 1
                )));
            }
        }
        let mut atoms: Vec<(Field, u32)> = Vec::new();
        let mut per_layer_bits = Vec::new();
        for &l in &step.decode {
            let mut bits = 0;
            for &(f, _) in &lay.layers[l] {
                if known.value(lay, f).is_some() {
                    continue;
                }
                let atom = match f {
                    Field::Xor(x) => {
                        let missing: Vec<usize> = lay.xors[x].iter().copied().filter(|&o| known.parts[o].is_none()).collect();
                        if missing.len() == 1 {
                            Field::Part(missing[0])
                        } else {
                            f
                        }
                    }
                    part => part,
                };
                bits += lay.width(atom);
                if !atoms.iter().any(|(a, _)| *a == atom) {
                    atoms.push((atom, lay.width(atom)));
                }
            }
            per_layer_bits.push(bits.min(lay.layer_bits[l]));
        }
        let total: u32 = atoms.iter().map(|a| a.1).sum();
        if total > MAX_CANDIDATE_BITS {
            return Err(SimError::CandidateGuard { receiver: r, step: s + 1, bits: total, limit: MAX_CANDIDATE_BITS });
        }
        samples += per_layer_bits.iter().map(|&b| (1usize << b) * n).sum::<usize>() + subtract.len() * n;
        for &(a, _) in &atoms {
            known.set(a, 0);
        }
        known.close(lay);
        steps.push(StepPlan { decode: step.decode.clone(), subtract, atoms });
    }
    for &p in &side {
        known.parts[p].get_or_insert(0);
    }
    known.close(lay);
    let own = lay.parts_of(|m| m == r);
    if own.iter().any(|&p| known.parts[p].is_none()) {
        return Err(SimError::Scheme(format!("receiver {r} cannot recover its message")));
    }
    Ok(Plan { mode, side, steps, own, samples })
}

fn key(seed: u64, trial: u64, layer: u64, index: u64) -> [u8; 32] {
    let mut k = [0u8; 32];
    for (chunk, v) in k.chunks_exact_mut(8).zip([seed, trial, layer, index]) {
        chunk.copy_from_slice(&v.to_le_bytes());
    }
    k
}

/// One trial's random codebook, generated lazily per codeword.
struct Codebook<'a> {
    lay: &'a Layout,
    n: usize,
    seed: u64,
    trial: u64,
    words: Vec<HashMap<u64, Vec<f64>>>,
}

impl<'a> Codebook<'a> {
    fn new(lay: &'a Layout, n: usize, seed: u64, trial: u64) -> Self {
        Codebook { lay, n, seed, trial, words: vec![HashMap::new(); lay.layers.len()] }
    }

    fn ensure(&mut self, l: usize, idx: u64) {
        let (n, sd) = (self.n, self.lay.sd[l]);
        let k = key(self.seed, self.trial, l as u64 + 1, idx);
        self.words[l].entry(idx).or_insert_with(|| {
            let mut rng = ChaCha8Rng::from_seed(k);
            (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
        });
    }

    fn get(&self, l: usize, idx: u64) -> &[f64] {
        &self.words[l][&idx]
    }
}

/// Transmitted codeword sum of trial `trial`.
fn transmit_in(lay: &Layout, book: &mut Codebook, truth: &Known) -> Vec<f64> {
    let mut x = vec![0.0; book.n];
    for l in 0..lay.layers.len() {
        let idx = truth.layer_index(lay, l).expect("true messages determine every layer");
        book.ensure(l, idx);
        for (xi, c) in x.iter_mut().zip(book.get(l, idx)) {
            *xi += c;
        }
    }
    x
}

fn draw_messages(lay: &Layout, rng: &mut ChaCha8Rng) -> Known {
    let mut truth = Known::empty(lay);
    for (p, &b) in lay.part_bits.iter().enumerate() {
        truth.parts[p] = Some(if b == 0 { 0 } else { rng.random::<u64>() & mask(b) });
    }
    truth.close(lay);
    truth
}

fn decode(lay: &Layout, plan: &Plan, y: &[f64], truth: &Known, book: &mut Codebook) -> bool {
    let mut known = Known::empty(lay);
    if plan.mode == DecodeMode::Joint {
        for &p in &plan.side {
            known.parts[p] = truth.parts[p];
        }
    }
    known.close(lay);
    for step in &plan.steps {
        let mut residual = y.to_vec();
        for &l in &step.subtract {
            let idx = known.layer_index(lay, l).expect("planned subtraction");
            book.ensure(l, idx);
            for (r, c) in residual.iter_mut().zip(book.get(l, idx)) {
                *r -= c;
            }
        }
        let total: u32 = step.atoms.iter().map(|a| a.1).sum();
        let mut scratch = known.clone();
        let mut best = (f64::INFINITY, 0u64);
        let mut idx = vec![0u64; step.decode.len()];
        for c in 0..1u64 << total {
            let mut rest = c;
            for &(a, w) in &step.atoms {
                scratch.set(a, rest & mask(w));
                rest >>= w;
            }
            for (k, &l) in step.decode.iter().enumerate() {
                idx[k] = scratch.layer_index(lay, l).expect("atoms determine decoded layers");
                book.ensure(l, idx[k]);
            }
            let words: Vec<&[f64]> = step.decode.iter().zip(&idx).map(|(&l, &i)| book.get(l, i)).collect();
            let mut dist = 0.0;
            for (t, r) in residual.iter().enumerate() {
                let e = r - words.iter().map(|w| w[t]).sum::<f64>();
                dist += e * e;
                if dist >= best.0 {
                    break;
                }
            }
            if dist < best.0 {
                best = (dist, c);
            }
        }
        let mut rest = best.1;
        for &(a, w) in &step.atoms {
            known.set(a, rest & mask(w));
            rest >>= w;
        }
        known.close(lay);
    }
    if plan.mode == DecodeMode::Separate {
        let contradicts = plan.side.iter().any(|&p| known.parts[p].is_some_and(|v| Some(v) != truth.parts[p]))
            || lay.xors.iter().enumerate().any(|(x, ops)| {
                ops.iter().all(|o| plan.side.contains(o)) && known.xors[x].is_some_and(|v| Some(v) != truth.xors[x])
            });
        if contradicts {
            return false;
        }
        for &p in &plan.side {
            known.parts[p] = truth.parts[p];
        }
        known.close(lay);
    }
    plan.own.iter().all(|&p| known.parts[p] == truth.parts[p])
}

fn prepare(spec: &SchemeSpec, cfg: &SimConfig) -> Result<Layout, SimError> {
    spec.validate()?;
    cfg.validate()?;
    if cfg.channel.num_receivers() != spec.receivers() {
        return Err(SimError::Config(format!(
            "channel has {} receivers, scheme has {}",
            cfg.channel.num_receivers(),
            spec.receivers()
        )));
    }
    Layout::new(spec, cfg)
}

fn simulate(spec: &SchemeSpec, cfg: &SimConfig, modes: &[DecodeMode]) -> Result<Vec<SimResult>, SimError> {
    let lay = prepare(spec, cfg)?;
    let q = spec.receivers();
    let plans: Vec<Vec<Plan>> = modes
        .iter()
        .map(|&m| (1..=q).map(|r| plan(spec, &lay, r, m, cfg.n)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let samples: usize = plans.iter().flatten().map(|p| p.samples).sum::<usize>() + lay.layers.len() * cfg.n;
    if samples > MAX_CODEBOOK_SAMPLES {
        return Err(SimError::CodebookGuard(MAX_CODEBOOK_SAMPLES));
    }
    let mut errors = vec![vec![0u64; q]; modes.len()];
    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::from_seed(key(cfg.seed, trial, 0, 0));
        let truth = draw_messages(&lay, &mut rng);
        let mut book = Codebook::new(&lay, cfg.n, cfg.seed, trial);
        let x = transmit_in(&lay, &mut book, &truth);
        for r in 1..=q {
            let sd = cfg.channel.n(r).sqrt();
            let y: Vec<f64> = x.iter().map(|xi| xi + sd * rng.sample::<f64, _>(StandardNormal)).collect();
            for (m, mode_plans) in plans.iter().enumerate() {
                if !decode(&lay, &mode_plans[r - 1], &y, &truth, &mut book) {
                    errors[m][r - 1] += 1;
                }
            }
        }
    }
    Ok(errors.into_iter().map(|errors| SimResult { errors, trials: cfg.trials, seed: cfg.seed }).collect())
}

/// Monte Carlo error estimates of every receiver decoding in `mode`.
pub fn run_sim(spec: &SchemeSpec, cfg: &SimConfig, mode: DecodeMode) -> Result<SimResult, SimError> {
    Ok(simulate(spec, cfg, &[mode])?.remove(0))
}

/// Joint and separate decoding on common codebooks, messages and noise.
pub fn compare_decoders(spec: &SchemeSpec, cfg: &SimConfig) -> Result<(SimResult, SimResult), SimError> {
    let mut r = simulate(spec, cfg, &[DecodeMode::Joint, DecodeMode::Separate])?;
    let separate = r.remove(1);
    Ok((r.remove(0), separate))
}

/// Transmitted signal of trial `trial` under `cfg`.
pub fn transmit(spec: &SchemeSpec, cfg: &SimConfig, trial: u64) -> Result<Vec<f64>, SimError> {
    let lay = prepare(spec, cfg)?;
    let mut rng = ChaCha8Rng::from_seed(key(cfg.seed, trial, 0, 0));
    let truth = draw_messages(&lay, &mut rng);
    let mut book = Codebook::new(&lay, cfg.n, cfg.seed, trial);
    Ok(transmit_in(&lay, &mut book, &truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::ChannelParams;
    use crate::graphs::{recompose, GroupMember};
    use crate::simulator::scheme_for;

    fn setup(group: u8, member: u8, noise: f64, bits: Vec<u32>, n: usize) -> (SchemeSpec, SimConfig) {
        let gm = GroupMember::new(group, member).unwrap();
        let spec = scheme_for(gm, &recompose(gm).unwrap()).unwrap();
        let channel = ChannelParams::new(10.0, vec![noise; 3]).unwrap();
        (spec, SimConfig { n, bits, trials: 20, seed: 3, channel })
    }

    #[test]
    fn noiseless_decoding_is_exact() {
        for (g, m) in [(1, 1), (2, 2), (2, 3), (3, 4), (5, 2), (5, 6), (6, 8), (7, 1), (7, 4), (7, 2), (7, 5), (8, 2)] {
            let (spec, cfg) = setup(g, m, 1e-9, vec![4, 3, 5], 64);
            for mode in [DecodeMode::Joint, DecodeMode::Separate] {
                let r = run_sim(&spec, &cfg, mode).unwrap();
                assert_eq!(r.errors, [0, 0, 0], "G1{g} ∪ G2{m} {mode}");
            }
        }
    }

    #[test]
    fn plans_use_side_information() {
        let (spec, cfg) = setup(2, 2, 1.0, vec![4, 3, 5], 8);
        let lay = Layout::new(&spec, &cfg).unwrap();
        let joint = plan(&spec, &lay, 2, DecodeMode::Joint, 8).unwrap();
        assert_eq!(joint.steps[0].atoms, [(Field::Part(1), 3)]);
        let separate = plan(&spec, &lay, 2, DecodeMode::Separate, 8).unwrap();
        assert_eq!(separate.steps[0].atoms, [(Field::Xor(0), 5)]);
    }

    #[test]
    fn guards() {
        let (spec, cfg) = setup(8, 1, 1.0, vec![8, 8, 8], 8);
        assert!(matches!(run_sim(&spec, &cfg, DecodeMode::Joint), Err(SimError::CandidateGuard { .. })));
        let (spec, cfg) = setup(1, 1, 1.0, vec![2, 2, 2], 8);
        let spec = spec.with_alphas(&[0.0, 0.5, 0.5]).unwrap();
        assert_eq!(run_sim(&spec, &cfg, DecodeMode::Joint), Err(SimError::ZeroPower(1)));
    }
}
