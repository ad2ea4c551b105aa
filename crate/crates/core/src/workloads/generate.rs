//! Seeded synthetic trace generators.
//!
//! All address math is integer-only. Randomness comes from xoshiro256**
//! seeded through SplitMix64 (`seed_from_u64`), and ranges are reduced with
//! a 128-bit multiply-shift, so a seed yields the same trace on every
//! platform.

use std::collections::HashMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use super::{AccessKind, TraceRecord, WorkloadError};

const ONE: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WorkloadKind {
    /// Dependent chain through a random single-cycle permutation of lines.
    PointerChase,
    /// Unit-stride sweep over the footprint.
    Stream,
    /// Draws LRU stack distances from `reuse_distance_profile`.
    MixedLocality,
    /// Independent uniform draws over all lines of the footprint.
    UniformRandom,
}

/// One bin of a stack-distance profile. Distances count distinct lines
/// (1 re-touches the most recent line); 0 asks for a line not in the stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReuseBin {
    pub distance: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticWorkloadSpec {
    pub kind: WorkloadKind,
    pub footprint_bytes: u64,
    /// Fraction of instructions that access memory.
    pub memory_intensity: f64,
    pub reuse_distance_profile: Vec<ReuseBin>,
    pub seed: u64,
    pub length_instructions: u64,
    pub access_bytes: u32,
    pub write_ratio: f64,
    pub line_bytes: u32,
    pub base_address: u64,
}

impl Default for SyntheticWorkloadSpec {
    fn default() -> Self {
        Self {
            kind: WorkloadKind::PointerChase,
            footprint_bytes: 256 << 20,
            memory_intensity: 0.2,
            reuse_distance_profile: Vec::new(),
            seed: 1,
            length_instructions: 1_000_000,
            access_bytes: 64,
            write_ratio: 0.0,
            line_bytes: 128,
            base_address: 0,
        }
    }
}

impl SyntheticWorkloadSpec {
    pub fn validate(&self) -> Result<(), WorkloadError> {
        let bad = |m: String| Err(WorkloadError::InvalidSpec(m));
        if self.line_bytes == 0 || !self.line_bytes.is_power_of_two() {
            return bad(format!("line_bytes must be a power of two, got {}", self.line_bytes));
        }
        if self.footprint_bytes < self.line_bytes as u64 {
            return bad(format!("footprint_bytes {} is smaller than one line", self.footprint_bytes));
        }
        if self.lines() > u32::MAX as u64 {
            return bad("footprint has more than 2^32 lines".into());
        }
        if !(self.memory_intensity > 0.0 && self.memory_intensity <= 1.0) {
            return bad(format!("memory_intensity must be in (0, 1], got {}", self.memory_intensity));
        }
        if !(0.0..=1.0).contains(&self.write_ratio) {
            return bad(format!("write_ratio must be in [0, 1], got {}", self.write_ratio));
        }
        if self.access_bytes == 0 || self.access_bytes > self.line_bytes {
            return bad(format!("access_bytes must be in 1..={}", self.line_bytes));
        }
        if self.length_instructions == 0 {
            return bad("length_instructions must be positive".into());
        }
        if self.kind == WorkloadKind::MixedLocality && self.reuse_distance_profile.is_empty() {
            return bad("mixed_locality needs a reuse_distance_profile".into());
        }
        if !self.reuse_distance_profile.is_empty() {
            if self.reuse_distance_profile.iter().any(|b| !(0.0..=1.0).contains(&b.probability)) {
                return bad("reuse probabilities must lie in [0, 1]".into());
            }
            let total: f64 = self.reuse_distance_profile.iter().map(|b| b.probability).sum();
            if (total - 1.0).abs() > 1e-9 {
                return bad(format!("reuse probabilities sum to {total}, not 1"));
            }
        }
        Ok(())
    }

    pub fn lines(&self) -> u64 {
        self.footprint_bytes / self.line_bytes as u64
    }

    fn intensity_fixed(&self) -> u64 {
        ((self.memory_intensity * ONE as f64).round() as u64).clamp(1, ONE)
    }

    /// Number of records `generate` will emit.
    pub fn record_count(&self) -> u64 {
        ((self.length_instructions as u128 * self.intensity_fixed() as u128) >> 32) as u64
    }
}

/// Uniform integer in `0..n` by multiply-shift.
fn below(rng: &mut Xoshiro256StarStar, n: u64) -> u64 {
    ((rng.next_u64() as u128 * n as u128) >> 64) as u64
}

/// Fenwick tree over access timestamps; a set bit marks the latest touch of
/// some line.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0; n + 1] }
    }

    fn add(&mut self, mut i: usize, delta: i32) {
        while i < self.tree.len() {
            self.tree[i] = self.tree[i].wrapping_add_signed(delta);
            i += i & i.wrapping_neg();
        }
    }

    /// Smallest index whose prefix sum reaches `k` (k >= 1).
    fn find_kth(&self, mut k: u32) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] < k {
                pos = next;
                k -= self.tree[next];
            }
            step >>= 1;
        }
        pos + 1
    }
}

struct StackSampler {
    /// Cumulative bin thresholds in 2^-64 units.
    thresholds: Vec<(u64, u64)>,
    fenwick: Fenwick,
    line_at: Vec<u64>,
    last_touch: HashMap<u64, usize>,
    live: u64,
    now: usize,
    cursor: u64,
}

impl StackSampler {
    fn new(profile: &[ReuseBin], capacity: usize) -> Self {
        let mut cum = 0.0;
        let mut thresholds: Vec<(u64, u64)> = profile
            .iter()
            .map(|b| {
                cum += b.probability;
                let t = (cum * 18_446_744_073_709_551_616.0).min(u64::MAX as f64) as u64;
                (t, b.distance)
            })
            .collect();
        if let Some(last) = thresholds.last_mut() {
            last.0 = u64::MAX;
        }
        Self {
            thresholds,
            fenwick: Fenwick::new(capacity),
            line_at: vec![0; capacity + 1],
            last_touch: HashMap::new(),
            live: 0,
            now: 0,
            cursor: 0,
        }
    }

    fn next_line(&mut self, rng: &mut Xoshiro256StarStar, lines: u64) -> u64 {
        let u = rng.next_u64();
        let distance = self.thresholds.iter().find(|(t, _)| u <= *t).map_or(0, |&(_, d)| d);
        let line = if distance == 0 || distance > self.live {
            let l = self.cursor % lines;
            self.cursor += 1;
            l
        } else {
            let pos = self.fenwick.find_kth((self.live - distance + 1) as u32);
            self.line_at[pos]
        };
        self.now += 1;
        if self.now >= self.line_at.len() {
            // capacity is sized from the record count; grow if a caller
            // iterates past it
            self.compact();
        }
        match self.last_touch.insert(line, self.now) {
            Some(old) => self.fenwick.add(old, -1),
            None => self.live += 1,
        }
        self.fenwick.add(self.now, 1);
        self.line_at[self.now] = line;
        line
    }

    fn compact(&mut self) {
        let mut order: Vec<(usize, u64)> = self.last_touch.iter().map(|(&l, &t)| (t, l)).collect();
        order.sort_unstable();
        let cap = (self.line_at.len() * 2).max(order.len() * 2 + 2);
        self.fenwick = Fenwick::new(cap);
        self.line_at = vec![0; cap + 1];
        for (i, &(_, line)) in order.iter().enumerate() {
            let t = i + 1;
            self.fenwick.add(t, 1);
            self.line_at[t] = line;
            self.last_touch.insert(line, t);
        }
        self.now = order.len() + 1;
    }
}

enum Pattern {
    Chase { next: Vec<u32>, current: u32 },
    Stream { offset: u64 },
    Mixed(Box<StackSampler>),
    Uniform,
}

/// Deterministic record stream for one [`SyntheticWorkloadSpec`].
pub struct Generator {
    spec: SyntheticWorkloadSpec,
    rng: Xoshiro256StarStar,
    pattern: Pattern,
    intensity: u64,
    write_threshold: u64,
    acc: u64,
    executed: u64,
}

pub fn generate(spec: &SyntheticWorkloadSpec) -> Result<Generator, WorkloadError> {
    spec.validate()?;
    let mut rng = Xoshiro256StarStar::seed_from_u64(spec.seed);
    let lines = spec.lines();
    let pattern = match spec.kind {
        WorkloadKind::PointerChase => {
            // Sattolo's shuffle: a single cycle through every line
            let mut next: Vec<u32> = (0..lines as u32).collect();
            for i in (1..next.len()).rev() {
                let j = below(&mut rng, i as u64) as usize;
                next.swap(i, j);
            }
            Pattern::Chase { next, current: 0 }
        }
        WorkloadKind::Stream => Pattern::Stream { offset: 0 },
        WorkloadKind::UniformRandom => Pattern::Uniform,
        WorkloadKind::MixedLocality => Pattern::Mixed(Box::new(StackSampler::new(
            &spec.reuse_distance_profile,
            spec.record_count() as usize + 1,
        ))),
    };
    let write_threshold = ((spec.write_ratio * ONE as f64).round() as u64).min(ONE);
    Ok(Generator {
        intensity: spec.intensity_fixed(),
        spec: spec.clone(),
        rng,
        pattern,
        write_threshold,
        acc: 0,
        executed: 0,
    })
}

impl Generator {
    pub fn spec(&self) -> &SyntheticWorkloadSpec {
        &self.spec
    }

    fn next_address(&mut self) -> u64 {
        let line_bytes = self.spec.line_bytes as u64;
        let offset = match &mut self.pattern {
            Pattern::Chase { next, current } => {
                *current = next[*current as usize];
                *current as u64 * line_bytes
            }
            Pattern::Stream { offset } => {
                let step = self.spec.access_bytes as u64;
                if *offset + step > self.spec.footprint_bytes {
                    *offset = 0;
                }
                let at = *offset;
                *offset += step;
                at
            }
            Pattern::Mixed(s) => s.next_line(&mut self.rng, self.spec.lines()) * line_bytes,
            Pattern::Uniform => below(&mut self.rng, self.spec.lines()) * line_bytes,
        };
        self.spec.base_address.wrapping_add(offset)
    }
}

impl Iterator for Generator {
    type Item = TraceRecord;

    fn next(&mut self) -> Option<TraceRecord> {
        let mut delta = 0;
        while self.executed < self.spec.length_instructions {
            self.executed += 1;
            self.acc += self.intensity;
            if self.acc < ONE {
                delta += 1;
                continue;
            }
            self.acc -= ONE;
            let address = self.next_address();
            let kind = if (self.rng.next_u64() >> 32) < self.write_threshold {
                AccessKind::Write
            } else {
                AccessKind::Read
            };
            return Some(TraceRecord {
                instruction_delta: delta,
                kind,
                address,
                size_bytes: self.spec.access_bytes,
            });
        }
        None
    }
}
