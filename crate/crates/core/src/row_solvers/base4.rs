//! Rows over `{0, 1, 2, 3}`: at most `rho/2 + C` 1-segments, `rho/4 + C`
//! 2-segments and `rho/6 + C` 3-segments.
//!
//! An island is a stretch `s (>s)+ s`. Every non-flat row contains a minimal
//! island (one with no island strictly inside), and flattening a minimal
//! island down to its border value removes exactly its markers. Minimal
//! islands, shifted down to border value 0 and with repeated symbols
//! collapsed, come from a finite set of patterns. That set is produced by
//! growing strings from `0` one symbol at a time and stopping as soon as an
//! island appears.
//!
//! For every pattern we precompute, by exhaustive search, a batch recipe:
//! a number of copies and a segmentation for each copy whose combined value
//! counts meet `n_v <= copies * markers / (2v)`. The row loop applies a
//! recipe whenever enough copies of one pattern are present at the same
//! time. When no pattern has enough copies the leftmost minimal island is
//! flattened on its own with its smallest segmentation. The additive
//! constant `C` bounds the total ascent a row can still hold at that point;
//! see [`base4_constant`].

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use crate::error::Result;
use crate::matrix::{markers, RowSegment};

use super::{check_alphabet, padded_runs, subtract, RowSegmentation, Run};

/// Largest batch size tried when searching for a recipe.
const MAX_COPIES: usize = 12;

type Counts = [u32; 3];

/// A segment inside a pattern interior: first and last interior index, value.
type PatternSegment = (usize, usize, u64);

#[derive(Clone, Debug)]
struct Choice {
    counts: Counts,
    segments: Vec<PatternSegment>,
}

#[derive(Clone, Debug)]
struct PatternEntry {
    pattern: Vec<u64>,
    markers: usize,
    ascent: u64,
    choices: Vec<Choice>,
    /// Indices into `choices`, one per copy of the batch.
    recipe: Vec<usize>,
    single: usize,
}

struct Table {
    entries: Vec<PatternEntry>,
    index: HashMap<Vec<u64>, usize>,
    constant: u64,
}

/// Summary of one island pattern and its batch recipe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IslandPattern {
    /// Collapsed pattern including both border zeros, e.g. `[0, 1, 2, 0]`.
    pub pattern: Vec<u64>,
    pub markers: usize,
    pub copies: usize,
    /// Segments of value 1, 2, 3 used by one full batch.
    pub batch_counts: [usize; 3],
    /// Segments of value 1, 2, 3 used to flatten a lone copy.
    pub single_counts: [usize; 3],
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(build_table)
}

/// All island patterns (up to mirroring) with their recipes.
pub fn base4_patterns() -> Vec<IslandPattern> {
    table()
        .entries
        .iter()
        .map(|e| {
            let mut batch = [0usize; 3];
            for &c in &e.recipe {
                for (acc, &n) in batch.iter_mut().zip(&e.choices[c].counts) {
                    *acc += n as usize;
                }
            }
            let single = e.choices[e.single].counts.map(|c| c as usize);
            IslandPattern {
                pattern: e.pattern.clone(),
                markers: e.markers,
                copies: e.recipe.len(),
                batch_counts: batch,
                single_counts: single,
            }
        })
        .collect()
}

/// The additive constant `C` of the base-4 row bound.
///
/// When no pattern reaches its batch size, each pattern `p` has at most
/// `copies_p - 1` minimal islands, so there are at most
/// `Q = sum (copies_p - 1)` of them. Islands nest at most three levels deep
/// (border values 0, 1, 2), so at most `2Q` non-minimal islands enclose them,
/// and each contributes at most the largest pattern ascent once its inner
/// islands are flattened. The remaining ascent, which caps every segment
/// emitted afterwards outside of batches, is therefore at most
/// `sum (copies_p - 1) * ascent_p + 2Q * max_ascent`.
pub fn base4_constant() -> u64 {
    table().constant
}

/// Per-value constants, `[C1, C2, C3]`. All three equal [`base4_constant`].
pub fn base4_additive_constants() -> [u64; 3] {
    [table().constant; 3]
}

/// Segments a `{0,1,2,3}` row.
pub fn segment_row_base4(row: &[u64]) -> Result<RowSegmentation> {
    check_alphabet(row, 3)?;
    let table = table();
    let mut residual = row.to_vec();
    let mut out = RowSegmentation::default();
    loop {
        let runs = padded_runs(&residual);
        let islands = minimal_islands(&runs, table);
        let Some(first) = islands.first() else {
            break;
        };

        // Patterns in order of their leftmost occurrence.
        let mut groups: Vec<(usize, Vec<&Occurrence>)> = Vec::new();
        for occ in &islands {
            match groups.iter_mut().find(|(p, _)| *p == occ.pattern) {
                Some((_, list)) => list.push(occ),
                None => groups.push((occ.pattern, vec![occ])),
            }
        }
        let batch = groups
            .iter()
            .find(|(p, list)| list.len() >= table.entries[*p].recipe.len());

        let mut segments = Vec::new();
        match batch {
            Some((p, list)) => {
                let entry = &table.entries[*p];
                for (occ, &choice) in list.iter().zip(&entry.recipe) {
                    segments.extend(place(&runs, occ, &entry.choices[choice]));
                }
            }
            None => {
                let entry = &table.entries[first.pattern];
                segments.extend(place(&runs, first, &entry.choices[entry.single]));
            }
        }
        for s in &segments {
            subtract(&mut residual, s);
        }
        out.segments.extend(segments);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
struct Occurrence {
    left: usize,
    right: usize,
    pattern: usize,
    mirrored: bool,
}

fn minimal_islands(runs: &[Run], table: &Table) -> Vec<Occurrence> {
    // At most one island starts at each run: the first return to its value.
    let mut starts: Vec<Option<usize>> = vec![None; runs.len()];
    for i in 0..runs.len() {
        let sigma = runs[i].value;
        let mut j = i + 1;
        while j < runs.len() && runs[j].value > sigma {
            j += 1;
        }
        if j < runs.len() && j > i + 1 && runs[j].value == sigma {
            starts[i] = Some(j);
        }
    }
    let mut out = Vec::new();
    for (i, end) in starts.iter().enumerate() {
        let Some(j) = *end else { continue };
        // Islands are laminar, so an inner island must start strictly inside.
        if (i + 1..j).any(|k| starts[k].is_some()) {
            continue;
        }
        let sigma = runs[i].value;
        let mut seq = Vec::with_capacity(j - i + 1);
        seq.push(0);
        seq.extend(runs[i + 1..j].iter().map(|r| r.value - sigma));
        seq.push(0);
        let (key, mirrored) = canonical(seq);
        let pattern = *table
            .index
            .get(&key)
            .unwrap_or_else(|| panic!("island pattern {key:?} missing from the table"));
        out.push(Occurrence {
            left: i,
            right: j,
            pattern,
            mirrored,
        });
    }
    out
}

fn place<'a>(
    runs: &'a [Run],
    occ: &'a Occurrence,
    choice: &'a Choice,
) -> impl Iterator<Item = RowSegment> + 'a {
    choice.segments.iter().map(move |&(a, b, v)| {
        let (from, to) = if occ.mirrored {
            (occ.right - 1 - b, occ.right - 1 - a)
        } else {
            (occ.left + 1 + a, occ.left + 1 + b)
        };
        debug_assert!(from > occ.left && to < occ.right);
        RowSegment::new(runs[from].start - 1, runs[to].end - 1, v)
    })
}

fn canonical(seq: Vec<u64>) -> (Vec<u64>, bool) {
    let rev: Vec<u64> = seq.iter().rev().copied().collect();
    if rev < seq {
        (rev, true)
    } else {
        (seq, false)
    }
}

/// Grows strings from `0`, never repeating the previous symbol, and collects
/// the island each string ends with once it has one.
fn enumerate_patterns() -> Vec<Vec<u64>> {
    fn island_at_end(s: &[u64]) -> Option<usize> {
        let j = s.len() - 1;
        let sigma = s[j];
        let mut i = j;
        while i > 0 {
            i -= 1;
            if s[i] == sigma {
                return (i + 1 < j).then_some(i);
            }
            if s[i] < sigma {
                return None;
            }
        }
        None
    }

    let mut found = std::collections::BTreeSet::new();
    let mut stack = vec![vec![0u64]];
    while let Some(node) = stack.pop() {
        let last = *node.last().unwrap();
        for symbol in 0..=3 {
            if symbol == last {
                continue;
            }
            let mut child = node.clone();
            child.push(symbol);
            match island_at_end(&child) {
                Some(i) => {
                    let sigma = child[i];
                    let island: Vec<u64> = child[i..].iter().map(|v| v - sigma).collect();
                    found.insert(canonical(island).0);
                }
                None => stack.push(child),
            }
        }
    }
    found.into_iter().collect()
}

/// Every distinct value-count vector reachable by a segmentation of
/// `interior`, one witness each.
fn segmentations(interior: &[u64]) -> BTreeMap<Counts, Vec<PatternSegment>> {
    fn go(
        residual: &mut Vec<u64>,
        memo: &mut HashMap<Vec<u64>, BTreeMap<Counts, Vec<PatternSegment>>>,
    ) -> BTreeMap<Counts, Vec<PatternSegment>> {
        if let Some(hit) = memo.get(residual) {
            return hit.clone();
        }
        let mut out = BTreeMap::new();
        match residual.iter().position(|&v| v > 0) {
            None => {
                out.insert([0; 3], Vec::new());
            }
            Some(i) => {
                for v in 1..=residual[i] {
                    let mut e = i;
                    while e < residual.len() && residual[e] >= v {
                        for cell in &mut residual[i..=e] {
                            *cell -= v;
                        }
                        for (mut counts, mut segs) in go(residual, memo) {
                            counts[v as usize - 1] += 1;
                            segs.push((i, e, v));
                            out.entry(counts).or_insert(segs);
                        }
                        for cell in &mut residual[i..=e] {
                            *cell += v;
                        }
                        e += 1;
                    }
                }
            }
        }
        memo.insert(residual.clone(), out.clone());
        out
    }
    go(&mut interior.to_vec(), &mut HashMap::new())
}

fn dominated(a: &Counts, b: &Counts) -> bool {
    a != b && b.iter().zip(a).all(|(x, y)| x <= y)
}

/// Smallest batch of copies whose summed counts satisfy
/// `2v * n_v <= copies * markers`; ties broken by fewest segments.
fn find_recipe(choices: &[Choice], markers: usize) -> Option<Vec<usize>> {
    for copies in 1..=MAX_COPIES {
        let budget = (copies * markers) as u32;
        let fits = |c: &Counts| (0..3).all(|v| 2 * (v as u32 + 1) * c[v] <= budget);
        // Reachable sums with back pointers, layer by layer.
        let mut layers: Vec<BTreeMap<Counts, (Counts, usize)>> =
            vec![BTreeMap::from([([0; 3], ([0; 3], usize::MAX))])];
        for _ in 0..copies {
            let mut next = BTreeMap::new();
            for sum in layers.last().unwrap().keys() {
                for (ci, choice) in choices.iter().enumerate() {
                    let s = [
                        sum[0] + choice.counts[0],
                        sum[1] + choice.counts[1],
                        sum[2] + choice.counts[2],
                    ];
                    if fits(&s) {
                        next.entry(s).or_insert((*sum, ci));
                    }
                }
            }
            layers.push(next);
        }
        let best = layers
            .last()
            .unwrap()
            .keys()
            .min_by_key(|c| (c.iter().sum::<u32>(), **c))
            .copied();
        if let Some(mut sum) = best {
            let mut picks = Vec::with_capacity(copies);
            for layer in layers.iter().skip(1).rev() {
                let (prev, ci) = layer[&sum];
                picks.push(ci);
                sum = prev;
            }
            picks.reverse();
            return Some(picks);
        }
    }
    None
}

fn build_table() -> Table {
    let mut entries = Vec::new();
    for pattern in enumerate_patterns() {
        let interior = &pattern[1..pattern.len() - 1];
        let all = segmentations(interior);
        let keys: Vec<Counts> = all.keys().copied().collect();
        let choices: Vec<Choice> = all
            .into_iter()
            .filter(|(c, _)| !keys.iter().any(|k| dominated(c, k)))
            .map(|(counts, segments)| Choice { counts, segments })
            .collect();
        let markers = markers(&pattern);
        let recipe = find_recipe(&choices, markers)
            .unwrap_or_else(|| panic!("no batch recipe for island pattern {pattern:?}"));
        // Fewest segments, then as many low values as possible.
        let single = (0..choices.len())
            .min_by_key(|&i| {
                let c = choices[i].counts;
                (
                    c.iter().sum::<u32>(),
                    std::cmp::Reverse(c[0]),
                    std::cmp::Reverse(c[1]),
                )
            })
            .expect("every island has a segmentation");
        entries.push(PatternEntry {
            ascent: crate::matrix::total_ascent(&pattern),
            pattern,
            markers,
            choices,
            recipe,
            single,
        });
    }
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.pattern.clone(), i))
        .collect();
    let leftover: u64 = entries
        .iter()
        .map(|e| (e.recipe.len() as u64 - 1) * e.ascent)
        .sum();
    let quota: u64 = entries.iter().map(|e| e.recipe.len() as u64 - 1).sum();
    let max_ascent = entries.iter().map(|e| e.ascent).max().unwrap_or(0);
    Table {
        entries,
        index,
        constant: leftover + 2 * quota * max_ascent,
    }
}
