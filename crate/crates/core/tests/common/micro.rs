//! A small synthetic corpus with a noun hierarchy and its entailment pairs.
//!
//! Five classes each have a broad noun, two narrow nouns and an
//! intransitive verb. Every class owns sixteen context words; each narrow
//! noun only ever appears with four of them, the broad noun with all
//! sixteen. Verbs appear with their class contexts and with a pool of
//! generic context words shared by all verbs. Each line holds one target
//! word and three contexts, so with a window of five every context is seen.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Class {
    pub broad: &'static str,
    pub narrow: [&'static str; 2],
    pub verb: &'static str,
    pub tag: char,
}

pub const CLASSES: [Class; 5] = [
    Class { broad: "person", narrow: ["boy", "girl"], verb: "walks", tag: 'p' },
    Class { broad: "animal", narrow: ["dog", "cat"], verb: "sleeps", tag: 'a' },
    Class { broad: "vehicle", narrow: ["car", "truck"], verb: "stops", tag: 'v' },
    Class { broad: "food", narrow: ["apple", "bread"], verb: "rots", tag: 'f' },
    Class { broad: "tool", narrow: ["hammer", "drill"], verb: "breaks", tag: 't' },
];

pub const CLASS_CONTEXTS: usize = 16;
pub const NARROW_CONTEXTS: usize = 4;
pub const GENERIC_CONTEXTS: usize = 10;
pub const CONTEXTS_PER_LINE: usize = 3;
pub const WINDOW: usize = 5;

pub fn class_contexts(c: &Class) -> Vec<String> {
    (0..CLASS_CONTEXTS).map(|i| format!("{}{i:02}", c.tag)).collect()
}

/// Context words of narrow noun `k` (0 or 1) of a class.
pub fn narrow_contexts(c: &Class, k: usize) -> Vec<String> {
    class_contexts(c)[k * NARROW_CONTEXTS..(k + 1) * NARROW_CONTEXTS].to_vec()
}

pub fn generic_contexts() -> Vec<String> {
    (0..GENERIC_CONTEXTS).map(|i| format!("g{i:02}")).collect()
}

/// Draws contexts like cards from a deck that is reshuffled when empty, so
/// every context of `pool` turns up about equally often.
fn lines_for(rng: &mut ChaCha8Rng, target: &str, pool: &[String], n: usize, out: &mut Vec<String>) {
    let mut deck: Vec<&String> = Vec::new();
    for _ in 0..n {
        let mut line = target.to_string();
        for _ in 0..CONTEXTS_PER_LINE {
            if deck.is_empty() {
                deck = pool.iter().collect();
                deck.shuffle(rng);
            }
            line.push(' ');
            line.push_str(deck.pop().expect("refilled above"));
        }
        out.push(line);
    }
}

/// 300 lines: per class 20 broad, 2 × 10 narrow and 20 verb lines.
pub fn corpus(seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generic = generic_contexts();
    let mut lines = Vec::new();
    for c in &CLASSES {
        let contexts = class_contexts(c);
        lines_for(&mut rng, c.broad, &contexts, 20, &mut lines);
        for (k, n) in c.narrow.iter().enumerate() {
            lines_for(&mut rng, n, &narrow_contexts(c, k), 10, &mut lines);
        }
        let verb_pool: Vec<String> = contexts.iter().chain(&generic).cloned().collect();
        lines_for(&mut rng, c.verb, &verb_pool, 20, &mut lines);
    }
    lines.shuffle(&mut rng);
    lines
}

/// Number of distinct tokens in [`corpus`].
pub fn token_types() -> usize {
    CLASSES.len() * (4 + CLASS_CONTEXTS) + GENERIC_CONTEXTS
}

/// Ten `narrow verb → broad verb` positives followed by their reversals,
/// in the dataset file format.
pub fn dataset_tsv() -> String {
    let mut pos = String::new();
    let mut neg = String::new();
    for c in &CLASSES {
        for n in c.narrow {
            pos.push_str(&format!("{n} {v}\t{b} {v}\t1\n", v = c.verb, b = c.broad));
            neg.push_str(&format!("{b} {v}\t{n} {v}\t0\n", v = c.verb, b = c.broad));
        }
    }
    pos + &neg
}
