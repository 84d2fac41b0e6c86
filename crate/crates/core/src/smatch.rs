//! Triple alignment between two AMR graphs.
//!
//! An alignment is an injective partial mapping from the variables of one
//! triple set onto the variables of another; its value is the number of
//! triples of the first set that land on triples of the second under the
//! mapping. Roles and constants must match exactly, with attribute constants
//! compared case-sensitively.
//!
//! Three searches are provided:
//!
//! * [`best_alignment`] in [`SearchMode::Exact`]: branch-and-bound that is
//!   guaranteed optimal and refuses inputs above `exact_limit` variables;
//! * [`best_alignment`] in [`SearchMode::HillClimb`]: seeded greedy ascent
//!   with restarts, deterministic for a fixed seed and input;
//! * [`oracle_alignment`]: plain exhaustive enumeration over injective
//!   mappings, usable as ground truth for small graphs.
//!
//! [`smatch_scores`] turns the best alignment of hypothesis against premise
//! into precision (`matched / |hypothesis triples|`), recall and F1.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::amr::{TripleKind, TripleSet};
use crate::score::PrfScores;
use crate::util::Fnv1a;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmatchError {
    #[error("{side} triple set is empty")]
    EmptyTriples { side: &'static str },
    #[error("exact search refused: {vars} variables exceed the limit of {limit}; use hill-climb")]
    ExactLimitExceeded { vars: usize, limit: usize },
    #[error("oracle refused: {vars} variables exceed the enumeration limit of {limit}")]
    OracleLimitExceeded { vars: usize, limit: usize },
    #[error("hill-climb needs at least one restart")]
    InvalidRestarts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exact,
    HillClimb,
}

/// Alignment search settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Hill-climb restarts; each restart draws a fresh seeded start.
    pub restarts: usize,
    /// Base seed. Hill-climb randomness is derived only from this seed, the
    /// restart index and the input triples.
    pub seed: u64,
    /// Largest variable count (of either side) the exact search accepts.
    pub exact_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::Exact,
            restarts: 8,
            seed: 0,
            exact_limit: 12,
        }
    }
}

/// The result of an alignment search: the variable mapping actually found
/// and the number of matched triples it achieves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub mapping: BTreeMap<String, String>,
    pub matched: usize,
}

/// Finds the highest-value alignment of `a`'s variables onto `b`'s.
pub fn best_alignment(
    a: &TripleSet,
    b: &TripleSet,
    cfg: &SearchConfig,
) -> Result<Alignment, SmatchError> {
    let (sa, sb) = sides(a, b)?;
    match cfg.mode {
        SearchMode::Exact => {
            let vars = sa.vars.len().max(sb.vars.len());
            if vars > cfg.exact_limit {
                return Err(SmatchError::ExactLimitExceeded {
                    vars,
                    limit: cfg.exact_limit,
                });
            }
            Ok(exact_search(&sa, &sb))
        }
        SearchMode::HillClimb => {
            if cfg.restarts == 0 {
                return Err(SmatchError::InvalidRestarts);
            }
            Ok(hill_climb(&sa, &sb, cfg, content_hash(a, b)))
        }
    }
}

/// Exact search when the graphs are small enough, hill-climb otherwise.
pub fn best_alignment_auto(
    a: &TripleSet,
    b: &TripleSet,
    cfg: &SearchConfig,
) -> Result<Alignment, SmatchError> {
    let vars = a.variable_count().max(b.variable_count());
    let mode = if vars > cfg.exact_limit {
        SearchMode::HillClimb
    } else {
        SearchMode::Exact
    };
    best_alignment(a, b, &SearchConfig { mode, ..*cfg })
}

/// Ground-truth alignment by full enumeration of injective mappings.
///
/// Refuses inputs where the smaller side exceeds 7 variables or the larger
/// side exceeds 12, which keeps the enumeration tractable.
pub fn oracle_alignment(a: &TripleSet, b: &TripleSet) -> Result<Alignment, SmatchError> {
    const SMALL_LIMIT: usize = 7;
    const LARGE_LIMIT: usize = 12;
    let (sa, sb) = sides(a, b)?;
    let (small, large) = if sa.vars.len() <= sb.vars.len() {
        (sa.vars.len(), sb.vars.len())
    } else {
        (sb.vars.len(), sa.vars.len())
    };
    if small > SMALL_LIMIT {
        return Err(SmatchError::OracleLimitExceeded {
            vars: small,
            limit: SMALL_LIMIT,
        });
    }
    if large > LARGE_LIMIT {
        return Err(SmatchError::OracleLimitExceeded {
            vars: large,
            limit: LARGE_LIMIT,
        });
    }
    let tables = Tables::build(&sb);
    let na = sa.vars.len();
    let nb = sb.vars.len();
    let mut best_map = vec![None; na];
    let mut best_matched = 0;
    let mut map = vec![None; na];
    if na <= nb {
        // Assign every a-variable a distinct b-variable.
        let mut used = vec![false; nb];
        enumerate_a(
            &sa,
            &tables,
            0,
            &mut map,
            &mut used,
            &mut best_matched,
            &mut best_map,
            &mut false,
        );
    } else {
        // Assign every b-variable a distinct a-variable.
        let mut used_a = vec![false; na];
        enumerate_b(
            &sa,
            &tables,
            nb,
            0,
            &mut map,
            &mut used_a,
            &mut best_matched,
            &mut best_map,
            &mut false,
        );
    }
    Ok(sa.alignment(&sb, &best_map, best_matched))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_a(
    sa: &Side,
    tables: &Tables,
    depth: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    best_matched: &mut usize,
    best_map: &mut Vec<Option<usize>>,
    seeded: &mut bool,
) {
    if depth == map.len() {
        let matched = matched_count(sa, tables, map);
        if !*seeded || matched > *best_matched {
            *seeded = true;
            *best_matched = matched;
            best_map.clone_from(map);
        }
        return;
    }
    for w in 0..used.len() {
        if used[w] {
            continue;
        }
        used[w] = true;
        map[depth] = Some(w);
        enumerate_a(
            sa,
            tables,
            depth + 1,
            map,
            used,
            best_matched,
            best_map,
            seeded,
        );
        map[depth] = None;
        used[w] = false;
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_b(
    sa: &Side,
    tables: &Tables,
    nb: usize,
    w: usize,
    map: &mut Vec<Option<usize>>,
    used_a: &mut Vec<bool>,
    best_matched: &mut usize,
    best_map: &mut Vec<Option<usize>>,
    seeded: &mut bool,
) {
    if w == nb {
        let matched = matched_count(sa, tables, map);
        if !*seeded || matched > *best_matched {
            *seeded = true;
            *best_matched = matched;
            best_map.clone_from(map);
        }
        return;
    }
    for v in 0..used_a.len() {
        if used_a[v] {
            continue;
        }
        used_a[v] = true;
        map[v] = Some(w);
        enumerate_b(
            sa,
            tables,
            nb,
            w + 1,
            map,
            used_a,
            best_matched,
            best_map,
            seeded,
        );
        map[v] = None;
        used_a[v] = false;
    }
}

/// Scores hypothesis containment in the premise under the best alignment.
///
/// Precision normalizes by the hypothesis triple count, recall by the
/// premise's; F1 is their harmonic mean and zero when both are zero.
pub fn smatch_scores(
    h: &TripleSet,
    p: &TripleSet,
    cfg: &SearchConfig,
) -> Result<PrfScores, SmatchError> {
    let alignment = best_alignment(h, p, cfg)?;
    Ok(scores_from(&alignment, h, p))
}

/// Like [`smatch_scores`] with the automatic exact/hill-climb choice.
pub fn smatch_scores_auto(
    h: &TripleSet,
    p: &TripleSet,
    cfg: &SearchConfig,
) -> Result<PrfScores, SmatchError> {
    let alignment = best_alignment_auto(h, p, cfg)?;
    Ok(scores_from(&alignment, h, p))
}

fn scores_from(alignment: &Alignment, h: &TripleSet, p: &TripleSet) -> PrfScores {
    let precision = alignment.matched as f64 / h.len() as f64;
    let recall = alignment.matched as f64 / p.len() as f64;
    PrfScores::from_pr(precision, recall)
}

// ---------------------------------------------------------------------------
// Internal indexed representation.

enum CTriple {
    Inst {
        v: usize,
        concept: String,
    },
    Attr {
        v: usize,
        role: String,
        value: String,
    },
    Rel {
        src: usize,
        role: String,
        dst: usize,
    },
}

struct Side {
    vars: Vec<String>,
    triples: Vec<CTriple>,
}

impl Side {
    fn build(set: &TripleSet) -> Side {
        let vars: Vec<String> = set.variables().map(str::to_string).collect();
        let idx: HashMap<&str, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let triples = set
            .iter()
            .map(|t| match t.kind {
                TripleKind::Instance => CTriple::Inst {
                    v: idx[t.arg1.as_str()],
                    concept: t.arg2.clone(),
                },
                TripleKind::Attribute => CTriple::Attr {
                    v: idx[t.arg1.as_str()],
                    role: t.role.clone(),
                    value: t.arg2.clone(),
                },
                TripleKind::Relation => CTriple::Rel {
                    src: idx[t.arg1.as_str()],
                    role: t.role.clone(),
                    dst: idx[t.arg2.as_str()],
                },
            })
            .collect();
        Side { vars, triples }
    }

    fn alignment(&self, other: &Side, map: &[Option<usize>], matched: usize) -> Alignment {
        let mapping = map
            .iter()
            .enumerate()
            .filter_map(|(v, w)| w.map(|w| (self.vars[v].clone(), other.vars[w].clone())))
            .collect();
        Alignment { mapping, matched }
    }
}

fn sides(a: &TripleSet, b: &TripleSet) -> Result<(Side, Side), SmatchError> {
    if a.is_empty() {
        return Err(SmatchError::EmptyTriples { side: "first" });
    }
    if b.is_empty() {
        return Err(SmatchError::EmptyTriples { side: "second" });
    }
    Ok((Side::build(a), Side::build(b)))
}

fn content_hash(a: &TripleSet, b: &TripleSet) -> u64 {
    let mut h = Fnv1a::new();
    for set in [a, b] {
        for t in set.iter() {
            h = h
                .write_u64(t.kind as u64)
                .write(t.role.as_bytes())
                .write(t.arg1.as_bytes())
                .write(t.arg2.as_bytes());
        }
        h = h.write(b"|");
    }
    h.finish()
}

/// Lookup tables over the target side.
struct Tables {
    inst_set: HashSet<(usize, String)>,
    inst_by_concept: HashMap<String, Vec<usize>>,
    attr_set: HashSet<(usize, String, String)>,
    attr_by_role_value: HashMap<(String, String), Vec<usize>>,
    rel_set: HashSet<(usize, String, usize)>,
    rel_by_role: HashMap<String, Vec<(usize, usize)>>,
    rel_by_role_src: HashMap<(String, usize), Vec<usize>>,
    rel_by_role_dst: HashMap<(String, usize), Vec<usize>>,
}

impl Tables {
    fn build(side: &Side) -> Tables {
        let mut t = Tables {
            inst_set: HashSet::new(),
            inst_by_concept: HashMap::new(),
            attr_set: HashSet::new(),
            attr_by_role_value: HashMap::new(),
            rel_set: HashSet::new(),
            rel_by_role: HashMap::new(),
            rel_by_role_src: HashMap::new(),
            rel_by_role_dst: HashMap::new(),
        };
        for triple in &side.triples {
            match triple {
                CTriple::Inst { v, concept } => {
                    t.inst_set.insert((*v, concept.clone()));
                    t.inst_by_concept
                        .entry(concept.clone())
                        .or_default()
                        .push(*v);
                }
                CTriple::Attr { v, role, value } => {
                    t.attr_set.insert((*v, role.clone(), value.clone()));
                    t.attr_by_role_value
                        .entry((role.clone(), value.clone()))
                        .or_default()
                        .push(*v);
                }
                CTriple::Rel { src, role, dst } => {
                    t.rel_set.insert((*src, role.clone(), *dst));
                    t.rel_by_role
                        .entry(role.clone())
                        .or_default()
                        .push((*src, *dst));
                    t.rel_by_role_src
                        .entry((role.clone(), *src))
                        .or_default()
                        .push(*dst);
                    t.rel_by_role_dst
                        .entry((role.clone(), *dst))
                        .or_default()
                        .push(*src);
                }
            }
        }
        t
    }
}

fn triple_matches(t: &CTriple, map: &[Option<usize>], tables: &Tables) -> bool {
    match t {
        CTriple::Inst { v, concept } => match map[*v] {
            Some(w) => tables.inst_set.contains(&(w, concept.clone())),
            None => false,
        },
        CTriple::Attr { v, role, value } => match map[*v] {
            Some(w) => tables.attr_set.contains(&(w, role.clone(), value.clone())),
            None => false,
        },
        CTriple::Rel { src, role, dst } => match (map[*src], map[*dst]) {
            (Some(ws), Some(wd)) => tables.rel_set.contains(&(ws, role.clone(), wd)),
            _ => false,
        },
    }
}

fn matched_count(side: &Side, tables: &Tables, map: &[Option<usize>]) -> usize {
    side.triples
        .iter()
        .filter(|t| triple_matches(t, map, tables))
        .count()
}

// ---------------------------------------------------------------------------
// Exact branch-and-bound.

struct ExactState<'s> {
    sa: &'s Side,
    tables: &'s Tables,
    /// Search order over a-variables (higher-degree first).
    order: Vec<usize>,
    /// Triple indices that become fully decided at each order position.
    decided_at: Vec<Vec<usize>>,
    /// For each order position, triples still undecided at that position.
    undecided_from: Vec<Vec<usize>>,
    nb: usize,
    best_matched: usize,
    best_map: Vec<Option<usize>>,
}

fn exact_search(sa: &Side, sb: &Side) -> Alignment {
    let tables = Tables::build(sb);
    let na = sa.vars.len();
    let nb = sb.vars.len();

    let mut degree = vec![0usize; na];
    for t in &sa.triples {
        match t {
            CTriple::Inst { v, .. } | CTriple::Attr { v, .. } => degree[*v] += 1,
            CTriple::Rel { src, dst, .. } => {
                degree[*src] += 1;
                if src != dst {
                    degree[*dst] += 1;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..na).collect();
    order.sort_by_key(|&v| (usize::MAX - degree[v], v));
    let mut pos_of = vec![0usize; na];
    for (pos, &v) in order.iter().enumerate() {
        pos_of[v] = pos;
    }

    let decide_pos: Vec<usize> = sa
        .triples
        .iter()
        .map(|t| match t {
            CTriple::Inst { v, .. } | CTriple::Attr { v, .. } => pos_of[*v],
            CTriple::Rel { src, dst, .. } => pos_of[*src].max(pos_of[*dst]),
        })
        .collect();
    let mut decided_at: Vec<Vec<usize>> = vec![Vec::new(); na];
    let mut undecided_from: Vec<Vec<usize>> = vec![Vec::new(); na];
    for (ti, &dp) in decide_pos.iter().enumerate() {
        decided_at[dp].push(ti);
        for position in undecided_from.iter_mut().take(dp + 1) {
            position.push(ti);
        }
    }

    let mut state = ExactState {
        sa,
        tables: &tables,
        order,
        decided_at,
        undecided_from,
        nb,
        best_matched: 0,
        best_map: vec![None; na],
    };

    // Seed the bound with a cheap greedy alignment so pruning bites early.
    let (greedy_map, greedy_matched) = greedy_pass(&state);
    state.best_matched = greedy_matched;
    state.best_map = greedy_map;

    let mut map = vec![None; na];
    let mut used = vec![false; nb];
    descend(&mut state, 0, &mut map, &mut used, 0);

    let best_map = state.best_map.clone();
    let best_matched = state.best_matched;
    sa.alignment(sb, &best_map, best_matched)
}

fn greedy_pass(state: &ExactState) -> (Vec<Option<usize>>, usize) {
    let na = state.order.len();
    let mut map = vec![None; na];
    let mut used = vec![false; state.nb];
    let mut matched = 0;
    for pos in 0..na {
        let v = state.order[pos];
        let mut best: Option<(usize, usize)> = None; // (gain, w)
        for (w, &w_used) in used.iter().enumerate() {
            if w_used {
                continue;
            }
            map[v] = Some(w);
            let gain = state.decided_at[pos]
                .iter()
                .filter(|&&ti| triple_matches(&state.sa.triples[ti], &map, state.tables))
                .count();
            map[v] = None;
            if best.is_none_or(|(bg, _)| gain > bg) {
                best = Some((gain, w));
            }
        }
        if let Some((gain, w)) = best {
            map[v] = Some(w);
            used[w] = true;
            matched += gain;
        }
    }
    (map, matched)
}

fn could_match(t: &CTriple, map: &[Option<usize>], used: &[bool], tables: &Tables) -> bool {
    match t {
        CTriple::Inst { v, concept } => match map[*v] {
            Some(w) => tables.inst_set.contains(&(w, concept.clone())),
            None => tables
                .inst_by_concept
                .get(concept)
                .is_some_and(|ws| ws.iter().any(|&w| !used[w])),
        },
        CTriple::Attr { v, role, value } => match map[*v] {
            Some(w) => tables.attr_set.contains(&(w, role.clone(), value.clone())),
            None => tables
                .attr_by_role_value
                .get(&(role.clone(), value.clone()))
                .is_some_and(|ws| ws.iter().any(|&w| !used[w])),
        },
        CTriple::Rel { src, role, dst } => match (map[*src], map[*dst]) {
            (Some(ws), Some(wd)) => tables.rel_set.contains(&(ws, role.clone(), wd)),
            (Some(ws), None) => tables
                .rel_by_role_src
                .get(&(role.clone(), ws))
                .is_some_and(|wds| wds.iter().any(|&wd| !used[wd])),
            (None, Some(wd)) => tables
                .rel_by_role_dst
                .get(&(role.clone(), wd))
                .is_some_and(|wss| wss.iter().any(|&ws| !used[ws])),
            (None, None) => tables.rel_by_role.get(role).is_some_and(|pairs| {
                pairs.iter().any(|&(ws, wd)| {
                    if src == dst {
                        ws == wd && !used[ws]
                    } else {
                        ws != wd && !used[ws] && !used[wd]
                    }
                })
            }),
        },
    }
}

fn descend(
    state: &mut ExactState,
    pos: usize,
    map: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
    matched: usize,
) {
    if pos == state.order.len() {
        if matched > state.best_matched {
            state.best_matched = matched;
            state.best_map.clone_from(map);
        }
        return;
    }
    // Admissible bound: every still-undecided triple that could match under
    // some extension counts as matched.
    let optimistic: usize = state.undecided_from[pos]
        .iter()
        .filter(|&&ti| could_match(&state.sa.triples[ti], map, used, state.tables))
        .count();
    if matched + optimistic <= state.best_matched {
        return;
    }
    let v = state.order[pos];
    let mut candidates: Vec<(usize, usize)> = Vec::new(); // (gain, w)
    for (w, &w_used) in used.iter().enumerate() {
        if w_used {
            continue;
        }
        map[v] = Some(w);
        let gain = state.decided_at[pos]
            .iter()
            .filter(|&&ti| triple_matches(&state.sa.triples[ti], map, state.tables))
            .count();
        map[v] = None;
        candidates.push((gain, w));
    }
    candidates.sort_by_key(|&(gain, w)| (usize::MAX - gain, w));
    for (gain, w) in candidates {
        map[v] = Some(w);
        used[w] = true;
        descend(state, pos + 1, map, used, matched + gain);
        used[w] = false;
        map[v] = None;
    }
    // Leaving the variable unmapped decides its triples as unmatched.
    descend(state, pos + 1, map, used, matched);
}

// ---------------------------------------------------------------------------
// Hill-climb with restarts.

fn hill_climb(sa: &Side, sb: &Side, cfg: &SearchConfig, content: u64) -> Alignment {
    let tables = Tables::build(sb);
    let na = sa.vars.len();
    let nb = sb.vars.len();
    let mut best: Option<(usize, Vec<Option<usize>>)> = None;
    for restart in 0..cfg.restarts {
        let seed = Fnv1a::new()
            .write_u64(cfg.seed)
            .write_u64(restart as u64)
            .write_u64(content)
            .finish();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut map = random_start(na, nb, &mut rng);
        let mut matched = matched_count(sa, &tables, &map);
        while let Some((next_map, next_matched)) = best_neighbor(sa, &tables, &map, nb, matched) {
            map = next_map;
            matched = next_matched;
        }
        if best.as_ref().is_none_or(|(m, _)| matched > *m) {
            best = Some((matched, map));
        }
    }
    let (matched, map) = best.expect("at least one restart");
    sa.alignment(sb, &map, matched)
}

fn random_start(na: usize, nb: usize, rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    let mut a_order: Vec<usize> = (0..na).collect();
    let mut b_order: Vec<usize> = (0..nb).collect();
    a_order.shuffle(rng);
    b_order.shuffle(rng);
    let mut map = vec![None; na];
    for (v, w) in a_order.into_iter().zip(b_order) {
        map[v] = Some(w);
    }
    map
}

/// Best single reassignment or swap that improves the matched count.
fn best_neighbor(
    sa: &Side,
    tables: &Tables,
    map: &[Option<usize>],
    nb: usize,
    current: usize,
) -> Option<(Vec<Option<usize>>, usize)> {
    let na = map.len();
    let used: HashSet<usize> = map.iter().flatten().copied().collect();
    let mut best: Option<(usize, Vec<Option<usize>>)> = None;
    let consider = |candidate: Vec<Option<usize>>,
                    best: &mut Option<(usize, Vec<Option<usize>>)>| {
        let matched = matched_count(sa, tables, &candidate);
        if matched > best.as_ref().map_or(current, |(m, _)| *m) {
            *best = Some((matched, candidate));
        }
    };
    for v in 0..na {
        for w in 0..nb {
            if used.contains(&w) {
                continue;
            }
            let mut candidate = map.to_vec();
            candidate[v] = Some(w);
            consider(candidate, &mut best);
        }
        if map[v].is_some() {
            let mut candidate = map.to_vec();
            candidate[v] = None;
            consider(candidate, &mut best);
        }
    }
    for i in 0..na {
        for j in i + 1..na {
            if map[i] == map[j] {
                continue;
            }
            let mut candidate = map.to_vec();
            candidate.swap(i, j);
            consider(candidate, &mut best);
        }
    }
    best.map(|(m, map)| (map, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::penman::parse;

    fn triples(text: &str) -> TripleSet {
        parse(text).expect("test graph parses").triples()
    }

    fn exact() -> SearchConfig {
        SearchConfig::default()
    }

    fn climb(seed: u64) -> SearchConfig {
        SearchConfig {
            mode: SearchMode::HillClimb,
            seed,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn identical_graphs_align_perfectly_despite_renamed_variables() {
        let a = triples("(c / chase-01 :ARG0 (d / dog) :ARG1 (k / cat))");
        let b = triples("(x / chase-01 :ARG0 (y / dog) :ARG1 (z / cat))");
        let alignment = best_alignment(&a, &b, &exact()).unwrap();
        assert_eq!(alignment.matched, 5);
        assert_eq!(alignment.mapping["c"], "x");
        assert_eq!(alignment.mapping["d"], "y");
        assert_eq!(alignment.mapping["k"], "z");
    }

    #[test]
    fn deleting_one_of_five_triples_gives_precision_one_recall_four_fifths() {
        let p = triples("(a / alpha :R1 (b / beta) :R2 (c / gamma))");
        assert_eq!(p.len(), 5);
        let h = TripleSet::from_triples(
            p.iter()
                .filter(|t| !(t.kind == TripleKind::Relation && t.role == "R2"))
                .cloned(),
        );
        assert_eq!(h.len(), 4);
        let s = smatch_scores(&h, &p, &exact()).unwrap();
        assert_eq!(s.precision, 1.0);
        assert_eq!(s.recall, 0.8);
        assert!((s.f1 - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_role_and_concept_graphs_share_nothing() {
        let h = triples("(a / angry :ARG1 (p / person))");
        let p = triples("(r / rage-01 :ARG0 (m / man))");
        let s = smatch_scores(&h, &p, &exact()).unwrap();
        assert_eq!(s.precision, 0.0);
        assert_eq!(s.recall, 0.0);
        assert_eq!(s.f1, 0.0);
    }

    #[test]
    fn exact_matches_oracle_on_permuted_graphs() {
        let a = triples("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let b = triples("(g2 / go-02 :ARG0 (b2 / boy :ARG0-of (w2 / want-01 :ARG1 g2)))");
        let exact_result = best_alignment(&a, &b, &exact()).unwrap();
        let oracle = oracle_alignment(&a, &b).unwrap();
        assert_eq!(exact_result.matched, oracle.matched);
        assert_eq!(exact_result.matched, 6);
    }

    #[test]
    fn attribute_constants_match_case_sensitively() {
        let a = triples("(p / person :name \"Ada\")");
        let b = triples("(q / person :name \"ada\")");
        let alignment = best_alignment(&a, &b, &exact()).unwrap();
        // The instance triple aligns, the attribute must not.
        assert_eq!(alignment.matched, 1);
    }

    #[test]
    fn exact_refuses_oversized_graphs_and_signals_fallback() {
        let mut nodes = vec![("r".to_string(), "root".to_string())];
        let mut edges = Vec::new();
        for i in 0..13 {
            let var = format!("v{i}");
            nodes.push((var.clone(), format!("c{i}")));
            edges.push(("r".to_string(), "op".to_string(), var));
        }
        let g = crate::amr::AmrGraph::from_parts("r", nodes, edges, vec![]).unwrap();
        let t = g.triples();
        let err = best_alignment(&t, &t, &exact()).unwrap_err();
        assert!(matches!(
            err,
            SmatchError::ExactLimitExceeded {
                vars: 14,
                limit: 12
            }
        ));
        // The auto entry point falls back to hill-climb instead.
        assert!(best_alignment_auto(&t, &t, &exact()).is_ok());
    }

    #[test]
    fn hill_climb_is_deterministic_for_a_fixed_seed() {
        let a = triples("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
        let b = triples("(s / see-01 :ARG0 (b2 / boy) :ARG1 (g2 / go-02 :ARG0 b2))");
        let first = best_alignment(&a, &b, &climb(17)).unwrap();
        let second = best_alignment(&a, &b, &climb(17)).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn hill_climb_finds_the_optimum_on_small_graphs() {
        let a = triples("(c / chase-01 :ARG0 (d / dog) :ARG1 (k / cat))");
        let b = triples("(c / chase-01 :ARG0 (d / dog) :ARG1 (k / cat) :mod (f / fast))");
        let climbed = best_alignment(&a, &b, &climb(0)).unwrap();
        let oracle = oracle_alignment(&a, &b).unwrap();
        assert_eq!(climbed.matched, oracle.matched);
    }

    #[test]
    fn zero_restarts_is_an_error() {
        let a = triples("(a / alpha)");
        let cfg = SearchConfig {
            mode: SearchMode::HillClimb,
            restarts: 0,
            ..SearchConfig::default()
        };
        assert_eq!(
            best_alignment(&a, &a, &cfg).unwrap_err(),
            SmatchError::InvalidRestarts
        );
    }

    #[test]
    fn oracle_refuses_when_both_sides_are_large() {
        let mut nodes = vec![("r".to_string(), "root".to_string())];
        let mut edges = Vec::new();
        for i in 0..8 {
            let var = format!("v{i}");
            nodes.push((var.clone(), format!("c{i}")));
            edges.push(("r".to_string(), "op".to_string(), var));
        }
        let g = crate::amr::AmrGraph::from_parts("r", nodes, edges, vec![]).unwrap();
        let t = g.triples();
        assert!(matches!(
            oracle_alignment(&t, &t),
            Err(SmatchError::OracleLimitExceeded { .. })
        ));
    }

    #[test]
    fn empty_triple_sets_are_rejected() {
        let empty = TripleSet::from_triples(Vec::new());
        let a = triples("(a / alpha)");
        assert!(matches!(
            best_alignment(&empty, &a, &exact()),
            Err(SmatchError::EmptyTriples { side: "first" })
        ));
        assert!(matches!(
            best_alignment(&a, &empty, &exact()),
            Err(SmatchError::EmptyTriples { side: "second" })
        ));
    }

    #[test]
    fn precision_of_h_in_p_equals_recall_of_p_in_h() {
        let a = triples("(a / alpha :R1 (b / beta))");
        let b = triples("(x / alpha :R1 (y / beta) :R2 (z / gamma))");
        let ab = smatch_scores(&a, &b, &exact()).unwrap();
        let ba = smatch_scores(&b, &a, &exact()).unwrap();
        assert_eq!(ab.precision, ba.recall);
        assert_eq!(ab.recall, ba.precision);
        assert_eq!(ab.f1, ba.f1);
    }
}
