//! Counterfactual ordering grammars.
//!
//! A grammar assigns every dependency relation label a weight in [-1, 1].
//! Dependents of a head are placed in ascending weight order: negative-weight
//! dependents (with their subtrees) before the head, the rest after it. The
//! head itself sits at implicit weight 0 between the two groups. Weights are
//! kept pairwise distinct at construction so linearization never needs a
//! tie-break between different relations; dependents sharing a relation keep
//! their attested relative order.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::conllu::{Corpus, DepTree};
use crate::optimize::HillClimbBudget;

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("weight {weight} for relation {relation:?} outside [-1, 1]")]
    InvalidWeight { relation: String, weight: f64 },
    #[error("relations {a:?} and {b:?} share weight {weight}")]
    TiedWeights { a: String, b: String, weight: f64 },
    #[error("no weight defined for relation {0:?}")]
    MissingWeight(String),
    #[error("operation needs at least {needed} relations, grammar has {got}")]
    TooFewRelations { needed: usize, got: usize },
    #[error("relation set is empty")]
    EmptyRelationSet,
    #[error("grammar JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Relation label -> weight in [-1, 1], weights pairwise distinct.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OrderingGrammar {
    weights: BTreeMap<String, f64>,
}

impl OrderingGrammar {
    pub fn new(weights: BTreeMap<String, f64>) -> Result<Self, GrammarError> {
        if weights.is_empty() {
            return Err(GrammarError::EmptyRelationSet);
        }
        for (rel, &w) in &weights {
            if !w.is_finite() || !(-1.0..=1.0).contains(&w) {
                return Err(GrammarError::InvalidWeight {
                    relation: rel.clone(),
                    weight: w,
                });
            }
        }
        let mut by_weight: Vec<(&String, f64)> = weights.iter().map(|(r, &w)| (r, w)).collect();
        by_weight.sort_by(|a, b| a.1.total_cmp(&b.1));
        for pair in by_weight.windows(2) {
            if pair[0].1 == pair[1].1 {
                return Err(GrammarError::TiedWeights {
                    a: pair[0].0.clone(),
                    b: pair[1].0.clone(),
                    weight: pair[0].1,
                });
            }
        }
        Ok(OrderingGrammar { weights })
    }

    pub fn weight(&self, relation: &str) -> Option<f64> {
        self.weights.get(relation).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Relations in lexicographic order.
    pub fn relations(&self) -> impl Iterator<Item = &str> {
        self.weights.keys().map(|s| s.as_str())
    }

    pub fn weights(&self) -> &BTreeMap<String, f64> {
        &self.weights
    }

    /// True if every relation in `inventory` has a weight.
    pub fn covers(&self, inventory: &BTreeSet<String>) -> bool {
        inventory.iter().all(|r| self.weights.contains_key(r))
    }

    /// JSON object {relation: weight}; keys are emitted in lexicographic
    /// order, so equal grammars serialize byte-identically.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.weights).expect("weight map serializes")
    }

    pub fn from_json_str(json: &str) -> Result<Self, GrammarError> {
        let weights: BTreeMap<String, f64> = serde_json::from_str(json)?;
        Self::new(weights)
    }

    /// Relations sorted by ascending weight.
    fn rank_order(&self) -> Vec<(&str, f64)> {
        let mut order: Vec<(&str, f64)> = self
            .weights
            .iter()
            .map(|(r, &w)| (r.as_str(), w))
            .collect();
        order.sort_by(|a, b| a.1.total_cmp(&b.1));
        order
    }
}

/// A deterministic surface order for one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedSentence {
    /// Token indices (1-based) in surface order.
    pub order: Vec<usize>,
    /// positions[i] = 0-based surface position of token index i+1.
    pub positions: Vec<usize>,
}

impl LinearizedSentence {
    /// The attested order of a tree: token indices as given.
    pub fn attested(tree: &DepTree) -> Self {
        let n = tree.len();
        LinearizedSentence {
            order: (1..=n).collect(),
            positions: (0..n).collect(),
        }
    }

    pub fn position(&self, token_index: usize) -> usize {
        self.positions[token_index - 1]
    }
}

/// Linearizes a tree under a grammar. At each head, dependents are sorted by
/// ascending weight (ties between same-relation dependents fall back to
/// attested order); each dependent contributes its whole recursively
/// linearized subtree, so every subtree occupies a contiguous span.
pub fn linearize(
    tree: &DepTree,
    grammar: &OrderingGrammar,
) -> Result<LinearizedSentence, GrammarError> {
    let children = tree.children_table();
    let mut order = Vec::with_capacity(tree.len());
    emit(tree, grammar, &children, tree.root(), &mut order)?;
    let mut positions = vec![0usize; tree.len()];
    for (pos, &idx) in order.iter().enumerate() {
        positions[idx - 1] = pos;
    }
    Ok(LinearizedSentence { order, positions })
}

fn emit(
    tree: &DepTree,
    grammar: &OrderingGrammar,
    children: &[Vec<usize>],
    head: usize,
    out: &mut Vec<usize>,
) -> Result<(), GrammarError> {
    let mut deps: Vec<(f64, usize)> = Vec::with_capacity(children[head].len());
    for &child in &children[head] {
        let rel = &tree.tokens[child - 1].deprel;
        let w = grammar
            .weight(rel)
            .ok_or_else(|| GrammarError::MissingWeight(rel.clone()))?;
        deps.push((w, child));
    }
    // Stable on the attested child order, so same-relation dependents keep it.
    deps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let split = deps.partition_point(|&(w, _)| w < 0.0);
    for &(_, child) in &deps[..split] {
        emit(tree, grammar, children, child, out)?;
    }
    out.push(head);
    for &(_, child) in &deps[split..] {
        emit(tree, grammar, children, child, out)?;
    }
    Ok(())
}

/// Draws one weight per relation independently uniform on [-1, 1], redrawing
/// on exact collision. Deterministic for a fixed generator state.
pub fn random_grammar<R: Rng>(
    relations: &BTreeSet<String>,
    rng: &mut R,
) -> Result<OrderingGrammar, GrammarError> {
    if relations.is_empty() {
        return Err(GrammarError::EmptyRelationSet);
    }
    let mut weights = BTreeMap::new();
    let mut used = Vec::new();
    for rel in relations {
        let w = draw_distinct(rng, &used);
        used.push(w);
        weights.insert(rel.clone(), w);
    }
    OrderingGrammar::new(weights)
}

fn draw_distinct<R: Rng>(rng: &mut R, used: &[f64]) -> f64 {
    loop {
        let w: f64 = rng.gen_range(-1.0..=1.0);
        if !used.contains(&w) {
            return w;
        }
    }
}

/// Hill-climbing move: one uniformly chosen relation gets a fresh uniform
/// weight in [-1, 1], every other weight is untouched. Resampling the weight
/// reaches every rank position and either sign with positive probability.
pub fn reposition_mutation<R: Rng>(grammar: &OrderingGrammar, rng: &mut R) -> OrderingGrammar {
    let relations: Vec<&str> = grammar.relations().collect();
    let target = relations[rng.gen_range(0..relations.len())].to_string();
    let others: Vec<f64> = grammar
        .weights
        .iter()
        .filter(|(r, _)| **r != target)
        .map(|(_, &w)| w)
        .collect();
    let fresh = draw_distinct(rng, &others);
    let mut weights = grammar.weights.clone();
    weights.insert(target, fresh);
    OrderingGrammar { weights }
}

/// Neutral-drift move: swaps the weights of a uniformly chosen pair of
/// relations adjacent in the weight order. The weight multiset is invariant.
pub fn adjacent_swap_mutation<R: Rng>(
    grammar: &OrderingGrammar,
    rng: &mut R,
) -> Result<OrderingGrammar, GrammarError> {
    if grammar.len() < 2 {
        return Err(GrammarError::TooFewRelations {
            needed: 2,
            got: grammar.len(),
        });
    }
    let pair = rng.gen_range(0..grammar.len() - 1);
    Ok(swap_adjacent_pair(grammar, pair))
}

/// Swaps the weights of the `pair`-th adjacent pair in ascending weight order
/// (pair k = the relations at ranks k and k+1). Applying the same pair twice
/// is the identity.
pub fn swap_adjacent_pair(grammar: &OrderingGrammar, pair: usize) -> OrderingGrammar {
    let order = grammar.rank_order();
    assert!(pair + 1 < order.len(), "pair index out of range");
    let (rel_a, w_a) = (order[pair].0.to_string(), order[pair].1);
    let (rel_b, w_b) = (order[pair + 1].0.to_string(), order[pair + 1].1);
    let mut weights = grammar.weights.clone();
    weights.insert(rel_a, w_b);
    weights.insert(rel_b, w_a);
    OrderingGrammar { weights }
}

/// Attested-order pair statistics for grammar fitting: for every head, over
/// the set {head} ∪ dependents, how many ordered pairs the corpus places each
/// way. Pair order under a grammar depends only on weight comparisons, so a
/// candidate grammar is scored without linearizing.
#[derive(Debug, Clone)]
pub struct PairOrderStats {
    /// relation -> (dependent attested before head, after head).
    head_pairs: BTreeMap<String, (u64, u64)>,
    /// (r1, r2) with r1 != r2 -> pairs where the r1 dependent precedes the r2
    /// dependent of the same head.
    dep_pairs: BTreeMap<(String, String), u64>,
    /// Same-relation pairs; always agree because linearization keeps attested
    /// order within a relation.
    same_relation_pairs: u64,
    total_pairs: u64,
}

impl PairOrderStats {
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut head_pairs: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        let mut dep_pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
        let mut same = 0u64;
        let mut total = 0u64;
        for tree in &corpus.trees {
            let children = tree.children_table();
            for head in 1..=tree.len() {
                let deps = &children[head];
                for &d in deps {
                    let rel = &tree.tokens[d - 1].deprel;
                    let entry = head_pairs.entry(rel.clone()).or_insert((0, 0));
                    if d < head {
                        entry.0 += 1;
                    } else {
                        entry.1 += 1;
                    }
                    total += 1;
                }
                for (i, &d1) in deps.iter().enumerate() {
                    for &d2 in &deps[i + 1..] {
                        // d1 < d2 in attested order by construction.
                        let r1 = &tree.tokens[d1 - 1].deprel;
                        let r2 = &tree.tokens[d2 - 1].deprel;
                        total += 1;
                        if r1 == r2 {
                            same += 1;
                        } else {
                            *dep_pairs.entry((r1.clone(), r2.clone())).or_insert(0) += 1;
                        }
                    }
                }
            }
        }
        PairOrderStats {
            head_pairs,
            dep_pairs,
            same_relation_pairs: same,
            total_pairs: total,
        }
    }

    /// Fraction of pairs whose relative order under the grammar matches the
    /// attested order; 0 when the corpus has no pairs at all.
    pub fn agreement(&self, grammar: &OrderingGrammar) -> f64 {
        if self.total_pairs == 0 {
            return 0.0;
        }
        let mut agree = self.same_relation_pairs;
        for (rel, &(before, after)) in &self.head_pairs {
            match grammar.weight(rel) {
                Some(w) if w < 0.0 => agree += before,
                Some(_) => agree += after,
                None => {}
            }
        }
        for ((r1, r2), &count) in &self.dep_pairs {
            if let (Some(w1), Some(w2)) = (grammar.weight(r1), grammar.weight(r2)) {
                if w1 < w2 {
                    agree += count;
                }
            }
        }
        agree as f64 / self.total_pairs as f64
    }

    pub fn total_pairs(&self) -> u64 {
        self.total_pairs
    }
}

/// Fits a grammar to the attested orders by hill climbing on pair-order
/// agreement: random start, reposition moves, accept strict improvements,
/// stop after `budget.stall_iterations` without an accepted change or
/// `budget.max_iterations` total.
pub fn fit_grammar_to_corpus<R: Rng>(
    corpus: &Corpus,
    rng: &mut R,
    budget: HillClimbBudget,
) -> Result<OrderingGrammar, GrammarError> {
    let stats = PairOrderStats::from_corpus(corpus);
    let mut current = random_grammar(&corpus.relation_inventory, rng)?;
    let mut current_score = stats.agreement(&current);
    let mut stall = 0usize;
    for _ in 0..budget.max_iterations {
        if stall >= budget.stall_iterations {
            break;
        }
        let candidate = reposition_mutation(&current, rng);
        let score = stats.agreement(&candidate);
        if score > current_score {
            current = candidate;
            current_score = score;
            stall = 0;
        } else {
            stall += 1;
        }
    }
    Ok(current)
}

/// Whether a correlate's weight is expected on the same side as obj or the
/// opposite side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignAlignment {
    Same,
    Opposite,
}

/// One row of the Greenberg correlation table: a named correlate, the
/// relation label realizing it, and the expected sign relation to obj.
#[derive(Debug, Clone, Serialize)]
pub struct GreenbergCorrelate {
    pub name: &'static str,
    pub relation: &'static str,
    pub alignment: SignAlignment,
}

/// Default correlate table: eight relations scored by sign agreement with
/// obj. This is configuration, not hard-coded truth; see [`dryer_ud_table`]
/// for the variant where function-word relations anti-align.
pub fn default_greenberg_table() -> Vec<GreenbergCorrelate> {
    use SignAlignment::Same;
    vec![
        GreenbergCorrelate { name: "adposition", relation: "case", alignment: Same },
        GreenbergCorrelate { name: "copula", relation: "cop", alignment: Same },
        GreenbergCorrelate { name: "auxiliary", relation: "aux", alignment: Same },
        GreenbergCorrelate { name: "genitive", relation: "nmod", alignment: Same },
        GreenbergCorrelate { name: "relative-clause", relation: "acl", alignment: Same },
        GreenbergCorrelate { name: "complementizer", relation: "mark", alignment: Same },
        GreenbergCorrelate { name: "oblique", relation: "obl", alignment: Same },
        GreenbergCorrelate { name: "want-complement", relation: "xcomp", alignment: Same },
    ]
}

/// Alternative table where the function-word correlates (case, cop, aux,
/// mark) are expected on the opposite side of their head from obj, matching
/// how those elements attach in the UD representation.
pub fn dryer_ud_table() -> Vec<GreenbergCorrelate> {
    use SignAlignment::{Opposite, Same};
    vec![
        GreenbergCorrelate { name: "adposition", relation: "case", alignment: Opposite },
        GreenbergCorrelate { name: "copula", relation: "cop", alignment: Opposite },
        GreenbergCorrelate { name: "auxiliary", relation: "aux", alignment: Opposite },
        GreenbergCorrelate { name: "genitive", relation: "nmod", alignment: Same },
        GreenbergCorrelate { name: "relative-clause", relation: "acl", alignment: Same },
        GreenbergCorrelate { name: "complementizer", relation: "mark", alignment: Opposite },
        GreenbergCorrelate { name: "oblique", relation: "obl", alignment: Same },
        GreenbergCorrelate { name: "want-complement", relation: "xcomp", alignment: Same },
    ]
}

/// One direction indicator: 1 when the correlate's sign relates to obj's sign
/// in the correlating direction, 0 otherwise, None when the grammar lacks the
/// relation (or obj itself).
#[derive(Debug, Clone, Serialize)]
pub struct GreenbergIndicator {
    pub name: &'static str,
    pub relation: &'static str,
    pub indicator: Option<bool>,
}

pub fn greenberg_profile(
    grammar: &OrderingGrammar,
    table: &[GreenbergCorrelate],
) -> Vec<GreenbergIndicator> {
    let obj_sign = grammar.weight("obj").map(|w| w < 0.0);
    table
        .iter()
        .map(|row| {
            let indicator = match (obj_sign, grammar.weight(row.relation)) {
                (Some(obj_neg), Some(w)) => {
                    let corr_neg = w < 0.0;
                    Some(match row.alignment {
                        SignAlignment::Same => corr_neg == obj_neg,
                        SignAlignment::Opposite => corr_neg != obj_neg,
                    })
                }
                _ => None,
            };
            GreenbergIndicator {
                name: row.name,
                relation: row.relation,
                indicator,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{corpus_of, grammar_of, transitive_tree, tree_of};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn forms_in_order(tree: &DepTree, lin: &LinearizedSentence) -> Vec<String> {
        lin.order
            .iter()
            .map(|&i| tree.tokens[i - 1].form.clone())
            .collect()
    }

    #[test]
    fn svo_weights_give_svo_order() {
        let tree = transitive_tree("dogs", "bite", "people");
        let grammar = grammar_of(&[("nsubj", -0.8), ("obj", 0.3), ("root", 0.0)]);
        let lin = linearize(&tree, &grammar).unwrap();
        assert_eq!(forms_in_order(&tree, &lin), vec!["dogs", "bite", "people"]);
    }

    #[test]
    fn both_negative_weights_give_sov_order() {
        let tree = transitive_tree("dogs", "bite", "people");
        let grammar = grammar_of(&[("nsubj", -0.8), ("obj", -0.3), ("root", 0.0)]);
        let lin = linearize(&tree, &grammar).unwrap();
        assert_eq!(forms_in_order(&tree, &lin), vec!["dogs", "people", "bite"]);
    }

    #[test]
    fn single_token_tree_linearizes_to_itself() {
        let tree = tree_of(&[("ouch", "INTJ", 0, "root")]);
        let grammar = grammar_of(&[("root", 0.1)]);
        let lin = linearize(&tree, &grammar).unwrap();
        assert_eq!(lin.order, vec![1]);
        assert_eq!(lin.positions, vec![0]);
    }

    #[test]
    fn missing_weight_names_the_relation() {
        let tree = transitive_tree("dogs", "bite", "people");
        let grammar = grammar_of(&[("nsubj", -0.8)]);
        match linearize(&tree, &grammar) {
            Err(GrammarError::MissingWeight(rel)) => assert_eq!(rel, "obj"),
            other => panic!("expected MissingWeight, got {other:?}"),
        }
    }

    #[test]
    fn nested_subtrees_stay_contiguous() {
        // "big dogs bite people": amod under nsubj.
        let tree = tree_of(&[
            ("big", "ADJ", 2, "amod"),
            ("dogs", "NOUN", 3, "nsubj"),
            ("bite", "VERB", 0, "root"),
            ("people", "NOUN", 3, "obj"),
        ]);
        let grammar = grammar_of(&[("amod", -0.5), ("nsubj", -0.8), ("obj", 0.3), ("root", 0.0)]);
        let lin = linearize(&tree, &grammar).unwrap();
        assert_eq!(
            forms_in_order(&tree, &lin),
            vec!["big", "dogs", "bite", "people"]
        );
    }

    #[test]
    fn same_relation_dependents_keep_attested_order() {
        let tree = tree_of(&[
            ("quickly", "ADV", 3, "advmod"),
            ("quietly", "ADV", 3, "advmod"),
            ("left", "VERB", 0, "root"),
        ]);
        let grammar = grammar_of(&[("advmod", -0.2), ("root", 0.4)]);
        let lin = linearize(&tree, &grammar).unwrap();
        assert_eq!(
            forms_in_order(&tree, &lin),
            vec!["quickly", "quietly", "left"]
        );
    }

    #[test]
    fn random_grammar_is_deterministic_and_distinct() {
        let relations: BTreeSet<String> = (0..37).map(|i| format!("rel{i:02}")).collect();
        let a = random_grammar(&relations, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_grammar(&relations, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 37);
        let mut weights: Vec<f64> = a.weights().values().copied().collect();
        weights.sort_by(f64::total_cmp);
        weights.dedup();
        assert_eq!(weights.len(), 37);
        assert!(weights.iter().all(|w| (-1.0..=1.0).contains(w)));

        let singleton: BTreeSet<String> = ["nsubj".to_string()].into_iter().collect();
        let g = random_grammar(&singleton, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn reposition_changes_exactly_one_relation() {
        let grammar = grammar_of(&[("a", -0.5), ("b", 0.5), ("c", 0.9)]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mutated = reposition_mutation(&grammar, &mut rng);
            let changed: Vec<&str> = grammar
                .relations()
                .filter(|r| grammar.weight(r) != mutated.weight(r))
                .collect();
            assert!(changed.len() <= 1);
            assert_eq!(mutated.len(), grammar.len());
        }
    }

    #[test]
    fn reposition_hits_every_relation_eventually() {
        // Coupon collector: 10,000 draws over 37 relations miss one with
        // probability <= 37*(36/37)^10000, far below any practical concern.
        let relations: BTreeSet<String> = (0..37).map(|i| format!("rel{i:02}")).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grammar = random_grammar(&relations, &mut rng).unwrap();
        let mut touched: BTreeSet<String> = BTreeSet::new();
        let mut current = grammar.clone();
        for _ in 0..10_000 {
            let next = reposition_mutation(&current, &mut rng);
            for rel in current.relations() {
                if current.weight(rel) != next.weight(rel) {
                    touched.insert(rel.to_string());
                }
            }
            current = next;
        }
        assert_eq!(touched.len(), 37);
    }

    #[test]
    fn adjacent_swap_matches_definition() {
        let grammar = grammar_of(&[("a", -0.5), ("b", 0.1), ("c", 0.7)]);
        let swapped = swap_adjacent_pair(&grammar, 0);
        assert_eq!(swapped.weight("a"), Some(0.1));
        assert_eq!(swapped.weight("b"), Some(-0.5));
        assert_eq!(swapped.weight("c"), Some(0.7));
    }

    #[test]
    fn adjacent_swap_twice_is_identity() {
        let grammar = grammar_of(&[("a", -0.5), ("b", 0.1), ("c", 0.7), ("d", 0.9)]);
        for pair in 0..3 {
            let twice = swap_adjacent_pair(&swap_adjacent_pair(&grammar, pair), pair);
            assert_eq!(twice, grammar);
        }
    }

    #[test]
    fn two_relation_swap_always_swaps() {
        let grammar = grammar_of(&[("a", -0.5), ("b", 0.5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let swapped = adjacent_swap_mutation(&grammar, &mut rng).unwrap();
        assert_eq!(swapped.weight("a"), Some(0.5));
        assert_eq!(swapped.weight("b"), Some(-0.5));
    }

    #[test]
    fn swap_preserves_weight_multiset() {
        let grammar = grammar_of(&[("a", -0.9), ("b", -0.1), ("c", 0.2), ("d", 0.8)]);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut current = grammar.clone();
        for _ in 0..200 {
            current = adjacent_swap_mutation(&current, &mut rng).unwrap();
        }
        let mut start: Vec<f64> = grammar.weights().values().copied().collect();
        let mut end: Vec<f64> = current.weights().values().copied().collect();
        start.sort_by(f64::total_cmp);
        end.sort_by(f64::total_cmp);
        assert_eq!(start, end);
    }

    #[test]
    fn swap_needs_two_relations() {
        let grammar = grammar_of(&[("only", 0.3)]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            adjacent_swap_mutation(&grammar, &mut rng),
            Err(GrammarError::TooFewRelations { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn ties_are_rejected_at_construction() {
        let mut weights = BTreeMap::new();
        weights.insert("a".to_string(), 0.5);
        weights.insert("b".to_string(), 0.5);
        assert!(matches!(
            OrderingGrammar::new(weights),
            Err(GrammarError::TiedWeights { .. })
        ));
    }

    #[test]
    fn json_roundtrip_is_lexicographic() {
        let grammar = grammar_of(&[("obj", 0.3), ("nsubj", -0.8), ("root", 0.0)]);
        let json = grammar.to_json_string();
        assert_eq!(json, r#"{"nsubj":-0.8,"obj":0.3,"root":0.0}"#);
        let back = OrderingGrammar::from_json_str(&json).unwrap();
        assert_eq!(back, grammar);
    }

    #[test]
    fn pair_stats_agreement_matches_linearization_count() {
        // Cross-check the aggregated objective against a direct count over
        // linearized orders on a mixed corpus.
        let trees = vec![
            transitive_tree("dogs", "bite", "people"),
            tree_of(&[
                ("cats", "NOUN", 2, "nsubj"),
                ("sleep", "VERB", 0, "root"),
            ]),
            tree_of(&[
                ("kids", "NOUN", 3, "nsubj"),
                ("snacks", "NOUN", 3, "obj"),
                ("eat", "VERB", 0, "root"),
            ]),
        ];
        let corpus = corpus_of("mixed", trees);
        let stats = PairOrderStats::from_corpus(&corpus);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let grammar = random_grammar(&corpus.relation_inventory, &mut rng).unwrap();
            let mut agree = 0u64;
            let mut total = 0u64;
            for tree in &corpus.trees {
                let lin = linearize(tree, &grammar).unwrap();
                let children = tree.children_table();
                for head in 1..=tree.len() {
                    let mut group = vec![head];
                    group.extend(children[head].iter().copied());
                    for i in 0..group.len() {
                        for j in i + 1..group.len() {
                            let (a, b) = (group[i], group[j]);
                            total += 1;
                            let attested = a < b;
                            let linearized = lin.position(a) < lin.position(b);
                            if attested == linearized {
                                agree += 1;
                            }
                        }
                    }
                }
            }
            let direct = agree as f64 / total as f64;
            assert!((stats.agreement(&grammar) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn fit_recovers_sov_rank_order() {
        // Every sentence verb-final with S before O: the fitted grammar must
        // rank nsubj below obj, both negative. Exhaustive over rank orders on
        // two relations there are 8 sign/rank classes; only one is perfect.
        let trees: Vec<DepTree> = (0..6)
            .map(|i| {
                tree_of(&[
                    (&format!("s{i}"), "NOUN", 3, "nsubj"),
                    (&format!("o{i}"), "NOUN", 3, "obj"),
                    (&format!("v{i}"), "VERB", 0, "root"),
                ])
            })
            .collect();
        let corpus = corpus_of("sov", trees);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fitted = fit_grammar_to_corpus(&corpus, &mut rng, HillClimbBudget::default()).unwrap();
        let ws = fitted.weight("nsubj").unwrap();
        let wo = fitted.weight("obj").unwrap();
        assert!(ws < wo, "nsubj {ws} should rank below obj {wo}");
        assert!(wo < 0.0, "obj must be preverbal, got {wo}");
        let stats = PairOrderStats::from_corpus(&corpus);
        assert!((stats.agreement(&fitted) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_reproduces_strict_svo_exactly() {
        let trees: Vec<DepTree> = (0..5).map(|_| transitive_tree("s", "v", "o")).collect();
        let corpus = corpus_of("svo", trees);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let fitted = fit_grammar_to_corpus(&corpus, &mut rng, HillClimbBudget::default()).unwrap();
        let stats = PairOrderStats::from_corpus(&corpus);
        assert!((stats.agreement(&fitted) - 1.0).abs() < 1e-12);
        assert!(fitted.weight("nsubj").unwrap() < 0.0);
        assert!(fitted.weight("obj").unwrap() >= 0.0);
    }

    #[test]
    fn fit_on_single_token_sentences_returns_some_grammar() {
        let trees: Vec<DepTree> = (0..3).map(|_| tree_of(&[("hi", "INTJ", 0, "root")])).collect();
        let corpus = corpus_of("degenerate", trees);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let fitted = fit_grammar_to_corpus(&corpus, &mut rng, HillClimbBudget::default()).unwrap();
        assert!(fitted.covers(&corpus.relation_inventory));
    }

    #[test]
    fn fitted_grammar_beats_random_grammars() {
        let trees: Vec<DepTree> = (0..4)
            .map(|i| {
                tree_of(&[
                    (&format!("s{i}"), "NOUN", 2, "nsubj"),
                    ("says", "VERB", 0, "root"),
                    (&format!("o{i}"), "NOUN", 2, "obj"),
                    ("today", "NOUN", 2, "obl"),
                ])
            })
            .collect();
        let corpus = corpus_of("svo-obl", trees);
        let stats = PairOrderStats::from_corpus(&corpus);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let fitted = fit_grammar_to_corpus(&corpus, &mut rng, HillClimbBudget::default()).unwrap();
        let fitted_score = stats.agreement(&fitted);
        for _ in 0..100 {
            let g = random_grammar(&corpus.relation_inventory, &mut rng).unwrap();
            assert!(stats.agreement(&g) <= fitted_score + 1e-12);
        }
    }

    #[test]
    fn greenberg_consistent_head_initial_profile() {
        let grammar = grammar_of(&[
            ("obj", 0.3),
            ("case", 0.1),
            ("cop", 0.2),
            ("aux", 0.4),
            ("nmod", 0.5),
            ("acl", 0.6),
            ("mark", 0.7),
            ("obl", 0.8),
            ("xcomp", 0.9),
        ]);
        let profile = greenberg_profile(&grammar, &default_greenberg_table());
        assert_eq!(profile.len(), 8);
        assert!(profile.iter().all(|p| p.indicator == Some(true)));
    }

    #[test]
    fn greenberg_sign_flip_zeroes_indicator() {
        let grammar = grammar_of(&[("obj", -0.3), ("case", 0.1)]);
        let profile = greenberg_profile(&grammar, &default_greenberg_table());
        let adposition = profile.iter().find(|p| p.relation == "case").unwrap();
        assert_eq!(adposition.indicator, Some(false));
    }

    #[test]
    fn greenberg_missing_relation_is_not_applicable() {
        let grammar = grammar_of(&[("obj", 0.3), ("case", 0.1)]);
        let profile = greenberg_profile(&grammar, &default_greenberg_table());
        let copula = profile.iter().find(|p| p.relation == "cop").unwrap();
        assert_eq!(copula.indicator, None);
    }

    #[test]
    fn dryer_table_flips_function_word_rows() {
        let grammar = grammar_of(&[("obj", 0.3), ("case", -0.1), ("nmod", 0.5)]);
        let profile = greenberg_profile(&grammar, &dryer_ud_table());
        assert_eq!(
            profile.iter().find(|p| p.relation == "case").unwrap().indicator,
            Some(true)
        );
        assert_eq!(
            profile.iter().find(|p| p.relation == "nmod").unwrap().indicator,
            Some(true)
        );
    }
}
