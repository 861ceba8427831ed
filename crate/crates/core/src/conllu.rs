//! CoNLL-U treebank ingestion.
//!
//! Parses the 10-column tab-separated format into rooted dependency trees,
//! validates each sentence (single root, acyclic, contiguous indices), and
//! provides the deterministic train/held-out split used for mutual-information
//! estimation. Invalid sentences are dropped with a counted diagnostic instead
//! of failing the whole file; real treebanks contain occasional annotation
//! errors and batch ingestion has to survive them.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("no valid sentences in corpus {0:?}")]
    EmptyCorpus(String),
    #[error("cannot split an empty corpus")]
    SplitEmptyCorpus,
}

/// One syntactic word. Multiword-token ranges and empty nodes are skipped at
/// parse time, so `index` runs 1..=n over the surface tokens of the sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position within the sentence.
    pub index: usize,
    /// Surface form.
    pub form: String,
    /// Universal POS tag.
    pub upos: String,
    /// Index of the governing token; 0 means this token is the root.
    pub head: usize,
    /// Dependency relation label, universal part only (subtype after ":" stripped).
    pub deprel: String,
}

/// A validated dependency tree: exactly one root, acyclic, connected,
/// token indices contiguous from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepTree {
    pub tokens: Vec<Token>,
    pub sentence_id: String,
}

impl DepTree {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Index of the root token (1-based).
    pub fn root(&self) -> usize {
        self.tokens
            .iter()
            .find(|t| t.head == 0)
            .map(|t| t.index)
            .expect("validated tree has a root")
    }

    /// Children lists keyed by head index; entry 0 holds the root.
    /// Children appear in surface (index) order.
    pub fn children_table(&self) -> Vec<Vec<usize>> {
        let mut table = vec![Vec::new(); self.tokens.len() + 1];
        for tok in &self.tokens {
            table[tok.head].push(tok.index);
        }
        table
    }

    /// True if some pair of arcs crosses in the attested order.
    pub fn is_nonprojective(&self) -> bool {
        let arcs: Vec<(usize, usize)> = self
            .tokens
            .iter()
            .filter(|t| t.head != 0)
            .map(|t| (t.index.min(t.head), t.index.max(t.head)))
            .collect();
        for (i, &(a, b)) in arcs.iter().enumerate() {
            for &(c, d) in &arcs[i + 1..] {
                if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                    return true;
                }
            }
        }
        false
    }
}

/// A named collection of validated trees plus the set of relation labels
/// observed across them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub name: String,
    pub trees: Vec<DepTree>,
    pub relation_inventory: BTreeSet<String>,
}

impl Corpus {
    /// Builds a corpus, recomputing the relation inventory from the trees.
    /// Empty tree lists are permitted here (a degenerate split can produce an
    /// empty train side); parsing rejects them at the boundary instead.
    pub fn from_trees(name: impl Into<String>, trees: Vec<DepTree>) -> Self {
        let relation_inventory = trees
            .iter()
            .flat_map(|t| t.tokens.iter().map(|tok| tok.deprel.clone()))
            .collect();
        Corpus {
            name: name.into(),
            trees,
            relation_inventory,
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.trees.iter().map(|t| t.len()).sum()
    }
}

/// Per-line or per-sentence ingestion problem, emitted as one JSON object per
/// line in diagnostics files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub line: u64,
    pub code: String,
    pub message: String,
}

pub mod diag_code {
    pub const BAD_COLUMNS: &str = "bad-columns";
    pub const BAD_ID: &str = "bad-id";
    pub const BAD_HEAD: &str = "bad-head";
    pub const MISSING_DEPREL: &str = "missing-deprel";
    pub const DROPPED_SENTENCE: &str = "dropped-sentence";
    pub const EMPTY_TRAIN: &str = "empty-train";
}

/// Parse result: the surviving sentences plus everything that was skipped.
#[derive(Debug, Clone)]
pub struct ParsedCorpus {
    pub corpus: Corpus,
    pub diagnostics: Vec<Diagnostic>,
    /// Number of sentences dropped by tree validation.
    pub dropped_sentences: usize,
}

/// Strips the subtype from a relation label: "nsubj:pass" -> "nsubj".
/// The grammar weight space is defined over the universal relations only.
pub fn strip_subtype(deprel: &str) -> &str {
    match deprel.split_once(':') {
        Some((universal, _)) => universal,
        None => deprel,
    }
}

struct PendingToken {
    index: usize,
    form: String,
    upos: String,
    head: usize,
    deprel: String,
}

/// Parses CoNLL-U text into a corpus.
///
/// Comment lines start with '#'; blank lines separate sentences; CRLF input is
/// tolerated. Multiword-token ranges ("n-m" IDs) and empty nodes ("n.m" IDs)
/// are skipped. Lines with a malformed column count, ID, head, or relation are
/// skipped with a per-line diagnostic; sentences that then fail tree
/// validation are dropped with a counted diagnostic.
pub fn parse_conllu(text: &str, name: &str) -> Result<ParsedCorpus, ConlluError> {
    let mut trees = Vec::new();
    let mut diagnostics = Vec::new();
    let mut dropped = 0usize;

    let mut pending: Vec<PendingToken> = Vec::new();
    let mut pending_id: Option<String> = None;
    let mut sentence_start_line = 0u64;
    let mut saw_token_line = false;

    let mut flush = |pending: &mut Vec<PendingToken>,
                     pending_id: &mut Option<String>,
                     saw_token_line: &mut bool,
                     start_line: u64,
                     trees: &mut Vec<DepTree>,
                     diagnostics: &mut Vec<Diagnostic>,
                     dropped: &mut usize| {
        if *saw_token_line {
            let fallback_id = format!("s{}", trees.len() + *dropped + 1);
            let sentence_id = pending_id.take().unwrap_or(fallback_id);
            match validate_sentence(std::mem::take(pending), sentence_id) {
                Ok(tree) => trees.push(tree),
                Err(reason) => {
                    *dropped += 1;
                    diagnostics.push(Diagnostic {
                        file: name.to_string(),
                        line: start_line,
                        code: diag_code::DROPPED_SENTENCE.to_string(),
                        message: reason,
                    });
                }
            }
        }
        pending.clear();
        *pending_id = None;
        *saw_token_line = false;
    };

    for (lineno0, raw_line) in text.lines().enumerate() {
        let lineno = lineno0 as u64 + 1;
        let line = raw_line.trim_end_matches('\r');
        if line.is_empty() {
            flush(
                &mut pending,
                &mut pending_id,
                &mut saw_token_line,
                sentence_start_line,
                &mut trees,
                &mut diagnostics,
                &mut dropped,
            );
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    pending_id = Some(value.trim().to_string());
                }
            }
            continue;
        }

        if !saw_token_line && pending.is_empty() {
            sentence_start_line = lineno;
        }
        saw_token_line = true;

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            diagnostics.push(Diagnostic {
                file: name.to_string(),
                line: lineno,
                code: diag_code::BAD_COLUMNS.to_string(),
                message: format!("expected 10 tab-separated columns, found {}", cols.len()),
            });
            continue;
        }
        let id = cols[0];
        if id.contains('-') || id.contains('.') {
            // Multiword-token range or empty node: not a syntactic word.
            continue;
        }
        let index: usize = match id.parse() {
            Ok(i) if i >= 1 => i,
            _ => {
                diagnostics.push(Diagnostic {
                    file: name.to_string(),
                    line: lineno,
                    code: diag_code::BAD_ID.to_string(),
                    message: format!("unparseable token id {id:?}"),
                });
                continue;
            }
        };
        let head: usize = match cols[6].parse() {
            Ok(h) => h,
            Err(_) => {
                diagnostics.push(Diagnostic {
                    file: name.to_string(),
                    line: lineno,
                    code: diag_code::BAD_HEAD.to_string(),
                    message: format!("unparseable head {:?}", cols[6]),
                });
                continue;
            }
        };
        let deprel = strip_subtype(cols[7]);
        if deprel.is_empty() || deprel == "_" {
            diagnostics.push(Diagnostic {
                file: name.to_string(),
                line: lineno,
                code: diag_code::MISSING_DEPREL.to_string(),
                message: "missing dependency relation".to_string(),
            });
            continue;
        }
        pending.push(PendingToken {
            index,
            form: cols[1].to_string(),
            upos: cols[3].to_string(),
            head,
            deprel: deprel.to_string(),
        });
    }
    flush(
        &mut pending,
        &mut pending_id,
        &mut saw_token_line,
        sentence_start_line,
        &mut trees,
        &mut diagnostics,
        &mut dropped,
    );

    if trees.is_empty() {
        return Err(ConlluError::EmptyCorpus(name.to_string()));
    }
    Ok(ParsedCorpus {
        corpus: Corpus::from_trees(name, trees),
        diagnostics,
        dropped_sentences: dropped,
    })
}

fn validate_sentence(pending: Vec<PendingToken>, sentence_id: String) -> Result<DepTree, String> {
    let n = pending.len();
    if n == 0 {
        return Err("no valid token lines".to_string());
    }
    for (pos, tok) in pending.iter().enumerate() {
        if tok.index != pos + 1 {
            return Err(format!(
                "token indices not contiguous: expected {} found {}",
                pos + 1,
                tok.index
            ));
        }
    }
    let mut root_count = 0usize;
    for tok in &pending {
        if tok.head == 0 {
            root_count += 1;
        } else if tok.head > n {
            return Err(format!("head {} out of range (n={})", tok.head, n));
        } else if tok.head == tok.index {
            return Err(format!("token {} is its own head", tok.index));
        }
    }
    if root_count != 1 {
        return Err(format!("expected exactly one root, found {root_count}"));
    }
    // Every token must reach the root without revisiting a node.
    for start in 1..=n {
        let mut seen = vec![false; n + 1];
        let mut cur = start;
        loop {
            if seen[cur] {
                return Err(format!("head cycle involving token {start}"));
            }
            seen[cur] = true;
            let h = pending[cur - 1].head;
            if h == 0 {
                break;
            }
            cur = h;
        }
    }
    let tokens = pending
        .into_iter()
        .map(|p| Token {
            index: p.index,
            form: p.form,
            upos: p.upos,
            head: p.head,
            deprel: p.deprel,
        })
        .collect();
    Ok(DepTree {
        tokens,
        sentence_id,
    })
}

/// Serializes the kept sentences back to CoNLL-U. Fields this toolkit does not
/// model (lemma, feats, deps, misc) are written as '_'.
pub fn to_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    for tree in &corpus.trees {
        out.push_str(&format!("# sent_id = {}\n", tree.sentence_id));
        for tok in &tree.tokens {
            out.push_str(&format!(
                "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\t_\n",
                tok.index, tok.form, tok.upos, tok.head, tok.deprel
            ));
        }
        out.push('\n');
    }
    out
}

/// Optional sentence/token filters. Both default to off: the metrics are
/// defined over the full representation, and silently dropping tokens would
/// change dependency lengths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusFilters {
    /// Remove PUNCT-tagged tokens (dependents of a removed token are
    /// reattached to its head).
    #[serde(default)]
    pub drop_punct: bool,
    /// Drop sentences whose attested order has crossing arcs.
    #[serde(default)]
    pub drop_nonprojective: bool,
}

/// Applies [`CorpusFilters`]; sentences emptied or broken by filtering are
/// dropped with a diagnostic.
pub fn filter_corpus(
    corpus: &Corpus,
    filters: CorpusFilters,
    diagnostics: &mut Vec<Diagnostic>,
) -> Corpus {
    if filters == CorpusFilters::default() {
        return corpus.clone();
    }
    let mut kept = Vec::new();
    for tree in &corpus.trees {
        if filters.drop_nonprojective && tree.is_nonprojective() {
            diagnostics.push(Diagnostic {
                file: corpus.name.clone(),
                line: 0,
                code: diag_code::DROPPED_SENTENCE.to_string(),
                message: format!("{}: non-projective", tree.sentence_id),
            });
            continue;
        }
        let tree = if filters.drop_punct {
            match remove_punct(tree) {
                Some(t) => t,
                None => {
                    diagnostics.push(Diagnostic {
                        file: corpus.name.clone(),
                        line: 0,
                        code: diag_code::DROPPED_SENTENCE.to_string(),
                        message: format!("{}: empty or rootless after punctuation removal", tree.sentence_id),
                    });
                    continue;
                }
            }
        } else {
            tree.clone()
        };
        kept.push(tree);
    }
    Corpus::from_trees(corpus.name.clone(), kept)
}

/// Removes PUNCT tokens, reattaching their dependents to the removed token's
/// head and reindexing the remainder. Returns None when the root itself is
/// punctuation or nothing is left.
fn remove_punct(tree: &DepTree) -> Option<DepTree> {
    let is_punct: Vec<bool> = tree.tokens.iter().map(|t| t.upos == "PUNCT").collect();
    if is_punct.iter().all(|&p| p) {
        return None;
    }
    // Resolve each token's head upward past punctuation.
    let resolved_head = |mut h: usize| -> Option<usize> {
        while h != 0 && is_punct[h - 1] {
            h = tree.tokens[h - 1].head;
        }
        Some(h)
    };
    let root = tree.root();
    if is_punct[root - 1] {
        return None;
    }
    let mut new_index = vec![0usize; tree.len() + 1];
    let mut next = 0usize;
    for tok in &tree.tokens {
        if !is_punct[tok.index - 1] {
            next += 1;
            new_index[tok.index] = next;
        }
    }
    let tokens = tree
        .tokens
        .iter()
        .filter(|t| !is_punct[t.index - 1])
        .map(|t| {
            let head = resolved_head(t.head)?;
            Some(Token {
                index: new_index[t.index],
                form: t.form.clone(),
                upos: t.upos.clone(),
                head: if head == 0 { 0 } else { new_index[head] },
                deprel: t.deprel.clone(),
            })
        })
        .collect::<Option<Vec<_>>>()?;
    Some(DepTree {
        tokens,
        sentence_id: tree.sentence_id.clone(),
    })
}

/// Held-out size rule: the greater of 100 sentences and 5% of all sentences,
/// capped at the corpus size.
pub fn heldout_size(total: usize) -> usize {
    let five_percent = (total as f64 * 0.05).ceil() as usize;
    total.min(five_percent.max(100))
}

/// Splits a corpus into train and held-out parts, sampling the held-out
/// sentences uniformly without replacement. Deterministic for a fixed seed.
/// The train side may come out empty for corpora at or below the held-out
/// minimum; callers surface that as a diagnostic.
pub fn split_corpus(corpus: &Corpus, seed: u64) -> Result<(Corpus, Corpus), ConlluError> {
    if corpus.is_empty() {
        return Err(ConlluError::SplitEmptyCorpus);
    }
    let (train_idx, heldout_idx) = split_indices(corpus.len(), seed);
    let pick = |idx: &[usize]| {
        Corpus::from_trees(
            corpus.name.clone(),
            idx.iter().map(|&i| corpus.trees[i].clone()).collect(),
        )
    };
    Ok((pick(&train_idx), pick(&heldout_idx)))
}

/// Index form of [`split_corpus`]: (train indices, held-out indices), both in
/// ascending corpus order.
pub fn split_indices(total: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let k = heldout_size(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut heldout: Vec<usize> = rand::seq::index::sample(&mut rng, total, k).into_vec();
    heldout.sort_unstable();
    let mut in_heldout = vec![false; total];
    for &i in &heldout {
        in_heldout[i] = true;
    }
    let train: Vec<usize> = (0..total).filter(|&i| !in_heldout[i]).collect();
    (train, heldout)
}
