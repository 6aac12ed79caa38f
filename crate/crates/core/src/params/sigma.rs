//! Words over `Σ = {a} ∪ {s_k : k ∈ ℕ ∪ {∞}}` and the parameters `p_w`, `p_L`.
//!
//! `p_ε` is 0 on the empty graph and ∞ otherwise; `p_{wa}(G)` is the better
//! of `p_w(G)` and `1 + p_w(G - u)`; `p_{w s_k}(G)` is the better of `p_w(G)`
//! and the worst side of a (<k)-clique-sum, recursively in `p_{w s_k}`.
//!
//! Text syntax: letters `a`, `s1`, `s2`, ..., `sinf`; juxtaposition for
//! concatenation, `|`, postfix `*`, parentheses, `eps` for the empty word and
//! `none` for the empty language.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{split_separators, ParamValue};
use crate::bits::BitGraph;
use crate::canon::{key_of, Key};
use crate::decomp::K_INF;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::limits;

/// Default vertex cap for [`p_word`] and [`p_regex`].
pub const WORD_MAX_N: usize = 10;

/// A letter of Σ. `S(K_INF)` is `s_∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Letter {
    A,
    S(usize),
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::A => write!(f, "a"),
            Letter::S(K_INF) => write!(f, "sinf"),
            Letter::S(k) => write!(f, "s{k}"),
        }
    }
}

impl From<Letter> for String {
    fn from(l: Letter) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for Letter {
    type Error = Error;

    fn try_from(s: String) -> Result<Letter> {
        match parse_word(&s)?.as_slice() {
            [l] => Ok(*l),
            _ => Err(Error::parse(format!("`{s}` is not a single letter"))),
        }
    }
}

pub type SigmaWord = Vec<Letter>;

/// The quasi-order on letters: `a ≼ a`, `s_i ≼ s_j` iff `i ≤ j`.
pub fn letter_leq(x: Letter, y: Letter) -> bool {
    match (x, y) {
        (Letter::A, Letter::A) => true,
        (Letter::S(i), Letter::S(j)) => i <= j,
        _ => false,
    }
}

/// Higman's order: `u` embeds into `w` letter by letter, in order. Leftmost
/// greedy matching is exact for subsequence embeddings.
pub fn higman_leq(u: &[Letter], w: &[Letter]) -> bool {
    let mut rest = w.iter();
    u.iter().all(|&x| rest.any(|&y| letter_leq(x, y)))
}

pub fn format_word(w: &[Letter]) -> String {
    w.iter().map(Letter::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Letter(Letter),
    Eps,
    None,
    Open,
    Close,
    Bar,
    Star,
}

fn letter_index(digits: &str) -> Result<usize> {
    if digits.is_empty() {
        return Err(Error::parse("`s` must be followed by a number or `inf`"));
    }
    let k: usize = digits.parse().map_err(|_| Error::parse(format!("bad index `{digits}`")))?;
    if k == 0 {
        return Err(Error::parse("s0 is not a letter"));
    }
    Ok(k)
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let rest: String = chars[i..].iter().collect();
        i += 1;
        match c {
            _ if c.is_whitespace() => {}
            '(' => out.push(Token::Open),
            ')' => out.push(Token::Close),
            '|' => out.push(Token::Bar),
            '*' => out.push(Token::Star),
            'a' => out.push(Token::Letter(Letter::A)),
            'e' if rest.starts_with("eps") => {
                out.push(Token::Eps);
                i += 2;
            }
            'n' if rest.starts_with("none") => {
                out.push(Token::None);
                i += 3;
            }
            's' if rest.starts_with("s_") => {
                // `s_2` and `s_inf` read as `s2` and `sinf`
                i += 1;
                if rest.starts_with("s_inf") {
                    out.push(Token::Letter(Letter::S(K_INF)));
                    i += 3;
                    continue;
                }
                let digits: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                i += digits.len();
                out.push(Token::Letter(Letter::S(letter_index(&digits)?)));
            }
            's' if rest.starts_with("sinf") => {
                out.push(Token::Letter(Letter::S(K_INF)));
                i += 3;
            }
            's' => {
                let digits: String = chars[i..].iter().take_while(|c| c.is_ascii_digit()).collect();
                i += digits.len();
                out.push(Token::Letter(Letter::S(letter_index(&digits)?)));
            }
            _ => return Err(Error::parse(format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// Parses a word: letters only, whitespace optional.
pub fn parse_word(text: &str) -> Result<SigmaWord> {
    tokenize(text)?
        .into_iter()
        .map(|t| match t {
            Token::Letter(l) => Ok(l),
            other => Err(Error::parse(format!("{other:?} is not a letter"))),
        })
        .collect()
}

/// Regular expressions over Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SigmaRegex {
    Empty,
    Epsilon,
    Letter(Letter),
    Concat(Vec<SigmaRegex>),
    Alt(Vec<SigmaRegex>),
    Star(Box<SigmaRegex>),
}

impl FromStr for SigmaRegex {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let re = p.alt()?;
        if p.pos != p.tokens.len() {
            return Err(Error::parse(format!("unexpected {:?}", p.tokens[p.pos])));
        }
        Ok(re)
    }
}

impl fmt::Display for SigmaRegex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigmaRegex::Empty => write!(f, "none"),
            SigmaRegex::Epsilon => write!(f, "eps"),
            SigmaRegex::Letter(l) => write!(f, "{l}"),
            SigmaRegex::Concat(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join(" "))
            }
            SigmaRegex::Alt(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join("|"))
            }
            SigmaRegex::Star(x) => write!(f, "({x})*"),
        }
    }
}

impl SigmaRegex {
    pub fn word(w: &[Letter]) -> Self {
        SigmaRegex::Concat(w.iter().map(|&l| SigmaRegex::Letter(l)).collect())
    }

    /// Whether the language contains `w`.
    pub fn matches(&self, w: &[Letter]) -> bool {
        let aut = Automaton::new(self);
        let mut cur: BTreeSet<usize> = BTreeSet::from([aut.start]);
        for &x in w {
            cur = cur
                .iter()
                .flat_map(|&p| aut.out[p].iter().filter(|(l, _)| *l == x).map(|&(_, q)| q))
                .collect();
        }
        cur.iter().any(|&q| aut.accepting[q])
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn alt(&mut self) -> Result<SigmaRegex> {
        let mut parts = vec![self.concat()?];
        while self.peek() == Some(&Token::Bar) {
            self.pos += 1;
            parts.push(self.concat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one part") } else { SigmaRegex::Alt(parts) })
    }

    fn concat(&mut self) -> Result<SigmaRegex> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some(Token::Letter(_) | Token::Open | Token::Eps | Token::None)) {
            parts.push(self.repeat()?);
        }
        Ok(match parts.len() {
            0 => SigmaRegex::Epsilon,
            1 => parts.pop().expect("one part"),
            _ => SigmaRegex::Concat(parts),
        })
    }

    fn repeat(&mut self) -> Result<SigmaRegex> {
        let mut x = self.atom()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            x = SigmaRegex::Star(Box::new(x));
        }
        Ok(x)
    }

    fn atom(&mut self) -> Result<SigmaRegex> {
        let t = self.peek().cloned();
        self.pos += 1;
        match t {
            Some(Token::Letter(l)) => Ok(SigmaRegex::Letter(l)),
            Some(Token::Eps) => Ok(SigmaRegex::Epsilon),
            Some(Token::None) => Ok(SigmaRegex::Empty),
            Some(Token::Open) => {
                let x = self.alt()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(Error::parse("missing `)`"));
                }
                self.pos += 1;
                Ok(x)
            }
            other => Err(Error::parse(format!("unexpected {other:?}"))),
        }
    }
}

/// Epsilon-free automaton, trimmed to states reachable from the start.
struct Automaton {
    start: usize,
    accepting: Vec<bool>,
    out: Vec<Vec<(Letter, usize)>>,
}

struct Thompson {
    eps: Vec<Vec<usize>>,
    letters: Vec<Vec<(Letter, usize)>>,
}

impl Thompson {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.letters.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, re: &SigmaRegex) -> (usize, usize) {
        let s = self.state();
        let e = self.state();
        match re {
            SigmaRegex::Empty => {}
            SigmaRegex::Epsilon => self.eps[s].push(e),
            SigmaRegex::Letter(l) => self.letters[s].push((*l, e)),
            SigmaRegex::Concat(xs) => {
                let mut cur = s;
                for x in xs {
                    let (a, b) = self.build(x);
                    self.eps[cur].push(a);
                    cur = b;
                }
                self.eps[cur].push(e);
            }
            SigmaRegex::Alt(xs) => {
                for x in xs {
                    let (a, b) = self.build(x);
                    self.eps[s].push(a);
                    self.eps[b].push(e);
                }
            }
            SigmaRegex::Star(x) => {
                let (a, b) = self.build(x);
                self.eps[s].push(a);
                self.eps[s].push(e);
                self.eps[b].push(a);
                self.eps[b].push(e);
            }
        }
        (s, e)
    }

    fn closure(&self, p: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([p]);
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            for &y in &self.eps[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }
}

impl Automaton {
    fn new(re: &SigmaRegex) -> Self {
        let mut t = Thompson { eps: Vec::new(), letters: Vec::new() };
        let (s, e) = t.build(re);
        let closures: Vec<BTreeSet<usize>> = (0..t.eps.len()).map(|p| t.closure(p)).collect();
        // keep the start and every state entered by a letter
        let mut index = HashMap::from([(s, 0)]);
        let mut order = vec![s];
        let mut i = 0;
        let mut out: Vec<Vec<(Letter, usize)>> = Vec::new();
        while i < order.len() {
            let p = order[i];
            let mut edges = BTreeSet::new();
            for &c in &closures[p] {
                for &(l, q) in &t.letters[c] {
                    let next = order.len();
                    let id = *index.entry(q).or_insert_with(|| {
                        order.push(q);
                        next
                    });
                    edges.insert((l, id));
                }
            }
            out.push(edges.into_iter().collect());
            i += 1;
        }
        let accepting = order.iter().map(|&p| closures[p].contains(&e)).collect();
        Automaton { start: 0, accepting, out }
    }

    fn states(&self) -> usize {
        self.out.len()
    }
}

fn check_size(g: &Graph, what: &'static str) -> Result<BitGraph> {
    limits::check(what, g.n(), WORD_MAX_N)?;
    BitGraph::from_graph(g)
}

/// `p_w(g)` by the defining recursion, processed from the end of `w`.
pub fn p_word(g: &Graph, w: &[Letter]) -> Result<ParamValue> {
    let b = check_size(g, "p_word")?;
    let mut e = WordEval { w, memo: HashMap::new() };
    Ok(e.f(&b, w.len()))
}

struct WordEval<'a> {
    w: &'a [Letter],
    memo: HashMap<(Key, usize), ParamValue>,
}

impl WordEval<'_> {
    fn f(&mut self, g: &BitGraph, j: usize) -> ParamValue {
        if g.n() == 0 {
            return ParamValue::Finite(0);
        }
        if j == 0 {
            return ParamValue::Infinite;
        }
        let key = (key_of(g), j);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let mut best = self.f(g, j - 1);
        match self.w[j - 1] {
            Letter::A => {
                for i in 0..g.n() {
                    best = best.min(self.f(&g.remove(i), j - 1).plus_one());
                }
            }
            Letter::S(k) => {
                for s in split_separators(g, k) {
                    let mut worst = ParamValue::Finite(0);
                    for c in g.components_in(g.all() & !s) {
                        worst = worst.max(self.f(&g.piece(s, c), j));
                        if worst >= best {
                            break;
                        }
                    }
                    best = best.min(worst);
                }
            }
        }
        self.memo.insert(key, best);
        best
    }
}

/// `p_L(g)`, the least `p_w(g)` over words `w` of the language.
///
/// Evaluated on the automaton of the expression with one value per state.
/// A letter `s_k` entering a state is handled by a split value that either
/// stops splitting (falling back to the value at the source state) or cuts
/// again along a (<k)-clique-sum. Each piece of a split may follow its own
/// path through the automaton, so the result is exact whenever the words
/// reaching a state are directed under `≼*` (any two are dominated by a
/// third), which holds for words, for starred alphabets and for all
/// expressions built from those by concatenation. In general it is a lower
/// bound on `min_w p_w(g)`.
pub fn p_regex(g: &Graph, re: &SigmaRegex) -> Result<ParamValue> {
    let b = check_size(g, "p_regex")?;
    let aut = Automaton::new(re);
    let n = aut.states();
    // co-reachability: states from which an accepting state can be reached
    let mut useful: Vec<bool> = aut.accepting.clone();
    loop {
        let mut changed = false;
        for p in 0..n {
            if !useful[p] && aut.out[p].iter().any(|&(_, q)| useful[q]) {
                useful[p] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if !useful[aut.start] {
        return Ok(ParamValue::Infinite);
    }
    let mut pre: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut into: Vec<Vec<(usize, Letter)>> = vec![Vec::new(); n];
    for p in 0..n {
        for &(l, q) in &aut.out[p] {
            into[q].push((p, l));
        }
    }
    for (q, pre_q) in pre.iter_mut().enumerate() {
        let mut seen = BTreeSet::from([q]);
        let mut stack = vec![q];
        while let Some(x) = stack.pop() {
            for &(p, _) in &into[x] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        *pre_q = seen.into_iter().collect();
    }
    let mut e = RegexEval { pre, into, value: HashMap::new(), direct: HashMap::new(), split: HashMap::new() };
    let mut best = ParamValue::Infinite;
    for q in (0..n).filter(|&q| aut.accepting[q]) {
        best = best.min(e.value(&b, q));
    }
    Ok(best)
}

struct RegexEval {
    pre: Vec<Vec<usize>>,
    into: Vec<Vec<(usize, Letter)>>,
    value: HashMap<(Key, usize), ParamValue>,
    direct: HashMap<(Key, usize), ParamValue>,
    split: HashMap<(Key, usize, usize), ParamValue>,
}

impl RegexEval {
    /// Least value over words reaching `q`.
    fn value(&mut self, g: &BitGraph, q: usize) -> ParamValue {
        if g.n() == 0 {
            return ParamValue::Finite(0);
        }
        let key = key_of(g);
        if let Some(&v) = self.value.get(&(key.clone(), q)) {
            return v;
        }
        let mut best = ParamValue::Infinite;
        for p in self.pre[q].clone() {
            best = best.min(self.direct(g, &key, p));
        }
        self.value.insert((key, q), best);
        best
    }

    /// Least value over words whose last letter enters `p`.
    fn direct(&mut self, g: &BitGraph, key: &Key, p: usize) -> ParamValue {
        if let Some(&v) = self.direct.get(&(key.clone(), p)) {
            return v;
        }
        let mut best = ParamValue::Infinite;
        for (r, l) in self.into[p].clone() {
            match l {
                Letter::A => {
                    for i in 0..g.n() {
                        best = best.min(self.value(&g.remove(i), r).plus_one());
                    }
                }
                Letter::S(k) => best = best.min(self.cut(g, r, k, best)),
            }
        }
        self.direct.insert((key.clone(), p), best);
        best
    }

    /// Best proper (<k)-clique-sum split, each piece valued by `split_value`.
    fn cut(&mut self, g: &BitGraph, r: usize, k: usize, bound: ParamValue) -> ParamValue {
        let mut best = bound;
        for s in split_separators(g, k) {
            let mut worst = ParamValue::Finite(0);
            for c in g.components_in(g.all() & !s) {
                worst = worst.max(self.split_value(&g.piece(s, c), r, k));
                if worst >= best {
                    break;
                }
            }
            best = best.min(worst);
        }
        best
    }

    fn split_value(&mut self, h: &BitGraph, r: usize, k: usize) -> ParamValue {
        if h.n() == 0 {
            return ParamValue::Finite(0);
        }
        let key = (key_of(h), r, k);
        if let Some(&v) = self.split.get(&key) {
            return v;
        }
        let stop = self.value(h, r);
        let v = self.cut(h, r, k, stop);
        self.split.insert(key, v);
        v
    }
}
