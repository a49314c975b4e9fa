//! Brute force over prover strategies. A strategy maps the messages seen so
//! far (question bits and its own answers) plus the current question to an
//! answer; each one induces a finite absorbing Markov chain on
//! (configuration, history), solved exactly.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ips_tree::{ConfigClass, IpsConfig, IpsVerifierSpec};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type History = Vec<(u8, u8)>;
type State = (usize, History);

fn bit(class: ConfigClass) -> u8 {
    u8::from(class == ConfigClass::Comm1)
}

/// Every (history, question) at which some strategy has to answer.
pub fn decision_points(spec: &IpsVerifierSpec) -> Vec<(History, u8)> {
    let mut points = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(spec.initial(), History::new())]);
    while let Some(state) = queue.pop_front() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let (c, h) = state;
        let conf = &spec.configs()[c];
        match conf.class {
            ConfigClass::Read => queue.extend(conf.children.iter().map(|&k| (k, h.clone()))),
            class if class.is_comm() => {
                let b = bit(class);
                points.insert((h.clone(), b));
                for a in 0..2u8 {
                    let mut h2 = h.clone();
                    h2.push((b, a));
                    queue.push_back((conf.children[a as usize], h2));
                }
            }
            _ => {}
        }
    }
    points.into_iter().collect()
}

fn successors(
    spec: &IpsVerifierSpec,
    state: &State,
    answer: &BTreeMap<(History, u8), u8>,
) -> Vec<(State, BigRational)> {
    let (c, h) = state;
    let conf = &spec.configs()[*c];
    match conf.class {
        ConfigClass::Read => {
            let p = BigRational::new(1.into(), (conf.children.len() as i64).into());
            conf.children.iter().map(|&k| ((k, h.clone()), p.clone())).collect()
        }
        ConfigClass::Acc | ConfigClass::Rej => Vec::new(),
        class => {
            let b = bit(class);
            let a = answer[&(h.clone(), b)];
            let mut h2 = h.clone();
            h2.push((b, a));
            vec![((conf.children[a as usize], h2), BigRational::one())]
        }
    }
}

fn acceptance_probability(spec: &IpsVerifierSpec, answer: &BTreeMap<(History, u8), u8>) -> BigRational {
    // Reachable chain.
    let start: State = (spec.initial(), Vec::new());
    let mut index = BTreeMap::new();
    let mut states = Vec::new();
    let mut edges: Vec<Vec<(usize, BigRational)>> = Vec::new();
    let mut queue = VecDeque::from([start.clone()]);
    index.insert(start.clone(), 0);
    states.push(start);
    while let Some(s) = queue.pop_front() {
        let i = index[&s];
        let mut out = Vec::new();
        for (t, p) in successors(spec, &s, answer) {
            let j = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t.clone());
                queue.push_back(t.clone());
                states.len() - 1
            });
            out.push((j, p));
        }
        if edges.len() <= i {
            edges.resize(i + 1, Vec::new());
        }
        edges[i] = out;
    }
    edges.resize(states.len(), Vec::new());
    let n = states.len();
    let is_acc = |i: usize| spec.class(states[i].0) == ConfigClass::Acc;

    // States with a path to acceptance; the rest accept with probability 0.
    let mut good = vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if !good[i] && (is_acc(i) || edges[i].iter().any(|&(j, _)| good[j])) {
                good[i] = true;
                changed = true;
            }
        }
    }
    if !good[0] {
        return BigRational::zero();
    }
    let unknown: Vec<usize> = (0..n).filter(|&i| good[i] && !is_acc(i)).collect();
    if unknown.is_empty() {
        return BigRational::one();
    }
    let pos: BTreeMap<usize, usize> = unknown.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let m = unknown.len();
    // x_i - Σ p_ij x_j = Σ_{j accepting} p_ij
    let mut a = vec![vec![BigRational::zero(); m + 1]; m];
    for (k, &i) in unknown.iter().enumerate() {
        a[k][k] += BigRational::one();
        for (j, p) in &edges[i] {
            if is_acc(*j) {
                a[k][m] += p;
            } else if let Some(&l) = pos.get(j) {
                a[k][l] -= p;
            }
        }
    }
    for col in 0..m {
        let piv = (col..m)
            .find(|&r| !a[r][col].is_zero())
            .expect("transient system is nonsingular");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= p * &f;
                }
            }
        }
    }
    a[pos[&0]][m].clone()
}

/// Best acceptance probability over all deterministic strategies.
pub fn best_strategy(spec: &IpsVerifierSpec) -> BigRational {
    let points = decision_points(spec);
    assert!(points.len() <= 16, "too many decision points");
    let mut best = BigRational::zero();
    for mask in 0u32..(1 << points.len()) {
        let answer = points
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), ((mask >> k) & 1) as u8))
            .collect();
        let p = acceptance_probability(spec, &answer);
        if p > best {
            best = p;
        }
    }
    best
}

pub fn random_spec(rng: &mut ChaCha8Rng) -> IpsVerifierSpec {
    let n = rng.gen_range(2..=6);
    let configs = (0..n)
        .map(|i| {
            let class = match rng.gen_range(0..100) {
                _ if i == 0 && rng.gen_bool(0.5) => ConfigClass::Read,
                0..=39 => ConfigClass::Read,
                40..=54 => ConfigClass::Comm0,
                55..=69 => ConfigClass::Comm1,
                70..=84 => ConfigClass::Acc,
                _ => ConfigClass::Rej,
            };
            let arity = match class {
                ConfigClass::Read => rng.gen_range(1..=2),
                ConfigClass::Comm0 | ConfigClass::Comm1 => 2,
                _ => 0,
            };
            let children = (0..arity).map(|_| rng.gen_range(0..n)).collect();
            IpsConfig {
                name: format!("c{i}"),
                class,
                children,
            }
        })
        .collect();
    IpsVerifierSpec::new(configs, 0).unwrap()
}
