//! Finite evaluation tree for a space-bounded verifier talking to a private
//! prover with perfect completeness.
//!
//! A verifier is given as a small table of configurations. Nodes of the tree
//! stand for sets of configurations that share one communication history; the
//! prover picks its answer per node, the coins are universal. Values are
//! three-valued (`True`, `False`, `Loop(depth)`) and combine by the usual
//! tables, with a loop that comes back to its own node turning into `False`.
//!
//! Each read configuration of a node is followed in its own subtree, while
//! every configuration that reaches the communication cell is gathered into
//! one shared continuation node. Read loops are therefore judged per
//! configuration: a configuration stuck in a closed read cycle fails even when
//! another member of the node escapes. This is exact whenever no
//! communication configuration lies on a cycle
//! (see [`IpsVerifierSpec::communication_is_acyclic`]).

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IpsError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inconsistent verifier: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConfigClass {
    Read,
    Comm0,
    Comm1,
    Acc,
    Rej,
}

impl ConfigClass {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "read" => Self::Read,
            "comm0" => Self::Comm0,
            "comm1" => Self::Comm1,
            "acc" => Self::Acc,
            "rej" => Self::Rej,
            _ => return None,
        })
    }

    pub fn is_comm(self) -> bool {
        matches!(self, Self::Comm0 | Self::Comm1)
    }

    pub fn is_halting(self) -> bool {
        matches!(self, Self::Acc | Self::Rej)
    }
}

/// One configuration. Read configurations list one or two coin outcomes
/// (each taken with equal probability); communication configurations list
/// the successor for prover answer 0 and for answer 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpsConfig {
    pub name: String,
    pub class: ConfigClass,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IpsVerifierSpec {
    configs: Vec<IpsConfig>,
    initial: usize,
}

impl IpsVerifierSpec {
    pub fn new(configs: Vec<IpsConfig>, initial: usize) -> Result<Self, IpsError> {
        let bad = |m: String| Err(IpsError::Inconsistent(m));
        if initial >= configs.len() {
            return bad(format!("initial configuration {initial} out of range"));
        }
        let mut names = BTreeSet::new();
        for c in &configs {
            if !names.insert(c.name.as_str()) {
                return bad(format!("configuration `{}` defined twice", c.name));
            }
            let arity_ok = match c.class {
                ConfigClass::Read => (1..=2).contains(&c.children.len()),
                ConfigClass::Comm0 | ConfigClass::Comm1 => c.children.len() == 2,
                ConfigClass::Acc | ConfigClass::Rej => c.children.is_empty(),
            };
            if !arity_ok {
                return bad(format!("configuration `{}` has {} children", c.name, c.children.len()));
            }
            if let Some(&k) = c.children.iter().find(|&&k| k >= configs.len()) {
                return bad(format!("configuration `{}` points at index {k}", c.name));
            }
        }
        Ok(Self { configs, initial })
    }

    /// Text format, one configuration per line:
    ///
    /// ```text
    /// initial: s
    /// s read s c      # coin outcomes
    /// c comm0 a s     # successor on answer 0, on answer 1
    /// a acc
    /// ```
    pub fn parse(text: &str) -> Result<Self, IpsError> {
        let mut initial = None;
        let mut rows: Vec<(usize, &str, ConfigClass, Vec<&str>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| IpsError::Parse { line, message };
            if let Some(rest) = body.strip_prefix("initial:") {
                if initial.replace((line, rest.trim())).is_some() {
                    return Err(err("second `initial:` line".into()));
                }
                continue;
            }
            let mut words = body.split_whitespace();
            let name = words.next().unwrap_or_default();
            let class = words.next().ok_or_else(|| err(format!("`{name}` has no class")))?;
            let class = ConfigClass::parse(class).ok_or_else(|| err(format!("unknown class `{class}`")))?;
            rows.push((line, name, class, words.collect()));
        }
        let index = |line: usize, n: &str| {
            rows.iter().position(|r| r.1 == n).ok_or_else(|| IpsError::Parse {
                line,
                message: format!("unknown configuration `{n}`"),
            })
        };
        let mut configs = Vec::with_capacity(rows.len());
        for &(line, name, class, ref kids) in &rows {
            let children = kids.iter().map(|k| index(line, k)).collect::<Result<_, _>>()?;
            configs.push(IpsConfig {
                name: name.to_string(),
                class,
                children,
            });
        }
        let (line, init) = initial.ok_or(IpsError::Parse {
            line: 0,
            message: "missing `initial:` line".into(),
        })?;
        let initial = index(line, init)?;
        Self::new(configs, initial)
    }

    pub fn configs(&self) -> &[IpsConfig] {
        &self.configs
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn class(&self, i: usize) -> ConfigClass {
        self.configs[i].class
    }

    pub fn name(&self, i: usize) -> &str {
        &self.configs[i].name
    }

    /// No communication configuration can reach itself.
    pub fn communication_is_acyclic(&self) -> bool {
        (0..self.len()).filter(|&c| self.class(c).is_comm()).all(|c| {
            let mut seen = vec![false; self.len()];
            let mut stack = self.configs[c].children.clone();
            while let Some(x) = stack.pop() {
                if x == c {
                    return false;
                }
                if !std::mem::replace(&mut seen[x], true) {
                    stack.extend(&self.configs[x].children);
                }
            }
            true
        })
    }

    /// The string form accepted by [`IpsVerifierSpec::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("initial: {}\n", self.name(self.initial));
        for c in &self.configs {
            let class = match c.class {
                ConfigClass::Read => "read",
                ConfigClass::Comm0 => "comm0",
                ConfigClass::Comm1 => "comm1",
                ConfigClass::Acc => "acc",
                ConfigClass::Rej => "rej",
            };
            out.push_str(&c.name);
            out.push(' ');
            out.push_str(class);
            for &k in &c.children {
                out.push(' ');
                out.push_str(self.name(k));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    ReadComm,
    Comm01,
    Comm0,
    Comm1,
    /// The configurations after the prover answered the given bit.
    Answer(u8),
    Acc,
    Rej,
    /// A read step reached the communication cell; the configuration is
    /// carried on in the node's continuation.
    Exit,
    /// Back to a configuration (or configuration set) first seen at this depth.
    Loop(usize),
}

impl NodeKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::ReadComm => "READ-COMM",
            Self::Comm01 => "COMM-01",
            Self::Comm0 => "COMM-0",
            Self::Comm1 => "COMM-1",
            Self::Answer(0) => "ANSWER-0",
            Self::Answer(_) => "ANSWER-1",
            Self::Acc => "ACC",
            Self::Rej => "REJ",
            Self::Exit => "EXIT",
            Self::Loop(_) => "LOOP",
        }
    }

    pub fn is_leaf(self) -> bool {
        matches!(self, Self::Acc | Self::Rej | Self::Exit | Self::Loop(_))
    }

    /// Inner nodes whose children combine with ∧; the rest combine with ∨.
    pub fn is_conjunctive(self) -> bool {
        matches!(self, Self::ReadComm | Self::Comm01 | Self::Answer(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    pub kind: NodeKind,
    /// Configuration indices, sorted.
    pub configs: Vec<usize>,
    pub depth: usize,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf(kind: NodeKind, configs: Vec<usize>, depth: usize) -> Self {
        Self {
            kind,
            configs,
            depth,
            children: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(TreeNode::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        self.children.iter().map(|c| c.height() + 1).max().unwrap_or(0)
    }

    /// Indented listing, one node per line.
    pub fn render(&self, spec: &IpsVerifierSpec) -> String {
        let mut out = String::new();
        self.render_into(spec, &mut out);
        out
    }

    fn render_into(&self, spec: &IpsVerifierSpec, out: &mut String) {
        out.push_str(&describe(self, spec));
        out.push('\n');
        for c in &self.children {
            c.render_into(spec, out);
        }
    }
}

fn describe(node: &TreeNode, spec: &IpsVerifierSpec) -> String {
    let names: Vec<&str> = node.configs.iter().map(|&i| spec.name(i)).collect();
    let mut s = format!(
        "{}{} {{{}}} d={}",
        "  ".repeat(node.depth),
        node.kind.label(),
        names.join(","),
        node.depth
    );
    if let NodeKind::Loop(d) = node.kind {
        s.push_str(&format!(" -> {d}"));
    }
    s
}

/// Depth cap `2^|C|`.
pub fn default_depth_cap(spec: &IpsVerifierSpec) -> usize {
    1usize.checked_shl(spec.len() as u32).unwrap_or(usize::MAX)
}

pub fn build_tree(spec: &IpsVerifierSpec) -> TreeNode {
    build_tree_with_cap(spec, default_depth_cap(spec))
}

/// Like [`build_tree`] with a caller-chosen depth cap. Only the default cap
/// carries the correctness guarantee.
pub fn build_tree_with_cap(spec: &IpsVerifierSpec, cap: usize) -> TreeNode {
    let b = Builder { spec, cap };
    let init = spec.initial();
    match spec.class(init) {
        ConfigClass::Acc => TreeNode::leaf(NodeKind::Acc, vec![init], 0),
        ConfigClass::Rej => TreeNode::leaf(NodeKind::Rej, vec![init], 0),
        _ => b.history(BTreeSet::from([init]), 0, &mut Vec::new()),
    }
}

struct Builder<'a> {
    spec: &'a IpsVerifierSpec,
    cap: usize,
}

impl Builder<'_> {
    /// A node for a set of nonhalting configurations sharing one history.
    /// `ancestors` holds the history nodes above it.
    fn history(&self, set: BTreeSet<usize>, depth: usize, ancestors: &mut Vec<(BTreeSet<usize>, usize)>) -> TreeNode {
        let configs: Vec<usize> = set.iter().copied().collect();
        if let Some(&(_, d)) = ancestors.iter().find(|(s, _)| *s == set) {
            return TreeNode::leaf(NodeKind::Loop(d), configs, depth);
        }
        if depth > self.cap {
            return TreeNode::leaf(NodeKind::Loop(depth - 1), configs, depth);
        }
        let spec = self.spec;
        let reads: Vec<usize> = configs
            .iter()
            .copied()
            .filter(|&c| spec.class(c) == ConfigClass::Read)
            .collect();
        let comm = |class| {
            configs
                .iter()
                .copied()
                .filter(|&c| spec.class(c) == class)
                .collect::<BTreeSet<_>>()
        };
        let (zeros, ones) = (comm(ConfigClass::Comm0), comm(ConfigClass::Comm1));

        ancestors.push((set.clone(), depth));
        let (kind, children) = if !reads.is_empty() {
            let mut children = Vec::new();
            if let [r] = reads[..] {
                if configs.len() == 1 {
                    children = self.read_children(r, depth, &mut vec![(r, depth)]);
                } else {
                    children.push(self.lineage(r, depth + 1, &mut Vec::new()));
                }
            } else {
                for &r in &reads {
                    children.push(self.lineage(r, depth + 1, &mut Vec::new()));
                }
            }
            let mut cont: BTreeSet<usize> = zeros.union(&ones).copied().collect();
            cont.extend(self.read_exits(&reads));
            if !cont.is_empty() {
                children.push(self.history(cont, depth + 1, ancestors));
            }
            (NodeKind::ReadComm, children)
        } else if !zeros.is_empty() && !ones.is_empty() {
            let children = vec![
                self.history(zeros, depth + 1, ancestors),
                self.history(ones, depth + 1, ancestors),
            ];
            (NodeKind::Comm01, children)
        } else {
            let kind = if zeros.is_empty() {
                NodeKind::Comm1
            } else {
                NodeKind::Comm0
            };
            let children = (0..2u8).map(|a| self.answer(&set, a, depth + 1, ancestors)).collect();
            (kind, children)
        };
        ancestors.pop();
        TreeNode {
            kind,
            configs,
            depth,
            children,
        }
    }

    fn answer(
        &self,
        waiting: &BTreeSet<usize>,
        bit: u8,
        depth: usize,
        ancestors: &mut Vec<(BTreeSet<usize>, usize)>,
    ) -> TreeNode {
        let next: BTreeSet<usize> = waiting
            .iter()
            .map(|&c| self.spec.configs[c].children[bit as usize])
            .collect();
        let mut children = Vec::new();
        let mut rest = BTreeSet::new();
        for &x in &next {
            match self.spec.class(x) {
                ConfigClass::Acc => children.push(TreeNode::leaf(NodeKind::Acc, vec![x], depth + 1)),
                ConfigClass::Rej => children.push(TreeNode::leaf(NodeKind::Rej, vec![x], depth + 1)),
                _ if waiting.contains(&x) => {
                    children.push(TreeNode::leaf(NodeKind::Loop(depth - 1), vec![x], depth + 1))
                }
                _ => {
                    rest.insert(x);
                }
            }
        }
        if !rest.is_empty() {
            children.push(self.history(rest, depth + 1, ancestors));
        }
        TreeNode {
            kind: NodeKind::Answer(bit),
            configs: next.into_iter().collect(),
            depth,
            children,
        }
    }

    /// The read evolution of one configuration on its own.
    fn lineage(&self, x: usize, depth: usize, chain: &mut Vec<(usize, usize)>) -> TreeNode {
        chain.push((x, depth));
        let children = self.read_children(x, depth, chain);
        chain.pop();
        TreeNode {
            kind: NodeKind::ReadComm,
            configs: vec![x],
            depth,
            children,
        }
    }

    fn read_children(&self, x: usize, depth: usize, chain: &mut Vec<(usize, usize)>) -> Vec<TreeNode> {
        let d = depth + 1;
        self.spec.configs[x]
            .children
            .iter()
            .map(|&y| match self.spec.class(y) {
                ConfigClass::Acc => TreeNode::leaf(NodeKind::Acc, vec![y], d),
                ConfigClass::Rej => TreeNode::leaf(NodeKind::Rej, vec![y], d),
                ConfigClass::Comm0 | ConfigClass::Comm1 => TreeNode::leaf(NodeKind::Exit, vec![y], d),
                ConfigClass::Read => match chain.iter().find(|&&(c, _)| c == y) {
                    Some(&(_, at)) => TreeNode::leaf(NodeKind::Loop(at), vec![y], d),
                    None if d > self.cap => TreeNode::leaf(NodeKind::Loop(depth), vec![y], d),
                    None => self.lineage(y, d, chain),
                },
            })
            .collect()
    }

    /// Communication configurations reachable from `reads` by read steps.
    fn read_exits(&self, reads: &[usize]) -> BTreeSet<usize> {
        let mut seen: BTreeSet<usize> = reads.iter().copied().collect();
        let mut stack = reads.to_vec();
        let mut exits = BTreeSet::new();
        while let Some(x) = stack.pop() {
            for &y in &self.spec.configs[x].children {
                match self.spec.class(y) {
                    ConfigClass::Read if seen.insert(y) => stack.push(y),
                    c if c.is_comm() => {
                        exits.insert(y);
                    }
                    _ => {}
                }
            }
        }
        exits
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TreeValue {
    True,
    False,
    Loop(usize),
}

impl fmt::Display for TreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::True => f.write_str("true"),
            Self::False => f.write_str("false"),
            Self::Loop(d) => write!(f, "loop[{d}]"),
        }
    }
}

/// False beats everything, true beats loop.
pub fn and_combine(a: TreeValue, b: TreeValue) -> TreeValue {
    use TreeValue::*;
    match (a, b) {
        (False, _) | (_, False) => False,
        (True, _) | (_, True) => True,
        (Loop(x), Loop(y)) => Loop(x.min(y)),
    }
}

/// True beats everything, loop beats false.
pub fn or_combine(a: TreeValue, b: TreeValue) -> TreeValue {
    use TreeValue::*;
    match (a, b) {
        (True, _) | (_, True) => True,
        (Loop(x), Loop(y)) => Loop(x.min(y)),
        (Loop(x), False) | (False, Loop(x)) => Loop(x),
        (False, False) => False,
    }
}

pub fn evaluate(root: &TreeNode) -> TreeValue {
    eval(root, &mut |_, _| {})
}

/// Evaluates and lists every node with its value, children before parents.
pub fn evaluate_traced(root: &TreeNode, spec: &IpsVerifierSpec) -> (TreeValue, Vec<String>) {
    let mut lines = Vec::new();
    let v = eval(root, &mut |n, v| lines.push(format!("{} = {v}", describe(n, spec))));
    (v, lines)
}

fn eval(node: &TreeNode, seen: &mut dyn FnMut(&TreeNode, TreeValue)) -> TreeValue {
    let v = match node.kind {
        NodeKind::Acc | NodeKind::Exit => TreeValue::True,
        NodeKind::Rej => TreeValue::False,
        NodeKind::Loop(d) => TreeValue::Loop(d),
        kind => {
            let op = if kind.is_conjunctive() { and_combine } else { or_combine };
            let vals: Vec<TreeValue> = node.children.iter().map(|c| eval(c, seen)).collect();
            // v1 op (v2 op (... op vn))
            let folded = vals.iter().rev().copied().reduce(|acc, v| op(v, acc));
            match folded.unwrap_or(TreeValue::True) {
                TreeValue::Loop(d) if d == node.depth => TreeValue::False,
                v => v,
            }
        }
    };
    seen(node, v);
    v
}

/// Builds the tree and reports whether its root is true.
pub fn accepts(spec: &IpsVerifierSpec) -> bool {
    evaluate(&build_tree(spec)) == TreeValue::True
}
