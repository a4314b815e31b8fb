//! Reduced ordered binary decision diagrams.
//!
//! A [`Manager`] owns a shared, hash-consed node graph over a fixed set of
//! variables. Functions are handed out as [`BoolFunc`] handles; because every
//! node is unique for its `(level, lo, hi)` triple, two handles from the same
//! manager are equal exactly when the functions they denote are pointwise
//! equal. Every algebraic identity in this crate is checked by comparing
//! handles.
//!
//! The manager is `Sync`. Nodes live in an append-only store and the unique
//! table is a concurrent hash map, so any number of threads may build
//! functions at the same time. Handles never change meaning once created.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::OnceLock;

use dashmap::DashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default bound on the number of points [`Manager::enumerate_on_set`] may
/// produce.
pub const DEFAULT_ENUM_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("variable x{} out of range (manager has {var_count} variables)", .var.0 + 1)]
    VarOutOfRange { var: VarId, var_count: usize },
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("function belongs to a different manager")]
    ManagerMismatch,
    #[error("variable order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("on-set has {count} points, enumeration cap is {cap}")]
    EnumerationCap { count: u128, cap: u64 },
}

/// 0-based variable index. DIMACS variable `k` is `VarId(k - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The 1-based DIMACS number of this variable.
    pub fn dimacs(self) -> i64 {
        i64::from(self.0) + 1
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

/// A point of the Boolean cube, one bit per variable in `VarId` order.
///
/// Points order lexicographically with `x1` most significant, which is also
/// the order of truth-table indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<bool>);

impl Point {
    pub fn new(bits: Vec<bool>) -> Self {
        Point(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Point(vec![false; n])
    }

    /// Parses a string of `0`/`1` characters, `x1` first.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Point)
    }

    /// The point whose lexicographic rank among all `2^n` points is `index`.
    pub fn from_index(n: usize, index: u64) -> Self {
        Point((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    pub fn index(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: VarId) -> bool {
        self.0[v.index()]
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.0[v.index()] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// DIMACS literals for this assignment: `k` when `x_k` is true, `-k`
    /// otherwise.
    pub fn dimacs_literals(&self) -> Vec<i64> {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
            .collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Handle to a function owned by a [`Manager`].
///
/// Handles are only meaningful together with the manager that issued them;
/// passing a handle to another manager panics (or returns
/// [`EngineError::ManagerMismatch`] from fallible operations).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoolFunc {
    mgr: u32,
    node: NodeId,
}

impl fmt::Debug for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            ZERO => write!(f, "BoolFunc(0)"),
            ONE => write!(f, "BoolFunc(1)"),
            n => write!(f, "BoolFunc(#{n})"),
        }
    }
}

type NodeId = u32;
type Level = u32;

const ZERO: NodeId = 0;
const ONE: NodeId = 1;
const TERMINAL_LEVEL: Level = Level::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    level: Level,
    lo: NodeId,
    hi: NodeId,
}

// Bucket b holds 2^(b + FIRST_BUCKET_BITS) slots, so 26 buckets address
// just under 2^32 nodes without ever moving a slot.
const FIRST_BUCKET_BITS: u32 = 6;
const BUCKETS: usize = 26;

struct NodeStore {
    buckets: [OnceLock<Box<[OnceLock<Node>]>>; BUCKETS],
    len: AtomicU32,
}

impl NodeStore {
    fn new() -> Self {
        NodeStore {
            buckets: std::array::from_fn(|_| OnceLock::new()),
            len: AtomicU32::new(0),
        }
    }

    fn locate(id: NodeId) -> (usize, usize) {
        let j = u64::from(id) + (1 << FIRST_BUCKET_BITS);
        let top = 63 - j.leading_zeros();
        let bucket = (top - FIRST_BUCKET_BITS) as usize;
        (bucket, (j - (1 << top)) as usize)
    }

    fn push(&self, node: Node) -> NodeId {
        let id = self.len.fetch_add(1, Ordering::Relaxed);
        assert!(id < NodeId::MAX - 1, "node store exhausted");
        let (b, off) = Self::locate(id);
        let bucket = self.buckets[b].get_or_init(|| {
            let size = 1usize << (b as u32 + FIRST_BUCKET_BITS);
            (0..size).map(|_| OnceLock::new()).collect()
        });
        bucket[off].set(node).expect("node slot written twice");
        id
    }

    fn get(&self, id: NodeId) -> Node {
        let (b, off) = Self::locate(id);
        *self.buckets[b]
            .get()
            .and_then(|bucket| bucket[off].get())
            .expect("dangling node id")
    }

    fn len(&self) -> usize {
        self.len.load(Ordering::Relaxed) as usize
    }
}

static NEXT_MANAGER_ID: AtomicU32 = AtomicU32::new(0);

/// Owner of a shared ROBDD over `var_count` variables.
pub struct Manager {
    id: u32,
    var_count: usize,
    // level -> variable, and its inverse
    var_at: Vec<VarId>,
    level_of: Vec<Level>,
    store: NodeStore,
    unique: DashMap<Node, NodeId>,
    ite_cache: DashMap<(NodeId, NodeId, NodeId), NodeId>,
}

impl fmt::Debug for Manager {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manager")
            .field("var_count", &self.var_count)
            .field("nodes", &self.store.len())
            .finish()
    }
}

impl Manager {
    /// A manager whose variable order is the index order `x1 < x2 < ...`.
    pub fn new(var_count: usize) -> Self {
        let order = (0..var_count as u32).map(VarId).collect();
        Self::with_order(order).expect("identity order is valid")
    }

    /// A manager testing variables in the given order (first entry at the
    /// root).
    pub fn with_order(order: Vec<VarId>) -> Result<Self, EngineError> {
        let n = order.len();
        let mut level_of = vec![Level::MAX; n];
        for (level, v) in order.iter().enumerate() {
            if v.index() >= n || level_of[v.index()] != Level::MAX {
                return Err(EngineError::BadOrder(n));
            }
            level_of[v.index()] = level as Level;
        }
        let store = NodeStore::new();
        let terminal = |v| Node {
            level: TERMINAL_LEVEL,
            lo: v,
            hi: v,
        };
        assert_eq!(store.push(terminal(ZERO)), ZERO);
        assert_eq!(store.push(terminal(ONE)), ONE);
        Ok(Manager {
            id: NEXT_MANAGER_ID.fetch_add(1, Ordering::Relaxed),
            var_count: n,
            var_at: order,
            level_of,
            store,
            unique: DashMap::new(),
            ite_cache: DashMap::new(),
        })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    /// Variables from root level downwards.
    pub fn order(&self) -> &[VarId] {
        &self.var_at
    }

    /// Total nodes allocated so far, terminals included.
    pub fn allocated_nodes(&self) -> usize {
        self.store.len()
    }

    /// Drops memoized `ite` results. Handles stay valid.
    pub fn clear_cache(&self) {
        self.ite_cache.clear();
    }

    fn wrap(&self, node: NodeId) -> BoolFunc {
        BoolFunc { mgr: self.id, node }
    }

    fn id_of(&self, f: BoolFunc) -> NodeId {
        assert_eq!(f.mgr, self.id, "BoolFunc used with a foreign Manager");
        f.node
    }

    fn try_id_of(&self, f: BoolFunc) -> Result<NodeId, EngineError> {
        if f.mgr == self.id {
            Ok(f.node)
        } else {
            Err(EngineError::ManagerMismatch)
        }
    }

    /// True when `f` was issued by this manager.
    pub fn owns(&self, f: BoolFunc) -> bool {
        f.mgr == self.id
    }

    fn check_var(&self, v: VarId) -> Result<(), EngineError> {
        if v.index() < self.var_count {
            Ok(())
        } else {
            Err(EngineError::VarOutOfRange {
                var: v,
                var_count: self.var_count,
            })
        }
    }

    pub fn constant(&self, value: bool) -> BoolFunc {
        self.wrap(if value { ONE } else { ZERO })
    }

    pub fn zero(&self) -> BoolFunc {
        self.constant(false)
    }

    pub fn one(&self) -> BoolFunc {
        self.constant(true)
    }

    /// The function `x_v`.
    pub fn var(&self, v: VarId) -> Result<BoolFunc, EngineError> {
        self.check_var(v)?;
        Ok(self.wrap(self.mk(self.level_of[v.index()], ZERO, ONE)))
    }

    /// `x_v` or `¬x_v`.
    pub fn literal(&self, v: VarId, negated: bool) -> Result<BoolFunc, EngineError> {
        self.check_var(v)?;
        let level = self.level_of[v.index()];
        Ok(self.wrap(if negated {
            self.mk(level, ONE, ZERO)
        } else {
            self.mk(level, ZERO, ONE)
        }))
    }

    /// The identity substitution `[x1, ..., xn]`.
    pub fn vars(&self) -> Vec<BoolFunc> {
        (0..self.var_count as u32)
            .map(|i| self.var(VarId(i)).expect("in range"))
            .collect()
    }

    pub fn is_zero(&self, f: BoolFunc) -> bool {
        self.id_of(f) == ZERO
    }

    pub fn is_one(&self, f: BoolFunc) -> bool {
        self.id_of(f) == ONE
    }

    fn mk(&self, level: Level, lo: NodeId, hi: NodeId) -> NodeId {
        if lo == hi {
            return lo;
        }
        let key = Node { level, lo, hi };
        if let Some(id) = self.unique.get(&key) {
            return *id;
        }
        *self
            .unique
            .entry(key)
            .or_insert_with(|| self.store.push(key))
    }

    fn level(&self, f: NodeId) -> Level {
        self.store.get(f).level
    }

    fn branches(&self, f: NodeId, level: Level) -> (NodeId, NodeId) {
        let n = self.store.get(f);
        if n.level == level {
            (n.lo, n.hi)
        } else {
            (f, f)
        }
    }

    fn ite_rec(&self, i: NodeId, t: NodeId, e: NodeId) -> NodeId {
        match (i, t, e) {
            (ONE, _, _) => return t,
            (ZERO, _, _) => return e,
            _ if t == e => return t,
            (_, ONE, ZERO) => return i,
            _ => {}
        }
        // ite(i, i, e) = ite(i, 1, e); ite(i, t, i) = ite(i, t, 0)
        let t = if t == i { ONE } else { t };
        let e = if e == i { ZERO } else { e };
        if t == e {
            return t;
        }
        let key = (i, t, e);
        if let Some(r) = self.ite_cache.get(&key) {
            return *r;
        }
        let top = self.level(i).min(self.level(t)).min(self.level(e));
        let (i0, i1) = self.branches(i, top);
        let (t0, t1) = self.branches(t, top);
        let (e0, e1) = self.branches(e, top);
        let lo = self.ite_rec(i0, t0, e0);
        let hi = self.ite_rec(i1, t1, e1);
        let r = self.mk(top, lo, hi);
        self.ite_cache.insert(key, r);
        r
    }

    /// If-then-else: `i·t + i′·e`.
    pub fn ite(&self, i: BoolFunc, t: BoolFunc, e: BoolFunc) -> BoolFunc {
        let (i, t, e) = (self.id_of(i), self.id_of(t), self.id_of(e));
        self.wrap(self.ite_rec(i, t, e))
    }

    pub fn and(&self, f: BoolFunc, g: BoolFunc) -> BoolFunc {
        self.ite(f, g, self.zero())
    }

    pub fn or(&self, f: BoolFunc, g: BoolFunc) -> BoolFunc {
        self.ite(f, self.one(), g)
    }

    pub fn not(&self, f: BoolFunc) -> BoolFunc {
        self.ite(f, self.zero(), self.one())
    }

    pub fn xor(&self, f: BoolFunc, g: BoolFunc) -> BoolFunc {
        let ng = self.not(g);
        self.ite(f, ng, g)
    }

    /// `f′ + g`.
    pub fn implies(&self, f: BoolFunc, g: BoolFunc) -> BoolFunc {
        self.ite(f, g, self.one())
    }

    pub fn and_all<I: IntoIterator<Item = BoolFunc>>(&self, fs: I) -> BoolFunc {
        fs.into_iter().fold(self.one(), |acc, f| self.and(acc, f))
    }

    pub fn or_all<I: IntoIterator<Item = BoolFunc>>(&self, fs: I) -> BoolFunc {
        fs.into_iter().fold(self.zero(), |acc, f| self.or(acc, f))
    }

    /// Pointwise `f ≤ g`, i.e. `f·g′ = 0`.
    pub fn leq(&self, f: BoolFunc, g: BoolFunc) -> bool {
        let ng = self.not(g);
        self.is_zero(self.and(f, ng))
    }

    /// Functional composition: the function `x ↦ f(subst[0](x), ..., subst[n-1](x))`.
    ///
    /// `subst` is indexed by `VarId`, not by level.
    pub fn compose(&self, f: BoolFunc, subst: &[BoolFunc]) -> Result<BoolFunc, EngineError> {
        if subst.len() != self.var_count {
            return Err(EngineError::LengthMismatch {
                expected: self.var_count,
                actual: subst.len(),
            });
        }
        let f = self.try_id_of(f)?;
        let subst = subst
            .iter()
            .map(|&s| self.try_id_of(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut memo = HashMap::new();
        Ok(self.wrap(self.compose_rec(f, &subst, &mut memo)))
    }

    fn compose_rec(
        &self,
        f: NodeId,
        subst: &[NodeId],
        memo: &mut HashMap<NodeId, NodeId>,
    ) -> NodeId {
        if f == ZERO || f == ONE {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let n = self.store.get(f);
        let lo = self.compose_rec(n.lo, subst, memo);
        let hi = self.compose_rec(n.hi, subst, memo);
        let var = self.var_at[n.level as usize];
        let r = self.ite_rec(subst[var.index()], hi, lo);
        memo.insert(f, r);
        r
    }

    pub fn eval(&self, f: BoolFunc, p: &Point) -> Result<bool, EngineError> {
        if p.len() != self.var_count {
            return Err(EngineError::LengthMismatch {
                expected: self.var_count,
                actual: p.len(),
            });
        }
        let mut cur = self.try_id_of(f)?;
        while cur != ZERO && cur != ONE {
            let n = self.store.get(cur);
            cur = if p.get(self.var_at[n.level as usize]) {
                n.hi
            } else {
                n.lo
            };
        }
        Ok(cur == ONE)
    }

    pub fn is_sat(&self, f: BoolFunc) -> bool {
        !self.is_zero(f)
    }

    /// The smallest point (under the variable order) where `f` is 1.
    pub fn any_on_point(&self, f: BoolFunc) -> Option<Point> {
        self.first_path_to(self.id_of(f), ONE)
    }

    /// The smallest point (under the variable order) where `f` is 0. For
    /// `f ≡ 0` this is the all-zero point; for `f ≡ 1` there is none.
    pub fn any_off_point(&self, f: BoolFunc) -> Option<Point> {
        self.first_path_to(self.id_of(f), ZERO)
    }

    // Leftmost path to `target`. Every non-terminal node reaches both
    // terminals, so preferring `lo` whenever it is not the opposite
    // terminal always succeeds.
    fn first_path_to(&self, mut cur: NodeId, target: NodeId) -> Option<Point> {
        let avoid = if target == ONE { ZERO } else { ONE };
        if cur == avoid {
            return None;
        }
        let mut p = Point::zeros(self.var_count);
        while cur != target {
            let n = self.store.get(cur);
            if n.lo != avoid {
                cur = n.lo;
            } else {
                p.set(self.var_at[n.level as usize], true);
                cur = n.hi;
            }
        }
        Some(p)
    }

    /// The variables `f` depends on.
    pub fn support(&self, f: BoolFunc) -> BTreeSet<VarId> {
        let mut seen = HashSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![self.id_of(f)];
        while let Some(cur) = stack.pop() {
            if cur == ZERO || cur == ONE || !seen.insert(cur) {
                continue;
            }
            let n = self.store.get(cur);
            out.insert(self.var_at[n.level as usize]);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        out
    }

    /// Number of internal nodes reachable from `f`.
    pub fn node_count(&self, f: BoolFunc) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self.id_of(f)];
        while let Some(cur) = stack.pop() {
            if cur == ZERO || cur == ONE || !seen.insert(cur) {
                continue;
            }
            let n = self.store.get(cur);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        seen.len()
    }

    /// Number of points where `f` is 1 (saturating at `u128::MAX`).
    pub fn sat_count(&self, f: BoolFunc) -> u128 {
        let n = self.var_count as u32;
        let mut memo = HashMap::new();
        let root = self.id_of(f);
        let c = self.count_rec(root, &mut memo);
        scale(c, self.level_or(root, n))
    }

    fn level_or(&self, f: NodeId, n: u32) -> u32 {
        if f == ZERO || f == ONE {
            n
        } else {
            self.level(f)
        }
    }

    // Models of `f` over the variables at or below its own level.
    fn count_rec(&self, f: NodeId, memo: &mut HashMap<NodeId, u128>) -> u128 {
        match f {
            ZERO => return 0,
            ONE => return 1,
            _ => {}
        }
        if let Some(&c) = memo.get(&f) {
            return c;
        }
        let n = self.var_count as u32;
        let node = self.store.get(f);
        let gap = |child| self.level_or(child, n) - node.level - 1;
        let lo = scale(self.count_rec(node.lo, memo), gap(node.lo));
        let hi = scale(self.count_rec(node.hi, memo), gap(node.hi));
        let c = lo.saturating_add(hi);
        memo.insert(f, c);
        c
    }

    /// Every point of the on-set, sorted lexicographically.
    pub fn enumerate_on_set(&self, f: BoolFunc, cap: u64) -> Result<Vec<Point>, EngineError> {
        let count = self.sat_count(f);
        if count > u128::from(cap) {
            return Err(EngineError::EnumerationCap { count, cap });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut cur = Point::zeros(self.var_count);
        self.enum_rec(self.id_of(f), 0, &mut cur, &mut out);
        out.sort();
        Ok(out)
    }

    fn enum_rec(&self, f: NodeId, level: usize, cur: &mut Point, out: &mut Vec<Point>) {
        if f == ZERO {
            return;
        }
        if level == self.var_count {
            debug_assert_eq!(f, ONE);
            out.push(cur.clone());
            return;
        }
        let var = self.var_at[level];
        let (lo, hi) = self.branches(f, level as Level);
        cur.set(var, false);
        self.enum_rec(lo, level + 1, cur, out);
        cur.set(var, true);
        self.enum_rec(hi, level + 1, cur, out);
        cur.set(var, false);
    }

    /// A sum-of-products rendering built from the disjoint paths to 1,
    /// e.g. `!x1 & x2 | x3`.
    pub fn to_formula(&self, f: BoolFunc) -> String {
        let root = self.id_of(f);
        match root {
            ZERO => return "0".into(),
            ONE => return "1".into(),
            _ => {}
        }
        let mut cubes = Vec::new();
        let mut path = Vec::new();
        self.cubes_rec(root, &mut path, &mut cubes);
        cubes.join(" | ")
    }

    fn cubes_rec(&self, f: NodeId, path: &mut Vec<String>, out: &mut Vec<String>) {
        match f {
            ZERO => {}
            ONE => out.push(if path.is_empty() {
                "1".into()
            } else {
                path.join(" & ")
            }),
            _ => {
                let n = self.store.get(f);
                let var = self.var_at[n.level as usize];
                path.push(format!("!{var}"));
                self.cubes_rec(n.lo, path, out);
                path.pop();
                path.push(var.to_string());
                self.cubes_rec(n.hi, path, out);
                path.pop();
            }
        }
    }
}

fn scale(count: u128, free_vars: u32) -> u128 {
    if count == 0 {
        0
    } else if free_vars >= 128 || count.leading_zeros() < free_vars {
        u128::MAX
    } else {
        count << free_vars
    }
}
