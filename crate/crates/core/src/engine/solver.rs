//! A compact CDCL solver: two watched literals, VSIDS, first-UIP learning
//! with local minimization, Luby restarts, phase saving and assumptions.
//!
//! The solver is `Clone` so that one prepared base formula can be copied into
//! many short-lived sessions.

use std::time::Instant;

/// Internal literal: `var << 1 | negated`, variables 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct SLit(u32);

impl SLit {
    pub(crate) fn new(var: usize, negated: bool) -> SLit {
        SLit(((var as u32) << 1) | negated as u32)
    }

    pub(crate) fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub(crate) fn negated(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for SLit {
    type Output = SLit;
    fn not(self) -> SLit {
        SLit(self.0 ^ 1)
    }
}

const TRUE: u8 = 1;
const FALSE: u8 = 0;
const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;

#[inline]
fn lit_value(assigns: &[u8], l: SLit) -> u8 {
    let a = assigns[l.var()];
    if a == UNDEF {
        UNDEF
    } else {
        a ^ (l.negated() as u8)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, Copy)]
struct Watch {
    cref: u32,
    blocker: SLit,
}

#[derive(Debug, Clone)]
struct ClauseData {
    start: u32,
    len: u32,
    learnt: bool,
    deleted: bool,
    activity: f32,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
}

/// Binary max-heap of variables keyed by activity.
#[derive(Debug, Clone, Default)]
struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn grow(&mut self) {
        self.pos.push(NOT_IN_HEAP);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len() as u32;
        self.heap.push(v as u32);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()? as usize;
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if act[p as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = p;
            self.pos[p as usize] = i as u32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

/// Luby sequence (1, 1, 2, 1, 1, 2, 4, ...), 0-indexed.
fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

const RESTART_UNIT: u64 = 100;
const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f32 = 0.999;

#[derive(Debug, Clone)]
pub(crate) struct Solver {
    clauses: Vec<ClauseData>,
    /// Literals of every clause, back to back.
    arena: Vec<SLit>,
    garbage: usize,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watch>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<SLit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f32,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    max_learnts: f64,
    scratch: Vec<SLit>,
    pub(crate) stats: Stats,
}

impl Solver {
    pub(crate) fn new(num_vars: usize) -> Solver {
        let mut s = Solver {
            clauses: Vec::new(),
            arena: Vec::new(),
            garbage: 0,
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            max_learnts: 0.0,
            scratch: Vec::new(),
            stats: Stats::default(),
        };
        for _ in 0..num_vars {
            s.new_var();
        }
        s
    }

    pub(crate) fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub(crate) fn new_var(&mut self) -> usize {
        let v = self.assigns.len();
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(NO_REASON);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow();
        self.heap.insert(v, &self.activity);
        v
    }

    /// Raises the initial branching priority of `v`.
    pub(crate) fn boost(&mut self, v: usize, amount: f64) {
        self.activity[v] += amount;
        self.heap.increased(v, &self.activity);
    }

    #[cfg(test)]
    pub(crate) fn is_ok(&self) -> bool {
        self.ok
    }

    pub(crate) fn set_unsat(&mut self) {
        self.ok = false;
    }

    pub(crate) fn model(&self) -> &[bool] {
        &self.model
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn value(&self, l: SLit) -> u8 {
        lit_value(&self.assigns, l)
    }

    /// Adds a permanent clause, first undoing any assignment kept from the
    /// last model. Returns false once the clause database is known
    /// unsatisfiable.
    pub(crate) fn add_clause(&mut self, lits: &[SLit]) -> bool {
        self.cancel_until(0);
        if !self.ok {
            return false;
        }
        let mut c: Vec<SLit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return true;
        }
        let mut kept = Vec::with_capacity(c.len());
        for &l in &c {
            match self.value(l) {
                TRUE => return true,
                FALSE => {}
                _ => kept.push(l),
            }
        }
        match kept.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(kept[0], NO_REASON);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.attach_new(&kept, false);
                true
            }
        }
    }

    /// Adds a clause that excludes the current model, which must be false
    /// under the kept assignment. Instead of starting over, backtracks just far
    /// enough for the clause to become unit (or unassigned in two places), so
    /// the next solve resumes from the shared prefix.
    pub(crate) fn add_blocking_clause(&mut self, lits: &[SLit]) -> bool {
        if !self.ok {
            return false;
        }
        if self.decision_level() == 0 || lits.iter().any(|&l| self.value(l) != FALSE) {
            return self.add_clause(lits);
        }
        let mut c = std::mem::take(&mut self.scratch);
        c.clear();
        c.extend(lits.iter().copied().filter(|l| self.level[l.var()] > 0));
        c.sort_unstable_by_key(|l| std::cmp::Reverse(self.level[l.var()]));
        let ok = match c.len() {
            0 => {
                self.cancel_until(0);
                self.ok = false;
                false
            }
            1 => {
                self.cancel_until(0);
                self.enqueue(c[0], NO_REASON);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                let (l0, l1) = (self.level[c[0].var()], self.level[c[1].var()]);
                if l0 > l1 {
                    self.cancel_until(l1 as usize);
                    let first = c[0];
                    let cref = self.attach_new(&c, false);
                    self.enqueue(first, cref);
                } else {
                    self.cancel_until(l0 as usize - 1);
                    self.attach_new(&c, false);
                }
                true
            }
        };
        self.scratch = c;
        ok
    }

    /// Pre-sizes buffers that grow during a session; a fresh clone has no
    /// spare capacity.
    pub(crate) fn reserve(&mut self, clauses: usize, lits: usize) {
        let n = self.num_vars();
        self.trail.reserve(n.saturating_sub(self.trail.len()));
        self.trail_lim
            .reserve(n.saturating_sub(self.trail_lim.len()));
        self.model.reserve(n);
        self.clauses.reserve(clauses);
        self.arena.reserve(lits);
    }

    fn lits(&self, cref: u32) -> &[SLit] {
        let c = &self.clauses[cref as usize];
        &self.arena[c.start as usize..(c.start + c.len) as usize]
    }

    fn attach_new(&mut self, lits: &[SLit], learnt: bool) -> u32 {
        let cref = self.clauses.len() as u32;
        self.watches[lits[0].idx()].push(Watch {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1].idx()].push(Watch {
            cref,
            blocker: lits[0],
        });
        let start = self.arena.len() as u32;
        self.arena.extend_from_slice(lits);
        self.clauses.push(ClauseData {
            start,
            len: lits.len() as u32,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, l: SLit, reason: u32) {
        let v = l.var();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = (!l.negated()) as u8;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation. Watches are indexed by the literal whose falsification
    /// triggers a visit.
    fn propagate(&mut self) -> Option<u32> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut i = 0;
            let mut j = 0;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let cd = &self.clauses[cref as usize];
                let lits = &mut self.arena[cd.start as usize..(cd.start + cd.len) as usize];
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let kept = Watch {
                    cref,
                    blocker: first,
                };
                if first != w.blocker && lit_value(&self.assigns, first) == TRUE {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..lits.len() {
                    if lit_value(&self.assigns, lits[k]) != FALSE {
                        lits.swap(1, k);
                        let nw = lits[1];
                        self.watches[nw.idx()].push(kept);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = kept;
                j += 1;
                if lit_value(&self.assigns, first) == FALSE {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: u32) -> (Vec<SLit>, usize) {
        let mut learnt: Vec<SLit> = vec![SLit(0)];
        let mut path = 0usize;
        let mut p: Option<SLit> = None;
        let mut index = self.trail.len();
        let current = self.decision_level() as u32;
        loop {
            self.bump_clause(confl);
            let start = usize::from(p.is_some());
            let len = self.clauses[confl as usize].len as usize;
            for k in start..len {
                let q = self.lits(confl)[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var()] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            confl = self.reason[lit.var()];
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = !p.unwrap();

        // Drop literals implied by the rest of the clause through their reason.
        let original = learnt.clone();
        let mut keep = 1;
        for k in 1..learnt.len() {
            let q = learnt[k];
            let r = self.reason[q.var()];
            let redundant = r != NO_REASON
                && self
                    .lits(r)
                    .iter()
                    .skip(1)
                    .all(|l| self.seen[l.var()] || self.level[l.var()] == 0);
            if !redundant {
                learnt[keep] = q;
                keep += 1;
            }
        }
        learnt.truncate(keep);
        for l in &original {
            self.seen[l.var()] = false;
        }

        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var()] > self.level[learnt[max_i].var()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()] as usize;
        }
        (learnt, bt)
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.assigns[v] = UNDEF;
            self.reason[v] = NO_REASON;
            self.phase[v] = !l.negated();
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<SLit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(SLit::new(v, !self.phase[v]));
            }
        }
        None
    }

    fn locked(&self, cref: u32) -> bool {
        let l0 = self.lits(cref)[0];
        self.reason[l0.var()] == cref && self.value(l0) == TRUE
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .total_cmp(&self.clauses[b as usize].activity)
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (i, &cref) in learnts.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.len > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                self.garbage += c.len as usize;
                c.len = 0;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        for w in &mut self.watches {
            w.retain(|_| false);
        }
        if self.garbage * 2 > self.arena.len() {
            let mut arena = Vec::with_capacity(self.arena.len() - self.garbage);
            for c in &mut self.clauses {
                let old = c.start as usize..(c.start + c.len) as usize;
                c.start = arena.len() as u32;
                arena.extend_from_slice(&self.arena[old]);
            }
            self.arena = arena;
            self.garbage = 0;
        }
        for (cref, c) in self.clauses.iter().enumerate() {
            if c.deleted {
                continue;
            }
            let (a, b) = (
                self.arena[c.start as usize],
                self.arena[c.start as usize + 1],
            );
            self.watches[a.idx()].push(Watch {
                cref: cref as u32,
                blocker: b,
            });
            self.watches[b.idx()].push(Watch {
                cref: cref as u32,
                blocker: a,
            });
        }
    }

    /// Solves under `assumptions`. `Unsat` under non-empty assumptions only
    /// refutes the assumptions; the clause database stays usable.
    pub(crate) fn solve(&mut self, assumptions: &[SLit], deadline: Option<Instant>) -> Status {
        self.model.clear();
        if !assumptions.is_empty() {
            self.cancel_until(0);
        }
        if !self.ok {
            return Status::Unsat;
        }
        if Self::expired(deadline) {
            return Status::Timeout;
        }
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        }
        let mut restarts = 0;
        loop {
            let budget = luby(restarts) * RESTART_UNIT;
            match self.search(budget, assumptions, deadline) {
                // The satisfying trail is kept for add_blocking_clause.
                Some(Status::Sat) => return Status::Sat,
                Some(status) => {
                    self.cancel_until(0);
                    return status;
                }
                None => restarts += 1,
            }
        }
    }

    fn expired(deadline: Option<Instant>) -> bool {
        deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn search(
        &mut self,
        budget: u64,
        assumptions: &[SLit],
        deadline: Option<Instant>,
    ) -> Option<Status> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(Status::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let first = learnt[0];
                    let cref = self.attach_new(&learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
                if conflicts.is_multiple_of(64) && Self::expired(deadline) {
                    return Some(Status::Timeout);
                }
            } else {
                if conflicts >= budget {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let a = assumptions[self.decision_level()];
                    match self.value(a) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => return Some(Status::Unsat),
                        _ => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next {
                    Some(a) => a,
                    None => {
                        self.stats.decisions += 1;
                        if self.stats.decisions.is_multiple_of(1024) && Self::expired(deadline) {
                            return Some(Status::Timeout);
                        }
                        match self.pick_branch() {
                            Some(l) => l,
                            None => {
                                self.model.extend(self.assigns.iter().map(|&a| a == TRUE));
                                return Some(Status::Sat);
                            }
                        }
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, NO_REASON);
            }
        }
    }
}
