//! Backtracking search for colorings in which every constraint has a group
//! seeing enough distinct colors.
//!
//! Variables are split into families; each family has its own palette.
//! A constraint is a disjunction of groups, and a group is satisfied once
//! its variables carry at least `threshold` distinct colors. Propagation
//! works on the last open group of a constraint: when it can only reach its
//! threshold by using fresh colors everywhere, seen colors are removed from
//! the domains of its unassigned variables.
//!
//! Two symmetries are broken. Within a family, a branch may only use a
//! color already in use or the least unused one. Variable permutations
//! supplied by the caller (automorphisms of the ambient structure) prune
//! any partial coloring whose normalized form is beaten by the normalized
//! form of a permuted copy on their common determined prefix.

use std::ops::ControlFlow;

use crate::error::{Error, Result};

/// Largest palette a family may use.
pub const MAX_COLORS: usize = 64;

const UNASSIGNED: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub family: usize,
    pub vars: Vec<usize>,
    pub threshold: usize,
}

/// Variable selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Lowest unassigned index first; with value symmetry this yields the
    /// lexicographically least solution first.
    Static,
    /// Fewest admissible colors, then most unsatisfied constraints, then
    /// lowest index.
    MostConstrained,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub solutions: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchEnd {
    /// The whole tree was explored.
    Exhausted,
    /// The callback asked to stop.
    Stopped,
    /// The node budget ran out.
    LimitReached,
}

#[derive(Clone, Debug)]
pub struct Csp {
    var_family: Vec<usize>,
    family_colors: Vec<usize>,
    constraints: Vec<Vec<Group>>,
    var_constraints: Vec<Vec<usize>>,
    symmetries: Vec<Vec<usize>>,
    value_symmetry: bool,
    node_limit: u64,
}

impl Csp {
    /// `family_sizes[f]` variables with `family_colors[f]` colors each,
    /// numbered family by family.
    pub fn new(family_sizes: &[usize], family_colors: &[usize]) -> Result<Self> {
        if family_sizes.len() != family_colors.len() {
            return Err(Error::Precondition("one palette per family".into()));
        }
        let mut var_family = Vec::new();
        for (f, (&n, &r)) in family_sizes.iter().zip(family_colors).enumerate() {
            if r > MAX_COLORS {
                return Err(Error::LimitExceeded(format!("{r} colors (limit {MAX_COLORS})")));
            }
            if r == 0 && n > 0 {
                return Err(Error::Precondition("zero colors for a nonempty domain".into()));
            }
            var_family.extend(std::iter::repeat_n(f, n));
        }
        let n = var_family.len();
        Ok(Csp {
            var_family,
            family_colors: family_colors.to_vec(),
            constraints: Vec::new(),
            var_constraints: vec![Vec::new(); n],
            symmetries: Vec::new(),
            value_symmetry: true,
            node_limit: u64::MAX,
        })
    }

    pub fn var_count(&self) -> usize {
        self.var_family.len()
    }

    pub fn add_constraint(&mut self, groups: Vec<Group>) {
        let ci = self.constraints.len();
        let mut vars: Vec<usize> = groups.iter().flat_map(|g| g.vars.iter().copied()).collect();
        vars.sort_unstable();
        vars.dedup();
        for v in vars {
            self.var_constraints[v].push(ci);
        }
        self.constraints.push(groups);
    }

    /// Adds a permutation of the variables (mapping each family onto
    /// itself) that maps solutions to solutions.
    pub fn add_symmetry(&mut self, perm: Vec<usize>) {
        debug_assert_eq!(perm.len(), self.var_count());
        if perm.iter().enumerate().any(|(i, &p)| i != p) {
            self.symmetries.push(perm);
        }
    }

    /// Turns off both kinds of symmetry breaking, so every solution is
    /// visited.
    pub fn without_symmetry_breaking(mut self) -> Self {
        self.symmetries.clear();
        self.value_symmetry = false;
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit;
        self
    }

    /// Whether a full coloring satisfies every constraint.
    pub fn satisfies(&self, colors: &[usize]) -> bool {
        colors.len() == self.var_count()
            && self.constraints.iter().all(|groups| {
                groups.iter().any(|g| {
                    let mut seen = 0u64;
                    for &v in &g.vars {
                        seen |= 1 << colors[v];
                    }
                    seen.count_ones() as usize >= g.threshold
                })
            })
    }

    /// Explores the tree, calling `visit` on each solution found.
    pub fn search(&self, order: Order, mut visit: impl FnMut(&[usize]) -> ControlFlow<()>) -> (SearchEnd, SearchStats) {
        let mut st = State::new(self);
        let mut stats = SearchStats::default();
        // constraints with no possible group are violated up front
        let mut queue: Vec<usize> = Vec::new();
        let ok = (0..self.constraints.len()).all(|ci| st.check_constraint(self, ci, &mut queue))
            && st.propagate(self, &mut queue);
        if !ok {
            return (SearchEnd::Exhausted, stats);
        }
        let end = st.dfs(self, order, &mut stats, &mut visit);
        (end, stats)
    }

    /// The first solution in search order.
    pub fn first_solution(&self, order: Order) -> (Option<Vec<usize>>, SearchEnd, SearchStats) {
        let mut found = None;
        let (end, stats) = self.search(order, |s| {
            found = Some(s.to_vec());
            ControlFlow::Break(())
        });
        (found, end, stats)
    }
}

enum Undo {
    Assign(usize),
    Domain(usize, u64),
}

struct State {
    value: Vec<usize>,
    domain: Vec<u64>,
    used: Vec<Vec<u32>>,
    trail: Vec<Undo>,
}

enum Status {
    Satisfied,
    Dead,
    /// Index of the only group that can still be satisfied, if it is tight.
    Open(Option<usize>),
}

impl State {
    fn new(csp: &Csp) -> Self {
        let domain = csp
            .var_family
            .iter()
            .map(|&f| full_mask(csp.family_colors[f]))
            .collect();
        State {
            value: vec![UNASSIGNED; csp.var_count()],
            domain,
            used: csp.family_colors.iter().map(|&r| vec![0; r]).collect(),
            trail: Vec::new(),
        }
    }

    fn assign(&mut self, csp: &Csp, v: usize, c: usize) {
        self.value[v] = c;
        self.used[csp.var_family[v]][c] += 1;
        self.trail.push(Undo::Assign(v));
    }

    fn set_domain(&mut self, v: usize, mask: u64) {
        self.trail.push(Undo::Domain(v, self.domain[v]));
        self.domain[v] = mask;
    }

    fn undo_to(&mut self, csp: &Csp, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().unwrap() {
                Undo::Assign(v) => {
                    self.used[csp.var_family[v]][self.value[v]] -= 1;
                    self.value[v] = UNASSIGNED;
                }
                Undo::Domain(v, old) => self.domain[v] = old,
            }
        }
    }

    fn group_state(&self, csp: &Csp, g: &Group) -> (u64, usize, bool, bool) {
        let mut seen = 0u64;
        let mut open = 0usize;
        for &v in &g.vars {
            if self.value[v] == UNASSIGNED {
                open += 1;
            } else {
                seen |= 1 << self.value[v];
            }
        }
        let d = seen.count_ones() as usize;
        let r = csp.family_colors[g.family];
        let reach = d + open.min(r.saturating_sub(d));
        let satisfied = d >= g.threshold;
        let possible = reach >= g.threshold;
        let tight = possible && !satisfied && reach == g.threshold && open <= r - d;
        (seen, open, satisfied || possible, tight)
    }

    fn status(&self, csp: &Csp, ci: usize) -> Status {
        let mut live = None;
        let mut live_count = 0;
        for (gi, g) in csp.constraints[ci].iter().enumerate() {
            let (seen, _, possible, tight) = self.group_state(csp, g);
            if seen.count_ones() as usize >= g.threshold {
                return Status::Satisfied;
            }
            if possible {
                live_count += 1;
                live = Some((gi, tight));
            }
        }
        match (live_count, live) {
            (0, _) => Status::Dead,
            (1, Some((gi, true))) => Status::Open(Some(gi)),
            _ => Status::Open(None),
        }
    }

    /// Applies the constraint's forcing rule; false on conflict.
    fn check_constraint(&mut self, csp: &Csp, ci: usize, queue: &mut Vec<usize>) -> bool {
        match self.status(csp, ci) {
            Status::Satisfied | Status::Open(None) => true,
            Status::Dead => false,
            Status::Open(Some(gi)) => {
                let g = &csp.constraints[ci][gi];
                let (seen, _, _, _) = self.group_state(csp, g);
                for &w in &g.vars {
                    if self.value[w] != UNASSIGNED {
                        continue;
                    }
                    let narrowed = self.domain[w] & !seen;
                    if narrowed == 0 {
                        return false;
                    }
                    if narrowed != self.domain[w] {
                        self.set_domain(w, narrowed);
                        if narrowed.count_ones() == 1 {
                            self.assign(csp, w, narrowed.trailing_zeros() as usize);
                            queue.push(w);
                        }
                    }
                }
                true
            }
        }
    }

    fn propagate(&mut self, csp: &Csp, queue: &mut Vec<usize>) -> bool {
        while let Some(v) = queue.pop() {
            for &ci in &csp.var_constraints[v] {
                if !self.check_constraint(csp, ci, queue) {
                    queue.clear();
                    return false;
                }
            }
        }
        true
    }

    /// Colors a branch on `v` may take.
    fn admissible(&self, csp: &Csp, v: usize) -> u64 {
        let dom = self.domain[v];
        if !csp.value_symmetry {
            return dom;
        }
        let f = csp.var_family[v];
        let mut allowed = 0u64;
        let mut fresh_taken = false;
        for (c, &n) in self.used[f].iter().enumerate() {
            if n > 0 {
                allowed |= 1 << c;
            } else if !fresh_taken {
                allowed |= 1 << c;
                fresh_taken = true;
            }
        }
        dom & allowed
    }

    fn choose(&self, csp: &Csp, order: Order) -> Option<usize> {
        match order {
            Order::Static => self.value.iter().position(|&x| x == UNASSIGNED),
            Order::MostConstrained => {
                let unsatisfied: Vec<bool> = (0..csp.constraints.len())
                    .map(|ci| !matches!(self.status(csp, ci), Status::Satisfied))
                    .collect();
                let mut best: Option<(u32, usize, usize)> = None;
                for v in 0..csp.var_count() {
                    if self.value[v] != UNASSIGNED {
                        continue;
                    }
                    let width = self.admissible(csp, v).count_ones();
                    let degree = csp.var_constraints[v].iter().filter(|&&ci| unsatisfied[ci]).count();
                    let better = match best {
                        None => true,
                        Some((bw, bd, _)) => width < bw || (width == bw && degree > bd),
                    };
                    if better {
                        best = Some((width, degree, v));
                    }
                }
                best.map(|(_, _, v)| v)
            }
        }
    }

    /// False if some symmetry shows that no completion is a canonical
    /// representative.
    fn lex_leader_ok(&self, csp: &Csp) -> bool {
        let families = csp.family_colors.len();
        let mut own = vec![Vec::new(); families];
        let mut moved = vec![Vec::new(); families];
        'perm: for perm in &csp.symmetries {
            for f in 0..families {
                own[f].clear();
                own[f].resize(csp.family_colors[f], UNASSIGNED);
                moved[f].clear();
                moved[f].resize(csp.family_colors[f], UNASSIGNED);
            }
            let mut next_own = vec![0usize; families];
            let mut next_moved = vec![0usize; families];
            for (v, &pv) in perm.iter().enumerate() {
                let x = self.value[v];
                let y = self.value[pv];
                if x == UNASSIGNED || y == UNASSIGNED {
                    continue 'perm;
                }
                let f = csp.var_family[v];
                if own[f][x] == UNASSIGNED {
                    own[f][x] = next_own[f];
                    next_own[f] += 1;
                }
                if moved[f][y] == UNASSIGNED {
                    moved[f][y] = next_moved[f];
                    next_moved[f] += 1;
                }
                match own[f][x].cmp(&moved[f][y]) {
                    std::cmp::Ordering::Less => continue 'perm,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
        }
        true
    }

    fn dfs(
        &mut self,
        csp: &Csp,
        order: Order,
        stats: &mut SearchStats,
        visit: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> SearchEnd {
        stats.nodes += 1;
        if stats.nodes > csp.node_limit {
            return SearchEnd::LimitReached;
        }
        if !self.lex_leader_ok(csp) {
            return SearchEnd::Exhausted;
        }
        let Some(v) = self.choose(csp, order) else {
            stats.solutions += 1;
            return match visit(&self.value) {
                ControlFlow::Continue(()) => SearchEnd::Exhausted,
                ControlFlow::Break(()) => SearchEnd::Stopped,
            };
        };
        let mut options = self.admissible(csp, v);
        while options != 0 {
            let c = options.trailing_zeros() as usize;
            options &= options - 1;
            let mark = self.trail.len();
            self.assign(csp, v, c);
            let mut queue = vec![v];
            if self.propagate(csp, &mut queue) {
                let end = self.dfs(csp, order, stats, visit);
                if end != SearchEnd::Exhausted {
                    self.undo_to(csp, mark);
                    return end;
                }
            }
            self.undo_to(csp, mark);
        }
        SearchEnd::Exhausted
    }
}

fn full_mask(r: usize) -> u64 {
    if r >= 64 {
        u64::MAX
    } else {
        (1u64 << r) - 1
    }
}
