use alloc::vec;
use alloc::vec::Vec;

use super::{default_scan_interval, Method, Mode};
use crate::config::{bounding_box, Configuration, FiniteSupport};
use crate::engine::Automaton;
use crate::geometry::{Domain, Point};
use crate::gf2::{least_nonzero, Gf2System};
use crate::rule::LocalRule;
use crate::{checked_pow, Budget, Error, Executor, Result, State};

/// A nonzero finite-support configuration in the kernel of the linear part
/// of a linear NUCA.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelWitness {
    /// The scanned support window the element was found in.
    pub window: Domain,
    pub element: FiniteSupport,
}

/// Two distinct asymptotic configurations with the same image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreInjWitness {
    pub background: State,
    /// The window both configurations were allowed to vary in.
    pub window: Domain,
    pub c1: FiniteSupport,
    pub c2: FiniteSupport,
    pub mode: Mode,
}

fn check_line(automaton: &Automaton) -> Result<()> {
    if automaton.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: automaton.dim(),
        });
    }
    Ok(())
}

/// `H(e) = H(0)` on the support inflated by `2r`, and `e != 0`.
pub fn verify_kernel(automaton: &Automaton, witness: &KernelWitness) -> Result<bool> {
    verify_collision(automaton, &FiniteSupport::uniform(0), &witness.element)
}

/// `c1 != c2` over a common background, with equal images on their
/// difference window inflated by `2r` (equality elsewhere follows by locality).
pub fn verify_collision(automaton: &Automaton, c1: &FiniteSupport, c2: &FiniteSupport) -> Result<bool> {
    if c1.background() != c2.background() {
        return Ok(false);
    }
    let diffs: Vec<Point> = c1
        .support()
        .chain(c2.support())
        .filter(|&p| c1.get(p) != c2.get(p))
        .collect();
    let Some(bbox) = bounding_box(diffs, automaton.dim()) else {
        return Ok(false);
    };
    let window = bbox.inflate(2 * automaton.radius());
    let a = Configuration::FiniteSupport(c1.clone());
    let b = Configuration::FiniteSupport(c2.clone());
    Ok(automaton.apply_window(&a, &window)? == automaton.apply_window(&b, &window)?)
}

/// Search kernel elements supported in windows of width `1..=max_width`
/// with left ends in `scan`; the first window in (width, position) order
/// wins, and inside it the least element.
pub fn kernel_search<E: Executor>(
    automaton: &Automaton,
    max_width: usize,
    scan: Option<(i64, i64)>,
    exec: &E,
) -> Result<Option<KernelWitness>> {
    check_line(automaton)?;
    if max_width == 0 {
        return Err(Error::Precondition("max_width must be at least 1".into()));
    }
    let (lo, hi) = match scan {
        Some(s) => s,
        None => default_scan_interval(automaton, max_width)?,
    };
    if hi < lo {
        return Ok(None);
    }
    let r = automaton.radius();
    // every candidate window lies inside this one
    let union = Domain::interval(lo, hi + max_width as i64 - 1);
    if Gf2System::for_kernel(automaton, &union, &union.inflate(r))?
        .nullspace_basis()
        .is_empty()
    {
        return Ok(None);
    }
    let count = (hi - lo + 1) as usize;
    for w in 1..=max_width {
        let hit = exec.find_first(count, |k| {
            let window = Domain::span(lo + k as i64, w);
            let sys = Gf2System::for_kernel(automaton, &window, &window.inflate(r))?;
            let Some(x) = least_nonzero(&sys.nullspace_basis()) else {
                return Ok(None);
            };
            let p = sys.assignment_pattern(automaton.rules().alphabet(), &x, &window)?;
            Ok(Some(KernelWitness {
                window,
                element: FiniteSupport::new(0, window.cells().zip(p.states().iter().copied())),
            }))
        })?;
        if let Some((_, w)) = hit {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Search pairs of configurations equal to a uniform background outside a
/// window of width `1..=max_width` (left ends in `scan`) with equal images.
///
/// When every rule is linear the search reduces to [`kernel_search`] and
/// returns `(q, q xor e)`. Otherwise a layered pair automaton walks the
/// window cell by cell; the witness is the first (width, position,
/// background) triple and, inside it, the least pair (compared cell by cell
/// from the right, `c1` before `c2`).
pub fn preinjectivity_search<E: Executor>(
    automaton: &Automaton,
    max_width: usize,
    backgrounds: &[State],
    scan: Option<(i64, i64)>,
    method: Method,
    budget: &Budget,
    exec: &E,
) -> Result<Option<PreInjWitness>> {
    check_line(automaton)?;
    if max_width == 0 {
        return Err(Error::Precondition("max_width must be at least 1".into()));
    }
    let alphabet = automaton.rules().alphabet();
    for &q in backgrounds {
        alphabet.check(q)?;
    }
    if backgrounds.is_empty() {
        return Ok(None);
    }
    let linear = automaton.rules().is_linear();
    let use_rank = match method {
        Method::Rank if !linear => {
            return Err(Error::NotLinear {
                rule: automaton
                    .rules()
                    .rules()
                    .iter()
                    .position(|r| r.linear_form().is_none())
                    .map(|i| automaton.rules().name(i as u32).into())
                    .unwrap_or_default(),
            })
        }
        Method::Rank => true,
        Method::Auto => linear,
        Method::Exhaustive | Method::Fiber => false,
    };
    if use_rank {
        let Some(k) = kernel_search(automaton, max_width, scan, exec)? else {
            return Ok(None);
        };
        let q = backgrounds[0];
        let c2 = FiniteSupport::new(
            q,
            k.window.cells().map(|p| (p, q ^ k.element.get(p))),
        );
        return Ok(Some(PreInjWitness {
            background: q,
            window: k.window,
            c1: FiniteSupport::uniform(q),
            c2,
            mode: Mode::Rank,
        }));
    }
    let (lo, hi) = match scan {
        Some(s) => s,
        None => default_scan_interval(automaton, max_width)?,
    };
    if hi < lo {
        return Ok(None);
    }
    let fiber = match method {
        Method::Fiber => Some(static_split(automaton).ok_or_else(|| {
            Error::NoMethod("fiber mode needs rules that preserve a static track".into())
        })?),
        Method::Auto => static_split(automaton),
        _ => None,
    };
    let mode = if fiber.is_some() { Mode::Fiber } else { Mode::Exhaustive };
    let automata = backgrounds
        .iter()
        .map(|&q| {
            let (codes, bg) = match fiber {
                Some(action) => fiber_codes(automaton, action, q),
                None => exhaustive_codes(automaton, q),
            };
            PairAutomaton::new(automaton, codes, bg, budget)
        })
        .collect::<Result<Vec<_>>>()?;
    let union = Domain::interval(lo, hi + max_width as i64 - 1);
    let mut any = false;
    for pa in &automata {
        if pa.search(&union, false)?.is_some() {
            any = true;
            break;
        }
    }
    if !any {
        return Ok(None);
    }
    let count = (hi - lo + 1) as usize * backgrounds.len();
    for w in 1..=max_width {
        let hit = exec.find_first(count, |k| {
            let window = Domain::span(lo + (k / backgrounds.len()) as i64, w);
            let j = k % backgrounds.len();
            Ok(automata[j].search(&window, true)?.map(|(c1, c2)| PreInjWitness {
                background: backgrounds[j],
                window,
                c1,
                c2,
                mode,
            }))
        })?;
        if let Some((_, w)) = hit {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Number of action states when every rule keeps its leading static tracks
/// unchanged at the center cell and acts affinely on the rest.
///
/// Colliding configurations then share their static tracks, so a pair is
/// a static value plus an action difference.
fn static_split(automaton: &Automaton) -> Option<u32> {
    let rules = automaton.rules();
    let center = rules.neighborhood().index_of(Point::line(0))?;
    let m = rules.neighborhood().arity();
    let mut split = None;
    for rule in rules.rules() {
        let form = rule.fiber_form()?;
        if *split.get_or_insert(form.static_tracks) != form.static_tracks {
            return None;
        }
        for (ctx, (out, _)) in form.contexts.iter().enumerate() {
            let own = (ctx / (form.static_size as usize).pow((m - 1 - center) as u32)) % form.static_size as usize;
            if *out as usize != own {
                return None;
            }
        }
    }
    let a = rules.alphabet();
    Some(a.stride(split? - 1))
}

fn exhaustive_codes(automaton: &Automaton, q: State) -> (Vec<(State, State)>, usize) {
    let s = automaton.rules().alphabet().size();
    let codes = (0..s).flat_map(|a| (0..s).map(move |b| (a, b))).collect();
    (codes, (q * s + q) as usize)
}

/// Codes `static * A + diff`; both states carry the background's action part
/// (xor the difference), which is no loss since the action is affine.
fn fiber_codes(automaton: &Automaton, action: u32, q: State) -> (Vec<(State, State)>, usize) {
    let s = automaton.rules().alphabet().size();
    let qa = q % action;
    let codes = (0..s / action)
        .flat_map(|st| (0..action).map(move |d| (st * action + qa, st * action + (qa ^ d))))
        .collect();
    (codes, (q / action * action) as usize)
}

/// De Bruijn-style automaton over pairs of states. A layer state remembers
/// the last `span - 1` pair codes and whether the configurations differ yet.
struct PairAutomaton<'a> {
    automaton: &'a Automaton,
    s: usize,
    pairs: usize,
    codes: Vec<(State, State)>,
    /// Code of the background pair.
    bg: usize,
    /// Neighbor positions relative to the oldest remembered cell.
    slots: Vec<usize>,
    hi: i64,
    mem: usize,
    histories: usize,
}

impl<'a> PairAutomaton<'a> {
    fn new(automaton: &'a Automaton, codes: Vec<(State, State)>, bg: usize, budget: &Budget) -> Result<Self> {
        let (lo, hi) = automaton.rules().neighborhood().bounds();
        let (lo, hi) = (lo.x, hi.x);
        let s = automaton.rules().alphabet().size() as usize;
        let pairs = codes.len();
        let mem = (hi - lo) as usize;
        let histories = checked_pow(pairs as u64, mem);
        let states = histories.and_then(|h| h.checked_mul(2));
        match states {
            Some(n) if n <= budget.automaton_states as u64 => {}
            _ => {
                return Err(Error::BudgetExceeded {
                    what: "pair automaton states",
                    needed: states,
                    limit: budget.automaton_states as u64,
                })
            }
        }
        let slots = automaton
            .rules()
            .neighborhood()
            .offsets()
            .iter()
            .map(|o| (o.x - lo) as usize)
            .collect();
        Ok(PairAutomaton {
            automaton,
            s,
            pairs,
            codes,
            bg,
            slots,
            hi,
            mem,
            histories: histories.expect("checked") as usize,
        })
    }

    fn n_states(&self) -> usize {
        self.histories * 2
    }

    /// Feed the pair code `z` for cell `y`; checks the cell `y - hi`, whose
    /// neighborhood is now complete.
    fn step(&self, rule: &LocalRule, state: usize, z: usize, window: &mut [usize]) -> Option<usize> {
        let (mut hist, flag) = (state / 2, state % 2);
        for k in (0..self.mem).rev() {
            window[k] = hist % self.pairs;
            hist /= self.pairs;
        }
        window[self.mem] = z;
        let (mut i1, mut i2) = (0usize, 0usize);
        for &slot in &self.slots {
            let (a, b) = self.codes[window[slot]];
            i1 = i1 * self.s + a as usize;
            i2 = i2 * self.s + b as usize;
        }
        if rule.eval_index(i1) != rule.eval_index(i2) {
            return None;
        }
        let next_hist = if self.mem == 0 {
            0
        } else {
            (state / 2 % (self.histories / self.pairs)) * self.pairs + z
        };
        let differs = flag == 1 || self.codes[z].0 != self.codes[z].1;
        Some(next_hist * 2 + differs as usize)
    }

    fn rule_checked_at(&self, y: i64) -> Result<&'a LocalRule> {
        self.automaton.rule_at(Point::line(y - self.hi))
    }

    /// A colliding pair varying only inside `window` over the background.
    /// With `canonical` the least pair is reconstructed; otherwise only
    /// existence matters and a placeholder is returned.
    fn search(&self, window: &Domain, canonical: bool) -> Result<Option<(FiniteSupport, FiniteSupport)>> {
        let w = window.len();
        let a = window.lo();
        let qq = self.bg;
        let q = self.codes[qq].0;
        let init = (0..self.mem).fold(0usize, |h, _| h * self.pairs + qq) * 2;
        let mut buf = vec![0usize; self.mem + 1];
        let mut layers: Vec<crate::gf2::BitVec> = Vec::with_capacity(w + 1);
        let mut first = crate::gf2::BitVec::zeros(self.n_states());
        first.set(init, true);
        layers.push(first);
        let mut rules = Vec::with_capacity(w);
        for t in 0..w {
            let rule = self.rule_checked_at(a + t as i64)?;
            rules.push(rule);
            let mut next = crate::gf2::BitVec::zeros(self.n_states());
            for st in layers[t].ones() {
                for z in 0..self.pairs {
                    if let Some(n) = self.step(rule, st, z, &mut buf) {
                        next.set(n, true);
                    }
                }
            }
            if next.is_zero() {
                return Ok(None);
            }
            layers.push(next);
        }
        let tail: Vec<&LocalRule> = (1..=self.mem as i64)
            .map(|k| self.rule_checked_at(window.hi() + k))
            .collect::<Result<_>>()?;
        let accepts = |mut st: usize, buf: &mut [usize]| -> bool {
            for rule in &tail {
                match self.step(rule, st, qq, buf) {
                    Some(n) => st = n,
                    None => return false,
                }
            }
            st % 2 == 1
        };
        let mut target = crate::gf2::BitVec::zeros(self.n_states());
        for st in layers[w].ones() {
            if accepts(st, &mut buf) {
                target.set(st, true);
            }
        }
        if target.is_zero() {
            return Ok(None);
        }
        if !canonical {
            return Ok(Some((FiniteSupport::uniform(q), FiniteSupport::uniform(q))));
        }
        let mut codes = vec![0usize; w];
        for t in (0..w).rev() {
            let mut chosen = None;
            for z in 0..self.pairs {
                let mut prev = crate::gf2::BitVec::zeros(self.n_states());
                for st in layers[t].ones() {
                    if let Some(n) = self.step(rules[t], st, z, &mut buf) {
                        if target.get(n) {
                            prev.set(st, true);
                        }
                    }
                }
                if !prev.is_zero() {
                    chosen = Some((z, prev));
                    break;
                }
            }
            let (z, prev) = chosen.expect("every target state has a reachable predecessor");
            codes[t] = z;
            target = prev;
        }
        let cells = |pick: &dyn Fn(usize) -> State| {
            FiniteSupport::new(
                q,
                codes
                    .iter()
                    .enumerate()
                    .map(|(t, &z)| (Point::line(a + t as i64), pick(z))),
            )
        };
        Ok(Some((
            cells(&|z| self.codes[z].0),
            cells(&|z| self.codes[z].1),
        )))
    }
}
