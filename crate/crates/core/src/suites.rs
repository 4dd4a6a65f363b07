//! Randomized and exhaustive verification suites. Each suite draws its
//! triples from a seeded ChaCha stream, checks them in parallel, and reports
//! in input order, so reports are reproducible for a given seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    approach_cells, classify_edge, count_zero_junctions, dsv_check, locate_extremum,
    simultaneous_monotone, third_point_quotients, third_point_value, Extremum, ExtremumKind,
    Monotonicity, Side, ThirdPointContext,
};
use crate::arith::{QuadExt, Rational};
use crate::gasket::{
    closed_form_lemma2, edge_samples, eval_dyadic, normal_derivative, normal_derivative_at,
    renormalized_apex_difference, BoundaryValues, ClosedFormPoint, Edge, EdgePoint, Vertex,
};
use crate::oracle::{check_five_point_on, extension_values, solve_harmonic, HarmonicSolver};

/// Numerators and denominators of random rationals are bounded by this.
pub const RANDOM_BOUND: i64 = 100;

pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    Rational::frac(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}

pub fn random_triple<R: Rng>(rng: &mut R) -> BoundaryValues {
    BoundaryValues::new(
        random_rational(rng, RANDOM_BOUND),
        random_rational(rng, RANDOM_BOUND),
        random_rational(rng, RANDOM_BOUND),
    )
}

pub fn random_nonconstant<R: Rng>(rng: &mut R) -> BoundaryValues {
    loop {
        let bv = random_triple(rng);
        if !bv.is_constant() {
            return bv;
        }
    }
}

/// A triple satisfying `2 f(vertex) = sum of the other two`, nonconstant.
pub fn random_on_vertex_relation<R: Rng>(rng: &mut R, vertex: Vertex) -> BoundaryValues {
    loop {
        let x = random_rational(rng, RANDOM_BOUND);
        let y = random_rational(rng, RANDOM_BOUND);
        let mid = (&x + &y) * Rational::frac(1, 2);
        let bv = match vertex {
            Vertex::P0 => BoundaryValues::new(mid, x, y),
            Vertex::P1 => BoundaryValues::new(x, mid, y),
            Vertex::P2 => BoundaryValues::new(x, y, mid),
        };
        if !bv.is_constant() {
            return bv;
        }
    }
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Vertices `v` with `2 f(v) = sum of the other two boundary values`.
pub fn vertex_relations(bv: &BoundaryValues) -> Vec<Vertex> {
    Vertex::ALL
        .into_iter()
        .filter(|&v| normal_derivative_at(bv, v).is_zero())
        .collect()
}

/// Smallest squared Euclidean distance from `(alpha, beta, gamma)` to the
/// planes bounding the bottom-edge monotonicity region:
/// `beta = gamma`, `alpha = 2 beta - gamma`, `alpha = 2 gamma - beta`.
pub fn monotone_margin_sq(bv: &BoundaryValues) -> Rational {
    let (a, b, c) = (&bv.alpha, &bv.beta, &bv.gamma);
    let d1 = b - c;
    let d2 = a - &(b * 2) + c;
    let d3 = a - &(c * 2) + b;
    let candidates = [
        &d1 * &d1 * Rational::frac(1, 2),
        &d2 * &d2 * Rational::frac(1, 6),
        &d3 * &d3 * Rational::frac(1, 6),
    ];
    candidates.into_iter().min().expect("three candidates")
}

/// Number of sign changes in the sequence of consecutive differences,
/// ignoring zero differences, and whether any nonzero difference occurred.
fn turns(values: &[Rational]) -> (usize, bool) {
    let mut last = 0;
    let mut changes = 0;
    for w in values.windows(2) {
        let s = (&w[1] - &w[0]).signum();
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    (changes, last != 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MonotoneCriterion,
    EdgeClosedForms,
    MiddleQuotient,
    Extremum,
    MonotoneSamples,
    Simultaneous,
    ZeroJunctions,
    Conservation,
    ClosedForm,
    QuotientDecay,
    Normal,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::MonotoneCriterion,
        Suite::EdgeClosedForms,
        Suite::MiddleQuotient,
        Suite::Extremum,
        Suite::MonotoneSamples,
        Suite::Simultaneous,
        Suite::ZeroJunctions,
        Suite::Conservation,
        Suite::ClosedForm,
        Suite::QuotientDecay,
        Suite::Normal,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MonotoneCriterion => "monotone-criterion",
            Suite::EdgeClosedForms => "edge-closed-forms",
            Suite::MiddleQuotient => "middle-quotient",
            Suite::Extremum => "extremum",
            Suite::MonotoneSamples => "monotone-samples",
            Suite::Simultaneous => "simultaneous",
            Suite::ZeroJunctions => "theorem5",
            Suite::Conservation => "conservation",
            Suite::ClosedForm => "closed-form",
            Suite::QuotientDecay => "theorem6",
            Suite::Normal => "normal",
            Suite::Oracle => "oracle",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Suite::MonotoneCriterion | Suite::Simultaneous => 10_000,
            Suite::ZeroJunctions => 1_000,
            Suite::Extremum | Suite::MonotoneSamples => 200,
            _ => 100,
        }
    }

    fn default_depth(self) -> u32 {
        match self {
            Suite::ZeroJunctions => 6,
            Suite::Oracle => 4,
            _ => 10,
        }
    }

    fn default_m_max(self) -> u32 {
        match self {
            Suite::EdgeClosedForms => 20,
            Suite::MiddleQuotient => 15,
            Suite::QuotientDecay => 25,
            Suite::Normal => 10,
            _ => 30,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        match key.as_str() {
            "zero-junctions" => return Ok(Suite::ZeroJunctions),
            "quotient-decay" => return Ok(Suite::QuotientDecay),
            _ => {}
        }
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == key)
            .ok_or_else(|| {
                let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// Unset fields fall back to per-suite defaults.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    pub trials: Option<usize>,
    pub depth: Option<u32>,
    pub m_max: Option<u32>,
    pub seed: u64,
    /// Extra triple checked (and tabulated, where a suite has a table) in
    /// addition to the random ones.
    pub triple: Option<BoundaryValues>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub status: Status,
    pub details: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

type Check = std::result::Result<(), String>;

/// Runs `check` over `triples` in parallel; the first failures (by input
/// order) are dumped as counterexamples.
fn run_checks<F>(suite: Suite, triples: &[BoundaryValues], details: Vec<String>, check: F) -> SuiteReport
where
    F: Fn(&BoundaryValues) -> Check + Sync,
{
    let outcomes: Vec<Check> = triples.par_iter().map(&check).collect();
    report_outcomes(suite, triples, details, &outcomes)
}

fn report_outcomes<T>(
    suite: Suite,
    triples: &[BoundaryValues],
    mut details: Vec<String>,
    outcomes: &[std::result::Result<T, String>],
) -> SuiteReport {
    let failures: Vec<(usize, &String)> = outcomes
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.as_ref().err().map(|e| (i, e)))
        .collect();
    details.insert(0, format!("checked {} triples", triples.len()));
    if !failures.is_empty() {
        details.push(format!("{} failing triples", failures.len()));
        for (i, why) in failures.iter().take(5) {
            details.push(format!("counterexample #{i}: {} -> {why}", triples[*i]));
        }
    }
    SuiteReport {
        name: suite.name().to_string(),
        status: if failures.is_empty() { Status::Pass } else { Status::Fail },
        details,
    }
}

fn fail_report(suite: Suite, why: String) -> SuiteReport {
    SuiteReport {
        name: suite.name().to_string(),
        status: Status::Fail,
        details: vec![why],
    }
}

fn draw<R: Rng>(rng: &mut R, n: usize, extra: &Option<BoundaryValues>, nonconstant: bool) -> Vec<BoundaryValues> {
    let mut out: Vec<BoundaryValues> = extra.iter().cloned().collect();
    out.extend((0..n).map(|_| if nonconstant { random_nonconstant(rng) } else { random_triple(rng) }));
    out
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> SuiteReport {
    let trials = config.trials.unwrap_or_else(|| suite.default_trials());
    let depth = config.depth.unwrap_or_else(|| suite.default_depth());
    let m_max = config.m_max.unwrap_or_else(|| suite.default_m_max());
    let mut rng = rng_for(config.seed);
    let extra = &config.triple;

    match suite {
        Suite::MonotoneCriterion => {
            // A quarter of the draws is pushed onto a bounding plane.
            let mut triples = draw(&mut rng, 0, extra, false);
            for i in 0..trials {
                let mut bv = random_triple(&mut rng);
                match i % 8 {
                    0 => bv.alpha = &bv.gamma * 2 - &bv.beta,
                    1 => bv.alpha = &bv.beta * 2 - &bv.gamma,
                    _ => {}
                }
                triples.push(bv);
            }
            run_checks(suite, &triples, vec![], monotone_criterion_check)
        }
        Suite::EdgeClosedForms => {
            if m_max < 1 {
                return fail_report(suite, "m-max must be at least 1".into());
            }
            let triples = draw(&mut rng, trials, extra, false);
            run_checks(suite, &triples, vec![format!("m = 1..={m_max}")], |bv| edge_closed_forms_check(bv, m_max))
        }
        Suite::MiddleQuotient => {
            let triples = draw(&mut rng, trials, extra, false);
            run_checks(suite, &triples, vec![format!("m = 0..={m_max}")], |bv| middle_quotient_check(bv, m_max))
        }
        Suite::Extremum => {
            let triples = draw(&mut rng, trials, extra, true);
            run_checks(suite, &triples, vec![format!("depth {depth}")], |bv| extremum_check(bv, depth.max(1)))
        }
        Suite::MonotoneSamples => {
            let triples = draw(&mut rng, trials, extra, false);
            let slack = depth + 2;
            run_checks(
                suite,
                &triples,
                vec![format!("strict samples at depth {depth}; turn found by depth {slack} when margin >= 1")],
                |bv| monotone_samples_check(bv, depth, slack),
            )
        }
        Suite::Simultaneous => {
            let triples = draw(&mut rng, trials, extra, true);
            run_checks(suite, &triples, vec![], simultaneous_check)
        }
        Suite::ZeroJunctions => zero_junctions(config, trials, depth, &mut rng),
        Suite::Conservation => {
            let triples = draw(&mut rng, trials, extra, false);
            run_checks(suite, &triples, vec![format!("m = 0..={m_max}")], |bv| conservation_check(bv, m_max))
        }
        Suite::ClosedForm => {
            let triples = draw(&mut rng, trials, extra, false);
            run_checks(suite, &triples, vec![format!("m = 0..={m_max}")], |bv| closed_form_check(bv, m_max))
        }
        Suite::QuotientDecay => quotient_decay(config, trials, m_max, &mut rng),
        Suite::Normal => {
            let mut triples = draw(&mut rng, trials, extra, false);
            // Include points on the zero hyperplane 2 alpha = beta + gamma.
            triples.extend((0..trials / 4).map(|_| random_on_vertex_relation(&mut rng, Vertex::P0)));
            run_checks(suite, &triples, vec![format!("m = 1..={m_max}")], |bv| normal_check(bv, m_max))
        }
        Suite::Oracle => oracle(config, trials, depth, &mut rng),
    }
}

pub fn run_suites(suites: &[Suite], config: &SuiteConfig) -> Vec<SuiteReport> {
    suites.iter().map(|&s| run_suite(s, config)).collect()
}

pub fn monotone_criterion_check(bv: &BoundaryValues) -> Check {
    let (a, b, c) = (&bv.alpha, &bv.beta, &bv.gamma);
    let region = b < c && (b * 2 - c) <= *a && *a <= (c * 2 - b);
    let dsv = dsv_check(bv, Edge::Bottom);
    let strict = classify_edge(bv, Edge::Bottom) == Monotonicity::StrictlyIncreasing;
    if dsv != region || strict != region {
        return Err(format!("dsv_check={dsv}, inequality={region}, classify={strict}"));
    }
    Ok(())
}

pub fn edge_closed_forms_check(bv: &BoundaryValues, m_max: u32) -> Check {
    for m in 1..=m_max {
        for which in ClosedFormPoint::ALL {
            let closed = closed_form_lemma2(bv, m, which).map_err(|e| e.to_string())?;
            let point = EdgePoint::new(Edge::Bottom, which.position(m));
            let direct = eval_dyadic(bv, &point).map_err(|e| e.to_string())?;
            if closed != direct {
                return Err(format!("m={m} {which:?}: closed form {closed}, recursion {direct}"));
            }
        }
    }
    Ok(())
}

/// Left difference quotient at `1/2` from `l_m`, against
/// `(3/5)(6/5)^m (gamma - beta) + (2/5)^m (2 alpha - 3 beta + gamma) / 5`.
pub fn middle_quotient_check(bv: &BoundaryValues, m_max: u32) -> Check {
    let half = Rational::frac(1, 2);
    let centre = eval_dyadic(bv, &EdgePoint::new(Edge::Bottom, half.clone())).map_err(|e| e.to_string())?;
    for m in 0..=m_max {
        let e = m as i32;
        let l_m = ClosedFormPoint::LeftOfMiddle.position(m);
        let value = eval_dyadic(bv, &EdgePoint::new(Edge::Bottom, l_m.clone())).map_err(|e| e.to_string())?;
        let quotient = (&centre - &value) / (&half - &l_m);
        let dominant = Rational::frac(3, 5) * Rational::frac(6, 5).pow(e).unwrap() * (&bv.gamma - &bv.beta);
        let fast = Rational::frac(2, 5).pow(e).unwrap()
            * (&bv.alpha * 2 - &bv.beta * 3 + &bv.gamma)
            * Rational::frac(1, 5);
        if quotient != &dominant + &fast {
            return Err(format!("m={m}: quotient {quotient}, formula {}", dominant + fast));
        }
    }
    Ok(())
}

/// Brackets from `locate_extremum` halve and nest level by level; samples at
/// `depth` rise (fall) up to the bracket and fall (rise) after it.
pub fn extremum_check(bv: &BoundaryValues, depth: u32) -> Check {
    for edge in Edge::ALL {
        if classify_edge(bv, edge) != Monotonicity::NonMonotone {
            continue;
        }
        let mut prev: Option<(Rational, Rational)> = None;
        let mut last = None;
        for d in 1..=depth {
            let ext = locate_extremum(bv, edge, d).map_err(|e| format!("{edge} depth {d}: {e}"))?;
            let (lo, hi) = match &ext {
                Extremum::Bracket { lo, hi, .. } => {
                    let width = Rational::frac(1, 2).pow(d as i32).unwrap();
                    if hi - lo != width {
                        return Err(format!("{edge} depth {d}: bracket [{lo}, {hi}] has width != {width}"));
                    }
                    (lo.clone(), hi.clone())
                }
                Extremum::AtJunction { position, .. } => (position.clone(), position.clone()),
            };
            if let Some((plo, phi)) = &prev {
                if lo < *plo || hi > *phi {
                    return Err(format!("{edge} depth {d}: [{lo}, {hi}] not inside [{plo}, {phi}]"));
                }
            }
            prev = Some((lo, hi));
            last = Some(ext);
        }
        let ext = last.expect("depth >= 1");
        let (lo, hi) = prev.expect("depth >= 1");
        let n = Rational::from(1i64 << depth);
        let samples: Vec<(Rational, Rational)> = edge_samples(bv, edge, depth)
            .map(|(k, v)| (Rational::from(k) / &n, v))
            .collect();
        let before: Vec<Rational> = samples.iter().filter(|(x, _)| *x <= lo).map(|(_, v)| v.clone()).collect();
        let after: Vec<Rational> = samples.iter().filter(|(x, _)| *x >= hi).map(|(_, v)| v.clone()).collect();
        let want = match ext.kind() {
            ExtremumKind::Max => (1, -1),
            ExtremumKind::Min => (-1, 1),
        };
        for (part, sign, label) in [(&before, want.0, "before"), (&after, want.1, "after")] {
            if let Some(w) = part.windows(2).find(|w| (&w[1] - &w[0]).signum() != sign) {
                return Err(format!("{edge}: samples {label} the bracket not strictly monotone at {} -> {}", w[0], w[1]));
            }
        }
    }
    Ok(())
}

/// Strict classifications give strict samples at `depth`; non-monotone ones
/// with margin at least 1 from the bounding planes show exactly one turn by
/// `slack`.
pub fn monotone_samples_check(bv: &BoundaryValues, depth: u32, slack: u32) -> Check {
    for edge in Edge::ALL {
        let oriented = edge.orient(bv);
        let class = classify_edge(bv, edge);
        let sign = match class {
            Monotonicity::StrictlyIncreasing => 1,
            Monotonicity::StrictlyDecreasing => -1,
            Monotonicity::Constant => 0,
            Monotonicity::NonMonotone => {
                if monotone_margin_sq(&oriented) < Rational::one() {
                    continue;
                }
                let found = (1..=slack).any(|d| {
                    let values: Vec<Rational> = edge_samples(bv, edge, d).map(|(_, v)| v).collect();
                    turns(&values).0 == 1
                });
                if !found {
                    return Err(format!("{edge}: non-monotone but no turn by depth {slack}"));
                }
                continue;
            }
        };
        let values: Vec<Rational> = edge_samples(bv, edge, depth).map(|(_, v)| v).collect();
        if let Some(w) = values.windows(2).find(|w| (&w[1] - &w[0]).signum() != sign) {
            return Err(format!("{edge}: classified {class} but {} -> {}", w[0], w[1]));
        }
    }
    Ok(())
}

pub fn simultaneous_check(bv: &BoundaryValues) -> Check {
    let all_strict = Edge::ALL.iter().all(|&e| classify_edge(bv, e).is_strict());
    let simultaneous = simultaneous_monotone(bv).map_err(|e| e.to_string())?;
    if simultaneous != all_strict {
        return Err(format!("simultaneous_monotone={simultaneous}, three strict edges={all_strict}"));
    }
    Ok(())
}

/// At most one Zero-class junction; exactly one, at the vertex, when a single
/// vertex relation holds.
pub fn zero_junctions_check(bv: &BoundaryValues, depth: u32) -> std::result::Result<usize, String> {
    let scan = count_zero_junctions(bv, depth).map_err(|e| e.to_string())?;
    if scan.count > 1 {
        let pts: Vec<String> = scan.points.iter().map(|p| p.to_string()).collect();
        return Err(format!("{} zero junctions: {}", scan.count, pts.join(", ")));
    }
    if let [v] = vertex_relations(bv)[..] {
        let expected = crate::analysis::ContourPoint::Vertex { vertex: v };
        if scan.points != [expected] {
            let pts: Vec<String> = scan.points.iter().map(|p| p.to_string()).collect();
            return Err(format!("relation at {v} but zeros at [{}]", pts.join(", ")));
        }
    }
    Ok(scan.count)
}

fn zero_junctions(config: &SuiteConfig, trials: usize, depth: u32, rng: &mut ChaCha8Rng) -> SuiteReport {
    let suite = Suite::ZeroJunctions;
    let mut triples = draw(rng, trials, &config.triple, true);
    let on_relation = (trials / 10).max(3);
    for i in 0..on_relation {
        triples.push(random_on_vertex_relation(rng, Vertex::ALL[i % 3]));
    }
    let counts: Vec<std::result::Result<usize, String>> =
        triples.par_iter().map(|bv| zero_junctions_check(bv, depth)).collect();
    let max = counts.iter().filter_map(|c| c.as_ref().ok()).max().copied().unwrap_or(0);
    let details = vec![
        format!("depth {depth}, {on_relation} triples drawn on a vertex relation"),
        format!("max zero-count {max}"),
    ];
    report_outcomes(suite, &triples, details, &counts)
}

pub fn conservation_check(bv: &BoundaryValues, m_max: u32) -> Check {
    let c = crate::analysis::third_point::conserved_quantity(bv);
    for cell in approach_cells(bv).take(m_max as usize + 1) {
        if cell.conserved() != c {
            return Err(format!("m={}: 5a+15b+7g = {}, expected {c}", cell.m, cell.conserved()));
        }
    }
    Ok(())
}

pub fn closed_form_check(bv: &BoundaryValues, m_max: u32) -> Check {
    let ctx = ThirdPointContext::new(bv);
    for cell in approach_cells(bv).take(m_max as usize + 1) {
        let m = cell.m;
        let gamma = ctx.gamma_at(m);
        let beta = ctx.beta_at(m);
        if gamma != QuadExt::rational(cell.gamma_m.clone()) {
            return Err(format!("m={m}: gamma closed form {gamma}, recursion {}", cell.gamma_m));
        }
        if beta != QuadExt::rational(cell.beta_m.clone()) {
            return Err(format!("m={m}: beta closed form {beta}, recursion {}", cell.beta_m));
        }
    }
    Ok(())
}

/// Per side: quotients for `m = 1..=m_max`, the onset of guaranteed decay, and
/// the verdict of the 9/10 ratio bound from the onset on.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub side: Side,
    pub quotients: Vec<Rational>,
    pub onset: Option<u32>,
}

impl DecayProfile {
    /// First `m` (1-based) with `|q(m+1)| > (9/10) |q(m)|` among `m >= from`.
    pub fn first_violation(&self, from: u32) -> Option<u32> {
        let bound = Rational::frac(9, 10);
        (from.max(1)..self.quotients.len() as u32).find(|&m| {
            let (q, next) = (&self.quotients[m as usize - 1], &self.quotients[m as usize]);
            next.abs() > &bound * &q.abs()
        })
    }
}

pub fn decay_profile(bv: &BoundaryValues, m_max: u32, side: Side) -> DecayProfile {
    let ctx = ThirdPointContext::new(bv);
    DecayProfile {
        side,
        quotients: third_point_quotients(bv, m_max, side),
        onset: ctx.quotient_expansion(side).decay_onset(),
    }
}

pub fn quotient_decay_check(bv: &BoundaryValues, m_max: u32) -> Check {
    let ctx = ThirdPointContext::new(bv);
    for side in [Side::Left, Side::Right] {
        let profile = decay_profile(bv, m_max, side);
        let expansion = ctx.quotient_expansion(side);
        for (i, q) in profile.quotients.iter().enumerate() {
            let m = i as u32 + 1;
            if expansion.quotient_at(m) != QuadExt::rational(q.clone()) {
                return Err(format!("{side:?} m={m}: expansion disagrees with exact quotient {q}"));
            }
        }
        match profile.onset {
            None => {
                if let Some(q) = profile.quotients.iter().find(|q| !q.is_zero()) {
                    return Err(format!("{side:?}: expansion vanishes but quotient {q} is nonzero"));
                }
            }
            Some(onset) => {
                if let Some(m) = profile.first_violation(onset) {
                    let (q, next) = (&profile.quotients[m as usize - 1], &profile.quotients[m as usize]);
                    return Err(format!("{side:?}: onset {onset}, but |q({})| = |{next}| > 9/10 |q({m})| = |{q}|", m + 1));
                }
            }
        }
    }
    Ok(())
}

fn quotient_decay(config: &SuiteConfig, trials: usize, m_max: u32, rng: &mut ChaCha8Rng) -> SuiteReport {
    let suite = Suite::QuotientDecay;
    let table_triple = config.triple.clone().unwrap_or_else(|| BoundaryValues::from_ints(0, 0, 1));
    let mut details = vec![format!(
        "quotients toward 1/3 for {table_triple}, f(1/3) = {}",
        third_point_value(&table_triple)
    )];
    let left = decay_profile(&table_triple, m_max, Side::Left);
    let right = decay_profile(&table_triple, m_max, Side::Right);
    details.push(format!(
        "decay onset: left {}, right {}",
        left.onset.map_or("-".into(), |m| m.to_string()),
        right.onset.map_or("-".into(), |m| m.to_string())
    ));
    details.push("m | |left quotient| | |right quotient|".into());
    for m in 1..=m_max as usize {
        let (l, r) = (&left.quotients[m - 1], &right.quotients[m - 1]);
        details.push(format!("{m} | {:.6e} | {:.6e}", l.abs().to_f64(), r.abs().to_f64()));
    }
    let mut triples = vec![table_triple];
    triples.extend((0..trials).map(|_| random_nonconstant(rng)));
    let late: usize = triples
        .iter()
        .filter(|bv| {
            [Side::Left, Side::Right]
                .iter()
                .any(|&s| ThirdPointContext::new(bv).quotient_expansion(s).decay_onset().is_some_and(|o| o > 3))
        })
        .count();
    details.push(format!("{late} triples have a decay onset beyond m = 3"));
    run_checks(suite, &triples, details, |bv| quotient_decay_check(bv, m_max))
}

pub fn normal_check(bv: &BoundaryValues, m_max: u32) -> Check {
    let nd = normal_derivative(bv);
    for m in 1..=m_max {
        let r = renormalized_apex_difference(bv, m);
        if r != nd {
            return Err(format!("m={m}: renormalized difference {r}, expected {nd}"));
        }
    }
    let on_plane = &bv.alpha * 2 == &bv.beta + &bv.gamma;
    if nd.is_zero() != on_plane {
        return Err(format!("normal derivative {nd} but on-plane={on_plane}"));
    }
    Ok(())
}

fn oracle(config: &SuiteConfig, trials: usize, depth: u32, rng: &mut ChaCha8Rng) -> SuiteReport {
    let suite = Suite::Oracle;
    let triples = draw(rng, trials, &config.triple, false);
    let levels: Vec<u32> = (1..=depth).collect();
    let mut solvers = Vec::new();
    for &m in &levels {
        match HarmonicSolver::new(m) {
            Ok(s) => solvers.push(s),
            Err(e) => return fail_report(suite, format!("level {m}: {e}")),
        }
    }
    // One fresh elimination per level guards the cached basis solutions.
    if let Some(bv) = triples.first() {
        for solver in &solvers {
            let m = solver.graph().m;
            match solve_harmonic(m, bv) {
                Ok(direct) if direct == solver.solve(bv) => {}
                Ok(_) => return fail_report(suite, format!("level {m}: cached and direct solutions differ for {bv}")),
                Err(e) => return fail_report(suite, format!("level {m}: {e}")),
            }
        }
    }
    let details = vec![format!("levels 1..={depth}")];
    run_checks(suite, &triples, details, |bv| {
        for solver in &solvers {
            let graph = solver.graph();
            let solved = solver.solve(bv);
            let extended = extension_values(graph, bv);
            if let Some((v, x)) = solved.iter().find(|(v, x)| extended.get(v) != Some(x)) {
                let c = &graph.vertices[*v].coord;
                return Err(format!("level {}: vertex ({}, {}) solved {x}, extension {}", graph.m, c.0, c.1, extended[v]));
            }
            match check_five_point_on(graph, &extended) {
                Ok(true) => {}
                Ok(false) => return Err(format!("level {}: five-point relation violated", graph.m)),
                Err(e) => return Err(e.to_string()),
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(suite: Suite) -> SuiteReport {
        let config = SuiteConfig {
            trials: Some(20),
            seed: 7,
            ..SuiteConfig::default()
        };
        run_suite(suite, &config)
    }

    #[test]
    fn suites_pass_on_small_runs() {
        for suite in Suite::ALL {
            let report = small(suite);
            assert!(report.passed(), "{suite}: {:#?}", report.details);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let a = small(Suite::ZeroJunctions);
        let b = small(Suite::ZeroJunctions);
        assert_eq!(a.details, b.details);
    }

    #[test]
    fn suite_names_round_trip() {
        for suite in Suite::ALL {
            assert_eq!(suite.name().parse::<Suite>(), Ok(suite));
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("closed_form".parse::<Suite>(), Ok(Suite::ClosedForm));
        assert_eq!("quotient-decay".parse::<Suite>(), Ok(Suite::QuotientDecay));
    }

    #[test]
    fn counterexamples_are_dumped() {
        let triples = vec![BoundaryValues::from_ints(0, 0, 1), BoundaryValues::from_ints(1, 2, 3)];
        let report = run_checks(Suite::Normal, &triples, vec![], |bv| {
            if bv.alpha.is_zero() { Err("boom".into()) } else { Ok(()) }
        });
        assert_eq!(report.status, Status::Fail);
        assert!(report.details.iter().any(|d| d.starts_with("counterexample #0") && d.ends_with("boom")));
    }

    #[test]
    fn decay_table_for_basis_triple() {
        let config = SuiteConfig { trials: Some(5), m_max: Some(20), ..SuiteConfig::default() };
        let report = run_suite(Suite::QuotientDecay, &config);
        assert!(report.passed(), "{:#?}", report.details);
        let rows = report.details.iter().filter(|d| d.contains(" | ") && !d.starts_with('m')).count();
        assert_eq!(rows, 20);
    }

    #[test]
    fn turns_counts_sign_changes() {
        let v = |xs: &[i64]| xs.iter().map(|&x| Rational::from(x)).collect::<Vec<_>>();
        assert_eq!(turns(&v(&[0, 1, 2, 3])), (0, true));
        assert_eq!(turns(&v(&[0, 2, 2, 1])), (1, true));
        assert_eq!(turns(&v(&[0, 1, 0, 1])), (2, true));
        assert_eq!(turns(&v(&[1, 1])), (0, false));
    }
}
