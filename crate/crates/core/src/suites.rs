//! Property suites behind `posort verify`.
//!
//! Each property runs over a built-in instance family and reports
//! pass/fail with a short detail string. Exact identities are checked in
//! rational arithmetic; Monte Carlo properties use `SuiteConfig::samples`
//! draws and fixed seeds derived from `SuiteConfig::seed`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::entropy::{entropy, lb_from_entropy};
use crate::error::{Error, Result};
use crate::generate::{all_posets, named_posets, random_poset, random_sp_expr};
use crate::linext::{count_extensions, count_extensions_sp, enumerate_extensions, LinearExtension};
use crate::numeric::{ln_biguint, rational_from_usize, rational_to_f64};
use crate::orderstats::{
    closed_form_checks, density_f, exp_ln_gap_check, gap_distribution_check,
    gap_position_independence, i_residual, HarmonicTable, QUADRATURE_TOL,
};
use crate::polytope::{
    chain_polytope_volume_mc, max_chain_sum, transfer, transfer_inverse, PolytopeSampler,
};
use crate::poset::Poset;
use crate::quadrature::integrate;
use crate::quantum::{
    hilbert_norm, nk_bounds, parallel_gain, qh_exact, qh_mc, qlb_enum, qlb_sp, tech_constant,
    verify_adversary, VerifyOptions,
};
use crate::sp::{recognize_sp, SpExpr};
use crate::Limits;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Lemmas,
    Polytopes,
    Orderstats,
    Sp,
    Adversary,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lemmas,
        Suite::Polytopes,
        Suite::Orderstats,
        Suite::Sp,
        Suite::Adversary,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Polytopes => "polytopes",
            Suite::Orderstats => "orderstats",
            Suite::Sp => "sp",
            Suite::Adversary => "adversary",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown suite `{s}`")))
    }
}

/// Resolves a suite name, where `all` selects every suite.
pub fn select(name: &str) -> Result<Vec<Suite>> {
    if name == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Monte Carlo draws per property instance.
    pub samples: usize,
    /// Entropy solver duality-gap tolerance.
    pub tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            samples: 100_000,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyOutcome {
    pub suite: Suite,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&SuiteConfig) -> Result<(bool, String)>;

fn properties(suite: Suite) -> Vec<(&'static str, Check)> {
    match suite {
        Suite::Sp => vec![
            ("lbser, lbpar and qhpar hold exactly", composition_lemmas as Check),
            ("qlb_sp equals enumerated QLB", qlb_sp_matches),
            ("SP extension count equals down-set count", sp_count_matches),
            ("recognition round-trips SP expressions", recognition_round_trip),
            ("N-free iff series-parallel (n <= 9)", n_free_iff_sp),
            ("bounds are invariant under relabeling", relabel_invariance),
        ],
        Suite::Lemmas => vec![
            ("QH Monte Carlo matches exact QH", qh_identity_monte_carlo),
            ("QLB and |Δ| are monotone under extension (n <= 5)", extension_monotonicity),
            ("QLB / ITLB >= c_min on SP posets", qlb_itlb_ratio),
            ("N_k bounds", nk_checks),
            ("Stirling constant is positive", stirling_constant),
            ("expected log gap equals harmonic difference", exp_ln_lemma),
        ],
        Suite::Polytopes => vec![
            ("transfer map round trip within 1e-12", transfer_round_trip),
            ("transfer image satisfies every chain constraint", transfer_feasibility),
            ("chain polytope volume equals |Δ|/n!", volume_matches),
            ("no grid point of C(P) beats the entropy (n <= 4)", entropy_grid_oracle),
            ("ITLB <= LB <= 2 ITLB", sandwich),
        ],
        Suite::Orderstats => vec![
            ("f_{n,k} integrates to 1 (n <= 30)", density_mass),
            ("closed forms for I, J, H within 1e-8", closed_forms),
            ("harmonic table is exact (q <= 10^4)", harmonic_exact),
            ("gap law passes KS at 0.001 (n <= 8)", gap_law),
            ("gap law does not depend on position", gap_independence),
        ],
        Suite::Adversary => vec![
            ("adversary certificates: norm, pair bound and ratio", adversary_certificates),
            ("uniform Rayleigh quotient >= QLB", uniform_rayleigh),
            ("Hilbert matrix norm below π", hilbert_below_pi),
        ],
    }
}

/// Runs one suite; properties run in parallel and come back in
/// declaration order.
pub fn run(suite: Suite, cfg: &SuiteConfig) -> Vec<PropertyOutcome> {
    properties(suite)
        .into_par_iter()
        .map(|(name, check)| {
            let (passed, detail) = match check(cfg) {
                Ok(result) => result,
                Err(e) => (false, format!("error: {e}")),
            };
            PropertyOutcome {
                suite,
                name,
                passed,
                detail,
            }
        })
        .collect()
}

fn rng_for(cfg: &SuiteConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn summary(failures: &[String], checked: usize) -> (bool, String) {
    match failures.first() {
        None => (true, format!("{checked} instances")),
        Some(first) => (
            false,
            format!("{} of {checked} failed; first: {first}", failures.len()),
        ),
    }
}

fn composition_lemmas(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 1);
    let mut table = HarmonicTable::new();
    let mut failures = Vec::new();
    let trials = 100;
    for _ in 0..trials {
        let n = rng.random_range(2..=10);
        let n1 = rng.random_range(1..n);
        let (e1, e2) = (random_sp_expr(n1, &mut rng), random_sp_expr(n - n1, &mut rng));
        let q1 = qlb_enum(&e1.realize())?;
        let q2 = qlb_enum(&e2.realize())?;
        let ser = qlb_enum(&SpExpr::series([e1.clone(), e2.clone()]).realize())?;
        let par_poset = SpExpr::parallel([e1.clone(), e2.clone()]).realize();
        let par = qlb_enum(&par_poset)?;
        if ser != &q1 + &q2 {
            failures.push(format!("lbser on {e1} | {e2}"));
        }
        if par != &q1 + &q2 + parallel_gain(&mut table, n1, n - n1) {
            failures.push(format!("lbpar on {e1} | {e2}"));
        }
        let qh = |e: &SpExpr| qh_exact(&e.realize());
        let mixed = rational_from_usize(n1) / rational_from_usize(n) * qh(&e1)?
            + rational_from_usize(n - n1) / rational_from_usize(n) * qh(&e2)?;
        if qh_exact(&par_poset)? != mixed {
            failures.push(format!("qhpar on {e1} | {e2}"));
        }
    }
    Ok(summary(&failures, trials))
}

fn qlb_sp_matches(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 2);
    let mut failures = Vec::new();
    for _ in 0..100 {
        let e = random_sp_expr(rng.random_range(1..=10), &mut rng);
        if qlb_sp(&e)? != qlb_enum(&e.realize())? {
            failures.push(e.to_string());
        }
    }
    Ok(summary(&failures, 100))
}

fn sp_count_matches(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 3);
    let mut failures = Vec::new();
    for _ in 0..200 {
        let e = random_sp_expr(rng.random_range(1..=12), &mut rng);
        if count_extensions_sp(&e)? != count_extensions(&e.realize())? {
            failures.push(e.to_string());
        }
    }
    Ok(summary(&failures, 200))
}

/// Canonical relation of a decomposition matches the original poset.
fn round_trips(p: &Poset) -> bool {
    match recognize_sp(p) {
        None => false,
        Some(d) => {
            let q = d.expr.realize();
            q.n() == p.n()
                && (0..p.n()).all(|s| (0..p.n()).all(|t| q.less(s, t) == p.less(d.leaves[s], d.leaves[t])))
        }
    }
}

fn recognition_round_trip(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 4);
    let mut failures = Vec::new();
    for _ in 0..300 {
        let e = random_sp_expr(rng.random_range(1..=12), &mut rng);
        let p = e.realize();
        if !round_trips(&p) {
            failures.push(e.to_string());
            continue;
        }
        // flattened canonical forms agree on the original numbering
        let d = recognize_sp(&p).unwrap();
        if d.leaves.iter().enumerate().all(|(t, &l)| t == l) && d.expr != e {
            failures.push(format!("non-canonical form for {e}"));
        }
    }
    Ok(summary(&failures, 300))
}

fn n_free_iff_sp(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let mut rng = rng_for(cfg, 5);
    let trials = 10_000;
    let mut failures = Vec::new();
    let mut sp_count = 0;
    for _ in 0..trials {
        let n = rng.random_range(1..=9);
        let density = rng.random_range(0.05..0.7);
        let p = random_poset(n, density, &mut rng);
        let is_sp = recognize_sp(&p).is_some();
        sp_count += is_sp as usize;
        if is_sp != (p.count_induced_n() == 0) || (is_sp && !round_trips(&p)) {
            failures.push(p.to_text().replace('\n', " "));
        }
    }
    let (ok, detail) = summary(&failures, trials);
    Ok((ok, format!("{detail} ({sp_count} series-parallel)")))
}

fn relabel_invariance(cfg: &SuiteConfig) -> Result<(bool, String)> {
    use rand::seq::SliceRandom;
    let mut rng = rng_for(cfg, 6);
    let mut failures = Vec::new();
    let bases = [
        SpExpr::NBlock(1).realize(),
        SpExpr::NBlock(2).realize(),
        crate::sp::parse_sp(". * (.+.+.) * (. + (. * .))")?.realize(),
    ];
    for p in &bases {
        let h = entropy::<f64>(p, cfg.tol)?.h;
        let (count, qlb) = (count_extensions(p)?, qlb_enum(p)?);
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..p.n()).collect();
            perm.shuffle(&mut rng);
            let q = p.relabel(&perm)?;
            let hq = entropy::<f64>(&q, cfg.tol)?.h;
            if count_extensions(&q)? != count
                || qlb_enum(&q)? != qlb
                || (hq - h).abs() > 1e-6
                || q.count_induced_n() != p.count_induced_n()
            {
                failures.push(format!("{perm:?}"));
            }
        }
    }
    Ok(summary(&failures, 15))
}

/// Random posets on at most `max_n` elements, plus the named family.
fn test_family(cfg: &SuiteConfig, salt: u64, max_n: usize, random: usize) -> Vec<Poset> {
    let mut rng = rng_for(cfg, salt);
    let mut out: Vec<Poset> = named_posets()
        .into_iter()
        .map(|(_, p)| p)
        .filter(|p| p.n() <= max_n)
        .collect();
    for _ in 0..random {
        let n = rng.random_range(1..=max_n);
        let density = rng.random_range(0.1..0.6);
        out.push(random_poset(n, density, &mut rng));
    }
    out
}

fn qh_identity_monte_carlo(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = test_family(cfg, 7, 8, 6);
    let mut failures = Vec::new();
    for (t, p) in family.iter().enumerate() {
        let qlb = qlb_enum(p)?;
        let qh = qh_exact(p)?;
        let identity = rational_from_usize(p.n())
            * (HarmonicTable::new().get(p.n()).clone() - qh.clone());
        if identity != qlb {
            failures.push(format!("identity fails on {}", p.to_text().replace('\n', " ")));
        }
        let (est, se) = qh_mc(p, cfg.samples, cfg.seed.wrapping_add(t as u64))?;
        let exact = rational_to_f64(&qh);
        if (est - exact).abs() > 4.0 * se + 1e-12 {
            failures.push(format!("QH {est} ± {se} vs {exact}"));
        }
    }
    Ok(summary(&failures, family.len()))
}

fn extension_monotonicity(_: &SuiteConfig) -> Result<(bool, String)> {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for n in 1..=5 {
        let posets = all_posets(n);
        let masks: Vec<u32> = posets
            .iter()
            .map(|p| p.relations().fold(0u32, |m, (i, j)| m | 1 << (i * n + j)))
            .collect();
        let qlbs = posets.iter().map(qlb_enum).collect::<Result<Vec<_>>>()?;
        let counts = posets.iter().map(count_extensions).collect::<Result<Vec<_>>>()?;
        for (a, &ma) in masks.iter().enumerate() {
            for (b, &mb) in masks.iter().enumerate() {
                // b extends a
                if ma & !mb == 0 {
                    checked += 1;
                    if qlbs[a] < qlbs[b] || counts[a] < counts[b] {
                        failures.push(format!("n = {n}, pair ({a}, {b})"));
                    }
                }
            }
        }
    }
    Ok(summary(&failures, checked))
}

fn qlb_itlb_ratio(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let c_min = tech_constant(500)?.c_min;
    let mut rng = rng_for(cfg, 8);
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut worst = f64::INFINITY;
    for _ in 0..200 {
        let e = random_sp_expr(rng.random_range(2..=10), &mut rng);
        let p = e.realize();
        let count = count_extensions(&p)?;
        if count <= BigUint::from(1u32) || count > BigUint::from(10_000u32) {
            continue;
        }
        checked += 1;
        let ratio = rational_to_f64(&qlb_enum(&p)?) / ln_biguint(&count);
        worst = worst.min(ratio);
        if ratio < c_min {
            failures.push(format!("{e}: {ratio}"));
        }
    }
    let (ok, detail) = summary(&failures, checked);
    Ok((ok, format!("{detail}; min ratio {worst:.6} vs c_min {c_min:.6}")))
}

fn nk_checks(_: &SuiteConfig) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for k in 1..=2 {
        let p = SpExpr::NBlock(k).realize();
        let b = nk_bounds(k)?;
        let itlb = ln_biguint(&count_extensions(&p)?);
        if !(b.itlb_lo < itlb && itlb < b.itlb_hi) {
            failures.push(format!("ITLB sandwich at k = {k}"));
        }
        if rational_to_f64(&qlb_enum(&p)?) < b.qlb_lo - 1e-9 {
            failures.push(format!("QLB bound at k = {k}"));
        }
        if p.count_induced_n() != (k as u64).pow(4) {
            failures.push(format!("induced N count at k = {k}"));
        }
    }
    let c_min = tech_constant(500)?.c_min;
    for k in 1..=25 {
        let b = nk_bounds(k)?;
        if b.qlb_lo < c_min * b.itlb_lo {
            failures.push(format!("analytic chain at k = {k}"));
        }
    }
    Ok(summary(&failures, 27))
}

fn stirling_constant(_: &SuiteConfig) -> Result<(bool, String)> {
    let tc = tech_constant(500)?;
    Ok((
        tc.c_min > 0.0,
        format!("c_min = {:.12} at {:?}", tc.c_min, tc.argmin),
    ))
}

fn exp_ln_lemma(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = test_family(cfg, 9, 6, 3);
    let mut rng = rng_for(cfg, 10);
    let mut failures = Vec::new();
    let mut checked = 0;
    let samples = cfg.samples.clamp(2, 50_000);
    for p in &family {
        let exts: Vec<LinearExtension> = enumerate_extensions(p)?.collect();
        let ext = &exts[rng.random_range(0..exts.len())];
        let i = rng.random_range(0..p.n());
        let c = exp_ln_gap_check(p, ext, i, samples, rng.random())?;
        checked += 1;
        if c.residual() > 4.0 * c.stderr + 1e-12 {
            failures.push(format!("{c:?}"));
        }
    }
    Ok(summary(&failures, checked))
}

fn transfer_round_trip(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = test_family(cfg, 11, 10, 10);
    let mut rng = rng_for(cfg, 12);
    let mut worst: f64 = 0.0;
    for p in &family {
        let sampler = PolytopeSampler::new(p, &Limits::default())?;
        for _ in 0..1000 {
            let y = sampler.order_point::<f64, _>(&mut rng);
            let z = transfer(p, &y)?;
            let back = transfer_inverse(p, &z)?;
            let z2 = transfer(p, &back)?;
            for (a, b) in y.y.iter().zip(&back.y).chain(z.z.iter().zip(&z2.z)) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst <= 1e-12, format!("max coordinate error {worst:e}")))
}

fn transfer_feasibility(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = test_family(cfg, 13, 10, 10);
    let mut rng = rng_for(cfg, 14);
    let mut worst = f64::NEG_INFINITY;
    for p in &family {
        let chains = p.maximal_chains();
        let sampler = PolytopeSampler::new(p, &Limits::default())?;
        for _ in 0..1000 {
            let z = sampler.chain_point::<f64, _>(&mut rng);
            if z.z.iter().any(|&v| v < 0.0) {
                return Ok((false, "negative coordinate".into()));
            }
            worst = worst.max(max_chain_sum(&chains, &z.z));
        }
    }
    Ok((worst <= 1.0 + 1e-12, format!("max chain sum {worst}")))
}

fn factorial(n: usize) -> BigUint {
    (1..=n).map(BigUint::from).product()
}

fn volume_matches(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = test_family(cfg, 15, 8, 6);
    let mut failures = Vec::new();
    for (t, p) in family.iter().enumerate() {
        let exact = BigRational::new(count_extensions(p)?.into(), factorial(p.n()).into());
        let exact = rational_to_f64(&exact);
        let (est, se) = chain_polytope_volume_mc(p, cfg.samples, cfg.seed.wrapping_add(t as u64))?;
        if (est - exact).abs() > 4.0 * se + 1e-15 {
            failures.push(format!("{est} ± {se} vs {exact}"));
        }
    }
    Ok(summary(&failures, family.len()))
}

/// Smallest objective over grid points of `C(P)` with spacing `step`
/// for all but the last coordinate, which is pushed to its largest
/// feasible value (the objective decreases in every coordinate).
pub fn grid_entropy_min(p: &Poset, step: f64) -> f64 {
    let n = p.n();
    let chains: Vec<Vec<usize>> = p
        .maximal_chains()
        .iter()
        .map(|c| c.elements().to_vec())
        .collect();
    let levels = (1.0 / step).round() as usize;
    let mut z = vec![0.0; n];
    let mut best = f64::INFINITY;
    fn rec(
        depth: usize,
        n: usize,
        levels: usize,
        step: f64,
        chains: &[Vec<usize>],
        z: &mut Vec<f64>,
        best: &mut f64,
    ) {
        let last = n - 1;
        if depth == last {
            let mut room = 1.0f64;
            for c in chains {
                let others: f64 = c.iter().filter(|&&i| i != last).map(|&i| z[i]).sum();
                if c.contains(&last) {
                    room = room.min(1.0 - others);
                } else if others > 1.0 + 1e-12 {
                    return;
                }
            }
            if room <= 0.0 {
                return;
            }
            z[last] = room;
            let value = -z.iter().map(|v| v.ln()).sum::<f64>() / n as f64;
            *best = best.min(value);
            return;
        }
        for level in 1..=levels {
            z[depth] = level as f64 * step;
            // prune on chains fully decided so far
            let over = chains.iter().any(|c| {
                c.iter().all(|&i| i <= depth) && c.iter().map(|&i| z[i]).sum::<f64>() > 1.0 + 1e-12
            });
            if over {
                break;
            }
            rec(depth + 1, n, levels, step, chains, z, best);
        }
    }
    rec(0, n, levels, step, &chains, &mut z, &mut best);
    best
}

fn entropy_grid_oracle(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family: Vec<Poset> = (1..=4).flat_map(all_posets).collect();
    let mut failures = Vec::new();
    for p in &family {
        let h = entropy::<f64>(p, cfg.tol)?.h;
        let step = if p.n() <= 3 { 1e-3 } else { 2e-2 };
        let grid = grid_entropy_min(p, step);
        if grid < h - 1e-3 {
            failures.push(format!("grid {grid} below H = {h}"));
        }
    }
    Ok(summary(&failures, family.len()))
}

fn sandwich(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = test_family(cfg, 16, 12, 20);
    let mut failures = Vec::new();
    let mut checked = 0;
    for p in &family {
        let itlb = ln_biguint(&count_extensions(p)?);
        if itlb <= 0.0 {
            continue;
        }
        checked += 1;
        let lb = lb_from_entropy(p.n(), entropy::<f64>(p, cfg.tol)?.h);
        if !(itlb <= lb + 1e-6 && lb <= 2.0 * itlb + 1e-6) {
            failures.push(format!("ITLB {itlb}, LB {lb}"));
        }
    }
    Ok(summary(&failures, checked))
}

fn density_mass(_: &SuiteConfig) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in 1..=30 {
        for k in 0..n {
            let mass = integrate(|s: f64| density_f(n, k, s).unwrap(), 0.0, 1.0, QUADRATURE_TOL)?;
            worst = worst.max((mass - 1.0).abs());
        }
    }
    Ok((worst <= 1e-10, format!("max |mass - 1| = {worst:e}")))
}

fn closed_forms(_: &SuiteConfig) -> Result<(bool, String)> {
    let grid: Vec<f64> = (0..=10).map(|t| t as f64 / 10.0).collect();
    let mut worst: f64 = 0.0;
    for n in 1..=30usize {
        for k in 0..n {
            for &s in &grid {
                worst = worst.max(closed_form_checks(n, k, s)?.max());
            }
        }
        // I is also defined at k = n
        for &s in &grid {
            worst = worst.max(i_residual(n, n, s)?);
        }
    }
    Ok((worst <= 1e-8, format!("max residual {worst:e}")))
}

fn harmonic_exact(_: &SuiteConfig) -> Result<(bool, String)> {
    let q_max = 10_000;
    let mut table = HarmonicTable::new();
    table.get(q_max);
    // independent evaluation: pairwise summation tree over 1/i
    fn tree(lo: usize, hi: usize) -> BigRational {
        if hi - lo == 1 {
            BigRational::new(1.into(), lo.into())
        } else {
            let mid = (lo + hi) / 2;
            tree(lo, mid) + tree(mid, hi)
        }
    }
    let mut ok = true;
    for q in [1usize, 2, 3, 10, 100, 1000, 4321, q_max] {
        ok &= *table.get(q) == tree(1, q + 1);
    }
    for q in 1..=q_max {
        let step = table.cached(q).unwrap() - table.cached(q - 1).unwrap();
        ok &= step == BigRational::new(1.into(), q.into());
    }
    ok &= table.get(0).is_zero();
    Ok((ok, format!("H_q checked for q <= {q_max}")))
}

fn gap_law(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let samples = cfg.samples.max(crate::orderstats::MIN_KS_SAMPLES);
    let mut cases = Vec::new();
    for n in 1..=8usize {
        for i in 0..n {
            for d in 1..=n - i {
                cases.push((n, i, d));
            }
        }
    }
    let outcomes = cases
        .par_iter()
        .enumerate()
        .map(|(t, &(n, i, d))| {
            gap_distribution_check(n, i, d, samples, cfg.seed.wrapping_add(t as u64), 0.001)
                .map(|o| ((n, i, d), o))
        })
        .collect::<Result<Vec<_>>>()?;
    let failures: Vec<String> = outcomes
        .iter()
        .filter(|(_, o)| !o.passed())
        .map(|(c, o)| format!("{c:?}: D = {:.5} > {:.5}", o.statistic, o.critical))
        .collect();
    Ok(summary(&failures, cases.len()))
}

fn gap_independence(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let samples = cfg.samples.max(crate::orderstats::MIN_KS_SAMPLES);
    let mut failures = Vec::new();
    let cases = [(6, 2, 1, 3), (8, 3, 0, 5), (5, 1, 1, 4)];
    for (t, &(n, d, i1, i2)) in cases.iter().enumerate() {
        let o = gap_position_independence(n, d, i1, i2, samples, cfg.seed + t as u64, 0.001)?;
        if !o.passed() {
            failures.push(format!("n = {n}, d = {d}: {o:?}"));
        }
    }
    Ok(summary(&failures, cases.len()))
}

/// Test posets whose adversary matrix has at most `max_dim` rows.
fn adversary_family(cfg: &SuiteConfig, max_dim: usize) -> Result<Vec<Poset>> {
    let mut out = Vec::new();
    for p in test_family(cfg, 17, 8, 12) {
        if count_extensions(&p)?.to_usize().is_some_and(|c| c <= max_dim) {
            out.push(p);
        }
    }
    Ok(out)
}

fn adversary_certificates(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = adversary_family(cfg, 2000)?;
    let mut failures = Vec::new();
    let mut worst_denominator: f64 = 0.0;
    for p in &family {
        let cert = verify_adversary(p, &VerifyOptions::default())?;
        worst_denominator = worst_denominator.max(cert.max_gamma_ij_norm);
        if !cert.all_ok() {
            failures.push(format!(
                "‖Γ‖ = {}, max ‖Γij‖ = {}, QLB = {}",
                cert.gamma_norm, cert.max_gamma_ij_norm, cert.qlb
            ));
        }
    }
    let (ok, detail) = summary(&failures, family.len());
    Ok((
        ok,
        format!("{detail}; largest ‖Γij‖ = {worst_denominator:.6} vs 2π = {:.6}", 2.0 * PI),
    ))
}

fn uniform_rayleigh(cfg: &SuiteConfig) -> Result<(bool, String)> {
    let family = adversary_family(cfg, 2000)?;
    let mut failures = Vec::new();
    let mut max_excess: f64 = 0.0;
    for p in &family {
        let gamma: crate::AdversaryMatrix64 = crate::quantum::build_adversary(p)?;
        let qlb = rational_to_f64(&qlb_enum(p)?);
        let r = gamma.uniform_rayleigh();
        if qlb > 0.0 {
            max_excess = max_excess.max(r / qlb);
        }
        if r < qlb - 1e-9 * qlb.max(1.0) {
            failures.push(format!("vᵀΓv = {r} < QLB = {qlb}"));
        }
    }
    let (ok, detail) = summary(&failures, family.len());
    Ok((ok, format!("{detail}; max vᵀΓv / QLB = {max_excess:.6}")))
}

fn hilbert_below_pi(_: &SuiteConfig) -> Result<(bool, String)> {
    let norms = [10, 50, 200]
        .iter()
        .map(|&m| hilbert_norm::<f64>(m).map(|v| (m, v)))
        .collect::<Result<Vec<_>>>()?;
    let ok = norms.iter().all(|&(_, v)| v < PI) && norms.windows(2).all(|w| w[0].1 < w[1].1);
    Ok((ok, format!("{norms:?}")))
}
