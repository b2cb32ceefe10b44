//! Self-checks: each criterion recomputes a closed formula through an
//! independent route and compares exactly.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use hilbtaut_core::cechcomplex::{action_matrix, differential_matrix, invariants_of_term, CechComplexModel, CechTermModule};
use hilbtaut_core::cohomology::{
    ext_power_cohomology, psi_annihilator_check, taut_cohomology, tensor_square_cohomology, tensor_square_parts, Grading,
    PairedSpace,
};
use hilbtaut_core::danila::{invariants_danila, invariants_direct};
use hilbtaut_core::grading::{
    ext_power, ext_power_molien, ext_power_weighted, sym_power, sym_power_molien, sym_power_weighted,
};
use hilbtaut_core::multitor::{koszul_tor_oracle, tor_character};
use hilbtaut_core::perm::{all_perms, binomial, sort_sign, Perm};
use hilbtaut_core::ringmodel::{p2, truncated_poly_model};
use hilbtaut_core::specseq::{assemble_page, e00_infinity_k2, e2m1_invariants_k2, ext_c0_invariants, AffineModel};
use hilbtaut_core::symrep::{character_table, ext_inv_dim, ext_inv_dim_trivial_closed, Partition, Twist};
use hilbtaut_core::GradedDim;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Full,
}

impl Tier {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Tier::Fast),
            "full" => Ok(Tier::Full),
            other => Err(CliError::Config(format!("unknown verify tier {:?}; expected fast or full", other))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub suite: &'static str,
    pub title: &'static str,
    pub budget: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, suite: "characters", title: "character orthogonality", budget: secs(10) },
    Criterion { id: 2, suite: "ext-invariants", title: "invariants of Λ^q(V⊗ρ_k)", budget: secs(30) },
    Criterion { id: 3, suite: "cech", title: "Čech structure and vanishing of higher invariants", budget: secs(60) },
    Criterion { id: 4, suite: "multitor", title: "Koszul multi-Tor oracle", budget: secs(60) },
    Criterion { id: 5, suite: "psi", title: "Ψ annihilating polynomial", budget: secs(60) },
    Criterion { id: 6, suite: "k2", title: "k = 2 section cross-oracle", budget: secs(300) },
    Criterion { id: 7, suite: "pages", title: "exterior-power page degeneration", budget: secs(300) },
    Criterion { id: 8, suite: "exterior", title: "exterior section cross-oracle", budget: secs(60) },
    Criterion { id: 9, suite: "powers", title: "graded powers against Molien", budget: secs(10) },
    Criterion { id: 10, suite: "regression", title: "p2 regression values", budget: secs(1) },
];

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub suite: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
    pub budget_ms: u128,
}

/// Sizes checked by a run, fixed by tier and optionally capped in `n`.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub tier: Tier,
    pub max_n: Option<u32>,
}

impl Bounds {
    fn pick(&self, fast: u32, full: u32) -> u32 {
        match self.tier {
            Tier::Fast => fast,
            Tier::Full => full,
        }
    }

    fn n(&self, fast: u32, full: u32) -> u32 {
        let n = self.pick(fast, full);
        self.max_n.map_or(n, |m| n.min(m))
    }
}

type Check = Result<String, String>;

fn core<T>(r: hilbtaut_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn characters(b: &Bounds) -> Check {
    let top = b.n(6, 8);
    for m in 1..=top {
        let t = core(character_table(m))?;
        let order: i128 = (1..=i128::from(m)).product();
        let k = t.partitions.len();
        for x in 0..k {
            for y in x..k {
                let s: i128 = (0..k).map(|c| t.partitions[c].class_size() as i128 * t.value(x, c) * t.value(y, c)).sum();
                let want = if x == y { order } else { 0 };
                ensure(s == want, || format!("<χ_{}, χ_{}> = {}/{} on S_{}", t.partitions[x], t.partitions[y], s, order, m))?;
            }
        }
    }
    Ok(format!("all partitions of m ≤ {}", top))
}

/// `Λ^q` of the permutation representation: signed count of stable `q`-subsets.
fn ext_perm_char(s: &Perm, q: usize) -> i64 {
    let n = s.degree();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == q)
        .filter_map(|mask| {
            let pts: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let imgs: Vec<usize> = pts.iter().map(|&i| s.apply(i)).collect();
            imgs.iter().all(|&j| mask >> j & 1 == 1).then(|| i64::from(sort_sign(&imgs)))
        })
        .sum()
}

fn ext_std_char(s: &Perm, j: usize) -> i64 {
    (0..=j).map(|i| if i % 2 == 0 { 1 } else { -1 } * ext_perm_char(s, j - i)).sum()
}

fn brute_ext_inv(k: u32, q: usize) -> u64 {
    let perms = all_perms(k as usize);
    let sum: i64 = perms.iter().map(|s| (0..=q).map(|i| ext_std_char(s, i) * ext_std_char(s, q - i)).sum::<i64>()).sum();
    (sum / perms.len() as i64) as u64
}

fn ext_invariants(b: &Bounds) -> Check {
    let newton_top = b.pick(6, 8);
    let brute_top = b.pick(4, 6);
    for k in 1..=newton_top {
        for q in 0..=2 * k {
            let got = core(ext_inv_dim(k, q, Twist::Trivial))?;
            let want = u64::from(q % 2 == 0 && q + 2 <= 2 * k);
            ensure(got == want && ext_inv_dim_trivial_closed(k, q) == want, || {
                format!("k={} q={}: character count {} against {}", k, q, got, want)
            })?;
            if k <= brute_top {
                let brute = brute_ext_inv(k, q as usize);
                ensure(brute == got, || format!("k={} q={}: permutation sum {} against {}", k, q, brute, got))?;
            }
        }
    }
    Ok(format!("Newton identities for k ≤ {}, permutation sums for k ≤ {}", newton_top, brute_top))
}

fn cech(b: &Bounds) -> Check {
    let top = b.n(4, 6);
    for n in 1..=top {
        ensure(core(CechComplexModel::new(n))?.squares_to_zero().map_err(|e| e.to_string())?, || {
            format!("∂² ≠ 0 for n={}", n)
        })?;
        let perms = all_perms(n as usize);
        let gens: Vec<Perm> = (1..n as usize).map(|i| Perm::transposition(n as usize, i - 1, i)).collect();
        for p in 0..n {
            let acts: Vec<_> = perms.iter().map(|s| action_matrix(n, s, p)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            let gen_acts: Vec<_> =
                gens.iter().map(|g| action_matrix(n, g, p)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
            let d = if p + 1 < n { Some(core(differential_matrix(n, p))?) } else { None };
            let next: Option<Vec<_>> = match d {
                Some(_) => Some(perms.iter().map(|s| action_matrix(n, s, p + 1)).collect::<Result<_, _>>().map_err(|e| e.to_string())?),
                None => None,
            };
            for (i, s) in perms.iter().enumerate() {
                // a homomorphism on all (σ, generator) pairs is a homomorphism
                for (g, ga) in gens.iter().zip(&gen_acts) {
                    let lhs = core(action_matrix(n, &s.compose(g), p))?;
                    ensure(lhs == core(acts[i].compose(ga))?, || format!("action not multiplicative on C^{} for n={}", p, n))?;
                }
                if let (Some(d), Some(next)) = (&d, &next) {
                    ensure(core(next[i].compose(d))? == core(d.compose(&acts[i]))?, || {
                        format!("∂^{} not equivariant for n={}", p, n)
                    })?;
                }
            }
        }
    }
    let (vn, vd) = (b.n(4, 5), b.pick(2, 3));
    for d in 0..=vd {
        let ring = core(truncated_poly_model(d))?;
        let dims = ring.graded_dims();
        for n in 2..=vn {
            for p in 1..n {
                let m = core(CechTermModule::new(n, p, &ring))?;
                let by_orbits = core(invariants_danila(&m))?;
                let by_projector = core(invariants_direct(&m))?;
                let by_characters = core(invariants_of_term(n, p, &ring, &dims))?;
                ensure(by_orbits.is_zero() && by_projector.is_zero() && by_characters.is_zero(), || {
                    format!("(C^{})^S_{} ≠ 0 at d={}: {} / {} / {}", p, n, d, by_orbits, by_projector, by_characters)
                })?;
            }
        }
    }
    Ok(format!("structure for n ≤ {}, vanishing for n ≤ {}, d ≤ {}", top, vn, vd))
}

fn multitor(b: &Bounds) -> Check {
    let extra = b.pick(0, 1);
    for l in 2..=3u32 {
        let id = core(Partition::new(vec![1; l as usize]))?;
        for q in 0..=2 * (l - 1) + 1 {
            let want = binomial(2 * (i64::from(l) - 1), i64::from(q)) as u64;
            for window in l..=l + extra {
                let got = core(koszul_tor_oracle(l, q, window))?;
                ensure(got == want, || format!("Tor_{} of {} loci with window {}: {} against {}", q, l, window, got, want))?;
            }
            let ch = core(tor_character(l, q, &id))?;
            ensure(ch == want as i128, || format!("character at identity {} against {} (l={}, q={})", ch, want, l, q))?;
        }
    }
    Ok(format!("l ∈ {{2, 3}}, windows up to l+{}", extra))
}

fn psi(b: &Bounds) -> Check {
    let (kmax, dmax) = (b.pick(3, 4), b.pick(1, 2));
    for d in 0..=dmax {
        let ring = core(truncated_poly_model(d))?;
        let f = PairedSpace::regular(&ring);
        for k in 1..=kmax as usize {
            ensure(core(psi_annihilator_check(k, &ring, &f))?, || format!("product does not vanish at k={} d={}", k, d))?;
        }
    }
    Ok(format!("k ≤ {}, d ≤ {}", kmax, dmax))
}

fn k2(b: &Bounds) -> Check {
    let (nmax, dmax) = (b.n(3, 4), b.pick(1, 2));
    for d in 0..=dmax {
        let model = core(AffineModel::new(d))?;
        let w = model.weights();
        for n in 2..=nmax {
            let e = core(e00_infinity_k2(n, &model))?;
            ensure(e.surjective(), || format!("n={} d={}: rank {} below target {}", n, d, e.rank, e.target))?;
            let closed = model.truncate(&core(tensor_square_parts(n, &w, &w, &w, Grading::Weight))?.total);
            ensure(e.kernel == closed, || format!("n={} d={}: kernel {} against closed form {}", n, d, e.kernel, closed))?;
            let e2 = core(e2m1_invariants_k2(n, &model))?;
            ensure(e2.is_zero(), || format!("n={} d={}: E^(2,-1) invariants {}", n, d, e2))?;
        }
    }
    Ok(format!("n ≤ {}, d ≤ {}", nmax, dmax))
}

fn pages(b: &Bounds) -> Check {
    let (nmax, kmax, dmax) = (b.n(4, 5), b.pick(2, 3), b.pick(0, 1));
    let mut count = 0;
    for d in 0..=dmax {
        let model = core(AffineModel::new(d))?;
        for n in 2..=nmax {
            for k in 1..=kmax.min(n) {
                for q in -4..=0 {
                    let c = core(assemble_page(n, k, q, &model))?;
                    ensure(c.shape_matches(), || format!("n={} k={} q={} d={}: terms differ from the predicted shape", n, k, q, d))?;
                    ensure(c.d_squared_zero, || format!("n={} k={} q={} d={}: d² ≠ 0", n, k, q, d))?;
                    ensure(c.exact_above_threshold(), || format!("n={} k={} q={} d={}: not exact above threshold", n, k, q, d))?;
                    ensure(c.alphas_are_isomorphisms(), || format!("n={} k={} q={} d={}: some α is not an isomorphism", n, k, q, d))?;
                    ensure(c.holds(), || format!("n={} k={} q={} d={}: {:?}", n, k, q, d, c))?;
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{} complexes, n ≤ {}, k ≤ {}, -4 ≤ q ≤ 0, d ≤ {}", count, nmax, kmax, dmax))
}

fn exterior(b: &Bounds) -> Check {
    let (nmax, kmax, dmax) = (b.n(4, 5), b.pick(2, 3), b.pick(1, 2));
    for d in 0..=dmax {
        let model = core(AffineModel::new(d))?;
        let w = model.weights();
        for n in 1..=nmax {
            for k in 1..=kmax.min(n) {
                let (got, _) = core(ext_c0_invariants(n, k, &model))?;
                let closed = model.truncate(&core(ext_power_weighted(&w, k))?.tensor(&core(sym_power_weighted(&w, n - k))?));
                ensure(got == closed, || format!("n={} k={} d={}: invariants {} against {}", n, k, d, got, closed))?;
            }
        }
    }
    Ok(format!("n ≤ {}, k ≤ {}, d ≤ {}", nmax, kmax, dmax))
}

fn powers(_: &Bounds) -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0009);
    let samples = 128;
    for i in 0..samples {
        let mut v = GradedDim::zero();
        for _ in 0..rng.gen_range(1..=4) {
            v.add_at(rng.gen_range(-3..=4), rng.gen_range(0..=3));
        }
        for m in 0..=5 {
            let (s, sm) = (core(sym_power(&v, m))?, core(sym_power_molien(&v, m))?);
            ensure(s == sm, || format!("sample {}: S^{}{} = {} but Molien gives {}", i, m, v, s, sm))?;
            let (e, em) = (core(ext_power(&v, m))?, core(ext_power_molien(&v, m))?);
            ensure(e == em, || format!("sample {}: Λ^{}{} = {} but Molien gives {}", i, m, v, e, em))?;
        }
    }
    Ok(format!("{} random graded spaces, m ≤ 5", samples))
}

fn regression(_: &Bounds) -> Check {
    let single = |d: u64| GradedDim::single(0, d);
    let taut = core(taut_cohomology(3, &core(p2(1, 0))?))?;
    ensure(taut == single(3), || format!("taut(n=3, O(1)) = {}", taut))?;
    let ext = core(ext_power_cohomology(4, 3, &core(p2(2, 0))?))?;
    ensure(ext == single(20), || format!("extk(n=4, k=3, O(2)) = {}", ext))?;
    let t = core(tensor_square_cohomology(2, &core(p2(1, 0))?))?;
    let got = (t.total.exact_dims().cloned(), t.sym2.exact_dims().cloned(), t.ext2.exact_dims().cloned());
    ensure(got == (Some(single(9)), Some(single(6)), Some(single(3))), || format!("tensor2(n=2, O(1)) = {:?}", got))?;
    Ok("taut 3, extk 20, tensor2 9 = 6 + 3".into())
}

fn runner(id: u8) -> fn(&Bounds) -> Check {
    match id {
        1 => characters,
        2 => ext_invariants,
        3 => cech,
        4 => multitor,
        5 => psi,
        6 => k2,
        7 => pages,
        8 => exterior,
        9 => powers,
        _ => regression,
    }
}

pub fn run_criterion(c: &Criterion, bounds: &Bounds) -> Outcome {
    let start = Instant::now();
    let result = runner(c.id)(bounds);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    // budgets are stated for the full sizes
    if passed && bounds.tier == Tier::Full && elapsed > c.budget {
        passed = false;
        detail = format!("{} (over the {} s budget)", detail, c.budget.as_secs());
    }
    Outcome {
        id: c.id,
        suite: c.suite,
        title: c.title,
        passed,
        detail,
        elapsed_ms: elapsed.as_millis(),
        budget_ms: c.budget.as_millis(),
    }
}

/// `all`, or a comma-separated list of suite names or criterion numbers.
pub fn select(suite: &str) -> Result<Vec<Criterion>, CliError> {
    let mut out: Vec<Criterion> = Vec::new();
    for part in suite.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if part == "all" {
            return Ok(CRITERIA.to_vec());
        }
        let found = CRITERIA.iter().find(|c| c.suite == part || c.id.to_string() == part).ok_or_else(|| {
            let names: Vec<&str> = CRITERIA.iter().map(|c| c.suite).collect();
            CliError::Config(format!("unknown suite {:?}; expected all or one of {}", part, names.join(", ")))
        })?;
        if !out.iter().any(|c| c.id == found.id) {
            out.push(*found);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("empty suite selection".into()));
    }
    out.sort_by_key(|c| c.id);
    Ok(out)
}

pub fn run(suite: &str, bounds: &Bounds) -> Result<Vec<Outcome>, CliError> {
    Ok(select(suite)?.iter().map(|c| run_criterion(c, bounds)).collect())
}

pub fn render(outcomes: &[Outcome], bounds: &Bounds, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => {
            let mut s = String::new();
            for o in outcomes {
                let _ = writeln!(
                    s,
                    "{} [{:>2}] {}: {} ({} ms)",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.id,
                    o.suite,
                    o.detail,
                    o.elapsed_ms
                );
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            let _ = writeln!(s, "{}/{} passed ({:?} tier)", passed, outcomes.len(), bounds.tier);
            s
        }
        OutputFormat::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                tier: Tier,
                max_n: Option<u32>,
                outcomes: &'a [Outcome],
            }
            let mut s = serde_json::to_string_pretty(&Doc { tier: bounds.tier, max_n: bounds.max_n, outcomes })
                .expect("outcomes serialize");
            s.push('\n');
            s
        }
    }
}
