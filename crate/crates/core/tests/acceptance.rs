//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so the lines are
//! always printed.

mod common;

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::{Duration, Instant};

use moment_phase::conditioning::*;
use moment_phase::formats::grid_from_csv;
use moment_phase::maxent::{fime_solve, FimeOptions, MaxentProblem};
use moment_phase::pipeline::{run_pipeline, PipelineConfig, Status};
use moment_phase::raybeam::*;
use moment_phase::series::{indices_of_degree, series_pow, FormalSeries, MultiIndex};
use moment_phase::transform::*;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn dirac_conditioning() -> Verdict {
    let t = Instant::now();
    let mut gamma = vec![0.0; 25];
    gamma[0] = 2.0;
    let a_phi = condition_line(&PowerMoments::half_line(gamma)).unwrap().values;
    let elapsed = t.elapsed();
    let err = a_phi
        .iter()
        .enumerate()
        .map(|(n, v)| rel(*v, 2f64.powi(n as i32 + 1) / (n as f64 + 1.0)))
        .fold(0.0, f64::max);
    verdict(
        a_phi.len() == 25 && err <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max rel err {err:.2e}, {elapsed:.2?}"),
    )
}

fn circle_dirac() -> Verdict {
    let theta = 0.7;
    let tau: Vec<Complex64> = (0..=16)
        .map(|n| Complex64::from_polar(1.0, -(n as f64) * theta))
        .collect();
    let phi = condition_circle(&TrigMoments::new(tau)).unwrap().values;
    let err = (1..=16)
        .map(|k| {
            let expect = Complex64::from_polar(1.0, -(k as f64) * theta) / Complex64::new(0.0, 2.0 * k as f64);
            (phi[k] - expect).norm()
        })
        .fold(0.0, f64::max);
    let exact0 = phi[0] == Complex64::new(FRAC_PI_2, 0.0);
    verdict(
        err <= 1e-12 && exact0,
        format!("max err {err:.2e}, τ_φ(0) exact: {exact0}"),
    )
}

fn polydisk_round_trip() -> Verdict {
    let (c, a) = (2.0, 0.5);
    let mu = MultiMoments::from_atoms(&[(c, vec![a])], 16).unwrap();
    let b = polydisk_generating_series(&mu).unwrap();
    // for a single atom the normalized generating series is geometric
    let gen_err = (0..=16u32)
        .map(|n| (b.coeff(&[n]) - Complex64::new(a.powi(n as i32), 0.0)).norm())
        .fold(0.0, f64::max);
    let back = unconditioned_polydisk(&condition_polydisk(&mu).unwrap()).unwrap();
    let err = (0..=16u32)
        .map(|n| (back.coeff(&[n]) - b.coeff(&[n])).norm())
        .fold(0.0, f64::max);
    verdict(
        err <= 1e-12 && gen_err <= 1e-12,
        format!("round trip err {err:.2e}, generating series vs a^n {gen_err:.2e}"),
    )
}

fn miller_nakos() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let dim = rng.gen_range(1..=3);
        let order = rng.gen_range(0..=6);
        let k = rng.gen_range(0..=5);
        let mut terms = HashMap::new();
        for deg in 0..=order {
            for idx in indices_of_degree(dim, deg) {
                terms.insert(
                    idx.entries().to_vec(),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        let free = terms.get_mut(&vec![0; dim]).unwrap();
        *free = Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-0.5..0.5));
        let s =
            FormalSeries::from_terms(dim, order, terms.iter().map(|(i, c)| (MultiIndex::new(i.clone()), *c))).unwrap();
        let got = series_pow(&s, k).unwrap();
        let want = common::brute_pow(&terms, dim, k, order);
        let scale = want.values().map(|c| c.norm()).fold(1.0, f64::max);
        worst = worst.max(common::max_diff(&got, &want) / scale);
    }
    verdict(worst <= 1e-12, format!("200 series, worst scaled err {worst:.2e}"))
}

fn fime_uniform() -> Verdict {
    let t = Instant::now();
    let moments: Vec<f64> = (0..5).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    let problem = MaxentProblem::from_power_moments(&moments, 0.0, 1.0, 201).unwrap();
    let sol = fime_solve(&problem, &FimeOptions::default()).unwrap();
    let elapsed = t.elapsed();
    let sup = (0..=1000)
        .map(|j| (sol.density_at(j as f64 / 1000.0) - 1.0).abs())
        .chain(sol.density.iter().map(|d| (d - 1.0).abs()))
        .fold(0.0, f64::max);
    let d = &sol.dual;
    verdict(
        d.converged
            && d.residual_norm < 1e-8
            && d.iterations <= 100_000
            && sup <= 1e-6
            && elapsed < Duration::from_secs(10),
        format!(
            "residual {:.2e} after {} updates, sup|ρ−1| {sup:.2e}, {elapsed:.2?}",
            d.residual_norm, d.iterations
        ),
    )
}

fn negative_control() -> Verdict {
    let opts = FimeOptions::default();
    let raw = PowerMoments::interval(vec![1.0, 0.0, 0.0, 0.0], 0.0, 1.0);
    let direct = fime_solve(
        &MaxentProblem::from_power_moments(&raw.values, 0.0, 1.0, 256).unwrap(),
        &opts,
    )
    .unwrap();
    let phi = condition_line(&raw).unwrap();
    // same maxent problem on the data interval for both runs; [0, 1] is also
    // the lower end of the bracket for the phase support
    let (a, b) = (0.0, 1.0);
    let cond = fime_solve(
        &MaxentProblem::from_power_moments(&phi.values, a, b, 256).unwrap(),
        &opts,
    )
    .unwrap();
    verdict(
        !direct.dual.converged && cond.dual.converged,
        format!(
            "raw: converged={} residual {:.2e}; conditioned on [{a}, {b}]: converged={} after {} updates",
            direct.dual.converged, direct.dual.residual_norm, cond.dual.converged, cond.dual.iterations
        ),
    )
}

fn exp_weight() -> Verdict {
    let g = extend_exp_weight(&[0.0, -1.0], &[1.0], 12).unwrap().values;
    let mut fact = 1.0;
    let mut err: f64 = 0.0;
    for (k, v) in g.iter().enumerate().take(13) {
        if k > 0 {
            fact *= k as f64;
        }
        err = err.max(rel(*v, fact));
    }
    verdict(g.len() >= 13 && err <= 1e-9, format!("γ_0..γ_12 max rel err {err:.2e}"))
}

fn hilbert_operators() -> Verdict {
    // χ_[0,c] on a grid where 0 and c fall on cell edges
    let c = 1.0;
    let step = GridFunction::from_fn(Domain::Interval { a: -1.0, b: 3.0 }, 1024, |x| {
        if (0.0..c).contains(&x) {
            1.0
        } else {
            0.0
        }
    })
    .unwrap();
    let h = hilbert_line(&step, 4).unwrap();
    let dx = step.spacing();
    let line_err = step
        .points()
        .iter()
        .zip(&h.values)
        .filter(|(x, _)| (*x - 0.0).abs() > 3.0 * dx && (*x - c).abs() > 3.0 * dx)
        .map(|(x, v)| (v - ((c - x) / x).abs().ln() / PI).abs())
        .fold(0.0, f64::max);

    let f = |t: f64| (t.cos() + 0.3 * (2.0 * t).sin()).exp();
    let grid = GridFunction::from_fn(Domain::Circle, 256, f).unwrap();
    let hc = hilbert_circle(&grid).unwrap();
    let circ_err = grid
        .points()
        .iter()
        .zip(&hc.values)
        .step_by(8)
        .map(|(t, v)| (v - common::circle_pv(f, *t, 100_000)).abs())
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let coef: Vec<(f64, f64)> = (1..=12)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let band = GridFunction::from_fn(Domain::Circle, 128, |t| {
        coef.iter()
            .enumerate()
            .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
            .sum()
    })
    .unwrap();
    let hh = hilbert_circle(&hilbert_circle(&band).unwrap()).unwrap();
    let hh_err = hh
        .values
        .iter()
        .zip(&band.values)
        .map(|(x, y)| (x + y).abs())
        .fold(0.0, f64::max);
    verdict(
        line_err <= 1e-4 && circ_err <= 1e-6 && hh_err <= 1e-6,
        format!("line step {line_err:.2e}, circle vs PV quadrature {circ_err:.2e}, H∘H+I {hh_err:.2e}"),
    )
}

fn beta_density(x: f64) -> f64 {
    ((1.0 - x) / x).sqrt() / PI * (PI / 2.0).sin()
}

fn beta_l1(density: &GridFunction) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (x, r) in density.points().iter().zip(&density.values) {
        if *x > 0.05 && *x < 0.95 {
            num += (r - beta_density(*x)).abs();
            den += beta_density(*x);
        }
    }
    num / den
}

fn beta_moments() -> Vec<u8> {
    let a_phi: Vec<f64> = (0..=12).map(|n| 0.5 / (n as f64 + 1.0)).collect();
    let a_mu = unconditioned_line(&PowerMoments::half_line(a_phi)).unwrap();
    serde_json::to_vec(
        &serde_json::json!({"schema": 1, "kind": "power", "support": {"interval": [0.0, 1.0]}, "values": a_mu.values}),
    )
    .unwrap()
}

fn beta_jump() -> Verdict {
    let t = Instant::now();
    let input = beta_moments();
    // the phase ½χ_[0,1] lives on [0,1]; [0, 1.5] = [a, b + γ_0] is the loose end
    // of the bracket and is run as a diagnostic
    let config = PipelineConfig {
        grid: 1024,
        max_sweeps: 2_000_000,
        phase_interval: Some([0.0, 1.0]),
        ..Default::default()
    };
    let out = run_pipeline(&config, &input).unwrap();
    let elapsed = t.elapsed();
    let density = out
        .artifacts
        .iter()
        .find(|a| a.name == "density.csv")
        .map(|a| grid_from_csv(&a.contents).unwrap());
    let err = density.as_ref().map(beta_l1).unwrap_or(f64::INFINITY);

    let wide = PipelineConfig {
        phase_interval: Some([0.0, 1.5]),
        clip_phase: true,
        ..config
    };
    let w = run_pipeline(&wide, &input).unwrap();
    let w_res = w
        .report
        .solver
        .as_ref()
        .map(|s| s.dual.residual_norm)
        .unwrap_or(f64::NAN);
    verdict(
        out.report.status == Status::Ok && err < 0.05 && elapsed < Duration::from_secs(60),
        format!(
            "L1 rel err {err:.2e} on phase domain [0, 1], {elapsed:.2?}; diagnostic on [0, 1.5]: status {:?}, residual {w_res:.2e}",
            w.report.status
        ),
    )
}

fn circle_inversion() -> Verdict {
    let phi = GridFunction::from_fn(Domain::Circle, 256, |_| FRAC_PI_2).unwrap();
    let inv = invert_circle(&phi, 0.3).unwrap();
    let exact = inv.density.values.iter().all(|v| *v == 0.3);
    // the formula 2τ₀ e^{Hφ} sin φ without the −τ₀ term gives 0.6 here
    let h = hilbert_circle(&phi).unwrap();
    let printed = 2.0 * 0.3 * h.values[0].exp() * phi.values[0].sin();
    verdict(
        exact,
        format!(
            "ρ ≡ {} at all grid points; the uncorrected formula gives {printed}",
            inv.density.values[0]
        ),
    )
}

fn verblunsky() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let atoms: Vec<(f64, Vec<f64>)> = (0..5)
        .map(|_| {
            (
                rng.gen_range(0.1..1.0),
                (0..3).map(|_| rng.gen_range(0.0..1.0)).collect(),
            )
        })
        .collect();
    let gamma = MultiMoments::from_atoms(&atoms, 6).unwrap();
    let g0 = gamma.total_mass;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let y = RayDirection::new((0..3).map(|_| rng.gen_range(0.05..2.0)).collect(), Normalization::None).unwrap();
        let c = ray_phase_moments(&pushforward_moments(&gamma, &y, 6).unwrap()).unwrap();
        worst = worst.max(rel(c[0], g0));
    }
    verdict(
        worst <= 1e-12,
        format!("100 directions, max |c_0 − γ_0|/γ_0 = {worst:.2e}"),
    )
}

fn tri(t: f64) -> f64 {
    common::square_slice(t, 20_000)
}

/// `PV ∫ tri(s)/(s − x) ds` for the triangle density on `[0, 2]`.
fn tri_cauchy_re(x: f64) -> f64 {
    x * ((1.0 - x) / x).abs().ln() + (2.0 - x) * ((2.0 - x) / (1.0 - x)).abs().ln()
}

fn slice_error(r: &GridFunction) -> f64 {
    r.points()
        .iter()
        .zip(&r.values)
        .filter(|(x, _)| **x > 0.1 && **x < 1.9)
        .map(|(x, v)| (v - tri(*x)).abs())
        .fold(0.0, f64::max)
}

fn radon() -> Verdict {
    let t = Instant::now();
    // ξ* = (1/π) arg(1 + Cμ_p) from the closed-form Cauchy transform of the
    // push-forward; it is 1 between 2 and the zero x* of 1 + Re Cμ_p.
    let phase = |x: f64| (PI * tri(x)).atan2(1.0 + tri_cauchy_re(x)).rem_euclid(2.0 * PI) / PI;
    let xi = GridFunction::from_fn(Domain::Interval { a: 0.0, b: 4.0 }, 1024, phase).unwrap();
    let exact_err = slice_error(&radon_slice(&xi, 4, 8).unwrap());

    let (mut lo, mut hi) = (2.0 + 1e-9, 3.0);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if 1.0 + tri_cauchy_re(m) < 0.0 {
            lo = m
        } else {
            hi = m
        }
    }
    let x_star = lo;

    let order = 12;
    let mut values = std::collections::BTreeMap::new();
    for d in 0..=order {
        for idx in indices_of_degree(2, d) {
            let e = idx.entries();
            values.insert(idx.clone(), 1.0 / ((e[0] + 1) as f64 * (e[1] + 1) as f64));
        }
    }
    let gamma = MultiMoments::new(2, order, values).unwrap();
    let p = RayDirection::new(vec![1.0, 1.0], Normalization::None).unwrap();
    let run = |cutoff| {
        let opts = RayOptions {
            order,
            cutoff,
            fime: FimeOptions {
                max_updates: 2_000_000,
                ..Default::default()
            },
            ..Default::default()
        };
        let s = reconstruct_ray(&gamma, &p, &opts).unwrap();
        (s.solver.converged, s.cutoff, slice_error(&s.radon_values))
    };
    let (conv, _, full_err) = run(CutoffRule::Fixed(x_star));
    let elapsed = t.elapsed();
    let (hc, ht, h_err) = run(CutoffRule::Heuristic);
    let (bc, bt, b_err) = run(CutoffRule::SupportBound);
    verdict(
        exact_err < 0.05 && conv && full_err < 0.05 && elapsed < Duration::from_secs(30),
        format!(
            "L∞ on (0.1, 1.9): exact phase {exact_err:.2e}, maxent phase on [0, {x_star:.4}] {full_err:.2e} \
             (converged={conv}), {elapsed:.2?}; diagnostics: heuristic T={ht:.3} converged={hc} L∞ {h_err:.3}, \
             support bound T={bt:.4} converged={bc} L∞ {b_err:.3}"
        ),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 12] = [
        ("Dirac line conditioning", dirac_conditioning),
        ("circle Dirac conditioning", circle_dirac),
        ("polydisk round trip", polydisk_round_trip),
        ("Miller-Nakos vs convolution", miller_nakos),
        ("FIME on uniform moments", fime_uniform),
        ("negative control", negative_control),
        ("exponential-weight recurrence", exp_weight),
        ("Hilbert operators", hilbert_operators),
        ("β-jump end to end", beta_jump),
        ("circle inversion sanity", circle_inversion),
        ("Verblunsky identity", verblunsky),
        ("Radon slice of unit square", radon),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {}  {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
