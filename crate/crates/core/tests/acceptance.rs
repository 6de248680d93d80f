//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use stgeo::matcore::{matrix_exp, svd_factor};
use stgeo::random::{
    gaussian_matrix, random_orthogonal, random_skew, random_stiefel, random_tangent, stream_rng,
};
use stgeo::shapes::ellipse;
use stgeo::{
    curve_distance, curve_distance_mod_rotation, curve_to_frame, embed_frame, frame_to_curve,
    geodesic_residual, geodesic_sample, grassmann_distance, grassmann_exp, horizontal_project,
    horizontality_defect, horizontalize_path, path_length, perturb_independent,
    principal_angle_distance, reduce_to_span, stiefel_distance, stiefel_exp, stiefel_log, Error,
    GrassmannPoint, Matrix, PlanarCurve, ShootingConfig, StiefelPoint,
};

use common::{gram_schmidt, max_gap_after_translation, projector_residual, rk4_geodesic};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

fn unit(n: usize, i: usize) -> StiefelPoint {
    let mut m = Matrix::zeros(n, 1);
    m.set(i, 0, 1.0);
    StiefelPoint::new(m).unwrap()
}

fn sphere_reduction() -> Check {
    let cfg = ShootingConfig::default();
    let mut worst = 0.0f64;
    for (k, n) in [2usize, 3, 10].into_iter().enumerate() {
        let mut rng = stream_rng(1000 + k as u64, 0);
        let x = random_stiefel(&mut rng, n, 1);
        let v_norm = 0.5 + 2.0 * rng.random::<f64>();
        let v = random_tangent(&mut rng, &x, v_norm);
        let s = v.norm();
        for i in 0..=20 {
            let t = i as f64 / 20.0;
            let circle = x
                .matrix()
                .scale((s * t).cos())
                .axpy((s * t).sin() / s, v.matrix());
            worst = worst.max((stiefel_exp(&v, t).0.matrix() - &circle).max_abs());
        }
        let d = stiefel_distance(&unit(n, 0), &unit(n, 1), &cfg).map_err(|e| e.to_string())?;
        ensure(
            (d - FRAC_PI_2).abs() <= 1e-9,
            format!("d(e1, e2) = {d} in R^{n}"),
        )?;
    }
    ensure(worst <= 1e-9, format!("great circle deviation {worst:e}"))?;
    Ok(format!("max great-circle deviation {worst:.1e}"))
}

fn geodesic_ode() -> Check {
    let (mut worst_ode, mut worst_res) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let mut rng = stream_rng(1100 + seed, 0);
        let x = random_stiefel(&mut rng, 8, 3);
        let v_norm = 0.5 + 1.5 * rng.random::<f64>();
        let v = random_tangent(&mut rng, &x, v_norm);
        for i in 1..=10 {
            let t = i as f64 / 10.0;
            let (g, gd) = stiefel_exp(&v, t);
            let (og, ogd) = rk4_geodesic(x.matrix(), v.matrix(), t, 1e-3);
            worst_ode = worst_ode
                .max((g.matrix() - &og).norm_fro())
                .max((gd.matrix() - &ogd).norm_fro());
        }
        // the h = 0.01 central difference carries an O(h²‖v‖⁴) error, so the
        // residual is measured on the unit-speed geodesic
        let unit_speed = v.scale(1.0 / v.norm());
        let samples: Vec<(f64, StiefelPoint)> = geodesic_sample(&unit_speed, 101)
            .map_err(|e| e.to_string())?
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i as f64 / 100.0, p))
            .collect();
        worst_res = worst_res.max(geodesic_residual(&samples).map_err(|e| e.to_string())?);
    }
    ensure(worst_ode <= 1e-6, format!("exp vs RK4 {worst_ode:e}"))?;
    ensure(
        worst_res <= 1e-4,
        format!("geodesic residual {worst_res:e}"),
    )?;
    Ok(format!(
        "exp vs RK4 {worst_ode:.1e}, residual {worst_res:.1e}"
    ))
}

fn span_confinement() -> Check {
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let mut rng = stream_rng(1200 + seed, 0);
        let (n, p) = if seed % 2 == 0 { (10, 3) } else { (40, 2) };
        let x = random_stiefel(&mut rng, n, p);
        let v_norm = 3.0 * rng.random::<f64>();
        let v = random_tangent(&mut rng, &x, v_norm);
        let span = gram_schmidt(&x.matrix().hstack(v.matrix()));
        for i in 0..=10 {
            let (g, gd) = stiefel_exp(&v, i as f64 / 10.0);
            worst = worst
                .max(projector_residual(&span, g.matrix()))
                .max(projector_residual(&span, gd.matrix()));
        }
    }
    ensure(worst <= 1e-9, format!("projector residual {worst:e}"))?;
    Ok(format!("max projector residual {worst:.1e}"))
}

fn reduction_isometry() -> Check {
    let cfg = ShootingConfig::default();
    let results: Vec<Result<(f64, f64), String>> = (0..20u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = stream_rng(1300 + seed, 0);
            let x = random_stiefel(&mut rng, 40, 2);
            let y = random_stiefel(&mut rng, 40, 2);
            let r = reduce_to_span(&x, &y).map_err(|e| e.to_string())?;
            let m = r.effective_dim();
            if m > 4 {
                return Err(format!("reduced ambient {m}"));
            }
            let d = |a: &StiefelPoint, b: &StiefelPoint| {
                stiefel_distance(a, b, &cfg).map_err(|e| e.to_string())
            };
            let reduced = d(&r.reduced_x, &r.reduced_y)?;
            let e12 = random_stiefel(&mut rng, 12, m).into_matrix();
            let in12 = d(
                &embed_frame(&r.reduced_x, &e12).map_err(|e| e.to_string())?,
                &embed_frame(&r.reduced_y, &e12).map_err(|e| e.to_string())?,
            )?;
            let full = d(&x, &y)?;
            let e50 = random_stiefel(&mut rng, 50, 40).into_matrix();
            let in50 = d(
                &embed_frame(&x, &e50).map_err(|e| e.to_string())?,
                &embed_frame(&y, &e50).map_err(|e| e.to_string())?,
            )?;
            Ok((
                (reduced - in12).abs(),
                (full - in50).abs().max((full - reduced).abs()),
            ))
        })
        .collect();
    let (mut worst_red, mut worst_emb) = (0.0f64, 0.0f64);
    for r in results {
        let (a, b) = r?;
        worst_red = worst_red.max(a);
        worst_emb = worst_emb.max(b);
    }
    ensure(
        worst_red <= 1e-7,
        format!("reduced vs 12-dim {worst_red:e}"),
    )?;
    ensure(worst_emb <= 1e-7, format!("embedding {worst_emb:e}"))?;
    Ok(format!(
        "reduced vs 12-dim {worst_red:.1e}, embedding {worst_emb:.1e}"
    ))
}

fn exp_log_round_trip() -> Check {
    let cfg = ShootingConfig::default();
    let errs: Vec<Result<f64, String>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = stream_rng(1400 + seed, 0);
            let p = 1 + (seed % 3) as usize;
            let n = rng.random_range(p + 1..=12);
            let x = random_stiefel(&mut rng, n, p);
            let v_norm = 0.5 * rng.random::<f64>().max(1e-3);
            let v = random_tangent(&mut rng, &x, v_norm);
            let y = stiefel_exp(&v, 1.0).0;
            let w = stiefel_log(&x, &y, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
            Ok((w.matrix() - v.matrix()).norm_fro())
        })
        .collect();
    let mut worst = 0.0f64;
    for e in errs {
        worst = worst.max(e?);
    }
    ensure(worst <= 1e-6, format!("round-trip error {worst:e}"))?;
    Ok(format!("max round-trip error {worst:.1e}"))
}

fn grassmann_oracle() -> Check {
    let cfg = ShootingConfig::default();
    let results: Vec<Result<(f64, f64), String>> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let mut rng = stream_rng(1500 + seed, 0);
            let p = 1 + (seed % 4) as usize;
            let n = rng.random_range(p + 1..=16);
            let x = random_stiefel(&mut rng, n, p);
            let y = random_stiefel(&mut rng, n, p);
            let gx = GrassmannPoint::new(x.clone(), false);
            let gy = GrassmannPoint::new(y.clone(), false);
            let d = grassmann_distance(&gx, &gy, &cfg).map_err(|e| format!("seed {seed}: {e}"))?;
            let oracle = principal_angle_distance(&gx, &gy).map_err(|e| e.to_string())?;
            let g1 = random_orthogonal(&mut rng, p, false);
            let g2 = random_orthogonal(&mut rng, p, false);
            let d2 = grassmann_distance(
                &GrassmannPoint::new(x.rotate(&g1).unwrap(), false),
                &GrassmannPoint::new(y.rotate(&g2).unwrap(), false),
                &cfg,
            )
            .map_err(|e| format!("seed {seed}: {e}"))?;
            Ok(((d - oracle).abs(), (d - d2).abs()))
        })
        .collect();
    let (mut worst, mut gauge) = (0.0f64, 0.0f64);
    for r in results {
        let (a, b) = r?;
        worst = worst.max(a);
        gauge = gauge.max(b);
    }
    ensure(worst <= 1e-6, format!("vs principal angles {worst:e}"))?;
    ensure(gauge <= 1e-8, format!("gauge dependence {gauge:e}"))?;
    Ok(format!(
        "vs principal angles {worst:.1e}, gauge {gauge:.1e}"
    ))
}

fn horizontalization() -> Check {
    let (mut horiz, mut drift, mut growth, mut ident) = (0.0f64, 0.0f64, f64::MIN, 0.0f64);
    for seed in 0..20 {
        let mut rng = stream_rng(1600 + seed, 0);
        let (n, p) = if seed % 2 == 0 { (6, 2) } else { (9, 3) };
        let x = random_stiefel(&mut rng, n, p);
        let v_norm = 0.5 + rng.random::<f64>();
        let v = random_tangent(&mut rng, &x, v_norm);
        let z_norm = 0.5 + 2.0 * rng.random::<f64>();
        let z = random_skew(&mut rng, p, z_norm);
        let w = 1.0 + 4.0 * rng.random::<f64>();
        let path: Vec<StiefelPoint> = (0..201)
            .map(|i| {
                let t = i as f64 / 200.0;
                let r = matrix_exp(&z.scale((w * t).sin()));
                stiefel_exp(&v, t).0.rotate(&r).unwrap()
            })
            .collect();
        let (out, g) = horizontalize_path(&path).map_err(|e| e.to_string())?;
        horiz = horiz.max(horizontality_defect(&out));
        drift = drift.max(g.max_orthogonality_drift());
        growth = growth.max(path_length(&out) - path_length(&path));

        let h = horizontal_project(&v);
        let base = GrassmannPoint::new(x, false);
        let flat: Vec<StiefelPoint> = (0..201)
            .map(|i| {
                grassmann_exp(&base, &h, i as f64 / 200.0)
                    .unwrap()
                    .representative()
                    .clone()
            })
            .collect();
        let (_, g) = horizontalize_path(&flat).map_err(|e| e.to_string())?;
        for gi in g.samples() {
            ident = ident.max((gi - &Matrix::identity(p)).norm_fro());
        }
    }
    ensure(horiz <= 1e-5, format!("horizontality {horiz:e}"))?;
    ensure(drift <= 1e-8, format!("orthogonality drift {drift:e}"))?;
    ensure(growth <= 1e-8, format!("length grew by {growth:e}"))?;
    ensure(ident <= 1e-6, format!("identity defect {ident:e}"))?;
    Ok(format!(
        "horizontality {horiz:.1e}, drift {drift:.1e}, identity {ident:.1e}"
    ))
}

fn perturbation() -> Check {
    let eps = 1e-3;
    let mut worst_ratio = 0.0f64;
    for seed in 0..20 {
        let mut rng = stream_rng(1700 + seed, 0);
        let p = 1 + (seed % 3) as usize;
        let n = 2 * p + (seed % 4) as usize;
        let x = random_stiefel(&mut rng, n, p);
        // share `shared` directions with x, the rest random
        let shared = 1 + (seed as usize / 3) % p;
        let mix = random_orthogonal(&mut rng, p, false);
        let cols = x.matrix().select_columns(&(0..shared).collect::<Vec<_>>());
        let raw = if shared < p {
            cols.hstack(&gaussian_matrix(&mut rng, n, p - shared))
        } else {
            cols
        };
        let y = StiefelPoint::from_span(&raw).unwrap().rotate(&mix).unwrap();
        let rank_of = |m: &Matrix| {
            let s = svd_factor(m).unwrap().sigma;
            s.iter().filter(|&&v| v > 1e-10 * s[0]).count()
        };
        let k = 2 * p - rank_of(&x.matrix().hstack(y.matrix()));
        ensure(
            k == shared,
            format!("seed {seed}: deficiency {k}, expected {shared}"),
        )?;
        let yt = perturb_independent(&x, &y, eps).map_err(|e| e.to_string())?;
        ensure(yt.defect() <= 1e-10, format!("seed {seed}: not a frame"))?;
        let r = rank_of(&x.matrix().hstack(yt.matrix()));
        ensure(r == 2 * p, format!("seed {seed}: rank {r} < {}", 2 * p))?;
        let moved = (yt.matrix() - y.matrix()).norm_fro();
        let bound = 2.0 * (k as f64).sqrt() * eps;
        ensure(
            moved <= bound,
            format!("seed {seed}: moved {moved:e} > {bound:e}"),
        )?;
        worst_ratio = worst_ratio.max(moved / bound);
    }
    Ok(format!("max displacement / bound {worst_ratio:.3}"))
}

fn blob(n: usize, seed: u64) -> PlanarCurve {
    let mut rng = stream_rng(seed, 0);
    let coeffs: Vec<(f64, f64)> = (2..5)
        .map(|_| (0.12 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>()))
        .collect();
    PlanarCurve::new(
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                let r = 1.0
                    + coeffs
                        .iter()
                        .enumerate()
                        .map(|(k, (a, ph))| a * ((k + 2) as f64 * t + ph).cos())
                        .sum::<f64>();
                [r * t.cos(), r * t.sin()]
            })
            .collect(),
    )
    .unwrap()
}

fn curve_quotients() -> Check {
    let cfg = ShootingConfig::default();
    let err = |e: Error| e.to_string();
    let (mut rot, mut sim) = (0.0f64, 0.0f64);
    for seed in 0..10 {
        let c = blob(128, 1800 + seed);
        let mut rng = stream_rng(1850 + seed, 0);
        let alpha = 2.0 * PI * rng.random::<f64>();
        rot = rot.max(curve_distance_mod_rotation(&c, &c.rotate(alpha), &cfg).map_err(err)?);
        let copy = c.scale(0.1 + 5.0 * rng.random::<f64>()).translate(
            10.0 * rng.random::<f64>() - 5.0,
            10.0 * rng.random::<f64>() - 5.0,
        );
        sim = sim.max(curve_distance(&c, &copy, &cfg).map_err(err)?);
    }
    ensure(rot <= 1e-6, format!("rotated copies at {rot:e}"))?;
    ensure(sim <= 1e-7, format!("similar copies at {sim:e}"))?;

    let circle = ellipse(256, 1.0, 1.0).map_err(err)?;
    let oval = ellipse(256, 2.0, 1.0).map_err(err)?;
    let mut runs = Vec::new();
    for seed in 0..5 {
        let cfg = ShootingConfig {
            rng_seed: seed,
            ..ShootingConfig::default()
        };
        runs.push(curve_distance(&circle, &oval, &cfg).map_err(err)?);
        runs.push(curve_distance_mod_rotation(&circle, &oval, &cfg).map_err(err)?);
    }
    ensure(
        runs.iter().all(|&d| d > 0.0),
        "zero circle/ellipse distance".into(),
    )?;
    let spread = |k: usize| {
        let vals: Vec<f64> = runs.iter().skip(k).step_by(2).copied().collect();
        vals.iter().fold(f64::MIN, |a, &b| a.max(b)) - vals.iter().fold(f64::MAX, |a, &b| a.min(b))
    };
    let spread = spread(0).max(spread(1));
    ensure(spread <= 1e-6, format!("seed spread {spread:e}"))?;

    let mut round = 0.0f64;
    for c in [circle, oval, blob(256, 1890)] {
        let back = frame_to_curve(&curve_to_frame(&c).map_err(err)?);
        round = round.max(max_gap_after_translation(c.points(), back.points()) / c.length());
    }
    ensure(round <= 1e-6, format!("round trip {round:e}"))?;
    Ok(format!(
        "rotation {rot:.1e}, similarity {sim:.1e}, circle/ellipse {:.6} (spread {spread:.1e}), round trip {round:.1e}",
        runs[0]
    ))
}

fn diameter() -> Check {
    let cfg = ShootingConfig::default();
    let sweep = |n: usize, pairs: u64, stream: u64| -> (f64, usize) {
        let out: Vec<Result<f64, Error>> = (0..pairs)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream_rng(1900 + i, stream);
                let x = random_stiefel(&mut rng, n, 2);
                let y = random_stiefel(&mut rng, n, 2);
                stiefel_distance(&x, &y, &cfg)
            })
            .collect();
        let failed = out.iter().filter(|r| r.is_err()).count();
        let max = out.into_iter().flatten().fold(0.0f64, f64::max);
        (max, failed)
    };
    let (big, big_failed) = sweep(40, 200, 40);
    let (small, small_failed) = sweep(4, 2000, 4);
    ensure(
        big_failed == 0,
        format!("{big_failed} unsolved pairs in R^40"),
    )?;
    ensure(
        big <= small + 1e-6,
        format!("max over R^40 {big} exceeds max over R^4 {small}"),
    )?;
    Ok(format!(
        "max R^40 {big:.6} <= max R^4 {small:.6} ({small_failed} of 2000 R^4 pairs unsolved)"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("sphere reduction", sphere_reduction),
        ("geodesic ODE consistency", geodesic_ode),
        ("span confinement", span_confinement),
        ("reduction isometry", reduction_isometry),
        ("exp/log round trip", exp_log_round_trip),
        ("Grassmann oracle equivalence", grassmann_oracle),
        ("horizontalization", horizontalization),
        ("perturbation", perturbation),
        ("curve quotients", curve_quotients),
        ("diameter consistency", diameter),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let over_time = secs >= 60.0;
        match result {
            Ok(detail) if !over_time => {
                println!("criterion {:>2} PASS {name}: {detail} [{secs:.2}s]", i + 1)
            }
            Ok(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} FAIL {name}: over 60 s; {detail} [{secs:.2}s]",
                    i + 1
                )
            }
            Err(why) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name}: {why} [{secs:.2}s]", i + 1)
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
