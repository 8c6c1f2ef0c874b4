//! Acceptance criteria, one line each on stdout. Runs without the libtest
//! harness so the lines come out in order and uncaptured; the process
//! exits non-zero when any criterion fails.

use std::io::Write;
use std::process::Command;

use distharm_core::check::{compare, jets_and_differences, within};
use distharm_core::conformal::{conformal_metric, ConformalPoint};
use distharm_core::expr::random::random_field;
use distharm_core::expr::{default_coordinates, ScalarField};
use distharm_core::geometry::PointGeometry;
use distharm_core::radial::{self, Branch};
use distharm_core::rng::SplitMix64;
use distharm_core::scene::{builtin, Scene, BUILTIN_NAMES};
use distharm_core::tension::{frobenius, Form, FramedPoint};
use distharm_core::Jet1;

const SEED: u64 = 20;
const DEFAULT_MUS: [&str; 3] = ["x/5", "x*y/10", "log(1+x^2+y^2)"];

/// Running record of one criterion: comparisons made, the worst
/// normalized error seen, and the first failure.
struct Tally {
    count: usize,
    worst: f64,
    failure: Option<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally {
            count: 0,
            worst: 0.0,
            failure: None,
        }
    }

    /// Relative comparison with the shared pass rule.
    fn rel(&mut self, what: &str, lhs: &[f64], rhs: &[f64], tol: f64) {
        let (l, r, abs, rel) = compare(lhs, rhs);
        self.count += 1;
        self.worst = self.worst.max(rel / tol);
        if !within(abs, l, r, tol) && self.failure.is_none() {
            self.failure = Some(format!("{what}: |lhs−rhs| = {abs:.3e} with |lhs| = {l:.3e}, |rhs| = {r:.3e}"));
        }
    }

    /// `value ≤ bound`.
    fn bound(&mut self, what: &str, value: f64, bound: f64) {
        self.count += 1;
        self.worst = self.worst.max(value / bound);
        if (value.is_nan() || value > bound) && self.failure.is_none() {
            self.failure = Some(format!("{what}: {value:.3e} exceeds {bound:.0e}"));
        }
    }

    /// `value ≥ bound`.
    fn at_least(&mut self, what: &str, value: f64, bound: f64) {
        self.count += 1;
        if (value.is_nan() || value < bound) && self.failure.is_none() {
            self.failure = Some(format!("{what}: {value:.3e} is below {bound:.0e}"));
        }
    }

    fn finish(self, summary: &str) -> (bool, String) {
        match self.failure {
            None => (true, format!("{summary} ({} comparisons, worst {:.2e} of tolerance)", self.count, self.worst)),
            Some(f) => (false, f),
        }
    }
}

type Outcome = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn scene(name: &str) -> Result<Scene, String> {
    builtin(name).map_err(err)
}

fn points(scene: &Scene, count: usize) -> Result<Vec<Vec<f64>>, String> {
    scene.sample_points(count, SEED).map_err(err)
}

fn framed(scene: &Scene, x: &[f64]) -> Result<FramedPoint, String> {
    scene.framed_at(x).map_err(err)
}

fn flat(m: &[Vec<f64>]) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

fn field(scene: &Scene, src: &str) -> Result<ScalarField, String> {
    scene.parse_field(src).map_err(err)
}

fn conformal_points(scene: &Scene, mu: &ScalarField, count: usize) -> Result<Vec<ConformalPoint>, String> {
    let cs = scene.conformal(mu.clone()).map_err(err)?;
    points(scene, count)?
        .iter()
        .map(|x| cs.at(&scene.distribution, x).map_err(err))
        .collect()
}

/// Always-defined random conformal factors over the scene's chart.
fn random_mus(scene: &Scene, count: usize, seed: u64) -> Vec<ScalarField> {
    let mut rng = SplitMix64::new(seed);
    (0..count).map(|_| random_field(&mut rng, &scene.coordinates, 3)).collect()
}

fn form_equivalence() -> Outcome {
    let mut t = Tally::new();
    for name in ["sphere-chart", "hyperbolic-horocycle", "flat-product-22"] {
        let s = scene(name)?;
        for x in points(&s, 100)? {
            let fp = framed(&s, &x)?;
            t.rel(&format!("{name} τ^h at {x:?}"), &fp.tau_h(Form::Primed), &fp.tau_h(Form::Original), 1e-7);
            let (a, b) = (flat(&fp.tau_v(Form::Primed)), flat(&fp.tau_v(Form::Original)));
            t.rel(&format!("{name} τ^v at {x:?}"), &a, &b, 1e-7);
        }
    }
    Ok(t.finish("τ^h and τ^v agree in both forms on three scenes"))
}

fn constant_curvature() -> Outcome {
    let mut t = Tally::new();
    for name in ["sphere-chart", "hyperbolic-horocycle"] {
        let s = scene(name)?;
        let kappa = s.constant_curvature.ok_or("scene without κ")?;
        for x in points(&s, 100)? {
            let fp = framed(&s, &x)?;
            let (_, _, h) = fp.mean_curvatures();
            let kh: Vec<f64> = h.iter().map(|v| kappa * v).collect();
            t.rel(&format!("{name} at {x:?}"), &fp.tau_h(Form::Primed), &kh, 1e-7);
        }
    }
    let s = scene("sphere-chart")?;
    let fp = framed(&s, &[2.0, 0.0])?;
    t.rel("sphere-chart τ^h at (2,0)", &fp.tau_h(Form::Primed), &[1.875, 0.0], 1e-7);
    Ok(t.finish("τ^h = κH on both curved scenes; τ^h(2,0) = (1.875, 0)"))
}

fn totally_geodesic() -> Outcome {
    let mut t = Tally::new();
    let s = scene("flat-product-22")?;
    for x in points(&s, 100)? {
        let fp = framed(&s, &x)?;
        let th = fp.tau_h(Form::Primed);
        t.bound(&format!("|τ^h| at {x:?}"), th.iter().map(|v| v * v).sum::<f64>().sqrt(), 1e-9);
        let tv = flat(&fp.tau_v(Form::Primed));
        t.bound(&format!("max|τ^v| at {x:?}"), tv.iter().fold(0.0f64, |m, v| m.max(v.abs())), 1e-9);
    }
    Ok(t.finish("flat-product-22 has vanishing τ^h and τ^v"))
}

fn duality() -> Outcome {
    let mut t = Tally::new();
    for name in BUILTIN_NAMES {
        let s = scene(name)?;
        for x in points(&s, 100)? {
            let fp = framed(&s, &x)?;
            let dual = fp.swapped();
            t.rel(&format!("{name} τ^h at {x:?}"), &dual.tau_h(Form::Primed), &fp.tau_h(Form::Primed), 1e-7);
            let tv = fp.tau_v(Form::Primed);
            let dv = dual.tau_v(Form::Primed);
            let mut lhs = Vec::new();
            let mut rhs = Vec::new();
            for (a, row) in tv.iter().enumerate() {
                for (i, v) in row.iter().enumerate() {
                    lhs.push(dv[i][a]);
                    rhs.push(-v);
                }
            }
            t.rel(&format!("{name} τ^v at {x:?}"), &lhs, &rhs, 1e-7);
        }
    }
    Ok(t.finish("σ ↔ σ⊥ leaves τ^h fixed and transposes τ^v with a sign, all builtins"))
}

fn conformal_laws() -> Outcome {
    let mut t = Tally::new();
    for name in ["sphere-chart", "hyperbolic-horocycle"] {
        let s = scene(name)?;
        let n = s.dim();
        for src in DEFAULT_MUS {
            let mu = field(&s, src)?;
            let mut rng = SplitMix64::new(SEED);
            let mut draw = |k: usize| -> Vec<f64> { (0..k).map(|_| rng.uniform(-1.0, 1.0)).collect() };
            for cp in conformal_points(&s, &mu, 100)? {
                let (u, v, w) = (draw(n), draw(n), draw(n));
                let coeffs = draw(n);
                let mut y = vec![Jet1::new(0.0, [0.0; 4]); n];
                for (alpha, c) in coeffs.iter().enumerate() {
                    for (yk, ek) in y.iter_mut().zip(cp.base().e_field(alpha)) {
                        *yk = *yk + Jet1::new(ek.value * c, ek.grad.map(|g| g * c));
                    }
                }
                let what = format!("{name} μ={src}");
                t.rel(&format!("{what} connection"), &cp.direct_connection(&u, &y), &cp.predicted_connection(&u, &y), 1e-8);
                t.rel(&format!("{what} curvature"), &cp.direct_curvature(&u, &v, &w), &cp.predicted_curvature(&u, &v, &w), 1e-7);
                let (m1, m2) = cp.frame_coefficient_residuals();
                t.bound(&format!("{what} frame coefficients"), m1.max(m2), 1e-8);
            }
        }
    }
    Ok(t.finish("connection, curvature and frame coefficients of e^{2μ}g match predictions"))
}

fn conformal_tensions() -> Outcome {
    let mut t = Tally::new();
    for name in ["sphere-chart", "flat-product-22"] {
        let s = scene(name)?;
        for src in DEFAULT_MUS {
            let mu = field(&s, src)?;
            for cp in conformal_points(&s, &mu, 50)? {
                let what = format!("{name} μ={src}");
                t.rel(&format!("{what} τ^h"), &cp.direct_tau_h(), &cp.predicted_tau_h(), 1e-6);
                t.rel(&format!("{what} τ^v"), &flat(&cp.direct_tau_v()), &flat(&cp.predicted_tau_v()), 1e-6);
            }
        }
    }
    Ok(t.finish("e^{4μ}τ^h(g̃) and e^{2μ}τ^v(g̃) match predictions"))
}

fn dimension_two() -> Outcome {
    let mut t = Tally::new();
    for name in ["plane-axis", "sphere-chart"] {
        let s = scene(name)?;
        let mut mus: Vec<ScalarField> = DEFAULT_MUS.iter().map(|m| field(&s, m)).collect::<Result<_, _>>()?;
        mus.extend(random_mus(&s, 3, SEED));
        for mu in &mus {
            for cp in conformal_points(&s, mu, 50)? {
                let base = flat(&cp.base().tau_v(Form::Primed));
                t.rel(&format!("{name} μ={mu}"), &flat(&cp.direct_tau_v()), &base, 1e-7);
            }
        }
    }
    Ok(t.finish("e^{2μ}τ^v(g̃) = τ^v(g) on both 2-dimensional scenes"))
}

fn totally_geodesic_conformal() -> Outcome {
    let mut t = Tally::new();
    let s = scene("flat-product-22")?;
    let mut mus: Vec<ScalarField> = DEFAULT_MUS.iter().map(|m| field(&s, m)).collect::<Result<_, _>>()?;
    mus.extend(random_mus(&s, 4, SEED));
    for mu in &mus {
        for cp in conformal_points(&s, mu, 50)? {
            let tv = flat(&cp.tilde().tau_v(Form::Primed));
            t.bound(&format!("μ={mu}"), tv.iter().fold(0.0f64, |m, v| m.max(v.abs())), 1e-8);
        }
    }
    Ok(t.finish("τ^v(g̃) = 0 on flat-product-22"))
}

fn half_dimension() -> Outcome {
    let mut t = Tally::new();
    let s = scene("sphere-chart")?;
    let kappa = s.constant_curvature.ok_or("scene without κ")?;
    for src in DEFAULT_MUS.iter().chain(&["log(x^2+y^2+1)"]) {
        let mu = field(&s, src)?;
        for cp in conformal_points(&s, &mu, 50)? {
            let special = cp.predicted_tau_h_halfdim(kappa).map_err(err)?;
            t.rel(&format!("μ={src}"), &special, &cp.predicted_tau_h(), 1e-7);
        }
    }
    let family = radial::mu_family_field(2.0, 1.0, &s.coordinates).map_err(err)?;
    for cp in conformal_points(&s, &family, 50)? {
        let special = cp.predicted_tau_h_halfdim(kappa).map_err(err)?;
        let norm = special.iter().map(|v| v * v).sum::<f64>().sqrt();
        t.bound("family C=2, D=1", norm, 1e-6);
    }
    Ok(t.finish("the half-dimensional formula equals the general prediction"))
}

fn flat_plane_example() -> Outcome {
    let mut t = Tally::new();
    let s = scene("plane-axis")?;
    let quadratic = field(&s, "x^2+y^2")?;
    let cs = s.conformal(quadratic.clone()).map_err(err)?;
    let closed_form = |cp: &ConformalPoint| -> Vec<f64> {
        let c = cp.calculus();
        let lap = c.laplacian(cp.base().geometry());
        c.gradient_values().iter().map(|g| lap * g).collect()
    };
    let at_one = cs.at(&s.distribution, &[1.0, 1.0]).map_err(err)?;
    t.rel("e^{4μ}τ^h(g̃) at (1,1)", &at_one.direct_tau_h(), &[8.0, 8.0], 1e-7);
    t.rel("Δμ∇μ at (1,1)", &closed_form(&at_one), &[8.0, 8.0], 1e-7);
    for cp in conformal_points(&s, &quadratic, 50)? {
        t.rel("μ = x²+y²", &cp.direct_tau_h(), &closed_form(&cp), 1e-7);
    }
    let harmonic = field(&s, "x*y")?;
    for cp in conformal_points(&s, &harmonic, 50)? {
        t.rel("μ = xy", &cp.tilde().tau_h(Form::Primed), &[0.0, 0.0], 1e-7);
    }
    Ok(t.finish("e^{4μ}τ^h(g̃) = Δμ∇μ, (8, 8) at (1, 1); zero for μ = xy"))
}

fn spherical_example() -> Outcome {
    let mut t = Tally::new();
    let s = scene("sphere-chart")?;
    let pts = points(&s, 50)?;
    for c in [0.0, 1.0, 2.0] {
        for d in [0.5, 1.0] {
            let mu = radial::mu_family_field(c, d, &s.coordinates).map_err(err)?;
            let cs = s.conformal(mu).map_err(err)?;
            for x in &pts {
                let cp = cs.at(&s.distribution, x).map_err(err)?;
                let th = cp.tilde().tau_h(Form::Primed);
                let what = format!("C={c}, D={d} at {x:?}");
                t.bound(&format!("|τ^h(g̃)| {what}"), th.iter().map(|v| v * v).sum::<f64>().sqrt(), 1e-6);
                t.bound(&format!("|τ^v(g̃)| {what}"), frobenius(&cp.tilde().tau_v(Form::Primed)), 1e-6);
            }
        }
    }
    let euclid = radial::mu_family_field(1.0, 0.5, &s.coordinates).map_err(err)?;
    let tilde = conformal_metric(&s.metric, &euclid).map_err(err)?;
    for x in &pts {
        let geo = PointGeometry::new(&tilde, x).map_err(err)?;
        let mut worst = 0.0f64;
        for l in 0..2 {
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        worst = worst.max(geo.riemann(l, k, i, j).abs());
                    }
                }
            }
        }
        t.bound(&format!("curvature of g̃ (C=1, D=1/2) at {x:?}"), worst, 1e-7);
    }
    for k in 0..100 {
        let r = 0.5 + 2.5 * k as f64 / 99.0;
        for (branch, c) in [(Branch::Singular, 0.0), (Branch::Family, 0.0), (Branch::Family, 1.0), (Branch::Family, 2.0)] {
            let f = radial::closed_form_f(branch, c, r).map_err(err)?;
            let df = radial::closed_form_df(branch, c, r).map_err(err)?;
            let res = radial::ode_residual(r, f, df).map_err(err)?;
            t.bound(&format!("ODE residual {branch:?} C={c} r={r}"), res.abs(), 1e-9);
        }
    }
    for (c, r0, r1) in [(1.0, 1.0, 2.0), (0.0, 0.5, 3.0), (2.0, 0.5, 3.0)] {
        let rows = radial::integrate_radial_steps(c, r0, r1, 1000).map_err(err)?;
        let worst = rows.iter().fold(0.0f64, |m, r| m.max(r.abs_error));
        t.bound(&format!("RK4 C={c} on [{r0}, {r1}]"), worst, 1e-6);
    }
    let control = field(&s, "(x^2+y^2)/10")?;
    let cs = s.conformal(control).map_err(err)?;
    for x in [[2.0, 0.0], [0.0, 2.0], [2f64.sqrt(), -(2f64.sqrt())]] {
        let cp = cs.at(&s.distribution, &x).map_err(err)?;
        let th = cp.direct_tau_h();
        t.at_least(&format!("|e^{{4μ}}τ^h(g̃)| at {x:?}"), cp.base().norm(&th), 1e-2);
        let along_circle = cp.base().inner(&th, &cp.base().e(0)).abs();
        t.bound(&format!("X-component at {x:?}"), along_circle, 1e-7);
    }
    Ok(t.finish("radial family harmonic, C=1 D=1/2 flat, ODE and RK4 agree, μ = r²/10 is not harmonic"))
}

fn jets_vs_differences() -> Outcome {
    let mut t = Tally::new();
    let mut rng = SplitMix64::new(SEED);
    for k in 0..20 {
        let n = 2 + k % 3;
        let coords = default_coordinates(n);
        let f = random_field(&mut rng, &coords, 3);
        let x: Vec<f64> = (0..n).map(|_| rng.uniform(-1.5, 1.5)).collect();
        let ((g, fd_g), (h, fd_h)) = jets_and_differences(&f, &x).map_err(err)?;
        t.rel(&format!("gradient of {f} at {x:?}"), &g, &fd_g, 1e-5);
        t.rel(&format!("Hessian of {f} at {x:?}"), &h, &fd_h, 1e-3);
    }
    Ok(t.finish("jet derivatives match central differences for 20 random expressions"))
}

fn run_cli(threads: &str) -> Result<(i32, Vec<u8>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_distharm"))
        .args(["verify", "--scene", "sphere-chart", "--checks", "all", "--samples", "100", "--seed", "7"])
        .args(["--threads", threads])
        .output()
        .map_err(err)?;
    Ok((out.status.code().unwrap_or(-1), out.stdout))
}

fn determinism() -> Outcome {
    let (c1, a) = run_cli("1")?;
    let (c2, b) = run_cli("1")?;
    let (c3, p) = run_cli("4")?;
    if (c1, c2, c3) != (0, 0, 0) {
        return Ok((false, format!("exit codes {c1}, {c2}, {c3}")));
    }
    if a != b {
        return Ok((false, "two serial runs differ".into()));
    }
    if a != p {
        return Ok((false, "serial and parallel runs differ".into()));
    }
    Ok((true, format!("serial, repeated and 4-thread runs identical ({} bytes, exit 0)", a.len())))
}

fn main() {
    // `cargo test -- --list` and filters from the libtest protocol
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [Criterion; 13] = [
        ("form equivalence", form_equivalence),
        ("constant curvature", constant_curvature),
        ("totally geodesic", totally_geodesic),
        ("duality", duality),
        ("conformal laws", conformal_laws),
        ("conformal tensions", conformal_tensions),
        ("dimension two", dimension_two),
        ("totally geodesic, conformal", totally_geodesic_conformal),
        ("half dimension", half_dimension),
        ("flat plane example", flat_plane_example),
        ("spherical example", spherical_example),
        ("jets vs differences", jets_vs_differences),
        ("determinism", determinism),
    ];
    let stdout = std::io::stdout();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let line = format!("criterion {:>2} {} {name}: {detail}\n", i + 1, if pass { "PASS" } else { "FAIL" });
        let mut out = stdout.lock();
        out.write_all(line.as_bytes()).unwrap();
        out.flush().unwrap();
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
