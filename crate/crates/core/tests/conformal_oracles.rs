//! Conformal quantities against independent computations: finite
//! differences along coordinate lines and the frame under `g̃`.

use distharm_core::conformal::conformal_metric;
use distharm_core::expr::{default_coordinates, ScalarField};
use distharm_core::geometry::ScalarCalculus;
use distharm_core::radial;
use distharm_core::scene::{builtin, Scene};
use distharm_core::tension::FramedPoint;

const STEP: f64 = 1e-5;

fn field(src: &str, scene: &Scene) -> ScalarField {
    scene.parse_field(src).unwrap()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    let scale = a.iter().map(|u| u * u).sum::<f64>().sqrt().max(b.iter().map(|u| u * u).sum::<f64>().sqrt());
    diff / (1.0 + scale)
}

/// `((Hess_μ e_α)^⊥)` or its tangent twin, evaluated with the frame and
/// geometry at `y`.
fn projected_hessian(scene: &Scene, mu: &ScalarField, alpha: usize, y: &[f64], normal: bool) -> Vec<f64> {
    let fp = scene.framed_at(y).unwrap();
    let calc = ScalarCalculus::eval(fp.geometry(), mu).unwrap();
    let h = calc.hess_apply(fp.geometry(), &fp.e(alpha));
    if normal {
        fp.normal(&h)
    } else {
        fp.tangent(&h)
    }
}

/// `Σ_α (∇_{e_α} V_α)`, with `V_α` differentiated by central differences.
fn naive_trace(scene: &Scene, mu: &ScalarField, x: &[f64], normal: bool) -> Vec<f64> {
    let fp = scene.framed_at(x).unwrap();
    let geo = fp.geometry();
    let n = fp.dim();
    let mut out = vec![0.0; n];
    for alpha in 0..n {
        let v = projected_hessian(scene, mu, alpha, x, normal);
        let mut partials = vec![vec![0.0; n]; n];
        for (i, partial) in partials.iter_mut().enumerate() {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[i] += STEP;
            minus[i] -= STEP;
            let (vp, vm) = (
                projected_hessian(scene, mu, alpha, &plus, normal),
                projected_hessian(scene, mu, alpha, &minus, normal),
            );
            for k in 0..n {
                partial[k] = (vp[k] - vm[k]) / (2.0 * STEP);
            }
        }
        let e = fp.e(alpha);
        let mut cov = vec![0.0; n];
        for (k, c) in cov.iter_mut().enumerate() {
            for i in 0..n {
                let mut d = partials[i][k];
                for (j, vj) in v.iter().enumerate() {
                    d += geo.christoffel(k, i, j).value * vj;
                }
                *c += e[i] * d;
            }
        }
        let projected = if normal { fp.tangent(&cov) } else { fp.normal(&cov) };
        for k in 0..n {
            out[k] += projected[k];
        }
    }
    out
}

#[test]
fn trace_terms_match_finite_differences() {
    let scene = builtin("sphere-chart").unwrap();
    for mu_src in ["x", "x*y/10", "log(1+x^2+y^2)"] {
        let mu = field(mu_src, &scene);
        let cs = scene.conformal(mu.clone()).unwrap();
        for x in scene.sample_points(10, 3).unwrap() {
            let cp = cs.at(&scene.distribution, &x).unwrap();
            let (tr1, tr2) = cp.mixed_projection_trace();
            let naive1 = naive_trace(&scene, &mu, &x, true);
            let naive2 = naive_trace(&scene, &mu, &x, false);
            assert!(rel(&tr1, &naive1) <= 1e-5, "{mu_src} {x:?}: {tr1:?} vs {naive1:?}");
            assert!(rel(&tr2, &naive2) <= 1e-5, "{mu_src} {x:?}: {tr2:?} vs {naive2:?}");
        }
    }
}

#[test]
fn trace_terms_vanish_for_flat_constant_frames() {
    let scene = builtin("flat-product-22").unwrap();
    let cs = scene.conformal(field("x*y+z^2*w", &scene)).unwrap();
    for x in scene.sample_points(10, 5).unwrap() {
        let (tr1, tr2) = cs.at(&scene.distribution, &x).unwrap().mixed_projection_trace();
        assert!(tr1.iter().chain(&tr2).all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn gram_schmidt_commutes_with_conformal_change() {
    for name in ["sphere-chart", "hyperbolic-horocycle", "flat-product-22", "plane-axis"] {
        let scene = builtin(name).unwrap();
        let coords = &scene.coordinates;
        for mu_src in ["x/5", "x*y/10", "log(1+x^2+y^2)"] {
            let mu = ScalarField::parse(mu_src, coords).unwrap();
            let tilde = conformal_metric(&scene.metric, &mu).unwrap();
            for x in scene.sample_points(20, 9).unwrap() {
                let base = scene.framed_at(&x).unwrap();
                let under = FramedPoint::new(&tilde, &scene.distribution, &x).unwrap();
                let k = (-mu.eval_value(&x).unwrap()).exp();
                for alpha in 0..scene.dim() {
                    for (f, e) in under.e(alpha).iter().zip(base.e(alpha)) {
                        assert!((f - k * e).abs() <= 1e-10 * (1.0 + f.abs()), "{name} {mu_src} {x:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn deformed_components_are_rescaled_base_components() {
    let scene = builtin("sphere-chart").unwrap();
    let mu = field("x*y/10", &scene);
    let tilde = conformal_metric(&scene.metric, &mu).unwrap();
    for x in scene.sample_points(20, 1).unwrap() {
        let e2mu = (2.0 * mu.eval_value(&x).unwrap()).exp();
        for i in 0..2 {
            for j in 0..2 {
                let g = scene.metric.component(i, j).eval_value(&x).unwrap();
                let gt = tilde.component(i, j).eval_value(&x).unwrap();
                assert!((gt - e2mu * g).abs() <= 1e-12 * (1.0 + gt.abs()));
            }
        }
    }
}

#[test]
fn radial_family_flattens_the_sphere() {
    let scene = builtin("sphere-chart").unwrap();
    let mu = radial::mu_family_field(1.0, 0.5, &default_coordinates(2)).unwrap();
    let tilde = conformal_metric(&scene.metric, &mu).unwrap();
    for x in scene.sample_points(20, 2).unwrap() {
        let g = tilde.at(&x).unwrap();
        for (i, row) in g.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                assert!((c.value - delta).abs() < 1e-12);
            }
        }
    }
}
