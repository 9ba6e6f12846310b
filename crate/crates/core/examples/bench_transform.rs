//! Rough stage timings for a transformed-target trial; dev aid, not a test.

use std::time::Instant;

use cr_nondeg::engine::*;
use cr_nondeg::expr::parse_jet;
use cr_nondeg::jet::{compose, invert_map, Jet};
use cr_nondeg::manifold::*;
use cr_nondeg::rng::SplitMix64;
use cr_nondeg::scalar::Complex;

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn main() {
    let order = 7u32;
    let ssp = ExtrinsicManifold::make_space(&names(&["Z1", "Z2", "Z3"]));
    let rho = parse_jet("Z1*conj(Z1)+Z2*conj(Z2)+Z3*conj(Z3)-1", &ssp, order).unwrap();
    let source = ExtrinsicManifold::new(
        names(&["Z1", "Z2", "Z3"]),
        vec![rho],
        vec![Complex::one(), Complex::zero(), Complex::zero()],
    )
    .unwrap();
    let tsp = ExtrinsicManifold::make_space(&names(&["W1", "W2", "W3", "W4"]));
    let rho_t = parse_jet(
        "W1*conj(W1)+W2*conj(W2)+W3*conj(W3)+W4*conj(W4)-1",
        &tsp,
        order,
    )
    .unwrap();
    let target = ExtrinsicManifold::new(
        names(&["W1", "W2", "W3", "W4"]),
        vec![rho_t],
        vec![
            Complex::one(),
            Complex::zero(),
            Complex::zero(),
            Complex::zero(),
        ],
    )
    .unwrap();
    let mut comps: Vec<Jet> = (0..3).map(|j| Jet::variable(&ssp, order, j)).collect();
    comps.push(Jet::zero(&ssp, order));
    let map = CrMap::new(
        comps,
        vec![Complex::one(), Complex::zero(), Complex::zero()],
        vec![
            Complex::one(),
            Complex::zero(),
            Complex::zero(),
            Complex::zero(),
        ],
    )
    .unwrap();

    let t = Instant::now();
    let pipeline = Pipeline::prepare(
        ManifoldInput::Extrinsic(source),
        ManifoldInput::Extrinsic(target),
        map,
    )
    .unwrap();
    eprintln!("prepare: {:?}", t.elapsed());

    let t = Instant::now();
    let base = pipeline.run(6, false).unwrap();
    eprintln!("base run: {:?}  dims {:?}", t.elapsed(), base.dims());

    let mut rng = SplitMix64::new(7);
    let f = random_biholomorphism(pipeline.target.space(), order, &mut rng);

    let t = Instant::now();
    let g = invert_map(&f).unwrap();
    eprintln!(
        "invert_map: {:?}  (terms: {:?})",
        t.elapsed(),
        g.iter().map(|j| j.term_count()).collect::<Vec<_>>()
    );

    let t = Instant::now();
    let mut asgn: Vec<Jet> = g.clone();
    for comp in &g {
        asgn.push(comp.conj_swap());
    }
    let rho_new: Vec<Jet> = pipeline
        .target
        .rho()
        .iter()
        .map(|r| compose(r, &asgn).unwrap())
        .collect();
    eprintln!(
        "rho o G: {:?}  (terms {:?})",
        t.elapsed(),
        rho_new.iter().map(|j| j.term_count()).collect::<Vec<_>>()
    );

    let t = Instant::now();
    let (t_new, h_new) = transform_target(&pipeline.target, &pipeline.map, &f).unwrap();
    eprintln!("transform_target total: {:?}", t.elapsed());

    let t = Instant::now();
    let p2 = pipeline.with_target(t_new, h_new).unwrap();
    eprintln!("with_target (verify): {:?}", t.elapsed());

    let t = Instant::now();
    let r2 = p2.run(6, false).unwrap();
    eprintln!("transformed run: {:?} dims {:?}", t.elapsed(), r2.dims());

    let t = Instant::now();
    let check = check_transformation_law_with_base(&pipeline, &base, &f, 6).unwrap();
    eprintln!("full check (again): {:?} holds: {}", t.elapsed(), check.holds);
}
