use std::sync::Arc;

use dimerdyn_core::coupling::{Channel, CouplingProfile};
use dimerdyn_core::kernels::{KernelMethod, KernelSet};
use dimerdyn_core::rates::{gamma_exact_profile, lamb_shift_profile};
use dimerdyn_core::spectral::DimerParams;

// (p, η, a, y, ∫cos, ∫sin) from oracles/rate_reference.py (mpmath quadosc).
const REFERENCE: &[(f64, f64, f64, f64, f64, f64)] = &[
    (0.5, 0.1, 4.0, 1.0, 0.048958665863813413, 0.32326128078003199),
    (0.5, 0.1, 2.0, 3.0, 0.2678173839088051, 0.051143860110467168),
    (0.5, 1.0, 3.0, 0.5, 0.06078624430728566, 0.33474933429404552),
    (0.5, 1.0, 1.0, 2.0, 0.36013002068535329, 0.30349821283926424),
    (1.5, 1.0, 2.0, 1.0, 0.071399185453696139, 0.36072335541776524),
    (1.5, 3.0, 0.5, 4.0, 0.00035615293057068849, 1.4260424406550789),
    (0.0, 1.0, 2.0, 1.5, 0.29566985916709217, 0.33869202160197847),
    (-0.25, 1.0, 2.0, 1.0, 0.2846451787745086, 0.44728696437190095),
    (0.5, 5.0, -1.5, 0.8, 0.0081100111503215382, -0.61111548043176444),
];

fn profile(p: f64, eta: f64, a: f64, y: f64) -> CouplingProfile {
    let k = Arc::new(KernelSet::dimensionless(p, eta, KernelMethod::ClosedForm).unwrap());
    CouplingProfile {
        eps_eff: a,
        beta: 1.0,
        channels: vec![Channel { kernels: k, damping: y, rate_phase: y, coherence_phase: 0.0 }],
        collective: true,
    }
}

#[test]
fn rate_and_lamb_shift_match_reference() {
    let dimer = DimerParams::new(1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
    for &(p, eta, a, y, want_cos, want_sin) in REFERENCE {
        let prof = profile(p, eta, a, y);
        let r = gamma_exact_profile(&dimer, &prof).unwrap();
        let x = 2.0 * lamb_shift_profile(&dimer, &prof).unwrap();
        let ec = (r.gamma - want_cos).abs();
        let es = (x - want_sin).abs();
        println!("p={p} eta={eta} a={a} y={y}: gamma {:.15} ({ec:.1e}) lamb {:.15} ({es:.1e}) T={} tail={:.2e}",
            r.gamma, x, r.horizon, r.tail_contribution);
        assert!(ec <= 1e-10 * want_cos.abs().max(1e-3), "rate p={p} eta={eta} a={a} y={y}: {} vs {want_cos}", r.gamma);
        assert!(es <= 1e-10 * want_sin.abs().max(1e-3), "lamb p={p} eta={eta} a={a} y={y}: {x} vs {want_sin}");
    }
}

mod routes {
    use dimerdyn_core::coupling::CouplingProfile;
    use dimerdyn_core::kernels::{KernelMethod, ModelKernels};
    use dimerdyn_core::rates::{detailed_balance, gamma_exact, gamma_from_level_shift};
    use dimerdyn_core::spectral::{DimerParams, SpectralDensity, SpectralModel};

    fn collective(p: f64, eta: f64) -> SpectralModel {
        SpectralModel::Collective(SpectralDensity::with_nu(p, eta, 1.0).unwrap())
    }

    fn local(p: f64, eta: f64) -> SpectralModel {
        let d = SpectralDensity::with_nu(p, eta, 1.0).unwrap();
        SpectralModel::Local(d, d)
    }

    fn rate(dimer: &DimerParams, model: &SpectralModel) -> f64 {
        let k = ModelKernels::new(model, dimer.beta, KernelMethod::ClosedForm).unwrap();
        gamma_exact(dimer, model, &k).unwrap().gamma
    }

    #[test]
    fn trace_route_matches_direct_rate() {
        for &(p, eta, eps, l1, l2) in &[
            (0.5, 0.1, 3.9, 0.6, -0.4),
            (0.5, 1.0, 2.0, 0.5, 0.1),
            (1.5, 2.0, 1.0, 0.7, -0.7),
            (-0.25, 1.0, 1.5, 0.3, -0.2),
        ] {
            let dimer = DimerParams::new(eps, 0.3, l1, l2, 1.0).unwrap();
            let model = collective(p, eta);
            let k = ModelKernels::new(&model, 1.0, KernelMethod::ClosedForm).unwrap();
            let direct = gamma_exact(&dimer, &model, &k).unwrap().gamma;
            let trace = gamma_from_level_shift(&dimer, &model, &k).unwrap().gamma;
            assert!((trace - direct).abs() <= 1e-8 * direct.abs(), "p={p} eta={eta}: {trace} vs {direct}");
            let prof = CouplingProfile::new(&dimer, &model, &k).unwrap();
            let (fwd, bwd, gap) = detailed_balance(&prof).unwrap();
            assert!(gap.abs() <= 1e-8 * bwd.abs().max(fwd.abs()), "balance gap {gap}");
        }
    }

    #[test]
    fn collective_equals_local_when_one_coupling_vanishes() {
        for &(l1, l2) in &[(0.0, 0.8), (0.6, 0.0)] {
            let dimer = DimerParams::new(2.5, 1.0, l1, l2, 1.0).unwrap();
            let gc = rate(&dimer, &collective(0.5, 0.5));
            let gl = rate(&dimer, &local(0.5, 0.5));
            assert!((gc - gl).abs() <= 1e-10 * gl, "{gc} vs {gl}");
        }
    }

    #[test]
    fn local_rate_depends_on_magnitudes_only() {
        let model = local(0.5, 0.5);
        let base = DimerParams::new(2.0, 1.0, 0.7, 0.4, 1.0).unwrap();
        let g = rate(&base, &model);
        for (a, b) in [(-0.7, 0.4), (0.7, -0.4), (-0.7, -0.4)] {
            let g2 = rate(&base.with_couplings(a, b), &model);
            assert!((g2 - g).abs() <= 1e-12 * g, "{g2} vs {g}");
        }
    }

    #[test]
    fn collective_rate_sees_the_sign_of_the_product() {
        let model = collective(0.5, 0.5);
        let base = DimerParams::new(2.0, 1.0, 0.7, 0.4, 1.0).unwrap();
        let g = rate(&base, &model);
        let flipped = rate(&base.with_couplings(-0.7, -0.4), &model);
        assert!((flipped - g).abs() <= 1e-8 * g);
        let single = rate(&base.with_couplings(0.7, -0.4), &model);
        assert!((single - g).abs() >= 0.01 * g, "{single} vs {g}");
    }
}
