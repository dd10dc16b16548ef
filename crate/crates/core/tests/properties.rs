use std::f64::consts::PI;

use proptest::prelude::*;
use qrs_core::gauge::{map_afrp, map_frp, GaugeParams};
use qrs_core::meanfield::{classify_phase, condensate_energy, Displacements};
use qrs_core::model::{critical_coupling, min_critical_coupling, np_excitation_energy};
use qrs_core::report::format_float;
use qrs_core::spin::{spin_meanfield_energy, SpinConfig};
use qrs_core::{ModelParams, MomentumBranch};

fn hopping() -> impl Strategy<Value = (f64, f64)> {
    (-0.1..0.1f64, -0.1..0.1f64)
}

fn shift<T: Copy>(v: [T; 4]) -> [T; 4] {
    [v[3], v[0], v[1], v[2]]
}

fn disk_point() -> impl Strategy<Value = (f64, f64)> {
    (0.0..0.999f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| (r * t.cos(), r * t.sin()))
}

proptest! {
    #[test]
    fn partner_momenta_share_critical_coupling((j1, j2) in hopping()) {
        let p = ModelParams::new(1.0, 50.0, 0.0, j1, j2).unwrap();
        for q in MomentumBranch::ALL {
            prop_assert_eq!(critical_coupling(&p, q).unwrap(), critical_coupling(&p, q.neg()).unwrap());
        }
    }

    #[test]
    fn normal_phase_below_the_lowest_critical_coupling((j1, j2) in hopping(), t in 0.0..0.999f64) {
        let p = ModelParams::new(1.0, 50.0, 0.0, j1, j2).unwrap();
        let g = t * min_critical_coupling(&p).unwrap();
        let pt = classify_phase(&p, g).unwrap();
        prop_assert_eq!(pt.abs_alpha, 0.0);
        for q in MomentumBranch::ALL {
            prop_assert!(np_excitation_energy(&p, g, q).unwrap() > 0.0);
        }
    }

    #[test]
    fn spin_energy_symmetries(
        (j1, j2) in hopping(),
        g in 0.0..0.8f64,
        pts in proptest::array::uniform4(disk_point()),
    ) {
        let p = ModelParams::new(1.0, 50.0, 0.0, j1, j2).unwrap();
        let c = SpinConfig { x: pts.map(|v| v.0), y: pts.map(|v| v.1) };
        let e = spin_meanfield_energy(&p, g, &c).unwrap();
        let flipped = SpinConfig { x: c.x.map(|v| -v), y: c.y.map(|v| -v) };
        let shifted = SpinConfig { x: shift(c.x), y: shift(c.y) };
        let conj = SpinConfig { x: c.x, y: c.y.map(|v| -v) };
        for other in [flipped, shifted, conj] {
            prop_assert!((spin_meanfield_energy(&p, g, &other).unwrap() - e).abs() < 1e-12);
        }
    }

    #[test]
    fn condensate_energy_symmetries(
        (j1, j2) in hopping(),
        g in 0.3..0.8f64,
        re in proptest::array::uniform4(-5.0..5.0f64),
    ) {
        let p = ModelParams::new(1.0, 50.0, 0.0, j1, j2).unwrap();
        let d = Displacements::real(re);
        let e = condensate_energy(&p, g, &d);
        let tol = 1e-12 * e.abs().max(1.0);
        prop_assert!((condensate_energy(&p, g, &Displacements::real(shift(re))) - e).abs() < tol);
        prop_assert!((condensate_energy(&p, g, &d.scaled(-1.0)) - e).abs() < tol);
    }

    #[test]
    fn uniform_map_is_the_reflected_staggered_map(j1 in -0.1..0.1f64, j1_0 in 0.0..0.1f64, theta in 0.0..(2.0 * PI)) {
        let gp = GaugeParams::new(j1_0, theta).unwrap();
        let reflected = GaugeParams::new(j1_0, PI - theta).unwrap();
        prop_assert!((map_frp(j1, &gp) - map_afrp(-j1, &reflected)).abs() < 1e-15);
    }

    #[test]
    fn report_floats_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}
