//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::process::ExitCode;

use convex_strata::closedform::{p_high, p_low};
use convex_strata::*;

struct Report {
    failures: usize,
}

impl Report {
    fn check(&mut self, id: u32, name: &str, ok: bool, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id}] {name}: {detail}");
        if !ok {
            self.failures += 1;
        }
    }
}

fn spec(m: usize, d: usize, theta: Theta) -> PartitionSpec {
    PartitionSpec::new(m, d, theta).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn named_thetas() -> [(&'static str, Theta); 4] {
    [
        ("arctan 1/2", Theta::CRITICAL),
        ("pi/4", Theta::QUARTER_PI),
        ("pi/3", Theta::new(FRAC_PI_3).unwrap()),
        ("0.2", Theta::new(0.2).unwrap()),
    ]
}

fn closed_form_constants(r: &mut Report) {
    let crit = p_theta(Theta::CRITICAL);
    let quarter = p_theta(Theta::QUARTER_PI);
    let ok = rel(crit, -2.0 / 45.0) < 1e-14
        && rel(quarter, -47.0 / 1440.0) < 1e-14
        && p_theta(Theta::ZERO) == 0.0
        && p_theta(Theta::HALF_PI) == 0.0;
    r.check(
        1,
        "closed-form constants",
        ok,
        format!(
            "P(arctan 1/2) = {crit:e}, P(pi/4) = {quarter:e}, P(0) = {}, P(pi/2) = {}",
            p_theta(Theta::ZERO),
            p_theta(Theta::HALF_PI)
        ),
    );
}

fn branch_continuity_and_shape(r: &mut Report) {
    let low = (p_low(0.5) + 2.0 / 45.0).abs();
    let high = (p_high(2.0) + 2.0 / 45.0).abs();
    let crit = 0.5f64.atan();
    let grid: Vec<f64> = (0..1000).map(|i| FRAC_PI_2 * i as f64 / 999.0).collect();
    let mut shape_ok = true;
    for w in grid.windows(2) {
        let (a, b) = (
            p_theta(Theta::new(w[0]).unwrap()),
            p_theta(Theta::new(w[1]).unwrap()),
        );
        if w[1] <= crit {
            shape_ok &= b <= a + 1e-14;
        } else if w[0] > crit {
            shape_ok &= b + 1e-14 >= a;
        }
    }
    r.check(
        2,
        "branch continuity and monotone shape",
        low < 1e-14 && high < 1e-14 && shape_ok,
        format!("|P1 + 2/45| = {low:.1e}, |P2 + 2/45| = {high:.1e}, shape on 1000-point grid: {shape_ok}"),
    );
}

fn building_block_integrals(r: &mut Report) {
    let quad = QuadratureSpec::building_block();
    let (j1, j2) = building_block_b(Theta::HALF_PI, &quad).unwrap();
    let (c1, c2) = building_block_b(Theta::CRITICAL, &quad).unwrap();
    let targets_ok = (j1.value - 4.0 / 9.0).abs() < 1e-6
        && (j2.value - 1.0 / 9.0).abs() < 1e-6
        && (c1.value - 8.0 / 15.0).abs() < 1e-6
        && (c2.value - 1.0 / 15.0).abs() < 1e-6;
    let mut worst = 0.0f64;
    let mut agree = true;
    for th in [
        0.0,
        0.2,
        0.5f64.atan(),
        std::f64::consts::FRAC_PI_4,
        FRAC_PI_3,
        FRAC_PI_2,
    ] {
        let th = Theta::new(th).unwrap();
        let (q1, q2) = building_block_b(th, &quad).unwrap();
        let (b1, b2) = building_block_closed(th);
        for (q, b) in [(q1, b1), (q2, b2)] {
            agree &= (q.value - b).abs() <= q.error;
            worst = worst.max((q.value - b).abs() / q.error.max(f64::MIN_POSITIVE));
        }
    }
    r.check(
        3,
        "building-block integrals",
        targets_ok && agree,
        format!(
            "pi/2: ({:.9}, {:.9}), arctan 1/2: ({:.9}, {:.9}); closed vs quadrature worst |diff|/error = {worst:.3}",
            j1.value, j2.value, c1.value, c2.value
        ),
    );
}

fn difference_identity(r: &mut Report) {
    let mut ok = true;
    let mut details = Vec::new();
    let jittered2 = build_partition(&spec(3, 2, Theta::HALF_PI));
    for (name, th) in named_thetas() {
        let s = spec(3, 2, th);
        let q = expected_difference_quadrature(
            &build_partition(&s),
            &jittered2,
            &QuadratureSpec::building_block(),
        )
        .unwrap();
        let target = p_theta(th) / 729.0;
        let tol = (1e-3 * target.abs()).max(1e-8);
        ok &= (q.value - target).abs() <= tol;
        details.push(format!("d=2 {name}: {:.3e}", (q.value - target).abs()));
    }
    let jittered3 = build_partition(&spec(3, 3, Theta::HALF_PI));
    for (name, th) in named_thetas() {
        let s = spec(3, 3, th);
        let q = expected_difference_quadrature(
            &build_partition(&s),
            &jittered3,
            &QuadratureSpec::volume(),
        )
        .unwrap();
        let target = p_theta(th) / 3f64.powi(9) / 3.0;
        ok &= (q.value - target).abs() <= q.error;
        details.push(format!(
            "d=3 {name}: {:.3e} (err {:.1e})",
            (q.value - target).abs(),
            q.error
        ));
    }
    r.check(4, "difference identity (m = 3)", ok, details.join(", "));
}

fn coupled_sign(r: &mut Report) {
    let a = build_partition(&spec(3, 2, Theta::CRITICAL));
    let b = build_partition(&spec(3, 2, Theta::HALF_PI));
    let mc = expected_difference_mc(&a, &b, 1_000_000, 20_240_601).unwrap();
    let target = -2.0 / (45.0 * 729.0);
    let z = (mc.value - target) / mc.error;
    let ok = mc.value < 0.0 && z.abs() <= 4.0 && mc.error < 2e-5;
    r.check(
        5,
        "coupled Monte Carlo sign",
        ok,
        format!(
            "{:.6e} ± {:.2e} (target {target:.6e}, z = {z:.2})",
            mc.value, mc.error
        ),
    );
}

fn oracle_equivalence(r: &mut Report) {
    let quad = QuadratureSpec::building_block();
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let mut s = CellStream::new(seed, 0xacce, 0, 0, 6);
        let coords: Vec<f64> = (0..6).map(|_| s.next_unit()).collect();
        let ps = PointSet::new(2, coords).unwrap();
        let exact = l2_squared_exact(&ps).unwrap();
        let q = l2_squared_quadrature(&ps, &quad).unwrap();
        worst = worst.max((exact - q.value).abs());
    }
    let h1 = l2_squared_exact(&PointSet::new(1, vec![0.0]).unwrap()).unwrap();
    let h2 = l2_squared_exact(&PointSet::new(2, vec![0.0, 0.0]).unwrap()).unwrap();
    let hands = (h1 - 1.0 / 3.0).abs().max((h2 - 11.0 / 18.0).abs());
    r.check(
        6,
        "discrepancy oracle equivalence",
        worst < 1e-4 && hands < 1e-12,
        format!("worst |exact - quadrature| = {worst:.2e}, hand values off by {hands:.1e}"),
    );
}

fn trivial_expectation(r: &mut Report) {
    let p = Partition::trivial(1).unwrap();
    let q = expected_l2_squared_quadrature(&p, &QuadratureSpec::building_block()).unwrap();
    let diff = (q.value - 1.0 / 6.0).abs();
    r.check(
        7,
        "single-cell expectation",
        diff < 1e-10,
        format!("{:.17} (|diff| = {diff:.1e})", q.value),
    );
}

fn bound_reproduction(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut ok = true;
    for (m, d) in [(2usize, 2u32), (3, 2), (4, 3), (5, 4)] {
        let n = (m as f64).powi(d as i32);
        let df = d as f64;
        let base = df / n.powf(1.0 + 1.0 / df);
        let scale = 1.0 / (3f64.powi(d as i32 - 2) * n * n * n);
        for (token, expected) in [
            ("zero", base),
            ("half-pi", base),
            ("quarter-pi", base - 47.0 / 1440.0 * scale),
            ("critical", base - 2.0 / 45.0 * scale),
        ] {
            let mut out = Vec::new();
            let args = [
                "convex-strata",
                "bound",
                "--m",
                &m.to_string(),
                "--d",
                &d.to_string(),
                "--theta",
                token,
            ];
            let code = cli::run(args, &mut out, &mut std::io::sink());
            let v: serde_json::Value = serde_json::from_slice(&out).unwrap_or_default();
            let total = v["total"].as_f64().unwrap_or(f64::NAN);
            ok &= code == 0;
            worst = worst.max(rel(total, expected));
        }
    }
    ok &= worst < 1e-14;

    let mut below = true;
    let mut lines = Vec::new();
    for th in [
        Theta::ZERO,
        Theta::CRITICAL,
        Theta::QUARTER_PI,
        Theta::HALF_PI,
    ] {
        let s = spec(3, 2, th);
        let p = build_partition(&s);
        let bound = upper_bound(&s).unwrap().total;
        let q = expected_l2_squared_quadrature(&p, &QuadratureSpec::building_block()).unwrap();
        let mc = expected_l2_squared_mc(&p, 100_000, 5).unwrap();
        below &= q.value <= bound && mc.value <= bound;
        lines.push(format!(
            "{:.4}: {:.4e} <= {:.4e}",
            th.radians(),
            q.value,
            bound
        ));
    }
    r.check(
        8,
        "bound reproduction",
        ok && below,
        format!(
            "worst relative error {worst:.1e}; E[L2^2] vs bound at (3,2): {}",
            lines.join(", ")
        ),
    );
}

fn main() -> ExitCode {
    let mut r = Report { failures: 0 };
    closed_form_constants(&mut r);
    branch_continuity_and_shape(&mut r);
    building_block_integrals(&mut r);
    difference_identity(&mut r);
    coupled_sign(&mut r);
    oracle_equivalence(&mut r);
    trivial_expectation(&mut r);
    bound_reproduction(&mut r);
    if r.failures == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{} acceptance criteria failed", r.failures);
        ExitCode::FAILURE
    }
}
