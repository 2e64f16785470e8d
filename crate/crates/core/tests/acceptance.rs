//! Acceptance criteria, one line each. `--slow` adds the 132-collision Gaussian seam.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use randflight::assembly::{c_max, gaussian_approx, rho_i, TableSet};
use randflight::coeffs::{c_coeff, clear_row_cache};
use randflight::exact::{dilog, rho2_i, rho_proj2, rho_proj2_report};
use randflight::fourier::{
    build_table, eval_rho_is_c, eval_rho_rs_c, extract_r_minus2, FourierTable, TruncationPolicy,
};
use randflight::montecarlo::{simulate_conditional, RngStream};
use randflight::quadrature::integrate_with;
use randflight::rational::ExactRational;
use randflight::PhysParams;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn fixed_table(c: u32) -> FourierTable {
    build_table(c, &TruncationPolicy::fixed(100, 500)).expect("fixed 100/500 table")
}

// Half a unit in the last printed digit of a decimal or e-notation literal.
fn printed_half_ulp(lit: &str) -> f64 {
    let (mant, exp) = match lit.split_once('e') {
        Some((m, e)) => (m, e.parse::<i32>().unwrap()),
        None => (lit, 0),
    };
    let decimals = mant.split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    0.5 * 10f64.powi(exp - decimals)
}

// C(c, m) in plain floating point: coefficient of x^m in (sum x^i/(2i+1))^(c+1).
fn c_float(c: u32, m: usize) -> f64 {
    let base: Vec<f64> = (0..=m).map(|i| 1.0 / (2 * i + 1) as f64).collect();
    let mut acc = vec![0.0; m + 1];
    acc[0] = 1.0;
    for _ in 0..=c {
        let mut next = vec![0.0; m + 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in base.iter().enumerate().take(m + 1 - i) {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc[m]
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn coefficient_table() -> Outcome {
    let start = Instant::now();
    clear_row_cache();
    let table: [[&str; 5]; 6] = [
        ["1", "1/3", "1/5", "1/7", "1/9"],
        ["1", "2/3", "0.511", "0.419", "0.357"],
        ["1", "3/3", "0.933", "0.866", "0.806"],
        ["1", "4/3", "1.467", "1.520", "1.535"],
        ["1", "5/3", "2.111", "2.418", "2.636"],
        ["1", "6/3", "2.867", "3.598", "4.214"],
    ];
    let mut bad = Vec::new();
    for (c, row) in table.iter().enumerate() {
        for (m, cell) in row.iter().enumerate() {
            let got = c_coeff(c as u32, m as u32);
            let ok = if cell.contains('.') {
                within(got.to_f64(), cell.parse().unwrap(), 1e-3)
            } else {
                got == cell.parse::<ExactRational>().unwrap()
            };
            if !ok {
                bad.push(format!("C({c},{m})={got}"));
            }
        }
    }
    let took = start.elapsed();
    outcome(
        bad.is_empty() && took < Duration::from_secs(1),
        format!("30 entries, mismatches {bad:?}, {took:.2?}"),
    )
}

fn cmax_table() -> Outcome {
    let start = Instant::now();
    let want = [(0.1, 2), (1.0, 5), (10.0, 21), (50.0, 73), (100.0, 132)];
    let got: Vec<u32> = want
        .iter()
        .map(|&(lt, _)| c_max(lt, 1e-3).unwrap())
        .collect();
    let took = start.elapsed();
    let ok = got.iter().zip(want.iter()).all(|(g, w)| *g == w.1);
    outcome(
        ok && took < Duration::from_secs(1),
        format!("{got:?}, {took:.2?}"),
    )
}

fn fourier_anchors() -> Outcome {
    let rs = [
        "0.329598",
        "-0.468924",
        "-0.340769",
        "-0.028119",
        "0.010381",
        "-0.00274265",
        "0.000735024",
        "-0.000204368",
        "0.000056844",
        "-0.0000143126",
        "2.1067e-6",
        "1.0685e-6",
    ];
    let is = [
        "0.9236",
        "0.3286",
        "0.0331",
        "-0.0045",
        "0.00068",
        "-0.000114",
        "0.000018",
        "-1.26e-6",
        "-1.36e-6",
        "1.30e-6",
        "-9.10e-7",
        "5.77e-7",
    ];
    let t = build_table(10, &TruncationPolicy::with_h_max(12)).unwrap();
    let mut worst_rs: f64 = 0.0;
    let mut worst_is: f64 = 0.0;
    for h in 1..=12 {
        let (a, b) = (rs[h - 1], is[h - 1]);
        worst_rs =
            worst_rs.max((t.fs_rs[h] - a.parse::<f64>().unwrap()).abs() / printed_half_ulp(a));
        // every isotropic coefficient carries the extracted plateau, known to about 1e-8
        worst_is = worst_is
            .max((t.fs_is[h] - b.parse::<f64>().unwrap()).abs() / (printed_half_ulp(b) + 1e-8));
    }
    outcome(
        worst_rs <= 1.0 && worst_is <= 1.0,
        format!(
            "c=10 mMax={}: worst rs error {worst_rs:.2} and Is error {worst_is:.2} of allowance",
            t.m_max
        ),
    )
}

fn r_minus2() -> Outcome {
    let (rm2, plateau) = extract_r_minus2(3, &TruncationPolicy::default()).unwrap();
    outcome(
        within(plateau, -0.432965, 5e-4) && within(rm2, 5.4408, 0.01),
        format!("plateau {plateau:.7}, <r^-2> {rm2:.5}"),
    )
}

fn truncation_residuals() -> Outcome {
    let t = fixed_table(3);
    let rs_edge = eval_rho_rs_c(&t, 1.0, 1.0, 1.0)
        .unwrap()
        .abs()
        .max(eval_rho_rs_c(&t, -1.0, 1.0, 1.0).unwrap().abs());
    let rs_mid = eval_rho_rs_c(&t, 0.0, 1.0, 1.0).unwrap().abs();
    let is_edge = eval_rho_is_c(&t, 1.0, 1.0, 1.0)
        .unwrap()
        .abs()
        .max(eval_rho_is_c(&t, -1.0, 1.0, 1.0).unwrap().abs());
    let t25 = t.truncated(25);
    let pass = within(rs_edge, 0.013, 0.004) && within(rs_mid, 0.00041, 0.0002) && is_edge <= 2e-4;
    outcome(
        pass,
        format!(
            "c=3, 100 harmonics: |rs(±1)| {rs_edge:.5} (want 0.013±0.004), |rs(0)| {rs_mid:.2e} (want 0.00041±0.0002), \
             |Is(±1)| {is_edge:.2e} (want <=2e-4); at 25 harmonics |rs(±1)| {:.5}, |rs(0)| {:.2e}",
            eval_rho_rs_c(&t25, 1.0, 1.0, 1.0).unwrap().abs(),
            eval_rho_rs_c(&t25, 0.0, 1.0, 1.0).unwrap().abs()
        ),
    )
}

fn one_collision() -> Outcome {
    let t = fixed_table(1);
    // half of the radial density r ln((1+r)/(1-r)) of a single collision at vt = 1
    let exact = |x: f64| 0.5 * x.abs() * ((1.0 + x.abs()) / (1.0 - x.abs())).ln();
    let worst_on = |edge: f64| {
        let n = (2.0 * edge / 1e-4).round() as usize;
        (0..=n)
            .map(|i| -edge + i as f64 * 1e-4)
            .map(|x| (eval_rho_rs_c(&t, x, 1.0, 1.0).unwrap() - exact(x)).abs())
            .fold(0.0, f64::max)
    };
    let worst = worst_on(0.98);
    outcome(
        worst < 0.01,
        format!(
            "max |Fourier - exact| on [-0.98, 0.98] = {worst:.5}; on [-0.9, 0.9] = {:.5}",
            worst_on(0.9)
        ),
    )
}

fn two_collision() -> Outcome {
    let t = fixed_table(2);
    let at_one = eval_rho_is_c(&t, 1.0, 1.0, 1.0).unwrap();
    let mut worst = (0.0, -1.0);
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        let d =
            (eval_rho_is_c(&t, x, 1.0, 1.0).unwrap() - 0.5 * rho2_i(x, 1.0, 1.0).unwrap()).abs();
        if d > worst.1 {
            worst = (x, d);
        }
    }
    outcome(
        within(at_one, 0.007385, 7e-4) && worst.0 == 1.0,
        format!(
            "Is(1) = {at_one:.6}; largest discrepancy {:.6} at x = {}",
            worst.1, worst.0
        ),
    )
}

fn two_collision_integrity() -> Outcome {
    let proj = |x: f64| rho_proj2(x, 1.0, 1.0).unwrap();
    let sym = (0..=200)
        .map(|i| i as f64 / 200.0)
        .map(|x| (proj(x) - proj(-x)).abs())
        .fold(0.0, f64::max);
    let jump = rho_proj2_report(1.0, 1.0).max_jump;
    let breaks = [-0.5, -1.0 / 3.0, 0.0, 1.0 / 3.0, 0.5];
    let mass = integrate_with(proj, -1.0, 1.0, &breaks, 1e-13, 1e-13)
        .unwrap()
        .value;
    let edge = rho2_i(1.0, 1.0, 1.0).unwrap();
    let shell = |r: f64| 4.0 * PI * r * r * rho2_i(r, 1.0, 1.0).unwrap();
    let mass3 = integrate_with(shell, 0.0, 1.0, &[1.0 / 3.0, 0.5], 1e-10, 1e-10)
        .unwrap()
        .value;
    outcome(
        sym <= 1e-12 && jump <= 1e-9 && within(mass, 1.0, 1e-6) && edge.abs() <= 1e-6 && within(mass3, 1.0, 1e-5),
        format!("asymmetry {sym:.1e}, max jump {jump:.1e}, projected mass {mass:.9}, rho_I2(vt) {edge:.1e}, radial mass {mass3:.7}"),
    )
}

fn monte_carlo(set: &TableSet) -> Outcome {
    let start = Instant::now();
    let table = set.get(3).unwrap();
    let mut radii: Vec<f64> = simulate_conditional(10_000, 3, 1.0, 1.0, &RngStream::new(42, 0))
        .iter()
        .map(|s| s.radius)
        .collect();
    radii.sort_by(f64::total_cmp);
    let density = |r: f64| 2.0 * eval_rho_rs_c(table, r, 1.0, 1.0).unwrap();
    let total = integrate_with(density, 0.0, 1.0, &[], 1e-12, 1e-12)
        .unwrap()
        .value;
    let n = radii.len() as f64;
    let (mut cdf, mut last, mut d) = (0.0, 0.0, 0.0f64);
    for (i, &r) in radii.iter().enumerate() {
        cdf += integrate_with(density, last, r, &[], 1e-13, 1e-12)
            .unwrap()
            .value;
        last = r;
        let f = cdf / total;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    let took = start.elapsed();
    outcome(
        d < 0.0163 && took < Duration::from_secs(10),
        format!("D = {d:.5} (limit 0.0163), cdf mass {total:.6}, {took:.2?}"),
    )
}

fn moment_quadratures(set: &TableSet) -> Outcome {
    let mut worst = (0, 0, 0.0f64);
    for c in 1..=5u32 {
        let t = set.get(c).unwrap();
        for m in 1..=3u32 {
            let f = |x: f64| x.powi(2 * m as i32) * eval_rho_rs_c(t, x, 1.0, 1.0).unwrap();
            let q = integrate_with(f, -1.0, 1.0, &[0.0], 1e-14, 1e-13)
                .unwrap()
                .value;
            let want =
                factorial(c) * factorial(2 * m + 1) / factorial(2 * m + c) * c_float(c, m as usize);
            let rel = (q / want - 1.0).abs();
            if rel > worst.2 {
                worst = (c, m, rel);
            }
        }
    }
    outcome(
        worst.2 < 1e-3,
        format!(
            "worst relative error {:.1e} at c={}, m={}",
            worst.2, worst.0, worst.1
        ),
    )
}

fn seam(slow: bool) -> Outcome {
    let (lt, c_top) = if slow {
        (100.0_f64, 132)
    } else {
        (20.0, c_max(20.0, 1e-3).unwrap())
    };
    let start = Instant::now();
    let set = TableSet::build(c_top, TruncationPolicy::default()).unwrap();
    let p = PhysParams::new(1.0, 1.0).unwrap();
    let series = -(-lt).exp_m1() * rho_i(0.0, lt, &p, &set).unwrap();
    let ratio = gaussian_approx(0.0, lt, &p) / series;
    let pass = if slow {
        within(ratio, 1.0088, 0.002)
    } else {
        (0.98..=1.10).contains(&ratio)
    };
    let want = if slow {
        "1.0088 ± 0.002"
    } else {
        "[0.98, 1.10]"
    };
    outcome(
        pass,
        format!(
            "lt={lt}, {c_top} tables in {:.1?}: ratio {ratio:.5} (want {want})",
            start.elapsed()
        ),
    )
}

fn dilogarithm() -> Outcome {
    let start = Instant::now();
    let one = (dilog(1.0).unwrap() - PI * PI / 6.0).abs();
    let half =
        (dilog(0.5).unwrap() - (PI * PI / 12.0 - std::f64::consts::LN_2.powi(2) / 2.0)).abs();
    let refl = (1..=100)
        .map(|i| i as f64 / 101.0)
        .map(|x| {
            (dilog(x).unwrap() + dilog(1.0 - x).unwrap()
                - (PI * PI / 6.0 - x.ln() * (1.0 - x).ln()))
            .abs()
        })
        .fold(0.0, f64::max);
    let took = start.elapsed();
    outcome(
        one <= 1e-12 && half <= 1e-12 && refl <= 1e-12 && took < Duration::from_secs(1),
        format!(
            "residuals Li2(1) {one:.1e}, Li2(1/2) {half:.1e}, reflection {refl:.1e}, {took:.2?}"
        ),
    )
}

fn error_budget() -> Outcome {
    let g = |x: f64| (x.exp() - 1.0 - x - x * x / 2.0) / (x * (x.exp() - 1.0));
    let peak = (1..=10_000).map(|i| g(i as f64 * 1e-3)).fold(0.0, f64::max);
    let factor = g(3.02);
    let discrepancy = eval_rho_is_c(&fixed_table(2), 1.0, 1.0, 1.0).unwrap().abs();
    let scaled = factor * discrepancy;
    outcome(
        scaled <= 2e-4 && within(peak, 0.202351, 1e-6),
        format!("factor {factor:.6} (peak {peak:.6}) x c=2 discrepancy {discrepancy:.6} = {scaled:.2e}, bound 2.0e-4 (lambda/v = 1)"),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let slow = std::env::args().any(|a| a == "--slow");
    let set = TableSet::build(5, TruncationPolicy::default()).expect("tables c <= 5");
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("low-order coefficient table", Box::new(coefficient_table)),
        ("c_max list", Box::new(cmax_table)),
        ("c=10 Fourier coefficient lists", Box::new(fourier_anchors)),
        ("inverse-square moment, c=3", Box::new(r_minus2)),
        ("truncation residuals, c=3", Box::new(truncation_residuals)),
        ("Fourier vs closed form, c=1", Box::new(one_collision)),
        ("Fourier vs closed form, c=2", Box::new(two_collision)),
        (
            "two-collision closed form integrity",
            Box::new(two_collision_integrity),
        ),
        ("Monte Carlo KS, c=3", Box::new(|| monte_carlo(&set))),
        ("moment quadratures", Box::new(|| moment_quadratures(&set))),
        (
            if slow {
                "Gaussian seam, lt=100"
            } else {
                "Gaussian seam surrogate, lt=20"
            },
            Box::new(move || seam(slow)),
        ),
        ("dilogarithm identities", Box::new(dilogarithm)),
        ("error budget at lt=3.02", Box::new(error_budget)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
