//! Gauss-Legendre rules on [-1, 1] and helpers for mapping them to intervals.

const GL2: [(f64, f64); 2] = [(-0.577_350_269_189_625_8, 1.0), (0.577_350_269_189_625_8, 1.0)];

const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_888_9),
    (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
];

const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_3),
];

const GL12: [(f64, f64); 12] = [
    (-0.981_560_634_246_719_3, 0.047_175_336_386_511_83),
    (-0.904_117_256_370_474_9, 0.106_939_325_995_318_4),
    (-0.769_902_674_194_304_7, 0.160_078_328_543_346_2),
    (-0.587_317_954_286_617_4, 0.203_167_426_723_065_9),
    (-0.367_831_498_998_180_2, 0.233_492_536_538_354_8),
    (-0.125_233_408_511_468_9, 0.249_147_045_813_402_8),
    (0.125_233_408_511_468_9, 0.249_147_045_813_402_8),
    (0.367_831_498_998_180_2, 0.233_492_536_538_354_8),
    (0.587_317_954_286_617_4, 0.203_167_426_723_065_9),
    (0.769_902_674_194_304_7, 0.160_078_328_543_346_2),
    (0.904_117_256_370_474_9, 0.106_939_325_995_318_4),
    (0.981_560_634_246_719_3, 0.047_175_336_386_511_83),
];

/// Nodes and weights of the n-point rule on [-1, 1]. Supported orders: 2, 3, 4, 8, 12.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    match n {
        2 => &GL2,
        3 => &GL3,
        4 => &GL4,
        8 => &GL8,
        12 => &GL12,
        _ => panic!("no Gauss-Legendre rule with {n} points"),
    }
}

/// Integrates `f` over [a, b] with the n-point rule.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n)
        .iter()
        .map(|&(t, wt)| wt * f(mid + half * t))
        .sum::<f64>()
        * half
}

/// Integrates `f` over an energy interval [a, b] with a, b >= 0 after the
/// substitution w = u^2, which removes the square-root behaviour at w = 0.
pub fn integrate_energy(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    integrate(|u| 2.0 * u * f(u * u), a.sqrt(), b.sqrt(), n)
}

/// Nodes (in [a, b]) and weights of the substituted energy rule.
pub fn energy_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let (ua, ub) = (a.sqrt(), b.sqrt());
    let half = 0.5 * (ub - ua);
    let mid = 0.5 * (ua + ub);
    gauss_legendre(n)
        .iter()
        .map(|&(t, wt)| {
            let u = mid + half * t;
            (u * u, wt * half * 2.0 * u)
        })
        .collect()
}
