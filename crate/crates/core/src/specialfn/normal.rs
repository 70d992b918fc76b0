//! Standard normal distribution: density, distribution function, quantile,
//! and the inverse Mills ratio used by the skew-normal score.

use crate::error::{Error, Result};

const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;
const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Which standard normal function to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalFn {
    Pdf,
    Cdf,
    Quantile,
}

pub fn std_normal(kind: NormalFn, arg: f64) -> Result<f64> {
    match kind {
        NormalFn::Pdf => Ok(norm_pdf(arg)),
        NormalFn::Cdf => Ok(norm_cdf(arg)),
        NormalFn::Quantile => norm_quantile(arg),
    }
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_TWO_PI
}

pub fn norm_cdf(x: f64) -> f64 {
    if x < -10.0 {
        norm_pdf(x) * tail_series(x) / -x
    } else {
        0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
    }
}

/// log Phi(x) without underflow in the lower tail.
pub fn log_norm_cdf(x: f64) -> f64 {
    if x < -10.0 {
        -0.5 * x * x - SQRT_TWO_PI.ln() + (tail_series(x) / -x).ln()
    } else if x > 0.0 {
        (-norm_cdf(-x)).ln_1p()
    } else {
        norm_cdf(x).ln()
    }
}

/// 1 - 1/z^2 + 3/z^4 - 15/z^6 + ..., the asymptotic factor in
/// Phi(z) = phi(z) S(z) / |z| for z -> -inf. Summed until terms stop shrinking.
fn tail_series(z: f64) -> f64 {
    let z2 = z * z;
    let mut sum: f64 = 1.0;
    let mut term = 1.0;
    let mut k = 1.0;
    loop {
        let next = -term * (2.0 * k - 1.0) / z2;
        if next.abs() >= term.abs() || next.abs() < f64::EPSILON * sum.abs() {
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    sum
}

/// zeta(x) = d log Phi(x) / dx = phi(x) / Phi(x), stable for very negative x.
pub fn inverse_mills(x: f64) -> f64 {
    if x < -10.0 {
        -x / tail_series(x)
    } else {
        norm_pdf(x) / norm_cdf(x)
    }
}

/// Quantile of the standard normal.
pub fn norm_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("normal quantile requires 0 < p < 1, got {p}")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

/// Quantile for p < 0.5: rational initial guess followed by one Halley step.
fn lower_quantile(p: f64) -> f64 {
    let u = p - 0.5;
    let mut x = if u.abs() < U_MAX { midrange(u) } else { low_tail(p) };
    let e = (norm_cdf(x) - p) / norm_pdf(x);
    if e.is_finite() {
        x -= e / (1.0 + 0.5 * x * e);
    }
    x
}

// Rational approximations of the inverse normal (Jäckel, 2024 minimax
// coefficients), accurate to about 1e-16 before the Halley correction.
const U_MAX: f64 = 0.341_344_746_068_542_9;

fn midrange(u: f64) -> f64 {
    let s = U_MAX * U_MAX - u * u;
    u * ((2.929_589_546_983_088_05
        + s * (5.026_057_216_730_310_3e1
            + s * (3.018_705_419_229_339_37e2
                + s * (7.499_778_145_665_792_4e2
                    + s * (6.904_892_420_614_086_12e2
                        + s * (1.342_332_435_026_538_64e2 - 7.589_398_814_012_592_42 * s))))))
        / (1.0
            + s * (1.891_853_807_457_459_8e1
                + s * (1.294_041_204_487_552_81e2
                    + s * (3.868_212_085_404_174_53e2
                        + s * (4.791_239_145_097_567_57e2 + 1.792_270_085_081_026_28e2 * s))))))
}

fn low_tail(p: f64) -> f64 {
    let r = (-p.ln()).sqrt();
    let (num, den): ([f64; 6], [f64; 6]) = if r < 2.05 {
        (
            [
                3.691_562_302_945_566_191,
                4.717_059_060_074_068_944_9e1,
                6.545_129_211_026_145_460_9e1,
                -7.459_468_772_604_592_682_1e1,
                -8.338_389_400_363_696_972_2e1,
                -1.305_407_234_049_409_370_4e1,
            ],
            [
                1.0,
                2.083_721_132_869_775_372_6e1,
                7.181_381_218_257_925_545_9e1,
                5.927_012_255_604_607_771_7e1,
                9.221_688_797_873_743_230_3,
                1.829_517_485_205_353_057_9e-4,
            ],
        )
    } else if r < 3.41 {
        (
            [
                3.234_017_911_631_797_028_8,
                1.449_177_828_689_122_096e1,
                6.839_737_025_659_153_287_8e-1,
                -1.812_544_277_917_891_83e1,
                -1.005_916_339_568_646_151e1,
                -1.201_314_787_943_552_557_4,
            ],
            [
                1.0,
                8.882_093_177_330_433_752_5,
                1.465_637_066_517_679_971_2e1,
                7.136_981_105_610_976_874_5,
                8.488_489_219_914_925_546_9e-1,
                1.095_757_609_882_959_532_3e-5,
            ],
        )
    } else if r < 6.7 {
        (
            [
                3.125_223_578_008_758_480_7,
                9.948_372_431_703_656_067_6,
                -5.163_392_911_552_553_462_8,
                -1.107_053_468_930_936_806_1e1,
                -2.869_906_133_588_252_674_4,
                -1.541_431_949_401_359_749_2e-1,
            ],
            [
                1.0,
                7.076_769_154_309_171_622,
                8.108_634_112_236_153_240_7,
                2.030_707_606_430_904_361_3,
                1.089_797_223_413_182_890_1e-1,
                1.356_598_356_444_129_763_4e-7,
            ],
        )
    } else if r < 12.9 {
        (
            [
                2.616_126_495_089_728_368_1,
                2.250_881_388_987_032_271,
                -3.688_196_041_019_692_267,
                -2.964_425_135_315_060_566_3,
                -4.759_516_954_678_321_643_6e-1,
                -1.612_303_318_390_145_052e-2,
            ],
            [
                1.0,
                3.251_745_516_903_592_149_5,
                2.128_203_027_215_318_819_4,
                3.366_374_640_562_640_016_4e-1,
                1.140_008_728_217_759_435_9e-2,
                3.084_809_357_096_678_729_1e-9,
            ],
        )
    } else {
        (
            [
                2.322_684_904_787_230_295_5,
                -4.279_965_073_450_209_429_7e-2,
                -2.589_445_156_846_572_843_2,
                -8.638_518_121_921_375_884_7e-1,
                -6.512_759_375_378_167_240_4e-2,
                -1.056_635_772_720_258_540_2e-3,
            ],
            [
                1.0,
                1.936_131_611_925_441_220_6,
                6.132_084_132_919_749_334_1e-1,
                4.605_497_451_247_444_318_9e-2,
                7.471_447_992_167_225_483e-4,
                2.313_534_320_630_488_781_8e-11,
            ],
        )
    };
    horner(&num, r) / horner(&den, r)
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}
