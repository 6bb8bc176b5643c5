//! Globally adaptive Gauss–Kronrod (7/15) integration.
#![allow(clippy::excessive_precision)]

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integration settings. `rel_tol` is the resolution knob.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::quad_tolerance(),
            abs_tol: T::min_positive_value(),
            max_intervals: 4096,
        }
    }
}

impl<T: Real> Quadrature<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over the consecutive panels given by `breakpoints`.
    ///
    /// Returns the value and the summed error estimate.
    pub fn integrate<F>(&self, f: F, breakpoints: &[T]) -> (T, T)
    where
        F: Fn(T) -> T,
    {
        let mut panels: Vec<Panel<T>> = breakpoints
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| Panel::eval(&f, w[0], w[1]))
            .collect();
        if panels.is_empty() {
            return (T::zero(), T::zero());
        }
        loop {
            let (value, error) = totals(&panels);
            let target = self.abs_tol.max(self.rel_tol * value.abs());
            if error <= target || panels.len() >= self.max_intervals {
                return (value, error);
            }
            // split the worst panel; ties resolve to the first for determinism
            let worst = panels.iter().enumerate().fold(0, |best, (i, p)| {
                if p.error > panels[best].error {
                    i
                } else {
                    best
                }
            });
            let p = panels.swap_remove(worst);
            let mid = (p.lo + p.hi) * T::lit(0.5);
            if !(mid > p.lo && mid < p.hi) {
                // interval exhausted at this precision
                return (value, error);
            }
            panels.push(Panel::eval(&f, p.lo, mid));
            panels.push(Panel::eval(&f, mid, p.hi));
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Real> Panel<T> {
    fn eval<F: Fn(T) -> T>(f: &F, lo: T, hi: T) -> Self {
        let half = (hi - lo) * T::lit(0.5);
        let center = lo + half;
        let fc = f(center);
        let mut kronrod = fc * T::lit(WGK[7]);
        let mut gauss = fc * T::lit(WG[3]);
        for j in 0..7 {
            let dx = half * T::lit(XGK[j]);
            let pair = f(center - dx) + f(center + dx);
            kronrod += pair * T::lit(WGK[j]);
            if j % 2 == 1 {
                gauss += pair * T::lit(WG[j / 2]);
            }
        }
        Self {
            lo,
            hi,
            value: kronrod * half,
            error: ((kronrod - gauss) * half).abs(),
        }
    }
}

fn totals<T: Real>(panels: &[Panel<T>]) -> (T, T) {
    panels.iter().fold((T::zero(), T::zero()), |(v, e), p| {
        (v + p.value, e + p.error)
    })
}
