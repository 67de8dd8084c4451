/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums longer than this use compensated accumulation.
pub(crate) const COMPENSATE_ABOVE: usize = 128;

/// Sum of `terms`, compensated when there are more than
/// [`COMPENSATE_ABOVE`] of them.
pub(crate) fn sum_terms<I>(len: usize, terms: I) -> f64
where
    I: Iterator<Item = f64>,
{
    if len > COMPENSATE_ABOVE {
        let mut acc = CompensatedSum::new();
        terms.for_each(|x| acc.add(x));
        acc.value()
    } else {
        terms.sum()
    }
}
