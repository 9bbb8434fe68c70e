use num_rational::BigRational;

use super::poly::ZPoly;

/// Sturm chain `f, f', -rem(f, f'), …` over the integers. Every element is
/// scaled by a positive constant only, which leaves sign variations intact.
#[derive(Debug, Clone)]
pub(crate) struct SturmSequence {
    chain: Vec<ZPoly>,
}

impl SturmSequence {
    pub fn new(f: &ZPoly) -> Self {
        let mut chain = vec![f.clone()];
        let df = f.derivative().primitive();
        if df.is_zero() {
            return Self { chain };
        }
        chain.push(df);
        loop {
            let n = chain.len();
            let r = chain[n - 2].positive_pseudo_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r.neg().primitive());
        }
        Self { chain }
    }

    /// Sign variations at `x`, zeros skipped.
    pub fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}
