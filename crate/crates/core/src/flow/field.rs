use crate::exactpoly::{to_f64, Poly, RationalFunction};

/// A polynomial compiled for repeated `f64` evaluation.
#[derive(Debug, Clone)]
pub struct FloatPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl FloatPoly {
    pub fn new(p: &Poly) -> Self {
        let n = p.vars().len();
        let terms = p
            .terms()
            .iter()
            .map(|(m, c)| {
                let exps = (0..n)
                    .filter(|&i| m.get(i) > 0)
                    .map(|i| (i, m.get(i) as i32))
                    .collect();
                (to_f64(c), exps)
            })
            .collect();
        FloatPoly { terms }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, exps)| exps.iter().fold(*c, |v, &(i, e)| v * point[i].powi(e)))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub struct FloatRational {
    num: FloatPoly,
    den: FloatPoly,
}

impl FloatRational {
    pub fn new(r: &RationalFunction) -> Self {
        FloatRational {
            num: FloatPoly::new(r.num()),
            den: FloatPoly::new(r.den()),
        }
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.num.eval(point) / self.den.eval(point)
    }

    pub fn den(&self, point: &[f64]) -> f64 {
        self.den.eval(point)
    }
}
