//! Seeded random expressions, forms and vector fields. All generated
//! objects are smooth on the whole chart.

use std::sync::Arc;

use cartan::{Chart, DifferentialForm, ScalarExpr, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Corpus {
    rng: ChaCha8Rng,
    chart: Arc<Chart>,
}

impl Corpus {
    pub fn new(chart: &Arc<Chart>, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            chart: chart.clone(),
        }
    }

    pub fn spacetime(seed: u64) -> Self {
        Self::new(&Chart::spacetime(), seed)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn coord(&mut self) -> ScalarExpr {
        ScalarExpr::coord(self.rng.random_range(0..self.chart.dim()))
    }

    fn small_int(&mut self) -> ScalarExpr {
        let mut n = self.rng.random_range(-3..=3);
        if n == 0 {
            n = 1;
        }
        ScalarExpr::int(n)
    }

    /// Linear form with small coefficients, used as a function argument.
    fn linear(&mut self) -> ScalarExpr {
        let a = self.small_int() * self.coord();
        let b = self.small_int() * self.coord();
        (a + b) / ScalarExpr::int(2)
    }

    pub fn expr_depth(&mut self, depth: usize) -> ScalarExpr {
        let leaf = depth == 0 || self.rng.random_bool(0.25);
        if leaf {
            return if self.rng.random_bool(0.7) { self.coord() } else { self.small_int() };
        }
        match self.rng.random_range(0..6) {
            0 | 1 => self.expr_depth(depth - 1) + self.expr_depth(depth - 1),
            2 | 3 => self.expr_depth(depth - 1) * self.expr_depth(depth - 1),
            4 => match self.rng.random_range(0..3) {
                0 => self.linear().sin(),
                1 => self.linear().cos(),
                _ => self.linear().exp(),
            },
            _ => self.expr_depth(depth - 1) - self.small_int(),
        }
    }

    pub fn expr(&mut self) -> ScalarExpr {
        self.expr_depth(3).simplify()
    }

    /// Strictly positive function, for supports and densities.
    pub fn positive(&mut self) -> ScalarExpr {
        let a = self.coord();
        let b = self.linear();
        (ScalarExpr::int(2) + a.powi(2) + b.exp()).simplify()
    }

    pub fn form(&mut self, degree: usize) -> DifferentialForm {
        let n = self.chart.dim();
        let terms = self.rng.random_range(1..=3);
        let mut out = Vec::new();
        for _ in 0..terms {
            let mut idx: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = self.rng.random_range(0..=i);
                idx.swap(i, j);
            }
            idx.truncate(degree);
            idx.sort_unstable();
            out.push((idx, self.expr()));
        }
        DifferentialForm::new(&self.chart, degree, out).expect("valid indices")
    }

    pub fn field(&mut self) -> VectorField {
        let comps = (0..self.chart.dim()).map(|_| self.expr_depth(2).simplify()).collect();
        VectorField::new(&self.chart, comps).expect("matching dimension")
    }

    pub fn point(&mut self, lo: f64, hi: f64) -> Vec<f64> {
        (0..self.chart.dim()).map(|_| self.rng.random_range(lo..hi)).collect()
    }
}
