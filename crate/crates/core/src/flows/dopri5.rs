//! Dormand–Prince 5(4) with step-size control and 5th-order-consistent dense
//! output (Hairer, Nørsett & Wanner coefficients).

pub(crate) type State = [f64; 6];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Continuous extension over one accepted step.
#[derive(Debug, Clone)]
pub(crate) struct DenseStep {
    pub t0: f64,
    pub h: f64,
    rcont: [State; 5],
}

impl DenseStep {
    pub fn eval(&self, t: f64) -> State {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }
}

/// Why a step attempt failed for good.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum StepFailure<E> {
    /// The right-hand side refused a stage and the step could not shrink further.
    Domain(E),
    /// The error test kept failing below the minimum step.
    Underflow,
}

pub(crate) struct Dopri5<F> {
    rhs: F,
    rtol: f64,
    atol: f64,
    max_step: f64,
    pub t: f64,
    pub y: State,
    k1: State,
    h: f64,
    facold: f64,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy(y: &State, terms: &[(f64, &State)]) -> State {
    std::array::from_fn(|i| y[i] + terms.iter().map(|(a, k)| a * k[i]).sum::<f64>())
}

impl<F, E> Dopri5<F>
where
    F: FnMut(f64, &State) -> Result<State, E>,
{
    pub fn new(mut rhs: F, t0: f64, y0: State, rtol: f64, atol: f64, max_step: f64) -> Result<Self, E> {
        let k1 = rhs(t0, &y0)?;
        let mut s = Self {
            rhs,
            rtol,
            atol,
            max_step,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            facold: 1e-4,
            accepted: 0,
            rejected: 0,
        };
        s.h = s.initial_step()?;
        Ok(s)
    }

    /// Replace the current state (after a chart switch), keeping the step size.
    pub fn reset(&mut self, y: State) -> Result<(), E> {
        self.k1 = (self.rhs)(self.t, &y)?;
        self.y = y;
        Ok(())
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.atol + self.rtol * a.abs().max(b.abs())
    }

    fn initial_step(&mut self) -> Result<f64, E> {
        let (y0, f0) = (self.y, self.k1);
        let norm = |v: &State, s: &Self| {
            (v.iter().zip(&y0).map(|(vi, yi)| (vi / s.scale(*yi, *yi)).powi(2)).sum::<f64>() / 6.0).sqrt()
        };
        let d0 = norm(&y0, self);
        let d1 = norm(&f0, self);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.max_step);
        let y1 = axpy(&y0, &[(h0, &f0)]);
        let d2 = match (self.rhs)(self.t + h0, &y1) {
            Ok(f1) => {
                let diff: State = std::array::from_fn(|i| f1[i] - f0[i]);
                norm(&diff, self) / h0
            }
            Err(_) => return Ok(h0 * 1e-3),
        };
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
        Ok((100.0 * h0).min(h1).min(self.max_step))
    }

    /// Take one accepted step, not passing `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<DenseStep, StepFailure<E>> {
        let mut last_domain_error = None;
        loop {
            let remaining = t_end - self.t;
            let mut h = self.h.min(self.max_step);
            if h >= remaining {
                h = remaining;
            }
            let h_min = 16.0 * f64::EPSILON * self.t.abs().max(1.0);
            if h < h_min && h < remaining {
                return Err(match last_domain_error {
                    Some(e) => StepFailure::Domain(e),
                    None => StepFailure::Underflow,
                });
            }
            match self.attempt(h) {
                Ok((y1, k7, err, ks)) => {
                    if err <= 1.0 {
                        let fac11 = err.powf(0.2 - BETA * 0.75);
                        let fac = (fac11 / self.facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                        self.facold = err.max(1e-4);
                        let dense = self.dense(h, &y1, &k7, &ks);
                        self.t = if h == remaining { t_end } else { self.t + h };
                        self.y = y1;
                        self.k1 = k7;
                        self.h = h / fac;
                        self.accepted += 1;
                        return Ok(dense);
                    }
                    let fac11 = err.powf(0.2 - BETA * 0.75);
                    self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
                    self.rejected += 1;
                }
                Err(e) => {
                    last_domain_error = Some(e);
                    self.h = 0.25 * h;
                    self.rejected += 1;
                }
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn attempt(&mut self, h: f64) -> Result<(State, State, f64, [State; 5]), E> {
        let (t, y, k1) = (self.t, self.y, self.k1);
        let k2 = (self.rhs)(t + C2 * h, &axpy(&y, &[(h * A21, &k1)]))?;
        let k3 = (self.rhs)(t + C3 * h, &axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]))?;
        let k4 = (self.rhs)(t + C4 * h, &axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]))?;
        let k5 = (self.rhs)(
            t + C5 * h,
            &axpy(&y, &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
        )?;
        let k6 = (self.rhs)(
            t + h,
            &axpy(&y, &[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]),
        )?;
        let y1 = axpy(&y, &[(h * A71, &k1), (h * A73, &k3), (h * A74, &k4), (h * A75, &k5), (h * A76, &k6)]);
        let k7 = (self.rhs)(t + h, &y1)?;
        let mut sum = 0.0;
        for i in 0..6 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            sum += (e / self.scale(y[i], y1[i])).powi(2);
        }
        let err = (sum / 6.0).sqrt();
        let err = if err.is_finite() { err } else { f64::INFINITY };
        Ok((y1, k7, err, [k1, k3, k4, k5, k6]))
    }

    fn dense(&self, h: f64, y1: &State, k7: &State, ks: &[State; 5]) -> DenseStep {
        let y0 = &self.y;
        let [k1, k3, k4, k5, k6] = ks;
        let ydiff: State = std::array::from_fn(|i| y1[i] - y0[i]);
        let bspl: State = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
        DenseStep {
            t0: self.t,
            h,
            rcont: [
                *y0,
                ydiff,
                bspl,
                std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                std::array::from_fn(|i| {
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                }),
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: &State) -> Result<State, ()> {
        Ok([y[3], y[4], y[5], -y[0], -y[1], -y[2]])
    }

    #[test]
    fn harmonic_oscillator_period() {
        let mut s = Dopri5::new(harmonic, 0.0, [1.0, 0.0, 0.5, 0.0, 1.0, 0.0], 1e-12, 1e-12, 1.0).unwrap();
        let tf = 2.0 * std::f64::consts::PI;
        while s.t < tf {
            s.step(tf).unwrap();
        }
        let want = [1.0, 0.0, 0.5, 0.0, 1.0, 0.0];
        for i in 0..6 {
            assert!((s.y[i] - want[i]).abs() < 1e-10, "{i}: {}", s.y[i]);
        }
    }

    #[test]
    fn dense_output_tracks_solution() {
        let mut s = Dopri5::new(harmonic, 0.0, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-10, 1e-10, 0.5).unwrap();
        let mut worst: f64 = 0.0;
        while s.t < 3.0 {
            let d = s.step(3.0).unwrap();
            for j in 0..=10 {
                let t = d.t0 + d.h * j as f64 / 10.0;
                worst = worst.max((d.eval(t)[0] - t.cos()).abs());
            }
        }
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn domain_failure_reports_error() {
        // y' = -1 from y = 1 with the domain y > 0.5
        let rhs = |_t: f64, y: &State| if y[0] > 0.5 { Ok([-1.0, 0., 0., 0., 0., 0.]) } else { Err("floor") };
        let mut s = Dopri5::new(rhs, 0.0, [1.0, 0., 0., 0., 0., 0.], 1e-9, 1e-9, 0.1).unwrap();
        let mut out = Ok(());
        while s.t < 1.0 {
            if let Err(e) = s.step(1.0) {
                out = Err(e);
                break;
            }
        }
        assert_eq!(out, Err(StepFailure::Domain("floor")));
        assert!(s.y[0] > 0.5 && s.y[0] < 0.5 + 1e-9);
    }
}
