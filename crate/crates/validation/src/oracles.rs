//! Slow, simple reference solutions that share no code with `coupler-core`.

use coupler_core::CircuitParams;

/// Screening phase from y + r sin(y + φ) = 0 by plain bisection. The left
/// side is increasing for r < 1 and changes sign on [−r, r].
pub fn bisect_screening_phase(r: f64, phi_ext: f64) -> f64 {
    let f = |y: f64| y + r * (y + phi_ext).sin();
    let (mut lo, mut hi) = (-r, r);
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Circuit potential written in the absolute massless phases (a, b) across
/// the two ground inductors, in 1/H.
struct LoopPotential {
    phi_ext: f64,
    xi1_bar: f64,
    xi2_bar: f64,
    l01: f64,
    l02: f64,
    lj1: f64,
    lj2: f64,
    lt: f64,
}

impl LoopPotential {
    fn new(p: &CircuitParams, phi_ext: f64) -> Self {
        let total = p.l01 + p.l02;
        let y = bisect_screening_phase(total / p.lt, phi_ext);
        Self {
            phi_ext,
            xi1_bar: -p.l01 * y / total,
            xi2_bar: p.l02 * y / total,
            l01: p.l01,
            l02: p.l02,
            lj1: p.lj1,
            lj2: p.lj2,
            lt: p.lt,
        }
    }

    fn value(&self, phi1: f64, phi2: f64, a: f64, b: f64) -> f64 {
        a * a / (2.0 * self.l01) + b * b / (2.0 * self.l02)
            - (phi1 + self.xi1_bar - a).cos() / self.lj1
            - (phi2 + self.xi2_bar - b).cos() / self.lj2
            - (a - b - self.phi_ext).cos() / self.lt
    }

    fn d_a(&self, phi1: f64, a: f64, b: f64) -> f64 {
        a / self.l01 - (phi1 + self.xi1_bar - a).sin() / self.lj1
            + (a - b - self.phi_ext).sin() / self.lt
    }

    fn d_b(&self, phi2: f64, a: f64, b: f64) -> f64 {
        b / self.l02
            - (phi2 + self.xi2_bar - b).sin() / self.lj2
            - (a - b - self.phi_ext).sin() / self.lt
    }
}

/// Root of an increasing function by bisection, widening the bracket
/// around `guess` until it changes sign.
fn root_near(f: impl Fn(f64) -> f64, guess: f64) -> f64 {
    let mut width = 0.05;
    let (mut lo, mut hi) = (guess - width, guess + width);
    while f(lo) > 0.0 || f(hi) < 0.0 {
        width *= 2.0;
        lo = guess - width;
        hi = guess + width;
        assert!(width < 1e3, "no bracket near {guess}");
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Minimizing deviations (ξ1, ξ2) at grid point (φ1, φ2): brute-force scan
/// of [−1, 1]², then coordinate descent with each coordinate solved by
/// bisection on its partial derivative.
pub fn scan_massless_minimum(p: &CircuitParams, phi_ext: f64, phi1: f64, phi2: f64) -> (f64, f64) {
    let u = LoopPotential::new(p, phi_ext);
    let steps = 100;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..=steps {
        for j in 0..=steps {
            let xi1 = -1.0 + 2.0 * i as f64 / steps as f64;
            let xi2 = -1.0 + 2.0 * j as f64 / steps as f64;
            let v = u.value(phi1, phi2, u.xi1_bar + xi1, u.xi2_bar + xi2);
            if v < best.0 {
                best = (v, xi1, xi2);
            }
        }
    }
    let (mut a, mut b) = (u.xi1_bar + best.1, u.xi2_bar + best.2);
    for _ in 0..500 {
        let a_new = root_near(|x| u.d_a(phi1, x, b), a);
        let b_new = root_near(|x| u.d_b(phi2, a_new, x), b);
        let moved = (a_new - a).abs().max((b_new - b).abs());
        a = a_new;
        b = b_new;
        if moved < 1e-15 {
            break;
        }
    }
    (a - u.xi1_bar, b - u.xi2_bar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bisection_solves_the_screening_equation() {
        for k in 0..16 {
            let phi = k as f64 * PI / 8.0;
            let y = bisect_screening_phase(0.3, phi);
            assert!((y + 0.3 * (y + phi).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn scan_recovers_equilibrium_at_origin() {
        let p = CircuitParams::reference_circuit();
        let (a, b) = scan_massless_minimum(&p, 1.1, 0.0, 0.0);
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12, "{a} {b}");
    }
}
