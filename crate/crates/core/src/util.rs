//! Small numerical helpers shared across modules: C^1 ramp profiles,
//! compensated summation, low-discrepancy sampling and 2D vector ops.

/// Quintic smoothstep on [0,1]: S(0)=0, S(1)=1, S'(0)=S'(1)=0, C^1 (in fact C^2).
#[inline]
pub fn smoothstep5(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
}

/// Derivative of `smoothstep5` (zero outside [0,1]).
#[inline]
pub fn smoothstep5_d(x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    30.0 * x * x * (1.0 - x) * (1.0 - x)
}

/// Gate that is 1 for x <= a, 0 for x >= b, quintic in between.
#[inline]
pub fn gate_down(x: f64, a: f64, b: f64) -> f64 {
    1.0 - smoothstep5((x - a) / (b - a))
}

#[inline]
pub fn gate_down_d(x: f64, a: f64, b: f64) -> f64 {
    -smoothstep5_d((x - a) / (b - a)) / (b - a)
}

/// Gate that is 0 for x <= a, 1 for x >= b.
#[inline]
pub fn gate_up(x: f64, a: f64, b: f64) -> f64 {
    smoothstep5((x - a) / (b - a))
}

#[inline]
pub fn gate_up_d(x: f64, a: f64, b: f64) -> f64 {
    smoothstep5_d((x - a) / (b - a)) / (b - a)
}

/// C^{1,1} ramp 0 -> 1 on [0,1] with flat (zero-slope) ends and max slope
/// 1/(1-x0). The slope profile is a trapezoid whose short smooth shoulders
/// have width `x0` each; this realizes the smallest possible peak slope for
/// a C^1 ramp up to the shoulder correction, which is what the interpolation
/// functions of the indicator construction need to stay within their stated
/// derivative budgets.
#[derive(Debug, Clone, Copy)]
pub struct TrapezoidRamp {
    x0: f64,
    slope: f64,
}

impl TrapezoidRamp {
    pub fn new(shoulder: f64) -> Self {
        assert!(shoulder > 0.0 && shoulder < 0.5);
        TrapezoidRamp {
            x0: shoulder,
            slope: 1.0 / (1.0 - shoulder),
        }
    }

    pub fn max_slope(&self) -> f64 {
        self.slope
    }

    /// Value at x (clamped to [0,1] outside).
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let x0 = self.x0;
        let m = self.slope;
        // cubic-smoothstep shoulder: slope ramps m*s3(t), integral m*x0*(t^3 - t^4/2)
        if x <= x0 {
            let t = x / x0;
            m * x0 * (t * t * t - 0.5 * t * t * t * t)
        } else if x >= 1.0 - x0 {
            let t = (1.0 - x) / x0;
            1.0 - m * x0 * (t * t * t - 0.5 * t * t * t * t)
        } else {
            m * (x - 0.5 * x0)
        }
    }

    /// Derivative at x (zero outside [0,1]).
    pub fn deriv(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let x0 = self.x0;
        let m = self.slope;
        if x <= x0 {
            let t = x / x0;
            m * (3.0 * t * t - 2.0 * t * t * t)
        } else if x >= 1.0 - x0 {
            let t = (1.0 - x) / x0;
            m * (3.0 * t * t - 2.0 * t * t * t)
        } else {
            m
        }
    }
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan::default()
    }
    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Deterministic fixed-order sum: tile-local Kahan sums combined in index
/// order. Reductions that feed CSV output go through this so repeated runs
/// are byte-identical regardless of thread count.
pub fn ordered_sum(values: &[f64]) -> f64 {
    const TILE: usize = 4096;
    let mut outer = Kahan::new();
    for chunk in values.chunks(TILE) {
        let mut inner = Kahan::new();
        for &v in chunk {
            inner.add(v);
        }
        outer.add(inner.value());
    }
    outer.value()
}

/// Halton low-discrepancy sequence in up to 6 dimensions.
pub struct Halton {
    index: u64,
    bases: Vec<u64>,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        let primes = [2u64, 3, 5, 7, 11, 13];
        assert!(dim <= primes.len());
        Halton {
            // offset decorrelates successive uses without losing determinism
            index: 1 + (seed % 65_537),
            bases: primes[..dim].to_vec(),
        }
    }

    pub fn next_point(&mut self, out: &mut [f64]) {
        for (k, &b) in self.bases.iter().enumerate() {
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = self.index;
            while i > 0 {
                f /= b as f64;
                r += f * (i % b) as f64;
                i /= b;
            }
            out[k] = r;
        }
        self.index += 1;
    }
}

/// Map a point of [0,1]^{n-1} to barycentric coordinates of the (n-1)-simplex
/// via the sorted-uniform construction (preserves low discrepancy well
/// enough for margin sampling).
pub fn unit_cube_to_barycentric(u: &[f64], out: &mut [f64]) {
    let n = u.len() + 1;
    let mut cuts: Vec<f64> = u.to_vec();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut prev = 0.0;
    for k in 0..n - 1 {
        out[k] = cuts[k] - prev;
        prev = cuts[k];
    }
    out[n - 1] = 1.0 - prev;
}

/// 2D physical-space vector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct V2 {
    pub x: f64,
    pub y: f64,
}

impl V2 {
    pub const ZERO: V2 = V2 { x: 0.0, y: 0.0 };
    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        V2 { x, y }
    }
    #[inline]
    pub fn dot(self, o: V2) -> f64 {
        self.x * o.x + self.y * o.y
    }
    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }
    #[inline]
    pub fn scale(self, s: f64) -> V2 {
        V2::new(self.x * s, self.y * s)
    }
    #[inline]
    pub fn add(self, o: V2) -> V2 {
        V2::new(self.x + o.x, self.y + o.y)
    }
    #[inline]
    pub fn sub(self, o: V2) -> V2 {
        V2::new(self.x - o.x, self.y - o.y)
    }
    /// Counterclockwise rotation by 90 degrees.
    #[inline]
    pub fn perp(self) -> V2 {
        V2::new(-self.y, self.x)
    }
    #[inline]
    pub fn normalized(self) -> V2 {
        let n = self.norm();
        if n == 0.0 {
            V2::ZERO
        } else {
            self.scale(1.0 / n)
        }
    }
    #[inline]
    pub fn from_angle(theta: f64) -> V2 {
        V2::new(theta.cos(), theta.sin())
    }
    /// Cross product z-component.
    #[inline]
    pub fn cross(self, o: V2) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

/// Wrap a coordinate into [0, l).
#[inline]
pub fn wrap(x: f64, l: f64) -> f64 {
    let r = x % l;
    if r < 0.0 {
        r + l
    } else {
        r
    }
}

/// Signed periodic difference in (-l/2, l/2].
#[inline]
pub fn periodic_diff(a: f64, b: f64, l: f64) -> f64 {
    let mut d = a - b;
    while d > 0.5 * l {
        d -= l;
    }
    while d <= -0.5 * l {
        d += l;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints() {
        assert_eq!(smoothstep5(0.0), 0.0);
        assert_eq!(smoothstep5(1.0), 1.0);
        assert_eq!(smoothstep5_d(0.0), 0.0);
        assert_eq!(smoothstep5_d(1.0), 0.0);
        assert!((smoothstep5(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_ramp_shape() {
        let r = TrapezoidRamp::new(0.2);
        assert!(r.eval(0.0).abs() < 1e-15);
        assert!((r.eval(1.0) - 1.0).abs() < 1e-14);
        assert_eq!(r.deriv(0.0), 0.0);
        assert_eq!(r.deriv(1.0), 0.0);
        // slope bounded by 1/(1-x0)
        let mut max_fd = 0.0f64;
        let h = 1e-6;
        for k in 1..999 {
            let x = k as f64 / 1000.0;
            let fd = (r.eval(x + h) - r.eval(x - h)) / (2.0 * h);
            max_fd = max_fd.max(fd.abs());
            assert!((fd - r.deriv(x)).abs() < 1e-6);
        }
        assert!(max_fd <= r.max_slope() + 1e-9);
    }

    #[test]
    fn barycentric_map_sums_to_one() {
        let mut h = Halton::new(2, 0);
        let mut u = [0.0; 2];
        let mut b = [0.0; 3];
        for _ in 0..100 {
            h.next_point(&mut u);
            unit_cube_to_barycentric(&u, &mut b);
            let s: f64 = b.iter().sum();
            assert!((s - 1.0).abs() < 1e-14);
            assert!(b.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn periodic_helpers() {
        assert!((wrap(-0.25, 1.0) - 0.75).abs() < 1e-15);
        assert!((periodic_diff(0.9, 0.1, 1.0) - (-0.2)).abs() < 1e-15);
    }
}
