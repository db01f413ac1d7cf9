//! Cartesian grid geometry, reference-cell mapping, periodic index
//! arithmetic.
//!
//! Cell C_ij = [x_{i-1/2}, x_{i+1/2}] x [y_{j-1/2}, y_{j+1/2}] is centered at
//! (x_i, y_j); the reference map sends it to [-1/2, 1/2]^2. Indices are
//! zero-based and wrap periodically.

/// Uniform periodic Cartesian grid.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub dx: f64,
    pub dy: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        assert!(nx > 0 && ny > 0, "grid needs at least one cell per direction");
        assert!(x_max > x_min && y_max > y_min, "domain bounds must be increasing");
        GridSpec {
            nx,
            ny,
            x_min,
            x_max,
            y_min,
            y_max,
            dx: (x_max - x_min) / nx as f64,
            dy: (y_max - y_min) / ny as f64,
        }
    }

    /// Unit square [0,1]^2.
    pub fn unit_square(nx: usize, ny: usize) -> Self {
        GridSpec::new(nx, ny, 0.0, 1.0, 0.0, 1.0)
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Center (x_i, y_j) of cell (i, j).
    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x_min + (i as f64 + 0.5) * self.dx,
            self.y_min + (j as f64 + 0.5) * self.dy,
        )
    }

    /// Physical point of a reference coordinate in cell (i, j).
    pub fn from_reference(&self, i: usize, j: usize, xi: f64, eta: f64) -> (f64, f64) {
        let (xc, yc) = self.cell_center(i, j);
        (xc + xi * self.dx, yc + eta * self.dy)
    }

    /// Reference coordinate of a physical point lying in cell (i, j).
    pub fn to_reference(&self, i: usize, j: usize, x: f64, y: f64) -> (f64, f64) {
        let (xc, yc) = self.cell_center(i, j);
        ((x - xc) / self.dx, (y - yc) / self.dy)
    }

    /// Periodic neighbor lookup with mathematical (non-negative) modulus.
    pub fn neighbor(&self, i: usize, j: usize, di: isize, dj: isize) -> (usize, usize) {
        (
            wrap(i as isize + di, self.nx),
            wrap(j as isize + dj, self.ny),
        )
    }
}

fn wrap(k: isize, n: usize) -> usize {
    k.rem_euclid(n as isize) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_map_examples() {
        let g = GridSpec::unit_square(10, 10);
        let (xc, yc) = g.cell_center(0, 0);
        assert!((xc - 0.05).abs() < 1e-15 && (yc - 0.05).abs() < 1e-15);
        // Cell center maps to the origin.
        let (xi, eta) = g.to_reference(3, 7, 0.35, 0.75);
        assert!(xi.abs() < 1e-13 && eta.abs() < 1e-13);
        // Upper-right corner maps to (1/2, 1/2).
        let (xi, eta) = g.to_reference(3, 7, 0.4, 0.8);
        assert!((xi - 0.5).abs() < 1e-12 && (eta - 0.5).abs() < 1e-12);
        // Interior point.
        let (xi, eta) = g.to_reference(0, 0, 0.075, 0.025);
        assert!((xi - 0.25).abs() < 1e-13 && (eta + 0.25).abs() < 1e-13);
    }

    #[test]
    fn neighbor_wraps() {
        let g = GridSpec::unit_square(5, 5);
        assert_eq!(g.neighbor(0, 0, -1, 0), (4, 0));
        assert_eq!(g.neighbor(4, 4, 1, 1), (0, 0));
        assert_eq!(g.neighbor(2, 3, 0, 0), (2, 3));
        assert_eq!(g.neighbor(1, 1, -7, 12), (4, 3));
    }

    #[test]
    fn neighbor_is_bijection() {
        let g = GridSpec::unit_square(4, 3);
        for di in -5isize..=5 {
            for dj in -5isize..=5 {
                let mut seen = vec![false; g.n_cells()];
                for i in 0..g.nx {
                    for j in 0..g.ny {
                        let (ni, nj) = g.neighbor(i, j, di, dj);
                        let id = nj * g.nx + ni;
                        assert!(!seen[id]);
                        seen[id] = true;
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn round_trip(
            nx in 1usize..20, ny in 1usize..20,
            i in 0usize..19, j in 0usize..19,
            xi in -0.5f64..0.5, eta in -0.5f64..0.5,
        ) {
            let g = GridSpec::new(nx, ny, -2.0, 3.0, 1.0, 4.0);
            let (i, j) = (i % nx, j % ny);
            let (x, y) = g.from_reference(i, j, xi, eta);
            let (xi2, eta2) = g.to_reference(i, j, x, y);
            let scale = 4.0f64;
            prop_assert!((xi - xi2).abs() < 1e-14 * scale);
            prop_assert!((eta - eta2).abs() < 1e-14 * scale);
        }
    }
}
