use std::ops::{Add, Mul};

/// Scratch buffers for [`rk4_step`].
pub(crate) struct Rk4Workspace<T> {
    k1: Vec<T>,
    k2: Vec<T>,
    k3: Vec<T>,
    k4: Vec<T>,
    tmp: Vec<T>,
}

impl<T: Copy + Default> Rk4Workspace<T> {
    pub(crate) fn new(dim: usize) -> Self {
        Rk4Workspace {
            k1: vec![T::default(); dim],
            k2: vec![T::default(); dim],
            k3: vec![T::default(); dim],
            k4: vec![T::default(); dim],
            tmp: vec![T::default(); dim],
        }
    }
}

/// One classical fourth-order Runge–Kutta step of the autonomous system
/// `y' = f(y)`; `rhs(y, out)` writes `f(y)` into `out`.
pub(crate) fn rk4_step<T, F>(rhs: &F, y: &mut [T], h: f64, ws: &mut Rk4Workspace<T>)
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[T], &mut [T]),
{
    rhs(y, &mut ws.k1);
    for i in 0..y.len() {
        ws.tmp[i] = y[i] + ws.k1[i] * (0.5 * h);
    }
    rhs(&ws.tmp, &mut ws.k2);
    for i in 0..y.len() {
        ws.tmp[i] = y[i] + ws.k2[i] * (0.5 * h);
    }
    rhs(&ws.tmp, &mut ws.k3);
    for i in 0..y.len() {
        ws.tmp[i] = y[i] + ws.k3[i] * h;
    }
    rhs(&ws.tmp, &mut ws.k4);
    for i in 0..y.len() {
        y[i] = y[i] + (ws.k1[i] + ws.k2[i] * 2.0 + ws.k3[i] * 2.0 + ws.k4[i]) * (h / 6.0);
    }
}
