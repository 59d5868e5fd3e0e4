//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13, selected from the 1-norm.

use super::{identity, norm1, CMatrix, Lu};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = norm1(a);
    for (degree, theta) in THETA {
        if norm <= theta {
            let coeffs: &[f64] = match degree {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            return pade_low(a, coeffs);
        }
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / 2f64.powi(s));
    let mut r = pade13(&scaled);
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}

fn solve_pade(u: &CMatrix, v: &CMatrix) -> CMatrix {
    let p = v + u;
    let q = v - u;
    Lu::factor(&q)
        .expect("Padé denominator is nonsingular inside the theta bound")
        .solve(&p)
}

fn pade_low(a: &CMatrix, b: &[f64]) -> CMatrix {
    let n = a.nrows();
    let eye = identity(n);
    let a2 = a.dot(a);
    let mut powers = vec![eye.clone(), a2.clone()];
    let m = b.len() - 1;
    for _ in 2..=m / 2 {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut u_inner = CMatrix::zeros((n, n));
    let mut v = CMatrix::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        u_inner = u_inner + p.mapv(|z| z * b[2 * k + 1]);
        v = v + p.mapv(|z| z * b[2 * k]);
    }
    let u = a.dot(&u_inner);
    solve_pade(&u, &v)
}

fn pade13(a: &CMatrix) -> CMatrix {
    let b = &PADE13;
    let n = a.nrows();
    let eye = identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let sc = |m: &CMatrix, c: f64| m.mapv(|z| z * c);
    let inner_u = sc(&a6, b[13]) + sc(&a4, b[11]) + sc(&a2, b[9]);
    let u = a.dot(&(a6.dot(&inner_u) + sc(&a6, b[7]) + sc(&a4, b[5]) + sc(&a2, b[3]) + sc(&eye, b[1])));
    let inner_v = sc(&a6, b[12]) + sc(&a4, b[10]) + sc(&a2, b[8]);
    let v = a6.dot(&inner_v) + sc(&a6, b[6]) + sc(&a4, b[4]) + sc(&a2, b[2]) + sc(&eye, b[0]);
    solve_pade(&u, &v)
}
