use std::time::Instant;
use gazegen::neural::{Tape, Tensor};
use rand::SeedableRng; use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut t = |shape: &[usize]| -> Tensor {
        let n: usize = shape.iter().product();
        Tensor::from_vec(shape, (0..n).map(|_| rng.random_range(-0.1..0.1)).collect()).unwrap()
    };
    // conv3 geometry: B32, 128->256, L16->8, k4 s2 p1
    let x = t(&[32, 128, 16]);
    let w = t(&[256, 128, 4]);
    let b = t(&[256]);
    let reps = 50;

    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let xid = tape.leaf(x.clone(), false);
        let wid = tape.leaf(w.clone(), false);
        let bid = tape.leaf(b.clone(), false);
        let _ = tape.conv1d(xid, wid, bid, 2, 1).unwrap();
    }
    println!("conv3 fwd:       {:.2} ms", t0.elapsed().as_secs_f64()*1000.0/reps as f64);

    let t0 = Instant::now();
    for _ in 0..reps {
        let mut tape = Tape::new();
        let xid = tape.leaf(x.clone(), true);
        let wid = tape.leaf(w.clone(), true);
        let bid = tape.leaf(b.clone(), true);
        let y = tape.conv1d(xid, wid, bid, 2, 1).unwrap();
        let m = tape.mean_all(y).unwrap();
        tape.backward(m).unwrap();
    }
    println!("conv3 fwd+bwd:   {:.2} ms", t0.elapsed().as_secs_f64()*1000.0/reps as f64);

    // raw matmul timings at conv3 backward shapes
    use std::hint::black_box;
    let g2d: Vec<f64> = (0..256*256).map(|i| (i as f64 * 0.1).sin()).collect();
    let cols: Vec<f64> = (0..512*256).map(|i| (i as f64 * 0.2).cos()).collect();
    let wv: Vec<f64> = (0..256*512).map(|i| (i as f64 * 0.3).sin()).collect();
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut dw = vec![0.0; 256*512];
        gazegen_kernels_nt(&mut dw, &g2d, &cols, 256, 256, 512);
        black_box(&dw);
    }
    println!("dW matmul_nt:    {:.2} ms", t0.elapsed().as_secs_f64()*1000.0/reps as f64);
    let t0 = Instant::now();
    for _ in 0..reps {
        let mut dcols = vec![0.0; 512*256];
        gazegen_kernels_tn(&mut dcols, &wv, &g2d, 512, 256, 256);
        black_box(&dcols);
    }
    println!("dX matmul_tn:    {:.2} ms", t0.elapsed().as_secs_f64()*1000.0/reps as f64);
}

// expose kernels through test-only shims? they're private; inline copies:
fn gazegen_kernels_nt(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    let mut bt = vec![0.0; k * n];
    for j in 0..n { let src = &b[j*k..(j+1)*k]; for (kk,&v) in src.iter().enumerate() { bt[kk*n+j] = v; } }
    nn(c, a, &bt, m, k, n);
}
fn gazegen_kernels_tn(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    let mut at = vec![0.0; m * k];
    for kk in 0..k { let src = &a[kk*m..(kk+1)*m]; for (i,&v) in src.iter().enumerate() { at[i*k+kk] = v; } }
    nn(c, &at, b, m, k, n);
}
fn nn(c: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    for i4 in (0..m).step_by(4) {
        let rows = 4.min(m - i4);
        if rows == 4 {
            let (c01, c23) = c[i4*n..(i4+4)*n].split_at_mut(2*n);
            let (c0, c1) = c01.split_at_mut(n);
            let (c2, c3) = c23.split_at_mut(n);
            for kk in 0..k {
                let a0 = a[i4*k+kk]; let a1 = a[(i4+1)*k+kk]; let a2 = a[(i4+2)*k+kk]; let a3 = a[(i4+3)*k+kk];
                let br = &b[kk*n..(kk+1)*n];
                for (j,&bv) in br.iter().enumerate() {
                    c0[j] += a0*bv; c1[j] += a1*bv; c2[j] += a2*bv; c3[j] += a3*bv;
                }
            }
        } else {
            for i in i4..i4+rows {
                for kk in 0..k {
                    let aik = a[i*k+kk];
                    let br = &b[kk*n..(kk+1)*n];
                    for (cj,&bv) in c[i*n..(i+1)*n].iter_mut().zip(br) { *cj += aik*bv; }
                }
            }
        }
    }
}
