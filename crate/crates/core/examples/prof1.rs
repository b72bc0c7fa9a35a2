use drinfeld::poly::Poly;
use drinfeld::rat::Rat;
use drinfeld::{DrinfeldModule, Fq};
use std::time::Instant;

fn main() {
    let fq = Fq::prime_field(3).unwrap();
    let m = DrinfeldModule::new(&fq, vec![Rat::t(&fq), Rat::one(&fq)]).unwrap();
    let t0 = Instant::now();
    let p8 = m.phi_t_power(8);
    println!("phi_t^8 (tau-deg {:?}) in {:?}", p8.tau_degree(), t0.elapsed());
    let q4 = Poly::parse(&fq, "t^4+2*t^2+1").unwrap();
    let r4 = Poly::parse(&fq, "2*t^4+t+2").unwrap();
    let t1 = Instant::now();
    let a = m.phi_of(&q4);
    let b = m.phi_of(&r4);
    println!("phi_of x2 in {:?}", t1.elapsed());
    let t2 = Instant::now();
    let c = a.compose(&b);
    println!("compose in {:?} (tau-deg {:?})", t2.elapsed(), c.tau_degree());
    let t3 = Instant::now();
    let d = m.phi_of(&(&q4 * &r4));
    println!("phi_of(QR) in {:?}", t3.elapsed());
    assert_eq!(c, d);
    println!("total {:?}", t0.elapsed());
}
