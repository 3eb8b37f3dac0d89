// quick probe of Gauss-Hermite accuracy
use christoffel::measures::MeasureFamily1D;
use christoffel::orthopoly::eval_univariate_all;

fn main() {
    let fam = MeasureFamily1D::gaussian();
    for q in [30usize, 40, 60] {
        let rule = fam.gauss_rule(q).unwrap();
        let mut worst: (f64, usize) = (0.0, 0);
        for i in 0..30 {
            let total: f64 = rule.nodes.iter().zip(&rule.weights)
                .map(|(&x, &w)| { let v = eval_univariate_all(&fam, i, x).unwrap()[i]; w * v * v })
                .sum();
            if (total - 1.0).abs() > worst.0 { worst = ((total-1.0).abs(), i); }
        }
        println!("q={q}: worst |int psi_i^2 - 1| = {:.3e} at i={}", worst.0, worst.1);
        let m58: f64 = rule.nodes.iter().zip(&rule.weights).map(|(&x,&w)| w * x.powi(39)).sum();
        println!("   odd moment 39 = {:.3e}", m58);
        println!("   extreme node {:.4}, weight {:.3e}", rule.nodes[q-1], rule.weights[q-1]);
    }
    // compare against exponential
    let fam = MeasureFamily1D::exponential();
    let rule = fam.gauss_rule(40).unwrap();
    let mut worst: (f64, usize) = (0.0, 0);
    for i in 0..30 {
        let total: f64 = rule.nodes.iter().zip(&rule.weights)
            .map(|(&x, &w)| { let v = eval_univariate_all(&fam, i, x).unwrap()[i]; w * v * v })
            .sum();
        if (total - 1.0).abs() > worst.0 { worst = ((total-1.0).abs(), i); }
    }
    println!("laguerre q=40: worst = {:.3e} at i={}", worst.0, worst.1);
}
