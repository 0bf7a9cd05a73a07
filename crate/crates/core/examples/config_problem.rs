//! Define a problem entirely in the JSON configuration format, with
//! coefficients and boundary data written in the expression language
//! (variables t and x, constant alpha, functions exp/ln/sin/cos/sqrt/abs/
//! gamma/uppergamma).

use caputo_ade::study::{case_from_config, run_pde_case};

const CONFIG: &str = r#"{
    "alpha": 0.338,
    "tf": 1.0,
    "nt": 500,
    "domain": {"type": "interval", "xa": 0.0, "xb": 1.0, "nx": 10},
    "a1": "1",
    "a2": "-1",
    "a3": "0",
    "a4": "720*exp(x)*t^(6-alpha)/gamma(7-alpha)",
    "u0": "0",
    "bc": {"ca": 1, "da": 0, "ua": "t^6",
           "cb": 1, "db": 0, "ub": "exp(1)*t^6"},
    "exact": "exp(x)*t^6"
}"#;

fn main() -> caputo_ade::Result<()> {
    let case = case_from_config(CONFIG, "from-config")?;
    let result = run_pde_case(&case)?;
    println!("sup error vs exact:  {:.4e}", result.sup_error);
    println!("Sylvester residual:  {:.4e}", result.sylvester_residual);
    Ok(())
}
