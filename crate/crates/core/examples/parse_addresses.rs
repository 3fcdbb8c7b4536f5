//! Split a raw multi-address field and decompose each address.
//!
//! ```text
//! cargo run --example parse_addresses
//! cargo run --example parse_addresses -- "Univ Granada, Dept Opt, E-18071 Granada, Spain."
//! ```

use orgprofile::address::{parse_address, split_addresses};

const SAMPLE: &str = "Univ Granada, Escuela Tecn Super Ingn Informat & Telecomunicac, Fac Ciencias, \
Dept Ciencias Computac & Inteligencia Artificial, Res Grp Soft Comp & Intelligent Informat Syst, \
Grp Invest Soft Comp & Sistemas Informac Inteligentes, E-18071 Granada, Spain. \
Univ Granada, Dept Stat & Operat Res, E-18071 Granada, Spain. \
Univ Granada, E-18071 Granada, Spain.";

fn main() {
    let fields: Vec<String> = std::env::args().skip(1).collect();
    let fields = if fields.is_empty() { vec![SAMPLE.to_string()] } else { fields };

    for field in &fields {
        let split = split_addresses(field);
        if let Some(d) = split.diagnostic {
            eprintln!("{d}");
        }
        for (i, address) in split.addresses.iter().enumerate() {
            let parse = parse_address(address).expect("split never yields blank addresses");
            println!("address {}{}", i + 1, if parse.is_university_only() { " (university only)" } else { "" });
            println!("{parse}\n");
        }
    }
}
