use clap::Parser;
use modtwist_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(done) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&done.report).expect("serializable"));
            } else {
                print!("{}", done.text);
            }
            std::process::exit(done.code);
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            std::process::exit(f.code);
        }
    }
}
