use clap::ValueEnum;
use serde_json::Value as Json;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// One JSON object per line.
    Lines,
}

pub struct Out {
    pub format: Format,
}

impl Out {
    pub fn new(format: Format) -> Self {
        Self { format }
    }

    pub fn lines(&self) -> bool {
        self.format == Format::Lines
    }

    /// Prints `human` or the JSON record, depending on the format.
    pub fn emit(&self, human: impl AsRef<str>, record: Json) {
        match self.format {
            Format::Human => println!("{}", human.as_ref()),
            Format::Lines => println!("{record}"),
        }
    }

    pub fn error(&self, msg: &str) {
        match self.format {
            Format::Human => eprintln!("error: {msg}"),
            Format::Lines => eprintln!("{}", serde_json::json!({ "error": msg })),
        }
    }
}
