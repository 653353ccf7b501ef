use rust_stemmers::{Algorithm, Stemmer};

/// Snowball stemmer behind the core crate's stemming hook.
pub struct Snowball(Stemmer);

impl Snowball {
    pub fn english() -> Self {
        Snowball(Stemmer::create(Algorithm::English))
    }
}

impl wordscores_core::corpus::Stemmer for Snowball {
    fn stem(&self, word: &str) -> String {
        self.0.stem(word).into_owned()
    }
}
