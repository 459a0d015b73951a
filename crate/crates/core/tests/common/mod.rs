pub mod instances;
pub mod micro;
pub mod oracle;
