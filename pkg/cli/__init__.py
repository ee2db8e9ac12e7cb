# Command-line front end: parsing, config, ingestion and reports
