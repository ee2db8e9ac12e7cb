# Core numerics: CF and Laplace-transform catalogs, errors, diagnostics
