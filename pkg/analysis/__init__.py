# Analyses built on the core CF and Laplace types
