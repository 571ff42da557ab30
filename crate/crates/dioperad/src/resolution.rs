//! Inclusion-exclusion complex of a monomial shuffle operad.
